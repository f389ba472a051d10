//! Random codebooks.
//!
//! Every codeword is drawn from its own keyed stream, so any single codeword
//! can be regenerated without the rest of the table. The relay's
//! double-indexed codebook has `M^2` entries and is never materialized.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::galois::{FieldElement, FieldSpec};
use crate::rng::{StreamKey, StreamRng};

/// Uniform codewords over GF(q), stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FfCodebook {
    n: usize,
    size: usize,
    symbols: Vec<FieldElement>,
}

impl FfCodebook {
    pub fn random(field: &FieldSpec, size: usize, n: usize, key: StreamKey) -> FfCodebook {
        let q = field.order();
        let mut symbols = Vec::with_capacity(size * n);
        for w in 0..size {
            let mut rng = key.with(w as u64).rng();
            symbols.extend((0..n).map(|_| FieldElement::from_raw(rng.random_range(0..q))));
        }
        FfCodebook { n, size, symbols }
    }

    pub fn from_rows(rows: Vec<Vec<FieldElement>>) -> FfCodebook {
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n), "ragged codebook");
        FfCodebook {
            n,
            size: rows.len(),
            symbols: rows.concat(),
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn codeword(&self, w: usize) -> &[FieldElement] {
        &self.symbols[w * self.n..(w + 1) * self.n]
    }
}

/// Letters of one Gaussian codeword, drawn on demand.
#[derive(Debug, Clone)]
pub struct LetterStream {
    rng: StreamRng,
    scale: f64,
    left: usize,
}

impl LetterStream {
    fn new(key: StreamKey, power: f64, n: usize) -> LetterStream {
        LetterStream {
            rng: key.rng(),
            scale: (power / 2.0).sqrt(),
            left: n,
        }
    }
}

impl Iterator for LetterStream {
    type Item = Complex64;

    #[inline]
    fn next(&mut self) -> Option<Complex64> {
        if self.left == 0 {
            return None;
        }
        self.left -= 1;
        let re: f64 = self.rng.sample(StandardNormal);
        let im: f64 = self.rng.sample(StandardNormal);
        Some(Complex64::new(re * self.scale, im * self.scale))
    }
}

/// I.i.d. circularly symmetric complex Gaussian codewords of per-letter power `power`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianCodebook {
    n: usize,
    size: usize,
    power: f64,
    letters: Vec<Complex64>,
}

impl GaussianCodebook {
    pub fn random(size: usize, n: usize, power: f64, key: StreamKey) -> GaussianCodebook {
        let mut letters = Vec::with_capacity(size * n);
        for w in 0..size {
            letters.extend(LetterStream::new(key.with(w as u64), power, n));
        }
        GaussianCodebook { n, size, power, letters }
    }

    pub fn from_rows(rows: Vec<Vec<Complex64>>, power: f64) -> GaussianCodebook {
        let n = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n), "ragged codebook");
        GaussianCodebook {
            n,
            size: rows.len(),
            power,
            letters: rows.concat(),
        }
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn block_length(&self) -> usize {
        self.n
    }

    pub fn power(&self) -> f64 {
        self.power
    }

    pub fn codeword(&self, w: usize) -> &[Complex64] {
        &self.letters[w * self.n..(w + 1) * self.n]
    }
}

/// The relay's codebook for one block, indexed by (own message, network-coded index).
#[derive(Debug, Clone, PartialEq)]
pub enum RelayCodebook {
    /// `M^2` independent Gaussian codewords `X1(w1, w_nc)`.
    DoubleIndex { n: usize, size: usize, power: f64, key: StreamKey },
    /// `X1 = U(w1) + V(w_nc)` with powers `alpha P` and `(1 - alpha) P`.
    Superposition { u: GaussianCodebook, v: GaussianCodebook },
}

/// Letters of one relay codeword.
pub enum RelayLetters<'a> {
    Lazy(LetterStream),
    Sum(std::iter::Zip<std::slice::Iter<'a, Complex64>, std::slice::Iter<'a, Complex64>>),
}

impl Iterator for RelayLetters<'_> {
    type Item = Complex64;

    #[inline]
    fn next(&mut self) -> Option<Complex64> {
        match self {
            RelayLetters::Lazy(s) => s.next(),
            RelayLetters::Sum(z) => z.next().map(|(a, b)| a + b),
        }
    }
}

impl RelayCodebook {
    pub fn double_index(size: usize, n: usize, power: f64, key: StreamKey) -> RelayCodebook {
        RelayCodebook::DoubleIndex { n, size, power, key }
    }

    pub fn superposition(size: usize, n: usize, power: f64, alpha: f64, u_key: StreamKey, v_key: StreamKey) -> RelayCodebook {
        RelayCodebook::Superposition {
            u: GaussianCodebook::random(size, n, alpha * power, u_key),
            v: GaussianCodebook::random(size, n, (1.0 - alpha) * power, v_key),
        }
    }

    /// Messages per index; the table has `size^2` codewords.
    pub fn size(&self) -> usize {
        match self {
            RelayCodebook::DoubleIndex { size, .. } => *size,
            RelayCodebook::Superposition { u, .. } => u.len(),
        }
    }

    /// Total number of distinct codeword indices.
    pub fn len(&self) -> usize {
        self.size() * self.size()
    }

    pub fn is_empty(&self) -> bool {
        self.size() == 0
    }

    pub fn letters(&self, own: usize, nc: usize) -> RelayLetters<'_> {
        match self {
            RelayCodebook::DoubleIndex { n, size, power, key } => {
                RelayLetters::Lazy(LetterStream::new(key.with((own * size + nc) as u64), *power, *n))
            }
            RelayCodebook::Superposition { u, v } => {
                RelayLetters::Sum(u.codeword(own).iter().zip(v.codeword(nc).iter()))
            }
        }
    }

    pub fn codeword(&self, own: usize, nc: usize) -> Vec<Complex64> {
        self.letters(own, nc).collect()
    }
}

//! Finite fields GF(q), q = p^m, backed by exp/log tables.
//!
//! Elements are stored in their canonical integer form: the base-p digits of
//! the integer are the polynomial coefficients, lowest degree first. For prime
//! fields this is just the residue mod p.
//!
//! Extension fields use the smallest monic irreducible reduction polynomial
//! (ordered by its base-p integer encoding), so a given `(p, m)` always yields
//! the same tables.
//!
//! ```
//! use threeway::galois::FieldSpec;
//!
//! let gf4 = FieldSpec::new(2, 2).unwrap();
//! assert_eq!(gf4.reduction_polynomial(), &[1, 1, 1]); // x^2 + x + 1
//! let x = gf4.element(2).unwrap();
//! assert_eq!(gf4.mul(x, x).value(), 3); // x^2 = x + 1
//! ```

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u32 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("field order {p}^{m} exceeds {MAX_ORDER}")]
    OrderTooLarge { p: u32, m: u32 },
    #[error("degree must be at least 1")]
    ZeroDegree,
    #[error("no irreducible polynomial of degree {m} over GF({p})")]
    NoIrreduciblePolynomial { p: u32, m: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{value} is not an element of GF({order})")]
    OutOfRange { value: u32, order: u32 },
}

/// An element of some GF(q), in canonical integer form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FieldElement(u32);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(0);
    pub const ONE: FieldElement = FieldElement(1);

    pub fn value(self) -> u32 {
        self.0
    }

    /// No range check; callers guarantee `v < q`.
    pub(crate) fn from_raw(v: u32) -> FieldElement {
        FieldElement(v)
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The `{"p": .., "m": ..}` form used in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldParams {
    pub p: u32,
    pub m: u32,
}

#[derive(Debug)]
struct Tables {
    p: u32,
    m: u32,
    q: u32,
    poly: Vec<u32>,
    // exp[i] = g^i for i in 0..q-1, with exp[q-1] = exp[0] for convenient wraparound.
    exp: Vec<u32>,
    // log[0] is unused.
    log: Vec<u32>,
}

/// A finite field. Cloning is cheap; the tables are shared.
#[derive(Clone)]
pub struct FieldSpec {
    t: Arc<Tables>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.t.p)
            .field("m", &self.t.m)
            .field("poly", &self.t.poly)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.t.p == other.t.p && self.t.m == other.t.m && self.t.poly == other.t.poly
    }
}

impl Eq for FieldSpec {}

pub fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl FieldSpec {
    /// Builds GF(p^m).
    pub fn new(p: u32, m: u32) -> Result<FieldSpec, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = (p as u64)
            .checked_pow(m)
            .filter(|&q| q <= MAX_ORDER as u64)
            .ok_or(FieldError::OrderTooLarge { p, m })? as u32;

        let poly = if m == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, m).ok_or(FieldError::NoIrreduciblePolynomial { p, m })?
        };

        let mul_slow = |a: u32, b: u32| poly_mul_mod(a, b, p, m, &poly);
        let gen = (2..q)
            .chain(std::iter::once(1))
            .find(|&g| multiplicative_order(g, q, &mul_slow) == q - 1)
            .unwrap_or(1);

        let mut exp = vec![0u32; q as usize];
        let mut log = vec![0u32; q as usize];
        let mut acc = 1u32;
        for i in 0..(q - 1) {
            exp[i as usize] = acc;
            log[acc as usize] = i;
            acc = mul_slow(acc, gen);
        }
        exp[(q - 1) as usize] = exp[0];

        Ok(FieldSpec {
            t: Arc::new(Tables {
                p,
                m,
                q,
                poly,
                exp,
                log,
            }),
        })
    }

    pub fn from_params(params: FieldParams) -> Result<FieldSpec, FieldError> {
        FieldSpec::new(params.p, params.m)
    }

    pub fn params(&self) -> FieldParams {
        FieldParams {
            p: self.t.p,
            m: self.t.m,
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.t.p
    }

    pub fn degree(&self) -> u32 {
        self.t.m
    }

    pub fn order(&self) -> u32 {
        self.t.q
    }

    /// Coefficients of the reduction polynomial, lowest degree first.
    /// For prime fields this is the trivial `x`.
    pub fn reduction_polynomial(&self) -> &[u32] {
        &self.t.poly
    }

    pub fn element(&self, value: u32) -> Result<FieldElement, FieldError> {
        if value < self.t.q {
            Ok(FieldElement(value))
        } else {
            Err(FieldError::OutOfRange {
                value,
                order: self.t.q,
            })
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.t.q).map(FieldElement)
    }

    pub fn contains(&self, a: FieldElement) -> bool {
        a.0 < self.t.q
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        let p = self.t.p;
        if p == 2 {
            return FieldElement(a.0 ^ b.0);
        }
        if self.t.m == 1 {
            return FieldElement((a.0 + b.0) % p);
        }
        let (mut x, mut y, mut out, mut place) = (a.0, b.0, 0u32, 1u32);
        while x > 0 || y > 0 {
            out += ((x % p + y % p) % p) * place;
            x /= p;
            y /= p;
            place *= p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        let p = self.t.p;
        if p == 2 {
            return a;
        }
        if self.t.m == 1 {
            return FieldElement((p - a.0) % p);
        }
        let (mut x, mut out, mut place) = (a.0, 0u32, 1u32);
        while x > 0 {
            out += ((p - x % p) % p) * place;
            x /= p;
            place *= p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement::ZERO;
        }
        let t = &*self.t;
        let s = t.log[a.0 as usize] + t.log[b.0 as usize];
        let s = if s >= t.q - 1 { s - (t.q - 1) } else { s };
        FieldElement(t.exp[s as usize])
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement, FieldError> {
        if a.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let t = &*self.t;
        let l = t.log[a.0 as usize];
        Ok(FieldElement(t.exp[((t.q - 1 - l) % (t.q - 1)) as usize]))
    }

    pub fn div(&self, a: FieldElement, b: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(a, self.inv(b)?))
    }
}

// Polynomials below are packed as base-p integers (digit k = coefficient of x^k).

fn digits(mut v: u64, p: u32, len: usize) -> Vec<u32> {
    let mut out = vec![0u32; len];
    for d in out.iter_mut() {
        *d = (v % p as u64) as u32;
        v /= p as u64;
    }
    out
}

fn pack(d: &[u32], p: u32) -> u32 {
    d.iter().rev().fold(0u32, |acc, &c| acc * p + c)
}

fn poly_mul_mod(a: u32, b: u32, p: u32, m: u32, poly: &[u32]) -> u32 {
    if m == 1 {
        return ((a as u64 * b as u64) % p as u64) as u32;
    }
    let m = m as usize;
    let da = digits(a as u64, p, m);
    let db = digits(b as u64, p, m);
    let mut prod = vec![0u32; 2 * m - 1];
    for (i, &x) in da.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in db.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    // poly is monic of degree m: x^m = -(poly[0] + ... + poly[m-1] x^{m-1}).
    for k in (m..prod.len()).rev() {
        let c = prod[k];
        if c == 0 {
            continue;
        }
        prod[k] = 0;
        for i in 0..m {
            let sub = c * poly[i] % p;
            prod[k - m + i] = (prod[k - m + i] + p - sub) % p;
        }
    }
    pack(&prod[..m], p)
}

fn multiplicative_order(g: u32, q: u32, mul: &impl Fn(u32, u32) -> u32) -> u32 {
    let mut acc = g;
    let mut k = 1;
    while acc != 1 {
        acc = mul(acc, g);
        k += 1;
        if k > q {
            return 0;
        }
    }
    k
}

/// Remainder of `num` modulo the monic `den`, both as coefficient vectors
/// (lowest degree first, `den` with its leading 1 included).
fn poly_rem(num: &[u32], den: &[u32], p: u32) -> Vec<u32> {
    let mut r = num.to_vec();
    let dd = den.len() - 1;
    while r.len() > dd {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dd;
        if lead != 0 {
            for (i, &c) in den.iter().enumerate() {
                let sub = lead * c % p;
                r[shift + i] = (r[shift + i] + p - sub) % p;
            }
        }
        r.pop();
    }
    r
}

/// Exhaustive irreducibility test: no monic factor of degree 1..=deg/2 divides `f`.
pub fn is_irreducible(f: &[u32], p: u32) -> bool {
    let deg = f.len() - 1;
    if deg == 0 || f[deg] != 1 {
        return false;
    }
    for d in 1..=deg / 2 {
        let count = (p as u64).pow(d as u32);
        for low in 0..count {
            let mut g = digits(low, p, d);
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u32, m: u32) -> Option<Vec<u32>> {
    let count = (p as u64).pow(m);
    (0..count).find_map(|low| {
        let mut f = digits(low, p, m as usize);
        f.push(1);
        is_irreducible(&f, p).then_some(f)
    })
}

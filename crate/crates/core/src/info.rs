//! Exact information measures over finite alphabets, in bits.
//!
//! These are brute-force computations from dense joint pmfs. They serve as the
//! independent check on the closed-form finite-field rate expressions used by
//! [`crate::regions`].

use ndarray::{ArrayD, Axis, IxDyn};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::galois::{FieldElement, FieldSpec};

const PMF_TOL: f64 = 1e-12;
const JOINT_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InfoError {
    #[error("invalid pmf: {0}")]
    InvalidPmf(String),
    #[error("axis groups overlap or name a missing axis")]
    AxisOverlap,
    #[error("channel gain is zero")]
    ZeroGain,
    #[error("noise alphabet has {got} symbols, field has {expected}")]
    AlphabetMismatch { expected: usize, got: usize },
}

/// A probability mass function over `{0, .., K-1}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Pmf(Vec<f64>);

impl Pmf {
    pub fn new(probs: Vec<f64>) -> Result<Pmf, InfoError> {
        if probs.is_empty() {
            return Err(InfoError::InvalidPmf("empty".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(InfoError::InvalidPmf("negative or non-finite entry".into()));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > PMF_TOL {
            return Err(InfoError::InvalidPmf(format!("sums to {total}")));
        }
        Ok(Pmf(probs))
    }

    pub fn uniform(k: usize) -> Pmf {
        Pmf(vec![1.0 / k as f64; k])
    }

    /// All mass on symbol `at`.
    pub fn point(k: usize, at: usize) -> Pmf {
        let mut v = vec![0.0; k];
        v[at] = 1.0;
        Pmf(v)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn entropy(&self) -> f64 {
        entropy_of(self.0.iter().copied())
    }
}

impl TryFrom<Vec<f64>> for Pmf {
    type Error = InfoError;
    fn try_from(v: Vec<f64>) -> Result<Self, Self::Error> {
        Pmf::new(v)
    }
}

impl From<Pmf> for Vec<f64> {
    fn from(p: Pmf) -> Self {
        p.0
    }
}

fn entropy_of(probs: impl Iterator<Item = f64>) -> f64 {
    -probs.filter(|&p| p > 0.0).map(|p| p * p.log2()).sum::<f64>()
}

/// Shannon entropy in bits, `0 log 0 = 0`.
pub fn entropy(p: &Pmf) -> f64 {
    p.entropy()
}

/// A dense joint pmf over a tuple of finite alphabets.
#[derive(Debug, Clone)]
pub struct JointPmf {
    probs: ArrayD<f64>,
    labels: Vec<String>,
}

impl JointPmf {
    pub fn new(probs: ArrayD<f64>, labels: Vec<String>) -> Result<JointPmf, InfoError> {
        if labels.len() != probs.ndim() {
            return Err(InfoError::InvalidPmf("one label per axis required".into()));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(InfoError::InvalidPmf("negative or non-finite entry".into()));
        }
        let total = probs.sum();
        if (total - 1.0).abs() > JOINT_TOL {
            return Err(InfoError::InvalidPmf(format!("sums to {total}")));
        }
        Ok(JointPmf { probs, labels })
    }

    pub fn ndim(&self) -> usize {
        self.probs.ndim()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn axis(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn probs(&self) -> &ArrayD<f64> {
        &self.probs
    }

    /// Joint entropy of the listed axes (marginalizing the rest).
    pub fn entropy_of(&self, axes: &[usize]) -> f64 {
        let mut m = self.probs.clone();
        for ax in (0..self.ndim()).rev() {
            if !axes.contains(&ax) {
                m = m.sum_axis(Axis(ax));
            }
        }
        entropy_of(m.iter().copied())
    }

    /// I(A; B | C) in bits.
    pub fn mutual_information(&self, a: &[usize], b: &[usize], c: &[usize]) -> Result<f64, InfoError> {
        let n = self.ndim();
        let mut seen = vec![false; n];
        for &ax in a.iter().chain(b).chain(c) {
            if ax >= n || seen[ax] {
                return Err(InfoError::AxisOverlap);
            }
            seen[ax] = true;
        }
        if a.is_empty() || b.is_empty() {
            return Err(InfoError::AxisOverlap);
        }
        let join = |xs: &[&[usize]]| xs.concat();
        let h_ac = self.entropy_of(&join(&[a, c]));
        let h_bc = self.entropy_of(&join(&[b, c]));
        let h_abc = self.entropy_of(&join(&[a, b, c]));
        let h_c = self.entropy_of(c);
        // Clamp tiny negative rounding residue.
        Ok((h_ac + h_bc - h_abc - h_c).max(0.0))
    }
}

/// I(A; B | C) by axis label.
pub fn mutual_information(j: &JointPmf, a: &[&str], b: &[&str], c: &[&str]) -> Result<f64, InfoError> {
    let idx = |names: &[&str]| -> Result<Vec<usize>, InfoError> {
        names.iter().map(|s| j.axis(s).ok_or(InfoError::AxisOverlap)).collect()
    };
    j.mutual_information(&idx(a)?, &idx(b)?, &idx(c)?)
}

/// Joint law of `(X_i, X_j, Y_k)` for `Y_k = g_i X_i + g_j X_j + Z_k` with
/// independent uniform inputs. Axes are labelled `"xi"`, `"xj"`, `"y"`.
pub fn ff_mac_joint(
    field: &FieldSpec,
    gains: (FieldElement, FieldElement),
    noise: &Pmf,
) -> Result<JointPmf, InfoError> {
    let q = field.order() as usize;
    if gains.0.is_zero() || gains.1.is_zero() {
        return Err(InfoError::ZeroGain);
    }
    if noise.len() != q {
        return Err(InfoError::AlphabetMismatch {
            expected: q,
            got: noise.len(),
        });
    }
    let mut probs = ArrayD::<f64>::zeros(IxDyn(&[q, q, q]));
    let w = 1.0 / (q * q) as f64;
    for xi in field.elements() {
        let si = field.mul(gains.0, xi);
        for xj in field.elements() {
            let s = field.add(si, field.mul(gains.1, xj));
            for (z, &pz) in field.elements().zip(noise.probs()) {
                if pz == 0.0 {
                    continue;
                }
                let y = field.add(s, z);
                probs[[xi.value() as usize, xj.value() as usize, y.value() as usize]] += w * pz;
            }
        }
    }
    JointPmf::new(probs, vec!["xi".into(), "xj".into(), "y".into()])
}

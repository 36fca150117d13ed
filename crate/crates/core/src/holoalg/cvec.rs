use std::fmt;
use std::ops::Deref;

use serde::{Deserialize, Serialize};

use super::C64;
use crate::{Error, Result};

/// A finite point of `C^n`, `n >= 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<C64>", into = "Vec<C64>")]
pub struct CVec(Vec<C64>);

impl CVec {
    pub fn new(entries: Vec<C64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::domain("CVec", &entries));
        }
        Ok(CVec(entries))
    }

    /// Builds a point from real pairs; panics on non-finite input.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(re, im)| C64::new(re, im)).collect()).expect("finite point")
    }

    pub fn from_reals(xs: &[f64]) -> Self {
        Self::new(xs.iter().map(|&x| C64::new(x, 0.0)).collect()).expect("finite point")
    }

    pub fn zeros(n: usize) -> Self {
        CVec(vec![C64::new(0.0, 0.0); n.max(1)])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = C64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<C64> {
        self.0
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    /// Hermitian product `sum a_i conj(b_i)`.
    pub fn hdot(&self, other: &CVec) -> C64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b.conj()).sum()
    }

    pub fn scale(&self, s: C64) -> CVec {
        CVec(self.0.iter().map(|z| z * s).collect())
    }

    pub fn add(&self, other: &CVec) -> CVec {
        CVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &CVec) -> CVec {
        CVec(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    /// `self + s * dir`.
    pub fn axpy(&self, s: C64, dir: &CVec) -> CVec {
        CVec(self.0.iter().zip(&dir.0).map(|(a, d)| a + s * d).collect())
    }

    /// Appends a coordinate.
    pub fn push(&self, z: C64) -> CVec {
        let mut v = self.0.clone();
        v.push(z);
        CVec(v)
    }

    /// Coordinates `range` as a new vector.
    pub fn slice(&self, range: std::ops::Range<usize>) -> CVec {
        CVec(self.0[range].to_vec())
    }

    pub fn dist(&self, other: &CVec) -> f64 {
        self.sub(other).norm()
    }
}

impl Deref for CVec {
    type Target = [C64];
    fn deref(&self) -> &[C64] {
        &self.0
    }
}

impl TryFrom<Vec<C64>> for CVec {
    type Error = Error;
    fn try_from(v: Vec<C64>) -> Result<Self> {
        CVec::new(v)
    }
}

impl From<CVec> for Vec<C64> {
    fn from(v: CVec) -> Self {
        v.0
    }
}

impl fmt::Display for CVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_point(&self.0))
    }
}

pub fn format_point(p: &[C64]) -> String {
    let parts: Vec<String> = p.iter().map(|z| format!("{}{:+}i", z.re, z.im)).collect();
    format!("({})", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(CVec::new(vec![]).is_err());
        assert!(CVec::new(vec![C64::new(f64::NAN, 0.0)]).is_err());
        assert!(CVec::new(vec![C64::new(0.0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn hermitian_product() {
        let a = CVec::from_pairs(&[(0.0, 1.0), (2.0, 0.0)]);
        let b = CVec::from_pairs(&[(0.0, 1.0), (1.0, 0.0)]);
        assert_eq!(a.hdot(&b), C64::new(3.0, 0.0));
        assert_eq!(a.norm_sqr(), 5.0);
    }
}

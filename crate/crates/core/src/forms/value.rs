use std::collections::BTreeMap;

use crate::holoalg::C64;
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Sorts `idx` in place and returns the permutation sign, or `None` when an
/// index repeats (the wedge monomial vanishes).
pub(crate) fn sort_with_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Alternating `k`-tensor on `C^n`, stored on strictly increasing index
/// tuples. Degree 0 values use the empty tuple.
#[derive(Clone, Debug, PartialEq)]
pub struct FormValue {
    n: usize,
    k: usize,
    coeffs: BTreeMap<Vec<usize>, C64>,
}

impl FormValue {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(k <= n, "degree exceeds dimension");
        FormValue {
            n,
            k,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn scalar(n: usize, c: C64) -> Self {
        let mut f = Self::zero(n, 0);
        f.insert(&[], c);
        f
    }

    /// The 1-form `dz_i`.
    pub fn basis(n: usize, i: usize) -> Self {
        let mut f = Self::zero(n, 1);
        f.insert(&[i], C64::new(1.0, 0.0));
        f
    }

    /// Builds a value from arbitrary (possibly unsorted) index tuples.
    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Vec<usize>, C64)>) -> Result<Self> {
        let mut f = Self::zero(n, k);
        for (idx, c) in terms {
            if idx.len() != k || idx.iter().any(|&i| i >= n) {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: idx.len(),
                });
            }
            f.insert(&idx, c);
        }
        Ok(f)
    }

    fn insert(&mut self, idx: &[usize], c: C64) {
        let mut idx = idx.to_vec();
        if let Some(sign) = sort_with_sign(&mut idx) {
            let e = self.coeffs.entry(idx).or_insert(C64::new(0.0, 0.0));
            *e += c * sign;
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn get(&self, idx: &[usize]) -> C64 {
        let mut idx = idx.to_vec();
        match sort_with_sign(&mut idx) {
            Some(sign) => self.coeffs.get(&idx).map_or(C64::new(0.0, 0.0), |c| c * sign),
            None => C64::new(0.0, 0.0),
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], C64)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), *v))
    }

    /// Coefficient of `dz_0 ^ ... ^ dz_{n-1}` (requires `k == n`).
    pub fn top_coefficient(&self) -> C64 {
        assert_eq!(self.k, self.n, "not a top-degree form");
        self.get(&(0..self.n).collect::<Vec<_>>())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    fn check_same(&self, other: &FormValue) -> Result<()> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.k != other.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: other.k,
            });
        }
        Ok(())
    }

    pub fn add(&self, other: &FormValue) -> Result<FormValue> {
        self.check_same(other)?;
        let mut out = self.clone();
        for (idx, c) in &other.coeffs {
            *out.coeffs.entry(idx.clone()).or_insert(C64::new(0.0, 0.0)) += c;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &FormValue) -> Result<FormValue> {
        self.add(&other.scale(C64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, s: C64) -> FormValue {
        FormValue {
            n: self.n,
            k: self.k,
            coeffs: self.coeffs.iter().map(|(k, v)| (k.clone(), v * s)).collect(),
        }
    }

    /// Largest coefficient of `self - other`.
    pub fn max_abs_diff(&self, other: &FormValue) -> Result<f64> {
        Ok(self.sub(other)?.max_abs())
    }

    /// Exterior product with shuffle signs.
    pub fn wedge(&self, other: &FormValue) -> Result<FormValue> {
        if self.n != other.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        if self.k + other.k > self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: self.k + other.k,
            });
        }
        let mut out = FormValue::zero(self.n, self.k + other.k);
        for (a, ca) in &self.coeffs {
            for (b, cb) in &other.coeffs {
                let idx: Vec<usize> = a.iter().chain(b).copied().collect();
                out.insert(&idx, ca * cb);
            }
        }
        Ok(out)
    }

    /// `k`-fold wedge power; `power(0)` is the scalar 1.
    pub fn power(&self, k: usize) -> Result<FormValue> {
        let mut acc = FormValue::scalar(self.n, C64::new(1.0, 0.0));
        for _ in 0..k {
            acc = acc.wedge(self)?;
        }
        Ok(acc)
    }

    /// Contraction with `v` in the first slot.
    pub fn interior(&self, v: &[C64]) -> Result<FormValue> {
        if v.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: v.len(),
            });
        }
        if self.k == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let mut out = FormValue::zero(self.n, self.k - 1);
        for (idx, c) in &self.coeffs {
            for m in 0..idx.len() {
                let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
                let rest: Vec<usize> = idx.iter().enumerate().filter(|(j, _)| *j != m).map(|(_, &i)| i).collect();
                out.insert(&rest, c * v[idx[m]] * sign);
            }
        }
        Ok(out)
    }

    /// Evaluates the tensor on `k` vectors.
    pub fn apply(&self, vectors: &[&[C64]]) -> Result<C64> {
        if vectors.len() != self.k {
            return Err(Error::DimensionMismatch {
                expected: self.k,
                found: vectors.len(),
            });
        }
        let mut total = C64::new(0.0, 0.0);
        for (idx, c) in &self.coeffs {
            let rows: Vec<Vec<C64>> = idx.iter().map(|&i| vectors.iter().map(|v| v[i]).collect()).collect();
            let det = if rows.is_empty() {
                C64::new(1.0, 0.0)
            } else {
                CMatrix::from_rows(&rows).det()
            };
            total += c * det;
        }
        Ok(total)
    }

    /// Pointwise pullback through a linear map `jac: C^m -> C^n`:
    /// `(J^* a)(v_1, ..., v_k) = a(J v_1, ..., J v_k)`.
    pub fn pullback(&self, jac: &CMatrix) -> Result<FormValue> {
        if jac.rows() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: jac.rows(),
            });
        }
        let m = jac.cols();
        if self.k > m {
            return Ok(FormValue::zero(m.max(self.k), self.k));
        }
        let mut out = FormValue::zero(m, self.k);
        for target in k_subsets(m, self.k) {
            let mut acc = C64::new(0.0, 0.0);
            for (idx, c) in &self.coeffs {
                let rows: Vec<Vec<C64>> =
                    idx.iter().map(|&r| target.iter().map(|&col| jac[(r, col)]).collect()).collect();
                let det = if rows.is_empty() {
                    C64::new(1.0, 0.0)
                } else {
                    CMatrix::from_rows(&rows).det()
                };
                acc += c * det;
            }
            if acc.norm_sqr() != 0.0 {
                out.coeffs.insert(target, acc);
            }
        }
        Ok(out)
    }

    /// Extends to `C^{n'}` (`n' >= n`) by pulling back along the projection
    /// onto the first `n` coordinates.
    pub fn embed(&self, n_new: usize) -> FormValue {
        assert!(n_new >= self.n);
        FormValue {
            n: n_new,
            k: self.k,
            coeffs: self.coeffs.clone(),
        }
    }
}

/// All strictly increasing `k`-tuples from `0..n`.
pub(crate) fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

use std::sync::{Arc, OnceLock};

use super::{CVec, HoloExpr, C64};
use crate::linalg::CMatrix;
use crate::{Error, Result};

/// Holomorphic map `C^m -> C^n` given by component expressions.
#[derive(Clone, Debug)]
pub struct HoloMap {
    arity: usize,
    components: Vec<HoloExpr>,
    jacobian: OnceLock<Arc<Vec<Vec<HoloExpr>>>>,
}

impl PartialEq for HoloMap {
    fn eq(&self, other: &Self) -> bool {
        self.arity == other.arity && self.components == other.components
    }
}

impl HoloMap {
    pub fn new(arity: usize, components: Vec<HoloExpr>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::DimensionMismatch {
                expected: 1,
                found: 0,
            });
        }
        for c in &components {
            if c.min_arity() > arity {
                return Err(Error::ArityMismatch {
                    name: "map component".into(),
                    expected: arity,
                    found: c.min_arity(),
                });
            }
        }
        Ok(HoloMap {
            arity,
            components,
            jacobian: OnceLock::new(),
        })
    }

    pub fn identity(n: usize) -> Self {
        HoloMap {
            arity: n,
            components: (0..n).map(HoloExpr::var).collect(),
            jacobian: OnceLock::new(),
        }
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn target_dim(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[HoloExpr] {
        &self.components
    }

    fn check_arity(&self, p: &[C64]) -> Result<()> {
        if p.len() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: p.len(),
            });
        }
        Ok(())
    }

    pub fn eval(&self, p: &[C64]) -> Result<CVec> {
        self.check_arity(p)?;
        let v = self.components.iter().map(|c| c.eval(p)).collect::<Result<Vec<_>>>()?;
        CVec::new(v)
    }

    /// Symbolic Jacobian entries `d F_r / d z_c`, derived once per map.
    pub fn jacobian_exprs(&self) -> &[Vec<HoloExpr>] {
        self.jacobian.get_or_init(|| {
            Arc::new(
                self.components
                    .iter()
                    .map(|f| (0..self.arity).map(|c| f.derive(c)).collect())
                    .collect(),
            )
        })
    }

    /// Jacobian matrix at `p` (rows: components, columns: variables).
    pub fn jacobian(&self, p: &[C64]) -> Result<CMatrix> {
        self.check_arity(p)?;
        let rows = self
            .jacobian_exprs()
            .iter()
            .map(|row| row.iter().map(|e| e.eval(p)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(CMatrix::from_rows(&rows))
    }

    /// `self o inner`.
    pub fn compose(&self, inner: &HoloMap) -> Result<HoloMap> {
        if inner.target_dim() != self.arity {
            return Err(Error::DimensionMismatch {
                expected: self.arity,
                found: inner.target_dim(),
            });
        }
        HoloMap::new(
            inner.arity,
            self.components.iter().map(|c| c.substitute(&inner.components)).collect(),
        )
    }
}

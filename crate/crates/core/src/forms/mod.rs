//! Exterior algebra at a point, holomorphic differential forms, paths and
//! path integrals.

mod diff;
mod path;
mod quad;
mod value;

pub use diff::{parse_form, DiffForm};
pub use path::{Path, PathSegment};
pub use quad::{gauss_legendre, integrate, Quadrature, DEFAULT_QUAD_TOL, MAX_PANELS};
pub use value::FormValue;

use crate::holoalg::{CVec, C64};
use crate::{Error, Result};

/// Integral of a 1-form along a path; `tol` is an absolute error budget.
pub fn path_integral(form: &DiffForm, path: &Path, tol: f64) -> Result<C64> {
    if form.degree() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            found: form.degree(),
        });
    }
    if path.dim() != form.dim() {
        return Err(Error::DimensionMismatch {
            expected: form.dim(),
            found: path.dim(),
        });
    }
    let segs = path.segments();
    let budget = tol / segs.len().max(1) as f64;
    let mut total = C64::new(0.0, 0.0);
    for seg in segs {
        let v = integrate(
            |t| {
                let (x, dx) = seg.point_and_velocity(t)?;
                form.pair_at(&x, &dx)
            },
            0.0,
            1.0,
            budget,
        )?;
        total += v.value;
    }
    Ok(total)
}

/// Primitive of a closed 1-form on a domain star-shaped about `center`:
/// the integral of `form` along the segment `center -> p`.
///
/// Closedness is checked at eight points of the segment; `tol` bounds both
/// the closedness residual and the quadrature error.
pub fn primitive(form: &DiffForm, center: &CVec, p: &CVec, tol: f64) -> Result<C64> {
    let seg = Path::line(center, p)?;
    let checks: Vec<CVec> = (0..8)
        .map(|i| seg.eval(i as f64 / 7.0))
        .collect::<Result<_>>()?;
    let residual = form.closedness_residual(&checks)?;
    if residual > tol.max(1e-12) {
        return Err(Error::NotClosed { residual });
    }
    path_integral(form, &seg, tol)
}

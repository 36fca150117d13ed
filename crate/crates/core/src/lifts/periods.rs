use serde::Serialize;

use super::disc::cauchy_derivative;
use super::{max_residual_at, scale_factor, Lift, ScaleFit};
use crate::domains::Domain;
use crate::forms::{path_integral, DiffForm, FormValue, Path};
use crate::holoalg::{CVec, HoloMap, C64};
use crate::linalg::CMatrix;
use crate::{par, Error, Result};

/// Quadrature budget for primitives and periods.
const PERIOD_TOL: f64 = 1e-12;
/// Number of samples at which constructed maps are verified.
const VERIFY_SAMPLES: usize = 24;

/// Periods of a closed 1-form over a list of loops.
#[derive(Clone, Debug, Serialize)]
pub struct PeriodVector {
    #[serde(skip)]
    pub loops: Vec<Path>,
    pub values: Vec<C64>,
}

impl PeriodVector {
    pub fn max_abs(&self) -> f64 {
        par::max_in_order(self.values.iter().map(|v| v.norm()))
    }

    fn of(form: &DiffForm, loops: &[Path]) -> Result<Self> {
        let values = par::try_map(loops, |l| path_integral(form, l, PERIOD_TOL))?;
        Ok(PeriodVector {
            loops: loops.to_vec(),
            values,
        })
    }
}

/// Primitive of a closed 1-form, integrated along the domain's canonical
/// path from its basepoint. Single valued when all periods vanish.
#[derive(Clone, Debug)]
pub struct Primitive {
    pub form: DiffForm,
    pub domain: Domain,
}

impl Primitive {
    pub fn eval(&self, p: &CVec) -> Result<C64> {
        if self.form.is_zero() {
            return Ok(C64::new(0.0, 0.0));
        }
        path_integral(&self.form, &self.domain.canonical_path(p)?, PERIOD_TOL)
    }

    /// Gradient from Cauchy integrals of the computed values in each
    /// coordinate; independent of the form itself.
    pub fn gradient(&self, p: &CVec) -> Result<Vec<C64>> {
        let n = p.dim();
        if self.form.is_zero() {
            return Ok(vec![C64::new(0.0, 0.0); n]);
        }
        (0..n)
            .map(|j| {
                let rho = self.cauchy_radius(p, j);
                cauchy_derivative(
                    |w| {
                        let mut q = p.clone().into_vec();
                        q[j] = w;
                        self.eval(&CVec::new(q)?)
                    },
                    p[j],
                    rho,
                )
            })
            .collect()
    }

    fn cauchy_radius(&self, p: &CVec, j: usize) -> f64 {
        let mut rho: f64 = 0.05;
        for _ in 0..30 {
            let inside = (0..16).all(|k| {
                let mut q = p.clone().into_vec();
                q[j] += C64::from_polar(2.0 * rho, std::f64::consts::TAU * k as f64 / 16.0);
                self.domain.contains_with_margin(&q, 0.0)
            });
            if inside {
                break;
            }
            rho /= 2.0;
        }
        rho
    }
}

fn check_same_base(l1: &Lift, l2: &Lift, samples: &[CVec], tol: f64) -> Result<()> {
    if l1.base_dim() != l2.base_dim() {
        return Err(Error::BaseMismatch(format!("dimensions {} and {}", l1.base_dim(), l2.base_dim())));
    }
    if l1.base().domain != l2.base().domain {
        return Err(Error::BaseMismatch("different base domains".into()));
    }
    let diff = l1.base().omega.sub(&l2.base().omega)?;
    let r = max_residual_at(samples, |p| Ok(diff.eval(p)?.max_abs()))?;
    if !(r <= tol) {
        return Err(Error::BaseMismatch(format!("symplectic forms differ by {r:e}")));
    }
    Ok(())
}

/// Periods of `(ν₁ + θ₁) − (ν₂ + θ₂)` over `loops`.
pub fn theta_class(l1: &Lift, l2: &Lift, loops: &[Path], samples: &[CVec], tol: f64) -> Result<PeriodVector> {
    check_same_base(l1, l2, samples, tol)?;
    let delta = l1.connection().sub(&l2.connection())?;
    let residual = delta.closedness_residual(samples)?;
    if !(residual <= tol) {
        return Err(Error::NotClosed { residual });
    }
    PeriodVector::of(&delta, loops)
}

/// `Φ(p, y) = (p, y + h(p))` with `Φ^*ξ₂ = ξ₁`.
#[derive(Clone, Debug)]
pub struct EquivalenceMap {
    pub h: Primitive,
    /// `max |Φ^*ξ₂ − ξ₁|` at the verification samples.
    pub residual: f64,
}

impl EquivalenceMap {
    pub fn apply(&self, x: &CVec) -> Result<CVec> {
        let n = x.dim() - 1;
        let p = x.slice(0..n);
        let mut out = x.clone().into_vec();
        out[n] += self.h.eval(&p)?;
        CVec::new(out)
    }
}

#[derive(Clone, Debug)]
pub enum Equivalence {
    Map(EquivalenceMap),
    Obstruction(PeriodVector),
}

/// Jacobian of `(p, y) -> (F(p), λ y + h(p))` given `J_F` and `∇h`.
fn bundle_jacobian(jf: &CMatrix, grad: &[C64], lambda: C64) -> CMatrix {
    let n = grad.len();
    let mut rows: Vec<Vec<C64>> = (0..jf.rows())
        .map(|r| {
            let mut row = jf.row(r).to_vec();
            row.push(C64::new(0.0, 0.0));
            row
        })
        .collect();
    let mut last = grad.to_vec();
    last.push(lambda);
    rows.push(last);
    debug_assert_eq!(rows[0].len(), n + 1);
    CMatrix::from_rows(&rows)
}

fn verify_points(samples: &[CVec]) -> &[CVec] {
    &samples[..samples.len().min(VERIFY_SAMPLES)]
}

/// Equivalence of two lifts over the same base: a fiber translation when
/// every Θ-period is below `tol`, the periods otherwise.
pub fn are_equivalent(l1: &Lift, l2: &Lift, loops: &[Path], samples: &[CVec], tol: f64) -> Result<Equivalence> {
    let periods = theta_class(l1, l2, loops, samples, tol)?;
    if periods.max_abs() >= tol {
        return Ok(Equivalence::Obstruction(periods));
    }
    let h = Primitive {
        form: l2.connection().sub(&l1.connection())?,
        domain: l1.base().domain.clone(),
    };
    let n = l1.base_dim();
    let id = CMatrix::identity(n);
    let residual = max_residual_at(verify_points(samples), |p| {
        let x = p.push(C64::new(0.0, 0.0));
        let jac = bundle_jacobian(&id, &h.gradient(p)?, C64::new(1.0, 0.0));
        let y = x.push(C64::new(0.0, 0.0)).slice(0..n + 1);
        let pulled = l2.xi().eval(&y)?.pullback(&jac)?;
        pulled.max_abs_diff(&l1.xi().eval(&x)?)
    })?;
    Ok(Equivalence::Map(EquivalenceMap { h, residual }))
}

fn check_potential(l: &Lift, nu_ref: &DiffForm, samples: &[CVec], tol: f64) -> Result<()> {
    let defect = nu_ref.exterior_derivative().sub(&l.base().omega)?;
    let residual = max_residual_at(samples, |p| Ok(defect.eval(p)?.max_abs()))?;
    if !(residual <= tol) {
        return Err(Error::NotAPotential { residual });
    }
    Ok(())
}

/// `∮_loop ((ν + θ) − ν_ref)`: the fiber displacement `y(end) − y(start)`
/// of the parallel lift for the flat connection `ξ + π^*ν_ref`.
pub fn monodromy(l: &Lift, nu_ref: &DiffForm, loop_: &Path, samples: &[CVec], tol: f64) -> Result<C64> {
    check_potential(l, nu_ref, samples, tol)?;
    path_integral(&l.connection().sub(nu_ref)?, loop_, PERIOD_TOL)
}

#[derive(Clone, Debug)]
pub struct FitResult {
    pub fit: bool,
    pub periods: PeriodVector,
    /// `h` with `ξ = d(y + h) − π^*ν_ref`, when fit.
    pub section: Option<Primitive>,
    /// `max |dh − (ν_ref − ν − θ)|` at the verification samples.
    pub section_residual: Option<f64>,
}

pub fn is_fit(l: &Lift, nu_ref: &DiffForm, loops: &[Path], samples: &[CVec], tol: f64) -> Result<FitResult> {
    check_potential(l, nu_ref, samples, tol)?;
    let form = nu_ref.sub(&l.connection())?;
    let periods = PeriodVector::of(&l.connection().sub(nu_ref)?, loops)?;
    if periods.max_abs() >= tol {
        return Ok(FitResult {
            fit: false,
            periods,
            section: None,
            section_residual: None,
        });
    }
    let h = Primitive {
        form: form.clone(),
        domain: l.base().domain.clone(),
    };
    let residual = max_residual_at(verify_points(samples), |p| {
        let g = FormValue::from_terms(p.dim(), 1, h.gradient(p)?.into_iter().enumerate().map(|(i, c)| (vec![i], c)))?;
        g.max_abs_diff(&form.eval(p)?)
    })?;
    Ok(FitResult {
        fit: true,
        periods,
        section: Some(h),
        section_residual: Some(residual),
    })
}

/// `F̃(p, y) = (F(p), λ y + h(p))` with `F̃^*ξ = λ ξ`.
#[derive(Clone, Debug)]
pub struct BundleMap {
    pub base_map: HoloMap,
    pub lambda: C64,
    pub h: Primitive,
    /// `max |F̃^*ξ − λ ξ|` at the verification samples.
    pub residual: f64,
}

impl BundleMap {
    pub fn eval(&self, x: &CVec) -> Result<CVec> {
        let n = x.dim() - 1;
        let p = x.slice(0..n);
        let q = self.base_map.eval(&p)?;
        Ok(q.push(self.lambda * x[n] + self.h.eval(&p)?))
    }

    pub fn jacobian(&self, x: &CVec) -> Result<CMatrix> {
        let n = x.dim() - 1;
        let p = x.slice(0..n);
        Ok(bundle_jacobian(&self.base_map.jacobian(&p)?, &self.h.gradient(&p)?, self.lambda))
    }

    /// `max |F̃^*ξ − λ ξ|` over total-space points.
    pub fn residual_at(&self, lift: &Lift, points: &[CVec]) -> Result<f64> {
        max_residual_at(points, |x| {
            let pulled = lift.xi().eval(&self.eval(x)?)?.pullback(&self.jacobian(x)?)?;
            pulled.max_abs_diff(&lift.xi().eval(x)?.scale(self.lambda))
        })
    }
}

#[derive(Clone, Debug)]
pub enum AutomorphismLift {
    Lifted(BundleMap),
    Obstruction { fit: ScaleFit, periods: PeriodVector },
}

/// Lifts a scale-symplectic `F` to the bundle when the periods of
/// `ρ = F^*(ν + θ) − λ(ν + θ)` vanish.
pub fn lift_automorphism(l: &Lift, f: &HoloMap, loops: &[Path], samples: &[CVec], tol: f64) -> Result<AutomorphismLift> {
    let fit = scale_factor(f, l.base(), samples, tol)?;
    let conn = l.connection();
    let rho = conn.pullback(f)?.sub(&conn.scale(&crate::holoalg::HoloExpr::constant(fit.lambda)))?;
    let periods = PeriodVector::of(&rho, loops)?;
    if periods.max_abs() >= tol {
        return Ok(AutomorphismLift::Obstruction { fit, periods });
    }
    let mut map = BundleMap {
        base_map: f.clone(),
        lambda: fit.lambda,
        h: Primitive {
            form: rho,
            domain: l.base().domain.clone(),
        },
        residual: 0.0,
    };
    let pts: Vec<CVec> = verify_points(samples).iter().map(|p| p.push(C64::new(0.0, 0.0))).collect();
    map.residual = map.residual_at(l, &pts)?;
    Ok(AutomorphismLift::Lifted(map))
}

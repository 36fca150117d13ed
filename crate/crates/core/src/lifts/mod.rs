//! Contact symplectic lifts `S × C -> S` with contact form
//! `ξ = dy − π^*(ν + θ)`, their discs and chains, period invariants,
//! automorphism lifts, pullbacks and Čech atlases.

mod atlas;
mod disc;
mod periods;

pub use atlas::{sector_atlas, validate_atlas, AtlasReport, CechAtlas, Chart, Sector};
pub use disc::{disc_params, lift_chain, lift_disc, LiftedDisc, LiftedLink, VChain};
pub use periods::{
    are_equivalent, is_fit, lift_automorphism, monodromy, theta_class, AutomorphismLift, BundleMap, Equivalence, EquivalenceMap,
    FitResult, PeriodVector, Primitive,
};

use serde::Serialize;

use crate::contact::{contact_check, ContactData, ContactReport, SampleFailure, SymplecticData};
use crate::domains::Domain;
use crate::forms::{DiffForm, FormValue};
use crate::holoalg::{CVec, HoloExpr, HoloMap, C64};
use crate::{par, Error, Result};

/// A contact symplectic lift over `(S, ω)` on the trivial bundle `S × C`,
/// fiber coordinate `y` last.
#[derive(Clone, Debug)]
pub struct Lift {
    base: SymplecticData,
    nu: DiffForm,
    twist: DiffForm,
    contact: ContactData,
}

impl Lift {
    pub fn base(&self) -> &SymplecticData {
        &self.base
    }

    pub fn nu(&self) -> &DiffForm {
        &self.nu
    }

    pub fn twist(&self) -> &DiffForm {
        &self.twist
    }

    /// `ν + θ` on `S`.
    pub fn connection(&self) -> DiffForm {
        self.nu.add(&self.twist).expect("matching dimensions")
    }

    pub fn contact(&self) -> &ContactData {
        &self.contact
    }

    pub fn xi(&self) -> &DiffForm {
        &self.contact.xi
    }

    pub fn base_dim(&self) -> usize {
        self.base.dim()
    }

    pub fn total_dim(&self) -> usize {
        self.base.dim() + 1
    }

    /// `S × C`.
    pub fn total_domain(&self) -> Domain {
        self.contact.domain.clone()
    }

    /// Reeb field `∂_y`.
    pub fn reeb(&self) -> CVec {
        CVec::basis(self.total_dim(), self.base_dim())
    }

    /// `u = (v, (ν + θ)_p(v))`, the horizontal lift of `v ∈ T_pS`.
    pub fn horizontal_lift(&self, p: &[C64], v: &CVec) -> Result<CVec> {
        let a = self.connection().pair_at(&p[..self.base_dim()], v)?;
        Ok(v.push(a))
    }
}

pub(crate) fn max_residual_at(points: &[CVec], f: impl Fn(&CVec) -> Result<f64> + Sync + Send) -> Result<f64> {
    Ok(par::max_in_order(par::try_map(points, f)?))
}

/// `dν − ω` and `dθ` are checked at `samples` against `tol`.
pub fn make_lift(base: SymplecticData, nu: DiffForm, twist: DiffForm, samples: &[CVec], tol: f64) -> Result<Lift> {
    let n = base.dim();
    for f in [&nu, &twist] {
        if f.dim() != n || f.degree() != 1 {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: f.dim(),
            });
        }
    }
    let defect = nu.exterior_derivative().sub(&base.omega)?;
    let residual = max_residual_at(samples, |p| Ok(defect.eval(p)?.max_abs()))?;
    if !(residual <= tol) {
        return Err(Error::PotentialMismatch { residual });
    }
    let residual = twist.closedness_residual(samples)?;
    if !(residual <= tol) {
        return Err(Error::TwistNotClosed { residual });
    }
    let conn = nu.add(&twist)?.embed(n + 1);
    let dy = DiffForm::from_terms(n + 1, 1, [(vec![n], HoloExpr::one())])?;
    let xi = dy.sub(&conn)?;
    let domain = Domain::product(vec![base.domain.clone(), Domain::Plane]);
    let contact = ContactData {
        xi,
        n: n / 2,
        domain,
    };
    Ok(Lift { base, nu, twist, contact })
}

/// Total-space samples: base samples with seeded fiber values in the unit
/// disc.
pub fn total_samples(lift: &Lift, seed: u64, count: usize) -> Vec<CVec> {
    lift.total_domain().sample(seed, count)
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftReport {
    pub pass: bool,
    /// `max |dξ + π^*ω|`.
    pub curvature: f64,
    /// `max |ξ(∂_y) − 1|`.
    pub reeb_normalization: f64,
    /// `max |ι_{∂_y} dξ|`.
    pub reeb_invariance: f64,
    pub contact: ContactReport,
    pub failures: Vec<SampleFailure>,
}

impl LiftReport {
    pub fn max_residual(&self) -> f64 {
        par::max_in_order([self.curvature, self.reeb_normalization, self.reeb_invariance])
    }
}

pub fn validate_lift(lift: &Lift, samples: &[CVec], tol: f64) -> LiftReport {
    let n = lift.base_dim();
    let dxi = lift.xi().exterior_derivative();
    let omega = lift.base.omega.embed(n + 1);
    let reeb = lift.reeb();
    let rows = par::map(samples, |p| -> Result<[f64; 3]> {
        let d = dxi.eval(p)?;
        let curvature = d.add(&omega.eval(p)?)?.max_abs();
        let norm = (lift.xi().pair_at(p, &reeb)? - 1.0).norm();
        let inv = d.interior(&reeb)?.max_abs();
        Ok([curvature, norm, inv])
    });
    let mut acc = [0.0f64; 3];
    let mut failures = Vec::new();
    for (p, r) in samples.iter().zip(rows) {
        match r {
            Ok(r) => {
                for i in 0..3 {
                    acc[i] = par::max_in_order([acc[i], r[i]]);
                }
            }
            Err(e) => failures.push(SampleFailure::new(p, &e)),
        }
    }
    let contact = contact_check(lift.contact(), samples, tol);
    LiftReport {
        pass: failures.is_empty() && contact.pass && acc.iter().all(|r| *r < tol),
        curvature: acc[0],
        reeb_normalization: acc[1],
        reeb_invariance: acc[2],
        contact,
        failures,
    }
}

/// Result of fitting `F^*ω' = λ ω`.
#[derive(Clone, Debug, Serialize)]
pub struct ScaleFit {
    pub lambda: C64,
    pub residual: f64,
}

/// Least-squares `λ` with `a ≈ λ b`.
fn fit_ratio(a: &FormValue, b: &FormValue) -> C64 {
    let mut num = C64::new(0.0, 0.0);
    let mut den = 0.0;
    for (idx, bc) in b.terms() {
        num += a.get(idx) * bc.conj();
        den += bc.norm_sqr();
    }
    num / den
}

/// Scale factor of `F` against `source.omega` with the target form
/// `target`: `F^* target = λ source.omega`.
///
/// `λ` is fitted at the sample with the largest `|ω|`; the residual at each
/// sample is `|F^* target − λ ω| / (1 + |λ| |ω|)`, which reduces to the
/// absolute defect over `1 + |λ|` for constant-coefficient `ω`.
pub fn scale_factor_between(f: &HoloMap, target: &DiffForm, source: &SymplecticData, samples: &[CVec], tol: f64) -> Result<ScaleFit> {
    if samples.is_empty() {
        return Err(Error::DegenerateInput("scale factor needs samples".into()));
    }
    let pulled = target.pullback(f)?;
    let values = par::try_map(samples, |p| -> Result<(FormValue, FormValue)> { Ok((pulled.eval(p)?, source.omega.eval(p)?)) })?;
    let (best, _) = values
        .iter()
        .enumerate()
        .fold((0, -1.0), |(bi, bm), (i, (_, w))| if w.max_abs() > bm { (i, w.max_abs()) } else { (bi, bm) });
    let (a, b) = &values[best];
    if b.max_abs() == 0.0 {
        return Err(Error::NotScaleSymplectic { residual: f64::INFINITY });
    }
    let lambda = fit_ratio(a, b);
    let residual = par::max_in_order(
        values
            .iter()
            .map(|(a, b)| a.sub(&b.scale(lambda)).map_or(f64::NAN, |d| d.max_abs() / (1.0 + lambda.norm() * b.max_abs()))),
    );
    if !(residual < tol) {
        return Err(Error::NotScaleSymplectic { residual });
    }
    Ok(ScaleFit { lambda, residual })
}

/// `F^*ω = λω` for a self-map of `S`.
pub fn scale_factor(f: &HoloMap, s: &SymplecticData, samples: &[CVec], tol: f64) -> Result<ScaleFit> {
    scale_factor_between(f, &s.omega, s, samples, tol)
}

/// Pulls `target` back along `φ: S -> S'`: `ω = φ^*ω'`, `ν = φ^*ν'`,
/// `θ = φ^*θ'`, over the domain `domain` of `S`.
pub fn pullback_lift(phi: &HoloMap, target: &Lift, domain: Domain, samples: &[CVec], tol: f64) -> Result<Lift> {
    let image_domain = &target.base.domain;
    for p in samples {
        let q = phi.eval(p)?;
        if !image_domain.contains_with_margin(&q, 0.0) {
            return Err(Error::ImageEscapesDomain {
                point: crate::holoalg::format_point(&q),
            });
        }
    }
    let omega = target.base.omega.pullback(phi)?;
    let base = SymplecticData::new(omega, domain)?;
    let tops = par::try_map(samples, |p| base.volume_at(p).map(|v| v.norm()))?;
    let min_top = tops.iter().copied().fold(f64::INFINITY, f64::min);
    if !(min_top > tol) {
        return Err(Error::DegeneratePullback { min_top });
    }
    let nu = target.nu.pullback(phi)?;
    let twist = target.twist.pullback(phi)?;
    make_lift(base, nu, twist, samples, tol)
}

/// `max |Φ^*ξ' − ξ|` for the bundle map `Φ(p, y) = (φ(p), y)`.
pub fn bundle_morphism_residual(phi: &HoloMap, target: &Lift, source: &Lift, samples: &[CVec]) -> Result<f64> {
    let n = source.base_dim();
    let mut comps: Vec<HoloExpr> = phi.components().to_vec();
    comps.push(HoloExpr::var(n));
    let total = HoloMap::new(n + 1, comps)?;
    let pulled = target.xi().pullback(&total)?;
    let defect = pulled.sub(source.xi())?;
    max_residual_at(samples, |p| Ok(defect.eval(p)?.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::standard_symplectic;
    use crate::forms::parse_form;

    pub(crate) fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    pub(crate) fn ball_lift() -> Lift {
        let v = vars(&["z", "w"]);
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), Domain::ball(2)).unwrap();
        let pts = s.domain.sample(1, 50);
        make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), DiffForm::zero(2, 1), &pts, 1e-10).unwrap()
    }

    pub(crate) fn alpha_lift(c: C64) -> Lift {
        let v = vars(&["z", "w"]);
        let d = Domain::product(vec![Domain::disc(), Domain::punctured_disc()]);
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), d).unwrap();
        let pts = s.domain.sample(1, 50);
        let twist = DiffForm::from_terms(2, 1, [(vec![1], -HoloExpr::constant(c) / HoloExpr::var(1))]).unwrap();
        make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), twist, &pts, 1e-10).unwrap()
    }

    #[test]
    fn standard_lift_form() {
        let l = ball_lift();
        let v = vars(&["z", "w", "y"]);
        let expect = parse_form("d[y] : 1, d[w] : -z", &v, 1).unwrap();
        let pts = total_samples(&l, 2, 100);
        for p in &pts {
            assert_eq!(l.xi().eval(p).unwrap(), expect.eval(p).unwrap());
        }
        let r = validate_lift(&l, &pts, 1e-10);
        assert!(r.pass && r.max_residual() == 0.0);
    }

    #[test]
    fn alpha_family_validates() {
        for c in [C64::new(0.0, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let l = alpha_lift(c);
            let r = validate_lift(&l, &total_samples(&l, 5, 200), 1e-10);
            assert!(r.pass, "{r:?}");
            assert!((r.contact.min_volume - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn make_lift_rejections() {
        let v = vars(&["z", "w"]);
        let s = standard_symplectic(1);
        let pts = s.domain.sample(3, 20);
        let e = make_lift(s.clone(), parse_form("d[z] : w", &v, 1).unwrap(), DiffForm::zero(2, 1), &pts, 1e-10);
        assert!(matches!(e, Err(Error::PotentialMismatch { .. })));
        let e = make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), parse_form("d[w] : z", &v, 1).unwrap(), &pts, 1e-10);
        assert!(matches!(e, Err(Error::TwistNotClosed { .. })));
    }

    #[test]
    fn scale_factor_examples() {
        let v = vars(&["z", "w"]);
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), Domain::Polydisc { radii: vec![1.0, 2.0] }).unwrap();
        let pts = s.domain.sample(4, 30);
        let f = HoloMap::new(2, vec![HoloExpr::var(0), HoloExpr::real(2.0) * HoloExpr::var(1)]).unwrap();
        let fit = scale_factor(&f, &s, &pts, 1e-12).unwrap();
        assert!((fit.lambda - 2.0).norm() < 1e-15);
        let g = HoloMap::new(2, vec![HoloExpr::var(0), HoloExpr::var(1) * HoloExpr::var(1)]).unwrap();
        assert!(matches!(scale_factor(&g, &s, &pts, 1e-9), Err(Error::NotScaleSymplectic { .. })));
    }

    #[test]
    fn cayley_pulls_back_to_density() {
        let v = vars(&["z", "w"]);
        let tilde = SymplecticData::new(parse_form("d[z]^d[w] : 2/(1-z)^3", &v, 2).unwrap(), Domain::ball(2)).unwrap();
        let flat = parse_form("d[z]^d[w] : 1", &v, 2).unwrap();
        let pts = tilde.domain.sample(6, 50);
        let fit = scale_factor_between(&crate::domains::cayley_map(2), &flat, &tilde, &pts, 1e-10).unwrap();
        assert!((fit.lambda - 1.0).norm() < 1e-10);
    }

    #[test]
    fn pullback_examples() {
        let v = vars(&["z", "w"]);
        let poly = Domain::Polydisc { radii: vec![1.0, 3.0] };
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), poly.clone()).unwrap();
        let pts = Domain::Polydisc { radii: vec![1.0, 1.0] }.sample(7, 40);
        let target = make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), DiffForm::zero(2, 1), &pts, 1e-10).unwrap();

        let id = HoloMap::identity(2);
        let same = pullback_lift(&id, &target, poly.clone(), &pts, 1e-10).unwrap();
        assert_eq!(same.xi(), target.xi());

        let phi = HoloMap::new(2, vec![HoloExpr::var(0), HoloExpr::var(1) + HoloExpr::powi(HoloExpr::var(0), 2)]).unwrap();
        let src = Domain::Polydisc { radii: vec![1.0, 1.0] };
        let l = pullback_lift(&phi, &target, src.clone(), &pts, 1e-10).unwrap();
        let expect = parse_form("d[w] : z, d[z] : 2*z^2", &v, 1).unwrap();
        for p in &pts {
            assert!(l.nu().eval(p).unwrap().max_abs_diff(&expect.eval(p).unwrap()).unwrap() < 1e-14);
        }
        let tp = total_samples(&l, 8, 40);
        assert!(validate_lift(&l, &tp, 1e-10).pass);
        assert!(bundle_morphism_residual(&phi, &target, &l, &tp).unwrap() < 1e-14);

        let rank1 = HoloMap::new(2, vec![HoloExpr::var(0), HoloExpr::var(0)]).unwrap();
        assert!(matches!(pullback_lift(&rank1, &target, src, &pts, 1e-10), Err(Error::DegeneratePullback { .. })));
    }
}

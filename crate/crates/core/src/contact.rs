//! Contact and symplectic structures: nondegeneracy checks, Reeb fields and
//! Legendrian residuals.
//!
//! Volumes are normalized by `N!`, so `ξ ∧ (dξ)^N / N!` and `ω^N / N!` have
//! unit coefficient for the standard structures.

use serde::Serialize;

use crate::domains::Domain;
use crate::forms::{DiffForm, FormValue};
use crate::holoalg::{CVec, HoloExpr, HoloMap, C64};
use crate::linalg::CMatrix;
use crate::{par, Error, Result};

/// A per-sample failure recorded by a check instead of aborting it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleFailure {
    pub point: String,
    pub error: String,
}

impl SampleFailure {
    pub(crate) fn new(p: &[C64], e: &Error) -> Self {
        SampleFailure {
            point: crate::holoalg::format_point(p),
            error: e.to_string(),
        }
    }
}

/// Holomorphic contact form on a `(2N+1)`-dimensional domain.
#[derive(Clone, Debug)]
pub struct ContactData {
    pub xi: DiffForm,
    pub n: usize,
    pub domain: Domain,
}

/// Holomorphic symplectic form on a `2N`-dimensional domain.
#[derive(Clone, Debug)]
pub struct SymplecticData {
    pub omega: DiffForm,
    pub n: usize,
    pub domain: Domain,
}

impl ContactData {
    pub fn new(xi: DiffForm, domain: Domain) -> Result<Self> {
        let dim = xi.dim();
        if xi.degree() != 1 || dim % 2 == 0 {
            return Err(Error::DimensionMismatch {
                expected: 2 * (dim / 2) + 1,
                found: dim,
            });
        }
        if domain.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: domain.dim(),
            });
        }
        Ok(ContactData { xi, n: dim / 2, domain })
    }

    pub fn dim(&self) -> usize {
        2 * self.n + 1
    }
}

impl SymplecticData {
    pub fn new(omega: DiffForm, domain: Domain) -> Result<Self> {
        let dim = omega.dim();
        if omega.degree() != 2 || dim % 2 == 1 {
            return Err(Error::DimensionMismatch {
                expected: 2 * dim.div_ceil(2),
                found: dim,
            });
        }
        if domain.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: domain.dim(),
            });
        }
        Ok(SymplecticData {
            omega,
            n: dim / 2,
            domain,
        })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    /// `ω^N / N!` at `p`, as a top-degree coefficient.
    pub fn volume_at(&self, p: &[C64]) -> Result<C64> {
        Ok(self.omega.eval(p)?.power(self.n)?.top_coefficient() / factorial(self.n))
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// `dy − z_1 dw_1 − … − z_N dw_N` on coordinates `(z_1..z_N, w_1..w_N, y)`,
/// over the unit polydisc.
pub fn standard_contact(n: usize) -> ContactData {
    assert!(n >= 1, "standard_contact needs N >= 1");
    let dim = 2 * n + 1;
    let mut terms = vec![(vec![2 * n], HoloExpr::one())];
    for j in 0..n {
        terms.push((vec![n + j], -HoloExpr::var(j)));
    }
    let xi = DiffForm::from_terms(dim, 1, terms).expect("standard contact form");
    ContactData::new(
        xi,
        Domain::Box {
            center: None,
            radii: vec![1.0; dim],
        },
    )
    .expect("standard contact data")
}

/// `dz_1 ∧ dw_1 + … + dz_N ∧ dw_N` on the unit polydisc.
pub fn standard_symplectic(n: usize) -> SymplecticData {
    let terms = (0..n).map(|j| (vec![j, n + j], HoloExpr::one()));
    let omega = DiffForm::from_terms(2 * n, 2, terms).expect("standard symplectic form");
    SymplecticData::new(
        omega,
        Domain::Box {
            center: None,
            radii: vec![1.0; 2 * n],
        },
    )
    .expect("standard symplectic data")
}

#[derive(Clone, Debug, Serialize)]
pub struct ContactReport {
    pub pass: bool,
    pub min_volume: f64,
    pub worst_point: Option<CVec>,
    pub failures: Vec<SampleFailure>,
}

/// Minimum of `|ξ ∧ (dξ)^N| / N!` over the samples; passes iff it exceeds
/// `tol` and every sample evaluated.
pub fn contact_check(c: &ContactData, samples: &[CVec], tol: f64) -> ContactReport {
    let dxi = c.xi.exterior_derivative();
    let vols = par::map(samples, |p| -> Result<f64> {
        let top = c.xi.eval(p)?.wedge(&dxi.eval(p)?.power(c.n)?)?;
        Ok(top.top_coefficient().norm() / factorial(c.n))
    });
    let mut min_volume = f64::INFINITY;
    let mut worst_point = None;
    let mut failures = Vec::new();
    for (p, v) in samples.iter().zip(vols) {
        match v {
            Ok(v) if v < min_volume || v.is_nan() => {
                min_volume = v;
                worst_point = Some(p.clone());
            }
            Ok(_) => {}
            Err(e) => failures.push(SampleFailure::new(p, &e)),
        }
    }
    if samples.is_empty() || worst_point.is_none() {
        min_volume = 0.0;
    }
    ContactReport {
        pass: failures.is_empty() && min_volume > tol,
        min_volume,
        worst_point,
        failures,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymplecticReport {
    pub pass: bool,
    pub max_dclosed: f64,
    pub min_top: f64,
    pub worst_point: Option<CVec>,
    pub failures: Vec<SampleFailure>,
}

/// Closedness residual `max |dω|` and minimum `|ω^N| / N!` over the samples.
pub fn symplectic_check(s: &SymplecticData, samples: &[CVec], tol: f64) -> SymplecticReport {
    let domega = s.omega.exterior_derivative();
    let vals = par::map(samples, |p| -> Result<(f64, f64)> { Ok((domega.eval(p)?.max_abs(), s.volume_at(p)?.norm())) });
    let mut max_dclosed: f64 = 0.0;
    let mut min_top = f64::INFINITY;
    let mut worst_point = None;
    let mut failures = Vec::new();
    for (p, v) in samples.iter().zip(vals) {
        match v {
            Ok((d, t)) => {
                max_dclosed = par::max_in_order([max_dclosed, d]);
                if t < min_top || t.is_nan() {
                    min_top = t;
                    worst_point = Some(p.clone());
                }
            }
            Err(e) => failures.push(SampleFailure::new(p, &e)),
        }
    }
    if worst_point.is_none() {
        min_top = 0.0;
    }
    SymplecticReport {
        pass: failures.is_empty() && max_dclosed < tol && min_top > tol,
        max_dclosed,
        min_top,
        worst_point,
        failures,
    }
}

/// Antisymmetric matrix `A_ij = a(e_i, e_j)` of a 2-form value.
pub(crate) fn two_form_matrix(a: &FormValue) -> CMatrix {
    let n = a.dim();
    let mut m = vec![vec![C64::new(0.0, 0.0); n]; n];
    for (idx, c) in a.terms() {
        m[idx[0]][idx[1]] += c;
        m[idx[1]][idx[0]] -= c;
    }
    CMatrix::from_rows(&m)
}

/// Reeb vector at `p`: the unique `v` with `ι_v dξ = 0` and `ξ(v) = 1`.
///
/// Solved as the bordered system `[Aᵀ ξ; ξᵀ 0] (v, μ) = (0, 1)`, which is
/// nonsingular exactly where `ξ` is contact.
pub fn reeb_solve(c: &ContactData, p: &CVec) -> Result<CVec> {
    let dim = c.dim();
    let xi = c.xi.eval(p)?;
    let a = two_form_matrix(&c.xi.exterior_derivative().eval(p)?);
    let xv: Vec<C64> = (0..dim).map(|i| xi.get(&[i])).collect();
    let mut rows = Vec::with_capacity(dim + 1);
    for j in 0..dim {
        let mut r: Vec<C64> = (0..dim).map(|i| a[(i, j)]).collect();
        r.push(xv[j]);
        rows.push(r);
    }
    let mut last = xv.clone();
    last.push(C64::new(0.0, 0.0));
    rows.push(last);
    let mut rhs = vec![C64::new(0.0, 0.0); dim + 1];
    rhs[dim] = C64::new(1.0, 0.0);
    let sol = CMatrix::from_rows(&rows).solve(&rhs)?;
    CVec::new(sol[..dim].to_vec())
}

/// `(|ξ(v) − 1|, max |ι_v dξ|)` at `p`.
pub fn reeb_residuals(c: &ContactData, p: &CVec, v: &CVec) -> Result<(f64, f64)> {
    let norm = (c.xi.pair_at(p, v)? - 1.0).norm();
    let contraction = c.xi.exterior_derivative().eval(p)?.interior(v)?.max_abs();
    Ok((norm, contraction))
}

/// `max |ξ_{φ(ζ)}(φ'(ζ))|` over the parameter samples.
pub fn legendrian_residual(c: &ContactData, phi: &HoloMap, params: &[C64]) -> Result<f64> {
    let vals = par::try_map(params, |z| -> Result<f64> {
        let p = phi.eval(&[*z])?;
        let jac = phi.jacobian(&[*z])?;
        Ok(c.xi.pair_at(&p, &jac.column(0))?.norm())
    })?;
    Ok(par::max_in_order(vals))
}

/// The horizontal frame `∂_{z_j}` and `∂_{w_j} + z_j ∂_y` of the standard
/// structure at `p`.
pub fn standard_horizontal_frame(n: usize, p: &[C64]) -> Vec<CVec> {
    let dim = 2 * n + 1;
    let mut out = Vec::with_capacity(2 * n);
    for j in 0..n {
        out.push(CVec::basis(dim, j));
    }
    for j in 0..n {
        let mut v = CVec::basis(dim, n + j).into_vec();
        v[2 * n] = p[j];
        out.push(CVec::new(v).expect("finite frame"));
    }
    out
}

/// Flow commutator `(Φ^Y_{-h} Φ^X_{-h} Φ^Y_h Φ^X_h (p) − p) / h²` for
/// `X = ∂_{z_j}`, `Y = ∂_{w_j} + z_j ∂_y`, using the exact flows.
pub fn bracket_surrogate(n: usize, j: usize, p: &CVec, h: f64) -> CVec {
    let y = 2 * n;
    let mut q = p.clone().into_vec();
    let flow_x = |q: &mut Vec<C64>, s: f64| q[j] += s;
    let flow_y = |q: &mut Vec<C64>, s: f64| {
        q[n + j] += s;
        let z = q[j];
        q[y] += z * s;
    };
    flow_x(&mut q, h);
    flow_y(&mut q, h);
    flow_x(&mut q, -h);
    flow_y(&mut q, -h);
    let d: Vec<C64> = q.iter().zip(p.iter()).map(|(a, b)| (a - b) / (h * h)).collect();
    CVec::new(d).expect("finite displacement")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forms::parse_form;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn standard_contact_volume_is_one() {
        for n in 1..=3 {
            let s = standard_contact(n);
            let pts = s.domain.sample(1, 20);
            let r = contact_check(&s, &pts, 1e-9);
            assert!(r.pass);
            assert!((r.min_volume - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn degenerate_contact_form_fails() {
        let xi = parse_form("d[y] : 1", &names(&["z", "w", "y"]), 1).unwrap();
        let cd = ContactData::new(xi, Domain::Polydisc { radii: vec![1.0; 3] }).unwrap();
        let r = contact_check(&cd, &cd.domain.sample(2, 10), 1e-9);
        assert!(!r.pass);
        assert_eq!(r.min_volume, 0.0);
    }

    #[test]
    fn reeb_of_standard_is_dy() {
        let s = standard_contact(1);
        let v = reeb_solve(&s, &CVec::from_pairs(&[(0.3, 0.0), (0.0, 0.2), (0.1, 0.0)])).unwrap();
        assert!(v.dist(&CVec::from_reals(&[0.0, 0.0, 1.0])) < 1e-15);
        let s2 = standard_contact(2);
        let p = CVec::from_pairs(&[(0.3, 0.1), (0.0, 0.2), (0.1, 0.0), (-0.2, 0.4), (0.5, 0.5)]);
        let v = reeb_solve(&s2, &p).unwrap();
        assert!(v.dist(&CVec::basis(5, 4)) < 1e-15);
    }

    #[test]
    fn reeb_of_conformal_rescaling() {
        let vars = names(&["z", "w", "y"]);
        let xi = parse_form("d[y] : 2, d[w] : -2*z", &vars, 1).unwrap();
        let cd = ContactData::new(xi, standard_contact(1).domain).unwrap();
        let p = CVec::from_pairs(&[(0.2, 0.0), (0.1, 0.1), (0.0, 0.3)]);
        let v = reeb_solve(&cd, &p).unwrap();
        assert!(v.dist(&CVec::from_reals(&[0.0, 0.0, 0.5])) < 1e-15);

        let xi = parse_form("d[y] : exp(z), d[w] : -z*exp(z)", &vars, 1).unwrap();
        let cd = ContactData::new(xi, standard_contact(1).domain).unwrap();
        let v = reeb_solve(&cd, &p).unwrap();
        let (a, b) = reeb_residuals(&cd, &p, &v).unwrap();
        assert!(a < 1e-12 && b < 1e-12);
    }

    #[test]
    fn reeb_singular_where_degenerate() {
        let xi = parse_form("d[y] : 1, d[w] : -z^2", &names(&["z", "w", "y"]), 1).unwrap();
        let cd = ContactData::new(xi, standard_contact(1).domain).unwrap();
        let e = reeb_solve(&cd, &CVec::from_reals(&[0.0, 0.2, 0.1]));
        assert!(matches!(e, Err(Error::SingularSystem { .. })));
    }

    #[test]
    fn symplectic_examples() {
        let vars = names(&["z", "w"]);
        let ball = Domain::ball(2);
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &vars, 2).unwrap(), ball.clone()).unwrap();
        let r = symplectic_check(&s, &ball.sample(3, 50), 1e-9);
        assert!(r.pass && r.max_dclosed == 0.0 && (r.min_top - 1.0).abs() < 1e-15);

        let s = SymplecticData::new(parse_form("d[z]^d[w] : 2/(1-z)^3", &vars, 2).unwrap(), ball.clone()).unwrap();
        let pts: Vec<CVec> = ball.sample(4, 100).into_iter().filter(|p| p[0].norm() < 0.9).collect();
        let r = symplectic_check(&s, &pts, 1e-9);
        assert!(r.pass && r.min_top > 0.25);

        let s = SymplecticData::new(parse_form("d[z]^d[w] : z", &vars, 2).unwrap(), ball).unwrap();
        let r = symplectic_check(&s, &[CVec::from_reals(&[0.0, 0.3])], 1e-9);
        assert!(!r.pass && r.min_top == 0.0);
    }

    #[test]
    fn legendrian_examples() {
        let s = standard_contact(1);
        let params: Vec<C64> = (0..16).map(|k| C64::from_polar(0.5, k as f64 * 0.4)).collect();
        let zeta = HoloExpr::var(0);
        let flat = HoloMap::new(1, vec![zeta.clone(), HoloExpr::constant(c(0.2, 0.1)), HoloExpr::constant(c(-0.3, 0.0))]).unwrap();
        assert_eq!(legendrian_residual(&s, &flat, &params).unwrap(), 0.0);

        // gamma_3(t) = (sqrt(y0), sqrt(y0) + t, sqrt(y0) t)
        let r = HoloExpr::sqrt(HoloExpr::real(0.04), false);
        let g3 = HoloMap::new(1, vec![r.clone(), r.clone() + zeta.clone(), r * zeta.clone()]).unwrap();
        assert!(legendrian_residual(&s, &g3, &params).unwrap() < 1e-16);

        let diag = HoloMap::new(1, vec![zeta.clone(), zeta, HoloExpr::zero()]).unwrap();
        assert!((legendrian_residual(&s, &diag, &params).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn horizontal_frame_and_bracket() {
        let n = 2;
        let s = standard_contact(n);
        let p = CVec::from_pairs(&[(0.1, 0.2), (-0.3, 0.0), (0.2, 0.2), (0.0, -0.1), (0.4, 0.0)]);
        for v in standard_horizontal_frame(n, &p) {
            assert_eq!(s.xi.pair_at(&p, &v).unwrap().norm(), 0.0);
        }
        for j in 0..n {
            let b = bracket_surrogate(n, j, &p, 1e-3);
            assert!((b[2 * n] - 1.0).norm() < 1e-8);
        }
    }

    #[test]
    fn sample_order_does_not_change_min() {
        let vars = names(&["z", "w", "y"]);
        let xi = parse_form("d[y] : 1, d[w] : -z*exp(w)", &vars, 1).unwrap();
        let cd = ContactData::new(xi, standard_contact(1).domain).unwrap();
        let mut pts = cd.domain.sample(9, 40);
        let a = contact_check(&cd, &pts, 1e-9).min_volume;
        pts.reverse();
        assert_eq!(a, contact_check(&cd, &pts, 1e-9).min_volume);
    }
}

//! The Legendrian-disc pseudometric `κ_V` on lifts, lengths of horizontal
//! curves and chains, distance bounds, and certified bounds in the standard
//! box `B_r = {|z|² + |w|² < r², |y| < r}`.

use serde::Serialize;

use crate::domains::{extremal_disc, geodesic_chain, model_dist, model_kappa, Chain, ExtremalDisc};
use crate::forms::{gauss_legendre, integrate, Path, PathSegment};
use crate::holoalg::{CVec, HoloMap, C64};
use crate::lifts::{lift_chain, LiftedDisc, Lift, VChain};
use crate::{par, Error, Result};

/// Gauss–Legendre nodes per piece for tangency checks.
pub const TANGENCY_NODES: usize = 128;

#[derive(Clone, Debug)]
pub enum Witness {
    /// Extremal base disc and its Legendrian lift through the point.
    Extremal { base: ExtremalDisc, lift: LiftedDisc },
    /// Linear disc of radius `rho` kept inside a standard box.
    Conservative { rho: f64 },
}

#[derive(Clone, Debug)]
pub struct MetricCertificate {
    pub value: f64,
    pub witness: Witness,
    /// `λ` with `witness'(0) = λ u`.
    pub lambda: C64,
    /// `max |witness'(0) − λ u|`.
    pub tangent_residual: f64,
    /// Legendrian residual of the witness disc.
    pub legendrian_residual: f64,
}

fn check_horizontal(lift: &Lift, p: &CVec, u: &CVec, tol: f64) -> Result<()> {
    let value = lift.xi().pair_at(p, u)?.norm();
    if !(value < tol) {
        return Err(Error::NotInContactHyperplane { value });
    }
    Ok(())
}

/// `κ_V(p'; u)` for `u ∈ V`: the base metric of `dπ(u)`, certified by the
/// Legendrian lift of the extremal base disc through `p'`.
pub fn kappa_v(lift: &Lift, p: &CVec, u: &CVec, tol: f64) -> Result<MetricCertificate> {
    let n = lift.base_dim();
    if p.dim() != n + 1 || u.dim() != n + 1 {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            found: p.dim().min(u.dim()),
        });
    }
    check_horizontal(lift, p, u, tol)?;
    let (bp, bv) = (p.slice(0..n), u.slice(0..n));
    if bv.norm() == 0.0 {
        return Err(Error::DegenerateDirection("vertical or zero vector".into()));
    }
    let base = extremal_disc(&lift.base().domain, &bp, &bv)?;
    let disc = crate::lifts::lift_disc(lift, &base.disc, p[n])?;
    let lambda = C64::new(1.0 / base.kappa, 0.0);
    let t = disc.tangent(C64::new(0.0, 0.0))?;
    let tangent_residual = t.sub(&u.scale(lambda)).iter().map(|z| z.norm()).fold(0.0, f64::max);
    Ok(MetricCertificate {
        value: base.kappa,
        lambda,
        tangent_residual,
        legendrian_residual: disc.certificate(),
        witness: Witness::Extremal { base, lift: disc },
    })
}

/// Piecewise holomorphic curve `[0, 1] -> C^n`, one parameter interval per
/// piece; may be empty.
#[derive(Clone, Debug, Default)]
pub struct PiecewiseCurve {
    pub pieces: Vec<PathSegment>,
}

impl PiecewiseCurve {
    pub fn from_path(path: &Path) -> Self {
        PiecewiseCurve {
            pieces: path.segments().to_vec(),
        }
    }

    pub fn reversed(&self) -> Self {
        PiecewiseCurve {
            pieces: self.pieces.iter().rev().map(PathSegment::reversed).collect(),
        }
    }

    /// Vertices: the start of every piece and the end of the last.
    pub fn vertices(&self) -> Result<Vec<CVec>> {
        let mut out: Vec<CVec> = self.pieces.iter().map(PathSegment::start).collect::<Result<_>>()?;
        if let Some(last) = self.pieces.last() {
            out.push(last.end()?);
        }
        Ok(out)
    }

    /// `max |ξ(γ')|` per piece at the Gauss–Legendre nodes.
    pub fn tangency_residuals(&self, xi: &crate::forms::DiffForm) -> Result<Vec<(f64, f64)>> {
        let (nodes, _) = gauss_legendre(TANGENCY_NODES);
        par::try_map(&self.pieces, |seg| -> Result<(f64, f64)> {
            let mut worst = (0.0, 0.0);
            for &x in &nodes {
                let t = 0.5 * (x + 1.0);
                let (p, v) = seg.point_and_velocity(t)?;
                let r = xi.pair_at(&p, &v)?.norm();
                if r > worst.0 || r.is_nan() {
                    worst = (r, t);
                }
            }
            Ok(worst)
        })
    }
}

fn length_of(curve: &PiecewiseCurve, tol: f64, density: impl Fn(&CVec, &CVec) -> Result<f64> + Sync + Send) -> Result<f64> {
    let budget = tol / curve.pieces.len().max(1) as f64;
    let parts = par::try_map(&curve.pieces, |seg| {
        integrate(
            |t| {
                let (p, v) = seg.point_and_velocity(t)?;
                Ok(C64::new(density(&p, &v)?, 0.0))
            },
            0.0,
            1.0,
            budget,
        )
    })?;
    Ok(parts.iter().map(|q| q.value.re).sum())
}

/// `ℓ_V(γ) = ∫ κ_V(γ; γ')`, computed as the base length under the model
/// metric after checking tangency to `V`.
pub fn v_length(lift: &Lift, curve: &PiecewiseCurve, tol: f64) -> Result<f64> {
    for (piece, (residual, t)) in curve.tangency_residuals(lift.xi())?.into_iter().enumerate() {
        if !(residual < tol) {
            return Err(Error::TangencyViolation { residual, piece, t });
        }
    }
    let n = lift.base_dim();
    let domain = &lift.base().domain;
    length_of(curve, tol, |p, v| {
        let bv = v.slice(0..n);
        if bv.norm_sqr() == 0.0 {
            return Ok(0.0);
        }
        model_kappa(domain, &p.slice(0..n), &bv)
    })
}

/// Anything carrying chain parameters `t_j`.
pub trait ChainParams {
    fn params(&self) -> Vec<f64>;
}

impl ChainParams for Chain {
    fn params(&self) -> Vec<f64> {
        self.links.iter().map(|l| l.t).collect()
    }
}

impl ChainParams for VChain {
    fn params(&self) -> Vec<f64> {
        VChain::params(self)
    }
}

/// `½ Σ log((1 + t_j)/(1 − t_j))`.
pub fn chain_length(chain: &impl ChainParams) -> Result<f64> {
    chain
        .params()
        .into_iter()
        .map(|t| {
            if t > 0.0 && t < 1.0 {
                Ok(0.5 * ((1.0 + t) / (1.0 - t)).ln())
            } else {
                Err(Error::ParamOutOfRange { t })
            }
        })
        .sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct DistBounds {
    pub lower: f64,
    /// `None` stands for `+∞`: the lifted chain missed the target fiber.
    pub upper: Option<f64>,
    pub gap: f64,
    #[serde(skip)]
    pub chain: Option<VChain>,
}

/// Lower bound from the base distance; upper bound from the lifted geodesic
/// chain when it lands on `q'` within `tol`.
pub fn dist_bounds(lift: &Lift, p: &CVec, q: &CVec, tol: f64) -> Result<DistBounds> {
    let n = lift.base_dim();
    let (bp, bq) = (p.slice(0..n), q.slice(0..n));
    let lower = model_dist(&lift.base().domain, &bp, &bq)?;
    if bp == bq {
        let gap = (p[n] - q[n]).norm();
        return Ok(DistBounds {
            lower,
            upper: (gap <= tol).then_some(0.0),
            gap,
            chain: None,
        });
    }
    let chain = lift_chain(lift, &geodesic_chain(&lift.base().domain, &bp, &bq)?, p[n])?;
    let gap = (chain.end[n] - q[n]).norm();
    let upper = if gap <= tol { Some(chain_length(&chain)?) } else { None };
    Ok(DistBounds {
        lower,
        upper,
        gap,
        chain: Some(chain),
    })
}

/// Base distance from `π(p')` to `q` with the lifted geodesic chain whose
/// endpoint lies over `q`.
pub fn dist_to_fiber(lift: &Lift, p: &CVec, q: &CVec) -> Result<(f64, VChain)> {
    let n = lift.base_dim();
    let bp = p.slice(0..n);
    if &bp == q {
        return Ok((
            0.0,
            VChain {
                links: Vec::new(),
                start: p.clone(),
                end: p.clone(),
            },
        ));
    }
    let value = model_dist(&lift.base().domain, &bp, q)?;
    let chain = lift_chain(lift, &geodesic_chain(&lift.base().domain, &bp, q)?, p[n])?;
    Ok((value, chain))
}

fn in_box(r: f64, p: &[C64]) -> bool {
    p[0].norm_sqr() + p[1].norm_sqr() < r * r && p[2].norm() < r
}

fn segment(a: &[C64], b: &[C64]) -> Result<PathSegment> {
    let comps = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| crate::holoalg::HoloExpr::constant(x) + crate::holoalg::HoloExpr::constant(y - x) * crate::holoalg::HoloExpr::var(0))
        .collect();
    PathSegment::new(HoloMap::new(1, comps)?)
}

/// Horizontal curve in `B_r ⊂ C³` (standard structure, `N = 1`) from `p` to
/// the origin: coordinate moves in `z` and `w` at constant `y`, then
/// `γ₃(t) = (√y, √y + t, √y t)` traversed from `t = √y` to `0`, then
/// coordinate moves to the origin. Zero-length moves are dropped, and `γ₃`
/// is omitted when `y = 0`.
pub fn local_connect(r: f64, p: &CVec) -> Result<PiecewiseCurve> {
    if p.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: p.dim() });
    }
    let zero = C64::new(0.0, 0.0);
    let (z, w, y) = (p[0], p[1], p[2]);
    let mut route = vec![vec![z, w, y]];
    if y.norm_sqr() == 0.0 {
        route.push(vec![zero, w, zero]);
    } else {
        let s = y.sqrt();
        route.extend([vec![zero, w, y], vec![zero, 2.0 * s, y], vec![s, 2.0 * s, y], vec![s, s, zero], vec![zero, s, zero]]);
    }
    route.push(vec![zero, zero, zero]);
    route.dedup();
    for v in &route {
        if !in_box(r, v) {
            return Err(Error::IntermediatePointEscapes {
                point: crate::holoalg::format_point(v),
            });
        }
    }
    let pieces = route.windows(2).map(|w| segment(&w[0], &w[1])).collect::<Result<_>>()?;
    Ok(PiecewiseCurve { pieces })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BoxBound {
    pub value: f64,
    pub rho: f64,
}

/// Certified upper bound for `κ_V(p; u)` in `B_r`: the Legendrian lift of
/// the linear disc `ζ -> π(p) + ρ ζ e`, `e = dπ(u)/|dπ(u)| = (a, b)`, has
/// `|Δy| ≤ ρ |b| |z₀| + ρ² |ab| / 2`; `ρ` is the largest radius keeping the
/// base in the ball and `|y| < r`, and the bound is `|dπ(u)| / ρ`.
pub fn kappa_upper_box(r: f64, p: &CVec, u: &CVec, tol: f64) -> Result<BoxBound> {
    if p.dim() != 3 || u.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 3, found: p.dim() });
    }
    if !in_box(r, p) {
        return Err(Error::domain("kappa_upper_box", p));
    }
    let value = (u[2] - p[0] * u[1]).norm();
    if !(value < tol) {
        return Err(Error::NotInContactHyperplane { value });
    }
    let speed = (u[0].norm_sqr() + u[1].norm_sqr()).sqrt();
    if speed == 0.0 {
        return Err(Error::DegenerateDirection("vertical or zero vector".into()));
    }
    let (a, b) = (u[0] / speed, u[1] / speed);
    let x2 = p[0].norm_sqr() + p[1].norm_sqr();
    let xe = (p[0] * a.conj() + p[1] * b.conj()).norm();
    let rho_base = -xe + (xe * xe + r * r - x2).sqrt();
    let qa = 0.5 * (a * b).norm();
    let qb = b.norm() * p[0].norm();
    let qc = r - p[2].norm();
    let rho_fiber = if qa > 0.0 {
        2.0 * qc / (qb + (qb * qb + 4.0 * qa * qc).sqrt())
    } else if qb > 0.0 {
        qc / qb
    } else {
        f64::INFINITY
    };
    let rho = rho_base.min(rho_fiber);
    Ok(BoxBound { value: speed / rho, rho })
}

/// `∫ kappa_upper_box(γ; γ')` along a horizontal curve in `B_r`.
pub fn box_length(r: f64, curve: &PiecewiseCurve, tol: f64) -> Result<f64> {
    length_of(curve, tol, |p, v| {
        if v.norm_sqr() == 0.0 {
            return Ok(0.0);
        }
        // tangency is checked separately; allow roundoff in the density
        Ok(kappa_upper_box(r, p, v, f64::INFINITY)?.value)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::contact::{standard_contact, SymplecticData};
    use crate::domains::{ChainLink, Domain};
    use crate::forms::{parse_form, DiffForm};
    use crate::holoalg::HoloExpr;
    use crate::lifts::make_lift;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn ball_lift() -> Lift {
        let v: Vec<String> = ["z", "w"].iter().map(|s| s.to_string()).collect();
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), Domain::ball(2)).unwrap();
        let pts = s.domain.sample(1, 30);
        make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), DiffForm::zero(2, 1), &pts, 1e-10).unwrap()
    }

    #[test]
    fn kappa_v_examples() {
        let l = ball_lift();
        let cert = kappa_v(&l, &CVec::zeros(3), &CVec::basis(3, 0), 1e-12).unwrap();
        assert!((cert.value - 1.0).abs() < 1e-15);
        let Witness::Extremal { lift, .. } = &cert.witness else { panic!() };
        let z = c(0.3, 0.2);
        assert!(lift.eval(z).unwrap().dist(&CVec::new(vec![z, c(0.0, 0.0), c(0.0, 0.0)]).unwrap()) < 1e-14);

        let p = CVec::from_reals(&[0.5, 0.0, 0.3]);
        let u = l.horizontal_lift(&p, &CVec::from_reals(&[0.0, 1.0])).unwrap();
        let cert = kappa_v(&l, &p, &u, 1e-12).unwrap();
        assert!((cert.value - 1.0 / 0.75f64.sqrt()).abs() < 1e-14);
        assert!(cert.tangent_residual < 1e-12 && cert.legendrian_residual < 1e-10);
        assert!((cert.lambda.norm() * cert.value - 1.0).abs() < 1e-12);

        let e = kappa_v(&l, &p, &CVec::basis(3, 2), 1e-12);
        assert!(matches!(e, Err(Error::NotInContactHyperplane { .. })));
    }

    #[test]
    fn v_length_of_lifted_geodesic() {
        let l = ball_lift();
        let seg = PathSegment::new(
            HoloMap::new(1, vec![HoloExpr::real(0.5) * HoloExpr::var(0), HoloExpr::zero(), HoloExpr::zero()]).unwrap(),
        )
        .unwrap();
        let curve = PiecewiseCurve { pieces: vec![seg] };
        let len = v_length(&l, &curve, 1e-10).unwrap();
        assert!((len - 0.5f64.atanh()).abs() < 1e-9);
        assert!((v_length(&l, &curve.reversed(), 1e-10).unwrap() - len).abs() < 1e-10);

        let still = PathSegment::new(HoloMap::new(1, vec![HoloExpr::real(0.1), HoloExpr::zero(), HoloExpr::zero()]).unwrap()).unwrap();
        assert_eq!(v_length(&l, &PiecewiseCurve { pieces: vec![still] }, 1e-10).unwrap(), 0.0);

        let bad = PathSegment::new(HoloMap::new(1, vec![HoloExpr::real(0.1), HoloExpr::zero(), HoloExpr::var(0)]).unwrap()).unwrap();
        assert!(matches!(v_length(&l, &PiecewiseCurve { pieces: vec![bad] }, 1e-10), Err(Error::TangencyViolation { .. })));
    }

    #[test]
    fn chain_length_examples() {
        let link = |t| ChainLink {
            disc: HoloMap::identity(1),
            t,
        };
        assert!((chain_length(&Chain { links: vec![link(0.5)] }).unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((chain_length(&Chain { links: vec![link(0.5), link(0.5)] }).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!(matches!(chain_length(&Chain { links: vec![link(0.0)] }), Err(Error::ParamOutOfRange { .. })));
    }

    #[test]
    fn dist_bounds_examples() {
        let l = ball_lift();
        let p = CVec::zeros(3);
        let b = dist_bounds(&l, &p, &CVec::from_reals(&[0.5, 0.0, 0.0]), 1e-10).unwrap();
        assert!((b.lower - 0.5f64.atanh()).abs() < 1e-15);
        assert!((b.upper.unwrap() - b.lower).abs() < 1e-12 && b.gap < 1e-15);
        let b = dist_bounds(&l, &p, &CVec::from_reals(&[0.5, 0.0, 1.0]), 1e-10).unwrap();
        assert!(b.upper.is_none() && (b.gap - 1.0).abs() < 1e-14);
        let b = dist_bounds(&l, &p, &p, 1e-10).unwrap();
        assert_eq!((b.lower, b.upper), (0.0, Some(0.0)));
    }

    #[test]
    fn dist_to_fiber_examples() {
        let l = ball_lift();
        let (d, ch) = dist_to_fiber(&l, &CVec::zeros(3), &CVec::from_reals(&[0.5, 0.0])).unwrap();
        assert!((d - 0.5f64.atanh()).abs() < 1e-15);
        assert!(ch.end.dist(&CVec::from_reals(&[0.5, 0.0, 0.0])) < 1e-14);
    }

    #[test]
    fn local_connect_examples() {
        let xi = standard_contact(1).xi;
        let curve = local_connect(1.0, &CVec::from_reals(&[0.1, 0.1, 0.01])).unwrap();
        let verts = curve.vertices().unwrap();
        let expect = [
            [0.1, 0.1, 0.01],
            [0.0, 0.1, 0.01],
            [0.0, 0.2, 0.01],
            [0.1, 0.2, 0.01],
            [0.1, 0.1, 0.0],
            [0.0, 0.1, 0.0],
            [0.0, 0.0, 0.0],
        ];
        assert_eq!(verts.len(), expect.len());
        for (v, e) in verts.iter().zip(expect) {
            assert!(v.dist(&CVec::from_reals(&e)) < 1e-15);
        }
        assert!(curve.tangency_residuals(&xi).unwrap().iter().all(|(r, _)| *r < 1e-12));

        let flat = local_connect(1.0, &CVec::from_reals(&[0.1, 0.1, 0.0])).unwrap();
        assert_eq!(flat.pieces.len(), 2);
        assert!(local_connect(1.0, &CVec::zeros(3)).unwrap().pieces.is_empty());
        assert!(matches!(
            local_connect(0.5, &CVec::from_reals(&[0.0, 0.3, 0.2])),
            Err(Error::IntermediatePointEscapes { .. })
        ));
    }

    #[test]
    fn box_bound_examples() {
        let b = kappa_upper_box(1.0, &CVec::zeros(3), &CVec::basis(3, 0), 1e-12).unwrap();
        assert_eq!((b.rho, b.value), (1.0, 1.0));
        let b = kappa_upper_box(1.0, &CVec::zeros(3), &CVec::basis(3, 1), 1e-12).unwrap();
        assert_eq!((b.rho, b.value), (1.0, 1.0));
        let p = CVec::from_reals(&[0.5, 0.0, 0.0]);
        let b = kappa_upper_box(1.0, &p, &CVec::from_reals(&[0.0, 1.0, 0.5]), 1e-12).unwrap();
        assert!((b.rho - 0.75f64.sqrt()).abs() < 1e-15);
        // the lifted disc y(ζ) = 0.5 ρ ζ stays below r on |ζ| = 1
        assert!(0.5 * b.rho < 1.0);
        assert!(matches!(kappa_upper_box(1.0, &p, &CVec::basis(3, 2), 1e-12), Err(Error::NotInContactHyperplane { .. })));
    }

    #[test]
    fn box_bound_is_certified_by_the_lifted_disc() {
        let p = CVec::from_pairs(&[(0.3, 0.1), (-0.2, 0.2), (0.1, -0.3)]);
        let dir = CVec::from_pairs(&[(0.6, 0.0), (0.0, 0.8)]);
        let u = dir.push(p[0] * dir[1]);
        let b = kappa_upper_box(1.0, &p, &u, 1e-12).unwrap();
        for k in 0..256 {
            let zeta = C64::from_polar(1.0, k as f64 * std::f64::consts::TAU / 256.0);
            let z = p[0] + b.rho * zeta * dir[0];
            let w = p[1] + b.rho * zeta * dir[1];
            let y = p[2] + b.rho * dir[1] * p[0] * zeta + b.rho * b.rho * dir[0] * dir[1] * zeta * zeta / 2.0;
            assert!(z.norm_sqr() + w.norm_sqr() <= 1.0 + 1e-12);
            assert!(y.norm() <= 1.0 + 1e-12);
        }
    }
}

use super::{cayley_map, Atom, Domain};
use crate::holoalg::{CVec, HoloExpr, HoloMap, C64, I};
use crate::{Error, Result};

const DECK_WINDOW: i64 = 16;

fn hdot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

fn nsq(a: &[C64]) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum()
}

fn clamp_t(t: f64) -> f64 {
    t.min(1.0 - f64::EPSILON)
}

/// Inverse Cayley image of a Siegel point and the Jacobian applied to `v`.
fn siegel_to_ball(p: &[C64], v: Option<&[C64]>) -> (Vec<C64>, Option<Vec<C64>>) {
    let one = C64::new(1.0, 0.0);
    let den = p[0] + one;
    let mut x = vec![(p[0] - one) / den];
    x.extend(p[1..].iter().map(|z| 2.0 * z / den));
    let w = v.map(|v| {
        let mut w = vec![2.0 * v[0] / (den * den)];
        w.extend((1..p.len()).map(|k| 2.0 * v[k] / den - 2.0 * p[k] * v[0] / (den * den)));
        w
    });
    (x, w)
}

fn ball_kappa(x: &[C64], w: &[C64]) -> f64 {
    let s = 1.0 - nsq(x);
    ((s * nsq(w) + hdot(x, w).norm_sqr()) / (s * s)).sqrt()
}

/// `|phi_x(y)|` for the unit ball, computed without cancellation in the
/// numerator via the Lagrange identity.
fn ball_pseudo(x: &[C64], y: &[C64]) -> f64 {
    let diff: f64 = x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum();
    let mut lagrange = 0.0;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            lagrange += (x[i] * y[j] - x[j] * y[i]).norm_sqr();
        }
    }
    let den = (C64::new(1.0, 0.0) - hdot(x, y)).norm_sqr();
    ((diff - lagrange).max(0.0) / den).sqrt()
}

/// Automorphism of the unit ball exchanging `a` and `0`, evaluated at `z`.
fn ball_involution(a: &[C64], z: &[C64]) -> Vec<C64> {
    let a2 = nsq(a);
    let za = hdot(z, a);
    let s = (1.0 - a2).sqrt();
    let den = C64::new(1.0, 0.0) - za;
    (0..a.len())
        .map(|i| {
            let (pz, qz) = if a2 == 0.0 {
                (C64::new(0.0, 0.0), z[i])
            } else {
                let pz = a[i] * za / a2;
                (pz, z[i] - pz)
            };
            (a[i] - pz - s * qz) / den
        })
        .collect()
}

fn half_plane_pseudo(a: C64, b: C64) -> f64 {
    ((a - b) / (a - b.conj())).norm()
}

fn log_coord(x: C64) -> C64 {
    -I * x.ln()
}

/// Deck translate of the half-plane lift of `y` closest to that of `x`.
fn nearest_lift(x: C64, y: C64) -> (C64, C64, f64) {
    let a = log_coord(x);
    let b0 = log_coord(y);
    let mut best = (b0, half_plane_pseudo(a, b0));
    for n in -DECK_WINDOW..=DECK_WINDOW {
        let b = b0 + C64::new(2.0 * std::f64::consts::PI * n as f64, 0.0);
        let t = half_plane_pseudo(a, b);
        if t < best.1 {
            best = (b, t);
        }
    }
    (a, best.0, best.1)
}

fn check_inside(d: &Domain, p: &[C64], node: &str) -> Result<()> {
    if p.len() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: p.len(),
        });
    }
    if !d.contains_with_margin(p, 0.0) {
        return Err(Error::domain(node, p));
    }
    Ok(())
}

impl Atom {
    pub(crate) fn kappa(&self, p: &[C64], v: &[C64]) -> f64 {
        match self {
            Atom::Disc { center, radius } => {
                let x = (p[0] - center) / radius;
                v[0].norm() / radius / (1.0 - x.norm_sqr())
            }
            Atom::Punctured { radius } => {
                let x = p[0] / radius;
                v[0].norm() / radius / (2.0 * x.norm() * (-x.norm().ln()))
            }
            Atom::Ball { radius, .. } => {
                let x: Vec<C64> = p.iter().map(|z| z / radius).collect();
                let w: Vec<C64> = v.iter().map(|z| z / radius).collect();
                ball_kappa(&x, &w)
            }
            Atom::HalfPlane => v[0].norm() / (2.0 * p[0].im),
            Atom::Plane => 0.0,
            Atom::Siegel { .. } => {
                let (x, w) = siegel_to_ball(p, Some(v));
                ball_kappa(&x, &w.expect("jacobian requested"))
            }
        }
    }

    /// `tanh` of the Kobayashi distance between `p` and `q`.
    pub(crate) fn pseudo(&self, p: &[C64], q: &[C64]) -> f64 {
        match self {
            Atom::Disc { center, radius } => {
                let x = (p[0] - center) / radius;
                let y = (q[0] - center) / radius;
                ((x - y) / (1.0 - x.conj() * y)).norm()
            }
            Atom::Punctured { radius } => nearest_lift(p[0] / radius, q[0] / radius).2,
            Atom::Ball { radius, .. } => {
                let x: Vec<C64> = p.iter().map(|z| z / radius).collect();
                let y: Vec<C64> = q.iter().map(|z| z / radius).collect();
                ball_pseudo(&x, &y)
            }
            Atom::HalfPlane => half_plane_pseudo(p[0], q[0]),
            Atom::Plane => 0.0,
            Atom::Siegel { .. } => ball_pseudo(&siegel_to_ball(p, None).0, &siegel_to_ball(q, None).0),
        }
    }

    /// Disc components in variable 0 with `f(0) = p` and `f(t) = q`, where
    /// `t` is the returned value; `None` when `p = q`. The plane has no
    /// disc of positive length and also returns `None`.
    pub(crate) fn geodesic(&self, p: &[C64], q: &[C64]) -> Option<(Vec<HoloExpr>, f64)> {
        let zeta = HoloExpr::var(0);
        let k = HoloExpr::constant;
        match self {
            Atom::Plane => None,
            Atom::Disc { center, radius } => {
                let x = (p[0] - center) / radius;
                let y = (q[0] - center) / radius;
                let w = (x - y) / (1.0 - x.conj() * y);
                let t = w.norm();
                (t > 0.0).then(|| {
                    let u = w / t;
                    let f = k(*center) + k(C64::new(*radius, 0.0)) * (k(x) - k(u) * zeta.clone()) / (HoloExpr::one() - k(x.conj() * u) * zeta);
                    (vec![f], t)
                })
            }
            Atom::Punctured { radius } => {
                let (a, b, _) = nearest_lift(p[0] / radius, q[0] / radius);
                let w = (b - a) / (b - a.conj());
                let t = w.norm();
                (t > 0.0).then(|| (vec![punctured_disc_expr(*radius, a, w / t)], t))
            }
            Atom::HalfPlane => {
                let (a, b) = (p[0], q[0]);
                let w = (b - a) / (b - a.conj());
                let t = w.norm();
                (t > 0.0).then(|| (vec![half_plane_disc_expr(a, w / t)], t))
            }
            Atom::Ball { radius, .. } => {
                let x: Vec<C64> = p.iter().map(|z| z / radius).collect();
                let y: Vec<C64> = q.iter().map(|z| z / radius).collect();
                let w = ball_involution(&x, &y);
                let t = nsq(&w).sqrt();
                (t > 0.0).then(|| {
                    let u: Vec<C64> = w.iter().map(|z| z / t).collect();
                    (ball_disc_exprs(&x, &u, *radius), t)
                })
            }
            Atom::Siegel { n } => {
                let x = siegel_to_ball(p, None).0;
                let y = siegel_to_ball(q, None).0;
                let w = ball_involution(&x, &y);
                let t = nsq(&w).sqrt();
                (t > 0.0).then(|| {
                    let u: Vec<C64> = w.iter().map(|z| z / t).collect();
                    (through_cayley(*n, ball_disc_exprs(&x, &u, 1.0)), t)
                })
            }
        }
    }

    /// Disc components in variable 0 with `f(0) = p` and `f'(0) = v / kappa`.
    pub(crate) fn extremal(&self, p: &[C64], v: &[C64], kappa: f64) -> Vec<HoloExpr> {
        let k = HoloExpr::constant;
        let zeta = HoloExpr::var(0);
        let target: Vec<C64> = v.iter().map(|z| z / kappa).collect();
        match self {
            Atom::Plane => vec![k(p[0]) + k(target[0]) * zeta],
            Atom::Disc { center, radius } => {
                let x = (p[0] - center) / radius;
                let u = -v[0] / v[0].norm();
                vec![k(*center) + k(C64::new(*radius, 0.0)) * (k(x) - k(u) * zeta.clone()) / (HoloExpr::one() - k(x.conj() * u) * zeta)]
            }
            Atom::Punctured { radius } => {
                let x = p[0] / radius;
                let a = log_coord(x);
                let u = -target[0] / (2.0 * radius * x * a.im);
                vec![punctured_disc_expr(*radius, a, u / u.norm())]
            }
            Atom::HalfPlane => {
                let u = target[0] / (2.0 * I * p[0].im);
                vec![half_plane_disc_expr(p[0], u / u.norm())]
            }
            Atom::Ball { radius, .. } => {
                let x: Vec<C64> = p.iter().map(|z| z / radius).collect();
                let w: Vec<C64> = target.iter().map(|z| z / radius).collect();
                ball_disc_exprs(&x, &ball_extremal_direction(&x, &w), *radius)
            }
            Atom::Siegel { n } => {
                let (x, w) = siegel_to_ball(p, Some(&target));
                let w = w.expect("jacobian requested");
                through_cayley(*n, ball_disc_exprs(&x, &ball_extremal_direction(&x, &w), 1.0))
            }
        }
    }
}

/// Unit `u` with `d/dζ phi_x(ζu)|_0 = w`, for `w` of unit ball-metric length.
fn ball_extremal_direction(x: &[C64], w: &[C64]) -> Vec<C64> {
    let x2 = nsq(x);
    let s = (1.0 - x2).sqrt();
    let u: Vec<C64> = if x2 == 0.0 {
        w.iter().map(|z| -z).collect()
    } else {
        let coef = hdot(w, x) / x2;
        (0..x.len())
            .map(|i| {
                let pw = x[i] * coef;
                -(pw / (1.0 - x2) + (w[i] - pw) / s)
            })
            .collect()
    };
    let n = nsq(&u).sqrt();
    u.into_iter().map(|z| z / n).collect()
}

/// `ζ -> r · phi_x(ζu)` for the ball automorphism `phi_x` exchanging `x` and 0.
fn ball_disc_exprs(x: &[C64], u: &[C64], radius: f64) -> Vec<HoloExpr> {
    let k = HoloExpr::constant;
    let zeta = HoloExpr::var(0);
    let x2 = nsq(x);
    let s = (1.0 - x2).sqrt();
    let ux = hdot(u, x);
    let mu: Vec<C64> = if x2 == 0.0 {
        u.to_vec()
    } else {
        (0..x.len())
            .map(|i| {
                let pu = x[i] * ux / x2;
                pu + s * (u[i] - pu)
            })
            .collect()
    };
    let den = HoloExpr::one() - k(ux) * zeta.clone();
    (0..x.len())
        .map(|i| k(C64::new(radius, 0.0)) * (k(x[i]) - k(mu[i]) * zeta.clone()) / den.clone())
        .collect()
}

/// `ζ -> m(uζ)` with `m(ζ) = (a - conj(a) ζ)/(1 - ζ)`, a disc in the upper
/// half plane centered at `a`.
fn half_plane_disc_expr(a: C64, u: C64) -> HoloExpr {
    let k = HoloExpr::constant;
    let zeta = HoloExpr::var(0);
    (k(a) - k(a.conj() * u) * zeta.clone()) / (HoloExpr::one() - k(u) * zeta)
}

fn punctured_disc_expr(radius: f64, a: C64, u: C64) -> HoloExpr {
    HoloExpr::constant(C64::new(radius, 0.0)) * HoloExpr::exp(HoloExpr::constant(I) * half_plane_disc_expr(a, u))
}

fn through_cayley(n: usize, ball: Vec<HoloExpr>) -> Vec<HoloExpr> {
    cayley_map(n).components().iter().map(|c| c.substitute(&ball)).collect()
}

/// Kobayashi–Royden metric `κ_D(p; v)`, normalized by `κ_𝔻(0; 1) = 1`.
/// Products take the maximum over factors; Siegel domains go through the
/// Cayley map.
pub fn model_kappa(d: &Domain, p: &CVec, v: &CVec) -> Result<f64> {
    check_inside(d, p, "model_kappa")?;
    if v.dim() != d.dim() {
        return Err(Error::DimensionMismatch {
            expected: d.dim(),
            found: v.dim(),
        });
    }
    let mut off = 0;
    let mut best: f64 = 0.0;
    for (a, q) in d.split(p) {
        let n = a.dim();
        best = best.max(a.kappa(q, &v[off..off + n]));
        off += n;
    }
    Ok(best)
}

/// Kobayashi distance, normalized by `k_𝔻(0, t) = arctanh t`.
pub fn model_dist(d: &Domain, p: &CVec, q: &CVec) -> Result<f64> {
    check_inside(d, p, "model_dist")?;
    check_inside(d, q, "model_dist")?;
    let mut best: f64 = 0.0;
    for ((a, x), (_, y)) in d.split(p).into_iter().zip(d.split(q)) {
        best = best.max(clamp_t(a.pseudo(x, y)).atanh());
    }
    Ok(best)
}

/// Extremal disc for `κ_D(p; v)`: `disc(0) = p`, `disc'(0) = v / kappa`.
#[derive(Clone, Debug)]
pub struct ExtremalDisc {
    pub disc: HoloMap,
    pub kappa: f64,
}

pub fn extremal_disc(d: &Domain, p: &CVec, v: &CVec) -> Result<ExtremalDisc> {
    let kappa = model_kappa(d, p, v)?;
    if !(kappa > 0.0) {
        return Err(Error::DegenerateDirection("zero tangent vector".into()));
    }
    let mut comps = Vec::with_capacity(d.dim());
    let mut off = 0;
    for (a, q) in d.split(p) {
        let n = a.dim();
        let w = &v[off..off + n];
        let ka = a.kappa(q, w);
        if a == Atom::Plane {
            comps.extend(a.extremal(q, w, kappa));
        } else if ka == 0.0 {
            comps.extend(q.iter().map(|z| HoloExpr::constant(*z)));
        } else {
            let scale = HoloExpr::real(ka / kappa) * HoloExpr::var(0);
            comps.extend(a.extremal(q, w, ka).iter().map(|c| c.substitute(std::slice::from_ref(&scale))));
        }
        off += n;
    }
    Ok(ExtremalDisc {
        disc: HoloMap::new(1, comps)?,
        kappa,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kappa_examples() {
        let one = CVec::from_reals(&[1.0]);
        assert_eq!(model_kappa(&Domain::disc(), &CVec::from_reals(&[0.0]), &one).unwrap(), 1.0);
        let b = model_kappa(&Domain::ball(2), &CVec::from_reals(&[0.0, 0.0]), &CVec::from_reals(&[1.0, 0.0])).unwrap();
        assert_eq!(b, 1.0);
        let k = model_kappa(&Domain::punctured_disc(), &CVec::from_reals(&[(-1.0f64).exp()]), &one).unwrap();
        assert!((k - E / 2.0).abs() < 1e-14);
        let k = model_kappa(&Domain::ball(2), &CVec::from_reals(&[0.5, 0.0]), &CVec::from_reals(&[0.0, 1.0])).unwrap();
        assert!((k - 1.0 / 0.75f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn punctured_kappa_matches_half_plane_pushforward() {
        // w = e^{iζ}: dw = i w dζ, so the half-plane metric |dζ|/(2 Im ζ) pulls to |dw|/(2|w| log(1/|w|)).
        let zeta = c(0.7, 0.9);
        let w = (I * zeta).exp();
        let dw = I * w;
        let half = 1.0 / (2.0 * zeta.im);
        let k = model_kappa(&Domain::punctured_disc(), &CVec::new(vec![w]).unwrap(), &CVec::new(vec![dw]).unwrap()).unwrap();
        assert!((k - half).abs() < 1e-13);
    }

    #[test]
    fn dist_examples() {
        let d = model_dist(&Domain::disc(), &CVec::from_reals(&[0.0]), &CVec::from_reals(&[0.5])).unwrap();
        assert!((d - 0.5 * 3f64.ln()).abs() < 1e-15);
        let d = model_dist(&Domain::ball(2), &CVec::from_reals(&[0.0, 0.0]), &CVec::from_reals(&[0.5, 0.0])).unwrap();
        assert!((d - 0.5f64.atanh()).abs() < 1e-15);
        let p = CVec::from_pairs(&[(0.1, 0.2), (-0.3, 0.1)]);
        assert_eq!(model_dist(&Domain::ball(2), &p, &p).unwrap(), 0.0);
    }

    #[test]
    fn siegel_metric_is_cayley_invariant() {
        let x = CVec::from_pairs(&[(0.2, 0.1), (-0.3, 0.2)]);
        let y = CVec::from_pairs(&[(-0.4, 0.0), (0.1, 0.5)]);
        let cay = cayley_map(2);
        let (px, py) = (cay.eval(&x).unwrap(), cay.eval(&y).unwrap());
        let ds = model_dist(&Domain::Siegel { n: 2 }, &px, &py).unwrap();
        let db = model_dist(&Domain::ball(2), &x, &y).unwrap();
        assert!((ds - db).abs() < 1e-12);
        let v = CVec::from_pairs(&[(1.0, 0.5), (0.0, -1.0)]);
        let jv = CVec::new(cay.jacobian(&x).unwrap().mul_vec(&v)).unwrap();
        let ks = model_kappa(&Domain::Siegel { n: 2 }, &px, &jv).unwrap();
        let kb = model_kappa(&Domain::ball(2), &x, &v).unwrap();
        assert!((ks - kb).abs() < 1e-12);
    }

    #[test]
    fn half_plane_matches_disc_through_cayley() {
        // ζ -> i(1+ζ)/(1-ζ) maps the disc onto the upper half plane.
        let f = |z: C64| I * (1.0 + z) / (1.0 - z);
        let (a, b) = (c(0.3, -0.2), c(-0.5, 0.4));
        let dh = model_dist(&Domain::HalfPlane, &CVec::new(vec![f(a)]).unwrap(), &CVec::new(vec![f(b)]).unwrap()).unwrap();
        let dd = model_dist(&Domain::disc(), &CVec::new(vec![a]).unwrap(), &CVec::new(vec![b]).unwrap()).unwrap();
        assert!((dh - dd).abs() < 1e-13);
    }

    #[test]
    fn extremal_discs_realize_the_metric() {
        let cases = [
            (Domain::disc(), CVec::from_pairs(&[(0.3, -0.4)]), CVec::from_pairs(&[(1.0, 2.0)])),
            (Domain::punctured_disc(), CVec::from_pairs(&[(-0.2, 0.3)]), CVec::from_pairs(&[(0.5, -1.0)])),
            (Domain::ball(2), CVec::from_pairs(&[(0.3, 0.1), (-0.2, 0.4)]), CVec::from_pairs(&[(1.0, 0.0), (0.3, -0.7)])),
            (Domain::HalfPlane, CVec::from_pairs(&[(1.0, 0.3)]), CVec::from_pairs(&[(0.0, 1.0)])),
            (Domain::Siegel { n: 2 }, CVec::from_pairs(&[(1.0, 0.5), (0.2, 0.3)]), CVec::from_pairs(&[(1.0, 1.0), (0.0, 1.0)])),
            (
                Domain::product(vec![Domain::disc(), Domain::punctured_disc()]),
                CVec::from_pairs(&[(0.1, 0.0), (0.4, 0.2)]),
                CVec::from_pairs(&[(0.2, 0.0), (1.0, 1.0)]),
            ),
        ];
        for (d, p, v) in cases {
            let e = extremal_disc(&d, &p, &v).unwrap();
            let zero = [c(0.0, 0.0)];
            assert!(e.disc.eval(&zero).unwrap().dist(&p) < 1e-14, "{d:?}");
            let jac = e.disc.jacobian(&zero).unwrap();
            for i in 0..d.dim() {
                assert!((jac[(i, 0)] * e.kappa - v[i]).norm() < 1e-12, "{d:?}");
            }
            for k in 0..32 {
                let z = C64::from_polar(0.999, k as f64 * 0.196);
                assert!(d.contains(&e.disc.eval(&[z]).unwrap()).unwrap(), "{d:?}");
            }
        }
    }

    #[test]
    fn outside_points_are_domain_errors() {
        let e = model_kappa(&Domain::disc(), &CVec::from_reals(&[1.5]), &CVec::from_reals(&[1.0]));
        assert!(matches!(e, Err(Error::Domain { .. })));
    }
}

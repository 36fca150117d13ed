use super::Domain;
use crate::holoalg::{CVec, HoloExpr, HoloMap, C64};
use crate::{Error, Result};

/// One link of a disc chain: a holomorphic disc and the parameter at which
/// it hands over to the next link.
#[derive(Clone, Debug)]
pub struct ChainLink {
    pub disc: HoloMap,
    pub t: f64,
}

impl ChainLink {
    pub fn start(&self) -> Result<CVec> {
        self.disc.eval(&[C64::new(0.0, 0.0)])
    }

    pub fn end(&self) -> Result<CVec> {
        self.disc.eval(&[C64::new(self.t, 0.0)])
    }
}

/// Chain of holomorphic discs with `disc_j(t_j) = disc_{j+1}(0)`.
#[derive(Clone, Debug)]
pub struct Chain {
    pub links: Vec<ChainLink>,
}

impl Chain {
    /// `Σ arctanh t_j = ½ Σ log((1 + t_j)/(1 - t_j))`.
    pub fn length(&self) -> Result<f64> {
        self.links
            .iter()
            .map(|l| {
                if l.t > 0.0 && l.t < 1.0 {
                    Ok(l.t.atanh())
                } else {
                    Err(Error::ParamOutOfRange { t: l.t })
                }
            })
            .sum()
    }

    pub fn start(&self) -> Result<CVec> {
        self.links.first().ok_or_else(|| Error::DegenerateInput("empty chain".into()))?.start()
    }

    pub fn end(&self) -> Result<CVec> {
        self.links.last().ok_or_else(|| Error::DegenerateInput("empty chain".into()))?.end()
    }

    /// Largest joint mismatch `|disc_j(t_j) - disc_{j+1}(0)|`.
    pub fn joint_gap(&self) -> Result<f64> {
        let mut gap: f64 = 0.0;
        for w in self.links.windows(2) {
            gap = gap.max(w[0].end()?.dist(&w[1].start()?));
        }
        Ok(gap)
    }
}

/// `ζ -> tanh(α · arctanh ζ)`, a self-map of the disc for `α ∈ (0, 1]`.
fn tanh_power(alpha: f64) -> HoloExpr {
    let z = HoloExpr::var(0);
    let ratio = (HoloExpr::one() + z.clone()) / (HoloExpr::one() - z);
    let e = HoloExpr::exp(HoloExpr::real(alpha) * HoloExpr::log(ratio, 0));
    (e.clone() - HoloExpr::one()) / (e + HoloExpr::one())
}

/// Single-disc chain from `p` to `q` realizing the Kobayashi distance.
/// Factors closer than the maximal one are slowed down by
/// `ζ -> tanh(α arctanh ζ)` with `α = d_j / d_max`.
pub fn geodesic_chain(d: &Domain, p: &CVec, q: &CVec) -> Result<Chain> {
    let dmax = super::model_dist(d, p, q)?;
    let parts: Vec<_> = d
        .split(p)
        .into_iter()
        .zip(d.split(q))
        .map(|((a, x), (_, y))| (a.geodesic(x, y), x, y, a))
        .collect();
    let tmax = parts
        .iter()
        .filter_map(|(g, ..)| g.as_ref().map(|(_, t)| *t))
        .fold(0.0, f64::max);
    if !(dmax > 0.0) || tmax == 0.0 {
        return Err(Error::DegenerateInput("geodesic chain needs p != q".into()));
    }
    let dmax = tmax.atanh();
    let mut comps = Vec::with_capacity(d.dim());
    for (g, x, y, a) in parts {
        match g {
            None if a == super::Atom::Plane => comps.push(
                HoloExpr::constant(x[0]) + HoloExpr::constant((y[0] - x[0]) / tmax) * HoloExpr::var(0),
            ),
            None => comps.extend(x.iter().map(|z| HoloExpr::constant(*z))),
            Some((cs, t)) if t == tmax => comps.extend(cs),
            Some((cs, t)) => {
                let h = tanh_power(t.atanh() / dmax);
                comps.extend(cs.iter().map(|c| c.substitute(std::slice::from_ref(&h))));
            }
        }
    }
    Ok(Chain {
        links: vec![ChainLink {
            disc: HoloMap::new(1, comps)?,
            t: tmax,
        }],
    })
}

#[cfg(test)]
mod tests {
    use super::super::model_dist;
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn identity_disc_for_the_unit_disc() {
        let ch = geodesic_chain(&Domain::disc(), &CVec::from_reals(&[0.0]), &CVec::from_reals(&[0.5])).unwrap();
        assert_eq!(ch.links[0].t, 0.5);
        let z = c(0.3, -0.2);
        assert!((ch.links[0].disc.eval(&[z]).unwrap()[0] - z).norm() < 1e-15);
        assert!((ch.length().unwrap() - 0.5 * 3f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn linear_disc_through_ball_origin() {
        let ch = geodesic_chain(&Domain::ball(2), &CVec::from_reals(&[0.0, 0.0]), &CVec::from_reals(&[0.5, 0.0])).unwrap();
        let z = c(0.1, 0.7);
        let v = ch.links[0].disc.eval(&[z]).unwrap();
        assert!((v[0] - z).norm() < 1e-15 && v[1].norm() < 1e-15);
        assert!((ch.links[0].t - 0.5).abs() < 1e-15);
    }

    #[test]
    fn polydisc_reparameterizes_the_dominated_factor() {
        let d = Domain::Polydisc { radii: vec![1.0, 1.0] };
        let q = CVec::from_reals(&[0.5, 0.25]);
        let ch = geodesic_chain(&d, &CVec::from_reals(&[0.0, 0.0]), &q).unwrap();
        let alpha = 0.25f64.atanh() / 0.5f64.atanh();
        let z = c(0.2, 0.3);
        let v = ch.links[0].disc.eval(&[z]).unwrap();
        assert!((v[0] - z).norm() < 1e-15);
        assert!((v[1] - (z.atanh() * alpha).tanh()).norm() < 1e-14);
        assert!(ch.end().unwrap().dist(&q) < 1e-14);
        assert!((ch.length().unwrap() - 0.5f64.atanh()).abs() < 1e-15);
    }

    #[test]
    fn geodesics_hit_endpoints_in_all_domains() {
        let cases = [
            (Domain::ball(3), CVec::from_pairs(&[(0.2, 0.1), (0.0, -0.3), (0.1, 0.1)]), CVec::from_pairs(&[(-0.5, 0.2), (0.3, 0.3), (0.0, -0.1)])),
            (Domain::punctured_disc(), CVec::from_pairs(&[(0.5, 0.0)]), CVec::from_pairs(&[(-0.5, 0.01)])),
            (Domain::HalfPlane, CVec::from_pairs(&[(0.0, 1.0)]), CVec::from_pairs(&[(3.0, 0.2)])),
            (Domain::Siegel { n: 2 }, CVec::from_pairs(&[(1.0, 0.0), (0.0, 0.0)]), CVec::from_pairs(&[(2.0, 1.0), (0.5, -0.5)])),
            (
                Domain::product(vec![Domain::disc(), Domain::punctured_disc()]),
                CVec::from_pairs(&[(0.0, 0.0), (0.5, 0.0)]),
                CVec::from_pairs(&[(0.1, 0.0), (-0.5, 0.0)]),
            ),
            (
                Domain::product(vec![Domain::ball(2), Domain::Plane]),
                CVec::from_pairs(&[(0.1, 0.0), (0.2, 0.1), (3.0, 1.0)]),
                CVec::from_pairs(&[(-0.2, 0.3), (0.0, 0.1), (-1.0, 2.0)]),
            ),
            (
                Domain::Box {
                    center: Some(vec![(1.0, 1.0)]),
                    radii: vec![2.0],
                },
                CVec::from_pairs(&[(1.5, 1.0)]),
                CVec::from_pairs(&[(0.0, 0.5)]),
            ),
        ];
        for (d, p, q) in cases {
            let ch = geodesic_chain(&d, &p, &q).unwrap();
            assert!(ch.start().unwrap().dist(&p) < 1e-14, "{d:?}");
            assert!(ch.end().unwrap().dist(&q) < 1e-10, "{d:?}");
            assert!((ch.length().unwrap() - model_dist(&d, &p, &q).unwrap()).abs() < 1e-10, "{d:?}");
            for k in 0..64 {
                let z = C64::from_polar(1.0 - 1e-6, k as f64 * std::f64::consts::TAU / 64.0);
                assert!(d.contains(&ch.links[0].disc.eval(&[z]).unwrap()).unwrap(), "{d:?}");
            }
        }
    }

    #[test]
    fn coincident_points_rejected() {
        let p = CVec::from_reals(&[0.1]);
        assert!(matches!(geodesic_chain(&Domain::disc(), &p, &p), Err(Error::DegenerateInput(_))));
    }

    #[test]
    fn out_of_range_parameter() {
        let ch = Chain {
            links: vec![ChainLink {
                disc: HoloMap::identity(1),
                t: 1.0,
            }],
        };
        assert!(matches!(ch.length(), Err(Error::ParamOutOfRange { .. })));
    }
}

//! Model domains: membership, seeded sampling, canonical paths, and the
//! exact Kobayashi metric, distance and extremal discs.

mod chain;
mod metric;
mod sample;

pub use chain::{geodesic_chain, Chain, ChainLink};
pub use metric::{extremal_disc, model_dist, model_kappa, ExtremalDisc};
pub use sample::{halton, Sampler, SAMPLE_MARGIN};

use serde::{Deserialize, Serialize};

use crate::forms::Path;
use crate::holoalg::{CVec, HoloExpr, HoloMap, C64};
use crate::{Error, Result};

fn one() -> f64 {
    1.0
}

fn two() -> usize {
    2
}

/// Model domains. Products list their factors' coordinates in order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Domain {
    /// `|z| < r`.
    Disc {
        #[serde(default = "one")]
        radius: f64,
    },
    /// `0 < |z| < r`.
    PuncturedDisc {
        #[serde(default = "one")]
        radius: f64,
    },
    /// `|z_1|^2 + ... + |z_n|^2 < r^2`.
    Ball {
        #[serde(default = "two")]
        n: usize,
        #[serde(default = "one")]
        radius: f64,
    },
    Polydisc { radii: Vec<f64> },
    /// Upper half plane `Im z > 0`.
    HalfPlane,
    /// `Re z_1 > |z_2|^2 + ... + |z_n|^2`.
    Siegel {
        #[serde(default = "two")]
        n: usize,
    },
    Product { factors: Vec<Domain> },
    /// The whole complex line; used as the fiber of trivial bundles.
    Plane,
    /// `|z_i - c_i| < r_i` for every coordinate.
    Box {
        #[serde(default)]
        center: Option<Vec<(f64, f64)>>,
        radii: Vec<f64>,
    },
}

/// Irreducible factor of a domain; products and polydiscs flatten into these.
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Atom {
    Disc { center: C64, radius: f64 },
    Punctured { radius: f64 },
    Ball { n: usize, radius: f64 },
    HalfPlane,
    Siegel { n: usize },
    Plane,
}

impl Atom {
    pub(crate) fn dim(&self) -> usize {
        match self {
            Atom::Disc { .. } | Atom::Punctured { .. } | Atom::HalfPlane | Atom::Plane => 1,
            Atom::Ball { n, .. } | Atom::Siegel { n } => *n,
        }
    }

    fn contains_margin(&self, p: &[C64], m: f64) -> bool {
        match self {
            Atom::Disc { center, radius } => (p[0] - center).norm() < radius - m,
            Atom::Punctured { radius } => {
                let r = p[0].norm();
                r > m && r < radius - m
            }
            Atom::Ball { radius, .. } => {
                let r2: f64 = p.iter().map(|z| z.norm_sqr()).sum();
                r2.sqrt() < radius - m
            }
            Atom::HalfPlane => p[0].im > m,
            Atom::Siegel { .. } => {
                let s: f64 = p[1..].iter().map(|z| z.norm_sqr()).sum();
                p[0].re - s > m
            }
            Atom::Plane => p[0].is_finite(),
        }
    }

    pub(crate) fn basepoint(&self) -> Vec<C64> {
        let zero = C64::new(0.0, 0.0);
        match self {
            Atom::Disc { center, .. } => vec![*center],
            Atom::Punctured { radius } => vec![C64::new(radius / 2.0, 0.0)],
            Atom::Ball { n, .. } => vec![zero; *n],
            Atom::HalfPlane => vec![C64::new(0.0, 1.0)],
            Atom::Plane => vec![zero],
            Atom::Siegel { n } => {
                let mut v = vec![zero; *n];
                v[0] = C64::new(1.0, 0.0);
                v
            }
        }
    }

    fn is_star_shaped_about_basepoint(&self) -> bool {
        !matches!(self, Atom::Punctured { .. })
    }
}

impl Domain {
    pub fn disc() -> Self {
        Domain::Disc { radius: 1.0 }
    }

    pub fn punctured_disc() -> Self {
        Domain::PuncturedDisc { radius: 1.0 }
    }

    pub fn ball(n: usize) -> Self {
        Domain::Ball { n, radius: 1.0 }
    }

    pub fn product(factors: Vec<Domain>) -> Self {
        Domain::Product { factors }
    }

    pub(crate) fn atoms(&self) -> Vec<Atom> {
        match self {
            Domain::Disc { radius } => vec![Atom::Disc {
                center: C64::new(0.0, 0.0),
                radius: *radius,
            }],
            Domain::PuncturedDisc { radius } => vec![Atom::Punctured { radius: *radius }],
            Domain::Ball { n, radius } => vec![Atom::Ball { n: *n, radius: *radius }],
            Domain::Polydisc { radii } => radii
                .iter()
                .map(|&r| Atom::Disc {
                    center: C64::new(0.0, 0.0),
                    radius: r,
                })
                .collect(),
            Domain::HalfPlane => vec![Atom::HalfPlane],
            Domain::Siegel { n } => vec![Atom::Siegel { n: *n }],
            Domain::Plane => vec![Atom::Plane],
            Domain::Product { factors } => factors.iter().flat_map(Domain::atoms).collect(),
            Domain::Box { center, radii } => radii
                .iter()
                .enumerate()
                .map(|(i, &r)| Atom::Disc {
                    center: center
                        .as_ref()
                        .and_then(|c| c.get(i))
                        .map_or(C64::new(0.0, 0.0), |&(re, im)| C64::new(re, im)),
                    radius: r,
                })
                .collect(),
        }
    }

    /// Checks the structural invariants (positive radii, dimensions).
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(format!("invalid domain: {m}")));
        match self {
            Domain::Disc { radius } | Domain::PuncturedDisc { radius } if *radius <= 0.0 => bad("radius must be positive"),
            Domain::Ball { n, radius } if *n == 0 || *radius <= 0.0 => bad("ball needs n >= 1 and a positive radius"),
            Domain::Polydisc { radii } if radii.is_empty() || radii.iter().any(|r| *r <= 0.0) => bad("polydisc radii must be positive"),
            Domain::Siegel { n } if *n == 0 => bad("Siegel domain needs n >= 1"),
            Domain::Product { factors } if factors.is_empty() => bad("empty product"),
            Domain::Product { factors } => factors.iter().try_for_each(Domain::validate),
            Domain::Box { center, radii } => {
                if radii.is_empty() || radii.iter().any(|r| *r <= 0.0) {
                    return bad("box radii must be positive");
                }
                if center.as_ref().is_some_and(|c| c.len() != radii.len()) {
                    return bad("box center and radii differ in length");
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        self.atoms().iter().map(Atom::dim).sum()
    }

    pub(crate) fn split<'a>(&self, p: &'a [C64]) -> Vec<(Atom, &'a [C64])> {
        let mut out = Vec::new();
        let mut off = 0;
        for a in self.atoms() {
            let d = a.dim();
            out.push((a, &p[off..off + d]));
            off += d;
        }
        out
    }

    fn check_dim(&self, p: &[C64]) -> Result<()> {
        if p.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: p.len(),
            });
        }
        Ok(())
    }

    /// Strict interior membership.
    pub fn contains(&self, p: &[C64]) -> Result<bool> {
        self.check_dim(p)?;
        Ok(self.contains_with_margin(p, 0.0))
    }

    /// Membership in the domain shrunk by `margin` (per factor).
    pub fn contains_with_margin(&self, p: &[C64], margin: f64) -> bool {
        p.len() == self.dim() && self.split(p).iter().all(|(a, q)| a.contains_margin(q, margin))
    }

    /// Canonical basepoint: centers of discs, balls and boxes, `r/2` on
    /// punctured discs, `i` on the half plane and `(1, 0, ...)` on Siegel
    /// domains.
    pub fn basepoint(&self) -> CVec {
        CVec::new(self.atoms().iter().flat_map(Atom::basepoint).collect()).expect("finite basepoint")
    }

    pub fn is_star_shaped(&self) -> bool {
        self.atoms().iter().all(Atom::is_star_shaped_about_basepoint)
    }

    /// Path from the basepoint to `p`, moving one factor at a time: straight
    /// segments in convex factors, a zero-winding logarithmic spiral in
    /// punctured discs.
    pub fn canonical_path(&self, p: &CVec) -> Result<Path> {
        self.check_dim(p)?;
        let mut cur = self.basepoint();
        let mut pieces: Vec<Path> = Vec::new();
        let mut off = 0;
        for a in self.atoms() {
            let d = a.dim();
            let mut next = cur.clone().into_vec();
            next[off..off + d].copy_from_slice(&p[off..off + d]);
            let next = CVec::new(next)?;
            if next.dist(&cur) > 0.0 {
                let piece = match a {
                    Atom::Punctured { .. } => Path::spiral(&cur, off, p[off])?,
                    _ => Path::line(&cur, &next)?,
                };
                pieces.push(piece);
            }
            cur = next;
            off += d;
        }
        let mut it = pieces.into_iter();
        match it.next() {
            None => Path::line(&cur, &cur),
            Some(first) => it.try_fold(first, |acc, piece| acc.concat(&piece)),
        }
    }

    /// Seeded interior points; see [`Sampler`].
    pub fn sample(&self, seed: u64, count: usize) -> Vec<CVec> {
        Sampler { seed, count }.points(self)
    }
}

/// Cayley map `B^n -> Siegel(n)`:
/// `z -> ((1 + z_1)/(1 - z_1), z_2/(1 - z_1), ..., z_n/(1 - z_1))`.
pub fn cayley_map(n: usize) -> HoloMap {
    let z1 = HoloExpr::var(0);
    let den = HoloExpr::one() - z1.clone();
    let mut comps = vec![(HoloExpr::one() + z1) / den.clone()];
    for k in 1..n {
        comps.push(HoloExpr::var(k) / den.clone());
    }
    HoloMap::new(n, comps).expect("cayley arity")
}

/// Inverse Cayley map `Siegel(n) -> B^n`.
pub fn inverse_cayley_map(n: usize) -> HoloMap {
    let z1 = HoloExpr::var(0);
    let den = z1.clone() + HoloExpr::one();
    let mut comps = vec![(z1 - HoloExpr::one()) / den.clone()];
    for k in 1..n {
        comps.push(HoloExpr::real(2.0) * HoloExpr::var(k) / den.clone());
    }
    HoloMap::new(n, comps).expect("cayley arity")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn membership_examples() {
        assert!(Domain::ball(2).contains(&[c(0.5, 0.0), c(0.5, 0.0)]).unwrap());
        assert!(!Domain::punctured_disc().contains(&[c(0.0, 0.0)]).unwrap());
        assert!(Domain::Siegel { n: 2 }.contains(&[c(1.0, 0.0), c(0.5, 0.0)]).unwrap());
        assert!(!Domain::Siegel { n: 2 }.contains(&[c(0.2, 0.0), c(0.5, 0.0)]).unwrap());
        assert!(Domain::HalfPlane.contains(&[c(-3.0, 0.1)]).unwrap());
        assert!(matches!(Domain::disc().contains(&[c(0.0, 0.0), c(0.0, 0.0)]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn product_flattens_in_order() {
        let d = Domain::product(vec![Domain::disc(), Domain::punctured_disc()]);
        assert_eq!(d.dim(), 2);
        assert!(d.contains(&[c(0.0, 0.0), c(0.5, 0.0)]).unwrap());
        assert!(!d.contains(&[c(0.5, 0.0), c(0.0, 0.0)]).unwrap());
        assert_eq!(d.basepoint(), CVec::from_reals(&[0.0, 0.5]));
    }

    #[test]
    fn box_with_center() {
        let b = Domain::Box {
            center: Some(vec![(1.0, 0.0), (0.0, 0.0)]),
            radii: vec![0.5, 2.0],
        };
        assert!(b.contains(&[c(1.2, 0.0), c(0.0, 1.5)]).unwrap());
        assert!(!b.contains(&[c(0.4, 0.0), c(0.0, 0.0)]).unwrap());
    }

    #[test]
    fn cayley_maps_ball_into_siegel_and_back() {
        let fwd = cayley_map(2);
        let back = inverse_cayley_map(2);
        let p = [c(0.3, -0.2), c(0.1, 0.6)];
        let q = fwd.eval(&p).unwrap();
        assert!(Domain::Siegel { n: 2 }.contains(&q).unwrap());
        let r = back.eval(&q).unwrap();
        assert!(r.dist(&CVec::new(p.to_vec()).unwrap()) < 1e-15);
    }

    #[test]
    fn canonical_path_spirals_in_punctured_factor() {
        let d = Domain::product(vec![Domain::disc(), Domain::punctured_disc()]);
        let p = CVec::from_pairs(&[(0.3, 0.1), (-0.4, -0.05)]);
        let path = d.canonical_path(&p).unwrap();
        assert_eq!(path.segments().len(), 2);
        assert!(path.end().unwrap().dist(&p) < 1e-15);
        for k in 0..=50 {
            let q = path.eval(k as f64 / 50.0).unwrap();
            assert!(d.contains(&q).unwrap());
        }
    }

    #[test]
    fn domain_spec_deserializes() {
        #[derive(Deserialize)]
        struct W {
            domain: Domain,
        }
        let w: W = toml::from_str(r#"domain = { kind = "product", factors = [{kind="disc"},{kind="punctured_disc"}] }"#).unwrap();
        assert_eq!(w.domain, Domain::product(vec![Domain::disc(), Domain::punctured_disc()]));
        let w: W = toml::from_str(r#"domain = { kind = "ball" }"#).unwrap();
        assert_eq!(w.domain, Domain::ball(2));
    }
}

use std::f64::consts::{PI, TAU};

use super::Lift;
use crate::domains::Chain;
use crate::forms::{integrate, DiffForm};
use crate::holoalg::{format_point, CVec, HoloMap, C64};
use crate::{par, Error, Result};

/// Quadrature budget for fiber integrals.
const FIBER_TOL: f64 = 1e-13;
/// Trapezoidal nodes for Cauchy-integral derivatives.
const CAUCHY_NODES: usize = 32;

/// `count` deterministic points of the disc `|ζ| <= 0.9` on a golden-angle
/// spiral.
pub fn disc_params(count: usize) -> Vec<C64> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|k| C64::from_polar(0.9 * ((k as f64 + 0.5) / count as f64).sqrt(), k as f64 * golden))
        .collect()
}

/// Derivative of a holomorphic function of one variable from its values on
/// the circle `|w − ζ| = ρ`.
pub(crate) fn cauchy_derivative(f: impl Fn(C64) -> Result<C64> + Sync + Send, z: C64, rho: f64) -> Result<C64> {
    let vals = par::map_range(CAUCHY_NODES, |k| {
        let e = C64::from_polar(1.0, TAU * k as f64 / CAUCHY_NODES as f64);
        f(z + e * rho).map(|v| v * e.conj())
    });
    let mut acc = C64::new(0.0, 0.0);
    for v in vals {
        acc += v?;
    }
    Ok(acc / (CAUCHY_NODES as f64 * rho))
}

/// Legendrian lift `ζ -> (φ(ζ), y(ζ))` of a base disc, with
/// `y(ζ) = y0 + ∫_0^ζ (ν + θ)_{φ}(φ')` along the radius.
#[derive(Clone, Debug)]
pub struct LiftedDisc {
    base: HoloMap,
    y0: C64,
    connection: DiffForm,
    certificate: f64,
}

impl LiftedDisc {
    pub fn base(&self) -> &HoloMap {
        &self.base
    }

    pub fn y0(&self) -> C64 {
        self.y0
    }

    /// `max |ξ(φ', y')|` at [`disc_params`]`(64)`, with `y'` recovered from
    /// the computed fiber values by Cauchy integrals.
    pub fn certificate(&self) -> f64 {
        self.certificate
    }

    fn integrand(&self, z: C64) -> Result<C64> {
        let p = self.base.eval(&[z])?;
        let v = self.base.jacobian(&[z])?.column(0);
        self.connection.pair_at(&p, &v)
    }

    pub fn fiber(&self, z: C64) -> Result<C64> {
        if z.norm_sqr() == 0.0 {
            return Ok(self.y0);
        }
        let q = integrate(|s| Ok(self.integrand(z * s)? * z), 0.0, 1.0, FIBER_TOL)?;
        Ok(self.y0 + q.value)
    }

    pub fn eval(&self, z: C64) -> Result<CVec> {
        Ok(self.base.eval(&[z])?.push(self.fiber(z)?))
    }

    /// Exact tangent `(φ'(ζ), (ν + θ)(φ'(ζ)))`.
    pub fn tangent(&self, z: C64) -> Result<CVec> {
        let v = CVec::new(self.base.jacobian(&[z])?.column(0))?;
        let a = self.integrand(z)?;
        Ok(v.push(a))
    }

    /// `y'(ζ)` from the fiber values alone.
    pub fn cauchy_fiber_derivative(&self, z: C64) -> Result<C64> {
        let rho = (0.25 * (1.0 - z.norm())).min(0.1);
        cauchy_derivative(|w| self.fiber(w), z, rho)
    }

    /// `max |ξ(φ'(ζ), y'(ζ))|` over `params`, with `y'` from Cauchy integrals.
    pub fn legendrian_residual(&self, xi: &DiffForm, params: &[C64]) -> Result<f64> {
        let vals = par::try_map(params, |z| -> Result<f64> {
            let p = self.eval(*z)?;
            let v = CVec::new(self.base.jacobian(&[*z])?.column(0))?.push(self.cauchy_fiber_derivative(*z)?);
            Ok(xi.pair_at(&p, &v)?.norm())
        })?;
        Ok(par::max_in_order(vals))
    }
}

/// Lifts `φ: 𝔻 -> S` through `y(0) = y0`. The image is checked at
/// [`disc_params`]`(64)` and on the circle `|ζ| = 0.99`.
pub fn lift_disc(lift: &Lift, phi: &HoloMap, y0: C64) -> Result<LiftedDisc> {
    if phi.arity() != 1 || phi.target_dim() != lift.base_dim() {
        return Err(Error::DimensionMismatch {
            expected: lift.base_dim(),
            found: phi.target_dim(),
        });
    }
    let params = disc_params(64);
    let ring: Vec<C64> = (0..32).map(|k| C64::from_polar(0.99, TAU * k as f64 / 32.0)).collect();
    for z in params.iter().chain(&ring) {
        let p = phi.eval(&[*z])?;
        if !lift.base().domain.contains_with_margin(&p, 0.0) {
            return Err(Error::ImageEscapesDomain { point: format_point(&p) });
        }
    }
    let mut disc = LiftedDisc {
        base: phi.clone(),
        y0,
        connection: lift.connection(),
        certificate: 0.0,
    };
    disc.certificate = disc.legendrian_residual(lift.xi(), &params)?;
    Ok(disc)
}

#[derive(Clone, Debug)]
pub struct LiftedLink {
    pub disc: LiftedDisc,
    pub t: f64,
}

/// Chain of Legendrian discs in the total space.
#[derive(Clone, Debug)]
pub struct VChain {
    pub links: Vec<LiftedLink>,
    pub start: CVec,
    pub end: CVec,
}

impl VChain {
    pub fn params(&self) -> Vec<f64> {
        self.links.iter().map(|l| l.t).collect()
    }

    /// Largest joint mismatch `|φ_j(t_j) − φ_{j+1}(0)|` in the total space.
    pub fn joint_gap(&self) -> Result<f64> {
        let mut gap: f64 = 0.0;
        for w in self.links.windows(2) {
            let a = w[0].disc.eval(C64::new(w[0].t, 0.0))?;
            let b = w[1].disc.eval(C64::new(0.0, 0.0))?;
            gap = gap.max(a.dist(&b));
        }
        Ok(gap)
    }

    pub fn max_certificate(&self) -> f64 {
        par::max_in_order(self.links.iter().map(|l| l.disc.certificate()))
    }
}

/// Lifts every disc of `chain`, each starting at the fiber value where the
/// previous one ended.
pub fn lift_chain(lift: &Lift, chain: &Chain, start_y: C64) -> Result<VChain> {
    let mut y = start_y;
    let mut links = Vec::with_capacity(chain.links.len());
    for link in &chain.links {
        let disc = lift_disc(lift, &link.disc, y)?;
        y = disc.fiber(C64::new(link.t, 0.0))?;
        links.push(LiftedLink { disc, t: link.t });
    }
    let start = chain.start()?.push(start_y);
    let end = chain.end()?.push(y);
    Ok(VChain { links, start, end })
}

use std::collections::BTreeMap;

use serde::Serialize;

use crate::contact::SampleFailure;
use crate::domains::Domain;
use crate::forms::DiffForm;
use crate::holoalg::{CVec, HoloExpr, C64};
use crate::{par, Error, Result};

/// Angular sector `|arg(z_coord) − center| < half_width` (mod 2π).
#[derive(Clone, Debug, PartialEq)]
pub struct Sector {
    pub coord: usize,
    pub center: f64,
    pub half_width: f64,
}

impl Sector {
    pub fn contains(&self, p: &[C64]) -> bool {
        let z = p[self.coord];
        if z.norm_sqr() == 0.0 {
            return false;
        }
        let d = (z * C64::from_polar(1.0, -self.center)).arg();
        d.abs() < self.half_width
    }
}

/// Chart of a Čech atlas: a local potential on a region of the base.
#[derive(Clone, Debug)]
pub struct Chart {
    pub nu: DiffForm,
    pub region: Option<Sector>,
}

impl Chart {
    pub fn contains(&self, p: &[C64]) -> bool {
        self.region.as_ref().is_none_or(|r| r.contains(p))
    }
}

/// Local potentials `ν_α` with transition functions `f_αβ` satisfying
/// `df_αβ = ν_α − ν_β` and the cocycle identity on triple overlaps.
#[derive(Clone, Debug)]
pub struct CechAtlas {
    pub base: Domain,
    pub charts: Vec<Chart>,
    /// `f_αβ` for `α < β`; `f_βα = −f_αβ`.
    pub transitions: BTreeMap<(usize, usize), HoloExpr>,
    pub pair_samples: BTreeMap<(usize, usize), Vec<CVec>>,
    pub triple_samples: BTreeMap<(usize, usize, usize), Vec<CVec>>,
}

impl CechAtlas {
    /// Fills the overlap sample sets by filtering seeded base samples
    /// through the chart regions.
    pub fn sample_overlaps(&mut self, seed: u64, count: usize) {
        let pts = self.base.sample(seed, count);
        let k = self.charts.len();
        self.pair_samples.clear();
        self.triple_samples.clear();
        for a in 0..k {
            for b in a + 1..k {
                let both: Vec<CVec> = pts.iter().filter(|p| self.charts[a].contains(p) && self.charts[b].contains(p)).cloned().collect();
                self.pair_samples.insert((a, b), both);
                for c in b + 1..k {
                    let all: Vec<CVec> = pts
                        .iter()
                        .filter(|p| self.charts[a].contains(p) && self.charts[b].contains(p) && self.charts[c].contains(p))
                        .cloned()
                        .collect();
                    self.triple_samples.insert((a, b, c), all);
                }
            }
        }
    }

    fn transition(&self, a: usize, b: usize) -> Result<HoloExpr> {
        if a < b {
            self.transitions.get(&(a, b)).cloned()
        } else {
            self.transitions.get(&(b, a)).map(|f| -f.clone())
        }
        .ok_or_else(|| Error::UnknownName(format!("transition ({a}, {b})")))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AtlasReport {
    pub pass: bool,
    /// `max |f_αβ + f_βγ + f_γα|` on triple overlaps.
    pub cocycle_residual: f64,
    /// `max |df_αβ − (ν_α − ν_β)|` on pair overlaps.
    pub differential_residual: f64,
    pub failures: Vec<SampleFailure>,
}

pub fn validate_atlas(atlas: &CechAtlas, tol: f64) -> Result<AtlasReport> {
    let n = atlas.base.dim();
    let mut failures = Vec::new();
    let mut differential: f64 = 0.0;
    for (&(a, b), pts) in &atlas.pair_samples {
        let f = atlas.transition(a, b)?;
        let defect = DiffForm::exact(&f, n).sub(&atlas.charts[a].nu.sub(&atlas.charts[b].nu)?)?;
        for (p, r) in pts.iter().zip(par::map(pts, |p| defect.eval(p).map(|v| v.max_abs()))) {
            match r {
                Ok(r) => differential = par::max_in_order([differential, r]),
                Err(e) => failures.push(SampleFailure::new(p, &e)),
            }
        }
    }
    let mut cocycle: f64 = 0.0;
    for (&(a, b, c), pts) in &atlas.triple_samples {
        let sum = atlas.transition(a, b)? + atlas.transition(b, c)? + atlas.transition(c, a)?;
        for (p, r) in pts.iter().zip(par::map(pts, |p| sum.eval(p).map(|v| v.norm()))) {
            match r {
                Ok(r) => cocycle = par::max_in_order([cocycle, r]),
                Err(e) => failures.push(SampleFailure::new(p, &e)),
            }
        }
    }
    Ok(AtlasReport {
        pass: failures.is_empty() && cocycle < tol && differential < tol,
        cocycle_residual: cocycle,
        differential_residual: differential,
        failures,
    })
}

/// Three-sector cover of `𝔻 × 𝔻*` (sectors of half-width `3π/4` in `arg w`)
/// realizing the twisted lift `dy − (z − c/w) dw`: every chart carries
/// `ν = z dw` in the coordinate `y_k = y + c L_k(w)`, where `L_k` is the
/// logarithm continuous on sector `k`, so `f_jk = c (L_j − L_k)`.
pub fn sector_atlas(c: C64, seed: u64, count: usize) -> CechAtlas {
    use std::f64::consts::{PI, TAU};
    let nu = DiffForm::from_terms(2, 1, [(vec![1], HoloExpr::var(0))]).expect("potential");
    let centers: Vec<f64> = (0..3).map(|k| TAU * k as f64 / 3.0).collect();
    let charts = centers
        .iter()
        .map(|&center| Chart {
            nu: nu.clone(),
            region: Some(Sector {
                coord: 1,
                center,
                half_width: 0.75 * PI,
            }),
        })
        .collect();
    let log_k = |center: f64| {
        HoloExpr::log(HoloExpr::constant(C64::from_polar(1.0, -center)) * HoloExpr::var(1), 0) + HoloExpr::constant(C64::new(0.0, center))
    };
    let mut transitions = BTreeMap::new();
    for a in 0..3 {
        for b in a + 1..3 {
            transitions.insert((a, b), HoloExpr::constant(c) * (log_k(centers[a]) - log_k(centers[b])));
        }
    }
    let mut atlas = CechAtlas {
        base: Domain::product(vec![Domain::disc(), Domain::punctured_disc()]),
        charts,
        transitions,
        pair_samples: BTreeMap::new(),
        triple_samples: BTreeMap::new(),
    };
    atlas.sample_overlaps(seed, count);
    atlas
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sector_cover_is_a_cocycle() {
        let a = sector_atlas(C64::new(1.0, 0.0), 3, 400);
        assert!(a.triple_samples.values().any(|v| !v.is_empty()));
        assert!(a.pair_samples.values().all(|v| !v.is_empty()));
        let r = validate_atlas(&a, 1e-10).unwrap();
        assert!(r.pass && r.cocycle_residual < 1e-10 && r.differential_residual < 1e-10, "{r:?}");
    }

    #[test]
    fn single_chart_is_vacuous() {
        let a = CechAtlas {
            base: Domain::disc(),
            charts: vec![Chart {
                nu: DiffForm::zero(1, 1),
                region: None,
            }],
            transitions: BTreeMap::new(),
            pair_samples: BTreeMap::new(),
            triple_samples: BTreeMap::new(),
        };
        assert!(validate_atlas(&a, 1e-10).unwrap().pass);
    }

    #[test]
    fn perturbed_transition_fails() {
        let mut a = sector_atlas(C64::new(1.0, 0.0), 3, 400);
        let f = a.transitions[&(0, 1)].clone() + HoloExpr::var(0);
        a.transitions.insert((0, 1), f);
        let r = validate_atlas(&a, 1e-10).unwrap();
        assert!(!r.pass);
        assert!((r.differential_residual - 1.0).abs() < 1e-12);
    }
}

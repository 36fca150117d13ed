use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Atom, Domain};
use crate::holoalg::{CVec, C64};

/// Minimum distance from the boundary of every sampled point.
pub const SAMPLE_MARGIN: f64 = 1e-6;

const PRIMES: [u64; 24] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89];

/// Radical inverse of `i` in base `b`.
pub fn halton(mut i: u64, b: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Deterministic interior sampler: a Halton sequence with a seeded
/// Cranley–Patterson rotation, mapped into each factor's bounding box and
/// rejected unless it lies at least [`SAMPLE_MARGIN`] inside the domain.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampler {
    pub seed: u64,
    pub count: usize,
}

fn unit_disc(u: f64, v: f64) -> Option<C64> {
    let z = C64::new(2.0 * u - 1.0, 2.0 * v - 1.0);
    (z.norm() < 1.0).then_some(z)
}

fn atom_point(a: &Atom, u: &[f64]) -> Option<Vec<C64>> {
    match a {
        Atom::Disc { center, radius } => Some(vec![center + unit_disc(u[0], u[1])? * *radius]),
        Atom::Punctured { radius } => Some(vec![unit_disc(u[0], u[1])? * *radius]),
        Atom::Plane => Some(vec![unit_disc(u[0], u[1])?]),
        Atom::Ball { n, radius } => {
            let v: Vec<C64> = (0..*n).map(|k| C64::new(2.0 * u[2 * k] - 1.0, 2.0 * u[2 * k + 1] - 1.0)).collect();
            let r2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            (r2 < 1.0).then(|| v.into_iter().map(|z| z * *radius).collect())
        }
        Atom::HalfPlane => {
            let d = unit_disc(u[0], u[1])?;
            Some(vec![C64::new(0.0, 1.0) * (1.0 + d) / (1.0 - d)])
        }
        Atom::Siegel { n } => {
            let ball = atom_point(&Atom::Ball { n: *n, radius: 1.0 }, u)?;
            let den = C64::new(1.0, 0.0) - ball[0];
            let mut out = vec![(C64::new(1.0, 0.0) + ball[0]) / den];
            out.extend(ball[1..].iter().map(|z| z / den));
            Some(out)
        }
    }
}

impl Sampler {
    pub fn points(&self, domain: &Domain) -> Vec<CVec> {
        let atoms = domain.atoms();
        let dims = 2 * domain.dim();
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
        let mut out = Vec::with_capacity(self.count);
        let mut i: u64 = 1;
        let limit = 10_000 * (self.count as u64 + 1);
        while out.len() < self.count && i < limit {
            let u: Vec<f64> = (0..dims)
                .map(|d| {
                    let base = PRIMES[d % PRIMES.len()];
                    // reuse of a base for very high dimensions is offset by the index
                    let idx = i + (d / PRIMES.len()) as u64 * 7919;
                    (halton(idx, base) + shift[d]).fract()
                })
                .collect();
            i += 1;
            let mut off = 0;
            let mut point = Vec::with_capacity(domain.dim());
            let mut ok = true;
            for a in &atoms {
                let d = a.dim();
                match atom_point(a, &u[2 * off..2 * (off + d)]) {
                    Some(p) => point.extend(p),
                    None => {
                        ok = false;
                        break;
                    }
                }
                off += d;
            }
            if ok && domain.contains_with_margin(&point, SAMPLE_MARGIN) {
                if let Ok(p) = CVec::new(point) {
                    out.push(p);
                }
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radical_inverse() {
        assert_eq!(halton(1, 2), 0.5);
        assert_eq!(halton(3, 2), 0.75);
        assert!((halton(5, 3) - (2.0 / 3.0 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn deterministic_and_inside() {
        let domains = [
            Domain::ball(2),
            Domain::product(vec![Domain::disc(), Domain::punctured_disc()]),
            Domain::Siegel { n: 2 },
            Domain::HalfPlane,
            Domain::product(vec![Domain::disc(), Domain::Plane]),
            Domain::Polydisc { radii: vec![1.0, 2.0] },
            Domain::product(vec![Domain::ball(2), Domain::Disc { radius: 1.0 }]),
        ];
        for d in &domains {
            let a = d.sample(7, 50);
            let b = d.sample(7, 50);
            assert_eq!(a, b);
            assert_eq!(a.len(), 50);
            assert!(a.iter().all(|p| d.contains_with_margin(p, SAMPLE_MARGIN)));
            assert_ne!(a, d.sample(8, 50));
        }
    }
}

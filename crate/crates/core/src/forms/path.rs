use std::f64::consts::PI;

use crate::holoalg::{CVec, HoloExpr, HoloMap, C64};
use crate::{Error, Result};

const JOINT_TOL: f64 = 1e-12;

/// One smooth piece `t -> gamma(t)`, `t in [0, 1]`, written as a holomorphic
/// map of one variable restricted to the real segment.
#[derive(Clone, Debug, PartialEq)]
pub struct PathSegment {
    map: HoloMap,
    velocity: Vec<HoloExpr>,
}

impl PathSegment {
    pub fn new(map: HoloMap) -> Result<Self> {
        if map.arity() != 1 {
            return Err(Error::ArityMismatch {
                name: "path segment".into(),
                expected: 1,
                found: map.arity(),
            });
        }
        let velocity = map.components().iter().map(|c| c.derive(0)).collect();
        Ok(PathSegment { map, velocity })
    }

    pub fn map(&self) -> &HoloMap {
        &self.map
    }

    pub fn dim(&self) -> usize {
        self.map.target_dim()
    }

    pub fn eval(&self, t: f64) -> Result<CVec> {
        self.map.eval(&[C64::new(t, 0.0)])
    }

    pub fn velocity(&self, t: f64) -> Result<CVec> {
        let p = [C64::new(t, 0.0)];
        CVec::new(self.velocity.iter().map(|e| e.eval(&p)).collect::<Result<Vec<_>>>()?)
    }

    pub fn point_and_velocity(&self, t: f64) -> Result<(CVec, CVec)> {
        Ok((self.eval(t)?, self.velocity(t)?))
    }

    pub fn start(&self) -> Result<CVec> {
        self.eval(0.0)
    }

    pub fn end(&self) -> Result<CVec> {
        self.eval(1.0)
    }

    /// Same image traversed backwards.
    pub fn reversed(&self) -> Self {
        let s = HoloExpr::one() - HoloExpr::var(0);
        let comps = self.map.components().iter().map(|c| c.substitute(std::slice::from_ref(&s))).collect();
        PathSegment::new(HoloMap::new(1, comps).expect("arity preserved")).expect("arity 1")
    }
}

/// Piecewise-holomorphic path; consecutive pieces join to `1e-12`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path {
    segments: Vec<PathSegment>,
}

impl Path {
    pub fn new(segments: Vec<PathSegment>) -> Result<Self> {
        if segments.is_empty() {
            return Err(Error::DegenerateInput("path without segments".into()));
        }
        let n = segments[0].dim();
        for w in segments.windows(2) {
            if w[1].dim() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: w[1].dim(),
                });
            }
            let a = w[0].end()?;
            let b = w[1].start()?;
            if a.dist(&b) > JOINT_TOL * (1.0 + a.norm()) {
                return Err(Error::DegenerateInput(format!("path pieces do not join: {a} vs {b}")));
            }
        }
        Ok(Path { segments })
    }

    pub fn segments(&self) -> &[PathSegment] {
        &self.segments
    }

    pub fn dim(&self) -> usize {
        self.segments[0].dim()
    }

    /// Straight segment `a -> b`.
    pub fn line(a: &CVec, b: &CVec) -> Result<Self> {
        Ok(Path::new(vec![line_segment(a, b)?])?)
    }

    /// Polyline through the given vertices.
    pub fn polyline(points: &[CVec]) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::DegenerateInput("polyline needs two points".into()));
        }
        Path::new(points.windows(2).map(|w| line_segment(&w[0], &w[1])).collect::<Result<_>>()?)
    }

    /// Counterclockwise circle `base[coord] + r e^{2 pi i t}`, other
    /// coordinates held at `base`.
    pub fn circle(base: &CVec, coord: usize, radius: f64) -> Result<Self> {
        if coord >= base.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                found: coord + 1,
            });
        }
        if radius <= 0.0 {
            return Err(Error::DegenerateInput("circle radius must be positive".into()));
        }
        let t = HoloExpr::var(0);
        let comps = base
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                if i == coord {
                    HoloExpr::constant(b)
                        + HoloExpr::real(radius) * HoloExpr::exp(HoloExpr::constant(C64::new(0.0, 2.0 * PI)) * t.clone())
                } else {
                    HoloExpr::constant(b)
                }
            })
            .collect();
        Path::new(vec![PathSegment::new(HoloMap::new(1, comps)?)?])
    }

    /// Logarithmic spiral moving coordinate `coord` from `from[coord]` to
    /// `to_value` with winding number zero (principal logarithm of the
    /// ratio); both values must be nonzero.
    pub fn spiral(from: &CVec, coord: usize, to_value: C64) -> Result<Self> {
        let a = from[coord];
        if a.norm_sqr() == 0.0 || to_value.norm_sqr() == 0.0 {
            return Err(Error::DegenerateInput("spiral through the origin".into()));
        }
        let l = (to_value / a).ln();
        let t = HoloExpr::var(0);
        let comps = from
            .iter()
            .enumerate()
            .map(|(i, &b)| {
                if i == coord {
                    HoloExpr::constant(a) * HoloExpr::exp(HoloExpr::constant(l) * t.clone())
                } else {
                    HoloExpr::constant(b)
                }
            })
            .collect();
        Path::new(vec![PathSegment::new(HoloMap::new(1, comps)?)?])
    }

    pub fn concat(&self, other: &Path) -> Result<Path> {
        Path::new(self.segments.iter().chain(&other.segments).cloned().collect())
    }

    pub fn reversed(&self) -> Path {
        Path {
            segments: self.segments.iter().rev().map(PathSegment::reversed).collect(),
        }
    }

    pub fn start(&self) -> Result<CVec> {
        self.segments[0].start()
    }

    pub fn end(&self) -> Result<CVec> {
        self.segments.last().expect("nonempty").end()
    }

    /// Point at global parameter `s in [0, 1]`, pieces sharing it equally.
    pub fn eval(&self, s: f64) -> Result<CVec> {
        let m = self.segments.len();
        let x = s.clamp(0.0, 1.0) * m as f64;
        let i = (x.floor() as usize).min(m - 1);
        self.segments[i].eval(x - i as f64)
    }
}

fn line_segment(a: &CVec, b: &CVec) -> Result<PathSegment> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    let t = HoloExpr::var(0);
    let comps = a
        .iter()
        .zip(b.iter())
        .map(|(&x, &y)| {
            let d = y - x;
            if d.norm_sqr() == 0.0 {
                HoloExpr::constant(x)
            } else {
                HoloExpr::constant(x) + HoloExpr::constant(d) * t.clone()
            }
        })
        .collect();
    PathSegment::new(HoloMap::new(1, comps)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_is_closed_and_counterclockwise() {
        let c = Path::circle(&CVec::zeros(2), 1, 0.5).unwrap();
        let a = c.start().unwrap();
        let b = c.end().unwrap();
        assert!(a.dist(&b) < 1e-15);
        let quarter = c.segments()[0].eval(0.25).unwrap();
        assert!((quarter[1] - C64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn disjoint_pieces_are_rejected() {
        let a = line_segment(&CVec::from_reals(&[0.0]), &CVec::from_reals(&[1.0])).unwrap();
        let b = line_segment(&CVec::from_reals(&[2.0]), &CVec::from_reals(&[3.0])).unwrap();
        assert!(Path::new(vec![a, b]).is_err());
    }

    #[test]
    fn reversal_swaps_endpoints() {
        let p = Path::polyline(&[CVec::from_reals(&[0.0, 1.0]), CVec::from_reals(&[1.0, 1.0]), CVec::from_reals(&[1.0, 2.0])]).unwrap();
        let r = p.reversed();
        assert_eq!(r.start().unwrap(), p.end().unwrap());
        assert_eq!(r.end().unwrap(), p.start().unwrap());
    }

    #[test]
    fn spiral_has_zero_winding() {
        let from = CVec::from_reals(&[0.0, 0.5]);
        let s = Path::spiral(&from, 1, C64::new(-0.3, 0.01)).unwrap();
        assert!((s.end().unwrap()[1] - C64::new(-0.3, 0.01)).norm() < 1e-15);
        // the argument moves monotonically through the upper half plane
        assert!(s.segments()[0].eval(0.5).unwrap()[1].im > 0.0);
    }
}

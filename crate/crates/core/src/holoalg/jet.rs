use std::f64::consts::PI;

use super::{C64, I};

/// Truncated Taylor series `a_0 + a_1 t + ... + a_K t^K`.
///
/// All operations are exact on truncated series: coefficient `k` of a result
/// depends only on coefficients `0..=k` of the operands.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet {
    coeffs: Vec<C64>,
}

impl Jet {
    /// Builds a jet from its coefficients; the order is `coeffs.len() - 1`.
    pub fn new(coeffs: Vec<C64>) -> Self {
        assert!(coeffs.len() >= 2, "jet order must be at least 1");
        Jet { coeffs }
    }

    pub fn constant(c: C64, order: usize) -> Self {
        let mut coeffs = vec![C64::new(0.0, 0.0); order + 1];
        coeffs[0] = c;
        Jet { coeffs }
    }

    pub fn variable(at: C64, dir: C64, order: usize) -> Self {
        let mut j = Self::constant(at, order);
        j.coeffs[1] = dir;
        j
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn value(&self) -> C64 {
        self.coeffs[0]
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    fn zip(&self, other: &Jet, f: impl Fn(C64, C64) -> C64) -> Jet {
        debug_assert_eq!(self.order(), other.order());
        Jet {
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| f(*a, *b)).collect(),
        }
    }

    pub fn add(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Jet) -> Jet {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Jet {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn scale(&self, s: C64) -> Jet {
        Jet {
            coeffs: self.coeffs.iter().map(|a| a * s).collect(),
        }
    }

    pub fn mul(&self, other: &Jet) -> Jet {
        let k = self.order();
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().take(k + 1 - i).enumerate() {
                out[i + j] += a * b;
            }
        }
        Jet { coeffs: out }
    }

    /// Quotient; the caller guarantees `other.value() != 0`.
    pub fn div(&self, other: &Jet) -> Jet {
        let k = self.order();
        let b0 = other.coeffs[0];
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        for n in 0..=k {
            let mut acc = self.coeffs[n];
            for j in 1..=n {
                acc -= other.coeffs[j] * out[n - j];
            }
            out[n] = acc / b0;
        }
        Jet { coeffs: out }
    }

    pub fn powi(&self, k: i32) -> Jet {
        let one = Jet::constant(C64::new(1.0, 0.0), self.order());
        let mut base = self.clone();
        let mut acc = one.clone();
        let mut e = k.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        if k < 0 {
            one.div(&acc)
        } else {
            acc
        }
    }

    pub fn exp(&self) -> Jet {
        let k = self.order();
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        out[0] = self.coeffs[0].exp();
        for n in 1..=k {
            let mut acc = C64::new(0.0, 0.0);
            for j in 1..=n {
                acc += self.coeffs[j] * out[n - j] * j as f64;
            }
            out[n] = acc / n as f64;
        }
        Jet { coeffs: out }
    }

    /// Logarithm with branch offset; the caller guarantees `value() != 0`.
    pub fn log(&self, branch: i64) -> Jet {
        let k = self.order();
        let a0 = self.coeffs[0];
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        out[0] = a0.ln() + I * (2.0 * PI * branch as f64);
        for n in 1..=k {
            let mut acc = self.coeffs[n];
            for j in 1..n {
                acc -= out[j] * self.coeffs[n - j] * (j as f64 / n as f64);
            }
            out[n] = acc / a0;
        }
        Jet { coeffs: out }
    }

    /// Square root on the chosen sign; the caller guarantees `value() != 0`.
    pub fn sqrt(&self, negate: bool) -> Jet {
        let k = self.order();
        let mut out = vec![C64::new(0.0, 0.0); k + 1];
        let s0 = self.coeffs[0].sqrt();
        out[0] = if negate { -s0 } else { s0 };
        for n in 1..=k {
            let mut acc = self.coeffs[n];
            for j in 1..n {
                acc -= out[j] * out[n - j];
            }
            out[n] = acc / (out[0] * 2.0);
        }
        Jet { coeffs: out }
    }

    /// Jet of `f o g`, where `self` holds the Taylor coefficients of `f`
    /// about `g.value()` and `inner` is the jet of `g`.
    pub fn compose(&self, inner: &Jet) -> Jet {
        let k = inner.order();
        let mut shifted = inner.clone();
        shifted.coeffs[0] = C64::new(0.0, 0.0);
        let mut acc = Jet::constant(self.coeffs[self.order().min(k)], k);
        for n in (0..self.order().min(k)).rev() {
            acc = acc.mul(&shifted);
            acc.coeffs[0] += self.coeffs[n];
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Jet, b: &[C64], tol: f64) {
        for (x, y) in a.coeffs().iter().zip(b) {
            assert!((x - y).norm() < tol, "{x} vs {y}");
        }
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = Jet::new(vec![C64::new(1.0, 2.0), C64::new(0.5, 0.0), C64::new(-1.0, 0.3)]);
        let b = Jet::new(vec![C64::new(2.0, -1.0), C64::new(0.1, 0.2), C64::new(0.0, 1.0)]);
        close(&a.mul(&b).div(&b), a.coeffs(), 1e-14);
    }

    #[test]
    fn log_inverts_exp() {
        let a = Jet::new(vec![C64::new(0.2, 0.1), C64::new(1.0, 0.0), C64::new(0.3, 0.0), C64::new(0.0, -0.5)]);
        close(&a.exp().log(0), a.coeffs(), 1e-14);
    }

    #[test]
    fn sqrt_squares_back() {
        let a = Jet::new(vec![C64::new(4.0, 1.0), C64::new(1.0, 0.0), C64::new(0.3, 0.0), C64::new(0.0, -0.5)]);
        let s = a.sqrt(true);
        close(&s.mul(&s), a.coeffs(), 1e-13);
        assert!(s.value().re < 0.0);
    }

    #[test]
    fn negative_power_is_reciprocal() {
        let a = Jet::new(vec![C64::new(1.5, 0.0), C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
        let inv2 = a.powi(-2);
        close(&inv2.mul(&a).mul(&a), &[C64::new(1.0, 0.0), C64::new(0.0, 0.0), C64::new(0.0, 0.0)], 1e-14);
    }

    #[test]
    fn compose_exp_with_shifted_variable() {
        // exp(g) with g(t) = 1 + t; expansion of exp about 1 is e/k!
        let e = std::f64::consts::E;
        let outer = Jet::new(vec![C64::new(e, 0.0), C64::new(e, 0.0), C64::new(e / 2.0, 0.0), C64::new(e / 6.0, 0.0)]);
        let inner = Jet::variable(C64::new(1.0, 0.0), C64::new(1.0, 0.0), 3);
        close(&outer.compose(&inner), &inner.exp().coeffs().to_vec(), 1e-14);
    }
}

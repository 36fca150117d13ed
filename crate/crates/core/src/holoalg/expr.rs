use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{Jet, C64, I};
use crate::{Error, Result};

/// Expression tree for a holomorphic function of finitely many complex
/// variables.
///
/// Trees are immutable and share subtrees through `Arc`, so cloning is cheap
/// and values can be evaluated from several threads at once. The smart
/// constructors ([`HoloExpr::add`], [`HoloExpr::mul`], ...) fold constants and
/// drop additive/multiplicative identities; nothing else is simplified.
#[derive(Clone, Debug, PartialEq)]
pub enum HoloExpr {
    Const(C64),
    Var(usize),
    Add(Arc<HoloExpr>, Arc<HoloExpr>),
    Sub(Arc<HoloExpr>, Arc<HoloExpr>),
    Neg(Arc<HoloExpr>),
    Mul(Arc<HoloExpr>, Arc<HoloExpr>),
    Div(Arc<HoloExpr>, Arc<HoloExpr>),
    PowInt(Arc<HoloExpr>, i32),
    Exp(Arc<HoloExpr>),
    /// Principal logarithm plus `2 pi i * branch`.
    Log(Arc<HoloExpr>, i64),
    /// Principal square root, negated when the flag is set.
    Sqrt(Arc<HoloExpr>, bool),
}

use HoloExpr::*;

fn is_zero(e: &HoloExpr) -> bool {
    matches!(e, Const(c) if *c == C64::new(0.0, 0.0))
}

fn is_one(e: &HoloExpr) -> bool {
    matches!(e, Const(c) if *c == C64::new(1.0, 0.0))
}

impl HoloExpr {
    pub fn constant(c: C64) -> Self {
        Const(c)
    }

    pub fn real(x: f64) -> Self {
        Const(C64::new(x, 0.0))
    }

    pub fn zero() -> Self {
        Self::real(0.0)
    }

    pub fn one() -> Self {
        Self::real(1.0)
    }

    pub fn var(i: usize) -> Self {
        Var(i)
    }

    pub fn is_zero(&self) -> bool {
        is_zero(self)
    }

    pub fn as_const(&self) -> Option<C64> {
        match self {
            Const(c) => Some(*c),
            _ => None,
        }
    }

    fn fold(e: HoloExpr) -> HoloExpr {
        // Fold only when every child is constant and evaluation is defined.
        let all_const = match &e {
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                a.as_const().is_some() && b.as_const().is_some()
            }
            Neg(a) | PowInt(a, _) | Exp(a) | Log(a, _) | Sqrt(a, _) => a.as_const().is_some(),
            _ => false,
        };
        if all_const {
            if let Ok(c) = e.eval(&[]) {
                return Const(c);
            }
        }
        e
    }

    pub fn add(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        if is_zero(&a) {
            return b;
        }
        if is_zero(&b) {
            return a;
        }
        Self::fold(Add(Arc::new(a), Arc::new(b)))
    }

    pub fn sub(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        if is_zero(&b) {
            return a;
        }
        if is_zero(&a) {
            return Self::neg(b);
        }
        Self::fold(Sub(Arc::new(a), Arc::new(b)))
    }

    pub fn neg(a: HoloExpr) -> HoloExpr {
        match a {
            Const(c) => Const(-c),
            Neg(inner) => (*inner).clone(),
            other => Neg(Arc::new(other)),
        }
    }

    pub fn mul(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        if is_zero(&a) || is_zero(&b) {
            return Self::zero();
        }
        if is_one(&a) {
            return b;
        }
        if is_one(&b) {
            return a;
        }
        Self::fold(Mul(Arc::new(a), Arc::new(b)))
    }

    pub fn div(a: HoloExpr, b: HoloExpr) -> HoloExpr {
        if is_one(&b) {
            return a;
        }
        Self::fold(Div(Arc::new(a), Arc::new(b)))
    }

    pub fn powi(a: HoloExpr, k: i32) -> HoloExpr {
        match k {
            0 => Self::one(),
            1 => a,
            _ => Self::fold(PowInt(Arc::new(a), k)),
        }
    }

    pub fn exp(a: HoloExpr) -> HoloExpr {
        Self::fold(Exp(Arc::new(a)))
    }

    pub fn log(a: HoloExpr, branch: i64) -> HoloExpr {
        Self::fold(Log(Arc::new(a), branch))
    }

    pub fn sqrt(a: HoloExpr, negate: bool) -> HoloExpr {
        Self::fold(Sqrt(Arc::new(a), negate))
    }

    /// Smallest arity under which every `Var` index is valid.
    pub fn min_arity(&self) -> usize {
        match self {
            Const(_) => 0,
            Var(i) => i + 1,
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => a.min_arity().max(b.min_arity()),
            Neg(a) | PowInt(a, _) | Exp(a) | Log(a, _) | Sqrt(a, _) => a.min_arity(),
        }
    }

    fn node_name(&self) -> &'static str {
        match self {
            Const(_) => "const",
            Var(_) => "var",
            Add(..) => "add",
            Sub(..) => "sub",
            Neg(_) => "neg",
            Mul(..) => "mul",
            Div(..) => "div",
            PowInt(..) => "pow",
            Exp(_) => "exp",
            Log(..) => "log",
            Sqrt(..) => "sqrt",
        }
    }

    /// Evaluates the expression at `p`.
    ///
    /// Division by zero, `log(0)`, negative powers of zero and non-finite
    /// intermediate values are reported as [`Error::Domain`].
    pub fn eval(&self, p: &[C64]) -> Result<C64> {
        let v = match self {
            Const(c) => *c,
            Var(i) => *p.get(*i).ok_or(Error::DimensionMismatch {
                expected: i + 1,
                found: p.len(),
            })?,
            Add(a, b) => a.eval(p)? + b.eval(p)?,
            Sub(a, b) => a.eval(p)? - b.eval(p)?,
            Neg(a) => -a.eval(p)?,
            Mul(a, b) => a.eval(p)? * b.eval(p)?,
            Div(a, b) => {
                let den = b.eval(p)?;
                if den.norm_sqr() == 0.0 {
                    return Err(Error::domain("div", p));
                }
                a.eval(p)? / den
            }
            PowInt(a, k) => {
                let base = a.eval(p)?;
                if *k < 0 && base.norm_sqr() == 0.0 {
                    return Err(Error::domain("pow", p));
                }
                base.powi(*k)
            }
            Exp(a) => a.eval(p)?.exp(),
            Log(a, branch) => {
                let x = a.eval(p)?;
                if x.norm_sqr() == 0.0 {
                    return Err(Error::domain("log", p));
                }
                x.ln() + I * (2.0 * PI * *branch as f64)
            }
            Sqrt(a, negate) => {
                let s = a.eval(p)?.sqrt();
                if *negate {
                    -s
                } else {
                    s
                }
            }
        };
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::domain(self.node_name(), p));
        }
        Ok(v)
    }

    /// Symbolic partial derivative with respect to variable `i`.
    pub fn derive(&self, i: usize) -> HoloExpr {
        match self {
            Const(_) => Self::zero(),
            Var(j) => {
                if *j == i {
                    Self::one()
                } else {
                    Self::zero()
                }
            }
            Add(a, b) => Self::add(a.derive(i), b.derive(i)),
            Sub(a, b) => Self::sub(a.derive(i), b.derive(i)),
            Neg(a) => Self::neg(a.derive(i)),
            Mul(a, b) => Self::add(
                Self::mul(a.derive(i), (**b).clone()),
                Self::mul((**a).clone(), b.derive(i)),
            ),
            Div(a, b) => {
                let da = a.derive(i);
                let db = b.derive(i);
                if da.is_zero() && db.is_zero() {
                    Self::zero()
                } else if db.is_zero() {
                    Self::div(da, (**b).clone())
                } else {
                    Self::div(
                        Self::sub(
                            Self::mul(da, (**b).clone()),
                            Self::mul((**a).clone(), db),
                        ),
                        Self::powi((**b).clone(), 2),
                    )
                }
            }
            PowInt(a, k) => {
                let da = a.derive(i);
                if da.is_zero() {
                    return Self::zero();
                }
                Self::mul(
                    Self::mul(Self::real(*k as f64), Self::powi((**a).clone(), k - 1)),
                    da,
                )
            }
            Exp(a) => Self::mul(self.clone(), a.derive(i)),
            Log(a, _) => {
                let da = a.derive(i);
                if da.is_zero() {
                    return Self::zero();
                }
                Self::div(da, (**a).clone())
            }
            Sqrt(..) => {
                let Sqrt(a, _) = self else { unreachable!() };
                let da = a.derive(i);
                if da.is_zero() {
                    return Self::zero();
                }
                Self::div(da, Self::mul(Self::real(2.0), self.clone()))
            }
        }
    }

    /// Replaces every `Var(i)` by `args[i]`.
    pub fn substitute(&self, args: &[HoloExpr]) -> HoloExpr {
        match self {
            Const(c) => Const(*c),
            Var(i) => args[*i].clone(),
            Add(a, b) => Self::add(a.substitute(args), b.substitute(args)),
            Sub(a, b) => Self::sub(a.substitute(args), b.substitute(args)),
            Neg(a) => Self::neg(a.substitute(args)),
            Mul(a, b) => Self::mul(a.substitute(args), b.substitute(args)),
            Div(a, b) => Self::div(a.substitute(args), b.substitute(args)),
            PowInt(a, k) => Self::powi(a.substitute(args), *k),
            Exp(a) => Self::exp(a.substitute(args)),
            Log(a, br) => Self::log(a.substitute(args), *br),
            Sqrt(a, s) => Self::sqrt(a.substitute(args), *s),
        }
    }

    /// Taylor coefficients of `t -> f(p + t u)` at `t = 0` up to `order`.
    pub fn jet_eval(&self, p: &[C64], u: &[C64], order: usize) -> Result<Jet> {
        let order = order.max(1);
        let j = match self {
            Const(c) => Jet::constant(*c, order),
            Var(i) => {
                let (Some(pi), Some(ui)) = (p.get(*i), u.get(*i)) else {
                    return Err(Error::DimensionMismatch {
                        expected: i + 1,
                        found: p.len().min(u.len()),
                    });
                };
                Jet::variable(*pi, *ui, order)
            }
            Add(a, b) => a.jet_eval(p, u, order)?.add(&b.jet_eval(p, u, order)?),
            Sub(a, b) => a.jet_eval(p, u, order)?.sub(&b.jet_eval(p, u, order)?),
            Neg(a) => a.jet_eval(p, u, order)?.neg(),
            Mul(a, b) => a.jet_eval(p, u, order)?.mul(&b.jet_eval(p, u, order)?),
            Div(a, b) => {
                let den = b.jet_eval(p, u, order)?;
                if den.value().norm_sqr() == 0.0 {
                    return Err(Error::domain("div", p));
                }
                a.jet_eval(p, u, order)?.div(&den)
            }
            PowInt(a, k) => {
                let base = a.jet_eval(p, u, order)?;
                if *k < 0 && base.value().norm_sqr() == 0.0 {
                    return Err(Error::domain("pow", p));
                }
                base.powi(*k)
            }
            Exp(a) => a.jet_eval(p, u, order)?.exp(),
            Log(a, br) => {
                let x = a.jet_eval(p, u, order)?;
                if x.value().norm_sqr() == 0.0 {
                    return Err(Error::domain("log", p));
                }
                x.log(*br)
            }
            Sqrt(a, neg) => {
                let x = a.jet_eval(p, u, order)?;
                if x.value().norm_sqr() == 0.0 {
                    // sqrt is not differentiable at the branch point
                    return Err(Error::domain("sqrt", p));
                }
                x.sqrt(*neg)
            }
        };
        if j.coeffs().iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::domain(self.node_name(), p));
        }
        Ok(j)
    }

    /// Renders the expression in the text grammar accepted by
    /// [`parse_expr`](super::parse_expr), using `names` for the variables.
    /// The output reparses to a structurally equal tree.
    pub fn to_text(&self, names: &[String]) -> String {
        let mut s = String::new();
        self.write_text(names, &mut s);
        s
    }

    fn write_text(&self, names: &[String], out: &mut String) {
        match self {
            Const(c) => out.push_str(&format_const(*c)),
            Var(i) => match names.get(*i) {
                Some(n) => out.push_str(n),
                None => {
                    let _ = write!(out, "x{i}");
                }
            },
            Add(a, b) | Sub(a, b) | Mul(a, b) | Div(a, b) => {
                let op = match self {
                    Add(..) => " + ",
                    Sub(..) => " - ",
                    Mul(..) => " * ",
                    _ => " / ",
                };
                out.push('(');
                a.write_text(names, out);
                out.push_str(op);
                b.write_text(names, out);
                out.push(')');
            }
            Neg(a) => {
                out.push_str("(-");
                a.write_text(names, out);
                out.push(')');
            }
            PowInt(a, k) => {
                out.push('(');
                a.write_text(names, out);
                let _ = write!(out, ")^({k})");
            }
            Exp(a) => {
                out.push_str("exp(");
                a.write_text(names, out);
                out.push(')');
            }
            Log(a, br) => {
                out.push_str("log(");
                a.write_text(names, out);
                let _ = write!(out, "; {br})");
            }
            Sqrt(a, neg) => {
                out.push_str("sqrt(");
                a.write_text(names, out);
                let _ = write!(out, "; {})", u8::from(*neg));
            }
        }
    }
}

fn format_const(c: C64) -> String {
    if c.im == 0.0 {
        if c.re < 0.0 || (c.re == 0.0 && c.re.is_sign_negative()) {
            format!("(-{:?})", -c.re)
        } else {
            format!("{:?}", c.re)
        }
    } else {
        let re = if c.re.is_sign_negative() {
            format!("-{:?}", -c.re)
        } else {
            format!("{:?}", c.re)
        };
        let im = if c.im.is_sign_negative() {
            format!("- {:?}i", -c.im)
        } else {
            format!("+ {:?}i", c.im)
        };
        format!("({re} {im})")
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $ctor:ident) => {
        impl std::ops::$tr for HoloExpr {
            type Output = HoloExpr;
            fn $m(self, rhs: HoloExpr) -> HoloExpr {
                HoloExpr::$ctor(self, rhs)
            }
        }
        impl std::ops::$tr<&HoloExpr> for &HoloExpr {
            type Output = HoloExpr;
            fn $m(self, rhs: &HoloExpr) -> HoloExpr {
                HoloExpr::$ctor(self.clone(), rhs.clone())
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);
binop!(Div, div, div);

impl std::ops::Neg for HoloExpr {
    type Output = HoloExpr;
    fn neg(self) -> HoloExpr {
        HoloExpr::neg(self)
    }
}

impl From<C64> for HoloExpr {
    fn from(c: C64) -> Self {
        Const(c)
    }
}

impl From<f64> for HoloExpr {
    fn from(x: f64) -> Self {
        HoloExpr::real(x)
    }
}

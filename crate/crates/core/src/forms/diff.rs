use std::collections::BTreeMap;

use super::value::{k_subsets, sort_with_sign, FormValue};
use crate::holoalg::parse::{Parser, TokenKind};
use crate::holoalg::{CVec, HoloExpr, HoloMap, C64};
use crate::{Error, Result};

/// Holomorphic `k`-form on `C^n` with expression coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct DiffForm {
    n: usize,
    k: usize,
    coeffs: BTreeMap<Vec<usize>, HoloExpr>,
}

impl DiffForm {
    pub fn zero(n: usize, k: usize) -> Self {
        assert!(k <= n, "degree exceeds dimension");
        DiffForm {
            n,
            k,
            coeffs: BTreeMap::new(),
        }
    }

    pub fn from_terms(n: usize, k: usize, terms: impl IntoIterator<Item = (Vec<usize>, HoloExpr)>) -> Result<Self> {
        let mut f = Self::zero(n, k);
        for (idx, e) in terms {
            if idx.len() != k || idx.iter().any(|&i| i >= n) {
                return Err(Error::DimensionMismatch {
                    expected: k,
                    found: idx.len(),
                });
            }
            if e.min_arity() > n {
                return Err(Error::ArityMismatch {
                    name: "form coefficient".into(),
                    expected: n,
                    found: e.min_arity(),
                });
            }
            f.insert(idx, e);
        }
        Ok(f)
    }

    fn insert(&mut self, mut idx: Vec<usize>, e: HoloExpr) {
        let Some(sign) = sort_with_sign(&mut idx) else {
            return;
        };
        if e.is_zero() {
            return;
        }
        let e = if sign < 0.0 { -e } else { e };
        let merged = match self.coeffs.remove(&idx) {
            Some(prev) => prev + e,
            None => e,
        };
        if !merged.is_zero() {
            self.coeffs.insert(idx, merged);
        }
    }

    /// The exact 1-form `df` on `C^n`.
    pub fn exact(f: &HoloExpr, n: usize) -> Self {
        let mut out = Self::zero(n, 1);
        for j in 0..n {
            out.insert(vec![j], f.derive(j));
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.k
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coefficient(&self, idx: &[usize]) -> Option<&HoloExpr> {
        self.coeffs.get(idx)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[usize], &HoloExpr)> {
        self.coeffs.iter().map(|(k, v)| (k.as_slice(), v))
    }

    pub fn eval(&self, p: &[C64]) -> Result<FormValue> {
        if p.len() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: p.len(),
            });
        }
        let terms = self
            .coeffs
            .iter()
            .map(|(idx, e)| Ok((idx.clone(), e.eval(p)?)))
            .collect::<Result<Vec<_>>>()?;
        FormValue::from_terms(self.n, self.k, terms)
    }

    /// `a_p(v)` for a 1-form.
    pub fn pair_at(&self, p: &[C64], v: &[C64]) -> Result<C64> {
        debug_assert_eq!(self.k, 1);
        let mut acc = C64::new(0.0, 0.0);
        for (idx, e) in &self.coeffs {
            let vi = v[idx[0]];
            if vi.norm_sqr() != 0.0 {
                acc += e.eval(p)? * vi;
            }
        }
        Ok(acc)
    }

    pub fn add(&self, other: &DiffForm) -> Result<DiffForm> {
        if self.n != other.n || self.k != other.k {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: other.n,
            });
        }
        let mut out = self.clone();
        for (idx, e) in &other.coeffs {
            out.insert(idx.clone(), e.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &DiffForm) -> Result<DiffForm> {
        self.add(&other.scale(&HoloExpr::real(-1.0)))
    }

    /// Multiplies every coefficient by `s`.
    pub fn scale(&self, s: &HoloExpr) -> DiffForm {
        let mut out = DiffForm::zero(self.n, self.k);
        for (idx, e) in &self.coeffs {
            out.insert(idx.clone(), HoloExpr::mul(s.clone(), e.clone()));
        }
        out
    }

    /// Exterior derivative, assembled from symbolic partial derivatives.
    pub fn exterior_derivative(&self) -> DiffForm {
        let mut out = DiffForm::zero(self.n, (self.k + 1).min(self.n));
        if self.k == self.n {
            return out;
        }
        for (idx, e) in &self.coeffs {
            for j in 0..self.n {
                if idx.contains(&j) {
                    continue;
                }
                let d = e.derive(j);
                if d.is_zero() {
                    continue;
                }
                let mut full = Vec::with_capacity(idx.len() + 1);
                full.push(j);
                full.extend_from_slice(idx);
                out.insert(full, d);
            }
        }
        out
    }

    /// Max coefficient of `d(self)` over the given points.
    pub fn closedness_residual(&self, points: &[CVec]) -> Result<f64> {
        let d = self.exterior_derivative();
        if d.is_zero() {
            return Ok(0.0);
        }
        let vals = crate::par::try_map(points, |p| d.eval(p).map(|v| v.max_abs()))?;
        Ok(crate::par::max_in_order(vals))
    }

    /// Same coefficients viewed on `C^{n'}` with `n' >= n` (pullback along the
    /// projection onto the first `n` coordinates).
    pub fn embed(&self, n_new: usize) -> DiffForm {
        assert!(n_new >= self.n);
        DiffForm {
            n: n_new,
            k: self.k,
            coeffs: self.coeffs.clone(),
        }
    }

    /// Symbolic pullback `F^* a` for `F: C^m -> C^n`.
    pub fn pullback(&self, f: &HoloMap) -> Result<DiffForm> {
        if f.target_dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                found: f.target_dim(),
            });
        }
        let m = f.arity();
        let jac = f.jacobian_exprs();
        let comps = f.components();
        let mut out = DiffForm::zero(m.max(self.k), self.k);
        out.n = m;
        if self.k > m {
            return Ok(out);
        }
        for target in k_subsets(m, self.k) {
            for (idx, e) in &self.coeffs {
                let minor = symbolic_det(&idx.iter().map(|&r| target.iter().map(|&c| jac[r][c].clone()).collect()).collect::<Vec<Vec<_>>>());
                if minor.is_zero() {
                    continue;
                }
                out.insert(target.clone(), HoloExpr::mul(e.substitute(comps), minor));
            }
        }
        Ok(out)
    }

    /// Renders as `d[z]^d[w] : expr, ...`; the zero form renders as `0`.
    pub fn to_text(&self, vars: &[String]) -> String {
        if self.coeffs.is_empty() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|(idx, e)| {
                let basis: Vec<String> = idx.iter().map(|&i| format!("d[{}]", vars[i])).collect();
                let basis = if basis.is_empty() { "1".to_string() } else { basis.join("^") };
                format!("{basis} : {}", e.to_text(vars))
            })
            .collect::<Vec<_>>()
            .join(", ")
    }
}

fn symbolic_det(m: &[Vec<HoloExpr>]) -> HoloExpr {
    match m.len() {
        0 => HoloExpr::one(),
        1 => m[0][0].clone(),
        n => {
            let mut acc = HoloExpr::zero();
            for c in 0..n {
                if m[0][c].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<HoloExpr>> = m[1..]
                    .iter()
                    .map(|row| row.iter().enumerate().filter(|(j, _)| *j != c).map(|(_, e)| e.clone()).collect())
                    .collect();
                let term = HoloExpr::mul(m[0][c].clone(), symbolic_det(&minor));
                acc = if c % 2 == 0 { acc + term } else { acc - term };
            }
            acc
        }
    }
}

/// Parses a form written as comma-separated terms `d[a]^d[b] : expr`.
/// The literal `0` (or an empty string) is the zero form of
/// `default_degree`; degree-0 terms are written `1 : expr`.
pub fn parse_form(text: &str, vars: &[String], default_degree: usize) -> Result<DiffForm> {
    let n = vars.len();
    let trimmed = text.trim();
    if trimmed.is_empty() || trimmed == "0" {
        return Ok(DiffForm::zero(n, default_degree.min(n)));
    }
    let mut p = Parser::new(text, vars, 1)?;
    let mut terms: Vec<(Vec<usize>, HoloExpr)> = Vec::new();
    loop {
        let mut idx = Vec::new();
        let first = p.peek().clone();
        match &first.kind {
            TokenKind::Number(v) if *v == 1.0 => {
                p.advance();
            }
            _ => loop {
                let t = p.advance();
                if t.kind != TokenKind::Ident("d".into()) {
                    return Err(p.error(&t, "expected `d[name]`"));
                }
                p.expect(TokenKind::LBracket, "`[`")?;
                let nt = p.advance();
                let TokenKind::Ident(name) = &nt.kind else {
                    return Err(p.error(&nt, "expected a variable name"));
                };
                let i = vars
                    .iter()
                    .position(|v| v == name)
                    .ok_or_else(|| Error::UnknownName(name.clone()))?;
                idx.push(i);
                p.expect(TokenKind::RBracket, "`]`")?;
                if p.peek().kind == TokenKind::Caret {
                    p.advance();
                } else {
                    break;
                }
            },
        }
        p.expect(TokenKind::Colon, "`:`")?;
        let e = p.expression()?;
        if let Some((prev, _)) = terms.first() {
            if prev.len() != idx.len() {
                return Err(p.error(&first, "terms of different degrees"));
            }
        }
        terms.push((idx, e));
        let t = p.advance();
        match t.kind {
            TokenKind::Comma => continue,
            TokenKind::End => break,
            _ => return Err(p.error(&t, "expected `,` or end of form")),
        }
    }
    let k = terms[0].0.len();
    if k > n {
        return Err(Error::DimensionMismatch { expected: n, found: k });
    }
    DiffForm::from_terms(n, k, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vars(names: &[&str]) -> Vec<String> {
        names.iter().map(|s| s.to_string()).collect()
    }

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn d_of_canonical_potential() {
        let v = vars(&["z", "w"]);
        let nu = parse_form("d[w] : z", &v, 1).unwrap();
        let d = nu.exterior_derivative();
        assert_eq!(d, parse_form("d[z]^d[w] : 1", &v, 2).unwrap());
    }

    #[test]
    fn d_of_twisted_contact_form_is_independent_of_c() {
        let v = vars(&["z", "w", "y"]);
        for cval in ["0", "1", "(2 - 3i)"] {
            let xi = parse_form(&format!("d[y] : 1, d[w] : -(z - {cval}/w)"), &v, 1).unwrap();
            assert_eq!(xi.exterior_derivative(), parse_form("d[z]^d[w] : -1", &v, 2).unwrap());
        }
        let twist = parse_form("d[w] : 5/w", &v, 1).unwrap();
        assert!(twist.exterior_derivative().is_zero());
    }

    #[test]
    fn parse_errors() {
        let v = vars(&["z", "w"]);
        match parse_form("d[z]^^d[w] : 1", &v, 2) {
            Err(Error::Parse { column, token, .. }) => {
                assert_eq!(column, 6);
                assert_eq!(token, "^");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_form("d[q] : 1", &v, 1), Err(Error::UnknownName(_))));
        assert!(parse_form("d[z] : 1, d[z]^d[w] : 1", &v, 1).is_err());
        assert!(parse_form("d[z] 1", &v, 1).is_err());
    }

    #[test]
    fn text_round_trip() {
        let v = vars(&["z", "w"]);
        for t in ["d[z]^d[w] : 2/(1-z)^3", "d[w] : z - 1/w, d[z] : w^2", "0"] {
            let f = parse_form(t, &v, 1).unwrap();
            assert_eq!(parse_form(&f.to_text(&v), &v, 1).unwrap(), f);
        }
    }

    #[test]
    fn cayley_pullback_density() {
        let v = vars(&["z", "w"]);
        let target = parse_form("d[z]^d[w] : 1", &v, 2).unwrap();
        let cayley = HoloMap::new(
            2,
            vec![
                crate::holoalg::parse_expr("(1+z)/(1-z)", &v).unwrap(),
                crate::holoalg::parse_expr("w/(1-z)", &v).unwrap(),
            ],
        )
        .unwrap();
        let pb = target.pullback(&cayley).unwrap();
        let want = parse_form("d[z]^d[w] : 2/(1-z)^3", &v, 2).unwrap();
        for p in [[c(0.0, 0.0), c(0.0, 0.0)], [c(0.3, -0.2), c(0.1, 0.5)]] {
            let diff = pb.eval(&p).unwrap().max_abs_diff(&want.eval(&p).unwrap()).unwrap();
            assert!(diff < 1e-14);
        }
        let at0 = pb.eval(&[c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert_eq!(at0.get(&[0, 1]), c(2.0, 0.0));
    }

    #[test]
    fn symbolic_pullback_of_shear_potential() {
        let v = vars(&["z", "w"]);
        let nu = parse_form("d[w] : z", &v, 1).unwrap();
        let shear = HoloMap::new(2, vec![HoloExpr::var(0), crate::holoalg::parse_expr("w + z^2", &v).unwrap()]).unwrap();
        let pb = nu.pullback(&shear).unwrap();
        let want = parse_form("d[w] : z, d[z] : 2*z^2", &v, 1).unwrap();
        let p = [c(0.4, 0.1), c(-0.2, 0.3)];
        assert!(pb.eval(&p).unwrap().max_abs_diff(&want.eval(&p).unwrap()).unwrap() < 1e-15);
    }
}

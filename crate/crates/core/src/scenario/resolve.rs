use std::collections::{BTreeMap, BTreeSet};

use super::spec::*;
use crate::domains::Domain;
use crate::forms::{parse_form, DiffForm, Path};
use crate::holoalg::{parse_expr, CVec, HoloExpr, HoloMap, C64};
use crate::lifts::{CechAtlas, Chart, Sector};
use crate::{Error, Result};

/// Error kinds accepted by `expect`.
pub const ERROR_KINDS: &[&str] = &[
    "DomainError",
    "DimensionMismatch",
    "QuadratureNotConverged",
    "NotClosed",
    "UnsupportedDomain",
    "DegenerateInput",
    "SingularSystem",
    "PotentialMismatch",
    "TwistNotClosed",
    "ImageEscapesDomain",
    "NotScaleSymplectic",
    "BaseMismatch",
    "NotAPotential",
    "DegeneratePullback",
    "NotInContactHyperplane",
    "DegenerateDirection",
    "TangencyViolation",
    "ParamOutOfRange",
    "IntermediatePointEscapes",
];

/// Maps parse errors inside a string literal to file positions.
pub(crate) struct Locator<'a> {
    source: Option<&'a str>,
}

impl<'a> Locator<'a> {
    pub fn new(source: Option<&'a str>) -> Self {
        Locator { source }
    }

    pub fn relocate(&self, literal: &str, err: Error) -> Error {
        let (Error::Parse { column, token, message, .. }, Some(src)) = (&err, self.source) else {
            return err;
        };
        let quoted = format!("\"{literal}\"");
        let Some(at) = src.find(&quoted).or_else(|| src.find(&format!("'{literal}'"))) else {
            return err;
        };
        let before = &src[..at];
        let line = before.matches('\n').count() + 1;
        let line_start = before.rfind('\n').map_or(0, |i| i + 1);
        let col = src[line_start..at].chars().count() + 1 + column;
        Error::Parse {
            line,
            column: col,
            token: token.clone(),
            message: message.clone(),
        }
    }
}

pub(crate) fn constant(spec: &ComplexSpec, loc: &Locator) -> Result<C64> {
    match spec {
        ComplexSpec::Real(x) => Ok(C64::new(*x, 0.0)),
        ComplexSpec::Pair([re, im]) => Ok(C64::new(*re, *im)),
        ComplexSpec::Text(t) => {
            let e = parse_expr(t, &[]).map_err(|e| loc.relocate(t, e))?;
            let v = e.eval(&[])?;
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Config(format!("constant `{t}` is not finite")));
            }
            Ok(v)
        }
    }
}

pub(crate) fn real(spec: &RealSpec, loc: &Locator) -> Result<f64> {
    match spec {
        RealSpec::Real(x) => Ok(*x),
        RealSpec::Text(t) => {
            let v = constant(&ComplexSpec::Text(t.clone()), loc)?;
            if v.im != 0.0 {
                return Err(Error::Config(format!("`{t}` is not real")));
            }
            Ok(v.re)
        }
    }
}

pub(crate) fn point(spec: &[ComplexSpec], loc: &Locator) -> Result<CVec> {
    CVec::new(spec.iter().map(|c| constant(c, loc)).collect::<Result<_>>()?)
}

#[derive(Clone, Debug)]
pub(crate) struct LiftDef {
    pub omega: DiffForm,
    pub nu: DiffForm,
    pub twist: DiffForm,
    pub domain: Domain,
}

#[derive(Clone, Debug)]
pub(crate) struct Resolved {
    pub forms: BTreeMap<String, DiffForm>,
    pub maps: BTreeMap<String, HoloMap>,
    pub lifts: BTreeMap<String, LiftDef>,
    pub loops: BTreeMap<String, Path>,
    pub atlases: BTreeMap<String, CechAtlas>,
}

fn arity(name: &str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::ArityMismatch {
            name: name.into(),
            expected,
            found,
        });
    }
    Ok(())
}

fn degree(name: &str, form: &DiffForm, k: usize, n: usize) -> Result<()> {
    if form.degree() != k {
        return Err(Error::Config(format!("`{name}` must be a {k}-form, found degree {}", form.degree())));
    }
    arity(name, n, form.dim())
}

impl Resolved {
    pub fn form(&self, name: &str) -> Result<&DiffForm> {
        self.forms.get(name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn map(&self, name: &str) -> Result<&HoloMap> {
        self.maps.get(name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn lift(&self, name: &str) -> Result<&LiftDef> {
        self.lifts.get(name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn atlas(&self, name: &str) -> Result<&CechAtlas> {
        self.atlases.get(name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    /// Named loops, or every loop in name order.
    pub fn loop_list(&self, names: &Option<Vec<String>>) -> Result<Vec<Path>> {
        match names {
            None => Ok(self.loops.values().cloned().collect()),
            Some(ns) => ns
                .iter()
                .map(|n| self.loops.get(n).cloned().ok_or_else(|| Error::UnknownName(n.clone())))
                .collect(),
        }
    }

    pub fn resolve(spec: &ScenarioSpec, source: Option<&str>) -> Result<Self> {
        let loc = Locator::new(source);
        let base = &spec.variables;
        let mut seen = BTreeSet::new();
        for v in base.iter().chain([&spec.fiber]) {
            if !seen.insert(v) {
                return Err(Error::Config(format!("variable `{v}` declared twice")));
            }
        }
        spec.domain.validate()?;
        arity("domain", base.len(), spec.domain.dim())?;
        if !(spec.samples.tolerance > 0.0) || spec.samples.count == 0 {
            return Err(Error::Config("samples need a positive count and tolerance".into()));
        }

        let mut forms = BTreeMap::new();
        for (name, f) in &spec.forms {
            let (vars, deg) = match f {
                FormSpec::Text(_) => (base.clone(), 1),
                FormSpec::Full { variables, degree, .. } => (variables.clone().unwrap_or_else(|| base.clone()), degree.unwrap_or(1)),
            };
            let form = parse_form(f.text(), &vars, deg).map_err(|e| loc.relocate(f.text(), e))?;
            if let FormSpec::Full { degree: Some(k), .. } = f {
                if form.degree() != *k {
                    return Err(Error::Config(format!("form `{name}` has degree {}, declared {k}", form.degree())));
                }
            }
            forms.insert(name.clone(), form);
        }

        let mut maps = BTreeMap::new();
        let mut visiting = BTreeSet::new();
        for name in spec.maps.keys() {
            resolve_map(name, spec, &loc, &mut maps, &mut visiting)?;
        }

        let mut res = Resolved {
            forms,
            maps,
            lifts: BTreeMap::new(),
            loops: BTreeMap::new(),
            atlases: BTreeMap::new(),
        };

        for (name, l) in &spec.lifts {
            let domain = l.domain.clone().unwrap_or_else(|| spec.domain.clone());
            domain.validate()?;
            let n = domain.dim();
            let omega = res.form(&l.omega)?.clone();
            degree(&l.omega, &omega, 2, n)?;
            let nu = res.form(&l.nu)?.clone();
            degree(&l.nu, &nu, 1, n)?;
            let twist = match &l.twist {
                Some(t) => res.form(t)?.clone(),
                None => DiffForm::zero(n, 1),
            };
            degree(l.twist.as_deref().unwrap_or("twist"), &twist, 1, n)?;
            res.lifts.insert(name.clone(), LiftDef { omega, nu, twist, domain });
        }

        for (name, l) in &spec.loops {
            let coord = base.iter().position(|v| *v == l.coordinate).ok_or_else(|| Error::UnknownName(l.coordinate.clone()))?;
            let center = match &l.center {
                Some(c) => point(c, &loc)?,
                None => spec.domain.basepoint(),
            };
            arity(name, base.len(), center.dim())?;
            res.loops.insert(name.clone(), Path::circle(&center, coord, l.radius)?);
        }

        for (name, a) in &spec.atlases {
            let domain = a.domain.clone().unwrap_or_else(|| spec.domain.clone());
            let n = domain.dim();
            let mut charts = Vec::new();
            for c in &a.charts {
                let nu = res.form(&c.nu)?.clone();
                degree(&c.nu, &nu, 1, n)?;
                let region = match &c.sector {
                    None => None,
                    Some(s) => Some(Sector {
                        coord: base.iter().position(|v| *v == s.coordinate).ok_or_else(|| Error::UnknownName(s.coordinate.clone()))?,
                        center: real(&s.center, &loc)?,
                        half_width: real(&s.half_width, &loc)?,
                    }),
                };
                charts.push(Chart { nu, region });
            }
            let mut transitions = BTreeMap::new();
            for t in &a.transitions {
                if t.from >= t.to || t.to >= charts.len() {
                    return Err(Error::Config(format!("atlas `{name}`: transition ({}, {}) needs from < to < {}", t.from, t.to, charts.len())));
                }
                let f = parse_expr(&t.f, base).map_err(|e| loc.relocate(&t.f, e))?;
                transitions.insert((t.from, t.to), f);
            }
            res.atlases.insert(
                name.clone(),
                CechAtlas {
                    base: domain,
                    charts,
                    transitions,
                    pair_samples: BTreeMap::new(),
                    triple_samples: BTreeMap::new(),
                },
            );
        }

        let mut ids = BTreeSet::new();
        for c in &spec.checks {
            if !ids.insert(&c.id) {
                return Err(Error::Config(format!("check id `{}` used twice", c.id)));
            }
            if let Expect::Error(k) = &c.expect {
                if !ERROR_KINDS.contains(&k.as_str()) {
                    return Err(Error::UnknownName(k.clone()));
                }
            }
            if let Some(d) = &c.domain {
                d.validate()?;
            }
            res.check(spec, c, &loc)?;
        }
        Ok(res)
    }

    fn check(&self, spec: &ScenarioSpec, c: &CheckSpec, loc: &Locator) -> Result<()> {
        let domain = c.domain.as_ref().unwrap_or(&spec.domain);
        let lift_dim = |l: &str| self.lift(l).map(|d| d.domain.dim());
        match &c.op {
            CheckOp::SymplecticCheck { omega } => degree(omega, self.form(omega)?, 2, domain.dim()),
            CheckOp::ContactCheck { lift } | CheckOp::Reeb { lift } | CheckOp::ValidateLift { lift } => lift_dim(lift).map(|_| ()),
            CheckOp::Legendrian { lift, map } => {
                let m = self.map(map)?;
                arity(map, 1, m.arity())?;
                arity(map, lift_dim(lift)? + 1, m.target_dim())
            }
            CheckOp::LiftDisc { lift, map, y0, fiber } => {
                let m = self.map(map)?;
                arity(map, 1, m.arity())?;
                arity(map, lift_dim(lift)?, m.target_dim())?;
                constant(y0, loc)?;
                if let Some(f) = fiber {
                    parse_expr(f, &["zeta".to_string()]).map_err(|e| loc.relocate(f, e))?;
                }
                Ok(())
            }
            CheckOp::ScaleFactor { map, omega, target, lambda } => {
                let n = domain.dim();
                let m = self.map(map)?;
                arity(map, n, m.arity())?;
                degree(omega, self.form(omega)?, 2, n)?;
                let t = target.as_deref().unwrap_or(omega);
                degree(t, self.form(t)?, 2, m.target_dim())?;
                if let Some(l) = lambda {
                    constant(l, loc)?;
                }
                Ok(())
            }
            CheckOp::ThetaClass { lift, other, loops, periods } => {
                lift_dim(lift)?;
                lift_dim(other)?;
                let ls = self.loop_list(loops)?;
                if let Some(p) = periods {
                    arity("periods", ls.len(), p.len())?;
                    point(p, loc)?;
                }
                Ok(())
            }
            CheckOp::AreEquivalent { lift, other, loops, .. } => {
                lift_dim(lift)?;
                lift_dim(other)?;
                self.loop_list(loops).map(|_| ())
            }
            CheckOp::Monodromy { lift, nu_ref, loop_, value } => {
                degree(nu_ref, self.form(nu_ref)?, 1, lift_dim(lift)?)?;
                self.loop_list(&Some(vec![loop_.clone()]))?;
                if let Some(v) = value {
                    constant(v, loc)?;
                }
                Ok(())
            }
            CheckOp::IsFit { lift, nu_ref, loops, .. } => {
                degree(nu_ref, self.form(nu_ref)?, 1, lift_dim(lift)?)?;
                self.loop_list(loops).map(|_| ())
            }
            CheckOp::LiftAutomorphism {
                lift,
                map,
                loops,
                lambda,
                periods,
                ..
            } => {
                let n = lift_dim(lift)?;
                let m = self.map(map)?;
                arity(map, n, m.arity())?;
                arity(map, n, m.target_dim())?;
                let ls = self.loop_list(loops)?;
                if let Some(l) = lambda {
                    constant(l, loc)?;
                }
                if let Some(p) = periods {
                    arity("periods", ls.len(), p.len())?;
                    point(p, loc)?;
                }
                Ok(())
            }
            CheckOp::PullbackLift { map, lift } => {
                let m = self.map(map)?;
                arity(map, domain.dim(), m.arity())?;
                arity(map, lift_dim(lift)?, m.target_dim())
            }
            CheckOp::ValidateAtlas { atlas } => self.atlas(atlas).map(|_| ()),
            CheckOp::KappaV { lift, .. } | CheckOp::DistBounds { lift, .. } => lift_dim(lift).map(|_| ()),
            CheckOp::DistToFiber { lift, from, to } => {
                let n = lift_dim(lift)?;
                arity("from", n + 1, point(from, loc)?.dim())?;
                arity("to", n, point(to, loc)?.dim())
            }
            CheckOp::ModelDist { from, to, .. } => {
                arity("from", domain.dim(), point(from, loc)?.dim())?;
                arity("to", domain.dim(), point(to, loc)?.dim())
            }
            CheckOp::LocalConnect { point: p, radius, .. } => {
                if !(*radius > 0.0) {
                    return Err(Error::Config("local_connect radius must be positive".into()));
                }
                arity("point", 3, point(p, loc)?.dim())
            }
        }
    }
}

fn resolve_map(
    name: &str,
    spec: &ScenarioSpec,
    loc: &Locator,
    done: &mut BTreeMap<String, HoloMap>,
    visiting: &mut BTreeSet<String>,
) -> Result<HoloMap> {
    if let Some(m) = done.get(name) {
        return Ok(m.clone());
    }
    let m = spec.maps.get(name).ok_or_else(|| Error::UnknownName(name.into()))?;
    if !visiting.insert(name.to_string()) {
        return Err(Error::Config(format!("map `{name}` is defined in terms of itself")));
    }
    let parse = |vars: &[String], comps: &[String]| -> Result<HoloMap> {
        let exprs = comps
            .iter()
            .map(|c| parse_expr(c, vars).map_err(|e| loc.relocate(c, e)))
            .collect::<Result<Vec<HoloExpr>>>()?;
        HoloMap::new(vars.len(), exprs)
    };
    let map = match m {
        MapSpec::Components(c) => parse(&spec.variables, c)?,
        MapSpec::Full {
            variables,
            components,
            compose,
        } => match (components, compose) {
            (Some(c), None) => parse(variables.as_deref().unwrap_or(&spec.variables), c)?,
            (None, Some(names)) if !names.is_empty() => {
                if variables.is_some() {
                    return Err(Error::Config(format!("map `{name}`: `variables` does not apply to a composition")));
                }
                let mut acc = resolve_map(&names[0], spec, loc, done, visiting)?;
                for next in &names[1..] {
                    let outer = resolve_map(next, spec, loc, done, visiting)?;
                    arity(next, acc.target_dim(), outer.arity())?;
                    acc = outer.compose(&acc)?;
                }
                acc
            }
            _ => return Err(Error::Config(format!("map `{name}` needs exactly one of `components` or a nonempty `compose`"))),
        },
    };
    visiting.remove(name);
    done.insert(name.to_string(), map.clone());
    Ok(map)
}

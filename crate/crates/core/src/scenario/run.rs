use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::report::{CheckResult, ErrorInfo, Outcome, Report, Timestamp};
use super::resolve::{constant, point, Locator, Resolved};
use super::spec::{CheckOp, CheckSpec, Expect};
use super::Scenario;
use crate::contact::{contact_check, legendrian_residual, reeb_residuals, reeb_solve, standard_contact, symplectic_check, SampleFailure, SymplecticData};
use crate::domains::{model_dist, model_kappa, Domain};
use crate::holoalg::{parse_expr, CVec, C64};
use crate::lifts::{
    are_equivalent, bundle_morphism_residual, disc_params, is_fit, lift_automorphism, lift_disc, make_lift, monodromy, pullback_lift,
    scale_factor, scale_factor_between, theta_class, total_samples, validate_atlas, validate_lift, AutomorphismLift, Equivalence, Lift,
};
use crate::metrics::{box_length, dist_bounds, dist_to_fiber, kappa_v, local_connect};
use crate::{par, Result};

/// Disc parameters used by disc checks.
const DISC_SAMPLES: usize = 64;

struct Ctx<'a> {
    scenario: &'a Scenario,
    res: &'a Resolved,
    loc: Locator<'a>,
}

impl Ctx<'_> {
    fn seed(&self) -> u64 {
        self.scenario.spec.samples.seed
    }

    fn count(&self) -> usize {
        self.scenario.spec.samples.count
    }

    fn domain<'b>(&'b self, check: &'b CheckSpec) -> &'b Domain {
        check.domain.as_ref().unwrap_or(&self.scenario.spec.domain)
    }

    fn samples(&self, d: &Domain) -> Vec<CVec> {
        d.sample(self.seed(), self.count())
    }

    fn lift(&self, name: &str) -> Result<Lift> {
        let def = self.res.lift(name)?;
        let base = SymplecticData::new(def.omega.clone(), def.domain.clone())?;
        let pts = self.samples(&def.domain);
        make_lift(base, def.nu.clone(), def.twist.clone(), &pts, self.scenario.spec.samples.tolerance)
    }

    fn base_samples(&self, check: &CheckSpec, lift: &Lift) -> Vec<CVec> {
        self.samples(check.domain.as_ref().unwrap_or(&lift.base().domain))
    }
}

fn note_failures(r: &mut CheckResult, failures: &[SampleFailure]) {
    if let Some(f) = failures.first() {
        r.certificates.push(format!("{} sample(s) failed to evaluate; first: {f:?}", failures.len()));
    }
}

fn close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() < tol
}

fn run_op(ctx: &Ctx, check: &CheckSpec, tol: f64, r: &mut CheckResult) -> Result<bool> {
    let res = ctx.res;
    let loc = &ctx.loc;
    match &check.op {
        CheckOp::SymplecticCheck { omega } => {
            let d = ctx.domain(check);
            let s = SymplecticData::new(res.form(omega)?.clone(), d.clone())?;
            let rep = symplectic_check(&s, &ctx.samples(d), tol);
            r.residual("dclosed", rep.max_dclosed);
            r.value("min_top", C64::new(rep.min_top, 0.0));
            r.primary(C64::new(rep.min_top, 0.0));
            note_failures(r, &rep.failures);
            Ok(rep.pass)
        }
        CheckOp::ContactCheck { lift } => {
            let l = ctx.lift(lift)?;
            let rep = contact_check(l.contact(), &total_samples(&l, ctx.seed(), ctx.count()), tol);
            r.value("min_volume", C64::new(rep.min_volume, 0.0));
            r.primary(C64::new(rep.min_volume, 0.0));
            note_failures(r, &rep.failures);
            Ok(rep.pass)
        }
        CheckOp::Reeb { lift } => {
            let l = ctx.lift(lift)?;
            let pts = total_samples(&l, ctx.seed(), ctx.count());
            let reeb = l.reeb();
            let rows = par::try_map(&pts, |p| -> Result<[f64; 3]> {
                let v = reeb_solve(l.contact(), p)?;
                let (a, b) = reeb_residuals(l.contact(), p, &v)?;
                Ok([a, b, v.dist(&reeb)])
            })?;
            let worst = |i: usize| par::max_in_order(rows.iter().map(|row| row[i]));
            r.residual("normalization", worst(0));
            r.residual("invariance", worst(1));
            r.residual("fiber_direction", worst(2));
            Ok(r.max_residual.is_some_and(|m| m < tol))
        }
        CheckOp::Legendrian { lift, map } => {
            let l = ctx.lift(lift)?;
            let res_ = legendrian_residual(l.contact(), res.map(map)?, &disc_params(DISC_SAMPLES))?;
            r.residual("legendrian", res_);
            Ok(res_ < tol)
        }
        CheckOp::ValidateLift { lift } => {
            let l = ctx.lift(lift)?;
            let rep = validate_lift(&l, &total_samples(&l, ctx.seed(), ctx.count()), tol);
            r.residual("curvature", rep.curvature);
            r.residual("reeb_normalization", rep.reeb_normalization);
            r.residual("reeb_invariance", rep.reeb_invariance);
            r.value("min_volume", C64::new(rep.contact.min_volume, 0.0));
            note_failures(r, &rep.failures);
            Ok(rep.pass)
        }
        CheckOp::LiftDisc { lift, map, y0, fiber } => {
            let l = ctx.lift(lift)?;
            let disc = lift_disc(&l, res.map(map)?, constant(y0, loc)?)?;
            let params = disc_params(DISC_SAMPLES);
            r.residual("certificate", disc.certificate());
            r.residual("legendrian", disc.legendrian_residual(l.xi(), &params)?);
            if let Some(f) = fiber {
                let expect = parse_expr(f, &["zeta".to_string()])?;
                let errs = par::try_map(&params, |&z| -> Result<f64> { Ok((disc.fiber(z)? - expect.eval(&[z])?).norm()) })?;
                r.residual("fiber", par::max_in_order(errs));
            }
            let y = disc.fiber(C64::new(0.5, 0.0))?;
            r.value("fiber_at_half", y);
            r.primary(y);
            Ok(r.max_residual.is_some_and(|m| m < tol))
        }
        CheckOp::ScaleFactor { map, omega, target, lambda } => {
            let d = ctx.domain(check);
            let s = SymplecticData::new(res.form(omega)?.clone(), d.clone())?;
            let pts = ctx.samples(d);
            let f = res.map(map)?;
            let fit = match target {
                Some(t) => scale_factor_between(f, res.form(t)?, &s, &pts, tol)?,
                None => scale_factor(f, &s, &pts, tol)?,
            };
            r.residual("scale", fit.residual);
            r.value("lambda", fit.lambda);
            r.primary(fit.lambda);
            let mut ok = fit.residual < tol;
            if let Some(l) = lambda {
                let want = constant(l, loc)?;
                r.residual("lambda", (fit.lambda - want).norm());
                ok &= close(fit.lambda, want, tol * (1.0 + want.norm()));
            }
            Ok(ok)
        }
        CheckOp::ThetaClass { lift, other, loops, periods } => {
            let (l1, l2) = (ctx.lift(lift)?, ctx.lift(other)?);
            let paths = res.loop_list(loops)?;
            let pv = theta_class(&l1, &l2, &paths, &ctx.base_samples(check, &l1), tol)?;
            for (i, v) in pv.values.iter().enumerate() {
                r.value(&format!("period_{i}"), *v);
            }
            if let Some(v) = pv.values.first() {
                r.primary(*v);
            }
            match periods {
                Some(p) => {
                    let want = point(p, loc)?;
                    let err = par::max_in_order(pv.values.iter().zip(want.iter()).map(|(a, b)| (a - b).norm()));
                    r.residual("periods", err);
                    Ok(err < tol)
                }
                None => Ok(true),
            }
        }
        CheckOp::AreEquivalent { lift, other, loops, equivalent } => {
            let (l1, l2) = (ctx.lift(lift)?, ctx.lift(other)?);
            let paths = res.loop_list(loops)?;
            match are_equivalent(&l1, &l2, &paths, &ctx.base_samples(check, &l1), tol)? {
                Equivalence::Map(m) => {
                    r.residual("pullback", m.residual);
                    r.certificates.push("equivalence (p, y) -> (p, y + h(p)) with h a primitive of the connection difference".into());
                    Ok(*equivalent && m.residual < tol)
                }
                Equivalence::Obstruction(pv) => {
                    for (i, v) in pv.values.iter().enumerate() {
                        r.value(&format!("period_{i}"), *v);
                    }
                    if let Some(v) = pv.values.first() {
                        r.primary(*v);
                    }
                    r.certificates.push(format!("obstruction: max period {:e}", pv.max_abs()));
                    Ok(!*equivalent)
                }
            }
        }
        CheckOp::Monodromy { lift, nu_ref, loop_, value } => {
            let l = ctx.lift(lift)?;
            let path = &res.loop_list(&Some(vec![loop_.clone()]))?[0];
            let m = monodromy(&l, res.form(nu_ref)?, path, &ctx.base_samples(check, &l), tol)?;
            r.value("monodromy", m);
            r.primary(m);
            match value {
                Some(v) => {
                    let err = (m - constant(v, loc)?).norm();
                    r.residual("monodromy", err);
                    Ok(err < tol)
                }
                None => Ok(true),
            }
        }
        CheckOp::IsFit { lift, nu_ref, loops, fit } => {
            let l = ctx.lift(lift)?;
            let paths = res.loop_list(loops)?;
            let out = is_fit(&l, res.form(nu_ref)?, &paths, &ctx.base_samples(check, &l), tol)?;
            for (i, v) in out.periods.values.iter().enumerate() {
                r.value(&format!("period_{i}"), *v);
            }
            r.primary(C64::new(out.periods.max_abs(), 0.0));
            let mut ok = out.fit == *fit;
            if let Some(s) = out.section_residual {
                r.residual("section", s);
                ok &= s < tol;
            }
            Ok(ok)
        }
        CheckOp::LiftAutomorphism {
            lift,
            map,
            loops,
            lifts,
            lambda,
            periods,
        } => {
            let l = ctx.lift(lift)?;
            let paths = res.loop_list(loops)?;
            let out = lift_automorphism(&l, res.map(map)?, &paths, &ctx.base_samples(check, &l), tol)?;
            let (lam, pv, ok) = match out {
                AutomorphismLift::Lifted(bm) => {
                    r.residual("pullback", bm.residual);
                    r.certificates.push("bundle map (p, y) -> (F(p), λ y + h(p))".into());
                    (bm.lambda, None, *lifts && bm.residual < tol)
                }
                AutomorphismLift::Obstruction { fit, periods } => (fit.lambda, Some(periods), !*lifts),
            };
            r.value("lambda", lam);
            r.primary(lam);
            let mut ok = ok;
            if let Some(want) = lambda {
                let want = constant(want, loc)?;
                r.residual("lambda", (lam - want).norm());
                ok &= close(lam, want, tol * (1.0 + want.norm()));
            }
            if let Some(pv) = &pv {
                for (i, v) in pv.values.iter().enumerate() {
                    r.value(&format!("period_{i}"), *v);
                }
                if let Some(p) = periods {
                    let want = point(p, loc)?;
                    let err = par::max_in_order(pv.values.iter().zip(want.iter()).map(|(a, b)| (a - b).norm()));
                    r.residual("periods", err);
                    ok &= err < tol;
                }
            }
            Ok(ok)
        }
        CheckOp::PullbackLift { map, lift } => {
            let target = ctx.lift(lift)?;
            let d = ctx.domain(check);
            let phi = res.map(map)?;
            let pulled = pullback_lift(phi, &target, d.clone(), &ctx.samples(d), tol)?;
            let pts = total_samples(&pulled, ctx.seed(), ctx.count());
            let rep = validate_lift(&pulled, &pts, tol);
            r.residual("curvature", rep.curvature);
            r.residual("reeb_normalization", rep.reeb_normalization);
            r.residual("reeb_invariance", rep.reeb_invariance);
            let morph = bundle_morphism_residual(phi, &target, &pulled, &pts)?;
            r.residual("bundle_morphism", morph);
            r.value("min_volume", C64::new(rep.contact.min_volume, 0.0));
            note_failures(r, &rep.failures);
            Ok(rep.pass && morph < tol)
        }
        CheckOp::ValidateAtlas { atlas } => {
            let mut a = res.atlas(atlas)?.clone();
            a.sample_overlaps(ctx.seed(), ctx.count());
            let rep = validate_atlas(&a, tol)?;
            r.residual("cocycle", rep.cocycle_residual);
            r.residual("differential", rep.differential_residual);
            note_failures(r, &rep.failures);
            Ok(rep.pass)
        }
        CheckOp::KappaV { lift, count } => {
            let l = ctx.lift(lift)?;
            let cases = horizontal_cases(&l, ctx.seed(), *count)?;
            let base = l.base().domain.clone();
            let n = l.base_dim();
            let rows = par::try_map(&cases, |(p, u)| -> Result<[f64; 3]> {
                let cert = kappa_v(&l, p, u, tol)?;
                let model = model_kappa(&base, &p.slice(0..n), &u.slice(0..n))?;
                Ok([(cert.value - model).abs(), cert.legendrian_residual, cert.tangent_residual])
            })?;
            let worst = |i: usize| par::max_in_order(rows.iter().map(|row| row[i]));
            r.residual("metric", worst(0));
            r.residual("legendrian", worst(1));
            r.residual("tangent", worst(2));
            Ok(r.max_residual.is_some_and(|m| m < tol))
        }
        CheckOp::DistBounds { lift, count } => {
            let l = ctx.lift(lift)?;
            let n = l.base_dim();
            let pts = total_samples(&l, ctx.seed(), 2 * count);
            let pairs: Vec<(CVec, CVec)> = pts.chunks(2).map(|c| (c[0].clone(), c[1].slice(0..n))).collect();
            let rows = par::try_map(&pairs, |(p, q)| -> Result<(f64, f64)> {
                let (_, chain) = dist_to_fiber(&l, p, q)?;
                let b = dist_bounds(&l, p, &chain.end, tol)?;
                Ok((b.upper.map_or(f64::INFINITY, |u| u - b.lower), b.gap))
            })?;
            r.residual("sandwich", par::max_in_order(rows.iter().map(|x| x.0)));
            r.residual("gap", par::max_in_order(rows.iter().map(|x| x.1)));
            Ok(r.max_residual.is_some_and(|m| m < tol))
        }
        CheckOp::DistToFiber { lift, from, to } => {
            let l = ctx.lift(lift)?;
            let (p, q) = (point(from, loc)?, point(to, loc)?);
            let (d, chain) = dist_to_fiber(&l, &p, &q)?;
            let model = model_dist(&l.base().domain, &p.slice(0..l.base_dim()), &q)?;
            r.value("distance", C64::new(d, 0.0));
            r.primary(C64::new(d, 0.0));
            r.residual("model", (d - model).abs());
            r.residual("certificate", chain.max_certificate());
            r.residual("joint_gap", chain.joint_gap()?);
            let end = chain.end.slice(0..l.base_dim()).dist(&q);
            r.residual("endpoint", end);
            Ok(r.max_residual.is_some_and(|m| m < tol))
        }
        CheckOp::ModelDist { from, to, value } => {
            let d = model_dist(ctx.domain(check), &point(from, loc)?, &point(to, loc)?)?;
            r.value("distance", C64::new(d, 0.0));
            r.primary(C64::new(d, 0.0));
            match value {
                Some(v) => {
                    r.residual("distance", (d - v).abs());
                    Ok((d - v).abs() < tol)
                }
                None => Ok(true),
            }
        }
        CheckOp::LocalConnect {
            radius,
            point: p,
            halvings,
            below,
        } => {
            let p0 = point(p, loc)?;
            let xi = standard_contact(1).xi;
            let zero = CVec::zeros(3);
            let mut lengths = Vec::new();
            let mut tangency: f64 = 0.0;
            let mut endpoints: f64 = 0.0;
            for k in 0..=*halvings {
                let pk = p0.scale(C64::new(0.5f64.powi(k as i32), 0.0));
                let curve = local_connect(*radius, &pk)?;
                tangency = par::max_in_order(curve.tangency_residuals(&xi)?.into_iter().map(|x| x.0).chain([tangency]));
                let v = curve.vertices()?;
                endpoints = par::max_in_order([endpoints, v[0].dist(&pk), v[v.len() - 1].dist(&zero)]);
                let len = box_length(*radius, &curve, tol)?;
                r.value(&format!("length_{k}"), C64::new(len, 0.0));
                lengths.push(len);
            }
            r.residual("tangency", tangency);
            r.residual("endpoints", endpoints);
            let last = *lengths.last().expect("at least one point");
            r.primary(C64::new(last, 0.0));
            let decreasing = lengths.windows(2).all(|w| w[1] < w[0]);
            if !decreasing {
                r.certificates.push("lengths do not strictly decrease".into());
            }
            let small = below.is_none_or(|b| last < b);
            if !small {
                r.certificates.push(format!("final length {last:e} is not below {:e}", below.unwrap_or(0.0)));
            }
            Ok(tangency < tol && endpoints == 0.0 && decreasing && small)
        }
    }
}

/// Seeded total-space points with horizontal lifts of random base vectors.
pub fn horizontal_cases(lift: &Lift, seed: u64, count: usize) -> Result<Vec<(CVec, CVec)>> {
    let pts = total_samples(lift, seed, count);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_0f_u64);
    let n = lift.base_dim();
    pts.into_iter()
        .map(|p| {
            let v = CVec::new((0..n).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect())?;
            let u = lift.horizontal_lift(&p, &v)?;
            Ok((p, u))
        })
        .collect()
}

fn run_check(ctx: &Ctx, check: &CheckSpec) -> CheckResult {
    let tol = check.tolerance.unwrap_or(ctx.scenario.spec.samples.tolerance);
    let mut r = CheckResult::new(&check.id, check.op.name(), check.expect.clone());
    match run_op(ctx, check, tol, &mut r) {
        Ok(true) => r.outcome = Outcome::Pass,
        Ok(false) => r.outcome = Outcome::Fail,
        Err(e) => {
            r.outcome = Outcome::Error;
            r.error = Some(ErrorInfo {
                kind: e.kind().into(),
                message: e.to_string(),
            });
        }
    }
    r.pass = match &check.expect {
        Expect::Pass => r.outcome == Outcome::Pass,
        Expect::Fail => r.outcome != Outcome::Pass,
        Expect::Error(k) => r.error.as_ref().is_some_and(|e| e.kind == *k),
    };
    r
}

/// Runs every check in declaration order; a failing check never stops the
/// run.
pub fn run_scenario(s: &Scenario) -> Report {
    let started = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map_or(0, |d| d.as_millis() as u64);
    let clock = Instant::now();
    let ctx = Ctx {
        scenario: s,
        res: &s.resolved,
        loc: Locator::new(None),
    };
    let checks = par::map(&s.spec.checks, |c| run_check(&ctx, c));
    let samples = s.spec.samples;
    Report {
        scenario: s.spec.name.clone(),
        seed: samples.seed,
        samples: samples.count,
        tolerance: samples.tolerance,
        pass: checks.iter().all(|c| c.pass),
        checks,
        timestamp: Timestamp {
            started_unix_ms: started,
            wall_ms: clock.elapsed().as_secs_f64() * 1e3,
        },
    }
}

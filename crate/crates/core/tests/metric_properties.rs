use holocontact::contact::{reeb_residuals, reeb_solve, SymplecticData};
use holocontact::domains::{model_kappa, Domain};
use holocontact::forms::{parse_form, DiffForm};
use holocontact::lifts::{disc_params, lift_disc, make_lift, Lift};
use holocontact::metrics::{dist_bounds, dist_to_fiber, kappa_v};
use holocontact::{CVec, HoloExpr, HoloMap, C64};
use proptest::prelude::*;

fn standard_lift() -> Lift {
    let v = vec!["z".to_string(), "w".to_string()];
    let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), Domain::ball(2)).unwrap();
    let pts = s.domain.sample(1, 40);
    make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), DiffForm::zero(2, 1), &pts, 1e-10).unwrap()
}

fn cplx(r: f64) -> impl Strategy<Value = C64> {
    (-r..r, -r..r).prop_map(|(a, b)| C64::new(a, b))
}

fn ball_point() -> impl Strategy<Value = CVec> {
    (cplx(0.5), cplx(0.5), cplx(1.0)).prop_map(|(z, w, y)| CVec::new(vec![z, w, y]).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn kappa_v_is_homogeneous_and_matches_base(p in ball_point(), a in cplx(1.0), b in cplx(1.0), s in 0.1f64..3.0) {
        prop_assume!(a.norm() + b.norm() > 1e-2);
        let l = standard_lift();
        let v = CVec::new(vec![a, b]).unwrap();
        let u = l.horizontal_lift(&p, &v).unwrap();
        let k1 = kappa_v(&l, &p, &u, 1e-10).unwrap();
        let k2 = kappa_v(&l, &p, &u.scale(C64::new(s, 0.0)), 1e-10).unwrap();
        prop_assert!((k2.value - s * k1.value).abs() < 1e-9 * (1.0 + k2.value));
        let base = model_kappa(&Domain::ball(2), &p.slice(0..2), &v).unwrap();
        prop_assert!((k1.value - base).abs() < 1e-10 * (1.0 + base));
        prop_assert!(k1.legendrian_residual < 1e-10);
    }

    #[test]
    fn distance_bounds_are_ordered(p in ball_point(), q in ball_point()) {
        let l = standard_lift();
        let (d, chain) = dist_to_fiber(&l, &p, &q.slice(0..2)).unwrap();
        let b = dist_bounds(&l, &p, &chain.end, 1e-8).unwrap();
        prop_assert!(b.lower <= b.upper.unwrap() + 1e-9);
        prop_assert!((b.lower - d).abs() < 1e-9 * (1.0 + d));
        // a mismatched fiber value is never reached by the geodesic chain
        let off = CVec::new(vec![chain.end[0], chain.end[1], chain.end[2] + 0.5]).unwrap();
        prop_assume!(p.slice(0..2).dist(&q.slice(0..2)) > 1e-3);
        prop_assert!(dist_bounds(&l, &p, &off, 1e-8).unwrap().upper.is_none());
    }

    #[test]
    fn lifted_linear_discs_are_legendrian(c0 in cplx(0.3), c1 in cplx(0.3), e0 in cplx(0.3), e1 in cplx(0.3), y0 in cplx(1.0)) {
        let l = standard_lift();
        let t = HoloExpr::var(0);
        let k = HoloExpr::constant;
        let phi = HoloMap::new(1, vec![k(c0) + k(e0) * t.clone(), k(c1) + k(e1) * t]).unwrap();
        let disc = lift_disc(&l, &phi, y0).unwrap();
        prop_assert!(disc.certificate() < 1e-10);
        // y(ζ) = y0 + c0 e1 ζ + e0 e1 ζ² / 2
        for z in disc_params(16) {
            let want = y0 + c0 * e1 * z + e0 * e1 * z * z / 2.0;
            prop_assert!((disc.fiber(z).unwrap() - want).norm() < 1e-12);
        }
    }

    #[test]
    fn reeb_field_of_twisted_lifts_is_the_fiber_direction(cs in prop::collection::vec(cplx(1.0), 3), p in ball_point()) {
        let v = vec!["z".to_string(), "w".to_string()];
        let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), Domain::ball(2)).unwrap();
        let pts = s.domain.sample(2, 20);
        let (z, w) = (HoloExpr::var(0), HoloExpr::var(1));
        let f = HoloExpr::constant(cs[0]) * z.clone() * w.clone() + HoloExpr::constant(cs[1]) * HoloExpr::exp(z) + HoloExpr::constant(cs[2]) * w;
        let l = make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), DiffForm::exact(&f, 2), &pts, 1e-10).unwrap();
        let r = reeb_solve(l.contact(), &p).unwrap();
        prop_assert!(r.dist(&l.reeb()) < 1e-12);
        let (a, b) = reeb_residuals(l.contact(), &p, &r).unwrap();
        prop_assert!(a < 1e-12 && b < 1e-12);
    }
}

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use holocontact::contact::{contact_check, standard_contact, SymplecticData};
use holocontact::domains::Domain;
use holocontact::forms::{parse_form, DiffForm};
use holocontact::lifts::{lift_disc, make_lift, total_samples, validate_lift, Lift};
use holocontact::scenario::{builtin, run_scenario};
use holocontact::{HoloExpr, HoloMap, C64};

fn standard_lift() -> Lift {
    let v = vec!["z".to_string(), "w".to_string()];
    let s = SymplecticData::new(parse_form("d[z]^d[w] : 1", &v, 2).unwrap(), Domain::ball(2)).unwrap();
    let pts = s.domain.sample(1, 40);
    make_lift(s, parse_form("d[w] : z", &v, 1).unwrap(), DiffForm::zero(2, 1), &pts, 1e-10).unwrap()
}

type Work = Box<dyn Fn() + Send + Sync>;

fn workloads() -> Vec<(&'static str, Work)> {
    let c = standard_contact(2);
    let pts = c.domain.sample(7, 2000);
    let lift = standard_lift();
    let lift_pts = total_samples(&lift, 7, 2000);
    let t = HoloExpr::var(0);
    let disc = HoloMap::new(1, vec![t.clone() / HoloExpr::real(2.0), t / HoloExpr::real(3.0)]).unwrap();
    let scenario = builtin("punctured_family").unwrap();
    let lift2 = lift.clone();
    vec![
        ("contact_check_2000", Box::new(move || assert!(contact_check(&c, &pts, 1e-12).pass))),
        ("validate_lift_2000", Box::new(move || assert!(validate_lift(&lift, &lift_pts, 1e-10).pass))),
        (
            "lift_disc",
            Box::new(move || assert!(lift_disc(&lift2, &disc, C64::new(0.0, 0.0)).unwrap().certificate() < 1e-10)),
        ),
        ("punctured_family", Box::new(move || assert!(run_scenario(&scenario).pass))),
    ]
}

#[cfg(feature = "parallel")]
fn bench(c: &mut Criterion) {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let threads = rayon::current_num_threads();
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new(name, "threads=1"), |b| b.iter(|| single.install(&work)));
        group.bench_function(BenchmarkId::new(name, format!("threads={threads}")), |b| b.iter(&work));
    }
    group.finish();
}

#[cfg(not(feature = "parallel"))]
fn bench(c: &mut Criterion) {
    let mut group = c.benchmark_group("parallel_vs_sequential");
    group.sample_size(10);
    for (name, work) in workloads() {
        group.bench_function(BenchmarkId::new(name, "sequential"), |b| b.iter(&work));
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);

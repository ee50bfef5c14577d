//! Long randomized search backing the frozen reflection bound. Ignored by
//! default; run with `cargo test -p formetric --test fixture_search -- --ignored`.

use formetric::alignment::so3_multistart;
use formetric::counterexamples::{reflection_fixture, REFLECTION_FIXTURE_BOUND};
use formetric::oracle::sphere_distance_lower_bound;
use formetric::SolverOptions;

#[test]
#[ignore]
fn million_start_search_stays_above_frozen_bound() {
    let (x, y) = reflection_fixture::<f64>();
    let opts = SolverOptions::default().with_restarts(1_000_000).with_refine_iters(50);
    let r = so3_multistart(&x, &y, &opts).unwrap();
    let lb = sphere_distance_lower_bound(&x, &y).unwrap();
    println!("best upper bound {:.6}, rigorous lower bound {:.6}", r.upper_bound, lb);
    assert!(r.upper_bound >= REFLECTION_FIXTURE_BOUND);
}

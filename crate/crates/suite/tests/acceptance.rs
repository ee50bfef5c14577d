//! Runs every acceptance criterion at full scale and prints one line per
//! criterion. Exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use formetric::counterexamples::sphere_two_point_pair;
use formetric::{bottleneck_distance, formation_distance, signature, SolverOptions};
use formetric_cli::verify::{verify_all, CLAIMS, TAMPERABLE};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TWO_POINT: usize = 6;

fn line(criterion: usize, name: &str, pass: bool, detail: &str) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {criterion:>2} {name:<26} {verdict}  {detail}");
}

/// The two-point sphere criterion read literally: formation distance and
/// the diagram distance both equal |dx - dy| / 2.
fn two_point_literal(opts: &SolverOptions) -> (bool, String) {
    let degrees: BTreeSet<usize> = [0, 1].into();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let (mut distance_ok, mut diagram_ok) = (0, 0);
    let mut witness = None;
    let trials = 50;
    for _ in 0..trials {
        let dx = rng.random_range(0.05..PI - 0.05);
        let dy = rng.random_range(0.05..PI - 0.05);
        let (x, y) = sphere_two_point_pair(dx, dy).expect("valid separations");
        let expected = (dx - dy).abs() / 2.0;
        let d = formation_distance(&x, &y, opts).expect("solvable").upper_bound;
        let (sx, sy) = (signature(&x, &degrees).unwrap(), signature(&y, &degrees).unwrap());
        let db = degrees
            .iter()
            .map(|k| bottleneck_distance(&sx[k], &sy[k]).unwrap())
            .fold(0.0, f64::max);
        if (d - expected).abs() <= 1e-5 {
            distance_ok += 1;
        }
        if (db - expected).abs() <= 1e-5 {
            diagram_ok += 1;
        } else if witness.is_none() {
            witness = Some((dx, dy, db, expected));
        }
    }
    let mut detail = format!("distance matched {distance_ok}/{trials}; d_B matched {diagram_ok}/{trials}");
    if let Some((dx, dy, db, expected)) = witness {
        detail.push_str(&format!(
            "; e.g. dx={dx:.4} dy={dy:.4} gives d_B={db:.4} but |dx-dy|/2={expected:.4} \
             (d_B is min(|dx-dy|/2, max(dx,dy)/4))"
        ));
    }
    (distance_ok == trials && diagram_ok == trials, detail)
}

fn main() -> ExitCode {
    let opts = SolverOptions::default();
    let start = Instant::now();
    let suite = match verify_all(0, 1.0, &opts, None) {
        Ok(s) => s,
        Err(e) => {
            println!("verification suite did not run: {e}");
            return ExitCode::FAILURE;
        }
    };
    let mut all = true;
    for (k, claim) in suite.claims.iter().enumerate() {
        let criterion = k + 1;
        if criterion == TWO_POINT {
            let (pass, detail) = two_point_literal(&opts);
            line(criterion, claim.name, pass, &detail);
            println!("             corrected form: {}  {}", if claim.pass { "PASS" } else { "FAIL" }, claim.detail);
            all &= pass;
        } else {
            line(criterion, claim.name, claim.pass, &claim.detail);
            all &= claim.pass;
        }
    }

    let covered = suite.claims.iter().map(|c| c.name).eq(CLAIMS.iter().map(|c| c.0));
    println!("control      {:<26} {}  {} claims reported", "coverage", verdict(covered), suite.claims.len());
    all &= covered;
    for target in TAMPERABLE {
        let tampered = verify_all(0, 0.1, &opts, Some(target)).expect("tampered suite runs");
        let caught = tampered
            .claims
            .iter()
            .all(|c| c.pass == (c.name != target));
        println!("control      {:<26} {}  only {target} fails when tampered", "tamper", verdict(caught));
        all &= caught;
    }
    println!("elapsed {:.1}s", start.elapsed().as_secs_f64());
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

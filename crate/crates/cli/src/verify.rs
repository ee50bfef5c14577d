//! One-shot verification suite: every testable inequality, exactness
//! claim and counterexample, each checked against an independent oracle.
//!
//! Trial counts are `ceil(base * budget)` with the bases below; a budget
//! of 1 is the full acceptance scale.

use std::collections::BTreeSet;
use std::f64::consts::{PI, TAU};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use formetric::alignment::{circle_exact_distance, grid_oracle};
use formetric::ambient::{sample_point, AmbientSpace};
use formetric::assignment::bottleneck_assignment;
use formetric::counterexamples::{
    reflection_fixture, sphere_reflection_pair, sphere_two_point_pair, torus_mst_pair, REFLECTION_FIXTURE_BOUND,
};
use formetric::diagram::stability_from_parts;
use formetric::formation::induced_distance_matrix;
use formetric::oracle::{
    brute_force_assignment, brute_force_diagram_bottleneck, brute_force_mst, h0_deaths_by_sweep, naive_h1_diagram,
    sphere_distance_lower_bound,
};
use formetric::phase::{place_lift, InverseOutcome};
use formetric::rips::{h0_diagram, mst};
use formetric::{
    bottleneck_distance, formation_distance, inverse_bound_check, metric_axiom_sampler, reconstruct_from_gaps,
    rips_diagram, signature, Configuration, CostMatrix, CutLocus, DistanceMatrix, GapLabeling, PersistenceDiagram,
    QuotientGeodesic, SolverOptions,
};

use crate::error::CliError;
use crate::monitor::{monitor, Trajectory};

/// Slack on inequalities between independently computed quantities.
const SLACK: f64 = 1e-9;

/// Claim names with the statement each one checks, in report order.
pub const CLAIMS: [(&str, &str); 12] = [
    (
        "stability-inequality",
        "d_B of Rips diagrams in degrees 0 and 1 is at most the certified distance bound (circle, 2-torus, sphere)",
    ),
    (
        "gh-sandwich",
        "half the distortion of the certificate's relabeling is at most its alignment cost",
    ),
    (
        "h0-equals-mst",
        "finite H0 deaths are half the MST edge lengths, and the MST weight matches tree enumeration",
    ),
    (
        "bottleneck-solvers-exact",
        "bottleneck assignment and diagram bottleneck distance equal exhaustive enumeration",
    ),
    (
        "circle-distance-exact",
        "the exact circle distance matches a dense grid within 2e-5 and satisfies the metric axioms at 1e-9",
    ),
    (
        "two-point-sphere",
        "two-point sphere shapes are at distance |dx - dy| / 2, with d_B = min(|dx - dy| / 2, max(dx, dy) / 4)",
    ),
    (
        "torus-mst-counterexample",
        "a collinear quadruple and a square on the torus share their H0 diagram but are at grid distance >= 0.05",
    ),
    (
        "reflection-counterexample",
        "a generic sphere configuration and its mirror image share all diagrams yet are at distance >= 0.01",
    ),
    ("three-point-h1-empty", "three-point metric spaces have empty degree-1 diagrams"),
    (
        "phase-inverse-bound",
        "under the gap-labeling margin, eps <= d <= 2 (n - 1) eps and every gap moves by at most 2 eps",
    ),
    (
        "quotient-geodesics",
        "quotient geodesics have constant speed on the circle and split at their midpoint on the sphere",
    ),
    (
        "path-monitoring",
        "along sampled circle geodesics the diagram rate never exceeds the path speed",
    ),
];

/// Claims whose fixtures can be tampered with.
pub const TAMPERABLE: [&str; 3] = ["h0-equals-mst", "torus-mst-counterexample", "reflection-counterexample"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimReport {
    pub name: &'static str,
    pub statement: &'static str,
    pub pass: bool,
    pub trials: usize,
    pub failures: usize,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub budget: f64,
    pub tampered: Option<String>,
    pub claims: Vec<ClaimReport>,
    pub pass: bool,
}

impl SuiteReport {
    pub fn claim(&self, name: &str) -> Option<&ClaimReport> {
        self.claims.iter().find(|c| c.name == name)
    }
}

struct Ctx<'a> {
    seed: u64,
    budget: f64,
    opts: &'a SolverOptions,
    tamper: Option<&'a str>,
}

impl Ctx<'_> {
    fn count(&self, base: usize) -> usize {
        ((base as f64 * self.budget).ceil() as usize).max(1)
    }

    /// Independent stream per claim and trial, so results do not depend on
    /// scheduling.
    fn rng(&self, claim: u64, trial: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream((claim << 32) | trial as u64);
        rng
    }

    fn tampered(&self, name: &str) -> bool {
        self.tamper == Some(name)
    }
}

fn report(index: usize, trials: usize, failures: usize, detail: String) -> ClaimReport {
    let (name, statement) = CLAIMS[index];
    ClaimReport {
        name,
        statement,
        pass: failures == 0,
        trials,
        failures,
        detail,
    }
}

/// Doubles the largest finite death.
fn tamper_diagram(d: &PersistenceDiagram) -> PersistenceDiagram {
    let mut pts = d.points().to_vec();
    if let Some(p) = pts
        .iter_mut()
        .filter(|p| p.1.is_finite())
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        p.1 *= 2.0;
    }
    PersistenceDiagram::new(d.degree(), pts).expect("doubling a death keeps it valid")
}

fn random_configuration(space: AmbientSpace, n: usize, rng: &mut ChaCha8Rng) -> Configuration {
    let pts = (0..n).map(|_| sample_point(&space, rng)).collect();
    Configuration::new(space, pts).expect("sampled points are valid")
}

fn degrees01() -> BTreeSet<usize> {
    [0, 1].into()
}

/// Runs every claim. Claims run in parallel; the report keeps [`CLAIMS`]
/// order.
pub fn verify_all(
    seed: u64,
    budget: f64,
    opts: &SolverOptions,
    tamper: Option<&str>,
) -> Result<SuiteReport, CliError> {
    if !(budget > 0.0) || !budget.is_finite() {
        return Err(CliError::Input("budget must be positive".into()));
    }
    if let Some(t) = tamper {
        if !TAMPERABLE.contains(&t) {
            return Err(CliError::Input(format!(
                "claim {t:?} has no diagram fixture to tamper with; choose one of {}",
                TAMPERABLE.join(", ")
            )));
        }
    }
    let ctx = Ctx {
        seed,
        budget,
        opts,
        tamper,
    };
    type Runner = fn(&Ctx) -> Result<Vec<ClaimReport>, formetric::Error>;
    let runners: [Runner; 11] = [
        stability_and_sandwich,
        h0_equals_mst,
        bottleneck_solvers,
        circle_exact,
        two_point_sphere,
        torus_counterexample,
        reflection_counterexample,
        three_point_h1,
        phase_inverse,
        quotient_geodesics,
        path_monitoring,
    ];
    let groups: Vec<Vec<ClaimReport>> = runners
        .par_iter()
        .map(|run| run(&ctx))
        .collect::<Result<_, _>>()?;
    let claims: Vec<ClaimReport> = groups.into_iter().flatten().collect();
    let pass = claims.iter().all(|c| c.pass);
    Ok(SuiteReport {
        seed,
        budget,
        tampered: tamper.map(str::to_owned),
        claims,
        pass,
    })
}

fn stability_and_sandwich(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let per_model = ctx.count(500);
    let models = [
        (AmbientSpace::Circle, 8),
        (AmbientSpace::Torus { m: 2 }, 6),
        (AmbientSpace::Sphere2, 8),
    ];
    let jobs: Vec<(usize, usize)> = (0..models.len())
        .flat_map(|m| (0..per_model).map(move |t| (m, t)))
        .collect();
    let degrees = degrees01();
    // (stability holds, sandwich holds, bound - max d_B)
    let results: Vec<(bool, bool, f64)> = jobs
        .par_iter()
        .map(|&(m, t)| {
            let (space, max_n) = models[m];
            let mut rng = ctx.rng(0, m * per_model + t);
            let n = rng.random_range(2..=max_n);
            let x = random_configuration(space, n, &mut rng);
            let y = random_configuration(space, n, &mut rng);
            let a = formation_distance(&x, &y, ctx.opts)?;
            let r = stability_from_parts(&x, &y, a, &signature(&x, &degrees)?, &signature(&y, &degrees)?)?;
            let max_db = r.degrees.iter().map(|d| d.diagram_distance).fold(0.0, f64::max);
            let stable = r
                .degrees
                .iter()
                .all(|d| d.diagram_distance <= r.alignment.upper_bound + SLACK);
            let sandwich = r.half_distortion <= r.alignment.upper_bound + SLACK;
            Ok((stable, sandwich, r.alignment.upper_bound - max_db))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let trials = results.len();
    let unstable = results.iter().filter(|r| !r.0).count();
    let unsandwiched = results.iter().filter(|r| !r.1).count();
    let margin = results.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    Ok(vec![
        report(
            0,
            trials,
            unstable,
            format!("{per_model} pairs per model; smallest bound - d_B = {margin:.3e}"),
        ),
        report(1, trials, unsandwiched, format!("{trials} alignment certificates")),
    ])
}

/// Random metric: either integer distances in `[5, 10]`, which always
/// satisfy the triangle inequality and force ties, or pairwise distances of
/// random points in a random ambient space.
fn random_metric(n: usize, rng: &mut ChaCha8Rng) -> DistanceMatrix {
    let rows: Vec<Vec<f64>> = match rng.random_range(0..4) {
        0 => {
            let mut rows = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    let v = rng.random_range(5..=10) as f64;
                    rows[i][j] = v;
                    rows[j][i] = v;
                }
            }
            rows
        }
        k => {
            let space = [AmbientSpace::Circle, AmbientSpace::Torus { m: 2 }, AmbientSpace::Sphere2][k - 1];
            induced_distance_matrix(&random_configuration(space, n, rng)).to_rows()
        }
    };
    DistanceMatrix::from_rows(&rows).expect("constructed rows form a metric")
}

fn sorted(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(f64::total_cmp);
    v
}

fn h0_equals_mst(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(300);
    let failures: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(2, t);
            let n = rng.random_range(2..=8);
            let dm = random_metric(n, &mut rng);
            let mut h0 = h0_diagram(&dm);
            if t == 0 && ctx.tampered("h0-equals-mst") {
                h0 = tamper_diagram(&h0);
            }
            let deaths = sorted(h0.finite_points().map(|p| p.1).collect());
            let mut ok = deaths == sorted(h0_deaths_by_sweep(&dm));
            let tree = mst(&dm);
            let halves: Vec<f64> = tree.lengths().iter().map(|l| l / 2.0).filter(|d| *d > 0.0).collect();
            ok &= deaths == sorted(halves);
            if n <= 6 {
                let (weight, lengths) = brute_force_mst(&dm)?;
                let ours = sorted(tree.lengths());
                ok &= ours == lengths && ours.iter().sum::<f64>() == weight;
            }
            Ok(!ok)
        })
        .collect::<Result<_, formetric::Error>>()?;
    let bad = failures.iter().filter(|f| **f).count();
    Ok(vec![report(2, trials, bad, format!("{trials} random metrics, n <= 8"))])
}

fn random_diagram(rng: &mut ChaCha8Rng, essential: usize) -> PersistenceDiagram {
    let k = rng.random_range(0..=5);
    // dyadic values create ties between matchings
    let mut pts: Vec<(f64, f64)> = (0..k)
        .map(|_| {
            let b = rng.random_range(0..8) as f64 / 8.0;
            (b, b + rng.random_range(0..8) as f64 / 8.0)
        })
        .collect();
    for _ in 0..essential {
        pts.push((rng.random_range(0..8) as f64 / 8.0, f64::INFINITY));
    }
    PersistenceDiagram::new(1, pts).expect("valid diagram")
}

fn bottleneck_solvers(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(200);
    let failures: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(3, t);
            let n = rng.random_range(1..=7);
            let integer = t % 2 == 0;
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| {
                    (0..n)
                        .map(|_| {
                            if integer {
                                rng.random_range(0..5) as f64
                            } else {
                                rng.random_range(0.0..1.0)
                            }
                        })
                        .collect()
                })
                .collect();
            let c = CostMatrix::new(rows)?;
            let (brute, _) = brute_force_assignment(&c)?;
            let assignment_ok = bottleneck_assignment(&c).value == brute;
            let essential = rng.random_range(0..=2);
            let a = random_diagram(&mut rng, essential);
            let b = random_diagram(&mut rng, essential);
            let diagram_ok = bottleneck_distance(&a, &b)? == brute_force_diagram_bottleneck(&a, &b)?;
            Ok(!(assignment_ok && diagram_ok))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let bad = failures.iter().filter(|f| **f).count();
    Ok(vec![report(
        3,
        trials,
        bad,
        format!("{trials} assignment instances (n <= 7) and {trials} diagram pairs (<= 5 finite points)"),
    )])
}

fn circle_exact(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(200);
    let gaps: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(4, t);
            let n = rng.random_range(1..=6);
            let x = random_configuration(AmbientSpace::Circle, n, &mut rng);
            let y = random_configuration(AmbientSpace::Circle, n, &mut rng);
            let exact = circle_exact_distance(&x, &y)?.upper_bound;
            Ok((exact - grid_oracle(&x, &y, 1e-5)?).abs())
        })
        .collect::<Result<_, formetric::Error>>()?;
    let mut bad = gaps.iter().filter(|g| **g > 2e-5).count();
    let worst = gaps.iter().copied().fold(0.0, f64::max);
    let axiom_trials = ctx.count(40);
    let axioms = metric_axiom_sampler(AmbientSpace::Circle, 5, axiom_trials, ctx.seed, ctx.opts)?;
    bad += axioms.violations();
    Ok(vec![report(
        4,
        trials + axiom_trials,
        bad,
        format!(
            "{trials} grid comparisons, largest gap {worst:.3e}; {axiom_trials} axiom triples, {} violations",
            axioms.violations()
        ),
    )])
}

fn two_point_sphere(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(50);
    let results: Vec<(bool, f64)> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(5, t);
            let dx = rng.random_range(0.05..PI - 0.05);
            let dy = rng.random_range(0.05..PI - 0.05);
            let (x, y) = sphere_two_point_pair(dx, dy)?;
            let d = formation_distance(&x, &y, ctx.opts)?.upper_bound;
            let expected = (dx - dy).abs() / 2.0;
            let hx = h0_diagram(&induced_distance_matrix(&x));
            let hy = h0_diagram(&induced_distance_matrix(&y));
            let db = brute_force_diagram_bottleneck(&hx, &hy)?;
            // the realized separations, which differ from dx, dy by rounding
            let (sx, sy) = (hx.points()[0].1 * 2.0, hy.points()[0].1 * 2.0);
            let closed = ((sx - sy).abs() / 2.0).min(sx.max(sy) / 4.0);
            let ok = (d - expected).abs() <= 1e-5 && (db - closed).abs() <= 1e-12 && db <= d + SLACK;
            Ok((ok, (d - expected).abs()))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let bad = results.iter().filter(|r| !r.0).count();
    let worst = results.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(vec![report(
        5,
        trials,
        bad,
        format!("{trials} separation pairs; largest distance error {worst:.3e}"),
    )])
}

fn torus_counterexample(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let (a, b) = torus_mst_pair(0.2)?;
    let mut ha = h0_diagram(&induced_distance_matrix(&a));
    if ctx.tampered("torus-mst-counterexample") {
        ha = tamper_diagram(&ha);
    }
    let hb = h0_diagram(&induced_distance_matrix(&b));
    let identical = ha == hb;
    let grid = grid_oracle(&a, &b, 1e-3)?;
    // the bound certifies the other side: grid - radius <= d <= upper
    let upper = formation_distance(&a, &b, ctx.opts)?.upper_bound;
    let mut failures = 0;
    if !identical {
        failures += 1;
    }
    if grid < 0.05 {
        failures += 1;
    }
    Ok(vec![report(
        6,
        2,
        failures,
        format!("H0 identical: {identical}; grid distance {grid:.6}; solver bound {upper:.6}"),
    )])
}

fn reflection_counterexample(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let degrees: BTreeSet<usize> = [0, 1, 2].into();
    let (x, y) = reflection_fixture::<f64>();
    let mut sx = signature(&x, &degrees)?;
    if ctx.tampered("reflection-counterexample") {
        sx.insert(0, tamper_diagram(&sx[&0]));
    }
    let sy = signature(&y, &degrees)?;
    let mut failures = 0;
    let mut max_db: f64 = 0.0;
    for k in &degrees {
        let d = bottleneck_distance(&sx[k], &sy[k])?;
        max_db = max_db.max(d);
        if d != 0.0 {
            failures += 1;
        }
    }
    let upper = formation_distance(&x, &y, ctx.opts)?.upper_bound;
    let lower = sphere_distance_lower_bound(&x, &y)?;
    if upper < REFLECTION_FIXTURE_BOUND {
        failures += 1;
    }
    if lower < REFLECTION_FIXTURE_BOUND {
        failures += 1;
    }
    let extra = ctx.count(20);
    let random: Vec<bool> = (0..extra)
        .into_par_iter()
        .map(|t| {
            let n = 4 + t % 3;
            let (x, y) = sphere_reflection_pair::<f64>(n, ctx.seed.wrapping_add(1 + t as u64))?;
            let sx = signature(&x, &degrees)?;
            let sy = signature(&y, &degrees)?;
            let mut ok = true;
            for k in &degrees {
                ok &= bottleneck_distance(&sx[k], &sy[k])? == 0.0;
            }
            Ok(!ok)
        })
        .collect::<Result<_, formetric::Error>>()?;
    failures += random.iter().filter(|f| **f).count();
    Ok(vec![report(
        7,
        degrees.len() + 2 + extra,
        failures,
        format!(
            "fixture max d_B {max_db}; distance bound {upper:.6}, rigorous lower bound {lower:.6}; \
             {extra} further mirror pairs"
        ),
    )])
}

fn three_point_h1(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(100);
    let failures: Vec<bool> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(8, t);
            let dm = random_metric(3, &mut rng);
            Ok(!(rips_diagram(&dm, 1, None)?.is_empty() && naive_h1_diagram(&dm)?.is_empty()))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let bad = failures.iter().filter(|f| **f).count();
    Ok(vec![report(8, trials, bad, format!("{trials} three-point metrics"))])
}

/// A gap labeling for `n - 1` gaps with a random interval order, whose
/// gaps always sum to less than pi.
fn random_labeling(n: usize, rng: &mut ChaCha8Rng) -> GapLabeling {
    let rho = rng.random_range(0.05..0.1);
    let gamma = rng.random_range(0.02..0.04);
    let mut intervals = Vec::with_capacity(n - 1);
    let mut lo = rho + rng.random_range(0.0..0.02);
    for _ in 0..n - 1 {
        let hi = lo + rng.random_range(0.04..0.08);
        intervals.push((lo, hi));
        lo = hi + 2.0 * gamma + rng.random_range(0.0..0.02);
    }
    intervals.shuffle(rng);
    GapLabeling::new(intervals, rho, gamma).expect("constructed labeling is valid")
}

fn placed(gaps: &[f64], rng: &mut ChaCha8Rng) -> Result<Configuration, formetric::Error> {
    let lift = reconstruct_from_gaps(gaps)?;
    let mut order: Vec<usize> = (0..lift.n()).collect();
    order.shuffle(rng);
    place_lift(&lift, rng.random_range(0.0..TAU), &order)
}

fn phase_inverse(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let per_n = ctx.count(200);
    let negatives = ctx.count(50);
    let jobs: Vec<(usize, usize)> = (3..=6)
        .flat_map(|n| (0..per_n + negatives).map(move |t| (n, t)))
        .collect();
    // (is a designed negative, checked, passed, distance / eps)
    let results: Vec<(bool, bool, bool, f64)> = jobs
        .par_iter()
        .map(|&(n, t)| {
            let mut rng = ctx.rng(9, (n << 16) | t);
            let labeling = random_labeling(n, &mut rng);
            let gate = labeling.margin_gate();
            let gx: Vec<f64> = labeling
                .intervals()
                .iter()
                .map(|(lo, hi)| lo + (hi - lo) * rng.random_range(0.3..0.7))
                .collect();
            let negative = t >= per_n;
            let gy: Vec<f64> = if negative {
                // one gap moves by three gates: eps is at least 1.5 gates
                let k = rng.random_range(0..gx.len());
                let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                gx.iter()
                    .enumerate()
                    .map(|(i, g)| if i == k { g + sign * 3.0 * gate } else { *g })
                    .collect()
            } else {
                gx.iter().map(|g| g + gate * rng.random_range(-0.9..0.9)).collect()
            };
            let x = placed(&gx, &mut rng)?;
            let y = placed(&gy, &mut rng)?;
            let r = inverse_bound_check(&x, &y, &labeling)?;
            let ratio = match r.outcome {
                InverseOutcome::Checked { distance, .. } if r.epsilon > 0.0 => distance / r.epsilon,
                _ => 0.0,
            };
            Ok((negative, r.checked(), r.pass(), ratio))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let positives = results.iter().filter(|r| !r.0);
    // every positive must be in scope and pass; no negative may be asserted
    let bad_positive = positives.clone().filter(|r| !(r.1 && r.2)).count();
    let asserted_negative = results.iter().filter(|r| r.0 && r.1).count();
    let worst = positives.map(|r| r.3).fold(0.0, f64::max);
    Ok(vec![report(
        9,
        results.len(),
        bad_positive + asserted_negative,
        format!(
            "{per_n} labeled pairs per n in 3..=6, largest d / eps {worst:.3}; \
             {negatives} gate violations per n, {asserted_negative} asserted"
        ),
    )])
}

fn quotient_geodesics(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(100);
    let circle: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(10, t);
            let n = rng.random_range(2..=6);
            let x = random_configuration(AmbientSpace::Circle, n, &mut rng);
            let y = random_configuration(AmbientSpace::Circle, n, &mut rng);
            let geo = QuotientGeodesic::new(&x, &y, ctx.opts)?;
            let d = geo.length();
            let pts: Vec<Configuration> = (0..=10)
                .map(|k| geo.point(k as f64 / 10.0, CutLocus::Resolve))
                .collect::<Result<_, _>>()?;
            let mut worst: f64 = 0.0;
            for i in 0..pts.len() {
                for j in (i + 1)..pts.len() {
                    let dij = circle_exact_distance(&pts[i], &pts[j])?.upper_bound;
                    worst = worst.max((dij - (j - i) as f64 / 10.0 * d).abs());
                }
            }
            Ok(worst)
        })
        .collect::<Result<_, formetric::Error>>()?;
    let sphere_trials = ctx.count(20);
    let sphere: Vec<f64> = (0..sphere_trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ctx.rng(10, (1 << 20) | t);
            let n = rng.random_range(2..=5);
            let x = random_configuration(AmbientSpace::Sphere2, n, &mut rng);
            let y = random_configuration(AmbientSpace::Sphere2, n, &mut rng);
            let geo = QuotientGeodesic::new(&x, &y, ctx.opts)?;
            let half = geo.length() / 2.0;
            let mid = geo.point(0.5, CutLocus::Resolve)?;
            let a = formation_distance(&x, &mid, ctx.opts)?.upper_bound;
            let b = formation_distance(&mid, &y, ctx.opts)?.upper_bound;
            Ok((a - half).abs().max((b - half).abs()))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let bad = circle.iter().filter(|w| **w > 1e-9).count() + sphere.iter().filter(|w| **w > 1e-5).count();
    let wc = circle.iter().copied().fold(0.0, f64::max);
    let ws = sphere.iter().copied().fold(0.0, f64::max);
    Ok(vec![report(
        10,
        trials + sphere_trials,
        bad,
        format!(
            "{trials} circle geodesics, largest speed defect {wc:.3e}; \
             {sphere_trials} sphere midpoints, largest defect {ws:.3e}"
        ),
    )])
}

fn path_monitoring(ctx: &Ctx) -> Result<Vec<ClaimReport>, formetric::Error> {
    let trials = ctx.count(20);
    let degrees = degrees01();
    let results: Vec<(bool, f64)> = (0..trials)
        .map(|t| {
            let mut rng = ctx.rng(11, t);
            let n = rng.random_range(2..=6);
            let x = random_configuration(AmbientSpace::Circle, n, &mut rng);
            let y = random_configuration(AmbientSpace::Circle, n, &mut rng);
            let geo = QuotientGeodesic::new(&x, &y, ctx.opts)?;
            let frames = (0..=10)
                .map(|k| {
                    let s = k as f64 / 10.0;
                    geo.point(s, CutLocus::Resolve).map(|c| (s, c))
                })
                .collect::<Result<Vec<_>, _>>()?;
            let trajectory = Trajectory::new(frames).expect("times increase");
            let r = monitor(&trajectory, &degrees, ctx.opts).map_err(|e| formetric::Error::InvalidInput(e.to_string()))?;
            let speed = geo.length();
            Ok((r.lipschitz_consistent && r.max_rate <= speed + SLACK, r.max_rate - speed))
        })
        .collect::<Result<_, formetric::Error>>()?;
    let bad = results.iter().filter(|r| !r.0).count();
    let excess = results.iter().map(|r| r.1).fold(f64::NEG_INFINITY, f64::max);
    Ok(vec![report(
        11,
        trials,
        bad,
        format!("{trials} trajectories of 11 frames; largest rate - speed {excess:.3e}"),
    )])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tampering_doubles_the_largest_death() {
        let d = PersistenceDiagram::new(0, vec![(0.0, 0.5), (0.0, 0.25), (0.0, f64::INFINITY)]).unwrap();
        let t = tamper_diagram(&d);
        assert!(t.points().contains(&(0.0, 1.0)));
        assert!(t.points().contains(&(0.0, 0.25)));
        assert_eq!(t.essential_births().count(), 1);
    }

    #[test]
    fn labelings_fit_in_a_semicircle() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for n in 3..=6 {
            let l = random_labeling(n, &mut rng);
            let total: f64 = l.intervals().iter().map(|iv| iv.1).sum();
            assert!(total < PI);
        }
    }

    #[test]
    fn budget_scales_counts() {
        let opts = SolverOptions::default();
        let ctx = Ctx {
            seed: 0,
            budget: 0.01,
            opts: &opts,
            tamper: None,
        };
        assert_eq!(ctx.count(500), 5);
        assert_eq!(ctx.count(50), 1);
    }

    #[test]
    fn unknown_tamper_target_is_an_input_error() {
        let err = verify_all(0, 0.01, &SolverOptions::default(), Some("gh-sandwich")).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}

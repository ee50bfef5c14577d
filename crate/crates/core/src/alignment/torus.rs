use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ambient::{wrap_angle, wrap_signed, wrapped_difference, GroupElement};
use crate::error::{invalid, Result};
use crate::formation::{check_comparable, Configuration};
use crate::scalar::{cmp, Scalar};

use super::{AlignmentResult, Method, Objective, SolverOptions};

/// Cap on objective evaluations per one-dimensional line search.
const LINE_SEARCH_EVALS: usize = 40;

/// Polished starts that go on to the pattern search.
const REFINED_STARTS: usize = 8;

/// Multi-start translation search on the flat torus.
///
/// Starts are every translation carrying some `x_i` onto some `y_j`
/// followed by `restarts` uniform random translations. Every start is
/// polished by alternating the optimal relabeling with the exact optimal
/// translation for it; the best few are then refined by a pattern search
/// with golden-section line searches along fixed directions, re-solving the
/// assignment at each evaluation. Ties go to the earlier start.
pub fn torus_multistart<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    opts: &SolverOptions<S>,
) -> Result<AlignmentResult<S>> {
    check_comparable(x, y)?;
    opts.validate()?;
    let m = match x.space().angle_count() {
        Some(m) => m,
        None => return invalid("torus solver needs an angular space"),
    };
    let n = x.n();
    let mut objective = Objective::new(x, y);
    if n == 0 {
        let g = GroupElement::identity(x.space());
        return Ok(AlignmentResult::certify(
            x,
            y,
            g,
            crate::formation::Permutation::identity(0),
            true,
            Method::TorusMultistart,
            0,
        ));
    }

    let mut starts: Vec<Vec<S>> = Vec::with_capacity(n * n + opts.restarts);
    for p in x.points() {
        let a = p.as_angles().expect("angular points");
        for q in y.points() {
            let b = q.as_angles().expect("angular points");
            starts.push((0..m).map(|c| wrap_angle(b[c] - a[c])).collect());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.restarts {
        starts.push((0..m).map(|_| S::lit(rng.random_range(0.0..std::f64::consts::TAU))).collect());
    }

    // every start descends to a fixed point of the relabel-and-recenter
    // map; only the most promising go through the pattern search
    let mut polished: Vec<(S, Vec<S>)> = Vec::with_capacity(starts.len());
    for start in starts {
        let v = objective.value(&GroupElement::Translation(start.clone()));
        let (v, t) = polish(&mut objective, start, v, opts.refine_iters);
        let done = v == S::zero();
        polished.push((v, t));
        if done {
            break;
        }
    }
    let mut order: Vec<usize> = (0..polished.len()).collect();
    order.sort_by(|a, b| cmp(&polished[*a].0, &polished[*b].0).then(a.cmp(b)));
    let mut best: Option<(S, Vec<S>)> = None;
    for &k in order.iter().take(REFINED_STARTS) {
        let (v, t) = refine(&mut objective, polished[k].1.clone(), opts);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, t));
        }
    }
    let (_, t) = best.expect("at least one start");
    let g = GroupElement::Translation(t);
    let sigma = objective.sigma(&g);
    Ok(AlignmentResult::certify(
        x,
        y,
        g,
        sigma,
        false,
        Method::TorusMultistart,
        objective.evaluations,
    ))
}

/// Search directions: the coordinate axes and, in low dimension, the
/// diagonals of every coordinate plane, which lets the descent follow
/// ridges where two distance constraints are active at once.
fn directions<S: Scalar>(m: usize) -> Vec<Vec<S>> {
    let mut out = Vec::new();
    for c in 0..m {
        let mut d = vec![S::zero(); m];
        d[c] = S::one();
        out.push(d);
    }
    if m <= 4 {
        let h = S::lit(std::f64::consts::FRAC_1_SQRT_2);
        for a in 0..m {
            for b in (a + 1)..m {
                for sign in [S::one(), -S::one()] {
                    let mut d = vec![S::zero(); m];
                    d[a] = h;
                    d[b] = sign * h;
                    out.push(d);
                }
            }
        }
    }
    out
}

fn refine<S: Scalar>(
    objective: &mut Objective<'_, S>,
    mut t: Vec<S>,
    opts: &SolverOptions<S>,
) -> (S, Vec<S>) {
    let mut value = objective.value(&GroupElement::Translation(t.clone()));
    let dirs = directions::<S>(t.len());
    // the optimum is within the current value of any start
    let mut h = S::PI().min(S::two() * value);
    for _ in 0..opts.refine_iters {
        if value == S::zero() || h < opts.tolerance {
            break;
        }
        let mut improved = false;
        for dir in &dirs {
            if let Some((v, moved)) = line_search(objective, &t, dir, h, value, opts.tolerance) {
                value = v;
                t = moved;
                improved = true;
            }
        }
        if !improved {
            h = h * S::lit(0.5);
        }
    }
    polish(objective, t, value, opts.refine_iters)
}

/// Alternates between the optimal relabeling at `t` and the exact optimal
/// translation for that relabeling, which is the center of the smallest
/// ball enclosing the offsets `y_sigma(i) - x_i - t`.
fn polish<S: Scalar>(
    objective: &mut Objective<'_, S>,
    mut t: Vec<S>,
    mut value: S,
    rounds: usize,
) -> (S, Vec<S>) {
    for _ in 0..rounds {
        if value == S::zero() {
            break;
        }
        let g = GroupElement::Translation(t.clone());
        let sigma = objective.sigma(&g);
        let offsets: Vec<Vec<S>> = objective
            .x_points()
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let a = p.as_angles().expect("angular points");
                let b = objective.y_points()[sigma.apply(i)].as_angles().expect("angular points");
                a.iter()
                    .zip(b)
                    .zip(&t)
                    .map(|((a, b), s)| wrap_signed(*b - *a - *s))
                    .collect()
            })
            .collect();
        let Some(center) = enclosing_ball_center(&offsets) else {
            break;
        };
        let moved: Vec<S> = t.iter().zip(&center).map(|(s, c)| wrap_angle(*s + *c)).collect();
        let v = objective.value(&GroupElement::Translation(moved.clone()));
        if !(v < value) {
            break;
        }
        value = v;
        t = moved;
    }
    (value, t)
}

/// Center of the smallest Euclidean ball containing `points` (Welzl).
pub(crate) fn enclosing_ball_center<S: Scalar>(points: &[Vec<S>]) -> Option<Vec<S>> {
    let m = points.first()?.len();
    let mut boundary = Vec::with_capacity(m + 1);
    let (center, _) = welzl(points, points.len(), &mut boundary, m)?;
    Some(center)
}

fn welzl<S: Scalar>(
    points: &[Vec<S>],
    k: usize,
    boundary: &mut Vec<Vec<S>>,
    m: usize,
) -> Option<(Vec<S>, S)> {
    if k == 0 || boundary.len() == m + 1 {
        return ball_through(boundary, m);
    }
    let p = &points[k - 1];
    if let Some((c, r2)) = welzl(points, k - 1, boundary, m) {
        // relative slack keeps points on the sphere from recursing forever
        if squared_distance(&c, p) <= r2 * (S::one() + S::lit(1e-12)) + S::lit(1e-300) {
            return Some((c, r2));
        }
    }
    boundary.push(p.clone());
    let out = welzl(points, k - 1, boundary, m);
    boundary.pop();
    out
}

fn squared_distance<S: Scalar>(a: &[S], b: &[S]) -> S {
    a.iter().zip(b).fold(S::zero(), |acc, (x, y)| acc + (*x - *y) * (*x - *y))
}

/// Smallest ball with all of `support` on its boundary: its center lies in
/// their affine hull and solves a Gram system.
fn ball_through<S: Scalar>(support: &[Vec<S>], m: usize) -> Option<(Vec<S>, S)> {
    let Some(p0) = support.first() else {
        return Some((vec![S::zero(); m], -S::one()));
    };
    let a: Vec<Vec<S>> = support[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(x, y)| *x - *y).collect())
        .collect();
    let k = a.len();
    let dot = |u: &[S], v: &[S]| u.iter().zip(v).fold(S::zero(), |acc, (x, y)| acc + *x * *y);
    let mut gram: Vec<Vec<S>> = (0..k)
        .map(|i| {
            let mut row: Vec<S> = (0..k).map(|j| S::two() * dot(&a[i], &a[j])).collect();
            row.push(dot(&a[i], &a[i]));
            row
        })
        .collect();
    let lambda = solve(&mut gram)?;
    let mut c = p0.clone();
    for (l, ai) in lambda.iter().zip(&a) {
        for (cj, aij) in c.iter_mut().zip(ai) {
            *cj = *cj + *l * *aij;
        }
    }
    let r2 = squared_distance(&c, p0);
    Some((c, r2))
}

/// Gaussian elimination with partial pivoting on an augmented matrix.
fn solve<S: Scalar>(aug: &mut [Vec<S>]) -> Option<Vec<S>> {
    let k = aug.len();
    for col in 0..k {
        let pivot = (col..k).max_by(|&i, &j| cmp(&aug[i][col].abs(), &aug[j][col].abs()))?;
        if !(aug[pivot][col].abs() > S::lit(1e-300)) {
            return None;
        }
        aug.swap(col, pivot);
        for r in (col + 1)..k {
            let f = aug[r][col] / aug[col][col];
            for c in col..=k {
                let v = aug[col][c];
                aug[r][c] = aug[r][c] - f * v;
            }
        }
    }
    let mut x = vec![S::zero(); k];
    for r in (0..k).rev() {
        let mut acc = aug[r][k];
        for c in (r + 1)..k {
            acc = acc - aug[r][c] * x[c];
        }
        x[r] = acc / aug[r][r];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Golden-section search along `dir` over offsets in `[-h, h]`, returning
/// the best evaluated point if it improves on `current`.
fn line_search<S: Scalar>(
    objective: &mut Objective<'_, S>,
    t: &[S],
    dir: &[S],
    h: S,
    current: S,
    tolerance: S,
) -> Option<(S, Vec<S>)> {
    let ratio = S::lit(0.618_033_988_749_894_8);
    let at = |offset: S| -> Vec<S> {
        t.iter().zip(dir).map(|(a, d)| wrap_angle(*a + offset * *d)).collect()
    };
    let eval = |offset: S, objective: &mut Objective<'_, S>| {
        let p = at(offset);
        objective.value(&GroupElement::Translation(p))
    };
    let (mut lo, mut hi) = (-h, h);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = eval(x1, objective);
    let mut f2 = eval(x2, objective);
    let mut best = (current, S::zero());
    for (f, x) in [(f1, x1), (f2, x2)] {
        if f < best.0 {
            best = (f, x);
        }
    }
    let mut evals = 2;
    while hi - lo > tolerance && evals < LINE_SEARCH_EVALS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval(x1, objective);
            if f1 < best.0 {
                best = (f1, x1);
            }
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval(x2, objective);
            if f2 < best.0 {
                best = (f2, x2);
            }
        }
        evals += 1;
    }
    if best.0 < current {
        let moved = at(best.1);
        // an offset lost to rounding is no move at all
        if moved.iter().zip(t).any(|(a, b)| wrapped_difference(*a, *b) != S::zero()) {
            return Some((best.0, moved));
        }
    }
    None
}

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::ambient::{distance_unchecked, GroupElement, Point};
use crate::error::{invalid, Result};
use crate::formation::{check_comparable, Configuration};
use crate::rotation::{self, Quaternion, Vec3};
use crate::scalar::{cmp, Scalar};

use super::{AlignmentResult, Method, Objective, SolverOptions};

/// Pairs of `x` used to build frame-matching starts.
const FRAME_PAIRS: usize = 6;
/// Number of best-scoring starts that get refined.
const REFINED_STARTS: usize = 8;
/// Pairs closer than this to coinciding or antipodal define no frame.
const FRAME_DEGENERACY: f64 = 1e-6;
/// Iteration cap of one ellipsoid run; each shrinks the ellipsoid's
/// volume by a constant factor.
const ELLIPSOID_ITERS: usize = 800;

/// `count` rotations spread evenly over SO(3) (super-Fibonacci spirals).
pub fn super_fibonacci_rotations<S: Scalar>(count: usize) -> Vec<Quaternion<S>> {
    let phi = 2f64.sqrt();
    let psi = 1.533_751_168_755_204_3_f64;
    let n = count as f64;
    (0..count)
        .map(|i| {
            let s = i as f64 + 0.5;
            let r = (s / n).sqrt();
            let big_r = (1.0 - s / n).sqrt();
            let alpha = std::f64::consts::TAU * s / phi;
            let beta = std::f64::consts::TAU * s / psi;
            Quaternion::from_components(
                S::lit(r * alpha.sin()),
                S::lit(r * alpha.cos()),
                S::lit(big_r * beta.sin()),
                S::lit(big_r * beta.cos()),
            )
            .expect("unit quaternion")
        })
        .collect()
}

/// Orthonormal frame with first axis on the bisector of `a` and `b`.
fn midpoint_frame<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Option<[Vec3<S>; 3]> {
    let e1 = rotation::normalize(&rotation::add(a, b))?;
    let e2 = rotation::normalize(&rotation::sub(b, a))?;
    Some([e1, e2, rotation::cross(&e1, &e2)])
}

/// Orthonormal frame with first axis `a` and `b` in the first quadrant.
fn anchor_frame<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Option<[Vec3<S>; 3]> {
    let e1 = *a;
    let e2 = rotation::normalize(&rotation::sub(b, &rotation::scale(a, rotation::dot(a, b))))?;
    Some([e1, e2, rotation::cross(&e1, &e2)])
}

fn frame_usable<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> bool {
    let tol = S::lit(FRAME_DEGENERACY);
    rotation::norm(&rotation::add(a, b)) > tol && rotation::norm(&rotation::sub(a, b)) > tol
}

/// Shortest rotation carrying the unit vector `a` onto `b`.
fn rotation_onto<S: Scalar>(a: &Vec3<S>, b: &Vec3<S>) -> Quaternion<S> {
    let axis = rotation::cross(a, b);
    let angle = distance_unchecked(&Point::Sphere(*a), &Point::Sphere(*b));
    match rotation::normalize(&axis) {
        Some(u) => Quaternion::from_rotation_vector(&rotation::scale(&u, angle)),
        None if rotation::dot(a, b) > S::zero() => Quaternion::identity(),
        None => {
            // antipodal: half turn about any axis perpendicular to `a`
            let helper = if a[0].abs() < S::lit(0.9) {
                [S::one(), S::zero(), S::zero()]
            } else {
                [S::zero(), S::one(), S::zero()]
            };
            let u = rotation::normalize(&rotation::cross(a, &helper)).expect("perpendicular");
            Quaternion::from_rotation_vector(&rotation::scale(&u, S::PI()))
        }
    }
}

fn vectors<S: Scalar>(c: &Configuration<S>) -> Vec<Vec3<S>> {
    c.points().iter().filter_map(Point::as_sphere).copied().collect()
}

/// Multi-start rotation search on the sphere.
///
/// Starts are a super-Fibonacci set of `restarts` rotations, the rotations
/// carrying `x_0` onto each `y_j`, and rotations matching frames built on a
/// few seeded pairs of `x` with frames on every ordered pair of `y`. The
/// best [`REFINED_STARTS`] are refined by an averaged-subgradient descent
/// on the active constraints with backtracking, re-solving the assignment
/// at every step, and then polished by alternating the optimal relabeling
/// with an ellipsoid-method minimization over rotations for it.
pub fn so3_multistart<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    opts: &SolverOptions<S>,
) -> Result<AlignmentResult<S>> {
    check_comparable(x, y)?;
    opts.validate()?;
    if x.space().angle_count().is_some() {
        return invalid("rotation solver needs sphere configurations");
    }
    let xs = vectors(x);
    let ys = vectors(y);
    let n = xs.len();
    let mut objective = Objective::new(x, y);

    let mut starts = super_fibonacci_rotations::<S>(opts.restarts);
    if let Some(a) = xs.first() {
        starts.extend(ys.iter().map(|b| rotation_onto(a, b)));
    }
    let mut x_pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
        .filter(|&(i, j)| frame_usable(&xs[i], &xs[j]))
        .collect();
    if x_pairs.len() > FRAME_PAIRS {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        let mut picked: Vec<usize> = sample(&mut rng, x_pairs.len(), FRAME_PAIRS).into_vec();
        picked.sort_unstable();
        x_pairs = picked.into_iter().map(|k| x_pairs[k]).collect();
    }
    for &(i, j) in &x_pairs {
        let (fm, fa) = (midpoint_frame(&xs[i], &xs[j]), anchor_frame(&xs[i], &xs[j]));
        for k in 0..n {
            for l in 0..n {
                if k == l || !frame_usable(&ys[k], &ys[l]) {
                    continue;
                }
                if let (Some(f), Some(t)) = (&fm, midpoint_frame(&ys[k], &ys[l])) {
                    starts.push(Quaternion::between_frames(f, &t));
                }
                if let (Some(f), Some(t)) = (&fa, anchor_frame(&ys[k], &ys[l])) {
                    starts.push(Quaternion::between_frames(f, &t));
                }
            }
        }
    }

    let mut scored: Vec<(S, usize)> = starts
        .iter()
        .enumerate()
        .map(|(k, q)| (objective.value(&GroupElement::Rotation(*q)), k))
        .collect();
    scored.sort_by(|a, b| cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));

    let mut best: Option<(S, Quaternion<S>)> = None;
    for &(v, k) in scored.iter().take(REFINED_STARTS) {
        let refined = if v == S::zero() {
            (v, starts[k])
        } else {
            let (v, q) = refine(&mut objective, &xs, &ys, starts[k], v, opts);
            polish(&mut objective, &xs, &ys, q, v, opts)
        };
        if best.as_ref().is_none_or(|(bv, _)| refined.0 < *bv) {
            best = Some(refined);
        }
        if best.as_ref().is_some_and(|(bv, _)| *bv == S::zero()) {
            break;
        }
    }
    let (_, q) = best.expect("at least one start");
    let g = GroupElement::Rotation(q);
    let sigma = objective.sigma(&g);
    Ok(AlignmentResult::certify(
        x,
        y,
        g,
        sigma,
        false,
        Method::So3Multistart,
        objective.evaluations,
    ))
}

/// Mean rotation axis moving every near-maximal pair `R x_i -> y_sigma(i)`
/// closer, or `None` when the pulls cancel.
fn descent_axis<S: Scalar>(
    moved: &[Vec3<S>],
    ys: &[Vec3<S>],
    sigma: &[usize],
    value: S,
    band: S,
) -> Option<Vec3<S>> {
    let mut acc = [S::zero(); 3];
    for (i, u) in moved.iter().enumerate() {
        let v = &ys[sigma[i]];
        let d = distance_unchecked(&Point::Sphere(*u), &Point::Sphere(*v));
        if d + band < value {
            continue;
        }
        if let Some(axis) = rotation::normalize(&rotation::cross(u, v)) {
            acc = rotation::add(&acc, &axis);
        }
    }
    let n = rotation::norm(&acc);
    if n <= S::lit(1e-12) {
        return None;
    }
    Some(rotation::scale(&acc, S::one() / n))
}

fn refine<S: Scalar>(
    objective: &mut Objective<'_, S>,
    xs: &[Vec3<S>],
    ys: &[Vec3<S>],
    mut q: Quaternion<S>,
    mut value: S,
    opts: &SolverOptions<S>,
) -> (S, Quaternion<S>) {
    let min_step = opts.tolerance * S::lit(1e-2);
    let mut step = value;
    for _ in 0..opts.refine_iters {
        if value == S::zero() {
            break;
        }
        let sigma = objective.sigma(&GroupElement::Rotation(q));
        let moved: Vec<Vec3<S>> = xs.iter().map(|p| q.rotate(p)).collect();
        let mut accepted = false;
        let bands = [S::lit(1e-9) + value * S::lit(1e-6), value * S::lit(0.05)];
        for band in bands {
            let Some(axis) = descent_axis(&moved, ys, sigma.images(), value, band) else {
                continue;
            };
            let mut s = step.max(min_step * S::two());
            while s > min_step {
                let trial = Quaternion::from_rotation_vector(&rotation::scale(&axis, s)).compose(&q);
                let v = objective.value(&GroupElement::Rotation(trial));
                if v < value {
                    value = v;
                    q = trial;
                    step = s * S::two();
                    accepted = true;
                    break;
                }
                s = s * S::lit(0.5);
            }
            if accepted {
                break;
            }
        }
        if !accepted {
            break;
        }
    }
    (value, q)
}

fn mat_vec<S: Scalar>(m: &[[S; 3]; 3], v: &Vec3<S>) -> Vec3<S> {
    [rotation::dot(&m[0], v), rotation::dot(&m[1], v), rotation::dot(&m[2], v)]
}

/// `J_l(w)^T g`, where the left Jacobian `J_l` maps a change of the rotation
/// vector `w` to the left perturbation of `exp(w)`.
fn left_jacobian_transpose<S: Scalar>(w: &Vec3<S>, g: &Vec3<S>) -> Vec3<S> {
    let theta = rotation::norm(w);
    let (a, b) = if theta < S::lit(1e-6) {
        (S::lit(0.5), S::one() / S::lit(6.0))
    } else {
        let t2 = theta * theta;
        ((S::one() - theta.cos()) / t2, (theta - theta.sin()) / (t2 * theta))
    };
    // W^T = -W for the cross-product matrix
    let wg = rotation::cross(g, w);
    let wwg = rotation::cross(&wg, w);
    rotation::add(g, &rotation::add(&rotation::scale(&wg, a), &rotation::scale(&wwg, b)))
}

/// Value and a subgradient of `w -> max_i d(exp(w) q x_i, y_sigma(i))`.
fn fixed_assignment_value<S: Scalar>(
    xs: &[Vec3<S>],
    ys: &[Vec3<S>],
    sigma: &[usize],
    q: &Quaternion<S>,
    w: &Vec3<S>,
) -> (S, Vec3<S>) {
    let r = Quaternion::from_rotation_vector(w).compose(q);
    let mut worst = (S::neg_infinity(), [S::zero(); 3]);
    for (i, x) in xs.iter().enumerate() {
        let p = r.rotate(x);
        let y = &ys[sigma[i]];
        let d = distance_unchecked(&Point::Sphere(p), &Point::Sphere(*y));
        if d > worst.0 {
            // moving p towards y along the great circle lowers d at unit rate
            let g = rotation::normalize(&rotation::cross(&p, y))
                .map(|u| rotation::scale(&u, -S::one()))
                .unwrap_or([S::zero(); 3]);
            worst = (d, g);
        }
    }
    (worst.0, left_jacobian_transpose(w, &worst.1))
}

/// Central-cut ellipsoid method on the rotation vector around `q`, started
/// from a ball of radius `radius`. Returns the best rotation visited.
fn ellipsoid_minimize<S: Scalar>(
    xs: &[Vec3<S>],
    ys: &[Vec3<S>],
    sigma: &[usize],
    q: &Quaternion<S>,
    radius: S,
    tolerance: S,
    evaluations: &mut usize,
) -> (S, Quaternion<S>) {
    let z = S::zero();
    let r2 = radius * radius;
    let mut p = [[r2, z, z], [z, r2, z], [z, z, r2]];
    let mut c = [z; 3];
    let mut best = (S::infinity(), [z; 3]);
    let three = S::lit(3.0);
    for _ in 0..ELLIPSOID_ITERS {
        let (v, g) = fixed_assignment_value(xs, ys, sigma, q, &c);
        *evaluations += 1;
        if v < best.0 {
            best = (v, c);
        }
        let pg = mat_vec(&p, &g);
        let gpg = rotation::dot(&g, &pg);
        // for convex objectives sqrt(g^T P g) bounds the remaining gap
        if !(gpg > z) || gpg.sqrt() < tolerance {
            break;
        }
        let b = rotation::scale(&pg, S::one() / gpg.sqrt());
        c = rotation::sub(&c, &rotation::scale(&b, S::one() / (three + S::one())));
        let k = S::lit(9.0 / 8.0);
        let h = S::two() / (three + S::one());
        for (i, row) in p.iter_mut().enumerate() {
            for (j, e) in row.iter_mut().enumerate() {
                *e = k * (*e - h * b[i] * b[j]);
            }
        }
    }
    (best.0, Quaternion::from_rotation_vector(&best.1).compose(q))
}

/// Alternates the optimal relabeling at `q` with the best rotation for that
/// relabeling, until the objective stops decreasing.
fn polish<S: Scalar>(
    objective: &mut Objective<'_, S>,
    xs: &[Vec3<S>],
    ys: &[Vec3<S>],
    mut q: Quaternion<S>,
    mut value: S,
    opts: &SolverOptions<S>,
) -> (S, Quaternion<S>) {
    let tolerance = opts.tolerance * S::lit(1e-6);
    for _ in 0..opts.refine_iters {
        if value == S::zero() {
            break;
        }
        let sigma = objective.sigma(&GroupElement::Rotation(q));
        let radius = S::one().min(S::lit(4.0) * value);
        let mut evaluations = 0;
        let (_, moved) = ellipsoid_minimize(xs, ys, sigma.images(), &q, radius, tolerance, &mut evaluations);
        objective.evaluations += evaluations;
        let moved = moved.renormalized();
        let v = objective.value(&GroupElement::Rotation(moved));
        if !(v < value) {
            break;
        }
        value = v;
        q = moved;
    }
    (value, q)
}

use crate::ambient::{wrap_angle, GroupElement};
use crate::error::{invalid, Result};
use crate::formation::{check_comparable, Configuration};
use crate::scalar::{cmp, Scalar};

use super::{AlignmentResult, Method, Objective};

/// Candidate rotations at which the circle objective can attain its minimum.
///
/// As a function of the rotation `t`, each `d(x_i + t, y_j)` is a tent with
/// slopes +-1, minimum at `y_j - x_i` and peak opposite to it. The
/// objective `min_sigma max_i` of such tents is piecewise linear with slopes
/// +-1, so a local minimum is either a tent minimum or a crossing of a
/// rising and a falling tent, which happens at the midpoint of the two tent
/// centers or at its antipode.
pub(crate) fn circle_candidates<S: Scalar>(xs: &[S], ys: &[S]) -> Vec<S> {
    let mut centers: Vec<S> = xs
        .iter()
        .flat_map(|&a| ys.iter().map(move |&b| wrap_angle(b - a)))
        .collect();
    centers.sort_by(cmp);
    centers.dedup();
    let mut out = centers.clone();
    let half = S::lit(0.5);
    for (k, &a) in centers.iter().enumerate() {
        for &b in &centers[k + 1..] {
            let mid = wrap_angle((a + b) * half);
            out.push(mid);
            out.push(wrap_angle(mid + S::PI()));
        }
    }
    out.sort_by(cmp);
    out.dedup();
    out
}

/// Exact formation distance on the phase circle.
///
/// Evaluates the objective on every candidate rotation from
/// [`circle_candidates`] and keeps the smallest value, breaking ties by the
/// smallest rotation angle.
pub fn circle_exact_distance<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
) -> Result<AlignmentResult<S>> {
    check_comparable(x, y)?;
    if !x.space().is_one_dimensional_phase() {
        return invalid(format!(
            "exact circle solver needs a one-dimensional phase space, got {}",
            x.space().name()
        ));
    }
    let xs = x.phases().expect("angular points");
    let ys = y.phases().expect("angular points");
    let mut objective = Objective::new(x, y);
    let mut best = S::infinity();
    let mut best_t = S::zero();
    for t in circle_candidates(&xs, &ys) {
        let g = GroupElement::Translation(vec![t]);
        if let Some(v) = objective.value_below(&g, best) {
            best = v;
            best_t = t;
            if best == S::zero() {
                break;
            }
        }
    }
    let g = GroupElement::Translation(vec![best_t]);
    let sigma = objective.sigma(&g);
    Ok(AlignmentResult::certify(
        x,
        y,
        g,
        sigma,
        true,
        Method::CircleExact,
        objective.evaluations,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::alignment::grid_oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    #[test]
    fn translate_example() {
        let x = Configuration::circle(&[0.0, 1.0]).unwrap();
        let y = Configuration::circle(&[2.0, 3.0]).unwrap();
        let r = circle_exact_distance(&x, &y).unwrap();
        assert_eq!(r.upper_bound, 0.0);
        assert!(r.exact);
        match &r.g {
            GroupElement::Translation(t) => assert_eq!(t[0], 2.0),
            _ => unreachable!(),
        }
    }

    #[test]
    fn single_points_are_always_aligned() {
        let x = Configuration::circle(&[0.0]).unwrap();
        let y = Configuration::circle(&[PI]).unwrap();
        assert_eq!(circle_exact_distance(&x, &y).unwrap().upper_bound, 0.0);
    }

    #[test]
    fn labeled_gap_example() {
        // lifts (0, 0.4, 1.2) and (0, 0.42, 1.2): shift by 0.01 balances
        let x = Configuration::circle(&[0.0f64, 0.4, 1.2]).unwrap();
        let y = Configuration::circle(&[0.0, 0.42, 1.2]).unwrap();
        let r = circle_exact_distance(&x, &y).unwrap();
        assert!((r.upper_bound - 0.01).abs() < 1e-9);
        let grid = grid_oracle(&x, &y, 1e-4).unwrap();
        assert!((grid - r.upper_bound).abs() <= 1e-4);
    }

    #[test]
    fn matches_dense_grid_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..15 {
            let n = rng.random_range(1..=4);
            let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
            let x = Configuration::circle(&xs).unwrap();
            let y = Configuration::circle(&ys).unwrap();
            let exact = circle_exact_distance(&x, &y).unwrap().upper_bound;
            let grid = grid_oracle(&x, &y, 1e-5).unwrap();
            assert!((exact - grid).abs() <= 2e-5, "{exact} vs {grid}");
            assert!(exact <= grid + 1e-12);
        }
    }

    #[test]
    fn wrong_space_is_rejected() {
        let x = Configuration::torus(2, &[vec![0.0, 0.0]]).unwrap();
        assert!(circle_exact_distance(&x, &x).is_err());
    }
}

//! Phase formations that fit in a half circle: anchored lifts, gap vectors,
//! gap labelings and the inverse bound controlling the formation distance
//! by the H0 bottleneck distance.

use crate::alignment::circle_exact_distance;
use crate::ambient::{point_distance, wrap_angle};
use crate::diagram::bottleneck_distance;
use crate::error::{invalid, Error, Result};
use crate::formation::{induced_distance_matrix, Configuration};
use crate::rips::h0_diagram;
use crate::scalar::{cmp, Scalar};

/// Margin below `pi` required of the span of a lift.
pub const SEMICIRCLE_MARGIN: f64 = 1e-12;
/// Angles closer than this count as colliding.
pub const PHASE_COLLISION: f64 = 1e-12;
/// Slack on labeling separations and gap-control checks.
pub const LABELING_SLACK: f64 = 1e-12;
/// Slack on the two-sided distance bound.
pub const INVERSE_SLACK: f64 = 1e-9;

/// Sorted real-angle representative of a half-circle phase formation, with
/// its first angle at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct AnchoredLift<S> {
    thetas: Vec<S>,
    gaps: Vec<S>,
}

impl<S: Scalar> AnchoredLift<S> {
    pub fn new(thetas: Vec<S>) -> Result<Self> {
        match thetas.first() {
            None => return invalid("a lift needs at least one angle"),
            Some(t) if *t != S::zero() => return invalid("a lift must start at 0"),
            _ => {}
        }
        if thetas.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("lift angles must be strictly increasing");
        }
        let last = *thetas.last().expect("non-empty");
        if !last.is_finite() || !(last < S::PI() - S::lit(SEMICIRCLE_MARGIN)) {
            return Err(Error::NotSemicircle);
        }
        let gaps = thetas.windows(2).map(|w| w[1] - w[0]).collect();
        Ok(AnchoredLift { thetas, gaps })
    }

    pub fn thetas(&self) -> &[S] {
        &self.thetas
    }

    pub fn n(&self) -> usize {
        self.thetas.len()
    }

    /// The lift as a circle configuration.
    pub fn to_configuration(&self) -> Configuration<S> {
        Configuration::circle(&self.thetas).expect("lift angles are canonical")
    }
}

/// Consecutive differences `theta_{i+1} - theta_i` of the lift.
pub fn gap_vector<S: Scalar>(lift: &AnchoredLift<S>) -> Vec<S> {
    lift.gaps.clone()
}

/// Lift with the given consecutive gaps, anchored at 0.
pub fn reconstruct_from_gaps<S: Scalar>(gaps: &[S]) -> Result<AnchoredLift<S>> {
    if gaps.iter().any(|g| !(*g > S::zero()) || !g.is_finite()) {
        return invalid("gaps must be positive and finite");
    }
    let mut thetas = Vec::with_capacity(gaps.len() + 1);
    let mut acc = S::zero();
    thetas.push(acc);
    for g in gaps {
        acc = acc + *g;
        thetas.push(acc);
    }
    if !(acc < S::PI() - S::lit(SEMICIRCLE_MARGIN)) {
        return Err(Error::NotSemicircle);
    }
    Ok(AnchoredLift {
        thetas,
        gaps: gaps.to_vec(),
    })
}

/// Anchored lift of `x` if all its points fit in an open arc shorter than
/// `pi`, found from the largest circular gap.
///
/// Lift gaps are the geodesic distances between circularly consecutive
/// points starting after the largest gap, so they do not depend on where
/// the formation sits on the circle.
pub fn semicircle_support<S: Scalar>(x: &Configuration<S>) -> Result<Option<AnchoredLift<S>>> {
    if !x.space().is_one_dimensional_phase() {
        return invalid(format!("phase formations live on the circle, got {}", x.space().name()));
    }
    let n = x.n();
    if n == 0 {
        return invalid("empty configuration");
    }
    let mut order: Vec<usize> = (0..n).collect();
    let phases = x.phases().expect("angular points");
    order.sort_by(|&a, &b| cmp(&phases[a], &phases[b]).then(a.cmp(&b)));
    if n == 1 {
        return Ok(Some(AnchoredLift {
            thetas: vec![S::zero()],
            gaps: Vec::new(),
        }));
    }
    // circular gap k runs from sorted point k to sorted point k + 1
    let circular: Vec<S> = (0..n)
        .map(|k| {
            let a = phases[order[k]];
            let b = phases[order[(k + 1) % n]];
            if k + 1 < n {
                b - a
            } else {
                b + S::TAU() - a
            }
        })
        .collect();
    if circular.iter().any(|g| *g < S::lit(PHASE_COLLISION)) {
        return Err(Error::DegenerateConfiguration(format!(
            "two phases closer than {PHASE_COLLISION}"
        )));
    }
    let mut widest = 0;
    for k in 1..n {
        if circular[k] > circular[widest] {
            widest = k;
        }
    }
    let span = S::TAU() - circular[widest];
    if !(span < S::PI() - S::lit(SEMICIRCLE_MARGIN)) {
        return Ok(None);
    }
    let start = (widest + 1) % n;
    let walk: Vec<usize> = (0..n).map(|k| order[(start + k) % n]).collect();
    let mut gaps = Vec::with_capacity(n - 1);
    for w in walk.windows(2) {
        gaps.push(point_distance(x.space(), x.point(w[0]), x.point(w[1]))?);
    }
    match reconstruct_from_gaps(&gaps) {
        Ok(lift) => Ok(Some(lift)),
        Err(Error::NotSemicircle) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Disjoint open intervals in `(0, pi)` assigning one slot to each gap,
/// at least `rho` from 0 and at least `2 gamma` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct GapLabeling<S> {
    intervals: Vec<(S, S)>,
    rho: S,
    gamma: S,
}

impl<S: Scalar> GapLabeling<S> {
    pub fn new(intervals: Vec<(S, S)>, rho: S, gamma: S) -> Result<Self> {
        if !(rho > S::zero()) || !rho.is_finite() {
            return invalid("rho must be positive");
        }
        if !(gamma > S::zero()) || !gamma.is_finite() {
            return invalid("gamma must be positive");
        }
        for (k, &(lo, hi)) in intervals.iter().enumerate() {
            if !(lo < hi) || !(lo >= S::zero()) || !(hi <= S::PI()) {
                return invalid(format!("interval {k} is not a non-empty subinterval of (0, pi)"));
            }
            if lo < rho {
                return invalid(format!("interval {k} starts below rho"));
            }
        }
        let slack = S::lit(LABELING_SLACK);
        let mut sorted = intervals.clone();
        sorted.sort_by(|a, b| cmp(&a.0, &b.0));
        for w in sorted.windows(2) {
            if w[1].0 - w[0].1 < S::two() * gamma - slack {
                return invalid("intervals must be at least 2 gamma apart");
            }
        }
        Ok(GapLabeling {
            intervals,
            rho,
            gamma,
        })
    }

    pub fn intervals(&self) -> &[(S, S)] {
        &self.intervals
    }

    pub fn rho(&self) -> S {
        self.rho
    }

    pub fn gamma(&self) -> S {
        self.gamma
    }

    /// Strict upper limit on the H0 bottleneck distance for the inverse bound.
    pub fn margin_gate(&self) -> S {
        self.rho.min(self.gamma) / S::lit(4.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GapViolation<S> {
    pub index: usize,
    pub gap: S,
    pub interval: (S, S),
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabelingReport<S> {
    pub labeled: bool,
    pub gaps: Vec<S>,
    pub violations: Vec<GapViolation<S>>,
}

/// Checks that gap `i` of `x` lies in interval `i` of the labeling.
pub fn check_gap_labeling<S: Scalar>(
    x: &Configuration<S>,
    labeling: &GapLabeling<S>,
) -> Result<LabelingReport<S>> {
    let lift = semicircle_support(x)?.ok_or(Error::NotSemicircle)?;
    let gaps = gap_vector(&lift);
    if gaps.len() != labeling.intervals.len() {
        return invalid(format!(
            "labeling has {} intervals, configuration has {} gaps",
            labeling.intervals.len(),
            gaps.len()
        ));
    }
    let violations: Vec<GapViolation<S>> = gaps
        .iter()
        .zip(&labeling.intervals)
        .enumerate()
        .filter(|(_, (g, (lo, hi)))| !(**g > *lo && **g < *hi))
        .map(|(index, (g, iv))| GapViolation {
            index,
            gap: *g,
            interval: *iv,
        })
        .collect();
    Ok(LabelingReport {
        labeled: violations.is_empty(),
        gaps,
        violations,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum InverseOutcome<S> {
    /// The margin or labeling hypothesis does not hold; nothing is claimed.
    HypothesisFails { reason: String },
    Checked {
        distance: S,
        bound: S,
        max_gap_change: S,
        lower_pass: bool,
        upper_pass: bool,
        gap_control_pass: bool,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct InverseReport<S> {
    /// H0 bottleneck distance between the two formations.
    pub epsilon: S,
    pub gate: S,
    pub outcome: InverseOutcome<S>,
}

impl<S> InverseReport<S> {
    /// True unless an asserted inequality failed.
    pub fn pass(&self) -> bool {
        match &self.outcome {
            InverseOutcome::HypothesisFails { .. } => true,
            InverseOutcome::Checked {
                lower_pass,
                upper_pass,
                gap_control_pass,
                ..
            } => *lower_pass && *upper_pass && *gap_control_pass,
        }
    }

    pub fn checked(&self) -> bool {
        matches!(self.outcome, InverseOutcome::Checked { .. })
    }
}

/// Two-sided bound `eps <= d([x], [y]) <= 2 (n - 1) eps` for formations in
/// the same labeled stratum, where `eps` is the H0 bottleneck distance,
/// plus the per-gap control `|g_i(x) - g_i(y)| <= 2 eps`. Applies only when
/// `eps < min(rho, gamma) / 4`.
pub fn inverse_bound_check<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    labeling: &GapLabeling<S>,
) -> Result<InverseReport<S>> {
    let lx = check_gap_labeling(x, labeling)?;
    let ly = check_gap_labeling(y, labeling)?;
    let epsilon = bottleneck_distance(
        &h0_diagram(&induced_distance_matrix(x)),
        &h0_diagram(&induced_distance_matrix(y)),
    )?;
    let gate = labeling.margin_gate();
    let fails = |reason: String| InverseReport {
        epsilon,
        gate,
        outcome: InverseOutcome::HypothesisFails { reason },
    };
    if !lx.labeled {
        return Ok(fails("first configuration violates the labeling".into()));
    }
    if !ly.labeled {
        return Ok(fails("second configuration violates the labeling".into()));
    }
    if !(epsilon < gate) {
        return Ok(fails(format!("bottleneck distance {epsilon} is not below the gate {gate}")));
    }
    let n = x.n();
    let distance = circle_exact_distance(x, y)?.upper_bound;
    let bound = S::two() * S::from_usize(n - 1).expect("size fits") * epsilon;
    let slack = S::lit(INVERSE_SLACK);
    let max_gap_change = lx
        .gaps
        .iter()
        .zip(&ly.gaps)
        .map(|(a, b)| (*a - *b).abs())
        .fold(S::zero(), S::max);
    Ok(InverseReport {
        epsilon,
        gate,
        outcome: InverseOutcome::Checked {
            distance,
            bound,
            max_gap_change,
            lower_pass: epsilon <= distance + slack,
            upper_pass: distance <= bound + slack,
            gap_control_pass: max_gap_change <= S::two() * epsilon + S::lit(LABELING_SLACK),
        },
    })
}

/// Places a lift on the circle with its first point at `offset` and
/// labels permuted by `order` (slot `i` gets lift angle `order[i]`).
pub fn place_lift<S: Scalar>(lift: &AnchoredLift<S>, offset: S, order: &[usize]) -> Result<Configuration<S>> {
    if order.len() != lift.n() {
        return invalid("order must list every lift angle");
    }
    let angles: Vec<S> = order
        .iter()
        .map(|&k| {
            lift.thetas
                .get(k)
                .map(|t| wrap_angle(*t + offset))
                .ok_or_else(|| Error::InvalidInput(format!("lift index {k} out of range")))
        })
        .collect::<Result<_>>()?;
    Configuration::circle(&angles)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::Permutation;
    use rand::seq::SliceRandom;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::{PI, TAU};

    fn lift_of(angles: &[f64]) -> Option<AnchoredLift<f64>> {
        semicircle_support(&Configuration::circle(angles).unwrap()).unwrap()
    }

    fn labeling() -> GapLabeling<f64> {
        GapLabeling::new(vec![(0.3, 0.5), (0.7, 0.9)], 0.3, 0.1).unwrap()
    }

    #[test]
    fn support_examples() {
        let l = lift_of(&[0.0, 0.4, 1.2]).unwrap();
        assert_eq!(l.thetas(), &[0.0, 0.4, 1.2]);

        let l = lift_of(&[6.0, 0.2, 0.8]).unwrap();
        let first = 0.2 + TAU - 6.0;
        assert!((l.thetas()[1] - first).abs() < 1e-12);
        assert!((l.thetas()[2] - (first + 0.6)).abs() < 1e-12);

        assert!(lift_of(&[0.0, PI / 2.0, PI, 3.0 * PI / 2.0]).is_none());
        // enclosing arc exactly pi is not an open half circle
        assert!(lift_of(&[0.0, PI]).is_none());
        assert_eq!(lift_of(&[2.0]).unwrap().thetas(), &[0.0]);
    }

    #[test]
    fn collisions_are_degenerate() {
        let x = Configuration::circle(&[1.0, 1.0, 2.0]).unwrap();
        assert!(matches!(semicircle_support(&x), Err(Error::DegenerateConfiguration(_))));
        let y = Configuration::torus(2, &[vec![0.0, 0.0]]).unwrap();
        assert!(semicircle_support(&y).is_err());
    }

    #[test]
    fn gap_examples() {
        let l = AnchoredLift::new(vec![0.0f64, 0.4, 1.2]).unwrap();
        let g = gap_vector(&l);
        assert_eq!(g[0], 0.4);
        assert!((g[1] - 0.8).abs() < 1e-15);
        assert_eq!(gap_vector(&AnchoredLift::new(vec![0.0, 0.7]).unwrap()), vec![0.7]);

        assert_eq!(reconstruct_from_gaps(&[0.4, 0.8]).unwrap().thetas(), &[0.0, 0.4, 0.4 + 0.8]);
        assert_eq!(reconstruct_from_gaps::<f64>(&[]).unwrap().thetas(), &[0.0]);
        assert!(matches!(reconstruct_from_gaps(&[2.0, 1.2]), Err(Error::NotSemicircle)));
        assert!(reconstruct_from_gaps(&[0.5, -0.1]).is_err());
    }

    #[test]
    fn gap_round_trip_is_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(61);
        for _ in 0..500 {
            let k = rng.random_range(0..7);
            let v: Vec<f64> = (0..k).map(|_| rng.random_range(1e-3..0.4)).collect();
            assert_eq!(gap_vector(&reconstruct_from_gaps(&v).unwrap()), v);
        }
    }

    #[test]
    fn gaps_are_twice_the_h0_deaths() {
        let mut rng = ChaCha8Rng::seed_from_u64(62);
        for _ in 0..300 {
            let n = rng.random_range(2..8);
            let gaps: Vec<f64> = (0..n - 1).map(|_| rng.random_range(0.01..0.4)).collect();
            let lift = reconstruct_from_gaps(&gaps).unwrap();
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let x = place_lift(&lift, rng.random_range(0.0..TAU), &order).unwrap();
            let lifted = semicircle_support(&x).unwrap().unwrap();
            let mut halves: Vec<f64> = gap_vector(&lifted).iter().map(|g| g / 2.0).collect();
            halves.sort_by(f64::total_cmp);
            let deaths: Vec<f64> = h0_diagram(&induced_distance_matrix(&x))
                .finite_points()
                .map(|p| p.1)
                .collect();
            assert_eq!(deaths, halves);
        }
    }

    #[test]
    fn lift_is_invariant_under_rotation_and_relabeling() {
        let mut rng = ChaCha8Rng::seed_from_u64(63);
        for _ in 0..200 {
            let n = rng.random_range(2..7);
            let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..2.5)).collect();
            let x = Configuration::circle(&xs).unwrap();
            let Ok(Some(a)) = semicircle_support(&x) else { continue };
            let t = rng.random_range(0.0..TAU);
            let mut images: Vec<usize> = (0..n).collect();
            images.shuffle(&mut rng);
            let y = x
                .transformed(&crate::ambient::GroupElement::translation(vec![t]))
                .unwrap()
                .relabeled(&Permutation::new(images).unwrap())
                .unwrap();
            let b = semicircle_support(&y).unwrap().unwrap();
            for (p, q) in a.thetas().iter().zip(b.thetas()) {
                assert!((p - q).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn consecutive_lift_distances_are_exact() {
        let x = Configuration::circle(&[5.9f64, 0.3, 1.1, 0.05]).unwrap();
        let lift = semicircle_support(&x).unwrap().unwrap();
        let y = lift.to_configuration();
        let dm = induced_distance_matrix(&y);
        let th = lift.thetas();
        for i in 0..th.len() {
            for j in 0..th.len() {
                assert!((dm.get(i, j) - (th[i] - th[j]).abs()).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn labeling_examples() {
        let l = labeling();
        let x = Configuration::circle(&[0.0, 0.4, 1.2]).unwrap();
        assert!(check_gap_labeling(&x, &l).unwrap().labeled);
        let swapped = Configuration::circle(&[0.0, 0.8, 1.2]).unwrap();
        let r = check_gap_labeling(&swapped, &l).unwrap();
        assert!(!r.labeled);
        assert_eq!(r.violations.len(), 2);

        assert!(GapLabeling::new(vec![(0.3, 0.6), (0.5, 0.9)], 0.3, 0.1).is_err());
        assert!(GapLabeling::new(vec![(0.3, 0.5), (0.6, 0.9)], 0.3, 0.1).is_err());
        assert!(GapLabeling::new(vec![(0.2, 0.5)], 0.3, 0.1).is_err());
        assert!(GapLabeling::new(vec![(0.3, 3.5)], 0.3, 0.1).is_err());
        let spread = Configuration::circle(&[0.0, 2.0, 4.0]).unwrap();
        assert!(matches!(check_gap_labeling(&spread, &l), Err(Error::NotSemicircle)));
    }

    #[test]
    fn inverse_examples() {
        let l = labeling();
        let x = Configuration::circle(&[0.0, 0.4, 1.2]).unwrap();
        let y = Configuration::circle(&[0.0, 0.42, 1.2]).unwrap();
        let r = inverse_bound_check(&x, &y, &l).unwrap();
        assert!((r.epsilon - 0.01).abs() < 1e-12);
        assert_eq!(r.gate, 0.025);
        match r.outcome {
            InverseOutcome::Checked { distance, bound, .. } => {
                assert!((distance - 0.01).abs() < 1e-9);
                assert!((bound - 0.04).abs() < 1e-12);
            }
            _ => panic!("gate should hold"),
        }
        assert!(r.pass());

        let same = inverse_bound_check(&x, &x, &l).unwrap();
        assert_eq!(same.epsilon, 0.0);
        assert!(same.checked() && same.pass());

        let outside = Configuration::circle(&[0.0, 0.4, 1.35]).unwrap();
        let r = inverse_bound_check(&x, &outside, &l).unwrap();
        assert!(!r.checked());
    }

    #[test]
    fn gate_is_strict() {
        // eps equal to min(rho, gamma) / 4 is not below the gate
        let l = GapLabeling::new(vec![(0.25, 0.75)], 0.25, 0.125).unwrap();
        assert_eq!(l.margin_gate(), 0.03125);
        let x = Configuration::circle(&[0.0, 0.5]).unwrap();
        let y = Configuration::circle(&[0.0, 0.5625]).unwrap();
        let r = inverse_bound_check(&x, &y, &l).unwrap();
        assert_eq!(r.epsilon, 0.03125);
        assert!(!r.checked());
    }
}

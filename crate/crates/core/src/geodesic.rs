//! Geodesics in the quotient formation space and sampled checks of the
//! metric axioms.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alignment::{
    circle_exact_distance, formation_distance, grid_search, AlignmentResult, SolverOptions, GRID_MAX_N,
};
use crate::ambient::{geodesic_point, sample_group, sample_point, AmbientSpace, CutLocus};
use crate::error::Result;
use crate::formation::{alignment_cost, apply_action, check_comparable, Configuration, LabeledAction, Permutation};
use crate::scalar::Scalar;

/// Geodesic between two shapes: the coordinate-wise ambient geodesic from
/// `x` to the representative of `[y]` aligned with it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientGeodesic<S> {
    start: Configuration<S>,
    end: Configuration<S>,
    alignment: AlignmentResult<S>,
}

impl<S: Scalar> QuotientGeodesic<S> {
    pub fn new(x: &Configuration<S>, y: &Configuration<S>, opts: &SolverOptions<S>) -> Result<Self> {
        let alignment = formation_distance(x, y, opts)?;
        Self::from_alignment(x, y, alignment)
    }

    pub fn from_alignment(
        x: &Configuration<S>,
        y: &Configuration<S>,
        alignment: AlignmentResult<S>,
    ) -> Result<Self> {
        check_comparable(x, y)?;
        Ok(QuotientGeodesic {
            start: x.clone(),
            end: alignment.aligned_representative(y),
            alignment,
        })
    }

    /// Length of the path, which is the certified distance bound.
    pub fn length(&self) -> S {
        self.alignment.upper_bound
    }

    pub fn alignment(&self) -> &AlignmentResult<S> {
        &self.alignment
    }

    pub fn start(&self) -> &Configuration<S> {
        &self.start
    }

    /// The representative of `[y]` that the path ends at.
    pub fn end(&self) -> &Configuration<S> {
        &self.end
    }

    pub fn point(&self, t: S, cut: CutLocus) -> Result<Configuration<S>> {
        let space = *self.start.space();
        let points = self
            .start
            .points()
            .iter()
            .zip(self.end.points())
            .map(|(a, b)| geodesic_point(&space, a, b, t, cut))
            .collect::<Result<Vec<_>>>()?;
        Ok(Configuration::from_parts_unchecked(space, points))
    }
}

/// Configuration at parameter `t` on the quotient geodesic from `[x]` to `[y]`.
pub fn quotient_geodesic<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    t: S,
    opts: &SolverOptions<S>,
    cut: CutLocus,
) -> Result<Configuration<S>> {
    QuotientGeodesic::new(x, y, opts)?.point(t, cut)
}

/// How much a sampled axiom check proves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvidenceGrade {
    /// Exact solver: violations would be genuine.
    Proved,
    /// Grid oracle: holds up to the grid resolution.
    Evidence,
    /// Heuristic upper bounds only.
    HeuristicOnly,
}

impl EvidenceGrade {
    pub fn name(&self) -> &'static str {
        match self {
            EvidenceGrade::Proved => "proved",
            EvidenceGrade::Evidence => "evidence",
            EvidenceGrade::HeuristicOnly => "heuristic-only",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AxiomReport<S> {
    pub grade: EvidenceGrade,
    pub trials: usize,
    pub slack: S,
    pub symmetry_violations: usize,
    pub triangle_violations: usize,
    pub self_distance_violations: usize,
    /// Orbit copies whose distance or witness cost exceeded the slack.
    pub indiscernible_violations: usize,
    pub max_distance: S,
}

impl<S> AxiomReport<S> {
    pub fn violations(&self) -> usize {
        self.symmetry_violations
            + self.triangle_violations
            + self.self_distance_violations
            + self.indiscernible_violations
    }
}

/// Distance with a witness alignment `(g, sigma)`, by the strongest method
/// available for the space.
fn graded_distance<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    grade: EvidenceGrade,
    opts: &SolverOptions<S>,
) -> Result<(S, LabeledAction<S>)> {
    match grade {
        EvidenceGrade::Proved => {
            let r = circle_exact_distance(x, y)?;
            Ok((r.upper_bound, LabeledAction::new(r.g, r.sigma)))
        }
        EvidenceGrade::Evidence => {
            let r = grid_search(x, y, opts.grid_resolution)?;
            Ok((r.value, LabeledAction::new(r.g, r.sigma)))
        }
        EvidenceGrade::HeuristicOnly => {
            let r = formation_distance(x, y, opts)?;
            Ok((r.upper_bound, LabeledAction::new(r.g, r.sigma)))
        }
    }
}

/// Samples triples of random shapes and checks symmetry, the triangle
/// inequality, `d(x, x) = 0`, and that orbit copies of `x` are at distance
/// zero up to the slack with an explicit alignment witnessing it.
///
/// The circle uses the exact solver (slack 1e-9), tori of dimension at
/// most two with at most [`GRID_MAX_N`] points use the grid oracle (slack
/// three grid spacings), everything else the heuristic solvers (slack 1e-6).
pub fn metric_axiom_sampler<S: Scalar>(
    space: AmbientSpace,
    n: usize,
    trials: usize,
    seed: u64,
    opts: &SolverOptions<S>,
) -> Result<AxiomReport<S>> {
    space.validate()?;
    opts.validate()?;
    let grade = match space {
        AmbientSpace::Circle | AmbientSpace::Torus { m: 1 } => EvidenceGrade::Proved,
        AmbientSpace::Torus { m: 2 } if n <= GRID_MAX_N => EvidenceGrade::Evidence,
        _ => EvidenceGrade::HeuristicOnly,
    };
    let slack = match grade {
        EvidenceGrade::Proved => S::lit(1e-9),
        EvidenceGrade::Evidence => opts.grid_resolution * S::lit(3.0),
        EvidenceGrade::HeuristicOnly => S::lit(1e-6),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        let pts = (0..n).map(|_| sample_point(&space, rng)).collect();
        Configuration::new(space, pts)
    };
    let mut report = AxiomReport {
        grade,
        trials,
        slack,
        symmetry_violations: 0,
        triangle_violations: 0,
        self_distance_violations: 0,
        indiscernible_violations: 0,
        max_distance: S::zero(),
    };
    for _ in 0..trials {
        let x = draw(&mut rng)?;
        let y = draw(&mut rng)?;
        let z = draw(&mut rng)?;
        let d = |a: &Configuration<S>, b: &Configuration<S>| graded_distance(a, b, grade, opts);
        let (xy, _) = d(&x, &y)?;
        let (yx, _) = d(&y, &x)?;
        let (xz, _) = d(&x, &z)?;
        let (zy, _) = d(&z, &y)?;
        let (xx, _) = d(&x, &x)?;
        report.max_distance = report.max_distance.max(xy).max(yx).max(xz).max(zy);
        if (xy - yx).abs() > slack {
            report.symmetry_violations += 1;
        }
        if xy > xz + zy + slack {
            report.triangle_violations += 1;
        }
        if xx > slack {
            report.self_distance_violations += 1;
        }
        let mut images: Vec<usize> = (0..n).collect();
        images.rotate_left(1.min(n));
        let h = LabeledAction::new(sample_group(&space, &mut rng), Permutation::new(images)?);
        let copy = apply_action(&h, &x)?;
        let (dc, witness) = d(&x, &copy)?;
        let witness_cost = alignment_cost(&witness.g, &witness.sigma, &x, &copy)?;
        if dc > slack || witness_cost > slack {
            report.indiscernible_violations += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formation::chebyshev_distance;
    use rand::Rng;

    #[test]
    fn endpoints() {
        let x = Configuration::circle(&[0.1f64, 1.0, 2.0]).unwrap();
        let y = Configuration::circle(&[3.0, 0.5, 5.0]).unwrap();
        let geo = QuotientGeodesic::new(&x, &y, &SolverOptions::default()).unwrap();
        assert_eq!(geo.point(0.0, CutLocus::Reject).unwrap(), x);
        let end = geo.point(1.0, CutLocus::Reject).unwrap();
        let again = circle_exact_distance(&end, &y).unwrap().upper_bound;
        assert!(again < 1e-12);
        assert!((chebyshev_distance(&x, &end).unwrap() - geo.length()).abs() < 1e-12);
    }

    #[test]
    fn circle_geodesics_have_constant_speed() {
        let mut rng = ChaCha8Rng::seed_from_u64(71);
        for _ in 0..20 {
            let n = rng.random_range(2..6);
            let xs: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..6.28)).collect();
            let ys: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..6.28)).collect();
            let x = Configuration::circle(&xs).unwrap();
            let y = Configuration::circle(&ys).unwrap();
            let geo = QuotientGeodesic::new(&x, &y, &SolverOptions::default()).unwrap();
            let big_d = geo.length();
            let pts: Vec<_> = (0..=10)
                .map(|k| geo.point(k as f64 / 10.0, CutLocus::Resolve).unwrap())
                .collect();
            for s in 0..=10 {
                for t in 0..=10 {
                    let d = circle_exact_distance(&pts[s], &pts[t]).unwrap().upper_bound;
                    let expected = (s as f64 - t as f64).abs() / 10.0 * big_d;
                    assert!((d - expected).abs() <= 1e-9, "{d} vs {expected}");
                }
            }
        }
    }

    #[test]
    fn circle_axioms_hold_exactly() {
        let r = metric_axiom_sampler::<f64>(AmbientSpace::Circle, 3, 100, 5, &SolverOptions::default()).unwrap();
        assert_eq!(r.grade, EvidenceGrade::Proved);
        assert_eq!(r.violations(), 0);
        assert!(r.max_distance <= std::f64::consts::PI);
    }

    #[test]
    fn torus_axioms_hold_at_grid_resolution() {
        let opts = SolverOptions::default();
        let r = metric_axiom_sampler::<f64>(AmbientSpace::torus(2).unwrap(), 3, 4, 6, &opts).unwrap();
        assert_eq!(r.grade, EvidenceGrade::Evidence);
        assert_eq!(r.violations(), 0);
    }

    #[test]
    fn sphere_sampler_is_heuristic() {
        let opts = SolverOptions::default().with_restarts(16);
        let r = metric_axiom_sampler::<f64>(AmbientSpace::Sphere2, 3, 3, 7, &opts).unwrap();
        assert_eq!(r.grade, EvidenceGrade::HeuristicOnly);
        assert_eq!(r.self_distance_violations + r.indiscernible_violations, 0);
    }

    #[test]
    fn antipodal_cut_locus() {
        let x = Configuration::sphere(&[[0.0, 0.0, 1.0], [1.0, 0.0, 0.0]]).unwrap();
        let y = Configuration::sphere(&[[0.0, 0.0, -1.0], [-1.0, 0.0, 0.0]]).unwrap();
        // identity alignment forces antipodal endpoints
        let a = AlignmentResult::certify(
            &x,
            &y,
            crate::ambient::GroupElement::identity(x.space()),
            Permutation::identity(2),
            false,
            crate::alignment::Method::So3Multistart,
            0,
        );
        let geo = QuotientGeodesic::from_alignment(&x, &y, a).unwrap();
        assert!(matches!(
            geo.point(0.5, CutLocus::Reject),
            Err(crate::Error::DegenerateGeodesic { .. })
        ));
        assert!(geo.point(0.5, CutLocus::Resolve).is_ok());
    }
}

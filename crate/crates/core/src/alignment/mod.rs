//! The formation matching distance
//! `d([x], [y]) = inf over g in G, sigma in S_n of max_i d(g x_i, y_sigma(i))`.
//!
//! For every fixed group element the inner minimum over relabelings is an
//! exact bottleneck assignment. The outer minimum over the group is exact on
//! the circle (finite candidate set) and a certified upper bound on the
//! torus and sphere: every result carries the alignment `(g, sigma)` that
//! achieves its value, so an approximate answer is still a valid bound.

mod circle;
mod grid;
mod so3;
mod torus;

pub use circle::circle_exact_distance;
pub use grid::{grid_oracle, grid_search, GridOutcome, GRID_MAX_N};
pub use so3::{so3_multistart, super_fibonacci_rotations};
pub use torus::torus_multistart;

use crate::ambient::{self, AmbientSpace, GroupElement, Point};
use crate::assignment::{bottleneck_value, bottleneck_value_below, lexicographic_matching, CostMatrix};
use crate::error::{invalid, Result};
use crate::formation::{
    alignment_cost_unchecked, check_comparable, induced_distance_matrix, Configuration, Permutation,
};
use crate::scalar::Scalar;

/// Knobs for the group-alignment solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions<S> {
    /// Random (torus) or low-discrepancy (sphere) starts, at least 1.
    pub restarts: usize,
    /// Local refinement iterations per start.
    pub refine_iters: usize,
    pub seed: u64,
    /// Spacing of the verification grid.
    pub grid_resolution: S,
    /// Convergence tolerance of the local refinements.
    pub tolerance: S,
}

impl<S: Scalar> Default for SolverOptions<S> {
    fn default() -> Self {
        SolverOptions {
            restarts: 64,
            refine_iters: 20,
            seed: 0,
            grid_resolution: S::lit(1e-3),
            tolerance: S::lit(1e-6),
        }
    }
}

impl<S: Scalar> SolverOptions<S> {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return invalid("restarts must be at least 1");
        }
        if !(self.tolerance > S::zero()) {
            return invalid("tolerance must be positive");
        }
        if !(self.grid_resolution > S::zero()) {
            return invalid("grid resolution must be positive");
        }
        Ok(())
    }

    pub fn with_restarts(mut self, restarts: usize) -> Self {
        self.restarts = restarts;
        self
    }

    pub fn with_refine_iters(mut self, refine_iters: usize) -> Self {
        self.refine_iters = refine_iters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Which solver produced an alignment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    CircleExact,
    TorusMultistart,
    So3Multistart,
    GridSearch,
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::CircleExact => "circle-exact",
            Method::TorusMultistart => "torus-multistart",
            Method::So3Multistart => "so3-multistart",
            Method::GridSearch => "grid-search",
        }
    }
}

/// A feasible alignment and its cost, which bounds the formation distance
/// from above; `exact` marks results known to attain it.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentResult<S> {
    pub upper_bound: S,
    pub g: GroupElement<S>,
    pub sigma: Permutation,
    pub exact: bool,
    pub method: Method,
    pub evaluations: usize,
}

impl<S: Scalar> AlignmentResult<S> {
    /// Recomputes the cost of `(g, sigma)` so the bound is always the true
    /// cost of the certificate.
    pub(crate) fn certify(
        x: &Configuration<S>,
        y: &Configuration<S>,
        g: GroupElement<S>,
        sigma: Permutation,
        exact: bool,
        method: Method,
        evaluations: usize,
    ) -> Self {
        let upper_bound = alignment_cost_unchecked(&g, &sigma, x, y);
        AlignmentResult {
            upper_bound,
            g,
            sigma,
            exact,
            method,
            evaluations,
        }
    }

    /// Representative of `[y]` aligned with `x`: slot `i` holds
    /// `g^-1 y_sigma(i)`, so its sup-distance to `x` equals `upper_bound`.
    pub fn aligned_representative(&self, y: &Configuration<S>) -> Configuration<S> {
        let inv = self.g.inverse();
        let points = (0..y.n())
            .map(|i| ambient::apply_unchecked(&inv, y.point(self.sigma.apply(i))))
            .collect();
        Configuration::from_parts_unchecked(*y.space(), points)
    }
}

/// `min_sigma max_i d(g x_i, y_sigma(i))` as a function of `g`, counting
/// evaluations.
pub(crate) struct Objective<'a, S> {
    x: &'a Configuration<S>,
    y: &'a Configuration<S>,
    pub evaluations: usize,
}

impl<'a, S: Scalar> Objective<'a, S> {
    pub fn new(x: &'a Configuration<S>, y: &'a Configuration<S>) -> Self {
        Objective {
            x,
            y,
            evaluations: 0,
        }
    }

    pub fn x_points(&self) -> &'a [Point<S>] {
        self.x.points()
    }

    pub fn y_points(&self) -> &'a [Point<S>] {
        self.y.points()
    }

    pub fn cost_matrix(&self, g: &GroupElement<S>) -> CostMatrix<S> {
        let moved: Vec<Point<S>> = self
            .x
            .points()
            .iter()
            .map(|p| ambient::apply_unchecked(g, p))
            .collect();
        let ys = self.y.points();
        CostMatrix::from_fn_unchecked(moved.len(), |i, j| {
            ambient::distance_unchecked(&moved[i], &ys[j])
        })
    }

    pub fn value(&mut self, g: &GroupElement<S>) -> S {
        self.evaluations += 1;
        bottleneck_value(&self.cost_matrix(g))
    }

    pub fn value_below(&mut self, g: &GroupElement<S>, cutoff: S) -> Option<S> {
        self.evaluations += 1;
        bottleneck_value_below(&self.cost_matrix(g), cutoff)
    }

    /// Lexicographically smallest optimal relabeling at `g`.
    pub fn sigma(&self, g: &GroupElement<S>) -> Permutation {
        let c = self.cost_matrix(g);
        let v = bottleneck_value(&c);
        lexicographic_matching(&c, v)
    }
}

/// Formation distance, dispatched on the ambient model: exact on the
/// circle, multi-start certified bounds on the torus and the sphere.
pub fn formation_distance<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    opts: &SolverOptions<S>,
) -> Result<AlignmentResult<S>> {
    check_comparable(x, y)?;
    opts.validate()?;
    match x.space() {
        AmbientSpace::Circle | AmbientSpace::Torus { m: 1 } => circle_exact_distance(x, y),
        AmbientSpace::Torus { .. } => torus_multistart(x, y, opts),
        AmbientSpace::Sphere2 => so3_multistart(x, y, opts),
    }
}

/// Distortion `max_ij |d_x(i, j) - d_y(sigma(i), sigma(j))|` of the
/// correspondence given by the graph of `sigma`.
pub fn gh_correspondence_distortion<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    sigma: &Permutation,
) -> Result<S> {
    if x.n() != y.n() || sigma.len() != x.n() {
        return invalid("configurations and permutation must have the same size");
    }
    let dx = induced_distance_matrix(x);
    let dy = induced_distance_matrix(y);
    let mut worst = S::zero();
    for (i, j, d) in dx.edges() {
        worst = worst.max((d - dy.get(sigma.apply(i), sigma.apply(j))).abs());
    }
    Ok(worst)
}

use crate::ambient::GroupElement;
use crate::error::{invalid, Error, Result};
use crate::formation::{check_comparable, Configuration, Permutation};
use crate::scalar::Scalar;

use crate::oracle::enumerate_assignment_below;

use super::Objective;

/// Largest configuration size the grid search accepts.
pub const GRID_MAX_N: usize = 6;

/// Best grid translation and the relabeling attaining its value.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome<S> {
    pub value: S,
    pub g: GroupElement<S>,
    pub sigma: Permutation,
    pub grid_points: usize,
}

/// Minimum of the alignment objective over a uniform grid of translations,
/// with exhaustive relabeling at each grid point.
///
/// Only the circle and tori of dimension at most two, with at most
/// [`GRID_MAX_N`] points. The grid spacing is the largest `2 pi / K` not
/// exceeding `resolution`; every translation lies within
/// `resolution * sqrt(m) / 2` of a grid point, so the true distance is at
/// least `value - resolution * sqrt(m) / 2`.
///
/// The objective is 1-Lipschitz in the translation, so blocks of grid
/// points are skipped when the value at their center minus their radius
/// exceeds the incumbent. The result is the minimum over every grid point,
/// ties going to the smallest grid index, same as a full scan.
pub fn grid_search<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
    resolution: S,
) -> Result<GridOutcome<S>> {
    let grid = Grid::new(x, y, resolution)?;
    let mut search = Search {
        grid: &grid,
        objective: Objective::new(x, y),
        best: S::infinity(),
        best_index: usize::MAX,
    };
    if x.n() == 0 {
        return Ok(GridOutcome {
            value: S::zero(),
            g: GroupElement::identity(x.space()),
            sigma: Permutation::identity(0),
            grid_points: grid.total,
        });
    }
    let full: Vec<(usize, usize)> = vec![(0, grid.k); grid.m];
    search.block(&full);
    let g = grid.translation(search.best_index);
    let sigma = search.objective.sigma(&g);
    Ok(GridOutcome {
        value: search.best,
        g,
        sigma,
        grid_points: grid.total,
    })
}

struct Grid {
    m: usize,
    k: usize,
    total: usize,
}

impl Grid {
    fn new<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>, resolution: S) -> Result<Self> {
        check_comparable(x, y)?;
        let m = match x.space().angle_count() {
            Some(m) if m <= 2 => m,
            _ => {
                return Err(Error::Unsupported(format!(
                    "grid search supports the circle and tori up to dimension 2, got {}",
                    x.space().name()
                )))
            }
        };
        let n = x.n();
        if n > GRID_MAX_N {
            return Err(Error::Unsupported(format!(
                "grid search supports at most {GRID_MAX_N} points, got {n}"
            )));
        }
        if !(resolution > S::zero()) || !resolution.is_finite() {
            return invalid("grid resolution must be positive");
        }
        let k = (S::TAU() / resolution).ceil().to_usize().unwrap_or(usize::MAX).max(1);
        let total = k
            .checked_pow(m as u32)
            .filter(|t| *t <= 1usize << 40)
            .ok_or_else(|| Error::Unsupported(format!("grid with spacing {resolution} is too large")))?;
        Ok(Grid { m, k, total })
    }

    fn step<S: Scalar>(&self) -> S {
        S::TAU() / S::from_usize(self.k).expect("grid size fits")
    }

    /// Linear index with the first coordinate varying fastest.
    fn index(&self, coords: &[usize]) -> usize {
        coords.iter().rev().fold(0, |acc, c| acc * self.k + c)
    }

    fn translation<S: Scalar>(&self, index: usize) -> GroupElement<S> {
        let step = self.step::<S>();
        let mut rest = index;
        let t = (0..self.m)
            .map(|_| {
                let c = rest % self.k;
                rest /= self.k;
                S::from_usize(c).expect("grid index fits") * step
            })
            .collect();
        GroupElement::Translation(t)
    }
}

struct Search<'a, S> {
    grid: &'a Grid,
    objective: Objective<'a, S>,
    best: S,
    best_index: usize,
}

impl<S: Scalar> Search<'_, S> {
    /// Objective at a grid point, minimizing over relabelings by pruned
    /// enumeration so the oracle does not share the assignment solver.
    fn value_at(&mut self, index: usize) -> S {
        let c = self.objective.cost_matrix(&self.grid.translation(index));
        self.objective.evaluations += 1;
        let cost = |i: usize, j: usize| c.get(i, j);
        enumerate_assignment_below(c.n(), &cost, S::infinity())
            .map(|(v, _)| v)
            .expect("finite costs admit a permutation")
    }

    /// Visits the grid points with coordinates in the half-open ranges.
    fn block(&mut self, ranges: &[(usize, usize)]) {
        let center: Vec<usize> = ranges.iter().map(|(lo, hi)| lo + (hi - lo - 1) / 2).collect();
        let index = self.grid.index(&center);
        let value = self.value_at(index);
        if value < self.best || (value == self.best && index < self.best_index) {
            self.best = value;
            self.best_index = index;
        }
        let count: usize = ranges.iter().map(|(lo, hi)| hi - lo).product();
        if count == 1 {
            return;
        }
        let step = self.grid.step::<S>();
        let mut r2 = S::zero();
        for ((lo, hi), c) in ranges.iter().zip(&center) {
            let off = S::from_usize((c - lo).max(hi - 1 - c)).expect("offset fits") * step;
            r2 = r2 + off * off;
        }
        let radius = r2.sqrt() * (S::one() + S::lit(1e-9)) + S::lit(1e-12);
        // every point of the block is at least this large
        if value - radius > self.best {
            return;
        }
        // split the longest side; children in index order
        let (axis, _) = ranges
            .iter()
            .enumerate()
            .max_by_key(|(a, (lo, hi))| (hi - lo, std::cmp::Reverse(*a)))
            .expect("non-empty grid");
        let (lo, hi) = ranges[axis];
        let mid = lo + (hi - lo) / 2;
        for part in [(lo, mid), (mid, hi)] {
            if part.0 == part.1 {
                continue;
            }
            let mut child = ranges.to_vec();
            child[axis] = part;
            self.block(&child);
        }
    }
}

/// Full scan of the grid with exhaustive relabelings, for cross-checking
/// [`grid_search`] on small grids.
#[cfg(test)]
pub(crate) fn grid_scan<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>, resolution: S) -> Result<S> {
    use crate::ambient::{torus_distance, wrap_angle};
    let grid = Grid::new(x, y, resolution)?;
    let n = x.n();
    let m = grid.m;
    let step = grid.step::<S>();
    let xs: Vec<&[S]> = x.points().iter().map(|p| p.as_angles().expect("angular")).collect();
    let ys: Vec<&[S]> = y.points().iter().map(|p| p.as_angles().expect("angular")).collect();
    let mut best = S::infinity();
    for idx in 0..grid.total {
        let mut rest = idx;
        let t: Vec<S> = (0..m)
            .map(|_| {
                let c = rest % grid.k;
                rest /= grid.k;
                S::from_usize(c).unwrap() * step
            })
            .collect();
        let moved: Vec<Vec<S>> =
            xs.iter().map(|a| a.iter().zip(&t).map(|(p, s)| wrap_angle(*p + *s)).collect()).collect();
        let cost = |i: usize, j: usize| torus_distance(&moved[i], ys[j]);
        if let Some((v, _)) = enumerate_assignment_below(n, &cost, best) {
            best = v;
        }
    }
    Ok(if n == 0 { S::zero() } else { best })
}

/// Value of [`grid_search`].
pub fn grid_oracle<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>, resolution: S) -> Result<S> {
    Ok(grid_search(x, y, resolution)?.value)
}

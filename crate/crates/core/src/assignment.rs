//! Exact bottleneck (minimax) assignment.
//!
//! The optimal value of `min_sigma max_i c[i][sigma(i)]` is always one of
//! the matrix entries, so it is found by binary search over the sorted
//! distinct entries, testing each threshold for a perfect matching in the
//! bipartite graph of admissible (`<= threshold`) entries. The returned
//! permutation is the lexicographically smallest optimal one.

use crate::error::{invalid, Result};
use crate::formation::Permutation;
use crate::scalar::{cmp, Scalar};

const NONE: usize = usize::MAX;

/// Square matrix of finite non-negative costs.
#[derive(Debug, Clone, PartialEq)]
pub struct CostMatrix<S> {
    n: usize,
    costs: Vec<S>,
}

impl<S: Scalar> CostMatrix<S> {
    pub fn new(rows: Vec<Vec<S>>) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("cost matrix must be square");
        }
        Self::from_fn(n, |i, j| rows[i][j])
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Result<Self> {
        let mut costs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let c = f(i, j);
                if !c.is_finite() || c < S::zero() {
                    return invalid(format!("cost ({i}, {j}) = {c} must be finite and >= 0"));
                }
                costs.push(c);
            }
        }
        Ok(CostMatrix { n, costs })
    }

    pub(crate) fn from_fn_unchecked(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut costs = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                costs.push(f(i, j));
            }
        }
        CostMatrix { n, costs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        self.costs[i * self.n + j]
    }

    /// `max_i c[i][sigma(i)]`.
    pub fn permutation_cost(&self, sigma: &Permutation) -> S {
        (0..self.n)
            .map(|i| self.get(i, sigma.apply(i)))
            .fold(S::zero(), S::max)
    }

    fn sorted_distinct(&self) -> Vec<S> {
        let mut v = self.costs.clone();
        v.sort_by(cmp);
        v.dedup();
        v
    }

    /// Largest row minimum and column minimum: no assignment is cheaper.
    fn trivial_lower_bound(&self) -> S {
        let n = self.n;
        let mut lb = S::zero();
        for i in 0..n {
            let r = (0..n).map(|j| self.get(i, j)).fold(S::infinity(), S::min);
            let c = (0..n).map(|j| self.get(j, i)).fold(S::infinity(), S::min);
            lb = lb.max(r).max(c);
        }
        lb
    }
}

/// Optimal bottleneck assignment.
#[derive(Debug, Clone, PartialEq)]
pub struct Assignment<S> {
    pub value: S,
    pub sigma: Permutation,
}

/// Augmenting-path matcher over an implicit bipartite graph; rows and
/// columns are scanned in index order.
struct Matcher<'a, S> {
    c: &'a CostMatrix<S>,
    threshold: S,
    row_to_col: Vec<usize>,
    col_to_row: Vec<usize>,
    visited: Vec<bool>,
}

impl<'a, S: Scalar> Matcher<'a, S> {
    fn new(c: &'a CostMatrix<S>, threshold: S) -> Self {
        let n = c.n;
        Matcher {
            c,
            threshold,
            row_to_col: vec![NONE; n],
            col_to_row: vec![NONE; n],
            visited: vec![false; n],
        }
    }

    #[inline]
    fn admissible(&self, r: usize, col: usize) -> bool {
        self.c.get(r, col) <= self.threshold
    }

    fn augment(&mut self, r: usize) -> bool {
        for col in 0..self.c.n {
            if self.visited[col] || !self.admissible(r, col) {
                continue;
            }
            self.visited[col] = true;
            let owner = self.col_to_row[col];
            if owner == NONE || self.augment(owner) {
                self.row_to_col[r] = col;
                self.col_to_row[col] = r;
                return true;
            }
        }
        false
    }

    /// Greedy initialization followed by augmenting paths. Returns `false`
    /// as soon as some row cannot be matched.
    fn perfect(&mut self) -> bool {
        let n = self.c.n;
        for r in 0..n {
            for col in 0..n {
                if self.col_to_row[col] == NONE && self.admissible(r, col) {
                    self.row_to_col[r] = col;
                    self.col_to_row[col] = r;
                    break;
                }
            }
        }
        for r in 0..n {
            if self.row_to_col[r] != NONE {
                continue;
            }
            self.visited.iter_mut().for_each(|v| *v = false);
            if !self.augment(r) {
                return false;
            }
        }
        true
    }

    /// Turns a perfect matching into the lexicographically smallest one by
    /// trying to reroute each row, in order, to a smaller admissible column.
    fn make_lexicographically_smallest(&mut self) {
        let n = self.c.n;
        let mut fixed = vec![false; n];
        for i in 0..n {
            let current = self.row_to_col[i];
            for j in 0..current {
                if fixed[j] || !self.admissible(i, j) {
                    continue;
                }
                let r = self.col_to_row[j];
                self.row_to_col[i] = j;
                self.col_to_row[j] = i;
                self.col_to_row[current] = NONE;
                self.row_to_col[r] = NONE;
                for (col, v) in self.visited.iter_mut().enumerate() {
                    *v = fixed[col] || col == j;
                }
                if self.augment(r) {
                    break;
                }
                self.row_to_col[i] = current;
                self.col_to_row[current] = i;
                self.col_to_row[j] = r;
                self.row_to_col[r] = j;
            }
            fixed[self.row_to_col[i]] = true;
        }
    }
}

/// True iff a perfect matching exists using only entries `<= eps`.
pub fn feasibility_at<S: Scalar>(c: &CostMatrix<S>, eps: S) -> bool {
    Matcher::new(c, eps).perfect()
}

/// Optimal bottleneck value only.
pub fn bottleneck_value<S: Scalar>(c: &CostMatrix<S>) -> S {
    if c.n == 0 {
        return S::zero();
    }
    let values = c.sorted_distinct();
    let lb = c.trivial_lower_bound();
    let mut lo = values.partition_point(|v| *v < lb);
    let mut hi = values.len() - 1;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasibility_at(c, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    values[lo]
}

/// Optimal bottleneck value if it is strictly below `cutoff`, else `None`.
/// Used by solvers that only care about improving on an incumbent.
pub(crate) fn bottleneck_value_below<S: Scalar>(c: &CostMatrix<S>, cutoff: S) -> Option<S> {
    if c.n == 0 {
        return Some(S::zero());
    }
    if c.trivial_lower_bound() >= cutoff {
        return None;
    }
    let values = c.sorted_distinct();
    let lb = c.trivial_lower_bound();
    let mut lo = values.partition_point(|v| *v < lb);
    let top = values.partition_point(|v| *v < cutoff);
    if top == 0 || lo >= top {
        return None;
    }
    let mut hi = top - 1;
    if !feasibility_at(c, values[hi]) {
        return None;
    }
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if feasibility_at(c, values[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Some(values[lo])
}

/// Exact bottleneck assignment with the lexicographically smallest optimal
/// permutation.
pub fn bottleneck_assignment<S: Scalar>(c: &CostMatrix<S>) -> Assignment<S> {
    let value = bottleneck_value(c);
    Assignment {
        value,
        sigma: lexicographic_matching(c, value),
    }
}

/// Lexicographically smallest perfect matching using entries `<= threshold`.
/// The threshold must be feasible.
pub(crate) fn lexicographic_matching<S: Scalar>(c: &CostMatrix<S>, threshold: S) -> Permutation {
    let mut m = Matcher::new(c, threshold);
    let ok = m.perfect();
    debug_assert!(ok, "threshold must admit a perfect matching");
    m.make_lexicographically_smallest();
    Permutation::from_vec_unchecked(m.row_to_col)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn zero_matrix_gives_identity() {
        let c = CostMatrix::new(vec![vec![0.0; 4]; 4]).unwrap();
        let a = bottleneck_assignment(&c);
        assert_eq!(a.value, 0.0);
        assert!(a.sigma.is_identity());
    }

    #[test]
    fn line_example() {
        // points {0, 1} against {0.1, 0.9}: brute force gives identity at 0.1
        let xs = [0.0f64, 1.0];
        let ys = [0.1f64, 0.9];
        let c = CostMatrix::from_fn(2, |i, j| (xs[i] - ys[j]).abs()).unwrap();
        let a = bottleneck_assignment(&c);
        let (brute, _) = oracle::brute_force_assignment(&c).unwrap();
        assert_eq!(a.value, brute);
        assert!((a.value - 0.1).abs() < 1e-15);
        assert!(a.sigma.is_identity());
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(CostMatrix::new(vec![vec![0.0, 1.0]]).is_err());
        assert!(CostMatrix::new(vec![vec![-1.0]]).is_err());
        assert!(CostMatrix::new(vec![vec![f64::INFINITY]]).is_err());
    }

    #[test]
    fn feasibility_examples() {
        let c = CostMatrix::new(vec![vec![0.3, 0.9], vec![0.2, 0.5]]).unwrap();
        assert!(feasibility_at(&c, 0.9));
        assert!(!feasibility_at(&c, 0.25));
        // monotone along the sorted thresholds
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let n = rng.random_range(1..7);
            let c = CostMatrix::from_fn(n, |_, _| rng.random::<f64>()).unwrap();
            let mut seen_true = false;
            for t in c.sorted_distinct() {
                let f = feasibility_at(&c, t);
                assert!(!(seen_true && !f));
                seen_true |= f;
            }
            assert!(seen_true);
        }
    }

    #[test]
    fn lexicographic_tie_break() {
        // every permutation is optimal; identity is lexicographically smallest
        let c = CostMatrix::new(vec![vec![1.0; 3]; 3]).unwrap();
        assert!(bottleneck_assignment(&c).sigma.is_identity());
        let c = CostMatrix::new(vec![
            vec![5.0, 1.0, 1.0],
            vec![1.0, 5.0, 1.0],
            vec![1.0, 1.0, 5.0],
        ])
        .unwrap();
        // only the two derangements avoid the 5s
        assert_eq!(bottleneck_assignment(&c).sigma.images(), &[1, 2, 0]);
    }

    #[test]
    fn matches_brute_force_with_lexicographic_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..300 {
            let n = rng.random_range(1..=6);
            // coarse values force many ties
            let c = CostMatrix::from_fn(n, |_, _| rng.random_range(0..5) as f64).unwrap();
            let a = bottleneck_assignment(&c);
            let (value, sigma) = oracle::brute_force_assignment(&c).unwrap();
            assert_eq!(a.value, value);
            assert_eq!(a.sigma, sigma);
            assert_eq!(c.permutation_cost(&a.sigma), a.value);
            assert_eq!(bottleneck_value_below(&c, value), None);
            assert_eq!(bottleneck_value_below(&c, value + 0.5), Some(value));
        }
    }

    #[test]
    fn deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let c = CostMatrix::from_fn(20, |_, _| rng.random_range(0..4) as f64).unwrap();
        let a = bottleneck_assignment(&c);
        for _ in 0..3 {
            assert_eq!(bottleneck_assignment(&c), a);
        }
    }
}

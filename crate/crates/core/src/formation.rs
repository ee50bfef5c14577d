//! Labeled configurations, the product sup-distance, induced inter-agent
//! metric spaces and the combined symmetry-and-relabeling action.
//!
//! Permutations are index arrays: `sigma[i]` is the image of `i`.
//! Composition is `(sigma . tau)(i) = sigma(tau(i))`. A labeled action
//! `(g, sigma)` sends `x` to the configuration whose coordinate `i` is
//! `g x_{sigma^-1(i)}`, so agent `i` of `x` lands in slot `sigma(i)`.

use crate::ambient::{self, AmbientSpace, GroupElement, Point};
use crate::error::{invalid, Result};
use crate::scalar::Scalar;

/// Default collision tolerance.
pub const COLLISION_TOLERANCE: f64 = 1e-9;

/// A bijection of `{0, .., n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &j in &images {
            if j >= n || seen[j] {
                return invalid(format!("{images:?} is not a permutation"));
            }
            seen[j] = true;
        }
        Ok(Permutation(images))
    }

    pub(crate) fn from_vec_unchecked(images: Vec<usize>) -> Self {
        debug_assert!(Permutation::new(images.clone()).is_ok());
        Permutation(images)
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Swaps `i` and `j`.
    pub fn transposition(n: usize, i: usize, j: usize) -> Result<Self> {
        if i >= n || j >= n {
            return invalid("transposition index out of range");
        }
        let mut v: Vec<usize> = (0..n).collect();
        v.swap(i, j);
        Ok(Permutation(v))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.0.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// `self . other`, i.e. `other` first.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.len() != other.len() {
            return invalid("cannot compose permutations of different sizes");
        }
        Ok(Permutation(other.0.iter().map(|&k| self.0[k]).collect()))
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }
}

/// Ordered n-tuple of points of an ambient space.
#[derive(Debug, Clone, PartialEq)]
pub struct Configuration<S> {
    space: AmbientSpace,
    points: Vec<Point<S>>,
}

impl<S: Scalar> Configuration<S> {
    pub fn new(space: AmbientSpace, points: Vec<Point<S>>) -> Result<Self> {
        space.validate()?;
        if points.is_empty() {
            return invalid("a configuration needs at least one point");
        }
        for (i, p) in points.iter().enumerate() {
            p.check(&space)
                .map_err(|e| crate::Error::InvalidInput(format!("point {i}: {e}")))?;
        }
        Ok(Configuration { space, points })
    }

    /// Circle configuration from raw angles.
    pub fn circle(angles: &[S]) -> Result<Self> {
        let pts = angles
            .iter()
            .map(|&t| Point::angle(t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(AmbientSpace::Circle, pts)
    }

    /// Torus configuration from raw angle tuples.
    pub fn torus(m: usize, points: &[Vec<S>]) -> Result<Self> {
        let space = AmbientSpace::torus(m)?;
        let pts = points
            .iter()
            .map(|c| Point::from_coordinates(&space, c))
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, pts)
    }

    /// Sphere configuration from (approximately) unit 3-vectors.
    pub fn sphere(points: &[[S; 3]]) -> Result<Self> {
        let pts = points
            .iter()
            .map(|v| Point::sphere(*v))
            .collect::<Result<Vec<_>>>()?;
        Self::new(AmbientSpace::Sphere2, pts)
    }

    pub(crate) fn from_parts_unchecked(space: AmbientSpace, points: Vec<Point<S>>) -> Self {
        Configuration { space, points }
    }

    pub fn space(&self) -> &AmbientSpace {
        &self.space
    }

    pub fn points(&self) -> &[Point<S>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point<S> {
        &self.points[i]
    }

    pub fn n(&self) -> usize {
        self.points.len()
    }

    /// First angular coordinate of every point (the phase of a circle
    /// configuration).
    pub fn phases(&self) -> Option<Vec<S>> {
        self.points
            .iter()
            .map(|p| p.as_angles().map(|a| a[0]))
            .collect()
    }

    /// Applies `g` to every point.
    pub fn transformed(&self, g: &GroupElement<S>) -> Result<Self> {
        g.check(&self.space)?;
        Ok(Configuration {
            space: self.space,
            points: self
                .points
                .iter()
                .map(|p| ambient::apply_unchecked(g, p))
                .collect(),
        })
    }

    /// Configuration with coordinates reordered: slot `sigma(i)` receives `x_i`.
    pub fn relabeled(&self, sigma: &Permutation) -> Result<Self> {
        apply_action(&LabeledAction::new(GroupElement::identity(&self.space), sigma.clone()), self)
    }
}

/// Checks that two configurations can be compared.
pub(crate) fn check_comparable<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>) -> Result<()> {
    if x.space != y.space {
        return invalid(format!(
            "configurations live in different spaces ({} vs {})",
            x.space.name(),
            y.space.name()
        ));
    }
    if x.n() != y.n() {
        return invalid(format!("agent counts differ ({} vs {})", x.n(), y.n()));
    }
    Ok(())
}

/// Symmetric `n x n` distance matrix with zero diagonal, stored as its
/// strict upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<S> {
    n: usize,
    upper: Vec<S>,
}

impl<S: Scalar> DistanceMatrix<S> {
    /// Builds a matrix from `f(i, j)` for `i < j`.
    pub(crate) fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                upper.push(f(i, j));
            }
        }
        DistanceMatrix { n, upper }
    }

    /// Validated matrix from full rows; checks symmetry, zero diagonal,
    /// non-negativity and the triangle inequality (slack `1e-9`).
    pub fn from_rows(rows: &[Vec<S>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return invalid("distance matrix must be square");
        }
        for (i, row) in rows.iter().enumerate() {
            if row[i] != S::zero() {
                return invalid("distance matrix diagonal must be zero");
            }
            for (j, v) in row.iter().enumerate() {
                if !v.is_finite() || *v < S::zero() {
                    return invalid("distance matrix entries must be finite and non-negative");
                }
                if *v != rows[j][i] {
                    return invalid("distance matrix must be symmetric");
                }
            }
        }
        let m = Self::from_fn(n, |i, j| rows[i][j]);
        m.check_triangle(S::lit(1e-9))?;
        Ok(m)
    }

    pub fn check_triangle(&self, slack: S) -> Result<()> {
        for i in 0..self.n {
            for j in 0..self.n {
                for k in 0..self.n {
                    if self.get(i, k) > self.get(i, j) + self.get(j, k) + slack {
                        return invalid(format!("triangle inequality fails at ({i}, {j}, {k})"));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    fn index(&self, i: usize, j: usize) -> usize {
        // row i of the strict upper triangle starts at i*n - i(i+1)/2
        i * self.n - i * (i + 1) / 2 + (j - i - 1)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> S {
        use std::cmp::Ordering::*;
        match i.cmp(&j) {
            Equal => S::zero(),
            Less => self.upper[self.index(i, j)],
            Greater => self.upper[self.index(j, i)],
        }
    }

    /// All pairs `(i, j, d)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, S)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.get(i, j))))
    }

    pub fn to_rows(&self) -> Vec<Vec<S>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    /// Matrix with every entry multiplied by `factor`.
    pub fn scaled(&self, factor: S) -> Self {
        DistanceMatrix {
            n: self.n,
            upper: self.upper.iter().map(|v| *v * factor).collect(),
        }
    }

    /// Matrix of the relabeled space: entry `(sigma(i), sigma(j))` of the
    /// result equals entry `(i, j)` of `self`.
    pub fn permuted(&self, sigma: &Permutation) -> Result<Self> {
        if sigma.len() != self.n {
            return invalid("permutation size mismatch");
        }
        let inv = sigma.inverse();
        Ok(Self::from_fn(self.n, |i, j| self.get(inv.apply(i), inv.apply(j))))
    }
}

/// A pair `(g, sigma)` in `G x S_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledAction<S> {
    pub g: GroupElement<S>,
    pub sigma: Permutation,
}

impl<S: Scalar> LabeledAction<S> {
    pub fn new(g: GroupElement<S>, sigma: Permutation) -> Self {
        LabeledAction { g, sigma }
    }

    pub fn identity(space: &AmbientSpace, n: usize) -> Self {
        LabeledAction {
            g: GroupElement::identity(space),
            sigma: Permutation::identity(n),
        }
    }
}

/// `max_i d(x_i, y_i)`.
pub fn chebyshev_distance<S: Scalar>(x: &Configuration<S>, y: &Configuration<S>) -> Result<S> {
    check_comparable(x, y)?;
    Ok(x.points
        .iter()
        .zip(&y.points)
        .map(|(a, b)| ambient::distance_unchecked(a, b))
        .fold(S::zero(), S::max))
}

/// Pairwise ambient distances of a configuration.
pub fn induced_distance_matrix<S: Scalar>(x: &Configuration<S>) -> DistanceMatrix<S> {
    DistanceMatrix::from_fn(x.n(), |i, j| {
        ambient::distance_unchecked(&x.points[i], &x.points[j])
    })
}

/// Configuration whose coordinate `i` is `g x_{sigma^-1(i)}`.
pub fn apply_action<S: Scalar>(h: &LabeledAction<S>, x: &Configuration<S>) -> Result<Configuration<S>> {
    if h.sigma.len() != x.n() {
        return invalid(format!(
            "permutation of size {} applied to {} agents",
            h.sigma.len(),
            x.n()
        ));
    }
    h.g.check(&x.space)?;
    let inv = h.sigma.inverse();
    let points = (0..x.n())
        .map(|i| ambient::apply_unchecked(&h.g, &x.points[inv.apply(i)]))
        .collect();
    Ok(Configuration {
        space: x.space,
        points,
    })
}

/// Cost `max_i d(g x_i, y_sigma(i))` of a feasible alignment.
pub fn alignment_cost<S: Scalar>(
    g: &GroupElement<S>,
    sigma: &Permutation,
    x: &Configuration<S>,
    y: &Configuration<S>,
) -> Result<S> {
    check_comparable(x, y)?;
    if sigma.len() != x.n() {
        return invalid("permutation size mismatch");
    }
    g.check(&x.space)?;
    Ok(alignment_cost_unchecked(g, sigma, x, y))
}

pub(crate) fn alignment_cost_unchecked<S: Scalar>(
    g: &GroupElement<S>,
    sigma: &Permutation,
    x: &Configuration<S>,
    y: &Configuration<S>,
) -> S {
    x.points
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let gp = ambient::apply_unchecked(g, p);
            ambient::distance_unchecked(&gp, &y.points[sigma.apply(i)])
        })
        .fold(S::zero(), S::max)
}

/// True iff two distinct agents are within `tol` of each other.
pub fn has_collision<S: Scalar>(x: &Configuration<S>, tol: S) -> bool {
    let n = x.n();
    (0..n).any(|i| {
        ((i + 1)..n).any(|j| ambient::distance_unchecked(&x.points[i], &x.points[j]) <= tol)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ambient::{sample_group, sample_point};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::TAU;

    #[test]
    fn permutation_validation_and_algebra() {
        assert!(Permutation::new(vec![0, 0]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        let s = Permutation::new(vec![1, 2, 0]).unwrap();
        let t = Permutation::new(vec![0, 2, 1]).unwrap();
        // (s . t)(1) = s(t(1)) = s(2) = 0
        assert_eq!(s.compose(&t).unwrap().apply(1), 0);
        assert!(s.compose(&s.inverse()).unwrap().is_identity());
    }

    #[test]
    fn chebyshev_examples() {
        let x = Configuration::circle(&[0.0f64, 1.0]).unwrap();
        assert_eq!(chebyshev_distance(&x, &x).unwrap(), 0.0);
        let y = Configuration::circle(&[0.1, 1.3]).unwrap();
        assert!((chebyshev_distance(&x, &y).unwrap() - 0.3).abs() < 1e-15);

        let x = Configuration::torus(1, &[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let y = Configuration::torus(1, &[vec![TAU - 0.2], vec![1.0], vec![2.0]]).unwrap();
        assert!((chebyshev_distance(&x, &y).unwrap() - 0.2).abs() < 1e-15);

        let z = Configuration::circle(&[0.0]).unwrap();
        assert!(chebyshev_distance(&x, &z).is_err());
    }

    #[test]
    fn induced_matrix_examples() {
        let x = Configuration::circle(&[0.3]).unwrap();
        let m = induced_distance_matrix(&x);
        assert_eq!(m.n(), 1);
        assert_eq!(m.get(0, 0), 0.0);

        let x = Configuration::circle(&[0.0, 0.5, 1.2]).unwrap();
        let m = induced_distance_matrix(&x);
        let mut off: Vec<f64> = m.edges().map(|e| e.2).collect();
        off.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((off[0] - 0.5).abs() < 1e-15);
        assert!((off[1] - 0.7).abs() < 1e-15);
        assert!((off[2] - 1.2).abs() < 1e-15);
    }

    #[test]
    fn triangle_checked_construction() {
        let bad = vec![
            vec![0.0, 1.0, 5.0],
            vec![1.0, 0.0, 1.0],
            vec![5.0, 1.0, 0.0],
        ];
        assert!(DistanceMatrix::from_rows(&bad).is_err());
        let asym = vec![vec![0.0, 1.0], vec![2.0, 0.0]];
        assert!(DistanceMatrix::from_rows(&asym).is_err());
    }

    #[test]
    fn action_examples() {
        let x = Configuration::circle(&[0.0, 1.0, 2.0]).unwrap();
        let id = LabeledAction::identity(x.space(), 3);
        assert_eq!(apply_action(&id, &x).unwrap(), x);
        let swap = LabeledAction::new(
            GroupElement::identity(x.space()),
            Permutation::transposition(3, 0, 1).unwrap(),
        );
        let y = apply_action(&swap, &x).unwrap();
        assert_eq!(y.phases().unwrap(), vec![1.0, 0.0, 2.0]);
        let bad = LabeledAction::new(GroupElement::identity(x.space()), Permutation::identity(2));
        assert!(apply_action(&bad, &x).is_err());
    }

    #[test]
    fn alignment_cost_examples() {
        let x = Configuration::circle(&[0.0, 1.0]).unwrap();
        let y = Configuration::circle(&[2.0, 3.0]).unwrap();
        let g = GroupElement::translation(vec![2.0]);
        assert_eq!(alignment_cost(&g, &Permutation::identity(2), &x, &y).unwrap(), 0.0);

        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let space = AmbientSpace::Sphere2;
        let pts: Vec<Point<f64>> = (0..5).map(|_| sample_point(&space, &mut rng)).collect();
        let x = Configuration::new(space, pts).unwrap();
        let h = LabeledAction::new(
            sample_group(&space, &mut rng),
            Permutation::new(vec![2, 0, 4, 1, 3]).unwrap(),
        );
        let y = apply_action(&h, &x).unwrap();
        assert!(alignment_cost(&h.g, &h.sigma, &x, &y).unwrap() < 1e-12);
    }

    #[test]
    fn collision_examples() {
        let x = Configuration::circle(&[0.4, 0.4]).unwrap();
        assert!(has_collision(&x, 0.0));
        let x = Configuration::circle(&[0.0, 1.0]).unwrap();
        assert!(!has_collision(&x, 0.5));
        let x = Configuration::circle(&[0.0, 1e-12]).unwrap();
        assert!(has_collision(&x, COLLISION_TOLERANCE));
    }

    #[test]
    fn induced_matrix_is_conjugated_by_actions() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for space in [AmbientSpace::Sphere2, AmbientSpace::torus(2).unwrap(), AmbientSpace::Circle] {
            let pts: Vec<Point<f64>> = (0..6).map(|_| sample_point(&space, &mut rng)).collect();
            let x = Configuration::new(space, pts).unwrap();
            let sigma = Permutation::new(vec![3, 1, 5, 0, 2, 4]).unwrap();
            let h = LabeledAction::new(sample_group(&space, &mut rng), sigma.clone());
            let hx = apply_action(&h, &x).unwrap();
            let lhs = induced_distance_matrix(&hx);
            let rhs = induced_distance_matrix(&x).permuted(&sigma).unwrap();
            for i in 0..6 {
                for j in 0..6 {
                    assert!((lhs.get(i, j) - rhs.get(i, j)).abs() < 1e-9);
                }
            }
        }
    }
}

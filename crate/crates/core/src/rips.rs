//! Vietoris-Rips persistence of finite metric spaces.
//!
//! Filtration values use the radius convention: a simplex enters at half
//! its diameter, so an edge of length `l` appears at `l / 2`. With this
//! convention the stability bound against the Gromov-Hausdorff distance
//! holds with constant one. Degree 0 is computed from a minimum spanning
//! tree; higher degrees from the standard column reduction over the
//! two-element field. Pairs with zero persistence are not reported.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::{invalid, Error, Result};
use crate::formation::{induced_distance_matrix, Configuration, DistanceMatrix};
use crate::scalar::{cmp, Scalar};

/// Multiset of `(birth, death)` pairs of one homology degree. Essential
/// classes have `death = +inf`. Points are kept sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram<S> {
    degree: usize,
    points: Vec<(S, S)>,
}

impl<S: Scalar> PersistenceDiagram<S> {
    pub fn new(degree: usize, mut points: Vec<(S, S)>) -> Result<Self> {
        for &(b, d) in &points {
            if !b.is_finite() || b < S::zero() {
                return invalid(format!("birth {b} must be finite and non-negative"));
            }
            if d.is_nan() || d < b || d == S::neg_infinity() {
                return invalid(format!("death {d} must be at least birth {b}"));
            }
        }
        points.sort_by(|p, q| cmp(&p.0, &q.0).then(cmp(&p.1, &q.1)));
        Ok(PersistenceDiagram { degree, points })
    }

    pub fn empty(degree: usize) -> Self {
        PersistenceDiagram {
            degree,
            points: Vec::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn points(&self) -> &[(S, S)] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn finite_points(&self) -> impl Iterator<Item = (S, S)> + '_ {
        self.points.iter().copied().filter(|p| p.1.is_finite())
    }

    pub fn essential_births(&self) -> impl Iterator<Item = S> + '_ {
        self.points.iter().filter(|p| !p.1.is_finite()).map(|p| p.0)
    }

    /// Diagram with every coordinate multiplied by `factor > 0`.
    pub fn scaled(&self, factor: S) -> Self {
        PersistenceDiagram {
            degree: self.degree,
            points: self.points.iter().map(|&(b, d)| (b * factor, d * factor)).collect(),
        }
    }
}

/// Minimum spanning tree as `(i, j, length)` edges in ascending length.
#[derive(Debug, Clone, PartialEq)]
pub struct MstSummary<S> {
    pub edges: Vec<(usize, usize, S)>,
}

impl<S: Scalar> MstSummary<S> {
    pub fn lengths(&self) -> Vec<S> {
        self.edges.iter().map(|e| e.2).collect()
    }

    pub fn total_weight(&self) -> S {
        self.edges.iter().fold(S::zero(), |acc, e| acc + e.2)
    }
}

struct DisjointSet {
    parent: Vec<usize>,
    rank: Vec<u8>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
            rank: vec![0; n],
        }
    }

    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        match self.rank[ra].cmp(&self.rank[rb]) {
            std::cmp::Ordering::Less => self.parent[ra] = rb,
            std::cmp::Ordering::Greater => self.parent[rb] = ra,
            std::cmp::Ordering::Equal => {
                self.parent[rb] = ra;
                self.rank[ra] += 1;
            }
        }
        true
    }
}

/// Kruskal's algorithm over edges ordered by `(length, i, j)`.
pub fn mst<S: Scalar>(dm: &DistanceMatrix<S>) -> MstSummary<S> {
    let n = dm.n();
    let mut edges: Vec<(usize, usize, S)> = dm.edges().collect();
    edges.sort_by(|a, b| cmp(&a.2, &b.2).then(a.0.cmp(&b.0)).then(a.1.cmp(&b.1)));
    let mut sets = DisjointSet::new(n);
    let mut tree = Vec::with_capacity(n.saturating_sub(1));
    for (i, j, l) in edges {
        if sets.union(i, j) {
            tree.push((i, j, l));
            if tree.len() + 1 == n {
                break;
            }
        }
    }
    MstSummary { edges: tree }
}

/// Degree-0 diagram: `(0, l / 2)` for each positive MST length `l`, plus the
/// essential class `(0, +inf)`.
pub fn h0_diagram<S: Scalar>(dm: &DistanceMatrix<S>) -> PersistenceDiagram<S> {
    let mut points: Vec<(S, S)> = mst(dm)
        .edges
        .iter()
        .map(|e| e.2 / S::two())
        .filter(|d| *d > S::zero())
        .map(|d| (S::zero(), d))
        .collect();
    points.push((S::zero(), S::infinity()));
    PersistenceDiagram::new(0, points).expect("MST lengths are valid deaths")
}

/// Default size guard for [`rips_diagram`].
pub fn default_max_n(degree: usize) -> usize {
    match degree {
        0 => 512,
        1 => 24,
        2 => 16,
        _ => 12,
    }
}

struct Simplex<S> {
    vertices: Vec<usize>,
    value: S,
}

fn combinations(n: usize, k: usize, out: &mut Vec<Vec<usize>>) {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            if n - v < k - cur.len() {
                break;
            }
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut Vec::with_capacity(k), out);
}

/// Symmetric difference of two sorted index lists.
fn add_columns(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

/// Degree-`k` Vietoris-Rips diagram by boundary-matrix reduction.
///
/// `max_n` defaults to [`default_max_n`]; larger inputs are rejected.
pub fn rips_diagram<S: Scalar>(
    dm: &DistanceMatrix<S>,
    k: usize,
    max_n: Option<usize>,
) -> Result<PersistenceDiagram<S>> {
    let n = dm.n();
    let guard = max_n.unwrap_or_else(|| default_max_n(k));
    if n > guard {
        return Err(Error::Unsupported(format!(
            "degree-{k} Rips persistence limited to {guard} points, got {n}"
        )));
    }
    let two = S::two();
    let max_dim = (k + 1).min(n.saturating_sub(1));
    let mut simplices: Vec<Simplex<S>> = Vec::new();
    for dim in 0..=max_dim {
        let mut combos = Vec::new();
        combinations(n, dim + 1, &mut combos);
        for vertices in combos {
            let mut diam = S::zero();
            for a in 0..vertices.len() {
                for b in (a + 1)..vertices.len() {
                    diam = diam.max(dm.get(vertices[a], vertices[b]));
                }
            }
            simplices.push(Simplex {
                vertices,
                value: diam / two,
            });
        }
    }
    // (value, dimension, lexicographic vertices)
    simplices.sort_by(|a, b| {
        cmp(&a.value, &b.value)
            .then(a.vertices.len().cmp(&b.vertices.len()))
            .then_with(|| a.vertices.cmp(&b.vertices))
    });
    let position: HashMap<&[usize], usize> = simplices
        .iter()
        .enumerate()
        .map(|(p, s)| (s.vertices.as_slice(), p))
        .collect();

    let mut reduced: Vec<Vec<usize>> = Vec::with_capacity(simplices.len());
    let mut low_owner: HashMap<usize, usize> = HashMap::new();
    let mut pairs = Vec::new();
    let mut is_low = vec![false; simplices.len()];
    for (col, s) in simplices.iter().enumerate() {
        let dim = s.vertices.len() - 1;
        if dim == 0 || dim < k {
            reduced.push(Vec::new());
            continue;
        }
        let mut boundary: Vec<usize> = (0..s.vertices.len())
            .map(|skip| {
                let face: Vec<usize> = s
                    .vertices
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| *i != skip)
                    .map(|(_, v)| *v)
                    .collect();
                position[face.as_slice()]
            })
            .collect();
        boundary.sort_unstable();
        while let Some(&low) = boundary.last() {
            match low_owner.get(&low) {
                Some(&other) => boundary = add_columns(&boundary, &reduced[other]),
                None => break,
            }
        }
        if let Some(&low) = boundary.last() {
            low_owner.insert(low, col);
            is_low[low] = true;
            if dim == k + 1 {
                pairs.push((low, col));
            }
        }
        reduced.push(boundary);
    }

    let mut points = Vec::new();
    for (birth, death) in pairs {
        let (b, d) = (simplices[birth].value, simplices[death].value);
        if b < d {
            points.push((b, d));
        }
    }
    for (p, s) in simplices.iter().enumerate() {
        if s.vertices.len() == k + 1 && reduced[p].is_empty() && !is_low[p] {
            points.push((s.value, S::infinity()));
        }
    }
    PersistenceDiagram::new(k, points)
}

/// Persistence signature of a configuration: the Rips diagram of its
/// induced metric space in each requested degree.
pub fn signature<S: Scalar>(
    x: &Configuration<S>,
    degrees: &BTreeSet<usize>,
) -> Result<BTreeMap<usize, PersistenceDiagram<S>>> {
    if degrees.is_empty() {
        return invalid("at least one homology degree is required");
    }
    let dm = induced_distance_matrix(x);
    degrees
        .iter()
        .map(|&k| rips_diagram(&dm, k, None).map(|d| (k, d)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn line(points: &[f64]) -> DistanceMatrix<f64> {
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        DistanceMatrix::from_rows(&rows).unwrap()
    }

    /// Random metric from points in the unit cube.
    pub(crate) fn random_metric(rng: &mut ChaCha8Rng, n: usize) -> DistanceMatrix<f64> {
        let pts: Vec<[f64; 3]> = (0..n)
            .map(|_| [rng.random(), rng.random(), rng.random()])
            .collect();
        let rows: Vec<Vec<f64>> = pts
            .iter()
            .map(|a| {
                pts.iter()
                    .map(|b| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt())
                    .collect()
            })
            .collect();
        DistanceMatrix::from_rows(&rows).unwrap()
    }

    #[test]
    fn mst_examples() {
        assert!(mst(&line(&[0.3])).edges.is_empty());
        let t = mst(&line(&[0.0, 0.5, 1.2]));
        assert_eq!(t.edges.len(), 2);
        assert_eq!(t.edges[0], (0, 1, 0.5));
        assert!((t.edges[1].2 - 0.7).abs() < 1e-15);
        assert_eq!((t.edges[1].0, t.edges[1].1), (1, 2));
    }

    #[test]
    fn mst_weight_matches_cayley_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..60 {
            let n = rng.random_range(1..=6);
            let dm = random_metric(&mut rng, n);
            let tree = mst(&dm);
            let (w, lengths) = oracle::brute_force_mst(&dm).unwrap();
            assert_eq!(tree.lengths(), lengths);
            assert_eq!(tree.total_weight(), w);
        }
    }

    #[test]
    fn h0_examples() {
        let d = h0_diagram(&line(&[2.0]));
        assert_eq!(d.points(), &[(0.0, f64::INFINITY)]);
        let d = h0_diagram(&line(&[0.0, 0.5, 1.2]));
        let sweep = oracle::h0_deaths_by_sweep(&line(&[0.0, 0.5, 1.2]));
        let deaths: Vec<f64> = d.finite_points().map(|p| p.1).collect();
        assert_eq!(deaths, sweep);
        assert_eq!(d.len(), 3);
        assert!((deaths[0] - 0.25).abs() < 1e-15 && (deaths[1] - 0.35).abs() < 1e-15);
    }

    #[test]
    fn rips_degree_zero_equals_mst_diagram() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..100 {
            let n = rng.random_range(1..=9);
            let dm = random_metric(&mut rng, n);
            assert_eq!(rips_diagram(&dm, 0, None).unwrap(), h0_diagram(&dm));
            let mut sweep = oracle::h0_deaths_by_sweep(&dm);
            sweep.sort_by(cmp);
            let deaths: Vec<f64> = h0_diagram(&dm).finite_points().map(|p| p.1).collect();
            assert_eq!(deaths, sweep);
        }
    }

    #[test]
    fn three_points_have_empty_h1() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..50 {
            let dm = random_metric(&mut rng, 3);
            assert!(rips_diagram(&dm, 1, None).unwrap().is_empty());
        }
    }

    #[test]
    fn square_on_flat_torus() {
        let a = 0.2f64;
        let x = Configuration::torus(2, &[vec![0.0, 0.0], vec![a, 0.0], vec![a, a], vec![0.0, a]])
            .unwrap();
        let d = rips_diagram(&induced_distance_matrix(&x), 1, None).unwrap();
        assert_eq!(d.len(), 1);
        let (b, death) = d.points()[0];
        assert!((b - a / 2.0).abs() < 1e-15);
        assert!((death - a * 2f64.sqrt() / 2.0).abs() < 1e-15);
    }

    #[test]
    fn reduction_matches_persistent_betti_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let n = rng.random_range(3..=7);
            let dm = random_metric(&mut rng, n);
            assert_eq!(rips_diagram(&dm, 1, None).unwrap(), oracle::naive_h1_diagram(&dm).unwrap());
        }
    }

    #[test]
    fn doubling_the_metric_doubles_the_diagram() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            let dm = random_metric(&mut rng, 7);
            for k in 0..=2 {
                let d = rips_diagram(&dm, k, None).unwrap();
                let d2 = rips_diagram(&dm.scaled(2.0), k, None).unwrap();
                assert_eq!(d.scaled(2.0), d2);
            }
        }
    }

    #[test]
    fn guard_rejects_large_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let dm = random_metric(&mut rng, 25);
        assert!(matches!(rips_diagram(&dm, 1, None), Err(Error::Unsupported(_))));
        assert!(rips_diagram(&dm, 0, None).is_ok());
    }

    #[test]
    fn diagram_validation() {
        assert!(PersistenceDiagram::new(0, vec![(1.0, 0.5)]).is_err());
        assert!(PersistenceDiagram::new(0, vec![(f64::NAN, 0.5)]).is_err());
        assert!(PersistenceDiagram::<f64>::new(0, vec![(0.0, f64::INFINITY)]).is_ok());
        assert!(signature(&Configuration::circle(&[0.0]).unwrap(), &BTreeSet::new()).is_err());
    }
}

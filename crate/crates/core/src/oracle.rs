//! Brute-force verification oracles.
//!
//! Everything here is deliberately naive and shares no code path with the
//! solvers it is used to check: permutations are enumerated, spanning trees
//! are enumerated through Pruefer sequences, diagram matchings are
//! enumerated structurally and degree-1 persistence is recomputed from
//! persistent Betti numbers. Sizes are capped so requests beyond desk scale
//! fail loudly.

use crate::ambient::Point;
use crate::assignment::CostMatrix;
use crate::error::{Error, Result};
use crate::formation::{check_comparable, Configuration, DistanceMatrix, Permutation};
use crate::rips::PersistenceDiagram;
use crate::rotation;
use crate::scalar::{cmp, Scalar};

/// Largest `n` for which `n!` enumeration is allowed.
pub const MAX_BRUTE_FORCE_N: usize = 7;

fn too_large<T>(what: &str, n: usize, cap: usize) -> Result<T> {
    Err(Error::Unsupported(format!(
        "{what}: size {n} exceeds the brute-force cap {cap}"
    )))
}

/// Advances `p` to the next permutation in lexicographic order.
pub fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, mut f: impl FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        if !next_permutation(&mut p) {
            break;
        }
    }
}

/// Minimum over all `n!` permutations of the row-max cost, with the
/// lexicographically first minimizer.
pub fn brute_force_assignment<S: Scalar>(c: &CostMatrix<S>) -> Result<(S, Permutation)> {
    let n = c.n();
    if n > MAX_BRUTE_FORCE_N {
        return too_large("assignment enumeration", n, MAX_BRUTE_FORCE_N);
    }
    let mut best = S::infinity();
    let mut arg: Vec<usize> = (0..n).collect();
    for_each_permutation(n, |p| {
        let mut worst = S::zero();
        for (i, &j) in p.iter().enumerate() {
            worst = worst.max(c.get(i, j));
        }
        if worst < best {
            best = worst;
            arg = p.to_vec();
        }
    });
    if n == 0 {
        best = S::zero();
    }
    Ok((best, Permutation::new(arg)?))
}

/// Minimum row-max cost over permutations, enumerated depth-first with
/// exact pruning against the incumbent. Returns `None` when nothing beats
/// `cutoff`.
pub(crate) fn enumerate_assignment_below<S: Scalar>(
    n: usize,
    cost: &dyn Fn(usize, usize) -> S,
    cutoff: S,
) -> Option<(S, Vec<usize>)> {
    fn rec<S: Scalar>(
        row: usize,
        n: usize,
        cost: &dyn Fn(usize, usize) -> S,
        used: &mut [bool],
        current: &mut Vec<usize>,
        partial: S,
        best: &mut S,
        arg: &mut Option<Vec<usize>>,
    ) {
        if row == n {
            if partial < *best {
                *best = partial;
                *arg = Some(current.clone());
            }
            return;
        }
        for col in 0..n {
            if used[col] {
                continue;
            }
            let p = partial.max(cost(row, col));
            if p >= *best {
                continue;
            }
            used[col] = true;
            current.push(col);
            rec(row + 1, n, cost, used, current, p, best, arg);
            current.pop();
            used[col] = false;
        }
    }
    let mut best = cutoff;
    let mut arg = None;
    let mut used = vec![false; n];
    rec(0, n, cost, &mut used, &mut Vec::with_capacity(n), S::zero(), &mut best, &mut arg);
    arg.map(|a| (best, a))
}

/// Weight and sorted edge lengths of a minimum spanning tree, found by
/// enumerating all `n^(n-2)` labeled trees. Tree weights are summed over
/// ascending edge lengths so the same tree always gets the same total.
pub fn brute_force_mst<S: Scalar>(dm: &DistanceMatrix<S>) -> Result<(S, Vec<S>)> {
    let n = dm.n();
    const CAP: usize = 7;
    if n > CAP {
        return too_large("spanning tree enumeration", n, CAP);
    }
    if n <= 1 {
        return Ok((S::zero(), Vec::new()));
    }
    if n == 2 {
        let l = dm.get(0, 1);
        return Ok((l, vec![l]));
    }
    let len = n - 2;
    let total = n.pow(len as u32);
    let mut best = S::infinity();
    let mut best_lengths = Vec::new();
    let mut seq = vec![0usize; len];
    for code in 0..total {
        let mut c = code;
        for s in seq.iter_mut() {
            *s = c % n;
            c /= n;
        }
        let mut lengths: Vec<S> = pruefer_edges(&seq, n)
            .into_iter()
            .map(|(a, b)| dm.get(a, b))
            .collect();
        lengths.sort_by(cmp);
        let w = lengths.iter().fold(S::zero(), |acc, l| acc + *l);
        if w < best {
            best = w;
            best_lengths = lengths;
        }
    }
    Ok((best, best_lengths))
}

fn pruefer_edges(seq: &[usize], n: usize) -> Vec<(usize, usize)> {
    let mut degree = vec![1usize; n];
    for &s in seq {
        degree[s] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    for &s in seq {
        let leaf = (0..n).find(|&v| degree[v] == 1).expect("leaf exists");
        edges.push((leaf, s));
        degree[leaf] = 0;
        degree[s] -= 1;
    }
    let rest: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    edges.push((rest[0], rest[1]));
    edges
}

/// Degree-0 deaths from a threshold sweep: at each distinct distance the
/// number of connected components (by graph search) drops by the number of
/// classes dying at half that distance.
pub fn h0_deaths_by_sweep<S: Scalar>(dm: &DistanceMatrix<S>) -> Vec<S> {
    let n = dm.n();
    let mut values: Vec<S> = dm.edges().map(|e| e.2).collect();
    values.sort_by(cmp);
    values.dedup();
    let components = |t: S| -> usize {
        let mut seen = vec![false; n];
        let mut count = 0;
        for s in 0..n {
            if seen[s] {
                continue;
            }
            count += 1;
            let mut stack = vec![s];
            seen[s] = true;
            while let Some(v) = stack.pop() {
                for w in 0..n {
                    if !seen[w] && w != v && dm.get(v, w) <= t {
                        seen[w] = true;
                        stack.push(w);
                    }
                }
            }
        }
        count
    };
    let mut deaths = Vec::new();
    let mut previous = n;
    for v in values {
        let now = components(v);
        for _ in now..previous {
            deaths.push(v / S::two());
        }
        previous = now;
    }
    deaths.retain(|d| *d > S::zero());
    deaths
}

/// Degree-1 Vietoris-Rips diagram (radius convention) recomputed from
/// persistent Betti numbers: `beta(s, t) = rank(B_t + Z_s) - rank(B_t)` over
/// the two-element field, and the multiplicity of `(a_i, a_j)` from the
/// usual inclusion-exclusion of these ranks.
pub fn naive_h1_diagram<S: Scalar>(dm: &DistanceMatrix<S>) -> Result<PersistenceDiagram<S>> {
    let n = dm.n();
    const CAP: usize = 11;
    if n > CAP {
        return too_large("persistent Betti oracle", n, CAP);
    }
    let two = S::two();
    let mut edges: Vec<(usize, usize, S)> = Vec::new();
    let mut edge_index = vec![vec![usize::MAX; n]; n];
    for (i, j, d) in dm.edges() {
        edge_index[i][j] = edges.len();
        edge_index[j][i] = edges.len();
        edges.push((i, j, d / two));
    }
    let mut triangles: Vec<(u64, S)> = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            for k in (j + 1)..n {
                let v = dm.get(i, j).max(dm.get(i, k)).max(dm.get(j, k)) / two;
                let mask = (1u64 << edge_index[i][j])
                    | (1u64 << edge_index[i][k])
                    | (1u64 << edge_index[j][k]);
                triangles.push((mask, v));
            }
        }
    }
    let mut scales: Vec<S> = edges.iter().map(|e| e.2).chain(triangles.iter().map(|t| t.1)).collect();
    scales.push(S::zero());
    scales.sort_by(cmp);
    scales.dedup();
    let m = scales.len();

    let cycles_at = |a: S| -> Vec<u64> {
        // fundamental cycles of a spanning forest of the 1-skeleton
        let mut parent = vec![usize::MAX; n];
        let mut parent_edge = vec![usize::MAX; n];
        let mut depth = vec![0usize; n];
        let mut in_tree = vec![false; edges.len()];
        let mut seen = vec![false; n];
        for s in 0..n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(v) = queue.pop_front() {
                for w in 0..n {
                    if w == v || seen[w] {
                        continue;
                    }
                    let e = edge_index[v][w];
                    if edges[e].2 <= a {
                        seen[w] = true;
                        parent[w] = v;
                        parent_edge[w] = e;
                        depth[w] = depth[v] + 1;
                        in_tree[e] = true;
                        queue.push_back(w);
                    }
                }
            }
        }
        let mut out = Vec::new();
        for (e, &(u, v, val)) in edges.iter().enumerate() {
            if val > a || in_tree[e] {
                continue;
            }
            let mut mask = 1u64 << e;
            let (mut p, mut q) = (u, v);
            while depth[p] > depth[q] {
                mask ^= 1u64 << parent_edge[p];
                p = parent[p];
            }
            while depth[q] > depth[p] {
                mask ^= 1u64 << parent_edge[q];
                q = parent[q];
            }
            while p != q {
                mask ^= 1u64 << parent_edge[p];
                mask ^= 1u64 << parent_edge[q];
                p = parent[p];
                q = parent[q];
            }
            out.push(mask);
        }
        out
    };
    let boundaries_at = |a: S| -> Vec<u64> {
        triangles.iter().filter(|t| t.1 <= a).map(|t| t.0).collect()
    };
    let cycles: Vec<Vec<u64>> = scales.iter().map(|&a| cycles_at(a)).collect();
    let boundaries: Vec<Vec<u64>> = scales.iter().map(|&a| boundaries_at(a)).collect();
    let boundary_rank: Vec<usize> = boundaries.iter().map(|b| gf2_rank(b.clone())).collect();

    // beta[s][t] with 1-based scale indices; index 0 is the empty complex
    let mut beta = vec![vec![0usize; m + 1]; m + 1];
    for s in 1..=m {
        for t in s..=m {
            let mut v = boundaries[t - 1].clone();
            v.extend_from_slice(&cycles[s - 1]);
            beta[s][t] = gf2_rank(v) - boundary_rank[t - 1];
        }
    }
    let b = |s: usize, t: usize| -> i64 { beta[s][t] as i64 };
    let mut points = Vec::new();
    for i in 1..=m {
        for j in (i + 1)..=m {
            let mu = b(i, j - 1) - b(i, j) - b(i - 1, j - 1) + b(i - 1, j);
            if mu < 0 {
                return Err(Error::DegenerateConfiguration(
                    "negative persistence multiplicity".into(),
                ));
            }
            for _ in 0..mu {
                points.push((scales[i - 1], scales[j - 1]));
            }
        }
        let essential = b(i, m) - b(i - 1, m);
        for _ in 0..essential.max(0) {
            points.push((scales[i - 1], S::infinity()));
        }
    }
    PersistenceDiagram::new(1, points)
}

fn gf2_rank(mut rows: Vec<u64>) -> usize {
    let mut rank = 0;
    for bit in 0..64 {
        let pivot = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1);
        if let Some(p) = pivot {
            rows.swap(rank, p);
            for r in 0..rows.len() {
                if r != rank && rows[r] >> bit & 1 == 1 {
                    rows[r] ^= rows[rank];
                }
            }
            rank += 1;
        }
    }
    rank
}

/// Bottleneck distance by enumerating every partial matching between the
/// finite points (unmatched points go to the diagonal) and every bijection
/// between the essential classes.
pub fn brute_force_diagram_bottleneck<S: Scalar>(
    a: &PersistenceDiagram<S>,
    b: &PersistenceDiagram<S>,
) -> Result<S> {
    let fa: Vec<(S, S)> = a.finite_points().collect();
    let fb: Vec<(S, S)> = b.finite_points().collect();
    let ea: Vec<S> = a.essential_births().collect();
    let eb: Vec<S> = b.essential_births().collect();
    const CAP: usize = 6;
    if fa.len() > CAP || fb.len() > CAP || ea.len() > MAX_BRUTE_FORCE_N {
        return too_large("diagram matching enumeration", fa.len().max(fb.len()), CAP);
    }
    if ea.len() != eb.len() {
        return Ok(S::infinity());
    }
    let mut essential = if ea.is_empty() { S::zero() } else { S::infinity() };
    for_each_permutation(ea.len(), |p| {
        let c = p
            .iter()
            .enumerate()
            .map(|(i, &j)| (ea[i] - eb[j]).abs())
            .fold(S::zero(), S::max);
        essential = essential.min(c);
    });

    let diag = |p: &(S, S)| (p.1 - p.0) / S::two();
    let pair = |p: &(S, S), q: &(S, S)| (p.0 - q.0).abs().max((p.1 - q.1).abs());
    fn rec<S: Scalar>(
        i: usize,
        fa: &[(S, S)],
        fb: &[(S, S)],
        used: &mut [bool],
        partial: S,
        best: &mut S,
        diag: &dyn Fn(&(S, S)) -> S,
        pair: &dyn Fn(&(S, S), &(S, S)) -> S,
    ) {
        if i == fa.len() {
            let mut c = partial;
            for (j, q) in fb.iter().enumerate() {
                if !used[j] {
                    c = c.max(diag(q));
                }
            }
            *best = best.min(c);
            return;
        }
        rec(i + 1, fa, fb, used, partial.max(diag(&fa[i])), best, diag, pair);
        for j in 0..fb.len() {
            if !used[j] {
                used[j] = true;
                rec(i + 1, fa, fb, used, partial.max(pair(&fa[i], &fb[j])), best, diag, pair);
                used[j] = false;
            }
        }
    }
    let mut best = S::infinity();
    let mut used = vec![false; fb.len()];
    rec(0, &fa, &fb, &mut used, S::zero(), &mut best, &diag, &pair);
    Ok(best.max(essential))
}

/// Rigorous lower bound on the rotation-and-relabeling distance between two
/// sphere configurations.
///
/// If `d(R x_i, y_sigma(i)) <= eps` for all `i` then pairwise distances move
/// by at most `2 eps` and every oriented volume `det(x_i, x_j, x_k)` (which
/// rotations preserve) moves by at most `3 eps`, since chords are shorter
/// than arcs. Minimizing the implied bound over all permutations gives a
/// certificate that separates a configuration from its mirror image.
pub fn sphere_distance_lower_bound<S: Scalar>(
    x: &Configuration<S>,
    y: &Configuration<S>,
) -> Result<S> {
    check_comparable(x, y)?;
    let n = x.n();
    if n > MAX_BRUTE_FORCE_N {
        return too_large("sphere lower bound", n, MAX_BRUTE_FORCE_N);
    }
    let xs: Vec<[S; 3]> = x.points().iter().filter_map(Point::as_sphere).copied().collect();
    let ys: Vec<[S; 3]> = y.points().iter().filter_map(Point::as_sphere).copied().collect();
    if xs.len() != n || ys.len() != n {
        return Err(Error::InvalidInput("sphere configurations required".into()));
    }
    let dx = crate::formation::induced_distance_matrix(x);
    let dy = crate::formation::induced_distance_matrix(y);
    let three = S::lit(3.0);
    let mut best = S::infinity();
    for_each_permutation(n, |p| {
        let mut lb = S::zero();
        for i in 0..n {
            for j in (i + 1)..n {
                lb = lb.max((dx.get(i, j) - dy.get(p[i], p[j])).abs() / S::two());
                for k in (j + 1)..n {
                    let vx = rotation::det3(&xs[i], &xs[j], &xs[k]);
                    let vy = rotation::det3(&ys[p[i]], &ys[p[j]], &ys[p[k]]);
                    lb = lb.max((vx - vy).abs() / three);
                }
            }
        }
        best = best.min(lb);
    });
    Ok(best)
}

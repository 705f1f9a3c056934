//! Independent reference implementations used as test oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rendezvous_core::geometry::Point;
use rendezvous_core::proxgraph::Graph;

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

pub fn random_points(rng: &mut StdRng, n: usize, d: usize, half: f64) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new((0..d).map(|_| rng.random_range(-half..half)).collect()))
        .collect()
}

fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Solves `a x = b` by Gauss-Jordan elimination with full row scan;
/// `None` when singular.
fn gauss_jordan(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-12 {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

/// Center of the smallest sphere through every point of `s`, within
/// their affine hull.
fn circumcenter(s: &[&[f64]]) -> Option<Vec<f64>> {
    let p0 = s[0];
    let k = s.len() - 1;
    if k == 0 {
        return Some(p0.to_vec());
    }
    let v: Vec<Vec<f64>> = s[1..]
        .iter()
        .map(|p| p.iter().zip(p0).map(|(a, b)| a - b).collect())
        .collect();
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
    let a: Vec<Vec<f64>> = (0..k).map(|i| (0..k).map(|j| 2.0 * dot(&v[i], &v[j])).collect()).collect();
    let b: Vec<f64> = (0..k).map(|i| dot(&v[i], &v[i])).collect();
    let alpha = gauss_jordan(a, b)?;
    let mut c = p0.to_vec();
    for (al, vi) in alpha.iter().zip(&v) {
        for (cx, vx) in c.iter_mut().zip(vi) {
            *cx += al * vx;
        }
    }
    Some(c)
}

/// Smallest circumball over all subsets of size at most `d + 1` that
/// encloses every point. Returns `(center, radius)`.
pub fn brute_force_meb(points: &[Point]) -> (Vec<f64>, f64) {
    let d = points[0].dim();
    let n = points.len();
    let mut best: Option<(Vec<f64>, f64)> = None;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize > d + 1 {
            continue;
        }
        let subset: Vec<&[f64]> = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| points[i].coords()).collect();
        let Some(c) = circumcenter(&subset) else { continue };
        let r = dist2(&c, subset[0]).sqrt();
        let encloses = points.iter().all(|p| dist2(&c, p.coords()).sqrt() <= r + 1e-10 * r.max(1.0));
        if encloses && best.as_ref().is_none_or(|(_, br)| r < *br) {
            best = Some((c, r));
        }
    }
    best.expect("some subset always encloses")
}

/// Every undirected graph on `n` vertices, as edge lists.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let m = pairs.len();
    (0u64..(1 << m)).map(move |mask| (0..m).filter(|k| mask >> k & 1 == 1).map(|k| pairs[k]).collect())
}

pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut x = x;
        while self.parent[x] != r {
            let next = self.parent[x];
            self.parent[x] = r;
            x = next;
        }
        r
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        self.parent[ra] = rb;
    }
}

pub fn uf_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    let mut uf = UnionFind::new(n);
    for &(a, b) in edges {
        uf.union(a, b);
    }
    (0..n).all(|i| uf.find(i) == uf.find(0))
}

/// All-pairs hop counts by Floyd-Warshall; `usize::MAX` when unreachable.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let inf = usize::MAX / 4;
    let mut d = vec![vec![inf; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0;
    }
    for &(a, b) in edges.iter().filter(|(a, b)| a != b) {
        d[a][b] = 1;
        d[b][a] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    for row in &mut d {
        for x in row.iter_mut() {
            if *x >= inf {
                *x = usize::MAX;
            }
        }
    }
    d
}

pub fn fw_diameter(n: usize, edges: &[(usize, usize)]) -> Option<usize> {
    let d = floyd_warshall(n, edges);
    let m = d.iter().flatten().copied().max().unwrap_or(0);
    (m != usize::MAX).then_some(m)
}

/// Shortest simple path from `s` to `t` by exhaustive depth-first search.
pub fn exhaustive_path_length(n: usize, edges: &[(usize, usize)], s: usize, t: usize) -> Option<usize> {
    fn go(adj: &[Vec<usize>], u: usize, t: usize, seen: &mut Vec<bool>, len: usize, best: &mut Option<usize>) {
        if u == t {
            *best = Some(best.map_or(len, |b| b.min(len)));
            return;
        }
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                go(adj, v, t, seen, len + 1, best);
                seen[v] = false;
            }
        }
    }
    let mut adj = vec![Vec::new(); n];
    for &(a, b) in edges {
        adj[a].push(b);
        adj[b].push(a);
    }
    let mut seen = vec![false; n];
    seen[s] = true;
    let mut best = None;
    go(&adj, s, t, &mut seen, 0, &mut best);
    best
}

/// Random connected graph: a random spanning tree plus extra edges.
pub fn random_connected_graph(rng: &mut StdRng, n: usize, extra: f64) -> Vec<(usize, usize)> {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((rng.random_range(0..i), i));
    }
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(extra) {
                edges.push((i, j));
            }
        }
    }
    edges
}

/// Plain min/max flooding on raw arrays; returns the first round at which
/// every agent holds the global bounds.
pub fn flood_extrema_rounds(graph: &Graph, positions: &[Point]) -> usize {
    let n = positions.len();
    let d = positions[0].dim();
    let mut lo: Vec<Vec<f64>> = positions.iter().map(|p| p.coords().to_vec()).collect();
    let mut hi = lo.clone();
    let glo: Vec<f64> = (0..d).map(|a| positions.iter().map(|p| p[a]).fold(f64::INFINITY, f64::min)).collect();
    let ghi: Vec<f64> = (0..d).map(|a| positions.iter().map(|p| p[a]).fold(f64::NEG_INFINITY, f64::max)).collect();
    for round in 0..=n {
        if lo.iter().all(|l| *l == glo) && hi.iter().all(|h| *h == ghi) {
            return round;
        }
        let (plo, phi) = (lo.clone(), hi.clone());
        for i in 0..n {
            for &j in graph.neighbors(i) {
                for a in 0..d {
                    lo[i][a] = lo[i][a].min(plo[j][a]);
                    hi[i][a] = hi[i][a].max(phi[j][a]);
                }
            }
        }
    }
    panic!("flooding did not converge on a connected graph");
}

/// Largest `lambda` in `[0, 1]` with `p + lambda * step` inside every
/// midpoint constraint, by a dense scan refined with bisection. Axes with a
/// zero step are ignored under the infinity norm.
pub fn lambda_by_bisection(p: &[f64], step: &[f64], neighbors: &[&[f64]], rho: f64, inf_norm: bool) -> Option<f64> {
    let feasible = |lambda: f64| {
        neighbors.iter().all(|q| {
            let diffs = p.iter().zip(*q).zip(step).map(|((pi, qi), si)| (pi + lambda * si - 0.5 * (pi + qi), *si));
            if inf_norm {
                diffs.filter(|(_, s)| *s != 0.0).all(|(x, _)| x.abs() <= rho)
            } else {
                diffs.map(|(x, _)| x * x).sum::<f64>().sqrt() <= rho
            }
        })
    };
    const STEPS: usize = 20_000;
    let last = (0..=STEPS).rev().map(|k| k as f64 / STEPS as f64).find(|&l| feasible(l))?;
    if last == 1.0 {
        return Some(1.0);
    }
    let (mut a, mut b) = (last, (last + 1.0 / STEPS as f64).min(1.0));
    for _ in 0..60 {
        let m = 0.5 * (a + b);
        if feasible(m) {
            a = m;
        } else {
            b = m;
        }
    }
    Some(a)
}

/// Exhaustive 1-D reachability on a grid of spacing `r_ctr / k`: each round
/// an agent may move at most `k` cells. Returns the first round at which
/// the agents' reachable sets intersect, and that intersection in
/// coordinates.
pub fn grid_min_time_1d(xs: &[f64], r_ctr: f64, k: i64) -> (usize, Vec<f64>) {
    let h = r_ctr / k as f64;
    let lo = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let cells: Vec<i64> = xs.iter().map(|x| ((x - lo) / h).round() as i64).collect();
    let span = cells.iter().copied().max().unwrap() + 1;
    let mut reach: Vec<Vec<bool>> = cells
        .iter()
        .map(|&c| (0..span).map(|i| i == c).collect())
        .collect();
    for t in 0.. {
        let common: Vec<i64> = (0..span).filter(|&i| reach.iter().all(|r| r[i as usize])).collect();
        if !common.is_empty() {
            return (t, common.iter().map(|&i| lo + i as f64 * h).collect());
        }
        for r in &mut reach {
            let prev = r.clone();
            for i in 0..span {
                r[i as usize] = (i - k..=i + k).any(|j| j >= 0 && j < span && prev[j as usize]);
            }
        }
    }
    unreachable!()
}

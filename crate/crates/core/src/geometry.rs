//! Points, balls and axis-aligned orthotopes in R^d.
//!
//! The minimal enclosing ball is computed with the move-to-front variant of
//! Welzl's randomized recursion over a fixed-seed shuffle, so results are a
//! pure function of the input list. Equality of shapes is tolerance based
//! (see [`DEFAULT_TOL`]); exact real arithmetic is not attempted.

use std::fmt;
use std::ops::Index;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Geometric tolerance used for enclosure tests and shape equality.
pub const DEFAULT_TOL: f64 = 1e-9;

const SHUFFLE_SEED: u64 = 0x5eed_ba11;

// Above this many candidate subsets the support search falls back to pruning
// the recursion's own support set.
const MAX_SUPPORT_SUBSETS: usize = 20_000;

/// A point of R^d.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_coords(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// `self - other` as a plain vector.
    pub fn sub(&self, other: &Point) -> Vec<f64> {
        self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect()
    }

    /// `self + v`.
    pub fn translate(&self, v: &[f64]) -> Point {
        Point(self.0.iter().zip(v).map(|(a, b)| a + b).collect())
    }

    pub fn midpoint(&self, other: &Point) -> Point {
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| 0.5 * (a + b))
                .collect(),
        )
    }

    pub fn distance(&self, other: &Point, norm: Norm) -> f64 {
        norm.of_diff(&self.0, &other.0)
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Point{:?}", self.0)
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, axis: usize) -> &f64 {
        &self.0[axis]
    }
}

impl From<Vec<f64>> for Point {
    fn from(coords: Vec<f64>) -> Self {
        Point(coords)
    }
}

impl<const D: usize> From<[f64; D]> for Point {
    fn from(coords: [f64; D]) -> Self {
        Point(coords.to_vec())
    }
}

/// The two norms used for distances, control bounds and proximity edges.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Norm {
    /// Euclidean norm.
    TwoNorm,
    /// Maximum-coordinate norm.
    InfNorm,
}

impl Norm {
    pub fn of(self, v: &[f64]) -> f64 {
        match self {
            Norm::TwoNorm => v.iter().map(|x| x * x).sum::<f64>().sqrt(),
            Norm::InfNorm => v.iter().fold(0.0, |m, x| m.max(x.abs())),
        }
    }

    pub fn of_diff(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Norm::TwoNorm => a
                .iter()
                .zip(b)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                .sqrt(),
            Norm::InfNorm => a
                .iter()
                .zip(b)
                .fold(0.0, |m, (x, y)| m.max((x - y).abs())),
        }
    }
}

/// Closed Euclidean ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    center: Point,
    radius: f64,
}

impl Ball {
    pub fn new(center: Point, radius: f64) -> Result<Self> {
        if !(radius >= 0.0) || !radius.is_finite() {
            return Err(crate::error::invalid(
                "radius",
                format!("must be a finite nonnegative real, got {radius}"),
            ));
        }
        Ok(Ball { center, radius })
    }

    pub fn center(&self) -> &Point {
        &self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn dim(&self) -> usize {
        self.center.dim()
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        self.center.distance(p, Norm::TwoNorm) <= self.radius + tol
    }

    /// Radii within `tol` and centers within `tol` in the 2-norm.
    pub fn approx_eq(&self, other: &Ball, tol: f64) -> bool {
        self.dim() == other.dim()
            && (self.radius - other.radius).abs() <= tol
            && self.center.distance(&other.center, Norm::TwoNorm) <= tol
    }
}

/// Axis-aligned box `[lo_1, hi_1] x ... x [lo_d, hi_d]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Orthotope {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Orthotope {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(crate::error::invalid("orthotope", "dimension must be at least 1"));
        }
        if let Some(axis) = (0..lo.len()).find(|&a| !(lo[a] <= hi[a])) {
            return Err(crate::error::invalid(
                "orthotope",
                format!("axis {axis}: lo {} exceeds hi {}", lo[axis], hi[axis]),
            ));
        }
        Ok(Orthotope { lo, hi })
    }

    /// The box `[p - r, p + r]` on every axis.
    pub fn cube(center: &Point, half_side: f64) -> Result<Self> {
        Orthotope::new(
            center.coords().iter().map(|c| c - half_side).collect(),
            center.coords().iter().map(|c| c + half_side).collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn side(&self, axis: usize) -> f64 {
        self.hi[axis] - self.lo[axis]
    }

    pub fn sides(&self) -> Vec<f64> {
        (0..self.dim()).map(|a| self.side(a)).collect()
    }

    pub fn max_side(&self) -> f64 {
        (0..self.dim()).map(|a| self.side(a)).fold(0.0, f64::max)
    }

    pub fn center(&self) -> Point {
        Point(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(l, h)| 0.5 * (l + h))
                .collect(),
        )
    }

    pub fn contains(&self, p: &Point, tol: f64) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .enumerate()
                .all(|(a, &x)| x >= self.lo[a] - tol && x <= self.hi[a] + tol)
    }

    pub fn approx_eq(&self, other: &Orthotope, tol: f64) -> bool {
        self.dim() == other.dim()
            && self
                .lo
                .iter()
                .zip(&other.lo)
                .chain(self.hi.iter().zip(&other.hi))
                .all(|(a, b)| (a - b).abs() <= tol)
    }
}

fn check_uniform(points: &[Point]) -> Result<usize> {
    let first = points.first().ok_or(Error::EmptyInput)?;
    let d = first.dim();
    if d == 0 {
        return Err(crate::error::invalid("point", "dimension must be at least 1"));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != d) {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: p.dim(),
        });
    }
    Ok(d)
}

/// Minimal enclosing ball of a nonempty pointset.
pub fn minimal_enclosing_ball(points: &[Point]) -> Result<Ball> {
    let d = check_uniform(points)?;
    Ok(Welzl::new(points, d).solve().ball)
}

/// A smallest subset (at most `d + 1` points) whose enclosing ball equals
/// the enclosing ball of `points`, preferring lower input indices on ties.
pub fn meb_boundary(points: &[Point]) -> Result<Vec<Point>> {
    meb_boundary_with_tol(points, DEFAULT_TOL)
}

pub fn meb_boundary_with_tol(points: &[Point], tol: f64) -> Result<Vec<Point>> {
    let d = check_uniform(points)?;
    let solved = Welzl::new(points, d).solve();
    let ball = &solved.ball;
    if ball.radius <= tol {
        return Ok(vec![points[0].clone()]);
    }

    // Boundary candidates, first occurrence of each distinct point.
    let mut candidates: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let on_boundary = ball.center.distance(p, Norm::TwoNorm) >= ball.radius - tol;
        if on_boundary && !candidates.iter().any(|&j| points[j] == *p) {
            candidates.push(i);
        }
    }

    let max_size = (d + 1).min(candidates.len());
    let budget: usize = (1..=max_size)
        .map(|k| binomial(candidates.len(), k))
        .sum();
    if budget <= MAX_SUPPORT_SUBSETS {
        for k in 1..=max_size {
            let mut found = None;
            for_each_combination(candidates.len(), k, |combo| {
                let subset: Vec<Point> = combo.iter().map(|&c| points[candidates[c]].clone()).collect();
                let sub_ball = Welzl::new(&subset, d).solve().ball;
                if sub_ball.approx_eq(ball, tol) {
                    found = Some(subset);
                    true
                } else {
                    false
                }
            });
            if let Some(subset) = found {
                return Ok(subset);
            }
        }
    }

    // Prune the recursion's support set, dropping the highest indices first.
    let mut support = solved.support;
    support.sort_unstable();
    let mut i = support.len();
    while i > 0 {
        i -= 1;
        let mut trial = support.clone();
        trial.remove(i);
        if trial.is_empty() {
            continue;
        }
        let subset: Vec<Point> = trial.iter().map(|&j| points[j].clone()).collect();
        if Welzl::new(&subset, d).solve().ball.approx_eq(ball, tol) {
            support = trial;
        }
    }
    Ok(support.into_iter().map(|j| points[j].clone()).collect())
}

/// Coordinate-wise bounding box of a nonempty pointset.
pub fn minimal_enclosing_orthotope(points: &[Point]) -> Result<Orthotope> {
    let d = check_uniform(points)?;
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for p in points {
        for (a, &x) in p.coords().iter().enumerate() {
            lo[a] = lo[a].min(x);
            hi[a] = hi[a].max(x);
        }
    }
    Orthotope::new(lo, hi)
}

pub fn ball_center(ball: &Ball) -> Point {
    ball.center.clone()
}

pub fn orthotope_center(box_: &Orthotope) -> Point {
    box_.center()
}

/// Largest pairwise distance under `norm`.
pub fn pointset_diameter(points: &[Point], norm: Norm) -> Result<f64> {
    check_uniform(points)?;
    let mut diam = 0.0f64;
    for (i, p) in points.iter().enumerate() {
        for q in &points[i + 1..] {
            diam = diam.max(p.distance(q, norm));
        }
    }
    Ok(diam)
}

struct Solved {
    ball: Ball,
    support: Vec<usize>,
}

/// Move-to-front smallest enclosing ball recursion over point indices.
struct Welzl<'a> {
    points: &'a [Point],
    dim: usize,
    order: Vec<usize>,
}

impl<'a> Welzl<'a> {
    fn new(points: &'a [Point], dim: usize) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(SHUFFLE_SEED);
        for i in (1..order.len()).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            order.swap(i, j);
        }
        Welzl { points, dim, order }
    }

    fn solve(mut self) -> Solved {
        let mut support = Vec::with_capacity(self.dim + 1);
        let len = self.order.len();
        let (center, radius, support) = self.mtf(len, &mut support);
        Solved {
            ball: Ball {
                center: Point(center),
                radius,
            },
            support,
        }
    }

    fn mtf(&mut self, end: usize, support: &mut Vec<usize>) -> (Vec<f64>, f64, Vec<usize>) {
        let (mut center, mut radius) = self.sphere(support);
        let mut best_support = support.clone();
        if support.len() == self.dim + 1 {
            return (center, radius, best_support);
        }
        for i in 0..end {
            let idx = self.order[i];
            if !self.inside(&center, radius, idx) {
                support.push(idx);
                let (c, r, s) = self.mtf(i, support);
                support.pop();
                // A degenerate support may fail to produce a sphere; keep the
                // previous ball in that case.
                if r >= 0.0 {
                    center = c;
                    radius = r;
                    best_support = s;
                }
                self.order[..=i].rotate_right(1);
            }
        }
        (center, radius, best_support)
    }

    fn inside(&self, center: &[f64], radius: f64, idx: usize) -> bool {
        if radius < 0.0 {
            return false;
        }
        let dist = Norm::TwoNorm.of_diff(center, self.points[idx].coords());
        dist <= radius + 1e-12 * radius.max(1.0)
    }

    /// Smallest sphere through the support points, centered in their affine
    /// hull. Radius -1 marks "no sphere" (empty or degenerate support).
    fn sphere(&self, support: &[usize]) -> (Vec<f64>, f64) {
        let Some(&first) = support.first() else {
            return (vec![0.0; self.dim], -1.0);
        };
        let p0 = self.points[first].coords();
        if support.len() == 1 {
            return (p0.to_vec(), 0.0);
        }
        let vs: Vec<Vec<f64>> = support[1..]
            .iter()
            .map(|&j| self.points[j].sub(&self.points[first]))
            .collect();
        let k = vs.len();
        let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();
        let mut m = vec![vec![0.0; k + 1]; k];
        for r in 0..k {
            for c in 0..k {
                m[r][c] = 2.0 * dot(&vs[r], &vs[c]);
            }
            m[r][k] = dot(&vs[r], &vs[r]);
        }
        let Some(lambda) = solve_linear(m) else {
            return (vec![0.0; self.dim], -1.0);
        };
        let mut center = p0.to_vec();
        for (l, v) in lambda.iter().zip(&vs) {
            for (c, x) in center.iter_mut().zip(v) {
                *c += l * x;
            }
        }
        let radius = support
            .iter()
            .map(|&j| Norm::TwoNorm.of_diff(&center, self.points[j].coords()))
            .fold(0.0, f64::max);
        (center, radius)
    }
}

/// Gaussian elimination with partial pivoting on an augmented `k x (k+1)`
/// matrix. `None` when the system is numerically singular.
fn solve_linear(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = m.len();
    let scale = m
        .iter()
        .flat_map(|row| row[..k].iter())
        .fold(0.0f64, |s, x| s.max(x.abs()));
    if scale == 0.0 {
        return None;
    }
    for col in 0..k {
        let pivot = (col..k).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[pivot][col].abs() <= 1e-12 * scale {
            return None;
        }
        m.swap(col, pivot);
        let (top, rest) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for row in rest.iter_mut().take(k - col - 1) {
            let f = row[col] / pivot_row[col];
            for (x, p) in row[col..=k].iter_mut().zip(&pivot_row[col..=k]) {
                *x -= f * p;
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| m[row][c] * x[c]).sum();
        x[row] = (m[row][k] - s) / m[row][row];
    }
    Some(x)
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Visits k-combinations of `0..n` in lexicographic order until `visit`
/// returns true.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k == 0 || k > n {
        return;
    }
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        if visit(&combo) {
            return;
        }
        let Some(pos) = (0..k).rev().find(|&i| combo[i] != i + n - k) else {
            return;
        };
        combo[pos] += 1;
        for i in pos + 1..k {
            combo[i] = combo[i - 1] + 1;
        }
    }
}

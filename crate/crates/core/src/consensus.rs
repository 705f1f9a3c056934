//! Flooding consensus on the minimal enclosing ball (FloodMEB) and the
//! minimal enclosing orthotope (FloodMEO) of the agents' initial positions.
//!
//! Both algorithms use the standard message map `msg(x, w, i) = w`: each
//! agent forwards its logic state to every neighbor.

use std::fmt::Debug;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{
    meb_boundary, minimal_enclosing_ball, minimal_enclosing_orthotope, Ball, Orthotope, Point,
    DEFAULT_TOL,
};
use crate::proxgraph::{is_connected, Distance, Graph};

/// A shape estimate that agents agree on.
pub trait Shape: Clone + Debug {
    fn approx_eq(&self, other: &Self, tol: f64) -> bool;
    fn center(&self) -> Point;
}

impl Shape for Ball {
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        Ball::approx_eq(self, other, tol)
    }

    fn center(&self) -> Point {
        Ball::center(self).clone()
    }
}

impl Shape for Orthotope {
    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        Orthotope::approx_eq(self, other, tol)
    }

    fn center(&self) -> Point {
        Orthotope::center(self)
    }
}

/// FloodMEB logic state: a support set of the local ball plus the agent's
/// own initial position, which is never forgotten.
#[derive(Clone, Debug, PartialEq)]
pub struct MebLogicState {
    boundary: Vec<Point>,
    initial_position: Point,
    ball: Ball,
}

impl MebLogicState {
    pub fn boundary(&self) -> &[Point] {
        &self.boundary
    }

    pub fn initial_position(&self) -> &Point {
        &self.initial_position
    }

    /// Enclosing ball of the boundary set.
    pub fn ball(&self) -> &Ball {
        &self.ball
    }

    /// Points held in memory (boundary set plus initial position).
    pub fn stored_points(&self) -> usize {
        self.boundary.len() + 1
    }

    pub fn dim(&self) -> usize {
        self.initial_position.dim()
    }
}

pub fn floodmeb_init(p0: Point) -> MebLogicState {
    MebLogicState {
        boundary: vec![p0.clone()],
        ball: Ball::new(p0.clone(), 0.0).expect("zero radius is valid"),
        initial_position: p0,
    }
}

/// One FloodMEB transition: the new boundary set is a support set of the
/// union of the agent's own set and initial position with every received
/// boundary set and initial position. Null messages are skipped.
pub fn floodmeb_stf<'a, I>(own: &MebLogicState, received: I) -> Result<MebLogicState>
where
    I: IntoIterator<Item = Option<&'a MebLogicState>>,
{
    let d = own.dim();
    let mut pool: Vec<Point> = own.boundary.clone();
    pool.push(own.initial_position.clone());
    for w in received.into_iter().flatten() {
        if w.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: w.dim(),
            });
        }
        pool.extend(w.boundary.iter().cloned());
        pool.push(w.initial_position.clone());
    }
    let boundary = meb_boundary(&pool)?;
    let ball = minimal_enclosing_ball(&boundary)?;
    Ok(MebLogicState {
        boundary,
        initial_position: own.initial_position.clone(),
        ball,
    })
}

/// FloodMEO logic state: per-axis running minimum and maximum.
#[derive(Clone, Debug, PartialEq)]
pub struct MeoLogicState {
    bounds: Orthotope,
}

impl MeoLogicState {
    pub fn orthotope(&self) -> &Orthotope {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.dim()
    }
}

pub fn floodmeo_init(p0: &Point) -> MeoLogicState {
    MeoLogicState {
        bounds: Orthotope::new(p0.coords().to_vec(), p0.coords().to_vec())
            .expect("degenerate box of a point is valid"),
    }
}

/// One FloodMEO transition: coordinate-wise min of minima and max of maxima
/// over the agent and its non-null messages.
pub fn floodmeo_stf<'a, I>(own: &MeoLogicState, received: I) -> Result<MeoLogicState>
where
    I: IntoIterator<Item = Option<&'a MeoLogicState>>,
{
    let d = own.dim();
    let mut lo = own.bounds.lo().to_vec();
    let mut hi = own.bounds.hi().to_vec();
    for w in received.into_iter().flatten() {
        if w.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: w.dim(),
            });
        }
        for a in 0..d {
            lo[a] = lo[a].min(w.bounds.lo()[a]);
            hi[a] = hi[a].max(w.bounds.hi()[a]);
        }
    }
    Ok(MeoLogicState {
        bounds: Orthotope::new(lo, hi)?,
    })
}

/// Exact number of rounds FloodMEO needs on a static connected graph: the
/// largest hop count from any agent to the nearest agent attaining an
/// extreme coordinate, over all axes and both extremes.
pub fn floodmeo_min_rounds(graph: &Graph, positions: &[Point]) -> Result<usize> {
    if graph.n() != positions.len() {
        return Err(invalid(
            "positions",
            format!("graph has {} agents, got {} positions", graph.n(), positions.len()),
        ));
    }
    if !is_connected(graph) {
        return Err(Error::Disconnected);
    }
    let shape = minimal_enclosing_orthotope(positions)?;
    let mut rounds = 0;
    for a in 0..shape.dim() {
        for extreme in [shape.lo()[a], shape.hi()[a]] {
            let sources = positions
                .iter()
                .enumerate()
                .filter(|(_, p)| p[a] == extreme)
                .map(|(i, _)| i);
            for d in graph.multi_source_bfs(sources) {
                match d {
                    Distance::Finite(d) => rounds = rounds.max(d),
                    Distance::Unreachable => return Err(Error::Disconnected),
                }
            }
        }
    }
    Ok(rounds)
}

/// True iff the last `rounds_required` rounds left the shape unchanged, i.e.
/// the final `rounds_required + 1` entries of `history` agree within `tol`.
pub fn termination_detector<S: Shape>(history: &[S], rounds_required: usize, tol: f64) -> bool {
    assert!(rounds_required >= 1, "rounds_required must be at least 1");
    if history.len() <= rounds_required {
        return false;
    }
    history[history.len() - rounds_required - 1..]
        .windows(2)
        .all(|w| w[0].approx_eq(&w[1], tol))
}

/// Streaming form of [`termination_detector`] kept inside a logic state.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilityCounter {
    pub rounds_required: usize,
    pub stable_rounds: usize,
}

impl StabilityCounter {
    pub fn new(rounds_required: usize) -> Self {
        StabilityCounter {
            rounds_required: rounds_required.max(1),
            stable_rounds: 0,
        }
    }

    pub fn observe(&mut self, changed: bool) {
        self.stable_rounds = if changed { 0 } else { self.stable_rounds + 1 };
    }

    pub fn fired(&self) -> bool {
        self.stable_rounds >= self.rounds_required
    }
}

/// Common interface of the two flooding algorithms, used by the
/// move-toward-center laws and the harnesses.
pub trait FloodAlgorithm {
    type State: Clone + Debug + PartialEq + Send + Sync;
    type Shape: Shape + Send + Sync;

    fn init(p0: &Point) -> Self::State;

    fn transition<'a, I>(own: &Self::State, received: I) -> Result<Self::State>
    where
        I: IntoIterator<Item = Option<&'a Self::State>>,
        Self::State: 'a;

    fn shape(state: &Self::State) -> Self::Shape;

    /// The shape every agent should converge to.
    fn global_shape(points: &[Point]) -> Result<Self::Shape>;
}

pub struct FloodMeb;

pub struct FloodMeo;

impl FloodAlgorithm for FloodMeb {
    type State = MebLogicState;
    type Shape = Ball;

    fn init(p0: &Point) -> MebLogicState {
        floodmeb_init(p0.clone())
    }

    fn transition<'a, I>(own: &MebLogicState, received: I) -> Result<MebLogicState>
    where
        I: IntoIterator<Item = Option<&'a MebLogicState>>,
    {
        floodmeb_stf(own, received)
    }

    fn shape(state: &MebLogicState) -> Ball {
        state.ball.clone()
    }

    fn global_shape(points: &[Point]) -> Result<Ball> {
        minimal_enclosing_ball(points)
    }
}

impl FloodAlgorithm for FloodMeo {
    type State = MeoLogicState;
    type Shape = Orthotope;

    fn init(p0: &Point) -> MeoLogicState {
        floodmeo_init(p0)
    }

    fn transition<'a, I>(own: &MeoLogicState, received: I) -> Result<MeoLogicState>
    where
        I: IntoIterator<Item = Option<&'a MeoLogicState>>,
    {
        floodmeo_stf(own, received)
    }

    fn shape(state: &MeoLogicState) -> Orthotope {
        state.bounds.clone()
    }

    fn global_shape(points: &[Point]) -> Result<Orthotope> {
        minimal_enclosing_orthotope(points)
    }
}

/// Per-round logic states of a flooding algorithm on a fixed graph with
/// agents at rest. `history[t][i]` is agent `i`'s state after `t` rounds.
pub fn run_static_flood<F: FloodAlgorithm>(
    graph: &Graph,
    positions: &[Point],
    rounds: usize,
) -> Result<Vec<Vec<F::State>>> {
    if graph.n() != positions.len() {
        return Err(invalid(
            "positions",
            format!("graph has {} agents, got {} positions", graph.n(), positions.len()),
        ));
    }
    let mut history = vec![positions.iter().map(F::init).collect::<Vec<_>>()];
    for _ in 0..rounds {
        let current = history.last().expect("history is never empty");
        let next = (0..graph.n())
            .map(|i| {
                F::transition(
                    &current[i],
                    graph.neighbors(i).iter().map(|&j| Some(&current[j])),
                )
            })
            .collect::<Result<Vec<_>>>()?;
        history.push(next);
    }
    Ok(history)
}

/// First round at which every agent's shape equals the global shape, if
/// reached within the history.
pub fn consensus_round<F: FloodAlgorithm>(
    history: &[Vec<F::State>],
    positions: &[Point],
    tol: f64,
) -> Result<Option<usize>> {
    let global = F::global_shape(positions)?;
    Ok(history
        .iter()
        .position(|states| states.iter().all(|s| F::shape(s).approx_eq(&global, tol))))
}

/// Default tolerance for shape comparisons inside the consensus layer.
pub const SHAPE_TOL: f64 = DEFAULT_TOL;

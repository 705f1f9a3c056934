//! The synchronous robotic-network machine.
//!
//! Each round every agent broadcasts `msg` to its current neighbors, applies
//! `stf` to its logic state and the received message vector, then moves by
//! `ctl` evaluated on the *updated* logic state. Agents follow the discrete
//! integrator `p(t+1) = p(t) + u(t)` with `u` saturated to the input set.
//! All agents read round-`t` values only.

use std::marker::PhantomData;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::geometry::{pointset_diameter, Norm, Point};
use crate::proxgraph::{complete_graph, cube_graph, disk_graph, Graph};

/// How the communication graph is derived from positions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeMap {
    Disk,
    Cube,
    Complete,
}

/// Admissible control set: `||u||_2 <= r_ctr` or `||u||_inf <= r_ctr`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InputSet {
    BallBound,
    CubeBound,
}

impl InputSet {
    pub fn norm(self) -> Norm {
        match self {
            InputSet::BallBound => Norm::TwoNorm,
            InputSet::CubeBound => Norm::InfNorm,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub n: usize,
    pub d: usize,
    pub r_cmm: f64,
    pub r_ctr: f64,
    pub edge_map: EdgeMap,
    pub input_set: InputSet,
    pub rendezvous_tol: f64,
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n", "at least one agent is required"));
        }
        if self.d == 0 {
            return Err(invalid("d", "dimension must be at least 1"));
        }
        if !(self.r_cmm > 0.0) || !self.r_cmm.is_finite() {
            return Err(invalid("r_cmm", format!("must be positive, got {}", self.r_cmm)));
        }
        if !(self.r_ctr > 0.0) || !self.r_ctr.is_finite() {
            return Err(invalid("r_ctr", format!("must be positive, got {}", self.r_ctr)));
        }
        if !(self.rendezvous_tol >= 0.0) {
            return Err(invalid(
                "rendezvous_tol",
                format!("must be nonnegative, got {}", self.rendezvous_tol),
            ));
        }
        Ok(())
    }

    pub fn graph(&self, positions: &[Point]) -> Graph {
        match self.edge_map {
            EdgeMap::Disk => disk_graph(positions, self.r_cmm).expect("validated r_cmm"),
            EdgeMap::Cube => cube_graph(positions, self.r_cmm).expect("validated r_cmm"),
            EdgeMap::Complete => complete_graph(positions.len()),
        }
    }

    /// Norm used by the rendezvous predicate and dispersion measurements.
    pub fn task_norm(&self) -> Norm {
        self.input_set.norm()
    }

    /// `10 * ceil(diam / r_ctr) + 10 n`.
    pub fn default_max_rounds(&self, positions: &[Point]) -> usize {
        let diam = pointset_diameter(positions, Norm::TwoNorm).unwrap_or(0.0);
        10 * (diam / self.r_ctr).ceil() as usize + 10 * self.n
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AgentState<L> {
    pub position: Point,
    pub logic: L,
}

/// Result of a control function. `blocked` records that the law wanted to
/// move but its constraint set admitted no motion.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlOutput {
    pub u: Vec<f64>,
    pub blocked: bool,
}

impl ControlOutput {
    pub fn free(u: Vec<f64>) -> Self {
        ControlOutput { u, blocked: false }
    }
}

/// A uniform control-and-communication law. Received message vectors have
/// one slot per agent; `None` is the null message.
pub trait Law {
    type Logic: Clone;
    type Message: Clone;

    fn msg(&self, position: &Point, logic: &Self::Logic, receiver: usize) -> Self::Message;

    fn stf(&self, logic: &Self::Logic, received: &[Option<Self::Message>]) -> Result<Self::Logic>;

    fn ctl(
        &self,
        position: &Point,
        logic: &Self::Logic,
        received: &[Option<Self::Message>],
    ) -> Result<ControlOutput>;
}

/// A law assembled from three closures over logic `W` and messages `M`.
pub struct LawBundle<W, M, Msg, Stf, Ctl> {
    msg: Msg,
    stf: Stf,
    ctl: Ctl,
    _types: PhantomData<fn(W) -> M>,
}

impl<W, M, Msg, Stf, Ctl> LawBundle<W, M, Msg, Stf, Ctl>
where
    Msg: Fn(&Point, &W, usize) -> M,
    Stf: Fn(&W, &[Option<M>]) -> W,
    Ctl: Fn(&Point, &W, &[Option<M>]) -> Vec<f64>,
{
    pub fn new(msg: Msg, stf: Stf, ctl: Ctl) -> Self {
        LawBundle {
            msg,
            stf,
            ctl,
            _types: PhantomData,
        }
    }
}

impl<W, M, Msg, Stf, Ctl> Law for LawBundle<W, M, Msg, Stf, Ctl>
where
    W: Clone,
    M: Clone,
    Msg: Fn(&Point, &W, usize) -> M,
    Stf: Fn(&W, &[Option<M>]) -> W,
    Ctl: Fn(&Point, &W, &[Option<M>]) -> Vec<f64>,
{
    type Logic = W;
    type Message = M;

    fn msg(&self, position: &Point, logic: &W, receiver: usize) -> M {
        (self.msg)(position, logic, receiver)
    }

    fn stf(&self, logic: &W, received: &[Option<M>]) -> Result<W> {
        Ok((self.stf)(logic, received))
    }

    fn ctl(&self, position: &Point, logic: &W, received: &[Option<M>]) -> Result<ControlOutput> {
        Ok(ControlOutput::free((self.ctl)(position, logic, received)))
    }
}

/// Projects `u` onto the input set of radius `r_ctr`: rescaling for the
/// ball bound, coordinate clamping for the cube bound.
pub fn saturate(u: &[f64], input_set: InputSet, r_ctr: f64) -> Vec<f64> {
    match input_set {
        InputSet::BallBound => {
            let norm = Norm::TwoNorm.of(u);
            if norm <= r_ctr {
                u.to_vec()
            } else {
                u.iter().map(|x| x * (r_ctr / norm)).collect()
            }
        }
        InputSet::CubeBound => u.iter().map(|x| x.clamp(-r_ctr, r_ctr)).collect(),
    }
}

/// True iff every pair of graph neighbors is within `tol` under `norm`.
/// Tolerance zero is the exact task.
pub fn rendezvous_task(positions: &[Point], graph: &Graph, tol: f64, norm: Norm) -> bool {
    graph
        .edges()
        .all(|(i, j)| positions[i].distance(&positions[j], norm) <= tol)
}

pub struct StepOutcome<L, M> {
    pub states: Vec<AgentState<L>>,
    /// Graph induced by the round-`t` positions, over which messages moved.
    pub graph: Graph,
    /// `messages[i][j]` is what agent `i` received from `j`.
    pub messages: Vec<Vec<Option<M>>>,
    pub controls: Vec<Vec<f64>>,
    pub blocked: Vec<bool>,
}

fn check_states<L>(states: &[AgentState<L>], config: &NetworkConfig) -> Result<()> {
    config.validate()?;
    if states.len() != config.n {
        return Err(invalid(
            "states",
            format!("expected {} agents, found {}", config.n, states.len()),
        ));
    }
    if let Some(s) = states.iter().find(|s| s.position.dim() != config.d) {
        return Err(Error::DimensionMismatch {
            expected: config.d,
            found: s.position.dim(),
        });
    }
    Ok(())
}

/// One synchronous communication-and-motion round.
pub fn step<W: Law>(
    states: &[AgentState<W::Logic>],
    config: &NetworkConfig,
    law: &W,
) -> Result<StepOutcome<W::Logic, W::Message>> {
    check_states(states, config)?;
    let positions: Vec<Point> = states.iter().map(|s| s.position.clone()).collect();
    let graph = config.graph(&positions);

    let messages: Vec<Vec<Option<W::Message>>> = (0..states.len())
        .map(|i| {
            (0..states.len())
                .map(|j| {
                    graph
                        .has_edge(i, j)
                        .then(|| law.msg(&states[j].position, &states[j].logic, i))
                })
                .collect()
        })
        .collect();

    let mut next = Vec::with_capacity(states.len());
    let mut controls = Vec::with_capacity(states.len());
    let mut blocked = Vec::with_capacity(states.len());
    for (state, received) in states.iter().zip(&messages) {
        let logic = law.stf(&state.logic, received)?;
        let out = law.ctl(&state.position, &logic, received)?;
        if out.u.len() != config.d {
            return Err(Error::DimensionMismatch {
                expected: config.d,
                found: out.u.len(),
            });
        }
        let u = saturate(&out.u, config.input_set, config.r_ctr);
        next.push(AgentState {
            position: state.position.translate(&u),
            logic,
        });
        controls.push(u);
        blocked.push(out.blocked);
    }

    Ok(StepOutcome {
        states: next,
        graph,
        messages,
        controls,
        blocked,
    })
}

/// Network state at the start of a round.
#[derive(Clone, Debug, PartialEq)]
pub struct Snapshot<L> {
    pub round: usize,
    pub positions: Vec<Point>,
    pub logic: Vec<L>,
    /// Communication graph induced by `positions`.
    pub graph: Graph,
    /// Controls applied during the previous round; `None` at round 0.
    pub controls: Option<Vec<Vec<f64>>>,
    pub blocked: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory<L> {
    pub snapshots: Vec<Snapshot<L>>,
    /// First round at which the stop predicate held.
    pub rendezvous_round: Option<usize>,
    /// First round at which every agent held the global shape; filled in by
    /// callers that know what the logic state estimates.
    pub consensus_round: Option<usize>,
}

impl<L> Trajectory<L> {
    pub fn rounds(&self) -> usize {
        self.snapshots.len() - 1
    }

    pub fn last(&self) -> &Snapshot<L> {
        self.snapshots.last().expect("trajectories hold at least one snapshot")
    }
}

/// Runs `step` until `stop` holds on a snapshot or `max_rounds` rounds have
/// been executed.
pub fn evolve<W: Law>(
    initial: Vec<AgentState<W::Logic>>,
    config: &NetworkConfig,
    law: &W,
    mut stop: impl FnMut(&Snapshot<W::Logic>) -> bool,
    max_rounds: usize,
) -> Result<Trajectory<W::Logic>> {
    if max_rounds == 0 {
        return Err(invalid("max_rounds", "must be at least 1"));
    }
    check_states(&initial, config)?;

    let snapshot = |round, states: &[AgentState<W::Logic>], controls, blocked| {
        let positions: Vec<Point> = states.iter().map(|s| s.position.clone()).collect();
        Snapshot {
            round,
            graph: config.graph(&positions),
            positions,
            logic: states.iter().map(|s| s.logic.clone()).collect(),
            controls,
            blocked,
        }
    };

    let n = initial.len();
    let mut snapshots = vec![snapshot(0, &initial, None, vec![false; n])];
    let mut rendezvous_round = stop(&snapshots[0]).then_some(0);
    let mut states = initial;
    let mut round = 0;
    while rendezvous_round.is_none() && round < max_rounds {
        let out = step(&states, config, law)?;
        round += 1;
        states = out.states;
        let snap = snapshot(round, &states, Some(out.controls), out.blocked);
        if stop(&snap) {
            rendezvous_round = Some(round);
        }
        snapshots.push(snap);
    }

    Ok(Trajectory {
        snapshots,
        rendezvous_round,
        consensus_round: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(n: usize, d: usize, r_ctr: f64) -> NetworkConfig {
        NetworkConfig {
            n,
            d,
            r_cmm: 10.0,
            r_ctr,
            edge_map: EdgeMap::Disk,
            input_set: InputSet::BallBound,
            rendezvous_tol: 1e-9,
        }
    }

    fn agents(points: &[&[f64]]) -> Vec<AgentState<u32>> {
        points
            .iter()
            .map(|c| AgentState {
                position: Point::new(c.to_vec()),
                logic: 0,
            })
            .collect()
    }

    fn zero_law(d: usize) -> impl Law<Logic = u32, Message = ()> {
        LawBundle::new(
            |_: &Point, _: &u32, _: usize| (),
            |w: &u32, _: &[Option<()>]| w + 1,
            move |_: &Point, _: &u32, _: &[Option<()>]| vec![0.0; d],
        )
    }

    #[test]
    fn saturation_examples() {
        assert_eq!(saturate(&[0.0, 0.0], InputSet::BallBound, 1.0), vec![0.0, 0.0]);
        let u = saturate(&[3.0, 4.0], InputSet::BallBound, 1.0);
        assert!((u[0] - 0.6).abs() < 1e-15 && (u[1] - 0.8).abs() < 1e-15);
        assert_eq!(saturate(&[3.0, -4.0], InputSet::CubeBound, 1.0), vec![1.0, -1.0]);
        assert_eq!(saturate(&[0.5, -0.2], InputSet::CubeBound, 1.0), vec![0.5, -0.2]);
    }

    #[test]
    fn zero_control_keeps_positions_and_runs_stf() {
        let states = agents(&[&[0.0, 0.0], &[1.0, 0.0]]);
        let out = step(&states, &config(2, 2, 1.0), &zero_law(2)).unwrap();
        assert_eq!(out.states[0].position, states[0].position);
        assert_eq!(out.states[1].logic, 1);
        assert!(out.graph.has_edge(0, 1));
        assert!(out.messages[0][1].is_some() && out.messages[0][0].is_none());
    }

    #[test]
    fn lone_agent_gets_only_null_messages() {
        let law = LawBundle::new(
            |_: &Point, _: &u32, _: usize| 7u8,
            |w: &u32, y: &[Option<u8>]| w + y.iter().flatten().count() as u32,
            |_: &Point, _: &u32, _: &[Option<u8>]| vec![0.25],
        );
        let out = step(&agents(&[&[1.0]]), &config(1, 1, 1.0), &law).unwrap();
        assert_eq!(out.messages, vec![vec![None]]);
        assert_eq!(out.states[0].logic, 0);
        assert_eq!(out.states[0].position, Point::from([1.25]));
    }

    #[test]
    fn two_agents_meet_at_the_midpoint() {
        let law = LawBundle::new(
            |p: &Point, _: &u32, _: usize| p.clone(),
            |w: &u32, _: &[Option<Point>]| *w,
            |p: &Point, _: &u32, y: &[Option<Point>]| {
                let q = y.iter().flatten().next().unwrap();
                p.midpoint(q).sub(p)
            },
        );
        let states = agents(&[&[0.0, 0.0], &[2.0, 4.0]]);
        let out = step(&states, &config(2, 2, 100.0), &law).unwrap();
        assert_eq!(out.states[0].position, Point::from([1.0, 2.0]));
        assert_eq!(out.states[1].position, Point::from([1.0, 2.0]));
    }

    #[test]
    fn wrong_control_dimension_is_an_error() {
        let bad = LawBundle::new(
            |_: &Point, _: &u32, _: usize| (),
            |w: &u32, _: &[Option<()>]| *w,
            |_: &Point, _: &u32, _: &[Option<()>]| vec![0.0; 3],
        );
        assert!(matches!(
            step(&agents(&[&[0.0, 0.0]]), &config(1, 2, 1.0), &bad),
            Err(Error::DimensionMismatch { expected: 2, found: 3 })
        ));
        assert!(step(&agents(&[&[0.0]]), &config(2, 1, 1.0), &zero_law(1)).is_err());
    }

    #[test]
    fn evolve_stops_immediately_when_predicate_holds() {
        let t = evolve(agents(&[&[0.0]]), &config(1, 1, 1.0), &zero_law(1), |_| true, 5).unwrap();
        assert_eq!(t.rendezvous_round, Some(0));
        assert_eq!(t.snapshots.len(), 1);
    }

    #[test]
    fn evolve_runs_to_max_rounds() {
        let t = evolve(agents(&[&[0.0]]), &config(1, 1, 1.0), &zero_law(1), |_| false, 7).unwrap();
        assert_eq!(t.rendezvous_round, None);
        assert_eq!(t.snapshots.len(), 8);
        assert_eq!(t.last().logic[0], 7);
        assert!(evolve(agents(&[&[0.0]]), &config(1, 1, 1.0), &zero_law(1), |_| false, 0).is_err());
    }

    #[test]
    fn stepping_toward_a_fixed_point_takes_ceil_distance_over_speed() {
        // Agents at 0, 1.7 and -0.45 pursue x = 0.3 with speed 0.25:
        // farthest distance 1.4 -> ceil(1.4 / 0.25) = 6 rounds.
        let law = LawBundle::new(
            |_: &Point, _: &u32, _: usize| (),
            |w: &u32, _: &[Option<()>]| *w,
            |p: &Point, _: &u32, _: &[Option<()>]| vec![0.3 - p[0]],
        );
        let cfg = config(3, 1, 0.25);
        let stop = |s: &Snapshot<u32>| s.positions.iter().all(|p| (p[0] - 0.3).abs() <= 1e-12);
        let t = evolve(agents(&[&[0.0], &[1.7], &[-0.45]]), &cfg, &law, stop, 100).unwrap();
        assert_eq!(t.rendezvous_round, Some(6));
    }

    #[test]
    fn rendezvous_predicate_quantifies_over_edges() {
        let same = vec![Point::from([1.0, 1.0]); 3];
        assert!(rendezvous_task(&same, &complete_graph(3), 0.0, Norm::TwoNorm));
        let apart = vec![Point::from([0.0]), Point::from([1.0])];
        assert!(!rendezvous_task(&apart, &complete_graph(2), 0.0, Norm::TwoNorm));
        assert!(rendezvous_task(&apart, &Graph::empty(2), 0.0, Norm::TwoNorm));
    }

    #[test]
    fn config_validation() {
        let mut c = config(2, 2, 1.0);
        assert!(c.validate().is_ok());
        c.r_cmm = 0.0;
        assert!(c.validate().is_err());
        let mut c = config(0, 2, 1.0);
        assert!(c.validate().is_err());
        c.n = 1;
        c.r_ctr = -1.0;
        assert!(c.validate().is_err());
    }
}

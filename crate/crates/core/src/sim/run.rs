//! Single runs, summaries and parameter sweeps.

use serde::{Deserialize, Serialize};

use crate::consensus::{floodmeo_min_rounds, FloodMeb, FloodMeo, MebLogicState, MeoLogicState, Shape};
use crate::control::{
    centralized_mtr_ball, centralized_mtr_cube, ceil_rounds, CentralizedSolution, LawState, LawVariant,
    MoveTowardCenter, Pursuit,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::{pointset_diameter, Norm, Point};
use crate::netcore::{evolve, rendezvous_task, AgentState, InputSet, NetworkConfig, Trajectory};
use crate::par::{map_ordered, Execution};
use crate::proxgraph::is_connected;
use crate::sim::scenario::{InitialPositions, Scenario};

/// Tolerance for "agent holds the global shape" in summaries.
pub const CONSENSUS_TOL: f64 = 1e-7;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    /// Run even when the initial graph is disconnected.
    pub allow_disconnected: bool,
    /// Overrides the scenario's `max_rounds`.
    pub max_rounds: Option<usize>,
    /// Overrides `network.rendezvous_tol`.
    pub rendezvous_tol: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunTrajectory {
    Meb(Trajectory<LawState<MebLogicState>>),
    Meo(Trajectory<LawState<MeoLogicState>>),
}

impl RunTrajectory {
    pub fn rounds(&self) -> usize {
        match self {
            RunTrajectory::Meb(t) => t.rounds(),
            RunTrajectory::Meo(t) => t.rounds(),
        }
    }

    pub fn positions(&self, round: usize) -> &[Point] {
        match self {
            RunTrajectory::Meb(t) => &t.snapshots[round].positions,
            RunTrajectory::Meo(t) => &t.snapshots[round].positions,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub law: LawVariant,
    pub n: usize,
    pub d: usize,
    pub r_cmm: f64,
    pub r_ctr: f64,
    pub rendezvous_tol: f64,
    /// First round at which every agent held the global shape.
    pub consensus_round: Option<usize>,
    /// First round at which every agent's termination detector had fired.
    pub detector_round: Option<usize>,
    /// First round at which the rendezvous task held.
    pub rendezvous_round: Option<usize>,
    pub rounds_executed: usize,
    pub achieved: bool,
    /// Centralized optimum for the configured input set.
    pub t_star: usize,
    pub centralized: CentralizedSolution,
    /// Exact FloodMEO round count on the initial graph, when connected.
    pub t_floodmeo: Option<usize>,
    /// `ceil(diam_2(p(0)) / r_ctr) + t_floodmeo`.
    pub meo_time_bound: Option<usize>,
    /// Euclidean diameter of the initial positions.
    pub initial_diameter: f64,
    /// Largest pairwise distance (task norm) at the last recorded round.
    pub final_dispersion: f64,
    /// Largest distance (task norm) from a final position to the
    /// centralized target.
    pub final_target_error: f64,
    /// Connectivity of the communication graph at rounds `0..=rounds_executed`.
    pub connected: Vec<bool>,
    /// Number of (agent, round) pairs whose motion was fully blocked.
    pub blocked_events: usize,
    /// Largest number of points any FloodMEB logic state stored.
    pub max_stored_points: Option<usize>,
}

pub struct RunOutput {
    pub trajectory: RunTrajectory,
    pub summary: RunSummary,
}

/// The centralized solution matching the configured input set.
pub fn centralized_solution(config: &NetworkConfig, positions: &[Point]) -> Result<CentralizedSolution> {
    match config.input_set {
        InputSet::BallBound => centralized_mtr_ball(positions, config.r_ctr),
        InputSet::CubeBound => centralized_mtr_cube(positions, config.r_ctr),
    }
}

fn dispersion(positions: &[Point], norm: Norm) -> f64 {
    pointset_diameter(positions, norm).unwrap_or(0.0)
}

fn simulate<F: Pursuit>(
    law: &MoveTowardCenter<F>,
    config: &NetworkConfig,
    positions: &[Point],
    max_rounds: usize,
) -> Result<Trajectory<LawState<F::State>>> {
    let initial = positions
        .iter()
        .map(|p| AgentState {
            position: p.clone(),
            logic: law.init(p),
        })
        .collect();
    let norm = config.task_norm();
    let tol = config.rendezvous_tol;
    let mut traj = evolve(
        initial,
        config,
        law,
        |snap| rendezvous_task(&snap.positions, &snap.graph, tol, norm),
        max_rounds,
    )?;
    let global = F::global_shape(positions)?;
    traj.consensus_round = traj.snapshots.iter().position(|s| {
        s.logic
            .iter()
            .all(|w| F::shape(&w.flood).approx_eq(&global, CONSENSUS_TOL))
    });
    Ok(traj)
}

fn detector_round<S>(traj: &Trajectory<LawState<S>>) -> Option<usize> {
    traj.snapshots
        .iter()
        .position(|s| s.logic.iter().all(|w| w.consensus))
}

/// Runs a scenario to rendezvous or `max_rounds`.
pub fn run(scenario: &Scenario, options: &RunOptions) -> Result<RunOutput> {
    scenario.validate()?;
    let mut config = scenario.network.clone();
    if let Some(tol) = options.rendezvous_tol {
        config.rendezvous_tol = tol;
        config.validate()?;
    }
    let positions = scenario.positions();
    let graph0 = config.graph(&positions);
    let connected0 = is_connected(&graph0);
    if !connected0 && !options.allow_disconnected {
        return Err(Error::Disconnected);
    }
    let max_rounds = options
        .max_rounds
        .or(scenario.max_rounds)
        .unwrap_or_else(|| config.default_max_rounds(&positions));
    if max_rounds == 0 {
        return Err(invalid("max_rounds", "must be at least 1"));
    }
    let rounds_required = scenario
        .detector_rounds
        .unwrap_or(config.n.saturating_sub(1).max(1));

    let (trajectory, max_stored, detector) = match scenario.law {
        LawVariant::Meb => {
            let law = MoveTowardCenter::<FloodMeb>::with_rounds_required(&config, rounds_required);
            let traj = simulate(&law, &config, &positions, max_rounds)?;
            let stored = traj
                .snapshots
                .iter()
                .flat_map(|s| s.logic.iter().map(|w| w.flood.stored_points()))
                .max();
            let det = detector_round(&traj);
            (RunTrajectory::Meb(traj), stored, det)
        }
        LawVariant::Meo => {
            let law = MoveTowardCenter::<FloodMeo>::with_rounds_required(&config, rounds_required);
            let traj = simulate(&law, &config, &positions, max_rounds)?;
            let det = detector_round(&traj);
            (RunTrajectory::Meo(traj), None, det)
        }
    };

    let (consensus_round, rendezvous_round, connected, blocked_events) = match &trajectory {
        RunTrajectory::Meb(t) => trajectory_stats(t),
        RunTrajectory::Meo(t) => trajectory_stats(t),
    };

    let centralized = centralized_solution(&config, &positions)?;
    let norm = config.task_norm();
    let initial_diameter = dispersion(&positions, Norm::TwoNorm);
    let t_floodmeo = if connected0 {
        Some(floodmeo_min_rounds(&graph0, &positions)?)
    } else {
        None
    };
    let final_positions = trajectory.positions(trajectory.rounds());
    let final_target_error = final_positions
        .iter()
        .map(|p| p.distance(&centralized.target, norm))
        .fold(0.0, f64::max);

    let summary = RunSummary {
        law: scenario.law,
        n: config.n,
        d: config.d,
        r_cmm: config.r_cmm,
        r_ctr: config.r_ctr,
        rendezvous_tol: config.rendezvous_tol,
        consensus_round,
        detector_round: detector,
        rendezvous_round,
        rounds_executed: trajectory.rounds(),
        achieved: rendezvous_round.is_some(),
        t_star: centralized.t_star,
        t_floodmeo,
        meo_time_bound: t_floodmeo.map(|t| ceil_rounds(initial_diameter / config.r_ctr) + t),
        initial_diameter,
        final_dispersion: dispersion(final_positions, norm),
        final_target_error,
        connected,
        blocked_events,
        max_stored_points: max_stored,
        centralized,
    };
    Ok(RunOutput { trajectory, summary })
}

fn trajectory_stats<L>(t: &Trajectory<L>) -> (Option<usize>, Option<usize>, Vec<bool>, usize) {
    let connected = t.snapshots.iter().map(|s| is_connected(&s.graph)).collect();
    let blocked = t
        .snapshots
        .iter()
        .map(|s| s.blocked.iter().filter(|b| **b).count())
        .sum();
    (t.consensus_round, t.rendezvous_round, connected, blocked)
}

/// Axes of a sweep. `None` keeps the template's value; an empty list is an
/// error. Changing `law` also switches to that law's default edge map and
/// input set.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ParameterGrid {
    pub laws: Option<Vec<LawVariant>>,
    pub n: Option<Vec<usize>>,
    pub r_ctr: Option<Vec<f64>>,
    pub r_cmm: Option<Vec<f64>>,
    pub seeds: Option<Vec<u64>>,
}

/// One grid point, in the order the runs are reported.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub law: LawVariant,
    pub n: usize,
    pub r_ctr: f64,
    pub r_cmm: f64,
    pub seed: Option<u64>,
}

pub struct SweepResult {
    pub point: SweepPoint,
    pub summary: Result<RunSummary>,
}

fn axis<T: Clone>(name: &'static str, values: &Option<Vec<T>>, default: T) -> Result<Vec<T>> {
    match values {
        Some(v) if v.is_empty() => Err(invalid(name, "sweep axis must not be empty")),
        Some(v) => Ok(v.clone()),
        None => Ok(vec![default]),
    }
}

impl ParameterGrid {
    /// Cartesian product, laws outermost and seeds innermost.
    pub fn points(&self, template: &Scenario) -> Result<Vec<SweepPoint>> {
        let seed = match &template.initial {
            InitialPositions::Uniform { seed, .. } => Some(*seed),
            _ => None,
        };
        let laws = axis("laws", &self.laws, template.law)?;
        let ns = axis("n", &self.n, template.network.n)?;
        let r_ctrs = axis("r_ctr", &self.r_ctr, template.network.r_ctr)?;
        let r_cmms = axis("r_cmm", &self.r_cmm, template.network.r_cmm)?;
        let seeds = match (&self.seeds, seed) {
            (Some(_), None) => {
                return Err(invalid("seeds", "template positions are not generated"));
            }
            (s, _) => axis("seeds", &s.as_ref().map(|v| v.iter().map(|&x| Some(x)).collect()), seed)?,
        };
        let mut out = Vec::new();
        for &law in &laws {
            for &n in &ns {
                for &r_ctr in &r_ctrs {
                    for &r_cmm in &r_cmms {
                        for &seed in &seeds {
                            out.push(SweepPoint {
                                law,
                                n,
                                r_ctr,
                                r_cmm,
                                seed,
                            });
                        }
                    }
                }
            }
        }
        Ok(out)
    }
}

impl SweepPoint {
    pub fn apply(&self, template: &Scenario) -> Result<Scenario> {
        let mut s = template.clone();
        if self.law != template.law {
            let (edge_map, input_set) = self.law.default_pairing();
            s.network.edge_map = edge_map;
            s.network.input_set = input_set;
        }
        s.law = self.law;
        s.network.n = self.n;
        s.network.r_ctr = self.r_ctr;
        s.network.r_cmm = self.r_cmm;
        if let Some(seed) = self.seed {
            s = s.with_seed(seed);
        }
        s.validate()?;
        Ok(s)
    }
}

/// One summary per grid point, in grid order.
pub fn sweep(
    template: &Scenario,
    grid: &ParameterGrid,
    options: &RunOptions,
    exec: Execution,
) -> Result<Vec<SweepResult>> {
    let points = grid.points(template)?;
    Ok(map_ordered(&points, exec, |point| SweepResult {
        point: point.clone(),
        summary: point
            .apply(template)
            .and_then(|s| run(&s, options))
            .map(|out| out.summary),
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netcore::EdgeMap;

    fn explicit(law: LawVariant, r_cmm: f64, r_ctr: f64, pts: Vec<Point>) -> Scenario {
        let n = pts.len();
        let d = pts[0].dim();
        Scenario::new(law, n, d, r_cmm, r_ctr, InitialPositions::Explicit { positions: pts }).unwrap()
    }

    #[test]
    fn single_agent_is_already_at_rendezvous() {
        let s = explicit(LawVariant::Meb, 1.0, 0.1, vec![Point::from([2.0, 3.0])]);
        let out = run(&s, &RunOptions::default()).unwrap();
        assert_eq!(out.summary.rendezvous_round, Some(0));
        assert_eq!(out.summary.consensus_round, Some(0));
        assert!(out.summary.achieved);
        assert_eq!(out.trajectory.rounds(), 0);
    }

    #[test]
    fn two_agents_on_a_complete_graph_with_the_meo_law() {
        let mut s = explicit(
            LawVariant::Meo,
            10.0,
            0.25,
            vec![Point::from([0.0]), Point::from([1.0])],
        );
        s.network.edge_map = EdgeMap::Complete;
        let out = run(&s, &RunOptions::default()).unwrap();
        assert_eq!(out.summary.consensus_round, Some(1));
        // Round-1 controls already see the merged box, so motion starts in
        // the same round consensus is reached.
        assert_eq!(out.summary.rendezvous_round, Some(2));
        assert_eq!(out.summary.t_star, 2);
    }

    #[test]
    fn disconnected_start_is_refused_unless_allowed() {
        let s = explicit(
            LawVariant::Meb,
            1.0,
            0.1,
            vec![Point::from([0.0, 0.0]), Point::from([5.0, 0.0])],
        );
        assert!(matches!(run(&s, &RunOptions::default()), Err(Error::Disconnected)));
        let opts = RunOptions {
            allow_disconnected: true,
            max_rounds: Some(3),
            ..Default::default()
        };
        let out = run(&s, &opts).unwrap();
        // No edges, so the task holds vacuously.
        assert_eq!(out.summary.rendezvous_round, Some(0));
        assert_eq!(out.summary.t_floodmeo, None);
    }

    #[test]
    fn empty_sweep_axes_are_rejected() {
        let s = explicit(LawVariant::Meb, 3.0, 0.1, vec![Point::from([0.0, 0.0]), Point::from([1.0, 0.0])]);
        let grid = ParameterGrid {
            laws: Some(vec![]),
            ..Default::default()
        };
        assert!(sweep(&s, &grid, &RunOptions::default(), Execution::Sequential).is_err());
        let seeds = ParameterGrid {
            seeds: Some(vec![1]),
            ..Default::default()
        };
        assert!(sweep(&s, &seeds, &RunOptions::default(), Execution::Sequential).is_err());
    }
}

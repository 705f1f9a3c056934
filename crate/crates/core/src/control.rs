//! Move-toward-center control laws and the centralized minimum-time
//! rendezvous solutions they are measured against.
//!
//! Before an agent detects consensus its step toward the local target is
//! scaled by the largest `lambda` in `[0, 1]` that keeps it inside the
//! pairwise midpoint constraint of every current neighbor: a ball (disk
//! graphs) or cube (cube graphs) of radius `r_cmm / 2` around
//! `(p_i + p_j) / 2`. Two neighbors that both respect this constraint stay
//! within `r_cmm` of each other, so no edge is lost. After detection the
//! constraint is dropped and the agent pursues its target at full speed.

use serde::{Deserialize, Serialize};

use crate::consensus::{
    FloodAlgorithm, FloodMeb, FloodMeo, MebLogicState, MeoLogicState, Shape, StabilityCounter,
    SHAPE_TOL,
};
use crate::error::{invalid, Result};
use crate::geometry::{
    minimal_enclosing_ball, minimal_enclosing_orthotope, Norm, Orthotope, Point,
};
use crate::netcore::{saturate, ControlOutput, EdgeMap, InputSet, Law, NetworkConfig};

/// Constraint radii are shrunk by this fraction of `r_cmm` so that rounding
/// in the position update cannot push a preserved edge past `r_cmm`.
pub const CONNECTIVITY_MARGIN: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LawVariant {
    /// Move toward the center of the local minimal enclosing ball.
    Meb,
    /// Move toward the center of the local minimal enclosing orthotope.
    Meo,
}

impl LawVariant {
    /// Default pairing of edge map and input set for this law.
    pub fn default_pairing(self) -> (EdgeMap, InputSet) {
        match self {
            LawVariant::Meb => (EdgeMap::Disk, InputSet::BallBound),
            LawVariant::Meo => (EdgeMap::Cube, InputSet::CubeBound),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstraintMode {
    PairwiseMidpoint,
    None,
}

/// Connectivity-maintenance constraint and the norm it is measured in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivityConstraint {
    pub mode: ConstraintMode,
    pub norm: Norm,
}

impl ConnectivityConstraint {
    /// Pairwise midpoint constraint matching the edge map; no constraint is
    /// needed on the complete graph.
    pub fn for_edge_map(edge_map: EdgeMap) -> Self {
        match edge_map {
            EdgeMap::Disk => ConnectivityConstraint {
                mode: ConstraintMode::PairwiseMidpoint,
                norm: Norm::TwoNorm,
            },
            EdgeMap::Cube => ConnectivityConstraint {
                mode: ConstraintMode::PairwiseMidpoint,
                norm: Norm::InfNorm,
            },
            EdgeMap::Complete => ConnectivityConstraint {
                mode: ConstraintMode::None,
                norm: Norm::TwoNorm,
            },
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MotionParams {
    pub r_ctr: f64,
    pub r_cmm: f64,
    pub input_set: InputSet,
    pub constraint: ConnectivityConstraint,
}

impl MotionParams {
    pub fn from_config(config: &NetworkConfig) -> Self {
        MotionParams {
            r_ctr: config.r_ctr,
            r_cmm: config.r_cmm,
            input_set: config.input_set,
            constraint: ConnectivityConstraint::for_edge_map(config.edge_map),
        }
    }
}

/// Step toward `target` truncated to the input set: rescaled for the ball
/// bound, clamped per axis for the cube bound. Zero when already there.
pub fn pursuit_step(p: &Point, target: &Point, input_set: InputSet, r_ctr: f64) -> Vec<f64> {
    saturate(&target.sub(p), input_set, r_ctr)
}

/// Feasible `lambda` interval of `|c + lambda * s| <= rho` (scalar case).
fn scalar_interval(c: f64, s: f64, rho: f64) -> Option<(f64, f64)> {
    if s == 0.0 {
        return (c.abs() <= rho).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let a = (-rho - c) / s;
    let b = (rho - c) / s;
    Some((a.min(b), a.max(b)))
}

/// Feasible `lambda` interval of `||c + lambda * s||_2 <= rho`.
fn ball_interval(c: &[f64], s: &[f64], rho: f64) -> Option<(f64, f64)> {
    let a: f64 = s.iter().map(|x| x * x).sum();
    let b: f64 = 2.0 * c.iter().zip(s).map(|(x, y)| x * y).sum::<f64>();
    let cc: f64 = c.iter().map(|x| x * x).sum::<f64>() - rho * rho;
    if a == 0.0 {
        return (cc <= 0.0).then_some((f64::NEG_INFINITY, f64::INFINITY));
    }
    let disc = b * b - 4.0 * a * cc;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    Some(((-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)))
}

fn intersect(acc: Option<(f64, f64)>, next: Option<(f64, f64)>) -> Option<(f64, f64)> {
    let (a, b) = acc?;
    let (c, d) = next?;
    let lo = a.max(c);
    let hi = b.min(d);
    (lo <= hi).then_some((lo, hi))
}

/// Largest `lambda` in `[0, 1]` such that `p + lambda * step` lies in every
/// shrunk midpoint constraint, or `None` when no positive scaling is
/// admissible. Coordinates the step leaves untouched are not constrained.
pub fn connectivity_scale(
    p: &Point,
    step: &[f64],
    neighbors: &[&Point],
    r_cmm: f64,
    norm: Norm,
) -> Option<f64> {
    let rho = 0.5 * r_cmm - CONNECTIVITY_MARGIN * r_cmm;
    let mut feasible = Some((0.0, 1.0));
    for q in neighbors {
        let m = p.midpoint(q);
        let c = p.sub(&m);
        let interval = match norm {
            Norm::TwoNorm => ball_interval(&c, step, rho),
            Norm::InfNorm => c
                .iter()
                .zip(step)
                .filter(|(_, s)| **s != 0.0)
                .try_fold((f64::NEG_INFINITY, f64::INFINITY), |acc, (&ca, &sa)| {
                    intersect(Some(acc), scalar_interval(ca, sa, rho))
                }),
        };
        feasible = intersect(feasible, interval);
    }
    feasible.map(|(_, hi)| hi)
}

/// Applies the connectivity constraint to a desired step. `per_axis` scales
/// every coordinate independently (valid for the cube constraint, whose
/// feasible set is a product of intervals).
fn constrain(
    p: &Point,
    step: Vec<f64>,
    neighbors: &[&Point],
    params: &MotionParams,
    consensus: bool,
    per_axis: bool,
) -> ControlOutput {
    let wants_motion = step.iter().any(|x| *x != 0.0);
    if consensus || params.constraint.mode == ConstraintMode::None || !wants_motion {
        return ControlOutput::free(step);
    }
    let norm = params.constraint.norm;
    if per_axis && norm == Norm::InfNorm {
        let mut blocked = false;
        let scaled = step
            .iter()
            .enumerate()
            .map(|(a, &s)| {
                if s == 0.0 {
                    return 0.0;
                }
                let mut axis_step = vec![0.0; step.len()];
                axis_step[a] = s;
                match connectivity_scale(p, &axis_step, neighbors, params.r_cmm, norm) {
                    Some(lambda) => lambda * s,
                    None => {
                        blocked = true;
                        0.0
                    }
                }
            })
            .collect();
        return ControlOutput { u: scaled, blocked };
    }
    match connectivity_scale(p, &step, neighbors, params.r_cmm, norm) {
        Some(lambda) => ControlOutput::free(step.iter().map(|x| lambda * x).collect()),
        None => ControlOutput {
            u: vec![0.0; step.len()],
            blocked: true,
        },
    }
}

/// Move toward the center of the agent's current ball estimate.
pub fn ctl_meb(
    p: &Point,
    w: &MebLogicState,
    neighbors: &[&Point],
    params: &MotionParams,
    consensus: bool,
) -> ControlOutput {
    let target = w.ball().center();
    let step = pursuit_step(p, target, params.input_set, params.r_ctr);
    constrain(p, step, neighbors, params, consensus, false)
}

/// Move toward the center of the agent's current orthotope estimate, axis
/// by axis.
pub fn ctl_meo(
    p: &Point,
    w: &MeoLogicState,
    neighbors: &[&Point],
    params: &MotionParams,
    consensus: bool,
) -> ControlOutput {
    let target = w.orthotope().center();
    let step = pursuit_step(p, &target, params.input_set, params.r_ctr);
    constrain(p, step, neighbors, params, consensus, true)
}

/// Optimal rendezvous under the complete graph.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CentralizedSolution {
    /// Minimum number of rounds.
    pub t_star: usize,
    /// Representative rendezvous point.
    pub target: Point,
    /// Every optimal rendezvous point (cube bound only).
    pub target_region: Option<Orthotope>,
}

/// `ceil(x)` forgiving rounding noise just above an integer.
pub(crate) fn ceil_rounds(x: f64) -> usize {
    let nearest = x.round();
    if (x - nearest).abs() <= 1e-9 * nearest.max(1.0) {
        nearest.max(0.0) as usize
    } else {
        x.ceil().max(0.0) as usize
    }
}

/// Ball-bounded inputs: everyone heads for the center of the minimal
/// enclosing ball, taking `ceil(radius / r_ctr)` rounds.
pub fn centralized_mtr_ball(positions: &[Point], r_ctr: f64) -> Result<CentralizedSolution> {
    if !(r_ctr > 0.0) {
        return Err(invalid("r_ctr", format!("must be positive, got {r_ctr}")));
    }
    let ball = minimal_enclosing_ball(positions)?;
    Ok(CentralizedSolution {
        t_star: ceil_rounds(ball.radius() / r_ctr),
        target: ball.center().clone(),
        target_region: None,
    })
}

/// Cube-bounded inputs: any point of
/// `prod_a [MOC_a - (l_max - l_a)/2, MOC_a + (l_max - l_a)/2]` is optimal,
/// reached in `ceil((l_max / 2) / r_ctr)` rounds.
pub fn centralized_mtr_cube(positions: &[Point], r_ctr: f64) -> Result<CentralizedSolution> {
    if !(r_ctr > 0.0) {
        return Err(invalid("r_ctr", format!("must be positive, got {r_ctr}")));
    }
    let meo = minimal_enclosing_orthotope(positions)?;
    let center = meo.center();
    let l_max = meo.max_side();
    let slack: Vec<f64> = meo.sides().iter().map(|l| 0.5 * (l_max - l)).collect();
    let region = Orthotope::new(
        center.coords().iter().zip(&slack).map(|(c, s)| c - s).collect(),
        center.coords().iter().zip(&slack).map(|(c, s)| c + s).collect(),
    )?;
    Ok(CentralizedSolution {
        t_star: ceil_rounds(0.5 * l_max / r_ctr),
        target: center,
        target_region: Some(region),
    })
}

/// Logic state of a move-toward-center law: the flooding state plus the
/// local termination detector.
#[derive(Clone, Debug, PartialEq)]
pub struct LawState<S> {
    pub flood: S,
    pub detector: StabilityCounter,
    /// Latched once the detector fires; the connectivity constraint is
    /// dropped from then on.
    pub consensus: bool,
}

/// Per-variant pursuit rule.
pub trait Pursuit: FloodAlgorithm {
    fn control(
        p: &Point,
        state: &Self::State,
        neighbors: &[&Point],
        params: &MotionParams,
        consensus: bool,
    ) -> ControlOutput;
}

impl Pursuit for FloodMeb {
    fn control(
        p: &Point,
        state: &MebLogicState,
        neighbors: &[&Point],
        params: &MotionParams,
        consensus: bool,
    ) -> ControlOutput {
        ctl_meb(p, state, neighbors, params, consensus)
    }
}

impl Pursuit for FloodMeo {
    fn control(
        p: &Point,
        state: &MeoLogicState,
        neighbors: &[&Point],
        params: &MotionParams,
        consensus: bool,
    ) -> ControlOutput {
        ctl_meo(p, state, neighbors, params, consensus)
    }
}

/// The move-toward-MBC (`F = FloodMeb`) or move-toward-MOC
/// (`F = FloodMeo`) control-and-communication law. Messages carry the
/// sender's position and logic state.
#[derive(Clone, Debug)]
pub struct MoveTowardCenter<F> {
    pub params: MotionParams,
    pub rounds_required: usize,
    pub tol: f64,
    _flood: std::marker::PhantomData<F>,
}

impl<F: Pursuit> MoveTowardCenter<F> {
    /// Detector window `n - 1` (at least 1), shape tolerance [`SHAPE_TOL`].
    pub fn new(config: &NetworkConfig) -> Self {
        Self::with_rounds_required(config, config.n.saturating_sub(1).max(1))
    }

    pub fn with_rounds_required(config: &NetworkConfig, rounds_required: usize) -> Self {
        MoveTowardCenter {
            params: MotionParams::from_config(config),
            rounds_required: rounds_required.max(1),
            tol: SHAPE_TOL,
            _flood: std::marker::PhantomData,
        }
    }

    pub fn init(&self, p0: &Point) -> LawState<F::State> {
        LawState {
            flood: F::init(p0),
            detector: StabilityCounter::new(self.rounds_required),
            consensus: false,
        }
    }
}

impl<F: Pursuit> Law for MoveTowardCenter<F> {
    type Logic = LawState<F::State>;
    type Message = (Point, LawState<F::State>);

    fn msg(&self, position: &Point, logic: &Self::Logic, _receiver: usize) -> Self::Message {
        (position.clone(), logic.clone())
    }

    fn stf(&self, logic: &Self::Logic, received: &[Option<Self::Message>]) -> Result<Self::Logic> {
        let flood = F::transition(
            &logic.flood,
            received.iter().map(|m| m.as_ref().map(|(_, w)| &w.flood)),
        )?;
        let changed = !F::shape(&flood).approx_eq(&F::shape(&logic.flood), self.tol);
        let mut detector = logic.detector.clone();
        detector.observe(changed);
        let consensus = logic.consensus || detector.fired();
        Ok(LawState {
            flood,
            detector,
            consensus,
        })
    }

    fn ctl(
        &self,
        position: &Point,
        logic: &Self::Logic,
        received: &[Option<Self::Message>],
    ) -> Result<ControlOutput> {
        let neighbors: Vec<&Point> = received.iter().flatten().map(|(p, _)| p).collect();
        Ok(F::control(position, &logic.flood, &neighbors, &self.params, logic.consensus))
    }
}

/// Either law, chosen at run time.
pub enum AssembledLaw {
    Meb(MoveTowardCenter<FloodMeb>),
    Meo(MoveTowardCenter<FloodMeo>),
}

pub fn assemble_law(variant: LawVariant, config: &NetworkConfig) -> AssembledLaw {
    match variant {
        LawVariant::Meb => AssembledLaw::Meb(MoveTowardCenter::new(config)),
        LawVariant::Meo => AssembledLaw::Meo(MoveTowardCenter::new(config)),
    }
}

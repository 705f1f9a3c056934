//! Scenario files, runs, sweeps and trajectory output.

pub mod export;
pub mod run;
pub mod scenario;

pub use export::{emit_plot_data, export_trajectory, read_jsonl, Format, LogicView, RoundRecord, ShapeRecord};
pub use run::{run, sweep, ParameterGrid, RunOptions, RunOutput, RunSummary, RunTrajectory, SweepPoint, SweepResult};
pub use scenario::{generate_positions, load_scenario, parse_scenario, InitialPositions, Rectangle, Scenario};

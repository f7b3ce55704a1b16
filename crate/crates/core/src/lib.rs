//! Directional lane allocation for bi-directional urban air mobility
//! corridors.
//!
//! The pipeline turns door-to-door trips into per-slot aircraft demand
//! ([`dispatch`]), finds a cost-optimal lane schedule under flush-aware
//! capacity ([`solver`]), scores it next to three baseline policies
//! ([`policies`], [`evaluator`]) and sweeps lane count against capture rate
//! ([`sweep`]).

pub mod corridor;
pub mod cost;
pub mod dispatch;
pub mod error;
pub mod evaluator;
pub mod pipeline;
pub mod policies;
pub mod series_io;
pub mod solver;
pub mod sweep;
pub mod trips;

pub use corridor::{
    check_feasibility, derive_events, objective, CorridorSpec, DemandSeries, Direction,
    InitialState, LaneSchedule, ScheduleEvents, SlotOutcome, Violation,
};
pub use cost::CostWeights;
pub use dispatch::{
    capture_filter, simulate_dispatch, DispatchParams, DispatchResult, PassengerOutcome,
    PassengerStatus,
};
pub use error::{Error, Result};
pub use evaluator::{evaluate, evaluate_strict, travel_impact, EvaluationReport, TravelImpact};
pub use pipeline::{PipelineConfig, Policy};
pub use policies::BlockSchedule;
pub use solver::{
    brute_force_solve, export_lp, solve_dynamic, Solution, SolveStatus, SolverConfig,
};
pub use sweep::{run_sweep, SweepGrid, SweepRow};
pub use trips::{
    generate_synthetic_trips, load_trips, SyntheticProfile, TripCollection, TripRecord,
};

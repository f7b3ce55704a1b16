//! Exact optimisation of the lane-allocation program.
//!
//! [`solve_dynamic`] runs a dynamic program over corridor states;
//! [`brute_force_solve`] enumerates every schedule and serves as its oracle
//! on small instances; [`export_lp`] writes the same model for external
//! MILP solvers.

mod brute;
mod dp;
mod lp;

use std::cmp::Ordering;
use std::time::Instant;

use serde::{Deserialize, Serialize};

pub use brute::brute_force_size;
pub use lp::{export_lp, write_lp};

use crate::corridor::{
    derive_events, objective_exact, slot_outcomes, CorridorSpec, DemandSeries, InitialState,
    LaneSchedule, ScheduleEvents, SlotOutcome,
};
use crate::cost::{CostWeights, ExactCost, ExactWeights};
use crate::error::Result;

/// Default cap on the number of schedules the oracle may enumerate:
/// `((L + 1)^2)^T <= 2^24`, which admits T = 6 at L = 3.
pub const DEFAULT_BRUTE_FORCE_LIMIT: u64 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveMethod {
    ExactDp,
    BruteForce,
}

/// How equal-cost schedules are ordered.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    /// Fewer deactivations, then fewer active lane-slots, then the
    /// lexicographically smallest `y_fwd`, then smallest `y_rev`.
    #[default]
    Canonical,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub method: SolveMethod,
    #[serde(default)]
    pub tie_break: TieBreak,
    /// Largest schedule count the brute-force oracle will enumerate.
    #[serde(default = "default_limit")]
    pub brute_force_limit: u64,
}

fn default_limit() -> u64 {
    DEFAULT_BRUTE_FORCE_LIMIT
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            method: SolveMethod::ExactDp,
            tie_break: TieBreak::Canonical,
            brute_force_limit: DEFAULT_BRUTE_FORCE_LIMIT,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    Infeasible,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub status: SolveStatus,
    pub schedule: LaneSchedule,
    pub events: ScheduleEvents,
    /// `(fwd, rev)` per slot.
    pub slot_outcomes: Vec<(SlotOutcome, SlotOutcome)>,
    pub objective_z: f64,
    pub solve_millis: f64,
}

impl Solution {
    fn infeasible(started: Instant) -> Self {
        Self {
            status: SolveStatus::Infeasible,
            schedule: LaneSchedule::constant(0, 0, 0),
            events: derive_events(&LaneSchedule::constant(0, 0, 0), &InitialState::idle()),
            slot_outcomes: Vec::new(),
            objective_z: f64::INFINITY,
            solve_millis: started.elapsed().as_secs_f64() * 1e3,
        }
    }

    pub fn is_optimal(&self) -> bool {
        self.status == SolveStatus::Optimal
    }
}

/// Lexicographic ranking key shared by both solvers. The first three
/// components are additive over slots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub(crate) struct RankKey {
    pub cost: ExactCost,
    pub deactivations: u64,
    pub active: u64,
}

impl RankKey {
    pub const ZERO: RankKey = RankKey {
        cost: ExactCost(0),
        deactivations: 0,
        active: 0,
    };

    #[inline]
    pub fn plus(self, other: RankKey) -> RankKey {
        RankKey {
            cost: self.cost + other.cost,
            deactivations: self.deactivations + other.deactivations,
            active: self.active + other.active,
        }
    }
}

/// Orders two complete schedules with equal [`RankKey`].
pub(crate) fn lex_schedule(a: &LaneSchedule, b: &LaneSchedule) -> Ordering {
    a.y_fwd.cmp(&b.y_fwd).then_with(|| a.y_rev.cmp(&b.y_rev))
}

fn validate_instance(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    init: &InitialState,
) -> Result<bool> {
    spec.validate()?;
    demand.check_horizon(spec)?;
    Ok(init.validate(spec).is_ok())
}

fn finish(
    schedule: LaneSchedule,
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &ExactWeights,
    init: &InitialState,
    started: Instant,
) -> Result<Solution> {
    let exact = objective_exact(&schedule, demand, weights, spec, init)?;
    let events = derive_events(&schedule, init);
    let outcomes = slot_outcomes(&schedule, demand, spec);
    Ok(Solution {
        status: SolveStatus::Optimal,
        objective_z: weights.to_f64(exact),
        schedule,
        events,
        slot_outcomes: outcomes,
        solve_millis: started.elapsed().as_secs_f64() * 1e3,
    })
}

/// Globally optimal schedule under `config.method`.
pub fn solve_dynamic(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &CostWeights,
    init: &InitialState,
    config: &SolverConfig,
) -> Result<Solution> {
    match config.method {
        SolveMethod::ExactDp => solve_exact(spec, demand, weights, init),
        SolveMethod::BruteForce => {
            brute_force_solve_bounded(spec, demand, weights, init, config.brute_force_limit)
        }
    }
}

/// Dynamic program over `(y_fwd, y_rev, recent deactivations)`.
pub fn solve_exact(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &CostWeights,
    init: &InitialState,
) -> Result<Solution> {
    let started = Instant::now();
    let exact = ExactWeights::new(weights)?;
    if !validate_instance(spec, demand, init)? {
        return Ok(Solution::infeasible(started));
    }
    let (schedule, key) = dp::solve(spec, demand, &exact, init)?;
    let sol = finish(schedule, spec, demand, &exact, init, started)?;
    debug_assert_eq!(exact.to_f64(key.cost), sol.objective_z);
    Ok(sol)
}

/// Exhaustive oracle with the default size bound.
pub fn brute_force_solve(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &CostWeights,
    init: &InitialState,
) -> Result<Solution> {
    brute_force_solve_bounded(spec, demand, weights, init, DEFAULT_BRUTE_FORCE_LIMIT)
}

pub fn brute_force_solve_bounded(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &CostWeights,
    init: &InitialState,
    limit: u64,
) -> Result<Solution> {
    let started = Instant::now();
    let exact = ExactWeights::new(weights)?;
    if !validate_instance(spec, demand, init)? {
        return Ok(Solution::infeasible(started));
    }
    let schedule = brute::solve(spec, demand, &exact, init, limit)?;
    finish(schedule, spec, demand, &exact, init, started)
}

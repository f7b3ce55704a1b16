//! End-to-end wiring: trips to demand, demand to schedule, schedule to
//! report and population impact.

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::corridor::{CorridorSpec, DemandSeries, InitialState, LaneSchedule};
use crate::cost::CostWeights;
use crate::dispatch::{
    capture_filter, simulate_dispatch, DispatchParams, DispatchResult, PassengerOutcome,
};
use crate::error::{config_err, Error, Result};
use crate::evaluator::{
    attribute_rejections, evaluate_strict, travel_impact, EvaluationReport, TravelImpact,
};
use crate::policies::{
    fixed_asymmetric_schedule, fixed_split_schedule, greedy_reactive_schedule, BlockSchedule,
};
use crate::solver::{solve_dynamic, Solution, SolverConfig};
use crate::trips::TripCollection;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Policy {
    #[serde(rename = "dynamic")]
    Dynamic,
    #[serde(rename = "fixed5050")]
    Fixed5050,
    #[serde(rename = "fixed_asym")]
    FixedAsym,
    #[serde(rename = "greedy")]
    Greedy,
}

impl Policy {
    pub const ALL: [Policy; 4] = [
        Policy::Dynamic,
        Policy::Fixed5050,
        Policy::FixedAsym,
        Policy::Greedy,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Policy::Dynamic => "dynamic",
            Policy::Fixed5050 => "fixed5050",
            Policy::FixedAsym => "fixed_asym",
            Policy::Greedy => "greedy",
        }
    }
}

impl fmt::Display for Policy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Policy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Policy::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| config_err(format!("unknown policy {s:?}")))
    }
}

/// Everything the pipeline needs besides the trips.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PipelineConfig {
    pub corridor: CorridorSpec,
    pub dispatch: DispatchParams,
    pub weights: CostWeights,
    pub initial: InitialState,
    pub solver: SolverConfig,
    pub blocks: BlockSchedule,
}

impl PipelineConfig {
    pub fn validate(&self) -> Result<()> {
        self.corridor.validate()?;
        self.dispatch.validate()?;
        self.weights.validate()?;
        self.initial.validate(&self.corridor)?;
        self.blocks.validate(self.corridor.lane_count)
    }
}

/// Aircraft demand plus the passenger bookkeeping behind it.
#[derive(Debug, Clone)]
pub struct DemandStage {
    pub dispatch: DispatchResult,
    /// One outcome per input trip, in input order, before rejections.
    pub outcomes: Vec<PassengerOutcome>,
}

impl DemandStage {
    pub fn demand(&self) -> &DemandSeries {
        &self.dispatch.demand
    }
}

pub fn build_demand(
    trips: &TripCollection,
    dispatch: &DispatchParams,
    spec: &CorridorSpec,
) -> Result<DemandStage> {
    let capture = capture_filter(trips, dispatch.capture_rate);
    let result = simulate_dispatch(&capture.retained, dispatch, spec)?;
    let mut by_id: HashMap<&str, &PassengerOutcome> = result
        .outcomes
        .iter()
        .chain(&capture.not_captured)
        .map(|o| (o.trip_id.as_str(), o))
        .collect();
    let outcomes = trips
        .iter()
        .map(|t| {
            by_id
                .remove(t.trip_id.as_str())
                .cloned()
                .ok_or_else(|| Error::MissingOutcome(t.trip_id.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DemandStage {
        dispatch: result,
        outcomes,
    })
}

/// A policy's schedule; the solver output is kept for the dynamic policy.
pub fn policy_schedule(
    policy: Policy,
    demand: &DemandSeries,
    config: &PipelineConfig,
) -> Result<(LaneSchedule, Option<Solution>)> {
    let spec = &config.corridor;
    Ok(match policy {
        Policy::Dynamic => {
            let sol = solve_dynamic(
                spec,
                demand,
                &config.weights,
                &config.initial,
                &config.solver,
            )?;
            if !sol.is_optimal() {
                return Err(Error::Infeasible(
                    "initial state violates the lane budget".into(),
                ));
            }
            (sol.schedule.clone(), Some(sol))
        }
        Policy::Fixed5050 => (fixed_split_schedule(spec), None),
        Policy::FixedAsym => (fixed_asymmetric_schedule(spec, &config.blocks)?, None),
        Policy::Greedy => (greedy_reactive_schedule(spec, demand)?, None),
    })
}

#[derive(Debug, Clone)]
pub struct PolicyRun {
    pub policy: Policy,
    pub schedule: LaneSchedule,
    pub solution: Option<Solution>,
    pub report: EvaluationReport,
    /// Input order, with capacity rejections applied.
    pub outcomes: Vec<PassengerOutcome>,
    pub impact: TravelImpact,
}

impl PolicyRun {
    pub fn solve_millis(&self) -> Option<f64> {
        self.solution.as_ref().map(|s| s.solve_millis)
    }
}

pub fn run_policy(
    policy: Policy,
    trips: &TripCollection,
    stage: &DemandStage,
    config: &PipelineConfig,
) -> Result<PolicyRun> {
    let spec = &config.corridor;
    let (schedule, solution) = policy_schedule(policy, stage.demand(), config)?;
    let report = evaluate_strict(
        &schedule,
        stage.demand(),
        spec,
        &config.initial,
        &config.weights,
    )?;
    let outcomes = attribute_rejections(&report, &stage.outcomes, &stage.dispatch.provenance)?;
    let impact = travel_impact(&outcomes, trips, spec.slot_minutes)?;
    Ok(PolicyRun {
        policy,
        schedule,
        solution,
        report,
        outcomes,
        impact,
    })
}

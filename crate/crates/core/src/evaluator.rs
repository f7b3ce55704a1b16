//! Policy-agnostic scoring of lane schedules and population travel impact.

use std::collections::HashMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corridor::{
    check_feasibility, derive_events, objective, slot_outcomes, CorridorSpec, DemandSeries,
    Direction, InitialState, LaneSchedule, Violation,
};
use crate::cost::CostWeights;
use crate::dispatch::{DemandProvenance, PassengerOutcome, PassengerStatus};
use crate::error::{Error, Result};
use crate::trips::TripCollection;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotRecord {
    pub slot: usize,
    pub direction: Direction,
    pub demand: u32,
    pub lanes: u32,
    pub served: u32,
    pub shortfall: u32,
    pub waste: u32,
    pub deactivations: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    /// Slot-major, `fwd` before `rev`.
    pub slots: Vec<SlotRecord>,
    pub total_demand: u64,
    pub total_shortfall: u64,
    pub shortfall_rate: f64,
    pub total_waste: u64,
    pub total_deactivations: u64,
    pub total_served: u64,
    pub mean_utilization: f64,
    pub objective_z: f64,
    /// Lane-budget violations, when evaluated strictly.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violations: Option<Vec<Violation>>,
}

impl EvaluationReport {
    pub fn slot(&self, slot: usize, dir: Direction) -> &SlotRecord {
        &self.slots[2 * slot + dir as usize]
    }

    /// Writes `slot,dir,F,y,served,s,w,v`.
    pub fn write_slots_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["slot", "dir", "F", "y", "served", "s", "w", "v"])?;
        for r in &self.slots {
            w.write_record([
                r.slot.to_string(),
                r.direction.to_string(),
                r.demand.to_string(),
                r.lanes.to_string(),
                r.served.to_string(),
                r.shortfall.to_string(),
                r.waste.to_string(),
                r.deactivations.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Scores a schedule without rejecting flush violations.
///
/// Utilisation is `served / (K y)` averaged over direction-slots with at
/// least one active lane, so it never exceeds 1.
pub fn evaluate(
    schedule: &LaneSchedule,
    demand: &DemandSeries,
    spec: &CorridorSpec,
    init: &InitialState,
    weights: &CostWeights,
) -> Result<EvaluationReport> {
    schedule.check_horizon(spec)?;
    demand.check_horizon(spec)?;
    let k = spec.lane_throughput;
    let events = derive_events(schedule, init);
    let outcomes = slot_outcomes(schedule, demand, spec);

    let mut slots = Vec::with_capacity(2 * spec.horizon);
    let (mut shortfall, mut waste, mut served) = (0u64, 0u64, 0u64);
    let mut util_sum = 0.0;
    let mut util_n = 0usize;
    for (t, (of, or)) in outcomes.into_iter().enumerate() {
        for (dir, o) in [(Direction::Fwd, of), (Direction::Rev, or)] {
            let y = schedule.get(dir)[t];
            shortfall += o.shortfall as u64;
            waste += o.waste as u64;
            served += o.served as u64;
            if y > 0 {
                util_sum += o.served as f64 / (k * y) as f64;
                util_n += 1;
            }
            slots.push(SlotRecord {
                slot: t,
                direction: dir,
                demand: demand.get(dir)[t],
                lanes: y,
                served: o.served,
                shortfall: o.shortfall,
                waste: o.waste,
                deactivations: events.deactivations(dir)[t],
            });
        }
    }
    let total_demand = demand.total();
    Ok(EvaluationReport {
        slots,
        total_demand,
        total_shortfall: shortfall,
        shortfall_rate: if total_demand == 0 {
            0.0
        } else {
            shortfall as f64 / total_demand as f64
        },
        total_waste: waste,
        total_deactivations: events.total_deactivations(),
        total_served: served,
        mean_utilization: if util_n == 0 {
            0.0
        } else {
            util_sum / util_n as f64
        },
        objective_z: objective(schedule, demand, weights, spec, init)?,
        violations: None,
    })
}

/// [`evaluate`] plus the schedule's lane-budget violations.
pub fn evaluate_strict(
    schedule: &LaneSchedule,
    demand: &DemandSeries,
    spec: &CorridorSpec,
    init: &InitialState,
    weights: &CostWeights,
) -> Result<EvaluationReport> {
    let mut report = evaluate(schedule, demand, spec, init, weights)?;
    report.violations = Some(check_feasibility(schedule, spec, init));
    Ok(report)
}

/// Marks passengers on capacity-rejected aircraft. In every direction-slot
/// with shortfall `s`, the last `s` aircraft dispatched are rejected.
pub fn attribute_rejections(
    report: &EvaluationReport,
    outcomes: &[PassengerOutcome],
    provenance: &DemandProvenance,
) -> Result<Vec<PassengerOutcome>> {
    let horizon = report.slots.len() / 2;
    for dir in Direction::BOTH {
        let p = provenance.get(dir);
        if p.len() != horizon {
            return Err(Error::Provenance(format!(
                "{dir} provenance covers {} slots, report covers {horizon}",
                p.len()
            )));
        }
    }
    let index: HashMap<&str, usize> = outcomes
        .iter()
        .enumerate()
        .map(|(i, o)| (o.trip_id.as_str(), i))
        .collect();
    let mut out = outcomes.to_vec();
    for rec in &report.slots {
        let aircraft = &provenance.get(rec.direction)[rec.slot];
        if aircraft.len() != rec.demand as usize {
            return Err(Error::Provenance(format!(
                "slot {} {}: {} aircraft recorded for demand {}",
                rec.slot,
                rec.direction,
                aircraft.len(),
                rec.demand
            )));
        }
        let rejected = rec.shortfall as usize;
        for a in &aircraft[aircraft.len() - rejected..] {
            for id in &a.trip_ids {
                let &i = index.get(id.as_str()).ok_or_else(|| {
                    Error::Provenance(format!("aircraft carries unknown trip {id}"))
                })?;
                out[i].status = PassengerStatus::RejectedCapacity;
                out[i].board_slot = None;
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub served_uam: usize,
    pub spilled: usize,
    pub rejected_capacity: usize,
    pub not_captured: usize,
}

impl StatusCounts {
    pub fn total(&self) -> usize {
        self.served_uam + self.spilled + self.rejected_capacity + self.not_captured
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TravelImpact {
    pub person_hours_saved: f64,
    pub mean_trip_minutes: f64,
    pub baseline_mean_trip_minutes: f64,
    pub counts: StatusCounts,
}

/// Door-to-door time of every trip under its outcome, against driving.
///
/// Served passengers pay first mile, vertiport wait, flight and last mile;
/// everyone else drives.
pub fn travel_impact(
    outcomes: &[PassengerOutcome],
    trips: &TripCollection,
    slot_minutes: u32,
) -> Result<TravelImpact> {
    let by_id: HashMap<&str, &PassengerOutcome> =
        outcomes.iter().map(|o| (o.trip_id.as_str(), o)).collect();
    let mut counts = StatusCounts::default();
    let mut saved_minutes = 0.0;
    let mut incurred_total = 0.0;
    let mut drive_total = 0.0;
    for trip in trips {
        let o = by_id
            .get(trip.trip_id.as_str())
            .ok_or_else(|| Error::MissingOutcome(trip.trip_id.clone()))?;
        let incurred = match o.status {
            PassengerStatus::ServedUam => {
                counts.served_uam += 1;
                let t = trip.uam_minutes() + (o.wait_slots * slot_minutes) as f64;
                saved_minutes += trip.drive_minutes - t;
                t
            }
            PassengerStatus::SpilledWait => {
                counts.spilled += 1;
                trip.drive_minutes
            }
            PassengerStatus::RejectedCapacity => {
                counts.rejected_capacity += 1;
                trip.drive_minutes
            }
            PassengerStatus::NotCaptured => {
                counts.not_captured += 1;
                trip.drive_minutes
            }
        };
        incurred_total += incurred;
        drive_total += trip.drive_minutes;
    }
    let n = trips.len();
    let mean = |x: f64| if n == 0 { 0.0 } else { x / n as f64 };
    Ok(TravelImpact {
        person_hours_saved: saved_minutes / 60.0,
        mean_trip_minutes: mean(incurred_total),
        baseline_mean_trip_minutes: mean(drive_total),
        counts,
    })
}

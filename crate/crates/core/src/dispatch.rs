//! Capture-rate filter and vertiport queue dispatch: turns passenger trips
//! into per-slot aircraft demand.

use std::collections::VecDeque;
use std::io::Write;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::corridor::{CorridorSpec, DemandSeries, Direction};
use crate::error::{config_err, Error, Result};
use crate::trips::{TripCollection, TripRecord};

/// Guards `floor(p_c * N)` against representation error such as
/// `0.29 * 100 = 28.999999999999996`.
const CAPTURE_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DispatchParams {
    pub capture_rate: f64,
    /// Seats per aircraft.
    pub cap: u32,
    /// Smallest load an aircraft departs with.
    pub min_load: u32,
    pub max_wait_slots: u32,
    /// Slots between vertiport departure and corridor entry.
    #[serde(default)]
    pub entry_offset_slots: u32,
}

impl DispatchParams {
    pub fn reference() -> Self {
        Self {
            capture_rate: 0.3,
            cap: 4,
            min_load: 3,
            max_wait_slots: 1,
            entry_offset_slots: 0,
        }
    }

    pub fn with_capture_rate(&self, capture_rate: f64) -> Self {
        Self {
            capture_rate,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.capture_rate) {
            return Err(config_err(format!(
                "capture_rate must lie in [0, 1], got {}",
                self.capture_rate
            )));
        }
        if self.cap < 1 {
            return Err(config_err("cap must be >= 1"));
        }
        if self.min_load < 1 || self.min_load > self.cap {
            return Err(config_err("min_load must lie in [1, cap]"));
        }
        Ok(())
    }
}

impl Default for DispatchParams {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PassengerStatus {
    ServedUam,
    SpilledWait,
    RejectedCapacity,
    NotCaptured,
}

impl PassengerStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            PassengerStatus::ServedUam => "served_uam",
            PassengerStatus::SpilledWait => "spilled_wait",
            PassengerStatus::RejectedCapacity => "rejected_capacity",
            PassengerStatus::NotCaptured => "not_captured",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PassengerOutcome {
    pub trip_id: String,
    pub status: PassengerStatus,
    /// Vertiport departure slot, for passengers that boarded.
    pub board_slot: Option<usize>,
    pub wait_slots: u32,
}

impl PassengerOutcome {
    fn not_captured(trip: &TripRecord) -> Self {
        Self {
            trip_id: trip.trip_id.clone(),
            status: PassengerStatus::NotCaptured,
            board_slot: None,
            wait_slots: 0,
        }
    }
}

/// Writes `trip_id,status,board_slot,wait_slots`.
pub fn write_outcomes_csv<W: Write>(outcomes: &[PassengerOutcome], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["trip_id", "status", "board_slot", "wait_slots"])?;
    for o in outcomes {
        let board = o.board_slot.map(|s| s.to_string()).unwrap_or_default();
        let wait = o.wait_slots.to_string();
        w.write_record([o.trip_id.as_str(), o.status.as_str(), &board, &wait])?;
    }
    w.flush()?;
    Ok(())
}

/// Trips kept by the capture filter and outcomes for the rest.
#[derive(Debug, Clone)]
pub struct Capture {
    pub retained: TripCollection,
    pub not_captured: Vec<PassengerOutcome>,
}

/// Keeps the `floor(p_c * N)` trips with the largest travel-time advantage,
/// pooled over both directions, ties by ascending `trip_id`. Retained trips
/// keep their original order.
pub fn capture_filter(trips: &TripCollection, capture_rate: f64) -> Capture {
    let n = trips.len();
    let p = capture_rate.clamp(0.0, 1.0);
    let keep = ((p * n as f64) + CAPTURE_EPS).floor() as usize;
    let keep = keep.min(n);

    let mut order: Vec<usize> = (0..n).collect();
    let all = trips.trips();
    order.sort_by(|&a, &b| {
        all[b]
            .advantage()
            .total_cmp(&all[a].advantage())
            .then_with(|| all[a].trip_id.cmp(&all[b].trip_id))
    });
    let mut retained = vec![false; n];
    for &i in &order[..keep] {
        retained[i] = true;
    }
    let mut flags = retained.iter();
    let kept = trips.subset(|_| *flags.next().unwrap());
    let not_captured = all
        .iter()
        .zip(&retained)
        .filter(|(_, &r)| !r)
        .map(|(t, _)| PassengerOutcome::not_captured(t))
        .collect();
    Capture {
        retained: kept,
        not_captured,
    }
}

/// One dispatched aircraft.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Aircraft {
    pub dispatch_slot: usize,
    pub corridor_slot: usize,
    pub trip_ids: Vec<String>,
}

impl Aircraft {
    pub fn load(&self) -> usize {
        self.trip_ids.len()
    }
}

/// Aircraft entering the corridor at each slot, in dispatch order.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DemandProvenance {
    pub fwd: Vec<Vec<Aircraft>>,
    pub rev: Vec<Vec<Aircraft>>,
}

impl DemandProvenance {
    pub fn get(&self, dir: Direction) -> &[Vec<Aircraft>] {
        match dir {
            Direction::Fwd => &self.fwd,
            Direction::Rev => &self.rev,
        }
    }

    /// Aircraft counts per slot; equal to the demand series by construction.
    pub fn counts(&self) -> DemandSeries {
        let c = |v: &[Vec<Aircraft>]| v.iter().map(|a| a.len() as u32).collect();
        DemandSeries {
            fwd: c(&self.fwd),
            rev: c(&self.rev),
        }
    }
}

#[derive(Debug, Clone)]
pub struct DispatchResult {
    pub demand: DemandSeries,
    /// One per input trip, in input order.
    pub outcomes: Vec<PassengerOutcome>,
    pub provenance: DemandProvenance,
    /// Aircraft whose corridor entry falls past the horizon.
    pub dropped_aircraft: usize,
}

impl DispatchResult {
    pub fn aircraft(&self) -> impl Iterator<Item = &Aircraft> {
        self.provenance
            .fwd
            .iter()
            .chain(&self.provenance.rev)
            .flatten()
    }
}

/// Slot-stepped queue simulation, one FIFO queue per direction.
///
/// Each slot: arrivals join in `(arrival slot, trip_id)` order; aircraft
/// depart while at least `min_load` passengers wait, each taking up to `cap`
/// from the front; then anyone who has already waited `max_wait_slots`
/// slots gives up and drives. An aircraft dispatched at `t` enters the
/// corridor at `t + entry_offset_slots`.
pub fn simulate_dispatch(
    trips: &TripCollection,
    params: &DispatchParams,
    spec: &CorridorSpec,
) -> Result<DispatchResult> {
    params.validate()?;
    spec.validate()?;
    let outside: Vec<String> = trips
        .iter()
        .filter(|t| {
            !spec.contains_time(t.depart_minutes) || !spec.contains_time(t.vertiport_arrival())
        })
        .map(|t| t.trip_id.clone())
        .collect();
    if !outside.is_empty() {
        return Err(Error::OutsideWindow(outside));
    }

    let all = trips.trips();
    let mut outcomes: Vec<Option<PassengerOutcome>> = vec![None; all.len()];
    let mut demand = DemandSeries::zeros(spec.horizon);
    let mut provenance = DemandProvenance {
        fwd: vec![Vec::new(); spec.horizon],
        rev: vec![Vec::new(); spec.horizon],
    };
    let mut dropped = 0usize;

    for dir in Direction::BOTH {
        let mut arrivals: Vec<(usize, usize)> = all
            .iter()
            .enumerate()
            .filter(|(_, t)| t.direction == dir)
            .map(|(i, t)| {
                let slot = spec
                    .slot_of(t.vertiport_arrival())
                    .expect("arrival checked against the window");
                (slot, i)
            })
            .collect();
        arrivals.sort_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| all[a.1].trip_id.cmp(&all[b.1].trip_id))
        });
        if arrivals.is_empty() {
            continue;
        }

        let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
        let mut next = 0;
        let mut slot = arrivals[0].0;
        while next < arrivals.len() || !queue.is_empty() {
            while next < arrivals.len() && arrivals[next].0 == slot {
                queue.push_back(arrivals[next]);
                next += 1;
            }
            while queue.len() >= params.min_load as usize {
                let load = queue.len().min(params.cap as usize);
                let mut ids = Vec::with_capacity(load);
                for (arrived, idx) in queue.drain(..load) {
                    ids.push(all[idx].trip_id.clone());
                    outcomes[idx] = Some(PassengerOutcome {
                        trip_id: all[idx].trip_id.clone(),
                        status: PassengerStatus::ServedUam,
                        board_slot: Some(slot),
                        wait_slots: (slot - arrived) as u32,
                    });
                }
                let corridor_slot = slot + params.entry_offset_slots as usize;
                if corridor_slot < spec.horizon {
                    demand.get_mut(dir)[corridor_slot] += 1;
                    let aircraft = Aircraft {
                        dispatch_slot: slot,
                        corridor_slot,
                        trip_ids: ids,
                    };
                    match dir {
                        Direction::Fwd => provenance.fwd[corridor_slot].push(aircraft),
                        Direction::Rev => provenance.rev[corridor_slot].push(aircraft),
                    }
                } else {
                    dropped += 1;
                }
            }
            while let Some(&(arrived, idx)) = queue.front() {
                let waited = slot - arrived;
                if waited < params.max_wait_slots as usize {
                    break;
                }
                queue.pop_front();
                outcomes[idx] = Some(PassengerOutcome {
                    trip_id: all[idx].trip_id.clone(),
                    status: PassengerStatus::SpilledWait,
                    board_slot: None,
                    wait_slots: waited as u32,
                });
            }
            slot = match (queue.is_empty(), arrivals.get(next)) {
                (true, Some(&(s, _))) => s,
                _ => slot + 1,
            };
        }
    }
    if dropped > 0 {
        warn!("{dropped} aircraft would enter the corridor after the horizon; dropped from demand");
    }

    Ok(DispatchResult {
        demand,
        outcomes: outcomes
            .into_iter()
            .map(|o| o.expect("every trip resolves"))
            .collect(),
        provenance,
        dropped_aircraft: dropped,
    })
}

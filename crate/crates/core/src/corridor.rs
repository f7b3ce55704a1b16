//! Corridor, demand and schedule types plus the pure functions that derive
//! lane events, check the flush-aware capacity budget and price a schedule.
//!
//! Slots are indexed `0..horizon`. The initial state describes slot `-1`;
//! deactivation history covers slots `-flush_slots..=-1`.
//!
//! A lane deactivated at slot `t` stops serving at `t` and flushes during
//! `t..t + flush_slots`; it rejoins the idle pool at `t + flush_slots`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cost::{CostWeights, ExactCost, ExactWeights, PenaltyCounts};
use crate::error::{config_err, Error, Result};

pub const MINUTES_PER_DAY: u32 = 1440;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `node_i -> node_j`.
    Fwd,
    /// `node_j -> node_i`.
    Rev,
}

impl Direction {
    pub const BOTH: [Direction; 2] = [Direction::Fwd, Direction::Rev];

    pub fn flip(self) -> Self {
        match self {
            Direction::Fwd => Direction::Rev,
            Direction::Rev => Direction::Fwd,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Fwd => "fwd",
            Direction::Rev => "rev",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fwd" => Ok(Direction::Fwd),
            "rev" => Ok(Direction::Rev),
            other => Err(config_err(format!("unknown direction {other:?}"))),
        }
    }
}

/// Physical and temporal parameters of one bi-directional corridor.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorridorSpec {
    pub node_i: String,
    pub node_j: String,
    pub lane_count: u32,
    /// Aircraft per slot per active lane.
    pub lane_throughput: u32,
    pub flush_slots: u32,
    pub slot_minutes: u32,
    pub horizon: usize,
    /// Clock time of slot 0, minutes since midnight.
    pub horizon_start: u32,
}

impl CorridorSpec {
    /// CC-SV corridor: 6 lanes of 6 aircraft/slot, 2-slot flush, 10-minute
    /// slots from 04:00 to 24:00.
    pub fn reference() -> Self {
        Self {
            node_i: "CC".into(),
            node_j: "SV".into(),
            lane_count: 6,
            lane_throughput: 6,
            flush_slots: 2,
            slot_minutes: 10,
            horizon: 120,
            horizon_start: 240,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lane_count < 1 {
            return Err(config_err("lane_count must be >= 1"));
        }
        if self.lane_throughput < 1 {
            return Err(config_err("lane_throughput must be >= 1"));
        }
        if self.horizon < 1 {
            return Err(config_err("horizon must be >= 1"));
        }
        if self.slot_minutes < 1 {
            return Err(config_err("slot_minutes must be > 0"));
        }
        if self.horizon_start >= MINUTES_PER_DAY {
            return Err(config_err("horizon_start must lie within one day"));
        }
        if self.horizon as u64 * self.slot_minutes as u64 > MINUTES_PER_DAY as u64 {
            return Err(config_err("horizon must fit within one operating day"));
        }
        if self.node_i == self.node_j {
            return Err(config_err("corridor endpoints must differ"));
        }
        Ok(())
    }

    pub fn with_lane_count(&self, lane_count: u32) -> Self {
        Self {
            lane_count,
            ..self.clone()
        }
    }

    pub fn horizon_end(&self) -> u32 {
        self.horizon_start + self.horizon as u32 * self.slot_minutes
    }

    /// Clock minute at which `slot` opens.
    pub fn slot_start(&self, slot: usize) -> u32 {
        self.horizon_start + slot as u32 * self.slot_minutes
    }

    /// Slot containing clock time `minutes`, which may lie past the horizon.
    /// `None` before the horizon opens.
    pub fn slot_of(&self, minutes: f64) -> Option<usize> {
        let offset = minutes - self.horizon_start as f64;
        if offset < 0.0 || !offset.is_finite() {
            return None;
        }
        Some((offset / self.slot_minutes as f64).floor() as usize)
    }

    pub fn contains_time(&self, minutes: f64) -> bool {
        minutes >= self.horizon_start as f64 && minutes < self.horizon_end() as f64
    }

    pub fn endpoint(&self, dir: Direction) -> (&str, &str) {
        match dir {
            Direction::Fwd => (&self.node_i, &self.node_j),
            Direction::Rev => (&self.node_j, &self.node_i),
        }
    }
}

impl Default for CorridorSpec {
    fn default() -> Self {
        Self::reference()
    }
}

/// Formats minutes since midnight as `HH:MM`. 24:00 is allowed.
pub fn format_clock(minutes: u32) -> String {
    format!("{:02}:{:02}", minutes / 60, minutes % 60)
}

pub fn parse_clock(s: &str) -> Result<u32> {
    let (h, m) = s
        .split_once(':')
        .ok_or_else(|| config_err(format!("expected HH:MM, got {s:?}")))?;
    let h: u32 = h
        .trim()
        .parse()
        .map_err(|_| config_err(format!("bad hour in {s:?}")))?;
    let m: u32 = m
        .trim()
        .parse()
        .map_err(|_| config_err(format!("bad minute in {s:?}")))?;
    if m >= 60 || h > 24 || (h == 24 && m > 0) {
        return Err(config_err(format!("clock time out of range: {s:?}")));
    }
    Ok(h * 60 + m)
}

/// Aircraft demand per slot and direction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DemandSeries {
    pub fwd: Vec<u32>,
    pub rev: Vec<u32>,
}

impl DemandSeries {
    pub fn new(fwd: Vec<u32>, rev: Vec<u32>) -> Result<Self> {
        if fwd.len() != rev.len() {
            return Err(Error::Dimension {
                what: "demand rev",
                expected: fwd.len(),
                found: rev.len(),
            });
        }
        Ok(Self { fwd, rev })
    }

    pub fn zeros(horizon: usize) -> Self {
        Self {
            fwd: vec![0; horizon],
            rev: vec![0; horizon],
        }
    }

    pub fn len(&self) -> usize {
        self.fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fwd.is_empty()
    }

    pub fn get(&self, dir: Direction) -> &[u32] {
        match dir {
            Direction::Fwd => &self.fwd,
            Direction::Rev => &self.rev,
        }
    }

    pub fn get_mut(&mut self, dir: Direction) -> &mut Vec<u32> {
        match dir {
            Direction::Fwd => &mut self.fwd,
            Direction::Rev => &mut self.rev,
        }
    }

    pub fn total(&self) -> u64 {
        self.fwd.iter().chain(&self.rev).map(|&x| x as u64).sum()
    }

    pub fn swapped(&self) -> Self {
        Self {
            fwd: self.rev.clone(),
            rev: self.fwd.clone(),
        }
    }

    pub fn check_horizon(&self, spec: &CorridorSpec) -> Result<()> {
        check_len("demand fwd", spec.horizon, self.fwd.len())?;
        check_len("demand rev", spec.horizon, self.rev.len())
    }
}

/// Active lane counts per slot and direction. Events are always derived.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LaneSchedule {
    pub y_fwd: Vec<u32>,
    pub y_rev: Vec<u32>,
}

impl LaneSchedule {
    pub fn new(y_fwd: Vec<u32>, y_rev: Vec<u32>) -> Result<Self> {
        if y_fwd.len() != y_rev.len() {
            return Err(Error::Dimension {
                what: "schedule y_rev",
                expected: y_fwd.len(),
                found: y_rev.len(),
            });
        }
        Ok(Self { y_fwd, y_rev })
    }

    pub fn constant(horizon: usize, fwd: u32, rev: u32) -> Self {
        Self {
            y_fwd: vec![fwd; horizon],
            y_rev: vec![rev; horizon],
        }
    }

    pub fn len(&self) -> usize {
        self.y_fwd.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y_fwd.is_empty()
    }

    pub fn get(&self, dir: Direction) -> &[u32] {
        match dir {
            Direction::Fwd => &self.y_fwd,
            Direction::Rev => &self.y_rev,
        }
    }

    pub fn swapped(&self) -> Self {
        Self {
            y_fwd: self.y_rev.clone(),
            y_rev: self.y_fwd.clone(),
        }
    }

    pub fn active_lane_slots(&self) -> u64 {
        self.y_fwd
            .iter()
            .chain(&self.y_rev)
            .map(|&x| x as u64)
            .sum()
    }

    pub fn check_horizon(&self, spec: &CorridorSpec) -> Result<()> {
        check_len("schedule y_fwd", spec.horizon, self.y_fwd.len())?;
        check_len("schedule y_rev", spec.horizon, self.y_rev.len())
    }
}

/// Corridor state when the planning window opens.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialState {
    pub y0_fwd: u32,
    pub y0_rev: u32,
    /// Deactivations at slots `-flush_slots..=-1`, oldest first. Empty means
    /// no recent deactivations.
    #[serde(default)]
    pub v_history_fwd: Vec<u32>,
    #[serde(default)]
    pub v_history_rev: Vec<u32>,
}

impl InitialState {
    /// All lanes idle, nothing flushing.
    pub fn idle() -> Self {
        Self::default()
    }

    pub fn y0(&self, dir: Direction) -> u32 {
        match dir {
            Direction::Fwd => self.y0_fwd,
            Direction::Rev => self.y0_rev,
        }
    }

    /// Total deactivations at slot `k < 0`; zero outside the recorded window.
    pub fn history_total(&self, spec: &CorridorSpec, k: i64) -> u32 {
        debug_assert!(k < 0);
        let idx = k + spec.flush_slots as i64;
        if idx < 0 {
            return 0;
        }
        let at = |h: &[u32]| h.get(idx as usize).copied().unwrap_or(0);
        at(&self.v_history_fwd) + at(&self.v_history_rev)
    }

    /// Lanes that are flushing at the first slot because of deactivations
    /// before the horizon.
    pub fn carried_flush(&self, spec: &CorridorSpec, slot: usize) -> u32 {
        let tau = spec.flush_slots as i64;
        let lo = slot as i64 - tau + 1;
        (lo..0).map(|k| self.history_total(spec, k)).sum()
    }

    pub fn validate(&self, spec: &CorridorSpec) -> Result<()> {
        let tau = spec.flush_slots as usize;
        for (name, h) in [
            ("v_history_fwd", &self.v_history_fwd),
            ("v_history_rev", &self.v_history_rev),
        ] {
            if !h.is_empty() && h.len() != tau {
                return Err(Error::Dimension {
                    what: if name == "v_history_fwd" {
                        "v_history_fwd"
                    } else {
                        "v_history_rev"
                    },
                    expected: tau,
                    found: h.len(),
                });
            }
        }
        let hist: u64 = self
            .v_history_fwd
            .iter()
            .chain(&self.v_history_rev)
            .map(|&x| x as u64)
            .sum();
        let used = self.y0_fwd as u64 + self.y0_rev as u64 + hist;
        if used > spec.lane_count as u64 {
            return Err(config_err(format!(
                "initial state occupies {used} lanes but the corridor has {}",
                spec.lane_count
            )));
        }
        Ok(())
    }
}

/// Activations and deactivations per slot and direction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleEvents {
    pub a_fwd: Vec<u32>,
    pub a_rev: Vec<u32>,
    pub v_fwd: Vec<u32>,
    pub v_rev: Vec<u32>,
}

impl ScheduleEvents {
    pub fn activations(&self, dir: Direction) -> &[u32] {
        match dir {
            Direction::Fwd => &self.a_fwd,
            Direction::Rev => &self.a_rev,
        }
    }

    pub fn deactivations(&self, dir: Direction) -> &[u32] {
        match dir {
            Direction::Fwd => &self.v_fwd,
            Direction::Rev => &self.v_rev,
        }
    }

    pub fn total_deactivations(&self) -> u64 {
        self.v_fwd
            .iter()
            .chain(&self.v_rev)
            .map(|&x| x as u64)
            .sum()
    }

    pub fn deactivations_at(&self, slot: usize) -> u32 {
        self.v_fwd[slot] + self.v_rev[slot]
    }
}

/// Capacity/demand mismatch of one slot in one direction.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SlotOutcome {
    pub shortfall: u32,
    pub waste: u32,
    pub served: u32,
}

impl SlotOutcome {
    #[inline]
    pub fn new(demand: u32, capacity: u32) -> Self {
        Self {
            shortfall: demand.saturating_sub(capacity),
            waste: capacity.saturating_sub(demand),
            served: demand.min(capacity),
        }
    }
}

/// A breach of the corridor's lane budget.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// Active plus flushing lanes exceed the lane count.
    Capacity {
        slot: usize,
        active: u32,
        flushing: u32,
        lane_count: u32,
    },
    /// More lanes activated than were idle going into the slot.
    IdlePool {
        slot: usize,
        direction: Direction,
        activations: u32,
        idle: i64,
    },
}

impl Violation {
    pub fn slot(&self) -> usize {
        match self {
            Violation::Capacity { slot, .. } | Violation::IdlePool { slot, .. } => *slot,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Capacity {
                slot,
                active,
                flushing,
                lane_count,
            } => write!(
                f,
                "slot {slot}: {active} active + {flushing} flushing > {lane_count} lanes"
            ),
            Violation::IdlePool {
                slot,
                direction,
                activations,
                idle,
            } => write!(
                f,
                "slot {slot}: {activations} {direction} activation(s) with only {idle} idle lane(s)"
            ),
        }
    }
}

fn check_len(what: &'static str, expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::Dimension {
            what,
            expected,
            found,
        });
    }
    Ok(())
}

/// Minimal activation/deactivation decomposition of a schedule.
pub fn derive_events(schedule: &LaneSchedule, init: &InitialState) -> ScheduleEvents {
    let split = |y: &[u32], y0: u32| {
        let mut prev = y0;
        let mut a = Vec::with_capacity(y.len());
        let mut v = Vec::with_capacity(y.len());
        for &cur in y {
            a.push(cur.saturating_sub(prev));
            v.push(prev.saturating_sub(cur));
            prev = cur;
        }
        (a, v)
    };
    let (a_fwd, v_fwd) = split(&schedule.y_fwd, init.y0_fwd);
    let (a_rev, v_rev) = split(&schedule.y_rev, init.y0_rev);
    ScheduleEvents {
        a_fwd,
        a_rev,
        v_fwd,
        v_rev,
    }
}

/// [`derive_events`] with the horizon length checked against `spec`.
pub fn derive_events_checked(
    schedule: &LaneSchedule,
    spec: &CorridorSpec,
    init: &InitialState,
) -> Result<ScheduleEvents> {
    schedule.check_horizon(spec)?;
    Ok(derive_events(schedule, init))
}

/// Lanes flushing at `slot`: deactivations in `slot - tau + 1 ..= slot`.
fn flushing_at(
    events: &ScheduleEvents,
    spec: &CorridorSpec,
    init: &InitialState,
    slot: usize,
    include_current: bool,
) -> u32 {
    let tau = spec.flush_slots as i64;
    let hi = if include_current {
        slot as i64
    } else {
        slot as i64 - 1
    };
    (slot as i64 - tau + 1..=hi)
        .map(|k| {
            if k < 0 {
                init.history_total(spec, k)
            } else {
                events.deactivations_at(k as usize)
            }
        })
        .sum()
}

/// Every slot at which the schedule breaks the lane budget. Empty iff the
/// schedule is feasible.
///
/// The schedule's length is not checked here; mismatched lengths are
/// reported as capacity data only up to the shorter of the two.
pub fn check_feasibility(
    schedule: &LaneSchedule,
    spec: &CorridorSpec,
    init: &InitialState,
) -> Vec<Violation> {
    let events = derive_events(schedule, init);
    let lanes = spec.lane_count;
    let mut out = Vec::new();
    let (mut prev_f, mut prev_r) = (init.y0_fwd, init.y0_rev);
    for t in 0..schedule.len() {
        let (yf, yr) = (schedule.y_fwd[t], schedule.y_rev[t]);
        let flushing = flushing_at(&events, spec, init, t, true);
        if yf + yr + flushing > lanes {
            out.push(Violation::Capacity {
                slot: t,
                active: yf + yr,
                flushing,
                lane_count: lanes,
            });
        }

        // Activations draw only on lanes that are neither active nor
        // flushing. With no flush window a lane released this slot is idle
        // immediately.
        let mut idle = lanes as i64
            - prev_f as i64
            - prev_r as i64
            - flushing_at(&events, spec, init, t, false) as i64;
        if spec.flush_slots == 0 {
            idle += events.deactivations_at(t) as i64;
        }
        for dir in Direction::BOTH {
            let act = events.activations(dir)[t];
            if act > 0 && act as i64 > idle {
                out.push(Violation::IdlePool {
                    slot: t,
                    direction: dir,
                    activations: act,
                    idle,
                });
            }
        }
        prev_f = yf;
        prev_r = yr;
    }
    out
}

/// Per-slot outcomes for both directions: `(fwd, rev)`.
pub fn slot_outcomes(
    schedule: &LaneSchedule,
    demand: &DemandSeries,
    spec: &CorridorSpec,
) -> Vec<(SlotOutcome, SlotOutcome)> {
    let k = spec.lane_throughput;
    (0..schedule.len())
        .map(|t| {
            (
                SlotOutcome::new(demand.fwd[t], k * schedule.y_fwd[t]),
                SlotOutcome::new(demand.rev[t], k * schedule.y_rev[t]),
            )
        })
        .collect()
}

/// Integer penalty totals of a schedule.
pub fn penalty_counts(
    schedule: &LaneSchedule,
    demand: &DemandSeries,
    spec: &CorridorSpec,
    init: &InitialState,
) -> Result<PenaltyCounts> {
    schedule.check_horizon(spec)?;
    demand.check_horizon(spec)?;
    let events = derive_events(schedule, init);
    let mut counts = PenaltyCounts::default();
    for (fwd, rev) in slot_outcomes(schedule, demand, spec) {
        counts.shortfall += fwd.shortfall as u64 + rev.shortfall as u64;
        counts.waste += fwd.waste as u64 + rev.waste as u64;
    }
    counts.deactivations = events.total_deactivations();
    Ok(counts)
}

/// Exact weighted objective.
pub fn objective_exact(
    schedule: &LaneSchedule,
    demand: &DemandSeries,
    weights: &ExactWeights,
    spec: &CorridorSpec,
    init: &InitialState,
) -> Result<ExactCost> {
    Ok(weights.cost(penalty_counts(schedule, demand, spec, init)?))
}

/// Weighted sum of shortfall, deactivations and waste over the horizon.
pub fn objective(
    schedule: &LaneSchedule,
    demand: &DemandSeries,
    weights: &CostWeights,
    spec: &CorridorSpec,
    init: &InitialState,
) -> Result<f64> {
    let exact = ExactWeights::new(weights)?;
    Ok(exact.to_f64(objective_exact(schedule, demand, &exact, spec, init)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn spec(lanes: u32, k: u32, tau: u32, horizon: usize) -> CorridorSpec {
        CorridorSpec {
            lane_count: lanes,
            lane_throughput: k,
            flush_slots: tau,
            horizon,
            ..CorridorSpec::reference()
        }
    }

    fn init(yf: u32, yr: u32) -> InitialState {
        InitialState {
            y0_fwd: yf,
            y0_rev: yr,
            ..Default::default()
        }
    }

    #[test]
    fn constant_schedule_has_no_events() {
        let s = LaneSchedule::new(vec![2, 2, 2], vec![0, 0, 0]).unwrap();
        let e = derive_events(&s, &init(2, 0));
        assert_eq!(e.a_fwd, vec![0, 0, 0]);
        assert_eq!(e.v_fwd, vec![0, 0, 0]);
    }

    #[test]
    fn events_follow_max_decomposition() {
        let s = LaneSchedule::new(vec![3, 1, 1], vec![0, 0, 0]).unwrap();
        let e = derive_events(&s, &init(0, 0));
        assert_eq!(e.a_fwd, vec![3, 0, 0]);
        assert_eq!(e.v_fwd, vec![0, 2, 0]);
    }

    #[test]
    fn derive_events_checked_rejects_wrong_length() {
        let s = LaneSchedule::constant(3, 0, 0);
        let err = derive_events_checked(&s, &spec(2, 1, 1, 4), &init(0, 0)).unwrap_err();
        assert!(matches!(
            err,
            Error::Dimension {
                expected: 4,
                found: 3,
                ..
            }
        ));
    }

    #[test]
    fn flush_window_example() {
        // L=2, tau=2, y0=(1,1). Slot 0 holds, slot 1 drops fwd.
        let sp = spec(2, 1, 2, 3);
        let ok = LaneSchedule::new(vec![1, 0, 0], vec![1, 1, 1]).unwrap();
        assert!(check_feasibility(&ok, &sp, &init(1, 1)).is_empty());

        let bad = LaneSchedule::new(vec![1, 0, 1], vec![1, 1, 1]).unwrap();
        let v = check_feasibility(&bad, &sp, &init(1, 1));
        assert!(v.iter().all(|x| x.slot() == 2));
        assert!(v.iter().any(|x| matches!(
            x,
            Violation::IdlePool {
                direction: Direction::Fwd,
                activations: 1,
                idle: 0,
                ..
            }
        )));
        assert!(v.iter().any(|x| matches!(x, Violation::Capacity { .. })));
    }

    #[test]
    fn all_zero_schedule_is_feasible() {
        let sp = spec(3, 2, 2, 5);
        let s = LaneSchedule::constant(5, 0, 0);
        assert!(check_feasibility(&s, &sp, &init(0, 0)).is_empty());
    }

    #[test]
    fn deactivated_lane_returns_after_tau_slots() {
        // L=1, tau=2: fwd lane dropped at slot 1 flushes during 1 and 2.
        let sp = spec(1, 1, 2, 4);
        let too_early = LaneSchedule::new(vec![1, 0, 0, 0], vec![0, 0, 1, 1]).unwrap();
        let v = check_feasibility(&too_early, &sp, &init(0, 0));
        assert_eq!(v.iter().map(Violation::slot).min(), Some(2));

        let on_time = LaneSchedule::new(vec![1, 0, 0, 0], vec![0, 0, 0, 1]).unwrap();
        assert!(check_feasibility(&on_time, &sp, &init(0, 0)).is_empty());
    }

    #[test]
    fn zero_flush_allows_same_slot_reversal() {
        let sp = spec(1, 1, 0, 2);
        let s = LaneSchedule::new(vec![1, 0], vec![0, 1]).unwrap();
        assert!(check_feasibility(&s, &sp, &init(0, 0)).is_empty());
    }

    #[test]
    fn history_counts_against_capacity() {
        let sp = spec(2, 1, 2, 2);
        let st = InitialState {
            y0_fwd: 1,
            y0_rev: 0,
            v_history_fwd: vec![0, 1],
            v_history_rev: vec![0, 0],
        };
        st.validate(&sp).unwrap();
        // The lane deactivated at slot -1 still flushes at slot 0.
        let s = LaneSchedule::new(vec![1, 1], vec![1, 1]).unwrap();
        let v = check_feasibility(&s, &sp, &st);
        assert_eq!(
            v.iter().map(Violation::slot).collect::<Vec<_>>(),
            vec![0, 0]
        );
        let later = LaneSchedule::new(vec![1, 1], vec![0, 1]).unwrap();
        assert!(check_feasibility(&later, &sp, &st).is_empty());
    }

    #[test]
    fn initial_state_over_budget_is_rejected() {
        let sp = spec(2, 1, 1, 2);
        let st = InitialState {
            y0_fwd: 2,
            y0_rev: 0,
            v_history_fwd: vec![1],
            v_history_rev: vec![0],
        };
        assert!(st.validate(&sp).is_err());
        let wrong_len = InitialState {
            v_history_fwd: vec![0, 0],
            ..Default::default()
        };
        assert!(wrong_len.validate(&sp).is_err());
    }

    #[test]
    fn objective_zero_when_idle_and_no_demand() {
        let sp = spec(2, 6, 2, 4);
        let z = objective(
            &LaneSchedule::constant(4, 0, 0),
            &DemandSeries::zeros(4),
            &CostWeights::reference(),
            &sp,
            &init(0, 0),
        )
        .unwrap();
        assert_eq!(z, 0.0);
    }

    #[test]
    fn objective_single_slot_shortfall() {
        let sp = spec(6, 6, 2, 1);
        let z = objective(
            &LaneSchedule::new(vec![1], vec![0]).unwrap(),
            &DemandSeries::new(vec![10], vec![0]).unwrap(),
            &CostWeights::reference(),
            &sp,
            &init(1, 0),
        )
        .unwrap();
        assert_eq!(z, 4.0);
    }

    #[test]
    fn objective_charges_only_deactivations() {
        let sp = spec(2, 1, 1, 2);
        let w = CostWeights::new(0.0, 1.0, 0.0).unwrap();
        let d = DemandSeries::zeros(2);
        let up = LaneSchedule::new(vec![2, 2], vec![0, 0]).unwrap();
        assert_eq!(objective(&up, &d, &w, &sp, &init(0, 0)).unwrap(), 0.0);
        let down = LaneSchedule::new(vec![1, 0], vec![0, 0]).unwrap();
        assert_eq!(objective(&down, &d, &w, &sp, &init(2, 0)).unwrap(), 2.0);
    }

    #[test]
    fn objective_rejects_dimension_mismatch() {
        let sp = spec(2, 1, 1, 3);
        let r = objective(
            &LaneSchedule::constant(3, 0, 0),
            &DemandSeries::zeros(2),
            &CostWeights::reference(),
            &sp,
            &init(0, 0),
        );
        assert!(matches!(r, Err(Error::Dimension { .. })));
    }

    #[test]
    fn clock_roundtrip() {
        assert_eq!(format_clock(240), "04:00");
        assert_eq!(format_clock(1440), "24:00");
        assert_eq!(parse_clock("19:30").unwrap(), 1170);
        assert!(parse_clock("24:01").is_err());
        assert!(parse_clock("7").is_err());
    }

    #[test]
    fn spec_validation() {
        CorridorSpec::reference().validate().unwrap();
        let mut s = CorridorSpec::reference();
        s.horizon = 200;
        assert!(s.validate().is_err());
        let mut s = CorridorSpec::reference();
        s.lane_count = 0;
        assert!(s.validate().is_err());
    }

    /// `(lanes, y_fwd, y_rev, F_fwd, F_rev, y0_fwd, y0_rev)`.
    type Case = (u32, Vec<u32>, Vec<u32>, Vec<u32>, Vec<u32>, u32, u32);

    fn arb_case() -> impl Strategy<Value = Case> {
        (1u32..5, 1usize..10).prop_flat_map(|(lanes, t)| {
            (
                Just(lanes),
                prop::collection::vec(0..=lanes, t),
                prop::collection::vec(0..=lanes, t),
                prop::collection::vec(0u32..20, t),
                prop::collection::vec(0u32..20, t),
                0..=lanes,
                0..=lanes,
            )
        })
    }

    proptest! {
        #[test]
        fn events_are_minimal_and_consistent((_, yf, yr, _, _, y0f, y0r) in arb_case()) {
            let s = LaneSchedule::new(yf, yr).unwrap();
            let st = init(y0f, y0r);
            let e = derive_events(&s, &st);
            for dir in Direction::BOTH {
                let mut prev = st.y0(dir);
                for (t, &y) in s.get(dir).iter().enumerate() {
                    let (a, v) = (e.activations(dir)[t], e.deactivations(dir)[t]);
                    prop_assert_eq!(a.min(v), 0);
                    prop_assert_eq!(prev + a - v, y);
                    prev = y;
                }
            }
        }

        #[test]
        fn conservation_and_complementarity((lanes, yf, yr, df, dr, _a, _b) in arb_case()) {
            let sp = spec(lanes, 3, 1, yf.len());
            let s = LaneSchedule::new(yf, yr).unwrap();
            let d = DemandSeries::new(df, dr).unwrap();
            for (t, (f, r)) in slot_outcomes(&s, &d, &sp).into_iter().enumerate() {
                for (o, dem, y) in [(f, d.fwd[t], s.y_fwd[t]), (r, d.rev[t], s.y_rev[t])] {
                    prop_assert_eq!(o.served + o.shortfall, dem);
                    prop_assert_eq!(o.served + o.waste, 3 * y);
                    prop_assert_eq!(o.shortfall.min(o.waste), 0);
                }
            }
        }

        #[test]
        fn objective_invariant_under_direction_swap((lanes, yf, yr, df, dr, y0f, y0r) in arb_case()) {
            let sp = spec(lanes, 2, 2, yf.len());
            let s = LaneSchedule::new(yf, yr).unwrap();
            let d = DemandSeries::new(df, dr).unwrap();
            let w = CostWeights::reference();
            let st = init(y0f, y0r);
            let swapped_init = init(y0r, y0f);
            let z = objective(&s, &d, &w, &sp, &st).unwrap();
            let z_swapped = objective(&s.swapped(), &d.swapped(), &w, &sp, &swapped_init).unwrap();
            prop_assert_eq!(z, z_swapped);
        }
    }
}

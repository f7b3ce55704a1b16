//! Baseline lane-allocation policies.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corridor::{format_clock, parse_clock, CorridorSpec, DemandSeries, LaneSchedule};
use crate::error::{config_err, Result};

/// Clock time serialised as `HH:MM`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ClockTime(pub u32);

impl Serialize for ClockTime {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_clock(self.0))
    }
}

impl<'de> Deserialize<'de> for ClockTime {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_clock(&s)
            .map(ClockTime)
            .map_err(serde::de::Error::custom)
    }
}

/// One block of an operator time-of-day schedule, `[start, end)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Block {
    pub start: ClockTime,
    pub end: ClockTime,
    pub fwd: u32,
    pub rev: u32,
}

impl Block {
    pub fn new(start: &str, end: &str, fwd: u32, rev: u32) -> Result<Self> {
        Ok(Self {
            start: ClockTime(parse_clock(start)?),
            end: ClockTime(parse_clock(end)?),
            fwd,
            rev,
        })
    }

    fn contains(&self, minute: u32) -> bool {
        self.start.0 <= minute && minute < self.end.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct BlockSchedule(pub Vec<Block>);

impl BlockSchedule {
    /// Morning: five lanes SV-bound, one CC-bound. Afternoon reverses.
    /// Evening runs three and three.
    pub fn reference() -> Self {
        let b = |s, e, f, r| Block::new(s, e, f, r).expect("valid literal");
        Self(vec![
            b("04:00", "12:00", 5, 1),
            b("12:00", "19:00", 1, 5),
            b("19:00", "24:00", 3, 3),
        ])
    }

    /// Blocks must be non-empty, ordered, non-overlapping and within the
    /// lane budget.
    pub fn validate(&self, lane_count: u32) -> Result<()> {
        if self.0.is_empty() {
            return Err(config_err("block schedule is empty"));
        }
        for (i, b) in self.0.iter().enumerate() {
            if b.start >= b.end {
                return Err(config_err(format!("block {i} ends before it starts")));
            }
            if b.fwd + b.rev > lane_count {
                return Err(config_err(format!(
                    "block {i} uses {} lanes but the corridor has {lane_count}",
                    b.fwd + b.rev
                )));
            }
            if i > 0 && self.0[i - 1].end > b.start {
                return Err(config_err(format!("block {i} overlaps its predecessor")));
            }
        }
        Ok(())
    }
}

impl Default for BlockSchedule {
    fn default() -> Self {
        Self::reference()
    }
}

/// `floor(L / 2)` lanes each way, every slot.
pub fn fixed_split_schedule(spec: &CorridorSpec) -> LaneSchedule {
    let half = spec.lane_count / 2;
    LaneSchedule::constant(spec.horizon, half, half)
}

/// Each slot takes the allocation of the block containing its start time.
pub fn fixed_asymmetric_schedule(
    spec: &CorridorSpec,
    blocks: &BlockSchedule,
) -> Result<LaneSchedule> {
    blocks.validate(spec.lane_count)?;
    let mut y_fwd = Vec::with_capacity(spec.horizon);
    let mut y_rev = Vec::with_capacity(spec.horizon);
    for t in 0..spec.horizon {
        let minute = spec.slot_start(t);
        let b = blocks
            .0
            .iter()
            .find(|b| b.contains(minute))
            .ok_or_else(|| {
                config_err(format!(
                    "slot {t} ({}) is not covered by any block",
                    format_clock(minute)
                ))
            })?;
        y_fwd.push(b.fwd);
        y_rev.push(b.rev);
    }
    LaneSchedule::new(y_fwd, y_rev)
}

/// `round(L * F_fwd / (F_fwd + F_rev))` lanes forward, the rest reverse,
/// rounding half away from zero. Slots without demand repeat the previous
/// allocation; slot 0 falls back to the even split. Flush time is ignored.
pub fn greedy_reactive_schedule(
    spec: &CorridorSpec,
    demand: &DemandSeries,
) -> Result<LaneSchedule> {
    demand.check_horizon(spec)?;
    let lanes = spec.lane_count as u64;
    let mut prev = (spec.lane_count / 2, spec.lane_count / 2);
    let mut y_fwd = Vec::with_capacity(spec.horizon);
    let mut y_rev = Vec::with_capacity(spec.horizon);
    for t in 0..spec.horizon {
        let (f, r) = (demand.fwd[t] as u64, demand.rev[t] as u64);
        let total = f + r;
        if total > 0 {
            // floor(x + 1/2) with x = L f / total, in integers.
            let fwd = ((2 * lanes * f + total) / (2 * total)) as u32;
            prev = (fwd, spec.lane_count - fwd);
        }
        y_fwd.push(prev.0);
        y_rev.push(prev.1);
    }
    LaneSchedule::new(y_fwd, y_rev)
}

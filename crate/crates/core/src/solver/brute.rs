//! Exhaustive enumeration of lane schedules.
//!
//! Walks every sequence of `(y_fwd, y_rev)` pairs depth-first, keeping the
//! full deactivation history explicitly and abandoning a prefix as soon as
//! the lane budget breaks. Nothing here shares state encoding with the
//! dynamic program.

use std::cmp::Ordering;

use super::{lex_schedule, RankKey};
use crate::corridor::{CorridorSpec, DemandSeries, InitialState, LaneSchedule, SlotOutcome};
use crate::cost::ExactWeights;
use crate::error::{Error, Result};

/// Number of raw schedules `((L + 1)^2)^T`, saturating.
pub fn brute_force_size(spec: &CorridorSpec) -> u128 {
    let per_slot = (spec.lane_count as u128 + 1).pow(2);
    (0..spec.horizon).fold(1u128, |acc, _| acc.saturating_mul(per_slot))
}

struct Search<'a> {
    spec: &'a CorridorSpec,
    demand: &'a DemandSeries,
    weights: &'a ExactWeights,
    init: &'a InitialState,
    y_fwd: Vec<u32>,
    y_rev: Vec<u32>,
    /// Deactivation totals per slot so far.
    deact: Vec<u32>,
    best: Option<(RankKey, LaneSchedule)>,
}

impl Search<'_> {
    fn deactivations_at(&self, k: i64) -> u32 {
        if k < 0 {
            self.init.history_total(self.spec, k)
        } else {
            self.deact[k as usize]
        }
    }

    fn walk(&mut self, key: RankKey) {
        let t = self.y_fwd.len();
        if t == self.spec.horizon {
            let candidate = LaneSchedule {
                y_fwd: self.y_fwd.clone(),
                y_rev: self.y_rev.clone(),
            };
            let better = match &self.best {
                None => true,
                Some((k, s)) => match key.cmp(k) {
                    Ordering::Less => true,
                    Ordering::Equal => lex_schedule(&candidate, s) == Ordering::Less,
                    Ordering::Greater => false,
                },
            };
            if better {
                self.best = Some((key, candidate));
            }
            return;
        }

        let lanes = self.spec.lane_count;
        let tau = self.spec.flush_slots as i64;
        let k = self.spec.lane_throughput;
        let (prev_f, prev_r) = match t {
            0 => (self.init.y0_fwd, self.init.y0_rev),
            _ => (self.y_fwd[t - 1], self.y_rev[t - 1]),
        };
        let earlier: u32 = (t as i64 - tau + 1..t as i64)
            .map(|j| self.deactivations_at(j))
            .sum();
        for yf in 0..=lanes {
            for yr in 0..=lanes {
                let v = prev_f.saturating_sub(yf) + prev_r.saturating_sub(yr);
                let flushing = if tau > 0 { earlier + v } else { 0 };
                if yf + yr + flushing > lanes {
                    continue;
                }
                let of = SlotOutcome::new(self.demand.fwd[t], k * yf);
                let or = SlotOutcome::new(self.demand.rev[t], k * yr);
                let stage = RankKey {
                    cost: self
                        .weights
                        .stage(of.shortfall + or.shortfall, v, of.waste + or.waste),
                    deactivations: v as u64,
                    active: (yf + yr) as u64,
                };
                self.y_fwd.push(yf);
                self.y_rev.push(yr);
                self.deact.push(v);
                self.walk(key.plus(stage));
                self.y_fwd.pop();
                self.y_rev.pop();
                self.deact.pop();
            }
        }
    }
}

pub(super) fn solve(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &ExactWeights,
    init: &InitialState,
    limit: u64,
) -> Result<LaneSchedule> {
    let size = brute_force_size(spec);
    if size > u128::from(limit) {
        return Err(Error::SizeBound {
            size,
            bound: limit.into(),
        });
    }
    let mut search = Search {
        spec,
        demand,
        weights,
        init,
        y_fwd: Vec::with_capacity(spec.horizon),
        y_rev: Vec::with_capacity(spec.horizon),
        deact: Vec::with_capacity(spec.horizon),
        best: None,
    };
    search.walk(RankKey::ZERO);
    let (_, schedule) = search
        .best
        .expect("the idle schedule is feasible from a valid initial state");
    Ok(schedule)
}

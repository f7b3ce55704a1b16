//! Backward dynamic program over corridor states.
//!
//! The state after slot `t` is `(y_fwd[t], y_rev[t], d[t-tau+2..=t])` where
//! `d[k]` is the total number of lanes deactivated at slot `k`. Those are
//! exactly the lanes still flushing at slot `t + 1`. Flushing lanes are
//! fungible, so their direction is not tracked.

use std::collections::BTreeSet;

use super::RankKey;
use crate::corridor::{CorridorSpec, DemandSeries, InitialState, LaneSchedule, SlotOutcome};
use crate::cost::ExactWeights;
use crate::error::{config_err, Result};

/// Dense state spaces larger than this are refused.
const MAX_STATES: usize = 1 << 24;

struct StateSpace {
    lanes: u32,
    base: usize,
    /// Recent-deactivation slots carried in the state: `tau - 1`.
    ages: usize,
    age_block: usize,
    n_states: usize,
}

#[derive(Clone, Copy)]
struct Decoded {
    yf: u32,
    yr: u32,
    /// Lanes still flushing at the next slot from earlier deactivations.
    carry: u32,
}

impl StateSpace {
    fn new(spec: &CorridorSpec) -> Result<Self> {
        let lanes = spec.lane_count;
        let base = lanes as usize + 1;
        let ages = spec.flush_slots.saturating_sub(1) as usize;
        let age_block = (0..ages)
            .try_fold(1usize, |acc, _| acc.checked_mul(base))
            .ok_or_else(|| config_err("state space too large"))?;
        let n_states = age_block
            .checked_mul(base * base)
            .filter(|&n| n <= MAX_STATES)
            .ok_or_else(|| {
                config_err(format!(
                    "state space for L={} and flush {} exceeds {MAX_STATES} states",
                    lanes, spec.flush_slots
                ))
            })?;
        Ok(Self {
            lanes,
            base,
            ages,
            age_block,
            n_states,
        })
    }

    /// Ages are stored oldest first in base-(L+1) digits, oldest most
    /// significant.
    fn encode(&self, yf: u32, yr: u32, ages: &[u32]) -> usize {
        debug_assert_eq!(ages.len(), self.ages);
        let code = ages
            .iter()
            .fold(0usize, |acc, &a| acc * self.base + a as usize);
        (yf as usize * self.base + yr as usize) * self.age_block + code
    }

    fn decode(&self, s: usize) -> Decoded {
        let pair = s / self.age_block;
        let mut code = s % self.age_block;
        let mut carry = 0;
        for _ in 0..self.ages {
            carry += (code % self.base) as u32;
            code /= self.base;
        }
        Decoded {
            yf: (pair / self.base) as u32,
            yr: (pair % self.base) as u32,
            carry,
        }
    }

    /// Age code after appending `latest` and dropping the oldest entry.
    fn shift_ages(&self, s: usize, latest: u32) -> usize {
        if self.ages == 0 {
            return 0;
        }
        let code = s % self.age_block;
        (code % (self.age_block / self.base)) * self.base + latest as usize
    }

    fn is_valid(&self, d: Decoded) -> bool {
        d.yf + d.yr + d.carry <= self.lanes
    }
}

/// A transition out of a state at one slot.
#[derive(Clone, Copy)]
struct Move {
    yf: u32,
    yr: u32,
    next: usize,
    stage: RankKey,
}

struct Stage<'a> {
    space: &'a StateSpace,
    spec: &'a CorridorSpec,
    weights: &'a ExactWeights,
    flush_counts: bool,
    pairs: Vec<(u32, u32)>,
}

impl<'a> Stage<'a> {
    fn moves(&self, s: usize, demand_f: u32, demand_r: u32, out: &mut Vec<Move>) {
        out.clear();
        let d = self.space.decode(s);
        let k = self.spec.lane_throughput;
        for &(yf, yr) in &self.pairs {
            let deact = d.yf.saturating_sub(yf) + d.yr.saturating_sub(yr);
            let flushing = if self.flush_counts {
                d.carry + deact
            } else {
                0
            };
            if yf + yr + flushing > self.space.lanes {
                continue;
            }
            let of = SlotOutcome::new(demand_f, k * yf);
            let or = SlotOutcome::new(demand_r, k * yr);
            let stage = RankKey {
                cost: self
                    .weights
                    .stage(of.shortfall + or.shortfall, deact, of.waste + or.waste),
                deactivations: deact as u64,
                active: (yf + yr) as u64,
            };
            let ages = self.space.shift_ages(s, deact);
            let next = (yf as usize * self.space.base + yr as usize) * self.space.age_block + ages;
            out.push(Move {
                yf,
                yr,
                next,
                stage,
            });
        }
    }
}

pub(super) fn solve(
    spec: &CorridorSpec,
    demand: &DemandSeries,
    weights: &ExactWeights,
    init: &InitialState,
) -> Result<(LaneSchedule, RankKey)> {
    let space = StateSpace::new(spec)?;
    let horizon = spec.horizon;
    let lanes = spec.lane_count;
    let stage = Stage {
        space: &space,
        spec,
        weights,
        flush_counts: spec.flush_slots > 0,
        pairs: (0..=lanes)
            .flat_map(|yf| (0..=lanes - yf).map(move |yr| (yf, yr)))
            .collect(),
    };

    let valid: Vec<usize> = (0..space.n_states)
        .filter(|&s| space.is_valid(space.decode(s)))
        .collect();

    // value[t][s]: best key over slots t.. from state s after slot t-1.
    let mut value: Vec<Vec<Option<RankKey>>> = vec![vec![None; space.n_states]; horizon + 1];
    for &s in &valid {
        value[horizon][s] = Some(RankKey::ZERO);
    }
    let mut moves = Vec::with_capacity(stage.pairs.len());
    for t in (0..horizon).rev() {
        let (head, tail) = value.split_at_mut(t + 1);
        let (cur, next) = (&mut head[t], &tail[0]);
        for &s in &valid {
            stage.moves(s, demand.fwd[t], demand.rev[t], &mut moves);
            cur[s] = moves
                .iter()
                .filter_map(|m| next[m.next].map(|v| m.stage.plus(v)))
                .min();
        }
    }

    let history: Vec<u32> = (1..spec.flush_slots as i64)
        .rev()
        .map(|back| init.history_total(spec, -back))
        .collect();
    let start = space.encode(init.y0_fwd, init.y0_rev, &history);
    let best = value[0][start].expect("idle schedule is always feasible from a valid state");

    // Moves that stay on an optimal path.
    let tight = |t: usize, s: usize, moves: &mut Vec<Move>| {
        stage.moves(s, demand.fwd[t], demand.rev[t], moves);
        let target = value[t][s];
        moves.retain(|m| value[t + 1][m.next].map(|v| m.stage.plus(v)) == target);
    };

    // Pass 1: smallest y_fwd per slot among optimal continuations of every
    // prefix that is lexicographically minimal so far.
    let mut frontier: Vec<BTreeSet<usize>> = Vec::with_capacity(horizon + 1);
    frontier.push(BTreeSet::from([start]));
    let mut y_fwd = Vec::with_capacity(horizon);
    for t in 0..horizon {
        let mut min_f = u32::MAX;
        let mut reached: Vec<(u32, usize)> = Vec::new();
        for &s in &frontier[t] {
            tight(t, s, &mut moves);
            for m in &moves {
                min_f = min_f.min(m.yf);
                reached.push((m.yf, m.next));
            }
        }
        y_fwd.push(min_f);
        frontier.push(
            reached
                .into_iter()
                .filter(|&(f, _)| f == min_f)
                .map(|(_, n)| n)
                .collect(),
        );
    }

    // Pass 2: keep only frontier states that can finish with that y_fwd,
    // then pick the smallest y_rev slot by slot.
    let mut alive: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); horizon + 1];
    alive[horizon] = frontier[horizon].clone();
    for t in (0..horizon).rev() {
        let mut keep = BTreeSet::new();
        for &s in &frontier[t] {
            tight(t, s, &mut moves);
            if moves
                .iter()
                .any(|m| m.yf == y_fwd[t] && alive[t + 1].contains(&m.next))
            {
                keep.insert(s);
            }
        }
        alive[t] = keep;
    }

    let mut y_rev = Vec::with_capacity(horizon);
    let mut s = start;
    for t in 0..horizon {
        tight(t, s, &mut moves);
        let m = moves
            .iter()
            .filter(|m| m.yf == y_fwd[t] && alive[t + 1].contains(&m.next))
            .min_by_key(|m| m.yr)
            .expect("alive state has a continuation");
        y_rev.push(m.yr);
        s = m.next;
    }

    Ok((LaneSchedule { y_fwd, y_rev }, best))
}

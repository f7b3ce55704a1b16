//! Objective weights and exact cost arithmetic.
//!
//! Every penalty in the objective is an integer count (aircraft short, lanes
//! deactivated, aircraft-slots wasted). The weights are finite doubles, i.e.
//! dyadic rationals, so rescaling them onto one shared binary exponent turns
//! every weighted sum into an exact `i128`. The solver, the oracle and the
//! evaluator all go through [`ExactWeights`], which makes their objective
//! values bit-identical whenever the underlying counts agree.

use std::ops::{Add, AddAssign};

use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{config_err, Result};

/// Largest rescaled weight accepted. Leaves 37 bits of headroom for counts.
const MAX_SCALED_WEIGHT: i128 = 1 << 90;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CostWeights {
    /// Penalty per aircraft of unserved demand.
    pub c_unserved: f64,
    /// Penalty per lane deactivation.
    pub c_switch: f64,
    /// Penalty per aircraft-slot of unused capacity.
    pub c_waste: f64,
}

impl CostWeights {
    pub fn new(c_unserved: f64, c_switch: f64, c_waste: f64) -> Result<Self> {
        let w = Self {
            c_unserved,
            c_switch,
            c_waste,
        };
        w.validate()?;
        Ok(w)
    }

    /// Service first, then stability, then efficiency.
    pub fn reference() -> Self {
        Self {
            c_unserved: 1.0,
            c_switch: 0.1,
            c_waste: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("c_unserved", self.c_unserved),
            ("c_switch", self.c_switch),
            ("c_waste", self.c_waste),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(config_err(format!(
                    "{name} must be finite and >= 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for CostWeights {
    fn default() -> Self {
        Self::reference()
    }
}

/// Integer penalty totals accumulated over some set of slots and directions.
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PenaltyCounts {
    pub shortfall: u64,
    pub deactivations: u64,
    pub waste: u64,
}

impl Add for PenaltyCounts {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        Self {
            shortfall: self.shortfall + rhs.shortfall,
            deactivations: self.deactivations + rhs.deactivations,
            waste: self.waste + rhs.waste,
        }
    }
}

impl AddAssign for PenaltyCounts {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// A weighted penalty in units of `2^exponent` of the owning [`ExactWeights`].
#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactCost(pub i128);

impl Add for ExactCost {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        ExactCost(self.0 + rhs.0)
    }
}

impl AddAssign for ExactCost {
    fn add_assign(&mut self, rhs: Self) {
        self.0 += rhs.0;
    }
}

/// Cost weights rescaled to integers over a shared power of two.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExactWeights {
    unserved: i128,
    switch: i128,
    waste: i128,
    exponent: i32,
}

impl ExactWeights {
    pub fn new(weights: &CostWeights) -> Result<Self> {
        weights.validate()?;
        let parts = [weights.c_unserved, weights.c_switch, weights.c_waste].map(decode);
        let exponent = parts
            .iter()
            .filter(|(m, _)| *m != 0)
            .map(|&(_, e)| e)
            .min()
            .unwrap_or(0);
        let mut scaled = [0i128; 3];
        for (slot, &(mantissa, e)) in scaled.iter_mut().zip(parts.iter()) {
            if mantissa == 0 {
                continue;
            }
            let shift = (e - exponent) as u32;
            let bits = 128 - (mantissa as i128).leading_zeros();
            if bits + shift > 90 {
                return Err(config_err(
                    "cost weights span too many orders of magnitude for exact arithmetic",
                ));
            }
            *slot = (mantissa as i128) << shift;
            debug_assert!(*slot <= MAX_SCALED_WEIGHT);
        }
        Ok(Self {
            unserved: scaled[0],
            switch: scaled[1],
            waste: scaled[2],
            exponent,
        })
    }

    #[inline]
    pub fn cost(&self, counts: PenaltyCounts) -> ExactCost {
        ExactCost(
            self.unserved * counts.shortfall as i128
                + self.switch * counts.deactivations as i128
                + self.waste * counts.waste as i128,
        )
    }

    #[inline]
    pub fn stage(&self, shortfall: u32, deactivations: u32, waste: u32) -> ExactCost {
        ExactCost(
            self.unserved * shortfall as i128
                + self.switch * deactivations as i128
                + self.waste * waste as i128,
        )
    }

    /// Converts to a double with a single rounding step.
    pub fn to_f64(&self, cost: ExactCost) -> f64 {
        cost.0 as f64 * 2f64.powi(self.exponent)
    }
}

/// Splits a non-negative finite double into an odd mantissa and exponent.
fn decode(v: f64) -> (u64, i32) {
    let (mut mantissa, exp, _) = Float::integer_decode(v);
    let mut exp = exp as i32;
    if mantissa == 0 {
        return (0, 0);
    }
    let tz = mantissa.trailing_zeros();
    mantissa >>= tz;
    exp += tz as i32;
    (mantissa, exp)
}

//! Lane-count by capture-rate sweep over one frozen trip population.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dispatch::PassengerStatus;
use crate::error::{config_err, Error, Result};
use crate::pipeline::{build_demand, run_policy, PipelineConfig, Policy};
use crate::trips::TripCollection;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepGrid {
    pub lane_counts: Vec<u32>,
    pub capture_rates: Vec<f64>,
}

impl SweepGrid {
    /// `L` in {2, 4, 6, 8, 10} by `p_c` in {0.1, ..., 0.8}.
    pub fn reference() -> Self {
        Self {
            lane_counts: vec![2, 4, 6, 8, 10],
            capture_rates: (1..=8).map(|i| i as f64 / 10.0).collect(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.lane_counts.is_empty() || self.capture_rates.is_empty() {
            return Err(config_err(
                "sweep grid needs at least one lane count and one capture rate",
            ));
        }
        if self.lane_counts.contains(&0) {
            return Err(config_err("sweep lane counts must be >= 1"));
        }
        if let Some(p) = self
            .capture_rates
            .iter()
            .find(|p| !(0.0..=1.0).contains(*p))
        {
            return Err(config_err(format!("sweep capture rate {p} outside [0, 1]")));
        }
        Ok(())
    }

    pub fn cells(&self) -> Vec<(u32, f64)> {
        self.lane_counts
            .iter()
            .flat_map(|&l| self.capture_rates.iter().map(move |&p| (l, p)))
            .collect()
    }
}

impl Default for SweepGrid {
    fn default() -> Self {
        Self::reference()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub lane_count: u32,
    pub capture_rate: f64,
    /// Passengers flown, after capacity rejections.
    pub throughput_passengers: u64,
    pub total_shortfall: u64,
    pub mean_utilization: f64,
    pub total_waste: u64,
    pub person_hours_saved: f64,
    pub mean_trip_minutes: f64,
    pub solve_millis: f64,
    pub objective_z: f64,
}

pub const SWEEP_COLUMNS: [&str; 10] = [
    "lane_count",
    "capture_rate",
    "throughput_passengers",
    "total_shortfall",
    "mean_utilization",
    "total_waste",
    "person_hours_saved",
    "mean_trip_minutes",
    "solve_millis",
    "objective_z",
];

fn run_cell(
    lane_count: u32,
    capture_rate: f64,
    trips: &TripCollection,
    base: &PipelineConfig,
) -> Result<SweepRow> {
    let config = PipelineConfig {
        corridor: base.corridor.with_lane_count(lane_count),
        dispatch: base.dispatch.with_capture_rate(capture_rate),
        ..base.clone()
    };
    config.corridor.validate()?;
    config.dispatch.validate()?;
    config.initial.validate(&config.corridor)?;
    let stage = build_demand(trips, &config.dispatch, &config.corridor)?;
    let run = run_policy(Policy::Dynamic, trips, &stage, &config)?;
    Ok(SweepRow {
        lane_count,
        capture_rate,
        throughput_passengers: run
            .outcomes
            .iter()
            .filter(|o| o.status == PassengerStatus::ServedUam)
            .count() as u64,
        total_shortfall: run.report.total_shortfall,
        mean_utilization: run.report.mean_utilization,
        total_waste: run.report.total_waste,
        person_hours_saved: run.impact.person_hours_saved,
        mean_trip_minutes: run.impact.mean_trip_minutes,
        solve_millis: run.solve_millis().unwrap_or(0.0),
        objective_z: run.report.objective_z,
    })
}

/// Solves every cell with the dynamic policy. Cells run in parallel; rows
/// come back lane-count major regardless of completion order.
pub fn run_sweep(
    grid: &SweepGrid,
    trips: &TripCollection,
    base: &PipelineConfig,
) -> Result<Vec<SweepRow>> {
    grid.validate()?;
    grid.cells()
        .into_par_iter()
        .map(|(l, p)| {
            run_cell(l, p, trips, base).map_err(|e| Error::SweepCell {
                lane_count: l,
                capture_rate: p,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Writes the sweep table. Solve times are left blank unless requested so
/// repeated runs produce identical files.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], with_timings: bool, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(SWEEP_COLUMNS)?;
    for r in rows {
        w.write_record([
            r.lane_count.to_string(),
            r.capture_rate.to_string(),
            r.throughput_passengers.to_string(),
            r.total_shortfall.to_string(),
            format!("{:.6}", r.mean_utilization),
            r.total_waste.to_string(),
            format!("{:.4}", r.person_hours_saved),
            format!("{:.4}", r.mean_trip_minutes),
            if with_timings {
                format!("{:.3}", r.solve_millis)
            } else {
                String::new()
            },
            format!("{:.4}", r.objective_z),
        ])?;
    }
    w.flush()?;
    Ok(())
}

//! Fixtures shared by the criterion benches.

use uamlanes_core::pipeline::build_demand;
use uamlanes_core::trips::REFERENCE_SEED;
use uamlanes_core::{
    generate_synthetic_trips, DemandSeries, PipelineConfig, SyntheticProfile, TripCollection,
};

/// Reference trip population and its aircraft demand.
pub fn reference_scenario() -> (PipelineConfig, TripCollection, DemandSeries) {
    let config = PipelineConfig::default();
    let trips = generate_synthetic_trips(
        &SyntheticProfile::reference(),
        &config.corridor,
        REFERENCE_SEED,
    )
    .expect("reference profile is valid");
    let demand = build_demand(&trips, &config.dispatch, &config.corridor)
        .expect("reference demand")
        .dispatch
        .demand;
    (config, trips, demand)
}

/// Deterministic two-peak demand of `horizon` slots for solver scaling runs.
pub fn commute_demand(horizon: usize, peak: u32) -> DemandSeries {
    let h = horizon as f64;
    let bump = |center: f64| -> Vec<u32> {
        (0..horizon)
            .map(|t| {
                let z = (t as f64 - center) / (0.1 * h);
                (peak as f64 * (-0.5 * z * z).exp()).round() as u32
            })
            .collect()
    };
    DemandSeries::new(bump(0.25 * h), bump(0.7 * h)).expect("equal lengths")
}

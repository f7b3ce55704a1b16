use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::Context;
use log::info;
use serde::Serialize;
use uamlanes_core::corridor::format_clock;
use uamlanes_core::dispatch::write_outcomes_csv;
use uamlanes_core::pipeline::{build_demand, run_policy, DemandStage, PolicyRun};
use uamlanes_core::series_io::{save_series_csv, SeriesDocument};
use uamlanes_core::solver::write_lp;
use uamlanes_core::sweep::write_sweep_csv;
use uamlanes_core::{generate_synthetic_trips, load_trips, run_sweep, Policy, TripCollection};

use crate::config::{sha256_hex, RunConfig};

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub timings: bool,
}

fn out_path(config: &RunConfig, name: &str) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(&config.out_dir)
        .with_context(|| format!("creating {}", config.out_dir.display()))?;
    Ok(config.out_dir.join(name))
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    w.flush()?;
    Ok(())
}

/// Trips from `path`, or the synthetic population for the configured seed.
fn trips_for(config: &RunConfig, path: Option<&Path>) -> anyhow::Result<(TripCollection, String)> {
    match path {
        Some(p) => {
            let bytes = fs::read(p).with_context(|| format!("reading {}", p.display()))?;
            let trips = load_trips(p).with_context(|| format!("loading {}", p.display()))?;
            Ok((trips, sha256_hex(&bytes)))
        }
        None => {
            info!(
                "no --trips given; generating the synthetic population (seed {})",
                config.seed
            );
            let trips = generate_synthetic_trips(&config.synthetic, &config.corridor, config.seed)?;
            let mut buf = Vec::new();
            trips.write_csv(&mut buf)?;
            Ok((trips, sha256_hex(&buf)))
        }
    }
}

pub fn gen_trips(config: &RunConfig, out: Option<&Path>) -> anyhow::Result<()> {
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => out_path(config, "trips.csv")?,
    };
    let trips = generate_synthetic_trips(&config.synthetic, &config.corridor, config.seed)?;
    trips
        .save(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {} trips to {}", trips.len(), path.display());
    Ok(())
}

fn demand_outputs(config: &RunConfig, stage: &DemandStage) -> anyhow::Result<()> {
    save_series_csv(
        stage.demand(),
        &config.corridor,
        out_path(config, "demand.csv")?,
    )?;
    let doc = SeriesDocument::new(config.corridor.clone(), stage.demand().clone())?;
    fs::write(out_path(config, "demand.json")?, doc.to_json()?)?;
    Ok(())
}

fn summary(run: &PolicyRun) -> String {
    let r = &run.report;
    let mut line = format!(
        "policy={} served={} shortfall={} shortfall_rate={:.4} waste={} deactivations={} utilization={:.4} Z={:.4} mean_trip_min={:.2}",
        run.policy,
        r.total_served,
        r.total_shortfall,
        r.shortfall_rate,
        r.total_waste,
        r.total_deactivations,
        r.mean_utilization,
        r.objective_z,
        run.impact.mean_trip_minutes,
    );
    if let Some(ms) = run.solve_millis() {
        line.push_str(&format!(" solve_ms={ms:.3}"));
    }
    line
}

#[derive(Serialize)]
struct Timing {
    policy: Policy,
    solve_millis: f64,
}

pub fn run(
    config: &RunConfig,
    trips_path: Option<&Path>,
    policy: Policy,
    opts: &Options,
) -> anyhow::Result<()> {
    let (trips, _) = trips_for(config, trips_path)?;
    let pipeline = config.pipeline();
    let stage = build_demand(&trips, &config.dispatch, &config.corridor)?;
    demand_outputs(config, &stage)?;
    let run = run_policy(policy, &trips, &stage, &pipeline)?;

    let p = policy.as_str();
    save_series_csv(
        &run.schedule,
        &config.corridor,
        out_path(config, &format!("schedule_{p}.csv"))?,
    )?;
    let doc = SeriesDocument::new(config.corridor.clone(), run.schedule.clone())?;
    fs::write(
        out_path(config, &format!("schedule_{p}.json"))?,
        doc.to_json()?,
    )?;
    write_json(
        &out_path(config, &format!("evaluation_{p}.json"))?,
        &run.report,
    )?;
    run.report
        .write_slots_csv(create(&out_path(config, &format!("evaluation_{p}.csv"))?)?)?;
    write_json(
        &out_path(config, &format!("travel_impact_{p}.json"))?,
        &run.impact,
    )?;
    write_outcomes_csv(
        &run.outcomes,
        create(&out_path(config, &format!("outcomes_{p}.csv"))?)?,
    )?;
    if opts.timings {
        if let Some(ms) = run.solve_millis() {
            write_json(
                &out_path(config, &format!("timings_{p}.json"))?,
                &Timing {
                    policy,
                    solve_millis: ms,
                },
            )?;
        }
    }
    println!("{}", summary(&run));
    Ok(())
}

pub const COMPARE_COLUMNS: [&str; 8] = [
    "policy",
    "served",
    "shortfall",
    "shortfall_rate",
    "waste",
    "deactivations",
    "utilization",
    "Z",
];

pub fn compare(
    config: &RunConfig,
    trips_path: Option<&Path>,
    opts: &Options,
) -> anyhow::Result<()> {
    let (trips, _) = trips_for(config, trips_path)?;
    let pipeline = config.pipeline();
    let stage = build_demand(&trips, &config.dispatch, &config.corridor)?;
    demand_outputs(config, &stage)?;
    let runs = Policy::ALL
        .into_iter()
        .map(|p| run_policy(p, &trips, &stage, &pipeline))
        .collect::<Result<Vec<_>, _>>()?;

    let mut w = csv::Writer::from_writer(create(&out_path(config, "compare.csv")?)?);
    w.write_record(COMPARE_COLUMNS)?;
    for run in &runs {
        let r = &run.report;
        w.write_record([
            run.policy.to_string(),
            r.total_served.to_string(),
            r.total_shortfall.to_string(),
            format!("{:.6}", r.shortfall_rate),
            r.total_waste.to_string(),
            r.total_deactivations.to_string(),
            format!("{:.6}", r.mean_utilization),
            format!("{:.4}", r.objective_z),
        ])?;
    }
    w.flush()?;

    // Demand and every policy's lanes side by side, one row per slot.
    let mut w = csv::Writer::from_writer(create(&out_path(config, "compare_schedules.csv")?)?);
    let mut header = vec![
        "slot".to_string(),
        "clock_time".into(),
        "F_fwd".into(),
        "F_rev".into(),
    ];
    for run in &runs {
        header.push(format!("{}_fwd", run.policy));
        header.push(format!("{}_rev", run.policy));
    }
    w.write_record(&header)?;
    let demand = stage.demand();
    for t in 0..config.corridor.horizon {
        let mut row = vec![
            t.to_string(),
            format_clock(config.corridor.slot_start(t)),
            demand.fwd[t].to_string(),
            demand.rev[t].to_string(),
        ];
        for run in &runs {
            row.push(run.schedule.y_fwd[t].to_string());
            row.push(run.schedule.y_rev[t].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;

    if opts.timings {
        let timings: Vec<Timing> = runs
            .iter()
            .filter_map(|r| {
                r.solve_millis().map(|ms| Timing {
                    policy: r.policy,
                    solve_millis: ms,
                })
            })
            .collect();
        write_json(&out_path(config, "timings_compare.json")?, &timings)?;
    }
    for run in &runs {
        println!("{}", summary(run));
    }
    Ok(())
}

#[derive(Serialize)]
struct SweepManifest<'a> {
    config_sha256: String,
    trips_sha256: String,
    seed: u64,
    trips: usize,
    grid: &'a uamlanes_core::SweepGrid,
    rows: usize,
}

pub fn sweep(config: &RunConfig, trips_path: Option<&Path>, opts: &Options) -> anyhow::Result<()> {
    let (trips, trips_sha256) = trips_for(config, trips_path)?;
    let rows = run_sweep(&config.sweep, &trips, &config.pipeline())?;
    write_sweep_csv(
        &rows,
        opts.timings,
        create(&out_path(config, "sweep.csv")?)?,
    )?;
    write_json(
        &out_path(config, "sweep_manifest.json")?,
        &SweepManifest {
            config_sha256: config.digest(),
            trips_sha256,
            seed: config.seed,
            trips: trips.len(),
            grid: &config.sweep,
            rows: rows.len(),
        },
    )?;
    println!(
        "sweep: {} cells written to {}",
        rows.len(),
        config.out_dir.join("sweep.csv").display()
    );
    Ok(())
}

pub fn export_lp(
    config: &RunConfig,
    trips_path: Option<&Path>,
    out: Option<&Path>,
) -> anyhow::Result<()> {
    let (trips, _) = trips_for(config, trips_path)?;
    let stage = build_demand(&trips, &config.dispatch, &config.corridor)?;
    let path = match out {
        Some(p) => p.to_path_buf(),
        None => out_path(config, "model.lp")?,
    };
    write_lp(
        &config.corridor,
        stage.demand(),
        &config.weights,
        &config.initial,
        create(&path)?,
    )?;
    println!("wrote {}", path.display());
    Ok(())
}

//! Disaggregate door-to-door trips: CSV loading and a calibrated synthetic
//! population.

use std::collections::{BTreeMap, HashSet};
use std::io::{Read, Write};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, WeightedIndex};
use serde::{Deserialize, Serialize};

use crate::corridor::{CorridorSpec, Direction};
use crate::error::{config_err, Error, Result};

/// Seed of the frozen reference population.
pub const REFERENCE_SEED: u64 = 9;

pub const TRIP_COLUMNS: [&str; 9] = [
    "trip_id",
    "origin_zone",
    "dest_zone",
    "direction",
    "depart_minutes",
    "drive_minutes",
    "fm_minutes",
    "lm_minutes",
    "flight_minutes",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripRecord {
    pub trip_id: String,
    pub origin_zone: String,
    pub dest_zone: String,
    pub direction: Direction,
    pub depart_minutes: f64,
    pub drive_minutes: f64,
    pub fm_minutes: f64,
    pub lm_minutes: f64,
    pub flight_minutes: f64,
}

impl TripRecord {
    /// Door-to-door time by first mile, flight and last mile, excluding any
    /// vertiport wait.
    pub fn uam_minutes(&self) -> f64 {
        self.fm_minutes + self.flight_minutes + self.lm_minutes
    }

    /// Minutes saved by flying instead of driving.
    pub fn advantage(&self) -> f64 {
        self.drive_minutes - self.uam_minutes()
    }

    /// Clock time at which the passenger reaches the origin vertiport.
    pub fn vertiport_arrival(&self) -> f64 {
        self.depart_minutes + self.fm_minutes
    }

    fn check(&self) -> std::result::Result<(), String> {
        if self.trip_id.is_empty() {
            return Err("empty trip_id".into());
        }
        for (name, v) in [
            ("depart_minutes", self.depart_minutes),
            ("drive_minutes", self.drive_minutes),
            ("fm_minutes", self.fm_minutes),
            ("lm_minutes", self.lm_minutes),
            ("flight_minutes", self.flight_minutes),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        if self.drive_minutes <= 0.0 {
            return Err("drive_minutes must be > 0".into());
        }
        Ok(())
    }
}

/// Which corridor endpoint a zone feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Cluster {
    I,
    J,
}

impl Cluster {
    fn origin_of(dir: Direction) -> Self {
        match dir {
            Direction::Fwd => Cluster::I,
            Direction::Rev => Cluster::J,
        }
    }
}

/// Zone label to endpoint cluster.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ZoneMap(pub BTreeMap<String, Cluster>);

impl ZoneMap {
    pub fn cluster(&self, zone: &str) -> Option<Cluster> {
        self.0.get(zone).copied()
    }

    /// Direction of a trip between two zones; `None` if either zone is
    /// unknown or both sit in the same cluster.
    pub fn direction(&self, origin: &str, dest: &str) -> Option<Direction> {
        match (self.cluster(origin)?, self.cluster(dest)?) {
            (Cluster::I, Cluster::J) => Some(Direction::Fwd),
            (Cluster::J, Cluster::I) => Some(Direction::Rev),
            _ => None,
        }
    }

    fn insert(&mut self, zone: &str, cluster: Cluster) -> std::result::Result<(), String> {
        match self.0.get(zone) {
            Some(&c) if c != cluster => Err(format!("zone {zone:?} appears in both clusters")),
            Some(_) => Ok(()),
            None => {
                self.0.insert(zone.to_owned(), cluster);
                Ok(())
            }
        }
    }
}

/// Ordered trips plus the zone mapping that assigns their directions.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TripCollection {
    trips: Vec<TripRecord>,
    zones: ZoneMap,
}

impl TripCollection {
    /// Builds a collection, inferring the zone map from the trips' directions.
    pub fn new(trips: Vec<TripRecord>) -> Result<Self> {
        let mut zones = ZoneMap::default();
        for (i, t) in trips.iter().enumerate() {
            let line = i as u64 + 2;
            let schema = |message| Error::Schema { line, message };
            let origin = Cluster::origin_of(t.direction);
            let dest = Cluster::origin_of(t.direction.flip());
            zones.insert(&t.origin_zone, origin).map_err(schema)?;
            zones.insert(&t.dest_zone, dest).map_err(schema)?;
        }
        Self::with_zones(trips, zones)
    }

    /// Builds a collection against a known zone map.
    pub fn with_zones(trips: Vec<TripRecord>, zones: ZoneMap) -> Result<Self> {
        let mut seen = HashSet::with_capacity(trips.len());
        for (i, t) in trips.iter().enumerate() {
            let line = i as u64 + 2;
            t.check()
                .map_err(|message| Error::Schema { line, message })?;
            if !seen.insert(t.trip_id.as_str()) {
                return Err(Error::Schema {
                    line,
                    message: format!("duplicate trip_id {:?}", t.trip_id),
                });
            }
            for zone in [&t.origin_zone, &t.dest_zone] {
                if zones.cluster(zone).is_none() {
                    return Err(Error::Schema {
                        line,
                        message: format!("unknown zone {zone:?}"),
                    });
                }
            }
            if zones.direction(&t.origin_zone, &t.dest_zone) != Some(t.direction) {
                return Err(Error::Schema {
                    line,
                    message: format!(
                        "direction {} inconsistent with zones {} -> {}",
                        t.direction, t.origin_zone, t.dest_zone
                    ),
                });
            }
        }
        Ok(Self { trips, zones })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    pub fn trips(&self) -> &[TripRecord] {
        &self.trips
    }

    pub fn zones(&self) -> &ZoneMap {
        &self.zones
    }

    pub fn len(&self) -> usize {
        self.trips.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trips.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, TripRecord> {
        self.trips.iter()
    }

    /// A sub-collection sharing this collection's zone map. Trip order is
    /// preserved.
    pub fn subset<F: FnMut(&TripRecord) -> bool>(&self, mut keep: F) -> Self {
        Self {
            trips: self.trips.iter().filter(|t| keep(t)).cloned().collect(),
            zones: self.zones.clone(),
        }
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        // Header written by hand so an empty collection still gets one.
        let mut w = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(writer);
        w.write_record(TRIP_COLUMNS)?;
        for t in &self.trips {
            w.serialize(t)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let f = std::fs::File::create(path)?;
        self.write_csv(std::io::BufWriter::new(f))
    }
}

impl<'a> IntoIterator for &'a TripCollection {
    type Item = &'a TripRecord;
    type IntoIter = std::slice::Iter<'a, TripRecord>;

    fn into_iter(self) -> Self::IntoIter {
        self.trips.iter()
    }
}

fn read_records<R: Read>(reader: R) -> Result<Vec<TripRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    for col in TRIP_COLUMNS {
        if !headers.iter().any(|h| h == col) {
            return Err(Error::Schema {
                line: 1,
                message: format!("missing column {col:?}"),
            });
        }
    }
    if headers.len() != TRIP_COLUMNS.len() {
        return Err(Error::Schema {
            line: 1,
            message: format!(
                "expected columns {}, got {}",
                TRIP_COLUMNS.join(","),
                headers.iter().collect::<Vec<_>>().join(",")
            ),
        });
    }
    let mut out = Vec::new();
    for (i, rec) in rdr.deserialize::<TripRecord>().enumerate() {
        let line = i as u64 + 2;
        let rec = rec.map_err(|e| Error::Schema {
            line: e.position().map(|p| p.line()).unwrap_or(line),
            message: e.to_string(),
        })?;
        rec.check()
            .map_err(|message| Error::Schema { line, message })?;
        out.push(rec);
    }
    Ok(out)
}

/// Reads trips from CSV, inferring the zone map.
pub fn read_trips<R: Read>(reader: R) -> Result<TripCollection> {
    TripCollection::new(read_records(reader)?)
}

/// Loads the trip CSV at `path`, inferring the zone map from the rows.
pub fn load_trips(path: impl AsRef<Path>) -> Result<TripCollection> {
    let f = std::fs::File::open(path)?;
    read_trips(std::io::BufReader::new(f))
}

/// Loads the trip CSV at `path` and validates every zone against `zones`.
pub fn load_trips_with_zones(path: impl AsRef<Path>, zones: &ZoneMap) -> Result<TripCollection> {
    let f = std::fs::File::open(path)?;
    TripCollection::with_zones(read_records(std::io::BufReader::new(f))?, zones.clone())
}

/// One component of a departure-time mixture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Peak {
    pub center_minutes: f64,
    pub sd_minutes: f64,
    pub weight: f64,
}

/// Mean and spread of a travel-time leg, in minutes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LegTime {
    pub mean: f64,
    pub sd: f64,
    pub min: f64,
}

impl LegTime {
    fn sampler(&self) -> Result<Normal<f64>> {
        if !(self.mean.is_finite() && self.sd.is_finite() && self.min.is_finite())
            || self.sd < 0.0
            || self.min < 0.0
        {
            return Err(config_err(format!("invalid leg time {self:?}")));
        }
        Normal::new(self.mean, self.sd).map_err(|e| config_err(e.to_string()))
    }
}

/// Per-direction departure profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionProfile {
    /// Share of the population travelling in this direction (normalised
    /// against the other direction).
    pub share: f64,
    /// Weight of a flat all-day component relative to the peaks.
    pub background_weight: f64,
    pub peaks: Vec<Peak>,
}

/// Parameters of the synthetic two-cluster commuter population.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SyntheticProfile {
    pub population: usize,
    pub zones_per_cluster: usize,
    pub fwd: DirectionProfile,
    pub rev: DirectionProfile,
    /// Uncongested door-to-door drive time.
    pub drive_free_flow: LegTime,
    /// Extra drive time at the height of a peak, as a fraction of free flow.
    pub congestion_factor: f64,
    pub first_mile: LegTime,
    pub last_mile: LegTime,
    pub flight: LegTime,
}

impl SyntheticProfile {
    /// CC-SV weekday: a SV-bound morning peak near 40 aircraft per slot
    /// and a longer CC-bound afternoon return just above 50, at 30% capture
    /// under the reference dispatch rule.
    pub fn reference() -> Self {
        let peak = |center_minutes, sd_minutes, weight| Peak {
            center_minutes,
            sd_minutes,
            weight,
        };
        Self {
            population: 30_000,
            zones_per_cluster: 24,
            fwd: DirectionProfile {
                share: 0.42,
                background_weight: 0.02,
                peaks: vec![peak(450.0, 110.0, 0.8), peak(1020.0, 80.0, 0.13)],
            },
            rev: DirectionProfile {
                share: 0.58,
                background_weight: 0.02,
                peaks: vec![peak(480.0, 80.0, 0.13), peak(975.0, 120.0, 0.85)],
            },
            drive_free_flow: LegTime {
                mean: 80.0,
                sd: 14.0,
                min: 30.0,
            },
            congestion_factor: 0.2,
            first_mile: LegTime {
                mean: 12.0,
                sd: 4.0,
                min: 3.0,
            },
            last_mile: LegTime {
                mean: 12.0,
                sd: 4.0,
                min: 3.0,
            },
            flight: LegTime {
                mean: 22.0,
                sd: 3.0,
                min: 12.0,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.zones_per_cluster == 0 {
            return Err(config_err("zones_per_cluster must be >= 1"));
        }
        if !(self.congestion_factor.is_finite() && self.congestion_factor >= 0.0) {
            return Err(config_err("congestion_factor must be >= 0"));
        }
        for (name, d) in [("fwd", &self.fwd), ("rev", &self.rev)] {
            if !(d.share.is_finite() && d.share >= 0.0) {
                return Err(config_err(format!("{name}.share must be >= 0")));
            }
            if !(d.background_weight.is_finite() && d.background_weight >= 0.0) {
                return Err(config_err(format!("{name}.background_weight must be >= 0")));
            }
            for p in &d.peaks {
                if !(p.center_minutes.is_finite()
                    && p.sd_minutes.is_finite()
                    && p.sd_minutes > 0.0
                    && p.weight.is_finite()
                    && p.weight >= 0.0)
                {
                    return Err(config_err(format!("{name}: invalid peak {p:?}")));
                }
            }
            let total: f64 = d.background_weight + d.peaks.iter().map(|p| p.weight).sum::<f64>();
            if d.share > 0.0 && total <= 0.0 {
                return Err(config_err(format!("{name}: mixture weights sum to zero")));
            }
        }
        if self.fwd.share + self.rev.share <= 0.0 {
            return Err(config_err("direction shares sum to zero"));
        }
        for leg in [
            &self.drive_free_flow,
            &self.first_mile,
            &self.last_mile,
            &self.flight,
        ] {
            leg.sampler()?;
        }
        if self.drive_free_flow.min <= 0.0 {
            return Err(config_err("drive_free_flow.min must be > 0"));
        }
        Ok(())
    }
}

impl Default for SyntheticProfile {
    fn default() -> Self {
        Self::reference()
    }
}

fn zone_label(node: &str, idx: usize) -> String {
    format!("{node}-{:03}", idx + 1)
}

fn draw_leg<R: Rng>(rng: &mut R, dist: &Normal<f64>, min: f64) -> f64 {
    round2(dist.sample(rng).max(min))
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

/// Peak intensity in [0, 1] at clock time `t` for one direction.
fn congestion(profile: &DirectionProfile, t: f64) -> f64 {
    profile
        .peaks
        .iter()
        .filter(|p| p.weight > 0.0)
        .map(|p| {
            let z = (t - p.center_minutes) / p.sd_minutes;
            (-0.5 * z * z).exp()
        })
        .fold(0.0, f64::max)
}

/// Draws a deterministic synthetic population for `spec`'s operating day.
///
/// Every trip reaches its origin vertiport inside the horizon.
pub fn generate_synthetic_trips(
    profile: &SyntheticProfile,
    spec: &CorridorSpec,
    seed: u64,
) -> Result<TripCollection> {
    profile.validate()?;
    spec.validate()?;
    let mut zones = ZoneMap::default();
    let cluster_zones = |node: &str| -> Vec<String> {
        (0..profile.zones_per_cluster)
            .map(|i| zone_label(node, i))
            .collect()
    };
    let zones_i = cluster_zones(&spec.node_i);
    let zones_j = cluster_zones(&spec.node_j);
    for z in &zones_i {
        zones.0.insert(z.clone(), Cluster::I);
    }
    for z in &zones_j {
        zones.0.insert(z.clone(), Cluster::J);
    }
    if profile.population == 0 {
        return TripCollection::with_zones(Vec::new(), zones);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = spec.horizon_start as f64;
    let end = spec.horizon_end() as f64;

    let dir_pick = WeightedIndex::new([profile.fwd.share, profile.rev.share])
        .map_err(|e| config_err(e.to_string()))?;
    let mixture = |d: &DirectionProfile| -> Result<Option<WeightedIndex<f64>>> {
        let mut w = vec![d.background_weight];
        w.extend(d.peaks.iter().map(|p| p.weight));
        if d.share == 0.0 {
            return Ok(None);
        }
        WeightedIndex::new(w)
            .map(Some)
            .map_err(|e| config_err(e.to_string()))
    };
    let mix_fwd = mixture(&profile.fwd)?;
    let mix_rev = mixture(&profile.rev)?;
    let peak_samplers = |d: &DirectionProfile| -> Vec<Normal<f64>> {
        d.peaks
            .iter()
            .map(|p| Normal::new(p.center_minutes, p.sd_minutes).expect("validated peak"))
            .collect()
    };
    let peaks_fwd = peak_samplers(&profile.fwd);
    let peaks_rev = peak_samplers(&profile.rev);
    let drive = profile.drive_free_flow.sampler()?;
    let fm = profile.first_mile.sampler()?;
    let lm = profile.last_mile.sampler()?;
    let flight = profile.flight.sampler()?;

    let width = (profile.population.max(1) as f64).log10().floor() as usize + 1;
    let mut trips = Vec::with_capacity(profile.population);
    for n in 0..profile.population {
        let direction = if dir_pick.sample(&mut rng) == 0 {
            Direction::Fwd
        } else {
            Direction::Rev
        };
        let (dprof, mix, peaks) = match direction {
            Direction::Fwd => (&profile.fwd, &mix_fwd, &peaks_fwd),
            Direction::Rev => (&profile.rev, &mix_rev, &peaks_rev),
        };
        let mix = mix
            .as_ref()
            .expect("direction with zero share is never drawn");

        let fm_minutes = draw_leg(&mut rng, &fm, profile.first_mile.min);
        // Rejection-sample a departure whose vertiport arrival lands in the
        // operating window.
        let latest = end - fm_minutes;
        let mut depart = None;
        for _ in 0..64 {
            let comp = mix.sample(&mut rng);
            let t = if comp == 0 {
                rng.gen_range(start..end)
            } else {
                peaks[comp - 1].sample(&mut rng)
            };
            let t = round2(t);
            if t >= start && t < latest {
                depart = Some(t);
                break;
            }
        }
        let depart_minutes = match depart {
            Some(t) => t,
            None => round2(rng.gen_range(start..latest.max(start + 0.01))),
        };

        let base = drive.sample(&mut rng).max(profile.drive_free_flow.min);
        let drive_minutes =
            round2(base * (1.0 + profile.congestion_factor * congestion(dprof, depart_minutes)));
        let lm_minutes = draw_leg(&mut rng, &lm, profile.last_mile.min);
        let flight_minutes = draw_leg(&mut rng, &flight, profile.flight.min);

        let (origins, dests) = match direction {
            Direction::Fwd => (&zones_i, &zones_j),
            Direction::Rev => (&zones_j, &zones_i),
        };
        let origin_zone = origins[rng.gen_range(0..origins.len())].clone();
        let dest_zone = dests[rng.gen_range(0..dests.len())].clone();

        trips.push(TripRecord {
            trip_id: format!("T{:0width$}", n + 1),
            origin_zone,
            dest_zone,
            direction,
            depart_minutes,
            drive_minutes,
            fm_minutes,
            lm_minutes,
            flight_minutes,
        });
    }
    TripCollection::with_zones(trips, zones)
}

//! Scenario assembly and the end-to-end experiment driver: JSON config
//! loading, gravity-model demand generation, distance scaling, lightpath
//! provisioning per planning period, per-change distribution re-planning,
//! slotted simulation, and cross-seed aggregation.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{fiber_loss, link_success, FiberParams, GenerationParams};
use crate::edt::{self, EdtInput, EdtObjective, RepeaterMode};
use crate::lpp::{self, CandidateLightpath, LppBlock, LppInstance};
use crate::metrics::{self, SummaryStats};
use crate::netmodel::{
    build_augmented_graph, validate_scenario, Commodity, FiberLink, GroundStation, Gsl,
    GslDirection, Lightpath, NetworkSnapshot, StationId, StationPair, Violation,
};
use crate::orbits::{
    self, commodity_epochs, great_circle_km, visibility_timeline, CommodityEpochs,
    ConstellationSpec, VisibilityTimeline,
};
use crate::protosim::{self, DemandWindow, PlanSegment, SlotTrace};
use crate::rng::{substream, Stream};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StationConfig {
    pub id: String,
    pub lat: f64,
    pub lon: f64,
    /// Fixed gravity-model population; absent means resampled per demand
    /// window from `commodities.population_range`.
    #[serde(default)]
    pub population: Option<f64>,
    /// Fixed swapping success; absent means sampled once from
    /// `simulation.swap_success_range`.
    #[serde(default)]
    pub swap_success: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FiberMode {
    /// Fiber between every station pair, lengths from scaled great-circle
    /// distances.
    AllPairs,
    /// Only the listed links.
    Explicit,
    /// No ground fibers at all.
    None,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiberLinkConfig {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub capacity: Option<u32>,
    /// Explicit per-channel generation success; wins over length-derived.
    #[serde(default)]
    pub gen_success: Option<f64>,
    #[serde(default)]
    pub length_km: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FibersConfig {
    pub mode: FiberMode,
    #[serde(default = "default_fiber_capacity")]
    pub capacity: u32,
    #[serde(default)]
    pub links: Vec<FiberLinkConfig>,
}

fn default_fiber_capacity() -> u32 {
    10
}

impl Default for FibersConfig {
    fn default() -> Self {
        FibersConfig { mode: FiberMode::AllPairs, capacity: 10, links: Vec::new() }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstellationConfig {
    #[serde(default = "default_planes")]
    pub planes: u32,
    #[serde(default = "default_sats_per_plane")]
    pub sats_per_plane: u32,
    #[serde(default = "default_inclination")]
    pub inclination_deg: f64,
    #[serde(default = "default_altitude")]
    pub altitude_km: f64,
    #[serde(default)]
    pub phasing_offset: f64,
    #[serde(default = "default_lens_capacity")]
    pub lens_capacity: u32,
    #[serde(default = "default_lens_survival_range")]
    pub lens_survival_range: [f64; 2],
    #[serde(default = "default_min_elevation")]
    pub min_elevation_deg: f64,
}

fn default_planes() -> u32 {
    10
}
fn default_sats_per_plane() -> u32 {
    15
}
fn default_inclination() -> f64 {
    96.9
}
fn default_altitude() -> f64 {
    780.0
}
fn default_lens_capacity() -> u32 {
    4
}
fn default_lens_survival_range() -> [f64; 2] {
    [0.95, 0.98]
}
fn default_min_elevation() -> f64 {
    25.0
}

impl Default for ConstellationConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelConfig {
    #[serde(default = "default_gamma")]
    pub gamma_db_per_km: f64,
    #[serde(default = "default_one")]
    pub q_gen: f64,
    #[serde(default = "default_attempts")]
    pub n_attempts: u32,
    #[serde(default = "default_up_survival")]
    pub gsl_up_survival: f64,
    #[serde(default = "default_down_survival")]
    pub gsl_down_survival: f64,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
}

fn default_gamma() -> f64 {
    0.2
}
fn default_one() -> f64 {
    1.0
}
fn default_attempts() -> u32 {
    1
}
fn default_up_survival() -> f64 {
    0.2
}
fn default_down_survival() -> f64 {
    0.5
}
fn default_alpha() -> f64 {
    10.0
}

impl Default for ChannelConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CommoditiesConfig {
    #[serde(default = "default_commodity_count")]
    pub count: usize,
    #[serde(default = "default_selection_seed")]
    pub selection_seed: u64,
    /// Total requested expected EDR (ebits per slot) split by gravity.
    #[serde(default = "default_total_demand")]
    pub total_demand: f64,
    #[serde(default = "default_population_range")]
    pub population_range: [f64; 2],
    /// Explicit SD pairs; overrides random selection when present.
    #[serde(default)]
    pub explicit: Option<Vec<(String, String)>>,
}

fn default_commodity_count() -> usize {
    15
}
fn default_selection_seed() -> u64 {
    1
}
fn default_total_demand() -> f64 {
    15.0
}
fn default_population_range() -> [f64; 2] {
    [70.0, 300.0]
}

impl Default for CommoditiesConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// Provisioning by deterministic rounding at threshold delta, then
    /// distribution planning.
    QuesatD,
    /// Provisioning by randomized rounding, then distribution planning.
    QuesatR,
    /// Ground fiber network only.
    GEdt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveConfig {
    MaxTotal,
    MaxTotalDemandCapped,
    MaxMinFairness,
}

impl From<ObjectiveConfig> for EdtObjective {
    fn from(o: ObjectiveConfig) -> Self {
        match o {
            ObjectiveConfig::MaxTotal => EdtObjective::MaxTotal,
            ObjectiveConfig::MaxTotalDemandCapped => EdtObjective::MaxTotalDemandCapped,
            ObjectiveConfig::MaxMinFairness => EdtObjective::MaxMinFairness,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepeaterConfig {
    AllStations,
    CommoditiesOnly,
}

impl From<RepeaterConfig> for RepeaterMode {
    fn from(r: RepeaterConfig) -> Self {
        match r {
            RepeaterConfig::AllStations => RepeaterMode::AllStations,
            RepeaterConfig::CommoditiesOnly => RepeaterMode::CommoditiesOnly,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    #[serde(default = "default_horizon")]
    pub horizon_s: u64,
    #[serde(default = "default_slot")]
    pub slot_s: u64,
    #[serde(default = "default_monitor")]
    pub gsl_monitor_s: u64,
    #[serde(default = "default_demand_change")]
    pub demand_change_s: u64,
    #[serde(default = "default_planning_period")]
    pub planning_period_s: u64,
    #[serde(default = "default_distance_scale")]
    pub distance_scale: f64,
    #[serde(default = "default_algorithm")]
    pub algorithm: Algorithm,
    /// Threshold for deterministic rounding.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_objective")]
    pub edt_objective: ObjectiveConfig,
    #[serde(default = "default_repeaters")]
    pub repeaters: RepeaterConfig,
    #[serde(default = "default_swap_range")]
    pub swap_success_range: [f64; 2],
    /// Slots excluded from the metrics while the pipeline fills.
    #[serde(default)]
    pub warmup_slots: u64,
}

fn default_horizon() -> u64 {
    3600
}
fn default_slot() -> u64 {
    10
}
fn default_monitor() -> u64 {
    600
}
fn default_demand_change() -> u64 {
    3600
}
fn default_planning_period() -> u64 {
    86_400
}
fn default_distance_scale() -> f64 {
    0.1
}
fn default_algorithm() -> Algorithm {
    Algorithm::QuesatD
}
fn default_delta() -> f64 {
    0.5
}
fn default_objective() -> ObjectiveConfig {
    ObjectiveConfig::MaxTotalDemandCapped
}
fn default_repeaters() -> RepeaterConfig {
    RepeaterConfig::AllStations
}
fn default_swap_range() -> [f64; 2] {
    [0.85, 0.98]
}

impl Default for SimulationConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_stations")]
    pub stations: Vec<StationConfig>,
    #[serde(default)]
    pub fibers: FibersConfig,
    #[serde(default)]
    pub constellation: ConstellationConfig,
    #[serde(default)]
    pub channel: ChannelConfig,
    #[serde(default)]
    pub commodities: CommoditiesConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
}

/// Ten major cities as a documented stand-in station set: three regional
/// clusters (so scaled ground fiber carries some traffic) plus global
/// spread. Fully overridable through the config file.
fn default_stations() -> Vec<StationConfig> {
    [
        ("london", 51.5074, -0.1278),
        ("paris", 48.8566, 2.3522),
        ("frankfurt", 50.1109, 8.6821),
        ("newyork", 40.7128, -74.0060),
        ("washington", 38.9072, -77.0369),
        ("tokyo", 35.6762, 139.6503),
        ("seoul", 37.5665, 126.9780),
        ("beijing", 39.9042, 116.4074),
        ("sydney", -33.8688, 151.2093),
        ("saopaulo", -23.5505, -46.6333),
    ]
    .into_iter()
    .map(|(id, lat, lon)| StationConfig {
        id: id.to_string(),
        lat,
        lon,
        population: None,
        swap_success: None,
    })
    .collect()
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        serde_json::from_str("{}").unwrap()
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ScenarioError> {
        serde_json::from_str(text).map_err(ScenarioError::Parse)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("config parse error: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid scenario:\n{}", .0.iter().map(|v| format!("  - {v}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Violation>),
    #[error("{0}")]
    Inconsistent(String),
    #[error("graph error: {0}")]
    Graph(#[from] crate::netmodel::GraphError),
    #[error("provisioning error: {0}")]
    Lpp(#[from] lpp::LppError),
    #[error("distribution error: {0}")]
    Edt(#[from] edt::EdtError),
    #[error("simulation error: {0}")]
    Sim(#[from] protosim::SimError),
    #[error("metrics error: {0}")]
    Metrics(#[from] metrics::EmptySeries),
}

/// Fully instantiated scenario: stations with sampled parameters, fibers at
/// scaled distances, the constellation, and the selected commodities.
#[derive(Debug, Clone)]
pub struct BuiltScenario {
    pub stations: Vec<GroundStation>,
    pub fibers: Vec<FiberLink>,
    pub satellites: Vec<crate::netmodel::Satellite>,
    pub isls: Vec<crate::netmodel::Isl>,
    pub spec: ConstellationSpec,
    pub commodities: Vec<Commodity>,
    pub config: ScenarioConfig,
}

impl BuiltScenario {
    pub fn commodity_pairs(&self) -> Vec<StationPair> {
        self.commodities.iter().map(|c| c.pair.clone()).collect()
    }
}

/// Scaled great-circle distance table between all station pairs.
pub fn scale_distances(stations: &[GroundStation], factor: f64) -> BTreeMap<StationPair, f64> {
    assert!(factor > 0.0, "distance scale factor must be positive");
    let mut table = BTreeMap::new();
    for (i, a) in stations.iter().enumerate() {
        for b in &stations[i + 1..] {
            table.insert(
                StationPair::new(a.id.clone(), b.id.clone()),
                great_circle_km(a, b) * factor,
            );
        }
    }
    table
}

/// Gravity-model demand split: z_i proportional to pop(s_i) * pop(d_i),
/// normalized to the requested total.
pub fn gravity_demands(
    populations: &BTreeMap<StationId, f64>,
    commodities: &[StationPair],
    total_demand: f64,
) -> Vec<f64> {
    let weights: Vec<f64> = commodities
        .iter()
        .map(|p| populations[p.first()] * populations[p.second()])
        .collect();
    let sum: f64 = weights.iter().sum();
    if sum <= 0.0 {
        return vec![0.0; commodities.len()];
    }
    weights.iter().map(|w| total_demand * w / sum).collect()
}

/// Instantiates the scenario from its config: samples swap and lens
/// probabilities, derives fiber success from scaled distances, generates
/// the constellation, and selects the commodity pairs. Deterministic for a
/// fixed config.
pub fn build_scenario(config: &ScenarioConfig) -> Result<BuiltScenario, ScenarioError> {
    let sim = &config.simulation;
    for (name, value) in [
        ("slot_s", sim.slot_s),
        ("gsl_monitor_s", sim.gsl_monitor_s),
        ("demand_change_s", sim.demand_change_s),
        ("planning_period_s", sim.planning_period_s),
        ("horizon_s", sim.horizon_s),
    ] {
        if value == 0 {
            return Err(ScenarioError::Inconsistent(format!("{name} must be positive")));
        }
    }
    for (name, value) in
        [("gsl_monitor_s", sim.gsl_monitor_s), ("demand_change_s", sim.demand_change_s), ("planning_period_s", sim.planning_period_s)]
    {
        if value % sim.slot_s != 0 {
            return Err(ScenarioError::Inconsistent(format!(
                "{name} = {value} must be a multiple of slot_s = {}",
                sim.slot_s
            )));
        }
    }
    if config.commodities.total_demand <= 0.0 {
        return Err(ScenarioError::Inconsistent("total_demand must be positive".into()));
    }
    let seed = config.commodities.selection_seed;
    // stations with sampled or explicit swap probabilities
    let swap_range = sim.swap_success_range;
    let stations: Vec<GroundStation> = config
        .stations
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let swap = st.swap_success.unwrap_or_else(|| {
                let mut rng = substream(seed, Stream::Setup, &[1, i as u64]);
                rng.gen_range(swap_range[0]..=swap_range[1])
            });
            GroundStation {
                id: StationId(st.id.clone()),
                latitude: st.lat,
                longitude: st.lon,
                swap_success: swap,
            }
        })
        .collect();
    // fibers at scaled distances
    let distances = scale_distances(&stations, sim.distance_scale);
    let gen_params = GenerationParams::new(config.channel.q_gen, config.channel.n_attempts);
    let fiber_q = |length_km: f64| {
        link_success(
            gen_params,
            fiber_loss(FiberParams {
                gamma_db_per_km: config.channel.gamma_db_per_km,
                length_km,
            }),
        )
    };
    // spans whose derived success underflows toward zero are dead links;
    // they are dropped rather than carried as unusable edges
    const DEAD_FIBER_SUCCESS: f64 = 1e-12;
    let fibers: Vec<FiberLink> = match config.fibers.mode {
        FiberMode::None => Vec::new(),
        FiberMode::AllPairs => distances
            .iter()
            .map(|(pair, km)| FiberLink {
                endpoints: pair.clone(),
                capacity: config.fibers.capacity,
                gen_success: fiber_q(*km),
                length_km: *km,
            })
            .filter(|f| f.gen_success > DEAD_FIBER_SUCCESS)
            .collect(),
        FiberMode::Explicit => config
            .fibers
            .links
            .iter()
            .map(|l| {
                let pair = StationPair::new(StationId(l.a.clone()), StationId(l.b.clone()));
                let length = l
                    .length_km
                    .map(|km| km * sim.distance_scale)
                    .or_else(|| distances.get(&pair).copied())
                    .unwrap_or(0.0);
                FiberLink {
                    endpoints: pair,
                    capacity: l.capacity.unwrap_or(config.fibers.capacity),
                    // an explicit success value wins over the length-derived one
                    gen_success: l.gen_success.unwrap_or_else(|| fiber_q(length)),
                    length_km: length,
                }
            })
            .filter(|f| f.gen_success > DEAD_FIBER_SUCCESS)
            .collect(),
    };
    // constellation with per-satellite sampled lens survival
    let spec = ConstellationSpec {
        num_planes: config.constellation.planes,
        sats_per_plane: config.constellation.sats_per_plane,
        inclination_deg: config.constellation.inclination_deg,
        altitude_km: config.constellation.altitude_km,
        phasing_offset: config.constellation.phasing_offset,
    };
    let lens_range = config.constellation.lens_survival_range;
    let (mut satellites, isls) =
        orbits::generate_constellation(&spec, config.constellation.lens_capacity, lens_range[0]);
    for (i, sat) in satellites.iter_mut().enumerate() {
        let mut rng = substream(seed, Stream::Setup, &[2, i as u64]);
        sat.lens_success = rng.gen_range(lens_range[0]..=lens_range[1]);
    }
    // commodity selection
    let pairs_all: Vec<StationPair> = {
        let mut v = Vec::new();
        for (i, a) in stations.iter().enumerate() {
            for b in &stations[i + 1..] {
                v.push(StationPair::new(a.id.clone(), b.id.clone()));
            }
        }
        v
    };
    let selected_pairs: Vec<StationPair> = match &config.commodities.explicit {
        Some(list) => list
            .iter()
            .map(|(a, b)| StationPair::new(StationId(a.clone()), StationId(b.clone())))
            .collect(),
        None => {
            let mut pool = pairs_all.clone();
            let mut rng = substream(seed, Stream::Setup, &[3]);
            let count = config.commodities.count.min(pool.len());
            let mut chosen = Vec::with_capacity(count);
            for _ in 0..count {
                let k = rng.gen_range(0..pool.len());
                chosen.push(pool.swap_remove(k));
            }
            chosen.sort();
            chosen
        }
    };
    // demand series per commodity across demand windows
    let mut commodities: Vec<Commodity> =
        selected_pairs.iter().map(|p| Commodity { pair: p.clone(), demand_series: BTreeMap::new() }).collect();
    let mut window_start = 0u64;
    let mut window_idx = 0u64;
    while window_start < sim.horizon_s {
        let pops = sample_populations(config, &stations, seed, window_idx);
        let demands = gravity_demands(&pops, &selected_pairs, config.commodities.total_demand);
        for (c, z) in commodities.iter_mut().zip(&demands) {
            c.demand_series.insert(window_start, *z);
        }
        window_start += sim.demand_change_s;
        window_idx += 1;
    }
    let scenario = BuiltScenario {
        stations,
        fibers,
        satellites,
        isls,
        spec,
        commodities,
        config: config.clone(),
    };
    let report = validate_scenario(&scenario.stations, &scenario.fibers, &scenario.satellites, &scenario.commodities);
    if !report.is_empty() {
        return Err(ScenarioError::Invalid(report));
    }
    Ok(scenario)
}

fn sample_populations(
    config: &ScenarioConfig,
    stations: &[GroundStation],
    seed: u64,
    window_idx: u64,
) -> BTreeMap<StationId, f64> {
    let range = config.commodities.population_range;
    stations
        .iter()
        .enumerate()
        .map(|(i, st)| {
            let explicit = config.stations.iter().find(|c| c.id == st.id.0).and_then(|c| c.population);
            let pop = explicit.unwrap_or_else(|| {
                let mut rng = substream(seed, Stream::Setup, &[4, window_idx, i as u64]);
                rng.gen_range(range[0]..=range[1])
            });
            (st.id.clone(), pop)
        })
        .collect()
}

/// Provisioning output for one planning period: the relaxation value and
/// the decomposed candidate set (shared by both rounding algorithms).
#[derive(Debug, Clone)]
pub struct PeriodCandidates {
    pub period_start_s: u64,
    pub sol_lp: f64,
    pub candidates: Vec<CandidateLightpath>,
    pub skipped: usize,
}

/// Everything derivable from the config alone (no simulation seed):
/// the built scenario, visibility, epochs, and per-period candidates.
pub struct PreparedScenario {
    pub scenario: BuiltScenario,
    pub timeline: VisibilityTimeline,
    pub epochs: CommodityEpochs,
    pub periods: Vec<PeriodCandidates>,
    pub lpp_instance_by_period: Vec<LppInstance>,
}

pub fn prepare(config: &ScenarioConfig) -> Result<PreparedScenario, ScenarioError> {
    let scenario = build_scenario(config)?;
    let sim = &scenario.config.simulation;
    let timeline = visibility_timeline(
        &scenario.spec,
        &scenario.satellites,
        &scenario.stations,
        sim.horizon_s,
        sim.gsl_monitor_s,
        scenario.config.constellation.min_elevation_deg,
    );
    let epochs = commodity_epochs(&timeline, &scenario.commodities);
    let mut periods = Vec::new();
    let mut instances = Vec::new();
    if scenario.config.simulation.algorithm != Algorithm::GEdt {
        let mut period_start = 0u64;
        while period_start < sim.horizon_s {
            let period_end = (period_start + sim.planning_period_s).min(sim.horizon_s);
            let instance = build_lpp_instance(&scenario, &epochs, period_start, period_end);
            let relax = lpp::solve_relaxation(&instance)?;
            let (candidates, _residual) = lpp::decompose_flows(&relax, &instance);
            periods.push(PeriodCandidates {
                period_start_s: period_start,
                sol_lp: relax.objective,
                candidates,
                skipped: relax.skipped.len(),
            });
            instances.push(instance);
            period_start = period_end;
        }
    }
    Ok(PreparedScenario { scenario, timeline, epochs, periods, lpp_instance_by_period: instances })
}

fn build_lpp_instance(
    scenario: &BuiltScenario,
    epochs: &CommodityEpochs,
    period_start: u64,
    period_end: u64,
) -> LppInstance {
    let slot = scenario.config.simulation.slot_s as f64;
    let mut blocks = Vec::new();
    for (ci, list) in epochs.per_commodity.iter().enumerate() {
        for (ei, ep) in list.epochs.iter().enumerate() {
            let start = ep.start_s.max(period_start);
            let end = ep.end_s.min(period_end);
            if start >= end {
                continue;
            }
            blocks.push(LppBlock {
                commodity: ci,
                epoch: ei,
                start_s: start,
                end_s: end,
                duration_slots: (end - start) as f64 / slot,
                sources: ep.source_visible.clone(),
                dests: ep.dest_visible.clone(),
            });
        }
    }
    LppInstance {
        satellites: scenario.satellites.clone(),
        isls: scenario.isls.clone(),
        alpha: scenario.config.channel.alpha,
        blocks,
    }
}

/// A selected lightpath dressed with its GSLs and end-to-end success, ready
/// for the augmented graph.
fn materialize_lightpath(scenario: &BuiltScenario, cand: &CandidateLightpath) -> Lightpath {
    let pair = &scenario.commodities[cand.commodity].pair;
    let (src, dst) = (pair.first().clone(), pair.second().clone());
    let channel = &scenario.config.channel;
    let uplink = Gsl {
        station: src.clone(),
        satellite: cand.satellites[0],
        survival: channel.gsl_up_survival,
        direction: GslDirection::Up,
    };
    let downlink = Gsl {
        station: dst.clone(),
        satellite: *cand.satellites.last().unwrap(),
        survival: channel.gsl_down_survival,
        direction: GslDirection::Down,
    };
    let sats: Vec<&crate::netmodel::Satellite> = cand
        .satellites
        .iter()
        .map(|id| scenario.satellites.iter().find(|s| s.id == *id).unwrap())
        .collect();
    let success = crate::channel::lightpath_success(&uplink, &sats, &downlink);
    Lightpath {
        source_station: src,
        dest_station: dst,
        uplink,
        satellites: cand.satellites.clone(),
        downlink,
        capacity: channel.alpha,
        success,
    }
}

fn snapshot_at(scenario: &BuiltScenario, timeline: &VisibilityTimeline, t: u64) -> NetworkSnapshot {
    let channel = &scenario.config.channel;
    let mut gsls = Vec::new();
    for stn in &scenario.stations {
        for sat in timeline.visible_from(&stn.id, t) {
            gsls.push(Gsl {
                station: stn.id.clone(),
                satellite: sat,
                survival: channel.gsl_up_survival,
                direction: GslDirection::Up,
            });
            gsls.push(Gsl {
                station: stn.id.clone(),
                satellite: sat,
                survival: channel.gsl_down_survival,
                direction: GslDirection::Down,
            });
        }
    }
    NetworkSnapshot {
        stations: scenario.stations.clone(),
        fibers: scenario.fibers.clone(),
        satellites: scenario.satellites.clone(),
        isls: scenario.isls.clone(),
        gsls_at_t: gsls,
        time_s: t,
    }
}

/// One seed's end-to-end outcome.
#[derive(Debug, Clone, Serialize)]
pub struct SeedOutcome {
    pub seed: u64,
    pub average_throughput: f64,
    pub satisfaction_ratio: f64,
    /// Per GSL-monitor window: (start_s, mean delivered per slot per commodity).
    pub throughput_series: Vec<(u64, f64)>,
    /// Per demand window: (start_s, fraction of commodities satisfied).
    pub satisfaction_series: Vec<(u64, f64)>,
    /// Time-weighted planned total EDR across segments (executed plan).
    pub planned_total_edr: f64,
    /// Time-weighted optimum of the uncapped max-total program, the
    /// theoretical ceiling for any protocol on the same graphs.
    pub max_total_bound: f64,
    pub realized_total_edr: f64,
    /// Whether the realized total stayed within the max-total bound.
    pub upper_bound_ok: bool,
    pub selected_lightpaths: usize,
    pub sol_lp: f64,
    pub sol_alg: f64,
}

/// Runs one seed end to end, returning the outcome, the traces, and the
/// lightpaths selected per period (for export).
pub fn run_seed(
    prepared: &PreparedScenario,
    seed: u64,
) -> Result<(SeedOutcome, Vec<SlotTrace>, Vec<CandidateLightpath>), ScenarioError> {
    let scenario = &prepared.scenario;
    let sim = &scenario.config.simulation;
    let pairs = scenario.commodity_pairs();
    // provisioning: round each period's shared candidate set
    let mut selected: Vec<CandidateLightpath> = Vec::new();
    let mut sol_lp = 0.0;
    let mut sol_alg = 0.0;
    if sim.algorithm != Algorithm::GEdt {
        for (period, instance) in prepared.periods.iter().zip(&prepared.lpp_instance_by_period) {
            let rounded = match sim.algorithm {
                Algorithm::QuesatD => {
                    lpp::round_deterministic(&period.candidates, instance, period.sol_lp, sim.delta)
                }
                Algorithm::QuesatR => {
                    let mut rng =
                        substream(seed, Stream::Rounding, &[period.period_start_s]);
                    lpp::round_randomized(&period.candidates, instance, period.sol_lp, &mut rng)
                }
                Algorithm::GEdt => unreachable!(),
            };
            sol_lp += rounded.sol_lp;
            sol_alg += rounded.sol_alg;
            selected.extend(rounded.selected);
        }
    }
    // plan segments at every topology or demand change
    let mut events: Vec<u64> = Vec::new();
    let mut t = 0;
    while t < sim.horizon_s {
        events.push(t);
        t += sim.gsl_monitor_s;
    }
    let mut t = 0;
    while t < sim.horizon_s {
        if !events.contains(&t) {
            events.push(t);
        }
        t += sim.demand_change_s;
    }
    events.sort_unstable();
    let mut segments = Vec::new();
    let mut planned_weighted = 0.0;
    let mut bound_weighted = 0.0;
    for (k, &ev) in events.iter().enumerate() {
        let seg_end = events.get(k + 1).copied().unwrap_or(sim.horizon_s);
        let demands: Vec<f64> =
            scenario.commodities.iter().map(|c| c.demand_at(ev)).collect();
        let active: Vec<Lightpath> = selected
            .iter()
            .filter(|c| c.start_s <= ev && ev < c.end_s)
            .map(|c| materialize_lightpath(scenario, c))
            .collect();
        let snapshot = snapshot_at(scenario, &prepared.timeline, ev);
        let graph = build_augmented_graph(&snapshot, &active)?;
        let objective: EdtObjective = scenario.config.simulation.edt_objective.into();
        let input = EdtInput {
            graph: &graph,
            stations: &scenario.stations,
            commodities: &pairs,
            demands: &demands,
            objective,
            repeaters: scenario.config.simulation.repeaters.into(),
        };
        let plan = edt::solve_edt(&input)?;
        // the achievable ceiling is the uncapped max-total optimum
        let ceiling = if objective == EdtObjective::MaxTotal {
            plan.total_edr()
        } else {
            edt::solve_edt(&EdtInput { objective: EdtObjective::MaxTotal, ..input.clone() })?
                .total_edr()
        };
        planned_weighted += plan.total_edr() * (seg_end - ev) as f64;
        bound_weighted += ceiling * (seg_end - ev) as f64;
        segments.push(PlanSegment { from_slot: ev / sim.slot_s, graph, plan });
    }
    let horizon_slots = sim.horizon_s / sim.slot_s;
    let traces = protosim::run_horizon(&segments, &scenario.stations, &pairs, horizon_slots, seed)?;
    let planned_total_edr = planned_weighted / sim.horizon_s as f64;
    let max_total_bound = bound_weighted / sim.horizon_s as f64;

    // metrics, excluding the warmup slots
    let warmup = sim.warmup_slots.min(horizon_slots);
    let measured = &traces[warmup as usize..];
    let average_throughput = protosim::average_throughput(measured, pairs.len())?;
    let demand_windows = demand_windows(scenario, warmup, horizon_slots);
    let satisfaction = protosim::satisfaction_ratio(measured, &demand_windows)?;
    // per-window throughput series over monitor windows
    let mut throughput_series = Vec::new();
    let win_slots = sim.gsl_monitor_s / sim.slot_s;
    let mut w = 0;
    while w < horizon_slots {
        let end = (w + win_slots).min(horizon_slots);
        let in_win: Vec<&SlotTrace> =
            traces.iter().filter(|t| t.slot >= w && t.slot < end).collect();
        let total: u64 = in_win
            .iter()
            .map(|t| t.delivered.iter().map(|d| *d as u64).sum::<u64>())
            .sum();
        let denom = (end - w) as f64 * pairs.len() as f64;
        throughput_series.push((w * sim.slot_s, total as f64 / denom));
        w = end;
    }
    let satisfaction_series: Vec<(u64, f64)> = demand_windows
        .iter()
        .map(|dw| {
            let r = protosim::satisfaction_ratio(measured, std::slice::from_ref(dw)).unwrap_or(0.0);
            (dw.start_slot * sim.slot_s, r)
        })
        .collect();
    let realized = protosim::realized_rates(measured, pairs.len());
    let realized_total: f64 = realized.iter().map(|r| r.mean).sum();
    // upper bound against the time-weighted planned rates
    let total_series: Vec<f64> = measured
        .iter()
        .map(|t| t.delivered.iter().map(|d| *d as f64).sum::<f64>())
        .collect();
    let total_stats = metrics::aggregate(&total_series)?;
    let upper_bound_ok =
        total_stats.mean <= max_total_bound + total_stats.ci99_half_width + 1e-9;
    let outcome = SeedOutcome {
        seed,
        average_throughput,
        satisfaction_ratio: satisfaction,
        throughput_series,
        satisfaction_series,
        planned_total_edr,
        max_total_bound,
        realized_total_edr: realized_total,
        upper_bound_ok,
        selected_lightpaths: selected.len(),
        sol_lp,
        sol_alg,
    };
    Ok((outcome, traces, selected))
}

fn demand_windows(scenario: &BuiltScenario, warmup: u64, horizon_slots: u64) -> Vec<DemandWindow> {
    let sim = &scenario.config.simulation;
    let win_slots = sim.demand_change_s / sim.slot_s;
    let mut out = Vec::new();
    let mut w = 0;
    while w < horizon_slots {
        let end = (w + win_slots).min(horizon_slots);
        let start = w.max(warmup);
        if start < end {
            let t_s = w * sim.slot_s;
            let demands: Vec<f64> =
                scenario.commodities.iter().map(|c| c.demand_at(t_s)).collect();
            out.push(DemandWindow { start_slot: start, end_slot: end, demands });
        }
        w += win_slots;
    }
    out
}

/// Aggregated multi-seed experiment report.
#[derive(Debug, Serialize)]
pub struct ExperimentReport {
    pub algorithm: Algorithm,
    pub seeds: Vec<u64>,
    pub throughput: SummaryStats,
    pub satisfaction: SummaryStats,
    pub per_seed: Vec<SeedOutcome>,
    /// Mean over seeds per monitor window start.
    pub throughput_series_mean: Vec<(u64, f64)>,
    pub satisfaction_series_mean: Vec<(u64, f64)>,
    pub assumptions: Assumptions,
}

/// Defaults that stand in for values the evaluation leaves unstated; kept
/// in the report header so runs are self-describing.
#[derive(Debug, Serialize)]
pub struct Assumptions {
    pub lens_capacity: u32,
    pub min_elevation_deg: f64,
    pub altitude_km: f64,
    pub station_set: Vec<String>,
    pub distance_scale: f64,
    pub edt_objective: ObjectiveConfig,
}

/// Runs the full experiment over the given seeds and aggregates.
pub fn run_experiment(config: &ScenarioConfig, seeds: &[u64]) -> Result<ExperimentReport, ScenarioError> {
    let prepared = prepare(config)?;
    let mut per_seed = Vec::new();
    for &seed in seeds {
        let (outcome, _traces, _selected) = run_seed(&prepared, seed)?;
        per_seed.push(outcome);
    }
    summarize(config, seeds, per_seed)
}

/// Aggregates per-seed outcomes into the cross-seed report.
pub fn summarize(
    config: &ScenarioConfig,
    seeds: &[u64],
    per_seed: Vec<SeedOutcome>,
) -> Result<ExperimentReport, ScenarioError> {
    let throughput =
        metrics::aggregate(&per_seed.iter().map(|o| o.average_throughput).collect::<Vec<_>>())?;
    let satisfaction =
        metrics::aggregate(&per_seed.iter().map(|o| o.satisfaction_ratio).collect::<Vec<_>>())?;
    let series_mean = |pick: fn(&SeedOutcome) -> &Vec<(u64, f64)>| -> Vec<(u64, f64)> {
        if per_seed.is_empty() {
            return Vec::new();
        }
        let n = pick(&per_seed[0]).len();
        (0..n)
            .map(|k| {
                let t = pick(&per_seed[0])[k].0;
                let v =
                    per_seed.iter().map(|o| pick(o)[k].1).sum::<f64>() / per_seed.len() as f64;
                (t, v)
            })
            .collect()
    };
    let report = ExperimentReport {
        algorithm: config.simulation.algorithm,
        seeds: seeds.to_vec(),
        throughput,
        satisfaction,
        throughput_series_mean: series_mean(|o| &o.throughput_series),
        satisfaction_series_mean: series_mean(|o| &o.satisfaction_series),
        per_seed,
        assumptions: Assumptions {
            lens_capacity: config.constellation.lens_capacity,
            min_elevation_deg: config.constellation.min_elevation_deg,
            altitude_km: config.constellation.altitude_km,
            station_set: config.stations.iter().map(|s| s.id.clone()).collect(),
            distance_scale: config.simulation.distance_scale,
            edt_objective: config.simulation.edt_objective,
        },
    };
    Ok(report)
}

/// CSV export of selected lightpaths:
/// `commodity,epoch,start_s,end_s,sat_sequence,q_path,alpha`.
pub fn lightpaths_csv(scenario: &BuiltScenario, selected: &[CandidateLightpath]) -> String {
    let mut out = String::from("commodity,epoch,start_s,end_s,sat_sequence,q_path,alpha\n");
    for c in selected {
        let lp = materialize_lightpath(scenario, c);
        let seq = c
            .satellites
            .iter()
            .map(|s| s.0.to_string())
            .collect::<Vec<_>>()
            .join("|");
        out.push_str(&format!(
            "{},{},{},{},{},{:.9},{}\n",
            scenario.commodities[c.commodity].pair,
            c.epoch,
            c.start_s,
            c.end_s,
            seq,
            lp.success,
            lp.capacity
        ));
    }
    out
}

/// CSV export of traces: `slot,commodity,delivered`.
pub fn traces_csv(traces: &[SlotTrace], pairs: &[StationPair]) -> String {
    let mut out = String::from("slot,commodity,delivered\n");
    for t in traces {
        for (c, d) in t.delivered.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", t.slot, pairs[c], d));
        }
    }
    out
}

//! Domain types for the hybrid ground-satellite graph: ground stations and
//! fibers, satellites and ISLs, time-varying GSLs, commodities with demand
//! series, and the augmented ground multigraph that EDT planning runs on.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Ground station identifier (human-readable, e.g. a city name).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StationId(pub String);

impl fmt::Display for StationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Satellite identifier, dense index into the constellation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SatelliteId(pub u32);

impl fmt::Display for SatelliteId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s{}", self.0)
    }
}

/// An unordered ground-station pair in canonical (sorted) order, so that
/// `mn` and `nm` resolve to the same key everywhere.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct StationPair(StationId, StationId);

impl StationPair {
    pub fn new(a: StationId, b: StationId) -> Self {
        if a <= b {
            StationPair(a, b)
        } else {
            StationPair(b, a)
        }
    }

    pub fn first(&self) -> &StationId {
        &self.0
    }

    pub fn second(&self) -> &StationId {
        &self.1
    }

    pub fn contains(&self, s: &StationId) -> bool {
        &self.0 == s || &self.1 == s
    }

    /// The endpoint other than `s`; panics if `s` is not an endpoint.
    pub fn other(&self, s: &StationId) -> &StationId {
        if &self.0 == s {
            &self.1
        } else {
            assert!(&self.1 == s, "{s} is not an endpoint of {self}");
            &self.0
        }
    }
}

impl fmt::Display for StationPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: StationId,
    /// Degrees, [-90, 90].
    pub latitude: f64,
    /// Degrees, [-180, 180].
    pub longitude: f64,
    /// Swapping success probability at this station's repeater, in (0, 1].
    pub swap_success: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FiberLink {
    pub endpoints: StationPair,
    /// Number of ebit-attempt channels per slot, >= 1.
    pub capacity: u32,
    /// Per-slot generation success probability on one channel, in (0, 1].
    pub gen_success: f64,
    /// Span length in km; retained for re-derivation under distance scaling.
    pub length_km: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Satellite {
    pub id: SatelliteId,
    pub plane_index: u32,
    pub slot_index: u32,
    /// Lens sets available for lightpaths, >= 1.
    pub lens_capacity: u32,
    /// Survival probability through one lens set, in (0, 1].
    pub lens_success: f64,
}

/// Inter-satellite link as an unordered satellite pair; the ISL set is
/// time-invariant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Isl(SatelliteId, SatelliteId);

impl Isl {
    pub fn new(a: SatelliteId, b: SatelliteId) -> Self {
        assert_ne!(a, b, "ISL endpoints must be distinct");
        if a <= b {
            Isl(a, b)
        } else {
            Isl(b, a)
        }
    }

    pub fn endpoints(&self) -> (SatelliteId, SatelliteId) {
        (self.0, self.1)
    }

    pub fn touches(&self, s: SatelliteId) -> bool {
        self.0 == s || self.1 == s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GslDirection {
    Up,
    Down,
}

/// Ground-satellite link with its atmospheric survival probability. Uplink
/// and downlink are separate entries since their losses are typically
/// asymmetric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gsl {
    pub station: StationId,
    pub satellite: SatelliteId,
    /// Photon survival probability through the atmosphere, in (0, 1].
    pub survival: f64,
    pub direction: GslDirection,
}

/// Snapshot of the full hybrid graph at one instant: the static ground and
/// satellite parts plus the GSL set active at `time_s`.
#[derive(Debug, Clone)]
pub struct NetworkSnapshot {
    pub stations: Vec<GroundStation>,
    pub fibers: Vec<FiberLink>,
    pub satellites: Vec<Satellite>,
    pub isls: Vec<Isl>,
    pub gsls_at_t: Vec<Gsl>,
    pub time_s: u64,
}

impl NetworkSnapshot {
    pub fn has_gsl(&self, station: &StationId, satellite: SatelliteId, dir: GslDirection) -> bool {
        self.gsls_at_t
            .iter()
            .any(|g| &g.station == station && g.satellite == satellite && g.direction == dir)
    }
}

/// A provisioned satellite lightpath: uplink GSL, the satellite sequence
/// (ISL chain; empty for a single-bounce path), downlink GSL, uniform
/// capacity alpha, and end-to-end success q(p).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lightpath {
    pub source_station: StationId,
    pub dest_station: StationId,
    pub uplink: Gsl,
    /// Satellites traversed in order; the ISL sequence connects consecutive
    /// entries.
    pub satellites: Vec<SatelliteId>,
    pub downlink: Gsl,
    /// Ebits per slot the path can carry, the scenario-wide constant alpha.
    pub capacity: f64,
    /// End-to-end success probability q(p).
    pub success: f64,
}

impl Lightpath {
    pub fn station_pair(&self) -> StationPair {
        StationPair::new(self.source_station.clone(), self.dest_station.clone())
    }
}

/// A commodity (SD pair) with its piecewise-constant demand series keyed by
/// window start time in seconds.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Commodity {
    pub pair: StationPair,
    /// Requested expected EDR (ebits/slot) from each change time onward.
    pub demand_series: BTreeMap<u64, f64>,
}

impl Commodity {
    pub fn new(a: StationId, b: StationId) -> Self {
        Commodity { pair: StationPair::new(a, b), demand_series: BTreeMap::new() }
    }

    /// Demand in force at time `t_s` (0 before the first entry).
    pub fn demand_at(&self, t_s: u64) -> f64 {
        self.demand_series.range(..=t_s).next_back().map(|(_, z)| *z).unwrap_or(0.0)
    }
}

/// One parallel edge of the augmented ground multigraph.
#[derive(Debug, Clone)]
pub enum AugEdge {
    Fiber { capacity: u32, gen_success: f64 },
    /// A provisioned lightpath acting as a virtual link.
    Virtual { capacity: f64, success: f64 },
}

impl AugEdge {
    /// Per-slot attempt capacity of this edge.
    pub fn capacity(&self) -> f64 {
        match self {
            AugEdge::Fiber { capacity, .. } => *capacity as f64,
            AugEdge::Virtual { capacity, .. } => *capacity,
        }
    }

    /// Per-attempt success probability of this edge.
    pub fn success(&self) -> f64 {
        match self {
            AugEdge::Fiber { gen_success, .. } => *gen_success,
            AugEdge::Virtual { success, .. } => *success,
        }
    }
}

/// Augmented ground repeater network: every fiber link plus every active
/// lightpath as a parallel virtual edge between its station pair.
#[derive(Debug, Clone, Default)]
pub struct AugmentedGraph {
    pub stations: Vec<StationId>,
    /// Parallel edges grouped by canonical station pair.
    pub edges: BTreeMap<StationPair, Vec<AugEdge>>,
}

impl AugmentedGraph {
    pub fn edge_count(&self) -> usize {
        self.edges.values().map(Vec::len).sum()
    }

    pub fn edges_between(&self, pair: &StationPair) -> &[AugEdge] {
        self.edges.get(pair).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Combined attempt capacity over all parallel edges of a pair.
    pub fn combined_capacity(&self, pair: &StationPair) -> f64 {
        self.edges_between(pair).iter().map(AugEdge::capacity).sum()
    }

    /// Expected generation rate at full generation ratio: sum of c*q over
    /// parallel edges.
    pub fn combined_rate(&self, pair: &StationPair) -> f64 {
        self.edges_between(pair).iter().map(|e| e.capacity() * e.success()).sum()
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("lightpath {source_station}->{dest_station}: {direction:?} GSL to {satellite} absent from snapshot at t={time_s}")]
    GslNotActive {
        source_station: StationId,
        dest_station: StationId,
        satellite: SatelliteId,
        direction: GslDirection,
        time_s: u64,
    },
}

/// Builds the augmented ground multigraph from a snapshot and the lightpaths
/// provisioned for it. Every fiber contributes one edge and every lightpath
/// one parallel virtual edge; a lightpath whose uplink or downlink GSL is
/// not active in the snapshot is rejected.
pub fn build_augmented_graph(
    snapshot: &NetworkSnapshot,
    provisioned: &[Lightpath],
) -> Result<AugmentedGraph, GraphError> {
    let mut graph = AugmentedGraph {
        stations: snapshot.stations.iter().map(|s| s.id.clone()).collect(),
        edges: BTreeMap::new(),
    };
    for fiber in &snapshot.fibers {
        graph.edges.entry(fiber.endpoints.clone()).or_default().push(AugEdge::Fiber {
            capacity: fiber.capacity,
            gen_success: fiber.gen_success,
        });
    }
    for lp in provisioned {
        for (gsl, dir) in [(&lp.uplink, GslDirection::Up), (&lp.downlink, GslDirection::Down)] {
            if !snapshot.has_gsl(&gsl.station, gsl.satellite, dir) {
                return Err(GraphError::GslNotActive {
                    source_station: lp.source_station.clone(),
                    dest_station: lp.dest_station.clone(),
                    satellite: gsl.satellite,
                    direction: dir,
                    time_s: snapshot.time_s,
                });
            }
        }
        graph.edges.entry(lp.station_pair()).or_default().push(AugEdge::Virtual {
            capacity: lp.capacity,
            success: lp.success,
        });
    }
    Ok(graph)
}

/// One scenario validation finding; the report lists every violation rather
/// than stopping at the first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub subject: String,
    pub problem: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.subject, self.problem)
    }
}

fn check_prob(report: &mut Vec<Violation>, subject: &str, name: &str, v: f64) {
    if !(v > 0.0 && v <= 1.0) {
        report.push(Violation {
            subject: subject.to_string(),
            problem: format!("{name} = {v} outside (0, 1]"),
        });
    }
}

/// Validates a scenario's static parts, returning every invariant violation
/// found. An empty report means the scenario is well-formed.
pub fn validate_scenario(
    stations: &[GroundStation],
    fibers: &[FiberLink],
    satellites: &[Satellite],
    commodities: &[Commodity],
) -> Vec<Violation> {
    let mut report = Vec::new();
    let mut station_ids = std::collections::BTreeSet::new();
    for st in stations {
        let subject = format!("station {}", st.id);
        if !station_ids.insert(st.id.clone()) {
            report.push(Violation { subject: subject.clone(), problem: "duplicate id".into() });
        }
        if !(-90.0..=90.0).contains(&st.latitude) {
            report.push(Violation {
                subject: subject.clone(),
                problem: format!("latitude {} outside [-90, 90]", st.latitude),
            });
        }
        if !(-180.0..=180.0).contains(&st.longitude) {
            report.push(Violation {
                subject: subject.clone(),
                problem: format!("longitude {} outside [-180, 180]", st.longitude),
            });
        }
        check_prob(&mut report, &subject, "swap_success", st.swap_success);
    }
    for fiber in fibers {
        let subject = format!("fiber {}", fiber.endpoints);
        if fiber.endpoints.first() == fiber.endpoints.second() {
            report.push(Violation { subject: subject.clone(), problem: "endpoints not distinct".into() });
        }
        for end in [fiber.endpoints.first(), fiber.endpoints.second()] {
            if !station_ids.contains(end) {
                report.push(Violation {
                    subject: subject.clone(),
                    problem: format!("references unknown station {end}"),
                });
            }
        }
        if fiber.capacity < 1 {
            report.push(Violation { subject: subject.clone(), problem: "capacity < 1".into() });
        }
        check_prob(&mut report, &subject, "gen_success", fiber.gen_success);
        if fiber.length_km < 0.0 {
            report.push(Violation { subject, problem: format!("length_km {} < 0", fiber.length_km) });
        }
    }
    let mut sat_ids = std::collections::BTreeSet::new();
    for sat in satellites {
        let subject = format!("satellite {}", sat.id);
        if !sat_ids.insert(sat.id) {
            report.push(Violation { subject: subject.clone(), problem: "duplicate id".into() });
        }
        if sat.lens_capacity < 1 {
            report.push(Violation { subject: subject.clone(), problem: "lens_capacity < 1".into() });
        }
        check_prob(&mut report, &subject, "lens_success", sat.lens_success);
    }
    let mut pairs = std::collections::BTreeSet::new();
    for com in commodities {
        let subject = format!("commodity {}", com.pair);
        if com.pair.first() == com.pair.second() {
            report.push(Violation { subject: subject.clone(), problem: "source equals destination".into() });
        }
        if !pairs.insert(com.pair.clone()) {
            report.push(Violation { subject: subject.clone(), problem: "duplicate commodity pair".into() });
        }
        for end in [com.pair.first(), com.pair.second()] {
            if !station_ids.contains(end) {
                report.push(Violation {
                    subject: subject.clone(),
                    problem: format!("references unknown station {end}"),
                });
            }
        }
        for (t, z) in &com.demand_series {
            if *z < 0.0 {
                report.push(Violation {
                    subject: subject.clone(),
                    problem: format!("demand {z} at t={t} is negative"),
                });
            }
        }
    }
    report
}

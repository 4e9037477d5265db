//! Constellation generation, circular-orbit propagation with Earth
//! rotation, sampled GSL visibility timelines, and per-commodity
//! topology-change epochs.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::netmodel::{Commodity, GroundStation, Isl, Satellite, SatelliteId, StationId};

pub const EARTH_RADIUS_KM: f64 = 6371.0;
/// Standard gravitational parameter of Earth, km^3/s^2.
pub const MU_EARTH: f64 = 398600.4418;
/// Earth sidereal rotation rate, rad/s.
pub const EARTH_ROTATION_RAD_S: f64 = 7.2921159e-5;

/// Walker-style constellation: `num_planes` evenly spaced in RAAN over a
/// full circle, `sats_per_plane` evenly spaced in anomaly, with an optional
/// inter-plane phasing offset as a fraction of the in-plane spacing.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstellationSpec {
    pub num_planes: u32,
    pub sats_per_plane: u32,
    pub inclination_deg: f64,
    pub altitude_km: f64,
    /// Fraction of the in-plane spacing applied per plane index.
    pub phasing_offset: f64,
}

impl ConstellationSpec {
    pub fn total_satellites(&self) -> u32 {
        self.num_planes * self.sats_per_plane
    }

    pub fn orbit_radius_km(&self) -> f64 {
        EARTH_RADIUS_KM + self.altitude_km
    }

    /// Orbital period from Kepler's third law, seconds.
    pub fn orbital_period_s(&self) -> f64 {
        let a = self.orbit_radius_km();
        2.0 * std::f64::consts::PI * (a.powi(3) / MU_EARTH).sqrt()
    }
}

/// Generates the satellites and the static +grid ISL set: each satellite is
/// linked to its two in-plane neighbors and to the same slot in both
/// adjacent planes, with unordered-pair (and self-link) deduplication so
/// degenerate constellations collapse correctly.
pub fn generate_constellation(
    spec: &ConstellationSpec,
    lens_capacity: u32,
    lens_success: f64,
) -> (Vec<Satellite>, Vec<Isl>) {
    let p = spec.num_planes;
    let s = spec.sats_per_plane;
    assert!(p >= 1 && s >= 1, "constellation must have at least one satellite");
    let id = |plane: u32, slot: u32| SatelliteId(plane * s + slot);
    let mut satellites = Vec::with_capacity((p * s) as usize);
    for plane in 0..p {
        for slot in 0..s {
            satellites.push(Satellite {
                id: id(plane, slot),
                plane_index: plane,
                slot_index: slot,
                lens_capacity,
                lens_success,
            });
        }
    }
    let mut isls = std::collections::BTreeSet::new();
    for plane in 0..p {
        for slot in 0..s {
            let me = id(plane, slot);
            let neighbors = [
                id(plane, (slot + 1) % s),
                id(plane, (slot + s - 1) % s),
                id((plane + 1) % p, slot),
                id((plane + p - 1) % p, slot),
            ];
            for n in neighbors {
                if n != me {
                    isls.insert(Isl::new(me, n));
                }
            }
        }
    }
    (satellites, isls.into_iter().collect())
}

/// Geocentric inertial position of a satellite on its circular orbit, km.
pub fn propagate_eci(spec: &ConstellationSpec, sat: &Satellite, time_s: f64) -> [f64; 3] {
    let r = spec.orbit_radius_km();
    let n = (MU_EARTH / r.powi(3)).sqrt();
    let raan = 2.0 * std::f64::consts::PI * sat.plane_index as f64 / spec.num_planes as f64;
    let spacing = 2.0 * std::f64::consts::PI / spec.sats_per_plane as f64;
    let u0 = spacing * (sat.slot_index as f64 + spec.phasing_offset * sat.plane_index as f64);
    let u = u0 + n * time_s;
    let inc = spec.inclination_deg.to_radians();
    let (sin_u, cos_u) = u.sin_cos();
    let (sin_o, cos_o) = raan.sin_cos();
    let (sin_i, cos_i) = inc.sin_cos();
    [
        r * (cos_o * cos_u - sin_o * sin_u * cos_i),
        r * (sin_o * cos_u + cos_o * sin_u * cos_i),
        r * sin_u * sin_i,
    ]
}

/// Satellite position in the rotating Earth-fixed frame (Earth rotation
/// applied; Greenwich aligned with the inertial x-axis at t = 0).
pub fn propagate_ecef(spec: &ConstellationSpec, sat: &Satellite, time_s: f64) -> [f64; 3] {
    let [x, y, z] = propagate_eci(spec, sat, time_s);
    let theta = EARTH_ROTATION_RAD_S * time_s;
    let (sin_t, cos_t) = theta.sin_cos();
    [x * cos_t + y * sin_t, -x * sin_t + y * cos_t, z]
}

/// Earth-fixed position of a ground station on the spherical Earth, km.
pub fn station_ecef(station: &GroundStation) -> [f64; 3] {
    let phi = station.latitude.to_radians();
    let lam = station.longitude.to_radians();
    [
        EARTH_RADIUS_KM * phi.cos() * lam.cos(),
        EARTH_RADIUS_KM * phi.cos() * lam.sin(),
        EARTH_RADIUS_KM * phi.sin(),
    ]
}

/// Elevation of `sat_ecef` above the local horizon of `stn_ecef`, degrees.
pub fn elevation_deg(stn_ecef: [f64; 3], sat_ecef: [f64; 3]) -> f64 {
    let d = [sat_ecef[0] - stn_ecef[0], sat_ecef[1] - stn_ecef[1], sat_ecef[2] - stn_ecef[2]];
    let dn = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
    let sn = (stn_ecef[0] * stn_ecef[0] + stn_ecef[1] * stn_ecef[1] + stn_ecef[2] * stn_ecef[2]).sqrt();
    let dot = d[0] * stn_ecef[0] + d[1] * stn_ecef[1] + d[2] * stn_ecef[2];
    let sin_el = (dot / (dn * sn)).clamp(-1.0, 1.0);
    sin_el.asin().to_degrees()
}

/// Great-circle distance between two stations on the spherical Earth, km.
pub fn great_circle_km(a: &GroundStation, b: &GroundStation) -> f64 {
    let (phi1, lam1) = (a.latitude.to_radians(), a.longitude.to_radians());
    let (phi2, lam2) = (b.latitude.to_radians(), b.longitude.to_radians());
    let dphi = phi2 - phi1;
    let dlam = lam2 - lam1;
    let h = (dphi / 2.0).sin().powi(2) + phi1.cos() * phi2.cos() * (dlam / 2.0).sin().powi(2);
    2.0 * EARTH_RADIUS_KM * h.sqrt().asin()
}

/// Sampled visibility windows per (station, satellite) pair. A sample at
/// time t asserts visibility over [t, t + step); consecutive visible
/// samples coalesce into half-open `[rise, set)` intervals whose endpoints
/// are multiples of the sampling step.
#[derive(Debug, Clone)]
pub struct VisibilityTimeline {
    pub intervals: BTreeMap<(StationId, SatelliteId), Vec<(u64, u64)>>,
    pub step_s: u64,
    pub horizon_s: u64,
}

impl VisibilityTimeline {
    /// Satellites visible from `station` at time `t_s`.
    pub fn visible_from(&self, station: &StationId, t_s: u64) -> Vec<SatelliteId> {
        let mut out = Vec::new();
        for ((st, sat), ivals) in &self.intervals {
            if st == station && ivals.iter().any(|(r, s)| *r <= t_s && t_s < *s) {
                out.push(*sat);
            }
        }
        out
    }
}

/// Samples elevation for every (station, satellite) pair on the step grid
/// and coalesces the visible samples into intervals. Deterministic for
/// fixed inputs.
pub fn visibility_timeline(
    spec: &ConstellationSpec,
    satellites: &[Satellite],
    stations: &[GroundStation],
    horizon_s: u64,
    step_s: u64,
    min_elevation_deg: f64,
) -> VisibilityTimeline {
    assert!(step_s > 0, "sampling step must be positive");
    assert!(horizon_s >= step_s, "horizon must cover at least one step");
    let stn_pos: Vec<[f64; 3]> = stations.iter().map(station_ecef).collect();
    let samples: Vec<u64> = (0..horizon_s / step_s).map(|k| k * step_s).collect();
    let mut intervals = BTreeMap::new();
    for sat in satellites {
        let sat_pos: Vec<[f64; 3]> = samples
            .iter()
            .map(|t| propagate_ecef(spec, sat, *t as f64))
            .collect();
        for (stn, pos) in stations.iter().zip(&stn_pos) {
            let mut ivals: Vec<(u64, u64)> = Vec::new();
            let mut current: Option<(u64, u64)> = None;
            for (t, sp) in samples.iter().zip(&sat_pos) {
                let visible = elevation_deg(*pos, *sp) >= min_elevation_deg;
                match (visible, current) {
                    (true, None) => current = Some((*t, t + step_s)),
                    (true, Some((r, _))) => current = Some((r, t + step_s)),
                    (false, Some(iv)) => {
                        ivals.push(iv);
                        current = None;
                    }
                    (false, None) => {}
                }
            }
            if let Some((r, s)) = current {
                ivals.push((r, s.min(horizon_s)));
            }
            if !ivals.is_empty() {
                intervals.insert((stn.id.clone(), sat.id), ivals);
            }
        }
    }
    VisibilityTimeline { intervals, step_s, horizon_s }
}

/// Serializes a timeline as `station,satellite,rise_s,set_s` rows so
/// external orbit tools can replace the built-in propagator.
pub fn timeline_to_csv(timeline: &VisibilityTimeline) -> String {
    let mut out = String::from("station,satellite,rise_s,set_s\n");
    for ((stn, sat), ivals) in &timeline.intervals {
        for (rise, set) in ivals {
            out.push_str(&format!("{},{},{},{}\n", stn, sat.0, rise, set));
        }
    }
    out
}

#[derive(Debug, thiserror::Error)]
#[error("timeline csv line {line}: {reason}")]
pub struct TimelineParseError {
    pub line: usize,
    pub reason: String,
}

/// Parses a timeline previously produced by [`timeline_to_csv`] (or an
/// external tool emitting the same columns).
pub fn timeline_from_csv(
    text: &str,
    step_s: u64,
    horizon_s: u64,
) -> Result<VisibilityTimeline, TimelineParseError> {
    let mut intervals: BTreeMap<(StationId, SatelliteId), Vec<(u64, u64)>> = BTreeMap::new();
    for (ln, line) in text.lines().enumerate() {
        if ln == 0 && line.starts_with("station,") {
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 4 {
            return Err(TimelineParseError { line: ln + 1, reason: "expected 4 fields".into() });
        }
        let parse = |s: &str| -> Result<u64, TimelineParseError> {
            s.trim().parse().map_err(|e| TimelineParseError {
                line: ln + 1,
                reason: format!("bad number {s:?}: {e}"),
            })
        };
        let sat = SatelliteId(parse(fields[1])? as u32);
        let rise = parse(fields[2])?;
        let set = parse(fields[3])?;
        if rise >= set {
            return Err(TimelineParseError { line: ln + 1, reason: "rise must precede set".into() });
        }
        intervals
            .entry((StationId(fields[0].trim().to_string()), sat))
            .or_default()
            .push((rise, set));
    }
    for ivals in intervals.values_mut() {
        ivals.sort_unstable();
    }
    Ok(VisibilityTimeline { intervals, step_s, horizon_s })
}

/// One topology-stable interval for a commodity, with the candidate
/// satellites visible from each endpoint throughout.
#[derive(Debug, Clone)]
pub struct Epoch {
    pub start_s: u64,
    pub end_s: u64,
    pub source_visible: Vec<SatelliteId>,
    pub dest_visible: Vec<SatelliteId>,
}

#[derive(Debug, Clone)]
pub struct CommodityEpochList {
    /// Times in (0, horizon) at which the GSL set of either endpoint changes.
    pub changes: Vec<u64>,
    pub epochs: Vec<Epoch>,
}

impl CommodityEpochList {
    /// The topology-change index m_i^t: number of changes at or before `t`.
    pub fn epoch_index(&self, t_s: u64) -> usize {
        self.changes.iter().take_while(|c| **c <= t_s).count()
    }
}

/// Per-commodity epoch decomposition of the planning horizon.
#[derive(Debug, Clone)]
pub struct CommodityEpochs {
    pub per_commodity: Vec<CommodityEpochList>,
    /// Commodity endpoints with no visibility anywhere in the horizon.
    pub never_visible: Vec<StationId>,
    pub horizon_s: u64,
}

/// Derives each commodity's change times (rise/set events of GSLs incident
/// to either endpoint) and the epoch intervals between them, together with
/// the candidate satellite sets per epoch. Endpoints that never see a
/// satellite are flagged; the epoch list is still produced.
pub fn commodity_epochs(timeline: &VisibilityTimeline, commodities: &[Commodity]) -> CommodityEpochs {
    let horizon = timeline.horizon_s;
    let mut never_visible = Vec::new();
    let mut per_commodity = Vec::with_capacity(commodities.len());
    for com in commodities {
        let src = com.pair.first();
        let dst = com.pair.second();
        let mut changes = std::collections::BTreeSet::new();
        for (key, ivals) in &timeline.intervals {
            if &key.0 == src || &key.0 == dst {
                for (rise, set) in ivals {
                    for t in [*rise, *set] {
                        if t > 0 && t < horizon {
                            changes.insert(t);
                        }
                    }
                }
            }
        }
        for stn in [src, dst] {
            let any = timeline.intervals.keys().any(|(s, _)| s == stn);
            if !any && !never_visible.contains(stn) {
                never_visible.push(stn.clone());
            }
        }
        let changes: Vec<u64> = changes.into_iter().collect();
        let mut boundaries = vec![0u64];
        boundaries.extend(&changes);
        boundaries.push(horizon);
        let epochs = boundaries
            .windows(2)
            .map(|w| Epoch {
                start_s: w[0],
                end_s: w[1],
                source_visible: timeline.visible_from(src, w[0]),
                dest_visible: timeline.visible_from(dst, w[0]),
            })
            .collect();
        per_commodity.push(CommodityEpochList { changes, epochs });
    }
    CommodityEpochs { per_commodity, never_visible, horizon_s: horizon }
}

//! Lightpath provisioning: the LP relaxation of the per-epoch path
//! selection program, flow decomposition into candidate lightpaths, and the
//! randomized / deterministic rounding algorithms with capacity-restoring
//! pruning.
//!
//! The relaxation is solved either monolithically through `lpsolve` (small
//! instances) or by exact Dantzig-Wolfe decomposition over commodity-epoch
//! blocks (large instances); both routes return the same optimum and are
//! cross-checked in tests.

mod dw;

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::lpsolve::{self, LpModel, LpStatus, ModelError, Relation, VarId};
use crate::netmodel::{Isl, Satellite, SatelliteId};

/// One (commodity, epoch) planning block: the interval over which the
/// commodity's candidate GSL endpoints are stable.
#[derive(Debug, Clone)]
pub struct LppBlock {
    pub commodity: usize,
    pub epoch: usize,
    pub start_s: u64,
    pub end_s: u64,
    /// Objective weight: epoch duration in time slots.
    pub duration_slots: f64,
    pub sources: Vec<SatelliteId>,
    pub dests: Vec<SatelliteId>,
}

/// Input to the provisioning relaxation for one planning period.
#[derive(Debug, Clone)]
pub struct LppInstance {
    pub satellites: Vec<Satellite>,
    pub isls: Vec<Isl>,
    /// Uniform lightpath capacity, ebits per slot.
    pub alpha: f64,
    pub blocks: Vec<LppBlock>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SkipReason {
    EmptySources,
    EmptyDests,
    /// Every destination candidate is also a source candidate, so no
    /// ISL-traversing path can terminate.
    NoDeliveryCandidates,
}

#[derive(Debug, Clone)]
pub struct SkippedBlock {
    pub commodity: usize,
    pub epoch: usize,
    pub reason: SkipReason,
}

/// Index helpers shared by the monolithic and per-block model builders.
pub(crate) struct Topology {
    pub sat_index: BTreeMap<SatelliteId, usize>,
    /// Per satellite: (isl index, forward) incidences; `forward` means the
    /// satellite is the first endpoint of the ISL.
    pub incident: Vec<Vec<(usize, bool)>>,
    pub degree: Vec<usize>,
}

impl Topology {
    pub fn new(satellites: &[Satellite], isls: &[Isl]) -> Self {
        let sat_index: BTreeMap<SatelliteId, usize> =
            satellites.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        let mut incident = vec![Vec::new(); satellites.len()];
        for (ei, isl) in isls.iter().enumerate() {
            let (a, b) = isl.endpoints();
            incident[sat_index[&a]].push((ei, true));
            incident[sat_index[&b]].push((ei, false));
        }
        let degree = incident.iter().map(Vec::len).collect();
        Topology { sat_index, incident, degree }
    }
}

/// Variable ids of one block inside a model.
#[derive(Debug, Clone)]
pub(crate) struct BlockVars {
    /// x per ISL, the relaxed selection variables in [0, 1].
    pub x: Vec<VarId>,
    /// Directed flows per ISL: `f[2e]` forward, `f[2e+1]` reverse.
    pub f: Vec<VarId>,
    /// Origination at each source candidate, aligned with `sources_eff`.
    pub a: Vec<VarId>,
    /// Delivered (post-attenuation) flow at each destination candidate,
    /// aligned with `dests_eff`.
    pub h: Vec<VarId>,
    pub sources_eff: Vec<usize>,
    pub dests_eff: Vec<usize>,
}

pub(crate) enum BlockBuild {
    Built(BlockVars),
    Skipped(SkipReason),
}

/// Adds one block's variables and rows (selection coupling and attenuated
/// conservation) to `model`. Capacity rows are global and added separately.
pub(crate) fn add_block(
    model: &mut LpModel,
    inst: &LppInstance,
    topo: &Topology,
    block: &LppBlock,
    tag: usize,
) -> Result<BlockBuild, ModelError> {
    if block.sources.is_empty() {
        return Ok(BlockBuild::Skipped(SkipReason::EmptySources));
    }
    if block.dests.is_empty() {
        return Ok(BlockBuild::Skipped(SkipReason::EmptyDests));
    }
    let sources_eff: Vec<usize> = block.sources.iter().map(|s| topo.sat_index[s]).collect();
    let dests_eff: Vec<usize> = block
        .dests
        .iter()
        .map(|s| topo.sat_index[s])
        .filter(|v| !sources_eff.contains(v))
        .collect();
    if dests_eff.is_empty() {
        return Ok(BlockBuild::Skipped(SkipReason::NoDeliveryCandidates));
    }
    let alpha = inst.alpha;
    let ne = inst.isls.len();
    let x: Vec<VarId> = (0..ne).map(|e| model.add_var(format!("x_{tag}_{e}"), 0.0, 1.0, 0.0)).collect();
    let mut f = Vec::with_capacity(2 * ne);
    for e in 0..ne {
        f.push(model.add_var(format!("f_{tag}_{e}_fw"), 0.0, alpha, 0.0));
        f.push(model.add_var(format!("f_{tag}_{e}_rv"), 0.0, alpha, 0.0));
    }
    let a: Vec<VarId> = sources_eff
        .iter()
        .map(|v| model.add_var(format!("a_{tag}_{v}"), 0.0, alpha * topo.degree[*v] as f64, 0.0))
        .collect();
    let h: Vec<VarId> = dests_eff
        .iter()
        .map(|v| {
            model.add_var(format!("h_{tag}_{v}"), 0.0, alpha * topo.degree[*v] as f64, block.duration_slots)
        })
        .collect();
    // selection coupling: flow in both directions fits within alpha * x
    for e in 0..ne {
        model.add_constraint(
            [(f[2 * e], 1.0), (f[2 * e + 1], 1.0), (x[e], -alpha)],
            Relation::Le,
            0.0,
        )?;
    }
    // conservation with per-lens attenuation; source candidates originate
    // unattenuated, destination candidates divert delivered flow
    for (v, sat) in inst.satellites.iter().enumerate() {
        let q = sat.lens_success;
        let is_src = sources_eff.contains(&v);
        let dest_pos = dests_eff.iter().position(|d| *d == v);
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        for &(e, fwd) in &topo.incident[v] {
            let (f_out, f_in) = if fwd { (f[2 * e], f[2 * e + 1]) } else { (f[2 * e + 1], f[2 * e]) };
            if is_src {
                // out - q*in - a = 0
                terms.push((f_out, 1.0));
                terms.push((f_in, -q));
            } else {
                // q*in - out (- h) = 0
                terms.push((f_in, q));
                terms.push((f_out, -1.0));
            }
        }
        if is_src {
            let pos = sources_eff.iter().position(|s| *s == v).unwrap();
            terms.push((a[pos], -1.0));
        } else if let Some(pos) = dest_pos {
            terms.push((h[pos], -1.0));
        } else if terms.is_empty() {
            continue;
        }
        model.add_constraint(terms, Relation::Eq, 0.0)?;
    }
    Ok(BlockBuild::Built(BlockVars { x, f, a, h, sources_eff, dests_eff }))
}

/// Lens-capacity enforcement instants: the distinct block boundaries, with
/// consecutive instants deduplicated when the active block set is unchanged.
pub(crate) fn capacity_instants(blocks: &[LppBlock], included: &[usize]) -> Vec<(u64, Vec<usize>)> {
    let mut starts: Vec<u64> = included.iter().map(|b| blocks[*b].start_s).collect();
    starts.sort_unstable();
    starts.dedup();
    let mut out: Vec<(u64, Vec<usize>)> = Vec::new();
    for t in starts {
        let active: Vec<usize> = included
            .iter()
            .copied()
            .filter(|b| blocks[*b].start_s <= t && t < blocks[*b].end_s)
            .collect();
        if active.is_empty() {
            continue;
        }
        if out.last().map(|(_, prev)| prev == &active).unwrap_or(false) {
            continue;
        }
        out.push((t, active));
    }
    out
}

/// The monolithic relaxation: every included block plus the shared lens
/// capacity rows per (satellite, enforcement instant).
pub struct BuiltRelaxation {
    pub model: LpModel,
    pub skipped: Vec<SkippedBlock>,
    pub(crate) vars: Vec<Option<BlockVars>>,
    pub(crate) included: Vec<usize>,
}

pub fn build_relaxation(inst: &LppInstance) -> Result<BuiltRelaxation, ModelError> {
    let topo = Topology::new(&inst.satellites, &inst.isls);
    let mut model = LpModel::new();
    let mut vars: Vec<Option<BlockVars>> = Vec::with_capacity(inst.blocks.len());
    let mut skipped = Vec::new();
    let mut included = Vec::new();
    for (bi, block) in inst.blocks.iter().enumerate() {
        match add_block(&mut model, inst, &topo, block, bi)? {
            BlockBuild::Built(bv) => {
                included.push(bi);
                vars.push(Some(bv));
            }
            BlockBuild::Skipped(reason) => {
                skipped.push(SkippedBlock { commodity: block.commodity, epoch: block.epoch, reason });
                vars.push(None);
            }
        }
    }
    for (_, active) in capacity_instants(&inst.blocks, &included) {
        for (v, sat) in inst.satellites.iter().enumerate() {
            let mut terms: Vec<(VarId, f64)> = Vec::new();
            for &bi in &active {
                let bv = vars[bi].as_ref().unwrap();
                for &(e, _) in &topo.incident[v] {
                    terms.push((bv.x[e], 1.0));
                }
            }
            if !terms.is_empty() {
                model.add_constraint(terms, Relation::Le, sat.lens_capacity as f64)?;
            }
        }
    }
    Ok(BuiltRelaxation { model, skipped, vars, included })
}

/// Per-block primal values of a solved relaxation.
#[derive(Debug, Clone)]
pub struct BlockPrimal {
    pub commodity: usize,
    pub epoch: usize,
    pub start_s: u64,
    pub end_s: u64,
    pub duration_slots: f64,
    /// x per ISL (same order as the instance's ISL list).
    pub x: Vec<f64>,
    /// Directed flows per ISL: [2e] forward, [2e+1] reverse.
    pub flow: Vec<f64>,
    /// (satellite index, originated flow).
    pub origin: Vec<(usize, f64)>,
    /// (satellite index, delivered post-attenuation flow).
    pub delivered: Vec<(usize, f64)>,
}

impl BlockPrimal {
    pub fn eta(&self) -> f64 {
        self.delivered.iter().map(|(_, h)| h).sum()
    }
}

#[derive(Debug, Clone)]
pub struct RelaxationSolution {
    /// Duration-weighted optimum of the relaxation (SOL_LP).
    pub objective: f64,
    pub blocks: Vec<BlockPrimal>,
    pub skipped: Vec<SkippedBlock>,
}

#[derive(Debug, thiserror::Error)]
pub enum LppError {
    #[error("lp error: {0}")]
    Model(#[from] ModelError),
    #[error("relaxation reported {0:?}; the provisioning LP is always feasible and bounded")]
    BadStatus(LpStatus),
}

/// Rows above which the relaxation is solved by Dantzig-Wolfe decomposition
/// instead of one monolithic simplex run.
const MONOLITHIC_ROW_LIMIT: usize = 1600;

fn estimated_rows(inst: &LppInstance) -> usize {
    let per_block = inst.isls.len() + inst.satellites.len();
    inst.blocks.len() * per_block + inst.satellites.len()
}

/// Solves the relaxation for a whole planning period, choosing the
/// monolithic or decomposed route by model size. Both are exact.
pub fn solve_relaxation(inst: &LppInstance) -> Result<RelaxationSolution, LppError> {
    if estimated_rows(inst) <= MONOLITHIC_ROW_LIMIT {
        solve_relaxation_monolithic(inst)
    } else {
        dw::solve_relaxation_dw(inst)
    }
}

pub fn solve_relaxation_monolithic(inst: &LppInstance) -> Result<RelaxationSolution, LppError> {
    let built = build_relaxation(inst)?;
    let sol = lpsolve::solve(&built.model)?;
    if sol.status != LpStatus::Optimal {
        return Err(LppError::BadStatus(sol.status));
    }
    let mut blocks = Vec::new();
    for bi in &built.included {
        let bv = built.vars[*bi].as_ref().unwrap();
        let block = &inst.blocks[*bi];
        let flow: Vec<f64> = bv.f.iter().map(|v| sol.values[v.0]).collect();
        // canonicalize x to exactly the flow it must cover; simplex vertices
        // can leave selection variables with degenerate slack
        let x: Vec<f64> = (0..inst.isls.len())
            .map(|e| ((flow[2 * e] + flow[2 * e + 1]) / inst.alpha).clamp(0.0, 1.0))
            .collect();
        blocks.push(BlockPrimal {
            commodity: block.commodity,
            epoch: block.epoch,
            start_s: block.start_s,
            end_s: block.end_s,
            duration_slots: block.duration_slots,
            x,
            flow,
            origin: bv
                .sources_eff
                .iter()
                .zip(&bv.a)
                .map(|(v, id)| (*v, sol.values[id.0]))
                .collect(),
            delivered: bv
                .dests_eff
                .iter()
                .zip(&bv.h)
                .map(|(v, id)| (*v, sol.values[id.0]))
                .collect(),
        });
    }
    Ok(RelaxationSolution { objective: sol.objective, blocks, skipped: built.skipped })
}

/// One candidate lightpath produced by flow decomposition: the satellite
/// sequence, its fractional selection value, and the received
/// (post-attenuation, source lens excluded) flow it accounts for.
#[derive(Debug, Clone)]
pub struct CandidateLightpath {
    pub commodity: usize,
    pub epoch: usize,
    pub start_s: u64,
    pub end_s: u64,
    pub duration_slots: f64,
    pub satellites: Vec<SatelliteId>,
    pub x_frac: f64,
    pub received: f64,
}

const FLOW_TOL: f64 = 1e-9;

/// Decomposes each block's flow into source-to-destination paths by
/// deterministic depth-first stripping: at every step the largest injection
/// consistent with per-node attenuation is removed along the path, and the
/// path's selection value is the largest fraction of any ISL's x budget it
/// consumes. Residual flow that cannot reach a destination (loops or
/// dead-ends, possible only at degenerate optima) is reported and dropped.
pub fn decompose_flows(solution: &RelaxationSolution, inst: &LppInstance) -> (Vec<CandidateLightpath>, usize) {
    let topo = Topology::new(&inst.satellites, &inst.isls);
    let mut candidates = Vec::new();
    let mut residual_blocks = 0;
    for block in &solution.blocks {
        let mut flow = block.flow.clone();
        let mut origin: BTreeMap<usize, f64> = block.origin.iter().copied().collect();
        let mut delivered: BTreeMap<usize, f64> = block.delivered.iter().copied().collect();
        loop {
            let Some(start) = origin
                .iter()
                .filter(|(_, amt)| **amt > FLOW_TOL)
                .map(|(v, _)| *v)
                .next()
            else {
                break;
            };
            match strip_path(&topo, inst, &flow, &delivered, start) {
                Some(path) => {
                    let injected = max_injection(&origin, &flow, &delivered, inst, &path);
                    if injected <= FLOW_TOL {
                        // numerical crumbs on this source; drop them
                        origin.insert(start, 0.0);
                        continue;
                    }
                    apply_path(&mut origin, &mut flow, &mut delivered, inst, &path, injected);
                    let x_frac = path_x_fraction(inst, block, &path, injected);
                    let received = injected * attenuation(inst, &path);
                    candidates.push(CandidateLightpath {
                        commodity: block.commodity,
                        epoch: block.epoch,
                        start_s: block.start_s,
                        end_s: block.end_s,
                        duration_slots: block.duration_slots,
                        satellites: path.sats.iter().map(|v| inst.satellites[*v].id).collect(),
                        x_frac,
                        received,
                    });
                }
                None => {
                    origin.insert(start, 0.0);
                }
            }
        }
        let leftover: f64 = flow.iter().sum::<f64>()
            + delivered.values().sum::<f64>()
            + origin.values().sum::<f64>();
        if leftover > 1e-6 {
            residual_blocks += 1;
        }
    }
    (candidates, residual_blocks)
}

struct Path {
    /// Satellite indices from source to destination.
    sats: Vec<usize>,
    /// Directed flow slots (2e / 2e+1) along the path.
    arcs: Vec<usize>,
}

/// Cumulative lens survival along the path excluding the source satellite.
fn attenuation(inst: &LppInstance, path: &Path) -> f64 {
    path.sats[1..].iter().map(|v| inst.satellites[*v].lens_success).product()
}

/// Depth-first search for a positive-flow path from `start` to any
/// satellite with positive deliverable flow, smallest satellite id first.
fn strip_path(
    topo: &Topology,
    inst: &LppInstance,
    flow: &[f64],
    delivered: &BTreeMap<usize, f64>,
    start: usize,
) -> Option<Path> {
    let mut visited = vec![false; inst.satellites.len()];
    let mut sats = vec![start];
    let mut arcs = Vec::new();
    visited[start] = true;
    loop {
        let cur = *sats.last().unwrap();
        if sats.len() > 1 && delivered.get(&cur).copied().unwrap_or(0.0) > FLOW_TOL {
            return Some(Path { sats, arcs });
        }
        // outgoing arcs with positive flow to unvisited satellites, by id
        let mut next: Option<(usize, usize)> = None;
        for &(e, fwd) in &topo.incident[cur] {
            let slot = if fwd { 2 * e } else { 2 * e + 1 };
            if flow[slot] <= FLOW_TOL {
                continue;
            }
            let (a, b) = inst.isls[e].endpoints();
            let other_id = if fwd { b } else { a };
            let other = topo.sat_index[&other_id];
            if visited[other] {
                continue;
            }
            match next {
                Some((best, _)) if inst.satellites[best].id <= other_id => {}
                _ => next = Some((other, slot)),
            }
        }
        match next {
            Some((other, slot)) => {
                visited[other] = true;
                sats.push(other);
                arcs.push(slot);
            }
            None => {
                // dead end: backtrack
                if sats.len() == 1 {
                    return None;
                }
                sats.pop();
                arcs.pop();
            }
        }
    }
}

/// Largest injection removable along the path respecting origin stock, arc
/// flows (scaled by attenuation accumulated so far), and deliverable flow.
fn max_injection(
    origin: &BTreeMap<usize, f64>,
    flow: &[f64],
    delivered: &BTreeMap<usize, f64>,
    inst: &LppInstance,
    path: &Path,
) -> f64 {
    let mut inj = origin.get(&path.sats[0]).copied().unwrap_or(0.0);
    let mut factor = 1.0;
    for (k, arc) in path.arcs.iter().enumerate() {
        // arc k leaves path.sats[k]; attenuation applies at interior nodes
        if k > 0 {
            factor *= inst.satellites[path.sats[k]].lens_success;
        }
        inj = inj.min(flow[*arc] / factor);
    }
    let last = *path.sats.last().unwrap();
    let att = attenuation(inst, path);
    inj.min(delivered.get(&last).copied().unwrap_or(0.0) / att)
}

fn apply_path(
    origin: &mut BTreeMap<usize, f64>,
    flow: &mut [f64],
    delivered: &mut BTreeMap<usize, f64>,
    inst: &LppInstance,
    path: &Path,
    injected: f64,
) {
    *origin.get_mut(&path.sats[0]).unwrap() -= injected;
    let mut factor = 1.0;
    for (k, arc) in path.arcs.iter().enumerate() {
        if k > 0 {
            factor *= inst.satellites[path.sats[k]].lens_success;
        }
        flow[*arc] = (flow[*arc] - injected * factor).max(0.0);
    }
    let last = *path.sats.last().unwrap();
    let att = attenuation(inst, path);
    if let Some(d) = delivered.get_mut(&last) {
        *d = (*d - injected * att).max(0.0);
    }
}

/// The path's fractional selection value: the largest fraction of any
/// traversed ISL's x budget (alpha * x_lp) that this path's wire flow
/// consumes.
fn path_x_fraction(inst: &LppInstance, block: &BlockPrimal, path: &Path, injected: f64) -> f64 {
    let mut frac: f64 = 0.0;
    let mut factor = 1.0;
    for (k, arc) in path.arcs.iter().enumerate() {
        if k > 0 {
            factor *= inst.satellites[path.sats[k]].lens_success;
        }
        let e = arc / 2;
        let budget = inst.alpha * block.x[e];
        if budget > FLOW_TOL {
            frac = frac.max(injected * factor / budget);
        } else {
            frac = 1.0;
        }
    }
    frac.clamp(f64::MIN_POSITIVE, 1.0)
}

/// A rounded provisioning outcome.
#[derive(Debug, Clone)]
pub struct LppSolution {
    pub selected: Vec<CandidateLightpath>,
    /// Relaxation optimum, duration-weighted.
    pub sol_lp: f64,
    /// Duration-weighted received value of the selected paths.
    pub sol_alg: f64,
    /// Paths removed by capacity-restoring pruning.
    pub pruned: usize,
}

fn objective_of(selected: &[CandidateLightpath]) -> f64 {
    selected.iter().map(|c| c.duration_slots * c.received).sum()
}

/// Randomized rounding: select each candidate independently with
/// probability equal to its fractional selection value, then restore lens
/// feasibility by pruning. Deterministic for a fixed seed.
pub fn round_randomized(
    candidates: &[CandidateLightpath],
    inst: &LppInstance,
    sol_lp: f64,
    rng: &mut ChaCha8Rng,
) -> LppSolution {
    let picked: Vec<CandidateLightpath> = candidates
        .iter()
        .filter(|c| rng.gen::<f64>() < c.x_frac)
        .cloned()
        .collect();
    finish_rounding(picked, inst, sol_lp)
}

/// Deterministic rounding: select every candidate whose fractional value is
/// at least `threshold` (clamped into (0, 1]), then prune to capacity.
pub fn round_deterministic(
    candidates: &[CandidateLightpath],
    inst: &LppInstance,
    sol_lp: f64,
    threshold: f64,
) -> LppSolution {
    let delta = threshold.clamp(f64::MIN_POSITIVE, 1.0);
    let picked: Vec<CandidateLightpath> =
        candidates.iter().filter(|c| c.x_frac >= delta - 1e-12).cloned().collect();
    finish_rounding(picked, inst, sol_lp)
}

fn finish_rounding(picked: Vec<CandidateLightpath>, inst: &LppInstance, sol_lp: f64) -> LppSolution {
    let before = picked.len();
    let selected = prune_to_capacity(picked, inst);
    LppSolution {
        sol_alg: objective_of(&selected),
        pruned: before - selected.len(),
        selected,
        sol_lp,
    }
}

/// Whether a path occupies lens sets on `sat`, i.e. one of its ISLs
/// touches the satellite.
fn path_touches(path: &CandidateLightpath, sat: SatelliteId) -> bool {
    path.satellites.len() >= 2 && path.satellites.contains(&sat)
}

/// Removes selected paths until, at every enforcement instant, the number
/// of active paths whose ISLs touch a satellite is within its lens
/// capacity. Violations are resolved lowest received flow first,
/// deterministically.
pub fn prune_to_capacity(
    mut selected: Vec<CandidateLightpath>,
    inst: &LppInstance,
) -> Vec<CandidateLightpath> {
    let mut instants: Vec<u64> = selected.iter().map(|c| c.start_s).collect();
    instants.sort_unstable();
    instants.dedup();
    'outer: loop {
        for &t in &instants {
            for sat in &inst.satellites {
                let usage = selected
                    .iter()
                    .filter(|c| c.start_s <= t && t < c.end_s && path_touches(c, sat.id))
                    .count();
                if usage > sat.lens_capacity as usize {
                    // drop the active path through this satellite with the
                    // least received value (ties by discovery order)
                    let victim = selected
                        .iter()
                        .enumerate()
                        .filter(|(_, c)| c.start_s <= t && t < c.end_s && path_touches(c, sat.id))
                        .min_by(|(ai, a), (bi, b)| {
                            a.received.partial_cmp(&b.received).unwrap().then(ai.cmp(bi))
                        })
                        .map(|(i, _)| i)
                        .expect("violated capacity implies an active path");
                    selected.remove(victim);
                    continue 'outer;
                }
            }
        }
        return selected;
    }
}

/// Residual lens-capacity violations of a selection, for verification.
pub fn capacity_violations(selected: &[CandidateLightpath], inst: &LppInstance) -> usize {
    let mut instants: Vec<u64> = selected.iter().map(|c| c.start_s).collect();
    instants.sort_unstable();
    instants.dedup();
    let mut violations = 0;
    for &t in &instants {
        for sat in &inst.satellites {
            let usage = selected
                .iter()
                .filter(|c| c.start_s <= t && t < c.end_s && path_touches(c, sat.id))
                .count();
            if usage > sat.lens_capacity as usize {
                violations += 1;
            }
        }
    }
    violations
}

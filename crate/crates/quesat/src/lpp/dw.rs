//! Exact Dantzig-Wolfe decomposition of the provisioning relaxation over
//! commodity-epoch blocks. The master LP carries only the shared lens
//! capacity rows plus one convexity row per block; pricing re-optimizes
//! each block's small flow LP with lens charges subtracted from its
//! objective, warm-starting from the previous basis. The loop terminates
//! when no block prices out a positive reduced-cost column, which
//! certifies the assembled mixture optimal for the full relaxation.

use super::{
    add_block, capacity_instants, BlockBuild, BlockPrimal, BlockVars, LppError, LppInstance,
    RelaxationSolution, SkippedBlock, Topology,
};
use crate::lpsolve::{LpModel, LpStatus, Relation, Simplex};

const MAX_ROUNDS: usize = 600;

struct DwColumn {
    /// Uncharged objective value: duration-weighted delivered flow.
    value: f64,
    /// Lens-set usage per satellite index (sum of incident x values).
    usage: Vec<(usize, f64)>,
    x: Vec<f64>,
    flow: Vec<f64>,
    origin: Vec<(usize, f64)>,
    delivered: Vec<(usize, f64)>,
}

struct DwBlock {
    block_idx: usize,
    vars: BlockVars,
    simplex: Simplex,
    n_struct: usize,
    columns: Vec<DwColumn>,
}

pub(crate) fn solve_relaxation_dw(inst: &LppInstance) -> Result<RelaxationSolution, LppError> {
    let topo = Topology::new(&inst.satellites, &inst.isls);
    let n_sats = inst.satellites.len();
    let mut skipped: Vec<SkippedBlock> = Vec::new();
    let mut dw_blocks: Vec<DwBlock> = Vec::new();
    for (bi, block) in inst.blocks.iter().enumerate() {
        let mut model = LpModel::new();
        match add_block(&mut model, inst, &topo, block, bi)? {
            BlockBuild::Skipped(reason) => {
                skipped.push(SkippedBlock { commodity: block.commodity, epoch: block.epoch, reason });
            }
            BlockBuild::Built(vars) => {
                let n_struct = model.num_vars();
                let simplex = Simplex::new(&model)?;
                dw_blocks.push(DwBlock { block_idx: bi, vars, simplex, n_struct, columns: Vec::new() });
            }
        }
    }
    if dw_blocks.is_empty() {
        return Ok(RelaxationSolution { objective: 0.0, blocks: Vec::new(), skipped });
    }
    let included: Vec<usize> = dw_blocks.iter().map(|d| d.block_idx).collect();
    let instants = capacity_instants(&inst.blocks, &included);
    // enforcement instants each block participates in
    let active_instants: Vec<Vec<usize>> = dw_blocks
        .iter()
        .map(|d| {
            instants
                .iter()
                .enumerate()
                .filter(|(_, (_, act))| act.contains(&d.block_idx))
                .map(|(k, _)| k)
                .collect()
        })
        .collect();

    // round 0: unconstrained block optima seed the column pool
    let mut charges = vec![0.0; n_sats * instants.len()];
    for (di, db) in dw_blocks.iter_mut().enumerate() {
        let (col, _) = price_block(inst, &topo, db, &charges, &active_instants[di], n_sats)?;
        db.columns.push(col);
    }

    for _round in 0..MAX_ROUNDS {
        let master = solve_master(inst, &dw_blocks, &instants, &active_instants, n_sats)?;
        let tol = 1e-7 * master.objective.abs().max(1.0);
        let mut improved = false;
        for (di, db) in dw_blocks.iter_mut().enumerate() {
            let (col, charged) =
                price_block(inst, &topo, db, &master.charges, &active_instants[di], n_sats)?;
            if charged > master.sigma[di] + tol {
                db.columns.push(col);
                improved = true;
            }
        }
        if !improved {
            return Ok(assemble(inst, &dw_blocks, &master.lambdas, master.objective, skipped));
        }
        charges.copy_from_slice(&master.charges);
    }
    // defensive: certification did not settle; fall back to the monolithic
    // exact solve rather than return an unproven mixture
    super::solve_relaxation_monolithic(inst)
}

/// Optimizes one block under the current lens charges and extracts the
/// resulting vertex as a column. Returns the column and its charged
/// objective value (for the pricing test).
fn price_block(
    inst: &LppInstance,
    topo: &Topology,
    db: &mut DwBlock,
    charges: &[f64],
    active: &[usize],
    n_sats: usize,
) -> Result<(DwColumn, f64), LppError> {
    let block = &inst.blocks[db.block_idx];
    let mut obj = vec![0.0; db.n_struct];
    for h in &db.vars.h {
        obj[h.0] = block.duration_slots;
    }
    for (e, isl) in inst.isls.iter().enumerate() {
        let (a, b) = isl.endpoints();
        let mut charge = 0.0;
        for v in [topo.sat_index[&a], topo.sat_index[&b]] {
            for &k in active {
                charge += charges[k * n_sats + v];
            }
        }
        if charge != 0.0 {
            obj[db.vars.x[e].0] = -charge;
        } else {
            obj[db.vars.x[e].0] = 0.0;
        }
    }
    db.simplex.set_objective(&obj);
    let sol = db.simplex.resolve()?;
    if sol.status != LpStatus::Optimal {
        return Err(LppError::BadStatus(sol.status));
    }
    let ne = inst.isls.len();
    let flow: Vec<f64> = db.vars.f.iter().map(|v| sol.values[v.0]).collect();
    // tighten x to exactly the flow it must cover; removes degenerate slack
    // in the selection variables so usage is never overstated
    let x: Vec<f64> = (0..ne)
        .map(|e| ((flow[2 * e] + flow[2 * e + 1]) / inst.alpha).clamp(0.0, 1.0))
        .collect();
    let mut usage_map = vec![0.0; n_sats];
    for (e, isl) in inst.isls.iter().enumerate() {
        if x[e] > 0.0 {
            let (a, b) = isl.endpoints();
            usage_map[topo.sat_index[&a]] += x[e];
            usage_map[topo.sat_index[&b]] += x[e];
        }
    }
    let usage: Vec<(usize, f64)> =
        usage_map.iter().enumerate().filter(|(_, u)| **u > 0.0).map(|(v, u)| (v, *u)).collect();
    let origin: Vec<(usize, f64)> = db
        .vars
        .sources_eff
        .iter()
        .zip(&db.vars.a)
        .map(|(v, id)| (*v, sol.values[id.0]))
        .filter(|(_, val)| *val > 0.0)
        .collect();
    let delivered: Vec<(usize, f64)> = db
        .vars
        .dests_eff
        .iter()
        .zip(&db.vars.h)
        .map(|(v, id)| (*v, sol.values[id.0]))
        .filter(|(_, val)| *val > 0.0)
        .collect();
    let value: f64 = delivered.iter().map(|(_, h)| h * block.duration_slots).sum();
    Ok((DwColumn { value, usage, x, flow, origin, delivered }, sol.objective))
}

struct MasterResult {
    objective: f64,
    /// Column weights per dw block.
    lambdas: Vec<Vec<f64>>,
    /// Capacity duals flattened as [instant * n_sats + sat].
    charges: Vec<f64>,
    /// Convexity duals per dw block.
    sigma: Vec<f64>,
}

fn solve_master(
    inst: &LppInstance,
    blocks: &[DwBlock],
    instants: &[(u64, Vec<usize>)],
    active_instants: &[Vec<usize>],
    n_sats: usize,
) -> Result<MasterResult, LppError> {
    let mut model = LpModel::new();
    let mut lambda_ids: Vec<Vec<crate::lpsolve::VarId>> = Vec::with_capacity(blocks.len());
    for (di, db) in blocks.iter().enumerate() {
        lambda_ids.push(
            db.columns
                .iter()
                .enumerate()
                .map(|(j, col)| model.add_var(format!("l_{di}_{j}"), 0.0, 1.0, col.value))
                .collect(),
        );
    }
    // capacity rows only where some column actually consumes lens sets
    let mut row_keys: Vec<(usize, usize)> = Vec::new();
    for (k, _) in instants.iter().enumerate() {
        let mut used = vec![false; n_sats];
        for (di, db) in blocks.iter().enumerate() {
            if !active_instants[di].contains(&k) {
                continue;
            }
            for col in &db.columns {
                for (v, _) in &col.usage {
                    used[*v] = true;
                }
            }
        }
        for (v, u) in used.iter().enumerate() {
            if *u {
                row_keys.push((k, v));
            }
        }
    }
    for &(k, v) in &row_keys {
        let mut terms = Vec::new();
        for (di, db) in blocks.iter().enumerate() {
            if !active_instants[di].contains(&k) {
                continue;
            }
            for (j, col) in db.columns.iter().enumerate() {
                if let Some((_, u)) = col.usage.iter().find(|(cv, _)| *cv == v) {
                    terms.push((lambda_ids[di][j], *u));
                }
            }
        }
        model.add_constraint(terms, Relation::Le, inst.satellites[v].lens_capacity as f64)?;
    }
    for ids in &lambda_ids {
        model.add_constraint(ids.iter().map(|id| (*id, 1.0)), Relation::Le, 1.0)?;
    }
    let mut simplex = Simplex::new(&model)?;
    let sol = simplex.solve()?;
    if sol.status != LpStatus::Optimal {
        return Err(LppError::BadStatus(sol.status));
    }
    let duals = simplex.row_duals();
    let mut charges = vec![0.0; n_sats * instants.len()];
    for (row, &(k, v)) in row_keys.iter().enumerate() {
        charges[k * n_sats + v] = duals[row].max(0.0);
    }
    let sigma: Vec<f64> =
        (0..blocks.len()).map(|di| duals[row_keys.len() + di].max(0.0)).collect();
    let lambdas: Vec<Vec<f64>> = lambda_ids
        .iter()
        .map(|ids| ids.iter().map(|id| sol.values[id.0]).collect())
        .collect();
    Ok(MasterResult { objective: sol.objective, lambdas, charges, sigma })
}

fn assemble(
    inst: &LppInstance,
    blocks: &[DwBlock],
    lambdas: &[Vec<f64>],
    objective: f64,
    skipped: Vec<SkippedBlock>,
) -> RelaxationSolution {
    let ne = inst.isls.len();
    let mut out = Vec::with_capacity(blocks.len());
    for (db, weights) in blocks.iter().zip(lambdas) {
        let block = &inst.blocks[db.block_idx];
        let mut x = vec![0.0; ne];
        let mut flow = vec![0.0; 2 * ne];
        let mut origin = std::collections::BTreeMap::new();
        let mut delivered = std::collections::BTreeMap::new();
        for (col, w) in db.columns.iter().zip(weights) {
            if *w <= 1e-12 {
                continue;
            }
            for (e, v) in col.x.iter().enumerate() {
                x[e] += w * v;
            }
            for (s, v) in col.flow.iter().enumerate() {
                flow[s] += w * v;
            }
            for (v, amt) in &col.origin {
                *origin.entry(*v).or_insert(0.0) += w * amt;
            }
            for (v, amt) in &col.delivered {
                *delivered.entry(*v).or_insert(0.0) += w * amt;
            }
        }
        out.push(BlockPrimal {
            commodity: block.commodity,
            epoch: block.epoch,
            start_s: block.start_s,
            end_s: block.end_s,
            duration_slots: block.duration_slots,
            x,
            flow,
            origin: origin.into_iter().collect(),
            delivered: delivered.into_iter().collect(),
        });
    }
    RelaxationSolution { objective, blocks: out, skipped }
}

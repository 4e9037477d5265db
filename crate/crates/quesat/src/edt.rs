//! Entanglement distribution planning over the augmented ground network:
//! the multi-commodity generation/swapping LP, its demand-capped variant,
//! and max-min fairness, plus plan extraction with conservation checks and
//! the realized-rate upper-bound verifier.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::lpsolve::{self, LpModel, LpStatus, ModelError, Relation, VarId};
use crate::metrics;
use crate::netmodel::{AugmentedGraph, GroundStation, StationId, StationPair};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum EdtObjective {
    /// Maximize the summed expected EDR over all commodities.
    MaxTotal,
    /// Maximize total EDR with each commodity capped at its demand.
    MaxTotalDemandCapped,
    /// Maximize the minimum demand-satisfaction ratio (epigraph form),
    /// with per-commodity rates capped at their demands.
    MaxMinFairness,
}

/// Which stations may perform swapping (and appear as pair endpoints).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RepeaterMode {
    AllStations,
    CommoditiesOnly,
}

#[derive(Debug, Clone)]
pub struct EdtInput<'a> {
    pub graph: &'a AugmentedGraph,
    pub stations: &'a [GroundStation],
    pub commodities: &'a [StationPair],
    /// Requested expected EDR per commodity, aligned with `commodities`.
    pub demands: &'a [f64],
    pub objective: EdtObjective,
    pub repeaters: RepeaterMode,
}

#[derive(Debug, thiserror::Error)]
pub enum EdtError {
    #[error("lp error: {0}")]
    Model(#[from] ModelError),
    #[error("distribution LP reported {0:?}; it is always feasible at zero")]
    BadStatus(LpStatus),
    #[error("commodity endpoint {0} missing from the graph")]
    UnknownEndpoint(StationId),
    #[error("conservation residual {residual:.3e} at pair {pair} exceeds 1e-6")]
    Conservation { pair: StationPair, residual: f64 },
}

/// One swapping assignment: at repeater `at`, consume one ebit of each
/// adjacent pair per attempt at `rate` attempts per slot to produce ebits
/// of `produces`.
#[derive(Debug, Clone, Serialize)]
pub struct SwapRate {
    pub at: StationId,
    pub produces: StationPair,
    pub rate: f64,
}

/// An extracted distribution plan with its bookkeeping rates.
#[derive(Debug, Clone, Default)]
pub struct EdtPlan {
    /// Elementary generation ratio per pair that has at least one edge.
    pub generation: BTreeMap<StationPair, f64>,
    pub swaps: Vec<SwapRate>,
    /// Expected EDR per commodity, aligned with the input commodity list.
    pub commodity_edr: Vec<f64>,
    pub input_rate: BTreeMap<StationPair, f64>,
    pub output_rate: BTreeMap<StationPair, f64>,
    /// LP objective value (mode-dependent meaning).
    pub objective: f64,
}

impl EdtPlan {
    pub fn total_edr(&self) -> f64 {
        self.commodity_edr.iter().sum()
    }

    /// CSV export with one record type per row: `g,<pair>,<ratio>`,
    /// `y,<k>,<m>,<n>,<rate>` and `zeta,<commodity>,<rate>`.
    pub fn export_csv(&self) -> String {
        let mut out = String::from("record,fields\n");
        for (pair, g) in &self.generation {
            out.push_str(&format!("g,{},{:.9}\n", pair, g));
        }
        for s in &self.swaps {
            out.push_str(&format!(
                "y,{},{},{},{:.9}\n",
                s.at,
                s.produces.first(),
                s.produces.second(),
                s.rate
            ));
        }
        for (i, z) in self.commodity_edr.iter().enumerate() {
            out.push_str(&format!("zeta,{i},{z:.9}\n"));
        }
        out
    }
}

/// The built LP plus the variable layout needed to read a solution back.
pub struct EdtModel {
    pub model: LpModel,
    pairs: Vec<StationPair>,
    g_vars: BTreeMap<StationPair, VarId>,
    triples: Vec<(StationId, StationPair)>,
    w_vars: Vec<VarId>,
    zeta_vars: Vec<VarId>,
}

fn participating(input: &EdtInput) -> Vec<StationId> {
    match input.repeaters {
        RepeaterMode::AllStations => input.graph.stations.clone(),
        RepeaterMode::CommoditiesOnly => {
            let mut set = BTreeSet::new();
            for pair in input.commodities {
                set.insert(pair.first().clone());
                set.insert(pair.second().clone());
            }
            set.into_iter().collect()
        }
    }
}

/// Pairs that can carry ebits: seeded by pairs with an edge, closed under
/// producing a pair from two adjacent active pairs by swapping. The
/// fixpoint keeps the model sparse without affecting the optimum.
fn active_pairs(stations: &[StationId], graph: &AugmentedGraph) -> BTreeSet<StationPair> {
    let mut active: BTreeSet<StationPair> = BTreeSet::new();
    for (i, a) in stations.iter().enumerate() {
        for b in &stations[i + 1..] {
            let pair = StationPair::new(a.clone(), b.clone());
            if !graph.edges_between(&pair).is_empty() {
                active.insert(pair);
            }
        }
    }
    loop {
        let mut added = false;
        for (i, m) in stations.iter().enumerate() {
            for n in &stations[i + 1..] {
                let mn = StationPair::new(m.clone(), n.clone());
                if active.contains(&mn) {
                    continue;
                }
                let producible = stations.iter().any(|k| {
                    k != m
                        && k != n
                        && active.contains(&StationPair::new(m.clone(), k.clone()))
                        && active.contains(&StationPair::new(k.clone(), n.clone()))
                });
                if producible {
                    active.insert(mn);
                    added = true;
                }
            }
        }
        if !added {
            return active;
        }
    }
}

/// Builds the distribution LP for the given objective mode.
pub fn build_edt(input: &EdtInput) -> Result<EdtModel, EdtError> {
    for pair in input.commodities {
        for end in [pair.first(), pair.second()] {
            if !input.graph.stations.contains(end) {
                return Err(EdtError::UnknownEndpoint(end.clone()));
            }
        }
    }
    let stations = participating(input);
    let active = active_pairs(&stations, input.graph);
    let pairs: Vec<StationPair> = active.iter().cloned().collect();
    let swap_prob: BTreeMap<&StationId, f64> =
        input.stations.iter().map(|s| (&s.id, s.swap_success)).collect();

    let mut model = LpModel::new();
    // generation ratio per pair that has a physical or virtual edge
    let mut g_vars = BTreeMap::new();
    let mut total_rate = 0.0;
    for pair in &pairs {
        let rate = input.graph.combined_rate(pair);
        if rate > 0.0 {
            g_vars.insert(pair.clone(), model.add_var(format!("g_{pair}"), 0.0, 1.0, 0.0));
            total_rate += rate;
        }
    }
    let w_max = total_rate.max(1.0);
    // swap triples: k produces mn out of mk and kn; both inputs active
    let mut triples = Vec::new();
    let mut w_vars = Vec::new();
    for mn in &pairs {
        let (m, n) = (mn.first().clone(), mn.second().clone());
        for k in &stations {
            if k == &m || k == &n {
                continue;
            }
            let mk = StationPair::new(m.clone(), k.clone());
            let kn = StationPair::new(k.clone(), n.clone());
            if active.contains(&mk) && active.contains(&kn) {
                let var = model.add_var(format!("w_{k}_{mn}"), 0.0, w_max, 0.0);
                triples.push((k.clone(), mn.clone()));
                w_vars.push(var);
            }
        }
    }
    // commodity rates
    let mut zeta_vars = Vec::new();
    for (i, pair) in input.commodities.iter().enumerate() {
        let demand_cap = match input.objective {
            EdtObjective::MaxTotal => w_max,
            EdtObjective::MaxTotalDemandCapped | EdtObjective::MaxMinFairness => {
                input.demands[i].min(w_max)
            }
        };
        let ub = if active.contains(pair) { demand_cap } else { 0.0 };
        let obj = match input.objective {
            EdtObjective::MaxTotal | EdtObjective::MaxTotalDemandCapped => 1.0,
            EdtObjective::MaxMinFairness => 0.0,
        };
        zeta_vars.push(model.add_var(format!("zeta_{i}"), 0.0, ub.max(0.0), obj));
    }
    // conservation per active pair: I(mn) - Omega(mn) = zeta or 0
    for mn in &pairs {
        let mut terms: Vec<(VarId, f64)> = Vec::new();
        if let Some(g) = g_vars.get(mn) {
            terms.push((*g, input.graph.combined_rate(mn)));
        }
        for (t, (k, produced)) in triples.iter().enumerate() {
            if produced == mn {
                terms.push((w_vars[t], swap_prob[&k]));
            }
            let (m, n) = (produced.first(), produced.second());
            if &StationPair::new(m.clone(), k.clone()) == mn {
                terms.push((w_vars[t], -1.0));
            }
            if &StationPair::new(k.clone(), n.clone()) == mn {
                terms.push((w_vars[t], -1.0));
            }
        }
        for (i, compair) in input.commodities.iter().enumerate() {
            if compair == mn {
                terms.push((zeta_vars[i], -1.0));
            }
        }
        model.add_constraint(terms, Relation::Eq, 0.0)?;
    }
    if input.objective == EdtObjective::MaxMinFairness {
        let lambda = model.add_var("lambda", 0.0, 1.0, 1.0);
        for (i, z) in input.demands.iter().enumerate() {
            // zero-demand commodities are excluded from the minimum
            if *z > 0.0 {
                model.add_constraint([(zeta_vars[i], 1.0), (lambda, -z)], Relation::Ge, 0.0)?;
            }
        }
    }
    Ok(EdtModel { model, pairs, g_vars, triples, w_vars, zeta_vars })
}

/// Reads a solved model back into a plan and verifies conservation.
pub fn extract_plan(
    built: &EdtModel,
    solution: &lpsolve::LpSolution,
    input: &EdtInput,
) -> Result<EdtPlan, EdtError> {
    if solution.status != LpStatus::Optimal {
        return Err(EdtError::BadStatus(solution.status));
    }
    let swap_prob: BTreeMap<&StationId, f64> =
        input.stations.iter().map(|s| (&s.id, s.swap_success)).collect();
    let mut plan = EdtPlan {
        generation: built
            .g_vars
            .iter()
            .map(|(p, v)| (p.clone(), solution.values[v.0]))
            .collect(),
        swaps: built
            .triples
            .iter()
            .zip(&built.w_vars)
            .map(|((k, mn), v)| SwapRate {
                at: k.clone(),
                produces: mn.clone(),
                rate: solution.values[v.0],
            })
            .collect(),
        commodity_edr: built.zeta_vars.iter().map(|v| solution.values[v.0]).collect(),
        input_rate: BTreeMap::new(),
        output_rate: BTreeMap::new(),
        objective: solution.objective,
    };
    for mn in &built.pairs {
        let mut input_rate = 0.0;
        if let Some(g) = plan.generation.get(mn) {
            input_rate += input.graph.combined_rate(mn) * g;
        }
        let mut output_rate = 0.0;
        for swap in &plan.swaps {
            if &swap.produces == mn {
                input_rate += swap.rate * swap_prob[&swap.at];
            }
            let (m, n) = (swap.produces.first(), swap.produces.second());
            if &StationPair::new(m.clone(), swap.at.clone()) == mn
                || &StationPair::new(swap.at.clone(), n.clone()) == mn
            {
                output_rate += swap.rate;
            }
        }
        let zeta: f64 = input
            .commodities
            .iter()
            .zip(&plan.commodity_edr)
            .filter(|(p, _)| *p == mn)
            .map(|(_, z)| *z)
            .sum();
        let residual = (input_rate - output_rate - zeta).abs();
        if residual > 1e-6 {
            return Err(EdtError::Conservation { pair: mn.clone(), residual });
        }
        plan.input_rate.insert(mn.clone(), input_rate);
        plan.output_rate.insert(mn.clone(), output_rate);
    }
    Ok(plan)
}

/// Convenience: build, solve and extract in one call.
pub fn solve_edt(input: &EdtInput) -> Result<EdtPlan, EdtError> {
    let built = build_edt(input)?;
    let solution = lpsolve::solve(&built.model)?;
    extract_plan(&built, &solution, input)
}

/// Realized long-run rate measurement for one commodity.
#[derive(Debug, Clone, Copy)]
pub struct RealizedRate {
    pub mean: f64,
    pub std_dev: f64,
    pub slots: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundCheck {
    pub commodity: usize,
    pub realized: f64,
    pub planned: f64,
    pub ci_half_width: f64,
    pub exceeded: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct UpperBoundReport {
    pub checks: Vec<UpperBoundCheck>,
    pub insufficient_data: bool,
}

impl UpperBoundReport {
    pub fn all_within_bound(&self) -> bool {
        !self.insufficient_data && self.checks.iter().all(|c| !c.exceeded)
    }
}

/// Flags any commodity whose realized long-run EDR exceeds its planned
/// expected rate by more than the 99% confidence half-width of the
/// empirical mean.
pub fn verify_upper_bound(plan: &EdtPlan, realized: &[RealizedRate]) -> UpperBoundReport {
    let insufficient = realized.iter().any(|r| r.slots == 0);
    let checks = plan
        .commodity_edr
        .iter()
        .zip(realized)
        .enumerate()
        .map(|(i, (planned, r))| {
            let ci = if r.slots <= 1 {
                0.0
            } else {
                metrics::t_critical_99(r.slots - 1) * r.std_dev / (r.slots as f64).sqrt()
            };
            UpperBoundCheck {
                commodity: i,
                realized: r.mean,
                planned: *planned,
                ci_half_width: ci,
                exceeded: r.slots > 0 && r.mean > planned + ci,
            }
        })
        .collect();
    UpperBoundReport { checks, insufficient_data: insufficient }
}

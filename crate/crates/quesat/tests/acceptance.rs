//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line (run with `cargo test --test acceptance -- --nocapture` to see
//! them). Formula checks are exact; statistical checks use the stated
//! tolerances; trend checks run the desk-scale experiment end to end.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use quesat::channel::{fiber_loss, link_success, FiberParams, GenerationParams};
use quesat::edt::{self, EdtInput, EdtObjective, RepeaterMode};
use quesat::lpp::{self, CandidateLightpath, LppBlock, LppInstance};
use quesat::metrics;
use quesat::netmodel::{AugEdge, AugmentedGraph, GroundStation, Isl, Satellite, SatelliteId, StationId, StationPair};
use quesat::protosim::{self, PlanSegment};
use quesat::scenario::{self, Algorithm, ScenarioConfig};

fn pass(criterion: u32, detail: &str) {
    println!("criterion {criterion:2}: PASS - {detail}");
}

// ---------------------------------------------------------------- helpers

fn station(id: &str, swap: f64) -> GroundStation {
    GroundStation { id: StationId(id.into()), latitude: 0.0, longitude: 0.0, swap_success: swap }
}

fn pair(a: &str, b: &str) -> StationPair {
    StationPair::new(StationId(a.into()), StationId(b.into()))
}

fn fiber_graph(stations: &[&str], edges: &[(&str, &str, f64, u32)]) -> AugmentedGraph {
    let mut g = AugmentedGraph {
        stations: stations.iter().map(|s| StationId(s.to_string())).collect(),
        edges: BTreeMap::new(),
    };
    for (a, b, q, c) in edges {
        g.edges
            .entry(pair(a, b))
            .or_default()
            .push(AugEdge::Fiber { capacity: *c, gen_success: *q });
    }
    g
}

fn sat(id: u32, q: f64, cap: u32) -> Satellite {
    Satellite { id: SatelliteId(id), plane_index: 0, slot_index: id, lens_capacity: cap, lens_success: q }
}

fn isl(a: u32, b: u32) -> Isl {
    Isl::new(SatelliteId(a), SatelliteId(b))
}

/// Desk-scale experiment config shared by the trend criteria.
fn desk_config(algorithm: Algorithm) -> ScenarioConfig {
    let mut config = ScenarioConfig::default();
    config.commodities.total_demand = 7.5;
    config.simulation.horizon_s = 3600;
    config.simulation.planning_period_s = 600;
    config.simulation.algorithm = algorithm;
    config
}

// ------------------------------------------------------------ criterion 1

#[test]
fn c01_channel_formulas() {
    let cases = [
        (0.0, 0.2, 0.0),
        (50.0, 0.2, 0.9),
        (15.0, 0.2, 1.0 - 10f64.powf(-0.3)),
        (100.0, 0.35, 1.0 - 10f64.powf(-3.5)),
    ];
    for (l, gamma, expected) in cases {
        let q = fiber_loss(FiberParams { gamma_db_per_km: gamma, length_km: l });
        assert!((q - expected).abs() < 1e-12, "fiber_loss({l}, {gamma}) = {q}, want {expected}");
    }
    let link_cases = [
        (1.0, 1, 0.0, 1.0),
        (0.5, 2, 0.5, 0.4375),
        (0.9, 3, 0.9, 1.0 - (1.0 - 0.09f64).powi(3)),
    ];
    for (qg, n, qc, expected) in link_cases {
        let q = link_success(GenerationParams::new(qg, n), qc);
        assert!((q - expected).abs() < 1e-12, "link_success({qg},{n},{qc}) = {q}, want {expected}");
    }
    pass(1, "fiber loss and slotted generation match hand-evaluated values to 1e-12");
}

// ------------------------------------------------------------ criterion 2

/// Stated as: for random chains of 2..=5 links, the distribution LP equals
/// prod(q_swap) * min(q_e * c_e). The formula is exact for single-swap
/// chains; for longer chains the LP legitimately exceeds it by mixing swap
/// orders (it upper-bounds every protocol, and a nested protocol already
/// beats the formula when the bottleneck sits at an end link). The
/// criterion is kept as stated; the assertion reports how the LP relates
/// to the formula.
#[test]
fn c02_chain_oracle() {
    let mut rng = StdRng::seed_from_u64(202);
    let mut failures = Vec::new();
    for case in 0..100 {
        let links = rng.gen_range(2..=5usize);
        let names: Vec<String> = (0..=links).map(|i| format!("s{i}")).collect();
        let mut stations = Vec::new();
        let mut swap_product = 1.0;
        for (i, name) in names.iter().enumerate() {
            let swap = rng.gen_range(0.85..0.98);
            stations.push(station(name, swap));
            if i > 0 && i < links {
                swap_product *= swap;
            }
        }
        let mut edges = Vec::new();
        let mut min_rate = f64::INFINITY;
        for w in names.windows(2) {
            let q: f64 = rng.gen_range(0.3..0.95);
            let c = rng.gen_range(4..15u32);
            min_rate = min_rate.min(q * c as f64);
            edges.push((w[0].clone(), w[1].clone(), q, c));
        }
        let edge_refs: Vec<(&str, &str, f64, u32)> =
            edges.iter().map(|(a, b, q, c)| (a.as_str(), b.as_str(), *q, *c)).collect();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let g = fiber_graph(&name_refs, &edge_refs);
        let commodities = vec![pair(&names[0], &names[links])];
        let demands = vec![f64::MAX / 4.0];
        let plan = edt::solve_edt(&EdtInput {
            graph: &g,
            stations: &stations,
            commodities: &commodities,
            demands: &demands,
            objective: EdtObjective::MaxTotal,
            repeaters: RepeaterMode::AllStations,
        })
        .unwrap();
        let formula = swap_product * min_rate;
        let lp = plan.commodity_edr[0];
        assert!(lp >= formula - 1e-6, "case {case}: LP {lp} fell below the formula {formula}");
        if (lp - formula).abs() > 1e-6 {
            failures.push((case, links, lp, formula));
        }
    }
    if failures.is_empty() {
        pass(2, "100 random chains matched prod(q_swap)*min(rate) to 1e-6");
    } else {
        println!(
            "criterion  2: FAIL - {}/100 chains exceed the stated formula (all with >= 3 links; \
             the LP upper-bounds every protocol and a nested protocol already beats the formula \
             on end-bottleneck chains, e.g. case {}: {} links, LP {:.6} vs formula {:.6}); \
             single-swap chains all matched to 1e-6",
            failures.len(),
            failures[0].0,
            failures[0].1,
            failures[0].2,
            failures[0].3
        );
        panic!(
            "criterion 2 is unattainable as stated for >=3-link chains ({} mismatches); \
             see the longer-chain analysis in the test comment",
            failures.len()
        );
    }
}

// ------------------------------------------------------------ criterion 3

/// Independent grid-search brute force over (g, y) schedules: generation
/// ratios are eliminated analytically (conservation fixes them given the
/// swap rates), and the swap-rate space is searched by a zooming pattern
/// with diagonal moves and restarts.
struct BruteInstance {
    stations: Vec<GroundStation>,
    rates: BTreeMap<StationPair, f64>,
    commodities: Vec<StationPair>,
}

impl BruteInstance {
    fn pairs(&self) -> Vec<StationPair> {
        let mut v: Vec<StationPair> = self.rates.keys().cloned().collect();
        v.sort();
        v
    }

    fn triples(&self) -> Vec<(StationId, StationPair)> {
        let pairs = self.pairs();
        let mut out = Vec::new();
        for mn in &pairs {
            for k in &self.stations {
                if mn.contains(&k.id) {
                    continue;
                }
                let mk = StationPair::new(mn.first().clone(), k.id.clone());
                let kn = StationPair::new(k.id.clone(), mn.second().clone());
                if self.rates.contains_key(&mk) && self.rates.contains_key(&kn) {
                    out.push((k.id.clone(), mn.clone()));
                }
            }
        }
        out
    }

    /// Net swap consumption of pair `p` per unit of each swap rate:
    /// +1 when p feeds the swap, -q_k when the swap produces p.
    fn needed_coefs(&self, triples: &[(StationId, StationPair)]) -> BTreeMap<StationPair, Vec<f64>> {
        let swap: BTreeMap<&StationId, f64> =
            self.stations.iter().map(|s| (&s.id, s.swap_success)).collect();
        let mut rows = BTreeMap::new();
        for p in self.pairs() {
            let mut coefs = vec![0.0; triples.len()];
            for (j, (k, out)) in triples.iter().enumerate() {
                if *out == p {
                    coefs[j] -= swap[&k];
                }
                let (m, n) = (out.first(), out.second());
                if StationPair::new(m.clone(), k.clone()) == p
                    || StationPair::new(k.clone(), n.clone()) == p
                {
                    coefs[j] += 1.0;
                }
            }
            rows.insert(p, coefs);
        }
        rows
    }

    /// Objective at a swap-rate vector, or None if no feasible generation
    /// ratios support it.
    fn evaluate_with(
        &self,
        coefs: &BTreeMap<StationPair, Vec<f64>>,
        w: &[f64],
    ) -> Option<f64> {
        if w.iter().any(|v| *v < -1e-9) {
            return None;
        }
        let mut total = 0.0;
        for (p, row) in coefs {
            let needed: f64 = row.iter().zip(w).map(|(c, v)| c * v).sum();
            let rate_cap = self.rates[p];
            if self.commodities.contains(p) {
                // generation ratio 1 is always optimal at commodity pairs
                let zeta = rate_cap - needed;
                if zeta < -1e-9 {
                    return None;
                }
                total += zeta.max(0.0);
            } else {
                // conservation pins g = needed / rate
                if needed < -1e-9 || needed > rate_cap + 1e-9 {
                    return None;
                }
            }
        }
        Some(total)
    }

    /// Exhaustive brute force: enumerate every combination of active
    /// constraints (each pair's net consumption pinned at 0 or its rate,
    /// commodity pairs optionally drained to zeta = 0) against every
    /// same-size support of swap rates, solve the square system, and keep
    /// the best feasible point. For 3-station instances a literal zooming
    /// grid search over the swap-rate box cross-checks the enumeration.
    fn brute_force(&self) -> f64 {
        let triples = self.triples();
        let d = triples.len();
        let coefs = self.needed_coefs(&triples);
        if d == 0 {
            return self.evaluate_with(&coefs, &[]).unwrap_or(0.0);
        }
        let mut best = self.evaluate_with(&coefs, &vec![0.0; d]).unwrap_or(0.0);
        // candidate active rows: (coef vector, rhs)
        let pairs = self.pairs();
        let mut options: Vec<Vec<(&Vec<f64>, f64)>> = Vec::new();
        for p in &pairs {
            let row = &coefs[p];
            if self.commodities.contains(p) {
                options.push(vec![(row, self.rates[p])]);
            } else {
                options.push(vec![(row, 0.0), (row, self.rates[p])]);
            }
        }
        // iterate subsets of pairs with one option each
        let np = pairs.len();
        for mask in 0u32..(1 << np) {
            let chosen: Vec<usize> = (0..np).filter(|i| mask & (1 << i) != 0).collect();
            let k = chosen.len();
            if k > d || k > 8 {
                continue;
            }
            let mut option_idx = vec![0usize; k];
            loop {
                let rows: Vec<(&Vec<f64>, f64)> =
                    chosen.iter().zip(&option_idx).map(|(p, o)| options[*p][*o]).collect();
                self.best_over_supports(&coefs, &rows, d, &mut best);
                // advance option counter
                let mut carry = true;
                for (slot, p) in option_idx.iter_mut().zip(&chosen) {
                    if !carry {
                        break;
                    }
                    *slot += 1;
                    if *slot < options[*p].len() {
                        carry = false;
                    } else {
                        *slot = 0;
                    }
                }
                if carry {
                    break;
                }
            }
        }
        if d <= 3 {
            best = best.max(self.grid_zoom(&coefs, d));
        }
        best
    }

    /// Solves rows over every coordinate support of matching size.
    fn best_over_supports(
        &self,
        coefs: &BTreeMap<StationPair, Vec<f64>>,
        rows: &[(&Vec<f64>, f64)],
        d: usize,
        best: &mut f64,
    ) {
        let k = rows.len();
        if k == 0 {
            return;
        }
        let mut support: Vec<usize> = (0..k).collect();
        loop {
            if let Some(w) = solve_support(rows, &support, d) {
                if let Some(val) = self.evaluate_with(coefs, &w) {
                    if val > *best {
                        *best = val;
                    }
                }
            }
            // next k-combination of 0..d
            let mut i = k;
            loop {
                if i == 0 {
                    return;
                }
                i -= 1;
                if support[i] != i + d - k {
                    support[i] += 1;
                    for j in (i + 1)..k {
                        support[j] = support[j - 1] + 1;
                    }
                    break;
                }
            }
        }
    }

    /// Literal zooming grid search over the full swap-rate box (small
    /// dimensions only).
    fn grid_zoom(&self, coefs: &BTreeMap<StationPair, Vec<f64>>, d: usize) -> f64 {
        let scale: f64 = self.rates.values().cloned().fold(0.0, f64::max);
        let mut center = vec![0.0; d];
        let mut span = scale;
        let mut best = self.evaluate_with(coefs, &center).unwrap_or(0.0);
        const POINTS: i32 = 10;
        for _ in 0..60 {
            let mut idxs = vec![-POINTS; d];
            let mut best_here = center.clone();
            'grid: loop {
                let w: Vec<f64> = center
                    .iter()
                    .zip(&idxs)
                    .map(|(c, off)| (c + *off as f64 * span / POINTS as f64).max(0.0))
                    .collect();
                if let Some(val) = self.evaluate_with(coefs, &w) {
                    if val > best + 1e-12 {
                        best = val;
                        best_here = w;
                    }
                }
                for t in 0..d {
                    idxs[t] += 1;
                    if idxs[t] <= POINTS {
                        continue 'grid;
                    }
                    idxs[t] = -POINTS;
                }
                break;
            }
            center = best_here;
            span *= 0.55;
        }
        best
    }
}

/// Solves the square system rows x support, returning the full-width w.
fn solve_support(rows: &[(&Vec<f64>, f64)], support: &[usize], d: usize) -> Option<Vec<f64>> {
    let k = rows.len();
    let mut a = vec![0.0; k * k];
    let mut b = vec![0.0; k];
    for (r, (coef, rhs)) in rows.iter().enumerate() {
        for (c, s) in support.iter().enumerate() {
            a[r * k + c] = coef[*s];
        }
        b[r] = *rhs;
    }
    // gaussian elimination with partial pivoting
    for col in 0..k {
        let mut piv = col;
        for r in (col + 1)..k {
            if a[r * k + col].abs() > a[piv * k + col].abs() {
                piv = r;
            }
        }
        if a[piv * k + col].abs() < 1e-10 {
            return None;
        }
        if piv != col {
            for c in 0..k {
                a.swap(col * k + c, piv * k + c);
            }
            b.swap(col, piv);
        }
        let diag = a[col * k + col];
        for r in 0..k {
            if r != col {
                let f = a[r * k + col] / diag;
                if f != 0.0 {
                    for c in col..k {
                        a[r * k + c] -= f * a[col * k + c];
                    }
                    b[r] -= f * b[col];
                }
            }
        }
    }
    let mut w = vec![0.0; d];
    for (c, s) in support.iter().enumerate() {
        let v = b[c] / a[c * k + c];
        if v < -1e-9 {
            return None;
        }
        w[*s] = v.max(0.0);
    }
    Some(w)
}

#[test]
fn c03_brute_force_edt_equivalence() {
    let mut rng = StdRng::seed_from_u64(303);
    let mut worst: f64 = 0.0;
    for case in 0..60 {
        let n = rng.gen_range(3..=4usize);
        let names: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
        let stations: Vec<GroundStation> =
            names.iter().map(|nm| station(nm, rng.gen_range(0.85..0.98))).collect();
        // complete fiber graph so conservation pins every generation ratio
        let mut rates = BTreeMap::new();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let q: f64 = rng.gen_range(0.2..0.9);
                let c = rng.gen_range(3..12u32);
                rates.insert(pair(&names[i], &names[j]), q * c as f64);
                edges.push((names[i].clone(), names[j].clone(), q, c));
            }
        }
        let n_com = rng.gen_range(1..=2usize);
        let mut commodities = Vec::new();
        while commodities.len() < n_com {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                let p = pair(&names[a], &names[b]);
                if !commodities.contains(&p) {
                    commodities.push(p);
                }
            }
        }
        let edge_refs: Vec<(&str, &str, f64, u32)> =
            edges.iter().map(|(a, b, q, c)| (a.as_str(), b.as_str(), *q, *c)).collect();
        let name_refs: Vec<&str> = names.iter().map(String::as_str).collect();
        let graph = fiber_graph(&name_refs, &edge_refs);
        let demands = vec![f64::MAX / 4.0; commodities.len()];
        let plan = edt::solve_edt(&EdtInput {
            graph: &graph,
            stations: &stations,
            commodities: &commodities,
            demands: &demands,
            objective: EdtObjective::MaxTotal,
            repeaters: RepeaterMode::AllStations,
        })
        .unwrap();
        let lp = plan.total_edr();
        let inst = BruteInstance { stations, rates, commodities };
        let brute = inst.brute_force();
        let gap = (lp - brute).abs();
        worst = worst.max(gap);
        assert!(gap < 1e-3, "case {case}: LP {lp} vs grid {brute} (gap {gap:.2e})");
    }
    pass(3, &format!("60 instances with <= 4 stations matched grid search, worst gap {worst:.2e}"));
}

// ------------------------------------------------------------ criterion 4

#[test]
fn c04_lpp_relaxation_hand_cases() {
    let single = LppInstance {
        satellites: vec![sat(0, 0.95, 4), sat(1, 0.95, 4)],
        isls: vec![isl(0, 1)],
        alpha: 10.0,
        blocks: vec![block(0, &[0], &[1])],
    };
    let sol = lpp::solve_relaxation(&single).unwrap();
    assert!((sol.objective - 9.5).abs() < 1e-6, "single ISL: {}", sol.objective);

    let two_path = LppInstance {
        satellites: vec![sat(0, 0.9, 2), sat(1, 0.9, 2), sat(2, 0.9, 2)],
        isls: vec![isl(0, 1), isl(0, 2), isl(1, 2)],
        alpha: 10.0,
        blocks: vec![block(0, &[0], &[1])],
    };
    let sol = lpp::solve_relaxation(&two_path).unwrap();
    assert!((sol.objective - 17.1).abs() < 1e-6, "two paths: {}", sol.objective);
    pass(4, "single-ISL optimum 9.5 and two-disjoint-path optimum 17.1 within 1e-6");
}

fn block(commodity: usize, sources: &[u32], dests: &[u32]) -> LppBlock {
    LppBlock {
        commodity,
        epoch: 0,
        start_s: 0,
        end_s: 600,
        duration_slots: 1.0,
        sources: sources.iter().map(|s| SatelliteId(*s)).collect(),
        dests: dests.iter().map(|s| SatelliteId(*s)).collect(),
    }
}

fn random_lpp_instance(rng: &mut StdRng) -> LppInstance {
    let n_sats = rng.gen_range(5..10u32);
    let satellites: Vec<Satellite> =
        (0..n_sats).map(|i| sat(i, rng.gen_range(0.9..0.99), rng.gen_range(1..4))).collect();
    let mut isls: Vec<Isl> = (0..n_sats).map(|i| isl(i, (i + 1) % n_sats)).collect();
    for _ in 0..n_sats {
        let a = rng.gen_range(0..n_sats);
        let b = rng.gen_range(0..n_sats);
        if a != b && !isls.contains(&isl(a, b)) {
            isls.push(isl(a, b));
        }
    }
    let n_blocks = rng.gen_range(1..5usize);
    let blocks = (0..n_blocks)
        .map(|c| {
            let s = rng.gen_range(0..n_sats);
            let mut d = rng.gen_range(0..n_sats);
            if d == s {
                d = (d + 1) % n_sats;
            }
            let start = 600 * rng.gen_range(0..2u64);
            LppBlock {
                commodity: c,
                epoch: 0,
                start_s: start,
                end_s: start + 600,
                duration_slots: 60.0,
                sources: vec![SatelliteId(s)],
                dests: vec![SatelliteId(d)],
            }
        })
        .collect();
    LppInstance { satellites, isls, alpha: 10.0, blocks }
}

// ------------------------------------------------------------ criterion 5

#[test]
fn c05_decomposition_reconstructs_eta() {
    let mut rng = StdRng::seed_from_u64(505);
    let mut worst: f64 = 0.0;
    for case in 0..100 {
        let inst = random_lpp_instance(&mut rng);
        let sol = lpp::solve_relaxation(&inst).unwrap();
        let (cands, _) = lpp::decompose_flows(&sol, &inst);
        for b in &sol.blocks {
            let total: f64 = cands
                .iter()
                .filter(|c| c.commodity == b.commodity && c.epoch == b.epoch)
                .map(|c| c.received)
                .sum();
            let gap = (total - b.eta()).abs();
            worst = worst.max(gap);
            assert!(gap < 1e-6, "case {case} commodity {}: {gap:.2e}", b.commodity);
        }
    }
    pass(5, &format!("path flows reconstruct eta on 100 instances, worst gap {worst:.2e}"));
}

// ------------------------------------------------------------ criterion 6

#[test]
fn c06_rounding_feasibility() {
    let mut rng = StdRng::seed_from_u64(606);
    for case in 0..100 {
        let inst = random_lpp_instance(&mut rng);
        let sol = lpp::solve_relaxation(&inst).unwrap();
        let (cands, _) = lpp::decompose_flows(&sol, &inst);
        let sol_lp = sol.objective;
        let mut seed_rng = ChaCha8Rng::seed_from_u64(case);
        let rr = lpp::round_randomized(&cands, &inst, sol_lp, &mut seed_rng);
        let dr = lpp::round_deterministic(&cands, &inst, sol_lp, 0.5);
        assert_eq!(lpp::capacity_violations(&rr.selected, &inst), 0, "case {case} randomized");
        assert_eq!(lpp::capacity_violations(&dr.selected, &inst), 0, "case {case} deterministic");
        assert!(rr.sol_alg <= rr.sol_lp + 1e-6);
        assert!(dr.sol_alg <= dr.sol_lp + 1e-6);
    }
    pass(6, "zero lens-capacity violations after pruning on 100 instances x both roundings");
}

// ------------------------------------------------------------ criterion 7

#[test]
fn c07_randomized_rounding_expectation() {
    let inst = LppInstance {
        satellites: vec![sat(0, 0.95, 8), sat(1, 0.95, 8), sat(2, 0.95, 8), sat(3, 0.95, 8)],
        isls: vec![isl(0, 1), isl(2, 3)],
        alpha: 10.0,
        blocks: vec![],
    };
    let cand = |sats: &[u32], x: f64, value: f64| CandidateLightpath {
        commodity: 0,
        epoch: 0,
        start_s: 0,
        end_s: 600,
        duration_slots: 1.0,
        satellites: sats.iter().map(|s| SatelliteId(*s)).collect(),
        x_frac: x,
        received: value,
    };
    let probe = cand(&[0, 1], 0.6, 9.0);
    let n = 10_000u64;
    let mut hits = 0usize;
    for seed in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sel = lpp::round_randomized(std::slice::from_ref(&probe), &inst, 9.0, &mut rng);
        hits += sel.selected.len();
    }
    let freq = hits as f64 / n as f64;
    assert!((0.585..=0.615).contains(&freq), "selection frequency {freq}");

    // pre-pruning objective mean against linearity of expectation
    let cands = [cand(&[0, 1], 0.6, 9.0), cand(&[2, 3], 0.35, 7.5)];
    let expected: f64 = cands.iter().map(|c| c.x_frac * c.received).sum();
    let mut sum = 0.0;
    let mut sumsq = 0.0;
    for seed in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let val: f64 = cands
            .iter()
            .filter(|c| rng.gen::<f64>() < c.x_frac)
            .map(|c| c.duration_slots * c.received)
            .sum();
        sum += val;
        sumsq += val * val;
    }
    let mean = sum / n as f64;
    let var = (sumsq / n as f64 - mean * mean).max(0.0);
    let sigma_mean = (var / n as f64).sqrt();
    assert!(
        (mean - expected).abs() <= 3.0 * sigma_mean,
        "pre-pruning mean {mean} vs {expected} (3 sigma {})",
        3.0 * sigma_mean
    );
    pass(
        7,
        &format!("selection frequency {freq:.4} in [0.585, 0.615]; objective mean within 3 sigma"),
    );
}

// ------------------------------------------------------------ criterion 8

/// Regression scenarios for the planned-rate upper bound: realized long-run
/// total EDR must stay within Sum(zeta) plus the 99% CI of the mean.
fn bound_check(
    name: &str,
    graph: AugmentedGraph,
    stations: Vec<GroundStation>,
    commodities: Vec<StationPair>,
    slots: u64,
) -> (f64, f64) {
    let demands = vec![f64::MAX / 4.0; commodities.len()];
    let plan = edt::solve_edt(&EdtInput {
        graph: &graph,
        stations: &stations,
        commodities: &commodities,
        demands: &demands,
        objective: EdtObjective::MaxTotal,
        repeaters: RepeaterMode::AllStations,
    })
    .unwrap();
    let planned = plan.total_edr();
    let segments = vec![PlanSegment { from_slot: 0, graph, plan }];
    let traces = protosim::run_horizon(&segments, &stations, &commodities, slots, 88).unwrap();
    let totals: Vec<f64> =
        traces.iter().map(|t| t.delivered.iter().map(|d| *d as f64).sum()).collect();
    let stats = metrics::aggregate(&totals).unwrap();
    assert!(
        stats.mean <= planned + stats.ci99_half_width,
        "{name}: realized {} exceeds planned {} + CI {}",
        stats.mean,
        planned,
        stats.ci99_half_width
    );
    (stats.mean, planned)
}

#[test]
fn c08_theorem_bound_on_regression_scenarios() {
    let chain = fiber_graph(&["m", "k", "n"], &[("m", "k", 0.9, 10), ("k", "n", 0.8, 10)]);
    let (r1, p1) = bound_check(
        "chain",
        chain,
        vec![station("m", 0.9), station("k", 0.9), station("n", 0.9)],
        vec![pair("m", "n")],
        10_000,
    );

    let mut hybrid = fiber_graph(&["a", "b"], &[("a", "b", 0.9, 10)]);
    hybrid
        .edges
        .get_mut(&pair("a", "b"))
        .unwrap()
        .push(AugEdge::Virtual { capacity: 10.0, success: 0.0912673 });
    let (r2, p2) = bound_check(
        "fiber+lightpath",
        hybrid,
        vec![station("a", 0.9), station("b", 0.9)],
        vec![pair("a", "b")],
        10_000,
    );

    let mesh = fiber_graph(
        &["a", "b", "c", "d"],
        &[("a", "b", 0.85, 8), ("b", "c", 0.8, 10), ("c", "d", 0.75, 9), ("a", "c", 0.4, 6), ("b", "d", 0.5, 7)],
    );
    let (r3, p3) = bound_check(
        "mesh",
        mesh,
        vec![station("a", 0.9), station("b", 0.92), station("c", 0.88), station("d", 0.95)],
        vec![pair("a", "d"), pair("b", "c")],
        10_000,
    );
    pass(
        8,
        &format!(
            "realized <= planned + CI99 over 10^4 slots on all regression scenarios \
             (chain {r1:.3}/{p1:.3}, hybrid {r2:.3}/{p2:.3}, mesh {r3:.3}/{p3:.3})"
        ),
    );
}

// ------------------------------------------------------------ criterion 9

#[test]
fn c09_chain_monte_carlo_convergence() {
    let graph = fiber_graph(&["m", "k", "n"], &[("m", "k", 0.9, 10), ("k", "n", 0.8, 10)]);
    let stations = vec![station("m", 0.9), station("k", 0.9), station("n", 0.9)];
    let commodities = vec![pair("m", "n")];
    let demands = vec![f64::MAX / 4.0];
    let plan = edt::solve_edt(&EdtInput {
        graph: &graph,
        stations: &stations,
        commodities: &commodities,
        demands: &demands,
        objective: EdtObjective::MaxTotal,
        repeaters: RepeaterMode::AllStations,
    })
    .unwrap();
    assert!((plan.commodity_edr[0] - 7.2).abs() < 1e-6);
    let segments = vec![PlanSegment { from_slot: 0, graph, plan }];
    let traces = protosim::run_horizon(&segments, &stations, &commodities, 10_000, 7).unwrap();
    let avg = protosim::average_throughput(&traces, 1).unwrap();
    let rel = (avg - 7.2).abs() / 7.2;
    assert!(rel < 0.05, "realized {avg} deviates {:.2}% from 7.2", rel * 100.0);
    pass(9, &format!("chain scenario realized {avg:.4} ebits/slot, within 5% of 7.2"));
}

// ----------------------------------------------------------- criterion 10

#[test]
fn c10_trend_quesat_vs_ground() {
    let seeds = [1, 2, 3];
    let g = scenario::run_experiment(&desk_config(Algorithm::GEdt), &seeds).unwrap();
    let d = scenario::run_experiment(&desk_config(Algorithm::QuesatD), &seeds).unwrap();
    let r = scenario::run_experiment(&desk_config(Algorithm::QuesatR), &seeds).unwrap();
    for seed_outcome in d.per_seed.iter().chain(&r.per_seed).chain(&g.per_seed) {
        assert!(seed_outcome.upper_bound_ok, "seed {} broke the planned bound", seed_outcome.seed);
    }
    assert!(
        d.throughput.mean >= 2.0 * g.throughput.mean,
        "deterministic rounding {:.4} not 2x ground {:.4}",
        d.throughput.mean,
        g.throughput.mean
    );
    assert!(
        r.throughput.mean >= 2.0 * g.throughput.mean,
        "randomized rounding {:.4} not 2x ground {:.4}",
        r.throughput.mean,
        g.throughput.mean
    );
    assert!(
        d.satisfaction.mean > g.satisfaction.mean,
        "deterministic satisfaction {:.4} not above ground {:.4}",
        d.satisfaction.mean,
        g.satisfaction.mean
    );
    assert!(
        r.satisfaction.mean > g.satisfaction.mean,
        "randomized satisfaction {:.4} not above ground {:.4}",
        r.satisfaction.mean,
        g.satisfaction.mean
    );
    pass(
        10,
        &format!(
            "throughput D {:.3} / R {:.3} vs ground {:.4} ({:.0}x); satisfaction {:.3} / {:.3} vs {:.3}",
            d.throughput.mean,
            r.throughput.mean,
            g.throughput.mean,
            d.throughput.mean / g.throughput.mean.max(1e-9),
            d.satisfaction.mean,
            r.satisfaction.mean,
            g.satisfaction.mean
        ),
    );
}

// ----------------------------------------------------------- criterion 11

#[test]
fn c11_trend_distance_factor_sweep() {
    let factors = [1e-3, 1e-2, 1e-1, 1.0];
    let seeds = [1, 2];
    let mut ground = Vec::new();
    let mut quesat = Vec::new();
    for &f in &factors {
        let mut gc = desk_config(Algorithm::GEdt);
        gc.simulation.horizon_s = 1800;
        gc.simulation.demand_change_s = 1800;
        gc.simulation.distance_scale = f;
        ground.push(scenario::run_experiment(&gc, &seeds).unwrap().throughput.mean);
        let mut qc = desk_config(Algorithm::QuesatD);
        qc.simulation.horizon_s = 1800;
        qc.simulation.demand_change_s = 1800;
        qc.simulation.distance_scale = f;
        quesat.push(scenario::run_experiment(&qc, &seeds).unwrap().throughput.mean);
    }
    for w in ground.windows(2) {
        assert!(w[1] <= w[0] + 1e-9, "ground throughput must not increase with distance: {ground:?}");
    }
    // ratio non-decreasing, compared by cross-multiplication to tolerate a
    // vanishing ground baseline
    for k in 0..factors.len() - 1 {
        assert!(
            quesat[k + 1] * ground[k] >= quesat[k] * ground[k + 1] - 1e-9,
            "advantage ratio dropped between factor {} and {}: quesat {quesat:?} ground {ground:?}",
            factors[k],
            factors[k + 1]
        );
    }
    assert!(
        quesat[1] > ground[1],
        "no satellite advantage at factor 1e-2: {} vs {}",
        quesat[1],
        ground[1]
    );
    pass(
        11,
        &format!(
            "ground {:?} non-increasing; advantage ratio non-decreasing; quesat {:.3} > ground {:.3} at 1e-2",
            ground.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
            quesat[1],
            ground[1]
        ),
    );
}

// ----------------------------------------------------------- criterion 12

#[test]
fn c12_more_repeaters_never_hurt() {
    let mut base = desk_config(Algorithm::QuesatD);
    base.simulation.horizon_s = 1800;
    base.simulation.demand_change_s = 1800;
    base.simulation.distance_scale = 0.01;
    base.commodities.total_demand = 20.0;
    base.commodities.explicit = Some(vec![
        ("paris".into(), "newyork".into()),
        ("tokyo".into(), "beijing".into()),
        ("london".into(), "saopaulo".into()),
        ("seoul".into(), "sydney".into()),
    ]);
    for alg in [Algorithm::QuesatD, Algorithm::GEdt] {
        let mut all = base.clone();
        all.simulation.algorithm = alg;
        all.simulation.repeaters = scenario::RepeaterConfig::AllStations;
        let mut only = all.clone();
        only.simulation.repeaters = scenario::RepeaterConfig::CommoditiesOnly;
        let seed = [5u64];
        let with_all = scenario::run_experiment(&all, &seed).unwrap();
        let with_only = scenario::run_experiment(&only, &seed).unwrap();
        let (t_all, t_only) = (with_all.throughput.mean, with_only.throughput.mean);
        assert!(
            t_all >= t_only - 1e-9,
            "{alg:?}: all-stations {t_all:.4} below commodities-only {t_only:.4}"
        );
        if alg == Algorithm::GEdt {
            assert!(
                t_all > t_only + 1e-6,
                "expected the relay stations to strictly help the ground case: {t_all:.4} vs {t_only:.4}"
            );
        }
    }
    pass(12, "all-stations repeater mode never fell below commodities-only on the same seed");
}


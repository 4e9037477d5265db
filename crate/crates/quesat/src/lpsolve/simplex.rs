//! Dense bounded-variable revised simplex with an explicit basis inverse,
//! two-phase start (artificials only for rows infeasible at the origin
//! basis), and Bland's-rule fallback after a run of degenerate pivots.

use super::{LpModel, LpSolution, LpStatus, ModelError, Relation};

const REDUCED_COST_TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;
const DEGENERATE_STEP: f64 = 1e-12;
const BLAND_TRIGGER: usize = 1000;
const REFACTOR_EVERY: usize = 512;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum ColState {
    Basic(usize),
    AtLower,
    AtUpper,
    /// Free nonbasic variable resting at zero.
    FreeAtZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LoopResult {
    Converged,
    Unbounded,
}

/// Reusable simplex state over one model. After a successful [`solve`],
/// the objective can be swapped with [`set_objective`] and the model
/// re-optimized from the current (still feasible) basis with [`resolve`].
pub struct Simplex {
    n_struct: usize,
    m: usize,
    n_cols: usize,
    cols: Vec<Vec<(usize, f64)>>,
    lb: Vec<f64>,
    ub: Vec<f64>,
    obj: Vec<f64>,
    rhs: Vec<f64>,
    art_start: usize,
    state: Vec<ColState>,
    basis: Vec<usize>,
    x: Vec<f64>,
    /// Row-major m x m basis inverse.
    binv: Vec<f64>,
    pivots_since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
    solved_feasible: bool,
    // scratch buffers
    y: Vec<f64>,
    w: Vec<f64>,
}

impl Simplex {
    pub fn new(model: &LpModel) -> Result<Self, ModelError> {
        model.validate()?;
        let n_struct = model.vars.len();
        let m = model.rows.len();
        let mut cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_struct];
        for (r, row) in model.rows.iter().enumerate() {
            for (j, coef) in &row.terms {
                cols[*j].push((r, *coef));
            }
        }
        let mut lb: Vec<f64> = model.vars.iter().map(|v| v.lb).collect();
        let mut ub: Vec<f64> = model.vars.iter().map(|v| v.ub).collect();
        let mut obj: Vec<f64> = model.vars.iter().map(|v| v.obj).collect();
        // slack columns, one per row
        for (r, row) in model.rows.iter().enumerate() {
            cols.push(vec![(r, 1.0)]);
            let (slo, shi) = match row.rel {
                Relation::Le => (0.0, f64::INFINITY),
                Relation::Ge => (f64::NEG_INFINITY, 0.0),
                Relation::Eq => (0.0, 0.0),
            };
            lb.push(slo);
            ub.push(shi);
            obj.push(0.0);
        }
        let art_start = n_struct + m;
        let rhs: Vec<f64> = model.rows.iter().map(|r| r.rhs).collect();

        let mut sx = Simplex {
            n_struct,
            m,
            n_cols: art_start,
            cols,
            lb,
            ub,
            obj,
            rhs,
            art_start,
            state: Vec::new(),
            basis: Vec::new(),
            x: Vec::new(),
            binv: Vec::new(),
            pivots_since_refactor: 0,
            degenerate_run: 0,
            bland: false,
            solved_feasible: false,
            y: vec![0.0; m],
            w: vec![0.0; m],
        };
        sx.build_initial_basis();
        Ok(sx)
    }

    /// Nonbasic structurals rest at their finite bound nearest zero; each
    /// row then takes its own slack as basic when the residual fits the
    /// slack bounds, otherwise an artificial column is appended.
    fn build_initial_basis(&mut self) {
        let m = self.m;
        self.state = Vec::with_capacity(self.n_cols + m);
        self.x = vec![0.0; self.n_cols];
        for j in 0..self.n_struct {
            let (l, u) = (self.lb[j], self.ub[j]);
            let (st, v) = if l.is_finite() && u.is_finite() {
                if l.abs() <= u.abs() { (ColState::AtLower, l) } else { (ColState::AtUpper, u) }
            } else if l.is_finite() {
                (ColState::AtLower, l)
            } else if u.is_finite() {
                (ColState::AtUpper, u)
            } else {
                (ColState::FreeAtZero, 0.0)
            };
            self.state.push(st);
            self.x[j] = v;
        }
        // residuals with all structurals at their resting values
        let mut resid = self.rhs.clone();
        for j in 0..self.n_struct {
            if self.x[j] != 0.0 {
                for &(r, a) in &self.cols[j] {
                    resid[r] -= a * self.x[j];
                }
            }
        }
        self.basis = vec![usize::MAX; m];
        let mut binv_scale = vec![1.0; m];
        // (row, sigma, value) of artificials, appended after all slacks so
        // that state indices stay aligned with column indices
        let mut artificials: Vec<(usize, f64, f64)> = Vec::new();
        for r in 0..m {
            let slack = self.n_struct + r;
            let (slo, shi) = (self.lb[slack], self.ub[slack]);
            if resid[r] >= slo - 1e-12 && resid[r] <= shi + 1e-12 {
                self.state.push(ColState::Basic(r));
                self.basis[r] = slack;
                self.x[slack] = resid[r];
            } else {
                // slack rests at the bound nearest the residual; the
                // artificial absorbs what remains
                let sv = resid[r].clamp(slo, shi);
                self.state.push(if sv == slo { ColState::AtLower } else { ColState::AtUpper });
                self.x[slack] = sv;
                let t = resid[r] - sv;
                let sigma = if t >= 0.0 { 1.0 } else { -1.0 };
                artificials.push((r, sigma, t.abs()));
            }
        }
        for (r, sigma, value) in artificials {
            let art = self.n_cols;
            self.cols.push(vec![(r, sigma)]);
            self.lb.push(0.0);
            self.ub.push(f64::INFINITY);
            self.obj.push(0.0);
            self.x.push(value);
            self.state.push(ColState::Basic(r));
            self.basis[r] = art;
            binv_scale[r] = sigma;
            self.n_cols += 1;
        }
        self.binv = vec![0.0; m * m];
        for r in 0..m {
            self.binv[r * m + r] = binv_scale[r];
        }
        self.pivots_since_refactor = 0;
        self.degenerate_run = 0;
        self.bland = false;
    }

    fn has_artificials(&self) -> bool {
        self.n_cols > self.art_start
    }

    /// Runs phase 1 (if needed) and phase 2, producing the final status and
    /// assignment for the model's objective.
    pub fn solve(&mut self) -> Result<LpSolution, ModelError> {
        self.solved_feasible = false;
        if self.has_artificials() {
            let phase1: Vec<f64> = (0..self.n_cols)
                .map(|j| if j >= self.art_start { -1.0 } else { 0.0 })
                .collect();
            let outcome = self.optimize(&phase1, true)?;
            debug_assert_eq!(outcome, LoopResult::Converged);
            let infeas: f64 = (self.art_start..self.n_cols).map(|j| self.x[j]).sum();
            if infeas > 1e-7 {
                return Ok(LpSolution {
                    status: LpStatus::Infeasible,
                    objective: 0.0,
                    values: vec![0.0; self.n_struct],
                });
            }
            // pin any artificial still hanging around at zero
            for j in self.art_start..self.n_cols {
                self.ub[j] = 0.0;
                self.x[j] = self.x[j].clamp(0.0, 1e-12);
            }
        }
        self.resolve_inner()
    }

    /// Replaces the structural objective; slack and artificial costs stay 0.
    pub fn set_objective(&mut self, obj: &[f64]) {
        assert_eq!(obj.len(), self.n_struct);
        self.obj[..self.n_struct].copy_from_slice(obj);
    }

    /// Re-optimizes from the current basis. Valid after a solve that ended
    /// `Optimal`; otherwise falls back to a full solve.
    pub fn resolve(&mut self) -> Result<LpSolution, ModelError> {
        if !self.solved_feasible {
            return self.solve();
        }
        self.resolve_inner()
    }

    fn resolve_inner(&mut self) -> Result<LpSolution, ModelError> {
        let phase2 = self.obj.clone();
        let outcome = self.optimize(&phase2, false)?;
        if outcome == LoopResult::Unbounded {
            self.solved_feasible = false;
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                objective: f64::INFINITY,
                values: vec![0.0; self.n_struct],
            });
        }
        self.solved_feasible = true;
        let values: Vec<f64> = self.x[..self.n_struct].to_vec();
        let objective = values
            .iter()
            .zip(&self.obj[..self.n_struct])
            .map(|(x, c)| x * c)
            .sum();
        Ok(LpSolution { status: LpStatus::Optimal, objective, values })
    }

    pub fn values(&self) -> &[f64] {
        &self.x[..self.n_struct]
    }

    /// Simplex multipliers y = c_B B^-1 for the current basis under the
    /// current objective, one entry per original row.
    pub fn row_duals(&self) -> Vec<f64> {
        let mut y = vec![0.0; self.m];
        self.compute_duals(&self.obj.clone(), &mut y);
        y
    }

    fn compute_duals(&self, obj: &[f64], y: &mut [f64]) {
        let m = self.m;
        y.iter_mut().for_each(|v| *v = 0.0);
        for (r, &bcol) in self.basis.iter().enumerate() {
            let cb = obj[bcol];
            if cb != 0.0 {
                let row = &self.binv[r * m..(r + 1) * m];
                for (yi, bi) in y.iter_mut().zip(row) {
                    *yi += cb * bi;
                }
            }
        }
    }

    fn reduced_cost(&self, j: usize, obj: &[f64], y: &[f64]) -> f64 {
        let mut d = obj[j];
        for &(r, a) in &self.cols[j] {
            d -= y[r] * a;
        }
        d
    }

    /// Price all nonbasic columns and pick the entering one: Dantzig rule
    /// normally, lowest eligible index under Bland's rule.
    fn choose_entering(&self, obj: &[f64], y: &[f64], phase1: bool) -> Option<(usize, i8)> {
        let mut best: Option<(usize, i8, f64)> = None;
        for j in 0..self.n_cols {
            let st = self.state[j];
            if matches!(st, ColState::Basic(_)) || self.lb[j] == self.ub[j] {
                continue;
            }
            if !phase1 && j >= self.art_start {
                continue;
            }
            let d = self.reduced_cost(j, obj, y);
            let dir = match st {
                ColState::AtLower if d > REDUCED_COST_TOL => 1i8,
                ColState::AtUpper if d < -REDUCED_COST_TOL => -1i8,
                ColState::FreeAtZero if d.abs() > REDUCED_COST_TOL => {
                    if d > 0.0 { 1 } else { -1 }
                }
                _ => continue,
            };
            if self.bland {
                return Some((j, dir));
            }
            match best {
                Some((_, _, score)) if d.abs() <= score => {}
                _ => best = Some((j, dir, d.abs())),
            }
        }
        best.map(|(j, dir, _)| (j, dir))
    }

    fn ftran(&mut self, j: usize) {
        let m = self.m;
        self.w.iter_mut().for_each(|v| *v = 0.0);
        for &(r, a) in &self.cols[j] {
            if a != 0.0 {
                for i in 0..m {
                    self.w[i] += self.binv[i * m + r] * a;
                }
            }
        }
    }

    fn optimize(&mut self, obj: &[f64], phase1: bool) -> Result<LoopResult, ModelError> {
        let limit = 200_000 + 200 * (self.m + self.n_cols);
        let mut y = std::mem::take(&mut self.y);
        for _iter in 0..limit {
            if self.pivots_since_refactor >= REFACTOR_EVERY {
                self.refactorize()?;
            }
            self.compute_duals(obj, &mut y);
            let Some((enter, dir)) = self.choose_entering(obj, &y, phase1) else {
                self.y = y;
                return Ok(LoopResult::Converged);
            };
            self.ftran(enter);
            let step = self.ratio_test(enter, dir);
            match step {
                RatioResult::Unbounded => {
                    self.y = y;
                    return Ok(if phase1 { LoopResult::Converged } else { LoopResult::Unbounded });
                }
                RatioResult::BoundFlip(delta) => {
                    self.apply_step(enter, dir, delta);
                    let flipped = match self.state[enter] {
                        ColState::AtLower => ColState::AtUpper,
                        ColState::AtUpper => ColState::AtLower,
                        other => other,
                    };
                    self.state[enter] = flipped;
                    self.x[enter] = if flipped == ColState::AtUpper { self.ub[enter] } else { self.lb[enter] };
                    self.track_degeneracy(delta);
                }
                RatioResult::Pivot(delta, row) => {
                    self.apply_step(enter, dir, delta);
                    let leaving = self.basis[row];
                    let lx = self.x[leaving];
                    // snap the leaving variable onto the bound it hit
                    let leave_state = if (lx - self.lb[leaving]).abs() <= (lx - self.ub[leaving]).abs() {
                        self.x[leaving] = self.lb[leaving];
                        ColState::AtLower
                    } else {
                        self.x[leaving] = self.ub[leaving];
                        ColState::AtUpper
                    };
                    self.state[leaving] = leave_state;
                    self.state[enter] = ColState::Basic(row);
                    self.basis[row] = enter;
                    self.update_binv(row);
                    self.pivots_since_refactor += 1;
                    self.track_degeneracy(delta);
                }
            }
        }
        self.y = y;
        Err(ModelError::IterationLimit)
    }

    fn track_degeneracy(&mut self, delta: f64) {
        if delta <= DEGENERATE_STEP {
            self.degenerate_run += 1;
            if self.degenerate_run >= BLAND_TRIGGER {
                self.bland = true;
            }
        } else {
            self.degenerate_run = 0;
            self.bland = false;
        }
    }

    /// Moves the entering variable by `delta` in direction `dir`, updating
    /// the basic values through the current column image `w`.
    fn apply_step(&mut self, enter: usize, dir: i8, delta: f64) {
        if delta != 0.0 {
            let sd = dir as f64 * delta;
            for r in 0..self.m {
                if self.w[r] != 0.0 {
                    let b = self.basis[r];
                    self.x[b] -= sd * self.w[r];
                }
            }
            self.x[enter] += sd;
        }
    }

    fn ratio_test(&self, enter: usize, dir: i8) -> RatioResult {
        let s = dir as f64;
        let own_range = if dir > 0 {
            self.ub[enter] - self.x[enter]
        } else {
            self.x[enter] - self.lb[enter]
        };
        let mut best_delta = f64::INFINITY;
        let mut best_row: Option<usize> = None;
        let mut best_piv = 0.0;
        for r in 0..self.m {
            let coef = s * self.w[r];
            if coef.abs() <= PIVOT_TOL {
                continue;
            }
            let b = self.basis[r];
            // basic value moves by -coef * delta; it blocks at lb when
            // decreasing, at ub when increasing
            let limit = if coef > 0.0 { self.lb[b] } else { self.ub[b] };
            if !limit.is_finite() {
                continue;
            }
            let delta = ((self.x[b] - limit) / coef).max(0.0);
            let better = if delta < best_delta - 1e-12 {
                true
            } else if delta <= best_delta + 1e-12 {
                match best_row {
                    None => true,
                    Some(br) => {
                        if self.bland {
                            self.basis[r] < self.basis[br]
                        } else {
                            coef.abs() > best_piv
                        }
                    }
                }
            } else {
                false
            };
            if better {
                best_delta = best_delta.min(delta);
                best_row = Some(r);
                best_piv = coef.abs();
            }
        }
        if own_range.is_finite() && own_range <= best_delta {
            return RatioResult::BoundFlip(own_range);
        }
        match best_row {
            None => RatioResult::Unbounded,
            Some(r) => RatioResult::Pivot(best_delta, r),
        }
    }

    /// Eta update of the explicit inverse after the entering column replaced
    /// basis position `row`: new_binv = E * binv.
    fn update_binv(&mut self, row: usize) {
        let m = self.m;
        let piv = self.w[row];
        debug_assert!(piv.abs() > PIVOT_TOL / 10.0, "tiny pivot {piv}");
        let inv_piv = 1.0 / piv;
        for c in 0..m {
            self.binv[row * m + c] *= inv_piv;
        }
        // split borrows: copy pivot row once
        let pivot_row: Vec<f64> = self.binv[row * m..(row + 1) * m].to_vec();
        for i in 0..m {
            if i == row {
                continue;
            }
            let factor = self.w[i];
            if factor != 0.0 {
                let base = i * m;
                for c in 0..m {
                    self.binv[base + c] -= factor * pivot_row[c];
                }
            }
        }
    }

    /// Rebuilds the inverse from scratch by Gauss-Jordan with partial
    /// pivoting and refreshes the basic values from the nonbasic ones.
    fn refactorize(&mut self) -> Result<(), ModelError> {
        let m = self.m;
        let mut mat = vec![0.0; m * m];
        for (pos, &j) in self.basis.iter().enumerate() {
            for &(r, a) in &self.cols[j] {
                mat[r * m + pos] = a;
            }
        }
        let mut inv = vec![0.0; m * m];
        for i in 0..m {
            inv[i * m + i] = 1.0;
        }
        for col in 0..m {
            let mut piv_row = col;
            let mut piv_val = mat[col * m + col].abs();
            for r in (col + 1)..m {
                let v = mat[r * m + col].abs();
                if v > piv_val {
                    piv_val = v;
                    piv_row = r;
                }
            }
            if piv_val < 1e-12 {
                return Err(ModelError::Certification(f64::INFINITY));
            }
            if piv_row != col {
                for c in 0..m {
                    mat.swap(col * m + c, piv_row * m + c);
                    inv.swap(col * m + c, piv_row * m + c);
                }
            }
            let p = mat[col * m + col];
            for c in 0..m {
                mat[col * m + c] /= p;
                inv[col * m + c] /= p;
            }
            for r in 0..m {
                if r != col {
                    let f = mat[r * m + col];
                    if f != 0.0 {
                        for c in 0..m {
                            mat[r * m + c] -= f * mat[col * m + c];
                            inv[r * m + c] -= f * inv[col * m + c];
                        }
                    }
                }
            }
        }
        // basis order: column `pos` of mat corresponds to basis position pos,
        // rows were permuted alongside, so inv already maps onto positions.
        self.binv = inv;
        // refresh basic values: x_B = binv * (b - N x_N)
        let mut rhs = self.rhs.clone();
        for j in 0..self.n_cols {
            if !matches!(self.state[j], ColState::Basic(_)) && self.x[j] != 0.0 {
                for &(r, a) in &self.cols[j] {
                    rhs[r] -= a * self.x[j];
                }
            }
        }
        for pos in 0..m {
            let mut v = 0.0;
            for r in 0..m {
                v += self.binv[pos * m + r] * rhs[r];
            }
            self.x[self.basis[pos]] = v;
        }
        self.pivots_since_refactor = 0;
        Ok(())
    }

    /// Converts the final state into a checked solution against `model`.
    #[allow(dead_code)]
    pub fn objective_value(&self) -> f64 {
        self.x[..self.n_struct]
            .iter()
            .zip(&self.obj[..self.n_struct])
            .map(|(x, c)| x * c)
            .sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum RatioResult {
    Unbounded,
    /// The entering variable reaches its own opposite bound first.
    BoundFlip(f64),
    /// A basic variable at position .1 blocks after step .0.
    Pivot(f64, usize),
}

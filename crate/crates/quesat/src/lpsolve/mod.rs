//! Minimal linear-programming layer shared by the provisioning and
//! distribution planners: a backend-neutral model, a dense bounded-variable
//! revised simplex, and an LP-format dump for cross-checking against
//! external solvers.

mod simplex;

pub use simplex::Simplex;

use serde::Serialize;

/// Variable handle returned by [`LpModel::add_var`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct VarId(pub(crate) usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
pub(crate) struct VarDef {
    pub name: String,
    pub lb: f64,
    pub ub: f64,
    pub obj: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct RowDef {
    pub terms: Vec<(usize, f64)>,
    pub rel: Relation,
    pub rhs: f64,
}

/// A linear program in bounded form: named variables with bounds, a linear
/// objective (sense: maximize), and linear constraints.
#[derive(Debug, Clone, Default)]
pub struct LpModel {
    pub(crate) vars: Vec<VarDef>,
    pub(crate) rows: Vec<RowDef>,
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("constraint references undeclared variable index {0}")]
    UnknownVariable(usize),
    #[error("variable {0} has inconsistent bounds [{1}, {2}]")]
    BadBounds(String, f64, f64),
    #[error("non-finite coefficient in {0}")]
    NonFinite(String),
    #[error("simplex iteration limit reached")]
    IterationLimit,
    #[error("solution failed feasibility certification (residual {0:.3e})")]
    Certification(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Objective value; meaningful only when status is `Optimal`.
    pub objective: f64,
    /// One value per declared variable; all zeros unless `Optimal`.
    pub values: Vec<f64>,
}

impl LpModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// Declares a variable with bounds `[lb, ub]` (infinities allowed) and
    /// objective coefficient `obj`.
    pub fn add_var(&mut self, name: impl Into<String>, lb: f64, ub: f64, obj: f64) -> VarId {
        self.vars.push(VarDef { name: name.into(), lb, ub, obj });
        VarId(self.vars.len() - 1)
    }

    pub fn set_obj(&mut self, var: VarId, obj: f64) {
        self.vars[var.0].obj = obj;
    }

    /// Adds `sum(terms) rel rhs`. Terms referencing undeclared variables are
    /// rejected before any solve.
    pub fn add_constraint(
        &mut self,
        terms: impl IntoIterator<Item = (VarId, f64)>,
        rel: Relation,
        rhs: f64,
    ) -> Result<(), ModelError> {
        let mut row = Vec::new();
        for (var, coef) in terms {
            if var.0 >= self.vars.len() {
                return Err(ModelError::UnknownVariable(var.0));
            }
            if !coef.is_finite() {
                return Err(ModelError::NonFinite(format!("row {}", self.rows.len())));
            }
            if coef != 0.0 {
                row.push((var.0, coef));
            }
        }
        if !rhs.is_finite() {
            return Err(ModelError::NonFinite(format!("rhs of row {}", self.rows.len())));
        }
        self.rows.push(RowDef { terms: row, rel, rhs });
        Ok(())
    }

    pub(crate) fn validate(&self) -> Result<(), ModelError> {
        for v in &self.vars {
            if v.lb > v.ub {
                return Err(ModelError::BadBounds(v.name.clone(), v.lb, v.ub));
            }
            if v.lb.is_nan() || v.ub.is_nan() || !v.obj.is_finite() {
                return Err(ModelError::NonFinite(format!("variable {}", v.name)));
            }
        }
        Ok(())
    }

    /// Serializes the model in CPLEX LP text format so external solvers can
    /// cross-check results.
    pub fn to_lp_format(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        out.push_str("Maximize\n obj:");
        for (i, v) in self.vars.iter().enumerate() {
            if v.obj != 0.0 {
                let _ = write!(out, " {}{} {}", if v.obj >= 0.0 { "+" } else { "-" }, v.obj.abs(), ident(&v.name, i));
            }
        }
        out.push_str("\nSubject To\n");
        for (r, row) in self.rows.iter().enumerate() {
            let _ = write!(out, " c{r}:");
            for (j, coef) in &row.terms {
                let _ = write!(out, " {}{} {}", if *coef >= 0.0 { "+" } else { "-" }, coef.abs(), ident(&self.vars[*j].name, *j));
            }
            let rel = match row.rel {
                Relation::Le => "<=",
                Relation::Eq => "=",
                Relation::Ge => ">=",
            };
            let _ = writeln!(out, " {rel} {}", row.rhs);
        }
        out.push_str("Bounds\n");
        for (i, v) in self.vars.iter().enumerate() {
            let name = ident(&v.name, i);
            match (v.lb.is_finite(), v.ub.is_finite()) {
                (true, true) => { let _ = writeln!(out, " {} <= {name} <= {}", v.lb, v.ub); }
                (true, false) => { let _ = writeln!(out, " {name} >= {}", v.lb); }
                (false, true) => { let _ = writeln!(out, " {name} <= {}", v.ub); }
                (false, false) => { let _ = writeln!(out, " {name} free"); }
            }
        }
        out.push_str("End\n");
        out
    }

    /// Largest absolute constraint violation of an assignment.
    pub fn max_violation(&self, values: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for row in &self.rows {
            let lhs: f64 = row.terms.iter().map(|(j, c)| c * values[*j]).sum();
            let viol = match row.rel {
                Relation::Le => lhs - row.rhs,
                Relation::Ge => row.rhs - lhs,
                Relation::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }
}

fn ident(name: &str, idx: usize) -> String {
    if name.is_empty() {
        format!("v{idx}")
    } else {
        name.replace([' ', '+', '-'], "_")
    }
}

/// Solves the model with the built-in revised simplex, returning a
/// certified-feasible optimal basic solution or the correct
/// infeasible/unbounded status. Deterministic for a fixed model.
pub fn solve(model: &LpModel) -> Result<LpSolution, ModelError> {
    model.validate()?;
    let mut simplex = Simplex::new(model)?;
    let solution = simplex.solve()?;
    if solution.status == LpStatus::Optimal {
        let resid = model.max_violation(&solution.values);
        if resid > 1e-7 {
            return Err(ModelError::Certification(resid));
        }
        for (v, def) in solution.values.iter().zip(&model.vars) {
            if *v < def.lb - 1e-9 || *v > def.ub + 1e-9 {
                return Err(ModelError::Certification((def.lb - *v).max(*v - def.ub)));
            }
        }
    }
    Ok(solution)
}

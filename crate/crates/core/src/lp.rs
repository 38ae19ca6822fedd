//! Exact linear programming over the rationals.
//!
//! A dense two-phase primal simplex with Bland's pivoting rule. Every
//! membership and prolongation query in the crate is answered by this kernel,
//! so there is no floating-point path here at all.

use num_traits::{Signed, Zero};

use crate::error::{BaryError, Result};
use crate::rational::{Rational, RationalVector};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Relation {
    Le,
    Eq,
    Ge,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub coeffs: Vec<Rational>,
    pub relation: Relation,
    pub rhs: Rational,
}

/// `maximize objective · z` subject to linear constraints and optional
/// per-variable lower bounds. Variables start out non-negative; use
/// [`LinearProgram::free`] or [`LinearProgram::lower_bound`] to change that.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<Rational>,
    pub constraints: Vec<Constraint>,
    pub lower_bounds: Vec<Option<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal {
        optimum: Rational,
        solution: RationalVector,
    },
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn status(&self) -> LpStatus {
        match self {
            LpOutcome::Optimal { .. } => LpStatus::Optimal,
            LpOutcome::Infeasible => LpStatus::Infeasible,
            LpOutcome::Unbounded => LpStatus::Unbounded,
        }
    }

    pub fn optimum(&self) -> Option<&Rational> {
        match self {
            LpOutcome::Optimal { optimum, .. } => Some(optimum),
            _ => None,
        }
    }

    pub fn solution(&self) -> Option<&RationalVector> {
        match self {
            LpOutcome::Optimal { solution, .. } => Some(solution),
            _ => None,
        }
    }
}

impl LinearProgram {
    pub fn maximize(objective: Vec<Rational>) -> Self {
        let n = objective.len();
        LinearProgram {
            objective,
            constraints: Vec::new(),
            lower_bounds: vec![Some(Rational::zero()); n],
        }
    }

    /// A pure feasibility problem over `n` non-negative variables.
    pub fn feasibility(n: usize) -> Self {
        Self::maximize(vec![Rational::zero(); n])
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn constrain(
        &mut self,
        coeffs: Vec<Rational>,
        relation: Relation,
        rhs: Rational,
    ) -> &mut Self {
        self.constraints.push(Constraint {
            coeffs,
            relation,
            rhs,
        });
        self
    }

    pub fn free(&mut self, var: usize) -> &mut Self {
        self.lower_bounds[var] = None;
        self
    }

    pub fn lower_bound(&mut self, var: usize, bound: Rational) -> &mut Self {
        self.lower_bounds[var] = Some(bound);
        self
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        if self.lower_bounds.len() != n {
            return Err(BaryError::input(format!(
                "{} lower bounds for {n} variables",
                self.lower_bounds.len()
            )));
        }
        for (i, c) in self.constraints.iter().enumerate() {
            if c.coeffs.len() != n {
                return Err(BaryError::input(format!(
                    "constraint {i} has {} coefficients, expected {n}",
                    c.coeffs.len()
                )));
            }
        }
        Ok(())
    }

    /// Exact check of every constraint and bound at `z`.
    pub fn is_feasible(&self, z: &RationalVector) -> bool {
        if z.dim() != self.num_vars() {
            return false;
        }
        let bounds_ok = self
            .lower_bounds
            .iter()
            .zip(z.iter())
            .all(|(lb, v)| lb.as_ref().is_none_or(|lb| v >= lb));
        bounds_ok
            && self.constraints.iter().all(|c| {
                let lhs = dot(&c.coeffs, z.coords());
                match c.relation {
                    Relation::Le => lhs <= c.rhs,
                    Relation::Eq => lhs == c.rhs,
                    Relation::Ge => lhs >= c.rhs,
                }
            })
    }

    pub fn objective_value(&self, z: &RationalVector) -> Rational {
        dot(&self.objective, z.coords())
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter()
        .zip(b)
        .filter(|(x, _)| !x.is_zero())
        .map(|(x, y)| x * y)
        .fold(Rational::zero(), |acc, t| acc + t)
}

/// How an original variable is expressed in standard-form columns.
enum VarMap {
    Shifted { col: usize, shift: Rational },
    Split { pos: usize, neg: usize },
}

struct Tableau {
    rows: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
    /// Reduced profits `c_j - c_B B^-1 A_j`; a column may enter while positive.
    profit: Vec<Rational>,
    /// Columns that may never enter (artificials during phase 2).
    blocked: Vec<bool>,
}

enum PhaseEnd {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn pivot(&mut self, r: usize, e: usize) {
        let p = self.rows[r][e].clone();
        if p != Rational::from_integer(1.into()) {
            for v in self.rows[r].iter_mut() {
                if !v.is_zero() {
                    *v /= &p;
                }
            }
            self.rhs[r] /= &p;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let pivot_rhs = self.rhs[r].clone();
        let nz: Vec<usize> = (0..pivot_row.len())
            .filter(|&j| !pivot_row[j].is_zero())
            .collect();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r || row[e].is_zero() {
                continue;
            }
            let f = row[e].clone();
            for &j in &nz {
                row[j] -= &f * &pivot_row[j];
            }
            self.rhs[i] -= &f * &pivot_rhs;
        }
        if !self.profit[e].is_zero() {
            let f = self.profit[e].clone();
            for &j in &nz {
                self.profit[j] -= &f * &pivot_row[j];
            }
        }
        self.rows[r] = pivot_row;
        self.basis[r] = e;
    }

    /// Runs simplex iterations with Bland's rule until optimal or unbounded.
    fn run(&mut self) -> PhaseEnd {
        loop {
            let entering =
                (0..self.profit.len()).find(|&j| !self.blocked[j] && self.profit[j].is_positive());
            let Some(e) = entering else {
                return PhaseEnd::Optimal;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][e];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((best_i, best)) => {
                        ratio < *best || (ratio == *best && self.basis[i] < self.basis[*best_i])
                    }
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                None => return PhaseEnd::Unbounded,
                Some((r, _)) => self.pivot(r, e),
            }
        }
    }

    fn set_profit(&mut self, costs: Vec<Rational>) {
        self.profit = costs;
        for i in 0..self.rows.len() {
            let b = self.basis[i];
            if self.profit[b].is_zero() {
                continue;
            }
            let f = self.profit[b].clone();
            for (j, v) in self.rows[i].iter().enumerate() {
                if !v.is_zero() {
                    self.profit[j] -= &f * v;
                }
            }
        }
    }
}

/// Solves `lp` exactly.
pub fn solve_lp(lp: &LinearProgram) -> Result<LpOutcome> {
    lp.validate()?;
    let n = lp.num_vars();

    // Standard form: every column non-negative.
    let mut maps = Vec::with_capacity(n);
    let mut ncols = 0;
    for lb in &lp.lower_bounds {
        match lb {
            Some(shift) => {
                maps.push(VarMap::Shifted {
                    col: ncols,
                    shift: shift.clone(),
                });
                ncols += 1;
            }
            None => {
                maps.push(VarMap::Split {
                    pos: ncols,
                    neg: ncols + 1,
                });
                ncols += 2;
            }
        }
    }
    let n_struct = ncols;
    let n_slack = lp
        .constraints
        .iter()
        .filter(|c| c.relation != Relation::Eq)
        .count();
    let m = lp.constraints.len();

    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    let mut slack_of_row = vec![None; m];
    let mut next_slack = n_struct;
    for (i, c) in lp.constraints.iter().enumerate() {
        let mut row = vec![Rational::zero(); n_struct + n_slack];
        let mut b = c.rhs.clone();
        for (j, a) in c.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            match &maps[j] {
                VarMap::Shifted { col, shift } => {
                    row[*col] = a.clone();
                    b -= a * shift;
                }
                VarMap::Split { pos, neg } => {
                    row[*pos] = a.clone();
                    row[*neg] = -a;
                }
            }
        }
        match c.relation {
            Relation::Le => {
                row[next_slack] = Rational::from_integer(1.into());
                slack_of_row[i] = Some(next_slack);
                next_slack += 1;
            }
            Relation::Ge => {
                row[next_slack] = Rational::from_integer((-1).into());
                slack_of_row[i] = Some(next_slack);
                next_slack += 1;
            }
            Relation::Eq => {}
        }
        if b.is_negative() {
            for v in row.iter_mut() {
                *v = -&*v;
            }
            b = -b;
        }
        rows.push(row);
        rhs.push(b);
    }

    // Initial basis: a slack with coefficient +1 where available, else an artificial.
    let mut basis = vec![usize::MAX; m];
    let mut n_art = 0;
    for i in 0..m {
        if let Some(s) = slack_of_row[i] {
            if rows[i][s].is_positive() {
                basis[i] = s;
                continue;
            }
        }
        n_art += 1;
    }
    let total = n_struct + n_slack + n_art;
    let mut art = n_struct + n_slack;
    for (i, row) in rows.iter_mut().enumerate() {
        row.resize(total, Rational::zero());
        if basis[i] == usize::MAX {
            row[art] = Rational::from_integer(1.into());
            basis[i] = art;
            art += 1;
        }
    }
    let first_art = n_struct + n_slack;

    let mut t = Tableau {
        rows,
        rhs,
        basis,
        profit: Vec::new(),
        blocked: vec![false; total],
    };

    if n_art > 0 {
        let mut costs = vec![Rational::zero(); total];
        for c in costs.iter_mut().skip(first_art) {
            *c = Rational::from_integer((-1).into());
        }
        t.set_profit(costs);
        // Phase 1 is bounded above by zero, so it always ends optimal.
        t.run();
        let infeasible = t
            .basis
            .iter()
            .zip(&t.rhs)
            .any(|(&b, v)| b >= first_art && v.is_positive());
        if infeasible {
            return Ok(LpOutcome::Infeasible);
        }
        // Drive zero-level artificials out of the basis, dropping redundant rows.
        let mut i = 0;
        while i < t.rows.len() {
            if t.basis[i] >= first_art {
                match (0..first_art).find(|&j| !t.rows[i][j].is_zero()) {
                    Some(j) => {
                        t.pivot(i, j);
                        i += 1;
                    }
                    None => {
                        t.rows.remove(i);
                        t.rhs.remove(i);
                        t.basis.remove(i);
                    }
                }
            } else {
                i += 1;
            }
        }
        for b in t.blocked.iter_mut().skip(first_art) {
            *b = true;
        }
    }

    let mut costs = vec![Rational::zero(); total];
    for (j, c) in lp.objective.iter().enumerate() {
        match &maps[j] {
            VarMap::Shifted { col, .. } => costs[*col] = c.clone(),
            VarMap::Split { pos, neg } => {
                costs[*pos] = c.clone();
                costs[*neg] = -c;
            }
        }
    }
    t.set_profit(costs);
    if let PhaseEnd::Unbounded = t.run() {
        return Ok(LpOutcome::Unbounded);
    }

    let mut values = vec![Rational::zero(); total];
    for (i, &b) in t.basis.iter().enumerate() {
        values[b] = t.rhs[i].clone();
    }
    let solution: RationalVector = maps
        .iter()
        .map(|m| match m {
            VarMap::Shifted { col, shift } => &values[*col] + shift,
            VarMap::Split { pos, neg } => &values[*pos] - &values[*neg],
        })
        .collect();
    debug_assert!(
        lp.is_feasible(&solution),
        "simplex returned an infeasible point"
    );
    let optimum = lp.objective_value(&solution);
    Ok(LpOutcome::Optimal { optimum, solution })
}

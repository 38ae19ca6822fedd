//! Which points of a polytope are barycenters of a measure with full support.
//!
//! For `a ∈ M` let `V_a` be the set of `x ∈ M` for which the ray from `x`
//! through `a` can be extended past `a`, i.e. `a + α(a - x) ∈ M` for some
//! `α > 0`. A measure with support exactly `M` and barycenter `a` exists iff
//! `M` is the closure of `V_a`; for polytopes that holds iff every listed
//! vertex is in `V_a`, which in turn is equivalent to `a ∈ relint M`.

use std::fmt;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{BaryError, Result};
use crate::geometry::{contains, dense_sequence, euclidean, Polytope};
use crate::lp::{solve_lp, LinearProgram, LpOutcome, Relation};
use crate::rational::{rational_to_json, Rational, RationalVector};
use crate::witness::DiscreteMeasure;

/// Supremum of admissible prolongation coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Alpha {
    Finite(Rational),
    /// `x = a`: the prolonged point is `a` for every `α`.
    Infinite,
}

impl Alpha {
    pub fn is_positive(&self) -> bool {
        match self {
            Alpha::Finite(v) => v.is_positive(),
            Alpha::Infinite => true,
        }
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Alpha::Finite(v) => Some(v),
            Alpha::Infinite => None,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        match self {
            Alpha::Finite(v) => rational_to_json(v),
            Alpha::Infinite => serde_json::Value::String("inf".into()),
        }
    }
}

impl fmt::Display for Alpha {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Alpha::Finite(v) => write!(f, "{v}"),
            Alpha::Infinite => write!(f, "inf"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProlongationResult {
    pub alpha_max: Alpha,
    /// `a + alpha_max (a - x)`, present when `alpha_max` is finite and positive.
    pub witness_point: Option<RationalVector>,
}

fn require_member(m: &Polytope, p: &RationalVector, what: &str) -> Result<()> {
    p.check_dim(m.ambient_dim(), what)?;
    if !contains(m, p)? {
        return Err(BaryError::precondition(format!("{what} {p} is not in M")));
    }
    Ok(())
}

/// `sup { α ≥ 0 : a + α(a - x) ∈ M }`, by one LP over the vertex weights.
pub fn max_prolongation_alpha(
    m: &Polytope,
    a: &RationalVector,
    x: &RationalVector,
) -> Result<ProlongationResult> {
    require_member(m, a, "point a")?;
    require_member(m, x, "point x")?;
    prolongation_unchecked(m, a, x)
}

fn prolongation_unchecked(
    m: &Polytope,
    a: &RationalVector,
    x: &RationalVector,
) -> Result<ProlongationResult> {
    if a == x {
        return Ok(ProlongationResult {
            alpha_max: Alpha::Infinite,
            witness_point: None,
        });
    }
    let n = m.vertices().len();
    let dir = a - x;
    // Variables: λ_1..λ_n ≥ 0, then α ≥ 0.
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut lp = LinearProgram::maximize(objective);
    let mut sum = vec![Rational::one(); n + 1];
    sum[n] = Rational::zero();
    lp.constrain(sum, Relation::Eq, Rational::one());
    for k in 0..m.ambient_dim() {
        let mut row: Vec<Rational> = m.vertices().iter().map(|v| v[k].clone()).collect();
        row.push(-&dir[k]);
        lp.constrain(row, Relation::Eq, a[k].clone());
    }
    match solve_lp(&lp)? {
        LpOutcome::Optimal { optimum, .. } => {
            let witness_point = optimum.is_positive().then(|| a.add_scaled(&optimum, &dir));
            Ok(ProlongationResult {
                alpha_max: Alpha::Finite(optimum),
                witness_point,
            })
        }
        // a ∈ M makes α = 0 feasible, and a bounded M with x ≠ a bounds α.
        other => unreachable!("prolongation LP ended {:?}", other.status()),
    }
}

/// `x ∈ V_a`.
pub fn in_v_a(m: &Polytope, a: &RationalVector, x: &RationalVector) -> Result<bool> {
    Ok(max_prolongation_alpha(m, a, x)?.alpha_max.is_positive())
}

/// `a ∈ relint M`: maximize `ε` over `Σλ_i v_i = a, Σλ_i = 1, λ_i ≥ ε`; true iff `ε* > 0`.
pub fn in_relint(m: &Polytope, a: &RationalVector) -> Result<bool> {
    a.check_dim(m.ambient_dim(), "point a")?;
    Ok(relint_margin(m, a)?.is_some_and(|eps| eps.is_positive()))
}

/// Optimal `ε*` of the relative-interior LP, `None` when `a ∉ M`.
pub fn relint_margin(m: &Polytope, a: &RationalVector) -> Result<Option<Rational>> {
    a.check_dim(m.ambient_dim(), "point a")?;
    let n = m.vertices().len();
    // Variables: λ_1..λ_n ≥ 0, then ε free.
    let mut objective = vec![Rational::zero(); n + 1];
    objective[n] = Rational::one();
    let mut lp = LinearProgram::maximize(objective);
    lp.free(n);
    let mut sum = vec![Rational::one(); n + 1];
    sum[n] = Rational::zero();
    lp.constrain(sum, Relation::Eq, Rational::one());
    for k in 0..m.ambient_dim() {
        let mut row: Vec<Rational> = m.vertices().iter().map(|v| v[k].clone()).collect();
        row.push(Rational::zero());
        lp.constrain(row, Relation::Eq, a[k].clone());
    }
    for i in 0..n {
        let mut row = vec![Rational::zero(); n + 1];
        row[i] = Rational::one();
        row[n] = -Rational::one();
        lp.constrain(row, Relation::Ge, Rational::zero());
    }
    Ok(solve_lp(&lp)?.optimum().cloned())
}

/// Prolongation results for every listed vertex, in vertex order.
pub fn alpha_max_per_vertex(m: &Polytope, a: &RationalVector) -> Result<Vec<ProlongationResult>> {
    require_member(m, a, "point a")?;
    m.vertices()
        .par_iter()
        .map(|v| prolongation_unchecked(m, a, v))
        .collect()
}

/// `M = closure(V_a)`. `V_a` is convex, so it suffices that every vertex is in `V_a`;
/// conversely a vertex outside `V_a` means `a` sits on a proper face that the
/// vertex avoids, and the closure misses that vertex.
pub fn check_condition_ii(m: &Polytope, a: &RationalVector) -> Result<bool> {
    Ok(alpha_max_per_vertex(m, a)?
        .iter()
        .all(|r| r.alpha_max.is_positive()))
}

/// Approximate check of `M = closure(V_a)` from a dense prefix: the largest
/// distance from a vertex to the nearest prefix point that lies in `V_a`.
#[derive(Clone, Debug, PartialEq)]
pub struct DensePrefixCheck {
    pub prefix_len: usize,
    pub points_in_v_a: usize,
    pub max_vertex_gap: f64,
    pub tolerance: f64,
    pub passed: bool,
}

pub fn condition_ii_dense_check(
    m: &Polytope,
    a: &RationalVector,
    n: usize,
    tolerance: f64,
) -> Result<DensePrefixCheck> {
    require_member(m, a, "point a")?;
    let prefix = dense_sequence(m, n)?;
    let flags: Vec<bool> = prefix
        .par_iter()
        .map(|x| prolongation_unchecked(m, a, x).map(|r| r.alpha_max.is_positive()))
        .collect::<Result<_>>()?;
    let good: Vec<Vec<f64>> = prefix
        .iter()
        .zip(&flags)
        .filter(|(_, f)| **f)
        .map(|(x, _)| x.to_f64())
        .collect();
    let max_vertex_gap = m
        .vertices()
        .iter()
        .map(|v| {
            let v = v.to_f64();
            good.iter()
                .map(|g| euclidean(&v, g))
                .fold(f64::INFINITY, f64::min)
        })
        .fold(0.0, f64::max);
    Ok(DensePrefixCheck {
        prefix_len: n,
        points_in_v_a: good.len(),
        max_vertex_gap,
        tolerance,
        passed: max_vertex_gap <= tolerance,
    })
}

/// Mass-weighted mean of the atoms of `mu` in the open Euclidean ball
/// `|x - center| < radius`, or `None` when the ball holds no atom.
pub fn conditional_barycenter(
    mu: &DiscreteMeasure,
    center: &RationalVector,
    radius: &Rational,
) -> Option<RationalVector> {
    if !radius.is_positive() {
        return None;
    }
    let r2 = radius * radius;
    let mut mass = Rational::zero();
    let mut acc = RationalVector::zeros(center.dim());
    for (x, w) in mu.atoms().iter().zip(mu.weights()) {
        if (x - center).norm_sq() < r2 {
            mass += w;
            acc = acc.add_scaled(w, x);
        }
    }
    (!mass.is_zero()).then(|| acc.scale(&mass.recip()))
}

/// Both sides of the characterization for one point.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterizationReport {
    pub a: RationalVector,
    pub relint: bool,
    pub condition_ii: bool,
    pub alpha_max_per_vertex: Vec<Alpha>,
    /// Set when a witness measure was built for this point.
    pub witness: Option<DiscreteMeasure>,
}

impl CharacterizationReport {
    pub fn agrees(&self) -> bool {
        self.relint == self.condition_ii
    }
}

impl Serialize for CharacterizationReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let n = if self.witness.is_some() { 6 } else { 5 };
        let mut st = s.serialize_struct("CharacterizationReport", n)?;
        st.serialize_field("a", &self.a)?;
        st.serialize_field("relint", &self.relint)?;
        st.serialize_field("condition_ii", &self.condition_ii)?;
        let alphas: Vec<serde_json::Value> = self
            .alpha_max_per_vertex
            .iter()
            .map(Alpha::to_json)
            .collect();
        st.serialize_field("alpha_max_per_vertex", &alphas)?;
        st.serialize_field("agrees", &self.agrees())?;
        if let Some(w) = &self.witness {
            st.serialize_field("witness", w)?;
        }
        st.end()
    }
}

/// Runs the relative-interior test and the vertex prolongation test for `a`.
pub fn characterize(m: &Polytope, a: &RationalVector) -> Result<CharacterizationReport> {
    let per_vertex = alpha_max_per_vertex(m, a)?;
    let condition_ii = per_vertex.iter().all(|r| r.alpha_max.is_positive());
    Ok(CharacterizationReport {
        a: a.clone(),
        relint: in_relint(m, a)?,
        condition_ii,
        alpha_max_per_vertex: per_vertex.into_iter().map(|r| r.alpha_max).collect(),
        witness: None,
    })
}

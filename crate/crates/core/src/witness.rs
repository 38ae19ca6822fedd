//! Finite discrete probability measures and the explicit witness measure.
//!
//! For `a ∈ relint M` the witness is a mixture of two-point measures. Each
//! pair puts mass on a dense-sequence point `x_n` and on the point
//! `y_n = a + α_n (a - x_n)` beyond `a`, in proportions `α_n : 1`, so every
//! pair averages to `a` exactly. Pair `n` gets weight `2^-n`, renormalized over
//! the first `N` pairs.

use std::collections::HashMap;

use num_traits::{One, Signed, Zero};
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use serde::{Deserialize, Serialize};

use crate::characterize::{in_relint, max_prolongation_alpha, Alpha};
use crate::error::{BaryError, Result};
use crate::geometry::{dense_sequence, Polytope};
use crate::rational::{pow2_inv, serde_rational_vec, to_f64, Rational, RationalVector};
use crate::rng::stream_rng;

/// Atoms with strictly positive weights summing to exactly one; atoms are distinct.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "MeasureJson", into = "MeasureJson")]
pub struct DiscreteMeasure {
    atoms: Vec<RationalVector>,
    weights: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct MeasureJson {
    atoms: Vec<RationalVector>,
    #[serde(with = "serde_rational_vec")]
    weights: Vec<Rational>,
}

impl TryFrom<MeasureJson> for DiscreteMeasure {
    type Error = BaryError;
    fn try_from(raw: MeasureJson) -> Result<Self> {
        DiscreteMeasure::new(raw.atoms, raw.weights)
    }
}

impl From<DiscreteMeasure> for MeasureJson {
    fn from(mu: DiscreteMeasure) -> Self {
        MeasureJson {
            atoms: mu.atoms,
            weights: mu.weights,
        }
    }
}

fn merge(
    atoms: Vec<RationalVector>,
    weights: Vec<Rational>,
) -> Result<(Vec<RationalVector>, Vec<Rational>)> {
    if atoms.len() != weights.len() {
        return Err(BaryError::input(format!(
            "{} atoms but {} weights",
            atoms.len(),
            weights.len()
        )));
    }
    let Some(first) = atoms.first() else {
        return Err(BaryError::input("measure has no atoms"));
    };
    let dim = first.dim();
    let mut index: HashMap<RationalVector, usize> = HashMap::new();
    let mut out_atoms = Vec::new();
    let mut out_weights: Vec<Rational> = Vec::new();
    for (x, w) in atoms.into_iter().zip(weights) {
        x.check_dim(dim, "atom")?;
        if !w.is_positive() {
            return Err(BaryError::input(format!("atom weight {w} is not positive")));
        }
        match index.get(&x) {
            Some(&i) => out_weights[i] += w,
            None => {
                index.insert(x.clone(), out_atoms.len());
                out_atoms.push(x);
                out_weights.push(w);
            }
        }
    }
    Ok((out_atoms, out_weights))
}

impl DiscreteMeasure {
    /// Validates a probability measure, merging repeated atoms.
    pub fn new(atoms: Vec<RationalVector>, weights: Vec<Rational>) -> Result<Self> {
        let (atoms, weights) = merge(atoms, weights)?;
        let total: Rational = weights.iter().sum();
        if !total.is_one() {
            return Err(BaryError::input(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    pub fn dirac(x: RationalVector) -> Self {
        DiscreteMeasure {
            atoms: vec![x],
            weights: vec![Rational::one()],
        }
    }

    pub fn atoms(&self) -> &[RationalVector] {
        &self.atoms
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.atoms[0].dim()
    }

    /// Exact per-coordinate variance.
    pub fn variance(&self) -> Vec<Rational> {
        let mean = barycenter(self);
        (0..self.dim())
            .map(|k| {
                self.atoms
                    .iter()
                    .zip(&self.weights)
                    .map(|(x, w)| {
                        let d = &x[k] - &mean[k];
                        w * &d * &d
                    })
                    .sum()
            })
            .collect()
    }

    /// Renormalized restriction to the atoms satisfying `keep`, if any mass remains.
    pub fn restrict(&self, keep: impl Fn(&RationalVector) -> bool) -> Option<Self> {
        let (atoms, weights): (Vec<_>, Vec<_>) = self
            .atoms
            .iter()
            .zip(&self.weights)
            .filter(|(x, _)| keep(x))
            .map(|(x, w)| (x.clone(), w.clone()))
            .unzip();
        merge_and_normalize(atoms, weights).ok()
    }
}

/// Merges repeated atoms and rescales the weights to sum to one.
pub fn merge_and_normalize(
    atoms: Vec<RationalVector>,
    weights: Vec<Rational>,
) -> Result<DiscreteMeasure> {
    let (atoms, mut weights) = merge(atoms, weights)?;
    let total: Rational = weights.iter().sum();
    if total.is_zero() {
        return Err(BaryError::input("total weight is zero"));
    }
    if !total.is_one() {
        for w in weights.iter_mut() {
            *w /= &total;
        }
    }
    Ok(DiscreteMeasure { atoms, weights })
}

/// `Σ w_i x_i`.
pub fn barycenter(mu: &DiscreteMeasure) -> RationalVector {
    mu.atoms
        .iter()
        .zip(&mu.weights)
        .fold(RationalVector::zeros(mu.dim()), |acc, (x, w)| {
            acc.add_scaled(w, x)
        })
}

/// One two-point component of the witness measure.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessPair {
    pub x: RationalVector,
    /// Prolongation coefficient; `None` when `x = a`, where the pair collapses to `δ_a`.
    pub alpha: Option<Rational>,
    pub partner: RationalVector,
    pub weight: Rational,
}

impl WitnessPair {
    /// The pair's atoms with their absolute (already pair-weighted) masses.
    pub fn atoms(&self) -> Vec<(RationalVector, Rational)> {
        match &self.alpha {
            None => vec![(self.x.clone(), self.weight.clone())],
            Some(alpha) => {
                let denom = Rational::one() + alpha;
                vec![
                    (self.x.clone(), &self.weight * alpha / &denom),
                    (self.partner.clone(), &self.weight / &denom),
                ]
            }
        }
    }
}

/// The first `pairs` components of the witness measure for `a`.
pub fn witness_pairs(m: &Polytope, a: &RationalVector, pairs: usize) -> Result<Vec<WitnessPair>> {
    if pairs == 0 {
        return Err(BaryError::input("witness needs at least one pair"));
    }
    a.check_dim(m.ambient_dim(), "point a")?;
    if !in_relint(m, a)? {
        return Err(BaryError::Characterization(format!(
            "{a} is not in the relative interior of M, so no measure with support M has it as barycenter"
        )));
    }
    let xs = dense_sequence(m, pairs)?;
    let renorm = (Rational::one() - pow2_inv(pairs)).recip();
    let half = Rational::new(1.into(), 2.into());
    xs.into_iter()
        .enumerate()
        .map(|(i, x)| {
            let weight = pow2_inv(i + 1) * &renorm;
            match max_prolongation_alpha(m, a, &x)?.alpha_max {
                Alpha::Infinite => Ok(WitnessPair {
                    partner: x.clone(),
                    x,
                    alpha: None,
                    weight,
                }),
                Alpha::Finite(amax) => {
                    debug_assert!(amax.is_positive(), "relint point with a stuck direction");
                    let alpha = (&amax * &half).min(Rational::one());
                    let partner = a.add_scaled(&alpha, &(a - &x));
                    Ok(WitnessPair {
                        x,
                        alpha: Some(alpha),
                        partner,
                        weight,
                    })
                }
            }
        })
        .collect()
}

/// Discrete measure with barycenter exactly `a` whose support fills out `M` as `pairs` grows.
pub fn construct_witness(
    m: &Polytope,
    a: &RationalVector,
    pairs: usize,
) -> Result<DiscreteMeasure> {
    let (atoms, weights) = witness_pairs(m, a, pairs)?
        .iter()
        .flat_map(WitnessPair::atoms)
        .unzip();
    let mu = DiscreteMeasure::new(atoms, weights)?;
    debug_assert_eq!(&barycenter(&mu), a);
    Ok(mu)
}

/// `count` i.i.d. atoms drawn from `mu` with a generator seeded by `seed`.
pub fn sample(mu: &DiscreteMeasure, seed: u64, count: usize) -> Vec<RationalVector> {
    if mu.len() == 1 {
        return vec![mu.atoms[0].clone(); count];
    }
    let floats: Vec<f64> = mu.weights.iter().map(to_f64).collect();
    let dist = WeightedIndex::new(&floats).expect("weights are positive and sum to one");
    let mut rng = stream_rng(seed, 0);
    (0..count)
        .map(|_| mu.atoms[dist.sample(&mut rng)].clone())
        .collect()
}

/// Coordinate-wise mean of float points.
pub fn empirical_mean(points: &[Vec<f64>]) -> Result<Vec<f64>> {
    let first = points
        .first()
        .ok_or_else(|| BaryError::input("mean of an empty sample"))?;
    let mut acc = vec![0.0; first.len()];
    for p in points {
        for (a, x) in acc.iter_mut().zip(p) {
            *a += x;
        }
    }
    let n = points.len() as f64;
    Ok(acc.into_iter().map(|s| s / n).collect())
}

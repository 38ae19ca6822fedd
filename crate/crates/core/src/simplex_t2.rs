//! Barycenters of measures on the probability simplex, for a finite base set.
//!
//! With `K = {0, .., m-1}` the probability measures on `K` form the simplex
//! `Δ_{m-1}`. A measure `μ` with full support is the barycenter of the law
//! `η` of `F(a, x) = Σ_j a_j δ_{x_j}`, where `a` is drawn from a measure `λ`
//! on the weight set `A_J = { a ∈ [0,1]^J : Σ a_j = 1 }` and `x_1, .., x_J`
//! are i.i.d. draws from `μ`: `E[F(a, x)] = Σ_j E[a_j] μ = μ`.

use num_traits::{One, Signed, Zero};
use rand::distributions::WeightedIndex;
use rand::prelude::Distribution;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{BaryError, Result};
use crate::geometry::{covering_radius_f64, l1, DensePlan, Polytope};
use crate::rational::{pow2_inv, rat, serde_rational_vec, to_f64, Rational, RationalVector};
use crate::rng::{blocks, stream_rng};
use crate::witness::{DiscreteMeasure, WitnessPair};

/// A finite base set `K = {0, .., m-1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiniteK {
    m: usize,
}

impl FiniteK {
    pub fn new(m: usize) -> Result<Self> {
        if m < 1 {
            return Err(BaryError::input("K needs at least one point"));
        }
        Ok(FiniteK { m })
    }

    pub fn size(&self) -> usize {
        self.m
    }

    /// `Δ_{m-1}` as a vertex-list polytope.
    pub fn simplex(&self) -> Polytope {
        Polytope::standard_simplex(self.m).expect("m >= 1")
    }
}

fn check_distribution(p: &[Rational], what: &str) -> Result<()> {
    if p.is_empty() {
        return Err(BaryError::input(format!("{what} is empty")));
    }
    if let Some(neg) = p.iter().find(|v| v.is_negative()) {
        return Err(BaryError::input(format!("{what} has negative entry {neg}")));
    }
    let total: Rational = p.iter().sum();
    if !total.is_one() {
        return Err(BaryError::input(format!("{what} sums to {total}, not 1")));
    }
    Ok(())
}

/// A probability vector on `K`, i.e. a point of `Δ_{m-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SimplexPoint(Vec<Rational>);

impl SimplexPoint {
    pub fn new(p: Vec<Rational>) -> Result<Self> {
        check_distribution(&p, "probability vector")?;
        Ok(SimplexPoint(p))
    }

    pub fn probabilities(&self) -> &[Rational] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.0.iter().map(to_f64).collect()
    }

    pub fn to_vector(&self) -> RationalVector {
        RationalVector(self.0.clone())
    }
}

/// A point of `A_J`: `J` non-negative weights summing to one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WeightVector(Vec<Rational>);

impl WeightVector {
    pub fn new(a: Vec<Rational>) -> Result<Self> {
        check_distribution(&a, "weight vector")?;
        Ok(WeightVector(a))
    }

    pub fn depth(&self) -> usize {
        self.0.len()
    }

    pub fn entries(&self) -> &[Rational] {
        &self.0
    }
}

/// `F(a, x) = Σ_j a_j δ_{x_j}` as a probability vector on `K = {0, .., m-1}`.
#[allow(non_snake_case)]
pub fn map_F(a: &WeightVector, x: &[usize], k: FiniteK) -> Result<SimplexPoint> {
    if a.depth() != x.len() {
        return Err(BaryError::input(format!(
            "{} weights but {} points",
            a.depth(),
            x.len()
        )));
    }
    let mut out = vec![Rational::zero(); k.size()];
    for (w, &i) in a.entries().iter().zip(x) {
        if i >= k.size() {
            return Err(BaryError::input(format!(
                "point {i} is not in K = {{0..{}}}",
                k.size() - 1
            )));
        }
        out[i] += w;
    }
    Ok(SimplexPoint(out))
}

/// Center of `λ`: `c_j = (2/5)(3/5)^(J-j)` for `j >= 2` and `c_1 = (3/5)^(J-1)`.
///
/// No entry exceeds 2/5, so `F(c, x)` reaches balanced points, while a few
/// draws still carry most of the mass, so it also reaches points near the
/// vertices. Entries increase with `j` because the dense enumeration of
/// `A_J` lists `e_J` first: the heaviest witness pairs then sit on vertices
/// with room to prolong, and `λ` keeps real mass on them.
pub fn lambda_center(depth: usize) -> Result<WeightVector> {
    if depth < 1 {
        return Err(BaryError::input("depth J must be >= 1"));
    }
    let ratio = rat(3, 5);
    let head = rat(2, 5);
    let mut a = vec![num_traits::pow(ratio.clone(), depth - 1)];
    a.extend((2..=depth).map(|j| &head * num_traits::pow(ratio.clone(), depth - j)));
    WeightVector::new(a)
}

/// `sup { α ≥ 0 : c + α(c - x) ∈ Δ }` for points `c`, `x` of a standard simplex.
/// `None` when `x = c`.
pub fn simplex_prolongation_alpha(c: &[Rational], x: &[Rational]) -> Option<Rational> {
    c.iter()
        .zip(x)
        .filter(|(ci, xi)| xi > ci)
        .map(|(ci, xi)| ci / (xi - ci))
        .min()
}

/// `λ` on `A_J`: the two-point witness construction on the simplex `A_J`
/// centered at [`lambda_center`], using the first `atoms` points of the dense
/// dyadic enumeration of `A_J`. Its support fills `A_J` as `atoms` grows.
pub fn lambda_pairs(depth: usize, atoms: usize) -> Result<Vec<WitnessPair>> {
    if atoms < 1 {
        return Err(BaryError::input("lambda needs at least one atom"));
    }
    let center = RationalVector(lambda_center(depth)?.0);
    let simplex = Polytope::standard_simplex(depth)?;
    let renorm = (Rational::one() - pow2_inv(atoms)).recip();
    let half = rat(1, 2);
    Ok(DensePlan::new(&simplex)
        .take(atoms)
        .enumerate()
        .map(|(i, x)| {
            let weight = pow2_inv(i + 1) * &renorm;
            match simplex_prolongation_alpha(center.coords(), x.coords()) {
                None => WitnessPair {
                    partner: x.clone(),
                    x,
                    alpha: None,
                    weight,
                },
                Some(amax) => {
                    let alpha = (&amax * &half).min(Rational::one());
                    let partner = center.add_scaled(&alpha, &(&center - &x));
                    WitnessPair {
                        x,
                        alpha: Some(alpha),
                        partner,
                        weight,
                    }
                }
            }
        })
        .collect())
}

pub fn lambda_on_a(depth: usize, atoms: usize) -> Result<DiscreteMeasure> {
    let (pts, weights) = lambda_pairs(depth, atoms)?
        .iter()
        .flat_map(WitnessPair::atoms)
        .unzip();
    DiscreteMeasure::new(pts, weights)
}

/// `S` draws from `η = (λ ⊗ μ^J) ∘ F^{-1}` as float probability vectors.
///
/// Draws are generated in blocks of [`crate::rng::BLOCK_LEN`], block `b` on
/// stream `b`, so the output is the same for any thread count.
pub fn sample_eta(
    mu: &SimplexPoint,
    depth: usize,
    lambda_atoms: usize,
    seed: u64,
    count: usize,
) -> Result<Vec<Vec<f64>>> {
    if count < 1 {
        return Err(BaryError::input("need at least one sample"));
    }
    let lambda = lambda_on_a(depth, lambda_atoms)?;
    let a_atoms: Vec<Vec<f64>> = lambda.atoms().iter().map(RationalVector::to_f64).collect();
    let a_dist = WeightedIndex::new(lambda.weights().iter().map(to_f64))
        .expect("lambda weights are positive");
    let x_dist = WeightedIndex::new(mu.to_f64()).expect("mu is a probability vector");
    let m = mu.m();
    let chunks: Vec<Vec<Vec<f64>>> = blocks(count)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(stream, _, len)| {
            let mut rng = stream_rng(seed, stream);
            (0..len)
                .map(|_| {
                    let a = &a_atoms[a_dist.sample(&mut rng)];
                    let mut out = vec![0.0; m];
                    for w in a {
                        out[x_dist.sample(&mut rng)] += w;
                    }
                    out
                })
                .collect()
        })
        .collect();
    Ok(chunks.into_iter().flatten().collect())
}

/// Coordinate-wise mean of the samples.
pub fn empirical_barycenter(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    crate::witness::empirical_mean(samples)
}

/// Per-coordinate sample variance (unbiased).
pub fn sample_variance(samples: &[Vec<f64>]) -> Result<Vec<f64>> {
    let mean = empirical_barycenter(samples)?;
    if samples.len() < 2 {
        return Ok(vec![0.0; mean.len()]);
    }
    let mut acc = vec![0.0; mean.len()];
    for s in samples {
        for ((a, x), m) in acc.iter_mut().zip(s).zip(&mean) {
            *a += (x - m) * (x - m);
        }
    }
    Ok(acc
        .into_iter()
        .map(|v| v / (samples.len() - 1) as f64)
        .collect())
}

/// Every entry exceeds `eps`. For finite `K`, "support equals K" means every
/// entry is positive, which is the relative interior of the simplex.
pub fn support_full(mu_hat: &[f64], eps: f64) -> bool {
    mu_hat.iter().all(|&v| v > eps)
}

pub fn support_full_exact(mu: &SimplexPoint) -> bool {
    mu.probabilities().iter().all(Signed::is_positive)
}

/// The barycentric grid `{ p ∈ Δ_{m-1} : resolution · p ∈ Z^m }`.
pub fn simplex_grid(m: usize, resolution: usize) -> Vec<Vec<u64>> {
    fn rec(m: usize, left: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == m {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for v in 0..=left {
            prefix.push(v);
            rec(m, left - v, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if m >= 1 {
        rec(m, resolution as u64, &mut Vec::with_capacity(m), &mut out);
    }
    out
}

/// Covering radius, in l1 distance, of `samples` against the simplex grid at `resolution`.
pub fn coverage_of_simplex(samples: &[Vec<f64>], resolution: usize) -> Result<f64> {
    let first = samples
        .first()
        .ok_or_else(|| BaryError::input("coverage of an empty sample"))?;
    if resolution < 1 {
        return Err(BaryError::input("grid resolution must be >= 1"));
    }
    let m = first.len();
    let r = resolution as f64;
    let grid: Vec<Vec<f64>> = simplex_grid(m, resolution)
        .into_iter()
        .map(|g| g.into_iter().map(|v| v as f64 / r).collect())
        .collect();
    // Distinct samples only; η has atoms and repeats are common.
    let mut uniq: Vec<Vec<f64>> = samples.to_vec();
    uniq.sort_by(|a, b| a.partial_cmp(b).expect("finite samples"));
    uniq.dedup();
    Ok(covering_radius_f64(&grid, &uniq, l1))
}

/// One Monte Carlo run of the pushforward construction.
#[derive(Clone, Debug, Serialize)]
pub struct SimplexReport {
    pub m: usize,
    #[serde(with = "serde_rational_vec")]
    pub mu: Vec<Rational>,
    #[serde(rename = "J")]
    pub depth: usize,
    #[serde(rename = "S")]
    pub samples: usize,
    pub lambda_atoms: usize,
    pub seed: u64,
    pub empirical_barycenter: Vec<f64>,
    pub min_coord: f64,
    pub covering_radius: f64,
    pub grid_resolution: usize,
    /// Largest `|mean_i - μ_i| / (σ_i / √S)` over coordinates with positive spread.
    pub max_z_score: f64,
    pub within_4sigma: bool,
    pub support_full: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub struct SimplexRun {
    pub depth: usize,
    pub lambda_atoms: usize,
    pub seed: u64,
    pub samples: usize,
    pub grid_resolution: usize,
}

pub fn run_simplex_experiment(mu: &SimplexPoint, run: &SimplexRun) -> Result<SimplexReport> {
    let draws = sample_eta(mu, run.depth, run.lambda_atoms, run.seed, run.samples)?;
    let mean = empirical_barycenter(&draws)?;
    let var = sample_variance(&draws)?;
    let target = mu.to_f64();
    let sqrt_n = (run.samples as f64).sqrt();
    let mut max_z: f64 = 0.0;
    let mut within = true;
    for ((m, v), t) in mean.iter().zip(&var).zip(&target) {
        let dev = (m - t).abs();
        if *v > 0.0 {
            let z = dev / (v.sqrt() / sqrt_n);
            max_z = max_z.max(z);
            within &= z <= 4.0;
        } else {
            within &= dev <= 1e-12;
        }
    }
    let full = support_full_exact(mu);
    Ok(SimplexReport {
        m: mu.m(),
        mu: mu.probabilities().to_vec(),
        depth: run.depth,
        samples: run.samples,
        lambda_atoms: run.lambda_atoms,
        seed: run.seed,
        min_coord: mean.iter().copied().fold(f64::INFINITY, f64::min),
        covering_radius: coverage_of_simplex(&draws, run.grid_resolution)?,
        grid_resolution: run.grid_resolution,
        empirical_barycenter: mean,
        max_z_score: max_z,
        within_4sigma: within,
        support_full: full,
        note: (!full).then(|| "not a full-support barycenter target".to_string()),
    })
}

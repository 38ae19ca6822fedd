//! Finite truncations of the Hilbert cube `Π_k [-1/k, 1/k]`.
//!
//! The point `a_k = 1/(k+1)` is the barycenter of the product of coordinate
//! measures `μ_k`, each with support `[-1/k, 1/k]` and mean `1/(k+1)`. In every
//! finite truncation `a` is interior, but the largest `α` with `(1+α) a` in
//! the box is `1/d`, which vanishes as `d → ∞`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::characterize::Alpha;
use crate::error::{BaryError, Result};
use crate::geometry::Polytope;
use crate::rational::{rat, serde_rational, serde_rational_vec, to_f64, Rational, RationalVector};
use crate::rng::stream_rng;

/// Largest `d` for which [`TruncatedCube::to_polytope`] will list all `2^d` vertices.
pub const MAX_VERTEX_FORM_DIM: usize = 16;

/// Box `Π_{k=1..d} [-1/k, 1/k]`, kept in bound form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedCube {
    lower: Vec<Rational>,
    upper: Vec<Rational>,
}

pub fn cube(d: usize) -> Result<TruncatedCube> {
    if d < 1 {
        return Err(BaryError::input("cube dimension must be >= 1"));
    }
    let upper: Vec<Rational> = (1..=d as i64).map(|k| rat(1, k)).collect();
    Ok(TruncatedCube {
        lower: upper.iter().map(|u| -u).collect(),
        upper,
    })
}

/// `(1/2, 1/3, ..., 1/(d+1))`.
pub fn target_point(d: usize) -> Result<RationalVector> {
    if d < 1 {
        return Err(BaryError::input("cube dimension must be >= 1"));
    }
    Ok((1..=d as i64).map(|k| rat(1, k + 1)).collect())
}

impl TruncatedCube {
    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn bounds(&self, k: usize) -> (&Rational, &Rational) {
        (&self.lower[k], &self.upper[k])
    }

    pub fn contains(&self, x: &RationalVector) -> bool {
        x.dim() == self.dim()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((v, lo), hi)| lo <= v && v <= hi)
    }

    /// Strict inequality in every coordinate: the interior of a full-dimensional box.
    pub fn in_interior(&self, x: &RationalVector) -> bool {
        x.dim() == self.dim()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((v, lo), hi)| lo < v && v < hi)
    }

    pub fn contains_f64(&self, x: &[f64]) -> bool {
        x.len() == self.dim()
            && x.iter()
                .zip(&self.lower)
                .zip(&self.upper)
                .all(|((v, lo), hi)| to_f64(lo) <= *v && *v <= to_f64(hi))
    }

    /// `sup { α ≥ 0 : a + α(a - x) ∈ box }` by per-coordinate interval arithmetic.
    pub fn prolongation_alpha(&self, a: &RationalVector, x: &RationalVector) -> Result<Alpha> {
        if !self.contains(a) || !self.contains(x) {
            return Err(BaryError::precondition(
                "prolongation needs a and x inside the cube",
            ));
        }
        let mut best: Option<Rational> = None;
        for k in 0..self.dim() {
            let dir = &a[k] - &x[k];
            let limit = if dir.is_positive() {
                (&self.upper[k] - &a[k]) / &dir
            } else if dir.is_negative() {
                (&self.lower[k] - &a[k]) / &dir
            } else {
                continue;
            };
            best = Some(match best {
                Some(b) if b <= limit => b,
                _ => limit,
            });
        }
        Ok(best.map_or(Alpha::Infinite, Alpha::Finite))
    }

    /// The box as a vertex-list polytope (`2^d` vertices).
    pub fn to_polytope(&self) -> Result<Polytope> {
        let d = self.dim();
        if d > MAX_VERTEX_FORM_DIM {
            return Err(BaryError::input(format!(
                "vertex form of a {d}-cube is too large"
            )));
        }
        let vertices = (0..1usize << d)
            .map(|mask| {
                (0..d)
                    .map(|k| {
                        if mask >> k & 1 == 1 {
                            self.upper[k].clone()
                        } else {
                            self.lower[k].clone()
                        }
                    })
                    .collect()
            })
            .collect();
        Polytope::new(vertices)
    }
}

/// `sup { α : (1+α) a ∈ cube(d) }`, computed from the box bounds.
pub fn cube_alpha_max(d: usize) -> Result<Rational> {
    let c = cube(d)?;
    let a = target_point(d)?;
    match c.prolongation_alpha(&a, &RationalVector::zeros(d))? {
        Alpha::Finite(v) => Ok(v),
        Alpha::Infinite => unreachable!("a is non-zero"),
    }
}

/// Closed form of [`cube_alpha_max`]: the `k`-th bound gives `α ≤ 1/k`, tightest at `k = d`.
pub fn cube_alpha_max_closed_form(d: usize) -> Result<Rational> {
    if d < 1 {
        return Err(BaryError::input("cube dimension must be >= 1"));
    }
    Ok(Rational::new(BigInt::one(), BigInt::from(d)))
}

/// `μ_k`: an atom at `1/k` with probability `k/(k+1)`, otherwise uniform on `[-1/k, 1/k]`.
///
/// The atom alone contributes mean `1/(k+1)` and the uniform part has mean
/// zero, so the mixture has mean `1/(k+1)` and support the whole interval.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CoordinateMeasure {
    pub k: usize,
}

impl CoordinateMeasure {
    pub fn new(k: usize) -> Result<Self> {
        if k < 1 {
            return Err(BaryError::input("coordinate index starts at 1"));
        }
        Ok(CoordinateMeasure { k })
    }

    fn k(&self) -> i64 {
        self.k as i64
    }

    pub fn atom_probability(&self) -> Rational {
        rat(self.k(), self.k() + 1)
    }

    pub fn mean(&self) -> Rational {
        let k = self.k();
        // atom part + uniform part (mean 0)
        self.atom_probability() * rat(1, k) + rat(1, k + 1) * Rational::zero()
    }

    pub fn second_moment(&self) -> Rational {
        let k = self.k();
        self.atom_probability() * rat(1, k * k) + rat(1, k + 1) * rat(1, 3 * k * k)
    }

    pub fn variance(&self) -> Rational {
        let m = self.mean();
        self.second_moment() - &m * &m
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let half_width = 1.0 / self.k as f64;
        let p_atom = self.k as f64 / (self.k as f64 + 1.0);
        if rng.gen::<f64>() < p_atom {
            half_width
        } else {
            rng.gen_range(-half_width..=half_width)
        }
    }
}

/// Draws for coordinate `k` (1-based) from stream `k - 1` of `seed`.
fn sample_coordinate(k: usize, seed: u64, count: usize) -> Vec<f64> {
    let mu = CoordinateMeasure { k };
    let mut rng = stream_rng(seed, (k - 1) as u64);
    (0..count).map(|_| mu.sample(&mut rng)).collect()
}

/// `count` i.i.d. draws from `⊗_{k ≤ d} μ_k`.
pub fn sample_cube_measure(d: usize, seed: u64, count: usize) -> Result<Vec<Vec<f64>>> {
    if d < 1 || count < 1 {
        return Err(BaryError::input("need d >= 1 and at least one sample"));
    }
    let columns: Vec<Vec<f64>> = (1..=d)
        .into_par_iter()
        .map(|k| sample_coordinate(k, seed, count))
        .collect();
    Ok((0..count)
        .map(|i| columns.iter().map(|c| c[i]).collect())
        .collect())
}

/// Per-coordinate sample means, identical to averaging [`sample_cube_measure`].
pub fn cube_sample_means(d: usize, seed: u64, count: usize) -> Result<Vec<f64>> {
    if d < 1 || count < 1 {
        return Err(BaryError::input("need d >= 1 and at least one sample"));
    }
    Ok((1..=d)
        .into_par_iter()
        .map(|k| sample_coordinate(k, seed, count).iter().sum::<f64>() / count as f64)
        .collect())
}

/// Result of one truncated-cube experiment.
#[derive(Clone, Debug, Serialize)]
pub struct CubeReport {
    pub d: usize,
    #[serde(with = "serde_rational")]
    pub alpha_max: Rational,
    pub empirical_mean: Vec<f64>,
    #[serde(with = "serde_rational_vec")]
    pub target: Vec<Rational>,
    pub max_abs_deviation: f64,
    pub samples: usize,
    pub seed: u64,
    /// Coordinates whose sample mean is more than 4 standard errors from the target.
    pub four_sigma_exceedances: usize,
    pub target_in_interior: bool,
    pub alpha_matches_closed_form: bool,
}

impl CubeReport {
    pub fn passed(&self) -> bool {
        self.four_sigma_exceedances == 0
            && self.target_in_interior
            && self.alpha_matches_closed_form
    }
}

/// Number of coordinates whose mean deviates from `1/(k+1)` by more than `4σ_k/√S`.
pub fn four_sigma_exceedances(means: &[f64], count: usize) -> usize {
    means
        .iter()
        .enumerate()
        .filter(|(i, m)| {
            let mu = CoordinateMeasure { k: i + 1 };
            let se = (to_f64(&mu.variance()) / count as f64).sqrt();
            (**m - to_f64(&mu.mean())).abs() > 4.0 * se
        })
        .count()
}

pub fn run_cube_experiment(d: usize, seed: u64, count: usize) -> Result<CubeReport> {
    let alpha_max = cube_alpha_max(d)?;
    let target = target_point(d)?;
    let empirical_mean = cube_sample_means(d, seed, count)?;
    let max_abs_deviation = empirical_mean
        .iter()
        .zip(target.iter())
        .map(|(m, t)| (m - to_f64(t)).abs())
        .fold(0.0, f64::max);
    Ok(CubeReport {
        d,
        alpha_matches_closed_form: alpha_max == cube_alpha_max_closed_form(d)?,
        alpha_max,
        four_sigma_exceedances: four_sigma_exceedances(&empirical_mean, count),
        target_in_interior: cube(d)?.in_interior(&target),
        empirical_mean,
        target: target.0,
        max_abs_deviation,
        samples: count,
        seed,
    })
}

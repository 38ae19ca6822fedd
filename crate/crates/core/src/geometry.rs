//! Polytopes in V-representation, affine hulls, exact membership, and the
//! deterministic dense point sequence used to build witness measures.

use std::collections::HashSet;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BaryError, Result};
use crate::lp::{solve_lp, LinearProgram, LpStatus, Relation};
use crate::rational::{Rational, RationalVector};

/// Affine subspace `offset + span(basis)`.
///
/// The basis is kept in reduced row echelon form, so the coordinates of a
/// point of the subspace can be read off at the pivot columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AffineSubspace {
    pub offset: RationalVector,
    pub basis: Vec<RationalVector>,
    pivots: Vec<usize>,
}

impl AffineSubspace {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.offset.dim()
    }

    /// Coordinates of `p` relative to the basis, or `None` if `p` is off the subspace.
    pub fn coordinates(&self, p: &RationalVector) -> Option<Vec<Rational>> {
        if p.dim() != self.ambient_dim() {
            return None;
        }
        let diff = p - &self.offset;
        let t: Vec<Rational> = self.pivots.iter().map(|&c| diff[c].clone()).collect();
        (self.point_at(&t) == *p).then_some(t)
    }

    pub fn point_at(&self, t: &[Rational]) -> RationalVector {
        self.basis
            .iter()
            .zip(t)
            .fold(self.offset.clone(), |acc, (b, ti)| acc.add_scaled(ti, b))
    }

    pub fn contains(&self, p: &RationalVector) -> bool {
        self.coordinates(p).is_some()
    }
}

/// Reduced row echelon form; returns the non-zero rows and their pivot columns.
pub(crate) fn rref(mut rows: Vec<Vec<Rational>>) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let lead = rows[r][c].clone();
        for v in rows[r].iter_mut() {
            *v /= &lead;
        }
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&pivot_row) {
                *v -= &f * pv;
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows.len() {
            break;
        }
    }
    rows.truncate(r);
    (rows, pivots)
}

/// Smallest affine subspace containing `points`.
pub fn affine_hull(points: &[RationalVector]) -> Result<AffineSubspace> {
    let first = points
        .first()
        .ok_or_else(|| BaryError::input("affine hull of an empty point set"))?;
    for p in points {
        p.check_dim(first.dim(), "point")?;
    }
    let diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| (p - first).0).collect();
    let (rows, pivots) = rref(diffs);
    Ok(AffineSubspace {
        offset: first.clone(),
        basis: rows.into_iter().map(RationalVector).collect(),
        pivots,
    })
}

/// The compact convex set `conv(vertices)`.
///
/// The vertex list is a generating set: listed points need not be extreme.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Polytope {
    vertices: Vec<RationalVector>,
    ambient_dim: usize,
    hull: AffineSubspace,
}

impl Polytope {
    pub fn new(vertices: Vec<RationalVector>) -> Result<Self> {
        let hull = affine_hull(&vertices)?;
        Ok(Polytope {
            ambient_dim: hull.ambient_dim(),
            vertices,
            hull,
        })
    }

    pub fn from_int_vertices(vertices: &[&[i64]]) -> Result<Self> {
        Self::new(
            vertices
                .iter()
                .map(|v| RationalVector::from_ints(v))
                .collect(),
        )
    }

    /// The probability simplex on `m` points: `conv(e_1, ..., e_m)` in `Q^m`.
    pub fn standard_simplex(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(BaryError::input("simplex needs at least one vertex"));
        }
        Self::new(
            (0..m)
                .map(|i| {
                    (0..m)
                        .map(|j| {
                            if i == j {
                                Rational::one()
                            } else {
                                Rational::zero()
                            }
                        })
                        .collect()
                })
                .collect(),
        )
    }

    pub fn vertices(&self) -> &[RationalVector] {
        &self.vertices
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn affine_hull(&self) -> &AffineSubspace {
        &self.hull
    }

    /// Dimension of the affine hull.
    pub fn dim(&self) -> usize {
        self.hull.dim()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(PolytopeJson {
            dim: self.ambient_dim,
            vertices: self.vertices.clone(),
        })
        .expect("polytope serializes")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let raw: PolytopeJson = serde_json::from_str(s)
            .map_err(|e| BaryError::input(format!("malformed polytope JSON: {e}")))?;
        raw.try_into()
    }
}

/// Wire form: `{ "dim": d, "vertices": [[[num, den], ...], ...] }`.
#[derive(Serialize, Deserialize)]
struct PolytopeJson {
    dim: usize,
    vertices: Vec<RationalVector>,
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = BaryError;

    fn try_from(raw: PolytopeJson) -> Result<Self> {
        for v in &raw.vertices {
            v.check_dim(raw.dim, "vertex")?;
        }
        Polytope::new(raw.vertices)
    }
}

impl Serialize for Polytope {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeJson {
            dim: self.ambient_dim,
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        PolytopeJson::deserialize(d)?
            .try_into()
            .map_err(serde::de::Error::custom)
    }
}

/// `x ∈ conv(vertices)`, decided by LP feasibility of
/// `λ ≥ 0, Σλ_i = 1, Σλ_i v_i = x`.
pub fn contains(m: &Polytope, x: &RationalVector) -> Result<bool> {
    x.check_dim(m.ambient_dim(), "point")?;
    if !m.affine_hull().contains(x) {
        return Ok(false);
    }
    let n = m.vertices().len();
    let mut lp = LinearProgram::feasibility(n);
    lp.constrain(vec![Rational::one(); n], Relation::Eq, Rational::one());
    for k in 0..m.ambient_dim() {
        lp.constrain(
            m.vertices().iter().map(|v| v[k].clone()).collect(),
            Relation::Eq,
            x[k].clone(),
        );
    }
    Ok(solve_lp(&lp)?.status() == LpStatus::Optimal)
}

/// Deterministic enumeration of points of a polytope that is dense in it.
///
/// Level `L` lists the convex combinations of the (distinct) vertices whose
/// weights are multiples of `2^-L`, weight vectors in ascending lexicographic
/// order. Points already produced at an earlier position are skipped. A
/// single-point polytope yields that point forever.
#[derive(Clone, Debug)]
pub struct DensePlan {
    vertices: Vec<RationalVector>,
    level: u32,
    weights: Option<Vec<u64>>,
    seen: HashSet<RationalVector>,
}

impl DensePlan {
    pub fn new(m: &Polytope) -> Self {
        let mut distinct: Vec<RationalVector> = Vec::new();
        for v in m.vertices() {
            if !distinct.contains(v) {
                distinct.push(v.clone());
            }
        }
        DensePlan {
            vertices: distinct,
            level: 0,
            weights: None,
            seen: HashSet::new(),
        }
    }

    fn total(&self) -> u64 {
        1u64 << self.level
    }

    /// Next weight vector in lex order with the current total, or `None` once exhausted.
    fn advance(&mut self) -> Option<Vec<u64>> {
        let k = self.vertices.len();
        let total = self.total();
        let next = match self.weights.take() {
            None => {
                let mut w = vec![0; k];
                w[k - 1] = total;
                w
            }
            Some(mut w) => {
                let last_nz = (1..k).rev().find(|&j| w[j] > 0)?;
                let i = last_nz - 1;
                let tail: u64 = w[i + 1..].iter().sum();
                w[i] += 1;
                for v in w[i + 1..].iter_mut() {
                    *v = 0;
                }
                w[k - 1] = tail - 1;
                w
            }
        };
        self.weights = Some(next.clone());
        Some(next)
    }

    fn point(&self, w: &[u64]) -> RationalVector {
        let den = BigInt::from(self.total());
        let dim = self.vertices[0].dim();
        let mut acc = vec![Rational::zero(); dim];
        for (v, &wi) in self.vertices.iter().zip(w) {
            if wi == 0 {
                continue;
            }
            let c = Rational::new(BigInt::from(wi), den.clone());
            for (a, x) in acc.iter_mut().zip(v.iter()) {
                *a += &c * x;
            }
        }
        RationalVector(acc)
    }
}

impl Iterator for DensePlan {
    type Item = RationalVector;

    fn next(&mut self) -> Option<RationalVector> {
        if self.vertices.len() == 1 {
            return Some(self.vertices[0].clone());
        }
        loop {
            match self.advance() {
                Some(w) => {
                    let p = self.point(&w);
                    if self.seen.insert(p.clone()) {
                        return Some(p);
                    }
                }
                None => {
                    self.level += 1;
                    self.weights = None;
                }
            }
        }
    }
}

/// First `n` points of the [`DensePlan`] of `m`.
pub fn dense_sequence(m: &Polytope, n: usize) -> Result<Vec<RationalVector>> {
    if n == 0 {
        return Err(BaryError::input("dense_sequence needs n >= 1"));
    }
    Ok(DensePlan::new(m).take(n).collect())
}

/// Reference grid of a polytope for covering-radius diagnostics.
///
/// Grid points are laid out in affine-hull coordinates over the bounding box
/// of the vertices, `resolution` steps per axis, and kept when they lie in the
/// polytope (exact test).
#[derive(Clone, Debug)]
pub struct CoveringGrid {
    points: Vec<RationalVector>,
    floats: Vec<Vec<f64>>,
}

impl CoveringGrid {
    pub fn new(m: &Polytope, resolution: usize) -> Result<Self> {
        if resolution == 0 {
            return Err(BaryError::input("grid resolution must be >= 1"));
        }
        let hull = m.affine_hull();
        let k = hull.dim();
        let coords: Vec<Vec<Rational>> = m
            .vertices()
            .iter()
            .map(|v| {
                hull.coordinates(v)
                    .expect("vertices lie on their affine hull")
            })
            .collect();
        let lo: Vec<Rational> = (0..k)
            .map(|i| coords.iter().map(|c| c[i].clone()).min().unwrap())
            .collect();
        let hi: Vec<Rational> = (0..k)
            .map(|i| coords.iter().map(|c| c[i].clone()).max().unwrap())
            .collect();
        let steps = resolution + 1;
        let count = steps.pow(k as u32);
        let res = Rational::from_integer(BigInt::from(resolution));
        let candidates: Vec<RationalVector> = (0..count)
            .map(|mut idx| {
                let t: Vec<Rational> = (0..k)
                    .map(|i| {
                        let s = idx % steps;
                        idx /= steps;
                        &lo[i] + (&hi[i] - &lo[i]) * Rational::from_integer(BigInt::from(s)) / &res
                    })
                    .collect();
                hull.point_at(&t)
            })
            .collect();
        let inside: Vec<bool> = candidates
            .par_iter()
            .map(|p| contains(m, p))
            .collect::<Result<Vec<bool>>>()?;
        let points: Vec<RationalVector> = candidates
            .into_iter()
            .zip(inside)
            .filter_map(|(p, ok)| ok.then_some(p))
            .collect();
        Ok(Self::from_points(points))
    }

    pub fn from_points(points: Vec<RationalVector>) -> Self {
        let floats = points.iter().map(RationalVector::to_f64).collect();
        CoveringGrid { points, floats }
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Max over grid points of the Euclidean distance to the nearest of `points`.
    pub fn covering_radius(&self, points: &[RationalVector]) -> Result<f64> {
        if points.is_empty() {
            return Err(BaryError::input("covering radius of an empty point set"));
        }
        let pts: Vec<Vec<f64>> = points.iter().map(RationalVector::to_f64).collect();
        Ok(covering_radius_f64(&self.floats, &pts, euclidean))
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn l1(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Max over `grid` of the distance to the nearest element of `points`.
pub fn covering_radius_f64(
    grid: &[Vec<f64>],
    points: &[Vec<f64>],
    dist: fn(&[f64], &[f64]) -> f64,
) -> f64 {
    grid.par_iter()
        .map(|g| {
            points
                .iter()
                .map(|p| dist(g, p))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max)
}

/// Covering radius of `points` against the grid of `m` at `grid_resolution`.
pub fn covering_radius(
    points: &[RationalVector],
    m: &Polytope,
    grid_resolution: usize,
) -> Result<f64> {
    if points.is_empty() {
        return Err(BaryError::input("covering radius of an empty point set"));
    }
    for p in points {
        p.check_dim(m.ambient_dim(), "point")?;
    }
    CoveringGrid::new(m, grid_resolution)?.covering_radius(points)
}

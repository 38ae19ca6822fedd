//! Random instance generators and brute-force oracles shared by the
//! integration tests. Nothing here calls the LP kernel.

#![allow(dead_code)]

use barylab::rational::{int, rat};
use barylab::simplex_t2::{map_F, FiniteK, SimplexPoint, WeightVector};
use barylab::{DiscreteMeasure, Polytope, Rational, RationalVector};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Polytope with `n` generators, integer coordinates in `[-5, 5]`.
pub fn random_polytope<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Polytope {
    let vertices = (0..n)
        .map(|_| (0..dim).map(|_| int(rng.gen_range(-5..=5))).collect())
        .collect();
    Polytope::new(vertices).unwrap()
}

/// Convex combination of the generators with random weights in `0..=max_w`
/// (at least one positive).
pub fn random_combination<R: Rng>(
    rng: &mut R,
    m: &Polytope,
    min_w: i64,
    max_w: i64,
) -> RationalVector {
    loop {
        let w: Vec<i64> = m
            .vertices()
            .iter()
            .map(|_| rng.gen_range(min_w..=max_w))
            .collect();
        let total: i64 = w.iter().sum();
        if total == 0 {
            continue;
        }
        return combine(
            m.vertices(),
            &w.iter().map(|&x| rat(x, total)).collect::<Vec<_>>(),
        );
    }
}

pub fn combine(points: &[RationalVector], weights: &[Rational]) -> RationalVector {
    points
        .iter()
        .zip(weights)
        .fold(RationalVector::zeros(points[0].dim()), |acc, (p, w)| {
            acc.add_scaled(w, p)
        })
}

/// Mix of interior and boundary points: random positive combinations, sparse
/// combinations, every vertex, and every pairwise midpoint.
pub fn test_points<R: Rng>(rng: &mut R, m: &Polytope, random: usize) -> Vec<RationalVector> {
    let mut pts: Vec<RationalVector> = Vec::new();
    for i in 0..random {
        pts.push(if i % 2 == 0 {
            random_combination(rng, m, 1, 9)
        } else {
            random_combination(rng, m, 0, 3)
        });
    }
    pts.extend(m.vertices().iter().cloned());
    let v = m.vertices();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            pts.push((&v[i] + &v[j]).scale(&rat(1, 2)));
        }
    }
    pts
}

/// Solves the square system `A x = b` by Gauss-Jordan elimination; `None` if singular.
pub fn solve_square(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Option<Vec<Rational>> {
    let n = b.len();
    for c in 0..n {
        let p = (c..n).find(|&r| !a[r][c].is_zero())?;
        a.swap(c, p);
        b.swap(c, p);
        let lead = a[c][c].clone();
        for v in a[c].iter_mut() {
            *v /= &lead;
        }
        b[c] /= &lead;
        for r in 0..n {
            if r != c && !a[r][c].is_zero() {
                let f = a[r][c].clone();
                let row = a[c].clone();
                for (v, pv) in a[r].iter_mut().zip(&row) {
                    *v -= &f * pv;
                }
                let bc = b[c].clone();
                b[r] -= &f * &bc;
            }
        }
    }
    Some(b)
}

/// Rank of a matrix by elimination.
pub fn rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        for i in r + 1..rows.len() {
            if !rows[i][c].is_zero() {
                let f = &rows[i][c] / &rows[r][c];
                let pivot = rows[r].clone();
                for (v, pv) in rows[i].iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        r += 1;
    }
    r
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// Carathéodory oracle: `x ∈ conv(V)` iff `x` is a convex combination of some
/// affinely independent subset of `V`. Exhaustive over subsets.
pub fn brute_force_contains(vertices: &[RationalVector], x: &RationalVector) -> bool {
    let d = x.dim();
    for k in 1..=(d + 1).min(vertices.len()) {
        for s in subsets(vertices.len(), k) {
            // Unknowns μ_1..μ_{k-1} with x - v_0 = Σ μ_i (v_i - v_0); need full column rank.
            let v0 = &vertices[s[0]];
            let cols: Vec<RationalVector> = s[1..].iter().map(|&i| &vertices[i] - v0).collect();
            let rows: Vec<Vec<Rational>> = (0..d)
                .map(|r| cols.iter().map(|c| c[r].clone()).collect())
                .collect();
            if k > 1 && rank(rows.clone()) < k - 1 {
                continue;
            }
            let rhs = x - v0;
            // Least-squares-free exact solve: normal equations are square and invertible.
            let coeffs = if k == 1 {
                Some(vec![])
            } else {
                let gram: Vec<Vec<Rational>> = cols
                    .iter()
                    .map(|ci| cols.iter().map(|cj| ci.dot(cj)).collect())
                    .collect();
                let proj: Vec<Rational> = cols.iter().map(|ci| ci.dot(&rhs)).collect();
                solve_square(gram, proj)
            };
            let Some(mu) = coeffs else { continue };
            let recon = cols
                .iter()
                .zip(&mu)
                .fold(v0.clone(), |acc, (c, m)| acc.add_scaled(m, c));
            if &recon != x {
                continue;
            }
            let first = Rational::one() - mu.iter().sum::<Rational>();
            if !first.is_negative() && mu.iter().all(|m| !m.is_negative()) {
                return true;
            }
        }
    }
    false
}

/// `max c·x s.t. A x <= b, 0 <= x`, by enumerating every basic solution:
/// each choice of `n` tight constraints among the rows and the bounds.
/// `None` when no vertex is feasible (the region is assumed bounded).
pub fn brute_force_lp(c: &[Rational], a: &[Vec<Rational>], b: &[Rational]) -> Option<Rational> {
    let n = c.len();
    let mut rows: Vec<(Vec<Rational>, Rational)> =
        a.iter().cloned().zip(b.iter().cloned()).collect();
    for i in 0..n {
        let mut e = vec![Rational::zero(); n];
        e[i] = -Rational::one();
        rows.push((e, Rational::zero()));
    }
    let mut best: Option<Rational> = None;
    for s in subsets(rows.len(), n) {
        let m: Vec<Vec<Rational>> = s.iter().map(|&i| rows[i].0.clone()).collect();
        let rhs: Vec<Rational> = s.iter().map(|&i| rows[i].1.clone()).collect();
        let Some(x) = solve_square(m, rhs) else {
            continue;
        };
        let feasible = rows.iter().all(|(r, bi)| {
            let lhs: Rational = r.iter().zip(&x).map(|(u, v)| u * v).sum();
            &lhs <= bi
        });
        if feasible {
            let val: Rational = c.iter().zip(&x).map(|(u, v)| u * v).sum();
            if best.as_ref().is_none_or(|b| &val > b) {
                best = Some(val);
            }
        }
    }
    best
}

/// Exact `E[F(a, x)]` for `a ~ λ` and `x_j` i.i.d. from `μ`, by enumerating
/// every `(a, x)` outcome with its probability.
pub fn eta_expectation_exact(lambda: &DiscreteMeasure, mu: &SimplexPoint) -> Vec<Rational> {
    let m = mu.m();
    let k = FiniteK::new(m).unwrap();
    let mut acc = vec![Rational::zero(); m];
    for (atom, wa) in lambda.atoms().iter().zip(lambda.weights()) {
        let a = WeightVector::new(atom.0.clone()).unwrap();
        let depth = a.depth();
        let total = m.pow(depth as u32);
        for code in 0..total {
            let mut x = Vec::with_capacity(depth);
            let mut c = code;
            let mut p = wa.clone();
            for _ in 0..depth {
                let i = c % m;
                c /= m;
                p *= &mu.probabilities()[i];
                x.push(i);
            }
            if p.is_zero() {
                continue;
            }
            let f = map_F(&a, &x, k).unwrap();
            for (s, v) in acc.iter_mut().zip(f.probabilities()) {
                *s += &p * v;
            }
        }
    }
    acc
}

/// All points of `Δ_{m-1}` with denominators dividing `q`.
pub fn simplex_points(m: usize, q: i64) -> Vec<Vec<Rational>> {
    barylab::simplex_t2::simplex_grid(m, q as usize)
        .into_iter()
        .map(|g| g.into_iter().map(|v| rat(v as i64, q)).collect())
        .collect()
}

/// Random invertible affine map `x -> L x + t` with small integer entries.
pub fn random_affine<R: Rng>(rng: &mut R, dim: usize) -> (Vec<Vec<Rational>>, RationalVector) {
    loop {
        let l: Vec<Vec<Rational>> = (0..dim)
            .map(|_| (0..dim).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        if rank(l.clone()) == dim {
            let t = (0..dim)
                .map(|_| rat(rng.gen_range(-9..=9), rng.gen_range(1..=4)))
                .collect();
            return (l, t);
        }
    }
}

pub fn apply_affine(l: &[Vec<Rational>], t: &RationalVector, x: &RationalVector) -> RationalVector {
    l.iter()
        .zip(t.iter())
        .map(|(row, ti)| {
            row.iter()
                .zip(x.iter())
                .map(|(a, b)| a * b)
                .sum::<Rational>()
                + ti
        })
        .collect()
}

pub fn shuffle<R: Rng, T>(rng: &mut R, v: &mut [T]) {
    v.shuffle(rng);
}

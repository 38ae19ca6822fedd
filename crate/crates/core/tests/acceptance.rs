//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use barylab::geometry::covering_radius;
use barylab::hilbert_cube::{cube_alpha_max, cube_sample_means, four_sigma_exceedances};
use barylab::lp::{solve_lp, LinearProgram, Relation};
use barylab::rational::{int, rat, Rational};
use barylab::simplex_t2::{
    coverage_of_simplex, empirical_barycenter, lambda_on_a, sample_eta, sample_variance,
    support_full, SimplexPoint,
};
use barylab::{
    barycenter, check_condition_ii, conditional_barycenter, construct_witness, contains, in_relint,
    in_v_a, DiscreteMeasure, Polytope, RationalVector,
};
use num_traits::Zero;
use rand::Rng;

const CASES_CRITERION_1: usize = 500;
const WITNESS_PAIRS: usize = 50;
const WITNESS_SIZES: [usize; 3] = [16, 64, 256];
const DENSE_SMALL: usize = 64;
const DENSE_LARGE: usize = 1024;
const DENSE_RATIO: f64 = 0.5;
const BALL_MEASURES: usize = 100;
const BALLS_PER_MEASURE: usize = 20;
const CUBE_MAX_DIM: usize = 200;
const CUBE_DIM: usize = 50;
const CUBE_SAMPLES: usize = 100_000;
const CUBE_SEEDS: u64 = 20;
const CUBE_EXCEEDANCE_FRACTION: f64 = 0.01;
const SIGMAS: f64 = 4.0;
const T2_DEPTH: usize = 32;
const T2_SAMPLES: usize = 100_000;
const T2_GRID: usize = 20;
const T2_COVERAGE: f64 = 0.1;
const T2_LAMBDA_ATOMS: usize = 64;
const CONSISTENCY_MAX_M: usize = 6;
const CONSISTENCY_MAX_DEN: i64 = 6;
const LP_CASES: usize = 200;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Outcome {
    Outcome { passed, detail }
}

fn random_instance<R: Rng>(rng: &mut R) -> Polytope {
    let dim = rng.gen_range(1..=5);
    let n = rng.gen_range(1..=12);
    common::random_polytope(rng, dim, n)
}

fn relint_instance<R: Rng>(rng: &mut R) -> (Polytope, RationalVector) {
    let m = random_instance(rng);
    let a = common::random_combination(rng, &m, 1, 9);
    (m, a)
}

fn condition_ii_matches_relint() -> Outcome {
    let mut rng = common::rng(1);
    let mut cases = 0;
    let mut mismatches = Vec::new();
    while cases < CASES_CRITERION_1 {
        let m = random_instance(&mut rng);
        for a in common::test_points(&mut rng, &m, 6) {
            let ii = check_condition_ii(&m, &a).unwrap();
            let ri = in_relint(&m, &a).unwrap();
            if ii != ri {
                mismatches.push(format!("{a} in {:?}", m.vertices()));
            }
            cases += 1;
        }
    }
    outcome(
        mismatches.is_empty(),
        format!(
            "{cases} cases, {} mismatches {:?}",
            mismatches.len(),
            mismatches.first()
        ),
    )
}

fn witness_exactness() -> Outcome {
    let mut rng = common::rng(2);
    let mut failures = 0;
    let mut checks = 0;
    for _ in 0..WITNESS_PAIRS {
        let (m, a) = relint_instance(&mut rng);
        for n in WITNESS_SIZES {
            let mu = construct_witness(&m, &a, n).unwrap();
            let exact = barycenter(&mu) == a;
            let inside = mu.atoms().iter().all(|x| contains(&m, x).unwrap());
            failures += usize::from(!(exact && inside));
            checks += 1;
        }
    }
    outcome(
        failures == 0,
        format!("{checks} witnesses, {failures} failures"),
    )
}

fn densification() -> Outcome {
    let mut rng = common::rng(3);
    let random3 = loop {
        let m = common::random_polytope(&mut rng, 3, 8);
        if m.dim() == 3 {
            break m;
        }
    };
    let cases = [
        (
            "unit square",
            Polytope::from_int_vertices(&[&[0, 0], &[1, 0], &[0, 1], &[1, 1]]).unwrap(),
            20,
            RationalVector::from_pairs(&[(1, 3), (2, 5)]),
        ),
        (
            "triangle",
            Polytope::from_int_vertices(&[&[0, 0], &[1, 0], &[0, 1]]).unwrap(),
            20,
            RationalVector::from_pairs(&[(1, 4), (1, 3)]),
        ),
        (
            "random 3-d",
            random3.clone(),
            10,
            common::random_combination(&mut rng, &random3, 1, 5),
        ),
    ];
    let mut passed = true;
    let mut detail = Vec::new();
    for (name, m, res, a) in cases {
        let small = construct_witness(&m, &a, DENSE_SMALL).unwrap();
        let large = construct_witness(&m, &a, DENSE_LARGE).unwrap();
        let r_small = covering_radius(small.atoms(), &m, res).unwrap();
        let r_large = covering_radius(large.atoms(), &m, res).unwrap();
        let ok = r_large <= DENSE_RATIO * r_small;
        passed &= ok;
        detail.push(format!("{name}: {r_large:.4} vs {r_small:.4}"));
    }
    outcome(passed, detail.join("; "))
}

fn conditional_barycenters() -> Outcome {
    let mut rng = common::rng(4);
    let mut failures = 0;
    let mut balls = 0;
    for _ in 0..BALL_MEASURES {
        let (m, a) = relint_instance(&mut rng);
        let pairs = rng.gen_range(1..=12);
        let mu = construct_witness(&m, &a, pairs).unwrap();
        debug_assert_eq!(barycenter(&mu), a);
        for _ in 0..BALLS_PER_MEASURE {
            let anchor = &mu.atoms()[rng.gen_range(0..mu.len())];
            let jitter: RationalVector = (0..anchor.dim())
                .map(|_| rat(rng.gen_range(-4..=4), 8))
                .collect();
            let center = anchor + &jitter;
            // Radius strictly exceeds the distance to the anchor atom, so the ball has mass.
            let dist_sq = jitter.norm_sq();
            let radius = rat(rng.gen_range(1..=40), 8) + isqrt_upper(&dist_sq);
            let c = conditional_barycenter(&mu, &center, &radius).expect("ball contains an atom");
            failures += usize::from(!in_v_a(&m, &a, &c).unwrap());
            balls += 1;
        }
    }
    outcome(failures == 0, format!("{balls} balls, {failures} failures"))
}

/// A rational not below `sqrt(q)`.
fn isqrt_upper(q: &Rational) -> Rational {
    let f = barylab::rational::to_f64(q).sqrt();
    let mut r = rat((f * 64.0).ceil() as i64 + 1, 64);
    while &(&r * &r) < q {
        r += rat(1, 64);
    }
    r
}

fn hilbert_rate() -> Outcome {
    let mut exact = true;
    for d in 1..=CUBE_MAX_DIM {
        exact &= cube_alpha_max(d).unwrap() == rat(1, d as i64);
    }
    let mut exceed = 0;
    for seed in 0..CUBE_SEEDS {
        let means = cube_sample_means(CUBE_DIM, seed, CUBE_SAMPLES).unwrap();
        exceed += four_sigma_exceedances(&means, CUBE_SAMPLES);
    }
    let total = CUBE_DIM * CUBE_SEEDS as usize;
    let allowed = (CUBE_EXCEEDANCE_FRACTION * total as f64).floor() as usize;
    outcome(
        exact && exceed <= allowed,
        format!("alpha_max = 1/d for d <= {CUBE_MAX_DIM}: {exact}; {exceed}/{total} coordinates beyond {SIGMAS} sigma (allowed {allowed})"),
    )
}

fn pushforward_identity() -> Outcome {
    let mut exact_failures = 0;
    let mut checked = 0;
    for m in 1..=3 {
        for mu in common::simplex_points(m, 6) {
            let mu = SimplexPoint::new(mu).unwrap();
            for depth in 1..=2 {
                for atoms in 1..=8 {
                    let lambda: DiscreteMeasure = lambda_on_a(depth, atoms).unwrap();
                    let e = common::eta_expectation_exact(&lambda, &mu);
                    exact_failures += usize::from(e != mu.probabilities());
                    checked += 1;
                }
            }
        }
    }

    let mu = SimplexPoint::new(vec![rat(1, 2), rat(1, 3), rat(1, 6)]).unwrap();
    let draws = sample_eta(&mu, T2_DEPTH, T2_LAMBDA_ATOMS, 0, T2_SAMPLES).unwrap();
    let mean = empirical_barycenter(&draws).unwrap();
    let var = sample_variance(&draws).unwrap();
    let sqrt_s = (T2_SAMPLES as f64).sqrt();
    let within = mean
        .iter()
        .zip(&var)
        .zip(mu.to_f64())
        .all(|((m, v), t)| (m - t).abs() <= SIGMAS * v.sqrt() / sqrt_s);
    let coverage = coverage_of_simplex(&draws, T2_GRID).unwrap();
    outcome(
        exact_failures == 0 && within && coverage <= T2_COVERAGE,
        format!(
            "{checked} exact enumerations, {exact_failures} mismatches; mean {mean:.4?} within {SIGMAS} sigma: {within}; coverage {coverage:.4}"
        ),
    )
}

fn cross_module_consistency() -> Outcome {
    let mut checked = 0;
    let mut mismatches = 0;
    for m in 1..=CONSISTENCY_MAX_M {
        let simplex = Polytope::standard_simplex(m).unwrap();
        let mut seen = std::collections::HashSet::new();
        for q in 1..=CONSISTENCY_MAX_DEN {
            for p in common::simplex_points(m, q) {
                if !seen.insert(p.clone()) {
                    continue;
                }
                let f: Vec<f64> = p.iter().map(barylab::rational::to_f64).collect();
                let full = support_full(&f, 0.0);
                let relint = in_relint(&simplex, &RationalVector(p)).unwrap();
                mismatches += usize::from(full != relint);
                checked += 1;
            }
        }
    }
    outcome(
        mismatches == 0,
        format!("{checked} grid points, {mismatches} mismatches"),
    )
}

fn lp_oracle() -> Outcome {
    let mut rng = common::rng(8);
    let mut mismatches = 0;
    for _ in 0..LP_CASES {
        let n = rng.gen_range(1..=3);
        let rows = rng.gen_range(1..=4);
        let c: Vec<Rational> = (0..n).map(|_| int(rng.gen_range(-5..=5))).collect();
        let mut a: Vec<Vec<Rational>> = (0..rows)
            .map(|_| (0..n).map(|_| int(rng.gen_range(-4..=6))).collect())
            .collect();
        let mut b: Vec<Rational> = (0..rows).map(|_| int(rng.gen_range(-3..=12))).collect();
        // Box rows keep every instance bounded.
        for i in 0..n {
            let mut e = vec![Rational::zero(); n];
            e[i] = int(1);
            a.push(e);
            b.push(int(rng.gen_range(1..=10)));
        }
        let mut lp = LinearProgram::maximize(c.clone());
        for (row, rhs) in a.iter().zip(&b) {
            lp.constrain(row.clone(), Relation::Le, rhs.clone());
        }
        let got = solve_lp(&lp).unwrap().optimum().cloned();
        let want = common::brute_force_lp(&c, &a, &b);
        mismatches += usize::from(got != want);
    }
    outcome(
        mismatches == 0,
        format!("{LP_CASES} programs, {mismatches} mismatches"),
    )
}

fn main() -> ExitCode {
    barylab::rng::configure_threads_from_env();
    let criteria: [Criterion; 8] = [
        (
            "1 condition (ii) agrees with relative interior",
            condition_ii_matches_relint,
        ),
        (
            "2 witness barycenter exact and atoms inside M",
            witness_exactness,
        ),
        ("3 witness support densifies", densification),
        (
            "4 conditional barycenters lie in V_a",
            conditional_barycenters,
        ),
        ("5 Hilbert-cube prolongation rate and means", hilbert_rate),
        (
            "6 pushforward barycenter on the simplex",
            pushforward_identity,
        ),
        (
            "7 full support matches relative interior",
            cross_module_consistency,
        ),
        ("8 LP optimum matches vertex enumeration", lp_oracle),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        let start = Instant::now();
        let o = check();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {name}: {} ({secs:.1}s)",
            if o.passed { "PASS" } else { "FAIL" },
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}

//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints its own PASS/FAIL line; exits nonzero if any criterion fails.

use std::time::Instant;

use bosonclt::asymptotic::{
    convergence_sweep, FiniteOutput, FnCharacteristic, InputKind, InputMoments, PhaseSpacePoint, PlancherelOptions,
};
use bosonclt::oracle::complete_unbiased;
use bosonclt::photonstats::{pnd_interpolation_truncated, pnd_recursive_weighted, LaguerreOptions};
use bosonclt::{
    build_asymptotic, char_fn_asymptotic, char_fn_finite, classical_binomial, eig_hermitian, exact_output_distribution,
    factor_gram, gamma_of, gram_from_states, pnd_general, pnd_interpolation, pnd_quadrature, pnd_recursive,
    tv_distance, Complex64, ComplexMatrix, InternalFactor, InterpolationModel, ModelSize, OracleConfig,
    PhotonNumberDistribution, Truncation, DEFAULT_RANK_TOL,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn factorial(m: usize) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn random_states(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Vec<Vec<Complex64>> {
    (0..n)
        .map(|_| {
            let v: Vec<Complex64> = (0..dim)
                .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect();
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            v.into_iter().map(|z| z / norm).collect()
        })
        .collect()
}

fn random_factor(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> InternalFactor {
    let gram = gram_from_states(&random_states(rng, n, dim)).unwrap();
    factor_gram(&gram, DEFAULT_RANK_TOL).unwrap()
}

/// Eigenvectors of a random Hermitian matrix.
fn random_unitary(rng: &mut ChaCha8Rng, k: usize) -> ComplexMatrix {
    let a = ComplexMatrix::from_fn(k, k, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    let h = a.add(&a.adjoint()).unwrap();
    eig_hermitian(&h).unwrap().eigenvectors
}

/// Taylor coefficients of `∏_u 1/(1 + g_u(1-β))` by series multiplication.
fn series_oracle(occupations: &[f64], order: usize) -> Vec<f64> {
    let mut acc = vec![0.0; order + 1];
    acc[0] = 1.0;
    for &g in occupations {
        // 1/(1+g) Σ_k (g/(1+g))^k β^k
        let q = g / (1.0 + g);
        let factor: Vec<f64> = (0..=order).map(|k| q.powi(k as i32) / (1.0 + g)).collect();
        let mut next = vec![0.0; order + 1];
        for i in 0..=order {
            for j in 0..=order - i {
                next[i + j] += acc[i] * factor[j];
            }
        }
        acc = next;
    }
    acc
}

fn geometric(m_max: usize) -> PhotonNumberDistribution {
    pnd_recursive(&[1.0], 1.0, &Truncation::new(1e-12, m_max).unwrap()).unwrap()
}

fn c1_geometric() -> Outcome {
    let p = pnd_recursive(&[1.0], 1.0, &Truncation::default()).map_err(|e| e.to_string())?;
    let err = (0..=40)
        .map(|m| (p.get(m) - 0.5f64.powi(m as i32 + 1)).abs())
        .fold(0.0, f64::max);
    check(err <= 1e-12 && p.len() > 40, format!("max |p_m - 2^-(m+1)| over m<=40 = {err:.3e}"))
}

fn c2_poisson() -> Outcome {
    let n = 1_000_000;
    let p = pnd_recursive_weighted(&[(1.0 / n as f64, n)], 1.0, &Truncation::default()).map_err(|e| e.to_string())?;
    let target = |m: usize| (-1f64).exp() / factorial(m);
    let err = (0..=10).map(|m| (p.get(m) - target(m)).abs()).fold(0.0, f64::max);
    let err_binom = (0..=10)
        .map(|m| (classical_binomial(10_000, m).unwrap() - target(m)).abs())
        .fold(0.0, f64::max);
    check(
        err <= 1e-5 && err_binom <= 1e-3,
        format!("recursion n=1e6 max err {err:.3e}; binomial n=1e4 max err {err_binom:.3e}"),
    )
}

fn c3_interpolation() -> Outcome {
    let mut worst = 0.0f64;
    let mut worst_mean = 0.0f64;
    for k in 1..=9 {
        let x = k as f64 / 10.0;
        let p = pnd_interpolation(x, 30).map_err(|e| e.to_string())?;
        for m in 0..=30 {
            let conv: f64 = (0..=m)
                .map(|j| {
                    let poisson = (-(1.0 - x)).exp() * (1.0 - x).powi(j as i32) / factorial(j);
                    let geo = x.powi((m - j) as i32) / (1.0 + x).powi((m - j) as i32 + 1);
                    poisson * geo
                })
                .sum();
            worst = worst.max((p.get(m) - conv).abs());
        }
        let long = pnd_interpolation_truncated(x, &Truncation::default()).map_err(|e| e.to_string())?;
        worst_mean = worst_mean.max((long.mean() - 1.0).abs());
    }
    check(
        worst <= 1e-12 && worst_mean <= 1e-10,
        format!("max |closed form - convolution| = {worst:.3e}; max |mean - 1| = {worst_mean:.3e}"),
    )
}

fn c4_moments() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut worst_mean = 0.0f64;
    let mut worst_var = 0.0f64;
    for _ in 0..20 {
        let n = rng.gen_range(2..=8);
        let dim = rng.gen_range(1..=n);
        let c = random_factor(&mut rng, n, dim);
        let gamma = gamma_of(&c).unwrap();
        let p = pnd_recursive(gamma.spectrum(), 1.0, &Truncation::default()).map_err(|e| e.to_string())?;
        worst_mean = worst_mean.max((p.mean() - 1.0).abs());
        worst_var = worst_var.max((p.variance() - (1.0 + gamma.purity())).abs());
    }
    check(
        worst_mean <= 1e-8 && worst_var <= 1e-8,
        format!("r=1, 20 Gram matrices: max |mean - r| = {worst_mean:.3e}, max |var - r(1+TrΓ²)| = {worst_var:.3e}"),
    )
}

fn c5_series() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let d = rng.gen_range(1..=4);
        let raw: Vec<f64> = (0..d).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let spec: Vec<f64> = raw.iter().map(|v| v / total).collect();
        let r = rng.gen_range(0.1..=3.0);
        let p = pnd_recursive(&spec, r, &Truncation::default()).map_err(|e| e.to_string())?;
        let occ: Vec<f64> = spec.iter().map(|l| r * l).collect();
        let series = series_oracle(&occ, p.len() - 1);
        for (a, b) in p.probs().iter().zip(&series) {
            worst = worst.max((a - b).abs());
        }
    }
    check(worst <= 1e-10, format!("50 random spectra: max |p_m - Taylor coefficient| = {worst:.3e}"))
}

fn c6_finite_convergence() -> Outcome {
    let start = Instant::now();
    let config = OracleConfig::default();
    let geo = geometric(10_000);
    let mut tv = Vec::new();
    for n in 2..=7 {
        let p = exact_output_distribution(&InternalFactor::indistinguishable(n), &config).map_err(|e| e.to_string())?;
        tv.push(tv_distance(&p, &geo).distance);
    }
    let decreasing = tv.windows(2).all(|w| w[1] < w[0]);
    let limit = pnd_interpolation_truncated(0.5, &Truncation::default()).map_err(|e| e.to_string())?;
    let mut tv_x = Vec::new();
    for n in [3, 6] {
        let gram = InterpolationModel::new(0.5, ModelSize::Finite(n)).unwrap().gram().unwrap();
        let c = factor_gram(&gram, DEFAULT_RANK_TOL).unwrap();
        let p = exact_output_distribution(&c, &config).map_err(|e| e.to_string())?;
        tv_x.push(tv_distance(&p, &limit).distance);
    }
    let secs = start.elapsed().as_secs_f64();
    let fmt: Vec<String> = tv.iter().map(|v| format!("{v:.4}")).collect();
    check(
        decreasing && tv[5] < 0.05 && tv_x[1] < tv_x[0] && secs < 30.0,
        format!(
            "TV to geometric n=2..7: [{}]; x=0.5 TV n=3 {:.4} -> n=6 {:.4}; {secs:.1}s",
            fmt.join(", "),
            tv_x[0],
            tv_x[1]
        ),
    )
}

fn c7_plancherel() -> Outcome {
    let ns = [2, 4, 8, 16, 32];
    let table = convergence_sweep(
        |n| Ok(InternalFactor::indistinguishable(n)),
        InputKind::SinglePhoton,
        &ns,
        &PlancherelOptions::default(),
    )
    .map_err(|e| e.to_string())?;
    let d: Vec<f64> = table.rows.iter().map(|r| r.distance).collect();
    let decreasing = d.windows(2).all(|w| w[1] < w[0]);
    let slope = table.slope.unwrap_or(f64::NAN);
    let fmt: Vec<String> = d.iter().map(|v| format!("{v:.5}")).collect();
    check(
        decreasing && slope <= -0.4,
        format!("distances [{}], log-log slope {slope:.3}", fmt.join(", ")),
    )
}

fn c8_gaussian_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst = 0.0f64;
    for n in [1, 2, 5, 10] {
        let dim = if n == 1 { 1 } else { 2 };
        let c = random_factor(&mut rng, n, dim);
        let mean_n = 0.7;
        let state = build_asymptotic(&gamma_of(&c).unwrap(), &c, InputMoments::isotropic(mean_n).unwrap()).unwrap();
        for k in 0..100 {
            let z: Vec<Complex64> = (0..c.d())
                .map(|u| {
                    let t = k as f64 * 0.37 + u as f64 * 1.3;
                    Complex64::from_polar(0.03 * k as f64, t)
                })
                .collect();
            let at = PhaseSpacePoint::new(z);
            let a = char_fn_finite(&c, InputKind::Thermal { mean_n }, &at).unwrap();
            let b = char_fn_asymptotic(&state, &at).unwrap();
            worst = worst.max((a - b).norm());
        }
    }
    check(worst <= 1e-12, format!("n in {{1,2,5,10}}, 100 points each: max |χ_n - χ_∞| = {worst:.3e}"))
}

fn c9_laguerre() -> Outcome {
    let chi = FnCharacteristic::new(1, |z: &[Complex64]| Complex64::new((-z[0].norm_sqr()).exp(), 0.0)).with_envelope(1.0);
    let p = pnd_quadrature(&chi, 15, &LaguerreOptions::default()).map_err(|e| e.to_string())?;
    let err_geo = (0..=15)
        .map(|m| (p.get(m) - 0.5f64.powi(m as i32 + 1)).abs())
        .fold(0.0, f64::max);
    let c = InternalFactor::indistinguishable(4);
    let finite = FiniteOutput::new(c.clone(), InputKind::SinglePhoton).unwrap();
    let q = pnd_quadrature(&finite, 4, &LaguerreOptions::default()).map_err(|e| e.to_string())?;
    let exact = exact_output_distribution(&c, &OracleConfig::default()).map_err(|e| e.to_string())?;
    let err_oracle = (0..=4).map(|m| (q.get(m) - exact.get(m)).abs()).fold(0.0, f64::max);
    check(
        err_geo <= 1e-8 && err_oracle <= 1e-8,
        format!("thermal max err {err_geo:.3e}; n=4 vs Fock oracle max err {err_oracle:.3e}"),
    )
}

fn spectral_distance(a: &[f64], b: &[f64]) -> f64 {
    if a.len() != b.len() {
        return f64::INFINITY;
    }
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn c10_invariance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let trunc = Truncation::default();
    let squeezed = InputMoments::new(0.8, Complex64::new(0.5, 0.3)).unwrap();
    let mut worst_gauge = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(3..=5);
        let dim = rng.gen_range(2..=3);
        let c = random_factor(&mut rng, n, dim);
        let w = random_unitary(&mut rng, c.d());
        let cw = c.regauge(&w).unwrap();
        let (ga, gb) = (gamma_of(&c).unwrap(), gamma_of(&cw).unwrap());
        worst_gauge = worst_gauge.max(spectral_distance(ga.spectrum(), gb.spectrum()));
        let sa = build_asymptotic(&ga, &c, squeezed).unwrap();
        let sb = build_asymptotic(&gb, &cw, squeezed).unwrap();
        worst_gauge = worst_gauge.max(spectral_distance(sa.exponent_spectrum(), sb.exponent_spectrum()));
        let pa = pnd_recursive(ga.spectrum(), 1.3, &trunc).unwrap();
        let pb = pnd_recursive(gb.spectrum(), 1.3, &trunc).unwrap();
        worst_gauge = worst_gauge.max(tv_distance(&pa, &pb).distance);
        let pa = pnd_general(&sa, &trunc).unwrap();
        let pb = pnd_general(&sb, &trunc).unwrap();
        worst_gauge = worst_gauge.max(tv_distance(&pa, &pb).distance);
        let oa = exact_output_distribution(&c, &OracleConfig::default()).unwrap();
        let ob = exact_output_distribution(&cw, &OracleConfig::default()).unwrap();
        worst_gauge = worst_gauge.max(tv_distance(&oa, &ob).distance);
    }
    let mut worst_completion = 0.0f64;
    for _ in 0..10 {
        let n = rng.gen_range(3..=5);
        let c = random_factor(&mut rng, n, 2);
        let u = complete_unbiased(&random_unitary(&mut rng, n - 1)).unwrap();
        let base = exact_output_distribution(&c, &OracleConfig::default()).unwrap();
        let config = OracleConfig {
            unitary: Some(u),
            ..OracleConfig::default()
        };
        let other = exact_output_distribution(&c, &config).unwrap();
        worst_completion = worst_completion.max(tv_distance(&base, &other).distance);
    }
    check(
        worst_gauge <= 1e-9 && worst_completion <= 1e-9,
        format!("gauge C -> CW max change {worst_gauge:.3e}; completion max TV {worst_completion:.3e}"),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 geometric limit", c1_geometric),
        ("2 Poisson limit", c2_poisson),
        ("3 interpolation closed form", c3_interpolation),
        ("4 moments", c4_moments),
        ("5 recursion vs generating function", c5_series),
        ("6 finite-n convergence", c6_finite_convergence),
        ("7 Plancherel convergence", c7_plancherel),
        ("8 Gaussian exactness", c8_gaussian_exactness),
        ("9 Laguerre path", c9_laguerre),
        ("10 gauge and completion invariance", c10_invariance),
    ];
    let mut failed = 0;
    for (name, f) in criteria {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {name}: {detail} [{secs:.2}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL criterion {name}: {detail} [{secs:.2}s]");
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}

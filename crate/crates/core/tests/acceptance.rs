//! End-to-end acceptance suite. Prints one PASS/FAIL line per criterion and
//! fails if any criterion fails. Monte Carlo runs use the fixed seed 7.

use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use padic_ts::fbm::{self, CovarianceModel, SimulationConfig, Variant};
use padic_ts::padic::{character, PAdicDigits};
use padic_ts::vladimirov::{self, OperatorConfig, OperatorMode};
use padic_ts::wavelets::{self, SampledSeries, WaveletIndex};
use padic_ts::{Prime, UltrametricIndex};

const SEED: u64 = 7;
const M: usize = 20_000;

type Outcome = Result<String, String>;

fn p(n: u32) -> Prime {
    Prime::new(n).unwrap()
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

fn random_series(
    rng: &mut ChaCha8Rng,
    prime: Prime,
    n: usize,
    mean_zero: bool,
) -> SampledSeries<f64> {
    let mut xs: Vec<Complex<f64>> = (0..n)
        .map(|_| Complex::new(2.0 * uniform(rng) - 1.0, 2.0 * uniform(rng) - 1.0))
        .collect();
    if mean_zero {
        let mean = xs.iter().sum::<Complex<f64>>() / n as f64;
        xs.iter_mut().for_each(|x| *x -= mean);
    }
    SampledSeries::new(prime, 0, xs).unwrap()
}

fn orthonormality() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for (pr, top) in [(2u32, 6u32), (3, 4), (5, 3)] {
        let basis = wavelets::dense::basis::<f64>(p(pr), top, 0);
        let n = basis.len();
        ensure(
            n == pr.pow(top) as usize,
            format!("p={pr}: basis has {n} vectors"),
        )?;
        for a in 0..n {
            for b in 0..n {
                let g: Complex<f64> = basis[a]
                    .iter()
                    .zip(&basis[b])
                    .map(|(u, v)| u.conj() * v)
                    .sum();
                let want = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((g - want).norm());
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(worst <= 1e-12, format!("max |G - I| = {worst:.3e}"))?;
    ensure(secs < 5.0, format!("took {secs:.2} s"))?;
    Ok(format!("max |G - I| = {worst:.3e}, {secs:.3} s"))
}

fn haar_monna() -> Outcome {
    let prime = p(2);
    let top = 6u32;
    let n = 1usize << top;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let series = random_series(&mut rng, prime, n, false);
    for j in 0..=top {
        let a = wavelets::monna_project(&series, j).map_err(|e| e.to_string())?;
        let b = wavelets::haar_project(&series, j).map_err(|e| e.to_string())?;
        ensure(a == b, format!("projections differ at j = {j}"))?;
    }
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for j in 1..=top {
        for ball in 0..n >> j {
            let w = WaveletIndex::new(1, j, ball);
            for x in 0..n {
                let padic: Complex<f64> =
                    wavelets::padic_wavelet_eval(&w, &UltrametricIndex::new(prime, x as u64), top);
                let haar: f64 = wavelets::haar_eval(j as i32, ball as i64, x as i64).unwrap();
                worst = worst.max((padic - haar).norm());
                evaluated += 1;
            }
        }
    }
    ensure(worst <= 1e-12, format!("max |ψ - h| = {worst:.3e}"))?;
    Ok(format!(
        "projections identical for j = 0..6; {evaluated} wavelet values, max dev {worst:.3e}"
    ))
}

fn eigenrelation() -> Outcome {
    let mut worst = 0.0f64;
    for (pr, top) in [(2u32, 5u32), (3, 4)] {
        let prime = p(pr);
        let n = pr.pow(top) as usize;
        for alpha in [0.6, 1.0, 1.5] {
            let cfg = OperatorConfig::new(prime, alpha, OperatorMode::ZeroExtended, n).unwrap();
            for w in wavelets::wavelet_indices(prime, top, 0) {
                let psi: Vec<Complex<f64>> = (0..n)
                    .map(|m| wavelets::wavelet_sample(prime, 0, &w, m))
                    .collect();
                let out = vladimirov::apply_direct(
                    &SampledSeries::new(prime, 0, psi.clone()).unwrap(),
                    &cfg,
                )
                .map_err(|e| e.to_string())?;
                let lambda: f64 = vladimirov::wavelet_eigenvalue(prime, alpha, w.j);
                let scale = lambda * psi.iter().map(|z| z.norm()).fold(0.0, f64::max);
                for (got, want) in out.samples().iter().zip(&psi) {
                    worst = worst.max((got - want * lambda).norm() / scale);
                }
            }
        }
    }
    ensure(worst <= 1e-9, format!("max relative deviation {worst:.3e}"))?;
    Ok(format!("max relative deviation {worst:.3e}"))
}

fn spectral_direct() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut worst = 0.0f64;
    let alphas = [0.6, 1.0, 1.5];
    for (pr, n) in [(2u32, 32usize), (3, 81)] {
        let prime = p(pr);
        for trial in 0..100 {
            let alpha = alphas[trial % alphas.len()];
            let cfg = OperatorConfig::new(prime, alpha, OperatorMode::ZeroExtended, n).unwrap();
            let s = random_series(&mut rng, prime, n, true);
            let a = vladimirov::apply_spectral(&s, &cfg).map_err(|e| e.to_string())?;
            let b = vladimirov::apply_direct(&s, &cfg).map_err(|e| e.to_string())?;
            for (x, y) in a.samples().iter().zip(b.samples()) {
                worst = worst.max((x - y).norm());
            }
        }
    }
    ensure(
        worst <= 1e-10,
        format!("max |spectral - direct| = {worst:.3e}"),
    )?;
    Ok(format!(
        "200 windows, max |spectral - direct| = {worst:.3e}"
    ))
}

fn operator_structure() -> Outcome {
    let mut min_eig = f64::INFINITY;
    let mut worst_row = 0.0f64;
    let mut worst_sym = 0.0f64;
    for (pr, n) in [(2u32, 128usize), (3, 243), (5, 125), (7, 49)] {
        for alpha in [0.6, 1.0, 1.5] {
            let cfg = OperatorConfig::new(p(pr), alpha, OperatorMode::FiniteSection, n).unwrap();
            let a: DMatrix<f64> = vladimirov::build_matrix(&cfg).map_err(|e| e.to_string())?;
            worst_sym = worst_sym.max((&a - a.transpose()).amax());
            for row in a.row_iter() {
                worst_row = worst_row.max(row.sum().abs());
            }
            let eig = SymmetricEigen::new(a).eigenvalues;
            min_eig = min_eig.min(eig.min());
        }
    }
    ensure(worst_sym == 0.0, format!("asymmetry {worst_sym:.3e}"))?;
    ensure(
        worst_row <= 1e-12,
        format!("max |row sum| = {worst_row:.3e}"),
    )?;
    ensure(min_eig >= -1e-10, format!("min eigenvalue {min_eig:.3e}"))?;
    Ok(format!(
        "symmetric, max |row sum| = {worst_row:.3e}, min eigenvalue = {min_eig:.3e}"
    ))
}

fn monte_carlo(batches: &mut Vec<fbm::Batch<f64>>) -> Outcome {
    let mut lines = Vec::new();
    for (pr, alpha, top) in [(2u32, 1.0, 5u32), (2, 0.75, 5), (3, 1.0, 3)] {
        let start = Instant::now();
        let cfg = SimulationConfig::new(p(pr), alpha, top, 0, M, SEED).unwrap();
        let batch = fbm::simulate(&cfg).map_err(|e| e.to_string())?;
        let empirical = fbm::estimate(&batch).map_err(|e| e.to_string())?;
        let model = CovarianceModel::new(p(pr), alpha, 0, Variant::Paper).unwrap();
        let report = fbm::verify(&model, &empirical).map_err(|e| e.to_string())?;
        let secs = start.elapsed().as_secs_f64();
        let tag = format!("p={pr} α={alpha} J={top}");
        ensure(
            batch
                .realizations
                .iter()
                .all(|r| r.samples()[0] == Complex::new(0.0, 0.0)),
            format!("{tag}: F(0) not identically zero"),
        )?;
        ensure(
            report.exact_mismatches == 0,
            format!("{tag}: {} exact mismatches", report.exact_mismatches),
        )?;
        ensure(
            report.max_abs_z <= 5.0,
            format!("{tag}: max|z| = {:.3}", report.max_abs_z),
        )?;
        ensure(
            report.frac_within_2 >= 0.93,
            format!("{tag}: within 2 SE = {:.4}", report.frac_within_2),
        )?;
        ensure(secs < 60.0, format!("{tag}: took {secs:.1} s"))?;
        lines.push(format!(
            "{tag}: max|z| = {:.3}, within 2 SE = {:.2}%, {secs:.2} s",
            report.max_abs_z,
            100.0 * report.frac_within_2
        ));
        batches.push(batch);
    }
    Ok(lines.join("; "))
}

fn adjudication() -> Outcome {
    let prime = p(2);
    let cfg = SimulationConfig::new(prime, 1.0, 6, 1, M, SEED).unwrap();
    let batch = fbm::simulate(&cfg).map_err(|e| e.to_string())?;
    let empirical = fbm::estimate(&batch).map_err(|e| e.to_string())?;
    let model = CovarianceModel::new(prime, 1.0, 1, Variant::Paper).unwrap();
    let report = fbm::verify(&model, &empirical).map_err(|e| e.to_string())?;
    let scores = report
        .variant_scores
        .clone()
        .ok_or("no per-variant scores")?;
    ensure(
        scores.len() == 2,
        format!("{} variant scores", scores.len()),
    )?;
    let fitting: Vec<Variant> = scores
        .iter()
        .filter(|s| s.max_abs_z <= 5.0)
        .map(|s| s.variant)
        .collect();
    let summary = scores
        .iter()
        .map(|s| format!("{:?} max|z| = {:.3}", s.variant, s.max_abs_z))
        .collect::<Vec<_>>()
        .join(", ");
    ensure(
        fitting.len() == 1,
        format!("{} variants fit: {summary}", fitting.len()),
    )?;
    ensure(
        report.best_variant == Some(fitting[0]),
        format!(
            "report names {:?}, fit is {:?}",
            report.best_variant, fitting[0]
        ),
    )?;
    Ok(format!("report names {:?}; {summary}", fitting[0]))
}

fn whiteness(batches: &[fbm::Batch<f64>]) -> Outcome {
    let batch = batches.first().ok_or("criterion 6 batch unavailable")?;
    let r = fbm::whiteness_check(batch, 1.0).map_err(|e| e.to_string())?;
    ensure(
        r.variance_within_3 == r.coefficients,
        format!(
            "variance: {}/{} within 3 SE (max z {:.3})",
            r.variance_within_3, r.coefficients, r.variance_max_z
        ),
    )?;
    ensure(
        r.cross_within_3 == r.cross_pairs,
        format!(
            "cross: {}/{} within 3 SE (max z {:.3}); variance max z {:.3}",
            r.cross_within_3, r.cross_pairs, r.cross_max_z, r.variance_max_z
        ),
    )?;
    Ok(format!(
        "{} coefficients: variance max z = {:.3}, {} pairs: cross max z = {:.3} (mean max z = {:.3})",
        r.coefficients, r.variance_max_z, r.cross_pairs, r.cross_max_z, r.mean_max_z
    ))
}

fn variogram() -> Outcome {
    let prime = p(2);
    let top = 10u32;
    let model = CovarianceModel::new(prime, 1.0, 0, Variant::Paper).unwrap();
    let points = fbm::staircase_variogram(&model, top).map_err(|e| e.to_string())?;
    ensure(
        points.len() == (1 << top) - 1,
        format!("{} lags", points.len()),
    )?;
    for pair in points.windows(2) {
        let (a, b) = (&pair[0], &pair[1]);
        if a.norm == b.norm {
            ensure(
                a.value == b.value,
                format!("lags {} and {} differ", a.lag, b.lag),
            )?;
        } else {
            ensure(
                b.lag.is_power_of_two(),
                format!("step at non-power lag {}", b.lag),
            )?;
        }
    }
    let lags: Vec<usize> = (0..top).map(|k| 1usize << k).collect();
    let slope: f64 = fbm::variogram_log_slope(&model, &lags);
    ensure((slope - 1.0).abs() <= 0.05, format!("slope {slope:.4}"))?;
    Ok(format!(
        "staircase exact on {} lags; slope over lags 1..512 = {slope:.4}",
        points.len()
    ))
}

fn proof_identities() -> Outcome {
    let mut worst = 0.0f64;
    for pr in [2u32, 3, 5, 7] {
        let prime = p(pr);
        let mut sq = 0.0;
        let mut lin = Complex::new(0.0, 0.0);
        for k in 1..pr {
            let frac = BigRational::new(BigInt::from(k), BigInt::from(pr));
            let chi: Complex<f64> = character(&PAdicDigits::from_rational(prime, &frac).unwrap());
            let direct = Complex::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * f64::from(k) / f64::from(pr),
            );
            worst = worst.max((chi - direct).norm());
            sq += (chi - 1.0).norm_sqr();
            lin += chi.conj() - 1.0;
        }
        worst = worst.max((sq - 2.0 * f64::from(pr)).abs());
        worst = worst.max((lin + f64::from(pr)).norm());
    }
    ensure(worst <= 1e-12, format!("max deviation {worst:.3e}"))?;
    Ok(format!("p ∈ {{2,3,5,7}}, max deviation {worst:.3e}"))
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_padic-ts"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!("{args:?}: {}", String::from_utf8_lossy(&out.stderr)),
    )
}

fn read_series(path: &Path) -> Result<Vec<Complex<f64>>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| e.to_string())?;
    text.lines()
        .skip(1)
        .map(|line| {
            let f: Vec<&str> = line.split(',').collect();
            match f.as_slice() {
                [_, re, im] => Ok(Complex::new(
                    re.parse().map_err(|_| line.to_string())?,
                    im.parse().map_err(|_| line.to_string())?,
                )),
                _ => Err(format!("bad row `{line}`")),
            }
        })
        .collect()
}

fn cli_oracle() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut worst = 0.0f64;
    for (pr, n) in [(2u32, 256usize), (3, 243), (2, 64), (3, 27)] {
        let values = padic_ts::cli::synthetic_series(n);
        let input = dir.path().join(format!("in_{pr}_{n}.csv"));
        std::fs::write(&input, padic_ts::cli::synthetic_csv(n)).map_err(|e| e.to_string())?;
        let output = dir.path().join(format!("out_{pr}_{n}.csv"));
        let ps = pr.to_string();
        run_cli(&[
            "derivative",
            "--input",
            input.to_str().unwrap(),
            "--p",
            &ps,
            "--alpha",
            "1",
            "--output",
            output.to_str().unwrap(),
        ])?;
        let got = read_series(&output)?;
        ensure(got.len() == n, format!("p={pr}: {} output rows", got.len()))?;
        let cfg = OperatorConfig::new(p(pr), 1.0, OperatorMode::FiniteSection, n).unwrap();
        let a = vladimirov::build_matrix(&cfg).map_err(|e| e.to_string())?;
        let want = a * DVector::from_vec(values);
        for (g, w) in got.iter().zip(want.iter()) {
            worst = worst.max((g - w).norm());
        }
    }
    ensure(
        worst <= 1e-10,
        format!("max |cli - matrix·x| = {worst:.3e}"),
    )?;

    let input = dir.path().join("in_2_256.csv");
    let mut outputs = Vec::new();
    for run in 0..2 {
        let d = dir.path().join(format!("d{run}.csv"));
        let s = dir.path().join(format!("s{run}.csv"));
        run_cli(&[
            "derivative",
            "--input",
            input.to_str().unwrap(),
            "--p",
            "2",
            "--alpha",
            "1",
            "--output",
            d.to_str().unwrap(),
        ])?;
        run_cli(&[
            "simulate",
            "--p",
            "3",
            "--alpha",
            "0.8",
            "--J",
            "3",
            "--realizations",
            "5",
            "--seed",
            "7",
            "--output",
            s.to_str().unwrap(),
        ])?;
        let mut bytes = Vec::new();
        for path in [&d, &s] {
            for suffix in ["", ".manifest.json"] {
                let full = padic_ts::cli::sidecar(path, suffix);
                bytes.push(std::fs::read(full).map_err(|e| e.to_string())?);
            }
        }
        outputs.push(bytes);
    }
    ensure(
        outputs[0] == outputs[1],
        "identical manifests produced different bytes",
    )?;
    Ok(format!(
        "N ≤ 256 at p = 2, 3: max |cli - matrix·x| = {worst:.3e}; reruns byte-identical"
    ))
}

fn report(n: usize, name: &str, check: impl FnOnce() -> Outcome, failures: &mut Vec<String>) {
    let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
    let line = match &outcome {
        Ok(detail) => format!("criterion {n:>2} PASS {name}: {detail}"),
        Err(detail) => format!("criterion {n:>2} FAIL {name}: {detail}"),
    };
    // written past the test harness capture so the lines land in the log
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
    let _ = out.flush();
    if outcome.is_err() {
        failures.push(line);
    }
}

#[test]
fn acceptance() {
    let mut failures = Vec::new();
    let mut batches = Vec::new();
    report(1, "orthonormality", orthonormality, &mut failures);
    report(2, "haar/monna correspondence", haar_monna, &mut failures);
    report(3, "eigenrelation", eigenrelation, &mut failures);
    report(
        4,
        "spectral/direct equivalence",
        spectral_direct,
        &mut failures,
    );
    report(5, "operator structure", operator_structure, &mut failures);
    report(
        6,
        "covariance monte carlo",
        || monte_carlo(&mut batches),
        &mut failures,
    );
    report(7, "constant-term adjudication", adjudication, &mut failures);
    report(8, "whiteness", || whiteness(&batches), &mut failures);
    report(9, "variogram", variogram, &mut failures);
    report(10, "character identities", proof_identities, &mut failures);
    report(11, "cli oracle and determinism", cli_oracle, &mut failures);
    assert!(
        failures.is_empty(),
        "failed criteria:\n{}",
        failures.join("\n")
    );
}

//! Discretized fractional p-adic Brownian motion.
//!
//! The process solves `D^α f = φ` with `φ` white noise. Expanding over
//! wavelets, `f = Σ p^{α(j-1)} d_{k;j,b} (ψ_{k;j,b} - p^l ∫_{p^l Z_p} ψ_{k;j,b})`
//! with iid standard circular complex Gaussians `d`. Sampled at level `l` on a
//! window of `p^{J-l}` points the expansion is finite and exact:
//!
//! - wavelets with `j ≤ l` average to zero over every level-`l` ball;
//! - wavelets with `j > J` are constant on the window, which lies inside the
//!   sub-ball containing the origin, so they cancel against the subtracted
//!   term;
//! - for the remaining wavelets the subtracted term is the wavelet's value on
//!   the origin ball, so `F(x) = G(x) - G(0)` where `G` is the plain wavelet sum.
//!
//! Its covariance is `⟨conj F(x) F(y)⟩ = ρ(x) + ρ(y) - ρ(x - y)`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{self, group_sub, index_distance, NormValue, Prime, UltrametricIndex};
use crate::scalar::{pairwise_sum, pairwise_sum_real, pow_scaled, Real};
use crate::wavelets::{self, SampledSeries, WaveletCoefficients, WaveletIndex};

pub const DEFAULT_MATRIX_CAP: usize = 4096;

/// Which constant term to use in the level-`l` correlation function.
///
/// `Paper` scales `(1 - p^{-1})/(1 - p^{2α-1})` by `p^{-l}`; `Alternative`
/// scales it by `p^{(2α-1)l}`. Both agree at `l = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    Paper,
    Alternative,
}

impl Variant {
    pub const ALL: [Variant; 2] = [Variant::Paper, Variant::Alternative];
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CovarianceModel<T> {
    prime: Prime,
    alpha: T,
    level: u32,
    variant: Variant,
}

impl<T: Real> CovarianceModel<T> {
    pub fn new(prime: Prime, alpha: T, level: u32, variant: Variant) -> Result<Self> {
        check_alpha(alpha)?;
        if variant == Variant::Paper && level > 0 && alpha == T::of(0.5) {
            return Err(Error::param(
                "the p^{-l} constant term diverges at alpha = 1/2 for l >= 1",
            ));
        }
        Ok(CovarianceModel {
            prime,
            alpha,
            level,
            variant,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn with_variant(&self, variant: Variant) -> Result<Self> {
        Self::new(self.prime, self.alpha, self.level, variant)
    }

    /// `ρ(0) = 0`; for `|x| = p^e`
    /// `ρ = C_l·(1 - p^{-1})/(1 - p^{2α-1}) + p^{e(2α-1)}(p^{-2α} - 1)/(1 - p^{2α-1})`
    /// with `C_l` set by the variant. At `α = 1/2` the analytic limit
    /// `(1 - p^{-1})(e - 1 - l) + 1` is used.
    pub fn rho(&self, norm: NormValue) -> T {
        let e = match norm {
            NormValue::Zero => return T::zero(),
            NormValue::Pow(e) => e,
        };
        let p = self.prime.get();
        let pf = T::of(f64::from(p));
        let one = T::one();
        let two_alpha_m1 = T::of(2.0) * self.alpha - one;
        if two_alpha_m1 == T::zero() {
            return (one - pf.recip()) * T::of((e - 1 - i64::from(self.level)) as f64) + one;
        }
        let q = pf.powf(two_alpha_m1);
        let prefactor = match self.variant {
            Variant::Paper => pf.powi(-(self.level as i32)),
            Variant::Alternative => pow_scaled(p, i64::from(self.level), two_alpha_m1),
        };
        let denom = one - q;
        prefactor * (one - pf.recip()) / denom
            + pow_scaled(p, e, two_alpha_m1) * (pf.powf(-T::of(2.0) * self.alpha) - one) / denom
    }

    pub fn variogram(&self, norm: NormValue) -> T {
        T::of(2.0) * self.rho(norm)
    }

    /// Norm of a level-`l` sample index, as an element of `Q_p/p^l Z_p`.
    pub fn norm_of(&self, x: &UltrametricIndex) -> NormValue {
        x.norm().shifted(i64::from(self.level))
    }

    /// `ρ(x) + ρ(y) - ρ(x - y)` for level-`l` sample indices.
    pub fn covariance(&self, x: &UltrametricIndex, y: &UltrametricIndex) -> Result<T> {
        if x.prime() != self.prime || y.prime() != self.prime {
            return Err(Error::param(format!(
                "indices must use the model prime {}",
                self.prime
            )));
        }
        let diff = group_sub(x, y)?;
        debug_assert_eq!(diff.norm(), index_distance(x, y)?);
        Ok(self.rho(self.norm_of(x)) + self.rho(self.norm_of(y)) - self.rho(self.norm_of(&diff)))
    }

    fn norm_u64(&self, x: u64, y: u64) -> NormValue {
        match padic::distance_exponent(x, y, self.prime.as_u64()) {
            None => NormValue::Zero,
            Some(e) => NormValue::Pow(i64::from(e) + i64::from(self.level)),
        }
    }

    /// Machine-index form of [`covariance`](Self::covariance).
    pub fn covariance_at(&self, x: usize, y: usize) -> T {
        let (x, y) = (x as u64, y as u64);
        self.rho(self.norm_u64(x, 0)) + self.rho(self.norm_u64(y, 0))
            - self.rho(self.norm_u64(x, y))
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("alpha must be positive, got {alpha}")))
    }
}

pub fn rho<T: Real>(norm: NormValue, model: &CovarianceModel<T>) -> T {
    model.rho(norm)
}

pub fn variogram<T: Real>(norm: NormValue, model: &CovarianceModel<T>) -> T {
    model.variogram(norm)
}

fn window_len(prime: Prime, top: u32, level: u32) -> Result<usize> {
    if top <= level {
        return Err(Error::param(format!("J = {top} must exceed level {level}")));
    }
    prime
        .checked_pow(top - level)
        .ok_or_else(|| Error::Resource(format!("{prime}^{} overflows", top - level)))
}

pub fn model_covariance_matrix<T: Real>(
    model: &CovarianceModel<T>,
    top: u32,
) -> Result<DMatrix<T>> {
    model_covariance_matrix_capped(model, top, DEFAULT_MATRIX_CAP)
}

/// Model covariance over the `p^{J-l}` window points.
pub fn model_covariance_matrix_capped<T: Real>(
    model: &CovarianceModel<T>,
    top: u32,
    cap: usize,
) -> Result<DMatrix<T>> {
    let n = window_len(model.prime, top, model.level)?;
    if n > cap {
        return Err(Error::Resource(format!(
            "covariance matrix of size {n} exceeds cap {cap}"
        )));
    }
    Ok(DMatrix::from_fn(n, n, |x, y| model.covariance_at(x, y)))
}

/// One row of the staircase table: model variogram at a real lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VariogramPoint<T> {
    pub lag: usize,
    pub norm: NormValue,
    pub value: T,
}

/// `2ρ(|η^{-1}(h)|)` for sample lags `h = 1..p^{J-l}-1`. The value depends on
/// `h` only through its digit count, so it is constant on `[p^{e-1}, p^e)`.
pub fn staircase_variogram<T: Real>(
    model: &CovarianceModel<T>,
    top: u32,
) -> Result<Vec<VariogramPoint<T>>> {
    let n = window_len(model.prime, top, model.level)?;
    Ok((1..n)
        .map(|lag| {
            let norm = model.norm_u64(lag as u64, 0);
            VariogramPoint {
                lag,
                norm,
                value: model.variogram(norm),
            }
        })
        .collect())
}

/// Least-squares slope of `ln 2ρ` against `ln h` over the given lags.
pub fn variogram_log_slope<T: Real>(model: &CovarianceModel<T>, lags: &[usize]) -> T {
    let pts: Vec<(T, T)> = lags
        .iter()
        .map(|&h| {
            let v = model.variogram(model.norm_u64(h as u64, 0));
            (T::of_usize(h).ln(), v.ln())
        })
        .collect();
    let n = T::of_usize(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OutputMode {
    Complex,
    /// `Re F`, whose covariance is half the complex model.
    RealPart,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimulationConfig<T> {
    pub prime: Prime,
    pub alpha: T,
    pub top: u32,
    pub level: u32,
    pub realizations: usize,
    pub seed: u64,
    pub output: OutputMode,
}

impl<T: Real> SimulationConfig<T> {
    pub fn new(
        prime: Prime,
        alpha: T,
        top: u32,
        level: u32,
        realizations: usize,
        seed: u64,
    ) -> Result<Self> {
        let cfg = SimulationConfig {
            prime,
            alpha,
            top,
            level,
            realizations,
            seed,
            output: OutputMode::Complex,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_output(mut self, output: OutputMode) -> Self {
        self.output = output;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        window_len(self.prime, self.top, self.level)?;
        if self.realizations == 0 {
            return Err(Error::param("at least one realization is required"));
        }
        Ok(())
    }

    pub fn window_len(&self) -> usize {
        window_len(self.prime, self.top, self.level).expect("validated")
    }

    /// Factor multiplying `d_{k;j,b}` in the counting-measure coefficient:
    /// `p^{α(j-1)}` times `p^{-l/2}` from the level-`l` sample normalization.
    fn coefficient_scale(&self, j: u32) -> T {
        pow_scaled(self.prime.get(), i64::from(j) - 1, self.alpha)
            * pow_scaled(self.prime.get(), -i64::from(self.level), T::of(0.5))
    }
}

/// Standard circular complex Gaussian from two 64-bit words (Box-Muller):
/// real and imaginary parts each have variance 1/2.
fn gaussian_from_words(a: u64, b: u64) -> (f64, f64) {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    let u1 = ((a >> 11) + 1) as f64 * SCALE;
    let u2 = (b >> 11) as f64 * SCALE;
    let r = (-u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    (r * theta.cos(), r * theta.sin())
}

fn noise_stream(seed: u64, realization: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization);
    rng
}

/// The noise coefficient at storage position `position` of realization
/// `realization`, addressed directly in the counter-based stream.
pub fn noise_coefficient(seed: u64, realization: u64, position: usize) -> Complex<f64> {
    let mut rng = noise_stream(seed, realization);
    rng.set_word_pos(4 * position as u128);
    let (re, im) = gaussian_from_words(rng.next_u64(), rng.next_u64());
    Complex::new(re, im)
}

/// The iid family `d_{k;j,b}` driving realization `m`, in storage order.
pub fn noise_coefficients<T: Real>(
    cfg: &SimulationConfig<T>,
    realization: usize,
) -> Result<WaveletCoefficients<T>> {
    cfg.validate()?;
    let n = cfg.window_len();
    let mut rng = noise_stream(cfg.seed, realization as u64);
    let details = (0..n - 1)
        .map(|_| {
            let (re, im) = gaussian_from_words(rng.next_u64(), rng.next_u64());
            Complex::new(T::of(re), T::of(im))
        })
        .collect();
    WaveletCoefficients::from_parts(
        cfg.prime,
        cfg.top,
        cfg.level,
        Complex::new(T::zero(), T::zero()),
        details,
    )
}

fn realize<T: Real>(
    cfg: &SimulationConfig<T>,
    noise: &WaveletCoefficients<T>,
) -> Result<SampledSeries<T>> {
    let mut coeffs = noise.clone();
    let scales: Vec<T> = (0..=cfg.top).map(|j| cfg.coefficient_scale(j)).collect();
    let idx: Vec<WaveletIndex> = coeffs.indices().collect();
    for (w, c) in idx.iter().zip(coeffs.details_mut()) {
        *c = *c * scales[w.j as usize];
    }
    let g = wavelets::inverse(&coeffs)?;
    let origin = g.samples()[0];
    let samples = g
        .samples()
        .iter()
        .map(|&z| {
            let f = z - origin;
            match cfg.output {
                OutputMode::Complex => f,
                OutputMode::RealPart => Complex::new(f.re, T::zero()),
            }
        })
        .collect();
    SampledSeries::new(cfg.prime, cfg.level, samples)
}

/// A batch of realizations with the configuration that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch<T> {
    pub config: SimulationConfig<T>,
    pub realizations: Vec<SampledSeries<T>>,
}

impl<T: Real> Batch<T> {
    pub fn len(&self) -> usize {
        self.realizations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realizations.is_empty()
    }

    pub fn window_len(&self) -> usize {
        self.realizations.first().map_or(0, |s| s.len())
    }
}

/// Generates `M` exact realizations. Realization `m` only reads stream `m` of
/// the seeded generator, so the batch is the same for any thread count.
pub fn simulate<T: Real>(cfg: &SimulationConfig<T>) -> Result<Batch<T>> {
    cfg.validate()?;
    let realizations = (0..cfg.realizations)
        .into_par_iter()
        .map(|m| realize(cfg, &noise_coefficients(cfg, m)?))
        .collect::<Result<Vec<_>>>()?;
    Ok(Batch {
        config: *cfg,
        realizations,
    })
}

/// Sample second moments `(1/M) Σ conj F_m(x) F_m(y)` with standard errors.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalCovariance<T: Real> {
    pub config: SimulationConfig<T>,
    pub realizations: usize,
    pub values: DMatrix<Complex<T>>,
    /// `sqrt(Σ|s - mean|² / (M(M-1)))` per entry.
    pub std_errors: DMatrix<T>,
}

struct Moment<T> {
    mean: Complex<T>,
    se: T,
}

fn moment<T: Real>(summands: &[Complex<T>]) -> Moment<T> {
    let m = T::of_usize(summands.len());
    let mean = pairwise_sum(summands) / m;
    let dev: Vec<T> = summands.iter().map(|s| (s - mean).norm_sqr()).collect();
    let var = pairwise_sum_real(&dev) / (m - T::one());
    Moment {
        mean,
        se: (var / m).sqrt(),
    }
}

pub fn estimate<T: Real>(batch: &Batch<T>) -> Result<EmpiricalCovariance<T>> {
    let m = batch.len();
    if m < 2 {
        return Err(Error::param(format!(
            "estimation needs at least 2 realizations, got {m}"
        )));
    }
    let n = batch.window_len();
    if batch.realizations.iter().any(|s| s.len() != n) {
        return Err(Error::ShapeMismatch("realizations differ in length".into()));
    }
    let rows: Vec<Vec<Moment<T>>> = (0..n)
        .into_par_iter()
        .map(|x| {
            let mut buf = Vec::with_capacity(m);
            (x..n)
                .map(|y| {
                    buf.clear();
                    buf.extend(
                        batch
                            .realizations
                            .iter()
                            .map(|s| s.samples()[x].conj() * s.samples()[y]),
                    );
                    moment(&buf)
                })
                .collect()
        })
        .collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut values = DMatrix::from_element(n, n, zero);
    let mut std_errors = DMatrix::from_element(n, n, T::zero());
    for (x, row) in rows.iter().enumerate() {
        for (off, mo) in row.iter().enumerate() {
            let y = x + off;
            values[(x, y)] = mo.mean;
            values[(y, x)] = mo.mean.conj();
            std_errors[(x, y)] = mo.se;
            std_errors[(y, x)] = mo.se;
        }
    }
    Ok(EmpiricalCovariance {
        config: batch.config,
        realizations: m,
        values,
        std_errors,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FitScore {
    pub variant: Variant,
    pub max_abs_z: f64,
    pub frac_within_2: f64,
    pub frac_within_5: f64,
    pub total_sq_z: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub variant: Variant,
    pub max_abs_z: f64,
    pub frac_within_2: f64,
    pub frac_within_5: f64,
    /// Entries with a nonzero standard error; the fractions are over these.
    pub stochastic_entries: usize,
    /// Entries with zero standard error that do not match the model exactly.
    pub exact_mismatches: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub variant_scores: Option<Vec<FitScore>>,
    /// Variant with the smaller total squared z-score (levels `l ≥ 1`).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub best_variant: Option<Variant>,
}

/// Per-entry `|empirical - model| / SE`; entries with zero SE give 0 on an
/// exact match and infinity otherwise.
pub fn z_scores<T: Real>(
    model: &DMatrix<T>,
    empirical: &EmpiricalCovariance<T>,
) -> Result<DMatrix<f64>> {
    if model.shape() != empirical.values.shape() {
        return Err(Error::ShapeMismatch(format!(
            "model {:?} vs empirical {:?}",
            model.shape(),
            empirical.values.shape()
        )));
    }
    let (n, _) = model.shape();
    Ok(DMatrix::from_fn(n, n, |x, y| {
        let dev = (empirical.values[(x, y)] - Complex::new(model[(x, y)], T::zero())).norm();
        let se = empirical.std_errors[(x, y)];
        if se > T::zero() {
            (dev / se).as_f64()
        } else if dev == T::zero() {
            0.0
        } else {
            f64::INFINITY
        }
    }))
}

fn score<T: Real>(
    model: &CovarianceModel<T>,
    empirical: &EmpiricalCovariance<T>,
) -> Result<(FitScore, usize, usize)> {
    let mut matrix = model_covariance_matrix(model, empirical.config.top)?;
    if empirical.config.output == OutputMode::RealPart {
        matrix.apply(|v| *v = *v * T::of(0.5));
    }
    let z = z_scores(&matrix, empirical)?;
    let mut stochastic = Vec::new();
    let mut mismatches = 0;
    for (zv, se) in z.iter().zip(empirical.std_errors.iter()) {
        if *se > T::zero() {
            stochastic.push(*zv);
        } else if *zv != 0.0 {
            mismatches += 1;
        }
    }
    let frac = |t: f64| {
        if stochastic.is_empty() {
            1.0
        } else {
            stochastic.iter().filter(|&&v| v <= t).count() as f64 / stochastic.len() as f64
        }
    };
    Ok((
        FitScore {
            variant: model.variant(),
            max_abs_z: z.iter().copied().fold(0.0, f64::max),
            frac_within_2: frac(2.0),
            frac_within_5: frac(5.0),
            total_sq_z: stochastic.iter().map(|v| v * v).sum(),
        },
        stochastic.len(),
        mismatches,
    ))
}

/// Compares an empirical covariance with the model. At levels `l ≥ 1` both
/// variants of the constant term are scored and the better fit is named.
pub fn verify<T: Real>(
    model: &CovarianceModel<T>,
    empirical: &EmpiricalCovariance<T>,
) -> Result<VerifyReport> {
    let cfg = &empirical.config;
    if cfg.prime != model.prime || cfg.level != model.level {
        return Err(Error::ShapeMismatch(format!(
            "model (p = {}, l = {}) vs empirical (p = {}, l = {})",
            model.prime, model.level, cfg.prime, cfg.level
        )));
    }
    let (own, stochastic, mismatches) = score(model, empirical)?;
    let (variant_scores, best_variant) = if model.level >= 1 {
        let scores = Variant::ALL
            .iter()
            .filter_map(|&v| model.with_variant(v).ok())
            .map(|m| score(&m, empirical).map(|s| s.0))
            .collect::<Result<Vec<_>>>()?;
        let best = scores
            .iter()
            .min_by(|a, b| a.total_sq_z.total_cmp(&b.total_sq_z))
            .map(|s| s.variant);
        (Some(scores), best)
    } else {
        (None, None)
    };
    Ok(VerifyReport {
        variant: model.variant,
        max_abs_z: own.max_abs_z,
        frac_within_2: own.frac_within_2,
        frac_within_5: own.frac_within_5,
        stochastic_entries: stochastic,
        exact_mismatches: mismatches,
        variant_scores,
        best_variant,
    })
}

/// Recovers `d̂` from each level-0 realization: forward transform, then divide
/// the `(k, j, b)` coefficient by `p^{α(j-1)}`.
pub fn recover_noise<T: Real>(batch: &Batch<T>, alpha: T) -> Result<Vec<WaveletCoefficients<T>>> {
    let cfg = &batch.config;
    if cfg.level != 0 {
        return Err(Error::param(format!(
            "noise recovery needs level 0, got {}",
            cfg.level
        )));
    }
    if cfg.output != OutputMode::Complex {
        return Err(Error::Precondition(
            "noise recovery needs complex realizations".into(),
        ));
    }
    check_alpha(alpha)?;
    let inv: Vec<T> = (0..=cfg.top)
        .map(|j| pow_scaled(cfg.prime.get(), 1 - i64::from(j), alpha))
        .collect();
    batch
        .realizations
        .par_iter()
        .map(|s| {
            let mut c = wavelets::forward(s)?;
            let idx: Vec<WaveletIndex> = c.indices().collect();
            for (w, d) in idx.iter().zip(c.details_mut()) {
                *d = *d * inv[w.j as usize];
            }
            Ok(c)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WhitenessReport {
    pub realizations: usize,
    pub coefficients: usize,
    /// `max |mean|d̂|² - 1| / SE` over coefficients.
    pub variance_max_z: f64,
    pub variance_within_3: usize,
    /// `max |mean d̂| / SE`.
    pub mean_max_z: f64,
    pub mean_within_3: usize,
    /// `max |mean conj(d̂_a) d̂_b| / SE` over pairs `a < b`.
    pub cross_max_z: f64,
    pub cross_within_3: usize,
    pub cross_pairs: usize,
    pub passed: bool,
}

/// Tests that the noise recovered from a level-0 batch is white: unit
/// variance, zero mean and zero cross moments, each within 3 SE.
pub fn whiteness_check<T: Real>(batch: &Batch<T>, alpha: T) -> Result<WhitenessReport> {
    let m = batch.len();
    if m < 2 {
        return Err(Error::param(
            "whiteness check needs at least 2 realizations",
        ));
    }
    let recovered = recover_noise(batch, alpha)?;
    let count = recovered[0].details().len();
    let column =
        |i: usize| -> Vec<Complex<T>> { recovered.iter().map(|c| c.details()[i]).collect() };
    let columns: Vec<Vec<Complex<T>>> = (0..count).map(column).collect();

    let z = |mo: &Moment<T>, target: Complex<T>| -> f64 {
        let dev = (mo.mean - target).norm();
        if mo.se > T::zero() {
            (dev / mo.se).as_f64()
        } else if dev == T::zero() {
            0.0
        } else {
            f64::INFINITY
        }
    };
    let one = Complex::new(T::one(), T::zero());
    let zero = Complex::new(T::zero(), T::zero());

    let var_z: Vec<f64> = columns
        .par_iter()
        .map(|col| {
            let sq: Vec<Complex<T>> = col
                .iter()
                .map(|d| Complex::new(d.norm_sqr(), T::zero()))
                .collect();
            z(&moment(&sq), one)
        })
        .collect();
    let mean_z: Vec<f64> = columns
        .par_iter()
        .map(|col| z(&moment(col), zero))
        .collect();
    let cross_z: Vec<f64> = (0..count)
        .into_par_iter()
        .flat_map_iter(|a| {
            let columns = &columns;
            (a + 1..count).map(move |b| {
                let prod: Vec<Complex<T>> = columns[a]
                    .iter()
                    .zip(&columns[b])
                    .map(|(u, v)| u.conj() * v)
                    .collect();
                z(&moment(&prod), zero)
            })
        })
        .collect();

    let max = |v: &[f64]| v.iter().copied().fold(0.0, f64::max);
    let within = |v: &[f64]| v.iter().filter(|&&x| x <= 3.0).count();
    let report = WhitenessReport {
        realizations: m,
        coefficients: count,
        variance_max_z: max(&var_z),
        variance_within_3: within(&var_z),
        mean_max_z: max(&mean_z),
        mean_within_3: within(&mean_z),
        cross_max_z: max(&cross_z),
        cross_within_3: within(&cross_z),
        cross_pairs: cross_z.len(),
        passed: false,
    };
    Ok(WhitenessReport {
        passed: report.variance_within_3 == count
            && report.mean_within_3 == count
            && report.cross_within_3 == report.cross_pairs,
        ..report
    })
}

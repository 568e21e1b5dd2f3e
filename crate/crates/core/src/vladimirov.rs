//! The discretized Vladimirov operator
//! `T f(x) = c·Σ_y (f(x) - f(y)) / |η^{-1}(x) - η^{-1}(y)|_p^{1+α}`
//! with `c = (p^α - 1)/(1 - p^{-1-α})`, on windows of `p^J` samples.
//!
//! The sum over all of `N` cannot be taken on measured data, so two modes are
//! offered. `FiniteSection` sums over the window only. `ZeroExtended` treats the
//! input as vanishing outside the window; the window is a single ball, so the
//! missing part of the sum is `c·f(x)·Tail(J)` with the geometric shell sum
//! `Tail(J) = (1 - p^{-1})·p^{-(J+1)α} / (1 - p^{-α})`.

use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::padic::{self, Prime};
use crate::scalar::{pow_scaled, Real};
use crate::wavelets::{self, SampledSeries};

pub const DEFAULT_MATRIX_CAP: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OperatorMode {
    FiniteSection,
    ZeroExtended,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorConfig<T> {
    prime: Prime,
    alpha: T,
    mode: OperatorMode,
    top: u32,
}

impl<T: Real> OperatorConfig<T> {
    /// Operator on windows of `len` samples; `len` must be a power of `p`.
    pub fn new(prime: Prime, alpha: T, mode: OperatorMode, len: usize) -> Result<Self> {
        check_alpha(alpha)?;
        let top = prime.log_exact(len).ok_or_else(|| {
            Error::length(len, format!("window length must be a power of {prime}"))
        })?;
        Ok(OperatorConfig {
            prime,
            alpha,
            mode,
            top,
        })
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn mode(&self) -> OperatorMode {
        self.mode
    }

    /// `J`, with window length `p^J`.
    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn len(&self) -> usize {
        self.prime
            .checked_pow(self.top)
            .expect("validated at construction")
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn constant(&self) -> T {
        normalization_constant(self.prime, self.alpha).expect("alpha validated")
    }

    /// `c·Tail(J)` in zero-extended mode, 0 in finite-section mode.
    pub fn diagonal_shift(&self) -> T {
        match self.mode {
            OperatorMode::FiniteSection => T::zero(),
            OperatorMode::ZeroExtended => {
                self.constant() * tail_sum(self.prime, self.alpha, self.top)
            }
        }
    }

    /// Kernel `p^{-e(1+α)}` at distance `p^e`.
    fn kernel(&self, e: u32) -> T {
        pow_scaled(self.prime.get(), i64::from(e), -(T::one() + self.alpha))
    }

    fn check_len(&self, series: &SampledSeries<T>) -> Result<()> {
        if series.len() != self.len() {
            return Err(Error::length(
                series.len(),
                format!("operator expects {} samples", self.len()),
            ));
        }
        if series.prime() != self.prime {
            return Err(Error::param(format!(
                "series prime {} differs from operator prime {}",
                series.prime(),
                self.prime
            )));
        }
        Ok(())
    }
}

fn check_alpha<T: Real>(alpha: T) -> Result<()> {
    if alpha > T::zero() && alpha.is_finite() {
        Ok(())
    } else {
        Err(Error::param(format!("alpha must be positive, got {alpha}")))
    }
}

/// `(p^α - 1)/(1 - p^{-1-α})`.
pub fn normalization_constant<T: Real>(prime: Prime, alpha: T) -> Result<T> {
    check_alpha(alpha)?;
    let p = T::of(f64::from(prime.get()));
    Ok((p.powf(alpha) - T::one()) / (T::one() - p.powf(-T::one() - alpha)))
}

/// `Σ_{m>J} (p^m - p^{m-1})·p^{-m(1+α)}` in closed form.
pub fn tail_sum<T: Real>(prime: Prime, alpha: T, top: u32) -> T {
    let p = T::of(f64::from(prime.get()));
    (T::one() - p.recip()) * pow_scaled(prime.get(), i64::from(top) + 1, -alpha)
        / (T::one() - p.powf(-alpha))
}

/// `p^{α(1-j)}`, the eigenvalue of the zero-extended operator on a scale-`j`
/// wavelet supported inside the window.
pub fn wavelet_eigenvalue<T: Real>(prime: Prime, alpha: T, j: u32) -> T {
    pow_scaled(prime.get(), 1 - i64::from(j), alpha)
}

/// Applies the operator by kernel summation.
///
/// The sum over `y` is grouped into shells around `x`: the shell at distance
/// `p^e` is the block of `p^e` indices containing `x` minus its sub-block of
/// `p^{e-1}`, so block sums at every scale give each output in `O(J)`.
pub fn apply_direct<T: Real>(
    series: &SampledSeries<T>,
    cfg: &OperatorConfig<T>,
) -> Result<SampledSeries<T>> {
    cfg.check_len(series)?;
    let p = cfg.prime.as_usize();
    let top = cfg.top as usize;
    let c = cfg.constant();

    // block_sums[e][b] = Σ f over [b·p^e, (b+1)·p^e)
    let mut block_sums: Vec<Vec<Complex<T>>> = Vec::with_capacity(top + 1);
    block_sums.push(series.samples().to_vec());
    for e in 1..=top {
        let next = block_sums[e - 1]
            .chunks_exact(p)
            .map(|ch| crate::scalar::pairwise_sum(ch))
            .collect();
        block_sums.push(next);
    }
    let kernels: Vec<T> = (0..=cfg.top).map(|e| cfg.kernel(e)).collect();
    // Σ_{y≠x} K(x,y), identical for every x
    let row_weight: T = (1..=top)
        .map(|e| kernels[e] * T::of_usize(p.pow(e as u32) - p.pow(e as u32 - 1)))
        .fold(T::zero(), |a, b| a + b);
    let shift = cfg.diagonal_shift();

    let out: Vec<Complex<T>> = (0..series.len())
        .into_par_iter()
        .map(|x| {
            let fx = series.samples()[x];
            let mut coupled = Complex::new(T::zero(), T::zero());
            let mut inner = fx;
            let mut b = x;
            for e in 1..=top {
                b /= p;
                let ball = block_sums[e][b];
                coupled = coupled + (ball - inner) * kernels[e];
                inner = ball;
            }
            (fx * row_weight - coupled) * c + fx * shift
        })
        .collect();
    Ok(series.with_samples(out))
}

/// Applies the zero-extended operator through the wavelet eigenbasis.
///
/// Only mean-zero windows are accepted: the window's constant component is not
/// a finite combination of inside-window wavelets, and its image under the
/// zero-extended operator leaks outside the window.
pub fn apply_spectral<T: Real>(
    series: &SampledSeries<T>,
    cfg: &OperatorConfig<T>,
) -> Result<SampledSeries<T>> {
    cfg.check_len(series)?;
    let tol = T::of(1e-10).max(T::epsilon() * T::of(64.0));
    let mean = series.mean().norm();
    if mean > tol * series.rms() {
        return Err(Error::Precondition(format!(
            "spectral mode needs a mean-zero window (|mean| = {mean}); the constant \
             component is not an inside-window wavelet and has no eigenvalue there"
        )));
    }
    let mut coeffs = wavelets::forward(series)?;
    let eig: Vec<T> = (0..=cfg.top)
        .map(|j| wavelet_eigenvalue(cfg.prime, cfg.alpha, j))
        .collect();
    let idx: Vec<_> = coeffs.indices().collect();
    for (w, d) in idx.iter().zip(coeffs.details_mut()) {
        *d = *d * eig[w.j as usize];
    }
    coeffs.set_mean(Complex::new(T::zero(), T::zero()));
    let out = wavelets::inverse(&coeffs)?;
    Ok(series.with_samples(out.into_samples()))
}

pub fn build_matrix<T: Real>(cfg: &OperatorConfig<T>) -> Result<DMatrix<T>> {
    build_matrix_capped(cfg, DEFAULT_MATRIX_CAP)
}

/// Dense `N×N` materialization, `M[x][y] = -c·K(x,y)` off the diagonal.
pub fn build_matrix_capped<T: Real>(cfg: &OperatorConfig<T>, cap: usize) -> Result<DMatrix<T>> {
    let n = cfg.len();
    if n > cap {
        return Err(Error::Resource(format!(
            "dense operator of size {n} exceeds cap {cap}"
        )));
    }
    let c = cfg.constant();
    let p = cfg.prime.as_u64();
    let kernels: Vec<T> = (0..=cfg.top).map(|e| cfg.kernel(e)).collect();
    let mut m = DMatrix::from_element(n, n, T::zero());
    for x in 0..n {
        let mut row = T::zero();
        for y in 0..n {
            if let Some(e) = padic::distance_exponent(x as u64, y as u64, p) {
                let k = kernels[e as usize];
                m[(x, y)] = -(c * k);
                row = row + k;
            }
        }
        m[(x, x)] = c * row + cfg.diagonal_shift();
    }
    Ok(m)
}

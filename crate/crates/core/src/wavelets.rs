//! Haar and p-adic wavelet analysis on finite windows.
//!
//! A window at level `l` holds `p^{J-l}` samples, sample `m` being the mean of
//! a function over the ball of radius `p^l` made of naturals
//! `[m·p^l, (m+1)·p^l)`. Wavelets `ψ_{k;j,b}` with `l < j ≤ J` are constant on
//! those balls, so they are represented exactly by their samples. The sampled
//! family is normalized to be orthonormal under counting measure, i.e. a
//! level-`l` sample of the wavelet equals `p^{l/2}·ψ_{k;j,b}`.

use num_complex::Complex;
use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};
use crate::padic::{self, PAdicDigits, Prime, UltrametricIndex};
use crate::scalar::{root_of_unity, Real};

/// Samples of a function at a discretization level.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledSeries<T> {
    prime: Prime,
    level: u32,
    samples: Vec<Complex<T>>,
}

impl<T: Real> SampledSeries<T> {
    pub fn new(prime: Prime, level: u32, samples: Vec<Complex<T>>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::length(0, "a series needs at least one sample"));
        }
        Ok(SampledSeries {
            prime,
            level,
            samples,
        })
    }

    pub fn from_real(prime: Prime, level: u32, samples: &[T]) -> Result<Self> {
        Self::new(
            prime,
            level,
            samples
                .iter()
                .map(|&x| Complex::new(x, T::zero()))
                .collect(),
        )
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex<T>] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex<T>> {
        self.samples
    }

    /// `J - l` when the length is an exact power of `p`.
    pub fn window_exponent(&self) -> Result<u32> {
        self.prime.log_exact(self.len()).ok_or_else(|| {
            Error::length(
                self.len(),
                format!("window length must be a power of {}", self.prime),
            )
        })
    }

    pub fn mean(&self) -> Complex<T> {
        crate::scalar::pairwise_sum(&self.samples) / T::of_usize(self.len())
    }

    pub fn rms(&self) -> T {
        let sq: Vec<T> = self.samples.iter().map(|z| z.norm_sqr()).collect();
        (crate::scalar::pairwise_sum_real(&sq) / T::of_usize(self.len())).sqrt()
    }

    pub(crate) fn with_samples(&self, samples: Vec<Complex<T>>) -> Self {
        SampledSeries {
            prime: self.prime,
            level: self.level,
            samples,
        }
    }
}

/// Identifies `ψ_{k;j,b}`: its support ball at scale `j` covers level-`l`
/// samples `[b·p^{j-l}, (b+1)·p^{j-l})`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WaveletIndex {
    pub k: u32,
    pub j: u32,
    pub ball: usize,
}

impl WaveletIndex {
    pub fn new(k: u32, j: u32, ball: usize) -> Self {
        WaveletIndex { k, j, ball }
    }

    pub fn is_valid(&self, prime: Prime, top: u32, level: u32) -> bool {
        let balls = prime.checked_pow(top.saturating_sub(self.j));
        self.k >= 1
            && self.k < prime.get()
            && self.j > level
            && self.j <= top
            && balls.is_some_and(|n| self.ball < n)
    }

    /// Whether level-`l` sample `m` lies in the support ball.
    pub fn contains(&self, prime: Prime, level: u32, m: usize) -> bool {
        m / ball_size(prime, self.j - level) == self.ball
    }
}

fn ball_size(prime: Prime, e: u32) -> usize {
    prime.checked_pow(e).expect("window size fits in usize")
}

/// Orthonormal expansion of a window: the mean coefficient against
/// `p^{-(J-l)/2}·1` plus one detail coefficient per wavelet.
///
/// Details are stored by scale ascending, then ball, then `k`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletCoefficients<T> {
    prime: Prime,
    top: u32,
    level: u32,
    mean: Complex<T>,
    details: Vec<Complex<T>>,
}

impl<T: Real> WaveletCoefficients<T> {
    pub fn from_parts(
        prime: Prime,
        top: u32,
        level: u32,
        mean: Complex<T>,
        details: Vec<Complex<T>>,
    ) -> Result<Self> {
        if top < level {
            return Err(Error::param(format!("J = {top} is below level {level}")));
        }
        let n = prime
            .checked_pow(top - level)
            .ok_or_else(|| Error::Resource(format!("{prime}^{} overflows", top - level)))?;
        if details.len() != n - 1 {
            return Err(Error::length(
                details.len(),
                format!("expected {} detail coefficients", n - 1),
            ));
        }
        Ok(WaveletCoefficients {
            prime,
            top,
            level,
            mean,
            details,
        })
    }

    pub fn zeros(prime: Prime, top: u32, level: u32) -> Result<Self> {
        let n = prime
            .checked_pow(top.saturating_sub(level))
            .ok_or_else(|| Error::Resource("window too large".into()))?;
        Self::from_parts(
            prime,
            top,
            level,
            Complex::zero(),
            vec![Complex::zero(); n - 1],
        )
    }

    pub fn prime(&self) -> Prime {
        self.prime
    }

    pub fn top(&self) -> u32 {
        self.top
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn window_len(&self) -> usize {
        self.details.len() + 1
    }

    pub fn mean(&self) -> Complex<T> {
        self.mean
    }

    pub fn set_mean(&mut self, c: Complex<T>) {
        self.mean = c;
    }

    pub fn details(&self) -> &[Complex<T>] {
        &self.details
    }

    pub fn details_mut(&mut self) -> &mut [Complex<T>] {
        &mut self.details
    }

    /// Storage slot of a wavelet, if it belongs to this window.
    pub fn position(&self, w: &WaveletIndex) -> Option<usize> {
        if !w.is_valid(self.prime, self.top, self.level) {
            return None;
        }
        let p = self.prime.as_usize();
        let n = self.window_len();
        let s = w.j - self.level;
        let offset = n - n / ball_size(self.prime, s - 1);
        Some(offset + w.ball * (p - 1) + (w.k as usize - 1))
    }

    pub fn get(&self, w: &WaveletIndex) -> Option<Complex<T>> {
        self.position(w).map(|i| self.details[i])
    }

    pub fn set(&mut self, w: &WaveletIndex, c: Complex<T>) -> Result<()> {
        let i = self
            .position(w)
            .ok_or_else(|| Error::param(format!("{w:?} is not a wavelet of this window")))?;
        self.details[i] = c;
        Ok(())
    }

    /// Wavelet indices in storage order.
    pub fn indices(&self) -> impl Iterator<Item = WaveletIndex> {
        wavelet_indices(self.prime, self.top, self.level)
    }

    pub fn iter(&self) -> impl Iterator<Item = (WaveletIndex, Complex<T>)> + '_ {
        self.indices().zip(self.details.iter().copied())
    }

    /// `|c₀|² + Σ|c|²`.
    pub fn energy(&self) -> T {
        self.mean.norm_sqr() + self.details.iter().map(|c| c.norm_sqr()).sum::<T>()
    }
}

/// All wavelet indices of a `(p, J, l)` window in storage order.
pub fn wavelet_indices(prime: Prime, top: u32, level: u32) -> impl Iterator<Item = WaveletIndex> {
    let p = prime.get();
    (level + 1..=top).flat_map(move |j| {
        let balls = ball_size(prime, top - j);
        (0..balls).flat_map(move |ball| (1..p).map(move |k| WaveletIndex::new(k, j, ball)))
    })
}

/// Discrete Haar wavelet `2^{-j/2} ψ(2^{-j}x - n)` on the integers.
pub fn haar_eval<T: Real>(j: i32, n: i64, x: i64) -> Result<T> {
    if j < 1 {
        return Err(Error::param(format!("Haar scale must be >= 1, got {j}")));
    }
    let width = 1i64 << j;
    let start = n * width;
    let amp = T::of(2f64.powf(-f64::from(j) / 2.0));
    Ok(if x < start || x >= start + width {
        T::zero()
    } else if x < start + width / 2 {
        amp
    } else {
        -amp
    })
}

fn block_mean<T: Real>(samples: &[Complex<T>], block: usize) -> Vec<Complex<T>> {
    let inv = T::one() / T::of_usize(block);
    samples
        .chunks_exact(block)
        .map(|c| crate::scalar::pairwise_sum(c) * inv)
        .collect()
}

fn broadcast_block_mean<T: Real>(samples: &[Complex<T>], block: usize) -> Vec<Complex<T>> {
    block_mean(samples, block)
        .into_iter()
        .flat_map(|m| std::iter::repeat_n(m, block))
        .collect()
}

/// Projection onto `V_j` of `l²(Z)`: each sample becomes the mean of its
/// dyadic block `[n·2^j, (n+1)·2^j)`.
pub fn haar_project<T: Real>(series: &SampledSeries<T>, j: u32) -> Result<SampledSeries<T>> {
    let block = 1usize
        .checked_shl(j)
        .ok_or_else(|| Error::param(format!("scale {j} too large")))?;
    if !series.len().is_multiple_of(block) {
        return Err(Error::length(
            series.len(),
            format!("not a multiple of 2^{j}"),
        ));
    }
    Ok(series.with_samples(broadcast_block_mean(series.samples(), block)))
}

/// Projection averaging each sample over its p-adic neighbours
/// `η(η^{-1}(x) + l)`, `l ∈ p^{-j}Z_p/Z_p`. Those neighbours are the block of
/// `p^j` consecutive indices containing `x`.
pub fn monna_project<T: Real>(series: &SampledSeries<T>, j: u32) -> Result<SampledSeries<T>> {
    let block = series
        .prime()
        .checked_pow(j)
        .ok_or_else(|| Error::param(format!("scale {j} too large")))?;
    if !series.len().is_multiple_of(block) {
        return Err(Error::length(
            series.len(),
            format!("not a multiple of {}^{j}", series.prime()),
        ));
    }
    Ok(series.with_samples(broadcast_block_mean(series.samples(), block)))
}

/// Coarsens a level-`l` series to level `target`: output sample `m` is the
/// mean of input samples `[m·p^{target-l}, (m+1)·p^{target-l})`.
pub fn pi_project<T: Real>(series: &SampledSeries<T>, target: u32) -> Result<SampledSeries<T>> {
    if target <= series.level() {
        return Err(Error::param(format!(
            "target level {target} must exceed current level {}",
            series.level()
        )));
    }
    let block = series
        .prime()
        .checked_pow(target - series.level())
        .ok_or_else(|| Error::param("level gap too large"))?;
    if !series.len().is_multiple_of(block) {
        return Err(Error::length(
            series.len(),
            format!(
                "not divisible by {}^{}",
                series.prime(),
                target - series.level()
            ),
        ));
    }
    SampledSeries::new(series.prime(), target, block_mean(series.samples(), block))
}

/// `ψ_{k;j,n}(x) = p^{-j/2} χ(p^{-1}k(p^j x - n)) Ω(|p^j x - n|_p)` at a natural
/// `x`, with `n` the fraction of the support ball index `b`. Evaluated in exact
/// rational arithmetic; zero off the support ball.
pub fn padic_wavelet_eval<T: Real>(w: &WaveletIndex, x: &UltrametricIndex, top: u32) -> Complex<T> {
    let prime = x.prime();
    debug_assert!(w.is_valid(prime, top, 0), "{w:?} invalid for J = {top}");
    let p = BigRational::from_integer(prime.get().into());
    let scale = num_traits::pow(p.clone(), w.j as usize);
    let center = UltrametricIndex::new(prime, w.ball)
        .to_fraction()
        .to_rational();
    let shifted = scale * x.to_fraction().to_rational() - center;
    if !shifted.is_integer() {
        return Complex::zero();
    }
    let arg = shifted * BigRational::from_integer(w.k.into()) / p;
    let phase = PAdicDigits::from_rational(prime, &arg).expect("support ball point is nonnegative");
    let amp = T::of(f64::from(prime.get()).powf(-f64::from(w.j) / 2.0));
    padic::character::<T>(&phase) * amp
}

/// Counting-measure orthonormal sample of `ψ_w` at level-`l` sample `m`:
/// `p^{-(j-l)/2}·exp(2πi·k·d/p)` with `d` the sub-ball digit of `m`.
pub fn wavelet_sample<T: Real>(prime: Prime, level: u32, w: &WaveletIndex, m: usize) -> Complex<T> {
    if !w.contains(prime, level, m) {
        return Complex::zero();
    }
    let s = w.j - level;
    let digit = (m / ball_size(prime, s - 1)) % prime.as_usize();
    let amp = T::of(f64::from(prime.get()).powf(-f64::from(s) / 2.0));
    root_of_unity::<T>(u64::from(w.k) * digit as u64, prime.as_u64()) * amp
}

fn twiddles<T: Real>(prime: Prime) -> Vec<Complex<T>> {
    (0..prime.as_u64())
        .map(|m| root_of_unity(m, prime.as_u64()))
        .collect()
}

/// Forward orthonormal transform by the ball-by-ball butterfly: at each scale
/// every ball's `p` child scaling coefficients go through a unitary `p`-point
/// DFT; the zero frequency is the parent scaling coefficient and the rest are
/// the ball's detail coefficients.
pub fn forward<T: Real>(window: &SampledSeries<T>) -> Result<WaveletCoefficients<T>> {
    let span = window.window_exponent()?;
    let prime = window.prime();
    let p = prime.as_usize();
    let n = window.len();
    let tw = twiddles::<T>(prime);
    let inv_sqrt_p = T::one() / T::of_usize(p).sqrt();

    let mut details = vec![Complex::zero(); n - 1];
    let mut scaling = window.samples().to_vec();
    let mut offset = 0;
    for _ in 1..=span {
        let balls = scaling.len() / p;
        let mut next = Vec::with_capacity(balls);
        for (b, children) in scaling.chunks_exact(p).enumerate() {
            next.push(crate::scalar::pairwise_sum(children) * inv_sqrt_p);
            for k in 1..p {
                let acc = children
                    .iter()
                    .enumerate()
                    .fold(Complex::zero(), |acc, (t, &c)| {
                        acc + tw[(k * t) % p].conj() * c
                    });
                details[offset + b * (p - 1) + k - 1] = acc * inv_sqrt_p;
            }
        }
        offset += balls * (p - 1);
        scaling = next;
    }
    WaveletCoefficients::from_parts(
        prime,
        window.level() + span,
        window.level(),
        scaling[0],
        details,
    )
}

/// Inverse of [`forward`].
pub fn inverse<T: Real>(coeffs: &WaveletCoefficients<T>) -> Result<SampledSeries<T>> {
    let prime = coeffs.prime();
    let p = prime.as_usize();
    let n = coeffs.window_len();
    let tw = twiddles::<T>(prime);
    let inv_sqrt_p = T::one() / T::of_usize(p).sqrt();

    let mut scaling = vec![coeffs.mean()];
    let mut offset = n - 1;
    while scaling.len() < n {
        let balls = scaling.len();
        offset -= balls * (p - 1);
        let mut next = vec![Complex::zero(); balls * p];
        for (b, &parent) in scaling.iter().enumerate() {
            let d = &coeffs.details()[offset + b * (p - 1)..offset + (b + 1) * (p - 1)];
            for t in 0..p {
                let acc = d
                    .iter()
                    .enumerate()
                    .fold(parent, |acc, (km1, &c)| acc + tw[((km1 + 1) * t) % p] * c);
                next[b * p + t] = acc * inv_sqrt_p;
            }
        }
        scaling = next;
    }
    SampledSeries::new(prime, coeffs.level(), scaling)
}

/// Dense `O(N²)` reference implementations of the transform.
pub mod dense {
    use super::*;

    /// The orthonormal basis sampled on the window: normalized indicator first,
    /// then the wavelets in storage order.
    pub fn basis<T: Real>(prime: Prime, top: u32, level: u32) -> Vec<Vec<Complex<T>>> {
        let n = ball_size(prime, top - level);
        let c0 = T::one() / T::of_usize(n).sqrt();
        let mut out = vec![vec![Complex::new(c0, T::zero()); n]];
        out.extend(wavelet_indices(prime, top, level).map(|w| {
            (0..n)
                .map(|m| wavelet_sample(prime, level, &w, m))
                .collect()
        }));
        out
    }

    fn inner<T: Real>(u: &[Complex<T>], v: &[Complex<T>]) -> Complex<T> {
        u.iter()
            .zip(v)
            .fold(Complex::zero(), |acc, (a, b)| acc + a.conj() * b)
    }

    pub fn forward<T: Real>(window: &SampledSeries<T>) -> Result<WaveletCoefficients<T>> {
        let span = window.window_exponent()?;
        let top = window.level() + span;
        let b = basis::<T>(window.prime(), top, window.level());
        let mut coeffs = b.iter().map(|v| inner(v, window.samples()));
        let mean = coeffs.next().expect("basis is nonempty");
        WaveletCoefficients::from_parts(window.prime(), top, window.level(), mean, coeffs.collect())
    }

    pub fn inverse<T: Real>(coeffs: &WaveletCoefficients<T>) -> Result<SampledSeries<T>> {
        let b = basis::<T>(coeffs.prime(), coeffs.top(), coeffs.level());
        let n = coeffs.window_len();
        let mut out = vec![Complex::zero(); n];
        let all = std::iter::once(coeffs.mean()).chain(coeffs.details().iter().copied());
        for (v, c) in b.iter().zip(all) {
            for (o, &x) in out.iter_mut().zip(v) {
                *o = *o + x * c;
            }
        }
        SampledSeries::new(coeffs.prime(), coeffs.level(), out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> Prime {
        Prime::new(n).unwrap()
    }

    fn real_series(pr: u32, level: u32, xs: &[f64]) -> SampledSeries<f64> {
        SampledSeries::from_real(p(pr), level, xs).unwrap()
    }

    fn re(s: &SampledSeries<f64>) -> Vec<f64> {
        s.samples().iter().map(|z| z.re).collect()
    }

    #[test]
    fn haar_eval_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        assert_eq!(haar_eval::<f64>(1, 0, 0).unwrap(), h);
        assert_eq!(haar_eval::<f64>(1, 0, 1).unwrap(), -h);
        assert_eq!(haar_eval::<f64>(1, 0, 2).unwrap(), 0.0);
        assert!(haar_eval::<f64>(0, 0, 0).is_err());
    }

    #[test]
    fn haar_project_examples() {
        let s = real_series(2, 0, &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(haar_project(&s, 0).unwrap(), s);
        assert_eq!(re(&haar_project(&s, 1).unwrap()), vec![2.0, 2.0, 6.0, 6.0]);
        assert_eq!(re(&haar_project(&s, 2).unwrap()), vec![4.0; 4]);
        assert!(matches!(
            haar_project(&s, 3),
            Err(Error::InvalidLength { .. })
        ));
    }

    /// Literal neighbour sum over `p^{-j}Z_p/Z_p` using group addition.
    fn monna_project_oracle(xs: &[f64], pr: u64, j: u32) -> Vec<f64> {
        let size = pr.pow(j);
        (0..xs.len() as u64)
            .map(|x| {
                (0..size)
                    .map(|l| xs[padic::group_add_u64(x, l, pr) as usize])
                    .sum::<f64>()
                    / size as f64
            })
            .collect()
    }

    #[test]
    fn monna_project_examples() {
        let s = real_series(2, 0, &[1.0, 3.0, 5.0, 7.0]);
        assert_eq!(
            monna_project_oracle(&[1.0, 3.0, 5.0, 7.0], 2, 1),
            vec![2.0, 2.0, 6.0, 6.0]
        );
        assert_eq!(re(&monna_project(&s, 1).unwrap()), vec![2.0, 2.0, 6.0, 6.0]);
        let xs: Vec<f64> = (0..9).map(f64::from).collect();
        let s = real_series(3, 0, &xs);
        let expected = vec![1.0, 1.0, 1.0, 4.0, 4.0, 4.0, 7.0, 7.0, 7.0];
        assert_eq!(monna_project_oracle(&xs, 3, 1), expected);
        assert_eq!(re(&monna_project(&s, 1).unwrap()), expected);
        assert_eq!(monna_project(&s, 0).unwrap(), s);
    }

    #[test]
    fn monna_project_matches_group_add_oracle() {
        for pr in [2u32, 3, 5] {
            let n = (pr as usize).pow(3);
            let xs: Vec<f64> = (0..n).map(|i| ((i * 37 + 11) % 17) as f64 - 8.0).collect();
            let s = real_series(pr, 0, &xs);
            for j in 0..=3 {
                let got = re(&monna_project(&s, j).unwrap());
                let want = monna_project_oracle(&xs, pr as u64, j);
                for (a, b) in got.iter().zip(&want) {
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn pi_project_examples() {
        let s = real_series(2, 0, &[2.0, 4.0, 10.0, 14.0]);
        let out = pi_project(&s, 1).unwrap();
        assert_eq!(out.level(), 1);
        assert_eq!(re(&out), vec![3.0, 12.0]);

        let s = real_series(2, 0, &[1.0, 1.0, 1.0, 1.0, 5.0, 5.0, 5.0, 5.0]);
        assert_eq!(re(&pi_project(&s, 2).unwrap()), vec![1.0, 5.0]);

        let s = real_series(3, 0, &[4.5; 9]);
        assert_eq!(re(&pi_project(&s, 1).unwrap()), vec![4.5; 3]);

        assert!(matches!(pi_project(&s, 0), Err(Error::InvalidParameter(_))));
        let s = real_series(2, 1, &[1.0, 2.0, 3.0]);
        assert!(matches!(
            pi_project(&s, 2),
            Err(Error::InvalidLength { .. })
        ));
    }

    #[test]
    fn padic_wavelet_eval_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let w = WaveletIndex::new(1, 1, 0);
        let at = |x: u64| padic_wavelet_eval::<f64>(&w, &UltrametricIndex::new(p(2), x), 3);
        assert!((at(0) - Complex::new(h, 0.0)).norm() < 1e-15);
        assert!((at(1) - Complex::new(-h, 0.0)).norm() < 1e-15);
        assert_eq!(at(2), Complex::zero());
    }

    #[test]
    fn sampled_wavelet_matches_exact_evaluation() {
        for (pr, top, level) in [
            (2u32, 4u32, 0u32),
            (3, 3, 0),
            (3, 3, 1),
            (5, 2, 1),
            (2, 5, 2),
        ] {
            let prime = p(pr);
            let scale = f64::from(pr).powf(f64::from(level) / 2.0);
            let ball = ball_size(prime, level);
            for w in wavelet_indices(prime, top, level) {
                for m in 0..ball_size(prime, top - level) {
                    let sample: Complex<f64> = wavelet_sample(prime, level, &w, m);
                    // the wavelet is constant on the level-l ball of naturals
                    for x in m * ball..(m + 1) * ball {
                        let exact: Complex<f64> =
                            padic_wavelet_eval(&w, &UltrametricIndex::new(prime, x as u64), top);
                        assert!((exact * scale - sample).norm() < 1e-13, "{w:?} {m} {x}");
                    }
                }
            }
        }
    }

    #[test]
    fn forward_examples() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let delta = real_series(2, 0, &[1.0, 0.0]);
        let c = forward(&delta).unwrap();
        assert!((c.mean() - Complex::new(h, 0.0)).norm() < 1e-15);
        assert!(
            (c.get(&WaveletIndex::new(1, 1, 0)).unwrap() - Complex::new(h, 0.0)).norm() < 1e-15
        );

        let constant = SampledSeries::new(p(3), 0, vec![Complex::new(2.0, -1.0); 27]).unwrap();
        let c = forward(&constant).unwrap();
        assert!(c.details().iter().all(|d| d.norm() < 1e-14));
        let expected = Complex::new(2.0, -1.0) * 27f64.sqrt();
        assert!((c.mean() - expected).norm() < 1e-13);
    }

    #[test]
    fn forward_rejects_non_power_windows() {
        let s = real_series(3, 0, &[1.0; 10]);
        assert!(matches!(forward(&s), Err(Error::InvalidLength { .. })));
    }

    #[test]
    fn butterfly_matches_dense_reference() {
        for (pr, top, level) in [(2u32, 5u32, 0u32), (3, 3, 0), (5, 3, 1), (7, 2, 0)] {
            let n = (pr as usize).pow(top - level);
            let xs: Vec<Complex<f64>> = (0..n)
                .map(|i| Complex::new((i as f64 * 0.7).sin(), (i as f64 * 1.3).cos()))
                .collect();
            let s = SampledSeries::new(p(pr), level, xs).unwrap();
            let fast = forward(&s).unwrap();
            let slow = dense::forward(&s).unwrap();
            assert!((fast.mean() - slow.mean()).norm() < 1e-12);
            for (a, b) in fast.details().iter().zip(slow.details()) {
                assert!((a - b).norm() < 1e-12);
            }
            let back = dense::inverse(&fast).unwrap();
            for (a, b) in back.samples().iter().zip(s.samples()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn coefficient_positions_follow_storage_order() {
        let c = WaveletCoefficients::<f64>::zeros(p(3), 3, 0).unwrap();
        for (i, w) in c.indices().enumerate() {
            assert_eq!(c.position(&w), Some(i));
        }
        assert_eq!(c.indices().count(), 26);
        assert_eq!(c.position(&WaveletIndex::new(0, 1, 0)), None);
        assert_eq!(c.position(&WaveletIndex::new(1, 4, 0)), None);
        assert_eq!(c.position(&WaveletIndex::new(1, 2, 3)), None);
    }

    #[test]
    fn f32_round_trip() {
        let xs: Vec<f32> = (0..81).map(|i| (i as f32 * 0.37).sin()).collect();
        let s = SampledSeries::from_real(p(3), 0, &xs).unwrap();
        let back = inverse(&forward(&s).unwrap()).unwrap();
        for (a, b) in back.samples().iter().zip(s.samples()) {
            assert!((a - b).norm() < 1e-5);
        }
    }
}

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive};

/// Floating point scalar the numeric modules are generic over: `f32` or `f64`.
pub trait Real:
    Float + FloatConst + FromPrimitive + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; exact for `f64`.
    fn of(x: f64) -> Self {
        <Self as FromPrimitive>::from_f64(x).expect("finite f64 converts to any Real")
    }

    fn of_usize(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize converts to any Real")
    }

    fn as_f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("Real converts to f64")
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `exp(2πi·num/den)`, exact on quarter turns.
pub fn root_of_unity<T: Real>(num: u64, den: u64) -> Complex<T> {
    debug_assert!(den > 0);
    let num = num % den;
    if (4 * num).is_multiple_of(den) {
        return match 4 * num / den {
            0 => Complex::new(T::one(), T::zero()),
            1 => Complex::new(T::zero(), T::one()),
            2 => Complex::new(-T::one(), T::zero()),
            _ => Complex::new(T::zero(), -T::one()),
        };
    }
    let phase = 2.0 * std::f64::consts::PI * (num as f64) / (den as f64);
    Complex::new(T::of(phase.cos()), T::of(phase.sin()))
}

/// Integer power `p^e` as a real, `e` may be negative.
pub fn powi<T: Real>(p: u32, e: i64) -> T {
    T::of(f64::from(p).powi(e as i32))
}

/// `p^(e·s)` for a real exponent factor `s`, computed as `exp(e·s·ln p)` so the
/// integer exponent stays exact until the last step.
pub fn pow_scaled<T: Real>(p: u32, e: i64, s: T) -> T {
    (T::of(e as f64) * s * T::of(f64::from(p).ln())).exp()
}

/// Pairwise (cascade) summation with a fixed tree shape.
pub fn pairwise_sum<T: Real>(xs: &[Complex<T>]) -> Complex<T> {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs
            .iter()
            .fold(Complex::new(T::zero(), T::zero()), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Real-valued counterpart of [`pairwise_sum`].
pub fn pairwise_sum_real<T: Real>(xs: &[T]) -> T {
    const LEAF: usize = 16;
    if xs.len() <= LEAF {
        return xs.iter().fold(T::zero(), |acc, &x| acc + x);
    }
    let mid = xs.len() / 2;
    pairwise_sum_real(&xs[..mid]) + pairwise_sum_real(&xs[mid..])
}

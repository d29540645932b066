use num_complex::Complex64;

/// Node state type: `f64` for real networks, `Complex64` for complex ones.
///
/// Only the handful of operations the network map needs are exposed, so the
/// iteration kernels can be written once for both modes.
pub trait Scalar: Copy + Send + Sync + PartialEq + std::fmt::Debug + 'static {
    const ZERO: Self;

    /// `self + weight * x`
    fn weighted_add(self, weight: f64, x: Self) -> Self;
    fn square(self) -> Self;
    fn add(self, other: Self) -> Self;
    fn norm_sqr(self) -> f64;
    fn is_finite(self) -> bool;
    fn conj(self) -> Self;
}

impl Scalar for f64 {
    const ZERO: Self = 0.0;

    #[inline(always)]
    fn weighted_add(self, weight: f64, x: Self) -> Self {
        self + weight * x
    }

    #[inline(always)]
    fn square(self) -> Self {
        self * self
    }

    #[inline(always)]
    fn add(self, other: Self) -> Self {
        self + other
    }

    #[inline(always)]
    fn norm_sqr(self) -> f64 {
        self * self
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }

    #[inline(always)]
    fn conj(self) -> Self {
        self
    }
}

impl Scalar for Complex64 {
    const ZERO: Self = Complex64::new(0.0, 0.0);

    #[inline(always)]
    fn weighted_add(self, weight: f64, x: Self) -> Self {
        Complex64::new(self.re + weight * x.re, self.im + weight * x.im)
    }

    #[inline(always)]
    fn square(self) -> Self {
        Complex64::new(self.re * self.re - self.im * self.im, 2.0 * self.re * self.im)
    }

    #[inline(always)]
    fn add(self, other: Self) -> Self {
        self + other
    }

    #[inline(always)]
    fn norm_sqr(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline(always)]
    fn is_finite(self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    #[inline(always)]
    fn conj(self) -> Self {
        Complex64::new(self.re, -self.im)
    }
}

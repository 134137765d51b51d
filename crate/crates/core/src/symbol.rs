//! Spectral symbols: real cosine polynomials and quotients of them.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Samples used when classifying monotonicity.
pub const MONOTONICITY_SAMPLES: usize = 4096;

/// Bisection width in [`SpectralSymbol::invert`] before Newton polishing.
const BISECTION_WIDTH: f64 = 1e-13;
const NEWTON_STEPS: usize = 4;

/// Direction of monotonicity on `(0, π)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MonotonicityClass {
    Increasing,
    Decreasing,
    NonMonotone,
}

impl MonotonicityClass {
    pub fn is_monotone(self) -> bool {
        self != MonotonicityClass::NonMonotone
    }
}

/// Result of inverting a symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Preimage<T> {
    pub angle: T,
    /// The target lay slightly outside the symbol range and was snapped to
    /// an endpoint.
    pub clamped: bool,
}

/// A real, even, 2π-periodic function sampled on `[0, π]`.
pub trait SpectralSymbol<T: Real> {
    fn eval(&self, theta: T) -> T;

    fn eval_derivative(&self, theta: T) -> T;

    /// Absolute threshold below which derivative samples count as zero.
    fn derivative_tolerance(&self) -> T;

    /// Classifies by sampling the derivative on a dense grid of `[0, π]`.
    fn classify_monotonicity(&self) -> MonotonicityClass {
        let tol = self.derivative_tolerance();
        let step = T::PI() / T::from_count(MONOTONICITY_SAMPLES - 1);
        let (mut any_pos, mut any_neg) = (false, false);
        let (mut min_d, mut max_d) = (T::zero(), T::zero());
        for i in 0..MONOTONICITY_SAMPLES {
            let theta = if i + 1 == MONOTONICITY_SAMPLES {
                T::PI()
            } else {
                step * T::from_count(i)
            };
            let d = self.eval_derivative(theta);
            if d.is_nan() {
                return MonotonicityClass::NonMonotone;
            }
            min_d = min_d.min(d);
            max_d = max_d.max(d);
            any_pos |= d > tol;
            any_neg |= d < -tol;
        }
        match (any_pos, any_neg) {
            (true, false) if min_d >= -tol => MonotonicityClass::Increasing,
            (false, true) if max_d <= tol => MonotonicityClass::Decreasing,
            _ => MonotonicityClass::NonMonotone,
        }
    }

    /// Solves `f(ξ) = y` for `ξ ∈ [0, π]`.
    ///
    /// Values that miss the range `[min f, max f]` by at most
    /// [`clamp_slack`] map to the nearest endpoint and are flagged.
    fn invert(&self, y: T, class: MonotonicityClass) -> Result<Preimage<T>> {
        let sign = match class {
            MonotonicityClass::Increasing => T::one(),
            MonotonicityClass::Decreasing => -T::one(),
            MonotonicityClass::NonMonotone => return Err(Error::NotMonotone),
        };
        let pi = T::PI();
        let f0 = self.eval(T::zero());
        let fpi = self.eval(pi);
        let (low, high) = (f0.min(fpi), f0.max(fpi));
        let slack = clamp_slack(f0, fpi);
        let (low_end, high_end) = if sign > T::zero() { (T::zero(), pi) } else { (pi, T::zero()) };
        if !(y.is_finite()) {
            return Err(range_error(y, low, high));
        }
        if y <= low {
            return if low - y <= slack {
                Ok(Preimage { angle: low_end, clamped: y < low })
            } else {
                Err(range_error(y, low, high))
            };
        }
        if y >= high {
            return if y - high <= slack {
                Ok(Preimage { angle: high_end, clamped: y > high })
            } else {
                Err(range_error(y, low, high))
            };
        }

        // g is nondecreasing on [0, π].
        let g = |t: T| sign * (self.eval(t) - y);
        let width = T::tol(BISECTION_WIDTH);
        let two = T::lit(2.0);

        // Leftmost point of {g >= 0} and rightmost point of {g <= 0}.
        let (mut lo, mut hi) = (T::zero(), pi);
        while hi - lo > width {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) < T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (left_lo, left_hi) = (lo, hi);
        let (mut lo, mut hi) = (left_lo, pi);
        while hi - lo > width {
            let mid = (lo + hi) / two;
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) <= T::zero() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let (right_lo, right_hi) = (lo, hi);

        let left = (left_lo + left_hi) / two;
        let right = (right_lo + right_hi) / two;
        let mut x = (left + right) / two;
        if right - left > two * width {
            // Plateau: the midpoint of the solution set.
            return Ok(Preimage { angle: x, clamped: false });
        }

        let (guard_lo, guard_hi) = (left_lo, right_hi);
        let mut gx = g(x);
        for _ in 0..NEWTON_STEPS {
            if gx == T::zero() {
                break;
            }
            let d = sign * self.eval_derivative(x);
            if d == T::zero() || !d.is_finite() {
                break;
            }
            let next = (x - gx / d).max(guard_lo).min(guard_hi);
            let g_next = g(next);
            if g_next.abs() < gx.abs() {
                x = next;
                gx = g_next;
            } else {
                break;
            }
        }
        Ok(Preimage { angle: x, clamped: false })
    }

    /// Minimum and maximum of the symbol over `[0, π]`, by sampling.
    fn sampled_range(&self, samples: usize) -> (T, T) {
        let samples = samples.max(2);
        let step = T::PI() / T::from_count(samples - 1);
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..samples {
            let v = self.eval(step * T::from_count(i));
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    }
}

/// Tolerance for values just outside the symbol range.
pub fn clamp_slack<T: Real>(f0: T, fpi: T) -> T {
    T::tol(1e-8) * (T::one() + (fpi - f0).abs())
}

fn range_error<T: Real>(y: T, low: T, high: T) -> Error {
    Error::Range {
        value: y.as_f64(),
        low: low.as_f64(),
        high: high.as_f64(),
    }
}

/// `f(θ) = f̂₀ + 2 Σ_{k=1}^{m} f̂_k cos(kθ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CosineSymbol<T> {
    coeffs: Vec<T>,
    at_zero: T,
    at_pi: T,
}

impl<T: Real> CosineSymbol<T> {
    pub fn new(coeffs: Vec<T>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSymbol("no coefficients".into()));
        }
        if coeffs.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidSymbol("non-finite coefficient".into()));
        }
        let two = T::lit(2.0);
        let mut at_zero = coeffs[0];
        let mut at_pi = coeffs[0];
        for (k, &c) in coeffs.iter().enumerate().skip(1) {
            at_zero = at_zero + two * c;
            at_pi = if k % 2 == 0 { at_pi + two * c } else { at_pi - two * c };
        }
        Ok(Self { coeffs, at_zero, at_pi })
    }

    pub fn from_f64(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&c| T::lit(c)).collect())
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Index of the last stored coefficient.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn at_zero(&self) -> T {
        self.at_zero
    }

    pub fn at_pi(&self) -> T {
        self.at_pi
    }

    pub fn max_abs_coeff(&self) -> T {
        self.coeffs.iter().fold(T::zero(), |m, c| m.max(c.abs()))
    }
}

/// Reduces an even 2π-periodic argument into `[0, π]`.
fn fold_angle<T: Real>(theta: T) -> T {
    let pi = T::PI();
    if theta >= T::zero() && theta <= pi {
        return theta;
    }
    let two_pi = pi + pi;
    let t = theta - two_pi * (theta / two_pi).round();
    t.abs()
}

impl<T: Real> SpectralSymbol<T> for CosineSymbol<T> {
    /// Anchored at the nearer endpoint, `cos kθ − 1 = −2 sin²(kθ/2)`, so that
    /// zeros of `f` at `0` or `π` are resolved to relative accuracy.
    fn eval(&self, theta: T) -> T {
        let theta = fold_angle(theta);
        let half = T::lit(0.5);
        let four = T::lit(4.0);
        let pi = T::PI();
        let mut acc = T::zero();
        if theta <= pi * half {
            for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                let s = (T::from_count(k) * theta * half).sin();
                acc = acc + c * s * s;
            }
            self.at_zero - four * acc
        } else {
            let phi = pi - theta;
            for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                let s = (T::from_count(k) * phi * half).sin();
                acc = if k % 2 == 0 { acc + c * s * s } else { acc - c * s * s };
            }
            self.at_pi - four * acc
        }
    }

    fn eval_derivative(&self, theta: T) -> T {
        let pi = T::PI();
        let two = T::lit(2.0);
        let two_pi = pi + pi;
        let reduced = theta - two_pi * (theta / two_pi).round();
        let (t, mirror) = if reduced < T::zero() { (-reduced, -T::one()) } else { (reduced, T::one()) };
        let mut acc = T::zero();
        if t <= pi / two {
            for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                let kf = T::from_count(k);
                acc = acc + kf * c * (kf * t).sin();
            }
            -two * acc * mirror
        } else {
            // sin(k(π − φ)) = −(−1)^k sin(kφ)
            let phi = pi - t;
            for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
                let kf = T::from_count(k);
                let term = kf * c * (kf * phi).sin();
                acc = if k % 2 == 0 { acc - term } else { acc + term };
            }
            -two * acc * mirror
        }
    }

    fn derivative_tolerance(&self) -> T {
        let m = T::from_count(self.degree());
        T::tol(1e-12) * (T::one() + self.max_abs_coeff() * m * m)
    }
}

/// `f = a / b` for cosine polynomials `a`, `b` with `b ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuotientSymbol<T> {
    pub numerator: CosineSymbol<T>,
    pub denominator: CosineSymbol<T>,
}

impl<T: Real> QuotientSymbol<T> {
    pub fn new(numerator: CosineSymbol<T>, denominator: CosineSymbol<T>) -> Self {
        Self { numerator, denominator }
    }
}

impl<T: Real> SpectralSymbol<T> for QuotientSymbol<T> {
    fn eval(&self, theta: T) -> T {
        self.numerator.eval(theta) / self.denominator.eval(theta)
    }

    fn eval_derivative(&self, theta: T) -> T {
        let a = self.numerator.eval(theta);
        let b = self.denominator.eval(theta);
        let da = self.numerator.eval_derivative(theta);
        let db = self.denominator.eval_derivative(theta);
        (da * b - a * db) / (b * b)
    }

    fn derivative_tolerance(&self) -> T {
        self.numerator.derivative_tolerance() + self.denominator.derivative_tolerance()
    }
}

/// The distribution symbol of an operator family.
#[derive(Debug, Clone, PartialEq)]
pub enum FamilySymbol<T> {
    Cosine(CosineSymbol<T>),
    Quotient(QuotientSymbol<T>),
}

impl<T: Real> SpectralSymbol<T> for FamilySymbol<T> {
    fn eval(&self, theta: T) -> T {
        match self {
            FamilySymbol::Cosine(s) => s.eval(theta),
            FamilySymbol::Quotient(s) => s.eval(theta),
        }
    }

    fn eval_derivative(&self, theta: T) -> T {
        match self {
            FamilySymbol::Cosine(s) => s.eval_derivative(theta),
            FamilySymbol::Quotient(s) => s.eval_derivative(theta),
        }
    }

    fn derivative_tolerance(&self) -> T {
        match self {
            FamilySymbol::Cosine(s) => s.derivative_tolerance(),
            FamilySymbol::Quotient(s) => s.derivative_tolerance(),
        }
    }
}

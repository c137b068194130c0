//! The kernel functions `G_s(t) = ∫_0^t (1+τ²)^{-(n+1+s)/2} dτ` and
//! `G̃_s(t) = G_s(t) - t`.
//!
//! Evaluation is split in three ranges of |t|: a binomial series below 1/2,
//! Gauss–Legendre on the angle `θ = atan τ` up to 2, and `G_∞` minus a series
//! in `1/t` beyond. The sign is applied last so oddness holds bit for bit.

use crate::error::{FracError, Result};
use crate::num::{lit, usize_to, Real};
use crate::params::FracParams;
use crate::quadrature::gk::gauss_legendre;

const SERIES_CUT: f64 = 0.5;
const TAIL_CUT: f64 = 2.0;
const GL_POINTS: usize = 20;
const MAX_TERMS: usize = 200;

/// Precomputed evaluator of `G_s` and `G̃_s` for fixed `(n, s)`.
#[derive(Debug, Clone)]
pub struct GKernel<T: Real = f64> {
    params: FracParams<T>,
    /// Half the kernel exponent, `(n+1+s)/2`.
    k: T,
    /// Binomial coefficients of `(1+x)^{-k}`.
    coeffs: Vec<T>,
    gl_x: Vec<T>,
    gl_w: Vec<T>,
    g_cut: T,
    g_inf: T,
}

impl<T: Real> GKernel<T> {
    pub fn new(params: FracParams<T>) -> Result<Self> {
        let params = FracParams::new(params.n, params.s)?;
        let k = params.kernel_exponent() * lit(0.5);
        let mut coeffs = Vec::with_capacity(MAX_TERMS);
        let mut c = T::one();
        coeffs.push(c);
        for m in 1..MAX_TERMS {
            let mm = usize_to::<T>(m);
            c = c * (-k - mm + T::one()) / mm;
            coeffs.push(c);
        }
        let (x, w) = gauss_legendre(GL_POINTS);
        let mut ker = Self {
            params,
            k,
            coeffs,
            gl_x: x.iter().map(|&v| lit(v)).collect(),
            gl_w: w.iter().map(|&v| lit(v)).collect(),
            g_cut: T::zero(),
            g_inf: T::zero(),
        };
        ker.g_cut = ker.series_g(lit(SERIES_CUT), false);
        let g_two = ker.middle_g(lit(TAIL_CUT));
        ker.g_inf = g_two + ker.tail_series(lit(TAIL_CUT));
        Ok(ker)
    }

    pub fn params(&self) -> FracParams<T> {
        self.params
    }

    /// `G_∞ = lim_{t→∞} G_s(t)`.
    pub fn g_inf(&self) -> T {
        self.g_inf
    }

    /// Σ c_m t^{2m+1}/(2m+1), starting at m = 1 when `drop_linear`.
    fn series_g(&self, t: T, drop_linear: bool) -> T {
        let x = t * t;
        let start = if drop_linear { 1 } else { 0 };
        let mut pow = if drop_linear { t * x } else { t };
        let mut sum = T::zero();
        for m in start..MAX_TERMS {
            let term = self.coeffs[m] * pow / usize_to::<T>(2 * m + 1);
            sum = sum + term;
            if term.abs() <= T::epsilon() * lit(0.01) * sum.abs() {
                break;
            }
            pow = pow * x;
        }
        sum
    }

    /// ∫_t^∞ (1+τ²)^{-k} dτ for t ≥ 2, as a series in u = 1/t.
    fn tail_series(&self, t: T) -> T {
        let u = t.recip();
        let u2 = u * u;
        let a = lit::<T>(2.0) * self.k - T::one();
        let mut pow = u.powf(a);
        let mut sum = T::zero();
        for m in 0..MAX_TERMS {
            let term = self.coeffs[m] * pow / (a + usize_to::<T>(2 * m));
            sum = sum + term;
            if term.abs() <= T::epsilon() * lit(0.01) * sum.abs() {
                break;
            }
            pow = pow * u2;
        }
        sum
    }

    /// G(t) for 1/2 ≤ t ≤ 2 by Gauss–Legendre in θ, where the integrand is cos^{2k-2} θ.
    fn middle_g(&self, t: T) -> T {
        let lo = lit::<T>(SERIES_CUT).atan();
        let hi = t.atan();
        let half = (hi - lo) * lit(0.5);
        let mid = (hi + lo) * lit(0.5);
        let p = lit::<T>(2.0) * self.k - lit(2.0);
        let mut acc = T::zero();
        for (x, w) in self.gl_x.iter().zip(&self.gl_w) {
            let th = mid + half * *x;
            acc = acc + *w * (p * th.cos().ln()).exp();
        }
        self.g_cut + acc * half
    }

    fn g_abs(&self, a: T) -> T {
        if a.is_infinite() {
            self.g_inf
        } else if a <= lit(SERIES_CUT) {
            self.series_g(a, false)
        } else if a <= lit(TAIL_CUT) {
            self.middle_g(a)
        } else {
            self.g_inf - self.tail_series(a)
        }
    }

    /// `G_s(t)`; NaN propagates.
    #[inline]
    pub fn g(&self, t: T) -> T {
        if t.is_nan() {
            return t;
        }
        let v = self.g_abs(t.abs());
        if t.is_sign_negative() {
            -v
        } else {
            v
        }
    }

    /// `G̃_s(t) = G_s(t) - t`, accurate in relative terms for small t.
    #[inline]
    pub fn g_tilde(&self, t: T) -> T {
        let a = t.abs();
        let v = if a <= lit(SERIES_CUT) {
            self.series_g(a, true)
        } else {
            self.g_abs(a) - a
        };
        if t.is_sign_negative() {
            -v
        } else {
            v
        }
    }

    /// The derivative `(1+t²)^{-k}`.
    pub fn g_prime(&self, t: T) -> T {
        (-self.k * (t * t).ln_1p()).exp()
    }

    /// Constant `(n+2)/2` in the Lipschitz-type bound on `G̃_s`.
    pub fn tilde_bound_constant(&self) -> T {
        usize_to::<T>(self.params.n + 2) * lit(0.5)
    }
}

/// `G_s(t)` for any real or infinite `t`.
#[allow(non_snake_case)]
pub fn eval_G<T: Real>(params: FracParams<T>, t: T) -> Result<T> {
    if t.is_nan() {
        return Err(FracError::domain("G_s evaluated at NaN"));
    }
    Ok(GKernel::new(params)?.g(t))
}

/// `G̃_s(t) = G_s(t) - t` for finite `t`.
#[allow(non_snake_case)]
pub fn eval_G_tilde<T: Real>(params: FracParams<T>, t: T) -> Result<T> {
    if !t.is_finite() {
        return Err(FracError::domain("G̃_s needs a finite argument"));
    }
    Ok(GKernel::new(params)?.g_tilde(t))
}

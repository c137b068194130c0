//! Principal-value integration by symmetric pairing about the singular point.
//!
//! Everything reduces to a radial integral `∫ g(ρ) dρ` of the paired
//! integrand. The radial axis is cut into dyadic shells starting at
//! `excision_start`; the innermost shell `[0, excision_start]` is integrated
//! after the substitution `ρ = ε₀ v^m` that flattens a `ρ^{-σ}` singularity.
//! Infinite ranges end with the analytic power-law tail `g(R)·R/κ`.

use super::gk::{integrate_with_error, Outcome};
use crate::error::{FracError, Result};
use crate::num::{lit, Real};
use crate::params::{PVResult, QuadConfig};

const MAX_SHELLS: usize = 400;

/// A one-dimensional radial integration task.
#[derive(Debug, Clone)]
pub struct RadialProblem<T> {
    pub start: T,
    /// `None` means +∞, which requires `decay_exponent`.
    pub end: Option<T>,
    /// κ such that the radial integrand behaves like `ρ^{-1-κ}` at infinity.
    pub decay_exponent: Option<T>,
    /// σ such that the radial integrand behaves like `ρ^{-σ}` near zero.
    pub inner_exponent: Option<T>,
    /// Radii where the integrand is not smooth.
    pub breakpoints: Vec<T>,
    /// Below this radius `g` is replaced by `Aρ^{-σ} + Bρ^{1-σ}` fitted at
    /// the floor and twice the floor; for integrands whose pairing loses all
    /// digits close to the singular point.
    pub floor: Option<T>,
}

struct Acc<T> {
    value: T,
    error: T,
    evals: usize,
}

impl<T: Real> Acc<T> {
    fn add(&mut self, o: &Outcome<T>) {
        self.value = self.value + o.value;
        self.error = self.error + o.error;
        self.evals += o.evaluations;
    }

    fn fail(&self) -> FracError {
        FracError::Convergence {
            partial: self.value.as_f64(),
            error: self.error.as_f64(),
            evaluations: self.evals,
        }
    }
}

/// Integrates `g` over `[start, end)` (or to infinity) shell by shell.
/// `g` returns the radial integrand and its own absolute error.
pub fn radial_integral<T: Real, G: FnMut(T) -> (T, T)>(
    mut g: G,
    prob: &RadialProblem<T>,
    cfg: &QuadConfig<T>,
) -> Result<PVResult<T>> {
    cfg.validate()?;
    let two = lit::<T>(2.0);
    if prob.end.is_none() {
        match prob.decay_exponent {
            Some(k) if k > T::zero() => {}
            _ => return Err(FracError::domain("infinite range needs a positive registered decay exponent")),
        }
    }
    let shell_abs = cfg.abs_tol / lit(32.0);
    let shell_rel = cfg.rel_tol * lit(0.5);
    let mut acc = Acc { value: T::zero(), error: T::zero(), evals: 0 };
    let budget = |acc: &Acc<T>| cfg.max_evaluations.saturating_sub(acc.evals);

    let eps0 = cfg.excision_start;
    let mut r = prob.start;
    if r <= T::zero() {

        let top = match prob.end {
            Some(e) if e < eps0 => e,
            _ => eps0,
        };
        let sigma = prob.inner_exponent.unwrap_or(T::zero());
        let m = if sigma > T::zero() && sigma < T::one() {
            T::one() / (T::one() - sigma)
        } else if sigma >= T::one() {
            return Err(FracError::domain("paired integrand is not integrable at the singularity"));
        } else {
            T::one()
        };
        let mut v0 = T::zero();
        if let Some(fl) = prob.floor {
            if !(fl > T::zero() && lit::<T>(4.0) * fl <= top) {
                return Err(FracError::domain("inner floor must lie in (0, excision_start / 4]"));
            }
            let g1 = g(fl).0;
            let g2 = g(two * fl).0;
            let g4 = g(lit::<T>(4.0) * fl).0;
            acc.evals += 3;
            // g ≈ ρ^{-σ}(A + Bρ) fitted on (a, 2a), integrated over (0, a)
            let cap = |a: T, ga: T, gb: T| {
                let p = ga * a.powf(sigma);
                let q = gb * (two * a).powf(sigma);
                let b = (q - p) / a;
                a.powf(T::one() - sigma) * ((p - b * a) / (T::one() - sigma) + b * a / (two - sigma))
            };
            let near = cap(fl, g1, g2);
            let wide = cap(two * fl, g2, g4);
            // the same integral over (0, 2a) two ways; the model error scales like a^{3-σ}
            let mid = integrate_with_error(&mut g, fl, two * fl, &[], shell_abs, shell_rel, budget(&acc));
            acc.evals += mid.evaluations;
            let gap = ((near + mid.value) - wide).abs();
            acc.value = acc.value + near;
            acc.error = acc.error + gap / (two.powf(lit::<T>(3.0) - sigma) - T::one());
            v0 = (fl / top).powf(T::one() / m);
        }
        let out = integrate_with_error(
            |v: T| {
                let rho = top * v.powf(m);
                let jac = top * m * v.powf(m - T::one());
                let (a, e) = g(rho);
                (a * jac, e * jac.abs())
            },
            v0,
            T::one(),
            &[],
            shell_abs,
            shell_rel,
            budget(&acc),
        );
        acc.add(&out);
        if !out.converged {
            return Err(acc.fail());
        }
        r = top;
    }

    let mut breaks: Vec<T> = prob.breakpoints.iter().copied().filter(|b| *b > r).collect();
    breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut shells = 0usize;
    let mut tail_rad = r;
    loop {
        if let Some(e) = prob.end {
            if r >= e {
                break;
            }
        }
        let mut next = if r > T::zero() { r * two } else { eps0 };
        if let Some(e) = prob.end {
            if next > e {
                next = e;
            }
        }
        let inner: Vec<T> = breaks.iter().copied().filter(|b| *b > r && *b < next).collect();
        let out = integrate_with_error(&mut g, r, next, &inner, shell_abs, shell_rel, budget(&acc));
        acc.add(&out);
        if !out.converged {
            return Err(acc.fail());
        }
        r = next;
        tail_rad = r;
        shells += 1;
        if prob.end.is_none() && r >= cfg.tail_radius && breaks.iter().all(|b| *b <= r) {
            let kappa = prob.decay_exponent.unwrap();
            let (gr, er) = g(r);
            let (gh, _) = g(r / two);
            acc.evals += 2;
            let tail = gr * r / kappa;
            let mut terr = er * r / kappa + tail.abs() * lit(1e-3);
            if gr != T::zero() && gh != T::zero() && (gr > T::zero()) == (gh > T::zero()) {
                let k_loc = (gh / gr).ln() / two.ln() - T::one();
                if k_loc > T::zero() {
                    terr = terr + (gr * r).abs() * (T::one() / kappa - T::one() / k_loc).abs();
                } else {
                    terr = terr + tail.abs();
                }
            } else if gr != T::zero() {
                terr = terr + tail.abs();
            }
            let small = tail.abs() + terr <= cfg.abs_tol / lit(10.0);
            if small || shells >= MAX_SHELLS {
                acc.value = acc.value + tail;
                acc.error = acc.error + terr;
                break;
            }
        }
        if shells >= MAX_SHELLS {
            return Err(acc.fail());
        }
    }
    Ok(PVResult {
        value: acc.value,
        error_estimate: acc.error,
        evaluations: acc.evals,
        truncation_radius: if tail_rad > T::zero() { tail_rad } else { eps0 },
    })
}

/// One-dimensional principal-value problem on `(lower, upper)` with an
/// isolated singularity at `x0`.
#[derive(Debug, Clone)]
pub struct Singular1d<T> {
    pub x0: T,
    pub lower: T,
    pub upper: T,
    /// κ with `f(x) ~ |x|^{-1-κ}` at infinity; required for infinite ends.
    pub decay_exponent: Option<T>,
    /// σ with `f(x0+h) + f(x0-h) ~ h^{-σ}`.
    pub inner_exponent: Option<T>,
    pub breakpoints: Vec<T>,
    /// See [`RadialProblem::floor`].
    pub inner_floor: Option<T>,
}

impl<T: Real> Singular1d<T> {
    pub fn whole_line(x0: T) -> Self {
        Self {
            x0,
            lower: T::neg_infinity(),
            upper: T::infinity(),
            decay_exponent: None,
            inner_exponent: None,
            breakpoints: Vec::new(),
            inner_floor: None,
        }
    }
}

fn merge(a: PVResult<f64>, b: PVResult<f64>) -> PVResult<f64> {
    PVResult {
        value: a.value + b.value,
        error_estimate: a.error_estimate + b.error_estimate,
        evaluations: a.evaluations + b.evaluations,
        truncation_radius: a.truncation_radius.max(b.truncation_radius),
    }
}

fn to64<T: Real>(r: PVResult<T>) -> PVResult<f64> {
    PVResult {
        value: r.value.as_f64(),
        error_estimate: r.error_estimate.as_f64(),
        evaluations: r.evaluations,
        truncation_radius: r.truncation_radius.as_f64(),
    }
}

fn from64<T: Real>(r: PVResult<f64>) -> PVResult<T> {
    PVResult {
        value: lit(r.value),
        error_estimate: lit(r.error_estimate),
        evaluations: r.evaluations,
        truncation_radius: lit(r.truncation_radius),
    }
}

/// P.V. ∫ f over `(lower, upper)`, pairing `x0 ± h` up to the nearer end.
pub fn pv_integrate_1d<T: Real, F: Fn(T) -> T>(
    f: F,
    prob: &Singular1d<T>,
    cfg: &QuadConfig<T>,
) -> Result<PVResult<T>> {
    let x0 = prob.x0;
    if !(prob.lower < x0 && x0 < prob.upper) || !x0.is_finite() {
        return Err(FracError::domain("singular point must lie inside the domain"));
    }
    let left = x0 - prob.lower;
    let right = prob.upper - x0;
    let h_sym = left.min(right);
    let rel_breaks: Vec<T> = prob.breakpoints.iter().map(|b| (*b - x0).abs()).collect();
    let sym = RadialProblem {
        start: T::zero(),
        end: if h_sym.is_finite() { Some(h_sym) } else { None },
        decay_exponent: prob.decay_exponent,
        inner_exponent: prob.inner_exponent,
        breakpoints: rel_breaks.clone(),
        floor: prob.inner_floor,
    };
    let paired = |h: T| {
        let d = exact_offset(x0, h);
        (f(x0 + d) + f(x0 - d), T::zero())
    };
    let mut total = to64(radial_integral(paired, &sym, cfg)?);
    if left != right {
        let sign = if right > left { T::one() } else { -T::one() };
        let far = left.max(right);
        let side = RadialProblem {
            start: h_sym,
            end: if far.is_finite() { Some(far) } else { None },
            decay_exponent: prob.decay_exponent,
            inner_exponent: None,
            breakpoints: rel_breaks,
            floor: None,
        };
        let one = radial_integral(|h| (f(x0 + sign * h), T::zero()), &side, cfg)?;
        total = merge(total, to64(one));
    }
    Ok(from64(total))
}

/// Principal-value problem on all of R^n with singularity at `x0`.
#[derive(Debug, Clone)]
pub struct SingularNd<T> {
    pub x0: Vec<T>,
    /// Outer radius of integration around `x0`; `None` for R^n.
    pub radius: Option<T>,
    /// κ such that the spherical average of |y-x0|^{n-1} f decays like ρ^{-1-κ}.
    pub decay_exponent: Option<T>,
    pub inner_exponent: Option<T>,
    /// Radii (distances from `x0`) where the integrand has kinks or cusps.
    pub breakpoints: Vec<T>,
    /// See [`RadialProblem::floor`].
    pub inner_floor: Option<T>,
}

/// Rounds `t` to an offset `d` with `x0 + d` and `x0 - d` both exact while
/// `|d| <= |x0|`. Rounding away from zero lands on the coarser of the two grids.
fn exact_offset<T: Real>(x0: T, t: T) -> T {
    let a = x0.abs();
    let d = (a + t.abs()) - a;
    if t < T::zero() {
        -d
    } else {
        d
    }
}

/// Paired hemisphere average `∫_{S^{n-1}/±} [f(x0+ρω) + f(x0-ρω)] dω`.
fn hemisphere<T: Real, F: Fn(&[T]) -> T>(
    f: &F,
    x0: &[T],
    rho: T,
    abs_tol: T,
    rel_tol: T,
    max_evals: usize,
) -> Outcome<T> {
    let n = x0.len();
    let pi = T::PI();
    let mut yp = x0.to_vec();
    let mut ym = x0.to_vec();
    match n {
        2 => integrate_with_error(
            |th: T| {
                let (sn, cs) = th.sin_cos();
                let (d0, d1) = (exact_offset(x0[0], rho * cs), exact_offset(x0[1], rho * sn));
                yp[0] = x0[0] + d0;
                yp[1] = x0[1] + d1;
                ym[0] = x0[0] - d0;
                ym[1] = x0[1] - d1;
                (f(&yp) + f(&ym), T::zero())
            },
            T::zero(),
            pi,
            &[lit::<T>(0.5) * pi],
            abs_tol,
            rel_tol,
            max_evals,
        ),
        3 => {
            let inner_abs = abs_tol / lit(8.0);
            let mut used = 0usize;
            let mut out = integrate_with_error(
                |ph: T| {
                    let left = max_evals.saturating_sub(used);
                    if left == 0 {
                        return (T::nan(), T::nan());
                    }
                    let (sp, cp) = ph.sin_cos();
                    let out = integrate_with_error(
                        |th: T| {
                            let (st, ct) = th.sin_cos();
                            let d = [sp * ct, sp * st, cp];
                            for i in 0..3 {
                                let di = exact_offset(x0[i], rho * d[i]);
                                yp[i] = x0[i] + di;
                                ym[i] = x0[i] - di;
                            }
                            (f(&yp) + f(&ym), T::zero())
                        },
                        T::zero(),
                        lit::<T>(2.0) * pi,
                        &[pi],
                        inner_abs,
                        rel_tol,
                        (max_evals / 8).min(left),
                    );
                    used += out.evaluations;
                    (out.value * sp, out.error * sp)
                },
                T::zero(),
                lit::<T>(0.5) * pi,
                &[],
                abs_tol,
                rel_tol,
                max_evals,
            );
            out.evaluations = used;
            out
        }
        _ => unreachable!(),
    }
}

/// P.V. ∫_{R^n} f with antipodal pairing `x0 + z ↔ x0 - z`, for n ≤ 3.
pub fn pv_integrate_nd<T: Real, F: Fn(&[T]) -> T + Sync>(
    f: F,
    prob: &SingularNd<T>,
    cfg: &QuadConfig<T>,
) -> Result<PVResult<T>> {
    let n = prob.x0.len();
    if n == 0 || n > 3 {
        return Err(FracError::domain(format!("pv_integrate_nd supports 1 ≤ n ≤ 3, got {n}")));
    }
    if n == 1 {
        let x0 = prob.x0[0];
        let (lower, upper) = match prob.radius {
            Some(r) => (x0 - r, x0 + r),
            None => (T::neg_infinity(), T::infinity()),
        };
        let p1 = Singular1d {
            x0,
            lower,
            upper,
            decay_exponent: prob.decay_exponent,
            inner_exponent: prob.inner_exponent,
            breakpoints: prob.breakpoints.iter().map(|b| x0 + *b).collect(),
            inner_floor: prob.inner_floor,
        };
        return pv_integrate_1d(|t| f(&[t]), &p1, cfg);
    }
    let x0 = prob.x0.clone();
    let radial = RadialProblem {
        start: T::zero(),
        end: prob.radius,
        decay_exponent: prob.decay_exponent,
        inner_exponent: prob.inner_exponent,
        breakpoints: prob.breakpoints.clone(),
        floor: prob.inner_floor,
    };
    let inner_rel = cfg.rel_tol * lit(0.1);
    let nm1 = (n - 1) as i32;
    let per_call = (cfg.max_evaluations / 64).max(10_000);
    // the radial driver only counts its own calls; this counts calls of `f`
    let mut used = 0usize;
    let out = radial_integral(
        |rho: T| {
            let left = cfg.max_evaluations.saturating_sub(used);
            if left == 0 {
                return (T::nan(), T::nan());
            }
            let w = rho.powi(nm1);
            let inner_abs = cfg.abs_tol * lit(0.03) / (w * rho).max(T::min_positive_value());
            let out = hemisphere(&f, &x0, rho, inner_abs, inner_rel, per_call.min(left));
            used += out.evaluations;
            (out.value * w, out.error * w)
        },
        &radial,
        cfg,
    );
    match out {
        Ok(r) => Ok(PVResult { evaluations: used, ..r }),
        Err(FracError::Convergence { partial, error, .. }) => {
            Err(FracError::Convergence { partial, error, evaluations: used })
        }
        Err(e) => Err(e),
    }
}

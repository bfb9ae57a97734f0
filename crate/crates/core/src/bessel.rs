//! Modified Bessel functions of purely imaginary order, `K_{iν}(x)` and
//! `Re I_{iν}(x)`, with their x-derivatives, for real `x > 0`.
//!
//! Two independent routes are implemented:
//!
//! * **series**: the ascending series
//!   `I_{iν}(x) = Σ_k (x/2)^{2k+iν} / (k! Γ(k+1+iν))`, from which
//!   `K_{iν}(x) = −π Im I_{iν}(x) / sinh(πν)`. Accurate for `Re I` everywhere
//!   and for `K` while the cancellation in `Im I` is mild (small to moderate `x`).
//! * **integral**: `K_{iν}(x) = Re ∫_0^∞ exp(−x cosh w + iνw) dt` on the
//!   shifted line `w = t + iα`, with `α` placed near the saddle so the integrand
//!   stays non-oscillatory; `Re I_{iν}` from the Poisson-type representation
//!   `I_{iν}(x) = (x/2)^{iν} / (√π Γ(1/2+iν)) ∫_0^π e^{x cos θ} sin^{2iν}θ dθ`.
//!
//! [`evaluate`] routes `K` to whichever path has the smaller predicted absolute
//! error and always uses the series for `Re I`. Orders below [`ZERO_ORDER`] use
//! the real order-zero formulas.

use crate::gamma::ln_gamma;
use crate::quadrature::{integrate, QuadConfig, QuadError};
use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI};
use thiserror::Error;

/// Orders below this are evaluated with the real order-zero formulas.
pub const ZERO_ORDER: f64 = 1e-8;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_6;

// exp(πν/2) overflows the series prefactor well before this.
const MAX_ORDER: f64 = 400.0;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum BesselError {
    #[error("argument out of domain: nu = {nu}, x = {x} (need finite nu and x > 0)")]
    Domain { nu: f64, x: f64 },
    #[error("evaluation budget of {budget} exhausted at nu = {nu}, x = {x}; achieved error estimate {estimate:.3e}")]
    BudgetExceeded { nu: f64, x: f64, budget: usize, estimate: f64 },
    #[error("order nu = {nu} exceeds the supported range")]
    OrderTooLarge { nu: f64 },
    #[error("invalid evaluation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselEvalConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Series length cap; also the quadrature subdivision cap.
    pub max_terms: usize,
}

impl Default for BesselEvalConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 1e-30, max_terms: 4096 }
    }
}

impl BesselEvalConfig {
    pub fn new(rel_tol: f64, abs_tol: f64, max_terms: usize) -> Result<Self, BesselError> {
        if !(rel_tol > 0.0) || !rel_tol.is_finite() {
            return Err(BesselError::InvalidConfig(format!("rel_tol must be > 0, got {rel_tol}")));
        }
        if !(abs_tol >= 0.0) || !abs_tol.is_finite() {
            return Err(BesselError::InvalidConfig(format!("abs_tol must be >= 0, got {abs_tol}")));
        }
        if max_terms < 16 {
            return Err(BesselError::InvalidConfig(format!("max_terms must be >= 16, got {max_terms}")));
        }
        Ok(Self { rel_tol, abs_tol, max_terms })
    }

    fn quad(&self) -> QuadConfig {
        QuadConfig { rel_tol: self.rel_tol, abs_tol: self.abs_tol, max_subdivisions: self.max_terms }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    Series,
    Integral,
}

/// `K_{iν}(x)`, `Re I_{iν}(x)` and their x-derivatives from one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselValues {
    pub k: f64,
    pub k_deriv: f64,
    pub rei: f64,
    pub rei_deriv: f64,
    /// Absolute error estimate for `k` (and, scaled alike, `k_deriv`).
    pub k_error: f64,
    /// Absolute error estimate for `rei`.
    pub rei_error: f64,
    pub k_route: Route,
    pub rei_route: Route,
}

fn check_domain(nu: f64, x: f64) -> Result<(), BesselError> {
    if !nu.is_finite() || !x.is_finite() || x <= 0.0 {
        return Err(BesselError::Domain { nu, x });
    }
    if nu.abs() > MAX_ORDER {
        return Err(BesselError::OrderTooLarge { nu });
    }
    Ok(())
}

/// `K_{iν}(x)`.
pub fn k_imag(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<f64, BesselError> {
    Ok(evaluate(nu, x, cfg)?.k)
}

/// `Re I_{iν}(x)`.
pub fn rei_imag(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<f64, BesselError> {
    Ok(evaluate(nu, x, cfg)?.rei)
}

/// `d/dx K_{iν}(x)`.
pub fn k_imag_deriv(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<f64, BesselError> {
    Ok(evaluate(nu, x, cfg)?.k_deriv)
}

/// `d/dx Re I_{iν}(x)`.
pub fn rei_imag_deriv(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<f64, BesselError> {
    Ok(evaluate(nu, x, cfg)?.rei_deriv)
}

/// Evaluate all four quantities, choosing the most accurate route for `K`.
pub fn evaluate(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<BesselValues, BesselError> {
    check_domain(nu, x)?;
    let s = series(nu, x, cfg)?;
    let (alpha, _) = contour_shift(nu.abs(), x);
    let predicted_integral_error = 64.0 * f64::EPSILON * (-nu.abs() * alpha).exp() * k0_magnitude(x * alpha.cos());
    if s.k_error <= predicted_integral_error {
        return Ok(s);
    }
    let (k, k_deriv, k_error) = k_integral(nu, x, cfg)?;
    Ok(BesselValues { k, k_deriv, k_error, k_route: Route::Integral, ..s })
}

/// Rough magnitude of `K_0(y)`, used only to predict quadrature roundoff.
fn k0_magnitude(y: f64) -> f64 {
    if y < 1.0 {
        (2.0 / y).ln() + 1.0
    } else {
        (FRAC_PI_2 / y).sqrt() * (-y).exp()
    }
}

/// Both functions from the ascending series.
pub fn series(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<BesselValues, BesselError> {
    check_domain(nu, x)?;
    if nu.abs() < ZERO_ORDER {
        return series_order_zero(x, cfg);
    }
    let z = Complex64::new(0.0, nu);
    let half = 0.5 * x;
    let q = half * half;
    let lg = ln_gamma(z + 1.0);
    let mut t = (z * half.ln() - lg).exp();
    let mut sum = t;
    let mut dsum = t * z / x;
    let mut abs_sum = t.norm();
    let mut abs_dsum = dsum.norm();
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = k as f64;
        t = t * (q / (kf * (z + kf)));
        let dt = t * ((z + 2.0 * kf) / x);
        sum += t;
        dsum += dt;
        abs_sum += t.norm();
        abs_dsum += dt.norm();
        if kf > half && t.norm() <= f64::EPSILON * 0.25 * sum.norm() && dt.norm() <= f64::EPSILON * 0.25 * dsum.norm() {
            break;
        }
        if k >= cfg.max_terms {
            return Err(BesselError::BudgetExceeded {
                nu,
                x,
                budget: cfg.max_terms,
                estimate: t.norm() / sum.norm(),
            });
        }
    }
    // Rounding in the running sum plus the common prefactor error from ln Γ.
    let rel = f64::EPSILON * (4.0 + lg.norm() + (k as f64).sqrt());
    let i_err = rel * abs_sum;
    let di_err = rel * abs_dsum;
    let scale = PI / (PI * nu).sinh();
    Ok(BesselValues {
        k: -scale * sum.im,
        k_deriv: -scale * dsum.im,
        rei: sum.re,
        rei_deriv: dsum.re,
        k_error: scale * i_err.max(di_err * x.min(1.0)),
        rei_error: i_err,
        k_route: Route::Series,
        rei_route: Route::Series,
    })
}

fn series_order_zero(x: f64, cfg: &BesselEvalConfig) -> Result<BesselValues, BesselError> {
    // I_0, I_1 and the harmonic-number series for K_0; K_0' = −K_1 follows by
    // term-wise differentiation.
    let half = 0.5 * x;
    let q = half * half;
    let log_term = half.ln() + EULER_GAMMA;
    let mut t = 1.0; // q^k / (k!)^2
    let mut i0 = 1.0;
    let mut i1 = 0.0; // Σ k (2/x) t_k = I_0' = I_1
    let mut hsum = 0.0; // Σ t_k H_k
    let mut dhsum = 0.0;
    let mut abs_h = 0.0;
    let mut harmonic = 0.0;
    let mut k = 0usize;
    loop {
        k += 1;
        let kf = k as f64;
        t *= q / (kf * kf);
        harmonic += 1.0 / kf;
        i0 += t;
        let dt = t * 2.0 * kf / x;
        i1 += dt;
        hsum += t * harmonic;
        dhsum += dt * harmonic;
        abs_h += t * harmonic;
        if kf > half && t * (harmonic + 1.0) <= 0.25 * f64::EPSILON * i0 {
            break;
        }
        if k >= cfg.max_terms {
            return Err(BesselError::BudgetExceeded { nu: 0.0, x, budget: cfg.max_terms, estimate: t / i0 });
        }
    }
    let k0 = -log_term * i0 + hsum;
    let k0_deriv = -i0 / x - log_term * i1 + dhsum;
    let k_error = 4.0 * f64::EPSILON * (log_term.abs() * i0 + abs_h + 1.0);
    Ok(BesselValues {
        k: k0,
        k_deriv: k0_deriv,
        rei: i0,
        rei_deriv: i1,
        k_error,
        rei_error: 4.0 * f64::EPSILON * i0,
        k_route: Route::Series,
        rei_route: Route::Series,
    })
}

/// Both functions from the integral representations.
pub fn integral(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<BesselValues, BesselError> {
    check_domain(nu, x)?;
    let (k, k_deriv, k_error) = k_integral(nu, x, cfg)?;
    let (rei, rei_deriv, rei_error) = rei_integral(nu, x, cfg)?;
    Ok(BesselValues {
        k,
        k_deriv,
        rei,
        rei_deriv,
        k_error,
        rei_error,
        k_route: Route::Integral,
        rei_route: Route::Integral,
    })
}

/// Height `α` of the shifted contour and the decay rate `x cos α`.
fn contour_shift(nu: f64, x: f64) -> (f64, f64) {
    if nu == 0.0 {
        return (0.0, x);
    }
    let cap = FRAC_PI_2 - (2.0 / nu).min(0.5);
    let alpha = (nu / x).min(1.0).asin().min(cap);
    (alpha, x * alpha.cos())
}

fn budget_error(nu: f64, x: f64, e: QuadError) -> BesselError {
    match e {
        QuadError::BudgetExceeded { subdivisions, error, magnitude } => BesselError::BudgetExceeded {
            nu,
            x,
            budget: subdivisions,
            estimate: if magnitude > 0.0 { error / magnitude } else { error },
        },
        QuadError::NonFinite { .. } => BesselError::Domain { nu, x },
    }
}

/// `(K, K', abs error)` from the contour-shifted integral. Even in `ν`.
fn k_integral(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<(f64, f64, f64), BesselError> {
    let nu_abs = nu.abs();
    let (alpha, decay) = contour_shift(nu_abs, x);
    // Integrand magnitude falls by e^{-45} relative to t = 0 at t_max.
    let t_max = (1.0 + 45.0 / decay).acosh();
    let f = |t: f64| -> [f64; 2] {
        let w = Complex64::new(t, alpha);
        let ch = w.cosh();
        let v = (-x * ch + Complex64::new(0.0, nu_abs) * w).exp();
        [v.re, -(ch * v).re]
    };
    let r = integrate(f, 0.0, t_max, &cfg.quad()).map_err(|e| budget_error(nu, x, e))?;
    Ok((r.value[0], r.value[1], r.error))
}

/// `(Re I, Re I', abs error)` from the Poisson-type integral, substituted
/// `θ = (π/2) e^{−w}` so the endpoint phase `sin^{2iν}θ` becomes linear in `w`.
fn rei_integral(nu: f64, x: f64, cfg: &BesselEvalConfig) -> Result<(f64, f64, f64), BesselError> {
    let w_max = 40.0 + x;
    // cosh and sinh are scaled by e^{-x} to stay finite.
    let f = |w: f64| -> [f64; 4] {
        let theta = FRAC_PI_2 * (-w).exp();
        let (s, c) = theta.sin_cos();
        let phase = Complex64::new(0.0, 2.0 * nu * s.ln()).exp();
        let ep = (x * (c - 1.0)).exp();
        let em = (-x * (c + 1.0)).exp();
        let ch = (ep + em) * theta; // 2 cosh(x c) e^{-x} θ
        let sh = c * (ep - em) * theta; // 2 c sinh(x c) e^{-x} θ
        [ch * phase.re, ch * phase.im, sh * phase.re, sh * phase.im]
    };
    let r = integrate(f, 0.0, w_max, &cfg.quad()).map_err(|e| budget_error(nu, x, e))?;
    let j = Complex64::new(r.value[0], r.value[1]);
    let dj = Complex64::new(r.value[2], r.value[3]);
    let z = Complex64::new(0.0, nu);
    let pref = (z * (0.5 * x).ln() - ln_gamma(z + 0.5) + x).exp() / PI.sqrt();
    let i = pref * j;
    let di = pref * (z / x * j + dj);
    let err = pref.norm() * r.error;
    Ok((i.re, di.re, err))
}

/// Natural magnitude of an imaginary-order solution at `(ν, x)`: where the
/// functions oscillate (`x < ν`) this is the common envelope
/// `hypot(K, π Re I / sinh πν)`; elsewhere `|value|` itself. Used as the
/// scale for relative comparisons that must stay meaningful near zeros.
pub fn envelope(nu: f64, x: f64, k: f64, rei: f64) -> (f64, f64) {
    let nu = nu.abs();
    if x >= nu || nu < ZERO_ORDER {
        return (k.abs(), rei.abs());
    }
    let s = (PI * nu).sinh();
    let env_k = k.hypot(PI * rei / s);
    (env_k, env_k * s / PI)
}

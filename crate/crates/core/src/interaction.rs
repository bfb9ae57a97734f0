//! First-order emission amplitudes of the transiting atom into each cavity.
//!
//! The atom moves along `y` with velocity `v` and crosses Alice's cavity for
//! proper time `τ ∈ [−3T, −T]`, then Rob's for `τ ∈ [−T, T]`, with
//! `T = L/(2vγ)`. The coupling is switched by `ε sin²(πτ/T)` and the
//! transverse mode and detector phase combine into
//! `Λ(τ) = ε(τ) sin(mπ(vγτ/L − 1/2)) e^{−iΔτ}`.

use crate::bessel::BesselError;
use crate::geometry::{CavityGeometry, ModeIndex};
use crate::modes::{MinkowskiMode, RindlerMode};
use crate::quadrature::{integrate, QuadConfig, QuadError};
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Total emission weight above which first-order perturbation theory is
/// considered unreliable.
pub const PERTURBATIVE_LIMIT: f64 = 1e-2;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum InteractionError {
    #[error("invalid atom parameter: {0}")]
    Parameter(String),
    #[error("acceleration a = {a} violates the kinematic bound a < 2v = {bound}")]
    KinematicBound { a: f64, bound: f64 },
    #[error("the accelerated branch needs a > 0; use the inertial amplitude for a = 0")]
    InertialGeometry,
    #[error("amplitude quadrature for mode {idx} failed: {source}")]
    Quadrature { idx: ModeIndex, source: QuadError },
    #[error("radial mode evaluation for {idx} failed: {source}")]
    Bessel { idx: ModeIndex, source: BesselError },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AtomParams {
    /// Detector gap.
    pub delta: f64,
    pub v: f64,
    pub gamma: f64,
    /// Half the proper time spent inside one cavity.
    pub t_half: f64,
    pub eps: f64,
    /// Transverse cavity length crossed by the atom.
    pub length: f64,
}

impl AtomParams {
    pub fn new(delta: f64, v: f64, eps: f64, length: f64) -> Result<Self, InteractionError> {
        if !(v > 0.0 && v < 1.0) {
            return Err(InteractionError::Parameter(format!("velocity must satisfy 0 < v < 1, got {v}")));
        }
        if !delta.is_finite() {
            return Err(InteractionError::Parameter(format!("gap must be finite, got {delta}")));
        }
        if !eps.is_finite() {
            return Err(InteractionError::Parameter(format!("coupling must be finite, got {eps}")));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(InteractionError::Parameter(format!("length must be positive, got {length}")));
        }
        let gamma = 1.0 / (1.0 - v * v).sqrt();
        Ok(Self { delta, v, gamma, t_half: length / (2.0 * v * gamma), eps, length })
    }

    pub fn with_eps(self, eps: f64) -> Self {
        Self { eps, ..self }
    }

    /// `ε(τ) = ε sin²(πτ/T)`.
    pub fn switching(&self, tau: f64) -> f64 {
        let s = (PI * tau / self.t_half).sin();
        self.eps * s * s
    }

    /// `Λ(τ) = ε(τ) sin(mπ(vγτ/L − 1/2)) e^{−iΔτ}`.
    pub fn lambda_factor(&self, tau: f64, m: u32) -> Complex64 {
        let transverse = (m as f64 * PI * (self.v * self.gamma * tau / self.length - 0.5)).sin();
        Complex64::from_polar(self.switching(tau) * transverse, -self.delta * tau)
    }

    /// Largest acceleration at Rob's centre the kinematics allow, `2v`.
    pub fn accel_bound(&self) -> f64 {
        2.0 * self.v
    }
}

/// `sin(nπ/2)` exactly: the mode value at the centre of the cavity.
pub fn centre_factor(n: u32) -> f64 {
    match n % 4 {
        1 => 1.0,
        3 => -1.0,
        _ => 0.0,
    }
}

fn minus_i(z: Complex64) -> Complex64 {
    Complex64::new(z.im, -z.re)
}

fn inertial_amplitude(
    idx: ModeIndex,
    atom: &AtomParams,
    mode: &MinkowskiMode,
    from: f64,
    to: f64,
    quad: &QuadConfig,
) -> Result<Complex64, InteractionError> {
    let centre = centre_factor(idx.n);
    if centre == 0.0 {
        return Ok(Complex64::new(0.0, 0.0));
    }
    let freq = mode.omega * atom.gamma;
    let r = integrate(
        |tau: f64| atom.lambda_factor(tau, idx.m) * Complex64::from_polar(1.0, freq * tau),
        from,
        to,
        quad,
    )
    .map_err(|source| InteractionError::Quadrature { idx, source })?;
    Ok(minus_i(r.value) * (mode.norm * centre))
}

/// `F^A = −i N sin(nπ/2) ∫_{−3T}^{−T} Λ(τ) e^{iωγτ} dτ`; exactly zero for even `n`.
pub fn amplitude_alice(
    idx: ModeIndex,
    atom: &AtomParams,
    mode: &MinkowskiMode,
    quad: &QuadConfig,
) -> Result<Complex64, InteractionError> {
    inertial_amplitude(idx, atom, mode, -3.0 * atom.t_half, -atom.t_half, quad)
}

/// Rob's amplitude when his cavity is at rest: the same integral over
/// `[−T, T]` with his (possibly massive) inertial mode.
pub fn amplitude_rob_inertial(
    idx: ModeIndex,
    atom: &AtomParams,
    mode: &MinkowskiMode,
    quad: &QuadConfig,
) -> Result<Complex64, InteractionError> {
    inertial_amplitude(idx, atom, mode, -atom.t_half, atom.t_half, quad)
}

/// Proper time at which the atom, sitting at `χ(τ) = √(1/a² − γ²τ²)`, would
/// reach the inner wall; the interaction is confined to `|τ|` below the
/// smaller of this and `T`.
pub fn rob_reach(atom: &AtomParams, geom: &CavityGeometry) -> f64 {
    let l = geom.length();
    let exit = (0.5 * l * (2.0 / geom.accel() - 0.5 * l)).sqrt() / atom.gamma;
    exit.min(atom.t_half)
}

/// `F^R = −i Ñ ∫ Λ(τ) ũ(χ(τ)) e^{iΩ artanh(aγτ)} dτ` over the part of
/// `[−T, T]` the atom spends inside Rob's cavity.
pub fn amplitude_rob(
    idx: ModeIndex,
    atom: &AtomParams,
    mode: &RindlerMode,
    geom: &CavityGeometry,
    quad: &QuadConfig,
) -> Result<Complex64, InteractionError> {
    if geom.is_inertial() {
        return Err(InteractionError::InertialGeometry);
    }
    let a = geom.accel();
    if a >= atom.accel_bound() {
        return Err(InteractionError::KinematicBound { a, bound: atom.accel_bound() });
    }
    let reach = rob_reach(atom, geom);
    let centre = 1.0 / a;
    let half = 0.5 * geom.length();
    let g2 = atom.gamma * atom.gamma;
    let mut failure = None;
    let r = integrate(
        |tau: f64| {
            let drop = g2 * tau * tau;
            let chi = (centre * centre - drop).sqrt();
            let offset = (half - drop / (centre + chi)).max(0.0);
            let u = match mode.radial.at_offset(offset) {
                Ok(u) => u,
                Err(e) => {
                    failure.get_or_insert(e);
                    return Complex64::new(f64::NAN, 0.0);
                }
            };
            let phase = mode.omega * (a * atom.gamma * tau).atanh();
            atom.lambda_factor(tau, idx.m) * Complex64::from_polar(u, phase)
        },
        -reach,
        reach,
        quad,
    );
    if let Some(source) = failure {
        return Err(InteractionError::Bessel { idx, source });
    }
    let r = r.map_err(|source| InteractionError::Quadrature { idx, source })?;
    Ok(minus_i(r.value) * mode.norm)
}

/// `g_nm(κ) = (L/v)(Δ√(1−v²) − ω_nm(κ))`, the phase controlling constructive
/// (`g = 2πk`) and destructive interference in Rob's inertial amplitude.
pub fn resonance_phase(idx: ModeIndex, atom: &AtomParams, kappa: f64) -> f64 {
    let kn = idx.n as f64 * PI / atom.length;
    let km = idx.m as f64 * PI / atom.length;
    let omega = (kn * kn + km * km + kappa * kappa).sqrt();
    atom.length / atom.v * (atom.delta * (1.0 - atom.v * atom.v).sqrt() - omega)
}

/// Amplitudes for all modes with `n, m ≤ order`, indexed `[(n−1, m−1)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSet {
    pub order: u32,
    pub alice: DMatrix<Complex64>,
    pub rob: DMatrix<Complex64>,
    pub converged: bool,
    /// Weight of the first omitted shell relative to the total.
    pub tail_fraction: f64,
}

impl AmplitudeSet {
    pub fn zeros(order: u32) -> Self {
        let n = order as usize;
        Self {
            order,
            alice: DMatrix::zeros(n, n),
            rob: DMatrix::zeros(n, n),
            converged: false,
            tail_fraction: f64::NAN,
        }
    }

    /// Copy of the leading `order × order` block.
    pub fn truncated(&self, order: u32) -> Self {
        let n = order as usize;
        Self {
            order,
            alice: self.alice.view((0, 0), (n, n)).into_owned(),
            rob: self.rob.view((0, 0), (n, n)).into_owned(),
            converged: self.converged,
            tail_fraction: self.tail_fraction,
        }
    }

    /// Grow to `order`, keeping existing entries.
    pub fn grow(&mut self, order: u32) {
        let n = order as usize;
        let old = self.order as usize;
        if n <= old {
            return;
        }
        let mut alice = DMatrix::zeros(n, n);
        let mut rob = DMatrix::zeros(n, n);
        alice.view_mut((0, 0), (old, old)).copy_from(&self.alice);
        rob.view_mut((0, 0), (old, old)).copy_from(&self.rob);
        self.alice = alice;
        self.rob = rob;
        self.order = order;
    }

    pub fn set(&mut self, idx: ModeIndex, alice: Complex64, rob: Complex64) {
        let (i, j) = (idx.n as usize - 1, idx.m as usize - 1);
        self.alice[(i, j)] = alice;
        self.rob[(i, j)] = rob;
    }

    pub fn sum_alice_sq(&self) -> f64 {
        self.alice.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn sum_rob_sq(&self) -> f64 {
        self.rob.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `Σ(|F^A|² + |F^R|²)` over the modes with `max(n, m) == shell`.
    pub fn shell_weight(&self, shell: u32) -> f64 {
        ModeIndex::shell(shell)
            .filter(|idx| idx.n <= self.order && idx.m <= self.order)
            .map(|idx| {
                let (i, j) = (idx.n as usize - 1, idx.m as usize - 1);
                self.alice[(i, j)].norm_sqr() + self.rob[(i, j)].norm_sqr()
            })
            .sum()
    }

    /// Warn when the total emission probability leaves the first-order regime.
    pub fn check_perturbative(&self) -> bool {
        let total = self.sum_alice_sq() + self.sum_rob_sq();
        if total > PERTURBATIVE_LIMIT {
            log::warn!("total emission weight {total:.3e} exceeds {PERTURBATIVE_LIMIT:e}; first-order treatment is unreliable");
            return false;
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn atom() -> AtomParams {
        AtomParams::new(2f64.sqrt() * PI, 0.5, 0.01, 1.0).unwrap()
    }

    #[test]
    fn derived_quantities() {
        let a = atom();
        assert!((a.gamma - 1.0 / 0.75f64.sqrt()).abs() < 1e-15);
        assert!((a.t_half - 1.0 / (2.0 * a.v * a.gamma)).abs() < 1e-15);
        assert!(AtomParams::new(1.0, 1.0, 0.01, 1.0).is_err());
        assert!(AtomParams::new(1.0, 0.0, 0.01, 1.0).is_err());
        assert!(AtomParams::new(1.0, 1.2, 0.01, 1.0).is_err());
    }

    #[test]
    fn switching_zeros_and_peak() {
        let a = atom();
        let t = a.t_half;
        for tau in [-3.0 * t, -t, t, 0.0] {
            assert!(a.switching(tau).abs() < 1e-30 + 1e-17, "{tau}");
        }
        assert!((a.switching(-0.5 * t) - a.eps).abs() < 1e-17);
        assert!((a.with_eps(0.02).switching(0.3) - 2.0 * a.switching(0.3)).abs() < 1e-18);
    }

    #[test]
    fn lambda_values() {
        let a = atom();
        assert_eq!(a.lambda_factor(0.0, 1).norm(), 0.0);
        let tau = 1.0 / (4.0 * a.v * a.gamma);
        let l = a.lambda_factor(tau, 2);
        assert!((l.norm() - a.switching(tau)).abs() < 1e-17);
        let b = AtomParams { delta: 0.0, ..a };
        assert!((b.lambda_factor(0.7, 3).norm() - a.lambda_factor(0.7, 3).norm()).abs() < 1e-18);
    }

    #[test]
    fn centre_factor_exact() {
        assert_eq!(centre_factor(1), 1.0);
        assert_eq!(centre_factor(2), 0.0);
        assert_eq!(centre_factor(3), -1.0);
        assert_eq!(centre_factor(4), 0.0);
    }

    #[test]
    fn resonance_phase_reference() {
        let g = resonance_phase(ModeIndex::new(1, 1).unwrap(), &atom(), 0.0);
        assert!((g - PI * 2f64.sqrt() * (3f64.sqrt() - 2.0)).abs() < 1e-14);
        assert!((g + 1.190_466_9).abs() < 1e-7);
    }

    #[test]
    fn amplitude_set_growth_and_shells() {
        let mut s = AmplitudeSet::zeros(1);
        s.set(ModeIndex::new(1, 1).unwrap(), Complex64::new(1.0, 0.0), Complex64::new(0.0, 1.0));
        s.grow(2);
        s.set(ModeIndex::new(2, 1).unwrap(), Complex64::new(0.5, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(s.shell_weight(1), 2.0);
        assert_eq!(s.shell_weight(2), 0.25);
        assert_eq!(s.truncated(1).sum_alice_sq(), 1.0);
        assert!(!s.check_perturbative());
    }
}

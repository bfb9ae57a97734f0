//! Reduced state of Rob's cavity after post-selecting the atom in its ground
//! state, and its von Neumann entropy.
//!
//! With `p₀ = Σ|F^A|²` and `f = (F^R_11, …, F^R_NN)` the unnormalized state is
//! `p₀ |0⟩⟨0| ⊕ f f†`. The excitation block has rank one, so the normalized
//! spectrum is `{p, 1 − p, 0, …}` and the entropy is the binary entropy of
//! `p = p₀ / (p₀ + |f|²)`. Entropies are in bits.

use crate::geometry::ModeIndex;
use crate::interaction::AmplitudeSet;
use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

/// Amplitudes below this magnitude are treated as absent.
pub const DEGENERATE_AMPLITUDE: f64 = 1e-30;
pub const DEFAULT_MAX_ORDER: u32 = 64;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum EntanglementError {
    #[error("all amplitudes vanish (below {DEGENERATE_AMPLITUDE:e}); no interaction took place")]
    Degenerate,
    #[error("eigen-decomposition returned non-finite eigenvalues")]
    EigenSolver,
    #[error("truncation tolerance must be positive, got {0}")]
    Tolerance(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReducedState {
    /// `Σ|F^A|²`
    pub p0_raw: f64,
    /// `F^R` flattened in row-major `(n, m)` order.
    pub f_vec: Vec<Complex64>,
    pub trace_raw: f64,
    pub order: u32,
    pub converged: bool,
}

impl ReducedState {
    pub fn from_parts(p0_raw: f64, f_vec: Vec<Complex64>) -> Result<Self, EntanglementError> {
        let excitation: f64 = f_vec.iter().map(|z| z.norm_sqr()).sum();
        let largest = f_vec.iter().fold(p0_raw.sqrt(), |m, z| m.max(z.norm()));
        if !(largest >= DEGENERATE_AMPLITUDE) {
            return Err(EntanglementError::Degenerate);
        }
        let order = (f_vec.len() as f64).sqrt().round() as u32;
        Ok(Self { p0_raw, f_vec, trace_raw: p0_raw + excitation, order, converged: true })
    }

    /// Normalized vacuum weight.
    pub fn p(&self) -> f64 {
        self.p0_raw / self.trace_raw
    }

    /// The normalized `(N²+1)×(N²+1)` density matrix.
    pub fn density_matrix(&self) -> DMatrix<Complex64> {
        let dim = self.f_vec.len() + 1;
        let scale = 1.0 / self.trace_raw;
        DMatrix::from_fn(dim, dim, |i, j| match (i, j) {
            (0, 0) => Complex64::new(self.p0_raw * scale, 0.0),
            (0, _) | (_, 0) => Complex64::new(0.0, 0.0),
            _ => self.f_vec[i - 1] * self.f_vec[j - 1].conj() * scale,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntanglementResult {
    pub p: f64,
    pub entropy: f64,
    pub order: u32,
    pub converged: bool,
}

/// Build the reduced state from an amplitude set.
pub fn assemble(amps: &AmplitudeSet) -> Result<ReducedState, EntanglementError> {
    let mut f_vec = Vec::with_capacity(amps.rob.len());
    for i in 0..amps.rob.nrows() {
        for j in 0..amps.rob.ncols() {
            f_vec.push(amps.rob[(i, j)]);
        }
    }
    let mut state = ReducedState::from_parts(amps.sum_alice_sq(), f_vec)?;
    state.order = amps.order;
    state.converged = amps.converged;
    Ok(state)
}

/// `−p log₂ p − (1−p) log₂(1−p)`.
pub fn binary_entropy(p: f64) -> f64 {
    xlog2x(p) + xlog2x(1.0 - p)
}

fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Entropy from the rank-one structure alone.
pub fn entropy_closed(state: &ReducedState) -> f64 {
    binary_entropy(state.p())
}

/// Entropy from a full Hermitian eigen-decomposition of the density matrix.
pub fn entropy_eig(state: &ReducedState) -> Result<EntanglementResult, EntanglementError> {
    let eigen = state.density_matrix().symmetric_eigenvalues();
    if eigen.iter().any(|l| !l.is_finite()) {
        return Err(EntanglementError::EigenSolver);
    }
    let entropy: f64 = eigen.iter().map(|&l| xlog2x(l)).sum();
    Ok(EntanglementResult { p: state.p(), entropy: entropy.clamp(0.0, 1.0), order: state.order, converged: state.converged })
}

/// Truncation failed to settle within the order cap; the last set is kept for
/// diagnostics.
#[derive(Debug, Clone, Error)]
pub enum TruncationError<E> {
    #[error(transparent)]
    Generator(E),
    #[error(transparent)]
    State(EntanglementError),
    #[error("no convergence up to N = {order}: entropy change {entropy_change:.3e}, tail fraction {tail_fraction:.3e}")]
    NotConverged { order: u32, entropy_change: f64, tail_fraction: f64, last: Box<AmplitudeSet> },
}

/// Grow the mode set shell by shell until adding shell `N+1` changes the
/// entropy by less than `tol` and carries less than `tol` of the total
/// weight. Returns the set at `N`, with `tail_fraction` the weight share of
/// shell `N+1`.
pub fn truncation_scan<E, F>(mut generator: F, tol: f64, max_order: u32) -> Result<AmplitudeSet, TruncationError<E>>
where
    F: FnMut(ModeIndex) -> Result<(Complex64, Complex64), E>,
{
    if !(tol > 0.0) {
        return Err(TruncationError::State(EntanglementError::Tolerance(tol)));
    }
    let mut amps = AmplitudeSet::zeros(0);
    let mut add_shell = |amps: &mut AmplitudeSet, shell: u32| -> Result<(), E> {
        amps.grow(shell);
        for idx in ModeIndex::shell(shell) {
            let (fa, fr) = generator(idx)?;
            amps.set(idx, fa, fr);
        }
        Ok(())
    };
    add_shell(&mut amps, 1).map_err(TruncationError::Generator)?;
    let mut previous = state_entropy(&amps).ok();
    let mut change = f64::INFINITY;
    let mut fraction = f64::INFINITY;
    for next in 2..=max_order + 1 {
        add_shell(&mut amps, next).map_err(TruncationError::Generator)?;
        let total = amps.sum_alice_sq() + amps.sum_rob_sq();
        let current = state_entropy(&amps).map_err(TruncationError::State)?;
        fraction = if total > 0.0 { amps.shell_weight(next) / total } else { 0.0 };
        change = previous.map_or(f64::INFINITY, |p| (current - p).abs());
        if change < tol && fraction < tol {
            let mut out = amps.truncated(next - 1);
            out.converged = true;
            out.tail_fraction = fraction;
            return Ok(out);
        }
        previous = Some(current);
    }
    let mut last = amps.truncated(max_order);
    last.tail_fraction = fraction;
    Err(TruncationError::NotConverged { order: max_order, entropy_change: change, tail_fraction: fraction, last: Box::new(last) })
}

fn state_entropy(amps: &AmplitudeSet) -> Result<f64, EntanglementError> {
    Ok(entropy_closed(&assemble(amps)?))
}

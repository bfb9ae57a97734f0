//! Full evaluation at one `(a, κ)` point: modes, amplitudes, truncation and
//! entropy.
//!
//! Alice's field is massless; the bare mass `κ` belongs to Rob's field only.

use crate::entanglement::{self, EntanglementError, EntanglementResult, TruncationError};
use crate::geometry::{CavityGeometry, GeometryError, ModeIndex};
use crate::interaction::{self, AmplitudeSet, AtomParams, InteractionError};
use crate::modes::{self, ModeCatalog, ModeError};
use crate::quadrature::QuadConfig;
use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum PipelineError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mode(#[from] ModeError),
    #[error(transparent)]
    Interaction(#[from] InteractionError),
    #[error(transparent)]
    Entanglement(#[from] EntanglementError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointParams {
    pub accel: f64,
    pub kappa: f64,
    pub atom: AtomParams,
    pub quad_tol: f64,
    pub trunc_tol: f64,
    pub max_order: u32,
}

#[derive(Debug, Clone)]
pub struct PointOutcome {
    pub amps: AmplitudeSet,
    pub result: EntanglementResult,
    pub sum_alice_sq: f64,
    pub sum_rob_sq: f64,
    /// Why the point is not converged, when it is not.
    pub note: Option<String>,
}

enum RobModes {
    Inertial,
    Accelerated(Box<ModeCatalog>),
}

/// Amplitude generator for one grid point. Rob's accelerated modes are
/// solved lazily and cached for the lifetime of the solver.
pub struct PointSolver {
    params: PointParams,
    alice_geom: CavityGeometry,
    rob_geom: CavityGeometry,
    quad: QuadConfig,
    rob: RobModes,
}

impl PointSolver {
    pub fn new(params: PointParams) -> Result<Self, PipelineError> {
        let length = params.atom.length;
        let alice_geom = CavityGeometry::new(length, 0.0)?;
        let rob_geom = CavityGeometry::new(length, params.accel)?;
        if params.accel >= params.atom.accel_bound() {
            return Err(InteractionError::KinematicBound { a: params.accel, bound: params.atom.accel_bound() }.into());
        }
        let rob = if rob_geom.is_inertial() {
            RobModes::Inertial
        } else {
            RobModes::Accelerated(Box::new(ModeCatalog::new(rob_geom, params.kappa)?))
        };
        let quad = QuadConfig::new(params.quad_tol, 0.0);
        Ok(Self { params, alice_geom, rob_geom, quad, rob })
    }

    pub fn params(&self) -> &PointParams {
        &self.params
    }

    pub fn alice(&self, idx: ModeIndex) -> Result<Complex64, PipelineError> {
        let mode = modes::minkowski_mode(idx, &self.alice_geom, 0.0)?;
        Ok(interaction::amplitude_alice(idx, &self.params.atom, &mode, &self.quad)?)
    }

    pub fn rob(&mut self, idx: ModeIndex) -> Result<Complex64, PipelineError> {
        let atom = &self.params.atom;
        match &mut self.rob {
            RobModes::Inertial => {
                let mode = modes::minkowski_mode(idx, &self.rob_geom, self.params.kappa)?;
                Ok(interaction::amplitude_rob_inertial(idx, atom, &mode, &self.quad)?)
            }
            RobModes::Accelerated(catalog) => {
                let mode = catalog.get(idx)?;
                Ok(interaction::amplitude_rob(idx, atom, mode, &self.rob_geom, &self.quad)?)
            }
        }
    }

    pub fn amplitudes(&mut self, idx: ModeIndex) -> Result<(Complex64, Complex64), PipelineError> {
        Ok((self.alice(idx)?, self.rob(idx)?))
    }

    /// Run the truncation scan and evaluate the entropy. Truncation that does
    /// not settle yields an outcome flagged as not converged.
    pub fn solve(&mut self) -> Result<PointOutcome, PipelineError> {
        let (tol, cap) = (self.params.trunc_tol, self.params.max_order);
        let (amps, note) = match entanglement::truncation_scan(|idx| self.amplitudes(idx), tol, cap) {
            Ok(a) => (a, None),
            Err(TruncationError::Generator(e)) => return Err(e),
            Err(TruncationError::State(e)) => return Err(e.into()),
            Err(e @ TruncationError::NotConverged { .. }) => {
                let note = e.to_string();
                let TruncationError::NotConverged { last, .. } = e else { unreachable!() };
                (*last, Some(note))
            }
        };
        amps.check_perturbative();
        let state = entanglement::assemble(&amps)?;
        let result = entanglement::entropy_eig(&state)?;
        let closed = entanglement::entropy_closed(&state);
        if (result.entropy - closed).abs() > 1e-10 {
            log::warn!("eigen-decomposition entropy {} differs from closed form {closed}", result.entropy);
        }
        Ok(PointOutcome {
            sum_alice_sq: amps.sum_alice_sq(),
            sum_rob_sq: amps.sum_rob_sq(),
            amps,
            result,
            note,
        })
    }
}

/// Convenience wrapper around [`PointSolver`].
pub fn solve_point(params: PointParams) -> Result<PointOutcome, PipelineError> {
    PointSolver::new(params)?.solve()
}

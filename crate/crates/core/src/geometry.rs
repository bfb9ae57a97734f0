//! Cavity geometry and mode labels.
//!
//! Both cavities have proper length `L` in each direction. Alice's cavity is
//! inertial and occupies `y ∈ [−3L/2, −L/2]`; Rob's cavity occupies
//! `y ∈ [−L/2, L/2]` and accelerates along `x` with proper acceleration `a` at
//! its centre, so its walls sit at Rindler coordinates `χ± = 1/a ± L/2`.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum GeometryError {
    #[error("cavity length must be positive and finite, got {0}")]
    Length(f64),
    #[error("acceleration must be non-negative and finite, got {0}")]
    Acceleration(f64),
    #[error("a·L = {0} must be below 2 for the cavity to fit inside the Rindler wedge")]
    BeyondHorizon(f64),
    #[error("mode numbers start at 1, got (n, m) = ({n}, {m})")]
    ModeIndex { n: u32, m: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityGeometry {
    length: f64,
    accel: f64,
}

impl CavityGeometry {
    pub fn new(length: f64, accel: f64) -> Result<Self, GeometryError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(GeometryError::Length(length));
        }
        if !(accel >= 0.0) || !accel.is_finite() {
            return Err(GeometryError::Acceleration(accel));
        }
        if accel * length >= 2.0 {
            return Err(GeometryError::BeyondHorizon(accel * length));
        }
        Ok(Self { length, accel })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn accel(&self) -> f64 {
        self.accel
    }

    pub fn is_inertial(&self) -> bool {
        self.accel == 0.0
    }

    /// Rindler coordinate of Rob's cavity centre, `1/a`.
    pub fn chi_centre(&self) -> f64 {
        1.0 / self.accel
    }

    pub fn chi_minus(&self) -> f64 {
        1.0 / self.accel - 0.5 * self.length
    }

    pub fn chi_plus(&self) -> f64 {
        1.0 / self.accel + 0.5 * self.length
    }

    /// Inertial walls coincide with the Rindler walls at `t = 0`.
    pub fn x_minus(&self) -> f64 {
        self.chi_minus()
    }

    pub fn x_plus(&self) -> f64 {
        self.chi_plus()
    }

    /// `ln(χ₊/χ₋)`, the cavity width in the logarithmic coordinate.
    pub fn log_span(&self) -> f64 {
        (self.length / self.chi_minus()).ln_1p()
    }

    pub fn alice_y(&self) -> (f64, f64) {
        (-1.5 * self.length, -0.5 * self.length)
    }

    pub fn rob_y(&self) -> (f64, f64) {
        (-0.5 * self.length, 0.5 * self.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ModeIndex {
    pub n: u32,
    pub m: u32,
}

impl ModeIndex {
    pub fn new(n: u32, m: u32) -> Result<Self, GeometryError> {
        if n == 0 || m == 0 {
            return Err(GeometryError::ModeIndex { n, m });
        }
        Ok(Self { n, m })
    }

    /// Modes with `max(n, m) == shell`, in row-major order.
    pub fn shell(shell: u32) -> impl Iterator<Item = ModeIndex> {
        (1..=shell).flat_map(move |n| {
            (1..=shell).filter_map(move |m| (n.max(m) == shell).then_some(ModeIndex { n, m }))
        })
    }
}

impl fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.n, self.m)
    }
}

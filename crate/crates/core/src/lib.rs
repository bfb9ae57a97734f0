//! Entanglement generated between an inertial cavity and a uniformly
//! accelerated cavity by a two-level atom crossing both in turn.

pub mod bessel;
pub mod entanglement;
pub mod gamma;
pub mod geometry;
pub mod interaction;
pub mod modes;
pub mod pipeline;
pub mod quadrature;
pub mod roots;
pub mod shooting;
pub mod sweep;

//! Mode catalogs for the inertial and the accelerated cavity.
//!
//! Inertial modes are closed form. Accelerated modes have the radial profile
//!
//! `ũ(χ) = Re I_{iΩ}(κ_m χ₋) K_{iΩ}(κ_m χ) − K_{iΩ}(κ_m χ₋) Re I_{iΩ}(κ_m χ)`
//!
//! with `κ_m² = (mπ/L)² + κ²`. The Wronskian fixes `ũ(χ₋) = 0` and
//! `χ₋ ũ'(χ₋) = −1`, so the same function is the solution of the radial
//! equation in `σ = ln(χ/χ₋)` seeded with `u(0) = 0`, `u'(0) = −1`. Inside the
//! validated Bessel envelope the closed form is used; outside it (small `a`
//! pushes `Ω` into the thousands) the equation is integrated directly.

use crate::bessel::{self, BesselError, BesselEvalConfig};
use crate::geometry::{CavityGeometry, GeometryError, ModeIndex};
use crate::quadrature::{integrate, QuadConfig, QuadError};
use crate::roots::{refine_bracket, scan_brackets, RootError};
use crate::shooting::{RadialOde, RadialProfile};
use std::f64::consts::{LN_2, PI};
use std::fmt::Write as _;
use std::sync::Arc;
use thiserror::Error;

/// Largest order evaluated through the Bessel form.
pub const BESSEL_MAX_ORDER: f64 = 30.0;
/// Largest argument `κ_m χ₊` evaluated through the Bessel form.
pub const BESSEL_MAX_ARG: f64 = 50.0;
const BESSEL_MIN_ARG: f64 = 1e-3;

/// Default absolute tolerance on Rindler eigenfrequencies.
pub const ROOT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModeError {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("accelerated modes need a > 0")]
    Inertial,
    #[error("mass must be non-negative and finite, got {0}")]
    Mass(f64),
    #[error("radial coordinate {chi} outside the cavity [{lo}, {hi}]")]
    Coordinate { chi: f64, lo: f64, hi: f64 },
    #[error(transparent)]
    Bessel(#[from] BesselError),
    #[error("normalization quadrature failed: {0}")]
    Quadrature(#[from] QuadError),
    #[error("eigenfrequency search for m = {m}: {source}")]
    Root { m: u32, source: RootError<BesselError> },
    #[error("interlacing check failed below mode ({n}, {m}) at Omega = {omega}: {zeros} interior nodes, expected {expected}")]
    Interlacing { n: u32, m: u32, omega: f64, zeros: usize, expected: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinkowskiMode {
    pub idx: ModeIndex,
    pub omega: f64,
    pub norm: f64,
}

impl MinkowskiMode {
    /// Longitudinal profile `sin(nπ(x − x₋)/L)` at offset `x − x₋`.
    pub fn profile(&self, offset: f64, length: f64) -> f64 {
        (self.idx.n as f64 * PI * offset / length).sin()
    }
}

fn check_mass(kappa: f64) -> Result<(), ModeError> {
    if !(kappa >= 0.0) || !kappa.is_finite() {
        return Err(ModeError::Mass(kappa));
    }
    Ok(())
}

/// Inertial mode with `ω² = (nπ/L)² + (mπ/L)² + κ²` and `N = √2/√(ωL²)`.
pub fn minkowski_mode(idx: ModeIndex, geom: &CavityGeometry, kappa: f64) -> Result<MinkowskiMode, ModeError> {
    check_mass(kappa)?;
    let l = geom.length();
    let kn = idx.n as f64 * PI / l;
    let km = idx.m as f64 * PI / l;
    let omega = (kn * kn + km * km + kappa * kappa).sqrt();
    let norm = 2f64.sqrt() / (omega * l * l).sqrt();
    Ok(MinkowskiMode { idx, omega, norm })
}

/// `κ_m = √((mπ/L)² + κ²)`.
pub fn effective_mass(m: u32, length: f64, kappa: f64) -> f64 {
    (m as f64 * PI / length).hypot(kappa)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialMethod {
    /// `κ_m = 0`: `ũ = −sin(Ω σ)/Ω`.
    LogBranch,
    Bessel,
    Shooting,
}

/// Evaluation route for a trial frequency.
pub fn radial_method(omega: f64, kappa_m: f64, geom: &CavityGeometry) -> RadialMethod {
    if kappa_m == 0.0 {
        RadialMethod::LogBranch
    } else if omega <= BESSEL_MAX_ORDER
        && kappa_m * geom.chi_plus() <= BESSEL_MAX_ARG
        && kappa_m * geom.chi_minus() >= BESSEL_MIN_ARG
    {
        RadialMethod::Bessel
    } else {
        RadialMethod::Shooting
    }
}

fn check_accelerated(geom: &CavityGeometry) -> Result<(), ModeError> {
    if geom.is_inertial() {
        return Err(ModeError::Inertial);
    }
    Ok(())
}

/// `σ = ln(χ/χ₋)` from the offset `χ − χ₋`.
fn log_coordinate(offset: f64, chi_minus: f64) -> f64 {
    (offset / chi_minus).ln_1p()
}

fn log_branch(omega: f64, sigma: f64) -> f64 {
    if omega == 0.0 {
        -sigma
    } else {
        -(omega * sigma).sin() / omega
    }
}

/// Bessel form at offset `χ − χ₋`, given the inner-wall values.
fn bessel_form(
    omega: f64,
    kappa_m: f64,
    chi_minus: f64,
    offset: f64,
    inner: &bessel::BesselValues,
    cfg: &BesselEvalConfig,
) -> Result<f64, BesselError> {
    if offset == 0.0 {
        return Ok(0.0);
    }
    let v = bessel::evaluate(omega, kappa_m * (chi_minus + offset), cfg)?;
    Ok(inner.rei * v.k - inner.k * v.rei)
}

fn radial_at_offset(
    omega: f64,
    kappa_m: f64,
    geom: &CavityGeometry,
    offset: f64,
    cfg: &BesselEvalConfig,
) -> Result<f64, BesselError> {
    let chi_minus = geom.chi_minus();
    let sigma = log_coordinate(offset, chi_minus);
    match radial_method(omega, kappa_m, geom) {
        RadialMethod::LogBranch => Ok(log_branch(omega, sigma)),
        RadialMethod::Bessel => {
            let inner = bessel::evaluate(omega, kappa_m * chi_minus, cfg)?;
            bessel_form(omega, kappa_m, chi_minus, offset, &inner, cfg)
        }
        RadialMethod::Shooting => Ok(RadialOde::new(kappa_m * chi_minus, omega).shoot(sigma)[0]),
    }
}

/// Unnormalized radial profile `ũ(χ; Ω)` of the accelerated cavity.
pub fn radial_eval(omega: f64, kappa_m: f64, geom: &CavityGeometry, chi: f64) -> Result<f64, ModeError> {
    check_accelerated(geom)?;
    check_mass(kappa_m)?;
    let (lo, hi) = (geom.chi_minus(), geom.chi_plus());
    if !(chi >= lo && chi <= hi) {
        return Err(ModeError::Coordinate { chi, lo, hi });
    }
    Ok(radial_at_offset(omega, kappa_m, geom, chi - lo, &BesselEvalConfig::default())?)
}

/// Rigorous bounds on the `n`-th eigenfrequency from Sturm comparison with
/// the constant-coefficient problems at either wall.
pub fn eigenfrequency_bounds(n: u32, kappa_m: f64, geom: &CavityGeometry) -> (f64, f64) {
    let span = geom.log_span();
    let k = n as f64 * PI / span;
    let inner = kappa_m * geom.chi_minus();
    let outer = kappa_m * geom.chi_plus();
    (inner.hypot(k), outer.hypot(k))
}

/// Relative accuracy of the coarse shots used while scanning for brackets.
const SCAN_TARGET: f64 = 1e-7;

/// First `count` eigenfrequencies for effective mass `kappa_m`, ascending.
///
/// Brackets come from an upward scan with cheap, lower-accuracy shots; each
/// is confirmed and refined at full accuracy. The result is then checked for
/// interlacing: just below the `k`-th root (midway from its predecessor) the
/// radial solution must have exactly `k − 1` interior nodes.
pub fn eigenfrequencies(count: u32, kappa_m: f64, geom: &CavityGeometry, tol: f64) -> Result<Vec<f64>, ModeError> {
    let mut roots = Vec::new();
    extend_eigenfrequencies(&mut roots, count, kappa_m, geom, tol)?;
    Ok(roots)
}

/// Append eigenfrequencies to `roots` (the first `roots.len()` already known)
/// until it holds `count`.
pub fn extend_eigenfrequencies(
    roots: &mut Vec<f64>,
    count: u32,
    kappa_m: f64,
    geom: &CavityGeometry,
    tol: f64,
) -> Result<(), ModeError> {
    check_accelerated(geom)?;
    check_mass(kappa_m)?;
    let known = roots.len();
    if known >= count as usize {
        return Ok(());
    }
    let cfg = BesselEvalConfig::default();
    let span = geom.log_span();
    let coupling = kappa_m * geom.chi_minus();
    // Root spacing in Ω is at least π / (span + ln 2).
    let step = PI / (span + LN_2) / 4.0;
    let (lower, _) = eigenfrequency_bounds(1, kappa_m, geom);
    let (_, upper) = eigenfrequency_bounds(count, kappa_m, geom);
    let floor = (lower - step).max(0.0);
    let start = roots.last().map_or(floor, |&r| r + 0.5 * step);
    let limit = upper + 2.0 * step;
    let tol = tol.max(8.0 * f64::EPSILON * limit);
    let end = geom.length();
    let root_err = |source| ModeError::Root { m: 0, source };

    let fine = |omega: f64| radial_at_offset(omega, kappa_m, geom, end, &cfg);
    let coarse = |omega: f64| match radial_method(omega, kappa_m, geom) {
        RadialMethod::Shooting => Ok(RadialOde::new(coupling, omega).shoot_to(span, SCAN_TARGET)[0]),
        _ => fine(omega),
    };
    let brackets = scan_brackets(coarse, start, step, count as usize - known, limit).map_err(root_err)?;
    for (lo, hi) in brackets {
        let (mut lo, mut hi) = (lo, hi);
        let (mut f_lo, mut f_hi) = (fine(lo)?, fine(hi)?);
        // A coarse sign can be wrong only when the root sits at a scan point.
        if f_lo != 0.0 && f_hi != 0.0 && f_lo.signum() == f_hi.signum() {
            let (a, b) = ((lo - step).max(start), hi + step);
            let (fa, fb) = (fine(a)?, fine(b)?);
            if fa.signum() == f_lo.signum() {
                (lo, f_lo) = (hi, f_hi);
                (hi, f_hi) = (b, fb);
            } else {
                (hi, f_hi) = (lo, f_lo);
                (lo, f_lo) = (a, fa);
            }
        }
        roots.push(refine_bracket(fine, lo, hi, f_lo, f_hi, tol, 200).map_err(root_err)?);
    }
    verify_interlacing(roots, known, floor, coupling, span)
}

fn verify_interlacing(roots: &[f64], from: usize, floor: f64, coupling: f64, span: f64) -> Result<(), ModeError> {
    let mut below = if from == 0 { floor } else { roots[from - 1] };
    for (k, &omega) in roots.iter().enumerate().skip(from) {
        let probe = 0.5 * (below + omega);
        let zeros = RadialProfile::build_to(RadialOde::new(coupling, probe), span, SCAN_TARGET).interior_zeros();
        if zeros != k || !(omega > below) {
            return Err(ModeError::Interlacing { n: k as u32 + 1, m: 0, omega, zeros, expected: k });
        }
        below = omega;
    }
    Ok(())
}

/// The `n`-th eigenfrequency (`n ≥ 1`).
pub fn eigenfrequency_solve(n: u32, kappa_m: f64, geom: &CavityGeometry, tol: f64) -> Result<f64, ModeError> {
    let roots = eigenfrequencies(n.max(1), kappa_m, geom, tol)?;
    Ok(roots[roots.len() - 1])
}

/// The solved mode written from the outer wall,
/// `s·(Re I_{iΩ}(κ_m χ₊) K_{iΩ}(x) − K_{iΩ}(κ_m χ₊) Re I_{iΩ}(x))`, with `s` matching
/// the inner seed's slope. Beyond the turning point `x = Ω` the inner form
/// loses its value at `χ₊` to cancellation between terms of size `Re I(κ_m χ₊)`;
/// this one vanishes there by construction.
#[derive(Debug, Clone)]
struct OuterForm {
    rei: f64,
    k: f64,
    scale: f64,
}

impl OuterForm {
    fn new(
        omega: f64,
        kappa_m: f64,
        geom: &CavityGeometry,
        inner: &bessel::BesselValues,
        cfg: &BesselEvalConfig,
    ) -> Result<Option<Self>, BesselError> {
        if kappa_m * geom.chi_plus() <= omega {
            return Ok(None);
        }
        let wall = bessel::evaluate(omega, kappa_m * geom.chi_plus(), cfg)?;
        let slope = kappa_m * geom.chi_minus() * (wall.rei * inner.k_deriv - wall.k * inner.rei_deriv);
        if slope == 0.0 || !slope.is_finite() {
            return Ok(None);
        }
        Ok(Some(Self { rei: wall.rei, k: wall.k, scale: -1.0 / slope }))
    }

    fn eval(&self, omega: f64, x: f64, cfg: &BesselEvalConfig) -> Result<f64, BesselError> {
        let v = bessel::evaluate(omega, x, cfg)?;
        Ok(self.scale * (self.rei * v.k - self.k * v.rei))
    }
}

#[derive(Debug, Clone)]
enum RadialKind {
    Log,
    Bessel { inner: bessel::BesselValues, outer: Option<OuterForm> },
    Profile(Arc<RadialProfile>),
}

/// Deterministic evaluator `χ ↦ ũ(χ)` for a solved mode.
#[derive(Debug, Clone)]
pub struct RadialFunction {
    kind: RadialKind,
    omega: f64,
    kappa_m: f64,
    chi_minus: f64,
    length: f64,
    cfg: BesselEvalConfig,
}

impl RadialFunction {
    fn new(omega: f64, kappa_m: f64, geom: &CavityGeometry, cfg: BesselEvalConfig) -> Result<Self, BesselError> {
        let chi_minus = geom.chi_minus();
        let kind = match radial_method(omega, kappa_m, geom) {
            RadialMethod::LogBranch => RadialKind::Log,
            RadialMethod::Bessel => {
                let inner = bessel::evaluate(omega, kappa_m * chi_minus, &cfg)?;
                let outer = OuterForm::new(omega, kappa_m, geom, &inner, &cfg)?;
                RadialKind::Bessel { inner, outer }
            }
            RadialMethod::Shooting => {
                let ode = RadialOde::new(kappa_m * chi_minus, omega);
                RadialKind::Profile(Arc::new(RadialProfile::build(ode, geom.log_span())))
            }
        };
        Ok(Self { kind, omega, kappa_m, chi_minus, length: geom.length(), cfg })
    }

    pub fn method(&self) -> RadialMethod {
        match self.kind {
            RadialKind::Log => RadialMethod::LogBranch,
            RadialKind::Bessel { .. } => RadialMethod::Bessel,
            RadialKind::Profile(_) => RadialMethod::Shooting,
        }
    }

    /// `ũ` at offset `χ − χ₋ ∈ [0, L]`.
    pub fn at_offset(&self, offset: f64) -> Result<f64, BesselError> {
        let offset = offset.clamp(0.0, self.length);
        match &self.kind {
            RadialKind::Log => Ok(log_branch(self.omega, log_coordinate(offset, self.chi_minus))),
            RadialKind::Bessel { outer: Some(outer), .. } if self.kappa_m * (self.chi_minus + offset) > self.omega => {
                outer.eval(self.omega, self.kappa_m * (self.chi_minus + offset), &self.cfg)
            }
            RadialKind::Bessel { inner, .. } => bessel_form(self.omega, self.kappa_m, self.chi_minus, offset, inner, &self.cfg),
            RadialKind::Profile(p) => Ok(p.eval(log_coordinate(offset, self.chi_minus))[0]),
        }
    }

    /// `ũ` at the Rindler coordinate `χ`.
    pub fn at(&self, chi: f64) -> Result<f64, BesselError> {
        self.at_offset(chi - self.chi_minus)
    }

    /// `ũ` at `σ = ln(χ/χ₋)`.
    pub fn at_log(&self, sigma: f64) -> Result<f64, BesselError> {
        match &self.kind {
            RadialKind::Log => Ok(log_branch(self.omega, sigma)),
            RadialKind::Profile(p) => Ok(p.eval(sigma)[0]),
            RadialKind::Bessel { .. } => self.at_offset(self.chi_minus * sigma.exp_m1()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RindlerMode {
    pub idx: ModeIndex,
    pub kappa_m: f64,
    /// Dimensionless frequency conjugate to Rindler time.
    pub omega: f64,
    pub norm: f64,
    pub radial: RadialFunction,
}

impl RindlerMode {
    /// Proper frequency measured at the cavity centre, `Ω·a`.
    pub fn proper_frequency(&self, geom: &CavityGeometry) -> f64 {
        self.omega * geom.accel()
    }
}

/// `Ñ = [Ω L ∫ ũ²/χ dχ]^{−1/2}`; the integral is taken in `σ`, where it
/// reads `∫_0^{ln(χ₊/χ₋)} u² dσ`.
pub fn rindler_norm(radial: &RadialFunction, geom: &CavityGeometry, quad: &QuadConfig) -> Result<f64, ModeError> {
    let mut failure = None;
    let r = integrate(
        |s: f64| match radial.at_log(s) {
            Ok(u) => u * u,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        0.0,
        geom.log_span(),
        quad,
    );
    if let Some(e) = failure {
        return Err(e.into());
    }
    let weight = r?.value;
    Ok(1.0 / (radial.omega * geom.length() * weight).sqrt())
}

/// Normalization quadrature used for catalogued modes.
pub fn norm_quad() -> QuadConfig {
    QuadConfig::new(1e-10, 0.0)
}

/// Solve, verify and normalize one accelerated mode.
pub fn rindler_mode(idx: ModeIndex, geom: &CavityGeometry, kappa: f64, tol: f64) -> Result<RindlerMode, ModeError> {
    let kappa_m = effective_mass(idx.m, geom.length(), kappa);
    let omega = eigenfrequency_solve(idx.n, kappa_m, geom, tol).map_err(|e| tag_root(e, idx.m))?;
    build_mode(idx, kappa_m, omega, geom)
}

fn tag_root(e: ModeError, m: u32) -> ModeError {
    match e {
        ModeError::Root { source, .. } => ModeError::Root { m, source },
        ModeError::Interlacing { n, omega, zeros, expected, .. } => ModeError::Interlacing { n, m, omega, zeros, expected },
        other => other,
    }
}

fn build_mode(idx: ModeIndex, kappa_m: f64, omega: f64, geom: &CavityGeometry) -> Result<RindlerMode, ModeError> {
    let radial = RadialFunction::new(omega, kappa_m, geom, BesselEvalConfig::default())?;
    let norm = rindler_norm(&radial, geom, &norm_quad())?;
    Ok(RindlerMode { idx, kappa_m, omega, norm, radial })
}

/// Accelerated modes for one `(a, κ)` pair, grown on demand per transverse
/// index. Eigenfrequencies for a given `m` come from a single scan.
#[derive(Debug, Clone)]
pub struct ModeCatalog {
    geom: CavityGeometry,
    kappa: f64,
    tol: f64,
    columns: Vec<Vec<RindlerMode>>,
    roots: Vec<Vec<f64>>,
}

impl ModeCatalog {
    pub fn new(geom: CavityGeometry, kappa: f64) -> Result<Self, ModeError> {
        check_accelerated(&geom)?;
        check_mass(kappa)?;
        Ok(Self { geom, kappa, tol: ROOT_TOL, columns: Vec::new(), roots: Vec::new() })
    }

    pub fn geometry(&self) -> &CavityGeometry {
        &self.geom
    }

    /// Make sure every mode with `n, m ≤ order` is present.
    pub fn ensure(&mut self, order: u32) -> Result<(), ModeError> {
        while self.columns.len() < order as usize {
            self.columns.push(Vec::new());
            self.roots.push(Vec::new());
        }
        for m in 1..=order {
            let have = self.columns[m as usize - 1].len() as u32;
            if have >= order {
                continue;
            }
            let kappa_m = effective_mass(m, self.geom.length(), self.kappa);
            let roots = &mut self.roots[m as usize - 1];
            extend_eigenfrequencies(roots, order, kappa_m, &self.geom, self.tol).map_err(|e| tag_root(e, m))?;
            let column = &mut self.columns[m as usize - 1];
            for n in have + 1..=order {
                let idx = ModeIndex { n, m };
                column.push(build_mode(idx, kappa_m, roots[n as usize - 1], &self.geom)?);
            }
        }
        Ok(())
    }

    pub fn get(&mut self, idx: ModeIndex) -> Result<&RindlerMode, ModeError> {
        self.ensure(idx.n.max(idx.m))?;
        Ok(&self.columns[idx.m as usize - 1][idx.n as usize - 1])
    }

    pub fn modes(&self) -> impl Iterator<Item = &RindlerMode> {
        self.columns.iter().flatten()
    }

    /// One line per mode: `n m kappa_m Omega norm`.
    pub fn dump(&self) -> String {
        let mut all: Vec<&RindlerMode> = self.modes().collect();
        all.sort_by_key(|m| (m.idx.n, m.idx.m));
        let mut out = String::new();
        for mode in all {
            let _ = writeln!(out, "{} {} {} {} {}", mode.idx.n, mode.idx.m, mode.kappa_m, mode.omega, mode.norm);
        }
        out
    }
}

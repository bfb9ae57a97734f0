//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any criterion fails.

use cavity_entanglement::bessel::{self, envelope, BesselEvalConfig};
use cavity_entanglement::entanglement::{entropy_closed, entropy_eig, ReducedState, DEFAULT_MAX_ORDER};
use cavity_entanglement::geometry::{CavityGeometry, ModeIndex};
use cavity_entanglement::interaction::{
    amplitude_alice, amplitude_rob, amplitude_rob_inertial, resonance_phase, AtomParams,
};
use cavity_entanglement::modes::{
    eigenfrequencies, minkowski_mode, radial_eval, rindler_mode, ModeCatalog, ROOT_TOL,
};
use cavity_entanglement::pipeline::{solve_point, PointParams};
use cavity_entanglement::quadrature::QuadConfig;
use cavity_entanglement::sweep::{parse_config, run_sweep, write_csv, SweepConfig};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::time::Instant;

const DELTA: f64 = PI * std::f64::consts::SQRT_2;

// Tolerances.
const ENTROPY_IDENTITY_TOL: f64 = 1e-10;
const BESSEL_ROUTE_TOL: f64 = 1e-8;
/// Upper end of the cross-validation grid; the series `K` cancels like `e^{2x}`.
const SERIES_MAX_ARG: f64 = 8.0;
const WRONSKIAN_TOL: f64 = 1e-8;
const LOG_BRANCH_TOL: f64 = 1e-9;
const INNER_WALL_TOL: f64 = 1e-10;
const OUTER_WALL_TOL: f64 = 1e-8;
const SMALL_ACCEL_TOL: f64 = 1e-3;
const MASS_GRID_STEP: f64 = 0.25;
const EPS_INVARIANCE_TOL: f64 = 1e-10;
const THREAD_INVARIANCE_TOL: f64 = 1e-12;
/// `W[K, Re I] · x`, fixed once against the quadrature and series oracles.
const WRONSKIAN_CONSTANT: f64 = 1.0;

type Outcome = Result<String, String>;

fn atom() -> AtomParams {
    AtomParams::new(DELTA, 0.5, 0.01, 1.0).unwrap()
}

fn idx(n: u32, m: u32) -> ModeIndex {
    ModeIndex::new(n, m).unwrap()
}

fn point(accel: f64, kappa: f64, atom: AtomParams) -> PointParams {
    PointParams { accel, kappa, atom, quad_tol: 1e-9, trunc_tol: 1e-6, max_order: DEFAULT_MAX_ORDER }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn even_mode_extinction() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for _ in 0..20 {
        let length = rng.random_range(0.5..2.0);
        let atom = AtomParams::new(
            rng.random_range(0.5..12.0),
            rng.random_range(0.05..0.95),
            rng.random_range(1e-3..0.1),
            length,
        )
        .unwrap();
        let geom = CavityGeometry::new(length, 0.0).unwrap();
        let kappa = rng.random_range(0.0..10.0);
        for n in (2..=12).step_by(2) {
            for m in 1..=6 {
                let mode = minkowski_mode(idx(n, m), &geom, kappa).map_err(|e| e.to_string())?;
                let f = amplitude_alice(idx(n, m), &atom, &mode, &QuadConfig::new(1e-9, 0.0))
                    .map_err(|e| e.to_string())?;
                if f != Complex64::new(0.0, 0.0) {
                    return Err(format!("F^A({n}, {m}) = {f}"));
                }
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} even-n amplitudes exactly zero"))
}

fn rank_one_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let n = rng.random_range(1..=8usize);
        let scale = 10f64.powf(rng.random_range(-4.0..0.0));
        let f: Vec<Complex64> = (0..n * n)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale)
            .collect();
        let p0 = rng.random_range(0.0..2.0) * scale * scale * (n * n) as f64;
        let state = ReducedState::from_parts(p0, f).map_err(|e| e.to_string())?;
        let eig = entropy_eig(&state).map_err(|e| e.to_string())?.entropy;
        worst = worst.max((eig - entropy_closed(&state)).abs());
    }
    check(worst < ENTROPY_IDENTITY_TOL, format!("200 random states, max |ΔS| = {worst:.2e} bits"))
}

fn bessel_cross_validation() -> Outcome {
    let cfg = BesselEvalConfig::default();
    let (mut route, mut wronskian): (f64, f64) = (0.0, 0.0);
    for i in 0..20 {
        let nu = 20.0 * i as f64 / 19.0;
        for j in 0..20 {
            let x = 0.05 * (SERIES_MAX_ARG / 0.05).powf(j as f64 / 19.0);
            let s = bessel::series(nu, x, &cfg).map_err(|e| format!("series({nu}, {x}): {e}"))?;
            let q = bessel::integral(nu, x, &cfg).map_err(|e| format!("integral({nu}, {x}): {e}"))?;
            let (ek, ei) = envelope(nu, x, q.k, q.rei);
            route = route.max((s.k - q.k).abs() / ek).max((s.rei - q.rei).abs() / ei);

            let x = 0.05 * (1000f64).powf(j as f64 / 19.0);
            let v = bessel::evaluate(nu, x, &cfg).map_err(|e| e.to_string())?;
            let w = (v.rei_deriv * v.k - v.rei * v.k_deriv) * x;
            wronskian = wronskian.max((w - WRONSKIAN_CONSTANT).abs());
        }
    }
    check(
        route < BESSEL_ROUTE_TOL && wronskian < WRONSKIAN_TOL,
        format!(
            "20x20 grid: route mismatch {route:.2e} (x <= {SERIES_MAX_ARG}), Wronskian deviation {wronskian:.2e} (x <= 50)"
        ),
    )
}

fn eigenfrequency_oracle() -> Outcome {
    let mut worst: f64 = 0.0;
    for a in [0.5, 1.0, 1.5] {
        let geom = CavityGeometry::new(1.0, a).unwrap();
        let roots = eigenfrequencies(10, 0.0, &geom, ROOT_TOL).map_err(|e| e.to_string())?;
        let span = (geom.chi_plus() / geom.chi_minus()).ln();
        for (k, w) in roots.iter().enumerate() {
            worst = worst.max((w - (k + 1) as f64 * PI / span).abs());
        }
    }
    // Dense scan oracle at κ_m = π, a = 1.
    let geom = CavityGeometry::new(1.0, 1.0).unwrap();
    let f = |w: f64| radial_eval(w, PI, &geom, geom.chi_plus()).unwrap();
    let solved = eigenfrequencies(3, PI, &geom, ROOT_TOL).map_err(|e| e.to_string())?;
    let mut scan = Vec::new();
    let (mut lo, mut f_lo) = (1e-3, f(1e-3));
    while scan.len() < 3 {
        let hi = lo + 1e-3;
        let f_hi = f(hi);
        if f_lo.signum() != f_hi.signum() {
            let (mut a, mut b) = (lo, hi);
            for _ in 0..60 {
                let mid = 0.5 * (a + b);
                if f(mid).signum() == f_lo.signum() {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            scan.push(0.5 * (a + b));
        }
        (lo, f_lo) = (hi, f_hi);
    }
    let massive = scan.iter().zip(&solved).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        worst < LOG_BRANCH_TOL && massive < 2.0 * ROOT_TOL,
        format!("log branch max error {worst:.2e}, dense-scan max error {massive:.2e}"),
    )
}

fn boundary_vanishing() -> Outcome {
    let (mut inner, mut outer): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for (a, kappa) in [(0.1, 0.0), (0.5, 0.0), (0.5, 6.0), (0.9, 2.0), (1.5, 0.0)] {
        let geom = CavityGeometry::new(1.0, a).unwrap();
        let mut catalog = ModeCatalog::new(geom, kappa).map_err(|e| e.to_string())?;
        catalog.ensure(8).map_err(|e| e.to_string())?;
        for mode in catalog.modes() {
            let env = (0..=2000)
                .map(|i| mode.radial.at_offset(i as f64 / 2000.0).unwrap().abs())
                .fold(0.0, f64::max);
            inner = inner.max(mode.radial.at(geom.chi_minus()).unwrap().abs() / env);
            outer = outer.max(mode.radial.at(geom.chi_plus()).unwrap().abs() / env);
            count += 1;
        }
    }
    check(
        inner < INNER_WALL_TOL && outer < OUTER_WALL_TOL,
        format!("{count} modes: |u(χ-)|/max {inner:.2e}, |u(χ+)|/max {outer:.2e}"),
    )
}

fn small_acceleration() -> Outcome {
    let atom = atom();
    let quad = QuadConfig::new(1e-12, 0.0);
    let geom = CavityGeometry::new(1.0, 1e-3).unwrap();
    let mode = rindler_mode(idx(1, 1), &geom, 0.0, ROOT_TOL).map_err(|e| e.to_string())?;
    let accelerated = amplitude_rob(idx(1, 1), &atom, &mode, &geom, &quad).map_err(|e| e.to_string())?.norm();
    let rest = minkowski_mode(idx(1, 1), &CavityGeometry::new(1.0, 0.0).unwrap(), 0.0).unwrap();
    let inertial = amplitude_rob_inertial(idx(1, 1), &atom, &rest, &quad).map_err(|e| e.to_string())?.norm();
    let rel = (accelerated / inertial - 1.0).abs();
    check(rel < SMALL_ACCEL_TOL, format!("|F^R_11| {accelerated:.9e} vs {inertial:.9e}, relative {rel:.2e}"))
}

fn monotonic_in_acceleration() -> Outcome {
    let mut values = Vec::new();
    for k in 1..=9 {
        let a = 0.1 * k as f64;
        let out = solve_point(point(a, 0.0, atom())).map_err(|e| e.to_string())?;
        if !out.result.converged {
            return Err(format!("a = {a} not converged"));
        }
        values.push(out.result.entropy);
    }
    let decreasing = values.windows(2).all(|w| w[1] < w[0]);
    let listing: Vec<String> = values.iter().map(|s| format!("{s:.9}")).collect();
    check(decreasing, format!("S(a = 0.1..0.9) = [{}]", listing.join(", ")))
}

/// Masses `κ > 0` with `g₁₁(κ) = 2πk`, up to `limit`.
fn resonance_masses(atom: &AtomParams, limit: f64) -> Vec<f64> {
    let base = atom.delta * (1.0 - atom.v * atom.v).sqrt();
    let rest = 2f64.sqrt() * PI;
    let mut out = Vec::new();
    for k in 0..100 {
        let omega = base + 2.0 * PI * atom.v * k as f64;
        if omega <= rest {
            continue;
        }
        let kappa = (omega * omega - rest * rest).sqrt();
        if kappa > limit {
            break;
        }
        debug_assert!((resonance_phase(idx(1, 1), atom, kappa) / (2.0 * PI)).fract().abs() < 1e-9);
        out.push(kappa);
    }
    out
}

fn resonance_structure() -> Outcome {
    let atom = atom();
    let roots = resonance_masses(&atom, 12.0);
    let grid: Vec<f64> = (0..=48).map(|i| MASS_GRID_STEP * i as f64).collect();
    let mut report = Vec::new();
    let mut ok = true;
    for a in [0.0, 0.05] {
        let mut curve = Vec::with_capacity(grid.len());
        for &kappa in &grid {
            let out = solve_point(point(a, kappa, atom)).map_err(|e| e.to_string())?;
            curve.push(out.result.entropy);
        }
        let maxima: Vec<f64> = (1..grid.len() - 1)
            .filter(|&i| curve[i] > curve[i - 1] && curve[i] > curve[i + 1])
            .map(|i| grid[i])
            .collect();
        for &m in &maxima {
            let nearest = roots.iter().map(|r| (r - m).abs()).fold(f64::INFINITY, f64::min);
            ok &= nearest <= MASS_GRID_STEP;
        }
        ok &= !maxima.is_empty();
        report.push(format!("a = {a}: maxima at {maxima:?}"));
    }
    let roots: Vec<String> = roots.iter().map(|r| format!("{r:.3}")).collect();
    check(ok, format!("{}; g = 2πk roots at [{}]", report.join("; "), roots.join(", ")))
}

fn epsilon_invariance() -> Outcome {
    let mut values = Vec::new();
    for eps in [1e-3, 1e-2, 1e-1] {
        let out = solve_point(point(0.4, 2.0, atom().with_eps(eps))).map_err(|e| e.to_string())?;
        values.push(out.result.entropy);
    }
    let spread = values.iter().fold(f64::NEG_INFINITY, |m, &s| m.max(s))
        - values.iter().fold(f64::INFINITY, |m, &s| m.min(s));
    check(spread < EPS_INVARIANCE_TOL, format!("S = {values:?}, spread {spread:.2e}"))
}

fn kinematic_bound() -> Outcome {
    for text in ["accel = 1.0\nmass = 0", "accel = 0:1.0:0.1\nmass = 0", "v = 0.3\naccel = 0.61\nmass = 0"] {
        if parse_config(text).is_ok() {
            return Err(format!("accepted {text:?}"));
        }
    }
    let edge = 2.0 * 0.5 * (1.0 - 1e-6);
    let cfg = parse_config(&format!("accel = {edge}\nmass = 0")).map_err(|e| e.to_string())?;
    let out = solve_point(point(cfg.accel[0], 0.0, cfg.atom())).map_err(|e| e.to_string())?;
    check(
        out.result.converged && out.result.entropy.is_finite(),
        format!("a ≥ 2v rejected; a = {edge}: S = {:.9}, N = {}", out.result.entropy, out.result.order),
    )
}

fn csv_bytes(cfg: &SweepConfig) -> Result<(Vec<u8>, Vec<f64>), String> {
    let rows = run_sweep(cfg).map_err(|e| e.to_string())?;
    let mut bytes = Vec::new();
    write_csv(&rows, &mut bytes).map_err(|e| e.to_string())?;
    let values = rows.iter().flat_map(|r| [r.p_vacuum, r.sum_fa_sq, r.sum_fr_sq, r.entropy_bits]).collect();
    Ok((bytes, values))
}

fn determinism() -> Outcome {
    let text = "accel = 0:0.4:0.1\nmass = 0:4:1\nthreads = 1";
    let single = parse_config(text).map_err(|e| e.to_string())?;
    let (first, values) = csv_bytes(&single)?;
    let (second, _) = csv_bytes(&single)?;
    let pooled = SweepConfig { threads: 4, ..single };
    let (_, pooled_values) = csv_bytes(&pooled)?;
    let drift = values.iter().zip(&pooled_values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    check(
        first == second && drift <= THREAD_INVARIANCE_TOL,
        format!("5x5 sweep: identical bytes {}, max thread drift {drift:.2e}", first == second),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("even-mode extinction", even_mode_extinction),
        ("rank-1 entropy identity", rank_one_identity),
        ("Bessel cross-validation", bessel_cross_validation),
        ("eigenfrequency oracle", eigenfrequency_oracle),
        ("boundary vanishing", boundary_vanishing),
        ("small-a / inertial consistency", small_acceleration),
        ("monotonic trend in acceleration", monotonic_in_acceleration),
        ("resonance structure", resonance_structure),
        ("coupling invariance", epsilon_invariance),
        ("kinematic bound", kinematic_bound),
        ("determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", k + 1),
            Err(detail) => {
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {detail}", k + 1);
                failed.push(k + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("all {} criteria passed", criteria.len());
    } else {
        println!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}

//! Globally adaptive Gauss–Kronrod (G10/K21) quadrature on finite intervals.
//!
//! The integrand may be real or complex valued. The interval with the largest
//! error estimate is bisected until the total estimate meets the requested
//! tolerance, the estimate is dominated by floating point roundoff, or the
//! subdivision budget is spent.

use num_complex::Complex64;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use thiserror::Error;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_088_893,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// Gauss weights for XGK[1], XGK[3], ..., XGK[9].
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Values that can be integrated: closed under addition and real scaling.
/// Fixed-size arrays integrate several real functions on one shared mesh.
pub trait QuadValue: Copy {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
    fn scale(self, s: f64) -> Self {
        self * s
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

impl<const N: usize> QuadValue for [f64; N] {
    fn zero() -> Self {
        [0.0; N]
    }
    fn add(mut self, other: Self) -> Self {
        self.iter_mut().zip(other).for_each(|(a, b)| *a += b);
        self
    }
    fn sub(mut self, other: Self) -> Self {
        self.iter_mut().zip(other).for_each(|(a, b)| *a -= b);
        self
    }
    fn scale(mut self, s: f64) -> Self {
        self.iter_mut().for_each(|a| *a *= s);
        self
    }
    fn magnitude(&self) -> f64 {
        self.iter().map(|a| a * a).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        Self { rel_tol: 1e-10, abs_tol: 0.0, max_subdivisions: 2000 }
    }
}

impl QuadConfig {
    pub fn new(rel_tol: f64, abs_tol: f64) -> Self {
        Self { rel_tol, abs_tol, ..Self::default() }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    pub error: f64,
    /// Integral of `|f|` over the interval.
    pub abs_value: f64,
    pub evaluations: usize,
    /// Set when the tolerance was met only up to floating point roundoff.
    pub roundoff_limited: bool,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum QuadError {
    #[error("quadrature budget of {subdivisions} subdivisions exhausted (error estimate {error:.3e}, value magnitude {magnitude:.3e})")]
    BudgetExceeded { subdivisions: usize, error: f64, magnitude: f64 },
    #[error("integrand returned a non-finite value near t = {at}")]
    NonFinite { at: f64 },
}

struct Segment<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
    abs_value: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}
impl<T> Eq for Segment<T> {}
impl<T> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gauss_kronrod<T: QuadValue, F: FnMut(f64) -> T>(f: &mut F, a: f64, b: f64) -> Result<Segment<T>, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc.scale(WGK[10]);
    let mut gauss = T::zero();
    let mut abs_k = fc.magnitude() * WGK[10];
    let mut vals = [(T::zero(), T::zero()); 10];
    for j in 0..10 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        vals[j] = (f1, f2);
        kronrod = kronrod.add(f1.add(f2).scale(WGK[j]));
        abs_k += (f1.magnitude() + f2.magnitude()) * WGK[j];
        if j % 2 == 1 {
            gauss = gauss.add(f1.add(f2).scale(WG[j / 2]));
        }
    }
    if !kronrod.magnitude().is_finite() {
        return Err(QuadError::NonFinite { at: center });
    }
    // ∫|f − mean| drives the QUADPACK error rescaling.
    let mean = kronrod.scale(0.5);
    let mut asc = fc.sub(mean).magnitude() * WGK[10];
    for j in 0..10 {
        asc += (vals[j].0.sub(mean).magnitude() + vals[j].1.sub(mean).magnitude()) * WGK[j];
    }
    let asc = asc * half.abs();
    let abs_value = abs_k * half.abs();
    let mut err = kronrod.sub(gauss).scale(half).magnitude();
    if asc != 0.0 && err != 0.0 {
        err = asc * (200.0 * err / asc).powf(1.5).min(1.0);
    }
    let floor = 50.0 * f64::EPSILON * abs_value;
    if abs_value > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) && floor > err {
        err = floor;
    }
    Ok(Segment { a, b, value: kronrod.scale(half), error: err, abs_value })
}

/// Integrate `f` over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult<T>, QuadError>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    if a == b {
        return Ok(QuadResult {
            value: T::zero(),
            error: 0.0,
            abs_value: 0.0,
            evaluations: 0,
            roundoff_limited: false,
        });
    }
    let first = gauss_kronrod(&mut f, a, b)?;
    let mut evaluations = 21;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    let mut subdivisions = 1;
    loop {
        let (value, error, abs_value) = heap.iter().fold((T::zero(), 0.0, 0.0), |acc, s| {
            (acc.0.add(s.value), acc.1 + s.error, acc.2 + s.abs_value)
        });
        let target = cfg.abs_tol.max(cfg.rel_tol * value.magnitude());
        let roundoff = 100.0 * f64::EPSILON * abs_value;
        if error <= target || error <= roundoff {
            return Ok(QuadResult {
                value,
                error,
                abs_value,
                evaluations,
                roundoff_limited: error > target,
            });
        }
        if subdivisions >= cfg.max_subdivisions {
            return Err(QuadError::BudgetExceeded {
                subdivisions,
                error,
                magnitude: value.magnitude(),
            });
        }
        let worst = heap.pop().expect("heap holds at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            // Interval can no longer be split in floating point.
            return Err(QuadError::BudgetExceeded { subdivisions, error, magnitude: value.magnitude() });
        }
        heap.push(gauss_kronrod(&mut f, worst.a, mid)?);
        heap.push(gauss_kronrod(&mut f, mid, worst.b)?);
        evaluations += 42;
        subdivisions += 1;
    }
}

//! Adaptive Gauss–Kronrod (7/15) quadrature on finite and semi-infinite ranges.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

// Tabulated nodes and weights, kept at full published precision.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights for XGK[1], XGK[3], XGK[5] and the centre.
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Stopping rule: `error <= max(abs, rel * |value|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_segments: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rel: 1e-8,
            abs: 0.0,
            max_segments: 4000,
        }
    }
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Tolerance {
            rel,
            ..Default::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Segment {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = WGK[7] * fc;
    let mut g = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    Segment {
        a,
        b,
        value: k * h,
        error: ((k - g) * h).abs(),
    }
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<Estimate> {
    if a == b {
        return Ok(Estimate {
            value: 0.0,
            error: 0.0,
            evaluations: 0,
        });
    }
    let first = kronrod(&f, a, b);
    let mut evaluations = 15;
    let mut value = first.value;
    let mut error = first.error;
    let mut heap = BinaryHeap::new();
    heap.push(first);
    loop {
        if !value.is_finite() || !error.is_finite() {
            return Err(Error::numerical(
                "quadrature",
                format!("non-finite estimate on [{a}, {b}]: value {value}, error {error}"),
            ));
        }
        if error <= tol.abs.max(tol.rel * value.abs()) {
            break;
        }
        if heap.len() >= tol.max_segments {
            return Err(Error::numerical(
                "quadrature",
                format!(
                    "no convergence on [{a}, {b}] after {} segments: value {value}, error {error}, target rel {}",
                    heap.len(),
                    tol.rel
                ),
            ));
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // interval exhausted at machine precision; accept what we have
            heap.push(worst);
            break;
        }
        let left = kronrod(&f, worst.a, mid);
        let right = kronrod(&f, mid, worst.b);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
    }
    // re-sum to shed accumulated update error
    let (value, error) = heap
        .iter()
        .fold((0.0, 0.0), |(v, e), s| (v + s.value, e + s.error));
    Ok(Estimate {
        value,
        error,
        evaluations,
    })
}

/// Integrates `f` over `[a, inf)` through `u = a + t/(1-t)`, `t in [0, 1)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, tol: Tolerance) -> Result<Estimate> {
    integrate(
        |t| {
            let one_minus = 1.0 - t;
            let u = a + t / one_minus;
            let v = f(u) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
    )
}

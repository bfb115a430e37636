//! Globally adaptive Gauss-Kronrod (7/15) quadrature over finite intervals.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::config::QuadOptions;
use crate::error::{LevyError, Result};

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

// Gauss weights for the odd-indexed Kronrod abscissae XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn magnitude(&self) -> f64;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl QuadValue for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<T> {
    pub value: T,
    /// Estimated absolute error (sum of per-interval |K15 - G7|).
    pub error: f64,
    pub evaluations: usize,
}

struct Segment<T> {
    a: f64,
    b: f64,
    piece: usize,
    value: T,
    error: f64,
}

impl<T> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
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

fn kronrod<T: QuadValue, F: FnMut(usize, f64) -> T>(f: &mut F, piece: usize, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(piece, c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(piece, c - dx) + f(piece, c + dx);
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    (k, (k - g).magnitude())
}

const XGL6: [f64; 3] = [0.238_619_186_083_196_9, 0.661_209_386_466_264_5, 0.932_469_514_203_152_0];
const WGL6: [f64; 3] = [0.467_913_934_572_691_0, 0.360_761_573_048_138_6, 0.171_324_492_379_170_3];

/// Fixed 3-point Gauss-Legendre rule on [a, b].
pub fn gauss_legendre3<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64) -> T {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let x = 0.774_596_669_241_483_4;
    (f(mid - half * x) + f(mid + half * x)) * (5.0 / 9.0 * half) + f(mid) * (8.0 / 9.0 * half)
}

/// Fixed 6-point Gauss-Legendre rule on [a, b], for short pieces with smooth integrands.
pub fn gauss_legendre6<T: QuadValue, F: FnMut(f64) -> T>(mut f: F, a: f64, b: f64) -> T {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut sum = T::zero();
    for (x, w) in XGL6.iter().zip(WGL6) {
        sum = sum + (f(mid - half * x) + f(mid + half * x)) * (w * half);
    }
    sum
}

/// Integrates over a list of adjacent or disjoint finite pieces.
///
/// The integrand receives the piece index, which lets piecewise-defined
/// integrands avoid locating the evaluation point themselves.
pub fn integrate_pieces<T, F>(mut f: F, pieces: &[(f64, f64)], opts: &QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(usize, f64) -> T,
{
    let mut heap = BinaryHeap::new();
    let mut total = T::zero();
    let mut err = 0.0;
    let mut evals = 0usize;
    for (i, &(a, b)) in pieces.iter().enumerate() {
        if !(a.is_finite() && b.is_finite()) {
            return Err(LevyError::NonFinite(format!("integration bounds [{a}, {b}]")));
        }
        if b <= a {
            continue;
        }
        let (v, e) = kronrod(&mut f, i, a, b);
        evals += 15;
        total = total + v;
        err += e;
        heap.push(Segment { a, b, piece: i, value: v, error: e });
    }
    let mut splits = 0usize;
    loop {
        let target = opts.abs_tol.max(opts.rel_tol * total.magnitude());
        if err <= target || heap.is_empty() {
            break;
        }
        if splits >= opts.max_subdivisions {
            return Err(LevyError::Quadrature { achieved: err, target });
        }
        let seg = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (seg.a + seg.b);
        if !(m > seg.a && m < seg.b) {
            // interval cannot be split further in floating point
            return Err(LevyError::Quadrature { achieved: err, target });
        }
        let (v1, e1) = kronrod(&mut f, seg.piece, seg.a, m);
        let (v2, e2) = kronrod(&mut f, seg.piece, m, seg.b);
        evals += 30;
        splits += 1;
        total = total - seg.value + v1 + v2;
        err = err - seg.error + e1 + e2;
        heap.push(Segment { a: seg.a, b: m, piece: seg.piece, value: v1, error: e1 });
        heap.push(Segment { a: m, b: seg.b, piece: seg.piece, value: v2, error: e2 });
        if splits.is_multiple_of(64) {
            // re-sum to shed accumulated cancellation in the running totals
            total = heap.iter().fold(T::zero(), |acc, s| acc + s.value);
            err = heap.iter().map(|s| s.error).sum();
        }
    }
    Ok(QuadResult { value: total, error: err.max(0.0), evaluations: evals })
}

/// Integrates `f` over `[a, b]`.
pub fn integrate<T, F>(mut f: F, a: f64, b: f64, opts: &QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    integrate_pieces(|_, x| f(x), &[(a, b)], opts)
}

/// Integrates over `[a, b]` with interior breakpoints where the integrand is not smooth.
pub fn integrate_breaks<T, F>(mut f: F, breaks: &[f64], opts: &QuadOptions) -> Result<QuadResult<T>>
where
    T: QuadValue,
    F: FnMut(f64) -> T,
{
    let pieces: Vec<(f64, f64)> = breaks.windows(2).map(|w| (w[0], w[1])).collect();
    integrate_pieces(|_, x| f(x), &pieces, opts)
}

/// Integrates `f` over `[a, inf)` by the map `x = a + t/(1-t)`.
///
/// Suitable for non-oscillatory integrands with algebraic decay.
pub fn integrate_to_infinity<F>(mut f: F, a: f64, opts: &QuadOptions) -> Result<QuadResult<f64>>
where
    F: FnMut(f64) -> f64,
{
    integrate(
        |t: f64| {
            let s = 1.0 - t;
            let x = a + t / s;
            let v = f(x) / (s * s);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        opts,
    )
}

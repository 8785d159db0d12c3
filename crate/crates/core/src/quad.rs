//! Adaptive Gauss–Kronrod (7/15) quadrature for real- and complex-valued
//! integrands.

use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

/// Integrand value type: a real scalar or a complex number over it.
pub trait QuadValue<T: Real>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Result of an integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<V, T> {
    pub value: V,
    pub abs_error: T,
}

fn gk15<T: Real, V: QuadValue<T>, F: FnMut(T) -> V>(f: &mut F, a: T, b: T) -> (V, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        let pair = f1 + f2;
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half_len;
    let err = (kronrod - gauss).magnitude() * half_len.abs();
    (value, err)
}

struct Segment<V, T> {
    a: T,
    b: T,
    value: V,
    err: T,
}

impl<V, T: Real> PartialEq for Segment<V, T> {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl<V, T: Real> Eq for Segment<V, T> {}
impl<V, T: Real> PartialOrd for Segment<V, T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<V, T: Real> Ord for Segment<V, T> {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.partial_cmp(&other.err).unwrap_or(std::cmp::Ordering::Equal)
    }
}

/// Integrates `f` over `[a, b]` until the summed error estimate falls below
/// `max(abs_tol, rel_tol·|I|)`, bisecting the worst segment each step.
pub fn integrate<T, V, F>(mut f: F, a: T, b: T, abs_tol: T, rel_tol: T) -> Result<Quadrature<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    const MAX_SEGMENTS: usize = 2000;
    if a == b {
        return Ok(Quadrature { value: V::zero(), abs_error: T::zero() });
    }
    let (value, err) = gk15(&mut f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Segment { a, b, value, err });
    let mut total = value;
    let mut total_err = err;
    loop {
        let tol = abs_tol.max(rel_tol * total.magnitude());
        if total_err <= tol {
            return Ok(Quadrature { value: total, abs_error: total_err });
        }
        if heap.len() >= MAX_SEGMENTS {
            return Err(Error::Quadrature { achieved: total_err.as_f64(), requested: tol.as_f64() });
        }
        let worst = heap.pop().expect("non-empty heap");
        let mid = T::lit(0.5) * (worst.a + worst.b);
        if mid <= worst.a.min(worst.b) || mid >= worst.a.max(worst.b) {
            return Err(Error::Quadrature { achieved: total_err.as_f64(), requested: tol.as_f64() });
        }
        let (v1, e1) = gk15(&mut f, worst.a, mid);
        let (v2, e2) = gk15(&mut f, mid, worst.b);
        total = total - worst.value + v1 + v2;
        total_err = total_err - worst.err + e1 + e2;
        heap.push(Segment { a: worst.a, b: mid, value: v1, err: e1 });
        heap.push(Segment { a: mid, b: worst.b, value: v2, err: e2 });
        // re-sum periodically to stop drift in the running error total
        if heap.len() % 64 == 0 {
            total_err = heap.iter().fold(T::zero(), |acc, s| acc + s.err);
        }
    }
}

/// Integrates over `[a, ∞)` through the map x = a + t/(1-t), t ∈ [0,1).
pub fn integrate_to_infinity<T, V, F>(mut f: F, a: T, abs_tol: T, rel_tol: T) -> Result<Quadrature<V, T>>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    integrate(
        |t: T| {
            let one_m = T::one() - t;
            if one_m <= T::zero() {
                return V::zero();
            }
            let x = a + t / one_m;
            let v = f(x);
            v * (one_m * one_m).recip()
        },
        T::zero(),
        T::one(),
        abs_tol,
        rel_tol,
    )
}

//! Central finite differences on functions of three coordinates.

use std::ops::{Add, Mul, Sub};

use crate::error::Result;

/// Values that can be differenced: f64, matrices, spinors.
pub trait Linear: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T>> Linear for T {}

pub const H_FIRST: f64 = 1e-4;
pub const H_CURVATURE: f64 = 1e-3;

pub fn shifted(x: &[f64; 3], i: usize, d: f64) -> [f64; 3] {
    let mut y = *x;
    y[i] += d;
    y
}

/// Second-order central difference ∂_i f.
pub fn partial<T: Linear>(f: impl Fn(&[f64; 3]) -> T, x: &[f64; 3], i: usize, h: f64) -> T {
    (f(&shifted(x, i, h)) - f(&shifted(x, i, -h))) * (0.5 / h)
}

pub fn try_partial<T: Linear>(f: impl Fn(&[f64; 3]) -> Result<T>, x: &[f64; 3], i: usize, h: f64) -> Result<T> {
    Ok((f(&shifted(x, i, h))? - f(&shifted(x, i, -h))?) * (0.5 / h))
}

/// Fourth-order five-point central difference ∂_i f.
pub fn partial4<T: Linear>(f: impl Fn(&[f64; 3]) -> T, x: &[f64; 3], i: usize, h: f64) -> T {
    let d1 = f(&shifted(x, i, h)) - f(&shifted(x, i, -h));
    let d2 = f(&shifted(x, i, 2.0 * h)) - f(&shifted(x, i, -2.0 * h));
    (d1 * 8.0 - d2) * (1.0 / (12.0 * h))
}

/// Central difference for a function of one variable.
pub fn derivative<T: Linear>(f: impl Fn(f64) -> T, t: f64, h: f64) -> T {
    (f(t + h) - f(t - h)) * (0.5 / h)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let f = |x: &[f64; 3]| x[0] * x[0] + 3.0 * x[1];
        let x = [1.5, -2.0, 0.0];
        assert!((partial(f, &x, 0, 1e-3) - 3.0).abs() < 1e-10);
        assert!((partial(f, &x, 1, 1e-3) - 3.0).abs() < 1e-10);
    }

    #[test]
    fn fourth_order_on_quartic() {
        let f = |x: &[f64; 3]| x[2].powi(4);
        let x = [0.0, 0.0, 0.7];
        assert!((partial4(f, &x, 2, 1e-2) - 4.0 * 0.7f64.powi(3)).abs() < 1e-11);
    }
}

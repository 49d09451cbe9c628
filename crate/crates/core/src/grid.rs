//! Uniform grids, quadrature weights and finite-difference stencils.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{idx, lit, Real};

/// A uniform one-dimensional grid `start + i * step`, `i = 0..len`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Grid1<T: Real> {
    pub start: T,
    pub step: T,
    pub len: usize,
}

impl<T: Real> Grid1<T> {
    /// `len` points from `start` to `end` inclusive. A single point has step 0.
    pub fn linspace(start: T, end: T, len: usize) -> Self {
        let step = if len > 1 {
            (end - start) / idx::<T>(len - 1)
        } else {
            T::zero()
        };
        Self { start, step, len }
    }

    pub fn with_step(start: T, step: T, len: usize) -> Self {
        Self { start, step, len }
    }

    #[inline]
    pub fn point(&self, i: usize) -> T {
        self.start + idx::<T>(i) * self.step
    }

    pub fn end(&self) -> T {
        if self.len == 0 {
            self.start
        } else {
            self.point(self.len - 1)
        }
    }

    pub fn points(&self) -> Vec<T> {
        (0..self.len).map(|i| self.point(i)).collect()
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Index of the grid point nearest to `x`, clamped to the grid.
    pub fn nearest(&self, x: T) -> usize {
        if self.len <= 1 || self.step == T::zero() {
            return 0;
        }
        let r = ((x - self.start) / self.step).round();
        if r <= T::zero() {
            0
        } else {
            r.to_usize().unwrap_or(self.len - 1).min(self.len - 1)
        }
    }

    /// Trapezoid weights with fourth-order Gregory end corrections.
    pub fn gregory_weights(&self) -> Vec<T> {
        gregory_weights(self.len, self.step)
    }

    pub fn trapezoid_weights(&self) -> Vec<T> {
        trapezoid_weights(self.len, self.step)
    }
}

pub fn trapezoid_weights<T: Real>(n: usize, h: T) -> Vec<T> {
    let mut w = vec![h; n];
    if n == 1 {
        w[0] = T::zero();
    } else if n > 1 {
        w[0] = h * lit(0.5);
        w[n - 1] = h * lit(0.5);
    }
    w
}

/// Composite quadrature exact for cubics: end weights 3/8, 7/6, 23/24.
/// Falls back to the trapezoid rule below eight points.
pub fn gregory_weights<T: Real>(n: usize, h: T) -> Vec<T> {
    if n < 8 {
        return trapezoid_weights(n, h);
    }
    let mut w = vec![h; n];
    let ends = [lit::<T>(3.0 / 8.0), lit(7.0 / 6.0), lit(23.0 / 24.0)];
    for (i, c) in ends.iter().enumerate() {
        w[i] = *c * h;
        w[n - 1 - i] = *c * h;
    }
    w
}

pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(x, y)| *x * *y).sum()
}

/// `sum_i w_i a_i b_i`
pub fn weighted_dot<T: Real>(w: &[T], a: &[T], b: &[T]) -> T {
    w.iter()
        .zip(a.iter().zip(b))
        .map(|(w, (x, y))| *w * *x * *y)
        .sum()
}

pub fn weighted_norm<T: Real>(w: &[T], a: &[T]) -> T {
    weighted_dot(w, a, a).max(T::zero()).sqrt()
}

pub fn max_abs<T: Real>(a: &[T]) -> T {
    a.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

/// Second-order first derivative: centered inside, one-sided at both ends.
pub fn derivative2<T: Real>(u: &[T], h: T) -> Result<Vec<T>> {
    let n = u.len();
    if n < 3 {
        return Err(Error::Resolution(format!(
            "second-order derivative needs at least 3 samples, got {n}"
        )));
    }
    let two_h = h + h;
    let mut d = vec![T::zero(); n];
    // written as differences so constants differentiate to exactly zero
    d[0] = (lit::<T>(3.0) * (u[1] - u[0]) - (u[2] - u[1])) / two_h;
    for i in 1..n - 1 {
        d[i] = (u[i + 1] - u[i - 1]) / two_h;
    }
    d[n - 1] = (lit::<T>(3.0) * (u[n - 1] - u[n - 2]) - (u[n - 2] - u[n - 3])) / two_h;
    Ok(d)
}

/// Second-order second difference: centered in the interior, one-sided
/// four-point stencils at the ends.
pub fn second_difference2<T: Real>(u: &[T], h: T) -> Result<Vec<T>> {
    let n = u.len();
    if n < 4 {
        return Err(Error::Resolution(format!(
            "second difference needs at least 4 samples, got {n}"
        )));
    }
    let h2 = h * h;
    let two = lit::<T>(2.0);
    let mut d = vec![T::zero(); n];
    // (2 u0 - 5 u1 + 4 u2 - u3) / h^2, as differences
    let end = |a: T, b: T, c: T, e: T| (two * (a - b) - lit::<T>(3.0) * (b - c) + (c - e)) / h2;
    d[0] = end(u[0], u[1], u[2], u[3]);
    for i in 1..n - 1 {
        d[i] = ((u[i + 1] - u[i]) - (u[i] - u[i - 1])) / h2;
    }
    d[n - 1] = end(u[n - 1], u[n - 2], u[n - 3], u[n - 4]);
    Ok(d)
}

/// Fourth-order one-sided derivative at the left end of the samples.
pub fn left_derivative4<T: Real>(u: &[T], h: T) -> Result<T> {
    if u.len() < 5 {
        return Err(Error::Resolution(format!(
            "boundary derivative needs at least 5 samples, got {}",
            u.len()
        )));
    }
    let c = [-25.0, 48.0, -36.0, 16.0, -3.0];
    let s: T = c.iter().zip(u).map(|(c, v)| lit::<T>(*c) * *v).sum();
    Ok(s / (lit::<T>(12.0) * h))
}

/// Fourth-order second derivative with one-sided closures at both ends.
pub fn second_derivative4<T: Real>(u: &[T], h: T) -> Result<Vec<T>> {
    let n = u.len();
    if n < 6 {
        return Err(Error::Resolution(format!(
            "fourth-order second derivative needs at least 6 samples, got {n}"
        )));
    }
    let s = lit::<T>(12.0) * h * h;
    let edge0 = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    let edge1 = [10.0, -15.0, -4.0, 14.0, -6.0, 1.0];
    let stencil = |c: &[f64], vals: &mut dyn Iterator<Item = T>| -> T {
        c.iter().zip(vals).map(|(c, v)| lit::<T>(*c) * v).sum::<T>()
    };
    let mut d = vec![T::zero(); n];
    d[0] = stencil(&edge0, &mut u.iter().copied()) / s;
    d[1] = stencil(&edge1, &mut u.iter().copied()) / s;
    d[n - 1] = stencil(&edge0, &mut u.iter().rev().copied()) / s;
    d[n - 2] = stencil(&edge1, &mut u.iter().rev().copied()) / s;
    let (c1, c0) = (lit::<T>(16.0), lit::<T>(30.0));
    for i in 2..n - 2 {
        d[i] = (-u[i - 2] + c1 * u[i - 1] - c0 * u[i] + c1 * u[i + 1] - u[i + 2]) / s;
    }
    Ok(d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gregory_integrates_cubics_exactly() {
        let g = Grid1::<f64>::linspace(0.0_f64, 1.3, 14);
        let w = g.gregory_weights();
        let s: f64 = g.points().iter().zip(&w).map(|(x, w)| w * x.powi(3)).sum();
        assert!((s - 1.3_f64.powi(4) / 4.0).abs() < 1e-14);
    }

    #[test]
    fn stencils_are_fourth_order() {
        let errs: Vec<f64> = [200usize, 400]
            .iter()
            .map(|&n| {
                let g = Grid1::<f64>::linspace(0.0_f64, 2.0, n);
                let u: Vec<f64> = g.points().iter().map(|x| (1.7 * x).sin()).collect();
                let d2 = second_derivative4(&u, g.step).unwrap();
                let e2 = g
                    .points()
                    .iter()
                    .zip(&d2)
                    .map(|(x, d)| (d + 2.89 * (1.7 * x).sin()).abs())
                    .fold(0.0, f64::max);
                let d1 = left_derivative4(&u, g.step).unwrap();
                e2.max((d1 - 1.7).abs())
            })
            .collect();
        assert!(errs[0] / errs[1] > 12.0, "{errs:?}");
    }

    #[test]
    fn nearest_clamps() {
        let g = Grid1::<f64>::linspace(0.0_f64, 1.0, 11);
        assert_eq!(g.nearest(-3.0), 0);
        assert_eq!(g.nearest(0.31), 3);
        assert_eq!(g.nearest(7.0), 10);
    }
}

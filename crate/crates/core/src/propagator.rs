//! Causal, retarded and advanced Green operators of `d_t^2 + A` by
//! functional calculus on a spectral resolution.
//!
//! Conventions: the causal kernel is `G(t) = sin(sqrt(A) t) / sqrt(A)`. The
//! retarded operator `(G_ret f)(t) = int_{t' < t} G(t - t') f(t') dt'`
//! vanishes before the source, the advanced operator
//! `(G_adv f)(t) = -int_{t' > t} G(t - t') f(t') dt'` vanishes after it, and
//! `G_ret - G_adv` is the causal operator `int G(t - t') f(t') dt'`.

use std::io::Write;

use num_complex::Complex;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::grid::{max_abs, Grid1};
use crate::model::{conformal_factors, BoundaryCondition, WarpedProfile};
use crate::scalar::{idx, lit, to_f64, Real};
use crate::spectral::{resolve, Basis, Coefficients, Quadrature, SpectralResolution};

/// `s(lambda, t)`: `sin(sqrt(lambda) t)/sqrt(lambda)`, `t`, or
/// `sinh(sqrt(-lambda) t)/sqrt(-lambda)`, with a series near `lambda t^2 = 0`.
pub fn propagation_factor<T: Real>(lambda: T, t: T) -> T {
    let z = lambda * t * t;
    if z.abs() < lit(1e-4) {
        // t (1 - z/6 + z^2/120 - z^3/5040)
        return t
            * (T::one() - z / lit(6.0) * (T::one() - z / lit(20.0) * (T::one() - z / lit(42.0))));
    }
    if lambda > T::zero() {
        let w = lambda.sqrt();
        (w * t).sin() / w
    } else {
        let w = (-lambda).sqrt();
        (w * t).sinh() / w
    }
}

/// `d/dt s(lambda, t)`: `cos(sqrt(lambda) t)` or `cosh(sqrt(-lambda) t)`.
pub fn propagation_cos<T: Real>(lambda: T, t: T) -> T {
    let z = lambda * t * t;
    if z.abs() < lit(1e-4) {
        return T::one() - z / lit(2.0) * (T::one() - z / lit(12.0) * (T::one() - z / lit(30.0)));
    }
    if lambda > T::zero() {
        (lambda.sqrt() * t).cos()
    } else {
        ((-lambda).sqrt() * t).cosh()
    }
}

/// Pointwise causal kernel `G(t; x, y)` of a resolution.
pub fn causal_kernel<T: Real>(res: &SpectralResolution<T>, t: T, x: T, y: T) -> T {
    let family = res.family;
    let continuum: T = res
        .nodes()
        .into_iter()
        .zip(res.weights())
        .map(|(xi, w)| {
            w * propagation_factor(res.eigenvalue(xi), t) * family.eval(x, xi) * family.eval(y, xi)
        })
        .sum();
    let bound: T = res
        .bound
        .iter()
        .map(|b| propagation_factor(b.lambda, t) * b.eval(x) * b.eval(y))
        .sum();
    continuum + bound
}

/// A kernel `G(t; x, y)` sampled on a product grid, row-major `[t][x][y]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KernelGrid<T: Real> {
    pub t: Grid1<T>,
    pub x: Grid1<T>,
    pub y: Grid1<T>,
    pub values: Vec<T>,
    pub meta: KernelMeta<T>,
}

/// Provenance of a sampled kernel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KernelMeta<T: Real> {
    pub bc: BoundaryCondition<T>,
    pub k: T,
    pub quadrature: Quadrature<T>,
    pub convention: String,
}

pub const KERNEL_CONVENTION: &str =
    "G(t;x,y) = sin(sqrt(A) t)/sqrt(A); retarded = theta(t-t') G, advanced = -theta(t'-t) G";

/// Deviation of a sampled kernel from its structural invariants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct KernelInvariants<T: Real> {
    /// `max |G(-t) + G(t)|` over grid pairs `+-t` (0 if the grid has none).
    pub time_antisymmetry: T,
    /// `max |G(t;x,y) - G(t;y,x)|` (requires equal x and y grids).
    pub spatial_symmetry: Option<T>,
    /// `max |G(0;x,y)|` if the grid contains `t = 0`.
    pub zero_slice: Option<T>,
}

impl<T: Real> KernelGrid<T> {
    pub fn build(res: &SpectralResolution<T>, t: Grid1<T>, x: Grid1<T>, y: Grid1<T>) -> Self {
        let xis = res.nodes();
        let w = res.weights();
        let fam = res.family;
        let lam: Vec<T> = xis.iter().map(|xi| res.eigenvalue(*xi)).collect();
        let nodes = xis.len();
        let sample = |g: &Grid1<T>| -> Vec<Vec<T>> {
            g.points()
                .into_iter()
                .map(|p| xis.iter().map(|xi| fam.eval(p, *xi)).collect())
                .collect()
        };
        let (px, py) = (sample(&x), sample(&y));
        let bx: Vec<Vec<T>> = res.bound.iter().map(|b| b.sample(&x)).collect();
        let by: Vec<Vec<T>> = res.bound.iter().map(|b| b.sample(&y)).collect();
        let tp = t.points();
        let mut values = vec![T::zero(); t.len * x.len * y.len];
        values
            .par_chunks_mut(y.len.max(1))
            .enumerate()
            .for_each(|(row, out)| {
                let (n, a) = (row / x.len, row % x.len);
                let tt = tp[n];
                let tmp: Vec<T> = (0..nodes)
                    .map(|j| w[j] * propagation_factor(lam[j], tt) * px[a][j])
                    .collect();
                let sb: Vec<T> = res
                    .bound
                    .iter()
                    .enumerate()
                    .map(|(m, b)| propagation_factor(b.lambda, tt) * bx[m][a])
                    .collect();
                for (b, o) in out.iter_mut().enumerate() {
                    let mut s: T = tmp.iter().zip(&py[b]).map(|(u, v)| *u * *v).sum();
                    for (m, c) in sb.iter().enumerate() {
                        s += *c * by[m][b];
                    }
                    *o = s;
                }
            });
        Self {
            t,
            x,
            y,
            values,
            meta: KernelMeta {
                bc: res.bc.clone(),
                k: res.k,
                quadrature: res.quadrature,
                convention: KERNEL_CONVENTION.into(),
            },
        }
    }

    /// Samples an arbitrary kernel function on the grid (e.g. an oracle).
    pub fn from_fn(
        t: Grid1<T>,
        x: Grid1<T>,
        y: Grid1<T>,
        meta: KernelMeta<T>,
        f: impl Fn(T, T, T) -> T,
    ) -> Self {
        let mut values = Vec::with_capacity(t.len * x.len * y.len);
        for tt in t.points() {
            for xx in x.points() {
                for yy in y.points() {
                    values.push(f(tt, xx, yy));
                }
            }
        }
        Self {
            t,
            x,
            y,
            values,
            meta,
        }
    }

    #[inline]
    pub fn index(&self, n: usize, a: usize, b: usize) -> usize {
        (n * self.x.len + a) * self.y.len + b
    }

    pub fn value(&self, n: usize, a: usize, b: usize) -> T {
        self.values[self.index(n, a, b)]
    }

    /// All samples as `(t, x, y, value)`.
    pub fn points(&self) -> impl Iterator<Item = (T, T, T, T)> + '_ {
        (0..self.t.len).flat_map(move |n| {
            (0..self.x.len).flat_map(move |a| {
                (0..self.y.len).map(move |b| {
                    (
                        self.t.point(n),
                        self.x.point(a),
                        self.y.point(b),
                        self.value(n, a, b),
                    )
                })
            })
        })
    }

    pub fn invariants(&self) -> KernelInvariants<T> {
        let tol = self.t.step.abs() * lit(1e-9);
        let tp = self.t.points();
        let mut anti = T::zero();
        let mut zero = None;
        for (n, tn) in tp.iter().enumerate() {
            if tn.abs() <= tol {
                let mut z = T::zero();
                for a in 0..self.x.len {
                    for b in 0..self.y.len {
                        z = z.max(self.value(n, a, b).abs());
                    }
                }
                zero = Some(z);
            }
            if let Some(m) = tp.iter().position(|s| (*s + *tn).abs() <= tol) {
                if m != n {
                    for a in 0..self.x.len {
                        for b in 0..self.y.len {
                            anti = anti.max((self.value(n, a, b) + self.value(m, a, b)).abs());
                        }
                    }
                }
            }
        }
        let symmetric = (self.x == self.y).then(|| {
            let mut s = T::zero();
            for n in 0..self.t.len {
                for a in 0..self.x.len {
                    for b in 0..a {
                        s = s.max((self.value(n, a, b) - self.value(n, b, a)).abs());
                    }
                }
            }
            s
        });
        KernelInvariants {
            time_antisymmetry: anti,
            spatial_symmetry: symmetric,
            zero_slice: zero,
        }
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,x,y,value")?;
        for (t, x, y, v) in self.points() {
            writeln!(w, "{},{},{},{}", fmt17(t), fmt17(x), fmt17(y), fmt17(v))?;
        }
        Ok(())
    }

    /// Row-major little-endian `f64` samples.
    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        write_f64le(w, &self.values)
    }

    /// JSON description of the binary layout plus provenance.
    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "kernel",
            "layout": "row-major [t][x][y]",
            "dtype": "f64le",
            "shape": [self.t.len, self.x.len, self.y.len],
            "axes": { "t": self.t, "x": self.x, "y": self.y },
            "meta": self.meta,
        })
    }
}

/// Formats with 17 significant digits, enough to round-trip an `f64`.
pub fn fmt17<T: Real>(v: T) -> String {
    format!("{:.16e}", to_f64(v))
}

pub(crate) fn write_f64le<T: Real, W: Write>(mut w: W, values: &[T]) -> Result<()> {
    let mut buf = Vec::with_capacity(values.len() * 8);
    for v in values {
        buf.extend_from_slice(&to_f64(*v).to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

/// Reads back the output of `write_binary`.
pub fn read_f64le(bytes: &[u8]) -> Result<Vec<f64>> {
    if !bytes.len().is_multiple_of(8) {
        return Err(Error::Parse(format!(
            "{} bytes is not a whole number of f64",
            bytes.len()
        )));
    }
    Ok(bytes
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect())
}

/// A function of `(t, x)` sampled on a product grid, row-major `[t][x]`.
/// Extended (Wentzell) fields also carry the boundary component `v(t)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpaceTimeField<T: Real> {
    pub t: Grid1<T>,
    pub x: Grid1<T>,
    pub values: Vec<T>,
    #[serde(default)]
    pub boundary: Option<Vec<T>>,
    #[serde(default)]
    pub warnings: Vec<Warning>,
}

impl<T: Real> SpaceTimeField<T> {
    pub fn zeros(t: Grid1<T>, x: Grid1<T>) -> Self {
        Self {
            t,
            x,
            values: vec![T::zero(); t.len * x.len],
            boundary: None,
            warnings: vec![],
        }
    }

    pub fn from_fn(t: Grid1<T>, x: Grid1<T>, f: impl Fn(T, T) -> T) -> Self {
        let xs = x.points();
        let values = t
            .points()
            .into_iter()
            .flat_map(|tt| xs.iter().map(move |xx| (tt, *xx)).collect::<Vec<_>>())
            .map(|(tt, xx)| f(tt, xx))
            .collect();
        Self {
            t,
            x,
            values,
            boundary: None,
            warnings: vec![],
        }
    }

    /// Separable Gaussian `amp exp(-(t-t0)^2/(2 st^2) - (x-x0)^2/(2 sx^2))`.
    pub fn gaussian(t: Grid1<T>, x: Grid1<T>, t0: T, x0: T, st: T, sx: T, amp: T) -> Self {
        let two = lit::<T>(2.0);
        Self::from_fn(t, x, |tt, xx| {
            amp * (-(tt - t0).powi(2) / (two * st * st) - (xx - x0).powi(2) / (two * sx * sx)).exp()
        })
    }

    pub fn row(&self, n: usize) -> &[T] {
        &self.values[n * self.x.len..(n + 1) * self.x.len]
    }

    pub fn row_mut(&mut self, n: usize) -> &mut [T] {
        let nx = self.x.len;
        &mut self.values[n * nx..(n + 1) * nx]
    }

    pub fn at(&self, n: usize, i: usize) -> T {
        self.values[n * self.x.len + i]
    }

    pub fn max_abs(&self) -> T {
        max_abs(&self.values)
    }

    /// `max |u|` over rows with `t` in `[lo, hi]`.
    pub fn max_abs_between(&self, lo: T, hi: T) -> T {
        (0..self.t.len)
            .filter(|n| {
                let t = self.t.point(*n);
                t >= lo && t <= hi
            })
            .fold(T::zero(), |m, n| m.max(max_abs(self.row(n))))
    }

    /// Discrete `L^2` norm `sqrt(sum u^2 dt dx)`.
    pub fn l2(&self) -> T {
        let s: T = self.values.iter().map(|v| *v * *v).sum();
        (s * self.t.step.abs() * self.x.step.abs()).sqrt()
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if self.t != other.t || self.x != other.x {
            return Err(Error::Shape("fields live on different grids".into()));
        }
        Ok(())
    }

    /// `self - other`
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| *a - *b)
                .collect(),
            boundary: None,
            warnings: vec![],
            ..*self.shallow()
        })
    }

    pub fn scaled(&self, c: T) -> Self {
        Self {
            values: self.values.iter().map(|v| *v * c).collect(),
            boundary: self
                .boundary
                .as_ref()
                .map(|b| b.iter().map(|v| *v * c).collect()),
            warnings: self.warnings.clone(),
            ..*self.shallow()
        }
    }

    /// Multiplies every time row pointwise by `m(x)`.
    pub fn multiplied(&self, m: &[T]) -> Result<Self> {
        if m.len() != self.x.len {
            return Err(Error::Shape(format!("multiplier has {} samples", m.len())));
        }
        let mut out = self.clone();
        out.boundary = None;
        for n in 0..self.t.len {
            for (v, c) in out.row_mut(n).iter_mut().zip(m) {
                *v *= *c;
            }
        }
        Ok(out)
    }

    /// `||self - other|| / ||other||` in discrete `L^2`.
    pub fn rel_l2(&self, reference: &Self) -> Result<T> {
        let d = self.sub(reference)?.l2();
        let r = reference.l2();
        Ok(if r == T::zero() { d } else { d / r })
    }

    fn shallow(&self) -> Box<Self> {
        Box::new(Self {
            t: self.t,
            x: self.x,
            values: vec![],
            boundary: None,
            warnings: vec![],
        })
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        if self.boundary.is_some() {
            writeln!(w, "t,x,value,boundary")?;
        } else {
            writeln!(w, "t,x,value")?;
        }
        for n in 0..self.t.len {
            let t = fmt17(self.t.point(n));
            for i in 0..self.x.len {
                match &self.boundary {
                    Some(b) => writeln!(
                        w,
                        "{t},{},{},{}",
                        fmt17(self.x.point(i)),
                        fmt17(self.at(n, i)),
                        fmt17(b[n])
                    )?,
                    None => writeln!(w, "{t},{},{}", fmt17(self.x.point(i)), fmt17(self.at(n, i)))?,
                }
            }
        }
        Ok(())
    }

    pub fn write_binary<W: Write>(&self, w: W) -> Result<()> {
        write_f64le(w, &self.values)
    }

    pub fn sidecar(&self) -> serde_json::Value {
        serde_json::json!({
            "kind": "field",
            "layout": "row-major [t][x]",
            "dtype": "f64le",
            "shape": [self.t.len, self.x.len],
            "axes": { "t": self.t, "x": self.x },
            "warnings": self.warnings,
        })
    }
}

/// A bulk-plus-boundary state `(u, v)` of the Wentzell realization.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExtendedState<T: Real> {
    pub u: Vec<T>,
    pub v: T,
}

impl<T: Real> ExtendedState<T> {
    /// The lift `u -> (u, u(0))`.
    pub fn ext(u: Vec<T>) -> Self {
        let v = u[0];
        Self { u, v }
    }

    /// `|u(0) - v|`, zero for states in the operator domain.
    pub fn compatibility(&self) -> T {
        (self.u[0] - self.v).abs()
    }

    /// The projection onto the bulk.
    pub fn pr1(self) -> Vec<T> {
        self.u
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GreenKind {
    Causal,
    Retarded,
    Advanced,
}

/// A resolution sampled on a field grid, ready to apply Green operators.
#[derive(Debug, Clone)]
pub struct Propagator<T: Real> {
    pub res: SpectralResolution<T>,
    pub basis: Basis<T>,
}

impl<T: Real> Propagator<T> {
    pub fn new(res: &SpectralResolution<T>, x: &Grid1<T>) -> Result<Self> {
        Ok(Self {
            res: res.clone(),
            basis: res.basis(x)?,
        })
    }

    /// Applies the Green operator of the given kind to a space-time source.
    ///
    /// The source is expanded row by row, each coefficient is convolved in
    /// time with `s(lambda, t)` exactly for a piecewise-linear interpolant
    /// (continuum) or by the trapezoid rule (bound states), and the result
    /// is resynthesized. Extended resolutions lift the source by its trace
    /// and return the boundary component alongside the bulk.
    pub fn apply(&self, f: &SpaceTimeField<T>, kind: GreenKind) -> Result<SpaceTimeField<T>> {
        if f.x != self.basis.grid {
            return Err(Error::Shape(
                "source grid differs from the propagator grid".into(),
            ));
        }
        let nt = f.t.len;
        let mut out = SpaceTimeField::zeros(f.t, f.x);
        out.warnings = source_warnings(f);
        if nt == 0 {
            return Ok(out);
        }
        let basis = &self.basis;
        let coeffs: Vec<Coefficients<T>> = (0..nt)
            .into_par_iter()
            .map(|n| basis.analyze(f.row(n), None))
            .collect::<Result<_>>()?;
        let h = f.t.step;
        let nodes = basis.nodes();
        // per node: time series of the convolved coefficient
        let conv: Vec<Vec<T>> = (0..nodes)
            .into_par_iter()
            .map(|j| {
                let c: Vec<T> = coeffs.iter().map(|c| c.continuum[j]).collect();
                filon_convolve(&c, basis.eigenvalues[j].sqrt(), h, kind)
            })
            .collect();
        let bconv: Vec<Vec<T>> = basis
            .bound
            .iter()
            .enumerate()
            .map(|(m, (lambda, _))| {
                let d: Vec<T> = coeffs.iter().map(|c| c.bound[m]).collect();
                trapezoid_convolve(&d, *lambda, h, kind)
            })
            .collect();
        let rows: Vec<(Vec<T>, Option<T>)> = (0..nt)
            .into_par_iter()
            .map(|n| {
                let c = Coefficients {
                    continuum: conv.iter().map(|s| s[n]).collect(),
                    bound: bconv.iter().map(|s| s[n]).collect(),
                };
                basis.synthesize(&c)
            })
            .collect();
        let mut boundary = Vec::with_capacity(nt);
        for (n, (u, v)) in rows.into_iter().enumerate() {
            out.row_mut(n).copy_from_slice(&u);
            if let Some(v) = v {
                boundary.push(v);
            }
        }
        if basis.is_extended() {
            out.boundary = Some(boundary);
        }
        Ok(out)
    }

    /// `cos(sqrt(A) t) u0 + s(A, t) v0` at each requested time.
    pub fn evolve(&self, u0: &[T], v0: &[T], times: &[T]) -> Result<Vec<Vec<T>>> {
        let cu = self.basis.analyze(u0, None)?;
        let cv = self.basis.analyze(v0, None)?;
        let lam = &self.basis.eigenvalues;
        times
            .par_iter()
            .map(|t| {
                if *t == T::zero() {
                    return Ok(u0.to_vec());
                }
                let c = Coefficients {
                    continuum: (0..lam.len())
                        .map(|j| {
                            propagation_cos(lam[j], *t) * cu.continuum[j]
                                + propagation_factor(lam[j], *t) * cv.continuum[j]
                        })
                        .collect(),
                    bound: self
                        .basis
                        .bound
                        .iter()
                        .enumerate()
                        .map(|(m, (l, _))| {
                            propagation_cos(*l, *t) * cu.bound[m]
                                + propagation_factor(*l, *t) * cv.bound[m]
                        })
                        .collect(),
                };
                Ok(self.basis.synthesize(&c).0)
            })
            .collect()
    }
}

fn source_warnings<T: Real>(f: &SpaceTimeField<T>) -> Vec<Warning> {
    let scale = f.max_abs();
    let mut w = Vec::new();
    if scale == T::zero() || f.t.len == 0 {
        return w;
    }
    let tol = scale * lit(1e-8);
    let first = max_abs(f.row(0));
    let last = max_abs(f.row(f.t.len - 1));
    let edge = (0..f.t.len).fold(T::zero(), |m, n| m.max(f.row(n)[f.x.len - 1].abs()));
    for (what, v) in [
        ("source at the first time", first),
        ("source at the last time", last),
        ("source at x_max", edge),
    ] {
        if v > tol {
            w.push(Warning::Truncation {
                what: what.into(),
                edge_value: to_f64(v),
            });
        }
    }
    w
}

/// `int_0^h e^{i w s} (1 - s/h) ds` and `int_0^h e^{i w s} (s/h) ds`.
fn filon_weights<T: Real>(w: T, h: T) -> (Complex<T>, Complex<T>) {
    let th = w * h;
    let i = Complex::new(T::zero(), T::one());
    let (i0, i1) = if th.abs() < lit(1e-2) {
        // I0/h = sum (i th)^k/(k+1)!, I1/h = sum (i th)^k/(k! (k+2))
        let mut i0 = Complex::new(T::zero(), T::zero());
        let mut i1 = Complex::new(T::zero(), T::zero());
        let mut p = Complex::new(T::one(), T::zero());
        let mut fact = T::one();
        for k in 0..10 {
            let kk = idx::<T>(k);
            i0 += p / (fact * (kk + T::one()));
            i1 += p / (fact * (kk + lit(2.0)));
            p = p * i * th;
            fact *= kk + T::one();
        }
        (i0 * h, i1 * h)
    } else {
        let e = Complex::new(th.cos(), th.sin());
        let one = Complex::new(T::one(), T::zero());
        let i0 = (e - one) / (i * w);
        let i1 = e * h / (i * w) + (e - one) / (w * w);
        (i0, i1 / h)
    };
    (i0 - i1, i1)
}

/// Convolution of a sampled coefficient with `sin(w (t - t'))/w`, treating
/// the coefficient as piecewise linear in time.
fn filon_convolve<T: Real>(c: &[T], w: T, h: T, kind: GreenKind) -> Vec<T> {
    let nt = c.len();
    let (a, b) = filon_weights(w, h);
    let (a, b) = (a.conj(), b.conj());
    let phase = |n: usize| {
        let th = w * idx::<T>(n) * h;
        Complex::new(th.cos(), th.sin())
    };
    // cumulative[n] = int_{t_0}^{t_n} e^{-i w (t' - t_0)} c(t') dt'
    let mut cumulative = vec![Complex::new(T::zero(), T::zero()); nt];
    for n in 1..nt {
        let seg = phase(n - 1).conj() * (a * c[n - 1] + b * c[n]);
        cumulative[n] = cumulative[n - 1] + seg;
    }
    let total = cumulative[nt - 1];
    (0..nt)
        .map(|n| {
            let f = match kind {
                GreenKind::Retarded => cumulative[n],
                GreenKind::Causal => total,
                GreenKind::Advanced => -(total - cumulative[n]),
            };
            (phase(n) * f).im / w
        })
        .collect()
}

/// Convolution with `s(lambda, t - t')` by the trapezoid rule (bound states,
/// where the factor may grow exponentially).
fn trapezoid_convolve<T: Real>(d: &[T], lambda: T, h: T, kind: GreenKind) -> Vec<T> {
    let nt = d.len();
    let half = lit::<T>(0.5);
    let s: Vec<T> = (0..nt)
        .map(|m| propagation_factor(lambda, idx::<T>(m) * h))
        .collect();
    let s_at = |n: usize, m: usize| if n >= m { s[n - m] } else { -s[m - n] };
    (0..nt)
        .map(|n| {
            let (lo, hi, sign) = match kind {
                GreenKind::Retarded => (0, n, T::one()),
                GreenKind::Advanced => (n, nt - 1, -T::one()),
                GreenKind::Causal => (0, nt - 1, T::one()),
            };
            if hi == lo {
                return T::zero();
            }
            let mut acc = half * (s_at(n, lo) * d[lo] + s_at(n, hi) * d[hi]);
            for (m, dm) in d.iter().enumerate().take(hi).skip(lo + 1) {
                acc += s_at(n, m) * *dm;
            }
            sign * acc * h
        })
        .collect()
}

pub fn apply_causal<T: Real>(
    res: &SpectralResolution<T>,
    f: &SpaceTimeField<T>,
) -> Result<SpaceTimeField<T>> {
    Propagator::new(res, &f.x)?.apply(f, GreenKind::Causal)
}

pub fn apply_retarded<T: Real>(
    res: &SpectralResolution<T>,
    f: &SpaceTimeField<T>,
) -> Result<SpaceTimeField<T>> {
    Propagator::new(res, &f.x)?.apply(f, GreenKind::Retarded)
}

pub fn apply_advanced<T: Real>(
    res: &SpectralResolution<T>,
    f: &SpaceTimeField<T>,
) -> Result<SpaceTimeField<T>> {
    Propagator::new(res, &f.x)?.apply(f, GreenKind::Advanced)
}

/// `cos(sqrt(A) t) u0 + s(A, t) v0` on `grid`.
pub fn evolve_cauchy<T: Real>(
    res: &SpectralResolution<T>,
    grid: &Grid1<T>,
    u0: &[T],
    v0: &[T],
    t: T,
) -> Result<Vec<T>> {
    Ok(Propagator::new(res, grid)?
        .evolve(u0, v0, &[t])?
        .pop()
        .expect("one time"))
}

/// Green operator of the Wentzell realization at mode `k`: lifts the source
/// by its trace, applies the extended functional calculus and returns the
/// bulk field together with its boundary component.
pub fn wentzell_apply<T: Real>(
    f: &SpaceTimeField<T>,
    k: T,
    quadrature: Quadrature<T>,
    kind: GreenKind,
) -> Result<SpaceTimeField<T>> {
    let res = resolve(&BoundaryCondition::WentzellLaplace, k, quadrature)?;
    Propagator::new(&res, &f.x)?.apply(f, kind)
}

/// Physical Green operator `beta^((1-m)/4) o op o beta^((3+m)/4)` of a warped
/// static metric from the reduced one.
pub fn conformal_wrap<'a, T, F>(
    op: F,
    profile: &WarpedProfile<T>,
) -> Result<impl Fn(&SpaceTimeField<T>) -> Result<SpaceTimeField<T>> + 'a>
where
    T: Real,
    F: Fn(&SpaceTimeField<T>) -> Result<SpaceTimeField<T>> + 'a,
{
    let factors = conformal_factors(profile)?;
    Ok(move |f: &SpaceTimeField<T>| {
        let inner = op(&f.multiplied(&factors.post)?)?;
        let mut out = inner.multiplied(&factors.pre)?;
        out.warnings = inner.warnings;
        Ok(out)
    })
}

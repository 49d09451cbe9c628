//! Independent references: finite-difference realizations, a Sturm-sequence
//! eigensolver, a Störmer–Verlet (leapfrog) integrator and the closed-form
//! method-of-images kernels.
//!
//! The finite-difference operator lives on the nodes `x_i = i dx` of
//! `[0, x_max]` with a homogeneous Dirichlet condition at `x_max`. It is
//! written as `M^{-1} K` with a diagonal mass `M` and a symmetric stiffness
//! `K`, and stored in the scaled form `S = M^{-1/2} K M^{-1/2}`, which is
//! symmetric tridiagonal. The boundary rows come from the discrete energy:
//!
//! * Robin `u'(0) = alpha u(0)`: half-cell mass `1/2` and
//!   `K_00 = 1/dx^2 + alpha/dx + k^2/2`, equivalent to the ghost-point
//!   closure `u_{-1} = u_1 - 2 dx alpha u_0`;
//! * Wentzell `u'(0) = (d_t^2 + theta) u(0)`: the boundary node doubles as
//!   the boundary degree of freedom, mass `1/2 + 1/dx` and
//!   `K_00 = 1/dx^2 + k^2/2 + theta/dx`;
//! * Dirichlet: node 0 is eliminated.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::Grid1;
use crate::model::{BoundaryCondition, Symbol};
use crate::propagator::SpaceTimeField;
use crate::scalar::{idx, lit, to_f64, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FdKind {
    Plain,
    /// Bulk plus one boundary degree of freedom (Wentzell).
    Extended,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FdSystem<T: Real> {
    pub kind: FdKind,
    pub bc: BoundaryCondition<T>,
    pub k: T,
    pub grid: Grid1<T>,
    pub dx: T,
    /// Index in `grid` of the first unknown (1 under Dirichlet).
    pub first: usize,
    /// Lumped mass per unknown (in units of `dx`).
    pub mass: Vec<T>,
    /// Stiffness `K`: diagonal and super-diagonal.
    pub stiff_diag: Vec<T>,
    pub stiff_off: Vec<T>,
    /// Scaled symmetric matrix `S`: diagonal and super-diagonal.
    pub diag: Vec<T>,
    pub off: Vec<T>,
    /// Robin parameter of the boundary row, if any.
    pub alpha: Option<T>,
    /// Boundary symbol of the Wentzell row.
    pub theta: Option<T>,
}

/// Finite-difference realization of `-d_x^2 + k^2` under `bc` on `grid`
/// (which must start at 0 and have at least 16 nodes).
pub fn assemble_fd<T: Real>(
    bc: &BoundaryCondition<T>,
    k: T,
    grid: Grid1<T>,
) -> Result<FdSystem<T>> {
    assemble_fd_with_potential(bc, k, grid, None)
}

/// As [`assemble_fd`], adding a potential `C(x)` sampled on `grid`.
pub fn assemble_fd_with_potential<T: Real>(
    bc: &BoundaryCondition<T>,
    k: T,
    grid: Grid1<T>,
    potential: Option<&[T]>,
) -> Result<FdSystem<T>> {
    if grid.len < 16 {
        return Err(Error::Model(format!(
            "grid must be >= 16, got {}",
            grid.len
        )));
    }
    if grid.start != T::zero() || !(grid.step > T::zero()) {
        return Err(Error::Shape("FD grids start at the boundary x = 0".into()));
    }
    if let Some(c) = potential {
        if c.len() != grid.len {
            return Err(Error::Shape(format!("potential has {} samples", c.len())));
        }
    }
    let dx = grid.step;
    let inv2 = T::one() / (dx * dx);
    let two = lit::<T>(2.0);
    let half = lit::<T>(0.5);
    let k2 = k * k;
    let (first, alpha, theta, kind) = match bc {
        BoundaryCondition::Dirichlet => (1, None, None, FdKind::Plain),
        BoundaryCondition::WentzellLaplace => (
            0,
            None,
            Some(Symbol::<T>::laplacian().eval(k)),
            FdKind::Extended,
        ),
        other => (0, other.robin_parameter(k), None, FdKind::Plain),
    };
    // unknowns: nodes first ..= len - 2 (the far end is pinned to zero)
    let n = grid.len - 1 - first;
    let mut mass = vec![T::one(); n];
    let mut kd = vec![two * inv2 + k2; n];
    let ko = vec![-inv2; n - 1];
    if first == 0 {
        mass[0] = half;
        kd[0] = inv2 + half * k2;
        if let Some(a) = alpha {
            kd[0] += a / dx;
        }
        if let Some(th) = theta {
            mass[0] += T::one() / dx;
            kd[0] += th / dx;
        }
    }
    if let Some(c) = potential {
        for i in 0..n {
            let lump = if first == 0 && i == 0 { half } else { T::one() };
            kd[i] += lump * c[first + i];
        }
    }
    let diag = kd.iter().zip(&mass).map(|(k, m)| *k / *m).collect();
    let off = (0..n - 1)
        .map(|i| ko[i] / (mass[i] * mass[i + 1]).sqrt())
        .collect();
    Ok(FdSystem {
        kind,
        bc: bc.clone(),
        k,
        grid,
        dx,
        first,
        mass,
        stiff_diag: kd,
        stiff_off: ko,
        diag,
        off,
        alpha,
        theta,
    })
}

impl<T: Real> FdSystem<T> {
    pub fn size(&self) -> usize {
        self.diag.len()
    }

    /// Dense copy of the scaled symmetric matrix `S`.
    pub fn dense(&self) -> Vec<Vec<T>> {
        let n = self.size();
        let mut m = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            m[i][i] = self.diag[i];
            if i + 1 < n {
                m[i][i + 1] = self.off[i];
                m[i + 1][i] = self.off[i];
            }
        }
        m
    }

    /// `max |S - S^T|` of the dense matrix.
    pub fn symmetry_residual(&self) -> T {
        let m = self.dense();
        let mut worst = T::zero();
        for (i, row) in m.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                worst = worst.max((*v - m[j][i]).abs());
            }
        }
        worst
    }

    /// `z = M^{1/2} u` restricted to the unknowns.
    pub fn to_scaled(&self, u: &[T]) -> Vec<T> {
        self.mass
            .iter()
            .enumerate()
            .map(|(i, m)| m.sqrt() * u[self.first + i])
            .collect()
    }

    /// Inverse of [`to_scaled`](Self::to_scaled), zero at pinned nodes.
    pub fn from_scaled(&self, z: &[T]) -> Vec<T> {
        let mut u = vec![T::zero(); self.grid.len];
        for (i, (z, m)) in z.iter().zip(&self.mass).enumerate() {
            u[self.first + i] = *z / m.sqrt();
        }
        u
    }

    /// `S z`
    pub fn matvec(&self, z: &[T]) -> Vec<T> {
        let n = self.size();
        (0..n)
            .map(|i| {
                let mut s = self.diag[i] * z[i];
                if i > 0 {
                    s += self.off[i - 1] * z[i - 1];
                }
                if i + 1 < n {
                    s += self.off[i] * z[i + 1];
                }
                s
            })
            .collect()
    }

    /// The discrete operator `M^{-1} K` applied to a function on the full
    /// grid (pinned nodes are ignored and return zero).
    pub fn apply(&self, u: &[T]) -> Vec<T> {
        self.from_scaled(&self.matvec(&self.to_scaled(u)))
    }

    /// Discrete energy form `u^T K w` (unit-`dx` scaling).
    pub fn stiffness_form(&self, u: &[T], w: &[T]) -> T {
        let n = self.size();
        let f = self.first;
        let mut s = T::zero();
        for i in 0..n {
            s += self.stiff_diag[i] * u[f + i] * w[f + i];
            if i + 1 < n {
                s += self.stiff_off[i] * (u[f + i] * w[f + i + 1] + u[f + i + 1] * w[f + i]);
            }
        }
        s * self.dx
    }

    /// Number of eigenvalues of `S` strictly below `x` (Sturm sequence).
    pub fn count_below(&self, x: T) -> usize {
        let tiny = T::min_positive_value().sqrt();
        let mut count = 0;
        let mut q = T::one();
        for i in 0..self.size() {
            let b2 = if i == 0 {
                T::zero()
            } else {
                self.off[i - 1] * self.off[i - 1]
            };
            q = self.diag[i] - x - if i == 0 { T::zero() } else { b2 / q };
            if q == T::zero() {
                q = -tiny;
            }
            if q < T::zero() {
                count += 1;
            }
        }
        count
    }

    fn gershgorin(&self) -> (T, T) {
        let n = self.size();
        let mut lo = T::infinity();
        let mut hi = T::neg_infinity();
        for i in 0..n {
            let mut r = T::zero();
            if i > 0 {
                r += self.off[i - 1].abs();
            }
            if i + 1 < n {
                r += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - r);
            hi = hi.max(self.diag[i] + r);
        }
        (lo, hi)
    }

    /// The `j`-th smallest eigenvalue by bisection on the Sturm count.
    pub fn eigenvalue(&self, j: usize) -> T {
        let (mut lo, mut hi) = self.gershgorin();
        let eps = T::epsilon();
        for _ in 0..200 {
            let mid = lo + (hi - lo) * lit(0.5);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= eps * lit::<T>(4.0) * lo.abs().max(hi.abs()) {
                break;
            }
        }
        lo + (hi - lo) * lit(0.5)
    }
}

/// Lowest `count` eigenvalues in ascending order.
pub fn fd_spectrum<T: Real>(sys: &FdSystem<T>, count: usize) -> Vec<T> {
    (0..count.min(sys.size()))
        .map(|j| sys.eigenvalue(j))
        .collect()
}

/// Eigenvalues of a symmetric tridiagonal matrix given by its diagonal and
/// off-diagonal, ascending.
pub fn tridiagonal_eigenvalues<T: Real>(diag: &[T], off: &[T]) -> Vec<T> {
    let n = diag.len();
    let sys = FdSystem {
        kind: FdKind::Plain,
        bc: BoundaryCondition::Dirichlet,
        k: T::zero(),
        grid: Grid1::with_step(T::zero(), T::one(), n + 1),
        dx: T::one(),
        first: 0,
        mass: vec![T::one(); n],
        stiff_diag: diag.to_vec(),
        stiff_off: off.to_vec(),
        diag: diag.to_vec(),
        off: off.to_vec(),
        alpha: None,
        theta: None,
    };
    fd_spectrum(&sys, n)
}

/// Samples of a leapfrog run on the full spatial grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Trajectory<T: Real> {
    pub dt: T,
    pub times: Vec<T>,
    pub u: Vec<Vec<T>>,
    pub udot: Vec<Vec<T>>,
}

/// Störmer–Verlet integrator for `u'' = -M^{-1} K u + f`, in the scaled
/// variables `z = M^{1/2} u`.
#[derive(Debug, Clone)]
pub struct Leapfrog<'a, T: Real> {
    pub sys: &'a FdSystem<T>,
    pub dt: T,
    pub t: T,
    z: Vec<T>,
    p: Vec<T>,
    acc: Vec<T>,
}

impl<'a, T: Real> Leapfrog<'a, T> {
    /// Requires `dt <= dx / 2`.
    pub fn new(sys: &'a FdSystem<T>, u0: &[T], v0: &[T], dt: T) -> Result<Self> {
        let limit = sys.dx * lit(0.5);
        if !(dt > T::zero()) || dt > limit * (T::one() + lit::<T>(1e-12)) {
            return Err(Error::Stability {
                dt: to_f64(dt),
                limit: to_f64(limit),
            });
        }
        if u0.len() != sys.grid.len || v0.len() != sys.grid.len {
            return Err(Error::Shape("initial data must live on the FD grid".into()));
        }
        let z = sys.to_scaled(u0);
        let acc = neg(&sys.matvec(&z));
        Ok(Self {
            sys,
            dt,
            t: T::zero(),
            p: sys.to_scaled(v0),
            z,
            acc,
        })
    }

    fn force(&self, f: Option<&[T]>) -> Option<Vec<T>> {
        f.map(|f| self.sys.to_scaled(f))
    }

    /// Advances one step. `f_now`, `f_next` are the forcing at `t` and
    /// `t + dt` on the full grid (or `None` for no forcing).
    pub fn step(&mut self, f_now: Option<&[T]>, f_next: Option<&[T]>) {
        let h = self.dt * lit(0.5);
        let fz_now = self.force(f_now);
        for i in 0..self.z.len() {
            let f = fz_now.as_ref().map_or(T::zero(), |f| f[i]);
            self.p[i] += h * (self.acc[i] + f);
            self.z[i] += self.dt * self.p[i];
        }
        self.acc = neg(&self.sys.matvec(&self.z));
        let fz_next = self.force(f_next);
        for i in 0..self.z.len() {
            let f = fz_next.as_ref().map_or(T::zero(), |f| f[i]);
            self.p[i] += h * (self.acc[i] + f);
        }
        self.t += self.dt;
    }

    /// Reverses the direction of time (flips the velocity).
    pub fn reverse(&mut self) {
        for p in self.p.iter_mut() {
            *p = -*p;
        }
    }

    pub fn u(&self) -> Vec<T> {
        self.sys.from_scaled(&self.z)
    }

    pub fn udot(&self) -> Vec<T> {
        self.sys.from_scaled(&self.p)
    }
}

fn neg<T: Real>(v: &[T]) -> Vec<T> {
    v.iter().map(|x| -*x).collect()
}

/// Free evolution from `(u0, v0)` up to time `t_end`, recording every step.
pub fn leapfrog<T: Real>(
    sys: &FdSystem<T>,
    u0: &[T],
    v0: &[T],
    dt: T,
    t_end: T,
) -> Result<Trajectory<T>> {
    let steps = (t_end / dt).round().to_usize().unwrap_or(0);
    let mut lf = Leapfrog::new(sys, u0, v0, dt)?;
    let mut traj = Trajectory {
        dt,
        times: vec![T::zero()],
        u: vec![lf.u()],
        udot: vec![lf.udot()],
    };
    for n in 1..=steps {
        lf.step(None, None);
        traj.times.push(idx::<T>(n) * dt);
        traj.u.push(lf.u());
        traj.udot.push(lf.udot());
    }
    Ok(traj)
}

/// Retarded response to a space-time source, from rest at the first time of
/// the source grid. The source's time step is the leapfrog step and its
/// spatial grid must be the system's grid. For extended systems the source
/// is lifted to the boundary degree of freedom by its trace.
pub fn leapfrog_response<T: Real>(
    sys: &FdSystem<T>,
    source: &SpaceTimeField<T>,
) -> Result<SpaceTimeField<T>> {
    if source.x != sys.grid {
        return Err(Error::Shape("source grid differs from the FD grid".into()));
    }
    let zero = vec![T::zero(); sys.grid.len];
    let mut lf = Leapfrog::new(sys, &zero, &zero, source.t.step)?;
    let mut out = SpaceTimeField::zeros(source.t, source.x);
    for n in 1..source.t.len {
        lf.step(Some(source.row(n - 1)), Some(source.row(n)));
        out.row_mut(n).copy_from_slice(&lf.u());
    }
    if sys.kind == FdKind::Extended {
        out.boundary = Some((0..out.t.len).map(|n| out.row(n)[0]).collect());
    }
    Ok(out)
}

/// `1/2 sign(t) [|x - y| < |t|]`, the free kernel on the line.
pub fn free_kernel<T: Real>(t: T, x: T, y: T) -> T {
    if t == T::zero() || (x - y).abs() >= t.abs() {
        T::zero()
    } else {
        t.signum() * lit(0.5)
    }
}

/// Method-of-images kernel for `k = 0`: `G(t;x,y) -/+ G(t;x,-y)`, minus for
/// Dirichlet, plus for Neumann.
pub fn images_kernel<T: Real>(t: T, x: T, y: T, bc: &BoundaryCondition<T>) -> Result<T> {
    let sign = match bc {
        BoundaryCondition::Dirichlet => -T::one(),
        BoundaryCondition::Neumann => T::one(),
        BoundaryCondition::Robin { alpha } if *alpha == T::zero() => T::one(),
        other => {
            return Err(Error::Config(format!(
                "images kernel only exists for Dirichlet and Neumann, not {}",
                other.name()
            )))
        }
    };
    Ok(free_kernel(t, x, y) + sign * free_kernel(t, x, -y))
}

/// Second-order finite-difference wave operator
/// `(d_t^2 - d_x^2 + k^2) u` on the interior of a space-time grid; the outer
/// rows and columns are set to zero.
pub fn fd_wave_operator<T: Real>(u: &SpaceTimeField<T>, k: T) -> SpaceTimeField<T> {
    let mut out = SpaceTimeField::zeros(u.t, u.x);
    let (nt, nx) = (u.t.len, u.x.len);
    if nt < 3 || nx < 3 {
        return out;
    }
    let it2 = T::one() / (u.t.step * u.t.step);
    let ix2 = T::one() / (u.x.step * u.x.step);
    let two = lit::<T>(2.0);
    for n in 1..nt - 1 {
        let (a, b, c) = (u.row(n - 1), u.row(n), u.row(n + 1));
        let row: Vec<T> = (1..nx - 1)
            .map(|i| {
                (c[i] - two * b[i] + a[i]) * it2 - (b[i + 1] - two * b[i] + b[i - 1]) * ix2
                    + k * k * b[i]
            })
            .collect();
        out.row_mut(n)[1..nx - 1].copy_from_slice(&row);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize, x_max: f64) -> Grid1<f64> {
        Grid1::<f64>::linspace(0.0, x_max, n)
    }

    #[test]
    fn tridiagonal_two_by_two() {
        let e = tridiagonal_eigenvalues(&[1.0_f64, 2.0], &[0.0]);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 2.0).abs() < 1e-14);
        let e = tridiagonal_eigenvalues(&[2.0_f64, 2.0], &[1.0]);
        assert!((e[0] - 1.0).abs() < 1e-14 && (e[1] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn stencil_and_symmetry() {
        for bc in [
            BoundaryCondition::Dirichlet,
            BoundaryCondition::Neumann,
            BoundaryCondition::robin(-1.0),
            BoundaryCondition::WentzellLaplace,
        ] {
            let s = assemble_fd(&bc, 0.5, grid(16, 3.0)).unwrap();
            assert_eq!(s.symmetry_residual(), 0.0);
            let dx = s.dx;
            let i = s.size() / 2;
            assert_eq!(s.diag[i], 2.0 / (dx * dx) + 0.25);
            assert_eq!(s.off[i], -1.0 / (dx * dx));
        }
        assert!(assemble_fd(&BoundaryCondition::<f64>::Dirichlet, 0.0, grid(15, 1.0)).is_err());
    }

    #[test]
    fn spectra_signs() {
        let d = assemble_fd(&BoundaryCondition::Dirichlet, 0.0, grid(16, 10.0)).unwrap();
        let e = fd_spectrum(&d, 1)[0];
        assert!(e > 0.0);
        assert_eq!(d.count_below(0.0), 0);
        let r = assemble_fd(&BoundaryCondition::robin(-1.0), 0.0, grid(2001, 20.0)).unwrap();
        assert_eq!(r.count_below(0.0), 1);
        let e = fd_spectrum(&r, 2);
        assert!((e[0] + 1.0).abs() < 1e-3, "{e:?}");
        assert!(e[1] > 0.0);
    }

    #[test]
    fn robin_eigenvalue_converges_at_second_order() {
        let errs: Vec<f64> = [501usize, 1001, 2001]
            .iter()
            .map(|&n| {
                let r = assemble_fd(&BoundaryCondition::robin(-2.0), 0.0, grid(n, 20.0)).unwrap();
                (fd_spectrum(&r, 1)[0] + 4.0).abs()
            })
            .collect();
        for w in errs.windows(2) {
            let ratio = w[0] / w[1];
            assert!(ratio > 3.5 && ratio < 4.5, "{errs:?}");
        }
    }

    #[test]
    fn images_examples() {
        let d = BoundaryCondition::Dirichlet;
        let n = BoundaryCondition::Neumann;
        assert_eq!(images_kernel(0.0, 0.4, 0.5, &d).unwrap(), 0.0);
        assert_eq!(images_kernel(0.3, 0.4, 0.5, &d).unwrap(), 0.5);
        assert_eq!(images_kernel(1.0, 0.4, 0.5, &d).unwrap(), 0.0);
        assert_eq!(images_kernel(1.0, 0.4, 0.5, &n).unwrap(), 1.0);
        assert!(images_kernel(1.0, 0.4, 0.5, &BoundaryCondition::robin(-1.0)).is_err());
        for (t, x, y) in [(0.7, 0.2, 0.6), (1.5, 1.0, 0.1), (0.2, 2.0, 2.1)] {
            for bc in [&d, &n] {
                let g = images_kernel(t, x, y, bc).unwrap();
                assert_eq!(images_kernel(-t, x, y, bc).unwrap(), -g);
                assert_eq!(images_kernel(t, y, x, bc).unwrap(), g);
            }
        }
    }

    #[test]
    fn leapfrog_zero_and_cfl() {
        let s = assemble_fd(&BoundaryCondition::robin(-1.0), 0.0, grid(101, 10.0)).unwrap();
        let z = vec![0.0; 101];
        let tr = leapfrog(&s, &z, &z, 0.05, 1.0).unwrap();
        assert!(tr.u.iter().flatten().all(|v| *v == 0.0));
        assert!(matches!(
            leapfrog(&s, &z, &z, 0.06, 1.0),
            Err(Error::Stability { .. })
        ));
    }

    #[test]
    fn leapfrog_is_reversible() {
        let g = grid(401, 20.0);
        let s = assemble_fd(&BoundaryCondition::robin(-0.5), 0.3, g).unwrap();
        let u0: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-(x - 5.0).powi(2)).exp())
            .collect();
        let v0: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (x - 5.0) * (-(x - 5.0).powi(2)).exp())
            .collect();
        let mut lf = Leapfrog::new(&s, &u0, &v0, 0.02).unwrap();
        for _ in 0..500 {
            lf.step(None, None);
        }
        lf.reverse();
        for _ in 0..500 {
            lf.step(None, None);
        }
        let back = lf.u();
        let err = back
            .iter()
            .zip(&u0)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "{err}");
        let vb = lf.udot();
        let err = vb
            .iter()
            .zip(&v0)
            .map(|(a, b)| (a + b).abs())
            .fold(0.0, f64::max);
        assert!(err < 1e-11, "{err}");
    }

    #[test]
    fn leapfrog_matches_dalembert() {
        let g = grid(2001, 20.0);
        let s = assemble_fd(&BoundaryCondition::Dirichlet, 0.0, g).unwrap();
        let bump = |x: f64| (-(x - 10.0).powi(2) * 2.0).exp();
        let u0: Vec<f64> = g.points().iter().map(|x| bump(*x)).collect();
        let z = vec![0.0; g.len];
        let t_end = 4.0;
        let tr = leapfrog(&s, &u0, &z, 0.005, t_end).unwrap();
        let last = tr.u.last().unwrap();
        let exact: Vec<f64> = g
            .points()
            .iter()
            .map(|x| 0.5 * bump(x - t_end) + 0.5 * bump(x + t_end))
            .collect();
        let num: f64 = last.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum();
        let den: f64 = exact.iter().map(|b| b * b).sum();
        assert!((num / den).sqrt() <= 1e-2, "{}", (num / den).sqrt());
    }
}

//! Spectral resolutions of the half-line realizations, one transverse mode
//! at a time.
//!
//! Each realization of `-d_x^2 + k^2` is diagonalized by a continuum family
//! `phi(x; xi)` with eigenvalue `xi^2 + k^2` and Plancherel weight `w`, plus
//! at most one exponentially decaying bound state. The improper integral over
//! `xi` is truncated at `xi_max` and sampled on a midpoint grid.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::grid::{gregory_weights, left_derivative4, weighted_norm, Grid1};
use crate::model::{check_positive, BoundaryCondition};
use crate::scalar::{idx, lit, Real};
use crate::special::{scaled_cubic_sine_tail, sine_integral};
use crate::triple::truncation_check;

/// Spectral window `W(xi / xi_max)` applied to the truncated continuum.
///
/// A sharp cut-off rings (Gibbs) around every light-cone discontinuity of the
/// kernel; a smooth window trades that for a slight smoothing of the output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Window {
    Sharp,
    /// `cos^2(pi s / 2)`; best for pointwise kernel values.
    Hann,
    /// `exp(-strength s^order)`; flat at low `xi`, best for fields.
    Exponential {
        order: u32,
        strength: f64,
    },
}

impl Window {
    pub fn fields() -> Self {
        Self::Exponential {
            order: 8,
            strength: 36.0,
        }
    }

    /// Window value at `s = xi / xi_max` in `[0, 1]`.
    pub fn weight<T: Real>(&self, s: T) -> T {
        match *self {
            Self::Sharp => T::one(),
            Self::Hann => {
                let c = (T::FRAC_PI_2() * s).cos();
                c * c
            }
            Self::Exponential { order, strength } => {
                (-lit::<T>(strength) * s.powi(order as i32)).exp()
            }
        }
    }
}

/// Truncation and sampling of the continuum integral over `xi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Quadrature<T: Real> {
    pub xi_max: T,
    pub nodes: usize,
    pub window: Window,
}

impl<T: Real> Default for Quadrature<T> {
    fn default() -> Self {
        Self {
            xi_max: lit(40.0),
            nodes: 4000,
            window: Window::fields(),
        }
    }
}

impl<T: Real> Quadrature<T> {
    pub fn new(xi_max: T, nodes: usize, window: Window) -> Result<Self> {
        let q = Self {
            xi_max,
            nodes,
            window,
        };
        q.validate()?;
        Ok(q)
    }

    /// Default truncation with the Hann window used for pointwise kernels.
    pub fn pointwise() -> Self {
        Self {
            window: Window::Hann,
            ..Self::default()
        }
    }

    pub fn with_window(self, window: Window) -> Self {
        Self { window, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.xi_max > T::zero()) || !self.xi_max.is_finite() {
            return Err(Error::Config(format!(
                "xi_max must be positive, got {}",
                self.xi_max
            )));
        }
        if self.nodes < 64 {
            return Err(Error::Config(format!(
                "at least 64 quadrature nodes required, got {}",
                self.nodes
            )));
        }
        Ok(())
    }

    pub fn step(&self) -> T {
        self.xi_max / idx::<T>(self.nodes)
    }

    /// Midpoint nodes `(j + 1/2) xi_max / nodes`.
    pub fn points(&self) -> Vec<T> {
        let h = self.step();
        (0..self.nodes)
            .map(|j| (idx::<T>(j) + lit(0.5)) * h)
            .collect()
    }

    /// `plancherel * d_xi * W(xi / xi_max)` per node.
    pub fn weights(&self, plancherel: T) -> Vec<T> {
        let h = self.step();
        self.points()
            .into_iter()
            .map(|xi| plancherel * h * self.window.weight(xi / self.xi_max))
            .collect()
    }
}

/// The continuum eigenfamily of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum Family<T: Real> {
    /// `sin(xi x)` (Dirichlet)
    Sine,
    /// `cos(xi x)` (Neumann, Robin with `alpha = 0`)
    Cosine,
    /// `(xi cos(xi x) + alpha sin(xi x)) / sqrt(xi^2 + alpha^2)`
    Robin { alpha: T },
    /// Bulk part of the bulk-plus-boundary eigenfunctions of the Wentzell
    /// realization, `[a (xi^2 + 1)]^(-1/2) (cos(xi x) - xi sin(xi x))`.
    Wentzell { a: T },
}

impl<T: Real> Family<T> {
    pub fn eval(&self, x: T, xi: T) -> T {
        match *self {
            Self::Sine => (xi * x).sin(),
            Self::Cosine => (xi * x).cos(),
            Self::Robin { alpha } => {
                let (s, c) = (xi * x).sin_cos();
                (xi * c + alpha * s) / (xi * xi + alpha * alpha).sqrt()
            }
            Self::Wentzell { a } => {
                let (s, c) = (xi * x).sin_cos();
                (c - xi * s) / (a * (xi * xi + T::one())).sqrt()
            }
        }
    }

    /// Component in the boundary space (Wentzell only).
    pub fn boundary_value(&self, xi: T) -> Option<T> {
        match *self {
            Self::Wentzell { a } => Some(T::one() / (a * (xi * xi + T::one())).sqrt()),
            _ => None,
        }
    }

    pub fn plancherel(&self) -> T {
        match self {
            Self::Wentzell { .. } => T::one(),
            _ => lit::<T>(2.0) / T::PI(),
        }
    }
}

/// Continuum mode of the Robin realization `d_x u(0) = alpha u(0)`.
pub fn robin_continuum_mode<T: Real>(x: T, xi: T, alpha: T) -> Result<T> {
    if xi == T::zero() && alpha == T::zero() {
        return Err(Error::Degenerate("xi = alpha = 0".into()));
    }
    if xi < T::zero() {
        return Err(Error::Domain(format!("xi must be positive, got {xi}")));
    }
    Ok(Family::Robin { alpha }.eval(x, xi))
}

/// Normalized bound state `sqrt(2 kappa) exp(-kappa x)` with eigenvalue
/// `lambda = k^2 - kappa^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundState<T: Real> {
    pub lambda: T,
    pub kappa: T,
}

impl<T: Real> BoundState<T> {
    pub fn eval(&self, x: T) -> T {
        (lit::<T>(2.0) * self.kappa).sqrt() * (-self.kappa * x).exp()
    }

    pub fn sample(&self, grid: &Grid1<T>) -> Vec<T> {
        grid.points().into_iter().map(|x| self.eval(x)).collect()
    }
}

/// The exponential eigenfunction of the Robin realization at mode `k`,
/// whatever the sign of its eigenvalue; exists iff `alpha < 0`.
pub fn robin_bound_state<T: Real>(alpha: T, k: T) -> Option<BoundState<T>> {
    (alpha < T::zero()).then(|| BoundState {
        lambda: k * k - alpha * alpha,
        kappa: -alpha,
    })
}

/// Bound state below the spectrum of the full operator: requires `alpha < 0`
/// and `|k| < |alpha|`, so that its eigenvalue `k^2 - alpha^2` is negative.
pub fn bound_state<T: Real>(alpha: T, k: T) -> Option<BoundState<T>> {
    robin_bound_state(alpha, k).filter(|b| b.lambda < T::zero())
}

/// Normalization constant of the Wentzell eigenfunctions.
pub fn wentzell_normalization<T: Real>() -> T {
    T::FRAC_PI_2()
}

/// Wentzell eigenfunction sampled on a grid, transverse phase factored out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WentzellMode<T: Real> {
    pub bulk: Vec<T>,
    pub boundary_value: T,
    pub xi: T,
    pub k: T,
    pub norm: T,
}

pub fn wentzell_mode<T: Real>(grid: &Grid1<T>, xi: T, k: T) -> Result<WentzellMode<T>> {
    check_positive("xi", xi)?;
    let a = wentzell_normalization::<T>();
    let family = Family::Wentzell { a };
    Ok(WentzellMode {
        bulk: grid
            .points()
            .into_iter()
            .map(|x| family.eval(x, xi))
            .collect(),
        boundary_value: family.boundary_value(xi).expect("wentzell"),
        xi,
        k,
        norm: T::one() / (a * (xi * xi + T::one())).sqrt(),
    })
}

/// Diagonalization of one realization at one transverse mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpectralResolution<T: Real> {
    pub bc: BoundaryCondition<T>,
    pub k: T,
    pub family: Family<T>,
    pub quadrature: Quadrature<T>,
    pub bound: Vec<BoundState<T>>,
}

pub fn resolve<T: Real>(
    bc: &BoundaryCondition<T>,
    k: T,
    quadrature: Quadrature<T>,
) -> Result<SpectralResolution<T>> {
    quadrature.validate()?;
    if !k.is_finite() {
        return Err(Error::Config("k must be finite".into()));
    }
    let (family, bound) = match bc {
        BoundaryCondition::Dirichlet => (Family::Sine, vec![]),
        BoundaryCondition::WentzellLaplace => (
            Family::Wentzell {
                a: wentzell_normalization(),
            },
            vec![],
        ),
        other => {
            let alpha = other.robin_parameter(k).expect("robin-type");
            if !alpha.is_finite() {
                return Err(Error::Config(format!(
                    "boundary symbol is not finite at k = {k}"
                )));
            }
            let family = if alpha == T::zero() {
                Family::Cosine
            } else {
                Family::Robin { alpha }
            };
            (family, robin_bound_state(alpha, k).into_iter().collect())
        }
    };
    Ok(SpectralResolution {
        bc: bc.clone(),
        k,
        family,
        quadrature,
        bound,
    })
}

impl<T: Real> SpectralResolution<T> {
    pub fn eigenvalue(&self, xi: T) -> T {
        xi * xi + self.k * self.k
    }

    pub fn nodes(&self) -> Vec<T> {
        self.quadrature.points()
    }

    pub fn weights(&self) -> Vec<T> {
        self.quadrature.weights(self.family.plancherel())
    }

    pub fn is_extended(&self) -> bool {
        matches!(self.family, Family::Wentzell { .. })
    }

    /// The same resolution with its bound states dropped (for ablations).
    pub fn without_bound_states(&self) -> Self {
        Self {
            bound: vec![],
            ..self.clone()
        }
    }

    pub fn with_quadrature(&self, quadrature: Quadrature<T>) -> Self {
        Self {
            quadrature,
            ..self.clone()
        }
    }

    pub fn basis(&self, grid: &Grid1<T>) -> Result<Basis<T>> {
        Basis::new(self, grid)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("resolution serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let res: Self = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        res.quadrature.validate()?;
        Ok(res)
    }
}

/// Expansion coefficients of a function in a [`Basis`].
#[derive(Debug, Clone, PartialEq)]
pub struct Coefficients<T: Real> {
    pub continuum: Vec<T>,
    pub bound: Vec<T>,
}

impl<T: Real> Coefficients<T> {
    pub fn zeros(nodes: usize, bound: usize) -> Self {
        Self {
            continuum: vec![T::zero(); nodes],
            bound: vec![T::zero(); bound],
        }
    }
}

/// A resolution sampled on a spatial grid `[0, x_max]`: analysis
/// (`f -> <phi_xi, f>`) by Gregory quadrature in `x`, synthesis by the
/// windowed midpoint rule in `xi`.
#[derive(Debug, Clone)]
pub struct Basis<T: Real> {
    pub grid: Grid1<T>,
    /// Squared frequencies `xi^2 + k^2` per continuum node.
    pub eigenvalues: Vec<T>,
    /// Synthesis weights per continuum node.
    pub weights: Vec<T>,
    /// Spatial quadrature weights.
    pub x_weights: Vec<T>,
    /// `phi(x_i; xi_j)` stored row-major by node.
    pub modes: Vec<T>,
    /// Boundary components of the extended eigenfunctions (Wentzell).
    pub boundary: Option<Vec<T>>,
    pub bound: Vec<(T, Vec<T>)>,
}

impl<T: Real> Basis<T> {
    pub fn new(res: &SpectralResolution<T>, grid: &Grid1<T>) -> Result<Self> {
        if grid.len < 8 || grid.start != T::zero() {
            return Err(Error::Shape(
                "basis grids start at the boundary and need at least 8 points".into(),
            ));
        }
        let xs = grid.points();
        let xis = res.nodes();
        let nx = xs.len();
        let family = res.family;
        let mut modes = vec![T::zero(); xis.len() * nx];
        modes
            .par_chunks_mut(nx)
            .zip(xis.par_iter())
            .for_each(|(row, xi)| {
                for (v, x) in row.iter_mut().zip(&xs) {
                    *v = family.eval(*x, *xi);
                }
            });
        let boundary = res.is_extended().then(|| {
            xis.iter()
                .map(|xi| family.boundary_value(*xi).unwrap())
                .collect()
        });
        Ok(Self {
            grid: *grid,
            eigenvalues: xis.iter().map(|xi| res.eigenvalue(*xi)).collect(),
            weights: res.weights(),
            x_weights: gregory_weights(nx, grid.step),
            modes,
            boundary,
            bound: res
                .bound
                .iter()
                .map(|b| (b.lambda, b.sample(grid)))
                .collect(),
        })
    }

    pub fn nodes(&self) -> usize {
        self.weights.len()
    }

    pub fn mode(&self, j: usize) -> &[T] {
        let nx = self.grid.len;
        &self.modes[j * nx..(j + 1) * nx]
    }

    pub fn is_extended(&self) -> bool {
        self.boundary.is_some()
    }

    /// Coefficients of `f`; for extended bases the boundary component is
    /// `v`, defaulting to the trace `f(0)`.
    pub fn analyze(&self, f: &[T], v: Option<T>) -> Result<Coefficients<T>> {
        self.check_len(f)?;
        let g: Vec<T> = f
            .iter()
            .zip(&self.x_weights)
            .map(|(f, w)| *f * *w)
            .collect();
        let mut continuum: Vec<T> = (0..self.nodes())
            .map(|j| self.mode(j).iter().zip(&g).map(|(p, g)| *p * *g).sum())
            .collect();
        if let Some(b) = &self.boundary {
            let v = v.unwrap_or(f[0]);
            for (c, b) in continuum.iter_mut().zip(b) {
                *c += *b * v;
            }
        }
        let bound = self
            .bound
            .iter()
            .map(|(_, e)| e.iter().zip(&g).map(|(e, g)| *e * *g).sum())
            .collect();
        Ok(Coefficients { continuum, bound })
    }

    /// Bulk function (and boundary value for extended bases) with the given
    /// coefficients.
    pub fn synthesize(&self, c: &Coefficients<T>) -> (Vec<T>, Option<T>) {
        let nx = self.grid.len;
        let mut out = vec![T::zero(); nx];
        for j in 0..self.nodes() {
            let a = self.weights[j] * c.continuum[j];
            if a == T::zero() {
                continue;
            }
            for (o, p) in out.iter_mut().zip(self.mode(j)) {
                *o += a * *p;
            }
        }
        for ((_, e), d) in self.bound.iter().zip(&c.bound) {
            for (o, e) in out.iter_mut().zip(e) {
                *o += *d * *e;
            }
        }
        let v = self.boundary.as_ref().map(|b| {
            b.iter()
                .zip(&self.weights)
                .zip(&c.continuum)
                .map(|((b, w), c)| *b * *w * *c)
                .sum()
        });
        (out, v)
    }

    /// `F(A) f` for a spectral function `F` of the eigenvalue.
    pub fn apply_fn(&self, f: &[T], func: impl Fn(T) -> T) -> Result<Vec<T>> {
        let mut c = self.analyze(f, None)?;
        for (c, l) in c.continuum.iter_mut().zip(&self.eigenvalues) {
            *c *= func(*l);
        }
        for (d, (l, _)) in c.bound.iter_mut().zip(&self.bound) {
            *d *= func(*l);
        }
        Ok(self.synthesize(&c).0)
    }

    /// Projection of `f` onto the span of the sampled resolution.
    pub fn project(&self, f: &[T]) -> Result<Vec<T>> {
        self.apply_fn(f, |_| T::one())
    }

    fn check_len(&self, f: &[T]) -> Result<()> {
        if f.len() != self.grid.len {
            return Err(Error::Shape(format!(
                "function has {} samples, grid has {}",
                f.len(),
                self.grid.len
            )));
        }
        Ok(())
    }
}

/// `||f - P f|| / ||f||` where `P` is the expansion in the resolution.
///
/// For extended resolutions `f` is lifted by its trace and the norm is taken
/// in the bulk-plus-boundary space.
pub fn completeness_residual<T: Real>(
    res: &SpectralResolution<T>,
    grid: &Grid1<T>,
    f: &[T],
) -> Result<T> {
    let basis = res.basis(grid)?;
    let c = basis.analyze(f, None)?;
    let (g, v) = basis.synthesize(&c);
    let diff: Vec<T> = f.iter().zip(&g).map(|(a, b)| *a - *b).collect();
    let mut num = weighted_norm(&basis.x_weights, &diff).powi(2);
    let mut den = weighted_norm(&basis.x_weights, f).powi(2);
    if let Some(v) = v {
        num += (f[0] - v).powi(2);
        den += f[0] * f[0];
    }
    if den == T::zero() {
        return Ok(T::zero());
    }
    Ok((num / den).sqrt())
}

/// Coefficients of a sine transform, with the boundary data needed for the
/// asymptotic tail of the inverse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SineCoefficients<T: Real> {
    pub xi: Vec<T>,
    pub values: Vec<T>,
    /// `f(0)`
    pub edge_value: T,
    /// `f''(0)`
    pub edge_curvature: T,
    pub warnings: Vec<Warning>,
}

/// Discrete sine transform pair on `[0, x_max]`:
/// `F(xi) = int f(x) sin(xi x) dx`, `f(x) = 2/pi int F(xi) sin(xi x) dxi`.
///
/// The inverse adds the analytic contribution of `xi > xi_max` from the
/// large-`xi` asymptotics `F ~ f(0)/xi - f''(0)/xi^3`.
#[derive(Debug, Clone)]
pub struct SineTransform<T: Real> {
    pub grid: Grid1<T>,
    pub quadrature: Quadrature<T>,
    basis: Basis<T>,
}

impl<T: Real> SineTransform<T> {
    pub fn new(grid: Grid1<T>, xi_max: T, nodes: usize) -> Result<Self> {
        let quadrature = Quadrature::new(xi_max, nodes, Window::Sharp)?;
        let res = resolve(&BoundaryCondition::Dirichlet, T::zero(), quadrature)?;
        Ok(Self {
            grid,
            quadrature,
            basis: res.basis(&grid)?,
        })
    }

    pub fn forward(&self, f: &[T]) -> Result<SineCoefficients<T>> {
        let c = self.basis.analyze(f, None)?;
        let mut warnings = Vec::new();
        truncation_check("sine transform input", f, &mut warnings);
        Ok(SineCoefficients {
            xi: self.quadrature.points(),
            values: c.continuum,
            edge_value: f[0],
            edge_curvature: edge_curvature(f, self.grid.step)?,
            warnings,
        })
    }

    pub fn inverse(&self, c: &SineCoefficients<T>) -> Result<Vec<T>> {
        if c.values.len() != self.quadrature.nodes {
            return Err(Error::Shape(format!(
                "{} coefficients for {} nodes",
                c.values.len(),
                self.quadrature.nodes
            )));
        }
        let coeffs = Coefficients {
            continuum: c.values.clone(),
            bound: vec![],
        };
        let (mut f, _) = self.basis.synthesize(&coeffs);
        let xi_max = self.quadrature.xi_max;
        let two_over_pi = lit::<T>(2.0) / T::PI();
        for (v, x) in f.iter_mut().zip(self.grid.points()) {
            let a = xi_max * x;
            let tail = c.edge_value * (T::FRAC_PI_2() - sine_integral(a))
                - c.edge_curvature * scaled_cubic_sine_tail(a) / (xi_max * xi_max);
            *v += two_over_pi * tail;
        }
        Ok(f)
    }
}

/// `f''(0)` by the fourth-order one-sided stencil.
fn edge_curvature<T: Real>(f: &[T], h: T) -> Result<T> {
    if f.len() < 6 {
        return Err(Error::Resolution("need at least 6 samples".into()));
    }
    let c = [45.0, -154.0, 214.0, -156.0, 61.0, -10.0];
    let s: T = c.iter().zip(f).map(|(c, v)| lit::<T>(*c) * *v).sum();
    Ok(s / (lit::<T>(12.0) * h * h))
}

/// `d_x phi(0; xi) - alpha phi(0; xi)` from the closed-form derivative.
pub fn robin_boundary_residual<T: Real>(xi: T, alpha: T) -> T {
    // phi'(0) = alpha xi / r, phi(0) = xi / r
    let r = (xi * xi + alpha * alpha).sqrt();
    (alpha * xi / r - alpha * (xi / r)).abs()
}

/// Largest `|<e_j, phi(.; xi)>|` over the continuum nodes, a quadrature-scale
/// orthogonality check of the bound states against the continuum.
pub fn bound_orthogonality<T: Real>(res: &SpectralResolution<T>, grid: &Grid1<T>) -> Result<T> {
    let basis = res.basis(grid)?;
    let mut worst = T::zero();
    for (_, e) in &basis.bound {
        let c = basis.analyze(e, None)?;
        worst = c.continuum.iter().fold(worst, |m, v| m.max(v.abs()));
    }
    Ok(worst)
}

/// Trace of a sampled Wentzell bulk function against its boundary value and
/// the dynamical condition `phi'(0) = -xi^2 phi(0)` of a harmonic mode.
pub fn wentzell_mode_residuals<T: Real>(mode: &WentzellMode<T>, step: T) -> Result<(T, T)> {
    let compat = (mode.bulk[0] - mode.boundary_value).abs();
    let d = left_derivative4(&mode.bulk, step)?;
    let dyn_res = (d + mode.xi * mode.xi * mode.boundary_value).abs();
    Ok((compat, dyn_res))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::max_abs;

    #[test]
    fn robin_mode_examples() {
        for xi in [0.3_f64, 1.0, 5.0] {
            assert!((robin_continuum_mode(1.3, xi, 0.0).unwrap() - (xi * 1.3).cos()).abs() < 1e-15);
            for alpha in [-2.0, 0.5] {
                let v = robin_continuum_mode(0.0, xi, alpha).unwrap();
                assert!((v - xi / (xi * xi + alpha * alpha).sqrt()).abs() < 1e-15);
                assert!(robin_boundary_residual(xi, alpha) <= 1e-10);
            }
        }
        let v = robin_continuum_mode(std::f64::consts::FRAC_PI_2, 1.0, -1.0).unwrap();
        assert!((v + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15);
        assert!(matches!(
            robin_continuum_mode(1.0, 0.0, 0.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn bound_state_examples() {
        let b = bound_state(-1.0, 0.0).unwrap();
        assert_eq!(b.lambda, -1.0);
        assert!((b.eval(0.0) - 2f64.sqrt()).abs() < 1e-15);
        assert!(bound_state(0.5, 0.3).is_none());
        assert!(bound_state(0.5, 0.0).is_none());
        assert_eq!(bound_state(-2.0, 1.0).unwrap().lambda, -3.0);
        // threshold |k| = |alpha| is excluded
        assert!(bound_state(-1.0, 1.0).is_none());
        assert!(robin_bound_state(-1.0, 1.0).is_some());
        let g = Grid1::<f64>::linspace(0.0, 40.0, 4001);
        let e = b.sample(&g);
        let n = weighted_norm(&g.gregory_weights(), &e);
        assert!((n - 1.0).abs() < 1e-6);
    }

    #[test]
    fn resolve_dispatch() {
        let q = Quadrature::default();
        let d = resolve(&BoundaryCondition::<f64>::Dirichlet, 0.0, q).unwrap();
        assert_eq!(d.family, Family::Sine);
        assert!(d.bound.is_empty());
        let r = resolve(&BoundaryCondition::robin(-1.0), 0.0, q).unwrap();
        assert_eq!(r.bound.len(), 1);
        assert_eq!(r.bound[0].lambda, -1.0);
        let r0 = resolve(&BoundaryCondition::robin(0.0), 0.0, q).unwrap();
        let n = resolve(&BoundaryCondition::Neumann, 0.0, q).unwrap();
        assert_eq!(r0.family, n.family);
        let g = Grid1::<f64>::linspace(0.0, 5.0, 64);
        let (a, b) = (r0.basis(&g).unwrap(), n.basis(&g).unwrap());
        assert!(a
            .modes
            .iter()
            .zip(&b.modes)
            .all(|(x, y)| (x - y).abs() <= 1e-12));
        let w = resolve(&BoundaryCondition::<f64>::WentzellLaplace, 1.0, q).unwrap();
        assert!(w.is_extended());
        assert!(resolve(
            &BoundaryCondition::<f64>::Dirichlet,
            0.0,
            Quadrature::new(40.0, 64, Window::Sharp).unwrap()
        )
        .is_ok());
        let bad = Quadrature { nodes: 10, ..q };
        assert!(matches!(
            resolve(&BoundaryCondition::<f64>::Dirichlet, 0.0, bad),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn resolution_json_round_trip() {
        let r = resolve(&BoundaryCondition::robin(-0.5), 0.25, Quadrature::default()).unwrap();
        let back = SpectralResolution::<f64>::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn sine_transform_zero_and_roundtrip() {
        let g = Grid1::<f64>::linspace(0.0, 30.0, 3001);
        let st = SineTransform::new(g, 40.0, 4000).unwrap();
        let zero = st.forward(&vec![0.0; g.len]).unwrap();
        assert!(zero.values.iter().all(|v| *v == 0.0));
        let f: Vec<f64> = g.points().iter().map(|x| x * (-x).exp()).collect();
        let c = st.forward(&f).unwrap();
        assert!(c.warnings.is_empty());
        let back = st.inverse(&c).unwrap();
        let err = f
            .iter()
            .zip(&back)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(err <= 1e-4, "roundtrip error {err}");
    }

    #[test]
    fn sine_transform_peak_location() {
        let g = Grid1::<f64>::linspace(0.0, 60.0, 3001);
        let st = SineTransform::new(g, 20.0, 1000).unwrap();
        let xi0 = 7.3;
        let f: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (xi0 * x).sin() * (-(x - 25.0).powi(2) / 50.0).exp())
            .collect();
        let c = st.forward(&f).unwrap();
        let (j, _) = c.values.iter().enumerate().fold((0, 0.0), |b, (j, v)| {
            if v.abs() > b.1 {
                (j, v.abs())
            } else {
                b
            }
        });
        assert!((c.xi[j] - xi0).abs() <= st.quadrature.step(), "{}", c.xi[j]);
    }

    #[test]
    fn sine_transform_warns_on_truncation() {
        let g = Grid1::<f64>::linspace(0.0, 3.0, 301);
        let st = SineTransform::new(g, 10.0, 200).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| (-x).exp()).collect();
        assert_eq!(st.forward(&f).unwrap().warnings.len(), 1);
    }

    #[test]
    fn completeness_with_and_without_bound_state() {
        let g = Grid1::<f64>::linspace(0.0, 30.0, 3001);
        let bump: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-(x - 2.0).powi(2) * 2.0).exp())
            .collect();
        let q = Quadrature::default();
        let d = resolve(&BoundaryCondition::Dirichlet, 0.0, q).unwrap();
        assert!(completeness_residual(&d, &g, &bump).unwrap() <= 1e-3);
        let r = resolve(&BoundaryCondition::robin(-1.0), 0.0, q).unwrap();
        let with = completeness_residual(&r, &g, &bump).unwrap();
        let without = completeness_residual(&r.without_bound_states(), &g, &bump).unwrap();
        assert!(with <= 1e-3, "{with}");
        assert!(without >= 1e-2, "{without}");
        let e = r.bound[0].sample(&g);
        let pe = completeness_residual(&r, &g, &e).unwrap();
        assert!(pe <= 1e-5, "{pe}");
        assert!(bound_orthogonality(&r, &g).unwrap() <= 1e-5);
    }

    #[test]
    fn wentzell_modes() {
        let g = Grid1::<f64>::linspace(0.0, 2.0, 2001);
        for (xi, k) in [(0.7, 0.0), (2.5, 1.0)] {
            let m = wentzell_mode(&g, xi, k).unwrap();
            let (compat, dyn_res) = wentzell_mode_residuals(&m, g.step).unwrap();
            assert_eq!(compat, 0.0);
            assert!(dyn_res <= 1e-6, "{dyn_res}");
            let d2 = crate::grid::second_derivative4(&m.bulk, g.step).unwrap();
            let r: Vec<f64> = m
                .bulk
                .iter()
                .zip(&d2)
                .map(|(u, d)| -d + k * k * u - (xi * xi + k * k) * u)
                .collect();
            assert!(max_abs(&r) <= 1e-6, "{}", max_abs(&r));
        }
        assert!(wentzell_mode(&g, 0.0, 0.0).is_err());
    }

    #[test]
    fn wentzell_completeness_in_extended_space() {
        let g = Grid1::<f64>::linspace(0.0, 30.0, 3001);
        let res = resolve(
            &BoundaryCondition::WentzellLaplace,
            0.5,
            Quadrature::default(),
        )
        .unwrap();
        // a function with a nonzero trace, lifted by it
        let f: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-(x - 0.5).powi(2)).exp())
            .collect();
        let r = completeness_residual(&res, &g, &f).unwrap();
        assert!(r <= 1e-3, "{r}");
    }

    #[test]
    fn operator_is_multiplication() {
        // A sin-packet: -f'' + k^2 f computed through the resolution
        let g = Grid1::<f64>::linspace(0.0, 30.0, 3001);
        let k = 0.5;
        let q = Quadrature::default().with_window(Window::Sharp);
        let res = resolve(&BoundaryCondition::Dirichlet, k, q).unwrap();
        let b = res.basis(&g).unwrap();
        let f: Vec<f64> = g.points().iter().map(|x| x.powi(3) * (-x).exp()).collect();
        let af = b.apply_fn(&f, |l| l).unwrap();
        let exact: Vec<f64> = g
            .points()
            .iter()
            .map(|x| (-(6.0 * x - 6.0 * x * x + x.powi(3)) + k * k * x.powi(3)) * (-x).exp())
            .collect();
        let err: Vec<f64> = af.iter().zip(&exact).map(|(a, e)| a - e).collect();
        let w = g.gregory_weights();
        let rel = weighted_norm(&w, &err) / weighted_norm(&w, &exact);
        assert!(rel <= 1e-3, "{rel}");
    }
}

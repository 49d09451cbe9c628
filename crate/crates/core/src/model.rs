//! Half-space geometry, boundary-condition descriptors, warped profiles and
//! the conformal reduction of the physical wave operator to `d_t^2 + A`.
//!
//! Transverse directions are handled one Fourier mode at a time: for a fixed
//! transverse wavenumber `k` the spatial operator is `-d_x^2 + k^2` on the
//! half-line `x >= 0`.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{derivative2, second_difference2, Grid1};
use crate::scalar::{idx, lit, to_f64, Real};

/// `R_+ x R^n` with one transverse mode `k` selected, truncated at `x_max`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "", deny_unknown_fields)]
pub struct HalfSpaceModel<T: Real> {
    pub n: usize,
    pub k: T,
    pub x_max: T,
    pub grid: usize,
}

impl<T: Real> HalfSpaceModel<T> {
    pub fn new(n: usize, k: T, x_max: T, grid: usize) -> Result<Self> {
        let model = Self { n, k, x_max, grid };
        model.validate()?;
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 && self.k != T::zero() {
            return Err(Error::Model(format!(
                "n = 0 has no transverse directions, but k = {}",
                self.k
            )));
        }
        if !self.k.is_finite() {
            return Err(Error::Model("k must be finite".into()));
        }
        if !(self.x_max > T::zero()) || !self.x_max.is_finite() {
            return Err(Error::Model(format!(
                "x_max must be positive, got {}",
                self.x_max
            )));
        }
        if self.grid < 16 {
            return Err(Error::Model(format!(
                "grid must be >= 16, got {}",
                self.grid
            )));
        }
        Ok(())
    }

    /// `x_max / (grid - 1)`
    pub fn dx(&self) -> T {
        self.x_max / idx::<T>(self.grid - 1)
    }

    pub fn x_grid(&self) -> Grid1<T> {
        Grid1::linspace(T::zero(), self.x_max, self.grid)
    }
}

/// Real polynomial symbol `p(k) = sum_i c_i k^i` of a boundary operator that
/// acts as a Fourier multiplier in the transverse directions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Symbol<T: Real> {
    pub coeffs: Vec<T>,
}

impl<T: Real> Symbol<T> {
    pub fn new(coeffs: Vec<T>) -> Self {
        Self { coeffs }
    }

    /// Symbol of the transverse Laplacian, `p(k) = k^2`.
    pub fn laplacian() -> Self {
        Self::new(vec![T::zero(), T::zero(), T::one()])
    }

    pub fn eval(&self, k: T) -> T {
        self.coeffs
            .iter()
            .rev()
            .fold(T::zero(), |acc, c| acc * k + *c)
    }
}

/// The boundary operator selecting a self-adjoint realization.
///
/// All Robin-type conditions read `d_x u(0) = alpha u(0)` with the inward
/// derivative.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum BoundaryCondition<T: Real> {
    Dirichlet,
    Neumann,
    Robin { alpha: T },
    Multiplier { symbol: Symbol<T> },
    WentzellLaplace,
}

impl<T: Real> BoundaryCondition<T> {
    pub fn robin(alpha: T) -> Self {
        Self::Robin { alpha }
    }

    /// Effective Robin parameter at mode `k`; `None` for Dirichlet and for
    /// the dynamical Wentzell condition.
    pub fn robin_parameter(&self, k: T) -> Option<T> {
        match self {
            Self::Neumann => Some(T::zero()),
            Self::Robin { alpha } => Some(*alpha),
            Self::Multiplier { symbol } => Some(symbol.eval(k)),
            Self::Dirichlet | Self::WentzellLaplace => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Self::Dirichlet => "dirichlet",
            Self::Neumann => "neumann",
            Self::Robin { .. } => "robin",
            Self::Multiplier { .. } => "multiplier",
            Self::WentzellLaplace => "wentzell_laplace",
        }
    }
}

/// Boundary condition of a single transverse mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum ModeCondition<T: Real> {
    Dirichlet,
    Robin {
        alpha: T,
    },
    /// `d_x u(0) = (d_t^2 + theta) u(0)`
    Wentzell {
        theta: T,
    },
}

/// The 1-D problem `-d_x^2 + k^2` with a resolved boundary condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ModeProblem<T: Real> {
    pub k: T,
    pub condition: ModeCondition<T>,
}

impl<T: Real> ModeProblem<T> {
    /// The constant `k^2` added to `-d_x^2`.
    pub fn shift(&self) -> T {
        self.k * self.k
    }
}

pub fn mode_problem<T: Real>(bc: &BoundaryCondition<T>, k: T) -> ModeProblem<T> {
    let condition = match bc {
        BoundaryCondition::Dirichlet => ModeCondition::Dirichlet,
        BoundaryCondition::WentzellLaplace => ModeCondition::Wentzell {
            theta: Symbol::<T>::laplacian().eval(k),
        },
        other => ModeCondition::Robin {
            alpha: other.robin_parameter(k).expect("robin-type condition"),
        },
    };
    ModeProblem { k, condition }
}

/// Warping factor `beta` of the static metric `-beta dt^2 + g`, sampled on a
/// uniform grid, for a spatial manifold of dimension `m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WarpedProfile<T: Real> {
    pub grid: Grid1<T>,
    pub beta: Vec<T>,
    pub m: usize,
}

impl<T: Real> WarpedProfile<T> {
    pub fn new(grid: Grid1<T>, beta: Vec<T>, m: usize) -> Result<Self> {
        if beta.len() != grid.len {
            return Err(Error::Shape(format!(
                "profile has {} samples for a grid of {}",
                beta.len(),
                grid.len
            )));
        }
        if m == 0 {
            return Err(Error::Model("spatial dimension m must be >= 1".into()));
        }
        Ok(Self { grid, beta, m })
    }

    pub fn from_fn(grid: Grid1<T>, m: usize, beta: impl Fn(T) -> T) -> Result<Self> {
        let samples = grid.points().into_iter().map(beta).collect();
        Self::new(grid, samples, m)
    }

    pub fn constant(grid: Grid1<T>, m: usize, value: T) -> Result<Self> {
        Self::new(grid, vec![value; grid.len], m)
    }

    /// Reads a two-column `x, beta` CSV. A non-numeric first line is taken as
    /// a header; `#` starts a comment. Samples must be uniformly spaced.
    pub fn from_csv<R: Read>(mut reader: R, m: usize) -> Result<Self> {
        let mut text = String::new();
        reader.read_to_string(&mut text)?;
        let mut xs = Vec::new();
        let mut betas = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split(',').map(str::trim).collect();
            if cols.len() != 2 {
                return Err(Error::Parse(format!(
                    "line {}: expected 2 columns, found {}",
                    lineno + 1,
                    cols.len()
                )));
            }
            match (cols[0].parse::<f64>(), cols[1].parse::<f64>()) {
                (Ok(x), Ok(b)) => {
                    xs.push(lit::<T>(x));
                    betas.push(lit::<T>(b));
                }
                _ if xs.is_empty() && lineno == 0 => continue,
                _ => {
                    return Err(Error::Parse(format!(
                        "line {}: non-numeric sample `{line}`",
                        lineno + 1
                    )))
                }
            }
        }
        if xs.len() < 2 {
            return Err(Error::Parse("profile needs at least two samples".into()));
        }
        let grid = Grid1::linspace(xs[0], xs[xs.len() - 1], xs.len());
        let tol = lit::<T>(1e-9) * (grid.step.abs() + T::one());
        for (i, x) in xs.iter().enumerate() {
            if (*x - grid.point(i)).abs() > tol {
                return Err(Error::Parse(format!(
                    "sample {i} at x = {x} breaks uniform spacing"
                )));
            }
        }
        Self::new(grid, betas, m)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some((i, b)) = self
            .beta
            .iter()
            .enumerate()
            .find(|(_, b)| !(**b > T::zero()) || !b.is_finite())
        {
            return Err(Error::Domain(format!(
                "warping factor must be positive, beta[{i}] = {b}"
            )));
        }
        Ok(())
    }

    fn exponents(&self) -> (T, T) {
        let m = idx::<T>(self.m);
        let four = lit::<T>(4.0);
        ((T::one() - m) / four, (lit::<T>(3.0) + m) / four)
    }
}

/// Pointwise multipliers wrapping the reduced Green operators:
/// physical = `pre . reduced . post`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConformalFactors<T: Real> {
    pub pre: Vec<T>,
    pub post: Vec<T>,
}

/// `pre = beta^((1-m)/4)`, `post = beta^((3+m)/4)`.
pub fn conformal_factors<T: Real>(profile: &WarpedProfile<T>) -> Result<ConformalFactors<T>> {
    profile.validate()?;
    let (a, b) = profile.exponents();
    Ok(ConformalFactors {
        pre: profile.beta.iter().map(|v| v.powf(a)).collect(),
        post: profile.beta.iter().map(|v| v.powf(b)).collect(),
    })
}

/// Zeroth-order coefficient `C = A - Delta` of the reduced operator.
///
/// With `Delta f = -beta^(m/2) (beta^(1 - m/2) f')'` the Laplacian of the
/// rescaled metric `beta^-1 g` for a profile depending on the normal
/// coordinate only,
///
/// `C = (1-m)/2 beta^(-1/2) Delta(beta^(1/2)) - (1-m)(m-3)/4 (beta')^2`.
///
/// Second-order centered differences, one-sided at the ends.
pub fn assemble_a_potential<T: Real>(profile: &WarpedProfile<T>) -> Result<Vec<T>> {
    profile.validate()?;
    if profile.beta.len() < 5 {
        return Err(Error::Resolution(format!(
            "potential assembly needs at least 5 samples, got {}",
            profile.beta.len()
        )));
    }
    let h = profile.grid.step;
    let m = idx::<T>(profile.m);
    let half = lit::<T>(0.5);
    let beta = &profile.beta;
    let root: Vec<T> = beta.iter().map(|b| b.sqrt()).collect();
    let d_root = derivative2(&root, h)?;
    let dd_root = second_difference2(&root, h)?;
    // (p f')' = p f'' + p' f' with p = beta^(1 - m/2), f = beta^(1/2)
    let p: Vec<T> = beta.iter().map(|b| b.powf(T::one() - half * m)).collect();
    let d_p = derivative2(&p, h)?;
    let d_beta = derivative2(beta, h)?;
    let c1 = (T::one() - m) * half;
    let c2 = (T::one() - m) * (m - lit(3.0)) / lit(4.0);
    Ok((0..beta.len())
        .map(|i| {
            let d_flux = p[i] * dd_root[i] + d_p[i] * d_root[i];
            let lap = -beta[i].powf(half * m) * d_flux;
            c1 * lap / root[i] - c2 * d_beta[i] * d_beta[i]
        })
        .collect())
}

/// `max |C|`, clamped at zero, as used by the energy functional.
pub fn potential_sup<T: Real>(c: &[T]) -> T {
    c.iter().fold(T::zero(), |m, v| m.max(v.abs()))
}

pub(crate) fn check_positive<T: Real>(what: &str, v: T) -> Result<()> {
    if v > T::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "{what} must be positive, got {}",
            to_f64(v)
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_invariants() {
        assert!(HalfSpaceModel::new(0, 0.0, 10.0, 16).is_ok());
        assert!(HalfSpaceModel::new(0, 1.0, 10.0, 16).is_err());
        assert!(HalfSpaceModel::new(2, 1.0, 0.0, 16).is_err());
        assert!(HalfSpaceModel::new(1, 1.0, 10.0, 15).is_err());
        let m = HalfSpaceModel::new(1, 0.5, 10.0, 11).err();
        assert!(m.is_some());
        let m = HalfSpaceModel::new(1, 0.5, 15.0, 16).unwrap();
        assert_eq!(m.dx(), 1.0);
    }

    #[test]
    fn conformal_identity_and_unit_dimension() {
        let g = Grid1::<f64>::linspace(0.0, 1.0, 8);
        let f = conformal_factors(&WarpedProfile::constant(g, 3, 1.0).unwrap()).unwrap();
        assert!(f.pre.iter().chain(&f.post).all(|v| *v == 1.0));
        let f = conformal_factors(&WarpedProfile::constant(g, 1, 4.0).unwrap()).unwrap();
        assert!(f.pre.iter().all(|v| *v == 1.0));
        assert!(f.post.iter().all(|v| *v == 4.0));
    }

    #[test]
    fn conformal_exponential_profile() {
        let g = Grid1::<f64>::linspace(0.0, 2.0, 3);
        let p = WarpedProfile::from_fn(g, 3, f64::exp).unwrap();
        let f = conformal_factors(&p).unwrap();
        for (i, x) in g.points().into_iter().enumerate() {
            assert!((f.pre[i] - (-x / 2.0).exp()).abs() < 1e-14);
            assert!((f.post[i] - (1.5 * x).exp()).abs() < 1e-12 * (1.5 * x).exp());
        }
    }

    #[test]
    fn conformal_rejects_nonpositive() {
        let g = Grid1::<f64>::linspace(0.0, 1.0, 4);
        let p = WarpedProfile::new(g, vec![1.0, 0.5, 0.0, 2.0], 2).unwrap();
        assert!(matches!(conformal_factors(&p), Err(Error::Domain(_))));
    }

    #[test]
    fn constant_beta_has_no_potential() {
        let g = Grid1::<f64>::linspace(0.0, 1.0, 21);
        for (m, b) in [(1usize, 1.0), (3, 1.0), (5, 7.0), (2, 0.1)] {
            let c = assemble_a_potential(&WarpedProfile::constant(g, m, b).unwrap()).unwrap();
            assert!(
                c.iter().all(|v| v.abs() < 1e-12),
                "m = {m}, beta = {b}: {c:?}"
            );
        }
        let short = WarpedProfile::constant(Grid1::<f64>::linspace(0.0, 1.0, 4), 3, 1.0).unwrap();
        assert!(matches!(
            assemble_a_potential(&short),
            Err(Error::Resolution(_))
        ));
    }

    #[test]
    fn mode_problem_reductions() {
        let p = mode_problem(&BoundaryCondition::<f64>::Dirichlet, 0.0);
        assert_eq!(p.condition, ModeCondition::Dirichlet);
        assert_eq!(p.shift(), 0.0);
        let p = mode_problem(&BoundaryCondition::robin(-1.0), 2.0);
        assert_eq!(p.shift(), 4.0);
        assert_eq!(p.condition, ModeCondition::Robin { alpha: -1.0 });
        let sym = Symbol::new(vec![0.5, 0.0, 1.0]);
        let p = mode_problem(&BoundaryCondition::Multiplier { symbol: sym }, 3.0);
        assert_eq!(p.condition, ModeCondition::Robin { alpha: 9.5 });
        for k in [0.0, 0.7, 3.0] {
            assert_eq!(
                mode_problem(&BoundaryCondition::robin(0.0), k),
                mode_problem(&BoundaryCondition::Neumann, k)
            );
        }
    }

    #[test]
    fn profile_csv() {
        let csv = "x,beta\n0.0,1.0\n0.5,1.5\n1.0,2.0 # end\n";
        let p = WarpedProfile::<f64>::from_csv(csv.as_bytes(), 2).unwrap();
        assert_eq!(p.beta, vec![1.0, 1.5, 2.0]);
        assert_eq!(p.grid.step, 0.5);
        let bad = "0.0,1.0\n0.4,1.0\n1.0,1.0\n";
        assert!(WarpedProfile::<f64>::from_csv(bad.as_bytes(), 2).is_err());
        let bad = "0.0,1.0\nfoo,1.0\n";
        assert!(matches!(
            WarpedProfile::<f64>::from_csv(bad.as_bytes(), 2),
            Err(Error::Parse(_))
        ));
    }
}

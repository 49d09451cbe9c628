//! Boundary-triple algebra on the half-line.
//!
//! The triple is `(C, gamma0, gamma1)` per transverse mode with
//! `gamma0 u = u(0)` and `gamma1 u = d_x u(0)` (inward derivative). A
//! self-adjoint boundary operator `Theta` selects the extension with domain
//! `gamma1 u = Theta gamma0 u`.

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, Warning};
use crate::grid::{gregory_weights, left_derivative4, max_abs, second_derivative4, weighted_dot};
use crate::model::{BoundaryCondition, ModeProblem};
use crate::scalar::{lit, to_f64, Real};

/// Boundary values of a function: `(gamma0 u, gamma1 u)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct BoundaryTraces<T: Real> {
    pub value: T,
    pub derivative: T,
}

/// Trace evaluators for functions sampled on a uniform grid starting at the
/// boundary. The derivative uses a fourth-order one-sided stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceMaps<T: Real> {
    pub step: T,
}

impl<T: Real> TraceMaps<T> {
    pub fn new(step: T) -> Self {
        Self { step }
    }

    pub fn gamma0(&self, u: &[T]) -> T {
        u[0]
    }

    pub fn gamma1(&self, u: &[T]) -> Result<T> {
        left_derivative4(u, self.step)
    }

    pub fn traces(&self, u: &[T]) -> Result<BoundaryTraces<T>> {
        Ok(BoundaryTraces {
            value: self.gamma0(u),
            derivative: self.gamma1(u)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GreenResidual<T: Real> {
    pub residual: T,
    /// `(A f | f2) - (f | A f2)`
    pub bulk: T,
    /// `(gamma1 f | gamma0 f2) - (gamma0 f | gamma1 f2)`
    pub boundary: T,
    pub warnings: Vec<Warning>,
}

/// Residual of the abstract Green identity
/// `(A f|f2) - (f|A f2) = (gamma1 f|gamma0 f2) - (gamma0 f|gamma1 f2)`
/// for `A = -d_x^2 + k^2`, by fourth-order differences and quadrature.
pub fn greens_identity_residual<T: Real>(
    f: &[T],
    f2: &[T],
    step: T,
    mode: &ModeProblem<T>,
) -> Result<GreenResidual<T>> {
    if f.len() != f2.len() {
        return Err(Error::Shape(format!("{} vs {} samples", f.len(), f2.len())));
    }
    let apply = |u: &[T]| -> Result<Vec<T>> {
        let d2 = second_derivative4(u, step)?;
        Ok(u.iter()
            .zip(d2)
            .map(|(u, d)| mode.shift() * *u - d)
            .collect())
    };
    let w = gregory_weights(f.len(), step);
    let bulk = weighted_dot(&w, &apply(f)?, f2) - weighted_dot(&w, f, &apply(f2)?);
    let maps = TraceMaps::new(step);
    let (a, b) = (maps.traces(f)?, maps.traces(f2)?);
    let boundary = a.derivative * b.value - a.value * b.derivative;
    let mut warnings = Vec::new();
    truncation_check("f", f, &mut warnings);
    if f2 != f {
        truncation_check("f2", f2, &mut warnings);
    }
    Ok(GreenResidual {
        residual: (bulk - boundary).abs(),
        bulk,
        boundary,
        warnings,
    })
}

/// Flags functions whose far-end samples are not negligible.
pub(crate) fn truncation_check<T: Real>(what: &str, u: &[T], warnings: &mut Vec<Warning>) {
    let scale = max_abs(u);
    if let Some(last) = u.last() {
        if scale > T::zero() && last.abs() > lit::<T>(1e-8) * scale {
            warnings.push(Warning::Truncation {
                what: what.to_string(),
                edge_value: to_f64(*last),
            });
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Membership<T: Real> {
    pub residual: T,
    pub member: bool,
}

/// Checks `gamma1 u = Theta gamma0 u` (`gamma0 u = 0` for Dirichlet).
///
/// The Wentzell condition is dynamical and has no static domain; use
/// [`extended_membership`] for it.
pub fn extension_membership<T: Real>(
    traces: BoundaryTraces<T>,
    bc: &BoundaryCondition<T>,
    k: T,
    tol: T,
) -> Result<Membership<T>> {
    let residual = match bc {
        BoundaryCondition::Dirichlet => traces.value.abs(),
        BoundaryCondition::WentzellLaplace => {
            return Err(Error::Config(
                "the Wentzell condition is dynamical; check the extended state instead".into(),
            ))
        }
        other => {
            let alpha = other.robin_parameter(k).expect("robin-type");
            (traces.derivative - alpha * traces.value).abs()
        }
    };
    Ok(Membership {
        residual,
        member: residual <= tol,
    })
}

/// `|gamma0 u - v|` for a bulk/boundary pair.
pub fn extended_membership<T: Real>(u: &[T], v: T, tol: T) -> Membership<T> {
    let residual = (u[0] - v).abs();
    Membership {
        residual,
        member: residual <= tol,
    }
}

/// Decay rate `mu` of the deficiency element `exp(-mu x)` spanning
/// `ker(A* - lambda)` on the half-line: `mu^2 = -lambda`, `Re mu > 0`.
pub fn deficiency_decay<T: Real>(lambda: Complex<T>) -> Result<Complex<T>> {
    if lambda.im == T::zero() && lambda.re >= T::zero() {
        return Err(Error::Branch {
            lambda: to_f64(lambda.re),
        });
    }
    Ok((-lambda).sqrt())
}

/// Cayley transform `C(-theta) = (-theta - i) / (-theta + i)`.
pub fn cayley_unitary<T: Real>(theta: T) -> Complex<T> {
    let i = Complex::new(T::zero(), T::one());
    let z = Complex::new(-theta, T::zero());
    (z - i) / (z + i)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct WeylValue<T: Real> {
    pub lambda: T,
    pub k: T,
    pub value: T,
}

/// Weyl function of the half-line triple, `M(lambda)(k) = -sqrt(k^2 - lambda)`,
/// defined below the Dirichlet spectrum (`lambda < 0`).
pub fn weyl_function<T: Real>(lambda: T, k: T) -> Result<WeylValue<T>> {
    if !(lambda < T::zero()) {
        return Err(Error::OutOfResolvent {
            lambda: to_f64(lambda),
        });
    }
    Ok(WeylValue {
        lambda,
        k,
        value: -(k * k - lambda).sqrt(),
    })
}

/// Transverse wavenumbers over which the boundary operator is tested.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", bound = "")]
pub enum KRange<T: Real> {
    /// A single mode (use `k = 0` for `n = 0`).
    Single {
        k: T,
    },
    Interval {
        lo: T,
        hi: T,
    },
    /// All of `R` (any `n >= 1`).
    Line,
    /// A user-supplied sample grid, treated as a continuum by interval
    /// arithmetic on the sampled extrema.
    Samples {
        ks: Vec<T>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    InSpectrum,
    NotInSpectrum,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::InSpectrum => "IN_SPECTRUM",
            Self::NotInSpectrum => "NOT_IN_SPECTRUM",
        }
    }
}

/// Outcome of the spectral test at one `lambda`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct SpectrumTest<T: Real> {
    pub lambda: T,
    pub verdict: Verdict,
    /// Mode at which `|Theta(k) - M(lambda)(k)|` is smallest.
    pub k: T,
    /// `Theta(k) - M(lambda)(k)` at that mode (`+inf` for Dirichlet).
    pub gap: T,
}

/// Membership tolerance of the spectral test.
pub const SPECTRUM_TOL: f64 = 1e-9;

/// `lambda < 0` is in the spectrum of the extension iff `0` lies in the
/// closure of `{Theta(k) - M(lambda)(k) : k in range}`.
///
/// The Wentzell condition is tested through `Theta - lambda`, the
/// spectral-dependent boundary operator of the extended realization.
pub fn spectrum_test<T: Real>(
    lambda: T,
    bc: &BoundaryCondition<T>,
    range: &KRange<T>,
) -> Result<SpectrumTest<T>> {
    if !(lambda < T::zero()) {
        return Err(Error::OutOfResolvent {
            lambda: to_f64(lambda),
        });
    }
    let tol = lit::<T>(SPECTRUM_TOL);
    let gap_at = |k: T| -> T {
        let theta = match bc {
            BoundaryCondition::WentzellLaplace => k * k - lambda,
            other => other.robin_parameter(k).expect("robin-type"),
        };
        theta + (k * k - lambda).sqrt()
    };
    if matches!(bc, BoundaryCondition::Dirichlet) {
        return Ok(SpectrumTest {
            lambda,
            verdict: Verdict::NotInSpectrum,
            k: T::zero(),
            gap: T::infinity(),
        });
    }
    let monotone = !matches!(bc, BoundaryCondition::Multiplier { .. });
    // (k at min, min, max) of the gap over the range
    let (k_min, lo, hi) = match range {
        KRange::Single { k } => (*k, gap_at(*k), gap_at(*k)),
        KRange::Interval { lo, hi } if monotone => {
            // gap increases with |k| for constant and Wentzell symbols
            let (a, b) = (lo.min(*hi), lo.max(*hi));
            let k_small = if a <= T::zero() && b >= T::zero() {
                T::zero()
            } else if a > T::zero() {
                a
            } else {
                b
            };
            let k_big = if a.abs() > b.abs() { a } else { b };
            (k_small, gap_at(k_small), gap_at(k_big))
        }
        KRange::Line if monotone => (T::zero(), gap_at(T::zero()), T::infinity()),
        KRange::Line => {
            return Err(Error::Config(
                "multiplier symbols need a finite k-grid (KRange::Samples)".into(),
            ))
        }
        KRange::Interval { lo, hi } => {
            let ks = crate::grid::Grid1::linspace(*lo, *hi, 2001).points();
            extrema(&ks, gap_at)
        }
        KRange::Samples { ks } => {
            if ks.is_empty() {
                return Err(Error::Config("empty k-grid".into()));
            }
            extrema(ks, gap_at)
        }
    };
    let verdict = if lo <= tol && hi >= -tol {
        Verdict::InSpectrum
    } else {
        Verdict::NotInSpectrum
    };
    let gap = if lo <= T::zero() && hi >= T::zero() {
        T::zero()
    } else if lo > T::zero() {
        lo
    } else {
        hi
    };
    Ok(SpectrumTest {
        lambda,
        verdict,
        k: k_min,
        gap,
    })
}

fn extrema<T: Real>(ks: &[T], g: impl Fn(T) -> T) -> (T, T, T) {
    let mut best = (ks[0], g(ks[0]));
    let (mut lo, mut hi) = (best.1, best.1);
    for k in ks {
        let v = g(*k);
        if v.abs() < best.1.abs() {
            best = (*k, v);
        }
        lo = lo.min(v);
        hi = hi.max(v);
    }
    (best.0, lo, hi)
}

/// One row of a spectrum scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ScanRow<T: Real> {
    pub lambda: T,
    pub k: T,
    pub gap: T,
    pub verdict: Verdict,
}

/// Runs [`spectrum_test`] over a `lambda` grid. For a single mode the gap
/// varies continuously with `lambda`, so a sign change between neighbouring
/// rows marks an isolated eigenvalue; the row with the smaller `|gap|` is
/// flagged.
pub fn spectrum_scan<T: Real>(
    lambdas: &[T],
    bc: &BoundaryCondition<T>,
    range: &KRange<T>,
) -> Result<Vec<ScanRow<T>>> {
    let mut rows = lambdas
        .iter()
        .map(|l| {
            spectrum_test(*l, bc, range).map(|t| ScanRow {
                lambda: t.lambda,
                k: t.k,
                gap: t.gap,
                verdict: t.verdict,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if matches!(range, KRange::Single { .. }) {
        for i in 1..rows.len() {
            let (a, b) = (rows[i - 1].gap, rows[i].gap);
            if a.is_finite() && b.is_finite() && (a < T::zero()) != (b < T::zero()) {
                let j = if a.abs() <= b.abs() { i - 1 } else { i };
                rows[j].verdict = Verdict::InSpectrum;
            }
        }
    }
    Ok(rows)
}

/// Lower bound `m(Theta) m(A0) / (m(Theta) + m(A0))` for the spectrum of the
/// extension, valid when `m(Theta) > -m(A0)`.
pub fn lower_bound_estimate<T: Real>(m_theta: T, m_a0: T) -> Result<T> {
    if !(m_theta + m_a0 > T::zero()) {
        return Err(Error::Inapplicable {
            m_theta: to_f64(m_theta),
            neg_m_a0: to_f64(-m_a0),
        });
    }
    Ok(m_theta * m_a0 / (m_theta + m_a0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Grid1;
    use crate::model::mode_problem;

    fn sample(g: &Grid1<f64>, f: impl Fn(f64) -> f64) -> Vec<f64> {
        g.points().into_iter().map(f).collect()
    }

    #[test]
    fn identical_arguments_give_zero_residual() {
        let g = Grid1::<f64>::linspace(0.0, 30.0, 1201);
        let f = sample(&g, |x| {
            (1.0 + x) * (-x).exp() + 0.3 * (-(x - 2.0).powi(2)).exp()
        });
        let mode = mode_problem(&BoundaryCondition::Neumann, 0.7);
        let r = greens_identity_residual(&f, &f, g.step, &mode).unwrap();
        assert_eq!(r.residual, 0.0);
        assert!(r.warnings.is_empty());
    }

    #[test]
    fn green_identity_exponentials() {
        let g = Grid1::<f64>::linspace(0.0, 30.0, 3000);
        let f = sample(&g, |x| (-x).exp());
        let f2 = sample(&g, |x| x * (-x).exp());
        let mode = mode_problem(&BoundaryCondition::<f64>::Dirichlet, 0.0);
        let r = greens_identity_residual(&f, &f2, g.step, &mode).unwrap();
        // (Af|f2) - (f|Af2) = f'(0) f2(0) - f(0) f2'(0) = -1
        assert!((r.boundary + 1.0).abs() < 1e-7, "{}", r.boundary);
        assert!((r.bulk + 1.0).abs() < 1e-6, "{}", r.bulk);
        assert!(r.residual <= 1e-6);
    }

    #[test]
    fn truncated_inputs_warn() {
        let g = Grid1::<f64>::linspace(0.0, 2.0, 200);
        let f = sample(&g, |x| (-x).exp());
        let mode = mode_problem(&BoundaryCondition::<f64>::Dirichlet, 0.0);
        let r = greens_identity_residual(&f, &f, g.step, &mode).unwrap();
        assert_eq!(r.warnings.len(), 1);
    }

    #[test]
    fn membership_examples() {
        let tol = 1e-10;
        let xi: f64 = 1.3;
        let t = BoundaryTraces {
            value: (xi * 0.0).sin(),
            derivative: xi,
        };
        let m = extension_membership(t, &BoundaryCondition::Dirichlet, 0.0, tol).unwrap();
        assert_eq!(m.residual, 0.0);
        let t = BoundaryTraces {
            value: 1.0,
            derivative: -xi * (xi * 0.0).sin(),
        };
        let m = extension_membership(t, &BoundaryCondition::Neumann, 0.0, tol).unwrap();
        assert_eq!(m.residual, 0.0);
        // e^{-x} sampled finely, Robin(-1)
        let g = Grid1::<f64>::linspace(0.0, 1.0, 1001);
        let u = sample(&g, |x| (-x).exp());
        let t = TraceMaps::new(g.step).traces(&u).unwrap();
        let m = extension_membership(t, &BoundaryCondition::robin(-1.0), 0.0, tol).unwrap();
        assert!(m.member, "{}", m.residual);
        let m = extension_membership(t, &BoundaryCondition::robin(1.0), 0.0, tol).unwrap();
        assert!(!m.member);
        assert!(extension_membership(t, &BoundaryCondition::WentzellLaplace, 0.0, tol).is_err());
        assert!(extended_membership(&u, 1.0, tol).member);
    }

    #[test]
    fn deficiency_examples() {
        let mu = deficiency_decay(Complex::new(-1.0, 0.0)).unwrap();
        assert!((mu - Complex::new(1.0, 0.0)).norm() < 1e-15);
        let mu = deficiency_decay(Complex::new(0.0, 1.0)).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((mu - Complex::new(s, -s)).norm() < 1e-15);
        assert!(mu.re > 0.0);
        assert!(deficiency_decay(Complex::new(2.0, 0.0)).is_err());
        assert!(deficiency_decay(Complex::new(0.0, 0.0)).is_err());
        assert!(deficiency_decay(Complex::new(3.0, -1e-3)).unwrap().re > 0.0);
    }

    #[test]
    fn cayley_examples() {
        assert!((cayley_unitary(0.0) - Complex::new(-1.0, 0.0)).norm() < 1e-15);
        assert!((cayley_unitary(1.0) - Complex::new(0.0, 1.0)).norm() < 1e-15);
        assert!((cayley_unitary(1e6) - Complex::new(1.0, 0.0)).norm() < 1e-5);
        assert!((cayley_unitary(-1e6) - Complex::new(1.0, 0.0)).norm() < 1e-5);
    }

    #[test]
    fn weyl_examples() {
        assert_eq!(weyl_function(-1.0, 0.0).unwrap().value, -1.0);
        assert_eq!(weyl_function(-3.0, 1.0).unwrap().value, -2.0);
        assert_eq!(weyl_function(-4.0, 0.0).unwrap().value, -2.0);
        assert!(weyl_function(0.0, 1.0).is_err());
        // d/dlambda of -sqrt(-lambda) at -4 is 1/(2 sqrt 4) = 0.25
        let h: f64 = 1e-5;
        let fd = (weyl_function(-4.0 + h, 0.0).unwrap().value
            - weyl_function(-4.0 - h, 0.0).unwrap().value)
            / (2.0 * h);
        assert!((fd - 0.25).abs() < 1e-6, "{fd}");
    }

    #[test]
    fn spectrum_examples() {
        let single = KRange::Single { k: 0.0 };
        let t = spectrum_test(-1.0, &BoundaryCondition::robin(-1.0), &single).unwrap();
        assert_eq!(t.verdict, Verdict::InSpectrum);
        for l in [-0.1, -1.0, -7.0] {
            let t = spectrum_test(l, &BoundaryCondition::robin(1.0), &KRange::Line).unwrap();
            assert_eq!(t.verdict, Verdict::NotInSpectrum);
        }
        let r2 = BoundaryCondition::robin(-2.0);
        assert_eq!(
            spectrum_test(-3.0, &r2, &KRange::Line).unwrap().verdict,
            Verdict::InSpectrum
        );
        assert_eq!(
            spectrum_test(-5.0, &r2, &KRange::Line).unwrap().verdict,
            Verdict::NotInSpectrum
        );
        assert_eq!(
            spectrum_test(-4.0, &r2, &KRange::Line).unwrap().verdict,
            Verdict::InSpectrum
        );
        assert!(spectrum_test(0.5, &r2, &KRange::Line).is_err());
        let d = spectrum_test(-1.0, &BoundaryCondition::Dirichlet, &KRange::Line).unwrap();
        assert_eq!(d.verdict, Verdict::NotInSpectrum);
        let w = spectrum_test(-1.0, &BoundaryCondition::WentzellLaplace, &KRange::Line).unwrap();
        assert_eq!(w.verdict, Verdict::NotInSpectrum);
    }

    #[test]
    fn multiplier_symbols_use_sampled_extrema() {
        // p(k) = k^2 - 3 dips below -sqrt(k^2 - lambda) near k = 0 for lambda = -1
        let bc = BoundaryCondition::Multiplier {
            symbol: crate::model::Symbol::new(vec![-3.0, 0.0, 1.0]),
        };
        let ks = KRange::Samples {
            ks: Grid1::<f64>::linspace(-3.0, 3.0, 61).points(),
        };
        assert_eq!(
            spectrum_test(-1.0, &bc, &ks).unwrap().verdict,
            Verdict::InSpectrum
        );
        assert!(spectrum_test(-1.0, &bc, &KRange::Line).is_err());
        let lap = BoundaryCondition::Multiplier {
            symbol: crate::model::Symbol::laplacian(),
        };
        assert_eq!(
            spectrum_test(-1.0, &lap, &KRange::Interval { lo: -2.0, hi: 2.0 })
                .unwrap()
                .verdict,
            Verdict::NotInSpectrum
        );
    }

    #[test]
    fn scan_locates_isolated_point() {
        let lambdas = Grid1::<f64>::linspace(-3.0, -1e-3, 3000).points();
        let rows = spectrum_scan(
            &lambdas,
            &BoundaryCondition::robin(-1.0),
            &KRange::Single { k: 0.0 },
        )
        .unwrap();
        let hits: Vec<f64> = rows
            .iter()
            .filter(|r| r.verdict == Verdict::InSpectrum)
            .map(|r| r.lambda)
            .collect();
        assert_eq!(hits.len(), 1, "{hits:?}");
        assert!((hits[0] + 1.0).abs() <= 1e-3);
    }

    #[test]
    fn lower_bound_examples() {
        assert_eq!(lower_bound_estimate(1.0, 1.0).unwrap(), 0.5);
        assert_eq!(lower_bound_estimate(0.0, 2.5).unwrap(), 0.0);
        assert!((lower_bound_estimate(2.0_f64, 3.0).unwrap() - 1.2).abs() < 1e-15);
        assert!(matches!(
            lower_bound_estimate(-3.0, 2.0),
            Err(Error::Inapplicable { .. })
        ));
    }
}

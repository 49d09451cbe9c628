//! Verification instruments: energy functional and Grönwall bound, support
//! (causality) reports, boundary-condition residuals and exact-sequence
//! residuals.
//!
//! The Robin boundary term `1/2 alpha u(0)^2` of the conserved energy follows
//! from `d/dt 1/2 int (u_t^2 + u_x^2) = -u_t(0) u_x(0) = -alpha u_t(0) u(0)`
//! under `u_x(0) = alpha u(0)`.

use serde::{Deserialize, Serialize};

use crate::error::{Result, Warning};
use crate::grid::{left_derivative4, Grid1};
use crate::model::BoundaryCondition;
use crate::oracle::{fd_wave_operator, FdSystem, Trajectory};
use crate::propagator::{GreenKind, KernelGrid, Propagator, SpaceTimeField};
use crate::scalar::{idx, lit, to_f64, Real};
use crate::spectral::SpectralResolution;

/// Energy of one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnergySample<T: Real> {
    /// `1/2 [C_inf ||u||^2 + ||u_t||^2 + ||u_x||^2 + k^2 ||u||^2]`
    pub e: T,
    /// Conserved energy: `C_inf` replaced by the potential itself, plus the
    /// boundary terms.
    pub e_total: T,
}

/// Energy of a state `(u, u_t)` sampled on `grid`.
///
/// `boundary` carries `(v, v_t)` of the Wentzell degree of freedom; when it
/// is absent under the Wentzell condition the trace `u(0)` is used.
#[allow(clippy::too_many_arguments)]
pub fn energy<T: Real>(
    u: &[T],
    udot: &[T],
    grid: &Grid1<T>,
    bc: &BoundaryCondition<T>,
    k: T,
    potential: Option<&[T]>,
    boundary: Option<(T, T)>,
) -> EnergySample<T> {
    let w = grid.trapezoid_weights();
    let dx = grid.step;
    let l2 = |f: &[T]| -> T { f.iter().zip(&w).map(|(f, w)| *w * *f * *f).sum() };
    let grad: T = u
        .windows(2)
        .map(|p| (p[1] - p[0]) * (p[1] - p[0]))
        .sum::<T>()
        / dx;
    let (uu, vv) = (l2(u), l2(udot));
    let c_inf = potential.map_or(T::zero(), |c| crate::model::potential_sup(c));
    let cu: T = potential.map_or(T::zero(), |c| {
        c.iter()
            .zip(u)
            .zip(&w)
            .map(|((c, u), w)| *c * *u * *u * *w)
            .sum()
    });
    let half = lit::<T>(0.5);
    let bulk = vv + grad + k * k * uu;
    let e = half * (c_inf * uu + bulk);
    let mut e_total = half * (bulk + cu);
    match bc {
        BoundaryCondition::WentzellLaplace => {
            let (v, vdot) = boundary.unwrap_or((u[0], udot[0]));
            e_total += half * (vdot * vdot + k * k * v * v);
        }
        other => {
            if let Some(a) = other.robin_parameter(k) {
                e_total += half * a * u[0] * u[0];
            }
        }
    }
    EnergySample { e, e_total }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct EnergyReport<T: Real> {
    pub times: Vec<T>,
    pub e: Vec<T>,
    pub e_total: Vec<T>,
    /// `max |E_total(t) - E_total(0)| / max(|E_total(0)|, E(0))`
    pub drift: T,
    /// `max_t ln(E(t)/E(0)) / t`, the smallest `b` with `E(t) <= e^{bt} E(0)`.
    pub gronwall_b: T,
    /// Least-squares slope of `ln E(t)`.
    pub gronwall_slope: T,
}

/// Energy history of a leapfrog trajectory recorded at every step.
///
/// Between steps `n` and `n+1` the energy uses the discrete velocity
/// `(u^{n+1} - u^n)/dt` and, for `E_total`, the staggered potential
/// `1/2 (u^{n+1})^T K u^n`, which the Störmer–Verlet scheme conserves
/// exactly. `E` averages the gradient energies of both levels so that it is
/// nonnegative.
pub fn energy_report<T: Real>(
    traj: &Trajectory<T>,
    sys: &FdSystem<T>,
    potential: Option<&[T]>,
) -> EnergyReport<T> {
    let dt = traj.dt;
    let dx = sys.dx;
    let half = lit::<T>(0.5);
    let c_inf = potential.map_or(T::zero(), |c| crate::model::potential_sup(c));
    let mut times = Vec::new();
    let mut e = Vec::new();
    let mut e_total = Vec::new();
    let f = sys.first;
    let n_unknown = sys.size();
    for n in 0..traj.u.len().saturating_sub(1) {
        let (a, b) = (&traj.u[n], &traj.u[n + 1]);
        let mut kinetic = T::zero();
        let mut bulk_kinetic = T::zero();
        let mut mass_l2 = T::zero();
        for i in 0..n_unknown {
            let v = (b[f + i] - a[f + i]) / dt;
            kinetic += sys.mass[i] * v * v;
            let bulk_mass = if f == 0 && i == 0 { half } else { T::one() };
            bulk_kinetic += bulk_mass * v * v;
            mass_l2 += bulk_mass * half * (a[f + i] * a[f + i] + b[f + i] * b[f + i]);
        }
        let kinetic = kinetic * dx;
        let bulk_kinetic = bulk_kinetic * dx;
        let mass_l2 = mass_l2 * dx;
        let grad = |u: &[T]| {
            u.windows(2)
                .map(|p| (p[1] - p[0]) * (p[1] - p[0]))
                .sum::<T>()
                / dx
        };
        let k2 = sys.k * sys.k;
        let positive = half * (bulk_kinetic + half * (grad(a) + grad(b)) + (k2 + c_inf) * mass_l2);
        let total = half * (kinetic + sys.stiffness_form(b, a));
        times.push((idx::<T>(n) + half) * dt);
        e.push(positive);
        e_total.push(total);
    }
    summarize(times, e, e_total)
}

fn summarize<T: Real>(times: Vec<T>, e: Vec<T>, e_total: Vec<T>) -> EnergyReport<T> {
    let (drift, b, slope) = if e.is_empty() {
        (T::zero(), T::zero(), T::zero())
    } else {
        let scale = e_total[0].abs().max(e[0]);
        let dev = e_total
            .iter()
            .fold(T::zero(), |m, v| m.max((*v - e_total[0]).abs()));
        let drift = if scale > T::zero() { dev / scale } else { dev };
        let (b, slope) = gronwall_fit(&times, &e);
        (drift, b, slope)
    };
    EnergyReport {
        times,
        e,
        e_total,
        drift,
        gronwall_b: b,
        gronwall_slope: slope,
    }
}

fn gronwall_fit<T: Real>(times: &[T], e: &[T]) -> (T, T) {
    let (t0, e0) = (times[0], e[0]);
    if e0 <= T::zero() {
        let b = if e.iter().any(|v| *v > T::zero()) {
            T::infinity()
        } else {
            T::zero()
        };
        return (b, b);
    }
    let mut b = T::zero();
    for (t, v) in times.iter().zip(e).skip(1) {
        let dt = *t - t0;
        if dt > T::zero() {
            b = b.max((*v / e0).ln() / dt);
        }
    }
    // least squares on ln E
    let n = idx::<T>(times.len());
    let logs: Vec<T> = e
        .iter()
        .map(|v| v.max(T::min_positive_value()).ln())
        .collect();
    let mt = times.iter().copied().sum::<T>() / n;
    let ml = logs.iter().copied().sum::<T>() / n;
    let sxx: T = times.iter().map(|t| (*t - mt) * (*t - mt)).sum();
    let sxy: T = times
        .iter()
        .zip(&logs)
        .map(|(t, l)| (*t - mt) * (*l - ml))
        .sum();
    let slope = if sxx > T::zero() {
        sxy / sxx
    } else {
        T::zero()
    };
    (b, slope)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GronwallOutcome<T: Real> {
    pub pass: bool,
    pub b: T,
    pub cap: Option<T>,
}

/// Checks `E(t) <= e^{b t} E(0)` with the fitted `b`. A trajectory that
/// starts with zero energy must stay at zero; a finite `b` passes unless it
/// exceeds `cap`.
pub fn gronwall_check<T: Real>(report: &EnergyReport<T>, cap: Option<T>) -> GronwallOutcome<T> {
    let b = report.gronwall_b;
    let mut pass = b.is_finite();
    if let Some(c) = cap {
        pass &= b <= c;
    }
    if let (Some(e0), Some(t0)) = (report.e.first(), report.times.first()) {
        let slack = lit::<T>(1e-12);
        pass &= report.times.iter().zip(&report.e).all(|(t, e)| {
            *e <= (b * (*t - *t0)).exp() * *e0 * (T::one() + slack)
                || (*e0 == T::zero() && *e == T::zero())
        });
    }
    GronwallOutcome { pass, b, cap }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ConeReport<T: Real> {
    pub times: Vec<T>,
    /// Energy on `[a + t, b - t]`.
    pub energy: Vec<T>,
    /// Largest total energy along the trajectory.
    pub peak: T,
    /// `max(energy) / peak`
    pub ratio: T,
}

/// Energy inside the shrinking interval `[a + t, b - t]` for a trajectory
/// whose initial data vanish on `[a, b]`; uniqueness requires it to stay
/// zero.
pub fn cone_energy<T: Real>(
    traj: &Trajectory<T>,
    grid: &Grid1<T>,
    k: T,
    a: T,
    b: T,
) -> ConeReport<T> {
    let half = lit::<T>(0.5);
    let dx = grid.step;
    let xs = grid.points();
    let density = |u: &[T], v: &[T], i: usize| -> T {
        let g = if i + 1 < u.len() {
            (u[i + 1] - u[i]) / dx
        } else {
            T::zero()
        };
        half * (v[i] * v[i] + g * g + k * k * u[i] * u[i]) * dx
    };
    let mut times = Vec::new();
    let mut energy = Vec::new();
    let mut peak = T::zero();
    for (n, t) in traj.times.iter().enumerate() {
        let (u, v) = (&traj.u[n], &traj.udot[n]);
        let total: T = (0..u.len()).map(|i| density(u, v, i)).sum();
        peak = peak.max(total);
        let (lo, hi) = (a + *t, b - *t);
        if lo >= hi {
            continue;
        }
        let inside: T = (0..u.len())
            .filter(|i| xs[*i] >= lo && xs[*i] + dx <= hi)
            .map(|i| density(u, v, i))
            .sum();
        times.push(*t);
        energy.push(inside);
    }
    let worst = energy.iter().fold(T::zero(), |m, v| m.max(*v));
    ConeReport {
        times,
        energy,
        peak,
        ratio: if peak > T::zero() {
            worst / peak
        } else {
            worst
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct CausalityReport<T: Real> {
    /// `max |G|` over the sampled acausal region.
    pub max_acausal: T,
    /// Where it is attained, `(t, x, y)`.
    pub at: Option<(T, T, T)>,
    /// Number of samples in the region.
    pub points: usize,
    pub margin: T,
    pub tol: T,
    pub pass: bool,
}

/// Largest kernel value at samples with `|t| < |x - y| - margin` and
/// `|t| < x + y - margin`, outside both the direct and the reflected cone.
///
/// The margin excludes samples adjacent to a cone, where the truncated
/// expansion smooths the jump; it defaults to one grid cell,
/// `dt + dx + dy`.
pub fn causality_report<T: Real>(
    kernel: &KernelGrid<T>,
    tol: T,
    margin: Option<T>,
) -> CausalityReport<T> {
    let margin = margin.unwrap_or(kernel.t.step.abs() + kernel.x.step.abs() + kernel.y.step.abs());
    let mut worst = T::zero();
    let mut at = None;
    let mut points = 0;
    for (t, x, y, v) in kernel.points() {
        if t.abs() < (x - y).abs() - margin && t.abs() < x + y - margin {
            points += 1;
            if v.abs() > worst || at.is_none() {
                worst = worst.max(v.abs());
                at = Some((t, x, y));
            }
        }
    }
    CausalityReport {
        max_acausal: worst,
        at,
        points,
        margin,
        tol,
        pass: worst <= tol,
    }
}

/// Boundary-condition residual of a space-time field, maximized over time
/// and normalized by `max |u|`.
///
/// Static conditions check `u_x(0) = alpha u(0)` (`u(0) = 0` for Dirichlet)
/// with a fourth-order one-sided trace; the Wentzell condition checks
/// `u_x(0) = v_tt + k^2 v` at interior times with a centered second
/// difference, where `v` is the boundary component (or the trace).
pub fn bc_residual<T: Real>(
    field: &SpaceTimeField<T>,
    bc: &BoundaryCondition<T>,
    k: T,
) -> Result<T> {
    let scale = field.max_abs();
    if scale == T::zero() {
        return Ok(T::zero());
    }
    let h = field.x.step;
    let nt = field.t.len;
    let mut worst = T::zero();
    match bc {
        BoundaryCondition::Dirichlet => {
            for n in 0..nt {
                worst = worst.max(field.row(n)[0].abs());
            }
        }
        BoundaryCondition::WentzellLaplace => {
            let v: Vec<T> = match &field.boundary {
                Some(b) => b.clone(),
                None => (0..nt).map(|n| field.row(n)[0]).collect(),
            };
            let dt2 = field.t.step * field.t.step;
            let theta = k * k;
            for n in 1..nt.saturating_sub(1) {
                let vtt = (v[n + 1] - lit::<T>(2.0) * v[n] + v[n - 1]) / dt2;
                let d = left_derivative4(field.row(n), h)?;
                worst = worst.max((d - vtt - theta * v[n]).abs());
            }
        }
        other => {
            let alpha = other.robin_parameter(k).expect("robin-type");
            for n in 0..nt {
                let row = field.row(n);
                worst = worst.max((left_derivative4(row, h)? - alpha * row[0]).abs());
            }
        }
    }
    Ok(worst / scale)
}

/// Relative residuals of the exact sequence
/// `0 -> C_c --box--> C_c --G--> solutions --box--> ...`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct ExactSequence<T: Real> {
    /// `||G box g|| / ||g||`
    pub r1: T,
    /// `||box G g|| / ||g||`
    pub r2: T,
    /// `||box G_adv g - g|| / ||g||`
    pub r3: T,
    /// `||(G_ret - G_adv) g - G g|| / ||g||`
    pub r4: T,
    pub warnings: Vec<Warning>,
}

impl<T: Real> ExactSequence<T> {
    pub fn max(&self) -> T {
        self.r1.max(self.r2).max(self.r3).max(self.r4)
    }
}

/// `L^2` norm over the interior of the space-time grid (outer rows and
/// columns excluded, where the difference operator is not defined).
pub fn interior_l2<T: Real>(f: &SpaceTimeField<T>) -> T {
    let (nt, nx) = (f.t.len, f.x.len);
    let mut s = T::zero();
    for n in 1..nt.saturating_sub(1) {
        for i in 1..nx.saturating_sub(1) {
            s += f.at(n, i) * f.at(n, i);
        }
    }
    (s * f.t.step.abs() * f.x.step.abs()).sqrt()
}

fn ratio<T: Real>(num: T, den: T) -> T {
    if den == T::zero() {
        num
    } else {
        num / den
    }
}

/// Residuals of the Green-operator identities `box G_{ret/adv} f = f` and
/// `G_{ret/adv} box g = g`, relative to the interior norm of the input.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct GreenIdentities<T: Real> {
    pub box_retarded: T,
    pub retarded_box: T,
    pub box_advanced: T,
    pub advanced_box: T,
}

impl<T: Real> GreenIdentities<T> {
    pub fn max(&self) -> T {
        self.box_retarded
            .max(self.retarded_box)
            .max(self.box_advanced)
            .max(self.advanced_box)
    }
}

/// Both orders of `box o G = G o box = id` for a compactly supported `g`,
/// with the second-order difference wave operator.
pub fn green_identities<T: Real>(
    g: &SpaceTimeField<T>,
    res: &SpectralResolution<T>,
) -> Result<GreenIdentities<T>> {
    let p = Propagator::new(res, &g.x)?;
    let k = res.k;
    let norm = interior_l2(g);
    let box_g = fd_wave_operator(g, k);
    let mut out = [T::zero(); 4];
    for (slot, kind) in [GreenKind::Retarded, GreenKind::Advanced]
        .into_iter()
        .enumerate()
    {
        let gf = p.apply(g, kind)?;
        let left = fd_wave_operator(&gf, k).sub(g)?;
        let right = p.apply(&box_g, kind)?.sub(g)?;
        out[2 * slot] = ratio(interior_l2(&left), norm);
        out[2 * slot + 1] = ratio(interior_l2(&right), norm);
    }
    Ok(GreenIdentities {
        box_retarded: out[0],
        retarded_box: out[1],
        box_advanced: out[2],
        advanced_box: out[3],
    })
}

pub fn exact_sequence_residuals<T: Real>(
    g: &SpaceTimeField<T>,
    res: &SpectralResolution<T>,
) -> Result<ExactSequence<T>> {
    let p = Propagator::new(res, &g.x)?;
    let k = res.k;
    let norm = interior_l2(g);
    let box_g = fd_wave_operator(g, k);
    let causal_box = p.apply(&box_g, GreenKind::Causal)?;
    let causal = p.apply(g, GreenKind::Causal)?;
    let ret = p.apply(g, GreenKind::Retarded)?;
    let adv = p.apply(g, GreenKind::Advanced)?;
    let r1 = ratio(interior_l2(&causal_box), norm);
    let r2 = ratio(interior_l2(&fd_wave_operator(&causal, k)), norm);
    let r3 = ratio(interior_l2(&fd_wave_operator(&adv, k).sub(g)?), norm);
    let r4 = ratio(interior_l2(&ret.sub(&adv)?.sub(&causal)?), norm);
    Ok(ExactSequence {
        r1,
        r2,
        r3,
        r4,
        warnings: causal.warnings,
    })
}

/// Outcome of one named check.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub pass: bool,
    /// The measured quantity compared against `tol`.
    pub value: f64,
    pub tol: f64,
    pub detail: String,
}

impl CheckOutcome {
    /// Passes iff `value <= tol`.
    pub fn at_most<T: Real>(name: &str, value: T, tol: T, detail: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            pass: value <= tol,
            value: to_f64(value),
            tol: to_f64(tol),
            detail: detail.into(),
        }
    }

    /// Passes iff `value >= threshold` (negative controls, where the check
    /// must detect a violation).
    pub fn at_least<T: Real>(
        name: &str,
        value: T,
        threshold: T,
        detail: impl Into<String>,
    ) -> Self {
        Self {
            name: name.into(),
            pass: value >= threshold,
            value: to_f64(value),
            tol: to_f64(threshold),
            detail: detail.into(),
        }
    }

    /// A failed check that could not be evaluated.
    pub fn error(name: &str, err: &crate::error::Error) -> Self {
        Self {
            name: name.into(),
            pass: false,
            value: f64::NAN,
            tol: f64::NAN,
            detail: format!("error: {err}"),
        }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {}: {:.3e} (tol {:.2e}) {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.tol,
            self.detail
        )
    }
}

/// Aggregated verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub pass: bool,
    pub checks: Vec<CheckOutcome>,
}

impl Report {
    pub fn new(checks: Vec<CheckOutcome>) -> Self {
        Self {
            pass: checks.iter().all(|c| c.pass),
            checks,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn to_text(&self) -> String {
        let mut s: String = self.checks.iter().map(|c| c.line() + "\n").collect();
        let passed = self.checks.iter().filter(|c| c.pass).count();
        s += &format!(
            "{}: {passed}/{} checks passed\n",
            if self.pass { "PASS" } else { "FAIL" },
            self.checks.len()
        );
        s
    }
}

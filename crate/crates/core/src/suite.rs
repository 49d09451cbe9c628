//! Named verification checks at reference resolution.
//!
//! Each group reproduces one worked spectrum, kernel or estimate and
//! compares it against an independent oracle. Groups return one
//! [`CheckOutcome`] per measured quantity; a group passes when all of its
//! outcomes do. The suite is deterministic: quadrature nodes are uniform and
//! the random-looking test functions come from an additive recurrence.

use crate::error::Result;
use crate::grid::{max_abs, second_derivative4, Grid1};
use crate::model::{mode_problem, BoundaryCondition, Symbol};
use crate::oracle::{assemble_fd, fd_spectrum, images_kernel, leapfrog, leapfrog_response};
use crate::propagator::{apply_retarded, wentzell_apply, GreenKind, KernelGrid, SpaceTimeField};
use crate::spectral::{resolve, wentzell_mode, wentzell_mode_residuals, Quadrature};
use crate::triple::{
    greens_identity_residual, lower_bound_estimate, spectrum_scan, KRange, Verdict,
};
use crate::verify::{
    bc_residual, causality_report, cone_energy, energy_report, exact_sequence_residuals,
    green_identities, gronwall_check, CheckOutcome, Report,
};

/// Names of the check groups, in execution order.
pub const CHECKS: [&str; 12] = [
    "robin_spectrum",
    "weyl_test",
    "images_kernel",
    "robin_vs_leapfrog",
    "causality",
    "green_identities",
    "bc_property",
    "wentzell",
    "exact_sequence",
    "greens_identity",
    "energy",
    "lower_bound",
];

/// Step of the `lambda` scans.
pub const SCAN_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteOptions {
    /// Continuum quadrature for fields (smooth window).
    pub quadrature: Quadrature<f64>,
    /// Continuum quadrature for pointwise kernels (Hann window).
    pub kernel_quadrature: Quadrature<f64>,
    /// Replaces the primary tolerance of every check (negative controls
    /// keep their thresholds).
    pub tol: Option<f64>,
    /// Test fixture: propagates Robin fields with the sign of `alpha`
    /// flipped while checking them against the configured `alpha`.
    pub tamper_alpha: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            quadrature: Quadrature::default(),
            kernel_quadrature: Quadrature::pointwise(),
            tol: None,
            tamper_alpha: false,
        }
    }
}

impl SuiteOptions {
    /// Sets `xi_max` and the node count of both quadratures.
    pub fn with_resolution(mut self, xi_max: Option<f64>, nodes: Option<usize>) -> Self {
        for q in [&mut self.quadrature, &mut self.kernel_quadrature] {
            if let Some(x) = xi_max {
                q.xi_max = x;
            }
            if let Some(n) = nodes {
                q.nodes = n;
            }
        }
        self
    }

    fn tol(&self, default: f64) -> f64 {
        self.tol.unwrap_or(default)
    }
}

/// Runs one named group.
pub fn run_check(name: &str, opts: &SuiteOptions) -> Option<Vec<CheckOutcome>> {
    let run: fn(&SuiteOptions) -> Result<Vec<CheckOutcome>> = match name {
        "robin_spectrum" => robin_spectrum,
        "weyl_test" => weyl_test,
        "images_kernel" => images,
        "robin_vs_leapfrog" => robin_vs_leapfrog,
        "causality" => causality,
        "green_identities" => green_identity_checks,
        "bc_property" => bc_property,
        "wentzell" => wentzell,
        "exact_sequence" => exact_sequence,
        "greens_identity" => greens_identity,
        "energy" => energy,
        "lower_bound" => lower_bound,
        _ => return None,
    };
    Some(run(opts).unwrap_or_else(|e| vec![CheckOutcome::error(name, &e)]))
}

/// Runs the named groups (all of them for an empty list). Unknown names are
/// returned as the error.
pub fn run(names: &[String], opts: &SuiteOptions) -> std::result::Result<Report, String> {
    let selected: Vec<&str> = if names.is_empty() {
        CHECKS.to_vec()
    } else {
        names.iter().map(String::as_str).collect()
    };
    if let Some(bad) = selected.iter().find(|n| !CHECKS.contains(n)) {
        return Err((*bad).to_string());
    }
    let mut checks = Vec::new();
    for name in selected {
        checks.extend(run_check(name, opts).expect("known check"));
    }
    Ok(Report::new(checks))
}

fn grid(lo: f64, hi: f64, len: usize) -> Grid1<f64> {
    Grid1::linspace(lo, hi, len)
}

fn negative_lambdas(lo: f64) -> Vec<f64> {
    let n = (-lo / SCAN_STEP).round() as usize;
    (1..=n).rev().map(|i| -(i as f64) * SCAN_STEP).collect()
}

/// FD grid for spectra: 2048 nodes on `[0, 30]`.
fn spectrum_grid() -> Grid1<f64> {
    grid(0.0, 30.0, 2048)
}

/// Negative spectral points of Robin(alpha) at `k = 0`: the scan flags
/// `-alpha^2` and the FD oracle's lowest eigenvalue agrees.
pub fn robin_spectrum(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for alpha in [-2.0, -1.0, -0.5] {
        let bc = BoundaryCondition::robin(alpha);
        let exact = -alpha * alpha;
        let rows = spectrum_scan(&negative_lambdas(-5.0), &bc, &KRange::Single { k: 0.0 })?;
        let flagged: Vec<f64> = rows
            .iter()
            .filter(|r| r.verdict == Verdict::InSpectrum)
            .map(|r| r.lambda)
            .collect();
        let miss = if flagged.is_empty() {
            f64::INFINITY
        } else {
            flagged.iter().fold(0.0f64, |m, l| m.max((l - exact).abs()))
        };
        out.push(CheckOutcome::at_most(
            &format!("robin_spectrum.scan[alpha={alpha}]"),
            miss,
            SCAN_STEP,
            format!("flagged {flagged:?}, expected {exact}"),
        ));
        let sys = assemble_fd(&bc, 0.0, spectrum_grid())?;
        let lowest = fd_spectrum(&sys, 1)[0];
        out.push(CheckOutcome::at_most(
            &format!("robin_spectrum.fd[alpha={alpha}]"),
            (lowest - exact).abs(),
            opts.tol(1e-3),
            format!("FD lowest eigenvalue {lowest:.6} at grid 2048"),
        ));
    }
    Ok(out)
}

/// Robin(alpha >= 0) has no negative spectrum: no scan flags and no
/// negative FD eigenvalues.
pub fn weyl_test(_opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for alpha in [0.0, 0.5, 1.0, 2.0] {
        let bc = BoundaryCondition::robin(alpha);
        let rows = spectrum_scan(&negative_lambdas(-5.0), &bc, &KRange::Single { k: 0.0 })?;
        let flagged = rows
            .iter()
            .filter(|r| r.verdict == Verdict::InSpectrum)
            .count();
        let negative = assemble_fd(&bc, 0.0, spectrum_grid())?.count_below(0.0);
        out.push(CheckOutcome::at_most(
            &format!("weyl_test[alpha={alpha}]"),
            (flagged + negative) as f64,
            0.0,
            format!("{flagged} scan flags, {negative} negative FD eigenvalues"),
        ));
    }
    Ok(out)
}

/// Whether `(t, x, y)` lies within `cell` of the direct or reflected cone.
fn near_cone(t: f64, x: f64, y: f64, cell: f64) -> bool {
    (t.abs() - (x - y).abs()).abs() < cell || (t.abs() - (x + y)).abs() < cell
}

/// The 20 x 20 x 20 kernel grid with `t` in `[0, 2]`, `x, y` in `[0.2, 3]`.
pub fn kernel_grids() -> (Grid1<f64>, Grid1<f64>, Grid1<f64>) {
    (grid(0.0, 2.0, 20), grid(0.2, 3.0, 20), grid(0.2, 3.0, 20))
}

/// Maximum deviation between a spectral kernel grid and the images kernel,
/// excluding samples within one grid cell of a cone.
pub fn images_deviation(kernel: &KernelGrid<f64>) -> Result<(f64, usize)> {
    let cell = kernel.t.step + kernel.x.step + kernel.y.step;
    let mut worst = 0.0f64;
    let mut used = 0;
    for (t, x, y, v) in kernel.points() {
        if near_cone(t, x, y, cell) {
            continue;
        }
        used += 1;
        worst = worst.max((v - images_kernel(t, x, y, &kernel.meta.bc)?).abs());
    }
    Ok((worst, used))
}

/// Dirichlet and Neumann kernels against the method of images.
pub fn images(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (t, x, y) = kernel_grids();
    let mut out = Vec::new();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::Neumann] {
        let res = resolve(&bc, 0.0, opts.kernel_quadrature)?;
        let kernel = KernelGrid::build(&res, t, x, y);
        let (worst, used) = images_deviation(&kernel)?;
        out.push(CheckOutcome::at_most(
            &format!("images_kernel[{}]", bc.name()),
            worst,
            opts.tol(1e-3),
            format!("{used} of {} samples off the cones", kernel.values.len()),
        ));
    }
    Ok(out)
}

/// Shared grids of the Robin propagator comparison: 1024 nodes on `[0, 20]`
/// and `dt = 0.4 dx` up to `t = 6`.
pub fn leapfrog_grids() -> (Grid1<f64>, Grid1<f64>) {
    let x = grid(0.0, 20.0, 1024);
    let dt = 0.4 * x.step;
    let nt = (6.0 / dt).round() as usize + 1;
    (Grid1::with_step(0.0, dt, nt), x)
}

/// Robin(-1) retarded response to a Gaussian source against leapfrog.
pub fn robin_vs_leapfrog(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (t, x) = leapfrog_grids();
    let bc = BoundaryCondition::robin(-1.0);
    let f = SpaceTimeField::gaussian(t, x, 1.5, 2.0, 0.3, 0.4, 1.0);
    let spectral = apply_retarded(&resolve(&bc, 0.0, opts.quadrature)?, &f)?;
    let oracle = leapfrog_response(&assemble_fd(&bc, 0.0, x)?, &f)?;
    let rel = spectral.rel_l2(&oracle)?;
    Ok(vec![CheckOutcome::at_most(
        "robin_vs_leapfrog",
        rel,
        opts.tol(1e-2),
        format!("relative L2 on {} x {} grid", t.len, x.len),
    )])
}

fn doubled(q: Quadrature<f64>) -> Quadrature<f64> {
    Quadrature {
        xi_max: 2.0 * q.xi_max,
        nodes: 2 * q.nodes,
        ..q
    }
}

/// Robin(-1) kernel, including the growing bound-state term, vanishes
/// outside the cones; the residual at least halves with doubled nodes.
pub fn causality(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (t, x, y) = kernel_grids();
    let bc = BoundaryCondition::robin(-1.0);
    let tol = opts.tol(1e-3);
    let coarse = resolve(&bc, 0.0, opts.kernel_quadrature)?;
    let fine = resolve(&bc, 0.0, doubled(opts.kernel_quadrature))?;
    let a = causality_report(&KernelGrid::build(&coarse, t, x, y), tol, None);
    let b = causality_report(&KernelGrid::build(&fine, t, x, y), tol, None);
    let q = opts.kernel_quadrature;
    Ok(vec![
        CheckOutcome::at_most(
            "causality.acausal_max",
            a.max_acausal,
            tol,
            format!(
                "{} acausal samples, xi_max {}, {} nodes",
                a.points, q.xi_max, q.nodes
            ),
        ),
        CheckOutcome::at_least(
            "causality.convergence",
            a.max_acausal / b.max_acausal,
            2.0,
            format!(
                "ratio {:.3e} -> {:.3e} with doubled nodes",
                a.max_acausal, b.max_acausal
            ),
        ),
    ])
}

/// Space-time grid of the operator identities: `x` in `[0, 12]`,
/// `t` in `[0, 6]`, steps 0.04.
pub fn identity_grids() -> (Grid1<f64>, Grid1<f64>) {
    (grid(0.0, 6.0, 151), grid(0.0, 12.0, 301))
}

fn identity_source(t: Grid1<f64>, x: Grid1<f64>) -> SpaceTimeField<f64> {
    SpaceTimeField::gaussian(t, x, 3.0, 3.0, 0.4, 0.4, 1.0)
}

/// `box G = G box = id` for retarded and advanced operators.
pub fn green_identity_checks(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (t, x) = identity_grids();
    let g = identity_source(t, x);
    let mut out = Vec::new();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::robin(-1.0)] {
        let r = green_identities(&g, &resolve(&bc, 0.0, opts.quadrature)?)?;
        out.push(CheckOutcome::at_most(
            &format!("green_identities[{}]", bc.name()),
            r.max(),
            opts.tol(1e-2),
            format!(
                "box G_ret {:.2e}, G_ret box {:.2e}, box G_adv {:.2e}, G_adv box {:.2e}",
                r.box_retarded, r.retarded_box, r.box_advanced, r.advanced_box
            ),
        ));
    }
    Ok(out)
}

/// Grids of the boundary-condition checks: `x` in `[0, 12]` (601 nodes),
/// `t` in `[0, 5]` (126 nodes).
pub fn boundary_grids() -> (Grid1<f64>, Grid1<f64>) {
    (grid(0.0, 5.0, 126), grid(0.0, 12.0, 601))
}

/// Retarded fields satisfy the static boundary condition; checking a Robin
/// field against the wrong `alpha` must fail.
pub fn bc_property(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (t, x) = boundary_grids();
    let f = SpaceTimeField::gaussian(t, x, 1.5, 1.0, 0.3, 0.3, 1.0);
    let cases = [
        (BoundaryCondition::Dirichlet, 0.0),
        (BoundaryCondition::Neumann, 0.0),
        (BoundaryCondition::robin(-1.0), 0.0),
        (
            BoundaryCondition::Multiplier {
                symbol: Symbol::laplacian(),
            },
            1.0,
        ),
    ];
    let mut out = Vec::new();
    for (bc, k) in cases {
        let propagated = match (&bc, opts.tamper_alpha) {
            (BoundaryCondition::Robin { alpha }, true) => BoundaryCondition::robin(-*alpha),
            _ => bc.clone(),
        };
        let field = apply_retarded(&resolve(&propagated, k, opts.quadrature)?, &f)?;
        out.push(CheckOutcome::at_most(
            &format!("bc_property[{}]", bc.name()),
            bc_residual(&field, &bc, k)?,
            opts.tol(1e-2),
            format!("k = {k}"),
        ));
    }
    let field = apply_retarded(
        &resolve(&BoundaryCondition::robin(-1.0), 0.0, opts.quadrature)?,
        &f,
    )?;
    out.push(CheckOutcome::at_least(
        "bc_property.wrong_alpha_control",
        bc_residual(&field, &BoundaryCondition::robin(1.0), 0.0)?,
        1e-1,
        "Robin(-1) field checked against alpha = +1 must fail",
    ));
    Ok(out)
}

/// Grids of the Wentzell comparison: `x` in `[0, 15]` (751 nodes) and
/// `dt = 0.4 dx` up to `t = 6`.
pub fn wentzell_grids() -> (Grid1<f64>, Grid1<f64>) {
    let x = grid(0.0, 15.0, 751);
    let dt = 0.4 * x.step;
    let nt = (6.0 / dt).round() as usize + 1;
    (Grid1::with_step(0.0, dt, nt), x)
}

/// Dynamical (Wentzell) boundary condition `u_x(0) = (d_t^2 + k^2) u(0)`.
pub fn wentzell(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let k = 0.5;
    let tol = opts.tol(1e-2);
    let bc = BoundaryCondition::WentzellLaplace;
    let mut out = Vec::new();
    let (t, x) = wentzell_grids();
    let sys = assemble_fd(&bc, k, x)?;
    out.push(CheckOutcome::at_most(
        "wentzell.fd_symmetry",
        sys.symmetry_residual(),
        0.0,
        format!("extended matrix of size {}", sys.size()),
    ));
    let mode_grid = grid(0.0, 2.0, 2001);
    let mut worst: f64 = 0.0;
    for (xi, km) in [(0.7, 0.0), (2.5, 1.0), (1.3, 0.5)] {
        let m = wentzell_mode(&mode_grid, xi, km)?;
        let (compat, dyn_res) = wentzell_mode_residuals(&m, mode_grid.step)?;
        let d2 = second_derivative4(&m.bulk, mode_grid.step)?;
        let eigen: Vec<f64> = m
            .bulk
            .iter()
            .zip(&d2)
            .map(|(u, d)| -d - xi * xi * u)
            .collect();
        worst = worst.max(compat).max(dyn_res).max(max_abs(&eigen));
    }
    out.push(CheckOutcome::at_most(
        "wentzell.mode_residuals",
        worst,
        1e-6,
        "eigen-equation, trace compatibility and dynamical condition",
    ));
    // source away from the boundary, so the lift by its trace vanishes
    let f = SpaceTimeField::gaussian(t, x, 1.5, 3.0, 0.3, 0.3, 1.0);
    let field = wentzell_apply(&f, k, opts.quadrature, GreenKind::Retarded)?;
    let oracle = leapfrog_response(&sys, &f)?;
    out.push(CheckOutcome::at_most(
        "wentzell.vs_leapfrog",
        field.rel_l2(&oracle)?,
        tol,
        format!("relative L2 on {} x {} grid", t.len, x.len),
    ));
    out.push(CheckOutcome::at_most(
        "wentzell.dynamical_bc",
        bc_residual(&field, &bc, k)?,
        tol,
        "u_x(0) = v_tt + k^2 v",
    ));
    let static_robin = BoundaryCondition::Multiplier {
        symbol: Symbol::laplacian(),
    };
    let substituted = apply_retarded(&resolve(&static_robin, k, opts.quadrature)?, &f)?;
    out.push(CheckOutcome::at_least(
        "wentzell.static_robin_control",
        bc_residual(&substituted, &bc, k)?,
        tol,
        "static u_x(0) = k^2 u(0) propagator must violate the dynamical condition",
    ));
    Ok(out)
}

/// Residuals of the exact sequence for a Gaussian test function.
pub fn exact_sequence(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let (t, x) = identity_grids();
    let g = identity_source(t, x);
    let mut out = Vec::new();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::robin(-1.0)] {
        let r = exact_sequence_residuals(&g, &resolve(&bc, 0.0, opts.quadrature)?)?;
        out.push(CheckOutcome::at_most(
            &format!("exact_sequence[{}]", bc.name()),
            r.max(),
            opts.tol(1e-2),
            format!(
                "r1 {:.2e}, r2 {:.2e}, r3 {:.2e}, r4 {:.2e}",
                r.r1, r.r2, r.r3, r.r4
            ),
        ));
    }
    Ok(out)
}

/// Number of parameters consumed by [`smooth_decaying`].
pub const SMOOTH_PARAMS: usize = 8;

/// A smooth function decaying well before `x = 30`, built from parameters
/// in `[0, 1)`: `(a + b x + c x^2) e^{-kappa x} + d exp(-(x - m)^2 / (2 s^2))`.
pub fn smooth_decaying(g: &Grid1<f64>, p: &[f64]) -> Vec<f64> {
    let (a, b, c) = (2.0 * p[0] - 1.0, 2.0 * p[1] - 1.0, p[2] - 0.5);
    let kappa = 0.8 + 1.2 * p[3];
    let d = 2.0 * p[4] - 1.0;
    let m = 1.0 + 7.0 * p[5];
    let s = 0.4 + 1.1 * p[6];
    let shift = 3.0 * p[7];
    g.points()
        .into_iter()
        .map(|x| {
            (a + b * x + c * x * x) * (-kappa * x).exp()
                + d * (-(x - m - shift).powi(2) / (2.0 * s * s)).exp()
        })
        .collect()
}

/// Largest Green's identity residual over pairs of [`smooth_decaying`]
/// functions on 3000 nodes of `[0, 30]`, cycling through the boundary
/// conditions.
pub fn greens_identity_pairs(params: &[[f64; 2 * SMOOTH_PARAMS]]) -> Result<f64> {
    let g = grid(0.0, 30.0, 3000);
    let bcs = [
        BoundaryCondition::Dirichlet,
        BoundaryCondition::Neumann,
        BoundaryCondition::robin(-1.0),
        BoundaryCondition::robin(0.7),
    ];
    let mut worst: f64 = 0.0;
    for (i, p) in params.iter().enumerate() {
        let f = smooth_decaying(&g, &p[..SMOOTH_PARAMS]);
        let f2 = smooth_decaying(&g, &p[SMOOTH_PARAMS..]);
        let mode = mode_problem(&bcs[i % bcs.len()], 0.3 * (i % 5) as f64);
        worst = worst.max(greens_identity_residual(&f, &f2, g.step, &mode)?.residual);
    }
    Ok(worst)
}

/// Deterministic points of `[0, 1)^16` from the additive recurrence with the
/// generalized golden ratio.
pub fn quasi_random(count: usize) -> Vec<[f64; 2 * SMOOTH_PARAMS]> {
    const D: usize = 2 * SMOOTH_PARAMS;
    // root of x^(D+1) = x + 1
    let mut phi: f64 = 1.5;
    for _ in 0..100 {
        phi = (1.0 + phi).powf(1.0 / (D as f64 + 1.0));
    }
    let alpha: Vec<f64> = (1..=D).map(|j| phi.powi(-(j as i32)).fract()).collect();
    (1..=count)
        .map(|n| {
            let mut p = [0.0; D];
            for (j, v) in p.iter_mut().enumerate() {
                *v = (0.5 + n as f64 * alpha[j]).fract();
            }
            p
        })
        .collect()
}

/// Green's identity over 100 smooth decaying pairs.
pub fn greens_identity(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let worst = greens_identity_pairs(&quasi_random(100))?;
    Ok(vec![CheckOutcome::at_most(
        "greens_identity",
        worst,
        opts.tol(1e-6),
        "100 pairs at grid 3000",
    )])
}

/// `exp(-1/(1 - r^2))` on `|x - c| < w`, zero elsewhere.
pub fn bump(x: f64, c: f64, w: f64) -> f64 {
    let r = (x - c) / w;
    if r.abs() < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

/// Conservation of the total energy, the Grönwall bound of a growing bound
/// state, and the vanishing of energy inside the cone of a region where the
/// data vanish.
pub fn energy(opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let x = grid(0.0, 20.0, 1001);
    let dt = 0.4 * x.step;
    let xs = x.points();
    let zero = vec![0.0; x.len];
    let mut out = Vec::new();
    for bc in [BoundaryCondition::Dirichlet, BoundaryCondition::robin(-1.0)] {
        let sys = assemble_fd(&bc, 0.0, x)?;
        // a pulse plus, under Robin, bound-state content
        let u0: Vec<f64> = xs
            .iter()
            .map(|x| {
                let pulse = (-(x - 5.0).powi(2) / 0.5).exp();
                let bound = if bc == BoundaryCondition::Dirichlet {
                    0.0
                } else {
                    0.5 * (-x).exp()
                };
                pulse + bound
            })
            .collect();
        let traj = leapfrog(&sys, &u0, &zero, dt, 10.0)?;
        let report = energy_report(&traj, &sys, None);
        out.push(CheckOutcome::at_most(
            &format!("energy.drift[{}]", bc.name()),
            report.drift,
            opts.tol(1e-3),
            format!("over T = 10, {} steps", traj.times.len() - 1),
        ));
    }
    // pure bound state: E = cosh(2t)/2, so b <= 2
    let bc = BoundaryCondition::robin(-1.0);
    let sys = assemble_fd(&bc, 0.0, x)?;
    let e: Vec<f64> = xs.iter().map(|x| 2f64.sqrt() * (-x).exp()).collect();
    let report = energy_report(&leapfrog(&sys, &e, &zero, dt, 5.0)?, &sys, None);
    let g = gronwall_check(&report, Some(2.05));
    out.push(CheckOutcome {
        name: "energy.gronwall[robin]".into(),
        pass: g.pass,
        value: g.b,
        tol: 2.05,
        detail: format!(
            "fitted b {:.4}, least-squares slope {:.4}",
            g.b, report.gronwall_slope
        ),
    });
    // data vanish on [4, 12]; energy on [4 + t, 12 - t] must stay zero
    let sys = assemble_fd(&BoundaryCondition::Dirichlet, 0.0, x)?;
    let u0: Vec<f64> = xs
        .iter()
        .map(|x| bump(*x, 2.5, 1.5) + bump(*x, 14.0, 1.5))
        .collect();
    let v0: Vec<f64> = xs.iter().map(|x| bump(*x, 13.0, 0.8)).collect();
    let cone = cone_energy(&leapfrog(&sys, &u0, &v0, dt, 4.0)?, &x, 0.0, 4.0, 12.0);
    out.push(CheckOutcome::at_most(
        "energy.cone",
        cone.ratio,
        opts.tol(1e-6),
        format!("max cone energy / peak over {} times", cone.times.len()),
    ));
    Ok(out)
}

/// FD minimum eigenvalue of Robin problems engineered with `m(Theta) =
/// alpha` and `m(A0) = k^2` against the lower bound.
pub fn lower_bound(_opts: &SuiteOptions) -> Result<Vec<CheckOutcome>> {
    let pairs = [
        (1.0, 1.0),
        (2.0, 3.0),
        (0.0, 2.0),
        (0.5, 0.25),
        (-0.5, 1.0),
        (-0.9, 1.0),
        (-1.0, 3.0),
        (-1.5, 2.0),
    ];
    let mut out = Vec::new();
    for (m_theta, m_a0) in pairs {
        let bound = lower_bound_estimate(m_theta, m_a0)?;
        let sys = assemble_fd(
            &BoundaryCondition::robin(m_theta),
            f64::sqrt(m_a0),
            spectrum_grid(),
        )?;
        let lowest = fd_spectrum(&sys, 1)[0];
        out.push(CheckOutcome::at_most(
            &format!("lower_bound[{m_theta},{m_a0}]"),
            bound - lowest,
            0.0,
            format!("FD minimum {lowest:.6} >= bound {bound:.6}"),
        ));
    }
    Ok(out)
}

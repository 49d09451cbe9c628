//! The four subcommands. Each writes its files under the output directory
//! and returns whether its checks passed.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde_json::json;
use triplewave::oracle::leapfrog_response;
use triplewave::propagator::{fmt17, GreenKind, Propagator};
use triplewave::suite::{self, SuiteOptions, CHECKS};
use triplewave::verify::CheckOutcome;
use triplewave::{
    assemble_fd, bc_residual, fd_spectrum, resolve, spectrum_scan, KRange, KernelGrid,
    SpaceTimeField, Verdict, Window,
};

use crate::config::{Format, ScenarioConfig, SourceConfig, OUT_DIR_ENV};
use crate::error::CliError;

/// Command-line values that take precedence over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub out: Option<PathBuf>,
    pub tol: Option<f64>,
    pub nodes: Option<usize>,
    pub xi_max: Option<f64>,
}

impl Overrides {
    /// Applies the overrides; the output directory comes from `--out`, then
    /// the environment, then the config.
    pub fn apply(&self, cfg: &mut ScenarioConfig) {
        if let Some(dir) = self
            .out
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        {
            cfg.outputs.dir = dir;
        }
        if let Some(tol) = self.tol {
            cfg.verify.tol = Some(tol);
        }
        if let Some(n) = self.nodes {
            cfg.quadrature.nodes = n;
        }
        if let Some(x) = self.xi_max {
            cfg.quadrature.xi_max = x;
        }
    }
}

/// Default tolerance of the field checks run by `evolve`.
pub const EVOLVE_TOL: f64 = 1e-2;

pub struct Outcome {
    pub pass: bool,
    /// Human-readable summary for stdout.
    pub summary: String,
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn out_path(cfg: &ScenarioConfig, name: &str) -> Result<PathBuf, CliError> {
    let dir = &cfg.outputs.dir;
    std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    Ok(dir.join(name))
}

fn write_with(
    cfg: &ScenarioConfig,
    name: &str,
    write: impl FnOnce(&mut BufWriter<File>) -> Result<(), CliError>,
) -> Result<PathBuf, CliError> {
    let path = out_path(cfg, name)?;
    let file = File::create(&path).map_err(|e| io_err(&path, e))?;
    let mut w = BufWriter::new(file);
    write(&mut w)?;
    w.flush().map_err(|e| io_err(&path, e))?;
    Ok(path)
}

fn write_json(
    cfg: &ScenarioConfig,
    name: &str,
    value: &serde_json::Value,
) -> Result<PathBuf, CliError> {
    let text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    write_with(cfg, name, |w| {
        writeln!(w, "{text}").map_err(|e| CliError::Io(e.to_string()))
    })
}

fn config_json(cfg: &ScenarioConfig) -> serde_json::Value {
    serde_json::to_value(cfg).expect("config serializes")
}

/// Scans `lambda < 0` for spectral points, next to the FD eigenvalues.
pub fn spectrum(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let lambdas = cfg.spectrum.lambda.values();
    let k = cfg.model.k;
    let range = match cfg.spectrum.k_range {
        Some([lo, hi]) => KRange::Interval { lo, hi },
        None => KRange::Single { k },
    };
    let rows = if lambdas.is_empty() {
        vec![]
    } else {
        spectrum_scan(&lambdas, &cfg.bc, &range)?
    };
    // the FD matrix discretizes one mode, so it is only comparable for a single k
    let fd = match range {
        KRange::Single { .. } if !rows.is_empty() => {
            let sys = assemble_fd(&cfg.bc, k, cfg.model.x_grid())?;
            let below = sys.count_below(0.0);
            if below == 0 {
                vec![]
            } else {
                fd_spectrum(&sys, below)
            }
        }
        _ => vec![],
    };
    // attach each FD eigenvalue to the nearest scan row within one scan step
    let step = if lambdas.len() > 1 {
        (lambdas[1] - lambdas[0]).abs()
    } else {
        1e-3
    };
    let mut fd_column: Vec<Option<f64>> = vec![None; rows.len()];
    for e in &fd {
        let nearest = rows
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1.lambda - e).abs().total_cmp(&(b.1.lambda - e).abs()));
        if let Some((j, r)) = nearest {
            if (r.lambda - e).abs() <= step {
                fd_column[j] = Some(*e);
            }
        }
    }

    let flagged: Vec<f64> = rows
        .iter()
        .filter(|r| r.verdict == Verdict::InSpectrum)
        .map(|r| r.lambda)
        .collect();
    let mut files = Vec::new();
    if cfg.outputs.wants(Format::Csv) {
        files.push(write_with(cfg, "spectrum.csv", |w| {
            let mut body = String::from("lambda,k,gap,verdict,fd_eigenvalue,fd_verdict\n");
            for (r, e) in rows.iter().zip(&fd_column) {
                let (fd_value, fd_verdict) = match e {
                    Some(v) => (fmt17(*v), Verdict::InSpectrum.as_str()),
                    None => (String::new(), Verdict::NotInSpectrum.as_str()),
                };
                body += &format!(
                    "{},{},{},{},{fd_value},{fd_verdict}\n",
                    fmt17(r.lambda),
                    fmt17(r.k),
                    fmt17(r.gap),
                    r.verdict.as_str()
                );
            }
            w.write_all(body.as_bytes())
                .map_err(|e| CliError::Io(e.to_string()))
        })?);
    }
    files.push(write_json(
        cfg,
        "spectrum.json",
        &json!({
            "kind": "spectrum",
            "columns": ["lambda", "k", "gap", "verdict", "fd_eigenvalue", "fd_verdict"],
            "rows": rows,
            "in_spectrum": flagged,
            "fd_eigenvalues_below_zero": fd,
            "config": config_json(cfg),
        }),
    )?);
    let summary = format!(
        "{} rows, IN_SPECTRUM at {:?}, FD eigenvalues below 0: {:?}\n{}",
        rows.len(),
        flagged,
        fd,
        listing(&files)
    );
    Ok(Outcome {
        pass: true,
        summary,
    })
}

/// Samples the causal kernel `G(t; x, y)` on the configured grids.
pub fn kernel(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let t = cfg.grids.t.grid("grids.t")?;
    let x = cfg.grids.x.grid("grids.x")?;
    let y = cfg.grids.y.unwrap_or(cfg.grids.x).grid("grids.y")?;
    let res = resolve(&cfg.bc, cfg.model.k, cfg.quadrature(Window::Hann))?;
    let kernel = KernelGrid::build(&res, t, x, y);
    let invariants = kernel.invariants();
    let mut files = Vec::new();
    if cfg.outputs.wants(Format::Csv) {
        files.push(write_with(cfg, "kernel.csv", |w| Ok(kernel.write_csv(w)?))?);
    }
    if cfg.outputs.wants(Format::Binary) {
        files.push(write_with(cfg, "kernel.bin", |w| {
            Ok(kernel.write_binary(w)?)
        })?);
    }
    let mut sidecar = kernel.sidecar();
    sidecar["invariants"] = serde_json::to_value(invariants).expect("invariants serialize");
    sidecar["config"] = config_json(cfg);
    files.push(write_json(cfg, "kernel.json", &sidecar)?);
    let summary = format!(
        "kernel {} x {} x {}, time antisymmetry {:.2e}\n{}",
        t.len,
        x.len,
        y.len,
        invariants.time_antisymmetry,
        listing(&files)
    );
    Ok(Outcome {
        pass: true,
        summary,
    })
}

/// Applies a Green operator to the configured source and checks the field.
pub fn evolve(cfg: &ScenarioConfig) -> Result<Outcome, CliError> {
    let x = cfg.model.x_grid();
    let t = cfg.grids.evolve_t.grid("grids.evolve_t")?;
    let source = match cfg.source {
        SourceConfig::Zero => SpaceTimeField::zeros(t, x),
        SourceConfig::Gaussian {
            t0,
            x0,
            sigma_t,
            sigma_x,
            amplitude,
        } => SpaceTimeField::gaussian(t, x, t0, x0, sigma_t, sigma_x, amplitude),
    };
    let k = cfg.model.k;
    let res = resolve(&cfg.bc, k, cfg.quadrature(Window::fields()))?;
    let field = Propagator::new(&res, &x)?.apply(&source, cfg.evolve.kind)?;
    let tol = cfg.verify.tol.unwrap_or(EVOLVE_TOL);

    let mut checks = vec![CheckOutcome::at_most(
        "evolve.bc_residual",
        bc_residual(&field, &cfg.bc, k)?,
        tol,
        format!("{} condition at x = 0", cfg.bc.name()),
    )];
    let mut notes = Vec::new();
    if cfg.evolve.compare_leapfrog {
        if cfg.evolve.kind != GreenKind::Retarded {
            notes.push(
                "leapfrog comparison skipped: the oracle only marches forward from rest"
                    .to_string(),
            );
        } else {
            match assemble_fd(&cfg.bc, k, x).and_then(|sys| leapfrog_response(&sys, &source)) {
                Ok(oracle) => {
                    let r = if oracle.max_abs() == 0.0 && field.max_abs() == 0.0 {
                        0.0
                    } else {
                        field.rel_l2(&oracle)?
                    };
                    checks.push(CheckOutcome::at_most(
                        "evolve.vs_leapfrog",
                        r,
                        tol,
                        "relative L2",
                    ));
                }
                Err(e @ triplewave::Error::Stability { .. }) => {
                    notes.push(format!("leapfrog comparison skipped: {e}"));
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let pass = checks.iter().all(|c| c.pass);

    let mut files = Vec::new();
    if cfg.outputs.wants(Format::Csv) {
        files.push(write_with(cfg, "field.csv", |w| Ok(field.write_csv(w)?))?);
    }
    if cfg.outputs.wants(Format::Binary) {
        files.push(write_with(
            cfg,
            "field.bin",
            |w| Ok(field.write_binary(w)?),
        )?);
    }
    let mut sidecar = field.sidecar();
    sidecar["green_kind"] = serde_json::to_value(cfg.evolve.kind).expect("kind serializes");
    sidecar["checks"] = serde_json::to_value(&checks).expect("checks serialize");
    sidecar["notes"] = json!(notes);
    sidecar["config"] = config_json(cfg);
    files.push(write_json(cfg, "field.json", &sidecar)?);

    let mut summary: String = checks.iter().map(|c| c.line() + "\n").collect();
    for n in &notes {
        summary += &format!("note: {n}\n");
    }
    summary += &listing(&files);
    Ok(Outcome { pass, summary })
}

/// Runs the named checks (all of them when `names` is empty or `["all"]`).
pub fn verify(cfg: &ScenarioConfig, names: &[String]) -> Result<Outcome, CliError> {
    let mut selected: Vec<String> = if names.is_empty() {
        cfg.verify.checks.clone()
    } else {
        names.to_vec()
    };
    if selected.iter().any(|n| n == "all") {
        selected.clear();
    }
    let opts = SuiteOptions {
        tol: cfg.verify.tol,
        tamper_alpha: cfg.verify.tamper_alpha,
        ..SuiteOptions::default()
    }
    .with_resolution(Some(cfg.quadrature.xi_max), Some(cfg.quadrature.nodes));
    let report = suite::run(&selected, &opts).map_err(|bad| {
        CliError::Config(format!(
            "unknown check '{bad}'; known checks: all, {}",
            CHECKS.join(", ")
        ))
    })?;
    let mut value: serde_json::Value =
        serde_json::from_str(&report.to_json()).expect("report is JSON");
    value["config"] = config_json(cfg);
    let path = write_json(cfg, "report.json", &value)?;
    Ok(Outcome {
        pass: report.pass,
        summary: format!("{}{}", report.to_text(), listing(&[path])),
    })
}

fn listing(files: &[PathBuf]) -> String {
    files
        .iter()
        .map(|f| format!("wrote {}\n", f.display()))
        .collect()
}

//! CSV-producing subcommands.

use std::f64::consts::PI;

use rayon::prelude::*;

use super::config::RunConfig;
use super::CliError;
use crate::dynamics::propagate;
use crate::dynamics::uniform_times;
use crate::error::{Error, Result};
use crate::global_me::{build_global_liouvillian, Approach, LambShiftSpec, Liouvillian};
use crate::local_me::build_local_liouvillian;
use crate::model::{Bath, ModelParams};
use crate::spin_algebra::Basis;
use crate::steady_state::{global_steady_analytic, steady_numeric, DensityMatrix};
use crate::transport::{local_heat_current, TransportProbe, TransportReport};

/// Steady state of one generator with its transport observables.
#[derive(Debug, Clone, PartialEq)]
pub struct SteadyRow {
    pub approach: Approach,
    /// Energy-basis populations, levels `E₁..E₈`.
    pub mu: [f64; 8],
    /// Computational-basis diagonal, `|000⟩..|111⟩`.
    pub diag: [f64; 8],
    pub report: TransportReport,
    pub heat_left: f64,
    pub heat_right: f64,
    /// Frobenius norm of `ℒ[ρ∞]`.
    pub residual: f64,
}

pub fn liouvillian(p: &ModelParams, approach: Approach, ls: &LambShiftSpec) -> Result<Liouvillian> {
    match approach {
        Approach::Global => build_global_liouvillian(p, ls),
        Approach::Local => build_local_liouvillian(p),
    }
}

fn diagonal(rho: &DensityMatrix) -> [f64; 8] {
    std::array::from_fn(|k| rho.matrix()[(k, k)].re)
}

pub fn steady_row(p: &ModelParams, approach: Approach, ls: &LambShiftSpec) -> Result<SteadyRow> {
    let l = liouvillian(p, approach, ls)?;
    let rho = match approach {
        Approach::Global => global_steady_analytic(p)?.0.to_basis(Basis::Computational),
        Approach::Local => steady_numeric(&l)?,
    };
    let op = rho.as_operator();
    let report = TransportProbe::new(&l)?.report(&op)?;
    let (heat_left, heat_right) = match (report.heat_left, report.heat_right) {
        (Some(a), Some(b)) => (a, b),
        _ => (local_heat_current(p, &op, Bath::Left)?, local_heat_current(p, &op, Bath::Right)?),
    };
    Ok(SteadyRow {
        approach,
        mu: diagonal(&rho.to_basis(Basis::Energy)),
        diag: diagonal(&rho),
        report,
        heat_left,
        heat_right,
        residual: l.apply(&op)?.norm(),
    })
}

/// `q_L` in units of `πλ²h_L²/4`; undefined without dissipation.
pub fn scaled_source(p: &ModelParams, q_left: f64) -> Option<f64> {
    let unit = PI * p.lambda * p.lambda * p.left.h * p.left.h / 4.0;
    (unit > 0.0).then(|| q_left / unit)
}

pub(crate) fn num(x: f64) -> String {
    format!("{x:e}")
}

fn header(cfg: &RunConfig, command: &str) -> String {
    let mut out = format!("# xxchain {} {command}\n", env!("CARGO_PKG_VERSION"));
    for line in cfg.to_toml().lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str(&format!("# {line}\n"));
        }
    }
    out
}

fn render(
    cfg: &RunConfig,
    command: &str,
    columns: &[String],
    rows: &[Vec<String>],
) -> std::result::Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(columns).map_err(|e| CliError::Io(e.to_string()))?;
    for r in rows {
        w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
    }
    let body = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
    Ok(header(cfg, command) + &String::from_utf8(body).expect("csv output is utf-8"))
}

fn transport_columns() -> Vec<String> {
    ["j12", "j23", "q_left", "q_right", "heat_left", "heat_right"].map(String::from).to_vec()
}

fn transport_fields(row: &SteadyRow) -> Vec<String> {
    let r = &row.report;
    [r.j12, r.j23, r.q_left, r.q_right, row.heat_left, row.heat_right].map(num).to_vec()
}

pub fn cmd_steady(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let p = cfg.params()?;
    let rows =
        cfg.approach.approaches().iter().map(|&a| steady_row(&p, a, &cfg.lamb_shift)).collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["approach".to_string()];
    columns.extend((1..=8).map(|k| format!("mu_{k}")));
    columns.extend((0..8).map(|k| format!("diag_{k:03b}")));
    columns.extend(transport_columns());
    columns.extend(["q_left_scaled", "residual"].map(String::from));
    let records: Vec<Vec<String>> = rows
        .iter()
        .map(|row| {
            let mut rec = vec![row.approach.label().to_string()];
            rec.extend(row.mu.map(num));
            rec.extend(row.diag.map(num));
            rec.extend(transport_fields(row));
            rec.push(scaled_source(&p, row.report.q_left).map(num).unwrap_or_default());
            rec.push(num(row.residual));
            rec
        })
        .collect();
    render(cfg, "steady", &columns, &records)
}

/// One sweep point; a failure is recorded and the sweep continues.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub t_left: f64,
    pub g: f64,
    pub approach: Approach,
    pub outcome: std::result::Result<SteadyRow, Error>,
}

pub fn sweep_points(cfg: &RunConfig) -> std::result::Result<Vec<SweepPoint>, CliError> {
    let base = cfg.params()?;
    let mut grid = Vec::new();
    for t_left in cfg.sweep.t_left_values() {
        for g in cfg.sweep.g_values() {
            for &approach in cfg.approach.approaches() {
                grid.push((t_left, g, approach));
            }
        }
    }
    Ok(grid
        .into_par_iter()
        .map(|(t_left, g, approach)| {
            let p = base.with_g(g).with_temperatures(t_left, base.right.temperature);
            SweepPoint { t_left, g, approach, outcome: steady_row(&p, approach, &cfg.lamb_shift) }
        })
        .collect())
}

pub fn cmd_sweep(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let base = cfg.params()?;
    let points = sweep_points(cfg)?;
    let mut columns = ["t_left", "g", "approach"].map(String::from).to_vec();
    columns.extend(transport_columns());
    columns.extend(["q_left_scaled", "residual", "status", "error"].map(String::from));
    let records: Vec<Vec<String>> = points
        .iter()
        .map(|pt| {
            let mut rec = vec![num(pt.t_left), num(pt.g), pt.approach.label().to_string()];
            match &pt.outcome {
                Ok(row) => {
                    rec.extend(transport_fields(row));
                    rec.push(scaled_source(&base, row.report.q_left).map(num).unwrap_or_default());
                    rec.push(num(row.residual));
                    rec.extend(["0".to_string(), String::new()]);
                }
                Err(e) => {
                    rec.extend(std::iter::repeat_n(String::new(), 8));
                    rec.extend([CliError::exit_code_for(e).to_string(), e.to_string()]);
                }
            }
            rec
        })
        .collect();
    render(cfg, "sweep", &columns, &records)
}

pub fn cmd_evolve(cfg: &RunConfig) -> std::result::Result<String, CliError> {
    let p = cfg.params()?;
    let rho0 = cfg.evolve.initial.density()?;
    let times = uniform_times(cfg.evolve.t_max, cfg.evolve.n_points)?;
    let approaches = cfg.approach.approaches();
    let trajectories = approaches
        .iter()
        .map(|&a| propagate(&liouvillian(&p, a, &cfg.lamb_shift)?, &rho0, &times))
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["t".to_string()];
    for a in approaches {
        columns.extend([format!("j12_{}", a.label()), format!("j23_{}", a.label())]);
    }
    let records: Vec<Vec<String>> = times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let mut rec = vec![num(t)];
            for tr in &trajectories {
                rec.extend([num(tr.reports[i].j12), num(tr.reports[i].j23)]);
            }
            rec
        })
        .collect();
    render(cfg, "evolve", &columns, &records)
}

use serde_json::json;

use super::output::{destination, emit_residuals, emit_summary, emit_table, point_cells, point_columns};
use super::{Cell, CliError, OutputFormat, RunConfig, Table};
use crate::connections::{levi_civita_coeffs, pseudoconnection_coeffs};
use crate::curvature::curvature_at;
use crate::flows::flow_rhs;
use crate::verify::{run_suite, SuiteConfig};

fn columns(dim: usize, rest: &[&str]) -> Vec<String> {
    let mut c = point_columns(dim);
    c.extend(rest.iter().map(|s| s.to_string()));
    c
}

pub fn christoffel(cfg: &RunConfig) -> Result<(), CliError> {
    let family = cfg.family()?;
    let n = family.dim();
    let mut table = Table::new(columns(n, &["k", "i", "j", "value"]));
    for p in cfg.points(&family)? {
        let gamma = levi_civita_coeffs(&family.query_with_order(cfg.time, &p, 1)?.metric)?;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut row = point_cells(p.coords());
                    row.extend([Cell::Int(k), Cell::Int(i), Cell::Int(j), Cell::Num(gamma.get(k, i, j))]);
                    table.push(row);
                }
            }
        }
    }
    emit_table(&table, "christoffel", cfg)
}

pub fn curvature(cfg: &RunConfig) -> Result<(), CliError> {
    let family = cfg.family()?;
    let n = family.dim();
    let mut table = Table::new(columns(n, &["quantity", "i", "j", "value"]));
    for p in cfg.points(&family)? {
        let c = curvature_at(&family.query_with_order(cfg.time, &p, 2)?.metric)?;
        for i in 0..n {
            for j in 0..n {
                let mut row = point_cells(p.coords());
                row.extend([Cell::Text("ricci".into()), Cell::Int(i), Cell::Int(j), Cell::Num(c.ricci[(i, j)])]);
                table.push(row);
            }
        }
        let mut row = point_cells(p.coords());
        row.extend([Cell::Text("scalar".into()), Cell::Text(String::new()), Cell::Text(String::new()), Cell::Num(c.scalar)]);
        table.push(row);
    }
    emit_table(&table, "curvature", cfg)
}

pub fn pseudoconn(cfg: &RunConfig) -> Result<(), CliError> {
    let family = cfg.family()?;
    let n = family.dim();
    let mut table = Table::new(columns(n, &["part", "k", "i", "j", "value"]));
    for p in cfg.points(&family)? {
        let m = family.query(cfg.time, &p)?.metric;
        let q = pseudoconnection_coeffs(&m, &flow_rhs(cfg.map, &m)?)?;
        for k in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let mut row = point_cells(p.coords());
                    row.extend([
                        Cell::Text("coefficient".into()),
                        Cell::Int(k),
                        Cell::Int(i),
                        Cell::Int(j),
                        Cell::Num(q.coeffs[(k, i, j)]),
                    ]);
                    table.push(row);
                }
            }
        }
        for k in 0..n {
            for i in 0..n {
                let mut row = point_cells(p.coords());
                row.extend([
                    Cell::Text("principal".into()),
                    Cell::Int(k),
                    Cell::Int(i),
                    Cell::Text(String::new()),
                    Cell::Num(q.principal[(k, i)]),
                ]);
                table.push(row);
            }
        }
    }
    emit_table(&table, "pseudoconn", cfg)
}

pub fn flow(cfg: &RunConfig) -> Result<(), CliError> {
    let family = cfg.flow_family()?;
    let mut cols = vec!["t".to_string()];
    cols.extend(family.state_labels());
    let mut table = Table::new(cols);
    let (traj, halted) = match family.trajectory(cfg.horizon, cfg.flow_step()) {
        Ok(traj) => (traj, None),
        Err(halt) => (halt.partial, Some(halt.error)),
    };
    for (t, state) in traj.times.iter().zip(&traj.states) {
        let mut row = vec![Cell::Num(*t)];
        row.extend(family.state_summary(state).into_iter().map(Cell::Num));
        table.push(row);
    }
    emit_table(&table, "flow", cfg)?;
    match halted {
        None => Ok(()),
        Some(e) => Err(e.into()),
    }
}

pub fn verify(cfg: &RunConfig) -> Result<(), CliError> {
    let family = cfg.family()?;
    let suite = SuiteConfig { dt: cfg.dt, seed: cfg.seed, ..SuiteConfig::default() };
    let outcome = run_suite(&family, cfg.map, &suite)?;
    let summary = json!({
        "command": "verify",
        "family": cfg.family.name(),
        "result": outcome.summary,
    });
    let stem = format!("verify-{}", cfg.family.name());
    match (&cfg.out, &cfg.out_dir) {
        (None, Some(dir)) => {
            emit_residuals(&outcome.reports, family.dim(), Some(&dir.join(format!("{stem}.csv"))))?;
            emit_summary(&summary, Some(&dir.join(format!("{stem}.json"))))?;
        }
        _ => {
            let path = destination(cfg, &stem, cfg.format);
            match cfg.format {
                OutputFormat::Csv => emit_residuals(&outcome.reports, family.dim(), path.as_deref())?,
                OutputFormat::Summary => emit_summary(&summary, path.as_deref())?,
            }
        }
    }
    for c in &outcome.summary.criteria {
        let status = match (c.passed, c.gated) {
            (true, _) => "pass",
            (false, true) => "FAIL",
            (false, false) => "info",
        };
        eprintln!("{status:>4}  {:<22} {:.3e} (tol {:.0e}) {}", c.name, c.value, c.tolerance, c.detail);
    }
    if outcome.summary.passed {
        eprintln!("verify {} under {}: pass", cfg.family, cfg.map);
        Ok(())
    } else {
        let failed: Vec<&str> =
            outcome.summary.criteria.iter().filter(|c| c.gated && !c.passed).map(|c| c.name.as_str()).collect();
        Err(CliError::VerificationFailed(format!("{} under {}: {}", cfg.family, cfg.map, failed.join(", "))))
    }
}

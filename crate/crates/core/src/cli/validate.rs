use std::io::Write;

use crate::analysis::{mc_on_hand_with, mc_shortage_with, McReport};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::rng::{derive_seed, STREAM_VALIDATION};
use crate::solver::{grid_oracle_with, solve_with, InfeasibilityDiagnosis, OracleConfig, Solution};

use super::scenario::ScenarioFile;

pub const DEFAULT_MC_SAMPLES: usize = 1_000_000;
pub const ORACLE_2D_REL_TOL: f64 = 1e-3;
pub const ORACLE_4D_REL_TOL: f64 = 5e-3;
pub const KKT_TOL: f64 = 1e-6;
/// Monte Carlo checks pass when the estimate lies within this many standard
/// errors of the closed form.
pub const MC_Z_LIMIT: f64 = 4.0;

/// One row of the validation table. Values are kept as text so numeric and
/// categorical checks share the CSV layout.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: String,
    pub reference: String,
    pub tolerance: String,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
    /// Set when the scenario has no feasible point.
    pub infeasible: Option<InfeasibilityDiagnosis>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

pub const VALIDATE_CSV_HEADER: [&str; 5] = ["check", "value", "reference", "tolerance", "pass"];

fn rel_check(name: &str, value: f64, reference: f64, tol: f64) -> Check {
    let pass = (value - reference).abs() <= tol * reference.abs().max(1.0);
    Check {
        name: name.to_string(),
        value: value.to_string(),
        reference: reference.to_string(),
        tolerance: tol.to_string(),
        pass,
    }
}

fn same_check(name: &str, value: String, reference: String) -> Check {
    let pass = value == reference;
    Check { name: name.to_string(), value, reference, tolerance: String::new(), pass }
}

fn mc_check(name: String, r: &McReport) -> Check {
    Check {
        name,
        value: r.estimate.to_string(),
        reference: r.analytic.to_string(),
        tolerance: (MC_Z_LIMIT * r.std_error).to_string(),
        pass: r.z_score.abs() <= MC_Z_LIMIT,
    }
}

fn selection(s: &Solution) -> String {
    format!("{}/{}", s.decision.packaging, s.decision.environment)
}

fn causes(d: &InfeasibilityDiagnosis) -> String {
    d.causes.iter().map(|c| c.name()).collect::<Vec<_>>().join("+")
}

/// Cross-checks the exact solver against both grid oracles, re-checks its
/// KKT certificate and compares Monte Carlo estimates of the shortage and
/// on-hand expectations with their closed forms.
pub fn validate_scenario(file: &ScenarioFile, mc_samples: usize, exec: Execution) -> Result<ValidationReport> {
    let params = &file.params;
    let model = &file.model;
    let mut checks = Vec::new();
    let exact = match solve_with(params, model, exec) {
        Ok(s) => Ok(s),
        Err(Error::Infeasible(d)) => Err(d),
        Err(e) => return Err(e),
    };
    for (label, config, tol) in [
        ("oracle_2d", OracleConfig::decomposed(), ORACLE_2D_REL_TOL),
        ("oracle_4d", OracleConfig::full(), ORACLE_4D_REL_TOL),
    ] {
        let grid = grid_oracle_with(params, model, config, exec);
        match (&exact, grid) {
            (Ok(s), Ok(g)) => {
                checks.push(rel_check(&format!("{label}_total"), g.total(), s.total(), tol));
                checks.push(same_check(&format!("{label}_selection"), selection(&g), selection(s)));
            }
            (Err(d), Err(Error::Infeasible(gd))) => {
                checks.push(same_check(&format!("{label}_diagnosis"), causes(&gd), causes(d)));
            }
            (Ok(s), Err(Error::Infeasible(gd))) => {
                checks.push(same_check(&format!("{label}_diagnosis"), causes(&gd), selection(s)));
            }
            (Err(d), Ok(g)) => {
                checks.push(same_check(&format!("{label}_diagnosis"), selection(&g), causes(d)));
            }
            (_, Err(e)) => return Err(e),
        }
    }

    if let Ok(s) = &exact {
        checks.push(Check {
            name: "kkt_residual".to_string(),
            value: s.kkt_residual.to_string(),
            reference: "0".to_string(),
            tolerance: KKT_TOL.to_string(),
            pass: s.kkt_residual <= KKT_TOL,
        });
        let satisfied = s.constraint_report.entries.iter().filter(|e| e.satisfied).count();
        checks.push(same_check(
            "constraints_satisfied",
            satisfied.to_string(),
            s.constraint_report.entries.len().to_string(),
        ));
    }

    let demand = &params.lead_time_demand;
    let mut points: Vec<f64> = (0..5).map(|i| demand.lower + demand.width() * i as f64 / 4.0).collect();
    if let Ok(s) = &exact {
        points.push(s.decision.reorder_point);
    }
    let mut stream_index = 0;
    let mut next_seed = || {
        stream_index += 1;
        derive_seed(file.seed, STREAM_VALIDATION, stream_index)
    };
    for r in points {
        let rep = mc_shortage_with(r, demand, mc_samples, next_seed(), exec)?;
        checks.push(mc_check(format!("mc_shortage_R={r}"), &rep));
    }
    if let Ok(s) = &exact {
        let rep = mc_on_hand_with(s.decision.lot_size, s.decision.reorder_point, demand, mc_samples, next_seed(), exec)?;
        checks.push(mc_check("mc_on_hand".to_string(), &rep));
    }

    Ok(ValidationReport { checks, infeasible: exact.err() })
}

pub fn write_validate_csv<W: Write>(report: &ValidationReport, out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Numerical(format!("writing validation CSV: {e}"));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(VALIDATE_CSV_HEADER).map_err(err)?;
    for c in &report.checks {
        w.write_record([c.name.as_str(), &c.value, &c.reference, &c.tolerance, if c.pass { "true" } else { "false" }])
            .map_err(err)?;
    }
    w.flush().map_err(|e| Error::Numerical(format!("writing validation CSV: {e}")))?;
    Ok(())
}

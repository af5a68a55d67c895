use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::Path;

use crate::analysis::{SweepResult, TrendVerdict};
use crate::error::{Error, Result};
use crate::model::{cost_breakdown, DecisionVector, ScenarioParameters};
use crate::quality::FitReport;
use crate::solver::{CombinationStatus, InfeasibilityDiagnosis, Solution};

use super::validate::ValidationReport;

/// Writes through a temporary file in the target directory and renames it
/// into place, so readers never observe a partial file.
pub fn write_atomic<F>(path: &Path, fill: F) -> io::Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    {
        let mut buf = io::BufWriter::new(tmp.as_file_mut());
        fill(&mut buf).map_err(io::Error::other)?;
        buf.flush()?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

pub const SOLUTION_CSV_HEADER: [&str; 18] = [
    "packaging",
    "environment",
    "status",
    "selected",
    "total",
    "Q",
    "R",
    "T",
    "HU",
    "ordering",
    "holding",
    "shortage",
    "temperature",
    "humidity",
    "pack_cost",
    "env_cost",
    "binding_quality",
    "diagnosis",
];

/// One row per (packaging, environment) pair in lexicographic order.
pub fn write_solution_csv<W: Write>(params: &ScenarioParameters, solution: &Solution, out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Numerical(format!("writing solution CSV: {e}"));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SOLUTION_CSV_HEADER).map_err(err)?;
    for c in &solution.combinations {
        let selected =
            c.packaging == solution.decision.packaging && c.environment == solution.decision.environment;
        let mut row = vec![c.packaging.to_string(), c.environment.to_string()];
        match &c.status {
            CombinationStatus::Optimal { climate, lot, .. } => {
                let d = DecisionVector::new(
                    lot.lot_size,
                    lot.reorder_point,
                    climate.temperature,
                    climate.humidity,
                    c.packaging,
                    c.environment,
                )?;
                let b = cost_breakdown(params, &d)?;
                row.push("optimal".into());
                row.push(selected.to_string());
                row.extend(
                    [b.total, d.lot_size, d.reorder_point, d.temperature, d.humidity]
                        .into_iter()
                        .chain(b.components())
                        .map(|v| v.to_string()),
                );
                row.push(climate.binding.to_string());
                row.push(String::new());
            }
            CombinationStatus::Infeasible(causes) => {
                row.push("infeasible".into());
                row.push("false".into());
                row.extend(std::iter::repeat_n(String::new(), 13));
                row.push(causes.iter().map(|c| c.name()).collect::<Vec<_>>().join("+"));
            }
        }
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Numerical(format!("writing solution CSV: {e}")))?;
    Ok(())
}

pub fn solution_report(solution: &Solution) -> String {
    let d = &solution.decision;
    let b = &solution.breakdown;
    let mut s = String::new();
    let _ = writeln!(s, "optimal policy");
    let _ = writeln!(s, "  lot size Q        {:>14.6} kg", d.lot_size);
    let _ = writeln!(s, "  reorder point R   {:>14.6} kg", d.reorder_point);
    let _ = writeln!(s, "  temperature T     {:>14.6} °C", d.temperature);
    let _ = writeln!(s, "  humidity HU       {:>14.6} %", d.humidity);
    let _ = writeln!(s, "  packaging         {:>14}", d.packaging);
    let _ = writeln!(s, "  environment       {:>14}", d.environment);
    let _ = writeln!(s, "annual cost");
    for (name, v) in [
        ("ordering", b.ordering),
        ("holding", b.holding),
        ("shortage", b.shortage),
        ("temperature", b.temperature),
        ("humidity", b.humidity),
        ("packaging", b.packaging),
        ("environment", b.environment),
    ] {
        let _ = writeln!(s, "  {name:<18}{v:>14.6}");
    }
    let _ = writeln!(s, "  {:<18}{:>14.6}", "total", b.total);
    let _ = writeln!(s, "constraints");
    for e in &solution.constraint_report.entries {
        let state = if !e.satisfied {
            "VIOLATED"
        } else if e.is_active() {
            "active"
        } else {
            ""
        };
        let _ = writeln!(s, "  {:<14} lhs {:>14.6}  bound {:>14.6}  slack {:>14.6}  {state}", e.id.name(), e.lhs, e.bound, e.slack);
    }
    let _ = writeln!(s, "kkt residual {:e}", solution.kkt_residual);
    let _ = writeln!(s, "combinations");
    let _ = writeln!(s, "  pkg env  status            total");
    for c in &solution.combinations {
        let mark = if c.packaging == d.packaging && c.environment == d.environment { "*" } else { " " };
        match &c.status {
            CombinationStatus::Optimal { total, .. } => {
                let _ = writeln!(s, "{mark} {:>3} {:>3}  optimal    {total:>14.6}", c.packaging, c.environment);
            }
            CombinationStatus::Infeasible(causes) => {
                let names: Vec<&str> = causes.iter().map(|c| c.name()).collect();
                let _ = writeln!(s, "{mark} {:>3} {:>3}  infeasible ({})", c.packaging, c.environment, names.join(", "));
            }
        }
    }
    s
}

pub fn diagnosis_report(d: &InfeasibilityDiagnosis) -> String {
    let mut s = String::from("infeasible\n");
    for c in &d.causes {
        let _ = writeln!(s, "  {c}");
        let _ = writeln!(s, "  witness {}: {}", c.name(), c.witness());
    }
    s
}

pub fn sweep_report(result: &SweepResult, verdicts: &[(TrendVerdict, Option<String>)]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "sweep over {} ({} points)", result.parameter, result.points.len());
    for p in &result.points {
        match p.total() {
            Some(t) => {
                let _ = writeln!(s, "  {:>14.6}  optimal    {t:>14.6}", p.value);
            }
            None => {
                let _ = writeln!(s, "  {:>14.6}  infeasible", p.value);
            }
        }
    }
    for (v, note) in verdicts {
        let mut line = format!("{}={}", v.direction.name(), v.holds);
        if let Some(i) = v.first_violation {
            let _ = write!(line, " (first violation at {} = {})", result.parameter, result.points[i].value);
        }
        if let Some(n) = note {
            let _ = write!(line, " [{n}]");
        }
        let _ = writeln!(s, "{line}");
    }
    s
}

pub fn fit_report(r: &FitReport) -> String {
    let m = &r.model;
    let mut s = String::new();
    let _ = writeln!(s, "rows          {}", r.n_rows);
    let _ = writeln!(s, "x1 (T)        {}", m.x1);
    let _ = writeln!(s, "x2 (HU)       {}", m.x2);
    let _ = writeln!(s, "x3 (pkg)      {}", m.x3);
    let _ = writeln!(s, "x4 (env)      {}", m.x4);
    let _ = writeln!(s, "intercept     {}", m.intercept);
    let _ = writeln!(s, "r_squared     {}", r.r_squared);
    let _ = writeln!(s, "residual_std  {}", r.residual_std);
    s
}

pub fn validation_report(r: &ValidationReport) -> String {
    let mut s = String::new();
    let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for c in &r.checks {
        let _ = writeln!(
            s,
            "{}  {:<width$}  value {}  reference {}{}",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.reference,
            if c.tolerance.is_empty() { String::new() } else { format!("  tolerance {}", c.tolerance) },
        );
    }
    let failed = r.checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(s, "{} checks, {failed} failed", r.checks.len());
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::baseline;
    use crate::model::QualityModel;
    use crate::solver::solve;

    #[test]
    fn solution_csv_rows_match_solution() {
        let p = baseline();
        let s = solve(&p, &QualityModel::BASELINE).unwrap();
        let mut buf = Vec::new();
        write_solution_csv(&p, &s, &mut buf).unwrap();
        let mut rdr = csv::Reader::from_reader(&buf[..]);
        assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SOLUTION_CSV_HEADER);
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 9);
        let selected: Vec<_> = rows.iter().filter(|r| &r[3] == "true").collect();
        assert_eq!(selected.len(), 1);
        let row = selected[0];
        assert_eq!(row[0].parse::<u8>().unwrap(), s.decision.packaging.value());
        assert_eq!(row[4].parse::<f64>().unwrap(), s.total());
        assert_eq!(row[5].parse::<f64>().unwrap(), s.decision.lot_size);
        for r in &rows {
            if &r[2] == "optimal" {
                let parts: f64 = (9..16).map(|i| r[i].parse::<f64>().unwrap()).sum();
                let total: f64 = r[4].parse().unwrap();
                assert!((parts - total).abs() <= 1e-9 * total);
            }
        }
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        std::fs::write(&path, "old").unwrap();
        write_atomic(&path, |w| {
            w.write_all(b"new").map_err(|e| Error::Numerical(e.to_string()))
        })
        .unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new");
        let failed = write_atomic(&path, |_| Err(Error::Numerical("boom".into())));
        assert!(failed.is_err());
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "new");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}

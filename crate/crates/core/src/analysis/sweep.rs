use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{expected_on_hand, QualityModel, ScenarioParameters};
use crate::solver::{solve_with, InfeasibilityDiagnosis, Solution};

/// A scalar scenario parameter that can be swept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parameter {
    AnnualDemand,
    OrderingCost,
    HoldingCost,
    ShortagePenalty,
    TempVarCost,
    HumVarCost,
    TempFixedCost,
    HumFixedCost,
    MaxAvgShortage,
    MinQuality,
    SpacePerUnit,
    Capacity,
    MaxOrders,
    TempUpper,
    TempLower,
    HumUpper,
    HumLower,
    ReorderLower,
    ReorderUpper,
    PackagingCost(usize),
    EnvironmentCost(usize),
}

impl Parameter {
    pub const ALL: [Parameter; 25] = [
        Parameter::AnnualDemand,
        Parameter::OrderingCost,
        Parameter::HoldingCost,
        Parameter::ShortagePenalty,
        Parameter::TempVarCost,
        Parameter::HumVarCost,
        Parameter::TempFixedCost,
        Parameter::HumFixedCost,
        Parameter::MaxAvgShortage,
        Parameter::MinQuality,
        Parameter::SpacePerUnit,
        Parameter::Capacity,
        Parameter::MaxOrders,
        Parameter::TempUpper,
        Parameter::TempLower,
        Parameter::HumUpper,
        Parameter::HumLower,
        Parameter::ReorderLower,
        Parameter::ReorderUpper,
        Parameter::PackagingCost(0),
        Parameter::PackagingCost(1),
        Parameter::PackagingCost(2),
        Parameter::EnvironmentCost(0),
        Parameter::EnvironmentCost(1),
        Parameter::EnvironmentCost(2),
    ];

    /// Short symbol used on the command line and in sweep CSV files.
    pub fn id(self) -> &'static str {
        match self {
            Parameter::AnnualDemand => "D",
            Parameter::OrderingCost => "A",
            Parameter::HoldingCost => "h",
            Parameter::ShortagePenalty => "pi",
            Parameter::TempVarCost => "e",
            Parameter::HumVarCost => "k",
            Parameter::TempFixedCost => "b",
            Parameter::HumFixedCost => "d",
            Parameter::MaxAvgShortage => "B",
            Parameter::MinQuality => "Qual",
            Parameter::SpacePerUnit => "f",
            Parameter::Capacity => "F",
            Parameter::MaxOrders => "n",
            Parameter::TempUpper => "Tu",
            Parameter::TempLower => "Tl",
            Parameter::HumUpper => "HUu",
            Parameter::HumLower => "HUl",
            Parameter::ReorderLower => "Rl",
            Parameter::ReorderUpper => "Ru",
            Parameter::PackagingCost(0) => "M1",
            Parameter::PackagingCost(1) => "M2",
            Parameter::PackagingCost(_) => "M3",
            Parameter::EnvironmentCost(0) => "N1",
            Parameter::EnvironmentCost(1) => "N2",
            Parameter::EnvironmentCost(_) => "N3",
        }
    }

    /// Field name in the scenario file.
    pub fn long_name(self) -> &'static str {
        match self {
            Parameter::AnnualDemand => "annual_demand",
            Parameter::OrderingCost => "ordering_cost",
            Parameter::HoldingCost => "holding_cost",
            Parameter::ShortagePenalty => "shortage_penalty",
            Parameter::TempVarCost => "temp_var_cost",
            Parameter::HumVarCost => "hum_var_cost",
            Parameter::TempFixedCost => "temp_fixed_cost",
            Parameter::HumFixedCost => "hum_fixed_cost",
            Parameter::MaxAvgShortage => "max_avg_shortage",
            Parameter::MinQuality => "min_quality",
            Parameter::SpacePerUnit => "space_per_unit",
            Parameter::Capacity => "capacity",
            Parameter::MaxOrders => "max_orders",
            Parameter::TempUpper => "temp_upper",
            Parameter::TempLower => "temp_lower",
            Parameter::HumUpper => "hum_upper",
            Parameter::HumLower => "hum_lower",
            Parameter::ReorderLower => "reorder_lower",
            Parameter::ReorderUpper => "reorder_upper",
            Parameter::PackagingCost(0) => "packaging_cost_1",
            Parameter::PackagingCost(1) => "packaging_cost_2",
            Parameter::PackagingCost(_) => "packaging_cost_3",
            Parameter::EnvironmentCost(0) => "environment_cost_1",
            Parameter::EnvironmentCost(1) => "environment_cost_2",
            Parameter::EnvironmentCost(_) => "environment_cost_3",
        }
    }

    pub fn get(self, p: &ScenarioParameters) -> f64 {
        match self {
            Parameter::AnnualDemand => p.annual_demand,
            Parameter::OrderingCost => p.ordering_cost,
            Parameter::HoldingCost => p.holding_cost,
            Parameter::ShortagePenalty => p.shortage_penalty,
            Parameter::TempVarCost => p.temp_var_cost,
            Parameter::HumVarCost => p.hum_var_cost,
            Parameter::TempFixedCost => p.temp_fixed_cost,
            Parameter::HumFixedCost => p.hum_fixed_cost,
            Parameter::MaxAvgShortage => p.max_avg_shortage,
            Parameter::MinQuality => p.min_quality,
            Parameter::SpacePerUnit => p.space_per_unit,
            Parameter::Capacity => p.capacity,
            Parameter::MaxOrders => p.max_orders,
            Parameter::TempUpper => p.temp_upper,
            Parameter::TempLower => p.temp_lower,
            Parameter::HumUpper => p.hum_upper,
            Parameter::HumLower => p.hum_lower,
            Parameter::ReorderLower => p.reorder_lower,
            Parameter::ReorderUpper => p.reorder_upper,
            Parameter::PackagingCost(j) => p.packaging_costs[j],
            Parameter::EnvironmentCost(j) => p.environment_costs[j],
        }
    }

    pub fn set(self, p: &mut ScenarioParameters, v: f64) {
        let slot = match self {
            Parameter::AnnualDemand => &mut p.annual_demand,
            Parameter::OrderingCost => &mut p.ordering_cost,
            Parameter::HoldingCost => &mut p.holding_cost,
            Parameter::ShortagePenalty => &mut p.shortage_penalty,
            Parameter::TempVarCost => &mut p.temp_var_cost,
            Parameter::HumVarCost => &mut p.hum_var_cost,
            Parameter::TempFixedCost => &mut p.temp_fixed_cost,
            Parameter::HumFixedCost => &mut p.hum_fixed_cost,
            Parameter::MaxAvgShortage => &mut p.max_avg_shortage,
            Parameter::MinQuality => &mut p.min_quality,
            Parameter::SpacePerUnit => &mut p.space_per_unit,
            Parameter::Capacity => &mut p.capacity,
            Parameter::MaxOrders => &mut p.max_orders,
            Parameter::TempUpper => &mut p.temp_upper,
            Parameter::TempLower => &mut p.temp_lower,
            Parameter::HumUpper => &mut p.hum_upper,
            Parameter::HumLower => &mut p.hum_lower,
            Parameter::ReorderLower => &mut p.reorder_lower,
            Parameter::ReorderUpper => &mut p.reorder_upper,
            Parameter::PackagingCost(j) => &mut p.packaging_costs[j],
            Parameter::EnvironmentCost(j) => &mut p.environment_costs[j],
        };
        *slot = v;
    }
}

impl FromStr for Parameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = if s == "π" { "pi" } else { s };
        Parameter::ALL
            .into_iter()
            .find(|p| p.id() == s || p.long_name() == s)
            .ok_or_else(|| {
                let ids: Vec<&str> = Parameter::ALL.iter().map(|p| p.id()).collect();
                Error::domain(format!("unknown sweep parameter `{s}` (expected one of {})", ids.join(", ")))
            })
    }
}

impl fmt::Display for Parameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Linear sweep of one parameter over `steps` equally spaced values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepSpec {
    pub parameter: Parameter,
    pub from: f64,
    pub to: f64,
    pub steps: usize,
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.from.is_finite() && self.to.is_finite()) || self.from == self.to {
            return Err(Error::domain(format!("sweep needs distinct finite ends, got {} → {}", self.from, self.to)));
        }
        if self.steps < 2 {
            return Err(Error::domain(format!("sweep needs at least 2 steps, got {}", self.steps)));
        }
        Ok(())
    }

    /// Swept values in ascending order; both ends are hit exactly.
    pub fn values(&self) -> Vec<f64> {
        let (lo, hi) = if self.from < self.to { (self.from, self.to) } else { (self.to, self.from) };
        let last = self.steps - 1;
        (0..self.steps)
            .map(|i| if i == last { hi } else { lo + (hi - lo) * i as f64 / last as f64 })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PointOutcome {
    Optimal(Box<Solution>),
    Infeasible(InfeasibilityDiagnosis),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub value: f64,
    pub outcome: PointOutcome,
    /// Expected on-hand stock `Q/2 + R − μ` at the optimum.
    pub on_hand: Option<f64>,
}

impl SweepPoint {
    pub fn solution(&self) -> Option<&Solution> {
        match &self.outcome {
            PointOutcome::Optimal(s) => Some(s),
            PointOutcome::Infeasible(_) => None,
        }
    }

    pub fn total(&self) -> Option<f64> {
        self.solution().map(|s| s.total())
    }

    pub fn status(&self) -> &'static str {
        match self.outcome {
            PointOutcome::Optimal(_) => "optimal",
            PointOutcome::Infeasible(_) => "infeasible",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub parameter: Parameter,
    /// Ascending in `value`.
    pub points: Vec<SweepPoint>,
}

pub fn sweep(params: &ScenarioParameters, model: &QualityModel, spec: &SweepSpec) -> Result<SweepResult> {
    sweep_with(params, model, spec, Execution::default())
}

/// Re-solves the scenario at every swept value. Infeasible points are kept
/// with their diagnosis.
pub fn sweep_with(
    params: &ScenarioParameters,
    model: &QualityModel,
    spec: &SweepSpec,
    exec: Execution,
) -> Result<SweepResult> {
    spec.validate()?;
    let scenarios: Vec<(f64, ScenarioParameters)> = spec
        .values()
        .into_iter()
        .map(|v| {
            let mut p = params.clone();
            spec.parameter.set(&mut p, v);
            p.validate()
                .map_err(|e| Error::domain(format!("{} = {v}: {e}", spec.parameter)))
                .map(|_| (v, p))
        })
        .collect::<Result<_>>()?;
    let points = exec.map_slice(&scenarios, |(value, p)| {
        let outcome = match solve_with(p, model, exec) {
            Ok(s) => PointOutcome::Optimal(Box::new(s)),
            Err(Error::Infeasible(d)) => PointOutcome::Infeasible(d),
            Err(e) => return Err(e),
        };
        let on_hand = match &outcome {
            PointOutcome::Optimal(s) => Some(expected_on_hand(
                s.decision.lot_size,
                s.decision.reorder_point,
                &p.lead_time_demand,
            )?),
            PointOutcome::Infeasible(_) => None,
        };
        Ok(SweepPoint { value: *value, outcome, on_hand })
    });
    Ok(SweepResult { parameter: spec.parameter, points: points.into_iter().collect::<Result<_>>()? })
}

pub const SWEEP_CSV_HEADER: [&str; 18] = [
    "param",
    "value",
    "status",
    "total",
    "Q",
    "R",
    "T",
    "HU",
    "packaging",
    "environment",
    "ordering",
    "holding",
    "shortage",
    "temperature",
    "humidity",
    "pack_cost",
    "env_cost",
    "kkt_residual",
];

/// One row per point. Numeric fields of infeasible points are left empty.
pub fn write_sweep_csv<W: Write>(result: &SweepResult, out: W) -> Result<()> {
    let err = |e: csv::Error| Error::Numerical(format!("writing sweep CSV: {e}"));
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(SWEEP_CSV_HEADER).map_err(err)?;
    for p in &result.points {
        let mut row = vec![result.parameter.id().to_string(), p.value.to_string(), p.status().to_string()];
        match p.solution() {
            Some(s) => {
                let d = &s.decision;
                let c = &s.breakdown;
                row.extend([
                    c.total.to_string(),
                    d.lot_size.to_string(),
                    d.reorder_point.to_string(),
                    d.temperature.to_string(),
                    d.humidity.to_string(),
                    d.packaging.to_string(),
                    d.environment.to_string(),
                    c.ordering.to_string(),
                    c.holding.to_string(),
                    c.shortage.to_string(),
                    c.temperature.to_string(),
                    c.humidity.to_string(),
                    c.packaging.to_string(),
                    c.environment.to_string(),
                    s.kkt_residual.to_string(),
                ]);
            }
            None => row.extend(std::iter::repeat_n(String::new(), 15)),
        }
        w.write_record(&row).map_err(err)?;
    }
    w.flush().map_err(|e| Error::Numerical(format!("writing sweep CSV: {e}")))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::baseline;

    #[test]
    fn parameter_ids_round_trip() {
        for p in Parameter::ALL {
            assert_eq!(p.id().parse::<Parameter>().unwrap(), p);
            assert_eq!(p.long_name().parse::<Parameter>().unwrap(), p);
        }
        assert_eq!("π".parse::<Parameter>().unwrap(), Parameter::ShortagePenalty);
        assert!("mu".parse::<Parameter>().is_err());
    }

    #[test]
    fn values_are_ascending_and_hit_ends() {
        let s = SweepSpec { parameter: Parameter::HoldingCost, from: 24.0, to: 12.0, steps: 13 };
        let v = s.values();
        assert_eq!(v.len(), 13);
        assert_eq!((v[0], v[12]), (12.0, 24.0));
        assert_eq!(v[6], 18.0);
        assert!(v.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn spec_validation() {
        let p = baseline();
        let m = QualityModel::BASELINE;
        let s = SweepSpec { parameter: Parameter::HoldingCost, from: 12.0, to: 12.0, steps: 3 };
        assert!(sweep(&p, &m, &s).is_err());
        let s = SweepSpec { parameter: Parameter::HoldingCost, from: 12.0, to: 13.0, steps: 1 };
        assert!(sweep(&p, &m, &s).is_err());
        // Tl pushed past Tu is an invalid scenario, not an infeasible one
        let s = SweepSpec { parameter: Parameter::TempLower, from: 0.0, to: 10.0, steps: 3 };
        assert!(sweep(&p, &m, &s).is_err());
    }

    #[test]
    fn infeasible_points_are_kept() {
        let p = baseline();
        let s = SweepSpec { parameter: Parameter::MinQuality, from: 100.0, to: 110.0, steps: 3 };
        let r = sweep(&p, &QualityModel::BASELINE, &s).unwrap();
        assert_eq!(r.points.len(), 3);
        assert_eq!(r.points[0].status(), "optimal");
        assert_eq!(r.points[2].status(), "infeasible");
    }

    #[test]
    fn csv_has_stable_columns_and_parses_back() {
        let p = baseline();
        let s = SweepSpec { parameter: Parameter::MinQuality, from: 100.0, to: 110.0, steps: 3 };
        let r = sweep(&p, &QualityModel::BASELINE, &s).unwrap();
        let mut buf = Vec::new();
        write_sweep_csv(&r, &mut buf).unwrap();
        let mut rdr = csv::Reader::from_reader(&buf[..]);
        assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), SWEEP_CSV_HEADER);
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert_eq!(rows.len(), 3);
        let sol = r.points[0].solution().unwrap();
        assert_eq!(rows[0][3].parse::<f64>().unwrap(), sol.total());
        assert_eq!(rows[0][4].parse::<f64>().unwrap(), sol.decision.lot_size);
        assert_eq!(rows[0][17].parse::<f64>().unwrap(), sol.kkt_residual);
        assert_eq!(&rows[2][2], "infeasible");
        assert_eq!(&rows[2][3], "");
    }
}

//! Exact solution of the mixed-integer model.
//!
//! The two categorical choices give nine (packaging, environment) pairs. For
//! a fixed pair the climate variables only enter the objective through the
//! per-cycle cost `e(Tu − T) + k(HUu − HU)` (scaled by `D/Q > 0`) and the
//! quality constraint, so they are found by a two-variable LP
//! ([`solve_climate`]) independent of the lot variables. What remains is a
//! convex program in `(Q, R)` ([`solve_lot`]). The cheapest feasible pair
//! wins, ties going to the lexicographically smaller pair.

mod climate;
mod kkt;
mod lot;
mod oracle;

pub use climate::{solve_climate, ClimateResult};
pub use kkt::kkt_residual;
pub use lot::{lot_active_set, solve_lot, LotConstraint, LotResult};
pub use oracle::{grid_lot, grid_oracle, grid_oracle_with, OracleConfig, OracleMode};

use std::fmt;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{
    cost_breakdown, evaluate_constraints, max_achievable_quality, tolerance, ConstraintReport,
    CostBreakdown, DecisionVector, Level, QualityModel, ScenarioParameters,
};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InfeasibilityCause {
    /// Even the best corner of the climate box misses the quality threshold.
    QualityUnreachable { max_quality: f64, required: f64 },
    /// The smallest lot allowed by the order limit plus the smallest reorder
    /// point does not fit in storage.
    FrequencyVsSpace { required_space: f64, capacity: f64 },
    /// The lowest average yearly shortage over the space- and
    /// frequency-feasible `(Q, R)` region is above the limit.
    ShortageUnreachable { min_avg_shortage: f64, limit: f64 },
}

impl InfeasibilityCause {
    pub fn name(&self) -> &'static str {
        match self {
            InfeasibilityCause::QualityUnreachable { .. } => "quality_unreachable",
            InfeasibilityCause::FrequencyVsSpace { .. } => "frequency_vs_space",
            InfeasibilityCause::ShortageUnreachable { .. } => "shortage_unreachable",
        }
    }

    /// The number that demonstrates the cause.
    pub fn witness(&self) -> f64 {
        match *self {
            InfeasibilityCause::QualityUnreachable { max_quality, .. } => max_quality,
            InfeasibilityCause::FrequencyVsSpace { required_space, .. } => required_space,
            InfeasibilityCause::ShortageUnreachable { min_avg_shortage, .. } => min_avg_shortage,
        }
    }
}

impl fmt::Display for InfeasibilityCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            InfeasibilityCause::QualityUnreachable { max_quality, required } => write!(
                f,
                "quality_unreachable: best reachable quality {max_quality} < required {required}"
            ),
            InfeasibilityCause::FrequencyVsSpace { required_space, capacity } => write!(
                f,
                "frequency_vs_space: f·(D/n + Rl) = {required_space} > capacity {capacity}"
            ),
            InfeasibilityCause::ShortageUnreachable { min_avg_shortage, limit } => write!(
                f,
                "shortage_unreachable: lowest average shortage {min_avg_shortage} > limit {limit}"
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct InfeasibilityDiagnosis {
    pub causes: Vec<InfeasibilityCause>,
}

impl InfeasibilityDiagnosis {
    pub fn has(&self, name: &str) -> bool {
        self.causes.iter().any(|c| c.name() == name)
    }
}

impl fmt::Display for InfeasibilityDiagnosis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.causes.iter().map(|c| c.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum CombinationStatus {
    Optimal { climate: ClimateResult, lot: LotResult, total: f64 },
    Infeasible(Vec<InfeasibilityCause>),
}

/// Outcome of one (packaging, environment) subproblem.
#[derive(Debug, Clone, PartialEq)]
pub struct CombinationOutcome {
    pub packaging: Level,
    pub environment: Level,
    pub status: CombinationStatus,
}

impl CombinationOutcome {
    pub fn total(&self) -> Option<f64> {
        match self.status {
            CombinationStatus::Optimal { total, .. } => Some(total),
            CombinationStatus::Infeasible(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub decision: DecisionVector,
    pub breakdown: CostBreakdown,
    pub constraint_report: ConstraintReport,
    pub kkt_residual: f64,
    /// All nine subproblems in lexicographic (packaging, environment) order.
    pub combinations: Vec<CombinationOutcome>,
}

impl Solution {
    pub fn total(&self) -> f64 {
        self.breakdown.total
    }
}

/// The nine (packaging, environment) pairs in lexicographic order.
pub fn combinations() -> [(Level, Level); 9] {
    let mut out = [(Level::One, Level::One); 9];
    for (i, pkg) in Level::ALL.into_iter().enumerate() {
        for (j, env) in Level::ALL.into_iter().enumerate() {
            out[3 * i + j] = (pkg, env);
        }
    }
    out
}

/// Per-cycle cost that does not depend on `(Q, R)` for a given pair and
/// climate: `A + b + d + e(Tu − T) + k(HUu − HU) + M + N`.
pub(crate) fn per_cycle_cost(params: &ScenarioParameters, climate_var: f64, pkg: Level, env: Level) -> f64 {
    params.ordering_cost
        + params.temp_fixed_cost
        + params.hum_fixed_cost
        + climate_var
        + params.selection_cost(pkg, env)
}

pub fn solve(params: &ScenarioParameters, model: &QualityModel) -> Result<Solution> {
    solve_with(params, model, Execution::default())
}

pub fn solve_with(params: &ScenarioParameters, model: &QualityModel, exec: Execution) -> Result<Solution> {
    params.validate()?;
    model.validate()?;
    let combos = combinations();
    let outcomes: Vec<Result<CombinationOutcome>> = exec.map_slice(&combos, |&(pkg, env)| {
        let status = match solve_climate(params, model, pkg, env) {
            Err(Error::Infeasible(d)) => CombinationStatus::Infeasible(d.causes),
            Err(e) => return Err(e),
            Ok(climate) => {
                let a_eff = per_cycle_cost(params, climate.variable_cost, pkg, env);
                match solve_lot(params, a_eff) {
                    Ok(lot) => CombinationStatus::Optimal { climate, total: lot.cost, lot },
                    Err(Error::Infeasible(d)) => CombinationStatus::Infeasible(d.causes),
                    Err(e) => return Err(e),
                }
            }
        };
        Ok(CombinationOutcome { packaging: pkg, environment: env, status })
    });
    let outcomes: Vec<CombinationOutcome> = outcomes.into_iter().collect::<Result<_>>()?;
    let winner = pick_winner(&outcomes).ok_or_else(|| infeasible(params, model, &outcomes))?;
    let CombinationStatus::Optimal { climate, lot, .. } = &outcomes[winner].status else {
        unreachable!("winner is optimal")
    };
    let decision = DecisionVector::new(
        lot.lot_size,
        lot.reorder_point,
        climate.temperature,
        climate.humidity,
        outcomes[winner].packaging,
        outcomes[winner].environment,
    )?;
    finish(params, model, decision, outcomes)
}

/// Index of the cheapest optimal outcome; earlier entries win ties.
pub(crate) fn pick_winner(outcomes: &[CombinationOutcome]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, o) in outcomes.iter().enumerate() {
        if let Some(t) = o.total() {
            match best {
                Some((_, bt)) if t >= bt - 1e-12 * bt.abs().max(1.0) => {}
                _ => best = Some((i, t)),
            }
        }
    }
    best.map(|(i, _)| i)
}

pub(crate) fn infeasible(
    params: &ScenarioParameters,
    model: &QualityModel,
    outcomes: &[CombinationOutcome],
) -> Error {
    let mut diag = diagnose_infeasibility(params, model);
    if diag.causes.is_empty() {
        for o in outcomes {
            if let CombinationStatus::Infeasible(causes) = &o.status {
                for c in causes {
                    if !diag.has(c.name()) {
                        diag.causes.push(*c);
                    }
                }
            }
        }
    }
    Error::Infeasible(diag)
}

pub(crate) fn finish(
    params: &ScenarioParameters,
    model: &QualityModel,
    decision: DecisionVector,
    combinations: Vec<CombinationOutcome>,
) -> Result<Solution> {
    let breakdown = cost_breakdown(params, &decision)?;
    let constraint_report = evaluate_constraints(params, model, &decision);
    if !constraint_report.all_satisfied() {
        let bad: Vec<&str> = constraint_report.violated().map(|e| e.id.name()).collect();
        return Err(Error::Numerical(format!("solution violates {}", bad.join(", "))));
    }
    let kkt_residual = kkt_residual(params, model, &decision)?;
    Ok(Solution { decision, breakdown, constraint_report, kkt_residual, combinations })
}

/// Lowest `(D/Q)·S(R)` over `D/n ≤ Q`, `Q + R ≤ F/f`, `Rl ≤ R ≤ Ru`, or
/// `None` when that region is empty.
///
/// For fixed `R` the largest admissible `Q = F/f − R` is best. With
/// `y = u − R` and `c = F/f − u` the remaining one-dimensional function is
/// proportional to `y² / (c + y)`, whose only stationary point is `y = −2c`.
pub(crate) fn min_avg_shortage(params: &ScenarioParameters) -> Option<f64> {
    let stock = params.max_stock();
    let lo = params.reorder_lower;
    let hi = params.reorder_upper.min(stock - params.min_lot());
    if hi < lo {
        return None;
    }
    let demand = &params.lead_time_demand;
    let rate = |r: f64| params.annual_demand * crate::model::shortage_unchecked(r, demand) / (stock - r);
    let mut best = rate(lo).min(rate(hi));
    let stationary = 2.0 * stock - demand.upper;
    if stationary > lo && stationary < hi {
        best = best.min(rate(stationary));
    }
    Some(best)
}

/// Explains why no (packaging, environment) pair is feasible using
/// relaxations that drop all but one group of constraints.
pub fn diagnose_infeasibility(params: &ScenarioParameters, model: &QualityModel) -> InfeasibilityDiagnosis {
    let mut causes = Vec::new();
    let best = max_achievable_quality(model, params);
    if best.score < params.min_quality - tolerance(params.min_quality) {
        causes.push(InfeasibilityCause::QualityUnreachable {
            max_quality: best.score,
            required: params.min_quality,
        });
    }
    let required_space = params.space_per_unit * (params.min_lot() + params.reorder_lower);
    if required_space > params.capacity + tolerance(params.capacity) {
        causes.push(InfeasibilityCause::FrequencyVsSpace { required_space, capacity: params.capacity });
    } else if let Some(min_rate) = min_avg_shortage(params) {
        if min_rate > params.max_avg_shortage + tolerance(params.max_avg_shortage) {
            causes.push(InfeasibilityCause::ShortageUnreachable {
                min_avg_shortage: min_rate,
                limit: params.max_avg_shortage,
            });
        }
    }
    InfeasibilityDiagnosis { causes }
}

use std::fmt;

use super::cost::shortage_unchecked;
use super::{DecisionVector, LeadTimeDemand, Level, QualityModel, ScenarioParameters};

/// Feasibility tolerance for a constraint with right-hand side `bound`.
pub fn tolerance(bound: f64) -> f64 {
    1e-6 * bound.abs().max(1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ConstraintId {
    Quality,
    AvgShortage,
    Space,
    Frequency,
    TempBox,
    HumBox,
    ReorderBox,
    Positivity,
}

impl ConstraintId {
    pub const ALL: [ConstraintId; 8] = [
        ConstraintId::Quality,
        ConstraintId::AvgShortage,
        ConstraintId::Space,
        ConstraintId::Frequency,
        ConstraintId::TempBox,
        ConstraintId::HumBox,
        ConstraintId::ReorderBox,
        ConstraintId::Positivity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ConstraintId::Quality => "quality",
            ConstraintId::AvgShortage => "avg_shortage",
            ConstraintId::Space => "space",
            ConstraintId::Frequency => "frequency",
            ConstraintId::TempBox => "temp_box",
            ConstraintId::HumBox => "hum_box",
            ConstraintId::ReorderBox => "reorder_box",
            ConstraintId::Positivity => "positivity",
        }
    }
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One evaluated constraint. `slack` is positive inside the feasible side.
/// For two-sided boxes `bound` is the nearer end and `slack` the distance
/// to it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstraintEntry {
    pub id: ConstraintId,
    pub lhs: f64,
    pub bound: f64,
    pub slack: f64,
    pub satisfied: bool,
}

impl ConstraintEntry {
    fn upper(id: ConstraintId, lhs: f64, bound: f64) -> Self {
        Self::with_slack(id, lhs, bound, bound - lhs)
    }

    fn lower(id: ConstraintId, lhs: f64, bound: f64) -> Self {
        Self::with_slack(id, lhs, bound, lhs - bound)
    }

    fn boxed(id: ConstraintId, value: f64, lo: f64, hi: f64) -> Self {
        let (bound, slack) = if value - lo <= hi - value {
            (lo, value - lo)
        } else {
            (hi, hi - value)
        };
        Self::with_slack(id, value, bound, slack)
    }

    fn with_slack(id: ConstraintId, lhs: f64, bound: f64, slack: f64) -> Self {
        // NaN slack (e.g. from a degenerate lot size) counts as violated.
        let satisfied = slack >= -tolerance(bound);
        ConstraintEntry { id, lhs, bound, slack, satisfied }
    }

    /// Within tolerance of its bound.
    pub fn is_active(&self) -> bool {
        self.slack.abs() <= tolerance(self.bound)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintReport {
    pub entries: [ConstraintEntry; 8],
}

impl ConstraintReport {
    pub fn all_satisfied(&self) -> bool {
        self.entries.iter().all(|e| e.satisfied)
    }

    pub fn get(&self, id: ConstraintId) -> &ConstraintEntry {
        // entries are stored in ConstraintId::ALL order
        &self.entries[ConstraintId::ALL.iter().position(|c| *c == id).unwrap()]
    }

    pub fn violated(&self) -> impl Iterator<Item = &ConstraintEntry> {
        self.entries.iter().filter(|e| !e.satisfied)
    }

    pub fn active(&self) -> impl Iterator<Item = &ConstraintEntry> {
        self.entries.iter().filter(|e| e.is_active())
    }
}

/// `E[(X − R)+]` for uniform `X`, valid for any `R`.
pub(crate) fn shortage_any(r: f64, demand: &LeadTimeDemand) -> f64 {
    if r >= demand.upper {
        0.0
    } else if r <= demand.lower {
        demand.mean() - r
    } else {
        shortage_unchecked(r, demand)
    }
}

pub fn evaluate_constraints(
    params: &ScenarioParameters,
    model: &QualityModel,
    decision: &DecisionVector,
) -> ConstraintReport {
    let q = decision.lot_size;
    let r = decision.reorder_point;
    let cycles = params.annual_demand / q;
    let quality = model.score(decision.temperature, decision.humidity, decision.packaging, decision.environment);
    let avg_shortage = cycles * shortage_any(r, &params.lead_time_demand);
    let positivity = ConstraintEntry::lower(ConstraintId::Positivity, q.min(r), 0.0);
    ConstraintReport {
        entries: [
            ConstraintEntry::lower(ConstraintId::Quality, quality, params.min_quality),
            ConstraintEntry::upper(ConstraintId::AvgShortage, avg_shortage, params.max_avg_shortage),
            ConstraintEntry::upper(ConstraintId::Space, params.space_per_unit * (q + r), params.capacity),
            ConstraintEntry::upper(ConstraintId::Frequency, cycles, params.max_orders),
            ConstraintEntry::boxed(
                ConstraintId::TempBox,
                decision.temperature,
                params.temp_lower,
                params.temp_upper,
            ),
            ConstraintEntry::boxed(ConstraintId::HumBox, decision.humidity, params.hum_lower, params.hum_upper),
            ConstraintEntry::boxed(ConstraintId::ReorderBox, r, params.reorder_lower, params.reorder_upper),
            // Q <= 0 makes the per-cycle quantities meaningless; fail it outright.
            if q > 0.0 { positivity } else { ConstraintEntry { satisfied: false, ..positivity } },
        ],
    }
}

/// Highest reachable quality score and a corner attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QualityOptimum {
    pub score: f64,
    pub temperature: f64,
    pub humidity: f64,
    pub packaging: Level,
    pub environment: Level,
}

/// Best quality for one (packaging, environment) pair over the climate box.
/// The score is affine in (T, HU), so a box corner is optimal.
pub(crate) fn max_quality_for(
    model: &QualityModel,
    params: &ScenarioParameters,
    pkg: Level,
    env: Level,
) -> QualityOptimum {
    let mut best: Option<QualityOptimum> = None;
    for t in [params.temp_lower, params.temp_upper] {
        for hu in [params.hum_lower, params.hum_upper] {
            let score = model.score(t, hu, pkg, env);
            if best.is_none_or(|b| score > b.score) {
                best = Some(QualityOptimum { score, temperature: t, humidity: hu, packaging: pkg, environment: env });
            }
        }
    }
    best.expect("four corners evaluated")
}

pub fn max_achievable_quality(model: &QualityModel, params: &ScenarioParameters) -> QualityOptimum {
    let mut best: Option<QualityOptimum> = None;
    for pkg in Level::ALL {
        for env in Level::ALL {
            let cand = max_quality_for(model, params, pkg, env);
            if best.is_none_or(|b| cand.score > b.score) {
                best = Some(cand);
            }
        }
    }
    best.expect("nine combinations evaluated")
}

//! Domain types for the single-item cold-warehouse problem, the annual cost
//! function and the constraint set. Everything here is a pure function of its
//! inputs; nothing solves.

mod constraints;
mod cost;

pub use constraints::{
    evaluate_constraints, max_achievable_quality, tolerance, ConstraintEntry, ConstraintId,
    ConstraintReport, QualityOptimum,
};
pub use cost::{cost_breakdown, expected_on_hand, expected_shortage_per_cycle, CostBreakdown};
pub(crate) use constraints::{max_quality_for, shortage_any};
pub(crate) use cost::shortage_unchecked;

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Uniform lead-time demand on `[lower, upper]` (kg).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadTimeDemand {
    pub lower: f64,
    pub upper: f64,
}

impl LeadTimeDemand {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        let d = LeadTimeDemand { lower, upper };
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lower.is_finite() && self.upper.is_finite()) {
            return Err(Error::domain("lead-time demand bounds must be finite"));
        }
        if !(self.lower >= 0.0 && self.upper > self.lower) {
            return Err(Error::domain(format!(
                "lead-time demand requires upper > lower >= 0, got [{}, {}]",
                self.lower, self.upper
            )));
        }
        Ok(())
    }

    /// Average lead-time demand, the μ of the holding term.
    pub fn mean(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// A packaging type or environmental-condition mode. The discriminant is the
/// ordinal value that enters the quality regression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub enum Level {
    One = 1,
    Two = 2,
    Three = 3,
}

impl Level {
    pub const ALL: [Level; 3] = [Level::One, Level::Two, Level::Three];

    pub fn value(self) -> u8 {
        self as u8
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.value())
    }

    /// Zero-based position into the `M`/`N` cost arrays.
    pub fn index(self) -> usize {
        self.value() as usize - 1
    }
}

impl TryFrom<u8> for Level {
    type Error = Error;

    fn try_from(v: u8) -> Result<Self> {
        match v {
            1 => Ok(Level::One),
            2 => Ok(Level::Two),
            3 => Ok(Level::Three),
            _ => Err(Error::domain(format!("level must be 1, 2 or 3, got {v}"))),
        }
    }
}

impl TryFrom<i64> for Level {
    type Error = Error;

    fn try_from(v: i64) -> Result<Self> {
        u8::try_from(v)
            .map_err(|_| Error::domain(format!("level must be 1, 2 or 3, got {v}")))
            .and_then(Level::try_from)
    }
}

impl From<Level> for u8 {
    fn from(l: Level) -> u8 {
        l.value()
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.value(), f)
    }
}

/// Complete problem instance. Costs marked "per cycle" are incurred once per
/// order, i.e. `D/Q` times a year.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioParameters {
    /// D, kg/year.
    pub annual_demand: f64,
    /// A, per order.
    pub ordering_cost: f64,
    /// h, per kg and year.
    pub holding_cost: f64,
    /// π, per kg short.
    pub shortage_penalty: f64,
    /// e, per °C below the upper temperature bound, per cycle.
    pub temp_var_cost: f64,
    /// k, per % below the upper humidity bound, per cycle.
    pub hum_var_cost: f64,
    /// b, per cycle.
    pub temp_fixed_cost: f64,
    /// d, per cycle.
    pub hum_fixed_cost: f64,
    /// M, per cycle, indexed by packaging level.
    pub packaging_costs: [f64; 3],
    /// N, per cycle, indexed by environment level.
    pub environment_costs: [f64; 3],
    /// B, kg/year.
    pub max_avg_shortage: f64,
    /// Qual, quality score.
    pub min_quality: f64,
    /// f, m² per kg.
    pub space_per_unit: f64,
    /// F, m².
    pub capacity: f64,
    /// n, orders per year.
    pub max_orders: f64,
    pub temp_lower: f64,
    pub temp_upper: f64,
    pub hum_lower: f64,
    pub hum_upper: f64,
    pub reorder_lower: f64,
    pub reorder_upper: f64,
    pub lead_time_demand: LeadTimeDemand,
}

impl ScenarioParameters {
    pub fn validate(&self) -> Result<()> {
        self.lead_time_demand.validate()?;
        let scalars = [
            ("annual_demand", self.annual_demand),
            ("ordering_cost", self.ordering_cost),
            ("holding_cost", self.holding_cost),
            ("shortage_penalty", self.shortage_penalty),
            ("temp_var_cost", self.temp_var_cost),
            ("hum_var_cost", self.hum_var_cost),
            ("temp_fixed_cost", self.temp_fixed_cost),
            ("hum_fixed_cost", self.hum_fixed_cost),
            ("max_avg_shortage", self.max_avg_shortage),
            ("min_quality", self.min_quality),
            ("space_per_unit", self.space_per_unit),
            ("capacity", self.capacity),
            ("max_orders", self.max_orders),
            ("temp_lower", self.temp_lower),
            ("temp_upper", self.temp_upper),
            ("hum_lower", self.hum_lower),
            ("hum_upper", self.hum_upper),
            ("reorder_lower", self.reorder_lower),
            ("reorder_upper", self.reorder_upper),
        ];
        for (name, v) in scalars {
            if !v.is_finite() {
                return Err(Error::domain(format!("{name} must be finite, got {v}")));
            }
        }
        let positive = [
            ("annual_demand", self.annual_demand),
            ("holding_cost", self.holding_cost),
            ("space_per_unit", self.space_per_unit),
            ("capacity", self.capacity),
            ("max_orders", self.max_orders),
        ];
        for (name, v) in positive {
            if v <= 0.0 {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        let nonneg = [
            ("ordering_cost", self.ordering_cost),
            ("shortage_penalty", self.shortage_penalty),
            ("temp_var_cost", self.temp_var_cost),
            ("hum_var_cost", self.hum_var_cost),
            ("temp_fixed_cost", self.temp_fixed_cost),
            ("hum_fixed_cost", self.hum_fixed_cost),
            ("max_avg_shortage", self.max_avg_shortage),
        ];
        for (name, v) in nonneg {
            if v < 0.0 {
                return Err(Error::domain(format!("{name} must be >= 0, got {v}")));
            }
        }
        for (name, costs) in [
            ("packaging_costs", &self.packaging_costs),
            ("environment_costs", &self.environment_costs),
        ] {
            if costs.iter().any(|c| !c.is_finite() || *c < 0.0) {
                return Err(Error::domain(format!(
                    "{name} must be finite and >= 0, got {costs:?}"
                )));
            }
        }
        let boxes = [
            ("temperature", self.temp_lower, self.temp_upper),
            ("humidity", self.hum_lower, self.hum_upper),
            ("reorder point", self.reorder_lower, self.reorder_upper),
        ];
        for (name, lo, hi) in boxes {
            if lo >= hi {
                return Err(Error::domain(format!(
                    "{name} bounds require lower < upper, got [{lo}, {hi}]"
                )));
            }
        }
        let ltd = &self.lead_time_demand;
        if self.reorder_lower < ltd.lower || self.reorder_upper > ltd.upper {
            return Err(Error::domain(format!(
                "reorder bounds [{}, {}] must lie within the lead-time demand support [{}, {}]",
                self.reorder_lower, self.reorder_upper, ltd.lower, ltd.upper
            )));
        }
        Ok(())
    }

    /// Per-cycle cost of packaging `pkg` and environment `env`.
    pub fn selection_cost(&self, pkg: Level, env: Level) -> f64 {
        self.packaging_costs[pkg.index()] + self.environment_costs[env.index()]
    }

    /// Smallest lot size allowed by the order-frequency limit, `D/n`.
    pub fn min_lot(&self) -> f64 {
        self.annual_demand / self.max_orders
    }

    /// Largest `Q + R` allowed by the storage capacity, `F/f`.
    pub fn max_stock(&self) -> f64 {
        self.capacity / self.space_per_unit
    }
}

/// Regression model of product quality:
/// `x1·T + x2·HU + x3·packaging + x4·environment + L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityModel {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
    pub x4: f64,
    pub intercept: f64,
}

impl QualityModel {
    /// Coefficients of the shipped baseline model.
    pub const BASELINE: QualityModel = QualityModel {
        x1: -2.0,
        x2: -0.5,
        x3: 3.0,
        x4: 3.0,
        intercept: 107.5,
    };

    /// Coefficients as published with the original parameter table.
    pub const PUBLISHED: QualityModel = QualityModel {
        x1: -12.88,
        x2: -33.56,
        x3: 2.86,
        x4: 4.28,
        intercept: 79.63,
    };

    pub fn validate(&self) -> Result<()> {
        let all = [self.x1, self.x2, self.x3, self.x4, self.intercept];
        if all.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::domain(format!("quality model coefficients must be finite: {self:?}")))
        }
    }

    pub fn score(&self, t: f64, hu: f64, pkg: Level, env: Level) -> f64 {
        self.x1 * t + self.x2 * hu + self.x3 * pkg.as_f64() + self.x4 * env.as_f64() + self.intercept
    }
}

/// Same as [`QualityModel::score`]; kept as a free function alongside the
/// other model evaluations.
pub fn quality_score(model: &QualityModel, t: f64, hu: f64, pkg: Level, env: Level) -> f64 {
    model.score(t, hu, pkg, env)
}

/// A candidate decision. Selecting exactly one packaging and one environment
/// level is enforced by the `Level` fields.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecisionVector {
    /// Q, kg per order.
    pub lot_size: f64,
    /// R, kg.
    pub reorder_point: f64,
    /// T, °C.
    pub temperature: f64,
    /// HU, %.
    pub humidity: f64,
    pub packaging: Level,
    pub environment: Level,
}

impl DecisionVector {
    pub fn new(
        lot_size: f64,
        reorder_point: f64,
        temperature: f64,
        humidity: f64,
        packaging: Level,
        environment: Level,
    ) -> Result<Self> {
        let d = DecisionVector {
            lot_size,
            reorder_point,
            temperature,
            humidity,
            packaging,
            environment,
        };
        d.check_lot()?;
        Ok(d)
    }

    pub(crate) fn check_lot(&self) -> Result<()> {
        if self.lot_size > 0.0 && self.lot_size.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!("lot size must be > 0, got {}", self.lot_size)))
        }
    }

    /// Orders per year, `D/Q`.
    pub fn cycles_per_year(&self, params: &ScenarioParameters) -> f64 {
        params.annual_demand / self.lot_size
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// The shipped baseline scenario (midpoints of the published ranges).
    pub fn baseline() -> ScenarioParameters {
        ScenarioParameters {
            annual_demand: 10000.0,
            ordering_cost: 300.0,
            holding_cost: 18.0,
            shortage_penalty: 7.0,
            temp_var_cost: 15.0,
            hum_var_cost: 15.0,
            temp_fixed_cost: 250.0,
            hum_fixed_cost: 250.0,
            packaging_costs: [500.0, 1000.0, 1500.0],
            environment_costs: [500.0, 1200.0, 2000.0],
            max_avg_shortage: 3.0,
            min_quality: 70.0,
            space_per_unit: 2.0,
            capacity: 1500.0,
            max_orders: 20.0,
            temp_lower: -5.0,
            temp_upper: 5.0,
            hum_lower: 60.0,
            hum_upper: 90.0,
            reorder_lower: 100.0,
            reorder_upper: 200.0,
            lead_time_demand: LeadTimeDemand { lower: 100.0, upper: 200.0 },
        }
    }
}

use crate::error::{Error, Result};

use super::{DecisionVector, LeadTimeDemand, ScenarioParameters};

/// Annual cost split into the seven terms of the objective.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CostBreakdown {
    pub ordering: f64,
    pub holding: f64,
    pub shortage: f64,
    pub temperature: f64,
    pub humidity: f64,
    pub packaging: f64,
    pub environment: f64,
    pub total: f64,
}

impl CostBreakdown {
    pub fn components(&self) -> [f64; 7] {
        [
            self.ordering,
            self.holding,
            self.shortage,
            self.temperature,
            self.humidity,
            self.packaging,
            self.environment,
        ]
    }
}

/// Expected backorders per cycle, `E[(X − R)+]` for `X ~ U(lower, upper)`:
/// `(upper − R)² / (2 (upper − lower))`.
pub fn expected_shortage_per_cycle(reorder_point: f64, demand: &LeadTimeDemand) -> Result<f64> {
    demand.validate()?;
    if !(reorder_point >= demand.lower && reorder_point <= demand.upper) {
        return Err(Error::domain(format!(
            "reorder point {} outside lead-time demand support [{}, {}]",
            reorder_point, demand.lower, demand.upper
        )));
    }
    Ok(shortage_unchecked(reorder_point, demand))
}

#[inline]
pub(crate) fn shortage_unchecked(r: f64, demand: &LeadTimeDemand) -> f64 {
    let gap = demand.upper - r;
    gap * gap / (2.0 * demand.width())
}

/// Expected on-hand stock `Q/2 + R − μ`. Not clamped at zero.
pub fn expected_on_hand(lot_size: f64, reorder_point: f64, demand: &LeadTimeDemand) -> Result<f64> {
    if lot_size.is_nan() || lot_size <= 0.0 {
        return Err(Error::domain(format!("lot size must be > 0, got {lot_size}")));
    }
    Ok(0.5 * lot_size + reorder_point - demand.mean())
}

pub fn cost_breakdown(params: &ScenarioParameters, decision: &DecisionVector) -> Result<CostBreakdown> {
    decision.check_lot()?;
    let demand = &params.lead_time_demand;
    let cycles = decision.cycles_per_year(params);
    let shortage_per_cycle = expected_shortage_per_cycle(decision.reorder_point, demand)?;
    let on_hand = expected_on_hand(decision.lot_size, decision.reorder_point, demand)?;

    let ordering = cycles * params.ordering_cost;
    let holding = params.holding_cost * on_hand;
    let shortage = cycles * params.shortage_penalty * shortage_per_cycle;
    let temperature = cycles
        * (params.temp_fixed_cost + params.temp_var_cost * (params.temp_upper - decision.temperature));
    let humidity =
        cycles * (params.hum_fixed_cost + params.hum_var_cost * (params.hum_upper - decision.humidity));
    let packaging = cycles * params.packaging_costs[decision.packaging.index()];
    let environment = cycles * params.environment_costs[decision.environment.index()];
    let total = ordering + holding + shortage + temperature + humidity + packaging + environment;
    Ok(CostBreakdown {
        ordering,
        holding,
        shortage,
        temperature,
        humidity,
        packaging,
        environment,
        total,
    })
}

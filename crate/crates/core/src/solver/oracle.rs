//! Brute-force grid search with successive zoom, used to cross-check
//! [`solve`](super::solve). It only relies on the cost and constraint
//! evaluations from the model module.

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{
    cost_breakdown, evaluate_constraints, expected_on_hand, expected_shortage_per_cycle, max_quality_for,
    tolerance, ConstraintId, DecisionVector, Level, QualityModel, ScenarioParameters,
};

use super::{
    combinations, diagnose_infeasibility, finish, infeasible, lot_active_set, per_cycle_cost, pick_winner,
    solve_climate, ClimateResult, CombinationOutcome, CombinationStatus, InfeasibilityCause, LotResult,
    Solution,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleMode {
    /// Grid all of `(Q, R, T, HU)`.
    Full,
    /// Solve the climate exactly, grid only `(Q, R)`.
    Decomposed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OracleConfig {
    pub mode: OracleMode,
    /// Grid points per axis, at least 32.
    pub resolution: usize,
    /// Number of grid passes; each pass after the first covers a window a
    /// tenth as wide, centred on the incumbent.
    pub rounds: usize,
}

impl OracleConfig {
    pub const MIN_RESOLUTION: usize = 32;

    pub fn full() -> Self {
        OracleConfig { mode: OracleMode::Full, resolution: 32, rounds: 4 }
    }

    pub fn decomposed() -> Self {
        OracleConfig { mode: OracleMode::Decomposed, resolution: 128, rounds: 4 }
    }

    fn validate(&self) -> Result<()> {
        if self.resolution < Self::MIN_RESOLUTION {
            return Err(Error::domain(format!(
                "oracle resolution must be >= {}, got {}",
                Self::MIN_RESOLUTION,
                self.resolution
            )));
        }
        if self.rounds == 0 {
            return Err(Error::domain("oracle needs at least one round"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy)]
struct Axis {
    lo: f64,
    hi: f64,
}

impl Axis {
    fn point(&self, i: usize, n: usize) -> f64 {
        if i + 1 == n {
            self.hi
        } else {
            self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64
        }
    }

    /// A window a tenth as wide around `center`, shifted to stay in `bounds`.
    fn zoom(&self, center: f64, bounds: &Axis) -> Axis {
        let half = 0.05 * (self.hi - self.lo);
        let (mut lo, mut hi) = (center - half, center + half);
        if lo < bounds.lo {
            hi = (hi + bounds.lo - lo).min(bounds.hi);
            lo = bounds.lo;
        }
        if hi > bounds.hi {
            lo = (lo - (hi - bounds.hi)).max(bounds.lo);
            hi = bounds.hi;
        }
        Axis { lo, hi }
    }
}

type Best<const K: usize> = Option<([f64; K], f64)>;

fn keep_better<const K: usize>(best: &mut Best<K>, cand: Best<K>) {
    if let Some((p, v)) = cand {
        if best.is_none_or(|(_, bv)| v < bv) {
            *best = Some((p, v));
        }
    }
}

/// Exhaustive search over a `resolution^K` lattice, repeated `rounds` times
/// with a 10× narrower window around the incumbent. `eval` returns `None`
/// for infeasible points. The first axis is split across workers; ties keep
/// the earliest lattice point.
fn refine<const K: usize, F>(bounds: [Axis; K], resolution: usize, rounds: usize, exec: Execution, eval: F) -> Best<K>
where
    F: Fn(&[f64; K]) -> Option<f64> + Sync + Send,
{
    let mut window = bounds;
    let mut best: Best<K> = None;
    for _ in 0..rounds {
        let slices = exec.map_indexed(resolution, |i0| {
            let mut local: Best<K> = None;
            let mut idx = [0usize; K];
            idx[0] = i0;
            loop {
                let mut x = [0.0; K];
                for k in 0..K {
                    x[k] = window[k].point(idx[k], resolution);
                }
                if let Some(v) = eval(&x) {
                    if local.is_none_or(|(_, bv)| v < bv) {
                        local = Some((x, v));
                    }
                }
                // odometer over axes 1..K
                let mut k = K - 1;
                loop {
                    if k == 0 {
                        return local;
                    }
                    idx[k] += 1;
                    if idx[k] < resolution {
                        break;
                    }
                    idx[k] = 0;
                    k -= 1;
                }
            }
        });
        let mut round_best: Best<K> = None;
        for s in slices {
            keep_better(&mut round_best, s);
        }
        keep_better(&mut best, round_best);
        let (center, _) = best?;
        for k in 0..K {
            window[k] = window[k].zoom(center[k], &bounds[k]);
        }
    }
    best
}

fn lot_entries_ok(params: &ScenarioParameters, model: &QualityModel, d: &DecisionVector) -> bool {
    let rep = evaluate_constraints(params, model, d);
    [
        ConstraintId::AvgShortage,
        ConstraintId::Space,
        ConstraintId::Frequency,
        ConstraintId::ReorderBox,
        ConstraintId::Positivity,
    ]
    .iter()
    .all(|id| rep.get(*id).satisfied)
}

fn lot_bounds(params: &ScenarioParameters) -> Option<[Axis; 2]> {
    let q = Axis { lo: params.min_lot(), hi: params.max_stock() - params.reorder_lower };
    (q.lo <= q.hi).then_some([q, Axis { lo: params.reorder_lower, hi: params.reorder_upper }])
}

/// Grid oracle for the lot subproblem alone: minimizes
/// `(D/Q)(a_eff + π S(R)) + h(Q/2 + R − μ)` over the lot constraints.
/// Returns `(Q, R, cost)`.
pub fn grid_lot(
    params: &ScenarioParameters,
    a_eff: f64,
    resolution: usize,
    rounds: usize,
    exec: Execution,
) -> Option<(f64, f64, f64)> {
    let bounds = lot_bounds(params)?;
    let probe = DecisionVector {
        lot_size: 1.0,
        reorder_point: 0.0,
        temperature: params.temp_upper,
        humidity: params.hum_upper,
        packaging: Level::One,
        environment: Level::One,
    };
    let model = QualityModel::BASELINE;
    let ([q, r], cost) = refine(bounds, resolution, rounds, exec, |&[q, r]| {
        let d = DecisionVector { lot_size: q, reorder_point: r, ..probe };
        if !lot_entries_ok(params, &model, &d) {
            return None;
        }
        let s = expected_shortage_per_cycle(r, &params.lead_time_demand).ok()?;
        let on_hand = expected_on_hand(q, r, &params.lead_time_demand).ok()?;
        Some(params.annual_demand / q * (a_eff + params.shortage_penalty * s) + params.holding_cost * on_hand)
    })?;
    Some((q, r, cost))
}

pub fn grid_oracle(params: &ScenarioParameters, model: &QualityModel, config: OracleConfig) -> Result<Solution> {
    grid_oracle_with(params, model, config, Execution::default())
}

pub fn grid_oracle_with(
    params: &ScenarioParameters,
    model: &QualityModel,
    config: OracleConfig,
    exec: Execution,
) -> Result<Solution> {
    params.validate()?;
    model.validate()?;
    config.validate()?;
    let Some([q_axis, r_axis]) = lot_bounds(params) else {
        return Err(Error::Infeasible(diagnose_infeasibility(params, model)));
    };
    let t_axis = Axis { lo: params.temp_lower, hi: params.temp_upper };
    let h_axis = Axis { lo: params.hum_lower, hi: params.hum_upper };

    let mut outcomes = Vec::with_capacity(9);
    for (pkg, env) in combinations() {
        let base = DecisionVector {
            lot_size: 1.0,
            reorder_point: params.reorder_lower,
            temperature: params.temp_upper,
            humidity: params.hum_upper,
            packaging: pkg,
            environment: env,
        };
        let total_at = |d: &DecisionVector| -> Option<f64> {
            if !evaluate_constraints(params, model, d).all_satisfied() {
                return None;
            }
            cost_breakdown(params, d).ok().map(|c| c.total)
        };
        let found: Option<DecisionVector> = match config.mode {
            OracleMode::Full => {
                let eval = |&[q, r, t, hu]: &[f64; 4]| {
                    // cheap quality screen before the full evaluation
                    if model.score(t, hu, pkg, env) < params.min_quality - tolerance(params.min_quality) {
                        return None;
                    }
                    total_at(&DecisionVector { lot_size: q, reorder_point: r, temperature: t, humidity: hu, ..base })
                };
                refine([q_axis, r_axis, t_axis, h_axis], config.resolution, config.rounds, exec, eval).map(
                    |([q, r, t, hu], _)| DecisionVector {
                        lot_size: q,
                        reorder_point: r,
                        temperature: t,
                        humidity: hu,
                        ..base
                    },
                )
            }
            OracleMode::Decomposed => match solve_climate(params, model, pkg, env) {
                Err(_) => None,
                Ok(c) => {
                    let base = DecisionVector { temperature: c.temperature, humidity: c.humidity, ..base };
                    let eval =
                        |&[q, r]: &[f64; 2]| total_at(&DecisionVector { lot_size: q, reorder_point: r, ..base });
                    refine([q_axis, r_axis], config.resolution, config.rounds, exec, eval)
                        .map(|([q, r], _)| DecisionVector { lot_size: q, reorder_point: r, ..base })
                }
            },
        };
        let status = match found {
            Some(d) => outcome_at(params, model, &d)?,
            None => CombinationStatus::Infeasible(combo_causes(params, model, pkg, env)),
        };
        outcomes.push(CombinationOutcome { packaging: pkg, environment: env, status });
    }
    let winner = pick_winner(&outcomes).ok_or_else(|| infeasible(params, model, &outcomes))?;
    let CombinationStatus::Optimal { climate, lot, .. } = &outcomes[winner].status else {
        unreachable!("winner is optimal")
    };
    let decision = DecisionVector {
        lot_size: lot.lot_size,
        reorder_point: lot.reorder_point,
        temperature: climate.temperature,
        humidity: climate.humidity,
        packaging: outcomes[winner].packaging,
        environment: outcomes[winner].environment,
    };
    // grid points are not exact KKT points; the residual is informative only
    finish(params, model, decision, outcomes)
}

fn outcome_at(params: &ScenarioParameters, model: &QualityModel, d: &DecisionVector) -> Result<CombinationStatus> {
    let total = cost_breakdown(params, d)?.total;
    let variable_cost = params.temp_var_cost * (params.temp_upper - d.temperature)
        + params.hum_var_cost * (params.hum_upper - d.humidity);
    let slack = model.score(d.temperature, d.humidity, d.packaging, d.environment) - params.min_quality;
    let a_eff = per_cycle_cost(params, variable_cost, d.packaging, d.environment);
    let lot_cost = super::lot::lot_cost(params, a_eff, d.lot_size, d.reorder_point);
    Ok(CombinationStatus::Optimal {
        climate: ClimateResult {
            temperature: d.temperature,
            humidity: d.humidity,
            variable_cost,
            binding: slack.abs() <= tolerance(params.min_quality),
        },
        lot: LotResult {
            lot_size: d.lot_size,
            reorder_point: d.reorder_point,
            cost: lot_cost,
            active_set: lot_active_set(params, d.lot_size, d.reorder_point),
        },
        total,
    })
}

fn combo_causes(params: &ScenarioParameters, model: &QualityModel, pkg: Level, env: Level) -> Vec<InfeasibilityCause> {
    let mut causes = Vec::new();
    let q = max_quality_for(model, params, pkg, env);
    if q.score < params.min_quality - tolerance(params.min_quality) {
        causes.push(InfeasibilityCause::QualityUnreachable { max_quality: q.score, required: params.min_quality });
    }
    causes.extend(
        diagnose_infeasibility(params, model)
            .causes
            .into_iter()
            .filter(|c| c.name() != "quality_unreachable"),
    );
    causes
}

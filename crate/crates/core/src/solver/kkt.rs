use crate::error::{Error, Result};
use crate::linalg::solve_full_pivot;
use crate::model::{
    evaluate_constraints, shortage_any, tolerance, DecisionVector, QualityModel, ScenarioParameters,
};

/// Stationarity residual of the Lagrangian over `(Q, R, T, HU)`.
///
/// Constraints within tolerance of their bound are treated as active. Their
/// gradients (normalized) get nonnegative multipliers from an exact
/// nonnegative least-squares fit, done by enumerating subsets of the active
/// set. The result is `‖∇TC + Σ λᵢ ∇gᵢ‖₂ / max(1, ‖∇TC‖₂)`, zero at a KKT
/// point.
pub fn kkt_residual(params: &ScenarioParameters, model: &QualityModel, decision: &DecisionVector) -> Result<f64> {
    let report = evaluate_constraints(params, model, decision);
    if !report.all_satisfied() {
        let bad: Vec<&str> = report.violated().map(|e| e.id.name()).collect();
        return Err(Error::domain(format!("KKT residual needs a feasible point; violated: {}", bad.join(", "))));
    }
    let demand = &params.lead_time_demand;
    let (q, r, t, hu) = (decision.lot_size, decision.reorder_point, decision.temperature, decision.humidity);
    let big_d = params.annual_demand;
    let cycles = big_d / q;
    let short = shortage_any(r, demand);
    // d S / d R on the support
    let dshort = if r < demand.upper { -(demand.upper - r) / demand.width() } else { 0.0 };
    let per_cycle = params.ordering_cost
        + params.temp_fixed_cost
        + params.temp_var_cost * (params.temp_upper - t)
        + params.hum_fixed_cost
        + params.hum_var_cost * (params.hum_upper - hu)
        + params.selection_cost(decision.packaging, decision.environment)
        + params.shortage_penalty * short;

    let grad = [
        -big_d / (q * q) * per_cycle + 0.5 * params.holding_cost,
        params.holding_cost + cycles * params.shortage_penalty * dshort,
        -cycles * params.temp_var_cost,
        -cycles * params.hum_var_cost,
    ];

    let quality = model.score(t, hu, decision.packaging, decision.environment);
    // (gradient of g where g <= 0, slack, bound)
    let constraints: [([f64; 4], f64, f64); 10] = [
        ([0.0, 0.0, -model.x1, -model.x2], quality - params.min_quality, params.min_quality),
        (
            [-big_d / (q * q) * short, cycles * dshort, 0.0, 0.0],
            params.max_avg_shortage - cycles * short,
            params.max_avg_shortage,
        ),
        (
            [params.space_per_unit, params.space_per_unit, 0.0, 0.0],
            params.capacity - params.space_per_unit * (q + r),
            params.capacity,
        ),
        ([-big_d / (q * q), 0.0, 0.0, 0.0], params.max_orders - cycles, params.max_orders),
        ([0.0, 0.0, 1.0, 0.0], params.temp_upper - t, params.temp_upper),
        ([0.0, 0.0, -1.0, 0.0], t - params.temp_lower, params.temp_lower),
        ([0.0, 0.0, 0.0, 1.0], params.hum_upper - hu, params.hum_upper),
        ([0.0, 0.0, 0.0, -1.0], hu - params.hum_lower, params.hum_lower),
        ([0.0, 1.0, 0.0, 0.0], params.reorder_upper - r, params.reorder_upper),
        ([0.0, -1.0, 0.0, 0.0], r - params.reorder_lower, params.reorder_lower),
    ];
    let active: Vec<[f64; 4]> = constraints
        .iter()
        .filter(|(_, slack, bound)| slack.abs() <= tolerance(*bound))
        .filter_map(|(g, _, _)| {
            let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            (norm > 0.0).then(|| g.map(|v| v / norm))
        })
        .collect();

    let gnorm = norm(&grad);
    let mut best = gnorm;
    let k = active.len();
    for mask in 1u32..(1 << k) {
        let idx: Vec<usize> = (0..k).filter(|i| mask & (1 << i) != 0).collect();
        let m = idx.len();
        let mut gram = vec![0.0; m * m];
        let mut rhs = vec![0.0; m];
        for (a, &i) in idx.iter().enumerate() {
            rhs[a] = -dot(&active[i], &grad);
            for (b, &j) in idx.iter().enumerate() {
                gram[a * m + b] = dot(&active[i], &active[j]);
            }
        }
        let Ok(lambda) = solve_full_pivot(gram, rhs, m, 1e-12) else {
            continue;
        };
        if lambda.iter().any(|&l| l < 0.0) {
            continue;
        }
        let mut res = grad;
        for (l, &i) in lambda.iter().zip(&idx) {
            for (rv, gv) in res.iter_mut().zip(active[i]) {
                *rv += l * gv;
            }
        }
        best = best.min(norm(&res));
    }
    Ok(best / gnorm.max(1.0))
}

fn dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64; 4]) -> f64 {
    dot(a, a).sqrt()
}

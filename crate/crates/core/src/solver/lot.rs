use std::fmt;

use crate::error::{Error, Result};
use crate::model::{shortage_any, shortage_unchecked, tolerance, ScenarioParameters};

use super::{min_avg_shortage, InfeasibilityCause, InfeasibilityDiagnosis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LotConstraint {
    /// `D/Q ≤ n`
    Frequency,
    /// `f(Q + R) ≤ F`
    Space,
    /// `(D/Q)·S(R) ≤ B`
    AvgShortage,
    ReorderLower,
    ReorderUpper,
}

impl LotConstraint {
    pub fn name(self) -> &'static str {
        match self {
            LotConstraint::Frequency => "frequency",
            LotConstraint::Space => "space",
            LotConstraint::AvgShortage => "avg_shortage",
            LotConstraint::ReorderLower => "reorder_lower",
            LotConstraint::ReorderUpper => "reorder_upper",
        }
    }
}

impl fmt::Display for LotConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LotResult {
    pub lot_size: f64,
    pub reorder_point: f64,
    /// Annual cost `(D/Q)(A_eff + π·S(R)) + h(Q/2 + R − μ)`.
    pub cost: f64,
    pub active_set: Vec<LotConstraint>,
}

/// Annual cost of a lot policy given the per-cycle cost `a_eff`.
pub(crate) fn lot_cost(params: &ScenarioParameters, a_eff: f64, q: f64, r: f64) -> f64 {
    let demand = &params.lead_time_demand;
    params.annual_demand / q * (a_eff + params.shortage_penalty * shortage_any(r, demand))
        + params.holding_cost * (0.5 * q + r - demand.mean())
}

/// Slack of each lot constraint at `(q, r)`, paired with the bound that sets
/// its tolerance.
fn lot_slacks(params: &ScenarioParameters, q: f64, r: f64) -> [(LotConstraint, f64, f64); 5] {
    let cycles = params.annual_demand / q;
    [
        (LotConstraint::Frequency, params.max_orders - cycles, params.max_orders),
        (LotConstraint::Space, params.capacity - params.space_per_unit * (q + r), params.capacity),
        (
            LotConstraint::AvgShortage,
            params.max_avg_shortage - cycles * shortage_any(r, &params.lead_time_demand),
            params.max_avg_shortage,
        ),
        (LotConstraint::ReorderLower, r - params.reorder_lower, params.reorder_lower),
        (LotConstraint::ReorderUpper, params.reorder_upper - r, params.reorder_upper),
    ]
}

fn lot_feasible(params: &ScenarioParameters, q: f64, r: f64) -> bool {
    q > 0.0 && lot_slacks(params, q, r).iter().all(|&(_, s, b)| s >= -tolerance(b))
}

/// Lot constraints holding with equality (within tolerance) at `(q, r)`.
pub fn lot_active_set(params: &ScenarioParameters, q: f64, r: f64) -> Vec<LotConstraint> {
    lot_slacks(params, q, r)
        .iter()
        .filter(|&&(_, s, b)| s.abs() <= tolerance(b))
        .map(|&(c, _, _)| c)
        .collect()
}

/// Root of a nondecreasing function on `[lo, hi]`, or the endpoint when the
/// sign does not change.
fn bisect_increasing(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    if f(lo) >= 0.0 {
        return lo;
    }
    if f(hi) <= 0.0 {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Minimizes the annual lot cost over the convex feasible set of `(Q, R)`.
///
/// The objective is jointly convex for `Q > 0` and every constraint is
/// convex, so the minimizer of the objective restricted to the face spanned
/// by its active constraints is the global optimum. Every face with at most
/// two active constraints is minimized exactly (fixed point in the interior,
/// one-dimensional convex searches on edges, closed-form vertices) and the
/// cheapest feasible candidate is returned.
pub fn solve_lot(params: &ScenarioParameters, a_eff: f64) -> Result<LotResult> {
    if !(a_eff >= 0.0 && a_eff.is_finite()) {
        return Err(Error::domain(format!("per-cycle cost must be finite and >= 0, got {a_eff}")));
    }
    let demand = &params.lead_time_demand;
    let big_d = params.annual_demand;
    let h = params.holding_cost;
    let pi = params.shortage_penalty;
    let b = params.max_avg_shortage;
    let (lower, upper, width) = (demand.lower, demand.upper, demand.width());
    let q_min = params.min_lot();
    let stock = params.max_stock();
    let (r_lo, r_hi) = (params.reorder_lower, params.reorder_upper);

    let required_space = params.space_per_unit * (q_min + r_lo);
    if required_space > params.capacity + tolerance(params.capacity) {
        return Err(infeasible(InfeasibilityCause::FrequencyVsSpace {
            required_space,
            capacity: params.capacity,
        }));
    }
    if let Some(m) = min_avg_shortage(params) {
        if m > b + tolerance(b) {
            return Err(infeasible(InfeasibilityCause::ShortageUnreachable { min_avg_shortage: m, limit: b }));
        }
    }

    let s = |r: f64| shortage_unchecked(r.clamp(lower, upper), demand);
    let mut cands: Vec<(f64, f64)> = Vec::with_capacity(24);

    // Interior stationary point:
    //   Q = sqrt(2D(A_eff + π S(R)) / h),  R = u − w h Q / (D π).
    // Q² grows monotonically along the iteration, so once R drops below Rl
    // or Q exceeds the storage limit no interior optimum exists.
    if pi > 0.0 {
        let mut q = (2.0 * big_d * a_eff / h).sqrt();
        let mut r = upper - width * h * q / (big_d * pi);
        for _ in 0..1_000_000 {
            if r < r_lo || q > stock {
                break;
            }
            let q_next = (2.0 * big_d * (a_eff + pi * s(r)) / h).sqrt();
            r = upper - width * h * q_next / (big_d * pi);
            let step = (q_next - q).abs();
            q = q_next;
            if step <= 1e-13 * q {
                cands.push((q, r));
                break;
            }
        }
    }

    // R fixed at a bound: Q = sqrt(2D(A_eff + π S(R)) / h), clamped.
    for r in [r_lo, r_hi] {
        let q = (2.0 * big_d * (a_eff + pi * s(r)) / h).sqrt();
        cands.push((q.min(stock - r).max(q_min), r));
    }

    // Q fixed at D/n: R minimizes h R + (D/Q) π S(R).
    let r_at_qmin = if pi > 0.0 {
        (upper - width * h * q_min / (big_d * pi)).clamp(r_lo, r_hi)
    } else {
        r_lo
    };
    cands.push((q_min, r_at_qmin));

    // Space edge Q + R = F/f, parameterized by Q.
    let (q_a, q_b) = (q_min.max(stock - r_hi), stock - r_lo);
    if q_a <= q_b {
        let dpsi = |q: f64| {
            let r = stock - q;
            -big_d / (q * q) * (a_eff + pi * s(r)) + big_d / q * pi * (upper - r) / width - 0.5 * h
        };
        let q = bisect_increasing(dpsi, q_a, q_b);
        cands.push((q, stock - q));
    }

    // Shortage edge Q = D S(R) / B, parameterized by R. Along it the cost is
    // B·A_eff/S(R) + πB + h D S(R)/(2B) + h(R − μ), convex in R.
    if b > 0.0 {
        let hi = r_hi.min(upper);
        let hi = if hi >= upper { upper - 1e-9 * width } else { hi };
        if r_lo < hi {
            let dphi = |r: f64| {
                let sr = s(r);
                let ds = -(upper - r) / width;
                -b * a_eff * ds / (sr * sr) + h * big_d * ds / (2.0 * b) + h
            };
            let r = bisect_increasing(dphi, r_lo, hi);
            cands.push((big_d * s(r) / b, r));
        }
    }

    // Vertices.
    let a = 2.0 * width * b / big_d;
    cands.push((q_min, stock - q_min));
    cands.push((q_min, upper - (a * q_min).sqrt()));
    cands.push((q_min, r_lo));
    cands.push((q_min, r_hi));
    cands.push((stock - r_lo, r_lo));
    cands.push((stock - r_hi, r_hi));
    // Q + R = F/f and (u − R)² = a Q: with y = u − R, y² − a y − a(F/f − u) = 0.
    let c = stock - upper;
    let disc = a * a + 4.0 * a * c;
    if disc >= 0.0 {
        for y in [0.5 * (a + disc.sqrt()), 0.5 * (a - disc.sqrt())] {
            if y >= 0.0 {
                cands.push((stock - (upper - y), upper - y));
            }
        }
    }
    if b > 0.0 {
        cands.push((big_d * s(r_lo) / b, r_lo));
        cands.push((big_d * s(r_hi) / b, r_hi));
    }

    let mut best: Option<(f64, f64, f64)> = None;
    for (q, r) in cands {
        if !(q.is_finite() && r.is_finite() && q > 0.0) {
            continue;
        }
        // roundoff from the closed forms can leave R a hair outside its box
        let r = if (r - r_lo).abs() <= tolerance(r_lo) {
            r.max(r_lo)
        } else if (r - r_hi).abs() <= tolerance(r_hi) {
            r.min(r_hi)
        } else {
            r
        };
        if !lot_feasible(params, q, r) {
            continue;
        }
        let cost = lot_cost(params, a_eff, q, r);
        if best.is_none_or(|(_, _, bc)| cost < bc) {
            best = Some((q, r, cost));
        }
    }
    let (q, r, cost) = best.ok_or_else(|| {
        Error::Numerical("lot subproblem passed the feasibility screens but no candidate was feasible".into())
    })?;
    Ok(LotResult { lot_size: q, reorder_point: r, cost, active_set: lot_active_set(params, q, r) })
}

fn infeasible(cause: InfeasibilityCause) -> Error {
    Error::Infeasible(InfeasibilityDiagnosis { causes: vec![cause] })
}

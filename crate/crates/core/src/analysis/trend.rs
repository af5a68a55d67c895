use crate::error::{Error, Result};

use super::SweepResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrendDirection {
    NonDecreasing,
    NonIncreasing,
}

impl TrendDirection {
    pub fn name(self) -> &'static str {
        match self {
            TrendDirection::NonDecreasing => "non_decreasing",
            TrendDirection::NonIncreasing => "non_increasing",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrendVerdict {
    pub direction: TrendDirection,
    pub holds: bool,
    /// Index into `SweepResult::points` of the first point that breaks the
    /// trend.
    pub first_violation: Option<usize>,
}

/// Checks the optimal totals of a sweep against a direction, allowing a
/// slack of `1e-6 × max |total|`. Infeasible points are skipped.
pub fn check_trend(result: &SweepResult, direction: TrendDirection) -> Result<TrendVerdict> {
    let optimal: Vec<(usize, f64)> =
        result.points.iter().enumerate().filter_map(|(i, p)| p.total().map(|t| (i, t))).collect();
    if optimal.len() < 2 {
        return Err(Error::domain(format!(
            "trend check needs at least 2 optimal points, got {}",
            optimal.len()
        )));
    }
    let slack = 1e-6 * optimal.iter().fold(0.0_f64, |m, (_, t)| m.max(t.abs()));
    let first_violation = optimal.windows(2).find_map(|w| {
        let step = w[1].1 - w[0].1;
        let broken = match direction {
            TrendDirection::NonDecreasing => step < -slack,
            TrendDirection::NonIncreasing => step > slack,
        };
        broken.then_some(w[1].0)
    });
    Ok(TrendVerdict { direction, holds: first_violation.is_none(), first_violation })
}

/// Whether expected on-hand stock is nonnegative at every optimal point,
/// the condition under which total cost is monotone in the holding cost.
pub fn on_hand_nonnegative(result: &SweepResult) -> bool {
    result.points.iter().filter_map(|p| p.on_hand).all(|v| v >= 0.0)
}

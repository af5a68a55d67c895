//! Sensitivity sweeps, trend verdicts and Monte Carlo checks of the
//! closed-form expectations.

mod montecarlo;
mod sweep;
mod trend;

pub use montecarlo::{mc_on_hand, mc_on_hand_with, mc_shortage, mc_shortage_with, McReport};
pub use sweep::{
    sweep, sweep_with, write_sweep_csv, Parameter, PointOutcome, SweepPoint, SweepResult, SweepSpec,
    SWEEP_CSV_HEADER,
};
pub use trend::{check_trend, on_hand_nonnegative, TrendDirection, TrendVerdict};

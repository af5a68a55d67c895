use rand::Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{expected_on_hand, expected_shortage_per_cycle, LeadTimeDemand};
use crate::rng::{stream_rng, STREAM_LEAD_TIME_DEMAND};

/// Samples per independently seeded block. Block `b` always draws from
/// stream index `b`, so the estimate does not depend on how blocks are
/// scheduled.
const BLOCK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McReport {
    pub estimate: f64,
    pub std_error: f64,
    pub n_samples: usize,
    pub analytic: f64,
    pub z_score: f64,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: f64,
    mean: f64,
    m2: f64,
}

impl Moments {
    fn push(&mut self, x: f64) {
        self.n += 1.0;
        let d = x - self.mean;
        self.mean += d / self.n;
        self.m2 += d * (x - self.mean);
    }

    fn merge(self, o: Moments) -> Moments {
        if self.n == 0.0 {
            return o;
        }
        if o.n == 0.0 {
            return self;
        }
        let n = self.n + o.n;
        let d = o.mean - self.mean;
        Moments { n, mean: self.mean + d * o.n / n, m2: self.m2 + o.m2 + d * d * self.n * o.n / n }
    }
}

fn simulate<F>(demand: &LeadTimeDemand, n: usize, seed: u64, exec: Execution, sample: F) -> Moments
where
    F: Fn(f64) -> f64 + Sync + Send,
{
    let blocks = n.div_ceil(BLOCK);
    let parts = exec.map_indexed(blocks, |b| {
        let mut rng = stream_rng(seed, STREAM_LEAD_TIME_DEMAND, b as u64);
        let count = BLOCK.min(n - b * BLOCK);
        let mut m = Moments::default();
        for _ in 0..count {
            m.push(sample(rng.random_range(demand.lower..demand.upper)));
        }
        m
    });
    parts.into_iter().fold(Moments::default(), Moments::merge)
}

fn report(m: Moments, n: usize, analytic: f64) -> McReport {
    let std_error = if n > 1 { (m.m2 / (m.n - 1.0) / m.n).sqrt() } else { 0.0 };
    let diff = m.mean - analytic;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff == 0.0 {
        0.0
    } else {
        diff.signum() * f64::INFINITY
    };
    McReport { estimate: m.mean, std_error, n_samples: n, analytic, z_score }
}

pub fn mc_shortage(reorder_point: f64, demand: &LeadTimeDemand, n: usize, seed: u64) -> Result<McReport> {
    mc_shortage_with(reorder_point, demand, n, seed, Execution::default())
}

/// Monte Carlo estimate of the expected backorders per cycle `E[(X − R)+]`
/// for uniform lead-time demand, compared with the closed form.
pub fn mc_shortage_with(
    reorder_point: f64,
    demand: &LeadTimeDemand,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<McReport> {
    let analytic = expected_shortage_per_cycle(reorder_point, demand)?;
    if n == 0 {
        return Err(Error::domain("Monte Carlo needs at least one sample"));
    }
    let m = simulate(demand, n, seed, exec, |x| (x - reorder_point).max(0.0));
    Ok(report(m, n, analytic))
}

pub fn mc_on_hand(lot_size: f64, reorder_point: f64, demand: &LeadTimeDemand, n: usize, seed: u64) -> Result<McReport> {
    mc_on_hand_with(lot_size, reorder_point, demand, n, seed, Execution::default())
}

/// Monte Carlo estimate of the cycle-average net stock. A cycle starts at
/// `R − X + Q` after the order arrives and ends at `R − X`, so its average
/// is `R − X + Q/2`; the expectation is the holding-term quantity
/// `Q/2 + R − μ`.
pub fn mc_on_hand_with(
    lot_size: f64,
    reorder_point: f64,
    demand: &LeadTimeDemand,
    n: usize,
    seed: u64,
    exec: Execution,
) -> Result<McReport> {
    demand.validate()?;
    let analytic = expected_on_hand(lot_size, reorder_point, demand)?;
    if n == 0 {
        return Err(Error::domain("Monte Carlo needs at least one sample"));
    }
    let m = simulate(demand, n, seed, exec, |x| reorder_point - x + 0.5 * lot_size);
    Ok(report(m, n, analytic))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn u() -> LeadTimeDemand {
        LeadTimeDemand { lower: 100.0, upper: 200.0 }
    }

    #[test]
    fn no_exceedance_at_upper_support() {
        let r = mc_shortage(200.0, &u(), 5000, 3).unwrap();
        assert_eq!(r.estimate, 0.0);
        assert_eq!(r.analytic, 0.0);
        assert_eq!(r.z_score, 0.0);
    }

    #[test]
    fn shortage_agrees_with_closed_form() {
        for (rp, analytic) in [(150.0, 12.5), (100.0, 50.0)] {
            let r = mc_shortage(rp, &u(), 1_000_000, 7).unwrap();
            assert_eq!(r.analytic, analytic);
            assert!(r.z_score.abs() <= 4.0, "R={rp}: {r:?}");
        }
    }

    #[test]
    fn on_hand_agrees_with_closed_form() {
        let r = mc_on_hand(300.0, 170.0, &u(), 200_000, 11).unwrap();
        assert_eq!(r.analytic, 170.0);
        assert!(r.z_score.abs() <= 4.0, "{r:?}");
    }

    #[test]
    fn std_error_scales_with_sample_size() {
        let se: Vec<f64> = [10_000, 100_000, 1_000_000]
            .iter()
            .map(|&n| mc_shortage(150.0, &u(), n, 5).unwrap().std_error)
            .collect();
        for w in se.windows(2) {
            let ratio = w[0] / w[1];
            assert!((ratio / 10f64.sqrt() - 1.0).abs() <= 0.2, "ratio {ratio}");
        }
    }

    #[test]
    fn deterministic_across_modes() {
        let a = mc_shortage_with(140.0, &u(), 300_000, 9, Execution::Sequential).unwrap();
        let b = mc_shortage_with(140.0, &u(), 300_000, 9, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(mc_shortage(99.0, &u(), 10, 1).is_err());
        assert!(mc_shortage(150.0, &u(), 0, 1).is_err());
    }
}

use crate::error::{Error, Result};
use crate::linalg::solve_full_pivot;
use crate::model::QualityModel;

use super::QualityDataset;

const FEATURES: [&str; 4] = ["T", "HU", "packaging", "environment"];
const MIN_ROWS: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitReport {
    pub model: QualityModel,
    pub r_squared: f64,
    /// `sqrt(SSR / (n − 5))`, or `sqrt(SSR)` when exactly five rows are given.
    pub residual_std: f64,
    pub n_rows: usize,
}

fn features(row: &super::QualityRow) -> [f64; 4] {
    [row.temperature, row.humidity, row.packaging.as_f64(), row.environment.as_f64()]
}

/// Ordinary least squares for `quality ~ T + HU + packaging + environment + 1`.
///
/// The normal equations are formed on mean-centred, unit-scaled feature
/// columns (the intercept drops out) and solved with complete pivoting. A
/// feature with no variation, or one that is a linear combination of the
/// others, is reported by name.
pub fn fit_ols(dataset: &QualityDataset) -> Result<FitReport> {
    let n = dataset.len();
    if n < MIN_ROWS {
        return Err(Error::domain(format!("fit needs at least {MIN_ROWS} rows, got {n}")));
    }
    let nf = n as f64;
    let mut mean_x = [0.0; 4];
    let mut mean_y = 0.0;
    for row in &dataset.rows {
        for (m, v) in mean_x.iter_mut().zip(features(row)) {
            *m += v;
        }
        mean_y += row.quality;
    }
    mean_x.iter_mut().for_each(|m| *m /= nf);
    mean_y /= nf;

    let mut xtx = [[0.0; 4]; 4];
    let mut xty = [0.0; 4];
    for row in &dataset.rows {
        let x = features(row);
        let yc = row.quality - mean_y;
        for i in 0..4 {
            let xi = x[i] - mean_x[i];
            xty[i] += xi * yc;
            for j in i..4 {
                xtx[i][j] += xi * (x[j] - mean_x[j]);
            }
        }
    }

    let mut scale = [0.0; 4];
    for j in 0..4 {
        let floor = 1e-12 * mean_x[j].abs().max(1.0);
        if xtx[j][j] <= nf * floor * floor {
            return Err(Error::SingularFit { column: FEATURES[j] });
        }
        scale[j] = xtx[j][j].sqrt();
    }
    let mut corr = vec![0.0; 16];
    for i in 0..4 {
        for j in i..4 {
            let c = xtx[i][j] / (scale[i] * scale[j]);
            corr[i * 4 + j] = c;
            corr[j * 4 + i] = c;
        }
    }
    let rhs: Vec<f64> = (0..4).map(|j| xty[j] / scale[j]).collect();
    let beta_scaled =
        solve_full_pivot(corr, rhs, 4, 1e-10).map_err(|col| Error::SingularFit { column: FEATURES[col] })?;
    let beta: Vec<f64> = (0..4).map(|j| beta_scaled[j] / scale[j]).collect();
    let intercept = mean_y - (0..4).map(|j| beta[j] * mean_x[j]).sum::<f64>();
    let model = QualityModel { x1: beta[0], x2: beta[1], x3: beta[2], x4: beta[3], intercept };

    let (mut ssr, mut sst) = (0.0, 0.0);
    for row in &dataset.rows {
        let pred = model.score(row.temperature, row.humidity, row.packaging, row.environment);
        ssr += (row.quality - pred).powi(2);
        sst += (row.quality - mean_y).powi(2);
    }
    let r_squared = if sst > 0.0 {
        (1.0 - ssr / sst).min(1.0)
    } else {
        1.0
    };
    let dof = (n - MIN_ROWS).max(1) as f64;
    Ok(FitReport { model, r_squared, residual_std: (ssr / dof).sqrt(), n_rows: n })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Level;
    use crate::quality::{generate_dataset, GeneratorSpec, QualityRow};
    use proptest::prelude::*;

    fn spec(model: QualityModel, noise_std: f64, seed: u64) -> GeneratorSpec {
        GeneratorSpec { true_model: model, noise_std, temp_range: (-5.0, 5.0), hum_range: (60.0, 90.0), seed }
    }

    fn close(a: &QualityModel, b: &QualityModel, tol: f64) -> bool {
        [(a.x1, b.x1), (a.x2, b.x2), (a.x3, b.x3), (a.x4, b.x4), (a.intercept, b.intercept)]
            .iter()
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn noiseless_recovery() {
        let ds = generate_dataset(&spec(QualityModel::BASELINE, 0.0, 1), 200).unwrap();
        let fit = fit_ols(&ds).unwrap();
        assert!(close(&fit.model, &QualityModel::BASELINE, 1e-8), "{:?}", fit.model);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn five_affinely_independent_rows_interpolate() {
        let m = QualityModel::PUBLISHED;
        let pts = [
            (0.0, 60.0, Level::One, Level::One),
            (1.0, 60.0, Level::One, Level::One),
            (0.0, 61.0, Level::One, Level::One),
            (0.0, 60.0, Level::Two, Level::One),
            (0.0, 60.0, Level::One, Level::Three),
        ];
        let rows = pts
            .iter()
            .map(|&(t, hu, p, e)| QualityRow { temperature: t, humidity: hu, packaging: p, environment: e, quality: m.score(t, hu, p, e) })
            .collect();
        let fit = fit_ols(&QualityDataset { rows }).unwrap();
        assert!(close(&fit.model, &m, 1e-8), "{:?}", fit.model);
    }

    #[test]
    fn constant_temperature_is_singular() {
        let mut ds = generate_dataset(&spec(QualityModel::BASELINE, 2.0, 4), 100).unwrap();
        ds.rows.iter_mut().for_each(|r| r.temperature = 3.0);
        match fit_ols(&ds) {
            Err(Error::SingularFit { column }) => assert_eq!(column, "T"),
            other => panic!("expected singular fit, got {other:?}"),
        }
    }

    #[test]
    fn collinear_levels_are_singular() {
        let mut ds = generate_dataset(&spec(QualityModel::BASELINE, 2.0, 4), 100).unwrap();
        ds.rows.iter_mut().for_each(|r| r.environment = r.packaging);
        assert!(matches!(fit_ols(&ds), Err(Error::SingularFit { .. })));
    }

    #[test]
    fn too_few_rows() {
        let ds = generate_dataset(&spec(QualityModel::BASELINE, 2.0, 4), 4).unwrap();
        assert!(matches!(fit_ols(&ds), Err(Error::Domain(_))));
    }

    #[test]
    fn noisy_recovery_within_tolerance() {
        let ds = generate_dataset(&spec(QualityModel::BASELINE, 2.0, 42), 10_000).unwrap();
        let fit = fit_ols(&ds).unwrap();
        let m = fit.model;
        let t = QualityModel::BASELINE;
        for (got, want) in [(m.x1, t.x1), (m.x2, t.x2), (m.x3, t.x3), (m.x4, t.x4)] {
            assert!((got - want).abs() <= 0.05, "{got} vs {want}");
        }
        assert!((m.intercept - t.intercept).abs() <= 1.5);
        assert!((fit.residual_std - 2.0).abs() < 0.1);
    }

    #[test]
    fn residuals_orthogonal_and_optimal() {
        for seed in [1u64, 2, 3] {
            let ds = generate_dataset(&spec(QualityModel::BASELINE, 2.0, seed), 2000).unwrap();
            let fit = fit_ols(&ds).unwrap();
            let n = ds.len() as f64;
            let res: Vec<f64> = ds
                .rows
                .iter()
                .map(|r| r.quality - fit.model.score(r.temperature, r.humidity, r.packaging, r.environment))
                .collect();
            let mean_res = res.iter().sum::<f64>() / n;
            assert!(mean_res.abs() <= 1e-9 * fit.residual_std * n.sqrt());
            for j in 0..4 {
                let dot: f64 = ds.rows.iter().zip(&res).map(|(r, e)| features(r)[j] * e).sum();
                assert!(dot.abs() <= 1e-6 * n * fit.residual_std, "column {j}: {dot}");
            }
            let ssr_fit: f64 = res.iter().map(|e| e * e).sum();
            let ssr_true: f64 = ds
                .rows
                .iter()
                .map(|r| (r.quality - QualityModel::BASELINE.score(r.temperature, r.humidity, r.packaging, r.environment)).powi(2))
                .sum();
            assert!(ssr_fit <= ssr_true);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn noiseless_fit_is_identity(
            x1 in -20.0..20.0f64, x2 in -40.0..40.0f64, x3 in -10.0..10.0f64,
            x4 in -10.0..10.0f64, l in -200.0..200.0f64, seed in any::<u64>(),
        ) {
            let m = QualityModel { x1, x2, x3, x4, intercept: l };
            let ds = generate_dataset(&spec(m, 0.0, seed), 60).unwrap();
            let fit = fit_ols(&ds).unwrap();
            prop_assert!(close(&fit.model, &m, 1e-8), "{:?} vs {:?}", fit.model, m);
        }
    }
}

use std::io::{Read, Write};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::model::{Level, QualityModel};
use crate::rng::{
    stream_rng, STREAM_ENVIRONMENT, STREAM_HUMIDITY, STREAM_NOISE, STREAM_PACKAGING,
    STREAM_TEMPERATURE,
};

/// Recipe for a synthetic dataset: features drawn uniformly, quality from
/// `true_model` plus Gaussian noise. Packaging and environment levels are
/// drawn uniformly from {1, 2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratorSpec {
    pub true_model: QualityModel,
    pub noise_std: f64,
    pub temp_range: (f64, f64),
    pub hum_range: (f64, f64),
    pub seed: u64,
}

impl GeneratorSpec {
    pub const DEFAULT_NOISE_STD: f64 = 2.0;

    pub fn validate(&self) -> Result<()> {
        self.true_model.validate()?;
        if !(self.noise_std >= 0.0 && self.noise_std.is_finite()) {
            return Err(Error::domain(format!("noise_std must be finite and >= 0, got {}", self.noise_std)));
        }
        for (name, (lo, hi)) in [("temperature", self.temp_range), ("humidity", self.hum_range)] {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(Error::domain(format!("{name} range must satisfy lo < hi, got ({lo}, {hi})")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QualityRow {
    #[serde(rename = "T")]
    pub temperature: f64,
    #[serde(rename = "HU")]
    pub humidity: f64,
    pub packaging: Level,
    pub environment: Level,
    pub quality: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct QualityDataset {
    pub rows: Vec<QualityRow>,
}

impl QualityDataset {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

pub fn generate_dataset(spec: &GeneratorSpec, n: usize) -> Result<QualityDataset> {
    generate_dataset_with(spec, n, Execution::default())
}

/// Row `i` depends only on `(seed, i)`, so the output is the same for any
/// execution mode or thread count.
pub fn generate_dataset_with(spec: &GeneratorSpec, n: usize, exec: Execution) -> Result<QualityDataset> {
    spec.validate()?;
    let rows = exec.map_indexed(n, |i| generate_row(spec, i as u64));
    Ok(QualityDataset { rows })
}

fn generate_row(spec: &GeneratorSpec, i: u64) -> QualityRow {
    let (tl, tu) = spec.temp_range;
    let (hl, hu) = spec.hum_range;
    let temperature = stream_rng(spec.seed, STREAM_TEMPERATURE, i).random_range(tl..tu);
    let humidity = stream_rng(spec.seed, STREAM_HUMIDITY, i).random_range(hl..hu);
    let packaging = draw_level(spec.seed, STREAM_PACKAGING, i);
    let environment = draw_level(spec.seed, STREAM_ENVIRONMENT, i);
    let z: f64 = stream_rng(spec.seed, STREAM_NOISE, i).sample(StandardNormal);
    let quality = spec.true_model.score(temperature, humidity, packaging, environment) + spec.noise_std * z;
    QualityRow { temperature, humidity, packaging, environment, quality }
}

fn draw_level(seed: u64, stream: u64, i: u64) -> Level {
    Level::ALL[stream_rng(seed, stream, i).random_range(0..3usize)]
}

/// Writes `T,HU,packaging,environment,quality`. Floats use the shortest
/// representation that parses back to the same value.
pub fn write_dataset_csv<W: Write>(dataset: &QualityDataset, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Numerical(format!("writing dataset CSV: {e}"));
    w.write_record(["T", "HU", "packaging", "environment", "quality"]).map_err(io)?;
    for row in &dataset.rows {
        w.write_record([
            row.temperature.to_string(),
            row.humidity.to_string(),
            row.packaging.to_string(),
            row.environment.to_string(),
            row.quality.to_string(),
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Numerical(format!("writing dataset CSV: {e}")))?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(input: R) -> Result<QualityDataset> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = rdr.headers().map_err(|e| Error::domain(format!("dataset CSV: {e}")))?.clone();
    let expected = ["T", "HU", "packaging", "environment", "quality"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::domain(format!(
            "dataset CSV header must be `{}`, got `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.deserialize::<QualityRow>().enumerate() {
        let row = rec.map_err(|e| Error::domain(format!("dataset CSV row {}: {e}", i + 1)))?;
        if ![row.temperature, row.humidity, row.quality].iter().all(|v| v.is_finite()) {
            return Err(Error::domain(format!("dataset CSV row {}: non-finite value", i + 1)));
        }
        rows.push(row);
    }
    Ok(QualityDataset { rows })
}

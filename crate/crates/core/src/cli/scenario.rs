//! Scenario files.
//!
//! ```toml
//! schema = 1
//!
//! [demand]
//! annual = 10000            # D, kg/year
//! lead_time_lower = 100     # lead-time demand ~ U(lower, upper), kg
//! lead_time_upper = 200
//!
//! [costs]
//! ordering = 300            # A
//! holding = 18              # h
//! shortage_penalty = 7      # π
//! temp_variable = 15        # e
//! hum_variable = 15         # k
//! temp_fixed = 250          # b
//! hum_fixed = 250           # d
//! packaging = [500, 1000, 1500]
//! environment = [500, 1200, 2000]
//!
//! [limits]
//! max_avg_shortage = 3      # B
//! min_quality = 70          # Qual
//! space_per_unit = 2        # f
//! capacity = 1500           # F
//! max_orders = 20           # n
//! reorder_lower = 100
//! reorder_upper = 200
//!
//! [climate]
//! temp_lower = -5
//! temp_upper = 5
//! hum_lower = 60
//! hum_upper = 90
//!
//! [quality_model]
//! x1 = -2
//! x2 = -0.5
//! x3 = 3
//! x4 = 3
//! intercept = 107.5
//!
//! [generator]               # optional, every key optional
//! noise_std = 2.0
//! temp_range = [-5, 5]      # defaults to the climate box
//! hum_range = [60, 90]
//! # [generator.true_model] defaults to [quality_model]
//!
//! [rng]
//! seed = 42
//! ```

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use crate::model::{LeadTimeDemand, QualityModel, ScenarioParameters};
use crate::quality::GeneratorSpec;

pub const SCHEMA_VERSION: i64 = 1;

/// A parsed and validated scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioFile {
    pub params: ScenarioParameters,
    pub model: QualityModel,
    pub generator: Option<GeneratorSection>,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorSection {
    pub true_model: Option<QualityModel>,
    pub noise_std: Option<f64>,
    pub temp_range: Option<(f64, f64)>,
    pub hum_range: Option<(f64, f64)>,
}

impl ScenarioFile {
    /// Generator recipe with unspecified fields filled from the rest of the
    /// scenario.
    pub fn generator_spec(&self) -> GeneratorSpec {
        let g = self.generator.unwrap_or(GeneratorSection {
            true_model: None,
            noise_std: None,
            temp_range: None,
            hum_range: None,
        });
        GeneratorSpec {
            true_model: g.true_model.unwrap_or(self.model),
            noise_std: g.noise_std.unwrap_or(GeneratorSpec::DEFAULT_NOISE_STD),
            temp_range: g.temp_range.unwrap_or((self.params.temp_lower, self.params.temp_upper)),
            hum_range: g.hum_range.unwrap_or((self.params.hum_lower, self.params.hum_upper)),
            seed: self.seed,
        }
    }
}

#[derive(Debug)]
pub enum ScenarioError {
    Io { path: String, source: std::io::Error },
    /// Syntax error, unknown or missing key, wrong type or schema version.
    Schema { path: String, message: String },
    /// Parsed fine but the values break a model invariant.
    Invalid { path: String, message: String },
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Io { path, source } => write!(f, "cannot read {path}: {source}"),
            ScenarioError::Schema { path, message } => write!(f, "{path}: {message}"),
            ScenarioError::Invalid { path, message } => write!(f, "{path}: invalid scenario: {message}"),
        }
    }
}

impl std::error::Error for ScenarioError {}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    schema: Spanned<i64>,
    demand: RawDemand,
    costs: RawCosts,
    limits: RawLimits,
    climate: RawClimate,
    quality_model: RawModel,
    generator: Option<RawGenerator>,
    rng: RawRng,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDemand {
    annual: f64,
    lead_time_lower: f64,
    lead_time_upper: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCosts {
    ordering: f64,
    holding: f64,
    shortage_penalty: f64,
    temp_variable: f64,
    hum_variable: f64,
    temp_fixed: f64,
    hum_fixed: f64,
    packaging: [f64; 3],
    environment: [f64; 3],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawLimits {
    max_avg_shortage: f64,
    min_quality: f64,
    space_per_unit: f64,
    capacity: f64,
    max_orders: f64,
    reorder_lower: f64,
    reorder_upper: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawClimate {
    temp_lower: f64,
    temp_upper: f64,
    hum_lower: f64,
    hum_upper: f64,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(crate) struct RawModel {
    x1: f64,
    x2: f64,
    x3: f64,
    x4: f64,
    intercept: f64,
}

impl From<RawModel> for QualityModel {
    fn from(m: RawModel) -> Self {
        QualityModel { x1: m.x1, x2: m.x2, x3: m.x3, x4: m.x4, intercept: m.intercept }
    }
}

impl From<QualityModel> for RawModel {
    fn from(m: QualityModel) -> Self {
        RawModel { x1: m.x1, x2: m.x2, x3: m.x3, x4: m.x4, intercept: m.intercept }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGenerator {
    noise_std: Option<f64>,
    temp_range: Option<(f64, f64)>,
    hum_range: Option<(f64, f64)>,
    true_model: Option<RawModel>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawRng {
    seed: u64,
}

pub fn load_scenario(path: &Path) -> Result<ScenarioFile, ScenarioError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ScenarioError::Io { path: path.display().to_string(), source })?;
    parse_scenario(&text, &path.display().to_string())
}

/// Parses scenario text. `origin` is only used in error messages.
pub fn parse_scenario(text: &str, origin: &str) -> Result<ScenarioFile, ScenarioError> {
    let schema_err = |message: String| ScenarioError::Schema { path: origin.to_string(), message };
    let raw: RawScenario = toml::from_str(text).map_err(|e| schema_err(e.to_string().trim_end().to_string()))?;
    if *raw.schema.get_ref() != SCHEMA_VERSION {
        let line = text[..raw.schema.span().start].matches('\n').count() + 1;
        return Err(schema_err(format!(
            "line {line}: key `schema`: unsupported version {}, expected {SCHEMA_VERSION}",
            raw.schema.get_ref()
        )));
    }
    let invalid = |e: crate::Error| ScenarioError::Invalid { path: origin.to_string(), message: e.to_string() };

    let params = ScenarioParameters {
        annual_demand: raw.demand.annual,
        ordering_cost: raw.costs.ordering,
        holding_cost: raw.costs.holding,
        shortage_penalty: raw.costs.shortage_penalty,
        temp_var_cost: raw.costs.temp_variable,
        hum_var_cost: raw.costs.hum_variable,
        temp_fixed_cost: raw.costs.temp_fixed,
        hum_fixed_cost: raw.costs.hum_fixed,
        packaging_costs: raw.costs.packaging,
        environment_costs: raw.costs.environment,
        max_avg_shortage: raw.limits.max_avg_shortage,
        min_quality: raw.limits.min_quality,
        space_per_unit: raw.limits.space_per_unit,
        capacity: raw.limits.capacity,
        max_orders: raw.limits.max_orders,
        temp_lower: raw.climate.temp_lower,
        temp_upper: raw.climate.temp_upper,
        hum_lower: raw.climate.hum_lower,
        hum_upper: raw.climate.hum_upper,
        reorder_lower: raw.limits.reorder_lower,
        reorder_upper: raw.limits.reorder_upper,
        lead_time_demand: LeadTimeDemand { lower: raw.demand.lead_time_lower, upper: raw.demand.lead_time_upper },
    };
    params.validate().map_err(invalid)?;
    let model = QualityModel::from(raw.quality_model);
    model.validate().map_err(invalid)?;

    let file = ScenarioFile {
        params,
        model,
        generator: raw.generator.map(|g| GeneratorSection {
            true_model: g.true_model.map(QualityModel::from),
            noise_std: g.noise_std,
            temp_range: g.temp_range,
            hum_range: g.hum_range,
        }),
        seed: raw.rng.seed,
    };
    if file.generator.is_some() {
        file.generator_spec().validate().map_err(invalid)?;
    }
    Ok(file)
}

/// A `[quality_model]` table that can be pasted into a scenario file.
pub fn model_fragment(model: &QualityModel) -> String {
    #[derive(Serialize)]
    struct Fragment {
        quality_model: RawModel,
    }
    toml::to_string(&Fragment { quality_model: RawModel::from(*model) })
        .expect("a table of finite floats always serializes")
}

/// Reads back a fragment written by [`model_fragment`].
pub fn parse_model_fragment(text: &str) -> Result<QualityModel, String> {
    #[derive(Deserialize)]
    #[serde(deny_unknown_fields)]
    struct Fragment {
        quality_model: RawModel,
    }
    let f: Fragment = toml::from_str(text).map_err(|e| e.to_string())?;
    Ok(f.quality_model.into())
}

//! Survey configuration: a single versioned JSON document.

use std::fmt;
use std::path::{Path, PathBuf};

use cmorbit::classgroup::ClassGroupParams;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SurveyError};

pub const CONFIG_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Quad,
    Quartic,
    Heights,
    Census,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Mode::Quad => "quad",
            Mode::Quartic => "quartic",
            Mode::Heights => "heights",
            Mode::Census => "census",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Discriminants `min <= D <= max`; only fundamental ones are surveyed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscriminantRange {
    pub min: i64,
    pub max: i64,
}

/// Polynomials `x^4 + A x^2 + B` with `A`, `B` in the box and `A^2 > 4B`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuarticBox {
    pub a_min: i64,
    pub a_max: i64,
    pub b_min: i64,
    pub b_max: i64,
    /// Fields with `|Disc(E)|` above this are left out of the range.
    #[serde(default)]
    pub max_discriminant: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CensusGrid {
    pub x: Vec<u64>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FactorBasePolicy {
    /// Every prime ideal up to the Minkowski bound.
    #[default]
    Minkowski,
    /// A fixed norm bound, which must reach the Minkowski bound.
    Fixed(u64),
}

fn default_version() -> u32 {
    CONFIG_VERSION
}
fn default_precision() -> u32 {
    128
}
fn default_multiplier() -> u32 {
    ClassGroupParams::default().principal_multiplier
}
fn default_height_limit() -> u64 {
    500
}
fn default_jobs() -> usize {
    1
}
fn default_seed() -> u64 {
    ClassGroupParams::default().seed
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurveyConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub mode: Mode,
    #[serde(default)]
    pub discriminants: Option<DiscriminantRange>,
    #[serde(default)]
    pub quartic: Option<QuarticBox>,
    #[serde(default)]
    pub census: Option<CensusGrid>,
    /// Working precision in bits for heights.
    #[serde(default = "default_precision")]
    pub precision: u32,
    #[serde(default)]
    pub factor_base: FactorBasePolicy,
    /// Principality searches cover `T2 <= multiplier * n * N^(2/n)`.
    #[serde(default = "default_multiplier")]
    pub multiplier: u32,
    /// In quad mode, heights are computed only for `|D|` up to this bound.
    #[serde(default = "default_height_limit")]
    pub height_limit: u64,
    #[serde(default)]
    pub cache: Option<PathBuf>,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
    #[serde(default = "default_jobs")]
    pub jobs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

impl SurveyConfig {
    /// A configuration for `mode` with every optional setting at its default.
    pub fn new(mode: Mode) -> Self {
        SurveyConfig {
            version: CONFIG_VERSION,
            mode,
            discriminants: None,
            quartic: None,
            census: None,
            precision: default_precision(),
            factor_base: FactorBasePolicy::default(),
            multiplier: default_multiplier(),
            height_limit: default_height_limit(),
            cache: None,
            output: None,
            format: Format::default(),
            jobs: default_jobs(),
            seed: default_seed(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SurveyConfig = serde_json::from_str(text).map_err(|e| SurveyError::ConfigInvalid(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| SurveyError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(SurveyError::ConfigInvalid(m));
        if self.version != CONFIG_VERSION {
            return bad(format!("unsupported config version {}", self.version));
        }
        if self.precision < 64 {
            return bad(format!("precision {} is below 64 bits", self.precision));
        }
        if self.multiplier < 1 {
            return bad("multiplier must be at least 1".into());
        }
        if self.jobs < 1 {
            return bad("jobs must be at least 1".into());
        }
        match self.mode {
            Mode::Quad | Mode::Heights => match &self.discriminants {
                None => return bad(format!("{} mode needs a discriminant range", self.mode)),
                Some(r) if r.min > r.max => return bad(format!("empty discriminant range [{}, {}]", r.min, r.max)),
                Some(r) if r.max >= 0 => return bad("discriminants must be negative".into()),
                Some(_) => {}
            },
            Mode::Quartic => match &self.quartic {
                None => return bad("quartic mode needs an (A, B) box".into()),
                Some(q) if q.a_min < 1 || q.b_min < 1 => return bad("A and B must be positive".into()),
                Some(q) if q.a_min > q.a_max || q.b_min > q.b_max => return bad("empty (A, B) box".into()),
                Some(_) => {}
            },
            Mode::Census => match &self.census {
                None => return bad("census mode needs a grid of X values".into()),
                Some(c) if c.x.is_empty() => return bad("empty census grid".into()),
                Some(c) if c.x.contains(&0) => return bad("census needs X >= 1".into()),
                Some(_) => {}
            },
        }
        Ok(())
    }

    pub fn class_group_params(&self) -> ClassGroupParams {
        ClassGroupParams {
            factor_base_bound: match self.factor_base {
                FactorBasePolicy::Minkowski => None,
                FactorBasePolicy::Fixed(b) => Some(b),
            },
            seed: self.seed,
            principal_multiplier: self.multiplier,
            ..ClassGroupParams::default()
        }
    }

    /// The settings a cached result depends on.
    pub fn parameter_echo(&self) -> serde_json::Value {
        match self.mode {
            Mode::Census => serde_json::json!({}),
            Mode::Heights => serde_json::json!({ "precision": self.precision }),
            Mode::Quartic => serde_json::json!({ "classgroup": self.class_group_params() }),
            Mode::Quad => serde_json::json!({
                "classgroup": self.class_group_params(),
                "precision": self.precision,
                "height_limit": self.height_limit,
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_validate() {
        let c = SurveyConfig::from_json(r#"{"mode":"quad","discriminants":{"min":-200,"max":-1}}"#).unwrap();
        assert_eq!(c.precision, 128);
        assert_eq!(c.jobs, 1);
        let e = SurveyConfig::from_json(r#"{"mode":"quad","discriminants":{"min":-1,"max":-200}}"#).unwrap_err();
        assert_eq!(e.exit_code(), 2);
        assert!(SurveyConfig::from_json(r#"{"mode":"quad","discriminants":{"min":-9,"max":-1},"precision":32}"#).is_err());
        assert!(SurveyConfig::from_json(r#"{"mode":"census","census":{"x":[]}}"#).is_err());
        assert!(SurveyConfig::from_json(r#"{"mode":"quad","bogus":1}"#).is_err());
        let f = SurveyConfig::from_json(r#"{"mode":"quartic","quartic":{"a_min":1,"a_max":3,"b_min":1,"b_max":2},"factor_base":{"fixed":50}}"#).unwrap();
        assert_eq!(f.class_group_params().factor_base_bound, Some(50));
    }
}

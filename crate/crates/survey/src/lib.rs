//! Survey driver for `cmorbit`: configuration, a JSON-lines result cache,
//! parallel orchestration over discriminant ranges and quartic families,
//! CSV/JSON tables and log-log growth fits.

pub mod cache;
pub mod config;
pub mod emit;
pub mod error;
pub mod fit;
pub mod survey;

pub use cache::{Cache, CacheRecord};
pub use config::{FactorBasePolicy, Format, Mode, SurveyConfig};
pub use emit::{emit, CensusRow, HeightRow, QuadRow, QuarticRow, Record};
pub use error::{Result, SurveyError};
pub use fit::{fit_columns, log_log_fit, slope_fit, LinearFit};
pub use survey::{run_survey, tasks, Skip, SurveySummary};

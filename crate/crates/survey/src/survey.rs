//! Survey orchestration: enumerate the fields in range, reuse cached results,
//! compute the rest in parallel, and emit one table.

use std::collections::HashSet;
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use cmorbit::classgroup::ClassGroupParams;
use cmorbit::cm::enumerate_cm_types;
use cmorbit::exact::arith::fundamental_discriminants;
use cmorbit::exact::Poly;
use cmorbit::field::{canonical_polynomial, construct_field, quadratic_field, NumberField};
use cmorbit::heights::{calibrate, height_report, Calibration, HeightReport};
use cmorbit::orbit::{analyze, OrbitReport};
use cmorbit::siegel::census;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cache::{Cache, CacheRecord};
use crate::config::{Mode, SurveyConfig};
use crate::emit::{emit, write_output, CensusRow, HeightRow, QuadRow, QuarticRow, Record};
use crate::error::{Result, SurveyError};

/// One field (or census bound) of the survey range.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Task {
    pub key: String,
    pub input: TaskInput,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TaskInput {
    Discriminant(i64),
    /// Coefficients of the canonical defining polynomial, constant term first.
    Polynomial(Vec<i64>),
    Bound(u64),
}

/// A field that was not processed, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skip {
    pub key: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SurveySummary {
    pub mode: Mode,
    pub candidates: usize,
    pub processed: usize,
    pub skipped: Vec<Skip>,
    pub cache_hits: usize,
    pub computed: usize,
    pub quarantined: usize,
    pub records: Vec<Record>,
    pub output: Option<PathBuf>,
    /// The emitted table, if any record was produced.
    pub rendered: Option<String>,
}

impl SurveySummary {
    /// 0 when every field was processed, 3 when some were skipped.
    pub fn exit_code(&self) -> i32 {
        if self.skipped.is_empty() {
            0
        } else {
            3
        }
    }
}

/// Cached result of one quadratic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadPayload {
    pub orbit: OrbitReport,
    pub divisors: Vec<u64>,
    pub height: Option<HeightReport>,
}

/// Cached result of one quartic field.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuarticPayload {
    pub orbit: OrbitReport,
    pub polykey: String,
}

fn polykey(k: &NumberField) -> (String, Vec<i64>) {
    let p = canonical_polynomial(k);
    let coeffs = p.coeffs().iter().map(|c| c.to_i64().expect("small coefficients")).collect();
    (p.to_string(), coeffs)
}

fn discriminant_tasks(cfg: &SurveyConfig) -> Vec<Task> {
    let r = cfg.discriminants.as_ref().expect("validated");
    fundamental_discriminants(r.min, r.max)
        .into_iter()
        .map(|d| Task { key: format!("D={d}"), input: TaskInput::Discriminant(d) })
        .collect()
}

/// Distinct CM fields `Q[x]/(x^4 + A x^2 + B)` in the box, keyed by their
/// canonical polynomial and listed in order of first appearance.
pub fn quartic_tasks(cfg: &SurveyConfig) -> Vec<Task> {
    let b = cfg.quartic.as_ref().expect("validated");
    let mut polys = Vec::new();
    for a in b.a_min..=b.a_max {
        for c in b.b_min..=b.b_max {
            if a * a > 4 * c {
                polys.push([c, 0, a, 0, 1]);
            }
        }
    }
    let fields: Vec<Option<(String, Vec<i64>, u64)>> = polys
        .par_iter()
        .map(|p| {
            let k = construct_field(&Poly::from_i64(p)).ok()?;
            if !k.is_cm() {
                return None;
            }
            let disc = k.discriminant().to_u64().or_else(|| (-k.discriminant()).to_u64())?;
            let (key, coeffs) = polykey(&k);
            Some((key, coeffs, disc))
        })
        .collect();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for (key, coeffs, disc) in fields.into_iter().flatten() {
        if b.max_discriminant.is_some_and(|m| disc > m) {
            continue;
        }
        if seen.insert(key.clone()) {
            out.push(Task { key, input: TaskInput::Polynomial(coeffs) });
        }
    }
    out
}

/// The survey range of a configuration.
pub fn tasks(cfg: &SurveyConfig) -> Vec<Task> {
    match cfg.mode {
        Mode::Quad | Mode::Heights => discriminant_tasks(cfg),
        Mode::Quartic => quartic_tasks(cfg),
        Mode::Census => {
            let mut xs = cfg.census.as_ref().expect("validated").x.clone();
            xs.sort_unstable();
            xs.dedup();
            xs.into_iter().map(|x| Task { key: format!("X={x}"), input: TaskInput::Bound(x) }).collect()
        }
    }
}

fn now_unix() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("payloads serialize")
}

fn orbit_of(k: &NumberField, params: &ClassGroupParams) -> cmorbit::Result<(OrbitReport, Vec<u64>)> {
    let started = now_unix();
    let t0 = Instant::now();
    let types = enumerate_cm_types(k)?;
    let t = types.iter().find(|t| t.is_primitive()).unwrap_or(&types[0]);
    let a = analyze(t, params)?;
    let divisors = a.class_group.elementary_divisors().iter().map(|d| d.to_u64().unwrap_or(u64::MAX)).collect();
    let report = a.report(started, t0.elapsed().as_millis() as u64, params)?;
    Ok((report, divisors))
}

struct Context {
    params: ClassGroupParams,
    precision: u32,
    height_limit: u64,
    calibration: Option<Calibration>,
}

fn compute(task: &Task, mode: Mode, ctx: &Context) -> cmorbit::Result<Value> {
    match (&task.input, mode) {
        (TaskInput::Discriminant(d), Mode::Quad) => {
            let k = quadratic_field(*d)?;
            let (orbit, divisors) = orbit_of(&k, &ctx.params)?;
            let height = match &ctx.calibration {
                Some(cal) if d.unsigned_abs() <= ctx.height_limit => Some(height_report(*d, cal, ctx.precision)?),
                _ => None,
            };
            Ok(to_value(&QuadPayload { orbit, divisors, height }))
        }
        (TaskInput::Discriminant(d), Mode::Heights) => {
            let cal = ctx.calibration.as_ref().expect("calibrated for height modes");
            Ok(to_value(&height_report(*d, cal, ctx.precision)?))
        }
        (TaskInput::Polynomial(c), Mode::Quartic) => {
            let k = construct_field(&Poly::from_i64(c))?;
            let (orbit, _) = orbit_of(&k, &ctx.params)?;
            Ok(to_value(&QuarticPayload { orbit, polykey: task.key.clone() }))
        }
        (TaskInput::Bound(x), Mode::Census) => Ok(to_value(&CensusRow { x: *x, n: census(*x)? })),
        _ => Err(cmorbit::Error::Unsupported(format!("task {} in {mode} mode", task.key))),
    }
}

fn malformed(e: serde_json::Error) -> SurveyError {
    SurveyError::Malformed(e.to_string())
}

/// Turn a cached payload into its output row.
pub fn record_of(mode: Mode, payload: &Value) -> Result<Record> {
    Ok(match mode {
        Mode::Quad => {
            let p: QuadPayload = serde_json::from_value(payload.clone()).map_err(malformed)?;
            let clgroup = if p.divisors.is_empty() {
                "1".to_string()
            } else {
                p.divisors.iter().map(u64::to_string).collect::<Vec<_>>().join("x")
            };
            Record::Quad(QuadRow {
                d: p.orbit.discriminant,
                h: p.orbit.class_number,
                clgroup,
                deg: p.orbit.moduli_degree,
                isogeny_stat: p.orbit.isogeny_statistic,
                h_l: p.height.as_ref().map(|h| h.h_l),
                h_period: p.height.as_ref().map(|h| h.h_period),
                disc: p.height.as_ref().map(|h| h.discrepancy),
            })
        }
        Mode::Quartic => {
            let p: QuarticPayload = serde_json::from_value(payload.clone()).map_err(malformed)?;
            let o = p.orbit;
            Record::Quartic(QuarticRow {
                polykey: p.polykey,
                disc_e: o.discriminant,
                disc_e0: o.real_discriminant,
                h_e: o.class_number,
                h_e0: o.real_class_number,
                h_estar: o.reflex_class_number,
                ker: o.kernel,
                h_sub: o.subgroup,
                deg: o.moduli_degree,
                stat: o.isogeny_statistic,
            })
        }
        Mode::Heights => {
            let h: HeightReport = serde_json::from_value(payload.clone()).map_err(malformed)?;
            Record::Height(HeightRow {
                d: h.discriminant,
                h_class_number: h.class_number,
                l0_num: h.l0_num,
                l0_den: h.l0_den,
                lprime0: h.lprime0,
                h_l: h.h_l,
                h_period: h.h_period,
                discrepancy: h.discrepancy,
            })
        }
        Mode::Census => Record::Census(serde_json::from_value(payload.clone()).map_err(malformed)?),
    })
}

/// Run a survey. Results already in the cache are reused; the rest are
/// computed on `cfg.jobs` threads and appended to the cache. The table is
/// written to `cfg.output` when set.
pub fn run_survey(cfg: &SurveyConfig) -> Result<SurveySummary> {
    cfg.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| SurveyError::ConfigInvalid(e.to_string()))?;
    let tasks = pool.install(|| tasks(cfg));
    if tasks.is_empty() {
        return Err(SurveyError::ConfigInvalid("the range contains no fields".into()));
    }
    let mut cache = Cache::open(cfg.cache.as_deref())?;
    let params = cfg.parameter_echo();
    let mut payloads: Vec<Option<Value>> = tasks
        .iter()
        .map(|t| cache.get(&t.key, cfg.mode, &params).map(|r| r.payload.clone()))
        .collect();
    let cache_hits = payloads.iter().filter(|p| p.is_some()).count();
    let missing: Vec<usize> = (0..tasks.len()).filter(|&i| payloads[i].is_none()).collect();
    let needs_heights = matches!(cfg.mode, Mode::Heights) || (cfg.mode == Mode::Quad && cfg.height_limit > 0);
    let calibration = if needs_heights && !missing.is_empty() { Some(calibrate(cfg.precision)?) } else { None };
    let ctx = Context {
        params: cfg.class_group_params(),
        precision: cfg.precision,
        height_limit: cfg.height_limit,
        calibration,
    };
    let results: Vec<(usize, cmorbit::Result<Value>)> =
        pool.install(|| missing.par_iter().map(|&i| (i, compute(&tasks[i], cfg.mode, &ctx))).collect());
    let mut skipped = Vec::new();
    for (i, r) in results {
        match r {
            Ok(v) => {
                cache.insert(CacheRecord::new(tasks[i].key.clone(), cfg.mode, params.clone(), v.clone()));
                payloads[i] = Some(v);
            }
            Err(e) => skipped.push(Skip { key: tasks[i].key.clone(), reason: e.to_string() }),
        }
    }
    cache.flush()?;
    let records = payloads.iter().flatten().map(|p| record_of(cfg.mode, p)).collect::<Result<Vec<_>>>()?;
    let rendered = if records.is_empty() { None } else { Some(emit(&records, cfg.format)?) };
    if let (Some(path), Some(text)) = (&cfg.output, &rendered) {
        write_output(path, text)?;
    }
    Ok(SurveySummary {
        mode: cfg.mode,
        candidates: tasks.len(),
        processed: records.len(),
        cache_hits,
        computed: missing.len() - skipped.len(),
        quarantined: cache.quarantined(),
        skipped,
        records,
        output: cfg.output.clone(),
        rendered,
    })
}

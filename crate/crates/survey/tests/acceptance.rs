//! Acceptance suite. Prints one line per criterion and exits non-zero if any
//! criterion fails.

#[path = "../../core/tests/oracles/mod.rs"]
mod oracles;

use std::process::ExitCode;
use std::time::Instant;

use cmorbit::classgroup::{reduced_forms, reduced_forms_class_group, ClassGroupParams};
use cmorbit::cm::{enumerate_cm_types, is_self_reflex, reflex};
use cmorbit::exact::arith::fundamental_discriminants;
use cmorbit::exact::Poly;
use cmorbit::field::{canonical_polynomial, construct_field, quadratic_field, NumberField};
use cmorbit::heights::{
    calibrate, class_number_value, faltings_height_l, faltings_height_period, kronecker_character,
    l_value_at_zero, BOST_THRESHOLD, CALIBRATION_DISCRIMINANTS, DEFAULT_PRECISION,
};
use cmorbit::ideal::count_ideals_of_norm;
use cmorbit::orbit::analyze;
use cmorbit::siegel::{census, census_brute_force, growth_fit, height_bound_check};
use cmorbit_survey::survey::TaskInput;
use cmorbit_survey::{log_log_fit, run_survey, tasks, Mode, SurveyConfig};
use num_traits::ToPrimitive;

const CLASS_GROUP_RANGE: i64 = 10_000;
const CLASS_GROUP_BUDGET_SECS: f64 = 600.0;
const HEIGHT_RANGE: i64 = 500;
const HEIGHT_TOLERANCE: f64 = 1e-8;
const HEIGHT_GROWTH_CAP: f64 = 2.0;
const BRAUER_SIEGEL_WINDOW: (f64, f64) = (0.4, 0.6);
const QUARTIC_BOX: (i64, i64) = (11, 30);
const QUARTIC_MAX_DISCRIMINANT: u64 = 100_000_000;
const QUARTIC_MIN_FIELDS: usize = 50;
const ISOGENY_RANGE: i64 = 100_000;
const ISOGENY_CROSS_CHECK: i64 = 10_000;
const ISOGENY_EXPECTED: (f64, f64) = (0.10, 0.40);
const BOUND_RANGE: u64 = 100_000;
const CENSUS_ORACLE_LIMIT: u64 = 16;
const CENSUS_FIT: (u64, u64) = (4, 64);
const CENSUS_MIN_SLOPE: f64 = 3.0;
const IDEAL_NORM_LIMIT: u64 = 500;
const DETERMINISM_RANGE: i64 = -200;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

/// Per-discriminant data from the quadratic sweep, shared by several criteria.
struct QuadRow {
    d: i64,
    h: u64,
    relation_matches: bool,
    degree_matches: bool,
    statistic: u64,
    max_a: u64,
}

fn quad_sweep(params: &ClassGroupParams) -> (Vec<QuadRow>, Vec<String>, f64) {
    let t0 = Instant::now();
    let mut rows = Vec::new();
    let mut errors = Vec::new();
    for d in fundamental_discriminants(-CLASS_GROUP_RANGE, -1) {
        let run = || -> cmorbit::Result<QuadRow> {
            let k = quadratic_field(d)?;
            let types = enumerate_cm_types(&k)?;
            let a = analyze(&types[0], params)?;
            let forms = reduced_forms_class_group(d)?;
            let divisors: Vec<u64> = a.class_group.elementary_divisors().iter().map(|x| x.to_u64().unwrap()).collect();
            let h = forms.order();
            Ok(QuadRow {
                d,
                h,
                relation_matches: divisors == forms.elementary_divisors,
                degree_matches: a.moduli_degree().to_u64() == Some(h),
                statistic: a.class_group.isogeny_statistic().to_u64().unwrap(),
                max_a: forms.forms.iter().map(|f| f.a as u64).max().unwrap(),
            })
        };
        match run() {
            Ok(r) => rows.push(r),
            Err(e) => errors.push(format!("D={d}: {e}")),
        }
    }
    (rows, errors, t0.elapsed().as_secs_f64())
}

fn class_groups(rows: &[QuadRow], errors: &[String], secs: f64) -> Outcome {
    let bad: Vec<i64> = rows.iter().filter(|r| !r.relation_matches).map(|r| r.d).collect();
    let pass = errors.is_empty() && bad.is_empty() && secs <= CLASS_GROUP_BUDGET_SECS;
    outcome(
        pass,
        format!("{} discriminants, {} mismatches, {} errors, {:.1}s", rows.len(), bad.len(), errors.len(), secs),
    )
}

fn analytic_class_numbers(rows: &[QuadRow]) -> Outcome {
    let mut bad = Vec::new();
    for r in rows {
        let l0 = l_value_at_zero(&kronecker_character(r.d).unwrap());
        if l0 != class_number_value(r.d, r.h) {
            bad.push(r.d);
        }
    }
    outcome(bad.is_empty(), format!("{} exact identities, {} failures", rows.len(), bad.len()))
}

fn heights() -> (Outcome, Outcome) {
    let cal = match calibrate(DEFAULT_PRECISION) {
        Ok(c) => c,
        Err(e) => {
            let o = || outcome(false, format!("calibration failed: {e}"));
            return (o(), o());
        }
    };
    let mut worst = (0.0f64, 0);
    let mut count = 0;
    let mut minimum = (f64::INFINITY, 0);
    let mut growth = (f64::NEG_INFINITY, 0);
    let mut errors = 0;
    for d in fundamental_discriminants(-HEIGHT_RANGE, -1) {
        let (Ok(hl), Ok(hp)) = (faltings_height_l(d, &cal, DEFAULT_PRECISION), faltings_height_period(d, &cal, DEFAULT_PRECISION))
        else {
            errors += 1;
            continue;
        };
        if hl < minimum.0 {
            minimum = (hl, d);
        }
        let g = hl / (d.unsigned_abs() as f64).ln();
        if g > growth.0 {
            growth = (g, d);
        }
        if CALIBRATION_DISCRIMINANTS.contains(&d) {
            continue;
        }
        count += 1;
        let gap = (hl - hp).abs();
        if gap > worst.0 {
            worst = (gap, d);
        }
    }
    let dual = outcome(
        errors == 0 && worst.0 <= HEIGHT_TOLERANCE,
        format!(
            "{count} validation points, max |h_L - h_period| = {:.3e} at D={}, alpha={}/{} beta={}/{} c0={:.15}",
            worst.0, worst.1, cal.alpha.0, cal.alpha.1, cal.beta.0, cal.beta.1, cal.c0
        ),
    );
    let bost = outcome(
        errors == 0 && minimum.0 >= BOST_THRESHOLD && growth.0 <= HEIGHT_GROWTH_CAP,
        format!("min h = {:.6} at D={}, max h/log|D| = {:.6} at D={}", minimum.0, minimum.1, growth.0, growth.1),
    );
    (dual, bost)
}

fn brauer_siegel(rows: &[QuadRow]) -> Outcome {
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.d.unsigned_abs() as f64, r.h as f64)).collect();
    match log_log_fit(&pts) {
        Ok(f) => outcome(
            (BRAUER_SIEGEL_WINDOW.0..=BRAUER_SIEGEL_WINDOW.1).contains(&f.slope),
            format!("slope {:.4} over {} discriminants (R^2 {:.3})", f.slope, pts.len(), f.r_squared),
        ),
        Err(e) => outcome(false, e.to_string()),
    }
}

struct QuarticField {
    disc: u64,
    degree: u64,
    primitive: bool,
    double_reflex: Option<bool>,
    class_split: bool,
    degree_identity: bool,
    index_divides: bool,
}

fn quartic_sweep(params: &ClassGroupParams) -> (Vec<QuarticField>, Vec<String>) {
    let mut cfg = SurveyConfig::new(Mode::Quartic);
    cfg.quartic = Some(cmorbit_survey::config::QuarticBox {
        a_min: 1,
        a_max: QUARTIC_BOX.0,
        b_min: 1,
        b_max: QUARTIC_BOX.1,
        max_discriminant: Some(QUARTIC_MAX_DISCRIMINANT),
    });
    let mut out = Vec::new();
    let mut errors = Vec::new();
    for t in tasks(&cfg) {
        let TaskInput::Polynomial(c) = &t.input else { continue };
        let run = || -> cmorbit::Result<QuarticField> {
            let k = construct_field(&Poly::from_i64(c))?;
            let types = enumerate_cm_types(&k)?;
            let ty = types.iter().find(|t| t.is_primitive()).unwrap_or(&types[0]);
            let a = analyze(ty, params)?;
            let r = a.report(0, 0, params)?;
            let double_reflex = if ty.is_primitive() { Some(a.reflex.double_reflex_recovers_field()?) } else { None };
            let index = r.kernel / r.subgroup.max(1);
            Ok(QuarticField {
                disc: k.discriminant().to_u64().unwrap(),
                degree: r.moduli_degree,
                primitive: ty.is_primitive(),
                double_reflex,
                class_split: r.reflex_class_number == r.kernel * r.image,
                degree_identity: r.moduli_degree * r.subgroup == r.reflex_class_number,
                index_divides: r.kernel % r.subgroup == 0 && r.cokernel % index == 0,
            })
        };
        match run() {
            Ok(f) => out.push(f),
            Err(e) => errors.push(format!("{}: {e}", t.key)),
        }
    }
    (out, errors)
}

fn degree_formula(rows: &[QuadRow], quartic: &[QuarticField], errors: &[String]) -> Outcome {
    let g1_bad = rows.iter().filter(|r| !r.degree_matches).count();
    let identities_bad = quartic.iter().filter(|f| !(f.class_split && f.degree_identity && f.index_divides)).count();
    let pts: Vec<(f64, f64)> = quartic.iter().map(|f| (f.disc as f64, f.degree as f64)).collect();
    let fit = log_log_fit(&pts);
    let slope = fit.as_ref().map(|f| f.slope).unwrap_or(f64::NAN);
    let pass = g1_bad == 0 && quartic.len() >= QUARTIC_MIN_FIELDS && identities_bad == 0 && slope > 0.0;
    outcome(
        pass,
        format!(
            "g=1: {} fields, {} with deg != h; quartic: {} accepted, {} skipped, {} identity failures, slope {:.4}",
            rows.len(),
            g1_bad,
            quartic.len(),
            errors.len(),
            identities_bad,
            slope
        ),
    )
}

fn isogeny(rows: &[QuadRow]) -> Outcome {
    let small = rows.iter().filter(|r| r.h > 1 && r.statistic < 2).count();
    let mismatched = rows
        .iter()
        .filter(|r| r.d >= -ISOGENY_CROSS_CHECK && r.statistic != r.max_a)
        .count();
    let pts: Vec<(f64, f64)> = fundamental_discriminants(-ISOGENY_RANGE, -1)
        .into_iter()
        .map(|d| {
            let a = reduced_forms(d).unwrap().iter().map(|f| f.a).max().unwrap();
            (d.unsigned_abs() as f64, a as f64)
        })
        .collect();
    let slope = log_log_fit(&pts).map(|f| f.slope).unwrap_or(f64::NAN);
    let inside = (ISOGENY_EXPECTED.0..=ISOGENY_EXPECTED.1).contains(&slope);
    outcome(
        small == 0 && mismatched == 0 && slope.is_finite(),
        format!(
            "{small} class groups with statistic < 2, {mismatched} relation/form disagreements; slope {:.4} over {} discriminants ({} the expected window {:?})",
            slope,
            pts.len(),
            if inside { "inside" } else { "outside" },
            ISOGENY_EXPECTED
        ),
    )
}

fn height_bound() -> Outcome {
    let s = height_bound_check(3, BOUND_RANGE);
    let census_bad: Vec<u64> =
        (1..=CENSUS_ORACLE_LIMIT).filter(|&x| census(x).ok() != Some(census_brute_force(x))).collect();
    let xs: Vec<u64> = (CENSUS_FIT.0..=CENSUS_FIT.1).collect();
    let slope = growth_fit(&xs).map(|f| f.slope).unwrap_or(f64::NAN);
    outcome(
        s.pass() && census_bad.is_empty() && slope >= CENSUS_MIN_SLOPE,
        format!(
            "{} forms, {} exceptions, worst c/(|D|/3) = {:?}; census mismatches {:?}; growth slope {:.4}",
            s.forms,
            s.exceptions,
            s.worst_ratio(),
            census_bad,
            slope
        ),
    )
}

fn ideal_counts() -> Outcome {
    let fields: [(&str, &[i64]); 5] = [
        ("Q(i)", &[1, 0, 1]),
        ("Q(sqrt -5)", &[5, 0, 1]),
        ("Q(sqrt -23)", &[6, -1, 1]),
        ("Q(zeta5)", &[1, 1, 1, 1, 1]),
        ("x^4+5x^2+3", &[3, 0, 5, 0, 1]),
    ];
    let mut bad = Vec::new();
    for (name, c) in fields {
        let k: NumberField = construct_field(&Poly::from_i64(c)).unwrap();
        for n in 1..=IDEAL_NORM_LIMIT {
            if count_ideals_of_norm(&k, n).ok() != Some(oracles::hnf_ideal_count(&k, n)) {
                bad.push(format!("{name} n={n}"));
            }
        }
    }
    outcome(bad.is_empty(), format!("5 fields, n <= {IDEAL_NORM_LIMIT}, mismatches {bad:?}"))
}

fn reflex_sanity(quartic: &[QuarticField]) -> Outcome {
    let mut notes = Vec::new();
    let g1 = fundamental_discriminants(-200, -1).into_iter().all(|d| {
        let k = quadratic_field(d).unwrap();
        enumerate_cm_types(&k).unwrap().iter().all(|t| {
            reflex(t).map(|r| canonical_polynomial(r.field()) == canonical_polynomial(&k)).unwrap_or(false)
        })
    });
    if !g1 {
        notes.push("g=1 self-duality".to_string());
    }
    let z5 = construct_field(&Poly::from_i64(&[1, 1, 1, 1, 1])).unwrap();
    if !enumerate_cm_types(&z5).unwrap().iter().all(|t| is_self_reflex(t).unwrap_or(false)) {
        notes.push("zeta5 self-reflex".to_string());
    }
    let bq = construct_field(&Poly::from_i64(&[1, 0, 0, 0, 1])).unwrap();
    let bq_types = enumerate_cm_types(&bq).unwrap();
    if bq_types.len() != 4 || bq_types.iter().any(|t| t.is_primitive()) {
        notes.push("biquadratic imprimitivity".to_string());
    }
    let primitive: Vec<&QuarticField> = quartic.iter().filter(|f| f.primitive).collect();
    let double_bad = primitive.iter().filter(|f| f.double_reflex != Some(true)).count();
    if double_bad > 0 {
        notes.push(format!("{double_bad} double-reflex failures"));
    }
    outcome(
        notes.is_empty(),
        format!("double reflex on {} primitive surveyed types; failures {notes:?}", primitive.len()),
    )
}

fn determinism() -> Outcome {
    let run = |jobs: usize| {
        let mut cfg = SurveyConfig::new(Mode::Quad);
        cfg.discriminants = Some(cmorbit_survey::config::DiscriminantRange { min: DETERMINISM_RANGE, max: -1 });
        cfg.jobs = jobs;
        run_survey(&cfg).ok().and_then(|s| s.rendered)
    };
    let first = run(1);
    let again = run(1);
    let parallel = run(3);
    let pass = first.is_some() && first == again && first == parallel;
    let rows = first.as_deref().map_or(0, |t| t.lines().count().saturating_sub(1));
    outcome(pass, format!("{rows} rows, jobs 1/1/3 byte-identical: {pass}"))
}

fn main() -> ExitCode {
    let params = ClassGroupParams::default();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();
    let mut report = |n: u32, name: &'static str, o: Outcome, secs: f64| {
        println!("criterion {n:>2} [{}] {name}: {} ({secs:.1}s)", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        results.push((n, name, o));
    };

    let t = Instant::now();
    let (rows, errors, secs) = quad_sweep(&params);
    report(1, "class group oracle equivalence", class_groups(&rows, &errors, secs), t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(2, "L(0) = 2h/w", analytic_class_numbers(&rows), t.elapsed().as_secs_f64());
    let t = Instant::now();
    let (dual, bost) = heights();
    let secs = t.elapsed().as_secs_f64();
    report(3, "dual-route heights", dual, secs);
    report(4, "height floor and growth", bost, 0.0);
    let t = Instant::now();
    report(5, "Brauer-Siegel trend", brauer_siegel(&rows), t.elapsed().as_secs_f64());
    let t = Instant::now();
    let (quartic, qerrors) = quartic_sweep(&params);
    for e in &qerrors {
        println!("    skipped {e}");
    }
    report(6, "degree formula", degree_formula(&rows, &quartic, &qerrors), t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(7, "isogeny statistic", isogeny(&rows), t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(8, "height bound and census", height_bound(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(9, "ideal counting", ideal_counts(), t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(10, "reflex sanity", reflex_sanity(&quartic), t.elapsed().as_secs_f64());
    let t = Instant::now();
    report(11, "determinism", determinism(), t.elapsed().as_secs_f64());

    let failed: Vec<u32> = results.iter().filter(|r| !r.2.pass).map(|r| r.0).collect();
    println!("acceptance: {} of {} criteria pass", results.len() - failed.len(), results.len());
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cmorbit::classgroup::{ClassGroup, ClassGroupParams};
use cmorbit::cm::{enumerate_cm_types, reflex, CmType};
use cmorbit::exact::Poly;
use cmorbit::field::{construct_field, quadratic_field, NumberField};
use cmorbit::heights::{calibrate, height_report};
use cmorbit::orbit::orbit_report;
use cmorbit_survey::emit::{emit, write_output, CensusRow, Record};
use cmorbit_survey::{fit_columns, run_survey, Format, SurveyConfig, SurveyError};
use serde::Serialize;
use serde_json::json;

#[derive(Parser, Debug)]
#[command(name = "cmorbit", version, about = "Class groups, reflex type norms, field-of-moduli degrees and heights of CM fields")]
struct Cli {
    /// Working precision in bits.
    #[arg(long, global = true)]
    precision: Option<u32>,
    /// JSON-lines result cache.
    #[arg(long, global = true)]
    cache: Option<PathBuf>,
    /// Write output here instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for random relation search.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

/// A number field given by a discriminant or a defining polynomial.
#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
struct FieldArg {
    /// Fundamental discriminant of an imaginary quadratic field.
    #[arg(long, allow_hyphen_values = true)]
    disc: Option<i64>,
    /// Integer coefficients, constant term first, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    poly: Option<Vec<i64>>,
}

impl FieldArg {
    fn field(&self) -> cmorbit::Result<NumberField> {
        match (&self.disc, &self.poly) {
            (Some(d), _) => quadratic_field(*d),
            (_, Some(c)) => construct_field(&Poly::from_i64(c)),
            _ => unreachable!("clap requires one of the two"),
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Class group structure and the isogeny statistic.
    Classgroup(FieldArg),
    /// CM types and their primitivity.
    Cmtypes(FieldArg),
    /// Reflex field, reflex type and type-norm exponent of a CM type.
    Reflex {
        #[command(flatten)]
        field: FieldArg,
        /// CM type as a bitmask over the embeddings; all types when omitted.
        #[arg(long = "type")]
        mask: Option<u32>,
    },
    /// Field-of-moduli degree and the orbit report of a CM type.
    Degree {
        #[command(flatten)]
        field: FieldArg,
        #[arg(long = "type")]
        mask: Option<u32>,
    },
    /// Faltings height of the CM elliptic curves of discriminant D by both routes.
    Height {
        #[arg(long, allow_hyphen_values = true)]
        disc: i64,
    },
    /// Number of CM points of naive height at most X.
    Census {
        #[arg(required = true)]
        x: Vec<u64>,
    },
    /// Run a survey described by a JSON configuration file.
    Survey { config: PathBuf },
    /// Least-squares fit between two columns of a CSV table.
    Fit {
        table: PathBuf,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        /// Fit the logarithms of the absolute values.
        #[arg(long)]
        log: bool,
    },
}

fn params(cli: &Cli) -> ClassGroupParams {
    let mut p = ClassGroupParams::default();
    if let Some(s) = cli.seed {
        p.seed = s;
    }
    p
}

fn pick_type(k: &NumberField, mask: Option<u32>) -> cmorbit::Result<CmType> {
    match mask {
        Some(m) => CmType::from_mask(k, m),
        None => {
            let types = enumerate_cm_types(k)?;
            Ok(types.iter().find(|t| t.is_primitive()).unwrap_or(&types[0]).clone())
        }
    }
}

fn to_json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn deliver(cli: &Cli, text: &str) -> Result<(), SurveyError> {
    match &cli.out {
        Some(p) => write_output(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run(cli: &Cli) -> Result<i32, SurveyError> {
    let prec = cli.precision.unwrap_or(128);
    match &cli.command {
        Command::Classgroup(f) => {
            let k = f.field()?;
            let cl = ClassGroup::with_params(&k, &params(cli))?;
            let divisors: Vec<String> = cl.elementary_divisors().iter().map(|d| d.to_string()).collect();
            deliver(
                cli,
                &to_json(&json!({
                    "polynomial": k.poly().to_string(),
                    "discriminant": k.discriminant().to_string(),
                    "elementary_divisors": divisors,
                    "order": cl.order().to_string(),
                    "isogeny_statistic": cl.isogeny_statistic().to_string(),
                })),
            )?;
        }
        Command::Cmtypes(f) => {
            let k = f.field()?;
            let rows: Vec<_> = enumerate_cm_types(&k)?
                .iter()
                .map(|t| json!({ "mask": t.mask(), "embeddings": t.embeddings(), "primitive": t.is_primitive() }))
                .collect();
            deliver(cli, &to_json(&rows))?;
        }
        Command::Reflex { field, mask } => {
            let k = field.field()?;
            let types = match mask {
                Some(m) => vec![CmType::from_mask(&k, *m)?],
                None => enumerate_cm_types(&k)?,
            };
            let mut rows = Vec::new();
            for t in &types {
                let r = reflex(t)?;
                rows.push(json!({
                    "mask": t.mask(),
                    "primitive": t.is_primitive(),
                    "reflex_polynomial": r.field().poly().to_string(),
                    "reflex_discriminant": r.field().discriminant().to_string(),
                    "reflex_mask": r.reflex_type().mask(),
                    "exponent": r.exponent(),
                    "double_reflex_recovers_field": r.double_reflex_recovers_field()?,
                }));
            }
            deliver(cli, &to_json(&rows))?;
        }
        Command::Degree { field, mask } => {
            let k = field.field()?;
            let t = pick_type(&k, *mask)?;
            deliver(cli, &to_json(&orbit_report(&t, &params(cli))?))?;
        }
        Command::Height { disc } => {
            let cal = calibrate(prec)?;
            deliver(cli, &to_json(&height_report(*disc, &cal, prec)?))?;
        }
        Command::Census { x } => {
            let rows = x
                .iter()
                .map(|&x| Ok(Record::Census(CensusRow { x, n: cmorbit::siegel::census(x)? })))
                .collect::<Result<Vec<_>, SurveyError>>()?;
            deliver(cli, &emit(&rows, cli.format.unwrap_or_default())?)?;
        }
        Command::Survey { config } => {
            let mut cfg = SurveyConfig::load(config)?;
            if let Some(p) = cli.precision {
                cfg.precision = p;
            }
            if let Some(c) = &cli.cache {
                cfg.cache = Some(c.clone());
            }
            if let Some(o) = &cli.out {
                cfg.output = Some(o.clone());
            }
            if let Some(f) = cli.format {
                cfg.format = f;
            }
            if let Some(j) = cli.jobs {
                cfg.jobs = j;
            }
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            let summary = run_survey(&cfg)?;
            if cfg.output.is_none() {
                if let Some(t) = &summary.rendered {
                    print!("{t}");
                }
            }
            eprintln!(
                "{} mode: {} in range, {} processed ({} cached, {} computed), {} skipped, {} quarantined",
                summary.mode,
                summary.candidates,
                summary.processed,
                summary.cache_hits,
                summary.computed,
                summary.skipped.len(),
                summary.quarantined
            );
            for s in &summary.skipped {
                eprintln!("skipped {}: {}", s.key, s.reason);
            }
            return Ok(summary.exit_code());
        }
        Command::Fit { table, x, y, log } => {
            let text = std::fs::read_to_string(table).map_err(|e| SurveyError::io(table, e))?;
            let f = fit_columns(&text, x, y, *log)?;
            deliver(cli, &to_json(&f))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(j) = cli.jobs {
        if j == 0 {
            eprintln!("error: --jobs must be at least 1");
            return ExitCode::from(2);
        }
    }
    let outcome = std::panic::catch_unwind(|| run(&cli));
    match outcome {
        Ok(Ok(code)) => ExitCode::from(code as u8),
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
        Err(_) => ExitCode::from(4),
    }
}

//! Command line driver: derive the system and the recursion, optionally
//! trace the expansion, verify everything against exact determinants, and
//! emit text, LaTeX, or JSON.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{run, ExpansionResult};
use crate::error::Error;
use crate::oracle::{
    check_annihilates_coeffs, check_equation_cached, check_reduction, CheckReport, DetCache,
};
use crate::output::{
    coefficient_strings, equations_json, numeric_coefficient_strings, numeric_recursion_latex,
    numeric_recursion_text, recursion_latex, recursion_text, trace_text, ArtifactJson,
    MinimalOrderJson, RecursionJson, VerificationJson,
};
use crate::solver::{
    assemble, char_recursion, eliminate_by_substitution, numeric_minimal_order, numeric_recursion,
    RecursionPoly, TransferMatrix,
};
use crate::symbols::{BandValues, Rational, SymbolTable};

pub const SCHEMA_VERSION: u32 = 1;
const SYMBOLIC_MAX_ORDER: u32 = 4;
const NUMERIC_MAX_ORDER: u32 = 8;
const DEFAULT_N_PAST_DEGREE: usize = 15;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    /// Recursion coefficients as polynomials in the band symbols.
    Symbolic,
    /// Band symbols substituted by numbers before solving.
    Numeric,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Latex,
    Json,
}

/// Derives the determinant recursion for a banded Toeplitz family.
#[derive(Debug, Parser)]
#[command(name = "bandrec", version, about)]
pub struct Cli {
    /// Toeplitz order of the family (bandwidth 2R-1)
    #[arg(long)]
    pub order: u32,

    /// Defaults to symbolic for orders up to 4 and numeric beyond
    #[arg(long, value_enum)]
    pub mode: Option<Mode>,

    #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
    pub output: OutputFormat,

    /// Print the round-by-round expansion to stderr
    #[arg(long)]
    pub trace: bool,

    /// Replay equations, reductions, and the recursion against exact
    /// determinants
    #[arg(long)]
    pub verify: bool,

    /// Seed for random band values
    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    /// Random substitutions used by --verify and --min-check
    #[arg(long, default_value_t = 10)]
    pub trials: u32,

    /// Largest family index checked by --verify (default: degree + 15)
    #[arg(long)]
    pub n_max: Option<usize>,

    /// Measure the minimal recurrence order on random substitutions
    #[arg(long)]
    pub min_check: bool,

    /// Explicit band values, e.g. "a=2,b=-1,c=3,d=1,e=-2" or "t0=2,t1=1/2,.."
    #[arg(long)]
    pub values: Option<String>,

    /// Write the artifact to a file instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Worker threads for verification trials
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Internal(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Internal(m) => write!(f, "{m}"),
        }
    }
}

fn internal(e: Error) -> CliError {
    CliError::Internal(e.to_string())
}

fn parse_values(list: &str, table: &SymbolTable) -> Result<BandValues, CliError> {
    let mut map = BTreeMap::new();
    for pair in list.split(',') {
        let (name, value) = pair
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("expected name=value, got '{pair}'")))?;
        let name = name.trim();
        let offset = table
            .offset_by_name(name)
            .or_else(|| {
                let k: i32 = name.strip_prefix('t')?.parse().ok()?;
                table.in_band(i64::from(k)).then_some(k)
            })
            .ok_or_else(|| {
                CliError::Usage(format!("unknown band symbol '{name}' at this order"))
            })?;
        let v = Rational::from_str(value.trim())
            .map_err(|_| CliError::Usage(format!("cannot parse value '{value}'")))?;
        map.insert(offset, v);
    }
    BandValues::new(table.order(), map).map_err(|e| CliError::Usage(e.to_string()))
}

enum Derived {
    Symbolic(RecursionPoly),
    Numeric(Vec<Rational>),
}

impl Derived {
    fn degree(&self) -> usize {
        match self {
            Derived::Symbolic(rec) => rec.degree(),
            Derived::Numeric(coeffs) => coeffs.len() - 1,
        }
    }
}

struct Context {
    res: ExpansionResult,
    tm: TransferMatrix,
    table: SymbolTable,
    derived: Derived,
    /// band values the artifact is tied to (numeric mode) or the first
    /// verification substitution (symbolic mode)
    values: BandValues,
    values_are_seeded: bool,
}

fn derive(cli: &Cli, mode: Mode) -> Result<Context, CliError> {
    let table = SymbolTable::new(cli.order).map_err(internal)?;
    let res = run(cli.order).map_err(internal)?;
    let tm = assemble(&res).map_err(internal)?;

    let (values, values_are_seeded) = match &cli.values {
        Some(list) => (parse_values(list, &table)?, false),
        None => {
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            (BandValues::random_nonzero(cli.order, &mut rng), true)
        }
    };

    let derived = match mode {
        Mode::Symbolic => {
            let rec = char_recursion(&tm).map_err(internal)?;
            match eliminate_by_substitution(&res) {
                Ok(pe) if pe.recursion != rec => eprintln!(
                    "note: substitution-route recursion differs from the characteristic one; \
                     keeping the characteristic result"
                ),
                Ok(_) => {}
                Err(e) => eprintln!(
                    "note: substitution-route elimination unavailable ({e}); \
                     using the characteristic route"
                ),
            }
            Derived::Symbolic(rec)
        }
        Mode::Numeric => Derived::Numeric(numeric_recursion(&tm, &values).map_err(internal)?),
    };

    Ok(Context {
        res,
        tm,
        table,
        derived,
        values,
        values_are_seeded,
    })
}

fn annihilation_coeffs(ctx: &Context, values: &BandValues) -> Result<Vec<Rational>, Error> {
    match &ctx.derived {
        Derived::Symbolic(rec) => rec.poly().substitute(values),
        Derived::Numeric(_) => numeric_recursion(&ctx.tm, values),
    }
}

fn verify(cli: &Cli, ctx: &Context) -> Result<VerificationJson, CliError> {
    let deg = ctx.derived.degree();
    let n_max = cli.n_max.unwrap_or(deg + DEFAULT_N_PAST_DEGREE);
    if n_max <= deg {
        return Err(CliError::Usage(format!(
            "--n-max must exceed the recursion degree {deg}"
        )));
    }

    let tag = |report: CheckReport| -> CheckReport {
        if ctx.values_are_seeded {
            report.with_seed(cli.seed)
        } else {
            report
        }
    };

    let mut cache = DetCache::new(ctx.values.clone());
    let mut equation_checks = Vec::with_capacity(ctx.res.equations.len());
    for eq in &ctx.res.equations {
        let report = check_equation_cached(eq, &mut cache, 1, 5).map_err(internal)?;
        equation_checks.push(tag(report));
    }

    let mut reduction_checks = Vec::with_capacity(ctx.res.reductions.len());
    for red in &ctx.res.reductions {
        let report = check_reduction(&red.from, &red.to, &ctx.values, 5).map_err(internal)?;
        reduction_checks.push(tag(report));
    }

    let annihilation_checks = match &ctx.derived {
        Derived::Numeric(coeffs) => {
            let report = check_annihilates_coeffs(coeffs, &ctx.values, deg + 1, n_max);
            vec![tag(report)]
        }
        Derived::Symbolic(_) => {
            let one_trial = |i: u32| -> Result<CheckReport, Error> {
                let trial_seed = cli.seed.wrapping_add(u64::from(i));
                let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
                let values = BandValues::random_nonzero(cli.order, &mut rng);
                let coeffs = annihilation_coeffs(ctx, &values)?;
                Ok(check_annihilates_coeffs(&coeffs, &values, deg + 1, n_max)
                    .with_seed(trial_seed))
            };
            let mut reports = if cli.jobs > 1 {
                let pool = rayon::ThreadPoolBuilder::new()
                    .num_threads(cli.jobs)
                    .build()
                    .map_err(|e| CliError::Internal(e.to_string()))?;
                pool.install(|| {
                    (0..cli.trials)
                        .into_par_iter()
                        .map(one_trial)
                        .collect::<Result<Vec<_>, Error>>()
                })
                .map_err(internal)?
            } else {
                (0..cli.trials)
                    .map(one_trial)
                    .collect::<Result<Vec<_>, Error>>()
                    .map_err(internal)?
            };
            if !ctx.values_are_seeded {
                let coeffs = annihilation_coeffs(ctx, &ctx.values).map_err(internal)?;
                reports.insert(
                    0,
                    check_annihilates_coeffs(&coeffs, &ctx.values, deg + 1, n_max),
                );
            }
            reports
        }
    };

    let pass = equation_checks
        .iter()
        .chain(&reduction_checks)
        .chain(&annihilation_checks)
        .all(|r| r.pass);
    Ok(VerificationJson {
        seed: cli.seed,
        trials: cli.trials,
        n_max,
        equation_checks,
        reduction_checks,
        annihilation_checks,
        pass,
    })
}

pub fn execute(cli: &Cli) -> Result<i32, CliError> {
    if cli.order < 1 {
        return Err(CliError::Usage("--order must be at least 1".into()));
    }
    if cli.trials < 1 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    if cli.jobs < 1 {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }
    let mode = cli.mode.unwrap_or(if cli.order <= SYMBOLIC_MAX_ORDER {
        Mode::Symbolic
    } else {
        Mode::Numeric
    });
    if mode == Mode::Symbolic && cli.order > SYMBOLIC_MAX_ORDER {
        return Err(CliError::Usage(format!(
            "symbolic mode supports orders up to {SYMBOLIC_MAX_ORDER} (the order-5 system \
             already has 70 families); use --mode numeric"
        )));
    }
    if cli.order > NUMERIC_MAX_ORDER {
        return Err(CliError::Usage(format!(
            "orders beyond {NUMERIC_MAX_ORDER} are out of scope for this tool"
        )));
    }

    let ctx = derive(cli, mode)?;

    if cli.trace {
        eprint!("{}", trace_text(&ctx.res, &ctx.table));
    }

    let verification = if cli.verify {
        Some(verify(cli, &ctx)?)
    } else {
        None
    };
    let minimal_order = if cli.min_check {
        let deg = ctx.derived.degree();
        let observed =
            numeric_minimal_order(cli.order, deg, cli.trials, cli.seed).map_err(internal)?;
        Some(MinimalOrderJson {
            observed,
            degree: deg,
            trials: cli.trials,
            pass: observed <= deg,
        })
    } else {
        None
    };

    let ok = verification.as_ref().is_none_or(|v| v.pass)
        && minimal_order.as_ref().is_none_or(|m| m.pass);

    if cli.output != OutputFormat::Json {
        if let Some(v) = &verification {
            eprintln!(
                "verify: {} equation, {} reduction, {} annihilation checks: {}",
                v.equation_checks.len(),
                v.reduction_checks.len(),
                v.annihilation_checks.len(),
                if v.pass { "pass" } else { "FAIL" }
            );
        }
        if let Some(m) = &minimal_order {
            eprintln!(
                "minimal order observed {} against degree {}: {}",
                m.observed,
                m.degree,
                if m.pass { "pass" } else { "FAIL" }
            );
        }
    }

    let (text, latex, coefficients) = match &ctx.derived {
        Derived::Symbolic(rec) => (
            recursion_text(rec, &ctx.table),
            recursion_latex(rec, &ctx.table),
            coefficient_strings(rec, &ctx.table),
        ),
        Derived::Numeric(coeffs) => (
            numeric_recursion_text(coeffs),
            numeric_recursion_latex(coeffs),
            numeric_coefficient_strings(coeffs),
        ),
    };

    let payload = match cli.output {
        OutputFormat::Text => format!("{text}\n"),
        OutputFormat::Latex => format!("{latex}\n"),
        OutputFormat::Json => {
            let artifact = ArtifactJson {
                schema_version: SCHEMA_VERSION,
                order: cli.order,
                mode: match mode {
                    Mode::Symbolic => "symbolic".into(),
                    Mode::Numeric => "numeric".into(),
                },
                values: match (&ctx.derived, cli.verify || cli.min_check) {
                    (Derived::Numeric(_), _) | (_, true) => Some(ctx.values.describe()),
                    _ => None,
                },
                operators: ctx.res.operators.iter().map(|o| o.to_string()).collect(),
                equations: equations_json(&ctx.res, &ctx.table),
                e_sets: ctx.res.e_sets.clone(),
                recursion: RecursionJson {
                    degree: ctx.derived.degree(),
                    coefficients,
                    text,
                    latex,
                },
                verification,
                minimal_order,
            };
            let mut s = serde_json::to_string_pretty(&artifact)
                .map_err(|e| CliError::Internal(e.to_string()))?;
            s.push('\n');
            s
        }
    };

    match &cli.out {
        Some(path) => std::fs::write(path, payload)
            .map_err(|e| CliError::Internal(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{payload}"),
    }

    Ok(if ok { 0 } else { 1 })
}

//! funeq — command-line front end for the exact functional-equation toolkit.
//!
//! Every subcommand runs one pipeline from `funeq-core` and prints a single
//! report, as deterministic JSON (default) or a compact plain rendering.
//! With no subcommand, commands are read from stdin, one per line (batch
//! mode). Exit codes: 0 success; 1 usage error (bad flags, unparsable
//! expression); 2 mathematical obstruction, undetermined verdict, exceeded
//! budget, or failed self-test.

mod parse;
mod selftest;

use std::collections::BTreeMap;
use std::io::{IsTerminal, Read};

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use funeq_core::apps::{
    count_avoiders, enumerate_complete_trees, patterns_report, sierpinski_report,
    sierpinski_walk_counts, standard_pattern, trees_report, OracleRow, TreeFamily,
};
use funeq_core::classify::{classify, ClassifyOptions, Outcome, Verdict};
use funeq_core::conjugacy::find_conjugating_homography_with;
use funeq_core::dynamics::{critical_portrait, CriticalPortrait, PortraitOptions, PortraitOutcome};
use funeq_core::solver::{
    boettcher, julia_psi, solve_fe_standard, verify_fe, FESolution, JuliaOptions, StandardOptions,
};
use funeq_core::{Error, Rat, RationalFunction};
use parse::parse_expression;
use selftest::{Check, SplitMix64};
use serde_json::{json, Map, Value};

const LONG_HELP: &str = "\
EXPRESSIONS:
    --R, --a, --b take arithmetic expressions in the single variable t,
    e.g. \"t^2/(4-3t)\" or \"(2+t)*(4-3*t)/((4+t)*(2-t))\". Operators
    + - * / ^ have the usual precedence; juxtaposition multiplies (\"3t\");
    constants are integers or fractions like 5/3, never decimals;
    exponents are integer literals. ^ binds tighter than unary minus,
    so -t^2 means -(t^2).

BATCH MODE:
    With no subcommand, one command per stdin line is executed (blank
    lines and lines starting with # are skipped). JSON reports are
    printed compactly, one per line.

EXIT CODES:
    0   success
    1   usage error (bad flags or an unparsable expression)
    2   mathematical obstruction, undetermined verdict, exceeded budget,
        or a failed --seed self-test";

#[derive(Parser)]
#[command(
    name = "funeq",
    version,
    about = "Exact power-series toolkit for iterative functional equations f(R(t)) = a(t)·f(t) + b(t)",
    after_long_help = LONG_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Plain,
}

#[derive(Args)]
struct Common {
    /// Truncation order: series are computed through t^ORDER
    #[arg(long, default_value_t = 16)]
    order: usize,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Run the seeded self-test (replay determinism, prefix stability,
    /// and for solve: scaling equivariance) and attach it to the report
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EquationArgs {
    /// Inner map R(t); must satisfy R(0) = 0
    #[arg(long = "R", value_name = "EXPR", allow_hyphen_values = true)]
    r: String,
    /// Coefficient a(t), finite at the origin for the solver
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    a: String,
    /// Inhomogeneous term b(t)
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    b: String,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Pin a free coefficient, e.g. --normalize 0=1 (repeatable)
    #[arg(long, value_name = "IDX=VAL", allow_hyphen_values = true)]
    normalize: Vec<String>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    eq: EquationArgs,
    /// Accept the external fact that the homogeneous equation has no
    /// nonzero algebraic solution, upgrading the conditional branch
    #[arg(long)]
    external_nonalgebraic: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct MapArgs {
    /// The map R(t); must satisfy R(0) = 0
    #[arg(long = "R", value_name = "EXPR", allow_hyphen_values = true)]
    r: String,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OrbitArgs {
    /// The map R(t)
    #[arg(long = "R", value_name = "EXPR", allow_hyphen_values = true)]
    r: String,
    /// Iteration budget per critical orbit
    #[arg(long, default_value_t = 32)]
    max_iter: usize,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct TreesArgs {
    /// Arity set, comma separated, every entry at least 2 (e.g. 2,3)
    #[arg(long, value_delimiter = ',', required = true)]
    set: Vec<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct SierpinskiArgs {
    /// Gasket approximation level for the walk oracle
    #[arg(long, default_value_t = 4)]
    oracle_level: u32,
    /// Run the walk oracle single-threaded (the output is identical)
    #[arg(long)]
    serial: bool,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct PatternsArgs {
    /// Pattern length m >= 4; the pattern is 1, m, 2, 3, ..., m-1
    #[arg(long)]
    m: usize,
    /// Check n!·[t^n]P̂ against brute-force enumeration up to this n
    #[arg(long, value_name = "N")]
    verify_bruteforce: Option<usize>,
    #[command(flatten)]
    common: Common,
}

#[derive(Subcommand)]
enum OracleCommand {
    /// Count complete trees by direct height-stratified enumeration
    Trees {
        /// Arity set, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        set: Vec<usize>,
        /// Count trees with 1..=N leaves
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Count closed origin walks on the doubled-gasket approximant
    Walks {
        /// Count walks of length 0..=N
        #[arg(long)]
        n: usize,
        /// Approximation level (walks must be too short to see the boundary)
        #[arg(long, default_value_t = 4)]
        level: u32,
        #[command(flatten)]
        common: Common,
    },
    /// Count permutations avoiding a consecutive pattern, by enumeration
    Perms {
        /// The pattern as a comma-separated permutation, e.g. 1,4,2,3
        #[arg(long, value_delimiter = ',')]
        pattern: Option<Vec<usize>>,
        /// Use the standard pattern 1, m, 2, ..., m-1 of length m
        #[arg(long)]
        m: Option<usize>,
        /// Count avoiders among permutations of length 0..=N
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Subcommand)]
enum Command {
    /// Solve f(R) = a·f + b as an exact truncated power series
    Solve(SolveArgs),
    /// Decide how transcendental the solutions of f(R) = a·f + b are
    Classify(ClassifyArgs),
    /// Julia-type eigenfunction psi with psi(S) = s·S'·psi
    Julia(MapArgs),
    /// Boettcher coordinate tau with tau(R) = tau^d at a superattracting origin
    Boettcher(MapArgs),
    /// Critical-orbit portrait: finite post-critical set or escape certificate
    Pcf(OrbitArgs),
    /// Search for a homography conjugating t^d or ±Chebyshev onto R
    Conjugacy(OrbitArgs),
    /// Leaf-count series of complete trees over an arity set, with oracle
    Trees(TreesArgs),
    /// Green function of the doubled Sierpinski gasket origin, with oracle
    Sierpinski(SierpinskiArgs),
    /// Consecutive-pattern-avoiding permutations, with oracle
    Patterns(PatternsArgs),
    /// Brute-force oracles, runnable on their own
    #[command(subcommand)]
    Oracle(OracleCommand),
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    let code = match cli.command {
        Some(cmd) => execute(&cmd, true),
        None => {
            if std::io::stdin().is_terminal() {
                let _ = Cli::command().print_help();
                1
            } else {
                run_batch()
            }
        }
    };
    std::process::exit(code);
}

/// Run one command, print its report, and return the exit code.
fn execute(cmd: &Command, pretty: bool) -> i32 {
    match dispatch(cmd, pretty) {
        Ok(rendered) => {
            emit(&rendered.body);
            rendered.exit
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_for(&e)
        }
    }
}

/// Print a report body, exiting quietly (the conventional SIGPIPE code)
/// when the reader has already closed the pipe, e.g. `funeq ... | head`.
fn emit(body: &str) {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    if writeln!(out, "{body}").and_then(|_| out.flush()).is_err() {
        std::process::exit(141);
    }
}

/// Usage-shaped failures exit 1; mathematical obstructions, negative
/// verdicts, and exceeded budgets exit 2.
fn exit_for(e: &Error) -> i32 {
    match e {
        Error::Syntax { .. }
        | Error::NonIntegerExponent(_)
        | Error::DivisionByZeroPolynomial
        | Error::InvalidNormalization(_)
        | Error::InvalidInput(_) => 1,
        _ => 2,
    }
}

struct Rendered {
    body: String,
    exit: i32,
}

/// Everything a handler produces before formatting and the optional
/// self-test are applied.
struct ReportParts<'a> {
    value: Value,
    plain: String,
    exit: i32,
    order: usize,
    /// Top-level report fields holding a Series, for the prefix check.
    series_paths: &'static [&'static str],
    rebuild: Option<Box<dyn Fn(usize) -> funeq_core::Result<Value> + 'a>>,
    extra_checks: Vec<Check>,
}

fn dispatch(cmd: &Command, pretty: bool) -> funeq_core::Result<Rendered> {
    let (parts, common) = match cmd {
        Command::Solve(args) => (cmd_solve(args)?, &args.common),
        Command::Classify(args) => (cmd_classify(args)?, &args.common),
        Command::Julia(args) => (cmd_julia(args)?, &args.common),
        Command::Boettcher(args) => (cmd_boettcher(args)?, &args.common),
        Command::Pcf(args) => (cmd_pcf(args)?, &args.common),
        Command::Conjugacy(args) => (cmd_conjugacy(args)?, &args.common),
        Command::Trees(args) => (cmd_trees(args)?, &args.common),
        Command::Sierpinski(args) => (cmd_sierpinski(args)?, &args.common),
        Command::Patterns(args) => (cmd_patterns(args)?, &args.common),
        Command::Oracle(oracle) => {
            let (parts, common) = cmd_oracle(oracle)?;
            (parts, common)
        }
    };
    Ok(finish(common, parts, pretty))
}

fn finish(common: &Common, mut parts: ReportParts, pretty: bool) -> Rendered {
    let mut exit = parts.exit;
    if let Some(seed) = common.seed {
        let report = selftest::run(
            seed,
            &parts.value,
            parts.order,
            parts.series_paths,
            parts.rebuild.as_deref(),
            std::mem::take(&mut parts.extra_checks),
        );
        if !report.passed {
            exit = exit.max(2);
        }
        parts.plain.push_str(&format!(
            "\nself-test (seed {seed}): {}",
            if report.passed { "passed" } else { "FAILED" }
        ));
        if let Value::Object(map) = &mut parts.value {
            map.insert(
                "self_test".to_string(),
                serde_json::to_value(&report).expect("self-test serializes"),
            );
        }
    }
    let body = match common.format {
        Format::Json => {
            if pretty {
                serde_json::to_string_pretty(&parts.value).expect("report serializes")
            } else {
                serde_json::to_string(&parts.value).expect("report serializes")
            }
        }
        Format::Plain => parts.plain,
    };
    Rendered { body, exit }
}

// ---------------------------------------------------------------------------
// shared helpers
// ---------------------------------------------------------------------------

fn parse_normalizations(entries: &[String]) -> funeq_core::Result<BTreeMap<usize, Rat>> {
    let mut normalize = BTreeMap::new();
    for entry in entries {
        let (idx, val) = entry.split_once('=').ok_or_else(|| {
            Error::InvalidInput(format!("normalization {entry:?} is not of the form IDX=VAL"))
        })?;
        let idx: usize = idx.trim().parse().map_err(|_| {
            Error::InvalidInput(format!("normalization index {idx:?} is not a whole number"))
        })?;
        let value = parse_expression(val)?;
        if !value.is_constant() {
            return Err(Error::InvalidInput(format!(
                "normalization value {val:?} must be a rational constant"
            )));
        }
        let value = value
            .eval(&Rat::zero())
            .expect("constants evaluate everywhere");
        normalize.insert(idx, value);
    }
    Ok(normalize)
}

fn join_rats(coeffs: &[Rat]) -> String {
    coeffs
        .iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

fn u128_json(x: u128) -> Value {
    if x <= i64::MAX as u128 {
        Value::from(x as i64)
    } else {
        Value::String(x.to_string())
    }
}

fn int_value_plain(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Exit contribution of a classification verdict.
fn verdict_exit(verdict: &Verdict) -> i32 {
    match verdict.outcome {
        Outcome::Unknown | Outcome::NoSolution { .. } => 2,
        _ => 0,
    }
}

/// Exit contribution of an oracle table: any mismatch is a loud failure.
fn oracle_exit(rows: &[OracleRow]) -> i32 {
    if rows.iter().all(|row| row.matches) {
        0
    } else {
        2
    }
}

/// Flatten `extra` (which must serialize to an object) onto `base`.
fn extend_object(base: &mut Value, extra: &impl serde::Serialize) {
    let extra = serde_json::to_value(extra).expect("report fragment serializes");
    if let (Value::Object(base), Value::Object(extra)) = (base, extra) {
        for (k, v) in extra {
            base.insert(k, v);
        }
    }
}

/// Render a flattened classification verdict for plain output: the outcome,
/// any payload fields, then the certificate entries.
fn verdict_plain(verdict: &Verdict) -> String {
    let mut out = String::new();
    let flat = serde_json::to_value(verdict).expect("verdict serializes");
    let map = flat.as_object().expect("verdict is an object");
    for (key, value) in map {
        match key.as_str() {
            "outcome" => out.push_str(&format!("outcome: {}\n", value.as_str().unwrap_or("?"))),
            "certificate" => {}
            _ => {
                let shown = match value {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                out.push_str(&format!("{key}: {shown}\n"));
            }
        }
    }
    out.push_str("certificate:");
    for entry in &verdict.certificate {
        out.push_str(&format!("\n  - {}: {}", entry.hypothesis, entry.evidence));
    }
    out
}

// ---------------------------------------------------------------------------
// command handlers
// ---------------------------------------------------------------------------

fn cmd_solve(args: &SolveArgs) -> funeq_core::Result<ReportParts<'_>> {
    let r = parse_expression(&args.eq.r)?;
    let a = parse_expression(&args.eq.a)?;
    let b = parse_expression(&args.eq.b)?;
    let normalize = parse_normalizations(&args.normalize)?;
    let order = args.common.order;

    let build = {
        let (r, a, b, normalize) = (r.clone(), a.clone(), b.clone(), normalize.clone());
        move |ord: usize| -> funeq_core::Result<(Value, FESolution)> {
            // a free index beyond ord does not exist in the shorter run and
            // cannot influence coefficients below itself, so drop it
            let mut pins = normalize.clone();
            pins.retain(|idx, _| *idx <= ord);
            let opts = StandardOptions {
                normalize: pins,
                extra_margin: 0,
            };
            let sol = solve_fe_standard(&r, &a, &b, ord, &opts)?;
            let verified = verify_fe(&r, &a, &b, &sol.series)?;
            let value = json!({
                "schema": 1,
                "command": "solve",
                "R": r,
                "a": a,
                "b": b,
                "order": ord,
                "normalized": normalize
                    .iter()
                    .map(|(k, v)| (k.to_string(), Value::String(v.to_string())))
                    .collect::<Map<String, Value>>(),
                "series": sol.series,
                "free_indices": sol.free_indices,
                "verified_order": verified,
            });
            Ok((value, sol))
        }
    };

    let (value, sol) = build(order)?;
    let mut extra_checks = Vec::new();
    if let Some(seed) = args.common.seed {
        // a stream separate from the generic self-test draws, so adding
        // checks never shifts which scalar gets used here
        let mut rng = SplitMix64(seed ^ 0x5CA1_AB1E);
        let c = rng.scalar();
        extra_checks.push(scaling_check(&r, &a, &b, order, &normalize, &sol, &c));
    }

    let plain = format!(
        "series: {}\nfree indices: {}\nverified through: {}",
        join_rats(sol.series.coeffs()),
        if sol.free_indices.is_empty() {
            "none".to_string()
        } else {
            sol.free_indices
                .iter()
                .map(|i| i.to_string())
                .collect::<Vec<_>>()
                .join(", ")
        },
        value["verified_order"]
    );

    Ok(ReportParts {
        value,
        plain,
        exit: 0,
        order,
        series_paths: &["series"],
        rebuild: Some(Box::new(move |ord| build(ord).map(|(v, _)| v))),
        extra_checks,
    })
}

/// The solution map is affine in b: scaling b and every pinned value by c
/// must scale the whole series by c without moving the free indices.
fn scaling_check(
    r: &RationalFunction,
    a: &RationalFunction,
    b: &RationalFunction,
    order: usize,
    normalize: &BTreeMap<usize, Rat>,
    sol: &FESolution,
    c: &Rat,
) -> Check {
    let name = "scaling-equivariance";
    let scaled_b = b.scale(c);
    let scaled_pins: BTreeMap<usize, Rat> =
        normalize.iter().map(|(k, v)| (*k, v * c)).collect();
    let opts = StandardOptions {
        normalize: scaled_pins,
        extra_margin: 0,
    };
    match solve_fe_standard(r, a, &scaled_b, order, &opts) {
        Ok(scaled) => Check::new(
            name,
            format!("scaling b and the pinned values by {c} rescales the solution by {c}"),
            scaled.series == sol.series.scale(c) && scaled.free_indices == sol.free_indices,
        ),
        Err(e) => Check::new(name, format!("scaled solve failed: {e}"), false),
    }
}

fn cmd_classify(args: &ClassifyArgs) -> funeq_core::Result<ReportParts<'_>> {
    let r = parse_expression(&args.eq.r)?;
    let a = parse_expression(&args.eq.a)?;
    let b = parse_expression(&args.eq.b)?;
    let external = args.external_nonalgebraic;

    let build = {
        let (r, a, b) = (r.clone(), a.clone(), b.clone());
        move |_ord: usize| -> funeq_core::Result<(Value, Verdict)> {
            let opts = ClassifyOptions {
                external_nonalgebraic: external,
                ..ClassifyOptions::default()
            };
            let verdict = classify(&r, &a, &b, &opts)?;
            let mut value = json!({
                "schema": 1,
                "command": "classify",
                "R": r,
                "a": a,
                "b": b,
                "external_nonalgebraic": external,
            });
            extend_object(&mut value, &verdict);
            Ok((value, verdict))
        }
    };

    let (value, verdict) = build(args.common.order)?;
    let plain = verdict_plain(&verdict);
    Ok(ReportParts {
        value,
        plain,
        exit: verdict_exit(&verdict),
        order: args.common.order,
        series_paths: &[],
        rebuild: Some(Box::new(move |ord| build(ord).map(|(v, _)| v))),
        extra_checks: Vec::new(),
    })
}

fn cmd_julia(args: &MapArgs) -> funeq_core::Result<ReportParts<'_>> {
    let r = parse_expression(&args.r)?;
    let order = args.common.order;

    let build = {
        let r = r.clone();
        move |ord: usize| -> funeq_core::Result<Value> {
            let data = julia_psi(&r, ord, &JuliaOptions::default())?;
            let relation_map = if data.iterate == 2 {
                r.compose(&r)?
            } else {
                r.clone()
            };
            let a_eff = relation_map.derivative().scale(&data.relation_scale);
            let verified = verify_fe(
                &relation_map,
                &a_eff,
                &RationalFunction::zero(),
                &data.psi,
            )?;
            let mut value = json!({
                "schema": 1,
                "command": "julia",
                "R": r,
                "order": ord,
            });
            extend_object(&mut value, &data);
            extend_object(&mut value, &json!({ "verified_order": verified }));
            Ok(value)
        }
    };

    let value = build(order)?;
    let plain = format!(
        "psi: {}\niterate: {}  relation scale: {}  multiplier: {}",
        value["psi"]["coeffs"]
            .as_array()
            .map(|a| a
                .iter()
                .map(|v| v.as_str().unwrap_or("?").to_string())
                .collect::<Vec<_>>()
                .join(", "))
            .unwrap_or_default(),
        value["iterate"],
        value["relation_scale"].as_str().unwrap_or("?"),
        value["multiplier"].as_str().unwrap_or("?"),
    );
    Ok(ReportParts {
        value,
        plain,
        exit: 0,
        order,
        series_paths: &["psi"],
        rebuild: Some(Box::new(build)),
        extra_checks: Vec::new(),
    })
}

fn cmd_boettcher(args: &MapArgs) -> funeq_core::Result<ReportParts<'_>> {
    let r = parse_expression(&args.r)?;
    let order = args.common.order;

    let build = {
        let r = r.clone();
        move |ord: usize| -> funeq_core::Result<Value> {
            let data = boettcher(&r, ord)?;
            // check tau(R) = tau^d directly; the relation is not of the
            // affine f(R) = a f + b shape
            let lhs = data.tau.compose(&r.series(ord)?)?;
            let rhs = data.tau.pow(data.degree as i64)?;
            let residual = lhs.sub(&rhs);
            let verified = match residual.valuation() {
                Some(i) => i as i64 - 1,
                None => residual.order() as i64,
            };
            let mut value = json!({
                "schema": 1,
                "command": "boettcher",
                "R": r,
                "order": ord,
            });
            extend_object(&mut value, &data);
            extend_object(&mut value, &json!({ "verified_order": verified }));
            Ok(value)
        }
    };

    let value = build(order)?;
    let plain = format!(
        "tau: {}\ndegree: {}  leading: {}  scale: {}",
        value["tau"]["coeffs"]
            .as_array()
            .map(|a| a
                .iter()
                .map(|v| v.as_str().unwrap_or("?").to_string())
                .collect::<Vec<_>>()
                .join(", "))
            .unwrap_or_default(),
        value["degree"],
        value["leading"].as_str().unwrap_or("?"),
        value["scale"].as_str().unwrap_or("?"),
    );
    Ok(ReportParts {
        value,
        plain,
        exit: 0,
        order,
        series_paths: &["tau"],
        rebuild: Some(Box::new(build)),
        extra_checks: Vec::new(),
    })
}

fn portrait_plain(portrait: &CriticalPortrait) -> String {
    let mut out = format!("outcome: {:?}", portrait.outcome);
    let mut post: Vec<String> = portrait
        .postcritical
        .iter()
        .map(|p| p.to_string())
        .collect();
    if portrait.postcritical_infinity {
        post.push("infinity".to_string());
    }
    if !post.is_empty() {
        out.push_str(&format!("\npostcritical: {}", post.join(", ")));
    }
    for orbit in &portrait.orbits {
        if let Some(cert) = &orbit.escape {
            out.push_str(&format!(
                "\ncertificate: orbit of {} reaches {} after {} steps and stays trapped within radius {} of 0",
                cert.critical_point, cert.point, cert.steps, cert.radius
            ));
        }
    }
    out
}

fn cmd_pcf(args: &OrbitArgs) -> funeq_core::Result<ReportParts<'_>> {
    let r = parse_expression(&args.r)?;
    let opts = PortraitOptions {
        max_iter: args.max_iter,
        ..PortraitOptions::default()
    };

    let build = {
        let r = r.clone();
        move |_ord: usize| -> funeq_core::Result<(Value, CriticalPortrait)> {
            let portrait = critical_portrait(&r, opts)?;
            let mut value = json!({
                "schema": 1,
                "command": "pcf",
                "R": r,
                "max_iter": opts.max_iter,
            });
            extend_object(&mut value, &portrait);
            Ok((value, portrait))
        }
    };

    let (value, portrait) = build(args.common.order)?;
    let exit = if portrait.outcome == PortraitOutcome::Undetermined {
        2
    } else {
        0
    };
    Ok(ReportParts {
        value,
        plain: portrait_plain(&portrait),
        exit,
        order: args.common.order,
        series_paths: &[],
        rebuild: Some(Box::new(move |ord| build(ord).map(|(v, _)| v))),
        extra_checks: Vec::new(),
    })
}

fn cmd_conjugacy(args: &OrbitArgs) -> funeq_core::Result<ReportParts<'_>> {
    let r = parse_expression(&args.r)?;
    let opts = PortraitOptions {
        max_iter: args.max_iter,
        ..PortraitOptions::default()
    };

    let build = {
        let r = r.clone();
        move |_ord: usize| -> funeq_core::Result<(Value, Value)> {
            let search = find_conjugating_homography_with(&r, opts)?;
            let value = json!({
                "schema": 1,
                "command": "conjugacy",
                "R": r,
                "max_iter": opts.max_iter,
                "witness": search.witness,
                "portrait": search.portrait,
            });
            let outcome = serde_json::to_value(&search.portrait.outcome).expect("serializes");
            Ok((value, outcome))
        }
    };

    let (value, portrait_outcome) = build(args.common.order)?;
    let witness = &value["witness"];
    let exit = if witness.is_null() && portrait_outcome == json!("Undetermined") {
        2
    } else {
        0
    };
    let plain = if witness.is_null() {
        format!(
            "witness: none (portrait outcome: {})",
            portrait_outcome.as_str().unwrap_or("?")
        )
    } else {
        format!(
            "witness: {} of degree {}, m = {}",
            witness["family"].as_str().unwrap_or("?"),
            witness["degree"],
            witness["map"].as_str().unwrap_or("?"),
        )
    };
    Ok(ReportParts {
        value,
        plain,
        exit,
        order: args.common.order,
        series_paths: &[],
        rebuild: Some(Box::new(move |ord| build(ord).map(|(v, _)| v))),
        extra_checks: Vec::new(),
    })
}

fn cmd_trees(args: &TreesArgs) -> funeq_core::Result<ReportParts<'_>> {
    let family = TreeFamily::new(args.set.iter().copied())?;
    let order = args.common.order.max(1);

    let build = {
        let family = family.clone();
        move |ord: usize| -> funeq_core::Result<Value> {
            let report = trees_report(&family, ord.max(1), 12)?;
            Ok(serde_json::to_value(&report).expect("report serializes"))
        }
    };

    let report = trees_report(&family, order, 12)?;
    let plain = join_rats(&report.series.coeffs()[1..]);
    let exit = verdict_exit(&report.classification).max(oracle_exit(&report.oracle));
    Ok(ReportParts {
        value: serde_json::to_value(&report).expect("report serializes"),
        plain,
        exit,
        order,
        series_paths: &["series"],
        rebuild: Some(Box::new(build)),
        extra_checks: Vec::new(),
    })
}

fn cmd_sierpinski(args: &SierpinskiArgs) -> funeq_core::Result<ReportParts<'_>> {
    let order = args.common.order;
    let level = args.oracle_level;
    let parallel = !args.serial;

    let build = move |ord: usize| -> funeq_core::Result<Value> {
        let report = sierpinski_report(ord, level, 14, parallel)?;
        Ok(serde_json::to_value(&report).expect("report serializes"))
    };

    let report = sierpinski_report(order, level, 14, parallel)?;
    let plain = report
        .coeffs_g4
        .iter()
        .map(int_value_plain)
        .collect::<Vec<_>>()
        .join(", ");
    let exit = verdict_exit(&report.classification).max(oracle_exit(&report.oracle));
    Ok(ReportParts {
        value: serde_json::to_value(&report).expect("report serializes"),
        plain,
        exit,
        order,
        series_paths: &["g", "g4"],
        rebuild: Some(Box::new(build)),
        extra_checks: Vec::new(),
    })
}

fn cmd_patterns(args: &PatternsArgs) -> funeq_core::Result<ReportParts<'_>> {
    let order = args.common.order;
    let m = args.m;
    let oracle_max = args.verify_bruteforce.unwrap_or_else(|| order.min(8));

    let build = move |ord: usize| -> funeq_core::Result<Value> {
        let report = patterns_report(m, ord, oracle_max)?;
        Ok(serde_json::to_value(&report).expect("report serializes"))
    };

    let report = patterns_report(m, order, oracle_max)?;
    // headline sequence: avoider counts n!·[t^n] P-hat
    let mut counts = Vec::new();
    let mut factorial = Rat::one();
    for n in 0..=order {
        if n > 0 {
            factorial = factorial * &Rat::from_int(n as i64);
        }
        counts.push((report.p_hat.coeff(n) * &factorial).to_string());
    }
    let plain = counts.join(", ");
    let exit = verdict_exit(&report.classification).max(oracle_exit(&report.oracle));
    Ok(ReportParts {
        value: serde_json::to_value(&report).expect("report serializes"),
        plain,
        exit,
        order,
        series_paths: &["s", "s_hat", "p_hat"],
        rebuild: Some(Box::new(build)),
        extra_checks: Vec::new(),
    })
}

fn cmd_oracle(oracle: &OracleCommand) -> funeq_core::Result<(ReportParts<'_>, &Common)> {
    match oracle {
        OracleCommand::Trees { set, n, common } => {
            let family = TreeFamily::new(set.iter().copied())?;
            let top = *n;
            let build = {
                let family = family.clone();
                let set = set.clone();
                move |_ord: usize| -> funeq_core::Result<Value> {
                    let mut counts = Vec::new();
                    for k in 1..=top {
                        counts.push(u128_json(enumerate_complete_trees(&family, k)?));
                    }
                    Ok(json!({
                        "schema": 1,
                        "command": "oracle-trees",
                        "set": set,
                        "n": top,
                        "counts": counts,
                    }))
                }
            };
            let value = build(0)?;
            let plain = plain_counts(&value);
            Ok((
                ReportParts {
                    value,
                    plain,
                    exit: 0,
                    order: common.order,
                    series_paths: &[],
                    rebuild: Some(Box::new(build)),
                    extra_checks: Vec::new(),
                },
                common,
            ))
        }
        OracleCommand::Walks { n, level, common } => {
            let (top, level) = (*n, *level);
            let build = move |_ord: usize| -> funeq_core::Result<Value> {
                let counts: Vec<Value> = sierpinski_walk_counts(top, level, true)?
                    .into_iter()
                    .map(u128_json)
                    .collect();
                Ok(json!({
                    "schema": 1,
                    "command": "oracle-walks",
                    "n": top,
                    "level": level,
                    "counts": counts,
                }))
            };
            let value = build(0)?;
            let plain = plain_counts(&value);
            Ok((
                ReportParts {
                    value,
                    plain,
                    exit: 0,
                    order: common.order,
                    series_paths: &[],
                    rebuild: Some(Box::new(build)),
                    extra_checks: Vec::new(),
                },
                common,
            ))
        }
        OracleCommand::Perms {
            pattern,
            m,
            n,
            common,
        } => {
            let pattern = match (pattern, m) {
                (Some(p), None) => p.clone(),
                (None, Some(m)) => standard_pattern(*m),
                _ => {
                    return Err(Error::InvalidInput(
                        "pass exactly one of --pattern or --m".to_string(),
                    ))
                }
            };
            let top = *n;
            let build = {
                let pattern = pattern.clone();
                move |_ord: usize| -> funeq_core::Result<Value> {
                    let mut counts = Vec::new();
                    for k in 0..=top {
                        counts.push(u128_json(count_avoiders(&pattern, k)?));
                    }
                    Ok(json!({
                        "schema": 1,
                        "command": "oracle-perms",
                        "pattern": pattern,
                        "n": top,
                        "counts": counts,
                    }))
                }
            };
            let value = build(0)?;
            let plain = plain_counts(&value);
            Ok((
                ReportParts {
                    value,
                    plain,
                    exit: 0,
                    order: common.order,
                    series_paths: &[],
                    rebuild: Some(Box::new(build)),
                    extra_checks: Vec::new(),
                },
                common,
            ))
        }
    }
}

fn plain_counts(value: &Value) -> String {
    value["counts"]
        .as_array()
        .map(|a| a.iter().map(int_value_plain).collect::<Vec<_>>().join(", "))
        .unwrap_or_default()
}

// ---------------------------------------------------------------------------
// batch mode
// ---------------------------------------------------------------------------

/// Split a batch line into arguments, honoring single and double quotes.
fn split_line(line: &str) -> funeq_core::Result<Vec<String>> {
    let mut args = Vec::new();
    let mut current = String::new();
    let mut pending = false;
    let mut quote: Option<char> = None;
    for ch in line.chars() {
        match quote {
            Some(q) => {
                if ch == q {
                    quote = None;
                } else {
                    current.push(ch);
                }
            }
            None => match ch {
                '\'' | '"' => {
                    quote = Some(ch);
                    pending = true;
                }
                c if c.is_whitespace() => {
                    if pending {
                        args.push(std::mem::take(&mut current));
                        pending = false;
                    }
                }
                c => {
                    current.push(c);
                    pending = true;
                }
            },
        }
    }
    if quote.is_some() {
        return Err(Error::Syntax {
            position: line.len(),
            expected: "a closing quote".to_string(),
        });
    }
    if pending {
        args.push(current);
    }
    Ok(args)
}

fn run_batch() -> i32 {
    let mut input = String::new();
    if std::io::stdin().read_to_string(&mut input).is_err() {
        eprintln!("error: could not read stdin");
        return 1;
    }
    let mut any_usage = false;
    let mut any_obstruction = false;
    for (index, raw) in input.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let lineno = index + 1;
        let argv = match split_line(line) {
            Ok(argv) => argv,
            Err(e) => {
                eprintln!("line {lineno}: {e}");
                any_usage = true;
                continue;
            }
        };
        let full = std::iter::once("funeq".to_string()).chain(argv);
        match Cli::try_parse_from(full) {
            Ok(Cli { command: Some(cmd) }) => match execute(&cmd, false) {
                0 => {}
                1 => any_usage = true,
                _ => any_obstruction = true,
            },
            Ok(Cli { command: None }) => {
                eprintln!("line {lineno}: missing subcommand");
                any_usage = true;
            }
            Err(e) => {
                use clap::error::ErrorKind;
                if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                    let _ = e.print();
                } else {
                    eprintln!("line {lineno}: {e}");
                    any_usage = true;
                }
            }
        }
    }
    if any_usage {
        1
    } else if any_obstruction {
        2
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_line_honors_quotes() {
        assert_eq!(
            split_line(r#"solve --R "t^2 + t^3" --a 1 --b '-t'"#).unwrap(),
            vec!["solve", "--R", "t^2 + t^3", "--a", "1", "--b", "-t"]
        );
        assert_eq!(split_line("  ").unwrap(), Vec::<String>::new());
        assert!(split_line(r#"solve --R "t^2"#).is_err());
    }

    #[test]
    fn normalizations_parse_and_reject() {
        let pins = parse_normalizations(&["0=1".to_string(), "3=-5/2".to_string()]).unwrap();
        assert_eq!(pins[&0], Rat::one());
        assert_eq!(pins[&3], Rat::frac(-5, 2));
        assert!(parse_normalizations(&["7".to_string()]).is_err());
        assert!(parse_normalizations(&["x=1".to_string()]).is_err());
        assert!(parse_normalizations(&["0=t".to_string()]).is_err());
    }

    #[test]
    fn exit_code_mapping_separates_usage_from_math() {
        assert_eq!(
            exit_for(&Error::Syntax {
                position: 0,
                expected: "x".into()
            }),
            1
        );
        assert_eq!(exit_for(&Error::InvalidInput("bad".into())), 1);
        assert_eq!(exit_for(&Error::ObstructionAtIndex(3)), 2);
        assert_eq!(exit_for(&Error::BudgetExceeded("n".into())), 2);
        assert_eq!(
            exit_for(&Error::BoundaryReachable {
                length: 8,
                level: 2
            }),
            2
        );
    }

    #[test]
    fn u128_rendering_switches_to_strings_beyond_i64() {
        assert_eq!(u128_json(42), json!(42));
        assert_eq!(
            u128_json(200_000_000_000_000_000_000u128),
            json!("200000000000000000000")
        );
    }
}

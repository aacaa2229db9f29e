//! The `denumerant` command line: `count`, `poly`, `verify` and `bench`.
//!
//! Exit codes: 0 success, 1 verification disagreement (or an internal consistency
//! failure), 2 invalid input, 3 precondition of an explicitly requested method unmet.
//! All numbers in JSON output are decimal strings.

use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::bounded::{bounded_count, pstar_table, BoundedSystem};
use crate::combinatorics::BigCount;
use crate::equation::{oracle_table, table_guard, Equation};
use crate::error::Error;
use crate::quasipoly::{
    build_quasipoly, closed_form_applies, closed_form_count, count_quasipoly, eval_quasipoly,
    piecewise_two_var, piecewise_two_var_applies, polynomial_form, polynomial_form_of_plan,
    two_var_count,
};
use crate::recurrences::{flat_identity_violation, lprime_coeffs, Decimator, FlatTable};
use crate::transform::{build_transform, transform_count, TransformPlan};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DISAGREEMENT: i32 = 1;
pub const EXIT_INVALID_INPUT: i32 = 2;
pub const EXIT_PRECONDITION: i32 = 3;

/// `auto` switches from the flat table to the quasi-polynomial above this argument.
const AUTO_FLAT_LIMIT: u64 = 1_000_000;

/// Largest `max-b` for which `verify` also runs the inclusion–exclusion check
/// (one oracle table per argument).
const VERIFY_BOUNDED_LIMIT: u64 = 2_000;

const CACHE_VERSION: u64 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "denumerant",
    version,
    about = "Count non-negative integer solutions of a1*x1 + ... + an*xn = b"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print P(b).
    Count(CountArgs),
    /// Print the per-residue coefficient table and polynomial in q = floor(b/M).
    Poly(PolyArgs),
    /// Check every method against the brute-force oracle for b = 0..=max-b.
    Verify(VerifyArgs),
    /// Time every applicable method on each b.
    Bench(BenchArgs),
}

/// Comma-separated positive coefficients.
#[derive(Clone, Debug)]
struct CoeffList(Vec<u64>);

impl FromStr for CoeffList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(|part| {
                let part = part.trim();
                match part.parse::<u64>() {
                    Ok(0) => Err("coefficients must be positive".to_string()),
                    Ok(v) => Ok(v),
                    Err(_) => Err(format!("not a positive integer: {part:?}")),
                }
            })
            .collect::<Result<Vec<_>, _>>()
            .map(CoeffList)
    }
}

fn parse_big(s: &str) -> Result<BigUint, String> {
    BigUint::from_str(s.trim()).map_err(|_| format!("not a non-negative integer: {s:?}"))
}

/// Comma-separated non-negative arguments.
#[derive(Clone, Debug)]
struct BigList(Vec<BigUint>);

impl FromStr for BigList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        s.split(',')
            .map(parse_big)
            .collect::<Result<_, _>>()
            .map(BigList)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Auto,
    Oracle,
    Flat,
    Decimate,
    Quasipoly,
    Closed,
    Twovar,
}

impl Method {
    fn name(self) -> &'static str {
        match self {
            Method::Auto => "auto",
            Method::Oracle => "oracle",
            Method::Flat => "flat",
            Method::Decimate => "decimate",
            Method::Quasipoly => "quasipoly",
            Method::Closed => "closed",
            Method::Twovar => "twovar",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Args)]
struct CountArgs {
    #[arg(long)]
    coeffs: CoeffList,
    #[arg(long, value_parser = parse_big)]
    b: BigUint,
    #[arg(long, value_enum, default_value_t = Method::Auto)]
    method: Method,
    #[arg(long)]
    json: bool,
    /// JSON file holding P(0..=B) for this equation; read to seed the flat table
    /// and rewritten when the table grows.
    #[arg(long)]
    cache: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PolyArgs {
    #[arg(long)]
    coeffs: CoeffList,
    #[arg(long)]
    residue: Option<u64>,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long)]
    coeffs: CoeffList,
    #[arg(long)]
    max_b: u64,
    /// Seed for the randomized transform targets.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    json: bool,
}

#[derive(Debug, Args)]
struct BenchArgs {
    #[arg(long)]
    coeffs: CoeffList,
    #[arg(long)]
    b: BigList,
    #[arg(long)]
    json: bool,
}

/// A failed command: exit code plus message for stderr.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

/// Exit code for a library error raised by an explicitly requested method.
fn exit_code(err: &Error) -> i32 {
    match err {
        Error::InvalidInput(_) => EXIT_INVALID_INPUT,
        Error::ResourceLimit { .. } | Error::PreconditionUnmet(_) => EXIT_PRECONDITION,
        Error::Internal(_) => EXIT_DISAGREEMENT,
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::new(exit_code(&err), err.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Failure::new(EXIT_INVALID_INPUT, err.to_string())
    }
}

type CmdResult = Result<i32, Failure>;

/// Parses `args` (including the program name) and runs the command, writing normal
/// output to `out` and diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                let _ = write!(err, "{e}");
                EXIT_INVALID_INPUT
            } else {
                let _ = write!(out, "{e}");
                EXIT_OK
            };
            return code;
        }
    };
    let result = match cli.command {
        Command::Count(args) => cmd_count(&args, out),
        Command::Poly(args) => cmd_poly(&args, out),
        Command::Verify(args) => cmd_verify(&args, out),
        Command::Bench(args) => cmd_bench(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn strings<T: ToString>(xs: &[T]) -> Value {
    Value::Array(xs.iter().map(|x| Value::String(x.to_string())).collect())
}

fn write_json(out: &mut dyn Write, value: &Value) -> std::io::Result<()> {
    writeln!(
        out,
        "{}",
        serde_json::to_string(value).expect("JSON values serialize")
    )
}

fn make_equation(coeffs: &CoeffList) -> Result<Equation, Failure> {
    Equation::new(coeffs.0.clone()).map_err(Failure::from)
}

/// The method `auto` resolves to for this query.
pub fn auto_method(eq: &Equation, b: &BigUint) -> Method {
    if eq.n() == 2 && eq.is_coprime() {
        Method::Twovar
    } else if closed_form_applies(eq, b) {
        Method::Closed
    } else if b > &BigUint::from(AUTO_FLAT_LIMIT) {
        Method::Quasipoly
    } else {
        Method::Flat
    }
}

/// Runs one concrete method (never `Auto`).
pub fn count_with(eq: &Equation, b: &BigUint, method: Method) -> crate::Result<BigCount> {
    match method {
        Method::Auto => count_with(eq, b, auto_method(eq, b)),
        Method::Oracle => crate::equation::count_oracle(eq, b),
        Method::Flat => crate::recurrences::count_flat(eq, b),
        Method::Decimate => crate::recurrences::count_decimated(eq, b, 2),
        Method::Quasipoly => count_quasipoly(eq, b),
        Method::Closed => closed_form_count(eq, b),
        Method::Twovar => match eq.coeffs() {
            &[a1, a2] => two_var_count(a1, a2, b),
            _ => Err(Error::PreconditionUnmet(format!(
                "two-variable formula needs exactly 2 coefficients, got {}",
                eq.n()
            ))),
        },
    }
}

fn cmd_count(args: &CountArgs, out: &mut dyn Write) -> CmdResult {
    let eq = make_equation(&args.coeffs)?;
    let method = match args.method {
        Method::Auto => auto_method(&eq, &args.b),
        m => m,
    };
    let value = match (&args.cache, method) {
        (Some(path), Method::Flat) => count_flat_cached(&eq, &args.b, path)?,
        _ => count_with(&eq, &args.b, method)?,
    };
    if args.json {
        let doc = json!({
            "coeffs": strings(eq.coeffs()),
            "b": args.b.to_string(),
            "method": method.name(),
            "value": value.to_string(),
        });
        write_json(out, &doc)?;
    } else {
        writeln!(out, "{value}")?;
    }
    Ok(EXIT_OK)
}

/// Reads a cache file: `{"version":1,"coeffs":[…],"flat":["1","0",…]}`.
/// A missing file yields an empty table.
pub fn read_cache(path: &Path, eq: &Equation) -> crate::Result<Vec<BigUint>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Error::InvalidInput(format!("{}: {e}", path.display()))),
    };
    let bad = |what: &str| Error::InvalidInput(format!("{}: {what}", path.display()));
    let doc: Value = serde_json::from_str(&text).map_err(|e| bad(&e.to_string()))?;
    if doc.get("version").and_then(Value::as_u64) != Some(CACHE_VERSION) {
        return Err(bad("unsupported cache version"));
    }
    let coeffs: Vec<u64> = doc
        .get("coeffs")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing coeffs"))?
        .iter()
        .map(|v| v.as_str().and_then(|s| s.parse().ok()))
        .collect::<Option<_>>()
        .ok_or_else(|| bad("malformed coeffs"))?;
    if coeffs != eq.coeffs() {
        return Err(bad("cache was written for different coefficients"));
    }
    doc.get("flat")
        .and_then(Value::as_array)
        .ok_or_else(|| bad("missing flat table"))?
        .iter()
        .map(|v| v.as_str().and_then(|s| BigUint::from_str(s).ok()))
        .collect::<Option<_>>()
        .ok_or_else(|| bad("malformed flat table"))
}

pub fn write_cache(path: &Path, eq: &Equation, table: &[BigUint]) -> std::io::Result<()> {
    let doc = json!({
        "version": CACHE_VERSION,
        "coeffs": strings(eq.coeffs()),
        "flat": strings(table),
    });
    let mut text = serde_json::to_string(&doc).expect("JSON values serialize");
    text.push('\n');
    std::fs::write(path, text)
}

fn count_flat_cached(eq: &Equation, b: &BigUint, path: &Path) -> Result<BigCount, Failure> {
    let seed = read_cache(path, eq)?;
    let seeded = seed.len();
    let guard = table_guard();
    let idx = match b.to_u64() {
        Some(v) if v <= guard => v as usize,
        _ if b < &BigUint::from(seeded) => b.to_usize().expect("below table length"),
        _ => {
            return Err(Error::ResourceLimit {
                value: b.to_string(),
                guard,
            }
            .into())
        }
    };
    let mut table = FlatTable::with_seed(eq, seed)?;
    let value = BigCount::from(table.get(idx).clone());
    if table.values().len() > seeded {
        write_cache(path, eq, table.values())?;
    }
    Ok(value)
}

fn rational_string(c: &BigRational) -> String {
    if c.is_integer() {
        c.numer().to_string()
    } else {
        format!("{}/{}", c.numer(), c.denom())
    }
}

fn cmd_poly(args: &PolyArgs, out: &mut dyn Write) -> CmdResult {
    let eq = make_equation(&args.coeffs)?;
    let reduced = eq.reduced();
    let plans = match args.residue {
        Some(r) => {
            let r = reduced
                .residue_of(r)
                .map_err(|e| Failure::new(EXIT_INVALID_INPUT, e.to_string()))?;
            vec![crate::quasipoly::build_residue_plan(&reduced, r)?]
        }
        None => build_quasipoly(&eq)?.plans().to_vec(),
    };
    let mut rows = Vec::new();
    for plan in plans {
        let form = polynomial_form_of_plan(&reduced, &plan)?;
        rows.push((plan, form));
    }

    if args.json {
        let rows: Vec<Value> = rows
            .iter()
            .map(|(plan, form)| {
                json!({
                    "r": plan.residue().to_string(),
                    "s": plan.s().to_string(),
                    "l": strings(plan.l()),
                    "poly": Value::Array(
                        form.coeffs().iter().map(|c| Value::String(rational_string(c))).collect()
                    ),
                })
            })
            .collect();
        let doc = json!({
            "coeffs": strings(eq.coeffs()),
            "gcd": eq.gcd().to_string(),
            "lcm": reduced.lcm().to_string(),
            "rows": rows,
        });
        write_json(out, &doc)?;
        return Ok(EXIT_OK);
    }

    writeln!(
        out,
        "{}  (M = {}, A = {}, gcd = {})",
        eq,
        eq.lcm(),
        eq.sum(),
        eq.gcd()
    )?;
    if eq.gcd() > 1 {
        writeln!(
            out,
            "P(b) = 0 unless {} divides b; rows describe b' = b/{} for {}",
            eq.gcd(),
            eq.gcd(),
            reduced
        )?;
    }
    let m = reduced.lcm();
    writeln!(out, "q = floor(b/{m}), r = b mod {m}")?;
    for (plan, form) in rows {
        let l: Vec<String> = plan.l().iter().map(|v| v.to_string()).collect();
        writeln!(
            out,
            "r={} s={} l=[{}]  P = {}",
            plan.residue(),
            plan.s(),
            l.join(", "),
            form
        )?;
    }
    Ok(EXIT_OK)
}

/// Pass/fail status of one identity check in a report.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CheckStatus {
    Pass,
    Fail,
    /// Recorded for information; never fails the run.
    Note,
    Skipped,
}

impl CheckStatus {
    fn label(&self) -> &'static str {
        match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "FAIL",
            CheckStatus::Note => "note",
            CheckStatus::Skipped => "skipped",
        }
    }
}

#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub status: CheckStatus,
    pub detail: String,
}

impl IdentityCheck {
    fn new(name: &'static str, ok: bool, detail: impl Into<String>) -> Self {
        IdentityCheck {
            name,
            status: if ok {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            detail: detail.into(),
        }
    }

    fn with_status(name: &'static str, status: CheckStatus, detail: impl Into<String>) -> Self {
        IdentityCheck {
            name,
            status,
            detail: detail.into(),
        }
    }
}

/// Results of every method at one argument.
#[derive(Clone, Debug)]
pub struct MethodReport {
    pub equation: Equation,
    pub b: BigUint,
    pub results: BTreeMap<String, BigCount>,
    pub timings_us: BTreeMap<String, u128>,
    pub skipped: BTreeMap<String, String>,
    pub identities: Vec<IdentityCheck>,
}

impl MethodReport {
    pub fn new(equation: Equation, b: BigUint) -> Self {
        MethodReport {
            equation,
            b,
            results: BTreeMap::new(),
            timings_us: BTreeMap::new(),
            skipped: BTreeMap::new(),
            identities: Vec::new(),
        }
    }

    /// True iff every method that produced a value produced the same one.
    pub fn agreement(&self) -> bool {
        let mut values = self.results.values();
        match values.next() {
            Some(first) => values.all(|v| v == first),
            None => true,
        }
    }

    pub fn to_json(&self) -> Value {
        let results: BTreeMap<&String, String> = self
            .results
            .iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
        let timings: BTreeMap<&String, String> = self
            .timings_us
            .iter()
            .map(|(k, v)| (k, v.to_string()))
            .collect();
        let identities: Vec<Value> = self
            .identities
            .iter()
            .map(|c| json!({"name": c.name, "status": c.status.label(), "detail": c.detail}))
            .collect();
        json!({
            "coeffs": strings(self.equation.coeffs()),
            "b": self.b.to_string(),
            "results": results,
            "timings_us": timings,
            "skipped": self.skipped,
            "agreement": self.agreement(),
            "identities": identities,
        })
    }

    /// Times `f` and records its value, or records why it was skipped.
    fn record(&mut self, name: &str, f: impl FnOnce() -> crate::Result<BigCount>) {
        let start = Instant::now();
        match f() {
            Ok(v) => {
                self.timings_us
                    .insert(name.to_string(), start.elapsed().as_micros());
                self.results.insert(name.to_string(), v);
            }
            Err(e) => {
                self.skipped.insert(name.to_string(), e.to_string());
            }
        }
    }

    fn write_text(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "b = {}", self.b)?;
        for (name, v) in &self.results {
            writeln!(out, "  {name:<12} {v}  ({} us)", self.timings_us[name])?;
        }
        for (name, why) in &self.skipped {
            writeln!(out, "  {name:<12} skipped: {why}")?;
        }
        writeln!(
            out,
            "  agreement: {}",
            if self.agreement() { "yes" } else { "NO" }
        )
    }
}

/// Outcome of one method over the whole `0..=max-b` sweep.
#[derive(Debug, Default)]
struct Sweep {
    name: String,
    checked: u64,
    first_mismatch: Option<(u64, String, String)>,
    skipped: Option<String>,
    micros: u128,
}

impl Sweep {
    fn run(
        name: impl Into<String>,
        oracle: &[BigUint],
        mut f: impl FnMut(u64) -> crate::Result<Option<BigCount>>,
    ) -> Sweep {
        let mut sweep = Sweep {
            name: name.into(),
            ..Sweep::default()
        };
        let start = Instant::now();
        for (b, want) in oracle.iter().enumerate() {
            let b = b as u64;
            match f(b) {
                Ok(Some(got)) => {
                    sweep.checked += 1;
                    if got.as_biguint() != want && sweep.first_mismatch.is_none() {
                        sweep.first_mismatch = Some((b, got.to_string(), want.to_string()));
                    }
                }
                Ok(None) => {}
                Err(e) => {
                    if sweep.first_mismatch.is_none() {
                        sweep.first_mismatch = Some((b, format!("error: {e}"), want.to_string()));
                    }
                }
            }
        }
        sweep.micros = start.elapsed().as_micros();
        sweep
    }

    fn skipped(name: impl Into<String>, why: impl Into<String>) -> Sweep {
        Sweep {
            name: name.into(),
            skipped: Some(why.into()),
            ..Sweep::default()
        }
    }
}

fn sweeps(eq: &Equation, oracle: &[BigUint], max_b: u64, seed: u64) -> Vec<Sweep> {
    let big = |b: u64| BigUint::from(b);
    std::thread::scope(|scope| {
        let mut handles = Vec::new();
        handles.push(scope.spawn(|| {
            let mut table = FlatTable::new(&eq.reduced());
            Sweep::run("flat", oracle, |b| {
                Ok(Some(match eq.reduce_argument(&big(b)) {
                    Some(b) => BigCount::from(table.get(b.to_usize().unwrap()).clone()),
                    None => BigCount::zero(),
                }))
            })
        }));
        handles.push(scope.spawn(|| match build_quasipoly(eq) {
            Ok(qp) => Sweep::run("quasipoly", oracle, |b| {
                eval_quasipoly(&qp, &big(b)).map(Some)
            }),
            Err(Error::ResourceLimit { .. }) => Sweep::run("quasipoly", oracle, |b| {
                count_quasipoly(eq, &big(b)).map(Some)
            }),
            Err(e) => Sweep::run("quasipoly", oracle, |_| Err(e.clone())),
        }));
        for m in [2u64, 3, 5, 10] {
            handles.push(scope.spawn(move || match Decimator::new(eq, m) {
                Ok(mut dec) => Sweep::run(format!("decimate(m={m})"), oracle, |b| {
                    Ok(Some(dec.count(&big(b))))
                }),
                Err(e) => Sweep::skipped(format!("decimate(m={m})"), e.to_string()),
            }));
        }
        handles.push(scope.spawn(move || {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let target: Vec<u64> = (0..eq.n()).map(|_| rng.gen_range(1..=3)).collect();
            let mut plans: HashMap<u64, TransformPlan> = HashMap::new();
            let name = format!("transform(c={target:?})");
            Sweep::run(name, oracle, |b| {
                let r = eq.residue(&big(b));
                let plan = match plans.entry(r.value()) {
                    Entry::Occupied(e) => e.into_mut(),
                    Entry::Vacant(e) => e.insert(build_transform(eq, &target, r)?),
                };
                transform_count(plan, &big(b)).map(Some)
            })
        }));
        handles.push(scope.spawn(|| {
            Sweep::run("closed", oracle, |b| {
                if closed_form_applies(eq, &big(b)) {
                    closed_form_count(eq, &big(b)).map(Some)
                } else {
                    Ok(None)
                }
            })
        }));
        handles.push(scope.spawn(|| match eq.coeffs() {
            &[a1, a2] if eq.is_coprime() => Sweep::run("twovar", oracle, |b| {
                two_var_count(a1, a2, &big(b)).map(Some)
            }),
            _ => Sweep::skipped("twovar", "needs two coprime coefficients"),
        }));
        handles.push(scope.spawn(move || {
            if max_b > VERIFY_BOUNDED_LIMIT || eq.n() > crate::bounded::MAX_BOUNDED_VARIABLES {
                return Sweep::skipped("bounded", "max-b too large for per-argument tables");
            }
            // bounds above max-b/aᵢ never bind on this range
            let bounds = eq.coeffs().iter().map(|a| max_b / a + 1).collect();
            match BoundedSystem::new(eq.clone(), bounds) {
                Ok(sys) => Sweep::run("bounded", oracle, |b| {
                    bounded_count(&sys, &big(b)).map(Some)
                }),
                Err(e) => Sweep::skipped("bounded", e.to_string()),
            }
        }));
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep thread panicked"))
            .collect()
    })
}

fn identity_checks(eq: &Equation, oracle: &[BigUint]) -> Vec<IdentityCheck> {
    let mut checks = Vec::new();
    let reduced = eq.reduced();

    match build_quasipoly(eq) {
        Ok(qp) => {
            let scalar = BigUint::from(reduced.lcm()).pow(reduced.n() as u32 - 1);
            let bad = qp.plans().iter().find(|p| {
                let sum: BigInt = p.l().iter().sum();
                sum * BigInt::from(reduced.product()) != BigInt::from(scalar.clone())
            });
            checks.push(IdentityCheck::new(
                "sum of l equals M^(n-1)/(a1...an)",
                bad.is_none(),
                match bad {
                    Some(p) => format!("fails at r = {}", p.residue()),
                    None => format!("all {} residues", qp.plans().len()),
                },
            ));
            checks.push(IdentityCheck::new(
                "alternating base-value sum equals M^(n-1)/(a1...an)",
                true,
                format!("all {} residues", qp.plans().len()),
            ));
            let forms = qp
                .plans()
                .iter()
                .map(|p| polynomial_form(&qp, p.residue()))
                .collect::<Result<Vec<_>, _>>();
            checks.push(IdentityCheck::new(
                "polynomial form: free coefficient P(r), leading M^(n-1)/(a1...an (n-1)!)",
                forms.is_ok(),
                forms.err().map(|e| e.to_string()).unwrap_or_default(),
            ));
        }
        Err(Error::ResourceLimit { .. }) => {
            checks.push(IdentityCheck::with_status(
                "coefficient-sum identities",
                CheckStatus::Skipped,
                "lcm too large for a full table",
            ));
        }
        Err(e) => {
            checks.push(IdentityCheck::new(
                "quasi-polynomial build",
                false,
                e.to_string(),
            ));
        }
    }

    let limit = oracle.len().min(VERIFY_BOUNDED_LIMIT as usize + 1);
    let violation = flat_identity_violation(eq, &oracle[..limit]);
    checks.push(IdentityCheck::new(
        "flat recurrence identity sum l'_k P(b-k) = C(b+n-1,n-1)",
        violation.is_none(),
        match violation {
            Some(b) => format!("fails at b = {b}"),
            None => format!("b = 0..={}", limit - 1),
        },
    ));
    checks.push(IdentityCheck::new(
        "l' palindromic",
        lprime_coeffs(eq).is_palindromic(),
        "",
    ));

    let pstar = pstar_table(eq);
    let a = eq.sum() as i64;
    let symmetric = (0..=a).all(|d| pstar.get(d) == pstar.get(a - d));
    checks.push(IdentityCheck::new("P* symmetric", symmetric, ""));
    let total: BigUint = pstar.values().iter().sum();
    checks.push(IdentityCheck::new(
        "P* total is 2^n",
        total == BigUint::from(1u8) << eq.n(),
        total.to_string(),
    ));

    if let &[x, y] = eq.coeffs() {
        if eq.is_coprime() && x != y {
            let (a1, a2) = (x.min(y), x.max(y));
            let mismatches: Vec<usize> = oracle
                .iter()
                .enumerate()
                .filter(|(b, want)| {
                    piecewise_two_var(a1, a2, &BigUint::from(*b))
                        .map(|v| v.as_biguint() != *want)
                        .unwrap_or(true)
                })
                .map(|(b, _)| b)
                .collect();
            let applies = piecewise_two_var_applies(a1, a2);
            let status = match (applies, mismatches.is_empty()) {
                (true, true) => CheckStatus::Pass,
                (true, false) => CheckStatus::Fail,
                (false, _) => CheckStatus::Note,
            };
            let detail = if mismatches.is_empty() {
                "no mismatches".to_string()
            } else {
                let shown: Vec<String> =
                    mismatches.iter().take(20).map(|b| b.to_string()).collect();
                format!(
                    "{} mismatches at b = {}{}",
                    mismatches.len(),
                    shown.join(","),
                    if mismatches.len() > 20 { ",..." } else { "" }
                )
            };
            checks.push(IdentityCheck::with_status(
                "two-variable piecewise rule",
                status,
                detail,
            ));
        }
    }
    checks
}

fn cmd_verify(args: &VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let eq = make_equation(&args.coeffs)?;
    let guard = table_guard();
    if args.max_b > guard {
        return Err(Failure::new(
            EXIT_INVALID_INPUT,
            format!("max-b {} exceeds the oracle guard {guard}", args.max_b),
        ));
    }
    let oracle = oracle_table(&eq, args.max_b as usize);
    let sweeps = sweeps(&eq, &oracle, args.max_b, args.seed);
    let identities = identity_checks(&eq, &oracle);

    let b = BigUint::from(args.max_b);
    let mut report = MethodReport::new(eq.clone(), b.clone());
    for method in [
        Method::Oracle,
        Method::Flat,
        Method::Decimate,
        Method::Quasipoly,
        Method::Closed,
        Method::Twovar,
    ] {
        report.record(method.name(), || count_with(&eq, &b, method));
    }
    report.identities = identities;

    let disagreement = sweeps.iter().find(|s| s.first_mismatch.is_some());
    let failed_identity = report
        .identities
        .iter()
        .find(|c| c.status == CheckStatus::Fail);
    let ok = disagreement.is_none() && failed_identity.is_none() && report.agreement();

    if args.json {
        let methods: Vec<Value> = sweeps
            .iter()
            .map(|s| {
                json!({
                    "name": s.name,
                    "checked": s.checked.to_string(),
                    "micros": s.micros.to_string(),
                    "skipped": s.skipped,
                    "first_mismatch": s.first_mismatch.as_ref().map(|(b, got, want)| {
                        json!({"b": b.to_string(), "got": got, "want": want})
                    }),
                })
            })
            .collect();
        let doc = json!({
            "coeffs": strings(eq.coeffs()),
            "gcd": eq.gcd().to_string(),
            "lcm": eq.lcm().to_string(),
            "max_b": args.max_b.to_string(),
            "seed": args.seed.to_string(),
            "methods": methods,
            "report": report.to_json(),
            "ok": ok,
        });
        write_json(out, &doc)?;
    } else {
        writeln!(
            out,
            "{}  (M = {}, A = {}, gcd = {}), b = 0..={}, seed {}",
            eq,
            eq.lcm(),
            eq.sum(),
            eq.gcd(),
            args.max_b,
            args.seed
        )?;
        writeln!(out, "methods against the oracle:")?;
        for s in &sweeps {
            match (&s.skipped, &s.first_mismatch) {
                (Some(why), _) => writeln!(out, "  {:<24} skipped: {why}", s.name)?,
                (None, Some((b, got, want))) => writeln!(
                    out,
                    "  {:<24} MISMATCH at b = {b}: got {got}, oracle {want}",
                    s.name
                )?,
                (None, None) if s.checked == 0 => {
                    writeln!(out, "  {:<24} no applicable arguments in range", s.name)?
                }
                (None, None) => writeln!(
                    out,
                    "  {:<24} {} values agree ({} us)",
                    s.name, s.checked, s.micros
                )?,
            }
        }
        writeln!(out, "identities:")?;
        for c in &report.identities {
            let detail = if c.detail.is_empty() {
                String::new()
            } else {
                format!(" ({})", c.detail)
            };
            writeln!(out, "  [{}] {}{detail}", c.status.label(), c.name)?;
        }
        writeln!(out, "all methods at the largest argument:")?;
        report.write_text(out)?;
        writeln!(out, "{}", if ok { "OK" } else { "FAILED" })?;
    }
    Ok(if ok { EXIT_OK } else { EXIT_DISAGREEMENT })
}

fn cmd_bench(args: &BenchArgs, out: &mut dyn Write) -> CmdResult {
    let eq = make_equation(&args.coeffs)?;
    let mut reports = Vec::new();
    for b in &args.b.0 {
        let mut report = MethodReport::new(eq.clone(), b.clone());
        for method in [
            Method::Oracle,
            Method::Flat,
            Method::Decimate,
            Method::Quasipoly,
            Method::Closed,
            Method::Twovar,
        ] {
            report.record(method.name(), || count_with(&eq, b, method));
        }
        reports.push(report);
    }
    let agree = reports.iter().all(MethodReport::agreement);
    if args.json {
        let doc = json!({
            "coeffs": strings(eq.coeffs()),
            "reports": reports.iter().map(MethodReport::to_json).collect::<Vec<_>>(),
        });
        write_json(out, &doc)?;
    } else {
        writeln!(out, "{eq}")?;
        for r in &reports {
            r.write_text(out)?;
            if let Some((name, us)) = r.timings_us.iter().min_by_key(|(_, us)| **us) {
                writeln!(out, "  fastest: {name} ({us} us)")?;
            }
        }
    }
    Ok(if agree { EXIT_OK } else { EXIT_DISAGREEMENT })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let mut argv = vec!["denumerant"];
        argv.extend_from_slice(args);
        let code = run(argv, &mut out, &mut err);
        (
            code,
            String::from_utf8(out).unwrap(),
            String::from_utf8(err).unwrap(),
        )
    }

    #[test]
    fn coefficient_parsing() {
        assert_eq!(CoeffList::from_str("2, 4,5").unwrap().0, vec![2, 4, 5]);
        assert!(CoeffList::from_str("2,0").is_err());
        assert!(CoeffList::from_str("2,-1").is_err());
        assert!(CoeffList::from_str("").is_err());
        assert_eq!(
            BigList::from_str("1,10000000000000000000000")
                .unwrap()
                .0
                .len(),
            2
        );
    }

    #[test]
    fn auto_selection() {
        let e = Equation::new(vec![2, 3]).unwrap();
        assert_eq!(auto_method(&e, &BigUint::from(5u8)), Method::Twovar);
        let e = Equation::new(vec![1, 5, 10, 10]).unwrap();
        assert_eq!(auto_method(&e, &BigUint::from(9005u32)), Method::Closed);
        let e = Equation::new(vec![2, 4, 5]).unwrap();
        assert_eq!(auto_method(&e, &BigUint::from(214u32)), Method::Flat);
        assert_eq!(
            auto_method(&e, &BigUint::from(10_000_000u32)),
            Method::Quasipoly
        );
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            run_capture(&["count", "--coeffs", "2,4,5", "--b", "214"]).0,
            0
        );
        assert_eq!(run_capture(&["count", "--coeffs", "2,x", "--b", "1"]).0, 2);
        assert_eq!(run_capture(&["count", "--coeffs", "2,4", "--b", "-1"]).0, 2);
        assert_eq!(run_capture(&["bogus"]).0, 2);
        let (code, _, err) = run_capture(&[
            "count", "--coeffs", "2,4,5", "--b", "214", "--method", "closed",
        ]);
        assert_eq!(code, 3, "{err}");
        assert_eq!(
            run_capture(&["count", "--coeffs", "2,4,5", "--b", "9", "--method", "twovar"]).0,
            3
        );
        assert_eq!(run_capture(&["--help"]).0, 0);
    }

    #[test]
    fn report_agreement() {
        let mut r = MethodReport::new(Equation::new(vec![2]).unwrap(), BigUint::from(4u8));
        assert!(r.agreement());
        r.results.insert("a".into(), BigCount::from(1));
        r.results.insert("b".into(), BigCount::from(1));
        assert!(r.agreement());
        r.results.insert("c".into(), BigCount::from(2));
        assert!(!r.agreement());
    }
}

//! Command-line front end.
//!
//! Exit codes: 0 success, 1 property violation, 2 usage or unreadable input,
//! 3 parameter invariant, 4 input certification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use num_bigint::BigInt;

use crate::bhseq::{block_basis, greedy_bh, BhProvider, ErdosTuranProvider, GreedyProvider};
use crate::error::Error;
use crate::numset::{counting_function, IntegerSet};
use crate::prescribe::lemmas::{decompose, partial_order_check, recover_a0, stage_inputs};
use crate::prescribe::{
    audit_from_json, audit_to_json, construct, window_safe_radius, ConstructionConfig,
    CountingMode, EpsilonSpec, GammaChoice, PrescribedFunction, Target,
};
use crate::repcount::{is_bhg, max_representation, rep_table};
use crate::zipt::{density_compare, transform_set, GammaSpec, TransformParams};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_PARAMETER: i32 = 3;
pub const EXIT_CERTIFICATION: i32 = 4;

#[derive(Parser, Debug)]
#[command(name = "bhrep", version, about = "B_h[g] sets and prescribed representation functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Greedy B_h[g] sequence prefix.
    Greedy(GreedyArgs),
    /// Build a set whose representation function matches a target.
    Prescribe(PrescribeArgs),
    /// Check properties of sets and construction runs.
    #[command(subcommand)]
    Verify(VerifyCommand),
    /// Block/dilation union of finite B_h sets with a density report.
    Block(BlockArgs),
}

#[derive(Args, Debug)]
struct GreedyArgs {
    #[arg(long)]
    h: usize,
    #[arg(long)]
    g: u64,
    #[arg(long)]
    count: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args, Debug)]
struct PrescribeArgs {
    #[arg(long)]
    h: usize,
    #[arg(long)]
    g: u64,
    /// Target function JSON.
    #[arg(long = "f")]
    target: PathBuf,
    /// Base B_h[g] set JSON.
    #[arg(long = "B")]
    base: PathBuf,
    #[arg(long)]
    steps: u64,
    /// `auto` or a positive integer.
    #[arg(long, default_value = "auto")]
    r: String,
    /// `auto` or a gamma spec such as `linear:17`.
    #[arg(long, default_value = "auto")]
    gamma: String,
    /// Required with `--gamma auto`, e.g. `pow:0.5`.
    #[arg(long)]
    epsilon: Option<String>,
    #[arg(long, default_value = "auto")]
    mode: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    audit: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum VerifyCommand {
    /// Representation table over a window, optionally against a target.
    Repfn(RepfnArgs),
    /// B_h[g] certification.
    Bh(BhArgs),
    /// Density comparison between B and its transform.
    Density(DensityArgs),
    /// Class decomposition and partial-order diagnostics for a run.
    Lemmas(LemmasArgs),
}

#[derive(Args, Debug)]
struct RepfnArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    h: usize,
    #[arg(long, allow_hyphen_values = true)]
    from: BigInt,
    #[arg(long, allow_hyphen_values = true)]
    to: BigInt,
    #[arg(long)]
    expect: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BhArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    h: usize,
    #[arg(long)]
    g: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DensityArgs {
    /// Base set B.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    r: u64,
    #[arg(long)]
    gamma: String,
    /// Comma-separated evaluation points.
    #[arg(long, value_delimiter = ',')]
    x: Vec<BigInt>,
    /// Constructed set A, to also check A(x) >= T(B)(x) - n0.
    #[arg(long)]
    set: Option<PathBuf>,
    #[arg(long)]
    n0: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LemmasArgs {
    /// Audit JSON of the run.
    #[arg(long = "in")]
    input: PathBuf,
    /// Final set A written by `prescribe`.
    #[arg(long)]
    set: PathBuf,
    #[arg(long, default_value_t = 2)]
    h: usize,
    #[arg(long)]
    k: u64,
    #[arg(long)]
    n0: u64,
    /// Also check r_{A,h'} <= g for h' < h.
    #[arg(long)]
    g: Option<u64>,
    #[arg(long, allow_hyphen_values = true, requires = "to")]
    from: Option<BigInt>,
    #[arg(long, allow_hyphen_values = true, requires = "from")]
    to: Option<BigInt>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BlockArgs {
    #[arg(long)]
    h: usize,
    #[arg(long)]
    levels: usize,
    /// Comma-separated x_0 = 1, x_1, ..., x_levels.
    #[arg(long, value_delimiter = ',')]
    x: Vec<u64>,
    /// `greedy` or `erdos-turan`.
    #[arg(long, default_value = "greedy")]
    provider: String,
    #[arg(long, default_value_t = 1)]
    g: u64,
    /// `log`, `pow:<e>` or `const:<c>`.
    #[arg(long, default_value = "log")]
    omega: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    report: Option<PathBuf>,
}

/// A failed command: exit code plus message for stderr.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
            Error::Configuration(_)
            | Error::InvalidTarget(_)
            | Error::InvalidParameter(_)
            | Error::InvalidModulus(_)
            | Error::UnsupportedEpsilon(_)
            | Error::Mode(_)
            | Error::EmptyA0 { .. }
            | Error::LevelConstruction { .. } => EXIT_PARAMETER,
            Error::NotBhg { .. } | Error::Domain(_) => EXIT_CERTIFICATION,
            Error::Range(_) | Error::Diagnostic(_) => EXIT_VIOLATION,
        };
        Failure::new(code, e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{}", e.render());
                return EXIT_USAGE;
            }
            let _ = write!(out, "{}", e.render());
            return EXIT_OK;
        }
    };
    let result = match cli.command {
        Command::Greedy(a) => cmd_greedy(a, out),
        Command::Prescribe(a) => cmd_prescribe(a, out, err),
        Command::Verify(v) => match v {
            VerifyCommand::Repfn(a) => verify_repfn(a, out, err),
            VerifyCommand::Bh(a) => verify_bh(a, out),
            VerifyCommand::Density(a) => verify_density(a, out),
            VerifyCommand::Lemmas(a) => verify_lemmas(a, out, err),
        },
        Command::Block(a) => cmd_block(a, out, err),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

fn read_set(path: &Path) -> std::result::Result<IntegerSet, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))?;
    IntegerSet::from_json(&text)
        .map(|(_, s)| s)
        .map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn read_text(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn write_file(path: &Path, text: &str) -> CmdResult {
    let mut body = text.to_string();
    if !body.ends_with('\n') {
        body.push('\n');
    }
    fs::write(path, body).map_err(|e| Failure::new(EXIT_USAGE, format!("{}: {e}", path.display())))
}

/// Writes to `path` when given, else to stdout.
fn emit(path: Option<&Path>, text: &str, out: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => write_file(p, text),
        None => write!(out, "{text}").map_err(|e| Failure::new(EXIT_USAGE, e.to_string())),
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure::new(EXIT_USAGE, msg)
}

fn cmd_greedy(a: GreedyArgs, out: &mut dyn Write) -> CmdResult {
    if a.h < 2 || a.g < 1 || a.count < 1 {
        return Err(usage("greedy needs --h >= 2, --g >= 1, --count >= 1"));
    }
    let set = greedy_bh(a.h, a.g, a.count);
    let name = a
        .name
        .unwrap_or_else(|| format!("greedy_B{}[{}]_{}", a.h, a.g, a.count));
    write_file(&a.out, &set.to_json(&name))?;
    let cert = is_bhg(&set, a.h, a.g);
    let _ = writeln!(
        out,
        "certified B_{}[{}]: {} ({} elements, max {})",
        a.h,
        a.g,
        cert.holds,
        set.len(),
        set.max().map(ToString::to_string).unwrap_or_default()
    );
    if cert.holds {
        Ok(())
    } else {
        Err(Failure::new(EXIT_VIOLATION, "greedy output failed certification"))
    }
}

fn cmd_prescribe(a: PrescribeArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let r = match a.r.as_str() {
        "auto" => None,
        v => Some(
            v.parse::<u64>()
                .ok()
                .filter(|r| *r >= 1)
                .ok_or_else(|| usage(format!("--r must be auto or a positive integer, got {v:?}")))?,
        ),
    };
    let gamma = match (a.gamma.as_str(), &a.epsilon) {
        ("auto", Some(eps)) => GammaChoice::FromEpsilon(EpsilonSpec::from_str(eps)?),
        ("auto", None) => return Err(usage("--gamma auto requires --epsilon pow:<delta>")),
        (spec, _) => GammaChoice::Given(GammaSpec::from_str(spec)?),
    };
    let mode = CountingMode::from_str(&a.mode)?;
    let target = PrescribedFunction::from_json(&read_text(&a.target)?)?;
    let base = read_set(&a.base)?;

    let config = ConstructionConfig {
        h: a.h,
        g: a.g,
        steps: a.steps,
        gamma,
        r,
        mode,
    };
    let state = construct(&base, &target, &config)?;
    let p = &state.params;
    let transform = p.transform();
    if transform.is_boundary_case(p.h) {
        let _ = writeln!(err, "warning: 2r = log2 h sits on the boundary of the hypothesis");
    }
    let _ = writeln!(out, "n0 = {}", p.n0);
    let _ = writeln!(out, "r = {}", p.r);
    let _ = writeln!(out, "gamma = {}", p.gamma);
    let _ = writeln!(out, "safe radius = {}", window_safe_radius(p));
    let _ = writeln!(
        out,
        "mode = {}",
        if state.mode == CountingMode::Window { "window" } else { "full" }
    );
    let _ = writeln!(out, "truncation radius = {}", state.truncation_radius);
    let added = state.audit.iter().filter(|s| s.added).count();
    let _ = writeln!(
        out,
        "stages = {}, additions = {added}, |A0| = {}, |A| = {}",
        state.k(),
        state.a0.len(),
        state.a.len()
    );
    if state.k() == 0 {
        let _ = writeln!(out, "A = A0 = {}", state.a0);
    }
    write_file(&a.out, &state.a.to_json(&format!("A_{}", state.k())))?;
    if let Some(path) = &a.audit {
        write_file(path, &audit_to_json(&state.audit))?;
    }
    Ok(())
}

fn verify_repfn(a: RepfnArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.from > a.to {
        return Err(usage("--from must not exceed --to"));
    }
    let set = read_set(&a.input)?;
    let table = rep_table(&set, a.h, &a.from, &a.to);
    emit(a.out.as_deref(), &table.to_csv(), out)?;
    if let Some(path) = &a.expect {
        let target = PrescribedFunction::from_json(&read_text(path)?)?;
        for (n, count) in table.iter() {
            let want = target.value(&n);
            if want.is_finite() && want != count {
                return Err(Failure::new(
                    EXIT_VIOLATION,
                    format!("r({n}) = {count}, target {want}"),
                ));
            }
        }
        let _ = writeln!(err, "table matches target on [{}, {}]", a.from, a.to);
    }
    Ok(())
}

fn verify_bh(a: BhArgs, out: &mut dyn Write) -> CmdResult {
    let set = read_set(&a.input)?;
    let cert = is_bhg(&set, a.h, a.g);
    let max = max_representation(&set, a.h).map_or(0, |(_, c)| c);
    let csv = format!(
        "h,g,size,max_count,holds\n{},{},{},{max},{}\n",
        a.h,
        a.g,
        set.len(),
        cert.holds
    );
    emit(a.out.as_deref(), &csv, out)?;
    match cert.witness {
        None => Ok(()),
        Some((n, c)) => Err(Failure::new(
            EXIT_VIOLATION,
            format!("not B_{}[{}]: r({n}) = {c}", a.h, a.g),
        )),
    }
}

fn verify_density(a: DensityArgs, out: &mut dyn Write) -> CmdResult {
    let base = read_set(&a.input)?;
    let params = TransformParams::new(a.r, GammaSpec::from_str(&a.gamma)?)?;
    let points = density_compare(&base, &params, &a.x)?;
    let construction = match (&a.set, a.n0) {
        (Some(path), Some(n0)) => Some((read_set(path)?, n0)),
        (None, None) => None,
        _ => return Err(usage("--set and --n0 go together")),
    };
    let transformed = transform_set(&base, &params)?;

    let mut csv = String::from("x,left,right,bound,strict,vacuous");
    if construction.is_some() {
        csv.push_str(",a_count,a_bound_holds");
    }
    csv.push('\n');
    let mut first_failure = None;
    for p in &points {
        csv.push_str(&format!(
            "{},{},{},{},{},{}",
            p.x, p.left, p.right, p.bound, p.strict, p.vacuous
        ));
        if !p.holds() && first_failure.is_none() {
            first_failure = Some(format!("T(B)({}) = {} vs B({}) = {}", p.x, p.left, p.bound, p.right));
        }
        if let Some((set, n0)) = &construction {
            let a_count = counting_function(set, &p.x);
            let t_count = counting_function(&transformed, &p.x);
            let ok = a_count as i128 >= t_count as i128 - *n0 as i128;
            csv.push_str(&format!(",{a_count},{ok}"));
            if !ok && first_failure.is_none() {
                first_failure = Some(format!("A({}) = {a_count} < T(B)(x) - n0 = {t_count} - {n0}", p.x));
            }
        }
        csv.push('\n');
    }
    emit(a.out.as_deref(), &csv, out)?;
    match first_failure {
        None => Ok(()),
        Some(msg) => Err(Failure::new(EXIT_VIOLATION, msg)),
    }
}

fn verify_lemmas(a: LemmasArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    if a.h < 2 {
        return Err(usage("--h must be at least 2"));
    }
    let audit = audit_from_json(&read_text(&a.input)?)?;
    let final_set = read_set(&a.set)?;
    let a0 = recover_a0(&final_set, &audit)?;
    let (base, u) = stage_inputs(&a0, &audit, a.k)?;
    let dec = decompose(&base, &u, a.h, a.k);
    let report = dec.report(a.n0);

    let mut csv = String::from("s,t,size,min_abs,exempt\n");
    for ((s, t), set) in &dec.classes {
        let min_abs = set.iter().map(|n| n.magnitude().clone()).min();
        let exempt = (*s, *t) == (0, 0) || (*s, *t) == (a.h - 1, 1);
        csv.push_str(&format!(
            "{s},{t},{},{},{exempt}\n",
            set.len(),
            min_abs.map(|m| m.to_string()).unwrap_or_default()
        ));
    }
    emit(a.out.as_deref(), &csv, out)?;
    let _ = writeln!(
        err,
        "stage {}: disjoint = {}, min |n| outside exempt pair = {}, exceeds n0 = {}",
        a.k,
        report.disjoint,
        report
            .min_magnitude
            .as_ref()
            .map(ToString::to_string)
            .unwrap_or_else(|| "-".into()),
        report.exceeds_n0
    );
    if let Some((p, q)) = report.overlaps.first() {
        return Err(Failure::new(
            EXIT_VIOLATION,
            format!("classes {p:?} and {q:?} intersect"),
        ));
    }
    if !report.exceeds_n0 {
        return Err(Failure::new(EXIT_VIOLATION, "a class outside the exempt pair reaches |n| <= n0"));
    }
    if let Some(g) = a.g {
        let window = a.from.as_ref().zip(a.to.as_ref());
        let po = partial_order_check(&final_set, a.h, g, window);
        for row in &po.rows {
            let _ = writeln!(
                err,
                "h' = {}: max r = {} (at {})",
                row.h_prime,
                row.max_count,
                row.argmax.as_ref().map(ToString::to_string).unwrap_or_else(|| "-".into())
            );
            if row.max_count > g {
                return Err(Failure::new(
                    EXIT_VIOLATION,
                    format!("r_(A,{}) exceeds g = {g}", row.h_prime),
                ));
            }
        }
    }
    Ok(())
}

fn parse_omega(spec: &str) -> std::result::Result<Box<dyn Fn(f64) -> f64>, Failure> {
    let bad = || usage(format!("--omega must be log, pow:<e> or const:<c>, got {spec:?}"));
    match spec.split_once(':') {
        None if spec == "log" => Ok(Box::new(f64::ln)),
        Some(("pow", e)) => {
            let e: f64 = e.parse().map_err(|_| bad())?;
            Ok(Box::new(move |x: f64| x.powf(e)))
        }
        Some(("const", c)) => {
            let c: f64 = c.parse().map_err(|_| bad())?;
            Ok(Box::new(move |_| c))
        }
        _ => Err(bad()),
    }
}

fn cmd_block(a: BlockArgs, out: &mut dyn Write, err: &mut dyn Write) -> CmdResult {
    let omega = parse_omega(&a.omega)?;
    let provider: Box<dyn BhProvider> = match a.provider.as_str() {
        "greedy" => Box::new(GreedyProvider { g: a.g }),
        "erdos-turan" => Box::new(ErdosTuranProvider),
        other => return Err(usage(format!("unknown provider {other:?}"))),
    };
    let basis = block_basis(a.h, a.levels, &a.x, provider.as_ref(), omega.as_ref())?;
    for row in basis.report.iter().filter(|r| !r.omega_ok) {
        let _ = writeln!(
            err,
            "warning: level {}: omega(x_k) > (h x_(k-1))^(1/h) does not hold",
            row.k
        );
    }
    write_file(&a.out, &basis.set.to_json(&format!("block_B{}_{}", a.h, a.levels)))?;
    emit(a.report.as_deref(), &basis.report_csv(), out)?;
    let _ = writeln!(
        err,
        "union has {} elements, certified B_{}[{}]",
        basis.set.len(),
        a.h,
        basis.certified_g
    );
    Ok(())
}

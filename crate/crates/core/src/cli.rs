//! Command-line front end: argument parsing into [`RunConfig`], dispatch to the
//! library, and rendering of reports as text, CSV or JSON.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use dashu::rational::RBig;
use serde::Serialize;
use serde_json::value::RawValue;

use crate::counting::{
    asymptotic_constant, build_context, count_n, count_report, envelope_s1, predicted_main_term,
    refined_asymptotic_constant, CountReport, Mode, SPartContext,
};
use crate::error::{Error, Result};
use crate::igusa::{local_measure, local_measure_oracle_with_budget, LocalFactor, DEFAULT_ORACLE_BUDGET};
use crate::msums::{lattice_count, power_sum_gt, power_sum_le, Beta, ExactReal, SigmaSet};
use crate::num::{float, float_rat, format_f64, format_float, parse_rational, rational_string, Float, DEFAULT_PRECISION};
use crate::padic::padic_roots;
use crate::poly::IntPoly;

/// Environment variable holding the default worker count.
pub const THREADS_ENV: &str = "SPART_THREADS";

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Subcommand {
    Roots,
    Zeta,
    Measure,
    Count,
    Predict,
    Powersum,
    Lattice,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Plain,
    Normalized,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Plain => Mode::Plain,
            ModeArg::Normalized => Mode::Normalized,
        }
    }
}

/// One invocation of the tool.
#[derive(Parser, Clone, Debug, PartialEq, Eq)]
#[command(name = "spart", version, about = "Igusa local zeta functions and S-part counting")]
pub struct RunConfig {
    #[arg(value_enum)]
    pub command: Subcommand,
    /// Polynomial, e.g. `x^2-1` or `-1,0,1`.
    #[arg(short = 'f', long = "poly", allow_hyphen_values = true)]
    pub poly: Option<String>,
    /// Primes, comma separated.
    #[arg(short = 'S', long = "primes", visible_short_alias = 'p', value_delimiter = ',')]
    pub primes: Vec<u64>,
    #[arg(long)]
    pub eps: Option<String>,
    #[arg(short = 'B', long = "bound", value_parser = parse_count)]
    pub bound: Option<u64>,
    /// `start:stop:factor` or a comma-separated list of bounds.
    #[arg(long)]
    pub ladder: Option<String>,
    #[arg(long, value_enum, default_value = "plain")]
    pub mode: ModeArg,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: Option<String>,
    #[arg(long)]
    pub beta: Option<String>,
    #[arg(short = 't')]
    pub t: Option<u64>,
    #[arg(short = 'L', long = "limit")]
    pub limit: Option<String>,
    /// Valuation level for `measure`, target precision for `roots`.
    #[arg(short = 'k')]
    pub k: Option<u32>,
    /// Use the brute-force oracle in `measure`.
    #[arg(long)]
    pub oracle: bool,
    #[arg(long, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, default_value_t = 30)]
    pub digits: usize,
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, value_parser = parse_count)]
    pub budget: Option<u64>,
}

/// Accepts plain integers and forms such as `1e6`.
fn parse_count(s: &str) -> std::result::Result<u64, String> {
    let r = parse_rational(s).map_err(|e| e.to_string())?;
    if r.denominator() != &dashu::integer::UBig::ONE {
        return Err(format!("{s:?} is not an integer"));
    }
    u64::try_from(r.numerator()).map_err(|_| format!("{s:?} is out of range"))
}

/// Failure of a CLI invocation, carrying its exit status.
#[derive(Debug)]
pub enum CliError {
    /// Usage problems; `help` and `version` requests land here with status 0.
    Usage(clap::Error),
    Run(Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(e) => {
                if e.use_stderr() {
                    2
                } else {
                    0
                }
            }
            CliError::Run(e) => {
                if e.is_computational() {
                    3
                } else {
                    2
                }
            }
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "{e}"),
            CliError::Run(e) => write!(f, "error: {e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

impl RunConfig {
    /// Parses arguments (without the program name) and canonicalizes the values.
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, CliError>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        let argv = std::iter::once(std::ffi::OsString::from("spart")).chain(args.into_iter().map(Into::into));
        let cfg = RunConfig::try_parse_from(argv).map_err(CliError::Usage)?;
        cfg.canonical().map_err(CliError::Run)
    }

    /// Parses a shell-quoted command line such as `count -f x -S 2 --eps 1/3 -B 64`.
    pub fn parse(line: &str) -> std::result::Result<Self, CliError> {
        let words = shlex::split(line).ok_or_else(|| CliError::Run(Error::Parse("unbalanced quotes".into())))?;
        Self::from_args(words)
    }

    /// Rewrites every value in its canonical spelling.
    pub fn canonical(mut self) -> Result<Self> {
        if let Some(p) = &self.poly {
            self.poly = Some(IntPoly::from_str(p)?.to_human());
        }
        self.primes.sort_unstable();
        self.primes.dedup();
        if let Some(e) = &self.eps {
            self.eps = Some(rational_string(&parse_rational(e)?));
        }
        if let Some(l) = &self.ladder {
            self.ladder = Some(Ladder::from_str(l)?.to_string());
        }
        if let Some(s) = &self.sigma {
            self.sigma = Some(SigmaSet::from_str(s)?.to_string());
        }
        if let Some(a) = &self.alpha {
            self.alpha = Some(rational_string(&parse_rational(a)?));
        }
        if let Some(b) = &self.beta {
            self.beta = Some(Beta::from_str(b)?.to_string());
        }
        if let Some(l) = &self.limit {
            self.limit = Some(ExactReal::from_str(l)?.to_string());
        }
        Ok(self)
    }

    /// Canonical command line; `parse(render(c)) == c` for canonical `c`.
    pub fn render(&self) -> String {
        let mut w: Vec<String> = vec![value_name(self.command)];
        let mut push = |flag: &str, v: String| {
            w.push(flag.to_string());
            w.push(v);
        };
        if let Some(p) = &self.poly {
            push("-f", p.clone());
        }
        if !self.primes.is_empty() {
            push("-S", self.primes.iter().map(u64::to_string).collect::<Vec<_>>().join(","));
        }
        if let Some(e) = &self.eps {
            push("--eps", e.clone());
        }
        if let Some(b) = self.bound {
            push("-B", b.to_string());
        }
        if let Some(l) = &self.ladder {
            push("--ladder", l.clone());
        }
        push("--mode", value_name(self.mode));
        if let Some(s) = &self.sigma {
            push("--sigma", s.clone());
        }
        if let Some(a) = &self.alpha {
            push("--alpha", a.clone());
        }
        if let Some(b) = &self.beta {
            push("--beta", b.clone());
        }
        if let Some(t) = self.t {
            push("-t", t.to_string());
        }
        if let Some(l) = &self.limit {
            push("-L", l.clone());
        }
        if let Some(k) = self.k {
            push("-k", k.to_string());
        }
        push("--format", value_name(self.format));
        push("--digits", self.digits.to_string());
        if let Some(t) = self.threads {
            push("--threads", t.to_string());
        }
        if let Some(b) = self.budget {
            push("--budget", b.to_string());
        }
        if self.oracle {
            w.push("--oracle".into());
        }
        w.iter().map(|x| quote_word(x)).collect::<Vec<_>>().join(" ")
    }

    fn poly(&self) -> Result<IntPoly> {
        let s = self.poly.as_deref().ok_or_else(|| missing("-f/--poly"))?;
        IntPoly::from_str(s)
    }

    fn prime(&self) -> Result<u64> {
        match self.primes.as_slice() {
            [p] => Ok(*p),
            [] => Err(missing("-p/--primes")),
            _ => Err(Error::InvalidInput("expected a single prime".into())),
        }
    }

    fn eps(&self) -> Result<RBig> {
        parse_rational(self.eps.as_deref().ok_or_else(|| missing("--eps"))?)
    }

    fn sigma(&self) -> Result<SigmaSet> {
        SigmaSet::from_str(self.sigma.as_deref().ok_or_else(|| missing("--sigma"))?)
    }

    fn context(&self) -> Result<SPartContext> {
        if self.primes.is_empty() {
            return Err(missing("-S/--primes"));
        }
        build_context(&self.poly()?, &self.primes)
    }

    fn normalized(&self) -> bool {
        Mode::from(self.mode).is_normalized()
    }
}

/// Shell quoting only where a word would otherwise split or unquote.
fn quote_word(w: &str) -> String {
    let plain = !w.is_empty() && !w.chars().any(|c| c.is_whitespace() || "'\"\\$`;&|<>#*?!~".contains(c));
    if plain {
        w.to_string()
    } else {
        shlex::try_quote(w).expect("no NUL bytes").into_owned()
    }
}

fn value_name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().expect("no skipped variants").get_name().to_string()
}

fn missing(flag: &str) -> Error {
    Error::InvalidInput(format!("missing required flag {flag}"))
}

/// A ladder of bounds: `start:stop:factor` or an explicit list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Ladder {
    Geometric { start: u64, stop: u64, factor: RBig },
    List(Vec<u64>),
}

impl Ladder {
    /// The bounds, strictly increasing.
    pub fn bounds(&self) -> Vec<u64> {
        match self {
            Ladder::List(v) => v.clone(),
            Ladder::Geometric { start, stop, factor } => {
                let mut out = Vec::new();
                let mut x = RBig::from(*start);
                let stop_r = RBig::from(*stop);
                while x <= stop_r {
                    let b = u64::try_from(x.round()).expect("bounded by stop");
                    if out.last().is_none_or(|&l| l < b) {
                        out.push(b);
                    }
                    x *= factor;
                }
                out
            }
        }
    }
}

impl FromStr for Ladder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let int = |t: &str| parse_count(t.trim()).map_err(Error::Parse);
        let parts: Vec<&str> = s.split(':').collect();
        match parts.as_slice() {
            [start, stop, factor] => {
                let (start, stop) = (int(start)?, int(stop)?);
                let factor = parse_rational(factor)?;
                if start == 0 || factor <= RBig::ONE || stop < start {
                    return Err(Error::InvalidInput(format!("bad ladder {s:?}")));
                }
                Ok(Ladder::Geometric { start, stop, factor })
            }
            [list] => {
                let v = list.split(',').map(int).collect::<Result<Vec<_>>>()?;
                if v.is_empty() || v.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::InvalidInput(format!("ladder {s:?} must be strictly increasing")));
                }
                Ok(Ladder::List(v))
            }
            _ => Err(Error::Parse(format!("bad ladder {s:?}"))),
        }
    }
}

impl std::fmt::Display for Ladder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ladder::Geometric { start, stop, factor } => {
                let fac = if factor.denominator() == &dashu::integer::UBig::ONE {
                    factor.numerator().to_string()
                } else {
                    rational_string(factor)
                };
                write!(f, "{start}:{stop}:{fac}")
            }
            Ladder::List(v) => f.write_str(&v.iter().map(u64::to_string).collect::<Vec<_>>().join(",")),
        }
    }
}

/// Worker count: `--threads`, else the environment, else rayon's default.
fn thread_count(cfg: &RunConfig) -> Option<usize> {
    cfg.threads.or_else(|| std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse().ok()))
}

/// Executes `cfg` and returns the complete output text.
pub fn run(cfg: &RunConfig) -> Result<String> {
    match thread_count(cfg) {
        Some(n) if n > 0 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::InvalidInput(e.to_string()))?;
            pool.install(|| dispatch(cfg))
        }
        _ => dispatch(cfg),
    }
}

/// Parses, runs and reports `(exit status, stdout, stderr)`. Nothing is
/// written to stdout on failure.
pub fn main_with_args<I, T>(args: I) -> (i32, String, String)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(CliError::Usage(e)) if !e.use_stderr() => return (0, e.to_string(), String::new()),
        Err(e) => return (e.exit_code(), String::new(), format!("{e}\n")),
    };
    match run(&cfg) {
        Ok(out) => (0, out, String::new()),
        Err(e) => {
            let e = CliError::Run(e);
            (e.exit_code(), String::new(), format!("{e}\n"))
        }
    }
}

fn dispatch(cfg: &RunConfig) -> Result<String> {
    match cfg.command {
        Subcommand::Roots => roots(cfg),
        Subcommand::Zeta => zeta(cfg),
        Subcommand::Measure => measure(cfg),
        Subcommand::Count => count(cfg),
        Subcommand::Predict => predict(cfg),
        Subcommand::Powersum => powersum(cfg),
        Subcommand::Lattice => lattice(cfg),
        Subcommand::Report => {
            let ctx = cfg.context()?;
            let ladder = match (&cfg.ladder, cfg.bound) {
                (Some(l), _) => Ladder::from_str(l)?.bounds(),
                (None, Some(b)) => vec![b],
                (None, None) => return Err(missing("--ladder")),
            };
            let report = count_report(&ctx, &cfg.eps()?, &ladder, cfg.normalized())?;
            Ok(emit_report(&report, cfg.format, cfg.digits))
        }
    }
}

fn json_line<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn roots(cfg: &RunConfig) -> Result<String> {
    let f = cfg.poly()?;
    if cfg.primes.is_empty() {
        return Err(missing("-p/--primes"));
    }
    let target = cfg.k.unwrap_or(8).max(1);
    let profiles = cfg
        .primes
        .iter()
        .map(|&p| padic_roots(&f, p, target))
        .collect::<Result<Vec<_>>>()?;
    if cfg.format == Format::Json {
        return Ok(json_line(&profiles));
    }
    let mut out = String::new();
    for pr in &profiles {
        let _ = writeln!(
            out,
            "p = {}: l = {}, R_p = {}, u_p(g) = {}",
            pr.p, pr.l, pr.r_max, pr.u_p_g
        );
        for (i, r) in pr.roots.iter().enumerate() {
            let _ = writeln!(
                out,
                "  {} mod {}^{}  r = {}  v_p(g(α)) = {}",
                r.residue, pr.p, r.precision_exponent, r.multiplicity, pr.residual_valuations[i]
            );
        }
        for row in &pr.pairwise_valuations {
            let _ = writeln!(out, "  {}", row.iter().map(u32::to_string).collect::<Vec<_>>().join(" "));
        }
    }
    Ok(out)
}

fn zeta(cfg: &RunConfig) -> Result<String> {
    let f = cfg.poly()?;
    let p = cfg.prime()?;
    let lf = LocalFactor::new(&f, p)?;
    let z = lf.zeta();
    if cfg.format == Format::Json {
        return Ok(json_line(&z));
    }
    let mut terms: Vec<String> = z
        .polynomial_part
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| match i {
            0 => rational_string(c),
            1 => format!("{}*t", rational_string(c)),
            _ => format!("{}*t^{i}", rational_string(c)),
        })
        .collect();
    for term in &z.pole_terms {
        let tr = if term.r == 1 { "t".to_string() } else { format!("t^{}", term.r) };
        terms.push(format!("{}*t^{}/(1-{tr}/{p})", rational_string(&term.scale), term.k));
    }
    let mut out = format!("Z(t) = {}\n", if terms.is_empty() { "0".into() } else { terms.join(" + ") });
    if let Some(d) = lf.igusa() {
        let _ = writeln!(out, "lambda_p = {}, a_p = {}, k = {:?}", d.lambda_p, d.a_p, d.k_list);
    }
    Ok(out)
}

fn measure(cfg: &RunConfig) -> Result<String> {
    let f = cfg.poly()?;
    let p = cfg.prime()?;
    let budget = cfg.budget.unwrap_or(DEFAULT_ORACLE_BUDGET);
    let levels: Vec<u32> = match cfg.k {
        Some(k) => vec![k],
        None => {
            let lf = LocalFactor::new(&f, p)?;
            let top = match &lf {
                LocalFactor::Rooted(d) => d.a_p + 1,
                LocalFactor::Rootless { u_p, .. } => *u_p,
            };
            (0..=top).collect()
        }
    };
    let mut rows = Vec::new();
    for &k in &levels {
        let m = if cfg.oracle {
            local_measure_oracle_with_budget(&f, p, k, budget)?
        } else {
            local_measure(&f, p, k)?
        };
        rows.push((k, rational_string(&m)));
    }
    Ok(match cfg.format {
        Format::Json => json_line(
            &rows
                .iter()
                .map(|(k, m)| serde_json::json!({"k": k, "measure": m}))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => {
            let mut s = String::from("k,measure\n");
            for (k, m) in &rows {
                let _ = writeln!(s, "{k},{m}");
            }
            s
        }
        Format::Text if rows.len() == 1 => format!("{}\n", rows[0].1),
        Format::Text => rows.iter().map(|(k, m)| format!("{k} {m}\n")).collect(),
    })
}

fn count(cfg: &RunConfig) -> Result<String> {
    let ctx = cfg.context()?;
    let b = cfg.bound.ok_or_else(|| missing("-B/--bound"))?;
    let n = count_n(&ctx, &cfg.eps()?, b, cfg.normalized())?;
    Ok(match cfg.format {
        Format::Json => json_line(&serde_json::json!({"B": b, "count": n})),
        Format::Csv => format!("B,count\n{b},{n}\n"),
        Format::Text => format!("{n}\n"),
    })
}

fn predict(cfg: &RunConfig) -> Result<String> {
    let ctx = cfg.context()?;
    let eps = cfg.eps()?;
    let b = cfg.bound.ok_or_else(|| missing("-B/--bound"))?;
    let pred = predicted_main_term(&ctx, &eps, &float(b, DEFAULT_PRECISION), cfg.normalized())?;
    let d = cfg.digits;
    let constant = asymptotic_constant(&ctx, &eps).ok().map(|c| format_float(&c, d));
    let refined = refined_asymptotic_constant(&ctx, &eps).ok().map(|c| format_float(&c, d));
    let envelope = envelope_s1(&ctx, &eps)
        .ok()
        .map(|(lo, hi)| [format_float(&lo, d), format_float(&hi, d)]);
    Ok(match cfg.format {
        Format::Json => json_line(&serde_json::json!({
            "B": b,
            "predicted": format_float(&pred.value, d),
            "order_only": pred.order_only,
            "exponent": format_float(&pred.exponent, d),
            "log_power": pred.log_power,
            "constant": constant,
            "refined_constant": refined,
            "envelope": envelope,
        })),
        Format::Csv => format!("B,predicted,order_only\n{b},{},{}\n", format_float(&pred.value, d), pred.order_only),
        Format::Text => {
            let mut s = format_float(&pred.value, d);
            if pred.order_only {
                s.push_str(" (order only)");
            }
            s.push('\n');
            if let Some([lo, hi]) = envelope {
                let _ = writeln!(s, "envelope {lo} {hi}");
            }
            s
        }
    })
}

fn powersum(cfg: &RunConfig) -> Result<String> {
    let sigma = cfg.sigma()?;
    let alpha = parse_rational(cfg.alpha.as_deref().ok_or_else(|| missing("--alpha"))?)?;
    let l = ExactReal::from_str(cfg.limit.as_deref().ok_or_else(|| missing("-L"))?)?;
    let prec = DEFAULT_PRECISION;
    let v = if alpha > RBig::ZERO {
        power_sum_le(&sigma, &float_rat(&alpha, prec), &l)?
    } else if alpha < RBig::ZERO {
        let tol = Float::from_parts(dashu::integer::IBig::ONE, -(prec as isize));
        power_sum_gt(&sigma, &float_rat(&(-alpha), prec), &l, &tol)?
    } else {
        return Err(Error::InvalidInput("α must be nonzero".into()));
    };
    let s = format_float(&v, cfg.digits);
    Ok(match cfg.format {
        Format::Json => json_line(&serde_json::json!({"value": s})),
        Format::Csv => format!("value\n{s}\n"),
        Format::Text => format!("{s}\n"),
    })
}

fn lattice(cfg: &RunConfig) -> Result<String> {
    let sigma = cfg.sigma()?;
    let beta = match &cfg.beta {
        Some(b) => Beta::from_str(b)?,
        None => Beta::E,
    };
    let t = cfg.t.ok_or_else(|| missing("-t"))?;
    let n = lattice_count(&sigma, &beta, t)?;
    Ok(match cfg.format {
        Format::Json => json_line(&serde_json::json!({"t": t, "count": n})),
        Format::Csv => format!("t,count\n{t},{n}\n"),
        Format::Text => format!("{n}\n"),
    })
}

#[derive(Serialize)]
struct RowJson {
    #[serde(rename = "B")]
    b: u64,
    count: u64,
    predicted: Option<Box<RawValue>>,
    ratio: Option<Box<RawValue>>,
}

#[derive(Serialize)]
struct ReportJson {
    f: String,
    #[serde(rename = "S")]
    s: Vec<u64>,
    #[serde(rename = "S_prime")]
    s_prime: Vec<u64>,
    eps: String,
    mode: Mode,
    order_only: bool,
    ladder: Vec<RowJson>,
    fitted_exponent: Option<f64>,
    fitted_log_power: Option<f64>,
}

fn raw_number(x: &Float, digits: usize) -> Box<RawValue> {
    let s = format_float(x, digits);
    // exponent markers are valid JSON number syntax
    RawValue::from_string(s).expect("decimal text is a JSON number")
}

/// Renders a report; CSV columns are exactly `B,count,predicted,ratio`.
pub fn emit_report(report: &CountReport, format: Format, digits: usize) -> String {
    let fmt = |x: &Option<Float>| x.as_ref().map(|v| format_float(v, digits)).unwrap_or_default();
    match format {
        Format::Csv => {
            let mut s = String::from("B,count,predicted,ratio\n");
            for r in &report.ladder {
                let _ = writeln!(s, "{},{},{},{}", r.b, r.count, fmt(&r.predicted), fmt(&r.ratio));
            }
            s
        }
        Format::Json => {
            let doc = ReportJson {
                f: report.f.to_human(),
                s: report.primes.clone(),
                s_prime: report.s_prime.clone(),
                eps: rational_string(&report.eps),
                mode: report.mode,
                order_only: report.order_only,
                ladder: report
                    .ladder
                    .iter()
                    .map(|r| RowJson {
                        b: r.b,
                        count: r.count,
                        predicted: r.predicted.as_ref().map(|v| raw_number(v, digits)),
                        ratio: r.ratio.as_ref().map(|v| raw_number(v, digits)),
                    })
                    .collect(),
                fitted_exponent: report.fitted_exponent,
                fitted_log_power: report.fitted_log_power,
            };
            json_line(&doc)
        }
        Format::Text => {
            let mut s = format!(
                "f = {}  S = {:?}  S' = {:?}  eps = {}  mode = {}{}\n",
                report.f.to_human(),
                report.primes,
                report.s_prime,
                rational_string(&report.eps),
                report.mode,
                if report.order_only { "  (order only)" } else { "" }
            );
            for r in &report.ladder {
                let _ = writeln!(s, "{:>12} {:>12} {:>24} {:>24}", r.b, r.count, fmt(&r.predicted), fmt(&r.ratio));
            }
            let opt = |x: Option<f64>| x.map(|v| format_f64(v, digits.min(17))).unwrap_or_else(|| "-".into());
            let _ = writeln!(
                s,
                "fitted_exponent = {}  fitted_log_power = {}",
                opt(report.fitted_exponent),
                opt(report.fitted_log_power)
            );
            s
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_line(line: &str) -> (i32, String, String) {
        main_with_args(shlex::split(line).unwrap())
    }

    #[test]
    fn spec_examples() {
        assert_eq!(run_line("count -f x -S 2 --eps 1/3 -B 64").1, "38\n");
        assert_eq!(run_line("powersum --sigma 2,3 --alpha 1 -L 6").1, "16\n");
        let (code, out, _) = run_line("zeta -f x^2-1 -p 2 --format json");
        assert_eq!(code, 0);
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        let poles = v["pole_terms"].as_array().unwrap();
        assert_eq!(poles.len(), 2);
        for t in poles {
            assert_eq!(t["k"], 3);
            assert_eq!(t["r"], 1);
            assert_eq!(t["scale"], "1/8");
        }
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run_line("count -f x -S 4 --eps 1/3 -B 64").0, 2);
        assert_eq!(run_line("frobnicate").0, 2);
        assert_eq!(run_line("count --nope").0, 2);
        assert_eq!(run_line("measure -f x^2 -p 2 -k 30 --oracle --budget 10").0, 3);
        let (code, out, err) = run_line("count -f x -S 2 --eps 0 -B 64");
        assert_eq!(code, 2);
        assert!(out.is_empty() && !err.is_empty());
        assert_eq!(run_line("--help").0, 0);
    }

    #[test]
    fn round_trip() {
        for line in [
            "count -f 'x^2 - 1' -S 3,2 --eps 0.25 -B 1e3",
            "report -f -1,0,1 -S 2 --eps 2/8 --ladder 1e2:1e4:10 --mode normalized --format csv",
            "powersum --sigma 2,3 --alpha -1 -L 10",
            "lattice --sigma 2,3 -t 10 --beta e",
            "zeta -f -x^2+1 -p 5",
        ] {
            let c = RunConfig::parse(line).unwrap();
            let r = c.render();
            let c2 = RunConfig::parse(&r).unwrap();
            assert_eq!(c, c2, "{line}");
            assert_eq!(c2.render(), r);
        }
        let c = RunConfig::parse("count -f 'x^2 - 1' -S 3,2 --eps 0.25 -B 1e3").unwrap();
        assert_eq!(
            c.render(),
            "count -f x^2-1 -S 2,3 --eps 1/4 -B 1000 --mode plain --format text --digits 30"
        );
    }

    #[test]
    fn ladders() {
        assert_eq!(Ladder::from_str("1e4:1e6:10").unwrap().bounds(), vec![10_000, 100_000, 1_000_000]);
        assert_eq!(Ladder::from_str("64,128").unwrap().bounds(), vec![64, 128]);
        assert_eq!(Ladder::from_str("2:20:3/2").unwrap().bounds(), vec![2, 3, 5, 7, 10, 15]);
        assert!(Ladder::from_str("5,3").is_err());
    }

    #[test]
    fn report_csv_shape() {
        let (code, out, _) = run_line("report -f x -S 2,3 --eps 1/3 --ladder 1000 --format csv --digits 6");
        assert_eq!(code, 0);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "B,count,predicted,ratio");
        assert!(lines[1].starts_with("1000,"));
    }
}

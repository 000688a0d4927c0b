//! Command-line front end: evaluation, streaming monitoring, classification,
//! decomposition, monitor synthesis and closure dumping.

use std::fs;
use std::io::{BufRead, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use qsl_core::classify::{classify_with, Check, ClassificationReport, Method, Options, Verdict, Witness};
use qsl_core::closure::{cosafety_closure, safety_closure};
use qsl_core::decompose::{decompose, verify_decomposition, Mode, VerifyOptions};
use qsl_core::format::{machine_spec, parse_spec, to_json, PropertySpec};
use qsl_core::monitor::{export_dot, export_json, ghost_step, synthesize, GhostState, Hypothesis};
use qsl_core::props::Backend;
use qsl_core::traces::Lasso;
use qsl_core::{Error, Property64};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_BOUNDED: i32 = 2;
pub const EXIT_DEPTH: i32 = 3;
pub const EXIT_USAGE: i32 = 64;
pub const EXIT_PARSE: i32 = 65;
pub const EXIT_NO_INPUT: i32 = 66;
pub const EXIT_CANT_CREATE: i32 = 73;

#[derive(Parser, Debug)]
#[command(name = "qsl", version, about = "Quantitative safety and liveness toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct Common {
    /// Property specification file (JSON)
    #[arg(long, value_name = "FILE")]
    property: PathBuf,
    /// Seed for sampled lassos
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Bound on stem and cycle length for bounded checks
    #[arg(long, default_value_t = 6)]
    budget: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value of the property on a lasso "stem ; cycle"
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        lasso: String,
    },
    /// Stream observations and print prediction bounds as TSV
    Monitor {
        #[command(flatten)]
        common: Common,
        /// Observation file; standard input when absent
        #[arg(long, value_name = "FILE")]
        trace: Option<PathBuf>,
        /// Hypothesis ge:V or le:V (repeatable)
        #[arg(long = "hyp", value_name = "KIND:V")]
        hyps: Vec<String>,
    },
    /// Safety and liveness report
    Classify {
        #[command(flatten)]
        common: Common,
        /// Checks that must hold for exit code 0 (comma separated or repeated)
        #[arg(long, value_delimiter = ',')]
        expect: Vec<String>,
    },
    /// Split the property into two parts and verify the identity
    Decompose {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Two symbols for live-live, as a,b
        #[arg(long)]
        symbols: Option<String>,
        /// Number of random lassos for the identity check
        #[arg(long, default_value_t = 100)]
        samples: usize,
        /// Directory for machine-backed parts as property files
        #[arg(long, value_name = "DIR")]
        out: Option<PathBuf>,
    },
    /// Synthesize a finite-state monitor within delta
    Synth {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = qsl_core::monitor::DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        #[arg(long, value_name = "FILE")]
        out: PathBuf,
        #[arg(long, value_name = "FILE")]
        dot: Option<PathBuf>,
    },
    /// Print the safety or co-safety closure as a property file
    Closure {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: ClosureKind,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    SafetyLiveness,
    CosafetyColiveness,
    LiveLive,
}

impl ModeArg {
    fn mode(self) -> Mode {
        match self {
            ModeArg::SafetyLiveness => Mode::SafetyLiveness,
            ModeArg::CosafetyColiveness => Mode::CosafetyColiveness,
            ModeArg::LiveLive => Mode::LivenessLiveness,
        }
    }
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ClosureKind {
    Safety,
    Cosafety,
}

/// An exit code with a one-line diagnostic.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        Failure { code, message: message.into() }
    }

    fn usage(e: impl std::fmt::Display) -> Self {
        Failure::new(EXIT_USAGE, e.to_string())
    }

    fn parse(e: impl std::fmt::Display) -> Self {
        Failure::new(EXIT_PARSE, e.to_string())
    }
}

/// Errors while computing: depth errors get their own code, the rest mean
/// the request does not apply to this property.
fn runtime(e: Error) -> Failure {
    match e {
        Error::DepthExceeded(_) => Failure::new(EXIT_DEPTH, e.to_string()),
        _ => Failure::usage(e),
    }
}

type Outcome = Result<i32, Failure>;

/// Runs the command line `argv` (program name first) against `stdin`,
/// writing to `out` and `err`, and returns the exit code.
pub fn run(argv: &[String], stdin: &mut dyn BufRead, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{}", e.render());
                return EXIT_OK;
            }
            let text = e.render().to_string();
            let lines: Vec<&str> = text
                .lines()
                .take_while(|l| !l.starts_with("Usage:") && !l.starts_with("For more information"))
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .collect();
            let message = lines.join(" ");
            let message = message.strip_prefix("error: ").unwrap_or(&message);
            let _ = writeln!(err, "error: {message}");
            return EXIT_USAGE;
        }
    };
    match dispatch(cli.command, stdin, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = out.flush();
            let _ = writeln!(err, "error: {}", f.message.replace('\n', " "));
            f.code
        }
    }
}

/// [`run`] with in-memory streams: `(exit code, stdout, stderr)`.
pub fn run_cli(argv: &[String], stdin: &[u8]) -> (i32, Vec<u8>, Vec<u8>) {
    let mut input = stdin;
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(argv, &mut input, &mut out, &mut err);
    (code, out, err)
}

fn dispatch(cmd: Command, stdin: &mut dyn BufRead, out: &mut dyn Write) -> Outcome {
    match cmd {
        Command::Eval { common, lasso } => eval(&common, &lasso, out),
        Command::Monitor { common, trace, hyps } => monitor(&common, trace.as_deref(), &hyps, stdin, out),
        Command::Classify { common, expect } => classify(&common, &expect, out),
        Command::Decompose { common, mode, symbols, samples, out: dir } => {
            decompose_cmd(&common, mode.mode(), symbols.as_deref(), samples, dir.as_deref(), out)
        }
        Command::Synth { common, delta, max_depth, out: path, dot } => {
            synth(&common, delta, max_depth, &path, dot.as_deref(), out)
        }
        Command::Closure { common, kind } => closure(&common, kind, out),
    }
}

fn load(path: &Path) -> Result<(PropertySpec, Property64), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("cannot read {}: {e}", path.display())))?;
    let at = |e: Error| Failure::parse(format!("{}: {e}", path.display()));
    let spec = parse_spec(&text).map_err(at)?;
    let p = spec.build().map_err(at)?;
    Ok((spec, p))
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), Failure> {
    out.write_all(text.as_bytes()).map_err(|e| Failure::new(EXIT_CANT_CREATE, format!("cannot write output: {e}")))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::new(EXIT_CANT_CREATE, format!("cannot write {}: {e}", path.display())))
}

fn eval(common: &Common, lasso: &str, out: &mut dyn Write) -> Outcome {
    let (_, p) = load(&common.property)?;
    let l = Lasso::parse(lasso, p.alphabet()).map_err(|e| Failure::parse(format!("lasso: {e}")))?;
    let v = p.eval_lasso(&l).map_err(runtime)?;
    emit(out, &format!("{}\n", p.domain().format(&v)))?;
    Ok(EXIT_OK)
}

fn monitor(
    common: &Common,
    trace: Option<&Path>,
    hyps: &[String],
    stdin: &mut dyn BufRead,
    out: &mut dyn Write,
) -> Outcome {
    let (_, p) = load(&common.property)?;
    let mut g = GhostState::new(&p).map_err(runtime)?;
    for h in hyps {
        let h = Hypothesis::parse(h, &p).map_err(|e| Failure::usage(format!("--hyp {h:?}: {e}")))?;
        g.add_hypothesis(h.kind, h.value);
    }
    let mut file;
    let input: &mut dyn BufRead = match trace {
        Some(path) => {
            let f = fs::File::open(path)
                .map_err(|e| Failure::new(EXIT_NO_INPUT, format!("cannot read {}: {e}", path.display())))?;
            file = std::io::BufReader::new(f);
            &mut file
        }
        None => stdin,
    };
    let d = p.domain().clone();
    let labels: Vec<String> = g.hypotheses().iter().map(|h| h.label(&p)).collect();
    let row = |out: &mut dyn Write, g: &GhostState<f64>, symbol: &str| -> Result<(), Failure> {
        let mut cols = vec![
            g.steps().to_string(),
            symbol.to_string(),
            d.format(&g.pi()),
            d.format(&g.lower()),
            d.format(&g.upper()),
        ];
        cols.extend(g.hypotheses().iter().map(|h| h.status.to_string()));
        emit(out, &format!("{}\n", cols.join("\t")))?;
        out.flush().map_err(|e| Failure::new(EXIT_CANT_CREATE, format!("cannot write output: {e}")))
    };
    let header: Vec<&str> =
        ["step", "symbol", "pi", "lower", "upper"].into_iter().chain(labels.iter().map(String::as_str)).collect();
    emit(out, &format!("{}\n", header.join("\t")))?;
    row(out, &g, "-")?;
    let mut line = String::new();
    let mut line_no = 0;
    loop {
        line.clear();
        let n = input.read_line(&mut line).map_err(|e| Failure::new(EXIT_NO_INPUT, format!("cannot read trace: {e}")))?;
        if n == 0 {
            break;
        }
        line_no += 1;
        let content = line.split('#').next().unwrap_or("");
        for token in content.split_whitespace() {
            let position = g.steps() + 1;
            if token.contains(';') {
                return Err(Failure::parse(format!(
                    "trace line {line_no}: ';' at position {position}: monitored traces are finite"
                )));
            }
            let a = p
                .alphabet()
                .lookup(token, position)
                .map_err(|e| Failure::parse(format!("trace line {line_no}: {e}")))?;
            ghost_step(&mut g, a).map_err(runtime)?;
            row(out, &g, token)?;
        }
    }
    Ok(EXIT_OK)
}

fn render_witness(p: &Property64, w: &Witness<f64>) -> String {
    let (a, d) = (p.alphabet(), p.domain());
    let mut parts = Vec::new();
    if let Some(l) = &w.lasso {
        parts.push(format!("lasso=\"{}\"", l.render(a)));
    }
    if let Some(s) = &w.prefix {
        parts.push(format!("prefix=\"{}\"", a.render(s)));
    }
    if let Some(v) = &w.value {
        parts.push(format!("value={}", d.format(v)));
    }
    if let Some(v) = &w.bound {
        parts.push(format!("bound={}", d.format(v)));
    }
    parts.join(" ")
}

fn render_report(p: &Property64, r: &ClassificationReport<f64>) -> String {
    let mut s = String::new();
    s.push_str(&format!("property: {}\n", r.property));
    let method = match r.method {
        Method::Exact => "exact",
        Method::Bounded => "bounded",
    };
    s.push_str(&format!("method: {method}\n"));
    s.push_str(&format!("budget: {}\n", r.budget));
    for e in &r.entries {
        s.push_str(&format!("{}: {}\n", e.check, e.verdict));
        if let Some(w) = &e.witness {
            s.push_str(&format!("  witness: {}\n", render_witness(p, w)));
        }
    }
    for (key, est) in [("alpha_min", r.alpha_min), ("beta_min", r.beta_min)] {
        if let Some(est) = est {
            let how = if est.exact { "exact" } else { "estimate" };
            let value = if est.value.is_infinite() { "∞".to_string() } else { est.value.to_string() };
            s.push_str(&format!("{key}: {value} ({how})\n"));
        }
    }
    s
}

fn classify(common: &Common, expect: &[String], out: &mut dyn Write) -> Outcome {
    let (_, p) = load(&common.property)?;
    let checks = expect
        .iter()
        .map(|c| Check::parse(c.trim()).map_err(Failure::usage))
        .collect::<Result<Vec<Check>, Failure>>()?;
    let opts = Options { budget: common.budget, seed: common.seed, ..Options::default() };
    let r = classify_with(&p, &opts).map_err(runtime)?;
    emit(out, &render_report(&p, &r))?;
    let verdicts: Vec<Verdict> = if checks.is_empty() {
        r.entries.iter().filter(|e| !e.verdict.is_no()).map(|e| e.verdict).collect()
    } else {
        checks
            .iter()
            .map(|&c| r.verdict(c).ok_or_else(|| Failure::usage(format!("{c} is not checked for {}", p.name()))))
            .collect::<Result<_, _>>()?
    };
    Ok(if verdicts.iter().any(|v| v.is_no()) {
        EXIT_FAILED
    } else if verdicts.iter().all(|v| v.is_yes()) {
        EXIT_OK
    } else {
        EXIT_BOUNDED
    })
}

#[derive(Serialize)]
struct Source {
    #[serde(skip_serializing_if = "Option::is_none")]
    builtin: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    params: Option<serde_json::Map<String, serde_json::Value>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixture: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    machine: Option<String>,
    file: String,
}

#[derive(Serialize)]
struct PartDescriptor {
    name: String,
    backend: &'static str,
    value_function: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    rule: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    states: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    file: Option<String>,
}

#[derive(Serialize)]
struct PartCheck {
    part: String,
    check: String,
    verdict: String,
}

#[derive(Serialize)]
struct MismatchRecord {
    lasso: String,
    expected: String,
    combined: String,
}

#[derive(Serialize)]
struct Verification {
    lassos_checked: usize,
    mismatches: Vec<MismatchRecord>,
    part_checks: Vec<PartCheck>,
    passed: bool,
}

#[derive(Serialize)]
struct DecompositionDocument {
    mode: &'static str,
    source: Source,
    parts: Vec<PartDescriptor>,
    verification: Verification,
}

fn descriptor(p: &Property64, file: Option<String>) -> PartDescriptor {
    let (rule, states) = match p.backend() {
        Backend::Derived(d) => (Some(d.rule.clone()), None),
        Backend::Machine(m) => (None, Some(m.num_states())),
        Backend::Oracle(_) => (None, None),
    };
    PartDescriptor {
        name: p.name().to_string(),
        backend: p.backend().kind(),
        value_function: p.value_function().name(),
        rule,
        states,
        file,
    }
}

fn decompose_cmd(
    common: &Common,
    mode: Mode,
    symbols: Option<&str>,
    samples: usize,
    dir: Option<&Path>,
    out: &mut dyn Write,
) -> Outcome {
    let (spec, p) = load(&common.property)?;
    let symbols = match symbols {
        Some(s) => Some(
            s.split_once(',')
                .map(|(a, b)| (a.trim(), b.trim()))
                .ok_or_else(|| Failure::usage(format!("--symbols {s:?} is not a,b")))?,
        ),
        None => None,
    };
    if symbols.is_some() && mode != Mode::LivenessLiveness {
        return Err(Failure::usage("--symbols applies to --mode live-live only"));
    }
    let parts = decompose(&p, mode, symbols).map_err(runtime)?;
    let opts = VerifyOptions {
        samples,
        seed: common.seed,
        classify: Some(Options { budget: common.budget.min(4), seed: common.seed, derived_samples: 128, ..Options::default() }),
        ..VerifyOptions::default()
    };
    let rep = verify_decomposition(&p, &parts, mode, &opts).map_err(runtime)?;
    let mut descriptors = Vec::new();
    for (i, part) in [&parts.0, &parts.1].into_iter().enumerate() {
        let file = match (dir, part.machine()) {
            (Some(dir), Some(_)) => {
                let path = dir.join(format!("part{}.json", i + 1));
                let spec = machine_spec(part).map_err(runtime)?;
                write_file(&path, &format!("{}\n", to_json(&spec)))?;
                Some(path.display().to_string())
            }
            _ => None,
        };
        descriptors.push(descriptor(part, file));
    }
    let (a, d) = (p.alphabet(), p.domain());
    let doc = DecompositionDocument {
        mode: mode.name(),
        source: Source {
            builtin: spec.builtin.clone(),
            params: spec.params.clone(),
            fixture: spec.fixture.clone(),
            machine: (spec.builtin.is_none() && spec.fixture.is_none()).then(|| p.name().to_string()),
            file: common.property.display().to_string(),
        },
        parts: descriptors,
        verification: Verification {
            lassos_checked: rep.lassos_checked,
            mismatches: rep
                .mismatches
                .iter()
                .map(|m| MismatchRecord {
                    lasso: m.lasso.render(a),
                    expected: d.format(&m.expected),
                    combined: d.format(&m.combined),
                })
                .collect(),
            part_checks: rep
                .part_checks
                .iter()
                .map(|(part, c, v)| PartCheck { part: part.clone(), check: c.to_string(), verdict: v.to_string() })
                .collect(),
            passed: rep.passed(),
        },
    };
    emit(out, &format!("{}\n", to_json(&doc)))?;
    Ok(if rep.passed() { EXIT_OK } else { EXIT_FAILED })
}

fn synth(common: &Common, delta: f64, max_depth: usize, path: &Path, dot: Option<&Path>, out: &mut dyn Write) -> Outcome {
    let (_, p) = load(&common.property)?;
    if delta.is_nan() || delta <= 0.0 {
        return Err(Failure::usage(format!("--delta must be positive, got {delta}")));
    }
    let m = synthesize(&p, delta, max_depth).map_err(runtime)?;
    write_file(path, &export_json(&m))?;
    if let Some(dot) = dot {
        write_file(dot, &export_dot(&m))?;
    }
    let frozen = m.classes.iter().filter(|c| c.frozen).count();
    emit(out, &format!("classes: {}\nfrozen: {frozen}\ndelta: {delta}\n", m.len()))?;
    Ok(EXIT_OK)
}

fn closure(common: &Common, kind: ClosureKind, out: &mut dyn Write) -> Outcome {
    let (_, p) = load(&common.property)?;
    let c = match kind {
        ClosureKind::Safety => safety_closure(&p),
        ClosureKind::Cosafety => cosafety_closure(&p),
    }
    .map_err(runtime)?;
    let spec = machine_spec(&c).map_err(runtime)?;
    emit(out, &format!("{}\n", to_json(&spec)))?;
    Ok(EXIT_OK)
}

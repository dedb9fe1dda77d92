use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use jetpass::jet::total_derivative;
use jetpass::passivity::{complete, CheckReport, CompletionLimits, CompletionStatus};
use jetpass::reduce::DEFAULT_MAX_STEPS;
use jetpass::series::{circle_offsets, consistency, evaluate_point, ParametricData};
use jetpass::system_file::SystemFile;
use jetpass::{Atom, DiffSystem, Error, Expr, JetVar, ZeroTestConfig};

#[derive(Parser)]
#[command(name = "jetpass", version, about = "Passivity checking and completion for PDE systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Report whether a system is passive.
    Check {
        #[command(flatten)]
        input: Input,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Complete a system to passive form.
    Complete {
        #[command(flatten)]
        input: Input,
        /// Maximum number of promoted equations.
        #[arg(long, default_value_t = CompletionLimits::default().max_new_equations)]
        max_eqs: usize,
        /// Maximum reduction steps per normal form.
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Include every pair reduction in the report.
        #[arg(long)]
        trace: bool,
        /// Also write the completed system to this file.
        #[arg(long, short)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Normal form of an expression modulo the system.
    ///
    /// The expression may apply total derivatives to equations by name,
    /// e.g. `D2(f6)`.
    Reduce {
        #[command(flatten)]
        input: Input,
        expression: String,
        /// Reduce only modulo these equations.
        #[arg(long, value_delimiter = ',')]
        modulo: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Truncated Taylor solution at a point, after completing the system.
    Series {
        #[command(flatten)]
        input: Input,
        /// Expansion point, one coordinate per independent variable.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        point: Vec<f64>,
        /// Parametric derivative values, e.g. `u00=1,u01=1`.
        #[arg(long, value_delimiter = ',')]
        parametric: Vec<String>,
        /// Value for parametric derivatives not listed.
        #[arg(long, allow_negative_numbers = true)]
        default: Option<f64>,
        #[arg(long, default_value_t = 8)]
        order: u32,
        /// Radius of the residual sample circle.
        #[arg(long, default_value_t = 0.05)]
        radius: f64,
        #[arg(long, default_value_t = 16)]
        samples: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Args)]
struct Input {
    /// System file.
    file: PathBuf,
    /// Bind a declared constant, e.g. `r=-1/2`.
    #[arg(long, allow_hyphen_values = true)]
    bind: Vec<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

const OK: u8 = 0;
const USAGE: u8 = 1;
const NOT_PASSIVE: u8 = 2;
const INCOMPLETE: u8 = 3;
const FAILED: u8 = 4;

struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Inconsistent { .. } | Error::NotMonicizable(_) | Error::SingularData { .. } => FAILED,
            Error::StepBudget(_) => INCOMPLETE,
            Error::NotPassive(_) => NOT_PASSIVE,
            _ => USAGE,
        };
        Failure { code, msg: e.to_string() }
    }
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: USAGE, msg: msg.into() }
}

fn load(input: &Input) -> Result<(SystemFile, DiffSystem), Failure> {
    let path = input.file.display();
    let text = std::fs::read_to_string(&input.file).map_err(|e| usage(format!("{path}: {e}")))?;
    let mut file = SystemFile::parse(&text).map_err(|d| usage(format!("{path}:{d}")))?;
    for b in &input.bind {
        file.bind(b)?;
    }
    let system = file.system().map_err(|d| usage(format!("{path}:{d}")))?;
    Ok((file, system))
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json serializes") + "\n"
}

fn no_csv(format: Format) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(usage("csv output is only available for series"));
    }
    Ok(())
}

/// `Dk(...)` applied to an equation name or an expression.
fn parse_target(text: &str, file: &SystemFile, s: &DiffSystem) -> Result<Expr, Failure> {
    let t = text.trim();
    if let Some(rest) = t.strip_prefix('D') {
        let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
        let inner = rest[digits.len()..].trim_start();
        if !digits.is_empty() && inner.starts_with('(') && inner.ends_with(')') {
            let k: usize = digits.parse().map_err(|_| usage(format!("bad derivative index in '{t}'")))?;
            if k == 0 || k > s.names().n() {
                return Err(usage(format!("D{k}: there are {} independent variables", s.names().n())));
            }
            let e = parse_target(&inner[1..inner.len() - 1], file, s)?;
            return Ok(total_derivative(&e, k - 1));
        }
    }
    if let Some(eq) = file.equations.iter().find(|(n, _)| n == t) {
        return Ok(file.specialize(&eq.1));
    }
    Ok(file.parse_expr(t)?)
}

fn single_jet(e: &Expr) -> Option<JetVar> {
    let v = e.jet_atoms().next()?.clone();
    (*e == Expr::atom(Atom::Jet(v.clone()))).then_some(v)
}

fn run(cli: Cli) -> Result<(String, u8), Failure> {
    let cfg = ZeroTestConfig::default();
    match cli.command {
        Command::Check { input, format } => {
            no_csv(format)?;
            let (_, s) = load(&input)?;
            let report = CheckReport::run(&s, &cfg, DEFAULT_MAX_STEPS)?;
            let code = if report.passive() { OK } else { NOT_PASSIVE };
            let out = match format {
                Format::Json => pretty(&report.to_json(&s)),
                _ => report.to_text(&s),
            };
            Ok((out, code))
        }
        Command::Complete { input, max_eqs, max_steps, trace, output, format } => {
            no_csv(format)?;
            let (file, s) = load(&input)?;
            let limits = CompletionLimits { max_new_equations: max_eqs, max_steps };
            let report = complete(&s, &cfg, &limits)?;
            let code = match report.status {
                CompletionStatus::Passive => OK,
                CompletionStatus::Incomplete(_) => INCOMPLETE,
                CompletionStatus::Failed(_) => FAILED,
            };
            let rendered = file.render(&report.system);
            if let Some(path) = &output {
                write_file(path, &rendered)?;
            }
            let out = match format {
                Format::Json => {
                    let mut v = report.to_json(trace);
                    v["file"] = json!(rendered);
                    pretty(&v)
                }
                _ => {
                    // The report as comments, so the output is itself a system file.
                    let mut out = String::new();
                    for line in report.to_text(trace).lines() {
                        if line.starts_with("status:")
                            || line.starts_with("promotions:")
                            || line.starts_with("note:")
                            || line.starts_with("principal")
                            || line.starts_with('[')
                        {
                            writeln!(out, "# {line}").unwrap();
                        }
                    }
                    out + &rendered
                }
            };
            Ok((out, code))
        }
        Command::Reduce { input, expression, modulo, max_steps, format } => {
            no_csv(format)?;
            let (file, s) = load(&input)?;
            let target = parse_target(&expression, &file, &s)?;
            let basis = if modulo.is_empty() {
                s.clone()
            } else {
                let eqs = modulo
                    .iter()
                    .map(|n| s.equation(n).cloned().ok_or_else(|| usage(format!("no equation named '{n}'"))))
                    .collect::<Result<Vec<_>, _>>()?;
                s.with_equations(eqs)?
            };
            let (nf, code, note) = match basis.normal_form(&target, max_steps) {
                Ok(nf) => (nf, OK, None),
                Err(b) => {
                    let note = b.to_string();
                    (b.partial, INCOMPLETE, Some(note))
                }
            };
            let verdict = nf.remainder.zero_test(&cfg)?;
            let out = match format {
                Format::Json => pretty(&json!({
                    "input": basis.format(&target),
                    "normal_form": basis.format(&nf.remainder),
                    "zero": verdict,
                    "trace": nf.trace,
                    "incomplete": note,
                })),
                _ => {
                    let mut out = format!("input: {}\n", basis.format(&target));
                    for (k, st) in nf.trace.steps.iter().enumerate() {
                        let by = if st.delta.order() == 0 {
                            st.equation.clone()
                        } else {
                            format!("D{} {}", st.delta, st.equation)
                        };
                        writeln!(out, "{}: {} by {by} -> {}", k + 1, st.target, st.remainder).unwrap();
                    }
                    writeln!(out, "normal form: {}", basis.format(&nf.remainder)).unwrap();
                    if verdict.is_zero() && !nf.remainder.is_zero() {
                        writeln!(out, "note: the normal form is zero by the numeric zero test").unwrap();
                    }
                    if let Some(n) = note {
                        writeln!(out, "incomplete: {n}").unwrap();
                    }
                    out
                }
            };
            Ok((out, code))
        }
        Command::Series { input, point, parametric, default, order, radius, samples, format } => {
            let (file, s) = load(&input)?;
            let n = s.names().n();
            let point = if point.is_empty() { vec![0.0; n] } else { point };
            if point.len() != n {
                return Err(usage(format!("--point needs {n} coordinates, got {}", point.len())));
            }
            let report = complete(&s, &cfg, &CompletionLimits::default())?;
            match &report.status {
                CompletionStatus::Passive => {}
                CompletionStatus::Incomplete(r) => return Err(Failure { code: INCOMPLETE, msg: r.clone() }),
                CompletionStatus::Failed(r) => return Err(Failure { code: FAILED, msg: r.clone() }),
            }
            let done = &report.system;
            let mut values = Vec::new();
            for p in &parametric {
                let (name, value) = p.split_once('=').ok_or_else(|| usage(format!("'{p}' is not jet=value")))?;
                let v = single_jet(&file.parse_expr(name)?)
                    .ok_or_else(|| usage(format!("'{name}' is not a derivative of an unknown")))?;
                if done.is_principal(&v) {
                    return Err(usage(format!("{name} is principal in the completed system")));
                }
                let x: f64 = value.trim().parse().map_err(|_| usage(format!("'{value}' is not a number")))?;
                values.push((v, x));
            }
            let mut data = ParametricData::new(values);
            if let Some(d) = default {
                data = data.with_default(d);
            }
            let sol = evaluate_point(done, &point, &data, order)?;
            let originals: Vec<Expr> = s.equations().iter().map(|e| e.expr()).collect();
            let completed: Vec<Expr> = done.equations().iter().map(|e| e.expr()).collect();
            let mut rows = Vec::new();
            for r in [radius, radius / 2.0] {
                let offs = circle_offsets(n, r, samples);
                rows.push((r, sol.residual(&originals, &offs)?, sol.residual(&completed, &offs)?));
            }
            let cons = consistency(done, &sol, &data)?;
            let out = match format {
                Format::Csv => sol.to_csv(done),
                Format::Json => {
                    let mut v = sol.to_json(done);
                    v["system"] = json!(file.render(done));
                    v["residuals"] = json!(rows
                        .iter()
                        .map(|(r, a, b)| json!({"radius": r, "input": a, "completed": b}))
                        .collect::<Vec<_>>());
                    v["consistency"] = json!(cons);
                    pretty(&v)
                }
                Format::Text => {
                    let mut out = String::new();
                    for line in file.render(done).lines() {
                        writeln!(out, "# {line}").unwrap();
                    }
                    out.push_str(&sol.to_csv(done));
                    for (r, a, b) in &rows {
                        writeln!(out, "# residual at radius {r}: input {a:.3e}, completed {b:.3e}").unwrap();
                    }
                    writeln!(out, "# consistency: {cons:.3e}").unwrap();
                    out
                }
            };
            Ok((out, OK))
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { OK };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

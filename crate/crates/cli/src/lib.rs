//! The `sosforge` command: every analysis of the core library behind one subcommand each.

use std::ffi::OsString;
use std::fmt::Display;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use sosforge_core::axioms::{axiom_report, AxiomError, NormalizeBudget, Normalizer};
use sosforge_core::bisim::{are_equal, bisimilar, BisimError, DEFAULT_STATE_CAP};
use sosforge_core::comm::{check_comm, derived_spec};
use sosforge_core::parser::{parse_spec, parse_term};
use sosforge_core::simulate::{format_steps, Simulator};
use sosforge_core::spec::Spec;
use sosforge_core::validate::{rule_errors, validate};
use sosforge_core::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_LIMIT: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "sosforge", version, about = "Analyses of GSOS transition system specifications")]
pub struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Largest number of states explored for bisimilarity.
    #[arg(long, global = true, env = "SOSFORGE_STATE_CAP", default_value_t = DEFAULT_STATE_CAP)]
    pub state_cap: usize,
    /// Largest number of rule instances expanded while normalizing.
    #[arg(long, global = true, default_value_t = NormalizeBudget::default().max_rewrites)]
    pub budget: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check the rules and definitions; exits 1 if anything is reported.
    Validate { spec: PathBuf },
    /// List the transitions of a closed term.
    Simulate { spec: PathBuf, term: String },
    /// Decide strong bisimilarity of two closed terms.
    Bisim { spec: PathBuf, left: String, right: String },
    /// Decide equality of two recursion constants.
    Eq { spec: PathBuf, left: String, right: String },
    /// Rewrite a closed term to its core-calculus normal form.
    Normalize { spec: PathBuf, term: String },
    /// Show the expansion axioms of every operator.
    Axioms { spec: PathBuf },
    /// Find the commutative operators; exits 1 if some binary operator is not proven.
    Comm {
        spec: PathBuf,
        /// Also write the spec with `[comm]` added to the proven operators.
        #[arg(long)]
        derived: Option<PathBuf>,
    },
}

/// Failure of one invocation, already mapped to its exit status.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Display) -> Self {
        Failure { code: EXIT_USAGE, message: message.to_string() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_limit() { EXIT_LIMIT } else { EXIT_USAGE };
        Failure { code, message: e.to_string() }
    }
}

impl From<BisimError> for Failure {
    fn from(e: BisimError) -> Self {
        Error::from(e).into()
    }
}

impl From<AxiomError> for Failure {
    fn from(e: AxiomError) -> Self {
        Error::from(e).into()
    }
}

struct Session<'w> {
    json: bool,
    out: &'w mut dyn Write,
}

impl Session<'_> {
    fn emit<T: Serialize>(&mut self, value: &T, text: impl FnOnce() -> String) -> Result<(), Failure> {
        let rendered = if self.json {
            let mut s = serde_json::to_string_pretty(value).map_err(Failure::usage)?;
            s.push('\n');
            s
        } else {
            text()
        };
        self.out.write_all(rendered.as_bytes()).map_err(Failure::usage)
    }
}

fn load(path: &Path) -> Result<Spec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
    parse_spec(&text).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

/// Load a spec that the analyses can rely on: its rules must pass the format checks.
fn load_checked(path: &Path) -> Result<Spec, Failure> {
    let spec = load(path)?;
    let errors = rule_errors(&spec);
    if errors.is_empty() {
        return Ok(spec);
    }
    let lines: Vec<String> = errors.iter().map(|v| v.to_string()).collect();
    Err(Failure::usage(format!("{}: rules are not in the supported format\n{}", path.display(), lines.join("\n"))))
}

fn closed_term(spec: &Spec, text: &str) -> Result<sosforge_core::terms::Term, Failure> {
    parse_term(text, spec, true).map_err(|e| Failure::usage(format!("term {text:?}: {e}")))
}

fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut session = Session { json: cli.json, out };
    let budget = NormalizeBudget { max_rewrites: cli.budget, ..NormalizeBudget::default() };
    match cli.command {
        Command::Validate { spec } => {
            let spec = load(&spec)?;
            let found = validate(&spec);
            session.emit(&found, || found.iter().map(|v| format!("{v}\n")).collect())?;
            Ok(if found.is_empty() { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Simulate { spec, term } => {
            let spec = load_checked(&spec)?;
            let p = closed_term(&spec, &term)?;
            let steps = Simulator::new(&spec).step(&p).map_err(Error::from)?;
            session.emit(&steps, || format_steps(&steps))?;
            Ok(EXIT_OK)
        }
        Command::Bisim { spec, left, right } => {
            let spec = load_checked(&spec)?;
            let (p, q) = (closed_term(&spec, &left)?, closed_term(&spec, &right)?);
            let r = bisimilar(&spec, &p, &q, cli.state_cap)?;
            session.emit(&r, || match &r.witness {
                Some(w) => format!("true\n{w}\n"),
                None => "false\n".to_string(),
            })?;
            Ok(if r.bisimilar { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Eq { spec, left, right } => {
            let spec = load_checked(&spec)?;
            let r = are_equal(&spec, &left, &right, cli.state_cap)?;
            session.emit(&r, || format!("{}\n", r.summary()))?;
            Ok(if r.bisimilar { EXIT_OK } else { EXIT_FALSE })
        }
        Command::Normalize { spec, term } => {
            let spec = load_checked(&spec)?;
            let p = closed_term(&spec, &term)?;
            let nf = Normalizer::new(&spec, budget).normalize(&p)?;
            let json = serde_json::json!({ "term": p.to_string(), "normal_form": nf.to_string() });
            session.emit(&json, || format!("{nf}\n"))?;
            Ok(EXIT_OK)
        }
        Command::Axioms { spec } => {
            let spec = load_checked(&spec)?;
            let report = axiom_report(&spec);
            session.emit(&report, || report.to_string())?;
            Ok(EXIT_OK)
        }
        Command::Comm { spec, derived } => {
            let spec = load_checked(&spec)?;
            let report = check_comm(&spec);
            if let Some(path) = derived {
                std::fs::write(&path, derived_spec(&spec, &report).to_string())
                    .map_err(|e| Failure::usage(format!("{}: {e}", path.display())))?;
            }
            session.emit(&report, || report.to_string())?;
            Ok(if report.failed.is_empty() { EXIT_OK } else { EXIT_FALSE })
        }
    }
}

/// Run one invocation. `args` includes the program name.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

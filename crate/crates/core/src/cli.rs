//! The `coopsynt` command line.

use std::ffi::OsString;
use std::fs;
use std::io::{IsTerminal, Write as _};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::checker::{BobbleQuery, Checker, Lasso};
use crate::dra::{parse_dra, BaseAutomata, CombinationOverrides, RabinWordAutomaton};
use crate::hierarchy::{count_with_true, Lattice, LevelSpec, Ruleset};
use crate::maxcoop::{synthesize_from_bases, SynthesisError};
use crate::mealy::{parse_mealy, MealyStrategy};
use crate::tree::AcceptanceMode;

/// Writes to standard output, ignoring a closed pipe.
macro_rules! out {
    ($($t:tt)*) => {{
        let _ = writeln!(std::io::stdout().lock(), $($t)*);
    }};
}

macro_rules! out_raw {
    ($($t:tt)*) => {{
        let _ = write!(std::io::stdout().lock(), $($t)*);
    }};
}

#[derive(Parser, Debug)]
#[command(name = "coopsynt", version, about = "Cooperative synthesis and checking over a hierarchy of cooperation levels")]
struct Cli {
    /// Conjunct set and rules: base, or, full-e.
    #[arg(long = "set", alias = "ruleset", global = true, default_value = "base", value_parser = parse_ruleset)]
    ruleset: Ruleset,
    /// How product automata combine acceptance conditions.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Latched)]
    acceptance: Mode,
    /// File listing every level once, most preferred first.
    #[arg(long, global = true)]
    preference: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Mode {
    Latched,
    Literal,
}

impl From<Mode> for AcceptanceMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Latched => AcceptanceMode::Latched,
            Mode::Literal => AcceptanceMode::Literal,
        }
    }
}

fn parse_ruleset(s: &str) -> Result<Ruleset, String> {
    s.parse()
}

#[derive(Subcommand, Debug)]
enum Command {
    /// List the levels of the hierarchy in preference order.
    Hierarchy {
        /// Print only the number of levels.
        #[arg(long)]
        count: bool,
        /// Count the trivial level too.
        #[arg(long)]
        include_true: bool,
        /// Print the covering pairs of the order.
        #[arg(long)]
        edges: bool,
        /// Write the Hasse diagram as DOT (`-` for standard output).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Build a maximally cooperative machine.
    Synthesize {
        #[command(flatten)]
        spec: SpecFiles,
        /// Where to write the machine; standard output by default.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        /// Print game sizes and solve time as JSON on standard error.
        #[arg(long)]
        stats: bool,
    },
    /// Check a machine against one level.
    Check {
        #[command(flatten)]
        target: MachineTarget,
        /// Level, e.g. `A->G & GE(A)`.
        #[arg(long)]
        level: String,
    },
    /// Print the maximal levels a machine satisfies.
    Classify {
        #[command(flatten)]
        target: MachineTarget,
    },
    /// Run a machine on an input sequence and show its levels.
    Simulate {
        /// Mealy machine file.
        machine: PathBuf,
        /// Comma-separated input letters.
        #[arg(long, conflicts_with = "random")]
        inputs: Option<String>,
        /// Number of uniformly drawn inputs.
        #[arg(long)]
        random: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args, Debug)]
struct SpecFiles {
    /// Assumption automaton.
    assumptions: PathBuf,
    /// Guarantee automaton.
    guarantees: PathBuf,
    /// Replaces the derived automaton for A->G.
    #[arg(long)]
    implies: Option<PathBuf>,
    /// Replaces the derived automaton for A*G.
    #[arg(long)]
    and: Option<PathBuf>,
    /// Replaces the derived automaton for A+G.
    #[arg(long)]
    or: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct MachineTarget {
    /// Mealy machine file.
    machine: PathBuf,
    #[command(flatten)]
    spec: SpecFiles,
    /// Judge the bobble tree after these comma-separated inputs.
    #[arg(long)]
    after: Option<String>,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }
}

type Outcome = Result<(), Failure>;

/// Runs the command line and returns the exit status: 0 on success, 1 for
/// usage and input errors, 2 when nothing is realizable.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match run(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn color_enabled() -> bool {
    std::env::var("COOPSYNT_COLOR").map_or(true, |v| v != "0") && std::io::stdout().is_terminal()
}

fn paint(text: &str, code: &str) -> String {
    if color_enabled() {
        format!("\x1b[{code}m{text}\x1b[0m")
    } else {
        text.to_string()
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn write_to(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        None => {
            out_raw!("{text}");
            Ok(())
        }
        Some(p) if p == Path::new("-") => {
            out_raw!("{text}");
            Ok(())
        }
        Some(p) => fs::write(p, text).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
    }
}

fn load_dra(path: &Path) -> Result<RabinWordAutomaton, Failure> {
    parse_dra(&read(path)?).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_machine(path: &Path, ruleset: Ruleset) -> Result<MealyStrategy, Failure> {
    parse_mealy(&read(path)?, ruleset).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn lattice(cli: &Cli) -> Result<Lattice, Failure> {
    let lat = Lattice::enumerate(cli.ruleset);
    match &cli.preference {
        None => Ok(lat),
        Some(p) => lat.parse_preference(&read(p)?).map_err(|e| Failure::usage(format!("{}: {e}", p.display()))),
    }
}

fn bases(spec: &SpecFiles, ruleset: Ruleset) -> Result<BaseAutomata, Failure> {
    let opt = |p: &Option<PathBuf>| p.as_deref().map(load_dra).transpose();
    let overrides = CombinationOverrides { implies: opt(&spec.implies)?, and: opt(&spec.and)?, or: opt(&spec.or)? };
    let with_or = ruleset != Ruleset::Base;
    BaseAutomata::derive(load_dra(&spec.assumptions)?, load_dra(&spec.guarantees)?, overrides, with_or)
        .map_err(|e| Failure::usage(e.to_string()))
}

fn parse_inputs(text: &str, m: &MealyStrategy) -> Result<Vec<usize>, Failure> {
    text.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| m.alphabet().input_index(s).ok_or_else(|| Failure::usage(format!("unknown input letter `{s}`"))))
        .collect()
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Outcome {
    match &cli.command {
        Command::Hierarchy { count, include_true, edges, dot } => hierarchy(&cli, *count, *include_true, *edges, dot.as_deref()),
        Command::Synthesize { spec, output, report, stats } => synthesize(&cli, spec, output.as_deref(), report.as_deref(), *stats),
        Command::Check { target, level } => check(&cli, target, level),
        Command::Classify { target } => classify(&cli, target),
        Command::Simulate { machine, inputs, random, seed } => simulate(&cli, machine, inputs.as_deref(), *random, *seed),
    }
}

fn hierarchy(cli: &Cli, count: bool, include_true: bool, edges: bool, dot: Option<&Path>) -> Outcome {
    if count {
        let n = if include_true { count_with_true(cli.ruleset) } else { Lattice::enumerate(cli.ruleset).len() };
        out!("{n}");
        return Ok(());
    }
    let lat = lattice(cli)?;
    if let Some(p) = dot {
        return write_to(Some(p), &lat.to_dot());
    }
    if edges {
        for (a, b) in lat.hasse_edges() {
            out!("{} -> {}", lat.level(a), lat.level(b));
        }
        return Ok(());
    }
    for (k, l) in lat.levels().iter().enumerate() {
        if l.is_graylevel() {
            out!("{k:>3}  {l}  {}", paint("gray", "90"));
        } else {
            out!("{k:>3}  {l}");
        }
    }
    Ok(())
}

fn synthesize(cli: &Cli, spec: &SpecFiles, output: Option<&Path>, report: Option<&Path>, stats: bool) -> Outcome {
    let base = bases(spec, cli.ruleset)?;
    let lat = lattice(cli)?;
    let started = Instant::now();
    let s = synthesize_from_bases(&base, lat, cli.acceptance.into()).map_err(|e| match e {
        SynthesisError::NoRealizableLevel => Failure { code: 2, message: e.to_string() },
        other => Failure::usage(other.to_string()),
    })?;
    let elapsed = started.elapsed();
    write_to(output, &s.machine.render())?;
    if let Some(p) = report {
        write_to(Some(p), &json(&s.report))?;
    }
    if stats {
        #[derive(Serialize)]
        struct Stats<'a> {
            #[serde(flatten)]
            game: &'a crate::games::GameStats,
            automaton_states: usize,
            machine_states: usize,
            solve_ms: u128,
        }
        let st = Stats {
            game: &s.report.game,
            automaton_states: s.report.automaton_states,
            machine_states: s.report.machine_states,
            solve_ms: elapsed.as_millis(),
        };
        let _ = std::io::stderr().write_all(json(&st).as_bytes());
    }
    Ok(())
}

#[derive(Serialize)]
struct WitnessJson {
    prefix: Vec<String>,
    cycle: Vec<String>,
}

#[derive(Serialize)]
struct ConjunctJson {
    conjunct: String,
    satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness_lasso: Option<WitnessJson>,
}

#[derive(Serialize)]
struct CheckJson {
    level: String,
    satisfied: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    after: Option<Vec<String>>,
    conjuncts: Vec<ConjunctJson>,
}

fn witness(l: &Lasso, m: &MealyStrategy) -> WitnessJson {
    let (prefix, cycle) = l.render(m.alphabet());
    WitnessJson { prefix, cycle }
}

struct Prepared {
    machine: MealyStrategy,
    base: BaseAutomata,
    split: Vec<usize>,
}

fn prepare(cli: &Cli, target: &MachineTarget) -> Result<Prepared, Failure> {
    let machine = load_machine(&target.machine, cli.ruleset)?;
    let base = bases(&target.spec, cli.ruleset)?;
    if machine.alphabet() != base.alphabet() {
        return Err(Failure::usage("machine and automata use different alphabets"));
    }
    let split = match &target.after {
        Some(t) => parse_inputs(t, &machine)?,
        None => Vec::new(),
    };
    Ok(Prepared { machine, base, split })
}

fn check(cli: &Cli, target: &MachineTarget, level: &str) -> Outcome {
    let level = LevelSpec::parse(level, cli.ruleset).map_err(|e| Failure::usage(e.to_string()))?;
    let p = prepare(cli, target)?;
    let mut ck = Checker::new(BobbleQuery { machine: &p.machine, split_inputs: &p.split }, &p.base);
    let rep = ck.level(&level).map_err(|e| Failure::usage(e.to_string()))?;
    let out = CheckJson {
        level: level.to_string(),
        satisfied: rep.satisfied,
        after: target.after.as_ref().map(|_| p.split.iter().map(|&i| p.machine.alphabet().inputs()[i].clone()).collect()),
        conjuncts: rep
            .conjuncts
            .iter()
            .map(|(c, v)| ConjunctJson {
                conjunct: c.to_string(),
                satisfied: v.satisfied,
                witness_lasso: v.witness.as_ref().map(|l| witness(l, &p.machine)),
            })
            .collect(),
    };
    out_raw!("{}", json(&out));
    Ok(())
}

#[derive(Serialize)]
struct ClassifyJson {
    machine: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    after: Option<Vec<String>>,
    maximal: Vec<String>,
}

fn classify(cli: &Cli, target: &MachineTarget) -> Outcome {
    let lat = lattice(cli)?;
    let p = prepare(cli, target)?;
    let mut ck = Checker::new(BobbleQuery { machine: &p.machine, split_inputs: &p.split }, &p.base);
    let maximal = ck.classify(&lat).map_err(|e| Failure::usage(e.to_string()))?;
    let out = ClassifyJson {
        machine: p.machine.name().to_string(),
        after: target.after.as_ref().map(|_| p.split.iter().map(|&i| p.machine.alphabet().inputs()[i].clone()).collect()),
        maximal: maximal.iter().map(ToString::to_string).collect(),
    };
    out_raw!("{}", json(&out));
    Ok(())
}

fn simulate(cli: &Cli, path: &Path, inputs: Option<&str>, random: Option<usize>, seed: u64) -> Outcome {
    let m = load_machine(path, cli.ruleset)?;
    let word = match (inputs, random) {
        (Some(t), _) => parse_inputs(t, &m)?,
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..n).map(|_| rng.gen_range(0..m.alphabet().num_inputs())).collect()
        }
        (None, None) => Vec::new(),
    };
    let level = |s: usize| m.level_of(s).map_or_else(|| "-".to_string(), ToString::to_string);
    let ab = m.alphabet();
    out!("initial {} level={}", m.state_name(m.initial()), level(m.initial()));
    let steps = m.run(&word);
    let mut switches = 0;
    for (k, st) in steps.iter().enumerate() {
        let changed = m.level_of(st.state) != m.level_of(st.next);
        let mut line = format!(
            "step {}: input={} output={} {} -> {} level={}",
            k + 1,
            ab.inputs()[st.input],
            ab.outputs()[st.output],
            m.state_name(st.state),
            m.state_name(st.next),
            level(st.next)
        );
        if changed {
            switches += 1;
            line = format!("{line} {}", paint("(switch)", "33"));
        }
        out!("{line}");
    }
    if !steps.is_empty() {
        out!("level switches: {switches}");
    }
    Ok(())
}

//! Command-line driver. `run` is the whole program; `main` only wires it to
//! the process streams so tests can call it directly.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use isratio::estimator::{self, EstimateError};
use isratio::io::{self as formats, FormatError};
use isratio::markov::{self, Direction, MarkovChain, MarkovError};
use isratio::worst_case::{self, Family, FamilySpec, WorstCaseError};
use isratio::{reduction_levels, sais, Word};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SEED: u64 = 42;

#[derive(Parser, Debug)]
#[command(name = "isratio", version, about = "Induced-sorting reduction ratios")]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Write the report here instead of stdout.
    #[arg(long, short, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Suffix array of each word in the file, one index per line.
    Sa(WordInput),
    /// Lengths and ratios of is(w), is²(w), … up to the given level.
    Reduce {
        #[arg(long, default_value_t = usize::MAX)]
        levels: usize,
        /// Include the reduced words themselves.
        #[arg(long)]
        words: bool,
        #[command(flatten)]
        input: WordInput,
    },
    /// Build a worst-case word and measure its reductions.
    Worst {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        n: u32,
        /// Exit with status 2 unless every claimed identity holds.
        #[arg(long)]
        verify: bool,
        /// Also write the word, in text format, to this file.
        #[arg(long)]
        word_file: Option<PathBuf>,
    },
    /// Reduction ratio of a chain, analytically or by simulation.
    Gamma(GammaArgs),
    /// The truncated factor chain.
    Factors(FactorArgs),
    /// Recursion depth of the suffix-array engine.
    Depth(DepthArgs),
    /// Uniform reals against their image under the law's threshold map.
    Couple {
        /// Comma-separated letter masses.
        #[arg(long, value_delimiter = ',', required = true)]
        law: Vec<f64>,
        #[arg(long)]
        length: usize,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
}

#[derive(Args, Debug)]
struct WordInput {
    file: PathBuf,
    /// Read each line as characters, rank-mapped to letters.
    #[arg(long)]
    chars: bool,
}

#[derive(Args, Debug)]
struct GammaArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_enum, default_value_t = DirectionArg::Rl)]
    direction: DirectionArg,
    #[arg(long, conflicts_with = "mc", required_unless_present = "mc")]
    analytic: bool,
    #[arg(long)]
    mc: bool,
    #[arg(long, default_value_t = 1)]
    level: usize,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[arg(long, default_value_t = 1_000_000)]
    length: usize,
    /// Longest factor enumerated for the analytic second level.
    #[arg(long, default_value_t = 14)]
    max_len: usize,
    /// Report per-component values when the chain has several terminal
    /// components instead of refusing it.
    #[arg(long)]
    mixture: bool,
    /// Write the Monte Carlo summary row to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("mode").required(true))]
struct FactorArgs {
    #[arg(long)]
    chain: PathBuf,
    #[arg(long, value_enum, default_value_t = DirectionArg::Rl)]
    direction: DirectionArg,
    #[arg(long)]
    max_len: usize,
    #[arg(long, group = "mode")]
    enumerate: bool,
    #[arg(long, group = "mode")]
    check_identities: bool,
    #[arg(long, group = "mode")]
    sample: Option<usize>,
    /// Truncated second-level ratio.
    #[arg(long, group = "mode")]
    gamma2: bool,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true))]
struct DepthArgs {
    #[arg(long, group = "source")]
    chain: Option<PathBuf>,
    /// Measure one worst-case word instead (exempt from the bound).
    #[arg(long, value_enum, group = "source", requires = "n")]
    family: Option<FamilyArg>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Rl)]
    direction: DirectionArg,
    #[arg(long, default_value_t = 100_000)]
    length: usize,
    #[arg(long, default_value_t = 1000)]
    trials: usize,
    #[arg(long, default_value_t = 2.0)]
    ell: f64,
    /// Write one row per trial to this CSV file.
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum DirectionArg {
    Rl,
    Lr,
}

impl From<DirectionArg> for Direction {
    fn from(d: DirectionArg) -> Self {
        match d {
            DirectionArg::Rl => Direction::RightToLeft,
            DirectionArg::Lr => Direction::LeftToRight,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum FamilyArg {
    Thm1,
    Cor2,
    Cor3,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Thm1 => Family::Thm1,
            FamilyArg::Cor2 => Family::Cor2,
            FamilyArg::Cor3 => Family::Cor3,
        }
    }
}

/// Failure with its exit status: 1 malformed input, 2 validation failure,
/// 3 truncation tail too large.
#[derive(Debug)]
struct Failure {
    code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Self {
            code: 1,
            kind: "malformed_input",
            message: message.into(),
        }
    }
}

impl From<FormatError> for Failure {
    fn from(e: FormatError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Self::input(e.to_string())
    }
}

impl From<WorstCaseError> for Failure {
    fn from(e: WorstCaseError) -> Self {
        Self::input(e.to_string())
    }
}

impl From<MarkovError> for Failure {
    fn from(e: MarkovError) -> Self {
        let (code, kind) = match e {
            MarkovError::InvalidChain(_) | MarkovError::InvalidLaw(_) => (1, "malformed_input"),
            MarkovError::EnumerationTooLarge { .. } => (1, "enumeration_too_large"),
            MarkovError::MultipleTerminalComponents(_) => (2, "multiple_terminal_components"),
            MarkovError::SingletonTerminal => (2, "singleton_terminal"),
            MarkovError::DegenerateLaw => (2, "degenerate_law"),
            MarkovError::TailTooLarge { .. } => (3, "tail_too_large"),
        };
        Self {
            code,
            kind,
            message: e.to_string(),
        }
    }
}

impl From<EstimateError> for Failure {
    fn from(e: EstimateError) -> Self {
        match e {
            EstimateError::InvalidParameter(m) => Self::input(m),
            EstimateError::Markov(m) => m.into(),
        }
    }
}

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    schema_version: u32,
    command: &'a str,
    seed: Option<u64>,
    #[serde(flatten)]
    report: T,
}

struct Context<'a> {
    seed: u64,
    output: Option<PathBuf>,
    stdout: &'a mut dyn Write,
}

impl Context<'_> {
    fn emit_text(&mut self, text: &str) -> Result<(), Failure> {
        match &self.output {
            Some(path) => std::fs::write(path, text)?,
            None => self.stdout.write_all(text.as_bytes())?,
        }
        Ok(())
    }

    fn emit<T: Serialize>(
        &mut self,
        command: &str,
        seeded: bool,
        report: T,
    ) -> Result<(), Failure> {
        let envelope = Envelope {
            schema_version: SCHEMA_VERSION,
            command,
            seed: seeded.then_some(self.seed),
            report,
        };
        let mut text = serde_json::to_string_pretty(&envelope).expect("reports serialise");
        text.push('\n');
        self.emit_text(&text)
    }
}

fn read_words(input: &WordInput) -> Result<Vec<Word>, Failure> {
    if input.chars {
        let text = std::fs::read_to_string(&input.file)?;
        return Ok(text.lines().map(Word::from_text).collect());
    }
    Ok(formats::read_words(&input.file)?)
}

fn read_chain(path: &Path) -> Result<MarkovChain, Failure> {
    Ok(formats::read_chain(path)?)
}

/// Runs the program on `args` (including the program name) and returns the
/// exit status. Errors are reported as JSON on `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            return report_failure(stderr, &Failure::input(e.to_string().trim_end()));
        }
    };
    let mut ctx = Context {
        seed: cli.seed,
        output: cli.output,
        stdout,
    };
    match dispatch(cli.command, &mut ctx) {
        Ok(code) => code,
        Err(f) => report_failure(stderr, &f),
    }
}

fn report_failure(stderr: &mut dyn Write, f: &Failure) -> i32 {
    let body = serde_json::json!({
        "schema_version": SCHEMA_VERSION,
        "error": { "kind": f.kind, "message": f.message, "exit_code": f.code },
    });
    let _ = writeln!(stderr, "{body}");
    f.code
}

#[derive(Serialize)]
struct ReduceReport {
    length: usize,
    level_lengths: Vec<usize>,
    level_alphabet_sizes: Vec<u64>,
    ratios: Vec<f64>,
    depth: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    words: Option<Vec<Vec<u64>>>,
}

#[derive(Serialize)]
struct GammaSummaryRow<'a> {
    schema_version: u32,
    direction: &'a str,
    level: usize,
    trials: usize,
    word_length: usize,
    mean: f64,
    std_error: f64,
    ci_low: f64,
    ci_high: f64,
    seed: u64,
}

#[derive(Serialize)]
struct DepthRow {
    schema_version: u32,
    trial: usize,
    depth: usize,
    bound: f64,
    exceeds: bool,
}

fn direction_name(d: Direction) -> &'static str {
    match d {
        Direction::RightToLeft => "rl",
        Direction::LeftToRight => "lr",
    }
}

fn dispatch(command: Command, ctx: &mut Context) -> Result<i32, Failure> {
    match command {
        Command::Sa(input) => {
            let words = read_words(&input)?;
            let mut text = String::new();
            for (i, w) in words.iter().enumerate() {
                if i > 0 {
                    text.push('\n');
                }
                for idx in sais(w).suffix_array.order {
                    text.push_str(&idx.to_string());
                    text.push('\n');
                }
            }
            ctx.emit_text(&text)?;
        }
        Command::Reduce {
            levels,
            words,
            input,
        } => {
            let reports: Vec<ReduceReport> = read_words(&input)?
                .iter()
                .map(|w| {
                    let lv = reduction_levels(w, levels);
                    let n = w.len().max(1) as f64;
                    ReduceReport {
                        length: w.len(),
                        level_lengths: lv.iter().map(Word::len).collect(),
                        level_alphabet_sizes: lv.iter().map(Word::alphabet_size).collect(),
                        ratios: lv.iter().map(|l| l.len() as f64 / n).collect(),
                        depth: lv.len() - 1,
                        words: words.then(|| lv.iter().map(|l| l.letters().to_vec()).collect()),
                    }
                })
                .collect();
            ctx.emit("reduce", false, serde_json::json!({ "reports": reports }))?;
        }
        Command::Worst {
            family,
            n,
            verify,
            word_file,
        } => {
            let spec = FamilySpec::new(family.into(), n)?;
            let report = worst_case::verify_family(spec)?;
            if let Some(path) = word_file {
                let w = worst_case::worst_case_word(spec)?;
                std::fs::write(path, formats::format_words(&[w]))?;
            }
            let holds = report.all_claims_hold;
            ctx.emit("worst", false, report)?;
            if verify && !holds {
                return Err(Failure {
                    code: 2,
                    kind: "claim_failed",
                    message: format!(
                        "not every claimed identity holds for {} n = {n}",
                        spec.family.name()
                    ),
                });
            }
        }
        Command::Gamma(args) => gamma(args, ctx)?,
        Command::Factors(args) => factors(args, ctx)?,
        Command::Depth(args) => depth(args, ctx)?,
        Command::Couple {
            law,
            length,
            trials,
        } => {
            let report = estimator::coupling_trial(&law, length, trials, ctx.seed)?;
            ctx.emit("couple", true, report)?;
        }
    }
    Ok(0)
}

fn gamma(args: GammaArgs, ctx: &mut Context) -> Result<(), Failure> {
    let chain = read_chain(&args.chain)?;
    let direction: Direction = args.direction.into();
    let dir = direction_name(direction);
    if args.level == 0 {
        return Err(Failure::input("--level must be at least 1"));
    }
    if args.analytic {
        if args.mixture {
            if args.level != 1 {
                return Err(Failure::input("--mixture is available for level 1 only"));
            }
            let d = markov::decompose(&chain, direction)?;
            let value: f64 = d
                .absorb_prob
                .iter()
                .zip(&d.per_component_gamma1)
                .map(|(p, g)| p * g)
                .sum();
            let body = serde_json::json!({
                "direction": dir, "level": 1, "mean_over_mixture": value, "decomposition": d,
            });
            return ctx.emit("gamma", false, body);
        }
        let body = match args.level {
            1 => serde_json::json!({
                "direction": dir, "level": 1, "value": markov::gamma1(&chain, direction)?,
            }),
            2 => {
                if args.max_len < 2 {
                    return Err(Failure::input("--max-len must be at least 2"));
                }
                let est = markov::gamma2_truncated(&chain, direction, args.max_len)?;
                serde_json::json!({
                    "direction": dir, "level": 2, "value": est.gamma2, "estimate": est,
                })
            }
            _ => {
                return Err(Failure::input(
                    "analytic values exist for levels 1 and 2 only",
                ))
            }
        };
        return ctx.emit("gamma", false, body);
    }
    let est = estimator::estimate_gamma(
        &chain,
        direction,
        args.level,
        args.length,
        args.trials,
        ctx.seed,
    )?;
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path)?;
        w.serialize(GammaSummaryRow {
            schema_version: SCHEMA_VERSION,
            direction: dir,
            level: est.k,
            trials: est.trials,
            word_length: est.word_length,
            mean: est.mean,
            std_error: est.std_error,
            ci_low: est.interval.0,
            ci_high: est.interval.1,
            seed: ctx.seed,
        })?;
        w.flush()?;
    }
    ctx.emit(
        "gamma",
        true,
        serde_json::json!({ "direction": dir, "estimate": est }),
    )
}

fn factors(args: FactorArgs, ctx: &mut Context) -> Result<(), Failure> {
    let chain = read_chain(&args.chain)?;
    let direction: Direction = args.direction.into();
    if args.max_len < 2 {
        return Err(Failure::input("--max-len must be at least 2"));
    }
    if args.check_identities {
        let report = markov::check_stationary_identities(&chain, args.max_len)?;
        let holds = report.all_hold;
        ctx.emit("factors", false, report)?;
        if !holds {
            return Err(Failure {
                code: 2,
                kind: "identity_failed",
                message: "a truncated identity exceeds its tail bound".into(),
            });
        }
        return Ok(());
    }
    if args.gamma2 {
        let est = markov::gamma2_truncated(&chain, direction, args.max_len)?;
        return ctx.emit("factors", false, est);
    }
    let view = markov::factor_chain(&chain, direction, args.max_len)?;
    if let Some(count) = args.sample {
        let sampled = markov::sample_factors(&view, count, ctx.seed)?;
        let body = serde_json::json!({
            "direction": direction_name(direction),
            "max_len": args.max_len,
            "tail": view.tail,
            "factors": sampled.iter().map(|f| f.to_string()).collect::<Vec<_>>(),
        });
        return ctx.emit("factors", true, body);
    }
    ctx.emit("factors", false, view)
}

fn depth(args: DepthArgs, ctx: &mut Context) -> Result<(), Failure> {
    let report = match (&args.chain, args.family) {
        (Some(path), _) => {
            let chain = read_chain(path)?;
            estimator::depth_stats(
                &chain,
                args.direction.into(),
                args.length,
                args.trials,
                args.ell,
                ctx.seed,
            )?
        }
        (None, Some(family)) => {
            let n = args.n.ok_or_else(|| Failure::input("--family needs --n"))?;
            let w = worst_case::worst_case_word(FamilySpec::new(family.into(), n)?)?;
            estimator::depth_of_word(&w, args.ell)
        }
        (None, None) => return Err(Failure::input("give --chain or --family")),
    };
    if let Some(path) = &args.csv {
        let mut w = csv::Writer::from_path(path)?;
        for (trial, &d) in report.per_trial.iter().enumerate() {
            w.serialize(DepthRow {
                schema_version: SCHEMA_VERSION,
                trial,
                depth: d,
                bound: report.bound,
                exceeds: d as f64 > report.bound,
            })?;
        }
        w.flush()?;
    }
    let seeded = args.chain.is_some();
    ctx.emit("depth", seeded, report)
}

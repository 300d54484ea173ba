//! Command-line front end: encode, decode, keygen, capacity, and lint over
//! files and standard streams.
//!
//! Exit codes: 0 on success, 1 on domain errors (bad input, unknown key map,
//! capacity exceeded, ...), 2 on usage errors.

use std::fs;
use std::io::{self, IsTerminal, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use eqsteg::analysis::{capacity_report, lint_equation, max_message_length, LintConfig};
use eqsteg::codec::{decode, encode, OperatorWeights};
use eqsteg::eqparse::{parse_envelope, tokenize_equation};
use eqsteg::keymap::{
    default_keymap_set, generate_keymap_set, parse_keymap_set, serialize_keymap_set,
    KeyMapRegistry, KeyMapSet, Operator, KEYMAP_ID_MAX, KEYMAP_ID_MIN,
};

#[derive(Parser)]
#[command(
    name = "eqsteg",
    version,
    about = "Hide short messages inside the equations of a math-quiz SMS"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Embed a secret message and print the stego text
    Encode(EncodeArgs),
    /// Recover the secret message from stego text
    Decode(DecodeArgs),
    /// Write a keymap file (generated from a seed, or the built-in tables)
    Keygen(KeygenArgs),
    /// Report how much of the 140-character budget a message needs
    Capacity(CapacityArgs),
    /// Flag implausible equations in stego text
    Lint(LintArgs),
}

#[derive(Args)]
struct EncodeArgs {
    /// Key map source: "default" or a keymap file path
    #[arg(long, default_value = "default")]
    keymap: String,
    /// Key map id (required with --keymap default)
    #[arg(long)]
    id: Option<u8>,
    /// Seed for the operator selection
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Secret message (read from --input or stdin when omitted)
    #[arg(long)]
    message: Option<String>,
    /// Operator selection weights, e.g. "^:0,*:3"; unlisted operators keep 1
    #[arg(long)]
    weights: Option<String>,
    /// Read the message from a file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the stego text to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DecodeArgs {
    /// Key map sources, repeatable: "default" or keymap file paths
    #[arg(long = "keymap", default_value = "default")]
    keymaps: Vec<String>,
    /// Restrict "default" to one id (otherwise all ids 1-99 are registered)
    #[arg(long)]
    id: Option<u8>,
    /// Read the stego text from a file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the recovered message to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct KeygenArgs {
    /// Key map id (1-99)
    #[arg(long)]
    id: u8,
    /// Generate a fresh key map from this seed
    #[arg(long)]
    seed: Option<u64>,
    /// Export the built-in tables instead of generating
    #[arg(long)]
    default: bool,
    /// Write the keymap file here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct CapacityArgs {
    /// Key map source: "default" or a keymap file path
    #[arg(long, default_value = "default")]
    keymap: String,
    /// Key map id (required with --keymap default)
    #[arg(long)]
    id: Option<u8>,
    /// Also report the exact stego length under this seed
    #[arg(long)]
    seed: Option<u64>,
    /// Message to analyze (read from --input or stdin when omitted)
    #[arg(long)]
    message: Option<String>,
    /// Read the message from a file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct LintArgs {
    /// Equation or stego text (read from --input or stdin when omitted)
    #[arg(long)]
    equation: Option<String>,
    /// Read the text from a file
    #[arg(long)]
    input: Option<PathBuf>,
    /// Warn when a "^" right operand exceeds this
    #[arg(long, default_value_t = 9)]
    exponent_threshold: u32,
    /// Report when one operator exceeds this share of operators (percent)
    #[arg(long, default_value_t = 60)]
    dominance_threshold: u32,
    /// Dominance reports need at least this many non-equals operators
    #[arg(long, default_value_t = 5)]
    dominance_min_operators: usize,
    /// Write the report to a file instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

enum CliError {
    Usage(String),
    Failure(String),
}

impl From<eqsteg::Error> for CliError {
    fn from(err: eqsteg::Error) -> CliError {
        CliError::Failure(err.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(err: io::Error) -> CliError {
        CliError::Failure(err.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("usage error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Encode(args) => run_encode(args),
        Command::Decode(args) => run_decode(args),
        Command::Keygen(args) => run_keygen(args),
        Command::Capacity(args) => run_capacity(args),
        Command::Lint(args) => run_lint(args),
    }
}

fn run_encode(args: EncodeArgs) -> Result<(), CliError> {
    let set = load_single_set(&args.keymap, args.id)?;
    let weights = args.weights.as_deref().map(parse_weights).transpose()?;
    let message = read_message(args.message.as_deref(), args.input.as_deref())?;
    let stego = encode(&message, &set, args.seed, weights.as_ref())?;
    emit(args.output.as_deref(), &stego.full_text)
}

fn run_decode(args: DecodeArgs) -> Result<(), CliError> {
    let registry = build_registry(&args.keymaps, args.id)?;
    let text = read_text(args.input.as_deref(), "stego text")?;
    let message = decode(&text, &registry)?;
    emit(args.output.as_deref(), &message)
}

fn run_keygen(args: KeygenArgs) -> Result<(), CliError> {
    let set = match (args.seed, args.default) {
        (Some(seed), false) => generate_keymap_set(args.id, seed)?,
        (None, true) => default_keymap_set(args.id)?,
        _ => {
            return Err(CliError::Usage(
                "pass exactly one of --seed <seed> or --default".to_string(),
            ))
        }
    };
    let doc = serialize_keymap_set(&set)?;
    emit(args.output.as_deref(), &doc)
}

fn run_capacity(args: CapacityArgs) -> Result<(), CliError> {
    let set = load_single_set(&args.keymap, args.id)?;
    let message = read_message(args.message.as_deref(), args.input.as_deref())?;
    let report = capacity_report(&message, &set, args.seed)?;

    let mut lines = vec![
        format!("message length: {}", report.message_length),
        format!("prefix length: {}", report.prefix_length),
        format!("min total: {}", report.min_total),
        format!("max total: {}", report.max_total),
    ];
    if let Some(actual) = report.actual_total {
        lines.push(format!("actual total: {actual}"));
    }
    lines.push(format!("percent used: {}%", report.percent_used));
    lines.push(format!(
        "max message length (optimistic): {}",
        max_message_length(&set, false)
    ));
    lines.push(format!(
        "max message length (pessimistic): {}",
        max_message_length(&set, true)
    ));
    emit(args.output.as_deref(), &lines.join("\n"))
}

fn run_lint(args: LintArgs) -> Result<(), CliError> {
    let text = match args.equation {
        Some(equation) => {
            if args.input.is_some() {
                return Err(CliError::Usage(
                    "pass at most one of --equation and --input".to_string(),
                ));
            }
            equation
        }
        None => read_text(args.input.as_deref(), "equation")?,
    };

    // accept either a bare equation or a full stego text
    let equation_text = if text.starts_with("Math Quiz (") {
        parse_envelope(&text)?.equation_text
    } else {
        text
    };
    if equation_text.is_empty() {
        return emit(args.output.as_deref(), "no findings");
    }

    let equation = tokenize_equation(&equation_text)?;
    let config = LintConfig {
        exponent_threshold: args.exponent_threshold,
        dominance_threshold: args.dominance_threshold,
        dominance_min_operators: args.dominance_min_operators,
    };
    let findings = lint_equation(&equation, &config);
    if findings.is_empty() {
        return emit(args.output.as_deref(), "no findings");
    }
    let lines: Vec<String> = findings
        .iter()
        .map(|f| {
            format!(
                "{} token {} {}: {}",
                f.severity, f.token_index, f.rule, f.note
            )
        })
        .collect();
    emit(args.output.as_deref(), &lines.join("\n"))
}

fn load_single_set(source: &str, id: Option<u8>) -> Result<KeyMapSet, CliError> {
    if source == "default" {
        let id = id
            .ok_or_else(|| CliError::Usage("--id is required with --keymap default".to_string()))?;
        Ok(default_keymap_set(id)?)
    } else {
        if id.is_some() {
            return Err(CliError::Usage(
                "--id only applies to --keymap default".to_string(),
            ));
        }
        load_keymap_file(Path::new(source))
    }
}

fn build_registry(sources: &[String], id: Option<u8>) -> Result<KeyMapRegistry, CliError> {
    let mut registry = KeyMapRegistry::new();
    let mut id_used = false;
    for source in sources {
        if source == "default" {
            match id {
                Some(id) => {
                    registry.register(default_keymap_set(id)?)?;
                    id_used = true;
                }
                None => {
                    for id in KEYMAP_ID_MIN..=KEYMAP_ID_MAX {
                        registry.register(default_keymap_set(id)?)?;
                    }
                }
            }
        } else {
            registry.register(load_keymap_file(Path::new(source))?)?;
        }
    }
    if id.is_some() && !id_used {
        return Err(CliError::Usage(
            "--id requires a \"default\" entry among --keymap sources".to_string(),
        ));
    }
    Ok(registry)
}

fn load_keymap_file(path: &Path) -> Result<KeyMapSet, CliError> {
    let doc = fs::read_to_string(path)
        .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?;
    Ok(parse_keymap_set(&doc)?)
}

/// Weights come as comma-separated `<operator>:<weight>` pairs; operators
/// not mentioned keep weight 1. `=` is never drawn and cannot be weighted.
fn parse_weights(spec: &str) -> Result<OperatorWeights, CliError> {
    let mut assigned: Vec<(Operator, u32)> = Vec::new();
    for part in spec.split(',') {
        let (symbol, weight) = part.split_once(':').ok_or_else(|| {
            CliError::Usage(format!(
                "bad weight entry {part:?}, expected <operator>:<weight>"
            ))
        })?;
        let mut chars = symbol.chars();
        let op = chars
            .next()
            .filter(|_| chars.next().is_none())
            .and_then(Operator::from_symbol)
            .ok_or_else(|| CliError::Usage(format!("unknown operator {symbol:?}")))?;
        if op == Operator::Eq {
            return Err(CliError::Usage(
                "'=' is always the terminal operator and cannot be weighted".to_string(),
            ));
        }
        let weight: u32 = weight
            .parse()
            .map_err(|_| CliError::Usage(format!("bad weight {weight:?}")))?;
        assigned.push((op, weight));
    }
    Ok(OperatorWeights::from_fn(|op| {
        assigned
            .iter()
            .rev()
            .find(|(o, _)| *o == op)
            .map(|&(_, w)| w)
            .unwrap_or(1)
    }))
}

fn read_message(flag: Option<&str>, input: Option<&Path>) -> Result<String, CliError> {
    match flag {
        Some(message) => {
            if input.is_some() {
                return Err(CliError::Usage(
                    "pass at most one of --message and --input".to_string(),
                ));
            }
            Ok(message.to_string())
        }
        None => read_text(input, "message"),
    }
}

fn read_text(input: Option<&Path>, what: &str) -> Result<String, CliError> {
    let raw = match input {
        Some(path) => fs::read_to_string(path)
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        None => {
            if io::stdin().is_terminal() {
                return Err(CliError::Usage(format!(
                    "no {what} provided: pass a flag or pipe it on stdin"
                )));
            }
            let mut buffer = String::new();
            io::stdin().read_to_string(&mut buffer)?;
            buffer
        }
    };
    Ok(trim_one_newline(raw))
}

fn trim_one_newline(mut text: String) -> String {
    if text.ends_with('\n') {
        text.pop();
        if text.ends_with('\r') {
            text.pop();
        }
    }
    text
}

/// Writes the payload with exactly one trailing newline.
fn emit(output: Option<&Path>, content: &str) -> Result<(), CliError> {
    let mut text = content.trim_end_matches('\n').to_string();
    text.push('\n');
    match output {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Failure(format!("{}: {e}", path.display())))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

use std::fs;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use urtlab_core::morphisms::{builtin, builtin_by_name, BuiltinName, Morphism};
use urtlab_core::pansiot::{decode_checked, encode};
use urtlab_core::powers::{scan, ScanOptions};
use urtlab_core::prover::{
    backtrack_max_length, check_leaf_factors, kernel_report, kernel_search, main_word_iter, refined_k4_filter,
    verify_main, verify_product, verify_urt3, BacktrackOptions, Constraint, MainOptions, URT3_SCAN_LENGTH,
};
use urtlab_core::word::letters_to_text;
use urtlab_core::{Error, Letter, Report, Threshold, Word};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "urtlab", version, about = "Undirected repetitions: scanners, constructions and finite provers")]
struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,

    /// Worker threads (0 = one per core)
    #[arg(long, global = true, env = "URTLAB_JOBS", default_value_t = 0)]
    jobs: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(clap::Args)]
struct WordInput {
    /// Word text; read from --file or stdin when absent
    word: Option<String>,

    #[arg(long)]
    file: Option<PathBuf>,
}

impl WordInput {
    fn read(&self, k: usize) -> anyhow::Result<Word> {
        let text = match (&self.word, &self.file) {
            (Some(w), _) => w.clone(),
            (None, Some(path)) => fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?,
            (None, None) => {
                let mut s = String::new();
                io::stdin().read_to_string(&mut s)?;
                s
            }
        };
        Ok(Word::parse(&text, k)?)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Scan a word for forbidden undirected repetitions
    Check {
        #[arg(long)]
        k: usize,
        /// Threshold as P/Q (or P/Q+ for the strict version)
        #[arg(long)]
        threshold: String,
        #[arg(long)]
        strict: bool,
        /// Ignore reverse repetitions
        #[arg(long)]
        ordinary_only: bool,
        /// Report every violating (start, period, excess), not only maximal ones
        #[arg(long)]
        exhaustive: bool,
        #[command(flatten)]
        input: WordInput,
    },
    /// Exhaustive search for the longest word avoiding a threshold or unary pattern
    ProveLowerBound {
        #[arg(long)]
        k: usize,
        #[arg(long, required_unless_present = "pattern_m", conflicts_with = "pattern_m")]
        threshold: Option<String>,
        #[arg(long)]
        strict: bool,
        /// Avoid X1..Xm with each block equal to X1 or its reversal
        #[arg(long)]
        pattern_m: Option<usize>,
        #[arg(long, default_value_t = 100_000_000)]
        max_nodes: u64,
        /// Explore only words whose letters first appear in increasing order
        #[arg(long)]
        symmetry: bool,
        #[arg(long, default_value_t = 16)]
        max_witnesses: usize,
    },
    /// Run the finite checks for a construction
    Verify {
        #[arg(long)]
        theorem: Theorem,
        /// Prefix length for the direct scans
        #[arg(long)]
        length: Option<usize>,
        /// Alphabet size for --theorem leaves
        #[arg(long, default_value_t = 6)]
        k: usize,
        /// Scan reverse repetitions of every length in main-K
        #[arg(long)]
        full_reverse_scan: bool,
    },
    /// Search for kernel repetitions with cut-free excess
    KernelSearch {
        #[arg(long)]
        k: usize,
    },
    /// Print a prefix of a construction or of a morphic fixed point
    Generate {
        #[arg(long, conflicts_with_all = ["morphism", "morphism_file"])]
        construction: Option<String>,
        /// Built-in morphism: f24, f4, f8, f12, g
        #[arg(long, conflicts_with = "morphism_file")]
        morphism: Option<String>,
        /// Morphism table with lines `a -> image`
        #[arg(long)]
        morphism_file: Option<PathBuf>,
        /// Codomain size for --morphism-file
        #[arg(long)]
        codomain: Option<usize>,
        #[arg(long, default_value_t = 1)]
        seed: Letter,
        #[arg(long)]
        length: usize,
    },
    /// Ternary code of a word over k letters
    Encode {
        #[arg(long)]
        k: usize,
        #[command(flatten)]
        input: WordInput,
    },
    /// Word over k letters from its prefix and ternary code
    Decode {
        #[arg(long)]
        k: usize,
        #[arg(long)]
        prefix: String,
        #[command(flatten)]
        input: WordInput,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Theorem {
    Urt3,
    Product,
    Leaves,
    #[value(name = "main-4")]
    Main4,
    #[value(name = "main-8")]
    Main8,
    #[value(name = "main-12")]
    Main12,
}

fn parse_threshold(text: &str, strict: bool) -> anyhow::Result<Threshold> {
    let t: Threshold = text.parse()?;
    Ok(if strict && !t.is_strict() { Threshold::new(*t.alpha().numer(), *t.alpha().denom(), true)? } else { t })
}

fn emit<T: Serialize>(format: Format, value: &T, text: impl FnOnce() -> String) -> anyhow::Result<()> {
    let mut out = io::stdout().lock();
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(value)?)?,
        Format::Text => write!(out, "{}", text())?,
    }
    Ok(())
}

fn emit_report(format: Format, report: &Report) -> anyhow::Result<bool> {
    emit(format, report, || report.to_string())?;
    Ok(report.passed())
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    let format = cli.format;
    match cli.command {
        Command::Check { k, threshold, strict, ordinary_only, exhaustive, input } => {
            let t = parse_threshold(&threshold, strict)?;
            let w = input.read(k)?;
            let opts = ScanOptions { reverse: !ordinary_only, exhaustive, ..ScanOptions::default() };
            let witnesses = scan(w.letters(), &t, opts);
            let free = witnesses.is_empty();
            emit(format, &json!({ "free": free, "witnesses": witnesses }), || {
                let mut s = format!("{}: {} witnesses for {t} in a word of length {}\n", if free { "free" } else { "violation" }, witnesses.len(), w.len());
                for x in &witnesses {
                    let factor = letters_to_text(&w.letters()[x.start..x.start + x.len()], k);
                    s += &format!("  start {} period {} excess {} {} {}: {factor}\n", x.start, x.period, x.excess, x.kind, x.exponent);
                }
                s
            })?;
            Ok(free)
        }
        Command::ProveLowerBound { k, threshold, strict, pattern_m, max_nodes, symmetry, max_witnesses } => {
            let constraint = match (threshold, pattern_m) {
                (_, Some(m)) => Constraint::UnaryPattern(m),
                (Some(t), None) => Constraint::Threshold(parse_threshold(&t, strict)?),
                (None, None) => bail!("one of --threshold or --pattern-m is required"),
            };
            let opts = BacktrackOptions { symmetry, max_nodes: Some(max_nodes), max_witnesses };
            let out = backtrack_max_length(k, &constraint, &opts)?;
            emit(format, &out, || {
                let mut s = format!(
                    "longest word over {k} letters: {} ({} such words, {} nodes)\n",
                    out.max_length, out.witness_count, out.nodes_expanded
                );
                for w in &out.witnesses {
                    s += &format!("  {w}\n");
                }
                s
            })?;
            Ok(true)
        }
        Command::Verify { theorem, length, k, full_reverse_scan } => {
            let report = match theorem {
                Theorem::Urt3 => verify_urt3(length.unwrap_or(URT3_SCAN_LENGTH))?,
                Theorem::Product => verify_product(length.unwrap_or(2000))?,
                Theorem::Leaves => check_leaf_factors(k)?,
                Theorem::Main4 | Theorem::Main8 | Theorem::Main12 => {
                    let k = match theorem {
                        Theorem::Main4 => 4,
                        Theorem::Main8 => 8,
                        _ => 12,
                    };
                    let mut r = verify_main(k, length.unwrap_or(3000), MainOptions { full_reverse_scan })?;
                    r.extend(kernel_report(k)?);
                    r
                }
            };
            emit_report(format, &report)
        }
        Command::KernelSearch { k } => {
            let pairs = kernel_search(k)?;
            emit(format, &json!({ "pairs": pairs }), || {
                let mut s = format!("{} kernel pairs for k = {k}\n", pairs.len());
                for p in &pairs {
                    s += &format!("  pi = {}, eta = {}\n", p.pi, if p.eta.is_empty() { "ε".into() } else { p.eta.to_string() });
                }
                if k == 4 {
                    s += &format!("{} pairs survive |pi| < 2|eta| + 4\n", refined_k4_filter(&pairs).len());
                }
                s
            })?;
            Ok(true)
        }
        Command::Generate { construction, morphism, morphism_file, codomain, seed, length } => {
            let (letters, k): (Box<dyn Iterator<Item = Letter>>, usize) = match (construction, morphism, morphism_file) {
                (Some(c), _, _) => match c.as_str() {
                    "urt3" => (Box::new(builtin(BuiltinName::F24).fixed_point_iter(1)?), 3),
                    other => {
                        let k = other
                            .strip_prefix("main-")
                            .and_then(|k| k.parse::<usize>().ok())
                            .with_context(|| format!("unknown construction `{other}` (urt3, main-4, main-8, main-12)"))?;
                        (Box::new(main_word_iter(k)?), k)
                    }
                },
                (None, Some(name), _) => {
                    let h = builtin_by_name(&name)?;
                    let k = h.codomain_size();
                    (Box::new(h.fixed_point_iter(seed)?), k)
                }
                (None, None, Some(path)) => {
                    let text = fs::read_to_string(&path).with_context(|| format!("reading {}", path.display()))?;
                    let k = codomain.context("--codomain is required with --morphism-file")?;
                    let h = Morphism::parse_table(&text, k)?;
                    (Box::new(h.fixed_point_iter(seed)?), k)
                }
                (None, None, None) => bail!("one of --construction, --morphism or --morphism-file is required"),
            };
            stream_word(format, letters.take(length), k)?;
            Ok(true)
        }
        Command::Encode { k, input } => {
            let w = input.read(k)?;
            let enc = encode(&w, k)?;
            let ranking = enc.initial_ranking.images().to_vec();
            emit(format, &json!({ "prefix": enc.prefix, "code": enc.code, "initial_ranking": ranking }), || {
                format!("prefix {}\ncode {}\n", enc.prefix, enc.code)
            })?;
            Ok(true)
        }
        Command::Decode { k, prefix, input } => {
            let u = Word::parse(&prefix, k)?;
            let code = input.read(3)?;
            let w = decode_checked(&u, &code, k)?;
            emit(format, &json!({ "word": w }), || format!("{w}\n"))?;
            Ok(true)
        }
    }
}

/// Writes letters in chunks so long prefixes never sit in memory.
fn stream_word(format: Format, letters: impl Iterator<Item = Letter>, k: usize) -> anyhow::Result<()> {
    let mut out = BufWriter::new(io::stdout().lock());
    let sep = if k <= 9 { "" } else { " " };
    if format == Format::Json {
        write!(out, "{{\"word\":\"")?;
    }
    let mut chunk = Vec::with_capacity(4096);
    let mut first = true;
    let mut flush = |chunk: &mut Vec<Letter>, out: &mut BufWriter<_>| -> io::Result<()> {
        for &a in chunk.iter() {
            if !first {
                out.write_all(sep.as_bytes())?;
            }
            first = false;
            write!(out, "{a}")?;
        }
        chunk.clear();
        Ok(())
    };
    for a in letters {
        chunk.push(a);
        if chunk.len() == chunk.capacity() {
            flush(&mut chunk, &mut out)?;
        }
    }
    flush(&mut chunk, &mut out)?;
    if format == Format::Json {
        write!(out, "\"}}")?;
    }
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn exit_code(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => EXIT_BUDGET,
        Some(Error::PremiseFailed(_) | Error::Stabilization { .. }) => EXIT_FAIL,
        _ => EXIT_USAGE,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.jobs > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(cli.jobs).build_global() {
            eprintln!("urtlab: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_FAIL),
        Err(e) => {
            eprintln!("urtlab: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

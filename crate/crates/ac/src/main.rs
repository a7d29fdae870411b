//! Command-line interface: subcommands over the library modules with
//! deterministic, versioned TSV output.

use ac::classify::{classify_relator, RelatorTag};
use ac::conjugacy::acm_conjugates;
use ac::moves::{parse_script, replay};
use ac::normal_forms::{cyclic_nf, full_nf};
use ac::search::{run, run_from_state, restore, SearchConfig, SearchMode};
use ac::words::{cyclic_reduce, parse_pair, parse_word, shortlex_compare, Pair};
use clap::{Parser, Subcommand};
use std::collections::HashMap;
use std::path::PathBuf;
use std::process::ExitCode;

const EX_USAGE: u8 = 64;
const EX_SOFTWARE: u8 = 70;
const EX_EXHAUSTED: u8 = 2;

/// Environment variable overriding the visited-set size cap (number of
/// stored normal forms) for enumerate and trivialize runs.
const VISITED_CAP_VAR: &str = "AC_VISITED_CAP";

#[derive(Parser)]
#[command(
    name = "ac",
    version,
    about = "Search tools for balanced presentations of the trivial group on two generators",
    after_help = "Words use x, y for generators and X, Y for their inverses.\n\
        A pair is two words separated by a space in one argument, e.g. \"xyxYXY xxxYYYY\".\n\
        Set AC_VISITED_CAP to bound the number of stored normal forms of a search."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Harvest verified conjugate representatives of u in the one-relator
    /// group presented by v, one word per line in shortlex order.
    Conjugates {
        /// Word whose conjugates are harvested.
        #[arg(long)]
        u: String,
        /// Relator of the one-relator group.
        #[arg(long)]
        v: String,
        /// Maximum length of harvested words.
        #[arg(short = 'L', long = "max-len")]
        max_len: usize,
        /// Completion rounds of the pseudo-conjugacy graph.
        #[arg(short = 'D', long = "rounds", default_value_t = 2)]
        rounds: usize,
    },
    /// Print the normal form of a pair.
    Nf {
        /// The pair, e.g. "xyxYXY xxxYYYY".
        pair: String,
        /// Stop after the cyclic normal form (no automorphisms).
        #[arg(long)]
        cyclic_only: bool,
    },
    /// Enumerate the bounded component of a seed pair; prints a TSV of
    /// class counts per total length.
    Enumerate {
        /// Seed pair.
        #[arg(long, required_unless_present = "resume")]
        seed: Option<String>,
        /// Per-word length bound.
        #[arg(short = 'L', long = "max-len", required_unless_present = "resume")]
        max_len: Option<usize>,
        /// Completion rounds of the conjugacy engine.
        #[arg(short = 'D', long = "rounds", default_value_t = 2)]
        rounds: usize,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Write a checkpoint after every completed wave.
        #[arg(long)]
        checkpoint: Option<PathBuf>,
        /// Resume from a checkpoint written by --checkpoint.
        #[arg(long, conflicts_with_all = ["seed", "max_len"])]
        resume: Option<PathBuf>,
    },
    /// Search for a trivialization of a seed pair; prints the move script
    /// on success, "exhausted" with status 2 otherwise.
    Trivialize {
        /// Seed pair.
        #[arg(long)]
        seed: String,
        /// Per-word length bound.
        #[arg(short = 'L', long = "max-len")]
        max_len: usize,
        /// Completion rounds of the conjugacy engine.
        #[arg(short = 'D', long = "rounds", default_value_t = 2)]
        rounds: usize,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        threads: usize,
    },
    /// Classify one-relator presentations from a file of relators, one
    /// per line; prints a TSV of relator, class, and witness.
    Classify {
        /// Input file; blank lines and # comments are ignored.
        #[arg(long)]
        relators: PathBuf,
    },
    /// Replay a move script, verifying every conjugate-replacement step,
    /// and print the final pair.
    Replay {
        /// Script file (directives start/target, moves AC1/AC2/AC3/ACM/AUT).
        #[arg(long)]
        script: PathBuf,
        /// Value substituted for k in template exponents.
        #[arg(short, default_value_t = 0)]
        k: i64,
        /// Start pair, overriding the script's start directive.
        #[arg(long)]
        seed: Option<String>,
        /// Per-word length bound for conjugate verification.
        #[arg(short = 'L', long = "max-len", default_value_t = 20)]
        max_len: usize,
        /// Maximum completion rounds tried per conjugate step.
        #[arg(short = 'D', long = "rounds", default_value_t = 4)]
        rounds: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EX_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("ac: {msg}");
            ExitCode::from(EX_USAGE)
        }
        Err(CliError::Internal(msg)) => {
            eprintln!("ac: {msg}");
            ExitCode::from(EX_SOFTWARE)
        }
    }
}

enum CliError {
    /// Malformed input (bad word syntax, unreadable file): status 64.
    Usage(String),
    /// A library guard tripped mid-run: status 70.
    Internal(String),
}

fn usage<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Usage(e.to_string())
}

fn internal<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Internal(e.to_string())
}

fn visited_cap() -> Result<usize, CliError> {
    match std::env::var(VISITED_CAP_VAR) {
        Ok(s) => s
            .parse()
            .map_err(|_| CliError::Usage(format!("{VISITED_CAP_VAR} must be an integer, got '{s}'"))),
        Err(_) => Ok(usize::MAX),
    }
}

fn search_config(
    seed: Pair,
    max_len: usize,
    rounds: usize,
    threads: usize,
    mode: SearchMode,
) -> Result<SearchConfig, CliError> {
    let mut cfg = SearchConfig::new(seed, max_len, rounds, mode);
    cfg.threads = threads;
    cfg.visited_cap = visited_cap()?;
    Ok(cfg)
}

fn dispatch(cmd: Command) -> Result<ExitCode, CliError> {
    match cmd {
        Command::Conjugates {
            u,
            v,
            max_len,
            rounds,
        } => {
            let u = parse_word(&u).map_err(usage)?;
            let v = parse_word(&v).map_err(usage)?;
            let mut words: Vec<_> = acm_conjugates(&u, &v, max_len, rounds)
                .map_err(internal)?
                .into_iter()
                .collect();
            words.sort_by(shortlex_compare);
            for w in words {
                println!("{w}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Nf { pair, cyclic_only } => {
            let p = parse_pair(&pair).map_err(usage)?;
            let nf = if cyclic_only {
                cyclic_nf(&p)
            } else {
                full_nf(&p)
            }
            .map_err(internal)?;
            println!("{nf}");
            Ok(ExitCode::SUCCESS)
        }
        Command::Enumerate {
            seed,
            max_len,
            rounds,
            threads,
            checkpoint,
            resume,
        } => {
            let report = if let Some(path) = resume {
                let (mut cfg, state) = restore(&path).map_err(usage)?;
                cfg.threads = threads;
                cfg.visited_cap = visited_cap()?;
                cfg.checkpoint_path = checkpoint;
                run_from_state(&cfg, state, HashMap::new()).map_err(internal)?
            } else {
                let seed = parse_pair(&seed.expect("required by clap")).map_err(usage)?;
                let mut cfg = search_config(
                    seed,
                    max_len.expect("required by clap"),
                    rounds,
                    threads,
                    SearchMode::Enumerate,
                )?;
                cfg.checkpoint_path = checkpoint;
                run(&cfg).map_err(internal)?
            };
            println!("# ac enumerate tsv v1");
            for (t, n) in &report.counts {
                println!("{t}\t{n}");
            }
            if report.aborted {
                return Err(CliError::Internal("visited cap reached".into()));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Trivialize {
            seed,
            max_len,
            rounds,
            threads,
        } => {
            let seed = parse_pair(&seed).map_err(usage)?;
            let cfg = search_config(seed, max_len, rounds, threads, SearchMode::Trivialize)?;
            let report = run(&cfg).map_err(internal)?;
            if report.reached_target {
                for mv in report.witness.expect("witness accompanies success") {
                    println!("{mv}");
                }
                Ok(ExitCode::SUCCESS)
            } else {
                println!("exhausted");
                Ok(ExitCode::from(EX_EXHAUSTED))
            }
        }
        Command::Classify { relators } => {
            let text = std::fs::read_to_string(&relators).map_err(usage)?;
            println!("# ac classify tsv v1");
            for line in text.lines() {
                let entry = line.split('#').next().unwrap_or("").trim();
                if entry.is_empty() {
                    continue;
                }
                let r = parse_word(entry).map_err(usage)?;
                let (core, _) = cyclic_reduce(&r);
                let class = classify_relator(&core);
                let tag = match class.tag {
                    RelatorTag::BsType => "BS_TYPE",
                    RelatorTag::BaumslagType => "BAUMSLAG_TYPE",
                    RelatorTag::Unclassified => "UNCLASSIFIED",
                };
                let witness = match &class.witness {
                    Some(w) => format!("u={} v={} n={} m={}", w.u, w.v, w.n, w.m),
                    None => "-".to_string(),
                };
                println!("{entry}\t{tag}\t{witness}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Replay {
            script,
            k,
            seed,
            max_len,
            rounds,
        } => {
            let text = std::fs::read_to_string(&script).map_err(usage)?;
            let script = parse_script(&text).map_err(usage)?;
            let start = match seed {
                Some(s) => parse_pair(&s).map_err(usage)?,
                None => script
                    .expand_start(k)
                    .ok_or_else(|| CliError::Usage("script has no start directive; pass --seed".into()))?,
            };
            let moves = script.expand_moves(k);
            match replay(&start, &moves, max_len, rounds) {
                Ok(outcome) => {
                    println!("# ac replay tsv v1");
                    for (index, r) in &outcome.acm_rounds {
                        println!("acm-step\t{index}\t{r}");
                    }
                    println!("final\t{}", outcome.final_pair);
                    if let Some(target) = script.expand_target(k) {
                        if outcome.final_pair != target {
                            return Err(CliError::Internal(format!(
                                "final pair {} differs from script target {target}",
                                outcome.final_pair
                            )));
                        }
                    }
                    Ok(ExitCode::SUCCESS)
                }
                Err(f) => Err(CliError::Internal(format!(
                    "step {} ({}) rejected: {}",
                    f.index, f.mv, f.error
                ))),
            }
        }
    }
}

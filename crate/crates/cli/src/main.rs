use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use limitpower::descriptor::{build_quotient, AlgebraDescriptor, SystemSpec};
use limitpower::error::Error;
use limitpower::filter::{BlockBooleanAlgebra, PartitionFilter};
use limitpower::logic::corpus::{Corpus, DEFAULT_DEPTH, DEFAULT_SIZE};
use limitpower::logic::{eval_sentence, los_check, parse_formula};
use limitpower::partition::{refinement_lattice_dot, SetPartition};
use limitpower::verify;
use serde::Serialize;

#[derive(Parser)]
#[command(name = "limitpower", version, about = "Clone powers, limit reduced powers and their colimits on finite sets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite and print its report.
    #[command(subcommand)]
    Verify(Suite),
    /// Check transfer of a sentence corpus between a limit ultrapower and Ω(A).
    Los {
        /// Algebra descriptor with provenance `quotient`.
        #[arg(long)]
        power: PathBuf,
        /// Corpus file; generated from --seed when absent.
        #[arg(long)]
        corpus: Option<PathBuf>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_SIZE)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
    },
    /// Evaluate a sentence in an algebra.
    Eval {
        #[arg(long)]
        algebra: PathBuf,
        #[arg(long)]
        formula: String,
    },
    /// Generate a seeded sentence corpus.
    Corpus {
        #[arg(long)]
        base: usize,
        #[arg(long, default_value_t = DEFAULT_SIZE)]
        size: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write a Hasse diagram in DOT format.
    Export {
        #[arg(long, value_enum)]
        what: Export,
        #[arg(long)]
        out: PathBuf,
        /// Size of the index set.
        #[arg(long, default_value_t = 3)]
        index: usize,
        /// Least partition of the filter for `ba`, e.g. `01|2` or `0,1|2`;
        /// defaults to the discrete partition.
        #[arg(long)]
        partition: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Export {
    /// The refinement lattice of partitions of the index set.
    Lattice,
    /// The block Boolean algebra of a partition filter.
    Ba,
}

#[derive(Subcommand)]
enum Suite {
    /// Subalgebras of Ω(A)^I are recovered from their filter of kernels.
    Thm1 {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = 200)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Congruences of Ω(A)^F correspond to filters of the block algebra.
    Thm2 {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        index: usize,
    },
    /// Simple, subdirectly irreducible, directly indecomposable, elementary, ultra.
    Thm3 {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// φ_α is the unique homomorphism extending α.
    Free {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        gens: usize,
        #[arg(long, default_value_t = 16)]
        max_carrier: usize,
    },
    /// Induced maps, pullbacks, φ, Z-filters and connecting maps compose.
    Functor {
        #[arg(long, default_value_t = 3)]
        base: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Directed colimits map isomorphically onto their target.
    Colimit {
        /// A system descriptor; random systems are used when absent.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        systems: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Transfer for every limit ultrapower, and a non-ultra counterexample.
    Los {
        #[arg(long)]
        base: usize,
        #[arg(long)]
        index: usize,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        #[arg(long, default_value_t = DEFAULT_SIZE)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Catalog algebras Ω(A)^m have a single generator iff m ≤ |A|.
    Single {
        #[arg(long)]
        base: usize,
        #[arg(long, default_value_t = 27)]
        max_carrier: usize,
    },
}

enum Failure {
    Violation(String),
    Usage(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        match e {
            Error::ClosureViolation
            | Error::NotHomomorphism(_)
            | Error::RoundTrip(_)
            | Error::RepresentationDependence(_) => Failure::Violation(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

type Outcome = Result<bool, Failure>;

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))
}

fn emit<T: Serialize>(value: &T) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).map_err(|e| Failure::Usage(e.to_string()))?;
    println!("{text}");
    Ok(())
}

fn report(r: verify::SuiteReport) -> Outcome {
    emit(&r)?;
    Ok(r.passed())
}

fn parse_partition(text: &str, index: usize) -> Result<SetPartition, Failure> {
    let blocks: Vec<Vec<usize>> = text
        .split('|')
        .map(|b| {
            let items: Vec<&str> = if b.contains(',') {
                b.split(',').map(str::trim).collect()
            } else {
                b.trim().split("").filter(|s| !s.is_empty()).collect()
            };
            items
                .iter()
                .map(|s| s.parse::<usize>().map_err(|_| Failure::Usage(format!("bad partition element `{s}`"))))
                .collect()
        })
        .collect::<Result<_, _>>()?;
    Ok(SetPartition::from_blocks(index, &blocks)?)
}

fn run_suite(suite: Suite) -> Outcome {
    match suite {
        Suite::Thm1 { base, index, trials, seed } => report(verify::thm1(base, index, trials, seed)?),
        Suite::Thm2 { base, index } => report(verify::thm2(base, index)?),
        Suite::Thm3 { base, index, depth, seed } => report(verify::thm3(base, index, depth, seed)?),
        Suite::Free { base, gens, max_carrier } => report(verify::free(base, gens, max_carrier)?),
        Suite::Functor { base, trials, seed } => report(verify::functor(base, trials, seed)?),
        Suite::Colimit { spec: Some(path), .. } => {
            let (sys, tables) = SystemSpec::from_json(&read(&path)?)?.build()?;
            report(verify::colimit_system(&sys, &tables)?)
        }
        Suite::Colimit { spec: None, systems, seed } => report(verify::colimit_random(systems, seed)?),
        Suite::Los { base, index, depth, size, seed } => {
            let sweep = verify::los(base, index, depth, size, seed)?;
            emit(&sweep)?;
            Ok(sweep.report.passed() && sweep.necessity_witness.is_some())
        }
        Suite::Single { base, max_carrier } => report(verify::single_generated(base, max_carrier)?),
    }
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Verify(suite) => run_suite(suite),
        Command::Los { power, corpus, seed, size, depth } => {
            let d = AlgebraDescriptor::from_json(&read(&power)?)?;
            let tables = d.table_set()?;
            let lrp = build_quotient(&d.spec, &tables)?;
            let corpus = match corpus {
                Some(path) => serde_json::from_str::<Corpus>(&read(&path)?)
                    .map_err(|e| Failure::Usage(format!("{}: {e}", path.display())))?,
                None => Corpus::generate(d.spec.base(), size, depth, seed)?,
            };
            let r = los_check(&lrp, &corpus)?;
            emit(&r)?;
            Ok(r.all_transfer())
        }
        Command::Eval { algebra, formula } => {
            let d = AlgebraDescriptor::from_json(&read(&algebra)?)?;
            let (alg, _) = d.build()?;
            let registry = d.registry()?;
            let phi = parse_formula(&formula, &registry)?;
            let value = eval_sentence(&alg, &registry, &phi)?;
            emit(&serde_json::json!({
                "algebra": alg.label(),
                "carrier": alg.len(),
                "formula": phi.to_string(),
                "depth": phi.quantifier_depth(),
                "value": value,
            }))?;
            Ok(true)
        }
        Command::Corpus { base, size, depth, seed, out } => {
            let c = Corpus::generate(base, size, depth, seed)?;
            match out {
                Some(path) => {
                    let text = serde_json::to_string_pretty(&c).map_err(|e| Failure::Usage(e.to_string()))?;
                    write(&path, &text)?;
                }
                None => emit(&c)?,
            }
            Ok(true)
        }
        Command::Export { what, out, index, partition } => {
            let dot = match what {
                Export::Lattice => refinement_lattice_dot(index),
                Export::Ba => {
                    let bottom = match partition {
                        Some(p) => parse_partition(&p, index)?,
                        None => SetPartition::discrete(index),
                    };
                    BlockBooleanAlgebra::of_filter(&PartitionFilter::principal(bottom)?)?.to_dot()
                }
            };
            write(&out, &dot)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(Failure::Violation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand};

use ucycle::benign::benign_partition;
use ucycle::builders::{pair_ucycle, relabel};
use ucycle::io::{parse, serialize, CycleFile, CycleMeta, NamedCycle};
use ucycle::pipeline::{build_components, compose_k2, compose_k4, corollary_schedule};
use ucycle::search::{search_constrained, Heuristic, SearchConfig};
use ucycle::sum::{k_sum_first, summate};
use ucycle::verify::{find_benign_witness, necessary_condition};
use ucycle::weave::{product_family, WeaveSpec};
use ucycle::{is_ucycle, Alphabet, Cycle, Error};

const AFTER_HELP: &str = "\
EXIT STATUS:
    0  success
    1  a cycle failed verification, or the requested structure does not exist
    2  usage or input error
    3  search budget exhausted

ENVIRONMENT:
    UCYCLE_THREADS
        Number of concurrent search workers. Unset or 0 runs a single
        deterministic worker.
";

#[derive(Parser, Debug)]
#[command(name = "ucycle", version, about = "Build and check universal cycles on k-subsets")]
#[command(after_help = AFTER_HELP)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check that every cycle in the files is a ucycle on k-subsets
    Verify {
        #[arg(long)]
        k: usize,
        /// Number of symbols; defaults to the alphabet size
        #[arg(long)]
        n: Option<usize>,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Print the k-range (every length-k window) of each cycle
    Range {
        #[arg(long)]
        k: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// k-sum of the first two cycles found in the files
    Sum {
        #[arg(long)]
        k: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// k-summation of every cycle found in the files
    Summate {
        #[arg(long)]
        k: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Weave the first two cycles: t-blocks of C from offset c, u-blocks of D from offset d
    Weave {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        u: usize,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        c: i64,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        d: i64,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// The full weave family of the first two cycles
    Product {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        u: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Look for two equal (t-1)-windows k·Δ apart in each cycle
    BenignCheck {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        k: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Group the weave family of the first two cycles into summable classes
    BenignPartition {
        #[arg(long)]
        t: usize,
        #[arg(long)]
        u: usize,
        #[arg(required = true)]
        files: Vec<PathBuf>,
    },
    /// Write a (2,k)-benign ucycle on the 2-subsets of [n]
    BuildPairs {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rename symbols so that the window at x reads as the given tokens
    Relabel {
        #[arg(long, allow_hyphen_values = true)]
        x: i64,
        /// Whitespace-separated tokens of the new alphabet
        #[arg(long)]
        window: String,
        /// New alphabet; defaults to the input alphabet
        #[arg(long)]
        alphabet: Option<String>,
        file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Backtracking search for a ucycle on the k-subsets of [n]
    Search {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 60_000)]
        budget_ms: u64,
        /// lexicographic, random_restart or fewest_extensions
        #[arg(long, default_value = "fewest_extensions")]
        heuristic: String,
        /// Whitespace-separated symbols the cycle must start with
        #[arg(long)]
        prefix: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble a ucycle on the 2-subsets of [a+b+1]
    ComposeK2 {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Assemble a ucycle on the 4-subsets of [a+b+2] from verified base cycles
    ComposeK4 {
        #[arg(long)]
        a: usize,
        #[arg(long)]
        b: usize,
        #[arg(long, value_name = "FILE")]
        base_a: PathBuf,
        #[arg(long, value_name = "FILE")]
        base_b: PathBuf,
        #[arg(long, value_name = "FILE")]
        k3_a: PathBuf,
        #[arg(long, value_name = "FILE")]
        k3_b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print whether k divides C(n-1, k-1)
    Necessary {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        k: usize,
    },
    /// Composition steps reaching [n, 4] from [18, 4] and [26, 4]
    Schedule {
        #[arg(long)]
        n: usize,
    },
}

/// A command that ran but whose answer is negative.
#[derive(Debug)]
struct Negative(String);

impl std::fmt::Display for Negative {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Negative {}

fn negative(msg: impl Into<String>) -> anyhow::Error {
    Negative(msg.into()).into()
}

fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<Negative>().is_some() {
        return 1;
    }
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) => 3,
        Some(
            Error::VerificationFailed(_)
            | Error::NotSummable { .. }
            | Error::NoCommonWindow { .. }
            | Error::ConstraintUnsatisfied(_)
            | Error::ContractViolation(_),
        ) => 1,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn read(path: &Path) -> anyhow::Result<CycleFile> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&text).with_context(|| format!("in {}", path.display()))
}

/// Cycles of all files in order; the alphabets must agree.
fn load(paths: &[PathBuf]) -> anyhow::Result<(Alphabet, Vec<NamedCycle>)> {
    let mut alphabet: Option<Alphabet> = None;
    let mut cycles = Vec::new();
    for p in paths {
        let f = read(p)?;
        match &alphabet {
            Some(a) if *a != f.alphabet => {
                return Err(Error::AlphabetMismatch(format!("{} uses a different alphabet", p.display())).into());
            }
            Some(_) => {}
            None => alphabet = Some(f.alphabet.clone()),
        }
        cycles.extend(f.cycles);
    }
    Ok((alphabet.expect("at least one file"), cycles))
}

fn load_two(paths: &[PathBuf]) -> anyhow::Result<(Alphabet, Cycle, Cycle)> {
    let (al, cycles) = load(paths)?;
    match cycles.as_slice() {
        [c, d, ..] => Ok((al, c.cycle.clone(), d.cycle.clone())),
        _ => bail!(Error::PreconditionViolated(format!("expected two cycles, found {}", cycles.len()))),
    }
}

fn first_cycle(path: &Path) -> anyhow::Result<Cycle> {
    let f = read(path)?;
    match f.cycles.into_iter().next() {
        Some(c) => Ok(c.cycle),
        None => bail!(Error::PreconditionViolated(format!("{} contains no cycle", path.display()))),
    }
}

fn emit(file: &CycleFile, out: Option<&Path>) -> anyhow::Result<()> {
    let text = serialize(file)?;
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn numeric_file(n: usize, name: &str, cycle: Cycle, meta: CycleMeta) -> anyhow::Result<CycleFile> {
    Ok(CycleFile::new(Alphabet::numeric(n)).with(name, cycle, meta)?)
}

fn run(cmd: Command) -> anyhow::Result<()> {
    match cmd {
        Command::Verify { k, n, files } => {
            let (al, cycles) = load(&files)?;
            let n = n.unwrap_or(al.len());
            let mut failed = 0;
            for nc in &cycles {
                match is_ucycle(&nc.cycle, n, k).failure {
                    None => println!("{}: ok", nc.name),
                    Some(f) => {
                        println!("{}: {f}", nc.name);
                        failed += 1;
                    }
                }
            }
            if failed > 0 {
                return Err(negative(format!("{failed} of {} cycles are not ucycles on {k}-subsets of {n} symbols", cycles.len())));
            }
        }
        Command::Range { k, files } => {
            let (al, cycles) = load(&files)?;
            for nc in &cycles {
                println!("{}:", nc.name);
                for w in nc.cycle.k_range(k) {
                    println!("  {}", al.render(&w));
                }
            }
        }
        Command::Sum { k, files } => {
            let (al, c, d) = load_two(&files)?;
            println!("{}", al.render(k_sum_first(&c, &d, k)?.symbols()));
        }
        Command::Summate { k, files } => {
            let (al, cycles) = load(&files)?;
            let members: Vec<Cycle> = cycles.into_iter().map(|c| c.cycle).collect();
            let (e, _) = summate(&members, k)?;
            println!("{}", al.render(e.symbols()));
        }
        Command::Weave { t, u, c: co, d: doff, files } => {
            let (al, c, d) = load_two(&files)?;
            println!("{}", al.render(WeaveSpec::new(c, t, d, u, co, doff)?.weave().symbols()));
        }
        Command::Product { t, u, files } => {
            let (al, c, d) = load_two(&files)?;
            for (a, w) in product_family(&c, t, &d, u)?.iter().enumerate() {
                println!("W_{a}: {}", al.render(w.symbols()));
            }
        }
        Command::BenignCheck { t, k, files } => {
            let (_, cycles) = load(&files)?;
            let mut missing = 0;
            for nc in &cycles {
                match find_benign_witness(&nc.cycle, t, k) {
                    Some(w) => println!("{}: delta={} i={}", nc.name, w.delta, w.i),
                    None => {
                        println!("{}: none", nc.name);
                        missing += 1;
                    }
                }
            }
            if missing > 0 {
                return Err(negative(format!("{missing} cycles are not ({t},{k})-benign")));
            }
        }
        Command::BenignPartition { t, u, files } => {
            let (al, c, d) = load_two(&files)?;
            let Some(w) = find_benign_witness(&c, t, t + u) else {
                return Err(negative(format!("first cycle is not ({t},{})-benign", t + u)));
            };
            let part = benign_partition(&c, t, &d, u, &w)?;
            println!("s={} classes={} witness={},{}", part.s, part.class_count(), part.witness.delta, part.witness.i);
            for (i, pool) in part.pools()?.iter().enumerate() {
                let (e, _) = pool.summate()?;
                println!("class {i}: {}", al.render(e.symbols()));
            }
        }
        Command::BuildPairs { n, k, out } => {
            let p = pair_ucycle(n, k)?;
            let meta = CycleMeta { k: Some(2), ucycle: Some(true), witness: Some(p.witness) };
            emit(&numeric_file(n, "pairs", p.cycle, meta)?, out.as_deref())?;
        }
        Command::Relabel { x, window, alphabet, file, out } => {
            let f = read(&file)?;
            let al = match alphabet {
                Some(text) => Alphabet::new(text.split_whitespace())?,
                None => f.alphabet.clone(),
            };
            let prescribed = al.tokens(&window)?;
            let target: Vec<_> = al.symbols().collect();
            let mut result = CycleFile::new(al);
            for nc in f.cycles {
                let cycle = relabel(&nc.cycle, &prescribed, x, &target)?;
                result.push(&nc.name, cycle, nc.meta)?;
            }
            emit(&result, out.as_deref())?;
        }
        Command::Search { n, k, seed, budget_ms, heuristic, prefix, out } => {
            let mut cfg = SearchConfig::new(n, k);
            cfg.seed = seed;
            cfg.budget_ms = budget_ms;
            cfg.heuristic = heuristic.parse::<Heuristic>()?;
            let al = Alphabet::numeric(n);
            let prefix = match prefix {
                Some(p) => al.tokens(&p)?,
                None => Vec::new(),
            };
            match search_constrained(&cfg, &prefix)? {
                Some(c) => {
                    let meta = CycleMeta { k: Some(k), ucycle: Some(true), witness: None };
                    emit(&numeric_file(n, "found", c, meta)?, out.as_deref())?;
                }
                None => return Err(negative("the search space holds no such cycle")),
            }
        }
        Command::ComposeK2 { a, b, out } => {
            let c = compose_k2(a, b)?;
            let meta = CycleMeta { k: Some(2), ucycle: Some(true), witness: None };
            emit(&numeric_file(a + b + 1, "composed", c, meta)?, out.as_deref())?;
        }
        Command::ComposeK4 { a, b, base_a, base_b, k3_a, k3_b, out } => {
            let cs = build_components(a, b, &first_cycle(&base_a)?, &first_cycle(&base_b)?, &first_cycle(&k3_a)?, &first_cycle(&k3_b)?)?;
            let c = compose_k4(&cs)?;
            let meta = CycleMeta { k: Some(4), ucycle: Some(true), witness: None };
            emit(&numeric_file(a + b + 2, "composed", c, meta)?, out.as_deref())?;
        }
        Command::Necessary { n, k } => println!("{}", necessary_condition(n, k)),
        Command::Schedule { n } => {
            for (a, b) in corollary_schedule(n)? {
                println!("{a} {b} -> {}", a + b + 2);
            }
        }
    }
    Ok(())
}

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use hyperpack::{
    count_packings, exact_pack, expected_packings_bound, generate_random, pack_hypergraphs, read_edge_list,
    verify_packing, write_edge_list, BoundInputs, FailureReason, GenParams, OracleConfig, PackOutcome, PackerParams,
};
use hyperpack_lab::{lemma6_diagnostics, run_sweep_with, Engine, Format, Lemma6Params, Mode, RowSink, SweepConfig};

const EXIT_PACKER_FAILED: u8 = 2;
const EXIT_UNPACKABLE: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(name = "hyperpack", version, about = "Pack random graphs and hypergraphs")]
struct Cli {
    /// Worker threads for trial-level parallelism; defaults to all cores.
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random k-uniform hypergraph as an edge list.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pack two edge-list files with the constructive packer.
    Pack {
        g1: PathBuf,
        g2: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Whole-run retries with fresh seeds.
        #[arg(long, default_value_t = 8)]
        restarts: usize,
        #[arg(long, default_value_t = 10)]
        max_retries: usize,
        /// Orders below this are solved by the exact oracle.
        #[arg(long, default_value_t = 9)]
        oracle_fallback_n: usize,
        /// Permutation file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the edges of G1 that a permutation maps onto edges of G2.
    Verify { g1: PathBuf, g2: PathBuf, perm: PathBuf },
    /// Exact packing search or packing count for small instances.
    Oracle {
        g1: PathBuf,
        g2: PathBuf,
        /// Count all packings instead of finding one.
        #[arg(long)]
        count: bool,
        #[arg(long, default_value_t = 12)]
        limit: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Expected number of packings of two random hypergraphs.
    Bound {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[command(flatten)]
        density: Density,
    },
    /// Monte Carlo packability sweep over a density grid.
    Sweep(SweepArgs),
    /// Minimum degree and perfect matchings of random disjointness graphs.
    DiagLemma6 {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[command(flatten)]
        density: Density,
        #[arg(long, default_value_t = 0.5)]
        gamma: f64,
        #[arg(long, default_value_t = 200)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Either the product `pq` (split evenly) or the two densities.
#[derive(Args)]
struct Density {
    #[arg(long, conflicts_with_all = ["p", "q"])]
    pq: Option<f64>,
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
}

impl Density {
    fn pair(&self) -> Result<(f64, f64)> {
        match (self.pq, self.p, self.q) {
            (Some(pq), _, _) => Ok((pq.sqrt(), pq.sqrt())),
            (None, Some(p), Some(q)) => Ok((p, q)),
            _ => bail!(UsageError("give --pq, or both --p and --q".into())),
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// TOML configuration; the grid flags below are ignored when given.
    config: Option<PathBuf>,
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    n: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Grid of c with p = q = sqrt(c ln n / n^(k-1)).
    #[arg(long, num_args = 1.., value_delimiter = ',')]
    c: Vec<f64>,
    /// A single explicit point; with --q.
    #[arg(long, requires = "q")]
    p: Option<f64>,
    #[arg(long, requires = "p")]
    q: Option<f64>,
    /// A single point with p = q = sqrt(pq).
    #[arg(long, conflicts_with_all = ["p", "q"])]
    pq: Option<f64>,
    #[arg(long, default_value_t = 100)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Engine::Constructive)]
    engine: Engine,
    #[arg(long, value_enum, default_value_t = Mode::PairRandom)]
    mode: Mode,
    /// G1 for the fixed-vs-random mode.
    #[arg(long)]
    fixed_graph: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Keep rows already in --out and skip recomputing them.
    #[arg(long, requires = "out")]
    resume: bool,
}

impl SweepArgs {
    fn config(&self) -> Result<SweepConfig> {
        if let Some(path) = &self.config {
            return Ok(SweepConfig::load(path)?);
        }
        if self.n.is_empty() {
            bail!(UsageError("give a config file or --n".into()));
        }
        let mut config = SweepConfig::new(self.n.clone(), self.k, self.c.clone(), self.trials, self.seed);
        match (self.pq, self.p, self.q) {
            (Some(pq), _, _) => config.pq_pairs = vec![(pq.sqrt(), pq.sqrt())],
            (None, Some(p), Some(q)) => config.pq_pairs = vec![(p, q)],
            _ => {}
        }
        config.engine = self.engine;
        config.mode = self.mode;
        config.fixed_graph = self.fixed_graph.clone();
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug)]
struct UsageError(String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_permutation(map: &[u32], path: Option<&Path>) -> Result<()> {
    let mut out = output(path)?;
    for image in map {
        writeln!(out, "{image}")?;
    }
    out.flush()?;
    Ok(())
}

fn read_permutation(path: &Path, n: usize) -> Result<Vec<u32>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut map = Vec::with_capacity(n);
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let v: u32 = line
            .parse()
            .with_context(|| format!("{}: line {}: not a vertex: {line:?}", path.display(), i + 1))?;
        map.push(v);
    }
    if map.len() != n {
        bail!("{}: expected {n} lines, found {}", path.display(), map.len());
    }
    Ok(map)
}

fn load(path: &Path) -> Result<hyperpack::Hypergraph> {
    read_edge_list(path).with_context(|| format!("reading {}", path.display()))
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Gen { n, k, p, seed, out } => {
            let g = generate_random(&GenParams::new(n, k, p, seed))?;
            match out {
                Some(path) => write_edge_list(&g, &path)?,
                None => {
                    let mut w = BufWriter::new(io::stdout());
                    hyperpack::edgelist::write_edge_list_to(&g, &mut w)?;
                    w.flush()?;
                }
            }
            log::info!("wrote {} edges on {n} vertices", g.edge_count());
            Ok(0)
        }
        Command::Pack {
            g1,
            g2,
            seed,
            restarts,
            max_retries,
            oracle_fallback_n,
            out,
        } => {
            let (g1, g2) = (load(&g1)?, load(&g2)?);
            let params = PackerParams {
                restarts,
                max_retries,
                oracle_fallback_n,
                ..PackerParams::default()
            };
            match pack_hypergraphs(&g1, &g2, &params, seed)? {
                PackOutcome::Packed(map) => {
                    for rec in &map.stage_log {
                        log::debug!("{rec:?}");
                    }
                    write_permutation(&map.forward, out.as_deref())?;
                    Ok(0)
                }
                PackOutcome::Failed(f) => {
                    eprintln!("packing failed at stage {}: {:?}", f.stage, f.reason);
                    Ok(if f.reason == FailureReason::Unpackable {
                        EXIT_UNPACKABLE
                    } else {
                        EXIT_PACKER_FAILED
                    })
                }
            }
        }
        Command::Verify { g1, g2, perm } => {
            let (g1, g2) = (load(&g1)?, load(&g2)?);
            let map = read_permutation(&perm, g1.n())?;
            let collisions = verify_packing(&g1, &g2, &map)?;
            let mut out = BufWriter::new(io::stdout());
            for edge in &collisions {
                let text: Vec<String> = edge.iter().map(u32::to_string).collect();
                writeln!(out, "{}", text.join(" "))?;
            }
            out.flush()?;
            eprintln!("{} collisions", collisions.len());
            Ok(if collisions.is_empty() { 0 } else { EXIT_PACKER_FAILED })
        }
        Command::Oracle {
            g1,
            g2,
            count,
            limit,
            out,
        } => {
            let (g1, g2) = (load(&g1)?, load(&g2)?);
            let config = OracleConfig { limit };
            if count {
                let c = count_packings(&g1, &g2, &config)?;
                let mut w = output(out.as_deref())?;
                writeln!(w, "{c}")?;
                w.flush()?;
                return Ok(if c == 0 { EXIT_UNPACKABLE } else { 0 });
            }
            match exact_pack(&g1, &g2, &config)? {
                Some(map) => {
                    write_permutation(&map, out.as_deref())?;
                    Ok(0)
                }
                None => {
                    eprintln!("no packing exists");
                    Ok(EXIT_UNPACKABLE)
                }
            }
        }
        Command::Bound { n, k, density } => {
            let (p, q) = density.pair()?;
            let b = expected_packings_bound(&BoundInputs { n, k, pq: p * q })?;
            println!(
                "{}",
                serde_json::json!({ "n": n, "k": k, "pq": p * q, "value": b.value, "ln_value": b.ln_value })
            );
            Ok(0)
        }
        Command::Sweep(args) => {
            let config = args.config()?;
            let (mut sink, done) = match &args.out {
                Some(path) => RowSink::create(path, args.format, args.resume)?,
                None => (RowSink::new(Box::new(io::stdout()), args.format), Vec::new()),
            };
            let skip: HashSet<_> = done.iter().map(|r| r.key()).collect();
            run_sweep_with(&config, &skip, |row| sink.write(row))?;
            sink.finish()?;
            Ok(0)
        }
        Command::DiagLemma6 {
            n,
            m,
            density,
            gamma,
            trials,
            seed,
            out,
        } => {
            let (p, q) = density.pair()?;
            let report = lemma6_diagnostics(&Lemma6Params {
                n,
                m,
                p,
                q,
                gamma,
                trials,
                seed,
            })?;
            let mut w = output(out.as_deref())?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            w.flush()?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.is::<UsageError>()
                || matches!(
                    e.downcast_ref::<hyperpack_lab::LabError>(),
                    Some(hyperpack_lab::LabError::Config(_))
                )
                || matches!(
                    e.downcast_ref::<hyperpack::Error>(),
                    Some(hyperpack::Error::Parameter(_) | hyperpack::Error::OracleLimit { .. })
                );
            ExitCode::from(if usage { EXIT_USAGE } else { 1 })
        }
    }
}

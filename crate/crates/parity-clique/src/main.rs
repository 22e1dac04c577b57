use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use parity_clique::error::Error;
use parity_clique::experiments::{self, ExperimentKind};
use parity_clique::maximizer::{maximize, MaximizeOptions};
use parity_clique::recovery::{recover, Outcome, RecoveryConfig};
use parity_clique::tensor::{evaluate, Guards, TensorQuery};
use parity_clique::{plant_clique, read_instance, sample_gnp_half, write_instance};

#[derive(Parser)]
#[command(name = "parity-clique", about = "Parity-tensor laboratory for planted-clique graphs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample G(n, 1/2) and write it as an instance file.
    Gen {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Plant a clique into an existing instance file.
    Plant {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Evaluate the multilinear form on vectors read from files
    /// (one value per line); a single vector is reused for every slot.
    Eval {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long = "vector", required = true)]
        vectors: Vec<PathBuf>,
    },
    /// Heuristically maximize A(x, …, x) over the unit sphere.
    Maximize {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 100)]
        iters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Warm-start vector file.
        #[arg(long)]
        warm_start: Option<PathBuf>,
        /// Where to write the best vector found.
        #[arg(long)]
        out_vector: Option<PathBuf>,
    },
    /// Run clique recovery from a vector.
    Recover {
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        p: usize,
        #[arg(long)]
        vector: PathBuf,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Trials per prefix length (defaults to min(n², 10⁴)).
        #[arg(long)]
        budget: Option<usize>,
        /// Print per-component diagnostics.
        #[arg(long, default_value_t = false)]
        verbose: bool,
    },
    /// Run an experiment described by a key=value config file.
    Experiment {
        /// norm-scaling | recovery-threshold | concentration | oracle-suite
        kind: String,
        #[arg(long)]
        config: PathBuf,
        /// Also write a gnuplot script next to the CSV.
        #[arg(long, default_value_t = false)]
        plot: bool,
    },
    /// Run the oracle suite (or re-check a CSV) and fail on any violation.
    Verify {
        #[arg(long, default_value_t = 6)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        r: usize,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        #[arg(long, default_value_t = 100)]
        tuples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Re-derive the recomputable columns of an experiment CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// CSV kind, required with --csv.
        #[arg(long)]
        kind: Option<String>,
    },
}

fn read_vector(path: &PathBuf) -> Result<Vec<f64>, Error> {
    let text = fs::read_to_string(path)?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(
            line.parse::<f64>()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad number {line:?}") })?,
        );
    }
    Ok(out)
}

fn write_vector(path: &PathBuf, v: &[f64]) -> Result<(), Error> {
    let mut s = String::new();
    for x in v {
        s.push_str(&format!("{x}\n"));
    }
    fs::write(path, s)?;
    Ok(())
}

fn run(cli: Cli) -> Result<i32, Error> {
    match cli.command {
        Command::Gen { n, seed, out } => {
            let g = sample_gnp_half(n, seed)?;
            write_instance(&out, &g, None)?;
            println!("wrote {} (n={n}, seed={seed})", out.display());
        }
        Command::Plant { input, p, seed, out } => {
            let (g, _) = read_instance(&input)?;
            let inst = plant_clique(g, p, seed)?;
            write_instance(&out, &inst.graph, Some(&inst.clique))?;
            println!("wrote {} (p={p}, clique={:?})", out.display(), inst.clique);
        }
        Command::Eval { graph, r, vectors } => {
            let (g, _) = read_instance(&graph)?;
            let files: Vec<Vec<f64>> = vectors.iter().map(read_vector).collect::<Result<_, _>>()?;
            let slots: Vec<&[f64]> = if files.len() == 1 {
                (0..r).map(|_| files[0].as_slice()).collect()
            } else {
                files.iter().map(|v| v.as_slice()).collect()
            };
            let q = TensorQuery::new(r)?;
            let value = evaluate(&g, &q, &slots, &Guards::default())?;
            println!("{value}");
        }
        Command::Maximize {
            graph,
            r,
            restarts,
            iters,
            seed,
            warm_start,
            out_vector,
        } => {
            let (g, _) = read_instance(&graph)?;
            let mut opts = MaximizeOptions::new(seed);
            opts.restarts = restarts;
            opts.iters_per_restart = iters;
            if let Some(path) = warm_start {
                opts.init.warm_starts.push(read_vector(&path)?);
            }
            let res = maximize(&g, r, &opts)?;
            println!(
                "value={} init={} restarts={} iterations={}",
                res.value, res.init_label, res.restarts_used, res.iterations
            );
            if let Some(path) = out_vector {
                write_vector(&path, &res.x)?;
            }
        }
        Command::Recover {
            graph,
            p,
            vector,
            r,
            seed,
            budget,
            verbose,
        } => {
            let (g, _) = read_instance(&graph)?;
            let x = read_vector(&vector)?;
            let mut cfg = RecoveryConfig::default_for(g.n(), r, seed);
            if let Some(b) = budget {
                cfg.trial_budget_per_ell = b;
            }
            let report = recover(&g, p, &x, &cfg)?;
            if verbose {
                for c in &report.components {
                    eprintln!(
                        "level={} |S|={} eigenvalue={:.4} converged={} trials={}",
                        c.level, c.support_size, c.eigenvalue, c.eigen_converged, c.trials_used
                    );
                }
            }
            match report.outcome {
                Outcome::Found(c) => {
                    let joined: Vec<String> = c.iter().map(|v| v.to_string()).collect();
                    println!("FOUND {}", joined.join(","));
                }
                Outcome::Failure => println!("FAILURE"),
            }
        }
        Command::Experiment { kind, config, plot } => {
            let kind = ExperimentKind::parse(&kind)?;
            let text = fs::read_to_string(&config)?;
            let spec = experiments::parse_config(&text, Some(kind))?;
            let out = spec
                .out
                .clone()
                .ok_or_else(|| Error::InvalidArgument("config must set out=<path>".into()))?;
            let csv = experiments::run(&spec)?;
            fs::write(&out, &csv)?;
            println!("wrote {out} ({} rows)", csv.lines().count().saturating_sub(1));
            if plot {
                let script = experiments::gnuplot_script(kind, &out);
                let path = format!("{out}.gp");
                fs::write(&path, script)?;
                println!("wrote {path}");
            }
        }
        Command::Verify {
            n,
            r,
            samples,
            tuples,
            seed,
            csv,
            kind,
        } => {
            if let Some(csv_path) = csv {
                let kind = kind.ok_or_else(|| Error::InvalidArgument("--csv needs --kind".into()))?;
                let kind = ExperimentKind::parse(&kind)?;
                let content = fs::read_to_string(&csv_path)?;
                let check = experiments::check_csv(kind, &content)?;
                if check.passed() {
                    println!("PASS {} ({} rows recomputed)", csv_path.display(), check.rows);
                } else {
                    for m in &check.mismatches {
                        println!("FAIL {m}");
                    }
                    return Ok(3);
                }
            } else {
                let mut spec = experiments::ExperimentSpec::new(ExperimentKind::OracleSuite);
                spec.n_grid = vec![n];
                spec.r = r;
                spec.samples = samples;
                spec.tuples = tuples;
                spec.seed = seed;
                let rows = experiments::run_oracle_suite_checks(&spec)?;
                let mut failed = false;
                for row in &rows {
                    println!("{} {} [{}]", if row.pass { "PASS" } else { "FAIL" }, row.check, row.detail);
                    failed |= !row.pass;
                }
                if failed {
                    return Ok(3);
                }
            }
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(err) => {
            eprintln!("error: {err}");
            let code = match err {
                Error::ResourceLimit(_) => 2,
                _ => 1,
            };
            ExitCode::from(code)
        }
    }
}

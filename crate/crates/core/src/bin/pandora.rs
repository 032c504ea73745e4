use std::fs::File;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use pandora::format::{read_policy, write_policy};
use pandora::harness::corpus::ratio;
use pandora::harness::{
    gen_dt, gen_explicit, gen_mixture, gen_msscf, gen_uniform_threshold, run_corpus, Algo, CorpusConfig, CorpusReport,
    CostMode, Row,
};
use pandora::mixture::{dp_solve, mixture_pb_solve, DpConfig};
use pandora::model::{eval_dt, eval_msscf, eval_pb, eval_threshold, validate, PolicyTree};
use pandora::oracle::{opt_dt, opt_msscf, opt_pb, opt_threshold, OracleConfig};
use pandora::rational::{fmt_q, parse_q};
use pandora::reduce::{pb_phases, AnyReduction, ExactThresholdSolver, ReductionKind, Sidecar, ThresholdSolver};
use pandora::solve::{
    greedy_dt, greedy_msscf, nonadaptive_mssc_order, order_policy, pipeline_pb_direct, pipeline_pb_via_udt, DtChainSolver,
};
use pandora::{Error, Instance, Result, Q};

#[derive(Parser)]
#[command(name = "pandora", version, about = "Exact oracles, reductions and approximate solvers for Pandora's Box variants")]
struct Cli {
    /// Seed for generators and simulation.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// CSV report path (solve, pipeline, corpus).
    #[arg(long, global = true)]
    report: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Pb,
    Pbt,
    Dt,
    Udt,
    Msscf,
    Mixture,
}

#[derive(Clone, Copy, ValueEnum)]
enum PipelineName {
    Udt,
    Direct,
}

#[derive(Subcommand)]
enum Command {
    /// Write a random instance as JSON.
    Generate {
        #[arg(value_enum)]
        kind: Kind,
        #[arg(short, default_value_t = 4)]
        n: usize,
        #[arg(short, default_value_t = 4)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        support: usize,
        #[arg(long, default_value = "random")]
        cost_mode: CostMode,
        #[arg(long, default_value = "1/2")]
        epsilon: String,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Exact optimum of a small instance.
    Oracle {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run one approximate algorithm.
    Solve {
        /// greedy-msscf, nonadaptive-msscf, greedy-dt, phases-exact,
        /// pipeline-udt, pipeline-direct, or dt-chain (threshold instances).
        algo: String,
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Forward-map an instance; writes `<output>` and `<output>.sidecar.json`.
    Reduce {
        kind: ReductionKind,
        file: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Turn a policy for a forward instance back into one for its source.
    Backtranslate {
        sidecar: PathBuf,
        policy: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// End-to-end PB pipeline.
    Pipeline {
        #[arg(value_enum)]
        name: PipelineName,
        file: PathBuf,
    },
    /// Dynamic program on a mixture instance.
    MixtureSolve {
        file: PathBuf,
        #[arg(long = "T")]
        threshold: Option<String>,
        #[arg(long, default_value = "1/2")]
        beta: String,
    },
    /// Random corpus against the exact oracles.
    Corpus {
        #[arg(long, default_value_t = 200)]
        count: usize,
        #[arg(long, default_value_t = 6)]
        n_max: usize,
        #[arg(long, default_value_t = 6)]
        m_max: usize,
        /// Comma-separated algorithm names; empty for none.
        #[arg(long)]
        algos: Option<String>,
        #[arg(long)]
        no_checks: bool,
    },
}

fn emit(format: Format, text: String, value: serde_json::Value) {
    match format {
        Format::Text => println!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&value).expect("json value")),
    }
}

fn save_policy(policy: &PolicyTree, output: &Option<PathBuf>) -> Result<()> {
    if let Some(path) = output {
        write_policy(policy, path)?;
    }
    Ok(())
}

fn write_rows(path: &Path, rows: &[Row]) -> Result<()> {
    CorpusReport { rows: rows.to_vec(), ..CorpusReport::default() }.write_csv(File::create(path)?)
}

/// Expected cost of `policy` on `inst`, whatever the problem.
fn evaluate(inst: &Instance, policy: &PolicyTree) -> Result<Q> {
    match inst {
        Instance::Pb(i) => eval_pb(i, policy),
        Instance::Pbt(i) => eval_threshold(i, policy),
        Instance::Dt(i) => eval_dt(i, policy),
        Instance::Msscf(i) => eval_msscf(i, policy),
        Instance::Mixture(_) => Err(Error::Unsupported("use mixture-solve for mixture instances".into())),
    }
}

fn optimum(inst: &Instance, config: &OracleConfig) -> Result<pandora::oracle::Optimum> {
    match inst {
        Instance::Pb(i) => opt_pb(i, config),
        Instance::Pbt(i) => opt_threshold(i, config),
        Instance::Dt(i) => opt_dt(i, config),
        Instance::Msscf(i) => opt_msscf(i, config),
        Instance::Mixture(_) => Err(Error::Unsupported("no explicit oracle for mixtures".into())),
    }
}

fn read_checked(path: &Path) -> Result<Instance> {
    let inst = Instance::read(path)?;
    if let Some(v) = validate(&inst).first() {
        return Err(Error::InvalidInstance(v.to_string()));
    }
    Ok(inst)
}

fn solve_with(algo: &str, inst: &Instance) -> Result<PolicyTree> {
    let want = |kind: &str| Error::Unsupported(format!("{algo} needs a {kind} instance, got {}", inst.kind()));
    match (algo, inst) {
        ("greedy-msscf", Instance::Msscf(i)) => greedy_msscf(i),
        ("nonadaptive-msscf", Instance::Msscf(i)) => order_policy(i, &nonadaptive_mssc_order(i)?),
        ("greedy-dt", Instance::Dt(i)) => greedy_dt(i),
        ("phases-exact", Instance::Pb(i)) => Ok(pb_phases(i, &ExactThresholdSolver::default())?.tree),
        ("pipeline-udt", Instance::Pb(i)) => Ok(pipeline_pb_via_udt(i)?.tree),
        ("pipeline-direct", Instance::Pb(i)) => pipeline_pb_direct(i),
        ("dt-chain", Instance::Pbt(i)) => DtChainSolver.solve(i),
        ("greedy-msscf" | "nonadaptive-msscf", _) => Err(want("msscf")),
        ("greedy-dt", _) => Err(want("dt")),
        ("phases-exact" | "pipeline-udt" | "pipeline-direct", _) => Err(want("pb")),
        ("dt-chain", _) => Err(want("pbt")),
        _ => Err(Error::Parse(format!("unknown algorithm {algo:?}"))),
    }
}

/// Runs an algorithm and, when the oracle fits, a CSV row against it.
fn solve_row(cli: &Cli, algo: &str, inst: &Instance, run: impl FnOnce() -> Result<PolicyTree>) -> Result<(PolicyTree, Q)> {
    let start = Instant::now();
    let policy = run()?;
    let ms = start.elapsed().as_secs_f64() * 1e3;
    let cost = evaluate(inst, &policy)?;
    let oracle = optimum(inst, &OracleConfig::default()).ok().map(|o| o.cost);
    let (n, m) = inst.size();
    let text = match &oracle {
        Some(o) => format!("{algo}: cost {} (oracle {}, ratio {:.4})", fmt_q(&cost), fmt_q(o), ratio(&cost, o)),
        None => format!("{algo}: cost {} (oracle out of reach)", fmt_q(&cost)),
    };
    emit(
        cli.format,
        text,
        json!({ "algo": algo, "cost": fmt_q(&cost), "oracle": oracle.as_ref().map(fmt_q), "wall_time_ms": ms }),
    );
    if let Some(path) = &cli.report {
        let row = Row {
            instance_id: 0,
            algo: algo.to_owned(),
            n,
            m,
            algo_cost: fmt_q(&cost),
            oracle_cost: oracle.as_ref().map(fmt_q).unwrap_or_default(),
            ratio: oracle.as_ref().map(|o| ratio(&cost, o)).unwrap_or(f64::NAN),
            wall_time_ms: ms,
            exact_ok: oracle.as_ref().is_none_or(|o| &cost >= o),
        };
        write_rows(path, &[row])?;
    }
    Ok((policy, cost))
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Generate { kind, n, m, support, cost_mode, epsilon, output } => {
            let (n, m, seed) = (*n, *m, cli.seed);
            let inst: Instance = match kind {
                Kind::Pb => gen_explicit(n, m, seed, *support, *cost_mode).into(),
                Kind::Pbt => gen_uniform_threshold(n, m, seed, *support).into(),
                Kind::Dt => gen_dt(n, m, seed, *cost_mode, false).into(),
                Kind::Udt => gen_dt(n, m, seed, *cost_mode, true).into(),
                Kind::Msscf => gen_msscf(n, m, seed, *cost_mode).into(),
                Kind::Mixture => gen_mixture(n, m, seed, &parse_q(epsilon)?, *support)?.into(),
            };
            match output {
                Some(path) => inst.write(path)?,
                None => println!("{}", inst.to_json()),
            }
        }
        Command::Oracle { file, output } => {
            let inst = read_checked(file)?;
            let start = Instant::now();
            let opt = optimum(&inst, &OracleConfig::default())?;
            let ms = start.elapsed().as_secs_f64() * 1e3;
            save_policy(&opt.policy, output)?;
            emit(
                cli.format,
                format!("optimal cost {}\nstates {}\n{}", fmt_q(&opt.cost), opt.states, opt.policy.render()),
                json!({ "cost": fmt_q(&opt.cost), "states": opt.states, "wall_time_ms": ms, "policy": opt.policy }),
            );
        }
        Command::Solve { algo, file, output } => {
            let inst = read_checked(file)?;
            let (policy, _) = solve_row(cli, algo, &inst, || solve_with(algo, &inst))?;
            save_policy(&policy, output)?;
        }
        Command::Reduce { kind, file, output } => {
            let inst = read_checked(file)?;
            let red = AnyReduction::build(*kind, &inst)?;
            let fwd = red.forward_instance();
            fwd.write(output)?;
            let sidecar = Sidecar::new(*kind, &inst, &red)?;
            let side_path = PathBuf::from(format!("{}.sidecar.json", output.display()));
            std::fs::write(&side_path, serde_json::to_string_pretty(&sidecar)?)?;
            let (n, m) = fwd.size();
            emit(
                cli.format,
                format!("{kind}: forward {} instance with {n} actions, {m} scenarios\nsidecar {}", fwd.kind(), side_path.display()),
                json!({ "kind": kind.name(), "forward": output, "sidecar": side_path, "n": n, "m": m }),
            );
        }
        Command::Backtranslate { sidecar, policy, output } => {
            let side: Sidecar = serde_json::from_str(&std::fs::read_to_string(sidecar)?)?;
            let red = side.rebuild()?;
            let fwd_policy = read_policy(policy)?;
            let back = red.back_translate(&fwd_policy)?;
            let fwd_cost = evaluate(&red.forward_instance(), &fwd_policy)?;
            let src_cost = evaluate(&side.source_instance()?, &back)?;
            save_policy(&back, output)?;
            emit(
                cli.format,
                format!(
                    "forward cost {}\nsource cost {}\nclaimed: {}",
                    fmt_q(&fwd_cost),
                    fmt_q(&src_cost),
                    side.claimed_bound
                ),
                json!({ "forward_cost": fmt_q(&fwd_cost), "source_cost": fmt_q(&src_cost), "claimed_bound": side.claimed_bound }),
            );
        }
        Command::Pipeline { name, file } => {
            let inst = read_checked(file)?;
            let Instance::Pb(pb) = &inst else {
                return Err(Error::Unsupported(format!("pipelines take pb instances, got {}", inst.kind())));
            };
            match name {
                PipelineName::Udt => {
                    let mut phases = Vec::new();
                    solve_row(cli, "pipeline-udt", &inst, || {
                        let p = pipeline_pb_via_udt(pb)?;
                        phases = p.phases.iter().map(|r| (fmt_q(&r.threshold), r.removed.len(), r.copies)).collect();
                        Ok(p.tree)
                    })?;
                    if cli.format == Format::Text {
                        for (k, (t, removed, copies)) in phases.iter().enumerate() {
                            println!("  phase {k}: T = {t}, {copies} copies, removed {removed}");
                        }
                    }
                }
                PipelineName::Direct => {
                    solve_row(cli, "pipeline-direct", &inst, || pipeline_pb_direct(pb))?;
                }
            }
        }
        Command::MixtureSolve { file, threshold, beta } => {
            let inst = read_checked(file)?;
            let Instance::Mixture(mix) = &inst else {
                return Err(Error::Unsupported(format!("mixture-solve takes a mixture instance, got {}", inst.kind())));
            };
            let beta = parse_q(beta)?;
            let start = Instant::now();
            match threshold {
                Some(t) => {
                    let sol = dp_solve(mix, &parse_q(t)?, &beta, &DpConfig::default())?;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    emit(
                        cli.format,
                        format!(
                            "cost {}\ndp value {}\nstates {}\nL {:.2}\nelapsed {:.1} ms",
                            fmt_q(&sol.expected_cost),
                            fmt_q(&sol.dp_cost),
                            sol.states,
                            sol.budget,
                            ms
                        ),
                        json!({
                            "cost": fmt_q(&sol.expected_cost),
                            "dp_value": fmt_q(&sol.dp_cost),
                            "states": sol.states,
                            "L": sol.budget,
                            "elapsed_ms": ms,
                            "policy": sol.policy.tree(),
                        }),
                    );
                }
                None => {
                    let sol = mixture_pb_solve(mix, &beta, &DpConfig::default())?;
                    let ms = start.elapsed().as_secs_f64() * 1e3;
                    let ts: Vec<String> = sol.phased.phases.iter().map(|p| fmt_q(&p.threshold)).collect();
                    emit(
                        cli.format,
                        format!("PB cost {}\nphase thresholds {}\nelapsed {:.1} ms", fmt_q(&sol.cost), ts.join(", "), ms),
                        json!({ "cost": fmt_q(&sol.cost), "thresholds": ts, "elapsed_ms": ms }),
                    );
                }
            }
        }
        Command::Corpus { count, n_max, m_max, algos, no_checks } => {
            let algos = match algos {
                None => Algo::ALL.to_vec(),
                Some(s) => s.split(',').filter(|x| !x.is_empty()).map(str::parse).collect::<Result<_>>()?,
            };
            let config = CorpusConfig {
                count: *count,
                n_max: *n_max,
                m_max: *m_max,
                seed: cli.seed,
                algos,
                checks: !no_checks,
                ..CorpusConfig::default()
            };
            let report = run_corpus(&config);
            if let Some(path) = &cli.report {
                report.write_csv(File::create(path)?)?;
            }
            print!("{}", report.render_summary());
            if !report.passed() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

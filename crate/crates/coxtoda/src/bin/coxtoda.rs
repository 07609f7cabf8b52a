use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use coxtoda::cluster::{mutate, seed_init, transport, transport_path};
use coxtoda::config::Config;
use coxtoda::coxeter::{build_x, params_from_x, validate_eps, CoxeterPair, FactorParams};
use coxtoda::gbd::{sigma_all, sigma_cluster, sigma_minors, sigma_table_path, GbdRequest};
use coxtoda::io::{
    float_value, matrix_from_json, matrix_json, network_json, read_json, trajectory_json, write_trajectory_csv,
    MomentsJson, PairJson, ParamsJson, SeedJson, WeylJson,
};
use coxtoda::network::build_disk_network;
use coxtoda::toda::{moment_flow_state, rk4_flow, sup_diff, FlowState};
use coxtoda::verify::{report_json, run, VerifyOptions};
use coxtoda::weyl::{weyl_from_x, HankelCache, MomentSeq};
use coxtoda::{CoxError, Result};

#[derive(Parser)]
#[command(name = "coxtoda", version, about = "Coxeter double Bruhat cells, Hankel inversion and Coxeter-Toda flows")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build X from a pair and parameters, or recover parameters with --invert.
    Factor(FactorArgs),
    /// Recover factorization parameters from a matrix (same as `factor --invert`).
    Invert {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        matrix: PathBuf,
    },
    /// Moments H_0..H_{2n-1} and the Weyl function of X.
    Moments {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        params: PathBuf,
    },
    /// Mutate a seed along 1-based mutable directions.
    Mutate {
        /// Seed JSON: {"x": [...], "B": [[...]], "eps": [...]}.
        #[arg(long)]
        input: PathBuf,
        /// Comma-separated indices in [1, 2n-2]; index 2(i-1)+s+1 is direction (s, i).
        #[arg(long, value_delimiter = ',')]
        dirs: Vec<usize>,
    },
    /// Transport the initial seed of chart ε to chart ε′.
    Transport {
        #[arg(long, value_delimiter = ',')]
        from_eps: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        to_eps: Vec<u8>,
        /// {"H": [H_0, ..., H_{2n-1}]}
        #[arg(long)]
        moments: PathBuf,
    },
    /// Generalized Bäcklund-Darboux transformation between two charts.
    Gbd {
        #[arg(long, value_delimiter = ',')]
        from_eps: Vec<u8>,
        #[arg(long, value_delimiter = ',')]
        to_eps: Vec<u8>,
        #[arg(long)]
        params: PathBuf,
        #[arg(long, value_enum, default_value_t = Route::Cluster)]
        route: Route,
    },
    /// Integrate the k-th Coxeter-Toda flow.
    Flow(FlowArgs),
    /// The planar network of the factorization as JSON.
    DumpNetwork {
        #[arg(long)]
        pair: PathBuf,
        #[arg(long)]
        params: PathBuf,
    },
    /// Run a verification suite and print a JSON report.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        trials: Option<usize>,
        /// Overrides COXTODA_SEED and the default seed.
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(clap::Args)]
struct FactorArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long, required_unless_present = "invert")]
    params: Option<PathBuf>,
    #[arg(long, requires = "matrix")]
    invert: bool,
    #[arg(long)]
    matrix: Option<PathBuf>,
}

#[derive(clap::Args)]
struct FlowArgs {
    #[arg(long)]
    pair: PathBuf,
    #[arg(long)]
    params: PathBuf,
    #[arg(long, default_value_t = 1)]
    k: u32,
    #[arg(long, default_value_t = 1.0)]
    t_end: f64,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long, value_enum, default_value_t = Solver::Rk4)]
    solver: Solver,
    #[arg(long, value_enum, default_value_t = Emit::Csv)]
    emit: Emit,
}

#[derive(Clone, Copy, ValueEnum)]
enum Route {
    Cluster,
    Table,
    Minors,
    All,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Solver {
    Rk4,
    Moment,
    /// Both solvers; prints the sup-norm difference and conservation drifts.
    Compare,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum Emit {
    Csv,
    Json,
}

fn pair_of(path: &PathBuf) -> Result<CoxeterPair> {
    read_json::<PairJson>(path)?.to_pair()
}

fn params_of(path: &PathBuf) -> Result<FactorParams> {
    read_json::<ParamsJson>(path)?.to_params()
}

fn eps_arg(e: &[u8]) -> Result<Vec<u8>> {
    validate_eps(e)?;
    Ok(e.to_vec())
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("serializable"));
}

fn invert(pair: &PathBuf, matrix: &PathBuf) -> Result<()> {
    let pair = pair_of(pair)?;
    let x = matrix_from_json(&read_json::<Vec<Vec<String>>>(matrix)?)?;
    let p = params_from_x(&pair, &x)?;
    print(&json!({"pair": PairJson::from(&pair), "params": ParamsJson::from(&p)}));
    Ok(())
}

fn flow(a: &FlowArgs, cfg: &Config) -> Result<()> {
    let pair = pair_of(&a.pair)?;
    let start = FlowState::from_params(&pair, &params_of(&a.params)?)?;
    let dt = a.dt.unwrap_or(cfg.dt);
    let states = match a.solver {
        Solver::Rk4 => rk4_flow(&pair, &start, a.k, a.t_end, dt)?.states,
        Solver::Moment => {
            let grid = rk4_flow(&pair, &start, a.k, 0.0, dt)?;
            let steps = (a.t_end / dt).round() as usize;
            let mut out = grid.states;
            for s in 1..=steps {
                out.push(moment_flow_state(&pair, &start, a.k, a.t_end * s as f64 / steps as f64)?);
            }
            out
        }
        Solver::Compare => {
            let tr = rk4_flow(&pair, &start, a.k, a.t_end, dt)?;
            let mut diff: f64 = 0.0;
            for s in &tr.states {
                diff = diff.max(sup_diff(&moment_flow_state(&pair, &start, a.k, s.t)?, s));
            }
            let r = &tr.report;
            print(&json!({
                "sup_diff": float_value(diff),
                "f_drift": r.f_drift.iter().map(|x| float_value(*x)).collect::<Vec<_>>(),
                "det_drift": float_value(r.det_drift),
                "charpoly_drift": float_value(r.charpoly_drift),
            }));
            return Ok(());
        }
    };
    match a.emit {
        Emit::Csv => write_trajectory_csv(&pair, &states, std::io::stdout().lock()),
        Emit::Json => {
            print(&trajectory_json(&pair, &states)?);
            Ok(())
        }
    }
}

fn execute(cmd: Cmd) -> Result<bool> {
    let cfg = Config::from_env();
    match cmd {
        Cmd::Factor(a) if a.invert => invert(&a.pair, a.matrix.as_ref().expect("clap enforces --matrix"))?,
        Cmd::Factor(a) => {
            let pair = pair_of(&a.pair)?;
            let p = params_of(a.params.as_ref().expect("clap enforces --params"))?;
            let x = build_x(&pair, &p)?;
            print(&json!({"pair": PairJson::from(&pair), "params": ParamsJson::from(&p), "X": matrix_json(&x)}));
        }
        Cmd::Invert { pair, matrix } => invert(&pair, &matrix)?,
        Cmd::Moments { pair, params } => {
            let x = build_x(&pair_of(&pair)?, &params_of(&params)?)?;
            let m = MomentSeq::of(&x)?;
            print(&json!({
                "H": MomentsJson::from_seq(&m)?.h,
                "weyl": WeylJson::from(&weyl_from_x(&x)?),
            }));
        }
        Cmd::Mutate { input, dirs } => {
            let mut s = read_json::<SeedJson>(&input)?.to_seed()?;
            for k in dirs {
                if k == 0 {
                    return Err(CoxError::Argument("directions are 1-based".into()));
                }
                s = mutate(&s, k - 1)?;
            }
            print(&serde_json::to_value(SeedJson::from(&s)).expect("serializable"));
        }
        Cmd::Transport { from_eps, to_eps, moments } => {
            let (e, f) = (eps_arg(&from_eps)?, eps_arg(&to_eps)?);
            let mut cache = HankelCache::new(read_json::<MomentsJson>(&moments)?.to_seq()?);
            if cache.n() != e.len() || e.len() != f.len() {
                return Err(CoxError::Argument("ε, ε′ and the moments must share n".into()));
            }
            let path = transport_path(&e, &f)?;
            let s = transport(&seed_init(&e, &mut cache)?, &f)?;
            let moves: Vec<String> = path.iter().map(|m| format!("{m:?}")).collect();
            print(&json!({"seed": SeedJson::from(&s), "moves": moves}));
        }
        Cmd::Gbd { from_eps, to_eps, params, route } => {
            let req = GbdRequest::from_eps(&eps_arg(&from_eps)?, &eps_arg(&to_eps)?, params_of(&params)?)?;
            let out = |p: &FactorParams| serde_json::to_value(ParamsJson::from(p)).expect("serializable");
            let v = match route {
                Route::Cluster => out(&sigma_cluster(&req)?),
                Route::Table => out(&sigma_table_path(&req)?),
                Route::Minors => out(&sigma_minors(&req)?),
                Route::All => {
                    let r = sigma_all(&req)?;
                    json!({"cluster": out(&r.cluster), "table": out(&r.table), "minors": out(&r.minors), "agree": r.agree()})
                }
            };
            print(&json!({"from": PairJson::from(&req.from), "to": PairJson::from(&req.to), "params": v}));
        }
        Cmd::Flow(a) => flow(&a, &cfg)?,
        Cmd::DumpNetwork { pair, params } => {
            print(&network_json(&build_disk_network(&pair_of(&pair)?, &params_of(&params)?)?));
        }
        Cmd::Verify { suite, n, trials, seed } => {
            let mut config = cfg;
            if let Some(s) = seed {
                config.seed = s;
            }
            let reports = run(&suite, &VerifyOptions { n, trials, config })?;
            print(&report_json(&reports));
            return Ok(reports.iter().all(|r| r.passed()));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli.cmd) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if matches!(e, CoxError::NonGeneric(_)) { 2 } else { 1 })
        }
    }
}

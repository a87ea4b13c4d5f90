mod bench;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use scflp::oracle::brute_force_solve_with;
use scflp::verify::{verify_aggregation, verify_hull, verify_prop61};
use scflp::{
    generate_instance, solve, BinaryChoice, BncConfig, Formulation, GeneratorParams, GeneratorStyle, Instance,
    SolveStatus,
};

#[derive(Parser)]
#[command(name = "scflp", version, about = "Exact solver for sequential competitive facility location")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate random instances.
    Generate(GenerateArgs),
    /// Solve one instance by branch-and-cut.
    Solve(SolveArgs),
    /// Solve one instance by exhaustive enumeration.
    Oracle(OracleArgs),
    /// Run the structural checks on one instance.
    Verify(VerifyArgs),
    /// Solve a set of instances with several formulations and write CSV.
    Bench(BenchArgs),
}

#[derive(Args, Clone)]
struct GeneratorFlags {
    #[arg(long, default_value = "biesinger")]
    style: GeneratorStyle,
    #[arg(long, default_value_t = 40)]
    m: usize,
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    p: usize,
    #[arg(long, default_value_t = 2)]
    r: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl GeneratorFlags {
    fn params(&self, seed: u64) -> GeneratorParams {
        GeneratorParams { style: self.style, m: self.m, n: self.n, p: self.p, r: self.r, seed }
    }

    fn name(&self, seed: u64) -> String {
        format!("{}_m{}_n{}_p{}_r{}_s{}", self.style, self.m, self.n, self.p, self.r, seed)
    }
}

#[derive(Args)]
struct GenerateArgs {
    #[command(flatten)]
    gen: GeneratorFlags,
    /// Output file, or directory when --count is given; stdout otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Number of instances, with seeds seed, seed+1, ...
    #[arg(long)]
    count: Option<u64>,
}

#[derive(Args, Clone)]
struct SolverFlags {
    #[arg(long = "time-limit", default_value_t = 7200.0)]
    time_limit: f64,
    #[arg(long, default_value_t = 0.0)]
    gap: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl SolverFlags {
    fn config(&self, form: Formulation) -> Result<BncConfig> {
        if !(self.time_limit > 0.0 && self.time_limit.is_finite()) {
            bail!("--time-limit must be a positive number of seconds");
        }
        if !(self.gap >= 0.0) {
            bail!("--gap must be non-negative");
        }
        let mut cfg = BncConfig::new(form);
        cfg.time_limit = Duration::from_secs_f64(self.time_limit);
        cfg.gap_tol = self.gap;
        cfg.seed = self.seed;
        Ok(cfg)
    }
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value = "GSF")]
    form: Formulation,
    #[command(flatten)]
    solver: SolverFlags,
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON-lines event log.
    #[arg(long)]
    log: Option<PathBuf>,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "hull,prop61,aggregation")]
    checks: Vec<Check>,
    /// Random directions or points per check.
    #[arg(long, default_value_t = 200)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
enum Check {
    Hull,
    Prop61,
    Aggregation,
}

#[derive(Args)]
struct BenchArgs {
    /// Instance files or directories of `.scflp` files; instances are
    /// generated from the generator flags when omitted.
    #[arg(long = "in", num_args = 1..)]
    input: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "SF,GSF,EF")]
    form: Vec<Formulation>,
    #[command(flatten)]
    solver: SolverFlags,
    #[command(flatten)]
    gen: BenchGenFlags,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// CSV output; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Performance-profile data; defaults to `<out>.profile.txt` when --out is given.
    #[arg(long)]
    profile: Option<PathBuf>,
}

#[derive(Args)]
struct BenchGenFlags {
    #[arg(long, default_value = "biesinger")]
    style: GeneratorStyle,
    #[arg(long, default_value_t = 40)]
    m: usize,
    #[arg(long, default_value_t = 40)]
    n: usize,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    p: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "2,3")]
    r: Vec<usize>,
    /// Instances per (p, r) pair.
    #[arg(long, default_value_t = 1)]
    count: u64,
}

fn read_instance(path: &Path) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Instance::parse(&text).with_context(|| format!("cannot parse {}", path.display()))
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn generate(args: &GenerateArgs) -> Result<ExitCode> {
    match args.count {
        None => {
            let inst = generate_instance(&args.gen.params(args.gen.seed))?;
            emit(args.out.as_deref(), &inst.to_text())?;
        }
        Some(count) => {
            let dir = args.out.as_deref().context("--count needs --out DIR")?;
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            for seed in args.gen.seed..args.gen.seed + count {
                let inst = generate_instance(&args.gen.params(seed))?;
                let path = dir.join(format!("{}.scflp", args.gen.name(seed)));
                fs::write(&path, inst.to_text()).with_context(|| format!("cannot write {}", path.display()))?;
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn solve_cmd(args: &SolveArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.input)?;
    let mut cfg = args.solver.config(args.form)?;
    cfg.record_events = args.log.is_some();
    let rep = solve(&inst, &cfg);
    let show = |c: &Option<BinaryChoice>| c.as_ref().map_or("-".to_string(), |c| c.to_string());
    let mut text = format!("O={:.6} status={}\n", rep.objective, rep.status.as_str());
    text += &format!("formulation={} leader={} follower={}\n", rep.formulation, show(&rep.incumbent), show(&rep.follower));
    text += &format!(
        "upper_bound={:.6} gap_pct={:.4} nodes={} cuts={} lp_iterations={} pool={}\n",
        rep.upper_bound,
        rep.gap_pct(),
        rep.nodes,
        rep.cuts,
        rep.lp_iterations,
        rep.pool_size
    );
    text += &format!(
        "root_bound={:.6} root_gap_pct={} time_s={:.3} sep_time_s={:.3}\n",
        rep.root_bound,
        rep.root_gap_pct().map_or("-".to_string(), |v| format!("{v:.4}")),
        rep.total_time.as_secs_f64(),
        rep.separation_time.as_secs_f64()
    );
    if let Some(msg) = &rep.diagnostic {
        text += &format!("diagnostic={msg}\n");
    }
    emit(args.out.as_deref(), &text)?;
    if let Some(path) = &args.log {
        let lines: Vec<String> = rep.events.iter().map(serde_json::to_string).collect::<Result<_, _>>()?;
        fs::write(path, lines.join("\n") + "\n").with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(if rep.status == SolveStatus::Optimal { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn oracle_cmd(args: &OracleArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.input)?;
    let rep = brute_force_solve_with(&inst, &Default::default(), false)?;
    let mut text = format!("value={:.6}\noptimal_sets={}\n", rep.value, rep.optimal_sets.len());
    for x in &rep.optimal_sets {
        text += &format!("{x}\n");
    }
    emit(args.out.as_deref(), &text)?;
    Ok(ExitCode::SUCCESS)
}

const HULL_TOL: f64 = 1e-7;
const PROP61_TOL: f64 = 1e-10;
const LP_TOL: f64 = 1e-7;
const CLOSED_FORM_TOL: f64 = 1e-9;
const MAX_HULL_FOLLOWERS: usize = 20;

fn verify_cmd(args: &VerifyArgs) -> Result<ExitCode> {
    let inst = read_instance(&args.input)?;
    let (m, n) = (inst.m(), inst.n());
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut ys: Vec<BinaryChoice> = (0..n).combinations(inst.r()).map(|s| BinaryChoice::from_sites(n, &s)).collect();
    let mut text = String::new();
    let mut ok = true;
    let mut verdict = |pass: bool| {
        ok &= pass;
        if pass {
            "pass"
        } else {
            "FAIL"
        }
    };
    for check in args.checks.iter().copied().unique() {
        match check {
            Check::Hull => {
                if n > 10 {
                    text += "hull: skipped (needs n <= 10)\n";
                    continue;
                }
                if ys.len() > MAX_HULL_FOLLOWERS {
                    for k in 0..MAX_HULL_FOLLOWERS {
                        let pick = rng.gen_range(k..ys.len());
                        ys.swap(k, pick);
                    }
                }
                let tested = &ys[..ys.len().min(MAX_HULL_FOLLOWERS)];
                let mut worst: f64 = 0.0;
                for (t, y) in tested.iter().enumerate() {
                    worst = worst.max(verify_hull(&inst, y, args.trials, args.seed.wrapping_add(t as u64)).max_discrepancy);
                }
                text += &format!(
                    "hull: {} followers={} directions={} max_discrepancy={:.3e}\n",
                    verdict(worst < HULL_TOL),
                    tested.len(),
                    args.trials * tested.len(),
                    worst
                );
            }
            Check::Prop61 => {
                if (n as f64 + 1.0).powi(m as i32) > 1e6 {
                    text += "prop61: skipped (needs (n+1)^m <= 1e6)\n";
                    continue;
                }
                let mut worst: f64 = 0.0;
                for _ in 0..args.trials {
                    let x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
                    let y = &ys[rng.gen_range(0..ys.len())];
                    worst = worst.max(verify_prop61(&inst, &x, y));
                }
                text += &format!(
                    "prop61: {} points={} max_discrepancy={:.3e}\n",
                    verdict(worst < PROP61_TOL),
                    args.trials,
                    worst
                );
            }
            Check::Aggregation => {
                let rep = verify_aggregation(&inst, args.trials, args.seed)?;
                let pass = rep.lp_discrepancy() < LP_TOL
                    && rep.greedy_discrepancy < CLOSED_FORM_TOL
                    && rep.dual_discrepancy < CLOSED_FORM_TOL;
                text += &format!(
                    "aggregation: {} ef={:.9} disaggregated={:.9} greedy_discrepancy={:.3e} dual_discrepancy={:.3e}\n",
                    verdict(pass),
                    rep.ef_value,
                    rep.disaggregated_value,
                    rep.greedy_discrepancy,
                    rep.dual_discrepancy
                );
            }
        }
    }
    text += if ok { "all checks passed\n" } else { "some checks failed\n" };
    emit(args.out.as_deref(), &text)?;
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn run(cli: Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Generate(a) => generate(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Oracle(a) => oracle_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Bench(a) => bench::run(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

use clap::{Args, Parser, Subcommand};
use sbp_amr::adaptivity::AdaptConfig;
use sbp_amr::harness::config::Config;
use sbp_amr::harness::{
    self, ConvergenceConfig, HarnessError, ProblemKind, ProblemSpec, Solution, TimePolicy,
};
use sbp_amr::mesh::{build_named_mesh_with, Box2, Mesh, NamedMesh};
use sbp_amr::semidiscrete::{assemble, assemble_with, PenaltySet};
use sbp_amr::stability;
use sbp_amr::timestepping::{Krylov, Method};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

const CONFIG_HELP: &str = "\
Configuration file (--config): `key = value` lines, `[section]` headers, `#` comments.
Flags override file values. Recognised keys:
  mesh, order, level, levels, base_points          top level
  [problem] kind, alpha, x0, k, mass, omega, hbar, a, domain, t_final
            (alpha, x0, k, omega, a take `v` or `vx, vy`; domain takes `lo, hi`)
  [time]    dt, steps, method (rk4|lanczos), krylov_dim, krylov_tol, snapshot_every
  [adapt]   tol, tmax, dt, steps, max_level, regrid_every
Environment: SBP_AMR_THREADS sets the number of worker threads.
Exit status: 0 success, 2 threshold failure, 1 error.";

#[derive(Parser)]
#[command(name = "sbp-amr", version, about = "SBP-SAT solvers on block-adaptive 2-D grids", after_help = CONFIG_HELP)]
struct Cli {
    /// Configuration file
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Error and rate table over refinement levels
    Converge(ConvergeArgs),
    /// Propagate one problem and report errors and energy
    Simulate(SimulateArgs),
    /// Build the residual-adapted mesh and propagate on it
    Adapt(AdaptArgs),
    /// Check the semi-discrete energy estimate of an operator
    VerifyStability(StabilityArgs),
    /// Points needed by the junction and naive meshes for given errors
    CompareMesh(CompareArgs),
}

#[derive(Args)]
struct Common {
    /// fig2a, fig2b, fig2c, fig7_naive, fig7_junction, fig8a, fig8b, fig9_adapted
    #[arg(long)]
    mesh: Option<String>,
    /// schrodinger, harmonic, advection
    #[arg(long)]
    problem: Option<String>,
    /// 2, 4 or 6
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    base_points: Option<usize>,
    /// Oscillator mass
    #[arg(long)]
    mass: Option<f64>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: Common,
    /// Levels 0..=N
    #[arg(long)]
    levels: Option<u32>,
    /// Halve the time step until the final error changes by less than 1%
    #[arg(long)]
    check_dt: bool,
    /// CSV output file (default stdout)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    /// rk4 or lanczos
    #[arg(long)]
    method: Option<String>,
    #[arg(long, conflicts_with = "krylov_tol")]
    krylov_dim: Option<usize>,
    #[arg(long)]
    krylov_tol: Option<f64>,
    /// Write every N-th state to --out
    #[arg(long)]
    snapshot_every: Option<usize>,
    /// Directory for field dumps
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    mesh_in: Option<PathBuf>,
    #[arg(long)]
    mesh_out: Option<PathBuf>,
    /// Exit with status 2 if the final l2 error exceeds this
    #[arg(long)]
    max_error: Option<f64>,
}

#[derive(Args)]
struct AdaptArgs {
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    tmax: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    max_level: Option<u32>,
    #[arg(long)]
    regrid_every: Option<usize>,
    #[arg(long)]
    krylov_dim: Option<usize>,
    #[arg(long)]
    base_points: Option<usize>,
    #[arg(long)]
    mesh_out: Option<PathBuf>,
    /// Per-block indicator CSV (default stdout)
    #[arg(long)]
    indicators_out: Option<PathBuf>,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    level: Option<u32>,
    /// Negate one penalty parameter (gamma_w, tau_w, gamma_uv, tau_uv)
    #[arg(long)]
    flip: Option<String>,
    #[arg(long)]
    mesh_in: Option<PathBuf>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long)]
    order: Option<usize>,
    #[arg(long)]
    max_level: Option<u32>,
    #[arg(long)]
    base_points: Option<usize>,
}

enum Outcome {
    Ok,
    Threshold,
}

fn cfg_err(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn pick<T: std::str::FromStr>(
    flag: Option<T>,
    cfg: &Config,
    key: &str,
    default: T,
) -> Result<T, HarnessError> {
    match flag {
        Some(v) => Ok(v),
        None => cfg.get_or(key, default),
    }
}

fn problem_spec(
    common: &Common,
    cfg: &Config,
    default_kind: ProblemKind,
) -> Result<ProblemSpec, HarnessError> {
    let kind = match common
        .problem
        .as_deref()
        .or(cfg.raw("problem.kind"))
        .or(cfg.raw("problem"))
    {
        Some(s) => s.parse()?,
        None => default_kind,
    };
    let mass = pick(common.mass, cfg, "problem.mass", 1.0)?;
    let mut spec = match kind {
        ProblemKind::FreeSchrodinger => ProblemSpec::schrodinger_convergence(),
        ProblemKind::HarmonicOscillator => ProblemSpec::harmonic_oscillator(mass),
        ProblemKind::Advection => ProblemSpec::advection_convergence(),
    };
    if let Some(v) = cfg.pair("problem.alpha")? {
        spec.alpha = v;
    }
    if let Some(v) = cfg.pair("problem.x0")? {
        spec.x0 = v;
    }
    if let Some(v) = cfg.pair("problem.k")? {
        spec.k = v;
    }
    if let Some(v) = cfg.pair("problem.omega")? {
        spec.omega = v;
    }
    if let Some(v) = cfg.pair("problem.a")? {
        spec.a = v;
    }
    if let Some([lo, hi]) = cfg.pair("problem.domain")? {
        spec.domain = Box2::square(lo, hi);
    }
    spec.hbar = cfg.get_or("problem.hbar", spec.hbar)?;
    spec.t_final = cfg.get_or("problem.t_final", spec.t_final)?;
    spec.validate()?;
    Ok(spec)
}

fn mesh_name(common: &Common, cfg: &Config, default: NamedMesh) -> Result<NamedMesh, HarnessError> {
    match common.mesh.as_deref().or(cfg.raw("mesh")) {
        Some(s) => Ok(s.parse()?),
        None => Ok(default),
    }
}

fn write_or_print(path: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match path {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn load_mesh(path: &Path) -> Result<Mesh, HarnessError> {
    Ok(Mesh::from_text(&std::fs::read_to_string(path)?)?)
}

fn converge(a: &ConvergeArgs, cfg: &Config) -> Result<Outcome, HarnessError> {
    let spec = problem_spec(&a.common, cfg, ProblemKind::FreeSchrodinger)?;
    let mut c = ConvergenceConfig::new(
        mesh_name(&a.common, cfg, NamedMesh::Fig2b)?,
        spec,
        pick(a.common.order, cfg, "order", 4)?,
        pick(a.levels, cfg, "levels", 3)?,
    );
    c.base_points = pick(a.common.base_points, cfg, "base_points", 21)?;
    c.dt_check = a.check_dt || cfg.get_or("check_dt", false)?;
    let rows = harness::run_convergence(&c)?;
    write_or_print(a.out.as_deref(), &harness::convergence_csv(&rows))?;
    Ok(Outcome::Ok)
}

fn simulate(a: &SimulateArgs, cfg: &Config) -> Result<Outcome, HarnessError> {
    let spec0 = problem_spec(&a.common, cfg, ProblemKind::HarmonicOscillator)?;
    let order = pick(a.common.order, cfg, "order", 4)?;
    let mesh = match &a.mesh_in {
        Some(p) => load_mesh(p)?,
        None => build_named_mesh_with(
            mesh_name(&a.common, cfg, NamedMesh::Fig8a)?,
            pick(a.common.base_points, cfg, "base_points", 21)?,
            spec0.domain,
            pick(a.level, cfg, "level", 0)?,
            spec0.periodic,
        )?,
    };
    if let Some(p) = &a.mesh_out {
        std::fs::write(p, mesh.to_text())?;
    }
    let op = assemble(&mesh, spec0.equation(), order)?;
    let mut policy = harness::default_policy(&spec0, &op, &mesh);
    let mut spec = spec0;
    if let Some(m) = a.method.as_deref().or(cfg.raw("time.method")) {
        policy.method = match m.to_ascii_lowercase().as_str() {
            "rk4" => Method::Rk4,
            "lanczos" => Method::Lanczos,
            _ => return Err(cfg_err(format!("unknown method {m:?}"))),
        };
    }
    if let Some(k) = a.krylov_dim.or(cfg.get("time.krylov_dim")?) {
        policy.krylov = Krylov::Fixed(k);
    } else if let Some(t) = a.krylov_tol.or(cfg.get("time.krylov_tol")?) {
        policy.krylov = Krylov::Adaptive {
            tol: t,
            max_dim: 60,
        };
    }
    let dt = a.dt.or(cfg.get("time.dt")?);
    let steps = a.steps.or(cfg.get("time.steps")?);
    match (dt, steps) {
        (Some(dt), Some(n)) => {
            spec.t_final = dt * n as f64;
            policy.steps = n;
        }
        (Some(dt), None) => policy.steps = ((spec.t_final / dt).round() as usize).max(1),
        (None, Some(n)) => policy.steps = n,
        (None, None) => {}
    }
    if policy.method == Method::Lanczos && !spec.is_complex() {
        return Err(cfg_err("Lanczos needs a complex problem"));
    }
    let every = pick(a.snapshot_every, cfg, "time.snapshot_every", 0)?;
    if let Some(dir) = &a.out {
        std::fs::create_dir_all(dir)?;
        dump_snapshots(&spec, &op, &policy, every, dir)?;
    }
    let (res, _, sol) = harness::run_problem(&spec, &mesh, order, Some(policy))?;
    let n = match sol {
        Solution::Real(u) => u.len(),
        Solution::Complex(u) => u.len(),
    };
    println!("points          {n}");
    println!(
        "steps           {} (dt {:.3e})",
        res.steps,
        spec.t_final / res.steps as f64
    );
    println!("t_final         {}", spec.t_final);
    println!("l2 error        {:.6e}", res.l2);
    println!("linf error      {:.6e}", res.linf);
    println!("norm drift      {:.3e}", res.drift);
    println!("time            {:.2} s", res.seconds);
    Ok(match a.max_error {
        Some(t) if res.l2 > t => Outcome::Threshold,
        _ => Outcome::Ok,
    })
}

fn dump_snapshots(
    spec: &ProblemSpec,
    op: &sbp_amr::semidiscrete::SemiDiscreteOperator,
    policy: &TimePolicy,
    every: usize,
    dir: &Path,
) -> Result<(), HarnessError> {
    use sbp_amr::semidiscrete::C64;
    use sbp_amr::timestepping::{step_unique, PropagatorConfig};
    let e0 = spec.exact(0.0);
    let mut pc = PropagatorConfig::new(
        spec.t_final / policy.steps as f64,
        policy.steps,
        policy.method,
    );
    pc.krylov = policy.krylov;
    let write =
        |s: usize, text: String| std::fs::write(dir.join(format!("state_{s:06}.txt")), text);
    if spec.is_complex() {
        let mut u: Vec<C64> = op.layout.sample(|x, y| e0.eval(x, y));
        write(0, op.layout.dump_field(&op.layout.to_field(&u))?)?;
        for s in 1..=policy.steps {
            step_unique(op, &mut u, &pc)?;
            if s == policy.steps || (every > 0 && s % every == 0) {
                write(s, op.layout.dump_field(&op.layout.to_field(&u))?)?;
            }
        }
    } else {
        let mut u: Vec<f64> = op.layout.sample(|x, y| e0.eval(x, y).re);
        write(0, op.layout.dump_field(&op.layout.to_field(&u))?)?;
        for s in 1..=policy.steps {
            step_unique(op, &mut u, &pc)?;
            if s == policy.steps || (every > 0 && s % every == 0) {
                write(s, op.layout.dump_field(&op.layout.to_field(&u))?)?;
            }
        }
    }
    Ok(())
}

fn adapt(a: &AdaptArgs, cfg: &Config) -> Result<Outcome, HarnessError> {
    let d = AdaptConfig::default();
    let run_d = harness::AdaptiveRunConfig::default();
    let rc = harness::AdaptiveRunConfig {
        adapt: AdaptConfig {
            order: pick(a.order, cfg, "order", d.order)?,
            tol: pick(a.tol, cfg, "adapt.tol", d.tol)?,
            dt: pick(a.dt, cfg, "adapt.dt", d.dt)?,
            t_max: pick(a.tmax, cfg, "adapt.tmax", d.t_max)?,
            max_rounds: d.max_rounds,
            max_level: pick(a.max_level, cfg, "adapt.max_level", d.max_level)?,
        },
        steps: pick(a.steps, cfg, "adapt.steps", run_d.steps)?,
        base_points: pick(a.base_points, cfg, "base_points", run_d.base_points)?,
        domain: run_d.domain,
        krylov_dim: pick(a.krylov_dim, cfg, "time.krylov_dim", run_d.krylov_dim)?,
        regrid_every: pick(a.regrid_every, cfg, "adapt.regrid_every", 0)?,
    };
    let r = harness::run_adaptive(&rc)?;
    if let Some(p) = &a.mesh_out {
        std::fs::write(p, r.mesh.to_text())?;
    }
    write_or_print(
        a.indicators_out.as_deref(),
        &harness::indicator_csv(&r.indicators),
    )?;
    eprintln!("blocks          {}", r.mesh.blocks.len());
    eprintln!("points          {}", r.n_points);
    eprintln!("rounds          {}", r.rounds);
    eprintln!("level sums x/y  {} / {}", r.level_sums[0], r.level_sums[1]);
    eprintln!(
        "laplacian l2    {:.3e}  linf {:.3e}",
        r.laplacian_l2, r.laplacian_linf
    );
    eprintln!("error fixed     {:.3e}", r.error_fixed);
    eprintln!("error adaptive  {:.3e}", r.error_adaptive);
    eprintln!("residual bound  {:.3e}", r.bound);
    Ok(Outcome::Ok)
}

fn verify_stability(a: &StabilityArgs, cfg: &Config) -> Result<Outcome, HarnessError> {
    let spec = problem_spec(&a.common, cfg, ProblemKind::FreeSchrodinger)?;
    let order = pick(a.common.order, cfg, "order", 4)?;
    let mesh = match &a.mesh_in {
        Some(p) => load_mesh(p)?,
        None => build_named_mesh_with(
            mesh_name(&a.common, cfg, NamedMesh::Fig2b)?,
            pick(a.common.base_points, cfg, "base_points", 11)?,
            spec.domain,
            pick(a.level, cfg, "level", 0)?,
            [false, false],
        )?,
    };
    let advection = spec.kind == ProblemKind::Advection;
    let pen = match &a.flip {
        Some(name) => {
            let names: &[&str] = if advection {
                &PenaltySet::ADVECTION_NAMES
            } else {
                &PenaltySet::SCHRODINGER_NAMES
            };
            if !names.contains(&name.as_str()) {
                return Err(cfg_err(format!("unknown penalty {name:?}")));
            }
            PenaltySet::default().flipped(name, advection)
        }
        None => PenaltySet::default(),
    };
    let op = assemble_with(&mesh, spec.equation(), order, pen)?;
    let report = stability::check_energy_structure(&op)?;
    println!("operator        {} unknowns, order {order}", op.len());
    println!("{report}");
    Ok(if report.passed() {
        Outcome::Ok
    } else {
        Outcome::Threshold
    })
}

fn compare_mesh(a: &CompareArgs, cfg: &Config) -> Result<Outcome, HarnessError> {
    let d = harness::ComparisonConfig::default();
    let c = harness::ComparisonConfig {
        order: pick(a.order, cfg, "order", d.order)?,
        base_points: pick(a.base_points, cfg, "base_points", d.base_points)?,
        max_level: pick(a.max_level, cfg, "max_level", d.max_level)?,
        targets: d.targets,
    };
    match harness::run_mesh_comparison(&c) {
        Ok(r) => {
            print!("{}", r.table());
            Ok(Outcome::Ok)
        }
        Err(HarnessError::NotReachable(t)) => {
            eprintln!("target {t:e} not reached up to level {}", c.max_level);
            Ok(Outcome::Threshold)
        }
        Err(e) => Err(e),
    }
}

fn run(cli: &Cli) -> Result<Outcome, HarnessError> {
    let cfg = match &cli.config {
        Some(p) => Config::load(p)?,
        None => Config::default(),
    };
    if let Ok(n) = std::env::var("SBP_AMR_THREADS") {
        let n: usize = n
            .parse()
            .map_err(|_| cfg_err(format!("SBP_AMR_THREADS={n:?} is not a count")))?;
        // a second initialisation in the same process is harmless
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    match &cli.cmd {
        Cmd::Converge(a) => converge(a, &cfg),
        Cmd::Simulate(a) => simulate(a, &cfg),
        Cmd::Adapt(a) => adapt(a, &cfg),
        Cmd::VerifyStability(a) => verify_stability(a, &cfg),
        Cmd::CompareMesh(a) => compare_mesh(a, &cfg),
    }
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
    match run(&cli) {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Threshold) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

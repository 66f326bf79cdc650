//! Problem definitions, reference solutions and the drivers behind the command line.

pub mod analytic;
pub mod config;
mod problem;

pub use problem::{analytic_solution, Bump, Exact, ProblemKind, ProblemSpec};

use crate::adaptivity::{self, AdaptConfig, AdaptError, BlockIndicator, ResidualSnapshot};
use crate::mesh::{build_named_mesh_with, Box2, Mesh, MeshError, NamedMesh};
use crate::semidiscrete::{assemble, Field, Layout, Scalar, SemiDiscreteOperator, SemiError, C64};
use crate::stability::{self, StabilityError};
use crate::timestepping::{self, advection_dt, gershgorin_radius, Krylov, Method, StepError};
use std::fmt::Write as _;
use std::time::Instant;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Semi(#[from] SemiError),
    #[error(transparent)]
    Step(#[from] StepError),
    #[error(transparent)]
    Adapt(#[from] AdaptError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error("target {0:e} not reached at the allowed resolutions")]
    NotReachable(f64),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// `(ℓ2, ℓ∞)` of `f - reference`; ℓ2 in the SBP norm with shared points counted once.
pub fn error_norms<T: Scalar + std::ops::Sub<Output = T>>(
    layout: &Layout,
    f: &Field<T>,
    reference: &Field<T>,
) -> Result<(f64, f64), HarnessError> {
    if f.signature != reference.signature || f.values.len() != reference.values.len() {
        return Err(SemiError::MeshMismatch.into());
    }
    if f.signature != layout.signature || f.values.len() != layout.stored_len() {
        return Err(SemiError::MeshMismatch.into());
    }
    let w = layout.stored_weights();
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for ((a, b), w) in f.values.iter().zip(&reference.values).zip(&w) {
        let e = (*a - *b).abs();
        l2 += w * e * e;
        linf = linf.max(e);
    }
    Ok((l2.sqrt(), linf))
}

fn unique_norms<T: Scalar + std::ops::Sub<Output = T>>(
    layout: &Layout,
    u: &[T],
    r: &[T],
) -> (f64, f64) {
    let mut l2 = 0.0;
    let mut linf = 0.0f64;
    for ((a, b), w) in u.iter().zip(r).zip(&layout.weights) {
        let e = (*a - *b).abs();
        l2 += w * e * e;
        linf = linf.max(e);
    }
    (l2.sqrt(), linf)
}

/// Time integration settings of one run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimePolicy {
    pub method: Method,
    pub steps: usize,
    pub krylov: Krylov,
}

/// Advection: RK4 at `C = 0.5`. Schrödinger: Lanczos steps with `dt * rho(L) <= 25` and an
/// adaptive Krylov space, which keeps the temporal error below the spatial one.
pub fn default_policy(spec: &ProblemSpec, op: &SemiDiscreteOperator, mesh: &Mesh) -> TimePolicy {
    let t = spec.t_final;
    match spec.kind {
        ProblemKind::Advection => {
            let dt = advection_dt(mesh.min_spacing(), spec.a, 0.5);
            TimePolicy {
                method: Method::Rk4,
                steps: ((t / dt).ceil() as usize).max(1),
                krylov: Krylov::Fixed(2),
            }
        }
        _ => {
            let rho = gershgorin_radius(op);
            TimePolicy {
                method: Method::Lanczos,
                steps: ((t * rho / 25.0).ceil() as usize).max(1),
                krylov: Krylov::Adaptive {
                    tol: 1e-11,
                    max_dim: 60,
                },
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunResult {
    pub n_points: usize,
    pub steps: usize,
    pub l2: f64,
    pub linf: f64,
    /// Largest magnitude of the reference solution.
    pub max_ref: f64,
    /// Relative P-norm drift between the first and last state.
    pub drift: f64,
    pub seconds: f64,
}

/// Final state of a run in unique ordering.
#[derive(Clone, Debug)]
pub enum Solution {
    Real(Vec<f64>),
    Complex(Vec<C64>),
}

fn run_typed<T: Scalar + std::ops::Sub<Output = T>>(
    spec: &ProblemSpec,
    op: &SemiDiscreteOperator,
    policy: &TimePolicy,
) -> Result<(RunResult, Vec<T>), HarnessError> {
    let t0 = Instant::now();
    let layout = &op.layout;
    let e0 = spec.exact(0.0);
    let mut u: Vec<T> = layout.sample(|x, y| T::from_c64(e0.eval(x, y)));
    let n0 = stability::p_norm_sqr_unique(layout, &u);
    timestepping::propagate_unique(
        op,
        &mut u,
        spec.t_final,
        policy.steps,
        policy.method,
        policy.krylov,
    )?;
    let e1 = spec.exact(spec.t_final);
    let r: Vec<T> = layout.sample(|x, y| T::from_c64(e1.eval(x, y)));
    let (l2, linf) = unique_norms(layout, &u, &r);
    let n1 = stability::p_norm_sqr_unique(layout, &u);
    let res = RunResult {
        n_points: layout.unique_len(),
        steps: policy.steps,
        l2,
        linf,
        max_ref: r.iter().map(|v| v.abs()).fold(0.0, f64::max),
        drift: if n0 > 0.0 { (n1 - n0).abs() / n0 } else { 0.0 },
        seconds: t0.elapsed().as_secs_f64(),
    };
    Ok((res, u))
}

/// Propagates the problem's initial state on `mesh` to `t_final` and compares with the reference.
pub fn run_problem(
    spec: &ProblemSpec,
    mesh: &Mesh,
    order: usize,
    policy: Option<TimePolicy>,
) -> Result<(RunResult, SemiDiscreteOperator, Solution), HarnessError> {
    spec.validate()?;
    let op = assemble(mesh, spec.equation(), order)?;
    let policy = policy.unwrap_or_else(|| default_policy(spec, &op, mesh));
    if spec.is_complex() {
        let (r, u) = run_typed::<C64>(spec, &op, &policy)?;
        Ok((r, op, Solution::Complex(u)))
    } else {
        let (r, u) = run_typed::<f64>(spec, &op, &policy)?;
        Ok((r, op, Solution::Real(u)))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceRow {
    pub order: usize,
    pub level: u32,
    pub n_points: usize,
    pub l2: f64,
    pub l2_rate: Option<f64>,
    pub linf: f64,
    pub linf_rate: Option<f64>,
    pub steps: usize,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceConfig {
    pub mesh: NamedMesh,
    pub problem: ProblemSpec,
    pub order: usize,
    /// Levels `0..=levels`.
    pub levels: u32,
    pub base_points: usize,
    /// Doubles the step count until the final error changes by less than 1%.
    pub dt_check: bool,
}

impl ConvergenceConfig {
    pub fn new(mesh: NamedMesh, problem: ProblemSpec, order: usize, levels: u32) -> Self {
        ConvergenceConfig {
            mesh,
            problem,
            order,
            levels,
            base_points: 21,
            dt_check: false,
        }
    }
}

pub fn run_convergence(cfg: &ConvergenceConfig) -> Result<Vec<ConvergenceRow>, HarnessError> {
    let p = &cfg.problem;
    let mut rows: Vec<ConvergenceRow> = Vec::new();
    for level in 0..=cfg.levels {
        let mesh = build_named_mesh_with(cfg.mesh, cfg.base_points, p.domain, level, p.periodic)?;
        let (mut res, op, _) = run_problem(p, &mesh, cfg.order, None)?;
        if cfg.dt_check {
            let mut policy = default_policy(p, &op, &mesh);
            for _ in 0..4 {
                policy.steps *= 2;
                let (r2, _, _) = run_problem(p, &mesh, cfg.order, Some(policy))?;
                let change = (r2.l2 - res.l2).abs() / res.l2.max(f64::MIN_POSITIVE);
                res = r2;
                if change < 0.01 {
                    break;
                }
            }
        }
        let prev = rows.last();
        rows.push(ConvergenceRow {
            order: cfg.order,
            level,
            n_points: res.n_points,
            l2: res.l2,
            l2_rate: prev.map(|r| (r.l2 / res.l2).log2()),
            linf: res.linf,
            linf_rate: prev.map(|r| (r.linf / res.linf).log2()),
            steps: res.steps,
            seconds: res.seconds,
        });
    }
    Ok(rows)
}

pub const CONVERGENCE_HEADER: &str = "order,level,n_points,l2_error,l2_rate,linf_error,linf_rate";

pub fn convergence_csv(rows: &[ConvergenceRow]) -> String {
    let mut s = String::from(CONVERGENCE_HEADER);
    s.push('\n');
    let rate = |r: Option<f64>| r.map(|v| format!("{v:.3}")).unwrap_or_default();
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{:.6e},{},{:.6e},{}",
            r.order,
            r.level,
            r.n_points,
            r.l2,
            rate(r.l2_rate),
            r.linf,
            rate(r.linf_rate)
        );
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonConfig {
    pub order: usize,
    pub base_points: usize,
    /// Levels `0..=max_level` are tried on both meshes.
    pub max_level: u32,
    pub targets: Vec<f64>,
}

impl Default for ComparisonConfig {
    fn default() -> Self {
        ComparisonConfig {
            order: 4,
            base_points: 21,
            max_level: 3,
            targets: vec![1e-1, 1e-2, 1e-3],
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComparisonRow {
    pub target: f64,
    pub junction_points: usize,
    pub naive_points: usize,
}

impl ComparisonRow {
    /// `1 - junction / naive`.
    pub fn reduction(&self) -> f64 {
        1.0 - self.junction_points as f64 / self.naive_points as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeshComparison {
    pub rows: Vec<ComparisonRow>,
    /// `(level, points, relative max error)` per mesh.
    pub junction_runs: Vec<(u32, usize, f64)>,
    pub naive_runs: Vec<(u32, usize, f64)>,
}

impl MeshComparison {
    pub fn table(&self) -> String {
        let mut s = String::from("target,junction_points,naive_points,reduction\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{:e},{},{},{:.3}",
                r.target,
                r.junction_points,
                r.naive_points,
                r.reduction()
            );
        }
        s
    }
}

/// Point counts needed by the junction and naive meshes to reach relative max errors.
pub fn run_mesh_comparison(cfg: &ComparisonConfig) -> Result<MeshComparison, HarnessError> {
    let spec = ProblemSpec::mesh_comparison();
    let runs = |name: NamedMesh| -> Result<Vec<(u32, usize, f64)>, HarnessError> {
        let mut out = Vec::new();
        let mut tmin = f64::INFINITY;
        for level in 0..=cfg.max_level {
            let mesh =
                build_named_mesh_with(name, cfg.base_points, spec.domain, level, spec.periodic)?;
            let (r, _, _) = run_problem(&spec, &mesh, cfg.order, None)?;
            let rel = r.linf / r.max_ref;
            out.push((level, mesh.unique_point_count()?, rel));
            tmin = tmin.min(rel);
            if cfg.targets.iter().all(|&t| tmin <= t) {
                break;
            }
        }
        Ok(out)
    };
    let junction_runs = runs(NamedMesh::Fig7Junction)?;
    let naive_runs = runs(NamedMesh::Fig7Naive)?;
    let first = |runs: &[(u32, usize, f64)], t: f64| {
        runs.iter()
            .find(|r| r.2 <= t)
            .map(|r| r.1)
            .ok_or(HarnessError::NotReachable(t))
    };
    let rows = cfg
        .targets
        .iter()
        .map(|&t| {
            Ok(ComparisonRow {
                target: t,
                junction_points: first(&junction_runs, t)?,
                naive_points: first(&naive_runs, t)?,
            })
        })
        .collect::<Result<Vec<_>, HarnessError>>()?;
    Ok(MeshComparison {
        rows,
        junction_runs,
        naive_runs,
    })
}

/// Settings of the adapted-mesh experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveRunConfig {
    pub adapt: AdaptConfig,
    pub steps: usize,
    pub base_points: usize,
    pub domain: Box2,
    pub krylov_dim: usize,
    /// Regrid after this many steps; 0 keeps the initial mesh.
    pub regrid_every: usize,
}

impl Default for AdaptiveRunConfig {
    fn default() -> Self {
        AdaptiveRunConfig {
            adapt: AdaptConfig::default(),
            steps: 100,
            base_points: 21,
            domain: Box2::square(-6.0, 6.0),
            krylov_dim: 30,
            regrid_every: 0,
        }
    }
}

#[derive(Clone, Debug)]
pub struct AdaptiveReport {
    pub mesh: Mesh,
    pub rounds: usize,
    pub indicators: Vec<BlockIndicator>,
    /// Sum over blocks of the refinement level in x and in y.
    pub level_sums: [u32; 2],
    pub n_points: usize,
    pub laplacian_l2: f64,
    pub laplacian_linf: f64,
    pub error_fixed: f64,
    pub error_adaptive: f64,
    pub bound: f64,
    pub seconds: f64,
}

/// `Laplacian u0` of the packet in [`ProblemSpec::adaptive_packet`] (`k_x = 0`).
fn packet_laplacian(spec: &ProblemSpec, x: f64, y: f64) -> C64 {
    let e = spec.exact(0.0).eval(x, y);
    let term = |d: usize, s: f64| {
        let g = C64::new(-2.0 * spec.alpha[d] * (s - spec.x0[d]), spec.k[d]);
        g * g - 2.0 * spec.alpha[d]
    };
    e * (term(0, x) + term(1, y))
}

/// Mesh generation, Laplacian check and propagation with fixed and adaptive Krylov spaces.
pub fn run_adaptive(cfg: &AdaptiveRunConfig) -> Result<AdaptiveReport, HarnessError> {
    let t0 = Instant::now();
    let mut spec = ProblemSpec::adaptive_packet();
    spec.domain = cfg.domain;
    spec.t_final = cfg.adapt.dt * cfg.steps as f64;
    let eq = spec.equation();
    let u0 = spec.exact(0.0);
    let start = Mesh::uniform(cfg.domain, [4, 4], [cfg.base_points; 2], [false, false])?;
    let (mesh, rounds) = adaptivity::initial_mesh(&start, &eq, &cfg.adapt, |x, y| u0.eval(x, y))?;
    let order = cfg.adapt.order;
    let layout = Layout::new(&mesh, order)?;
    let f0 = layout.sample_field(|x, y| u0.eval(x, y));
    let res = adaptivity::compute_residual(&f0, &mesh, &eq, order)?;
    let indicators =
        adaptivity::flag_blocks(&res, &mesh, cfg.adapt.tol, cfg.adapt.dt, cfg.adapt.t_max)?;

    let op = assemble(&mesh, eq, order)?;
    let u: Vec<C64> = op.layout.sample(|x, y| u0.eval(x, y));
    let lap = op.m.mul_vec(&u);
    let lref: Vec<C64> = op.layout.sample(|x, y| packet_laplacian(&spec, x, y));
    let (laplacian_l2, laplacian_linf) = unique_norms(&op.layout, &lap, &lref);

    let exact: Vec<C64> = {
        let e = spec.exact(spec.t_final);
        op.layout.sample(|x, y| e.eval(x, y))
    };
    let mut history = Vec::with_capacity(cfg.steps);
    let mut mesh_now = mesh.clone();
    let mut op_now = op.clone();
    let mut v = u.clone();
    for step in 0..cfg.steps {
        timestepping::step_unique(&op_now, &mut v, &fixed_cfg(cfg, 1))?;
        let f = op_now.layout.to_field(&v);
        let r = adaptivity::compute_residual(&f, &mesh_now, &eq, order)?;
        let (residual, volume) = r.bound_terms(&mesh_now)?;
        history.push(ResidualSnapshot {
            dt: cfg.adapt.dt,
            residual,
            volume,
        });
        if cfg.regrid_every > 0 && (step + 1) % cfg.regrid_every == 0 && step + 1 < cfg.steps {
            let mut flags = adaptivity::flag_blocks(
                &r,
                &mesh_now,
                cfg.adapt.tol,
                cfg.adapt.dt,
                cfg.adapt.t_max,
            )?;
            for b in &mut flags {
                let lv = mesh_now.block(b.block_id).map_err(AdaptError::from)?.level;
                for d in 0..2 {
                    b.flagged[d] &= lv[d] < cfg.adapt.max_level;
                }
            }
            let (m2, f2) = adaptivity::adapt(&mesh_now, &f, &flags, order)?;
            op_now = assemble(&m2, eq, order)?;
            v = op_now.layout.to_unique(&f2)?;
            mesh_now = m2;
        }
    }
    let error_fixed = if cfg.regrid_every == 0 {
        unique_norms(&op.layout, &v, &exact).0
    } else {
        let e = spec.exact(spec.t_final);
        let r: Vec<C64> = op_now.layout.sample(|x, y| e.eval(x, y));
        unique_norms(&op_now.layout, &v, &r).0
    };
    let mut w = u;
    timestepping::propagate_unique(
        &op,
        &mut w,
        spec.t_final,
        cfg.steps,
        Method::Lanczos,
        Krylov::Adaptive {
            tol: cfg.adapt.tol,
            max_dim: 60,
        },
    )?;
    let error_adaptive = unique_norms(&op.layout, &w, &exact).0;
    let level_sums = mesh
        .blocks
        .iter()
        .fold([0, 0], |s, b| [s[0] + b.level[0], s[1] + b.level[1]]);
    Ok(AdaptiveReport {
        n_points: op.len(),
        mesh,
        rounds,
        indicators,
        level_sums,
        laplacian_l2,
        laplacian_linf,
        error_fixed,
        error_adaptive,
        bound: adaptivity::accumulate_bound(&history),
        seconds: t0.elapsed().as_secs_f64(),
    })
}

fn fixed_cfg(cfg: &AdaptiveRunConfig, steps: usize) -> timestepping::PropagatorConfig {
    let mut p = timestepping::PropagatorConfig::new(cfg.adapt.dt, steps, Method::Lanczos);
    p.krylov = Krylov::Fixed(cfg.krylov_dim);
    p
}

/// Per-block indicator table `block,dim,indicator,flagged`.
pub fn indicator_csv(ind: &[BlockIndicator]) -> String {
    let mut s = String::from("block,dim,indicator,flagged\n");
    for b in ind {
        for d in 0..2 {
            let _ = writeln!(
                s,
                "{},{},{:.6e},{}",
                b.block_id, d, b.indicator[d], b.flagged[d] as u8
            );
        }
    }
    s
}

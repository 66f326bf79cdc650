//! Classical RK4 and a Lanczos approximation of the exponential in the SBP inner
//! product. Both work on unique point values; fields are synced by construction.

use crate::semidiscrete::{Equation, Field, Scalar, SemiDiscreteOperator, SemiError, C64};
use nalgebra::{DMatrix, SymmetricEigen};
use num_traits::Zero;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StepError {
    #[error(transparent)]
    Semi(#[from] SemiError),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("operator is not self-adjoint in the SBP norm (asymmetry {0:e})")]
    NotHermitian(f64),
    #[error("Krylov space of dimension {dim} did not reach tolerance (estimate {estimate:e})")]
    NotConverged { dim: usize, estimate: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Rk4,
    Lanczos,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Krylov {
    Fixed(usize),
    /// Grow the space until the a-posteriori estimate per unit norm is below `tol`.
    Adaptive {
        tol: f64,
        max_dim: usize,
    },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PropagatorConfig {
    pub dt: f64,
    pub n_steps: usize,
    pub method: Method,
    pub krylov: Krylov,
    /// Keep every n-th state (0: only the first and last).
    pub snapshot_every: usize,
    pub reorthogonalize: bool,
}

impl PropagatorConfig {
    pub fn new(dt: f64, n_steps: usize, method: Method) -> Self {
        PropagatorConfig {
            dt,
            n_steps,
            method,
            krylov: Krylov::Adaptive {
                tol: 1e-12,
                max_dim: 60,
            },
            snapshot_every: 0,
            reorthogonalize: true,
        }
    }

    pub fn validate(&self) -> Result<(), StepError> {
        if !(self.dt >= 0.0) || !self.dt.is_finite() {
            return Err(StepError::Config(format!(
                "dt must be non-negative, got {}",
                self.dt
            )));
        }
        match self.krylov {
            Krylov::Fixed(k) if k < 2 => Err(StepError::Config(
                "fixed Krylov dimension must be >= 2".into(),
            )),
            Krylov::Adaptive { tol, max_dim } if !(tol > 0.0) || max_dim < 2 => Err(
                StepError::Config("adaptive Krylov needs tol > 0 and max_dim >= 2".into()),
            ),
            _ => Ok(()),
        }
    }
}

/// Bound on the spectral radius of the real operator part (largest absolute row sum).
pub fn gershgorin_radius(op: &SemiDiscreteOperator) -> f64 {
    (0..op.m.nrows)
        .map(|i| op.m.row(i).map(|(_, v)| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Default advection step `c h_min / (|a1| + |a2|)`.
pub fn advection_dt(h_min: f64, a: [f64; 2], c: f64) -> f64 {
    c * h_min / (a[0].abs() + a[1].abs())
}

fn axpy<T: Scalar>(y: &mut [T], a: f64, x: &[T]) {
    y.par_iter_mut()
        .zip(x.par_iter())
        .for_each(|(y, &x)| *y += x * a);
}

/// One classical RK4 step in unique space.
pub fn rk4_step_unique<T: Scalar>(
    op: &SemiDiscreteOperator,
    u: &mut [T],
    dt: f64,
) -> Result<(), SemiError> {
    let n = u.len();
    let mut k = vec![T::zero(); n];
    let mut stage = u.to_vec();
    let mut acc = u.to_vec();
    for (s, (a, b)) in [
        (0.5, 1.0 / 6.0),
        (0.5, 1.0 / 3.0),
        (1.0, 1.0 / 3.0),
        (0.0, 1.0 / 6.0),
    ]
    .into_iter()
    .enumerate()
    {
        op.apply_unique(&stage, &mut k)?;
        axpy(&mut acc, b * dt, &k);
        if s < 3 {
            stage.copy_from_slice(u);
            axpy(&mut stage, a * dt, &k);
        }
    }
    u.copy_from_slice(&acc);
    Ok(())
}

pub fn rk4_step<T: Scalar>(
    op: &SemiDiscreteOperator,
    f: &Field<T>,
    dt: f64,
) -> Result<Field<T>, SemiError> {
    let mut u = op.layout.to_unique(f)?;
    rk4_step_unique(op, &mut u, dt)?;
    Ok(op.layout.to_field(&u))
}

fn pdot(w: &[f64], a: &[C64], b: &[C64]) -> C64 {
    a.par_iter()
        .zip(b.par_iter())
        .zip(w.par_iter())
        .map(|((x, y), &p)| x.conj() * y * p)
        .reduce(C64::zero, |s, t| s + t)
}

fn pnorm(w: &[f64], a: &[C64]) -> f64 {
    a.par_iter()
        .zip(w.par_iter())
        .map(|(x, &p)| x.norm_sqr() * p)
        .sum::<f64>()
        .sqrt()
}

/// Result of a Lanczos step with diagnostics.
#[derive(Clone, Debug)]
pub struct LanczosStats {
    pub dim: usize,
    pub estimate: f64,
    pub breakdown: bool,
    /// Largest |<q_i, q_j>_P - delta_ij| of the basis.
    pub orthogonality: f64,
}

/// `exp(i tau T) e1` for a real symmetric tridiagonal `T`.
fn expm_tridiag(alpha: &[f64], beta: &[f64], tau: f64) -> Vec<C64> {
    let k = alpha.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alpha[i];
        if i + 1 < k {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = SymmetricEigen::new(t);
    (0..k)
        .map(|i| {
            (0..k)
                .map(|j| {
                    let q = eig.eigenvectors[(i, j)] * eig.eigenvectors[(0, j)];
                    C64::from_polar(q, tau * eig.eigenvalues[j])
                })
                .sum()
        })
        .collect()
}

/// `exp(dt L) u` for a Schrödinger operator, with a Lanczos basis orthonormal in the
/// SBP norm.
pub fn lanczos_expm_unique(
    op: &SemiDiscreteOperator,
    u: &[C64],
    dt: f64,
    krylov: Krylov,
    reorthogonalize: bool,
) -> Result<(Vec<C64>, LanczosStats), StepError> {
    let hbar = match op.equation {
        Equation::Schrodinger { hbar, .. } => hbar,
        _ => {
            return Err(StepError::Config(
                "Lanczos needs a Schrödinger operator".into(),
            ))
        }
    };
    let w = &op.layout.weights;
    let beta0 = pnorm(w, u);
    let none = LanczosStats {
        dim: 0,
        estimate: 0.0,
        breakdown: false,
        orthogonality: 0.0,
    };
    if dt == 0.0 || beta0 == 0.0 {
        return Ok((u.to_vec(), none));
    }
    let tau = dt / hbar;
    let (max_dim, tol) = match krylov {
        Krylov::Fixed(k) => (k, None),
        Krylov::Adaptive { tol, max_dim } => (max_dim, Some(tol)),
    };
    let n = u.len();
    let mut q: Vec<Vec<C64>> = vec![u.iter().map(|x| x / beta0).collect()];
    let (mut alpha, mut beta) = (Vec::new(), Vec::new());
    let mut v = vec![C64::zero(); n];
    let mut result = None;
    let mut breakdown = false;
    let mut estimate = f64::INFINITY;
    for j in 0..max_dim {
        op.m.apply(&q[j], &mut v);
        let a = pdot(w, &q[j], &v);
        if a.im.abs() > 1e-8 * (1.0 + a.re.abs()) {
            return Err(StepError::NotHermitian(a.im.abs()));
        }
        alpha.push(a.re);
        let (qj, qprev) = (&q[j], if j > 0 { Some(&q[j - 1]) } else { None });
        let bprev = if j > 0 { beta[j - 1] } else { 0.0 };
        v.par_iter_mut().enumerate().for_each(|(i, x)| {
            *x -= qj[i] * a.re;
            if let Some(p) = qprev {
                *x -= p[i] * bprev;
            }
        });
        if reorthogonalize {
            for _ in 0..2 {
                for qi in &q {
                    let c = pdot(w, qi, &v);
                    v.par_iter_mut()
                        .zip(qi.par_iter())
                        .for_each(|(x, y)| *x -= y * c);
                }
            }
        }
        let b = pnorm(w, &v);
        let y = expm_tridiag(&alpha, &beta, tau);
        estimate = b * y[j].norm();
        let done = match tol {
            Some(t) => estimate <= t,
            None => j + 1 == max_dim,
        };
        if b <= 1e-13 * alpha.iter().fold(1.0f64, |m, x| m.max(x.abs())) {
            breakdown = true;
            result = Some(y);
            break;
        }
        if done {
            result = Some(y);
            break;
        }
        beta.push(b);
        q.push(v.iter().map(|x| x / b).collect());
    }
    let Some(y) = result else {
        return Err(StepError::NotConverged {
            dim: max_dim,
            estimate,
        });
    };
    let mut out = vec![C64::zero(); n];
    for (k, qk) in q.iter().enumerate().take(y.len()) {
        let c = y[k] * beta0;
        out.par_iter_mut()
            .zip(qk.par_iter())
            .for_each(|(o, x)| *o += x * c);
    }
    let dim = y.len();
    let mut orth: f64 = 0.0;
    if n * dim * dim <= 50_000_000 {
        for i in 0..dim {
            for j in 0..=i {
                let d = pdot(w, &q[i], &q[j])
                    - if i == j {
                        C64::new(1.0, 0.0)
                    } else {
                        C64::zero()
                    };
                orth = orth.max(d.norm());
            }
        }
    }
    Ok((
        out,
        LanczosStats {
            dim,
            estimate,
            breakdown,
            orthogonality: orth,
        },
    ))
}

pub fn lanczos_expm_step(
    op: &SemiDiscreteOperator,
    f: &Field<C64>,
    dt: f64,
    cfg: &PropagatorConfig,
) -> Result<Field<C64>, StepError> {
    let u = op.layout.to_unique(f)?;
    let (v, _) = lanczos_expm_unique(op, &u, dt, cfg.krylov, cfg.reorthogonalize)?;
    Ok(op.layout.to_field(&v))
}

/// Repeated steps; returns the first state, every `snapshot_every`-th state and the last.
pub fn propagate<T: Scalar>(
    op: &SemiDiscreteOperator,
    f0: &Field<T>,
    cfg: &PropagatorConfig,
) -> Result<Vec<Field<T>>, StepError> {
    cfg.validate()?;
    let mut u = op.layout.to_unique(f0)?;
    let mut out = vec![f0.clone()];
    for s in 1..=cfg.n_steps {
        step_unique(op, &mut u, cfg)?;
        if s == cfg.n_steps || (cfg.snapshot_every > 0 && s % cfg.snapshot_every == 0) {
            out.push(op.layout.to_field(&u));
        }
    }
    Ok(out)
}

/// One step of the configured method in unique space.
pub fn step_unique<T: Scalar>(
    op: &SemiDiscreteOperator,
    u: &mut [T],
    cfg: &PropagatorConfig,
) -> Result<(), StepError> {
    match cfg.method {
        Method::Rk4 => rk4_step_unique(op, u, cfg.dt)?,
        Method::Lanczos => {
            if !T::COMPLEX {
                return Err(StepError::Config("Lanczos needs a complex field".into()));
            }
            let z: Vec<C64> = u.iter().map(|x| x.to_c64()).collect();
            let (v, _) = lanczos_expm_unique(op, &z, cfg.dt, cfg.krylov, cfg.reorthogonalize)?;
            for (a, b) in u.iter_mut().zip(v) {
                *a = T::from_c64(b);
            }
        }
    }
    Ok(())
}

/// Propagates unique values to time `t_final` with `n_steps` equal steps.
pub fn propagate_unique<T: Scalar>(
    op: &SemiDiscreteOperator,
    u: &mut [T],
    t_final: f64,
    n_steps: usize,
    method: Method,
    krylov: Krylov,
) -> Result<(), StepError> {
    let mut cfg = PropagatorConfig::new(
        if n_steps == 0 {
            0.0
        } else {
            t_final / n_steps as f64
        },
        n_steps,
        method,
    );
    cfg.krylov = krylov;
    for _ in 0..n_steps {
        step_unique(op, u, &cfg)?;
    }
    Ok(())
}

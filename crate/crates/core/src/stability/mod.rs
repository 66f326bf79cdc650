//! Numerical checks of the semi-discrete energy estimates.
//!
//! With `L = (i/hbar) M` and `M` real, `P L + (P L)^*` equals `(i/hbar)(P M - (P M)^T)`, so the
//! Schrödinger check is the skew-symmetry of the weighted real operator. For advection the
//! symmetric part `P M + (P M)^T` must be negative semidefinite.

use crate::semidiscrete::{Equation, Field, Layout, Scalar, SemiDiscreteOperator, SemiError};
use nalgebra::{DMatrix, SymmetricEigen};
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

pub const SKEW_TOL: f64 = 1e-12;
pub const EIG_TOL: f64 = 1e-10;
pub const DRIFT_TOL: f64 = 1e-10;
/// Largest symmetric block handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 6000;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("dense check needs {0} unknowns, limit is {DENSE_LIMIT}")]
    TooLarge(usize),
    #[error("empty trajectory")]
    Empty,
    #[error("initial state has zero norm")]
    ZeroNorm,
    #[error(transparent)]
    Semi(#[from] SemiError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StabilityReport {
    /// Largest entry of `|P L + (P L)^*|` (Schrödinger).
    pub skew_deviation: Option<f64>,
    /// Largest eigenvalue of `P L + (P L)^T` (advection).
    pub max_sym_eig: Option<f64>,
    pub energy_drift: Option<f64>,
    pub verdict: Verdict,
}

impl StabilityReport {
    fn judge(mut self) -> Self {
        let ok = self.skew_deviation.map_or(true, |s| s <= SKEW_TOL)
            && self.max_sym_eig.map_or(true, |e| e <= EIG_TOL)
            && self.energy_drift.map_or(true, |d| d <= DRIFT_TOL);
        self.verdict = if ok { Verdict::Pass } else { Verdict::Fail };
        self
    }

    /// Adds a drift measurement and re-evaluates the verdict.
    pub fn with_drift(mut self, drift: f64) -> Self {
        self.energy_drift = Some(drift);
        self.judge()
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

impl fmt::Display for StabilityReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.skew_deviation {
            writeln!(f, "skew deviation   {s:.3e} (tol {SKEW_TOL:e})")?;
        }
        if let Some(e) = self.max_sym_eig {
            writeln!(f, "max sym eigval   {e:.3e} (tol {EIG_TOL:e})")?;
        }
        if let Some(d) = self.energy_drift {
            writeln!(f, "energy drift     {d:.3e} (tol {DRIFT_TOL:e})")?;
        }
        write!(f, "{}", if self.passed() { "PASS" } else { "FAIL" })
    }
}

pub fn check_energy_structure(
    op: &SemiDiscreteOperator,
) -> Result<StabilityReport, StabilityError> {
    let n = op.len();
    if n > 4 * DENSE_LIMIT {
        return Err(StabilityError::TooLarge(n));
    }
    let pm = op.weighted();
    let pmt = pm.transpose();
    let report = match op.equation {
        Equation::Schrodinger { hbar, .. } => {
            let mut dev = 0.0f64;
            for i in 0..n {
                for (j, v) in pm.row(i) {
                    dev = dev.max((v - pmt.get(i, j)).abs());
                }
                for (j, v) in pmt.row(i) {
                    dev = dev.max((v - pm.get(i, j)).abs());
                }
            }
            StabilityReport {
                skew_deviation: Some(dev / hbar),
                max_sym_eig: None,
                energy_drift: None,
                verdict: Verdict::Pass,
            }
        }
        Equation::Advection { .. } => StabilityReport {
            skew_deviation: None,
            max_sym_eig: Some(max_sym_eig(&pm, &pmt)?),
            energy_drift: None,
            verdict: Verdict::Pass,
        },
    };
    Ok(report.judge())
}

/// Largest eigenvalue of `A + A^T`, restricted to rows and columns where it has entries.
/// Zero rows contribute eigenvalue 0.
fn max_sym_eig(a: &crate::sparse::Csr, at: &crate::sparse::Csr) -> Result<f64, StabilityError> {
    let n = a.nrows;
    let mut entries = Vec::new();
    let mut support = BTreeSet::new();
    for i in 0..n {
        let mut row: Vec<(usize, f64)> = a.row(i).chain(at.row(i)).collect();
        row.sort_by_key(|e| e.0);
        let mut k = 0;
        while k < row.len() {
            let j = row[k].0;
            let mut v = 0.0;
            while k < row.len() && row[k].0 == j {
                v += row[k].1;
                k += 1;
            }
            if v != 0.0 {
                entries.push((i, j, v));
                support.insert(i);
            }
        }
    }
    if support.is_empty() {
        return Ok(0.0);
    }
    if support.len() > DENSE_LIMIT {
        return Err(StabilityError::TooLarge(support.len()));
    }
    let pos: std::collections::HashMap<usize, usize> =
        support.iter().enumerate().map(|(k, &i)| (i, k)).collect();
    let m = support.len();
    let mut d = DMatrix::<f64>::zeros(m, m);
    for (i, j, v) in entries {
        d[(pos[&i], pos[&j])] = v;
    }
    let eig = SymmetricEigen::new(d).eigenvalues;
    let top = eig.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // rows outside the support give zero eigenvalues
    Ok(if m < n { top.max(0.0) } else { top })
}

/// `||u||_P^2` of a field, with shared points counted once.
pub fn p_norm_sqr<T: Scalar>(layout: &Layout, f: &Field<T>) -> Result<f64, SemiError> {
    let w = layout.stored_weights();
    if f.values.len() != w.len() || f.signature != layout.signature {
        return Err(SemiError::MeshMismatch);
    }
    Ok(f.values.iter().zip(&w).map(|(v, w)| v.norm_sqr() * w).sum())
}

/// `||u||_P^2` in unique space.
pub fn p_norm_sqr_unique<T: Scalar>(layout: &Layout, u: &[T]) -> f64 {
    u.iter()
        .zip(&layout.weights)
        .map(|(v, w)| v.norm_sqr() * w)
        .sum()
}

/// `max_t | ||u(t)||^2 - ||u(0)||^2 | / ||u(0)||^2`.
pub fn energy_drift<T: Scalar>(
    layout: &Layout,
    trajectory: &[Field<T>],
) -> Result<f64, StabilityError> {
    let e = energies(layout, trajectory)?;
    Ok(e.iter().map(|x| (x - e[0]).abs()).fold(0.0, f64::max) / e[0])
}

/// Largest relative growth of the energy between consecutive snapshots.
pub fn max_energy_increase<T: Scalar>(
    layout: &Layout,
    trajectory: &[Field<T>],
) -> Result<f64, StabilityError> {
    let e = energies(layout, trajectory)?;
    Ok(e.windows(2)
        .map(|w| (w[1] - w[0]) / e[0])
        .fold(0.0, f64::max))
}

fn energies<T: Scalar>(
    layout: &Layout,
    trajectory: &[Field<T>],
) -> Result<Vec<f64>, StabilityError> {
    if trajectory.is_empty() {
        return Err(StabilityError::Empty);
    }
    let e = trajectory
        .iter()
        .map(|f| p_norm_sqr(layout, f))
        .collect::<Result<Vec<_>, _>>()?;
    if e[0] == 0.0 {
        return Err(StabilityError::ZeroNorm);
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{build_named_mesh, Box2, NamedMesh};
    use crate::semidiscrete::{assemble, assemble_with, PenaltySet};

    fn mesh(name: NamedMesh, periodic: bool) -> crate::mesh::Mesh {
        crate::mesh::build_named_mesh_with(name, 11, Box2::square(-1.0, 1.0), 0, [periodic; 2])
            .unwrap()
    }

    #[test]
    fn fig2b_schrodinger_passes() {
        let op = assemble(
            &mesh(NamedMesh::Fig2b, false),
            Equation::free_schrodinger(),
            4,
        )
        .unwrap();
        let r = check_energy_structure(&op).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn flipped_tau_fails() {
        let pen = PenaltySet::default().flipped("tau_w", false);
        let op = assemble_with(
            &mesh(NamedMesh::Fig2b, false),
            Equation::free_schrodinger(),
            4,
            pen,
        )
        .unwrap();
        let r = check_energy_structure(&op).unwrap();
        assert!(r.skew_deviation.unwrap() > 1e-3);
        assert_eq!(r.verdict, Verdict::Fail);
    }

    #[test]
    fn advection_fig2c_passes() {
        let m = build_named_mesh(NamedMesh::Fig2c, 11, Box2::square(-1.0, 1.0), 0).unwrap();
        let op = assemble(&m, Equation::Advection { a: [-2.0, -1.0] }, 4).unwrap();
        let r = check_energy_structure(&op).unwrap();
        assert!(r.passed(), "{r}");
    }

    #[test]
    fn advection_flips_fail() {
        for name in [NamedMesh::Fig2b, NamedMesh::Fig2c] {
            for flip in PenaltySet::ADVECTION_NAMES {
                let pen = PenaltySet::default().flipped(flip, true);
                let op = assemble_with(
                    &mesh(name, false),
                    Equation::Advection { a: [-2.0, -1.0] },
                    4,
                    pen,
                )
                .unwrap();
                let r = check_energy_structure(&op).unwrap();
                assert_eq!(r.verdict, Verdict::Fail, "{name:?} {flip}: {r}");
            }
        }
    }

    #[test]
    fn constant_trajectory_has_no_drift() {
        let m = mesh(NamedMesh::Fig2a, false);
        let op = assemble(&m, Equation::Advection { a: [1.0, 0.0] }, 2).unwrap();
        let f = op.layout.sample_field(|x, y| 1.0 + x * y);
        assert_eq!(energy_drift(&op.layout, &[f.clone(), f]).unwrap(), 0.0);
        assert!(matches!(
            energy_drift::<f64>(&op.layout, &[]),
            Err(StabilityError::Empty)
        ));
    }
}

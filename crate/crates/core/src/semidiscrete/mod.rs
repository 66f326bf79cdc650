//! Method-of-lines right-hand side on a classified mesh.
//!
//! Each patch carries one tensor-product SBP grid, so FD interfaces inside a patch are
//! ordinary interior stencils. Patch faces on SAT lines are coupled segment by segment
//! through the glue operators of [`crate::interpolation::segment_glue`]. The operator is
//! assembled as a sparse real matrix `M` acting on unique point values:
//! Schrödinger `L = (i/hbar) M` with `M = Laplacian - V + penalties`, advection `L = M`.

mod assemble;
mod layout;

pub use layout::{mesh_signature, Layout};

use crate::interpolation::InterpError;
use crate::mesh::{Mesh, MeshError};
use crate::sbp_core::SbpError;
use crate::sparse::Csr;
use num_complex::Complex64;
use num_traits::Zero;
use std::fmt::Write as _;
use std::ops::{AddAssign, Mul};
use std::sync::Arc;
use thiserror::Error;

pub type C64 = Complex64;

#[derive(Debug, Error)]
pub enum SemiError {
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Sbp(#[from] SbpError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error("patch {patch} has {points} points in a dimension, needs {needed}")]
    TooSmall {
        patch: usize,
        points: usize,
        needed: usize,
    },
    #[error("unsupported interface configuration: {0}")]
    Unsupported(String),
    #[error("field does not belong to this mesh")]
    MeshMismatch,
    #[error("{0}")]
    Scalar(&'static str),
}

/// Scalar type of a field: real for advection, complex for Schrödinger.
pub trait Scalar:
    Copy + Zero + AddAssign + Mul<f64, Output = Self> + Send + Sync + std::fmt::Debug + 'static
{
    const COMPLEX: bool;
    /// Multiplication by i; only defined for complex scalars.
    fn times_i(self) -> Self;
    fn abs(self) -> f64;
    fn norm_sqr(self) -> f64;
    fn dump(self, out: &mut String);
    fn to_c64(self) -> C64;
    /// Real scalars keep the real part.
    fn from_c64(z: C64) -> Self;
}

impl Scalar for f64 {
    const COMPLEX: bool = false;
    fn times_i(self) -> Self {
        unreachable!("real fields have no imaginary unit")
    }
    fn abs(self) -> f64 {
        f64::abs(self)
    }
    fn norm_sqr(self) -> f64 {
        self * self
    }
    fn dump(self, out: &mut String) {
        let _ = write!(out, " {self:e}");
    }
    fn to_c64(self) -> C64 {
        C64::new(self, 0.0)
    }
    fn from_c64(z: C64) -> Self {
        z.re
    }
}

impl Scalar for C64 {
    const COMPLEX: bool = true;
    fn times_i(self) -> Self {
        C64::new(-self.im, self.re)
    }
    fn abs(self) -> f64 {
        self.norm()
    }
    fn norm_sqr(self) -> f64 {
        Complex64::norm_sqr(&self)
    }
    fn dump(self, out: &mut String) {
        let _ = write!(out, " {:e} {:e}", self.re, self.im);
    }
    fn to_c64(self) -> C64 {
        self
    }
    fn from_c64(z: C64) -> Self {
        z
    }
}

/// Potential `V(x, y) = c_x (x - x_c)^2 + c_y (y - y_c)^2`.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Potential {
    pub coeff: [f64; 2],
    pub center: [f64; 2],
}

impl Potential {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn quadratic(cx: f64, cy: f64) -> Self {
        Potential {
            coeff: [cx, cy],
            center: [0.0, 0.0],
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let dx = x - self.center[0];
        let dy = y - self.center[1];
        self.coeff[0] * dx * dx + self.coeff[1] * dy * dy
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Equation {
    /// `u_t = (i/hbar) (Laplacian u - V u)`; zero Dirichlet data on physical faces.
    Schrodinger { potential: Potential, hbar: f64 },
    /// `u_t = a . grad u`; zero data on inflow faces (`a . n > 0`, `n` outward).
    Advection { a: [f64; 2] },
}

impl Equation {
    pub fn free_schrodinger() -> Self {
        Equation::Schrodinger {
            potential: Potential::zero(),
            hbar: 1.0,
        }
    }

    pub fn is_complex(&self) -> bool {
        matches!(self, Equation::Schrodinger { .. })
    }
}

/// Interface penalty coefficients.
///
/// Schrödinger: the imaginary parts of gamma and tau; a term enters as
/// `-gamma P^-1 S^T e (..) - tau P^-1 e (S ..)`. The `w` values apply to the side whose
/// face is at normal index 0 (above the line), the `uv` values to the side below.
/// Advection: `adv_w`, `adv_uv` multiply the normal speed, entering as `-tau P^-1 e (..)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PenaltySet {
    pub gamma_w: f64,
    pub tau_w: f64,
    pub gamma_uv: f64,
    pub tau_uv: f64,
    pub adv_w: f64,
    pub adv_uv: f64,
}

impl Default for PenaltySet {
    fn default() -> Self {
        PenaltySet {
            gamma_w: 0.5,
            tau_w: -0.5,
            gamma_uv: -0.5,
            tau_uv: 0.5,
            adv_w: -0.5,
            adv_uv: 0.5,
        }
    }
}

impl PenaltySet {
    pub const SCHRODINGER_NAMES: [&'static str; 4] = ["gamma_w", "tau_w", "gamma_uv", "tau_uv"];
    pub const ADVECTION_NAMES: [&'static str; 2] = ["tau_w", "tau_uv"];

    /// Copy with one named parameter negated.
    pub fn flipped(&self, name: &str, advection: bool) -> PenaltySet {
        let mut p = *self;
        match (advection, name) {
            (false, "gamma_w") => p.gamma_w = -p.gamma_w,
            (false, "tau_w") => p.tau_w = -p.tau_w,
            (false, "gamma_uv") => p.gamma_uv = -p.gamma_uv,
            (false, "tau_uv") => p.tau_uv = -p.tau_uv,
            (true, "tau_w") => p.adv_w = -p.adv_w,
            (true, "tau_uv") => p.adv_uv = -p.adv_uv,
            _ => panic!("unknown penalty {name}"),
        }
        p
    }
}

/// Per-block value tables with duplicated interface copies.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T> {
    pub values: Vec<T>,
    pub block_ids: Vec<usize>,
    pub block_dims: [usize; 2],
    pub signature: u64,
}

impl<T: Scalar> Field<T> {
    pub fn block_len(&self) -> usize {
        self.block_dims[0] * self.block_dims[1]
    }

    /// Values of one block, x fastest.
    pub fn block(&self, id: usize) -> Option<&[T]> {
        let k = self.block_ids.iter().position(|&b| b == id)?;
        let n = self.block_len();
        Some(&self.values[k * n..(k + 1) * n])
    }

    pub fn block_mut(&mut self, id: usize) -> Option<&mut [T]> {
        let k = self.block_ids.iter().position(|&b| b == id)?;
        let n = self.block_len();
        Some(&mut self.values[k * n..(k + 1) * n])
    }
}

impl Layout {
    fn check<T>(&self, f: &Field<T>) -> Result<(), SemiError> {
        if f.signature != self.signature || f.values.len() != self.stored_len() {
            return Err(SemiError::MeshMismatch);
        }
        Ok(())
    }

    /// Owner-copy values in unique ordering.
    pub fn to_unique<T: Scalar>(&self, f: &Field<T>) -> Result<Vec<T>, SemiError> {
        self.check(f)?;
        Ok(self.owner.iter().map(|&s| f.values[s]).collect())
    }

    /// Field with every copy set from the unique values.
    pub fn to_field<T: Scalar>(&self, u: &[T]) -> Field<T> {
        assert_eq!(u.len(), self.unique_len());
        Field {
            values: self.stored_to_unique.iter().map(|&k| u[k]).collect(),
            block_ids: self.block_ids.clone(),
            block_dims: self.block_dims,
            signature: self.signature,
        }
    }

    pub fn sample_field<T: Scalar>(&self, f: impl Fn(f64, f64) -> T) -> Field<T> {
        self.to_field(&self.sample(f))
    }

    /// Sets both copies along every FD interface to the owner value.
    pub fn sync_fd_interfaces<T: Scalar>(&self, f: &Field<T>) -> Result<Field<T>, SemiError> {
        Ok(self.to_field(&self.to_unique(f)?))
    }

    /// Largest difference between copies of the same point.
    pub fn copy_mismatch<T: Scalar>(&self, f: &Field<T>) -> Result<f64, SemiError>
    where
        T: std::ops::Sub<Output = T>,
    {
        self.check(f)?;
        Ok(self
            .stored_to_unique
            .iter()
            .enumerate()
            .map(|(s, &u)| (f.values[s] - f.values[self.owner[u]]).abs())
            .fold(0.0, f64::max))
    }

    /// Plain-text dump: per block a header `block id nx ny`, then rows `x y re [im]`.
    pub fn dump_field<T: Scalar>(&self, f: &Field<T>) -> Result<String, SemiError> {
        self.check(f)?;
        let mut s = String::new();
        let n = f.block_len();
        for (k, id) in f.block_ids.iter().enumerate() {
            let _ = writeln!(s, "block {id} {} {}", f.block_dims[0], f.block_dims[1]);
            for (i, v) in f.values[k * n..(k + 1) * n].iter().enumerate() {
                let x = self.coords[self.stored_to_unique[k * n + i]];
                let _ = write!(s, "{:e} {:e}", x[0], x[1]);
                v.dump(&mut s);
                s.push('\n');
            }
        }
        Ok(s)
    }
}

#[derive(Clone, Debug)]
pub struct SemiDiscreteOperator {
    pub equation: Equation,
    pub order: usize,
    pub penalties: PenaltySet,
    pub layout: Arc<Layout>,
    /// Real part of the operator; see the module docs.
    pub m: Csr,
}

/// Assembles the operator with the default penalties.
pub fn assemble(
    mesh: &Mesh,
    equation: Equation,
    order: usize,
) -> Result<SemiDiscreteOperator, SemiError> {
    assemble_with(mesh, equation, order, PenaltySet::default())
}

pub fn assemble_with(
    mesh: &Mesh,
    equation: Equation,
    order: usize,
    penalties: PenaltySet,
) -> Result<SemiDiscreteOperator, SemiError> {
    let layout = Arc::new(Layout::new(mesh, order)?);
    let m = assemble::build(mesh, &layout, &equation, &penalties)?;
    Ok(SemiDiscreteOperator {
        equation,
        order,
        penalties,
        layout,
        m,
    })
}

impl SemiDiscreteOperator {
    pub fn len(&self) -> usize {
        self.layout.unique_len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn scalar_check<T: Scalar>(&self) -> Result<(), SemiError> {
        if T::COMPLEX != self.equation.is_complex() {
            return Err(SemiError::Scalar(
                "field scalar type does not match the equation",
            ));
        }
        Ok(())
    }

    /// `y = L x` in unique space.
    pub fn apply_unique<T: Scalar>(&self, x: &[T], y: &mut [T]) -> Result<(), SemiError> {
        self.scalar_check::<T>()?;
        self.m.apply(x, y);
        if let Equation::Schrodinger { hbar, .. } = self.equation {
            let s = 1.0 / hbar;
            for v in y.iter_mut() {
                *v = v.times_i() * s;
            }
        }
        Ok(())
    }

    pub fn apply_rhs<T: Scalar>(&self, f: &Field<T>) -> Result<Field<T>, SemiError> {
        let x = self.layout.to_unique(f)?;
        let mut y = vec![T::zero(); x.len()];
        self.apply_unique(&x, &mut y)?;
        Ok(self.layout.to_field(&y))
    }

    /// The P-weighted real part `P M`.
    pub fn weighted(&self) -> Csr {
        self.m.scale_rows(&self.layout.weights)
    }
}

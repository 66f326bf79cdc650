//! Residual-based refinement.
//!
//! The residual in dimension `i` is the difference between the order-`2p` and order-`2p+2`
//! derivative operators applied to one block's values, one-sided at every block edge. Block
//! indicators are weighted ℓ2 norms of these components; at points where one-sided rows
//! are used the residual is scaled by `vol(B)^{q/2}` (`q = 2` for Schrödinger, `q = 1` for
//! advection), with `vol(B)` measured as a fraction of the domain volume so that the factor
//! is a reduction on any domain.

use crate::interpolation::{coarse_to_fine, InterpError};
use crate::mesh::{Box2, JunctionPolicy, Mesh, MeshError, UNIT};
use crate::sbp_core::{SbpError, SbpOperatorSet};
use crate::semidiscrete::{Equation, Field, Layout, Scalar, SemiError, C64};
use std::collections::HashMap;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AdaptError {
    #[error("residual estimation needs order 2 or 4, got {0}")]
    UnsupportedOrder(usize),
    #[error("field does not match the mesh")]
    MeshMismatch,
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Sbp(#[from] SbpError),
    #[error(transparent)]
    Interp(#[from] InterpError),
    #[error(transparent)]
    Semi(#[from] SemiError),
}

/// Per-point residual components in stored (per-block) layout.
#[derive(Clone, Debug)]
pub struct ResidualField {
    pub order: usize,
    pub reference_order: usize,
    pub block_ids: Vec<usize>,
    pub block_dims: [usize; 2],
    /// `R_i` for i = x, y.
    pub components: [Vec<C64>; 2],
    /// Points per edge treated as one-sided.
    pub one_sided_rows: usize,
    /// Downscale exponent: 2 for second derivatives, 1 for first.
    pub q: u32,
}

impl ResidualField {
    pub fn block_len(&self) -> usize {
        self.block_dims[0] * self.block_dims[1]
    }

    /// `R = -(R_x + R_y)`.
    pub fn total(&self) -> Vec<C64> {
        self.components[0]
            .iter()
            .zip(&self.components[1])
            .map(|(a, b)| -(a + b))
            .collect()
    }

    fn is_one_sided(&self, d: usize, i: usize, j: usize) -> bool {
        let k = if d == 0 { i } else { j };
        let n = self.block_dims[d];
        k < self.one_sided_rows || k >= n - self.one_sided_rows
    }

    /// Components with the one-sided points downscaled, for one block covering the
    /// fraction `vol_frac` of the domain.
    fn scaled(&self, k: usize, vol_frac: f64) -> [Vec<C64>; 2] {
        let nb = self.block_len();
        let nx = self.block_dims[0];
        let f = vol_frac.powf(self.q as f64 / 2.0);
        let mut out = [Vec::with_capacity(nb), Vec::with_capacity(nb)];
        for (d, o) in out.iter_mut().enumerate() {
            for s in 0..nb {
                let v = self.components[d][k * nb + s];
                o.push(if self.is_one_sided(d, s % nx, s / nx) {
                    v * f
                } else {
                    v
                });
            }
        }
        out
    }

    /// Downscaled `|R|` at every stored point with the norm weight of its block, i.e. the
    /// inputs of [`accumulate_bound`] for one time level. Each block's weights integrate
    /// its own area, so interface copies are not discounted.
    pub fn bound_terms(&self, mesh: &Mesh) -> Result<(Vec<f64>, Vec<f64>), AdaptError> {
        let nb = self.block_len();
        let mut r = Vec::with_capacity(self.components[0].len());
        let mut w = Vec::with_capacity(r.capacity());
        for (k, id) in self.block_ids.iter().enumerate() {
            let b = mesh.block(*id)?;
            let s = self.scaled(k, b.volume() / mesh.domain.volume());
            let pw = block_weights(self.order, b.points_per_dim, b.h())?;
            for i in 0..nb {
                r.push((s[0][i] + s[1][i]).norm());
                w.push(pw[i]);
            }
        }
        Ok((r, w))
    }
}

fn block_weights(order: usize, n: [usize; 2], h: [f64; 2]) -> Result<Vec<f64>, AdaptError> {
    let px = SbpOperatorSet::new(order, n[0], h[0])?.p;
    let py = SbpOperatorSet::new(order, n[1], h[1])?.p;
    Ok((0..n[1])
        .flat_map(|j| px.iter().map(|p| p * py[j]).collect::<Vec<_>>())
        .collect())
}

fn line_apply(op: &crate::sparse::Csr, x: &[C64]) -> Vec<C64> {
    op.mul_vec(x)
}

/// Residual of the order-`order` discretization of `eq`, computed block by block.
pub fn compute_residual<T: Scalar>(
    f: &Field<T>,
    mesh: &Mesh,
    eq: &Equation,
    order: usize,
) -> Result<ResidualField, AdaptError> {
    if order != 2 && order != 4 {
        return Err(AdaptError::UnsupportedOrder(order));
    }
    if f.block_ids.len() != mesh.blocks.len() || f.block_dims != mesh.points_per_dim {
        return Err(AdaptError::MeshMismatch);
    }
    let refo = order + 2;
    let n = mesh.points_per_dim;
    let nb = n[0] * n[1];
    let (coef, q): ([C64; 2], u32) = match eq {
        Equation::Schrodinger { hbar, .. } => ([C64::new(0.0, 1.0 / hbar); 2], 2),
        Equation::Advection { a } => ([C64::new(a[0], 0.0), C64::new(a[1], 0.0)], 1),
    };
    let mut comps = [
        vec![C64::new(0.0, 0.0); f.values.len()],
        vec![C64::new(0.0, 0.0); f.values.len()],
    ];
    let mut cache: HashMap<(usize, usize, u64), (SbpOperatorSet, SbpOperatorSet)> = HashMap::new();
    let mut one_sided = 0;
    for (k, id) in f.block_ids.iter().enumerate() {
        let b = mesh.block(*id)?;
        let h = b.h();
        let vals: Vec<C64> = f.values[k * nb..(k + 1) * nb]
            .iter()
            .map(|v| v.to_c64())
            .collect();
        for d in 0..2 {
            let key = (d, n[d], h[d].to_bits());
            if !cache.contains_key(&key) {
                cache.insert(
                    key,
                    (
                        SbpOperatorSet::new(order, n[d], h[d])?,
                        SbpOperatorSet::new(refo, n[d], h[d])?,
                    ),
                );
            }
            let (lo, hi) = &cache[&key];
            one_sided = hi.boundary_rows.max(lo.boundary_rows);
            let (dl, dh) = match eq {
                Equation::Schrodinger { .. } => (&lo.d2, &hi.d2),
                Equation::Advection { .. } => (&lo.d1, &hi.d1),
            };
            let (len, count) = (n[d], n[1 - d]);
            for line in 0..count {
                let idx = |t: usize| {
                    if d == 0 {
                        t + n[0] * line
                    } else {
                        line + n[0] * t
                    }
                };
                let x: Vec<C64> = (0..len).map(|t| vals[idx(t)]).collect();
                let a = line_apply(dl, &x);
                let c = line_apply(dh, &x);
                for t in 0..len {
                    comps[d][k * nb + idx(t)] = coef[d] * (a[t] - c[t]);
                }
            }
        }
    }
    Ok(ResidualField {
        order,
        reference_order: refo,
        block_ids: f.block_ids.clone(),
        block_dims: n,
        components: comps,
        one_sided_rows: one_sided,
        q,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockIndicator {
    pub block_id: usize,
    pub volume: f64,
    /// `dt * || R_i ||` over the block, per dimension.
    pub indicator: [f64; 2],
    /// `dt * || R ||` over the block.
    pub total: f64,
    pub threshold: f64,
    pub flagged: [bool; 2],
    pub q: u32,
}

impl BlockIndicator {
    pub fn dims(&self) -> Vec<usize> {
        (0..2).filter(|&d| self.flagged[d]).collect()
    }
}

/// Flags a block when `dt ||R||_B > tol sqrt(vol(B)/vol(Ω)) dt / T`, in the dimension with
/// the larger `||R_i||_B`.
pub fn flag_blocks(
    r: &ResidualField,
    mesh: &Mesh,
    tol: f64,
    dt: f64,
    t_max: f64,
) -> Result<Vec<BlockIndicator>, AdaptError> {
    let vol_omega = mesh.domain.volume();
    let nb = r.block_len();
    let mut out = Vec::with_capacity(r.block_ids.len());
    for (k, id) in r.block_ids.iter().enumerate() {
        let b = mesh.block(*id)?;
        let vol = b.volume();
        let w = block_weights(r.order, b.points_per_dim, b.h())?;
        let s = r.scaled(k, vol / vol_omega);
        let norm =
            |g: &dyn Fn(usize) -> f64| dt * (0..nb).map(|i| w[i] * g(i) * g(i)).sum::<f64>().sqrt();
        let ind = [norm(&|i| s[0][i].norm()), norm(&|i| s[1][i].norm())];
        let total = norm(&|i| (s[0][i] + s[1][i]).norm());
        let threshold = tol * (vol / vol_omega).sqrt() * dt / t_max;
        let mut flagged = [false; 2];
        if total > threshold {
            flagged[usize::from(ind[1] > ind[0])] = true;
        }
        out.push(BlockIndicator {
            block_id: *id,
            volume: vol,
            indicator: ind,
            total,
            threshold,
            flagged,
            q: r.q,
        });
    }
    Ok(out)
}

/// Refines the flagged blocks, restores balance and transfers the field with the
/// coarse-to-fine interpolation of `order`.
pub fn adapt<T: Scalar>(
    mesh: &Mesh,
    f: &Field<T>,
    flags: &[BlockIndicator],
    order: usize,
) -> Result<(Mesh, Field<T>), AdaptError> {
    if f.block_ids.len() != mesh.blocks.len() || f.block_dims != mesh.points_per_dim {
        return Err(AdaptError::MeshMismatch);
    }
    if flags.iter().all(|b| b.dims().is_empty()) {
        return Ok((mesh.clone(), f.clone()));
    }
    let policy = mesh.policy.unwrap_or(JunctionPolicy::FdWherePossible);
    let mut m = mesh.clone();
    for b in flags {
        let dims = b.dims();
        if !dims.is_empty() {
            m.refine_in_place(b.block_id, &dims)?;
        }
    }
    m.balance_in_place()?;
    let m = m.classify_interfaces(policy)?;
    let g = transfer(mesh, f, &m, order)?;
    let layout = Layout::new(&m, order)?;
    let g = layout.sync_fd_interfaces(&g)?;
    Ok((m, g))
}

/// Interpolates block values of `old` onto the blocks of `new`, a refinement of `old`.
pub fn transfer<T: Scalar>(
    old: &Mesh,
    f: &Field<T>,
    new: &Mesh,
    order: usize,
) -> Result<Field<T>, AdaptError> {
    let n = old.points_per_dim;
    let nb = n[0] * n[1];
    let c2f = [
        coarse_to_fine(order, n[0], false)?,
        coarse_to_fine(order, n[1], false)?,
    ];
    let mut values = Vec::with_capacity(new.blocks.len() * nb);
    for b in &new.blocks {
        let (k, ob) = old
            .blocks
            .iter()
            .enumerate()
            .find(|(_, o)| {
                let (lo, hi) = (o.cell, o.upper_units());
                (0..2).all(|d| lo[d] <= b.cell[d] && b.cell[d] < hi[d])
            })
            .ok_or(AdaptError::MeshMismatch)?;
        if (0..2).any(|d| ob.level[d] > b.level[d]) {
            return Err(AdaptError::MeshMismatch);
        }
        let mut v: Vec<T> = f.values[k * nb..(k + 1) * nb].to_vec();
        for d in 0..2 {
            let mut lo = ob.cell[d];
            let mut size = UNIT >> ob.level[d];
            for _ in ob.level[d]..b.level[d] {
                let upper = b.cell[d] >= lo + size / 2;
                v = refine_lines(&v, n, d, &c2f[d], upper);
                size /= 2;
                if upper {
                    lo += size;
                }
            }
        }
        values.extend(v);
    }
    Ok(Field {
        values,
        block_ids: new.blocks.iter().map(|b| b.id).collect(),
        block_dims: n,
        signature: crate::semidiscrete::mesh_signature(new),
    })
}

/// Upsamples every line along `d` and keeps the lower or upper half.
fn refine_lines<T: Scalar>(
    v: &[T],
    n: [usize; 2],
    d: usize,
    c2f: &crate::sparse::Csr,
    upper: bool,
) -> Vec<T> {
    let mut out = v.to_vec();
    let (len, count) = (n[d], n[1 - d]);
    let off = if upper { len - 1 } else { 0 };
    let mut fine = vec![T::zero(); 2 * len - 1];
    for line in 0..count {
        let idx = |t: usize| {
            if d == 0 {
                t + n[0] * line
            } else {
                line + n[0] * t
            }
        };
        let x: Vec<T> = (0..len).map(|t| v[idx(t)]).collect();
        c2f.apply(&x, &mut fine);
        for t in 0..len {
            out[idx(t)] = fine[off + t];
        }
    }
    out
}

/// One time level of the error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ResidualSnapshot {
    pub dt: f64,
    /// `|R(x_j)|` per point.
    pub residual: Vec<f64>,
    /// Volume attached to each point.
    pub volume: Vec<f64>,
}

/// `sum_k dt_k sqrt(sum_j vol_j |R_j|^2)`.
pub fn accumulate_bound(history: &[ResidualSnapshot]) -> f64 {
    history
        .iter()
        .map(|s| {
            s.dt * s
                .residual
                .iter()
                .zip(&s.volume)
                .map(|(r, v)| v * r * r)
                .sum::<f64>()
                .sqrt()
        })
        .sum()
}

/// Settings of the initial-mesh loop.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptConfig {
    pub order: usize,
    pub tol: f64,
    pub dt: f64,
    pub t_max: f64,
    pub max_rounds: usize,
    /// Blocks are not refined beyond this level in any dimension.
    pub max_level: u32,
}

impl Default for AdaptConfig {
    fn default() -> Self {
        AdaptConfig {
            order: 4,
            tol: 1e-5,
            dt: 1e-4,
            t_max: 1e-2,
            max_rounds: 10,
            max_level: 6,
        }
    }
}

/// Estimate, flag and refine on a sampled initial condition until no block is flagged.
/// Returns the mesh and the number of rounds that refined something.
pub fn initial_mesh(
    start: &Mesh,
    eq: &Equation,
    cfg: &AdaptConfig,
    u0: impl Fn(f64, f64) -> C64,
) -> Result<(Mesh, usize), AdaptError> {
    let mut mesh = start.clone();
    if !mesh.is_classified() {
        mesh = mesh.classify_interfaces(JunctionPolicy::FdWherePossible)?;
    }
    for round in 0..cfg.max_rounds {
        let layout = Layout::new(&mesh, cfg.order)?;
        let f = layout.sample_field(&u0);
        let r = compute_residual(&f, &mesh, eq, cfg.order)?;
        let mut flags = flag_blocks(&r, &mesh, cfg.tol, cfg.dt, cfg.t_max)?;
        for b in &mut flags {
            let lv = mesh.block(b.block_id)?.level;
            for d in 0..2 {
                b.flagged[d] &= lv[d] < cfg.max_level;
            }
        }
        if flags.iter().all(|b| b.dims().is_empty()) {
            return Ok((mesh, round));
        }
        mesh = adapt(&mesh, &f, &flags, cfg.order)?.0;
    }
    Ok((mesh, cfg.max_rounds))
}

/// Initial wave packet of the adapted-mesh experiment: `alpha = 2`, `k_y = 1`, centred at 0.
pub fn fig9_packet(x: f64, y: f64) -> C64 {
    C64::new(-2.0 * (x * x + y * y), y).exp()
}

/// Mesh generated by [`initial_mesh`] for [`fig9_packet`] from 4x4 level-0 blocks.
pub fn fig9_mesh(base_points: usize, domain: Box2, extra_levels: u32) -> Result<Mesh, MeshError> {
    let start = Mesh::uniform(domain, [4, 4], [base_points; 2], [false, false])?;
    let cfg = AdaptConfig::default();
    let (m, _) = initial_mesh(&start, &Equation::free_schrodinger(), &cfg, fig9_packet).map_err(
        |e| match e {
            AdaptError::Mesh(m) => m,
            other => MeshError::Unsupported(other.to_string()),
        },
    )?;
    Ok(m.with_extra_levels(extra_levels))
}

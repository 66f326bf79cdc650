//! Unique (one value per grid point, patch by patch) and stored (per block, with
//! duplicated interface copies) indexings of a classified mesh.

use super::SemiError;
use crate::mesh::{Mesh, Patch};
use crate::sbp_core::{min_points, SbpOperatorSet};
use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

#[derive(Clone, Debug)]
pub struct Layout {
    pub order: usize,
    pub patches: Vec<Patch>,
    /// Start of each patch in the unique vector; one extra entry at the end.
    pub patch_offset: Vec<usize>,
    pub patch_dims: Vec<[usize; 2]>,
    pub patch_h: Vec<[f64; 2]>,
    /// Patch lower corner in physical coordinates.
    pub patch_origin: Vec<[f64; 2]>,
    /// One-dimensional operators of each patch, per dimension.
    pub ops: Vec<[Arc<SbpOperatorSet>; 2]>,
    pub coords: Vec<[f64; 2]>,
    /// Diagonal of the SBP norm in unique space.
    pub weights: Vec<f64>,
    pub block_ids: Vec<usize>,
    pub block_dims: [usize; 2],
    pub stored_to_unique: Vec<usize>,
    /// Stored index of the owner copy of each unique point.
    pub owner: Vec<usize>,
    pub multiplicity: Vec<u32>,
    pub signature: u64,
    pub domain_lo: [f64; 2],
    pub domain_len: [f64; 2],
    pub periodic: [bool; 2],
}

pub fn mesh_signature(mesh: &Mesh) -> u64 {
    let mut h = DefaultHasher::new();
    mesh.points_per_dim.hash(&mut h);
    mesh.periodic.hash(&mut h);
    mesh.base_blocks.hash(&mut h);
    for b in &mesh.blocks {
        (b.id, b.level, b.cell).hash(&mut h);
    }
    h.finish()
}

type OpKey = (usize, usize, u64, bool);

impl Layout {
    pub fn new(mesh: &Mesh, order: usize) -> Result<Layout, SemiError> {
        let patches = mesh.patches()?.to_vec();
        let minp = min_points(order)?;
        let np = mesh.points_per_dim;
        let ext = mesh.domain.extent();
        let mut cache: HashMap<OpKey, Arc<SbpOperatorSet>> = HashMap::new();
        let mut op = |n: usize, h: f64, periodic: bool| -> Result<Arc<SbpOperatorSet>, SemiError> {
            let key = (order, n, h.to_bits(), periodic);
            if let Some(o) = cache.get(&key) {
                return Ok(o.clone());
            }
            let o = Arc::new(SbpOperatorSet::build(order, n, h, periodic)?);
            cache.insert(key, o.clone());
            Ok(o)
        };

        let mut patch_offset = vec![0];
        let (mut patch_dims, mut patch_h, mut patch_origin, mut ops) =
            (vec![], vec![], vec![], vec![]);
        let mut coords = Vec::new();
        let mut weights = Vec::new();
        for (k, p) in patches.iter().enumerate() {
            assert_eq!(p.id, k, "patch ids are positions");
            let n = mesh.patch_points(p);
            let h = mesh.patch_spacing(p);
            for d in 0..2 {
                let need = if p.loops[d] { order + 1 } else { minp };
                if n[d] < need {
                    return Err(SemiError::TooSmall {
                        patch: k,
                        points: n[d],
                        needed: need,
                    });
                }
            }
            let o = [op(n[0], h[0], p.loops[0])?, op(n[1], h[1], p.loops[1])?];
            let origin = [mesh.to_phys(0, p.lo[0]), mesh.to_phys(1, p.lo[1])];
            for j in 0..n[1] {
                for i in 0..n[0] {
                    let mut x = [origin[0] + i as f64 * h[0], origin[1] + j as f64 * h[1]];
                    for d in 0..2 {
                        if p.loops[d] && x[d] >= mesh.domain.hi[d] - 1e-9 * ext[d] {
                            x[d] -= ext[d];
                        }
                    }
                    coords.push(x);
                    weights.push(o[0].p[i] * o[1].p[j]);
                }
            }
            patch_offset.push(patch_offset.last().unwrap() + n[0] * n[1]);
            patch_dims.push(n);
            patch_h.push(h);
            patch_origin.push(origin);
            ops.push(o);
        }

        let nu = *patch_offset.last().unwrap();
        let bsize = np[0] * np[1];
        let mut stored_to_unique = vec![usize::MAX; mesh.blocks.len() * bsize];
        for (k, p) in patches.iter().enumerate() {
            let n = patch_dims[k];
            for (pos, &bi) in p.blocks.iter().enumerate() {
                let (ix, iy) = (pos % p.nblocks[0], pos / p.nblocks[0]);
                for b in 0..np[1] {
                    for a in 0..np[0] {
                        let mut i = ix * (np[0] - 1) + a;
                        let mut j = iy * (np[1] - 1) + b;
                        if p.loops[0] {
                            i %= n[0];
                        }
                        if p.loops[1] {
                            j %= n[1];
                        }
                        stored_to_unique[bi * bsize + a + np[0] * b] =
                            patch_offset[k] + i + n[0] * j;
                    }
                }
            }
        }
        let mut owner = vec![usize::MAX; nu];
        let mut multiplicity = vec![0u32; nu];
        for (s, &u) in stored_to_unique.iter().enumerate() {
            assert!(u != usize::MAX, "every stored point belongs to a patch");
            if owner[u] == usize::MAX {
                owner[u] = s;
            }
            multiplicity[u] += 1;
        }
        debug_assert!(owner.iter().all(|&o| o != usize::MAX));
        Ok(Layout {
            order,
            patches,
            patch_offset,
            patch_dims,
            patch_h,
            patch_origin,
            ops,
            coords,
            weights,
            block_ids: mesh.blocks.iter().map(|b| b.id).collect(),
            block_dims: np,
            stored_to_unique,
            owner,
            multiplicity,
            signature: mesh_signature(mesh),
            domain_lo: mesh.domain.lo,
            domain_len: ext,
            periodic: mesh.periodic,
        })
    }

    pub fn unique_len(&self) -> usize {
        self.weights.len()
    }

    pub fn stored_len(&self) -> usize {
        self.stored_to_unique.len()
    }

    /// Unique index of point (i, j) of a patch.
    #[inline]
    pub fn index(&self, patch: usize, i: usize, j: usize) -> usize {
        self.patch_offset[patch] + i + self.patch_dims[patch][0] * j
    }

    /// Unique index from (normal dimension, normal index, tangential index).
    #[inline]
    pub fn index_nt(&self, patch: usize, d: usize, k: usize, q: usize) -> usize {
        if d == 0 {
            self.index(patch, k, q)
        } else {
            self.index(patch, q, k)
        }
    }

    /// Norm weight of each stored point: the unique weight shared among its copies.
    pub fn stored_weights(&self) -> Vec<f64> {
        self.stored_to_unique
            .iter()
            .map(|&u| self.weights[u] / self.multiplicity[u] as f64)
            .collect()
    }

    pub fn sample<T>(&self, f: impl Fn(f64, f64) -> T) -> Vec<T> {
        self.coords.iter().map(|x| f(x[0], x[1])).collect()
    }
}

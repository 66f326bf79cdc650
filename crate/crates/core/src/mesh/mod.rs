//! Block-oriented 2-D meshes with anisotropic refinement.
//!
//! Positions are kept in integer units: a level-0 block spans `UNIT` units in each
//! dimension and a block at level `l` spans `UNIT >> l`. All blocks carry the same
//! number of points per dimension, so refining a block halves its spacing.

mod classify;
mod named;
mod text;

pub use classify::{JunctionPolicy, Segment, SegmentFace, Side};
pub use named::{build_named_mesh, build_named_mesh_with, NamedMesh};

use std::collections::BTreeMap;
use thiserror::Error;

pub const UNIT: i64 = 1 << 20;
const MAX_LEVEL: u32 = 16;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("unknown block id {0}")]
    UnknownBlock(usize),
    #[error("refinement needs at least one dimension")]
    NoDimensions,
    #[error("dimension {0} out of range")]
    BadDimension(usize),
    #[error("refinement level exceeds {MAX_LEVEL}")]
    TooDeep,
    #[error("blocks do not tile the domain: {0}")]
    NotTiled(String),
    #[error("mesh is not 2:1 balanced: blocks {0} and {1}")]
    Unbalanced(usize, usize),
    #[error("points per dimension must be odd and at least 3, got {0}")]
    BadPoints(usize),
    #[error("unsupported interface configuration: {0}")]
    Unsupported(String),
    #[error("mesh has not been classified")]
    Unclassified,
    #[error("unknown mesh name {0:?}")]
    UnknownName(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// Axis-aligned physical box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Box2 {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Box2 {
    pub fn new(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Self { lo, hi }
    }

    pub fn square(a: f64, b: f64) -> Self {
        Self {
            lo: [a, a],
            hi: [b, b],
        }
    }

    pub fn extent(&self) -> [f64; 2] {
        [self.hi[0] - self.lo[0], self.hi[1] - self.lo[1]]
    }

    pub fn volume(&self) -> f64 {
        let e = self.extent();
        e[0] * e[1]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Block {
    pub id: usize,
    pub level: [u32; 2],
    /// Lower corner in integer units.
    pub cell: [i64; 2],
    pub origin: [f64; 2],
    pub extent: [f64; 2],
    pub points_per_dim: [usize; 2],
}

impl Block {
    pub fn size_units(&self) -> [i64; 2] {
        [UNIT >> self.level[0], UNIT >> self.level[1]]
    }

    pub fn upper_units(&self) -> [i64; 2] {
        let s = self.size_units();
        [self.cell[0] + s[0], self.cell[1] + s[1]]
    }

    pub fn h(&self) -> [f64; 2] {
        [
            self.extent[0] / (self.points_per_dim[0] - 1) as f64,
            self.extent[1] / (self.points_per_dim[1] - 1) as f64,
        ]
    }

    pub fn volume(&self) -> f64 {
        self.extent[0] * self.extent[1]
    }
}

/// One side of a block: normal dimension and whether it is the upper side.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Face {
    pub dim: usize,
    pub high: bool,
}

impl Face {
    pub const X_LO: Face = Face {
        dim: 0,
        high: false,
    };
    pub const X_HI: Face = Face { dim: 0, high: true };
    pub const Y_LO: Face = Face {
        dim: 1,
        high: false,
    };
    pub const Y_HI: Face = Face { dim: 1, high: true };

    pub fn label(&self) -> &'static str {
        match (self.dim, self.high) {
            (0, false) => "x-",
            (0, true) => "x+",
            (1, false) => "y-",
            _ => "y+",
        }
    }

    pub fn parse(s: &str) -> Option<Face> {
        match s {
            "x-" => Some(Face::X_LO),
            "x+" => Some(Face::X_HI),
            "y-" => Some(Face::Y_LO),
            "y+" => Some(Face::Y_HI),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum InterfaceKind {
    Fd,
    SatConforming,
    SatNonconforming,
    OuterPhysical,
}

impl InterfaceKind {
    pub fn label(&self) -> &'static str {
        match self {
            InterfaceKind::Fd => "fd",
            InterfaceKind::SatConforming => "sat_conforming",
            InterfaceKind::SatNonconforming => "sat_nonconforming",
            InterfaceKind::OuterPhysical => "outer_physical",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [
            Self::Fd,
            Self::SatConforming,
            Self::SatNonconforming,
            Self::OuterPhysical,
        ]
        .into_iter()
        .find(|k| k.label() == s)
    }
}

/// Contact between two block faces (or a block face and the physical boundary).
#[derive(Clone, Debug, PartialEq)]
pub struct InterfaceDescriptor {
    pub side_a: (usize, Face),
    /// None for physical boundaries.
    pub side_b: Option<(usize, Face)>,
    pub kind: InterfaceKind,
    pub tangential_ratio: u32,
    /// The contact goes through a periodic wrap.
    pub periodic: bool,
}

/// A point where a continuous line of one side meets two abutting pieces on the other.
#[derive(Clone, Debug, PartialEq)]
pub struct JunctionDescriptor {
    pub location: [f64; 2],
    /// Normal dimension of the interface line through the junction.
    pub normal_dim: usize,
    /// Blocks of the continuous side touching the junction: two when an FD interface
    /// ends there, one when the split falls inside a block face.
    pub fd_side: Vec<usize>,
    /// Blocks of the two pieces meeting at the junction.
    pub sat_side: [usize; 2],
    /// Pieces are at a different tangential level than the continuous side.
    pub refined: bool,
}

/// Line on which FD coupling is not allowed, in integer units.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForcedSat {
    pub normal_dim: usize,
    pub at: i64,
    pub from: i64,
    pub to: i64,
}

/// Face contact between two blocks. `lower` has its upper face on the line.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Contact {
    pub lower: usize,
    pub upper: usize,
    pub dim: usize,
    pub periodic: bool,
    /// Line position, normalised into [0, L) for periodic dimensions.
    pub coord: i64,
    /// Tangential overlap.
    pub from: i64,
    pub to: i64,
    pub fd: bool,
}

/// Rectangle of equal-level blocks joined by FD interfaces, discretised as one grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Patch {
    pub id: usize,
    /// Block indices (into `Mesh::blocks`), x fastest.
    pub blocks: Vec<usize>,
    pub nblocks: [usize; 2],
    pub level: [u32; 2],
    /// Lower corner in units, in [0, L).
    pub lo: [i64; 2],
    /// The patch wraps around a periodic dimension.
    pub loops: [bool; 2],
}

impl Patch {
    pub fn block_size(&self) -> [i64; 2] {
        [UNIT >> self.level[0], UNIT >> self.level[1]]
    }

    pub fn size_units(&self) -> [i64; 2] {
        let b = self.block_size();
        [b[0] * self.nblocks[0] as i64, b[1] * self.nblocks[1] as i64]
    }

    pub fn block_at(&self, i: usize, j: usize) -> usize {
        self.blocks[j * self.nblocks[0] + i]
    }
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub domain: Box2,
    /// Level-0 blocks per dimension.
    pub base_blocks: [usize; 2],
    pub periodic: [bool; 2],
    pub points_per_dim: [usize; 2],
    pub blocks: Vec<Block>,
    pub forced_sat: Vec<ForcedSat>,
    pub interfaces: Vec<InterfaceDescriptor>,
    pub junctions: Vec<JunctionDescriptor>,
    pub policy: Option<JunctionPolicy>,
    pub(crate) contacts: Vec<Contact>,
    pub(crate) patches: Vec<Patch>,
    pub(crate) segments: Vec<Segment>,
    next_id: usize,
}

fn check_points(n: usize) -> Result<(), MeshError> {
    if n < 3 || n % 2 == 0 {
        Err(MeshError::BadPoints(n))
    } else {
        Ok(())
    }
}

impl Mesh {
    /// Uniform grid of level-0 blocks.
    pub fn uniform(
        domain: Box2,
        base_blocks: [usize; 2],
        points_per_dim: [usize; 2],
        periodic: [bool; 2],
    ) -> Result<Mesh, MeshError> {
        let mut specs = Vec::new();
        for j in 0..base_blocks[1] {
            for i in 0..base_blocks[0] {
                specs.push((
                    j * base_blocks[0] + i,
                    [0, 0],
                    [i as i64 * UNIT, j as i64 * UNIT],
                ));
            }
        }
        Mesh::from_blocks(domain, base_blocks, points_per_dim, periodic, &specs)
    }

    /// Mesh from explicit `(id, level, cell)` triples. Validates the tiling.
    pub fn from_blocks(
        domain: Box2,
        base_blocks: [usize; 2],
        points_per_dim: [usize; 2],
        periodic: [bool; 2],
        specs: &[(usize, [u32; 2], [i64; 2])],
    ) -> Result<Mesh, MeshError> {
        check_points(points_per_dim[0])?;
        check_points(points_per_dim[1])?;
        let mut mesh = Mesh {
            domain,
            base_blocks,
            periodic,
            points_per_dim,
            blocks: Vec::new(),
            forced_sat: Vec::new(),
            interfaces: Vec::new(),
            junctions: Vec::new(),
            policy: None,
            contacts: Vec::new(),
            patches: Vec::new(),
            segments: Vec::new(),
            next_id: 0,
        };
        for &(id, level, cell) in specs {
            if level.iter().any(|&l| l > MAX_LEVEL) {
                return Err(MeshError::TooDeep);
            }
            if mesh.blocks.iter().any(|b| b.id == id) {
                return Err(MeshError::NotTiled(format!("duplicate block id {id}")));
            }
            let b = mesh.make_block(id, level, cell);
            mesh.blocks.push(b);
            mesh.next_id = mesh.next_id.max(id + 1);
        }
        mesh.check_tiling()?;
        Ok(mesh)
    }

    fn make_block(&self, id: usize, level: [u32; 2], cell: [i64; 2]) -> Block {
        let base = self.base_extent();
        let origin = [self.to_phys(0, cell[0]), self.to_phys(1, cell[1])];
        let extent = [
            base[0] / (1u64 << level[0]) as f64,
            base[1] / (1u64 << level[1]) as f64,
        ];
        Block {
            id,
            level,
            cell,
            origin,
            extent,
            points_per_dim: self.points_per_dim,
        }
    }

    pub fn base_extent(&self) -> [f64; 2] {
        let e = self.domain.extent();
        [
            e[0] / self.base_blocks[0] as f64,
            e[1] / self.base_blocks[1] as f64,
        ]
    }

    /// Domain length in units.
    pub fn length_units(&self, d: usize) -> i64 {
        self.base_blocks[d] as i64 * UNIT
    }

    pub fn to_phys(&self, d: usize, u: i64) -> f64 {
        self.domain.lo[d] + u as f64 / UNIT as f64 * self.base_extent()[d]
    }

    pub fn block(&self, id: usize) -> Result<&Block, MeshError> {
        self.blocks
            .iter()
            .find(|b| b.id == id)
            .ok_or(MeshError::UnknownBlock(id))
    }

    pub fn block_index(&self, id: usize) -> Result<usize, MeshError> {
        self.blocks
            .iter()
            .position(|b| b.id == id)
            .ok_or(MeshError::UnknownBlock(id))
    }

    pub fn is_classified(&self) -> bool {
        self.policy.is_some()
    }

    fn invalidate(&mut self) {
        self.policy = None;
        self.interfaces.clear();
        self.junctions.clear();
        self.contacts.clear();
        self.patches.clear();
        self.segments.clear();
    }

    /// Checks area and pairwise disjointness.
    pub fn check_tiling(&self) -> Result<(), MeshError> {
        let len = [self.length_units(0), self.length_units(1)];
        let mut area: i128 = 0;
        for b in &self.blocks {
            let s = b.size_units();
            let hi = b.upper_units();
            if b.cell[0] < 0 || b.cell[1] < 0 || hi[0] > len[0] || hi[1] > len[1] {
                return Err(MeshError::NotTiled(format!(
                    "block {} leaves the domain",
                    b.id
                )));
            }
            if b.cell[0] % s[0] != 0 || b.cell[1] % s[1] != 0 {
                return Err(MeshError::NotTiled(format!(
                    "block {} is not aligned to its level",
                    b.id
                )));
            }
            area += s[0] as i128 * s[1] as i128;
        }
        if area != len[0] as i128 * len[1] as i128 {
            return Err(MeshError::NotTiled(
                "block areas do not sum to the domain area".into(),
            ));
        }
        for (i, a) in self.blocks.iter().enumerate() {
            let (alo, ahi) = (a.cell, a.upper_units());
            for b in &self.blocks[i + 1..] {
                let (blo, bhi) = (b.cell, b.upper_units());
                if alo[0] < bhi[0] && blo[0] < ahi[0] && alo[1] < bhi[1] && blo[1] < ahi[1] {
                    return Err(MeshError::NotTiled(format!(
                        "blocks {} and {} overlap",
                        a.id, b.id
                    )));
                }
            }
        }
        Ok(())
    }

    /// All face contacts between blocks, including periodic wraps.
    pub(crate) fn find_contacts(&self) -> Vec<Contact> {
        let len = [self.length_units(0), self.length_units(1)];
        let mut out = Vec::new();
        for (ia, a) in self.blocks.iter().enumerate() {
            let ahi = a.upper_units();
            for (ib, b) in self.blocks.iter().enumerate() {
                let bhi = b.upper_units();
                for d in 0..2 {
                    let t = 1 - d;
                    let direct = ahi[d] == b.cell[d] && ahi[d] < len[d];
                    let wrap = self.periodic[d] && ahi[d] == len[d] && b.cell[d] == 0;
                    if !(direct || wrap) {
                        continue;
                    }
                    let from = a.cell[t].max(b.cell[t]);
                    let to = ahi[t].min(bhi[t]);
                    if from < to {
                        out.push(Contact {
                            lower: ia,
                            upper: ib,
                            dim: d,
                            periodic: wrap,
                            coord: if wrap { 0 } else { ahi[d] },
                            from,
                            to,
                            fd: false,
                        });
                    }
                }
            }
        }
        out
    }

    pub fn is_balanced(&self) -> bool {
        self.find_unbalanced().is_empty()
    }

    fn find_unbalanced(&self) -> Vec<(usize, usize)> {
        let mut req = Vec::new();
        for c in self.find_contacts() {
            let (la, lb) = (self.blocks[c.lower].level, self.blocks[c.upper].level);
            for d in 0..2 {
                if la[d] > lb[d] + 1 {
                    req.push((c.upper, d));
                } else if lb[d] > la[d] + 1 {
                    req.push((c.lower, d));
                }
            }
        }
        req.sort_unstable();
        req.dedup();
        req
    }

    /// Replaces block `idx` by its children; returns the new ids.
    fn split(&mut self, idx: usize, dims: &[usize]) -> Result<Vec<usize>, MeshError> {
        let parent = self.blocks[idx].clone();
        let mut level = parent.level;
        for &d in dims {
            level[d] += 1;
            if level[d] > MAX_LEVEL {
                return Err(MeshError::TooDeep);
            }
        }
        let size = [UNIT >> level[0], UNIT >> level[1]];
        let nx = if dims.contains(&0) { 2 } else { 1 };
        let ny = if dims.contains(&1) { 2 } else { 1 };
        let mut children = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let cell = [parent.cell[0] + i * size[0], parent.cell[1] + j * size[1]];
                let id = self.next_id;
                self.next_id += 1;
                children.push(self.make_block(id, level, cell));
            }
        }
        let ids = children.iter().map(|b| b.id).collect();
        self.blocks.splice(idx..idx + 1, children);
        Ok(ids)
    }

    /// Halves a block in the given dimensions and restores 2:1 balance.
    pub fn refine_block(&self, id: usize, dims: &[usize]) -> Result<Mesh, MeshError> {
        let mut m = self.clone();
        m.refine_in_place(id, dims)?;
        m.balance_in_place()?;
        Ok(m)
    }

    pub(crate) fn refine_in_place(
        &mut self,
        id: usize,
        dims: &[usize],
    ) -> Result<Vec<usize>, MeshError> {
        if dims.is_empty() {
            return Err(MeshError::NoDimensions);
        }
        if let Some(&d) = dims.iter().find(|&&d| d >= 2) {
            return Err(MeshError::BadDimension(d));
        }
        let mut dims = dims.to_vec();
        dims.sort_unstable();
        dims.dedup();
        let idx = self.block_index(id)?;
        self.invalidate();
        self.split(idx, &dims)
    }

    /// Applies the refinements needed for every adjacent pair to differ by at most
    /// one level per dimension.
    pub fn enforce_two_to_one(&self) -> Mesh {
        let mut m = self.clone();
        m.balance_in_place()
            .expect("balancing cannot exceed the depth of an existing block");
        m
    }

    pub(crate) fn balance_in_place(&mut self) -> Result<(), MeshError> {
        loop {
            let req = self.find_unbalanced();
            if req.is_empty() {
                return Ok(());
            }
            self.invalidate();
            let mut per_block: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
            for (idx, d) in req {
                per_block.entry(self.blocks[idx].id).or_default().push(d);
            }
            for (id, dims) in per_block {
                let idx = self.block_index(id)?;
                self.split(idx, &dims)?;
            }
        }
    }

    /// Same layout with `(n-1) 2^levels + 1` points per block dimension.
    pub fn with_extra_levels(&self, levels: u32) -> Mesh {
        let mut m = self.clone();
        let p = self.points_per_dim;
        m.points_per_dim = [
            (p[0] - 1) * (1 << levels) + 1,
            (p[1] - 1) * (1 << levels) + 1,
        ];
        for b in &mut m.blocks {
            b.points_per_dim = m.points_per_dim;
        }
        m.reclassify();
        m
    }

    pub fn with_periodic(&self, periodic: [bool; 2]) -> Mesh {
        let mut m = self.clone();
        m.periodic = periodic;
        m.reclassify();
        m
    }

    fn reclassify(&mut self) {
        if let Some(p) = self.policy {
            self.invalidate();
            // layout was valid before; a failure here means the new periodicity or
            // point count created an unsupported configuration
            if let Ok(m) = self.classify_interfaces(p) {
                *self = m;
            }
        }
    }

    pub fn patches(&self) -> Result<&[Patch], MeshError> {
        if !self.is_classified() {
            return Err(MeshError::Unclassified);
        }
        Ok(&self.patches)
    }

    pub fn segments(&self) -> Result<&[Segment], MeshError> {
        if !self.is_classified() {
            return Err(MeshError::Unclassified);
        }
        Ok(&self.segments)
    }

    /// Unique grid points per dimension of a patch.
    pub fn patch_points(&self, p: &Patch) -> [usize; 2] {
        let mut n = [0; 2];
        for d in 0..2 {
            let m = self.points_per_dim[d] - 1;
            n[d] = p.nblocks[d] * m + usize::from(!p.loops[d]);
        }
        n
    }

    pub fn patch_spacing(&self, p: &Patch) -> [f64; 2] {
        let b = &self.blocks[p.blocks[0]];
        b.h()
    }

    /// Total number of distinct grid points summed over patches.
    pub fn unique_point_count(&self) -> Result<usize, MeshError> {
        Ok(self
            .patches()?
            .iter()
            .map(|p| {
                let n = self.patch_points(p);
                n[0] * n[1]
            })
            .sum())
    }

    /// Total number of stored points (every block keeps its own copy of shared lines).
    pub fn stored_point_count(&self) -> usize {
        self.blocks.len() * self.points_per_dim[0] * self.points_per_dim[1]
    }

    /// Physical faces of patches, as (patch, face).
    pub fn boundary_faces(&self) -> Result<Vec<(usize, Face)>, MeshError> {
        let mut out = Vec::new();
        for p in self.patches()? {
            for d in 0..2 {
                if self.periodic[d] {
                    continue;
                }
                let size = p.size_units();
                if p.lo[d] == 0 {
                    out.push((
                        p.id,
                        Face {
                            dim: d,
                            high: false,
                        },
                    ));
                }
                if p.lo[d] + size[d] == self.length_units(d) {
                    out.push((p.id, Face { dim: d, high: true }));
                }
            }
        }
        Ok(out)
    }

    /// Smallest grid spacing over all blocks.
    pub fn min_spacing(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| b.h())
            .fold(f64::INFINITY, f64::min)
    }

    pub fn interfaces_of(&self, id: usize) -> impl Iterator<Item = &InterfaceDescriptor> {
        self.interfaces
            .iter()
            .filter(move |i| i.side_a.0 == id || i.side_b.map(|s| s.0) == Some(id))
    }

    /// Kind of the interface between two blocks, if they touch.
    pub fn interface_kind(&self, a: usize, b: usize) -> Option<InterfaceKind> {
        self.interfaces.iter().find_map(|i| {
            let ids = (i.side_a.0, i.side_b.map(|s| s.0));
            if ids == (a, Some(b)) || ids == (b, Some(a)) {
                Some(i.kind)
            } else {
                None
            }
        })
    }
}

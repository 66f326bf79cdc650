//! Test meshes with fixed block layouts.
//!
//! Block ids follow the numbering of the figures they reproduce. `U` is one level-0
//! block in units.
//!
//! ```text
//! FIG2A            FIG2B            FIG2C              FIG7_JUNCTION
//! +-----+-----+    +-----+-----+    +-----+-----+      +-----+-----+
//! |  1  |  2  |    |  1  .  2  |    |  1  .  2  |      |  1  |  2  |
//! +=====+==+==+    +=====+=====+    +==+==+==+==+      +-----+--+--+
//! |  3  |4 .5|     |  3  #  4  |    |3 .4#7 .8|       |     |4 |5 |
//! |     |6 .7|     |     #     |    |5 .6#9 .10|      |  3  +--+++
//! +-----+--+--+    +-----+-----+    +--+--+--+--+      |     |6 |##|
//!                                                      +-----+--+--+
//! ```
//! `.` FD, `#`/`=` forced or rule-made SAT. FIG7_NAIVE splits block 2 into left and
//! right halves and block 3 into lower and upper halves. `##` is a 2x2 group of
//! level-2 blocks (ids 7-10).

use super::*;
use std::str::FromStr;

const U: i64 = UNIT;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NamedMesh {
    Fig2a,
    Fig2b,
    Fig2c,
    Fig7Naive,
    Fig7Junction,
    Fig8a,
    Fig8b,
    Fig9Adapted,
}

impl NamedMesh {
    pub const ALL: [NamedMesh; 8] = [
        NamedMesh::Fig2a,
        NamedMesh::Fig2b,
        NamedMesh::Fig2c,
        NamedMesh::Fig7Naive,
        NamedMesh::Fig7Junction,
        NamedMesh::Fig8a,
        NamedMesh::Fig8b,
        NamedMesh::Fig9Adapted,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            NamedMesh::Fig2a => "fig2a",
            NamedMesh::Fig2b => "fig2b",
            NamedMesh::Fig2c => "fig2c",
            NamedMesh::Fig7Naive => "fig7_naive",
            NamedMesh::Fig7Junction => "fig7_junction",
            NamedMesh::Fig8a => "fig8a",
            NamedMesh::Fig8b => "fig8b",
            NamedMesh::Fig9Adapted => "fig9_adapted",
        }
    }

    /// Level-0 blocks per dimension of the layout.
    pub fn base_blocks(&self) -> [usize; 2] {
        match self {
            NamedMesh::Fig8a | NamedMesh::Fig8b => [6, 6],
            NamedMesh::Fig9Adapted => [4, 4],
            _ => [2, 2],
        }
    }
}

impl FromStr for NamedMesh {
    type Err = MeshError;

    fn from_str(s: &str) -> Result<Self, MeshError> {
        let k = s.to_ascii_lowercase().replace('-', "_");
        NamedMesh::ALL
            .into_iter()
            .find(|m| m.name() == k)
            .ok_or_else(|| MeshError::UnknownName(s.to_string()))
    }
}

type Spec = (usize, [u32; 2], [i64; 2]);

fn forced(normal_dim: usize, at: i64, from: i64, to: i64) -> ForcedSat {
    ForcedSat {
        normal_dim,
        at,
        from,
        to,
    }
}

/// Subdivides the region `[x, x+w) x [y, y+h)` into level-`l` blocks, numbered from `id0`
/// row by row from the bottom.
fn fill(specs: &mut Vec<Spec>, id0: usize, l: u32, x: i64, y: i64, w: i64, h: i64) -> usize {
    let s = U >> l;
    let mut id = id0;
    let mut yy = y;
    while yy < y + h {
        let mut xx = x;
        while xx < x + w {
            specs.push((id, [l, l], [xx, yy]));
            id += 1;
            xx += s;
        }
        yy += s;
    }
    id
}

fn layout(name: NamedMesh, periodic: [bool; 2]) -> (Vec<Spec>, Vec<ForcedSat>) {
    let mut f = Vec::new();
    let specs = match name {
        NamedMesh::Fig2a => vec![
            (1, [0, 0], [0, U]),
            (2, [0, 0], [U, U]),
            (3, [0, 0], [0, 0]),
            (4, [1, 1], [U, U / 2]),
            (5, [1, 1], [3 * U / 2, U / 2]),
            (6, [1, 1], [U, 0]),
            (7, [1, 1], [3 * U / 2, 0]),
        ],
        NamedMesh::Fig2b => {
            f.push(forced(0, U, 0, U));
            f.push(forced(1, U, 0, 2 * U));
            if periodic[0] {
                f.push(forced(0, 0, 0, U));
            }
            if periodic[1] {
                f.push(forced(1, 0, 0, 2 * U));
            }
            vec![
                (1, [0, 0], [0, U]),
                (2, [0, 0], [U, U]),
                (3, [0, 0], [0, 0]),
                (4, [0, 0], [U, 0]),
            ]
        }
        NamedMesh::Fig2c => {
            f.push(forced(0, U, 0, U));
            f.push(forced(1, U, 0, 2 * U));
            if periodic[0] {
                f.push(forced(0, 0, 0, U));
            }
            if periodic[1] {
                f.push(forced(1, 0, 0, 2 * U));
            }
            let h = U / 2;
            vec![
                (1, [0, 0], [0, U]),
                (2, [0, 0], [U, U]),
                (3, [1, 1], [0, h]),
                (4, [1, 1], [h, h]),
                (5, [1, 1], [0, 0]),
                (6, [1, 1], [h, 0]),
                (7, [1, 1], [U, h]),
                (8, [1, 1], [U + h, h]),
                (9, [1, 1], [U, 0]),
                (10, [1, 1], [U + h, 0]),
            ]
        }
        NamedMesh::Fig7Junction | NamedMesh::Fig7Naive => {
            let (h, q) = (U / 2, U / 4);
            let mut s = vec![(1, [0, 0], [0, U])];
            if name == NamedMesh::Fig7Junction {
                s.push((2, [0, 0], [U, U]));
                s.push((3, [0, 0], [0, 0]));
            } else {
                s.push((2, [1, 0], [U, U]));
                s.push((11, [1, 0], [U + h, U]));
                s.push((3, [0, 1], [0, 0]));
                s.push((12, [0, 1], [0, h]));
                f.push(forced(0, U + h, U, 2 * U));
                f.push(forced(1, h, 0, U));
            }
            s.push((4, [1, 1], [U, h]));
            s.push((5, [1, 1], [U + h, h]));
            s.push((6, [1, 1], [U, 0]));
            s.push((7, [2, 2], [U + h, 0]));
            s.push((8, [2, 2], [U + h + q, 0]));
            s.push((9, [2, 2], [U + h, q]));
            s.push((10, [2, 2], [U + h + q, q]));
            s
        }
        NamedMesh::Fig8a | NamedMesh::Fig8b => {
            let mut s = Vec::new();
            let mut id = 1;
            for j in 0..6i64 {
                for i in 0..6i64 {
                    if !(1..5).contains(&i) || !(1..5).contains(&j) {
                        s.push((id, [0, 0], [i * U, j * U]));
                        id += 1;
                    }
                }
            }
            if name == NamedMesh::Fig8a {
                fill(&mut s, id, 1, U, U, 4 * U, 4 * U);
            } else {
                // level-1 ring around the level-2 centre
                for j in 0..8i64 {
                    for i in 0..8i64 {
                        if !(2..6).contains(&i) || !(2..6).contains(&j) {
                            s.push((id, [1, 1], [U + i * U / 2, U + j * U / 2]));
                            id += 1;
                        }
                    }
                }
                fill(&mut s, id, 2, 2 * U, 2 * U, 2 * U, 2 * U);
            }
            s
        }
        NamedMesh::Fig9Adapted => unreachable!("generated by adaptation"),
    };
    (specs, f)
}

/// Builds a named mesh (non-periodic) and classifies its interfaces.
pub fn build_named_mesh(
    name: NamedMesh,
    base_points: usize,
    domain: Box2,
    extra_levels: u32,
) -> Result<Mesh, MeshError> {
    build_named_mesh_with(name, base_points, domain, extra_levels, [false, false])
}

/// As [`build_named_mesh`] with the given periodicity; for FIG2B/FIG2C the wrap lines
/// copy the coupling of the parallel interior lines.
pub fn build_named_mesh_with(
    name: NamedMesh,
    base_points: usize,
    domain: Box2,
    extra_levels: u32,
    periodic: [bool; 2],
) -> Result<Mesh, MeshError> {
    if name == NamedMesh::Fig9Adapted {
        return crate::adaptivity::fig9_mesh(base_points, domain, extra_levels);
    }
    let (specs, forced) = layout(name, periodic);
    let mut m = Mesh::from_blocks(
        domain,
        name.base_blocks(),
        [base_points; 2],
        periodic,
        &specs,
    )?;
    m.forced_sat = forced;
    let m = m.classify_interfaces(JunctionPolicy::FdWherePossible)?;
    Ok(if extra_levels == 0 {
        m
    } else {
        m.with_extra_levels(extra_levels)
    })
}

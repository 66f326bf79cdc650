//! Glue operators: coarse/fine interpolation for nonconforming interfaces and the
//! junction operators coupling a continuous line of points to two (or more) abutting pieces.

mod closures;

use crate::sbp_core::coeffs::{r, Rat};
use crate::sbp_core::{boundary_rows, min_points, ExactOperators, SbpError};
use crate::sparse::{Csr, Triplets};
use num_traits::{One, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum InterpError {
    #[error("unsupported order {0}")]
    UnsupportedOrder(usize),
    #[error("{what}: {got} points, need at least {need} for order {order}")]
    TooFewPoints {
        what: &'static str,
        order: usize,
        got: usize,
        need: usize,
    },
    #[error("split at {at} lies inside the closure or strip of a neighbouring split or edge")]
    SplitTooClose { at: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
}

impl From<SbpError> for InterpError {
    fn from(e: SbpError) -> Self {
        match e {
            SbpError::UnsupportedOrder(o) => InterpError::UnsupportedOrder(o),
            SbpError::TooFewPoints { order, n, min } => InterpError::TooFewPoints {
                what: "SBP norm",
                order,
                got: n,
                need: min,
            },
            SbpError::BadSpacing(h) => InterpError::Dimension(format!("bad spacing {h}")),
        }
    }
}

/// Junction strip: rows are the last points of the left piece followed by the first
/// points of the right piece, columns are the continuous line around the split.
#[derive(Clone, Debug)]
pub struct JunctionStrip {
    pub order: usize,
    /// Columns reach this far on each side of the split.
    pub half_width: usize,
    /// Rows per piece.
    pub rows_per_side: usize,
    pub rows: Vec<Vec<Rat>>,
}

fn rat_rows(v: &[(&[i64], i64)]) -> Vec<Vec<Rat>> {
    v.iter()
        .map(|(row, d)| row.iter().map(|&n| r(n, *d)).collect())
        .collect()
}

/// The junction restriction strip (I_w^u stacked over I_w^v around the split).
pub fn junction_restriction(order: usize) -> Result<JunctionStrip, InterpError> {
    let rows = match order {
        2 => rat_rows(&[(&[1], 1), (&[1], 1)]),
        4 => rat_rows(&[
            (&[1, 0, 0, 0, 0, 0, 0], 1),
            (&[0, 1, 0, 0, 0, 0, 0], 1),
            (&[-3, 10, 48, 4, 0, 0, 0], 59),
            (&[2, -5, 2, 20, -2, 0, 0], 17),
            (&[0, 0, -2, 20, 2, -5, 2], 17),
            (&[0, 0, 0, 4, 48, 10, -3], 59),
            (&[0, 0, 0, 0, 0, 1, 0], 1),
            (&[0, 0, 0, 0, 0, 0, 1], 1),
        ]),
        6 => rat_rows(&[
            (&[1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0], 1),
            (&[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0], 1),
            (&[0, 0, 1, 0, 0, 0, 0, 0, 0, 0, 0], 1),
            (&[-601, 2289, -3117, 4320, 0, -198, 18, 0, 0, 0, 0], 2711),
            (&[1803, -6104, 6234, 0, 8604, 1584, -108, 0, 0, 0, 0], 12013),
            (
                &[-3606, 11445, -10390, 0, 1980, 15660, -1440, 0, 0, 0, 0],
                13649,
            ),
            (
                &[0, 0, 0, 0, -1440, 15660, 1980, 0, -10390, 11445, -3606],
                13649,
            ),
            (&[0, 0, 0, 0, -108, 1584, 8604, 0, 6234, -6104, 1803], 12013),
            (&[0, 0, 0, 0, 18, -198, 0, 4320, -3117, 2289, -601], 2711),
            (&[0, 0, 0, 0, 0, 0, 0, 0, 1, 0, 0], 1),
            (&[0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 0], 1),
            (&[0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1], 1),
        ]),
        _ => return Err(InterpError::UnsupportedOrder(order)),
    };
    let half_width = (rows[0].len() - 1) / 2;
    Ok(JunctionStrip {
        order,
        half_width,
        rows_per_side: rows.len() / 2,
        rows,
    })
}

/// Norm weights (unit spacing) of the rows of a strip: reversed closure for the left
/// piece, closure for the right piece.
pub fn strip_row_weights(order: usize) -> Result<Vec<Rat>, InterpError> {
    let strip = junction_restriction(order)?;
    let k = strip.rows_per_side;
    let ex = ExactOperators::new(order, 2 * k.max(min_points(order)?), false)?;
    let mut w: Vec<Rat> = ex.p[..k].iter().rev().cloned().collect();
    w.extend(ex.p[..k].iter().cloned());
    Ok(w)
}

/// The strip of I_uv^w obtained from the compatibility relation with an interior
/// (unit) norm on the continuous line: `stripᵀ · diag(row weights)`.
pub fn junction_prolongation_strip(order: usize) -> Result<Vec<Vec<Rat>>, InterpError> {
    let strip = junction_restriction(order)?;
    let w = strip_row_weights(order)?;
    let ncols = strip.rows[0].len();
    Ok((0..ncols)
        .map(|c| {
            strip
                .rows
                .iter()
                .zip(&w)
                .map(|(row, wt)| row[c] * wt)
                .collect()
        })
        .collect())
}

fn to_f64(x: &Rat) -> f64 {
    x.to_f64().unwrap()
}

fn sbp_weights(order: usize, n: usize, h: f64, periodic: bool) -> Result<Vec<f64>, InterpError> {
    let ex = ExactOperators::new(order, n, periodic)?;
    Ok(ex.p.iter().map(|v| to_f64(v) * h).collect())
}

/// Continuous line of points with splits where abutting pieces change.
#[derive(Clone, Debug, PartialEq)]
pub struct SplitLine {
    pub n: usize,
    pub periodic: bool,
    /// Sorted split indices. Non-periodic: strictly inside (0, n-1).
    pub splits: Vec<usize>,
}

impl SplitLine {
    /// (start index, number of points) of each virtual piece, in order.
    pub fn pieces(&self) -> Vec<(usize, usize)> {
        let s = &self.splits;
        if self.periodic {
            if s.is_empty() {
                return vec![(0, self.n)];
            }
            (0..s.len())
                .map(|k| {
                    let a = s[k];
                    let b = if k + 1 < s.len() {
                        s[k + 1]
                    } else {
                        s[0] + self.n
                    };
                    (a, b - a + 1)
                })
                .collect()
        } else {
            let mut cuts = vec![0];
            cuts.extend(s.iter().cloned());
            cuts.push(self.n - 1);
            cuts.windows(2).map(|w| (w[0], w[1] - w[0] + 1)).collect()
        }
    }

    fn is_single_loop(&self) -> bool {
        self.periodic && self.splits.is_empty()
    }
}

/// Restriction from a continuous line onto virtual pieces at the line's resolution:
/// identity, with the junction strip written around every split.
pub fn line_restriction(order: usize, line: &SplitLine) -> Result<Csr, InterpError> {
    let strip = junction_restriction(order)?;
    let br = boundary_rows(order)?;
    let (n, rw, k) = (line.n, strip.half_width, strip.rows_per_side);
    let pieces = line.pieces();
    let minp = min_points(order)?;
    if !line.is_single_loop() {
        if let Some(&(_, len)) = pieces.iter().find(|p| p.1 < minp) {
            return Err(InterpError::TooFewPoints {
                what: "virtual piece",
                order,
                got: len,
                need: minp,
            });
        }
    }
    if !line.periodic {
        for &s in &line.splits {
            if s == 0 || s >= n - 1 || s < rw + br || s + rw + br > n - 1 {
                return Err(InterpError::SplitTooClose { at: s });
            }
        }
    }
    let ns = line.splits.len();
    for i in 0..ns {
        if i + 1 < ns || line.periodic {
            let next = if i + 1 < ns {
                line.splits[i + 1]
            } else {
                line.splits[0] + n
            };
            if next - line.splits[i] <= 2 * rw {
                return Err(InterpError::SplitTooClose { at: line.splits[i] });
            }
        }
    }
    let nrows: usize = pieces.iter().map(|p| p.1).sum();
    let mut rows: Vec<Vec<(usize, f64)>> = Vec::with_capacity(nrows);
    let mut piece_row0 = Vec::new();
    for &(start, len) in &pieces {
        piece_row0.push(rows.len());
        for j in 0..len {
            rows.push(vec![((start + j) % n, 1.0)]);
        }
    }
    // strip around split k: left piece is k-1 (cyclically), right piece is k
    let np = pieces.len();
    for (k_split, &s) in line.splits.iter().enumerate() {
        let (left, right) = if line.periodic {
            ((k_split + np - 1) % np, k_split)
        } else {
            (k_split, k_split + 1)
        };
        let left_end = piece_row0[left] + pieces[left].1 - 1;
        let right_start = piece_row0[right];
        for (ri, row) in strip.rows.iter().enumerate() {
            let target = if ri < k {
                left_end + 1 + ri - k
            } else {
                right_start + ri - k
            };
            rows[target] = row
                .iter()
                .enumerate()
                .filter(|(_, v)| !v.is_zero())
                .map(|(c, v)| (((s + n + c) - rw) % n, to_f64(v)))
                .collect();
        }
    }
    let mut t = Triplets::new(nrows, n);
    for (i, row) in rows.iter().enumerate() {
        for &(j, v) in row {
            t.push(i, j, v);
        }
    }
    Ok(t.to_csr())
}

/// `P_a^-1 Mᵀ P_b`: the operator compatible with `M` (which maps a-data to b-data).
pub fn compatible_adjoint(m: &Csr, p_a: &[f64], p_b: &[f64]) -> Csr {
    assert_eq!(m.ncols, p_a.len());
    assert_eq!(m.nrows, p_b.len());
    let inv: Vec<f64> = p_a.iter().map(|v| 1.0 / v).collect();
    m.transpose().scale_cols(p_b).scale_rows(&inv)
}

/// Junction prolongation from the compatibility relation, for a line of `n_w`
/// points with norm `p_w` and virtual pieces with norm `p_virtual`.
pub fn junction_prolongation(
    restriction: &Csr,
    p_w: &[f64],
    p_virtual: &[f64],
) -> Result<Csr, InterpError> {
    if restriction.ncols != p_w.len() || restriction.nrows != p_virtual.len() {
        return Err(InterpError::Dimension(format!(
            "restriction is {}x{}, norms have {} and {} entries",
            restriction.nrows,
            restriction.ncols,
            p_virtual.len(),
            p_w.len()
        )));
    }
    Ok(compatible_adjoint(restriction, p_w, p_virtual))
}

fn midpoint_stencil(order: usize) -> Vec<f64> {
    match order {
        2 => vec![0.5, 0.5],
        4 => [-1.0, 9.0, 9.0, -1.0].iter().map(|v| v / 16.0).collect(),
        6 => [3.0, -25.0, 150.0, 150.0, -25.0, 3.0]
            .iter()
            .map(|v| v / 256.0)
            .collect(),
        _ => unreachable!(),
    }
}

/// Smallest number of coarse points supported by the non-periodic interpolation pair.
pub fn min_coarse_points(order: usize) -> Result<usize, InterpError> {
    match order {
        2 => Ok(3),
        4 => Ok(10),
        6 => Ok(18),
        _ => Err(InterpError::UnsupportedOrder(order)),
    }
}

/// Coarse-to-fine interpolation onto `2 nc - 1` fine points (`2 nc` if periodic).
pub fn coarse_to_fine(order: usize, nc: usize, periodic: bool) -> Result<Csr, InterpError> {
    let need = if periodic {
        order
    } else {
        min_coarse_points(order)?
    };
    if ![2, 4, 6].contains(&order) {
        return Err(InterpError::UnsupportedOrder(order));
    }
    if nc < need {
        return Err(InterpError::TooFewPoints {
            what: "coarse side",
            order,
            got: nc,
            need,
        });
    }
    let nf = if periodic { 2 * nc } else { 2 * nc - 1 };
    let mid = midpoint_stencil(order);
    let w = mid.len() / 2;
    let mut t = Triplets::new(nf, nc);
    let block: Vec<Vec<f64>> = match order {
        4 if !periodic => closures::C2F_4.iter().map(|r| r.to_vec()).collect(),
        6 if !periodic => closures::C2F_6.iter().map(|r| r.to_vec()).collect(),
        _ => Vec::new(),
    };
    let nb = block.len();
    for i in 0..nf {
        if !periodic && i < nb {
            for (j, &v) in block[i].iter().enumerate() {
                t.push(i, j, v);
            }
        } else if !periodic && i >= nf - nb {
            for (j, &v) in block[nf - 1 - i].iter().enumerate() {
                t.push(i, nc - 1 - j, v);
            }
        } else if i % 2 == 0 {
            t.push(i, i / 2, 1.0);
        } else {
            let m = i / 2;
            for (k, &v) in mid.iter().enumerate() {
                let j = (m + nc + k + 1 - w) % nc;
                t.push(i, j, v);
            }
        }
    }
    Ok(t.to_csr())
}

/// Fine-to-coarse restriction compatible with [`coarse_to_fine`]:
/// `P_c I_f2c = I_c2fᵀ P_f` with `h_f = h_c / 2`.
pub fn fine_to_coarse(order: usize, nc: usize, periodic: bool) -> Result<Csr, InterpError> {
    let c2f = coarse_to_fine(order, nc, periodic)?;
    let pc = sbp_weights(order, nc, 1.0, periodic)?;
    let pf = sbp_weights(order, c2f.nrows, 0.5, periodic)?;
    Ok(compatible_adjoint(&c2f, &pc, &pf))
}

/// `(I_f2c, I_c2f)` for `n_coarse` coarse points.
pub fn nonconforming_pair(order: usize, n_coarse: usize) -> Result<(Csr, Csr), InterpError> {
    Ok((
        fine_to_coarse(order, n_coarse, false)?,
        coarse_to_fine(order, n_coarse, false)?,
    ))
}

pub fn block_diag(mats: &[&Csr]) -> Csr {
    let nr = mats.iter().map(|m| m.nrows).sum();
    let nc = mats.iter().map(|m| m.ncols).sum();
    let mut t = Triplets::new(nr, nc);
    let (mut r0, mut c0) = (0, 0);
    for m in mats {
        for i in 0..m.nrows {
            for (j, v) in m.row(i) {
                t.push(r0 + i, c0 + j, v);
            }
        }
        r0 += m.nrows;
        c0 += m.ncols;
    }
    t.to_csr()
}

/// Operators of the single junction of a continuous line of `2n - 1` points split
/// in the middle, the u piece covering the first `n` points and v the last `n`.
#[derive(Clone, Debug)]
pub struct GlueOperators {
    pub order: usize,
    pub n: usize,
    pub i_f2c: Csr,
    pub i_c2f: Csr,
    pub i_w_u: Csr,
    pub i_w_v: Csr,
    pub i_uv_w: Csr,
    pub tilde_w_u: Csr,
    pub tilde_w_v: Csr,
    pub tilde_uv_w: Csr,
    /// Unit-spacing norms: continuous line, coarse piece, fine piece (spacing 1/2).
    pub p_w: Vec<f64>,
    pub p_piece: Vec<f64>,
    pub p_fine: Vec<f64>,
}

impl GlueOperators {
    pub fn new(order: usize, n: usize) -> Result<Self, InterpError> {
        let line = SplitLine {
            n: 2 * n - 1,
            periodic: false,
            splits: vec![n - 1],
        };
        let j = line_restriction(order, &line)?;
        let p_w = sbp_weights(order, 2 * n - 1, 1.0, false)?;
        let p_piece = sbp_weights(order, n, 1.0, false)?;
        let p_virtual: Vec<f64> = p_piece.iter().chain(p_piece.iter()).cloned().collect();
        let i_uv_w = junction_prolongation(&j, &p_w, &p_virtual)?;
        let (i_w_u, i_w_v) = split_rows(&j, n);
        let (i_f2c, i_c2f) = nonconforming_pair(order, n)?;
        let p_fine = sbp_weights(order, 2 * n - 1, 0.5, false)?;
        let (tilde_w_u, tilde_w_v) = refined_junction_operators(&i_c2f, &i_w_u, &i_w_v);
        let tilde_uv_w = i_uv_w.matmul(&block_diag(&[&i_f2c, &i_f2c]));
        Ok(Self {
            order,
            n,
            i_f2c,
            i_c2f,
            i_w_u,
            i_w_v,
            i_uv_w,
            tilde_w_u,
            tilde_w_v,
            tilde_uv_w,
            p_w,
            p_piece,
            p_fine,
        })
    }

    /// max |I_uv^w - P_w^-1 (I_w^u, I_w^v)ᵀ (P_u, P_v)|
    pub fn compatibility_residual(&self) -> f64 {
        let pv: Vec<f64> = self
            .p_piece
            .iter()
            .chain(self.p_piece.iter())
            .cloned()
            .collect();
        let stacked = vstack(&self.i_w_u, &self.i_w_v);
        max_diff(&self.i_uv_w, &compatible_adjoint(&stacked, &self.p_w, &pv))
    }

    /// Same residual for the refined junction (tilde operators, fine piece norms).
    pub fn refined_compatibility_residual(&self) -> f64 {
        let pv: Vec<f64> = self
            .p_fine
            .iter()
            .chain(self.p_fine.iter())
            .cloned()
            .collect();
        let stacked = vstack(&self.tilde_w_u, &self.tilde_w_v);
        max_diff(
            &self.tilde_uv_w,
            &compatible_adjoint(&stacked, &self.p_w, &pv),
        )
    }
}

/// Ĩ_w^u = I_c2f I_w^u and Ĩ_w^v = I_c2f I_w^v.
pub fn refined_junction_operators(i_c2f: &Csr, i_w_u: &Csr, i_w_v: &Csr) -> (Csr, Csr) {
    (i_c2f.matmul(i_w_u), i_c2f.matmul(i_w_v))
}

fn split_rows(m: &Csr, k: usize) -> (Csr, Csr) {
    let mut a = Triplets::new(k, m.ncols);
    let mut b = Triplets::new(m.nrows - k, m.ncols);
    for i in 0..m.nrows {
        for (j, v) in m.row(i) {
            if i < k {
                a.push(i, j, v);
            } else {
                b.push(i - k, j, v);
            }
        }
    }
    (a.to_csr(), b.to_csr())
}

pub fn vstack(a: &Csr, b: &Csr) -> Csr {
    assert_eq!(a.ncols, b.ncols);
    let mut t = Triplets::new(a.nrows + b.nrows, a.ncols);
    for i in 0..a.nrows {
        for (j, v) in a.row(i) {
            t.push(i, j, v);
        }
    }
    for i in 0..b.nrows {
        for (j, v) in b.row(i) {
            t.push(a.nrows + i, j, v);
        }
    }
    t.to_csr()
}

pub fn max_diff(a: &Csr, b: &Csr) -> f64 {
    assert_eq!((a.nrows, a.ncols), (b.nrows, b.ncols));
    let mut worst: f64 = 0.0;
    for i in 0..a.nrows {
        let mut row: Vec<(usize, f64)> = a.row(i).collect();
        row.extend(b.row(i).map(|(j, v)| (j, -v)));
        row.sort_by_key(|e| e.0);
        let mut k = 0;
        while k < row.len() {
            let mut s = 0.0;
            let j = row[k].0;
            while k < row.len() && row[k].0 == j {
                s += row[k].1;
                k += 1;
            }
            worst = worst.max(s.abs());
        }
    }
    worst
}

/// Relative resolution of a piece against the continuous line.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Resolution {
    Same,
    /// Piece has half the spacing.
    Finer,
    /// Piece has twice the spacing.
    Coarser,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PieceSpec {
    pub n: usize,
    pub h: f64,
    pub resolution: Resolution,
}

/// Tangential coupling of one continuous line (w) with the pieces across from it.
#[derive(Clone, Debug)]
pub struct SegmentGlue {
    /// pieces <- w, rows stacked piece by piece.
    pub to_pieces: Csr,
    /// w <- pieces, compatible with `to_pieces`.
    pub to_w: Csr,
    pub piece_offsets: Vec<usize>,
}

/// Builds the coupling of a continuous line (`line`, spacing `h_w`) with the pieces
/// across from it. Pieces follow the virtual pieces of `line` in order.
pub fn segment_glue(
    order: usize,
    line: &SplitLine,
    h_w: f64,
    pieces: &[PieceSpec],
) -> Result<SegmentGlue, InterpError> {
    let virt = line.pieces();
    if virt.len() != pieces.len() {
        return Err(InterpError::Dimension(format!(
            "{} virtual pieces but {} pieces",
            virt.len(),
            pieces.len()
        )));
    }
    let loop_piece = line.is_single_loop();
    let j = line_restriction(order, line)?;
    let p_w = sbp_weights(order, line.n, h_w, line.periodic)?;
    let mut blocks = Vec::new();
    let mut p_pieces = Vec::new();
    let mut offsets = vec![0];
    for (&(_, lv), spec) in virt.iter().zip(pieces) {
        let c = match spec.resolution {
            Resolution::Same => {
                if spec.n != lv {
                    return Err(InterpError::Dimension(format!(
                        "piece has {} points, virtual {}",
                        spec.n, lv
                    )));
                }
                Csr::identity(lv)
            }
            Resolution::Finer => {
                let c = coarse_to_fine(order, lv, loop_piece)?;
                if c.nrows != spec.n {
                    return Err(InterpError::Dimension(format!(
                        "fine piece has {} points, expected {}",
                        spec.n, c.nrows
                    )));
                }
                c
            }
            Resolution::Coarser => {
                let f = fine_to_coarse(order, spec.n, loop_piece)?;
                if f.ncols != lv {
                    return Err(InterpError::Dimension(format!(
                        "coarse piece has {} points for {} virtual",
                        spec.n, lv
                    )));
                }
                f
            }
        };
        p_pieces.extend(sbp_weights(order, spec.n, spec.h, loop_piece)?);
        offsets.push(offsets.last().unwrap() + spec.n);
        blocks.push(c);
    }
    let refs: Vec<&Csr> = blocks.iter().collect();
    let to_pieces = block_diag(&refs).matmul(&j);
    let to_w = compatible_adjoint(&to_pieces, &p_w, &p_pieces);
    Ok(SegmentGlue {
        to_pieces,
        to_w,
        piece_offsets: offsets,
    })
}

/// Exact-arithmetic polynomial check of a strip: returns the largest degree `d`
/// such that every row reproduces `x^k` (k <= d) on its target node.
pub fn strip_exact_degree(order: usize) -> Result<usize, InterpError> {
    let strip = junction_restriction(order)?;
    let k = strip.rows_per_side;
    let ncols = strip.rows[0].len();
    let centre = strip.half_width;
    let target = |ri: usize| {
        if ri < k {
            centre + 1 + ri - k
        } else {
            centre + ri - k
        }
    };
    let mut deg = 0;
    'outer: for d in 0..ncols {
        for (ri, row) in strip.rows.iter().enumerate() {
            let mut s = Rat::zero();
            for (c, v) in row.iter().enumerate() {
                s += *v * pow(c, d);
            }
            if s != pow(target(ri), d) {
                break 'outer;
            }
        }
        deg = d;
    }
    Ok(deg)
}

fn pow(x: usize, d: usize) -> Rat {
    let mut p = Rat::one();
    for _ in 0..d {
        p *= Rat::from_integer(x as i128);
    }
    p
}

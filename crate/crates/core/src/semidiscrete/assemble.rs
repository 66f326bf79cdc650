use super::{Equation, Layout, PenaltySet, SemiError};
use crate::interpolation::{segment_glue, PieceSpec, Resolution, SplitLine};
use crate::mesh::{Mesh, Segment, SegmentFace, Side, UNIT};
use crate::sparse::{Csr, Triplets};

pub(super) fn build(
    mesh: &Mesh,
    layout: &Layout,
    eq: &Equation,
    pen: &PenaltySet,
) -> Result<Csr, SemiError> {
    let n = layout.unique_len();
    let mut t = Triplets::new(n, n);
    for p in 0..layout.patches.len() {
        interior(layout, p, eq, &mut t);
    }
    for seg in mesh.segments()? {
        segment(mesh, layout, seg, eq, pen, &mut t)?;
    }
    for (p, face) in mesh.boundary_faces()? {
        physical(layout, p, face.dim, face.high, eq, &mut t);
    }
    Ok(t.to_csr())
}

fn interior(l: &Layout, p: usize, eq: &Equation, t: &mut Triplets) {
    let [nx, ny] = l.patch_dims[p];
    let [ox, oy] = &l.ops[p];
    let (dx, dy, scale) = match eq {
        Equation::Schrodinger { .. } => (&ox.d2, &oy.d2, [1.0, 1.0]),
        Equation::Advection { a } => (&ox.d1, &oy.d1, *a),
    };
    for j in 0..ny {
        for i in 0..nx {
            let r = l.index(p, i, j);
            if scale[0] != 0.0 {
                for (c, v) in dx.row(i) {
                    t.push(r, l.index(p, c, j), scale[0] * v);
                }
            }
            if scale[1] != 0.0 {
                for (c, v) in dy.row(j) {
                    t.push(r, l.index(p, i, c), scale[1] * v);
                }
            }
            if let Equation::Schrodinger { potential, .. } = eq {
                let x = l.coords[r];
                let v = potential.eval(x[0], x[1]);
                if v != 0.0 {
                    t.push(r, r, -v);
                }
            }
        }
    }
}

/// One side of a segment: patch faces in trace order.
struct Side1 {
    /// (patch, tangential index) for every trace position.
    pts: Vec<(usize, usize)>,
    /// Normal index of the face.
    above: bool,
}

impl Side1 {
    fn face_k(&self, l: &Layout, p: usize, d: usize) -> usize {
        if self.above {
            0
        } else {
            l.patch_dims[p][d] - 1
        }
    }

    /// Unique index of the face point at trace position r.
    fn at(&self, l: &Layout, d: usize, r: usize) -> usize {
        let (p, q) = self.pts[r];
        l.index_nt(p, d, self.face_k(l, p, d), q)
    }

    /// Normal derivative row at the face: (unique index, coefficient, 1/P_k of that row).
    fn srow(&self, l: &Layout, d: usize, r: usize) -> Vec<(usize, f64, f64)> {
        let (p, q) = self.pts[r];
        let op = &l.ops[p][d];
        let k0 = self.face_k(l, p, d);
        op.s.row(k0)
            .map(|(k, s)| (l.index_nt(p, d, k, q), s, 1.0 / op.p[k]))
            .collect()
    }

    fn pinv_face(&self, l: &Layout, d: usize, r: usize) -> f64 {
        let (p, _) = self.pts[r];
        1.0 / l.ops[p][d].p[self.face_k(l, p, d)]
    }
}

/// Grid index of a unit offset along dimension `t` of a patch.
fn grid_index(mesh: &Mesh, level: u32, t: usize, units: i64) -> Result<usize, SemiError> {
    let bu = UNIT >> level;
    let m = (mesh.points_per_dim[t] - 1) as i64;
    if (units * m) % bu != 0 {
        return Err(SemiError::Unsupported(format!(
            "split at {units} units is not a grid point"
        )));
    }
    Ok((units * m / bu) as usize)
}

fn segment(
    mesh: &Mesh,
    l: &Layout,
    seg: &Segment,
    eq: &Equation,
    pen: &PenaltySet,
    t: &mut Triplets,
) -> Result<(), SemiError> {
    let d = seg.normal_dim;
    let td = seg.tangential_dim();
    let len = mesh.length_units(td);
    let pw = seg.w.patch;
    let wpatch = &l.patches[pw];
    let n_w = l.patch_dims[pw][td];
    let wlev = wpatch.level[td];
    let splits = seg
        .splits
        .iter()
        .map(|&s| grid_index(mesh, wlev, td, s))
        .collect::<Result<Vec<_>, _>>()?;
    let line = SplitLine {
        n: n_w,
        periodic: seg.w.is_loop,
        splits,
    };

    let mut specs = Vec::new();
    let mut piece_pts = Vec::new();
    for (k, f) in seg.pieces.iter().enumerate() {
        let pp = &l.patches[f.patch];
        let np = l.patch_dims[f.patch][td];
        let res = match pp.level[td].cmp(&wlev) {
            std::cmp::Ordering::Equal => Resolution::Same,
            std::cmp::Ordering::Greater => Resolution::Finer,
            std::cmp::Ordering::Less => Resolution::Coarser,
        };
        specs.push(PieceSpec {
            n: np,
            h: l.patch_h[f.patch][td],
            resolution: res,
        });
        let rot = if f.is_loop {
            let start = seg.w.start + seg.splits.get(k).copied().unwrap_or(0);
            grid_index(mesh, pp.level[td], td, (start - pp.lo[td]).rem_euclid(len))?
        } else {
            check_start(f, pp.lo[td], len, mesh.periodic[td])?;
            0
        };
        piece_pts.extend((0..np).map(|q| (f.patch, if f.is_loop { (q + rot) % np } else { q })));
    }
    check_start(&seg.w, wpatch.lo[td], len, mesh.periodic[td])?;
    let glue = segment_glue(l.order, &line, l.patch_h[pw][td], &specs)?;
    let w_side = Side1 {
        pts: (0..n_w).map(|q| (pw, q)).collect(),
        above: seg.w.side == Side::Above,
    };
    let p_side = Side1 {
        pts: piece_pts,
        above: seg.w.side != Side::Above,
    };
    let (up, lo, i_ul, i_lu) = if w_side.above {
        (&w_side, &p_side, &glue.to_w, &glue.to_pieces)
    } else {
        (&p_side, &w_side, &glue.to_pieces, &glue.to_w)
    };
    match eq {
        Equation::Schrodinger { .. } => {
            schrodinger_side(l, d, up, lo, i_ul, pen.gamma_w, pen.tau_w, t);
            schrodinger_side(l, d, lo, up, i_lu, pen.gamma_uv, pen.tau_uv, t);
        }
        Equation::Advection { a } => {
            advection_side(l, d, up, lo, i_ul, -pen.adv_w * a[d], t);
            advection_side(l, d, lo, up, i_lu, -pen.adv_uv * a[d], t);
        }
    }
    Ok(())
}

fn check_start(f: &SegmentFace, lo: i64, len: i64, periodic: bool) -> Result<(), SemiError> {
    let same = if periodic {
        (f.start - lo).rem_euclid(len) == 0
    } else {
        f.start == lo
    };
    if !same {
        return Err(SemiError::Unsupported(
            "segment face does not start at its patch corner".into(),
        ));
    }
    Ok(())
}

/// Terms for side `a` coupled to side `b` through `i_ab` (a <- b):
/// `-gamma P^-1 S_a^T e (a - I b) - tau P^-1 e (S_a a - I S_b b)`, written for `M = L / i`.
#[allow(clippy::too_many_arguments)]
fn schrodinger_side(
    l: &Layout,
    d: usize,
    a: &Side1,
    b: &Side1,
    i_ab: &Csr,
    gamma: f64,
    tau: f64,
    t: &mut Triplets,
) {
    for r in 0..a.pts.len() {
        let ar = a.at(l, d, r);
        let sa = a.srow(l, d, r);
        let coupling: Vec<(usize, f64)> = i_ab.row(r).collect();
        for &(k, s, pk) in &sa {
            t.push(k, ar, -gamma * s * pk);
            for &(m, c) in &coupling {
                t.push(k, b.at(l, d, m), gamma * s * pk * c);
            }
        }
        let p0 = a.pinv_face(l, d, r);
        for &(k, s, _) in &sa {
            t.push(ar, k, -tau * p0 * s);
        }
        for &(m, c) in &coupling {
            for (k, s, _) in b.srow(l, d, m) {
                t.push(ar, k, tau * p0 * c * s);
            }
        }
    }
}

/// `coef P^-1 e (a - I b)`.
fn advection_side(
    l: &Layout,
    d: usize,
    a: &Side1,
    b: &Side1,
    i_ab: &Csr,
    coef: f64,
    t: &mut Triplets,
) {
    if coef == 0.0 {
        return;
    }
    for r in 0..a.pts.len() {
        let ar = a.at(l, d, r);
        let p0 = a.pinv_face(l, d, r);
        t.push(ar, ar, coef * p0);
        for (m, c) in i_ab.row(r) {
            t.push(ar, b.at(l, d, m), -coef * p0 * c);
        }
    }
}

fn physical(l: &Layout, p: usize, d: usize, high: bool, eq: &Equation, t: &mut Triplets) {
    let td = 1 - d;
    let op = &l.ops[p][d];
    let k0 = if high { l.patch_dims[p][d] - 1 } else { 0 };
    let sign = if high { 1.0 } else { -1.0 };
    for q in 0..l.patch_dims[p][td] {
        let face = l.index_nt(p, d, k0, q);
        match eq {
            Equation::Schrodinger { .. } => {
                // u = 0 through the symmetric S^T term
                for (k, s) in op.s.row(k0) {
                    t.push(l.index_nt(p, d, k, q), face, sign * s / op.p[k]);
                }
            }
            Equation::Advection { a } => {
                let an = sign * a[d];
                if an > 0.0 {
                    t.push(face, face, -an / op.p[k0]);
                }
            }
        }
    }
}

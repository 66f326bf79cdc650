//! One-dimensional diagonal-norm SBP operators.
//!
//! `D1 = P^-1 Q` with `Q + Q^T = diag(-1, 0, .., 0, 1)` and
//! `D2 = P^-1 (-A - e0 e0^T S + eN eN^T S)` with `A` symmetric positive semi-definite.

pub mod coeffs;

use crate::sparse::{Csr, Triplets};
use coeffs::{closure, Rat};
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SbpError {
    #[error("unsupported SBP order {0} (expected 2, 4 or 6)")]
    UnsupportedOrder(usize),
    #[error("{n} points is too few for order {order} (need at least {min})")]
    TooFewPoints { order: usize, n: usize, min: usize },
    #[error("grid spacing must be positive, got {0}")]
    BadSpacing(f64),
}

pub const ORDERS: [usize; 3] = [2, 4, 6];

/// Number of rows with one-sided stencils at each edge.
pub fn boundary_rows(order: usize) -> Result<usize, SbpError> {
    closure(order)
        .map(|c| c.d2.len())
        .ok_or(SbpError::UnsupportedOrder(order))
}

/// Smallest admissible number of grid points for a non-periodic operator.
pub fn min_points(order: usize) -> Result<usize, SbpError> {
    let c = closure(order).ok_or(SbpError::UnsupportedOrder(order))?;
    let reach =
        c.d1.iter()
            .chain(&c.d2)
            .map(|r| r.len())
            .chain([c.s.len()])
            .max()
            .unwrap();
    Ok((2 * c.d2.len()).max(reach))
}

fn rat_to_f64(x: &Rat) -> f64 {
    x.to_f64().expect("rational out of f64 range")
}

/// Sparse rational rows at unit spacing.
pub type RatRows = Vec<Vec<(usize, Rat)>>;

/// Exact operators at unit spacing, used for construction and exact checks.
#[derive(Clone, Debug)]
pub struct ExactOperators {
    pub order: usize,
    pub n: usize,
    pub periodic: bool,
    pub p: Vec<Rat>,
    pub d1: RatRows,
    pub d2: RatRows,
    /// Rows 0 and n-1 of S; empty when periodic.
    pub s_first: Vec<(usize, Rat)>,
    pub s_last: Vec<(usize, Rat)>,
}

fn push(row: &mut Vec<(usize, Rat)>, j: usize, v: Rat) {
    if v.is_zero() {
        return;
    }
    if let Some(e) = row.iter_mut().find(|e| e.0 == j) {
        e.1 += v;
    } else {
        row.push((j, v));
    }
}

impl ExactOperators {
    pub fn new(order: usize, n: usize, periodic: bool) -> Result<Self, SbpError> {
        let c = closure(order).ok_or(SbpError::UnsupportedOrder(order))?;
        let w = order / 2;
        if periodic {
            if n < order + 1 {
                return Err(SbpError::TooFewPoints {
                    order,
                    n,
                    min: order + 1,
                });
            }
            let mut d1 = vec![Vec::new(); n];
            let mut d2 = vec![Vec::new(); n];
            for i in 0..n {
                push(&mut d2[i], i, c.d2_interior[0]);
                for k in 1..=w {
                    let (l, r) = ((i + n - k) % n, (i + k) % n);
                    push(&mut d1[i], r, c.d1_interior[k - 1]);
                    push(&mut d1[i], l, -c.d1_interior[k - 1]);
                    push(&mut d2[i], r, c.d2_interior[k]);
                    push(&mut d2[i], l, c.d2_interior[k]);
                }
            }
            return Ok(Self {
                order,
                n,
                periodic,
                p: vec![Rat::from_integer(1); n],
                d1,
                d2,
                s_first: Vec::new(),
                s_last: Vec::new(),
            });
        }
        let b = c.d2.len();
        let min = min_points(order)?;
        if n < min {
            return Err(SbpError::TooFewPoints { order, n, min });
        }
        let one = Rat::from_integer(1);
        let mut p = vec![one; n];
        for (i, &wgt) in c.norm.iter().enumerate() {
            p[i] = wgt;
            p[n - 1 - i] = wgt;
        }
        let mut d1 = vec![Vec::new(); n];
        let mut d2 = vec![Vec::new(); n];
        for i in 0..b {
            for (j, &v) in c.d1[i].iter().enumerate() {
                push(&mut d1[i], j, v);
                push(&mut d1[n - 1 - i], n - 1 - j, -v);
            }
            for (j, &v) in c.d2[i].iter().enumerate() {
                push(&mut d2[i], j, v);
                push(&mut d2[n - 1 - i], n - 1 - j, v);
            }
        }
        for i in b..n - b {
            push(&mut d2[i], i, c.d2_interior[0]);
            for k in 1..=w {
                push(&mut d1[i], i + k, c.d1_interior[k - 1]);
                push(&mut d1[i], i - k, -c.d1_interior[k - 1]);
                push(&mut d2[i], i + k, c.d2_interior[k]);
                push(&mut d2[i], i - k, c.d2_interior[k]);
            }
        }
        for rows in [&mut d1, &mut d2] {
            for r in rows.iter_mut() {
                r.sort_by_key(|e| e.0);
            }
        }
        let s_first: Vec<(usize, Rat)> = c.s.iter().enumerate().map(|(j, &v)| (j, v)).collect();
        let s_last: Vec<(usize, Rat)> =
            c.s.iter()
                .enumerate()
                .rev()
                .map(|(j, &v)| (n - 1 - j, -v))
                .collect();
        Ok(Self {
            order,
            n,
            periodic,
            p,
            d1,
            d2,
            s_first,
            s_last,
        })
    }

    /// Q = P D1.
    pub fn q(&self) -> RatRows {
        self.d1
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|&(j, v)| (j, v * self.p[i])).collect())
            .collect()
    }

    /// A = -P D2 - e0 S_0 + eN S_N.
    pub fn a(&self) -> RatRows {
        let mut a: RatRows = self
            .d2
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|&(j, v)| (j, -v * self.p[i])).collect())
            .collect();
        if !self.periodic {
            let n = self.n;
            for &(j, v) in &self.s_first {
                push(&mut a[0], j, -v);
            }
            for &(j, v) in &self.s_last {
                push(&mut a[n - 1], j, v);
            }
            for r in a.iter_mut() {
                r.retain(|e| !e.1.is_zero());
                r.sort_by_key(|e| e.0);
            }
        }
        a
    }

    pub fn dense(rows: &RatRows, n: usize) -> Vec<Vec<Rat>> {
        let mut d = vec![vec![Rat::zero(); n]; n];
        for (i, r) in rows.iter().enumerate() {
            for &(j, v) in r {
                d[i][j] += v;
            }
        }
        d
    }
}

fn to_csr(rows: &RatRows, ncols: usize, scale: f64) -> Csr {
    let mut t = Triplets::new(rows.len(), ncols);
    for (i, r) in rows.iter().enumerate() {
        for (j, v) in r {
            t.push(i, *j, rat_to_f64(v) * scale);
        }
    }
    t.to_csr()
}

/// Norm, first- and second-derivative operators for one order, size and spacing.
#[derive(Clone, Debug)]
pub struct SbpOperatorSet {
    pub order: usize,
    pub n: usize,
    pub h: f64,
    pub periodic: bool,
    /// Diagonal of P, including the factor h.
    pub p: Vec<f64>,
    pub q: Csr,
    pub d1: Csr,
    pub a: Csr,
    pub d2: Csr,
    /// Only rows 0 and n-1 are populated.
    pub s: Csr,
    /// Points per edge with reduced accuracy p = order/2.
    pub closure_width: usize,
    /// Rows carrying one-sided stencils at each edge.
    pub boundary_rows: usize,
}

impl SbpOperatorSet {
    pub fn new(order: usize, n: usize, h: f64) -> Result<Self, SbpError> {
        Self::build(order, n, h, false)
    }

    /// Circulant operators on `n` distinct points of a periodic line.
    pub fn periodic(order: usize, n: usize, h: f64) -> Result<Self, SbpError> {
        Self::build(order, n, h, true)
    }

    pub fn build(order: usize, n: usize, h: f64, periodic: bool) -> Result<Self, SbpError> {
        if h.is_nan() || h <= 0.0 {
            return Err(SbpError::BadSpacing(h));
        }
        let ex = ExactOperators::new(order, n, periodic)?;
        Ok(Self::from_exact(&ex, h))
    }

    pub fn from_exact(ex: &ExactOperators, h: f64) -> Self {
        let n = ex.n;
        let mut s_rows: RatRows = vec![Vec::new(); n];
        if !ex.periodic {
            s_rows[0] = ex.s_first.clone();
            s_rows[n - 1] = ex.s_last.clone();
        }
        Self {
            order: ex.order,
            n,
            h,
            periodic: ex.periodic,
            p: ex.p.iter().map(|v| rat_to_f64(v) * h).collect(),
            q: to_csr(&ex.q(), n, 1.0),
            d1: to_csr(&ex.d1, n, 1.0 / h),
            a: to_csr(&ex.a(), n, 1.0 / h),
            d2: to_csr(&ex.d2, n, 1.0 / (h * h)),
            s: to_csr(&s_rows, n, 1.0 / h),
            closure_width: ex.order / 2,
            boundary_rows: if ex.periodic {
                0
            } else {
                boundary_rows(ex.order).unwrap()
            },
        }
    }

    pub fn s_first(&self) -> Vec<(usize, f64)> {
        self.s.row(0).collect()
    }

    pub fn s_last(&self) -> Vec<(usize, f64)> {
        self.s.row(self.n - 1).collect()
    }
}

/// Builds the operator set; the first-derivative pair is `(p, q, d1)`.
pub fn build_first_derivative(order: usize, n: usize, h: f64) -> Result<SbpOperatorSet, SbpError> {
    SbpOperatorSet::new(order, n, h)
}

/// Builds the operator set; the second-derivative triple is `(p, a, s)`.
pub fn build_second_derivative(order: usize, n: usize, h: f64) -> Result<SbpOperatorSet, SbpError> {
    SbpOperatorSet::new(order, n, h)
}

/// Central difference stencils (including the interior-order-8 reference pair).
pub fn central_stencil(order: usize, derivative: usize) -> Vec<(isize, f64)> {
    let w = (order / 2) as isize;
    match derivative {
        1 => {
            let c = coeffs::d1_interior(order);
            (-w..=w)
                .filter(|&k| k != 0)
                .map(|k| {
                    let v = rat_to_f64(&c[(k.unsigned_abs()) - 1]);
                    (k, if k < 0 { -v } else { v })
                })
                .collect()
        }
        2 => {
            let c = coeffs::d2_interior(order);
            (-w..=w)
                .map(|k| (k, rat_to_f64(&c[k.unsigned_abs()])))
                .collect()
        }
        _ => panic!("derivative {derivative} not available"),
    }
}

/// Deviations of the defining identities; see [`verify_sbp_identities`].
#[derive(Clone, Debug, PartialEq)]
pub struct SbpReport {
    pub min_weight: f64,
    /// max |Q + Q^T - diag(-1,0,..,0,1)|
    pub q_boundary: f64,
    /// max |A - A^T| relative to max |A|
    pub a_symmetry: f64,
    /// smallest eigenvalue of (A + A^T)/2 relative to its largest
    pub a_min_eig: f64,
    pub d1_exactness: f64,
    pub d2_exactness: f64,
    pub s_exactness: f64,
    pub tolerance: f64,
    pub passed: bool,
}

fn exactness(
    m: &Csr,
    rows: impl Iterator<Item = (usize, u32)>,
    deriv: u32,
    n: usize,
    h: f64,
) -> f64 {
    // monomials in t = x / L on [0, 1] keep the values O(1)
    let len = (n - 1) as f64 * h;
    let t: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
    let mut worst: f64 = 0.0;
    for (i, deg) in rows {
        for k in 0..=deg as i32 {
            let (mut s, mut mag) = (0.0, 0.0);
            for (j, v) in m.row(i) {
                let term = v * t[j].powi(k);
                s += term;
                mag += term.abs();
            }
            let exact = match deriv {
                1 if k >= 1 => k as f64 * t[i].powi(k - 1) / len,
                2 if k >= 2 => (k * (k - 1)) as f64 * t[i].powi(k - 2) / (len * len),
                _ => 0.0,
            };
            let denom = mag + exact.abs();
            if denom > 0.0 {
                worst = worst.max((s - exact).abs() / denom);
            }
        }
    }
    worst
}

/// Checks `P > 0`, the `Q + Q^T` boundary identity, symmetry and semi-definiteness
/// of `A`, and polynomial exactness of `D1`, `D2` and the `S` rows.
/// All deviations are relative; the set passes if every one is at most 1e-13.
pub fn verify_sbp_identities(ops: &SbpOperatorSet) -> SbpReport {
    verify_with_tolerance(ops, 1e-13)
}

pub fn verify_with_tolerance(ops: &SbpOperatorSet, tolerance: f64) -> SbpReport {
    let n = ops.n;
    let pdeg = (ops.order / 2) as u32;
    let min_weight = ops.p.iter().cloned().fold(f64::INFINITY, f64::min);
    let qd = ops.q.to_dense();
    let mut q_boundary: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let mut b = 0.0;
            if !ops.periodic && i == j {
                b = if i == 0 {
                    -1.0
                } else if i == n - 1 {
                    1.0
                } else {
                    0.0
                };
            }
            q_boundary = q_boundary.max((qd[i][j] + qd[j][i] - b).abs());
        }
    }
    let ad = ops.a.to_dense();
    let amax = ad
        .iter()
        .flatten()
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(f64::MIN_POSITIVE);
    let mut a_symmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            a_symmetry = a_symmetry.max((ad[i][j] - ad[j][i]).abs() / amax);
        }
    }
    let a_min_eig = if n <= 256 {
        let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (ad[i][j] + ad[j][i]));
        let ev = m.symmetric_eigenvalues();
        let lmax = ev.iter().cloned().fold(f64::MIN_POSITIVE, f64::max);
        ev.iter().cloned().fold(f64::INFINITY, f64::min) / lmax
    } else {
        f64::NAN
    };
    let b = ops.boundary_rows;
    let degree = |i: usize, interior: u32, boundary: u32| {
        if ops.periodic || (i >= b && i + b < n) {
            (i, interior)
        } else {
            (i, boundary)
        }
    };
    let (d1_exactness, d2_exactness, s_exactness) = if ops.periodic {
        (0.0, 0.0, 0.0)
    } else {
        let d1 = exactness(
            &ops.d1,
            (0..n).map(|i| degree(i, 2 * pdeg, pdeg)),
            1,
            n,
            ops.h,
        );
        let d2 = exactness(
            &ops.d2,
            (0..n).map(|i| degree(i, 2 * pdeg, pdeg)),
            2,
            n,
            ops.h,
        );
        let s = exactness(
            &ops.s,
            [(0, pdeg + 1), (n - 1, pdeg + 1)].into_iter(),
            1,
            n,
            ops.h,
        );
        (d1, d2, s)
    };
    let passed = min_weight > 0.0
        && q_boundary <= tolerance
        && a_symmetry <= tolerance
        && !(a_min_eig < -tolerance)
        && d1_exactness <= tolerance
        && d2_exactness <= tolerance
        && s_exactness <= tolerance;
    SbpReport {
        min_weight,
        q_boundary,
        a_symmetry,
        a_min_eig,
        d1_exactness,
        d2_exactness,
        s_exactness,
        tolerance,
        passed,
    }
}

/// CSV dump (`row,col,value`) of a sparse operator.
pub fn operator_csv(m: &Csr) -> String {
    let mut out = String::from("row,col,value\n");
    for i in 0..m.nrows {
        for (j, v) in m.row(i) {
            out.push_str(&format!("{i},{j},{v:.17e}\n"));
        }
    }
    out
}

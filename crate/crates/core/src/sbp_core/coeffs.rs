//! Diagonal-norm SBP coefficients at unit spacing, as exact rationals.
//!
//! Boundary rows are stored for the left edge; the right edge is the mirror
//! image (antisymmetric for odd derivatives, symmetric for even ones).

use num_rational::Ratio;

pub type Rat = Ratio<i128>;

pub(crate) fn r(n: i64, d: i64) -> Rat {
    Ratio::new(n as i128, d as i128)
}

fn row(v: &[(i64, i64)]) -> Vec<Rat> {
    v.iter().map(|&(n, d)| r(n, d)).collect()
}

fn int(v: &[i64]) -> Vec<Rat> {
    v.iter().map(|&n| r(n, 1)).collect()
}

/// One family of SBP operators (norm, first and second derivative closures).
#[derive(Clone, Debug)]
pub struct Closure {
    pub order: usize,
    /// Boundary norm weights; interior weight is 1.
    pub norm: Vec<Rat>,
    /// Left boundary rows of D1.
    pub d1: Vec<Vec<Rat>>,
    /// Left boundary rows of D2.
    pub d2: Vec<Vec<Rat>>,
    /// First row of S (one-sided first derivative at the left edge).
    pub s: Vec<Rat>,
    /// Central D1 weights for offsets 1..=w (offset -k carries the negated weight).
    pub d1_interior: Vec<Rat>,
    /// Central D2 weights for offsets 0..=w (symmetric).
    pub d2_interior: Vec<Rat>,
}

pub fn closure(order: usize) -> Option<Closure> {
    match order {
        2 => Some(Closure {
            order,
            norm: row(&[(1, 2)]),
            d1: vec![int(&[-1, 1])],
            d2: vec![int(&[1, -2, 1])],
            s: row(&[(-3, 2), (2, 1), (-1, 2)]),
            d1_interior: d1_interior(2),
            d2_interior: d2_interior(2),
        }),
        4 => Some(Closure {
            order,
            norm: row(&[(17, 48), (59, 48), (43, 48), (49, 48)]),
            d1: vec![
                row(&[(-24, 17), (59, 34), (-4, 17), (-3, 34)]),
                row(&[(-1, 2), (0, 1), (1, 2)]),
                row(&[(4, 43), (-59, 86), (0, 1), (59, 86), (-4, 43)]),
                row(&[(3, 98), (0, 1), (-59, 98), (0, 1), (32, 49), (-4, 49)]),
            ],
            d2: vec![
                int(&[2, -5, 4, -1]),
                int(&[1, -2, 1]),
                row(&[(-4, 43), (59, 43), (-110, 43), (59, 43), (-4, 43)]),
                row(&[(-1, 49), (0, 1), (59, 49), (-118, 49), (64, 49), (-4, 49)]),
            ],
            s: row(&[(-11, 6), (3, 1), (-3, 2), (1, 3)]),
            d1_interior: d1_interior(4),
            d2_interior: d2_interior(4),
        }),
        6 => Some(Closure {
            order,
            norm: row(&[
                (13649, 43200),
                (12013, 8640),
                (2711, 4320),
                (5359, 4320),
                (7877, 8640),
                (43801, 43200),
            ]),
            d1: vec![
                row(&[
                    (-21600, 13649),
                    (104009, 54596),
                    (30443, 81894),
                    (-33311, 27298),
                    (16863, 27298),
                    (-15025, 163788),
                ]),
                row(&[
                    (-104009, 240260),
                    (0, 1),
                    (-311, 72078),
                    (20229, 24026),
                    (-24337, 48052),
                    (36661, 360390),
                ]),
                row(&[
                    (-30443, 162660),
                    (311, 32532),
                    (0, 1),
                    (-11155, 16266),
                    (41287, 32532),
                    (-21999, 54220),
                ]),
                row(&[
                    (33311, 107180),
                    (-20229, 21436),
                    (485, 1398),
                    (0, 1),
                    (4147, 21436),
                    (25427, 321540),
                    (72, 5359),
                ]),
                row(&[
                    (-16863, 78770),
                    (24337, 31508),
                    (-41287, 47262),
                    (-4147, 15754),
                    (0, 1),
                    (342523, 472620),
                    (-1296, 7877),
                    (144, 7877),
                ]),
                row(&[
                    (15025, 525612),
                    (-36661, 262806),
                    (21999, 87602),
                    (-25427, 262806),
                    (-342523, 525612),
                    (0, 1),
                    (32400, 43801),
                    (-6480, 43801),
                    (720, 43801),
                ]),
            ],
            d2: vec![
                row(&[
                    (2375041, 818940),
                    (-234327, 27298),
                    (764459, 81894),
                    (-184319, 40947),
                    (45535, 54596),
                    (6767, 409470),
                ]),
                row(&[
                    (111273, 120130),
                    (-247183, 144156),
                    (21481, 36039),
                    (5701, 24026),
                    (-2545, 72078),
                    (-6923, 720780),
                ]),
                row(&[
                    (-13141, 162660),
                    (21481, 16266),
                    (-13417, 5422),
                    (10637, 8133),
                    (-2297, 32532),
                    (-69, 27110),
                ]),
                row(&[
                    (-11519, 160770),
                    (5701, 21436),
                    (10637, 16077),
                    (-60227, 32154),
                    (11411, 10718),
                    (-18157, 321540),
                    (48, 5359),
                ]),
                row(&[
                    (467, 31508),
                    (-2545, 47262),
                    (-2297, 47262),
                    (11411, 7877),
                    (-259975, 94524),
                    (72863, 47262),
                    (-1296, 7877),
                    (96, 7877),
                ]),
                row(&[
                    (6767, 1314030),
                    (-6923, 525612),
                    (-69, 43801),
                    (-18157, 262806),
                    (364315, 262806),
                    (-53, 20),
                    (64800, 43801),
                    (-6480, 43801),
                    (480, 43801),
                ]),
            ],
            s: row(&[(-25, 12), (4, 1), (-3, 1), (4, 3), (-1, 4)]),
            d1_interior: d1_interior(6),
            d2_interior: d2_interior(6),
        }),
        _ => None,
    }
}

/// Central first-derivative weights for offsets 1..=order/2.
pub fn d1_interior(order: usize) -> Vec<Rat> {
    match order {
        2 => row(&[(1, 2)]),
        4 => row(&[(2, 3), (-1, 12)]),
        6 => row(&[(3, 4), (-3, 20), (1, 60)]),
        8 => row(&[(4, 5), (-1, 5), (4, 105), (-1, 280)]),
        _ => panic!("no central first-derivative stencil of order {order}"),
    }
}

/// Central second-derivative weights for offsets 0..=order/2.
pub fn d2_interior(order: usize) -> Vec<Rat> {
    match order {
        2 => row(&[(-2, 1), (1, 1)]),
        4 => row(&[(-5, 2), (4, 3), (-1, 12)]),
        6 => row(&[(-49, 18), (3, 2), (-3, 20), (1, 90)]),
        8 => row(&[(-205, 72), (8, 5), (-1, 5), (8, 315), (-1, 560)]),
        _ => panic!("no central second-derivative stencil of order {order}"),
    }
}

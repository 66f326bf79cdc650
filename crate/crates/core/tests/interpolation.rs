use sbp_amr::interpolation::*;
use sbp_amr::sbp_core::coeffs::Rat;

fn rat(n: i64, d: i64) -> Rat {
    Rat::new(n as i128, d as i128)
}

#[test]
fn strip_rows_match_printed_values() {
    let s4 = junction_restriction(4).unwrap();
    let want: Vec<Rat> = [-3, 10, 48, 4, 0, 0, 0]
        .iter()
        .map(|&v| rat(v, 59))
        .collect();
    assert_eq!(s4.rows[2], want);
    let s6 = junction_restriction(6).unwrap();
    let want: Vec<Rat> = [-601, 2289, -3117, 4320, 0, -198, 18, 0, 0, 0, 0]
        .iter()
        .map(|&v| rat(v, 2711))
        .collect();
    assert_eq!(s6.rows[3], want);
}

#[test]
fn strip_exactness_degrees() {
    assert_eq!(strip_exact_degree(4).unwrap(), 1);
    assert_eq!(strip_exact_degree(6).unwrap(), 2);
    // row 3 of the order-4 strip on x^2 over nodes 0..6
    let s4 = junction_restriction(4).unwrap();
    let v: Rat = s4.rows[2]
        .iter()
        .enumerate()
        .map(|(j, c)| *c * Rat::from_integer((j * j) as i128))
        .sum();
    assert_eq!(v, rat(238, 59));
}

fn poly(x: f64, d: i32) -> f64 {
    x.powi(d)
}

#[test]
fn c2f_accuracy() {
    for (order, nc) in [(2usize, 12usize), (4, 20), (6, 30)] {
        let c2f = coarse_to_fine(order, nc, false).unwrap();
        let f2c = fine_to_coarse(order, nc, false).unwrap();
        let p = order / 2;
        let xc: Vec<f64> = (0..nc).map(|i| i as f64 / (nc - 1) as f64).collect();
        let xf: Vec<f64> = (0..2 * nc - 1)
            .map(|i| i as f64 / (2 * nc - 2) as f64)
            .collect();
        for d in 0..order as i32 {
            let fc: Vec<f64> = xc.iter().map(|&x| poly(x, d)).collect();
            let ff = c2f.mul_vec(&fc);
            let nb = if order == 2 { 0 } else { 2 * order + 1 };
            for (i, &v) in ff.iter().enumerate() {
                let boundary = i < nb || i + nb >= ff.len();
                if !boundary || d < p as i32 {
                    assert!(
                        (v - poly(xf[i], d)).abs() < 1e-12,
                        "order {order} d {d} row {i}: {v}"
                    );
                }
            }
            let fff: Vec<f64> = xf.iter().map(|&x| poly(x, d)).collect();
            let cc = f2c.mul_vec(&fff);
            if d < p as i32 {
                for (i, &v) in cc.iter().enumerate() {
                    assert!(
                        (v - poly(xc[i], d)).abs() < 1e-12,
                        "f2c order {order} d {d} row {i}: {v}"
                    );
                }
            }
        }
    }
}

#[test]
fn order6_strip_inexact_on_cubics() {
    let s6 = junction_restriction(6).unwrap();
    let k = s6.rows_per_side;
    let c = s6.half_width;
    let cubic = |j: usize| Rat::from_integer((j * j * j) as i128);
    let worst = s6.rows.iter().enumerate().any(|(ri, row)| {
        let t = if ri < k { c + 1 + ri - k } else { c + ri - k };
        let v: Rat = row.iter().enumerate().map(|(j, a)| *a * cubic(j)).sum();
        v != cubic(t)
    });
    assert!(worst);
}

mod props {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn glue_relations(order in prop::sample::select(vec![2usize, 4, 6]), extra in 0usize..20) {
            let n = min_coarse_points(order).unwrap().max(12) + extra;
            let g = GlueOperators::new(order, n).unwrap();
            prop_assert!(g.compatibility_residual() < 1e-13);
            prop_assert!(g.refined_compatibility_residual() < 1e-13);
        }

        #[test]
        fn transfer_preserves_low_degree(order in prop::sample::select(vec![2usize, 4, 6]), extra in 0usize..20,
                                         c in prop::collection::vec(-2.0f64..2.0, 3)) {
            let nc = min_coarse_points(order).unwrap().max(12) + extra;
            let c2f = coarse_to_fine(order, nc, false).unwrap();
            let deg = order / 2;
            let f = |x: f64| (0..deg).map(|d| c[d] * x.powi(d as i32)).sum::<f64>();
            let fc: Vec<f64> = (0..nc).map(|i| f(i as f64 / (nc - 1) as f64)).collect();
            let ff = c2f.mul_vec(&fc);
            for (i, v) in ff.iter().enumerate() {
                let x = i as f64 / (2 * nc - 2) as f64;
                prop_assert!((v - f(x)).abs() < 1e-11);
            }
        }
    }
}

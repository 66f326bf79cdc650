use proptest::prelude::*;
use sbp_amr::mesh::*;
use sbp_amr::semidiscrete::*;
use sbp_amr::sparse::{Csr, Triplets};
use sbp_amr::stability::p_norm_sqr_unique;
use sbp_amr::timestepping::*;

fn small_mesh(periodic: bool) -> Mesh {
    build_named_mesh_with(
        NamedMesh::Fig2b,
        11,
        Box2::square(-1.0, 1.0),
        0,
        [periodic; 2],
    )
    .unwrap()
}

fn with_diagonal(mut op: SemiDiscreteOperator, d: impl Fn(usize) -> f64) -> SemiDiscreteOperator {
    let n = op.len();
    let mut t = Triplets::new(n, n);
    for i in 0..n {
        t.push(i, i, d(i));
    }
    op.m = t.to_csr();
    op
}

fn packet(x: f64, y: f64) -> C64 {
    C64::new(-4.0 * (x * x + y * y), 2.0 * x).exp()
}

#[test]
fn zero_operator_keeps_state() {
    let mut op = assemble(&small_mesh(false), Equation::Advection { a: [1.0, 1.0] }, 4).unwrap();
    op.m = Csr::zeros(op.len(), op.len());
    let u0: Vec<f64> = op.layout.sample(|x, y| x - y * y);
    let mut u = u0.clone();
    rk4_step_unique(&op, &mut u, 0.3).unwrap();
    assert_eq!(u, u0);
}

#[test]
fn rk4_stability_polynomial() {
    let op = assemble(&small_mesh(false), Equation::Advection { a: [1.0, 1.0] }, 2).unwrap();
    let op = with_diagonal(op, |i| -0.5 - (i % 7) as f64);
    let dt = 0.1;
    let mut u = vec![1.0; op.len()];
    rk4_step_unique(&op, &mut u, dt).unwrap();
    for (i, v) in u.iter().enumerate() {
        let z = (-0.5 - (i % 7) as f64) * dt;
        let want = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
        assert!((v - want).abs() <= 1e-16 * 4.0, "{v} vs {want}");
    }
}

#[test]
fn lanczos_diagonal_exponential() {
    let op = assemble(&small_mesh(false), Equation::free_schrodinger(), 4).unwrap();
    // two eigenvalues: L = i M, so components rotate by exp(i d dt)
    let op = with_diagonal(op, |i| if i % 2 == 0 { -3.0 } else { 5.0 });
    let u0: Vec<C64> = op.layout.sample(|x, y| C64::new(1.0 + x, y));
    let dt = 0.37;
    let (v, stats) = lanczos_expm_unique(
        &op,
        &u0,
        dt,
        Krylov::Adaptive {
            tol: 1e-14,
            max_dim: 10,
        },
        true,
    )
    .unwrap();
    assert!(stats.dim <= 3);
    for (i, (a, b)) in v.iter().zip(&u0).enumerate() {
        let d = if i % 2 == 0 { -3.0 } else { 5.0 };
        let want = b * C64::from_polar(1.0, d * dt);
        assert!((a - want).norm() < 1e-14, "{a} vs {want}");
    }
}

#[test]
fn lanczos_zero_step_and_real_operator() {
    let op = assemble(&small_mesh(false), Equation::free_schrodinger(), 4).unwrap();
    let u0: Vec<C64> = op.layout.sample(packet);
    let (v, _) = lanczos_expm_unique(&op, &u0, 0.0, Krylov::Fixed(10), true).unwrap();
    assert_eq!(v, u0);
    let adv = assemble(&small_mesh(false), Equation::Advection { a: [1.0, 0.0] }, 4).unwrap();
    assert!(lanczos_expm_unique(&adv, &u0, 0.1, Krylov::Fixed(10), true).is_err());
    let cfg = PropagatorConfig::new(0.1, 1, Method::Lanczos);
    let mut r: Vec<f64> = adv.layout.sample(|x, _| x);
    assert!(step_unique(&adv, &mut r, &cfg).is_err());
}

#[test]
fn lanczos_unitary_and_orthonormal() {
    let op = assemble(&small_mesh(false), Equation::free_schrodinger(), 4).unwrap();
    let mut u: Vec<C64> = op.layout.sample(packet);
    let n0 = p_norm_sqr_unique(&op.layout, &u);
    for _ in 0..10 {
        let (v, stats) = lanczos_expm_unique(
            &op,
            &u,
            2e-3,
            Krylov::Adaptive {
                tol: 1e-12,
                max_dim: 40,
            },
            true,
        )
        .unwrap();
        assert!(stats.orthogonality < 1e-10, "{}", stats.orthogonality);
        let n1 = p_norm_sqr_unique(&op.layout, &v);
        assert!(((n1 - p_norm_sqr_unique(&op.layout, &u)) / n0).abs() < 1e-12);
        u = v;
    }
}

#[test]
fn propagate_snapshots() {
    let op = assemble(&small_mesh(false), Equation::free_schrodinger(), 2).unwrap();
    let f0 = op.layout.sample_field(packet);
    let out = propagate(&op, &f0, &PropagatorConfig::new(1e-3, 0, Method::Lanczos)).unwrap();
    assert_eq!(out, vec![f0.clone()]);
    let mut cfg = PropagatorConfig::new(1e-3, 6, Method::Lanczos);
    cfg.snapshot_every = 2;
    assert_eq!(propagate(&op, &f0, &cfg).unwrap().len(), 4);
    cfg.krylov = Krylov::Fixed(1);
    assert!(propagate(&op, &f0, &cfg).is_err());
}

#[test]
fn rk4_fourth_order_in_time() {
    let m = build_named_mesh_with(
        NamedMesh::Fig2a,
        11,
        Box2::square(-1.0, 1.0),
        0,
        [true, true],
    )
    .unwrap();
    let op = assemble(&m, Equation::Advection { a: [-1.0, -0.5] }, 4).unwrap();
    let u0: Vec<f64> = op.layout.sample(|x, y| (-6.0 * (x * x + y * y)).exp());
    let t = 0.4;
    let run = |n: usize| {
        let mut u = u0.clone();
        propagate_unique(&op, &mut u, t, n, Method::Rk4, Krylov::Fixed(2)).unwrap();
        u
    };
    let reference = run(640);
    let err = |n: usize| {
        let u = run(n);
        u.iter()
            .zip(&reference)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    };
    let (e1, e2, e3) = (err(20), err(40), err(80));
    let (r1, r2) = ((e1 / e2).log2(), (e2 / e3).log2());
    assert!(r1 > 3.7 && r2 > 3.7, "rates {r1} {r2}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn rk4_advection_norm_does_not_grow(a1 in -2.0f64..2.0, a2 in -2.0f64..2.0, c in 0.05f64..0.5) {
        prop_assume!(a1.abs() + a2.abs() > 0.1);
        let m = build_named_mesh(NamedMesh::Fig2c, 11, Box2::square(-1.0, 1.0), 0).unwrap();
        let op = assemble(&m, Equation::Advection { a: [a1, a2] }, 4).unwrap();
        let dt = advection_dt(m.min_spacing(), [a1, a2], c);
        let mut u: Vec<f64> = op.layout.sample(|x, y| (-8.0 * ((x - 0.2).powi(2) + y * y)).exp());
        let mut e = p_norm_sqr_unique(&op.layout, &u);
        for _ in 0..20 {
            rk4_step_unique(&op, &mut u, dt).unwrap();
            let e1 = p_norm_sqr_unique(&op.layout, &u);
            prop_assert!(e1 <= e * (1.0 + 1e-12));
            e = e1;
        }
    }
}

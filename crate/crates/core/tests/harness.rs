use sbp_amr::harness::analytic::*;
use sbp_amr::harness::config::Config;
use sbp_amr::harness::*;
use sbp_amr::mesh::*;
use sbp_amr::semidiscrete::*;
use sbp_amr::timestepping::Method;

fn layout(name: NamedMesh, lo: f64, hi: f64) -> Layout {
    Layout::new(
        &build_named_mesh(name, 11, Box2::square(lo, hi), 0).unwrap(),
        4,
    )
    .unwrap()
}

#[test]
fn error_norms_basics() {
    let l = layout(NamedMesh::Fig2b, 0.0, 1.0);
    let f = l.sample_field(|x, y| C64::new(x, y * y));
    assert_eq!(error_norms(&l, &f, &f).unwrap(), (0.0, 0.0));
    let zero = l.sample_field(|_, _| C64::new(0.0, 0.0));
    let c = l.sample_field(|_, _| C64::new(3.0, 4.0));
    let (l2, linf) = error_norms(&l, &c, &zero).unwrap();
    assert!((l2 - 5.0).abs() < 1e-12 && (linf - 5.0).abs() < 1e-15);
    let mut g = f.clone();
    g.values[17] += C64::new(0.0, 2.5e-3);
    let (_, linf) = error_norms(&l, &g, &f).unwrap();
    assert!((linf - 2.5e-3).abs() < 1e-15);
    let other = layout(NamedMesh::Fig2a, 0.0, 1.0);
    let h = other.sample_field(|_, _| C64::new(0.0, 0.0));
    assert!(error_norms(&l, &f, &h).is_err());
    assert!(error_norms(&other, &f, &f).is_err());
}

#[test]
fn stored_and_unique_l2_agree() {
    let l = layout(NamedMesh::Fig2c, -1.0, 1.0);
    let g = |x: f64, y: f64| (-3.0 * (x * x + 2.0 * y * y)).exp() * (1.0 + x);
    let f: Field<f64> = l.sample_field(g);
    let zero: Field<f64> = l.sample_field(|_, _| 0.0);
    let (l2, _) = error_norms(&l, &f, &zero).unwrap();
    let u: Vec<f64> = l.sample(g);
    let want: f64 = u
        .iter()
        .zip(&l.weights)
        .map(|(v, w)| w * v * v)
        .sum::<f64>()
        .sqrt();
    assert!((l2 - want).abs() < 1e-13 * want);
}

#[test]
fn coefficient_ode_matches_free_packet() {
    let (alpha, x0, k) = (1.3, 0.4, 2.0);
    for t in [0.0, 0.05, 0.3] {
        let g = GaussCoeffs::initial(alpha, x0, k, 0.0).evolve(0.0, 1.0, t);
        for x in [-1.5, -0.2, 0.4, 1.1] {
            let (a, b) = (g.eval(x), free_gaussian_1d(alpha, x0, k, x, t));
            assert!((a - b).norm() < 1e-10, "t {t} x {x}: {a} vs {b}");
        }
    }
}

#[test]
fn coefficient_ode_matches_coherent_state() {
    let (alpha, x0) = (2.0, 1.0);
    let w = 4.0 * alpha * alpha;
    for t in [0.1, 0.4, 0.9] {
        let g = GaussCoeffs::initial(alpha, x0, 0.0, 0.0).evolve(w, 1.0, t);
        for x in [-1.0, 0.0, 0.5, 1.2] {
            let (a, b) = (g.eval(x), coherent_state_1d(alpha, x0, x, t));
            assert!((a - b).norm() < 1e-9, "t {t} x {x}: {a} vs {b}");
        }
    }
}

#[test]
fn exact_solutions() {
    let s = ProblemSpec::schrodinger_convergence();
    let e = s.exact(0.0);
    for (x, y) in [(0.0, 0.0), (0.5, -1.0), (2.0, 1.0)] {
        let want = (-(x * x + y * y) as f64).exp();
        assert!((e.eval(x, y) - C64::new(want, 0.0)).norm() < 1e-15);
    }
    let a = ProblemSpec::advection_convergence();
    assert!((a.exact(0.0).eval(0.8, 0.8).re - 1.0).abs() < 1e-15);
    // a t = (-9.2, -1.2): the bump sits at (0.8, 0.8) + (9.2, 1.2) = (2, 2) modulo 4
    let e = a.exact(4.6);
    assert!((e.eval(2.0, 2.0).re - 1.0).abs() < 1e-12);
    assert!(e.eval(0.8, 0.8).re < 1e-10);
    let l = layout(NamedMesh::Fig2b, 0.0, 4.0);
    assert!(analytic_solution::<C64>(&a, &l, 0.0).is_err());
    assert!(analytic_solution::<f64>(&a, &l, 0.0).is_ok());
}

#[test]
fn problem_parsing_and_policy() {
    assert_eq!(
        "Harmonic-Oscillator".parse::<ProblemKind>().unwrap(),
        ProblemKind::HarmonicOscillator
    );
    assert!("heat".parse::<ProblemKind>().is_err());
    let mut bad = ProblemSpec::harmonic_oscillator(1.0);
    bad.alpha = [0.0, 1.0];
    assert!(bad.validate().is_err());
    assert_eq!(
        ProblemSpec::harmonic_oscillator(0.5).potential_coeffs(),
        [16.0, 16.0]
    );

    let a = ProblemSpec::advection_convergence();
    let m = build_named_mesh_with(NamedMesh::Fig2b, 21, a.domain, 0, a.periodic).unwrap();
    let op = assemble(&m, a.equation(), 4).unwrap();
    assert_eq!(default_policy(&a, &op, &m).method, Method::Rk4);
    let s = ProblemSpec::schrodinger_convergence();
    let op = assemble(&m, s.equation(), 4).unwrap();
    assert_eq!(default_policy(&s, &op, &m).method, Method::Lanczos);
}

#[test]
fn convergence_table() {
    let cfg = ConvergenceConfig::new(
        NamedMesh::Fig2b,
        ProblemSpec::schrodinger_convergence(),
        2,
        2,
    );
    let rows = run_convergence(&cfg).unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows[0].l2_rate.is_none() && rows[0].linf_rate.is_none());
    for r in &rows[1..] {
        assert!((r.l2_rate.unwrap() - 2.0).abs() < 0.2);
    }
    let csv = convergence_csv(&rows);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], CONVERGENCE_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("2,0,1722,") && lines[1].ends_with(','));
}

#[test]
fn run_problem_keeps_schrodinger_norm() {
    let s = ProblemSpec::schrodinger_convergence();
    let m = build_named_mesh_with(NamedMesh::Fig2c, 21, s.domain, 0, s.periodic).unwrap();
    let (r, op, sol) = run_problem(&s, &m, 4, None).unwrap();
    assert!(r.drift < 1e-10, "{}", r.drift);
    assert_eq!(r.n_points, op.len());
    assert!(matches!(sol, Solution::Complex(u) if u.len() == op.len()));
}

#[test]
fn comparison_reduction() {
    let r = ComparisonRow {
        target: 1e-2,
        junction_points: 83,
        naive_points: 100,
    };
    assert!((r.reduction() - 0.17).abs() < 1e-15);
    let c = MeshComparison {
        rows: vec![r],
        junction_runs: vec![],
        naive_runs: vec![],
    };
    assert_eq!(
        c.table(),
        "target,junction_points,naive_points,reduction\n1e-2,83,100,0.170\n"
    );
}

#[test]
fn config_lookup() {
    let c = Config::parse(
        "order = 6\n[problem]\nkind = ho # trailing\nx0 = 1, -2\n\n[time]\nsteps = x\n",
    )
    .unwrap();
    assert_eq!(c.get::<usize>("order").unwrap(), Some(6));
    assert_eq!(c.raw("problem.kind"), Some("ho"));
    assert_eq!(c.pair("problem.x0").unwrap(), Some([1.0, -2.0]));
    assert!(c.get::<usize>("time.steps").is_err());
    assert_eq!(c.get::<f64>("time.dt").unwrap(), None);
    assert!(Config::parse("no equals sign").is_err());
}

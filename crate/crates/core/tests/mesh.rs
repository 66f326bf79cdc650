use proptest::prelude::*;
use sbp_amr::mesh::*;

fn unit(n: usize) -> Mesh {
    Mesh::uniform(Box2::square(0.0, 1.0), [n, n], [11, 11], [false, false]).unwrap()
}

fn internal(m: &Mesh) -> Vec<&InterfaceDescriptor> {
    m.interfaces.iter().filter(|i| i.side_b.is_some()).collect()
}

fn overlap(a: &Block, b: &Block) -> bool {
    let (al, au, bl, bu) = (a.cell, a.upper_units(), b.cell, b.upper_units());
    (0..2).all(|d| al[d] < bu[d] && bl[d] < au[d])
}

fn touching(a: &Block, b: &Block) -> Option<usize> {
    let (al, au, bl, bu) = (a.cell, a.upper_units(), b.cell, b.upper_units());
    (0..2).find(|&d| {
        let t = 1 - d;
        (au[d] == bl[d] || bu[d] == al[d]) && al[t] < bu[t] && bl[t] < au[t]
    })
}

/// Brute-force check of tiling and 2:1 balance over all pairs.
fn brute_force(m: &Mesh) {
    let area: f64 = m.blocks.iter().map(Block::volume).sum();
    assert!((area - m.domain.volume()).abs() <= 1e-12 * m.domain.volume());
    for (i, a) in m.blocks.iter().enumerate() {
        for b in &m.blocks[i + 1..] {
            assert!(!overlap(a, b), "{} overlaps {}", a.id, b.id);
            if touching(a, b).is_some() {
                for d in 0..2 {
                    assert!(
                        a.level[d].abs_diff(b.level[d]) <= 1,
                        "{} vs {} in dim {d}",
                        a.id,
                        b.id
                    );
                }
            }
        }
    }
}

#[test]
fn refine_child_of_two_by_two() {
    let m = unit(1).refine_block(0, &[0, 1]).unwrap();
    let id = m.blocks[0].id;
    let r = m.refine_block(id, &[0]).unwrap();
    assert_eq!(r.blocks.len(), 5);
    for b in &m.blocks[1..] {
        assert!(r.blocks.contains(b));
    }
    brute_force(&r);
}

#[test]
fn level_zero_next_to_level_two() {
    let m = Mesh::uniform(
        Box2::new([0.0, 0.0], [3.0, 1.0]),
        [3, 1],
        [11, 11],
        [false, false],
    )
    .unwrap();
    let mut m = m.refine_block(2, &[0]).unwrap();
    let id = m.blocks.iter().find(|b| b.cell[0] == 2 * UNIT).unwrap().id;
    m = m.refine_block(id, &[0]).unwrap();
    // the middle block must now be at level 1 in x
    let middle: Vec<&Block> = m
        .blocks
        .iter()
        .filter(|b| b.cell[0] >= UNIT && b.cell[0] < 2 * UNIT)
        .collect();
    assert!(middle.iter().all(|b| b.level[0] >= 1));
    brute_force(&m);
}

#[test]
fn balancing_is_idempotent() {
    let m = unit(2).refine_block(0, &[0, 1]).unwrap();
    let b = m.enforce_two_to_one();
    assert_eq!(b.blocks, m.blocks);
}

#[test]
fn all_fd_on_uniform_two_by_two() {
    let m = unit(2)
        .classify_interfaces(JunctionPolicy::FdWherePossible)
        .unwrap();
    let int = internal(&m);
    assert_eq!(int.len(), 4);
    assert!(int.iter().all(|i| i.kind == InterfaceKind::Fd));
    assert!(m.junctions.is_empty());
    let s = unit(2)
        .classify_interfaces(JunctionPolicy::SatOnly)
        .unwrap();
    assert!(internal(&s)
        .iter()
        .all(|i| i.kind == InterfaceKind::SatConforming));
}

#[test]
fn named_meshes_match_figures() {
    let d = Box2::square(-10.0, 10.0);
    let b = build_named_mesh(NamedMesh::Fig2b, 21, d, 0).unwrap();
    assert_eq!(b.blocks.len(), 4);
    assert_eq!(b.junctions.len(), 1);
    assert!(b.blocks.iter().all(|b| b.points_per_dim == [21, 21]));
    let c = build_named_mesh(NamedMesh::Fig2c, 21, d, 0).unwrap();
    assert_eq!(c.blocks.len(), 10);
    assert!(c.junctions.iter().any(|j| j.refined));
    let a = build_named_mesh(NamedMesh::Fig2a, 21, d, 5).unwrap();
    assert_eq!(a.points_per_dim, [641, 641]);
    for name in NamedMesh::ALL {
        let m = build_named_mesh(name, 21, Box2::square(-6.0, 6.0), 0).unwrap();
        brute_force(&m);
        assert_eq!(name.name().parse::<NamedMesh>().unwrap(), name);
    }
    assert!("fig99".parse::<NamedMesh>().is_err());
}

#[test]
fn fig7_point_counts() {
    let d = Box2::square(0.0, 1.0);
    let count = |n, l| {
        build_named_mesh(n, 21, d, l)
            .unwrap()
            .unique_point_count()
            .unwrap()
    };
    assert_eq!(count(NamedMesh::Fig7Junction, 0), 4327);
    assert_eq!(count(NamedMesh::Fig7Naive, 0), 5209);
    assert_eq!(count(NamedMesh::Fig7Junction, 1), 16647);
    assert_eq!(count(NamedMesh::Fig7Naive, 1), 20009);
    assert_eq!(count(NamedMesh::Fig7Junction, 2), 65287);
    assert_eq!(count(NamedMesh::Fig7Naive, 2), 78409);
}

#[test]
fn text_round_trip() {
    for name in [NamedMesh::Fig2c, NamedMesh::Fig7Junction, NamedMesh::Fig8b] {
        let m = build_named_mesh(name, 21, Box2::square(0.0, 1.0), 0).unwrap();
        let t = m.to_text();
        let back = Mesh::from_text(&t).unwrap();
        assert_eq!(back.blocks, m.blocks);
        assert_eq!(back.to_text(), t);
    }
    assert!(Mesh::from_text("garbage").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn refinement_keeps_tiling_and_balance(
        steps in prop::collection::vec((0usize..1000, 0usize..3), 1..12),
        base in 1usize..3,
    ) {
        let mut m = unit(base);
        for (pick, dims) in steps {
            let b = &m.blocks[pick % m.blocks.len()];
            if b.level.iter().any(|&l| l >= 5) {
                continue;
            }
            let dims: &[usize] = match dims { 0 => &[0], 1 => &[1], _ => &[0, 1] };
            m = m.refine_block(b.id, dims).unwrap();
        }
        prop_assert!(m.is_balanced());
        m.check_tiling().unwrap();
        brute_force(&m);
        prop_assert_eq!(m.enforce_two_to_one().blocks, m.blocks.clone());
        let c1 = m.classify_interfaces(JunctionPolicy::FdWherePossible).unwrap();
        let c2 = m.classify_interfaces(JunctionPolicy::FdWherePossible).unwrap();
        prop_assert_eq!(&c1.interfaces, &c2.interfaces);
        prop_assert_eq!(&c1.junctions, &c2.junctions);
    }
}

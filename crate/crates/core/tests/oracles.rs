use costab::engine::AlgebraPresentation;
use costab::snapshot::{BuildConfig, IndecId, Snapshot};

fn build(p: AlgebraPresentation, width: usize) -> Snapshot {
    Snapshot::build(p, &BuildConfig { width_bound: width, ..BuildConfig::default() }).unwrap()
}

/// Maps between stalk complexes of projectives only exist in equal degrees,
/// where they are the paths between the vertices.
#[test]
fn stalk_homs_count_paths() {
    let s = build(AlgebraPresentation::a2(), 2);
    // paths: e1, e2, a : 1 -> 2; Hom(P_u, P_v) is spanned by paths u -> v
    let paths = |u: &str, v: &str| match (u, v) {
        ("x", "x") | ("y", "y") | ("x", "y") => 1,
        _ => 0,
    };
    for u in ["x", "y"] {
        for v in ["x", "y"] {
            for i in -2..=2 {
                for j in -2..=2 {
                    let a = s.parse_id(&format!("{u}[{i}]")).unwrap();
                    let b = s.parse_id(&format!("{v}[{j}]")).unwrap();
                    let want = if i == j { paths(u, v) } else { 0 };
                    assert_eq!(s.hom(a, b).unwrap(), want, "hom({u}[{i}], {v}[{j}])");
                }
            }
        }
    }
}

#[test]
fn dual_number_stalk_has_two_dimensional_endomorphisms() {
    let s = build(AlgebraPresentation::dual_numbers(), 2);
    let c = IndecId::new(0, 0);
    assert_eq!(s.hom(c, c).unwrap(), 2);
    for k in [-2, -1, 1, 2] {
        assert_eq!(s.hom(c, c.suspend(k)).unwrap(), 0);
    }
}

#[test]
fn classes_are_additive_on_the_arrow_triangle() {
    let s = build(AlgebraPresentation::a2(), 2);
    let cls = |t: &str| s.class(&s.parse_object(t).unwrap());
    let (x, y, z) = (cls("x"), cls("y"), cls("z"));
    assert_eq!(x, vec![1, 0]);
    assert_eq!(y, vec![0, 1]);
    assert_eq!(z, vec![-1, 1]);
    assert_eq!(cls("x[1]"), vec![-1, 0]);
    assert_eq!(s.k0_rank(), 2);
}

#[test]
fn arrow_snapshot_has_three_orbits_and_known_homs() {
    let s = build(AlgebraPresentation::a2(), 2);
    assert_eq!(s.orbits.len(), 3);
    let h = |a: &str, b: &str| s.hom(s.parse_id(a).unwrap(), s.parse_id(b).unwrap()).unwrap();
    assert_eq!(h("x", "z"), 0);
    assert_eq!(h("y", "z"), 1);
    assert_eq!(h("z", "x[1]"), 1);
    assert_eq!(h("z", "z"), 1);
}

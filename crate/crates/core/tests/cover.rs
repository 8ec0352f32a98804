use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;

use selfsim_core::category::{FinSetFunctor, ObjId};
use selfsim_core::cover::{
    build_cover_system, build_j_and_verify, covers_from_basis, point_addresses, validate_separating,
    CoverSystem, GroundSpace, PointSet, Tail,
};

fn space(n: usize) -> GroundSpace {
    GroundSpace::new((0..n).map(|i| format!("p{i}")).collect(), None).unwrap()
}

/// Points hit by each class of `M ⊗ J` at `v`, from a direct quotient of
/// the pairs `(m, x)` by `(m·g, z) ~ (m, J(g) z)`.
fn naive_images(cs: &CoverSystem, j: &FinSetFunctor, v: ObjId) -> Vec<BTreeSet<String>> {
    let sys = &cs.system;
    let cat = sys.category();
    let module = sys.module();
    let mut nodes = Vec::new();
    for &m in module.elements_into(v) {
        for x in 0..j.size(module.src(m)) {
            nodes.push((m, x));
        }
    }
    let index: BTreeMap<_, _> = nodes.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let mut parent: Vec<usize> = (0..nodes.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        if p[x] == x { x } else { let r = find(p, p[x]); p[x] = r; r }
    }
    for &m in module.elements_into(v) {
        for &g in cat.arrows_into(module.src(m)) {
            let mg = module.ract(m, g).unwrap();
            for z in 0..j.size(cat.src(g)) {
                let (a, b) = (index[&(mg, z)], index[&(m, j.apply(g, z))]);
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                parent[ra] = rb;
            }
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, &(m, x)) in nodes.iter().enumerate() {
        let r = find(&mut parent, i);
        classes.entry(r).or_default().insert(j.carrier(module.src(m))[x].clone());
    }
    classes.into_values().collect()
}

/// `ψ` is a bijection onto `J(v)` at every interior object.
fn naive_iso(cs: &CoverSystem, j: &FinSetFunctor) -> bool {
    cs.layers[..cs.interior_levels()].iter().flatten().all(|&v| {
        let images = naive_images(cs, j, v);
        let pts: BTreeSet<String> = images.iter().flatten().cloned().collect();
        let expected: BTreeSet<String> = j.carrier(v).iter().cloned().collect();
        images.iter().all(|c| c.len() == 1) && images.len() == expected.len() && pts == expected
    })
}

fn singletons(n: usize) -> Vec<PointSet> {
    (0..n).map(|i| [i].into_iter().collect()).collect()
}

#[test]
fn eight_points_with_singleton_basis() {
    let s = space(8);
    let cov = covers_from_basis(&s, &singletons(8), 8);
    let sep = validate_separating(&s, &cov).unwrap();
    assert!(sep.separated());
    assert_eq!(sep.max_depth(), Some(7));
    assert_eq!(sep.pairs[&(0, 5)], Some(1));
    for tail in [Tail::Truncate, Tail::PointLoops] {
        let cs = build_cover_system(&s, &cov, 8, tail).unwrap();
        let (j, report) = build_j_and_verify(&cs).unwrap();
        assert!(report.is_iso(), "{:?}", report.failure);
        assert!(naive_iso(&cs, &j));
        assert_eq!(report.levels_checked, cs.interior_levels());
        // one point is split off per level, the rest stays together
        for (n, layer) in cs.layers.iter().enumerate() {
            assert_eq!(layer.len(), if n == 0 { 1 } else { n.min(7) + 1 });
        }
    }
    let cs = build_cover_system(&s, &cov, 8, Tail::PointLoops).unwrap();
    for (p, addr) in point_addresses(&cs, 8).iter().enumerate() {
        assert_eq!(addr.len(), 1, "point {p}");
    }
}

#[test]
fn unseparated_points_are_reported() {
    let s = space(4);
    let cov = covers_from_basis(&s, &singletons(2), 3);
    let sep = validate_separating(&s, &cov).unwrap();
    assert_eq!(sep.unseparated(), vec![(2, 3)]);
}

proptest! {
    #[test]
    fn verifier_agrees_with_direct_quotient(
        n in 1usize..=5,
        basis in prop::collection::vec(prop::collection::btree_set(0usize..5, 0..4), 1..4),
        loops in any::<bool>(),
    ) {
        let s = space(n);
        let depth = basis.len();
        let cov = covers_from_basis(&s, &basis, depth);
        let tail = if loops { Tail::PointLoops } else { Tail::Truncate };
        let cs = build_cover_system(&s, &cov, depth, tail).unwrap();
        let (j, report) = build_j_and_verify(&cs).unwrap();
        let naive = naive_iso(&cs, &j);
        if report.is_iso() {
            prop_assert!(naive);
        }
        if !naive {
            prop_assert!(!report.is_iso());
        }
    }
}

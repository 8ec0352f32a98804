use selfsim_core::affine::RationalAffineMap;
use selfsim_core::category::ObjId;
use selfsim_core::ifs::{
    cell_covers, compile_system, overlap_report, rasterize, Bbox, Contraction, Ifs, OverlapVerdict,
};
use selfsim_core::rational::{int, rat};
use selfsim_core::recognition::{check_crude, FixedPointEvidence};
use selfsim_core::Rational;

fn unit_square() -> Ifs {
    let maps = [(0, 0), (1, 0), (0, 1), (1, 1)]
        .iter()
        .map(|&(x, y)| Contraction::new(RationalAffineMap::similarity(rat(1, 2), vec![rat(x, 2), rat(y, 2)])))
        .collect();
    Ifs::new(2, maps, None).unwrap()
}

fn point(x: (i64, i64), y: (i64, i64)) -> Vec<Rational> {
    vec![rat(x.0, x.1), rat(y.0, y.1)]
}

#[test]
fn sierpinski_pipeline() {
    let ifs = Ifs::sierpinski(2);
    assert_eq!(ifs.fixed_points().unwrap(), vec![point((0, 1), (0, 1)), point((1, 1), (0, 1)), point((0, 1), (1, 1))]);
    let report = overlap_report(&ifs, 8).unwrap();
    assert!(report.point_only());
    let expected = [
        (0, 1, point((1, 2), (0, 1))),
        (0, 2, point((0, 1), (1, 2))),
        (1, 2, point((1, 2), (1, 2))),
    ];
    for (p, (i, j, q)) in report.pairs.iter().zip(expected) {
        assert_eq!((p.i, p.j), (i, j));
        assert_eq!(p.verdict, OverlapVerdict::PointOnly(vec![q]));
    }
    let compiled = compile_system(&ifs, &report).unwrap();
    let sys = &compiled.system;
    let m = sys.module();
    let count = |b: usize, a: usize| m.ids().filter(|&e| m.src(e) == ObjId(b) && m.dst(e) == ObjId(a)).count();
    assert_eq!((count(1, 1), count(0, 1), count(0, 0)), (3, 6, 1));
    for e in m.ids().filter(|&e| m.src(e) == ObjId(1)) {
        assert_eq!(compiled.annotation.l(e), &rat(1, 2));
    }
    let ev = FixedPointEvidence::Asserted { nonempty: vec![true, true] };
    let cert = check_crude(sys, &ev, &compiled.annotation).unwrap();
    assert!(cert.passed());
    assert_eq!(cert.bound.unwrap().ratio, rat(1, 2));
}

#[test]
fn sierpinski_covers_follow_pascal_mod_two() {
    let ifs = Ifs::sierpinski(2);
    let covers = cell_covers(&ifs, 6).unwrap();
    for (level, cover) in covers.iter().enumerate() {
        let n = 1u64 << level;
        let expected: Vec<Vec<u64>> = (0..n)
            .flat_map(|x| (0..n).map(move |y| vec![x, y]))
            .filter(|c| c[0] & c[1] == 0)
            .collect();
        assert_eq!(cover.iter().cloned().collect::<Vec<_>>(), expected, "level {level}");
    }
    let raster = rasterize(&ifs, 8).unwrap();
    assert_eq!((raster.width, raster.height), (256, 256));
    for row in 0..256 {
        for x in 0..256 {
            let y = 255 - row;
            assert_eq!(raster.get(x, row), x & y == 0, "pixel ({x},{row})");
        }
    }
    assert_eq!(raster.count(), 6561);
}

#[test]
fn rasters_refine() {
    for ifs in [Ifs::sierpinski(2), unit_square()] {
        let mut prev = rasterize(&ifs, 1).unwrap();
        for depth in 2..=7 {
            let r = rasterize(&ifs, depth).unwrap();
            let down = r.downsample();
            assert_eq!((down.width, down.height), (prev.width, prev.height));
            for (a, b) in down.pixels.iter().zip(&prev.pixels) {
                assert!(!a || *b, "depth {depth}");
            }
            prev = r;
        }
    }
}

/// Images of the fixed points under words of length ≤ `len`.
fn attractor_points(ifs: &Ifs, len: usize) -> Vec<Vec<Rational>> {
    let mut pts = ifs.fixed_points().unwrap();
    let mut frontier = pts.clone();
    for _ in 0..len {
        frontier = frontier
            .iter()
            .flat_map(|p| ifs.maps.iter().map(move |m| m.map.apply(p)))
            .collect();
        pts.extend(frontier.iter().cloned());
    }
    pts
}

#[test]
fn covers_contain_the_attractor() {
    let skew = Ifs::new(
        2,
        vec![
            Contraction::new(RationalAffineMap::new(vec![vec![rat(1, 2), rat(1, 4)], vec![int(0), rat(1, 3)]], vec![int(0), int(0)]).unwrap()),
            Contraction::new(RationalAffineMap::similarity(rat(1, 3), vec![rat(2, 3), rat(1, 5)])),
        ],
        None,
    )
    .unwrap();
    for ifs in [Ifs::sierpinski(2), unit_square(), skew] {
        let bbox = ifs.bounding_box().unwrap();
        let pts = attractor_points(&ifs, 3);
        for (level, cover) in cell_covers(&ifs, 5).unwrap().iter().enumerate() {
            let n = Rational::from_integer((1i64 << level).into());
            let w: Vec<Rational> = (0..2).map(|a| (&bbox.hi[a] - &bbox.lo[a]) / &n).collect();
            for p in &pts {
                let hit = cover.iter().any(|c| {
                    let lo: Vec<Rational> = (0..2).map(|a| &bbox.lo[a] + &w[a] * int(c[a] as i64)).collect();
                    let hi: Vec<Rational> = (0..2).map(|a| &lo[a] + &w[a]).collect();
                    Bbox { lo, hi }.contains(p)
                });
                assert!(hit, "level {level} misses {p:?}");
            }
        }
    }
}

#[test]
fn unit_square_overlaps_are_unresolved() {
    let ifs = unit_square();
    let report = overlap_report(&ifs, 6).unwrap();
    assert!(!report.point_only());
    assert!(report
        .pairs
        .iter()
        .any(|p| matches!(p.verdict, OverlapVerdict::Unresolved { .. })));
    assert!(compile_system(&ifs, &report).is_err());
}

#[test]
fn separated_maps_are_disjoint() {
    let ifs = Ifs::new(
        1,
        vec![
            Contraction::new(RationalAffineMap::similarity(rat(1, 3), vec![int(0)])),
            Contraction::new(RationalAffineMap::similarity(rat(1, 3), vec![rat(2, 3)])),
        ],
        None,
    )
    .unwrap();
    let report = overlap_report(&ifs, 6).unwrap();
    assert_eq!(report.pairs[0].verdict, OverlapVerdict::Disjoint);
    let compiled = compile_system(&ifs, &report).unwrap();
    assert_eq!(compiled.system.module().len(), 1 + 4 + 2);
}

#[test]
fn non_contractions_are_rejected() {
    let c = Contraction::new(RationalAffineMap::similarity(int(1), vec![int(0)]));
    assert!(Ifs::new(1, vec![c], None).is_err());
}

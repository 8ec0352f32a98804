use proptest::prelude::*;

use selfsim_core::address::{enumerate_chains, liveness};
use selfsim_core::category::{CategoryBuilder, FiniteCategory, ObjId};
use selfsim_core::module::{ElemId, ModuleBuilder};
use selfsim_core::rational::{int, rat};
use selfsim_core::recognition::{
    check_crude, check_precise_diam, max_chain_weight, Blocking, DecayBound, FixedPointEvidence,
    MetricAnnotation, Verdict,
};
use selfsim_core::{Rational, SystemDef};

fn discrete(n: usize, edges: &[(usize, usize)]) -> SystemDef {
    let cat = FiniteCategory::discrete((0..n).map(|i| format!("o{i}")));
    let mut mb = ModuleBuilder::new();
    for (i, &(b, a)) in edges.iter().enumerate() {
        mb.element(format!("m{i}"), ObjId(b), ObjId(a));
    }
    let module = mb.build(&cat).unwrap();
    SystemDef::new(cat, module).unwrap()
}

fn freyd() -> (SystemDef, MetricAnnotation) {
    let mut b = CategoryBuilder::new();
    let (o0, o1) = (b.object("0"), b.object("1"));
    let sigma = b.arrow("sigma", o0, o1);
    let tau = b.arrow("tau", o0, o1);
    let cat = b.build().unwrap();
    let mut m = ModuleBuilder::new();
    let e = m.element("e", o0, o0);
    let p0 = m.element("p0", o0, o1);
    let ph = m.element("ph", o0, o1);
    let p1 = m.element("p1", o0, o1);
    let l = m.element("L", o1, o1);
    let r = m.element("R", o1, o1);
    m.lact(sigma, e, p0).lact(tau, e, p1);
    m.ract(l, sigma, p0).ract(l, tau, ph).ract(r, sigma, ph).ract(r, tau, p1);
    let module = m.build(&cat).unwrap();
    let sys = SystemDef::new(cat, module).unwrap();
    let mut ann = MetricAnnotation::unset(&sys);
    ann.set_diam(o0, int(0)).set_diam(o1, int(1));
    for x in [e, p0, ph, p1] {
        ann.set_lip(x, int(0));
    }
    ann.set_lip(l, rat(1, 2)).set_lip(r, rat(1, 2));
    (sys, ann)
}

fn everywhere(sys: &SystemDef) -> FixedPointEvidence<'static> {
    FixedPointEvidence::Asserted { nonempty: vec![true; sys.object_count()] }
}

/// `max` over length-`n` chains with a live tip of `(∏ λ) · D(tip)`, by
/// enumeration.
fn brute_beta(sys: &SystemDef, ann: &MetricAnnotation, a: ObjId, n: usize) -> Option<Rational> {
    let live = liveness(sys);
    enumerate_chains(sys, a, n)
        .into_iter()
        .filter(|c| live[c.tip(sys).0])
        .map(|c| {
            // a map out of a zero-diameter space is constant
            let prod = c.elements.iter().fold(int(1), |p, &m| {
                if ann.d(sys.module().src(m)) == &int(0) { int(0) } else { p * ann.l(m) }
            });
            prod * ann.d(c.tip(sys))
        })
        .max()
}

fn bound_at(b: &DecayBound, n: u64) -> Rational {
    let k = b.period;
    let q = if n + 1 < k { 0 } else { (n + 1 - k).div_ceil(k) };
    let mut w = b.constant.clone();
    for _ in 0..q {
        w *= &b.ratio;
    }
    w
}

#[test]
fn freyd_crude_depth() {
    let (sys, ann) = freyd();
    let cert = check_crude(&sys, &everywhere(&sys), &ann).unwrap();
    assert_eq!(cert.verdict, Verdict::Pass);
    for k in 0..30u32 {
        let eps = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(k)) * rat(3, 4);
        // smallest n with 2^{-n} ≤ eps
        let expected = (0..).find(|&n| rat(1, 1) / int(1i64 << n) <= eps).unwrap();
        assert_eq!(cert.decay_depth(&eps), Some(expected));
    }
    for a in sys.category().objects() {
        for n in 0..8 {
            assert_eq!(max_chain_weight(&sys, &ann, a, n).unwrap(), brute_beta(&sys, &ann, a, n));
        }
    }
}

#[test]
fn expanding_element_blocks_crude() {
    let sys = discrete(1, &[(0, 0), (0, 0)]);
    let mut ann = MetricAnnotation::uniform(&sys, int(1), rat(1, 3));
    ann.set_lip(ElemId(1), int(1));
    let cert = check_crude(&sys, &everywhere(&sys), &ann).unwrap();
    assert_eq!(cert.blocking, Some(Blocking::NotContraction { element: ElemId(1), lip: int(1) }));
    let cert = check_precise_diam(&sys, &everywhere(&sys), &ann, ObjId(0)).unwrap();
    assert!(matches!(cert.blocking, Some(Blocking::Cycle { .. })));
}

#[test]
fn unoccupied_fixed_point_blocks() {
    let sys = discrete(2, &[(0, 0), (1, 1)]);
    let ann = MetricAnnotation::uniform(&sys, int(1), rat(1, 2));
    let ev = FixedPointEvidence::Asserted { nonempty: vec![true, false] };
    let cert = check_crude(&sys, &ev, &ann).unwrap();
    assert_eq!(cert.blocking, Some(Blocking::Unoccupied(ObjId(1))));
}

#[test]
fn incomplete_annotation_is_rejected() {
    let sys = discrete(1, &[(0, 0)]);
    let ann = MetricAnnotation::unset(&sys);
    assert!(check_crude(&sys, &everywhere(&sys), &ann).is_err());
}

fn annotated() -> impl Strategy<Value = (usize, Vec<(usize, usize)>, Vec<u8>, Vec<u8>)> {
    (1usize..=3, prop::collection::vec((0usize..3, 0usize..3), 1..7)).prop_flat_map(|(n, raw)| {
        let edges: Vec<_> = raw.into_iter().map(|(b, a)| (b % n, a % n)).collect();
        let m = edges.len();
        (
            Just(n),
            Just(edges),
            prop::collection::vec(0u8..3, n),
            prop::collection::vec(0u8..5, m),
        )
    })
}

fn lip_value(code: u8) -> Rational {
    [int(0), rat(1, 3), rat(1, 2), int(1), int(2)][code as usize].clone()
}

proptest! {
    #[test]
    fn precise_bound_is_sound((n, edges, diam, lip) in annotated()) {
        let sys = discrete(n, &edges);
        let mut ann = MetricAnnotation::unset(&sys);
        for (a, &d) in diam.iter().enumerate() {
            ann.set_diam(ObjId(a), int(i64::from(d)));
        }
        for (m, &l) in lip.iter().enumerate() {
            ann.set_lip(ElemId(m), lip_value(l));
        }
        let live = liveness(&sys);
        let ev = FixedPointEvidence::Asserted { nonempty: live.clone() };
        let crude = check_crude(&sys, &ev, &ann).unwrap();
        for a in sys.category().objects() {
            let cert = check_precise_diam(&sys, &ev, &ann, a).unwrap();
            if crude.passed() {
                prop_assert!(cert.passed(), "crude PASS but precise blocked at {a:?}");
            }
            if !cert.passed() {
                continue;
            }
            let bound = cert.bound.clone().unwrap();
            for k in 0..=16u64 {
                let beta = max_chain_weight(&sys, &ann, a, k as usize).unwrap();
                if k <= 5 {
                    prop_assert_eq!(&brute_beta(&sys, &ann, a, k as usize), &beta);
                }
                if let Some(beta) = beta {
                    prop_assert!(beta <= bound_at(&bound, k), "n={k}: {beta} > {bound:?}");
                }
            }
            let eps = rat(1, 1000);
            if let Some(d) = cert.decay_depth(&eps) {
                if d <= 16 {
                    let beta = max_chain_weight(&sys, &ann, a, d as usize).unwrap();
                    prop_assert!(beta.map_or(true, |b| b <= eps));
                }
            }
        }
    }
}

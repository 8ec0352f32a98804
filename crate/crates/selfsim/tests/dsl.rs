use selfsim::data::{METRICS, SYSTEMS};
use selfsim::dsl::DiagnosticKind;
use selfsim::{parse_metric, parse_sysdef, print_metric, print_sysdef};
use selfsim_core::address::liveness;
use selfsim_core::cover::{build_cover_system, covers_from_basis, GroundSpace, Tail};
use selfsim_core::ifs::{compile_system, overlap_report, Ifs};
use selfsim_core::simplex::{bary_module, edge_module};
use selfsim_core::transforms::{binarize, product_system};
use selfsim_core::SystemDef;

fn round_trip(sys: &SystemDef) {
    let text = print_sysdef(sys);
    let parsed = parse_sysdef(&text).unwrap_or_else(|d| panic!("{d}\n{text}"));
    assert_eq!(print_sysdef(&parsed.system), text);
    assert_eq!(parsed.system.object_count(), sys.object_count());
    assert_eq!(parsed.system.module().len(), sys.module().len());
    assert_eq!(parsed.system.category().arrow_count(), sys.category().arrow_count());
}

fn bundled(name: &str) -> SystemDef {
    let text = SYSTEMS.iter().find(|(n, _)| *n == name).unwrap().1;
    parse_sysdef(text).unwrap().system
}

#[test]
fn bundled_systems_round_trip() {
    for (name, text) in SYSTEMS {
        let sys = parse_sysdef(text).unwrap_or_else(|d| panic!("{name}: {d}")).system;
        round_trip(&sys);
    }
    for (name, ssd, met) in METRICS {
        let sys = parse_sysdef(ssd).unwrap().system;
        let spec = parse_metric(met, &sys).unwrap_or_else(|d| panic!("{name}: {d}"));
        let again = parse_metric(&print_metric(&sys, &spec), &sys).unwrap();
        assert_eq!(again, spec);
        let combined = parse_sysdef(&selfsim::dsl::print_with_metric(&sys, &spec)).unwrap();
        assert_eq!(combined.metric, Some(spec));
    }
}

#[test]
fn generated_systems_round_trip() {
    let freyd = bundled("freyd.ssd");
    round_trip(&product_system(&[freyd.clone(), freyd.clone()]).unwrap());
    round_trip(&product_system(&[freyd, bundled("discrete_ab.ssd")]).unwrap());
    round_trip(&bary_module(3).system);
    round_trip(&edge_module(3).system);
    round_trip(&binarize(&bundled("three_summand.ssd")).unwrap().0);
    let ifs = Ifs::sierpinski(2);
    let report = overlap_report(&ifs, 5).unwrap();
    round_trip(&compile_system(&ifs, &report).unwrap().system);
    let space = GroundSpace::new((0..5).map(|i| format!("p{i}")).collect(), None).unwrap();
    let basis: Vec<_> = (0..5).map(|i| [i].into_iter().collect()).collect();
    let cov = covers_from_basis(&space, &basis, 5);
    round_trip(&build_cover_system(&space, &cov, 5, Tail::PointLoops).unwrap().system);
}

#[test]
fn bundled_shapes() {
    let freyd = bundled("freyd.ssd");
    assert_eq!(freyd.object_count(), 2);
    assert_eq!(freyd.category().arrow_count(), 4);
    assert_eq!(freyd.module().len(), 6);

    let circle = bundled("circle.ssd");
    let cat = circle.category();
    let find = |n: &str| cat.arrow_ids().find(|&f| cat.arrow(f).name == n).unwrap();
    let (rho, sigma, tau, rs) = (find("rho"), find("sigma"), find("tau"), find("rs"));
    assert_eq!(cat.compose(rho, sigma), Some(rs));
    assert_eq!(cat.compose(rho, tau), Some(rs));

    let empty = bundled("empty.ssd");
    assert_eq!(liveness(&empty), vec![false, false]);
}

fn diagnose(text: &str) -> (usize, usize, DiagnosticKind) {
    let d = parse_sysdef(text).expect_err("should fail");
    assert!(d.to_string().starts_with(&format!("{}:{}: ", d.line, d.column)));
    (d.line, d.column, d.kind)
}

#[test]
fn diagnostics_point_at_the_problem() {
    use DiagnosticKind::*;
    assert_eq!(diagnose("objects\n  A\narrows\n  f : A => A\n"), (4, 9, Syntax));
    assert_eq!(diagnose("objects\n  A\narrows\n  f : A -> B\n"), (4, 12, Undeclared));
    assert_eq!(diagnose("objects\n  A A\n"), (2, 5, Duplicate));
    assert_eq!(
        diagnose("objects\n  A\narrows\n  f : A -> A\n"),
        (4, 3, CompositionGap)
    );
    assert_eq!(
        diagnose("objects\n  A\narrows\n  f : A -> A\n  compose f f = f\nmodule\n  m : A -> A\n"),
        (7, 3, ActionGap)
    );
    // g∘(g∘f) = g∘h = f but (g∘g)∘f = g∘f = h
    let law = "objects\n  A B\narrows\n  f : A -> B\n  g : B -> B\n  h : A -> B\n  compose g f = h\n  compose g h = f\n  compose g g = g\n";
    assert_eq!(diagnose(law), (3, 1, LawViolation));
    let wrong_dst = "objects\n  A B\narrows\n  f : A -> B\nmodule\n  m : A -> A\n  lact f m = m\n";
    assert_eq!(diagnose(wrong_dst), (7, 14, LawViolation));
    assert_eq!(diagnose("objects\n  A\nmodule\n  m : A -> A\nmetric\n  diam A 1\n").2, Metric);
    assert_eq!(diagnose("objects\n  A lact\n"), (2, 5, Syntax));
    assert_eq!(diagnose("objects\n  A\narrows\n  id[A] : A -> A\n").2, Syntax);
}

#[test]
fn metric_diagnostics() {
    let sys = bundled("identity.ssd");
    let d = parse_metric("diam X 1\nlip loop -1\n", &sys).unwrap_err();
    assert_eq!((d.line, d.kind), (2, DiagnosticKind::Metric));
    let d = parse_metric("diam Y 1\n", &sys).unwrap_err();
    assert_eq!((d.line, d.column), (1, 6));
    let spec = parse_metric("diam X 0\nlip loop 1\nempty X\n", &sys).unwrap();
    assert_eq!(spec.nonempty(), vec![false]);
}

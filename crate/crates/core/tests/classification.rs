//! Discrete classification against direct chain counting.

use selfsim_core::address::{classify_all, verify_witness, SolutionClass};
use selfsim_core::category::{FiniteCategory, ObjId};
use selfsim_core::module::ModuleBuilder;
use selfsim_core::SystemDef;

/// `counts[b][a]` elements `b ⇸ a`.
fn discrete(counts: &[Vec<usize>]) -> SystemDef {
    let n = counts.len();
    let cat = FiniteCategory::discrete((0..n).map(|i| format!("o{i}")));
    let mut mb = ModuleBuilder::new();
    for (b, row) in counts.iter().enumerate() {
        for (a, &k) in row.iter().enumerate() {
            for i in 0..k {
                mb.element(format!("m{b}{a}{i}"), ObjId(b), ObjId(a));
            }
        }
    }
    let module = mb.build(&cat).unwrap();
    SystemDef::new(cat, module).unwrap()
}

/// `paths[a]` = number of walks of length `len` ending at `a` (following
/// `b ⇸ a` backwards from `a`) whose last object satisfies `tip`.
fn walks(counts: &[Vec<usize>], len: usize, tip: &[bool]) -> Vec<u128> {
    let n = counts.len();
    let mut w: Vec<u128> = tip.iter().map(|&t| u128::from(t)).collect();
    for _ in 0..len {
        w = (0..n)
            .map(|a| (0..n).fold(0u128, |acc, b| acc.saturating_add((counts[b][a] as u128).saturating_mul(w[b]))))
            .collect();
    }
    w
}

const BIG_N: usize = 90;
const POLY_CAP: u128 = 90 * 90 * 90 * 8;

fn check(counts: &[Vec<usize>]) -> usize {
    let n = counts.len();
    let sys = discrete(counts);
    // a chain of length n repeats an object, so it extends forever
    let all = vec![true; n];
    let long = walks(counts, n, &all);
    let live: Vec<bool> = long.iter().map(|&c| c > 0).collect();
    let half = walks(counts, BIG_N / 2, &live);
    let full = walks(counts, BIG_N, &live);
    let classes = classify_all(&sys).unwrap();
    for c in &classes {
        let a = c.object.0;
        let expected = if !live[a] {
            SolutionClass::Empty
        } else if full[a] > POLY_CAP {
            SolutionClass::Uncountable
        } else if half[a] < full[a] {
            SolutionClass::CountablyInfinite
        } else if full[a] == 1 {
            SolutionClass::Singleton
        } else {
            SolutionClass::Finite(full[a] as u64)
        };
        assert_eq!(c.class, expected, "object {a} of {counts:?}");
        assert!(verify_witness(&sys, c), "witness for object {a} of {counts:?}");
    }
    classes.len()
}

fn all_count_matrices(n: usize, max: usize) -> Vec<Vec<Vec<usize>>> {
    let cells = n * n;
    let total = (max + 1).pow(cells as u32);
    (0..total)
        .map(|mut code| {
            let mut m = vec![vec![0; n]; n];
            for cell in 0..cells {
                m[cell / n][cell % n] = code % (max + 1);
                code /= max + 1;
            }
            m
        })
        .collect()
}

#[test]
fn every_small_discrete_system_matches_chain_growth() {
    let mut checked = 0;
    for n in 1..=3 {
        for counts in all_count_matrices(n, 2) {
            checked += check(&counts);
        }
    }
    assert_eq!(checked, 3 + 2 * 81 + 3 * 19683);
}

#[test]
fn a_point_and_its_convergent_sequence() {
    // A = A, B = B + A
    let sys = discrete(&[vec![1, 1], vec![0, 1]]);
    let c = classify_all(&sys).unwrap();
    assert_eq!(c[0].class, SolutionClass::Singleton);
    assert_eq!(c[1].class, SolutionClass::CountablyInfinite);
}

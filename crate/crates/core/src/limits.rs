//! Exhaustive pullback and equalizer search in finite categories, and the
//! check that a set-valued functor preserves the limits found.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::category::{ArrowId, FinSetFunctor, FiniteCategory, ObjId};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LimitKind {
    Pullback,
    Equalizer,
}

/// A verified limit cone.
///
/// For a pullback of the cospan `f: b → a ← b': g`, `projections` is
/// `[p, p']` with `f∘p = g∘p'`. For an equalizer of `f, g: b ⇉ a` it is the
/// single arrow `e` with `f∘e = g∘e`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSquare {
    pub kind: LimitKind,
    pub diagram: (ArrowId, ArrowId),
    pub apex: ObjId,
    pub projections: Vec<ArrowId>,
}

/// Outcome of the search for one diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitSearch {
    pub diagram: (ArrowId, ArrowId),
    /// `None` certifies that none of the `cones_checked` cones is universal.
    pub limit: Option<LimitSquare>,
    pub cones_checked: usize,
}

type Cone = (ObjId, ArrowId, ArrowId);

fn pullback_cones(cat: &FiniteCategory, f: ArrowId, g: ArrowId) -> Vec<Cone> {
    let (b, b2) = (cat.src(f), cat.src(g));
    let mut cones = Vec::new();
    for c in cat.objects() {
        for &p in cat.hom(c, b) {
            for &q in cat.hom(c, b2) {
                if cat.comp(f, p) == cat.comp(g, q) {
                    cones.push((c, p, q));
                }
            }
        }
    }
    cones
}

fn is_universal_pullback(cat: &FiniteCategory, cand: Cone, cones: &[Cone]) -> bool {
    let (c, p, q) = cand;
    cones.iter().all(|&(d, p2, q2)| {
        cat.hom(d, c)
            .iter()
            .filter(|&&u| cat.comp(p, u) == p2 && cat.comp(q, u) == q2)
            .count()
            == 1
    })
}

fn equalizer_cones(cat: &FiniteCategory, f: ArrowId, g: ArrowId) -> Vec<(ObjId, ArrowId)> {
    let b = cat.src(f);
    let mut cones = Vec::new();
    for c in cat.objects() {
        for &e in cat.hom(c, b) {
            if cat.comp(f, e) == cat.comp(g, e) {
                cones.push((c, e));
            }
        }
    }
    cones
}

/// Searches every cospan `b → a ← b'` (unordered pairs of arrows with a
/// common target, including equal ones) for a pullback.
pub fn find_pullbacks(cat: &FiniteCategory) -> Vec<LimitSearch> {
    let mut out = Vec::new();
    for a in cat.objects() {
        let into = cat.arrows_into(a);
        for (i, &f) in into.iter().enumerate() {
            for &g in &into[i..] {
                out.push(find_pullback(cat, f, g));
            }
        }
    }
    out
}

pub fn find_pullback(cat: &FiniteCategory, f: ArrowId, g: ArrowId) -> LimitSearch {
    let cones = pullback_cones(cat, f, g);
    let limit = cones
        .iter()
        .find(|&&cand| is_universal_pullback(cat, cand, &cones))
        .map(|&(c, p, q)| LimitSquare {
            kind: LimitKind::Pullback,
            diagram: (f, g),
            apex: c,
            projections: alloc::vec![p, q],
        });
    LimitSearch {
        diagram: (f, g),
        limit,
        cones_checked: cones.len(),
    }
}

/// Searches every parallel pair `f, g: b ⇉ a` (unordered, including `f = g`).
pub fn find_equalizers(cat: &FiniteCategory) -> Vec<LimitSearch> {
    let mut out = Vec::new();
    for b in cat.objects() {
        for a in cat.objects() {
            let hom = cat.hom(b, a);
            for (i, &f) in hom.iter().enumerate() {
                for &g in &hom[i..] {
                    out.push(find_equalizer(cat, f, g));
                }
            }
        }
    }
    out
}

pub fn find_equalizer(cat: &FiniteCategory, f: ArrowId, g: ArrowId) -> LimitSearch {
    let cones = equalizer_cones(cat, f, g);
    let limit = cones
        .iter()
        .find(|&&(c, e)| {
            cones.iter().all(|&(d, e2)| {
                cat.hom(d, c).iter().filter(|&&u| cat.comp(e, u) == e2).count() == 1
            })
        })
        .map(|&(c, e)| LimitSquare {
            kind: LimitKind::Equalizer,
            diagram: (f, g),
            apex: c,
            projections: alloc::vec![e],
        });
    LimitSearch {
        diagram: (f, g),
        limit,
        cones_checked: cones.len(),
    }
}

/// Why a functor fails to send a limit square to a limit of sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PreservationFailure {
    /// Two apex elements with the same image in the fibered product or
    /// equalizer subset.
    NotInjective { square: LimitSquare, elements: (usize, usize) },
    /// An element of the fibered product (or equalizer subset) that no
    /// apex element reaches, given as the tuple of coordinates.
    NotSurjective { square: LimitSquare, missing: Vec<usize> },
}

impl PreservationFailure {
    pub fn square(&self) -> &LimitSquare {
        match self {
            PreservationFailure::NotInjective { square, .. } => square,
            PreservationFailure::NotSurjective { square, .. } => square,
        }
    }

    pub fn describe(&self, cat: &FiniteCategory) -> String {
        let sq = self.square();
        let kind = match sq.kind {
            LimitKind::Pullback => "pullback",
            LimitKind::Equalizer => "equalizer",
        };
        let (f, g) = sq.diagram;
        let head = format!(
            "{kind} of ({}, {}) with apex `{}`",
            cat.arrow(f).name,
            cat.arrow(g).name,
            cat.object_name(sq.apex)
        );
        match self {
            PreservationFailure::NotInjective { elements, .. } => {
                format!("{head}: elements {} and {} are identified", elements.0, elements.1)
            }
            PreservationFailure::NotSurjective { missing, .. } => {
                format!("{head}: {missing:?} is not in the image")
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreservationReport {
    pub pullbacks: bool,
    pub equalizers: bool,
    /// First failure of each kind, pullbacks first.
    pub witnesses: Vec<PreservationFailure>,
}

impl PreservationReport {
    pub fn preserves_all(&self) -> bool {
        self.pullbacks && self.equalizers
    }
}

/// All limit squares of a category, computed once and reusable across
/// several functors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitCatalog {
    pub pullbacks: Vec<LimitSearch>,
    pub equalizers: Vec<LimitSearch>,
}

impl LimitCatalog {
    pub fn compute(cat: &FiniteCategory) -> Self {
        LimitCatalog {
            pullbacks: find_pullbacks(cat),
            equalizers: find_equalizers(cat),
        }
    }

    pub fn squares(&self) -> impl Iterator<Item = &LimitSquare> {
        self.pullbacks
            .iter()
            .chain(self.equalizers.iter())
            .filter_map(|s| s.limit.as_ref())
    }

    pub fn check(&self, cat: &FiniteCategory, x: &FinSetFunctor) -> PreservationReport {
        let mut witnesses = Vec::new();
        let mut pullbacks = true;
        for sq in self.pullbacks.iter().filter_map(|s| s.limit.as_ref()) {
            if let Some(w) = check_square(cat, x, sq) {
                pullbacks = false;
                witnesses.push(w);
                break;
            }
        }
        let mut equalizers = true;
        for sq in self.equalizers.iter().filter_map(|s| s.limit.as_ref()) {
            if let Some(w) = check_square(cat, x, sq) {
                equalizers = false;
                witnesses.push(w);
                break;
            }
        }
        PreservationReport {
            pullbacks,
            equalizers,
            witnesses,
        }
    }
}

/// Checks that `x` sends every pullback and equalizer of `cat` to a limit
/// in finite sets.
pub fn check_preserves_limits(cat: &FiniteCategory, x: &FinSetFunctor) -> PreservationReport {
    LimitCatalog::compute(cat).check(cat, x)
}

/// Compares the image of the apex with the concrete limit of the image
/// diagram.
pub fn check_square(cat: &FiniteCategory, x: &FinSetFunctor, sq: &LimitSquare) -> Option<PreservationFailure> {
    let (f, g) = sq.diagram;
    // concrete limit: tuples over the sources of the diagram
    let concrete: Vec<Vec<usize>> = match sq.kind {
        LimitKind::Pullback => {
            let (b, b2) = (cat.src(f), cat.src(g));
            let mut v = Vec::new();
            for y in 0..x.size(b) {
                for z in 0..x.size(b2) {
                    if x.apply(f, y) == x.apply(g, z) {
                        v.push(alloc::vec![y, z]);
                    }
                }
            }
            v
        }
        LimitKind::Equalizer => (0..x.size(cat.src(f)))
            .filter(|&y| x.apply(f, y) == x.apply(g, y))
            .map(|y| alloc::vec![y])
            .collect(),
    };
    let image = |c: usize| -> Vec<usize> { sq.projections.iter().map(|&p| x.apply(p, c)).collect() };
    let n = x.size(sq.apex);
    let mut seen: alloc::collections::BTreeMap<Vec<usize>, usize> = alloc::collections::BTreeMap::new();
    for c in 0..n {
        if let Some(&prev) = seen.get(&image(c)) {
            return Some(PreservationFailure::NotInjective {
                square: sq.clone(),
                elements: (prev, c),
            });
        }
        seen.insert(image(c), c);
    }
    for t in concrete {
        if !seen.contains_key(&t) {
            return Some(PreservationFailure::NotSurjective {
                square: sq.clone(),
                missing: t,
            });
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::CategoryBuilder;

    #[test]
    fn discrete_category_has_pullbacks_only_over_equal_objects() {
        let c = FiniteCategory::discrete(["A", "B"]);
        let pbs = find_pullbacks(&c);
        // only identity cospans exist, each with the identity square
        assert_eq!(pbs.len(), 2);
        assert!(pbs.iter().all(|s| s.limit.is_some()));
    }

    #[test]
    fn equalizer_of_equal_arrows_is_identity() {
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        let s = b.arrow("sigma", o0, o1);
        b.arrow("tau", o0, o1);
        let c = b.build().unwrap();
        let e = find_equalizer(&c, s, s);
        let sq = e.limit.unwrap();
        assert_eq!(sq.apex, o0);
        assert!(c.is_identity(sq.projections[0]));
    }

    #[test]
    fn freyd_sigma_tau_have_no_equalizer_or_pullback() {
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        let s = b.arrow("sigma", o0, o1);
        let t = b.arrow("tau", o0, o1);
        let c = b.build().unwrap();
        assert!(find_equalizer(&c, s, t).limit.is_none());
        assert!(find_pullback(&c, s, t).limit.is_none());
        assert!(find_pullback(&c, s, s).limit.is_some());
    }

    #[test]
    fn constant_singleton_functor_preserves_everything() {
        let c = FiniteCategory::poset(&["a", "b", "c", "d"], |i, j| i == j || i == 0 || j == 3);
        assert!(c.validate().is_valid());
        let x = FinSetFunctor::constant(&c, 1);
        assert!(check_preserves_limits(&c, &x).preserves_all());
    }

    #[test]
    fn collapsing_a_pullback_is_detected() {
        // meet square: bottom <= l, r <= top; pullback of l -> top <- r is bottom
        let c = FiniteCategory::poset(&["bot", "l", "r", "top"], |i, j| i == j || i == 0 || j == 3);
        // X = 2 points at top, l and r each see both, bottom sees one: not a pullback
        let x = FinSetFunctor::from_fn(&c, &[1, 2, 2, 2], |_, e| e);
        assert!(x.validate(&c).is_ok());
        let r = check_preserves_limits(&c, &x);
        assert!(!r.pullbacks);
        assert!(matches!(r.witnesses[0], PreservationFailure::NotSurjective { .. }));
    }
}

//! Self-similarity systems generated by a sequence of finite covers of a
//! finite ground space.
//!
//! Level `n` of the category holds the tuples `(V₁, …, Vₙ)` with `Vᵢ ∈ 𝒱ᵢ`
//! and nonempty intersection, ordered componentwise by inclusion. A module
//! element `W ⇸ V` exists when `W` is one level deeper than `V` and
//! `⋂W ⊆ ⋂V`. The functor `J` sends a tuple to its intersection.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::category::{FinSetFunctor, FiniteCategory, ObjId};
use crate::module::{ElemId, ModuleBuilder, SystemDef};
use crate::rational::Rational;
use crate::tensor::tensor;
use crate::{Error, Result};

pub type PointSet = BTreeSet<usize>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroundSpace {
    pub labels: Vec<String>,
    pub metric: Option<Vec<Vec<Rational>>>,
}

impl GroundSpace {
    pub fn new(labels: Vec<String>, metric: Option<Vec<Vec<Rational>>>) -> Result<Self> {
        let distinct: BTreeSet<&String> = labels.iter().collect();
        if distinct.len() != labels.len() {
            return Err(Error::Input("point labels must be distinct".into()));
        }
        if let Some(d) = &metric {
            let n = labels.len();
            if d.len() != n || d.iter().any(|r| r.len() != n) {
                return Err(Error::Input("metric must be a square matrix over the points".into()));
            }
            for i in 0..n {
                for j in 0..n {
                    if (i == j) != (d[i][j] == Rational::from_integer(0.into())) || d[i][j] != d[j][i] {
                        return Err(Error::Input(format!(
                            "metric fails positivity or symmetry at ({}, {})",
                            labels[i], labels[j]
                        )));
                    }
                    for k in 0..n {
                        if d[i][k] > &d[i][j] + &d[j][k] {
                            return Err(Error::Input(format!(
                                "triangle inequality fails through {}",
                                labels[j]
                            )));
                        }
                    }
                }
            }
        }
        Ok(GroundSpace { labels, metric })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn all(&self) -> PointSet {
        (0..self.len()).collect()
    }
}

/// Families `𝒱₁, …, 𝒱_N`. The empty set is implicit in every family and
/// never stored.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverSequence {
    pub levels: Vec<Vec<PointSet>>,
}

impl CoverSequence {
    /// Drops empty sets and duplicates; keeps the first-seen order.
    pub fn new(levels: Vec<Vec<PointSet>>) -> Self {
        let levels = levels
            .into_iter()
            .map(|family| {
                let mut seen = BTreeSet::new();
                family
                    .into_iter()
                    .filter(|v| !v.is_empty() && seen.insert(v.clone()))
                    .collect()
            })
            .collect();
        CoverSequence { levels }
    }

    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    /// Each family covers the space and is closed under binary
    /// intersection (up to the implicit empty set).
    pub fn validate(&self, space: &GroundSpace) -> Result<()> {
        for (n, family) in self.levels.iter().enumerate() {
            for (i, v) in family.iter().enumerate() {
                if let Some(p) = v.iter().find(|&&p| p >= space.len()) {
                    return Err(Error::Input(format!("level {}: set {i} mentions unknown point {p}", n + 1)));
                }
            }
            let covered: PointSet = family.iter().flatten().copied().collect();
            if let Some(p) = space.all().difference(&covered).next() {
                return Err(Error::Input(format!(
                    "level {} does not cover point {}",
                    n + 1,
                    space.labels[*p]
                )));
            }
            for (i, v) in family.iter().enumerate() {
                for (j, w) in family.iter().enumerate().skip(i + 1) {
                    let meet: PointSet = v.intersection(w).copied().collect();
                    if !meet.is_empty() && !family.contains(&meet) {
                        return Err(Error::Input(format!(
                            "level {}: sets {i} and {j} meet in a set outside the family",
                            n + 1
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Least level separating each pair of points; `None` when no level up to
/// the sequence depth does.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparationReport {
    pub pairs: BTreeMap<(usize, usize), Option<usize>>,
}

impl SeparationReport {
    pub fn separated(&self) -> bool {
        self.pairs.values().all(Option::is_some)
    }

    pub fn max_depth(&self) -> Option<usize> {
        self.pairs.values().map(|d| d.unwrap_or(0)).max()
    }

    pub fn unseparated(&self) -> Vec<(usize, usize)> {
        self.pairs
            .iter()
            .filter(|(_, d)| d.is_none())
            .map(|(&p, _)| p)
            .collect()
    }
}

/// A pair is separated at level `n` when no set of `𝒱ₙ` holds both points.
pub fn validate_separating(space: &GroundSpace, cov: &CoverSequence) -> Result<SeparationReport> {
    cov.validate(space)?;
    let mut pairs = BTreeMap::new();
    for s in 0..space.len() {
        for t in s + 1..space.len() {
            let level = cov
                .levels
                .iter()
                .position(|family| !family.iter().any(|v| v.contains(&s) && v.contains(&t)))
                .map(|n| n + 1);
            pairs.insert((s, t), level);
        }
    }
    Ok(SeparationReport { pairs })
}

/// `𝒱ₙ` is the intersection closure of `{Uₙ, S ∖ Uₙ}`; levels past the
/// basis are `{S}`.
pub fn covers_from_basis(space: &GroundSpace, basis: &[PointSet], depth: usize) -> CoverSequence {
    let all = space.all();
    let levels = (0..depth)
        .map(|n| match basis.get(n) {
            Some(u) => {
                let u: PointSet = u.intersection(&all).copied().collect();
                let rest: PointSet = all.difference(&u).copied().collect();
                vec![u, rest]
            }
            None => vec![all.clone()],
        })
        .collect();
    CoverSequence::new(levels)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Tail {
    /// Stop at level `N`; its objects receive no elements.
    #[default]
    Truncate,
    /// Give every level-`N` object with a one-point intersection the
    /// elements `W ⇸ V` (`W`, `V` at level `N`, `⋂W ⊆ ⋂V`), so that
    /// separated points carry an infinite address.
    PointLoops,
}

/// A cover-generated system with the bookkeeping behind its objects.
#[derive(Clone, Debug)]
pub struct CoverSystem {
    pub system: SystemDef,
    /// Family indices behind each object.
    pub tuples: Vec<Vec<usize>>,
    /// `⋂ Vᵢ` for each object.
    pub sets: Vec<PointSet>,
    /// Objects of each level `0..=N`.
    pub layers: Vec<Vec<ObjId>>,
    pub tail: Tail,
    /// Labels of the ground space points.
    pub points: Vec<String>,
}

fn tuple_name(t: &[usize]) -> String {
    let parts: Vec<String> = t.iter().map(|i| format!("{i}")).collect();
    format!("({})", parts.join(","))
}

pub fn build_cover_system(space: &GroundSpace, cov: &CoverSequence, depth: usize, tail: Tail) -> Result<CoverSystem> {
    cov.validate(space)?;
    if depth > cov.depth() {
        return Err(Error::Input(format!(
            "depth {depth} exceeds the {} levels of the sequence",
            cov.depth()
        )));
    }
    let mut tuples: Vec<Vec<usize>> = vec![Vec::new()];
    let mut sets: Vec<PointSet> = vec![space.all()];
    let mut layers = vec![vec![ObjId(0)]];
    let mut frontier = vec![0usize];
    for n in 0..depth {
        let mut next = Vec::new();
        for &o in &frontier {
            for (i, v) in cov.levels[n].iter().enumerate() {
                let meet: PointSet = sets[o].intersection(v).copied().collect();
                if !meet.is_empty() {
                    let mut t = tuples[o].clone();
                    t.push(i);
                    next.push((t, meet));
                }
            }
        }
        next.sort();
        let mut layer = Vec::new();
        frontier.clear();
        for (t, s) in next {
            frontier.push(tuples.len());
            layer.push(ObjId(tuples.len()));
            tuples.push(t);
            sets.push(s);
        }
        layers.push(layer);
    }
    let level_of: Vec<usize> = tuples.iter().map(Vec::len).collect();
    let leq = |i: usize, j: usize| {
        level_of[i] == level_of[j]
            && tuples[i]
                .iter()
                .zip(&tuples[j])
                .enumerate()
                .all(|(k, (&a, &b))| cov.levels[k][a].is_subset(&cov.levels[k][b]))
    };
    let names: Vec<String> = tuples.iter().map(|t| tuple_name(t)).collect();
    let category = FiniteCategory::poset(&names, leq);

    let mut mb = ModuleBuilder::new();
    let mut elem: BTreeMap<(usize, usize), ElemId> = BTreeMap::new();
    let mut add = |mb: &mut ModuleBuilder, w: usize, v: usize| {
        let id = mb.element(format!("{}>{}", names[w], names[v]), ObjId(w), ObjId(v));
        elem.insert((w, v), id);
    };
    for n in 0..depth {
        for &v in &layers[n] {
            for &w in &layers[n + 1] {
                if sets[w.0].is_subset(&sets[v.0]) {
                    add(&mut mb, w.0, v.0);
                }
            }
        }
    }
    if tail == Tail::PointLoops {
        for &v in &layers[depth] {
            for &w in &layers[depth] {
                if sets[w.0].len() == 1 && sets[w.0].is_subset(&sets[v.0]) {
                    add(&mut mb, w.0, v.0);
                }
            }
        }
    }
    for (&(w, v), &m) in &elem {
        for &f in category.arrows_out_of(ObjId(v)) {
            let v2 = category.dst(f).0;
            mb.lact(f, m, elem[&(w, v2)]);
        }
        for &g in category.arrows_into(ObjId(w)) {
            let w2 = category.src(g).0;
            mb.ract(m, g, elem[&(w2, v)]);
        }
    }
    let module = mb.build(&category)?;
    let system = SystemDef::new(category, module)?;
    Ok(CoverSystem {
        system,
        tuples,
        sets,
        layers,
        tail,
        points: space.labels.clone(),
    })
}

impl CoverSystem {
    /// `J(V₁, …, Vₙ) = V₁ ∩ ⋯ ∩ Vₙ` with inclusions as action.
    pub fn j_functor(&self) -> FinSetFunctor {
        let cat = self.system.category();
        let carriers: Vec<Vec<usize>> = self.sets.iter().map(|s| s.iter().copied().collect()).collect();
        let action = cat
            .arrow_ids()
            .map(|f| {
                let target = &carriers[cat.dst(f).0];
                carriers[cat.src(f).0]
                    .iter()
                    .map(|p| target.binary_search(p).expect("inclusion"))
                    .collect()
            })
            .collect();
        let labels = carriers
            .iter()
            .map(|c| c.iter().map(|&p| self.points[p].clone()).collect())
            .collect();
        FinSetFunctor::new(labels, action)
    }

    /// Levels whose objects receive module elements.
    pub fn interior_levels(&self) -> usize {
        match self.tail {
            Tail::Truncate => self.layers.len() - 1,
            Tail::PointLoops => self.layers.len(),
        }
    }
}

/// Result of checking `ψ: M ⊗ J → J` (componentwise inclusion) on the
/// interior levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverVerification {
    pub levels_checked: usize,
    pub objects_checked: usize,
    /// For each checked object and point, an element `W ⇸ V` with the
    /// point in `⋂W`.
    pub witnesses: Vec<(ObjId, usize, ElemId)>,
    pub failure: Option<String>,
}

impl CoverVerification {
    pub fn is_iso(&self) -> bool {
        self.failure.is_none()
    }
}

pub fn build_j_and_verify(cs: &CoverSystem) -> Result<(FinSetFunctor, CoverVerification)> {
    let sys = &cs.system;
    let cat = sys.category();
    let module = sys.module();
    let j = cs.j_functor();
    let t = tensor(sys, &j)?;
    let levels = cs.interior_levels();
    let mut witnesses = Vec::new();
    let mut failure = None;
    let mut objects_checked = 0;
    let point = |a: ObjId, x: usize| j.carrier(a)[x].clone();
    'outer: for layer in &cs.layers[..levels] {
        for &v in layer {
            objects_checked += 1;
            // ψ_V: the class of (m, x) goes to the point x
            let mut image = vec![None; t.size(v)];
            for (k, class) in t.classes(v).iter().enumerate() {
                let pts: BTreeSet<String> = class
                    .members
                    .iter()
                    .map(|&(m, x)| point(module.src(m), x))
                    .collect();
                if pts.len() != 1 {
                    failure = Some(format!("ψ is not well defined at {}", cat.object_name(v)));
                    break 'outer;
                }
                let p = pts.into_iter().next().unwrap();
                image[k] = j.find_label(v, &p);
            }
            let hit: BTreeSet<usize> = image.iter().flatten().copied().collect();
            if hit.len() != image.len() || image.iter().any(Option::is_none) {
                failure = Some(format!("ψ is not injective at {}", cat.object_name(v)));
                break 'outer;
            }
            for x in 0..j.size(v) {
                let label = point(v, x);
                let w = module.elements_into(v).iter().find_map(|&m| {
                    j.find_label(module.src(m), &label).map(|_| m)
                });
                match w {
                    Some(m) if hit.contains(&x) => witnesses.push((v, x, m)),
                    _ => {
                        failure = Some(format!(
                            "ψ misses point {label} at {}",
                            cat.object_name(v)
                        ));
                        break 'outer;
                    }
                }
            }
            for &f in cat.arrows_out_of(v) {
                for (k, img) in image.iter().enumerate() {
                    let lhs = image_of(&t, &j, module, cat.dst(f), t.functor().apply(f, k));
                    if lhs != Some(j.apply(f, img.unwrap())) {
                        failure = Some(format!("ψ is not natural along {}", cat.arrow(f).name));
                        break 'outer;
                    }
                }
            }
        }
    }
    Ok((
        j.clone(),
        CoverVerification {
            levels_checked: levels,
            objects_checked,
            witnesses,
            failure,
        },
    ))
}

fn image_of(
    t: &crate::tensor::Tensor,
    j: &FinSetFunctor,
    module: &crate::module::Module,
    a: ObjId,
    k: usize,
) -> Option<usize> {
    let (m, x) = t.classes(a)[k].representative;
    j.find_label(a, &j.carrier(module.src(m))[x])
}

/// Depth-`n` addresses of each point: the level-`n` objects whose
/// intersection contains it.
pub fn point_addresses(cs: &CoverSystem, n: usize) -> Vec<BTreeSet<ObjId>> {
    (0..cs.points.len())
        .map(|p| {
            cs.layers[n]
                .iter()
                .copied()
                .filter(|o| cs.sets[o.0].contains(&p))
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::address::{classify_discrete, SolutionClass};

    fn space(n: usize) -> GroundSpace {
        GroundSpace::new((0..n).map(|i| format!("p{i}")).collect(), None).unwrap()
    }

    fn singletons(n: usize) -> Vec<PointSet> {
        (0..n).map(|i| [i].into_iter().collect()).collect()
    }

    #[test]
    fn singleton_basis_separates_and_verifies() {
        let s = space(4);
        let cov = covers_from_basis(&s, &singletons(4), 4);
        let rep = validate_separating(&s, &cov).unwrap();
        assert!(rep.separated());
        let cs = build_cover_system(&s, &cov, 4, Tail::Truncate).unwrap();
        let (_, v) = build_j_and_verify(&cs).unwrap();
        assert!(v.is_iso(), "{:?}", v.failure);
        assert_eq!(v.levels_checked, 4);
    }

    #[test]
    fn constant_covers_separate_nothing() {
        let s = space(3);
        let cov = covers_from_basis(&s, &[], 3);
        let rep = validate_separating(&s, &cov).unwrap();
        assert_eq!(rep.unseparated().len(), 3);
        let cs = build_cover_system(&s, &cov, 3, Tail::Truncate).unwrap();
        assert_eq!(cs.system.object_count(), 4);
        assert!(build_j_and_verify(&cs).unwrap().1.is_iso());
    }

    #[test]
    fn partitions_give_finite_solutions() {
        let s = space(4);
        let halves: PointSet = [0, 1].into_iter().collect();
        let evens: PointSet = [0, 2].into_iter().collect();
        let cov = covers_from_basis(&s, &[halves, evens], 2);
        let cs = build_cover_system(&s, &cov, 2, Tail::PointLoops).unwrap();
        assert!(cs.system.is_discrete());
        assert!(build_j_and_verify(&cs).unwrap().1.is_iso());
        let c = classify_discrete(&cs.system, ObjId(0)).unwrap();
        assert_eq!(c.class, SolutionClass::Finite(4));
    }

    #[test]
    fn missing_intersections_are_reported() {
        let s = space(3);
        let a: PointSet = [0, 1].into_iter().collect();
        let b: PointSet = [1, 2].into_iter().collect();
        let cov = CoverSequence::new(vec![vec![a, b]]);
        assert!(cov.validate(&s).is_err());
    }
}

//! Address chains `aₙ ⇸ ⋯ ⇸ a₀`, liveness, and the classification of
//! solution spaces of discrete systems.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::category::{FinSetFunctor, ObjId};
use crate::graph::Digraph;
use crate::module::{ElemId, SystemDef};
use crate::{Error, Result};

/// A chain `m₁, …, mₙ` with `mᵢ: aᵢ ⇸ aᵢ₋₁`, stored base-first: `elements[0]`
/// is `m₁`, whose target is `base = a₀`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AddressChain {
    pub base: ObjId,
    pub elements: Vec<ElemId>,
}

impl AddressChain {
    pub fn empty(base: ObjId) -> Self {
        AddressChain {
            base,
            elements: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `a₀, …, aₙ`.
    pub fn objects(&self, sys: &SystemDef) -> Vec<ObjId> {
        let mut v = alloc::vec![self.base];
        v.extend(self.elements.iter().map(|&m| sys.module().src(m)));
        v
    }

    /// `aₙ`.
    pub fn tip(&self, sys: &SystemDef) -> ObjId {
        self.elements.last().map(|&m| sys.module().src(m)).unwrap_or(self.base)
    }

    pub fn is_valid(&self, sys: &SystemDef) -> bool {
        let module = sys.module();
        let mut cur = self.base;
        for &m in &self.elements {
            if m.0 >= module.len() || module.dst(m) != cur {
                return false;
            }
            cur = module.src(m);
        }
        true
    }

    pub fn push(&mut self, m: ElemId) {
        self.elements.push(m);
    }

    pub fn truncate(&self, n: usize) -> AddressChain {
        AddressChain {
            base: self.base,
            elements: self.elements[..n.min(self.len())].to_vec(),
        }
    }

    /// Renders `aₙ ⇸ ⋯ ⇸ a₀` with element names on the arrows.
    pub fn display(&self, sys: &SystemDef) -> String {
        let cat = sys.category();
        let module = sys.module();
        let mut s = String::new();
        for &m in self.elements.iter().rev() {
            s.push_str(cat.object_name(module.src(m)));
            s.push_str(&format!(" -{}-> ", module.name(m)));
        }
        s.push_str(cat.object_name(self.base));
        s
    }
}

/// The live chain graph: node per object, edge `a → b` labelled `m` for
/// each `m: b ⇸ a` between live objects. Paths from `a` are chains into `a`.
pub(crate) fn live_chain_graph(sys: &SystemDef, live: &[bool]) -> (Digraph, Vec<ElemId>) {
    let module = sys.module();
    let kept: Vec<ElemId> = module
        .ids()
        .filter(|&m| live[module.src(m).0] && live[module.dst(m).0])
        .collect();
    let edges = kept
        .iter()
        .map(|&m| (module.dst(m).0, module.src(m).0, m.0))
        .collect();
    (Digraph::new(sys.object_count(), edges), kept)
}

/// Greatest fixpoint of `S ↦ {a | ∃ m: b ⇸ a, b ∈ S}`: the objects that admit
/// an infinite chain.
pub fn liveness(sys: &SystemDef) -> Vec<bool> {
    let module = sys.module();
    let mut live = alloc::vec![true; sys.object_count()];
    loop {
        let mut changed = false;
        for a in sys.category().objects() {
            if live[a.0] && !module.elements_into(a).iter().any(|&m| live[module.src(m).0]) {
                live[a.0] = false;
                changed = true;
            }
        }
        if !changed {
            return live;
        }
    }
}

pub fn live_objects(sys: &SystemDef) -> Vec<ObjId> {
    liveness(sys)
        .iter()
        .enumerate()
        .filter(|(_, &l)| l)
        .map(|(i, _)| ObjId(i))
        .collect()
}

/// True iff the carrier is nonempty at every live object.
pub fn check_occupied(sys: &SystemDef, x: &FinSetFunctor) -> bool {
    live_objects(sys).iter().all(|&a| x.size(a) > 0)
}

/// Same check with only the emptiness pattern known.
pub fn check_occupied_flags(sys: &SystemDef, nonempty: &[bool]) -> bool {
    live_objects(sys).iter().all(|&a| nonempty[a.0])
}

/// All length-`n` chains into `a`, in lexicographic order of element ids.
pub fn enumerate_chains(sys: &SystemDef, a: ObjId, n: usize) -> Vec<AddressChain> {
    let module = sys.module();
    let mut out = Vec::new();
    let mut stack: Vec<AddressChain> = alloc::vec![AddressChain::empty(a)];
    // depth-first with reversed pushes keeps the output lexicographic
    while let Some(c) = stack.pop() {
        if c.len() == n {
            out.push(c);
            continue;
        }
        let tip = c.tip(sys);
        for &m in module.elements_into(tip).iter().rev() {
            let mut d = c.clone();
            d.push(m);
            stack.push(d);
        }
    }
    out
}

/// `|𝓘ₙa|` for every object, saturating at `u128::MAX`.
pub fn chain_counts(sys: &SystemDef, n: usize) -> Vec<u128> {
    let module = sys.module();
    let mut counts = alloc::vec![1u128; sys.object_count()];
    for _ in 0..n {
        counts = sys
            .category()
            .objects()
            .map(|a| {
                module
                    .elements_into(a)
                    .iter()
                    .fold(0u128, |acc, &m| acc.saturating_add(counts[module.src(m).0]))
            })
            .collect();
    }
    counts
}

pub fn count_chains(sys: &SystemDef, a: ObjId, n: usize) -> u128 {
    chain_counts(sys, n)[a.0]
}

/// Upper end of the exact `Finite(k)` range.
pub const FINITE_CAP: u64 = 1_000_000;

/// Shape of the space of infinite chains into an object of a discrete
/// system.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SolutionClass {
    Empty,
    Singleton,
    /// `k ≥ 2` points; `k` is capped at [`FINITE_CAP`].
    Finite(u64),
    CountablyInfinite,
    Uncountable,
}

impl fmt::Display for SolutionClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolutionClass::Empty => f.write_str("Empty"),
            SolutionClass::Singleton => f.write_str("Singleton"),
            SolutionClass::Finite(k) if *k >= FINITE_CAP => write!(f, "Finite(>={k})"),
            SolutionClass::Finite(k) => write!(f, "Finite({k})"),
            SolutionClass::CountablyInfinite => f.write_str("CountablyInfinite"),
            SolutionClass::Uncountable => f.write_str("Uncountable (Cantor)"),
        }
    }
}

/// Evidence behind a [`SolutionClass`], checkable with [`verify_witness`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    /// The object is not live.
    Dead,
    /// Two distinct closed walks at `node`, each returning to it only at
    /// the end, reachable from the classified object along `approach`.
    TwoCycles {
        approach: Vec<ElemId>,
        node: ObjId,
        first: Vec<ElemId>,
        second: Vec<ElemId>,
    },
    /// A closed walk at `node` together with an element leaving its
    /// component towards a live object.
    CycleWithExit {
        approach: Vec<ElemId>,
        node: ObjId,
        cycle: Vec<ElemId>,
        exit: ElemId,
    },
    /// The number of infinite chains, counted over the acyclic part.
    Paths { count: u64, capped: bool },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub object: ObjId,
    pub class: SolutionClass,
    pub witness: Witness,
}

/// Classifies the infinite chains into `a` for a discrete system.
pub fn classify_discrete(sys: &SystemDef, a: ObjId) -> Result<Classification> {
    if !sys.is_discrete() {
        return Err(Error::Unsupported(
            "classification needs a discrete category; use a recognition certificate instead".into(),
        ));
    }
    let live = liveness(sys);
    if !live[a.0] {
        return Ok(Classification {
            object: a,
            class: SolutionClass::Empty,
            witness: Witness::Dead,
        });
    }
    let (g, _) = live_chain_graph(sys, &live);
    let reach = g.reachable(a.0);
    let comp = g.scc();
    let approach = |node: usize| -> Vec<ElemId> {
        g.shortest_path(a.0, node, &|_| true)
            .unwrap_or_default()
            .into_iter()
            .map(|e| ElemId(g.edges[e].2))
            .collect()
    };
    let walk_back = |e: usize| -> Vec<ElemId> {
        let (u, v, lab) = g.edges[e];
        let c = comp[u];
        let mut w = alloc::vec![ElemId(lab)];
        let back = g.shortest_path(v, u, &|x| comp[x] == c).expect("same component");
        w.extend(back.into_iter().map(|e| ElemId(g.edges[e].2)));
        w
    };
    let inside = |e: usize| comp[g.edges[e].0] == comp[g.edges[e].1];
    let reached: Vec<usize> = (0..g.n).filter(|&u| reach[u]).collect();
    for &u in &reached {
        let internal: Vec<usize> = g.out[u].iter().copied().filter(|&e| inside(e)).collect();
        if internal.len() >= 2 {
            return Ok(Classification {
                object: a,
                class: SolutionClass::Uncountable,
                witness: Witness::TwoCycles {
                    approach: approach(u),
                    node: ObjId(u),
                    first: walk_back(internal[0]),
                    second: walk_back(internal[1]),
                },
            });
        }
    }
    for &u in &reached {
        let internal = g.out[u].iter().copied().find(|&e| inside(e));
        let exit = g.out[u].iter().copied().find(|&e| !inside(e));
        if let (Some(ie), Some(xe)) = (internal, exit) {
            return Ok(Classification {
                object: a,
                class: SolutionClass::CountablyInfinite,
                witness: Witness::CycleWithExit {
                    approach: approach(u),
                    node: ObjId(u),
                    cycle: walk_back(ie),
                    exit: ElemId(g.edges[xe].2),
                },
            });
        }
    }
    // every reachable component is a single node or an exit-free cycle;
    // count paths from `a` to the terminal cycles
    let mut order: Vec<usize> = reached.clone();
    order.sort_by_key(|&u| core::cmp::Reverse(comp[u]));
    let mut paths: BTreeMap<usize, u64> = BTreeMap::new();
    for &u in &order {
        let on_cycle = g.out[u].iter().any(|&e| inside(e));
        let p = if on_cycle {
            1
        } else {
            g.out[u]
                .iter()
                .fold(0u64, |acc, &e| acc.saturating_add(paths[&g.edges[e].1]).min(FINITE_CAP))
        };
        paths.insert(u, p);
    }
    let count = paths[&a.0];
    let capped = count >= FINITE_CAP;
    let class = if count == 1 {
        SolutionClass::Singleton
    } else {
        SolutionClass::Finite(count)
    };
    Ok(Classification {
        object: a,
        class,
        witness: Witness::Paths { count, capped },
    })
}

/// Classifies every object.
pub fn classify_all(sys: &SystemDef) -> Result<Vec<Classification>> {
    sys.category().objects().map(|a| classify_discrete(sys, a)).collect()
}

fn walk_ok(sys: &SystemDef, start: ObjId, walk: &[ElemId]) -> Option<ObjId> {
    let chain = AddressChain {
        base: start,
        elements: walk.to_vec(),
    };
    if chain.is_valid(sys) {
        Some(chain.tip(sys))
    } else {
        None
    }
}

fn first_return(sys: &SystemDef, node: ObjId, walk: &[ElemId]) -> bool {
    if walk.is_empty() || walk_ok(sys, node, walk) != Some(node) {
        return false;
    }
    let chain = AddressChain {
        base: node,
        elements: walk.to_vec(),
    };
    let objs = chain.objects(sys);
    objs[1..objs.len() - 1].iter().all(|&o| o != node)
}

/// Re-checks a classification witness against the system.
pub fn verify_witness(sys: &SystemDef, c: &Classification) -> bool {
    let live = liveness(sys);
    let all_live = |start: ObjId, walk: &[ElemId]| {
        AddressChain {
            base: start,
            elements: walk.to_vec(),
        }
        .objects(sys)
        .iter()
        .all(|o| live[o.0])
    };
    match (&c.class, &c.witness) {
        (SolutionClass::Empty, Witness::Dead) => !live[c.object.0],
        (
            SolutionClass::Uncountable,
            Witness::TwoCycles {
                approach,
                node,
                first,
                second,
            },
        ) => {
            walk_ok(sys, c.object, approach) == Some(*node)
                && all_live(c.object, approach)
                && first_return(sys, *node, first)
                && first_return(sys, *node, second)
                && first != second
        }
        (
            SolutionClass::CountablyInfinite,
            Witness::CycleWithExit {
                approach,
                node,
                cycle,
                exit,
            },
        ) => {
            let module = sys.module();
            walk_ok(sys, c.object, approach) == Some(*node)
                && all_live(c.object, approach)
                && first_return(sys, *node, cycle)
                && module.dst(*exit) == *node
                && !cycle.contains(exit)
                && live[module.src(*exit).0]
        }
        (SolutionClass::Singleton, Witness::Paths { count: 1, .. }) => live[c.object.0],
        (SolutionClass::Finite(k), Witness::Paths { count, .. }) => *k == *count && *k >= 2,
        _ => false,
    }
}

/// Live-tip chains of length `depth` at every object, with the maps to
/// their length-`(depth − 1)` prefixes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TruncatedSolution {
    pub depth: usize,
    pub chains: Vec<Vec<AddressChain>>,
    /// `restriction[a][i]` is the index of the prefix of `chains[a][i]` in
    /// the depth-`(depth − 1)` list; empty when `depth == 0`.
    pub restriction: Vec<Vec<usize>>,
}

fn live_tip_chains(sys: &SystemDef, live: &[bool], a: ObjId, n: usize) -> Vec<AddressChain> {
    enumerate_chains(sys, a, n)
        .into_iter()
        .filter(|c| live[c.tip(sys).0])
        .collect()
}

/// Finite approximation of the universal solution of a discrete system.
pub fn truncated_solution(sys: &SystemDef, depth: usize) -> Result<TruncatedSolution> {
    if !sys.is_discrete() {
        return Err(Error::Unsupported("truncated solutions need a discrete category".into()));
    }
    let live = liveness(sys);
    let mut chains = Vec::new();
    let mut restriction = Vec::new();
    for a in sys.category().objects() {
        let here = live_tip_chains(sys, &live, a, depth);
        if depth > 0 {
            let prev = live_tip_chains(sys, &live, a, depth - 1);
            let pos: BTreeMap<&AddressChain, usize> = prev.iter().enumerate().map(|(i, c)| (c, i)).collect();
            restriction.push(here.iter().map(|c| pos[&c.truncate(depth - 1)]).collect());
        } else {
            restriction.push(Vec::new());
        }
        chains.push(here);
    }
    Ok(TruncatedSolution {
        depth,
        chains,
        restriction,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::module::ModuleBuilder;

    fn discrete(objs: &[&str], elems: &[(usize, usize)]) -> SystemDef {
        let cat = FiniteCategory::discrete(objs.iter().copied());
        let mut m = ModuleBuilder::new();
        for (i, &(b, a)) in elems.iter().enumerate() {
            m.element(format!("m{i}"), ObjId(b), ObjId(a));
        }
        SystemDef::new(cat.clone(), m.build(&cat).unwrap()).unwrap()
    }

    #[test]
    fn cantor_is_uncountable() {
        let sys = discrete(&["*"], &[(0, 0), (0, 0)]);
        let c = classify_discrete(&sys, ObjId(0)).unwrap();
        assert_eq!(c.class, SolutionClass::Uncountable);
        assert!(verify_witness(&sys, &c));
        assert_eq!(enumerate_chains(&sys, ObjId(0), 3).len(), 8);
    }

    #[test]
    fn alexandroff_example() {
        // A = A, B = A + B
        let sys = discrete(&["A", "B"], &[(0, 0), (0, 1), (1, 1)]);
        let a = classify_discrete(&sys, ObjId(0)).unwrap();
        let b = classify_discrete(&sys, ObjId(1)).unwrap();
        assert_eq!(a.class, SolutionClass::Singleton);
        assert_eq!(b.class, SolutionClass::CountablyInfinite);
        assert!(verify_witness(&sys, &a) && verify_witness(&sys, &b));
        for d in 0..8 {
            assert_eq!(truncated_solution(&sys, d).unwrap().chains[1].len(), d + 1);
        }
    }

    #[test]
    fn empty_module_is_dead() {
        let sys = discrete(&["*"], &[]);
        assert!(live_objects(&sys).is_empty());
        assert_eq!(classify_discrete(&sys, ObjId(0)).unwrap().class, SolutionClass::Empty);
        assert!(enumerate_chains(&sys, ObjId(0), 1).is_empty());
    }

    #[test]
    fn finite_count_over_a_fork() {
        // C = A + B, A = A, B = B
        let sys = discrete(&["A", "B", "C"], &[(0, 0), (1, 1), (0, 2), (1, 2)]);
        let c = classify_discrete(&sys, ObjId(2)).unwrap();
        assert_eq!(c.class, SolutionClass::Finite(2));
        assert!(verify_witness(&sys, &c));
    }

    #[test]
    fn chains_are_lexicographic() {
        let sys = discrete(&["*"], &[(0, 0), (0, 0)]);
        let cs = enumerate_chains(&sys, ObjId(0), 2);
        let ids: Vec<Vec<usize>> = cs.iter().map(|c| c.elements.iter().map(|m| m.0).collect()).collect();
        assert_eq!(ids, alloc::vec![alloc::vec![0, 0], alloc::vec![0, 1], alloc::vec![1, 0], alloc::vec![1, 1]]);
    }
}

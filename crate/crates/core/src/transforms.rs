//! Constructions producing new systems from old ones.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::address::{liveness, AddressChain};
use crate::category::{ArrowId, CategoryBuilder, FiniteCategory, ObjId};
use crate::module::{ElemId, ModuleBuilder, SystemDef};
use crate::{Error, Result};

fn tuple_name<'a>(parts: impl IntoIterator<Item = &'a str>) -> String {
    let v: Vec<&str> = parts.into_iter().collect();
    format!("({})", v.join(","))
}

/// Mixed-radix enumeration of index tuples, first coordinate most
/// significant.
fn tuples(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = alloc::vec![Vec::new()];
    for &n in sizes {
        let mut next = Vec::with_capacity(out.len() * n);
        for t in &out {
            for i in 0..n {
                let mut u = t.clone();
                u.push(i);
                next.push(u);
            }
        }
        out = next;
    }
    out
}

/// The product system: tuple objects, componentwise arrows, and
/// `(∏M)((bᵢ), (aᵢ)) = ∏ Mᵢ(bᵢ, aᵢ)` with componentwise actions.
///
/// The empty product is the unit system: one object `*`, one element `*`.
pub fn product_system(systems: &[SystemDef]) -> Result<SystemDef> {
    if systems.is_empty() {
        let cat = FiniteCategory::discrete(["*"]);
        let mut m = ModuleBuilder::new();
        m.element("*", ObjId(0), ObjId(0));
        let module = m.build(&cat)?;
        return SystemDef::new(cat, module);
    }
    let obj_tuples = tuples(&systems.iter().map(|s| s.object_count()).collect::<Vec<_>>());
    let arr_tuples = tuples(&systems.iter().map(|s| s.category().arrow_count()).collect::<Vec<_>>());
    let el_tuples = tuples(&systems.iter().map(|s| s.module().len()).collect::<Vec<_>>());

    let mut b = CategoryBuilder::new();
    let mut obj_index: BTreeMap<Vec<usize>, ObjId> = BTreeMap::new();
    for t in &obj_tuples {
        let name = tuple_name(t.iter().zip(systems).map(|(&i, s)| s.category().object_name(ObjId(i))));
        obj_index.insert(t.clone(), b.object(name));
    }
    let mut arr_index: BTreeMap<Vec<usize>, ArrowId> = BTreeMap::new();
    for t in &arr_tuples {
        let cats: Vec<&FiniteCategory> = systems.iter().map(|s| s.category()).collect();
        let src: Vec<usize> = t.iter().zip(&cats).map(|(&f, c)| c.src(ArrowId(f)).0).collect();
        let dst: Vec<usize> = t.iter().zip(&cats).map(|(&f, c)| c.dst(ArrowId(f)).0).collect();
        let all_id = t.iter().zip(&cats).all(|(&f, c)| c.is_identity(ArrowId(f)));
        let id = if all_id {
            b.identity(obj_index[&src])
        } else {
            let name = tuple_name(t.iter().zip(&cats).map(|(&f, c)| c.arrow(ArrowId(f)).name.as_str()));
            b.arrow(name, obj_index[&src], obj_index[&dst])
        };
        arr_index.insert(t.clone(), id);
    }
    for g in &arr_tuples {
        for f in &arr_tuples {
            let comp: Option<Vec<usize>> = g
                .iter()
                .zip(f)
                .zip(systems)
                .map(|((&gi, &fi), s)| s.category().compose(ArrowId(gi), ArrowId(fi)).map(|h| h.0))
                .collect();
            if let Some(h) = comp {
                b.compose(arr_index[g], arr_index[f], arr_index[&h]);
            }
        }
    }
    let cat = b.build_unchecked();

    let mut mb = ModuleBuilder::new();
    let mut el_index: BTreeMap<Vec<usize>, ElemId> = BTreeMap::new();
    for t in &el_tuples {
        let mods: Vec<_> = systems.iter().map(|s| s.module()).collect();
        let src: Vec<usize> = t.iter().zip(&mods).map(|(&m, md)| md.src(ElemId(m)).0).collect();
        let dst: Vec<usize> = t.iter().zip(&mods).map(|(&m, md)| md.dst(ElemId(m)).0).collect();
        let name = tuple_name(t.iter().zip(&mods).map(|(&m, md)| md.name(ElemId(m))));
        el_index.insert(t.clone(), mb.element(name, obj_index[&src], obj_index[&dst]));
    }
    for f in &arr_tuples {
        for m in &el_tuples {
            let act: Option<Vec<usize>> = f
                .iter()
                .zip(m)
                .zip(systems)
                .map(|((&fi, &mi), s)| s.module().lact(ArrowId(fi), ElemId(mi)).map(|e| e.0))
                .collect();
            if let Some(r) = act {
                mb.lact(arr_index[f], el_index[m], el_index[&r]);
            }
            let act: Option<Vec<usize>> = m
                .iter()
                .zip(f)
                .zip(systems)
                .map(|((&mi, &fi), s)| s.module().ract(ElemId(mi), ArrowId(fi)).map(|e| e.0))
                .collect();
            if let Some(r) = act {
                mb.ract(el_index[m], arr_index[f], el_index[&r]);
            }
        }
    }
    let module = mb.build_unchecked(&cat);
    SystemDef::new(cat, module)
}

/// Correspondence between a discrete system and its binarization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemMorphismLog {
    /// `k(a) = |Σ_b M(b, a)|` per original object.
    pub k: Vec<usize>,
    /// New object `(a, i)` for each original `a` and `0 ≤ i ≤ k(a)`.
    pub objects: Vec<Vec<ObjId>>,
    /// `a ↦ (a, k(a))`.
    pub object_map: Vec<ObjId>,
    /// The step element `(a, i − 1) ⇸ (a, i)` at `steps[a][i − 1]`.
    pub steps: Vec<Vec<ElemId>>,
    /// The cross element `(bᵢ, k(bᵢ)) ⇸ (a, i)` for original element `mᵢ`.
    pub cross: Vec<ElemId>,
    /// `(a, i)` of each original element: `mᵢ` is the `i`-th summand of `a`.
    pub summand: Vec<(ObjId, usize)>,
    /// Expansion of each original element into a binarized chain.
    pub expansion: Vec<Vec<ElemId>>,
    /// Original element of each cross element, by binarized element id.
    pub cross_inverse: BTreeMap<ElemId, ElemId>,
    pub notes: Vec<String>,
}

/// Replaces a discrete system by one in which every object has at most two
/// summands. Summands are taken in declaration order.
pub fn binarize(sys: &SystemDef) -> Result<(SystemDef, SystemMorphismLog)> {
    if !sys.is_discrete() {
        return Err(Error::Unsupported("binarization needs a discrete category".into()));
    }
    let cat = sys.category();
    let module = sys.module();
    let k: Vec<usize> = cat.objects().map(|a| module.elements_into(a).len()).collect();
    let mut total = 0;
    let mut objects = Vec::new();
    let mut names = Vec::new();
    for a in cat.objects() {
        let mut row = Vec::new();
        for i in 0..=k[a.0] {
            row.push(ObjId(total));
            names.push(format!("({},{})", cat.object_name(a), i));
            total += 1;
        }
        objects.push(row);
    }
    let new_cat = FiniteCategory::discrete(names);
    let mut mb = ModuleBuilder::new();
    let mut steps = Vec::new();
    let mut cross = alloc::vec![ElemId(0); module.len()];
    let mut summand = alloc::vec![(ObjId(0), 0); module.len()];
    let mut cross_inverse = BTreeMap::new();
    for a in cat.objects() {
        let mut row = Vec::new();
        for (idx, &m) in module.elements_into(a).iter().enumerate() {
            let i = idx + 1;
            let s = mb.element(
                format!("step({},{})", cat.object_name(a), i),
                objects[a.0][i - 1],
                objects[a.0][i],
            );
            row.push(s);
            let b = module.src(m);
            let c = mb.element(module.name(m), objects[b.0][k[b.0]], objects[a.0][i]);
            cross[m.0] = c;
            cross_inverse.insert(c, m);
            summand[m.0] = (a, i);
        }
        steps.push(row);
    }
    let new_module = mb.build(&new_cat)?;
    let expansion = module
        .ids()
        .map(|m| {
            let (a, i) = summand[m.0];
            let mut v: Vec<ElemId> = (i + 1..=k[a.0]).rev().map(|j| steps[a.0][j - 1]).collect();
            v.push(cross[m.0]);
            v
        })
        .collect();
    let object_map = cat.objects().map(|a| objects[a.0][k[a.0]]).collect();
    let log = SystemMorphismLog {
        k,
        objects,
        object_map,
        steps,
        cross,
        summand,
        expansion,
        cross_inverse,
        notes: alloc::vec![String::from("summands ordered by declaration")],
    };
    Ok((SystemDef::new(new_cat, new_module)?, log))
}

/// Expands every element of an original chain into its binarized run.
pub fn transcode_address(log: &SystemMorphismLog, chain: &AddressChain) -> AddressChain {
    AddressChain {
        base: log.object_map[chain.base.0],
        elements: chain
            .elements
            .iter()
            .flat_map(|m| log.expansion[m.0].iter().copied())
            .collect(),
    }
}

/// Contracts maximal runs back to original elements.
pub fn decode_address(log: &SystemMorphismLog, binarized: &SystemDef, chain: &AddressChain) -> Result<AddressChain> {
    let base = log
        .object_map
        .iter()
        .position(|&o| o == chain.base)
        .ok_or_else(|| Error::Decode("chain does not start at an object of the form (a, k(a))".into()))?;
    let mut out = AddressChain::empty(ObjId(base));
    let mut cur = ObjId(base);
    let mut steps_taken = 0usize;
    for (pos, &e) in chain.elements.iter().enumerate() {
        if let Some(&m) = log.cross_inverse.get(&e) {
            let (a, i) = log.summand[m.0];
            if a != cur || i + steps_taken != log.k[a.0] {
                return Err(Error::Decode(format!("element {pos} does not continue the run at `{}`", a.0)));
            }
            out.push(m);
            cur = binarized_source(log, binarized, e);
            steps_taken = 0;
        } else {
            let expected = log.k[cur.0]
                .checked_sub(steps_taken)
                .filter(|&j| j >= 1)
                .map(|j| log.steps[cur.0][j - 1]);
            if expected != Some(e) {
                return Err(Error::Decode(format!("element {pos} is not the expected step")));
            }
            steps_taken += 1;
        }
    }
    if steps_taken != 0 {
        return Err(Error::Decode("chain ends inside a run".into()));
    }
    Ok(out)
}

fn binarized_source(log: &SystemMorphismLog, binarized: &SystemDef, e: ElemId) -> ObjId {
    let s = binarized.module().src(e);
    let a = log
        .objects
        .iter()
        .position(|row| row.contains(&s))
        .expect("binarized object");
    ObjId(a)
}

/// Full subcategory on the live objects, with the correspondence to the
/// original object ids.
pub fn prune_empty(sys: &SystemDef) -> (SystemDef, Vec<ObjId>) {
    let live = liveness(sys);
    let keep: Vec<ObjId> = sys.category().objects().filter(|a| live[a.0]).collect();
    (sys.restrict(&keep), keep)
}

/// Full subcategory on the objects with a finite chain into `a`, closed
/// under arrows into its objects.
pub fn reachable_subsystem(sys: &SystemDef, a: ObjId) -> (SystemDef, Vec<ObjId>) {
    let cat = sys.category();
    let module = sys.module();
    let mut set: BTreeSet<ObjId> = BTreeSet::new();
    set.insert(a);
    let mut stack = alloc::vec![a];
    while let Some(b) = stack.pop() {
        let from_elements = module.elements_into(b).iter().map(|&m| module.src(m));
        let from_arrows = cat.arrows_into(b).iter().map(|&f| cat.src(f));
        for c in from_elements.chain(from_arrows).collect::<Vec<_>>() {
            if set.insert(c) {
                stack.push(c);
            }
        }
    }
    let keep: Vec<ObjId> = set.into_iter().collect();
    (sys.restrict(&keep), keep)
}

//! The coend `M ⊗ X` over finite carriers.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::category::{FinSetFunctor, ObjId};
use crate::module::{ElemId, SystemDef};
use crate::unionfind::UnionFind;
use crate::{Error, Result};

/// One element of `(M ⊗ X)(a)`: an equivalence class of pairs `(m, x)` with
/// `m: b ⇸ a` and `x ∈ X(b)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoendClass {
    /// Least member in `(ElemId, x)` order.
    pub representative: (ElemId, usize),
    /// All members, sorted.
    pub members: Vec<(ElemId, usize)>,
}

/// `M ⊗ X` as a functor, with the classes behind each carrier element and
/// the injections `m ⊗ −`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    functor: FinSetFunctor,
    classes: Vec<Vec<CoendClass>>,
    class_of: BTreeMap<(ElemId, usize), usize>,
}

impl Tensor {
    pub fn functor(&self) -> &FinSetFunctor {
        &self.functor
    }

    pub fn into_functor(self) -> FinSetFunctor {
        self.functor
    }

    pub fn size(&self, a: ObjId) -> usize {
        self.functor.size(a)
    }

    pub fn classes(&self, a: ObjId) -> &[CoendClass] {
        &self.classes[a.0]
    }

    pub fn all_classes(&self) -> &[Vec<CoendClass>] {
        &self.classes
    }

    /// `(m ⊗ −)(x)`: the index of the class of `(m, x)` in `(M⊗X)(a)`.
    pub fn inject(&self, m: ElemId, x: usize) -> usize {
        self.class_of[&(m, x)]
    }

    pub fn try_inject(&self, m: ElemId, x: usize) -> Option<usize> {
        self.class_of.get(&(m, x)).copied()
    }
}

/// Computes `M ⊗ X` by union-find over the relations `(m·g, x) ~ (m, g·x)`.
///
/// Classes at each object are listed in order of their representatives,
/// and labelled `m⊗x` from the representative.
pub fn tensor(sys: &SystemDef, x: &FinSetFunctor) -> Result<Tensor> {
    let cat = sys.category();
    let module = sys.module();
    x.validate(cat)
        .map_err(|v| Error::InvalidFunctor(alloc::string::ToString::to_string(&v)))?;
    let mut classes = Vec::with_capacity(cat.object_count());
    let mut class_of = BTreeMap::new();
    let mut carriers = Vec::with_capacity(cat.object_count());
    for a in cat.objects() {
        // pairs (m, x) in (ElemId, x) order
        let mut pairs: Vec<(ElemId, usize)> = Vec::new();
        let mut index = BTreeMap::new();
        let mut elems: Vec<ElemId> = module.elements_into(a).to_vec();
        elems.sort();
        for &m in &elems {
            for xi in 0..x.size(module.src(m)) {
                index.insert((m, xi), pairs.len());
                pairs.push((m, xi));
            }
        }
        let mut uf = UnionFind::new(pairs.len());
        for &m in &elems {
            let b = module.src(m);
            for &g in cat.arrows_into(b) {
                let mg = module.right(m, g);
                for xi in 0..x.size(cat.src(g)) {
                    let l = index[&(mg, xi)];
                    let r = index[&(m, x.apply(g, xi))];
                    uf.union(l, r);
                }
            }
        }
        // pairs are sorted, so the first member seen is the least
        let mut root_class: BTreeMap<usize, usize> = BTreeMap::new();
        let mut here: Vec<CoendClass> = Vec::new();
        for (i, &p) in pairs.iter().enumerate() {
            let r = uf.find(i);
            let c = *root_class.entry(r).or_insert_with(|| {
                here.push(CoendClass {
                    representative: p,
                    members: Vec::new(),
                });
                here.len() - 1
            });
            here[c].members.push(p);
            class_of.insert(p, c);
        }
        let labels: Vec<String> = here
            .iter()
            .map(|c| {
                let (m, xi) = c.representative;
                format!("{}⊗{}", module.name(m), x.label(module.src(m), xi))
            })
            .collect();
        carriers.push(labels);
        classes.push(here);
    }
    let action = cat
        .arrow_ids()
        .map(|f| {
            classes[cat.src(f).0]
                .iter()
                .map(|c| {
                    let (m, xi) = c.representative;
                    class_of[&(module.left(f, m), xi)]
                })
                .collect()
        })
        .collect();
    Ok(Tensor {
        functor: FinSetFunctor::new(carriers, action),
        classes,
        class_of,
    })
}

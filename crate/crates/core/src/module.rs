//! Finite modules (profunctors) `M: 𝒜 ⇸ 𝒜` and self-similarity systems.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::category::{ArrowId, CategoryBuilder, CategoryReport, FinSetFunctor, FiniteCategory, ObjId};
use crate::limits::{LimitCatalog, PreservationReport};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ElemId(pub usize);

/// A module element `m: b ⇸ a`; `src` is `b` and `dst` is `a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub name: String,
    pub src: ObjId,
    pub dst: ObjId,
}

/// A finite module with left action `f·m` and right action `m·g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Module {
    elements: Vec<Element>,
    left: BTreeMap<(ArrowId, ElemId), ElemId>,
    right: BTreeMap<(ElemId, ArrowId), ElemId>,
    into: Vec<Vec<ElemId>>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ModuleViolation {
    DuplicateName(String),
    BadEndpoint(ElemId),
    LeftUndefined { f: ArrowId, m: ElemId },
    RightUndefined { m: ElemId, g: ArrowId },
    LeftMismatch { f: ArrowId, m: ElemId },
    RightMismatch { m: ElemId, g: ArrowId },
    LeftUnit(ElemId),
    RightUnit(ElemId),
    LeftAssociativity { f2: ArrowId, f: ArrowId, m: ElemId },
    RightAssociativity { m: ElemId, g: ArrowId, g2: ArrowId },
    Compatibility { f: ArrowId, m: ElemId, g: ArrowId },
}

impl ModuleViolation {
    pub fn describe(&self, cat: &FiniteCategory, module: &Module) -> String {
        let a = |f: &ArrowId| cat.arrows().get(f.0).map(|x| x.name.as_str()).unwrap_or("?");
        let e = |m: &ElemId| module.elements.get(m.0).map(|x| x.name.as_str()).unwrap_or("?");
        use ModuleViolation::*;
        match self {
            DuplicateName(s) => format!("duplicate module element name `{s}`"),
            BadEndpoint(m) => format!("element `{}` has an unknown endpoint", e(m)),
            LeftUndefined { f, m } => format!("left action {}·{} is undefined", a(f), e(m)),
            RightUndefined { m, g } => format!("right action {}·{} is undefined", e(m), a(g)),
            LeftMismatch { f, m } => format!("left action {}·{} has the wrong endpoints", a(f), e(m)),
            RightMismatch { m, g } => format!("right action {}·{} has the wrong endpoints", e(m), a(g)),
            LeftUnit(m) => format!("id·{} ≠ {}", e(m), e(m)),
            RightUnit(m) => format!("{}·id ≠ {}", e(m), e(m)),
            LeftAssociativity { f2, f, m } => {
                format!("({}∘{})·{} ≠ {}·({}·{})", a(f2), a(f), e(m), a(f2), a(f), e(m))
            }
            RightAssociativity { m, g, g2 } => {
                format!("{}·({}∘{}) ≠ ({}·{})·{}", e(m), a(g), a(g2), e(m), a(g), a(g2))
            }
            Compatibility { f, m, g } => {
                format!("({}·{})·{} ≠ {}·({}·{})", a(f), e(m), a(g), a(f), e(m), a(g))
            }
        }
    }
}

/// Incremental construction of a [`Module`]; identity actions are implicit.
#[derive(Clone, Debug, Default)]
pub struct ModuleBuilder {
    elements: Vec<Element>,
    left: BTreeMap<(ArrowId, ElemId), ElemId>,
    right: BTreeMap<(ElemId, ArrowId), ElemId>,
}

impl ModuleBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Declares `name: src ⇸ dst`.
    pub fn element(&mut self, name: impl Into<String>, src: ObjId, dst: ObjId) -> ElemId {
        self.elements.push(Element {
            name: name.into(),
            src,
            dst,
        });
        ElemId(self.elements.len() - 1)
    }

    /// Records `f·m = m2`.
    pub fn lact(&mut self, f: ArrowId, m: ElemId, m2: ElemId) -> &mut Self {
        self.left.insert((f, m), m2);
        self
    }

    /// Records `m·g = m2`.
    pub fn ract(&mut self, m: ElemId, g: ArrowId, m2: ElemId) -> &mut Self {
        self.right.insert((m, g), m2);
        self
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn build_unchecked(mut self, cat: &FiniteCategory) -> Module {
        for (i, el) in self.elements.iter().enumerate() {
            let m = ElemId(i);
            if el.dst.0 < cat.object_count() {
                self.left.entry((cat.identity(el.dst), m)).or_insert(m);
            }
            if el.src.0 < cat.object_count() {
                self.right.entry((m, cat.identity(el.src))).or_insert(m);
            }
        }
        Module::from_parts(cat.object_count(), self.elements, self.left, self.right)
    }

    pub fn build(self, cat: &FiniteCategory) -> Result<Module> {
        let m = self.build_unchecked(cat);
        match m.validate(cat) {
            None => Ok(m),
            Some(v) => Err(Error::InvalidModule(v.describe(cat, &m))),
        }
    }
}

impl Module {
    pub fn from_parts(
        object_count: usize,
        elements: Vec<Element>,
        left: BTreeMap<(ArrowId, ElemId), ElemId>,
        right: BTreeMap<(ElemId, ArrowId), ElemId>,
    ) -> Self {
        let mut into = alloc::vec![Vec::new(); object_count];
        for (i, e) in elements.iter().enumerate() {
            if e.dst.0 < object_count {
                into[e.dst.0].push(ElemId(i));
            }
        }
        Module {
            elements,
            left,
            right,
            into,
        }
    }

    /// The empty module.
    pub fn empty(cat: &FiniteCategory) -> Self {
        Module::from_parts(cat.object_count(), Vec::new(), BTreeMap::new(), BTreeMap::new())
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = ElemId> + '_ {
        (0..self.elements.len()).map(ElemId)
    }

    pub fn element(&self, m: ElemId) -> &Element {
        &self.elements[m.0]
    }

    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    pub fn name(&self, m: ElemId) -> &str {
        &self.elements[m.0].name
    }

    pub fn src(&self, m: ElemId) -> ObjId {
        self.elements[m.0].src
    }

    pub fn dst(&self, m: ElemId) -> ObjId {
        self.elements[m.0].dst
    }

    pub fn find(&self, name: &str) -> Option<ElemId> {
        self.elements.iter().position(|e| e.name == name).map(ElemId)
    }

    /// `Σ_b M(b, a)` in declaration order.
    pub fn elements_into(&self, a: ObjId) -> &[ElemId] {
        &self.into[a.0]
    }

    /// `M(b, a)` in declaration order.
    pub fn elements_between(&self, b: ObjId, a: ObjId) -> Vec<ElemId> {
        self.into[a.0].iter().copied().filter(|&m| self.src(m) == b).collect()
    }

    pub fn lact(&self, f: ArrowId, m: ElemId) -> Option<ElemId> {
        self.left.get(&(f, m)).copied()
    }

    pub fn ract(&self, m: ElemId, g: ArrowId) -> Option<ElemId> {
        self.right.get(&(m, g)).copied()
    }

    /// `f·m`, panicking when undefined.
    pub fn left(&self, f: ArrowId, m: ElemId) -> ElemId {
        self.lact(f, m).expect("left action undefined")
    }

    /// `m·g`, panicking when undefined.
    pub fn right(&self, m: ElemId, g: ArrowId) -> ElemId {
        self.ract(m, g).expect("right action undefined")
    }

    pub fn left_table(&self) -> &BTreeMap<(ArrowId, ElemId), ElemId> {
        &self.left
    }

    pub fn right_table(&self) -> &BTreeMap<(ElemId, ArrowId), ElemId> {
        &self.right
    }

    /// Checks totality, endpoints, unit, associativity and compatibility
    /// laws; returns the first violation.
    pub fn validate(&self, cat: &FiniteCategory) -> Option<ModuleViolation> {
        use ModuleViolation::*;
        let n = cat.object_count();
        let mut names = BTreeSet::new();
        for e in &self.elements {
            if !names.insert(e.name.as_str()) {
                return Some(DuplicateName(e.name.clone()));
            }
        }
        for m in self.ids() {
            if self.src(m).0 >= n || self.dst(m).0 >= n {
                return Some(BadEndpoint(m));
            }
        }
        for m in self.ids() {
            let (b, a) = (self.src(m), self.dst(m));
            for &f in cat.arrows_out_of(a) {
                match self.lact(f, m) {
                    None => return Some(LeftUndefined { f, m }),
                    Some(m2) if m2.0 >= self.len() || self.src(m2) != b || self.dst(m2) != cat.dst(f) => {
                        return Some(LeftMismatch { f, m })
                    }
                    _ => {}
                }
            }
            for &g in cat.arrows_into(b) {
                match self.ract(m, g) {
                    None => return Some(RightUndefined { m, g }),
                    Some(m2) if m2.0 >= self.len() || self.src(m2) != cat.src(g) || self.dst(m2) != a => {
                        return Some(RightMismatch { m, g })
                    }
                    _ => {}
                }
            }
        }
        for (&(f, m), _) in &self.left {
            if f.0 >= cat.arrow_count() || m.0 >= self.len() || cat.src(f) != self.dst(m) {
                return Some(LeftMismatch { f, m });
            }
        }
        for (&(m, g), _) in &self.right {
            if g.0 >= cat.arrow_count() || m.0 >= self.len() || cat.dst(g) != self.src(m) {
                return Some(RightMismatch { m, g });
            }
        }
        for m in self.ids() {
            if self.left(cat.identity(self.dst(m)), m) != m {
                return Some(LeftUnit(m));
            }
            if self.right(m, cat.identity(self.src(m))) != m {
                return Some(RightUnit(m));
            }
        }
        for m in self.ids() {
            for &f in cat.arrows_out_of(self.dst(m)) {
                let fm = self.left(f, m);
                for &f2 in cat.arrows_out_of(cat.dst(f)) {
                    if self.left(cat.comp(f2, f), m) != self.left(f2, fm) {
                        return Some(LeftAssociativity { f2, f, m });
                    }
                }
            }
            for &g in cat.arrows_into(self.src(m)) {
                let mg = self.right(m, g);
                for &g2 in cat.arrows_into(cat.src(g)) {
                    if self.right(m, cat.comp(g, g2)) != self.right(mg, g2) {
                        return Some(RightAssociativity { m, g, g2 });
                    }
                }
                for &f in cat.arrows_out_of(self.dst(m)) {
                    if self.right(self.left(f, m), g) != self.left(f, mg) {
                        return Some(Compatibility { f, m, g });
                    }
                }
            }
        }
        None
    }

    /// The representable `M(b, −)` as a covariant functor, with element
    /// names as labels.
    pub fn representable(&self, cat: &FiniteCategory, b: ObjId) -> FinSetFunctor {
        let carriers: Vec<Vec<ElemId>> = cat.objects().map(|a| self.elements_between(b, a)).collect();
        let pos: BTreeMap<ElemId, usize> = carriers
            .iter()
            .flat_map(|c| c.iter().enumerate().map(|(i, &m)| (m, i)))
            .collect();
        let action = cat
            .arrow_ids()
            .map(|f| carriers[cat.src(f).0].iter().map(|&m| pos[&self.left(f, m)]).collect())
            .collect();
        let labels = carriers
            .iter()
            .map(|c| c.iter().map(|&m| self.name(m).into()).collect())
            .collect();
        FinSetFunctor::new(labels, action)
    }
}

/// Limit preservation of every representable `M(b, −)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NondegeneracyReport {
    pub per_object: Vec<(ObjId, PreservationReport)>,
}

impl NondegeneracyReport {
    pub fn is_nondegenerate(&self) -> bool {
        self.per_object.iter().all(|(_, r)| r.preserves_all())
    }
}

/// A finite category with a finite module on it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemDef {
    category: FiniteCategory,
    module: Module,
}

impl SystemDef {
    /// Validates both the category and the module.
    pub fn new(category: FiniteCategory, module: Module) -> Result<Self> {
        if let CategoryReport::Violation(v) = category.validate() {
            return Err(Error::InvalidCategory(v.describe(&category)));
        }
        if let Some(v) = module.validate(&category) {
            return Err(Error::InvalidModule(v.describe(&category, &module)));
        }
        Ok(SystemDef { category, module })
    }

    pub fn category(&self) -> &FiniteCategory {
        &self.category
    }

    pub fn module(&self) -> &Module {
        &self.module
    }

    pub fn object_count(&self) -> usize {
        self.category.object_count()
    }

    /// Runs the exhaustive limit search and checks every representable
    /// `M(b, −)` against it. Cost grows quickly with the arrow count, so
    /// this is computed on request rather than at construction.
    pub fn nondegeneracy(&self) -> NondegeneracyReport {
        let catalog = LimitCatalog::compute(&self.category);
        let per_object = self
            .category
            .objects()
            .map(|b| (b, catalog.check(&self.category, &self.module.representable(&self.category, b))))
            .collect();
        NondegeneracyReport { per_object }
    }

    /// Full subcategory on `keep` (listed in any order) with the module
    /// restricted to elements between kept objects. Objects keep their
    /// relative order.
    pub fn restrict(&self, keep: &[ObjId]) -> SystemDef {
        let cat = &self.category;
        let keep: BTreeSet<ObjId> = keep.iter().copied().collect();
        let mut b = CategoryBuilder::new();
        let mut obj_map = BTreeMap::new();
        for a in cat.objects().filter(|a| keep.contains(a)) {
            obj_map.insert(a, b.object(cat.object_name(a)));
        }
        let mut arr_map = BTreeMap::new();
        for f in cat.arrow_ids() {
            let (s, t) = (cat.src(f), cat.dst(f));
            if let (Some(&s2), Some(&t2)) = (obj_map.get(&s), obj_map.get(&t)) {
                let id = if cat.is_identity(f) {
                    b.identity(s2)
                } else {
                    b.arrow(cat.arrow(f).name.clone(), s2, t2)
                };
                arr_map.insert(f, id);
            }
        }
        for (&(g, f), &h) in cat.composition_table() {
            if let (Some(&g2), Some(&f2), Some(&h2)) = (arr_map.get(&g), arr_map.get(&f), arr_map.get(&h)) {
                b.compose(g2, f2, h2);
            }
        }
        let category = b.build_unchecked();
        let mut mb = ModuleBuilder::new();
        let mut el_map = BTreeMap::new();
        for m in self.module.ids() {
            let (s, t) = (self.module.src(m), self.module.dst(m));
            if let (Some(&s2), Some(&t2)) = (obj_map.get(&s), obj_map.get(&t)) {
                el_map.insert(m, mb.element(self.module.name(m), s2, t2));
            }
        }
        for (&(f, m), &m2) in &self.module.left {
            if let (Some(&f2), Some(&n), Some(&n2)) = (arr_map.get(&f), el_map.get(&m), el_map.get(&m2)) {
                mb.lact(f2, n, n2);
            }
        }
        for (&(m, g), &m2) in &self.module.right {
            if let (Some(&g2), Some(&n), Some(&n2)) = (arr_map.get(&g), el_map.get(&m), el_map.get(&m2)) {
                mb.ract(n, g2, n2);
            }
        }
        let module = mb.build_unchecked(&category);
        SystemDef { category, module }
    }

    /// Same objects and module elements over the discrete category; every
    /// non-identity action is dropped.
    pub fn discrete_skeleton(&self) -> SystemDef {
        let category = FiniteCategory::discrete(self.category.object_names().iter().cloned());
        let mut mb = ModuleBuilder::new();
        for e in self.module.elements() {
            mb.element(e.name.clone(), e.src, e.dst);
        }
        let module = mb.build_unchecked(&category);
        SystemDef { category, module }
    }

    pub fn find_object(&self, name: &str) -> Result<ObjId> {
        self.category
            .find_object(name)
            .ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn find_element(&self, name: &str) -> Result<ElemId> {
        self.module.find(name).ok_or_else(|| Error::UnknownName(name.into()))
    }

    pub fn is_discrete(&self) -> bool {
        self.category.is_discrete()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Freyd system: 0 ⇉ 1, M(0,0) = {e}, M(0,1) = {c0, ch, c1}, M(1,1) = {L, R}.
    pub(crate) fn freyd() -> SystemDef {
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        let s = b.arrow("sigma", o0, o1);
        let t = b.arrow("tau", o0, o1);
        let cat = b.build().unwrap();
        let mut m = ModuleBuilder::new();
        let e = m.element("e", o0, o0);
        let c0 = m.element("c0", o0, o1);
        let ch = m.element("ch", o0, o1);
        let c1 = m.element("c1", o0, o1);
        let l = m.element("L", o1, o1);
        let r = m.element("R", o1, o1);
        m.lact(s, e, c0).lact(t, e, c1);
        m.ract(l, s, c0).ract(l, t, ch).ract(r, s, ch).ract(r, t, c1);
        let module = m.build(&cat).unwrap();
        SystemDef::new(cat, module).unwrap()
    }

    #[test]
    fn freyd_module_is_valid_and_nondegenerate() {
        let sys = freyd();
        assert_eq!(sys.module().elements_into(ObjId(1)).len(), 5);
        assert!(sys.nondegeneracy().is_nondegenerate());
    }

    #[test]
    fn missing_right_action_is_reported() {
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        b.arrow("sigma", o0, o1);
        let cat = b.build().unwrap();
        let mut m = ModuleBuilder::new();
        m.element("L", o1, o1);
        let module = m.build_unchecked(&cat);
        assert!(matches!(module.validate(&cat), Some(ModuleViolation::RightUndefined { .. })));
    }

    #[test]
    fn restrict_keeps_only_internal_elements() {
        let sys = freyd();
        let sub = sys.restrict(&[ObjId(1)]);
        assert_eq!(sub.object_count(), 1);
        assert_eq!(sub.module().len(), 2);
        assert!(SystemDef::new(sub.category().clone(), sub.module().clone()).is_ok());
    }
}

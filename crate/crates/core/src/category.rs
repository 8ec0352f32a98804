//! Finite categories given by full arrow lists and total composition
//! tables, and finite-set-valued functors on them.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ArrowId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: ObjId,
    pub dst: ObjId,
}

/// A finite category.
///
/// `compose(g, f)` is `g ∘ f` (first `f`, then `g`). Identities are arrows
/// like any other and appear in the composition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrowId>,
    compose: BTreeMap<(ArrowId, ArrowId), ArrowId>,
    hom: BTreeMap<(ObjId, ObjId), Vec<ArrowId>>,
    into: Vec<Vec<ArrowId>>,
    out_of: Vec<Vec<ArrowId>>,
}

/// Incremental construction of a [`FiniteCategory`].
///
/// Every object gets an identity arrow named `id[<object>]`; composites with
/// identities are filled in automatically.
#[derive(Clone, Debug, Default)]
pub struct CategoryBuilder {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identities: Vec<ArrowId>,
    compose: BTreeMap<(ArrowId, ArrowId), ArrowId>,
}

impl CategoryBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn object(&mut self, name: impl Into<String>) -> ObjId {
        let name = name.into();
        let id = ObjId(self.objects.len());
        let ident = ArrowId(self.arrows.len());
        self.arrows.push(Arrow {
            name: format!("id[{name}]"),
            src: id,
            dst: id,
        });
        self.objects.push(name);
        self.identities.push(ident);
        id
    }

    pub fn arrow(&mut self, name: impl Into<String>, src: ObjId, dst: ObjId) -> ArrowId {
        let id = ArrowId(self.arrows.len());
        self.arrows.push(Arrow {
            name: name.into(),
            src,
            dst,
        });
        id
    }

    /// Records `g ∘ f = h`.
    pub fn compose(&mut self, g: ArrowId, f: ArrowId, h: ArrowId) -> &mut Self {
        self.compose.insert((g, f), h);
        self
    }

    pub fn identity(&self, a: ObjId) -> ArrowId {
        self.identities[a.0]
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_endpoints(&self, f: ArrowId) -> (ObjId, ObjId) {
        let a = &self.arrows[f.0];
        (a.src, a.dst)
    }

    /// Builds without checking the category laws.
    pub fn build_unchecked(mut self) -> FiniteCategory {
        for (i, a) in self.arrows.iter().enumerate() {
            let f = ArrowId(i);
            if a.src.0 < self.identities.len() {
                self.compose.entry((f, self.identities[a.src.0])).or_insert(f);
            }
            if a.dst.0 < self.identities.len() {
                self.compose.entry((self.identities[a.dst.0], f)).or_insert(f);
            }
        }
        FiniteCategory::from_parts(self.objects, self.arrows, self.identities, self.compose)
    }

    /// Builds and checks every category law.
    pub fn build(self) -> Result<FiniteCategory> {
        let cat = self.build_unchecked();
        match cat.validate() {
            CategoryReport::Valid => Ok(cat),
            CategoryReport::Violation(v) => Err(Error::InvalidCategory(v.describe(&cat))),
        }
    }
}

/// First failed category law, with the witnessing arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LawViolation {
    DuplicateObjectName(String),
    DuplicateArrowName(String),
    BadEndpoint { arrow: ArrowId },
    IdentityEndpoints { object: ObjId },
    MissingComposite { g: ArrowId, f: ArrowId },
    CompositeOfNonComposable { g: ArrowId, f: ArrowId },
    WrongCompositeEndpoints { g: ArrowId, f: ArrowId, h: ArrowId },
    LeftIdentity { f: ArrowId },
    RightIdentity { f: ArrowId },
    Associativity { h: ArrowId, g: ArrowId, f: ArrowId },
}

impl LawViolation {
    pub fn describe(&self, cat: &FiniteCategory) -> String {
        let n = |f: &ArrowId| cat.arrows.get(f.0).map(|a| a.name.as_str()).unwrap_or("?");
        match self {
            LawViolation::DuplicateObjectName(s) => format!("duplicate object name `{s}`"),
            LawViolation::DuplicateArrowName(s) => format!("duplicate arrow name `{s}`"),
            LawViolation::BadEndpoint { arrow } => format!("arrow `{}` has an unknown endpoint", n(arrow)),
            LawViolation::IdentityEndpoints { object } => {
                format!("identity of `{}` is not an endomorphism of it", cat.object_name(*object))
            }
            LawViolation::MissingComposite { g, f } => format!("composite {} ∘ {} is missing", n(g), n(f)),
            LawViolation::CompositeOfNonComposable { g, f } => {
                format!("composite {} ∘ {} given but the arrows are not composable", n(g), n(f))
            }
            LawViolation::WrongCompositeEndpoints { g, f, h } => {
                format!("{} ∘ {} = {} has the wrong endpoints", n(g), n(f), n(h))
            }
            LawViolation::LeftIdentity { f } => format!("id ∘ {} ≠ {}", n(f), n(f)),
            LawViolation::RightIdentity { f } => format!("{} ∘ id ≠ {}", n(f), n(f)),
            LawViolation::Associativity { h, g, f } => {
                format!("({} ∘ {}) ∘ {} ≠ {} ∘ ({} ∘ {})", n(h), n(g), n(f), n(h), n(g), n(f))
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CategoryReport {
    Valid,
    Violation(LawViolation),
}

impl CategoryReport {
    pub fn is_valid(&self) -> bool {
        matches!(self, CategoryReport::Valid)
    }
}

impl FiniteCategory {
    pub fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identities: Vec<ArrowId>,
        compose: BTreeMap<(ArrowId, ArrowId), ArrowId>,
    ) -> Self {
        let n = objects.len();
        let mut hom: BTreeMap<(ObjId, ObjId), Vec<ArrowId>> = BTreeMap::new();
        let mut into = alloc::vec![Vec::new(); n];
        let mut out_of = alloc::vec![Vec::new(); n];
        for (i, a) in arrows.iter().enumerate() {
            hom.entry((a.src, a.dst)).or_default().push(ArrowId(i));
            if a.dst.0 < n {
                into[a.dst.0].push(ArrowId(i));
            }
            if a.src.0 < n {
                out_of[a.src.0].push(ArrowId(i));
            }
        }
        FiniteCategory {
            objects,
            arrows,
            identities,
            compose,
            hom,
            into,
            out_of,
        }
    }

    /// The discrete category on the given objects.
    pub fn discrete<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Self {
        let mut b = CategoryBuilder::new();
        for n in names {
            b.object(n);
        }
        b.build_unchecked()
    }

    /// The category of a finite preorder that is antisymmetric (a poset).
    /// `leq(i, j)` must be reflexive and transitive; arrows are named `i<=j`.
    pub fn poset<S: Into<String> + Clone>(names: &[S], leq: impl Fn(usize, usize) -> bool) -> Self {
        let mut b = CategoryBuilder::new();
        let objs: Vec<ObjId> = names.iter().cloned().map(|n| b.object(n)).collect();
        let names: Vec<String> = names.iter().cloned().map(Into::into).collect();
        let k = objs.len();
        let mut arrow = BTreeMap::new();
        for i in 0..k {
            arrow.insert((i, i), b.identity(objs[i]));
            for j in 0..k {
                if i != j && leq(i, j) {
                    let f = b.arrow(format!("{}<={}", names[i], names[j]), objs[i], objs[j]);
                    arrow.insert((i, j), f);
                }
            }
        }
        for (&(i, j), &f) in &arrow {
            for (&(j2, l), &g) in arrow.range((j, 0)..(j + 1, 0)) {
                debug_assert_eq!(j2, j);
                let h = arrow[&(i, l)];
                b.compose(g, f, h);
            }
        }
        b.build_unchecked()
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn arrow_count(&self) -> usize {
        self.arrows.len()
    }

    pub fn objects(&self) -> impl Iterator<Item = ObjId> + '_ {
        (0..self.objects.len()).map(ObjId)
    }

    pub fn arrow_ids(&self) -> impl Iterator<Item = ArrowId> + '_ {
        (0..self.arrows.len()).map(ArrowId)
    }

    pub fn object_name(&self, a: ObjId) -> &str {
        &self.objects[a.0]
    }

    pub fn object_names(&self) -> &[String] {
        &self.objects
    }

    pub fn arrow(&self, f: ArrowId) -> &Arrow {
        &self.arrows[f.0]
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn src(&self, f: ArrowId) -> ObjId {
        self.arrows[f.0].src
    }

    pub fn dst(&self, f: ArrowId) -> ObjId {
        self.arrows[f.0].dst
    }

    pub fn identity(&self, a: ObjId) -> ArrowId {
        self.identities[a.0]
    }

    pub fn is_identity(&self, f: ArrowId) -> bool {
        let a = self.arrows[f.0].src;
        self.identities.get(a.0) == Some(&f)
    }

    pub fn compose(&self, g: ArrowId, f: ArrowId) -> Option<ArrowId> {
        self.compose.get(&(g, f)).copied()
    }

    /// `g ∘ f`, panicking if the pair is not composable.
    pub fn comp(&self, g: ArrowId, f: ArrowId) -> ArrowId {
        self.compose(g, f)
            .unwrap_or_else(|| panic!("{} ∘ {} undefined", self.arrows[g.0].name, self.arrows[f.0].name))
    }

    pub fn composition_table(&self) -> &BTreeMap<(ArrowId, ArrowId), ArrowId> {
        &self.compose
    }

    pub fn hom(&self, a: ObjId, b: ObjId) -> &[ArrowId] {
        self.hom.get(&(a, b)).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn arrows_into(&self, b: ObjId) -> &[ArrowId] {
        &self.into[b.0]
    }

    pub fn arrows_out_of(&self, a: ObjId) -> &[ArrowId] {
        &self.out_of[a.0]
    }

    pub fn is_discrete(&self) -> bool {
        self.arrow_ids().all(|f| self.is_identity(f))
    }

    pub fn find_object(&self, name: &str) -> Option<ObjId> {
        self.objects.iter().position(|o| o == name).map(ObjId)
    }

    pub fn find_arrow(&self, name: &str) -> Option<ArrowId> {
        self.arrows.iter().position(|a| a.name == name).map(ArrowId)
    }

    /// Checks the category laws; returns the first violation found.
    ///
    /// Laws are checked in a fixed order: names, endpoints, identities,
    /// totality/endpoints of composition, unit laws, associativity.
    pub fn validate(&self) -> CategoryReport {
        use LawViolation::*;
        let viol = CategoryReport::Violation;
        let n = self.objects.len();
        let mut seen = alloc::collections::BTreeSet::new();
        for o in &self.objects {
            if !seen.insert(o.as_str()) {
                return viol(DuplicateObjectName(o.clone()));
            }
        }
        let mut seen = alloc::collections::BTreeSet::new();
        for a in &self.arrows {
            if !seen.insert(a.name.as_str()) {
                return viol(DuplicateArrowName(a.name.clone()));
            }
        }
        for (i, a) in self.arrows.iter().enumerate() {
            if a.src.0 >= n || a.dst.0 >= n {
                return viol(BadEndpoint { arrow: ArrowId(i) });
            }
        }
        if self.identities.len() != n {
            return viol(IdentityEndpoints { object: ObjId(self.identities.len().min(n)) });
        }
        for (i, &e) in self.identities.iter().enumerate() {
            let a = match self.arrows.get(e.0) {
                Some(a) => a,
                None => return viol(IdentityEndpoints { object: ObjId(i) }),
            };
            if a.src != ObjId(i) || a.dst != ObjId(i) {
                return viol(IdentityEndpoints { object: ObjId(i) });
            }
        }
        for (&(g, f), &h) in &self.compose {
            if g.0 >= self.arrows.len() || f.0 >= self.arrows.len() || h.0 >= self.arrows.len() {
                return viol(CompositeOfNonComposable { g, f });
            }
            if self.dst(f) != self.src(g) {
                return viol(CompositeOfNonComposable { g, f });
            }
            if self.src(h) != self.src(f) || self.dst(h) != self.dst(g) {
                return viol(WrongCompositeEndpoints { g, f, h });
            }
        }
        for f in self.arrow_ids() {
            for &g in self.arrows_out_of(self.dst(f)) {
                if self.compose(g, f).is_none() {
                    return viol(MissingComposite { g, f });
                }
            }
        }
        for f in self.arrow_ids() {
            if self.compose(self.identity(self.dst(f)), f) != Some(f) {
                return viol(LeftIdentity { f });
            }
            if self.compose(f, self.identity(self.src(f))) != Some(f) {
                return viol(RightIdentity { f });
            }
        }
        for f in self.arrow_ids() {
            for &g in self.arrows_out_of(self.dst(f)) {
                let gf = self.comp(g, f);
                for &h in self.arrows_out_of(self.dst(g)) {
                    let hg = self.comp(h, g);
                    if self.compose(h, gf) != self.compose(hg, f) {
                        return viol(Associativity { h, g, f });
                    }
                }
            }
        }
        CategoryReport::Valid
    }
}

/// Free-standing form of [`FiniteCategory::validate`].
pub fn validate_category(cat: &FiniteCategory) -> CategoryReport {
    cat.validate()
}

/// A functor into finite sets: a labelled carrier per object and a function
/// per arrow.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinSetFunctor {
    carriers: Vec<Vec<String>>,
    action: Vec<Vec<usize>>,
}

/// First failed functor law.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctorViolation {
    ShapeMismatch(String),
    OutOfRange { arrow: ArrowId, element: usize },
    Identity { object: ObjId, element: usize },
    Composition { g: ArrowId, f: ArrowId, element: usize },
}

impl fmt::Display for FunctorViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctorViolation::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            FunctorViolation::OutOfRange { arrow, element } => {
                write!(f, "arrow #{} sends element {element} outside its target carrier", arrow.0)
            }
            FunctorViolation::Identity { object, element } => {
                write!(f, "identity of object #{} moves element {element}", object.0)
            }
            FunctorViolation::Composition { g, f: ff, element } => {
                write!(f, "F(g∘f) ≠ F(g)∘F(f) for g = #{}, f = #{} at element {element}", g.0, ff.0)
            }
        }
    }
}

impl FinSetFunctor {
    /// `carriers[a]` labels the elements of `X(a)`; `action[f][x]` is the
    /// index of `X(f)(x)` in the target carrier.
    pub fn new(carriers: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Self {
        FinSetFunctor { carriers, action }
    }

    /// Checked constructor.
    pub fn checked(cat: &FiniteCategory, carriers: Vec<Vec<String>>, action: Vec<Vec<usize>>) -> Result<Self> {
        let x = Self::new(carriers, action);
        x.validate(cat).map_err(|v| Error::InvalidFunctor(alloc::string::ToString::to_string(&v)))?;
        Ok(x)
    }

    /// Builds a functor from per-object sizes and a per-arrow function;
    /// labels are the element indices.
    pub fn from_fn(cat: &FiniteCategory, sizes: &[usize], f: impl Fn(ArrowId, usize) -> usize) -> Self {
        let carriers = sizes
            .iter()
            .map(|&n| (0..n).map(|i| format!("{i}")).collect())
            .collect();
        let action = cat
            .arrow_ids()
            .map(|a| (0..sizes[cat.src(a).0]).map(|x| f(a, x)).collect())
            .collect();
        FinSetFunctor { carriers, action }
    }

    /// The functor constant at an `n`-element set.
    pub fn constant(cat: &FiniteCategory, n: usize) -> Self {
        let sizes = alloc::vec![n; cat.object_count()];
        Self::from_fn(cat, &sizes, |_, x| x)
    }

    pub fn empty(cat: &FiniteCategory) -> Self {
        Self::constant(cat, 0)
    }

    pub fn size(&self, a: ObjId) -> usize {
        self.carriers[a.0].len()
    }

    pub fn carrier(&self, a: ObjId) -> &[String] {
        &self.carriers[a.0]
    }

    pub fn carriers(&self) -> &[Vec<String>] {
        &self.carriers
    }

    pub fn label(&self, a: ObjId, x: usize) -> &str {
        &self.carriers[a.0][x]
    }

    pub fn find_label(&self, a: ObjId, label: &str) -> Option<usize> {
        self.carriers[a.0].iter().position(|l| l == label)
    }

    pub fn apply(&self, f: ArrowId, x: usize) -> usize {
        self.action[f.0][x]
    }

    pub fn action(&self, f: ArrowId) -> &[usize] {
        &self.action[f.0]
    }

    pub fn actions(&self) -> &[Vec<usize>] {
        &self.action
    }

    pub fn validate(&self, cat: &FiniteCategory) -> core::result::Result<(), FunctorViolation> {
        use FunctorViolation::*;
        if self.carriers.len() != cat.object_count() {
            return Err(ShapeMismatch(format!(
                "{} carriers for {} objects",
                self.carriers.len(),
                cat.object_count()
            )));
        }
        if self.action.len() != cat.arrow_count() {
            return Err(ShapeMismatch(format!(
                "{} arrow actions for {} arrows",
                self.action.len(),
                cat.arrow_count()
            )));
        }
        for f in cat.arrow_ids() {
            let (s, t) = (cat.src(f), cat.dst(f));
            if self.action[f.0].len() != self.size(s) {
                return Err(ShapeMismatch(format!("action of `{}` has the wrong domain size", cat.arrow(f).name)));
            }
            for (x, &y) in self.action[f.0].iter().enumerate() {
                if y >= self.size(t) {
                    return Err(OutOfRange { arrow: f, element: x });
                }
            }
        }
        for a in cat.objects() {
            let id = cat.identity(a);
            for x in 0..self.size(a) {
                if self.apply(id, x) != x {
                    return Err(Identity { object: a, element: x });
                }
            }
        }
        for (&(g, f), &h) in cat.composition_table() {
            for x in 0..self.size(cat.src(f)) {
                if self.apply(h, x) != self.apply(g, self.apply(f, x)) {
                    return Err(Composition { g, f, element: x });
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn freyd() -> FiniteCategory {
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        b.arrow("sigma", o0, o1);
        b.arrow("tau", o0, o1);
        b.build().unwrap()
    }

    #[test]
    fn discrete_category_is_valid() {
        let c = FiniteCategory::discrete(["A", "B"]);
        assert_eq!(c.validate(), CategoryReport::Valid);
        assert!(c.is_discrete());
    }

    #[test]
    fn freyd_category_is_valid() {
        let c = freyd();
        assert_eq!(c.arrow_count(), 4);
        assert_eq!(c.hom(ObjId(0), ObjId(1)).len(), 2);
        assert!(!c.is_discrete());
    }

    #[test]
    fn wrong_composite_target_is_reported() {
        // 0 -σ-> 1 -ρ-> 2 with ρσ claimed to be σ itself
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        let o2 = b.object("2");
        let s = b.arrow("sigma", o0, o1);
        let r = b.arrow("rho", o1, o2);
        b.compose(r, s, s);
        let c = b.build_unchecked();
        assert_eq!(
            c.validate(),
            CategoryReport::Violation(LawViolation::WrongCompositeEndpoints { g: r, f: s, h: s })
        );
    }

    #[test]
    fn missing_composite_is_reported() {
        let mut b = CategoryBuilder::new();
        let o0 = b.object("0");
        let o1 = b.object("1");
        let o2 = b.object("2");
        b.arrow("sigma", o0, o1);
        b.arrow("rho", o1, o2);
        assert!(matches!(
            b.build_unchecked().validate(),
            CategoryReport::Violation(LawViolation::MissingComposite { .. })
        ));
    }

    #[test]
    fn poset_builds_a_valid_category() {
        let names = ["a", "b", "c"];
        // a <= b <= c
        let c = FiniteCategory::poset(&names, |i, j| i <= j);
        assert_eq!(c.validate(), CategoryReport::Valid);
        assert_eq!(c.arrow_count(), 6);
    }

    #[test]
    fn functor_laws_are_checked() {
        let c = freyd();
        let x = FinSetFunctor::from_fn(&c, &[1, 2], |f, _| match c.arrow(f).name.as_str() {
            "sigma" => 0,
            "tau" => 1,
            _ => 0,
        });
        // identities are not the identity at object 1
        assert!(matches!(x.validate(&c), Err(FunctorViolation::Identity { .. })));
        let x = FinSetFunctor::from_fn(&c, &[1, 2], |f, e| match c.arrow(f).name.as_str() {
            "sigma" => 0,
            "tau" => 1,
            _ => e,
        });
        assert!(x.validate(&c).is_ok());
    }
}

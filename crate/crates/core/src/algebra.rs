//! Coalgebras, fixed points and the algebra maps `ψ_m` they induce.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

use crate::category::{ArrowId, FinSetFunctor, ObjId};
use crate::module::{ElemId, SystemDef};
use crate::tensor::{tensor, Tensor};
use crate::{Error, Result};

/// `γ_a: X(a) → (M⊗X)(a)` for every object, as indices into the classes of
/// the tensor computed by [`tensor`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Coalgebra {
    pub components: Vec<Vec<usize>>,
}

impl Coalgebra {
    pub fn new(components: Vec<Vec<usize>>) -> Self {
        Coalgebra { components }
    }

    /// Builds `γ` from one representative pair `(m, y)` per element.
    pub fn from_pairs(t: &Tensor, pairs: &[Vec<(ElemId, usize)>]) -> Result<Self> {
        let mut components = Vec::with_capacity(pairs.len());
        for row in pairs {
            let mut c = Vec::with_capacity(row.len());
            for &(m, y) in row {
                c.push(
                    t.try_inject(m, y)
                        .ok_or_else(|| Error::Structural(format!("pair (#{}, {y}) is not in the tensor", m.0)))?,
                );
            }
            components.push(c);
        }
        Ok(Coalgebra { components })
    }
}

/// First reason a coalgebra is not a fixed point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FixedPointFailure {
    /// Two elements of `X(a)` with the same image.
    NotInjective { object: ObjId, elements: (usize, usize) },
    /// A class of `(M⊗X)(a)` with no preimage.
    NotSurjective { object: ObjId, class: usize },
    /// `γ ∘ X(f) ≠ (M⊗X)(f) ∘ γ` at element `element`.
    NotNatural { arrow: ArrowId, element: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixedPointReport {
    pub tensor: Tensor,
    pub failure: Option<FixedPointFailure>,
}

impl FixedPointReport {
    pub fn is_fixed_point(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks that every `γ_a` is a bijection onto `(M⊗X)(a)` and that `γ` is
/// natural. Carriers of the wrong shape are a structural error.
pub fn verify_fixed_point(sys: &SystemDef, x: &FinSetFunctor, gamma: &Coalgebra) -> Result<FixedPointReport> {
    let cat = sys.category();
    let t = tensor(sys, x)?;
    check_shape(sys, x, &t, gamma)?;
    let mut failure = None;
    'outer: for a in cat.objects() {
        let comp = &gamma.components[a.0];
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        for (xi, &c) in comp.iter().enumerate() {
            if let Some(&prev) = seen.get(&c) {
                failure = Some(FixedPointFailure::NotInjective {
                    object: a,
                    elements: (prev, xi),
                });
                break 'outer;
            }
            seen.insert(c, xi);
        }
        if let Some(c) = (0..t.size(a)).find(|c| !seen.contains_key(c)) {
            failure = Some(FixedPointFailure::NotSurjective { object: a, class: c });
            break;
        }
    }
    if failure.is_none() {
        failure = naturality_failure(sys, x, &t, &gamma.components);
    }
    Ok(FixedPointReport { tensor: t, failure })
}

fn check_shape(sys: &SystemDef, x: &FinSetFunctor, t: &Tensor, gamma: &Coalgebra) -> Result<()> {
    let cat = sys.category();
    if gamma.components.len() != cat.object_count() {
        return Err(Error::Structural(format!(
            "coalgebra has {} components for {} objects",
            gamma.components.len(),
            cat.object_count()
        )));
    }
    for a in cat.objects() {
        let comp = &gamma.components[a.0];
        if comp.len() != x.size(a) {
            return Err(Error::Structural(format!(
                "component at `{}` has {} entries but the carrier has {}",
                cat.object_name(a),
                comp.len(),
                x.size(a)
            )));
        }
        if let Some(&c) = comp.iter().find(|&&c| c >= t.size(a)) {
            return Err(Error::Structural(format!(
                "component at `{}` names class {c} but the tensor has {}",
                cat.object_name(a),
                t.size(a)
            )));
        }
    }
    Ok(())
}

fn naturality_failure(sys: &SystemDef, x: &FinSetFunctor, t: &Tensor, comps: &[Vec<usize>]) -> Option<FixedPointFailure> {
    let cat = sys.category();
    for f in cat.arrow_ids() {
        let a = cat.src(f);
        for xi in 0..x.size(a) {
            let lhs = comps[cat.dst(f).0][x.apply(f, xi)];
            let rhs = t.functor().apply(f, comps[a.0][xi]);
            if lhs != rhs {
                return Some(FixedPointFailure::NotNatural { arrow: f, element: xi });
            }
        }
    }
    None
}

/// Naturality of a coalgebra that need not be invertible.
pub fn check_coalgebra(sys: &SystemDef, x: &FinSetFunctor, xi: &Coalgebra) -> Result<Option<FixedPointFailure>> {
    let t = tensor(sys, x)?;
    check_shape(sys, x, &t, xi)?;
    Ok(naturality_failure(sys, x, &t, &xi.components))
}

/// The maps `ψ_m: X(b) → X(a)`, one per module element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraStructure {
    pub psi: Vec<Vec<usize>>,
}

/// A failure of `ψ_{f m g} = X(f) ∘ ψ_m ∘ X(g)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AlgebraLawViolation {
    pub f: ArrowId,
    pub m: ElemId,
    pub g: ArrowId,
    pub element: usize,
}

impl AlgebraStructure {
    pub fn apply(&self, m: ElemId, x: usize) -> usize {
        self.psi[m.0][x]
    }

    /// Checks `ψ_{f m g} = X(f) ∘ ψ_m ∘ X(g)` for every decorated element.
    pub fn check_laws(&self, sys: &SystemDef, x: &FinSetFunctor) -> Option<AlgebraLawViolation> {
        let cat = sys.category();
        let module = sys.module();
        for m in module.ids() {
            for &f in cat.arrows_out_of(module.dst(m)) {
                let fm = module.left(f, m);
                for &g in cat.arrows_into(module.src(m)) {
                    let fmg = module.right(fm, g);
                    for y in 0..x.size(cat.src(g)) {
                        let lhs = self.apply(fmg, y);
                        let rhs = x.apply(f, self.apply(m, x.apply(g, y)));
                        if lhs != rhs {
                            return Some(AlgebraLawViolation { f, m, g, element: y });
                        }
                    }
                }
            }
        }
        None
    }

    /// `ψ_m := h_a ∘ (m ⊗ −)` for a structure map `h: M⊗X → X` given by
    /// its components on tensor classes. `h` need not be invertible.
    pub fn from_structure_map(sys: &SystemDef, x: &FinSetFunctor, h: &[Vec<usize>]) -> Result<Self> {
        let t = tensor(sys, x)?;
        let module = sys.module();
        for a in sys.category().objects() {
            if h.get(a.0).map(Vec::len) != Some(t.size(a)) {
                return Err(Error::Structural(format!(
                    "structure map at `{}` does not match the tensor",
                    sys.category().object_name(a)
                )));
            }
        }
        let psi: Vec<Vec<usize>> = module
            .ids()
            .map(|m| {
                (0..x.size(module.src(m)))
                    .map(|y| h[module.dst(m).0][t.inject(m, y)])
                    .collect()
            })
            .collect();
        let alg = AlgebraStructure { psi };
        if let Some(v) = alg.check_laws(sys, x) {
            return Err(law_error(sys, &v));
        }
        Ok(alg)
    }
}

fn law_error(sys: &SystemDef, v: &AlgebraLawViolation) -> Error {
    Error::Structural(format!(
        "ψ law fails at {}·{}·{} on element {}",
        sys.category().arrow(v.f).name,
        sys.module().name(v.m),
        sys.category().arrow(v.g).name,
        v.element
    ))
}

/// `ψ_m = γ_a⁻¹ ∘ (m ⊗ −)` for a verified fixed point.
pub fn algebra_components(sys: &SystemDef, x: &FinSetFunctor, gamma: &Coalgebra) -> Result<AlgebraStructure> {
    let report = verify_fixed_point(sys, x, gamma)?;
    if let Some(f) = report.failure {
        return Err(Error::Structural(format!("not a fixed point: {f:?}")));
    }
    let t = &report.tensor;
    let module = sys.module();
    let inverse: Vec<Vec<usize>> = sys
        .category()
        .objects()
        .map(|a| {
            let mut inv = alloc::vec![0; t.size(a)];
            for (xi, &c) in gamma.components[a.0].iter().enumerate() {
                inv[c] = xi;
            }
            inv
        })
        .collect();
    let psi = module
        .ids()
        .map(|m| {
            (0..x.size(module.src(m)))
                .map(|y| inverse[module.dst(m).0][t.inject(m, y)])
                .collect()
        })
        .collect();
    let alg = AlgebraStructure { psi };
    if let Some(v) = alg.check_laws(sys, x) {
        return Err(law_error(sys, &v));
    }
    Ok(alg)
}

/// `R̃_n^a`: the union over length-`n` chains into `a` of the square of the
/// image of `ψ_{m₁} ⋯ ψ_{mₙ}`. `R̃_0^a` is all of `X(a) × X(a)`.
pub fn approx_relation(
    sys: &SystemDef,
    x: &FinSetFunctor,
    psi: &AlgebraStructure,
    a: ObjId,
    n: usize,
) -> BTreeSet<(usize, usize)> {
    let module = sys.module();
    // states: (object at the chain tip, composite map X(tip) -> X(a))
    let mut states: BTreeSet<(ObjId, Vec<usize>)> = BTreeSet::new();
    states.insert((a, (0..x.size(a)).collect()));
    for _ in 0..n {
        let mut next = BTreeSet::new();
        for (obj, map) in &states {
            for &m in module.elements_into(*obj) {
                let b = module.src(m);
                let comp: Vec<usize> = (0..x.size(b)).map(|y| map[psi.apply(m, y)]).collect();
                next.insert((b, comp));
            }
        }
        states = next;
    }
    let mut rel = BTreeSet::new();
    for (_, map) in &states {
        let image: BTreeSet<usize> = map.iter().copied().collect();
        for &p in &image {
            for &q in &image {
                rel.insert((p, q));
            }
        }
    }
    rel
}

/// Sets `K_n(x) ⊆ X_target(a)` for every object `a` and source element `x`.
pub type KnFamily = Vec<Vec<BTreeSet<usize>>>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum KnOutcome {
    /// `K_{depth} = K_{depth+1}`, so the family is constant from `depth` on.
    Stabilized { depth: usize, sets: KnFamily },
    Undecided { depth: usize },
}

pub const DEFAULT_KN_DEPTH: usize = 64;

/// The recursion `K_0(x) = X(a)`,
/// `K_{n+1}(x) = ⋂ { ψ_m K_n(y) | (m, y) ∈ ξ(x) }` for a source coalgebra
/// `(X_s, ξ)` and a target algebra `(X_t, ψ)`.
pub struct KnOracle<'a> {
    sys: &'a SystemDef,
    target: &'a FinSetFunctor,
    psi: &'a AlgebraStructure,
    source: &'a FinSetFunctor,
    /// For each object and source element, the members of its class.
    xi_members: Vec<Vec<Vec<(ElemId, usize)>>>,
}

impl<'a> KnOracle<'a> {
    pub fn new(
        sys: &'a SystemDef,
        target: &'a FinSetFunctor,
        psi: &'a AlgebraStructure,
        source: &'a FinSetFunctor,
        xi: &Coalgebra,
    ) -> Result<Self> {
        let t = tensor(sys, source)?;
        check_shape(sys, source, &t, xi)?;
        let xi_members = sys
            .category()
            .objects()
            .map(|a| {
                xi.components[a.0]
                    .iter()
                    .map(|&c| t.classes(a)[c].members.clone())
                    .collect()
            })
            .collect();
        Ok(KnOracle {
            sys,
            target,
            psi,
            source,
            xi_members,
        })
    }

    pub fn initial(&self) -> KnFamily {
        self.sys
            .category()
            .objects()
            .map(|a| {
                let full: BTreeSet<usize> = (0..self.target.size(a)).collect();
                alloc::vec![full; self.source.size(a)]
            })
            .collect()
    }

    pub fn step(&self, k: &KnFamily) -> KnFamily {
        let module = self.sys.module();
        self.sys
            .category()
            .objects()
            .map(|a| {
                self.xi_members[a.0]
                    .iter()
                    .map(|members| {
                        let mut acc: Option<BTreeSet<usize>> = None;
                        for &(m, y) in members {
                            let img: BTreeSet<usize> =
                                k[module.src(m).0][y].iter().map(|&z| self.psi.apply(m, z)).collect();
                            acc = Some(match acc {
                                None => img,
                                Some(s) => s.intersection(&img).copied().collect(),
                            });
                        }
                        // classes are never empty, so acc is always set
                        acc.unwrap_or_default()
                    })
                    .collect()
            })
            .collect()
    }

    pub fn sets(&self, n: usize) -> KnFamily {
        let mut k = self.initial();
        for _ in 0..n {
            k = self.step(&k);
        }
        k
    }

    /// `K_n(x)` at object `a`.
    pub fn at(&self, a: ObjId, x: usize, n: usize) -> BTreeSet<usize> {
        self.sets(n)[a.0][x].clone()
    }

    pub fn limit(&self, max_depth: usize) -> KnOutcome {
        let mut k = self.initial();
        for depth in 0..=max_depth {
            let next = self.step(&k);
            if next == k {
                return KnOutcome::Stabilized { depth, sets: k };
            }
            k = next;
        }
        KnOutcome::Undecided { depth: max_depth }
    }
}

/// The map read off a stabilized family when every set is a singleton.
pub fn kn_map(sets: &KnFamily) -> Option<Vec<Vec<usize>>> {
    sets.iter()
        .map(|row| {
            row.iter()
                .map(|s| if s.len() == 1 { s.iter().next().copied() } else { None })
                .collect()
        })
        .collect()
}

/// Free-function form of the oracle: `K_n(x)` at `a`.
#[allow(clippy::too_many_arguments)]
pub fn kn_oracle(
    sys: &SystemDef,
    target: &FinSetFunctor,
    psi: &AlgebraStructure,
    source: &FinSetFunctor,
    xi: &Coalgebra,
    a: ObjId,
    x: usize,
    n: usize,
) -> Result<BTreeSet<usize>> {
    Ok(KnOracle::new(sys, target, psi, source, xi)?.at(a, x, n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::module::ModuleBuilder;

    fn cantor2() -> SystemDef {
        let cat = FiniteCategory::discrete(["*"]);
        let mut m = ModuleBuilder::new();
        m.element("0", ObjId(0), ObjId(0));
        m.element("1", ObjId(0), ObjId(0));
        SystemDef::new(cat.clone(), m.build(&cat).unwrap()).unwrap()
    }

    /// Words of length `d` over {0,1}, index = binary value with the first
    /// symbol most significant.
    fn words(d: u32) -> FinSetFunctor {
        let cat = FiniteCategory::discrete(["*"]);
        let n = 1usize << d;
        FinSetFunctor::new(
            alloc::vec![(0..n).map(|i| format!("{i:0w$b}", w = d as usize)).collect()],
            alloc::vec![(0..n).collect()],
        )
        .tap_check(&cat)
    }

    trait TapCheck {
        fn tap_check(self, cat: &FiniteCategory) -> Self;
    }
    impl TapCheck for FinSetFunctor {
        fn tap_check(self, cat: &FiniteCategory) -> Self {
            self.validate(cat).unwrap();
            self
        }
    }

    /// Prepend-and-truncate: (m, w) ↦ m·w with the last symbol dropped.
    fn prepend_truncate(sys: &SystemDef, x: &FinSetFunctor, d: u32) -> AlgebraStructure {
        let t = tensor(sys, x).unwrap();
        let h: Vec<usize> = t
            .classes(ObjId(0))
            .iter()
            .map(|c| {
                let (m, w) = c.representative;
                (m.0 << (d - 1)) | (w >> 1)
            })
            .collect();
        AlgebraStructure::from_structure_map(sys, x, &[h]).unwrap()
    }

    #[test]
    fn approx_relation_matches_prefix_agreement() {
        let sys = cantor2();
        let x = words(4);
        let psi = prepend_truncate(&sys, &x, 4);
        assert_eq!(approx_relation(&sys, &x, &psi, ObjId(0), 0).len(), 256);
        let r2 = approx_relation(&sys, &x, &psi, ObjId(0), 2);
        for p in 0..16usize {
            for q in 0..16usize {
                assert_eq!(r2.contains(&(p, q)), p >> 2 == q >> 2);
            }
        }
    }

    #[test]
    fn constant_loop_converges_to_zero_word() {
        let sys = cantor2();
        let x = words(5);
        let psi = prepend_truncate(&sys, &x, 5);
        let cat = sys.category().clone();
        let src = FinSetFunctor::constant(&cat, 1);
        let ts = tensor(&sys, &src).unwrap();
        let xi = Coalgebra::from_pairs(&ts, &[alloc::vec![(ElemId(0), 0)]]).unwrap();
        let oracle = KnOracle::new(&sys, &x, &psi, &src, &xi).unwrap();
        assert_eq!(oracle.at(ObjId(0), 0, 0).len(), 32);
        match oracle.limit(DEFAULT_KN_DEPTH) {
            KnOutcome::Stabilized { depth, sets } => {
                assert_eq!(depth, 5);
                assert_eq!(kn_map(&sets), Some(alloc::vec![alloc::vec![0]]));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn identity_system_gives_bijective_psi() {
        let cat = FiniteCategory::discrete(["A"]);
        let mut m = ModuleBuilder::new();
        m.element("id", ObjId(0), ObjId(0));
        let sys = SystemDef::new(cat.clone(), m.build(&cat).unwrap()).unwrap();
        let x = FinSetFunctor::constant(&cat, 1);
        let gamma = Coalgebra::new(alloc::vec![alloc::vec![0]]);
        let alg = algebra_components(&sys, &x, &gamma).unwrap();
        assert_eq!(alg.psi, alloc::vec![alloc::vec![0]]);
    }

    #[test]
    fn wrong_carrier_size_is_structural() {
        let sys = cantor2();
        let x = FinSetFunctor::constant(sys.category(), 1);
        let gamma = Coalgebra::new(alloc::vec![alloc::vec![0, 1]]);
        assert!(matches!(verify_fixed_point(&sys, &x, &gamma), Err(Error::Structural(_))));
    }
}

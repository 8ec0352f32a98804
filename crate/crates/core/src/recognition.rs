//! Universality certificates from metric annotations.
//!
//! Two rules are implemented. The crude rule asks for every structure map
//! to be a contraction. The precise rule only asks for diameters of chain
//! images to decay, which is certified by a strongly-connected-component
//! analysis of the live chain graph with exact max-times arithmetic.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use num_traits::{One, Zero};

use crate::address::{check_occupied, check_occupied_flags, live_chain_graph, liveness};
use crate::algebra::{verify_fixed_point, Coalgebra};
use crate::category::{FinSetFunctor, ObjId};
use crate::graph::Digraph;
use crate::module::{ElemId, SystemDef};
use crate::rational::Rational;
use crate::{Error, Result};

/// Diameter bounds per object and Lipschitz bounds per module element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MetricAnnotation {
    pub diam: Vec<Option<Rational>>,
    pub lip: Vec<Option<Rational>>,
}

impl MetricAnnotation {
    pub fn unset(sys: &SystemDef) -> Self {
        MetricAnnotation {
            diam: alloc::vec![None; sys.object_count()],
            lip: alloc::vec![None; sys.module().len()],
        }
    }

    /// Every object gets `diam`, every element `lip`.
    pub fn uniform(sys: &SystemDef, diam: Rational, lip: Rational) -> Self {
        MetricAnnotation {
            diam: alloc::vec![Some(diam); sys.object_count()],
            lip: alloc::vec![Some(lip); sys.module().len()],
        }
    }

    pub fn set_diam(&mut self, a: ObjId, d: Rational) -> &mut Self {
        self.diam[a.0] = Some(d);
        self
    }

    pub fn set_lip(&mut self, m: ElemId, l: Rational) -> &mut Self {
        self.lip[m.0] = Some(l);
        self
    }

    /// Fails on a missing or negative entry, or a size mismatch.
    pub fn validate(&self, sys: &SystemDef) -> Result<()> {
        if self.diam.len() != sys.object_count() || self.lip.len() != sys.module().len() {
            return Err(Error::Structural("annotation does not match the system".into()));
        }
        for a in sys.category().objects() {
            match &self.diam[a.0] {
                None => {
                    return Err(Error::Structural(format!(
                        "missing diameter bound for `{}`",
                        sys.category().object_name(a)
                    )))
                }
                Some(d) if *d < Rational::zero() => {
                    return Err(Error::Structural(format!(
                        "negative diameter bound for `{}`",
                        sys.category().object_name(a)
                    )))
                }
                _ => {}
            }
        }
        for m in sys.module().ids() {
            match &self.lip[m.0] {
                None => {
                    return Err(Error::Structural(format!(
                        "missing Lipschitz bound for `{}`",
                        sys.module().name(m)
                    )))
                }
                Some(l) if *l < Rational::zero() => {
                    return Err(Error::Structural(format!(
                        "negative Lipschitz bound for `{}`",
                        sys.module().name(m)
                    )))
                }
                _ => {}
            }
        }
        Ok(())
    }

    pub fn d(&self, a: ObjId) -> &Rational {
        self.diam[a.0].as_ref().expect("validated annotation")
    }

    pub fn l(&self, m: ElemId) -> &Rational {
        self.lip[m.0].as_ref().expect("validated annotation")
    }
}

/// What is known about the claimed fixed point.
#[derive(Clone, Debug)]
pub enum FixedPointEvidence<'a> {
    /// Finite carriers and a coalgebra structure, checked here.
    Verified { x: &'a FinSetFunctor, gamma: &'a Coalgebra },
    /// Carriers standing for infinite spaces: only their emptiness pattern
    /// is given and the fixed-point property is taken on trust.
    Asserted { nonempty: Vec<bool> },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Inconclusive,
}

impl core::fmt::Display for Verdict {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "PASS",
            Verdict::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Crude,
    Precise,
}

/// Decay bound `β_n ≤ constant · ratio^⌈(n − period + 1)/period⌉`,
/// specialised to `constant · ratio^n` when `period == 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecayBound {
    pub ratio: Rational,
    pub constant: Rational,
    pub period: u64,
}

/// Iteration cap for [`DecayBound::depth_for`].
const MAX_DECAY_STEPS: u64 = 1 << 20;

impl DecayBound {
    /// Smallest certified `n` with every chain image of length `≥ n` having
    /// diameter `≤ eps`. `None` if the bound does not decay or `eps ≤ 0`.
    pub fn depth_for(&self, eps: &Rational) -> Option<u64> {
        if *eps <= Rational::zero() {
            return None;
        }
        if self.constant <= *eps {
            return Some(0);
        }
        if self.ratio >= Rational::one() {
            return None;
        }
        let mut q = 0u64;
        let mut w = self.constant.clone();
        while w > *eps {
            w *= &self.ratio;
            q += 1;
            if q > MAX_DECAY_STEPS {
                return None;
            }
        }
        Some(self.period * q)
    }
}

/// Cycle analysis of one strongly connected component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SccReport {
    pub objects: Vec<ObjId>,
    /// Largest product of Lipschitz bounds over closed walks of length at
    /// most the component size, with one such walk.
    pub max_cycle_product: Rational,
    pub cycle: Vec<ElemId>,
    /// All objects in and downstream of the component have zero diameter.
    pub diameter_free: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Blocking {
    NotFixedPoint(String),
    Unoccupied(ObjId),
    /// An element whose effective Lipschitz bound is `≥ 1`.
    NotContraction { element: ElemId, lip: Rational },
    /// A cycle with product `≥ 1` that reaches positive diameters.
    Cycle { elements: Vec<ElemId>, product: Rational },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Certificate {
    pub rule: Rule,
    pub verdict: Verdict,
    /// The object certified by the precise rule; `None` for the crude rule.
    pub object: Option<ObjId>,
    pub bound: Option<DecayBound>,
    pub sccs: Vec<SccReport>,
    pub blocking: Option<Blocking>,
}

impl Certificate {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    /// `n(ε)` for a PASS certificate.
    pub fn decay_depth(&self, eps: &Rational) -> Option<u64> {
        self.bound.as_ref().and_then(|b| b.depth_for(eps))
    }
}

fn check_evidence(sys: &SystemDef, ev: &FixedPointEvidence<'_>) -> Result<Option<Blocking>> {
    match ev {
        FixedPointEvidence::Verified { x, gamma } => {
            let report = verify_fixed_point(sys, x, gamma)?;
            if let Some(f) = report.failure {
                return Ok(Some(Blocking::NotFixedPoint(format!("{f:?}"))));
            }
            if !check_occupied(sys, x) {
                let live = liveness(sys);
                let a = sys.category().objects().find(|a| live[a.0] && x.size(*a) == 0);
                return Ok(a.map(Blocking::Unoccupied));
            }
            Ok(None)
        }
        FixedPointEvidence::Asserted { nonempty } => {
            if nonempty.len() != sys.object_count() {
                return Err(Error::Structural("emptiness pattern does not match the system".into()));
            }
            if !check_occupied_flags(sys, nonempty) {
                let live = liveness(sys);
                let a = sys.category().objects().find(|a| live[a.0] && !nonempty[a.0]);
                return Ok(a.map(Blocking::Unoccupied));
            }
            Ok(None)
        }
    }
}

/// Lipschitz bound used by the crude rule: a map out of a zero-diameter
/// space is constant, so its bound is taken as 0.
pub fn effective_lip(sys: &SystemDef, ann: &MetricAnnotation, m: ElemId) -> Rational {
    if ann.d(sys.module().src(m)).is_zero() {
        Rational::zero()
    } else {
        ann.l(m).clone()
    }
}

/// Crude rule: every effective Lipschitz bound below 1 and the fixed point
/// occupied. The bound is `λⁿ D` with `λ = max λ_m` and `D = max D_a`.
pub fn check_crude(sys: &SystemDef, ev: &FixedPointEvidence<'_>, ann: &MetricAnnotation) -> Result<Certificate> {
    ann.validate(sys)?;
    let blocking = check_evidence(sys, ev)?;
    let mut lambda = Rational::zero();
    let mut worst = None;
    for m in sys.module().ids() {
        let l = effective_lip(sys, ann, m);
        if l >= Rational::one() && worst.is_none() {
            worst = Some(Blocking::NotContraction {
                element: m,
                lip: l.clone(),
            });
        }
        if l > lambda {
            lambda = l;
        }
    }
    let d = sys
        .category()
        .objects()
        .map(|a| ann.d(a).clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let blocking = blocking.or(worst);
    let verdict = if blocking.is_none() {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    Ok(Certificate {
        rule: Rule::Crude,
        verdict,
        object: None,
        bound: (verdict == Verdict::Pass).then(|| DecayBound {
            ratio: lambda,
            constant: d,
            period: 1,
        }),
        sccs: Vec::new(),
        blocking,
    })
}

fn rmax(a: &Option<Rational>, b: Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, b) => b,
        (Some(a), None) => Some(a.clone()),
        (Some(a), Some(b)) => Some(if *a >= b { a.clone() } else { b }),
    }
}

/// Max-times closure inside one component: the best closed walk of length
/// `1..=k` at any node, with the walk itself.
fn best_cycle(g: &Digraph, lip: &[Rational], nodes: &[usize], comp: &[usize]) -> (Rational, Vec<usize>) {
    let c = comp[nodes[0]];
    let k = nodes.len();
    let idx = |u: usize| nodes.iter().position(|&x| x == u);
    let mut best: Option<(Rational, Vec<usize>)> = None;
    for si in 0..k {
        // w[len][v] = best product of a walk s -> v of length len, with edges
        let mut cur: Vec<Option<(Rational, Vec<usize>)>> = alloc::vec![None; k];
        cur[si] = Some((Rational::one(), Vec::new()));
        for _ in 0..k {
            let mut next: Vec<Option<(Rational, Vec<usize>)>> = alloc::vec![None; k];
            for (ui, &u) in nodes.iter().enumerate() {
                let Some((pw, path)) = &cur[ui] else { continue };
                for &e in &g.out[u] {
                    let v = g.edges[e].1;
                    if comp[v] != c {
                        continue;
                    }
                    let vi = idx(v).expect("node in component");
                    let w = pw * &lip[e];
                    let better = match &next[vi] {
                        None => true,
                        Some((old, _)) => w > *old,
                    };
                    if better {
                        let mut p = path.clone();
                        p.push(e);
                        next[vi] = Some((w, p));
                    }
                }
            }
            if let Some((w, p)) = &next[si] {
                let better = match &best {
                    None => true,
                    Some((old, _)) => w > old,
                };
                if better {
                    best = Some((w.clone(), p.clone()));
                }
            }
            cur = next;
        }
    }
    best.unwrap_or_else(|| (Rational::zero(), Vec::new()))
}

/// Precise rule at `a`: in the live chain graph reachable from `a`, every
/// component with a cycle of Lipschitz product `≥ 1` must contain and lead
/// only to objects of zero diameter.
pub fn check_precise_diam(
    sys: &SystemDef,
    ev: &FixedPointEvidence<'_>,
    ann: &MetricAnnotation,
    a: ObjId,
) -> Result<Certificate> {
    ann.validate(sys)?;
    let mut blocking = check_evidence(sys, ev)?;
    let live = liveness(sys);
    let (g, kept) = live_chain_graph(sys, &live);
    let lip: Vec<Rational> = kept.iter().map(|&m| effective_lip(sys, ann, m)).collect();
    let reach = g.reachable(a.0);
    let comp = g.scc();
    let n = sys.object_count();
    // zero region: nodes all of whose downstream (inclusive) has D = 0
    let zero: Vec<bool> = (0..n)
        .map(|u| {
            let r = g.reachable(u);
            (0..n).filter(|&v| r[v]).all(|v| ann.d(ObjId(v)).is_zero())
        })
        .collect();
    let mut comps: BTreeSet<usize> = BTreeSet::new();
    for u in (0..n).filter(|&u| reach[u] && live[u]) {
        comps.insert(comp[u]);
    }
    let mut sccs = Vec::new();
    let mut outside_ratio = Rational::zero();
    for &c in &comps {
        let nodes: Vec<usize> = (0..n).filter(|&u| comp[u] == c).collect();
        let (prod, walk) = best_cycle(&g, &lip, &nodes, &comp);
        let diameter_free = nodes.iter().all(|&u| zero[u]);
        let cycle: Vec<ElemId> = walk.iter().map(|&e| ElemId(g.edges[e].2)).collect();
        if !cycle.is_empty() && prod >= Rational::one() && !diameter_free && blocking.is_none() {
            blocking = Some(Blocking::Cycle {
                elements: cycle.clone(),
                product: prod.clone(),
            });
        }
        if !diameter_free && !cycle.is_empty() && prod > outside_ratio {
            outside_ratio = prod.clone();
        }
        sccs.push(SccReport {
            objects: nodes.iter().map(|&u| ObjId(u)).collect(),
            max_cycle_product: prod,
            cycle,
            diameter_free,
        });
    }
    let verdict = if blocking.is_none() {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    let bound = if verdict == Verdict::Pass {
        // chains leaving the zero region pass through at most k − 1 edges
        // outside simple cycles; each extracted cycle contributes ≤ ratio
        let outside: Vec<usize> = (0..n).filter(|&u| reach[u] && live[u] && !zero[u]).collect();
        let k = outside.len() as u64;
        let mut big = Rational::one();
        for (e, l) in lip.iter().enumerate() {
            let (u, v, _) = g.edges[e];
            if reach[u] && !zero[u] && !zero[v] && *l > big {
                big = l.clone();
            }
        }
        let dmax = outside
            .iter()
            .map(|&u| ann.d(ObjId(u)).clone())
            .max()
            .unwrap_or_else(Rational::zero);
        let mut constant = dmax;
        for _ in 1..k {
            constant *= &big;
        }
        Some(DecayBound {
            ratio: outside_ratio,
            constant,
            period: k.max(1),
        })
    } else {
        None
    };
    Ok(Certificate {
        rule: Rule::Precise,
        verdict,
        object: Some(a),
        bound,
        sccs,
        blocking,
    })
}

/// `β_n(a)`: the maximum over length-`n` chains into `a` ending at a live
/// object of `(∏ λ_{mᵢ}) · D_{aₙ}` with effective Lipschitz bounds, or
/// `None` when there are no such chains.
pub fn max_chain_weight(sys: &SystemDef, ann: &MetricAnnotation, a: ObjId, n: usize) -> Result<Option<Rational>> {
    Ok(chain_weights(sys, ann, n)?.swap_remove(a.0))
}

/// `β_n` at every object.
pub fn chain_weights(sys: &SystemDef, ann: &MetricAnnotation, n: usize) -> Result<Vec<Option<Rational>>> {
    ann.validate(sys)?;
    let module = sys.module();
    let live = liveness(sys);
    let mut beta: Vec<Option<Rational>> = sys
        .category()
        .objects()
        .map(|a| live[a.0].then(|| ann.d(a).clone()))
        .collect();
    for _ in 0..n {
        beta = sys
            .category()
            .objects()
            .map(|a| {
                let mut best = None;
                for &m in module.elements_into(a) {
                    if let Some(b) = &beta[module.src(m).0] {
                        best = rmax(&best, Some(effective_lip(sys, ann, m) * b));
                    }
                }
                best
            })
            .collect();
    }
    Ok(beta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::category::FiniteCategory;
    use crate::module::ModuleBuilder;
    use crate::rational::{int, rat};

    fn single_loop() -> SystemDef {
        let cat = FiniteCategory::discrete(["*"]);
        let mut m = ModuleBuilder::new();
        m.element("m", ObjId(0), ObjId(0));
        SystemDef::new(cat.clone(), m.build(&cat).unwrap()).unwrap()
    }

    fn asserted(sys: &SystemDef) -> FixedPointEvidence<'static> {
        FixedPointEvidence::Asserted {
            nonempty: alloc::vec![true; sys.object_count()],
        }
    }

    #[test]
    fn unit_loop_depends_on_the_diameter() {
        let sys = single_loop();
        let ev = asserted(&sys);
        let one = MetricAnnotation::uniform(&sys, int(1), int(1));
        let zero = MetricAnnotation::uniform(&sys, int(0), int(1));
        assert_eq!(check_crude(&sys, &ev, &one).unwrap().verdict, Verdict::Inconclusive);
        assert_eq!(check_crude(&sys, &ev, &zero).unwrap().verdict, Verdict::Pass);
        assert_eq!(check_precise_diam(&sys, &ev, &one, ObjId(0)).unwrap().verdict, Verdict::Inconclusive);
        let p = check_precise_diam(&sys, &ev, &zero, ObjId(0)).unwrap();
        assert_eq!(p.verdict, Verdict::Pass);
        assert_eq!(p.decay_depth(&rat(1, 1000)), Some(0));
    }

    #[test]
    fn crude_depth_is_the_first_power_below_eps() {
        let sys = single_loop();
        let ann = MetricAnnotation::uniform(&sys, int(1), rat(1, 2));
        let c = check_crude(&sys, &asserted(&sys), &ann).unwrap();
        assert_eq!(c.decay_depth(&rat(1, 8)), Some(3));
        assert_eq!(c.decay_depth(&rat(1, 9)), Some(4));
    }

    #[test]
    fn max_chain_weight_on_a_loop() {
        let sys = single_loop();
        let ann = MetricAnnotation::uniform(&sys, int(1), rat(1, 2));
        assert_eq!(max_chain_weight(&sys, &ann, ObjId(0), 3).unwrap(), Some(rat(1, 8)));
        assert_eq!(max_chain_weight(&sys, &ann, ObjId(0), 0).unwrap(), Some(int(1)));
    }

    #[test]
    fn missing_annotation_is_structural() {
        let sys = single_loop();
        let ann = MetricAnnotation::unset(&sys);
        assert!(matches!(check_crude(&sys, &asserted(&sys), &ann), Err(Error::Structural(_))));
    }
}

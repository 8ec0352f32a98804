//! JSON inputs and machine-readable outputs.
//!
//! Rationals are written as strings (`"1/2"`, `"3"`, `"0.25"`).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use selfsim_core::address::{Classification, Witness};
use selfsim_core::affine::RationalAffineMap;
use selfsim_core::algebra::Coalgebra;
use selfsim_core::category::{FinSetFunctor, ObjId};
use selfsim_core::cover::{CoverSequence, GroundSpace, PointSet};
use selfsim_core::ifs::{Bbox, Contraction, Ifs};
use selfsim_core::rational::{format_rational, parse_rational, to_f64};
use selfsim_core::recognition::{Blocking, Certificate, Rule};
use selfsim_core::transforms::SystemMorphismLog;
use selfsim_core::{Error, Rational, Result, SystemDef, Tensor};

fn rationals(v: &[String]) -> Result<Vec<Rational>> {
    v.iter().map(|s| parse_rational(s)).collect()
}

fn strings(v: &[Rational]) -> Vec<String> {
    v.iter().map(format_rational).collect()
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowJson {
    pub name: String,
    pub src: String,
    pub dst: String,
}

/// A system with the same content as its `.ssd` normal form.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SystemJson {
    pub objects: Vec<String>,
    pub arrows: Vec<ArrowJson>,
    /// `[g, f, g∘f]`.
    pub compose: Vec<[String; 3]>,
    pub elements: Vec<ArrowJson>,
    /// `[f, m, f·m]`.
    pub lact: Vec<[String; 3]>,
    /// `[m, g, m·g]`.
    pub ract: Vec<[String; 3]>,
}

impl SystemJson {
    pub fn from_system(sys: &SystemDef) -> Self {
        let cat = sys.category();
        let module = sys.module();
        let an = |f| cat.arrow(f).name.clone();
        let on = |a| cat.object_name(a).to_string();
        SystemJson {
            objects: cat.object_names().to_vec(),
            arrows: cat
                .arrow_ids()
                .filter(|&f| !cat.is_identity(f))
                .map(|f| ArrowJson {
                    name: an(f),
                    src: on(cat.src(f)),
                    dst: on(cat.dst(f)),
                })
                .collect(),
            compose: cat
                .composition_table()
                .iter()
                .filter(|((g, f), _)| !cat.is_identity(*g) && !cat.is_identity(*f))
                .map(|(&(g, f), &h)| [an(g), an(f), an(h)])
                .collect(),
            elements: module
                .ids()
                .map(|m| ArrowJson {
                    name: module.name(m).to_string(),
                    src: on(module.src(m)),
                    dst: on(module.dst(m)),
                })
                .collect(),
            lact: module
                .left_table()
                .iter()
                .filter(|((f, _), _)| !cat.is_identity(*f))
                .map(|(&(f, m), &m2)| [an(f), module.name(m).to_string(), module.name(m2).to_string()])
                .collect(),
            ract: module
                .right_table()
                .iter()
                .filter(|((_, g), _)| !cat.is_identity(*g))
                .map(|(&(m, g), &m2)| [module.name(m).to_string(), an(g), module.name(m2).to_string()])
                .collect(),
        }
    }
}

/// A functor `𝒜 → FinSet`: labelled carriers per object and, for each
/// non-identity arrow, the image label of every carrier element.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FunctorJson {
    pub carriers: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub actions: BTreeMap<String, Vec<String>>,
}

impl FunctorJson {
    pub fn from_functor(sys: &SystemDef, x: &FinSetFunctor) -> Self {
        let cat = sys.category();
        FunctorJson {
            carriers: cat
                .objects()
                .map(|a| (cat.object_name(a).to_string(), x.carrier(a).to_vec()))
                .collect(),
            actions: cat
                .arrow_ids()
                .filter(|&f| !cat.is_identity(f))
                .map(|f| {
                    let images = x.action(f).iter().map(|&y| x.label(cat.dst(f), y).to_string()).collect();
                    (cat.arrow(f).name.clone(), images)
                })
                .collect(),
        }
    }

    pub fn to_functor(&self, sys: &SystemDef) -> Result<FinSetFunctor> {
        let cat = sys.category();
        let mut carriers = Vec::new();
        for a in cat.objects() {
            carriers.push(self.carriers.get(cat.object_name(a)).cloned().unwrap_or_default());
        }
        for name in self.carriers.keys() {
            sys.find_object(name)?;
        }
        let mut action = Vec::new();
        for f in cat.arrow_ids() {
            let (s, t) = (cat.src(f), cat.dst(f));
            if cat.is_identity(f) {
                action.push((0..carriers[s.0].len()).collect());
                continue;
            }
            let name = &cat.arrow(f).name;
            let images = self
                .actions
                .get(name)
                .ok_or_else(|| Error::Input(format!("no action given for arrow `{name}`")))?;
            if images.len() != carriers[s.0].len() {
                return Err(Error::Input(format!("action of `{name}` has the wrong length")));
            }
            let row = images
                .iter()
                .map(|l| {
                    carriers[t.0]
                        .iter()
                        .position(|c| c == l)
                        .ok_or_else(|| Error::Input(format!("`{l}` is not in the carrier at `{}`", cat.object_name(t))))
                })
                .collect::<Result<Vec<_>>>()?;
            action.push(row);
        }
        for name in self.actions.keys() {
            if cat.find_arrow(name).is_none() {
                return Err(Error::UnknownName(name.clone()));
            }
        }
        FinSetFunctor::checked(cat, carriers, action)
    }
}

/// `γ_a(x) = [m ⊗ y]` given as `[m, y]` for every carrier element `x`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoalgebraJson(pub BTreeMap<String, Vec<(String, String)>>);

impl CoalgebraJson {
    pub fn to_coalgebra(&self, sys: &SystemDef, x: &FinSetFunctor, t: &Tensor) -> Result<Coalgebra> {
        let cat = sys.category();
        let mut pairs = Vec::new();
        for a in cat.objects() {
            let row = self.0.get(cat.object_name(a)).cloned().unwrap_or_default();
            if row.len() != x.size(a) {
                return Err(Error::Input(format!(
                    "coalgebra at `{}` needs {} entries",
                    cat.object_name(a),
                    x.size(a)
                )));
            }
            let mut out = Vec::new();
            for (m, y) in row {
                let m = sys.find_element(&m)?;
                let b = sys.module().src(m);
                let y = x
                    .find_label(b, &y)
                    .ok_or_else(|| Error::Input(format!("`{y}` is not in the carrier at `{}`", cat.object_name(b))))?;
                out.push((m, y));
            }
            pairs.push(out);
        }
        Coalgebra::from_pairs(t, &pairs)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassJson {
    pub label: String,
    /// `[element, carrier label]`.
    pub members: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct TensorJson {
    pub objects: BTreeMap<String, Vec<ClassJson>>,
}

impl TensorJson {
    pub fn new(sys: &SystemDef, x: &FinSetFunctor, t: &Tensor) -> Self {
        let cat = sys.category();
        let module = sys.module();
        let objects = cat
            .objects()
            .map(|a| {
                let classes = t
                    .classes(a)
                    .iter()
                    .enumerate()
                    .map(|(i, c)| ClassJson {
                        label: t.functor().label(a, i).to_string(),
                        members: c
                            .members
                            .iter()
                            .map(|&(m, y)| (module.name(m).to_string(), x.label(module.src(m), y).to_string()))
                            .collect(),
                    })
                    .collect();
                (cat.object_name(a).to_string(), classes)
            })
            .collect();
        TensorJson { objects }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ClassificationJson {
    pub object: String,
    pub class: String,
    pub witness: String,
}

impl ClassificationJson {
    pub fn new(sys: &SystemDef, c: &Classification) -> Self {
        ClassificationJson {
            object: sys.category().object_name(c.object).to_string(),
            class: c.class.to_string(),
            witness: describe_witness(sys, &c.witness),
        }
    }
}

fn names(sys: &SystemDef, ms: &[selfsim_core::ElemId]) -> String {
    ms.iter().map(|&m| sys.module().name(m)).collect::<Vec<_>>().join(" ")
}

pub fn describe_witness(sys: &SystemDef, w: &Witness) -> String {
    let on = |a: ObjId| sys.category().object_name(a).to_string();
    match w {
        Witness::Dead => "no infinite chain".into(),
        Witness::TwoCycles {
            approach,
            node,
            first,
            second,
        } => format!(
            "two cycles at {} [{}] and [{}] reached by [{}]",
            on(*node),
            names(sys, first),
            names(sys, second),
            names(sys, approach)
        ),
        Witness::CycleWithExit {
            approach,
            node,
            cycle,
            exit,
        } => format!(
            "cycle at {} [{}] with exit {} reached by [{}]",
            on(*node),
            names(sys, cycle),
            sys.module().name(*exit),
            names(sys, approach)
        ),
        Witness::Paths { count, capped } => {
            let noun = if *count == 1 { "chain" } else { "chains" };
            if *capped {
                format!("at least {count} infinite {noun}")
            } else {
                format!("{count} infinite {noun}")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BoundJson {
    pub ratio: String,
    pub constant: String,
    pub period: u64,
    /// `ln ratio`, for plotting only.
    pub log_ratio: Option<f64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SccJson {
    pub objects: Vec<String>,
    pub max_cycle_product: String,
    pub cycle: Vec<String>,
    pub diameter_free: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct CertificateJson {
    pub rule: String,
    pub verdict: String,
    pub object: Option<String>,
    pub bound: Option<BoundJson>,
    pub eps: String,
    pub depth: Option<u64>,
    pub sccs: Vec<SccJson>,
    pub blocking: Option<String>,
}

impl CertificateJson {
    pub fn new(sys: &SystemDef, cert: &Certificate, eps: &Rational) -> Self {
        let on = |a: ObjId| sys.category().object_name(a).to_string();
        CertificateJson {
            rule: match cert.rule {
                Rule::Crude => "crude".into(),
                Rule::Precise => "precise".into(),
            },
            verdict: cert.verdict.to_string(),
            object: cert.object.map(on),
            bound: cert.bound.as_ref().map(|b| BoundJson {
                ratio: format_rational(&b.ratio),
                constant: format_rational(&b.constant),
                period: b.period,
                log_ratio: (to_f64(&b.ratio) > 0.0).then(|| to_f64(&b.ratio).ln()),
            }),
            eps: format_rational(eps),
            depth: cert.decay_depth(eps),
            sccs: cert
                .sccs
                .iter()
                .map(|s| SccJson {
                    objects: s.objects.iter().map(|&a| on(a)).collect(),
                    max_cycle_product: format_rational(&s.max_cycle_product),
                    cycle: s.cycle.iter().map(|&m| sys.module().name(m).to_string()).collect(),
                    diameter_free: s.diameter_free,
                })
                .collect(),
            blocking: cert.blocking.as_ref().map(|b| describe_blocking(sys, b)),
        }
    }
}

pub fn describe_blocking(sys: &SystemDef, b: &Blocking) -> String {
    match b {
        Blocking::NotFixedPoint(s) => format!("not a fixed point: {s}"),
        Blocking::Unoccupied(a) => format!("live object `{}` has an empty carrier", sys.category().object_name(*a)),
        Blocking::NotContraction { element, lip } => format!(
            "element `{}` has Lipschitz bound {} >= 1",
            sys.module().name(*element),
            format_rational(lip)
        ),
        Blocking::Cycle { elements, product } => format!(
            "cycle [{}] has product {} >= 1 and reaches positive diameters",
            names(sys, elements),
            format_rational(product)
        ),
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapJson {
    pub matrix: Vec<Vec<String>>,
    pub offset: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BboxJson {
    pub lo: Vec<String>,
    pub hi: Vec<String>,
}

/// An iterated function system of affine contractions.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct IfsJson {
    pub dim: usize,
    pub maps: Vec<MapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bbox: Option<BboxJson>,
}

impl IfsJson {
    pub fn to_ifs(&self) -> Result<Ifs> {
        let mut maps = Vec::new();
        for m in &self.maps {
            let matrix = m.matrix.iter().map(|r| rationals(r)).collect::<Result<Vec<_>>>()?;
            let map = RationalAffineMap::new(matrix, rationals(&m.offset)?)?;
            if map.d_in() != self.dim || map.d_out() != self.dim {
                return Err(Error::Input(format!("maps must be {0}×{0}", self.dim)));
            }
            let mut c = Contraction::new(map);
            if let Some(l) = &m.lambda {
                c.lipschitz = Some(parse_rational(l)?);
            }
            maps.push(c);
        }
        let bbox = match &self.bbox {
            Some(b) => Some(Bbox {
                lo: rationals(&b.lo)?,
                hi: rationals(&b.hi)?,
            }),
            None => None,
        };
        Ifs::new(self.dim, maps, bbox)
    }

    pub fn from_ifs(ifs: &Ifs) -> Self {
        IfsJson {
            dim: ifs.dim,
            maps: ifs
                .maps
                .iter()
                .map(|c| MapJson {
                    matrix: c.map.matrix.iter().map(|r| strings(r)).collect(),
                    offset: strings(&c.map.offset),
                    lambda: c.lipschitz.as_ref().map(format_rational),
                })
                .collect(),
            bbox: ifs.bbox.as_ref().map(|b| BboxJson {
                lo: strings(&b.lo),
                hi: strings(&b.hi),
            }),
        }
    }
}

/// A finite ground space with either explicit cover levels or a basis.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CoverJson {
    pub points: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metric: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub levels: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<String>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth: Option<usize>,
}

impl CoverJson {
    fn point_set(&self, labels: &[String]) -> Result<PointSet> {
        labels
            .iter()
            .map(|l| {
                self.points
                    .iter()
                    .position(|p| p == l)
                    .ok_or_else(|| Error::UnknownName(l.clone()))
            })
            .collect()
    }

    pub fn space(&self) -> Result<GroundSpace> {
        let metric = match &self.metric {
            Some(rows) => Some(rows.iter().map(|r| rationals(r)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        GroundSpace::new(self.points.clone(), metric)
    }

    /// The cover sequence and the depth to build to.
    pub fn covers(&self, space: &GroundSpace) -> Result<(CoverSequence, usize)> {
        match (&self.levels, &self.basis) {
            (Some(levels), None) => {
                let levels = levels
                    .iter()
                    .map(|l| l.iter().map(|s| self.point_set(s)).collect::<Result<Vec<_>>>())
                    .collect::<Result<Vec<_>>>()?;
                let cov = CoverSequence::new(levels);
                let depth = self.depth.unwrap_or(cov.depth());
                Ok((cov, depth))
            }
            (None, Some(basis)) => {
                let basis = basis.iter().map(|s| self.point_set(s)).collect::<Result<Vec<_>>>()?;
                let depth = self.depth.unwrap_or(basis.len());
                Ok((selfsim_core::cover::covers_from_basis(space, &basis, depth), depth))
            }
            _ => Err(Error::Input("give exactly one of `levels` and `basis`".into())),
        }
    }
}

/// The correspondence written next to a binarized system.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorphismLogJson {
    /// Original object ↦ binarized object `(a, k(a))`.
    pub object_map: BTreeMap<String, String>,
    /// Original element ↦ its run in the binarized system.
    pub expansion: BTreeMap<String, Vec<String>>,
    pub notes: Vec<String>,
}

impl MorphismLogJson {
    pub fn new(orig: &SystemDef, bin: &SystemDef, log: &SystemMorphismLog) -> Self {
        let (oc, bc) = (orig.category(), bin.category());
        MorphismLogJson {
            object_map: oc
                .objects()
                .map(|a| (oc.object_name(a).to_string(), bc.object_name(log.object_map[a.0]).to_string()))
                .collect(),
            expansion: orig
                .module()
                .ids()
                .map(|m| {
                    let run = log.expansion[m.0].iter().map(|&e| bin.module().name(e).to_string()).collect();
                    (orig.module().name(m).to_string(), run)
                })
                .collect(),
            notes: log.notes.clone(),
        }
    }
}

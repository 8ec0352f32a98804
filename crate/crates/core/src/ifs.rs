//! Rational affine iterated function systems: exact fixed points, outer
//! cell covers of the attractor, overlap verdicts, and compilation into a
//! two-object self-similarity system.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::affine::RationalAffineMap;
use crate::category::{CategoryBuilder, ObjId};
use crate::module::{ModuleBuilder, SystemDef};
use crate::rational::{int, sqrt_upper, Rational};
use crate::recognition::MetricAnnotation;
use crate::unionfind::UnionFind;
use crate::{Error, Result};

/// Grid bits used when a derived Lipschitz bound is irrational.
const SQRT_BITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub map: RationalAffineMap,
    /// User-supplied Lipschitz bound; derived from the matrix when absent.
    pub lipschitz: Option<Rational>,
}

impl Contraction {
    pub fn new(map: RationalAffineMap) -> Self {
        Contraction { map, lipschitz: None }
    }

    /// The supplied bound, or `min(‖A‖_F, sqrt(‖A‖₁‖A‖_∞))` rounded up to
    /// a dyadic rational.
    pub fn lambda(&self) -> Rational {
        if let Some(l) = &self.lipschitz {
            return l.clone();
        }
        derived_lipschitz(&self.map)
    }
}

pub fn derived_lipschitz(map: &RationalAffineMap) -> Rational {
    let frob = sqrt_upper(&map.frobenius_sq(), SQRT_BITS);
    let (one, inf) = map.one_and_inf_norms();
    let mixed = sqrt_upper(&(one * inf), SQRT_BITS);
    frob.min(mixed)
}

/// Solves `(I − A) x = b`.
pub fn fixed_point(c: &Contraction) -> Result<Vec<Rational>> {
    c.map
        .fixed_point()
        .ok_or_else(|| Error::Input("I − A is singular; the map has no unique fixed point".into()))
}

/// A closed axis-aligned box.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Bbox {
    pub lo: Vec<Rational>,
    pub hi: Vec<Rational>,
}

impl Bbox {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn corners(&self) -> Vec<Vec<Rational>> {
        let d = self.dim();
        (0..1usize << d)
            .map(|bits| {
                (0..d)
                    .map(|a| if bits >> a & 1 == 1 { self.hi[a].clone() } else { self.lo[a].clone() })
                    .collect()
            })
            .collect()
    }

    pub fn contains_box(&self, other: &Bbox) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= other.lo[a] && other.hi[a] <= self.hi[a])
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        (0..self.dim()).all(|a| self.lo[a] <= p[a] && p[a] <= self.hi[a])
    }

    /// Smallest box holding the points.
    pub fn hull(points: &[Vec<Rational>]) -> Bbox {
        let d = points[0].len();
        let lo = (0..d).map(|a| points.iter().map(|p| p[a].clone()).min().unwrap()).collect();
        let hi = (0..d).map(|a| points.iter().map(|p| p[a].clone()).max().unwrap()).collect();
        Bbox { lo, hi }
    }

    pub fn image(&self, map: &RationalAffineMap) -> Bbox {
        let pts: Vec<Vec<Rational>> = self.corners().iter().map(|c| map.apply(c)).collect();
        Bbox::hull(&pts)
    }

    fn intersect(&self, other: &Bbox) -> Option<Bbox> {
        let lo: Vec<Rational> = (0..self.dim()).map(|a| self.lo[a].clone().max(other.lo[a].clone())).collect();
        let hi: Vec<Rational> = (0..self.dim()).map(|a| self.hi[a].clone().min(other.hi[a].clone())).collect();
        (0..self.dim()).all(|a| lo[a] <= hi[a]).then_some(Bbox { lo, hi })
    }

    /// `Σ (hi − lo)²`.
    pub fn squared_diagonal(&self) -> Rational {
        (0..self.dim()).fold(Rational::zero(), |acc, a| {
            let w = &self.hi[a] - &self.lo[a];
            acc + &w * &w
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ifs {
    pub dim: usize,
    pub maps: Vec<Contraction>,
    /// A box mapped into itself by every map; computed when absent.
    pub bbox: Option<Bbox>,
}

impl Ifs {
    /// Checks dimensions and that every Lipschitz bound is below 1.
    pub fn new(dim: usize, maps: Vec<Contraction>, bbox: Option<Bbox>) -> Result<Self> {
        if maps.is_empty() {
            return Err(Error::Input("an IFS needs at least one map".into()));
        }
        for (i, c) in maps.iter().enumerate() {
            if c.map.d_in() != dim || c.map.d_out() != dim {
                return Err(Error::Input(format!("map {i} is not a map of R^{dim}")));
            }
            let l = c.lambda();
            if l.is_negative() || l >= Rational::one() {
                return Err(Error::Input(format!("map {i} has Lipschitz bound {l}, not below 1")));
            }
        }
        if let Some(b) = &bbox {
            if b.dim() != dim || (0..dim).any(|a| b.lo[a] > b.hi[a]) {
                return Err(Error::Input("malformed bounding box".into()));
            }
        }
        Ok(Ifs { dim, maps, bbox })
    }

    /// Scalings by ½ towards `0, e₁, …, e_d` in `ℝ^d`.
    pub fn sierpinski(d: usize) -> Self {
        let half = Rational::new(1.into(), 2.into());
        let maps = (0..=d)
            .map(|i| {
                let mut t = vec![Rational::zero(); d];
                if i > 0 {
                    t[i - 1] = half.clone();
                }
                Contraction::new(RationalAffineMap::similarity(half.clone(), t))
            })
            .collect();
        Ifs::new(d, maps, None).expect("valid")
    }

    pub fn lambdas(&self) -> Vec<Rational> {
        self.maps.iter().map(Contraction::lambda).collect()
    }

    pub fn fixed_points(&self) -> Result<Vec<Vec<Rational>>> {
        self.maps.iter().map(fixed_point).collect()
    }

    fn is_invariant(&self, b: &Bbox) -> bool {
        self.maps.iter().all(|c| b.contains_box(&b.image(&c.map)))
    }

    /// The supplied box after an invariance check; otherwise the hull of the
    /// fixed points if invariant, otherwise an `∞`-norm ball around their
    /// centroid.
    pub fn bounding_box(&self) -> Result<Bbox> {
        if let Some(b) = &self.bbox {
            return if self.is_invariant(b) {
                Ok(b.clone())
            } else {
                Err(Error::Input("the supplied bounding box is not mapped into itself".into()))
            };
        }
        let fps = self.fixed_points()?;
        let hull = Bbox::hull(&fps);
        if self.is_invariant(&hull) {
            return Ok(hull);
        }
        let n = Rational::from_integer((fps.len() as i64).into());
        let c: Vec<Rational> = (0..self.dim)
            .map(|a| fps.iter().fold(Rational::zero(), |acc, p| acc + &p[a]) / &n)
            .collect();
        let mut r = Rational::zero();
        for m in &self.maps {
            let (_, inf) = m.map.one_and_inf_norms();
            if inf >= Rational::one() {
                return Err(Error::Input(
                    "cannot derive an invariant box; supply one with `bbox`".into(),
                ));
            }
            let moved = m.map.apply(&c);
            let shift = (0..self.dim).map(|a| (&moved[a] - &c[a]).abs()).max().unwrap_or_else(Rational::zero);
            let need = shift / (Rational::one() - inf);
            if need > r {
                r = need;
            }
        }
        let b = Bbox {
            lo: c.iter().map(|x| x - &r).collect(),
            hi: c.iter().map(|x| x + &r).collect(),
        };
        debug_assert!(self.is_invariant(&b));
        Ok(b)
    }
}

/// The dyadic grid of level `k` on a box; degenerate axes get one cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Grid {
    pub bbox: Bbox,
    pub level: u32,
}

pub type CellIndex = Vec<u64>;

impl Grid {
    pub fn cells_per_axis(&self, a: usize) -> u64 {
        if self.bbox.lo[a] == self.bbox.hi[a] {
            1
        } else {
            1 << self.level
        }
    }

    fn width(&self, a: usize) -> Rational {
        (&self.bbox.hi[a] - &self.bbox.lo[a]) / Rational::from_integer(self.cells_per_axis(a).into())
    }

    pub fn cell_box(&self, c: &[u64]) -> Bbox {
        let d = self.bbox.dim();
        let mut lo = Vec::with_capacity(d);
        let mut hi = Vec::with_capacity(d);
        for a in 0..d {
            let w = self.width(a);
            let i = Rational::from_integer(c[a].into());
            lo.push(&self.bbox.lo[a] + &w * &i);
            hi.push(&self.bbox.lo[a] + &w * (i + Rational::one()));
        }
        Bbox { lo, hi }
    }

    /// Index ranges of the cells covering `b`: open overlap along axes where
    /// `b` has positive width, closed containment along degenerate ones.
    fn covering_ranges(&self, b: &Bbox) -> Vec<(u64, u64)> {
        (0..b.dim())
            .map(|a| {
                let n = self.cells_per_axis(a);
                if n == 1 {
                    return (0, 0);
                }
                let w = self.width(a);
                let t_lo = (&b.lo[a] - &self.bbox.lo[a]) / &w;
                let t_hi = (&b.hi[a] - &self.bbox.lo[a]) / &w;
                let (lo, hi) = if b.lo[a] == b.hi[a] {
                    (t_lo.ceil().to_integer() - 1, t_lo.floor().to_integer())
                } else {
                    (t_lo.floor().to_integer(), t_hi.ceil().to_integer() - 1)
                };
                let clamp = |x: BigInt| -> u64 {
                    if x.is_negative() {
                        0
                    } else {
                        u64::try_from(x).map_or(n - 1, |v| v.min(n - 1))
                    }
                };
                (clamp(lo), clamp(hi))
            })
            .collect()
    }

    pub fn cells_covering(&self, b: &Bbox, out: &mut BTreeSet<CellIndex>) {
        let ranges = self.covering_ranges(b);
        let mut cur: CellIndex = ranges.iter().map(|r| r.0).collect();
        if ranges.iter().any(|r| r.0 > r.1) {
            return;
        }
        loop {
            out.insert(cur.clone());
            let mut a = 0;
            loop {
                if a == cur.len() {
                    return;
                }
                if cur[a] < ranges[a].1 {
                    cur[a] += 1;
                    break;
                }
                cur[a] = ranges[a].0;
                a += 1;
            }
        }
    }
}

/// Outer cell covers `C_0, …, C_k` of the attractor: `C_0` is the bounding
/// box and `C_{j+1}` holds the level-`j+1` cells covering `ψ_i(c)` for
/// `c ∈ C_j`.
pub fn cell_covers(ifs: &Ifs, depth: u32) -> Result<Vec<BTreeSet<CellIndex>>> {
    let bbox = ifs.bounding_box()?;
    let mut covers = vec![[vec![0u64; ifs.dim]].into_iter().collect::<BTreeSet<_>>()];
    for level in 1..=depth {
        let prev = Grid {
            bbox: bbox.clone(),
            level: level - 1,
        };
        let grid = Grid {
            bbox: bbox.clone(),
            level,
        };
        let mut next = BTreeSet::new();
        for c in covers.last().unwrap() {
            let cell = prev.cell_box(c);
            for m in &ifs.maps {
                grid.cells_covering(&cell.image(&m.map), &mut next);
            }
        }
        covers.push(next);
    }
    Ok(covers)
}

/// Per-map covers of `ψ_i S` at level `depth ≥ 1`.
pub fn image_covers(ifs: &Ifs, depth: u32) -> Result<(Grid, Vec<BTreeSet<CellIndex>>)> {
    if depth == 0 {
        return Err(Error::Input("depth must be at least 1".into()));
    }
    let covers = cell_covers(ifs, depth - 1)?;
    let bbox = ifs.bounding_box()?;
    let prev = Grid {
        bbox: bbox.clone(),
        level: depth - 1,
    };
    let grid = Grid { bbox, level: depth };
    let per_map = ifs
        .maps
        .iter()
        .map(|m| {
            let mut out = BTreeSet::new();
            for c in covers.last().unwrap() {
                grid.cells_covering(&prev.cell_box(c).image(&m.map), &mut out);
            }
            out
        })
        .collect();
    Ok((grid, per_map))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OverlapVerdict {
    Disjoint,
    /// Every contact region shrinks to at most two cells per axis around
    /// one of these points `ψ_i s_a = ψ_j s_b`.
    PointOnly(Vec<Vec<Rational>>),
    /// Some contact region is larger or misses the predicted points.
    Unresolved { components: usize, contact_cells: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairOverlap {
    pub i: usize,
    pub j: usize,
    pub verdict: OverlapVerdict,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OverlapReport {
    pub depth: u32,
    pub pairs: Vec<PairOverlap>,
}

impl OverlapReport {
    pub fn point_only(&self) -> bool {
        self.pairs
            .iter()
            .all(|p| !matches!(p.verdict, OverlapVerdict::Unresolved { .. }))
    }
}

fn neighbours(c: &[u64]) -> Vec<CellIndex> {
    let mut out = vec![c.to_vec()];
    for a in 0..c.len() {
        let mut next = Vec::new();
        for v in &out {
            for delta in [-1i64, 1] {
                let x = v[a] as i64 + delta;
                if x >= 0 {
                    let mut w = v.clone();
                    w[a] = x as u64;
                    next.push(w);
                }
            }
        }
        out.extend(next);
    }
    out
}

/// Pairwise contact analysis of the per-map covers at level `depth`.
pub fn overlap_report(ifs: &Ifs, depth: u32) -> Result<OverlapReport> {
    let fps = ifs.fixed_points()?;
    let (grid, covers) = image_covers(ifs, depth)?;
    let images: Vec<Vec<Vec<Rational>>> = ifs
        .maps
        .iter()
        .map(|m| fps.iter().map(|s| m.map.apply(s)).collect())
        .collect();
    let mut pairs = Vec::new();
    for i in 0..ifs.maps.len() {
        for j in i + 1..ifs.maps.len() {
            let predicted: Vec<Vec<Rational>> = images[i]
                .iter()
                .filter(|p| images[j].contains(p))
                .cloned()
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect();
            let mut pieces: Vec<Bbox> = Vec::new();
            let mut touched = BTreeSet::new();
            for a in &covers[i] {
                let abox = grid.cell_box(a);
                for b in neighbours(a) {
                    if covers[j].contains(&b) {
                        if let Some(p) = abox.intersect(&grid.cell_box(&b)) {
                            pieces.push(p);
                            touched.insert(a.clone());
                            touched.insert(b);
                        }
                    }
                }
            }
            let verdict = if pieces.is_empty() {
                OverlapVerdict::Disjoint
            } else {
                let mut uf = UnionFind::new(pieces.len());
                for x in 0..pieces.len() {
                    for y in x + 1..pieces.len() {
                        if pieces[x].intersect(&pieces[y]).is_some() {
                            uf.union(x, y);
                        }
                    }
                }
                let mut comps: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
                for x in 0..pieces.len() {
                    comps.entry(uf.find(x)).or_default().push(x);
                }
                let two_cells: Vec<Rational> = (0..ifs.dim).map(|a| grid.width(a) * int(2)).collect();
                let small = comps.values().all(|members| {
                    let corners: Vec<Vec<Rational>> = members
                        .iter()
                        .flat_map(|&x| [pieces[x].lo.clone(), pieces[x].hi.clone()])
                        .collect();
                    let hull = Bbox::hull(&corners);
                    (0..ifs.dim).all(|a| &hull.hi[a] - &hull.lo[a] <= two_cells[a])
                        && predicted
                            .iter()
                            .any(|p| members.iter().any(|&x| pieces[x].contains(p)))
                });
                if small {
                    OverlapVerdict::PointOnly(predicted)
                } else {
                    OverlapVerdict::Unresolved {
                        components: comps.len(),
                        contact_cells: touched.len(),
                    }
                }
            };
            pairs.push(PairOverlap { i, j, verdict });
        }
    }
    Ok(OverlapReport { depth, pairs })
}

/// The compiled system with its annotation. Object `0` is the point and
/// object `1` the attractor; element `[i,j]: 0 ⇸ 1` names the point
/// `ψ_i s_j`, element `m{i}: 1 ⇸ 1` the map `ψ_i`.
#[derive(Clone, Debug)]
pub struct CompiledIfs {
    pub system: SystemDef,
    pub annotation: MetricAnnotation,
    pub fixed_points: Vec<Vec<Rational>>,
    /// Each `0 ⇸ 1` element's pairs `(i, j)` and their common point.
    pub classes: Vec<(Vec<(usize, usize)>, Vec<Rational>)>,
}

pub fn compile_system(ifs: &Ifs, report: &OverlapReport) -> Result<CompiledIfs> {
    for (i, c) in ifs.maps.iter().enumerate() {
        if !c.map.is_injective() {
            return Err(Error::Structural(format!("refused: map {i} is not injective")));
        }
    }
    let fps = ifs.fixed_points()?;
    for i in 0..fps.len() {
        for j in i + 1..fps.len() {
            if fps[i] == fps[j] {
                return Err(Error::Structural(format!("refused: maps {i} and {j} share a fixed point")));
            }
        }
    }
    if let Some(p) = report
        .pairs
        .iter()
        .find(|p| matches!(p.verdict, OverlapVerdict::Unresolved { .. }))
    {
        return Err(Error::Structural(format!(
            "refused: overlap of maps {} and {} is not resolved to points at depth {}",
            p.i, p.j, report.depth
        )));
    }
    let n = ifs.maps.len();
    let mut by_point: BTreeMap<Vec<Rational>, Vec<(usize, usize)>> = BTreeMap::new();
    let mut class_of = BTreeMap::new();
    for i in 0..n {
        for j in 0..n {
            by_point.entry(ifs.maps[i].map.apply(&fps[j])).or_default().push((i, j));
        }
    }
    let mut classes: Vec<(Vec<(usize, usize)>, Vec<Rational>)> =
        by_point.into_iter().map(|(p, pairs)| (pairs, p)).collect();
    classes.sort();
    for (k, (pairs, _)) in classes.iter().enumerate() {
        for &pq in pairs {
            class_of.insert(pq, k);
        }
    }

    let mut b = CategoryBuilder::new();
    let o0 = b.object("0");
    let o1 = b.object("1");
    let sigmas: Vec<_> = (0..n).map(|i| b.arrow(format!("sigma{i}"), o0, o1)).collect();
    let category = b.build()?;
    let mut mb = ModuleBuilder::new();
    let pt = mb.element("pt", o0, o0);
    let points: Vec<_> = classes
        .iter()
        .map(|(pairs, _)| mb.element(format!("[{},{}]", pairs[0].0, pairs[0].1), o0, o1))
        .collect();
    let loops: Vec<_> = (0..n).map(|i| mb.element(format!("m{i}"), o1, o1)).collect();
    for (i, &s) in sigmas.iter().enumerate() {
        mb.lact(s, pt, points[class_of[&(i, i)]]);
        for (k, &m) in loops.iter().enumerate() {
            mb.ract(m, s, points[class_of[&(k, i)]]);
        }
    }
    let module = mb.build(&category)?;
    let system = SystemDef::new(category, module)?;

    let mut annotation = MetricAnnotation::unset(&system);
    annotation.set_diam(ObjId(0), Rational::zero());
    annotation.set_diam(ObjId(1), sqrt_upper(&ifs.bounding_box()?.squared_diagonal(), SQRT_BITS));
    annotation.set_lip(pt, Rational::zero());
    for &p in &points {
        annotation.set_lip(p, Rational::zero());
    }
    for (i, &m) in loops.iter().enumerate() {
        annotation.set_lip(m, ifs.maps[i].lambda());
    }
    Ok(CompiledIfs {
        system,
        annotation,
        fixed_points: fps,
        classes,
    })
}

/// A row-major bitmap; row 0 is the top edge (largest `y`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<bool>,
}

impl Raster {
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.pixels[y * self.width + x]
    }

    pub fn count(&self) -> usize {
        self.pixels.iter().filter(|p| **p).count()
    }

    /// Halves the resolution; a pixel is set when any of its children is.
    pub fn downsample(&self) -> Raster {
        let width = self.width.div_ceil(2);
        let height = self.height.div_ceil(2);
        let mut pixels = vec![false; width * height];
        for y in 0..self.height {
            for x in 0..self.width {
                if self.get(x, y) {
                    pixels[(y / 2) * width + x / 2] = true;
                }
            }
        }
        Raster { width, height, pixels }
    }
}

/// The level-`depth` cover of a planar IFS as a bitmap.
pub fn rasterize(ifs: &Ifs, depth: u32) -> Result<Raster> {
    if ifs.dim != 2 {
        return Err(Error::Unsupported("rasterization needs a planar IFS".into()));
    }
    let bbox = ifs.bounding_box()?;
    let grid = Grid { bbox, level: depth };
    let width = grid.cells_per_axis(0) as usize;
    let height = grid.cells_per_axis(1) as usize;
    let covers = cell_covers(ifs, depth)?;
    let mut pixels = vec![false; width * height];
    for c in covers.last().unwrap() {
        let (x, y) = (c[0] as usize, c[1] as usize);
        pixels[(height - 1 - y) * width + x] = true;
    }
    Ok(Raster { width, height, pixels })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn interval() -> Ifs {
        let half = rat(1, 2);
        Ifs::new(
            1,
            vec![
                Contraction::new(RationalAffineMap::similarity(half.clone(), vec![int(0)])),
                Contraction::new(RationalAffineMap::similarity(half.clone(), vec![half])),
            ],
            None,
        )
        .unwrap()
    }

    #[test]
    fn fixed_points_of_interval_maps() {
        assert_eq!(interval().fixed_points().unwrap(), vec![vec![int(0)], vec![int(1)]]);
    }

    #[test]
    fn sierpinski_lambda_is_exactly_half() {
        assert_eq!(Ifs::sierpinski(2).lambdas(), vec![rat(1, 2); 3]);
    }

    #[test]
    fn sierpinski_cover_counts() {
        let covers = cell_covers(&Ifs::sierpinski(2), 6).unwrap();
        for (k, c) in covers.iter().enumerate() {
            assert_eq!(c.len(), 3usize.pow(k as u32));
        }
    }

    #[test]
    fn interval_compiles_to_the_freyd_gluing() {
        let ifs = interval();
        let report = overlap_report(&ifs, 6).unwrap();
        assert!(report.point_only());
        let c = compile_system(&ifs, &report).unwrap();
        let module = c.system.module();
        assert_eq!(module.elements_between(ObjId(0), ObjId(1)).len(), 3);
        assert_eq!(module.elements_between(ObjId(1), ObjId(1)).len(), 2);
    }

    #[test]
    fn equal_fixed_points_are_refused() {
        let half = rat(1, 2);
        let m = Contraction::new(RationalAffineMap::similarity(half, vec![int(0)]));
        let ifs = Ifs::new(1, vec![m.clone(), m], None).unwrap();
        let report = overlap_report(&ifs, 2).unwrap();
        assert!(compile_system(&ifs, &report).is_err());
    }
}

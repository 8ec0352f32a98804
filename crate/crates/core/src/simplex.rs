//! Barycentric and edgewise subdivision as self-similarity systems over
//! the category of finite ordinals and order-preserving injections.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_traits::{One, Signed, Zero};

use crate::affine::{squared_distance, RationalAffineMap};
use crate::category::{ArrowId, CategoryBuilder, FinSetFunctor, FiniteCategory, ObjId};
use crate::module::{ElemId, ModuleBuilder, SystemDef};
use crate::rational::{format_rational, Rational};
use crate::{Error, Result};

/// Objects `⟨0⟩ … ⟨N⟩` (object `⟨n⟩` has id `n`) with every order-preserving
/// injection as an arrow.
#[derive(Clone, Debug)]
pub struct FaceCategory {
    pub category: FiniteCategory,
    images: Vec<Vec<usize>>,
    lookup: BTreeMap<(usize, Vec<usize>), ArrowId>,
}

/// Increasing sequences of length `k` in `0..n`, lexicographic.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            if n - i < k - cur.len() {
                break;
            }
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    go(0, n, k, &mut cur, &mut out);
    out
}

fn join_usize(v: &[usize]) -> String {
    v.iter().map(|i| format!("{i}")).collect::<Vec<_>>().join(",")
}

impl FaceCategory {
    pub fn new(top: usize) -> Self {
        let mut b = CategoryBuilder::new();
        for n in 0..=top {
            b.object(format!("<{n}>"));
        }
        let mut images = Vec::new();
        let mut lookup = BTreeMap::new();
        let mut pending = Vec::new();
        for m in 0..=top {
            for n in 0..=m {
                for img in combinations(m + 1, n + 1) {
                    let id = if n == m {
                        b.identity(ObjId(m))
                    } else {
                        b.arrow(format!("d{m}[{}]", join_usize(&img)), ObjId(n), ObjId(m))
                    };
                    pending.push((id, img.clone()));
                    lookup.insert((m, img), id);
                }
            }
        }
        pending.sort();
        for (id, img) in pending {
            debug_assert_eq!(id.0, images.len());
            images.push(img);
        }
        for (&(k, ref g), &gid) in &lookup {
            let m = g.len() - 1;
            for (&(m2, ref f), &fid) in &lookup {
                if m2 != m {
                    continue;
                }
                let h: Vec<usize> = f.iter().map(|&i| g[i]).collect();
                b.compose(gid, fid, lookup[&(k, h)]);
            }
        }
        FaceCategory {
            category: b.build_unchecked(),
            images,
            lookup,
        }
    }

    pub fn top(&self) -> usize {
        self.category.object_count() - 1
    }

    pub fn image(&self, f: ArrowId) -> &[usize] {
        &self.images[f.0]
    }

    /// The arrow `⟨n⟩ → ⟨m⟩` with the given image.
    pub fn arrow_for(&self, m: usize, image: &[usize]) -> Option<ArrowId> {
        self.lookup.get(&(m, image.to_vec())).copied()
    }

    /// `f_*`: the linear map `ℝ^{n+1} → ℝ^{m+1}`, `e_i ↦ e_{f(i)}`.
    pub fn push_forward(&self, f: ArrowId) -> RationalAffineMap {
        let img = self.image(f);
        let m = self.category.dst(f).0;
        inclusion_map(img, m)
    }
}

fn inclusion_map(img: &[usize], m: usize) -> RationalAffineMap {
    let matrix = (0..=m)
        .map(|r| {
            img.iter()
                .map(|&c| if c == r { Rational::one() } else { Rational::zero() })
                .collect()
        })
        .collect();
    RationalAffineMap::linear(matrix).expect("rectangular")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Scheme {
    Barycentric,
    Edgewise,
}

/// A module element: a strict chain `Q(0) ⊂ ⋯ ⊂ Q(n)` of nonempty subsets
/// (bitmasks), or an injection `j ↦ (p(j), q(j))` with `p(n) ≤ q(0)`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Cell {
    Bary(Vec<u32>),
    Edge(Vec<(usize, usize)>),
}

fn mask_members(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask & (1 << i) != 0).collect()
}

fn mask_image(mask: u32, f: &[usize]) -> u32 {
    mask_members(mask).into_iter().fold(0, |acc, i| acc | (1 << f[i]))
}

fn mask_digits(mask: u32) -> String {
    join_usize(&mask_members(mask))
}

impl Cell {
    pub fn len(&self) -> usize {
        match self {
            Cell::Bary(q) => q.len(),
            Cell::Edge(pq) => pq.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn name(&self, m: usize) -> String {
        match self {
            Cell::Bary(q) => {
                let parts: Vec<String> = q.iter().map(|&s| mask_digits(s)).collect();
                format!("Q{m}[{}]", parts.join("|"))
            }
            Cell::Edge(pq) => {
                let parts: Vec<String> = pq.iter().map(|(p, q)| format!("({p},{q})")).collect();
                format!("E{m}[{}]", parts.concat())
            }
        }
    }

    fn post(&self, f: &[usize]) -> Cell {
        match self {
            Cell::Bary(q) => Cell::Bary(q.iter().map(|&s| mask_image(s, f)).collect()),
            Cell::Edge(pq) => Cell::Edge(pq.iter().map(|&(p, q)| (f[p], f[q])).collect()),
        }
    }

    fn pre(&self, g: &[usize]) -> Cell {
        match self {
            Cell::Bary(q) => Cell::Bary(g.iter().map(|&j| q[j]).collect()),
            Cell::Edge(pq) => Cell::Edge(g.iter().map(|&j| pq[j]).collect()),
        }
    }

    /// Images of the vertices `e_j`, in `ℝ^{m+1}`.
    pub fn vertex_images(&self, m: usize) -> Vec<Vec<Rational>> {
        match self {
            Cell::Bary(q) => q.iter().map(|&s| centroid(s, m)).collect(),
            Cell::Edge(pq) => pq
                .iter()
                .map(|&(p, q)| {
                    let mut v = vec![Rational::zero(); m + 1];
                    let half = Rational::new(1.into(), 2.into());
                    v[p] += &half;
                    v[q] += &half;
                    v
                })
                .collect(),
        }
    }

    /// The linear map `ℝ^{n+1} → ℝ^{m+1}` sending `e_j` to the j-th vertex
    /// image.
    pub fn affine(&self, m: usize) -> RationalAffineMap {
        let cols = self.vertex_images(m);
        let matrix = (0..=m).map(|r| cols.iter().map(|c| c[r].clone()).collect()).collect();
        RationalAffineMap::linear(matrix).expect("rectangular")
    }
}

fn centroid(mask: u32, m: usize) -> Vec<Rational> {
    let members = mask_members(mask);
    let w = Rational::new(1.into(), (members.len() as i64).into());
    let mut v = vec![Rational::zero(); m + 1];
    for i in members {
        v[i] = w.clone();
    }
    v
}

fn bary_cells(n: usize, m: usize) -> Vec<Cell> {
    fn go(full: u32, prev: u32, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Cell>) {
        if left == 0 {
            out.push(Cell::Bary(cur.clone()));
            return;
        }
        for s in (prev + 1)..=full {
            if s & prev == prev && s != prev && s & !full == 0 {
                cur.push(s);
                go(full, s, left - 1, cur, out);
                cur.pop();
            }
        }
    }
    let mut out = Vec::new();
    go((1u32 << (m + 1)) - 1, 0, n + 1, &mut Vec::new(), &mut out);
    out
}

fn edge_cells(n: usize, m: usize) -> Vec<Cell> {
    fn go(m: usize, left: usize, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Cell>) {
        if left == 0 {
            if cur[cur.len() - 1].0 <= cur[0].1 {
                out.push(Cell::Edge(cur.clone()));
            }
            return;
        }
        let (p0, q0) = cur.last().copied().unwrap_or((0, 0));
        for p in p0..=m {
            for q in q0..=m {
                if cur.is_empty() || (p, q) != (p0, q0) {
                    cur.push((p, q));
                    go(m, left - 1, cur, out);
                    cur.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(m, n + 1, &mut Vec::new(), &mut out);
    out
}

/// A subdivision system truncated at `⟨N⟩`, with the cell behind every
/// module element.
#[derive(Clone, Debug)]
pub struct SubdivisionSystem {
    pub scheme: Scheme,
    pub face: FaceCategory,
    pub system: SystemDef,
    cells: Vec<Cell>,
    index: BTreeMap<(usize, Cell), ElemId>,
}

impl SubdivisionSystem {
    pub fn cell(&self, m: ElemId) -> &Cell {
        &self.cells[m.0]
    }

    pub fn element_for(&self, m: usize, cell: &Cell) -> Option<ElemId> {
        self.index.get(&(m, cell.clone())).copied()
    }

    /// The affine realization `ψ_m` of a module element.
    pub fn psi(&self, e: ElemId) -> RationalAffineMap {
        let m = self.system.module().dst(e).0;
        self.cells[e.0].affine(m)
    }

    /// Checks `ψ_{f·Q·g} = f_* ∘ ψ_Q ∘ g_*` for every element and every pair
    /// of arrows; returns the first failing triple.
    pub fn check_psi_laws(&self) -> Option<(ArrowId, ElemId, ArrowId)> {
        let cat = &self.face.category;
        let module = self.system.module();
        for e in module.ids() {
            let psi = self.psi(e);
            for &f in cat.arrows_out_of(module.dst(e)) {
                let fpsi = self.face.push_forward(f).compose(&psi);
                let fe = module.left(f, e);
                for &g in cat.arrows_into(module.src(e)) {
                    let lhs = self.psi(module.right(fe, g));
                    if lhs != fpsi.compose(&self.face.push_forward(g)) {
                        return Some((f, e, g));
                    }
                }
            }
        }
        None
    }

    /// Top cells `M(⟨m⟩, ⟨m⟩)`.
    pub fn top_cells(&self, m: usize) -> Vec<ElemId> {
        self.system.module().elements_between(ObjId(m), ObjId(m))
    }
}

fn build(scheme: Scheme, top: usize) -> SubdivisionSystem {
    assert!(top < 31, "subsets are stored as 32-bit masks");
    let face = FaceCategory::new(top);
    let cat = &face.category;
    let mut mb = ModuleBuilder::new();
    let mut cells = Vec::new();
    let mut dsts = Vec::new();
    let mut index = BTreeMap::new();
    for m in 0..=top {
        for n in 0..=m {
            let list = match scheme {
                Scheme::Barycentric => bary_cells(n, m),
                Scheme::Edgewise => edge_cells(n, m),
            };
            for c in list {
                let id = mb.element(c.name(m), ObjId(n), ObjId(m));
                index.insert((m, c.clone()), id);
                cells.push(c);
                dsts.push(m);
            }
        }
    }
    for (i, c) in cells.iter().enumerate() {
        let e = ElemId(i);
        let (n, m) = (c.len() - 1, dsts[i]);
        for &f in cat.arrows_out_of(ObjId(m)) {
            let k = cat.dst(f).0;
            mb.lact(f, e, index[&(k, c.post(face.image(f)))]);
        }
        for &g in cat.arrows_into(ObjId(n)) {
            mb.ract(e, g, index[&(m, c.pre(face.image(g)))]);
        }
    }
    let module = mb.build_unchecked(cat);
    let system = SystemDef::new(cat.clone(), module).expect("subdivision modules satisfy the action laws");
    SubdivisionSystem {
        scheme,
        face,
        system,
        cells,
        index,
    }
}

/// `M(⟨n⟩, ⟨m⟩)` = strict chains of nonempty subsets of `⟨m⟩` of length
/// `n + 1`; left action by direct image, right action by reindexing.
pub fn bary_module(top: usize) -> SubdivisionSystem {
    build(Scheme::Barycentric, top)
}

/// `M(⟨n⟩, ⟨m⟩)` = injections `(p, q): ⟨n⟩ → ⟨m⟩ × ⟨m⟩` with `p(n) ≤ q(0)`;
/// actions by post- and pre-composition.
pub fn edge_module(top: usize) -> SubdivisionSystem {
    build(Scheme::Edgewise, top)
}

/// `(n, Q, t)` with `ψ_Q(t) = σ` and every `t_j > 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PointDecomposition {
    pub n: usize,
    pub chain: Vec<u32>,
    pub t: Vec<Rational>,
}

impl PointDecomposition {
    pub fn evaluate(&self, m: usize) -> Vec<Rational> {
        Cell::Bary(self.chain.clone()).affine(m).apply(&self.t)
    }
}

fn check_simplex_point(sigma: &[Rational]) -> Result<()> {
    if sigma.is_empty() {
        return Err(Error::Input("empty coordinate vector".into()));
    }
    if sigma.iter().any(|s| s.is_negative()) {
        return Err(Error::Input("negative barycentric coordinate".into()));
    }
    let total = sigma.iter().fold(Rational::zero(), |a, s| a + s);
    if !total.is_one() {
        return Err(Error::Input(format!(
            "barycentric coordinates sum to {}, not 1",
            format_rational(&total)
        )));
    }
    Ok(())
}

/// Splits a point of `Δᵐ` by its distinct nonzero coordinate values
/// `κ₀ > ⋯ > κₙ`: `Q(j) = {i | σᵢ ≥ κⱼ}` and `τⱼ = (κⱼ − κⱼ₊₁)|Q(j)|`.
pub fn decompose_point(m: usize, sigma: &[Rational]) -> Result<PointDecomposition> {
    if sigma.len() != m + 1 {
        return Err(Error::Input(format!("expected {} coordinates, got {}", m + 1, sigma.len())));
    }
    check_simplex_point(sigma)?;
    let kappa: Vec<Rational> = sigma
        .iter()
        .filter(|s| !s.is_zero())
        .cloned()
        .collect::<BTreeSet<_>>()
        .into_iter()
        .rev()
        .collect();
    let n = kappa.len() - 1;
    let mut chain = Vec::with_capacity(n + 1);
    let mut t = Vec::with_capacity(n + 1);
    for j in 0..=n {
        let q = (0..=m).filter(|&i| sigma[i] >= kappa[j]).fold(0u32, |acc, i| acc | (1 << i));
        let next = kappa.get(j + 1).cloned().unwrap_or_else(Rational::zero);
        let size = Rational::from_integer((q.count_ones() as i64).into());
        t.push((&kappa[j] - next) * size);
        chain.push(q);
    }
    Ok(PointDecomposition { n, chain, t })
}

/// The canonical pair behind `(Q′, t′)` together with the injection `f`
/// selecting the nonzero coordinates of `t′`; `Q′ ∘ f = Q` and `f_* t = t′`.
pub fn canonical_form(m: usize, chain: &[u32], t: &[Rational]) -> Result<(PointDecomposition, Vec<usize>)> {
    if chain.len() != t.len() {
        return Err(Error::Input("chain and coordinates differ in length".into()));
    }
    check_simplex_point(t)?;
    let full = (1u32 << (m + 1)) - 1;
    if chain.first().is_some_and(|&q| q == 0)
        || chain.windows(2).any(|w| w[0] & w[1] != w[0] || w[0] == w[1])
        || chain.last().is_some_and(|&q| q & !full != 0)
    {
        return Err(Error::Input("not a strict chain of nonempty subsets".into()));
    }
    let sigma = Cell::Bary(chain.to_vec()).affine(m).apply(t);
    let d = decompose_point(m, &sigma)?;
    let f: Vec<usize> = (0..t.len()).filter(|&j| !t[j].is_zero()).collect();
    let restricted: Vec<u32> = f.iter().map(|&j| chain[j]).collect();
    let tf: Vec<Rational> = f.iter().map(|&j| t[j].clone()).collect();
    if restricted != d.chain || tf != d.t {
        return Err(Error::Structural("canonical form does not factor through the support".into()));
    }
    Ok((d, f))
}

/// Carriers `X⟨n⟩` holding every push-forward `g_* s` of the given interior
/// samples, with the face maps as action. Returns the functor and the
/// points behind each carrier index.
pub fn sampled_face_functor(
    face: &FaceCategory,
    samples: &[Vec<Vec<Rational>>],
) -> Result<(FinSetFunctor, Vec<Vec<Vec<Rational>>>)> {
    let cat = &face.category;
    let top = face.top();
    if samples.len() != top + 1 {
        return Err(Error::Input("one sample list per dimension is required".into()));
    }
    let mut carriers: Vec<BTreeSet<Vec<Rational>>> = vec![BTreeSet::new(); top + 1];
    for (k, pts) in samples.iter().enumerate() {
        for p in pts {
            if p.len() != k + 1 {
                return Err(Error::Input(format!("sample of dimension {k} has {} coordinates", p.len())));
            }
            check_simplex_point(p)?;
            for &g in cat.arrows_out_of(ObjId(k)) {
                carriers[cat.dst(g).0].insert(face.push_forward(g).apply(p));
            }
        }
    }
    let points: Vec<Vec<Vec<Rational>>> = carriers.into_iter().map(|s| s.into_iter().collect()).collect();
    let action = cat
        .arrow_ids()
        .map(|f| {
            let map = face.push_forward(f);
            let target = &points[cat.dst(f).0];
            points[cat.src(f).0]
                .iter()
                .map(|p| target.binary_search(&map.apply(p)).expect("carriers are closed"))
                .collect()
        })
        .collect();
    let labels = points
        .iter()
        .map(|c| c.iter().map(|p| format_point(p)).collect())
        .collect();
    Ok((FinSetFunctor::new(labels, action), points))
}

pub fn format_point(p: &[Rational]) -> String {
    let parts: Vec<String> = p.iter().map(format_rational).collect();
    format!("({})", parts.join(","))
}

/// A simplicial complex with exact vertices in `ℝ^{m+1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialMesh {
    pub dim: usize,
    pub vertices: Vec<Vec<Rational>>,
    pub cells: Vec<Vec<usize>>,
}

impl SimplicialMesh {
    pub fn squared_diameter(&self, cell: usize) -> Rational {
        squared_diameter(&self.cells[cell].iter().map(|&v| self.vertices[v].clone()).collect::<Vec<_>>())
    }
}

pub fn squared_diameter(points: &[Vec<Rational>]) -> Rational {
    let mut best = Rational::zero();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            let d = squared_distance(&points[i], &points[j]);
            if d > best {
                best = d;
            }
        }
    }
    best
}

/// Composites of `levels` top-cell maps applied to the standard simplex.
pub fn subdivide_mesh(scheme: Scheme, m: usize, levels: usize) -> Result<SimplicialMesh> {
    if m > 4 {
        return Err(Error::Unsupported("mesh export is limited to dimension 4".into()));
    }
    let sys = build(scheme, m);
    let tops: Vec<RationalAffineMap> = sys.top_cells(m).into_iter().map(|e| sys.psi(e)).collect();
    let mut maps = vec![RationalAffineMap::identity(m + 1)];
    for _ in 0..levels {
        maps = maps.iter().flat_map(|a| tops.iter().map(move |t| a.compose(t))).collect();
    }
    let mut index: BTreeMap<Vec<Rational>, usize> = BTreeMap::new();
    let mut vertices = Vec::new();
    let mut cells = Vec::with_capacity(maps.len());
    for map in &maps {
        let cell = (0..=m)
            .map(|j| {
                let mut e = vec![Rational::zero(); m + 1];
                e[j] = Rational::one();
                let v = map.apply(&e);
                *index.entry(v.clone()).or_insert_with(|| {
                    vertices.push(v);
                    vertices.len() - 1
                })
            })
            .collect();
        cells.push(cell);
    }
    Ok(SimplicialMesh { dim: m, vertices, cells })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn face_category_hom_sizes() {
        let f = FaceCategory::new(3);
        assert!(f.category.validate().is_valid());
        assert_eq!(f.category.hom(ObjId(1), ObjId(3)).len(), 6);
        assert_eq!(f.category.arrow_count(), 1 + 3 + 7 + 15);
    }

    #[test]
    fn top_cell_counts() {
        let b = bary_module(3);
        let e = edge_module(3);
        for (m, (bc, ec)) in [(1, 1), (2, 2), (6, 4), (24, 8)].into_iter().enumerate() {
            assert_eq!(b.top_cells(m).len(), bc);
            assert_eq!(e.top_cells(m).len(), ec);
        }
    }

    #[test]
    fn psi_laws_hold() {
        assert_eq!(bary_module(2).check_psi_laws(), None);
        assert_eq!(edge_module(2).check_psi_laws(), None);
    }

    #[test]
    fn barycenter_decomposes_to_a_vertex() {
        let third = rat(1, 3);
        let d = decompose_point(2, &[third.clone(), third.clone(), third]).unwrap();
        assert_eq!(d.n, 0);
        assert_eq!(d.chain, vec![0b111]);
        assert_eq!(d.t, vec![int(1)]);
        assert!(decompose_point(2, &[rat(1, 2), rat(1, 2), rat(1, 2)]).is_err());
    }

    #[test]
    fn canonical_form_on_a_face() {
        let (d, f) = canonical_form(2, &[0b001, 0b101, 0b111], &[rat(1, 2), int(0), rat(1, 2)]).unwrap();
        assert_eq!(f, vec![0, 2]);
        assert_eq!(d.chain, vec![0b001, 0b111]);
    }

    #[test]
    fn mesh_counts() {
        assert_eq!(subdivide_mesh(Scheme::Barycentric, 2, 1).unwrap().cells.len(), 6);
        assert_eq!(subdivide_mesh(Scheme::Edgewise, 2, 2).unwrap().cells.len(), 16);
        let m = subdivide_mesh(Scheme::Barycentric, 2, 0).unwrap();
        assert_eq!((m.cells.len(), m.vertices.len()), (1, 3));
        assert_eq!(subdivide_mesh(Scheme::Barycentric, 2, 1).unwrap().vertices.len(), 7);
    }
}

//! Presentation formats: Graphviz DOT, binary PGM and OFF meshes.

use std::fmt::Write as _;

use selfsim_core::ifs::Raster;
use selfsim_core::rational::to_f64;
use selfsim_core::simplex::SimplicialMesh;
use selfsim_core::SystemDef;

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Objects as nodes; module elements `m: b ⇸ a` as solid edges `b → a`,
/// non-identity arrows as dashed edges.
pub fn to_dot(sys: &SystemDef) -> String {
    let cat = sys.category();
    let module = sys.module();
    let mut out = String::from("digraph system {\n  rankdir=LR;\n");
    for a in cat.objects() {
        let _ = writeln!(out, "  {};", quote(cat.object_name(a)));
    }
    for f in cat.arrow_ids().filter(|&f| !cat.is_identity(f)) {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}, style=dashed];",
            quote(cat.object_name(cat.src(f))),
            quote(cat.object_name(cat.dst(f))),
            quote(&cat.arrow(f).name)
        );
    }
    for m in module.ids() {
        let _ = writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(cat.object_name(module.src(m))),
            quote(cat.object_name(module.dst(m))),
            quote(module.name(m))
        );
    }
    out.push_str("}\n");
    out
}

/// Binary greyscale PGM; attractor pixels are black.
pub fn to_pgm(r: &Raster) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", r.width, r.height).into_bytes();
    out.extend(r.pixels.iter().map(|&p| if p { 0u8 } else { 255u8 }));
    out
}

fn triangles(cell: &[usize]) -> Vec<Vec<usize>> {
    if cell.len() <= 3 {
        return vec![cell.to_vec()];
    }
    let mut out = Vec::new();
    for i in 0..cell.len() {
        for j in i + 1..cell.len() {
            for k in j + 1..cell.len() {
                out.push(vec![cell[i], cell[j], cell[k]]);
            }
        }
    }
    out
}

/// OFF mesh in affine coordinates (barycentric coordinate 0 dropped).
///
/// Cells of dimension at most 2 are written as faces; higher cells as all
/// their triangles. Dimension 4 uses the `4OFF` header.
pub fn to_off(mesh: &SimplicialMesh) -> String {
    let coords = mesh.dim.max(3);
    let header = if mesh.dim > 3 { format!("{}OFF", mesh.dim) } else { "OFF".into() };
    let faces: Vec<Vec<usize>> = mesh.cells.iter().flat_map(|c| triangles(c)).collect();
    let mut out = format!("{header}\n{} {} 0\n", mesh.vertices.len(), faces.len());
    for v in &mesh.vertices {
        let mut xs: Vec<String> = v.iter().skip(1).map(|q| format!("{:.9}", to_f64(q))).collect();
        while xs.len() < coords {
            xs.push(format!("{:.9}", 0.0));
        }
        out.push_str(&xs.join(" "));
        out.push('\n');
    }
    for f in &faces {
        let idx: Vec<String> = f.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{} {}", f.len(), idx.join(" "));
    }
    out
}

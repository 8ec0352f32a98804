use selfsim::export::{to_dot, to_off, to_pgm};
use selfsim::parse_sysdef;
use selfsim_core::ifs::{rasterize, Ifs};
use selfsim_core::rational::to_f64;
use selfsim_core::simplex::{subdivide_mesh, Scheme};

#[test]
fn dot_has_an_edge_per_element_and_arrow() {
    let sys = parse_sysdef(selfsim::data::CIRCLE_SSD).unwrap().system;
    let dot = to_dot(&sys);
    assert!(dot.starts_with("digraph system {"));
    assert!(dot.trim_end().ends_with('}'));
    let solid = dot.lines().filter(|l| l.contains("->") && !l.contains("dashed")).count();
    let dashed = dot.lines().filter(|l| l.contains("dashed")).count();
    assert_eq!(solid, sys.module().len());
    assert_eq!(dashed, 4);
    assert!(dot.contains(r#""1" -> "2" [label="L2"];"#));
}

#[test]
fn pgm_matches_the_raster() {
    let r = rasterize(&Ifs::sierpinski(2), 4).unwrap();
    let bytes = to_pgm(&r);
    let header = b"P5\n16 16\n255\n";
    assert_eq!(&bytes[..header.len()], header);
    let body = &bytes[header.len()..];
    assert_eq!(body.len(), 256);
    for y in 0..16 {
        for x in 0..16 {
            assert_eq!(body[y * 16 + x] == 0, r.get(x, y));
        }
    }
}

fn parse_off(text: &str) -> (String, Vec<Vec<f64>>, Vec<Vec<usize>>) {
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let counts: Vec<usize> = lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect();
    let vertices = (0..counts[0])
        .map(|_| lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect())
        .collect();
    let faces: Vec<Vec<usize>> = (0..counts[1])
        .map(|_| lines.next().unwrap().split(' ').map(|t| t.parse().unwrap()).collect())
        .collect();
    assert!(lines.next().is_none());
    for f in &faces {
        assert_eq!(f[0], f.len() - 1);
    }
    (header, vertices, faces.into_iter().map(|f| f[1..].to_vec()).collect())
}

#[test]
fn off_meshes_carry_the_subdivision() {
    for (scheme, m, levels, faces) in [
        (Scheme::Barycentric, 2, 1, 6),
        (Scheme::Barycentric, 2, 2, 36),
        (Scheme::Edgewise, 2, 3, 64),
        (Scheme::Barycentric, 3, 1, 24 * 4),
        (Scheme::Edgewise, 4, 1, 16 * 10),
    ] {
        let mesh = subdivide_mesh(scheme, m, levels).unwrap();
        let (header, vertices, tris) = parse_off(&to_off(&mesh));
        assert_eq!(header, if m > 3 { format!("{m}OFF") } else { "OFF".into() });
        assert_eq!(tris.len(), faces, "{scheme:?} m={m} levels={levels}");
        assert_eq!(vertices.len(), mesh.vertices.len());
        for (v, exact) in vertices.iter().zip(&mesh.vertices) {
            assert_eq!(v.len(), m.max(3));
            for (a, q) in exact.iter().skip(1).enumerate() {
                assert!((v[a] - to_f64(q)).abs() < 1e-9);
            }
        }
    }
}

//! Minimal ASCII Wavefront OBJ support (`v` and `f` records only).

use std::io::{self, Write};
use std::path::Path;

use nalgebra::Vector3;

use super::ManifoldMesh;
use crate::error::{Error, Result};

/// Parses OBJ text. Polygons are fan-triangulated; texture and normal
/// indices in `f` records are ignored.
pub fn parse_obj(text: &str) -> Result<ManifoldMesh> {
    let mut vertices = Vec::new();
    let mut faces = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |message: String| Error::Parse { line: line_no, message };
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("v") => {
                let coords: Vec<f64> = tokens
                    .take(3)
                    .map(|t| t.parse::<f64>().map_err(|e| err(format!("bad coordinate {t:?}: {e}"))))
                    .collect::<Result<_>>()?;
                if coords.len() != 3 {
                    return Err(err("vertex needs three coordinates".into()));
                }
                vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut poly = Vec::new();
                for t in tokens {
                    let head = t.split('/').next().unwrap_or("");
                    let idx: i64 = head.parse().map_err(|e| err(format!("bad face index {t:?}: {e}")))?;
                    let resolved = match idx {
                        0 => return Err(err("face index 0 is invalid (indices are 1-based)".into())),
                        k if k > 0 => k - 1,
                        k => vertices.len() as i64 + k,
                    };
                    if resolved < 0 {
                        return Err(err(format!("face index {idx} out of range")));
                    }
                    poly.push(resolved as usize);
                }
                if poly.len() < 3 {
                    return Err(err("face needs at least three vertices".into()));
                }
                for k in 1..poly.len() - 1 {
                    faces.push([poly[0], poly[k], poly[k + 1]]);
                }
            }
            _ => {}
        }
    }
    ManifoldMesh::new(vertices, faces)
}

pub fn load_obj(bytes: &[u8]) -> Result<ManifoldMesh> {
    let text =
        std::str::from_utf8(bytes).map_err(|e| Error::Parse { line: 0, message: format!("not ASCII/UTF-8: {e}") })?;
    parse_obj(text)
}

pub fn write_obj<W: Write>(mesh: &ManifoldMesh, mut out: W) -> io::Result<()> {
    for v in mesh.vertices() {
        writeln!(out, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for f in mesh.faces() {
        writeln!(out, "f {} {} {}", f[0] + 1, f[1] + 1, f[2] + 1)?;
    }
    Ok(())
}

pub fn save_obj(mesh: &ManifoldMesh, path: impl AsRef<Path>) -> io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut out = io::BufWriter::new(file);
    write_obj(mesh, &mut out)?;
    out.flush()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::make_icosphere;

    const TETRA: &str = "\
v 1 1 1
v 1 -1 -1
v -1 1 -1
v -1 -1 1
f 1 2 3
f 1 3 4
f 1 4 2
f 2 4 3
";

    const CUBE: &str = "\
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
v 0 0 1
v 1 0 1
v 1 1 1
v 0 1 1
f 1 4 3 2
f 5 6 7 8
f 1 2 6 5
f 2 3 7 6
f 3 4 8 7
f 4 1 5 8
";

    #[test]
    fn tetrahedron_topology() {
        let m = parse_obj(TETRA).unwrap();
        assert_eq!(m.num_vertices(), 4);
        assert_eq!(m.num_faces(), 4);
        assert_eq!(m.num_edges(), 6);
        assert_eq!(m.euler_characteristic(), 2);
    }

    #[test]
    fn quads_fan_triangulated() {
        let m = parse_obj(CUBE).unwrap();
        assert_eq!(m.num_faces(), 12);
        assert!((m.signed_volume() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn open_cube_rejected() {
        let open: String = CUBE.lines().take(13).map(|l| format!("{l}\n")).collect();
        assert!(matches!(parse_obj(&open), Err(Error::OpenBoundary { .. })));
    }

    #[test]
    fn parse_errors_carry_line() {
        match parse_obj("v 0 0 0\nv 1 x 0\n") {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_obj("v 0 0 0\nf 0 1 1\n"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn slash_and_negative_indices() {
        let text = TETRA.replace("f 1 2 3", "f 1/1/1 2//2 -2");
        let m = parse_obj(&text).unwrap();
        assert_eq!(m.num_faces(), 4);
    }

    #[test]
    fn icosphere_roundtrip() {
        let m = make_icosphere(10.0, 2).unwrap();
        let mut buf = Vec::new();
        write_obj(&m, &mut buf).unwrap();
        let back = load_obj(&buf).unwrap();
        assert_eq!(back.num_vertices(), m.num_vertices());
        assert_eq!(back.num_faces(), m.num_faces());
        for (a, b) in m.vertices().iter().zip(back.vertices()) {
            assert_eq!(a, b);
        }
    }
}

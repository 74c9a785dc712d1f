//! Plain-text tetrahedron meshes for four-node graphs.
//!
//! Layout, one record per line:
//!
//! ```text
//! 3 3
//! v x y z      (four lines, vertex i on line i)
//! f a b c      (four lines, 0-based, facet k omits vertex k)
//! ```
//!
//! The header gives the embedding dimension and the vertices per face. Faces
//! are wound counter-clockwise seen from outside. Coordinates are rounded to
//! 12 significant digits.

use nalgebra::{DVector, Vector3};

use crate::error::{Error, Result};
use crate::report::round_significant;
use crate::simplex::SimplexEmbedding;

pub const MESH_NODE_COUNT: usize = 4;

fn point(v: DVector<f64>) -> Vector3<f64> {
    Vector3::new(v[0], v[1], v[2])
}

/// Facets as vertex triples with outward winding.
pub fn outward_faces(e: &SimplexEmbedding) -> Result<[[usize; 3]; 4]> {
    check(e)?;
    let p: Vec<_> = (0..4).map(|i| point(e.vertex(i))).collect();
    let mut faces = [[0; 3]; 4];
    for (k, face) in faces.iter_mut().enumerate() {
        let mut f: Vec<usize> = (0..4).filter(|&i| i != k).collect();
        let normal = (p[f[1]] - p[f[0]]).cross(&(p[f[2]] - p[f[0]]));
        if normal.dot(&(p[f[0]] - p[k])) < 0.0 {
            f.swap(1, 2);
        }
        *face = [f[0], f[1], f[2]];
    }
    Ok(faces)
}

fn check(e: &SimplexEmbedding) -> Result<()> {
    if e.node_count() != MESH_NODE_COUNT {
        return Err(Error::NodeCount {
            what: "mesh export",
            expected: MESH_NODE_COUNT,
            actual: e.node_count(),
        });
    }
    Ok(())
}

pub fn mesh_text(e: &SimplexEmbedding) -> Result<String> {
    let faces = outward_faces(e)?;
    let mut out = format!("{} 3\n", e.dimension());
    for i in 0..4 {
        let v = e.vertex(i);
        let c: Vec<String> = v.iter().map(|&x| round_significant(x).to_string()).collect();
        out.push_str(&format!("v {}\n", c.join(" ")));
    }
    for f in faces {
        out.push_str(&format!("f {} {} {}\n", f[0], f[1], f[2]));
    }
    Ok(out)
}

/// A mesh read back from [`mesh_text`] output.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub vertices: Vec<[f64; 3]>,
    pub faces: Vec<[usize; 3]>,
}

pub fn parse_mesh(text: &str) -> Result<Mesh> {
    let bad = |line: usize, message: &str| Error::Parse {
        line,
        message: message.to_string(),
    };
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l));
    match lines.next() {
        Some((_, "3 3")) => {}
        _ => return Err(bad(1, "expected header \"3 3\"")),
    }
    let mut mesh = Mesh {
        vertices: Vec::new(),
        faces: Vec::new(),
    };
    for (no, line) in lines {
        let mut tok = line.split_whitespace();
        let tag = tok.next();
        let rest: Vec<&str> = tok.collect();
        if rest.len() != 3 {
            return Err(bad(no, "expected three fields after the tag"));
        }
        match tag {
            Some("v") => {
                let mut xyz = [0.0; 3];
                for (slot, t) in xyz.iter_mut().zip(&rest) {
                    *slot = t.parse().map_err(|_| bad(no, "bad coordinate"))?;
                }
                mesh.vertices.push(xyz);
            }
            Some("f") => {
                let mut abc = [0; 3];
                for (slot, t) in abc.iter_mut().zip(&rest) {
                    *slot = t.parse().map_err(|_| bad(no, "bad face index"))?;
                }
                mesh.faces.push(abc);
            }
            _ => return Err(bad(no, "unknown record")),
        }
    }
    Ok(mesh)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::graph::laplacian;
    use crate::simplex::{embed, SimplexKind};
    use crate::spectral::eigendecompose;

    fn original(g: &crate::WeightedGraph) -> SimplexEmbedding {
        embed(&eigendecompose(&laplacian(g)).unwrap(), SimplexKind::Original)
    }

    fn sq(a: [f64; 3]) -> f64 {
        a.iter().map(|x| x * x).sum()
    }

    #[test]
    fn p4_vertex_norms_are_degrees() {
        let mesh = parse_mesh(&mesh_text(&original(&corpus::path(4))).unwrap()).unwrap();
        let norms: Vec<f64> = mesh.vertices.iter().map(|&v| sq(v)).collect();
        for (got, want) in norms.iter().zip([1.0, 2.0, 2.0, 1.0]) {
            assert!((got - want).abs() < 1e-10, "{norms:?}");
        }
        assert_eq!(mesh.faces.len(), 4);
    }

    #[test]
    fn k4_mesh_is_regular() {
        let mesh = parse_mesh(&mesh_text(&original(&corpus::complete(4))).unwrap()).unwrap();
        let v = &mesh.vertices;
        for i in 0..4 {
            for j in i + 1..4 {
                let d = [v[i][0] - v[j][0], v[i][1] - v[j][1], v[i][2] - v[j][2]];
                // ‖s_i − s_j‖² = d_i + d_j − 2Q_ij = 8
                assert!((sq(d) - 8.0).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn faces_point_outward() {
        let e = original(&corpus::cycle(4));
        let faces = outward_faces(&e).unwrap();
        let centroid = (0..4).map(|i| point(e.vertex(i))).sum::<Vector3<f64>>() / 4.0;
        for f in faces {
            let p: Vec<_> = f.iter().map(|&i| point(e.vertex(i))).collect();
            let normal = (p[1] - p[0]).cross(&(p[2] - p[0]));
            assert!(normal.dot(&(p[0] - centroid)) > 0.0);
        }
    }

    #[test]
    fn wrong_size_is_rejected() {
        assert!(matches!(
            mesh_text(&original(&corpus::complete(2))),
            Err(Error::NodeCount { .. })
        ));
    }
}

//! Oriented sphere triangulations by icosahedral subdivision.

use std::collections::HashMap;

/// An oriented triangle mesh with vertices on the unit sphere.
#[derive(Debug, Clone)]
pub struct TriangleMesh {
    pub vertices: Vec<[f64; 3]>,
    /// Oriented vertex triples (counterclockwise seen from outside).
    pub faces: Vec<[usize; 3]>,
    pub subdivision_level: u32,
}

impl TriangleMesh {
    /// Icosahedron subdivided `level` times, vertices projected to the unit
    /// sphere, faces oriented outward. Face count is 20 * 4^level.
    pub fn icosphere(level: u32) -> Self {
        let phi = (1.0 + 5.0f64.sqrt()) / 2.0;
        let mut vertices: Vec<[f64; 3]> = vec![
            [-1.0, phi, 0.0], [1.0, phi, 0.0], [-1.0, -phi, 0.0], [1.0, -phi, 0.0],
            [0.0, -1.0, phi], [0.0, 1.0, phi], [0.0, -1.0, -phi], [0.0, 1.0, -phi],
            [phi, 0.0, -1.0], [phi, 0.0, 1.0], [-phi, 0.0, -1.0], [-phi, 0.0, 1.0],
        ];
        for v in &mut vertices {
            normalize(v);
        }
        let mut faces: Vec<[usize; 3]> = vec![
            [0, 11, 5], [0, 5, 1], [0, 1, 7], [0, 7, 10], [0, 10, 11],
            [1, 5, 9], [5, 11, 4], [11, 10, 2], [10, 7, 6], [7, 1, 8],
            [3, 9, 4], [3, 4, 2], [3, 2, 6], [3, 6, 8], [3, 8, 9],
            [4, 9, 5], [2, 4, 11], [6, 2, 10], [8, 6, 7], [9, 8, 1],
        ];
        for _ in 0..level {
            let mut midpoints: HashMap<(usize, usize), usize> = HashMap::new();
            let mut new_faces = Vec::with_capacity(faces.len() * 4);
            for f in &faces {
                let m01 = midpoint(&mut vertices, &mut midpoints, f[0], f[1]);
                let m12 = midpoint(&mut vertices, &mut midpoints, f[1], f[2]);
                let m20 = midpoint(&mut vertices, &mut midpoints, f[2], f[0]);
                new_faces.push([f[0], m01, m20]);
                new_faces.push([f[1], m12, m01]);
                new_faces.push([f[2], m20, m12]);
                new_faces.push([m01, m12, m20]);
            }
            faces = new_faces;
        }
        TriangleMesh { vertices, faces, subdivision_level: level }
    }

    /// All faces flipped, reversing the global orientation.
    pub fn reversed(&self) -> Self {
        TriangleMesh {
            vertices: self.vertices.clone(),
            faces: self.faces.iter().map(|f| [f[0], f[2], f[1]]).collect(),
            subdivision_level: self.subdivision_level,
        }
    }

    pub fn euler_characteristic(&self) -> i64 {
        let v = self.vertices.len() as i64;
        let f = self.faces.len() as i64;
        let mut edges = std::collections::HashSet::new();
        for face in &self.faces {
            for (a, b) in [(face[0], face[1]), (face[1], face[2]), (face[2], face[0])] {
                edges.insert(if a < b { (a, b) } else { (b, a) });
            }
        }
        v - edges.len() as i64 + f
    }

    /// Each directed edge must appear exactly once across all faces.
    pub fn is_consistently_oriented(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        for face in &self.faces {
            for (a, b) in [(face[0], face[1]), (face[1], face[2]), (face[2], face[0])] {
                if !seen.insert((a, b)) {
                    return false;
                }
            }
        }
        // Closed surface: the reverse of every edge must also be present.
        seen.iter().all(|&(a, b)| seen.contains(&(b, a)))
    }
}

fn normalize(v: &mut [f64; 3]) {
    let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
    v[0] /= n;
    v[1] /= n;
    v[2] /= n;
}

fn midpoint(
    vertices: &mut Vec<[f64; 3]>,
    cache: &mut HashMap<(usize, usize), usize>,
    a: usize,
    b: usize,
) -> usize {
    let key = if a < b { (a, b) } else { (b, a) };
    if let Some(&idx) = cache.get(&key) {
        return idx;
    }
    let va = vertices[a];
    let vb = vertices[b];
    let mut m = [va[0] + vb[0], va[1] + vb[1], va[2] + vb[2]];
    normalize(&mut m);
    vertices.push(m);
    let idx = vertices.len() - 1;
    cache.insert(key, idx);
    idx
}

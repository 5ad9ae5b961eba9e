//! Convex polytopes given by vertices (d <= 3), with facets found by brute force.

use crate::vecops::{dot, lex_less, norm, sub};

#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub normal: Vec<f64>,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Vec<f64>>,
    facets: Vec<Facet>,
}

impl Polytope {
    /// Builds the hull; `None` when the vertices span less than full dimension.
    pub fn new(vertices: Vec<Vec<f64>>) -> Option<Polytope> {
        let d = vertices.first()?.len();
        if d == 0 || d > 3 || vertices.iter().any(|v| v.len() != d) {
            return None;
        }
        let scale = vertices
            .iter()
            .flat_map(|v| v.iter())
            .fold(0.0f64, |m, x| m.max(x.abs()))
            .max(1.0);
        let tol = 1e-10 * scale;
        let mut candidates: Vec<Vec<f64>> = Vec::new();
        let n = vertices.len();
        match d {
            1 => candidates.push(vec![1.0]),
            2 => {
                for i in 0..n {
                    for j in i + 1..n {
                        let e = sub(&vertices[j], &vertices[i]);
                        candidates.push(vec![-e[1], e[0]]);
                    }
                }
            }
            _ => {
                for i in 0..n {
                    for j in i + 1..n {
                        for k in j + 1..n {
                            let a = sub(&vertices[j], &vertices[i]);
                            let b = sub(&vertices[k], &vertices[i]);
                            candidates.push(vec![
                                a[1] * b[2] - a[2] * b[1],
                                a[2] * b[0] - a[0] * b[2],
                                a[0] * b[1] - a[1] * b[0],
                            ]);
                        }
                    }
                }
            }
        }
        let mut facets: Vec<Facet> = Vec::new();
        for c in candidates {
            let len = norm(&c);
            if len <= 1e-12 * scale * scale {
                continue;
            }
            for sign in [1.0, -1.0] {
                let normal: Vec<f64> = c.iter().map(|x| sign * x / len).collect();
                let hs: Vec<f64> = vertices.iter().map(|v| dot(v, &normal)).collect();
                let offset = hs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let touching = hs.iter().filter(|&&h| h >= offset - tol).count();
                if touching < d {
                    continue;
                }
                let dup = facets.iter().any(|f| {
                    (f.offset - offset).abs() <= tol
                        && f.normal.iter().zip(&normal).all(|(a, b)| (a - b).abs() <= 1e-9)
                });
                if !dup {
                    facets.push(Facet { normal, offset });
                }
            }
        }
        let poly = Polytope { vertices, facets };
        if poly.inradius_hint() <= tol {
            return None;
        }
        Some(poly)
    }

    pub fn dim(&self) -> usize {
        self.vertices[0].len()
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn facets(&self) -> &[Facet] {
        &self.facets
    }

    /// Signed distance to the boundary, positive inside.
    pub fn depth(&self, x: &[f64]) -> f64 {
        self.facets
            .iter()
            .map(|f| f.offset - dot(&f.normal, x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.depth(x) >= 0.0
    }

    pub fn centroid_of_vertices(&self) -> Vec<f64> {
        let d = self.dim();
        let mut c = vec![0.0; d];
        for v in &self.vertices {
            for i in 0..d {
                c[i] += v[i];
            }
        }
        c.iter().map(|x| x / self.vertices.len() as f64).collect()
    }

    /// For every extreme vertex, the indices of the facets through it. In
    /// d = 3 they are ordered cyclically around the vertex normal cone.
    pub fn vertex_cones(&self) -> Vec<(usize, Vec<usize>)> {
        let d = self.dim();
        let scale = self.vertices.iter().flat_map(|v| v.iter()).fold(1.0f64, |m, x| m.max(x.abs()));
        let mut out = Vec::new();
        for (vi, v) in self.vertices.iter().enumerate() {
            let mut idx: Vec<usize> = (0..self.facets.len())
                .filter(|&j| (dot(&self.facets[j].normal, v) - self.facets[j].offset).abs() <= 1e-9 * scale)
                .collect();
            if idx.len() < d {
                continue;
            }
            if d == 3 {
                let mut axis = vec![0.0; 3];
                for &j in &idx {
                    for k in 0..3 {
                        axis[k] += self.facets[j].normal[k];
                    }
                }
                let r = if axis[0].abs() < 0.9 * norm(&axis) { [1.0, 0.0, 0.0] } else { [0.0, 1.0, 0.0] };
                let e1 = cross(&axis, &r);
                let e2 = cross(&axis, &e1);
                let angle = |j: usize| dot(&self.facets[j].normal, &e2).atan2(dot(&self.facets[j].normal, &e1));
                idx.sort_by(|&a, &b| angle(a).total_cmp(&angle(b)));
            }
            out.push((vi, idx));
        }
        out
    }

    fn inradius_hint(&self) -> f64 {
        if self.facets.len() <= self.dim() {
            return 0.0;
        }
        self.depth(&self.centroid_of_vertices())
    }

    /// Vertex maximizing <v, y>, ties to the lexicographically smallest vertex.
    pub fn argmax(&self, y: &[f64]) -> (&[f64], f64) {
        let mut best = &self.vertices[0];
        let mut val = dot(best, y);
        for v in &self.vertices[1..] {
            let h = dot(v, y);
            if h > val || (h == val && lex_less(v, best)) {
                best = v;
                val = h;
            }
        }
        (best, val)
    }

    pub fn support(&self, y: &[f64]) -> f64 {
        self.argmax(y).1
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let d = self.dim();
        let mut lo = vec![f64::INFINITY; d];
        let mut hi = vec![f64::NEG_INFINITY; d];
        for v in &self.vertices {
            for i in 0..d {
                lo[i] = lo[i].min(v[i]);
                hi[i] = hi[i].max(v[i]);
            }
        }
        (lo, hi)
    }
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> Polytope {
        Polytope::new(vec![
            vec![-1.0, -1.0],
            vec![1.0, -1.0],
            vec![1.0, 1.0],
            vec![-1.0, 1.0],
            vec![0.0, 0.0],
        ])
        .unwrap()
    }

    #[test]
    fn square_facets() {
        let p = square();
        assert_eq!(p.facets().len(), 4);
        assert!((p.depth(&[0.5, 0.0]) - 0.5).abs() < 1e-15);
        assert!(!p.contains(&[1.1, 0.0]));
    }

    #[test]
    fn vertex_cones_skip_interior_points() {
        let cones = square().vertex_cones();
        assert_eq!(cones.len(), 4);
        assert!(cones.iter().all(|(v, f)| *v < 4 && f.len() == 2));
    }

    #[test]
    fn cube_facets() {
        let mut v = Vec::new();
        for i in 0..8 {
            v.push(vec![
                if i & 1 == 0 { -1.0 } else { 1.0 },
                if i & 2 == 0 { -1.0 } else { 1.0 },
                if i & 4 == 0 { -1.0 } else { 1.0 },
            ]);
        }
        let p = Polytope::new(v).unwrap();
        assert_eq!(p.facets().len(), 6);
        assert!((p.depth(&[0.0, 0.0, 0.25]) - 0.75).abs() < 1e-15);
    }

    #[test]
    fn flat_rejected() {
        assert!(Polytope::new(vec![vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).is_none());
        assert!(Polytope::new(vec![vec![1.0], vec![1.0]]).is_none());
    }

    #[test]
    fn tie_breaks_lexicographically() {
        let p = square();
        let (v, h) = p.argmax(&[1.0, 0.0]);
        assert_eq!(h, 1.0);
        assert_eq!(v, &[1.0, -1.0]);
    }
}

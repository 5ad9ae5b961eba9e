//! Product rules on S^d carrying the weight |u_{d+1}|^{s-1}.

use serde::Serialize;
use std::f64::consts::{FRAC_PI_4, PI};

use super::quadrature::{gauss_jacobi, gauss_legendre, tanh_sinh};
use crate::vecops::{dot, norm};
use crate::error::{Error, Result};
use crate::funcmodel::Polytope;

/// Latitude parametrization is used up to this s; beyond it the vertical
/// coordinate itself carries the Jacobi weight.
const LATITUDE_MAX_S: f64 = 8.0;

/// Longest edge (radians) of a piece of the polytope-adapted rule on S².
const MAX_EDGE: f64 = 0.7;

#[derive(Debug, Clone, Serialize)]
pub struct SphereQuadrature {
    d: usize,
    s: f64,
    /// (d+1) coordinates per node
    nodes: Vec<f64>,
    weights: Vec<f64>,
    /// (t, rho, weight) per latitude of the upper hemisphere
    #[serde(skip)]
    rows: Vec<(f64, f64, f64)>,
    vertical_nodes: usize,
    horizontal_nodes: usize,
}

/// Unnormalized surface area of S^{d-1} (2 for d = 1).
pub fn sphere_area(d: usize) -> f64 {
    let h = d as f64 / 2.0;
    2.0 * PI.powf(h) / libm::tgamma(h)
}

fn horizontal_rule(d: usize, count: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    match d {
        1 => (vec![vec![1.0], vec![-1.0]], vec![1.0, 1.0]),
        2 => {
            let m = count;
            let dirs = (0..m)
                .map(|j| {
                    let a = 2.0 * PI * j as f64 / m as f64;
                    vec![a.cos(), a.sin()]
                })
                .collect();
            (dirs, vec![2.0 * PI / m as f64; m])
        }
        _ => {
            // Gauss–Legendre in the polar cosine times trapezoid in azimuth
            let np = ((count as f64 / 4.0).sqrt().round() as usize).max(2);
            let na = (count / np).max(4);
            let (c, w) = gauss_legendre(np);
            let mut dirs = Vec::with_capacity(np * na);
            let mut wts = Vec::with_capacity(np * na);
            for (ci, wi) in c.iter().zip(&w) {
                let r = (1.0 - ci * ci).sqrt();
                for j in 0..na {
                    let a = 2.0 * PI * j as f64 / na as f64;
                    dirs.push(vec![r * a.cos(), r * a.sin(), *ci]);
                    wts.push(wi * 2.0 * PI / na as f64);
                }
            }
            (dirs, wts)
        }
    }
}

/// Tanh-sinh nodes and weights on (0, 1) with about `n` nodes.
fn unit_tanh_sinh(n: usize) -> Vec<(f64, f64)> {
    let k = (n / 2).div_ceil(4).max(2) * 4;
    tanh_sinh(k, 3.5)
        .iter()
        .map(|node| {
            let x = if node.from_left < 1.0 { 0.5 * node.from_left } else { 1.0 - 0.5 * node.from_right };
            (x, 0.5 * node.fine)
        })
        .filter(|(x, _)| *x > 0.0 && *x < 1.0)
        .collect()
}

/// Directions and weights on S^{d-1} (d = 2, 3) that integrate piecewise
/// smooth functions with kinks on the normal fan of `p`. The facet normals
/// are where h_{p - z} is smallest when z nears a facet, so every piece is
/// graded toward them.
fn fan_rule(p: &Polytope, count: usize) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut dirs = Vec::new();
    let mut wts = Vec::new();
    if p.dim() == 2 {
        let mut angles: Vec<f64> = p.facets().iter().map(|f| f.normal[1].atan2(f.normal[0])).collect();
        angles.sort_by(f64::total_cmp);
        let rule = unit_tanh_sinh(count.div_ceil(angles.len()).max(16));
        for (i, &a) in angles.iter().enumerate() {
            let b = if i + 1 < angles.len() { angles[i + 1] } else { angles[0] + 2.0 * PI };
            for &(x, w) in &rule {
                let t = a + (b - a) * x;
                dirs.push(vec![t.cos(), t.sin()]);
                wts.push(w * (b - a));
            }
        }
        return (dirs, wts);
    }
    // spherical polygons of the vertex normal cones, fanned from their axes
    // and split so that each piece has one facet normal as apex
    let mut pieces: Vec<[Vec<f64>; 3]> = Vec::new();
    for (_, idx) in p.vertex_cones() {
        if idx.len() < 3 {
            continue;
        }
        let normals: Vec<&Vec<f64>> = idx.iter().map(|&j| &p.facets()[j].normal).collect();
        let mut axis = vec![0.0; 3];
        for n in &normals {
            for k in 0..3 {
                axis[k] += n[k];
            }
        }
        let an = norm(&axis);
        axis.iter_mut().for_each(|c| *c /= an);
        for i in 0..normals.len() {
            let (b, c) = (normals[i], normals[(i + 1) % normals.len()]);
            let mut m: Vec<f64> = (0..3).map(|k| b[k] + c[k]).collect();
            let ml = norm(&m);
            m.iter_mut().for_each(|x| *x /= ml);
            pieces.push([b.clone(), m.clone(), axis.clone()]);
            pieces.push([c.clone(), axis.clone(), m]);
        }
    }
    // split until every edge is short so the gnomonic maps stay mild; only
    // the corner child keeps the facet normal as its apex
    let mut graded: Vec<([Vec<f64>; 3], bool)> = pieces.into_iter().map(|p| (p, true)).collect();
    loop {
        let mut done = true;
        let mut next = Vec::with_capacity(graded.len());
        for ([a, b, c], peak) in graded {
            let edge = |u: &[f64], v: &[f64]| dot(u, v).clamp(-1.0, 1.0).acos();
            if edge(&a, &b).max(edge(&b, &c)).max(edge(&c, &a)) <= MAX_EDGE {
                next.push(([a, b, c], peak));
                continue;
            }
            done = false;
            let mid = |u: &[f64], v: &[f64]| {
                let m: Vec<f64> = (0..3).map(|k| u[k] + v[k]).collect();
                let l = norm(&m);
                m.iter().map(|x| x / l).collect::<Vec<f64>>()
            };
            let (ab, bc, ca) = (mid(&a, &b), mid(&b, &c), mid(&c, &a));
            next.push(([a, ab.clone(), ca.clone()], peak));
            next.push(([b, bc.clone(), ab.clone()], false));
            next.push(([c, ca.clone(), bc.clone()], false));
            next.push(([ab, bc, ca], false));
        }
        graded = next;
        if done {
            break;
        }
    }
    let scale = (count as f64 / 1024.0).sqrt();
    let n = ((6.0 * scale).round() as usize).max(3);
    let radial_peak = unit_tanh_sinh(3 * n);
    let (x, w) = gauss_legendre(n);
    let radial_smooth: Vec<(f64, f64)> = x.iter().zip(&w).map(|(xi, wi)| (0.5 * (1.0 + xi), 0.5 * wi)).collect();
    for ([a, b, c], peak) in &graded {
        let det = dot(a, &cross(b, c)).abs();
        let radial = if *peak { &radial_peak } else { &radial_smooth };
        // x = a + r (b + θ (c - b) - a)
        for &(r, wr) in radial {
            for (xj, wj) in x.iter().zip(&w) {
                let th = 0.5 * (1.0 + xj);
                let q: Vec<f64> = (0..3).map(|k| a[k] + r * (b[k] + th * (c[k] - b[k]) - a[k])).collect();
                let ql = norm(&q);
                dirs.push(q.iter().map(|v| v / ql).collect());
                wts.push(0.5 * wr * wj * r * det / ql.powi(3));
            }
        }
    }
    (dirs, wts)
}

fn cross(a: &[f64], b: &[f64]) -> Vec<f64> {
    vec![a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

impl SphereQuadrature {
    /// Default resolution: 256 latitudes x {±1} (d=1), 64 x 128 (d=2), 64 x 1024 (d=3).
    pub fn new(d: usize, s: f64) -> Result<SphereQuadrature> {
        let (v, h) = match d {
            1 => (256, 2),
            2 => (64, 128),
            _ => (64, 1024),
        };
        Self::with_counts(d, s, v, h)
    }

    /// `vertical` latitudes per hemisphere, `horizontal` directions on S^{d-1}.
    pub fn with_counts(d: usize, s: f64, vertical: usize, horizontal: usize) -> Result<SphereQuadrature> {
        if !(1..=3).contains(&d) {
            return Err(Error::input("sphere quadrature supports d in 1..=3"));
        }
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::input("s must be positive and finite"));
        }
        if vertical < 2 || (d > 1 && horizontal < 4) {
            return Err(Error::input("too few quadrature nodes"));
        }
        let (dirs, hw) = horizontal_rule(d, horizontal);
        let mut rows: Vec<(f64, f64, f64)> = Vec::with_capacity(vertical);
        let dm = d as f64;
        if s <= LATITUDE_MAX_S {
            let (x, w) = gauss_jacobi(vertical, 0.0, s - 1.0);
            for (xi, wi) in x.iter().zip(&w) {
                let phi = FRAC_PI_4 * (1.0 + xi);
                let sinc = phi.sin() / phi;
                let wt = wi * FRAC_PI_4.powf(s) * sinc.powf(s - 1.0) * phi.cos().powf(dm - 1.0);
                rows.push((phi.sin(), phi.cos(), wt));
            }
        } else {
            let alpha = (dm - 2.0) / 2.0;
            let (x, w) = gauss_jacobi(vertical, alpha, s - 1.0);
            let scale = 2f64.powf(-(s + alpha));
            for (xi, wi) in x.iter().zip(&w) {
                let t = 0.5 * (1.0 + xi);
                let rho = ((1.0 - t) * (1.0 + t)).sqrt();
                rows.push((t, rho, wi * scale * (1.0 + t).powf(alpha)));
            }
        }
        Ok(Self::assemble(d, s, rows, &dirs, &hw, horizontal))
    }

    fn assemble(d: usize, s: f64, rows: Vec<(f64, f64, f64)>, dirs: &[Vec<f64>], hw: &[f64], horizontal: usize) -> Self {
        let mut nodes = Vec::with_capacity(2 * rows.len() * dirs.len() * (d + 1));
        let mut weights = Vec::with_capacity(2 * rows.len() * dirs.len());
        for sign in [1.0, -1.0] {
            for &(t, rho, wt) in &rows {
                for (dir, w) in dirs.iter().zip(hw) {
                    nodes.extend(dir.iter().map(|c| rho * c));
                    nodes.push(sign * t);
                    weights.push(wt * w);
                }
            }
        }
        SphereQuadrature { d, s, nodes, weights, vertical_nodes: rows.len(), rows, horizontal_nodes: horizontal }
    }

    /// The same latitudes with the horizontal directions split along the
    /// normal fan of `p`, so that h_{p - z} is linear on every piece.
    pub fn adapted_to(&self, p: &Polytope) -> SphereQuadrature {
        if self.d == 1 {
            return self.clone();
        }
        let (dirs, hw) = fan_rule(p, self.horizontal_nodes);
        Self::assemble(self.d, self.s, self.rows.clone(), &dirs, &hw, self.horizontal_nodes)
    }

    /// Companion rule with half the nodes in each direction, for error estimates.
    pub fn coarser(&self) -> Result<SphereQuadrature> {
        let h = if self.d == 1 { 2 } else { (self.horizontal_nodes / 2).max(4) };
        Self::with_counts(self.d, self.s, (self.vertical_nodes / 2).max(2), h)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn node(&self, i: usize) -> &[f64] {
        let k = self.d + 1;
        &self.nodes[i * k..(i + 1) * k]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// ∫_{S^d} |u_{d+1}|^{s-1} dσ = |S^{d-1}| B(s/2, d/2).
    pub fn exact_moment(d: usize, s: f64) -> f64 {
        let dm = d as f64;
        let beta = (libm::lgamma(s / 2.0) + libm::lgamma(dm / 2.0) - libm::lgamma((s + dm) / 2.0)).exp();
        sphere_area(d) * beta
    }

    pub fn moment(&self) -> f64 {
        crate::vecops::pairwise_sum(&self.weights)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn moments_match_closed_form() {
        for d in 1..=3 {
            for s in [0.5, 1.0, 2.0, 5.0, 16.0, 256.0] {
                let q = SphereQuadrature::new(d, s).unwrap();
                let want = SphereQuadrature::exact_moment(d, s);
                assert!((q.moment() / want - 1.0).abs() < 1e-10, "d={d} s={s}: {} vs {want}", q.moment());
            }
        }
    }

    #[test]
    fn nodes_are_unit_and_symmetric() {
        let q = SphereQuadrature::with_counts(3, 1.5, 8, 64).unwrap();
        let half = q.len() / 2;
        for i in 0..half {
            let (a, b) = (q.node(i), q.node(i + half));
            assert!((a.iter().map(|x| x * x).sum::<f64>() - 1.0).abs() < 1e-14);
            assert_eq!(a[3], -b[3]);
            assert_eq!(q.weights()[i], q.weights()[i + half]);
        }
    }

    #[test]
    fn second_moment() {
        // ∫_{S^2} |t|^{s-1} t^2 = |S^1| B((s+2)/2, 1)
        let s = 0.5;
        let q = SphereQuadrature::new(2, s).unwrap();
        let got: f64 = (0..q.len()).map(|i| q.weights()[i] * q.node(i)[2].powi(2)).sum();
        let want = SphereQuadrature::exact_moment(2, s + 2.0);
        assert!((got / want - 1.0).abs() < 1e-10);
    }
}

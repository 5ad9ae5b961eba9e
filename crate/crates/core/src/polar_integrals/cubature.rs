//! Nested tanh-sinh cubature over convex regions with exact slice extents.

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::quadrature::{tanh_sinh, tanh_sinh_error, TsNode};
use crate::error::{Error, Result};
use crate::funcmodel::{Bounds, Family, FunctionSpec};
use crate::vecops::{dot, pairwise_sum};

const T_MAX: f64 = 3.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegrationConfig {
    /// Nodes per axis segment (about resolution + 1); at least 16.
    pub resolution: usize,
    /// Unbounded supports are cut where f < tail_eps · sup f.
    pub tail_eps: f64,
    /// Relative gap between the two embedded rules tolerated before failing.
    pub max_rel_err: f64,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig { resolution: 48, tail_eps: 1e-12, max_rel_err: 1e-3 }
    }
}

impl IntegrationConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        IntegrationConfig { resolution, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.resolution < 16 {
            return Err(Error::input("integration resolution must be at least 16"));
        }
        if !(self.tail_eps > 0.0 && self.tail_eps < 1e-3) {
            return Err(Error::input("tail_eps must lie in (0, 1e-3)"));
        }
        if !(self.max_rel_err > 0.0) {
            return Err(Error::input("max_rel_err must be positive"));
        }
        Ok(())
    }

    fn rule(&self) -> Vec<TsNode> {
        let k = (self.resolution.div_ceil(2)).max(8);
        tanh_sinh(k.div_ceil(4) * 4, T_MAX)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub err_est: f64,
    pub nodes: usize,
}

type ScalarFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type PredicateFn = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// Integration domain. Slices along the axes are computed exactly for balls,
/// polytopes and convex sublevel sets, and by scanning for predicates.
#[derive(Clone)]
pub enum Region {
    Ball { center: Vec<f64>, radius: f64 },
    /// {x : <n_i, x> <= c_i}
    Polytope { normals: Vec<Vec<f64>>, offsets: Vec<f64> },
    /// {x : g(x) < 0} with g convex, contained in `bounds`.
    Sublevel { g: ScalarFn, bounds: Bounds },
    /// {x : inside(x)} for a convex set contained in `bounds`.
    Predicate { inside: PredicateFn, bounds: Bounds },
}

impl std::fmt::Debug for Region {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Region::Ball { center, radius } => write!(f, "Ball({center:?}, {radius})"),
            Region::Polytope { offsets, .. } => write!(f, "Polytope({} facets)", offsets.len()),
            Region::Sublevel { bounds, .. } => write!(f, "Sublevel({bounds:?})"),
            Region::Predicate { bounds, .. } => write!(f, "Predicate({bounds:?})"),
        }
    }
}

/// Orthonormal frame: rows are the new axes, x = sum_i xi_i rows[i].
pub type Frame = Vec<Vec<f64>>;

pub(crate) fn to_world(frame: &Frame, xi: &[f64]) -> Vec<f64> {
    let d = xi.len();
    let mut x = vec![0.0; d];
    for (i, row) in frame.iter().enumerate() {
        for j in 0..d {
            x[j] += xi[i] * row[j];
        }
    }
    x
}

pub(crate) fn to_frame(frame: &Frame, x: &[f64]) -> Vec<f64> {
    frame.iter().map(|row| dot(row, x)).collect()
}

fn frame_bounds(frame: &Frame, b: &Bounds) -> Bounds {
    let d = b.dim();
    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for m in 0..1usize << d {
        let corner: Vec<f64> = (0..d).map(|i| if (m >> i) & 1 == 0 { b.lo[i] } else { b.hi[i] }).collect();
        let xi = to_frame(frame, &corner);
        for i in 0..d {
            lo[i] = lo[i].min(xi[i]);
            hi[i] = hi[i].max(xi[i]);
        }
    }
    Bounds { lo, hi }
}

impl Region {
    pub fn dim(&self) -> usize {
        match self {
            Region::Ball { center, .. } => center.len(),
            Region::Polytope { normals, .. } => normals[0].len(),
            Region::Sublevel { bounds, .. } | Region::Predicate { bounds, .. } => bounds.dim(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Region::Ball { center, radius } => crate::vecops::dist(x, center) <= *radius,
            Region::Polytope { normals, offsets } => {
                normals.iter().zip(offsets).all(|(n, c)| dot(n, x) <= *c)
            }
            Region::Sublevel { g, .. } => g(x) < 0.0,
            Region::Predicate { inside, .. } => inside(x),
        }
    }

    pub fn translate(self, v: &[f64]) -> Region {
        let v = v.to_vec();
        match self {
            Region::Ball { center, radius } => Region::Ball {
                center: center.iter().zip(&v).map(|(a, b)| a + b).collect(),
                radius,
            },
            Region::Polytope { normals, offsets } => {
                let offsets = normals.iter().zip(&offsets).map(|(n, c)| c + dot(n, &v)).collect();
                Region::Polytope { normals, offsets }
            }
            Region::Sublevel { g, bounds } => {
                let vv = v.clone();
                Region::Sublevel {
                    g: Arc::new(move |x: &[f64]| g(&crate::vecops::sub(x, &vv))),
                    bounds: bounds.translate(&v),
                }
            }
            Region::Predicate { inside, bounds } => {
                let vv = v.clone();
                Region::Predicate {
                    inside: Arc::new(move |x: &[f64]| inside(&crate::vecops::sub(x, &vv))),
                    bounds: bounds.translate(&v),
                }
            }
        }
    }

    /// The same set expressed in the coordinates of `frame`.
    pub fn in_frame(self, frame: &Frame) -> Region {
        match self {
            Region::Ball { center, radius } => Region::Ball { center: to_frame(frame, &center), radius },
            Region::Polytope { normals, offsets } => Region::Polytope {
                normals: normals.iter().map(|n| to_frame(frame, n)).collect(),
                offsets,
            },
            Region::Sublevel { g, bounds } => {
                let fr = frame.clone();
                Region::Sublevel {
                    bounds: frame_bounds(frame, &bounds),
                    g: Arc::new(move |xi: &[f64]| g(&to_world(&fr, xi))),
                }
            }
            Region::Predicate { inside, bounds } => {
                let fr = frame.clone();
                Region::Predicate {
                    bounds: frame_bounds(frame, &bounds),
                    inside: Arc::new(move |xi: &[f64]| inside(&to_world(&fr, xi))),
                }
            }
        }
    }

    /// Extent of {t : (prefix, t, ...) in region} along axis prefix.len().
    pub fn slice(&self, prefix: &[f64]) -> Option<(f64, f64)> {
        match self {
            Region::Ball { center, radius } => {
                let k = prefix.len();
                let used: f64 = prefix.iter().zip(center).map(|(p, c)| (p - c) * (p - c)).sum();
                let rem = radius * radius - used;
                if rem <= 0.0 {
                    return None;
                }
                let w = rem.sqrt();
                Some((center[k] - w, center[k] + w))
            }
            Region::Polytope { normals, offsets } => polytope_slice(normals, offsets, prefix),
            Region::Sublevel { g, bounds } => sublevel_slice(g.as_ref(), bounds, prefix),
            Region::Predicate { inside, bounds } => predicate_slice(inside.as_ref(), bounds, prefix),
        }
    }
}

fn solve_small(a: &[Vec<f64>], b: &[f64]) -> Option<Vec<f64>> {
    let m = b.len();
    let mut aug: Vec<Vec<f64>> = (0..m).map(|i| {
        let mut r = a[i].clone();
        r.push(b[i]);
        r
    }).collect();
    for col in 0..m {
        let piv = (col..m).max_by(|&i, &j| aug[i][col].abs().partial_cmp(&aug[j][col].abs()).unwrap())?;
        if aug[piv][col].abs() < 1e-12 {
            return None;
        }
        aug.swap(col, piv);
        for r in 0..m {
            if r != col {
                let f = aug[r][col] / aug[col][col];
                for c in col..=m {
                    aug[r][c] -= f * aug[col][c];
                }
            }
        }
    }
    Some((0..m).map(|i| aug[i][m] / aug[i][i]).collect())
}

/// Range of x_k over the polytope slice with x_0..x_{k-1} fixed (vertex enumeration).
fn polytope_slice(normals: &[Vec<f64>], offsets: &[f64], prefix: &[f64]) -> Option<(f64, f64)> {
    let d = normals[0].len();
    let k = prefix.len();
    let m = d - k;
    let rows: Vec<(Vec<f64>, f64)> = normals
        .iter()
        .zip(offsets)
        .map(|(n, c)| (n[k..].to_vec(), c - dot(&n[..k], prefix)))
        .collect();
    let scale = offsets.iter().fold(1.0f64, |a, c| a.max(c.abs()));
    let tol = 1e-11 * scale;
    if m == 1 {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        for (a, c) in &rows {
            if a[0] > 0.0 {
                hi = hi.min(c / a[0]);
            } else if a[0] < 0.0 {
                lo = lo.max(c / a[0]);
            } else if *c < 0.0 {
                return None;
            }
        }
        return if lo < hi { Some((lo, hi)) } else { None };
    }
    let n = rows.len();
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut idx: Vec<usize> = (0..m).collect();
    loop {
        let a: Vec<Vec<f64>> = idx.iter().map(|&i| rows[i].0.clone()).collect();
        let b: Vec<f64> = idx.iter().map(|&i| rows[i].1).collect();
        if let Some(v) = solve_small(&a, &b) {
            if rows.iter().all(|(a, c)| dot(a, &v) <= c + tol) {
                lo = lo.min(v[0]);
                hi = hi.max(v[0]);
            }
        }
        // next combination
        let mut i = m;
        loop {
            if i == 0 {
                return if lo < hi { Some((lo, hi)) } else { None };
            }
            i -= 1;
            if idx[i] < n - m + i {
                idx[i] += 1;
                for j in i + 1..m {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..64 {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Min of g over the remaining coordinates within the bounds.
fn min_rest(g: &dyn Fn(&[f64]) -> f64, bounds: &Bounds, prefix: &mut Vec<f64>) -> f64 {
    let k = prefix.len();
    if k == bounds.dim() {
        return g(prefix);
    }
    let inner = |t: f64| {
        let mut p = prefix.clone();
        p.push(t);
        min_rest(g, bounds, &mut p)
    };
    golden_min(&inner, bounds.lo[k], bounds.hi[k]).1
}

fn bisect_edge(neg_at: f64, pos_at: f64, is_inside: &dyn Fn(f64) -> bool) -> f64 {
    let (mut a, mut b) = (neg_at, pos_at);
    for _ in 0..80 {
        let m = 0.5 * (a + b);
        if m == a || m == b {
            break;
        }
        if is_inside(m) {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

fn sublevel_slice(g: &dyn Fn(&[f64]) -> f64, bounds: &Bounds, prefix: &[f64]) -> Option<(f64, f64)> {
    let k = prefix.len();
    let m = |t: f64| {
        let mut p = prefix.to_vec();
        p.push(t);
        min_rest(g, bounds, &mut p)
    };
    let (lo, hi) = (bounds.lo[k], bounds.hi[k]);
    let (t_star, v) = golden_min(&m, lo, hi);
    if !(v < 0.0) {
        return None;
    }
    let inside = |t: f64| m(t) < 0.0;
    let left = if inside(lo) { lo } else { bisect_edge(t_star, lo, &inside) };
    let right = if inside(hi) { hi } else { bisect_edge(t_star, hi, &inside) };
    Some((left, right))
}

fn predicate_slice(
    inside: &(dyn Fn(&[f64]) -> bool + Send + Sync),
    bounds: &Bounds,
    prefix: &[f64],
) -> Option<(f64, f64)> {
    const SCAN: usize = 65;
    let k = prefix.len();
    let d = bounds.dim();
    let test = |t: f64| {
        let mut p = prefix.to_vec();
        p.push(t);
        if k + 1 == d {
            inside(&p)
        } else {
            predicate_slice(inside, bounds, &p).is_some()
        }
    };
    let (lo, hi) = (bounds.lo[k], bounds.hi[k]);
    let at = |i: usize| lo + (hi - lo) * i as f64 / (SCAN - 1) as f64;
    let hits: Vec<usize> = (0..SCAN).filter(|&i| test(at(i))).collect();
    let (&first, &last) = (hits.first()?, hits.last()?);
    let left = if first == 0 { lo } else { bisect_edge(at(first), at(first - 1), &test) };
    let right = if last == SCAN - 1 { hi } else { bisect_edge(at(last), at(last + 1), &test) };
    Some((left, right))
}

/// Materialized product rule: points with weights of three nested step sizes.
#[derive(Debug, Clone)]
pub struct Cubature {
    dim: usize,
    points: Vec<f64>,
    weights: [Vec<f64>; 3],
}

impl Cubature {
    /// Builds the rule over `region`, splitting each axis at `split` and
    /// optionally clipping axis 0 to `axis0`.
    pub fn build(region: &Region, split: &[f64], axis0: Option<(f64, f64)>, cfg: &IntegrationConfig) -> Cubature {
        let rule = cfg.rule();
        let d = region.dim();
        let mut cub = Cubature { dim: d, points: Vec::new(), weights: Default::default() };
        let mut prefix = Vec::with_capacity(d);
        cub.fill(region, split, axis0, &rule, &mut prefix, [1.0; 3]);
        cub
    }

    #[allow(clippy::too_many_arguments)]
    fn fill(
        &mut self,
        region: &Region,
        split: &[f64],
        axis0: Option<(f64, f64)>,
        rule: &[TsNode],
        prefix: &mut Vec<f64>,
        w: [f64; 3],
    ) {
        let k = prefix.len();
        let Some((mut a, mut b)) = region.slice(prefix) else {
            return;
        };
        if k == 0 {
            if let Some((lo, hi)) = axis0 {
                a = a.max(lo);
                b = b.min(hi);
            }
        }
        if !(b > a) {
            return;
        }
        let segs: Vec<(f64, f64)> = if split[k] > a && split[k] < b {
            vec![(a, split[k]), (split[k], b)]
        } else {
            vec![(a, b)]
        };
        for (a, b) in segs {
            let half = 0.5 * (b - a);
            for node in rule {
                let x = if node.from_left < 1.0 { a + half * node.from_left } else { b - half * node.from_right };
                if x <= a || x >= b {
                    continue;
                }
                let nw = [w[0] * half * node.fine, w[1] * half * node.coarse, w[2] * half * node.coarser];
                prefix.push(x);
                if k + 1 == self.dim {
                    self.points.extend_from_slice(prefix);
                    for (dst, v) in self.weights.iter_mut().zip(nw) {
                        dst.push(v);
                    }
                } else {
                    self.fill(region, split, axis0, rule, prefix, nw);
                }
                prefix.pop();
            }
        }
    }

    /// Rule over the union of cones conv(0, q_1, ..., q_d) for the given
    /// facet simplices, in coordinates y = r·q(t) with tanh-sinh on each
    /// coordinate. Functions of <v, y> with v dual to the facet are smooth in
    /// t and have their endpoint singularity at r = 1.
    pub fn cones(simplices: &[Vec<Vec<f64>>], cfg: &IntegrationConfig) -> Cubature {
        let rule = cfg.rule();
        let d = simplices.first().map_or(0, |s| s.len());
        let mut cub = Cubature { dim: d, points: Vec::new(), weights: Default::default() };
        let unit: Vec<(f64, [f64; 3])> = rule
            .iter()
            .filter_map(|n| {
                let x = if n.from_left < 1.0 { 0.5 * n.from_left } else { 1.0 - 0.5 * n.from_right };
                (x > 0.0 && x < 1.0).then_some((x, [0.5 * n.fine, 0.5 * n.coarse, 0.5 * n.coarser]))
            })
            .collect();
        let mut push = |y: Vec<f64>, w: [f64; 3]| {
            cub.points.extend(y);
            for (dst, v) in cub.weights.iter_mut().zip(w) {
                dst.push(v);
            }
        };
        let mul = |a: [f64; 3], b: [f64; 3], c: f64| [a[0] * b[0] * c, a[1] * b[1] * c, a[2] * b[2] * c];
        for q in simplices {
            match d {
                1 => {
                    for &(r, wr) in &unit {
                        push(vec![r * q[0][0]], mul(wr, [1.0; 3], q[0][0].abs()));
                    }
                }
                2 => {
                    let det = (q[0][0] * q[1][1] - q[0][1] * q[1][0]).abs();
                    for &(r, wr) in &unit {
                        for &(t, wt) in &unit {
                            let y = (0..2).map(|k| r * (q[0][k] + t * (q[1][k] - q[0][k]))).collect();
                            push(y, mul(wr, wt, r * det));
                        }
                    }
                }
                _ => {
                    let c = [
                        q[1][1] * q[2][2] - q[1][2] * q[2][1],
                        q[1][2] * q[2][0] - q[1][0] * q[2][2],
                        q[1][0] * q[2][1] - q[1][1] * q[2][0],
                    ];
                    let det = dot(&q[0], &c).abs();
                    for &(r, wr) in &unit {
                        for &(u, wu) in &unit {
                            let wru = mul(wr, wu, r * r * u * det);
                            for &(v, wv) in &unit {
                                let y = (0..3)
                                    .map(|k| r * (q[0][k] + u * (q[1][k] - q[0][k]) + u * v * (q[2][k] - q[1][k])))
                                    .collect();
                                push(y, mul(wru, wv, 1.0));
                            }
                        }
                    }
                }
            }
        }
        cub
    }

    pub fn len(&self) -> usize {
        self.weights[0].len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights[0].is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.points[i * self.dim..(i + 1) * self.dim]
    }

    /// Integrand values at every node, evaluated in parallel.
    pub fn values(&self, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Vec<f64> {
        (0..self.len()).into_par_iter().map(|i| f(self.point(i))).collect()
    }

    pub fn apply(&self, values: &[f64]) -> Estimate {
        let sums: Vec<f64> = self
            .weights
            .iter()
            .map(|w| {
                let t: Vec<f64> = w.iter().zip(values).map(|(w, v)| if *w == 0.0 { 0.0 } else { w * v }).collect();
                pairwise_sum(&t)
            })
            .collect();
        let value = sums[0];
        let scale = value.abs().max(1e-300);
        let e1 = (value - sums[1]).abs() / scale;
        let e2 = (value - sums[2]).abs() / scale;
        let err_est = if e1.is_nan() || e2.is_nan() { f64::NAN } else { tanh_sinh_error(e1, e2) * scale };
        Estimate { value, err_est, nodes: self.len() }
    }

    pub fn integrate(&self, f: &(dyn Fn(&[f64]) -> f64 + Sync)) -> Estimate {
        self.apply(&self.values(f))
    }

    /// Weighted sums of precomputed values times each coordinate.
    pub fn moments(&self, values: &[f64]) -> Vec<Estimate> {
        (0..self.dim)
            .map(|j| {
                let v: Vec<f64> = (0..self.len()).map(|i| values[i] * self.point(i)[j]).collect();
                self.apply(&v)
            })
            .collect()
    }
}

pub(crate) fn check_estimate(e: Estimate, cfg: &IntegrationConfig, what: &str) -> Result<Estimate> {
    if !e.value.is_finite() {
        return Err(Error::numeric(format!("{what}: integral is not finite")));
    }
    if e.err_est > cfg.max_rel_err * e.value.abs().max(1e-300) && e.err_est > 1e-14 {
        return Err(Error::numeric(format!(
            "{what}: quadrature not converged (value {}, gap {})",
            e.value, e.err_est
        )));
    }
    Ok(e)
}

impl FunctionSpec {
    /// Integration domain covering the support, truncated for unbounded families.
    pub fn support_region(&self, tail_eps: f64) -> Region {
        if let Some((c, law)) = self.radial() {
            let (radius, _) = law.effective_radius(tail_eps);
            return Region::Ball { center: c, radius };
        }
        match self.family() {
            Family::PolytopeIndicator(p) => Region::Polytope {
                normals: p.facets().iter().map(|f| f.normal.clone()).collect(),
                offsets: p.facets().iter().map(|f| f.offset).collect(),
            },
            Family::Shifted { inner, offset } => inner.support_region(tail_eps).translate(offset),
            Family::SApprox { inner, .. } if inner.is_indicator() => inner.support_region(tail_eps),
            _ => {
                let spec = self.clone();
                Region::Predicate {
                    inside: Arc::new(move |x: &[f64]| spec.eval(x) > 0.0),
                    bounds: self.bounding_box(tail_eps),
                }
            }
        }
    }
}

/// ∫f over its (truncated) support.
pub fn integrate_grid(spec: &FunctionSpec, cfg: &IntegrationConfig) -> Result<Estimate> {
    cfg.validate()?;
    let region = spec.support_region(cfg.tail_eps);
    let cub = Cubature::build(&region, &spec.center_hint(), None, cfg);
    let e = cub.integrate(&|x: &[f64]| spec.eval(x));
    check_estimate(e, cfg, "integral of f")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;

    #[test]
    fn hhat_and_gaussian_integrals() {
        let cfg = IntegrationConfig::default();
        let e = integrate_grid(&FunctionSpec::hhat(1, 2.0).unwrap(), &cfg).unwrap();
        assert!((e.value - 4.0 / 3.0).abs() < 1e-12);
        let e = integrate_grid(&FunctionSpec::standard_gaussian(2).unwrap(), &cfg).unwrap();
        assert!((e.value - 2.0 * std::f64::consts::PI).abs() < 1e-6, "{e:?}");
    }

    #[test]
    fn box_is_exact() {
        let cfg = IntegrationConfig::with_resolution(16);
        let b = FunctionSpec::box_indicator(&[-1.0, -1.0], &[1.0, 1.0], Concavity::SConcave(1.0)).unwrap();
        let e = integrate_grid(&b, &cfg).unwrap();
        assert!((e.value - 4.0).abs() < 1e-13);
    }

    #[test]
    fn triangle_polytope_slices() {
        let t = FunctionSpec::polytope(vec![vec![0.0, 0.0], vec![2.0, 0.0], vec![0.0, 1.0]], Concavity::LogConcave)
            .unwrap();
        let e = integrate_grid(&t, &IntegrationConfig::default()).unwrap();
        assert!((e.value - 1.0).abs() < 1e-12);
        let simplex = FunctionSpec::polytope(
            vec![vec![0.0, 0.0, 0.0], vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]],
            Concavity::LogConcave,
        )
        .unwrap();
        let e = integrate_grid(&simplex, &IntegrationConfig::with_resolution(24)).unwrap();
        assert!((e.value - 1.0 / 6.0).abs() < 1e-9, "{e:?}");
    }

    #[test]
    fn sublevel_and_predicate_regions_match_ball() {
        let cfg = IntegrationConfig::with_resolution(24);
        let bounds = Bounds { lo: vec![-2.0, -2.0, -2.0], hi: vec![2.0, 2.0, 2.0] };
        let sub = Region::Sublevel {
            g: Arc::new(|x: &[f64]| (x[0] - 0.2).powi(2) + x[1] * x[1] + x[2] * x[2] - 1.0),
            bounds: bounds.clone(),
        };
        let pred = Region::Predicate {
            inside: Arc::new(|x: &[f64]| (x[0] - 0.2).powi(2) + x[1] * x[1] + x[2] * x[2] < 1.0),
            bounds,
        };
        let want = 4.0 / 3.0 * std::f64::consts::PI;
        for r in [sub, pred] {
            let c = Cubature::build(&r, &[0.2, 0.0, 0.0], None, &cfg);
            let e = c.integrate(&|_| 1.0);
            assert!((e.value - want).abs() < 1e-7, "{r:?} {e:?}");
        }
    }

    #[test]
    fn rotated_cut() {
        // half of the unit disc cut by the line x + y = 0
        let cfg = IntegrationConfig::default();
        let s = 0.5f64.sqrt();
        let frame = vec![vec![s, s], vec![-s, s]];
        let r = Region::Ball { center: vec![0.0, 0.0], radius: 1.0 }.in_frame(&frame);
        let c = Cubature::build(&r, &[0.0, 0.0], Some((0.0, f64::INFINITY)), &cfg);
        let e = c.integrate(&|_| 1.0);
        assert!((e.value - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }
}

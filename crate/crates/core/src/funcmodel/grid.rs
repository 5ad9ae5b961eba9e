//! Tabulated functions, interpolated on the Kuhn (Freudenthal) subdivision of each cell.

use std::collections::VecDeque;

/// Which profile is interpolated linearly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    /// f^{1/s}
    Power(f64),
    /// log f
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridProfile {
    origin: Vec<f64>,
    spacing: Vec<f64>,
    shape: Vec<usize>,
    values: Vec<f64>,
    /// Node positions and values of the closed support, used for support maxima.
    closure: Vec<(Vec<f64>, f64)>,
}

impl GridProfile {
    /// `values` in row-major order (last axis fastest).
    pub fn new(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        values: Vec<f64>,
    ) -> Result<GridProfile, String> {
        let d = origin.len();
        if d == 0 || spacing.len() != d || shape.len() != d {
            return Err("origin, spacing and values must agree in dimension".into());
        }
        if spacing.iter().any(|h| !(h.is_finite() && *h > 0.0)) {
            return Err("spacing must be positive".into());
        }
        if shape.iter().any(|&n| n < 2) {
            return Err("each axis needs at least two nodes".into());
        }
        if values.len() != shape.iter().product::<usize>() {
            return Err("values do not fill the grid".into());
        }
        if values.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err("values must be finite and nonnegative".into());
        }
        let mut g = GridProfile {
            origin,
            spacing,
            shape,
            values,
            closure: Vec::new(),
        };
        if !g.values.iter().any(|&v| v > 0.0) {
            return Err("grid support is empty".into());
        }
        if !g.support_connected() {
            return Err("grid support is not connected".into());
        }
        g.closure = g.closure_nodes();
        Ok(g)
    }

    pub fn dim(&self) -> usize {
        self.origin.len()
    }

    pub fn origin(&self) -> &[f64] {
        &self.origin
    }

    pub fn spacing(&self) -> &[f64] {
        &self.spacing
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn closure(&self) -> &[(Vec<f64>, f64)] {
        &self.closure
    }

    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        let hi = (0..self.dim())
            .map(|i| self.origin[i] + self.spacing[i] * (self.shape[i] - 1) as f64)
            .collect();
        (self.origin.clone(), hi)
    }

    fn flat_index(&self, idx: &[usize]) -> usize {
        idx.iter().zip(&self.shape).fold(0, |acc, (&i, &n)| acc * n + i)
    }

    fn unflatten(&self, mut k: usize) -> Vec<usize> {
        let mut idx = vec![0; self.dim()];
        for i in (0..self.dim()).rev() {
            idx[i] = k % self.shape[i];
            k /= self.shape[i];
        }
        idx
    }

    fn node_position(&self, idx: &[usize]) -> Vec<f64> {
        (0..self.dim())
            .map(|i| self.origin[i] + self.spacing[i] * idx[i] as f64)
            .collect()
    }

    /// At least one cell with every corner positive (needed for a log profile).
    pub fn has_positive_cell(&self) -> bool {
        let d = self.dim();
        (0..self.values.len()).any(|k| {
            let idx = self.unflatten(k);
            if idx.iter().zip(&self.shape).any(|(&i, &n)| i + 1 >= n) {
                return false;
            }
            (0..1usize << d).all(|mask| {
                let c: Vec<usize> = (0..d).map(|a| idx[a] + ((mask >> a) & 1)).collect();
                self.values[self.flat_index(&c)] > 0.0
            })
        })
    }

    fn support_connected(&self) -> bool {
        let d = self.dim();
        let positive: Vec<usize> = (0..self.values.len()).filter(|&k| self.values[k] > 0.0).collect();
        let mut seen = vec![false; self.values.len()];
        let mut queue = VecDeque::from([positive[0]]);
        seen[positive[0]] = true;
        let mut count = 0;
        while let Some(k) = queue.pop_front() {
            count += 1;
            let idx = self.unflatten(k);
            // neighbours sharing a cell: offsets in {-1,0,1}^d
            for code in 0..3usize.pow(d as u32) {
                let mut c = code;
                let mut nb = idx.clone();
                let mut ok = true;
                for a in 0..d {
                    let off = (c % 3) as isize - 1;
                    c /= 3;
                    let v = nb[a] as isize + off;
                    if v < 0 || v >= self.shape[a] as isize {
                        ok = false;
                        break;
                    }
                    nb[a] = v as usize;
                }
                if !ok {
                    continue;
                }
                let j = self.flat_index(&nb);
                if !seen[j] && self.values[j] > 0.0 {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
        count == positive.len()
    }

    /// Nodes in the closure of {f > 0}: positive nodes plus zero nodes sharing
    /// a Kuhn simplex with a positive node.
    fn closure_nodes(&self) -> Vec<(Vec<f64>, f64)> {
        let d = self.dim();
        let mut keep = vec![false; self.values.len()];
        for k in 0..self.values.len() {
            if self.values[k] <= 0.0 {
                continue;
            }
            keep[k] = true;
            let idx = self.unflatten(k);
            // Nodes sharing a Kuhn simplex differ by an offset whose entries
            // all lie in {0,1} or all lie in {0,-1}.
            for sign in [1isize, -1] {
                for mask in 1..1usize << d {
                    let mut nb = idx.clone();
                    let mut ok = true;
                    for a in 0..d {
                        if (mask >> a) & 1 == 1 {
                            let v = nb[a] as isize + sign;
                            if v < 0 || v >= self.shape[a] as isize {
                                ok = false;
                                break;
                            }
                            nb[a] = v as usize;
                        }
                    }
                    if ok {
                        let j = self.flat_index(&nb);
                        keep[j] = true;
                    }
                }
            }
        }
        (0..self.values.len())
            .filter(|&k| keep[k])
            .map(|k| (self.node_position(&self.unflatten(k)), self.values[k]))
            .collect()
    }

    /// Kuhn-simplex vertices (flat indices) and barycentric weights of x,
    /// or `None` outside the grid hull.
    fn simplex(&self, x: &[f64]) -> Option<(Vec<usize>, Vec<f64>)> {
        let d = self.dim();
        let mut base = vec![0usize; d];
        let mut frac = vec![0.0; d];
        for i in 0..d {
            let n = self.shape[i];
            let u = (x[i] - self.origin[i]) / self.spacing[i];
            let top = (n - 1) as f64;
            if !(u >= -1e-12 && u <= top + 1e-12) {
                return None;
            }
            let u = u.clamp(0.0, top);
            let k = (u.floor() as usize).min(n - 2);
            base[i] = k;
            frac[i] = u - k as f64;
        }
        let mut order: Vec<usize> = (0..d).collect();
        // descending fraction, stable on the axis index
        order.sort_by(|&a, &b| frac[b].partial_cmp(&frac[a]).unwrap());
        let mut verts = Vec::with_capacity(d + 1);
        let mut weights = Vec::with_capacity(d + 1);
        let mut cur = base.clone();
        verts.push(self.flat_index(&cur));
        weights.push(1.0 - frac[order[0]]);
        for j in 0..d {
            cur[order[j]] += 1;
            verts.push(self.flat_index(&cur));
            let next = if j + 1 < d { frac[order[j + 1]] } else { 0.0 };
            weights.push(frac[order[j]] - next);
        }
        Some((verts, weights))
    }

    /// Evaluates f by interpolating the given profile.
    pub fn evaluate(&self, profile: Profile, x: &[f64]) -> f64 {
        let Some((verts, weights)) = self.simplex(x) else {
            return 0.0;
        };
        match profile {
            Profile::Power(s) => {
                let g: f64 = verts
                    .iter()
                    .zip(&weights)
                    .map(|(&k, &w)| w * self.values[k].powf(1.0 / s))
                    .sum();
                if g > 0.0 {
                    g.powf(s)
                } else {
                    0.0
                }
            }
            Profile::Log => {
                let mut acc = 0.0;
                for (&k, &w) in verts.iter().zip(&weights) {
                    if w == 0.0 {
                        continue;
                    }
                    let v = self.values[k];
                    if v <= 0.0 {
                        return 0.0;
                    }
                    acc += w * v.ln();
                }
                acc.exp()
            }
        }
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().cloned().fold(0.0, f64::max)
    }

    pub fn cell_size(&self) -> f64 {
        self.spacing.iter().map(|h| h * h).sum::<f64>().sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tent() -> GridProfile {
        // f(x) = 1 - |x| on [-1, 1]
        GridProfile::new(vec![-1.0], vec![0.5], vec![5], vec![0.0, 0.5, 1.0, 0.5, 0.0]).unwrap()
    }

    #[test]
    fn interpolates_power_profile() {
        let g = tent();
        assert!((g.evaluate(Profile::Power(1.0), &[0.25]) - 0.75).abs() < 1e-15);
        assert_eq!(g.evaluate(Profile::Power(1.0), &[1.5]), 0.0);
    }

    #[test]
    fn separable_data_is_reproduced() {
        // log f = -(|x| + |y|) sampled on the nodes
        let n = 5;
        let mut vals = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let x = -1.0 + 0.5 * i as f64;
                let y = -1.0 + 0.5 * j as f64;
                vals.push((-(x * 0.3) - y * 0.7).exp());
            }
        }
        let g = GridProfile::new(vec![-1.0, -1.0], vec![0.5, 0.5], vec![n, n], vals).unwrap();
        let x = [0.13, -0.41];
        let want = (-(x[0] * 0.3) - x[1] * 0.7f64).exp();
        assert!((g.evaluate(Profile::Log, &x) - want).abs() < 1e-14);
    }

    #[test]
    fn disconnected_support_rejected() {
        let r = GridProfile::new(vec![0.0], vec![1.0], vec![5], vec![1.0, 0.0, 0.0, 1.0, 0.0]);
        assert!(r.is_err());
    }

    #[test]
    fn closure_includes_neighbouring_zeros() {
        let g = tent();
        assert_eq!(g.closure().len(), 5);
        let g = GridProfile::new(vec![0.0], vec![1.0], vec![5], vec![0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
        let xs: Vec<f64> = g.closure().iter().map(|(p, _)| p[0]).collect();
        assert_eq!(xs, vec![1.0, 2.0, 3.0]);
    }
}

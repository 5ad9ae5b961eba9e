//! Derivative-free local search used where no closed-form maximizer exists.

use crate::funcmodel::Bounds;
use crate::vecops::lex_less;

fn clamp_into(x: &mut [f64], b: &Bounds) {
    for i in 0..x.len() {
        x[i] = x[i].clamp(b.lo[i], b.hi[i]);
    }
}

/// Maximizes `obj` over the box from the `starts` best points of a coarse grid.
/// `obj` may return -inf outside its domain.
pub fn nelder_mead_max(obj: &dyn Fn(&[f64]) -> f64, bbox: &Bounds, starts: usize) -> (Vec<f64>, f64) {
    let d = bbox.dim();
    let n: usize = match d {
        1 => 65,
        2 => 17,
        _ => 9,
    };
    let mut seeds: Vec<(f64, Vec<f64>)> = Vec::new();
    let total = n.pow(d as u32);
    for k in 0..total {
        let mut c = k;
        let p: Vec<f64> = (0..d)
            .map(|i| {
                let j = c % n;
                c /= n;
                bbox.lo[i] + (bbox.hi[i] - bbox.lo[i]) * j as f64 / (n - 1) as f64
            })
            .collect();
        let v = obj(&p);
        if v > f64::NEG_INFINITY {
            seeds.push((v, p));
        }
    }
    if seeds.is_empty() {
        let c = bbox.center();
        let v = obj(&c);
        return (c, v);
    }
    seeds.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap()
            .then_with(|| if lex_less(&a.1, &b.1) { std::cmp::Ordering::Less } else { std::cmp::Ordering::Greater })
    });
    let step: Vec<f64> = (0..d).map(|i| (bbox.hi[i] - bbox.lo[i]) / (n - 1) as f64).collect();
    let mut best = seeds[0].1.clone();
    let mut best_v = seeds[0].0;
    for (_, p) in seeds.iter().take(starts) {
        let (x, v) = nelder_mead(obj, p, &step, bbox);
        if v > best_v || (v == best_v && lex_less(&x, &best)) {
            best = x;
            best_v = v;
        }
    }
    (best, best_v)
}

/// Plain Nelder–Mead (maximization) with projection onto the box.
pub fn nelder_mead(
    obj: &dyn Fn(&[f64]) -> f64,
    start: &[f64],
    step: &[f64],
    bbox: &Bounds,
) -> (Vec<f64>, f64) {
    let d = start.len();
    let mut simplex: Vec<Vec<f64>> = vec![start.to_vec()];
    for i in 0..d {
        let mut p = start.to_vec();
        p[i] += if p[i] + step[i] <= bbox.hi[i] { step[i] } else { -step[i] };
        clamp_into(&mut p, bbox);
        simplex.push(p);
    }
    let mut vals: Vec<f64> = simplex.iter().map(|p| obj(p)).collect();
    let scale = bbox.diameter().max(1e-300);
    for _ in 0..4000 {
        let mut order: Vec<usize> = (0..=d).collect();
        order.sort_by(|&a, &b| vals[b].partial_cmp(&vals[a]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = order.iter().map(|&i| simplex[i].clone()).collect();
        vals = order.iter().map(|&i| vals[i]).collect();
        let size = simplex[1..]
            .iter()
            .map(|p| crate::vecops::dist(p, &simplex[0]))
            .fold(0.0, f64::max);
        let spread = vals[0] - vals[d];
        if size <= 1e-12 * scale || (spread.is_finite() && spread <= 1e-15 * (1.0 + vals[0].abs()) && size <= 1e-9 * scale) {
            break;
        }
        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|p| p[i]).sum::<f64>() / d as f64)
            .collect();
        let along = |t: f64| {
            let mut p: Vec<f64> = (0..d).map(|i| centroid[i] + t * (simplex[d][i] - centroid[i])).collect();
            clamp_into(&mut p, bbox);
            p
        };
        let xr = along(-1.0);
        let fr = obj(&xr);
        if fr > vals[0] {
            let xe = along(-2.0);
            let fe = obj(&xe);
            if fe > fr {
                simplex[d] = xe;
                vals[d] = fe;
            } else {
                simplex[d] = xr;
                vals[d] = fr;
            }
        } else if fr > vals[d - 1] {
            simplex[d] = xr;
            vals[d] = fr;
        } else {
            let outside = fr > vals[d];
            let xc = along(if outside { -0.5 } else { 0.5 });
            let fc = obj(&xc);
            if (outside && fc >= fr) || (!outside && fc > vals[d]) {
                simplex[d] = xc;
                vals[d] = fc;
            } else {
                for j in 1..=d {
                    let p: Vec<f64> = (0..d).map(|i| 0.5 * (simplex[0][i] + simplex[j][i])).collect();
                    vals[j] = obj(&p);
                    simplex[j] = p;
                }
            }
        }
    }
    let mut bi = 0;
    for i in 1..=d {
        if vals[i] > vals[bi] {
            bi = i;
        }
    }
    (simplex[bi].clone(), vals[bi])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_concave_maximum() {
        let b = Bounds { lo: vec![-2.0, -2.0], hi: vec![2.0, 2.0] };
        let f = |x: &[f64]| -(x[0] - 0.3).powi(2) - 2.0 * (x[1] + 0.7).powi(2) + 0.5 * x[0] * x[1];
        let (x, _) = nelder_mead_max(&f, &b, 4);
        // stationary point of the quadratic
        let a = [[-2.0, 0.5], [0.5, -4.0]];
        let rhs = [-0.6, 2.8];
        let det = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        let xs = (rhs[0] * a[1][1] - a[0][1] * rhs[1]) / det;
        let ys = (a[0][0] * rhs[1] - rhs[0] * a[1][0]) / det;
        assert!((x[0] - xs).abs() < 1e-6 && (x[1] - ys).abs() < 1e-6, "{x:?}");
    }

    #[test]
    fn respects_box() {
        let b = Bounds { lo: vec![0.0], hi: vec![1.0] };
        let (x, v) = nelder_mead_max(&|x: &[f64]| x[0], &b, 8);
        assert_eq!(x, vec![1.0]);
        assert_eq!(v, 1.0);
    }
}

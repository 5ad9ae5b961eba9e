//! One-dimensional rules: Gauss–Jacobi (Golub–Welsch plus Newton polishing)
//! and tanh-sinh with an embedded half-density rule.

use nalgebra::{DMatrix, SymmetricEigen};

/// Nodes and weights of the n-point Gauss–Jacobi rule for (1-x)^alpha (1+x)^beta on (-1, 1).
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && alpha > -1.0 && beta > -1.0);
    let (a, b) = jacobi_recurrence(n, alpha, beta);
    let mut t = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        t[(i, i)] = a[i];
        if i + 1 < n {
            let off = b[i + 1].sqrt();
            t[(i, i + 1)] = off;
            t[(i + 1, i)] = off;
        }
    }
    let eig = SymmetricEigen::new(t);
    let mut nodes: Vec<f64> = eig.eigenvalues.iter().cloned().collect();
    nodes.sort_by(|x, y| x.partial_cmp(y).unwrap());
    let mu0 = jacobi_mass(alpha, beta);
    let mut weights = Vec::with_capacity(n);
    for x in nodes.iter_mut() {
        // Newton polish on the orthonormal p_n
        for _ in 0..3 {
            let (pn, dpn, _) = orthonormal_eval(*x, n, &a, &b, mu0);
            if dpn != 0.0 {
                let step = pn / dpn;
                let nx = *x - step;
                if nx > -1.0 && nx < 1.0 {
                    *x = nx;
                }
            }
        }
        let (_, _, christoffel) = orthonormal_eval(*x, n, &a, &b, mu0);
        weights.push(1.0 / christoffel);
    }
    (nodes, weights)
}

/// ∫_{-1}^{1} (1-x)^alpha (1+x)^beta dx
pub fn jacobi_mass(alpha: f64, beta: f64) -> f64 {
    ((alpha + beta + 1.0) * std::f64::consts::LN_2 + libm::lgamma(alpha + 1.0) + libm::lgamma(beta + 1.0)
        - libm::lgamma(alpha + beta + 2.0))
    .exp()
}

/// Monic recurrence: diagonal a_k and squared off-diagonal b_k (b_0 unused).
fn jacobi_recurrence(n: usize, alpha: f64, beta: f64) -> (Vec<f64>, Vec<f64>) {
    let ab = alpha + beta;
    let mut a = vec![0.0; n];
    let mut b = vec![0.0; n + 1];
    a[0] = (beta - alpha) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        a[k] = (beta * beta - alpha * alpha) / (s * (s + 2.0));
    }
    for k in 1..=n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        b[k] = if k == 1 {
            4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + alpha) * (kf + beta) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
    }
    (a, b)
}

/// Returns (p_n, p_n', sum_{k<n} p_k^2) for the orthonormal family.
fn orthonormal_eval(x: f64, n: usize, a: &[f64], b: &[f64], mu0: f64) -> (f64, f64, f64) {
    let mut p_prev = 0.0;
    let mut dp_prev = 0.0;
    let mut p = 1.0 / mu0.sqrt();
    let mut dp = 0.0;
    let mut sum = 0.0;
    for k in 0..n {
        sum += p * p;
        let sb_next = b[k + 1].sqrt();
        let sb = if k == 0 { 0.0 } else { b[k].sqrt() };
        let p_next = ((x - a[k]) * p - sb * p_prev) / sb_next;
        let dp_next = (p + (x - a[k]) * dp - sb * dp_prev) / sb_next;
        p_prev = p;
        dp_prev = dp;
        p = p_next;
        dp = dp_next;
    }
    (p, dp, sum)
}

pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    gauss_jacobi(n, 0.0, 0.0)
}

/// A tanh-sinh node on (-1, 1) stored with its distances to both endpoints.
#[derive(Debug, Clone, Copy)]
pub struct TsNode {
    /// 1 + x
    pub from_left: f64,
    /// 1 - x
    pub from_right: f64,
    pub fine: f64,
    /// Weight of the rule with twice the step (zero on odd nodes).
    pub coarse: f64,
    /// Weight of the rule with four times the step.
    pub coarser: f64,
}

/// Tanh-sinh rule with step t_max / k_half on each side, k_half a multiple
/// of 4. Each of the three embedded rules is rescaled to integrate 1 exactly.
pub fn tanh_sinh(k_half: usize, t_max: f64) -> Vec<TsNode> {
    assert!(k_half >= 4 && k_half % 4 == 0);
    let h = t_max / k_half as f64;
    let half_pi = std::f64::consts::FRAC_PI_2;
    let mut out = Vec::with_capacity(2 * k_half + 1);
    for k in -(k_half as i64)..=(k_half as i64) {
        let t = k as f64 * h;
        let u = half_pi * t.sinh();
        let ch = (half_pi * t.sinh()).cosh();
        let w = h * half_pi * t.cosh() / (ch * ch);
        // 1 - tanh|u| = 2 / (e^{2|u|} + 1)
        let tail = 2.0 / ((2.0 * u.abs()).exp() + 1.0);
        let (from_left, from_right) = if u < 0.0 { (tail, 2.0 - tail) } else { (2.0 - tail, tail) };
        if w == 0.0 || tail == 0.0 {
            continue;
        }
        let coarse = if k % 2 == 0 { 2.0 * w } else { 0.0 };
        let coarser = if k % 4 == 0 { 4.0 * w } else { 0.0 };
        out.push(TsNode { from_left, from_right, fine: w, coarse, coarser });
    }
    let sums = out.iter().fold([0.0; 3], |a, n| [a[0] + n.fine, a[1] + n.coarse, a[2] + n.coarser]);
    for n in &mut out {
        n.fine *= 2.0 / sums[0];
        n.coarse *= 2.0 / sums[1];
        n.coarser *= 2.0 / sums[2];
    }
    out
}

/// Error of the finest of three tanh-sinh levels from the gaps
/// e1 = |S_h - S_2h| and e2 = |S_h - S_4h|, both relative to |S_h|.
/// Uses the usual double-exponential extrapolation 10^{max(d1²/d2, 2 d1)},
/// never exceeding e1.
pub fn tanh_sinh_error(e1: f64, e2: f64) -> f64 {
    if e1 == 0.0 {
        return 0.0;
    }
    if !(e1 < 1.0 && e2 < 1.0 && e2 > e1) {
        return e1;
    }
    let (d1, d2) = (e1.log10(), e2.log10());
    10f64.powf((d1 * d1 / d2).max(2.0 * d1).min(d1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(16);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(30)).sum();
        assert!((s - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn jacobi_moments() {
        for &(al, be) in &[(0.0, -0.5), (-0.5, 4.0), (0.5, 0.0), (-0.5, 255.0), (0.0, -0.9)] {
            let (x, w) = gauss_jacobi(40, al, be);
            let m0: f64 = w.iter().sum();
            assert!((m0 / jacobi_mass(al, be) - 1.0).abs() < 1e-13, "{al} {be}");
            // ∫ (1+x) w = mass(al, be+1)
            let m1: f64 = x.iter().zip(&w).map(|(x, w)| w * (1.0 + x)).sum();
            assert!((m1 / jacobi_mass(al, be + 1.0) - 1.0).abs() < 1e-12, "{al} {be}");
        }
    }

    #[test]
    fn single_node() {
        let (x, w) = gauss_jacobi(1, 0.0, 0.0);
        assert!(x[0].abs() < 1e-15 && (w[0] - 2.0).abs() < 1e-15);
        let (x, _) = gauss_jacobi(1, -0.5, -0.5);
        assert!(x[0].abs() < 1e-15);
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let rule = tanh_sinh(24, 3.5);
        assert!(tanh_sinh_error(1e-4, 1e-2) <= 1e-8);
        // ∫_{-1}^{1} (1+x)^{-1/2} dx = 2 sqrt 2
        let fine: f64 = rule.iter().map(|n| n.fine * n.from_left.powf(-0.5)).sum();
        assert!((fine - 2.0 * 2f64.sqrt()).abs() < 1e-9, "{fine}");
        let smooth: f64 = rule.iter().map(|n| n.fine * (n.from_left - 1.0).exp()).sum();
        let want = 1f64.exp() - (-1f64).exp();
        assert!((smooth - want).abs() < 1e-14);
        let coarse: f64 = rule.iter().map(|n| n.coarse * (n.from_left - 1.0).exp()).sum();
        assert!((coarse - want).abs() < 1e-7);
        for k in [8, 16, 24] {
            let r = tanh_sinh(k, 3.5);
            let sums = r.iter().fold([0.0; 3], |a, n| [a[0] + n.fine, a[1] + n.coarse, a[2] + n.coarser]);
            assert!(sums.iter().all(|v| (v - 2.0).abs() < 1e-14));
        }
    }
}

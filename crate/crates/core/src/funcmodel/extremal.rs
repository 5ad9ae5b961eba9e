//! Maximization of <x, y> + w Λ(x) over the support, where Λ is f^{1/s} or log f.
//!
//! This one routine gives support functions of liftings, the minimizers behind
//! the s-polar transform and Legendre transforms of -log f.

use super::{Family, FunctionSpec, RadialLaw, DEFAULT_TAIL_EPS};
use crate::optim::nelder_mead_max;
use crate::vecops::{add, dot, lex_less, norm};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Lift {
    /// Λ = f^{1/s} with weight w >= 0.
    Power { s: f64, weight: f64 },
    /// Λ = log f with weight 1.
    Log,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub point: Vec<f64>,
    /// Λ at the maximizer.
    pub profile: f64,
    /// The maximizer sits on a truncation boundary with the objective still rising.
    pub at_truncation: bool,
}

impl Lift {
    fn weight(&self) -> f64 {
        match *self {
            Lift::Power { weight, .. } => weight,
            Lift::Log => 1.0,
        }
    }

    /// Λ from log f.
    fn from_log(&self, l: f64) -> f64 {
        match *self {
            Lift::Power { s, .. } => {
                if l == f64::NEG_INFINITY {
                    0.0
                } else {
                    (l / s).exp()
                }
            }
            Lift::Log => l,
        }
    }
}

impl FunctionSpec {
    /// sup over the closed support of <x, y> + w Λ(x).
    pub fn extremum(&self, lift: Lift, y: &[f64]) -> Extremum {
        if let Some((c, law)) = self.radial() {
            return radial_extremum(&c, &law, lift, y);
        }
        match &self.family {
            Family::PolytopeIndicator(p) => {
                let (v, h) = p.argmax(y);
                let prof = lift.from_log(0.0);
                Extremum {
                    value: h + lift.weight() * prof,
                    point: v.to_vec(),
                    profile: prof,
                    at_truncation: false,
                }
            }
            Family::GridProfile(g) => {
                let best = grid_extremum(g.closure(), lift, y);
                let exact = match (lift, self.profile()) {
                    (Lift::Log, super::Profile::Log) => true,
                    (Lift::Power { s, .. }, super::Profile::Power(s0)) => s == s0,
                    // exp of a linear profile is convex on each simplex
                    (Lift::Power { .. }, super::Profile::Log) => true,
                    (Lift::Log, super::Profile::Power(_)) => false,
                };
                if exact {
                    best
                } else {
                    let gen = self.generic_extremum(lift, y);
                    if gen.value > best.value {
                        gen
                    } else {
                        best
                    }
                }
            }
            Family::Shifted { inner, offset } => {
                let mut e = inner.extremum(lift, y);
                e.value += dot(offset, y);
                e.point = add(&e.point, offset);
                e
            }
            Family::SApprox { .. } => self.generic_extremum(lift, y),
            _ => unreachable!("radial families handled above"),
        }
    }

    fn lifted_objective(&self, lift: Lift, y: &[f64], x: &[f64]) -> f64 {
        let l = self.log_eval(x);
        if l == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        dot(x, y) + lift.weight() * lift.from_log(l)
    }

    /// Multi-start Nelder–Mead over the bounding box.
    fn generic_extremum(&self, lift: Lift, y: &[f64]) -> Extremum {
        let bbox = self.bounding_box(DEFAULT_TAIL_EPS);
        let obj = |x: &[f64]| self.lifted_objective(lift, y, x);
        let (point, value) = nelder_mead_max(&obj, &bbox, 8);
        let profile = lift.from_log(self.log_eval(&point));
        let mut at_truncation = false;
        if lift == Lift::Log && !self.has_bounded_support() {
            // boundary-gradient test on the truncation box
            let d = self.dimension;
            let width = bbox.diameter();
            for i in 0..d {
                let near_lo = point[i] - bbox.lo[i] <= 1e-6 * width;
                let near_hi = bbox.hi[i] - point[i] <= 1e-6 * width;
                if !(near_lo || near_hi) {
                    continue;
                }
                let h = 1e-4 * width;
                let mut inner = point.clone();
                inner[i] += if near_hi { -h } else { h };
                if obj(&point) > obj(&inner) {
                    at_truncation = true;
                }
            }
        }
        Extremum { value, point, profile, at_truncation }
    }
}

fn grid_extremum(nodes: &[(Vec<f64>, f64)], lift: Lift, y: &[f64]) -> Extremum {
    let w = lift.weight();
    let mut best: Option<(f64, &Vec<f64>, f64)> = None;
    for (p, v) in nodes {
        let prof = lift.from_log(v.ln());
        if prof == f64::NEG_INFINITY {
            continue;
        }
        let val = dot(p, y) + w * prof;
        let better = match best {
            None => true,
            Some((bv, bp, _)) => val > bv || (val == bv && lex_less(p, bp)),
        };
        if better {
            best = Some((val, p, prof));
        }
    }
    let (value, p, profile) = best.expect("grid support is nonempty");
    Extremum { value, point: p.clone(), profile, at_truncation: false }
}

fn radial_extremum(c: &[f64], law: &RadialLaw, lift: Lift, y: &[f64]) -> Extremum {
    let (radius, hard) = law.effective_radius(DEFAULT_TAIL_EPS);
    let ny = norm(y);
    let w = lift.weight();
    let lam = |r: f64| lift.from_log(law.log_value(r));
    let dlam = |r: f64| {
        let l = law.log_value(r);
        if l == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        match lift {
            Lift::Power { s, .. } => (l / s).exp() * law.log_deriv(r) / s,
            Lift::Log => law.log_deriv(r),
        }
    };
    let phi = |r: f64| r * ny + w * lam(r);
    let dphi = |r: f64| {
        let dl = dlam(r);
        if dl == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            ny + w * dl
        }
    };
    let r = if w == 0.0 {
        if ny > 0.0 {
            radius
        } else {
            0.0
        }
    } else {
        maximize_on_interval(&phi, &dphi, radius)
    };
    let dir: Vec<f64> = if ny > 0.0 {
        y.iter().map(|v| v / ny).collect()
    } else {
        vec![0.0; c.len()]
    };
    let point: Vec<f64> = c.iter().zip(&dir).map(|(a, b)| a + r * b).collect();
    let at_truncation = !hard && r >= radius * (1.0 - 1e-9) && dphi(radius) > 0.0;
    Extremum {
        value: dot(c, y) + phi(r),
        point,
        profile: lam(r),
        at_truncation,
    }
}

/// Maximizer of a (typically concave) function on [0, hi]: sampling, then
/// bisection on the derivative inside the best bracket.
fn maximize_on_interval(phi: &dyn Fn(f64) -> f64, dphi: &dyn Fn(f64) -> f64, hi: f64) -> f64 {
    const N: usize = 16;
    let at = |i: usize| hi * i as f64 / N as f64;
    let mut best_i = 0;
    let mut best = phi(0.0);
    for i in 1..=N {
        let v = phi(at(i));
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let mut a = at(best_i.saturating_sub(1));
    let mut b = at((best_i + 1).min(N));
    let (da, db) = (dphi(a), dphi(b));
    let r = if da > 0.0 && db < 0.0 {
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if dphi(m) > 0.0 {
                a = m;
            } else {
                b = m;
            }
        }
        // the side with the larger value
        if phi(b) > phi(a) {
            b
        } else {
            a
        }
    } else {
        golden_max(phi, a, b)
    };
    let candidates = [r, at(best_i), 0.0, hi];
    let mut out = r;
    let mut val = phi(r);
    for &c in &candidates[1..] {
        let v = phi(c);
        if v > val {
            val = v;
            out = c;
        }
    }
    out
}

pub(crate) fn golden_max(phi: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = phi(x1);
    let mut f2 = phi(x2);
    for _ in 0..200 {
        if b - a <= 1e-15 * (a.abs() + b.abs()).max(1e-300) {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = phi(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = phi(x1);
        }
    }
    if f1 >= f2 {
        x1
    } else {
        x2
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;

    #[test]
    fn ball_support_function() {
        let b = FunctionSpec::ball(vec![0.5, 0.0], 2.0, Concavity::SConcave(1.0)).unwrap();
        let e = b.extremum(Lift::Power { s: 1.0, weight: 0.0 }, &[0.0, 3.0]);
        assert!((e.value - 6.0).abs() < 1e-14);
        assert!((e.point[1] - 2.0).abs() < 1e-14);
    }

    #[test]
    fn hhat_lifting_is_unit_ball() {
        // sup <x,y> + t (1-|x|^2)^{1/2} = sqrt(|y|^2 + t^2)
        let h = FunctionSpec::hhat(2, 3.0).unwrap();
        for (y, t) in [([0.3, 0.4], 0.2), ([0.0, 1.0], 0.0), ([0.01, 0.0], 0.99995)] {
            let e = h.extremum(Lift::Power { s: 3.0, weight: t }, &y);
            let want = (y[0] * y[0] + y[1] * y[1] + t * t).sqrt();
            assert!((e.value - want).abs() < 1e-13, "{y:?} {t} {} {}", e.value, want);
        }
    }

    #[test]
    fn gaussian_conjugate() {
        let g = FunctionSpec::standard_gaussian(1).unwrap();
        let e = g.extremum(Lift::Log, &[1.5]);
        assert!((e.value - 1.125).abs() < 1e-13);
        assert!(!e.at_truncation);
        let e = FunctionSpec::exp_neg_norm(1, 1.0).unwrap().extremum(Lift::Log, &[1.5]);
        assert!(e.at_truncation);
        let e = FunctionSpec::exp_neg_norm(1, 1.0).unwrap().extremum(Lift::Log, &[0.5]);
        assert!(!e.at_truncation && e.value.abs() < 1e-15);
    }

    #[test]
    fn polytope_ties() {
        let b = FunctionSpec::box_indicator(&[-1.0, -1.0], &[1.0, 1.0], Concavity::SConcave(1.0))
            .unwrap();
        let e = b.extremum(Lift::Power { s: 1.0, weight: 0.5 }, &[1.0, 0.0]);
        assert_eq!(e.point, vec![1.0, -1.0]);
        assert_eq!(e.value, 1.5);
    }
}

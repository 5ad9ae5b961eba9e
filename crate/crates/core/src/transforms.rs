//! The s-polar transform L_s, the log-polar transform L_∞ via the Legendre
//! transform, the approximants f_s and convergence tables as s → ∞.

use std::fmt::Write as _;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::funcmodel::{Bounds, Family, FunctionSpec, Lift, DEFAULT_TAIL_EPS};
use crate::optim::nelder_mead_max;
use crate::polar_integrals::{integrate_grid, phi_log, phi_oracle, IntegrationConfig};
use crate::vecops::{dot, norm};

fn check_s(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::input("s must be positive and finite"));
    }
    Ok(())
}

fn check_point(spec: &FunctionSpec, y: &[f64]) -> Result<()> {
    check_dim(spec.dimension(), y.len(), "point")?;
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::input("point must have finite entries"));
    }
    Ok(())
}

/// L_s f(y) = inf over {f > 0} of (1 - <x, y>)_+^s / f(x).
///
/// Dinkelbach iteration on τ = (1 - <x, y>) / f(x)^{1/s}: each step maximizes
/// <x, y> + τ f(x)^{1/s}, i.e. one support evaluation of the lifting.
pub fn s_polar(spec: &FunctionSpec, s: f64, y: &[f64]) -> Result<f64> {
    check_s(s)?;
    check_point(spec, y)?;
    if !spec.has_bounded_support() && norm(y) > 0.0 {
        return Ok(0.0);
    }
    let h0 = spec.extremum(Lift::Power { s, weight: 0.0 }, y).value;
    if h0 > 1.0 {
        return Ok(0.0);
    }
    let top = spec.extremum(Lift::Power { s, weight: 1.0 }, &vec![0.0; y.len()]);
    let mut tau = (1.0 - dot(&top.point, y)) / top.profile;
    if !(tau > 0.0) {
        return Ok(0.0);
    }
    for _ in 0..100 {
        let e = spec.extremum(Lift::Power { s, weight: tau }, y);
        if e.value <= 1.0 + 1e-14 {
            break;
        }
        if !(e.profile > 0.0) {
            return Ok(0.0);
        }
        let next = (1.0 - dot(&e.point, y)) / e.profile;
        if !(next > 0.0) {
            return Ok(0.0);
        }
        let done = next >= tau * (1.0 - 1e-15);
        tau = tau.min(next);
        if done {
            break;
        }
    }
    Ok(tau.powf(s))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SPolarValue {
    pub value: f64,
    /// Infimum over the cross-check grid, when requested.
    pub grid_value: Option<f64>,
    /// The optimizer did not lose to the grid.
    pub consistent: bool,
}

/// s_polar with an optional dense-grid cross-check of the infimum.
#[derive(Debug, Clone)]
pub struct SPolarEvaluator {
    base: FunctionSpec,
    s: f64,
    grid_resolution: Option<usize>,
}

impl SPolarEvaluator {
    pub fn new(base: FunctionSpec, s: f64) -> Result<SPolarEvaluator> {
        check_s(s)?;
        Ok(SPolarEvaluator { base, s, grid_resolution: None })
    }

    /// Nodes per axis of the cross-check grid (201 is the usual choice).
    pub fn with_cross_check(mut self, resolution: usize) -> SPolarEvaluator {
        self.grid_resolution = Some(resolution.max(3));
        self
    }

    pub fn base(&self) -> &FunctionSpec {
        &self.base
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn evaluate(&self, y: &[f64]) -> Result<SPolarValue> {
        let value = s_polar(&self.base, self.s, y)?;
        let Some(n) = self.grid_resolution else {
            return Ok(SPolarValue { value, grid_value: None, consistent: true });
        };
        let b = self.base.bounding_box(DEFAULT_TAIL_EPS);
        let d = b.dim();
        let total = n.pow(d as u32);
        let mut best = f64::INFINITY;
        let mut x = vec![0.0; d];
        for k in 0..total {
            let mut r = k;
            for i in 0..d {
                x[i] = b.lo[i] + (b.hi[i] - b.lo[i]) * (r % n) as f64 / (n - 1) as f64;
                r /= n;
            }
            let f = self.base.eval(&x);
            if f > 0.0 {
                best = best.min((1.0 - dot(&x, y)).max(0.0).powf(self.s) / f);
            }
        }
        let consistent = !(best < value * (1.0 - 1e-9) - 1e-15);
        Ok(SPolarValue { value: value.min(best), grid_value: Some(best), consistent })
    }
}

/// Extended-real result of a Legendre transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum LegendreValue {
    Finite(f64),
    Infinite,
}

impl LegendreValue {
    pub fn finite(self) -> Option<f64> {
        match self {
            LegendreValue::Finite(v) => Some(v),
            LegendreValue::Infinite => None,
        }
    }
}

type PsiFn = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// A convex potential ψ: R^d → R ∪ {+∞}.
#[derive(Clone)]
pub enum Potential {
    /// ψ = -log f.
    FromFunction(FunctionSpec),
    /// ψ(x) = <a, x> + b.
    Affine { a: Vec<f64>, b: f64 },
    /// Arbitrary ψ searched over a box.
    Custom { psi: PsiFn, search: Bounds },
}

impl std::fmt::Debug for Potential {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Potential::FromFunction(s) => write!(f, "FromFunction({})", s.family_name()),
            Potential::Affine { a, b } => write!(f, "Affine({a:?}, {b})"),
            Potential::Custom { search, .. } => write!(f, "Custom({search:?})"),
        }
    }
}

impl Potential {
    pub fn custom(psi: impl Fn(&[f64]) -> f64 + Send + Sync + 'static, search: Bounds) -> Potential {
        Potential::Custom { psi: Arc::new(psi), search }
    }

    pub fn dim(&self) -> usize {
        match self {
            Potential::FromFunction(s) => s.dimension(),
            Potential::Affine { a, .. } => a.len(),
            Potential::Custom { search, .. } => search.dim(),
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Potential::FromFunction(s) => -s.log_eval(x),
            Potential::Affine { a, b } => dot(a, x) + b,
            Potential::Custom { psi, .. } => psi(x),
        }
    }
}

#[derive(Debug, Clone)]
pub struct LegendreEvaluator {
    potential: Potential,
    /// Values above the cap are reported as +∞.
    cap: f64,
}

impl LegendreEvaluator {
    pub fn new(potential: Potential) -> LegendreEvaluator {
        LegendreEvaluator { potential, cap: 1e12 }
    }

    pub fn with_cap(mut self, cap: f64) -> LegendreEvaluator {
        self.cap = cap;
        self
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// ψ*(y) = sup_x <x, y> - ψ(x).
    pub fn evaluate(&self, y: &[f64]) -> Result<LegendreValue> {
        check_dim(self.potential.dim(), y.len(), "point")?;
        let v = match &self.potential {
            Potential::FromFunction(spec) => {
                let e = spec.extremum(Lift::Log, y);
                if e.at_truncation {
                    return Ok(LegendreValue::Infinite);
                }
                e.value
            }
            Potential::Affine { a, b } => {
                let gap = a.iter().zip(y).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
                if gap <= 1e-12 * (1.0 + norm(a)) {
                    -b
                } else {
                    return Ok(LegendreValue::Infinite);
                }
            }
            Potential::Custom { psi, search } => {
                let obj = |x: &[f64]| {
                    let p = psi(x);
                    if p.is_nan() {
                        f64::NEG_INFINITY
                    } else {
                        dot(x, y) - p
                    }
                };
                let (x, v) = nelder_mead_max(&obj, search, 8);
                if escapes_box(&obj, &x, v, search) {
                    return Ok(LegendreValue::Infinite);
                }
                v
            }
        };
        if v > self.cap {
            Ok(LegendreValue::Infinite)
        } else {
            Ok(LegendreValue::Finite(v))
        }
    }
}

/// The maximizer sits on the search box and the objective keeps rising outward.
fn escapes_box(obj: &dyn Fn(&[f64]) -> f64, x: &[f64], v: f64, b: &Bounds) -> bool {
    for i in 0..x.len() {
        let w = b.hi[i] - b.lo[i];
        let tol = 1e-6 * w;
        for (edge, dir) in [(b.lo[i], -1.0), (b.hi[i], 1.0)] {
            if (x[i] - edge).abs() <= tol {
                let mut p = x.to_vec();
                p[i] += dir * 1e-3 * w;
                if obj(&p) > v + 1e-12 * (1.0 + v.abs()) {
                    return true;
                }
            }
        }
    }
    false
}

pub fn legendre(potential: &Potential, y: &[f64]) -> Result<LegendreValue> {
    LegendreEvaluator::new(potential.clone()).evaluate(y)
}

/// L_∞ f(y) = exp(-(−log f)*(y)). Every 1/s-concave function is log-concave,
/// so any spec is accepted.
pub fn log_polar(spec: &FunctionSpec, y: &[f64]) -> Result<f64> {
    check_point(spec, y)?;
    let e = spec.extremum(Lift::Log, y);
    if e.at_truncation {
        return Ok(0.0);
    }
    Ok((-e.value).exp())
}

/// f_s = (1 + log f / s)_+^s, as a 1/s-concave spec.
pub fn s_approx(spec: &FunctionSpec, s: f64) -> Result<FunctionSpec> {
    check_s(s)?;
    let class = crate::funcmodel::Concavity::SConcave(s);
    if spec.is_indicator() {
        return FunctionSpec::new(spec.dimension(), class, spec.family().clone());
    }
    match spec.family() {
        Family::Shifted { inner, offset } => s_approx(inner, s)?.shifted(offset),
        Family::SApprox { inner, .. } => s_approx(inner, s),
        _ => FunctionSpec::new(
            spec.dimension(),
            class,
            Family::SApprox { inner: Box::new(spec.clone()), s },
        ),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceRow {
    pub s: f64,
    pub x: Vec<f64>,
    pub l_s: f64,
    pub l_inf: f64,
    pub gap: f64,
    pub mahler_s: f64,
    pub mahler_inf: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
    /// Points dropped because they sit on the boundary of supp L_∞ f.
    pub warnings: Vec<String>,
    /// Pointwise gaps and Mahler gaps never grow along the schedule.
    pub monotone: bool,
}

impl ConvergenceTable {
    pub fn to_csv(&self) -> String {
        let d = self.rows.first().map_or(0, |r| r.x.len());
        let mut out = String::from("s");
        for i in 0..d {
            let _ = write!(out, ",x{i}");
        }
        out.push_str(",L_s_value,L_inf_value,gap,mahler_s,mahler_inf\n");
        for r in &self.rows {
            let _ = write!(out, "{}", r.s);
            for v in &r.x {
                let _ = write!(out, ",{v}");
            }
            let _ = writeln!(out, ",{},{},{},{},{}", r.l_s, r.l_inf, r.gap, r.mahler_s, r.mahler_inf);
        }
        out
    }
}

fn on_polar_boundary(spec: &FunctionSpec, x: &[f64]) -> Result<bool> {
    if norm(x) == 0.0 {
        return Ok(false);
    }
    let inner: Vec<f64> = x.iter().map(|v| v * (1.0 - 1e-6)).collect();
    let outer: Vec<f64> = x.iter().map(|v| v * (1.0 + 1e-6)).collect();
    Ok((log_polar(spec, &inner)? > 0.0) != (log_polar(spec, &outer)? > 0.0))
}

/// L_s f_s(x/s) against L_∞ f(x), and s^d ∫f_s ∫L_s f_s against ∫f ∫L_∞ f.
pub fn convergence_study(
    spec: &FunctionSpec,
    points: &[Vec<f64>],
    s_schedule: &[f64],
    cfg: &IntegrationConfig,
) -> Result<ConvergenceTable> {
    let d = spec.dimension();
    let origin = vec![0.0; d];
    if !spec.is_interior(&origin, 1e-9) {
        return Err(Error::domain("the origin must be interior to the support"));
    }
    for s in s_schedule {
        check_s(*s)?;
    }
    let mut warnings = Vec::new();
    let mut kept = Vec::new();
    for x in points {
        check_point(spec, x)?;
        if on_polar_boundary(spec, x)? {
            warnings.push(format!("point {x:?} lies on the boundary of supp L_inf f; excluded"));
        } else {
            kept.push(x.clone());
        }
    }
    let mahler_inf = integrate_grid(spec, cfg)?.value * phi_log(spec, &origin, cfg)?.value;
    let mut rows = Vec::new();
    let mut mahler = Vec::new();
    for &s in s_schedule {
        let fs = s_approx(spec, s)?;
        let m = s.powi(d as i32) * integrate_grid(&fs, cfg)?.value * phi_oracle(&fs, s, &origin, cfg)?.value;
        mahler.push(m);
        for x in &kept {
            let y: Vec<f64> = x.iter().map(|v| v / s).collect();
            let l_s = s_polar(&fs, s, &y)?;
            let l_inf = log_polar(spec, x)?;
            rows.push(ConvergenceRow {
                s,
                x: x.clone(),
                l_s,
                l_inf,
                gap: (l_s - l_inf).abs(),
                mahler_s: m,
                mahler_inf,
            });
        }
    }
    let noise = |a: f64| 1e-9 + 1e-6 * a.abs();
    let mut monotone = true;
    let mut order: Vec<usize> = (0..s_schedule.len()).collect();
    order.sort_by(|a, b| s_schedule[*a].total_cmp(&s_schedule[*b]));
    let k = kept.len();
    for w in order.windows(2) {
        let (a, b) = (w[0], w[1]);
        if (mahler[b] - mahler_inf).abs() > (mahler[a] - mahler_inf).abs() + noise(mahler_inf) {
            monotone = false;
        }
        for p in 0..k {
            let (ra, rb) = (&rows[a * k + p], &rows[b * k + p]);
            if rb.gap > ra.gap + noise(ra.l_inf) {
                monotone = false;
            }
        }
    }
    Ok(ConvergenceTable { rows, warnings, monotone })
}

/// (λ a^{1/(d+s)} + (1-λ) b^{1/(d+s)})^{d+s}, which tends to a^λ b^{1-λ} as s → ∞.
pub fn mean_power(a: f64, b: f64, lambda: f64, d: usize, s: f64) -> f64 {
    let p = d as f64 + s;
    (lambda * a.powf(1.0 / p) + (1.0 - lambda) * b.powf(1.0 / p)).powf(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;

    #[test]
    fn polar_of_ball_indicator() {
        let b = FunctionSpec::ball(vec![0.0, 0.0], 1.0, Concavity::SConcave(1.0)).unwrap();
        for s in [0.5, 1.0, 3.0] {
            let v = s_polar(&b, s, &[0.3, 0.4]).unwrap();
            assert!((v - 0.5f64.powf(s)).abs() < 1e-14);
        }
        assert_eq!(s_polar(&b, 1.0, &[0.0, 1.5]).unwrap(), 0.0);
    }

    #[test]
    fn hhat_is_self_polar() {
        for (d, s) in [(1, 2.0), (2, 0.5), (3, 4.0)] {
            let f = FunctionSpec::hhat(d, s).unwrap();
            let mut y = vec![0.0; d];
            y[0] = 0.6;
            let v = s_polar(&f, s, &y).unwrap();
            assert!((v - f.evaluate(&y).unwrap()).abs() < 1e-12, "{d} {s} {v}");
        }
    }

    #[test]
    fn origin_gives_reciprocal_sup() {
        let g = FunctionSpec::grid(vec![-1.0], vec![1.0], vec![3], vec![0.0, 4.0, 0.0], Concavity::SConcave(1.0)).unwrap();
        assert!((s_polar(&g, 1.0, &[0.0]).unwrap() - 0.25).abs() < 1e-15);
        assert!((log_polar(&g, &[0.0]).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cross_check_agrees() {
        let f = FunctionSpec::hhat(1, 2.0).unwrap();
        let ev = SPolarEvaluator::new(f, 2.0).unwrap().with_cross_check(201);
        let v = ev.evaluate(&[0.4]).unwrap();
        assert!(v.consistent);
        assert!(v.grid_value.unwrap() >= v.value);
    }

    #[test]
    fn legendre_examples() {
        let g = Potential::FromFunction(FunctionSpec::standard_gaussian(2).unwrap());
        let v = legendre(&g, &[1.0, -0.5]).unwrap().finite().unwrap();
        assert!((v - 0.625).abs() < 1e-9, "{v}");
        let n = Potential::FromFunction(FunctionSpec::exp_neg_norm(1, 1.0).unwrap());
        assert_eq!(legendre(&n, &[0.5]).unwrap(), LegendreValue::Finite(0.0));
        assert_eq!(legendre(&n, &[1.5]).unwrap(), LegendreValue::Infinite);
        let a = Potential::Affine { a: vec![1.0], b: 2.0 };
        assert_eq!(legendre(&a, &[1.0]).unwrap(), LegendreValue::Finite(-2.0));
        assert_eq!(legendre(&a, &[0.0]).unwrap(), LegendreValue::Infinite);
        let q = Potential::custom(|x| 0.5 * x[0] * x[0], Bounds { lo: vec![-10.0], hi: vec![10.0] });
        assert!((legendre(&q, &[3.0]).unwrap().finite().unwrap() - 4.5).abs() < 1e-8);
        let abs = Potential::custom(|x| x[0].abs(), Bounds { lo: vec![-10.0], hi: vec![10.0] });
        assert_eq!(legendre(&abs, &[2.0]).unwrap(), LegendreValue::Infinite);
    }

    #[test]
    fn approximants() {
        let g = FunctionSpec::standard_gaussian(1).unwrap();
        let f2 = s_approx(&g, 2.0).unwrap();
        assert_eq!(f2.evaluate(&[0.0]).unwrap(), 1.0);
        assert!((f2.evaluate(&[1.0]).unwrap() - 0.5625).abs() < 1e-15);
        let b = FunctionSpec::ball(vec![0.0], 1.0, Concavity::LogConcave).unwrap();
        let bs = s_approx(&b, 3.0).unwrap();
        assert_eq!(bs.family(), b.family());
    }
}

//! Santaló points, the hyperplane-constrained point of the b± construction,
//! generalized Santaló inequalities and the one-dimensional s-level transform.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::funcmodel::FunctionSpec;
use crate::polar_integrals::{
    integrate_grid, kappa, phi_log, phi_oracle, tanh_sinh, to_world, Cubature, Exponent, IntegrationConfig,
    PhiFunction,
};
use crate::vecops::{dist, dot, frame_with_first, norm, sub};

/// H = {x : <a, x> = c} with |a| = 1; H_+ = {<a, x> >= c}.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Hyperplane {
    normal: Vec<f64>,
    offset: f64,
}

impl Hyperplane {
    /// Normalizes (a, c) so that |a| = 1.
    pub fn new(normal: Vec<f64>, offset: f64) -> Result<Hyperplane> {
        let n = norm(&normal);
        if !(n > 0.0 && n.is_finite() && offset.is_finite()) {
            return Err(Error::input("hyperplane needs a nonzero finite normal and a finite offset"));
        }
        Ok(Hyperplane { normal: normal.iter().map(|v| v / n).collect(), offset: offset / n })
    }

    /// Parses "a1,...,ad,c".
    pub fn parse(text: &str) -> Result<Hyperplane> {
        let v: Vec<f64> = text
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::input(format!("cannot parse hyperplane {text:?}")))?;
        if v.len() < 2 {
            return Err(Error::input("hyperplane needs a normal and an offset"));
        }
        let (a, c) = v.split_at(v.len() - 1);
        Hyperplane::new(a.to_vec(), c[0])
    }

    pub fn normal(&self) -> &[f64] {
        &self.normal
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn dim(&self) -> usize {
        self.normal.len()
    }

    pub fn signed_distance(&self, x: &[f64]) -> f64 {
        dot(&self.normal, x) - self.offset
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolverConfig {
    pub max_iter: usize,
    /// Stop when |∇Φ| <= grad_tol · Φ.
    pub grad_tol: f64,
    /// Compute the barycenter diagnostic with the direct cubature oracle.
    pub oracle_check: bool,
    pub integration: IntegrationConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig { max_iter: 500, grad_tol: 1e-6, oracle_check: true, integration: IntegrationConfig::default() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SantaloResult {
    pub z_star: Vec<f64>,
    pub phi_min: f64,
    /// |∫ y L(shift f)(y) dy| / ∫ L(shift f) at z_star.
    pub polar_barycenter_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// Barzilai–Borwein gradient descent with Armijo backtracking; trial points
/// outside the interior are rejected by halving the step.
pub fn minimize_phi(phi: &PhiFunction, start: &[f64], cfg: &SolverConfig) -> Result<(Vec<f64>, f64, usize, bool)> {
    let mut z = start.to_vec();
    let mut v = phi.value(&z)?;
    let mut g = phi.gradient(&z)?;
    let scale = phi.spec().bounding_box(cfg.integration.tail_eps).diameter();
    let mut alpha = 0.01 * scale / norm(&g).max(1e-300);
    for it in 0..cfg.max_iter {
        let gn = norm(&g);
        if gn <= cfg.grad_tol * v {
            return Ok((z, v, it, true));
        }
        let mut step = alpha;
        let mut accepted = None;
        for _ in 0..80 {
            let trial: Vec<f64> = z.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            if phi.in_domain(&trial) {
                if let Ok(tv) = phi.value(&trial) {
                    if tv.is_finite() && tv <= v - 1e-4 * step * gn * gn {
                        accepted = Some((trial, tv));
                        break;
                    }
                }
            }
            step *= 0.5;
        }
        let Some((zn, vn)) = accepted else {
            // no descent possible at working precision
            return Ok((z, v, it, gn <= 1e3 * cfg.grad_tol * v));
        };
        let gnew = phi.gradient(&zn)?;
        let dz = sub(&zn, &z);
        let dg = sub(&gnew, &g);
        let curv = dot(&dz, &dg);
        alpha = if curv > 0.0 { dot(&dz, &dz) / curv } else { 2.0 * step };
        z = zn;
        v = vn;
        g = gnew;
    }
    let done = norm(&g) <= cfg.grad_tol * v;
    Ok((z, v, cfg.max_iter, done))
}

fn oracle_moment(spec: &FunctionSpec, s: Exponent, z: &[f64], cfg: &IntegrationConfig) -> Result<(f64, Vec<f64>)> {
    let r = match s {
        Exponent::Finite(s) => phi_oracle(spec, s, z, cfg)?,
        Exponent::Infinite => phi_log(spec, z, cfg)?,
    };
    Ok((r.value, r.moment.unwrap_or_default()))
}

/// Newton steps on the oracle gradient (d+s+1)·m(z) (m(z) for s = ∞) with the
/// Hessian of the quadrature Φ. The quadrature gradient is limited by the
/// smoothness of the support function (kinks for polytopes); the oracle is not.
fn polish(phi: &PhiFunction, spec: &FunctionSpec, s: Exponent, start: Vec<f64>, cfg: &SolverConfig) -> Result<(Vec<f64>, f64)> {
    let d = spec.dimension();
    let k = match s {
        Exponent::Finite(s) => d as f64 + s + 1.0,
        Exponent::Infinite => 1.0,
    };
    let h = 1e-4 * spec.bounding_box(cfg.integration.tail_eps).diameter();
    let mut z = start;
    let (val, mut m) = oracle_moment(spec, s, &z, &cfg.integration)?;
    let mut bary = norm(&m) / val;
    for _ in 0..8 {
        if bary <= 1e-8 {
            break;
        }
        let mut hess = nalgebra::DMatrix::zeros(d, d);
        let at = |p: &[f64], i: usize, a: f64, j: usize, b: f64| {
            let mut q = p.to_vec();
            q[i] += a;
            q[j] += b;
            phi.value(&q)
        };
        let f0 = phi.value(&z)?;
        for i in 0..d {
            hess[(i, i)] = (at(&z, i, h, i, 0.0)? - 2.0 * f0 + at(&z, i, -h, i, 0.0)?) / (h * h);
            for j in 0..i {
                let v = (at(&z, i, h, j, h)? - at(&z, i, h, j, -h)? - at(&z, i, -h, j, h)? + at(&z, i, -h, j, -h)?)
                    / (4.0 * h * h);
                hess[(i, j)] = v;
                hess[(j, i)] = v;
            }
        }
        let g = nalgebra::DVector::from_iterator(d, m.iter().map(|x| k * x));
        let Some(step) = hess.cholesky().map(|c| c.solve(&g)) else {
            break;
        };
        let mut t = 1.0;
        let mut trial: Vec<f64> = z.iter().zip(step.iter()).map(|(a, b)| a - t * b).collect();
        while !phi.in_domain(&trial) && t > 1e-6 {
            t *= 0.5;
            trial = z.iter().zip(step.iter()).map(|(a, b)| a - t * b).collect();
        }
        let (nv, nm) = oracle_moment(spec, s, &trial, &cfg.integration)?;
        let nb = norm(&nm) / nv;
        if nb >= bary {
            break;
        }
        z = trial;
        m = nm;
        bary = nb;
    }
    Ok((z, bary))
}

/// Minimizer of Φ_s (finite s) or Φ_∞.
pub fn santalo_point(spec: &FunctionSpec, s: Exponent, cfg: &SolverConfig) -> Result<SantaloResult> {
    let phi = PhiFunction::new(spec, s, &cfg.integration)?;
    let start = spec.center_hint();
    if !phi.in_domain(&start) {
        return Err(Error::domain("no interior starting point for the Santaló solver"));
    }
    let (mut z, mut v, iterations, converged) = minimize_phi(&phi, &start, cfg)?;
    let polar_barycenter_norm = if cfg.oracle_check {
        let (zp, bary) = polish(&phi, spec, s, z, cfg)?;
        z = zp;
        v = phi.value(&z)?;
        bary
    } else {
        let g = phi.gradient(&z)?;
        let k = match s {
            Exponent::Finite(s) => spec.dimension() as f64 + s + 1.0,
            Exponent::Infinite => 1.0,
        };
        norm(&g) / (k * v)
    };
    Ok(SantaloResult { z_star: z, phi_min: v, polar_barycenter_norm, iterations, converged })
}

/// Mass and first moment of f on both sides of H.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HalfSpaceSplit {
    pub mass_plus: f64,
    pub mass_minus: f64,
    /// ∫_{H_+} x f(x) dx
    pub moment_plus: Vec<f64>,
    pub moment_minus: Vec<f64>,
}

impl HalfSpaceSplit {
    pub fn lambda(&self) -> f64 {
        self.mass_plus / (self.mass_plus + self.mass_minus)
    }
}

/// Integrates over each half-space in a frame whose first axis is the normal,
/// so the cut is an exact clip of axis 0.
pub fn half_space_split(spec: &FunctionSpec, h: &Hyperplane, cfg: &IntegrationConfig) -> Result<HalfSpaceSplit> {
    cfg.validate()?;
    check_dim(spec.dimension(), h.dim(), "hyperplane")?;
    let frame = frame_with_first(h.normal());
    let region = spec.support_region(cfg.tail_eps).in_frame(&frame);
    let mut split = crate::polar_integrals::to_frame(&frame, &spec.center_hint());
    split[0] = h.offset();
    let side = |clip: (f64, f64)| -> Result<(f64, Vec<f64>)> {
        let cub = Cubature::build(&region, &split, Some(clip), cfg);
        let vals = cub.values(&|xi: &[f64]| spec.eval(&to_world(&frame, xi)));
        let e = cub.apply(&vals);
        if !e.value.is_finite() {
            return Err(Error::numeric("half-space integral is not finite"));
        }
        let m: Vec<f64> = cub.moments(&vals).iter().map(|m| m.value).collect();
        Ok((e.value, to_world(&frame, &m)))
    };
    let (mass_plus, moment_plus) = side((h.offset(), f64::INFINITY))?;
    let (mass_minus, moment_minus) = side((f64::NEG_INFINITY, h.offset()))?;
    Ok(HalfSpaceSplit { mass_plus, mass_minus, moment_plus, moment_minus })
}

fn check_split(split: &HalfSpaceSplit) -> Result<f64> {
    let lambda = split.lambda();
    if !(lambda > 1e-9 && lambda < 1.0 - 1e-9) {
        return Err(Error::input(format!("hyperplane does not split the mass (λ = {lambda})")));
    }
    Ok(lambda)
}

/// The point of H on the line through the barycenters of f on H_+ and H_-.
pub fn hyperplane_point(spec: &FunctionSpec, h: &Hyperplane, cfg: &IntegrationConfig) -> Result<Vec<f64>> {
    let split = half_space_split(spec, h, cfg)?;
    check_split(&split)?;
    point_from_split(&split, h)
}

fn point_from_split(split: &HalfSpaceSplit, h: &Hyperplane) -> Result<Vec<f64>> {
    if h.dim() == 1 {
        return Ok(vec![h.offset() * h.normal()[0]]);
    }
    let cp: Vec<f64> = split.moment_plus.iter().map(|v| v / split.mass_plus).collect();
    let cm: Vec<f64> = split.moment_minus.iter().map(|v| v / split.mass_minus).collect();
    let (dp, dm) = (h.signed_distance(&cp), h.signed_distance(&cm));
    if !(dp > 0.0 && dm < 0.0) {
        return Err(Error::numeric("half-space barycenters do not straddle the hyperplane"));
    }
    let t = dp / (dp - dm);
    Ok(cp.iter().zip(&cm).map(|(p, m)| p + t * (m - p)).collect())
}

/// Offset c such that ∫_{<a,x> >= c} f = λ ∫ f, by bisection.
pub fn hyperplane_for_lambda(
    spec: &FunctionSpec,
    normal: &[f64],
    lambda: f64,
    cfg: &IntegrationConfig,
) -> Result<Hyperplane> {
    if !(lambda > 0.0 && lambda < 1.0) {
        return Err(Error::input("λ must lie in (0, 1)"));
    }
    let probe = Hyperplane::new(normal.to_vec(), 0.0)?;
    let b = spec.bounding_box(cfg.tail_eps);
    let a = probe.normal().to_vec();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for m in 0..1usize << b.dim() {
        let corner: Vec<f64> = (0..b.dim()).map(|i| if (m >> i) & 1 == 0 { b.lo[i] } else { b.hi[i] }).collect();
        let p = dot(&a, &corner);
        lo = lo.min(p);
        hi = hi.max(p);
    }
    for _ in 0..60 {
        let c = 0.5 * (lo + hi);
        let h = Hyperplane::new(a.clone(), c)?;
        if half_space_split(spec, &h, cfg)?.lambda() > lambda {
            lo = c;
        } else {
            hi = c;
        }
        if hi - lo <= 1e-13 * (1.0 + c.abs()) {
            break;
        }
    }
    Hyperplane::new(a, 0.5 * (lo + hi))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SantaloReport {
    pub family: String,
    pub d: usize,
    pub s: f64,
    pub lambda: f64,
    pub z: Vec<f64>,
    pub product: f64,
    pub bound: f64,
    /// bound - product, relative to the bound
    pub slack: f64,
    pub pass: bool,
}

/// ∫f · Φ(z) at the constructed z ∈ H against κ(d,s)² / (4λ(1-λ)).
pub fn verify_santalo(spec: &FunctionSpec, s: f64, h: &Hyperplane, cfg: &IntegrationConfig) -> Result<SantaloReport> {
    let split = half_space_split(spec, h, cfg)?;
    let lambda = check_split(&split)?;
    let z = point_from_split(&split, h)?;
    let total = integrate_grid(spec, cfg)?.value;
    let phi = PhiFunction::new(spec, Exponent::Finite(s), cfg)?;
    let product = total * phi.value(&z)?;
    let d = spec.dimension();
    let k = kappa(d, s);
    let bound = k * k / (4.0 * lambda * (1.0 - lambda));
    Ok(SantaloReport {
        family: spec.family_name().to_string(),
        d,
        s,
        lambda,
        z,
        product,
        bound,
        slack: (bound - product) / bound,
        pass: product <= bound * (1.0 + 1e-6),
    })
}

type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A nonnegative function on [0, ∞).
#[derive(Clone)]
pub struct HalfLineProfile {
    label: String,
    f: RealFn,
    /// φ vanishes beyond this point.
    support_end: Option<f64>,
}

impl std::fmt::Debug for HalfLineProfile {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "HalfLineProfile({})", self.label)
    }
}

impl HalfLineProfile {
    pub fn custom(label: &str, f: impl Fn(f64) -> f64 + Send + Sync + 'static, support_end: Option<f64>) -> Self {
        HalfLineProfile { label: label.to_string(), f: Arc::new(f), support_end }
    }

    /// 1_{[a, b]}
    pub fn indicator(a: f64, b: f64) -> Self {
        Self::custom(&format!("indicator[{a},{b}]"), move |t| if t >= a && t <= b { 1.0 } else { 0.0 }, Some(b))
    }

    /// (1 - t²)_+^{s/2}, the restriction of ĥ^s.
    pub fn hhat(s: f64) -> Self {
        Self::custom(&format!("hhat^{s}"), move |t| (1.0 - t * t).max(0.0).powf(s / 2.0), Some(1.0))
    }

    /// (1 - t)_+^p
    pub fn linear_power(p: f64) -> Self {
        Self::custom(&format!("(1-t)^{p}"), move |t| (1.0 - t).max(0.0).powf(p), Some(1.0))
    }

    /// e^{-r t}
    pub fn exp_decay(r: f64) -> Self {
        Self::custom(&format!("exp(-{r}t)"), move |t| (-r * t).exp(), None)
    }

    pub fn zero() -> Self {
        Self::custom("zero", |_| 0.0, Some(0.0))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn value(&self, t: f64) -> f64 {
        if t < 0.0 || self.support_end.is_some_and(|e| t > e) {
            return 0.0;
        }
        (self.f)(t)
    }

    /// ∫_0^∞ φ by tanh-sinh in t (bounded support) or in u = t / (1 + t).
    pub fn integral(&self) -> f64 {
        let rule = tanh_sinh(64, 3.5);
        match self.support_end {
            Some(e) if e > 0.0 => {
                let h = 0.5 * e;
                rule.iter().map(|n| n.fine * h * self.value(h * n.from_left)).sum()
            }
            Some(_) => 0.0,
            None => {
                // t = u / (1 - u)
                rule.iter()
                    .map(|n| {
                        let (u, w) = (0.5 * n.from_left, 0.5 * n.from_right);
                        0.5 * n.fine * self.value(u / w) / (w * w)
                    })
                    .sum()
            }
        }
    }
}

const LEVEL_SAMPLES: usize = 1 << 14;

/// Ψ_φ(α) = s e^{sα} vol_1{τ : (φ(e^τ) e^τ)^{1/s} >= e^α}, with the level sets
/// found on a τ-grid and their endpoints refined by bisection.
#[derive(Debug, Clone)]
pub struct LevelTransform {
    profile: HalfLineProfile,
    s: f64,
    taus: Vec<f64>,
    /// log(φ(e^τ) e^τ) on the grid
    logs: Vec<f64>,
    /// largest value of log(φ(e^τ) e^τ)
    log_max: f64,
}

impl LevelTransform {
    pub fn new(profile: HalfLineProfile, s: f64) -> Result<LevelTransform> {
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::input("s must be positive and finite"));
        }
        let logf = |tau: f64| profile.value(tau.exp()).ln() + tau;
        // window where φ(e^τ)e^τ is within e^{-45} of its maximum
        let coarse: Vec<f64> = (0..=4000).map(|i| -100.0 + 0.05 * i as f64).collect();
        let cl: Vec<f64> = coarse.iter().map(|t| logf(*t)).collect();
        let top = cl.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if top == f64::NEG_INFINITY {
            return Ok(LevelTransform { profile, s, taus: vec![], logs: vec![], log_max: f64::NEG_INFINITY });
        }
        let keep: Vec<usize> = (0..cl.len()).filter(|&i| cl[i] >= top - 45.0).collect();
        let (first, last) = (keep[0], *keep.last().unwrap());
        if first == 0 || last == cl.len() - 1 {
            return Err(Error::numeric("level sets of the profile are not bounded in log scale"));
        }
        let (lo, hi) = (coarse[first - 1], coarse[last + 1]);
        let taus: Vec<f64> =
            (0..LEVEL_SAMPLES).map(|i| lo + (hi - lo) * i as f64 / (LEVEL_SAMPLES - 1) as f64).collect();
        let logs: Vec<f64> = taus.iter().map(|t| logf(*t)).collect();
        let (imax, _) = logs.iter().enumerate().fold((0, f64::NEG_INFINITY), |b, (i, v)| if *v > b.1 { (i, *v) } else { b });
        let a = taus[imax.saturating_sub(1)];
        let b = taus[(imax + 1).min(LEVEL_SAMPLES - 1)];
        let t = crate::funcmodel::golden_max(&logf, a, b);
        let log_max = logs[imax].max(logf(t));
        Ok(LevelTransform { profile, s, taus, logs, log_max })
    }

    fn log_f(&self, tau: f64) -> f64 {
        self.profile.value(tau.exp()).ln() + tau
    }

    /// Largest α with a nonempty level set.
    pub fn alpha_max(&self) -> f64 {
        self.log_max / self.s
    }

    /// vol_1{τ : log(φ(e^τ)e^τ) >= sα}.
    pub fn level_measure(&self, alpha: f64) -> f64 {
        let level = self.s * alpha;
        if self.taus.is_empty() || level > self.log_max {
            return 0.0;
        }
        let above = |tau: f64| self.log_f(tau) >= level;
        let crossing = |a: f64, b: f64, a_in: bool| {
            let (mut a, mut b) = (a, b);
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if above(m) == a_in {
                    a = m;
                } else {
                    b = m;
                }
            }
            0.5 * (a + b)
        };
        let mut total = 0.0;
        let mut start: Option<f64> = None;
        let n = self.taus.len();
        for i in 0..n {
            let inside = self.logs[i] >= level;
            match (inside, start) {
                (true, None) => {
                    start = Some(if i == 0 { self.taus[0] } else { crossing(self.taus[i - 1], self.taus[i], false) });
                }
                (false, Some(a)) => {
                    total += crossing(self.taus[i - 1], self.taus[i], true) - a;
                    start = None;
                }
                _ => {}
            }
        }
        if let Some(a) = start {
            total += self.taus[n - 1] - a;
        }
        // a level set thinner than the grid spacing around the maximum
        if total == 0.0 && level <= self.log_max {
            let i = (0..n).fold(0, |b, i| if self.logs[i] > self.logs[b] { i } else { b });
            let (a, b) = (self.taus[i.saturating_sub(1)], self.taus[(i + 1).min(n - 1)]);
            let t = crate::funcmodel::golden_max(&|x| self.log_f(x), a, b);
            if above(t) {
                total = crossing(t, b, true) - crossing(a, t, false);
            }
        }
        total
    }

    pub fn psi(&self, alpha: f64) -> f64 {
        let m = self.level_measure(alpha);
        if m == 0.0 {
            0.0
        } else {
            self.s * (self.s * alpha).exp() * m
        }
    }

    /// ∫_R Ψ_φ over [α_max - 45/s, α_max] by tanh-sinh.
    pub fn integral(&self) -> f64 {
        if self.taus.is_empty() {
            return 0.0;
        }
        let hi = self.alpha_max();
        let lo = hi - 45.0 / self.s;
        let h = 0.5 * (hi - lo);
        tanh_sinh(128, 3.5).iter().map(|n| n.fine * h * self.psi(hi - h * n.from_right)).sum()
    }
}

/// Ψ_φ(α) for a single α.
pub fn s_level_transform(phi: &HalfLineProfile, s: f64, alpha: f64) -> Result<f64> {
    Ok(LevelTransform::new(phi.clone(), s)?.psi(alpha))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneDimReport {
    pub phi1: String,
    pub phi2: String,
    pub s: f64,
    /// The pair satisfies φ1(t1) φ2(t2) <= (1 - t1 t2)_+^s on the check grid.
    pub valid_pair: bool,
    pub duality_violations: usize,
    pub product: f64,
    pub bound: f64,
    pub bound_holds: bool,
    pub midpoint_samples: usize,
    pub midpoint_violations: usize,
    pub worst_midpoint_ratio: f64,
}

/// Checks the duality precondition on a grid, the product bound
/// ∫φ1 ∫φ2 <= (κ(1,s)/2)² and the level-set midpoint inequality
/// H((α1+α2)/2) >= sqrt(Φ1(α1) Φ2(α2)) on sampled pairs.
pub fn onedim_duality_check(
    phi1: &HalfLineProfile,
    phi2: &HalfLineProfile,
    s: f64,
    grid: usize,
    midpoint_samples: usize,
    seed: u64,
) -> Result<OneDimReport> {
    use rand::{Rng, SeedableRng};
    if grid < 2 {
        return Err(Error::input("duality grid needs at least 2 nodes per axis"));
    }
    let reach = |p: &HalfLineProfile| p.support_end.unwrap_or(20.0).max(1e-12);
    let (r1, r2) = (reach(phi1), reach(phi2));
    let mut violations = 0;
    for i in 0..grid {
        let t1 = r1 * i as f64 / (grid - 1) as f64;
        let a = phi1.value(t1);
        for j in 0..grid {
            let t2 = r2 * j as f64 / (grid - 1) as f64;
            let rhs = (1.0 - t1 * t2).max(0.0).powf(s);
            if a * phi2.value(t2) > rhs * (1.0 + 1e-12) + 1e-14 {
                violations += 1;
            }
        }
    }
    let k = kappa(1, s) / 2.0;
    let bound = k * k;
    let l1 = LevelTransform::new(phi1.clone(), s)?;
    let l2 = LevelTransform::new(phi2.clone(), s)?;
    let lh = LevelTransform::new(HalfLineProfile::hhat(s), s)?;
    let product = phi1.integral() * phi2.integral();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut bad = 0;
    let mut worst: f64 = f64::INFINITY;
    let ok_pair = violations == 0;
    let mut done = 0;
    if ok_pair && !l1.taus.is_empty() && !l2.taus.is_empty() {
        for _ in 0..midpoint_samples {
            let a1 = l1.alpha_max() - rng.random_range(0.0..8.0) / s;
            let a2 = l2.alpha_max() - rng.random_range(0.0..8.0) / s;
            let rhs = (l1.level_measure(a1) * l2.level_measure(a2)).sqrt();
            let lhs = lh.level_measure(0.5 * (a1 + a2));
            done += 1;
            if rhs > 0.0 {
                worst = worst.min(lhs / rhs);
            }
            if lhs < rhs * (1.0 - 1e-9) - 1e-12 {
                bad += 1;
            }
        }
    }
    Ok(OneDimReport {
        phi1: phi1.label.clone(),
        phi2: phi2.label.clone(),
        s,
        valid_pair: ok_pair,
        duality_violations: violations,
        product,
        bound,
        bound_holds: !ok_pair || product <= bound * (1.0 + 1e-6),
        midpoint_samples: done,
        midpoint_violations: bad,
        worst_midpoint_ratio: worst,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OneDimLambdaReport {
    pub lambda: f64,
    pub product: f64,
    pub bound: f64,
    pub pass: bool,
}

/// For f on R with λ = ∫_{x>=0} f / ∫ f and g = L_s f:
/// ∫f ∫g <= κ(1,s)² / (4λ(1-λ)).
pub fn onedim_lambda_check(spec: &FunctionSpec, s: f64, cfg: &IntegrationConfig) -> Result<OneDimLambdaReport> {
    check_dim(1, spec.dimension(), "one-dimensional spec")?;
    let h = Hyperplane::new(vec![1.0], 0.0)?;
    let lambda = check_split(&half_space_split(spec, &h, cfg)?)?;
    let product = integrate_grid(spec, cfg)?.value * phi_oracle(spec, s, &[0.0], cfg)?.value;
    let k = kappa(1, s);
    let bound = k * k / (4.0 * lambda * (1.0 - lambda));
    Ok(OneDimLambdaReport { lambda, product, bound, pass: product <= bound * (1.0 + 1e-6) })
}

/// Santaló point of f shifted by v minus v, for equivariance checks.
pub fn shift_defect(spec: &FunctionSpec, s: Exponent, v: &[f64], cfg: &SolverConfig) -> Result<f64> {
    let a = santalo_point(spec, s, cfg)?;
    let b = santalo_point(&spec.shifted(v)?, s, cfg)?;
    let back: Vec<f64> = b.z_star.iter().zip(v).map(|(p, q)| p - q).collect();
    Ok(dist(&a.z_star, &back))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;

    fn interval(a: f64, b: f64) -> FunctionSpec {
        FunctionSpec::box_indicator(&[a], &[b], Concavity::SConcave(1.0)).unwrap()
    }

    #[test]
    fn interval_santalo_point() {
        let r = santalo_point(&interval(0.0, 2.0), Exponent::Finite(1.0), &SolverConfig::default()).unwrap();
        assert!(r.converged);
        assert!((r.z_star[0] - 1.0).abs() < 1e-6, "{r:?}");
        assert!(r.polar_barycenter_norm < 1e-4);
    }

    #[test]
    fn hyperplane_examples() {
        let cfg = IntegrationConfig::default();
        let h = Hyperplane::new(vec![1.0], 0.5).unwrap();
        let split = half_space_split(&interval(-1.0, 1.0), &h, &cfg).unwrap();
        assert!((split.moment_plus[0] - 0.375).abs() < 1e-12);
        assert!((split.moment_minus[0] + 0.375).abs() < 1e-12);
        assert_eq!(hyperplane_point(&interval(-1.0, 1.0), &h, &cfg).unwrap(), vec![0.5]);
        let sq = FunctionSpec::box_indicator(&[-1.0, -1.0], &[1.0, 1.0], Concavity::SConcave(1.0)).unwrap();
        let z = hyperplane_point(&sq, &Hyperplane::new(vec![1.0, 0.0], 0.0).unwrap(), &cfg).unwrap();
        assert!(norm(&z) < 1e-12);
        let bad = Hyperplane::new(vec![1.0], 3.0).unwrap();
        assert!(hyperplane_point(&interval(-1.0, 1.0), &bad, &cfg).unwrap_err().is_input());
    }

    #[test]
    fn interval_inequalities() {
        let cfg = IntegrationConfig::default();
        let r = verify_santalo(&interval(-1.0, 1.0), 1.0, &Hyperplane::new(vec![1.0], 0.0).unwrap(), &cfg).unwrap();
        assert!((r.product - 2.0).abs() < 1e-9 && r.pass);
        let r = verify_santalo(&interval(-1.0, 1.0), 1.0, &Hyperplane::new(vec![1.0], 0.5).unwrap(), &cfg).unwrap();
        assert!((r.lambda - 0.25).abs() < 1e-12);
        assert!((r.product - 8.0 / 3.0).abs() < 1e-9, "{r:?}");
        let pi2 = std::f64::consts::FRAC_PI_2.powi(2);
        assert!((r.bound - pi2 / 0.75).abs() < 1e-12);
    }

    #[test]
    fn level_transform_fubini() {
        for s in [0.5, 1.0, 3.0] {
            for (p, want) in [
                (HalfLineProfile::indicator(0.0, 1.0), 1.0),
                (HalfLineProfile::hhat(s), kappa(1, s) / 2.0),
                (HalfLineProfile::exp_decay(2.0), 0.5),
            ] {
                let lt = LevelTransform::new(p.clone(), s).unwrap();
                assert!((lt.integral() - want).abs() < 1e-6 * want, "{p:?} {s} {}", lt.integral());
                assert!((p.integral() - want).abs() < 1e-9, "{p:?}");
            }
        }
        assert_eq!(s_level_transform(&HalfLineProfile::zero(), 2.0, 0.3).unwrap(), 0.0);
    }

    #[test]
    fn onedim_pairs() {
        let r = onedim_duality_check(&HalfLineProfile::hhat(2.0), &HalfLineProfile::hhat(2.0), 2.0, 201, 300, 1).unwrap();
        assert!(r.valid_pair && r.bound_holds && r.midpoint_violations == 0, "{r:?}");
        assert!((r.product / r.bound - 1.0).abs() < 1e-9);
        let r = onedim_duality_check(&HalfLineProfile::indicator(0.0, 1.0), &HalfLineProfile::linear_power(1.0), 1.0, 201, 300, 2)
            .unwrap();
        assert!(r.valid_pair && r.bound_holds && r.midpoint_violations == 0, "{r:?}");
        assert!((r.product - 0.5).abs() < 1e-9);
    }
}

//! Santaló regions {z : ∫f · Φ(z) <= threshold} and the S_p region on the lifted body.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::funcmodel::{probe_directions, FunctionSpec};
use crate::lifting::support_radius;
use crate::polar_integrals::{integrate_grid, kappa, Exponent, IntegrationConfig, PhiFunction, SphereFormula, SphereQuadrature};
use crate::santalo::{minimize_phi, SolverConfig};
use crate::transforms::s_approx;
use crate::vecops::{dist, norm};

const TIE: f64 = 1e-9;
const SINGLETON: f64 = 1e-6;

/// A Santaló region query with ∫f and the prepared Φ cached.
#[derive(Debug, Clone)]
pub struct RegionQuery {
    spec: FunctionSpec,
    s: Exponent,
    t: f64,
    base_integral: f64,
    threshold: f64,
    phi: PhiFunction,
    solver: SolverConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Membership {
    pub member: bool,
    /// ∫f · Φ(x), absent when Φ could not be evaluated.
    pub product: Option<f64>,
    pub threshold: f64,
    pub diagnostic: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegionKind {
    Empty,
    Singleton,
    Body,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionBoundary {
    pub kind: RegionKind,
    pub t: f64,
    pub s: Exponent,
    pub threshold: f64,
    /// Santaló point
    pub center: Vec<f64>,
    /// min ∫f · Φ, attained at the center
    pub min_product: f64,
    pub rays: Vec<Vec<f64>>,
    pub radii: Vec<f64>,
    pub tolerance: f64,
    /// Some ray reached the edge of the domain where Φ is available.
    pub truncated: bool,
}

impl RegionBoundary {
    pub fn points(&self) -> Vec<Vec<f64>> {
        self.rays
            .iter()
            .zip(&self.radii)
            .map(|(u, r)| self.center.iter().zip(u).map(|(c, v)| c + r * v).collect())
            .collect()
    }

    /// CSV with columns (angle(s)..., radius).
    pub fn to_csv(&self) -> String {
        let d = self.center.len();
        let mut out = match d {
            1 => String::from("direction,radius\n"),
            2 => String::from("angle,radius\n"),
            _ => String::from("polar_angle,azimuth,radius\n"),
        };
        for (u, r) in self.rays.iter().zip(&self.radii) {
            match d {
                1 => out.push_str(&format!("{},{r}\n", u[0])),
                2 => out.push_str(&format!("{},{r}\n", u[1].atan2(u[0]))),
                _ => out.push_str(&format!("{},{},{r}\n", u[2].clamp(-1.0, 1.0).acos(), u[1].atan2(u[0]))),
            }
        }
        out
    }

    pub fn metadata(&self) -> serde_json::Value {
        serde_json::json!({
            "t": self.t,
            "s": self.s,
            "center": self.center,
            "threshold": self.threshold,
            "kind": self.kind,
            "min_product": self.min_product,
        })
    }
}

/// `count` unit directions spread over S^{d-1}.
pub fn ray_directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    match d {
        1 => vec![vec![1.0], vec![-1.0]],
        2 => (0..count)
            .map(|i| {
                let a = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![a.cos(), a.sin()]
            })
            .collect(),
        _ => {
            // Fibonacci set
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..count)
                .map(|i| {
                    let z = 1.0 - 2.0 * (i as f64 + 0.5) / count as f64;
                    let r = (1.0 - z * z).sqrt();
                    let a = golden * i as f64;
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect()
        }
    }
}

impl RegionQuery {
    pub fn new(spec: &FunctionSpec, s: Exponent, t: f64, cfg: &IntegrationConfig) -> Result<RegionQuery> {
        if !(t.is_finite() && t >= 0.0) {
            return Err(Error::input("t must be a finite nonnegative number"));
        }
        let d = spec.dimension();
        let base_integral = integrate_grid(spec, cfg)?.value;
        let threshold = match s {
            Exponent::Finite(s) => t * kappa(d, s).powi(2),
            Exponent::Infinite => t * (2.0 * std::f64::consts::PI).powi(d as i32),
        };
        let phi = PhiFunction::new(spec, s, cfg)?;
        let solver = SolverConfig { oracle_check: false, integration: *cfg, ..Default::default() };
        Ok(RegionQuery { spec: spec.clone(), s, t, base_integral, threshold, phi, solver })
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn s(&self) -> Exponent {
        self.s
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn base_integral(&self) -> f64 {
        self.base_integral
    }

    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn product(&self, x: &[f64]) -> Result<f64> {
        Ok(self.base_integral * self.phi.value(x)?)
    }

    pub fn membership(&self, x: &[f64]) -> Result<Membership> {
        check_dim(self.spec.dimension(), x.len(), "point")?;
        if !self.phi.in_domain(x) {
            let diagnostic = if self.spec.is_interior(x, 1e-9) {
                "outside the domain where Φ is available"
            } else {
                "not interior to the support; Φ diverges"
            };
            return Ok(Membership {
                member: false,
                product: None,
                threshold: self.threshold,
                diagnostic: Some(diagnostic.into()),
            });
        }
        match self.product(x) {
            Ok(p) => Ok(Membership {
                member: p <= self.threshold * (1.0 + TIE),
                product: Some(p),
                threshold: self.threshold,
                diagnostic: None,
            }),
            Err(e) if matches!(e, Error::Domain(_)) => Ok(Membership {
                member: false,
                product: None,
                threshold: self.threshold,
                diagnostic: Some(e.to_string()),
            }),
            Err(e) => Err(e),
        }
    }

    fn is_member(&self, x: &[f64]) -> bool {
        self.membership(x).map(|m| m.member).unwrap_or(false)
    }

    /// Santaló point and the minimal product.
    pub fn minimum(&self) -> Result<(Vec<f64>, f64)> {
        let (z, v, _, _) = minimize_phi(&self.phi, &self.spec.center_hint(), &self.solver)?;
        Ok((z, self.base_integral * v))
    }

    /// Bisection from the Santaló point along `ray_count` directions.
    pub fn boundary(&self, ray_count: usize) -> Result<RegionBoundary> {
        let d = self.spec.dimension();
        if d > 1 && ray_count < 3 {
            return Err(Error::input("need at least 3 rays"));
        }
        let (center, min_product) = self.minimum()?;
        let rays = ray_directions(d, ray_count);
        let rel = min_product / self.threshold - 1.0;
        let mut out = RegionBoundary {
            kind: RegionKind::Body,
            t: self.t,
            s: self.s,
            threshold: self.threshold,
            center: center.clone(),
            min_product,
            radii: vec![0.0; rays.len()],
            rays,
            tolerance: 1e-6,
            truncated: false,
        };
        if rel > SINGLETON {
            out.kind = RegionKind::Empty;
            out.radii.clear();
            out.rays.clear();
            return Ok(out);
        }
        if rel >= -SINGLETON {
            out.kind = RegionKind::Singleton;
            return Ok(out);
        }
        let results: Vec<(f64, bool)> = out
            .rays
            .par_iter()
            .map(|u| {
                let reach = support_radius(&self.spec, &center, u);
                let reach = if reach.is_finite() { reach } else { self.spec.bounding_box(1e-12).diameter() };
                let at = |r: f64| -> Vec<f64> { center.iter().zip(u).map(|(c, v)| c + r * v).collect() };
                let (mut lo, mut hi) = (0.0, reach);
                let truncated = self.phi.in_domain(&at(hi * (1.0 - 1e-12))) && self.is_member(&at(hi * (1.0 - 1e-12)));
                while hi - lo > 1e-10 * reach.max(1e-300) {
                    let m = 0.5 * (lo + hi);
                    if self.is_member(&at(m)) {
                        lo = m;
                    } else {
                        hi = m;
                    }
                }
                (0.5 * (lo + hi), truncated)
            })
            .collect();
        out.radii = results.iter().map(|r| r.0).collect();
        out.truncated = results.iter().any(|r| r.1);
        Ok(out)
    }
}

pub fn region_membership(q: &RegionQuery, x: &[f64]) -> Result<Membership> {
    q.membership(x)
}

pub fn region_boundary(q: &RegionQuery, ray_count: usize) -> Result<RegionBoundary> {
    q.boundary(ray_count)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionProperties {
    pub t: f64,
    pub kind: RegionKind,
    pub min_ratio: f64,
    /// t >= 1 must give a nonempty region.
    pub nonempty_ok: bool,
    pub member_pairs: usize,
    pub midpoint_failures: usize,
    /// smallest 1 - product/threshold over midpoints of boundary points
    pub strict_margin: Option<f64>,
    pub strict_ok: bool,
    pub seed: u64,
}

/// Nonemptiness against t, midpoint convexity on random member pairs and
/// strict convexity on boundary chords.
pub fn region_properties(q: &RegionQuery, rays: usize, samples: usize, seed: u64) -> Result<RegionProperties> {
    let b = q.boundary(rays)?;
    let mut props = RegionProperties {
        t: q.t,
        kind: b.kind,
        min_ratio: b.min_product / q.threshold * q.t,
        nonempty_ok: q.t < 1.0 || b.kind != RegionKind::Empty,
        member_pairs: 0,
        midpoint_failures: 0,
        strict_margin: None,
        strict_ok: true,
        seed,
    };
    if b.kind != RegionKind::Body {
        return Ok(props);
    }
    let d = b.center.len();
    let pts = b.points();
    let mut lo = b.center.clone();
    let mut hi = b.center.clone();
    for p in &pts {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members: Vec<Vec<f64>> = Vec::new();
    let mut tries = 0;
    while members.len() < 2 * samples && tries < 40 * samples {
        tries += 1;
        let x: Vec<f64> = (0..d).map(|i| rng.random_range(lo[i]..=hi[i])).collect();
        if q.is_member(&x) {
            members.push(x);
        }
    }
    let pairs: Vec<(Vec<f64>, Vec<f64>)> = members.chunks_exact(2).map(|c| (c[0].clone(), c[1].clone())).collect();
    props.member_pairs = pairs.len();
    props.midpoint_failures = pairs
        .par_iter()
        .filter(|(a, c)| {
            let m: Vec<f64> = a.iter().zip(c).map(|(x, y)| 0.5 * (x + y)).collect();
            !q.is_member(&m)
        })
        .count();
    // chords between boundary points a quarter turn apart
    let n = pts.len();
    let step = (n / 4).max(1);
    let margins: Vec<f64> = (0..n)
        .into_par_iter()
        .filter_map(|i| {
            let (a, c) = (&pts[i], &pts[(i + step) % n]);
            if dist(a, c) < 1e-9 {
                return None;
            }
            let m: Vec<f64> = a.iter().zip(c).map(|(x, y)| 0.5 * (x + y)).collect();
            q.product(&m).ok().map(|p| 1.0 - p / q.threshold)
        })
        .collect();
    let margin = margins.iter().cloned().fold(f64::INFINITY, f64::min);
    if margin.is_finite() {
        props.strict_margin = Some(margin);
        props.strict_ok = margin > 0.0;
    }
    Ok(props)
}

/// Is every point of the region for t1 a member for t2 (t1 <= t2)?
pub fn monotone_in_t(spec: &FunctionSpec, s: Exponent, t1: f64, t2: f64, probes: &[Vec<f64>], cfg: &IntegrationConfig) -> Result<bool> {
    let a = RegionQuery::new(spec, s, t1, cfg)?;
    let b = RegionQuery { t: t2, threshold: a.threshold / t1 * t2, ..a.clone() };
    for x in probes {
        if a.is_member(x) && !b.is_member(x) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Distance from x to the radial polygon (d = 2) or interval (d = 1).
fn distance_to_region(x: &[f64], b: &RegionBoundary) -> f64 {
    match b.kind {
        RegionKind::Empty => f64::INFINITY,
        RegionKind::Singleton => dist(x, &b.center),
        RegionKind::Body => {
            let pts = b.points();
            if x.len() == 1 {
                let (lo, hi) = (pts[0][0].min(pts[1][0]), pts[0][0].max(pts[1][0]));
                return (lo - x[0]).max(x[0] - hi).max(0.0);
            }
            let n = pts.len();
            let mut inside = true;
            let mut best = f64::INFINITY;
            for i in 0..n {
                let (p, q) = (&pts[i], &pts[(i + 1) % n]);
                let e = [q[0] - p[0], q[1] - p[1]];
                let w = [x[0] - p[0], x[1] - p[1]];
                if e[0] * w[1] - e[1] * w[0] < 0.0 {
                    inside = false;
                }
                let l2 = e[0] * e[0] + e[1] * e[1];
                let t = if l2 > 0.0 { ((w[0] * e[0] + w[1] * e[1]) / l2).clamp(0.0, 1.0) } else { 0.0 };
                best = best.min(norm(&[w[0] - t * e[0], w[1] - t * e[1]]));
            }
            if inside {
                0.0
            } else {
                best
            }
        }
    }
}

fn region_points(b: &RegionBoundary) -> Vec<Vec<f64>> {
    match b.kind {
        RegionKind::Empty => vec![],
        RegionKind::Singleton => vec![b.center.clone()],
        RegionKind::Body => b.points(),
    }
}

/// Hausdorff distance between two regions given by radial boundaries (d <= 2).
pub fn hausdorff(a: &RegionBoundary, b: &RegionBoundary) -> Result<f64> {
    if a.center.len() > 2 {
        return Err(Error::Unsupported("Hausdorff distance is implemented for d <= 2".into()));
    }
    let one = |p: &RegionBoundary, q: &RegionBoundary| {
        region_points(p).iter().map(|x| distance_to_region(x, q)).fold(0.0, f64::max)
    };
    Ok(one(a, b).max(one(b, a)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConvergenceEntry {
    pub s: f64,
    pub kind: RegionKind,
    pub hausdorff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegionConvergence {
    pub t: f64,
    pub limit: RegionBoundary,
    pub rows: Vec<ConvergenceEntry>,
    pub warnings: Vec<String>,
    pub monotone: bool,
}

/// Hausdorff distance between S(f_s, s, t) and S(f, ∞, t) along a schedule.
/// Since s^d κ(d,s)² → (2π)^d, the s^d scaling of the product cancels against
/// the threshold and S(f_s, s, t) is the plain finite-s region of f_s.
pub fn region_convergence(
    spec: &FunctionSpec,
    t: f64,
    s_schedule: &[f64],
    rays: usize,
    cfg: &IntegrationConfig,
) -> Result<RegionConvergence> {
    if spec.dimension() > 2 {
        return Err(Error::Unsupported("region convergence is implemented for d <= 2".into()));
    }
    let limit = RegionQuery::new(spec, Exponent::Infinite, t, cfg)?.boundary(rays)?;
    let mut rows = Vec::new();
    let mut warnings = Vec::new();
    for &s in s_schedule {
        let fs = s_approx(spec, s)?;
        let b = RegionQuery::new(&fs, Exponent::Finite(s), t, cfg)?.boundary(rays)?;
        if b.kind == RegionKind::Empty || limit.kind == RegionKind::Empty {
            warnings.push(format!("region empty at s = {s}; row skipped"));
            continue;
        }
        rows.push(ConvergenceEntry { s, kind: b.kind, hausdorff: hausdorff(&b, &limit)? });
    }
    let monotone = rows.windows(2).all(|w| w[1].hausdorff <= w[0].hausdorff + 1e-6);
    Ok(RegionConvergence { t, limit, rows, warnings, monotone })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpMembership {
    pub member: bool,
    pub product: Option<f64>,
    pub threshold: f64,
    pub diagnostic: Option<String>,
}

/// Membership of w ∈ R^{d+1} in S_p(f, s, t): the spherical functional of the
/// lifted body translated by w (a full (d+1)-dimensional shift), times ∫f,
/// against t κ(d,s)².
pub fn sp_region_membership(
    spec: &FunctionSpec,
    s: f64,
    t: f64,
    w: &[f64],
    cfg: &IntegrationConfig,
) -> Result<SpMembership> {
    let formula = SphereFormula::new(spec, s, &SphereQuadrature::new(spec.dimension(), s)?)?;
    let base = integrate_grid(spec, cfg)?.value;
    sp_membership_with(&formula, base, t, w)
}

pub fn sp_membership_with(formula: &SphereFormula, base_integral: f64, t: f64, w: &[f64]) -> Result<SpMembership> {
    let d = formula.dim();
    check_dim(d + 1, w.len(), "lifted point")?;
    let threshold = t * kappa(d, formula.s()).powi(2);
    let spec = formula.spec();
    let inside = spec.is_interior(&w[..d], 1e-9) && w[d].abs() < spec.eval(&w[..d]).powf(1.0 / formula.s());
    if !inside {
        return Ok(SpMembership {
            member: false,
            product: None,
            threshold,
            diagnostic: Some("w is not interior to the lifted body".into()),
        });
    }
    match formula.value_full_shift(w) {
        Ok(v) => {
            let p = base_integral * v;
            Ok(SpMembership { member: p <= threshold * (1.0 + TIE), product: Some(p), threshold, diagnostic: None })
        }
        Err(e) => Ok(SpMembership { member: false, product: None, threshold, diagnostic: Some(e.to_string()) }),
    }
}

/// Probe points spread around the Santaló point, for monotonicity checks.
pub fn probe_points(center: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let mut out = vec![center.to_vec()];
    for u in probe_directions(center.len()) {
        for k in 1..=8 {
            let r = radius * k as f64 / 8.0;
            out.push(center.iter().zip(&u).map(|(c, v)| c + r * v).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;

    #[test]
    fn interval_radius() {
        let f = FunctionSpec::box_indicator(&[-1.0], &[1.0], Concavity::SConcave(1.0)).unwrap();
        let q = RegionQuery::new(&f, Exponent::Finite(1.0), 2.0, &IntegrationConfig::default()).unwrap();
        let b = q.boundary(2).unwrap();
        let want = (1.0 - 4.0 / std::f64::consts::PI.powi(2)).sqrt();
        assert_eq!(b.kind, RegionKind::Body);
        for r in &b.radii {
            assert!((r - want).abs() < 1e-6, "{b:?}");
        }
    }

    #[test]
    fn hhat_equality_cases() {
        let f = FunctionSpec::hhat(2, 2.0).unwrap();
        let cfg = IntegrationConfig::default();
        let q = RegionQuery::new(&f, Exponent::Finite(2.0), 1.0, &cfg).unwrap();
        assert!(q.membership(&[0.0, 0.0]).unwrap().member);
        assert!(!q.membership(&[0.5, 0.0]).unwrap().member);
        assert_eq!(q.boundary(16).unwrap().kind, RegionKind::Singleton);
        let m = sp_region_membership(&f, 2.0, 1.0, &[0.0, 0.0, 0.0], &cfg).unwrap();
        assert!(m.member);
        let m = sp_region_membership(&f, 2.0, 1.05, &[0.0, 0.0, 0.05], &cfg).unwrap();
        assert!(m.member, "{m:?}");
    }

    #[test]
    fn gaussian_infinity_region() {
        let g = FunctionSpec::standard_gaussian(2).unwrap();
        let cfg = IntegrationConfig::default();
        let q = RegionQuery::new(&g, Exponent::Infinite, 1.0, &cfg).unwrap();
        let m = q.membership(&[0.0, 0.0]).unwrap();
        assert!(m.member && (m.product.unwrap() / m.threshold - 1.0).abs() < 1e-6, "{m:?}");
        let q = RegionQuery::new(&g, Exponent::Infinite, 2.0, &cfg).unwrap();
        let b = q.boundary(32).unwrap();
        let want = (2.0 * 2f64.ln()).sqrt();
        assert!(b.radii.iter().all(|r| (r - want).abs() < 1e-5), "{:?}", b.radii);
    }
}

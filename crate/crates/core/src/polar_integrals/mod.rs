//! Φ(z) = ∫ L_s(f(· + z)): the sphere formula, the direct cubature oracle,
//! gradients and the log-concave analogue Φ_∞.

mod cubature;
mod quadrature;
mod sphere;

use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

pub use cubature::{integrate_grid, Cubature, Estimate, Frame, IntegrationConfig, Region};
pub(crate) use cubature::{check_estimate, to_frame, to_world};
pub use quadrature::{gauss_jacobi, gauss_legendre, tanh_sinh, TsNode};
pub use sphere::{sphere_area, SphereQuadrature};

use crate::error::{check_dim, Error, Result};
use crate::funcmodel::{Bounds, FunctionSpec, Lift};
use crate::lifting::{polar_bounds, LiftedBody};
use crate::transforms::s_polar;
use crate::vecops::{dot, norm, pairwise_sum};

/// κ(d, s) = π^{d/2} Γ(s/2 + 1) / Γ(s/2 + d/2 + 1); κ(0, s) = 1.
pub fn kappa(d: usize, s: f64) -> f64 {
    let h = s / 2.0;
    let dh = d as f64 / 2.0;
    (dh * std::f64::consts::PI.ln() + libm::lgamma(h + 1.0) - libm::lgamma(h + dh + 1.0)).exp()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Sphere,
    Oracle,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolarIntegral {
    pub value: f64,
    pub gradient: Option<Vec<f64>>,
    pub moment: Option<Vec<f64>>,
    pub method: Method,
    pub nodes: usize,
    pub err_est: f64,
}

fn check_center(spec: &FunctionSpec, z: &[f64]) -> Result<()> {
    check_dim(spec.dimension(), z.len(), "center")?;
    if !spec.is_interior(z, 1e-9) {
        return Err(Error::domain(format!("z = {z:?} is not interior to the support")));
    }
    Ok(())
}

fn check_s(s: f64) -> Result<()> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::input("s must be positive and finite"));
    }
    Ok(())
}

/// Cached support values of the (rescaled) lifted body at the nodes of one
/// sphere rule. The horizontal coordinates are dilated by λ so that the body
/// is roughly round; Φ picks up the exact factor λ^{-d}.
#[derive(Debug, Clone)]
struct SphereSums {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    support: Vec<f64>,
}

impl SphereSums {
    fn new(body: &LiftedBody, quad: &SphereQuadrature, lambda: f64) -> SphereSums {
        let d = quad.dim();
        let nodes: Vec<f64> = (0..quad.len())
            .flat_map(|i| {
                let u = quad.node(i);
                let mut v: Vec<f64> = u[..d].iter().map(|c| c / lambda).collect();
                v.push(u[d]);
                v
            })
            .collect();
        let support = (0..quad.len())
            .into_par_iter()
            .map(|i| body.support_any(&nodes[i * (d + 1)..(i + 1) * (d + 1)]))
            .collect();
        SphereSums { nodes, weights: quad.weights().to_vec(), support }
    }

    fn node(&self, i: usize, d: usize) -> &[f64] {
        &self.nodes[i * (d + 1)..(i + 1) * (d + 1)]
    }

    /// h_{K̂ - w}(v_i) for a shift w ∈ R^d or R^{d+1}.
    fn shifted(&self, w: &[f64], d: usize) -> Result<Vec<f64>> {
        let h: Vec<f64> = (0..self.weights.len())
            .map(|i| self.support[i] - dot(w, &self.node(i, d)[..w.len()]))
            .collect();
        if h.iter().any(|v| !(*v > 0.0)) {
            return Err(Error::domain("shift is not interior to the lifted body"));
        }
        Ok(h)
    }
}

/// The polytope under a polytope indicator, through any shifts.
fn base_polytope(spec: &FunctionSpec) -> Option<&crate::funcmodel::Polytope> {
    match spec.family() {
        crate::funcmodel::Family::PolytopeIndicator(p) => Some(p),
        crate::funcmodel::Family::Shifted { inner, .. } => base_polytope(inner),
        _ => None,
    }
}

/// The support-function formula for Φ, prepared once per (f, s, rule).
#[derive(Debug, Clone)]
pub struct SphereFormula {
    spec: FunctionSpec,
    d: usize,
    s: f64,
    lambda: f64,
    fine: SphereSums,
    coarse: SphereSums,
}

impl SphereFormula {
    pub fn new(spec: &FunctionSpec, s: f64, quad: &SphereQuadrature) -> Result<SphereFormula> {
        check_s(s)?;
        let d = spec.dimension();
        if quad.dim() != d || quad.s() != s {
            return Err(Error::input("sphere quadrature does not match (d, s)"));
        }
        if !spec.has_bounded_support() {
            return Err(Error::domain("Φ needs a bounded support for finite s"));
        }
        let body = LiftedBody::new(spec.clone(), s, vec![0.0; d])?;
        let mut width: f64 = 0.0;
        for i in 0..d {
            let mut v = vec![0.0; d + 1];
            v[i] = 1.0;
            let a = body.support_any(&v);
            v[i] = -1.0;
            width = width.max(0.5 * (a + body.support_any(&v)));
        }
        let height = spec.sup_value().powf(1.0 / s);
        let lambda = if width > 0.0 && height > 0.0 && (width / height).is_finite() { width / height } else { 1.0 };
        let (fine, coarse) = match base_polytope(spec) {
            Some(p) => (quad.adapted_to(p), quad.coarser()?.adapted_to(p)),
            None => (quad.clone(), quad.coarser()?),
        };
        let fine = SphereSums::new(&body, &fine, lambda);
        let coarse = SphereSums::new(&body, &coarse, lambda);
        Ok(SphereFormula { spec: spec.clone(), d, s, lambda, fine, coarse })
    }

    pub fn spec(&self) -> &FunctionSpec {
        &self.spec
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    fn sum(&self, sums: &SphereSums, w: &[f64]) -> Result<f64> {
        let h = sums.shifted(w, self.d)?;
        let p = self.d as f64 + self.s;
        let terms: Vec<f64> = sums.weights.iter().zip(&h).map(|(wi, hi)| wi * hi.powf(-p)).collect();
        Ok(self.lambda.powi(-(self.d as i32)) * self.s / (2.0 * p) * pairwise_sum(&terms))
    }

    /// Φ at z, no interiority check beyond positivity of h.
    pub fn value(&self, z: &[f64]) -> Result<f64> {
        check_dim(self.d, z.len(), "center")?;
        self.sum(&self.fine, z)
    }

    /// The same functional of the lifted body translated by w ∈ R^{d+1}.
    pub fn value_full_shift(&self, w: &[f64]) -> Result<f64> {
        check_dim(self.d + 1, w.len(), "shift")?;
        self.sum(&self.fine, w)
    }

    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.d, z.len(), "center")?;
        let h = self.fine.shifted(z, self.d)?;
        let p = self.d as f64 + self.s + 1.0;
        let c = self.lambda.powi(-(self.d as i32)) * self.s / 2.0;
        Ok((0..self.d)
            .map(|j| {
                let terms: Vec<f64> = (0..h.len())
                    .map(|i| self.fine.weights[i] * self.fine.node(i, self.d)[j] * h[i].powf(-p))
                    .collect();
                c * pairwise_sum(&terms)
            })
            .collect())
    }

    pub fn evaluate(&self, z: &[f64]) -> Result<PolarIntegral> {
        check_center(&self.spec, z)?;
        let value = self.sum(&self.fine, z)?;
        let coarse = self.sum(&self.coarse, z)?;
        Ok(PolarIntegral {
            value,
            gradient: Some(self.gradient(z)?),
            moment: None,
            method: Method::Sphere,
            nodes: self.fine.weights.len(),
            err_est: (value - coarse).abs(),
        })
    }
}

pub fn phi_sphere(spec: &FunctionSpec, s: f64, z: &[f64], quad: &SphereQuadrature) -> Result<PolarIntegral> {
    check_center(spec, z)?;
    SphereFormula::new(spec, s, quad)?.evaluate(z)
}

/// Support region of L_s(f(· + z)): the polar of supp f - z.
fn polar_region(spec: &FunctionSpec, z: &[f64]) -> Region {
    let centered = spec.centered_at(z).expect("dimension checked");
    if let crate::funcmodel::Family::PolytopeIndicator(p) = spec.family() {
        return Region::Polytope {
            normals: p.vertices().iter().map(|v| v.iter().zip(z).map(|(a, b)| a - b).collect()).collect(),
            offsets: vec![1.0; p.vertices().len()],
        };
    }
    let g = move |y: &[f64]| centered.extremum(Lift::Power { s: 1.0, weight: 0.0 }, y).value - 1.0;
    Region::Sublevel { g: Arc::new(g), bounds: polar_bounds(spec, z) }
}

/// Facets of (P + v - z)° as simplices (fanned in d = 3), where v is the
/// accumulated shift of the spec. Each vertex of P + v - z is dual to the
/// facet spanned by the polar vertices n_j / (c_j + <n_j, v - z>) of its facets.
fn polar_facets(p: &crate::funcmodel::Polytope, spec: &FunctionSpec, z: &[f64]) -> Result<Vec<Vec<Vec<f64>>>> {
    // x ∈ supp f  <=>  x - v ∈ P
    let v = spec_offset(spec);
    let shift: Vec<f64> = z.iter().zip(&v).map(|(a, b)| a - b).collect();
    let dual: Vec<Vec<f64>> = p
        .facets()
        .iter()
        .map(|f| {
            let c = f.offset - dot(&f.normal, &shift);
            f.normal.iter().map(|n| n / c).collect()
        })
        .collect();
    let mut out = Vec::new();
    for (_, idx) in p.vertex_cones() {
        match idx.len() {
            n if n < p.dim() => {}
            _ if p.dim() == 2 => {
                if idx.len() != 2 {
                    return Err(Error::numeric("degenerate polygon vertex"));
                }
                out.push(vec![dual[idx[0]].clone(), dual[idx[1]].clone()]);
            }
            n => {
                for j in 1..n - 1 {
                    out.push(vec![dual[idx[0]].clone(), dual[idx[j]].clone(), dual[idx[j + 1]].clone()]);
                }
            }
        }
    }
    Ok(out)
}

fn spec_offset(spec: &FunctionSpec) -> Vec<f64> {
    match spec.family() {
        crate::funcmodel::Family::Shifted { inner, offset } => {
            spec_offset(inner).iter().zip(offset).map(|(a, b)| a + b).collect()
        }
        _ => vec![0.0; spec.dimension()],
    }
}

/// Direct cubature of s_polar(f(· + z)) over the polar of the support.
pub fn phi_oracle(spec: &FunctionSpec, s: f64, z: &[f64], cfg: &IntegrationConfig) -> Result<PolarIntegral> {
    check_s(s)?;
    cfg.validate()?;
    check_center(spec, z)?;
    if !spec.has_bounded_support() {
        return Err(Error::domain("Φ needs a bounded support for finite s"));
    }
    let centered = spec.centered_at(z)?;
    let d = spec.dimension();
    let cub = match base_polytope(spec) {
        Some(p) if d > 1 => Cubature::cones(&polar_facets(p, spec, z)?, cfg),
        _ => Cubature::build(&polar_region(spec, z), &vec![0.0; d], None, cfg),
    };
    let values = cub.values(&|y: &[f64]| s_polar(&centered, s, y).unwrap_or(f64::NAN));
    let e = check_estimate(cub.apply(&values), cfg, "polar integral")?;
    let moment = cub.moments(&values).iter().map(|m| m.value).collect();
    Ok(PolarIntegral {
        value: e.value,
        gradient: None,
        moment: Some(moment),
        method: Method::Oracle,
        nodes: e.nodes,
        err_est: e.err_est,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GradientReport {
    pub gradient: Vec<f64>,
    pub moment: Vec<f64>,
    /// |∇Φ| / |m(z)| when both are nonzero.
    pub ratio: Option<f64>,
    /// cos of the angle between ∇Φ and m(z), 1 when both vanish.
    pub alignment: f64,
}

/// ∇Φ from the sphere formula together with the polar moment from the oracle.
pub fn phi_gradient(
    spec: &FunctionSpec,
    s: f64,
    z: &[f64],
    quad: &SphereQuadrature,
    cfg: &IntegrationConfig,
) -> Result<GradientReport> {
    let sphere = phi_sphere(spec, s, z, quad)?;
    let oracle = phi_oracle(spec, s, z, cfg)?;
    let gradient = sphere.gradient.unwrap_or_default();
    let moment = oracle.moment.unwrap_or_default();
    let (ng, nm) = (norm(&gradient), norm(&moment));
    let scale = sphere.value.max(1e-300);
    let (ratio, alignment) = if ng <= 1e-9 * scale && nm <= 1e-9 * scale {
        (None, 1.0)
    } else if ng == 0.0 || nm == 0.0 {
        (None, 0.0)
    } else {
        (Some(ng / nm), dot(&gradient, &moment) / (ng * nm))
    };
    Ok(GradientReport { gradient, moment, ratio, alignment })
}

/// Cubature of L_∞ f on a truncation of its support large enough that
/// Φ_∞(z) = Σ w e^{<z,y>} L_∞ f(y) holds for every |z| <= z_radius.
#[derive(Debug, Clone)]
pub struct LogPolarCubature {
    cub: Cubature,
    values: Vec<f64>,
    z_radius: f64,
    cfg: IntegrationConfig,
}

impl LogPolarCubature {
    pub fn new(spec: &FunctionSpec, z_radius: f64, cfg: &IntegrationConfig) -> Result<LogPolarCubature> {
        cfg.validate()?;
        let d = spec.dimension();
        let origin = vec![0.0; d];
        check_center(spec, &origin)?;
        if !(z_radius >= 0.0 && z_radius.is_finite()) {
            return Err(Error::input("z_radius must be finite and nonnegative"));
        }
        let conj = {
            let spec = spec.clone();
            move |y: &[f64]| {
                let e = spec.extremum(Lift::Log, y);
                if e.at_truncation {
                    f64::INFINITY
                } else {
                    e.value
                }
            }
        };
        let c0 = conj(&origin);
        let budget = (1.0 / cfg.tail_eps).ln();
        let excess = move |y: &[f64]| conj(y) - c0 - z_radius * norm(y) - budget;
        // radial extent of the truncated set along probe directions
        let mut reach: f64 = 0.0;
        for u in crate::funcmodel::probe_directions(d) {
            let mut t = 1.0;
            let mut k = 0;
            while excess(&u.iter().map(|c| c * t).collect::<Vec<_>>()) < 0.0 {
                t *= 2.0;
                k += 1;
                if k > 60 {
                    return Err(Error::numeric("log-polar support is unbounded"));
                }
            }
            reach = reach.max(t);
        }
        let r = 2.0 * reach;
        let bounds = Bounds { lo: vec![-r; d], hi: vec![r; d] };
        let big = 1e3 * (budget + 1.0);
        let excess = Arc::new(excess);
        let g = {
            let excess = excess.clone();
            move |y: &[f64]| {
                let v = excess(y);
                if v.is_finite() {
                    v
                } else {
                    big * (1.0 + norm(y))
                }
            }
        };
        let region = Region::Sublevel { g: Arc::new(g), bounds };
        let cub = Cubature::build(&region, &origin, None, cfg);
        let spec = spec.clone();
        let values = cub.values(&|y: &[f64]| crate::transforms::log_polar(&spec, y).unwrap_or(f64::NAN));
        Ok(LogPolarCubature { cub, values, z_radius, cfg: *cfg })
    }

    pub fn len(&self) -> usize {
        self.cub.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cub.is_empty()
    }

    fn weighted(&self, z: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.cub.dim(), z.len(), "center")?;
        if norm(z) > self.z_radius * (1.0 + 1e-12) {
            return Err(Error::input("z lies outside the radius this cubature was built for"));
        }
        Ok((0..self.cub.len()).map(|i| self.values[i] * dot(z, self.cub.point(i)).exp()).collect())
    }

    pub fn phi(&self, z: &[f64]) -> Result<Estimate> {
        check_estimate(self.cub.apply(&self.weighted(z)?), &self.cfg, "log-polar integral")
    }

    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        Ok(self.cub.moments(&self.weighted(z)?).iter().map(|m| m.value).collect())
    }
}

/// Φ_∞(z) = ∫ L_∞(f(· + z)).
pub fn phi_log(spec: &FunctionSpec, z: &[f64], cfg: &IntegrationConfig) -> Result<PolarIntegral> {
    check_center(spec, z)?;
    let centered = spec.centered_at(z)?;
    let lc = LogPolarCubature::new(&centered, 0.0, cfg)?;
    let d = spec.dimension();
    let origin = vec![0.0; d];
    let e = lc.phi(&origin)?;
    Ok(PolarIntegral {
        value: e.value,
        gradient: None,
        moment: Some(lc.gradient(&origin)?),
        method: Method::Oracle,
        nodes: e.nodes,
        err_est: e.err_est,
    })
}

/// The exponent s ∈ (0, ∞].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Exponent {
    Finite(f64),
    #[serde(serialize_with = "serialize_inf")]
    Infinite,
}

fn serialize_inf<S: serde::Serializer>(s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str("inf")
}

impl Exponent {
    pub fn parse(text: &str) -> Result<Exponent> {
        let t = text.trim();
        if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
            return Ok(Exponent::Infinite);
        }
        let v: f64 = t.parse().map_err(|_| Error::input(format!("cannot parse s = {t:?}")))?;
        if v == f64::INFINITY {
            return Ok(Exponent::Infinite);
        }
        check_s(v)?;
        Ok(Exponent::Finite(v))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Exponent::Finite(s) => Some(s),
            Exponent::Infinite => None,
        }
    }
}

impl std::fmt::Display for Exponent {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Exponent::Finite(s) => write!(f, "{s}"),
            Exponent::Infinite => write!(f, "inf"),
        }
    }
}

/// z ↦ Φ_s(z) for finite s (sphere formula) or Φ_∞(z) (log-polar cubature),
/// prepared once for repeated evaluation.
#[derive(Debug, Clone)]
pub enum PhiFunction {
    Finite(SphereFormula),
    Infinite { spec: FunctionSpec, origin: Vec<f64>, radius: f64, cub: LogPolarCubature },
}

impl PhiFunction {
    pub fn new(spec: &FunctionSpec, s: Exponent, cfg: &IntegrationConfig) -> Result<PhiFunction> {
        match s {
            Exponent::Finite(s) => {
                let quad = SphereQuadrature::new(spec.dimension(), s)?;
                Ok(PhiFunction::Finite(SphereFormula::new(spec, s, &quad)?))
            }
            Exponent::Infinite => {
                let origin = spec.center_hint();
                check_center(spec, &origin)?;
                let d = spec.dimension();
                let mut radius = f64::INFINITY;
                if spec.has_bounded_support() {
                    for u in crate::funcmodel::probe_directions(d) {
                        radius = radius.min(crate::lifting::support_radius(spec, &origin, &u));
                    }
                }
                let radius = if radius.is_finite() {
                    0.9 * radius
                } else {
                    0.15 * spec.bounding_box(cfg.tail_eps).diameter()
                };
                // the shifted integrand e^{<z,y>} L_∞f(y) peaks away from the origin
                let cfg = if d <= 2 {
                    IntegrationConfig { resolution: cfg.resolution.max(96), ..*cfg }
                } else {
                    *cfg
                };
                let cub = LogPolarCubature::new(&spec.centered_at(&origin)?, radius, &cfg)?;
                Ok(PhiFunction::Infinite { spec: spec.clone(), origin, radius, cub })
            }
        }
    }

    pub fn spec(&self) -> &FunctionSpec {
        match self {
            PhiFunction::Finite(f) => f.spec(),
            PhiFunction::Infinite { spec, .. } => spec,
        }
    }

    pub fn exponent(&self) -> Exponent {
        match self {
            PhiFunction::Finite(f) => Exponent::Finite(f.s()),
            PhiFunction::Infinite { .. } => Exponent::Infinite,
        }
    }

    /// z is strictly inside the set where this evaluator is valid.
    pub fn in_domain(&self, z: &[f64]) -> bool {
        if z.len() != self.spec().dimension() || !self.spec().is_interior(z, 1e-9) {
            return false;
        }
        match self {
            PhiFunction::Finite(_) => true,
            PhiFunction::Infinite { origin, radius, .. } => crate::vecops::dist(z, origin) <= *radius,
        }
    }

    pub fn value(&self, z: &[f64]) -> Result<f64> {
        if !self.in_domain(z) {
            return Err(Error::domain(format!("z = {z:?} is outside the domain of Φ")));
        }
        match self {
            PhiFunction::Finite(f) => f.value(z),
            PhiFunction::Infinite { origin, cub, .. } => {
                Ok(cub.phi(&crate::vecops::sub(z, origin))?.value)
            }
        }
    }

    pub fn gradient(&self, z: &[f64]) -> Result<Vec<f64>> {
        if !self.in_domain(z) {
            return Err(Error::domain(format!("z = {z:?} is outside the domain of Φ")));
        }
        match self {
            PhiFunction::Finite(f) => f.gradient(z),
            PhiFunction::Infinite { origin, cub, .. } => cub.gradient(&crate::vecops::sub(z, origin)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;
    use std::f64::consts::PI;

    fn interval() -> FunctionSpec {
        FunctionSpec::box_indicator(&[-1.0], &[1.0], Concavity::SConcave(1.0)).unwrap()
    }

    #[test]
    fn kappa_values() {
        assert!((kappa(1, 2.0) - 4.0 / 3.0).abs() < 1e-14);
        assert!((kappa(2, 2.0) - PI / 2.0).abs() < 1e-14);
        assert_eq!(kappa(0, 3.0), 1.0);
        for s in [0.5, 1.0, 7.0] {
            for d in 1..4 {
                assert!((kappa(1, s) * kappa(d - 1, s + 1.0) / kappa(d, s) - 1.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn interval_closed_form() {
        let q = SphereQuadrature::new(1, 1.0).unwrap();
        let f = SphereFormula::new(&interval(), 1.0, &q).unwrap();
        assert!((f.value(&[0.0]).unwrap() - 1.0).abs() < 1e-10);
        assert!((f.value(&[0.5]).unwrap() - 4.0 / 3.0).abs() < 1e-10);
        assert!((f.gradient(&[0.5]).unwrap()[0] - 16.0 / 9.0).abs() < 1e-8);
        assert!(f.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn hhat_sphere_is_kappa() {
        for (d, s) in [(1, 2.0), (2, 0.5), (3, 5.0)] {
            let q = SphereQuadrature::new(d, s).unwrap();
            let r = phi_sphere(&FunctionSpec::hhat(d, s).unwrap(), s, &vec![0.0; d], &q).unwrap();
            assert!((r.value / kappa(d, s) - 1.0).abs() < 1e-8, "{d} {s} {r:?}");
        }
    }

    #[test]
    fn oracle_examples() {
        let cfg = IntegrationConfig::default();
        let r = phi_oracle(&FunctionSpec::hhat(1, 2.0).unwrap(), 2.0, &[0.0], &cfg).unwrap();
        assert!((r.value - 4.0 / 3.0).abs() < 1e-8, "{r:?}");
        let r = phi_oracle(&interval(), 1.0, &[0.0], &cfg).unwrap();
        assert!((r.value - 1.0).abs() < 1e-10);
        let disc = FunctionSpec::ball(vec![0.0, 0.0], 1.0, Concavity::SConcave(1.0)).unwrap();
        let r = phi_oracle(&disc, 1.0, &[0.0, 0.0], &cfg).unwrap();
        assert!((r.value - PI / 3.0).abs() < 1e-8, "{r:?}");
    }

    #[test]
    fn log_gaussian() {
        let cfg = IntegrationConfig::default();
        let g = FunctionSpec::standard_gaussian(1).unwrap();
        let r = phi_log(&g, &[0.0], &cfg).unwrap();
        assert!((r.value - (2.0 * PI).sqrt()).abs() < 1e-6, "{r:?}");
        let r = phi_log(&g, &[0.7], &cfg).unwrap();
        assert!((r.value - (2.0 * PI).sqrt() * (0.245f64).exp()).abs() < 1e-6, "{r:?}");
    }
}

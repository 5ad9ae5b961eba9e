//! Declarative 1/s-concave and log-concave test functions.

mod extremal;
mod grid;
mod json;
mod polytope;
mod radial;

pub use extremal::{Extremum, Lift};
pub(crate) use extremal::golden_max;
pub use grid::{GridProfile, Profile};
pub use polytope::{Facet, Polytope};
pub use radial::RadialLaw;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{check_dim, Error, Result};
use crate::vecops::{dist, norm, sub};

/// Tail level below which unbounded supports are truncated.
pub const DEFAULT_TAIL_EPS: f64 = 1e-12;
/// Support boundary band for analytic families.
pub const DEFAULT_SUPPORT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Concavity {
    SConcave(f64),
    LogConcave,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    BallIndicator { center: Vec<f64>, radius: f64 },
    PolytopeIndicator(Polytope),
    HhatPower { s_exponent: f64 },
    Gaussian { center: Vec<f64>, sigma: f64 },
    ExpNegNorm { scale: f64 },
    GridProfile(GridProfile),
    Shifted { inner: Box<FunctionSpec>, offset: Vec<f64> },
    /// (1 + log f_inner / s)_+^s
    SApprox { inner: Box<FunctionSpec>, s: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FunctionSpec {
    dimension: usize,
    class: Concavity,
    family: Family,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SupportClassification {
    Interior,
    Boundary { tolerance: f64 },
    Outside,
}

/// Axis-aligned box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bounds {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl Bounds {
    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(a, b)| 0.5 * (a + b)).collect()
    }

    pub fn diameter(&self) -> f64 {
        dist(&self.lo, &self.hi)
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }

    pub fn translate(&self, v: &[f64]) -> Bounds {
        Bounds {
            lo: self.lo.iter().zip(v).map(|(a, b)| a + b).collect(),
            hi: self.hi.iter().zip(v).map(|(a, b)| a + b).collect(),
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| *x >= *a && *x <= *b)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityViolation {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub midpoint_profile: f64,
    pub average_profile: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConcavityReport {
    pub trials: usize,
    pub checked: usize,
    pub tolerance: f64,
    pub violations: Vec<ConcavityViolation>,
    pub seed: u64,
}

fn positive(x: f64, what: &str) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::input(format!("{what} must be a positive finite number, got {x}")))
    }
}

fn finite_vec(v: &[f64], what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::input(format!("{what} must have finite entries")))
    }
}

impl FunctionSpec {
    pub fn new(dimension: usize, class: Concavity, family: Family) -> Result<FunctionSpec> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::input(format!("dimension must be 1, 2 or 3, got {dimension}")));
        }
        if let Concavity::SConcave(s) = class {
            positive(s, "class exponent s")?;
        }
        match &family {
            Family::BallIndicator { center, radius } => {
                check_dim(dimension, center.len(), "ball center")?;
                finite_vec(center, "ball center")?;
                positive(*radius, "ball radius")?;
            }
            Family::PolytopeIndicator(p) => check_dim(dimension, p.dim(), "polytope")?,
            Family::HhatPower { s_exponent } => positive(*s_exponent, "s_exponent")?,
            Family::Gaussian { center, sigma } => {
                check_dim(dimension, center.len(), "gaussian center")?;
                finite_vec(center, "gaussian center")?;
                positive(*sigma, "sigma")?;
            }
            Family::ExpNegNorm { scale } => positive(*scale, "scale")?,
            Family::GridProfile(g) => {
                check_dim(dimension, g.dim(), "grid")?;
                if class == Concavity::LogConcave && !g.has_positive_cell() {
                    return Err(Error::input(
                        "log-concave grid needs a cell with all corners positive",
                    ));
                }
            }
            Family::Shifted { inner, offset } => {
                check_dim(dimension, inner.dimension, "shifted inner spec")?;
                check_dim(dimension, offset.len(), "offset")?;
                finite_vec(offset, "offset")?;
            }
            Family::SApprox { inner, s } => {
                check_dim(dimension, inner.dimension, "approximated inner spec")?;
                positive(*s, "approximation exponent")?;
            }
        }
        Ok(FunctionSpec { dimension, class, family })
    }

    pub fn hhat(dimension: usize, s: f64) -> Result<FunctionSpec> {
        Self::new(dimension, Concavity::SConcave(s), Family::HhatPower { s_exponent: s })
    }

    pub fn gaussian(center: Vec<f64>, sigma: f64) -> Result<FunctionSpec> {
        Self::new(center.len(), Concavity::LogConcave, Family::Gaussian { center, sigma })
    }

    pub fn standard_gaussian(dimension: usize) -> Result<FunctionSpec> {
        Self::gaussian(vec![0.0; dimension], 1.0)
    }

    pub fn exp_neg_norm(dimension: usize, scale: f64) -> Result<FunctionSpec> {
        Self::new(dimension, Concavity::LogConcave, Family::ExpNegNorm { scale })
    }

    pub fn ball(center: Vec<f64>, radius: f64, class: Concavity) -> Result<FunctionSpec> {
        Self::new(center.len(), class, Family::BallIndicator { center, radius })
    }

    pub fn polytope(vertices: Vec<Vec<f64>>, class: Concavity) -> Result<FunctionSpec> {
        let d = vertices.first().map(|v| v.len()).unwrap_or(0);
        let p = Polytope::new(vertices)
            .ok_or_else(|| Error::input("polytope vertices must span a full-dimensional hull"))?;
        Self::new(d, class, Family::PolytopeIndicator(p))
    }

    /// Indicator of the box [lo, hi].
    pub fn box_indicator(lo: &[f64], hi: &[f64], class: Concavity) -> Result<FunctionSpec> {
        check_dim(lo.len(), hi.len(), "box corner")?;
        let d = lo.len();
        let verts = (0..1usize << d)
            .map(|m| (0..d).map(|i| if (m >> i) & 1 == 0 { lo[i] } else { hi[i] }).collect())
            .collect();
        Self::polytope(verts, class)
    }

    pub fn grid(
        origin: Vec<f64>,
        spacing: Vec<f64>,
        shape: Vec<usize>,
        values: Vec<f64>,
        class: Concavity,
    ) -> Result<FunctionSpec> {
        let d = origin.len();
        let g = GridProfile::new(origin, spacing, shape, values).map_err(Error::Input)?;
        Self::new(d, class, Family::GridProfile(g))
    }

    /// The function x -> f(x - offset).
    pub fn shifted(&self, offset: &[f64]) -> Result<FunctionSpec> {
        check_dim(self.dimension, offset.len(), "offset")?;
        if let Family::Shifted { inner, offset: v } = &self.family {
            let total: Vec<f64> = v.iter().zip(offset).map(|(a, b)| a + b).collect();
            return inner.shifted(&total);
        }
        Self::new(
            self.dimension,
            self.class,
            Family::Shifted { inner: Box::new(self.clone()), offset: offset.to_vec() },
        )
    }

    /// The function x -> f(x + z), the shift that moves z to the origin.
    pub fn centered_at(&self, z: &[f64]) -> Result<FunctionSpec> {
        let neg: Vec<f64> = z.iter().map(|v| -v).collect();
        self.shifted(&neg)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn class(&self) -> Concavity {
        self.class
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn family_name(&self) -> &'static str {
        match &self.family {
            Family::BallIndicator { .. } => "ball_indicator",
            Family::PolytopeIndicator(_) => "polytope_indicator",
            Family::HhatPower { .. } => "hhat_power",
            Family::Gaussian { .. } => "gaussian",
            Family::ExpNegNorm { .. } => "exp_neg_norm",
            Family::GridProfile(_) => "grid_profile",
            Family::Shifted { .. } => "shifted",
            Family::SApprox { .. } => "s_approx",
        }
    }

    pub fn is_indicator(&self) -> bool {
        match &self.family {
            Family::BallIndicator { .. } | Family::PolytopeIndicator(_) => true,
            Family::Shifted { inner, .. } | Family::SApprox { inner, .. } => inner.is_indicator(),
            _ => false,
        }
    }

    /// Center and log-profile for radially symmetric families.
    pub fn radial(&self) -> Option<(Vec<f64>, RadialLaw)> {
        let d = self.dimension;
        match &self.family {
            Family::BallIndicator { center, radius } => {
                Some((center.clone(), RadialLaw::Flat { radius: *radius }))
            }
            Family::HhatPower { s_exponent } => {
                Some((vec![0.0; d], RadialLaw::Hhat { p: *s_exponent }))
            }
            Family::Gaussian { center, sigma } => {
                Some((center.clone(), RadialLaw::Gauss { sigma: *sigma }))
            }
            Family::ExpNegNorm { scale } => Some((vec![0.0; d], RadialLaw::ExpNeg { a: *scale })),
            Family::Shifted { inner, offset } => inner.radial().map(|(c, law)| {
                (c.iter().zip(offset).map(|(a, b)| a + b).collect(), law)
            }),
            Family::SApprox { inner, s } => inner.radial().map(|(c, law)| {
                let law = if law.is_flat() {
                    law
                } else {
                    RadialLaw::Approx { inner: Box::new(law), s: *s }
                };
                (c, law)
            }),
            Family::PolytopeIndicator(_) | Family::GridProfile(_) => None,
        }
    }

    /// True when {f > 0} is bounded.
    pub fn has_bounded_support(&self) -> bool {
        match &self.family {
            Family::Gaussian { .. } | Family::ExpNegNorm { .. } => false,
            Family::Shifted { inner, .. } => inner.has_bounded_support(),
            Family::SApprox { .. } => true,
            _ => true,
        }
    }

    /// f(x).
    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dimension, x.len(), "point")?;
        Ok(self.eval(x))
    }

    pub(crate) fn eval(&self, x: &[f64]) -> f64 {
        match &self.family {
            Family::BallIndicator { center, radius } => {
                if dist(x, center) <= *radius {
                    1.0
                } else {
                    0.0
                }
            }
            Family::PolytopeIndicator(p) => {
                if p.contains(x) {
                    1.0
                } else {
                    0.0
                }
            }
            Family::HhatPower { s_exponent } => {
                let r2: f64 = x.iter().map(|v| v * v).sum();
                if r2 < 1.0 {
                    (1.0 - r2).powf(0.5 * s_exponent)
                } else {
                    0.0
                }
            }
            Family::Gaussian { center, sigma } => {
                let r = dist(x, center);
                (-r * r / (2.0 * sigma * sigma)).exp()
            }
            Family::ExpNegNorm { scale } => (-scale * norm(x)).exp(),
            Family::GridProfile(g) => g.evaluate(self.profile(), x),
            Family::Shifted { inner, offset } => inner.eval(&sub(x, offset)),
            Family::SApprox { inner, s } => {
                let l = inner.log_eval(x);
                if l > -*s {
                    (1.0 + l / s).powf(*s)
                } else {
                    0.0
                }
            }
        }
    }

    /// log f(x), `-inf` outside the support.
    pub(crate) fn log_eval(&self, x: &[f64]) -> f64 {
        if let Some((c, law)) = self.radial() {
            return law.log_value(dist(x, &c));
        }
        match &self.family {
            Family::Shifted { inner, offset } => inner.log_eval(&sub(x, offset)),
            _ => self.eval(x).ln(),
        }
    }

    fn profile(&self) -> Profile {
        match self.class {
            Concavity::SConcave(s) => Profile::Power(s),
            Concavity::LogConcave => Profile::Log,
        }
    }

    /// sup f
    pub fn sup_value(&self) -> f64 {
        match &self.family {
            Family::GridProfile(g) => g.max_value(),
            Family::Shifted { inner, .. } => inner.sup_value(),
            Family::SApprox { inner, s } => {
                let m = inner.sup_value().ln();
                if m > -*s {
                    (1.0 + m / s).powf(*s)
                } else {
                    0.0
                }
            }
            _ => 1.0,
        }
    }

    /// Box containing the support, truncated where f < tail_eps for unbounded families.
    pub fn bounding_box(&self, tail_eps: f64) -> Bounds {
        if let Some((c, law)) = self.radial() {
            let (r, _) = law.effective_radius(tail_eps);
            return Bounds {
                lo: c.iter().map(|v| v - r).collect(),
                hi: c.iter().map(|v| v + r).collect(),
            };
        }
        match &self.family {
            Family::PolytopeIndicator(p) => {
                let (lo, hi) = p.bounds();
                Bounds { lo, hi }
            }
            Family::GridProfile(g) => {
                let (lo, hi) = g.bounds();
                Bounds { lo, hi }
            }
            Family::Shifted { inner, offset } => inner.bounding_box(tail_eps).translate(offset),
            Family::SApprox { inner, .. } => inner.bounding_box(tail_eps),
            _ => unreachable!("radial families handled above"),
        }
    }

    /// Natural split point for quadrature: the symmetry center when there is one.
    pub fn center_hint(&self) -> Vec<f64> {
        if let Some((c, _)) = self.radial() {
            return c;
        }
        match &self.family {
            Family::PolytopeIndicator(p) => p.centroid_of_vertices(),
            Family::Shifted { inner, offset } => {
                inner.center_hint().iter().zip(offset).map(|(a, b)| a + b).collect()
            }
            Family::SApprox { inner, .. } => inner.center_hint(),
            _ => {
                let c = self.bounding_box(DEFAULT_TAIL_EPS).center();
                if self.is_interior(&c, DEFAULT_SUPPORT_TOL) {
                    c
                } else {
                    self.mode_hint()
                }
            }
        }
    }

    /// Points interior to the support where f is largest, used as search seeds.
    pub fn mode_hint(&self) -> Vec<f64> {
        self.extremum(Lift::Log, &vec![0.0; self.dimension]).point
    }

    /// Boundary classification with a band of width `tol`.
    pub fn classify_support(&self, x: &[f64], tol: f64) -> Result<SupportClassification> {
        check_dim(self.dimension, x.len(), "point")?;
        if !(tol > 0.0) {
            return Err(Error::input("tolerance must be positive"));
        }
        Ok(self.classify(x, tol))
    }

    fn classify(&self, x: &[f64], tol: f64) -> SupportClassification {
        let from_depth = |depth: f64| {
            if depth > tol {
                SupportClassification::Interior
            } else if depth < -tol {
                SupportClassification::Outside
            } else {
                SupportClassification::Boundary { tolerance: tol }
            }
        };
        if let Some((c, law)) = self.radial() {
            return match law.hard_radius() {
                Some(r) => from_depth(r - dist(x, &c)),
                None => SupportClassification::Interior,
            };
        }
        match &self.family {
            Family::PolytopeIndicator(p) => from_depth(p.depth(x)),
            Family::Shifted { inner, offset } => inner.classify(&sub(x, offset), tol),
            _ => {
                // Sample the sphere of radius tol; by convexity of the support,
                // a positive sample set keeps Interior stable as tol shrinks.
                let d = self.dimension;
                let dirs = probe_directions(d);
                let center_in = self.eval(x) > 0.0;
                let mut inside = 0;
                for u in &dirs {
                    let p: Vec<f64> = x.iter().zip(u).map(|(a, b)| a + tol * b).collect();
                    if self.eval(&p) > 0.0 {
                        inside += 1;
                    }
                }
                if center_in && inside == dirs.len() {
                    SupportClassification::Interior
                } else if !center_in && inside == 0 {
                    SupportClassification::Outside
                } else {
                    SupportClassification::Boundary { tolerance: tol }
                }
            }
        }
    }

    /// True when x is interior to the support with margin `tol`.
    pub fn is_interior(&self, x: &[f64], tol: f64) -> bool {
        self.classify(x, tol) == SupportClassification::Interior
    }

    /// Random midpoint test of f^{1/s} (SConcave) or log f (LogConcave) on the support.
    pub fn validate_concavity(&self, trials: usize, seed: u64, tol: f64) -> ConcavityReport {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let bbox = self.bounding_box(DEFAULT_TAIL_EPS);
        let d = self.dimension;
        let profile = |v: f64| match self.class {
            Concavity::SConcave(s) => v.powf(1.0 / s),
            Concavity::LogConcave => v.ln(),
        };
        let draw = |rng: &mut ChaCha8Rng| -> Option<Vec<f64>> {
            for _ in 0..1000 {
                let p: Vec<f64> =
                    (0..d).map(|i| rng.random_range(bbox.lo[i]..=bbox.hi[i])).collect();
                if self.eval(&p) > 0.0 {
                    return Some(p);
                }
            }
            None
        };
        let mut violations = Vec::new();
        let mut checked = 0;
        for _ in 0..trials {
            let (Some(a), Some(b)) = (draw(&mut rng), draw(&mut rng)) else {
                continue;
            };
            let m: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 0.5 * (x + y)).collect();
            let (fa, fb, fm) = (self.eval(&a), self.eval(&b), self.eval(&m));
            checked += 1;
            let avg = 0.5 * (profile(fa) + profile(fb));
            let mid = profile(fm);
            let scale = avg.abs().max(1.0);
            if mid < avg - tol * scale {
                violations.push(ConcavityViolation {
                    x: a,
                    y: b,
                    midpoint_profile: mid,
                    average_profile: avg,
                });
            }
        }
        ConcavityReport { trials, checked, tolerance: tol, violations, seed }
    }

    /// Parses the JSON form `{"dimension", "class", "family"}`.
    pub fn from_json_str(text: &str) -> Result<FunctionSpec> {
        json::parse_str(text)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<FunctionSpec> {
        json::parse_value(value)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json::to_value(self)
    }
}

/// Axis and diagonal unit directions used for boundary probing.
pub(crate) fn probe_directions(d: usize) -> Vec<Vec<f64>> {
    let mut dirs = Vec::new();
    for code in 0..3usize.pow(d as u32) {
        let mut c = code;
        let v: Vec<f64> = (0..d)
            .map(|_| {
                let o = (c % 3) as f64 - 1.0;
                c /= 3;
                o
            })
            .collect();
        let n = norm(&v);
        if n > 0.0 {
            dirs.push(v.iter().map(|x| x / n).collect());
        }
    }
    dirs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluate_examples() {
        let h2 = FunctionSpec::hhat(1, 2.0).unwrap();
        assert_eq!(h2.evaluate(&[0.0]).unwrap(), 1.0);
        assert!((h2.evaluate(&[0.6]).unwrap() - 0.64).abs() < 1e-15);
        let g = FunctionSpec::standard_gaussian(2).unwrap();
        assert_eq!(g.evaluate(&[0.0, 0.0]).unwrap(), 1.0);
        let b = FunctionSpec::ball(vec![0.0, 0.0], 1.0, Concavity::SConcave(1.0)).unwrap();
        assert_eq!(b.evaluate(&[2.0, 0.0]).unwrap(), 0.0);
        assert!(b.evaluate(&[1.0]).is_err());
    }

    #[test]
    fn classify_examples() {
        let b = FunctionSpec::ball(vec![0.0, 0.0], 1.0, Concavity::SConcave(1.0)).unwrap();
        assert_eq!(b.classify_support(&[0.0, 0.0], 1e-3).unwrap(), SupportClassification::Interior);
        assert!(matches!(
            b.classify_support(&[1.0, 0.0], 1e-3).unwrap(),
            SupportClassification::Boundary { .. }
        ));
        assert_eq!(b.classify_support(&[3.0, 0.0], 1e-3).unwrap(), SupportClassification::Outside);
        let g = FunctionSpec::standard_gaussian(2).unwrap();
        assert_eq!(g.classify_support(&[40.0, -7.0], 1e-3).unwrap(), SupportClassification::Interior);
    }

    #[test]
    fn shift_is_exact() {
        let h = FunctionSpec::hhat(2, 1.5).unwrap();
        let v = [0.3, -0.2];
        let sh = h.shifted(&v).unwrap();
        for x in [[0.1, 0.2], [0.5, -0.4], [0.9, 0.0]] {
            let back = [x[0] - v[0], x[1] - v[1]];
            assert_eq!(sh.evaluate(&x).unwrap(), h.evaluate(&back).unwrap());
        }
    }

    #[test]
    fn degenerate_specs_rejected() {
        assert!(FunctionSpec::ball(vec![0.0], 0.0, Concavity::LogConcave).is_err());
        assert!(FunctionSpec::polytope(vec![vec![0.0, 0.0], vec![1.0, 0.0]], Concavity::LogConcave)
            .is_err());
        assert!(FunctionSpec::hhat(4, 1.0).is_err());
    }

    #[test]
    fn concavity_of_builtin_families() {
        let specs = [
            FunctionSpec::hhat(2, 2.0).unwrap(),
            FunctionSpec::hhat(3, 0.5).unwrap(),
            FunctionSpec::standard_gaussian(2).unwrap(),
            FunctionSpec::exp_neg_norm(1, 2.0).unwrap(),
            FunctionSpec::box_indicator(&[-1.0, -1.0], &[1.0, 2.0], Concavity::SConcave(1.0))
                .unwrap(),
        ];
        for spec in &specs {
            let r = spec.validate_concavity(1000, 3, 1e-9);
            assert!(r.violations.is_empty(), "{}", spec.family_name());
            assert!(r.checked > 900);
        }
    }

    #[test]
    fn bumped_grid_is_detected() {
        let mut vals: Vec<f64> = (0..21).map(|i| 1.0 - ((i as f64 - 10.0) / 10.0).powi(2)).collect();
        let ok = FunctionSpec::grid(vec![-1.0], vec![0.1], vec![21], vals.clone(), Concavity::SConcave(1.0))
            .unwrap();
        assert!(ok.validate_concavity(1000, 1, 1e-9).violations.is_empty());
        vals[13] += 0.2;
        vals[7] -= 0.3;
        let bad = FunctionSpec::grid(vec![-1.0], vec![0.1], vec![21], vals, Concavity::SConcave(1.0))
            .unwrap();
        assert!(!bad.validate_concavity(1000, 1, 1e-9).violations.is_empty());
    }
}

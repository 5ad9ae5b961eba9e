//! The s-lifting K̂_s(f) ⊂ R^{d+1}, s-volumes, the polar-lifting check and the
//! integer-s lift K_s(f).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{check_dim, Error, Result};
use crate::funcmodel::{Bounds, FunctionSpec, Lift, DEFAULT_TAIL_EPS};
use crate::optim::nelder_mead;
use crate::polar_integrals::{Cubature, IntegrationConfig, Region};
use crate::transforms::s_polar;
use crate::vecops::{dot, norm};

/// Support-function oracle of K̂_s(f(· + z)).
#[derive(Debug, Clone)]
pub struct LiftedBody {
    base: FunctionSpec,
    s: f64,
    center_shift: Vec<f64>,
}

impl LiftedBody {
    pub fn new(base: FunctionSpec, s: f64, center_shift: Vec<f64>) -> Result<LiftedBody> {
        check_dim(base.dimension(), center_shift.len(), "center shift")?;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::input("s must be positive and finite"));
        }
        Ok(LiftedBody { base, s, center_shift })
    }

    pub fn base(&self) -> &FunctionSpec {
        &self.base
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn center_shift(&self) -> &[f64] {
        &self.center_shift
    }

    pub fn dim(&self) -> usize {
        self.base.dimension()
    }

    /// h at a unit vector u ∈ S^d.
    pub fn support(&self, u: &[f64]) -> Result<f64> {
        check_dim(self.dim() + 1, u.len(), "direction")?;
        if (norm(u) - 1.0).abs() > 1e-12 {
            return Err(Error::input("direction must be a unit vector"));
        }
        let h = self.support_any(u);
        if !h.is_finite() {
            return Err(Error::numeric("support function is unbounded in this direction"));
        }
        Ok(h)
    }

    /// Positively homogeneous extension of h to all of R^{d+1}; +inf when unbounded.
    pub fn support_any(&self, v: &[f64]) -> f64 {
        let d = self.dim();
        let (vh, t) = (&v[..d], v[d].abs());
        if !self.base.has_bounded_support() && norm(vh) > 0.0 {
            return f64::INFINITY;
        }
        self.base.extremum(Lift::Power { s: self.s, weight: t }, vh).value - dot(&self.center_shift, vh)
    }

    /// Maximizing point (x - z, ξ) of <·, v> over the body.
    pub fn support_point(&self, v: &[f64]) -> Vec<f64> {
        let d = self.dim();
        let e = self.base.extremum(Lift::Power { s: self.s, weight: v[d].abs() }, &v[..d]);
        let mut p: Vec<f64> = e.point.iter().zip(&self.center_shift).map(|(a, b)| a - b).collect();
        p.push(if v[d] < 0.0 { -e.profile } else { e.profile });
        p
    }
}

/// Vertical half-chord x -> (1/2)|C ∩ ℓ_x| of a d-symmetric body C.
#[derive(Debug, Clone)]
pub enum ChordLengthField {
    /// K̂_s(f): half-chord f(x)^{1/s}.
    Lifted(LiftedBody),
    /// Half-chords recovered from the support function alone:
    /// c(x) = inf over u_{d+1} > 0 of (h(u) - <x, u'>) / u_{d+1}.
    FromSupport(LiftedBody),
    /// The unit ball B^{d+1}.
    UnitBall { d: usize },
    /// The box [lo, hi] x [-half_height, half_height].
    Box { lo: Vec<f64>, hi: Vec<f64>, half_height: f64 },
}

impl ChordLengthField {
    pub fn dim(&self) -> usize {
        match self {
            ChordLengthField::Lifted(b) | ChordLengthField::FromSupport(b) => b.dim(),
            ChordLengthField::UnitBall { d } => *d,
            ChordLengthField::Box { lo, .. } => lo.len(),
        }
    }

    pub fn half_chord(&self, x: &[f64]) -> f64 {
        match self {
            ChordLengthField::Lifted(b) => {
                let p: Vec<f64> = x.iter().zip(&b.center_shift).map(|(a, z)| a + z).collect();
                b.base.eval(&p).powf(1.0 / b.s)
            }
            ChordLengthField::FromSupport(b) => chord_from_support(b, x),
            ChordLengthField::UnitBall { .. } => (1.0 - dot(x, x)).max(0.0).sqrt(),
            ChordLengthField::Box { lo, hi, half_height } => {
                let inside = x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b);
                if inside {
                    *half_height
                } else {
                    0.0
                }
            }
        }
    }

    fn region(&self) -> Region {
        match self {
            ChordLengthField::Lifted(b) | ChordLengthField::FromSupport(b) => {
                b.base.support_region(DEFAULT_TAIL_EPS).translate(&b.center_shift.iter().map(|v| -v).collect::<Vec<_>>())
            }
            ChordLengthField::UnitBall { d } => Region::Ball { center: vec![0.0; *d], radius: 1.0 },
            ChordLengthField::Box { lo, hi, .. } => {
                let d = lo.len();
                let mut normals = Vec::new();
                let mut offsets = Vec::new();
                for i in 0..d {
                    let mut n = vec![0.0; d];
                    n[i] = 1.0;
                    normals.push(n.clone());
                    offsets.push(hi[i]);
                    n[i] = -1.0;
                    normals.push(n);
                    offsets.push(-lo[i]);
                }
                Region::Polytope { normals, offsets }
            }
        }
    }
}

/// Vertical extent of the lifted body above x, from the support oracle only.
fn chord_from_support(b: &LiftedBody, x: &[f64]) -> f64 {
    let d = b.dim();
    // u = (w, 1) / |(w, 1)| with w = p / (1 - |p|), |p| < 1, sweeps the upper hemisphere
    let obj = |p: &[f64]| {
        let r = norm(p);
        if r >= 1.0 {
            return f64::NEG_INFINITY;
        }
        let mut v: Vec<f64> = p.iter().map(|c| c / (1.0 - r)).collect();
        v.push(1.0);
        let h = b.support_any(&v);
        -(h - dot(x, &v[..d]))
    };
    let bbox = Bounds { lo: vec![-1.0; d], hi: vec![1.0; d] };
    let (_, best) = if d == 1 {
        let phi = |t: f64| obj(&[t]);
        let t = crate::funcmodel::golden_max(&phi, -1.0 + 1e-15, 1.0 - 1e-15);
        (vec![t], phi(t))
    } else {
        let mut best = (vec![0.0; d], obj(&vec![0.0; d]));
        for start in [vec![0.0; d], x.iter().map(|c| 0.5 * c).collect()] {
            let (p, _) = nelder_mead(&obj, &start, &vec![0.1; d], &bbox);
            let (p, v) = nelder_mead(&obj, &p, &vec![0.01; d], &bbox);
            if v > best.1 {
                best = (p, v);
            }
        }
        best
    };
    (-best).max(0.0)
}

/// ∫ (half-chord)^s dx.
pub fn s_volume(chords: &ChordLengthField, s: f64, cfg: &IntegrationConfig) -> Result<f64> {
    cfg.validate()?;
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::input("s must be positive and finite"));
    }
    let region = chords.region();
    let d = chords.dim();
    let split = match chords {
        ChordLengthField::Lifted(b) | ChordLengthField::FromSupport(b) => {
            b.base.center_hint().iter().zip(&b.center_shift).map(|(c, z)| c - z).collect()
        }
        _ => vec![0.0; d],
    };
    let cub = Cubature::build(&region, &split, None, cfg);
    let e = cub.integrate(&|x: &[f64]| chords.half_chord(x).powf(s));
    Ok(crate::polar_integrals::check_estimate(e, cfg, "s-volume")?.value)
}

#[derive(Debug, Clone, Serialize)]
pub struct LiftingReport {
    pub op: String,
    pub inputs_digest: String,
    pub samples: usize,
    pub disagreements: usize,
    pub max_violation: f64,
    pub seed: u64,
}

pub(crate) fn digest(parts: &[String]) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update(p.as_bytes());
        h.update([0u8]);
    }
    h.finalize().iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// Radial extent of supp f from z along the unit direction u.
pub(crate) fn support_radius(spec: &FunctionSpec, z: &[f64], u: &[f64]) -> f64 {
    let bbox = spec.bounding_box(DEFAULT_TAIL_EPS);
    let mut hi = bbox.diameter().max(1e-300) * 2.0;
    let inside = |r: f64| {
        let p: Vec<f64> = z.iter().zip(u).map(|(a, b)| a + r * b).collect();
        spec.eval(&p) > 0.0
    };
    if inside(hi) {
        return f64::INFINITY;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let m = 0.5 * (lo + hi);
        if m <= lo || m >= hi {
            break;
        }
        if inside(m) {
            lo = m;
        } else {
            hi = m;
        }
    }
    lo
}

/// Box containing the polar of supp f - z: axis i spans [-1/ρ(-e_i), 1/ρ(e_i)].
pub(crate) fn polar_bounds(spec: &FunctionSpec, z: &[f64]) -> Bounds {
    let d = spec.dimension();
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    for i in 0..d {
        let mut e = vec![0.0; d];
        e[i] = 1.0;
        hi[i] = (1.0 + 1e-9) / support_radius(spec, z, &e);
        e[i] = -1.0;
        lo[i] = -(1.0 + 1e-9) / support_radius(spec, z, &e);
    }
    Bounds { lo, hi }
}

fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [usize; 8] = [2, 3, 5, 7, 11, 13, 17, 19];

/// Tests (K̂_s f)° = K̂_s(L_s f) on random points (y, τ).
pub fn polar_lifting_check(spec: &FunctionSpec, s: f64, samples: usize, seed: u64) -> Result<LiftingReport> {
    let d = spec.dimension();
    let origin = vec![0.0; d];
    if !spec.is_interior(&origin, 1e-9) {
        return Err(Error::domain("the origin must be interior to the support"));
    }
    if !spec.has_bounded_support() {
        return Err(Error::Unsupported("polar lifting check needs a bounded support".into()));
    }
    let body = LiftedBody::new(spec.clone(), s, origin.clone())?;
    // deterministic low-discrepancy sample of K̂_s f
    let bbox = spec.bounding_box(DEFAULT_TAIL_EPS);
    let top = spec.sup_value().powf(1.0 / s);
    let mut cloud: Vec<Vec<f64>> = Vec::new();
    let mut k = 1;
    while cloud.len() < 2000 && k < 200_000 {
        let mut p: Vec<f64> =
            (0..d).map(|i| bbox.lo[i] + (bbox.hi[i] - bbox.lo[i]) * halton(k, PRIMES[i])).collect();
        let xi = top * (2.0 * halton(k, PRIMES[d]) - 1.0);
        let g = spec.eval(&p).powf(1.0 / s);
        if xi.abs() <= g {
            p.push(xi);
            cloud.push(p);
        }
        k += 1;
    }
    let pb = polar_bounds(spec, &origin);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let band = 1e-8;
    let mut disagreements = 0;
    let mut max_violation: f64 = 0.0;
    let inv_top = 1.0 / top;
    for _ in 0..samples {
        let y: Vec<f64> = (0..d).map(|i| 1.2 * rng.random_range(pb.lo[i]..=pb.hi[i])).collect();
        let l = s_polar(spec, s, &y)?;
        let a = l.powf(1.0 / s) + 0.1 * inv_top;
        let tau = rng.random_range(-1.3 * a..=1.3 * a);
        let mut v = y.clone();
        v.push(tau);
        let mut best = cloud.iter().map(|p| dot(p, &v)).fold(f64::NEG_INFINITY, f64::max);
        best = best.max(dot(&body.support_point(&v), &v));
        let in_polar = best <= 1.0;
        let in_lift = tau.abs().powf(s) <= l;
        let ambiguous = (best - 1.0).abs() <= band || (tau.abs().powf(s) - l).abs() <= band;
        if in_polar != in_lift && !ambiguous {
            disagreements += 1;
            max_violation = max_violation.max((best - 1.0).abs());
        }
    }
    Ok(LiftingReport {
        op: "polar_lifting_check".into(),
        inputs_digest: digest(&[spec.to_json().to_string(), s.to_string()]),
        samples,
        disagreements,
        max_violation,
        seed,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MonteCarloConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig { samples: 400_000, seed: 1 }
    }
}

impl MonteCarloConfig {
    pub fn validate(&self) -> Result<()> {
        if self.samples < 10_000 {
            return Err(Error::input("Monte Carlo needs at least 10^4 samples"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub value: f64,
    pub std_err: f64,
    pub samples: usize,
}

const CHUNK: usize = 1 << 14;

/// Rejection sampling in `bounds`; chunk c draws from stream c of the seed.
pub(crate) fn mc_volume(
    bounds: &Bounds,
    mc: &MonteCarloConfig,
    inside: &(dyn Fn(&[f64]) -> bool + Sync),
) -> McEstimate {
    let n = mc.samples;
    let chunks = n.div_ceil(CHUNK);
    let dim = bounds.dim();
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(mc.seed);
            rng.set_stream(c as u64);
            let m = CHUNK.min(n - c * CHUNK);
            let mut p = vec![0.0; dim];
            let mut h = 0u64;
            for _ in 0..m {
                for i in 0..dim {
                    p[i] = rng.random_range(bounds.lo[i]..bounds.hi[i]);
                }
                if inside(&p) {
                    h += 1;
                }
            }
            h
        })
        .collect::<Vec<u64>>()
        .iter()
        .sum();
    let frac = hits as f64 / n as f64;
    let vol = bounds.volume();
    McEstimate {
        value: vol * frac,
        std_err: vol * (frac * (1.0 - frac) / n as f64).sqrt(),
        samples: n,
    }
}

/// vol_s(B^s)
pub fn unit_ball_volume(s: usize) -> f64 {
    let h = s as f64 / 2.0;
    std::f64::consts::PI.powf(h) / libm::tgamma(h + 1.0)
}

fn check_integer_s(s: usize) -> Result<()> {
    if !(1..=3).contains(&s) {
        return Err(Error::Unsupported(format!("integer lift needs s in 1..=3, got {s}")));
    }
    Ok(())
}

/// Monte Carlo volume of K_s(f) = {(x, y) ∈ R^d × R^s : |y| <= (f(x)/vol_s B^s)^{1/s}}.
pub fn integer_lift_volume(spec: &FunctionSpec, s: usize, mc: &MonteCarloConfig) -> Result<McEstimate> {
    check_integer_s(s)?;
    mc.validate()?;
    let d = spec.dimension();
    let omega = unit_ball_volume(s);
    let bbox = spec.bounding_box(DEFAULT_TAIL_EPS);
    let r = (spec.sup_value() / omega).powf(1.0 / s as f64);
    let mut lo = bbox.lo.clone();
    let mut hi = bbox.hi.clone();
    lo.extend(std::iter::repeat(-r).take(s));
    hi.extend(std::iter::repeat(r).take(s));
    let sf = s as f64;
    let inside = |p: &[f64]| {
        let y2: f64 = p[d..].iter().map(|v| v * v).sum();
        omega * y2.powf(sf / 2.0) <= spec.eval(&p[..d])
    };
    Ok(mc_volume(&Bounds { lo, hi }, mc, &inside))
}

/// Monte Carlo volume of (K_s(f) - z)° ⊂ R^{d+s}.
pub fn integer_lift_polar_volume(
    spec: &FunctionSpec,
    s: usize,
    z: &[f64],
    mc: &MonteCarloConfig,
) -> Result<McEstimate> {
    check_integer_s(s)?;
    mc.validate()?;
    check_dim(spec.dimension(), z.len(), "center")?;
    if !spec.is_interior(z, 1e-9) {
        return Err(Error::domain("z must be interior to the support"));
    }
    let d = spec.dimension();
    let sf = s as f64;
    let omega = unit_ball_volume(s);
    let body = LiftedBody::new(spec.clone(), sf, z.to_vec())?;
    let pb = polar_bounds(spec, z);
    let zeta_max = (omega / spec.eval(z)).powf(1.0 / sf);
    let mut lo = pb.lo.clone();
    let mut hi = pb.hi.clone();
    lo.extend(std::iter::repeat(-zeta_max).take(s));
    hi.extend(std::iter::repeat(zeta_max).take(s));
    let scale = omega.powf(-1.0 / sf);
    let inside = |p: &[f64]| {
        let zeta = p[d..].iter().map(|v| v * v).sum::<f64>().sqrt();
        let mut v = p[..d].to_vec();
        v.push(zeta * scale);
        body.support_any(&v) <= 1.0
    };
    Ok(mc_volume(&Bounds { lo, hi }, mc, &inside))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcmodel::Concavity;

    fn interval() -> FunctionSpec {
        FunctionSpec::box_indicator(&[-1.0], &[1.0], Concavity::SConcave(1.0)).unwrap()
    }

    #[test]
    fn square_support() {
        let b = LiftedBody::new(interval(), 1.0, vec![0.0]).unwrap();
        let u = [0.5f64.sqrt(), 0.5f64.sqrt()];
        assert!((b.support(&u).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert!(b.support(&[1.0, 1.0]).is_err());
    }

    #[test]
    fn hhat_lift_is_ball() {
        let b = LiftedBody::new(FunctionSpec::hhat(2, 0.7).unwrap(), 0.7, vec![0.0, 0.0]).unwrap();
        for u in [[0.0, 0.0, 1.0], [0.6, 0.0, 0.8], [0.0, -1.0, 0.0], [0.48, 0.6, -0.64]] {
            assert!((b.support(&u).unwrap() - 1.0).abs() < 1e-12, "{u:?}");
        }
    }

    #[test]
    fn vertical_extent() {
        let spec = FunctionSpec::grid(vec![-1.0], vec![0.5], vec![5], vec![0.0, 0.5, 2.0, 0.5, 0.0], Concavity::SConcave(2.0))
            .unwrap();
        let b = LiftedBody::new(spec, 2.0, vec![0.0]).unwrap();
        assert!((b.support(&[0.0, 1.0]).unwrap() - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn s_volume_examples() {
        let cfg = IntegrationConfig::default();
        let v = s_volume(&ChordLengthField::UnitBall { d: 2 }, 2.0, &cfg).unwrap();
        assert!((v - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
        let sq = ChordLengthField::Box { lo: vec![-1.0], hi: vec![1.0], half_height: 1.0 };
        assert!((s_volume(&sq, 1.0, &cfg).unwrap() - 2.0).abs() < 1e-13);
        let body = LiftedBody::new(FunctionSpec::hhat(1, 2.0).unwrap(), 2.0, vec![0.0]).unwrap();
        let v = s_volume(&ChordLengthField::FromSupport(body), 2.0, &cfg).unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-8, "{v}");
    }

    #[test]
    fn integer_lift_interval() {
        let mc = MonteCarloConfig { samples: 100_000, seed: 5 };
        let e = integer_lift_volume(&interval(), 1, &mc).unwrap();
        assert!((e.value - 2.0).abs() <= 3.0 * e.std_err + 1e-12, "{e:?}");
        let again = integer_lift_volume(&interval(), 1, &mc).unwrap();
        assert_eq!(e, again);
    }
}

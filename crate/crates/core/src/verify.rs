//! Verification suites: each suite is a list of independent cases checking a
//! theorem-level property numerically. Reports serialize as JSONL.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::funcmodel::{Concavity, FunctionSpec};
use crate::lifting::{
    integer_lift_polar_volume, integer_lift_volume, polar_lifting_check, s_volume, unit_ball_volume, ChordLengthField,
    LiftedBody, MonteCarloConfig,
};
use crate::polar_integrals::{integrate_grid, phi_oracle, Exponent, IntegrationConfig, PhiFunction, SphereFormula, SphereQuadrature};
use crate::regions::{region_convergence, region_properties, sp_membership_with, RegionKind, RegionQuery};
use crate::santalo::{
    hyperplane_for_lambda, onedim_duality_check, onedim_lambda_check, santalo_point, shift_defect, verify_santalo,
    HalfLineProfile, LevelTransform, SolverConfig,
};
use crate::transforms::{convergence_study, legendre, log_polar, mean_power, s_approx, s_polar, LegendreValue, Potential};
use crate::vecops::{dist, dot, norm};

pub const SUITES: [&str; 7] = ["lifting", "transforms", "alexandrov", "santalo", "onedim", "approx", "regions"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CaseResult {
    pub suite: String,
    pub case: String,
    pub pass: bool,
    /// Signed margin against the tolerance, normalized; negative means failure.
    pub slack: f64,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: String,
    pub seed: u64,
    pub passed: usize,
    pub failed: usize,
    pub worst_slack: f64,
    pub cases: Vec<CaseResult>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.failed == 0
    }

    /// One line per case, then a summary line.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.cases {
            out.push_str(&serde_json::to_string(c).unwrap_or_default());
            out.push('\n');
        }
        let summary = json!({
            "suite": self.suite,
            "seed": self.seed,
            "summary": true,
            "passed": self.passed,
            "failed": self.failed,
            "worst_slack": finite_or_null(self.worst_slack),
        });
        out.push_str(&summary.to_string());
        out.push('\n');
        out
    }
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

/// Outcome of one case: pass flag, normalized slack, details.
pub type Outcome = (bool, f64, Value);
type CaseFn = Box<dyn Fn(u64) -> Result<Outcome> + Send + Sync>;

struct Case {
    name: String,
    run: CaseFn,
}

fn case(name: impl Into<String>, run: impl Fn(u64) -> Result<Outcome> + Send + Sync + 'static) -> Case {
    Case { name: name.into(), run: Box::new(run) }
}

/// slack of `err <= tol`, as a fraction of tol
fn within(err: f64, tol: f64) -> (bool, f64) {
    (err <= tol, if err.is_finite() { (tol - err) / tol } else { f64::NEG_INFINITY })
}

fn run_cases(suite: &str, seed: u64, cases: Vec<Case>) -> SuiteReport {
    let results: Vec<CaseResult> = cases
        .par_iter()
        .enumerate()
        .map(|(i, c)| {
            let case_seed = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64 + 1);
            match (c.run)(case_seed) {
                Ok((pass, slack, detail)) => CaseResult {
                    suite: suite.into(),
                    case: c.name.clone(),
                    pass: pass && !slack.is_nan(),
                    slack,
                    detail,
                },
                Err(e) => CaseResult {
                    suite: suite.into(),
                    case: c.name.clone(),
                    pass: false,
                    slack: f64::NEG_INFINITY,
                    detail: json!({ "error": e.to_string() }),
                },
            }
        })
        .collect();
    let passed = results.iter().filter(|c| c.pass).count();
    let worst_slack = results.iter().map(|c| c.slack).fold(f64::INFINITY, f64::min);
    SuiteReport { suite: suite.into(), seed, passed, failed: results.len() - passed, worst_slack, cases: results }
}

pub fn run_suite(name: &str, seed: u64) -> Result<SuiteReport> {
    let cases = match name {
        "lifting" => lifting_cases()?,
        "transforms" => transforms_cases()?,
        "alexandrov" => alexandrov_cases()?,
        "santalo" => santalo_cases()?,
        "onedim" => onedim_cases(),
        "approx" => approx_cases()?,
        "regions" => regions_cases()?,
        _ => {
            return Err(Error::input(format!("unknown suite {name:?}; expected one of {}", SUITES.join(", "))));
        }
    };
    Ok(run_cases(name, seed, cases))
}

/// The built-in family grid: box, ball, ĥ^s, a simplex (d >= 2) and f_s of a
/// Gaussian, all 1/s-concave.
pub fn suite_families(d: usize, s: f64) -> Result<Vec<(String, FunctionSpec)>> {
    let class = Concavity::SConcave(s);
    let lo: Vec<f64> = [-1.0, -0.5, -0.8][..d].to_vec();
    let hi: Vec<f64> = [1.5, 1.0, 0.6][..d].to_vec();
    let mut out = vec![
        ("box".to_string(), FunctionSpec::box_indicator(&lo, &hi, class)?),
        ("ball".to_string(), FunctionSpec::ball([0.2, -0.1, 0.05][..d].to_vec(), 1.0, class)?),
        ("hhat".to_string(), FunctionSpec::hhat(d, s)?),
    ];
    if d >= 2 {
        let mut verts = vec![vec![0.0; d]];
        for i in 0..d {
            let mut v = vec![0.0; d];
            v[i] = [2.0, 1.5, 1.2][i];
            verts.push(v);
        }
        out.push(("simplex".to_string(), FunctionSpec::polytope(verts, class)?));
    }
    let g = FunctionSpec::gaussian([0.3, -0.2, 0.1][..d].to_vec(), 1.0)?;
    out.push(("gaussian_fs".to_string(), s_approx(&g, s)?));
    Ok(out)
}

/// Centrally symmetric families with their symmetry center.
pub fn even_families(d: usize, s: f64) -> Result<Vec<(String, FunctionSpec, Vec<f64>)>> {
    let class = Concavity::SConcave(s);
    let c = vec![0.0; d];
    Ok(vec![
        ("box".into(), FunctionSpec::box_indicator(&vec![-1.0; d], &vec![1.0; d], class)?, c.clone()),
        ("ball".into(), FunctionSpec::ball(vec![0.25; d], 1.0, class)?, vec![0.25; d]),
        ("hhat".into(), FunctionSpec::hhat(d, s)?, c.clone()),
        ("gaussian_fs".into(), s_approx(&FunctionSpec::standard_gaussian(d)?, s)?, c),
    ])
}

/// Random points of the support pulled toward its center by `shrink`.
pub fn interior_samples(spec: &FunctionSpec, n: usize, shrink: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let b = spec.bounding_box(1e-6);
    let c = spec.center_hint();
    let d = spec.dimension();
    let mut out = Vec::with_capacity(n);
    let mut tries = 0;
    while out.len() < n && tries < 10_000 * n.max(1) {
        tries += 1;
        let x: Vec<f64> = (0..d).map(|i| rng.random_range(b.lo[i]..=b.hi[i])).collect();
        if spec.is_interior(&x, 1e-9) {
            out.push(c.iter().zip(&x).map(|(ci, xi)| ci + shrink * (xi - ci)).collect());
        }
    }
    out
}

fn random_unit(d: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..=1.0)).collect();
        let n = norm(&v);
        if n > 0.1 && n <= 1.0 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

/// |diff| in units of sigma; a zero sigma (the sampling box is the body
/// itself) asks for agreement to rounding.
fn sigma_distance(diff: f64, sigma: f64, scale: f64) -> f64 {
    if sigma > 0.0 {
        diff.abs() / sigma
    } else if diff.abs() <= 1e-9 * scale.abs() {
        0.0
    } else {
        f64::INFINITY
    }
}

const S_GRID: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

// ---------------------------------------------------------------- lifting

fn lifting_cases() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    let cfg = IntegrationConfig::default();
    for d in 1..=2 {
        for s in S_GRID {
            for (name, spec) in suite_families(d, s)? {
                let sp = spec.clone();
                cases.push(case(format!("s_volume/{name}/d{d}/s{s}"), move |_| {
                    let body = LiftedBody::new(sp.clone(), s, vec![0.0; d])?;
                    let v = s_volume(&ChordLengthField::Lifted(body), s, &cfg)?;
                    let want = integrate_grid(&sp, &cfg)?.value;
                    let err = (v - want).abs() / want;
                    let (pass, slack) = within(err, 1e-4);
                    Ok((pass, slack, json!({"s_volume": v, "integral": want, "rel_err": err})))
                }));
            }
        }
    }
    // half-chords recovered from the support function
    for (name, spec) in suite_families(1, 2.0)? {
        cases.push(case(format!("s_volume_from_support/{name}/d1/s2"), move |_| {
            let cfg = IntegrationConfig::with_resolution(24);
            let body = LiftedBody::new(spec.clone(), 2.0, vec![0.0])?;
            let v = s_volume(&ChordLengthField::FromSupport(body), 2.0, &cfg)?;
            let want = integrate_grid(&spec, &IntegrationConfig::default())?.value;
            let err = (v - want).abs() / want;
            let (pass, slack) = within(err, 1e-4);
            Ok((pass, slack, json!({"s_volume": v, "integral": want, "rel_err": err})))
        }));
    }
    for d in 1..=2 {
        for s in [1usize, 2] {
            for (name, spec) in suite_families(d, s as f64)? {
                cases.push(case(format!("integer_lift_mc/{name}/d{d}/s{s}"), move |seed| {
                    let mc = MonteCarloConfig { samples: 400_000, seed };
                    let est = integer_lift_volume(&spec, s, &mc)?;
                    let want = integrate_grid(&spec, &IntegrationConfig::default())?.value;
                    let sigmas = sigma_distance(est.value - want, est.std_err, want);
                    let (pass, slack) = within(sigmas, 3.0);
                    Ok((pass, slack, json!({"mc": est.value, "std_err": est.std_err, "integral": want, "sigmas": sigmas})))
                }));
            }
        }
    }
    for d in 1..=2 {
        for s in [0.5, 2.0] {
            for (name, spec) in suite_families(d, s)? {
                if !spec.has_bounded_support() {
                    continue;
                }
                cases.push(case(format!("polar_lifting/{name}/d{d}/s{s}"), move |seed| {
                    let r = polar_lifting_check(&spec.centered_at(&spec.center_hint())?, s, 400, seed)?;
                    let pass = r.disagreements == 0;
                    Ok((pass, if pass { 1.0 } else { -(r.disagreements as f64) }, serde_json::to_value(&r).unwrap_or_default()))
                }));
            }
        }
    }
    for (name, spec) in suite_families(2, 1.5)? {
        cases.push(case(format!("shift_covariance/{name}"), move |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let z = interior_samples(&spec, 1, 0.5, &mut rng).pop().unwrap_or_else(|| spec.center_hint());
            let a = LiftedBody::new(spec.clone(), 1.5, vec![0.0; 2])?;
            let b = LiftedBody::new(spec.centered_at(&z)?, 1.5, vec![0.0; 2])?;
            let mut worst: f64 = 0.0;
            for _ in 0..50 {
                let u = random_unit(3, &mut rng);
                let want = a.support(&u)? - dot(&z, &u[..2]);
                worst = worst.max((b.support(&u)? - want).abs());
            }
            let (pass, slack) = within(worst, 1e-9);
            Ok((pass, slack, json!({"z": z, "max_abs_err": worst})))
        }));
    }
    // ∫f ∫L_s(shift f z) = vol K_s(f) · vol (K_s(f) - z)° / ω_s²
    for s in [1usize, 2] {
        for (name, spec) in suite_families(1, s as f64)? {
            if !spec.has_bounded_support() {
                continue;
            }
            cases.push(case(format!("integer_lift_product/{name}/s{s}"), move |seed| {
                let cfg = IntegrationConfig::default();
                let z = vec![spec.center_hint()[0] + 0.1];
                let mc = MonteCarloConfig { samples: 400_000, seed };
                let a = integer_lift_volume(&spec, s, &mc)?;
                let b = integer_lift_polar_volume(&spec, s, &z, &MonteCarloConfig { seed: seed ^ 0x5555, ..mc })?;
                let w = unit_ball_volume(s);
                let mc_prod = a.value * b.value / (w * w);
                let sigma = mc_prod * ((a.std_err / a.value).powi(2) + (b.std_err / b.value).powi(2)).sqrt();
                let want = integrate_grid(&spec, &cfg)?.value * phi_oracle(&spec, s as f64, &z, &cfg)?.value;
                let sigmas = sigma_distance(mc_prod - want, sigma, want);
                let (pass, slack) = within(sigmas, 3.0);
                Ok((pass, slack, json!({"mc_product": mc_prod, "sigma": sigma, "product": want, "sigmas": sigmas})))
            }));
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------- transforms

/// Self-polarity of ĥ^s on `n` random points of the unit ball and beyond.
pub fn hhat_self_polarity(d: usize, s: f64, n: usize, seed: u64) -> Result<f64> {
    let f = FunctionSpec::hhat(d, s)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let r = rng.random_range(0.0..1.2f64);
        let y: Vec<f64> = random_unit(d, &mut rng).iter().map(|v| v * r).collect();
        let want = (1.0 - r * r).max(0.0).powf(s / 2.0);
        worst = worst.max((s_polar(&f, s, &y)? - want).abs());
    }
    Ok(worst)
}

/// Self-polarity of the standard Gaussian under L_∞.
pub fn gaussian_self_polarity(d: usize, n: usize, seed: u64) -> Result<f64> {
    let g = FunctionSpec::standard_gaussian(d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..n {
        let y: Vec<f64> = (0..d).map(|_| rng.random_range(-3.0..=3.0)).collect();
        let want = (-0.5 * dot(&y, &y)).exp();
        worst = worst.max((log_polar(&g, &y)? - want).abs());
    }
    Ok(worst)
}

fn transforms_cases() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for d in 1..=3 {
        for s in S_GRID {
            cases.push(case(format!("self_polar_hhat/d{d}/s{s}"), move |seed| {
                let worst = hhat_self_polarity(d, s, 200, seed)?;
                let (pass, slack) = within(worst, 1e-6);
                Ok((pass, slack, json!({"max_abs_err": worst})))
            }));
        }
        cases.push(case(format!("self_polar_gaussian/d{d}"), move |seed| {
            let worst = gaussian_self_polarity(d, 200, seed)?;
            let (pass, slack) = within(worst, 1e-6);
            Ok((pass, slack, json!({"max_abs_err": worst})))
        }));
    }
    for d in 1..=2 {
        for s in [0.5, 2.0] {
            cases.push(case(format!("order_reversal/d{d}/s{s}"), move |seed| {
                let class = Concavity::SConcave(s);
                let small = FunctionSpec::ball(vec![0.1; d], 0.6, class)?;
                let big = FunctionSpec::box_indicator(&vec![-1.0; d], &vec![1.0; d], class)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut bad = 0;
                for _ in 0..100 {
                    let y: Vec<f64> = (0..d).map(|_| rng.random_range(-1.5..=1.5)).collect();
                    if s_polar(&small, s, &y)? < s_polar(&big, s, &y)? - 1e-12 {
                        bad += 1;
                    }
                }
                Ok((bad == 0, if bad == 0 { 1.0 } else { -(bad as f64) }, json!({"violations": bad})))
            }));
            // L_s 1_{rB} = (1 - r|y|)_+^s is the f_s of exp(-r s |y|)
            cases.push(case(format!("involution/d{d}/s{s}"), move |seed| {
                let r = 0.7;
                let ball = FunctionSpec::ball(vec![0.0; d], r, Concavity::SConcave(s))?;
                let dual = s_approx(&FunctionSpec::exp_neg_norm(d, r * s)?, s)?;
                let hh = FunctionSpec::hhat(d, s)?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut worst: f64 = 0.0;
                for _ in 0..50 {
                    let x: Vec<f64> = random_unit(d, &mut rng).iter().map(|v| v * rng.random_range(0.0..0.95 * r)).collect();
                    worst = worst.max((s_polar(&dual, s, &x)? - ball.eval(&x)).abs());
                    let y: Vec<f64> = random_unit(d, &mut rng).iter().map(|v| v * rng.random_range(0.0..0.95 / r)).collect();
                    worst = worst.max((s_polar(&ball, s, &y)? - dual.eval(&y)).abs());
                    let x: Vec<f64> = random_unit(d, &mut rng).iter().map(|v| v * rng.random_range(0.0..0.95)).collect();
                    let u = s_polar(&hh, s, &x)?;
                    worst = worst.max((u - hh.eval(&x)).abs());
                }
                let (pass, slack) = within(worst, 1e-6);
                Ok((pass, slack, json!({"max_abs_err": worst})))
            }));
        }
        cases.push(case(format!("fenchel_young/d{d}"), move |seed| {
            let g = FunctionSpec::gaussian(vec![0.2; d], 1.3)?;
            let pot = Potential::FromFunction(g);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst_gap = f64::INFINITY;
            let mut worst_eq: f64 = 0.0;
            for _ in 0..40 {
                let x: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..=2.0)).collect();
                let y: Vec<f64> = (0..d).map(|_| rng.random_range(-2.0..=2.0)).collect();
                let LegendreValue::Finite(ly) = legendre(&pot, &y)? else {
                    return Err(Error::numeric("Legendre transform of a Gaussian potential reported infinite"));
                };
                worst_gap = worst_gap.min(pot.value(&x) + ly - dot(&x, &y));
                // y = ∇ψ(x) = (x - c)/σ²
                let yx: Vec<f64> = x.iter().map(|v| (v - 0.2) / 1.69).collect();
                let LegendreValue::Finite(lx) = legendre(&pot, &yx)? else {
                    return Err(Error::numeric("Legendre transform of a Gaussian potential reported infinite"));
                };
                worst_eq = worst_eq.max((pot.value(&x) + lx - dot(&x, &yx)).abs());
            }
            let pass = worst_gap >= -1e-9 && worst_eq <= 1e-6;
            let slack = (worst_gap + 1e-9).min(1e-6 - worst_eq) / 1e-6;
            Ok((pass, slack, json!({"min_gap": worst_gap, "max_equality_err": worst_eq})))
        }));
        // supp L_s f_s ⊂ (1/s)·B for f = e^{-|x|}, whose L_∞ f is the indicator of B
        cases.push(case(format!("support_containment/d{d}"), move |seed| {
            let f = FunctionSpec::exp_neg_norm(d, 1.0)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = 0;
            for s in [4.0, 16.0, 64.0] {
                let fs = s_approx(&f, s)?;
                for _ in 0..25 {
                    let u = random_unit(d, &mut rng);
                    let r = rng.random_range(1.0 + 1e-6..2.0) / s;
                    let y: Vec<f64> = u.iter().map(|v| v * r).collect();
                    if s_polar(&fs, s, &y)? > 0.0 {
                        bad += 1;
                    }
                }
            }
            Ok((bad == 0, if bad == 0 { 1.0 } else { -(bad as f64) }, json!({"violations": bad})))
        }));
    }
    cases.push(case("mean_power_limit", |seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst_final: f64 = 0.0;
        let mut monotone = true;
        for _ in 0..50 {
            let a: f64 = rng.random_range(0.1..10.0);
            let b: f64 = rng.random_range(0.1..10.0);
            let l = rng.random_range(0.05..0.95);
            let d = rng.random_range(1..=3usize);
            let target: f64 = a.powf(l) * b.powf(1.0 - l);
            let mut prev = f64::INFINITY;
            for s in [4.0, 16.0, 64.0, 256.0, 4096.0] {
                let e = (mean_power(a, b, l, d, s) - target).abs() / target;
                monotone &= e <= prev + 1e-12;
                prev = e;
            }
            worst_final = worst_final.max(prev);
        }
        let (pass, slack) = within(worst_final, 1e-3);
        Ok((pass && monotone, slack, json!({"max_rel_err_at_4096": worst_final, "monotone": monotone})))
    }));
    Ok(cases)
}

// ---------------------------------------------------------------- alexandrov

/// Midpoint convexity of Φ, concavity of Φ^{-1/(d+s)} (finite s) or
/// convexity of log Φ_∞ on random interior triples.
pub fn midpoint_triples(spec: &FunctionSpec, s: Exponent, triples: usize, seed: u64) -> Result<(usize, f64)> {
    let phi = PhiFunction::new(spec, s, &IntegrationConfig::default())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = spec.dimension();
    let mut pts = Vec::new();
    while pts.len() < 2 * triples {
        let batch = interior_samples(spec, 2 * triples, 0.8, &mut rng);
        if batch.is_empty() {
            return Err(Error::numeric("no interior samples"));
        }
        pts.extend(batch.into_iter().filter(|p| phi.in_domain(p)));
    }
    let checks: Vec<(bool, f64)> = pts
        .par_chunks_exact(2)
        .take(triples)
        .map(|c| -> Result<(bool, f64)> {
            let m: Vec<f64> = c[0].iter().zip(&c[1]).map(|(a, b)| 0.5 * (a + b)).collect();
            let (a, b, v) = (phi.value(&c[0])?, phi.value(&c[1])?, phi.value(&m)?);
            Ok(match s {
                Exponent::Finite(s) => {
                    let scale = a.max(b);
                    let convex = v - 0.5 * (a + b);
                    let p = -1.0 / (d as f64 + s);
                    let (ga, gb, gv) = (a.powf(p), b.powf(p), v.powf(p));
                    let concave = 0.5 * (ga + gb) - gv;
                    let gscale = ga.max(gb);
                    let bad = convex > 1e-8 * scale || concave > 1e-8 * gscale;
                    (bad, (convex / scale).max(concave / gscale))
                }
                Exponent::Infinite => {
                    let (la, lb, lv) = (a.ln(), b.ln(), v.ln());
                    let scale = la.abs().max(lb.abs()).max(1.0);
                    let convex = lv - 0.5 * (la + lb);
                    (convex > 1e-8 * scale, convex / scale)
                }
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let bad = checks.iter().filter(|c| c.0).count();
    let worst = checks.iter().map(|c| c.1).fold(f64::NEG_INFINITY, f64::max);
    Ok((bad, worst))
}

fn hessian(f: &dyn Fn(&[f64]) -> Result<f64>, z: &[f64], h: f64) -> Result<Vec<Vec<f64>>> {
    let d = z.len();
    let mut m = vec![vec![0.0; d]; d];
    let f0 = f(z)?;
    let at = |i: usize, a: f64, j: usize, b: f64| {
        let mut p = z.to_vec();
        p[i] += a;
        p[j] += b;
        f(&p)
    };
    for i in 0..d {
        m[i][i] = (at(i, h, i, 0.0)? - 2.0 * f0 + at(i, -h, i, 0.0)?) / (h * h);
        for j in 0..i {
            let v = (at(i, h, j, h)? - at(i, h, j, -h)? - at(i, -h, j, h)? + at(i, -h, j, -h)?) / (4.0 * h * h);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    Ok(m)
}

fn eigen_range(m: &[Vec<f64>]) -> (f64, f64) {
    let d = m.len();
    let a = nalgebra::DMatrix::from_fn(d, d, |i, j| m[i][j]);
    let e = nalgebra::SymmetricEigen::new(a).eigenvalues;
    (e.min(), e.max())
}

/// Finite-difference Hessian signs: min eig of ∇²Φ >= -1e-6·scale and
/// max eig of ∇²Φ^{-1/(d+s)} <= 1e-6·scale, at `points` interior samples.
/// Returns (violations, worst normalized eigenvalue margin).
pub fn hessian_signs(spec: &FunctionSpec, s: f64, points: usize, seed: u64) -> Result<(usize, f64)> {
    let phi = PhiFunction::new(spec, Exponent::Finite(s), &IntegrationConfig::default())?;
    let d = spec.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts = interior_samples(spec, points, 0.7, &mut rng);
    let diam = spec.bounding_box(1e-6).diameter();
    let h = 1e-3 * diam;
    let p = -1.0 / (d as f64 + s);
    let mut bad = 0;
    let mut worst = f64::INFINITY;
    for z in pts {
        let v = phi.value(&z)?;
        let (lo, _) = eigen_range(&hessian(&|x| phi.value(x), &z, h)?);
        let scale = v / (diam * diam);
        let g = v.powf(p);
        let (_, hi) = eigen_range(&hessian(&|x| Ok(phi.value(x)?.powf(p)), &z, h)?);
        let gscale = g / (diam * diam);
        let m = (lo / scale + 1e-6).min(1e-6 - hi / gscale);
        if m < 0.0 {
            bad += 1;
        }
        worst = worst.min(m);
    }
    Ok((bad, worst))
}

fn alexandrov_cases() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for d in 1..=2 {
        for s in [0.5, 2.0] {
            for (name, spec) in suite_families(d, s)? {
                let sp = spec.clone();
                cases.push(case(format!("midpoint/{name}/d{d}/s{s}"), move |seed| {
                    let (bad, worst) = midpoint_triples(&sp, Exponent::Finite(s), 1000, seed)?;
                    Ok((bad == 0, -worst, json!({"triples": 1000, "violations": bad, "worst_relative_excess": worst})))
                }));
                cases.push(case(format!("hessian/{name}/d{d}/s{s}"), move |seed| {
                    let (bad, worst) = hessian_signs(&spec, s, 20, seed)?;
                    Ok((bad == 0, worst, json!({"points": 20, "violations": bad})))
                }));
            }
        }
        let logs = vec![
            ("gaussian", FunctionSpec::gaussian(vec![0.3; d], 1.0)?),
            ("exp_neg_norm", FunctionSpec::exp_neg_norm(d, 1.0)?),
            ("box", FunctionSpec::box_indicator(&vec![-1.0; d], &vec![1.5; d], Concavity::LogConcave)?),
        ];
        for (name, spec) in logs {
            cases.push(case(format!("midpoint_log/{name}/d{d}"), move |seed| {
                let (bad, worst) = midpoint_triples(&spec, Exponent::Infinite, 1000, seed)?;
                Ok((bad == 0, -worst, json!({"triples": 1000, "violations": bad, "worst_relative_excess": worst})))
            }));
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------- santalo

fn santalo_cases() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    let solver = SolverConfig::default();
    for d in 1..=2 {
        for s in [1.0, 2.0] {
            for (name, spec) in suite_families(d, s)? {
                cases.push(case(format!("barycenter/{name}/d{d}/s{s}"), move |seed| {
                    let r = santalo_point(&spec, Exponent::Finite(s), &solver)?;
                    let (pass, slack) = within(r.polar_barycenter_norm, 1e-4);
                    // global minimum against random interior points
                    let phi = PhiFunction::new(&spec, Exponent::Finite(s), &solver.integration)?;
                    let mut rng = ChaCha8Rng::seed_from_u64(seed);
                    let mut below = 0;
                    for z in interior_samples(&spec, 200, 0.9, &mut rng) {
                        if phi.value(&z)? < r.phi_min * (1.0 - 1e-12) {
                            below += 1;
                        }
                    }
                    Ok((pass && below == 0, slack, json!({"result": r, "lower_random_points": below})))
                }));
            }
            for (name, spec, center) in even_families(d, s)? {
                cases.push(case(format!("symmetry_center/{name}/d{d}/s{s}"), move |_| {
                    let r = santalo_point(&spec, Exponent::Finite(s), &SolverConfig { oracle_check: false, ..solver })?;
                    let err = dist(&r.z_star, &center);
                    let (pass, slack) = within(err, 1e-6);
                    Ok((pass, slack, json!({"z": r.z_star, "center": center, "err": err})))
                }));
            }
        }
        cases.push(case(format!("symmetry_center/gaussian_inf/d{d}"), move |_| {
            let g = FunctionSpec::gaussian(vec![0.4; d], 1.0)?;
            let r = santalo_point(&g, Exponent::Infinite, &SolverConfig { oracle_check: false, ..solver })?;
            let err = dist(&r.z_star, &vec![0.4; d]);
            let (pass, slack) = within(err, 1e-6);
            Ok((pass, slack, json!({"z": r.z_star, "err": err})))
        }));
        for (name, spec) in suite_families(d, 1.0)? {
            cases.push(case(format!("shift_equivariance/{name}/d{d}"), move |_| {
                let v = [0.37, -0.21][..d].to_vec();
                let e = shift_defect(&spec, Exponent::Finite(1.0), &v, &SolverConfig { oracle_check: false, ..solver })?;
                let (pass, slack) = within(e, 1e-6);
                Ok((pass, slack, json!({"defect": e})))
            }));
        }
    }
    for d in 1..=2 {
        for s in S_GRID {
            for (name, spec) in suite_families(d, s)? {
                for lambda in [0.25, 0.5, 0.75] {
                    let sp = spec.clone();
                    let hhat = name == "hhat";
                    cases.push(case(format!("lambda_santalo/{name}/d{d}/s{s}/l{lambda}"), move |seed| {
                        let cfg = IntegrationConfig::default();
                        let mut rng = ChaCha8Rng::seed_from_u64(seed);
                        let normal = random_unit(d, &mut rng);
                        let h = hyperplane_for_lambda(&sp, &normal, lambda, &cfg)?;
                        let r = verify_santalo(&sp, s, &h, &cfg)?;
                        let mut pass = r.pass;
                        let mut detail = serde_json::to_value(&r).unwrap_or_default();
                        if hhat && lambda == 0.5 {
                            let eq = (r.product / r.bound - 1.0).abs();
                            pass &= eq <= 1e-6;
                            detail["equality_err"] = json!(eq);
                        }
                        Ok((pass, r.slack / 1e-6 + 1.0, detail))
                    }));
                }
            }
        }
    }
    for s in S_GRID {
        cases.push(case(format!("onedim_lambda/s{s}"), move |seed| {
            let cfg = IntegrationConfig::default();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut worst = f64::INFINITY;
            let mut all = true;
            let mut rows = Vec::new();
            for _ in 0..8 {
                let v = rng.random_range(-0.8..0.8);
                let f = FunctionSpec::hhat(1, s)?.shifted(&[v])?;
                let r = onedim_lambda_check(&f, s, &cfg)?;
                all &= r.pass;
                worst = worst.min((r.bound - r.product) / r.bound);
                rows.push(json!({"shift": v, "lambda": r.lambda, "product": r.product, "bound": r.bound}));
            }
            Ok((all, worst / 1e-6 + 1.0, json!(rows)))
        }));
    }
    Ok(cases)
}

// ---------------------------------------------------------------- onedim

/// The admissible one-dimensional pairs used by the level-set checks.
pub fn onedim_pairs(s: f64) -> Vec<(HalfLineProfile, HalfLineProfile)> {
    let a = 1.7;
    vec![
        (HalfLineProfile::hhat(s), HalfLineProfile::hhat(s)),
        (HalfLineProfile::indicator(0.0, 1.0), HalfLineProfile::linear_power(s)),
        (
            HalfLineProfile::indicator(0.0, a),
            HalfLineProfile::custom("(1-1.7t)^s", move |t| (1.0 - a * t).max(0.0).powf(s), Some(1.0 / a)),
        ),
        (
            HalfLineProfile::custom("0.5 hhat", move |t| 0.5 * (1.0 - t * t).max(0.0).powf(s / 2.0), Some(1.0)),
            HalfLineProfile::hhat(s),
        ),
    ]
}

fn onedim_cases() -> Vec<Case> {
    let mut cases = Vec::new();
    for s in S_GRID {
        cases.push(case(format!("fubini/s{s}"), move |_| {
            let mut worst: f64 = 0.0;
            let mut rows = Vec::new();
            for p in [HalfLineProfile::indicator(0.0, 1.0), HalfLineProfile::hhat(s), HalfLineProfile::exp_decay(2.0)] {
                let lt = LevelTransform::new(p.clone(), s)?;
                let want = p.integral();
                let err = (lt.integral() - want).abs() / want;
                worst = worst.max(err);
                rows.push(json!({"profile": p.label(), "psi_integral": lt.integral(), "integral": want}));
            }
            let (pass, slack) = within(worst, 1e-6);
            Ok((pass, slack, json!({"max_rel_err": worst, "profiles": rows})))
        }));
        for (i, (p1, p2)) in onedim_pairs(s).into_iter().enumerate() {
            cases.push(case(format!("level_midpoint/pair{i}/s{s}"), move |seed| {
                let r = onedim_duality_check(&p1, &p2, s, 201, 10_000, seed)?;
                let pass = r.valid_pair && r.bound_holds && r.midpoint_violations == 0;
                let slack = (r.bound - r.product) / r.bound / 1e-6 + 1.0;
                Ok((pass, slack.min(r.worst_midpoint_ratio - 1.0 + 1e-9), serde_json::to_value(&r).unwrap_or_default()))
            }));
        }
    }
    cases
}

// ---------------------------------------------------------------- approx

/// 10 interior test points for the Theorem-3 study: inside |x| < 1.
pub fn approx_points(d: usize) -> Vec<Vec<f64>> {
    (0..10)
        .map(|k| {
            let r = 0.05 + 0.09 * k as f64;
            let a = 0.7 * k as f64;
            match d {
                1 => vec![if k % 2 == 0 { r } else { -r }],
                2 => vec![r * a.cos(), r * a.sin()],
                _ => vec![r * a.cos(), r * a.sin() * 0.6, r * a.sin() * 0.8],
            }
        })
        .collect()
}

pub const APPROX_SCHEDULE: [f64; 4] = [4.0, 16.0, 64.0, 256.0];

fn approx_cases() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    for d in 1..=2 {
        for (name, spec) in [
            ("gaussian", FunctionSpec::standard_gaussian(d)?),
            ("exp_neg_norm", FunctionSpec::exp_neg_norm(d, 1.0)?),
        ] {
            cases.push(case(format!("convergence/{name}/d{d}"), move |_| {
                let t = convergence_study(&spec, &approx_points(d), &APPROX_SCHEDULE, &IntegrationConfig::default())?;
                let last: Vec<_> = t.rows.iter().filter(|r| r.s == 256.0).collect();
                let gap = last.iter().map(|r| r.gap).fold(0.0, f64::max);
                let mahler = last.first().map(|r| (r.mahler_s / r.mahler_inf - 1.0).abs()).unwrap_or(f64::NAN);
                let mut pass = t.monotone && gap <= 0.01 && t.warnings.is_empty();
                let mut slack = (0.01 - gap) / 0.01;
                if name == "gaussian" {
                    let exact = (2.0 * std::f64::consts::PI).powi(d as i32);
                    let inf_err = (last[0].mahler_inf / exact - 1.0).abs();
                    pass &= mahler <= 0.02 && inf_err <= 1e-6;
                    slack = slack.min((0.02 - mahler) / 0.02);
                }
                Ok((pass, slack, json!({"monotone": t.monotone, "max_gap_256": gap, "mahler_rel_gap_256": mahler, "table": t})))
            }));
        }
    }
    Ok(cases)
}

// ---------------------------------------------------------------- regions

fn regions_cases() -> Result<Vec<Case>> {
    let mut cases = Vec::new();
    cases.push(case("interval_radius", |_| {
        let f = FunctionSpec::box_indicator(&[-1.0], &[1.0], Concavity::SConcave(1.0))?;
        let q = RegionQuery::new(&f, Exponent::Finite(1.0), 2.0, &IntegrationConfig::default())?;
        let b = q.boundary(2)?;
        let want = (1.0 - 4.0 / std::f64::consts::PI.powi(2)).sqrt();
        let err = b.radii.iter().map(|r| (r - want).abs()).fold(0.0, f64::max);
        let (pass, slack) = within(err, 1e-4);
        Ok((pass, slack, json!({"radii": b.radii, "expected": want})))
    }));
    for d in 1..=2 {
        for s in [1.0, 2.0] {
            for (name, spec) in suite_families(d, s)? {
                for t in [0.5, 1.0, 2.0] {
                    let sp = spec.clone();
                    cases.push(case(format!("properties/{name}/d{d}/s{s}/t{t}"), move |seed| {
                        let q = RegionQuery::new(&sp, Exponent::Finite(s), t, &IntegrationConfig::default())?;
                        let p = region_properties(&q, if d == 1 { 2 } else { 64 }, 250, seed)?;
                        // only t >= 1 => nonempty is a theorem; below 1 the outcome
                        // depends on the family's minimal product ratio
                        let mut pass = p.nonempty_ok && p.midpoint_failures == 0 && p.strict_ok;
                        if t < 1.0 {
                            pass &= (p.kind == RegionKind::Empty) == (p.min_ratio > t);
                        }
                        if t > 1.0 {
                            pass &= p.kind == RegionKind::Body && p.member_pairs >= 200;
                        }
                        let slack = p.strict_margin.unwrap_or(1.0);
                        Ok((pass, slack, serde_json::to_value(&p).unwrap_or_default()))
                    }));
                }
            }
        }
    }
    cases.push(case("box_convexity_500", |seed| {
        let f = FunctionSpec::box_indicator(&[-1.0, -1.0], &[1.0, 1.0], Concavity::SConcave(1.0))?;
        let q = RegionQuery::new(&f, Exponent::Finite(1.0), 2.0, &IntegrationConfig::default())?;
        let p = region_properties(&q, 64, 500, seed)?;
        let pass = p.member_pairs == 500 && p.midpoint_failures == 0 && p.strict_ok;
        Ok((pass, p.strict_margin.unwrap_or(-1.0), serde_json::to_value(&p).unwrap_or_default()))
    }));
    for d in 1..=2 {
        for t in [2.0, 1.0] {
            cases.push(case(format!("hausdorff_convergence/gaussian/d{d}/t{t}"), move |_| {
                let g = FunctionSpec::standard_gaussian(d)?;
                let rays = if d == 1 { 2 } else { 512 };
                let c = region_convergence(&g, t, &[8.0, 32.0, 128.0], rays, &IntegrationConfig::default())?;
                let dists: Vec<f64> = c.rows.iter().map(|r| r.hausdorff).collect();
                let strict = dists.windows(2).all(|w| w[1] < w[0]);
                let pass = c.monotone && strict && c.rows.len() == 3;
                let limit = json!({"kind": c.limit.kind, "radii_max": c.limit.radii.iter().cloned().fold(0.0, f64::max)});
                let slack = dists.windows(2).map(|w| (w[0] - w[1]) / w[0]).fold(f64::INFINITY, f64::min);
                Ok((pass, slack, json!({"distances": dists, "limit": limit, "warnings": c.warnings})))
            }));
        }
    }
    cases.push(case("shifted_gaussian_region", |_| {
        let cfg = IntegrationConfig::default();
        let v = [0.7, -0.4];
        let a = RegionQuery::new(&FunctionSpec::standard_gaussian(2)?, Exponent::Infinite, 2.0, &cfg)?.boundary(64)?;
        let b = RegionQuery::new(&FunctionSpec::gaussian(v.to_vec(), 1.0)?, Exponent::Infinite, 2.0, &cfg)?.boundary(64)?;
        let center_err = dist(&b.center, &[a.center[0] + v[0], a.center[1] + v[1]]);
        let radius_err = a.radii.iter().zip(&b.radii).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
        let err = center_err.max(radius_err);
        let (pass, slack) = within(err, 1e-5);
        Ok((pass, slack, json!({"center_err": center_err, "radius_err": radius_err})))
    }));
    for (name, spec) in suite_families(2, 2.0)? {
        let sp = spec.clone();
        cases.push(case(format!("horizontal_consistency/{name}"), move |seed| {
            let spec = &sp;
            let cfg = IntegrationConfig::default();
            let q = RegionQuery::new(&spec, Exponent::Finite(2.0), 1.3, &cfg)?;
            let formula = SphereFormula::new(&spec, 2.0, &SphereQuadrature::new(2, 2.0)?)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = 0;
            for z in interior_samples(&spec, 40, 0.6, &mut rng) {
                let a = q.membership(&z)?;
                let mut w = z.clone();
                w.push(0.0);
                let b = sp_membership_with(&formula, q.base_integral(), 1.3, &w)?;
                if a.member != b.member {
                    bad += 1;
                }
            }
            Ok((bad == 0, if bad == 0 { 1.0 } else { -(bad as f64) }, json!({"disagreements": bad})))
        }));
        cases.push(case(format!("monotone_in_t/{name}"), move |seed| {
            let cfg = IntegrationConfig::default();
            let small = RegionQuery::new(&spec, Exponent::Finite(2.0), 1.2, &cfg)?;
            let big = RegionQuery::new(&spec, Exponent::Finite(2.0), 1.8, &cfg)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut bad = 0;
            for z in interior_samples(&spec, 200, 0.9, &mut rng) {
                if small.membership(&z)?.member && !big.membership(&z)?.member {
                    bad += 1;
                }
            }
            Ok((bad == 0, if bad == 0 { 1.0 } else { -(bad as f64) }, json!({"violations": bad})))
        }));
    }
    cases.push(case("sp_hhat_equality", |_| {
        let cfg = IntegrationConfig::default();
        let f = FunctionSpec::hhat(2, 2.0)?;
        let formula = SphereFormula::new(&f, 2.0, &SphereQuadrature::new(2, 2.0)?)?;
        let base = integrate_grid(&f, &cfg)?.value;
        let m0 = sp_membership_with(&formula, base, 1.0, &[0.0, 0.0, 0.0])?;
        let eq = m0.product.map_or(f64::INFINITY, |p| (p / m0.threshold - 1.0).abs());
        let m1 = sp_membership_with(&formula, base, 1.05, &[0.0, 0.0, 0.05])?;
        let (ok, slack) = within(eq, 1e-6);
        Ok((ok && m0.member && m1.member, slack, json!({"equality_err": eq, "vertical_member": m1})))
    }));
    Ok(cases)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_suite_is_input_error() {
        assert!(run_suite("nope", 1).unwrap_err().is_input());
    }

    #[test]
    fn families_are_valid() {
        for d in 1..=3 {
            for s in S_GRID {
                for (name, f) in suite_families(d, s).unwrap() {
                    assert!(f.is_interior(&f.center_hint(), 1e-9), "{name} d{d} s{s}");
                }
            }
        }
    }

    #[test]
    fn jsonl_has_summary_line() {
        let r = run_cases("x", 3, vec![case("ok", |_| Ok((true, 1.0, json!({})))), case("bad", |_| Err(Error::numeric("boom")))]);
        assert_eq!((r.passed, r.failed), (1, 1));
        let text = r.to_jsonl();
        assert_eq!(text.lines().count(), 3);
        assert!(text.lines().last().unwrap().contains("\"summary\":true"));
    }
}

//! polarlab: evaluate polar transforms and polar integrals, find Santaló
//! points and regions, and run the verification suites.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use polarlab_core::polar_integrals::{
    integrate_grid, phi_log, phi_oracle, phi_sphere, Exponent, IntegrationConfig, SphereQuadrature,
};
use polarlab_core::regions::{region_convergence, sp_region_membership, RegionQuery};
use polarlab_core::santalo::{hyperplane_for_lambda, santalo_point, verify_santalo, Hyperplane, SolverConfig};
use polarlab_core::transforms::{convergence_study, log_polar, SPolarEvaluator};
use polarlab_core::verify::{approx_points, run_suite, APPROX_SCHEDULE};
use polarlab_core::{Error, FunctionSpec};

const DEFAULT_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "polarlab", version, about = "Polar duality of s-concave and log-concave functions")]
struct Cli {
    /// Worker threads (default: logical cores)
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Write the result here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate f at a point
    Eval {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        z: String,
    },
    /// L_s f(y) for finite s, L_∞ f(y) for s = inf
    Polar {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        s: String,
        /// The point y
        #[arg(long)]
        z: String,
        /// Also minimize over a dense grid with this many nodes per axis
        #[arg(long)]
        grid: Option<usize>,
    },
    /// ∫f
    Integrate {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Φ(z) = ∫ L_s(f(· + z))
    Phi {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        s: String,
        #[arg(long)]
        z: String,
        #[arg(long)]
        grid: Option<usize>,
        /// Cross-check the spherical formula with direct integration
        #[arg(long)]
        oracle: bool,
    },
    /// Santaló point, or the b± point on a hyperplane with the λ-inequality
    SantaloPoint {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        s: String,
        /// a1,...,ad,c for the hyperplane <a, x> = c
        #[arg(long, allow_hyphen_values = true)]
        hyperplane: Option<String>,
        /// Place the hyperplane (normal from --hyperplane, else e1) so that λ = this
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Santaló region boundary, or membership of --z (d+1 entries: the lifted region)
    Region {
        #[command(flatten)]
        spec: SpecArg,
        #[arg(long)]
        s: String,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        rays: Option<usize>,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// L_s f_s(x/s) → L_∞ f along s, or region convergence with --t
    Convergence {
        #[command(flatten)]
        spec: SpecArg,
        /// Test point (default: ten built-in points)
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        rays: Option<usize>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Run a verification suite and emit a JSONL report
    Verify {
        #[arg(long)]
        suite: String,
        /// Default 1, or POLARLAB_SEED when set
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Args, Debug)]
struct SpecArg {
    /// Function spec (JSON)
    #[arg(long = "spec")]
    path: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Core(Error),
    Input(String),
    Io(String),
    Verification(usize),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Core(e) if e.is_input() || matches!(e, Error::Domain(_)) => 2,
            Failure::Core(_) | Failure::Io(_) => 1,
            Failure::Input(_) => 2,
            Failure::Verification(_) => 3,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Failure::Core(Error::Schema(v)) => json!({"error": "schema", "violations": v}),
            Failure::Core(e) => json!({"error": kind(e), "message": e.to_string()}),
            Failure::Input(m) => json!({"error": "input", "message": m}),
            Failure::Io(m) => json!({"error": "io", "message": m}),
            Failure::Verification(n) => json!({"error": "verification", "failed_cases": n}),
        }
    }
}

fn kind(e: &Error) -> &'static str {
    match e {
        Error::Input(_) => "input",
        Error::Schema(_) => "schema",
        Error::Unsupported(_) => "unsupported",
        Error::Domain(_) => "domain",
        Error::Numeric(_) => "numeric",
    }
}

type Out = Result<String, Failure>;

fn load_spec(path: &Path) -> Result<FunctionSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("cannot read spec {}: {e}", path.display())))?;
    Ok(FunctionSpec::from_json_str(&text)?)
}

fn parse_vector(text: &str, what: &str) -> Result<Vec<f64>, Failure> {
    text.split(',')
        .map(|p| {
            let v: f64 = p.trim().parse().map_err(|_| Failure::Input(format!("cannot parse {what} entry {p:?}")))?;
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Failure::Input(format!("{what} entries must be finite")))
            }
        })
        .collect()
}

fn integration(grid: Option<usize>) -> Result<IntegrationConfig, Failure> {
    let cfg = grid.map(IntegrationConfig::with_resolution).unwrap_or_default();
    cfg.validate()?;
    Ok(cfg)
}

fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).unwrap_or_default();
    s.push('\n');
    s
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn csv_only_for_tables(format: Format, command: &str) -> Result<(), Failure> {
    if format == Format::Csv {
        return Err(Failure::Input(format!("--format csv is not available for {command}")));
    }
    Ok(())
}

fn seed_default() -> Result<u64, Failure> {
    match std::env::var("POLARLAB_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::Input(format!("POLARLAB_SEED is not an integer: {v:?}"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn run(cli: &Cli) -> Out {
    let format = cli.format;
    match &cli.command {
        Command::Eval { spec, z } => {
            csv_only_for_tables(format, "eval")?;
            let f = load_spec(&spec.path)?;
            let x = parse_vector(z, "z")?;
            let value = f.evaluate(&x)?;
            let support = f.classify_support(&x, polarlab_core::funcmodel::DEFAULT_SUPPORT_TOL)?;
            Ok(pretty(&json!({"x": x, "value": value, "support": support})))
        }
        Command::Polar { spec, s, z, grid } => {
            csv_only_for_tables(format, "polar")?;
            let f = load_spec(&spec.path)?;
            let y = parse_vector(z, "z")?;
            match Exponent::parse(s)? {
                Exponent::Finite(s) => {
                    let mut ev = SPolarEvaluator::new(f, s)?;
                    if let Some(n) = grid {
                        ev = ev.with_cross_check(*n);
                    }
                    let r = ev.evaluate(&y)?;
                    Ok(pretty(&json!({"s": s, "y": y, "value": r.value, "grid_value": r.grid_value, "consistent": r.consistent})))
                }
                Exponent::Infinite => Ok(pretty(&json!({"s": "inf", "y": y, "value": log_polar(&f, &y)?}))),
            }
        }
        Command::Integrate { spec, grid } => {
            csv_only_for_tables(format, "integrate")?;
            let f = load_spec(&spec.path)?;
            let e = integrate_grid(&f, &integration(*grid)?)?;
            Ok(pretty(&to_value(&e)))
        }
        Command::Phi { spec, s, z, grid, oracle } => {
            csv_only_for_tables(format, "phi")?;
            let f = load_spec(&spec.path)?;
            let z = parse_vector(z, "z")?;
            let cfg = integration(*grid)?;
            match Exponent::parse(s)? {
                Exponent::Finite(s) => {
                    let quad = SphereQuadrature::new(f.dimension(), s)?;
                    let r = phi_sphere(&f, s, &z, &quad)?;
                    let mut out = json!({"s": s, "z": z, "result": r});
                    if *oracle {
                        let o = phi_oracle(&f, s, &z, &cfg)?;
                        out["oracle"] = to_value(&o);
                        out["relative_difference"] = json!((r.value - o.value).abs() / o.value);
                    }
                    Ok(pretty(&out))
                }
                Exponent::Infinite => {
                    let r = phi_log(&f, &z, &cfg)?;
                    Ok(pretty(&json!({"s": "inf", "z": z, "result": r})))
                }
            }
        }
        Command::SantaloPoint { spec, s, hyperplane, lambda, grid } => {
            csv_only_for_tables(format, "santalo-point")?;
            let f = load_spec(&spec.path)?;
            let cfg = integration(*grid)?;
            let s = Exponent::parse(s)?;
            if hyperplane.is_none() && lambda.is_none() {
                let r = santalo_point(&f, s, &SolverConfig { integration: cfg, ..Default::default() })?;
                return Ok(pretty(&json!({"s": s, "result": r})));
            }
            let Exponent::Finite(sv) = s else {
                return Err(Failure::Input("the hyperplane construction needs a finite s".into()));
            };
            let mut h = match hyperplane {
                Some(text) => Hyperplane::parse(text)?,
                None => {
                    let mut a = vec![0.0; f.dimension()];
                    a[0] = 1.0;
                    Hyperplane::new(a, 0.0)?
                }
            };
            if let Some(l) = lambda {
                h = hyperplane_for_lambda(&f, h.normal(), *l, &cfg)?;
            }
            let r = verify_santalo(&f, sv, &h, &cfg)?;
            Ok(pretty(&json!({"hyperplane": {"normal": h.normal(), "offset": h.offset()}, "report": r})))
        }
        Command::Region { spec, s, t, rays, z, grid } => {
            let f = load_spec(&spec.path)?;
            let cfg = integration(*grid)?;
            let s = Exponent::parse(s)?;
            let d = f.dimension();
            if let Some(text) = z {
                csv_only_for_tables(format, "region membership")?;
                let p = parse_vector(text, "z")?;
                if p.len() == d + 1 {
                    let Exponent::Finite(sv) = s else {
                        return Err(Failure::Input("the lifted region needs a finite s".into()));
                    };
                    let m = sp_region_membership(&f, sv, *t, &p, &cfg)?;
                    return Ok(pretty(&json!({"w": p, "membership": m})));
                }
                let q = RegionQuery::new(&f, s, *t, &cfg)?;
                let m = q.membership(&p)?;
                return Ok(pretty(&json!({"z": p, "membership": m})));
            }
            let rays = rays.unwrap_or(if d == 1 { 2 } else { 64 });
            let q = RegionQuery::new(&f, s, *t, &cfg)?;
            let b = q.boundary(rays)?;
            match format {
                Format::Csv => Ok(b.to_csv()),
                Format::Json => {
                    let mut v = b.metadata();
                    v["rays"] = json!(b.rays);
                    v["radii"] = json!(b.radii);
                    v["tolerance"] = json!(b.tolerance);
                    v["truncated"] = json!(b.truncated);
                    Ok(pretty(&v))
                }
            }
        }
        Command::Convergence { spec, z, t, rays, grid } => {
            let f = load_spec(&spec.path)?;
            let cfg = integration(*grid)?;
            let d = f.dimension();
            if let Some(t) = t {
                let rays = rays.unwrap_or(if d == 1 { 2 } else { 512 });
                let c = region_convergence(&f, *t, &[8.0, 32.0, 128.0], rays, &cfg)?;
                return match format {
                    Format::Csv => {
                        let mut out = String::from("s,hausdorff\n");
                        for r in &c.rows {
                            out.push_str(&format!("{},{}\n", r.s, r.hausdorff));
                        }
                        Ok(out)
                    }
                    Format::Json => Ok(pretty(&json!({
                        "t": c.t, "rows": c.rows, "warnings": c.warnings, "monotone": c.monotone,
                    }))),
                };
            }
            let points = match z {
                Some(text) => vec![parse_vector(text, "z")?],
                None => approx_points(d),
            };
            let table = convergence_study(&f, &points, &APPROX_SCHEDULE, &cfg)?;
            match format {
                Format::Csv => Ok(table.to_csv()),
                Format::Json => Ok(pretty(&to_value(&table))),
            }
        }
        Command::Verify { suite, seed } => {
            let seed = match seed {
                Some(s) => *s,
                None => seed_default()?,
            };
            let r = run_suite(suite, seed)?;
            let text = r.to_jsonl();
            if r.all_passed() {
                Ok(text)
            } else {
                // report is still written before the failure exit
                emit(&cli.out, &text)?;
                Err(Failure::Verification(r.failed))
            }
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Io(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("{}", json!({"error": "input", "message": "--threads must be at least 1"}));
            return ExitCode::from(2);
        }
        if rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("{}", json!({"error": "io", "message": "cannot configure the thread pool"}));
            return ExitCode::from(1);
        }
    }
    match run(&cli).and_then(|text| emit(&cli.out, &text)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("{}", f.to_json());
            ExitCode::from(f.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Failure::Core(Error::Numeric("x".into())).exit_code(), 1);
        assert_eq!(Failure::Core(Error::Schema(vec![])).exit_code(), 2);
        assert_eq!(Failure::Core(Error::Domain("x".into())).exit_code(), 2);
        assert_eq!(Failure::Input("x".into()).exit_code(), 2);
        assert_eq!(Failure::Verification(3).exit_code(), 3);
    }

    #[test]
    fn vectors() {
        assert_eq!(parse_vector("1, -2.5,3", "z").unwrap(), vec![1.0, -2.5, 3.0]);
        assert!(parse_vector("1,x", "z").is_err());
        assert!(parse_vector("nan", "z").is_err());
    }

    #[test]
    fn cli_shape() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}

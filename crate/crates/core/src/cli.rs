//! Command-line front end: config loading, flag overrides, subcommand
//! dispatch and report emission.
//!
//! Reports are JSON objects carrying the resolved config and the library
//! version; tabular data goes to CSV files next to them when `--out` is set.
//! Exit codes: 0 success, 1 failed self-test or I/O error, 2 invalid input,
//! 3 budget exceeded.

use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::{self, ExperimentConfig, VERSION};
use crate::field::{make_context, FieldSpec, OrderElement};
use crate::geometry;
use crate::lattice;
use crate::local::{self, SeriesKind};
use crate::numeric;
use crate::primes::{self, Primality};

/// Field used when no `--config` is given.
pub const DEFAULT_FIELD: [i64; 4] = [-2, 0, 0, 1];
pub const DEFAULT_K: usize = 1;

#[derive(Debug, Parser)]
#[command(
    name = "normform",
    version,
    about = "Prime values of incomplete norm forms"
)]
pub struct Cli {
    /// JSON experiment config.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Directory for `<subcommand>.json` and CSV tables; JSON goes to stdout otherwise.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads (0 = rayon default).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Euler product cutoff.
    #[arg(long, global = true)]
    pub pcut: Option<u64>,
    /// Enumeration budget.
    #[arg(long, global = true)]
    pub budget: Option<u64>,
    /// Record wall-clock time in `runtime_s` (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Norm-form values and their primality over the box.
    Norms,
    /// Truncated singular series with per-prime factors.
    Sseries,
    /// Constraint lattices: wedge vectors, determinants, successive minima.
    Lattice {
        /// Check the determinant formula against Gram determinants and the
        /// independent kernel on a fixed set of fields.
        #[arg(long)]
        selftest: bool,
    },
    /// Mod-p wedge census and sampled skew census.
    Census,
    /// Type I discrepancy over dyadic blocks.
    Typei,
    /// Observed prime count against the predicted main term.
    Theorem,
    /// Polytope integral and product-of-primes densities.
    Integral,
    /// Buchstab identity on an integer range and on norm values.
    Buchstab,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Norms => "norms",
            Command::Sseries => "sseries",
            Command::Lattice { .. } => "lattice",
            Command::Census => "census",
            Command::Typei => "typei",
            Command::Theorem => "theorem",
            Command::Integral => "integral",
            Command::Buchstab => "buchstab",
        }
    }
}

/// A finished report: JSON summary, named CSV tables, and whether the
/// subcommand's own checks passed.
#[derive(Debug)]
pub struct Output {
    pub json: Value,
    pub tables: Vec<(String, String)>,
    pub ok: bool,
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("report serializes")
}

/// Loads the config and applies flag overrides.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| {
                Error::Invalid(format!("cannot read config {}: {e}", path.display()))
            })?;
            ExperimentConfig::from_json(&text)?
        }
        None => ExperimentConfig::for_field(&DEFAULT_FIELD, DEFAULT_K),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(t) = cli.threads {
        cfg.threads = t;
    }
    if let Some(p) = cli.pcut {
        cfg.pcut = p;
    }
    if let Some(b) = cli.budget {
        cfg.budget = b;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Runs one subcommand on a resolved config.
pub fn execute(cmd: Command, cfg: &ExperimentConfig) -> Result<Output> {
    let ctx = cfg.context()?;
    let mut out = match cmd {
        Command::Norms => norms(&ctx, cfg)?,
        Command::Sseries => sseries(&ctx, cfg)?,
        Command::Lattice { selftest: true } => lattice_selftest(&ctx, cfg)?,
        Command::Lattice { selftest: false } => lattice_report(&ctx, cfg)?,
        Command::Census => census(&ctx, cfg)?,
        Command::Typei => {
            let r = experiments::type_i_discrepancy(cfg)?;
            Output {
                json: to_value(&r),
                tables: vec![("typei".into(), r.to_csv())],
                ok: r.pass,
            }
        }
        Command::Theorem => {
            let r = experiments::theorem_check(cfg)?;
            Output {
                json: to_value(&r),
                tables: vec![("theorem_slabs".into(), r.slabs_csv())],
                ok: true,
            }
        }
        Command::Integral => integral(&ctx, cfg)?,
        Command::Buchstab => buchstab(&ctx, cfg)?,
    };
    if let Value::Object(m) = &mut out.json {
        m.insert("subcommand".into(), json!(cmd.name()));
        m.insert("config".into(), cfg.to_json());
        m.insert("version".into(), json!(VERSION));
        m.insert("runtime_s".into(), json!(0.0));
    }
    Ok(out)
}

fn norms(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let bounds = cfg.box_bounds(ctx);
    let total: u128 = bounds
        .iter()
        .map(|[lo, hi]| (hi - lo + 1).max(0) as u128)
        .product();
    if total > cfg.budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{total} box points exceed budget {}",
            cfg.budget
        )));
    }
    let np = ctx.norm_poly()?;
    let m = bounds.len();
    let mut csv: String = (0..m).map(|i| format!("x{i},")).collect();
    csv.push_str("norm,prime\n");
    let (mut pos, mut neg, mut prob) = (0u64, 0u64, false);
    let mut x: Vec<i64> = bounds.iter().map(|b| b[0]).collect();
    if total > 0 {
        'outer: loop {
            let v = np.eval(&x);
            let prime = match v.magnitude().to_u128().map(primes::primality_u128) {
                Some(Primality::Prime) => true,
                Some(Primality::ProbablePrime) => {
                    prob = true;
                    true
                }
                _ => false,
            };
            if prime {
                if v > BigInt::zero() {
                    pos += 1;
                } else {
                    neg += 1;
                }
            }
            for xi in &x {
                csv.push_str(&format!("{xi},"));
            }
            csv.push_str(&format!("{v},{}\n", u8::from(prime)));
            let mut i = m;
            loop {
                if i == 0 {
                    break 'outer;
                }
                i -= 1;
                if x[i] < bounds[i][1] {
                    x[i] += 1;
                    break;
                }
                x[i] = bounds[i][0];
            }
        }
    }
    let json = json!({
        "points": total as u64,
        "positive_primes": pos,
        "negative_primes": neg,
        "probabilistic_primality": prob,
        "box": bounds,
    });
    Ok(Output {
        json,
        tables: vec![("norms".into(), csv)],
        ok: true,
    })
}

fn sseries(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let s = local::series(ctx, cfg.pcut, SeriesKind::Plain, true)?;
    let tilde = local::singular_series_tilde(ctx, cfg.pcut)?;
    let mut csv = String::from("p,degree_pattern,nu_p,nu,factor,running_product\n");
    for r in &s.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.p, r.degree_pattern, r.nu_p, r.nu, r.factor, r.running_product
        ));
    }
    let json = json!({
        "value": s.value,
        "cutoff": s.cutoff,
        "tail_bound": s.tail_bound,
        "tail_certified": s.tail_certified,
        "tilde": to_value(&tilde),
    });
    Ok(Output {
        json,
        tables: vec![("sseries".into(), csv)],
        ok: true,
    })
}

#[derive(Debug, Serialize)]
struct VectorReport {
    v: Vec<i64>,
    wedge_content: String,
    wedge_norm_sq: String,
    det_sq_formula: String,
    gram_det: String,
    agree: bool,
    /// Squared successive minima of the constraint lattice.
    minima_sq: Vec<String>,
}

fn random_vectors(n: usize, count: usize, seed: u64) -> Vec<Vec<i64>> {
    let mut rng = numeric::stream_rng(seed, 1);
    (0..count)
        .map(|_| loop {
            let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-10..=10)).collect();
            if v.iter().any(|&x| x != 0) {
                break v;
            }
        })
        .collect()
}

fn lattice_report(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let vs = if cfg.lattice.vectors.is_empty() {
        random_vectors(ctx.n(), cfg.lattice.samples, cfg.seed)
    } else {
        cfg.lattice.vectors.clone()
    };
    let mut rows = Vec::with_capacity(vs.len());
    for v in vs {
        if v.len() != ctx.n() {
            return Err(Error::DimensionMismatch {
                expected: ctx.n(),
                got: v.len(),
            });
        }
        let e = OrderElement::from_i64(&v);
        let w = lattice::wedge(ctx, &e)?;
        let l = lattice::lambda_v(ctx, &e)?;
        let formula = lattice::det_squared_formula(&w)?;
        let gram = lattice::gram_det(&l);
        let (mins, _) = lattice::successive_minima(&l)?;
        rows.push(VectorReport {
            v,
            wedge_content: w.content().to_string(),
            wedge_norm_sq: w.norm_sq().to_string(),
            det_sq_formula: formula.to_string(),
            gram_det: gram.to_string(),
            agree: formula == gram.clone().into(),
            minima_sq: mins.iter().map(BigInt::to_string).collect(),
        });
    }
    let mut csv =
        String::from("v,wedge_content,wedge_norm_sq,det_sq_formula,gram_det,agree,minima_sq\n");
    for r in &rows {
        let v: Vec<String> = r.v.iter().map(i64::to_string).collect();
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            v.join(";"),
            r.wedge_content,
            r.wedge_norm_sq,
            r.det_sq_formula,
            r.gram_det,
            r.agree,
            r.minima_sq.join(";")
        ));
    }
    let ok = rows.iter().all(|r| r.agree);
    Ok(Output {
        json: json!({ "vectors": to_value(&rows), "all_agree": ok }),
        tables: vec![("lattice".into(), csv)],
        ok,
    })
}

/// Fields of the self-test: pure `X^n - 2` and non-pure `X^n + 2X + 2`
/// (both Eisenstein at 2) for `n = 4..8`.
pub fn selftest_fields() -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for n in 4..=8 {
        let mut pure = vec![0i64; n + 1];
        pure[0] = -2;
        pure[n] = 1;
        let mut mixed = vec![0i64; n + 1];
        mixed[0] = 2;
        mixed[1] = 2;
        mixed[n] = 1;
        out.push(pure);
        out.push(mixed);
    }
    out
}

fn lattice_selftest(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let mut cases: Vec<(Vec<i64>, usize)> = selftest_fields()
        .into_iter()
        .flat_map(|f| [(f.clone(), 1), (f, 2)])
        .collect();
    cases.push((ctx.coeffs().to_vec(), ctx.k()));
    let mut rows = Vec::new();
    let mut csv = String::from(
        "f,k,singles,singles_agree,oracle_agree,pairs,pairs_agree,degenerate_pairs,pass\n",
    );
    let mut ok = true;
    for (i, (f, k)) in cases.iter().enumerate() {
        let c = make_context(f, *k)?;
        let r =
            lattice::formula_check(&c, cfg.lattice.samples, 10, cfg.seed.wrapping_add(i as u64))?;
        let pass = r.passed();
        ok &= pass;
        log::info!("selftest f = {f:?}, k = {k}: {r:?}");
        let fs: Vec<String> = f.iter().map(i64::to_string).collect();
        csv.push_str(&format!(
            "{},{k},{},{},{},{},{},{},{pass}\n",
            fs.join(";"),
            r.singles,
            r.singles_agree,
            r.oracle_agree,
            r.pairs,
            r.pairs_agree,
            r.degenerate_pairs
        ));
        rows.push(json!({ "f": f, "k": k, "check": to_value(&r), "pass": pass }));
    }
    Ok(Output {
        json: json!({ "selftest": rows, "pass": ok }),
        tables: vec![("lattice_selftest".into(), csv)],
        ok,
    })
}

fn census(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let c = &cfg.census;
    let wedge = geometry::wedge_census(ctx, &c.primes, cfg.budget)?;
    let skew = geometry::skew_census(ctx, c.a, c.b, c.samples, &c.kappas, cfg.seed)?;
    Ok(Output {
        json: json!({ "wedge": to_value(&wedge), "skew": to_value(&skew) }),
        tables: vec![
            ("census_wedge".into(), wedge.to_csv()),
            ("census_skew".into(), skew.to_csv()),
        ],
        ok: true,
    })
}

fn integral(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let ic = &cfg.integral;
    ic.polytope.validate(cfg.epsilon, 1.0)?;
    let value = experiments::polytope_integral(&ic.polytope, ic.target)?;
    let t = &cfg.typeii;
    let field = t.ideals.then_some(ctx);
    let reports = t
        .polytopes
        .iter()
        .map(|p| experiments::type_ii_density_check(p, t.x, t.eta, field, cfg.budget))
        .collect::<Result<Vec<_>>>()?;
    let mut csv = String::from("polytope,observed,predicted,ratio,ideal_observed,ideal_ratio\n");
    for r in &reports {
        let iv: Vec<String> = r
            .polytope
            .intervals
            .iter()
            .map(|[a, b]| format!("{a}:{b}"))
            .collect();
        let opt = |o: Option<String>| o.unwrap_or_default();
        csv.push_str(&format!(
            "{},{},{},{},{},{}\n",
            iv.join(";"),
            r.observed,
            r.predicted,
            r.ratio,
            opt(r.ideal_observed.map(|x| x.to_string())),
            opt(r.ideal_ratio.map(|x| x.to_string()))
        ));
    }
    let json = json!({
        "polytope": to_value(&ic.polytope),
        "target": ic.target,
        "value": value,
        "typeii": to_value(&reports),
    });
    Ok(Output {
        json,
        tables: vec![("integral_typeii".into(), csv)],
        ok: true,
    })
}

fn buchstab(ctx: &FieldSpec, cfg: &ExperimentConfig) -> Result<Output> {
    let b = &cfg.buchstab;
    if b.range[0] == 0 || b.range[0] > b.range[1] {
        return Err(Error::Invalid(
            "buchstab range must satisfy 1 <= lo <= hi".into(),
        ));
    }
    if b.norm_side < 1 {
        return Err(Error::Invalid("norm_side must be at least 1".into()));
    }
    let side = b.norm_side as u128;
    if side
        .checked_pow(ctx.free_dim() as u32)
        .is_none_or(|t| t > cfg.budget as u128)
    {
        return Err(Error::BudgetExceeded(format!(
            "norm box side {side} in dimension {} exceeds budget",
            ctx.free_dim()
        )));
    }
    let range: Vec<u128> = (b.range[0]..=b.range[1]).map(u128::from).collect();
    let norms = local::norm_values(ctx, 1, b.norm_side)?;
    let mut csv = String::from("set,size,z1,z2,lhs,rhs,residual\n");
    let mut results = Vec::new();
    for (name, set) in [("range", &range), ("norms", &norms)] {
        let r = local::buchstab_check(set, b.z1, b.z2)?;
        csv.push_str(&format!(
            "{name},{},{},{},{},{},{}\n",
            r.size, r.z1, r.z2, r.lhs, r.rhs, r.residual
        ));
        results.push(json!({ "set": name, "result": to_value(&r) }));
    }
    let ok = csv.lines().skip(1).all(|l| l.ends_with(",0"));
    Ok(Output {
        json: json!({ "sets": results, "all_zero": ok }),
        tables: vec![("buchstab".into(), csv)],
        ok,
    })
}

fn write_output(dir: &Path, name: &str, out: &Output) -> Result<()> {
    let io = |e: std::io::Error| Error::Io(format!("{}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join(format!("{name}.json")), render(&out.json)).map_err(io)?;
    for (t, csv) in &out.tables {
        std::fs::write(dir.join(format!("{t}.csv")), csv).map_err(io)?;
    }
    Ok(())
}

fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json renders");
    s.push('\n');
    s
}

fn run_parsed(cli: &Cli) -> Result<bool> {
    let cfg = resolve_config(cli)?;
    let start = Instant::now();
    let go = || execute(cli.command, &cfg);
    let mut out = if cfg.threads > 0 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
        pool.install(go)?
    } else {
        go()?
    };
    if cli.timing {
        if let Value::Object(m) = &mut out.json {
            m.insert("runtime_s".into(), json!(start.elapsed().as_secs_f64()));
        }
    }
    match &cli.out {
        Some(dir) => write_output(dir, cli.command.name(), &out)?,
        None => print!("{}", render(&out.json)),
    }
    Ok(out.ok)
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run_parsed(&cli) {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("normform {}: checks failed", cli.command.name());
            1
        }
        Err(e) => {
            eprintln!("normform {}: {e}", cli.command.name());
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("normform").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn flags_override_defaults() {
        let cli = parse(&["theorem", "--seed", "7", "--pcut", "500", "--budget", "99"]);
        let cfg = resolve_config(&cli).unwrap();
        assert_eq!((cfg.seed, cfg.pcut, cfg.budget), (7, 500, 99));
        assert_eq!(cfg.f, DEFAULT_FIELD.to_vec());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(run(["normform", "--help"]), 0);
        assert_eq!(run(["normform", "bogus"]), 2);
        assert_eq!(
            run(["normform", "theorem", "--config", "/nonexistent/cfg.json"]),
            2
        );
        assert_eq!(run(["normform", "norms", "--budget", "10"]), 3);
        assert_eq!(run(["normform", "sseries", "--pcut", "5"]), 2);
    }

    #[test]
    fn report_embeds_config_and_version() {
        let mut cfg = ExperimentConfig::for_field(&DEFAULT_FIELD, DEFAULT_K);
        cfg.x = 6;
        let out = execute(Command::Norms, &cfg).unwrap();
        assert_eq!(out.json["version"], json!(VERSION));
        assert_eq!(out.json["config"]["x"], json!(6));
        assert_eq!(out.json["points"], json!(36));
        // x^3 + 2 y^3 at (1, 1) is 3
        assert!(out.tables[0]
            .1
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("1,1,3,1"));
    }

    #[test]
    fn buchstab_residuals_vanish() {
        let cfg = ExperimentConfig::for_field(&DEFAULT_FIELD, DEFAULT_K);
        let out = execute(Command::Buchstab, &cfg).unwrap();
        assert!(out.ok, "{}", out.json);
    }
}

//! Desk-scale experiments: prime counts of the incomplete norm form against
//! the singular-series prediction, Type I discrepancies at degree-one primes,
//! polytope integrals and their product-of-primes densities, and divisor sums.
//!
//! Every Monte Carlo step draws from per-stratum streams derived from the
//! configured seed and every parallel reduction is an ordered or integer sum,
//! so results do not depend on the thread count.

use num_traits::ToPrimitive;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{make_context, FieldSpec};
use crate::local::{self, SingularSeries};
use crate::numeric::{self, Acc};
use crate::polymodp;
use crate::primes::{self, Primality};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

fn d_x() -> i64 {
    80
}
fn d_eta() -> f64 {
    0.5
}
fn d_pcut() -> u64 {
    10_000
}
fn d_samples() -> u64 {
    1 << 18
}
fn d_budget() -> u64 {
    100_000_000
}
fn d_c0() -> f64 {
    0.5
}
fn d_eps() -> f64 {
    0.05
}

/// Dyadic blocks for the Type I experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TypeIConfig {
    pub blocks: Vec<u64>,
}

impl Default for TypeIConfig {
    fn default() -> Self {
        TypeIConfig {
            blocks: vec![16, 32, 64, 128],
        }
    }
}

/// Exponent intervals `e_i in [lo_i, hi_i]` for `l` prime factors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolytopeSpec {
    pub intervals: Vec<[f64; 2]>,
    /// Number of leading coordinates forming the first factor, if split.
    #[serde(default)]
    pub split: Option<usize>,
}

impl PolytopeSpec {
    pub fn new(intervals: &[[f64; 2]]) -> Self {
        PolytopeSpec {
            intervals: intervals.to_vec(),
            split: None,
        }
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Intervals must be nonempty, lie in `[floor, top]` and number at most 6.
    pub fn validate(&self, floor: f64, top: f64) -> Result<()> {
        if self.intervals.is_empty() || self.intervals.len() > 6 {
            return Err(Error::Invalid(format!(
                "polytope needs 1..=6 intervals, got {}",
                self.intervals.len()
            )));
        }
        for &[lo, hi] in &self.intervals {
            if !(lo > 0.0 && lo >= floor && lo <= hi && hi <= top) {
                return Err(Error::Invalid(format!(
                    "interval [{lo}, {hi}] not within [{floor}, {top}]"
                )));
            }
        }
        if let Some(s) = self.split {
            if s == 0 || s >= self.intervals.len() {
                return Err(Error::Invalid(format!("split index {s} out of range")));
            }
        }
        Ok(())
    }

    fn contains(&self, e: &[f64]) -> bool {
        e.iter()
            .zip(&self.intervals)
            .all(|(x, [lo, hi])| *x >= *lo && *x <= *hi)
    }
}

impl Default for PolytopeSpec {
    fn default() -> Self {
        PolytopeSpec::new(&[[0.4, 0.5], [0.05, 1.0]])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IntegralConfig {
    pub polytope: PolytopeSpec,
    pub target: f64,
}

impl Default for IntegralConfig {
    fn default() -> Self {
        IntegralConfig {
            polytope: PolytopeSpec::default(),
            target: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TypeIIConfig {
    pub x: u64,
    pub eta: f64,
    pub polytopes: Vec<PolytopeSpec>,
    /// Also count tuples of prime ideals of the field.
    pub ideals: bool,
}

impl Default for TypeIIConfig {
    fn default() -> Self {
        TypeIIConfig {
            x: 1_000_000,
            eta: 0.5,
            polytopes: vec![
                PolytopeSpec::default(),
                PolytopeSpec::new(&[[0.3, 0.4], [0.05, 1.0]]),
            ],
            ideals: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CensusConfig {
    pub primes: Vec<u64>,
    pub kappas: Vec<f64>,
    pub a: u64,
    pub b: i64,
    pub samples: u64,
}

impl Default for CensusConfig {
    fn default() -> Self {
        CensusConfig {
            primes: vec![3, 5, 7],
            kappas: vec![
                0.0,
                2f64.powi(-10),
                2f64.powi(-6),
                2f64.powi(-2),
                1.0,
                4.0,
                16.0,
            ],
            a: 1,
            b: 20,
            samples: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BuchstabConfig {
    /// Integer range `[lo, hi]` used as the first sifted set.
    pub range: [u64; 2],
    /// Side of the box `[1, side]^(n-k)` whose norm values form the second set.
    pub norm_side: i64,
    pub z1: u64,
    pub z2: u64,
}

impl Default for BuchstabConfig {
    fn default() -> Self {
        BuchstabConfig {
            range: [100, 200],
            norm_side: 12,
            z1: 10,
            z2: 100,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DivisorConfig {
    pub xs: Vec<i64>,
    pub e: u32,
}

impl Default for DivisorConfig {
    fn default() -> Self {
        DivisorConfig {
            xs: vec![1 << 6, 1 << 8, 1 << 10],
            e: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeConfig {
    /// Random vectors per field for the determinant-formula self-test.
    pub samples: usize,
    /// Vectors to report on (full coordinates); random ones if empty.
    pub vectors: Vec<Vec<i64>>,
}

impl Default for LatticeConfig {
    fn default() -> Self {
        LatticeConfig {
            samples: 50,
            vectors: Vec::new(),
        }
    }
}

/// Resolved configuration for every experiment and CLI subcommand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Coefficients of the monic defining polynomial, constant term first.
    pub f: Vec<i64>,
    pub k: usize,
    #[serde(default = "d_x")]
    pub x: i64,
    /// Box over the `n - k` free coordinates; `[1, x]^(n-k)` if absent.
    #[serde(default, rename = "box")]
    pub bbox: Option<Vec<[i64; 2]>>,
    #[serde(default = "d_eta")]
    pub eta1: f64,
    #[serde(default = "d_eta")]
    pub eta2: f64,
    #[serde(default = "d_pcut")]
    pub pcut: u64,
    #[serde(default)]
    pub seed: u64,
    /// Worker threads; 0 uses the default pool.
    #[serde(default)]
    pub threads: usize,
    #[serde(default = "d_samples")]
    pub samples: u64,
    #[serde(default = "d_budget")]
    pub budget: u64,
    /// Lower-bound constant asserted in the `22k/7 <= n < 4k` regime.
    #[serde(default = "d_c0")]
    pub c0: f64,
    /// Floor for polytope exponents.
    #[serde(default = "d_eps")]
    pub epsilon: f64,
    #[serde(default)]
    pub typei: TypeIConfig,
    #[serde(default)]
    pub integral: IntegralConfig,
    #[serde(default)]
    pub typeii: TypeIIConfig,
    #[serde(default)]
    pub census: CensusConfig,
    #[serde(default)]
    pub buchstab: BuchstabConfig,
    #[serde(default)]
    pub divisor: DivisorConfig,
    #[serde(default)]
    pub lattice: LatticeConfig,
}

impl ExperimentConfig {
    /// Defaults for a field.
    pub fn for_field(f: &[i64], k: usize) -> Self {
        let s = serde_json::json!({ "f": f, "k": k });
        serde_json::from_value(s).expect("defaults deserialize")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let c: ExperimentConfig =
            serde_json::from_str(s).map_err(|e| Error::Invalid(format!("config: {e}")))?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let ctx = self.context()?;
        if self.x < 2 {
            return Err(Error::Invalid("x must be at least 2".into()));
        }
        for eta in [self.eta1, self.eta2, self.typeii.eta] {
            if !(eta > 0.0 && eta < 1.0) {
                return Err(Error::Invalid(format!("eta = {eta} must lie in (0, 1)")));
            }
        }
        if let Some(b) = &self.bbox {
            if b.len() != ctx.free_dim() {
                return Err(Error::DimensionMismatch {
                    expected: ctx.free_dim(),
                    got: b.len(),
                });
            }
            if b.iter().any(|[lo, hi]| lo > hi) {
                return Err(Error::Invalid("box has lo > hi".into()));
            }
        }
        if self.pcut < 100 {
            return Err(Error::Invalid("pcut must be at least 100".into()));
        }
        Ok(())
    }

    pub fn context(&self) -> Result<FieldSpec> {
        make_context(&self.f, self.k)
    }

    /// The counting box over the free coordinates.
    pub fn box_bounds(&self, ctx: &FieldSpec) -> Vec<[i64; 2]> {
        self.bbox
            .clone()
            .unwrap_or_else(|| vec![[1, self.x]; ctx.free_dim()])
    }
}

/// Real evaluation of the norm form.
struct RealNorm {
    terms: Vec<(Vec<u8>, f64)>,
}

impl RealNorm {
    fn new(ctx: &FieldSpec) -> Result<Self> {
        let np = ctx.norm_poly()?;
        Ok(RealNorm {
            terms: np
                .terms()
                .iter()
                .map(|(e, c)| (e.clone(), *c as f64))
                .collect(),
        })
    }

    fn eval(&self, t: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                c * e
                    .iter()
                    .zip(t)
                    .map(|(&k, x)| x.powi(k as i32))
                    .product::<f64>()
            })
            .sum()
    }
}

/// Integral of `g` over a box: nested adaptive Gauss-Kronrod in dimension
/// <= 2, stratified Monte Carlo above.
pub fn box_integral<G: Fn(&[f64]) -> f64 + Sync>(
    g: &G,
    lo: &[f64],
    hi: &[f64],
    samples: u64,
    seed: u64,
) -> (f64, f64) {
    let d = lo.len();
    if d == 0 {
        return (g(&[]), 0.0);
    }
    if lo.iter().zip(hi).any(|(a, b)| b <= a) {
        return (0.0, 0.0);
    }
    if d <= 2 {
        let vol: f64 = lo.iter().zip(hi).map(|(a, b)| b - a).product();
        if d == 1 {
            return numeric::adaptive(&|x: f64| g(&[x]), lo[0], hi[0], 1e-10 * vol);
        }
        let inner_tol = 1e-11 * (hi[1] - lo[1]);
        let inner = |x: f64| numeric::adaptive(&|y: f64| g(&[x, y]), lo[1], hi[1], inner_tol);
        let (v, e) = numeric::adaptive(&|x: f64| inner(x).0, lo[0], hi[0], 1e-10 * vol);
        return (v, e + inner_tol * (hi[0] - lo[0]));
    }
    const STRATA: u64 = 64;
    let per = (samples / STRATA).max(2);
    let width = (hi[0] - lo[0]) / STRATA as f64;
    let cell: f64 = width * (1..d).map(|i| hi[i] - lo[i]).product::<f64>();
    let parts: Vec<(f64, f64)> = (0..STRATA)
        .into_par_iter()
        .map(|s| {
            let mut rng = numeric::stream_rng(seed, s);
            let mut t = vec![0.0; d];
            let (mut sum, mut sq) = (Acc::default(), Acc::default());
            for _ in 0..per {
                t[0] = lo[0] + width * (s as f64 + rng.gen::<f64>());
                for i in 1..d {
                    t[i] = lo[i] + (hi[i] - lo[i]) * rng.gen::<f64>();
                }
                let v = g(&t);
                sum.add(v);
                sq.add(v * v);
            }
            let mean = sum.value() / per as f64;
            let var = (sq.value() / per as f64 - mean * mean).max(0.0);
            (cell * mean, cell * cell * var / per as f64)
        })
        .collect();
    let mut total = Acc::default();
    let mut var = 0.0;
    for (v, e) in parts {
        total.add(v);
        var += e;
    }
    (total.value(), var.sqrt())
}

/// Integral of `1_{N >= 2} / log N` and of `1_{N <= -2} / log |N|` over the
/// box extended by 1/2 on each side (the continuous analogue of counting
/// integer points).
fn log_integrals(
    ctx: &FieldSpec,
    bounds: &[[i64; 2]],
    samples: u64,
    seed: u64,
) -> Result<((f64, f64), (f64, f64))> {
    let norm = RealNorm::new(ctx)?;
    let lo: Vec<f64> = bounds.iter().map(|b| b[0] as f64 - 0.5).collect();
    let hi: Vec<f64> = bounds.iter().map(|b| b[1] as f64 + 0.5).collect();
    let pos = |t: &[f64]| {
        let v = norm.eval(t);
        if v >= 2.0 {
            1.0 / v.ln()
        } else {
            0.0
        }
    };
    let neg = |t: &[f64]| {
        let v = norm.eval(t);
        if v <= -2.0 {
            1.0 / (-v).ln()
        } else {
            0.0
        }
    };
    Ok((
        box_integral(&pos, &lo, &hi, samples, seed),
        box_integral(&neg, &lo, &hi, samples, seed ^ 0x5eed),
    ))
}

/// `S * integral`, with the error bar combining quadrature error and the
/// relative tail bound of the series.
#[derive(Debug, Clone, Serialize)]
pub struct MainTerm {
    pub value: f64,
    pub err: f64,
    pub integral: f64,
    pub integral_err: f64,
    pub negative_value: f64,
    pub sseries: SingularSeries,
}

pub fn predicted_main_term(cfg: &ExperimentConfig) -> Result<MainTerm> {
    let ctx = cfg.context()?;
    let bounds = cfg.box_bounds(&ctx);
    let s = local::singular_series(&ctx, cfg.pcut)?;
    let ((int, int_err), (neg, _)) = log_integrals(&ctx, &bounds, cfg.samples, cfg.seed)?;
    let value = s.value * int;
    let tail = if s.tail_bound.is_finite() {
        s.tail_bound
    } else {
        0.0
    };
    let err = s.value * int_err + value * tail;
    Ok(MainTerm {
        value,
        err,
        integral: int,
        integral_err: int_err,
        negative_value: s.value * neg,
        sseries: s,
    })
}

/// Prime counts on one slab of the first coordinate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlabCount {
    pub lo: i64,
    pub hi: i64,
    pub points: u64,
    pub positive_primes: u64,
    pub negative_primes: u64,
}

/// Exact prime counts of the norm form on the configured box.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrimeCount {
    /// Points with `N(a)` a positive prime.
    pub positive: u64,
    /// Points with `-N(a)` a positive prime.
    pub negative: u64,
    pub points: u64,
    /// Some value exceeded the deterministic primality range.
    pub probabilistic: bool,
    pub slabs: Vec<SlabCount>,
}

const SLABS: i64 = 32;

fn is_prime_checked(v: i128, prob: &mut bool) -> bool {
    let a = v.unsigned_abs();
    match primes::primality_u128(a) {
        Primality::Prime => true,
        Primality::ProbablePrime => {
            *prob = true;
            true
        }
        Primality::Composite => false,
    }
}

pub fn observed_prime_count(cfg: &ExperimentConfig) -> Result<PrimeCount> {
    let ctx = cfg.context()?;
    let bounds = cfg.box_bounds(&ctx);
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
    if total == 0 {
        return Ok(PrimeCount {
            positive: 0,
            negative: 0,
            points: 0,
            probabilistic: false,
            slabs: Vec::new(),
        });
    }
    let [lo0, hi0] = bounds[0];
    let side = hi0 - lo0 + 1;
    let nslab = side.min(SLABS);
    let slabs: Vec<(SlabCount, bool)> = (0..nslab)
        .into_par_iter()
        .map(|s| {
            let a = lo0 + side * s / nslab;
            let b = lo0 + side * (s + 1) / nslab - 1;
            let mut x: Vec<i64> = bounds.iter().map(|bd| bd[0]).collect();
            x[0] = a;
            let mut c = SlabCount {
                lo: a,
                hi: b,
                points: 0,
                positive_primes: 0,
                negative_primes: 0,
            };
            let mut prob = false;
            loop {
                c.points += 1;
                let v = np
                    .eval(&x)
                    .to_i128()
                    .expect("norm values fit in 128 bits at desk scale");
                if v.unsigned_abs() >= 2 && is_prime_checked(v, &mut prob) {
                    if v > 0 {
                        c.positive_primes += 1;
                    } else {
                        c.negative_primes += 1;
                    }
                }
                // odometer: last coordinate fastest, first coordinate within the slab
                let mut i = m;
                loop {
                    if i == 0 {
                        return (c, prob);
                    }
                    i -= 1;
                    let top = if i == 0 { b } else { bounds[i][1] };
                    if x[i] < top {
                        x[i] += 1;
                        break;
                    }
                    x[i] = if i == 0 { a } else { bounds[i][0] };
                }
            }
        })
        .collect();
    let mut out = PrimeCount {
        positive: 0,
        negative: 0,
        points: 0,
        probabilistic: false,
        slabs: Vec::new(),
    };
    for (s, p) in slabs {
        out.positive += s.positive_primes;
        out.negative += s.negative_primes;
        out.points += s.points;
        out.probabilistic |= p;
        out.slabs.push(s);
    }
    Ok(out)
}

/// Which claim applies to `(n, k)`.
pub fn regime(n: usize, k: usize) -> &'static str {
    if n >= 4 * k {
        "asymptotic"
    } else if 7 * n >= 22 * k {
        "lower_bound"
    } else {
        "outside"
    }
}

/// Observed versus predicted prime counts.
#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub observed: u64,
    pub predicted: f64,
    pub pred_err: f64,
    pub ratio: f64,
    /// Primes among negated norm values, and their predicted count.
    pub observed_negative: u64,
    pub predicted_negative: f64,
    pub integral: f64,
    pub integral_err: f64,
    pub points: u64,
    pub probabilistic_primality: bool,
    pub regime: String,
    /// `ratio >= c0` in the lower-bound regime; absent otherwise.
    pub lower_bound_pass: Option<bool>,
    pub sseries: SingularSeries,
    pub config: serde_json::Value,
    pub version: String,
    pub runtime_s: f64,
    #[serde(skip)]
    pub slabs: Vec<SlabCount>,
}

impl RunReport {
    pub fn slabs_csv(&self) -> String {
        let mut s = String::from("slab_lo,slab_hi,points,positive_primes,negative_primes\n");
        for c in &self.slabs {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                c.lo, c.hi, c.points, c.positive_primes, c.negative_primes
            ));
        }
        s
    }
}

pub fn theorem_check(cfg: &ExperimentConfig) -> Result<RunReport> {
    cfg.validate()?;
    let ctx = cfg.context()?;
    let count = observed_prime_count(cfg)?;
    let main = predicted_main_term(cfg)?;
    let ratio = if main.value > 0.0 {
        count.positive as f64 / main.value
    } else if count.positive == 0 {
        1.0
    } else {
        f64::INFINITY
    };
    let reg = regime(ctx.n(), ctx.k());
    Ok(RunReport {
        observed: count.positive,
        predicted: main.value,
        pred_err: main.err,
        ratio,
        observed_negative: count.negative,
        predicted_negative: main.negative_value,
        integral: main.integral,
        integral_err: main.integral_err,
        points: count.points,
        probabilistic_primality: count.probabilistic,
        regime: reg.into(),
        lower_bound_pass: (reg == "lower_bound").then_some(ratio >= cfg.c0),
        sseries: main.sseries,
        config: cfg.to_json(),
        version: VERSION.into(),
        runtime_s: 0.0,
        slabs: count.slabs,
    })
}

/// `#{t in [lo, hi] : t = c mod p}`.
fn count_residue(lo: i64, hi: i64, c: i64, p: i64) -> i64 {
    if hi < lo {
        return 0;
    }
    (hi - c).div_euclid(p) - (lo - 1 - c).div_euclid(p)
}

/// `#{x in box : sum x_i r^(i-1) = 0 mod p}`.
pub fn congruence_count(bounds: &[[i64; 2]], r: u64, p: u64) -> u64 {
    let p = p as i64;
    let m = bounds.len();
    let pw: Vec<i64> = (0..m)
        .scan(1i64, |acc, _| {
            let v = *acc;
            *acc = *acc * r as i64 % p;
            Some(v)
        })
        .collect();
    if m == 1 {
        return count_residue(bounds[0][0], bounds[0][1], 0, p) as u64;
    }
    let mut total = 0i64;
    let mut x: Vec<i64> = bounds[1..].iter().map(|b| b[0]).collect();
    if bounds[1..].iter().any(|b| b[1] < b[0]) {
        return 0;
    }
    loop {
        let s: i64 = x
            .iter()
            .zip(&pw[1..])
            .map(|(a, w)| a.rem_euclid(p) * w % p)
            .sum::<i64>()
            % p;
        total += count_residue(bounds[0][0], bounds[0][1], (p - s) % p, p);
        let mut i = 0;
        loop {
            if i == x.len() {
                return total as u64;
            }
            if x[i] < bounds[i + 1][1] {
                x[i] += 1;
                break;
            }
            x[i] = bounds[i + 1][0];
            i += 1;
        }
    }
}

/// Discrepancy of one dyadic block `[D, 2D)`.
#[derive(Debug, Clone, Serialize)]
pub struct TypeIBlock {
    pub d: u64,
    pub primes: u64,
    pub prime_ideals: u64,
    pub discrepancy: f64,
    /// `X^(n-k-1) D^(1/(n-k)) + D`.
    pub reference: f64,
    pub ratio: f64,
    /// Every term is at most the number of lines in the first coordinate.
    pub term_bound_ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TypeIReport {
    pub blocks: Vec<TypeIBlock>,
    pub box_points: u64,
    /// Least-squares constant `C` in `discrepancy ~ C * reference`.
    pub fitted_constant: f64,
    /// Largest block ratio divided by the fitted constant.
    pub max_ratio_over_fit: f64,
    pub pass: bool,
    pub config: serde_json::Value,
    pub version: String,
}

impl TypeIReport {
    pub fn to_csv(&self) -> String {
        let mut s = String::from("d,primes,prime_ideals,discrepancy,reference,ratio\n");
        for b in &self.blocks {
            s.push_str(&format!(
                "{},{},{},{},{},{}\n",
                b.d, b.primes, b.prime_ideals, b.discrepancy, b.reference, b.ratio
            ));
        }
        s
    }
}

/// `sum |#A_P - #A / p|` over degree-one primes `P = (p, w - r)` with
/// `p in [D, 2D)`, for each configured block.
pub fn type_i_discrepancy(cfg: &ExperimentConfig) -> Result<TypeIReport> {
    let ctx = cfg.context()?;
    let bounds = cfg.box_bounds(&ctx);
    let m = bounds.len();
    let box_points: u64 = bounds
        .iter()
        .map(|[lo, hi]| (hi - lo + 1).max(0) as u64)
        .product();
    let lines: u64 = bounds[1..]
        .iter()
        .map(|[lo, hi]| (hi - lo + 1).max(0) as u64)
        .product();
    let side = bounds
        .iter()
        .map(|[lo, hi]| (hi - lo + 1) as f64)
        .fold(0.0, f64::max);
    let mut blocks = Vec::new();
    for &d in &cfg.typei.blocks {
        let mut acc = Acc::default();
        let (mut np, mut ni, mut ok) = (0, 0, true);
        for p in primes::primes_up_to(2 * d - 1)
            .into_iter()
            .filter(|&p| p >= d && !ctx.is_bad_prime(p))
        {
            np += 1;
            let fp = polymodp::from_int(ctx.coeffs(), p);
            for r in polymodp::roots_bruteforce(&fp, p) {
                ni += 1;
                let a = congruence_count(&bounds, r, p) as f64;
                // rho of a degree-one prime is 1
                let term = (a - box_points as f64 / p as f64).abs();
                ok &= term <= lines as f64 + 1e-9;
                acc.add(term);
            }
        }
        let reference = side.powi(m as i32 - 1) * (d as f64).powf(1.0 / m as f64) + d as f64;
        let disc = acc.value();
        blocks.push(TypeIBlock {
            d,
            primes: np,
            prime_ideals: ni,
            discrepancy: disc,
            reference,
            ratio: disc / reference,
            term_bound_ok: ok,
        });
    }
    let num: f64 = blocks.iter().map(|b| b.discrepancy * b.reference).sum();
    let den: f64 = blocks.iter().map(|b| b.reference * b.reference).sum();
    let c = if den > 0.0 { num / den } else { 0.0 };
    let max_ratio = blocks.iter().map(|b| b.ratio).fold(0.0, f64::max);
    let max_ratio_over_fit = if c > 0.0 { max_ratio / c } else { 0.0 };
    Ok(TypeIReport {
        pass: max_ratio_over_fit <= 3.0 && blocks.iter().all(|b| b.term_bound_ok),
        blocks,
        box_points,
        fitted_constant: c,
        max_ratio_over_fit,
        config: cfg.to_json(),
        version: VERSION.into(),
    })
}

/// `int over {e in R, sum e_i = target} de_1 .. de_(l-1) / (e_1 ... e_l)`,
/// with the one-point value `1/target` when `l = 1`.
pub fn polytope_integral(spec: &PolytopeSpec, target: f64) -> Result<f64> {
    let iv = &spec.intervals;
    let l = iv.len();
    if l == 0 {
        return Err(Error::Invalid("empty polytope".into()));
    }
    // suffix sums of the interval ends give the exact feasible limits
    let mut lo_suf = vec![0.0; l + 1];
    let mut hi_suf = vec![0.0; l + 1];
    for i in (0..l).rev() {
        lo_suf[i] = lo_suf[i + 1] + iv[i][0];
        hi_suf[i] = hi_suf[i + 1] + iv[i][1];
    }
    if target < lo_suf[0] || target > hi_suf[0] {
        return Err(Error::EmptySlice);
    }
    fn rec(iv: &[[f64; 2]], lo_suf: &[f64], hi_suf: &[f64], i: usize, s: f64, tol: f64) -> f64 {
        let l = iv.len();
        if i == l - 1 {
            return if s >= iv[i][0] - 1e-15 && s <= iv[i][1] + 1e-15 {
                1.0 / s
            } else {
                0.0
            };
        }
        let a = iv[i][0].max(s - hi_suf[i + 1]);
        let b = iv[i][1].min(s - lo_suf[i + 1]);
        if b <= a {
            return 0.0;
        }
        let f = |e: f64| rec(iv, lo_suf, hi_suf, i + 1, s - e, tol) / e;
        // split where the inner limits change so each piece is smooth
        let mut cuts = vec![a, b];
        for j in i + 1..l {
            for t in [
                s - (lo_suf[i + 1] - iv[j][0] + iv[j][1]),
                s - (hi_suf[i + 1] - iv[j][1] + iv[j][0]),
            ] {
                if t > a && t < b {
                    cuts.push(t);
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        cuts.windows(2)
            .map(|w| numeric::adaptive(&f, w[0], w[1], tol).0)
            .sum()
    }
    let v = rec(iv, &lo_suf, &hi_suf, 0, target, 1e-13);
    if l > 1 && v == 0.0 {
        return Err(Error::EmptySlice);
    }
    Ok(v)
}

/// `polytope_integral` with empty slices mapped to 0.
fn slice_or_zero(spec: &PolytopeSpec, s: f64) -> Result<f64> {
    match polytope_integral(spec, s) {
        Err(Error::EmptySlice) => Ok(0.0),
        r => r,
    }
}

/// Observed against predicted counts of products of primes in a window.
#[derive(Debug, Clone, Serialize)]
pub struct TypeIIReport {
    pub polytope: PolytopeSpec,
    pub x: u64,
    pub eta: f64,
    /// Ordered prime tuples `(p_1..p_l)` with product in `[X, X(1+eta)]` and
    /// `(log p_i / log X)` in the polytope.
    pub observed: u64,
    pub predicted: f64,
    pub ratio: f64,
    /// Ordered tuples of prime ideals (good primes only), when requested.
    pub ideal_observed: Option<u64>,
    pub ideal_ratio: Option<f64>,
    pub surrogate: String,
}

/// Distinct orderings of a multiset of primes.
fn permutations(ps: &[u64], out: &mut Vec<Vec<u64>>) {
    let mut v = ps.to_vec();
    v.sort_unstable();
    loop {
        out.push(v.clone());
        // next lexicographic permutation
        let Some(i) = (0..v.len().saturating_sub(1))
            .rev()
            .find(|&i| v[i] < v[i + 1])
        else {
            return;
        };
        let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
    }
}

/// Ordered tuples of prime ideals whose norms multiply to `m`, weighted by
/// the polytope test on `log N(P_i) / log X`.
fn ideal_tuples(
    fac: &[(u64, u32)],
    slots: usize,
    degs: &dyn Fn(u64) -> Vec<u32>,
    spec: &PolytopeSpec,
    lx: f64,
    cur: &mut Vec<f64>,
) -> u64 {
    if cur.len() == slots {
        return (fac.iter().all(|&(_, e)| e == 0) && spec.contains(cur)) as u64;
    }
    let mut total = 0;
    for (idx, &(p, e)) in fac.iter().enumerate() {
        if e == 0 {
            continue;
        }
        for d in degs(p) {
            if d > e {
                continue;
            }
            let mult = degs(p).iter().filter(|&&x| x == d).count() as u64;
            let mut rest = fac.to_vec();
            rest[idx].1 -= d;
            cur.push(d as f64 * (p as f64).ln() / lx);
            total += mult * ideal_tuples(&rest, slots, degs, spec, lx, cur);
            cur.pop();
        }
        let _ = idx;
    }
    total
}

pub fn type_ii_density_check(
    spec: &PolytopeSpec,
    x: u64,
    eta: f64,
    ctx: Option<&FieldSpec>,
    budget: u64,
) -> Result<TypeIIReport> {
    let l = spec.len();
    if l > 3 {
        return Err(Error::Invalid(
            "type II check supports at most 3 factors".into(),
        ));
    }
    spec.validate(0.0, f64::INFINITY)?;
    let top = (x as f64 * (1.0 + eta)).floor() as u64;
    if top > budget {
        return Err(Error::BudgetExceeded(format!(
            "window end {top} exceeds budget {budget}"
        )));
    }
    let lx = (x as f64).ln();
    let spf = primes::spf_table(top as usize);
    let factor = |mut m: u64| -> Vec<u64> {
        let mut ps = Vec::new();
        while m > 1 {
            let p = spf[m as usize] as u64;
            ps.push(p);
            m /= p;
        }
        ps
    };
    let observed: u64 = (x..=top)
        .into_par_iter()
        .map(|m| {
            let ps = factor(m);
            if ps.len() != l {
                return 0;
            }
            let mut perms = Vec::new();
            permutations(&ps, &mut perms);
            perms
                .iter()
                .filter(|t| {
                    spec.contains(&t.iter().map(|&p| (p as f64).ln() / lx).collect::<Vec<_>>())
                })
                .count() as u64
        })
        .sum();
    let g = |t: f64| slice_or_zero(spec, t.ln() / lx).unwrap_or(0.0);
    let (integral, _) = numeric::adaptive(&g, x as f64, x as f64 * (1.0 + eta), 1e-9 * x as f64);
    let predicted = integral / lx;
    let ratio = if predicted > 0.0 {
        observed as f64 / predicted
    } else if observed == 0 {
        1.0
    } else {
        f64::INFINITY
    };
    let (ideal_observed, ideal_ratio) = match ctx {
        Some(ctx) => {
            let degs = |p: u64| -> Vec<u32> {
                if ctx.is_bad_prime(p) {
                    Vec::new()
                } else {
                    polymodp::degree_pattern(&polymodp::from_int(ctx.coeffs(), p), p)
                }
            };
            let cnt: u64 = (x..=top)
                .into_par_iter()
                .map(|m| {
                    let ps = factor(m);
                    let mut fac: Vec<(u64, u32)> = Vec::new();
                    for p in ps {
                        match fac.last_mut() {
                            Some((q, e)) if *q == p => *e += 1,
                            _ => fac.push((p, 1)),
                        }
                    }
                    ideal_tuples(&fac, l, &degs, spec, lx, &mut Vec::new())
                })
                .sum();
            (
                Some(cnt),
                Some(if predicted > 0.0 {
                    cnt as f64 / predicted
                } else {
                    1.0
                }),
            )
        }
        None => (None, None),
    };
    Ok(TypeIIReport {
        polytope: spec.clone(),
        x,
        eta,
        observed,
        predicted,
        ratio,
        ideal_observed,
        ideal_ratio,
        surrogate:
            "rational primes stand in for prime ideals; the ideal count covers good primes only"
                .into(),
    })
}

fn binom(n: u64, k: u64) -> u64 {
    (0..k).fold(1u64, |acc, i| acc * (n - i) / (i + 1))
}

/// Upper bound for the number of ideal divisors of `(x)` given `|N(x)|`:
/// 2 for `p || N`, otherwise the number of ideals of norm dividing `p^a`.
pub fn tau_bound(ctx: &FieldSpec, norm_abs: u128) -> Result<u64> {
    if norm_abs == 0 {
        return Err(Error::ZeroVector);
    }
    let n = ctx.n() as u64;
    let mut t = 1u64;
    for (p, a) in primes::factor_u128(norm_abs)? {
        if a == 1 {
            t *= 2;
            continue;
        }
        let local: u64 = if ctx.is_bad_prime(p) {
            (0..=a as u64).map(|j| binom(j + n - 1, n - 1)).sum()
        } else {
            let pat = polymodp::degree_pattern(&polymodp::from_int(ctx.coeffs(), p), p);
            local::ideal_counts_at(&pat, a as usize).iter().sum()
        };
        t *= local;
    }
    Ok(t)
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorRow {
    pub x: i64,
    pub points: u64,
    pub sum: f64,
    /// `sum / X^(n-k)`.
    pub normalized: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct DivisorReport {
    pub e: u32,
    pub rows: Vec<DivisorRow>,
    /// Least-squares slope of `log(sum / X^(n-k))` against `log log X`.
    pub log_exponent: f64,
    pub config: serde_json::Value,
    pub version: String,
}

/// `sum over x in [1, X]^(n-k) of tau_bound(N(x))^e`.
pub fn divisor_sum(ctx: &FieldSpec, x: i64, e: u32, budget: u64) -> Result<DivisorRow> {
    let m = ctx.free_dim();
    let points = (x as u128).pow(m as u32);
    if points > budget as u128 {
        return Err(Error::BudgetExceeded(format!(
            "{points} norm evaluations exceed budget {budget}"
        )));
    }
    let np = ctx.norm_poly()?;
    let rows: Vec<Result<(u64, u64)>> = (1..=x)
        .into_par_iter()
        .map(|first| {
            let mut s = 0u64;
            let mut cnt = 0u64;
            let mut v = vec![1i64; m];
            v[0] = first;
            loop {
                cnt += 1;
                if e > 0 {
                    let nv = np
                        .eval(&v)
                        .to_i128()
                        .ok_or_else(|| Error::BudgetExceeded("norm exceeds 128 bits".into()))?;
                    s += tau_bound(ctx, nv.unsigned_abs())?.pow(e);
                } else {
                    s += 1;
                }
                let mut i = m;
                loop {
                    if i == 1 {
                        return Ok((s, cnt));
                    }
                    i -= 1;
                    if v[i] < x {
                        v[i] += 1;
                        break;
                    }
                    v[i] = 1;
                }
                if m == 1 {
                    return Ok((s, cnt));
                }
            }
        })
        .collect();
    let (mut sum, mut pts) = (0u64, 0u64);
    for r in rows {
        let (s, c) = r?;
        sum += s;
        pts += c;
    }
    Ok(DivisorRow {
        x,
        points: pts,
        sum: sum as f64,
        normalized: sum as f64 / (x as f64).powi(m as i32),
    })
}

pub fn divisor_sum_check(cfg: &ExperimentConfig) -> Result<DivisorReport> {
    let ctx = cfg.context()?;
    let e = cfg.divisor.e;
    if e > 2 {
        return Err(Error::Invalid("divisor exponent must be 0, 1 or 2".into()));
    }
    let rows = cfg
        .divisor
        .xs
        .iter()
        .map(|&x| divisor_sum(&ctx, x, e, cfg.budget))
        .collect::<Result<Vec<_>>>()?;
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.x > 2)
        .map(|r| ((r.x as f64).ln().ln(), r.normalized.ln()))
        .collect();
    let log_exponent = if pts.len() >= 2 {
        let n = pts.len() as f64;
        let (mx, my) = (
            pts.iter().map(|p| p.0).sum::<f64>() / n,
            pts.iter().map(|p| p.1).sum::<f64>() / n,
        );
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        sxy / sxx
    } else {
        0.0
    };
    Ok(DivisorReport {
        e,
        rows,
        log_exponent,
        config: cfg.to_json(),
        version: VERSION.into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cfg(f: &[i64], k: usize) -> ExperimentConfig {
        ExperimentConfig::for_field(f, k)
    }

    #[test]
    fn config_defaults_and_rejection() {
        let c = cfg(&[-2, 0, 0, 1], 1);
        assert_eq!(c.x, 80);
        assert_eq!(c.typei.blocks, vec![16, 32, 64, 128]);
        let back = ExperimentConfig::from_json(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        assert!(ExperimentConfig::from_json(r#"{"f":[-2,0,0,1],"k":1,"bogus":1}"#).is_err());
        assert!(
            ExperimentConfig::from_json(r#"{"f":[-2,0,0,1],"k":1,"census":{"bogus":1}}"#).is_err()
        );
        assert!(ExperimentConfig::from_json(r#"{"f":[-2,0,0,1],"k":1,"eta1":1.5}"#).is_err());
    }

    #[test]
    fn observed_matches_direct_count() {
        let mut c = cfg(&[-2, 0, 0, 1], 1);
        c.x = 10;
        let got = observed_prime_count(&c).unwrap();
        // N(x1 + x2 w) = x1^3 + 2 x2^3 for w^3 = 2
        let mut expect = 0;
        for a in 1..=10i64 {
            for b in 1..=10i64 {
                if primes::is_prime_u64((a.pow(3) + 2 * b.pow(3)) as u64) {
                    expect += 1;
                }
            }
        }
        assert_eq!(got.positive, expect);
        assert_eq!(got.negative, 0);
        assert_eq!(got.points, 100);
        assert_eq!(
            got.slabs.iter().map(|s| s.positive_primes).sum::<u64>(),
            expect
        );
        c.bbox = Some(vec![[1, 1], [1, 1]]);
        assert_eq!(observed_prime_count(&c).unwrap().positive, 1); // 1 + 2 = 3
    }

    #[test]
    fn observed_monotone_in_x() {
        let mut c = cfg(&[-2, 0, 0, 1], 1);
        let mut last = 0;
        for x in [5, 10, 20, 40] {
            c.x = x;
            let v = observed_prime_count(&c).unwrap().positive;
            assert!(v >= last);
            last = v;
        }
    }

    #[test]
    fn one_dimensional_integral_is_li() {
        let g = |t: &[f64]| if t[0] >= 2.0 { 1.0 / t[0].ln() } else { 0.0 };
        let (v, e) = box_integral(&g, &[2.0], &[1000.0], 0, 0);
        assert!(
            (v - (numeric::li(1000.0) - numeric::li(2.0))).abs() < 1e-6 && e < 1e-6,
            "{v} {e} {}",
            numeric::li(1000.0) - numeric::li(2.0)
        );
    }

    #[test]
    fn empty_domain_and_empty_box() {
        let c = cfg(&[1, 0, 1], 0);
        let ctx = c.context().unwrap();
        // N(t) = t1^2 + t2^2 < 2 on [-1/2, 1/2]^2
        let ((v, _), _) = log_integrals(&ctx, &[[0, 0], [0, 0]], 1000, 0).unwrap();
        assert_eq!(v, 0.0);
        let mut c = c;
        c.bbox = Some(vec![[5, 4], [1, 3]]);
        assert!(c.validate().is_err());
    }

    #[test]
    fn monte_carlo_deterministic_and_consistent() {
        let c = cfg(&[-2, 0, 0, 0, 1], 1);
        let ctx = c.context().unwrap();
        let b = vec![[1, 20]; 3];
        let a = log_integrals(&ctx, &b, 1 << 14, 5).unwrap().0;
        assert_eq!(a, log_integrals(&ctx, &b, 1 << 14, 5).unwrap().0);
        for seed in 0..20 {
            let (v1, e1) = log_integrals(&ctx, &b, 1 << 13, seed).unwrap().0;
            let (v2, e2) = log_integrals(&ctx, &b, 1 << 14, seed + 100).unwrap().0;
            assert!(
                (v1 - v2).abs() < 4.0 * (e1 * e1 + e2 * e2).sqrt(),
                "seed {seed}"
            );
        }
    }

    #[test]
    fn congruence_count_matches_scan() {
        let b = [[1i64, 50], [1, 50]];
        for (p, r) in [(11u64, 7u64), (13, 3), (17, 0)] {
            let mut direct = 0;
            for x1 in 1..=50u64 {
                for x2 in 1..=50u64 {
                    if (x1 + r * x2) % p == 0 {
                        direct += 1;
                    }
                }
            }
            assert_eq!(congruence_count(&b, r, p), direct);
        }
        // a prime larger than every value: one hyperplane class, exact term
        assert_eq!(congruence_count(&[[1, 5]], 0, 101), 0);
    }

    #[test]
    fn polytope_integral_closed_forms() {
        let one = PolytopeSpec::new(&[[0.5, 4.0]]);
        assert_eq!(polytope_integral(&one, 3.0).unwrap(), 1.0 / 3.0);
        assert_eq!(polytope_integral(&one, 5.0).unwrap_err(), Error::EmptySlice);
        for (a, b) in [(0.1, 0.4), (0.25, 0.5), (0.3, 0.7)] {
            let two = PolytopeSpec::new(&[[a, b], [0.01, 0.99]]);
            let exact = (b * (1.0 - a) / (a * (1.0 - b))).ln();
            let v = polytope_integral(&two, 1.0).unwrap();
            assert!(((v - exact) / exact).abs() < 1e-10, "{v} {exact}");
        }
        let impossible = PolytopeSpec::new(&[[0.9, 1.0], [0.9, 1.0]]);
        assert_eq!(
            polytope_integral(&impossible, 1.0).unwrap_err(),
            Error::EmptySlice
        );
    }

    #[test]
    fn type_ii_trivial_cases() {
        let impossible = PolytopeSpec::new(&[[0.9, 1.0], [0.9, 1.0]]);
        let r = type_ii_density_check(&impossible, 10_000, 0.5, None, 1 << 30).unwrap();
        assert_eq!((r.observed, r.predicted), (0, 0.0));
        let spec = PolytopeSpec::new(&[[0.4, 0.5], [0.05, 1.0]]);
        let full = type_ii_density_check(&spec, 100_000, 0.5, None, 1 << 30).unwrap();
        let half = type_ii_density_check(&spec, 100_000, 0.25, None, 1 << 30).unwrap();
        assert!((full.predicted / half.predicted - 2.0).abs() < 0.1);
    }

    #[test]
    fn tau_bound_values() {
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        assert_eq!(tau_bound(&ctx, 3).unwrap(), 2);
        // 5 = P1 P2 with degrees 1, 2: ideals of norm 1, 5, 25 number 1, 1, 2
        assert_eq!(tau_bound(&ctx, 25).unwrap(), 4);
        let mut c = cfg(&[-2, 0, 0, 1], 1);
        c.divisor = DivisorConfig { xs: vec![6], e: 0 };
        assert_eq!(divisor_sum_check(&c).unwrap().rows[0].sum, 36.0);
        c.bbox = None;
        let row = divisor_sum(&ctx, 1, 1, 100).unwrap();
        assert_eq!(row.sum, 2.0); // N(1 + w) = 3
    }

    #[test]
    fn type_i_small_box() {
        let mut c = cfg(&[-2, 0, 0, 1], 1);
        c.x = 50;
        c.typei.blocks = vec![10];
        let r = type_i_discrepancy(&c).unwrap();
        assert!(r.blocks[0].term_bound_ok);
        assert!(r.blocks[0].prime_ideals > 0);
    }

    #[test]
    fn regimes() {
        assert_eq!(regime(4, 1), "asymptotic");
        assert_eq!(regime(7, 2), "lower_bound");
        assert_eq!(regime(6, 2), "outside");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]
        #[test]
        fn polytope_integral_symmetric(a in 0.1f64..0.4, w in 0.05f64..0.4, b in 0.1f64..0.4, v in 0.05f64..0.4, c in 0.1f64..0.4, u in 0.05f64..0.4, t in 0.6f64..1.5) {
            let p1 = PolytopeSpec::new(&[[a, a + w], [b, b + v], [c, c + u]]);
            let p2 = PolytopeSpec::new(&[[c, c + u], [a, a + w], [b, b + v]]);
            let x = slice_or_zero(&p1, t).unwrap();
            let y = slice_or_zero(&p2, t).unwrap();
            prop_assert!((x - y).abs() <= 1e-8 * x.abs().max(1e-12), "{} {}", x, y);
        }

        #[test]
        fn type_i_terms_bounded(r in 0u64..31, lo in 1i64..20, w in 0i64..40) {
            let b = [[lo, lo + w], [1, 17]];
            let a = congruence_count(&b, r, 31) as f64;
            let total = ((w + 1) * 17) as f64;
            prop_assert!((a - total / 31.0).abs() <= 17.0);
        }
    }
}

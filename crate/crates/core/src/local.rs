//! Local data at rational primes, prime ideals, the densities that enter the
//! sieve, singular series, ideal counts and the Buchstab identity.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{self, FieldSpec};
use crate::numeric::Acc;
use crate::polymodp;
use crate::primes;

/// Default ceiling on `p^(n-k)` for brute-force local counts.
pub const BRUTE_BUDGET: u64 = 50_000_000;

/// Splitting data of `f` modulo `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PrimeLocalData {
    pub p: u64,
    /// Degrees of the distinct irreducible factors of `f mod p`, sorted.
    pub degree_pattern: Vec<u32>,
    /// Number of degree-1 prime ideals above `p` (distinct roots of `f mod p`).
    pub nu_p: u32,
    /// `#{x in F_p^(n-k) : N(x) = 0 mod p}`.
    pub nu: BigUint,
    /// `#{x in F_p^n : N(x) = 0 mod p}`.
    pub nu2: BigUint,
    pub is_bad: bool,
}

fn check_prime(p: u64) -> Result<()> {
    if primes::is_prime_u64(p) {
        Ok(())
    } else {
        Err(Error::CompositeP(p))
    }
}

/// Degrees of the distinct irreducible factors of `f mod p` (radical for
/// bad primes).
pub fn degree_pattern(ctx: &FieldSpec, p: u64) -> Result<Vec<u32>> {
    check_prime(p)?;
    let f = polymodp::from_int(ctx.coeffs(), p);
    if !ctx.is_bad_prime(p) {
        return Ok(polymodp::degree_pattern(&f, p));
    }
    // distinct factors: f / gcd(f, f') when every multiplicity is below p
    if p as usize > ctx.n() {
        let g = polymodp::gcd(&f, &polymodp::derivative(&f, p), p);
        let rad = polymodp::divrem(&f, &g, p).0;
        return Ok(polymodp::degree_pattern(&rad, p));
    }
    Ok(bruteforce_pattern(&f, p))
}

fn bruteforce_pattern(f: &polymodp::Poly, p: u64) -> Vec<u32> {
    let n = polymodp::degree(f).unwrap_or(0);
    let mut out = Vec::new();
    for d in 1..=n {
        for _ in polymodp::factors_of_degree_bruteforce(f, d, p) {
            out.push(d as u32);
        }
    }
    out
}

/// `nu / p^m` for a good prime from its degree pattern, by inclusion-exclusion
/// over the primes above `p`.
pub fn density_from_pattern(pattern: &[u32], p: u64, m: usize) -> f64 {
    let r = pattern.len();
    let mut acc = Acc::default();
    for mask in 1u32..(1 << r) {
        let ds: u32 = (0..r)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pattern[i])
            .sum();
        let term = (p as f64).powi(-(ds.min(m as u32) as i32));
        if mask.count_ones() % 2 == 1 {
            acc.add(term);
        } else {
            acc.add(-term);
        }
    }
    acc.value()
}

/// `nu_2 / p^n = 1 - prod (1 - p^-d_i)`.
pub fn density2_from_pattern(pattern: &[u32], p: u64) -> f64 {
    let mut log = Acc::default();
    for &d in pattern {
        log.add((-(p as f64).powi(-(d as i32))).ln_1p());
    }
    -log.value().exp_m1()
}

fn nu_exact_from_pattern(pattern: &[u32], p: u64, m: usize) -> BigUint {
    let r = pattern.len();
    let pb = BigUint::from(p);
    let mut pos = BigUint::zero();
    let mut neg = BigUint::zero();
    for mask in 1u32..(1 << r) {
        let ds: u32 = (0..r)
            .filter(|i| mask & (1 << i) != 0)
            .map(|i| pattern[i])
            .sum();
        let term = pb.pow(m as u32 - ds.min(m as u32));
        if mask.count_ones() % 2 == 1 {
            pos += term;
        } else {
            neg += term;
        }
    }
    pos - neg
}

fn nu2_exact_from_pattern(pattern: &[u32], p: u64, n: usize) -> BigUint {
    let pb = BigUint::from(p);
    let units: BigUint = pattern
        .iter()
        .map(|&d| pb.pow(d) - BigUint::one())
        .product();
    pb.pow(n as u32) - units
}

/// `nu(p)` from the splitting formula; good primes only.
pub fn nu_fast(ctx: &FieldSpec, p: u64) -> Result<BigUint> {
    check_prime(p)?;
    if ctx.is_bad_prime(p) {
        return Err(Error::BadPrime(p));
    }
    let pat = degree_pattern(ctx, p)?;
    Ok(nu_exact_from_pattern(&pat, p, ctx.free_dim()))
}

/// `nu(p)` by enumerating `F_p^(n-k)`, using `N(c x) = c^n N(x)` to visit one
/// point per line.
pub fn nu_bruteforce(ctx: &FieldSpec, p: u64, budget: u64) -> Result<BigUint> {
    check_prime(p)?;
    let m = ctx.free_dim();
    let size = (p as f64).powi(m as i32);
    if size > budget as f64 {
        return Err(Error::BudgetExceeded(format!(
            "p^(n-k) = {p}^{m} exceeds {budget}"
        )));
    }
    let terms = ctx.norm_poly()?.reduce_mod(p);
    let mut zeros_proj: u64 = 0;
    let mut x = vec![0u64; m];
    // lines through the origin: first nonzero coordinate normalized to 1
    for lead in 0..m {
        for v in x.iter_mut() {
            *v = 0;
        }
        x[lead] = 1;
        let tail = m - lead - 1;
        let count = p.pow(tail as u32);
        for code in 0..count {
            let mut c = code;
            for j in lead + 1..m {
                x[j] = c % p;
                c /= p;
            }
            if field::eval_terms_mod(&terms, &x, p) == 0 {
                zeros_proj += 1;
            }
        }
    }
    Ok(BigUint::from(1u64) + BigUint::from(zeros_proj) * BigUint::from(p - 1))
}

/// Local data at `p`; `nu` comes from the formula at good primes and from
/// enumeration at bad ones.
pub fn local_data(ctx: &FieldSpec, p: u64) -> Result<PrimeLocalData> {
    check_prime(p)?;
    let is_bad = ctx.is_bad_prime(p);
    let pattern = degree_pattern(ctx, p)?;
    let fp = polymodp::from_int(ctx.coeffs(), p);
    let nu_p = polymodp::root_count(&fp, p) as u32;
    let nu = if is_bad {
        nu_bruteforce(ctx, p, BRUTE_BUDGET)?
    } else {
        nu_exact_from_pattern(&pattern, p, ctx.free_dim())
    };
    let nu2 = if is_bad {
        nu2_bruteforce(ctx, p)?
    } else {
        nu2_exact_from_pattern(&pattern, p, ctx.n())
    };
    Ok(PrimeLocalData {
        p,
        degree_pattern: pattern,
        nu_p,
        nu,
        nu2,
        is_bad,
    })
}

/// `nu_2(p)` as `p^n` minus the number of units of `F_p[X]/(f)`, counted by
/// enumeration of the multiplication determinant mod `p`.
fn nu2_bruteforce(ctx: &FieldSpec, p: u64) -> Result<BigUint> {
    let full = ctx.with_k(0)?;
    nu_bruteforce(&full, p, BRUTE_BUDGET)
}

/// Local density `nu / p^(n-k)`; exact enumeration at bad primes.
pub fn local_density(ctx: &FieldSpec, p: u64) -> Result<f64> {
    if ctx.is_bad_prime(p) {
        let nu = nu_bruteforce(ctx, p, BRUTE_BUDGET)?;
        Ok(nu.to_f64().unwrap() / (p as f64).powi(ctx.free_dim() as i32))
    } else {
        Ok(density_from_pattern(
            &degree_pattern(ctx, p)?,
            p,
            ctx.free_dim(),
        ))
    }
}

/// A prime ideal above `p`: the `index`-th irreducible factor of degree
/// `degree` of `f mod p` in distinct-degree order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub degree: u32,
    pub index: u32,
}

impl PrimeIdeal {
    pub fn norm(&self) -> u128 {
        (self.p as u128).pow(self.degree)
    }
}

/// A product of prime ideals with exponents.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default, Serialize)]
pub struct IdealSym {
    pub factors: Vec<(PrimeIdeal, u32)>,
}

impl IdealSym {
    pub fn unit() -> Self {
        IdealSym::default()
    }

    pub fn from_primes(ps: &[PrimeIdeal]) -> Self {
        let mut map: BTreeMap<PrimeIdeal, u32> = BTreeMap::new();
        for &q in ps {
            *map.entry(q).or_insert(0) += 1;
        }
        IdealSym {
            factors: map.into_iter().collect(),
        }
    }

    pub fn norm(&self) -> u128 {
        self.factors.iter().map(|(q, e)| q.norm().pow(*e)).product()
    }

    pub fn is_squarefree(&self) -> bool {
        self.factors.iter().all(|&(_, e)| e == 1)
    }

    /// Mobius function (0 unless squarefree).
    pub fn mobius(&self) -> i32 {
        if self.is_squarefree() {
            if self.factors.len() % 2 == 0 {
                1
            } else {
                -1
            }
        } else {
            0
        }
    }
}

/// Prime ideals above a good prime `p`, in (degree, index) order.
pub fn primes_above(ctx: &FieldSpec, p: u64) -> Result<Vec<PrimeIdeal>> {
    let pat = degree_pattern(ctx, p)?;
    let mut out = Vec::new();
    let mut last = 0;
    let mut idx = 0;
    for d in pat {
        if d != last {
            idx = 0;
            last = d;
        }
        out.push(PrimeIdeal {
            p,
            degree: d,
            index: idx,
        });
        idx += 1;
    }
    Ok(out)
}

/// `rho` of a squarefree ideal supported on good primes:
/// `prod_p p^max(0, D_p - (n-k))` with `D_p` the total degree above `p`.
pub fn rho(ctx: &FieldSpec, d: &IdealSym) -> Result<BigUint> {
    if !d.is_squarefree() {
        return Err(Error::NotSquarefree);
    }
    let m = ctx.free_dim() as u32;
    let mut by_p: BTreeMap<u64, u32> = BTreeMap::new();
    for (q, _) in &d.factors {
        check_prime(q.p)?;
        if ctx.is_bad_prime(q.p) {
            return Err(Error::BadPrime(q.p));
        }
        let above = primes_above(ctx, q.p)?;
        if !above.contains(q) {
            return Err(Error::Invalid(format!("no prime ideal {q:?}")));
        }
        *by_p.entry(q.p).or_insert(0) += q.degree;
    }
    Ok(by_p
        .into_iter()
        .map(|(p, dp)| BigUint::from(p).pow(dp.saturating_sub(m)))
        .product())
}

/// One row of the singular-series table.
#[derive(Debug, Clone, Serialize)]
pub struct SeriesRow {
    pub p: u64,
    pub degree_pattern: String,
    pub nu_p: u32,
    pub nu: String,
    pub factor: f64,
    pub running_product: f64,
}

/// A truncated Euler product.
#[derive(Debug, Clone, Serialize)]
pub struct SingularSeries {
    pub value: f64,
    pub cutoff: u64,
    /// Relative bound: the full product lies within `value * (1 +- tail_bound)`.
    pub tail_bound: f64,
    pub tail_certified: bool,
    #[serde(skip)]
    pub rows: Vec<SeriesRow>,
}

/// Which product to form.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesKind {
    /// `prod (1 - nu/p^(n-k)) (1 - 1/p)^-1`.
    Plain,
    /// `prod (1 - nu/p^(n-k)) (1 - nu_2/p^n)^-1`.
    Tilde,
    /// As `Tilde`, over good primes only.
    TildeGood,
}

fn pattern_string(pat: &[u32]) -> String {
    pat.iter().map(u32::to_string).collect::<Vec<_>>().join("+")
}

/// Certified log-tail of the second-order part beyond `p_cut`, if `p_cut` is
/// large enough for the estimate to apply (needs `n - k >= 2`).
fn second_order_tail(n: usize, m: usize, p_cut: u64) -> Option<f64> {
    if m < 2 {
        return None;
    }
    let p = p_cut as f64;
    let c = 2f64.powi(n as i32);
    // beyond p_cut both densities stay below 1/2
    if n as f64 / p + c / (p * p) > 0.5 {
        return None;
    }
    Some(4.0 * c / p)
}

pub fn series(
    ctx: &FieldSpec,
    p_cut: u64,
    kind: SeriesKind,
    keep_rows: bool,
) -> Result<SingularSeries> {
    let m = ctx.free_dim();
    let n = ctx.n();
    let mut log = Acc::default();
    let mut first_order = Vec::new();
    let mut rows = Vec::new();
    for p in primes::primes_up_to(p_cut) {
        let bad = ctx.is_bad_prime(p);
        if bad && kind == SeriesKind::TildeGood {
            continue;
        }
        let pat = degree_pattern(ctx, p)?;
        let (dens, nu_str) = if bad {
            let nu = nu_bruteforce(ctx, p, BRUTE_BUDGET)?;
            (
                nu.to_f64().unwrap() / (p as f64).powi(m as i32),
                nu.to_string(),
            )
        } else {
            let d = density_from_pattern(&pat, p, m);
            let s = if keep_rows {
                nu_exact_from_pattern(&pat, p, m).to_string()
            } else {
                String::new()
            };
            (d, s)
        };
        let dens2 = if bad {
            nu2_bruteforce(ctx, p)?.to_f64().unwrap() / (p as f64).powi(n as i32)
        } else {
            density2_from_pattern(&pat, p)
        };
        let num = (-dens).ln_1p();
        let den = match kind {
            SeriesKind::Plain => (-1.0 / p as f64).ln_1p(),
            _ => (-dens2).ln_1p(),
        };
        log.add(num - den);
        if kind == SeriesKind::Plain {
            first_order.push((p, (-dens2).ln_1p() - den));
        }
        if keep_rows {
            rows.push(SeriesRow {
                p,
                degree_pattern: pattern_string(&pat),
                nu_p: polymodp::root_count(&polymodp::from_int(ctx.coeffs(), p), p) as u32,
                nu: nu_str,
                factor: (num - den).exp(),
                running_product: log.value().exp(),
            });
        }
    }
    let value = log.value().exp();
    let second = second_order_tail(n, m, p_cut);
    let (tail_log, certified) = match (kind, second) {
        (SeriesKind::Plain, Some(s)) => {
            // oscillation of the first-order partial sums over (P/4, P]
            let mut run = 0.0;
            let mut cum = Vec::with_capacity(first_order.len());
            for &(p, x) in &first_order {
                run += x;
                cum.push((p, run));
            }
            let end = cum.last().map_or(0.0, |c| c.1);
            let osc = cum
                .iter()
                .filter(|(p, _)| *p * 4 > p_cut)
                .map(|(_, c)| (end - c).abs())
                .fold(0.0, f64::max);
            (s + osc, false)
        }
        (_, Some(s)) => (s, true),
        (_, None) => (f64::INFINITY, false),
    };
    Ok(SingularSeries {
        value,
        cutoff: p_cut,
        tail_bound: tail_log.exp_m1(),
        tail_certified: certified,
        rows,
    })
}

/// The singular series `prod_p (1 - nu(p)/p^(n-k)) (1 - 1/p)^-1` over `p <= p_cut`.
pub fn singular_series(ctx: &FieldSpec, p_cut: u64) -> Result<SingularSeries> {
    series(ctx, p_cut, SeriesKind::Plain, false)
}

/// The absolutely convergent companion product with `(1 - nu_2/p^n)` in the
/// denominator.
pub fn singular_series_tilde(ctx: &FieldSpec, p_cut: u64) -> Result<SingularSeries> {
    series(ctx, p_cut, SeriesKind::Tilde, false)
}

/// `#{ideals a : N(a) = p^e}` for `e <= emax` at a good prime with pattern
/// `pat`: coefficients of `prod 1/(1 - t^d)`.
pub fn ideal_counts_at(pat: &[u32], emax: usize) -> Vec<u64> {
    let mut c = vec![0u64; emax + 1];
    c[0] = 1;
    for &d in pat {
        let d = d as usize;
        for e in d..=emax {
            c[e] += c[e - d];
        }
    }
    c
}

/// Number of ideals with norm `<= y`, supported on good primes.
pub fn ideal_count(ctx: &FieldSpec, y: u64, budget: u64) -> Result<u64> {
    if y > budget {
        return Err(Error::BudgetExceeded(format!(
            "ideal enumeration to {y} exceeds {budget}"
        )));
    }
    if y < 2 {
        return Ok(if y == 1 { 1 } else { 0 });
    }
    let ymax = y as usize;
    let spf = primes::spf_table(ymax);
    let sqrt = (y as f64).sqrt() as u64 + 1;
    let mut small: BTreeMap<u64, Vec<u64>> = BTreeMap::new();
    let mut deg1 = vec![0u8; ymax + 1];
    let ps = primes::primes_up_to(y);
    for &p in &ps {
        if ctx.is_bad_prime(p) {
            continue;
        }
        let fp = polymodp::from_int(ctx.coeffs(), p);
        if p <= sqrt {
            let emax = (y as f64).log(p as f64).floor() as usize + 1;
            let counts = ideal_counts_at(&polymodp::degree_pattern(&fp, p), emax);
            deg1[p as usize] = counts[1] as u8;
            small.insert(p, counts);
        } else {
            deg1[p as usize] = polymodp::root_count(&fp, p) as u8;
        }
    }
    let mut a = vec![0u32; ymax + 1];
    a[1] = 1;
    let mut total: u64 = 1;
    for mm in 2..=ymax {
        let p = spf[mm] as usize;
        let mut rest = mm / p;
        let mut e = 1;
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        let local = if e == 1 {
            deg1[p] as u64
        } else {
            small
                .get(&(p as u64))
                .map_or(0, |c| c.get(e).copied().unwrap_or(0))
        };
        let v = a[rest] as u64 * local;
        a[mm] = v as u32;
        total += v;
    }
    Ok(total)
}

/// `ideal_count(y) / y`.
pub fn gamma_estimate(ctx: &FieldSpec, y: u64) -> Result<f64> {
    Ok(ideal_count(ctx, y, 100_000_000)? as f64 / y as f64)
}

/// All squarefree ideals with good support and norm `< r`, with norms.
pub fn squarefree_ideals_below(ctx: &FieldSpec, r: u64) -> Result<Vec<(IdealSym, u64)>> {
    let mut prime_ideals: Vec<PrimeIdeal> = Vec::new();
    for p in primes::primes_up_to(r.saturating_sub(1)) {
        if ctx.is_bad_prime(p) {
            continue;
        }
        for q in primes_above(ctx, p)? {
            if q.norm() < r as u128 {
                prime_ideals.push(q);
            }
        }
    }
    prime_ideals.sort_by_key(|q| (q.norm(), *q));
    let mut out = vec![(IdealSym::unit(), 1u64)];
    fn rec(
        ps: &[PrimeIdeal],
        start: usize,
        cur: &mut Vec<PrimeIdeal>,
        norm: u64,
        r: u64,
        out: &mut Vec<(IdealSym, u64)>,
    ) {
        for i in start..ps.len() {
            let nn = norm as u128 * ps[i].norm();
            if nn >= r as u128 {
                break;
            }
            cur.push(ps[i]);
            out.push((IdealSym::from_primes(cur), nn as u64));
            rec(ps, i + 1, cur, nn as u64, r, out);
            cur.pop();
        }
    }
    rec(&prime_ideals, 0, &mut Vec::new(), 1, r, &mut out);
    Ok(out)
}

/// A sieve weight `lambda = mu(d) log(R / N d)` for `N d < R`.
#[derive(Debug, Clone)]
pub struct SieveWeight {
    pub ideal: IdealSym,
    pub norm: u64,
    pub mu: i32,
    pub lambda: f64,
}

pub fn sieve_weights(ctx: &FieldSpec, r: u64) -> Result<Vec<SieveWeight>> {
    let rf = r as f64;
    Ok(squarefree_ideals_below(ctx, r)?
        .into_iter()
        .map(|(ideal, norm)| {
            let mu = ideal.mobius();
            SieveWeight {
                ideal,
                norm,
                mu,
                lambda: mu as f64 * (rf / norm as f64).ln(),
            }
        })
        .collect())
}

/// `sum_d mu(d) rho(d) / N d * log(R / N d)` over squarefree good ideals.
pub fn sieve_sum(ctx: &FieldSpec, r: u64) -> Result<f64> {
    let m = ctx.free_dim() as u32;
    let mut acc = Acc::default();
    for w in sieve_weights(ctx, r)? {
        // rho depends only on the total degree above each p
        let mut by_p: BTreeMap<u64, u32> = BTreeMap::new();
        for (q, _) in &w.ideal.factors {
            *by_p.entry(q.p).or_insert(0) += q.degree;
        }
        let rho: f64 = by_p
            .iter()
            .map(|(&p, &d)| (p as f64).powi(d.saturating_sub(m) as i32))
            .product();
        acc.add(w.lambda * rho / w.norm as f64);
    }
    Ok(acc.value())
}

/// As [`sieve_sum`] with `rho = 1`.
pub fn sieve_sum_rho_one(ctx: &FieldSpec, r: u64) -> Result<f64> {
    let mut acc = Acc::default();
    for w in sieve_weights(ctx, r)? {
        acc.add(w.lambda / w.norm as f64);
    }
    Ok(acc.value())
}

/// The limit the sieve sum approaches: good-prime tilde series over the
/// good-prime ideal density.
#[derive(Debug, Clone, Serialize)]
pub struct SieveTarget {
    pub tilde: f64,
    pub gamma_hat: f64,
    pub target: f64,
}

pub fn sieve_target(ctx: &FieldSpec, p_cut: u64, y: u64) -> Result<SieveTarget> {
    let tilde = series(ctx, p_cut, SeriesKind::TildeGood, false)?.value;
    let gamma_hat = gamma_estimate(ctx, y)?;
    Ok(SieveTarget {
        tilde,
        gamma_hat,
        target: tilde / gamma_hat,
    })
}

/// Outcome of the Buchstab identity on a finite multiset of positive integers.
#[derive(Debug, Clone, Serialize)]
pub struct BuchstabResult {
    pub lhs: i64,
    pub rhs: i64,
    pub residual: i64,
    pub z1: u64,
    pub z2: u64,
    pub size: usize,
}

fn factor_all(set: &[u128]) -> Result<Vec<Vec<(u64, u32)>>> {
    set.iter()
        .map(|&a| {
            if a == 0 {
                Err(Error::Invalid("sifted set must not contain 0".into()))
            } else {
                primes::factor_u128(a)
            }
        })
        .collect()
}

/// `#{a : every prime factor of a exceeds z}`.
pub fn sifted_count(set: &[u128], z: u64) -> Result<i64> {
    Ok(factor_all(set)?
        .iter()
        .filter(|f| f.first().is_none_or(|&(q, _)| q > z))
        .count() as i64)
}

/// Checks `S(A, z2) = S(A, z1) - sum_{z1 < p <= z2} S(A_p, p)` where
/// `S(A, z)` counts elements with all prime factors above `z` and the summand
/// counts `a/p` (for `p | a`) with no prime factor below `p`.
pub fn buchstab_check(set: &[u128], z1: u64, z2: u64) -> Result<BuchstabResult> {
    if z1 > z2 {
        return Err(Error::Invalid(format!("z1 = {z1} > z2 = {z2}")));
    }
    let facs = factor_all(set)?;
    let lpf = |f: &Vec<(u64, u32)>| f.first().map(|&(q, _)| q);
    let lhs = facs
        .iter()
        .filter(|f| lpf(f).is_none_or(|q| q > z2))
        .count() as i64;
    let s1 = facs
        .iter()
        .filter(|f| lpf(f).is_none_or(|q| q > z1))
        .count() as i64;
    let mut sum = 0i64;
    for p in primes::primes_up_to(z2).into_iter().filter(|&p| p > z1) {
        for (a, f) in set.iter().zip(&facs) {
            if a % p as u128 != 0 {
                continue;
            }
            // a/p has no prime factor below p
            if f.iter().all(|&(q, _)| q >= p) {
                sum += 1;
            }
        }
    }
    let rhs = s1 - sum;
    Ok(BuchstabResult {
        lhs,
        rhs,
        residual: lhs - rhs,
        z1,
        z2,
        size: set.len(),
    })
}

/// Values of the norm form on a box of free coordinates (absolute values,
/// zeros dropped), for sieve experiments.
pub fn norm_values(ctx: &FieldSpec, lo: i64, hi: i64) -> Result<Vec<u128>> {
    let np = ctx.norm_poly()?;
    let m = ctx.free_dim();
    let side = (hi - lo + 1) as u64;
    let total = side.pow(m as u32);
    let mut out = Vec::with_capacity(total as usize);
    let mut x = vec![lo; m];
    for code in 0..total {
        let mut c = code;
        for xi in x.iter_mut() {
            *xi = lo + (c % side) as i64;
            c /= side;
        }
        let v = np.eval(&x);
        if !v.is_zero() {
            let a = if v < BigInt::zero() { -v } else { v };
            out.push(
                a.to_u128()
                    .ok_or_else(|| Error::BudgetExceeded("norm exceeds 128 bits".into()))?,
            );
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::make_context;

    #[test]
    fn x3_minus_2_at_5() {
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        let d = local_data(&ctx, 5).unwrap();
        assert_eq!(d.degree_pattern, vec![1, 2]);
        assert_eq!(d.nu_p, 1);
        assert_eq!(d.nu, BigUint::from(5u32));
        assert_eq!(nu_bruteforce(&ctx, 5, 1000).unwrap(), BigUint::from(5u32));
    }

    #[test]
    fn errors() {
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        assert_eq!(nu_fast(&ctx, 3).unwrap_err(), Error::BadPrime(3));
        assert_eq!(nu_fast(&ctx, 9).unwrap_err(), Error::CompositeP(9));
        let q = primes_above(&ctx, 5).unwrap()[0];
        assert_eq!(
            rho(&ctx, &IdealSym::from_primes(&[q, q])).unwrap_err(),
            Error::NotSquarefree
        );
        assert!(matches!(
            nu_bruteforce(&ctx, 10007, 1000),
            Err(Error::BudgetExceeded(_))
        ));
    }

    #[test]
    fn nu2_formula_matches_enumeration() {
        let ctx = make_context(&[-1, -1, 0, 1], 1).unwrap();
        for p in [2u64, 3, 5, 7, 11, 13] {
            if ctx.is_bad_prime(p) {
                continue;
            }
            let d = local_data(&ctx, p).unwrap();
            assert_eq!(d.nu2, nu2_bruteforce(&ctx, p).unwrap(), "p={p}");
        }
    }

    #[test]
    fn ideal_counts_small() {
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        assert_eq!(ideal_count(&ctx, 1, 100).unwrap(), 1);
        // Gaussian integers, 2 excluded: one generator a > 0, b >= 0 per ideal
        let g = make_context(&[1, 0, 1], 0).unwrap();
        for y in [1u64, 5, 13, 50, 200] {
            let direct = (1..=y as i64)
                .flat_map(|a| (0..=y as i64).map(move |b| (a, b)))
                .filter(|&(a, b)| a * a + b * b <= y as i64 && (a * a + b * b) % 2 == 1)
                .count() as u64;
            assert_eq!(ideal_count(&g, y, 1000).unwrap(), direct, "y={y}");
        }
    }

    #[test]
    fn squarefree_enumeration_matches_multiplicative_count() {
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        let r = 3000u64;
        let list = squarefree_ideals_below(&ctx, r).unwrap();
        // independent: sum over m < r of the number of squarefree ideals of norm m
        let mut expect = 0u64;
        for m in 1..r {
            let mut count = 1u64;
            for (p, e) in primes::factor_u64(m) {
                if ctx.is_bad_prime(p) {
                    count = 0;
                    break;
                }
                let pat = degree_pattern(&ctx, p).unwrap();
                // subsets of primes above p with total degree e
                let mut ways = vec![0u64; e as usize + 1];
                ways[0] = 1;
                for &d in &pat {
                    for s in (d as usize..=e as usize).rev() {
                        ways[s] += ways[s - d as usize];
                    }
                }
                count *= ways[e as usize];
            }
            expect += count;
        }
        assert_eq!(list.len() as u64, expect);
        assert!(list
            .iter()
            .all(|(i, nrm)| i.is_squarefree() && i.norm() == *nrm as u128 && *nrm < r));
    }

    #[test]
    fn sieve_sum_rho_one_matches_integer_route() {
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        let r = 2000u64;
        let got = sieve_sum_rho_one(&ctx, r).unwrap();
        // g(m) = sum over squarefree ideals of norm m of mu: multiplicative,
        // g(p^e) = coefficient of t^e in prod (1 - t^d)
        let mut expect = 0.0;
        for m in 1..r {
            let mut g = 1i64;
            for (p, e) in primes::factor_u64(m) {
                if ctx.is_bad_prime(p) {
                    g = 0;
                    break;
                }
                let pat = degree_pattern(&ctx, p).unwrap();
                let mut c = vec![0i64; e as usize + 1];
                c[0] = 1;
                for &d in &pat {
                    for s in (d as usize..=e as usize).rev() {
                        c[s] -= c[s - d as usize];
                    }
                }
                g *= c[e as usize];
            }
            expect += g as f64 / m as f64 * (r as f64 / m as f64).ln();
        }
        assert!((got - expect).abs() < 1e-9, "{got} vs {expect}");
    }

    #[test]
    fn buchstab_example() {
        let set: Vec<u128> = (100..=200).collect();
        let b = buchstab_check(&set, 5, 13).unwrap();
        assert_eq!(b.residual, 0);
        // direct count of 13-rough numbers in [100, 200]
        let rough = (100u64..=200)
            .filter(|&a| primes::factor_u64(a)[0].0 > 13)
            .count() as i64;
        assert_eq!(b.lhs, rough);
    }

    #[test]
    fn buchstab_with_prime_squares() {
        let set: Vec<u128> = vec![49, 121, 169, 7 * 11, 11 * 11 * 13, 1, 289];
        assert_eq!(buchstab_check(&set, 5, 17).unwrap().residual, 0);
    }

    #[test]
    fn tilde_over_gamma_consistency() {
        // S = S~ / gamma_K factor by factor, so Plain / Tilde = prod (1 - nu2/p^n)/(1 - 1/p)
        let ctx = make_context(&[-2, 0, 0, 1], 1).unwrap();
        let a = singular_series(&ctx, 1000).unwrap().value;
        let b = singular_series_tilde(&ctx, 1000).unwrap().value;
        let mut g = 1.0;
        for p in primes::primes_up_to(1000) {
            let d2 = if ctx.is_bad_prime(p) {
                nu2_bruteforce(&ctx, p).unwrap().to_f64().unwrap() / (p as f64).powi(3)
            } else {
                density2_from_pattern(&degree_pattern(&ctx, p).unwrap(), p)
            };
            g *= (1.0 - d2) / (1.0 - 1.0 / p as f64);
        }
        assert!((a / b - g).abs() < 1e-10);
    }
}

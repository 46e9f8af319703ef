//! Lattice points in bounded regions, Davenport-style volume estimates, and
//! censuses of vectors whose wedge vector is small or vanishes mod `p`.

use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{Signed, ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{self, FieldSpec, OrderElement};
use crate::intmat;
use crate::lattice::{self, IntLattice, MAX_ENUM_RANK};
use crate::numeric::{self, Acc};

/// Default node budget for region enumeration.
pub const REGION_BUDGET: u64 = 100_000_000;
/// Exact polytope volume is used up to this dimension.
pub const EXACT_VOLUME_RANK: usize = 4;

/// Product of closed intervals with rational endpoints.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxisBox {
    lo: Vec<Rational64>,
    hi: Vec<Rational64>,
}

impl AxisBox {
    pub fn new(lo: Vec<Rational64>, hi: Vec<Rational64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return Err(Error::Invalid("box has lo > hi".into()));
        }
        Ok(AxisBox { lo, hi })
    }

    /// `[lo_i, hi_i]` with integer endpoints.
    pub fn from_ints(bounds: &[(i64, i64)]) -> Result<Self> {
        let (lo, hi) = bounds
            .iter()
            .map(|&(a, b)| (Rational64::from_integer(a), Rational64::from_integer(b)))
            .unzip();
        Self::new(lo, hi)
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: i64, hi: i64) -> Result<Self> {
        Self::from_ints(&vec![(lo, hi); dim])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[Rational64] {
        &self.lo
    }

    pub fn hi(&self) -> &[Rational64] {
        &self.hi
    }

    /// Largest absolute value of any coordinate in the box.
    pub fn max_abs(&self) -> f64 {
        self.lo
            .iter()
            .chain(&self.hi)
            .map(|x| ratio_f64(x).abs())
            .fold(0.0, f64::max)
    }

    pub fn volume(&self) -> BigRational {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| big_ratio(&(b - a)))
            .fold(BigRational::from_integer(1.into()), |acc, x| acc * x)
    }
}

/// `{x : lo_j <= a_j . x <= hi_j for all j}` intersected with an optional box.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearRegion {
    pub constraints: Vec<(Vec<i64>, Rational64, Rational64)>,
    pub bbox: Option<AxisBox>,
}

impl LinearRegion {
    pub fn from_box(b: AxisBox) -> Self {
        LinearRegion {
            constraints: Vec::new(),
            bbox: Some(b),
        }
    }

    fn bounded_box(&self) -> Result<&AxisBox> {
        self.bbox.as_ref().ok_or(Error::Unbounded)
    }

    pub fn dim(&self) -> Option<usize> {
        self.bbox
            .as_ref()
            .map(AxisBox::dim)
            .or_else(|| self.constraints.first().map(|c| c.0.len()))
    }

    /// Exact membership of an integer point.
    pub fn contains(&self, x: &[i128]) -> bool {
        if let Some(b) = &self.bbox {
            for ((xi, lo), hi) in x.iter().zip(&b.lo).zip(&b.hi) {
                if !in_interval(*xi, lo, hi) {
                    return false;
                }
            }
        }
        self.constraints.iter().all(|(a, lo, hi)| {
            let s: Option<i128> = a.iter().zip(x).try_fold(0i128, |acc, (&ai, &xi)| {
                acc.checked_add((ai as i128).checked_mul(xi)?)
            });
            s.is_some_and(|s| in_interval(s, lo, hi))
        })
    }

    /// Membership of a real point (boundary ties are measure zero).
    fn contains_f64(&self, x: &[f64]) -> bool {
        if let Some(b) = &self.bbox {
            for ((xi, lo), hi) in x.iter().zip(&b.lo).zip(&b.hi) {
                if *xi < ratio_f64(lo) || *xi > ratio_f64(hi) {
                    return false;
                }
            }
        }
        self.constraints.iter().all(|(a, lo, hi)| {
            let s: f64 = a.iter().zip(x).map(|(&ai, xi)| ai as f64 * xi).sum();
            s >= ratio_f64(lo) && s <= ratio_f64(hi)
        })
    }
}

fn in_interval(x: i128, lo: &Rational64, hi: &Rational64) -> bool {
    // denominators are positive after normalization
    x * *lo.denom() as i128 >= *lo.numer() as i128 && x * *hi.denom() as i128 <= *hi.numer() as i128
}

fn ratio_f64(x: &Rational64) -> f64 {
    *x.numer() as f64 / *x.denom() as f64
}

fn big_ratio(x: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

struct Enumerator {
    basis: Vec<Vec<i128>>,
    mu: Vec<Vec<f64>>,
    bn: Vec<f64>,
    target: Vec<f64>,
}

impl Enumerator {
    /// Gram-Schmidt data of `basis` and the coordinates of `center` along it.
    fn new(basis: &[Vec<i128>], center: &[f64]) -> (Self, f64) {
        let r = basis.len();
        let bf: Vec<Vec<f64>> = basis
            .iter()
            .map(|v| v.iter().map(|&x| x as f64).collect())
            .collect();
        let mut bstar = bf.clone();
        let mut mu = vec![vec![0.0; r]; r];
        let mut bn = vec![0.0; r];
        for i in 0..r {
            for j in 0..i {
                let d: f64 = bf[i].iter().zip(&bstar[j]).map(|(a, b)| a * b).sum();
                mu[i][j] = d / bn[j];
                let (left, right) = bstar.split_at_mut(i);
                for (x, y) in right[0].iter_mut().zip(&left[j]) {
                    *x -= mu[i][j] * y;
                }
            }
            bn[i] = bstar[i].iter().map(|x| x * x).sum();
        }
        let target: Vec<f64> = (0..r)
            .map(|j| {
                center
                    .iter()
                    .zip(&bstar[j])
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
                    / bn[j]
            })
            .collect();
        let par_sq: f64 = (0..r).map(|j| target[j] * target[j] * bn[j]).sum();
        let perp_sq = (center.iter().map(|x| x * x).sum::<f64>() - par_sq).max(0.0);
        (
            Enumerator {
                basis: basis.to_vec(),
                mu,
                bn,
                target,
            },
            perp_sq,
        )
    }

    fn range(&self, level: usize, coeffs: &[i64], rem: f64) -> (i64, i64, f64) {
        let r = self.basis.len();
        let c = self.target[level]
            - (level + 1..r)
                .map(|i| self.mu[i][level] * coeffs[i] as f64)
                .sum::<f64>();
        let w = (rem.max(0.0) / self.bn[level]).sqrt();
        let slack = 1e-7 * (1.0 + w);
        (
            (c - w - slack).ceil() as i64,
            (c + w + slack).floor() as i64,
            c,
        )
    }

    #[allow(clippy::too_many_arguments)]
    fn walk(
        &self,
        level: usize,
        rem: f64,
        coeffs: &mut Vec<i64>,
        region: &LinearRegion,
        nodes: &AtomicU64,
        budget: u64,
        out: &mut Vec<Vec<i128>>,
        keep: bool,
    ) -> Result<u64> {
        if nodes.fetch_add(1, Ordering::Relaxed) >= budget {
            return Err(Error::BudgetExceeded(format!(
                "region enumeration exceeded {budget} nodes"
            )));
        }
        let (lo, hi, c) = self.range(level, coeffs, rem);
        let mut count = 0;
        for x in lo..=hi {
            coeffs[level] = x;
            let used = (x as f64 - c).powi(2) * self.bn[level];
            if level == 0 {
                let n = self.basis[0].len();
                let mut p = vec![0i128; n];
                for (ci, b) in coeffs.iter().zip(&self.basis) {
                    if *ci != 0 {
                        for (o, y) in p.iter_mut().zip(b) {
                            *o += *ci as i128 * y;
                        }
                    }
                }
                if region.contains(&p) {
                    count += 1;
                    if keep {
                        out.push(p);
                    }
                }
            } else {
                count += self.walk(
                    level - 1,
                    rem - used,
                    coeffs,
                    region,
                    nodes,
                    budget,
                    out,
                    keep,
                )?;
            }
        }
        coeffs[level] = 0;
        Ok(count)
    }
}

fn prepare(l: &IntLattice, region: &LinearRegion) -> Result<(Vec<Vec<i128>>, Vec<f64>, f64)> {
    let b = region.bounded_box()?;
    if b.dim() != l.ambient() {
        return Err(Error::DimensionMismatch {
            expected: l.ambient(),
            got: b.dim(),
        });
    }
    if l.rank() > MAX_ENUM_RANK {
        return Err(Error::RankTooLarge(l.rank()));
    }
    let mut red = lattice::lll(l.basis());
    // outermost level = longest vector
    red.sort_by_key(|v| intmat::dot(v, v));
    let basis = red
        .iter()
        .map(|v| {
            v.iter()
                .map(|x| {
                    x.to_i128()
                        .ok_or_else(|| Error::Invalid("basis entry exceeds 128 bits".into()))
                })
                .collect()
        })
        .collect::<Result<Vec<Vec<i128>>>>()?;
    let center: Vec<f64> =
        b.lo.iter()
            .zip(&b.hi)
            .map(|(a, c)| (ratio_f64(a) + ratio_f64(c)) / 2.0)
            .collect();
    let radius_sq: f64 =
        b.lo.iter()
            .zip(&b.hi)
            .map(|(a, c)| ((ratio_f64(c) - ratio_f64(a)) / 2.0).powi(2))
            .sum();
    Ok((basis, center, radius_sq))
}

fn enumerate(
    l: &IntLattice,
    region: &LinearRegion,
    budget: u64,
    keep: bool,
) -> Result<(u64, Vec<Vec<i128>>)> {
    let (basis, center, radius_sq) = prepare(l, region)?;
    let r = basis.len();
    if r == 0 {
        let origin = vec![0i128; l.ambient()];
        let inside = region.contains(&origin);
        return Ok((
            inside as u64,
            if inside && keep {
                vec![origin]
            } else {
                Vec::new()
            },
        ));
    }
    let (en, perp_sq) = Enumerator::new(&basis, &center);
    let bound = radius_sq - perp_sq;
    let bound = bound + 1e-9 * (1.0 + radius_sq);
    if bound < 0.0 {
        return Ok((0, Vec::new()));
    }
    let nodes = AtomicU64::new(0);
    let top = r - 1;
    let (lo, hi, c) = en.range(top, &vec![0; r], bound);
    let parts: Vec<Result<(u64, Vec<Vec<i128>>)>> = (lo..=hi)
        .into_par_iter()
        .map(|x| {
            let mut coeffs = vec![0i64; r];
            coeffs[top] = x;
            let used = (x as f64 - c).powi(2) * en.bn[top];
            let mut out = Vec::new();
            let n = if top == 0 {
                let p: Vec<i128> = en.basis[0].iter().map(|y| x as i128 * y).collect();
                let inside = region.contains(&p);
                if inside && keep {
                    out.push(p);
                }
                inside as u64
            } else {
                en.walk(
                    top - 1,
                    bound - used,
                    &mut coeffs,
                    region,
                    &nodes,
                    budget,
                    &mut out,
                    keep,
                )?
            };
            Ok((n, out))
        })
        .collect();
    let mut total = 0;
    let mut pts = Vec::new();
    for part in parts {
        let (n, p) = part?;
        total += n;
        pts.extend(p);
    }
    Ok((total, pts))
}

/// Exact number of lattice points in a bounded region.
pub fn points_in_region(l: &IntLattice, region: &LinearRegion, budget: u64) -> Result<u64> {
    Ok(enumerate(l, region, budget, false)?.0)
}

/// The lattice points in a bounded region, sorted.
pub fn list_points_in_region(
    l: &IntLattice,
    region: &LinearRegion,
    budget: u64,
) -> Result<Vec<Vec<i128>>> {
    let mut pts = enumerate(l, region, budget, true)?.1;
    pts.sort();
    Ok(pts)
}

/// Main term and error size for a lattice point count.
#[derive(Debug, Clone, Serialize)]
pub struct DavenportEstimate {
    /// Volume of the region in coordinates of the lattice basis, i.e.
    /// `vol(R cap span L) / det(L)`.
    pub main_term: f64,
    /// Standard error of `main_term` (zero when computed exactly).
    pub main_term_err: f64,
    pub exact_volume: bool,
    pub det: f64,
    /// Successive minima `Z_1 <= ... <= Z_r`.
    pub minima: Vec<f64>,
    /// `1 + sum_{j<r} B^j / (Z_1 ... Z_j)` with `B` the largest box coordinate.
    pub error_bound: f64,
}

/// Inequalities `a . c <= b` describing the region in lattice coordinates.
fn coefficient_polytope(
    basis: &[Vec<BigInt>],
    region: &LinearRegion,
) -> Result<Vec<(Vec<BigRational>, BigRational)>> {
    let b = region.bounded_box()?;
    let r = basis.len();
    let mut cons = Vec::new();
    let mut push = |row: Vec<BigInt>, lo: &Rational64, hi: &Rational64| {
        let up: Vec<BigRational> = row
            .iter()
            .map(|x| BigRational::from_integer(x.clone()))
            .collect();
        let down: Vec<BigRational> = up.iter().map(|x| -x).collect();
        cons.push((up, big_ratio(hi)));
        cons.push((down, -big_ratio(lo)));
    };
    for j in 0..b.dim() {
        let row: Vec<BigInt> = (0..r).map(|i| basis[i][j].clone()).collect();
        push(row, &b.lo[j], &b.hi[j]);
    }
    for (a, lo, hi) in &region.constraints {
        let row: Vec<BigInt> = (0..r)
            .map(|i| basis[i].iter().zip(a).map(|(x, &y)| x * y).sum())
            .collect();
        push(row, lo, hi);
    }
    Ok(cons)
}

/// Exact volume of `{x in R^d : a_i . x <= b_i}` (bounded) by Lasserre's
/// recursion over facets.
pub fn polytope_volume(cons: &[(Vec<BigRational>, BigRational)], d: usize) -> Result<BigRational> {
    let mut norm: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for (a, b) in cons {
        let Some(lead) = a.iter().find(|x| !x.is_zero()) else {
            if b.is_negative() {
                return Ok(BigRational::zero());
            }
            continue;
        };
        let s = lead.abs();
        let a: Vec<BigRational> = a.iter().map(|x| x / &s).collect();
        let b = b / &s;
        match norm.iter_mut().find(|(a2, _)| *a2 == a) {
            Some((_, b2)) => {
                if b < *b2 {
                    *b2 = b;
                }
            }
            None => norm.push((a, b)),
        }
    }
    if d == 1 {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        for (a, b) in &norm {
            let t = b / &a[0];
            if a[0].is_positive() {
                hi = Some(hi.map_or(t.clone(), |h| h.min(t)));
            } else {
                lo = Some(lo.map_or(t.clone(), |l| l.max(t)));
            }
        }
        let (Some(lo), Some(hi)) = (lo, hi) else {
            return Err(Error::Unbounded);
        };
        return Ok(if hi > lo {
            hi - lo
        } else {
            BigRational::zero()
        });
    }
    let mut total = BigRational::zero();
    for (i, (a, b)) in norm.iter().enumerate() {
        if b.is_zero() {
            continue;
        }
        let j = (0..d).max_by(|&x, &y| a[x].abs().cmp(&a[y].abs())).unwrap();
        let aj = &a[j];
        let sub: Vec<(Vec<BigRational>, BigRational)> = norm
            .iter()
            .enumerate()
            .filter(|&(t, _)| t != i)
            .map(|(_, (c, e))| {
                let f = &c[j] / aj;
                let row = (0..d)
                    .filter(|&l| l != j)
                    .map(|l| &c[l] - &f * &a[l])
                    .collect();
                (row, e - &f * b)
            })
            .collect();
        let v = polytope_volume(&sub, d - 1)?;
        total += b / aj.abs() * v;
    }
    Ok(total / BigRational::from_integer(BigInt::from(d)))
}

fn invert(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m
        .iter()
        .enumerate()
        .map(|(i, r)| {
            r.iter()
                .cloned()
                .chain((0..n).map(|j| (i == j) as u8 as f64))
                .collect()
        })
        .collect();
    for c in 0..n {
        let piv = (c..n)
            .max_by(|&x, &y| a[x][c].abs().total_cmp(&a[y][c].abs()))
            .unwrap();
        a.swap(c, piv);
        let d = a[c][c];
        for v in a[c].iter_mut() {
            *v /= d;
        }
        for i in 0..n {
            if i != c {
                let f = a[i][c];
                let rc = a[c].clone();
                for (x, y) in a[i].iter_mut().zip(rc) {
                    *x -= f * y;
                }
            }
        }
    }
    a.into_iter().map(|r| r[n..].to_vec()).collect()
}

/// Seeded stratified Monte Carlo volume of the region in lattice coordinates.
fn mc_volume(
    basis: &[Vec<BigInt>],
    region: &LinearRegion,
    samples: usize,
    seed: u64,
) -> Result<(f64, f64)> {
    let b = region.bounded_box()?;
    let r = basis.len();
    let bf: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| v.iter().map(|x| x.to_f64().unwrap()).collect())
        .collect();
    let g: Vec<Vec<f64>> = bf
        .iter()
        .map(|x| {
            bf.iter()
                .map(|y| x.iter().zip(y).map(|(s, t)| s * t).sum())
                .collect()
        })
        .collect();
    let gi = invert(&g);
    let center: Vec<f64> =
        b.lo.iter()
            .zip(&b.hi)
            .map(|(a, c)| (ratio_f64(a) + ratio_f64(c)) / 2.0)
            .collect();
    let rad: f64 =
        b.lo.iter()
            .zip(&b.hi)
            .map(|(a, c)| ((ratio_f64(c) - ratio_f64(a)) / 2.0).powi(2))
            .sum::<f64>()
            .sqrt();
    let bc: Vec<f64> = bf
        .iter()
        .map(|v| v.iter().zip(&center).map(|(x, y)| x * y).sum())
        .collect();
    let tau: Vec<f64> = gi
        .iter()
        .map(|row| row.iter().zip(&bc).map(|(x, y)| x * y).sum())
        .collect();
    let half: Vec<f64> = (0..r)
        .map(|i| rad * gi[i][i].max(0.0).sqrt() * (1.0 + 1e-9))
        .collect();
    let strata = 64usize;
    let per = samples.div_ceil(strata).max(2);
    let cell_vol: f64 = half.iter().map(|h| 2.0 * h).product::<f64>() / strata as f64;
    let results: Vec<(f64, f64)> = (0..strata)
        .into_par_iter()
        .map(|s| {
            let mut rng = numeric::stream_rng(seed, s as u64);
            let mut hits = 0usize;
            let mut c = vec![0.0; r];
            let mut x = vec![0.0; b.dim()];
            for _ in 0..per {
                for i in 0..r {
                    let u: f64 = rng.gen();
                    c[i] = if i == 0 {
                        tau[0] - half[0] + 2.0 * half[0] * (s as f64 + u) / strata as f64
                    } else {
                        tau[i] - half[i] + 2.0 * half[i] * u
                    };
                }
                for (j, xj) in x.iter_mut().enumerate() {
                    *xj = (0..r).map(|i| c[i] * bf[i][j]).sum();
                }
                if region.contains_f64(&x) {
                    hits += 1;
                }
            }
            let p = hits as f64 / per as f64;
            (
                cell_vol * p,
                cell_vol * cell_vol * p * (1.0 - p) / per as f64,
            )
        })
        .collect();
    let mut v = Acc::default();
    let mut var = 0.0;
    for (a, e) in results {
        v.add(a);
        var += e;
    }
    Ok((v.value(), var.sqrt()))
}

/// Volume main term and the explicit error expression with constant 1.
pub fn davenport_estimate(
    l: &IntLattice,
    region: &LinearRegion,
    seed: u64,
) -> Result<DavenportEstimate> {
    let b = region.bounded_box()?;
    if b.dim() != l.ambient() {
        return Err(Error::DimensionMismatch {
            expected: l.ambient(),
            got: b.dim(),
        });
    }
    let r = l.rank();
    let red = lattice::lll(l.basis());
    let (main_term, main_term_err, exact) = if r <= EXACT_VOLUME_RANK {
        let cons = coefficient_polytope(&red, region)?;
        (
            polytope_volume(&cons, r)?.to_f64().unwrap_or(f64::NAN),
            0.0,
            true,
        )
    } else {
        let (v, e) = mc_volume(&red, region, 1 << 18, seed)?;
        (v, e, false)
    };
    let (mins, _) = lattice::successive_minima(l)?;
    let minima: Vec<f64> = mins.iter().map(|m| m.to_f64().unwrap().sqrt()).collect();
    let scale = b.max_abs();
    let mut error_bound = 1.0;
    let mut prod = 1.0;
    for (j, z) in minima.iter().enumerate().take(r.saturating_sub(1)) {
        prod *= z;
        error_bound += scale.powi(j as i32 + 1) / prod;
    }
    let det = lattice::gram_det(l).to_f64().unwrap().sqrt();
    Ok(DavenportEstimate {
        main_term,
        main_term_err,
        exact_volume: exact,
        det,
        minima,
        error_bound,
    })
}

/// `#{b in F_p^n : the constraint rows of b have rank < k mod p}`, i.e. the
/// number of residue vectors whose wedge vanishes mod `p`.
pub fn fp_wedge_census(ctx: &FieldSpec, p: u64, budget: u64) -> Result<u64> {
    let n = ctx.n();
    let k = ctx.k();
    if !crate::primes::is_prime_u64(p) {
        return Err(Error::CompositeP(p));
    }
    let total = (p as u128)
        .checked_pow(n as u32)
        .filter(|&t| t <= budget as u128)
        .ok_or_else(|| {
            Error::BudgetExceeded(format!("{p}^{n} residue vectors exceed budget {budget}"))
        })? as u64;
    if k == 0 {
        return Ok(total);
    }
    // rows contributed by each basis element, reduced mod p
    let unit_rows: Vec<Vec<Vec<u64>>> = (0..n)
        .map(|i| {
            let rows = field::constraint_rows(ctx, &OrderElement::basis(n, i))
                .expect("basis element has the right length");
            rows.iter()
                .map(|r| r.iter().map(|x| intmat::mod_p(x, p)).collect())
                .collect()
        })
        .collect();
    let count = (0..p)
        .into_par_iter()
        .map(|top| {
            let mut b = vec![0u64; n];
            b[n - 1] = top;
            let mut count = 0u64;
            let inner = total / p;
            for _ in 0..inner {
                let mut rows = vec![vec![0u64; n]; k];
                for (i, &bi) in b.iter().enumerate() {
                    if bi != 0 {
                        for (row, ur) in rows.iter_mut().zip(&unit_rows[i]) {
                            for (x, y) in row.iter_mut().zip(ur) {
                                *x = (*x + bi * y) % p;
                            }
                        }
                    }
                }
                if intmat::rank_mod_p(&mut rows, p) < k {
                    count += 1;
                }
                for x in b.iter_mut().take(n - 1) {
                    *x += 1;
                    if *x < p {
                        break;
                    }
                    *x = 0;
                }
            }
            count
        })
        .sum();
    Ok(count)
}

/// One row of a census table.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CensusRow {
    /// The prime `p` or the threshold `kappa`.
    pub param: f64,
    pub count: u64,
    pub reference: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct CensusReport {
    /// Name of the parameter column: `p` or `kappa`.
    pub param_name: String,
    pub rows: Vec<CensusRow>,
    pub max_ratio: f64,
    /// Sample size for sampled censuses, 0 for exhaustive ones.
    pub samples: u64,
    /// Sampled pairs with a vanishing pair wedge.
    pub degenerate: u64,
}

impl CensusReport {
    fn new(param_name: &str, rows: Vec<CensusRow>, samples: u64, degenerate: u64) -> Self {
        let max_ratio = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
        CensusReport {
            param_name: param_name.into(),
            rows,
            max_ratio,
            samples,
            degenerate,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{},count,reference,ratio\n", self.param_name);
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{}\n",
                r.param, r.count, r.reference, r.ratio
            ));
        }
        s
    }
}

/// Exhaustive mod-`p` census over several primes. The reference is
/// `p^(k-1)` for pure fields and `p^(2k-2)` otherwise.
pub fn wedge_census(ctx: &FieldSpec, ps: &[u64], budget: u64) -> Result<CensusReport> {
    let k = ctx.k() as i32;
    let exp = if ctx.pure_theta().is_some() {
        k - 1
    } else {
        2 * k - 2
    };
    let rows = ps
        .iter()
        .map(|&p| {
            let count = fp_wedge_census(ctx, p, budget)?;
            let reference = (p as f64).powi(exp.max(0));
            Ok(CensusRow {
                param: p as f64,
                count,
                reference,
                ratio: count as f64 / reference,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CensusReport::new("p", rows, 0, 0))
}

fn sample_shell<R: Rng>(rng: &mut R, n: usize, scale: i64) -> OrderElement {
    let lo = (scale as i128).pow(2);
    let hi = (2 * scale as i128).pow(2);
    loop {
        let v: Vec<i64> = (0..n)
            .map(|_| rng.gen_range(-2 * scale..=2 * scale))
            .collect();
        let nsq: i128 = v.iter().map(|&x| (x as i128).pow(2)).sum();
        if nsq >= lo && nsq <= hi {
            return OrderElement::from_i64(&v);
        }
    }
}

/// Frequency with which random pairs `b_1, b_2` with `|b_i| in [B, 2B]` have
/// `|wedge(b_1, b_2)| <= kappa B^(2k)`, for each `kappa`.
///
/// The reference column is the `kappa^(1/k)` shape; at `kappa = 0` the
/// ratio column holds the raw frequency. `a_scale` multiplies
/// every count by `a_scale^(n-2k)`, the number of lattice vectors of size
/// about `a_scale` attached to each pair, so passing 1 gives raw pair counts.
pub fn skew_census(
    ctx: &FieldSpec,
    a_scale: u64,
    b_scale: i64,
    samples: u64,
    kappas: &[f64],
    seed: u64,
) -> Result<CensusReport> {
    let n = ctx.n();
    let k = ctx.k();
    if k == 0 || 2 * k > n {
        return Err(Error::Invalid(format!(
            "skew census needs 1 <= k and 2k <= n (n = {n}, k = {k})"
        )));
    }
    if b_scale < 1 {
        return Err(Error::Invalid("B must be at least 1".into()));
    }
    const SLAB: u64 = 256;
    let slabs = samples.div_ceil(SLAB);
    let norms: Vec<Option<f64>> = (0..slabs)
        .into_par_iter()
        .flat_map_iter(|s| {
            let mut rng = numeric::stream_rng(seed, s);
            let m = SLAB.min(samples - s * SLAB);
            (0..m)
                .map(|_| {
                    let b1 = sample_shell(&mut rng, n, b_scale);
                    let b2 = sample_shell(&mut rng, n, b_scale);
                    let w = lattice::wedge_pair(ctx, &b1, &b2).expect("shell vectors are nonzero");
                    (!w.is_zero()).then(|| w.norm_sq().to_f64().unwrap_or(f64::INFINITY))
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let degenerate = norms.iter().filter(|x| x.is_none()).count() as u64;
    let scale_sq = (b_scale as f64).powi(4 * k as i32);
    let weight = (a_scale as f64).powi((n - 2 * k) as i32);
    let rows = kappas
        .iter()
        .map(|&kappa| {
            let thr = kappa * kappa * scale_sq;
            let count = norms.iter().filter(|x| x.is_none_or(|v| v <= thr)).count() as u64;
            let freq = count as f64 / samples.max(1) as f64;
            let reference = kappa.powf(1.0 / k as f64);
            CensusRow {
                param: kappa,
                count: (count as f64 * weight) as u64,
                reference,
                ratio: if reference > 0.0 {
                    freq / reference
                } else {
                    freq
                },
            }
        })
        .collect();
    Ok(CensusReport::new("kappa", rows, samples, degenerate))
}

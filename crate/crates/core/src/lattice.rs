//! Integer lattices cut out by constraint rows, their wedge (Plücker)
//! vectors, and reduction.
//!
//! Two independent routes produce the saturated integer kernel of a full-rank
//! integer matrix:
//!
//! * [`lambda_v`] / [`lambda_pair`] build a rational kernel basis by Cramer's
//!   rule and then saturate it prime by prime: while the basis is dependent
//!   mod `p`, replace one vector by `(sum c_i x_i) / p`.
//! * [`kernel_oracle`] reduces columns by unimodular operations (HNF style)
//!   and reads the kernel off the transformation matrix.
//!
//! Determinants are compared exactly: `det(L)^2 = |wedge|^2 / content^2`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::field::{self, FieldSpec, OrderElement};
use crate::intmat::{self, Mat};
use crate::numeric;
use crate::primes;

/// Exact enumeration of successive minima is attempted up to this rank.
pub const MAX_ENUM_RANK: usize = 10;
const ENUM_BUDGET: usize = 2_000_000;

/// A lattice given by a basis of row vectors in Z^n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntLattice {
    basis: Mat,
    ambient: usize,
}

impl IntLattice {
    /// Basis rows must be linearly independent.
    pub fn new(basis: Mat, ambient: usize) -> Result<Self> {
        if basis.iter().any(|r| r.len() != ambient) {
            return Err(Error::DimensionMismatch {
                expected: ambient,
                got: basis
                    .iter()
                    .map(Vec::len)
                    .find(|&l| l != ambient)
                    .unwrap_or(0),
            });
        }
        if intmat::rank(&basis) != basis.len() {
            return Err(Error::DependentRows);
        }
        Ok(IntLattice { basis, ambient })
    }

    pub fn from_i64(rows: &[Vec<i64>]) -> Result<Self> {
        let n = rows.first().map_or(0, Vec::len);
        Self::new(intmat::to_big(rows), n)
    }

    pub fn basis(&self) -> &Mat {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Coefficients of `x` in the basis, if `x` lies in the lattice.
    pub fn coordinates(&self, x: &[BigInt]) -> Option<Vec<BigInt>> {
        let r = self.rank();
        let n = self.ambient;
        // solve B^T c = x over Q
        let mut a: Vec<Vec<BigRational>> = (0..n)
            .map(|j| {
                let mut row: Vec<BigRational> = (0..r)
                    .map(|i| BigRational::from(self.basis[i][j].clone()))
                    .collect();
                row.push(BigRational::from(x[j].clone()));
                row
            })
            .collect();
        let mut piv_cols = Vec::new();
        let mut row = 0;
        for c in 0..r {
            let Some(p) = (row..n).find(|&i| !a[i][c].is_zero()) else {
                continue;
            };
            a.swap(row, p);
            let inv = a[row][c].recip();
            for v in a[row].iter_mut() {
                *v = &*v * &inv;
            }
            for i in 0..n {
                if i != row && !a[i][c].is_zero() {
                    let f = a[i][c].clone();
                    for j in 0..=r {
                        let t = &a[row][j] * &f;
                        a[i][j] -= t;
                    }
                }
            }
            piv_cols.push(c);
            row += 1;
        }
        if a[row..].iter().any(|rw| !rw[r].is_zero()) {
            return None;
        }
        let mut c = vec![BigInt::zero(); r];
        for (i, &pc) in piv_cols.iter().enumerate() {
            let v = &a[i][r];
            if !v.is_integer() {
                return None;
            }
            c[pc] = v.to_integer();
        }
        Some(c)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.coordinates(x).is_some()
    }

    /// Both bases span the same subgroup of Z^n.
    pub fn same_as(&self, other: &IntLattice) -> bool {
        self.rank() == other.rank()
            && self.ambient == other.ambient
            && self.basis.iter().all(|b| other.contains(b))
            && other.basis.iter().all(|b| self.contains(b))
    }
}

/// Maximal minors of a constraint matrix in colexicographic column order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WedgeVec {
    pub entries: Vec<BigInt>,
    pub rows: usize,
    pub n: usize,
}

impl WedgeVec {
    pub fn norm_sq(&self) -> BigInt {
        self.entries.iter().map(|x| x * x).sum()
    }

    /// gcd of the entries.
    pub fn content(&self) -> BigInt {
        intmat::content(&self.entries)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }
}

/// All `k`-subsets of `0..n` in colexicographic order.
pub fn colex_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(n: usize, k: usize) -> Vec<Vec<usize>> {
        if k == 0 {
            return vec![Vec::new()];
        }
        let mut out = Vec::new();
        // colex: ordered by largest element first
        for top in k - 1..n {
            for mut s in rec(top, k - 1) {
                s.push(top);
                out.push(s);
            }
        }
        out
    }
    rec(n, k)
}

/// Maximal minors of `rows` (m x n, m <= n) in colex column order.
pub fn minors(rows: &Mat) -> Vec<BigInt> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    colex_subsets(n, m)
        .into_iter()
        .map(|cols| {
            let sub: Mat = rows
                .iter()
                .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
                .collect();
            intmat::det(&sub)
        })
        .collect()
}

fn nonzero(v: &OrderElement) -> Result<()> {
    if v.is_zero() {
        Err(Error::ZeroVector)
    } else {
        Ok(())
    }
}

/// Wedge vector of the `k` constraint rows of `v`.
pub fn wedge(ctx: &FieldSpec, v: &OrderElement) -> Result<WedgeVec> {
    nonzero(v)?;
    let rows = field::constraint_rows(ctx, v)?;
    Ok(WedgeVec {
        entries: minors(&rows),
        rows: ctx.k(),
        n: ctx.n(),
    })
}

/// Stacked constraint rows of a pair (`2k` x `n`).
pub fn pair_rows(ctx: &FieldSpec, v1: &OrderElement, v2: &OrderElement) -> Result<Mat> {
    if 2 * ctx.k() > ctx.n() {
        return Err(Error::Invalid(format!(
            "pair needs 2k <= n (k = {}, n = {})",
            ctx.k(),
            ctx.n()
        )));
    }
    let mut rows = field::constraint_rows(ctx, v1)?;
    rows.extend(field::constraint_rows(ctx, v2)?);
    Ok(rows)
}

/// Wedge vector of the `2k` stacked constraint rows of a pair.
pub fn wedge_pair(ctx: &FieldSpec, v1: &OrderElement, v2: &OrderElement) -> Result<WedgeVec> {
    nonzero(v1)?;
    nonzero(v2)?;
    let rows = pair_rows(ctx, v1, v2)?;
    Ok(WedgeVec {
        entries: minors(&rows),
        rows: 2 * ctx.k(),
        n: ctx.n(),
    })
}

/// `det(L)^2 = |w|^2 / content(w)^2`, exact.
pub fn det_squared_formula(w: &WedgeVec) -> Result<BigRational> {
    if w.is_zero() {
        return Err(Error::ZeroWedge);
    }
    let d = w.content();
    Ok(BigRational::new(w.norm_sq(), &d * &d))
}

/// Gram determinant `det(B B^T)`.
pub fn gram_det(l: &IntLattice) -> BigInt {
    intmat::det(&intmat::gram(&l.basis))
}

/// Saturated kernel `{x in Z^n : rows . x = 0}` by Cramer's rule and
/// prime-by-prime saturation. `rows` must have full row rank.
pub fn saturated_kernel(rows: &Mat) -> Result<IntLattice> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    if m == 0 {
        let id = (0..n)
            .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
            .collect();
        return IntLattice::new(id, n);
    }
    if m > n {
        return Err(Error::DependentRows);
    }
    // pivot set with the smallest nonzero minor keeps the saturation cheap
    let mut best: Option<(Vec<usize>, BigInt)> = None;
    for cols in colex_subsets(n, m) {
        let sub: Mat = rows
            .iter()
            .map(|r| cols.iter().map(|&c| r[c].clone()).collect())
            .collect();
        let d = intmat::det(&sub);
        if d.is_zero() {
            continue;
        }
        if best.as_ref().is_none_or(|(_, b)| d.abs() < b.abs()) {
            best = Some((cols, d));
        }
    }
    let Some((piv, delta)) = best else {
        return Err(Error::DependentRows);
    };
    let sub_piv = |replace: Option<(usize, usize)>| -> BigInt {
        let sub: Mat = rows
            .iter()
            .map(|r| {
                piv.iter()
                    .enumerate()
                    .map(|(i, &c)| match replace {
                        Some((pos, col)) if pos == i => r[col].clone(),
                        _ => r[c].clone(),
                    })
                    .collect()
            })
            .collect();
        intmat::det(&sub)
    };
    let free: Vec<usize> = (0..n).filter(|c| !piv.contains(c)).collect();
    let mut basis: Mat = Vec::with_capacity(free.len());
    for &j in &free {
        let mut x = vec![BigInt::zero(); n];
        x[j] = delta.clone();
        for (i, &c) in piv.iter().enumerate() {
            // A_P y = -delta A_j  =>  y_i = -det(A_P with column i -> A_j)
            x[c] = -sub_piv(Some((i, j)));
        }
        let g = intmat::content(&x);
        if !g.is_one() {
            for e in x.iter_mut() {
                *e = &*e / &g;
            }
        }
        basis.push(x);
    }
    if basis.is_empty() {
        return Ok(IntLattice { basis, ambient: n });
    }
    // delta * kernel lies in the span, so only primes of delta can divide the index
    let big_delta = delta
        .abs()
        .to_u128()
        .ok_or_else(|| Error::BudgetExceeded("pivot minor exceeds 128 bits".into()))?;
    let fac = primes::factor_u128(big_delta).map_err(|e| Error::BudgetExceeded(e.to_string()))?;
    for (p, _) in fac {
        loop {
            let red: Vec<Vec<u64>> = basis
                .iter()
                .map(|r| r.iter().map(|x| intmat::mod_p(x, p)).collect())
                .collect();
            let Some(mut c) = intmat::left_dependency_mod_p(&red, p) else {
                break;
            };
            let j = c.iter().position(|&x| x != 0).expect("nonzero dependency");
            let inv = intmat::inv_mod(c[j], p);
            for x in c.iter_mut() {
                *x = *x * inv % p;
            }
            let mut comb = vec![BigInt::zero(); n];
            for (i, &ci) in c.iter().enumerate() {
                if ci != 0 {
                    for (o, b) in comb.iter_mut().zip(&basis[i]) {
                        *o += b * ci;
                    }
                }
            }
            let bp = BigInt::from(p);
            debug_assert!(comb.iter().all(|x| x.is_multiple_of(&bp)));
            basis[j] = comb.into_iter().map(|x| x / &bp).collect();
        }
    }
    Ok(IntLattice { basis, ambient: n })
}

/// The lattice of `x` with `v * x` incomplete (top `k` coordinates zero).
pub fn lambda_v(ctx: &FieldSpec, v: &OrderElement) -> Result<IntLattice> {
    nonzero(v)?;
    let rows = field::constraint_rows(ctx, v)?;
    if intmat::rank(&rows) < rows.len() {
        return Err(Error::DependentRows);
    }
    saturated_kernel(&rows)
}

/// The lattice of `x` with both `v1 * x` and `v2 * x` incomplete.
pub fn lambda_pair(ctx: &FieldSpec, v1: &OrderElement, v2: &OrderElement) -> Result<IntLattice> {
    nonzero(v1)?;
    nonzero(v2)?;
    let rows = pair_rows(ctx, v1, v2)?;
    let rank = intmat::rank(&rows);
    if rank < rows.len() {
        return Err(Error::DegeneratePair {
            rank,
            expected: rows.len(),
        });
    }
    saturated_kernel(&rows)
}

/// Saturated integer kernel by unimodular column reduction.
pub fn kernel_oracle(rows: &Mat) -> Result<IntLattice> {
    let m = rows.len();
    let n = rows.first().map_or(0, Vec::len);
    let mut a: Mat = rows.to_vec();
    let mut u: Mat = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let col_op = |a: &mut Mat, u: &mut Mat, dst: usize, src: usize, q: &BigInt| {
        for r in a.iter_mut() {
            let t = &r[src] * q;
            r[dst] -= t;
        }
        for r in u.iter_mut() {
            let t = &r[src] * q;
            r[dst] -= t;
        }
    };
    let swap_cols = |a: &mut Mat, u: &mut Mat, i: usize, j: usize| {
        for r in a.iter_mut() {
            r.swap(i, j);
        }
        for r in u.iter_mut() {
            r.swap(i, j);
        }
    };
    let mut t = 0;
    for i in 0..m {
        loop {
            let best = (t..n)
                .filter(|&j| !a[i][j].is_zero())
                .min_by_key(|&j| a[i][j].abs());
            let Some(b) = best else { break };
            swap_cols(&mut a, &mut u, t, b);
            let mut done = true;
            for j in t + 1..n {
                if !a[i][j].is_zero() {
                    let q = a[i][j].div_floor(&a[i][t]);
                    col_op(&mut a, &mut u, j, t, &q);
                    if !a[i][j].is_zero() {
                        done = false;
                    }
                }
            }
            if done {
                break;
            }
        }
        if t >= n || a[i][t].is_zero() {
            return Err(Error::DependentRows);
        }
        t += 1;
    }
    let basis: Mat = (t..n)
        .map(|j| u.iter().map(|r| r[j].clone()).collect())
        .collect();
    Ok(IntLattice { basis, ambient: n })
}

/// Exact integral LLL (delta = 3/4) on independent rows.
pub fn lll(basis: &Mat) -> Mat {
    let r = basis.len();
    if r <= 1 {
        return basis.to_vec();
    }
    let mut b: Mat = basis.to_vec();
    // 1-indexed d and lambda as in the integral algorithm
    let mut d = vec![BigInt::zero(); r + 1];
    let mut lam = vec![vec![BigInt::zero(); r + 1]; r + 1];
    d[0] = BigInt::one();
    d[1] = intmat::dot(&b[0], &b[0]);
    let mut k = 2usize;
    let mut kmax = 1usize;

    fn redi(b: &mut Mat, lam: &mut [Vec<BigInt>], d: &[BigInt], k: usize, l: usize) {
        let two_lam: BigInt = &lam[k][l] * 2;
        if two_lam.abs() > d[l] {
            let q = (&two_lam + &d[l]).div_floor(&(&d[l] * 2));
            let bl = b[l - 1].clone();
            for (x, y) in b[k - 1].iter_mut().zip(&bl) {
                *x -= &q * y;
            }
            let t = &q * &d[l];
            lam[k][l] -= t;
            for i in 1..l {
                let t = &q * &lam[l][i];
                lam[k][i] -= t;
            }
        }
    }

    while k <= r {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = intmat::dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    u = (&d[i] * &u - &lam[k][i] * &lam[j][i]) / &d[i - 1];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    d[k] = u;
                }
            }
        }
        loop {
            redi(&mut b, &mut lam, &d, k, k - 1);
            let lhs: BigInt = &d[k] * &d[k - 2] * 4;
            let rhs: BigInt = &d[k - 1] * &d[k - 1] * 3 - &lam[k][k - 1] * &lam[k][k - 1] * 4;
            if lhs < rhs {
                b.swap(k - 1, k - 2);
                for j in 1..k - 1 {
                    let t = lam[k][j].clone();
                    lam[k][j] = lam[k - 1][j].clone();
                    lam[k - 1][j] = t;
                }
                let l = lam[k][k - 1].clone();
                let bb = (&d[k - 2] * &d[k] + &l * &l) / &d[k - 1];
                for i in k + 1..=kmax {
                    let t = lam[i][k].clone();
                    lam[i][k] = (&d[k] * &lam[i][k - 1] - &l * &t) / &d[k - 1];
                    lam[i][k - 1] = (&bb * &t + &l * &lam[i][k]) / &d[k];
                }
                d[k - 1] = bb;
                if k > 2 {
                    k -= 1;
                }
            } else {
                for l in (1..k - 1).rev() {
                    redi(&mut b, &mut lam, &d, k, l);
                }
                k += 1;
                break;
            }
        }
    }
    b
}

fn to_f64(v: &[BigInt]) -> Vec<f64> {
    v.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()
}

/// All nonzero lattice vectors with squared length `<= bound_sq`, one per
/// sign pair, as `(squared length, vector)`. `basis` should be reduced.
pub fn short_vectors(
    basis: &Mat,
    bound_sq: f64,
    budget: usize,
) -> Result<Vec<(BigInt, Vec<BigInt>)>> {
    let r = basis.len();
    let bf: Vec<Vec<f64>> = basis.iter().map(|v| to_f64(v)).collect();
    let mut bstar = bf.clone();
    let mut mu = vec![vec![0.0; r]; r];
    let mut bn = vec![0.0; r];
    for i in 0..r {
        for j in 0..i {
            let dotp: f64 = bf[i].iter().zip(&bstar[j]).map(|(a, b)| a * b).sum();
            mu[i][j] = dotp / bn[j];
            let (left, right) = bstar.split_at_mut(i);
            for (x, y) in right[0].iter_mut().zip(&left[j]) {
                *x -= mu[i][j] * y;
            }
        }
        bn[i] = bstar[i].iter().map(|x| x * x).sum();
    }
    let bound = bound_sq * (1.0 + 1e-9) + 1e-9;
    let mut out = Vec::new();
    let mut coeffs = vec![0i64; r];
    let mut visited = 0usize;

    #[allow(clippy::too_many_arguments)]
    fn rec(
        level: usize,
        rem: f64,
        coeffs: &mut Vec<i64>,
        mu: &[Vec<f64>],
        bn: &[f64],
        basis: &Mat,
        bound_sq: f64,
        out: &mut Vec<(BigInt, Vec<BigInt>)>,
        visited: &mut usize,
        budget: usize,
    ) -> Result<()> {
        *visited += 1;
        if *visited > budget {
            return Err(Error::BudgetExceeded("short vector enumeration".into()));
        }
        let r = coeffs.len();
        let c: f64 = -(level + 1..r)
            .map(|j| mu[j][level] * coeffs[j] as f64)
            .sum::<f64>();
        let w = (rem.max(0.0) / bn[level]).sqrt();
        let lo = (c - w).ceil() as i64;
        let hi = (c + w).floor() as i64;
        for x in lo..=hi {
            let used = (x as f64 - c).powi(2) * bn[level];
            if used > rem * (1.0 + 1e-12) + 1e-12 {
                continue;
            }
            coeffs[level] = x;
            if level == 0 {
                if coeffs.iter().all(|&c| c == 0) {
                    continue;
                }
                // one representative per +-pair: last nonzero coefficient positive
                if *coeffs.iter().rev().find(|&&c| c != 0).unwrap() < 0 {
                    continue;
                }
                let n = basis[0].len();
                let mut v = vec![BigInt::zero(); n];
                for (ci, b) in coeffs.iter().zip(basis) {
                    if *ci != 0 {
                        for (o, y) in v.iter_mut().zip(b) {
                            *o += y * *ci;
                        }
                    }
                }
                let nsq: BigInt = v.iter().map(|x| x * x).sum();
                if nsq.to_f64().unwrap_or(f64::INFINITY) <= bound_sq {
                    out.push((nsq, v));
                }
            } else {
                rec(
                    level - 1,
                    rem - used,
                    coeffs,
                    mu,
                    bn,
                    basis,
                    bound_sq,
                    out,
                    visited,
                    budget,
                )?;
            }
        }
        coeffs[level] = 0;
        Ok(())
    }
    if r == 0 {
        return Ok(out);
    }
    rec(
        r - 1,
        bound,
        &mut coeffs,
        &mu,
        &bn,
        basis,
        bound,
        &mut out,
        &mut visited,
        budget,
    )?;
    out.sort();
    Ok(out)
}

/// Exact successive minima (squared) and vectors attaining them.
pub fn successive_minima(l: &IntLattice) -> Result<(Vec<BigInt>, Mat)> {
    let r = l.rank();
    if r > MAX_ENUM_RANK {
        return Err(Error::RankTooLarge(r));
    }
    let red = lll(&l.basis);
    let bound = red
        .iter()
        .map(|v| intmat::dot(v, v).to_f64().unwrap_or(f64::INFINITY))
        .fold(0.0, f64::max);
    let cands = short_vectors(&red, bound, ENUM_BUDGET)?;
    let mut chosen: Mat = Vec::new();
    let mut mins = Vec::new();
    for (nsq, v) in cands {
        let mut trial = chosen.clone();
        trial.push(v.clone());
        if intmat::rank(&trial) == trial.len() {
            chosen = trial;
            mins.push(nsq);
            if chosen.len() == r {
                break;
            }
        }
    }
    debug_assert_eq!(chosen.len(), r);
    Ok((mins, chosen))
}

/// Smallest `c` with `|sum a_i z_i| >= c * sum |a_i| |z_i|` guaranteed by the
/// smallest singular value of the normalized basis.
pub fn orthogonality_constant(basis: &Mat) -> f64 {
    let r = basis.len();
    if r == 0 {
        return 1.0;
    }
    let u: Vec<Vec<f64>> = basis
        .iter()
        .map(|v| {
            let f = to_f64(v);
            let n = f.iter().map(|x| x * x).sum::<f64>().sqrt();
            f.into_iter().map(|x| x / n).collect()
        })
        .collect();
    let g: Vec<Vec<f64>> = u
        .iter()
        .map(|a| {
            u.iter()
                .map(|b| a.iter().zip(b).map(|(x, y)| x * y).sum())
                .collect()
        })
        .collect();
    numeric::min_eigenvalue(&g).max(0.0).sqrt() / (r as f64).sqrt()
}

/// A reduced basis with exact minima when available.
#[derive(Debug, Clone)]
pub struct ReducedBasis {
    pub basis: Mat,
    /// Squared successive minima (exact when `minima_exact`).
    pub minima_sq: Vec<BigInt>,
    pub minima_exact: bool,
    /// `|z_i| / Z_i`.
    pub ratios: Vec<f64>,
    pub ortho_const: f64,
}

pub fn reduced_basis(l: &IntLattice) -> ReducedBasis {
    let red = lll(&l.basis);
    let mut sorted = red.clone();
    sorted.sort_by_key(|v| intmat::dot(v, v));
    let (basis, minima_sq, exact) = match successive_minima(l) {
        Ok((mins, vecs)) => {
            // minima vectors are a basis only if they generate the full lattice
            let cand = IntLattice {
                basis: vecs.clone(),
                ambient: l.ambient,
            };
            let basis = if gram_det(&cand) == gram_det(l) {
                vecs
            } else {
                sorted
            };
            (basis, mins, true)
        }
        Err(_) => {
            let mins = sorted.iter().map(|v| intmat::dot(v, v)).collect();
            (sorted, mins, false)
        }
    };
    let ratios = basis
        .iter()
        .zip(&minima_sq)
        .map(|(v, m)| (intmat::dot(v, v).to_f64().unwrap() / m.to_f64().unwrap()).sqrt())
        .collect();
    let ortho_const = orthogonality_constant(&basis);
    ReducedBasis {
        basis,
        minima_sq,
        minima_exact: exact,
        ratios,
        ortho_const,
    }
}

/// Reduced basis of the lattice of `v` whose first and `(k+1)`-th vectors
/// have a nonzero pair wedge.
#[derive(Debug, Clone)]
pub struct NiceBasis {
    pub basis: Vec<OrderElement>,
    pub minima_sq: Vec<BigInt>,
    pub ratios: Vec<f64>,
    pub ortho_const: f64,
    /// Coefficients on `z_1..z_k` added to `z_{k+1}` (all zero if untouched).
    pub adjustment: Vec<i64>,
    pub pair_wedge_norm_sq: BigInt,
}

pub fn nice_basis(ctx: &FieldSpec, v: &OrderElement) -> Result<NiceBasis> {
    let k = ctx.k();
    if k == 0 || ctx.n() < 2 * k + 1 {
        return Err(Error::Invalid(format!(
            "nice basis needs 1 <= k and n >= 2k + 1 (n = {}, k = {k})",
            ctx.n()
        )));
    }
    let l = lambda_v(ctx, v)?;
    let rb = reduced_basis(&l);
    let z: Vec<OrderElement> = rb.basis.iter().map(|b| OrderElement(b.clone())).collect();
    let try_adjust = |lam: &[i64]| -> Result<Option<(OrderElement, BigInt)>> {
        let mut cand = z[k].0.clone();
        for (i, &c) in lam.iter().enumerate() {
            if c != 0 {
                for (o, y) in cand.iter_mut().zip(&z[i].0) {
                    *o += y * c;
                }
            }
        }
        let cand = OrderElement(cand);
        let w = wedge_pair(ctx, &z[0], &cand)?;
        Ok((!w.is_zero()).then(|| (cand, w.norm_sq())))
    };
    for bound in [0i64, 1, 2] {
        let span = (2 * bound + 1) as usize;
        let total = span.pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let lam: Vec<i64> = (0..k)
                .map(|_| {
                    let d = (c % span) as i64 - bound;
                    c /= span;
                    d
                })
                .collect();
            if bound > 0 && lam.iter().all(|x| x.abs() < bound) {
                continue;
            }
            if let Some((cand, wsq)) = try_adjust(&lam)? {
                let mut basis = z.clone();
                basis[k] = cand;
                let rows: Mat = basis.iter().map(|e| e.0.clone()).collect();
                let ratios = rows
                    .iter()
                    .zip(&rb.minima_sq)
                    .map(|(v, m)| {
                        (intmat::dot(v, v).to_f64().unwrap() / m.to_f64().unwrap()).sqrt()
                    })
                    .collect();
                let ortho_const = orthogonality_constant(&rows);
                return Ok(NiceBasis {
                    basis,
                    minima_sq: rb.minima_sq,
                    ratios,
                    ortho_const,
                    adjustment: lam,
                    pair_wedge_norm_sq: wsq,
                });
            }
        }
    }
    Err(Error::SearchExhausted(
        "no combination with |coefficients| <= 2 gives a nonzero pair wedge".into(),
    ))
}

/// Agreement counts of the determinant formula against Gram determinants.
#[derive(Debug, Clone, Default, PartialEq, Eq, serde::Serialize)]
pub struct FormulaCheck {
    pub singles: usize,
    pub singles_agree: usize,
    /// Cramer-and-saturate lattice equals the column-reduction lattice.
    pub oracle_agree: usize,
    pub pairs: usize,
    pub pairs_agree: usize,
    pub degenerate_pairs: usize,
}

impl FormulaCheck {
    pub fn passed(&self) -> bool {
        self.singles_agree == self.singles
            && self.oracle_agree == self.singles
            && self.pairs_agree == self.pairs
    }
}

/// Checks `det(L)^2 = |wedge|^2 / content^2` on `samples` random vectors with
/// entries in `[-bound, bound]`, and on consecutive pairs when `2k <= n`.
pub fn formula_check(
    ctx: &FieldSpec,
    samples: usize,
    bound: i64,
    seed: u64,
) -> Result<FormulaCheck> {
    use rand::Rng;
    let n = ctx.n();
    let mut rng = numeric::stream_rng(seed, 0);
    let mut draw = || loop {
        let v: Vec<i64> = (0..n).map(|_| rng.gen_range(-bound..=bound)).collect();
        if v.iter().any(|&x| x != 0) {
            return OrderElement::from_i64(&v);
        }
    };
    let mut out = FormulaCheck::default();
    let pairs = ctx.k() > 0 && 2 * ctx.k() < n;
    for _ in 0..samples {
        let v = draw();
        let l = lambda_v(ctx, &v)?;
        out.singles += 1;
        let formula = det_squared_formula(&wedge(ctx, &v)?)?;
        if formula == BigRational::from_integer(gram_det(&l)) {
            out.singles_agree += 1;
        }
        if kernel_oracle(&field::constraint_rows(ctx, &v)?)?.same_as(&l) {
            out.oracle_agree += 1;
        }
        if pairs {
            let w = draw();
            match lambda_pair(ctx, &v, &w) {
                Ok(lp) => {
                    out.pairs += 1;
                    if det_squared_formula(&wedge_pair(ctx, &v, &w)?)?
                        == BigRational::from_integer(gram_det(&lp))
                    {
                        out.pairs_agree += 1;
                    }
                }
                Err(Error::DegeneratePair { .. }) => out.degenerate_pairs += 1,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(out)
}

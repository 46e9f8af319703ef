//! Arithmetic in the order Z[w] = Z[X]/(f) for a monic irreducible `f`.
//!
//! Elements are coefficient vectors in the power basis, constant term first.
//! Multiplication by a fixed `v` is the integer matrix whose column `i` is
//! `v * w^i`; its determinant is the norm, and its last `k` rows are the
//! linear constraints that cut out products with vanishing top coordinates.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::intmat::{self, Mat};
use crate::polymodp;
use crate::primes;

/// An element of Z[w], power-basis coordinates, length `n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct OrderElement(pub Vec<BigInt>);

impl OrderElement {
    pub fn from_i64(c: &[i64]) -> Self {
        OrderElement(c.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn zero(n: usize) -> Self {
        OrderElement(vec![BigInt::zero(); n])
    }

    pub fn basis(n: usize, i: usize) -> Self {
        let mut v = Self::zero(n);
        v.0[i] = BigInt::one();
        v
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Coordinates in reverse order.
    pub fn reversed(&self) -> Self {
        OrderElement(self.0.iter().rev().cloned().collect())
    }

    pub fn norm_sq(&self) -> BigInt {
        self.0.iter().map(|x| x * x).sum()
    }
}

/// An element whose last `k` coordinates vanish.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncompleteVec(OrderElement);

impl IncompleteVec {
    /// Pads the `n - k` free coordinates with `k` zeros.
    pub fn new(ctx: &FieldSpec, free: &[BigInt]) -> Result<Self> {
        if free.len() != ctx.free_dim() {
            return Err(Error::DimensionMismatch {
                expected: ctx.free_dim(),
                got: free.len(),
            });
        }
        let mut c = free.to_vec();
        c.resize(ctx.n(), BigInt::zero());
        Ok(IncompleteVec(OrderElement(c)))
    }

    pub fn from_element(ctx: &FieldSpec, v: OrderElement) -> Result<Self> {
        if v.len() != ctx.n() {
            return Err(Error::DimensionMismatch {
                expected: ctx.n(),
                got: v.len(),
            });
        }
        if v.0[ctx.free_dim()..].iter().any(|x| !x.is_zero()) {
            return Err(Error::Invalid("top k coordinates must vanish".into()));
        }
        Ok(IncompleteVec(v))
    }

    pub fn element(&self) -> &OrderElement {
        &self.0
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldSpecJson {
    f: Vec<i64>,
    k: usize,
}

/// A monic irreducible `f` of degree `n >= 2` together with `k`, the number
/// of vanishing top coordinates, and precomputed multiplication data.
#[derive(Debug)]
pub struct FieldSpec {
    f: Vec<i64>,
    k: usize,
    theta: Option<i64>,
    disc: BigInt,
    /// `powers[m]` = reduction of `w^m`, for `m < 2n - 1`.
    powers: Vec<Vec<BigInt>>,
    norm_poly: OnceLock<std::result::Result<NormPoly, Error>>,
}

impl Clone for FieldSpec {
    fn clone(&self) -> Self {
        FieldSpec {
            f: self.f.clone(),
            k: self.k,
            theta: self.theta,
            disc: self.disc.clone(),
            powers: self.powers.clone(),
            norm_poly: OnceLock::new(),
        }
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.f == other.f && self.k == other.k
    }
}

impl Serialize for FieldSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FieldSpecJson {
            f: self.f.clone(),
            k: self.k,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FieldSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FieldSpecJson::deserialize(d)?;
        make_context(&raw.f, raw.k).map_err(serde::de::Error::custom)
    }
}

impl FieldSpec {
    pub fn n(&self) -> usize {
        self.f.len() - 1
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Number of free coordinates, `n - k`.
    pub fn free_dim(&self) -> usize {
        self.n() - self.k
    }

    /// Coefficients `c_0..c_n` with `c_n = 1`.
    pub fn coeffs(&self) -> &[i64] {
        &self.f
    }

    /// `Some(theta)` when `f = X^n - theta`.
    pub fn pure_theta(&self) -> Option<i64> {
        self.theta
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.disc
    }

    /// A prime is bad when it divides the discriminant of `f`.
    pub fn is_bad_prime(&self, p: u64) -> bool {
        (&self.disc % BigInt::from(p)).is_zero()
    }

    /// Same field with a different `k`.
    pub fn with_k(&self, k: usize) -> Result<FieldSpec> {
        if k >= self.n() {
            return Err(Error::Invalid(format!(
                "k = {k} must be below n = {}",
                self.n()
            )));
        }
        let mut c = self.clone();
        c.k = k;
        Ok(c)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("field spec serializes")
    }

    pub fn from_json(s: &str) -> Result<FieldSpec> {
        let raw: FieldSpecJson =
            serde_json::from_str(s).map_err(|e| Error::Invalid(e.to_string()))?;
        make_context(&raw.f, raw.k)
    }

    /// Reduced power `w^m` for `m <= 2n - 2`.
    pub fn power(&self, m: usize) -> &[BigInt] {
        &self.powers[m]
    }

    /// The norm form as an explicit polynomial in the `n - k` free coordinates.
    pub fn norm_poly(&self) -> Result<&NormPoly> {
        self.norm_poly
            .get_or_init(|| NormPoly::build(self))
            .as_ref()
            .map_err(Clone::clone)
    }
}

/// Validates `f` (monic, degree >= 2, squarefree, no rational root, no
/// complete splitting modulo three small good primes) and precomputes the
/// multiplication tables.
pub fn make_context(f: &[i64], k: usize) -> Result<FieldSpec> {
    if f.last() != Some(&1) {
        return Err(Error::NonMonic);
    }
    let n = f.len() - 1;
    if n < 2 {
        return Err(Error::DegenerateDegree);
    }
    if k >= n {
        return Err(Error::Invalid(format!("k = {k} must be below n = {n}")));
    }
    let fb: Vec<BigInt> = f.iter().map(|&c| BigInt::from(c)).collect();
    let deriv: Vec<BigInt> = (1..=n).map(|i| BigInt::from(i as i64) * &fb[i]).collect();
    let sign: i32 = if (n * (n - 1) / 2) % 2 == 0 { 1 } else { -1 };
    let disc: BigInt = resultant(&fb, &deriv) * sign;
    if disc.is_zero() {
        return Err(Error::ReducibleDetected("repeated factor".into()));
    }
    if let Some(r) = integer_root(f) {
        return Err(Error::ReducibleDetected(format!("rational root {r}")));
    }
    spot_check_irreducible(f, &disc)?;

    let theta = (f[1..n].iter().all(|&c| c == 0)).then(|| -f[0]);
    let mut powers = Vec::with_capacity(2 * n - 1);
    let mut cur = vec![BigInt::zero(); n];
    cur[0] = BigInt::one();
    for _ in 0..2 * n - 1 {
        powers.push(cur.clone());
        // multiply by w: shift up and fold the overflow with -c_i
        let top = cur[n - 1].clone();
        for i in (1..n).rev() {
            cur[i] = &cur[i - 1] - &top * &fb[i];
        }
        cur[0] = -&top * &fb[0];
    }
    Ok(FieldSpec {
        f: f.to_vec(),
        k,
        theta,
        disc,
        powers,
        norm_poly: OnceLock::new(),
    })
}

fn integer_root(f: &[i64]) -> Option<i64> {
    let c0 = f[0];
    if c0 == 0 {
        return Some(0);
    }
    let eval = |x: i64| -> BigInt { f.iter().rev().fold(BigInt::zero(), |acc, &c| acc * x + c) };
    let mut divs = vec![1u64];
    for (p, e) in primes::factor_u64(c0.unsigned_abs()) {
        let cur = divs.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            divs.extend(cur.iter().map(|d| d * pk));
        }
    }
    for d in divs {
        for cand in [d as i64, -(d as i64)] {
            if eval(cand).is_zero() {
                return Some(cand);
            }
        }
    }
    None
}

fn spot_check_irreducible(f: &[i64], disc: &BigInt) -> Result<()> {
    let n = f.len() - 1;
    let mut patterns = Vec::new();
    let mut p = n as u64 + 1;
    while patterns.len() < 3 {
        if primes::is_prime_u64(p) && !(disc % BigInt::from(p)).is_zero() {
            patterns.push(polymodp::degree_pattern(&polymodp::from_int(f, p), p));
        }
        p += 1;
    }
    if patterns.iter().all(|pat| pat.len() == n) {
        return Err(Error::ReducibleDetected(
            "splits completely modulo three small primes".into(),
        ));
    }
    Ok(())
}

/// Degree sums of sub-multisets of a degree pattern, excluding 0 and the total.
pub fn proper_subset_sums(pattern: &[u32]) -> Vec<u32> {
    let total: u32 = pattern.iter().sum();
    let mut reach = vec![false; total as usize + 1];
    reach[0] = true;
    for &d in pattern {
        for s in (d as usize..=total as usize).rev() {
            if reach[s - d as usize] {
                reach[s] = true;
            }
        }
    }
    (1..total).filter(|&s| reach[s as usize]).collect()
}

/// Resultant of two integer polynomials (low degree first) via the
/// Sylvester matrix.
pub fn resultant(a: &[BigInt], b: &[BigInt]) -> BigInt {
    let trim = |v: &[BigInt]| -> Vec<BigInt> {
        let mut v = v.to_vec();
        while v.len() > 1 && v.last().is_some_and(Zero::is_zero) {
            v.pop();
        }
        v
    };
    let (a, b) = (trim(a), trim(b));
    let (m, n) = (a.len() - 1, b.len() - 1);
    if m == 0 && n == 0 {
        return BigInt::one();
    }
    let size = m + n;
    let mut s = vec![vec![BigInt::zero(); size]; size];
    for i in 0..n {
        for (j, c) in a.iter().rev().enumerate() {
            s[i][i + j] = c.clone();
        }
    }
    for i in 0..m {
        for (j, c) in b.iter().rev().enumerate() {
            s[n + i][i + j] = c.clone();
        }
    }
    intmat::det(&s)
}

fn check_len(ctx: &FieldSpec, v: &OrderElement) -> Result<()> {
    if v.len() != ctx.n() {
        return Err(Error::DimensionMismatch {
            expected: ctx.n(),
            got: v.len(),
        });
    }
    Ok(())
}

/// Product in Z[w].
pub fn diamond(ctx: &FieldSpec, a: &OrderElement, b: &OrderElement) -> Result<OrderElement> {
    check_len(ctx, a)?;
    check_len(ctx, b)?;
    let n = ctx.n();
    let mut out = vec![BigInt::zero(); n];
    for (i, x) in a.0.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.0.iter().enumerate() {
            if y.is_zero() {
                continue;
            }
            let c = x * y;
            for (o, pw) in out.iter_mut().zip(&ctx.powers[i + j]) {
                if !pw.is_zero() {
                    *o += &c * pw;
                }
            }
        }
    }
    Ok(OrderElement(out))
}

/// Matrix of `x -> v * x`; column `i` is `v * w^i`.
pub fn mul_matrix(ctx: &FieldSpec, v: &OrderElement) -> Result<Mat> {
    check_len(ctx, v)?;
    let n = ctx.n();
    let mut m = vec![vec![BigInt::zero(); n]; n];
    for (j, vj) in v.0.iter().enumerate() {
        if vj.is_zero() {
            continue;
        }
        for i in 0..n {
            for (r, pw) in ctx.powers[i + j].iter().enumerate() {
                if !pw.is_zero() {
                    m[r][i] += vj * pw;
                }
            }
        }
    }
    Ok(m)
}

/// Norm N(v) = det of the multiplication matrix.
pub fn norm(ctx: &FieldSpec, v: &OrderElement) -> Result<BigInt> {
    Ok(intmat::det(&mul_matrix(ctx, v)?))
}

/// Norm of the incomplete vector with free coordinates `x`.
pub fn norm_form(ctx: &FieldSpec, x: &[BigInt]) -> Result<BigInt> {
    let v = IncompleteVec::new(ctx, x)?;
    norm(ctx, v.element())
}

/// The `k` x `n` constraint matrix of `v`: row `i` is the functional giving
/// coordinate `n - 1 - i` (0-indexed) of `v * x`. For a pure field this row
/// equals `T^i(rev v)`.
pub fn constraint_rows(ctx: &FieldSpec, v: &OrderElement) -> Result<Mat> {
    let m = mul_matrix(ctx, v)?;
    let n = ctx.n();
    Ok((0..ctx.k()).map(|i| m[n - 1 - i].clone()).collect())
}

/// Constraint rows with an explicit count, for pair lattices.
pub fn constraint_rows_k(ctx: &FieldSpec, v: &OrderElement, k: usize) -> Result<Mat> {
    let m = mul_matrix(ctx, v)?;
    let n = ctx.n();
    Ok((0..k).map(|i| m[n - 1 - i].clone()).collect())
}

/// The shift map of a pure field: `T(v)_j = v_{j+1}` and `T(v)_n = theta * v_1`.
pub fn shift_t(theta: i64, v: &OrderElement) -> OrderElement {
    let n = v.len();
    let mut out: Vec<BigInt> = v.0[1..].to_vec();
    out.push(&v.0[0] * theta);
    debug_assert_eq!(out.len(), n);
    OrderElement(out)
}

/// The norm form as an explicit homogeneous polynomial of degree `n` in the
/// free coordinates.
#[derive(Debug, Clone)]
pub struct NormPoly {
    vars: usize,
    terms: Vec<(Vec<u8>, i128)>,
}

impl NormPoly {
    fn build(ctx: &FieldSpec) -> std::result::Result<NormPoly, Error> {
        let n = ctx.n();
        let m = ctx.free_dim();
        let overflow = || Error::BudgetExceeded("norm form coefficients exceed 128 bits".into());
        // entry (r, c) of the multiplication matrix is linear: sum_j x_j * powers[c + j][r]
        let mut entry: Vec<Vec<Vec<i128>>> = vec![vec![vec![0; m]; n]; n];
        for (r, row) in entry.iter_mut().enumerate() {
            for (c, lin) in row.iter_mut().enumerate() {
                for (j, slot) in lin.iter_mut().enumerate() {
                    *slot = ctx.powers[c + j][r].to_i128().ok_or_else(overflow)?;
                }
            }
        }
        type P = BTreeMap<Vec<u8>, i128>;
        let mut dp: Vec<Option<P>> = vec![None; 1 << n];
        let mut one = P::new();
        one.insert(vec![0u8; m], 1);
        dp[0] = Some(one);
        for mask in 0usize..(1 << n) {
            let Some(poly) = dp[mask].take() else {
                continue;
            };
            let row = mask.count_ones() as usize;
            if row == n {
                dp[mask] = Some(poly);
                continue;
            }
            for c in 0..n {
                if mask & (1 << c) != 0 {
                    continue;
                }
                let inversions = (mask >> (c + 1)).count_ones();
                let sign: i128 = if inversions % 2 == 0 { 1 } else { -1 };
                let lin = &entry[row][c];
                if lin.iter().all(|&x| x == 0) {
                    continue;
                }
                let target = dp[mask | (1 << c)].get_or_insert_with(P::new);
                for (exps, coef) in &poly {
                    for (j, &l) in lin.iter().enumerate() {
                        if l == 0 {
                            continue;
                        }
                        let mut e = exps.clone();
                        e[j] += 1;
                        let add = coef
                            .checked_mul(l)
                            .and_then(|x| x.checked_mul(sign))
                            .ok_or_else(overflow)?;
                        let slot = target.entry(e).or_insert(0);
                        *slot = slot.checked_add(add).ok_or_else(overflow)?;
                    }
                }
            }
        }
        let full = dp[(1 << n) - 1].take().unwrap_or_default();
        let terms = full.into_iter().filter(|(_, c)| *c != 0).collect();
        Ok(NormPoly { vars: m, terms })
    }

    pub fn vars(&self) -> usize {
        self.vars
    }

    pub fn terms(&self) -> &[(Vec<u8>, i128)] {
        &self.terms
    }

    /// Checked evaluation; `None` on overflow.
    pub fn eval_i128(&self, x: &[i64]) -> Option<i128> {
        let mut acc: i128 = 0;
        for (e, c) in &self.terms {
            let mut t = *c;
            for (xi, &ei) in x.iter().zip(e) {
                for _ in 0..ei {
                    t = t.checked_mul(*xi as i128)?;
                }
            }
            acc = acc.checked_add(t)?;
        }
        Some(acc)
    }

    pub fn eval_big(&self, x: &[BigInt]) -> BigInt {
        let mut acc = BigInt::zero();
        for (e, c) in &self.terms {
            let mut t = BigInt::from(*c);
            for (xi, &ei) in x.iter().zip(e) {
                for _ in 0..ei {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Evaluation with a checked fast path.
    pub fn eval(&self, x: &[i64]) -> BigInt {
        match self.eval_i128(x) {
            Some(v) => BigInt::from(v),
            None => self.eval_big(&x.iter().map(|&v| BigInt::from(v)).collect::<Vec<_>>()),
        }
    }

    /// Coefficients reduced mod `p`, for repeated evaluation.
    pub fn reduce_mod(&self, p: u64) -> Vec<(Vec<u8>, u64)> {
        self.terms
            .iter()
            .map(|(e, c)| (e.clone(), c.rem_euclid(p as i128) as u64))
            .filter(|(_, c)| *c != 0)
            .collect()
    }
}

/// Evaluate reduced norm-form terms at `x` mod `p`.
pub fn eval_terms_mod(terms: &[(Vec<u8>, u64)], x: &[u64], p: u64) -> u64 {
    let mut acc = 0u64;
    for (e, c) in terms {
        let mut t = *c;
        for (xi, &ei) in x.iter().zip(e) {
            for _ in 0..ei {
                t = t * xi % p;
            }
        }
        acc = (acc + t) % p;
    }
    acc
}

impl std::fmt::Display for OrderElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    /// Schoolbook product followed by long division by monic `f`.
    fn oracle_mul(f: &[i64], a: &[i64], b: &[i64]) -> Vec<BigInt> {
        let n = f.len() - 1;
        let mut prod = vec![BigInt::zero(); 2 * n - 1];
        for i in 0..n {
            for j in 0..n {
                prod[i + j] += BigInt::from(a[i]) * b[j];
            }
        }
        for d in (n..prod.len()).rev() {
            let c = prod[d].clone();
            for (i, &fi) in f.iter().enumerate() {
                prod[d - n + i] -= &c * fi;
            }
        }
        prod.truncate(n);
        prod
    }

    #[test]
    fn rejects_bad_polynomials() {
        assert_eq!(make_context(&[-2, 0, 2], 0).unwrap_err(), Error::NonMonic);
        assert_eq!(
            make_context(&[3, 1], 0).unwrap_err(),
            Error::DegenerateDegree
        );
        assert!(matches!(
            make_context(&[-4, 0, 1], 0),
            Err(Error::ReducibleDetected(_))
        ));
        assert!(matches!(
            make_context(&[1, 2, 1], 0),
            Err(Error::ReducibleDetected(_))
        ));
        assert!(matches!(
            make_context(&[-2, 0, 0, 1], 3),
            Err(Error::Invalid(_))
        ));
    }

    #[test]
    fn discriminants() {
        // disc(X^2 + 1) = -4, disc(X^3 - 2) = -108, disc(X^3 - X - 1) = -23
        assert_eq!(
            *make_context(&[1, 0, 1], 0).unwrap().discriminant(),
            BigInt::from(-4)
        );
        assert_eq!(
            *make_context(&[-2, 0, 0, 1], 1).unwrap().discriminant(),
            BigInt::from(-108)
        );
        assert_eq!(
            *make_context(&[-1, -1, 0, 1], 0).unwrap().discriminant(),
            BigInt::from(-23)
        );
    }

    #[test]
    fn x4_minus_2_examples() {
        let ctx = make_context(&[-2, 0, 0, 0, 1], 1).unwrap();
        assert_eq!(ctx.pure_theta(), Some(2));
        let w = OrderElement::from_i64(&[0, 1, 0, 0]);
        assert_eq!(
            diamond(&ctx, &w, &w).unwrap(),
            OrderElement::from_i64(&[0, 0, 1, 0])
        );
        let w3 = OrderElement::from_i64(&[0, 0, 0, 1]);
        assert_eq!(
            diamond(&ctx, &w3, &w).unwrap(),
            OrderElement::from_i64(&[2, 0, 0, 0])
        );
        assert_eq!(norm(&ctx, &w).unwrap(), BigInt::from(-2));
        assert_eq!(
            norm(&ctx, &OrderElement::from_i64(&[1, 0, 0, 0])).unwrap(),
            BigInt::one()
        );
    }

    #[test]
    fn json_roundtrip_and_unknown_keys() {
        let ctx = FieldSpec::from_json(r#"{"f":[-2,0,0,1],"k":1}"#).unwrap();
        assert_eq!(ctx.to_json(), r#"{"f":[-2,0,0,1],"k":1}"#);
        assert!(FieldSpec::from_json(r#"{"f":[-2,0,0,1],"k":1,"x":3}"#).is_err());
    }

    #[test]
    fn pure_constraint_rows_are_shifts_of_reverse() {
        let ctx = make_context(&[-3, 0, 0, 0, 0, 1], 3).unwrap();
        let v = OrderElement::from_i64(&[2, -1, 4, 0, 7]);
        let rows = constraint_rows(&ctx, &v).unwrap();
        let mut t = v.reversed();
        for row in rows {
            assert_eq!(row, t.0);
            t = shift_t(3, &t);
        }
    }

    #[test]
    fn coordinate_formula_pure_case() {
        // c_j = T^{n-j}(rev b) . a, 1-indexed j
        let ctx = make_context(&[-2, 0, 0, 0, 1], 0).unwrap();
        let a = OrderElement::from_i64(&[3, -1, 2, 5]);
        let b = OrderElement::from_i64(&[1, 4, 0, -2]);
        let c = diamond(&ctx, &a, &b).unwrap();
        let n = 4;
        for j in 1..=n {
            let mut t = b.reversed();
            for _ in 0..n - j {
                t = shift_t(2, &t);
            }
            assert_eq!(c.0[j - 1], intmat::dot(&t.0, &a.0));
        }
    }

    #[test]
    fn norm_poly_matches_determinant() {
        for (f, k) in [
            (vec![-2i64, 0, 0, 0, 1], 1usize),
            (vec![-1, -1, 0, 1], 0),
            (vec![1, 1, 0, 0, 1], 2),
        ] {
            let ctx = make_context(&f, k).unwrap();
            let np = ctx.norm_poly().unwrap();
            for seed in 0..30i64 {
                let x: Vec<i64> = (0..ctx.free_dim() as i64)
                    .map(|i| (seed * 7 + i * 13) % 11 - 5)
                    .collect();
                assert_eq!(np.eval(&x), norm_form(&ctx, &big(&x)).unwrap());
            }
        }
    }

    fn fields() -> Vec<Vec<i64>> {
        vec![
            vec![1, 0, 1],
            vec![-2, 0, 0, 1],
            vec![-1, -1, 0, 1],
            vec![-2, 0, 0, 0, 1],
            vec![1, 1, 0, 0, 1],
            vec![-3, 0, 0, 0, 0, 0, 1],
        ]
    }

    proptest! {
        #[test]
        fn diamond_matches_oracle(fi in 0usize..6, seed in proptest::collection::vec(-50i64..50, 14)) {
            let f = &fields()[fi];
            let n = f.len() - 1;
            let ctx = make_context(f, 0).unwrap();
            let (a, b) = (&seed[..n], &seed[7..7 + n]);
            let got = diamond(&ctx, &OrderElement::from_i64(a), &OrderElement::from_i64(b)).unwrap();
            prop_assert_eq!(got.0, oracle_mul(f, a, b));
        }

        #[test]
        fn norm_is_resultant_and_multiplicative(fi in 0usize..6, seed in proptest::collection::vec(-9i64..9, 14)) {
            let f = &fields()[fi];
            let n = f.len() - 1;
            let ctx = make_context(f, 0).unwrap();
            let a = OrderElement::from_i64(&seed[..n]);
            let b = OrderElement::from_i64(&seed[7..7 + n]);
            let na = norm(&ctx, &a).unwrap();
            prop_assert_eq!(&na, &resultant(&big(f), &a.0));
            let nb = norm(&ctx, &b).unwrap();
            let nab = norm(&ctx, &diamond(&ctx, &a, &b).unwrap()).unwrap();
            prop_assert_eq!(nab, na * nb);
        }

        #[test]
        fn mul_matrix_columns_are_products(fi in 0usize..6, seed in proptest::collection::vec(-20i64..20, 7)) {
            let f = &fields()[fi];
            let n = f.len() - 1;
            let ctx = make_context(f, 0).unwrap();
            let v = OrderElement::from_i64(&seed[..n]);
            let m = mul_matrix(&ctx, &v).unwrap();
            for i in 0..n {
                let col: Vec<BigInt> = m.iter().map(|r| r[i].clone()).collect();
                prop_assert_eq!(col, diamond(&ctx, &OrderElement::basis(n, i), &v).unwrap().0);
            }
        }
    }
}

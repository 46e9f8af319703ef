//! Exact integer and mod-p matrix routines shared by the lattice and local code.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

pub type Mat = Vec<Vec<BigInt>>;

pub fn to_big(m: &[Vec<i64>]) -> Mat {
    m.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    let mut a: Mat = m.to_vec();
    let mut sign = 1i32;
    let mut prev = BigInt::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(i, k);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                a[i][j] = v / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign < 0 {
        -d
    } else {
        d
    }
}

/// Bareiss determinant in `i128`; `None` on overflow.
pub fn det_i128(m: &[Vec<i128>]) -> Option<i128> {
    let n = m.len();
    if n == 0 {
        return Some(1);
    }
    let mut a = m.to_vec();
    let mut neg = false;
    let mut prev: i128 = 1;
    for k in 0..n - 1 {
        if a[k][k] == 0 {
            match (k + 1..n).find(|&i| a[i][k] != 0) {
                Some(i) => {
                    a.swap(i, k);
                    neg = !neg;
                }
                None => return Some(0),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j]
                    .checked_mul(a[k][k])?
                    .checked_sub(a[i][k].checked_mul(a[k][j])?)?;
                a[i][j] = v / prev;
            }
        }
        prev = a[k][k];
    }
    let d = a[n - 1][n - 1];
    Some(if neg { -d } else { d })
}

/// Rank over Q by fraction-free elimination.
pub fn rank(m: &[Vec<BigInt>]) -> usize {
    let mut a: Mat = m.to_vec();
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let (pr, pi) = (a[r][c].clone(), a[i][c].clone());
            for j in c..cols {
                a[i][j] = &a[i][j] * &pr - &a[r][j] * &pi;
            }
            let g = a[i].iter().fold(BigInt::zero(), |g, x| g.gcd(x));
            if !g.is_zero() && !g.is_one() {
                for x in a[i].iter_mut() {
                    *x = &*x / &g;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// `B * B^T`.
pub fn gram(b: &[Vec<BigInt>]) -> Mat {
    b.iter()
        .map(|x| b.iter().map(|y| dot(x, y)).collect())
        .collect()
}

pub fn dot(x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

pub fn content(v: &[BigInt]) -> BigInt {
    v.iter().fold(BigInt::zero(), |g, x| g.gcd(x)).abs()
}

/// Reduce `x` into `0..p`.
pub fn mod_p(x: &BigInt, p: u64) -> u64 {
    let r = x.mod_floor(&BigInt::from(p));
    u64::try_from(r).expect("residue fits")
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    let (mut t, mut nt) = (0i128, 1i128);
    let (mut r, mut nr) = (p as i128, (a % p) as i128);
    while nr != 0 {
        let q = r / nr;
        (t, nt) = (nt, t - q * nt);
        (r, nr) = (nr, r - q * nr);
    }
    assert_eq!(r, 1, "{a} not invertible mod {p}");
    t.rem_euclid(p as i128) as u64
}

/// Row-reduce in place over F_p; returns the rank.
pub fn rank_mod_p(a: &mut [Vec<u64>], p: u64) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut r = 0;
    for c in 0..cols {
        let Some(piv) = (r..rows).find(|&i| a[i][c] % p != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = inv_mod(a[r][c], p);
        for j in c..cols {
            a[r][j] = a[r][j] * inv % p;
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in c..cols {
                    a[i][j] = (a[i][j] + p - f * a[r][j] % p) % p;
                }
            }
        }
        r += 1;
        if r == rows {
            break;
        }
    }
    r
}

/// Determinant over F_p.
pub fn det_mod_p(m: &[Vec<u64>], p: u64) -> u64 {
    let n = m.len();
    let mut a = m.to_vec();
    let mut d = 1u64;
    for c in 0..n {
        let Some(piv) = (c..n).find(|&i| a[i][c] != 0) else {
            return 0;
        };
        if piv != c {
            a.swap(piv, c);
            d = (p - d) % p;
        }
        d = d * a[c][c] % p;
        let inv = inv_mod(a[c][c], p);
        for i in c + 1..n {
            if a[i][c] != 0 {
                let f = a[i][c] * inv % p;
                for j in c..n {
                    a[i][j] = (a[i][j] + p - f * a[c][j] % p) % p;
                }
            }
        }
    }
    d
}

/// A nonzero vector `c` with `sum c_i * rows_i = 0 (mod p)`, if one exists.
pub fn left_dependency_mod_p(rows: &[Vec<u64>], p: u64) -> Option<Vec<u64>> {
    let r = rows.len();
    let cols = rows.first().map_or(0, |x| x.len());
    // augment with identity to track combinations
    let mut a: Vec<Vec<u64>> = rows
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut v: Vec<u64> = row.iter().map(|x| x % p).collect();
            v.extend((0..r).map(|j| u64::from(i == j)));
            v
        })
        .collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..r).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = inv_mod(a[rank][c], p);
        for j in 0..cols + r {
            a[rank][j] = a[rank][j] * inv % p;
        }
        for i in 0..r {
            if i != rank && a[i][c] != 0 {
                let f = a[i][c];
                for j in 0..cols + r {
                    a[i][j] = (a[i][j] + p - f * a[rank][j] % p) % p;
                }
            }
        }
        rank += 1;
    }
    (rank < r).then(|| a[rank][cols..].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(m: &[&[i64]]) -> Mat {
        m.iter()
            .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
            .collect()
    }

    fn leibniz(m: &[Vec<i64>]) -> i64 {
        let n = m.len();
        if n == 1 {
            return m[0][0];
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<i64>> = m[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|&(c, _)| c != j)
                            .map(|(_, &x)| x)
                            .collect()
                    })
                    .collect();
                let s = if j % 2 == 0 { 1 } else { -1 };
                s * m[0][j] * leibniz(&minor)
            })
            .sum()
    }

    #[test]
    fn det_matches_cofactor_expansion() {
        let m = vec![
            vec![0, 2, -1, 3],
            vec![1, 0, 4, 2],
            vec![-2, 5, 1, 0],
            vec![3, 1, 0, -1],
        ];
        let d = leibniz(&m);
        assert_eq!(det(&to_big(&m)), BigInt::from(d));
        let mi: Vec<Vec<i128>> = m
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        assert_eq!(det_i128(&mi), Some(d as i128));
    }

    #[test]
    fn rank_and_dependency() {
        let m = big(&[&[1, 2, 3], &[2, 4, 6], &[0, 1, 1]]);
        assert_eq!(rank(&m), 2);
        let rows = vec![vec![1, 2, 3], vec![2, 4, 6], vec![0, 1, 1]];
        let c = left_dependency_mod_p(&rows, 7).unwrap();
        for j in 0..3 {
            let s: u64 = (0..3).map(|i| c[i] * rows[i][j]).sum();
            assert_eq!(s % 7, 0);
        }
        assert!(c.iter().any(|&x| x != 0));
    }

    #[test]
    fn det_mod_p_matches() {
        let m = vec![vec![0, 2, 5], vec![1, 0, 4], vec![3, 5, 1]];
        let d = leibniz(&m).rem_euclid(11) as u64;
        let mu: Vec<Vec<u64>> = m
            .iter()
            .map(|r| r.iter().map(|&x| x as u64).collect())
            .collect();
        assert_eq!(det_mod_p(&mu, 11), d);
    }
}

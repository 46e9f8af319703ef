//! Dense polynomials over F_p, coefficients low degree first, `p < 2^32`.

pub type Poly = Vec<u64>;

pub fn from_int(f: &[i64], p: u64) -> Poly {
    let mut v: Poly = f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    trim(&mut v);
    v
}

pub fn trim(a: &mut Poly) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

pub fn degree(a: &Poly) -> Option<usize> {
    a.len().checked_sub(1)
}

pub fn mul(a: &Poly, b: &Poly, p: u64) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + x * y) % p;
        }
    }
    trim(&mut out);
    out
}

pub fn sub(a: &Poly, b: &Poly, p: u64) -> Poly {
    let n = a.len().max(b.len());
    let mut out: Poly = (0..n)
        .map(|i| {
            let x = a.get(i).copied().unwrap_or(0);
            let y = b.get(i).copied().unwrap_or(0);
            (x + p - y) % p
        })
        .collect();
    trim(&mut out);
    out
}

/// Quotient and remainder; `b` must be nonzero.
pub fn divrem(a: &Poly, b: &Poly, p: u64) -> (Poly, Poly) {
    let db = degree(b).expect("division by zero polynomial");
    let inv = crate::intmat::inv_mod(b[db], p);
    let mut r = a.clone();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() > db {
        let dr = r.len() - 1;
        let c = r[dr] * inv % p;
        q[dr - db] = c;
        for i in 0..=db {
            let idx = dr - db + i;
            r[idx] = (r[idx] + p - c * b[i] % p) % p;
        }
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

pub fn rem(a: &Poly, b: &Poly, p: u64) -> Poly {
    divrem(a, b, p).1
}

pub fn make_monic(a: &mut Poly, p: u64) {
    if let Some(&lead) = a.last() {
        let inv = crate::intmat::inv_mod(lead, p);
        for x in a.iter_mut() {
            *x = *x * inv % p;
        }
    }
}

pub fn gcd(a: &Poly, b: &Poly, p: u64) -> Poly {
    let (mut x, mut y) = (a.clone(), b.clone());
    trim(&mut x);
    trim(&mut y);
    while !y.is_empty() {
        let r = rem(&x, &y, p);
        x = y;
        y = r;
    }
    make_monic(&mut x, p);
    x
}

/// `base^e mod m`.
pub fn powmod(base: &Poly, mut e: u64, m: &Poly, p: u64) -> Poly {
    let mut result: Poly = rem(&vec![1], m, p);
    let mut b = rem(base, m, p);
    while e > 0 {
        if e & 1 == 1 {
            result = rem(&mul(&result, &b, p), m, p);
        }
        b = rem(&mul(&b, &b, p), m, p);
        e >>= 1;
    }
    result
}

pub fn derivative(a: &Poly, p: u64) -> Poly {
    let mut d: Poly = a
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| (i as u64 % p) * c % p)
        .collect();
    trim(&mut d);
    d
}

pub fn eval(a: &Poly, x: u64, p: u64) -> u64 {
    a.iter().rev().fold(0, |acc, &c| (acc * x + c) % p)
}

/// Degrees of the irreducible factors of a squarefree monic `f`, sorted,
/// by distinct-degree factorization.
pub fn degree_pattern(f: &Poly, p: u64) -> Vec<u32> {
    let mut out = Vec::new();
    let mut g = f.clone();
    make_monic(&mut g, p);
    let x: Poly = vec![0, 1];
    let mut h = rem(&x, &g, p);
    let mut d = 1u32;
    while degree(&g).unwrap_or(0) >= 2 * d as usize {
        h = powmod(&h, p, &g, p);
        let common = gcd(&g, &sub(&h, &x, p), p);
        let dc = degree(&common).unwrap_or(0);
        if dc > 0 {
            out.extend(std::iter::repeat(d).take(dc / d as usize));
            g = divrem(&g, &common, p).0;
            h = rem(&h, &g, p);
        }
        d += 1;
    }
    if let Some(dg) = degree(&g) {
        if dg > 0 {
            out.push(dg as u32);
        }
    }
    out.sort_unstable();
    out
}

/// Number of distinct roots of `f` in F_p.
pub fn root_count(f: &Poly, p: u64) -> usize {
    let x: Poly = vec![0, 1];
    let xp = powmod(&x, p, f, p);
    degree(&gcd(f, &sub(&xp, &x, p), p)).unwrap_or(0)
}

/// Roots of `f` in F_p by exhaustive evaluation, ascending.
pub fn roots_bruteforce(f: &Poly, p: u64) -> Vec<u64> {
    (0..p).filter(|&x| eval(f, x, p) == 0).collect()
}

/// Monic irreducible factors of degree `d` of `f`, by exhaustive search
/// (intended for tiny `p^d`).
pub fn factors_of_degree_bruteforce(f: &Poly, d: usize, p: u64) -> Vec<Poly> {
    let total = p.pow(d as u32);
    let mut out = Vec::new();
    for code in 0..total {
        let mut g: Poly = Vec::with_capacity(d + 1);
        let mut c = code;
        for _ in 0..d {
            g.push(c % p);
            c /= p;
        }
        g.push(1);
        if rem(f, &g, p).is_empty() && is_irreducible_bruteforce(&g, p) {
            out.push(g);
        }
    }
    out
}

fn is_irreducible_bruteforce(g: &Poly, p: u64) -> bool {
    let dg = degree(g).unwrap_or(0);
    for d in 1..=dg / 2 {
        for code in 0..p.pow(d as u32) {
            let mut h: Poly = Vec::new();
            let mut c = code;
            for _ in 0..d {
                h.push(c % p);
                c /= p;
            }
            h.push(1);
            if rem(g, &h, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pattern_of_x3_minus_2() {
        // mod 5: 3 is the unique cube root of 2, the rest is an irreducible quadratic
        assert_eq!(degree_pattern(&from_int(&[-2, 0, 0, 1], 5), 5), vec![1, 2]);
        // mod 31: 2 is a cube (4^3 = 64 = 2), and 31 = 1 mod 3 so it splits
        assert_eq!(
            degree_pattern(&from_int(&[-2, 0, 0, 1], 31), 31),
            vec![1, 1, 1]
        );
        // mod 7: the cubes are 0, 1, 6, so no root and the cubic is irreducible
        assert_eq!(degree_pattern(&from_int(&[-2, 0, 0, 1], 7), 7), vec![3]);
    }

    #[test]
    fn pattern_agrees_with_bruteforce_roots() {
        let f = [-1, -1, 0, 1]; // X^3 - X - 1
        for p in [5u64, 7, 11, 13, 17, 19, 29, 37, 41, 43] {
            let fp = from_int(&f, p);
            let pat = degree_pattern(&fp, p);
            assert_eq!(pat.iter().sum::<u32>(), 3);
            let ones = pat.iter().filter(|&&d| d == 1).count();
            assert_eq!(ones, roots_bruteforce(&fp, p).len(), "p={p}");
            assert_eq!(ones, root_count(&fp, p));
        }
    }

    #[test]
    fn divrem_identity() {
        let p = 13;
        let a = from_int(&[3, 5, -2, 7, 1, 9], p);
        let b = from_int(&[2, 0, 1], p);
        let (q, r) = divrem(&a, &b, p);
        let back = {
            let mut s = mul(&q, &b, p);
            s.resize(a.len().max(s.len()), 0);
            let mut t: Poly = s
                .iter()
                .enumerate()
                .map(|(i, &x)| (x + r.get(i).copied().unwrap_or(0)) % p)
                .collect();
            trim(&mut t);
            t
        };
        assert_eq!(back, a);
    }
}

//! Rational primes: sieves, Miller-Rabin, Pollard rho factorization.
//!
//! Primality is deterministic below 3.3e24 (first thirteen prime bases) and
//! falls back to 64 fixed pseudo-random rounds above that; the caller learns
//! which regime applied through [`Primality`].

use crate::error::{Error, Result};

/// Threshold below which the thirteen-base Miller-Rabin test is deterministic.
pub const MR_DETERMINISTIC_LIMIT: u128 = 3_317_044_064_679_887_385_961_981;

const TRIAL_LIMIT: u64 = 1_000_000;

/// All primes `<= n`.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

/// Smallest-prime-factor table for `0..=n` (entries 0 and 1 are 0).
pub fn spf_table(n: usize) -> Vec<u32> {
    let mut spf = vec![0u32; n + 1];
    for i in 2..=n {
        if spf[i] == 0 {
            let mut j = i;
            while j <= n {
                if spf[j] == 0 {
                    spf[j] = i as u32;
                }
                j += i;
            }
        }
    }
    spf
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Primality {
    Composite,
    Prime,
    /// Passed 64 rounds above the deterministic range.
    ProbablePrime,
}

impl Primality {
    pub fn is_prime(self) -> bool {
        !matches!(self, Primality::Composite)
    }
}

#[inline]
fn mul_mod64(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod64(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod64(r, b, m);
        }
        b = mul_mod64(b, b, m);
        e >>= 1;
    }
    r
}

fn add_mod128(a: u128, b: u128, m: u128) -> u128 {
    let (s, over) = a.overflowing_add(b);
    if over || s >= m {
        s.wrapping_sub(m)
    } else {
        s
    }
}

fn mul_mod128(a: u128, b: u128, m: u128) -> u128 {
    if let Some(p) = a.checked_mul(b) {
        return p % m;
    }
    let mut r = 0u128;
    let mut a = a % m;
    let mut b = b;
    while b > 0 {
        if b & 1 == 1 {
            r = add_mod128(r, a, m);
        }
        a = add_mod128(a, a, m);
        b >>= 1;
    }
    r
}

fn pow_mod128(mut b: u128, mut e: u128, m: u128) -> u128 {
    let mut r = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod128(r, b, m);
        }
        b = mul_mod128(b, b, m);
        e >>= 1;
    }
    r
}

const SMALL_BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Deterministic for all `u64`.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &SMALL_BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for &a in &SMALL_BASES[..12] {
        let mut x = pow_mod64(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod64(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

fn mr_round128(n: u128, d: u128, s: u32, a: u128) -> bool {
    let mut x = pow_mod128(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod128(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

/// Primality of a `u128`, deterministic below [`MR_DETERMINISTIC_LIMIT`].
pub fn primality_u128(n: u128) -> Primality {
    if n <= u64::MAX as u128 {
        return if is_prime_u64(n as u64) {
            Primality::Prime
        } else {
            Primality::Composite
        };
    }
    for &p in &SMALL_BASES {
        if n % p as u128 == 0 {
            return Primality::Composite;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    for &a in &SMALL_BASES {
        if !mr_round128(n, d, s, a as u128) {
            return Primality::Composite;
        }
    }
    if n < MR_DETERMINISTIC_LIMIT {
        return Primality::Prime;
    }
    // fixed splitmix sequence keeps the answer reproducible
    let mut state = 0x9E37_79B9_7F4A_7C15u64 ^ (n as u64);
    for _ in 0..64 {
        state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        let a = 2 + (z as u128) % (n - 3);
        if !mr_round128(n, d, s, a) {
            return Primality::Composite;
        }
    }
    Primality::ProbablePrime
}

fn gcd64(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Brent's variant of Pollard rho; `n` must be odd and composite.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod64(x, x, n) + c) % n;
        let (mut x, mut y, mut g, mut q) = (2u64, 2u64, 1u64, 1u64);
        let mut ys = y;
        let mut r = 1u64;
        let m = 128u64;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..m.min(r - k) {
                    y = f(y);
                    q = mul_mod64(q, x.abs_diff(y), n);
                }
                g = gcd64(q, n);
                k += m;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_rec(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    factor_rec(d, out);
    factor_rec(n / d, out);
}

fn collect(mut ps: Vec<u64>) -> Vec<(u64, u32)> {
    ps.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in ps {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Prime factorization of a nonzero `u64` as sorted `(p, e)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "cannot factor 0");
    let mut ps = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13] {
        while n % p == 0 {
            ps.push(p);
            n /= p;
        }
    }
    let mut p = 17u64;
    while p * p <= n && p < 1000 {
        while n % p == 0 {
            ps.push(p);
            n /= p;
        }
        p += 2;
    }
    factor_rec(n, &mut ps);
    collect(ps)
}

/// Factorization of a nonzero `u128`: trial division to 10^6, then rho on a
/// cofactor that fits in 64 bits. A composite cofactor above 2^64 is
/// reported as [`Error::FactorizationBudget`].
pub fn factor_u128(mut n: u128) -> Result<Vec<(u64, u32)>> {
    assert!(n > 0, "cannot factor 0");
    if n <= u64::MAX as u128 {
        return Ok(factor_u64(n as u64));
    }
    let mut ps = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT && (p as u128) * (p as u128) <= n {
        while n % p as u128 == 0 {
            ps.push(p);
            n /= p as u128;
        }
        p += if p == 2 { 1 } else { 2 };
        if n <= u64::MAX as u128 {
            break;
        }
    }
    if n <= u64::MAX as u128 {
        let mut out = ps;
        for (q, e) in factor_u64(n as u64) {
            out.extend(std::iter::repeat(q).take(e as usize));
        }
        return Ok(collect(out));
    }
    match primality_u128(n) {
        Primality::Composite => Err(Error::FactorizationBudget(n.to_string())),
        _ => {
            // prime cofactor above 2^64 cannot be represented as u64
            Err(Error::FactorizationBudget(format!(
                "prime cofactor {n} exceeds 64 bits"
            )))
        }
    }
}

/// Number of divisors from a factorization.
pub fn divisor_count(fac: &[(u64, u32)]) -> u64 {
    fac.iter().map(|&(_, e)| e as u64 + 1).product()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn naive_prime(n: u64) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn sieve_matches_trial_division() {
        let ps = primes_up_to(2000);
        let expect: Vec<u64> = (0..=2000).filter(|&n| naive_prime(n)).collect();
        assert_eq!(ps, expect);
    }

    #[test]
    fn miller_rabin_small_range() {
        for n in 0..20_000u64 {
            assert_eq!(is_prime_u64(n), naive_prime(n), "{n}");
        }
    }

    #[test]
    fn strong_pseudoprimes_rejected() {
        // strong pseudoprimes to several small bases
        for n in [
            3_215_031_751u64,
            2_152_302_898_747,
            3_474_749_660_383,
            341_550_071_728_321,
        ] {
            assert!(!is_prime_u64(n));
        }
        assert!(is_prime_u64(18_446_744_073_709_551_557));
    }

    #[test]
    fn u128_primality() {
        let p: u128 = 18_446_744_073_709_551_629; // first prime above 2^64
        assert_eq!(primality_u128(p), Primality::Prime);
        assert_eq!(primality_u128(p * 3), Primality::Composite);
        let q: u128 = 170_141_183_460_469_231_731_687_303_715_884_105_727; // 2^127 - 1
        assert_eq!(primality_u128(q), Primality::ProbablePrime);
    }

    #[test]
    fn factor_roundtrip() {
        for n in [
            1u64,
            2,
            12,
            9_999_991 * 9_999_973,
            600_851_475_143,
            u64::MAX,
        ] {
            let f = factor_u64(n);
            let back: u64 = f.iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(back, n);
            assert!(f.iter().all(|&(p, _)| is_prime_u64(p)));
        }
    }

    #[test]
    fn factor_u128_large() {
        let n: u128 = 999_983u128 * 18_446_744_073_709_551_557u128;
        let f = factor_u128(n).unwrap();
        assert_eq!(f, vec![(999_983, 1), (18_446_744_073_709_551_557, 1)]);
    }

    #[test]
    fn spf_consistent() {
        let spf = spf_table(1000);
        for n in 2..=1000u64 {
            assert_eq!(spf[n as usize] as u64, factor_u64(n)[0].0);
        }
    }
}

//! Acceptance suite: one PASS/FAIL line per criterion on stderr, written
//! directly so the lines survive output capture.

use std::io::Write;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use normform::experiments::{
    polytope_integral, theorem_check, type_i_discrepancy, type_ii_density_check, ExperimentConfig,
    PolytopeSpec,
};
use normform::field::{diamond, make_context, OrderElement};
use normform::geometry::wedge_census;
use normform::lattice::formula_check;
use normform::local::{
    self, buchstab_check, gamma_estimate, nu_bruteforce, nu_fast, primes_above, rho, sieve_sum,
    sieve_target, IdealSym,
};
use normform::primes::primes_up_to;

type Outcome = (bool, String);

fn pure(n: usize, a: i64) -> Vec<i64> {
    let mut f = vec![0; n + 1];
    f[0] = -a;
    f[n] = 1;
    f
}

/// `X^n + 2X + 2`, Eisenstein at 2.
fn mixed(n: usize) -> Vec<i64> {
    let mut f = vec![0; n + 1];
    f[0] = 2;
    f[1] = 2;
    f[n] = 1;
    f
}

/// Schoolbook product reduced by the monic `f`.
fn polymul_mod(a: &[BigInt], b: &[BigInt], f: &[i64]) -> Vec<BigInt> {
    let n = f.len() - 1;
    let mut prod = vec![BigInt::zero(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for d in (n..prod.len()).rev() {
        let c = std::mem::take(&mut prod[d]);
        for (i, &fi) in f[..n].iter().enumerate() {
            prod[d - n + i] -= &c * fi;
        }
    }
    prod.truncate(n);
    prod
}

fn c1_diamond() -> Outcome {
    let fields = [pure(3, 2), mixed(4), pure(5, 3), mixed(7), pure(6, 5)];
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut checked = 0;
    for f in &fields {
        let ctx = make_context(f, 1).unwrap();
        let n = f.len() - 1;
        for _ in 0..2000 {
            let mut draw = || {
                OrderElement::from_i64(
                    &(0..n)
                        .map(|_| rng.gen_range(-1000..=1000))
                        .collect::<Vec<_>>(),
                )
            };
            let (a, b, c) = (draw(), draw(), draw());
            let ab = diamond(&ctx, &a, &b).unwrap();
            let abc = diamond(&ctx, &ab, &c).unwrap();
            let expect_ab = polymul_mod(&a.0, &b.0, f);
            let expect_abc = polymul_mod(&expect_ab, &c.0, f);
            if ab.0 != expect_ab || abc.0 != expect_abc {
                return (false, format!("mismatch in field {f:?}"));
            }
            checked += 1;
        }
    }
    (
        true,
        format!("{checked} triples over {} fields", fields.len()),
    )
}

fn c2_determinant_formula() -> Outcome {
    let mut singles = 0;
    let mut pairs = 0;
    for n in 4..=8 {
        for f in [pure(n, 2), mixed(n)] {
            for k in [1, 2] {
                let ctx = make_context(&f, k).unwrap();
                let r = formula_check(&ctx, 500, 10, (n * 10 + k) as u64).unwrap();
                if !r.passed() {
                    return (false, format!("f = {f:?}, k = {k}: {r:?}"));
                }
                singles += r.singles;
                pairs += r.pairs;
            }
        }
    }
    (
        true,
        format!("{singles} vectors and {pairs} pairs agree exactly"),
    )
}

fn roots_mod(f: &[i64], p: u64) -> Vec<u64> {
    (0..p)
        .filter(|&r| {
            f.iter().rev().fold(0i128, |acc, &c| {
                (acc * r as i128 + c as i128).rem_euclid(p as i128)
            }) == 0
        })
        .collect()
}

fn c3_rho_degree_one() -> Outcome {
    let mut ideals = 0;
    for (f, k) in [(pure(3, 2), 1), (pure(4, 2), 1), (mixed(5), 2)] {
        let ctx = make_context(&f, k).unwrap();
        let m = ctx.free_dim();
        for p in primes_up_to(200)
            .into_iter()
            .filter(|&p| !ctx.is_bad_prime(p))
        {
            let roots = roots_mod(&f, p);
            let deg_one: Vec<_> = primes_above(&ctx, p)
                .unwrap()
                .into_iter()
                .filter(|q| q.degree == 1)
                .collect();
            if deg_one.len() != roots.len() {
                return (
                    false,
                    format!(
                        "p = {p}: {} degree-one ideals, {} roots",
                        deg_one.len(),
                        roots.len()
                    ),
                );
            }
            for q in deg_one {
                if rho(&ctx, &IdealSym::from_primes(&[q])).unwrap() != 1u32.into() {
                    return (false, format!("rho != 1 at p = {p}"));
                }
            }
            // x lies in the prime above (p, theta - r) iff x(r) = 0 mod p
            for r in roots {
                let mut count = 0u64;
                let total = p.pow(m as u32);
                for code in 0..total {
                    let mut c = code;
                    let mut val = 0u64;
                    let mut pw = 1u64;
                    for _ in 0..m {
                        val = (val + (c % p) * pw) % p;
                        pw = pw * r % p;
                        c /= p;
                    }
                    count += u64::from(val == 0);
                }
                if count != p.pow(m as u32 - 1) {
                    return (false, format!("f = {f:?}, p = {p}, r = {r}: count {count}"));
                }
                ideals += 1;
            }
        }
    }
    (true, format!("{ideals} degree-one prime ideals"))
}

/// Degree of the gcd of two polynomials over `F_p` (coefficients low first).
fn gcd_degree(a: &[u64], b: &[u64], p: u64) -> Option<usize> {
    let trim = |mut v: Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let inv = |x: u64| {
        let (mut r, mut b, mut e) = (1u64, x % p, p - 2);
        while e > 0 {
            if e & 1 == 1 {
                r = r * b % p;
            }
            b = b * b % p;
            e >>= 1;
        }
        r
    };
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        while a.len() >= b.len() {
            let c = a[a.len() - 1] * inv(b[b.len() - 1]) % p;
            let shift = a.len() - b.len();
            for (i, &bi) in b.iter().enumerate() {
                a[shift + i] = (a[shift + i] + p - c * bi % p) % p;
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().checked_sub(1)
}

/// `nu(p)` from `p | N(x)` iff `gcd(x, f) != 1` mod `p` (good `p`), one
/// point per line through the origin.
fn nu_by_gcd(f: &[i64], m: usize, p: u64) -> u64 {
    let fp: Vec<u64> = f.iter().map(|&c| c.rem_euclid(p as i64) as u64).collect();
    let mut zeros = 0u64;
    for lead in 0..m {
        let tail = m - lead - 1;
        for code in 0..p.pow(tail as u32) {
            let mut x = vec![0u64; m];
            x[lead] = 1;
            let mut c = code;
            for xj in x.iter_mut().skip(lead + 1) {
                *xj = c % p;
                c /= p;
            }
            if gcd_degree(&fp, &x, p).unwrap() > 0 {
                zeros += 1;
            }
        }
    }
    1 + zeros * (p - 1)
}

fn c4_nu_consistency() -> Outcome {
    let mut checked = 0;
    for (f, k) in [
        (pure(3, 2), 1),
        (pure(4, 2), 1),
        (mixed(4), 1),
        (pure(5, 3), 2),
    ] {
        let ctx = make_context(&f, k).unwrap();
        let m = ctx.free_dim();
        for p in primes_up_to(200)
            .into_iter()
            .filter(|&p| !ctx.is_bad_prime(p))
        {
            let fast = nu_fast(&ctx, p).unwrap();
            let brute = nu_bruteforce(&ctx, p, 1 << 30).unwrap();
            let by_gcd = nu_by_gcd(&f, m, p);
            if fast != brute || fast != by_gcd.into() {
                return (
                    false,
                    format!("f = {f:?}, p = {p}: fast {fast}, brute {brute}, gcd {by_gcd}"),
                );
            }
            checked += 1;
        }
    }
    (true, format!("{checked} (field, p) pairs"))
}

fn smallest_prime_factor(a: u128) -> Option<u128> {
    if a < 2 {
        return None;
    }
    let mut d = 2u128;
    while d * d <= a {
        if a % d == 0 {
            return Some(d);
        }
        d += 1;
    }
    Some(a)
}

fn c5_buchstab() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let norm_fields = [
        make_context(&pure(3, 2), 1).unwrap(),
        make_context(&mixed(4), 2).unwrap(),
    ];
    for i in 0..50 {
        let set: Vec<u128> = if i % 2 == 0 {
            let lo = rng.gen_range(1..10_000u128);
            let len = rng.gen_range(50..2_000u128);
            (lo..lo + len).filter(|_| rng.gen_bool(0.7)).collect()
        } else {
            let ctx = &norm_fields[(i / 2) % 2];
            let side = rng.gen_range(5..=25);
            local::norm_values(ctx, 1, side).unwrap()
        };
        let z1 = rng.gen_range(2..30u64);
        let z2 = rng.gen_range(z1..200u64);
        let r = buchstab_check(&set, z1, z2).unwrap();
        let direct = set
            .iter()
            .filter(|&&a| smallest_prime_factor(a).is_none_or(|q| q > z2 as u128))
            .count() as i64;
        if r.residual != 0 || r.lhs != direct {
            return (false, format!("instance {i}: {r:?}, direct {direct}"));
        }
    }
    (true, "50 instances, 25 of them norm-value sets".into())
}

fn c6_polytope() -> Outcome {
    for n in 2..=8 {
        let one = PolytopeSpec::new(&[[0.01, 10.0]]);
        if polytope_integral(&one, n as f64).unwrap() != 1.0 / n as f64 {
            return (false, format!("l = 1 slice at {n} is not 1/{n}"));
        }
    }
    let mut worst: f64 = 0.0;
    for (a, b) in [(0.1, 0.4), (0.2, 0.3), (0.3, 0.45), (0.05, 0.5)] {
        let v = polytope_integral(&PolytopeSpec::new(&[[a, b], [0.01, 0.99]]), 1.0).unwrap();
        let exact: f64 = (b * (1.0 - a) / (a * (1.0 - b))).ln();
        worst = worst.max(((v - exact) / exact).abs());
    }
    if worst > 1e-8 {
        return (false, format!("closed form relative error {worst:e}"));
    }
    let mut ratios = Vec::new();
    for spec in [
        PolytopeSpec::new(&[[0.4, 0.5], [0.05, 1.0]]),
        PolytopeSpec::new(&[[0.3, 0.4], [0.05, 1.0]]),
    ] {
        let r = type_ii_density_check(&spec, 1_000_000, 0.5, None, 1 << 30).unwrap();
        ratios.push(r.ratio);
    }
    let ok = ratios.iter().all(|r| (r - 1.0).abs() <= 0.15);
    (
        ok,
        format!("l = 1 exact, l = 2 rel err {worst:.1e}, Type II ratios {ratios:.3?}"),
    )
}

fn c7_sieve_trend() -> Outcome {
    let ctx = make_context(&pure(3, 2), 1).unwrap();
    let target = sieve_target(&ctx, 100_000, 1_000_000).unwrap().target;
    let gaps: Vec<f64> = [100, 1_000, 10_000]
        .iter()
        .map(|&r| (sieve_sum(&ctx, r).unwrap() - target).abs() / target)
        .collect();
    let ok = gaps.windows(2).all(|w| w[1] < w[0]) && gaps[2] < 0.10;
    (ok, format!("relative gaps {gaps:.4?} against {target:.5}"))
}

fn c8_gamma_stability() -> Outcome {
    let mut diffs = Vec::new();
    for (f, k) in [(pure(3, 2), 1), (pure(4, 2), 1)] {
        let ctx = make_context(&f, k).unwrap();
        let a = gamma_estimate(&ctx, 1_000_000).unwrap();
        let b = gamma_estimate(&ctx, 2_000_000).unwrap();
        diffs.push((a - b).abs() / a);
    }
    (
        diffs.iter().all(|&d| d < 0.05),
        format!("relative differences {diffs:.5?}"),
    )
}

fn c9_census() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for f in [pure(7, 2), mixed(7)] {
        let ctx = make_context(&f, 2).unwrap();
        let rep = wedge_census(&ctx, &[3, 5, 7], 1 << 27).unwrap();
        let base = rep.rows[0].ratio;
        ok &= base > 0.0 && rep.rows.iter().all(|r| r.ratio <= 4.0 * base);
        detail.push(format!(
            "{:?}",
            rep.rows
                .iter()
                .map(|r| (r.count, r.ratio))
                .collect::<Vec<_>>()
        ));
    }
    (ok, format!("pure {} non-pure {}", detail[0], detail[1]))
}

fn c10_theorem() -> Outcome {
    let mut quartic = ExperimentConfig::for_field(&pure(4, 2), 1);
    quartic.bbox = Some(vec![[1, 80]; 3]);
    quartic.seed = 7;
    let mut control = ExperimentConfig::for_field(&[1, 0, 1], 0);
    control.x = 300;
    control.seed = 7;
    let q = theorem_check(&quartic).unwrap().ratio;
    let c = theorem_check(&control).unwrap().ratio;
    let ok = (0.85..=1.15).contains(&q) && (0.90..=1.10).contains(&c);
    (ok, format!("quartic ratio {q:.4}, control ratio {c:.4}"))
}

fn c11_type_i() -> Outcome {
    let mut detail = Vec::new();
    let mut ok = true;
    for f in [pure(3, 2), pure(4, 2)] {
        let mut cfg = ExperimentConfig::for_field(&f, 1);
        cfg.x = 80;
        let r = type_i_discrepancy(&cfg).unwrap();
        ok &= r.pass;
        detail.push(format!(
            "C = {:.3e}, max/C = {:.3}",
            r.fitted_constant, r.max_ratio_over_fit
        ));
    }
    (ok, detail.join("; "))
}

fn scratch_dir(tag: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("normform-acceptance-{}-{tag}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    d
}

fn c12_cli_determinism() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_normform");
    let cfg_dir = scratch_dir("cfg");
    std::fs::create_dir_all(&cfg_dir).unwrap();
    let cfg_path = cfg_dir.join("quartic.json");
    std::fs::write(
        &cfg_path,
        r#"{"f": [-2, 0, 0, 0, 1], "k": 1, "x": 40, "typeii": {"x": 100000}}"#,
    )
    .unwrap();
    let subs = [
        "norms", "sseries", "lattice", "census", "typei", "theorem", "integral", "buchstab",
    ];
    for sub in subs {
        let mut outputs = Vec::new();
        for run in 0..2 {
            let dir = scratch_dir(&format!("{sub}-{run}"));
            let status = Command::new(bin)
                .args([
                    sub,
                    "--config",
                    cfg_path.to_str().unwrap(),
                    "--seed",
                    "7",
                    "--threads",
                    "2",
                    "--out",
                    dir.to_str().unwrap(),
                ])
                .status()
                .unwrap();
            if !status.success() {
                return (false, format!("{sub} exited with {status}"));
            }
            let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(&dir)
                .unwrap()
                .map(|e| {
                    let e = e.unwrap();
                    (
                        e.file_name().to_string_lossy().into_owned(),
                        std::fs::read(e.path()).unwrap(),
                    )
                })
                .collect();
            files.sort();
            let _ = std::fs::remove_dir_all(&dir);
            outputs.push(files);
        }
        if outputs[0] != outputs[1] || outputs[0].is_empty() {
            return (false, format!("{sub} output differs between runs"));
        }
    }
    let _ = std::fs::remove_dir_all(&cfg_dir);
    (
        true,
        format!("{} subcommands byte-identical across two runs", subs.len()),
    )
}

#[test]
fn acceptance() {
    let criteria: [(&str, fn() -> Outcome, u64); 12] = [
        ("1 multiplication oracle", c1_diamond, 5),
        ("2 determinant formula", c2_determinant_formula, 30),
        ("3 rho at degree-one primes", c3_rho_degree_one, 60),
        ("4 nu consistency", c4_nu_consistency, 120),
        ("5 Buchstab identity", c5_buchstab, 60),
        ("6 polytope integral and Type II", c6_polytope, 120),
        ("7 sieve sum trend", c7_sieve_trend, 120),
        ("8 ideal density stability", c8_gamma_stability, 120),
        ("9 wedge census", c9_census, 600),
        ("10 prime counts", c10_theorem, 120),
        ("11 Type I discrepancy", c11_type_i, 120),
        ("12 CLI determinism", c12_cli_determinism, 600),
    ];
    let mut failed = Vec::new();
    for (name, check, limit_s) in criteria {
        let start = Instant::now();
        let (mut ok, mut detail) = check();
        let elapsed = start.elapsed();
        if elapsed > Duration::from_secs(limit_s) {
            ok = false;
            detail.push_str(&format!("; over the {limit_s} s limit"));
        }
        let line = format!(
            "{} criterion {name}: {detail} ({:.2} s)\n",
            if ok { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !ok {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

//! Local densities and the truncated singular series.

use normform::field::make_context;
use normform::local::{
    degree_pattern, nu_bruteforce, nu_fast, primes_above, rho, singular_series, IdealSym,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = make_context(&[-2, 0, 0, 0, 1], 1)?;
    println!("{:>3} {:>10} {:>8} {:>8}", "p", "pattern", "nu", "brute");
    for p in [3, 5, 7, 11, 13, 17, 73] {
        println!(
            "{p:>3} {:>10?} {:>8} {:>8}",
            degree_pattern(&ctx, p)?,
            nu_fast(&ctx, p)?,
            nu_bruteforce(&ctx, p, 1 << 24)?
        );
    }
    for q in primes_above(&ctx, 73)? {
        println!(
            "rho of a prime above 73 of degree {} = {}",
            q.degree,
            rho(&ctx, &IdealSym::from_primes(&[q.clone()]))?
        );
    }
    for pcut in [1_000, 10_000, 100_000] {
        let s = singular_series(&ctx, pcut)?;
        println!(
            "series to {pcut}: {:.6} (relative tail {:.2e}, certified {})",
            s.value, s.tail_bound, s.tail_certified
        );
    }
    Ok(())
}

//! Sieve sums approaching their limit, the ideal density estimate, and the
//! Buchstab identity on norm values.

use normform::field::make_context;
use normform::local::{buchstab_check, gamma_estimate, norm_values, sieve_sum, sieve_target};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = make_context(&[-2, 0, 0, 1], 1)?;
    let target = sieve_target(&ctx, 100_000, 1_000_000)?;
    println!(
        "target {:.5} (series {:.5} / density {:.5})",
        target.target, target.tilde, target.gamma_hat
    );
    for r in [100, 1_000, 10_000] {
        let s = sieve_sum(&ctx, r)?;
        println!(
            "R = {r:>6}: sieve sum {s:.5}, gap {:.2}%",
            100.0 * (s - target.target).abs() / target.target
        );
    }
    println!(
        "ideal density at 1e6: {:.5}, at 2e6: {:.5}",
        gamma_estimate(&ctx, 1_000_000)?,
        gamma_estimate(&ctx, 2_000_000)?
    );

    let values = norm_values(&ctx, 1, 20)?;
    let b = buchstab_check(&values, 5, 40)?;
    println!(
        "Buchstab on {} norm values: lhs {}, rhs {}, residual {}",
        b.size, b.lhs, b.rhs, b.residual
    );
    Ok(())
}

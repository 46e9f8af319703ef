//! Discrepancy of norm values divisible by degree-one primes, per dyadic
//! block, against a single fitted constant.

use normform::experiments::{type_i_discrepancy, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::for_field(&[-2, 0, 0, 0, 1], 1);
    cfg.x = 80;
    let r = type_i_discrepancy(&cfg)?;
    print!("{}", r.to_csv());
    println!(
        "fitted constant {:.4}, max ratio / constant {:.3}, pass {}",
        r.fitted_constant, r.max_ratio_over_fit, r.pass
    );
    Ok(())
}

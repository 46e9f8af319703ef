//! Moments of the ideal divisor bound over norm values on growing boxes.

use normform::experiments::{divisor_sum_check, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = ExperimentConfig::for_field(&[-2, 0, 0, 1], 1);
    for e in [1, 2] {
        cfg.divisor.e = e;
        let r = divisor_sum_check(&cfg)?;
        for row in &r.rows {
            println!(
                "e = {e}, X = {:>5}: sum / X^2 = {:.4}",
                row.x, row.normalized
            );
        }
        println!("e = {e}: fitted log log exponent {:.3}", r.log_exponent);
    }
    Ok(())
}

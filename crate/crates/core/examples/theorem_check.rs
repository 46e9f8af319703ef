//! Observed primes among norm values on a box against the singular series
//! times the box integral.

use normform::experiments::{theorem_check, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut quartic = ExperimentConfig::for_field(&[-2, 0, 0, 0, 1], 1);
    quartic.x = 80;
    quartic.seed = 7;
    let mut gaussian = ExperimentConfig::for_field(&[1, 0, 1], 0);
    gaussian.x = 300;
    for (label, cfg) in [("X^4 - 2, k = 1", quartic), ("X^2 + 1, k = 0", gaussian)] {
        let r = theorem_check(&cfg)?;
        println!(
            "{label}: observed {} predicted {:.1} +- {:.1}, ratio {:.4}, regime {}",
            r.observed, r.predicted, r.pred_err, r.ratio, r.regime
        );
        println!(
            "  negative values: observed {} predicted {:.1}",
            r.observed_negative, r.predicted_negative
        );
    }
    Ok(())
}

//! Polytope integrals and counts of prime tuples whose product lies in a
//! short window. The three-prime polytope shows a finite-scale shortfall:
//! small primes in the window are sparser than the logarithmic density.

use normform::experiments::{polytope_integral, type_ii_density_check, PolytopeSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let one = PolytopeSpec::new(&[[0.5, 8.0]]);
    println!(
        "one exponent summing to 4: {}",
        polytope_integral(&one, 4.0)?
    );
    // e_1 in [a, b], e_2 = 1 - e_1: the integral of de / (e (1 - e))
    let (a, b) = (0.3f64, 0.4f64);
    let two = PolytopeSpec::new(&[[a, b], [0.05, 1.0]]);
    let closed = (b * (1.0 - a) / (a * (1.0 - b))).ln();
    println!(
        "two exponents: {:.12} vs closed form {closed:.12}",
        polytope_integral(&two, 1.0)?
    );

    let specs = [
        PolytopeSpec::new(&[[0.4, 0.5], [0.05, 1.0]]),
        PolytopeSpec::new(&[[0.3, 0.4], [0.05, 1.0]]),
        PolytopeSpec::new(&[[0.3, 0.4], [0.3, 0.4], [0.3, 0.4]]),
    ];
    for spec in &specs {
        let r = type_ii_density_check(spec, 1_000_000, 0.5, None, 1 << 30)?;
        println!(
            "{:?}: observed {} predicted {:.1} ratio {:.3}",
            spec.intervals, r.observed, r.predicted, r.ratio
        );
    }
    Ok(())
}

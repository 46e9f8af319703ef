//! Exhaustive mod-p census of vectors whose constraint rows drop rank, for a
//! pure and a non-pure septic field, and the sampled skew census.

use normform::field::make_context;
use normform::geometry::{skew_census, wedge_census};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for (label, f) in [
        ("X^7 - 2", vec![-2, 0, 0, 0, 0, 0, 0, 1]),
        ("X^7 + 2X + 2", vec![2, 2, 0, 0, 0, 0, 0, 1]),
    ] {
        let ctx = make_context(&f, 2)?;
        let rep = wedge_census(&ctx, &[3, 5, 7], 1 << 27)?;
        println!("{label}, k = 2\n{}", rep.to_csv());
    }
    let ctx = make_context(&[-2, 0, 0, 0, 0, 0, 0, 1], 2)?;
    let kappas = [0.0, 2f64.powi(-6), 2f64.powi(-2), 1.0, 4.0];
    let rep = skew_census(&ctx, 1, 20, 2000, &kappas, 1)?;
    println!(
        "skew census, B = 20\n{}degenerate pairs: {}",
        rep.to_csv(),
        rep.degenerate
    );
    Ok(())
}

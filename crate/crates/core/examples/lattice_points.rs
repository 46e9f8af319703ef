//! Counting points of a constraint lattice in a box against the volume main
//! term and its successive-minima error bound.

use normform::field::{make_context, OrderElement};
use normform::geometry::{
    davenport_estimate, points_in_region, AxisBox, LinearRegion, REGION_BUDGET,
};
use normform::lattice::lambda_v;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = make_context(&[-2, 0, 0, 0, 1], 1)?;
    let l = lambda_v(&ctx, &OrderElement::from_i64(&[1, 2, 0, 1]))?;
    println!(
        "{:>6} {:>10} {:>12} {:>12}",
        "side", "count", "main term", "error bound"
    );
    for side in [10, 20, 40, 80] {
        let region = LinearRegion::from_box(AxisBox::cube(4, -side, side)?);
        let count = points_in_region(&l, &region, REGION_BUDGET)?;
        let est = davenport_estimate(&l, &region, 0)?;
        println!(
            "{side:>6} {count:>10} {:>12.2} {:>12.1}",
            est.main_term, est.error_bound
        );
    }
    Ok(())
}

//! The lattice of multipliers whose product with v has vanishing top
//! coordinates: its wedge vector, determinant, minima and a nice basis.

use normform::field::{make_context, OrderElement};
use normform::lattice::{
    det_squared_formula, gram_det, lambda_v, nice_basis, successive_minima, wedge,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = make_context(&[-2, 0, 0, 0, 0, 1], 2)?;
    let v = OrderElement::from_i64(&[3, -1, 4, 1, -5]);
    let w = wedge(&ctx, &v)?;
    let l = lambda_v(&ctx, &v)?;
    println!("rank {} in Z^{}", l.rank(), l.ambient());
    println!("|wedge|^2 = {}, content = {}", w.norm_sq(), w.content());
    println!("det^2 from the wedge = {}", det_squared_formula(&w)?);
    println!("Gram determinant     = {}", gram_det(&l));

    let (minima, _) = successive_minima(&l)?;
    let minima: Vec<String> = minima.iter().map(|m| m.to_string()).collect();
    println!("squared successive minima: {}", minima.join(", "));

    let nb = nice_basis(&ctx, &v)?;
    println!(
        "nice basis adjustment {:?}, pair wedge |.|^2 = {}, orthogonality constant {:.4}",
        nb.adjustment, nb.pair_wedge_norm_sq, nb.ortho_const
    );
    Ok(())
}

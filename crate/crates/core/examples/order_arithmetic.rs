//! Multiplication in Z[theta] for theta^3 = 2, checked against the
//! multiplication matrix, and the norm form on a few elements.

use normform::field::{diamond, make_context, mul_matrix, norm, OrderElement};
use normform::intmat;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let ctx = make_context(&[-2, 0, 0, 1], 1)?;
    let a = OrderElement::from_i64(&[1, 1, 0]);
    let b = OrderElement::from_i64(&[0, 2, -1]);
    let ab = diamond(&ctx, &a, &b)?;
    println!("(1 + theta)(2 theta - theta^2) = {:?}", ab.0);

    // column i of the matrix of a is a * theta^i
    let m = mul_matrix(&ctx, &a)?;
    let via_matrix: Vec<_> = (0..3)
        .map(|r| {
            (0..3)
                .map(|i| &m[r][i] * &b.0[i])
                .sum::<num_bigint::BigInt>()
        })
        .collect();
    println!("via matrix                       = {via_matrix:?}");
    println!(
        "det of the matrix = {}, norm = {}",
        intmat::det(&m),
        norm(&ctx, &a)?
    );

    for x in [[1, 1, 0], [3, -1, 0], [5, 2, 0]] {
        println!("N({x:?}) = {}", norm(&ctx, &OrderElement::from_i64(&x))?);
    }
    Ok(())
}

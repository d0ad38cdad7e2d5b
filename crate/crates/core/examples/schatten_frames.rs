//! Schatten norms, frame bounds and the power-sum bound over orthonormal bases.

use hpw_core::schatten::{frame_bounds, onb_power_sum, right_singular_vectors, schatten_norm, singular_values, SchattenP};
use nalgebra::DMatrix;
use num_complex::Complex64;

fn main() -> hpw_core::Result<()> {
    let t = DMatrix::from_fn(4, 4, |i, j| Complex64::new((i as f64 - j as f64).cos(), 0.1 * (i * j) as f64));
    println!("singular values: {:?}", singular_values(&t)?.values);
    for p in [1.0, 2.0, 4.0] {
        println!("||T||_S{p} = {:.8}", schatten_norm(&t, SchattenP::Finite(p))?);
    }
    println!("||T||_op = {:.8}", schatten_norm(&t, SchattenP::Infinity)?);

    // sum_j ||T e_j||^p <= ||T||_{S_p}^p for p >= 2, with equality on the right singular basis
    let s4 = schatten_norm(&t, SchattenP::Finite(4.0))?.powi(4);
    let standard = DMatrix::<Complex64>::identity(4, 4);
    let singular = right_singular_vectors(&t)?;
    println!("||T||_S4^4 = {s4:.8}");
    println!("  standard basis sum  {:.8}", onb_power_sum(&t, &standard, 4.0)?);
    println!("  singular basis sum  {:.8}", onb_power_sum(&t, &singular, 4.0)?);

    // two copies of an orthonormal basis form a tight frame with bound 2
    let doubled = DMatrix::from_fn(4, 8, |r, c| standard[(r, c % 4)]);
    let fb = frame_bounds(&doubled)?;
    println!("frame bounds of a doubled basis: [{}, {}], spanning = {}", fb.lower, fb.upper, fb.spanning);
    Ok(())
}

//! Scaled Hermite functions, multi-indices and the eigenvalues of the
//! generalized Hermite operator.

use hpw_core::group::GroupDescriptor;
use hpw_core::hermite::{basis_dim, enumerate_multi_indices, hermite_eval, phi_alpha_eval, zeta, SpectralParameter};
use hpw_core::quadrature::gauss_hermite;

fn main() -> hpw_core::Result<()> {
    println!("h_m(0.7) for m = 0..6:");
    for m in 0..=6 {
        println!("  h_{m}(0.7) = {:+.12}", hermite_eval(m, 0.7));
    }
    // stable recurrence: high orders stay finite
    println!("h_256(3.0) = {:.6e}", hermite_eval(256, 3.0));

    let g = GroupDescriptor::heisenberg(2)?;
    let sp = SpectralParameter::new(&g, &[1.5])?;
    println!("H^2 at lambda = 1.5: eta = {:?}, Pf = {}", sp.eta, sp.pfaffian);
    println!("basis size for |alpha| <= 4: {}", basis_dim(2, 4));
    for a in enumerate_multi_indices(2, 2) {
        println!("  alpha = {:?}: zeta = {:.3}, Phi(0.2, -0.1) = {:+.6}", a, zeta(&a, &sp), phi_alpha_eval(&a, &sp, &[0.2, -0.1])?);
    }

    // orthonormality of one scaled function by Gauss-Hermite quadrature
    let h1 = GroupDescriptor::heisenberg(1)?;
    let sp1 = SpectralParameter::new(&h1, &[0.4])?;
    let s = sp1.eta[0].sqrt();
    let gh = gauss_hermite(40);
    let alpha = &enumerate_multi_indices(1, 5)[5];
    let norm: f64 = gh
        .nodes
        .iter()
        .zip(&gh.scaled_weights)
        .map(|(x, w)| w / s * phi_alpha_eval(alpha, &sp1, &[x / s]).unwrap().powi(2))
        .sum();
    println!("||Phi_5||^2 at eta = 0.4: {norm:.15}");
    Ok(())
}

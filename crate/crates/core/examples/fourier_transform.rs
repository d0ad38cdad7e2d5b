//! The operator-valued Fourier transform of a Gaussian at one frequency,
//! checked against its closed-form diagonal.

use std::f64::consts::PI;

use hpw_core::fourier::{gft, FourierQuad};
use hpw_core::functions::Gaussian;
use hpw_core::group::GroupDescriptor;
use hpw_core::hermite::SpectralParameter;
use hpw_core::schatten::{schatten_norm, SchattenP};

fn main() -> hpw_core::Result<()> {
    let g = GroupDescriptor::heisenberg(1)?;
    let (a, b) = (0.5, 0.5);
    let f = Gaussian::new(&g, a, b)?;
    let lambda = 1.0;
    let sp = SpectralParameter::new(&g, &[lambda])?;
    let m = gft(&g, &f, &sp, 6, &FourierQuad::default())?;
    println!("F(f)(1) truncated to |alpha| <= 6 ({}x{}):", m.dim(), m.dim());
    for i in 0..m.dim() {
        println!("  diag[{i}] = {:+.10}", m.entries[(i, i)].re);
    }
    // <pi_lambda(x) Phi_0, Phi_0> = e^{i lambda t} e^{-|lambda| |v|^2 / 4}
    let exact = (PI / b).sqrt() * (-lambda * lambda / (4.0 * b)).exp() * PI / (a + lambda.abs() / 4.0);
    println!("closed form of diag[0]: {exact:+.10}");
    println!("Hilbert-Schmidt norm {:.8}, operator norm {:.8}", schatten_norm(&m.entries, SchattenP::Finite(2.0))?, schatten_norm(&m.entries, SchattenP::Infinity)?);

    let shifted = f.clone().modulated(&[0.3])?;
    let ms = gft(&g, &shifted, &sp, 6, &FourierQuad::default())?;
    println!("central modulation by 0.3 moves the frequency: diag[0] = {:+.10}", ms.entries[(0, 0)].re);
    Ok(())
}

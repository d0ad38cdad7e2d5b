//! The L^p Heisenberg-Pauli-Weyl ratio for a Gaussian and its invariance
//! under dilation and scaling.

use hpw_core::fourier::CalibrationConstants;
use hpw_core::functions::Gaussian;
use hpw_core::group::GroupDescriptor;
use hpw_core::hpw::{hpw_report, HpwSetup, InequalityConfig};

fn main() -> hpw_core::Result<()> {
    let g = GroupDescriptor::heisenberg(1)?;
    // constants as produced by `hpw calibrate` on the default settings
    let consts = CalibrationConstants { plancherel_c: 0.026028861, inversion_kappa: 0.026327143 };
    let setup = HpwSetup { cutoff: 12, ..HpwSetup::default() }.calibrated(&consts);
    let f = Gaussian::new(&g, 0.5, 0.5)?;
    println!("beta must exceed Q (1/p - 1/2): at p = 1.5 that is {:.4}", InequalityConfig::beta_threshold(4, 1.5));
    for (p, beta, gamma) in [(1.0, 3.0, 1.0), (1.5, 1.0, 1.0), (1.75, 2.0, 0.5)] {
        let cfg = InequalityConfig::for_group(&g, p, beta, gamma)?;
        let rep = hpw_report(&g, &f, &cfg, &setup)?;
        let moved = hpw_report(&g, &f.clone().dilated(2.0)?.scaled(5.0), &cfg, &setup)?;
        println!(
            "p = {p}, beta = {beta}, gamma = {gamma}: ratio {:.6} (weight {:.4}, Fourier {:.4}); 5 f o delta_(1/2): {:.6}",
            rep.ratio, rep.weight_term, rep.fourier_term, moved.ratio
        );
    }
    assert!(InequalityConfig::for_group(&g, 1.0, 1.0, 1.0).is_err());
    Ok(())
}

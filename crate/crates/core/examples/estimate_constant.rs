//! Searching a Gaussian family for the smallest HPW ratio with Nelder-Mead.

use hpw_core::fourier::CalibrationConstants;
use hpw_core::group::GroupDescriptor;
use hpw_core::hpw::{estimate_constant, GaussianFamily, HpwSetup, InequalityConfig, NelderMeadOptions};

fn main() -> hpw_core::Result<()> {
    let g = GroupDescriptor::heisenberg(1)?;
    let consts = CalibrationConstants { plancherel_c: 0.026028861, inversion_kappa: 0.026327143 };
    let setup = HpwSetup { cutoff: 10, ..HpwSetup::default() }.calibrated(&consts);
    let cfg = InequalityConfig::for_group(&g, 1.5, 1.0, 1.0)?;
    // theta = (ln a, ln b, central modulation, horizontal shift)
    let family = GaussianFamily {
        lower: [(0.1f64).ln(), (0.1f64).ln(), -0.3, -1.0],
        upper: [(2.0f64).ln(), (2.0f64).ln(), 0.3, 1.0],
        start: [(0.5f64).ln(), (0.5f64).ln(), 0.0, 0.0],
    };
    let opts = NelderMeadOptions { budget: 15, seed: 3, ..NelderMeadOptions::default() };
    let report = estimate_constant(&g, &family, &cfg, &setup, &opts)?;
    for t in &report.trajectory {
        println!("eval {:>2}: ratio {:.6}, best {:.6}", t.evaluation, t.ratio, t.best_ratio);
    }
    println!("min ratio {:.6} at theta = {:?}", report.min_ratio, report.argmin);
    Ok(())
}

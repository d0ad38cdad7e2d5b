//! Calibrating the Plancherel and inversion constants on a frequency grid,
//! then using them on a function outside the calibration family.

use hpw_core::fourier::{calibrate, invert, plancherel_sum, FourierField, FourierQuad, LambdaGridSpec};
use hpw_core::functions::{Gaussian, GroupFunction};
use hpw_core::group::{GroupDescriptor, GroupPoint, HaarResolution};

fn main() -> hpw_core::Result<()> {
    let g = GroupDescriptor::heisenberg(1)?;
    let grid = LambdaGridSpec::default();
    let quad = FourierQuad::default();
    let cutoff = 20;

    let base = Gaussian::new(&g, 0.5, 0.5)?;
    let family: Vec<Gaussian> = [0.7, 1.0, 1.5].iter().map(|&r| base.clone().dilated(r)).collect::<Result<_, _>>()?;
    let refs: Vec<&dyn GroupFunction> = family.iter().map(|f| f as &dyn GroupFunction).collect();
    let cal = calibrate(&g, &refs, &grid, cutoff, &quad, &HaarResolution::default())?;
    println!(
        "C = {:.9}, kappa = {:.9} (analytic (2 pi)^-2 = {:.9})",
        cal.constants.plancherel_c,
        cal.constants.inversion_kappa,
        (2.0 * std::f64::consts::PI).powi(-2)
    );

    let f = base.translated(&GroupPoint::new(vec![0.4], vec![-0.2], vec![0.1])?)?.modulated(&[0.2])?;
    let field = FourierField::build_adapted(&g, &f, &grid, cutoff, &quad)?;
    let est = plancherel_sum(&field, &cal.constants)?;
    println!("||f||_2^2: Plancherel {est:.8}, closed form {:.8}", f.lp_norm_pow(2.0));
    for x in [g.identity(), GroupPoint::new(vec![0.5], vec![0.0], vec![0.3])?] {
        println!("f({:?}) = {:.6}, inverted {:.6}", x, f.eval(&x), invert(&field, &x, &cal.constants)?);
    }
    Ok(())
}

//! Spectral tail masses, the fitted tail constants, and the growth of the
//! frequency count `|{zeta <= r}|` on several groups.

use hpw_core::fourier::{FourierField, FourierQuad, LambdaGridSpec};
use hpw_core::functions::Gaussian;
use hpw_core::group::GroupDescriptor;
use hpw_core::hpw::{count_scaling_exponent, tail_bound_check, InequalityConfig};

fn main() -> hpw_core::Result<()> {
    let g = GroupDescriptor::heisenberg(1)?;
    let f = Gaussian::new(&g, 0.5, 0.5)?;
    let grid = LambdaGridSpec { nodes_per_panel: 16, ..LambdaGridSpec::default() };
    let field = FourierField::build_adapted(&g, &f, &grid, 12, &FourierQuad::default())?;
    let cfg = InequalityConfig::for_group(&g, 1.5, 2.0, 1.0)?;
    let levels: Vec<f64> = (0..9).map(|i| 0.2 * 100f64.powf(i as f64 / 8.0)).collect();
    let table = tail_bound_check(&g, &field, f.lp_norm(1.5), &cfg, &levels)?;
    println!("{:>8} {:>12} {:>12} {:>12} {:>12}", "r", "below", "bound", "above", "bound");
    for row in &table.rows {
        println!("{:>8.3} {:>12.4e} {:>12.4e} {:>12.4e} {:>12.4e}", row.r, row.below_mass, row.below_bound, row.above_mass, row.above_bound);
    }
    println!("constants: below {:.4}, above {:.4}", table.below_constant, table.above_constant);

    let count_grid = LambdaGridSpec { lambda_min: 1e-3, lambda_max: 60.0, panels: 12, nodes_per_panel: 16, ..grid };
    let rs: Vec<f64> = (0..15).map(|i| 50f64.powf(i as f64 / 14.0)).collect();
    for g in [GroupDescriptor::heisenberg(1)?, GroupDescriptor::heisenberg(2)?, GroupDescriptor::quaternionic()] {
        let grid = if g.k() > 1 { LambdaGridSpec { directions: 4, nodes_per_panel: 8, ..count_grid } } else { count_grid };
        let (slope, _) = count_scaling_exponent(&g, &grid, &rs)?;
        println!("n = {}, k = {}: count grows like r^{slope:.3} (n + k = {})", g.n(), g.k(), g.n() + g.k());
    }
    Ok(())
}

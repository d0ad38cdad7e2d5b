//! Building a run configuration in code, applying `key=value` overrides,
//! and running a small sweep without the command line.

use hpw_core::cli::{cmd_calibrate, run_sweep, RunConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = std::env::temp_dir().join(format!("hpw-example-{}", std::process::id()));
    let overrides = [
        "cutoff=8",
        "grid.nodes_per_panel=4",
        "inequality={\"p\":[1.5],\"beta\":[1.0,2.0],\"gamma\":[1.0]}",
        "family=[{\"a\":0.5,\"b\":0.5},{\"a\":0.3,\"b\":0.6,\"modulation\":[0.1]}]",
        "tail_levels.count=9",
    ]
    .map(String::from);
    let mut cfg = RunConfig::load(None, &overrides)?;
    cfg.out = dir.clone();
    println!("config hash {}", &cfg.hash_hex()[..16]);

    let sidecar = cmd_calibrate(&cfg).map_err(|e| e.to_string())?;
    println!("C = {:.9}", sidecar.calibration.constants.plancherel_c);
    let sweep = run_sweep(&cfg).map_err(|e| e.to_string())?;
    for r in &sweep.rows {
        println!(
            "p {} beta {} member {} dilation {}: ratio {:.6}",
            r.p, r.beta, r.family_index, r.dilation_index, r.ratio
        );
    }
    println!("min ratio {:.6}", sweep.summary.min_ratio);
    std::fs::remove_dir_all(&dir)?;
    Ok(())
}

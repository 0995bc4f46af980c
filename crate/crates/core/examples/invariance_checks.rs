//! Numerical symmetry checks for every shipped system.

use symdp::cli::{check_config, RunConfig};

fn main() -> symdp::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../configs");
    for name in ["rotor2d", "rotor2d-asymmetric", "dubins-pair", "mri-fingerprint", "lqr", "l1"] {
        let config = RunConfig::load(format!("{dir}/{name}.toml").as_ref())?;
        let tolerance = config.check.tolerance;
        println!("# {name}");
        for (part, report) in check_config(&config)? {
            let verdict = if report.passes(tolerance) { "ok" } else { "VIOLATED" };
            println!("{part:>8}: max residual {:.3e} {verdict}", report.max_residual());
        }
    }
    Ok(())
}

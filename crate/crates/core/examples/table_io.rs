//! Writes a solve to disk with a manifest, reloads it with hash
//! verification and exports a slice as CSV.

use symdp::cli::{export_slice, solve_config, Manifest, RunConfig, SliceSpec, MANIFEST_NAME};
use symdp::dp::Retain;

const CONFIG: &str = r#"
mode = "full"

[system]
name = "rotor2d"
horizon = 4

[grid]
axes = [
    { lo = -2.0, hi = 2.0, count = 41 },
    { lo = -2.0, hi = 2.0, count = 41 },
]
"#;

fn main() -> symdp::Result<()> {
    let config = RunConfig::from_toml(CONFIG)?;
    let result = solve_config(&config, Retain::All)?;
    let dir = std::env::temp_dir().join("symdp-table-io");
    let manifest = Manifest::write(&dir, &config, &result)?;
    for file in &manifest.files {
        println!("{:<18} {}", file.path, &file.sha256[..16]);
    }

    let loaded = Manifest::load(&dir.join(MANIFEST_NAME))?;
    let slice = SliceSpec::parse("stage=0,table=value,a1=0.0")?;
    let csv = export_slice(&loaded, &slice)?;
    for line in csv.lines().take(5) {
        println!("{line}");
    }
    println!("... {} rows", csv.lines().count() - 1);
    Ok(())
}

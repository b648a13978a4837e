//! Run every stage into a temporary output directory, then run again to
//! show that nothing is recomputed.
//!
//! cargo run --example full_pipeline [-- OUTDIR]

use irspace::pipeline::{run_stages, PipelineConfig, Stage};

fn main() {
    let out = std::env::args()
        .nth(1)
        .map(std::path::PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("irspace-example"));
    let toml = format!(
        "output_dir = {:?}\n\n[synth]\nnum_users = 40\n\n[grid]\nnodes_per_axis = 24\n",
        out.display().to_string()
    );
    let cfg = PipelineConfig::from_toml_with_overrides(&toml, &[]).unwrap();
    let stages: Vec<Stage> = Stage::ALL.into_iter().filter(|s| *s != Stage::Compare).collect();
    for pass in 1..=2 {
        println!("pass {pass}");
        run_stages(&stages, &cfg, false, |stage, outcome| println!("  {stage}: {outcome:?}")).unwrap();
    }
    let roughness = std::fs::read_to_string(out.join("diagnose/roughness.txt")).unwrap();
    println!("{}:\n{roughness}", out.join("diagnose/roughness.txt").display());
}

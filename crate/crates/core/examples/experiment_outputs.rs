//! Runs a small mc-compare experiment and writes its CSV, SVG and config
//! files to a directory (default `results/example`).

use std::path::PathBuf;

use fourier_mcmc::experiments::{emit_outputs, run_experiment, ExperimentConfig, ExperimentKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| "results/example".into());
    let cfg = ExperimentConfig::parse(
        "d = 2, 5\nalpha = 1, 1.6\nreplicates = 10\nn = 5000\ngold_samples = 200000\n",
        Some(ExperimentKind::McComparison),
    )?;
    let result = run_experiment(&cfg)?;
    for g in &result.golds {
        println!("gold d={} {}: {:.6} ± {:.1e} ({})", g.d, g.params, g.value, g.std_error, g.source);
    }
    for f in emit_outputs(&result, &out, Some(&cfg.to_kv().render()))? {
        println!("wrote {}", f.display());
    }
    Ok(())
}

//! Declarative runs: load a TOML config, check it, run it, and read back the
//! summary. Does what `cryotrace run` does, through the library.
//!
//! ```bash
//! cargo run --release --example config_run -- [config.toml] [out_dir]
//! ```
//!
//! Configs live in `examples/configs/`. The output directory defaults to
//! `$CRYOTRACE_OUT`, then to a directory under the system temp dir.

use std::path::PathBuf;

use cryotrace::config::RunConfig;

fn main() -> cryotrace::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = args.next().map_or_else(
        || PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples/configs/stagnant_sphere.toml"),
        PathBuf::from,
    );
    let out = args
        .next()
        .map(PathBuf::from)
        .or_else(|| std::env::var_os("CRYOTRACE_OUT").map(PathBuf::from))
        .unwrap_or_else(|| std::env::temp_dir().join("cryotrace-config-run"));

    let diagnostics = RunConfig::validate_path(&path)?;
    if !diagnostics.is_empty() {
        for d in &diagnostics {
            eprintln!("{}: {d}", path.display());
        }
        std::process::exit(2);
    }
    let config = RunConfig::load(&path)?;
    let workers = std::thread::available_parallelism().map_or(1, |n| n.get());
    let runs = cryotrace::run::run(&config, &out, workers, None)?;

    for run in &runs {
        let s = &run.summary;
        println!("{}", run.dir.display());
        println!(
            "  N_T {}  N_E {}  N_L {}  source {}  cap {}  ({} discarded of {} attempts)",
            s.counts.total,
            s.counts.exits,
            s.counts.wall_losses,
            s.counts.source_disc,
            s.counts.collision_cap,
            s.ensemble.discarded,
            s.ensemble.attempts
        );
        match (s.efficiency, s.efficiency_std_error) {
            (Some(eta), Some(se)) => println!("  eta = {eta:.4} ± {se:.4}"),
            _ => println!("  eta undefined"),
        }
        if let Some(a) = s.median_coated_area_m2 {
            println!("  A_1/2 = {:.2} mm²", a * 1e6);
        }
        if let Some(h) = &s.residence {
            let peaks: Vec<String> = h.peaks.iter().map(|p| format!("{:.3} ms", p.time * 1e3)).collect();
            println!("  residence peaks: {}", peaks.join(", "));
        }
        if let Some(curve) = &s.thermalization {
            let params = config.gas_params()?;
            let tail = curve.points.last().expect("K = 0 is always present");
            println!(
                "  T(K = {}) = [{:.2}, {:.2}, {:.2}] K, fitted y exponent {:.4} (model {:.4})",
                tail.collisions,
                tail.temperature[0],
                tail.temperature[1],
                tail.temperature[2],
                curve.decay_exponent(1, 4.5, 10, 100).unwrap_or(f64::NAN),
                params.thermalization_exponent()
            );
        }
        for f in &run.files {
            println!("  wrote {}", f.file_name().unwrap().to_string_lossy());
        }
    }
    Ok(())
}

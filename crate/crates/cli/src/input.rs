use std::io::Read;
use std::path::Path;

use anyhow::anyhow;
use majorize_core::io::{experiment_from_csv, experiment_from_json};
use majorize_core::Experiment;

use crate::commands::Failure;

/// Reads a file, or stdin for `-`.
pub fn read_text(path: &str) -> Result<String, Failure> {
    if path == "-" {
        let mut s = String::new();
        std::io::stdin()
            .read_to_string(&mut s)
            .map_err(|e| Failure::missing(anyhow!("reading stdin: {e}")))?;
        return Ok(s);
    }
    std::fs::read_to_string(path).map_err(|e| Failure::missing(anyhow!("{path}: {e}")))
}

fn is_csv(path: &str) -> bool {
    Path::new(path).extension().is_some_and(|e| e.eq_ignore_ascii_case("csv"))
}

/// Loads an experiment, choosing the format from the extension.
pub fn load_experiment(path: &str) -> Result<Experiment, Failure> {
    let text = read_text(path)?;
    let parsed = if is_csv(path) { experiment_from_csv(&text) } else { experiment_from_json(&text) };
    parsed.map_err(|e| Failure::from_core(e).context(path))
}

//! One-parameter batch runs.

use geoslam_core::{run, Result, RunOptions, RunResult, Scenario};
use rayon::prelude::*;

/// Runs `base` once per value with the parameter at `path` overridden.
///
/// Runs are independent and execute in parallel; results come back in the
/// order of `values`. Every override is applied and validated before any run
/// starts, so a bad path or value fails fast.
pub fn sweep(base: &Scenario, path: &str, values: &[f64], options: &RunOptions) -> Result<Vec<RunResult>> {
    let scenarios = values
        .iter()
        .map(|&v| {
            let mut s = base.clone();
            s.set_parameter(path, v)?;
            s.validate()?;
            Ok(s)
        })
        .collect::<Result<Vec<_>>>()?;
    scenarios.par_iter().map(|s| run(s, options)).collect()
}

/// Parses a comma-separated list such as `0.01,0.005, 1e-3`.
pub fn parse_values(list: &str) -> std::result::Result<Vec<f64>, String> {
    let values = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<f64>().map_err(|e| format!("bad value {s:?}: {e}")))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    if values.is_empty() {
        return Err("the value list is empty".into());
    }
    Ok(values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn value_lists() {
        assert_eq!(parse_values("1, 2.5,1e-3").unwrap(), vec![1.0, 2.5, 1e-3]);
        assert!(parse_values("").is_err());
        assert!(parse_values("1,x").is_err());
    }
}

//! Instances from flags or from a JSON file.

use std::path::PathBuf;

use clap::Args;
use entropy_count::{DegreeSpec, MarginSpec};
use serde::{Deserialize, Serialize};

#[derive(Args, Debug, Clone, Default)]
pub struct InstanceArgs {
    /// Row sums, comma separated.
    #[arg(long, value_delimiter = ',', requires = "cols", conflicts_with_all = ["degrees", "input"])]
    pub rows: Option<Vec<f64>>,
    /// Column sums, comma separated.
    #[arg(long, value_delimiter = ',', requires = "rows")]
    pub cols: Option<Vec<f64>>,
    /// Degree sequence, comma separated.
    #[arg(long, value_delimiter = ',', conflicts_with = "input")]
    pub degrees: Option<Vec<f64>>,
    /// JSON instance file.
    #[arg(long)]
    pub input: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileOptions {
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub oracle: Option<bool>,
    pub mc_samples: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub degrees: Option<Vec<f64>>,
    #[serde(default)]
    pub options: FileOptions,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Instance {
    Table { rows: Vec<f64>, cols: Vec<f64> },
    Graph { degrees: Vec<f64> },
}

impl Instance {
    pub fn margin_spec(&self) -> Option<entropy_count::Result<MarginSpec>> {
        match self {
            Instance::Table { rows, cols } => Some(MarginSpec::new(rows.clone(), cols.clone())),
            Instance::Graph { .. } => None,
        }
    }

    pub fn degree_spec(&self) -> Option<entropy_count::Result<DegreeSpec>> {
        match self {
            Instance::Graph { degrees } => Some(DegreeSpec::new(degrees.clone())),
            Instance::Table { .. } => None,
        }
    }

    /// One-line description, e.g. `rows=2,2 cols=2,2`.
    pub fn describe(&self) -> String {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x}")).collect::<Vec<_>>().join(",");
        match self {
            Instance::Table { rows, cols } => format!("rows={} cols={}", join(rows), join(cols)),
            Instance::Graph { degrees } => format!("degrees={}", join(degrees)),
        }
    }
}

impl InstanceFile {
    pub fn into_instance(self) -> Result<(Instance, FileOptions), String> {
        let instance = match (self.rows, self.cols, self.degrees) {
            (Some(rows), Some(cols), None) => Instance::Table { rows, cols },
            (None, None, Some(degrees)) => Instance::Graph { degrees },
            _ => return Err("instance needs either rows and cols, or degrees".into()),
        };
        check_non_empty(&instance)?;
        Ok((instance, self.options))
    }
}

fn check_non_empty(instance: &Instance) -> Result<(), String> {
    let empty = match instance {
        Instance::Table { rows, cols } => rows.is_empty() || cols.is_empty(),
        Instance::Graph { degrees } => degrees.is_empty(),
    };
    if empty {
        return Err("instance arrays must be non-empty".into());
    }
    Ok(())
}

/// Resolve flags or file into an instance. Errors are usage errors.
pub fn resolve(args: &InstanceArgs) -> Result<(Instance, FileOptions), String> {
    if let Some(path) = &args.input {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let file: InstanceFile =
            serde_json::from_str(&text).map_err(|e| format!("malformed instance file: {e}"))?;
        return file.into_instance();
    }
    let instance = match (&args.rows, &args.cols, &args.degrees) {
        (Some(rows), Some(cols), None) => Instance::Table {
            rows: rows.clone(),
            cols: cols.clone(),
        },
        (None, None, Some(degrees)) => Instance::Graph {
            degrees: degrees.clone(),
        },
        _ => return Err("give --rows and --cols, --degrees, or --input".into()),
    };
    check_non_empty(&instance)?;
    Ok((instance, FileOptions::default()))
}

/// Integer values of a margin or degree list, for the exact oracles.
pub fn integers(values: &[f64]) -> Option<Vec<u64>> {
    values
        .iter()
        .map(|&x| (x >= 0.0 && x.fract() == 0.0 && x < 1e15).then_some(x as u64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_with_degrees_and_options() {
        let file: InstanceFile =
            serde_json::from_str(r#"{"degrees":[2,2,2],"options":{"tol":1e-9,"seed":4}}"#).unwrap();
        let (inst, opts) = file.into_instance().unwrap();
        assert_eq!(inst, Instance::Graph { degrees: vec![2.0; 3] });
        assert_eq!(opts.tol, Some(1e-9));
        assert_eq!(opts.seed, Some(4));
    }

    #[test]
    fn file_must_have_exactly_one_kind() {
        let both: InstanceFile =
            serde_json::from_str(r#"{"rows":[1],"cols":[1],"degrees":[1,1]}"#).unwrap();
        assert!(both.into_instance().is_err());
        let half: InstanceFile = serde_json::from_str(r#"{"rows":[1]}"#).unwrap();
        assert!(half.into_instance().is_err());
        let empty: InstanceFile = serde_json::from_str(r#"{"degrees":[]}"#).unwrap();
        assert!(empty.into_instance().is_err());
        assert!(serde_json::from_str::<InstanceFile>(r#"{"degres":[1]}"#).is_err());
    }

    #[test]
    fn integer_conversion() {
        assert_eq!(integers(&[1.0, 0.0, 7.0]), Some(vec![1, 0, 7]));
        assert_eq!(integers(&[1.5]), None);
        assert_eq!(integers(&[-1.0]), None);
    }
}

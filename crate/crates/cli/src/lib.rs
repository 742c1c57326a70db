//! Experiment harness: portfolio construction, repeated evaluation,
//! pairwise comparison with rank-sum tests, and per-member analysis.

pub mod error;
pub mod experiment;
pub mod members;
pub mod stats;

use std::path::Path;

use moeapap::algorithms::{AlgorithmConfig, OperatorConfig};
use moeapap::construction::Manifest;
use moeapap::operators::{PsoMutation, PsoParams};
use moeapap::portfolio::Portfolio;

pub use error::CliError;

pub const TRAIN_MANIFEST: &str = include_str!("../manifests/train.toml");
pub const TEST_MANIFEST: &str = include_str!("../manifests/test.toml");

/// `train`, `test` or a path to a manifest file.
pub fn load_manifest(spec: &str) -> Result<Manifest, CliError> {
    let text = match spec {
        "train" => TRAIN_MANIFEST.to_string(),
        "test" => TEST_MANIFEST.to_string(),
        path => std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?,
    };
    Ok(Manifest::from_toml(&text)?)
}

/// Built-in single algorithms with common default parameters.
pub fn builtin_algorithm(name: &str) -> Option<AlgorithmConfig> {
    let sbx = OperatorConfig::SbxPm {
        eta_sbx: 20.0,
        eta_pm: 20.0,
    };
    let pso = |mutation| PsoParams {
        w: 0.4,
        c1: 1.5,
        c2: 1.5,
        v_max: 0.5,
        v_change: 1.0,
        mutation,
        grid_divisions: 10,
    };
    Some(match name {
        "nsga2" => AlgorithmConfig::nsga2_sbx(20.0, 20.0),
        "moead" => AlgorithmConfig::moead(sbx, 0.9, 2, 20),
        "smpso" => AlgorithmConfig::mopso(pso(PsoMutation::Smpso {
            eta_pm: 20.0,
            constriction: true,
        })),
        "omopso" => AlgorithmConfig::mopso(pso(PsoMutation::Omopso { b: 5.0 })),
        _ => return None,
    })
}

/// `published`, a built-in algorithm name, or a portfolio file.
pub fn resolve_portfolio(spec: &str) -> Result<Portfolio, CliError> {
    if spec == "published" {
        return Ok(Portfolio::published());
    }
    if let Some(c) = builtin_algorithm(spec) {
        return Ok(Portfolio::new(spec, vec![c])?);
    }
    let path = Path::new(spec);
    if !path.exists() {
        return Err(CliError::Usage(format!(
            "{spec:?} is neither a portfolio file nor one of published, nsga2, moead, smpso, omopso"
        )));
    }
    Ok(moeapap::construction::load_portfolio(path)?)
}

use std::path::Path;
use std::sync::Arc;

use kohn_core::poly::parse_poly;
use kohn_core::{Config, GaussianRational, Polynomial, Ring};
use serde::Deserialize;

use crate::error::CliError;

/// Optional run settings stored alongside a problem.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemConfig {
    pub seed: Option<u64>,
    pub max_retries: Option<u32>,
    pub type_cap: Option<u32>,
    pub degree_cap: Option<u32>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub variables: Vec<String>,
    pub generators: Vec<String>,
    #[serde(default)]
    pub config: ProblemConfig,
}

/// A parsed problem: generators in their ring, vanishing at the origin.
#[derive(Debug, Clone)]
pub struct Problem {
    pub ring: Arc<Ring>,
    pub generators: Vec<Polynomial>,
    pub config: ProblemConfig,
}

impl ProblemFile {
    pub fn load(path: &Path) -> Result<ProblemFile, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Parse(format!("{}: {e}", path.display())))
    }

    pub fn parse(&self) -> Result<Problem, CliError> {
        if self.variables.len() < 2 {
            return Err(CliError::Parse("need at least two variables".into()));
        }
        if self.generators.is_empty() {
            return Err(CliError::Parse("no generators".into()));
        }
        let ring = Ring::new(&self.variables).map_err(|e| CliError::Parse(e.to_string()))?;
        let generators = self
            .generators
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let p = parse_poly(s, &ring)
                    .map_err(|e| CliError::Parse(format!("generator f{}: {e}", j + 1)))?;
                if p.constant_term() != GaussianRational::from_int(0) {
                    return Err(CliError::Parse(format!(
                        "generator f{} does not vanish at the origin",
                        j + 1
                    )));
                }
                Ok(p)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Problem {
            ring,
            generators,
            config: self.config.clone(),
        })
    }
}

impl Problem {
    pub fn load(path: &Path) -> Result<Problem, CliError> {
        ProblemFile::load(path)?.parse()
    }

    /// The stored settings with command-line overrides applied on top.
    pub fn run_config(&self, overrides: &ProblemConfig) -> Config {
        let mut c = Config::default();
        for layer in [&self.config, overrides] {
            if let Some(s) = layer.seed {
                c.seed = s;
            }
            if let Some(r) = layer.max_retries {
                c.max_retries = r;
            }
            if let Some(t) = layer.type_cap {
                c.type_cap = t;
            }
            if layer.degree_cap.is_some() {
                c.degree_cap = layer.degree_cap;
            }
        }
        c
    }

    pub fn parse_extra(&self, text: &str) -> Result<Polynomial, CliError> {
        parse_poly(text, &self.ring).map_err(|e| CliError::Parse(e.to_string()))
    }
}

//! TOML settings file and the effective tolerance record.
//!
//! ```toml
//! [tolerances]
//! structural = 1e-9
//! boundary_samples = 128
//!
//! [output]
//! json = "out/config.json"
//! svg = "out/figure.svg"
//! ```

use std::path::{Path, PathBuf};

use poncelet_core::Tolerances;
use serde::{Deserialize, Serialize};

use crate::args::TolOverrides;
use crate::CliError;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub tolerances: Tolerances,
    pub output: OutputPaths,
}

/// Default destinations when `-o` is not given.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputPaths {
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

impl ConfigFile {
    pub fn parse(text: &str, path: &Path) -> Result<Self, CliError> {
        let parse = |message: String| CliError::Parse {
            path: path.to_path_buf(),
            message,
        };
        let c: ConfigFile = toml::from_str(text).map_err(|e| parse(e.to_string()))?;
        let problems = c.tolerances.problems();
        if !problems.is_empty() {
            return Err(parse(problems.join("; ")));
        }
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }
}

/// `base`, replaced by the settings file when there is one, then by the
/// command-line overrides.
pub fn effective_tolerances(
    base: Tolerances,
    file: Option<&ConfigFile>,
    overrides: &TolOverrides,
) -> Result<Tolerances, CliError> {
    let mut t = file.map_or(base, |f| f.tolerances);
    overrides.apply(&mut t);
    let problems = t.problems();
    if problems.is_empty() {
        Ok(t)
    } else {
        Err(CliError::Usage(problems.join("; ")))
    }
}

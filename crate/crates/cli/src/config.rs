//! Optional TOML configuration, named by the MODULUS_CONFIG environment
//! variable. Command-line flags override file values; file values override
//! the built-in defaults.

use std::collections::BTreeMap;

use serde::Deserialize;

/// Raw file shape. Every field is optional; `tolerances` maps an audit suite
/// name to a tolerance that replaces each check's built-in one within that
/// suite (the file-level counterpart of `--tol`).
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    series_order: Option<usize>,
    lattice_cutoff: Option<usize>,
    seed: Option<u64>,
    index_cap: Option<u32>,
    digits: Option<usize>,
    tolerances: Option<BTreeMap<String, f64>>,
}

/// Resolved settings after applying file overrides to the defaults.
#[derive(Debug, Clone)]
pub struct Settings {
    pub series_order: usize,
    pub lattice_cutoff: usize,
    pub seed: u64,
    pub index_cap: u32,
    pub digits: usize,
    pub suite_tolerances: BTreeMap<String, f64>,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            series_order: 64,
            lattice_cutoff: 200,
            seed: 42,
            index_cap: modulus_core::structures::DEFAULT_INDEX_CAP,
            digits: 9,
            suite_tolerances: BTreeMap::new(),
        }
    }
}

/// Load order: defaults, then the file named by MODULUS_CONFIG if the
/// variable is set. A set-but-unreadable file is an I/O failure; a file that
/// reads but does not parse is a usage failure. Exit codes differ, so the
/// two error channels stay separate.
pub fn load() -> Result<Settings, crate::CliError> {
    let mut s = Settings::default();
    let Some(path) = std::env::var_os("MODULUS_CONFIG") else {
        return Ok(s);
    };
    let text = std::fs::read_to_string(&path).map_err(crate::CliError::Io)?;
    let file: ConfigFile = toml::from_str(&text).map_err(|e| {
        crate::CliError::Core(modulus_core::Error::Parse(format!(
            "config {}: {e}",
            path.to_string_lossy()
        )))
    })?;
    if let Some(v) = file.series_order {
        s.series_order = v;
    }
    if let Some(v) = file.lattice_cutoff {
        s.lattice_cutoff = v;
    }
    if let Some(v) = file.seed {
        s.seed = v;
    }
    if let Some(v) = file.index_cap {
        s.index_cap = v;
    }
    if let Some(v) = file.digits {
        s.digits = v;
    }
    if let Some(v) = file.tolerances {
        s.suite_tolerances = v;
    }
    Ok(s)
}

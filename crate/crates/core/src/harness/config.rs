//! Run configuration and the plain `key = value` config-file format.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::baselines::SvdOptions;
use crate::clustering::{KMeansOptions, Seeding};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Kma,
    Kmp,
    Spectral,
    Dscore,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Kma, Method::Kmp, Method::Spectral, Method::Dscore];

    pub fn name(self) -> &'static str {
        match self {
            Method::Kma => "KMA",
            Method::Kmp => "KMP",
            Method::Spectral => "SPECTRAL",
            Method::Dscore => "DSCORE",
        }
    }

    pub fn id(self) -> u64 {
        self as u64
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s
            .trim()
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .collect::<String>()
            .to_ascii_uppercase();
        Method::ALL
            .into_iter()
            .find(|m| m.name() == key)
            .ok_or_else(|| Error::InvalidInput(format!("unknown method '{s}'")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub n_grid: Vec<usize>,
    pub mc: usize,
    pub methods: Vec<Method>,
    pub master_seed: u64,
    /// `C_h` in `h = C_h sqrt(ln n / n)`.
    pub h_constant: f64,
    pub kmeans: KMeansOptions,
    pub svd: SvdOptions,
    /// Worker threads; 0 means one per available core.
    pub parallelism: usize,
    /// Fill `elapsed_ms`. Off makes output byte-reproducible.
    pub record_timing: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_grid: vec![100, 200, 400, 600, 800, 1000, 1500],
            mc: 50,
            methods: Method::ALL.to_vec(),
            master_seed: 20240917,
            h_constant: 1.0,
            kmeans: KMeansOptions::default(),
            svd: SvdOptions::default(),
            parallelism: 0,
            record_timing: true,
        }
    }
}

pub(crate) fn parse_list<T: FromStr>(value: &str) -> std::result::Result<Vec<T>, String>
where
    T::Err: fmt::Display,
{
    value
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|s| !s.is_empty())
        .map(|s| s.parse::<T>().map_err(|e| format!("'{s}': {e}")))
        .collect()
}

pub(crate) fn parse_bool(value: &str) -> std::result::Result<bool, String> {
    match value.trim().to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("'{other}' is not a boolean")),
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.mc == 0 {
            return invalid("mc must be at least 1");
        }
        if self.n_grid.is_empty() {
            return invalid("n grid is empty");
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return invalid("n grid must be strictly increasing");
        }
        if self.n_grid[0] < 4 {
            return invalid(format!("n = {} is too small (need n >= 4)", self.n_grid[0]));
        }
        if self.methods.is_empty() {
            return invalid("no methods selected");
        }
        if !(self.h_constant > 0.0 && self.h_constant.is_finite()) {
            return invalid(format!("h constant must be positive, got {}", self.h_constant));
        }
        self.kmeans.validate()
    }

    /// Applies one configuration entry. Unknown keys are rejected.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |msg: String| Error::InvalidInput(format!("{key}: {msg}"));
        let num = |v: &str| v.trim().parse::<f64>().map_err(|e| bad(e.to_string()));
        let int = |v: &str| v.trim().parse::<usize>().map_err(|e| bad(e.to_string()));
        match key {
            "n" | "n_grid" => self.n_grid = parse_list(value).map_err(bad)?,
            "mc" => self.mc = int(value)?,
            "methods" => self.methods = parse_list(value).map_err(bad)?,
            "seed" | "master_seed" => self.master_seed = value.trim().parse().map_err(|e: std::num::ParseIntError| bad(e.to_string()))?,
            "h_const" | "h_constant" => self.h_constant = num(value)?,
            "jobs" | "parallelism" => self.parallelism = int(value)?,
            "record_timing" => self.record_timing = parse_bool(value).map_err(bad)?,
            "restarts" => self.kmeans.restarts = int(value)?,
            "max_iters" => self.kmeans.max_iters = int(value)?,
            "tolerance" => self.kmeans.tolerance = num(value)?,
            "seeding" => {
                self.kmeans.seeding = match value.trim() {
                    "plusplus" | "kmeans++" | "++" => Seeding::PlusPlus,
                    "random" => Seeding::Random,
                    other => return Err(bad(format!("unknown seeding '{other}'"))),
                }
            }
            "svd_tol" => self.svd.tol = num(value)?,
            "svd_max_iters" => self.svd.max_iters = int(value)?,
            "svd_oversample" => self.svd.oversample = int(value)?,
            _ => return invalid(format!("unknown configuration key '{key}'")),
        }
        Ok(())
    }
}

/// Parses `key = value` lines. `#` starts a comment; blank lines are
/// skipped; later duplicates win.
pub fn parse_key_values(text: &str, origin: &Path) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((k, v)) = line.split_once('=') else {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                message: format!("expected 'key = value', found '{line}'"),
            });
        };
        let key = k.trim();
        if key.is_empty() {
            return Err(Error::Parse {
                path: origin.to_path_buf(),
                line: idx + 1,
                message: "empty key".into(),
            });
        }
        out.insert(key.replace('-', "_"), v.trim().to_string());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("d-score".parse::<Method>().unwrap(), Method::Dscore);
        assert!("pca".parse::<Method>().is_err());
    }

    #[test]
    fn key_values() {
        let text = "# sweep\nn = 100, 200\nmc=3\n\nmethods = kmp spectral # two\n";
        let kv = parse_key_values(text, Path::new("x.conf")).unwrap();
        let mut cfg = RunConfig::default();
        for (k, v) in &kv {
            cfg.set(k, v).unwrap();
        }
        assert_eq!(cfg.n_grid, vec![100, 200]);
        assert_eq!(cfg.mc, 3);
        assert_eq!(cfg.methods, vec![Method::Kmp, Method::Spectral]);
        cfg.validate().unwrap();
        assert!(cfg.set("colour", "red").is_err());
        assert!(parse_key_values("novalue\n", Path::new("x.conf")).is_err());
    }

    #[test]
    fn validation() {
        let defaults = RunConfig::default();
        defaults.validate().unwrap();
        let cfg = RunConfig { mc: 0, ..defaults.clone() };
        assert!(cfg.validate().is_err());
        let cfg = RunConfig { n_grid: vec![200, 100], ..defaults };
        assert!(cfg.validate().is_err());
    }
}

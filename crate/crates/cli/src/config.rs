//! Flat `key = value` run configuration, overridden by command-line flags.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

/// Raised for bad flags or configuration values; exits with status 1.
#[derive(Debug)]
pub struct Usage(pub String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

pub const KEYS: &[&str] = &[
    "certainty_threshold",
    "k",
    "lambda",
    "lambda_syn",
    "model",
    "seed",
    "t",
    "theta_detect",
    "threshold_steps",
    "window",
];

#[derive(Debug, Default)]
pub struct FileConfig {
    values: BTreeMap<String, String>,
}

impl FileConfig {
    pub fn parse(text: &str) -> Result<Self, Usage> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Usage(format!("config line {}: expected 'key = value'", i + 1)))?;
            let key = key.trim().replace('-', "_");
            if !KEYS.contains(&key.as_str()) {
                return Err(Usage(format!("config line {}: unknown key '{key}'", i + 1)));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(FileConfig { values })
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::Error::new(e).context(format!("reading {}", path.display())))?;
        Ok(Self::parse(&text)?)
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag when given, else the config value, else `default`.
    pub fn pick<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, Usage>
    where
        T::Err: fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.raw(key) {
            Some(s) => s
                .parse()
                .map_err(|e| Usage(format!("config key '{key}': {e}"))),
            None => Ok(default),
        }
    }
}

/// Parses "1,2,3".
pub fn usize_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("'{p}': {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let cfg = FileConfig::parse("# run\nk = 5\nlambda=0.25\n\ntheta-detect = 0.1 # trailing\n").unwrap();
        assert_eq!(cfg.pick(None, "k", 3usize).unwrap(), 5);
        assert_eq!(cfg.pick(Some(2usize), "k", 3).unwrap(), 2);
        assert_eq!(cfg.pick(None, "lambda", 0.5).unwrap(), 0.25);
        assert_eq!(cfg.pick(None, "theta_detect", 0.0).unwrap(), 0.1);
        assert_eq!(cfg.pick(None, "t", 0.5).unwrap(), 0.5);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(FileConfig::parse("colour = red").is_err());
        assert!(FileConfig::parse("k 3").is_err());
        let cfg = FileConfig::parse("k = many").unwrap();
        assert!(cfg.pick(None, "k", 3usize).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(usize_list("1, 2,3").unwrap(), vec![1, 2, 3]);
        assert!(usize_list("1,x").is_err());
    }
}

//! Flat key=value configuration files.
//!
//! Grammar: one `key = value` pair per line, `#` starts a comment, blank
//! lines ignored, no sections or nesting. Values are taken verbatim (no
//! quoting). Command-line flags always win over file entries.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default, Clone)]
pub struct Config {
    entries: HashMap<String, String>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let mut entries = HashMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "config {}:{}: expected `key = value`, got {:?}",
                    path.display(),
                    lineno + 1,
                    raw
                );
            };
            entries.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// CLI value if present, else the config entry parsed, else the default.
    pub fn resolve<T: std::str::FromStr>(
        &self,
        key: &str,
        cli: Option<T>,
        default: T,
    ) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = cli {
            return Ok(v);
        }
        match self.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow::anyhow!("config key {key} = {raw:?}: {e}")),
            None => Ok(default),
        }
    }

}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    #[test]
    fn parses_and_resolves() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "# comment\nn = 4\nbeta = 1/2  # trailing\n\nk = 7").unwrap();
        let cfg = Config::load(Some(file.path())).unwrap();
        assert_eq!(cfg.get("n"), Some("4"));
        assert_eq!(cfg.get("beta"), Some("1/2"));
        assert_eq!(cfg.resolve("n", None::<i64>, 3).unwrap(), 4);
        assert_eq!(cfg.resolve("n", Some(5i64), 3).unwrap(), 5);
        assert_eq!(cfg.resolve("missing", None::<i64>, 3).unwrap(), 3);
    }

    #[test]
    fn rejects_malformed_lines() {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        writeln!(file, "just a line").unwrap();
        assert!(Config::load(Some(file.path())).is_err());
    }
}

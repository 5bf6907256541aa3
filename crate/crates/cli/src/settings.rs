//! Resolved parameters: `key=value` config file entries overridden by flags.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Clone, Default)]
pub struct Settings {
    values: BTreeMap<String, String>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-")
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((k, v)) = line.split_once('=') else {
                bail!("line {}: expected key=value, got {line:?}", i + 1);
            };
            values.insert(normalize(k), v.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn set(&mut self, key: &str, value: impl Display) {
        self.values.insert(normalize(key), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow::anyhow!("invalid value {v:?} for {key}: {e}")))
            .transpose()
    }

    /// Reads `key`, recording `default` when absent so provenance lists it.
    pub fn or<T: FromStr + Display>(&mut self, key: &str, default: T) -> Result<T>
    where
        T::Err: Display,
    {
        match self.get(key)? {
            Some(v) => Ok(v),
            None => {
                self.set(key, &default);
                Ok(default)
            }
        }
    }

    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: Display,
    {
        self.raw(key)
            .map(|v| {
                v.split([',', ';'])
                    .map(str::trim)
                    .filter(|s| !s.is_empty())
                    .map(|s| s.parse::<T>().map_err(|e| anyhow::anyhow!("invalid entry {s:?} in {key}: {e}")))
                    .collect()
            })
            .transpose()
    }

    pub fn list_or<T: FromStr + Display + Clone>(&mut self, key: &str, default: &[T]) -> Result<Vec<T>>
    where
        T::Err: Display,
    {
        match self.list(key)? {
            Some(v) => Ok(v),
            None => {
                let joined: Vec<String> = default.iter().map(T::to_string).collect();
                self.set(key, joined.join(","));
                Ok(default.to_vec())
            }
        }
    }

    pub fn into_map(self) -> BTreeMap<String, String> {
        self.values
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut s = Settings::parse("# comment\ncoeffs = unit\nsample_scale=0.5\np=2 # trailing\n").unwrap();
        assert_eq!(s.raw("coeffs"), Some("unit"));
        assert_eq!(s.get::<f64>("sample-scale").unwrap(), Some(0.5));
        s.set("p", 4);
        assert_eq!(s.or("p", 1.0).unwrap(), 4.0);
        assert_eq!(s.or("q", 3.0).unwrap(), 3.0);
        assert_eq!(s.raw("q"), Some("3"));
        assert!(Settings::parse("nonsense").is_err());
        assert!(s.get::<u64>("coeffs").is_err());
    }

    #[test]
    fn lists() {
        let mut s = Settings::parse("radius=0.5,0.9\n").unwrap();
        assert_eq!(s.list::<f64>("radius").unwrap(), Some(vec![0.5, 0.9]));
        assert_eq!(s.list_or("t", &[10.0, 100.0]).unwrap(), vec![10.0, 100.0]);
        assert_eq!(s.raw("t"), Some("10,100"));
    }
}

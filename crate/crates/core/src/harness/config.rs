//! `key = value` files with optional `[section]` headers. Keys are stored as `section.key`.
//! `#` starts a comment.

use super::HarnessError;
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Config {
    entries: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Config, HarnessError> {
        let mut entries = BTreeMap::new();
        let mut section = String::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix('[') {
                let name = rest.strip_suffix(']').ok_or_else(|| {
                    HarnessError::Config(format!("line {}: unterminated section", n + 1))
                })?;
                section = name.trim().to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| {
                HarnessError::Config(format!("line {}: expected key = value", n + 1))
            })?;
            let k = k.trim();
            if k.is_empty() {
                return Err(HarnessError::Config(format!("line {}: empty key", n + 1)));
            }
            let key = if section.is_empty() {
                k.to_string()
            } else {
                format!("{section}.{k}")
            };
            entries.insert(key, v.trim().to_string());
        }
        Ok(Config { entries })
    }

    pub fn load(path: &std::path::Path) -> Result<Config, HarnessError> {
        Config::parse(&std::fs::read_to_string(path)?)
    }

    pub fn set(&mut self, key: &str, value: impl ToString) {
        self.entries.insert(key.to_string(), value.to_string());
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Typed lookup; `Ok(None)` if the key is absent.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, HarnessError> {
        match self.raw(key) {
            None => Ok(None),
            Some(v) => v
                .parse()
                .map(Some)
                .map_err(|_| HarnessError::Config(format!("bad value {v:?} for {key}"))),
        }
    }

    pub fn get_or<T: FromStr>(&self, key: &str, default: T) -> Result<T, HarnessError> {
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Comma separated pair, e.g. `a = -2, -1`.
    pub fn pair(&self, key: &str) -> Result<Option<[f64; 2]>, HarnessError> {
        let Some(v) = self.raw(key) else {
            return Ok(None);
        };
        let parts: Vec<f64> = v
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| HarnessError::Config(format!("bad pair {v:?} for {key}")))?;
        match parts[..] {
            [a, b] => Ok(Some([a, b])),
            [a] => Ok(Some([a, a])),
            _ => Err(HarnessError::Config(format!(
                "{key} needs one or two numbers"
            ))),
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sections_and_comments() {
        let c = Config::parse("order = 4 # sbp\n[problem]\nalpha = 2\na = -2, -1\n").unwrap();
        assert_eq!(c.get::<usize>("order").unwrap(), Some(4));
        assert_eq!(c.get::<f64>("problem.alpha").unwrap(), Some(2.0));
        assert_eq!(c.pair("problem.a").unwrap(), Some([-2.0, -1.0]));
        assert!(c.get::<usize>("missing").unwrap().is_none());
        assert!(c.get::<usize>("problem.alpha").is_ok());
        assert!(Config::parse("[x\n").is_err());
        assert!(Config::parse("novalue\n").is_err());
    }
}

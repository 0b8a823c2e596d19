//! Plain-text `key=value` option files.
//!
//! Keys are the long CLI flag names; `_` and `-` are interchangeable. Blank
//! lines and lines starting with `#` are skipped. A repeated key keeps every
//! value (in file order), which `fixed` relies on.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use tangle_core::Error;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct OptionFile {
    entries: BTreeMap<String, Vec<String>>,
}

fn normalize(key: &str) -> String {
    key.trim().replace('_', "-").to_ascii_lowercase()
}

impl OptionFile {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut entries: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Parse(format!("config line {}: expected key=value", n + 1))
            })?;
            let key = normalize(key);
            if key.is_empty() {
                return Err(Error::Parse(format!("config line {}: empty key", n + 1)));
            }
            entries
                .entry(key)
                .or_default()
                .push(value.trim().to_string());
        }
        Ok(OptionFile { entries })
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Last value given for `key`, parsed.
    pub fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error> {
        match self.entries.get(&normalize(key)).and_then(|v| v.last()) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|_| Error::Parse(format!("config key `{key}`: cannot parse `{raw}`"))),
        }
    }

    pub fn all(&self, key: &str) -> &[String] {
        self.entries
            .get(&normalize(key))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

/// `cli` when given, otherwise the file value, otherwise `None`.
pub fn pick<T: FromStr>(cli: Option<T>, file: &OptionFile, key: &str) -> Result<Option<T>, Error> {
    match cli {
        Some(v) => Ok(Some(v)),
        None => file.get(key),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_keys_comments_and_repeats() {
        let f =
            OptionFile::parse("# sweep\nparam = x\nomega_t=10\n\nfixed=z=5\nfixed=z=7\n").unwrap();
        assert_eq!(f.get::<String>("param").unwrap().as_deref(), Some("x"));
        assert_eq!(f.get::<f64>("omega-t").unwrap(), Some(10.0));
        assert_eq!(f.all("fixed"), ["z=5", "z=7"]);
        assert_eq!(f.get::<f64>("missing").unwrap(), None);
    }

    #[test]
    fn rejects_malformed_lines() {
        assert!(OptionFile::parse("steps 10").is_err());
        assert!(OptionFile::parse("=3").is_err());
        let f = OptionFile::parse("steps=ten").unwrap();
        assert!(f.get::<usize>("steps").is_err());
    }

    #[test]
    fn cli_value_wins() {
        let f = OptionFile::parse("cutoff=25").unwrap();
        assert_eq!(pick(Some(100.0), &f, "cutoff").unwrap(), Some(100.0));
        assert_eq!(pick(None::<f64>, &f, "cutoff").unwrap(), Some(25.0));
    }
}

//! `key = value` configuration files: one pair per line, `#` starts a
//! comment, blank lines are ignored.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::error::{usage, CliResult};

#[derive(Debug, Clone, Default)]
pub struct KeyValues {
    source: String,
    /// key -> (line number, raw value)
    entries: BTreeMap<String, (usize, String)>,
}

impl KeyValues {
    /// Parses `text`, rejecting keys outside `allowed`, repeated keys and
    /// lines without `=`.
    pub fn parse(source: &str, text: &str, allowed: &[&str]) -> CliResult<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(usage(format!(
                    "{source}:{line_no}: expected `key = value`, got `{raw}`"
                )));
            };
            let key = key.trim();
            if !allowed.contains(&key) {
                return Err(usage(format!(
                    "{source}:{line_no}: unknown key `{key}` in line `{raw}` (accepted: {})",
                    allowed.join(", ")
                )));
            }
            if entries
                .insert(key.to_string(), (line_no, value.trim().to_string()))
                .is_some()
            {
                return Err(usage(format!(
                    "{source}:{line_no}: key `{key}` given twice"
                )));
            }
        }
        Ok(Self {
            source: source.to_string(),
            entries,
        })
    }

    pub fn read(path: &str, allowed: &[&str]) -> CliResult<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| usage(format!("cannot read {path}: {e}")))?;
        Self::parse(path, &text, allowed)
    }

    /// Fails listing every key in `keys` that is absent.
    pub fn require(&self, keys: &[&str]) -> CliResult<()> {
        let missing: Vec<&str> = keys
            .iter()
            .copied()
            .filter(|k| !self.entries.contains_key(*k))
            .collect();
        if missing.is_empty() {
            Ok(())
        } else {
            Err(usage(format!(
                "{}: missing keys: {}",
                self.source,
                missing.join(", ")
            )))
        }
    }

    pub fn contains(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    pub fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        self.entries
            .get(key)
            .map(|(line, raw)| {
                raw.parse().map_err(|_| {
                    usage(format!(
                        "{}:{line}: invalid value `{raw}` for key `{key}`",
                        self.source
                    ))
                })
            })
            .transpose()
    }

    pub fn get_required<T: FromStr>(&self, key: &str) -> CliResult<T> {
        self.get(key)?
            .ok_or_else(|| usage(format!("{}: missing key: {key}", self.source)))
    }

    /// Comma-separated list.
    pub fn get_list<T: FromStr>(&self, key: &str) -> CliResult<Option<Vec<T>>> {
        self.entries
            .get(key)
            .map(|(line, raw)| {
                raw.split(',')
                    .map(|item| {
                        item.trim().parse().map_err(|_| {
                            usage(format!(
                                "{}:{line}: invalid list item `{}` for key `{key}`",
                                self.source,
                                item.trim()
                            ))
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> CliResult<Option<bool>> {
        self.entries
            .get(key)
            .map(|(line, raw)| match raw.to_ascii_lowercase().as_str() {
                "true" | "yes" | "1" => Ok(true),
                "false" | "no" | "0" => Ok(false),
                _ => Err(usage(format!(
                    "{}:{line}: invalid boolean `{raw}` for key `{key}`",
                    self.source
                ))),
            })
            .transpose()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KEYS: &[&str] = &["a", "b", "list"];

    #[test]
    fn parses_comments_and_blanks() {
        let kv = KeyValues::parse("t", "# header\n a = 1.5 \n\nb=2 # trailing\n", KEYS).unwrap();
        assert_eq!(kv.get::<f64>("a").unwrap(), Some(1.5));
        assert_eq!(kv.get::<u32>("b").unwrap(), Some(2));
        assert_eq!(kv.get::<u32>("list").unwrap(), None);
    }

    #[test]
    fn unknown_key_names_line() {
        let err = KeyValues::parse("t", "a = 1\nzeta = 3\n", KEYS).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("t:2") && msg.contains("zeta = 3"), "{msg}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn missing_keys_are_listed() {
        let kv = KeyValues::parse("t", "a = 1\n", KEYS).unwrap();
        let msg = kv.require(&["a", "b", "list"]).unwrap_err().to_string();
        assert!(msg.contains("b, list"), "{msg}");
    }

    #[test]
    fn lists_and_bad_values() {
        let kv = KeyValues::parse("t", "list = 100, 1000,10000\na = x\n", KEYS).unwrap();
        assert_eq!(
            kv.get_list::<usize>("list").unwrap(),
            Some(vec![100, 1000, 10000])
        );
        assert!(kv.get::<f64>("a").is_err());
        assert!(KeyValues::parse("t", "a = 1\na = 2\n", KEYS).is_err());
        assert!(KeyValues::parse("t", "just words\n", KEYS).is_err());
    }
}

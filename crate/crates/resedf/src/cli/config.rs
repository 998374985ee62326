//! Flat key-value configuration files: one `key = value` per line, `#`
//! comments. Unknown or duplicate keys are errors, never warnings, so a
//! typo cannot silently fall back to a default.

use crate::{Error, Result};
use std::collections::BTreeMap;
use std::path::Path;

pub(crate) struct ConfigFile {
    path: String,
    entries: BTreeMap<String, (String, usize)>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let path = path.display().to_string();
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            };
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::DataFormat {
                path: path.clone(),
                line: line_no,
                message: "expected `key = value`".into(),
            })?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if key.is_empty() {
                return Err(Error::DataFormat {
                    path: path.clone(),
                    line: line_no,
                    message: "empty key".into(),
                });
            }
            if entries.insert(key.clone(), (value, line_no)).is_some() {
                return Err(Error::DataFormat {
                    path: path.clone(),
                    line: line_no,
                    message: format!("duplicate key `{key}`"),
                });
            }
        }
        Ok(Self { path, entries })
    }

    /// Removes and returns a key's value, if present.
    pub fn take(&mut self, key: &str) -> Option<(String, usize)> {
        self.entries.remove(key)
    }

    /// Errors if any keys were never consumed, naming them.
    pub fn ensure_consumed(self) -> Result<()> {
        if let Some((key, (_, line))) = self.entries.into_iter().next() {
            return Err(Error::DataFormat {
                path: self.path,
                line,
                message: format!("unknown configuration key `{key}`"),
            });
        }
        Ok(())
    }

    pub fn parse_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.take(key)
            .map(|(v, line)| {
                v.parse::<f64>().map_err(|_| self.format_error(key, line, &v, "a number"))
            })
            .transpose()
    }

    pub fn parse_usize(&mut self, key: &str) -> Result<Option<usize>> {
        self.take(key)
            .map(|(v, line)| {
                v.parse::<usize>()
                    .map_err(|_| self.format_error(key, line, &v, "a nonnegative integer"))
            })
            .transpose()
    }

    pub fn parse_u64(&mut self, key: &str) -> Result<Option<u64>> {
        self.take(key)
            .map(|(v, line)| {
                v.parse::<u64>()
                    .map_err(|_| self.format_error(key, line, &v, "a nonnegative integer"))
            })
            .transpose()
    }

    pub fn parse_f64_list(&mut self, key: &str) -> Result<Option<Vec<f64>>> {
        self.take(key)
            .map(|(v, line)| {
                v.split(',')
                    .map(|item| {
                        item.trim().parse::<f64>().map_err(|_| {
                            self.format_error(key, line, item, "a comma-separated number list")
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    pub fn parse_usize_list(&mut self, key: &str) -> Result<Option<Vec<usize>>> {
        self.take(key)
            .map(|(v, line)| {
                v.split(',')
                    .map(|item| {
                        item.trim().parse::<usize>().map_err(|_| {
                            self.format_error(key, line, item, "a comma-separated integer list")
                        })
                    })
                    .collect()
            })
            .transpose()
    }

    fn format_error(&self, key: &str, line: usize, value: &str, expected: &str) -> Error {
        Error::DataFormat {
            path: self.path.clone(),
            line,
            message: format!("key `{key}`: `{value}` is not {expected}"),
        }
    }
}

//! Line-oriented section files.
//!
//! ```text
//! # comment
//! [material]
//! id = GGBFS
//! CaO = 43.78
//! ```
//!
//! A `[name]` line opens a section, `key = value` lines fill it. Keys may
//! repeat; `#` starts a comment anywhere on a line.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KeyValueError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: section [{section}] is missing required key `{key}`")]
    MissingKey {
        line: usize,
        section: String,
        key: String,
    },
    #[error("line {line}: key `{key}` has invalid value `{value}`: {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub key: String,
    pub value: String,
    pub line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Section {
    pub name: String,
    /// 1-based line of the `[name]` header.
    pub line: usize,
    pub entries: Vec<Entry>,
}

impl Section {
    pub fn get(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn get_all<'a>(&'a self, key: &'a str) -> impl Iterator<Item = &'a Entry> + 'a {
        self.entries.iter().filter(move |e| e.key == key)
    }

    pub fn require(&self, key: &str) -> Result<&Entry, KeyValueError> {
        self.get(key).ok_or_else(|| KeyValueError::MissingKey {
            line: self.line,
            section: self.name.clone(),
            key: key.to_string(),
        })
    }

    /// Parses an optional value, reporting the offending line on failure.
    pub fn parse_opt<T>(&self, key: &str) -> Result<Option<T>, KeyValueError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.get(key).map(|e| e.parse()).transpose()
    }

    pub fn parse_req<T>(&self, key: &str) -> Result<T, KeyValueError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.require(key)?.parse()
    }
}

impl Entry {
    pub fn parse<T>(&self) -> Result<T, KeyValueError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.value
            .parse::<T>()
            .map_err(|e| self.invalid(e.to_string()))
    }

    /// Splits a comma-separated value and parses every element.
    pub fn parse_list<T>(&self) -> Result<Vec<T>, KeyValueError>
    where
        T: FromStr,
        T::Err: fmt::Display,
    {
        self.value
            .split(',')
            .map(|s| s.trim().parse::<T>().map_err(|e| self.invalid(e.to_string())))
            .collect()
    }

    pub fn invalid(&self, reason: impl Into<String>) -> KeyValueError {
        KeyValueError::InvalidValue {
            line: self.line,
            key: self.key.clone(),
            value: self.value.clone(),
            reason: reason.into(),
        }
    }
}

pub fn parse_sections(text: &str) -> Result<Vec<Section>, KeyValueError> {
    let mut sections: Vec<Section> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest.strip_suffix(']').ok_or_else(|| KeyValueError::Syntax {
                line,
                message: format!("unterminated section header `{content}`"),
            })?;
            let name = name.trim();
            if name.is_empty() {
                return Err(KeyValueError::Syntax {
                    line,
                    message: "empty section name".into(),
                });
            }
            sections.push(Section {
                name: name.to_string(),
                line,
                entries: Vec::new(),
            });
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| KeyValueError::Syntax {
            line,
            message: format!("expected `key = value`, found `{content}`"),
        })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(KeyValueError::Syntax {
                line,
                message: "empty key".into(),
            });
        }
        let section = sections.last_mut().ok_or_else(|| KeyValueError::Syntax {
            line,
            message: format!("`{key}` appears before any section header"),
        })?;
        section.entries.push(Entry {
            key: key.to_string(),
            value: value.trim().to_string(),
            line,
        });
    }
    Ok(sections)
}

//! Flat `key = value` configuration files whose keys are the flag names.
//! Values given on the command line take precedence.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use crate::CliError;

const KNOWN_KEYS: &[&str] = &[
    "a",
    "b",
    "c",
    "r",
    "xi1",
    "xi2",
    "xi3",
    "tau",
    "out",
    "format",
    "precision",
    "w0",
    "g0",
    "s0",
    "t-end",
    "step",
    "stride",
    "vary",
    "lo",
    "hi",
    "n-points",
    "transient",
    "sample-time",
    "observable",
    "sampler",
    "strobe-period",
    "j-max",
    "boundary",
    "summary",
];

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| {
            CliError::Usage(format!("cannot read config file {}: {e}", path.display()))
        })?;
        Self::parse(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, String> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let key = key.trim().trim_start_matches("--").to_string();
            if !KNOWN_KEYS.contains(&key.as_str()) {
                return Err(format!("line {}: unknown key `{key}`", i + 1));
            }
            values.insert(key, value.trim().to_string());
        }
        Ok(ConfigFile { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }
}

/// Looks up settings from a flag first, then the config file.
pub struct Resolver<'a> {
    pub file: &'a ConfigFile,
}

impl Resolver<'_> {
    pub fn optional<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<Option<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.file.raw(key) {
            None => Ok(None),
            Some(s) => s.parse().map(Some).map_err(|e| {
                CliError::Usage(format!(
                    "invalid value `{s}` for `{key}` in config file: {e}"
                ))
            }),
        }
    }

    pub fn required<T: FromStr>(&self, key: &str, flag: Option<T>) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        self.optional(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required value --{key}")))
    }

    pub fn or<T: FromStr>(&self, key: &str, flag: Option<T>, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.optional(key, flag)?.unwrap_or(default))
    }

    pub fn flag(&self, key: &str, flag: bool) -> Result<bool, CliError> {
        if flag {
            return Ok(true);
        }
        self.or(key, None, false)
    }
}

//! Run configuration: flat `key = value` files, flag overrides and the
//! content hash that names each output directory.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, ValueEnum,
)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Png,
    Svg,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum MechanismName {
    Cw,
    Ccw,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum EngineName {
    Naive,
    Hier,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum ArithmeticName {
    Exact,
    Float,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Identities,
    Table,
    Recursion,
    Remainder,
}

/// Everything that determines the outputs of one run. The output root `out`
/// does not enter the hash.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub level: Option<u32>,
    pub m: Option<u64>,
    pub mmax: Option<u64>,
    pub nmax: Option<u32>,
    pub radius: Option<u32>,
    pub mechanism: Option<MechanismName>,
    pub seed: Option<u64>,
    pub runs: Option<u64>,
    pub engine: Option<EngineName>,
    pub arithmetic: Option<ArithmeticName>,
    pub suite: Option<Suite>,
    pub tile: Option<String>,
    pub points: Option<usize>,
    pub depth: Option<u32>,
    pub scale: Option<u32>,
    pub formats: Vec<Format>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
}

fn parse<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value
        .parse()
        .map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

fn parse_enum<T: ValueEnum>(key: &str, value: &str) -> Result<T, CliError> {
    T::from_str(value, true)
        .map_err(|_| CliError::Usage(format!("invalid value `{value}` for `{key}`")))
}

impl RunConfig {
    /// Reads `key = value` lines; blank lines and `#` comments are skipped.
    pub fn from_text(text: &str) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!("config line {}: expected key = value", n + 1))
            })?;
            let (key, value) = (key.trim(), value.trim());
            match key {
                "command" => c.command = value.to_string(),
                "level" => c.level = Some(parse(key, value)?),
                "m" => c.m = Some(parse(key, value)?),
                "mmax" => c.mmax = Some(parse(key, value)?),
                "nmax" => c.nmax = Some(parse(key, value)?),
                "radius" => c.radius = Some(parse(key, value)?),
                "mechanism" => c.mechanism = Some(parse_enum(key, value)?),
                "seed" => c.seed = Some(parse(key, value)?),
                "runs" => c.runs = Some(parse(key, value)?),
                "engine" => c.engine = Some(parse_enum(key, value)?),
                "arithmetic" => c.arithmetic = Some(parse_enum(key, value)?),
                "suite" => c.suite = Some(parse_enum(key, value)?),
                "tile" => c.tile = Some(value.to_string()),
                "points" => c.points = Some(parse(key, value)?),
                "depth" => c.depth = Some(parse(key, value)?),
                "scale" => c.scale = Some(parse(key, value)?),
                "out" => c.out = Some(PathBuf::from(value)),
                "format" => {
                    c.formats = value
                        .split(',')
                        .map(|f| parse_enum(key, f.trim()))
                        .collect::<Result<_, _>>()?
                }
                _ => {
                    return Err(CliError::Usage(format!(
                        "config line {}: unknown key `{key}`",
                        n + 1
                    )))
                }
            }
        }
        Ok(c)
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_text(&text)
    }

    /// Fields set in `flags` replace those of `self`.
    pub fn overridden_by(mut self, flags: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(if flags.$f.is_some() { self.$f = flags.$f; })*};
        }
        take!(
            level, m, mmax, nmax, radius, mechanism, seed, runs, engine, arithmetic, suite, tile,
            points, depth, scale, out
        );
        if !flags.command.is_empty() {
            self.command = flags.command;
        }
        if !flags.formats.is_empty() {
            self.formats = flags.formats;
        }
        self.formats.sort();
        self.formats.dedup();
        self
    }

    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        Sha256::digest(json.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    /// `<out>/<command>-<first 12 hex digits of the hash>`.
    pub fn run_dir(&self) -> PathBuf {
        let root = self.out.clone().unwrap_or_else(|| PathBuf::from("runs"));
        root.join(format!("{}-{}", self.command, &self.hash()[..12]))
    }
}

impl fmt::Display for RunConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}",
            serde_json::to_string(self).map_err(|_| fmt::Error)?
        )
    }
}

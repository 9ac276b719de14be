//! Experiment configuration and its TOML file format.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use greenroute::net::DuplexMode;
use greenroute::scalar::{format_fixed, parse_decimal, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::LengthMode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Algorithm {
    #[serde(rename = "mspnd")]
    Mspnd,
    #[serde(rename = "f-mspnd")]
    FMspnd,
    #[serde(rename = "mcps")]
    Mcps,
    #[serde(rename = "mcf")]
    Mcf,
    #[serde(rename = "mcf++")]
    McfPp,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Mspnd,
        Algorithm::FMspnd,
        Algorithm::Mcps,
        Algorithm::Mcf,
        Algorithm::McfPp,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Mspnd => "mspnd",
            Algorithm::FMspnd => "f-mspnd",
            Algorithm::Mcps => "mcps",
            Algorithm::Mcf => "mcf",
            Algorithm::McfPp => "mcf++",
        }
    }

    /// Whether the algorithm reads the traffic matrix at all.
    pub fn traffic_aware(self) -> bool {
        matches!(self, Algorithm::Mspnd | Algorithm::FMspnd)
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

pub fn mode_name(mode: DuplexMode) -> &'static str {
    match mode {
        DuplexMode::Simplex => "simplex",
        DuplexMode::FullDuplex => "duplex",
    }
}

pub fn parse_mode(s: &str) -> Result<DuplexMode, String> {
    match s {
        "simplex" => Ok(DuplexMode::Simplex),
        "duplex" | "full-duplex" => Ok(DuplexMode::FullDuplex),
        _ => Err(format!("unknown mode {s:?}")),
    }
}

pub fn parse_lengths(s: &str) -> Result<LengthMode, String> {
    match s {
        "given" | "asGiven" => Ok(LengthMode::Given),
        "unit" => Ok(LengthMode::Unit),
        "invcap" | "inverseCapacity" => Ok(LengthMode::Invcap),
        _ => Err(format!("unknown length mode {s:?}")),
    }
}

/// Renders a rational the way reports do: six decimals.
pub fn render_rational(v: &Rational) -> String {
    format_fixed(v, 6)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConfigError {
    #[error("no algorithms selected")]
    NoAlgorithms,
    #[error("rho list is empty")]
    NoRho,
    #[error("rho must lie strictly between 0 and 1, got {0}")]
    RhoOutOfRange(String),
    #[error("cannot read rho value {0:?}")]
    BadRho(String),
    #[error("mu list is empty")]
    NoMu,
    #[error("mu must be at least 1")]
    ZeroMu,
    #[error("no duplex modes selected")]
    NoModes,
    #[error("time limit must be positive and finite")]
    BadTimeLimit,
    #[error("cannot read config: {0}")]
    Syntax(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub algorithms: Vec<Algorithm>,
    pub rho: Vec<Rational>,
    pub mu: Vec<u32>,
    pub modes: Vec<DuplexMode>,
    pub time_limit: Duration,
    pub lengths: LengthMode,
    pub strengthening: bool,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.algorithms.is_empty() {
            return Err(ConfigError::NoAlgorithms);
        }
        if self.rho.is_empty() {
            return Err(ConfigError::NoRho);
        }
        if let Some(r) = self
            .rho
            .iter()
            .find(|r| **r <= Rational::zero() || **r >= Rational::one())
        {
            return Err(ConfigError::RhoOutOfRange(render_rational(r)));
        }
        if self.mu.is_empty() {
            return Err(ConfigError::NoMu);
        }
        if self.mu.contains(&0) {
            return Err(ConfigError::ZeroMu);
        }
        if self.modes.is_empty() {
            return Err(ConfigError::NoModes);
        }
        if self.time_limit.is_zero() {
            return Err(ConfigError::BadTimeLimit);
        }
        Ok(())
    }
}

/// A ratio written either as a TOML number or as a string such as `"3/10"`.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum RatioText {
    Number(f64),
    Text(String),
}

impl RatioText {
    fn to_rational(&self) -> Result<Rational, ConfigError> {
        let text = match self {
            RatioText::Number(v) => format!("{v}"),
            RatioText::Text(s) => s.clone(),
        };
        parse_decimal(&text).ok_or(ConfigError::BadRho(text))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    algorithms: Vec<Algorithm>,
    rho: Vec<RatioText>,
    mu: Vec<u32>,
    modes: Vec<String>,
    time_limit: f64,
    #[serde(default = "default_lengths")]
    lengths: LengthMode,
    #[serde(default = "default_true")]
    strengthening: bool,
    #[serde(default)]
    instances: Vec<InstanceSpec>,
}

fn default_lengths() -> LengthMode {
    LengthMode::Given
}

fn default_true() -> bool {
    true
}

/// Where to find one topology and its demand files.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub id: Option<String>,
    pub graph: PathBuf,
    pub demands: Vec<PathBuf>,
}

/// Parses a bench file. Relative instance paths are resolved against `base`.
pub fn parse_config(
    text: &str,
    base: &Path,
) -> Result<(ExperimentConfig, Vec<InstanceSpec>), ConfigError> {
    let file: ConfigFile = toml::from_str(text).map_err(|e| ConfigError::Syntax(e.to_string()))?;
    if !file.time_limit.is_finite() || file.time_limit <= 0.0 {
        return Err(ConfigError::BadTimeLimit);
    }
    let config = ExperimentConfig {
        algorithms: file.algorithms,
        rho: file
            .rho
            .iter()
            .map(RatioText::to_rational)
            .collect::<Result<_, _>>()?,
        mu: file.mu,
        modes: file
            .modes
            .iter()
            .map(|m| parse_mode(m).map_err(ConfigError::Syntax))
            .collect::<Result<_, _>>()?,
        time_limit: Duration::from_secs_f64(file.time_limit),
        lengths: file.lengths,
        strengthening: file.strengthening,
    };
    config.validate()?;
    let instances = file
        .instances
        .into_iter()
        .map(|spec| InstanceSpec {
            id: spec.id,
            graph: base.join(spec.graph),
            demands: spec.demands.into_iter().map(|d| base.join(d)).collect(),
        })
        .collect();
    Ok((config, instances))
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenroute::scalar::ratio;

    const GOOD: &str = r#"
algorithms = ["mspnd", "f-mspnd", "mcf++"]
rho = [0.3, "1/2"]
mu = [1, 5]
modes = ["simplex", "duplex"]
time_limit = 600
lengths = "invcap"

[[instances]]
graph = "zoo/Abilene.graph"
demands = ["zoo/Abilene.0000.demands"]
"#;

    #[test]
    fn reads_a_full_file() {
        let (config, instances) = parse_config(GOOD, Path::new("/data")).unwrap();
        assert_eq!(
            config.algorithms,
            [Algorithm::Mspnd, Algorithm::FMspnd, Algorithm::McfPp]
        );
        assert_eq!(config.rho, [ratio(3, 10), ratio(1, 2)]);
        assert_eq!(config.modes, [DuplexMode::Simplex, DuplexMode::FullDuplex]);
        assert_eq!(config.time_limit, Duration::from_secs(600));
        assert_eq!(config.lengths, LengthMode::Invcap);
        assert!(config.strengthening);
        assert_eq!(instances[0].graph, Path::new("/data/zoo/Abilene.graph"));
    }

    #[test]
    fn rejects_bad_values() {
        let with = |from: &str, to: &str| parse_config(&GOOD.replace(from, to), Path::new("."));
        assert_eq!(
            with("rho = [0.3, \"1/2\"]", "rho = [1.0]").unwrap_err(),
            ConfigError::RhoOutOfRange("1.000000".into())
        );
        assert_eq!(
            with("mu = [1, 5]", "mu = [0]").unwrap_err(),
            ConfigError::ZeroMu
        );
        assert_eq!(
            with("time_limit = 600", "time_limit = 0").unwrap_err(),
            ConfigError::BadTimeLimit
        );
        assert!(matches!(
            with("\"mcf++\"", "\"ecmp\"").unwrap_err(),
            ConfigError::Syntax(_)
        ));
        assert_eq!(
            with(
                "algorithms = [\"mspnd\", \"f-mspnd\", \"mcf++\"]",
                "algorithms = []"
            )
            .unwrap_err(),
            ConfigError::NoAlgorithms
        );
    }
}

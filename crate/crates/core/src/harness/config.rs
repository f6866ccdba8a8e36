//! JSON experiment configuration.
//!
//! Every section is optional; unset values fall back to the defaults of
//! the command or suite that reads them. `tau` and `h` are decimal strings
//! so that a configuration reproduces the same binary grid on every run.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub equation: EquationSpec,
    pub domain: DomainSpec,
    pub time: TimeSpec,
    pub data: DataSpec,
    pub truncation: Option<TruncationSpec>,
    /// Index `n` of the regularized nonlinearity used for implicit solves.
    pub regularization: Option<u32>,
    /// Suites run by `verify`; empty means all.
    pub suites: Vec<String>,
    /// Random pairs per `(m, alpha)` cell of the contraction suite.
    pub contraction_pairs: Option<usize>,
    pub output: Option<PathBuf>,
    pub seed: u64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EquationSpec {
    pub alpha: Option<f64>,
    pub m: Option<f64>,
    /// Rate of the scalar problem solved by `ode`.
    pub lambda: Option<f64>,
    pub kernel: KernelSpec,
}

/// Memory kernel: `g_alpha`, or a sum of several `g_a`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum KernelSpec {
    #[default]
    RiemannLiouville,
    Sum {
        exponents: Vec<f64>,
    },
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainSpec {
    pub dim: Option<usize>,
    /// Half-width of the box `[-R, R]^N`.
    pub radius: Option<f64>,
    /// Explicit interval ends; override `radius` when both are set.
    pub lower: Option<f64>,
    pub upper: Option<f64>,
    pub h: Option<String>,
    /// Cell count per axis, used when `h` is absent.
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeSpec {
    pub tau: Option<String>,
    #[serde(rename = "T")]
    pub horizon: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Gaussian,
    Bump,
    Box,
    Sine,
    Random,
    Zero,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataSpec {
    pub profile: Option<Profile>,
    pub amplitude: Option<f64>,
    pub width: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationSpec {
    pub n: f64,
    pub m: f64,
}

pub(crate) fn parse_decimal(name: &str, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| Error::Config(format!("{name} must be a decimal number, got {s:?}")))?;
    if !(v.is_finite() && v > 0.0) {
        return Err(Error::Config(format!("{name} must be positive, got {s}")));
    }
    Ok(v)
}

fn positive(name: &str, v: Option<f64>) -> Result<()> {
    match v {
        Some(x) if !(x.is_finite() && x > 0.0) => Err(Error::Config(format!("{name} must be positive, got {x}"))),
        _ => Ok(()),
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| Error::Config(format!("malformed config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(a) = self.equation.alpha {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::Config(format!("alpha must lie in (0, 1), got {a}")));
            }
        }
        positive("m", self.equation.m)?;
        if let Some(l) = self.equation.lambda {
            if !(l.is_finite() && l >= 0.0) {
                return Err(Error::Config(format!("lambda must be nonnegative, got {l}")));
            }
        }
        if let KernelSpec::Sum { exponents } = &self.equation.kernel {
            if exponents.is_empty() || exponents.iter().any(|a| !(*a > 0.0 && *a < 1.0)) {
                return Err(Error::Config(
                    "kernel exponents must be a nonempty list in (0, 1)".into(),
                ));
            }
        }
        if let Some(d) = self.domain.dim {
            if !(d == 1 || d == 2) {
                return Err(Error::Config(format!("dim must be 1 or 2, got {d}")));
            }
        }
        positive("radius", self.domain.radius)?;
        if let (Some(a), Some(b)) = (self.domain.lower, self.domain.upper) {
            if !(b > a) {
                return Err(Error::Config("domain upper end must exceed lower end".into()));
            }
        }
        if let Some(h) = &self.domain.h {
            parse_decimal("h", h)?;
        }
        if self.domain.cells == Some(0) {
            return Err(Error::Config("cells must be positive".into()));
        }
        if let Some(t) = &self.time.tau {
            parse_decimal("tau", t)?;
        }
        positive("T", self.time.horizon)?;
        positive("amplitude", self.data.amplitude)?;
        positive("width", self.data.width)?;
        if let Some(t) = self.truncation {
            if !(t.n >= 1.0 && t.m >= 1.0) {
                return Err(Error::Config("truncation levels must be at least 1".into()));
            }
        }
        if self.regularization == Some(0) {
            return Err(Error::Config("regularization index must be at least 1".into()));
        }
        if self.contraction_pairs == Some(0) {
            return Err(Error::Config("contraction_pairs must be positive".into()));
        }
        for s in &self.suites {
            if !super::SUITES.contains(&s.as_str()) && s != "all" {
                return Err(Error::Config(format!("unknown suite {s:?}")));
            }
        }
        Ok(())
    }

    pub fn tau_or(&self, default: f64) -> Result<f64> {
        self.time
            .tau
            .as_deref()
            .map_or(Ok(default), |s| parse_decimal("tau", s))
    }

    pub fn h_or(&self, default: f64) -> Result<f64> {
        self.domain.h.as_deref().map_or(Ok(default), |s| parse_decimal("h", s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_object_is_valid() {
        let c = ExperimentConfig::from_json("{}").unwrap();
        assert_eq!(c, ExperimentConfig::default());
    }

    #[test]
    fn round_trip() {
        let text = r#"{
            "equation": {"alpha": 0.5, "m": 0.5, "kernel": {"sum": {"exponents": [0.3, 0.6]}}},
            "domain": {"dim": 1, "radius": 10, "h": "0.1"},
            "time": {"tau": "0.001", "T": 1},
            "data": {"profile": "bump", "amplitude": 2},
            "truncation": {"n": 4, "m": 4},
            "suites": ["kernels", "mass"],
            "seed": 7
        }"#;
        let c = ExperimentConfig::from_json(text).unwrap();
        assert_eq!(c.tau_or(1.0).unwrap(), 0.001);
        assert_eq!(c.h_or(1.0).unwrap(), 0.1);
        assert_eq!(c.data.profile, Some(Profile::Bump));
        let back = ExperimentConfig::from_json(&c.to_json()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn rejects_bad_values() {
        for bad in [
            r#"{"equation": {"alpha": 1.5}}"#,
            r#"{"time": {"tau": "abc"}}"#,
            r#"{"time": {"tau": "-1"}}"#,
            r#"{"domain": {"dim": 3}}"#,
            r#"{"suites": ["nope"]}"#,
            r#"{"unknown": 1}"#,
            r#"{"equation": {"kernel": {"sum": {"exponents": []}}}}"#,
            "not json",
        ] {
            assert!(
                matches!(ExperimentConfig::from_json(bad), Err(Error::Config(_))),
                "{bad}"
            );
        }
    }
}

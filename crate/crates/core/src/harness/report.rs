//! Structured pass/fail records.

use serde::{Deserialize, Serialize};

/// How `measured` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    AtMost,
    AtLeast,
    /// `|measured - target| <= tolerance`.
    Within {
        target_bits: u64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    /// Property the check exercises.
    pub anchor: String,
    #[serde(with = "float")]
    pub measured: f64,
    #[serde(with = "float")]
    pub tolerance: f64,
    pub comparison: Comparison,
    pub pass: bool,
    /// Reported for context only; never counts as a failure.
    pub illustrative: bool,
}

impl Check {
    fn new(suite: &str, name: &str, anchor: &str, measured: f64, tolerance: f64, comparison: Comparison) -> Self {
        let pass = match comparison {
            Comparison::AtMost => measured <= tolerance,
            Comparison::AtLeast => measured >= tolerance,
            Comparison::Within { target_bits } => (measured - f64::from_bits(target_bits)).abs() <= tolerance,
        };
        Self {
            suite: suite.into(),
            name: name.into(),
            anchor: anchor.into(),
            measured,
            tolerance,
            comparison,
            pass,
            illustrative: false,
        }
    }

    /// Passes when `measured <= tolerance`. NaN fails.
    pub fn at_most(suite: &str, name: &str, anchor: &str, measured: f64, tolerance: f64) -> Self {
        Self::new(suite, name, anchor, measured, tolerance, Comparison::AtMost)
    }

    /// Passes when `measured >= threshold`. NaN fails.
    pub fn at_least(suite: &str, name: &str, anchor: &str, measured: f64, threshold: f64) -> Self {
        Self::new(suite, name, anchor, measured, threshold, Comparison::AtLeast)
    }

    pub fn within(suite: &str, name: &str, anchor: &str, measured: f64, target: f64, tolerance: f64) -> Self {
        Self::new(
            suite,
            name,
            anchor,
            measured,
            tolerance,
            Comparison::Within {
                target_bits: target.to_bits(),
            },
        )
    }

    /// Boolean outcome recorded as measured 1 (true) or 0 against 1.
    pub fn holds(suite: &str, name: &str, anchor: &str, ok: bool) -> Self {
        Self::at_least(suite, name, anchor, if ok { 1.0 } else { 0.0 }, 1.0)
    }

    pub fn illustrative(mut self) -> Self {
        self.illustrative = true;
        self
    }

    pub fn target(&self) -> Option<f64> {
        match self.comparison {
            Comparison::Within { target_bits } => Some(f64::from_bits(target_bits)),
            _ => None,
        }
    }

    pub fn counts_as_failure(&self) -> bool {
        !self.pass && !self.illustrative
    }
}

// JSON has no infinities or NaN; those travel as the strings "inf",
// "-inf" and "nan".
mod float {
    use serde::{de::Error, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&crate::harness::output::format_number(*v))
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Number(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Number(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(D::Error::custom(format!("not a number: {other:?}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub illustrative: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
    /// Suites skipped because their data made every check trivial.
    pub vacuous: Vec<String>,
    pub notes: Vec<String>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, check: Check) {
        self.checks.push(check);
        self.refresh();
    }

    pub fn extend(&mut self, checks: impl IntoIterator<Item = Check>) {
        self.checks.extend(checks);
        self.refresh();
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn mark_vacuous(&mut self, suite: &str) {
        self.vacuous.push(suite.into());
    }

    pub fn merge(&mut self, other: VerificationReport) {
        self.checks.extend(other.checks);
        self.vacuous.extend(other.vacuous);
        self.notes.extend(other.notes);
        self.refresh();
    }

    fn refresh(&mut self) {
        let illustrative = self.checks.iter().filter(|c| c.illustrative).count();
        let failed = self.checks.iter().filter(|c| c.counts_as_failure()).count();
        let total = self.checks.len();
        self.summary = Summary {
            total,
            passed: total - illustrative - failed,
            failed,
            illustrative,
        };
    }

    pub fn all_pass(&self) -> bool {
        self.summary.failed == 0
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.counts_as_failure())
    }

    pub fn find(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

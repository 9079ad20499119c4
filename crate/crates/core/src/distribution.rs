use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::sum::compensated_sum;
use crate::{Error, Result};

/// How a [`NumberDistribution`] was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Binned,
    Analytic,
    Quadrature,
    WignerAverage,
}

impl Method {
    /// Methods that estimate from samples and therefore carry standard errors.
    pub fn is_stochastic(self) -> bool {
        matches!(self, Method::Binned | Method::WignerAverage)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Binned => "binned",
            Method::Analytic => "analytic",
            Method::Quadrature => "quadrature",
            Method::WignerAverage => "wigner-average",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binned" => Ok(Method::Binned),
            "analytic" => Ok(Method::Analytic),
            "quadrature" => Ok(Method::Quadrature),
            "wigner-average" => Ok(Method::WignerAverage),
            other => Err(Error::Config(format!("unknown method '{other}'"))),
        }
    }
}

/// Slack allowed on the `[0, 1]` bound for deterministic methods, which can
/// carry round-off of either sign.
const ROUNDOFF: f64 = 1e-9;

/// Probability mass over `n = 0..=n_max`.
///
/// Deterministic methods hold entries in `[0, 1]` up to round-off.
/// Stochastic estimates carry a standard error per entry and are not
/// clipped, so Wigner-average entries may be slightly negative.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NumberDistribution {
    probs: Vec<f64>,
    method: Method,
    stderr: Option<Vec<f64>>,
    /// Samples behind a stochastic estimate.
    samples: Option<u64>,
    /// Fraction of samples above `n_max` (binned estimates only).
    overflow: Option<f64>,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

impl NumberDistribution {
    /// Deterministic distribution (analytic or quadrature).
    pub fn exact(probs: Vec<f64>, method: Method) -> Result<Self> {
        if method.is_stochastic() {
            return Err(Error::domain(format!("{method} estimates need standard errors")));
        }
        if probs.is_empty() {
            return Err(Error::domain("distribution needs at least one entry"));
        }
        if let Some((n, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !(**p >= -ROUNDOFF && **p <= 1.0 + ROUNDOFF))
        {
            return Err(Error::domain(format!("P_{n} = {p} outside [0, 1]")));
        }
        let total = compensated_sum(&probs);
        if total > 1.0 + ROUNDOFF {
            return Err(Error::domain(format!("total probability {total} exceeds 1")));
        }
        Ok(Self {
            probs,
            method,
            stderr: None,
            samples: None,
            overflow: None,
            metadata: BTreeMap::new(),
        })
    }

    /// Sample-based estimate with per-entry standard errors.
    pub fn stochastic(probs: Vec<f64>, stderr: Vec<f64>, method: Method, samples: u64) -> Result<Self> {
        if !method.is_stochastic() {
            return Err(Error::domain(format!(
                "{method} distributions carry no standard errors"
            )));
        }
        if probs.is_empty() || probs.len() != stderr.len() {
            return Err(Error::domain("probabilities and standard errors must align"));
        }
        if probs.iter().chain(&stderr).any(|v| !v.is_finite()) {
            return Err(Error::domain("non-finite entry in stochastic estimate"));
        }
        Ok(Self {
            probs,
            method,
            stderr: Some(stderr),
            samples: Some(samples),
            overflow: None,
            metadata: BTreeMap::new(),
        })
    }

    pub(crate) fn with_overflow(mut self, fraction: f64) -> Self {
        self.overflow = Some(fraction);
        self
    }

    pub fn with_metadata(mut self, key: impl Into<String>, value: impl ToString) -> Self {
        self.metadata.insert(key.into(), value.to_string());
        self
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn get(&self, n: usize) -> f64 {
        self.probs.get(n).copied().unwrap_or(0.0)
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn stderr(&self) -> Option<&[f64]> {
        self.stderr.as_deref()
    }

    pub fn samples(&self) -> Option<u64> {
        self.samples
    }

    pub fn overflow(&self) -> Option<f64> {
        self.overflow
    }

    pub fn metadata(&self) -> &BTreeMap<String, String> {
        &self.metadata
    }

    pub fn n_max(&self) -> usize {
        self.probs.len() - 1
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    /// Stored mass plus any reported overflow.
    pub fn total(&self) -> f64 {
        compensated_sum(&self.probs) + self.overflow.unwrap_or(0.0)
    }

    pub fn mean(&self) -> f64 {
        let terms: Vec<f64> = self.probs.iter().enumerate().map(|(n, p)| n as f64 * p).collect();
        compensated_sum(&terms)
    }

    /// Smallest `[lo, hi]` with at most `(1 − mass)/2` of the stored
    /// probability on either side.
    pub fn central_range(&self, mass: f64) -> (usize, usize) {
        let tail = 0.5 * (1.0 - mass) * compensated_sum(&self.probs);
        let mut acc = 0.0;
        let mut lo = 0;
        for (n, p) in self.probs.iter().enumerate() {
            acc += p;
            if acc > tail {
                lo = n;
                break;
            }
        }
        let mut acc = 0.0;
        let mut hi = self.n_max();
        for (n, p) in self.probs.iter().enumerate().rev() {
            acc += p;
            if acc > tail {
                hi = n;
                break;
            }
        }
        (lo, hi.max(lo))
    }

    /// Strict interior local maxima with index `< limit`, plus `n = 0` when
    /// it exceeds `n = 1`.
    pub fn local_maxima(&self, limit: usize) -> Vec<usize> {
        let p = &self.probs;
        let mut out = Vec::new();
        if p.len() > 1 && p[0] > p[1] {
            out.push(0);
        }
        for n in 1..limit.min(p.len().saturating_sub(1)) {
            if p[n] > p[n - 1] && p[n] > p[n + 1] {
                out.push(n);
            }
        }
        out
    }

    /// Keep entries `0..=n_max`, dropping the rest.
    pub fn truncated(&self, n_max: usize) -> Self {
        let keep = (n_max + 1).min(self.probs.len());
        let mut out = self.clone();
        out.probs.truncate(keep);
        if let Some(se) = out.stderr.as_mut() {
            se.truncate(keep);
        }
        out
    }
}

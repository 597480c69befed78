//! Bucket assignment functions.
//!
//! A bucket assignment function `γ: [0, 1] → [0, 1]` maps a normalized hash
//! `x` to a normalized bucket index; the bucket of `x` among `B` buckets is
//! `⌈γ(x)·B⌉`. Convex functions put more keys into the low-index buckets,
//! which are placed first while the table is still empty.
//!
//! Evaluating a logarithm per key is too slow for the build loop, so every
//! function is tabulated on a uniform grid of [`GRID`] intervals and
//! evaluated by linear interpolation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of grid intervals. The table stores `GRID + 1` entries.
pub const GRID: usize = 2048;

const EPSILON_CAP: f64 = 0.99;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentKind {
    /// `γ(x) = x`: every bucket has the same expected size.
    Uniform,
    /// Piecewise linear: 60% of the keys go to the first 30% of buckets.
    Skew,
    /// `β_*(x) = x + (1 − x)·ln(1 − x)`.
    BetaStar,
    /// `β_ε(x) = εx + (1 − ε)·β_*(x)`.
    BetaEps,
}

impl AssignmentKind {
    pub fn tag(self) -> u8 {
        match self {
            AssignmentKind::Uniform => 0,
            AssignmentKind::Skew => 1,
            AssignmentKind::BetaStar => 2,
            AssignmentKind::BetaEps => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        Some(match tag {
            0 => AssignmentKind::Uniform,
            1 => AssignmentKind::Skew,
            2 => AssignmentKind::BetaStar,
            3 => AssignmentKind::BetaEps,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            AssignmentKind::Uniform => "uniform",
            AssignmentKind::Skew => "skew",
            AssignmentKind::BetaStar => "beta-star",
            AssignmentKind::BetaEps => "beta-eps",
        }
    }
}

impl std::fmt::Display for AssignmentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for AssignmentKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "uniform" => Ok(AssignmentKind::Uniform),
            "skew" => Ok(AssignmentKind::Skew),
            "beta-star" => Ok(AssignmentKind::BetaStar),
            "beta-eps" => Ok(AssignmentKind::BetaEps),
            other => Err(format!("unknown assignment function `{other}`")),
        }
    }
}

/// Which assignment function to use, plus `ε` for [`AssignmentKind::BetaEps`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssignmentSpec {
    pub kind: AssignmentKind,
    pub epsilon: f64,
}

impl AssignmentSpec {
    pub fn uniform() -> Self {
        Self { kind: AssignmentKind::Uniform, epsilon: 0.0 }
    }

    pub fn skew() -> Self {
        Self { kind: AssignmentKind::Skew, epsilon: 0.0 }
    }

    pub fn beta_star() -> Self {
        Self { kind: AssignmentKind::BetaStar, epsilon: 0.0 }
    }

    pub fn beta_eps(epsilon: f64) -> Self {
        Self { kind: AssignmentKind::BetaEps, epsilon }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.epsilon) {
            return Err(Error::Domain { value: self.epsilon, domain: "[0, 1)" });
        }
        Ok(())
    }

    /// Evaluates the analytic function (not the tabulated one).
    pub fn apply(&self, x: f64) -> Result<f64> {
        match self.kind {
            AssignmentKind::Uniform => {
                check_unit(x)?;
                Ok(x)
            }
            AssignmentKind::Skew => skew(x),
            AssignmentKind::BetaStar => beta_star(x),
            AssignmentKind::BetaEps => beta_eps(x, self.epsilon),
        }
    }
}

fn check_unit(x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::Domain { value: x, domain: "[0, 1]" })
    }
}

/// `x + (1 − x)·ln(1 − x)`, with the limit value 1 at `x = 1`.
pub fn beta_star(x: f64) -> Result<f64> {
    check_unit(x)?;
    if x == 1.0 {
        return Ok(1.0);
    }
    Ok(x + (1.0 - x) * (-x).ln_1p())
}

pub fn beta_eps(x: f64, epsilon: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&epsilon) {
        return Err(Error::Domain { value: epsilon, domain: "[0, 1)" });
    }
    Ok(epsilon * x + (1.0 - epsilon) * beta_star(x)?)
}

/// `ε = λ / (5·√P)` clamped to `[0, 0.99]`.
pub fn default_epsilon(lambda: f64, partition_size: f64) -> f64 {
    let eps = lambda / (5.0 * partition_size.sqrt());
    if eps.is_nan() {
        return 0.0;
    }
    eps.clamp(0.0, EPSILON_CAP)
}

pub fn skew(x: f64) -> Result<f64> {
    check_unit(x)?;
    Ok(if x <= 0.6 { 0.5 * x } else { 1.75 * x - 0.75 })
}

/// `B = round(P / λ)` with ties to even (2500 / 8 gives 312), at least 1.
pub fn bucket_count(partition_size: f64, lambda: f64) -> usize {
    ((partition_size / lambda).round_ties_even() as usize).max(1)
}

/// Bucket assignment function sampled at `x = k / GRID` for `k = 0..=GRID`.
#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentTable {
    entries: Vec<f64>,
    spec: AssignmentSpec,
}

impl AssignmentTable {
    pub fn tabulate(spec: AssignmentSpec) -> Result<Self> {
        spec.validate()?;
        let mut entries = Vec::with_capacity(GRID + 1);
        for k in 0..=GRID {
            entries.push(spec.apply(k as f64 / GRID as f64)?);
        }
        entries[0] = 0.0;
        entries[GRID] = 1.0;
        Ok(Self { entries, spec })
    }

    /// Wraps raw grid values. Only endpoint pinning and monotonicity are checked.
    pub fn from_entries(spec: AssignmentSpec, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != GRID + 1 {
            return Err(Error::InvalidConfig(format!(
                "assignment table needs {} entries, got {}",
                GRID + 1,
                entries.len()
            )));
        }
        if entries[0] != 0.0 || entries[GRID] != 1.0 || entries.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidConfig(
                "assignment table must be non-decreasing from 0 to 1".into(),
            ));
        }
        Ok(Self { entries, spec })
    }

    pub fn spec(&self) -> AssignmentSpec {
        self.spec
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.entries.windows(2).all(|w| w[1] > w[0])
    }

    /// Interpolated value; exact at grid points. Accepts `x = 0` for internal use.
    #[inline]
    fn interpolate(&self, x: f64) -> f64 {
        let pos = x * GRID as f64;
        let k = pos as usize;
        if k >= GRID {
            return self.entries[GRID];
        }
        let frac = pos - k as f64;
        let lo = self.entries[k];
        if frac == 0.0 {
            return lo;
        }
        lo + frac * (self.entries[k + 1] - lo)
    }

    /// `γ(x)` for `x ∈ (0, 1]`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(x > 0.0 && x <= 1.0) {
            return Err(Error::Domain { value: x, domain: "(0, 1]" });
        }
        Ok(self.interpolate(x))
    }

    /// 1-based bucket index `⌈γ(x)·B⌉`, clamped to `[1, B]`.
    #[inline]
    pub fn bucket_for_hash(&self, x: f64, buckets: usize) -> usize {
        debug_assert!(x > 0.0 && x <= 1.0 && buckets >= 1);
        let b = (self.interpolate(x) * buckets as f64).ceil() as usize;
        b.clamp(1, buckets)
    }

    /// `x` with `eval(x) = y`, found by bisection on the interpolated table.
    pub fn inverse(&self, y: f64) -> Result<f64> {
        check_unit(y)?;
        if !self.is_strictly_increasing() {
            return Err(Error::NotStrictlyIncreasing);
        }
        if y == 0.0 {
            return Ok(0.0);
        }
        if y == 1.0 {
            return Ok(1.0);
        }
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.interpolate(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::trust::compute_q;

/// Strictly increasing transform applied to raw credit counts when computing
/// the weight of trust. Identity keeps raw counts; Log1p damps heavy
/// evaluators without ever reordering them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CreditFn {
    Identity,
    Log1p,
}

impl CreditFn {
    pub fn apply(self, credit: f64) -> f64 {
        match self {
            CreditFn::Identity => credit,
            CreditFn::Log1p => credit.ln_1p(),
        }
    }
}

impl fmt::Display for CreditFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CreditFn::Identity => f.write_str("identity"),
            CreditFn::Log1p => f.write_str("log1p"),
        }
    }
}

impl FromStr for CreditFn {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(CreditFn::Identity),
            "log1p" => Ok(CreditFn::Log1p),
            other => Err(Error::InvalidConfig(format!(
                "unknown credit function `{other}` (expected identity or log1p)"
            ))),
        }
    }
}

/// Width of one time interval, in seconds. Calendar-flavored widths use mean
/// durations (a year is 365.25 days) so interval arithmetic stays pure
/// integer math on the time axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct IntervalWidth(i64);

pub const SECS_PER_DAY: i64 = 86_400;

impl IntervalWidth {
    pub const DAY: IntervalWidth = IntervalWidth(SECS_PER_DAY);
    pub const WEEK: IntervalWidth = IntervalWidth(7 * SECS_PER_DAY);
    /// Mean Gregorian month: 365.25 days / 12.
    pub const MONTH: IntervalWidth = IntervalWidth(2_629_800);
    /// Quarter of the mean Gregorian year.
    pub const QUARTER: IntervalWidth = IntervalWidth(3 * 2_629_800);
    /// Half of the mean Gregorian year: 182.625 days.
    pub const HALF_YEAR: IntervalWidth = IntervalWidth(6 * 2_629_800);
    pub const YEAR: IntervalWidth = IntervalWidth(12 * 2_629_800);

    pub fn from_seconds(secs: i64) -> Result<Self> {
        if secs <= 0 {
            return Err(Error::InvalidConfig(format!(
                "interval width must be positive, got {secs}s"
            )));
        }
        Ok(IntervalWidth(secs))
    }

    pub fn seconds(self) -> i64 {
        self.0
    }
}

impl fmt::Display for IntervalWidth {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}s", self.0)
    }
}

impl FromStr for IntervalWidth {
    type Err = Error;

    /// Accepts a named width (`half-year`, `year`, `quarter`, `month`,
    /// `week`, `day`), a day count (`90d`), or raw seconds (`3600s`).
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "day" => return Ok(IntervalWidth::DAY),
            "week" => return Ok(IntervalWidth::WEEK),
            "month" => return Ok(IntervalWidth::MONTH),
            "quarter" => return Ok(IntervalWidth::QUARTER),
            "half-year" => return Ok(IntervalWidth::HALF_YEAR),
            "year" => return Ok(IntervalWidth::YEAR),
            _ => {}
        }
        let parse_num = |digits: &str| -> Result<i64> {
            digits.parse::<i64>().map_err(|_| {
                Error::InvalidConfig(format!("unrecognized interval width `{s}`"))
            })
        };
        if let Some(days) = s.strip_suffix('d') {
            return IntervalWidth::from_seconds(parse_num(days)?.saturating_mul(SECS_PER_DAY));
        }
        if let Some(secs) = s.strip_suffix('s') {
            return IntervalWidth::from_seconds(parse_num(secs)?);
        }
        Err(Error::InvalidConfig(format!(
            "unrecognized interval width `{s}` (expected a name like half-year, or 90d, or 3600s)"
        )))
    }
}

/// Model parameters shared by every computation in a run.
///
/// `q` is derived from the half-life and kept consistent with it, which is
/// why the fields are private: `q = 2^(1/half_life)`, so evidence loses half
/// its influence every `half_life` intervals.
#[derive(Debug, Clone, Serialize)]
pub struct EngineConfig {
    scale_max: f64,
    half_life: f64,
    q: f64,
    interval_width: IntervalWidth,
    credit_fn: CreditFn,
}

impl EngineConfig {
    pub fn new(
        scale_max: f64,
        half_life: f64,
        interval_width: IntervalWidth,
        credit_fn: CreditFn,
    ) -> Result<Self> {
        if !scale_max.is_finite() || scale_max <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "scale maximum must be a positive finite number, got {scale_max}"
            )));
        }
        let q = compute_q(half_life)?;
        Ok(EngineConfig {
            scale_max,
            half_life,
            q,
            interval_width,
            credit_fn,
        })
    }

    /// Upper end `M` of the evaluation scale `[0, M]`.
    pub fn scale_max(&self) -> f64 {
        self.scale_max
    }

    /// Half-life `t` in interval units.
    pub fn half_life(&self) -> f64 {
        self.half_life
    }

    /// Discount base `q = 2^(1/t)`.
    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn interval_width(&self) -> IntervalWidth {
        self.interval_width
    }

    pub fn credit_fn(&self) -> CreditFn {
        self.credit_fn
    }
}

impl Default for EngineConfig {
    /// Three-point scale, two-interval half-life, half-year intervals.
    fn default() -> Self {
        EngineConfig::new(3.0, 2.0, IntervalWidth::HALF_YEAR, CreditFn::Identity)
            .expect("default configuration is valid")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn q_follows_half_life() {
        let cfg = EngineConfig::default();
        assert_eq!(cfg.scale_max(), 3.0);
        assert!((cfg.q() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_scale() {
        assert!(EngineConfig::new(0.0, 2.0, IntervalWidth::HALF_YEAR, CreditFn::Identity).is_err());
        assert!(
            EngineConfig::new(-1.0, 2.0, IntervalWidth::HALF_YEAR, CreditFn::Identity).is_err()
        );
        assert!(
            EngineConfig::new(f64::NAN, 2.0, IntervalWidth::HALF_YEAR, CreditFn::Identity).is_err()
        );
    }

    #[test]
    fn interval_width_parses_names_and_units() {
        assert_eq!(
            "half-year".parse::<IntervalWidth>().unwrap(),
            IntervalWidth::HALF_YEAR
        );
        assert_eq!(IntervalWidth::HALF_YEAR.seconds(), 15_778_800);
        assert_eq!("90d".parse::<IntervalWidth>().unwrap().seconds(), 7_776_000);
        assert_eq!("3600s".parse::<IntervalWidth>().unwrap().seconds(), 3_600);
        assert!("fortnight".parse::<IntervalWidth>().is_err());
        assert!("0s".parse::<IntervalWidth>().is_err());
        assert!("-5d".parse::<IntervalWidth>().is_err());
    }

    #[test]
    fn log1p_credit_is_damped_but_increasing() {
        let f = CreditFn::Log1p;
        assert_eq!(f.apply(0.0), 0.0);
        assert!(f.apply(10.0) < 10.0);
        assert!(f.apply(10.0) > f.apply(9.0));
    }
}

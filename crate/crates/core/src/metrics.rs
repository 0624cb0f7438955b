//! Score normalization kernels.
//!
//! Every metric is a dimensionless ratio where 1.0 means 100%. Percent only
//! appears at the presentation layer ([`format_percent`]).

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::registry::{BaselineRecord, ScoreScale};

/// Maximum episode length: 30 minutes of emulation at 60 frames per second.
pub const FRAMES_PER_HALF_HOUR: u64 = 108_000;
/// 108,000 frames per half hour, two half hours per hour, 24 hours.
pub const FRAMES_PER_DAY: u64 = FRAMES_PER_HALF_HOUR * 2 * 24;

pub const CHNS_CAP: f64 = 1.0;
pub const SABER_CAP: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Raw,
    MinMax,
    Hns,
    Chns,
    Hwrns,
    Saber,
}

impl MetricKind {
    pub fn label(self) -> &'static str {
        match self {
            MetricKind::Raw => "RAW",
            MetricKind::MinMax => "MINMAX",
            MetricKind::Hns => "HNS",
            MetricKind::Chns => "CHNS",
            MetricKind::Hwrns => "HWRNS",
            MetricKind::Saber => "SABER",
        }
    }

    pub fn is_capped(self) -> bool {
        matches!(self, MetricKind::Chns | MetricKind::Saber)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for MetricKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "raw" => Ok(MetricKind::Raw),
            "minmax" | "min-max" | "min_max" => Ok(MetricKind::MinMax),
            "hns" => Ok(MetricKind::Hns),
            "chns" => Ok(MetricKind::Chns),
            "hwrns" => Ok(MetricKind::Hwrns),
            "saber" => Ok(MetricKind::Saber),
            other => Err(format!("unknown metric `{other}`")),
        }
    }
}

/// How SABER treats negative HWRNS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapMode {
    /// Clamp to [0, 2], as the formula states.
    #[default]
    SpecFloor,
    /// Upper cap only. The published SABER tables print negative cells.
    TableCompat,
}

impl fmt::Display for CapMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CapMode::SpecFloor => "spec-floor",
            CapMode::TableCompat => "table-compat",
        })
    }
}

impl FromStr for CapMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "spec-floor" => Ok(CapMode::SpecFloor),
            "table-compat" => Ok(CapMode::TableCompat),
            other => Err(format!("unknown cap mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("normalization denominator is zero (base = reference = {0})")]
    ZeroDenominator(f64),
    #[error("non-finite input or result: {0}")]
    NonFinite(f64),
    #[error("expected a {expected} value, got {found}")]
    WrongKind {
        expected: MetricKind,
        found: MetricKind,
    },
    #[error("learning efficiency needs a positive frame count")]
    ZeroFrames,
    #[error("degenerate score scale [{r_min}, {r_max}]")]
    DegenerateScale { r_min: f64, r_max: f64 },
}

/// A normalized ratio tagged with the metric that produced it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    value: f64,
    kind: MetricKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    cap_mode: Option<CapMode>,
}

impl MetricValue {
    /// Wraps an already computed uncapped ratio. Capped kinds are only
    /// produced by [`chns`] and [`saber`].
    pub fn uncapped(value: f64, kind: MetricKind) -> Result<Self, MetricError> {
        if kind.is_capped() {
            return Err(MetricError::WrongKind {
                expected: MetricKind::Hns,
                found: kind,
            });
        }
        if !value.is_finite() {
            return Err(MetricError::NonFinite(value));
        }
        Ok(MetricValue {
            value,
            kind,
            cap_mode: None,
        })
    }

    pub fn hns(value: f64) -> Result<Self, MetricError> {
        Self::uncapped(value, MetricKind::Hns)
    }

    pub fn hwrns(value: f64) -> Result<Self, MetricError> {
        Self::uncapped(value, MetricKind::Hwrns)
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn kind(&self) -> MetricKind {
        self.kind
    }

    pub fn cap_mode(&self) -> Option<CapMode> {
        self.cap_mode
    }

    pub fn percent(&self) -> f64 {
        self.value * 100.0
    }
}

/// `(raw - base) / (reference - base)`, uncapped.
pub fn normalize(raw: f64, base: f64, reference: f64) -> Result<f64, MetricError> {
    for x in [raw, base, reference] {
        if !x.is_finite() {
            return Err(MetricError::NonFinite(x));
        }
    }
    if reference == base {
        return Err(MetricError::ZeroDenominator(base));
    }
    let z = (raw - base) / (reference - base);
    if z.is_finite() {
        Ok(z)
    } else {
        Err(MetricError::NonFinite(z))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MinMaxScaled {
    pub value: MetricValue,
    /// The raw score fell outside the declared scale and was clamped.
    pub clamped: bool,
}

pub fn min_max_scale(raw: f64, scale: &ScoreScale) -> Result<MinMaxScaled, MetricError> {
    if !(scale.r_max > scale.r_min) {
        return Err(MetricError::DegenerateScale {
            r_min: scale.r_min,
            r_max: scale.r_max,
        });
    }
    let z = normalize(raw, scale.r_min, scale.r_max)?;
    let clamped = !(0.0..=1.0).contains(&z);
    Ok(MinMaxScaled {
        value: MetricValue {
            value: z.clamp(0.0, 1.0),
            kind: MetricKind::MinMax,
            cap_mode: None,
        },
        clamped,
    })
}

/// Human normalized score.
pub fn hns(raw: f64, baseline: &BaselineRecord) -> Result<MetricValue, MetricError> {
    let z = normalize(raw, baseline.random, baseline.human_average)?;
    MetricValue::hns(z)
}

/// Human world record normalized score.
pub fn hwrns(raw: f64, baseline: &BaselineRecord) -> Result<MetricValue, MetricError> {
    let z = normalize(raw, baseline.random, baseline.human_world_record)?;
    MetricValue::hwrns(z)
}

/// HNS clamped to [0, 1]. Accepts an already capped value (idempotent).
pub fn chns(h: MetricValue) -> Result<MetricValue, MetricError> {
    match h.kind {
        MetricKind::Hns | MetricKind::Chns => Ok(MetricValue {
            value: h.value.clamp(0.0, CHNS_CAP),
            kind: MetricKind::Chns,
            cap_mode: None,
        }),
        found => Err(MetricError::WrongKind {
            expected: MetricKind::Hns,
            found,
        }),
    }
}

/// HWRNS capped at 2; floored at 0 only in [`CapMode::SpecFloor`].
pub fn saber(h: MetricValue, mode: CapMode) -> Result<MetricValue, MetricError> {
    if !matches!(h.kind, MetricKind::Hwrns | MetricKind::Saber) {
        return Err(MetricError::WrongKind {
            expected: MetricKind::Hwrns,
            found: h.kind,
        });
    }
    let capped = h.value.min(SABER_CAP);
    let value = match mode {
        CapMode::SpecFloor => capped.max(0.0),
        CapMode::TableCompat => capped,
    };
    Ok(MetricValue {
        value,
        kind: MetricKind::Saber,
        cap_mode: Some(mode),
    })
}

/// A human world record is broken when HWRNS >= 1 (inclusive).
pub fn hwrb_indicator(h: MetricValue) -> Result<bool, MetricError> {
    if h.kind != MetricKind::Hwrns {
        return Err(MetricError::WrongKind {
            expected: MetricKind::Hwrns,
            found: h.kind,
        });
    }
    Ok(h.value >= 1.0)
}

/// Real-time days of play represented by a frame count.
pub fn game_time_days(frames: u64) -> f64 {
    frames as f64 / FRAMES_PER_DAY as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EfficiencyValue {
    pub value: f64,
    pub frames: u64,
}

/// Metric ratio per training frame.
pub fn learning_efficiency(metric_ratio: f64, frames: u64) -> Result<EfficiencyValue, MetricError> {
    if frames == 0 {
        return Err(MetricError::ZeroFrames);
    }
    if !metric_ratio.is_finite() {
        return Err(MetricError::NonFinite(metric_ratio));
    }
    Ok(EfficiencyValue {
        value: metric_ratio / frames as f64,
        frames,
    })
}

/// Percent with two decimals, halves rounded away from zero.
pub fn format_percent(ratio: f64) -> String {
    let scaled = ratio * 100.0 * 100.0;
    // Cancel representation error so that 12.345 is treated as an exact half.
    let nudged = scaled + scaled.signum() * scaled.abs().max(1.0) * 1e-11;
    let rounded = nudged.round() / 100.0;
    let rounded = if rounded == 0.0 { 0.0 } else { rounded };
    format!("{rounded:.2}")
}

/// Three significant figures in the `4.37E-08` style of the score tables.
pub fn format_efficiency(value: f64) -> String {
    let s = format!("{value:.2E}");
    match s.split_once('E') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().unwrap_or(0);
            let sign = if exp < 0 { '-' } else { '+' };
            format!("{mantissa}E{sign}{:02}", exp.abs())
        }
        None => s,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::GameId;
    use crate::registry::Baselines;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    fn baseline(random: f64, human_average: f64, hwr: f64) -> BaselineRecord {
        BaselineRecord {
            game: GameId::parse("alien").unwrap(),
            random,
            human_average,
            human_world_record: hwr,
            source_tag: String::new(),
        }
    }

    #[test]
    fn normalize_examples() {
        assert!(close(normalize(9491.7, 227.8, 7127.8).unwrap(), 1.3426, 5e-5));
        assert_eq!(normalize(227.8, 227.8, 7127.8).unwrap(), 0.0);
        assert!(close(normalize(100.0, 0.1, 12.1).unwrap(), 8.3250, 5e-5));
    }

    #[test]
    fn normalize_rejects_zero_denominator() {
        assert_eq!(
            normalize(5.0, 3.0, 3.0),
            Err(MetricError::ZeroDenominator(3.0))
        );
        assert!(matches!(
            normalize(f64::NAN, 0.0, 1.0),
            Err(MetricError::NonFinite(_))
        ));
    }

    #[test]
    fn min_max_examples() {
        let pong = ScoreScale::pong();
        assert_eq!(min_max_scale(21.0, &pong).unwrap().value.value(), 1.0);
        assert_eq!(min_max_scale(-21.0, &pong).unwrap().value.value(), 0.0);
        assert_eq!(min_max_scale(0.0, &pong).unwrap().value.value(), 0.5);
        let out = min_max_scale(30.0, &pong).unwrap();
        assert!(out.clamped);
        assert_eq!(out.value.value(), 1.0);
        let bad = ScoreScale {
            game: pong.game,
            r_min: 1.0,
            r_max: 1.0,
        };
        assert!(matches!(
            min_max_scale(0.0, &bad),
            Err(MetricError::DegenerateScale { .. })
        ));
    }

    #[test]
    fn hns_examples() {
        let seaquest = baseline(68.4, 42054.7, 999999.0);
        let v = hns(1_000_000.0, &seaquest).unwrap();
        assert_eq!(v.kind(), MetricKind::Hns);
        assert!(close(v.value(), 23.8157, 5e-5));
        assert_eq!(hns(42054.7, &seaquest).unwrap().value(), 1.0);
        let montezuma = baseline(0.0, 4753.3, 1219200.0);
        assert_eq!(hns(0.0, &montezuma).unwrap().value(), 0.0);
    }

    #[test]
    fn chns_examples() {
        let c = |x: f64| chns(MetricValue::hns(x).unwrap()).unwrap().value();
        assert_eq!(c(1.3426), 1.0);
        assert_eq!(c(-0.05), 0.0);
        assert_eq!(c(0.63), 0.63);
        assert!(chns(MetricValue::hwrns(0.5).unwrap()).is_err());
    }

    #[test]
    fn hwrns_examples() {
        let alien = baseline(227.8, 7127.8, 251916.0);
        assert!(close(hwrns(9491.7, &alien).unwrap().value(), 0.0368, 5e-5));
        assert_eq!(hwrns(251916.0, &alien).unwrap().value(), 1.0);
        let skiing = baseline(-17098.0, -4336.9, -3272.0);
        assert!(close(
            hwrns(-29970.32, &skiing).unwrap().value(),
            -0.9310,
            5e-5
        ));
    }

    #[test]
    fn saber_examples() {
        let s = |x: f64, m| saber(MetricValue::hwrns(x).unwrap(), m).unwrap().value();
        assert_eq!(s(2.6058, CapMode::SpecFloor), 2.0);
        assert_eq!(s(-0.9310, CapMode::SpecFloor), 0.0);
        assert_eq!(s(-0.9310, CapMode::TableCompat), -0.9310);
        let v = saber(MetricValue::hwrns(0.5).unwrap(), CapMode::TableCompat).unwrap();
        assert_eq!(v.cap_mode(), Some(CapMode::TableCompat));
        assert!(saber(MetricValue::hns(0.5).unwrap(), CapMode::SpecFloor).is_err());
    }

    #[test]
    fn hwrb_boundary_is_inclusive() {
        let b = |x: f64| hwrb_indicator(MetricValue::hwrns(x).unwrap()).unwrap();
        assert!(b(1.0));
        assert!(!b(0.9999));
        let boxing = Baselines::bundled().lookup_name("boxing").unwrap().clone();
        assert!(hwrb_indicator(hwrns(100.0, &boxing).unwrap()).unwrap());
        assert!(hwrb_indicator(MetricValue::hns(2.0).unwrap()).is_err());
    }

    #[test]
    fn game_time_examples() {
        assert!(close(game_time_days(200_000_000), 38.580, 5e-4));
        assert_eq!(game_time_days(0), 0.0);
        assert!(close(game_time_days(100_000_000_000), 19_290.1, 0.05));
    }

    #[test]
    fn efficiency_examples() {
        let e = learning_efficiency(8.7397, 200_000_000).unwrap();
        assert_eq!(format_efficiency(e.value), "4.37E-08");
        let e = learning_efficiency(0.2839, 200_000_000).unwrap();
        assert_eq!(format_efficiency(e.value), "1.42E-09");
        assert_eq!(learning_efficiency(0.0, 5).unwrap().value, 0.0);
        assert_eq!(learning_efficiency(1.0, 0), Err(MetricError::ZeroFrames));
    }

    #[test]
    fn percent_formatting() {
        assert_eq!(format_percent(1.3426), "134.26");
        assert_eq!(format_percent(0.12345), "12.35");
        assert_eq!(format_percent(-0.12345), "-12.35");
        assert_eq!(format_percent(-0.00001), "0.00");
        assert_eq!(format_percent(8.325), "832.50");
    }

    #[test]
    fn parse_kinds_and_modes() {
        assert_eq!("HWRNS".parse::<MetricKind>().unwrap(), MetricKind::Hwrns);
        assert_eq!("table-compat".parse::<CapMode>().unwrap(), CapMode::TableCompat);
        assert_eq!("spec_floor".parse::<CapMode>().unwrap(), CapMode::SpecFloor);
        assert!("nope".parse::<CapMode>().is_err());
    }
}

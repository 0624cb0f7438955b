use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::EvaluationReport;
use crate::metrics::MetricKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    /// Mean and median of a metric against training frames.
    MetricVsScale(MetricKind),
    /// HWRB count against game time in days.
    HwrbVsGameTime,
    /// Mean and median learning efficiency of a metric against training frames.
    Efficiency(MetricKind),
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Figure::MetricVsScale(k) => write!(f, "metric-vs-scale:{}", k.label().to_lowercase()),
            Figure::HwrbVsGameTime => f.write_str("hwrb-vs-gametime"),
            Figure::Efficiency(k) => write!(f, "efficiency:{}", k.label().to_lowercase()),
        }
    }
}

impl FromStr for Figure {
    type Err = String;

    /// `metric-vs-scale[:kind]`, `hwrb-vs-gametime` or `efficiency[:kind]`.
    /// The kind defaults to HNS.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim().to_ascii_lowercase().replace('_', "-");
        let (name, kind) = match s.split_once(':') {
            Some((n, k)) => (n.to_string(), k.parse::<MetricKind>()?),
            None => (s.clone(), MetricKind::Hns),
        };
        if !matches!(
            kind,
            MetricKind::Hns | MetricKind::Chns | MetricKind::Hwrns | MetricKind::Saber
        ) {
            return Err(format!("figures plot HNS, CHNS, HWRNS or SABER, not {kind}"));
        }
        match name.as_str() {
            "metric-vs-scale" => Ok(Figure::MetricVsScale(kind)),
            "hwrb-vs-gametime" if !s.contains(':') => Ok(Figure::HwrbVsGameTime),
            "efficiency" => Ok(Figure::Efficiency(kind)),
            _ => Err(format!("unknown figure `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub label: String,
    pub x: f64,
    pub y: f64,
    /// y is zero, so the point cannot be drawn on a log axis.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub omit_on_log_scale: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSeries {
    pub name: String,
    pub x_label: String,
    pub y_label: String,
    pub points: Vec<PlotPoint>,
}

/// One point per algorithm in each series, sorted by x then label.
pub fn emit_plot_series(report: &EvaluationReport, figure: Figure) -> Vec<PlotSeries> {
    let series = |name: String, x_label: &str, y_label: &str, f: &dyn Fn(&super::AlgorithmSummary) -> Option<(f64, f64)>| {
        let mut points: Vec<PlotPoint> = report
            .aggregates
            .iter()
            .filter_map(|s| {
                f(s).map(|(x, y)| PlotPoint {
                    label: s.algorithm.clone(),
                    x,
                    y,
                    omit_on_log_scale: y == 0.0,
                })
            })
            .filter(|p| p.x.is_finite() && p.y.is_finite())
            .collect();
        points.sort_by(|a, b| a.x.total_cmp(&b.x).then_with(|| a.label.cmp(&b.label)));
        PlotSeries {
            name,
            x_label: x_label.to_string(),
            y_label: y_label.to_string(),
            points,
        }
    };
    match figure {
        Figure::MetricVsScale(kind) => vec![
            series(format!("mean {kind}"), "frames", "ratio", &|s| {
                s.row(kind).map(|r| (s.frames as f64, r.mean))
            }),
            series(format!("median {kind}"), "frames", "ratio", &|s| {
                s.row(kind).map(|r| (s.frames as f64, r.median))
            }),
        ],
        Figure::HwrbVsGameTime => vec![series("HWRB".to_string(), "game time (days)", "games", &|s| {
            s.row(MetricKind::Hwrns)
                .and_then(|r| r.hwrb_count)
                .map(|n| (s.game_time_days, n as f64))
        })],
        Figure::Efficiency(kind) => vec![
            series(format!("mean {kind} efficiency"), "frames", "ratio per frame", &|s| {
                s.row(kind).map(|r| (s.frames as f64, r.efficiency_mean.value))
            }),
            series(format!("median {kind} efficiency"), "frames", "ratio per frame", &|s| {
                s.row(kind).map(|r| (s.frames as f64, r.efficiency_median.value))
            }),
        ],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::metrics::CapMode;
    use crate::registry::Baselines;
    use crate::report::evaluate;

    fn report() -> EvaluationReport {
        evaluate(&Dataset::bundled_all(), &Baselines::bundled(), CapMode::TableCompat).unwrap()
    }

    #[test]
    fn hwrb_vs_game_time() {
        let s = emit_plot_series(&report(), Figure::HwrbVsGameTime);
        assert_eq!(s.len(), 1);
        let agent57 = s[0].points.iter().find(|p| p.label == "Agent57").unwrap();
        assert!((agent57.x - 19_290.123).abs() < 1e-3);
        assert_eq!(agent57.y, 18.0);
        let simple = s[0].points.iter().find(|p| p.label == "SimPLe").unwrap();
        assert_eq!(simple.y, 0.0);
        assert!(simple.omit_on_log_scale);
        assert!(s[0].points.windows(2).all(|w| w[0].x <= w[1].x));
    }

    #[test]
    fn one_point_per_algorithm() {
        let r = report();
        for fig in [
            Figure::MetricVsScale(MetricKind::Hns),
            Figure::Efficiency(MetricKind::Hwrns),
        ] {
            for s in emit_plot_series(&r, fig) {
                assert_eq!(s.points.len(), r.aggregates.len());
            }
        }
    }

    #[test]
    fn empty_report_gives_empty_series() {
        let mut r = report();
        r.aggregates.clear();
        let s = emit_plot_series(&r, Figure::HwrbVsGameTime);
        assert!(s[0].points.is_empty());
    }

    #[test]
    fn figure_names() {
        assert_eq!("hwrb-vs-gametime".parse(), Ok(Figure::HwrbVsGameTime));
        assert_eq!("metric_vs_scale:hwrns".parse(), Ok(Figure::MetricVsScale(MetricKind::Hwrns)));
        assert_eq!("efficiency".parse(), Ok(Figure::Efficiency(MetricKind::Hns)));
        assert!("efficiency:raw".parse::<Figure>().is_err());
        assert!("pie".parse::<Figure>().is_err());
        for f in [Figure::HwrbVsGameTime, Figure::Efficiency(MetricKind::Saber)] {
            assert_eq!(f.to_string().parse(), Ok(f));
        }
    }
}

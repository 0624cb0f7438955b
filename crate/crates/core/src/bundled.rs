//! Data files compiled into the crate.

use crate::metrics::MetricKind;

pub const BASELINES_CSV: &str = include_str!("../data/baselines.csv");

/// Run datasets: raw scores per algorithm group, one row per (algorithm, game).
pub const DATASETS: [(&str, &str); 4] = [
    (
        "model_free_200m",
        include_str!("../data/datasets/model_free_200m.csv"),
    ),
    (
        "model_free_10b",
        include_str!("../data/datasets/model_free_10b.csv"),
    ),
    ("model_based", include_str!("../data/datasets/model_based.csv")),
    ("other", include_str!("../data/datasets/other.csv")),
];

pub fn dataset_csv(name: &str) -> Option<&'static str> {
    DATASETS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, text)| *text)
}

/// One printed score table: raw cells and the metric percent typeset next to them.
#[derive(Debug, Clone, Copy)]
pub struct PrintedTableSource {
    pub id: &'static str,
    pub metric: MetricKind,
    pub algorithms: &'static [&'static str],
    pub csv: &'static str,
}

const MODEL_FREE_200M: &[&str] = &["Rainbow", "IMPALA", "LASER", "GDI-I3", "GDI-H3"];
const MODEL_FREE_10B: &[&str] = &["R2D2", "NGU", "Agent57", "GDI-I3", "GDI-H3"];
const MODEL_BASED: &[&str] = &["MuZero", "DreamerV2", "SimPLe", "GDI-I3", "GDI-H3"];
const OTHER: &[&str] = &["Muesli", "Go-Explore", "GDI-I3", "GDI-H3"];

macro_rules! printed {
    ($id:literal, $metric:expr, $algs:expr) => {
        PrintedTableSource {
            id: $id,
            metric: $metric,
            algorithms: $algs,
            csv: include_str!(concat!("../data/printed/", $id, ".csv")),
        }
    };
}

pub const PRINTED_TABLES: [PrintedTableSource; 12] = [
    printed!("hns_model_free_200m", MetricKind::Hns, MODEL_FREE_200M),
    printed!("hns_model_free_10b", MetricKind::Hns, MODEL_FREE_10B),
    printed!("hns_model_based", MetricKind::Hns, MODEL_BASED),
    printed!("hns_other", MetricKind::Hns, OTHER),
    printed!("hwrns_model_free_200m", MetricKind::Hwrns, MODEL_FREE_200M),
    printed!("hwrns_model_free_10b", MetricKind::Hwrns, MODEL_FREE_10B),
    printed!("hwrns_model_based", MetricKind::Hwrns, MODEL_BASED),
    printed!("hwrns_other", MetricKind::Hwrns, OTHER),
    printed!("saber_model_free_200m", MetricKind::Saber, MODEL_FREE_200M),
    printed!("saber_model_free_10b", MetricKind::Saber, MODEL_FREE_10B),
    printed!("saber_model_based", MetricKind::Saber, MODEL_BASED),
    printed!("saber_other", MetricKind::Saber, OTHER),
];

pub const PRINTED_AGGREGATES_CSV: &str = include_str!("../data/printed/aggregates.csv");

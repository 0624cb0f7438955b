//! Published cell values, aggregate rows and scale conversions.

use hwrbench::aggregation::{aggregate, mean_metric, median_metric, per_game_leader, MetricColumn};
use hwrbench::metrics::{
    chns, format_efficiency, format_percent, game_time_days, hns, hwrb_indicator, hwrns,
    learning_efficiency, min_max_scale, normalize, saber, CapMode, MetricKind, MetricValue,
};
use hwrbench::registry::ScoreScale;
use hwrbench::report::{evaluate, EvaluationReport};
use hwrbench::{Baselines, Dataset, GameId};

fn g(name: &str) -> GameId {
    GameId::parse(name).unwrap()
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

fn report(names: &[&str]) -> EvaluationReport {
    let ds: Vec<Dataset> = names.iter().map(|n| Dataset::bundled(n).unwrap()).collect();
    evaluate(&ds, &Baselines::bundled(), CapMode::TableCompat).unwrap()
}

#[test]
fn single_cell_values() {
    let b = Baselines::bundled();
    assert_eq!(format_percent(normalize(9491.7, 227.8, 7127.8).unwrap()), "134.26");
    assert_eq!(format_percent(normalize(100.0, 0.1, 12.1).unwrap()), "832.50");
    assert_eq!(format_percent(hns(1_000_000.0, b.lookup(g("seaquest"))).unwrap().value()), "2381.57");
    assert_eq!(hns(0.0, b.lookup(g("montezuma revenge"))).unwrap().value(), 0.0);
    assert_eq!(format_percent(hwrns(9491.7, b.lookup(g("alien"))).unwrap().value()), "3.68");
    let skiing = hwrns(-29970.32, b.lookup(g("skiing"))).unwrap();
    assert_eq!(format_percent(skiing.value()), "-93.10");
    assert_eq!(saber(skiing, CapMode::SpecFloor).unwrap().value(), 0.0);
    assert_eq!(format_percent(saber(skiing, CapMode::TableCompat).unwrap().value()), "-93.10");
    let star = hwrns(200_625.0, b.lookup(g("star gunner"))).unwrap();
    assert_eq!(saber(star, CapMode::SpecFloor).unwrap().value(), 2.0);
    assert!(hwrb_indicator(hwrns(100.0, b.lookup(g("boxing"))).unwrap()).unwrap());
    assert_eq!(chns(MetricValue::hns(1.3426).unwrap()).unwrap().value(), 1.0);
}

#[test]
fn baseline_rows() {
    let b = Baselines::bundled();
    let alien = b.lookup_name("alien").unwrap();
    assert_eq!((alien.random, alien.human_average, alien.human_world_record), (227.8, 7127.8, 251916.0));
    let skiing = b.lookup_name(" SKIING ").unwrap();
    assert_eq!((skiing.random, skiing.human_average, skiing.human_world_record), (-17098.0, -4336.9, -3272.0));
    let pong = b.lookup_name("pong").unwrap();
    assert_eq!((pong.random, pong.human_average, pong.human_world_record), (-20.7, 14.6, 21.0));
}

#[test]
fn min_max_on_pong() {
    let pong = ScoreScale::pong();
    assert_eq!(min_max_scale(21.0, &pong).unwrap().value.value(), 1.0);
    assert_eq!(min_max_scale(-21.0, &pong).unwrap().value.value(), 0.0);
    assert_eq!(min_max_scale(0.0, &pong).unwrap().value.value(), 0.5);
    assert!(min_max_scale(30.0, &pong).unwrap().clamped);
}

#[test]
fn rainbow_hns_column() {
    let r = report(&["model_free_200m"]);
    let mut col = MetricColumn::new("Rainbow", MetricKind::Hns);
    for cell in r.per_game.iter().filter(|c| c.algorithm == "Rainbow") {
        col.insert(cell.game, MetricValue::hns(cell.hns).unwrap()).unwrap();
    }
    let mean = mean_metric(&col).unwrap();
    assert_eq!(mean.coverage, 57);
    assert!(close(mean.mean * 100.0, 873.97, 0.5));
    assert!(close(median_metric(&col).unwrap() * 100.0, 230.99, 0.5));
    let row = aggregate(&col, 200_000_000).unwrap();
    assert_eq!(format_efficiency(row.efficiency_mean.value), "4.37E-08");
    assert_eq!(format_efficiency(row.efficiency_median.value), "1.15E-08");
}

#[test]
fn evaluation_aggregates() {
    let r = report(&["model_free_200m", "model_free_10b", "model_based"]);
    let row = |alg: &str, kind| r.summary(alg).unwrap().row(kind).unwrap().clone();
    assert!(close(row("GDI-H3", MetricKind::Hwrns).mean, 1.5427, 5e-5));
    assert!(close(row("Agent57", MetricKind::Hwrns).mean, 1.2592, 5e-5));
    assert!(close(row("Rainbow", MetricKind::Hwrns).mean, 0.2839, 5e-5));
    assert_eq!(format_efficiency(row("Rainbow", MetricKind::Hwrns).efficiency_mean.value), "1.42E-09");
    assert_eq!(format_efficiency(row("Agent57", MetricKind::Hwrns).efficiency_mean.value), "1.26E-11");
    assert_eq!(row("GDI-H3", MetricKind::Hwrns).hwrb_count, Some(22));
    assert_eq!(row("SimPLe", MetricKind::Hwrns).hwrb_count, Some(0));
}

#[test]
fn boxing_leaders() {
    let b = Baselines::bundled();
    let boxing = g("boxing");
    let cols: Vec<MetricColumn> = [("Rainbow", 99.6), ("LASER", 100.0), ("GDI-H3", 100.0)]
        .iter()
        .map(|(alg, raw)| {
            let mut c = MetricColumn::new(*alg, MetricKind::Hns);
            c.insert(boxing, hns(*raw, b.lookup(boxing)).unwrap()).unwrap();
            c
        })
        .collect();
    assert_eq!(per_game_leader(&cols, boxing).unwrap(), ["GDI-H3", "LASER"]);
}

#[test]
fn game_time_and_efficiency() {
    assert!(close(game_time_days(200_000_000), 38.58, 0.01));
    assert!(close(game_time_days(100_000_000_000), 19_290.12, 0.01));
    assert_eq!(game_time_days(0), 0.0);
    let e = learning_efficiency(8.7397, 200_000_000).unwrap();
    assert_eq!(format_efficiency(e.value), "4.37E-08");
    assert_eq!(learning_efficiency(0.0, 5).unwrap().value, 0.0);
    assert!(learning_efficiency(1.0, 0).is_err());
}

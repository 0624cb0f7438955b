use std::fs::{self, File};
use std::io::{BufReader, Write};
use std::path::Path;
use std::process::ExitCode;

use hwrbench::metrics::{
    self, format_efficiency, format_percent, game_time_days, learning_efficiency, CapMode,
    MetricKind,
};
use hwrbench::protocol::{self, parse_log, RunLedger};
use hwrbench::report::{
    emit_plot_series, evaluate, render_table, tabulate, EvaluationReport, TableLayout,
    REPORT_METRICS,
};
use hwrbench::reproduce::reproduce;
use hwrbench::{bundled, load_baselines, load_dataset, Baselines, Dataset, GameId};
use serde_json::{json, Value};

use crate::cli::{Cli, Command, Common, OutputFormat};

/// Exit status when protocol-check finds violations.
const NON_CONFORMING: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
}

fn err(kind: &'static str, message: impl ToString) -> CliError {
    CliError {
        kind,
        message: message.to_string(),
    }
}

pub fn run(cli: &Cli) -> Result<ExitCode, CliError> {
    let c = &cli.common;
    match &cli.command {
        Command::Validate => validate(c),
        Command::Score {
            game,
            score,
            frames,
        } => score_one(c, game, *score, *frames),
        Command::Aggregate { metric } => aggregate(c, *metric),
        Command::Report {
            metric,
            algorithms,
            figure,
        } => report(c, *metric, algorithms, *figure),
        Command::ProtocolCheck {
            log,
            k,
            budget,
            action_set,
            game,
            algorithm,
        } => protocol_check(c, log, *k, *budget, *action_set, game.as_deref(), algorithm.as_deref()),
        Command::Compare { a, b, metric } => compare(c, a, b, *metric),
        Command::Reproduce => reproduce_tables(c),
    }
}

fn baselines(c: &Common) -> Result<Baselines, CliError> {
    match &c.baselines {
        None => Ok(Baselines::bundled()),
        Some(path) => {
            let file = File::open(path).map_err(|e| err("io", format!("{}: {e}", path.display())))?;
            load_baselines(file, path.display().to_string()).map_err(|e| err("baselines", e))
        }
    }
}

fn datasets(c: &Common) -> Result<Vec<Dataset>, CliError> {
    if c.datasets.is_empty() {
        return Ok(Dataset::bundled_all());
    }
    c.datasets
        .iter()
        .map(|name| {
            let path = Path::new(name);
            if path.is_file() {
                let file =
                    File::open(path).map_err(|e| err("io", format!("{}: {e}", path.display())))?;
                load_dataset(file, name.as_str()).map_err(|e| err("dataset", e))
            } else if bundled::dataset_csv(name).is_some() {
                Dataset::bundled(name).map_err(|e| err("dataset", e))
            } else {
                Err(err(
                    "dataset",
                    format!("`{name}` is neither a file nor a bundled dataset"),
                ))
            }
        })
        .collect()
}

fn evaluated(c: &Common, cap_mode: CapMode) -> Result<EvaluationReport, CliError> {
    evaluate(&datasets(c)?, &baselines(c)?, cap_mode).map_err(|e| err("evaluate", e))
}

fn emit(c: &Common, text: &str) -> Result<(), CliError> {
    match &c.out {
        Some(path) => fs::write(path, text).map_err(|e| err("io", format!("{}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| err("io", e)),
    }
}

fn emit_json(c: &Common, value: &Value) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| err("json", e))?;
    text.push('\n');
    emit(c, &text)
}

fn strings<const N: usize>(cells: [&str; N]) -> Vec<String> {
    cells.iter().map(|s| s.to_string()).collect()
}

fn emit_rows(c: &Common, header: Vec<String>, rows: Vec<Vec<String>>) -> Result<(), CliError> {
    emit(c, &tabulate(&header, &rows, c.format.table_format(), None))
}

fn validate(c: &Common) -> Result<ExitCode, CliError> {
    let b = baselines(c)?;
    let ds = datasets(c)?;
    let warnings: Vec<String> = b.warnings().iter().map(ToString::to_string).collect();
    if c.format == OutputFormat::Json {
        let sets: Vec<Value> = ds
            .iter()
            .map(|d| {
                json!({
                    "label": d.label,
                    "algorithms": d.algorithms(),
                    "records": d.records.len(),
                    "coverage_notes": d.coverage_notes,
                })
            })
            .collect();
        emit_json(
            c,
            &json!({
                "baselines": { "provenance": b.provenance(), "games": b.records().len(), "warnings": warnings },
                "datasets": sets,
            }),
        )?;
    } else {
        let mut rows = vec![strings(["baselines", b.provenance(), &b.records().len().to_string(), "", ""])];
        for w in &warnings {
            rows.push(strings(["warning", w, "", "", ""]));
        }
        for d in &ds {
            rows.push(vec![
                "dataset".to_string(),
                d.label.clone(),
                d.records.len().to_string(),
                d.coverage_notes.len().to_string(),
                d.algorithms().join(";"),
            ]);
        }
        emit_rows(c, strings(["kind", "name", "rows", "n/a", "algorithms"]), rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn score_one(c: &Common, game: &str, raw: f64, frames: u64) -> Result<ExitCode, CliError> {
    let b = baselines(c)?;
    let record = b.lookup_name(game).map_err(|e| err("game", e))?;
    let fail = |e: metrics::MetricError| err("metric", e);
    let hns = metrics::hns(raw, record).map_err(fail)?;
    let hwrns = metrics::hwrns(raw, record).map_err(fail)?;
    let chns = metrics::chns(hns).map_err(fail)?;
    let saber = metrics::saber(hwrns, c.cap_mode).map_err(fail)?;
    let hwrb = metrics::hwrb_indicator(hwrns).map_err(fail)?;
    let days = game_time_days(frames);
    let hns_eff = learning_efficiency(hns.value(), frames).map_err(fail)?;
    let hwrns_eff = learning_efficiency(hwrns.value(), frames).map_err(fail)?;

    if c.format == OutputFormat::Json {
        emit_json(
            c,
            &json!({
                "game": record.game,
                "score": raw,
                "frames": frames,
                "cap_mode": c.cap_mode,
                "hns": hns.value(),
                "chns": chns.value(),
                "hwrns": hwrns.value(),
                "saber": saber.value(),
                "hwrb": hwrb,
                "game_time_days": days,
                "hns_efficiency": hns_eff.value,
                "hwrns_efficiency": hwrns_eff.value,
            }),
        )?;
    } else {
        let pct = |v: f64| format!("{}%", format_percent(v));
        let rows = vec![
            strings(["game", record.game.name()]),
            vec!["score".into(), raw.to_string()],
            vec!["frames".into(), frames.to_string()],
            vec!["HNS".into(), pct(hns.value())],
            vec!["CHNS".into(), pct(chns.value())],
            vec!["HWRNS".into(), pct(hwrns.value())],
            vec!["SABER".into(), pct(saber.value())],
            vec!["HWRB".into(), hwrb.to_string()],
            vec!["game time (days)".into(), format!("{days:.2}")],
            vec!["HNS efficiency".into(), format_efficiency(hns_eff.value)],
            vec!["HWRNS efficiency".into(), format_efficiency(hwrns_eff.value)],
            vec!["cap mode".into(), c.cap_mode.to_string()],
        ];
        emit_rows(c, strings(["field", "value"]), rows)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn aggregate(c: &Common, only: Option<MetricKind>) -> Result<ExitCode, CliError> {
    if let Some(kind) = only {
        if !REPORT_METRICS.contains(&kind) {
            return Err(err("usage", format!("{kind} is not aggregated")));
        }
    }
    let report = evaluated(c, c.cap_mode)?;
    let keep = |k: MetricKind| only.is_none_or(|o| o == k);
    if c.format == OutputFormat::Json {
        let rows: Vec<Value> = report
            .aggregates
            .iter()
            .flat_map(|s| {
                s.rows.iter().filter(|r| keep(r.kind)).map(move |r| {
                    json!({
                        "algorithm": s.algorithm,
                        "frames": s.frames,
                        "game_time_days": s.game_time_days,
                        "row": r,
                    })
                })
            })
            .collect();
        emit_json(c, &json!({ "cap_mode": report.cap_mode, "aggregates": rows }))?;
        return Ok(ExitCode::SUCCESS);
    }
    let mut rows = Vec::new();
    for s in &report.aggregates {
        for r in s.rows.iter().filter(|r| keep(r.kind)) {
            rows.push(vec![
                s.algorithm.clone(),
                r.kind.to_string(),
                format_percent(r.mean),
                format_percent(r.median),
                format!("{}/{}", r.coverage, r.total_games),
                r.hwrb_count.map_or(String::new(), |n| n.to_string()),
                format_efficiency(r.efficiency_mean.value),
                format_efficiency(r.efficiency_median.value),
                s.scale_label.clone(),
            ]);
        }
    }
    let header = strings([
        "algorithm",
        "metric",
        "mean(%)",
        "median(%)",
        "games",
        "hwrb",
        "mean efficiency",
        "median efficiency",
        "frames",
    ]);
    emit_rows(c, header, rows)?;
    Ok(ExitCode::SUCCESS)
}

fn report(
    c: &Common,
    metric: MetricKind,
    algorithms: &[String],
    figure: Option<hwrbench::report::Figure>,
) -> Result<ExitCode, CliError> {
    let report = evaluated(c, c.cap_mode)?;
    if let Some(figure) = figure {
        let series = emit_plot_series(&report, figure);
        if c.format == OutputFormat::Json {
            emit_json(c, &json!({ "figure": figure.to_string(), "series": series }))?;
        } else {
            let rows = series
                .iter()
                .flat_map(|s| {
                    s.points.iter().map(move |p| {
                        vec![
                            s.name.clone(),
                            p.label.clone(),
                            p.x.to_string(),
                            p.y.to_string(),
                            p.omit_on_log_scale.to_string(),
                        ]
                    })
                })
                .collect();
            emit_rows(c, strings(["series", "label", "x", "y", "omit_on_log_scale"]), rows)?;
        }
        return Ok(ExitCode::SUCCESS);
    }
    if c.format == OutputFormat::Json {
        emit(c, &(report.to_json() + "\n"))?;
        return Ok(ExitCode::SUCCESS);
    }
    let layout = if algorithms.is_empty() {
        TableLayout::all(&report, metric)
    } else {
        TableLayout {
            metric,
            algorithms: algorithms.to_vec(),
        }
    };
    let text = render_table(&report, &layout, c.format.table_format()).map_err(|e| err("layout", e))?;
    emit(c, &text)?;
    Ok(ExitCode::SUCCESS)
}

fn protocol_check(
    c: &Common,
    log_path: &Path,
    k: usize,
    budget: u64,
    action_set: Option<u32>,
    game: Option<&str>,
    algorithm: Option<&str>,
) -> Result<ExitCode, CliError> {
    let file = File::open(log_path).map_err(|e| err("io", format!("{}: {e}", log_path.display())))?;
    let mut log = parse_log(BufReader::new(file)).map_err(|e| err("log", e))?;
    if action_set.is_some() {
        log.action_set = action_set;
    }
    let ledger = RunLedger::from_log(&log, budget, k).map_err(|e| err("log", e))?;
    let verdict = protocol::check_budget(&ledger);
    let training = protocol::training_score(&ledger.returns(), k);
    let record = match (game, algorithm) {
        (Some(g), Some(a)) => {
            let g = GameId::parse(g).map_err(|e| err("game", e))?;
            Some(protocol::to_run_record(&ledger, g, a).map_err(|e| err("protocol", e))?)
        }
        _ => None,
    };

    if c.format == OutputFormat::Json {
        let (score, score_error) = match &training {
            Ok(t) => (json!({ "k": t.k, "windows": t.series.len(), "final_score": t.final_score }), Value::Null),
            Err(e) => (Value::Null, json!(e.to_string())),
        };
        emit_json(
            c,
            &json!({
                "conforming": verdict.conforming,
                "violations": verdict.violations,
                "annotations": verdict.annotations,
                "total_env_frames": ledger.total_env_frames,
                "budget": ledger.budget,
                "action_set": ledger.action_set,
                "episodes": ledger.episodes.len(),
                "game_time_days": game_time_days(ledger.total_env_frames),
                "training_score": score,
                "training_score_error": score_error,
                "run_record": record,
            }),
        )?;
    } else {
        let mut rows = vec![
            vec!["conforming".into(), verdict.conforming.to_string()],
            vec!["total frames".into(), ledger.total_env_frames.to_string()],
            vec!["budget".into(), ledger.budget.to_string()],
            vec![
                "action set".into(),
                ledger.action_set.map_or("undeclared".into(), |n| n.to_string()),
            ],
            vec!["episodes".into(), ledger.episodes.len().to_string()],
            vec![
                "game time (days)".into(),
                format!("{:.2}", game_time_days(ledger.total_env_frames)),
            ],
            vec![
                format!("training score (k={k})"),
                match &training {
                    Ok(t) => t.final_score.to_string(),
                    Err(e) => e.to_string(),
                },
            ],
        ];
        for v in &verdict.violations {
            rows.push(vec!["violation".into(), v.to_string()]);
        }
        for a in &verdict.annotations {
            rows.push(vec![
                "annotation".into(),
                serde_json::to_string(a).map_err(|e| err("json", e))?,
            ]);
        }
        if let Some(r) = &record {
            rows.push(vec![
                "run record".into(),
                format!("{},{},{},{},{}", r.algorithm, r.game, r.score, r.frames, r.scale_label),
            ]);
        }
        emit_rows(c, strings(["field", "value"]), rows)?;
    }
    Ok(if verdict.conforming {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(NON_CONFORMING)
    })
}

fn compare(c: &Common, a: &str, b: &str, metric: MetricKind) -> Result<ExitCode, CliError> {
    if !REPORT_METRICS.contains(&metric) {
        return Err(err("usage", format!("{metric} is not a per-game metric")));
    }
    let report = evaluated(c, c.cap_mode)?;
    for name in [a, b] {
        if report.summary(name).is_none() {
            return Err(err("compare", format!("algorithm `{name}` is not in the datasets")));
        }
    }
    let mut tally = [0usize; 5];
    let outcomes = ["a", "b", "tie", "only_a", "only_b"];
    let mut games = Vec::new();
    for game in GameId::all() {
        let (ca, cb) = (report.cell(a, game), report.cell(b, game));
        let outcome = match (ca, cb) {
            (None, None) => continue,
            (Some(_), None) => 3,
            (None, Some(_)) => 4,
            (Some(x), Some(y)) if x.raw > y.raw => 0,
            (Some(x), Some(y)) if x.raw < y.raw => 1,
            _ => 2,
        };
        tally[outcome] += 1;
        games.push((game, ca, cb, outcomes[outcome]));
    }

    if c.format == OutputFormat::Json {
        let rows: Vec<Value> = games
            .iter()
            .map(|(g, ca, cb, o)| {
                json!({
                    "game": g,
                    "a_raw": ca.map(|x| x.raw),
                    "b_raw": cb.map(|x| x.raw),
                    "a_metric": ca.and_then(|x| x.metric(metric)),
                    "b_metric": cb.and_then(|x| x.metric(metric)),
                    "leader": o,
                })
            })
            .collect();
        let summary: serde_json::Map<String, Value> = outcomes
            .iter()
            .zip(tally)
            .map(|(o, n)| (o.to_string(), json!(n)))
            .collect();
        emit_json(
            c,
            &json!({ "a": a, "b": b, "metric": metric, "games": rows, "summary": summary }),
        )?;
        return Ok(ExitCode::SUCCESS);
    }
    let leader = |o: &str| match o {
        "a" | "only_a" => a.to_string(),
        "b" | "only_b" => b.to_string(),
        _ => "tie".to_string(),
    };
    let raw = |x: Option<&hwrbench::report::GameCell>| x.map_or("N/A".into(), |x| x.raw.to_string());
    let pct = |x: Option<&hwrbench::report::GameCell>| {
        x.and_then(|x| x.metric(metric)).map_or("N/A".into(), format_percent)
    };
    let mut rows: Vec<Vec<String>> = games
        .iter()
        .map(|(g, ca, cb, o)| {
            vec![g.to_string(), raw(*ca), pct(*ca), raw(*cb), pct(*cb), leader(o)]
        })
        .collect();
    rows.push(vec![
        "WINS".into(),
        String::new(),
        tally[0].to_string(),
        String::new(),
        tally[1].to_string(),
        format!("ties {}", tally[2]),
    ]);
    let header = vec![
        "game".to_string(),
        format!("{a} raw"),
        format!("{a} {metric}(%)"),
        format!("{b} raw"),
        format!("{b} {metric}(%)"),
        "leader".to_string(),
    ];
    emit_rows(c, header, rows)?;
    Ok(ExitCode::SUCCESS)
}

fn reproduce_tables(c: &Common) -> Result<ExitCode, CliError> {
    let r = reproduce(&datasets(c)?, &baselines(c)?).map_err(|e| err("reproduce", e))?;
    if let Some(dir) = &c.out {
        fs::create_dir_all(dir).map_err(|e| err("io", format!("{}: {e}", dir.display())))?;
        let write = |name: &str, text: String| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| err("io", format!("{}: {e}", path.display())))
        };
        write("reproduction.json", r.to_json() + "\n")?;
        write("inconsistencies.csv", r.inconsistencies_csv())?;
    }
    let summary = json!({
        "cap_mode": r.cap_mode,
        "cells": r.cells(),
        "matched": r.matched(),
        "match_rate": r.match_rate(),
        "inconsistencies": r.inconsistencies.len(),
        "aggregate_rows": r.aggregates.len(),
        "aggregate_rows_passing": r.aggregates.iter().filter(|a| a.pass).count(),
    });
    let text = match c.format {
        OutputFormat::Json => serde_json::to_string_pretty(&json!({ "summary": summary, "reproduction": r }))
            .map_err(|e| err("json", e))?
            + "\n",
        OutputFormat::Csv => r.inconsistencies_csv(),
        OutputFormat::Table => {
            let mut rows: Vec<Vec<String>> = r
                .tables
                .iter()
                .map(|t| {
                    vec![
                        t.table.clone(),
                        t.metric.to_string(),
                        t.cells.to_string(),
                        t.matched.to_string(),
                    ]
                })
                .collect();
            rows.push(vec![
                "total".into(),
                String::new(),
                r.cells().to_string(),
                r.matched().to_string(),
            ]);
            let mut text = tabulate(
                &strings(["table", "metric", "cells", "matched"]),
                &rows,
                hwrbench::report::TableFormat::Text,
                Some(r.tables.len()),
            );
            text.push_str(&format!(
                "\n{} inconsistencies; {} of {} aggregate rows reproduce\n",
                r.inconsistencies.len(),
                r.aggregates.iter().filter(|a| a.pass).count(),
                r.aggregates.len()
            ));
            text
        }
    };
    // With --out the summary still goes to stdout.
    std::io::stdout()
        .write_all(text.as_bytes())
        .map_err(|e| err("io", e))?;
    Ok(ExitCode::SUCCESS)
}

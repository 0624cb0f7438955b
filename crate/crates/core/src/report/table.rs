use serde::{Deserialize, Serialize};

use super::{leaders_among, EvaluationReport, ReportError, REPORT_METRICS};
use crate::game::GameId;
use crate::metrics::{format_efficiency, format_percent, MetricKind};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableLayout {
    pub metric: MetricKind,
    /// Column order. Leaders are marked among these algorithms only.
    pub algorithms: Vec<String>,
}

impl TableLayout {
    /// Every algorithm of the report, in report order.
    pub fn all(report: &EvaluationReport, metric: MetricKind) -> TableLayout {
        TableLayout {
            metric,
            algorithms: report.algorithms().iter().map(|a| a.to_string()).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TableFormat {
    #[default]
    Text,
    Csv,
}

const LEADER_MARK: &str = " *";

/// Game rows with `raw | percent` cells, then the aggregate footer. Percents
/// are rounded to two decimals with halves away from zero.
pub fn render_table(
    report: &EvaluationReport,
    layout: &TableLayout,
    format: TableFormat,
) -> Result<String, ReportError> {
    if layout.algorithms.is_empty() {
        return Err(ReportError::EmptyLayout);
    }
    if !REPORT_METRICS.contains(&layout.metric) {
        return Err(ReportError::UnsupportedMetric(layout.metric));
    }
    let summaries = layout
        .algorithms
        .iter()
        .map(|a| report.summary(a).ok_or_else(|| ReportError::UnknownAlgorithm(a.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    let names: Vec<&str> = layout.algorithms.iter().map(String::as_str).collect();
    let leaders = leaders_among(&report.per_game, &names)?;
    let metric = layout.metric;

    let mut header = vec!["game".to_string()];
    if format == TableFormat::Csv {
        for a in &names {
            header.push(format!("{a} raw"));
            header.push(format!("{a} {metric}(%)"));
        }
        header.push("leaders".to_string());
    } else {
        header.extend(names.iter().map(|a| a.to_string()));
    }

    let mut rows: Vec<Vec<String>> = Vec::new();
    for game in GameId::all() {
        let lead: &[String] = leaders
            .iter()
            .find(|l| l.game == game)
            .map_or(&[], |l| l.leaders.as_slice());
        let mut row = vec![game.to_string()];
        for a in &names {
            let cell = report.cell(a, game);
            let raw = cell.map_or("N/A".to_string(), |c| c.raw.to_string());
            let pct = cell
                .and_then(|c| c.metric(metric))
                .map_or("N/A".to_string(), format_percent);
            match format {
                TableFormat::Csv => {
                    row.push(raw);
                    row.push(pct);
                }
                TableFormat::Text => {
                    let mark = if lead.iter().any(|l| l == a) { LEADER_MARK } else { "" };
                    row.push(format!("{raw} | {pct}{mark}"));
                }
            }
        }
        if format == TableFormat::Csv {
            row.push(lead.join(";"));
        }
        rows.push(row);
    }

    let footer = |label: String, value: &dyn Fn(&super::AlgorithmSummary) -> String| {
        let mut row = vec![label];
        for s in &summaries {
            if format == TableFormat::Csv {
                row.push(String::new());
            }
            row.push(value(s));
        }
        if format == TableFormat::Csv {
            row.push(String::new());
        }
        row
    };
    let agg = |s: &super::AlgorithmSummary| s.row(metric).cloned().expect("report metric row");
    rows.push(footer(format!("MEAN {metric}(%)"), &|s| format_percent(agg(s).mean)));
    rows.push(footer(format!("MEAN {metric} EFFICIENCY"), &|s| {
        format_efficiency(agg(s).efficiency_mean.value)
    }));
    rows.push(footer(format!("MEDIAN {metric}(%)"), &|s| format_percent(agg(s).median)));
    rows.push(footer(format!("MEDIAN {metric} EFFICIENCY"), &|s| {
        format_efficiency(agg(s).efficiency_median.value)
    }));
    if matches!(metric, MetricKind::Hwrns | MetricKind::Saber) {
        rows.push(footer("HWRB".to_string(), &|s| {
            s.row(MetricKind::Hwrns)
                .and_then(|r| r.hwrb_count)
                .map_or(String::new(), |n| n.to_string())
        }));
    }
    rows.push(footer("GAMES".to_string(), &|s| {
        format!("{}/{}", agg(s).coverage, agg(s).total_games)
    }));
    rows.push(footer("FRAMES".to_string(), &|s| s.scale_label.clone()));

    Ok(tabulate(&header, &rows, format, Some(GameId::all().count())))
}

/// Writes rows as aligned text or CSV. In text, a rule is drawn under the
/// header and before row `rule_before` if given.
pub fn tabulate(
    header: &[String],
    rows: &[Vec<String>],
    format: TableFormat,
    rule_before: Option<usize>,
) -> String {
    match format {
        TableFormat::Csv => to_csv(header, rows),
        TableFormat::Text => to_text(header, rows, rule_before),
    }
}

fn to_csv(header: &[String], rows: &[Vec<String>]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("write to memory");
    for row in rows {
        w.write_record(row).expect("write to memory");
    }
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8")
}

fn to_text(header: &[String], rows: &[Vec<String>], rule_before: Option<usize>) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: &[String]| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header);
    let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
    out.push_str(&line(&rule));
    for (i, row) in rows.iter().enumerate() {
        if Some(i) == rule_before {
            out.push_str(&line(&rule));
        }
        out.push_str(&line(row));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::Dataset;
    use crate::metrics::CapMode;
    use crate::registry::Baselines;
    use crate::report::evaluate;

    fn report() -> EvaluationReport {
        evaluate(
            &[Dataset::bundled("model_free_200m").unwrap()],
            &Baselines::bundled(),
            CapMode::TableCompat,
        )
        .unwrap()
    }

    #[test]
    fn text_cells_and_leaders() {
        let r = report();
        let out = render_table(&r, &TableLayout::all(&r, MetricKind::Hns), TableFormat::Text).unwrap();
        let alien = out.lines().find(|l| l.starts_with("alien")).unwrap();
        assert!(alien.contains("9491.7 | 134.26"), "{alien}");
        let boxing = out.lines().find(|l| l.starts_with("boxing")).unwrap();
        // LASER, GDI-I3 and GDI-H3 all score 100.
        assert_eq!(boxing.matches(" *").count(), 3, "{boxing}");
        assert!(out.contains("873.97"));
        assert!(out.contains("4.37E-08"));
        assert!(!out.contains("HWRB"));
    }

    #[test]
    fn leaders_follow_the_selection() {
        let r = report();
        let layout = TableLayout {
            metric: MetricKind::Hwrns,
            algorithms: vec!["Rainbow".into(), "IMPALA".into()],
        };
        let out = render_table(&r, &layout, TableFormat::Csv).unwrap();
        let alien = out.lines().find(|l| l.starts_with("alien")).unwrap();
        assert!(alien.ends_with(",IMPALA"), "{alien}");
        assert!(out.lines().any(|l| l.starts_with("HWRB,,4,,3")), "{out}");
    }

    #[test]
    fn deterministic_bytes() {
        let r = report();
        let layout = TableLayout::all(&r, MetricKind::Saber);
        assert_eq!(
            render_table(&r, &layout, TableFormat::Text).unwrap(),
            render_table(&report(), &layout, TableFormat::Text).unwrap()
        );
    }

    #[test]
    fn layout_errors() {
        let r = report();
        let empty = TableLayout {
            metric: MetricKind::Hns,
            algorithms: vec![],
        };
        assert!(matches!(
            render_table(&r, &empty, TableFormat::Text),
            Err(ReportError::EmptyLayout)
        ));
        let unknown = TableLayout {
            metric: MetricKind::Hns,
            algorithms: vec!["DQN".into()],
        };
        assert!(matches!(
            render_table(&r, &unknown, TableFormat::Text),
            Err(ReportError::UnknownAlgorithm(_))
        ));
        let raw = TableLayout {
            metric: MetricKind::Raw,
            algorithms: vec!["Rainbow".into()],
        };
        assert!(render_table(&r, &raw, TableFormat::Text).is_err());
    }
}

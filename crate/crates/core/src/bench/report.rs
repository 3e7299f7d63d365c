use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::stats::MetricSummary;
use super::{BenchError, TrialRecord};
use crate::sampler::HybridRatio;

/// Statistics of one (map, sampler) cell. Path length covers successful
/// trials only and is absent when none succeeded.
#[derive(Clone, Debug, PartialEq)]
pub struct SummaryStats {
    pub map_id: String,
    pub sampler: String,
    pub trials: usize,
    pub successes: usize,
    pub planning_time: MetricSummary,
    pub identification_time: MetricSummary,
    pub milestones: MetricSummary,
    pub path_length: Option<MetricSummary>,
}

impl SummaryStats {
    pub fn metrics(&self) -> Vec<(&'static str, &MetricSummary)> {
        let mut out = vec![
            ("planning_time_s", &self.planning_time),
            ("identification_time_s", &self.identification_time),
            ("milestones", &self.milestones),
        ];
        if let Some(p) = &self.path_length {
            out.push(("path_length_m", p));
        }
        out
    }
}

/// Groups records by (map, sampler label), sorted by that key.
pub fn summarize(records: &[TrialRecord]) -> Vec<SummaryStats> {
    let mut cells: BTreeMap<(String, String), Vec<&TrialRecord>> = BTreeMap::new();
    for r in records {
        cells.entry((r.map_id.clone(), r.label())).or_default().push(r);
    }
    cells
        .into_iter()
        .map(|((map_id, sampler), rs)| {
            let column = |f: &dyn Fn(&TrialRecord) -> f64| rs.iter().map(|r| f(r)).collect::<Vec<f64>>();
            let summary = |v: Vec<f64>| MetricSummary::from_values(&v).expect("non-empty, NaN-free column");
            let lengths: Vec<f64> = rs.iter().filter(|r| r.success).map(|r| r.path_length).collect();
            SummaryStats {
                map_id,
                sampler,
                trials: rs.len(),
                successes: lengths.len(),
                planning_time: summary(column(&|r| r.planning_time)),
                identification_time: summary(column(&|r| r.identification_time)),
                milestones: summary(column(&|r| r.milestone_count as f64)),
                path_length: MetricSummary::from_values(&lengths),
            }
        })
        .collect()
}

#[derive(Serialize)]
struct RecordRow<'a> {
    map_id: &'a str,
    sampler: String,
    seed: u64,
    planning_time_s: f64,
    identification_time_s: f64,
    milestones: usize,
    path_length_m: f64,
    success: bool,
}

pub fn write_records_csv<W: Write>(out: W, records: &[TrialRecord]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(RecordRow {
            map_id: &r.map_id,
            sampler: r.label(),
            seed: r.seed,
            planning_time_s: r.planning_time,
            identification_time_s: r.identification_time,
            milestones: r.milestone_count,
            path_length_m: r.path_length,
            success: r.success,
        })?;
    }
    if records.is_empty() {
        w.write_record([
            "map_id",
            "sampler",
            "seed",
            "planning_time_s",
            "identification_time_s",
            "milestones",
            "path_length_m",
            "success",
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// One row per (map, sampler, metric).
pub fn write_summary_csv<W: Write>(out: W, summary: &[SummaryStats]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "map_id",
        "sampler",
        "trials",
        "successes",
        "metric",
        "n",
        "mean",
        "std_dev",
        "min",
        "q1",
        "median",
        "q3",
        "max",
    ])?;
    for s in summary {
        for (name, m) in s.metrics() {
            w.write_record([
                s.map_id.clone(),
                s.sampler.clone(),
                s.trials.to_string(),
                s.successes.to_string(),
                name.to_string(),
                m.n.to_string(),
                m.mean.to_string(),
                m.std_dev.to_string(),
                m.min.to_string(),
                m.q1.to_string(),
                m.median.to_string(),
                m.q3.to_string(),
                m.max.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Box-plot geometry per (map, sampler, metric); outliers are
/// `;`-separated.
pub fn write_boxplot_csv<W: Write>(out: W, summary: &[SummaryStats]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "map_id",
        "sampler",
        "metric",
        "min",
        "q1",
        "median",
        "q3",
        "max",
        "lower_whisker",
        "upper_whisker",
        "outliers",
    ])?;
    for s in summary {
        for (name, m) in s.metrics() {
            let outliers: Vec<String> = m.outliers.iter().map(f64::to_string).collect();
            w.write_record([
                s.map_id.clone(),
                s.sampler.clone(),
                name.to_string(),
                m.min.to_string(),
                m.q1.to_string(),
                m.median.to_string(),
                m.q3.to_string(),
                m.max.to_string(),
                m.lower_whisker.to_string(),
                m.upper_whisker.to_string(),
                outliers.join(";"),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Milestone statistics of one (map, ratio) pair of a sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioCell {
    pub map_id: String,
    pub ratio: HybridRatio,
    pub milestones: MetricSummary,
}

/// Sweep records arranged map by map, ratios in first-seen order.
pub fn ratio_table(records: &[TrialRecord]) -> Vec<RatioCell> {
    let mut maps: Vec<&str> = Vec::new();
    let mut ratios: Vec<HybridRatio> = Vec::new();
    for r in records {
        if !maps.contains(&r.map_id.as_str()) {
            maps.push(&r.map_id);
        }
        if let Some(q) = r.ratio {
            if !ratios.contains(&q) {
                ratios.push(q);
            }
        }
    }
    let mut out = Vec::new();
    for &m in &maps {
        for &q in &ratios {
            let v: Vec<f64> = records
                .iter()
                .filter(|r| r.map_id == m && r.ratio == Some(q))
                .map(|r| r.milestone_count as f64)
                .collect();
            if let Some(milestones) = MetricSummary::from_values(&v) {
                out.push(RatioCell { map_id: m.to_string(), ratio: q, milestones });
            }
        }
    }
    out
}

/// Wide layout: one row per map, a mean and a std column per ratio.
pub fn write_ratio_table_csv<W: Write>(out: W, cells: &[RatioCell]) -> Result<(), BenchError> {
    let mut ratios: Vec<HybridRatio> = Vec::new();
    let mut maps: Vec<&str> = Vec::new();
    for c in cells {
        if !ratios.contains(&c.ratio) {
            ratios.push(c.ratio);
        }
        if !maps.contains(&c.map_id.as_str()) {
            maps.push(&c.map_id);
        }
    }
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["map_id".to_string()];
    for r in &ratios {
        header.push(format!("{r} mean"));
        header.push(format!("{r} std"));
    }
    w.write_record(&header)?;
    for m in maps {
        let mut row = vec![m.to_string()];
        for &r in &ratios {
            match cells.iter().find(|c| c.map_id == m && c.ratio == r) {
                Some(c) => {
                    row.push(c.milestones.mean.to_string());
                    row.push(c.milestones.std_dev.to_string());
                }
                None => row.extend([String::new(), String::new()]),
            }
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

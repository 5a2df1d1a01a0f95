use std::collections::BTreeMap;

use serde::Serialize;

use crate::harness::{BenchRecord, HarnessError};

/// Per-record columns. `None` marks a zero denominator (or an infinite
/// `B*`), which is excluded from that column's aggregate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RecordMetrics {
    pub instance: String,
    pub seed: Option<u64>,
    /// `1 - θmax(BEAST(∞)) / θmax(EI-UCS)`, percent.
    pub theta_reduction: Option<f64>,
    /// `1 - θmax(BEAST(u(π_SLB))) / θmax(BEAST(∞))`, percent.
    pub extra_theta_reduction: Option<f64>,
    /// Pruned over generated for the bounded BEAST phase, percent.
    pub pruned_share: Option<f64>,
    pub b_star: Option<f64>,
}

fn ratio(num: u64, den: u64) -> Option<f64> {
    (den != 0).then(|| num as f64 / den as f64)
}

impl RecordMetrics {
    pub fn of(rec: &BenchRecord) -> Self {
        RecordMetrics {
            instance: rec.instance.clone(),
            seed: rec.seed,
            theta_reduction: ratio(rec.beast.theta_max, rec.ei_ucs.theta_max).map(|r| 100.0 * (1.0 - r)),
            extra_theta_reduction: ratio(rec.bnb_beast.theta_max, rec.beast.theta_max).map(|r| 100.0 * (1.0 - r)),
            pruned_share: ratio(rec.bnb_beast.pruned, rec.bnb_beast.generated).map(|r| 100.0 * r),
            b_star: rec.b_star.finite().map(crate::Scalar::to_f64),
        }
    }

    pub fn columns(&self) -> [Option<f64>; 4] {
        [self.theta_reduction, self.extra_theta_reduction, self.pruned_share, self.b_star]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ColumnStats {
    pub count: usize,
    /// Rows where the column was not applicable.
    pub not_applicable: usize,
    pub mean: Option<f64>,
    /// Population standard deviation.
    pub std: Option<f64>,
    pub min: Option<f64>,
    pub max: Option<f64>,
}

impl ColumnStats {
    pub fn of(values: impl IntoIterator<Item = Option<f64>>) -> Self {
        let mut present = Vec::new();
        let mut not_applicable = 0;
        for v in values {
            match v {
                Some(x) => present.push(x),
                None => not_applicable += 1,
            }
        }
        if present.is_empty() {
            return ColumnStats { count: 0, not_applicable, mean: None, std: None, min: None, max: None };
        }
        let n = present.len() as f64;
        let mean = present.iter().sum::<f64>() / n;
        let var = present.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        ColumnStats {
            count: present.len(),
            not_applicable,
            mean: Some(mean),
            std: Some(var.sqrt()),
            min: present.iter().copied().reduce(f64::min),
            max: present.iter().copied().reduce(f64::max),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupMetrics {
    pub group: String,
    pub records: usize,
    pub theta_reduction: ColumnStats,
    pub extra_theta_reduction: ColumnStats,
    pub pruned_share: ColumnStats,
    pub b_star: ColumnStats,
}

impl GroupMetrics {
    fn of(group: String, rows: &[&RecordMetrics]) -> Self {
        GroupMetrics {
            group,
            records: rows.len(),
            theta_reduction: ColumnStats::of(rows.iter().map(|r| r.theta_reduction)),
            extra_theta_reduction: ColumnStats::of(rows.iter().map(|r| r.extra_theta_reduction)),
            pruned_share: ColumnStats::of(rows.iter().map(|r| r.pruned_share)),
            b_star: ColumnStats::of(rows.iter().map(|r| r.b_star)),
        }
    }

    pub fn columns(&self) -> [&ColumnStats; 4] {
        [&self.theta_reduction, &self.extra_theta_reduction, &self.pruned_share, &self.b_star]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricsTable {
    pub groups: Vec<GroupMetrics>,
    pub overall: GroupMetrics,
    pub rows: Vec<RecordMetrics>,
}

/// Aggregates records per topology family and overall. Timed-out records
/// are left out.
pub fn compute_metrics(records: &[BenchRecord]) -> Result<MetricsTable, HarnessError> {
    let kept: Vec<&BenchRecord> = records.iter().filter(|r| !r.timed_out).collect();
    if kept.is_empty() {
        return Err(HarnessError::EmptyInput);
    }
    let rows: Vec<RecordMetrics> = kept.iter().map(|r| RecordMetrics::of(r)).collect();
    let mut by_group: BTreeMap<&str, Vec<&RecordMetrics>> = BTreeMap::new();
    for (rec, row) in kept.iter().zip(&rows) {
        by_group.entry(rec.group.as_str()).or_default().push(row);
    }
    let groups = by_group.into_iter().map(|(g, rs)| GroupMetrics::of(g.to_owned(), &rs)).collect();
    let all: Vec<&RecordMetrics> = rows.iter().collect();
    let overall = GroupMetrics::of("all".to_owned(), &all);
    Ok(MetricsTable { groups, overall, rows })
}

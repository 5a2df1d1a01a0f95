use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use crate::harness::metrics::{compute_metrics, ColumnStats, MetricsTable};
use crate::harness::{group_of, AlgStats, BenchRecord, HarnessError};
use crate::scalar::{Extended, Scalar};
use crate::search::Status;
use crate::{Bound, Rational};

pub const CSV_HEADER: &str =
    "instance,seed,alg,theta_max,est_l1,est_l2,est_l3,expanded,generated,pruned,l_star,u_star,b_star,sim_time";

const ALGS: [&str; 4] = ["ei-ucs", "beast", "bnb-beauty", "bnb-beast"];
const HISTOGRAM_BINS: usize = 20;
const COLUMN_TITLES: [&str; 4] = ["theta_max reduction %", "extra theta_max reduction %", "pruned nodes %", "B*"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl FromStr for Format {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, HarnessError> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            other => Err(HarnessError::UnsupportedFormat(other.to_owned())),
        }
    }
}

fn stats_of(rec: &BenchRecord) -> [&AlgStats; 4] {
    [&rec.ei_ucs, &rec.beast, &rec.bnb_beauty, &rec.bnb_beast]
}

/// One row per (instance, seed, algorithm); timed-out records are skipped.
pub fn write_results_csv(records: &[BenchRecord]) -> Result<String, HarnessError> {
    let mut writer = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    writer.write_record(CSV_HEADER.split(','))?;
    for rec in records.iter().filter(|r| !r.timed_out) {
        for (alg, stats) in ALGS.iter().zip(stats_of(rec)) {
            writer.write_record([
                rec.instance.clone(),
                rec.seed.map(|s| s.to_string()).unwrap_or_default(),
                alg.to_string(),
                stats.theta_max.to_string(),
                stats.count_at(1, false).to_string(),
                stats.count_at(2, false).to_string(),
                stats.count_at(3, true).to_string(),
                stats.expanded.to_string(),
                stats.generated.to_string(),
                stats.pruned.to_string(),
                rec.l_star.to_string(),
                rec.u_star.to_string(),
                rec.b_star.to_string(),
                stats.sim_time.to_string(),
            ])?;
        }
    }
    let bytes = writer.into_inner().map_err(|e| HarnessError::Malformed(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| HarnessError::Malformed(e.to_string()))
}

fn parse_num<T: FromStr>(field: &str, what: &str) -> Result<T, HarnessError> {
    field.parse().map_err(|_| HarnessError::Malformed(format!("bad {what} `{field}`")))
}

fn parse_bound(field: &str, what: &str) -> Result<Bound, HarnessError> {
    Extended::parse(field).ok_or_else(|| HarnessError::Malformed(format!("bad {what} `{field}`")))
}

/// Reads the CSV produced by [`write_results_csv`] back into records.
pub fn read_results_csv(text: &str) -> Result<Vec<BenchRecord>, HarnessError> {
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != CSV_HEADER {
        return Err(HarnessError::Malformed(format!("unexpected header `{}`", header.join(","))));
    }
    type Key = (String, Option<u64>);
    let mut order: Vec<Key> = Vec::new();
    let mut rows: BTreeMap<Key, (BTreeMap<String, AlgStats>, [Bound; 3])> = BTreeMap::new();
    for row in reader.records() {
        let row = row?;
        let field = |i: usize| row.get(i).unwrap_or("");
        let seed = match field(1) {
            "" => None,
            s => Some(parse_num::<u64>(s, "seed")?),
        };
        let key = (field(0).to_owned(), seed);
        let l1: u64 = parse_num(field(4), "est_l1")?;
        let l2: u64 = parse_num(field(5), "est_l2")?;
        let l3: u64 = parse_num(field(6), "est_l3")?;
        let stats = AlgStats {
            status: Status::Found,
            theta_max: parse_num(field(3), "theta_max")?,
            counts: vec![l1, l2, l3],
            expanded: parse_num(field(7), "expanded")?,
            generated: parse_num(field(8), "generated")?,
            pruned: parse_num(field(9), "pruned")?,
            sim_time: Rational::parse_exact(field(13))
                .ok_or_else(|| HarnessError::Malformed(format!("bad sim_time `{}`", field(13))))?,
            wall_time: Default::default(),
        };
        let bounds = [parse_bound(field(10), "l_star")?, parse_bound(field(11), "u_star")?, parse_bound(field(12), "b_star")?];
        let entry = rows.entry(key.clone()).or_insert_with(|| {
            order.push(key);
            (BTreeMap::new(), bounds)
        });
        entry.0.insert(field(2).to_owned(), stats);
    }

    order
        .into_iter()
        .map(|key| {
            let (mut algs, [l_star, u_star, b_star]) = rows.remove(&key).expect("key recorded on insert");
            let mut take = |alg: &str| {
                algs.remove(alg)
                    .ok_or_else(|| HarnessError::Malformed(format!("{} seed {:?}: missing `{alg}` row", key.0, key.1)))
            };
            Ok(BenchRecord {
                group: group_of(&key.0),
                seed: key.1,
                ei_ucs: take("ei-ucs")?,
                beast: take("beast")?,
                bnb_beauty: take("bnb-beauty")?,
                bnb_beast: take("bnb-beast")?,
                instance: key.0,
                l_star,
                u_star,
                b_star,
                timed_out: false,
            })
        })
        .collect()
}

fn mean_std(c: &ColumnStats) -> String {
    match (c.mean, c.std) {
        (Some(m), Some(s)) => format!("{m:.2} ± {s:.2}"),
        _ => "n/a".to_owned(),
    }
}

fn min_max(c: &ColumnStats) -> String {
    match (c.min, c.max) {
        (Some(lo), Some(hi)) => format!("{lo:.2}–{hi:.2}"),
        _ => "n/a".to_owned(),
    }
}

/// Bin counts over `[lo, hi]`; the top edge falls into the last bin.
pub(crate) fn histogram(values: &[f64], lo: f64, hi: f64) -> Vec<usize> {
    let mut bins = vec![0; HISTOGRAM_BINS];
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    for &v in values {
        let idx = if width > 0.0 { ((v - lo) / width).floor() as isize } else { 0 };
        bins[idx.clamp(0, HISTOGRAM_BINS as isize - 1) as usize] += 1;
    }
    bins
}

fn render_histogram(out: &mut String, title: &str, values: &[f64], lo: f64, hi: f64) {
    let bins = histogram(values, lo, hi);
    let peak = bins.iter().copied().max().unwrap_or(0).max(1);
    let width = (hi - lo) / HISTOGRAM_BINS as f64;
    let _ = writeln!(out, "\n{title} (n={})", values.len());
    for (i, &count) in bins.iter().enumerate() {
        let start = lo + width * i as f64;
        let bar = "#".repeat(count * 40 / peak);
        let _ = writeln!(out, "  [{:>8.2}, {:>8.2}) {:>6} |{bar}", start, start + width, count);
    }
}

fn render_text(table: &MetricsTable) -> String {
    let mut out = String::new();
    let name_width = table.groups.iter().map(|g| g.group.len()).max().unwrap_or(0).max(18);
    let _ = write!(out, "{:<name_width$} {:>7}", "group", "records");
    for title in COLUMN_TITLES {
        let _ = write!(out, "  {title:>28}");
    }
    out.push('\n');
    let rows = table.groups.iter().map(|g| (g.group.clone(), g, false));
    let overall = [
        ("all (mean ± std)".to_owned(), &table.overall, false),
        ("all (min–max)".to_owned(), &table.overall, true),
    ];
    for (name, g, range) in rows.chain(overall) {
        let _ = write!(out, "{name:<name_width$} {:>7}", g.records);
        for col in g.columns() {
            let cell = if range { min_max(col) } else { mean_std(col) };
            let _ = write!(out, "  {cell:>28}");
        }
        out.push('\n');
    }

    for (i, title) in COLUMN_TITLES.iter().enumerate() {
        let values: Vec<f64> = table.rows.iter().filter_map(|r| r.columns()[i]).collect();
        let (lo, hi) = if i < 3 {
            (0.0, 100.0)
        } else {
            (1.0, values.iter().copied().fold(1.0, f64::max))
        };
        render_histogram(&mut out, title, &values, lo, hi);
    }
    out
}

/// `csv` reproduces the per-run rows; `json` and `text` render the
/// aggregate table (text adds 20-bin histograms of each column).
pub fn render_report(records: &[BenchRecord], format: Format) -> Result<String, HarnessError> {
    match format {
        Format::Csv => write_results_csv(records),
        Format::Json => {
            let table = compute_metrics(records)?;
            let mut text = serde_json::to_string_pretty(&table).map_err(|e| HarnessError::Malformed(e.to_string()))?;
            text.push('\n');
            Ok(text)
        }
        Format::Text => Ok(render_text(&compute_metrics(records)?)),
    }
}

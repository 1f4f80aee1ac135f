use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::Time;
use crate::error::IoError;
use crate::metrics::{summarize, SimResult, SummaryStats};
use crate::model;
use crate::workstealing::ResponsePolicy;

pub const RESULTS_HEADER: &str =
    "W,p,lambda,policy,threshold,seed,makespan,requests_total,requests_granted,requests_failed,startup_end,shutdown_start";

pub const AGGREGATE_HEADER: &str = "W,p,lambda,policy,threshold,metric,n,mean,stddev,min,q1,median,q3,max";

mod on_off {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &bool, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(if *v { "on" } else { "off" })
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<bool, D::Error> {
        let s = String::deserialize(d)?;
        match s.as_str() {
            "on" => Ok(true),
            "off" => Ok(false),
            other => Err(serde::de::Error::custom(format!("expected on/off, got `{other}`"))),
        }
    }
}

/// One row of the per-run results file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResultRow {
    #[serde(rename = "W")]
    pub work: Time,
    pub p: usize,
    pub lambda: Time,
    pub policy: ResponsePolicy,
    #[serde(with = "on_off")]
    pub threshold: bool,
    pub seed: u64,
    pub makespan: Time,
    pub requests_total: u64,
    pub requests_granted: u64,
    pub requests_failed: u64,
    pub startup_end: Time,
    pub shutdown_start: Time,
}

impl ResultRow {
    pub fn config_key(&self) -> (Time, usize, Time, ResponsePolicy, bool) {
        (self.work, self.p, self.lambda, self.policy, self.threshold)
    }

    fn sort_key(&self) -> ((Time, usize, Time, ResponsePolicy, bool), u64) {
        (self.config_key(), self.seed)
    }
}

impl From<&SimResult> for ResultRow {
    fn from(r: &SimResult) -> Self {
        Self {
            work: r.config.total_work,
            p: r.config.num_procs,
            lambda: r.config.latency,
            policy: r.config.policy,
            threshold: r.config.threshold_enabled,
            seed: r.seed,
            makespan: r.makespan,
            requests_total: r.requests_total,
            requests_granted: r.requests_granted,
            requests_failed: r.requests_failed,
            startup_end: r.startup_end,
            shutdown_start: r.shutdown_start,
        }
    }
}

/// Rows sorted by configuration key, then seed.
pub fn result_rows(results: &[SimResult]) -> Vec<ResultRow> {
    let mut rows: Vec<ResultRow> = results.iter().map(ResultRow::from).collect();
    rows.sort_by_key(ResultRow::sort_key);
    rows
}

pub fn write_results_to<W: Write>(results: &[SimResult], out: W) -> Result<(), csv::Error> {
    let mut writer = csv::Writer::from_writer(out);
    for row in result_rows(results) {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

/// Writes the per-run CSV. Fails on an empty result list.
pub fn write_results(results: &[SimResult], path: &Path) -> Result<(), IoError> {
    if results.is_empty() {
        return Err(IoError::NoResults);
    }
    let file = create(path)?;
    write_results_to(results, BufWriter::new(file)).map_err(|source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    })
}

/// JSON mirror of [`write_results`]: an array of the same rows.
pub fn write_results_json(results: &[SimResult], path: &Path) -> Result<(), IoError> {
    if results.is_empty() {
        return Err(IoError::NoResults);
    }
    let file = create(path)?;
    let mut out = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut out, &result_rows(results)).map_err(|source| IoError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    out.flush().map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_results(path: &Path) -> Result<Vec<ResultRow>, IoError> {
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut reader = csv::Reader::from_path(path).map_err(csv_err)?;
    let header = reader.headers().map_err(csv_err)?.iter().collect::<Vec<_>>().join(",");
    if header != RESULTS_HEADER {
        return Err(IoError::Io {
            path: path.to_path_buf(),
            source: std::io::Error::new(std::io::ErrorKind::InvalidData, format!("unexpected header `{header}`")),
        });
    }
    reader.deserialize().collect::<Result<_, _>>().map_err(csv_err)
}

/// Summary of one metric over the replications of one configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    #[serde(rename = "W")]
    pub work: Time,
    pub p: usize,
    pub lambda: Time,
    pub policy: ResponsePolicy,
    #[serde(with = "on_off")]
    pub threshold: bool,
    pub metric: String,
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

/// Groups rows by configuration and summarizes makespan, request count,
/// phase boundaries, and (inside the model domain) the accuracy ratio.
pub fn aggregate(rows: &[ResultRow], c_prime: f64) -> Vec<AggregateRow> {
    let mut sorted = rows.to_vec();
    sorted.sort_by_key(ResultRow::sort_key);
    let mut out = Vec::new();
    for group in sorted.chunk_by(|a, b| a.config_key() == b.config_key()) {
        let first = &group[0];
        let column = |f: fn(&ResultRow) -> Time| group.iter().map(|r| f(r) as f64).collect::<Vec<_>>();
        let mut metrics: Vec<(&str, Vec<f64>)> = vec![
            ("makespan", column(|r| r.makespan)),
            ("requests_total", column(|r| r.requests_total)),
            ("startup_end", column(|r| r.startup_end)),
            ("shutdown_start", column(|r| r.shutdown_start)),
        ];
        let ratios: Result<Vec<f64>, _> = group
            .iter()
            .map(|r| model::accuracy_ratio(r.makespan as f64, r.work as f64, r.p as f64, r.lambda as f64, c_prime))
            .collect();
        if let Ok(ratios) = ratios {
            metrics.push(("accuracy_ratio", ratios));
        }
        for (name, values) in metrics {
            let SummaryStats {
                n,
                mean,
                stddev,
                min,
                q1,
                median,
                q3,
                max,
            } = summarize(&values).expect("groups are nonempty");
            out.push(AggregateRow {
                work: first.work,
                p: first.p,
                lambda: first.lambda,
                policy: first.policy,
                threshold: first.threshold,
                metric: name.to_string(),
                n,
                mean,
                stddev,
                min,
                q1,
                median,
                q3,
                max,
            });
        }
    }
    out
}

pub fn write_aggregate(rows: &[AggregateRow], path: &Path) -> Result<(), IoError> {
    let file = create(path)?;
    let csv_err = |source| IoError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut writer = csv::Writer::from_writer(BufWriter::new(file));
    for row in rows {
        writer.serialize(row).map_err(csv_err)?;
    }
    writer.flush().map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<File, IoError> {
    File::create(path).map_err(|source| IoError::Io {
        path: path.to_path_buf(),
        source,
    })
}

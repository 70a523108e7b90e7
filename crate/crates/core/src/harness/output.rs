use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{fit_rate, MetricsRow, RateFit};
use crate::{Error, Result};

pub const CSV_HEADER: [&str; 11] = [
    "config_id",
    "T",
    "seed",
    "dist_truth",
    "dist_empirical",
    "dist_trimmed",
    "err_max",
    "reg_inner",
    "reg_outer",
    "wall_ms",
    "error",
];

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:e}")).unwrap_or_default()
}

pub fn metrics_csv(rows: &[MetricsRow]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.config_id.clone(),
            r.horizon.to_string(),
            r.seed.to_string(),
            opt(r.dist_truth),
            opt(r.dist_empirical),
            opt(r.dist_trimmed),
            opt(r.err_max),
            opt(r.reg_inner),
            opt(r.reg_outer),
            r.wall_ms.to_string(),
            r.error.clone().unwrap_or_default(),
        ])?;
    }
    w.into_inner().map_err(|e| Error::Io(e.to_string()))
}

/// Reads the columns of `metrics.csv` back (details are not stored there).
pub fn read_metrics_csv(data: &[u8]) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_reader(data);
    let parse = |s: &str| -> Result<Option<f64>> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| Error::Config(format!("bad number {s:?}")))
        }
    };
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let get = |i: usize| rec.get(i).unwrap_or("");
        let mut row = MetricsRow::new(
            get(0),
            get(1).parse().map_err(|_| Error::Config("bad horizon".into()))?,
            get(2).parse().map_err(|_| Error::Config("bad seed".into()))?,
        );
        row.dist_truth = parse(get(3))?;
        row.dist_empirical = parse(get(4))?;
        row.dist_trimmed = parse(get(5))?;
        row.err_max = parse(get(6))?;
        row.reg_inner = parse(get(7))?;
        row.reg_outer = parse(get(8))?;
        row.wall_ms = get(9).parse().unwrap_or(0);
        row.error = Some(get(10).to_string()).filter(|s| !s.is_empty());
        out.push(row);
    }
    Ok(out)
}

/// Rate fits per config and distance column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub config_id: String,
    pub column: String,
    /// `(T, mean distance over seeds)`.
    pub means: Vec<(usize, f64)>,
    pub fit: Option<RateFit>,
    pub error: Option<String>,
}

pub fn rate_reports(rows: &[MetricsRow]) -> Vec<RateReport> {
    let mut groups: BTreeMap<&str, Vec<&MetricsRow>> = BTreeMap::new();
    for r in rows {
        groups.entry(r.config_id.as_str()).or_default().push(r);
    }
    let mut out = Vec::new();
    for (id, rs) in groups {
        let columns: [(&str, fn(&MetricsRow) -> Option<f64>); 3] = [
            ("dist_truth", |r| r.dist_truth),
            ("dist_empirical", |r| r.dist_empirical),
            ("dist_trimmed", |r| r.dist_trimmed),
        ];
        for (name, get) in columns {
            let mut by_t: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
            for r in &rs {
                if let Some(v) = get(r) {
                    by_t.entry(r.horizon).or_default().push(v);
                }
            }
            if by_t.is_empty() {
                continue;
            }
            let means: Vec<(usize, f64)> =
                by_t.into_iter().map(|(t, v)| (t, v.iter().sum::<f64>() / v.len() as f64)).collect();
            let (fit, error) = match fit_rate(&means) {
                Ok(f) => (Some(f), None),
                Err(e) => (None, Some(e.to_string())),
            };
            out.push(RateReport { config_id: id.to_string(), column: name.to_string(), means, fit, error });
        }
    }
    out
}

/// `log2 T` and `log2 dist` of the truth means, tab separated, one block per config.
pub fn plot_data(reports: &[RateReport]) -> String {
    let mut s = String::from("# config_id\tcolumn\tlog2_T\tlog2_dist\n");
    for r in reports {
        for &(t, d) in &r.means {
            if d > 0.0 {
                s.push_str(&format!("{}\t{}\t{}\t{}\n", r.config_id, r.column, (t as f64).log2(), d.log2()));
            }
        }
    }
    s
}

/// Writes via a temporary file in the same directory and renames it into place.
pub fn write_atomic(path: &Path, data: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or("out");
    let tmp = dir.join(format!(".{name}.tmp"));
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(data)?;
        f.sync_all()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// `metrics.csv`, `metrics.json`, `rates.json` and `rates.tsv` under `dir`.
pub fn write_outputs(dir: &Path, rows: &[MetricsRow]) -> Result<()> {
    write_atomic(&dir.join("metrics.csv"), &metrics_csv(rows)?)?;
    write_atomic(&dir.join("metrics.json"), &serde_json::to_vec_pretty(rows)?)?;
    let reports = rate_reports(rows);
    write_atomic(&dir.join("rates.json"), &serde_json::to_vec_pretty(&reports)?)?;
    write_atomic(&dir.join("rates.tsv"), plot_data(&reports).as_bytes())?;
    Ok(())
}

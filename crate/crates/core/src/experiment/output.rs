use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::metrics::MetricsRow;
use super::run::RunOutput;

pub fn write_metrics_csv<W: io::Write>(rows: &[MetricsRow], w: W) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(MetricsRow::HEADER)?;
    for r in rows {
        out.write_record(r.values().iter().map(|v| format!("{v}")))?;
    }
    out.flush()
}

/// Metrics file name of contact `name` when a run has `count` contacts.
pub fn metrics_file_name(name: &str, count: usize) -> String {
    if count == 1 {
        "metrics.csv".to_string()
    } else {
        format!("metrics_{name}.csv")
    }
}

pub fn write_all(out: &RunOutput, dir: &Path) -> io::Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for (name, rows) in out.contact_names.iter().zip(&out.metrics) {
        let p = dir.join(metrics_file_name(name, out.contact_names.len()));
        write_metrics_csv(rows, io::BufWriter::new(fs::File::create(&p)?))?;
        paths.push(p);
    }
    let p = dir.join("trajectory.json");
    serde_json::to_writer(io::BufWriter::new(fs::File::create(&p)?), &out.trajectory)?;
    paths.push(p);
    let p = dir.join("summary.json");
    let mut text = serde_json::to_string_pretty(&out.summary())?;
    text.push('\n');
    fs::write(&p, text)?;
    paths.push(p);
    Ok(paths)
}

/// Reads a metrics table written by [`write_metrics_csv`].
pub fn read_metrics_csv<R: io::Read>(r: R) -> io::Result<Vec<MetricsRow>> {
    let mut reader = csv::Reader::from_reader(r);
    let mut rows = Vec::new();
    for rec in reader.records() {
        let rec = rec?;
        let v: Vec<f64> = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
            .collect::<io::Result<_>>()?;
        if v.len() != MetricsRow::HEADER.len() {
            return Err(io::Error::new(io::ErrorKind::InvalidData, "wrong column count"));
        }
        rows.push(MetricsRow {
            t: v[0],
            separation: v[1],
            alignment: v[2],
            slippage: v[3],
            sliding: v[4],
            total_geodesic: v[5],
            centroid: [v[6], v[7], v[8]],
        });
    }
    Ok(rows)
}

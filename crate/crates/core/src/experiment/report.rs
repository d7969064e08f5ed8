use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{ExperimentReport, ProfileReport, ReportFormat, SnapshotCount};
use crate::error::{Error, Result};

/// Stage timings go to their own file so the report files stay byte-stable.
pub const TIMINGS_FILE: &str = "timings.json";

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::io(path, e))
}

fn csv_writer(path: &Path) -> Result<csv::Writer<File>> {
    csv::Writer::from_path(path).map_err(|e| Error::Output(format!("{}: {e}", path.display())))
}

fn csv_err(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Output(format!("{}: {e}", path.display()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = create(path)?;
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Output(e.to_string()))?;
    writeln!(w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

fn write_counts(path: &Path, counts: &[SnapshotCount]) -> Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["snapshot_index", "edge_count"])
        .map_err(csv_err(path))?;
    for c in counts {
        w.write_record([c.snapshot_index.to_string(), c.edge_count.to_string()])
            .map_err(csv_err(path))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn edge_count_files(
    dir: &Path,
    profiles: &std::collections::BTreeMap<String, Vec<SnapshotCount>>,
) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for (model, counts) in profiles {
        let path = dir.join(format!("edge_counts_{model}.csv"));
        write_counts(&path, counts)?;
        written.push(path);
    }
    Ok(written)
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    version: &'static str,
    config: &'a super::ExperimentConfig,
}

/// Writes the report into `dir` and returns the paths written:
/// `metrics.csv` or `metrics.json`, `rank_table.csv`, `gain_table.csv`,
/// `failures.csv`, one `edge_counts_<model>.csv` per model, `config_echo.json`
/// and [`TIMINGS_FILE`]. Every file except the timings is a pure function of
/// the config.
pub fn emit_report(
    report: &ExperimentReport,
    dir: impl AsRef<Path>,
    format: ReportFormat,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();

    match format {
        ReportFormat::Csv => {
            let path = dir.join("metrics.csv");
            let mut w = csv_writer(&path)?;
            w.write_record(["dataset", "method", "model", "auc", "acc", "f1"])
                .map_err(csv_err(&path))?;
            for r in &report.records {
                w.write_record([
                    r.dataset.clone(),
                    r.method.clone(),
                    r.model.clone(),
                    r.auc.to_string(),
                    r.acc.to_string(),
                    r.f1.to_string(),
                ])
                .map_err(csv_err(&path))?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
            written.push(path);
        }
        ReportFormat::Json => {
            let path = dir.join("metrics.json");
            write_json(&path, report)?;
            written.push(path);
        }
    }

    let path = dir.join("rank_table.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["model", "auc", "acc", "f1", "score"])
        .map_err(csv_err(&path))?;
    for r in &report.rank_table.rows {
        w.write_record([
            r.model.clone(),
            r.auc.to_string(),
            r.acc.to_string(),
            r.f1.to_string(),
            r.score.to_string(),
        ])
        .map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join("gain_table.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["method", "variant", "baseline", "gain_percent"])
        .map_err(csv_err(&path))?;
    for g in &report.gains {
        for row in &g.table.rows {
            let cells = g
                .table
                .baselines
                .iter()
                .zip(&row.gains)
                .map(|(b, v)| (b.as_str(), *v));
            for (baseline, gain) in cells.chain([("mean", row.mean)]) {
                w.write_record([&g.method, &row.variant, baseline, &gain.to_string()])
                    .map_err(csv_err(&path))?;
            }
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    let path = dir.join("failures.csv");
    let mut w = csv_writer(&path)?;
    w.write_record(["model", "method", "stage", "error"])
        .map_err(csv_err(&path))?;
    for f in &report.failures {
        w.write_record([&f.model, &f.method, &f.stage, &f.error])
            .map_err(csv_err(&path))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    written.push(path);

    written.extend(edge_count_files(dir, &report.edge_counts)?);

    let path = dir.join("config_echo.json");
    write_json(
        &path,
        &ConfigEcho {
            version: env!("CARGO_PKG_VERSION"),
            config: &report.config,
        },
    )?;
    written.push(path);

    let path = dir.join(TIMINGS_FILE);
    #[derive(Serialize)]
    struct Timings<'a> {
        stages: &'a [super::StageTiming],
        total_seconds: f64,
    }
    write_json(
        &path,
        &Timings {
            stages: &report.timings,
            total_seconds: report.total_seconds,
        },
    )?;
    written.push(path);
    Ok(written)
}

/// Writes one `edge_counts_<model>.csv` per profile.
pub fn emit_profile(profile: &ProfileReport, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    edge_count_files(dir, &profile.profiles)
}

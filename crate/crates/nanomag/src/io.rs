//! CSV traces and results, and plain-text weight files.
//!
//! Reals are written with Rust's shortest round-trip formatting, so parsing
//! a file back reproduces every value exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use nanomag_core::readout::{ErrorMode, FeatureVector, ReadoutWeights, ReservoirTrace};
use nanomag_core::task::{BoolFn, TaskSpec};

use crate::error::{HarnessError, Result};
use crate::experiment::ResultRow;

pub const RESULTS_HEADER: [&str; 7] = [
    "task",
    "n",
    "mode",
    "error_mean",
    "error_std",
    "nonconverged",
    "seed",
];

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.to_path_buf(),
        source,
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, reason: impl Into<String>) -> HarnessError {
    HarnessError::Format {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

pub fn write_trace<W: Write>(out: W, trace: &ReservoirTrace) -> csv::Result<()> {
    let n_mag = trace.rows().first().map_or(0, |r| r.features().len());
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["k".to_string(), "bit".to_string()];
    header.extend((1..=n_mag).map(|i| format!("mu_x{i}")));
    w.write_record(&header)?;
    for (k, (row, bit)) in trace.rows().iter().zip(trace.bits()).enumerate() {
        let mut record = vec![k.to_string(), bit.to_string()];
        record.extend(row.features().iter().map(|x| x.to_string()));
        w.write_record(&record)?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_trace_csv(path: &Path, trace: &ReservoirTrace) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_trace(BufWriter::new(file), trace).map_err(csv_err(path))
}

pub fn parse_trace_csv(path: &Path) -> Result<ReservoirTrace> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let header = r.headers().map_err(csv_err(path))?.clone();
    if header.len() < 2 || &header[0] != "k" || &header[1] != "bit" {
        return Err(format_err(path, "trace header must start with k,bit"));
    }
    let mut rows = Vec::new();
    let mut bits = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err(path))?;
        let bit: u8 = record[1].parse().map_err(|_| format_err(path, "bad bit"))?;
        let features = record
            .iter()
            .skip(2)
            .map(|x| x.parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| format_err(path, "bad feature value"))?;
        rows.push(FeatureVector::from_features(features));
        bits.push(bit);
    }
    Ok(ReservoirTrace::new(rows, bits)?)
}

pub fn write_results<W: Write>(out: W, rows: &[ResultRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(RESULTS_HEADER)?;
    for row in rows {
        w.write_record([
            row.task.function.label().to_string(),
            row.task.delay.to_string(),
            row.mode.label().to_string(),
            row.error_mean.to_string(),
            row.error_std.to_string(),
            row.nonconverged.to_string(),
            row.seed.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn emit_results_csv(path: &Path, rows: &[ResultRow]) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_results(BufWriter::new(file), rows).map_err(csv_err(path))
}

fn parse_mode(s: &str) -> Option<ErrorMode> {
    [ErrorMode::Raw, ErrorMode::Thresholded]
        .into_iter()
        .find(|m| m.label() == s)
}

pub fn parse_results_csv(path: &Path) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    if r.headers()
        .map_err(csv_err(path))?
        .iter()
        .ne(RESULTS_HEADER)
    {
        return Err(format_err(path, "unexpected results header"));
    }
    let mut out = Vec::new();
    for record in r.records() {
        let rec = record.map_err(csv_err(path))?;
        let bad = |what: &str| format_err(path, format!("bad {what}"));
        let function = BoolFn::parse(&rec[0]).ok_or_else(|| bad("task"))?;
        out.push(ResultRow {
            task: TaskSpec::new(function, rec[1].parse().map_err(|_| bad("n"))?),
            mode: parse_mode(&rec[2]).ok_or_else(|| bad("mode"))?,
            error_mean: rec[3].parse().map_err(|_| bad("error_mean"))?,
            error_std: rec[4].parse().map_err(|_| bad("error_std"))?,
            nonconverged: rec[5].parse().map_err(|_| bad("nonconverged"))?,
            seed: rec[6].parse().map_err(|_| bad("seed"))?,
        });
    }
    Ok(out)
}

/// File name used for the weights of `task`, e.g. `weights_XOR_n3.txt`.
pub fn weights_file_name(task: TaskSpec) -> String {
    format!("weights_{}_n{}.txt", task.function.label(), task.delay)
}

pub fn write_weights<W: Write>(
    mut out: W,
    task: TaskSpec,
    w: &ReadoutWeights,
) -> std::io::Result<()> {
    writeln!(out, "# task={} n={}", task.function.label(), task.delay)?;
    for x in &w.weights {
        writeln!(out, "{x}")?;
    }
    out.flush()
}

pub fn emit_weights(path: &Path, task: TaskSpec, w: &ReadoutWeights) -> Result<()> {
    let file = File::create(path).map_err(io_err(path))?;
    write_weights(BufWriter::new(file), task, w).map_err(io_err(path))
}

pub fn read_weights(path: &Path) -> Result<(TaskSpec, ReadoutWeights)> {
    let file = File::open(path).map_err(io_err(path))?;
    let mut lines = BufReader::new(file).lines();
    let header = lines
        .next()
        .transpose()
        .map_err(io_err(path))?
        .ok_or_else(|| format_err(path, "empty weights file"))?;
    let task = parse_weights_header(&header).ok_or_else(|| format_err(path, "bad header line"))?;
    let mut weights = Vec::new();
    for line in lines {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        weights.push(
            line.trim()
                .parse()
                .map_err(|_| format_err(path, "bad weight"))?,
        );
    }
    Ok((task, ReadoutWeights::new(weights)?))
}

fn parse_weights_header(line: &str) -> Option<TaskSpec> {
    let mut function = None;
    let mut delay = None;
    for field in line.trim_start_matches('#').split_whitespace() {
        match field.split_once('=')? {
            ("task", v) => function = BoolFn::parse(v),
            ("n", v) => delay = v.parse().ok(),
            _ => return None,
        }
    }
    Some(TaskSpec::new(function?, delay?))
}

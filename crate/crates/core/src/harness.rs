//! Experiment harness behind the command line: generation and evaluation
//! commands, the `(k_pop, k_mut)` parameter sweep and its CSV files.

use std::collections::BTreeMap;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::evolution::{run_single, RunRecord, SearchParams};
use crate::properties::full_report;
use crate::sbox::SBox;
use crate::seed::RngSeed;

/// Process exit codes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Success = 0,
    SearchFailure = 1,
    Usage = 2,
    Io = 3,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Sbox(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
}

impl HarnessError {
    pub fn exit(&self) -> Exit {
        match self {
            HarnessError::Sbox(_) => Exit::Usage,
            HarnessError::Io { .. } => Exit::Io,
            HarnessError::Csv { source, .. } => {
                if source.is_io_error() {
                    Exit::Io
                } else {
                    Exit::Usage
                }
            }
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> HarnessError + '_ {
    move |source| HarnessError::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// Grid of `(k_pop, k_mut)` cells with a number of independent runs each.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub k_pop_values: Vec<usize>,
    pub k_mut_values: Vec<usize>,
    pub runs_per_cell: usize,
    pub base_seed: RngSeed,
}

impl Default for SweepGrid {
    fn default() -> Self {
        SweepGrid {
            k_pop_values: (1..=21).step_by(2).collect(),
            k_mut_values: (1..=31).step_by(3).collect(),
            runs_per_cell: 100,
            base_seed: RngSeed(0),
        }
    }
}

impl SweepGrid {
    pub fn validate(&self) -> Result<(), Error> {
        if self.runs_per_cell == 0 {
            return Err(Error::InvalidParams("runs per cell must be at least 1".into()));
        }
        if self.k_pop_values.contains(&0) || self.k_mut_values.contains(&0) {
            return Err(Error::InvalidParams("grid values must be at least 1".into()));
        }
        Ok(())
    }

    /// Seed of run `run` in cell `(k_pop, k_mut)`.
    pub fn run_seed(&self, k_pop: usize, k_mut: usize, run: usize) -> RngSeed {
        self.base_seed.derive(&[k_pop as u64, k_mut as u64, run as u64])
    }

    /// Every run of the sweep as search parameters, cells in `(k_pop, k_mut)`
    /// order and runs in index order.
    pub fn jobs(&self, defaults: &SearchParams) -> Vec<SearchParams> {
        let mut k_pops = self.k_pop_values.clone();
        let mut k_muts = self.k_mut_values.clone();
        k_pops.sort_unstable();
        k_pops.dedup();
        k_muts.sort_unstable();
        k_muts.dedup();
        let mut jobs = Vec::new();
        for &k_pop in &k_pops {
            for &k_mut in &k_muts {
                for run in 0..self.runs_per_cell {
                    jobs.push(SearchParams {
                        k_pop,
                        k_mut,
                        seed: self.run_seed(k_pop, k_mut, run),
                        lanes: 1,
                        ..*defaults
                    });
                }
            }
        }
        jobs
    }
}

/// One row of the run log.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRow {
    pub seed: u64,
    pub n: u32,
    pub k_pop: usize,
    pub k_mut: usize,
    pub k_iter: u64,
    pub target_nl: u32,
    pub success: bool,
    pub k_sbox: u64,
    pub iterations_used: u64,
    pub nl: u32,
    pub delta: u32,
    pub degree: u32,
    pub ai: u32,
    pub duration_ms: u64,
}

impl From<&RunRecord> for RunRow {
    fn from(r: &RunRecord) -> Self {
        RunRow {
            seed: r.params.seed.0,
            n: r.params.n,
            k_pop: r.params.k_pop,
            k_mut: r.params.k_mut,
            k_iter: r.params.k_iter,
            target_nl: r.params.target_nl,
            success: r.outcome.success,
            k_sbox: r.outcome.k_sbox,
            iterations_used: r.outcome.iterations_used,
            nl: r.report.nl,
            delta: r.report.delta,
            degree: r.report.degree,
            ai: r.report.ai,
            duration_ms: r.duration_ms(),
        }
    }
}

/// Aggregated statistics of one grid cell. Failed runs enter the means with
/// the evaluation count they reached at the iteration cap.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub k_pop: usize,
    pub k_mut: usize,
    pub runs: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_k_sbox: f64,
    /// Sample standard deviation (zero for a single run).
    pub std_k_sbox: f64,
    pub mean_duration_ms: f64,
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct SweepTable {
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    pub fn cell(&self, k_pop: usize, k_mut: usize) -> Option<&SweepCell> {
        self.cells.iter().find(|c| c.k_pop == k_pop && c.k_mut == k_mut)
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn sample_std(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

/// Groups run rows by `(k_pop, k_mut)` and summarizes each cell.
pub fn aggregate(rows: &[RunRow]) -> SweepTable {
    let mut groups: BTreeMap<(usize, usize), Vec<&RunRow>> = BTreeMap::new();
    for r in rows {
        groups.entry((r.k_pop, r.k_mut)).or_default().push(r);
    }
    let cells = groups
        .into_iter()
        .map(|((k_pop, k_mut), rs)| {
            let k_sbox: Vec<f64> = rs.iter().map(|r| r.k_sbox as f64).collect();
            let durations: Vec<f64> = rs.iter().map(|r| r.duration_ms as f64).collect();
            let successes = rs.iter().filter(|r| r.success).count();
            SweepCell {
                k_pop,
                k_mut,
                runs: rs.len(),
                successes,
                success_rate: successes as f64 / rs.len() as f64,
                mean_k_sbox: mean(&k_sbox),
                std_k_sbox: sample_std(&k_sbox),
                mean_duration_ms: mean(&durations),
            }
        })
        .collect();
    SweepTable { cells }
}

pub struct SweepResult {
    pub table: SweepTable,
    pub runs: Vec<RunRecord>,
}

/// Executes every run of `grid` (with `defaults` for the remaining
/// parameters) on a pool of `threads` workers and aggregates the results.
/// Runs are evaluated single-laned; outcomes are independent of the lane
/// count, so this only affects scheduling.
pub fn run_sweep(grid: &SweepGrid, defaults: &SearchParams, threads: usize) -> Result<SweepResult, Error> {
    grid.validate()?;
    defaults.validate()?;
    let jobs = grid.jobs(defaults);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::InvalidParams(format!("cannot start worker threads: {e}")))?;
    let runs = pool.install(|| {
        jobs.par_iter()
            .map(run_single)
            .collect::<Result<Vec<_>, _>>()
    })?;
    let rows: Vec<RunRow> = runs.iter().map(RunRow::from).collect();
    Ok(SweepResult {
        table: aggregate(&rows),
        runs,
    })
}

pub const SWEEP_CSV_HEADER: &str =
    "k_pop,k_mut,runs,successes,success_rate,mean_k_sbox,std_k_sbox,mean_duration_ms";

/// Writes the table with one row per cell, ordered by `(k_pop, k_mut)`.
pub fn write_sweep_csv_to<W: Write>(t: &SweepTable, out: W) -> csv::Result<()> {
    let mut cells: Vec<&SweepCell> = t.cells.iter().collect();
    cells.sort_by_key(|c| (c.k_pop, c.k_mut));
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(SWEEP_CSV_HEADER.split(','))?;
    for c in cells {
        w.serialize(c)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_sweep_csv(t: &SweepTable, path: &Path) -> Result<(), HarnessError> {
    let file = fs::File::create(path).map_err(io_err(path))?;
    write_sweep_csv_to(t, file).map_err(csv_err(path))
}

pub fn read_sweep_csv(path: &Path) -> Result<SweepTable, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let cells = r
        .deserialize()
        .collect::<csv::Result<Vec<SweepCell>>>()
        .map_err(csv_err(path))?;
    Ok(SweepTable { cells })
}

pub fn write_run_log(rows: &[RunRow], path: &Path) -> Result<(), HarnessError> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_path(path)
        .map_err(csv_err(path))?;
    w.write_record(RunRecord::CSV_HEADER.split(','))
        .map_err(csv_err(path))?;
    for r in rows {
        w.serialize(r).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn read_run_log(path: &Path) -> Result<Vec<RunRow>, HarnessError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    r.deserialize()
        .collect::<csv::Result<Vec<RunRow>>>()
        .map_err(csv_err(path))
}

/// Runs one search. On success writes the S-box file (table, blank line,
/// run record) to `out_path`. The run record is always printed to `stdout`.
pub fn cmd_generate<W: Write>(
    params: &SearchParams,
    out_path: &Path,
    stdout: &mut W,
) -> Result<Exit, HarnessError> {
    let record = run_single(params)?;
    let out = io_err(Path::new("<stdout>"));
    write!(stdout, "{record}").map_err(out)?;
    let Some(sbox) = &record.outcome.sbox else {
        return Ok(Exit::SearchFailure);
    };
    let contents = format!("{}\n{}", sbox.to_text(), record.to_kv());
    fs::write(out_path, contents).map_err(io_err(out_path))?;
    Ok(Exit::Success)
}

/// Parses an S-box file and prints its property report.
pub fn cmd_evaluate<W: Write>(in_path: &Path, stdout: &mut W) -> Result<Exit, HarnessError> {
    let text = fs::read_to_string(in_path).map_err(io_err(in_path))?;
    let sbox = SBox::from_text(&text)?;
    let report = full_report(&sbox);
    write!(stdout, "{report}").map_err(io_err(Path::new("<stdout>")))?;
    Ok(Exit::Success)
}

/// Runs a sweep, writes the aggregate table and the per-run log, and prints
/// one summary line per cell.
pub fn cmd_sweep<W: Write>(
    grid: &SweepGrid,
    defaults: &SearchParams,
    threads: usize,
    table_path: &Path,
    log_path: &Path,
    stdout: &mut W,
) -> Result<Exit, HarnessError> {
    let result = run_sweep(grid, defaults, threads)?;
    let rows: Vec<RunRow> = result.runs.iter().map(RunRow::from).collect();
    write_run_log(&rows, log_path)?;
    write_sweep_csv(&result.table, table_path)?;
    let out = |e| HarnessError::Io {
        path: "<stdout>".into(),
        source: e,
    };
    for c in &result.table.cells {
        writeln!(
            stdout,
            "k_pop={:<3} k_mut={:<3} runs={:<4} success={:.2} mean_k_sbox={:.1}",
            c.k_pop, c.k_mut, c.runs, c.success_rate, c.mean_k_sbox
        )
        .map_err(out)?;
    }
    Ok(Exit::Success)
}

//! Versioned delimited metrics, eval, eval-curve and trace files.
//!
//! Every file starts with a schema tag line; the column set and order are
//! fixed per version. Floats are written with the shortest representation
//! that round-trips, so identical runs produce byte-identical files.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::agent::EpisodeRecord;
use crate::env::Termination;
use crate::vec2::Vec2;

use super::HarnessError;

pub const METRICS_SCHEMA: &str = "#seac-metrics-v1";
pub const METRICS_HEADER: &str = "episode,env_steps,return,steps,energy,sim_time,outcome";
pub const EVAL_SCHEMA: &str = "#seac-eval-v1";
pub const EVAL_HEADER: &str = "episode,return,steps,energy,sim_time,outcome";
pub const EVAL_CURVE_SCHEMA: &str = "#seac-evalcurve-v1";
pub const EVAL_CURVE_HEADER: &str =
    "env_steps,episodes,mean_return,success_rate,mean_steps,mean_sim_time";
pub const TRACE_SCHEMA: &str = "#seac-trace-v1";
pub const TRACE_HEADER: &str = "step,duration_s,frequency_hz,pos_x,pos_y,force_x,force_y,reward";

/// One episode as logged during training, plus the wall-clock seconds the
/// episode took. Wall time goes to progress logs only; the metrics file keeps
/// the deterministic columns so identical runs stay byte-identical.
#[derive(Debug, Clone, Copy)]
pub struct EpisodeMetrics {
    pub record: EpisodeRecord,
    pub wall_clock: f64,
}

/// Per-step record of one traced episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepTrace {
    pub step: u32,
    pub duration: f64,
    /// Control rate `1 / duration` in Hz.
    pub frequency: f64,
    pub position: Vec2,
    pub force: Vec2,
    pub reward_total: f64,
}

/// One evaluation episode.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalRecord {
    pub episode: u32,
    pub ret: f64,
    pub steps: u32,
    pub energy: f64,
    pub sim_time: f64,
    pub outcome: Termination,
}

/// Metadata line carried by eval files.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalMeta {
    pub algo: String,
    pub seed: u64,
    pub episodes: u32,
    /// Env steps the evaluated checkpoint had trained for.
    pub trained_steps: u64,
}

fn open_writer(path: &Path, append: bool) -> Result<BufWriter<File>, HarnessError> {
    let file = if append {
        OpenOptions::new().append(true).open(path)
    } else {
        File::create(path)
    };
    Ok(BufWriter::new(file.map_err(|e| HarnessError::io(path.to_path_buf(), e))?))
}

pub struct MetricsWriter {
    w: BufWriter<File>,
    path: PathBuf,
}

impl MetricsWriter {
    /// Create (with schema and header) or append to a metrics file.
    pub fn create(path: &Path, append: bool) -> Result<MetricsWriter, HarnessError> {
        let fresh = !append || !path.exists();
        let mut w = open_writer(path, !fresh)?;
        if fresh {
            writeln!(w, "{METRICS_SCHEMA}").map_err(|e| HarnessError::io(path.into(), e))?;
            writeln!(w, "{METRICS_HEADER}").map_err(|e| HarnessError::io(path.into(), e))?;
        }
        Ok(MetricsWriter { w, path: path.to_path_buf() })
    }

    pub fn append(&mut self, r: &EpisodeRecord) -> Result<(), HarnessError> {
        writeln!(
            self.w,
            "{},{},{},{},{},{},{}",
            r.episode,
            r.env_steps,
            r.ret,
            r.steps,
            r.energy,
            r.sim_time,
            r.outcome.as_str()
        )
        .map_err(|e| HarnessError::io(self.path.clone(), e))
    }

    pub fn flush(&mut self) -> Result<(), HarnessError> {
        self.w.flush().map_err(|e| HarnessError::io(self.path.clone(), e))
    }
}

pub fn write_eval_file(
    path: &Path,
    meta: &EvalMeta,
    records: &[EvalRecord],
) -> Result<(), HarnessError> {
    let mut w = open_writer(path, false)?;
    let io = |e| HarnessError::io(path.to_path_buf(), e);
    writeln!(w, "{EVAL_SCHEMA}").map_err(io)?;
    writeln!(
        w,
        "#algo={} seed={} episodes={} trained_steps={}",
        meta.algo, meta.seed, meta.episodes, meta.trained_steps
    )
    .map_err(io)?;
    writeln!(w, "{EVAL_HEADER}").map_err(io)?;
    for r in records {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.episode,
            r.ret,
            r.steps,
            r.energy,
            r.sim_time,
            r.outcome.as_str()
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub fn write_trace_file(path: &Path, rows: &[StepTrace]) -> Result<(), HarnessError> {
    let mut w = open_writer(path, false)?;
    let io = |e| HarnessError::io(path.to_path_buf(), e);
    writeln!(w, "{TRACE_SCHEMA}").map_err(io)?;
    writeln!(w, "{TRACE_HEADER}").map_err(io)?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{},{}",
            r.step,
            r.duration,
            r.frequency,
            r.position.x,
            r.position.y,
            r.force.x,
            r.force.y,
            r.reward_total
        )
        .map_err(io)?;
    }
    w.flush().map_err(io)
}

pub struct EvalCurveWriter {
    w: BufWriter<File>,
    path: PathBuf,
}

impl EvalCurveWriter {
    pub fn create(path: &Path, append: bool) -> Result<EvalCurveWriter, HarnessError> {
        let fresh = !append || !path.exists();
        let mut w = open_writer(path, !fresh)?;
        if fresh {
            writeln!(w, "{EVAL_CURVE_SCHEMA}").map_err(|e| HarnessError::io(path.into(), e))?;
            writeln!(w, "{EVAL_CURVE_HEADER}").map_err(|e| HarnessError::io(path.into(), e))?;
        }
        Ok(EvalCurveWriter { w, path: path.to_path_buf() })
    }

    #[allow(clippy::too_many_arguments)]
    pub fn append(
        &mut self,
        env_steps: u64,
        episodes: u32,
        mean_return: f64,
        success_rate: f64,
        mean_steps: f64,
        mean_sim_time: f64,
    ) -> Result<(), HarnessError> {
        writeln!(
            self.w,
            "{env_steps},{episodes},{mean_return},{success_rate},{mean_steps},{mean_sim_time}"
        )
        .map_err(|e| HarnessError::io(self.path.clone(), e))
    }

    pub fn flush(&mut self) -> Result<(), HarnessError> {
        self.w.flush().map_err(|e| HarnessError::io(self.path.clone(), e))
    }
}

fn parse_outcome(s: &str) -> Result<Termination, HarnessError> {
    match s {
        "goal" => Ok(Termination::GoalReached),
        "crash" => Ok(Termination::Crashed),
        "timeout" => Ok(Termination::Timeout),
        "running" => Ok(Termination::Running),
        other => Err(HarnessError::Parse(format!("unknown outcome '{other}'"))),
    }
}

/// Parse an eval file written by [`write_eval_file`].
pub fn read_eval_file(path: &Path) -> Result<(EvalMeta, Vec<EvalRecord>), HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
    let mut lines = BufReader::new(file).lines();
    let mut next_line = || -> Result<String, HarnessError> {
        lines
            .next()
            .ok_or_else(|| HarnessError::Parse(format!("{}: unexpected end of file", path.display())))?
            .map_err(|e| HarnessError::io(path.to_path_buf(), e))
    };
    let schema = next_line()?;
    if schema != EVAL_SCHEMA {
        return Err(HarnessError::Parse(format!(
            "{}: expected schema '{EVAL_SCHEMA}', found '{schema}'",
            path.display()
        )));
    }
    let meta_line = next_line()?;
    let meta = parse_eval_meta(&meta_line, path)?;
    let header = next_line()?;
    if header != EVAL_HEADER {
        return Err(HarnessError::Parse(format!("{}: unexpected header '{header}'", path.display())));
    }
    let mut records = Vec::new();
    for line in lines {
        let line = line.map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 6 {
            return Err(HarnessError::Parse(format!("{}: bad row '{line}'", path.display())));
        }
        let num = |i: usize| -> Result<f64, HarnessError> {
            fields[i]
                .parse()
                .map_err(|_| HarnessError::Parse(format!("{}: bad number in '{line}'", path.display())))
        };
        records.push(EvalRecord {
            episode: num(0)? as u32,
            ret: num(1)?,
            steps: num(2)? as u32,
            energy: num(3)?,
            sim_time: num(4)?,
            outcome: parse_outcome(fields[5])?,
        });
    }
    Ok((meta, records))
}

fn parse_eval_meta(line: &str, path: &Path) -> Result<EvalMeta, HarnessError> {
    let body = line
        .strip_prefix('#')
        .ok_or_else(|| HarnessError::Parse(format!("{}: missing meta line", path.display())))?;
    let mut algo = None;
    let mut seed = None;
    let mut episodes = None;
    let mut trained = None;
    for token in body.split_whitespace() {
        let (key, value) = token
            .split_once('=')
            .ok_or_else(|| HarnessError::Parse(format!("{}: bad meta token '{token}'", path.display())))?;
        match key {
            "algo" => algo = Some(value.to_string()),
            "seed" => seed = value.parse().ok(),
            "episodes" => episodes = value.parse().ok(),
            "trained_steps" => trained = value.parse().ok(),
            _ => {}
        }
    }
    match (algo, seed, episodes) {
        (Some(algo), Some(seed), Some(episodes)) => {
            Ok(EvalMeta { algo, seed, episodes, trained_steps: trained.unwrap_or(0) })
        }
        _ => Err(HarnessError::Parse(format!("{}: incomplete meta line '{line}'", path.display()))),
    }
}

/// Parse a metrics file written by [`MetricsWriter`]; returns the episode
/// rows as `(episode, env_steps, return, steps, energy, sim_time, outcome)`.
#[allow(clippy::type_complexity)]
pub fn read_metrics_file(
    path: &Path,
) -> Result<Vec<(u64, u64, f64, u32, f64, f64, Termination)>, HarnessError> {
    let file = File::open(path).map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
    let mut rows = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
        if i == 0 {
            if line != METRICS_SCHEMA {
                return Err(HarnessError::Parse(format!(
                    "{}: expected schema '{METRICS_SCHEMA}'",
                    path.display()
                )));
            }
            continue;
        }
        if i == 1 || line.is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 7 {
            return Err(HarnessError::Parse(format!("{}: bad row '{line}'", path.display())));
        }
        let bad = || HarnessError::Parse(format!("{}: bad number in '{line}'", path.display()));
        rows.push((
            f[0].parse().map_err(|_| bad())?,
            f[1].parse().map_err(|_| bad())?,
            f[2].parse().map_err(|_| bad())?,
            f[3].parse().map_err(|_| bad())?,
            f[4].parse().map_err(|_| bad())?,
            f[5].parse().map_err(|_| bad())?,
            parse_outcome(f[6])?,
        ));
    }
    Ok(rows)
}

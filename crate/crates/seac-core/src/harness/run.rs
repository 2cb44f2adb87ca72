//! Seeded training, evaluation and trace export around the trainer.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use crate::agent::{load_policy, Actor, PolicySnapshot, Trainer};
use crate::env::{PointMassEnv, Termination};
use crate::rng::{derive, Stream};

use super::config::RunConfig;
use super::metrics::{
    write_eval_file, write_trace_file, EvalCurveWriter, EvalMeta, EvalRecord, MetricsWriter,
    StepTrace,
};
use super::HarnessError;

/// Aggregate results of one training run.
#[derive(Debug, Clone)]
pub struct RunSummary {
    pub episodes: u64,
    pub env_steps: u64,
    pub updates: u64,
    pub duration_violations: u64,
    pub force_violations: u64,
    pub metrics_path: PathBuf,
    pub final_checkpoint: PathBuf,
    pub wall_seconds: f64,
}

/// Train per the config, writing `metrics.csv`, `evals.csv`, periodic
/// checkpoints and `final.ckpt` under the output directory. Fully
/// deterministic per (config, seed) apart from stderr progress lines.
pub fn run_train(config: &RunConfig, resume_from: Option<&Path>) -> Result<RunSummary, HarnessError> {
    config.validate()?;
    let out = &config.output_dir;
    std::fs::create_dir_all(out).map_err(|e| HarnessError::io(out.clone(), e))?;
    let ckpt_dir = out.join("checkpoints");
    if config.checkpoint_every > 0 {
        std::fs::create_dir_all(&ckpt_dir).map_err(|e| HarnessError::io(ckpt_dir.clone(), e))?;
    }

    let mut trainer = match resume_from {
        Some(path) => {
            let file = File::open(path).map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
            Trainer::load_checkpoint(
                &mut BufReader::new(file),
                config.env,
                config.reward,
                config.sac.clone(),
            )?
        }
        None => Trainer::new(
            config.seed,
            config.algo,
            config.time_activation,
            config.env,
            config.reward,
            config.sac.clone(),
        )?,
    };
    let resuming = resume_from.is_some();

    let metrics_path = out.join("metrics.csv");
    let mut metrics = MetricsWriter::create(&metrics_path, resuming)?;
    let mut eval_curve = if config.eval_every > 0 {
        Some(EvalCurveWriter::create(&out.join("evals.csv"), resuming)?)
    } else {
        None
    };

    let start = Instant::now();
    let mut last_report = Instant::now();
    let mut last_report_steps = trainer.env_steps();
    let mut last_ckpt_steps = trainer.env_steps();

    while trainer.env_steps() < config.total_steps {
        let record = trainer.step_once()?;
        let steps = trainer.env_steps();

        if let Some(rec) = record {
            metrics.append(&rec)?;
            if config.checkpoint_every > 0 && steps - last_ckpt_steps >= config.checkpoint_every {
                let path = ckpt_dir.join(format!("step_{steps:010}.ckpt"));
                save_checkpoint(&trainer, &path)?;
                last_ckpt_steps = steps;
            }
            if last_report.elapsed().as_secs_f64() > 10.0 {
                let rate = (steps - last_report_steps) as f64 / last_report.elapsed().as_secs_f64();
                let ([c1, c2], a) = trainer.last_losses();
                eprintln!(
                    "[train {} seed {}] step {steps}/{} ep {} ret {:.1} | {:.0} steps/s critic {:.2}/{:.2} actor {:.2} alpha {:.3}",
                    config.algo.as_str(),
                    config.seed,
                    config.total_steps,
                    rec.episode,
                    rec.ret,
                    rate,
                    c1,
                    c2,
                    a,
                    trainer.alpha(),
                );
                last_report = Instant::now();
                last_report_steps = steps;
            }
        }

        if config.eval_every > 0 && steps % config.eval_every == 0 {
            if let Some(curve) = eval_curve.as_mut() {
                let records = eval_episodes(trainer.actor(), config, config.seed, config.eval_episodes, None)?;
                let n = records.len() as f64;
                let mean_return = records.iter().map(|r| r.ret).sum::<f64>() / n;
                let success = records
                    .iter()
                    .filter(|r| r.outcome == Termination::GoalReached)
                    .count() as f64
                    / n;
                let mean_steps = records.iter().map(|r| r.steps as f64).sum::<f64>() / n;
                let mean_sim = records.iter().map(|r| r.sim_time).sum::<f64>() / n;
                curve.append(steps, config.eval_episodes, mean_return, success, mean_steps, mean_sim)?;
            }
        }
    }

    metrics.flush()?;
    if let Some(c) = eval_curve.as_mut() {
        c.flush()?;
    }
    let final_path = out.join("final.ckpt");
    save_checkpoint(&trainer, &final_path)?;

    let (duration_violations, force_violations) = trainer.violations();
    Ok(RunSummary {
        episodes: trainer.episodes(),
        env_steps: trainer.env_steps(),
        updates: trainer.updates(),
        duration_violations,
        force_violations,
        metrics_path,
        final_checkpoint: final_path,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}

fn save_checkpoint(trainer: &Trainer, path: &Path) -> Result<(), HarnessError> {
    let file = File::create(path).map_err(|e| HarnessError::io(path.to_path_buf(), e))?;
    let mut w = BufWriter::new(file);
    trainer.save_checkpoint(&mut w).map_err(HarnessError::Checkpoint)?;
    w.flush().map_err(|e| HarnessError::io(path.to_path_buf(), e))
}

/// Load the policy from a run checkpoint, validated against the config.
pub fn load_snapshot(config: &RunConfig, checkpoint: &Path) -> Result<PolicySnapshot, HarnessError> {
    let file = File::open(checkpoint).map_err(|e| HarnessError::io(checkpoint.to_path_buf(), e))?;
    load_policy(&mut BufReader::new(file), &config.env, &config.sac).map_err(HarnessError::Checkpoint)
}

/// One deterministic (mean-action) episode; optionally records per-step rows.
fn run_episode_deterministic(
    actor: &Actor,
    env: &mut PointMassEnv,
    mut trace: Option<&mut Vec<StepTrace>>,
) -> Result<(f64, u32, f64, f64, Termination), HarnessError> {
    let mut rng = derive(0, Stream::PolicyNoise); // unused in deterministic mode
    let mut obs = env.state().observation(env.config());
    let mut ret = 0.0;
    let mut steps = 0u32;
    let mut energy = 0.0;
    let mut sim_time = 0.0;
    loop {
        let (action, _) = actor.select_action(&obs, false, &mut rng);
        let out = env.step(&action)?;
        ret += out.reward.total;
        steps += 1;
        energy += out.reward.energy;
        sim_time += action.duration;
        if let Some(rows) = trace.as_mut() {
            rows.push(StepTrace {
                step: steps,
                duration: action.duration,
                frequency: 1.0 / action.duration,
                position: env.state().agent_pos,
                force: action.force,
                reward_total: out.reward.total,
            });
        }
        if out.terminal {
            return Ok((ret, steps, energy, sim_time, out.reason));
        }
        obs = out.observation;
    }
}

/// Run `episodes` deterministic episodes on tasks drawn from the evaluation
/// placement stream of `seed`.
fn eval_episodes(
    actor: &Actor,
    config: &RunConfig,
    seed: u64,
    episodes: u32,
    mut traces: Option<&mut Vec<Vec<StepTrace>>>,
) -> Result<Vec<EvalRecord>, HarnessError> {
    let mut env =
        PointMassEnv::new(config.env, config.reward, derive(seed, Stream::EvalPlacement))?;
    let mut records = Vec::with_capacity(episodes as usize);
    for i in 0..episodes {
        if i > 0 {
            env.reset();
        }
        let mut rows = Vec::new();
        let trace_rows = traces.as_mut().map(|_| &mut rows);
        let (ret, steps, energy, sim_time, outcome) =
            run_episode_deterministic(actor, &mut env, trace_rows)?;
        if let Some(all) = traces.as_mut() {
            all.push(rows);
        }
        records.push(EvalRecord { episode: i, ret, steps, energy, sim_time, outcome });
    }
    Ok(records)
}

/// Evaluation outcome plus its summary statistics.
#[derive(Debug, Clone)]
pub struct EvalSummary {
    pub meta: EvalMeta,
    pub records: Vec<EvalRecord>,
}

impl EvalSummary {
    pub fn success_rate(&self) -> f64 {
        self.records.iter().filter(|r| r.outcome == Termination::GoalReached).count() as f64
            / self.records.len() as f64
    }

    pub fn mean_return(&self) -> f64 {
        self.records.iter().map(|r| r.ret).sum::<f64>() / self.records.len() as f64
    }

    pub fn mean_steps(&self) -> f64 {
        self.records.iter().map(|r| r.steps as f64).sum::<f64>() / self.records.len() as f64
    }

    pub fn mean_sim_time(&self) -> f64 {
        self.records.iter().map(|r| r.sim_time).sum::<f64>() / self.records.len() as f64
    }

    /// Mean simulated seconds over successful episodes only; `None` when no
    /// episode reached the goal.
    pub fn mean_sim_time_successful(&self) -> Option<f64> {
        let ok: Vec<f64> = self
            .records
            .iter()
            .filter(|r| r.outcome == Termination::GoalReached)
            .map(|r| r.sim_time)
            .collect();
        if ok.is_empty() {
            None
        } else {
            Some(ok.iter().sum::<f64>() / ok.len() as f64)
        }
    }

    /// Human-readable table with mean/std/quantiles per metric.
    pub fn format_table(&self) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "algo={} seed={} episodes={} trained_steps={}\n",
            self.meta.algo, self.meta.seed, self.meta.episodes, self.meta.trained_steps
        ));
        s.push_str(&format!("success_rate: {:.3}\n", self.success_rate()));
        s.push_str("metric        mean      std       min       p25       p50       p75       max\n");
        for (name, values) in [
            ("return", self.records.iter().map(|r| r.ret).collect::<Vec<_>>()),
            ("steps", self.records.iter().map(|r| r.steps as f64).collect()),
            ("energy", self.records.iter().map(|r| r.energy).collect()),
            ("sim_time", self.records.iter().map(|r| r.sim_time).collect()),
        ] {
            let st = table_stats(&values);
            s.push_str(&format!(
                "{name:<10} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3} {:>9.3}\n",
                st.0, st.1, st.2, st.3, st.4, st.5, st.6
            ));
        }
        s
    }
}

fn table_stats(values: &[f64]) -> (f64, f64, f64, f64, f64, f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite metric"));
    let q = |p: f64| sorted[((p * (sorted.len() - 1) as f64).round() as usize).min(sorted.len() - 1)];
    (mean, var.sqrt(), sorted[0], q(0.25), q(0.5), q(0.75), sorted[sorted.len() - 1])
}

/// Deterministic evaluation of a checkpoint; writes `eval.csv` when an
/// output directory is given.
pub fn run_eval(
    config: &RunConfig,
    checkpoint: &Path,
    episodes: u32,
    out_dir: Option<&Path>,
) -> Result<EvalSummary, HarnessError> {
    config.validate()?;
    if episodes == 0 {
        return Err(HarnessError::Config("episodes must be positive".into()));
    }
    let snapshot = load_snapshot(config, checkpoint)?;
    let records = eval_episodes(&snapshot.actor, config, config.seed, episodes, None)?;
    let meta = EvalMeta {
        algo: snapshot.algo.as_str().to_string(),
        seed: config.seed,
        episodes,
        trained_steps: snapshot.env_steps,
    };
    if let Some(dir) = out_dir {
        std::fs::create_dir_all(dir).map_err(|e| HarnessError::io(dir.to_path_buf(), e))?;
        write_eval_file(&dir.join("eval.csv"), &meta, &records)?;
    }
    Ok(EvalSummary { meta, records })
}

/// Export the per-step trace of one deterministic episode on the task drawn
/// from `seed`'s evaluation stream; matches `run_eval`'s first episode for
/// the same seed.
pub fn export_trace(
    config: &RunConfig,
    checkpoint: &Path,
    seed: u64,
    out_dir: &Path,
) -> Result<(PathBuf, Vec<StepTrace>), HarnessError> {
    config.validate()?;
    let snapshot = load_snapshot(config, checkpoint)?;
    let mut env = PointMassEnv::new(config.env, config.reward, derive(seed, Stream::EvalPlacement))?;
    let mut rows = Vec::new();
    run_episode_deterministic(&snapshot.actor, &mut env, Some(&mut rows))?;
    std::fs::create_dir_all(out_dir).map_err(|e| HarnessError::io(out_dir.to_path_buf(), e))?;
    let path = out_dir.join("trace.csv");
    write_trace_file(&path, &rows)?;
    Ok((path, rows))
}

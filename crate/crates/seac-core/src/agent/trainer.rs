//! Off-policy training loop: act, store, update once per environment step.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{
    ElasticAction, EnvConfig, EnvError, Observation, PointMassEnv, Termination, OBS_DIM,
};
use crate::nn::{
    AdamParams, AdamState, Activation, Mat, Mlp, ScalarAdam, TimeActivation,
};
use crate::reward::RewardWeights;
use crate::rng::{derive, Stream};
use crate::vec2::Vec2;

use super::actor::{Actor, Algo};
use super::losses::{
    actor_loss_and_grads, critic_loss_and_grads, critic_targets, polyak_update,
    temperature_loss_and_grad,
};
use super::replay::{ReplayBuffer, Transition, ACTION_DIM};

#[derive(Debug, Error)]
pub enum TrainerError {
    #[error("invalid training config: {0}")]
    Config(String),
    #[error(transparent)]
    Env(#[from] EnvError),
}

/// SAC hyperparameters. Field names double as the config-file keys.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SacConfig {
    pub gamma: f64,
    pub batch_size: usize,
    /// Entropy temperature; the fixed value when auto-tuning is off, the
    /// initial value when it is on.
    pub alpha: f64,
    pub auto_alpha: bool,
    /// Target entropy for auto-tuning.
    pub eta: f64,
    pub polyak_tau: f64,
    pub actor_lr: f64,
    pub critic_lr: f64,
    pub alpha_lr: f64,
    pub num_critics: usize,
    /// Uniform-random environment steps collected before updates begin.
    pub start_steps: u64,
    pub updates_per_env_step: u32,
    pub replay_capacity: usize,
    /// Hidden layer widths shared by actor and critics.
    pub hidden: Vec<usize>,
    /// Step duration pinned by the fixed-rate baseline, in seconds.
    pub fixed_duration: f64,
}

impl Default for SacConfig {
    fn default() -> Self {
        SacConfig {
            gamma: 0.99,
            batch_size: 256,
            alpha: 0.12,
            auto_alpha: false,
            eta: -3.0,
            polyak_tau: 0.005,
            actor_lr: 2e-4,
            critic_lr: 2e-4,
            alpha_lr: 2e-4,
            num_critics: 2,
            start_steps: 2500,
            updates_per_env_step: 1,
            replay_capacity: 1_000_000,
            hidden: vec![256, 256],
            fixed_duration: 0.2,
        }
    }
}

impl SacConfig {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return Err(format!("gamma must be in (0, 1), got {}", self.gamma));
        }
        if !(self.polyak_tau > 0.0 && self.polyak_tau <= 1.0) {
            return Err(format!("polyak_tau must be in (0, 1], got {}", self.polyak_tau));
        }
        if self.num_critics != 2 {
            return Err(format!("num_critics is pinned to 2, got {}", self.num_critics));
        }
        if self.batch_size == 0 {
            return Err("batch_size must be positive".into());
        }
        if self.replay_capacity < self.batch_size {
            return Err("replay_capacity must be at least batch_size".into());
        }
        if self.hidden.is_empty() {
            return Err("hidden must list at least one layer width".into());
        }
        for (name, lr) in
            [("actor_lr", self.actor_lr), ("critic_lr", self.critic_lr), ("alpha_lr", self.alpha_lr)]
        {
            if !(lr.is_finite() && lr > 0.0) {
                return Err(format!("{name} must be finite and > 0, got {lr}"));
            }
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(format!("alpha must be finite and > 0, got {}", self.alpha));
        }
        if self.updates_per_env_step == 0 {
            return Err("updates_per_env_step must be positive".into());
        }
        Ok(())
    }
}

/// Everything logged when an episode finishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeRecord {
    pub episode: u64,
    /// Total environment steps at episode end.
    pub env_steps: u64,
    /// Sum of per-step reward totals.
    pub ret: f64,
    pub steps: u32,
    /// Sum of per-step energy charges (joules).
    pub energy: f64,
    /// Sum of step durations (seconds).
    pub sim_time: f64,
    pub outcome: Termination,
}

pub struct Trainer {
    pub(crate) env: PointMassEnv,
    pub(crate) env_config: EnvConfig,
    pub(crate) sac: SacConfig,
    pub(crate) time_activation: TimeActivation,
    pub(crate) actor: Actor,
    pub(crate) critics: [Mlp<f32>; 2],
    pub(crate) targets: [Mlp<f32>; 2],
    pub(crate) adam_actor: AdamState<f32>,
    pub(crate) adam_critics: [AdamState<f32>; 2],
    pub(crate) log_alpha: f64,
    pub(crate) alpha: f64,
    pub(crate) alpha_adam: ScalarAdam,
    pub(crate) buffer: ReplayBuffer,
    pub(crate) rng_policy: ChaCha8Rng,
    pub(crate) rng_warmup: ChaCha8Rng,
    pub(crate) rng_buffer: ChaCha8Rng,
    pub(crate) root_seed: u64,
    pub(crate) env_steps: u64,
    pub(crate) episodes: u64,
    pub(crate) updates: u64,
    pub(crate) current_obs: Observation,
    pub(crate) ep_return: f64,
    pub(crate) ep_steps: u32,
    pub(crate) ep_sim_time: f64,
    pub(crate) ep_energy: f64,
    pub(crate) duration_violations: u64,
    pub(crate) force_violations: u64,
    pub(crate) last_critic_loss: [f64; 2],
    pub(crate) last_actor_loss: f64,
}

impl Trainer {
    pub fn new(
        root_seed: u64,
        algo: Algo,
        time_activation: TimeActivation,
        env_config: EnvConfig,
        weights: RewardWeights,
        sac: SacConfig,
    ) -> Result<Trainer, TrainerError> {
        sac.validate().map_err(TrainerError::Config)?;
        if sac.fixed_duration < env_config.duration_min || sac.fixed_duration > env_config.duration_max
        {
            return Err(TrainerError::Config(format!(
                "fixed_duration {} outside [{}, {}]",
                sac.fixed_duration, env_config.duration_min, env_config.duration_max
            )));
        }
        let env = PointMassEnv::new(env_config, weights, derive(root_seed, Stream::EnvPlacement))?;
        let mut init_rng = derive(root_seed, Stream::WeightInit);
        let actor =
            Actor::new(algo, time_activation, &env_config, &sac.hidden, sac.fixed_duration, &mut init_rng);
        let critic_dims: Vec<usize> = std::iter::once(actor.critic_in_dim())
            .chain(sac.hidden.iter().copied())
            .chain(std::iter::once(1))
            .collect();
        let critics = [
            Mlp::new(&critic_dims, Activation::Relu, &mut init_rng),
            Mlp::new(&critic_dims, Activation::Relu, &mut init_rng),
        ];
        let targets = critics.clone();
        let adam_actor = AdamState::new(&actor.net);
        let adam_critics = [AdamState::new(&critics[0]), AdamState::new(&critics[1])];
        let buffer = ReplayBuffer::new(sac.replay_capacity);
        let current_obs = env.state().observation(&env_config);
        Ok(Trainer {
            env,
            env_config,
            sac: sac.clone(),
            time_activation,
            actor,
            critics,
            targets,
            adam_actor,
            adam_critics,
            log_alpha: sac.alpha.ln(),
            alpha: sac.alpha,
            alpha_adam: ScalarAdam::default(),
            buffer,
            rng_policy: derive(root_seed, Stream::PolicyNoise),
            rng_warmup: derive(root_seed, Stream::WarmupActions),
            rng_buffer: derive(root_seed, Stream::BufferSampling),
            root_seed,
            env_steps: 0,
            episodes: 0,
            updates: 0,
            current_obs,
            ep_return: 0.0,
            ep_steps: 0,
            ep_sim_time: 0.0,
            ep_energy: 0.0,
            duration_violations: 0,
            force_violations: 0,
            last_critic_loss: [0.0; 2],
            last_actor_loss: 0.0,
        })
    }

    pub fn algo(&self) -> Algo {
        self.actor.algo
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn episodes(&self) -> u64 {
        self.episodes
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn buffer_len(&self) -> usize {
        self.buffer.len()
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn actor(&self) -> &Actor {
        &self.actor
    }

    pub fn violations(&self) -> (u64, u64) {
        (self.duration_violations, self.force_violations)
    }

    pub fn last_losses(&self) -> ([f64; 2], f64) {
        (self.last_critic_loss, self.last_actor_loss)
    }

    /// One environment step plus the scheduled gradient updates. Returns the
    /// episode record when this step ended an episode.
    pub fn step_once(&mut self) -> Result<Option<EpisodeRecord>, TrainerError> {
        let obs = self.current_obs;
        let (action, stored) = if self.env_steps < self.sac.start_steps {
            self.random_action()
        } else {
            self.actor.select_action(&obs, true, &mut self.rng_policy)
        };
        self.count_range_safety(&action);
        let out = self.env.step(&action)?;

        let mut state = [0f32; OBS_DIM];
        let mut next_state = [0f32; OBS_DIM];
        for i in 0..OBS_DIM {
            state[i] = obs[i] as f32;
            next_state[i] = out.observation[i] as f32;
        }
        self.buffer.push(Transition {
            state,
            action: stored,
            reward: out.reward.total as f32,
            next_state,
            done: out.terminal,
            truncated: out.reason == Termination::Timeout,
        });

        self.env_steps += 1;
        self.ep_return += out.reward.total;
        self.ep_steps += 1;
        self.ep_sim_time += action.duration;
        self.ep_energy += out.reward.energy;

        let record = if out.terminal {
            let rec = EpisodeRecord {
                episode: self.episodes,
                env_steps: self.env_steps,
                ret: self.ep_return,
                steps: self.ep_steps,
                energy: self.ep_energy,
                sim_time: self.ep_sim_time,
                outcome: out.reason,
            };
            self.episodes += 1;
            self.ep_return = 0.0;
            self.ep_steps = 0;
            self.ep_sim_time = 0.0;
            self.ep_energy = 0.0;
            self.current_obs = self.env.reset();
            Some(rec)
        } else {
            self.current_obs = out.observation;
            None
        };

        if self.env_steps > self.sac.start_steps && self.buffer.len() >= self.sac.batch_size {
            for _ in 0..self.sac.updates_per_env_step {
                self.update();
            }
        }
        Ok(record)
    }

    fn random_action(&mut self) -> (ElasticAction, [f32; ACTION_DIM]) {
        let duration = match self.actor.algo {
            Algo::Seac => self
                .rng_warmup
                .random_range(self.env_config.duration_min..=self.env_config.duration_max),
            Algo::SacFixed => self.sac.fixed_duration,
        };
        let b = self.env_config.force_bound;
        let force =
            Vec2::new(self.rng_warmup.random_range(-b..=b), self.rng_warmup.random_range(-b..=b));
        let action = ElasticAction::new(duration, force);
        (action, [duration as f32, force.x as f32, force.y as f32])
    }

    fn count_range_safety(&mut self, action: &ElasticAction) {
        if action.duration < self.env_config.duration_min
            || action.duration > self.env_config.duration_max
            || !action.duration.is_finite()
        {
            self.duration_violations += 1;
        }
        let b = self.env_config.force_bound;
        if action.force.x.abs() > b || action.force.y.abs() > b || !action.force.is_finite() {
            self.force_violations += 1;
        }
    }

    fn update(&mut self) {
        let b = self.sac.batch_size;
        let k = self.actor.sampled_dims();
        let cols = self.actor.critic_action_cols();
        let idx = self.buffer.sample_indices(&mut self.rng_buffer, b);

        let mut states = Mat::<f32>::zeros(b, OBS_DIM);
        let mut next_states = Mat::<f32>::zeros(b, OBS_DIM);
        let mut critic_inputs = Mat::<f32>::zeros(b, OBS_DIM + k);
        let mut rewards = vec![0f32; b];
        let mut mask = vec![0f32; b];
        for (r, &i) in idx.iter().enumerate() {
            let t = self.buffer.get(i);
            states.row_mut(r).copy_from_slice(&t.state);
            next_states.row_mut(r).copy_from_slice(&t.next_state);
            let row = critic_inputs.row_mut(r);
            row[..OBS_DIM].copy_from_slice(&t.state);
            row[OBS_DIM..].copy_from_slice(&t.action[cols.clone()]);
            rewards[r] = t.reward;
            mask[r] = t.bootstrap_mask();
        }

        let mut noise = Mat::<f32>::zeros(b, k);
        self.fill_noise(&mut noise);
        let y = critic_targets(
            &self.actor.net,
            &self.actor.transforms,
            [&self.targets[0], &self.targets[1]],
            &next_states,
            &noise,
            &rewards,
            &mask,
            self.sac.gamma as f32,
            self.alpha as f32,
        );

        let critic_hp = AdamParams::with_lr(self.sac.critic_lr);
        for ci in 0..2 {
            let u = critic_loss_and_grads(&self.critics[ci], &critic_inputs, &y);
            self.adam_critics[ci].step(&mut self.critics[ci], &u.grads, &critic_hp);
            self.last_critic_loss[ci] = u.loss as f64;
        }

        let mut noise2 = Mat::<f32>::zeros(b, k);
        self.fill_noise(&mut noise2);
        let au = actor_loss_and_grads(
            &self.actor.net,
            &self.actor.transforms,
            [&self.critics[0], &self.critics[1]],
            &states,
            &noise2,
            self.alpha as f32,
        );
        let actor_hp = AdamParams::with_lr(self.sac.actor_lr);
        self.adam_actor.step(&mut self.actor.net, &au.grads, &actor_hp);
        self.last_actor_loss = au.loss as f64;

        if self.sac.auto_alpha {
            let lps: Vec<f64> = au.log_probs.iter().map(|&v| v as f64).collect();
            let (_, grad) = temperature_loss_and_grad(self.log_alpha, &lps, self.sac.eta);
            let alpha_hp = AdamParams::with_lr(self.sac.alpha_lr);
            self.alpha_adam.step(&mut self.log_alpha, grad, &alpha_hp);
            self.alpha = self.log_alpha.exp();
        }

        polyak_update(&mut self.targets[0], &self.critics[0], self.sac.polyak_tau);
        polyak_update(&mut self.targets[1], &self.critics[1], self.sac.polyak_tau);
        self.updates += 1;
    }

    fn fill_noise(&mut self, noise: &mut Mat<f32>) {
        for v in noise.data_mut() {
            *v = self.rng_policy.sample(StandardNormal);
        }
    }
}

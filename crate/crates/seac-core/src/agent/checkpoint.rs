//! Run-level checkpoint container: the five networks, optimizer moments,
//! temperature state, rng stream positions and the in-flight episode, all in
//! one versioned binary blob. Saving, loading and saving again is
//! bit-identical.

use std::io::{Read, Write};

use crate::env::{EnvConfig, EnvState, PointMassEnv};
use crate::nn::checkpoint::{
    expect_magic, read_f64, read_mlp, read_u128, read_u32, read_u64, read_u8, write_f64,
    write_mlp, write_u128, write_u32, write_u64, write_u8, CheckpointError,
};
use crate::nn::{AdamState, Mlp, ScalarAdam, TimeActivation};
use crate::reward::RewardWeights;
use crate::rng::{restore, Stream};
use crate::vec2::Vec2;

use super::actor::{Actor, Algo};
use super::replay::ReplayBuffer;
use super::trainer::{SacConfig, Trainer, TrainerError};

pub const RUN_MAGIC: &[u8; 8] = b"SEACRUN\0";
pub const RUN_VERSION: u32 = 1;

impl Trainer {
    pub fn save_checkpoint(&self, w: &mut impl Write) -> Result<(), CheckpointError> {
        w.write_all(RUN_MAGIC)?;
        write_u32(w, RUN_VERSION)?;
        write_u8(w, self.actor.algo.tag())?;
        write_u8(w, self.time_activation.tag())?;
        write_u64(w, self.root_seed)?;
        write_u64(w, self.env_steps)?;
        write_u64(w, self.episodes)?;
        write_u64(w, self.updates)?;
        write_u128(w, self.env.rng_word_pos())?;
        write_u128(w, self.rng_policy.get_word_pos())?;
        write_u128(w, self.rng_warmup.get_word_pos())?;
        write_u128(w, self.rng_buffer.get_word_pos())?;
        write_f64(w, self.log_alpha)?;
        write_f64(w, self.alpha)?;
        write_f64(w, self.alpha_adam.m)?;
        write_f64(w, self.alpha_adam.v)?;
        write_u64(w, self.alpha_adam.step)?;
        write_env_state(w, self.env.state())?;
        write_f64(w, self.ep_return)?;
        write_u32(w, self.ep_steps)?;
        write_f64(w, self.ep_sim_time)?;
        write_f64(w, self.ep_energy)?;
        write_u64(w, self.duration_violations)?;
        write_u64(w, self.force_violations)?;
        write_mlp(w, &self.actor.net)?;
        write_mlp(w, &self.critics[0])?;
        write_mlp(w, &self.critics[1])?;
        write_mlp(w, &self.targets[0])?;
        write_mlp(w, &self.targets[1])?;
        write_adam(w, &self.adam_actor)?;
        write_adam(w, &self.adam_critics[0])?;
        write_adam(w, &self.adam_critics[1])?;
        Ok(())
    }

    /// Restore a full training state. The configs must match the shapes and
    /// mode stored in the checkpoint; the replay buffer restarts empty and
    /// refills before updates resume.
    pub fn load_checkpoint(
        r: &mut impl Read,
        env_config: EnvConfig,
        weights: RewardWeights,
        sac: SacConfig,
    ) -> Result<Trainer, TrainerError> {
        sac.validate().map_err(TrainerError::Config)?;
        let c = read_container(r).map_err(checkpoint_config_err)?;
        let actor = c.into_actor(&env_config, &sac).map_err(TrainerError::Config)?;
        let critic_dims: Vec<usize> = std::iter::once(actor.critic_in_dim())
            .chain(sac.hidden.iter().copied())
            .chain(std::iter::once(1))
            .collect();
        for critic in [&c.critics[0], &c.critics[1], &c.targets[0], &c.targets[1]] {
            if critic.dims() != critic_dims {
                return Err(TrainerError::Config(format!(
                    "checkpoint critic shape {:?} does not match config {:?}",
                    critic.dims(),
                    critic_dims
                )));
            }
        }
        let env = PointMassEnv::from_parts(
            env_config,
            weights,
            c.env_state,
            restore(c.root_seed, Stream::EnvPlacement, c.rng_pos[0]),
        )?;
        let current_obs = env.state().observation(&env_config);
        Ok(Trainer {
            env,
            env_config,
            sac: sac.clone(),
            time_activation: c.time_activation,
            actor,
            critics: c.critics,
            targets: c.targets,
            adam_actor: c.adam_actor,
            adam_critics: c.adam_critics,
            log_alpha: c.log_alpha,
            alpha: c.alpha,
            alpha_adam: c.alpha_adam,
            buffer: ReplayBuffer::new(sac.replay_capacity),
            rng_policy: restore(c.root_seed, Stream::PolicyNoise, c.rng_pos[1]),
            rng_warmup: restore(c.root_seed, Stream::WarmupActions, c.rng_pos[2]),
            rng_buffer: restore(c.root_seed, Stream::BufferSampling, c.rng_pos[3]),
            root_seed: c.root_seed,
            env_steps: c.env_steps,
            episodes: c.episodes,
            updates: c.updates,
            current_obs,
            ep_return: c.ep_return,
            ep_steps: c.ep_steps,
            ep_sim_time: c.ep_sim_time,
            ep_energy: c.ep_energy,
            duration_violations: c.duration_violations,
            force_violations: c.force_violations,
            last_critic_loss: [0.0; 2],
            last_actor_loss: 0.0,
        })
    }
}

fn checkpoint_config_err(e: CheckpointError) -> TrainerError {
    TrainerError::Config(e.to_string())
}

/// Evaluation-side view of a checkpoint: the policy plus its mode tags.
pub struct PolicySnapshot {
    pub actor: Actor,
    pub algo: Algo,
    pub time_activation: TimeActivation,
    pub env_steps: u64,
    pub episodes: u64,
}

/// Load just what evaluation and tracing need.
pub fn load_policy(
    r: &mut impl Read,
    env_config: &EnvConfig,
    sac: &SacConfig,
) -> Result<PolicySnapshot, CheckpointError> {
    let c = read_container(r)?;
    let algo = c.algo;
    let time_activation = c.time_activation;
    let (env_steps, episodes) = (c.env_steps, c.episodes);
    let actor = c.into_actor(env_config, sac).map_err(CheckpointError::Corrupt)?;
    Ok(PolicySnapshot { actor, algo, time_activation, env_steps, episodes })
}

struct Container {
    algo: Algo,
    time_activation: TimeActivation,
    root_seed: u64,
    env_steps: u64,
    episodes: u64,
    updates: u64,
    rng_pos: [u128; 4],
    log_alpha: f64,
    alpha: f64,
    alpha_adam: ScalarAdam,
    env_state: EnvState,
    ep_return: f64,
    ep_steps: u32,
    ep_sim_time: f64,
    ep_energy: f64,
    duration_violations: u64,
    force_violations: u64,
    actor_net: Mlp<f32>,
    critics: [Mlp<f32>; 2],
    targets: [Mlp<f32>; 2],
    adam_actor: AdamState<f32>,
    adam_critics: [AdamState<f32>; 2],
}

impl Container {
    /// Wrap the stored actor net, validating its shape against the config.
    fn into_actor(&self, env_config: &EnvConfig, sac: &SacConfig) -> Result<Actor, String> {
        let transforms = Actor::build_transforms(self.algo, self.time_activation, env_config);
        let mut dims = vec![crate::env::OBS_DIM];
        dims.extend_from_slice(&sac.hidden);
        dims.push(2 * transforms.len());
        if self.actor_net.dims() != dims {
            return Err(format!(
                "checkpoint actor shape {:?} does not match config {:?}",
                self.actor_net.dims(),
                dims
            ));
        }
        Ok(Actor {
            net: self.actor_net.clone(),
            algo: self.algo,
            transforms,
            fixed_duration: sac.fixed_duration,
        })
    }
}

fn read_container(r: &mut impl Read) -> Result<Container, CheckpointError> {
    expect_magic(r, RUN_MAGIC, "SEACRUN")?;
    let version = read_u32(r)?;
    if version != RUN_VERSION {
        return Err(CheckpointError::BadVersion(version));
    }
    let algo_tag = read_u8(r)?;
    let algo = Algo::from_tag(algo_tag)
        .ok_or_else(|| CheckpointError::Corrupt(format!("unknown algo tag {algo_tag}")))?;
    let ta_tag = read_u8(r)?;
    let time_activation = TimeActivation::from_tag(ta_tag)
        .ok_or_else(|| CheckpointError::Corrupt(format!("unknown activation tag {ta_tag}")))?;
    let root_seed = read_u64(r)?;
    let env_steps = read_u64(r)?;
    let episodes = read_u64(r)?;
    let updates = read_u64(r)?;
    let rng_pos = [read_u128(r)?, read_u128(r)?, read_u128(r)?, read_u128(r)?];
    let log_alpha = read_f64(r)?;
    let alpha = read_f64(r)?;
    let alpha_adam =
        ScalarAdam { m: read_f64(r)?, v: read_f64(r)?, step: read_u64(r)? };
    let env_state = read_env_state(r)?;
    let ep_return = read_f64(r)?;
    let ep_steps = read_u32(r)?;
    let ep_sim_time = read_f64(r)?;
    let ep_energy = read_f64(r)?;
    let duration_violations = read_u64(r)?;
    let force_violations = read_u64(r)?;
    let actor_net = read_mlp(r)?;
    let critics = [read_mlp(r)?, read_mlp(r)?];
    let targets = [read_mlp(r)?, read_mlp(r)?];
    let adam_actor = read_adam(r, &actor_net)?;
    let adam_critics = [read_adam(r, &critics[0])?, read_adam(r, &critics[1])?];
    Ok(Container {
        algo,
        time_activation,
        root_seed,
        env_steps,
        episodes,
        updates,
        rng_pos,
        log_alpha,
        alpha,
        alpha_adam,
        env_state,
        ep_return,
        ep_steps,
        ep_sim_time,
        ep_energy,
        duration_violations,
        force_violations,
        actor_net,
        critics,
        targets,
        adam_actor,
        adam_critics,
    })
}

fn write_env_state(w: &mut impl Write, s: &EnvState) -> Result<(), CheckpointError> {
    for v in [
        s.agent_pos.x,
        s.agent_pos.y,
        s.agent_vel.x,
        s.agent_vel.y,
        s.obstacle_pos.x,
        s.obstacle_pos.y,
        s.goal_pos.x,
        s.goal_pos.y,
        s.last_duration,
        s.last_force.x,
        s.last_force.y,
    ] {
        write_f64(w, v)?;
    }
    write_u32(w, s.step_count)?;
    Ok(())
}

fn read_env_state(r: &mut impl Read) -> Result<EnvState, CheckpointError> {
    let mut v = [0f64; 11];
    for slot in v.iter_mut() {
        *slot = read_f64(r)?;
    }
    let step_count = read_u32(r)?;
    Ok(EnvState {
        agent_pos: Vec2::new(v[0], v[1]),
        agent_vel: Vec2::new(v[2], v[3]),
        obstacle_pos: Vec2::new(v[4], v[5]),
        goal_pos: Vec2::new(v[6], v[7]),
        last_duration: v[8],
        last_force: Vec2::new(v[9], v[10]),
        step_count,
    })
}

fn write_adam(w: &mut impl Write, adam: &AdamState<f32>) -> Result<(), CheckpointError> {
    write_u64(w, adam.step_count())?;
    for slice in adam.moments() {
        crate::nn::checkpoint::write_f32s(w, slice)?;
    }
    Ok(())
}

fn read_adam(r: &mut impl Read, net: &Mlp<f32>) -> Result<AdamState<f32>, CheckpointError> {
    let step = read_u64(r)?;
    let mut adam = AdamState::new(net);
    adam.set_step_count(step);
    for slice in adam.moments_mut() {
        let vals = crate::nn::checkpoint::read_f32s(r, slice.len())?;
        slice.copy_from_slice(&vals);
    }
    Ok(adam)
}

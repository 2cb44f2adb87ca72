//! Policy wrapper: a trunk network whose output splits into per-dimension
//! (mean, log_std) heads, squashed onto the action ranges. The elastic mode
//! samples `[duration, force_x, force_y]`; the fixed-rate mode samples only
//! the force and pins the duration.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::env::{ElasticAction, EnvConfig, Observation, OBS_DIM};
use crate::nn::{sample_dim, Activation, Mlp, Squash, TimeActivation};
use crate::vec2::Vec2;

use super::replay::ACTION_DIM;

/// Whether the policy chooses its own step duration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algo {
    /// Elastic time step: the policy outputs (duration, force).
    Seac,
    /// Fixed-rate baseline: force only, duration pinned by config.
    SacFixed,
}

impl Algo {
    pub fn tag(self) -> u8 {
        match self {
            Algo::Seac => 0,
            Algo::SacFixed => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Algo> {
        match tag {
            0 => Some(Algo::Seac),
            1 => Some(Algo::SacFixed),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Algo::Seac => "seac",
            Algo::SacFixed => "sac_fixed",
        }
    }
}

impl std::str::FromStr for Algo {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "seac" => Ok(Algo::Seac),
            // Accept both the config spelling and the CLI flag spelling.
            "sac_fixed" | "sac-fixed" => Ok(Algo::SacFixed),
            other => Err(format!("unknown algo '{other}' (expected 'seac' or 'sac-fixed')")),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Actor {
    pub net: Mlp<f32>,
    pub algo: Algo,
    /// Squash map per sampled dimension, in sampled order.
    pub transforms: Vec<Squash>,
    /// Duration used by every action in fixed-rate mode.
    pub fixed_duration: f64,
}

impl Actor {
    pub fn new(
        algo: Algo,
        time_activation: TimeActivation,
        env: &EnvConfig,
        hidden: &[usize],
        fixed_duration: f64,
        rng: &mut ChaCha8Rng,
    ) -> Actor {
        let transforms = Self::build_transforms(algo, time_activation, env);
        let mut dims = vec![OBS_DIM];
        dims.extend_from_slice(hidden);
        dims.push(2 * transforms.len());
        Actor {
            net: Mlp::new(&dims, Activation::Relu, rng),
            algo,
            transforms,
            fixed_duration,
        }
    }

    pub fn build_transforms(
        algo: Algo,
        time_activation: TimeActivation,
        env: &EnvConfig,
    ) -> Vec<Squash> {
        let force = Squash::force(env.force_bound);
        match algo {
            Algo::Seac => {
                vec![Squash::duration(env.duration_min, env.duration_max, time_activation), force, force]
            }
            Algo::SacFixed => vec![force, force],
        }
    }

    /// Number of sampled action dimensions (3 elastic, 2 fixed-rate).
    pub fn sampled_dims(&self) -> usize {
        self.transforms.len()
    }

    /// Pick an action. `stochastic` draws reparameterized noise from `rng`;
    /// otherwise the mean action is used. Also returns the 3-slot stored
    /// action `[duration, fx, fy]` for the replay buffer.
    pub fn select_action(
        &self,
        obs: &Observation,
        stochastic: bool,
        rng: &mut ChaCha8Rng,
    ) -> (ElasticAction, [f32; ACTION_DIM]) {
        let input: Vec<f32> = obs.iter().map(|&v| v as f32).collect();
        let raw = self.net.forward(&input);
        let k = self.sampled_dims();
        debug_assert_eq!(raw.len(), 2 * k);
        let mut sampled = [0.0f64; ACTION_DIM];
        for (j, transform) in self.transforms.iter().enumerate() {
            let noise: f64 = if stochastic { rng.sample(StandardNormal) } else { 0.0 };
            // Sample in f64 and pin to the transform range so the emitted
            // action respects the bounds exactly, independent of f32
            // rounding in the head outputs.
            let s = sample_dim::<f64>(*transform, raw[j] as f64, raw[k + j] as f64, noise);
            let (lo, hi) = transform.range();
            sampled[j] = s.action.clamp(lo, hi);
        }
        let (duration, force) = match self.algo {
            Algo::Seac => (sampled[0], Vec2::new(sampled[1], sampled[2])),
            Algo::SacFixed => (self.fixed_duration, Vec2::new(sampled[0], sampled[1])),
        };
        let action = ElasticAction::new(duration, force);
        let stored = [duration as f32, force.x as f32, force.y as f32];
        (action, stored)
    }

    /// Slice of the stored 3-dim action that feeds the critics: all of it in
    /// elastic mode, force only in fixed-rate mode.
    pub fn critic_action_cols(&self) -> std::ops::Range<usize> {
        match self.algo {
            Algo::Seac => 0..ACTION_DIM,
            Algo::SacFixed => 1..ACTION_DIM,
        }
    }

    /// Width of the critic input: observation plus the sampled action dims.
    pub fn critic_in_dim(&self) -> usize {
        OBS_DIM + self.sampled_dims()
    }
}

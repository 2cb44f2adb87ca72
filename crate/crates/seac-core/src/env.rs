//! 2D point-mass world with Coulomb friction and per-action step durations.
//!
//! The agent is a point of mass `m` on a flat plane. Each control step
//! applies a force vector for a caller-chosen duration; static friction
//! swallows sub-threshold forces at rest, kinetic friction opposes motion
//! with constant magnitude `mu * m * g`. An episode ends when the swept
//! path of a step touches the goal disc, touches the obstacle disc, or the
//! step budget runs out.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::reward::{compute_reward, RewardBreakdown, RewardWeights};
use crate::vec2::{segment_point_distance, Vec2};

pub const OBS_DIM: usize = 11;

/// Fixed observation layout:
/// `[agent_x, agent_y, obs_x, obs_y, goal_x, goal_y, vel_x, vel_y, last_T, last_Fx, last_Fy]`.
pub type Observation = [f64; OBS_DIM];

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid environment config: {0}")]
    InvalidConfig(String),
    #[error("step() called on a finished episode; call reset() first")]
    EpisodeFinished,
}

/// World constants.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub world_size: Vec2,
    /// Agent mass in kg.
    pub agent_mass: f64,
    /// Gravitational acceleration in m/s^2.
    pub gravity: f64,
    /// Coulomb friction coefficient.
    pub friction_mu: f64,
    pub obstacle_radius: f64,
    pub goal_radius: f64,
    /// Minimum pairwise spacing of agent/goal/obstacle at reset, in meters.
    pub min_spacing: f64,
    /// Per-axis force limit in newtons.
    pub force_bound: f64,
    /// Shortest allowed step duration in seconds.
    pub duration_min: f64,
    /// Longest allowed step duration in seconds.
    pub duration_max: f64,
    /// Per-axis speed limit in m/s.
    pub speed_bound: f64,
    pub max_episode_steps: u32,
    /// Emit observations affinely mapped to [-1, 1] instead of raw units.
    pub normalize_observations: bool,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            world_size: Vec2::new(2.0, 2.0),
            agent_mass: 20.0,
            gravity: 9.80665,
            friction_mu: 0.6,
            obstacle_radius: 0.05,
            goal_radius: 0.05,
            min_spacing: 0.05,
            force_bound: 100.0,
            duration_min: 0.01,
            duration_max: 1.0,
            speed_bound: 2.0,
            max_episode_steps: 500,
            normalize_observations: false,
        }
    }
}

impl EnvConfig {
    /// Friction force magnitude `mu * m * g` in newtons.
    pub fn friction_threshold(&self) -> f64 {
        self.friction_mu * self.agent_mass * self.gravity
    }

    pub fn validate(&self) -> Result<(), EnvError> {
        let positive = [
            ("world_size.x", self.world_size.x),
            ("world_size.y", self.world_size.y),
            ("agent_mass", self.agent_mass),
            ("gravity", self.gravity),
            ("friction_mu", self.friction_mu),
            ("obstacle_radius", self.obstacle_radius),
            ("goal_radius", self.goal_radius),
            ("min_spacing", self.min_spacing),
            ("force_bound", self.force_bound),
            ("duration_min", self.duration_min),
            ("duration_max", self.duration_max),
            ("speed_bound", self.speed_bound),
        ];
        for (name, v) in positive {
            if !v.is_finite() || v <= 0.0 {
                return Err(EnvError::InvalidConfig(format!(
                    "{name} must be finite and > 0, got {v}"
                )));
            }
        }
        if self.max_episode_steps == 0 {
            return Err(EnvError::InvalidConfig("max_episode_steps must be > 0".into()));
        }
        if self.duration_min >= self.duration_max {
            return Err(EnvError::InvalidConfig(format!(
                "duration_min ({}) must be < duration_max ({})",
                self.duration_min, self.duration_max
            )));
        }
        let half_world = self.world_size.x.min(self.world_size.y) / 2.0;
        if self.goal_radius >= half_world || self.obstacle_radius >= half_world {
            return Err(EnvError::InvalidConfig(
                "goal_radius and obstacle_radius must be smaller than half the world".into(),
            ));
        }
        Ok(())
    }
}

/// One control command: a force held for a chosen duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticAction {
    /// Step duration in seconds.
    pub duration: f64,
    /// Applied force in newtons.
    pub force: Vec2,
}

impl ElasticAction {
    pub fn new(duration: f64, force: Vec2) -> Self {
        ElasticAction { duration, force }
    }

    /// Clamp a raw command into the admissible action box.
    pub fn clamped(duration: f64, force: Vec2, config: &EnvConfig) -> Self {
        ElasticAction {
            duration: duration.clamp(config.duration_min, config.duration_max),
            force: force.clamp_abs(config.force_bound),
        }
    }

    pub fn is_valid(&self, config: &EnvConfig) -> bool {
        self.duration >= config.duration_min
            && self.duration <= config.duration_max
            && self.force.x.abs() <= config.force_bound
            && self.force.y.abs() <= config.force_bound
            && self.duration.is_finite()
            && self.force.is_finite()
    }
}

/// Why (or whether) the episode ended at a given step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Running,
    GoalReached,
    Crashed,
    Timeout,
}

impl Termination {
    pub fn is_terminal(self) -> bool {
        self != Termination::Running
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Termination::Running => "running",
            Termination::GoalReached => "goal",
            Termination::Crashed => "crash",
            Termination::Timeout => "timeout",
        }
    }
}

/// Mutable situation of one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvState {
    pub agent_pos: Vec2,
    pub agent_vel: Vec2,
    pub obstacle_pos: Vec2,
    pub goal_pos: Vec2,
    /// Duration of the previous step; 0 right after reset.
    pub last_duration: f64,
    /// Force applied in the previous step; zero right after reset.
    pub last_force: Vec2,
    pub step_count: u32,
}

impl EnvState {
    /// Draw a fresh task: agent first, then goal re-drawn until it clears the
    /// agent, then obstacle re-drawn until it clears both.
    pub fn sample(rng: &mut ChaCha8Rng, config: &EnvConfig) -> EnvState {
        let draw = |rng: &mut ChaCha8Rng| {
            Vec2::new(
                rng.random_range(0.0..config.world_size.x),
                rng.random_range(0.0..config.world_size.y),
            )
        };
        let agent = draw(rng);
        let mut goal = draw(rng);
        while goal.distance(agent) < config.min_spacing {
            goal = draw(rng);
        }
        let mut obstacle = draw(rng);
        while obstacle.distance(agent) < config.min_spacing
            || obstacle.distance(goal) < config.min_spacing
        {
            obstacle = draw(rng);
        }
        EnvState {
            agent_pos: agent,
            agent_vel: Vec2::ZERO,
            obstacle_pos: obstacle,
            goal_pos: goal,
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 0,
        }
    }

    /// Observation in the fixed layout, normalized when the config asks for it.
    pub fn observation(&self, config: &EnvConfig) -> Observation {
        let raw = [
            self.agent_pos.x,
            self.agent_pos.y,
            self.obstacle_pos.x,
            self.obstacle_pos.y,
            self.goal_pos.x,
            self.goal_pos.y,
            self.agent_vel.x,
            self.agent_vel.y,
            self.last_duration,
            self.last_force.x,
            self.last_force.y,
        ];
        if !config.normalize_observations {
            return raw;
        }
        let mut obs = raw;
        for (i, v) in obs.iter_mut().enumerate() {
            *v = match i {
                0 | 2 | 4 => *v / (config.world_size.x / 2.0) - 1.0,
                1 | 3 | 5 => *v / (config.world_size.y / 2.0) - 1.0,
                6 | 7 => *v / config.speed_bound,
                8 => 2.0 * *v / config.duration_max - 1.0,
                _ => *v / config.force_bound,
            };
        }
        obs
    }
}

/// Result of one environment step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepOutcome {
    pub observation: Observation,
    pub reward: RewardBreakdown,
    pub terminal: bool,
    pub reason: Termination,
    /// Agent-to-goal distance after the step, in meters.
    pub distance_to_goal: f64,
}

/// Net force after Coulomb friction. At rest, static friction cancels any
/// applied force up to `mu * m * g`; above that it subtracts the threshold
/// along the applied direction. In motion, kinetic friction of the same
/// magnitude opposes the velocity.
pub fn apply_friction(f_aim: Vec2, vel: Vec2, config: &EnvConfig) -> Vec2 {
    let f_s = config.friction_threshold();
    let speed = vel.norm();
    if speed == 0.0 {
        let mag = f_aim.norm();
        if mag <= f_s {
            Vec2::ZERO
        } else {
            f_aim - f_aim * (f_s / mag)
        }
    } else {
        f_aim - vel * (f_s / speed)
    }
}

/// Advance position and velocity through one step of duration `action.duration`.
///
/// Velocity is integrated under the net force, snapped to zero if friction
/// alone would have reversed it within the step, clamped per axis to the
/// speed bound, and the displacement uses the average of old and new
/// velocity. Positions are clamped to the world box; a clamped axis also has
/// its velocity zeroed.
pub fn integrate(state: &EnvState, action: &ElasticAction, config: &EnvConfig) -> (Vec2, Vec2) {
    let f_true = apply_friction(action.force, state.agent_vel, config);
    let accel = f_true / config.agent_mass;
    let mut v_aim = state.agent_vel + accel * action.duration;
    if action.force.norm() <= config.friction_threshold() && v_aim.dot(state.agent_vel) < 0.0 {
        v_aim = Vec2::ZERO;
    }
    v_aim = v_aim.clamp_abs(config.speed_bound);
    let displacement = (state.agent_vel + v_aim) * (0.5 * action.duration);
    let mut new_pos = state.agent_pos + displacement;
    let mut new_vel = v_aim;
    if new_pos.x < 0.0 || new_pos.x > config.world_size.x {
        new_pos.x = new_pos.x.clamp(0.0, config.world_size.x);
        new_vel.x = 0.0;
    }
    if new_pos.y < 0.0 || new_pos.y > config.world_size.y {
        new_pos.y = new_pos.y.clamp(0.0, config.world_size.y);
        new_vel.y = 0.0;
    }
    (new_pos, new_vel)
}

/// Classify the step from the swept segment `old_pos -> new_pos`. The goal
/// test wins when goal and obstacle are both touched in the same step.
/// Expects `state.step_count` to already include this step.
pub fn check_termination(
    old_pos: Vec2,
    new_pos: Vec2,
    state: &EnvState,
    config: &EnvConfig,
) -> Termination {
    if segment_point_distance(old_pos, new_pos, state.goal_pos) <= config.goal_radius {
        Termination::GoalReached
    } else if segment_point_distance(old_pos, new_pos, state.obstacle_pos) <= config.obstacle_radius
    {
        Termination::Crashed
    } else if state.step_count >= config.max_episode_steps {
        Termination::Timeout
    } else {
        Termination::Running
    }
}

/// A single episode-at-a-time environment. Owns the placement rng; one
/// instance belongs to one rollout loop.
#[derive(Debug, Clone)]
pub struct PointMassEnv {
    config: EnvConfig,
    weights: RewardWeights,
    state: EnvState,
    rng: ChaCha8Rng,
    reason: Termination,
}

impl PointMassEnv {
    pub fn new(
        config: EnvConfig,
        weights: RewardWeights,
        mut rng: ChaCha8Rng,
    ) -> Result<Self, EnvError> {
        config.validate()?;
        weights.validate().map_err(EnvError::InvalidConfig)?;
        let state = EnvState::sample(&mut rng, &config);
        Ok(PointMassEnv { config, weights, state, rng, reason: Termination::Running })
    }

    /// Rebuild an environment around an in-flight (non-terminal) episode;
    /// used when resuming from a checkpoint.
    pub fn from_parts(
        config: EnvConfig,
        weights: RewardWeights,
        state: EnvState,
        rng: ChaCha8Rng,
    ) -> Result<Self, EnvError> {
        config.validate()?;
        weights.validate().map_err(EnvError::InvalidConfig)?;
        Ok(PointMassEnv { config, weights, state, rng, reason: Termination::Running })
    }

    pub fn config(&self) -> &EnvConfig {
        &self.config
    }

    pub fn state(&self) -> &EnvState {
        &self.state
    }

    /// Position in the placement stream, for checkpointing.
    pub fn rng_word_pos(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn is_terminal(&self) -> bool {
        self.reason.is_terminal()
    }

    /// Start a new episode with a fresh task drawn from the placement stream.
    pub fn reset(&mut self) -> Observation {
        self.state = EnvState::sample(&mut self.rng, &self.config);
        self.reason = Termination::Running;
        self.state.observation(&self.config)
    }

    pub fn step(&mut self, action: &ElasticAction) -> Result<StepOutcome, EnvError> {
        if self.reason.is_terminal() {
            return Err(EnvError::EpisodeFinished);
        }
        debug_assert!(action.is_valid(&self.config), "action out of bounds: {action:?}");
        let old_pos = self.state.agent_pos;
        let (new_pos, new_vel) = integrate(&self.state, action, &self.config);
        self.state.agent_pos = new_pos;
        self.state.agent_vel = new_vel;
        self.state.last_duration = action.duration;
        self.state.last_force = action.force;
        self.state.step_count += 1;
        let reason = check_termination(old_pos, new_pos, &self.state, &self.config);
        self.reason = reason;
        let distance_to_goal = new_pos.distance(self.state.goal_pos);
        let reward = compute_reward(reason, distance_to_goal, action.duration, &self.weights);
        Ok(StepOutcome {
            observation: self.state.observation(&self.config),
            reward,
            terminal: reason.is_terminal(),
            reason,
            distance_to_goal,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{derive, Stream};

    fn env_with_seed(seed: u64) -> PointMassEnv {
        PointMassEnv::new(
            EnvConfig::default(),
            RewardWeights::default(),
            derive(seed, Stream::EnvPlacement),
        )
        .unwrap()
    }

    #[test]
    fn reset_is_reproducible_per_seed() {
        let mut a = env_with_seed(42);
        let mut b = env_with_seed(42);
        assert_eq!(a.reset(), b.reset());
        assert_eq!(a.state(), b.state());
    }

    #[test]
    fn reset_zeroes_velocity_and_history() {
        let mut env = env_with_seed(3);
        let obs = env.reset();
        assert_eq!(&obs[6..9], &[0.0, 0.0, 0.0]);
        assert_eq!(obs[9], 0.0);
        assert_eq!(obs[10], 0.0);
    }

    #[test]
    fn reset_respects_min_spacing() {
        let config = EnvConfig::default();
        for seed in 0..200 {
            let mut rng = derive(seed, Stream::EnvPlacement);
            let s = EnvState::sample(&mut rng, &config);
            assert!(s.agent_pos.distance(s.goal_pos) >= config.min_spacing);
            assert!(s.agent_pos.distance(s.obstacle_pos) >= config.min_spacing);
            assert!(s.goal_pos.distance(s.obstacle_pos) >= config.min_spacing);
        }
    }

    #[test]
    fn static_friction_cancels_subthreshold_force() {
        let config = EnvConfig::default();
        // |(50, -70)| ~ 86.02 N, below the ~117.68 N threshold.
        let f = apply_friction(Vec2::new(50.0, -70.0), Vec2::ZERO, &config);
        assert_eq!(f, Vec2::ZERO);
    }

    #[test]
    fn static_friction_reduces_suprathreshold_force() {
        let config = EnvConfig::default();
        let f_aim = Vec2::new(100.0, 100.0);
        let f = apply_friction(f_aim, Vec2::ZERO, &config);
        let mag = f_aim.norm();
        let expected = f_aim * (1.0 - config.friction_threshold() / mag);
        assert!((f.x - expected.x).abs() < 1e-12);
        assert!((f.y - expected.y).abs() < 1e-12);
        // Matches the coarse hand value ~16.78 N per axis.
        assert!((f.x - 16.78).abs() < 0.01, "got {}", f.x);
    }

    #[test]
    fn zero_force_at_rest_is_zero() {
        let config = EnvConfig::default();
        assert_eq!(apply_friction(Vec2::ZERO, Vec2::ZERO, &config), Vec2::ZERO);
    }

    #[test]
    fn kinetic_friction_opposes_motion() {
        let config = EnvConfig::default();
        let vel = Vec2::new(1.0, 0.0);
        let f = apply_friction(Vec2::ZERO, vel, &config);
        assert!((f.x + config.friction_threshold()).abs() < 1e-12);
        assert_eq!(f.y, 0.0);
    }

    #[test]
    fn integrate_subthreshold_from_rest_does_not_move() {
        let config = EnvConfig::default();
        let mut rng = derive(1, Stream::EnvPlacement);
        let state = EnvState::sample(&mut rng, &config);
        let action = ElasticAction::new(0.2, Vec2::new(50.0, -70.0));
        let (pos, vel) = integrate(&state, &action, &config);
        assert_eq!(pos, state.agent_pos);
        assert_eq!(vel, Vec2::ZERO);
    }

    #[test]
    fn integrate_diagonal_push_from_rest() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(0.5, 0.5),
            agent_vel: Vec2::ZERO,
            obstacle_pos: Vec2::new(1.9, 1.9),
            goal_pos: Vec2::new(1.5, 1.5),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 0,
        };
        let action = ElasticAction::new(1.0, Vec2::new(100.0, 100.0));
        let (pos, vel) = integrate(&state, &action, &config);
        // Net force ~16.785 N/axis -> accel ~0.839 m/s^2 -> v ~0.839, d ~0.4196.
        assert!((vel.x - 0.839).abs() < 1e-3, "vel.x = {}", vel.x);
        assert!((vel.y - 0.839).abs() < 1e-3);
        assert!((pos.x - 0.5 - 0.4196).abs() < 1e-3, "pos.x = {}", pos.x);
        assert!((pos.y - 0.5 - 0.4196).abs() < 1e-3);
    }

    #[test]
    fn friction_does_not_reverse_motion_within_one_step() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(1.0, 1.0),
            agent_vel: Vec2::new(0.1, 0.0),
            obstacle_pos: Vec2::new(1.9, 1.9),
            goal_pos: Vec2::new(0.1, 0.1),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 0,
        };
        // No applied force, long step: friction would integrate far past zero.
        let action = ElasticAction::new(1.0, Vec2::ZERO);
        let (_, vel) = integrate(&state, &action, &config);
        assert_eq!(vel, Vec2::ZERO);
    }

    #[test]
    fn world_boundary_clamps_position_and_zeroes_velocity() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(1.99, 1.0),
            agent_vel: Vec2::new(2.0, 0.0),
            obstacle_pos: Vec2::new(0.5, 1.9),
            goal_pos: Vec2::new(0.1, 0.1),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 0,
        };
        let action = ElasticAction::new(1.0, Vec2::new(100.0, 100.0));
        let (pos, vel) = integrate(&state, &action, &config);
        assert_eq!(pos.x, config.world_size.x);
        assert_eq!(vel.x, 0.0);
    }

    #[test]
    fn termination_goal_at_zero_distance() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(1.0, 1.0),
            agent_vel: Vec2::ZERO,
            obstacle_pos: Vec2::new(1.9, 1.9),
            goal_pos: Vec2::new(1.0, 1.0),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 1,
        };
        let r = check_termination(state.goal_pos, state.goal_pos, &state, &config);
        assert_eq!(r, Termination::GoalReached);
    }

    #[test]
    fn termination_swept_segment_hits_obstacle() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(1.5, 0.5),
            agent_vel: Vec2::ZERO,
            obstacle_pos: Vec2::new(1.0, 0.5),
            goal_pos: Vec2::new(0.1, 1.9),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 1,
        };
        let r = check_termination(Vec2::new(0.5, 0.5), Vec2::new(1.5, 0.5), &state, &config);
        assert_eq!(r, Termination::Crashed);
    }

    #[test]
    fn termination_goal_beats_crash_in_same_step() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(1.5, 0.5),
            agent_vel: Vec2::ZERO,
            obstacle_pos: Vec2::new(1.0, 0.5),
            goal_pos: Vec2::new(1.2, 0.5),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 1,
        };
        let r = check_termination(Vec2::new(0.5, 0.5), Vec2::new(1.5, 0.5), &state, &config);
        assert_eq!(r, Termination::GoalReached);
    }

    #[test]
    fn termination_timeout_at_step_budget() {
        let config = EnvConfig::default();
        let state = EnvState {
            agent_pos: Vec2::new(0.2, 0.2),
            agent_vel: Vec2::ZERO,
            obstacle_pos: Vec2::new(1.9, 1.9),
            goal_pos: Vec2::new(1.5, 1.5),
            last_duration: 0.0,
            last_force: Vec2::ZERO,
            step_count: 500,
        };
        let r = check_termination(state.agent_pos, state.agent_pos, &state, &config);
        assert_eq!(r, Termination::Timeout);
    }

    #[test]
    fn step_records_action_history_and_distance() {
        let mut env = env_with_seed(11);
        env.reset();
        let action = ElasticAction::new(0.37, Vec2::new(25.0, -60.0));
        let out = env.step(&action).unwrap();
        assert_eq!(out.observation[8], 0.37);
        assert_eq!(out.observation[9], 25.0);
        assert_eq!(out.observation[10], -60.0);
        let expected = env.state().agent_pos.distance(env.state().goal_pos);
        assert_eq!(out.distance_to_goal, expected);
    }

    #[test]
    fn step_on_finished_episode_errors() {
        let mut env = env_with_seed(5);
        env.reset();
        let idle = ElasticAction::new(0.5, Vec2::ZERO);
        for _ in 0..500 {
            env.step(&idle).unwrap();
        }
        assert!(env.is_terminal());
        assert!(matches!(env.step(&idle), Err(EnvError::EpisodeFinished)));
    }

    #[test]
    fn episode_replay_is_deterministic() {
        let actions: Vec<ElasticAction> = (0..40)
            .map(|i| {
                ElasticAction::new(
                    0.01 + 0.02 * (i as f64 % 20.0),
                    Vec2::new(100.0 - 3.0 * i as f64, 80.0 - 2.0 * i as f64),
                )
            })
            .collect();
        let run = |seed: u64| {
            let mut env = env_with_seed(seed);
            env.reset();
            let mut outs = Vec::new();
            for a in &actions {
                if env.is_terminal() {
                    break;
                }
                outs.push(env.step(a).unwrap());
            }
            outs
        };
        assert_eq!(run(9), run(9));
    }

    #[test]
    fn invalid_config_rejected() {
        let bad = EnvConfig { duration_min: 1.0, duration_max: 0.5, ..Default::default() };
        assert!(bad.validate().is_err());
        let bad = EnvConfig { goal_radius: 1.5, ..Default::default() };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn normalized_observation_is_bounded() {
        let config = EnvConfig { normalize_observations: true, ..Default::default() };
        let state = EnvState {
            agent_pos: Vec2::new(2.0, 0.0),
            agent_vel: Vec2::new(-2.0, 2.0),
            obstacle_pos: Vec2::new(1.0, 1.0),
            goal_pos: Vec2::new(0.5, 1.5),
            last_duration: 1.0,
            last_force: Vec2::new(100.0, -100.0),
            step_count: 4,
        };
        let obs = state.observation(&config);
        for v in obs {
            assert!((-1.0..=1.0).contains(&v), "{v}");
        }
        assert_eq!(obs[0], 1.0);
        assert_eq!(obs[8], 1.0);
    }
}

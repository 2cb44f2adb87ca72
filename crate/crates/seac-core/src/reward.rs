//! Per-step reward: a weighted combination of task progress, a flat
//! per-step energy charge, and the wall time the step consumed.

use serde::{Deserialize, Serialize};

use crate::env::Termination;

/// Reward constants. The task term pays `goal_bonus` on success,
/// `crash_penalty` on collision, and `distance_coeff * d_goal` otherwise;
/// every step additionally pays the energy and time terms.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RewardWeights {
    pub alpha_t: f64,
    pub alpha_eps: f64,
    pub alpha_tau: f64,
    /// Flat energy charge per executed step, in joules.
    pub step_energy_eps: f64,
    pub goal_bonus: f64,
    pub crash_penalty: f64,
    /// Per-meter task reward while running (negative: a penalty).
    pub distance_coeff: f64,
}

impl Default for RewardWeights {
    fn default() -> Self {
        RewardWeights {
            alpha_t: 1.0,
            alpha_eps: 1.0,
            alpha_tau: 1.0,
            step_energy_eps: 1.0,
            goal_bonus: 100.0,
            crash_penalty: -100.0,
            distance_coeff: -1.0,
        }
    }
}

impl RewardWeights {
    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("alpha_t", self.alpha_t),
            ("alpha_eps", self.alpha_eps),
            ("alpha_tau", self.alpha_tau),
            ("step_energy_eps", self.step_energy_eps),
        ] {
            if !v.is_finite() || v < 0.0 {
                return Err(format!("reward weight {name} must be finite and >= 0, got {v}"));
            }
        }
        for (name, v) in [
            ("goal_bonus", self.goal_bonus),
            ("crash_penalty", self.crash_penalty),
            ("distance_coeff", self.distance_coeff),
        ] {
            if !v.is_finite() {
                return Err(format!("reward constant {name} must be finite, got {v}"));
            }
        }
        Ok(())
    }
}

/// The three reward components of one step plus their weighted total.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardBreakdown {
    /// Task term: bonus, penalty, or distance-scaled progress value.
    pub task: f64,
    /// Energy charged for executing this step (joules).
    pub energy: f64,
    /// Time the step consumed (seconds).
    pub time: f64,
    /// `alpha_t * task - alpha_eps * energy - alpha_tau * time`.
    pub total: f64,
}

/// Score one executed step. `distance_to_goal` is measured after the step.
pub fn compute_reward(
    reason: Termination,
    distance_to_goal: f64,
    duration: f64,
    w: &RewardWeights,
) -> RewardBreakdown {
    let task = match reason {
        Termination::GoalReached => w.goal_bonus,
        Termination::Crashed => w.crash_penalty,
        Termination::Timeout | Termination::Running => w.distance_coeff * distance_to_goal,
    };
    let energy = w.step_energy_eps;
    let time = duration;
    let total = w.alpha_t * task - w.alpha_eps * energy - w.alpha_tau * time;
    RewardBreakdown { task, energy, time, total }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn goal_step_total() {
        let r = compute_reward(Termination::GoalReached, 0.0, 0.2, &RewardWeights::default());
        assert_eq!(r.task, 100.0);
        assert_eq!(r.energy, 1.0);
        assert_eq!(r.time, 0.2);
        assert_eq!(r.total, 98.8);
    }

    #[test]
    fn crash_step_total() {
        let r = compute_reward(Termination::Crashed, 0.3, 0.5, &RewardWeights::default());
        assert_eq!(r.total, -101.5);
    }

    #[test]
    fn running_step_total() {
        let r = compute_reward(Termination::Running, 1.0, 0.01, &RewardWeights::default());
        assert_eq!(r.total, -2.01);
    }

    #[test]
    fn timeout_pays_distance_like_running() {
        let run = compute_reward(Termination::Running, 0.7, 0.4, &RewardWeights::default());
        let to = compute_reward(Termination::Timeout, 0.7, 0.4, &RewardWeights::default());
        assert_eq!(run.total, to.total);
    }

    #[test]
    fn negative_alpha_rejected() {
        let w = RewardWeights { alpha_tau: -1.0, ..Default::default() };
        assert!(w.validate().is_err());
    }
}

//! Bounded policy outputs: reparameterized Gaussian samples pushed through
//! per-dimension squashing maps, with exact log-densities and the partial
//! derivatives the actor update needs.
//!
//! A policy head produces `(mean, log_std)` per dimension. A sample is
//! `u = mean + exp(log_std) * noise`, squashed to the action range. The
//! log-density subtracts `log |da/du|`, with a small stabilizer inside the
//! tanh Jacobian so saturated samples keep a finite value.

use serde::{Deserialize, Serialize};

use super::mat::Scalar;

/// Clamp bounds on the raw log-std head output.
pub const LOG_STD_MIN: f64 = -20.0;
pub const LOG_STD_MAX: f64 = 2.0;
/// Added inside `log(1 - tanh^2(u) + ...)` to keep saturated samples finite.
pub const SQUASH_STABILIZER: f64 = 1e-6;

/// Which squashing map the duration dimension uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum TimeActivation {
    /// Smooth map onto the open duration interval; exact log-density.
    #[default]
    TanhAffine,
    /// Hard-saturating map `lo + (hi-lo) * relu6(u) / 6`; the density lumps
    /// the boundary mass into the endpoints (clipped-Gaussian treatment).
    Relu6Affine,
}

impl TimeActivation {
    pub fn tag(self) -> u8 {
        match self {
            TimeActivation::TanhAffine => 0,
            TimeActivation::Relu6Affine => 1,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(TimeActivation::TanhAffine),
            1 => Some(TimeActivation::Relu6Affine),
            _ => None,
        }
    }
}

/// Per-dimension output map from the unconstrained sample `u` to an action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Squash {
    /// `a = shift + scale * tanh(u)`
    TanhAffine { scale: f64, shift: f64 },
    /// `a = lo + (hi - lo) * relu6(u) / 6`
    Relu6Affine { lo: f64, hi: f64 },
}

impl Squash {
    /// Symmetric force map onto `(-bound, bound)`.
    pub fn force(bound: f64) -> Squash {
        Squash::TanhAffine { scale: bound, shift: 0.0 }
    }

    /// Duration map onto `[lo, hi]` with the configured activation.
    pub fn duration(lo: f64, hi: f64, kind: TimeActivation) -> Squash {
        match kind {
            TimeActivation::TanhAffine => {
                Squash::TanhAffine { scale: (hi - lo) / 2.0, shift: (hi + lo) / 2.0 }
            }
            TimeActivation::Relu6Affine => Squash::Relu6Affine { lo, hi },
        }
    }

    /// The closed action range `[lo, hi]` this map never leaves.
    pub fn range(self) -> (f64, f64) {
        match self {
            Squash::TanhAffine { scale, shift } => (shift - scale, shift + scale),
            Squash::Relu6Affine { lo, hi } => (lo, hi),
        }
    }

    /// Inverse of the interior branch of the map.
    pub fn untransform(self, a: f64) -> f64 {
        match self {
            Squash::TanhAffine { scale, shift } => ((a - shift) / scale).atanh(),
            Squash::Relu6Affine { lo, hi } => (a - lo) / ((hi - lo) / 6.0),
        }
    }
}

/// One squashed sample plus everything the reparameterized actor gradient
/// needs: `d log_prob / d mean`, `d log_prob / d log_std` and the action
/// sensitivities `da/dmean`, `da/dlog_std` (noise held fixed).
#[derive(Debug, Clone, Copy)]
pub struct DimSample<T> {
    pub action: T,
    pub log_prob: T,
    pub dlogp_dmean: T,
    pub dlogp_dlogstd: T,
    pub da_dmean: T,
    pub da_dlogstd: T,
}

const LN_SQRT_TAU: f64 = 0.918_938_533_204_672_8; // 0.5 * ln(2*pi)

/// Sample one dimension. `noise` is a standard-normal draw (zero for the
/// deterministic mode). `log_std_raw` is the unclamped head output.
///
/// All partials are taken at fixed noise, which is exactly the dependence
/// the reparameterized actor objective differentiates.
pub fn sample_dim<T: Scalar>(transform: Squash, mean: T, log_std_raw: T, noise: T) -> DimSample<T> {
    let mean = mean.to64();
    let raw = log_std_raw.to64();
    let n = noise.to64();
    // Outside the clamp, sigma no longer responds to the raw head output, so
    // every log_std sensitivity is zero.
    let in_clamp = raw > LOG_STD_MIN && raw < LOG_STD_MAX;
    let log_std = raw.clamp(LOG_STD_MIN, LOG_STD_MAX);
    let sigma = log_std.exp();
    let u = mean + sigma * n;
    let gauss = -0.5 * n * n - log_std - LN_SQRT_TAU;

    // (action, log_prob, dlogp/dmean, dlogp/dlog_std, da/dmean, da/dlog_std),
    // the last four before the clamp mask.
    let (action, log_prob, dlp_dm, dlp_dl, da_dm, da_dl) = match transform {
        Squash::TanhAffine { scale, shift } => {
            let t = u.tanh();
            let jac = 1.0 - t * t;
            let log_prob = gauss - scale.ln() - (jac + SQUASH_STABILIZER).ln();
            let dlogp_du = 2.0 * t * jac / (jac + SQUASH_STABILIZER);
            (
                shift + scale * t,
                log_prob,
                dlogp_du,
                -1.0 + dlogp_du * sigma * n,
                scale * jac,
                scale * jac * sigma * n,
            )
        }
        Squash::Relu6Affine { lo, hi } => {
            let step = (hi - lo) / 6.0;
            if u <= 0.0 {
                // Mass below the kink lands on the lower endpoint; its
                // probability is Phi(z) with z = (0 - mean)/sigma.
                let z = -mean / sigma;
                let r = normal_hazard(z);
                (lo, log_normal_cdf(z), -r / sigma, -z * r, 0.0, 0.0)
            } else if u >= 6.0 {
                let z = (mean - 6.0) / sigma;
                let r = normal_hazard(z);
                (hi, log_normal_cdf(z), r / sigma, -z * r, 0.0, 0.0)
            } else {
                (lo + step * u, gauss - step.ln(), 0.0, -1.0, step, step * sigma * n)
            }
        }
    };
    let mask = if in_clamp { 1.0 } else { 0.0 };

    DimSample {
        action: T::from64(action),
        log_prob: T::from64(log_prob),
        dlogp_dmean: T::from64(dlp_dm),
        dlogp_dlogstd: T::from64(dlp_dl * mask),
        da_dmean: T::from64(da_dm),
        da_dlogstd: T::from64(da_dl * mask),
    }
}

/// `ln Phi(z)` with an asymptotic branch for deep negative `z`.
pub fn log_normal_cdf(z: f64) -> f64 {
    if z < -10.0 {
        // Phi(z) ~ phi(z)/(-z) * (1 - 1/z^2 + 3/z^4)
        let z2 = z * z;
        -0.5 * z2 - LN_SQRT_TAU - (-z).ln() + (1.0 - 1.0 / z2 + 3.0 / (z2 * z2)).ln()
    } else {
        normal_cdf(z).ln()
    }
}

/// `phi(z)/Phi(z)`, stable for deep negative `z`.
pub fn normal_hazard(z: f64) -> f64 {
    if z < -10.0 {
        let z2 = z * z;
        -z / (1.0 - 1.0 / z2 + 3.0 / (z2 * z2))
    } else {
        normal_pdf(z) / normal_cdf(z)
    }
}

pub fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

pub fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Complementary error function, relative error below ~1.2e-7.
fn erfc(x: f64) -> f64 {
    let z = x.abs();
    let t = 1.0 / (1.0 + 0.5 * z);
    let ans = t
        * (-z * z - 1.26551223
            + t * (1.00002368
                + t * (0.37409196
                    + t * (0.09678418
                        + t * (-0.18628806
                            + t * (0.27886807
                                + t * (-1.13520398
                                    + t * (1.48851587
                                        + t * (-0.82215223 + t * 0.17087277)))))))))
        .exp();
    if x >= 0.0 {
        ans
    } else {
        2.0 - ans
    }
}

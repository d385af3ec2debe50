//! Intrinsic control error and coefficient truncation.

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::{Coefficient, ProblemTerms};

/// Programming-time misspecification of device coefficients.
///
/// Each programmed `h` receives independent zero-mean Gaussian noise with
/// standard deviation `noise_std_fraction * h_full_range`, and each `J`
/// likewise with `j_full_range`. Full ranges are interval widths: the
/// defaults describe `h` in `[-2, 2]` and `J` in `[-1, 1]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IceModel {
    pub noise_std_fraction: f64,
    pub h_full_range: f64,
    pub j_full_range: f64,
    pub quantization_step_fraction: Option<f64>,
}

impl Default for IceModel {
    fn default() -> Self {
        IceModel { noise_std_fraction: 0.05, h_full_range: 4.0, j_full_range: 2.0, quantization_step_fraction: None }
    }
}

impl IceModel {
    /// Noise and quantization both off; the device ranges are kept.
    pub fn disabled() -> Self {
        IceModel { noise_std_fraction: 0.0, ..Default::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.noise_std_fraction) {
            return Err(Error::InvalidConfig(format!(
                "noise_std_fraction must lie in [0, 1), got {}",
                self.noise_std_fraction
            )));
        }
        if !(self.h_full_range > 0.0 && self.j_full_range > 0.0) {
            return Err(Error::InvalidConfig("coefficient ranges must be positive".into()));
        }
        if let Some(f) = self.quantization_step_fraction {
            if !(f > 0.0 && f < 1.0) {
                return Err(Error::InvalidConfig(format!("quantization step fraction must lie in (0, 1), got {f}")));
            }
        }
        Ok(())
    }

    pub fn h_std(&self) -> f64 {
        self.noise_std_fraction * self.h_full_range
    }

    pub fn j_std(&self) -> f64 {
        self.noise_std_fraction * self.j_full_range
    }

    /// Largest programmable magnitudes.
    pub fn h_max(&self) -> f64 {
        self.h_full_range / 2.0
    }

    pub fn j_max(&self) -> f64 {
        self.j_full_range / 2.0
    }
}

/// Adds one draw of control noise to every bias (including zero ones) and
/// every stored coupling. The offset is unchanged. Deterministic given `seed`.
pub fn apply_ice<P: ProblemTerms>(p: &P, ice: &IceModel, seed: u64) -> Result<P> {
    ice.validate()?;
    if ice.noise_std_fraction == 0.0 {
        return Ok(p.clone());
    }
    let mut rng = crate::seed::rng(seed);
    let h_noise = Normal::new(0.0, ice.h_std()).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let j_noise = Normal::new(0.0, ice.j_std()).map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let mut out = p.clone();
    for i in 0..p.num_vars() {
        out.add_linear(i, 0.0)?;
    }
    out.map_coefficients(|c, v| match c {
        Coefficient::Linear(_) => v + h_noise.sample(&mut rng),
        Coefficient::Quadratic(..) => v + j_noise.sample(&mut rng),
    })
}

/// Rounds `v` to the nearest multiple of `step`, ties away from zero.
pub(crate) fn round_to_step(v: f64, step: f64) -> f64 {
    let r = v / step;
    let lower = r.floor();
    let frac = r - lower;
    // treat representation error around .5 as an exact tie
    let k = if (frac - 0.5).abs() < 1e-9 {
        if r >= 0.0 {
            lower + 1.0
        } else {
            lower
        }
    } else {
        r.round()
    };
    k * step
}

/// Rounds every linear and quadratic coefficient to a multiple of `step`.
pub fn quantize_coefficients<P: ProblemTerms>(p: &P, step: f64) -> Result<P> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidConfig(format!("quantization step must be positive, got {step}")));
    }
    p.map_coefficients(|_, v| round_to_step(v, step))
}

/// Quantizes with the model's step fractions of each coefficient range, if enabled.
pub fn quantize_device<P: ProblemTerms>(p: &P, ice: &IceModel) -> Result<P> {
    match ice.quantization_step_fraction {
        None => Ok(p.clone()),
        Some(f) => {
            let (hs, js) = (f * ice.h_full_range, f * ice.j_full_range);
            p.map_coefficients(|c, v| match c {
                Coefficient::Linear(_) => round_to_step(v, hs),
                Coefficient::Quadratic(..) => round_to_step(v, js),
            })
        }
    }
}

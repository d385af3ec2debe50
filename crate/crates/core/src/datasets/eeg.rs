use std::f64::consts::{PI, TAU};
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClipLabel {
    Interictal,
    Preictal,
}

impl ClipLabel {
    /// Preictal is the positive class.
    pub fn sign(self) -> i8 {
        match self {
            ClipLabel::Interictal => -1,
            ClipLabel::Preictal => 1,
        }
    }
}

/// Multichannel recording sampled at `sample_rate` Hz.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesClip {
    pub channels: Vec<Vec<f64>>,
    pub sample_rate: f64,
    pub label: ClipLabel,
}

#[derive(Serialize, Deserialize)]
struct ClipMeta {
    sample_rate: f64,
    label: ClipLabel,
    num_channels: usize,
    num_samples: usize,
}

impl TimeSeriesClip {
    pub fn new(channels: Vec<Vec<f64>>, sample_rate: f64, label: ClipLabel) -> Result<Self> {
        if !(sample_rate > 0.0 && sample_rate.is_finite()) {
            return Err(Error::InvalidConfig(format!("sample rate must be positive, got {sample_rate}")));
        }
        if let Some(first) = channels.first() {
            if let Some(c) = channels.iter().find(|c| c.len() != first.len()) {
                return Err(Error::Dimension { expected: first.len(), actual: c.len() });
            }
        }
        Ok(TimeSeriesClip { channels, sample_rate, label })
    }

    pub fn num_channels(&self) -> usize {
        self.channels.len()
    }

    pub fn num_samples(&self) -> usize {
        self.channels.first().map_or(0, Vec::len)
    }

    /// One CSV column per channel, plus a JSON sidecar next to it holding the metadata.
    pub fn write(&self, csv_path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(csv_path)?;
        w.write_record((0..self.num_channels()).map(|c| format!("ch{c}")))?;
        for t in 0..self.num_samples() {
            w.write_record(self.channels.iter().map(|ch| ch[t].to_string()))?;
        }
        w.flush().map_err(|e| Error::io(csv_path, e))?;
        let meta = ClipMeta {
            sample_rate: self.sample_rate,
            label: self.label,
            num_channels: self.num_channels(),
            num_samples: self.num_samples(),
        };
        let side = csv_path.with_extension("json");
        std::fs::write(&side, serde_json::to_vec_pretty(&meta)?).map_err(|e| Error::io(&side, e))
    }

    pub fn read(csv_path: &Path) -> Result<Self> {
        let side = csv_path.with_extension("json");
        let meta: ClipMeta =
            serde_json::from_slice(&std::fs::read(&side).map_err(|e| Error::io(&side, e))?)?;
        let mut r = csv::Reader::from_path(csv_path)?;
        let mut channels = vec![Vec::with_capacity(meta.num_samples); meta.num_channels];
        for (line, rec) in r.records().enumerate() {
            let rec = rec?;
            for (c, field) in rec.iter().enumerate() {
                let v = field.parse::<f64>().map_err(|_| Error::Parse {
                    path: csv_path.into(),
                    message: format!("line {}: bad number {field:?}", line + 2),
                })?;
                channels.get_mut(c).ok_or(Error::Dimension { expected: meta.num_channels, actual: c + 1 })?.push(v);
            }
        }
        TimeSeriesClip::new(channels, meta.sample_rate, meta.label)
    }
}

/// Synthetic EEG: smoothed Gaussian noise plus a sinusoid per channel.
///
/// Every clip mixes a shared noise source into its channels and scales the
/// sinusoid by a random factor. Preictal clips add `preictal_coupling` to the
/// mixing weight, raise the amplitude by `preictal_gain` and pull the
/// channel phases together by `preictal_phase_locking`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EegConfig {
    pub channels: usize,
    pub seconds: f64,
    pub sample_rate: f64,
    pub noise_std: f64,
    /// AR(1) coefficient of the noise low-pass.
    pub noise_smoothing: f64,
    pub rhythm_hz: f64,
    pub rhythm_amplitude: f64,
    pub preictal_gain: f64,
    pub preictal_coupling: f64,
    /// Fraction by which preictal channel phases shrink toward their circular mean.
    pub preictal_phase_locking: f64,
    /// Each clip mixes in shared noise with a baseline weight drawn from `[0, spread]`.
    pub clip_coupling_spread: f64,
    /// Log-normal sigma of a per-clip factor on the rhythm amplitude.
    pub clip_amplitude_spread: f64,
}

impl Default for EegConfig {
    fn default() -> Self {
        EegConfig {
            channels: 8,
            seconds: 10.0,
            sample_rate: 400.0,
            noise_std: 1.0,
            noise_smoothing: 0.9,
            rhythm_hz: 12.0,
            rhythm_amplitude: 0.5,
            preictal_gain: 1.3,
            preictal_coupling: 0.1,
            preictal_phase_locking: 0.5,
            clip_coupling_spread: 0.4,
            clip_amplitude_spread: 0.4,
        }
    }
}

impl EegConfig {
    pub fn validate(&self) -> Result<()> {
        if self.channels < 2 {
            return Err(Error::InvalidConfig(format!("need at least 2 channels, got {}", self.channels)));
        }
        if !(self.sample_rate > 0.0 && self.seconds > 0.0) {
            return Err(Error::InvalidConfig("sample rate and duration must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.noise_smoothing) || !(0.0..=1.0).contains(&self.preictal_coupling) {
            return Err(Error::InvalidConfig("smoothing must lie in [0, 1) and coupling in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.preictal_phase_locking) {
            return Err(Error::InvalidConfig("phase locking must lie in [0, 1]".into()));
        }
        if !(0.0..=1.0).contains(&self.clip_coupling_spread) || self.clip_amplitude_spread < 0.0 {
            return Err(Error::InvalidConfig("clip coupling spread must lie in [0, 1], amplitude spread >= 0".into()));
        }
        if self.noise_std < 0.0 || self.rhythm_amplitude < 0.0 || self.preictal_gain < 0.0 {
            return Err(Error::InvalidConfig("amplitudes must be non-negative".into()));
        }
        Ok(())
    }

    pub fn num_samples(&self) -> usize {
        (self.seconds * self.sample_rate).round() as usize
    }
}

/// Deterministic given `seed`. Random draws do not depend on `label`, so two
/// clips with the same seed differ only through the label-specific terms.
pub fn gen_synthetic_eeg(cfg: &EegConfig, label: ClipLabel, seed: u64) -> Result<TimeSeriesClip> {
    cfg.validate()?;
    let mut rng = crate::seed::rng(seed);
    let n = cfg.num_samples();
    let a = cfg.noise_smoothing;
    let innovation = (1.0 - a * a).sqrt();
    let smoothed = |rng: &mut rand_chacha::ChaCha8Rng| {
        let mut x: f64 = StandardNormal.sample(rng);
        (0..n)
            .map(|_| {
                let e: f64 = StandardNormal.sample(rng);
                x = a * x + innovation * e;
                x
            })
            .collect::<Vec<f64>>()
    };
    let shared = smoothed(&mut rng);
    let phase = Uniform::new(0.0, TAU).expect("valid range");
    let base_coupling = cfg.clip_coupling_spread * rng.random::<f64>();
    let z: f64 = StandardNormal.sample(&mut rng);
    let base_amplitude = cfg.rhythm_amplitude * (cfg.clip_amplitude_spread * z).exp();
    let own: Vec<Vec<f64>> = (0..cfg.channels).map(|_| smoothed(&mut rng)).collect();
    let mut phases: Vec<f64> = (0..cfg.channels).map(|_| phase.sample(&mut rng)).collect();

    let (amplitude, coupling) = match label {
        ClipLabel::Interictal => (base_amplitude, base_coupling),
        ClipLabel::Preictal => {
            (base_amplitude * cfg.preictal_gain, (base_coupling + cfg.preictal_coupling).min(1.0))
        }
    };
    if label == ClipLabel::Preictal {
        // pull each phase toward the circular mean; no pairwise gap widens
        let mean = phases.iter().map(|p| p.sin()).sum::<f64>().atan2(phases.iter().map(|p| p.cos()).sum::<f64>());
        let keep = 1.0 - cfg.preictal_phase_locking;
        for p in &mut phases {
            let d = (*p - mean + PI).rem_euclid(TAU) - PI;
            *p = mean + keep * d;
        }
    }
    let own_w = (1.0 - coupling).sqrt();
    let shared_w = coupling.sqrt();
    let omega = TAU * cfg.rhythm_hz / cfg.sample_rate;

    let channels = own
        .iter()
        .zip(&phases)
        .map(|(own, &phi)| {
            (0..n)
                .map(|t| {
                    cfg.noise_std * (own_w * own[t] + shared_w * shared[t]) + amplitude * (omega * t as f64 + phi).sin()
                })
                .collect()
        })
        .collect();
    TimeSeriesClip::new(channels, cfg.sample_rate, label)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mean_pairwise_corr(c: &TimeSeriesClip) -> f64 {
        let k = c.num_channels();
        let mut total = 0.0;
        for i in 0..k {
            for j in 0..i {
                total += pearson(&c.channels[i], &c.channels[j]);
            }
        }
        total / (k * (k - 1) / 2) as f64
    }

    fn pearson(x: &[f64], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
        let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
        sxy / (sxx * syy).sqrt()
    }

    #[test]
    fn deterministic_and_shaped() {
        let cfg = EegConfig::default();
        let a = gen_synthetic_eeg(&cfg, ClipLabel::Preictal, 3).unwrap();
        assert_eq!(a, gen_synthetic_eeg(&cfg, ClipLabel::Preictal, 3).unwrap());
        assert_eq!(a.num_channels(), 8);
        assert_eq!(a.num_samples(), 4000);
    }

    #[test]
    fn preictal_more_correlated() {
        let cfg = EegConfig { seconds: 2.0, ..Default::default() };
        for seed in 0..100 {
            let pre = gen_synthetic_eeg(&cfg, ClipLabel::Preictal, seed).unwrap();
            let inter = gen_synthetic_eeg(&cfg, ClipLabel::Interictal, seed).unwrap();
            assert!(mean_pairwise_corr(&pre) > mean_pairwise_corr(&inter), "seed {seed}");
        }
    }

    #[test]
    fn zero_noise_is_pure_sinusoid() {
        let cfg = EegConfig { noise_std: 0.0, clip_amplitude_spread: 0.0, ..Default::default() };
        let clip = gen_synthetic_eeg(&cfg, ClipLabel::Interictal, 1).unwrap();
        for ch in &clip.channels {
            let mean = ch.iter().sum::<f64>() / ch.len() as f64;
            assert!(mean.abs() < 1e-12, "{mean}");
            let peak = ch.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(peak <= cfg.rhythm_amplitude + 1e-12);
        }
    }

    #[test]
    fn rejects_single_channel() {
        let cfg = EegConfig { channels: 1, ..Default::default() };
        assert!(gen_synthetic_eeg(&cfg, ClipLabel::Interictal, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("clip.csv");
        let cfg = EegConfig { seconds: 0.1, channels: 3, ..Default::default() };
        let clip = gen_synthetic_eeg(&cfg, ClipLabel::Preictal, 2).unwrap();
        clip.write(&path).unwrap();
        assert_eq!(TimeSeriesClip::read(&path).unwrap(), clip);
    }
}

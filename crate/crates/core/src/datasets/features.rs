use rustfft::num_complex::Complex;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::TimeSeriesClip;
use crate::error::{Error, Result};
use crate::eval::quantile_sorted;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Filter {
    None,
    /// Running median over `width` samples (odd), truncated at the edges.
    Median { width: usize },
    /// Gaussian smoothing with `sigma` in samples, renormalized at the edges.
    Gaussian { sigma: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stat {
    Mean,
    Median,
    Max,
    ArgMax,
    Min,
    ArgMin,
    Std,
    Skewness,
    Kurtosis,
    Quantile(f64),
}

impl Stat {
    fn name(&self) -> String {
        match self {
            Stat::Mean => "mean".into(),
            Stat::Median => "median".into(),
            Stat::Max => "max".into(),
            Stat::ArgMax => "argmax".into(),
            Stat::Min => "min".into(),
            Stat::ArgMin => "argmin".into(),
            Stat::Std => "std".into(),
            Stat::Skewness => "skew".into(),
            Stat::Kurtosis => "kurt".into(),
            Stat::Quantile(q) => format!("q{q}"),
        }
    }
}

/// Fixed-length windows starting every `step_seconds`; overlapping when the
/// step is shorter than the length.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindowSpec {
    pub length_seconds: f64,
    pub step_seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FeatureConfig {
    pub filter: Filter,
    pub windows: WindowSpec,
    pub stats: Vec<Stat>,
    /// Also compute the statistics on each window's magnitude spectrum.
    pub spectral: bool,
    /// Append the lower triangle of the channel correlation matrix.
    pub correlation: bool,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            filter: Filter::Median { width: 5 },
            windows: WindowSpec { length_seconds: 5.0, step_seconds: 5.0 },
            stats: vec![
                Stat::Mean,
                Stat::Median,
                Stat::Max,
                Stat::ArgMax,
                Stat::Min,
                Stat::ArgMin,
                Stat::Std,
                Stat::Skewness,
                Stat::Kurtosis,
                Stat::Quantile(0.25),
                Stat::Quantile(0.75),
            ],
            spectral: false,
            correlation: true,
        }
    }
}

impl FeatureConfig {
    /// Window start offsets and length, in samples.
    fn window_starts(&self, num_samples: usize, sample_rate: f64) -> Result<(Vec<usize>, usize)> {
        let len = (self.windows.length_seconds * sample_rate).round() as usize;
        let step = (self.windows.step_seconds * sample_rate).round() as usize;
        if len == 0 || step == 0 {
            return Err(Error::InvalidConfig("window length and step must cover at least one sample".into()));
        }
        if len > num_samples {
            return Err(Error::InvalidConfig(format!("window of {len} samples exceeds clip of {num_samples}")));
        }
        Ok(((0..=num_samples - len).step_by(step).collect(), len))
    }

    pub fn num_windows(&self, num_samples: usize, sample_rate: f64) -> Result<usize> {
        Ok(self.window_starts(num_samples, sample_rate)?.0.len())
    }
}

/// Column names matching [`extract_features`] for a clip shape.
pub fn feature_names(cfg: &FeatureConfig, channels: usize, num_windows: usize) -> Vec<String> {
    let mut names = Vec::new();
    let domains: &[&str] = if cfg.spectral { &["", "fft_"] } else { &[""] };
    for w in 0..num_windows {
        for prefix in domains {
            for c in 0..channels {
                for s in &cfg.stats {
                    names.push(format!("{prefix}w{w}_ch{c}_{}", s.name()));
                }
            }
        }
    }
    if cfg.correlation {
        for i in 1..channels {
            for j in 0..i {
                names.push(format!("corr_{i}_{j}"));
            }
        }
    }
    names
}

/// Filter, window, summarize, then append channel correlations.
///
/// Layout: for each window, per-channel time-domain statistics, then (if
/// spectral) per-channel spectrum statistics; finally the correlation
/// entries `(i, j)` for `i > j` in row order, computed on the whole filtered clip.
pub fn extract_features(clip: &TimeSeriesClip, cfg: &FeatureConfig) -> Result<Vec<f64>> {
    let n = clip.num_samples();
    let (starts, len) = cfg.window_starts(n, clip.sample_rate)?;
    if cfg.correlation && clip.num_channels() < 2 {
        return Err(Error::InvalidConfig("correlation features need at least 2 channels".into()));
    }
    let filtered: Vec<Vec<f64>> = clip.channels.iter().map(|c| apply_filter(c, &cfg.filter)).collect::<Result<_>>()?;
    let fft = cfg.spectral.then(|| FftPlanner::<f64>::new().plan_fft_forward(len));

    let mut out = Vec::new();
    for &s in &starts {
        for ch in &filtered {
            out.extend(summarize_window(&ch[s..s + len], &cfg.stats));
        }
        if let Some(fft) = &fft {
            for ch in &filtered {
                let mut buf: Vec<Complex<f64>> = ch[s..s + len].iter().map(|&v| Complex::new(v, 0.0)).collect();
                fft.process(&mut buf);
                let mags: Vec<f64> = buf[..len / 2 + 1].iter().map(|z| z.norm()).collect();
                out.extend(summarize_window(&mags, &cfg.stats));
            }
        }
    }
    if cfg.correlation {
        for i in 1..filtered.len() {
            for j in 0..i {
                out.push(pearson(&filtered[i], &filtered[j]));
            }
        }
    }
    Ok(out)
}

fn apply_filter(x: &[f64], filter: &Filter) -> Result<Vec<f64>> {
    match *filter {
        Filter::None => Ok(x.to_vec()),
        Filter::Median { width } => {
            if width == 0 || width % 2 == 0 {
                return Err(Error::InvalidConfig(format!("median width must be odd, got {width}")));
            }
            let h = width / 2;
            let mut buf = Vec::with_capacity(width);
            Ok((0..x.len())
                .map(|t| {
                    buf.clear();
                    buf.extend_from_slice(&x[t.saturating_sub(h)..(t + h + 1).min(x.len())]);
                    buf.sort_by(f64::total_cmp);
                    quantile_sorted(&buf, 0.5)
                })
                .collect())
        }
        Filter::Gaussian { sigma } => {
            if !(sigma > 0.0) {
                return Err(Error::InvalidConfig(format!("gaussian sigma must be positive, got {sigma}")));
            }
            let r = (3.0 * sigma).ceil() as isize;
            let kernel: Vec<f64> = (-r..=r).map(|k| (-(k * k) as f64 / (2.0 * sigma * sigma)).exp()).collect();
            let n = x.len() as isize;
            Ok((0..n)
                .map(|t| {
                    let (mut acc, mut wsum) = (0.0, 0.0);
                    for (i, k) in (-r..=r).enumerate() {
                        let u = t + k;
                        if (0..n).contains(&u) {
                            acc += kernel[i] * x[u as usize];
                            wsum += kernel[i];
                        }
                    }
                    acc / wsum
                })
                .collect())
        }
    }
}

fn summarize_window(x: &[f64], stats: &[Stat]) -> Vec<f64> {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let central = |p: i32| x.iter().map(|v| (v - mean).powi(p)).sum::<f64>() / n;
    let m2 = central(2);
    let mut sorted = x.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut imax, mut imin) = (0, 0);
    for (i, &v) in x.iter().enumerate() {
        if v > x[imax] {
            imax = i;
        }
        if v < x[imin] {
            imin = i;
        }
    }
    stats
        .iter()
        .map(|s| match *s {
            Stat::Mean => mean,
            Stat::Median => quantile_sorted(&sorted, 0.5),
            Stat::Max => x[imax],
            Stat::ArgMax => imax as f64,
            Stat::Min => x[imin],
            Stat::ArgMin => imin as f64,
            Stat::Std => m2.sqrt(),
            Stat::Skewness if m2 > 0.0 => central(3) / m2.powf(1.5),
            Stat::Kurtosis if m2 > 0.0 => central(4) / (m2 * m2) - 3.0,
            Stat::Skewness | Stat::Kurtosis => 0.0,
            Stat::Quantile(q) => quantile_sorted(&sorted, q),
        })
        .collect()
}

/// Pearson correlation; zero when either series is constant.
fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datasets::{gen_synthetic_eeg, ClipLabel, EegConfig};

    fn clip(channels: Vec<Vec<f64>>) -> TimeSeriesClip {
        TimeSeriesClip::new(channels, 10.0, ClipLabel::Interictal).unwrap()
    }

    fn plain() -> FeatureConfig {
        FeatureConfig {
            filter: Filter::None,
            windows: WindowSpec { length_seconds: 1.0, step_seconds: 1.0 },
            ..Default::default()
        }
    }

    #[test]
    fn constant_channel_summaries() {
        let f = extract_features(&clip(vec![vec![2.5; 10], vec![2.5; 10]]), &plain()).unwrap();
        // mean, median, max, argmax, min, argmin, std, skew, kurt, q25, q75
        assert_eq!(&f[..11], &[2.5, 2.5, 2.5, 0.0, 2.5, 0.0, 0.0, 0.0, 0.0, 2.5, 2.5]);
    }

    #[test]
    fn identical_channels_correlate_fully() {
        let x: Vec<f64> = (0..10).map(|t| (t as f64).sin()).collect();
        let f = extract_features(&clip(vec![x.clone(), x]), &plain()).unwrap();
        assert!((f.last().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn feature_count_arithmetic() {
        let eeg = EegConfig { channels: 5, seconds: 4.0, ..Default::default() };
        let c = gen_synthetic_eeg(&eeg, ClipLabel::Preictal, 0).unwrap();
        let cfg = FeatureConfig { windows: WindowSpec { length_seconds: 2.0, step_seconds: 1.0 }, ..Default::default() };
        let f = extract_features(&c, &cfg).unwrap();
        assert_eq!(cfg.num_windows(c.num_samples(), c.sample_rate).unwrap(), 3);
        assert_eq!(f.len(), 5 * 3 * 11 + 10);
        assert_eq!(feature_names(&cfg, 5, 3).len(), f.len());
        let spectral = FeatureConfig { spectral: true, ..cfg };
        assert_eq!(extract_features(&c, &spectral).unwrap().len(), 2 * 5 * 3 * 11 + 10);
    }

    #[test]
    fn window_too_long() {
        let cfg = FeatureConfig { windows: WindowSpec { length_seconds: 2.0, step_seconds: 1.0 }, ..plain() };
        assert!(extract_features(&clip(vec![vec![0.0; 10], vec![0.0; 10]]), &cfg).is_err());
    }

    #[test]
    fn filters() {
        let x = [0.0, 10.0, 0.0, 0.0, 5.0];
        assert_eq!(apply_filter(&x, &Filter::Median { width: 3 }).unwrap(), vec![5.0, 0.0, 0.0, 0.0, 2.5]);
        let flat = apply_filter(&[3.0; 7], &Filter::Gaussian { sigma: 1.5 }).unwrap();
        assert!(flat.iter().all(|v| (v - 3.0).abs() < 1e-12));
        assert!(apply_filter(&x, &Filter::Median { width: 2 }).is_err());
    }

    #[test]
    fn spectrum_of_pure_tone_peaks_at_its_bin() {
        let x: Vec<f64> = (0..40).map(|t| (std::f64::consts::TAU * 4.0 * t as f64 / 40.0).cos()).collect();
        let cfg = FeatureConfig {
            filter: Filter::None,
            windows: WindowSpec { length_seconds: 4.0, step_seconds: 4.0 },
            stats: vec![Stat::ArgMax, Stat::Max],
            spectral: true,
            correlation: false,
        };
        let f = extract_features(&clip(vec![x]), &cfg).unwrap();
        assert_eq!(f[2], 4.0);
        assert!((f[3] - 20.0).abs() < 1e-9);
    }
}

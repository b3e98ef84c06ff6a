//! Multipath array signal model for a downward-looking stepped-frequency
//! mmWave front end.
//!
//! A frame is one snapshot of the scene across an `M`-element uniform linear
//! array and `K` frequency points spanning the sweep bandwidth. Every
//! propagation path contributes, at antenna `m` and frequency `f_k`,
//!
//! ```text
//! attenuation * exp(-j 2 pi f_k tof) * exp(-j 2 pi f_k m d cos(aoa) / c)
//! ```
//!
//! with `m` counted from zero, `d` the element spacing, and `c` the speed of
//! light. Paths superpose linearly and optional receiver noise is complex
//! Gaussian, drawn from a seeded generator so synthesis is reproducible.
//!
//! # Example
//!
//! ```
//! use levelradar::radar::{default_config, synthesize_frame, PathLabel, PropagationPath};
//!
//! let config = default_config();
//! let surface = PropagationPath::new(PathLabel::LiquidSurface, 1.5708, 1.8e-9, 1.0);
//! let frame = synthesize_frame(&config, &[surface], 0, 0).unwrap();
//! assert_eq!(frame.samples.len(), 4 * 128);
//! ```

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::geometry::SPEED_OF_LIGHT;

/// Stepped-frequency front-end parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct RadarConfig {
    /// Sweep center frequency, Hz.
    pub carrier_frequency: f64,
    /// Total swept bandwidth, Hz.
    pub bandwidth: f64,
    /// Number of receive antennas `M` in the uniform linear array.
    pub num_antennas: usize,
    /// Number of frequency points `K` across the sweep.
    pub num_freq_points: usize,
    /// Array element spacing, meters.
    pub element_spacing: f64,
    /// Per-component standard deviation of the complex receiver noise.
    pub noise_std: f64,
}

impl RadarConfig {
    /// Checks every field against its physical domain.
    pub fn validate(&self) -> Result<()> {
        let ok_numbers = self.carrier_frequency.is_finite()
            && self.bandwidth.is_finite()
            && self.element_spacing.is_finite()
            && self.noise_std.is_finite();
        if !ok_numbers {
            return Err(Error::InvalidParameter("radar config must be finite".into()));
        }
        if self.num_antennas < 1 || self.num_freq_points < 1 {
            return Err(Error::InvalidParameter(
                "need at least one antenna and one frequency point".into(),
            ));
        }
        if self.bandwidth < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "bandwidth must be non-negative, got {}",
                self.bandwidth
            )));
        }
        if self.carrier_frequency <= self.bandwidth / 2.0 {
            return Err(Error::InvalidParameter(format!(
                "carrier {} Hz must exceed half the bandwidth {} Hz",
                self.carrier_frequency, self.bandwidth
            )));
        }
        if self.element_spacing <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "element spacing must be positive, got {}",
                self.element_spacing
            )));
        }
        if self.noise_std < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise std must be non-negative, got {}",
                self.noise_std
            )));
        }
        Ok(())
    }

    /// The sampled frequencies `f_k`, uniform from `carrier - bandwidth/2`
    /// to `carrier + bandwidth/2`. A single point sits at the carrier.
    pub fn freq_points(&self) -> Vec<f64> {
        let k = self.num_freq_points;
        if k == 1 {
            return vec![self.carrier_frequency];
        }
        let start = self.carrier_frequency - self.bandwidth / 2.0;
        let step = self.bandwidth / (k - 1) as f64;
        (0..k).map(|idx| start + idx as f64 * step).collect()
    }

    /// Complex samples per frame, `M * K`.
    pub fn samples_per_frame(&self) -> usize {
        self.num_antennas * self.num_freq_points
    }
}

/// The 61.8 GHz / 3.6 GHz bench configuration: a 1x4 array at half-wavelength
/// spacing, 128 frequency points, noiseless.
pub fn default_config() -> RadarConfig {
    let carrier = 61.8e9;
    RadarConfig {
        carrier_frequency: carrier,
        bandwidth: 3.6e9,
        num_antennas: 4,
        num_freq_points: 128,
        element_spacing: SPEED_OF_LIGHT / (2.0 * carrier),
        noise_std: 0.0,
    }
}

/// What a propagation path reflected from. Labels carry scenario bookkeeping
/// only; nothing downstream of synthesis may read them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathLabel {
    LiquidSurface,
    Gripper,
    SourceContainer,
    Desktop,
    Other,
}

/// One resolvable propagation path between the scene and the array.
#[derive(Clone, Debug)]
pub struct PropagationPath {
    /// Angle of arrival at the array, radians, strictly inside (0, pi).
    pub aoa: f64,
    /// Two-way time of flight, seconds, strictly positive.
    pub tof: f64,
    /// Complex path gain; must have non-zero magnitude.
    pub attenuation: Complex64,
    /// Scenario bookkeeping label, invisible to estimators.
    pub label: PathLabel,
}

impl PropagationPath {
    /// Convenience constructor for a path with real positive gain.
    pub fn new(label: PathLabel, aoa: f64, tof: f64, magnitude: f64) -> Self {
        PropagationPath {
            aoa,
            tof,
            attenuation: Complex64::new(magnitude, 0.0),
            label,
        }
    }

    /// Checks angle, delay, and gain against their domains.
    pub fn validate(&self) -> Result<()> {
        if !self.aoa.is_finite() || self.aoa <= 0.0 || self.aoa >= PI {
            return Err(Error::InvalidParameter(format!(
                "angle of arrival must lie strictly inside (0, pi), got {}",
                self.aoa
            )));
        }
        if !self.tof.is_finite() || self.tof <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "time of flight must be positive, got {}",
                self.tof
            )));
        }
        if !self.attenuation.re.is_finite() || !self.attenuation.im.is_finite() {
            return Err(Error::InvalidParameter("attenuation must be finite".into()));
        }
        if self.attenuation.norm_sqr() == 0.0 {
            return Err(Error::InvalidParameter(
                "attenuation must have non-zero magnitude".into(),
            ));
        }
        Ok(())
    }
}

/// One received snapshot: `M * K` complex samples, antenna-major.
///
/// Sample `(m, k)` lives at index `m * K + k`. Slot `-1` is reserved for
/// background captures taken before the scene becomes active.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    /// Time slot index; `-1` marks a background capture.
    pub slot: i64,
    /// Antennas `M` in this frame.
    pub num_antennas: usize,
    /// Frequency points `K` in this frame.
    pub num_freq_points: usize,
    /// Complex samples, length `M * K`, antenna-major then frequency.
    pub samples: Vec<Complex64>,
}

impl Frame {
    /// All-zero frame of the configured dimensions.
    pub fn zeros(config: &RadarConfig, slot: i64) -> Frame {
        Frame {
            slot,
            num_antennas: config.num_antennas,
            num_freq_points: config.num_freq_points,
            samples: vec![Complex64::new(0.0, 0.0); config.samples_per_frame()],
        }
    }

    /// Sample at antenna `m`, frequency point `k`.
    pub fn sample(&self, m: usize, k: usize) -> Complex64 {
        self.samples[m * self.num_freq_points + k]
    }
}

/// Synthesizes the frame received at time `slot` from the given paths.
///
/// Paths superpose in the order given. When `config.noise_std > 0`, complex
/// Gaussian noise seeded by `rng_seed` is added per sample; the same seed
/// always reproduces the same frame bit for bit. An empty path list yields
/// the noise-only (or all-zero) frame.
pub fn synthesize_frame(
    config: &RadarConfig,
    paths: &[PropagationPath],
    slot: i64,
    rng_seed: u64,
) -> Result<Frame> {
    config.validate()?;
    for path in paths {
        path.validate()?;
    }

    let freqs = config.freq_points();
    let k = config.num_freq_points;
    let mut frame = Frame::zeros(config, slot);

    for path in paths {
        let lateral = path.aoa.cos() * config.element_spacing / SPEED_OF_LIGHT;
        for m in 0..config.num_antennas {
            // Total delay seen at element m: path delay plus the extra
            // lateral travel across the array aperture.
            let delay = path.tof + m as f64 * lateral;
            let row = &mut frame.samples[m * k..(m + 1) * k];
            for (sample, &f) in row.iter_mut().zip(&freqs) {
                let phase = -TAU * f * delay;
                *sample += path.attenuation * Complex64::from_polar(1.0, phase);
            }
        }
    }

    if config.noise_std > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
        let normal = StandardNormal;
        for sample in &mut frame.samples {
            let re: f64 = normal.sample(&mut rng);
            let im: f64 = normal.sample(&mut rng);
            *sample += Complex64::new(re * config.noise_std, im * config.noise_std);
        }
    }

    Ok(frame)
}

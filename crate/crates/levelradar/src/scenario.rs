//! Ground-truth-annotated scene generation for the two evaluation
//! protocols: an incremental static fill and a continuous pour with moving
//! interferers.
//!
//! A scenario samples labeled trajectories once per slot and hands the
//! resulting path sets to the radar synthesizer. The liquid surface sits
//! directly below the radar, so its delay is tied to the level trajectory
//! through the mount geometry. Interferers such as the pouring gripper
//! follow piecewise-linear angle/delay tracks that may cross the surface
//! trace; static clutter is frozen into every frame and into the separate
//! background capture used for differential cancelation.
//!
//! Noise is reproducible: one base seed derives an independent per-slot
//! stream, so a scenario is a pure function of its configuration and seed,
//! and the background never shares a stream with a live frame.

use std::f64::consts::FRAC_PI_2;

use crate::beamforming::{default_aoa_range, default_tof_range};
use crate::error::{Error, Result};
use crate::geometry::MountGeometry;
use crate::radar::{synthesize_frame, Frame, PathLabel, PropagationPath, RadarConfig};

/// Piecewise-linear function of the slot index, defined by `(slot, value)`
/// knots with strictly increasing slots. Outside the knot span the nearest
/// endpoint value holds.
#[derive(Clone, Debug)]
pub struct PiecewiseLinear {
    knots: Vec<(f64, f64)>,
}

impl PiecewiseLinear {
    /// Builds the trajectory; knots need strictly increasing slots and
    /// finite values.
    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.is_empty() {
            return Err(Error::InvalidParameter("trajectory needs at least one knot".into()));
        }
        for pair in knots.windows(2) {
            if !(pair[0].0 < pair[1].0) {
                return Err(Error::InvalidParameter(format!(
                    "trajectory knots must have strictly increasing slots, got {} then {}",
                    pair[0].0, pair[1].0
                )));
            }
        }
        if knots.iter().any(|&(s, v)| !s.is_finite() || !v.is_finite()) {
            return Err(Error::InvalidParameter("trajectory knots must be finite".into()));
        }
        Ok(PiecewiseLinear { knots })
    }

    /// Interpolated value at `slot`, clamped to the endpoint values outside
    /// the knot span.
    pub fn value_at(&self, slot: f64) -> f64 {
        let first = self.knots[0];
        let last = self.knots[self.knots.len() - 1];
        if slot <= first.0 {
            return first.1;
        }
        if slot >= last.0 {
            return last.1;
        }
        let hi = self.knots.partition_point(|&(s, _)| s < slot);
        let (s0, v0) = self.knots[hi - 1];
        let (s1, v1) = self.knots[hi];
        v0 + (v1 - v0) * (slot - s0) / (s1 - s0)
    }

    /// First knot slot.
    pub fn first_slot(&self) -> f64 {
        self.knots[0].0
    }

    /// Last knot slot.
    pub fn last_slot(&self) -> f64 {
        self.knots[self.knots.len() - 1].0
    }

    /// The knot list.
    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }
}

/// A moving reflector described by angle and delay trajectories. The
/// reflector is present only on slots covered by both knot spans.
#[derive(Clone, Debug)]
pub struct Interferer {
    /// What the reflector is, carried through to the propagation path.
    pub label: PathLabel,
    /// Reflection gain relative to unit; the pour failure mode needs this
    /// above the surface magnitude.
    pub magnitude: f64,
    /// Angle of arrival over slots, radians.
    pub aoa: PiecewiseLinear,
    /// Two-way delay over slots, seconds.
    pub tof: PiecewiseLinear,
}

impl Interferer {
    /// Slot span on which the reflector exists: the intersection of the
    /// two knot spans.
    pub fn active_span(&self) -> (f64, f64) {
        (
            self.aoa.first_slot().max(self.tof.first_slot()),
            self.aoa.last_slot().min(self.tof.last_slot()),
        )
    }

    fn is_active(&self, slot: f64) -> bool {
        let (lo, hi) = self.active_span();
        slot >= lo && slot <= hi
    }
}

/// Full description of a pouring scene: geometry, level trajectory,
/// interferers, clutter, noise, and the angle/delay coverage the moving
/// paths must stay inside.
#[derive(Clone, Debug)]
pub struct ScenarioConfig {
    /// Mount geometry tying delays to levels.
    pub geometry: MountGeometry,
    /// Total slots simulated.
    pub num_slots: usize,
    /// Slot spacing in seconds, for trajectory sampling only.
    pub slot_duration: f64,
    /// Liquid level over slots, meters; must be non-decreasing and stay
    /// inside the fill interval.
    pub level: PiecewiseLinear,
    /// Moving reflectors besides the surface.
    pub interferers: Vec<Interferer>,
    /// Reflection gain of the liquid surface; zero removes the surface.
    pub surface_magnitude: f64,
    /// Immobile reflectors present in every frame and in the background.
    pub static_clutter: Vec<PropagationPath>,
    /// Per-sample SNR against the surface path, decibels; `None` disables
    /// noise.
    pub snr_db: Option<f64>,
    /// Angle interval the surface and interferer tracks must stay inside.
    pub aoa_coverage: (f64, f64),
    /// Delay interval the surface and interferer tracks must stay inside.
    pub tof_coverage: (f64, f64),
}

impl ScenarioConfig {
    /// The stock pour: the level rises 0 to 7 cm over 60 slots while a
    /// gripper at 1.5x surface magnitude sweeps up and down across the
    /// surface trace in delay, with desktop and source-container clutter
    /// in the scene, at 20 dB SNR.
    ///
    /// Each gripper sweep covers 0.6 ns in 2 slots, close to 20 delay bins
    /// per slot on the default grid. That outruns both the tracker's
    /// default per-slot window and the width of the delay mainlobe on
    /// purpose: the gripper corrupts the per-slot argmax on every active
    /// slot, yet any trellis path chasing it spends most slots so far from
    /// the sweep that holding the steady surface trace is cheaper.
    pub fn default_pour() -> Self {
        let geometry = MountGeometry::default();
        let aoa_coverage = default_aoa_range();
        let tof_coverage = default_tof_range(&geometry);
        let mut sweep = Vec::new();
        for (leg, slot) in (8..=50).step_by(2).enumerate() {
            sweep.push((slot as f64, if leg % 2 == 0 { 1.30e-9 } else { 1.90e-9 }));
        }
        ScenarioConfig {
            geometry,
            num_slots: 60,
            slot_duration: 0.1,
            level: PiecewiseLinear::new(vec![
                (0.0, 0.0),
                (5.0, 0.0),
                (55.0, 0.07),
                (59.0, 0.07),
            ])
            .unwrap(),
            interferers: vec![Interferer {
                label: PathLabel::Gripper,
                magnitude: 1.5,
                aoa: PiecewiseLinear::new(vec![
                    (8.0, 72.0_f64.to_radians()),
                    (50.0, 68.0_f64.to_radians()),
                ])
                .unwrap(),
                tof: PiecewiseLinear::new(sweep).unwrap(),
            }],
            surface_magnitude: 1.0,
            static_clutter: vec![
                PropagationPath {
                    label: PathLabel::Desktop,
                    aoa: 110.0_f64.to_radians(),
                    tof: 2.3e-9,
                    attenuation: num_complex::Complex64::new(0.8, 0.0),
                },
                PropagationPath {
                    label: PathLabel::SourceContainer,
                    aoa: 95.0_f64.to_radians(),
                    tof: 1.9e-9,
                    attenuation: num_complex::Complex64::new(0.4, 0.0),
                },
            ],
            snr_db: Some(20.0),
            aoa_coverage,
            tof_coverage,
        }
    }

    /// Structural checks plus coverage validation of every sampled moving
    /// path position. Static clutter is exempt: off-grid clutter is normal
    /// and is what background subtraction is for.
    pub fn validate(&self) -> Result<()> {
        if self.num_slots < 2 {
            return Err(Error::InvalidParameter(format!(
                "scenario needs at least 2 slots, got {}",
                self.num_slots
            )));
        }
        if !(self.slot_duration > 0.0 && self.slot_duration.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "slot_duration must be positive, got {}",
                self.slot_duration
            )));
        }
        if !(self.surface_magnitude >= 0.0 && self.surface_magnitude.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "surface_magnitude must be non-negative, got {}",
                self.surface_magnitude
            )));
        }
        if self.snr_db.is_some() && self.surface_magnitude == 0.0 {
            return Err(Error::InvalidParameter(
                "snr_db needs a surface path as its reference".into(),
            ));
        }
        for pair in self.level.knots().windows(2) {
            if pair[1].1 < pair[0].1 {
                return Err(Error::InvalidParameter(format!(
                    "level trajectory must be non-decreasing, got {} then {}",
                    pair[0].1, pair[1].1
                )));
            }
        }
        for clutter in &self.static_clutter {
            clutter.validate()?;
        }

        let (aoa_lo, aoa_hi) = self.aoa_coverage;
        let (tof_lo, tof_hi) = self.tof_coverage;
        for t in 0..self.num_slots {
            let slot = t as f64;
            let level = self.level.value_at(slot);
            if !(0.0..=self.geometry.max_level).contains(&level) {
                return Err(Error::InvalidParameter(format!(
                    "level {level} m at slot {t} leaves the fill interval [0, {}]",
                    self.geometry.max_level
                )));
            }
            if self.surface_magnitude > 0.0 {
                let tof = self.geometry.level_to_tof(level);
                if !(tof_lo..=tof_hi).contains(&tof) {
                    return Err(Error::InvalidParameter(format!(
                        "surface delay {tof:.3e} s at slot {t} leaves the delay coverage"
                    )));
                }
            }
            for (idx, interferer) in self.interferers.iter().enumerate() {
                if !interferer.is_active(slot) {
                    continue;
                }
                let aoa = interferer.aoa.value_at(slot);
                let tof = interferer.tof.value_at(slot);
                if !(aoa_lo..=aoa_hi).contains(&aoa) {
                    return Err(Error::InvalidParameter(format!(
                        "interferer {idx} angle {aoa:.4} rad at slot {t} leaves the angle coverage"
                    )));
                }
                if !(tof_lo..=tof_hi).contains(&tof) {
                    return Err(Error::InvalidParameter(format!(
                        "interferer {idx} delay {tof:.3e} s at slot {t} leaves the delay coverage"
                    )));
                }
            }
        }
        for interferer in &self.interferers {
            if !(interferer.magnitude > 0.0 && interferer.magnitude.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "interferer magnitude must be positive, got {}",
                    interferer.magnitude
                )));
            }
        }
        Ok(())
    }
}

/// Frames with their ground truth: one level per slot plus the clutter-only
/// background capture.
#[derive(Clone, Debug)]
pub struct LabeledFrameSequence {
    /// One frame per slot, slots numbered from 0.
    pub frames: Vec<Frame>,
    /// True liquid level per slot, meters.
    pub truth_levels: Vec<f64>,
    /// Empty-scene capture at slot -1: static clutter and noise only.
    pub background: Frame,
}

/// Mixes a base seed with a stream index so every slot gets an independent
/// noise stream; stream 0 is the background.
fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base.wrapping_add(stream.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Noise sigma per real component giving `snr_db` per complex sample
/// against a path of gain `reference_magnitude`.
fn noise_std_for_snr(snr_db: Option<f64>, reference_magnitude: f64) -> f64 {
    match snr_db {
        Some(db) => reference_magnitude * 10f64.powf(-db / 20.0) / 2f64.sqrt(),
        None => 0.0,
    }
}

/// The incremental-filling protocol: one frame per requested level, surface
/// directly below the radar, no clutter or interferers.
///
/// The surface gain is 1 and the noise sigma is set from `snr_db` against
/// it. The background capture contains noise only.
pub fn static_fill_scenario(
    config: &RadarConfig,
    geometry: &MountGeometry,
    steps: &[f64],
    snr_db: Option<f64>,
    seed: u64,
) -> Result<LabeledFrameSequence> {
    config.validate()?;
    geometry.validate()?;
    if steps.is_empty() {
        return Err(Error::InvalidParameter("static fill needs at least one level".into()));
    }
    for (t, &level) in steps.iter().enumerate() {
        if !(0.0..=geometry.max_level).contains(&level) {
            return Err(Error::InvalidParameter(format!(
                "level {level} m at step {t} leaves the fill interval [0, {}]",
                geometry.max_level
            )));
        }
    }

    let noisy = RadarConfig {
        noise_std: noise_std_for_snr(snr_db, 1.0),
        ..*config
    };
    let background = synthesize_frame(&noisy, &[], -1, derive_seed(seed, 0))?;
    let mut frames = Vec::with_capacity(steps.len());
    for (t, &level) in steps.iter().enumerate() {
        let surface = PropagationPath::new(
            PathLabel::LiquidSurface,
            FRAC_PI_2,
            geometry.level_to_tof(level),
            1.0,
        );
        frames.push(synthesize_frame(
            &noisy,
            &[surface],
            t as i64,
            derive_seed(seed, t as u64 + 1),
        )?);
    }
    Ok(LabeledFrameSequence {
        frames,
        truth_levels: steps.to_vec(),
        background,
    })
}

/// The continuous-pour protocol: per-slot frames holding the surface path
/// sampled from the level trajectory, every active interferer, and the
/// static clutter; the background capture holds clutter and noise only.
pub fn pouring_scenario(
    config: &RadarConfig,
    scenario: &ScenarioConfig,
    seed: u64,
) -> Result<LabeledFrameSequence> {
    config.validate()?;
    scenario.validate()?;

    let noisy = RadarConfig {
        noise_std: noise_std_for_snr(scenario.snr_db, scenario.surface_magnitude),
        ..*config
    };
    let background =
        synthesize_frame(&noisy, &scenario.static_clutter, -1, derive_seed(seed, 0))?;

    let mut frames = Vec::with_capacity(scenario.num_slots);
    let mut truth_levels = Vec::with_capacity(scenario.num_slots);
    for t in 0..scenario.num_slots {
        let slot = t as f64;
        let level = scenario.level.value_at(slot);
        truth_levels.push(level);

        let mut paths = Vec::new();
        if scenario.surface_magnitude > 0.0 {
            paths.push(PropagationPath::new(
                PathLabel::LiquidSurface,
                FRAC_PI_2,
                scenario.geometry.level_to_tof(level),
                scenario.surface_magnitude,
            ));
        }
        for interferer in &scenario.interferers {
            if interferer.is_active(slot) {
                paths.push(PropagationPath::new(
                    interferer.label,
                    interferer.aoa.value_at(slot),
                    interferer.tof.value_at(slot),
                    interferer.magnitude,
                ));
            }
        }
        paths.extend(scenario.static_clutter.iter().cloned());
        frames.push(synthesize_frame(
            &noisy,
            &paths,
            t as i64,
            derive_seed(seed, t as u64 + 1),
        )?);
    }
    Ok(LabeledFrameSequence {
        frames,
        truth_levels,
        background,
    })
}

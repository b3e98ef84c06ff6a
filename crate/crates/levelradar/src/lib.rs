//! Contactless liquid-level sensing with a mmWave FMCW radar.
//!
//! The crate models a downward-looking radar mounted above a container and
//! estimates the liquid level from multipath array snapshots. The pipeline:
//!
//! 1. [`radar`] synthesizes per-slot array frames from labeled propagation
//!    paths (surface echo, moving interferers, static clutter) plus
//!    reproducible complex noise.
//! 2. [`beamforming`] projects each frame onto a joint angle/delay steering
//!    grid, producing a magnitude spectrum with background subtraction,
//!    normalization, and a line-of-sight mask.
//! 3. [`tracker`] runs a trellis over the spectrum sequence, trading peak
//!    magnitude against bounded angle/delay displacement per slot, and
//!    decodes the minimum-cost surface trajectory.
//! 4. [`geometry`] converts the tracked delay into a liquid level via the
//!    mount geometry.
//!
//! [`baselines`] holds per-slot peak pickers for comparison, [`scenario`]
//! builds labeled multi-slot scenes such as a gripper pouring over the
//! container, and [`cli`] backs the `levelradar` binary with file formats
//! and subcommands.
//!
//! ```
//! use levelradar::beamforming::{build_grid, compute_spectrum, default_aoa_range, default_tof_range, static_peak};
//! use levelradar::geometry::MountGeometry;
//! use levelradar::radar::{default_config, synthesize_frame, PathLabel, PropagationPath};
//!
//! let config = default_config();
//! let geometry = MountGeometry::default();
//! let grid = build_grid(&config, 64, default_aoa_range(), default_tof_range(&geometry)).unwrap();
//!
//! let level = 0.05;
//! let surface = PropagationPath::new(
//!     PathLabel::LiquidSurface,
//!     std::f64::consts::FRAC_PI_2,
//!     geometry.level_to_tof(level),
//!     1.0,
//! );
//! let frame = synthesize_frame(&config, &[surface], 0, 42).unwrap();
//! let spectrum = compute_spectrum(&grid, &frame, true).unwrap();
//!
//! let ((_, j), _) = static_peak(&spectrum).unwrap();
//! let estimate = geometry.level_from_tof(spectrum.tof_bins[j]);
//! assert!((estimate - level).abs() < 0.005);
//! ```

pub mod baselines;
pub mod beamforming;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod radar;
pub mod scenario;
pub mod tracker;

pub use error::{Error, Result};
pub use geometry::{MountGeometry, SPEED_OF_LIGHT};
pub use radar::{default_config, synthesize_frame, Frame, PathLabel, PropagationPath, RadarConfig};

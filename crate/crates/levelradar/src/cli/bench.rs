//! Per-slot latency measurement for the spectrum plus tracker-step path.
//!
//! Frames are synthesized ahead of time into a small pool; the timed region
//! of each rep covers exactly what a live pipeline does per slot: compute
//! the spectrum, mask the line-of-sight floor, normalize, and fold the slot
//! into the tracker. Latencies are reported in microseconds over the reps
//! that follow an untimed warm-up.

use std::f64::consts::FRAC_PI_2;
use std::time::Instant;

use crate::beamforming::{
    apply_los_mask, build_grid, compute_spectrum, default_aoa_range, default_tof_range,
    normalize_spectrum, Spectrum,
};
use crate::cli::report::median;
use crate::error::{Error, Result};
use crate::geometry::{MountGeometry, SPEED_OF_LIGHT};
use crate::radar::{synthesize_frame, Frame, PathLabel, PropagationPath, RadarConfig};
use crate::tracker::{init_tracker, step, TrackerParams};

/// Workload shape and rep counts for [`run_bench`].
#[derive(Clone, Copy, Debug)]
pub struct BenchOptions {
    /// Grid side length.
    pub grid_n: usize,
    /// Array size.
    pub num_antennas: usize,
    /// Frequency points per sweep.
    pub num_freq_points: usize,
    /// Tracker window radius.
    pub q: usize,
    /// Timed reps.
    pub reps: usize,
    /// Untimed reps before measurement; at least 10 are always run.
    pub warmup: usize,
    /// Seed for the synthesized frames.
    pub seed: u64,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            grid_n: 64,
            num_antennas: 4,
            num_freq_points: 128,
            q: 5,
            reps: 1000,
            warmup: 20,
            seed: 7,
        }
    }
}

/// Latency distribution and transition-evaluation counters from one run.
#[derive(Clone, Copy, Debug)]
pub struct BenchReport {
    /// Timed reps measured.
    pub reps: usize,
    /// Fastest rep, microseconds.
    pub min_us: f64,
    /// Median rep, microseconds.
    pub median_us: f64,
    /// 99th-percentile rep, microseconds.
    pub p99_us: f64,
    /// Transition evaluations of the final tracker step.
    pub last_step_evals: u64,
    /// The `N^2 (2Q+1)^2` evaluation budget for the configured shape.
    pub eval_bound: u64,
}

/// Times `reps` slot updates of a live pipeline at the configured shape.
pub fn run_bench(options: &BenchOptions) -> Result<BenchReport> {
    if options.reps == 0 {
        return Err(Error::InvalidParameter("reps must be positive".into()));
    }
    let warmup = options.warmup.max(10);

    let geometry = MountGeometry::new(0.30, 0.12)?;
    let carrier = 61.8e9;
    let config = RadarConfig {
        carrier_frequency: carrier,
        bandwidth: 3.6e9,
        num_antennas: options.num_antennas,
        num_freq_points: options.num_freq_points,
        element_spacing: SPEED_OF_LIGHT / (2.0 * carrier),
        noise_std: 0.05,
    };
    config.validate()?;
    let grid = build_grid(
        &config,
        options.grid_n,
        default_aoa_range(),
        default_tof_range(&geometry),
    )?;
    let tof_floor = geometry.level_to_tof(geometry.max_level);
    let params = TrackerParams {
        q: options.q,
        ..TrackerParams::default()
    };
    params.validate()?;

    let pool_len = options.reps.min(32).max(2);
    let mut frames: Vec<Frame> = Vec::with_capacity(pool_len);
    for p in 0..pool_len {
        let level = 0.02 + 0.04 * p as f64 / pool_len as f64;
        let surface = PropagationPath::new(
            PathLabel::LiquidSurface,
            FRAC_PI_2,
            geometry.level_to_tof(level),
            1.0,
        );
        frames.push(synthesize_frame(
            &config,
            &[surface],
            p as i64,
            options.seed.wrapping_add(p as u64),
        )?);
    }

    let slot_spectrum = |frame: &Frame| -> Result<Spectrum> {
        let mut spectrum = compute_spectrum(&grid, frame, false)?;
        apply_los_mask(&mut spectrum, tof_floor);
        normalize_spectrum(&mut spectrum);
        Ok(spectrum)
    };

    let mut prev = slot_spectrum(&frames[0])?;
    let mut state = init_tracker(&params, std::slice::from_ref(&prev))?;

    let mut latencies = Vec::with_capacity(options.reps);
    for rep in 0..warmup + options.reps {
        let frame = &frames[(rep + 1) % pool_len];
        let start = Instant::now();
        let spectrum = slot_spectrum(frame)?;
        step(&mut state, &params, &prev, &spectrum)?;
        let elapsed_us = start.elapsed().as_secs_f64() * 1e6;
        if rep >= warmup {
            latencies.push(elapsed_us);
        }
        prev = spectrum;
    }

    latencies.sort_unstable_by(f64::total_cmp);
    let n = latencies.len();
    let p99_index = ((0.99 * n as f64).ceil() as usize).clamp(1, n) - 1;
    let side = options.grid_n as u64;
    let window = 2 * options.q as u64 + 1;
    Ok(BenchReport {
        reps: n,
        min_us: latencies[0],
        median_us: median(&latencies).unwrap_or(f64::NAN),
        p99_us: latencies[p99_index],
        last_step_evals: state.last_step_evals,
        eval_bound: side * side * window * window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::expected_transition_evals;

    fn tiny() -> BenchOptions {
        BenchOptions {
            grid_n: 8,
            num_antennas: 2,
            num_freq_points: 8,
            q: 1,
            reps: 5,
            warmup: 0,
            seed: 3,
        }
    }

    #[test]
    fn reports_ordered_percentiles_over_the_requested_reps() {
        let report = run_bench(&tiny()).unwrap();
        assert_eq!(report.reps, 5);
        assert!(report.min_us > 0.0);
        assert!(report.min_us <= report.median_us);
        assert!(report.median_us <= report.p99_us);
    }

    #[test]
    fn eval_counter_matches_the_window_formula_and_budget() {
        let report = run_bench(&tiny()).unwrap();
        assert_eq!(report.last_step_evals, expected_transition_evals(8, 1));
        assert_eq!(report.eval_bound, 64 * 9);
        assert!(report.last_step_evals <= report.eval_bound);
    }

    #[test]
    fn zero_reps_is_rejected() {
        let options = BenchOptions { reps: 0, ..tiny() };
        assert!(matches!(
            run_bench(&options),
            Err(Error::InvalidParameter(_))
        ));
    }
}

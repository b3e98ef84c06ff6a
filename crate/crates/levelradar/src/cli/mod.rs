//! Command implementations behind the `levelradar` binary.
//!
//! Each `cmd_*` function is the whole command: it reads and writes files,
//! prints its one-line results, and returns the structured outcome so
//! integration tests and examples can call commands without a subprocess.
//!
//! The pipeline run by [`cmd_track`] mirrors a live deployment. Background
//! subtraction happens outside the timed region; the per-slot latency
//! column covers spectrum computation, masking, normalization, and the
//! tracker update for that slot.

pub mod bench;
pub mod config;
pub mod framefile;
pub mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use crate::baselines::{smoothed_peak_track, BaselineParams};
use crate::beamforming::{
    apply_los_mask, build_grid, compute_spectrum, default_aoa_range, default_tof_range,
    normalize_spectrum, refine_peak, static_peak, subtract_background, Spectrum,
};
use crate::error::{Error, Result};
use crate::geometry::{MountGeometry, SPEED_OF_LIGHT};
use crate::radar::RadarConfig;
use crate::scenario::{pouring_scenario, static_fill_scenario};
use crate::tracker::{estimate_level, init_tracker, step, TrackerParams, TrackerState};
use bench::{run_bench, BenchOptions, BenchReport};
use config::{load_config, ScenarioKind};
use framefile::FrameFile;
use report::{RunReport, RunRow};

/// Which estimators a tracking run produces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Method {
    /// Per-slot argmax with sub-bin refinement.
    Peak,
    /// Magnitude-weighted mean over a trailing window of top bins.
    Smooth,
    /// Trellis tracker.
    Track,
    /// All three.
    All,
}

/// Settings for [`cmd_track`]. Array and sweep sizes come from the input
/// file; the waveform, geometry, and estimator knobs come from here.
#[derive(Clone, Debug)]
pub struct TrackOptions {
    /// Carrier frequency, Hz.
    pub carrier_frequency: f64,
    /// Sweep bandwidth, Hz.
    pub bandwidth: f64,
    /// Element spacing in meters; `None` for half the carrier wavelength.
    pub element_spacing: Option<f64>,
    /// Mount geometry.
    pub geometry: MountGeometry,
    /// Grid side length.
    pub grid_n: usize,
    /// Tracker parameters.
    pub tracker: TrackerParams,
    /// Baseline parameters.
    pub baseline: BaselineParams,
    /// Estimators to run.
    pub method: Method,
    /// Spectra folded into the tracker start; at least 1.
    pub warmup: usize,
    /// Whether spectra are normalized before tracking.
    pub normalize: bool,
    /// Whether the background capture is subtracted; when set, a file
    /// without one is an error.
    pub use_background: bool,
}

impl Default for TrackOptions {
    fn default() -> Self {
        Self {
            carrier_frequency: 61.8e9,
            bandwidth: 3.6e9,
            element_spacing: None,
            geometry: MountGeometry::new(0.30, 0.12).unwrap(),
            grid_n: 64,
            tracker: TrackerParams::default(),
            baseline: BaselineParams::default(),
            method: Method::All,
            warmup: 1,
            normalize: true,
            use_background: true,
        }
    }
}

/// Settings for [`cmd_spectrum`].
#[derive(Clone, Debug)]
pub struct SpectrumOptions {
    /// Frame to dump, numbered from 0.
    pub slot: usize,
    /// Carrier frequency, Hz.
    pub carrier_frequency: f64,
    /// Sweep bandwidth, Hz.
    pub bandwidth: f64,
    /// Element spacing in meters; `None` for half the carrier wavelength.
    pub element_spacing: Option<f64>,
    /// Mount geometry.
    pub geometry: MountGeometry,
    /// Grid side length.
    pub grid_n: usize,
    /// Whether the dumped values are normalized to a unit maximum.
    pub normalize: bool,
}

impl Default for SpectrumOptions {
    fn default() -> Self {
        Self {
            slot: 0,
            carrier_frequency: 61.8e9,
            bandwidth: 3.6e9,
            element_spacing: None,
            geometry: MountGeometry::new(0.30, 0.12).unwrap(),
            grid_n: 64,
            normalize: false,
        }
    }
}

fn radar_for_file(
    file: &FrameFile,
    carrier_frequency: f64,
    bandwidth: f64,
    element_spacing: Option<f64>,
) -> Result<RadarConfig> {
    let radar = RadarConfig {
        carrier_frequency,
        bandwidth,
        num_antennas: file.num_antennas,
        num_freq_points: file.num_freq_points,
        element_spacing: element_spacing
            .unwrap_or(SPEED_OF_LIGHT / (2.0 * carrier_frequency)),
        noise_std: 0.0,
    };
    radar.validate()?;
    Ok(radar)
}

/// Runs the scenario described by the config file and writes the frames,
/// background capture, and ground truth to `output`.
pub fn cmd_simulate(config_path: &Path, output: &Path, seed: u64) -> Result<()> {
    let sim = load_config(config_path)?;
    let sequence = match &sim.kind {
        ScenarioKind::StaticFill { levels, snr_db } => {
            static_fill_scenario(&sim.radar, &sim.geometry, levels, *snr_db, seed)?
        }
        ScenarioKind::Pour(scenario) => pouring_scenario(&sim.radar, scenario, seed)?,
    };
    FrameFile::from_sequence(&sequence).write(output)?;
    println!(
        "wrote {} frames of {} antennas x {} points (plus background and truth) to {}",
        sequence.frames.len(),
        sim.radar.num_antennas,
        sim.radar.num_freq_points,
        output.display(),
    );
    Ok(())
}

/// Replays a frame file through the selected estimators, writes the
/// per-slot CSV when `output` is given, and prints the summary line.
pub fn cmd_track(input: &Path, output: Option<&Path>, options: &TrackOptions) -> Result<RunReport> {
    let file = FrameFile::read(input)?;
    let radar = radar_for_file(
        &file,
        options.carrier_frequency,
        options.bandwidth,
        options.element_spacing,
    )?;
    options.tracker.validate()?;
    options.baseline.validate()?;
    let grid = build_grid(
        &radar,
        options.grid_n,
        default_aoa_range(),
        default_tof_range(&options.geometry),
    )?;
    let tof_floor = options.geometry.level_to_tof(options.geometry.max_level);

    let background = if options.use_background {
        Some(file.background.as_ref().ok_or(Error::MissingBackground)?)
    } else {
        None
    };

    let run_tracker = matches!(options.method, Method::Track | Method::All);
    let run_peak = matches!(options.method, Method::Peak | Method::All);
    let run_smooth = matches!(options.method, Method::Smooth | Method::All);
    let warmup = options.warmup.max(1);
    let num_slots = file.frames.len();

    let mut spectra: Vec<Spectrum> = Vec::with_capacity(num_slots);
    let mut latencies: Vec<f64> = Vec::with_capacity(num_slots);
    let mut tracker_levels: Vec<Option<f64>> = vec![None; num_slots];
    let mut state: Option<TrackerState> = None;

    for (t, frame) in file.frames.iter().enumerate() {
        let work = match background {
            Some(bg) => subtract_background(frame, bg)?,
            None => frame.clone(),
        };
        let start = Instant::now();
        let mut spectrum = compute_spectrum(&grid, &work, false)?;
        apply_los_mask(&mut spectrum, tof_floor);
        if options.normalize {
            normalize_spectrum(&mut spectrum);
        }
        spectra.push(spectrum);
        if run_tracker {
            if t + 1 == warmup {
                let started = init_tracker(&options.tracker, &spectra[..warmup])?;
                tracker_levels[t] = Some(estimate_level(&started, &options.geometry));
                state = Some(started);
            } else if t + 1 > warmup {
                let tracker = state.as_mut().expect("initialized at warmup");
                step(tracker, &options.tracker, &spectra[t - 1], &spectra[t])?;
                tracker_levels[t] = Some(estimate_level(tracker, &options.geometry));
            }
        }
        latencies.push(start.elapsed().as_secs_f64() * 1e6);
    }

    let peak_levels: Vec<Option<f64>> = if run_peak {
        spectra
            .iter()
            .map(|spectrum| {
                let (bin, _) = static_peak(spectrum)?;
                let (_, tof) = refine_peak(spectrum, bin);
                Ok(Some(options.geometry.level_from_tof(tof)))
            })
            .collect::<Result<_>>()?
    } else {
        vec![None; num_slots]
    };
    let smoothed_levels: Vec<Option<f64>> = if run_smooth {
        smoothed_peak_track(&spectra, &options.baseline)?
            .into_iter()
            .map(|(_, tof)| Some(options.geometry.level_from_tof(tof)))
            .collect()
    } else {
        vec![None; num_slots]
    };

    let rows: Vec<RunRow> = (0..num_slots)
        .map(|t| RunRow {
            slot: t as i64,
            truth: file.truth_levels.as_ref().map(|v| v[t]),
            tracker_level: tracker_levels[t],
            peak_level: peak_levels[t],
            smoothed_level: smoothed_levels[t],
            latency_us: latencies[t],
        })
        .collect();
    let run = RunReport::from_rows(rows);
    if let Some(path) = output {
        fs::write(path, run.to_csv())?;
    }
    println!("{}", run.summary_line());
    Ok(run)
}

/// The dump written by [`cmd_spectrum`]: a `(N+1) x (N+1)` CSV whose header
/// row holds the delay bin centers, whose first column holds the angle bin
/// centers, and whose corner cell is empty.
pub fn spectrum_csv(spectrum: &Spectrum) -> String {
    let n = spectrum.n();
    let mut out = String::new();
    for j in 0..n {
        let _ = write!(out, ",{}", spectrum.tof_bins[j]);
    }
    out.push('\n');
    for i in 0..n {
        let _ = write!(out, "{}", spectrum.aoa_bins[i]);
        for j in 0..n {
            let _ = write!(out, ",{}", spectrum.value(i, j));
        }
        out.push('\n');
    }
    out
}

/// Dumps the magnitude spectrum of one raw frame (no background
/// subtraction, no mask) as CSV.
pub fn cmd_spectrum(input: &Path, output: &Path, options: &SpectrumOptions) -> Result<()> {
    let file = FrameFile::read(input)?;
    if options.slot >= file.frames.len() {
        return Err(Error::SlotOutOfRange {
            slot: options.slot,
            count: file.frames.len(),
        });
    }
    let radar = radar_for_file(
        &file,
        options.carrier_frequency,
        options.bandwidth,
        options.element_spacing,
    )?;
    let grid = build_grid(
        &radar,
        options.grid_n,
        default_aoa_range(),
        default_tof_range(&options.geometry),
    )?;
    let spectrum = compute_spectrum(&grid, &file.frames[options.slot], options.normalize)?;
    fs::write(output, spectrum_csv(&spectrum))?;
    println!(
        "wrote {n} x {n} spectrum of slot {} to {}",
        options.slot,
        output.display(),
        n = options.grid_n,
    );
    Ok(())
}

/// Runs the latency benchmark and prints its results; the counter line is
/// printed only when `counters` is set.
pub fn cmd_bench(options: &BenchOptions, counters: bool) -> Result<BenchReport> {
    let bench = run_bench(options)?;
    println!(
        "bench: grid_n={} antennas={} freq_points={} q={} reps={}",
        options.grid_n, options.num_antennas, options.num_freq_points, options.q, bench.reps,
    );
    println!(
        "latency_us: min={:.1} median={:.1} p99={:.1}",
        bench.min_us, bench.median_us, bench.p99_us,
    );
    if counters {
        println!(
            "transition_evals: last_step={} bound={}",
            bench.last_step_evals, bench.eval_bound,
        );
    }
    Ok(bench)
}

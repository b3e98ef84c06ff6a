// The full pipeline on the stock pour: a gripper at 1.5x the surface
// magnitude sweeps across the surface trace while the container fills.
// Per-slot peak picking chases the gripper; the trellis tracker holds
// the surface.

use levelradar::baselines::{peak_pick_track, smoothed_peak_track, BaselineParams};
use levelradar::beamforming::{
    apply_los_mask, build_grid, compute_spectrum, default_aoa_range, default_tof_range,
    normalize_spectrum, subtract_background,
};
use levelradar::radar::default_config;
use levelradar::scenario::{pouring_scenario, ScenarioConfig};
use levelradar::tracker::{estimate_level, init_tracker, step, TrackerParams};

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    xs[xs.len() / 2]
}

fn main() {
    let config = default_config();
    let scenario = ScenarioConfig::default_pour();
    let geometry = scenario.geometry;
    let run = pouring_scenario(&config, &scenario, 7).unwrap();

    let grid = build_grid(&config, 64, default_aoa_range(), default_tof_range(&geometry)).unwrap();
    let tof_floor = geometry.level_to_tof(geometry.max_level);
    let params = TrackerParams::default();

    let mut spectra = Vec::with_capacity(run.frames.len());
    for frame in &run.frames {
        let diff = subtract_background(frame, &run.background).unwrap();
        let mut spectrum = compute_spectrum(&grid, &diff, false).unwrap();
        apply_los_mask(&mut spectrum, tof_floor);
        normalize_spectrum(&mut spectrum);
        spectra.push(spectrum);
    }

    let mut state = init_tracker(&params, &spectra[..1]).unwrap();
    let mut tracked = vec![estimate_level(&state, &geometry)];
    for t in 1..spectra.len() {
        step(&mut state, &params, &spectra[t - 1], &spectra[t]).unwrap();
        tracked.push(estimate_level(&state, &geometry));
    }

    let picked = peak_pick_track(&spectra).unwrap();
    let smoothed = smoothed_peak_track(&spectra, &BaselineParams::default()).unwrap();

    println!("slot  truth_cm  tracker_cm  peak_cm  smoothed_cm");
    for t in (0..run.frames.len()).step_by(5) {
        let peak_level = geometry.level_from_tof(spectra[t].tof_bins[picked[t].1]);
        let smoothed_level = geometry.level_from_tof(smoothed[t].1);
        println!(
            "{t:>4}  {:>8.2}  {:>10.2}  {:>7.2}  {:>11.2}",
            run.truth_levels[t] * 100.0,
            tracked[t] * 100.0,
            peak_level * 100.0,
            smoothed_level * 100.0
        );
    }

    let tracker_errs: Vec<f64> = tracked
        .iter()
        .zip(&run.truth_levels)
        .map(|(est, truth)| (est - truth).abs())
        .collect();
    let peak_errs: Vec<f64> = picked
        .iter()
        .zip(&spectra)
        .zip(&run.truth_levels)
        .map(|(((_, j), s), truth)| (geometry.level_from_tof(s.tof_bins[*j]) - truth).abs())
        .collect();
    println!(
        "median abs error: tracker {:.2} cm, peak picking {:.2} cm",
        median(tracker_errs) * 100.0,
        median(peak_errs) * 100.0
    );
}

// Incremental filling: one frame per level step, estimated by refined
// peak picking on each spectrum.

use levelradar::beamforming::{
    apply_los_mask, build_grid, compute_spectrum, default_aoa_range, default_tof_range,
    refine_peak, static_peak, subtract_background,
};
use levelradar::geometry::MountGeometry;
use levelradar::radar::default_config;
use levelradar::scenario::static_fill_scenario;

fn main() {
    let config = default_config();
    let geometry = MountGeometry::default();
    let steps: Vec<f64> = (0..16).map(|k| 0.074 * k as f64 / 15.0).collect();

    let run = static_fill_scenario(&config, &geometry, &steps, Some(20.0), 7).unwrap();
    let grid = build_grid(&config, 64, default_aoa_range(), default_tof_range(&geometry)).unwrap();
    let tof_floor = geometry.level_to_tof(geometry.max_level);

    println!("step  truth_cm  estimate_cm  error_mm");
    let mut errors = Vec::new();
    for (t, frame) in run.frames.iter().enumerate() {
        let diff = subtract_background(frame, &run.background).unwrap();
        let mut spectrum = compute_spectrum(&grid, &diff, true).unwrap();
        apply_los_mask(&mut spectrum, tof_floor);
        let (bin, _) = static_peak(&spectrum).unwrap();
        let (_, tof) = refine_peak(&spectrum, bin);
        let level = geometry.level_from_tof(tof);
        let error = level - run.truth_levels[t];
        errors.push(error.abs());
        println!(
            "{t:>4}  {:>8.2}  {:>11.2}  {:>8.2}",
            run.truth_levels[t] * 100.0,
            level * 100.0,
            error * 1000.0
        );
    }
    errors.sort_by(f64::total_cmp);
    println!("median abs error {:.2} mm", errors[errors.len() / 2] * 1000.0);
}

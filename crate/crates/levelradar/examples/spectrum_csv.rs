// Dump one slot's angle-delay magnitude spectrum as CSV, with bin
// centers on the header row and first column.

use levelradar::beamforming::{build_grid, compute_spectrum, default_aoa_range, default_tof_range};
use levelradar::cli::spectrum_csv;
use levelradar::geometry::MountGeometry;
use levelradar::radar::default_config;
use levelradar::scenario::{pouring_scenario, ScenarioConfig};

fn main() {
    let out = std::env::args()
        .nth(1)
        .unwrap_or_else(|| {
            std::env::temp_dir()
                .join("levelradar_spectrum.csv")
                .to_string_lossy()
                .into_owned()
        });

    let config = default_config();
    let scenario = ScenarioConfig::default_pour();
    let geometry = scenario.geometry;
    let run = pouring_scenario(&config, &scenario, 7).unwrap();

    let grid = build_grid(&config, 64, default_aoa_range(), default_tof_range(&geometry)).unwrap();
    let slot = 30;
    let spectrum = compute_spectrum(&grid, &run.frames[slot], false).unwrap();
    std::fs::write(&out, spectrum_csv(&spectrum)).unwrap();

    let peak = spectrum.values.iter().copied().fold(0.0f64, f64::max);
    println!(
        "slot {slot}: 64 x 64 spectrum, peak magnitude {peak:.1}, written to {out}"
    );
    println!("rows are angle bins (radians), columns delay bins (seconds)");
}

// Build a frame from a few labeled propagation paths and check the
// coherent gain of an on-grid reflector by hand.

use levelradar::beamforming::{build_grid, compute_spectrum, default_aoa_range, default_tof_range};
use levelradar::geometry::MountGeometry;
use levelradar::radar::{default_config, synthesize_frame, PathLabel, PropagationPath};

fn main() {
    let config = default_config();
    let geometry = MountGeometry::default();

    let surface = PropagationPath::new(
        PathLabel::LiquidSurface,
        std::f64::consts::FRAC_PI_2,
        geometry.level_to_tof(0.05),
        1.0,
    );
    let desktop = PropagationPath::new(PathLabel::Desktop, 110f64.to_radians(), 2.3e-9, 0.8);
    let paths = [surface, desktop];

    let frame = synthesize_frame(&config, &paths, 0, 42).unwrap();
    println!(
        "frame: {} antennas x {} freq points, {} complex samples",
        frame.num_antennas,
        frame.num_freq_points,
        frame.samples.len()
    );
    for m in 0..frame.num_antennas {
        let s = frame.sample(m, 0);
        println!("  antenna {m}, first tone: {:+.4}{:+.4}i", s.re, s.im);
    }

    // A single path steered to exactly its own grid bin sums coherently
    // to M * K.
    let grid = build_grid(&config, 64, default_aoa_range(), default_tof_range(&geometry)).unwrap();
    let i = 32;
    let j = 20;
    let lone = PropagationPath::new(
        PathLabel::Other,
        grid.aoa_bins[i],
        grid.tof_bins[j],
        1.0,
    );
    let lone_frame = synthesize_frame(&config, &[lone], 0, 0).unwrap();
    let spectrum = compute_spectrum(&grid, &lone_frame, false).unwrap();
    let mk = (config.num_antennas * config.num_freq_points) as f64;
    println!(
        "on-grid reflector at bin ({i}, {j}): peak {:.6}, M*K = {mk}",
        spectrum.value(i, j)
    );
}

// Round-trip a simulated pour through the frame file format and replay
// it with the track command, exactly as the CLI does.

use levelradar::cli::framefile::FrameFile;
use levelradar::cli::{cmd_track, TrackOptions};
use levelradar::radar::default_config;
use levelradar::scenario::{pouring_scenario, ScenarioConfig};

fn main() {
    let config = default_config();
    let scenario = ScenarioConfig::default_pour();
    let run = pouring_scenario(&config, &scenario, 7).unwrap();

    let path = std::env::temp_dir().join("levelradar_replay.rdr");
    FrameFile::from_sequence(&run).write(&path).unwrap();
    let bytes = std::fs::metadata(&path).unwrap().len();

    let file = FrameFile::read(&path).unwrap();
    println!(
        "{}: {} bytes, {} frames of {} x {}, background {}, truth {}",
        path.display(),
        bytes,
        file.frames.len(),
        file.num_antennas,
        file.num_freq_points,
        file.background.is_some(),
        file.truth_levels.is_some()
    );

    let report = cmd_track(&path, None, &TrackOptions::default()).unwrap();
    let row = &report.rows[30];
    println!(
        "slot 30: truth {:.4} m, tracker {:.4} m, peak {:.4} m",
        row.truth.unwrap(),
        row.tracker_level.unwrap(),
        row.peak_level.unwrap()
    );
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use levelradar::baselines::BaselineParams;
use levelradar::cli::bench::BenchOptions;
use levelradar::cli::{
    cmd_bench, cmd_simulate, cmd_spectrum, cmd_track, Method, SpectrumOptions, TrackOptions,
};
use levelradar::geometry::MountGeometry;
use levelradar::tracker::TrackerParams;

#[derive(Parser)]
#[command(name = "levelradar", version, about = "Radar liquid-level simulation and tracking")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RadarArgs {
    /// Carrier frequency in Hz
    #[arg(long, default_value_t = 61.8e9)]
    carrier_frequency: f64,
    /// Sweep bandwidth in Hz
    #[arg(long, default_value_t = 3.6e9)]
    bandwidth: f64,
    /// Element spacing in meters (default: half the carrier wavelength)
    #[arg(long)]
    element_spacing: Option<f64>,
    /// Radar mount height above the container bottom, meters
    #[arg(long, default_value_t = 0.30)]
    radar_height: f64,
    /// Highest trackable fill level, meters
    #[arg(long, default_value_t = 0.12)]
    max_level: f64,
}

impl RadarArgs {
    fn geometry(&self) -> levelradar::error::Result<MountGeometry> {
        MountGeometry::new(self.radar_height, self.max_level)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Synthesize a scenario from a config file into a frame file
    Simulate {
        /// Scenario config file
        config: PathBuf,
        /// Frame file to write
        output: PathBuf,
        /// Seed for noise and all random draws
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Replay a frame file through the estimators and report level errors
    Track {
        /// Frame file to replay
        input: PathBuf,
        /// Per-slot CSV to write
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        radar: RadarArgs,
        /// Grid side length
        #[arg(long, default_value_t = 64)]
        grid_n: usize,
        /// Estimators to run
        #[arg(long, value_enum, default_value_t = Method::All)]
        method: Method,
        /// Movement-penalty weight
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Angle-step weight inside the movement penalty
        #[arg(long, default_value_t = 0.1)]
        omega_theta: f64,
        /// Delay-step weight inside the movement penalty
        #[arg(long, default_value_t = 0.1)]
        omega_tau: f64,
        /// Per-slot movement cap in bins per axis
        #[arg(long, default_value_t = 5)]
        q: usize,
        /// Let the tracker choose its starting bin from the first spectrum
        #[arg(long)]
        free_start: bool,
        /// Backpointer tables kept for backtracking
        #[arg(long, default_value_t = 256)]
        history_depth: usize,
        /// Bins pooled per slot by the smoothed baseline
        #[arg(long, default_value_t = 5)]
        top_n: usize,
        /// Trailing slots pooled by the smoothed baseline
        #[arg(long, default_value_t = 3)]
        window: usize,
        /// Spectra folded into the tracker start
        #[arg(long, default_value_t = 1)]
        warmup: usize,
        /// Normalize each spectrum before tracking
        #[arg(long, action = clap::ArgAction::Set, default_value_t = true)]
        normalize: bool,
        /// Skip background subtraction
        #[arg(long)]
        no_background: bool,
    },
    /// Dump the magnitude spectrum of one frame as CSV
    Spectrum {
        /// Frame file to read
        input: PathBuf,
        /// CSV to write
        output: PathBuf,
        /// Frame to dump, numbered from 0
        #[arg(long, default_value_t = 0)]
        slot: usize,
        #[command(flatten)]
        radar: RadarArgs,
        /// Grid side length
        #[arg(long, default_value_t = 64)]
        grid_n: usize,
        /// Normalize the dumped values to a unit maximum
        #[arg(long)]
        normalize: bool,
    },
    /// Time per-slot spectrum-plus-tracker updates
    Bench {
        /// Grid side length
        #[arg(long, default_value_t = 64)]
        grid_n: usize,
        /// Array size
        #[arg(long, default_value_t = 4)]
        antennas: usize,
        /// Frequency points per sweep
        #[arg(long, default_value_t = 128)]
        freq_points: usize,
        /// Per-slot movement cap in bins per axis
        #[arg(long, default_value_t = 5)]
        q: usize,
        /// Timed reps
        #[arg(long, default_value_t = 1000)]
        reps: usize,
        /// Untimed reps before measurement
        #[arg(long, default_value_t = 20)]
        warmup: usize,
        /// Print the transition-evaluation counters
        #[arg(long)]
        counters: bool,
        /// Seed for the synthesized frames
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
}

fn run(cli: Cli) -> levelradar::error::Result<()> {
    match cli.command {
        Command::Simulate { config, output, seed } => cmd_simulate(&config, &output, seed),
        Command::Track {
            input,
            output,
            radar,
            grid_n,
            method,
            omega,
            omega_theta,
            omega_tau,
            q,
            free_start,
            history_depth,
            top_n,
            window,
            warmup,
            normalize,
            no_background,
        } => {
            let options = TrackOptions {
                carrier_frequency: radar.carrier_frequency,
                bandwidth: radar.bandwidth,
                element_spacing: radar.element_spacing,
                geometry: radar.geometry()?,
                grid_n,
                tracker: TrackerParams {
                    omega,
                    omega_theta,
                    omega_tau,
                    q,
                    free_start,
                    history_depth,
                },
                baseline: BaselineParams { top_n, window },
                method,
                warmup,
                normalize,
                use_background: !no_background,
            };
            cmd_track(&input, output.as_deref(), &options).map(|_| ())
        }
        Command::Spectrum {
            input,
            output,
            slot,
            radar,
            grid_n,
            normalize,
        } => {
            let options = SpectrumOptions {
                slot,
                carrier_frequency: radar.carrier_frequency,
                bandwidth: radar.bandwidth,
                element_spacing: radar.element_spacing,
                geometry: radar.geometry()?,
                grid_n,
                normalize,
            };
            cmd_spectrum(&input, &output, &options)
        }
        Command::Bench {
            grid_n,
            antennas,
            freq_points,
            q,
            reps,
            warmup,
            counters,
            seed,
        } => {
            let options = BenchOptions {
                grid_n,
                num_antennas: antennas,
                num_freq_points: freq_points,
                q,
                reps,
                warmup,
                seed,
            };
            cmd_bench(&options, counters).map(|_| ())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(2)
        }
    }
}

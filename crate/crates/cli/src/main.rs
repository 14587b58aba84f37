use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use trajscore::dataset::{load_recording, write_recording};
use trajscore::detection::Scenario;
use trajscore::error::{ConfigError, Error};
use trajscore::map::load_map;
use trajscore::report::{
    compare, contributing, read_detections, read_punctual, read_report, read_track_scores, top_k, write_comparison,
    write_outputs, Level, Ranked,
};
use trajscore::synthetic::{intersection_map_file, intersection_recording, SyntheticSpec};
use trajscore::{analyze, Config, ScoreKind};

#[derive(Parser)]
#[command(name = "trajscore", version, about = "Score interaction, anomaly and relevance in trajectory recordings")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScenarioArg {
    Urban,
    Highway,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScoreArg {
    Interaction,
    Anomaly,
    Relevance,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Track,
    Punctual,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one recording and write the report files.
    Analyze {
        #[arg(long)]
        tracks: PathBuf,
        #[arg(long)]
        tracks_meta: PathBuf,
        #[arg(long)]
        recording_meta: PathBuf,
        /// Semantic map JSON.
        #[arg(long)]
        map: PathBuf,
        /// TOML or JSON configuration.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the scenario of the configuration.
        #[arg(long, value_enum)]
        scenario: Option<ScenarioArg>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print the k highest scored tracks or moments of an analyzed recording.
    Top {
        #[arg(long)]
        report: PathBuf,
        #[arg(long, value_enum, default_value = "relevance")]
        score: ScoreArg,
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, value_enum, default_value = "track")]
        level: LevelArg,
    },
    /// Tabulate dataset-level scores of several analyzed recordings.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        reports: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write a synthetic intersection recording and its map.
    Generate {
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 500)]
        tracks: usize,
        /// Seconds.
        #[arg(long, default_value_t = 900.0)]
        duration: f64,
        #[arg(long, default_value_t = 25.0)]
        frame_rate: f64,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config(_) => 2,
                _ => 1,
            })
        }
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Dataset(trajscore::error::DatasetError::Io { file: path.to_path_buf(), source })
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Analyze { tracks, tracks_meta, recording_meta, map, config, scenario, out } => {
            let mut cfg = match config {
                Some(p) => Config::load(p)?,
                None => Config::default(),
            };
            if let Some(s) = scenario {
                cfg.scenario = match s {
                    ScenarioArg::Urban => Scenario::Urban,
                    ScenarioArg::Highway => Scenario::Highway,
                };
            }
            cfg.validate()?;
            let map = load_map(&map)?;
            let rec = load_recording(&tracks, &tracks_meta, &recording_meta)?;
            info!("loaded {} tracks, {} regions", rec.tracks.len(), map.regions.len());
            let a = analyze(&rec, &map, &cfg)?;
            write_outputs(&a, &out)?;
            println!(
                "recording {}: {} tracks, {} detections; interaction {:.3}, anomaly {:.3}, relevance {:.3}",
                a.recording_id,
                a.tracks.len(),
                a.detections.len(),
                a.dataset.interaction,
                a.dataset.anomaly,
                a.dataset.relevance
            );
            Ok(())
        }
        Command::Top { report, score, k, level } => {
            let which = match score {
                ScoreArg::Interaction => ScoreKind::Interaction,
                ScoreArg::Anomaly => ScoreKind::Anomaly,
                ScoreArg::Relevance => ScoreKind::Relevance,
            };
            let level = match level {
                LevelArg::Track => Level::Track,
                LevelArg::Punctual => Level::Punctual,
            };
            print_top(&report, which, level, k)
        }
        Command::Compare { reports, out } => {
            let parsed = reports.iter().map(|d| read_report(d)).collect::<Result<Vec<_>, _>>()?;
            let rows = compare(&parsed);
            write_comparison(&rows, &out)?;
            for r in &rows {
                println!(
                    "{}\t{}\tinteraction {:.3}\tanomaly {:.3}\trelevance {:.3}",
                    r.recording_id, r.location_id, r.interaction, r.anomaly, r.relevance
                );
            }
            Ok(())
        }
        Command::Generate { seed, tracks, duration, frame_rate, out } => {
            if tracks == 0 || duration <= 0.0 || frame_rate <= 0.0 {
                return Err(ConfigError::Invalid("tracks, duration and frame rate must be positive".into()).into());
            }
            let rec = intersection_recording(SyntheticSpec { seed, n_tracks: tracks, duration, frame_rate });
            std::fs::create_dir_all(&out).map_err(io_error(&out))?;
            write_recording(&rec, out.join("tracks.csv"), out.join("tracksMeta.csv"), out.join("recordingMeta.csv"))?;
            let map_path = out.join("map.json");
            let json = serde_json::to_string_pretty(&intersection_map_file()).expect("map serializes");
            std::fs::write(&map_path, json).map_err(io_error(&map_path))?;
            println!("wrote {} tracks to {}", rec.tracks.len(), out.display());
            Ok(())
        }
    }
}

fn print_top(dir: &Path, which: ScoreKind, level: Level, k: usize) -> Result<(), Error> {
    let pick = |i: f64, a: f64, r: f64| match which {
        ScoreKind::Interaction => i,
        ScoreKind::Anomaly => a,
        ScoreKind::Relevance => r,
    };
    let items: Vec<Ranked> = match level {
        Level::Track => read_track_scores(dir)?
            .into_iter()
            .map(|t| Ranked {
                track_id: t.track_id,
                frame: Some(t.peak_frame),
                score: pick(t.interaction, t.anomaly, t.relevance),
            })
            .collect(),
        Level::Punctual => read_punctual(dir)?
            .into_iter()
            .map(|p| Ranked {
                track_id: p.track_id,
                frame: Some(p.frame),
                score: pick(p.interaction, p.anomaly, p.relevance),
            })
            .collect(),
    };
    let detections = read_detections(dir)?;
    println!("rank\ttrack\tframe\t{}\tdetections", which.as_str());
    for (rank, r) in top_k(items, k).iter().enumerate() {
        let frame = r.frame.unwrap_or(0);
        let why: Vec<String> = contributing(&detections, r.track_id, frame)
            .iter()
            .map(|d| match d.partner {
                Some(p) => format!("{}#{}(with {}, {:.3})", d.kind, d.id, p, d.score),
                None => format!("{}#{}({:.3})", d.kind, d.id, d.score),
            })
            .collect();
        println!("{}\t{}\t{}\t{:.6}\t{}", rank + 1, r.track_id, frame, r.score, why.join(" "));
    }
    Ok(())
}

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use sltk::raw::{RawHeader, RawWriter};
use sltk::run::{bench, track};
use sltk::scene_file::{format_scene, load_scene};
use sltk::{pnm, scenarios, selftest, Config, Error, Format, FrameSource, Result, TraceWriter};
use sltk_core::raycast::{estimate, Algorithm};
use sltk_core::scene::render;
use sltk_core::{EdgeImage, Point};

#[derive(Parser)]
#[command(
    name = "sltk",
    version,
    about = "Markerless monocular 3D position tracker"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Track a frame stream and print one trace record per frame.
    Track(TrackArgs),
    /// Run one estimator on an edge image.
    Estimate(EstimateArgs),
    /// Render a scene file to a frame stream.
    Synth(SynthArgs),
    /// Replay the canned scenarios and check the tracker invariants.
    Selftest(ConfigArgs),
    /// Time the per-frame processing on a rendered 320x240 stream.
    Bench(BenchArgs),
}

#[derive(Args)]
struct ConfigArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long, value_name = "FILE")]
    config: Option<PathBuf>,
    /// Override one constant, e.g. `--set rays=32`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

impl ConfigArgs {
    fn load(&self) -> Result<Config> {
        let mut config = match &self.config {
            Some(path) => Config::load(path)?,
            None => Config::default(),
        };
        for o in &self.overrides {
            config.apply_override(o)?;
        }
        config.validate()?;
        Ok(config)
    }
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("source").args(["scene", "raw", "dir"])))]
struct TrackArgs {
    /// Scene file rendered on the fly.
    #[arg(long, value_name = "FILE")]
    scene: Option<PathBuf>,
    /// `SLTK` raw stream.
    #[arg(long, value_name = "FILE")]
    raw: Option<PathBuf>,
    /// Directory of numbered P6 files.
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// Frame rate used to synthesize timestamps; defaults to the stream's own
    /// rate, or 30 for a directory.
    #[arg(long)]
    fps: Option<u32>,
    #[command(flatten)]
    config: ConfigArgs,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: Format,
    /// Start CSV output with the column names.
    #[arg(long)]
    header: bool,
    /// Write an annotated working-resolution PPM per frame here.
    #[arg(long, value_name = "DIR")]
    dump: Option<PathBuf>,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

#[derive(Args)]
struct EstimateArgs {
    /// Gradient magnitude image (P5, or P6 read as luma).
    #[arg(long, value_name = "PGM")]
    edges: PathBuf,
    /// Inner point as `x,y`.
    #[arg(long, value_parser = parse_point)]
    inner: Point,
    /// One of nray, iter-nray, nyray, nyray-raster.
    #[arg(long, default_value = "nyray-raster", value_parser = parse_algorithm)]
    algo: Algorithm,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct SynthArgs {
    /// Scene file.
    scene: PathBuf,
    /// Raw stream to write.
    #[arg(short, long, value_name = "FILE", required_unless_present_any = ["dir", "print"])]
    out: Option<PathBuf>,
    /// Also (or instead) write numbered P6 files into this directory.
    #[arg(long, value_name = "DIR")]
    dir: Option<PathBuf>,
    /// Print the parsed scene with its per-frame path table.
    #[arg(long)]
    print: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Replays of the stream; each replay uses a fresh tracker.
    #[arg(long, default_value_t = 3)]
    rounds: usize,
    #[command(flatten)]
    config: ConfigArgs,
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or("expected x,y")?;
    let coord = |v: &str| v.trim().parse::<i32>().map_err(|e| format!("`{v}`: {e}"));
    Ok(Point::new(coord(x)?, coord(y)?))
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    s.parse().map_err(|_| {
        let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        format!("expected one of {}", names.join(", "))
    })
}

fn stdout_error(e: io::Error) -> Error {
    Error::Io {
        path: "<stdout>".into(),
        source: e,
    }
}

fn run_track(args: TrackArgs) -> Result<()> {
    let config = args.config.load()?;
    let stdout = io::stdout().lock();
    if args.print_config {
        let mut out = stdout;
        return out
            .write_all(config.to_text().as_bytes())
            .map_err(stdout_error);
    }
    let source = if let Some(path) = args.scene {
        let mut script = load_scene(&path)?;
        if let Some(fps) = args.fps {
            script.fps = fps;
        }
        FrameSource::Scene(Box::new(script))
    } else if let Some(path) = args.raw {
        FrameSource::Raw {
            path,
            fps: args.fps,
        }
    } else if let Some(path) = args.dir {
        FrameSource::Directory {
            path,
            fps: args.fps.unwrap_or(30),
        }
    } else {
        return Err(Error::Parse {
            origin: "track".into(),
            line: 0,
            message: "one of --scene, --raw or --dir is required".into(),
        });
    };
    let out = BufWriter::new(stdout);
    let mut writer = if args.header {
        TraceWriter::with_header(out, args.format)?
    } else {
        TraceWriter::new(out, args.format)
    };
    track(source, &config, &mut writer, args.dump.as_deref())?;
    writer.finish()?;
    Ok(())
}

fn run_estimate(args: EstimateArgs) -> Result<()> {
    let config = args.config.load()?;
    let gray = pnm::read_gray(&args.edges)?;
    let edges = EdgeImage::with_threshold(
        gray.width(),
        gray.height(),
        gray.values().to_vec(),
        config.pipeline.edge_threshold,
    )?;
    let e = estimate(args.algo, &edges, args.inner, &config.estimator)?;
    let value = json!({
        "algo": args.algo.name(),
        "centroid": [e.centroid.x, e.centroid.y],
        "area": e.area,
        "inner": [e.inner.x, e.inner.y],
        "iters": e.iterations,
        "budget_exhausted": e.budget_exhausted,
    });
    println!("{value}");
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<()> {
    let script = load_scene(&args.scene)?;
    if args.print {
        print!("{}", format_scene(&script));
    }
    let (width, height) = script.capture_dims();
    let mut raw = match &args.out {
        Some(path) => {
            let file = File::create(path).map_err(|source| Error::Io {
                path: path.clone(),
                source,
            })?;
            let header = RawHeader {
                width: width as u32,
                height: height as u32,
                fps: script.fps,
            };
            Some(RawWriter::new(BufWriter::new(file), header, path.clone())?)
        }
        None => None,
    };
    if let Some(dir) = &args.dir {
        std::fs::create_dir_all(dir).map_err(|source| Error::Io {
            path: dir.clone(),
            source,
        })?;
    }
    for (i, (frame, _)) in render(&script)?.enumerate() {
        if let Some(w) = raw.as_mut() {
            w.write(&frame)?;
        }
        if let Some(dir) = &args.dir {
            pnm::write_ppm(&dir.join(format!("{:06}.ppm", i + 1)), &frame)?;
        }
    }
    if let Some(w) = raw {
        w.finish()?;
    }
    Ok(())
}

fn run_selftest(args: ConfigArgs) -> Result<bool> {
    let config = args.load()?;
    let checks = selftest::run(&config)?;
    for c in &checks {
        let status = if c.passed { "ok" } else { "FAILED" };
        if c.detail.is_empty() {
            println!("{status:6} {:24} {}", c.scenario, c.name);
        } else {
            println!("{status:6} {:24} {} ({})", c.scenario, c.name, c.detail);
        }
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!("{} checks, {failed} failed", checks.len());
    Ok(failed == 0)
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let config = args.config.load()?;
    let script = scenarios::translating_disk().script;
    let frames: Vec<_> = render(&script)?.map(|(f, _)| f).collect();
    let (w, h) = script.capture_dims();
    let t = bench(&frames, &config, args.rounds.max(1))?;
    println!(
        "{w}x{h}, {} steps: p50 {:.3} ms, p99 {:.3} ms, max {:.3} ms",
        t.frames, t.p50_ms, t.p99_ms, t.max_ms
    );
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Track(a) => run_track(a).map(|()| true),
        Command::Estimate(a) => run_estimate(a).map(|()| true),
        Command::Synth(a) => run_synth(a).map(|()| true),
        Command::Selftest(a) => run_selftest(a),
        Command::Bench(a) => run_bench(a).map(|()| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("sltk: {e}");
            ExitCode::FAILURE
        }
    }
}

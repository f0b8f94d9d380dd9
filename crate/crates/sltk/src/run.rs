//! Driving the tracker over a frame stream.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::Instant;

use sltk_core::geometry::Point;
use sltk_core::pipeline::{sobel_edges_with_threshold, to_gray};
use sltk_core::{Frame, Rgb, StepReport, Tracker};

use crate::config::Config;
use crate::error::{IoContext, Result};
use crate::pnm;
use crate::scenarios;
use crate::source::{read_frames, FrameSource};
use crate::trace::{TraceRecord, TraceWriter};

fn mark(frame: &mut Frame, p: Point, color: Rgb) {
    let (w, h) = frame.dims();
    let pixels = frame.pixels_mut();
    for d in -3..=3i32 {
        for q in [Point::new(p.x + d, p.y), Point::new(p.x, p.y + d)] {
            if q.x >= 0 && q.y >= 0 && (q.x as usize) < w && (q.y as usize) < h {
                pixels[q.y as usize * w + q.x as usize] = color;
            }
        }
    }
}

/// The working-resolution frame with edges darkened, the centroid marked
/// green and the inner point red.
pub fn annotate(tracker: &Tracker, report: &StepReport) -> Option<Frame> {
    let mut frame = tracker.state().previous_frame.clone()?;
    let threshold = tracker.pipeline().config().edge_threshold;
    let edges = sobel_edges_with_threshold(&to_gray(&frame), threshold).ok()?;
    for (px, &m) in frame.pixels_mut().iter_mut().zip(edges.magnitudes()) {
        if m > threshold {
            *px = [px[0] / 3, px[1] / 3, px[2] / 3];
        }
    }
    if let Some(e) = report.estimate {
        mark(&mut frame, e.centroid, [0, 200, 0]);
        mark(&mut frame, e.inner, [230, 0, 0]);
    }
    Some(frame)
}

#[derive(Debug, Clone, Default)]
pub struct RunSummary {
    pub frames: usize,
    pub tracking_frames: usize,
}

/// Tracks every frame of `source`, writing one trace record per frame and,
/// when `dump` is set, an annotated PPM per frame.
pub fn track(
    source: FrameSource,
    config: &Config,
    writer: &mut TraceWriter<impl Write>,
    dump: Option<&Path>,
) -> Result<RunSummary> {
    let mut tracker = scenarios::tracker(config)?;
    if let Some(dir) = dump {
        fs::create_dir_all(dir).at(dir)?;
    }
    let mut summary = RunSummary::default();
    for (i, frame) in read_frames(source)?.enumerate() {
        let report = tracker.step(&frame?)?;
        writer.write(&TraceRecord::from_report(i, &report))?;
        summary.frames += 1;
        summary.tracking_frames += usize::from(report.output.is_some());
        if let Some(dir) = dump {
            if let Some(annotated) = annotate(&tracker, &report) {
                pnm::write_ppm(&dir.join(format!("frame_{i:06}.ppm")), &annotated)?;
            }
        }
    }
    Ok(summary)
}

/// Per-frame latency percentiles of `Tracker::step`, in milliseconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Timing {
    pub frames: usize,
    pub p50_ms: f64,
    pub p99_ms: f64,
    pub max_ms: f64,
}

fn percentile(sorted: &[f64], q: f64) -> f64 {
    let rank = (q * (sorted.len() - 1) as f64).round() as usize;
    sorted[rank]
}

/// Times every step over `rounds` replays of `frames` (already in memory),
/// each replay on a fresh tracker.
pub fn bench(frames: &[Frame], config: &Config, rounds: usize) -> Result<Timing> {
    let mut samples = Vec::with_capacity(frames.len() * rounds);
    for _ in 0..rounds {
        let mut tracker = scenarios::tracker(config)?;
        for frame in frames {
            let start = Instant::now();
            let report = tracker.step(frame)?;
            samples.push(start.elapsed().as_secs_f64() * 1e3);
            std::hint::black_box(report);
        }
    }
    samples.sort_by(f64::total_cmp);
    Ok(Timing {
        frames: samples.len(),
        p50_ms: percentile(&samples, 0.50),
        p99_ms: percentile(&samples, 0.99),
        max_ms: *samples.last().unwrap_or(&0.0),
    })
}

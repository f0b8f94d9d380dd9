//! Canned desk-scale scenarios replayed by the self test, the benchmark and
//! the acceptance suite.

use sltk_core::scene::{render, Background, BrightnessJump, GroundTruth, SceneScript, Shape};
use sltk_core::{Frame, Point, StepReport, Tracker};

use crate::config::Config;
use crate::error::Result;

pub const FPS: u32 = 30;
/// Static frames before any motion; longer than the tracker's start-up wait.
pub const LEAD_IN: usize = 70;

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: &'static str,
    pub script: SceneScript,
    /// Frame index of the event the scenario is about.
    pub event: usize,
}

fn base(frames: usize, shape: Shape, size: f64) -> SceneScript {
    let mut s = SceneScript::new(frames, shape, size);
    s.fps = FPS;
    s
}

/// Disk of radius 30 circling at 3 px per frame after the lead-in.
pub fn translating_disk() -> Scenario {
    let moving = 200;
    let mut s = base(LEAD_IN + moving, Shape::Disk, 30.0);
    s.background = Background::Uniform([240, 240, 240]);
    s.color = [10, 10, 10];
    s.noise = 12;
    s.seed = 5;
    let (cx, cy, r) = (80.0, 60.0, 25.0);
    let step = 3.0 / r;
    s.centers = (0..s.frames)
        .map(|i| {
            let a = i.saturating_sub(LEAD_IN) as f64 * step;
            (cx + r * a.cos(), cy - r * a.sin())
        })
        .collect();
    Scenario {
        name: "translating-disk",
        script: s,
        event: LEAD_IN + 1,
    }
}

/// Static noisy scene with a +40 brightness jump at frame 50. At 20 fps
/// the tracker is already searching when the jump lands.
pub fn brightness_jump() -> Scenario {
    let mut s = base(100, Shape::Disk, 30.0);
    s.fps = 20;
    s.background = Background::Uniform([150, 150, 150]);
    s.noise = 4;
    s.seed = 6;
    s.brightness_jump = Some(BrightnessJump {
        frame: 50,
        offset: 40,
    });
    Scenario {
        name: "brightness-jump",
        script: s,
        event: 50,
    }
}

/// A +40 jump landing while a target that just stopped is tracked.
pub fn brightness_jump_while_tracking() -> Scenario {
    let jump = LEAD_IN + 30;
    let mut s = base(jump + 20, Shape::Disk, 30.0);
    s.background = Background::Uniform([200, 200, 200]);
    s.color = [10, 10, 10];
    s.noise = 12;
    s.seed = 7;
    s.brightness_jump = Some(BrightnessJump {
        frame: jump,
        offset: 40,
    });
    s.centers = (0..s.frames)
        .map(|i| (45.0 + 4.0 * i.saturating_sub(LEAD_IN).min(20) as f64, 60.0))
        .collect();
    Scenario {
        name: "brightness-jump-tracking",
        script: s,
        event: jump,
    }
}

/// Bar sliding over a checkerboard that jumps 12 px in one frame.
pub fn teleport() -> Scenario {
    let jump = LEAD_IN + 14;
    let mut s = base(jump + 9, Shape::Rect { aspect: 3.0 }, 20.0);
    s.background = Background::Checker {
        cell: 40,
        a: [235, 235, 235],
        b: [130, 130, 130],
    };
    s.color = [20, 20, 20];
    s.centers = (0..s.frames)
        .map(|i| {
            let moved = i.saturating_sub(LEAD_IN) as f64 * 4.0;
            let extra = if i >= jump { 8.0 } else { 0.0 };
            (20.0 + moved + extra, 58.0)
        })
        .collect();
    Scenario {
        name: "teleport",
        script: s,
        event: jump,
    }
}

pub const GROWTH_FRAMES: usize = 100;
pub const HOLD_FRAMES: usize = 55;
/// Camera rate of the growing-disk scenario. The growth moves too few
/// pixels per frame to beat the idle threshold, so the whole growth and
/// hold must fit inside the idle timeout.
pub const GROWTH_FPS: u32 = 90;
const BURST_FRAMES: usize = 6;

/// Disk acquired by a short sideways burst, then growing from radius 20 to
/// 40 over 100 frames in place, then held. `event` is the first growth frame.
pub fn growing_disk() -> Scenario {
    growing_disk_at(GROWTH_FPS)
}

pub fn growing_disk_at(fps: u32) -> Scenario {
    // Two seconds of start-up wait plus a few settled frames.
    let lead_in = 2 * fps as usize + 10;
    let growth_start = lead_in + BURST_FRAMES;
    let mut s = base(
        growth_start + GROWTH_FRAMES + HOLD_FRAMES,
        Shape::Disk,
        20.0,
    );
    s.fps = fps;
    s.background = Background::Uniform([240, 240, 240]);
    s.color = [10, 10, 10];
    s.noise = 12;
    s.seed = 9;
    s.centers = (0..s.frames)
        .map(|i| {
            (
                62.0 + 6.0 * i.saturating_sub(lead_in).min(BURST_FRAMES) as f64,
                60.0,
            )
        })
        .collect();
    s.sizes = (0..s.frames)
        .map(|i| {
            let t = i.saturating_sub(growth_start).min(GROWTH_FRAMES) as f64 / GROWTH_FRAMES as f64;
            20.0 + 20.0 * t
        })
        .collect();
    Scenario {
        name: "growing-disk",
        script: s,
        event: growth_start,
    }
}

pub fn all() -> Vec<Scenario> {
    vec![
        translating_disk(),
        brightness_jump(),
        brightness_jump_while_tracking(),
        teleport(),
        growing_disk(),
    ]
}

pub fn tracker(config: &Config) -> Result<Tracker> {
    Ok(Tracker::new(
        config.pipeline,
        config.estimator,
        config.tracker.clone(),
    )?)
}

/// One replayed frame.
#[derive(Debug, Clone)]
pub struct Replayed {
    pub frame: Frame,
    pub truth: GroundTruth,
    pub report: StepReport,
    /// Tracker inner point after the step.
    pub inner: Option<Point>,
}

/// Renders the scenario and feeds every frame to a fresh tracker.
pub fn replay(script: &SceneScript, config: &Config) -> Result<Vec<Replayed>> {
    let mut tracker = tracker(config)?;
    render(script)?
        .map(|(frame, truth)| {
            let report = tracker.step(&frame)?;
            let inner = tracker.state().inner;
            Ok(Replayed {
                frame,
                truth,
                report,
                inner,
            })
        })
        .collect()
}

//! The five-state tracking machine and the 3D coordinate output.
//!
//! ```text
//! INITIALIZING --(init delay elapsed)--> SEARCHING
//! SEARCHING --(movement > acquire threshold)--> TRACKING
//! TRACKING --(idle / area out of range)--> SEARCHING
//! TRACKING --> VALIDATING --(color match)--> TRACKING
//!                         \--(mismatch)--> RECOVERING --> TRACKING | SEARCHING
//! ```
//!
//! VALIDATING and RECOVERING run inside the same `step` call as the TRACKING
//! estimate that triggered them, so between calls the machine always rests in
//! INITIALIZING, SEARCHING or TRACKING.

use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{Point, COMPASS};
use crate::image::{EdgeImage, Frame};
use crate::pipeline::{center_of_mass, global_movement, Pipeline, PipelineConfig};
use crate::raycast::{estimate_iter_nyray_raster, EstimatorConfig, ProjectionEstimate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Initializing,
    Searching,
    Tracking,
    Validating,
    Recovering,
}

impl Mode {
    pub const ALL: [Mode; 5] = [
        Mode::Initializing,
        Mode::Searching,
        Mode::Tracking,
        Mode::Validating,
        Mode::Recovering,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Initializing => "INITIALIZING",
            Mode::Searching => "SEARCHING",
            Mode::Tracking => "TRACKING",
            Mode::Validating => "VALIDATING",
            Mode::Recovering => "RECOVERING",
        }
    }

    /// Whether `self -> next` is an edge of the state machine graph.
    pub fn can_transition_to(self, next: Mode) -> bool {
        use Mode::*;
        matches!(
            (self, next),
            (Initializing, Searching)
                | (Searching, Tracking)
                | (Tracking, Searching)
                | (Tracking, Validating)
                | (Validating, Tracking)
                | (Validating, Recovering)
                | (Recovering, Tracking)
                | (Recovering, Searching)
        )
    }

    /// Modes a `step` call may end in.
    pub fn is_resting(self) -> bool {
        matches!(self, Mode::Initializing | Mode::Searching | Mode::Tracking)
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or(Error::InvalidConfig("unknown mode name"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coord3D {
    pub x: f64,
    pub y: f64,
    /// Relative depth, 0 at acquisition, positive when closer.
    pub z: f64,
}

impl Coord3D {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerConfig {
    /// Movement sum above which SEARCHING acquires a target.
    pub acquire_threshold: u64,
    /// Movement sum below which the scene counts as idle.
    pub idle_threshold: u64,
    pub idle_timeout_ms: u64,
    pub init_delay_ms: u64,
    pub max_area_fraction: f64,
    pub min_area_fraction: f64,
    /// Side of the square color-match window.
    pub color_window: usize,
    /// Largest L1 distance between window means that still matches.
    pub color_threshold: u32,
    pub recovery_offsets: Vec<i32>,
    /// Weight of the previous output in the exponential smoothing.
    pub smoothing: f64,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            acquire_threshold: 57_600,
            idle_threshold: 4_800,
            idle_timeout_ms: 2_000,
            init_delay_ms: 2_000,
            max_area_fraction: 0.60,
            min_area_fraction: 0.02,
            color_window: 5,
            color_threshold: 90,
            recovery_offsets: alloc::vec![10, 20],
            smoothing: 0.9,
        }
    }
}

impl TrackerConfig {
    pub fn validate(&self) -> Result<()> {
        let in_unit = |f: f64| f > 0.0 && f < 1.0;
        if !in_unit(self.max_area_fraction) || !in_unit(self.min_area_fraction) {
            return Err(Error::InvalidConfig("area fractions must lie in (0, 1)"));
        }
        if self.min_area_fraction >= self.max_area_fraction {
            return Err(Error::InvalidConfig(
                "min area fraction must be below the max",
            ));
        }
        if !(0.0..1.0).contains(&self.smoothing) {
            return Err(Error::InvalidConfig("smoothing factor must lie in [0, 1)"));
        }
        if self.color_window == 0 || self.color_window.is_multiple_of(2) {
            return Err(Error::InvalidConfig(
                "color window must be a positive odd size",
            ));
        }
        if self.recovery_offsets.iter().any(|&d| d <= 0) {
            return Err(Error::InvalidConfig("recovery offsets must be positive"));
        }
        Ok(())
    }
}

/// Channel sums and pixel count of the clamped window around `p`.
fn window_sums(frame: &Frame, p: Point, window: usize) -> ([u64; 3], u64) {
    let half = (window / 2) as i32;
    let x0 = (p.x - half).max(0) as usize;
    let y0 = (p.y - half).max(0) as usize;
    let x1 = ((p.x + half) as usize).min(frame.width() - 1);
    let y1 = ((p.y + half) as usize).min(frame.height() - 1);
    let mut sums = [0u64; 3];
    for y in y0..=y1 {
        for x in x0..=x1 {
            let px = frame.get(x, y);
            for c in 0..3 {
                sums[c] += u64::from(px[c]);
            }
        }
    }
    (sums, ((x1 - x0 + 1) * (y1 - y0 + 1)) as u64)
}

/// L1 distance between two window means, kept as an exact fraction.
#[derive(Debug, Clone, Copy)]
pub struct ColorDistance {
    num: u64,
    den: u64,
}

impl ColorDistance {
    pub fn value(self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn within(self, threshold: u32) -> bool {
        self.num <= u64::from(threshold) * self.den
    }
}

impl PartialEq for ColorDistance {
    fn eq(&self, other: &Self) -> bool {
        u128::from(self.num) * u128::from(other.den) == u128::from(other.num) * u128::from(self.den)
    }
}

impl PartialOrd for ColorDistance {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        (u128::from(self.num) * u128::from(other.den))
            .partial_cmp(&(u128::from(other.num) * u128::from(self.den)))
    }
}

/// Color distance between the windows centered at `pa` in `a` and `pb` in `b`.
pub fn color_distance(a: &Frame, pa: Point, b: &Frame, pb: Point, window: usize) -> ColorDistance {
    let (sa, na) = window_sums(a, pa, window);
    let (sb, nb) = window_sums(b, pb, window);
    let num = (0..3).map(|c| (sa[c] * nb).abs_diff(sb[c] * na)).sum();
    ColorDistance { num, den: na * nb }
}

pub fn color_match(a: &Frame, pa: Point, b: &Frame, pb: Point, cfg: &TrackerConfig) -> bool {
    color_distance(a, pa, b, pb, cfg.color_window).within(cfg.color_threshold)
}

/// Candidate points around `inner`: every configured offset (ascending) in
/// each compass direction, dropping those outside the image.
pub fn recovery_points(inner: Point, width: usize, height: usize, offsets: &[i32]) -> Vec<Point> {
    let mut offsets = offsets.to_vec();
    offsets.sort_unstable();
    let mut out = Vec::with_capacity(offsets.len() * COMPASS.len());
    for d in offsets {
        for u in COMPASS {
            let p = Point::new(inner.x + d * u.x, inner.y + d * u.y);
            if p.x >= 0 && p.y >= 0 && (p.x as usize) < width && (p.y as usize) < height {
                out.push(p);
            }
        }
    }
    out
}

/// `z = sqrt(area) - sqrt(reference)`; x and y are the centroid.
pub fn estimate_coords(centroid: Point, area: f64, reference_area: f64) -> Result<Coord3D> {
    if reference_area.is_nan() || reference_area <= 0.0 {
        return Err(Error::NonPositiveReference);
    }
    Ok(Coord3D::new(
        f64::from(centroid.x),
        f64::from(centroid.y),
        libm::sqrt(area.max(0.0)) - libm::sqrt(reference_area),
    ))
}

pub fn smooth(previous: Coord3D, new: Coord3D, factor: f64) -> Coord3D {
    let mix = |a: f64, b: f64| factor * a + (1.0 - factor) * b;
    Coord3D::new(
        mix(previous.x, new.x),
        mix(previous.y, new.y),
        mix(previous.z, new.z),
    )
}

/// Nearest non-edge pixel to `p`: `p` itself, else its 8-neighbours
/// (orthogonal first, compass order).
pub fn snap_off_edge(edges: &EdgeImage, p: Point) -> Option<Point> {
    if !edges.in_bounds(p) {
        return None;
    }
    if !edges.is_edge(p) {
        return Some(p);
    }
    [0usize, 2, 4, 6, 1, 3, 5, 7]
        .into_iter()
        .map(|i| p + COMPASS[i])
        .find(|&q| edges.in_bounds(q) && !edges.is_edge(q))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    pub mode: Mode,
    /// Inner point in `previous_frame`.
    pub inner: Option<Point>,
    /// Last preprocessed (blurred, subsampled) frame.
    pub previous_frame: Option<Frame>,
    pub reference_area: Option<f64>,
    pub smoothed: Option<Coord3D>,
    /// Start of the current run of idle frames.
    pub low_movement_since: Option<u64>,
    pub init_deadline: Option<u64>,
    pub last_timestamp: Option<u64>,
}

impl TrackerState {
    fn new() -> Self {
        Self {
            mode: Mode::Initializing,
            inner: None,
            previous_frame: None,
            reference_area: None,
            smoothed: None,
            low_movement_since: None,
            init_deadline: None,
            last_timestamp: None,
        }
    }

    fn lose_target(&mut self) {
        self.mode = Mode::Searching;
        self.inner = None;
        self.reference_area = None;
        self.smoothed = None;
        self.low_movement_since = None;
    }
}

/// Outcome of the RECOVERING state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Recovery {
    /// Best color-matching recovery point, if any matched.
    pub candidate: Option<Point>,
    /// Estimate from the candidate, present only when recovery succeeded.
    pub estimate: Option<ProjectionEstimate>,
}

/// Everything that happened during one `step`.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub timestamp_ms: u64,
    /// Modes visited, in order; the last one is where the machine rests.
    pub modes: Vec<Mode>,
    pub movement: Option<u64>,
    pub compensation: Option<u8>,
    pub estimate: Option<ProjectionEstimate>,
    pub recovery: Option<Recovery>,
    pub raw: Option<Coord3D>,
    /// Smoothed coordinates, present iff the step ended in TRACKING.
    pub output: Option<Coord3D>,
}

impl StepReport {
    fn new(timestamp_ms: u64, first: Mode) -> Self {
        Self {
            timestamp_ms,
            modes: alloc::vec![first],
            movement: None,
            compensation: None,
            estimate: None,
            recovery: None,
            raw: None,
            output: None,
        }
    }

    pub fn final_mode(&self) -> Mode {
        *self.modes.last().expect("at least one mode")
    }
}

/// Single-owner tracker: feed frames in timestamp order through [`step`].
///
/// [`step`]: Tracker::step
#[derive(Debug, Clone)]
pub struct Tracker {
    pipeline: Pipeline,
    estimator: EstimatorConfig,
    config: TrackerConfig,
    state: TrackerState,
}

impl Tracker {
    pub fn new(
        pipeline: PipelineConfig,
        estimator: EstimatorConfig,
        config: TrackerConfig,
    ) -> Result<Self> {
        estimator.validate()?;
        config.validate()?;
        Ok(Self {
            pipeline: Pipeline::new(pipeline)?,
            estimator,
            config,
            state: TrackerState::new(),
        })
    }

    pub fn state(&self) -> &TrackerState {
        &self.state
    }

    pub fn mode(&self) -> Mode {
        self.state.mode
    }

    pub fn pipeline(&self) -> &Pipeline {
        &self.pipeline
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn estimator_config(&self) -> &EstimatorConfig {
        &self.estimator
    }

    pub fn step(&mut self, frame: &Frame) -> Result<StepReport> {
        let t = frame.timestamp_ms;
        if let Some(previous) = self.state.last_timestamp {
            if t <= previous {
                return Err(Error::NonMonotonicTimestamp {
                    previous,
                    current: t,
                });
            }
        }
        self.state.last_timestamp = Some(t);
        let mut report = StepReport::new(t, self.state.mode);
        match self.state.mode {
            Mode::Initializing => self.initialize(frame, &mut report)?,
            Mode::Searching => self.search(frame, &mut report)?,
            Mode::Tracking => self.track(frame, &mut report)?,
            Mode::Validating | Mode::Recovering => unreachable!("transient modes never rest"),
        }
        debug_assert!(report.final_mode().is_resting());
        debug_assert_eq!(report.final_mode(), self.state.mode);
        Ok(report)
    }

    fn enter(&mut self, mode: Mode, report: &mut StepReport) {
        debug_assert!(report.final_mode().can_transition_to(mode));
        report.modes.push(mode);
        self.state.mode = mode;
    }

    fn initialize(&mut self, frame: &Frame, report: &mut StepReport) -> Result<()> {
        let t = frame.timestamp_ms;
        let deadline = *self
            .state
            .init_deadline
            .get_or_insert(t + self.config.init_delay_ms);
        if t < deadline {
            return Ok(());
        }
        let pre = self.pipeline.process(frame)?;
        self.state.previous_frame = Some(pre.frame);
        self.enter(Mode::Searching, report);
        Ok(())
    }

    fn search(&mut self, frame: &Frame, report: &mut StepReport) -> Result<()> {
        let pre = self.pipeline.process(frame)?;
        let previous = self
            .state
            .previous_frame
            .take()
            .expect("SEARCHING holds a previous frame");
        let diff = self.pipeline.difference(&previous, &pre.frame)?;
        let movement = global_movement(&diff);
        report.movement = Some(movement);
        report.compensation = Some(diff.compensation());
        if movement > self.config.acquire_threshold {
            let com = center_of_mass(&diff)?;
            // The acquisition estimate only fixes the reference depth.
            let reference = snap_off_edge(&pre.edges, com)
                .map(|start| estimate_iter_nyray_raster(&pre.edges, start, &self.estimator))
                .transpose()?
                .filter(|e| e.area > 0.0);
            if let Some(e) = reference {
                self.state.inner = Some(com);
                self.state.reference_area = Some(e.area);
                self.state.low_movement_since = None;
                let raw = Coord3D::new(f64::from(com.x), f64::from(com.y), 0.0);
                self.state.smoothed = Some(raw);
                report.estimate = Some(e);
                report.raw = Some(raw);
                report.output = Some(raw);
                self.enter(Mode::Tracking, report);
            }
        }
        self.state.previous_frame = Some(pre.frame);
        Ok(())
    }

    fn track(&mut self, frame: &Frame, report: &mut StepReport) -> Result<()> {
        let t = frame.timestamp_ms;
        let pre = self.pipeline.process(frame)?;
        let previous = self
            .state
            .previous_frame
            .take()
            .expect("TRACKING holds a previous frame");
        let previous_inner = self.state.inner.expect("TRACKING holds an inner point");
        let diff = self.pipeline.difference(&previous, &pre.frame)?;
        let movement = global_movement(&diff);
        report.movement = Some(movement);
        report.compensation = Some(diff.compensation());

        let idle = if movement < self.config.idle_threshold {
            let since = *self.state.low_movement_since.get_or_insert(t);
            t - since >= self.config.idle_timeout_ms
        } else {
            self.state.low_movement_since = None;
            false
        };

        let estimate = if idle {
            None
        } else {
            snap_off_edge(&pre.edges, previous_inner)
                .map(|start| estimate_iter_nyray_raster(&pre.edges, start, &self.estimator))
                .transpose()?
        };
        let screen = self.pipeline.config().screen_area() as f64;
        let estimate = estimate.filter(|e| {
            let fraction = e.area / screen;
            fraction <= self.config.max_area_fraction && fraction >= self.config.min_area_fraction
        });
        let Some(estimate) = estimate else {
            self.state.lose_target();
            self.state.previous_frame = Some(pre.frame);
            report.modes.push(Mode::Searching);
            return Ok(());
        };
        report.estimate = Some(estimate);

        self.enter(Mode::Validating, report);
        let accepted = if color_match(
            &previous,
            previous_inner,
            &pre.frame,
            estimate.inner,
            &self.config,
        ) {
            Some(estimate)
        } else {
            self.enter(Mode::Recovering, report);
            let recovery = self.recover(
                &previous,
                previous_inner,
                &pre.frame,
                &pre.edges,
                estimate.inner,
            )?;
            report.recovery = Some(recovery);
            if let Some(e) = recovery.estimate {
                report.estimate = Some(e);
            }
            recovery.estimate
        };
        match accepted {
            Some(e) => {
                let reference = self
                    .state
                    .reference_area
                    .expect("TRACKING holds a reference area");
                let raw = estimate_coords(e.centroid, e.area, reference)?;
                let out = match self.state.smoothed {
                    Some(prev) => smooth(prev, raw, self.config.smoothing),
                    None => raw,
                };
                self.state.inner = Some(e.inner);
                self.state.smoothed = Some(out);
                report.raw = Some(raw);
                report.output = Some(out);
                self.enter(Mode::Tracking, report);
            }
            None => {
                self.state.lose_target();
                report.modes.push(Mode::Searching);
            }
        }
        self.state.previous_frame = Some(pre.frame);
        Ok(())
    }

    /// Relocates a lost inner point using the recovery points around
    /// `current_inner`. Succeeds when the re-estimated inner point matches
    /// the previous inner point's color.
    pub fn recover(
        &self,
        previous: &Frame,
        previous_inner: Point,
        current: &Frame,
        edges: &EdgeImage,
        current_inner: Point,
    ) -> Result<Recovery> {
        let window = self.config.color_window;
        let mut best: Option<(Point, ColorDistance)> = None;
        for p in recovery_points(
            current_inner,
            current.width(),
            current.height(),
            &self.config.recovery_offsets,
        ) {
            let d = color_distance(previous, previous_inner, current, p, window);
            if d.within(self.config.color_threshold) && best.is_none_or(|(_, b)| d < b) {
                best = Some((p, d));
            }
        }
        let Some((candidate, _)) = best else {
            return Ok(Recovery {
                candidate: None,
                estimate: None,
            });
        };
        let estimate = match snap_off_edge(edges, candidate) {
            Some(start) => Some(estimate_iter_nyray_raster(edges, start, &self.estimator)?),
            None => None,
        }
        .filter(|e| color_match(previous, previous_inner, current, e.inner, &self.config));
        Ok(Recovery {
            candidate: Some(candidate),
            estimate,
        })
    }
}

impl Default for Tracker {
    fn default() -> Self {
        Self::new(
            PipelineConfig::default(),
            EstimatorConfig::default(),
            TrackerConfig::default(),
        )
        .expect("default configuration is valid")
    }
}

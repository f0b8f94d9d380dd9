//! Object projection feature estimators.
//!
//! Given an edge image and an inner point, each estimator returns the
//! projection centroid, an area figure and a relocated inner point. Four
//! variants share one iteration skeleton:
//!
//! * `NRay`: a single fan of `n` rays; area is the summed ray length.
//! * `IterNRay`: the fan is re-cast from the displaced inner point until the
//!   centroid and inner point stop moving.
//! * `IterNyRay`: every outer iteration re-casts `n` rays from each hit of the
//!   previous level, `y` levels deep.
//! * `IterNyRayRaster`: as above, but every `m x m` block crossed by any ray
//!   is kept in a grid that only grows; centroid and area come from the grid.
//!
//! Rays walk the 8-connected integer line of a fixed-point direction and stop
//! on the first edge pixel or at the image border.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, Result};
use crate::geometry::{div_round, mean_point, round_toward_center, LineWalk, Point, COMPASS};
use crate::image::EdgeImage;

/// Fixed-point scale of ray direction vectors.
const DIRECTION_SCALE: f64 = (1u64 << 20) as f64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    /// Rays per fan (`n`).
    pub rays: usize,
    /// Recast depth (`y`).
    pub depth: usize,
    /// Raster block size in pixels (`m`).
    pub block: usize,
    pub max_iterations: usize,
    /// Convergence threshold on centroid and inner point motion, in pixels.
    pub epsilon: f64,
    /// Hard cap on rays cast per outer iteration.
    pub ray_budget: usize,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self {
            rays: 16,
            depth: 2,
            block: 8,
            max_iterations: 10,
            epsilon: 1.0,
            ray_budget: 65_536,
        }
    }
}

impl EstimatorConfig {
    pub fn validate(&self) -> Result<()> {
        if self.rays < 4 {
            return Err(Error::InvalidConfig("ray count must be at least 4"));
        }
        if self.depth < 1 {
            return Err(Error::InvalidConfig("recast depth must be at least 1"));
        }
        if self.block < 1 {
            return Err(Error::InvalidConfig("block size must be at least 1"));
        }
        if self.max_iterations < 1 {
            return Err(Error::InvalidConfig("max iterations must be at least 1"));
        }
        if self.epsilon.is_nan() || self.epsilon <= 0.0 {
            return Err(Error::InvalidConfig("convergence epsilon must be positive"));
        }
        if self.ray_budget < self.rays {
            return Err(Error::InvalidConfig("ray budget must cover one fan"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionEstimate {
    pub centroid: Point,
    /// Summed ray length for the ray estimators, `m^2 * blocks` for raster.
    pub area: f64,
    pub inner: Point,
    pub iterations: usize,
    /// Set when some recast origins were dropped to respect the ray budget.
    pub budget_exhausted: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    NRay,
    IterNRay,
    IterNyRay,
    IterNyRayRaster,
}

impl Algorithm {
    pub const ALL: [Algorithm; 4] = [
        Algorithm::NRay,
        Algorithm::IterNRay,
        Algorithm::IterNyRay,
        Algorithm::IterNyRayRaster,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::NRay => "nray",
            Algorithm::IterNRay => "iter-nray",
            Algorithm::IterNyRay => "nyray",
            Algorithm::IterNyRayRaster => "nyray-raster",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or(Error::InvalidConfig("unknown estimator name"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RayHit {
    pub origin: Point,
    /// Index `k` of the fan direction, angle `2πk/n`.
    pub direction: usize,
    /// First edge pixel, or the last in-bounds pixel at the border.
    pub hit: Point,
    /// Last non-edge pixel before `hit` (equal to `hit` at the border).
    pub stop: Point,
}

impl RayHit {
    pub fn length(&self) -> f64 {
        self.origin.distance(self.hit)
    }
}

fn quantize(angle: f64) -> (i64, i64) {
    (
        libm::round(DIRECTION_SCALE * libm::cos(angle)) as i64,
        libm::round(-DIRECTION_SCALE * libm::sin(angle)) as i64,
    )
}

fn trace(
    edges: &EdgeImage,
    origin: Point,
    dir: (i64, i64),
    mut visit: impl FnMut(Point),
) -> (Point, Point) {
    if edges.is_edge(origin) {
        return (origin, origin);
    }
    visit(origin);
    let major = dir.0.abs().max(dir.1.abs());
    let mut stop = origin;
    let mut i = 1i64;
    loop {
        let p = Point::new(
            origin.x + div_round(i * dir.0, major) as i32,
            origin.y + div_round(i * dir.1, major) as i32,
        );
        if !edges.in_bounds(p) {
            return (stop, stop);
        }
        if edges.is_edge(p) {
            return (p, stop);
        }
        visit(p);
        stop = p;
        i += 1;
    }
}

/// `n` evenly spaced ray directions starting east and turning
/// counter-clockwise (north is `-y`).
///
/// When `n` is a multiple of 4 only the first quadrant is computed and the
/// rest are exact integer rotations of it, so a fan rotated by 90° is the
/// same fan.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fan {
    dirs: Vec<(i64, i64)>,
}

impl Fan {
    pub fn new(n: usize) -> Self {
        let angle = |k: usize| 2.0 * PI * k as f64 / n as f64;
        let dirs = if n.is_multiple_of(4) {
            let q = n / 4;
            (0..n)
                .map(|k| {
                    let (mut dx, mut dy) = quantize(angle(k % q));
                    for _ in 0..k / q {
                        (dx, dy) = (dy, -dx);
                    }
                    (dx, dy)
                })
                .collect()
        } else {
            (0..n).map(|k| quantize(angle(k))).collect()
        };
        Self { dirs }
    }

    pub fn len(&self) -> usize {
        self.dirs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dirs.is_empty()
    }

    /// Casts ray `k` from `origin`, reporting every non-edge pixel the ray
    /// runs through (origin included) to `visit`.
    pub fn cast(
        &self,
        edges: &EdgeImage,
        origin: Point,
        k: usize,
        visit: impl FnMut(Point),
    ) -> RayHit {
        let (hit, stop) = trace(edges, origin, self.dirs[k], visit);
        RayHit {
            origin,
            direction: k,
            hit,
            stop,
        }
    }
}

fn check_origin(edges: &EdgeImage, p: Point) -> Result<()> {
    if edges.in_bounds(p) {
        Ok(())
    } else {
        Err(Error::OutOfBounds { x: p.x, y: p.y })
    }
}

/// Casts one ray at `angle` radians (0 = east, counter-clockwise).
pub fn cast_ray(edges: &EdgeImage, origin: Point, angle: f64) -> Result<Point> {
    check_origin(edges, origin)?;
    Ok(trace(edges, origin, quantize(angle), |_| {}).0)
}

/// Moves `point` to the rounded mean of its fan hits.
///
/// If the mean is an edge pixel, the nearest non-edge 8-neighbour of it is
/// used instead (orthogonal before diagonal, then compass order); if there
/// is none the input point is returned.
pub fn recenter(edges: &EdgeImage, point: Point, fan: &Fan) -> Point {
    let hits = (0..fan.len()).map(|k| fan.cast(edges, point, k, |_| {}).hit);
    let Some(mean) = mean_point(hits, edges.width(), edges.height()) else {
        return point;
    };
    if !edges.is_edge(mean) {
        return mean;
    }
    // orthogonal neighbours first (distance 1), then diagonals (sqrt 2)
    [0usize, 2, 4, 6, 1, 3, 5, 7]
        .into_iter()
        .map(|i| mean + COMPASS[i])
        .find(|&p| edges.in_bounds(p) && !edges.is_edge(p))
        .unwrap_or(point)
}

/// Walks from `from` toward `to`, stopping before the first edge pixel.
pub fn displace_toward(edges: &EdgeImage, from: Point, to: Point) -> Point {
    let mut last = from;
    for p in LineWalk::new(from, to) {
        if !edges.in_bounds(p) || edges.is_edge(p) {
            return last;
        }
        last = p;
    }
    last
}

/// Set of selected `m x m` blocks. Blocks are only ever added.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockGrid {
    block: usize,
    cols: usize,
    rows: usize,
    selected: Vec<bool>,
    count: usize,
}

impl BlockGrid {
    pub fn new(width: usize, height: usize, block: usize) -> Self {
        let cols = width.div_ceil(block);
        let rows = height.div_ceil(block);
        Self {
            block,
            cols,
            rows,
            selected: vec![false; cols * rows],
            count: 0,
        }
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.cols, self.rows)
    }

    #[inline]
    pub fn select(&mut self, p: Point) {
        let i = (p.y as usize / self.block) * self.cols + p.x as usize / self.block;
        if !self.selected[i] {
            self.selected[i] = true;
            self.count += 1;
        }
    }

    pub fn is_selected(&self, bx: usize, by: usize) -> bool {
        self.selected[by * self.cols + bx]
    }

    pub fn len(&self) -> usize {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    /// `m^2` per selected block, partial border blocks included.
    pub fn area(&self) -> f64 {
        (self.block * self.block * self.count) as f64
    }

    pub fn selected(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.selected
            .iter()
            .enumerate()
            .filter(|(_, &s)| s)
            .map(|(i, _)| (i % self.cols, i / self.cols))
    }

    pub fn is_superset_of(&self, other: &BlockGrid) -> bool {
        self.selected.len() == other.selected.len()
            && self
                .selected
                .iter()
                .zip(&other.selected)
                .all(|(&a, &b)| a || !b)
    }

    /// Rounded mean of the selected block centers.
    pub fn centroid(&self, width: usize, height: usize) -> Option<Point> {
        if self.count == 0 {
            return None;
        }
        let m = self.block as i64;
        // doubled coordinates keep the half-pixel centers of even blocks exact
        let (mut sx, mut sy) = (0i64, 0i64);
        for (bx, by) in self.selected() {
            sx += 2 * bx as i64 * m + m - 1;
            sy += 2 * by as i64 * m + m - 1;
        }
        let n = 2 * self.count as i64;
        Some(Point::new(
            round_toward_center(sx, n, width) as i32,
            round_toward_center(sy, n, height) as i32,
        ))
    }
}

/// State reported after each outer iteration.
#[derive(Debug, Clone, Copy)]
pub struct IterationSnapshot<'a> {
    pub iteration: usize,
    pub centroid: Point,
    /// Inner point at the end of the iteration.
    pub inner: Point,
    pub area: f64,
    pub blocks: Option<&'a BlockGrid>,
}

struct Scratch {
    seen: Vec<bool>,
    touched: Vec<usize>,
}

impl Scratch {
    fn new(edges: &EdgeImage) -> Self {
        Self {
            seen: vec![false; edges.width() * edges.height()],
            touched: Vec::new(),
        }
    }

    fn insert(&mut self, width: usize, p: Point) -> bool {
        let i = p.y as usize * width + p.x as usize;
        if self.seen[i] {
            return false;
        }
        self.seen[i] = true;
        self.touched.push(i);
        true
    }

    fn clear(&mut self) {
        for i in self.touched.drain(..) {
            self.seen[i] = false;
        }
    }
}

struct FanLevels {
    hits: Vec<Point>,
    length: f64,
    exhausted: bool,
}

/// Casts `depth` levels of fans starting from `origin`. Level `j` is cast
/// from the deduplicated stop pixels of level `j - 1` in discovery order.
fn cast_levels(
    edges: &EdgeImage,
    origin: Point,
    fan: &Fan,
    cfg: &EstimatorConfig,
    scratch: &mut Scratch,
    mut visit: impl FnMut(Point),
) -> FanLevels {
    let n = fan.len();
    let mut origins = vec![origin];
    let mut out = FanLevels {
        hits: Vec::with_capacity(n),
        length: 0.0,
        exhausted: false,
    };
    let mut cast = 0usize;
    for level in 1..=cfg.depth {
        out.hits.clear();
        out.length = 0.0;
        let mut next = Vec::new();
        for &o in &origins {
            if cast + n > cfg.ray_budget {
                out.exhausted = true;
                break;
            }
            cast += n;
            for k in 0..n {
                let ray = fan.cast(edges, o, k, &mut visit);
                out.hits.push(ray.hit);
                out.length += ray.length();
                if level < cfg.depth && scratch.insert(edges.width(), ray.stop) {
                    next.push(ray.stop);
                }
            }
        }
        scratch.clear();
        origins = next;
    }
    out
}

/// Runs any of the four estimators, reporting each outer iteration.
pub fn estimate_observed(
    algorithm: Algorithm,
    edges: &EdgeImage,
    inner: Point,
    cfg: &EstimatorConfig,
    mut observer: impl FnMut(&IterationSnapshot<'_>),
) -> Result<ProjectionEstimate> {
    cfg.validate()?;
    check_origin(edges, inner)?;
    if edges.is_edge(inner) {
        return Err(Error::InnerOnEdge {
            x: inner.x,
            y: inner.y,
        });
    }
    let cfg = match algorithm {
        Algorithm::NRay => EstimatorConfig {
            depth: 1,
            max_iterations: 1,
            ..*cfg
        },
        Algorithm::IterNRay => EstimatorConfig { depth: 1, ..*cfg },
        Algorithm::IterNyRay | Algorithm::IterNyRayRaster => *cfg,
    };
    let fan = Fan::new(cfg.rays);
    // The recasting variants recenter inside the loop; the plain iterative
    // one only once, after it.
    let recenter_each = matches!(algorithm, Algorithm::IterNyRay | Algorithm::IterNyRayRaster);
    let mut scratch = Scratch::new(edges);
    let mut grid = (algorithm == Algorithm::IterNyRayRaster)
        .then(|| BlockGrid::new(edges.width(), edges.height(), cfg.block));

    let mut inner = inner;
    let mut previous_centroid = inner;
    let mut centroid = inner;
    let mut area = 0.0;
    let mut iterations = 0;
    let mut exhausted = false;
    while iterations < cfg.max_iterations {
        iterations += 1;
        let levels = match grid.as_mut() {
            Some(g) => cast_levels(edges, inner, &fan, &cfg, &mut scratch, |p| g.select(p)),
            None => cast_levels(edges, inner, &fan, &cfg, &mut scratch, |_| {}),
        };
        exhausted |= levels.exhausted;
        (centroid, area) = match grid.as_ref() {
            Some(g) => (
                g.centroid(edges.width(), edges.height()).unwrap_or(inner),
                g.area(),
            ),
            None => (
                mean_point(levels.hits.iter().copied(), edges.width(), edges.height())
                    .unwrap_or(inner),
                levels.length,
            ),
        };
        centroid = clamp_into(edges, centroid);
        let mut next = displace_toward(edges, inner, centroid);
        if recenter_each {
            next = recenter(edges, next, &fan);
        }
        let converged = centroid.distance(previous_centroid) < cfg.epsilon
            && next.distance(inner) < cfg.epsilon;
        previous_centroid = centroid;
        inner = next;
        observer(&IterationSnapshot {
            iteration: iterations,
            centroid,
            inner,
            area,
            blocks: grid.as_ref(),
        });
        if converged {
            break;
        }
    }
    Ok(ProjectionEstimate {
        centroid,
        area,
        inner: if recenter_each {
            inner
        } else {
            recenter(edges, inner, &fan)
        },
        iterations,
        budget_exhausted: exhausted,
    })
}

fn clamp_into(edges: &EdgeImage, p: Point) -> Point {
    Point::new(
        p.x.clamp(0, edges.width() as i32 - 1),
        p.y.clamp(0, edges.height() as i32 - 1),
    )
}

pub fn estimate(
    algorithm: Algorithm,
    edges: &EdgeImage,
    inner: Point,
    cfg: &EstimatorConfig,
) -> Result<ProjectionEstimate> {
    estimate_observed(algorithm, edges, inner, cfg, |_| {})
}

pub fn estimate_nray(
    edges: &EdgeImage,
    inner: Point,
    cfg: &EstimatorConfig,
) -> Result<ProjectionEstimate> {
    estimate(Algorithm::NRay, edges, inner, cfg)
}

pub fn estimate_iter_nray(
    edges: &EdgeImage,
    inner: Point,
    cfg: &EstimatorConfig,
) -> Result<ProjectionEstimate> {
    estimate(Algorithm::IterNRay, edges, inner, cfg)
}

pub fn estimate_iter_nyray(
    edges: &EdgeImage,
    inner: Point,
    cfg: &EstimatorConfig,
) -> Result<ProjectionEstimate> {
    estimate(Algorithm::IterNyRay, edges, inner, cfg)
}

pub fn estimate_iter_nyray_raster(
    edges: &EdgeImage,
    inner: Point,
    cfg: &EstimatorConfig,
) -> Result<ProjectionEstimate> {
    estimate(Algorithm::IterNyRayRaster, edges, inner, cfg)
}

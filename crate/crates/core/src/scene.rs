//! Deterministic synthetic scenes and the brute-force region oracle.
//!
//! Scene geometry is expressed in working-resolution pixels (160x120 by
//! default) and rasterized at `capture_scale` times that size, so replaying a
//! scene exercises the real subsampling path. Every frame comes with a ground
//! truth mask at working resolution.

use alloc::collections::VecDeque;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::image::{EdgeImage, Frame, GrayImage, Rgb};
use crate::pipeline::sobel_edges;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Background {
    Uniform(Rgb),
    /// Checkerboard of `cell`-pixel squares (working resolution).
    Checker {
        cell: usize,
        a: Rgb,
        b: Rgb,
    },
}

impl Background {
    fn color(&self, u: f64, v: f64) -> Rgb {
        match *self {
            Background::Uniform(c) => c,
            Background::Checker { cell, a, b } => {
                let cell = cell.max(1) as f64;
                let parity = (libm::floor(u / cell) + libm::floor(v / cell)) as i64;
                if parity.rem_euclid(2) == 0 {
                    a
                } else {
                    b
                }
            }
        }
    }
}

/// Object outline. The per-frame size path gives the disk radius, the square
/// or rectangle width, or the hand scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    Disk,
    Square,
    /// Rectangle of the given height-to-width ratio.
    Rect {
        aspect: f64,
    },
    Hand,
}

/// Convex pieces of the hand outline at scale 1, centered on the palm.
/// Palm, four fingers fanning upwards and a thumb pointing up-left.
const HAND_PIECES: [[(f64, f64); 4]; 6] = hand_pieces();

const fn finger(base: (f64, f64), dir: (f64, f64), width: f64, length: f64) -> [(f64, f64); 4] {
    let (px, py) = (-dir.1 * width / 2.0, dir.0 * width / 2.0);
    // start a little inside the palm so the pieces overlap
    let (bx, by) = (base.0 - 4.0 * dir.0, base.1 - 4.0 * dir.1);
    let (tx, ty) = (base.0 + length * dir.0, base.1 + length * dir.1);
    [
        (bx + px, by + py),
        (tx + px, ty + py),
        (tx - px, ty - py),
        (bx - px, by - py),
    ]
}

const fn hand_pieces() -> [[(f64, f64); 4]; 6] {
    // unit directions for -18, -6, 6 and 18 degrees from straight up, and
    // the thumb at 30 degrees above the left horizontal
    const S18: f64 = 0.309_016_994_374_947_4;
    const C18: f64 = 0.951_056_516_295_153_5;
    const S6: f64 = 0.104_528_463_267_653_5;
    const C6: f64 = 0.994_521_895_368_273_3;
    [
        [(-22.0, -10.0), (22.0, -10.0), (22.0, 28.0), (-22.0, 28.0)],
        finger((-16.5, -10.0), (-S18, -C18), 10.0, 26.0),
        finger((-5.5, -10.0), (-S6, -C6), 10.0, 30.0),
        finger((5.5, -10.0), (S6, -C6), 10.0, 30.0),
        finger((16.5, -10.0), (S18, -C18), 10.0, 24.0),
        finger((-20.0, 14.0), (-0.866_025_403_784_438_6, -0.5), 11.0, 22.0),
    ]
}

fn inside_convex(quad: &[(f64, f64); 4], x: f64, y: f64) -> bool {
    let mut sign = 0.0;
    for i in 0..4 {
        let (ax, ay) = quad[i];
        let (bx, by) = quad[(i + 1) % 4];
        let cross = (bx - ax) * (y - ay) - (by - ay) * (x - ax);
        if cross != 0.0 {
            if sign == 0.0 {
                sign = cross;
            } else if (cross > 0.0) != (sign > 0.0) {
                return false;
            }
        }
    }
    true
}

impl Shape {
    /// Whether the working-resolution point `(x, y)` is covered by the shape
    /// centered at `center` with the given size.
    pub fn contains(&self, center: (f64, f64), size: f64, x: f64, y: f64) -> bool {
        let (dx, dy) = (x - center.0, y - center.1);
        match *self {
            Shape::Disk => dx * dx + dy * dy <= size * size,
            Shape::Square => {
                let h = size / 2.0;
                (-h..h).contains(&dx) && (-h..h).contains(&dy)
            }
            Shape::Rect { aspect } => {
                let (hw, hh) = (size / 2.0, size * aspect / 2.0);
                (-hw..hw).contains(&dx) && (-hh..hh).contains(&dy)
            }
            Shape::Hand => {
                if size <= 0.0 {
                    return false;
                }
                let (ux, uy) = (dx / size, dy / size);
                HAND_PIECES.iter().any(|q| inside_convex(q, ux, uy))
            }
        }
    }

    /// Finger tip sample points of the hand at scale 1 (relative to the palm
    /// center), index finger to thumb. Points sit a few pixels inside the tip.
    pub fn hand_finger_points() -> [(f64, f64); 5] {
        let mut out = [(0.0, 0.0); 5];
        for (slot, quad) in out.iter_mut().zip(&HAND_PIECES[1..]) {
            let tip = ((quad[1].0 + quad[2].0) / 2.0, (quad[1].1 + quad[2].1) / 2.0);
            let base = ((quad[0].0 + quad[3].0) / 2.0, (quad[0].1 + quad[3].1) / 2.0);
            let len = libm::hypot(tip.0 - base.0, tip.1 - base.1);
            let t = 6.0 / len;
            *slot = (tip.0 + (base.0 - tip.0) * t, tip.1 + (base.1 - tip.1) * t);
        }
        out
    }
}

/// Axis-aligned occluder in working-resolution pixels, `[x0, x1) x [y0, y1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Occlusion {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
    pub color: Rgb,
}

impl Occlusion {
    fn covers(&self, u: f64, v: f64) -> bool {
        (self.x0..self.x1).contains(&u) && (self.y0..self.y1).contains(&v)
    }
}

/// Uniform brightness offset applied from `frame` onwards.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BrightnessJump {
    pub frame: usize,
    pub offset: i16,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Keyframe {
    pub frame: usize,
    pub x: f64,
    pub y: f64,
    pub size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneScript {
    pub frames: usize,
    pub fps: u32,
    pub width: usize,
    pub height: usize,
    pub capture_scale: usize,
    pub background: Background,
    pub shape: Shape,
    pub color: Rgb,
    /// Per-frame object center, working resolution.
    pub centers: Vec<(f64, f64)>,
    /// Per-frame radius, side or scale.
    pub sizes: Vec<f64>,
    /// Uniform per-channel noise amplitude.
    pub noise: u8,
    pub brightness_jump: Option<BrightnessJump>,
    /// Motion blur kernel length in sub-positions; 0 or 1 disables it.
    pub motion_blur: usize,
    pub occlusions: Vec<Occlusion>,
    pub seed: u64,
}

impl SceneScript {
    /// A script with a static object at the frame center and no effects.
    pub fn new(frames: usize, shape: Shape, size: f64) -> Self {
        Self {
            frames,
            fps: 30,
            width: 160,
            height: 120,
            capture_scale: 2,
            background: Background::Uniform([230, 230, 230]),
            shape,
            color: [20, 20, 20],
            centers: vec![(80.0, 60.0); frames],
            sizes: vec![size; frames],
            noise: 0,
            brightness_jump: None,
            motion_blur: 0,
            occlusions: Vec::new(),
            seed: 0,
        }
    }

    /// Replaces the paths with a linear interpolation of `keys`, holding the
    /// first and last keyframe outside their range.
    pub fn with_keyframes(mut self, keys: &[Keyframe]) -> Result<Self> {
        let (centers, sizes) = expand_keyframes(keys, self.frames)?;
        self.centers = centers;
        self.sizes = sizes;
        Ok(self)
    }

    pub fn capture_dims(&self) -> (usize, usize) {
        (
            self.width * self.capture_scale,
            self.height * self.capture_scale,
        )
    }

    pub fn timestamp_ms(&self, index: usize) -> u64 {
        index as u64 * 1000 / u64::from(self.fps)
    }

    pub fn validate(&self) -> Result<()> {
        if self.fps == 0 {
            return Err(Error::InvalidConfig("fps must be positive"));
        }
        if self.capture_scale == 0 || self.width < 3 || self.height < 3 {
            return Err(Error::InvalidConfig(
                "scene resolution must be at least 3x3",
            ));
        }
        if self.centers.len() != self.frames || self.sizes.len() != self.frames {
            return Err(Error::InvalidConfig(
                "path length must equal the frame count",
            ));
        }
        for (i, &(x, y)) in self.centers.iter().enumerate() {
            let ok = x >= 0.0 && y >= 0.0 && x < self.width as f64 && y < self.height as f64;
            if !ok || self.sizes[i].is_nan() || self.sizes[i] < 0.0 {
                return Err(Error::PathOutOfBounds { frame: i });
            }
        }
        Ok(())
    }
}

/// Per-frame centers and sizes.
pub type Path = (Vec<(f64, f64)>, Vec<f64>);

pub fn expand_keyframes(keys: &[Keyframe], frames: usize) -> Result<Path> {
    if keys.is_empty() {
        return Err(Error::InvalidConfig("path needs at least one keyframe"));
    }
    if keys.windows(2).any(|w| w[1].frame <= w[0].frame) {
        return Err(Error::InvalidConfig(
            "keyframes must be strictly increasing",
        ));
    }
    let mut centers = Vec::with_capacity(frames);
    let mut sizes = Vec::with_capacity(frames);
    for i in 0..frames {
        let after = keys.iter().position(|k| k.frame >= i);
        let (x, y, s) = match after {
            None => {
                let k = keys[keys.len() - 1];
                (k.x, k.y, k.size)
            }
            Some(0) => (keys[0].x, keys[0].y, keys[0].size),
            Some(j) => {
                let (a, b) = (keys[j - 1], keys[j]);
                let t = (i - a.frame) as f64 / (b.frame - a.frame) as f64;
                (
                    a.x + (b.x - a.x) * t,
                    a.y + (b.y - a.y) * t,
                    a.size + (b.size - a.size) * t,
                )
            }
        };
        centers.push((x, y));
        sizes.push(s);
    }
    Ok((centers, sizes))
}

/// Exact object footprint at working resolution.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
    /// Mean of mask pixels, absent when nothing is visible.
    pub centroid: Option<(f64, f64)>,
    pub area: usize,
}

impl GroundTruth {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0
            && p.y >= 0
            && (p.x as usize) < self.width
            && (p.y as usize) < self.height
            && self.mask[p.y as usize * self.width + p.x as usize]
    }
}

fn mix(a: Rgb, b: Rgb, covered: usize, total: usize) -> Rgb {
    let mut out = [0u8; 3];
    for c in 0..3 {
        let v = usize::from(a[c]) * (total - covered) + usize::from(b[c]) * covered;
        out[c] = ((v + total / 2) / total) as u8;
    }
    out
}

/// Iterator over the rendered `(Frame, GroundTruth)` pairs of a script.
#[derive(Debug, Clone)]
pub struct SceneFrames<'a> {
    script: &'a SceneScript,
    index: usize,
}

pub fn render(script: &SceneScript) -> Result<SceneFrames<'_>> {
    script.validate()?;
    Ok(SceneFrames { script, index: 0 })
}

/// Renders frame `i` of a validated script.
///
/// # Panics
///
/// If `i` is not below the frame count or the script does not validate.
pub fn render_frame(s: &SceneScript, i: usize) -> (Frame, GroundTruth) {
    let scale = s.capture_scale;
    let (cw, ch) = s.capture_dims();
    let center = s.centers[i];
    let size = s.sizes[i];
    let blur = s.motion_blur.max(1);
    let prev = if i == 0 { center } else { s.centers[i - 1] };
    let positions: Vec<(f64, f64)> = (1..=blur)
        .map(|j| {
            let t = j as f64 / blur as f64;
            (
                prev.0 + (center.0 - prev.0) * t,
                prev.1 + (center.1 - prev.1) * t,
            )
        })
        .collect();
    let offset = (scale as f64 - 1.0) / 2.0;
    let mut rng =
        ChaCha8Rng::seed_from_u64(s.seed ^ (i as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let noise = i16::from(s.noise);
    let jump = s
        .brightness_jump
        .filter(|j| i >= j.frame)
        .map_or(0, |j| j.offset);

    let mut pixels = Vec::with_capacity(cw * ch);
    for py in 0..ch {
        let v = (py as f64 - offset) / scale as f64;
        for px in 0..cw {
            let u = (px as f64 - offset) / scale as f64;
            let mut color = match s.occlusions.iter().find(|o| o.covers(u, v)) {
                Some(o) => o.color,
                None => {
                    let covered = positions
                        .iter()
                        .filter(|&&c| s.shape.contains(c, size, u, v))
                        .count();
                    mix(s.background.color(u, v), s.color, covered, blur)
                }
            };
            if noise > 0 || jump != 0 {
                for c in &mut color {
                    let n = if noise > 0 {
                        rng.random_range(-noise..=noise)
                    } else {
                        0
                    };
                    *c = (i16::from(*c) + n + jump).clamp(0, 255) as u8;
                }
            }
            pixels.push(color);
        }
    }
    let frame = Frame::new(cw, ch, pixels, s.timestamp_ms(i)).expect("scene dimensions validated");

    let (w, h) = (s.width, s.height);
    let mut mask = vec![false; w * h];
    let (mut sx, mut sy, mut area) = (0.0, 0.0, 0usize);
    for y in 0..h {
        for x in 0..w {
            let (u, v) = (x as f64, y as f64);
            if s.shape.contains(center, size, u, v) && !s.occlusions.iter().any(|o| o.covers(u, v))
            {
                mask[y * w + x] = true;
                sx += u;
                sy += v;
                area += 1;
            }
        }
    }
    let centroid = (area > 0).then(|| (sx / area as f64, sy / area as f64));
    (
        frame,
        GroundTruth {
            width: w,
            height: h,
            mask,
            centroid,
            area,
        },
    )
}

impl Iterator for SceneFrames<'_> {
    type Item = (Frame, GroundTruth);

    fn next(&mut self) -> Option<Self::Item> {
        if self.index >= self.script.frames {
            return None;
        }
        let out = render_frame(self.script, self.index);
        self.index += 1;
        Some(out)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = self.script.frames - self.index;
        (left, Some(left))
    }
}

/// Region grown from an inner point over non-edge pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleRegion {
    pub width: usize,
    pub height: usize,
    pub mask: Vec<bool>,
    pub centroid: (f64, f64),
    pub area: usize,
}

impl OracleRegion {
    pub fn contains(&self, p: Point) -> bool {
        p.x >= 0
            && p.y >= 0
            && (p.x as usize) < self.width
            && (p.y as usize) < self.height
            && self.mask[p.y as usize * self.width + p.x as usize]
    }
}

/// 4-connected flood fill over non-edge pixels starting at `inner`.
pub fn flood_fill_oracle(edges: &EdgeImage, inner: Point) -> Result<OracleRegion> {
    if !edges.in_bounds(inner) {
        return Err(Error::OutOfBounds {
            x: inner.x,
            y: inner.y,
        });
    }
    if edges.is_edge(inner) {
        return Err(Error::InnerOnEdge {
            x: inner.x,
            y: inner.y,
        });
    }
    let (w, h) = (edges.width(), edges.height());
    let mut mask = vec![false; w * h];
    let mut queue = VecDeque::new();
    mask[inner.y as usize * w + inner.x as usize] = true;
    queue.push_back(inner);
    let (mut sx, mut sy, mut area) = (0u64, 0u64, 0usize);
    while let Some(p) = queue.pop_front() {
        sx += p.x as u64;
        sy += p.y as u64;
        area += 1;
        for d in [
            Point::new(0, -1),
            Point::new(1, 0),
            Point::new(0, 1),
            Point::new(-1, 0),
        ] {
            let q = p + d;
            if !edges.in_bounds(q) {
                continue;
            }
            let i = q.y as usize * w + q.x as usize;
            if !mask[i] && !edges.is_edge(q) {
                mask[i] = true;
                queue.push_back(q);
            }
        }
    }
    Ok(OracleRegion {
        width: w,
        height: h,
        mask,
        centroid: (sx as f64 / area as f64, sy as f64 / area as f64),
        area,
    })
}

/// Edge image of an annulus `radius <= d < radius + thickness` around
/// `center`; thick enough rings are airtight for 8-connected rays.
pub fn ring_edges(
    width: usize,
    height: usize,
    center: (f64, f64),
    radius: f64,
    thickness: f64,
) -> EdgeImage {
    EdgeImage::from_fn(width, height, |x, y| {
        let d = libm::hypot(x as f64 - center.0, y as f64 - center.1);
        d >= radius && d < radius + thickness
    })
    .expect("ring image dimensions")
}

/// Sobel edges of a binary mask rendered as black on white.
pub fn mask_edges(width: usize, height: usize, mask: &[bool]) -> EdgeImage {
    let gray = GrayImage::new(
        width,
        height,
        mask.iter().map(|&m| if m { 0 } else { 255 }).collect(),
    )
    .expect("mask dimensions");
    sobel_edges(&gray).expect("mask at least 3x3")
}

/// Working-resolution mask of a shape, without any effects.
pub fn shape_mask(
    width: usize,
    height: usize,
    shape: Shape,
    center: (f64, f64),
    size: f64,
) -> Vec<bool> {
    let mut mask = Vec::with_capacity(width * height);
    for y in 0..height {
        for x in 0..width {
            mask.push(shape.contains(center, size, x as f64, y as f64));
        }
    }
    mask
}

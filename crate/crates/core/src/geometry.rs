//! Integer pixel geometry shared by the estimators and the tracker.

use core::ops::{Add, Sub};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Point {
    pub x: i32,
    pub y: i32,
}

impl Point {
    pub const fn new(x: i32, y: i32) -> Self {
        Self { x, y }
    }

    pub fn distance(self, other: Point) -> f64 {
        libm::sqrt(self.distance_sq(other) as f64)
    }

    pub fn distance_sq(self, other: Point) -> i64 {
        let dx = i64::from(self.x - other.x);
        let dy = i64::from(self.y - other.y);
        dx * dx + dy * dy
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, rhs: Point) -> Point {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, rhs: Point) -> Point {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

/// Compass directions in the fixed enumeration order used throughout the
/// tracker. `y` grows downwards, so north is `(0, -1)`.
pub const COMPASS: [Point; 8] = [
    Point::new(0, -1),
    Point::new(1, -1),
    Point::new(1, 0),
    Point::new(1, 1),
    Point::new(0, 1),
    Point::new(-1, 1),
    Point::new(-1, 0),
    Point::new(-1, -1),
];

/// Integer division rounding half away from zero. `den` must be positive.
///
/// Odd symmetry (`div_round(-a, b) == -div_round(a, b)`) is what keeps the
/// line walks and offset means exactly equivariant under 90° rotations.
pub fn div_round(num: i64, den: i64) -> i64 {
    debug_assert!(den > 0);
    let q = (2 * num.abs() + den) / (2 * den);
    if num < 0 {
        -q
    } else {
        q
    }
}

/// Rounds `num / den` to the nearest integer (`den > 0`). Exact halves are
/// broken toward the center of an axis of `extent` pixels, and upwards when
/// they sit on it.
///
/// Breaking ties toward the center rather than always up makes the rounding
/// commute with mirroring the axis, which is what 90° rotations of a square
/// image do to one of the coordinates.
pub fn round_toward_center(num: i64, den: i64, extent: usize) -> i64 {
    debug_assert!(den > 0);
    let floor = num.div_euclid(den);
    let rem2 = 2 * num.rem_euclid(den);
    if rem2 != den {
        return if rem2 < den { floor } else { floor + 1 };
    }
    // tie at floor + 1/2; compare doubled coordinates with the doubled center
    if 2 * floor + 1 > extent as i64 - 1 {
        floor
    } else {
        floor + 1
    }
}

/// Rounded mean position of `points` inside a `width x height` image.
pub fn mean_point<I>(points: I, width: usize, height: usize) -> Option<Point>
where
    I: IntoIterator<Item = Point>,
{
    let (mut sx, mut sy, mut count) = (0i64, 0i64, 0i64);
    for p in points {
        sx += i64::from(p.x);
        sy += i64::from(p.y);
        count += 1;
    }
    (count > 0).then(|| {
        Point::new(
            round_toward_center(sx, count, width) as i32,
            round_toward_center(sy, count, height) as i32,
        )
    })
}

/// Pixels of the 8-connected integer line from `from` (exclusive) to `to`
/// (inclusive).
///
/// Step `i` of `n = max(|dx|, |dy|)` lands on `from + round(i * d / n)`, so
/// the major axis advances exactly one pixel per step.
#[derive(Debug, Clone)]
pub struct LineWalk {
    from: Point,
    dx: i64,
    dy: i64,
    steps: i64,
    i: i64,
}

impl LineWalk {
    pub fn new(from: Point, to: Point) -> Self {
        let dx = i64::from(to.x - from.x);
        let dy = i64::from(to.y - from.y);
        Self {
            from,
            dx,
            dy,
            steps: dx.abs().max(dy.abs()),
            i: 0,
        }
    }
}

impl Iterator for LineWalk {
    type Item = Point;

    fn next(&mut self) -> Option<Point> {
        if self.i >= self.steps {
            return None;
        }
        self.i += 1;
        Some(Point::new(
            self.from.x + div_round(self.i * self.dx, self.steps) as i32,
            self.from.y + div_round(self.i * self.dy, self.steps) as i32,
        ))
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let left = (self.steps - self.i) as usize;
        (left, Some(left))
    }
}

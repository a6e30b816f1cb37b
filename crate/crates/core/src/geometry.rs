//! Deployments, rectangular regions, distances, free-space path gains, and
//! region discretization.
//!
//! Everything here is pure 2-D geometry: APs are treated as points (antenna
//! aperture extent is ignored) and the free-space path gain between two
//! points at distance `d` is `1/d²`. The uncertainty region where the
//! backscatter device may lie is an axis-aligned rectangle; boundary
//! sampling and interior partitioning are the only shape-dependent
//! operations and both live in this module.
//!
//! # Text format
//!
//! [`Deployment`] and region rectangles round-trip through a line-oriented
//! `key = value` format. `#` starts a comment, values are whitespace-separated
//! decimal numbers in meters:
//!
//! ```text
//! # deployment
//! antennas_per_ap = 8
//! coverage = 15 15 30 30    # center_x center_y width height
//! ap = 1.5 2.25             # one line per AP
//! ap = 10 4
//! ```
//!
//! A region file contains a single `region = center_x center_y width height`
//! line.

use crate::{Error, Result};

/// A point in the deployment plane, in meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// Euclidean distance between two points.
pub fn distance(a: Point, b: Point) -> f64 {
    let dx = a.x - b.x;
    let dy = a.y - b.y;
    (dx * dx + dy * dy).sqrt()
}

/// Free-space path gain `1/d²` between an AP and a backscatter device.
///
/// Fails with [`Error::DegenerateGeometry`] when the two points coincide;
/// the model diverges there and co-located geometry is rejected rather than
/// clamped.
pub fn path_gain(ap: Point, bd: Point) -> Result<f64> {
    let d = distance(ap, bd);
    if d == 0.0 {
        return Err(Error::DegenerateGeometry(format!(
            "backscatter device co-located with an AP at ({}, {})",
            ap.x, ap.y
        )));
    }
    Ok(1.0 / (d * d))
}

/// An axis-aligned rectangle described by its center and side lengths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rectangle {
    pub center: Point,
    pub width: f64,
    pub height: f64,
}

impl Rectangle {
    /// Build a rectangle, rejecting non-positive or non-finite dimensions.
    pub fn new(center: Point, width: f64, height: f64) -> Result<Self> {
        if !center.is_finite() || !width.is_finite() || !height.is_finite() {
            return Err(Error::InvalidArgument(
                "rectangle parameters must be finite".into(),
            ));
        }
        if width <= 0.0 || height <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "rectangle sides must be positive (got {width} x {height})"
            )));
        }
        Ok(Self {
            center,
            width,
            height,
        })
    }

    /// Square helper used throughout the experiments.
    pub fn square(center: Point, side: f64) -> Result<Self> {
        Self::new(center, side, side)
    }

    pub fn xmin(&self) -> f64 {
        self.center.x - self.width / 2.0
    }

    pub fn xmax(&self) -> f64 {
        self.center.x + self.width / 2.0
    }

    pub fn ymin(&self) -> f64 {
        self.center.y - self.height / 2.0
    }

    pub fn ymax(&self) -> f64 {
        self.center.y + self.height / 2.0
    }

    pub fn perimeter(&self) -> f64 {
        2.0 * (self.width + self.height)
    }

    /// Corners in counter-clockwise order starting at `(xmin, ymin)`.
    pub fn corners(&self) -> [Point; 4] {
        [
            Point::new(self.xmin(), self.ymin()),
            Point::new(self.xmax(), self.ymin()),
            Point::new(self.xmax(), self.ymax()),
            Point::new(self.xmin(), self.ymax()),
        ]
    }

    /// Whether `p` lies inside the rectangle, within `tol` meters.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        p.x >= self.xmin() - tol
            && p.x <= self.xmax() + tol
            && p.y >= self.ymin() - tol
            && p.y <= self.ymax() + tol
    }

    /// Project `p` onto the rectangle by clamping each coordinate.
    pub fn clamp(&self, p: Point) -> Point {
        Point::new(
            p.x.clamp(self.xmin(), self.xmax()),
            p.y.clamp(self.ymin(), self.ymax()),
        )
    }

    /// Distance from `p` to the rectangle (zero for interior points).
    pub fn exterior_distance(&self, p: Point) -> f64 {
        distance(p, self.clamp(p))
    }
}

/// A cell-free deployment: AP positions, a common antenna count, and the
/// coverage area the APs live in.
#[derive(Debug, Clone)]
pub struct Deployment {
    ap_positions: Vec<Point>,
    antennas_per_ap: usize,
    coverage: Rectangle,
}

impl Deployment {
    /// Build a deployment.
    ///
    /// Requires at least two APs (one emitter and one reader), pairwise
    /// distinct AP positions, and at least one antenna per AP.
    pub fn new(
        ap_positions: Vec<Point>,
        antennas_per_ap: usize,
        coverage: Rectangle,
    ) -> Result<Self> {
        if ap_positions.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a deployment needs at least 2 APs (got {})",
                ap_positions.len()
            )));
        }
        if antennas_per_ap < 1 {
            return Err(Error::InvalidArgument(
                "antennas_per_ap must be at least 1".into(),
            ));
        }
        for (i, p) in ap_positions.iter().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidArgument(format!(
                    "AP {i} has non-finite coordinates"
                )));
            }
            for (j, q) in ap_positions.iter().enumerate().skip(i + 1) {
                if p == q {
                    return Err(Error::InvalidArgument(format!(
                        "APs {i} and {j} share the position ({}, {})",
                        p.x, p.y
                    )));
                }
            }
        }
        Ok(Self {
            ap_positions,
            antennas_per_ap,
            coverage,
        })
    }

    pub fn ap_positions(&self) -> &[Point] {
        &self.ap_positions
    }

    pub fn ap(&self, index: usize) -> Point {
        self.ap_positions[index]
    }

    pub fn num_aps(&self) -> usize {
        self.ap_positions.len()
    }

    pub fn antennas_per_ap(&self) -> usize {
        self.antennas_per_ap
    }

    pub fn coverage(&self) -> Rectangle {
        self.coverage
    }
}

/// Index of the AP nearest to `p`; equidistant APs resolve to the lowest
/// index so results are deterministic.
pub fn nearest_ap(dep: &Deployment, p: Point) -> usize {
    let mut best = 0;
    let mut best_d = distance(dep.ap(0), p);
    for (i, &ap) in dep.ap_positions().iter().enumerate().skip(1) {
        let d = distance(ap, p);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Sample the rectangle perimeter at spacing at most `step`, walking the
/// edges counter-clockwise from `(xmin, ymin)`. Each corner appears exactly
/// once; each edge is divided into `ceil(edge / step)` equal segments.
pub fn boundary_points(r: &Rectangle, step: f64) -> Result<Vec<Point>> {
    if step.is_nan() || step <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "boundary step must be positive (got {step})"
        )));
    }
    if step > r.width.min(r.height) {
        return Err(Error::InvalidArgument(format!(
            "boundary step {step} exceeds the shortest side {}",
            r.width.min(r.height)
        )));
    }
    let corners = r.corners();
    let mut points = Vec::new();
    for e in 0..4 {
        let a = corners[e];
        let b = corners[(e + 1) % 4];
        let len = distance(a, b);
        let segments = (len / step).ceil() as usize;
        for i in 0..segments {
            let f = i as f64 / segments as f64;
            points.push(Point::new(a.x + f * (b.x - a.x), a.y + f * (b.y - a.y)));
        }
    }
    Ok(points)
}

/// Centroids of a uniform `nx` by `ny` partition of the rectangle.
///
/// All centroids are strictly interior. Panics if `nx` or `ny` is zero.
pub fn partition_centroids(r: &Rectangle, nx: usize, ny: usize) -> Vec<Point> {
    assert!(nx >= 1 && ny >= 1, "partition counts must be at least 1");
    let cell_w = r.width / nx as f64;
    let cell_h = r.height / ny as f64;
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            points.push(Point::new(
                r.xmin() + (i as f64 + 0.5) * cell_w,
                r.ymin() + (j as f64 + 0.5) * cell_h,
            ));
        }
    }
    points
}

fn parse_numbers(key: &str, value: &str, expected: usize) -> Result<Vec<f64>> {
    let nums: Vec<f64> = value
        .split_whitespace()
        .map(|tok| {
            tok.parse::<f64>()
                .map_err(|_| Error::Parse(format!("`{key}`: `{tok}` is not a number")))
        })
        .collect::<Result<_>>()?;
    if nums.len() != expected {
        return Err(Error::Parse(format!(
            "`{key}` expects {expected} numbers, got {}",
            nums.len()
        )));
    }
    Ok(nums)
}

/// Split a `key = value` line, stripping comments and blank lines.
pub(crate) fn split_key_value(line: &str) -> Result<Option<(String, String)>> {
    let line = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    }
    .trim();
    if line.is_empty() {
        return Ok(None);
    }
    let (key, value) = line
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected `key = value`, got `{line}`")))?;
    Ok(Some((key.trim().to_string(), value.trim().to_string())))
}

/// Parse a deployment from the documented text format.
pub fn parse_deployment(text: &str) -> Result<Deployment> {
    let mut antennas = None;
    let mut coverage = None;
    let mut aps = Vec::new();
    for line in text.lines() {
        let Some((key, value)) = split_key_value(line)? else {
            continue;
        };
        match key.as_str() {
            "antennas_per_ap" => {
                antennas = Some(value.parse::<usize>().map_err(|_| {
                    Error::Parse(format!("`antennas_per_ap`: `{value}` is not an integer"))
                })?);
            }
            "coverage" => {
                let n = parse_numbers("coverage", &value, 4)?;
                coverage = Some(Rectangle::new(Point::new(n[0], n[1]), n[2], n[3])?);
            }
            "ap" => {
                let n = parse_numbers("ap", &value, 2)?;
                aps.push(Point::new(n[0], n[1]));
            }
            other => {
                return Err(Error::Parse(format!("unknown deployment key `{other}`")));
            }
        }
    }
    let antennas =
        antennas.ok_or_else(|| Error::Parse("missing `antennas_per_ap` line".into()))?;
    let coverage = coverage.ok_or_else(|| Error::Parse("missing `coverage` line".into()))?;
    Deployment::new(aps, antennas, coverage)
}

/// Serialize a deployment to the documented text format.
pub fn deployment_to_text(dep: &Deployment) -> String {
    let mut out = String::new();
    out.push_str(&format!("antennas_per_ap = {}\n", dep.antennas_per_ap()));
    let c = dep.coverage();
    out.push_str(&format!(
        "coverage = {} {} {} {}\n",
        c.center.x, c.center.y, c.width, c.height
    ));
    for p in dep.ap_positions() {
        out.push_str(&format!("ap = {} {}\n", p.x, p.y));
    }
    out
}

/// Parse a region rectangle from a `region = cx cy width height` line.
pub fn parse_region(text: &str) -> Result<Rectangle> {
    let mut region = None;
    for line in text.lines() {
        let Some((key, value)) = split_key_value(line)? else {
            continue;
        };
        match key.as_str() {
            "region" => {
                let n = parse_numbers("region", &value, 4)?;
                region = Some(Rectangle::new(Point::new(n[0], n[1]), n[2], n[3])?);
            }
            other => return Err(Error::Parse(format!("unknown region key `{other}`"))),
        }
    }
    region.ok_or_else(|| Error::Parse("missing `region` line".into()))
}

/// Serialize a region rectangle to the text format accepted by
/// [`parse_region`].
pub fn region_to_text(r: &Rectangle) -> String {
    format!(
        "region = {} {} {} {}\n",
        r.center.x, r.center.y, r.width, r.height
    )
}

//! Trapezoidal-pyramid sensing model.
//!
//! A camera mounted at height `z` above the ground plane, aimed along azimuth
//! `theta` and tilted by `gamma` from the nadir, sees a frustum whose
//! intersection with `z = 0` is an isosceles trapezoid. The near edge lies at
//! ground distance `z·tan(gamma - beta)` from the foot point `P'`, the far edge
//! at `z·tan(gamma + beta)`, and both edges are bounded by the horizontal
//! half-angle `alpha`.

use std::f64::consts::{FRAC_PI_2, TAU};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("invalid model parameters: {0}")]
    Params(String),
    #[error("pose outside the trapezoid regime: {0}")]
    Pose(String),
}

/// Shared optics of every node: horizontal/vertical half field of view and
/// the tilt ceiling, all in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub k_max: f64,
}

impl ModelParams {
    pub fn new(alpha: f64, beta: f64, k_max: f64) -> Result<Self, DomainError> {
        let params = Self { alpha, beta, k_max };
        params.validate()?;
        Ok(params)
    }

    pub fn from_degrees(alpha: f64, beta: f64, k_max: f64) -> Result<Self, DomainError> {
        Self::new(alpha.to_radians(), beta.to_radians(), k_max.to_radians())
    }

    pub fn validate(&self) -> Result<(), DomainError> {
        let Self { alpha, beta, k_max } = *self;
        if !(alpha > 0.0 && alpha < FRAC_PI_2) {
            return Err(DomainError::Params(format!(
                "alpha must lie in (0, 90) degrees, got {:.6}",
                alpha.to_degrees()
            )));
        }
        if !(beta > 0.0 && beta < FRAC_PI_2) {
            return Err(DomainError::Params(format!(
                "beta must lie in (0, 90) degrees, got {:.6}",
                beta.to_degrees()
            )));
        }
        if !(beta <= k_max) {
            return Err(DomainError::Params(format!(
                "beta ({:.6} deg) exceeds the maximum tilt K ({:.6} deg)",
                beta.to_degrees(),
                k_max.to_degrees()
            )));
        }
        if !(k_max + beta < FRAC_PI_2) {
            return Err(DomainError::Params(format!(
                "K + beta must stay below 90 degrees, got {:.6}",
                (k_max + beta).to_degrees()
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance(&self, other: &Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Position, azimuth and tilt of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensorPose {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Azimuth of the sensing direction, normalized to `[0, 2π)`.
    pub theta: f64,
    pub gamma: f64,
}

impl SensorPose {
    pub fn new(x: f64, y: f64, z: f64, theta: f64, gamma: f64) -> Self {
        Self {
            x,
            y,
            z,
            theta: normalize_angle(theta),
            gamma,
        }
    }

    /// Ground projection `P'` of the mount point.
    pub fn ground(&self) -> Point2 {
        Point2::new(self.x, self.y)
    }

    pub fn with_gamma(self, gamma: f64) -> Self {
        Self { gamma, ..self }
    }

    pub fn with_ground(self, ground: Point2, theta: f64) -> Self {
        Self::new(ground.x, ground.y, self.z, theta, self.gamma)
    }

    /// Unit horizontal sensing direction.
    pub fn direction(&self) -> (f64, f64) {
        (self.theta.cos(), self.theta.sin())
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn normalize_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Projected ground trapezoid of one node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Footprint {
    pub p_prime: Point2,
    /// Ground distance from `P'` to the near edge midpoint `Q1`.
    pub near: f64,
    /// Ground distance from `P'` to the far edge midpoint `Q2`.
    pub far: f64,
    pub d1: f64,
    pub d2: f64,
    /// `[D1, D2, D3, D4]`: near corners at azimuth `theta - alpha` and
    /// `theta + alpha`, then far corners at `theta + alpha` and `theta - alpha`.
    pub vertices: [Point2; 4],
    pub area: f64,
    pub height: f64,
}

impl Footprint {
    pub fn near_width(&self) -> f64 {
        self.vertices[0].distance(&self.vertices[1])
    }

    pub fn far_width(&self) -> f64 {
        self.vertices[2].distance(&self.vertices[3])
    }

    pub fn q1(&self) -> Point2 {
        midpoint(&self.vertices[0], &self.vertices[1])
    }

    pub fn q2(&self) -> Point2 {
        midpoint(&self.vertices[2], &self.vertices[3])
    }

    /// Area centroid of the quadrilateral (also valid for the degenerate
    /// triangle when the near edge collapses onto `P'`).
    pub fn centroid(&self) -> Point2 {
        let v = &self.vertices;
        let (mut a2, mut cx, mut cy) = (0.0, 0.0, 0.0);
        for i in 0..4 {
            let (p, q) = (v[i], v[(i + 1) % 4]);
            // shift to P' for conditioning
            let (px, py) = (p.x - self.p_prime.x, p.y - self.p_prime.y);
            let (qx, qy) = (q.x - self.p_prime.x, q.y - self.p_prime.y);
            let cross = px * qy - qx * py;
            a2 += cross;
            cx += (px + qx) * cross;
            cy += (py + qy) * cross;
        }
        if a2.abs() < f64::MIN_POSITIVE {
            return self.q2();
        }
        Point2::new(
            self.p_prime.x + cx / (3.0 * a2),
            self.p_prime.y + cy / (3.0 * a2),
        )
    }

    /// Axis-aligned bounding box `(min, max)` of the vertices.
    pub fn bounds(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.vertices {
            lo.x = lo.x.min(v.x);
            lo.y = lo.y.min(v.y);
            hi.x = hi.x.max(v.x);
            hi.y = hi.y.max(v.y);
        }
        (lo, hi)
    }
}

fn midpoint(a: &Point2, b: &Point2) -> Point2 {
    Point2::new(0.5 * (a.x + b.x), 0.5 * (a.y + b.y))
}

/// Ground-plane distances of the footprint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NearFar {
    pub near: f64,
    pub far: f64,
    pub d1: f64,
    pub d2: f64,
}

fn check_pose(pose: &SensorPose, params: &ModelParams) -> Result<(), DomainError> {
    if !(pose.z > 0.0) {
        return Err(DomainError::Pose(format!("height must be positive, got {}", pose.z)));
    }
    if pose.gamma < params.beta {
        return Err(DomainError::Pose(format!(
            "tilt {:.6} deg is below beta {:.6} deg",
            pose.gamma.to_degrees(),
            params.beta.to_degrees()
        )));
    }
    if pose.gamma + params.beta >= FRAC_PI_2 {
        return Err(DomainError::Pose(format!(
            "tilt + beta = {:.6} deg reaches the horizon",
            (pose.gamma + params.beta).to_degrees()
        )));
    }
    Ok(())
}

pub fn near_far(pose: &SensorPose, params: &ModelParams) -> Result<NearFar, DomainError> {
    check_pose(pose, params)?;
    let near = pose.z * (pose.gamma - params.beta).tan();
    let far = pose.z * (pose.gamma + params.beta).tan();
    let cos_a = params.alpha.cos();
    Ok(NearFar {
        near,
        far,
        d1: near / cos_a,
        d2: far / cos_a,
    })
}

pub fn footprint(pose: &SensorPose, params: &ModelParams) -> Result<Footprint, DomainError> {
    let NearFar { near, far, d1, d2 } = near_far(pose, params)?;
    let tan_a = params.alpha.tan();
    let near_width = 2.0 * near * tan_a;
    let far_width = 2.0 * far * tan_a;
    let height = far - near;
    let area = 0.5 * height * (near_width + far_width);

    let p = pose.ground();
    let (ux, uy) = pose.direction();
    // left-hand normal of the sensing direction, i.e. towards theta + alpha
    let (vx, vy) = (-uy, ux);
    let corner = |along: f64, across: f64| {
        Point2::new(p.x + along * ux + across * vx, p.y + along * uy + across * vy)
    };
    let vertices = [
        corner(near, -near * tan_a),
        corner(near, near * tan_a),
        corner(far, far * tan_a),
        corner(far, -far * tan_a),
    ];
    Ok(Footprint {
        p_prime: p,
        near,
        far,
        d1,
        d2,
        vertices,
        area,
        height,
    })
}

/// Frustum volume `S·z`. Debug builds also evaluate the slant-distance form
/// `(z/2)(d2 + d1)(d2 - d1)·sin 2α` and assert agreement.
pub fn volume(pose: &SensorPose, params: &ModelParams) -> Result<f64, DomainError> {
    let fp = footprint(pose, params)?;
    let v = fp.area * pose.z;
    debug_assert!({
        let alt = volume_from_slant(pose.z, fp.d1, fp.d2, params.alpha);
        (v - alt).abs() <= 1e-9 * v.max(1.0)
    });
    Ok(v)
}

/// Volume from the near/far slant distances.
pub fn volume_from_slant(z: f64, d1: f64, d2: f64, alpha: f64) -> f64 {
    0.5 * z * (d2 + d1) * (d2 - d1) * (2.0 * alpha).sin()
}

/// Which region `covers_point` tests against.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Hash)]
pub enum PredicateMode {
    /// Exact trapezoid `D1D2D3D4`.
    #[default]
    Quad,
    /// Angular sector restricted to `d1 <= |P'A| <= d2`.
    Annular,
}

impl std::str::FromStr for PredicateMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "quad" => Ok(Self::Quad),
            "annular" => Ok(Self::Annular),
            other => Err(format!("unknown predicate mode `{other}` (expected quad|annular)")),
        }
    }
}

impl std::fmt::Display for PredicateMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Quad => "quad",
            Self::Annular => "annular",
        })
    }
}

/// Boundary slack for the predicate comparisons, scaled by footprint size.
const REL_EPS: f64 = 1e-12;

/// Point-coverage test against a precomputed footprint.
pub fn footprint_covers(
    fp: &Footprint,
    theta: f64,
    alpha: f64,
    mode: PredicateMode,
    a: Point2,
) -> bool {
    let eps = REL_EPS * (1.0 + fp.d2);
    let (dx, dy) = (a.x - fp.p_prime.x, a.y - fp.p_prime.y);
    let dist = dx.hypot(dy);
    let along = dx * theta.cos() + dy * theta.sin();
    if along + eps < dist * alpha.cos() {
        return false;
    }
    match mode {
        // the ray P'->A crosses line D1D2 at along == near and D3D4 at along == far
        PredicateMode::Quad => along + eps >= fp.near && along <= fp.far + eps,
        PredicateMode::Annular => dist + eps >= fp.d1 && dist <= fp.d2 + eps,
    }
}

pub fn covers_point(
    pose: &SensorPose,
    params: &ModelParams,
    mode: PredicateMode,
    a: Point2,
) -> Result<bool, DomainError> {
    let fp = footprint(pose, params)?;
    Ok(footprint_covers(&fp, pose.theta, params.alpha, mode, a))
}

/// Signed shoelace area of a simple polygon (positive when counterclockwise).
pub fn signed_polygon_area(points: &[Point2]) -> f64 {
    let n = points.len();
    if n < 3 {
        return 0.0;
    }
    let o = points[0];
    let mut acc = 0.0;
    for i in 1..n - 1 {
        let (p, q) = (points[i], points[i + 1]);
        acc += (p.x - o.x) * (q.y - o.y) - (q.x - o.x) * (p.y - o.y);
    }
    0.5 * acc
}

//! Analytic domain descriptions with exact distance, metric projection,
//! inner normal and interior-sphere radius, plus the normal ball sitting at
//! depth along the inner normal from a boundary anchor.
//!
//! Supported shapes keep the distance function exact (to fp accuracy): the
//! distance weight d^s enters every diagnostic, so discretizing it would
//! pollute all error budgets.

use crate::error::{FracError, Result};

pub type Point = [f64; 2];

/// Bounded open domain with a C^{1,1} boundary. One-dimensional domains are
/// intervals; two-dimensional ones are balls, stadiums (rectangle capped by
/// half-discs) and ellipses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Domain {
    /// (center - half_length, center + half_length) in dimension 1.
    Interval { center: f64, half_length: f64 },
    Ball { center: Point, radius: f64 },
    /// Straight segment of half-length `a` along the x-axis through `center`,
    /// thickened by `cap_radius`.
    Stadium { center: Point, a: f64, cap_radius: f64 },
    /// Semi-axes a >= b > 0.
    Ellipse { center: Point, a: f64, b: f64 },
}

impl Domain {
    pub fn interval(center: f64, half_length: f64) -> Result<Self> {
        if half_length <= 0.0 {
            return Err(FracError::Geometry("interval half-length must be positive".into()));
        }
        Ok(Domain::Interval { center, half_length })
    }

    pub fn ball(center: Point, radius: f64) -> Result<Self> {
        if radius <= 0.0 {
            return Err(FracError::Geometry("ball radius must be positive".into()));
        }
        Ok(Domain::Ball { center, radius })
    }

    pub fn stadium(center: Point, a: f64, cap_radius: f64) -> Result<Self> {
        if a <= 0.0 || cap_radius <= 0.0 {
            return Err(FracError::Geometry("stadium parameters must be positive".into()));
        }
        Ok(Domain::Stadium { center, a, cap_radius })
    }

    pub fn ellipse(center: Point, a: f64, b: f64) -> Result<Self> {
        if !(a >= b && b > 0.0) {
            return Err(FracError::Geometry("ellipse needs a >= b > 0".into()));
        }
        if a / b > 16.0 {
            return Err(FracError::Geometry("ellipse aspect ratio above 16 is unsupported".into()));
        }
        Ok(Domain::Ellipse { center, a, b })
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            _ => 2,
        }
    }

    /// Axis-aligned bounds of the closure.
    pub fn bounds(&self) -> ([f64; 2], [f64; 2]) {
        match *self {
            Domain::Interval { center, half_length } => {
                ([center - half_length, 0.0], [center + half_length, 0.0])
            }
            Domain::Ball { center, radius } => {
                ([center[0] - radius, center[1] - radius], [center[0] + radius, center[1] + radius])
            }
            Domain::Stadium { center, a, cap_radius } => (
                [center[0] - a - cap_radius, center[1] - cap_radius],
                [center[0] + a + cap_radius, center[1] + cap_radius],
            ),
            Domain::Ellipse { center, a, b } => {
                ([center[0] - a, center[1] - b], [center[0] + a, center[1] + b])
            }
        }
    }

    /// Distance to the complement: positive inside, zero outside.
    pub fn distance(&self, x: Point) -> f64 {
        match *self {
            Domain::Interval { center, half_length } => {
                (half_length - (x[0] - center).abs()).max(0.0)
            }
            Domain::Ball { center, radius } => (radius - dist2(x, center)).max(0.0),
            Domain::Stadium { center, a, cap_radius } => {
                (cap_radius - self.segment_distance(x, center, a)).max(0.0)
            }
            Domain::Ellipse { .. } => {
                if !self.contains(x) {
                    0.0
                } else {
                    let (bp, _) = self.ellipse_closest_boundary(x);
                    dist2(x, bp)
                }
            }
        }
    }

    /// Strict interior test.
    pub fn contains(&self, x: Point) -> bool {
        match *self {
            Domain::Interval { center, half_length } => (x[0] - center).abs() < half_length,
            Domain::Ball { center, radius } => dist2(x, center) < radius,
            Domain::Stadium { center, a, cap_radius } => {
                self.segment_distance(x, center, a) < cap_radius
            }
            Domain::Ellipse { center, a, b } => {
                let u = (x[0] - center[0]) / a;
                let v = (x[1] - center[1]) / b;
                u * u + v * v < 1.0
            }
        }
    }

    /// Half the maximal radius R such that every boundary point is touched by
    /// a ball B_{2R} contained in the domain. Closed form per shape kind.
    pub fn interior_sphere_radius(&self) -> f64 {
        match *self {
            Domain::Interval { half_length, .. } => half_length / 2.0,
            Domain::Ball { radius, .. } => radius / 2.0,
            Domain::Stadium { cap_radius, .. } => cap_radius / 2.0,
            // The uniform tangent-ball radius of an ellipse is the minimal
            // radius of curvature b^2/a, attained at the major-axis tips.
            Domain::Ellipse { a, b, .. } => (b * b / a).min(b) / 2.0,
        }
    }

    /// Nearest boundary point. Uniqueness holds up to the cut-locus distance,
    /// which for the supported shapes is twice the interior-sphere radius;
    /// beyond it the projection is not guaranteed unique and errors.
    pub fn metric_projection(&self, x: Point) -> Result<Point> {
        let d = self.distance(x);
        if d >= 2.0 * self.interior_sphere_radius() {
            return Err(FracError::Precondition(format!(
                "metric projection not guaranteed unique: d = {d:.6} >= {:.6}",
                2.0 * self.interior_sphere_radius()
            )));
        }
        Ok(match *self {
            Domain::Interval { center, half_length } => {
                if x[0] >= center {
                    [center + half_length, 0.0]
                } else {
                    [center - half_length, 0.0]
                }
            }
            Domain::Ball { center, radius } => {
                let r = dist2(x, center);
                if r == 0.0 {
                    [center[0] + radius, center[1]]
                } else {
                    let t = radius / r;
                    [center[0] + (x[0] - center[0]) * t, center[1] + (x[1] - center[1]) * t]
                }
            }
            Domain::Stadium { center, a, cap_radius } => {
                let q = nearest_on_segment(x, center, a);
                let r = dist2(x, q);
                if r == 0.0 {
                    [q[0], q[1] + cap_radius]
                } else {
                    let t = cap_radius / r;
                    [q[0] + (x[0] - q[0]) * t, q[1] + (x[1] - q[1]) * t]
                }
            }
            Domain::Ellipse { .. } => self.ellipse_closest_boundary(x).0,
        })
    }

    /// Inner unit normal at a boundary point.
    pub fn inner_normal(&self, x0: Point) -> Result<[f64; 2]> {
        if self.boundary_offset(x0).abs() > 1e-9 {
            return Err(FracError::Precondition(format!(
                "inner_normal: ({}, {}) is not on the boundary",
                x0[0], x0[1]
            )));
        }
        Ok(match *self {
            Domain::Interval { center, .. } => {
                if x0[0] > center {
                    [-1.0, 0.0]
                } else {
                    [1.0, 0.0]
                }
            }
            Domain::Ball { center, .. } => normalize([center[0] - x0[0], center[1] - x0[1]]),
            Domain::Stadium { center, a, .. } => {
                let q = nearest_on_segment(x0, center, a);
                normalize([q[0] - x0[0], q[1] - x0[1]])
            }
            Domain::Ellipse { center, a, b } => {
                let g = [(x0[0] - center[0]) / (a * a), (x0[1] - center[1]) / (b * b)];
                let n = normalize(g);
                [-n[0], -n[1]]
            }
        })
    }

    /// A boundary point addressed by t in [0,1). For intervals, t < 0.5 is the
    /// left endpoint and t >= 0.5 the right one; 2-d shapes use arc-length-like
    /// parameterizations.
    pub fn boundary_point(&self, t: f64) -> Point {
        let t = t.rem_euclid(1.0);
        match *self {
            Domain::Interval { center, half_length } => {
                if t < 0.5 {
                    [center - half_length, 0.0]
                } else {
                    [center + half_length, 0.0]
                }
            }
            Domain::Ball { center, radius } => {
                let ang = 2.0 * std::f64::consts::PI * t;
                [center[0] + radius * ang.cos(), center[1] + radius * ang.sin()]
            }
            Domain::Stadium { center, a, cap_radius } => {
                let pi = std::f64::consts::PI;
                let per = 4.0 * a + 2.0 * pi * cap_radius;
                let mut sarc = t * per;
                if sarc < 2.0 * a {
                    return [center[0] - a + sarc, center[1] + cap_radius];
                }
                sarc -= 2.0 * a;
                if sarc < pi * cap_radius {
                    // right cap, angle from pi/2 down to -pi/2
                    let phi = pi / 2.0 - sarc / cap_radius;
                    return [center[0] + a + cap_radius * phi.cos(), center[1] + cap_radius * phi.sin()];
                }
                sarc -= pi * cap_radius;
                if sarc < 2.0 * a {
                    return [center[0] + a - sarc, center[1] - cap_radius];
                }
                sarc -= 2.0 * a;
                // left cap, angle from -pi/2 down to -3pi/2
                let phi = -pi / 2.0 - sarc / cap_radius;
                [center[0] - a + cap_radius * phi.cos(), center[1] + cap_radius * phi.sin()]
            }
            Domain::Ellipse { center, a, b } => {
                let ang = 2.0 * std::f64::consts::PI * t;
                [center[0] + a * ang.cos(), center[1] + b * ang.sin()]
            }
        }
    }

    /// Signed boundary offset: negative inside, positive outside. Exact for
    /// interval/ball/stadium, a smooth equivalent for the ellipse; used only
    /// for on-boundary tests.
    pub fn boundary_offset(&self, x: Point) -> f64 {
        match *self {
            Domain::Interval { center, half_length } => (x[0] - center).abs() - half_length,
            Domain::Ball { center, radius } => dist2(x, center) - radius,
            Domain::Stadium { center, a, cap_radius } => {
                self.segment_distance(x, center, a) - cap_radius
            }
            Domain::Ellipse { center, a, b } => {
                let u = (x[0] - center[0]) / a;
                let v = (x[1] - center[1]) / b;
                ((u * u + v * v).sqrt() - 1.0) * b
            }
        }
    }

    fn segment_distance(&self, x: Point, center: Point, a: f64) -> f64 {
        dist2(x, nearest_on_segment(x, center, a))
    }

    /// Closest boundary point of an ellipse and its parameter angle. Dense
    /// angular scan plus Newton polish on the stationarity equation;
    /// deterministic, accurate to ~1e-13.
    fn ellipse_closest_boundary(&self, x: Point) -> (Point, f64) {
        let (center, a, b) = match *self {
            Domain::Ellipse { center, a, b } => (center, a, b),
            _ => unreachable!(),
        };
        let px = x[0] - center[0];
        let py = x[1] - center[1];
        let mut best_t = 0.0;
        let mut best_d = f64::INFINITY;
        const SCAN: usize = 256;
        for k in 0..SCAN {
            let t = 2.0 * std::f64::consts::PI * (k as f64) / (SCAN as f64);
            let dx = a * t.cos() - px;
            let dy = b * t.sin() - py;
            let d = dx * dx + dy * dy;
            if d < best_d {
                best_d = d;
                best_t = t;
            }
        }
        let mut t = best_t;
        for _ in 0..40 {
            let (st, ct) = t.sin_cos();
            let ex = a * ct - px;
            let ey = b * st - py;
            let g = -ex * a * st + ey * b * ct;
            let dg = a * a * st * st - ex * a * ct + b * b * ct * ct - ey * b * st;
            if dg.abs() < 1e-300 {
                break;
            }
            let step = g / dg;
            t -= step;
            if step.abs() < 1e-15 {
                break;
            }
        }
        ([center[0] + a * t.cos(), center[1] + b * t.sin()], t)
    }
}

/// Ball of radius R/4 placed at depth 7R/4 along the inner normal from a
/// boundary anchor; it lies between the spheres of radii 3R/2 and 2R around
/// the anchor and keeps distance at least 3R/2 from the boundary.
#[derive(Debug, Clone)]
pub struct NormalBall {
    pub center: Point,
    pub radius: f64,
    pub anchor: Point,
    pub scale: f64,
    dim: usize,
}

impl NormalBall {
    /// Requires R < rho/4. Both placement invariants are re-verified by dense
    /// sampling after construction; a violation reports which one failed.
    pub fn new(domain: &Domain, anchor: Point, scale_r: f64) -> Result<Self> {
        let rho = domain.interior_sphere_radius();
        if !(scale_r > 0.0 && scale_r < rho / 4.0) {
            return Err(FracError::Precondition(format!(
                "normal ball needs 0 < R < rho/4 = {:.6}, got R = {scale_r:.6}",
                rho / 4.0
            )));
        }
        let nu = domain.inner_normal(anchor)?;
        let depth = 7.0 * scale_r / 4.0;
        let center = [anchor[0] + depth * nu[0], anchor[1] + depth * nu[1]];
        let ball = NormalBall {
            center,
            radius: scale_r / 4.0,
            anchor,
            scale: scale_r,
            dim: domain.dim(),
        };
        ball.verify(domain)?;
        Ok(ball)
    }

    pub fn contains(&self, x: Point) -> bool {
        dist2(x, self.center) <= self.radius
    }

    fn verify(&self, domain: &Domain) -> Result<()> {
        let r = self.scale;
        let tol = 1e-9 * r;
        let mut min_d = f64::INFINITY;
        let mut max_anchor = 0.0f64;
        let mut min_anchor = f64::INFINITY;
        for q in self.sample(512) {
            let da = dist2(q, self.anchor);
            min_anchor = min_anchor.min(da);
            max_anchor = max_anchor.max(da);
            min_d = min_d.min(domain.distance(q));
        }
        if max_anchor > 2.0 * r + tol || min_anchor < 1.5 * r - tol {
            return Err(FracError::Geometry(format!(
                "normal ball escapes the annulus [3R/2, 2R] around the anchor: \
                 [{min_anchor:.6}, {max_anchor:.6}] vs R = {r:.6}"
            )));
        }
        if min_d < 1.5 * r - tol {
            return Err(FracError::Geometry(format!(
                "normal ball too close to the boundary: inf d = {min_d:.6} < 3R/2 = {:.6}",
                1.5 * r
            )));
        }
        Ok(())
    }

    /// Deterministic sample of the closed ball (center plus radial shells).
    pub fn sample(&self, n: usize) -> Vec<Point> {
        let mut out = Vec::with_capacity(n + 1);
        out.push(self.center);
        if self.dim == 1 {
            for k in 0..n {
                let t = -1.0 + 2.0 * (k as f64) / (n.max(2) - 1) as f64;
                out.push([self.center[0] + t * self.radius, 0.0]);
            }
        } else {
            let shells = ((n as f64).sqrt().ceil() as usize).max(2);
            let per_shell = (n / shells).max(4);
            for i in 1..=shells {
                let rr = self.radius * (i as f64) / (shells as f64);
                for k in 0..per_shell {
                    let ang = 2.0 * std::f64::consts::PI * (k as f64) / (per_shell as f64);
                    out.push([self.center[0] + rr * ang.cos(), self.center[1] + rr * ang.sin()]);
                }
            }
        }
        out
    }
}

pub(crate) fn dist2(x: Point, y: Point) -> f64 {
    let dx = x[0] - y[0];
    let dy = x[1] - y[1];
    (dx * dx + dy * dy).sqrt()
}

fn normalize(v: [f64; 2]) -> [f64; 2] {
    let n = (v[0] * v[0] + v[1] * v[1]).sqrt();
    [v[0] / n, v[1] / n]
}

fn nearest_on_segment(x: Point, center: Point, a: f64) -> Point {
    let t = (x[0] - center[0]).clamp(-a, a);
    [center[0] + t, center[1]]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force_distance(domain: &Domain, x: Point, n: usize) -> f64 {
        (0..n)
            .map(|k| dist2(x, domain.boundary_point(k as f64 / n as f64)))
            .fold(f64::INFINITY, f64::min)
    }

    #[test]
    fn ball_center_distance() {
        let d = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert_eq!(d.distance([0.0, 0.0]), 1.0);
        assert_eq!(d.distance([1.0, 0.0]), 0.0);
        assert_eq!(d.distance([2.0, 0.3]), 0.0);
    }

    #[test]
    fn stadium_center_distance_matches_brute_force() {
        let d = Domain::stadium([0.0, 0.0], 1.5, 0.6).unwrap();
        assert!((d.distance([0.0, 0.0]) - 0.6).abs() < 1e-14);
        for &x in &[[0.4, 0.1], [1.5, 0.0], [1.9, 0.2], [-1.2, -0.5], [0.0, 0.55]] {
            let exact = d.distance(x);
            let brute = brute_force_distance(&d, x, 400_000);
            if d.contains(x) {
                assert!((exact - brute).abs() < 1e-4, "x={x:?}: {exact} vs {brute}");
            }
        }
    }

    #[test]
    fn interior_sphere_radii() {
        assert_eq!(Domain::ball([0.0, 0.0], 1.0).unwrap().interior_sphere_radius(), 0.5);
        assert_eq!(Domain::interval(0.0, 1.0).unwrap().interior_sphere_radius(), 0.5);
        assert_eq!(Domain::stadium([0.0, 0.0], 2.0, 0.8).unwrap().interior_sphere_radius(), 0.4);
        // a=2, b=1: max tangent-ball radius b^2/a = 0.5, halved.
        let e = Domain::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        assert!((e.interior_sphere_radius() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ellipse_interior_sphere_radius_from_brute_force() {
        // Largest tangent ball at boundary point t: grow r until the ball pokes out.
        let e = Domain::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        let mut min_max_r = f64::INFINITY;
        for k in 0..64 {
            let t = k as f64 / 64.0;
            let bp = e.boundary_point(t);
            let nu = e.inner_normal(bp).unwrap();
            // largest r with d(bp + r nu) >= r (tangent ball of radius r inside)
            let mut lo = 0.0;
            let mut hi = 1.2;
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                let c = [bp[0] + mid * nu[0], bp[1] + mid * nu[1]];
                if e.distance(c) >= mid - 1e-12 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            min_max_r = min_max_r.min(lo);
        }
        // uniform tangent-ball radius = 2 * rho
        assert!(
            (min_max_r - 2.0 * e.interior_sphere_radius()).abs() < 2e-3,
            "brute-force tangent radius {min_max_r}"
        );
    }

    #[test]
    fn projection_examples() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let p = b.metric_projection([0.5, 0.0]).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-15 && p[1].abs() < 1e-15);

        let i = Domain::interval(0.0, 1.0).unwrap();
        let p = i.metric_projection([0.9, 0.0]).unwrap();
        assert_eq!(p[0], 1.0);

        // x beyond the uniqueness region must error
        assert!(b.metric_projection([0.0, 0.0]).is_err());
    }

    #[test]
    fn ellipse_projection_validated_by_dense_sampling() {
        let e = Domain::ellipse([0.0, 0.0], 2.0, 1.0).unwrap();
        // interior point near the flat side
        let x = [0.3, 0.85];
        let p = e.metric_projection(x).unwrap();
        let d = e.distance(x);
        assert!((dist2(x, p) - d).abs() < 1e-10);
        let brute = brute_force_distance(&e, x, 800_000);
        assert!((d - brute).abs() < 1e-5, "{d} vs {brute}");
    }

    #[test]
    fn projection_consistent_with_distance() {
        let shapes = [
            Domain::ball([0.3, -0.2], 1.3).unwrap(),
            Domain::stadium([0.0, 0.1], 1.0, 0.5).unwrap(),
            Domain::ellipse([0.0, 0.0], 1.5, 0.9).unwrap(),
        ];
        for dom in &shapes {
            let rho = dom.interior_sphere_radius();
            for k in 0..200 {
                let t = k as f64 / 200.0;
                let bp = dom.boundary_point(t);
                let nu = dom.inner_normal(bp).unwrap();
                let depth = rho * (0.1 + 0.8 * ((k % 7) as f64) / 7.0);
                let x = [bp[0] + depth * nu[0], bp[1] + depth * nu[1]];
                let d = dom.distance(x);
                let p = dom.metric_projection(x).unwrap();
                let err = (dist2(x, p) - d).abs();
                assert!(err < 1e-10 * (1.0 + d), "{dom:?} t={t} err={err}");
            }
        }
    }

    #[test]
    fn distance_is_one_lipschitz() {
        let shapes = [
            Domain::interval(0.2, 1.1).unwrap(),
            Domain::ball([0.0, 0.0], 1.0).unwrap(),
            Domain::stadium([0.0, 0.0], 1.2, 0.7).unwrap(),
            Domain::ellipse([0.1, 0.0], 2.0, 1.0).unwrap(),
        ];
        for dom in &shapes {
            let mut xs = Vec::new();
            for i in 0..25 {
                for j in 0..25 {
                    xs.push([-2.5 + 5.0 * i as f64 / 24.0, -2.5 + 5.0 * j as f64 / 24.0]);
                }
            }
            if dom.dim() == 1 {
                for x in xs.iter_mut() {
                    x[1] = 0.0;
                }
            }
            for a in &xs {
                for b in &xs {
                    let lhs = (dom.distance(*a) - dom.distance(*b)).abs();
                    let rhs = dist2(*a, *b);
                    assert!(lhs <= rhs + 1e-12, "{dom:?} {a:?} {b:?}: {lhs} > {rhs}");
                }
            }
        }
    }

    #[test]
    fn normal_ball_examples() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        let nb = NormalBall::new(&b, [1.0, 0.0], 0.1).unwrap();
        assert!((nb.center[0] - 0.825).abs() < 1e-14);
        assert!(nb.center[1].abs() < 1e-14);
        assert!((nb.radius - 0.025).abs() < 1e-15);
        // paper invariant: inf of d over the ball >= 3R/2
        let min_d = nb.sample(2000).iter().map(|q| b.distance(*q)).fold(f64::INFINITY, f64::min);
        assert!(min_d >= 0.15 - 1e-9, "min_d = {min_d}");

        let i = Domain::interval(0.0, 1.0).unwrap();
        let nb = NormalBall::new(&i, [-1.0, 0.0], 0.05).unwrap();
        assert!((nb.center[0] + 0.9125).abs() < 1e-14);
    }

    #[test]
    fn normal_ball_rejects_large_r() {
        let b = Domain::ball([0.0, 0.0], 1.0).unwrap();
        assert!(NormalBall::new(&b, [1.0, 0.0], 0.2).is_err());
    }
}

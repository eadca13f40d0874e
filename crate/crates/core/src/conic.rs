//! Ellipse, confocal conics, tangents, inversion and polygon metrics.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn dot(self, o: Vec2) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Vec2) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        let n = self.norm();
        Vec2::new(self.x / n, self.y / n)
    }

    pub fn perp(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    pub fn dist(self, o: Vec2) -> f64 {
        (self - o).norm()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// The line `n · p = h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Line {
    pub n: Vec2,
    pub h: f64,
}

impl Line {
    pub fn through(p: Vec2, q: Vec2) -> Result<Line> {
        let d = q - p;
        if d.norm() == 0.0 {
            return Err(Error::Degenerate("line through coincident points".into()));
        }
        let n = d.perp().normalized();
        Ok(Line { n, h: n.dot(p) })
    }

    /// Same line with a unit normal.
    pub fn normalized(self) -> Line {
        let s = self.n.norm();
        Line { n: self.n * (1.0 / s), h: self.h / s }
    }

    pub fn signed_distance(&self, p: Vec2) -> f64 {
        (self.n.dot(p) - self.h) / self.n.norm()
    }

    pub fn direction(&self) -> Vec2 {
        self.n.perp().normalized()
    }

    pub fn intersect(&self, o: &Line) -> Result<Vec2> {
        let det = self.n.cross(o.n);
        let scale = self.n.norm() * o.n.norm();
        if det.abs() <= 1e-14 * scale {
            return Err(Error::Degenerate("parallel lines".into()));
        }
        Ok(Vec2::new((self.h * o.n.y - o.h * self.n.y) / det, (self.n.x * o.h - o.n.x * self.h) / det))
    }
}

/// The billiard table x²/a² + y²/b² = 1 with a ≥ b > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Billiard {
    pub a: f64,
    pub b: f64,
}

impl Billiard {
    pub fn new(a: f64, b: f64) -> Result<Billiard> {
        if !(a.is_finite() && b.is_finite()) || b <= 0.0 || a < b {
            return Err(Error::InvalidBilliard(format!("need a >= b > 0, got a={a}, b={b}")));
        }
        Ok(Billiard { a, b })
    }

    /// Billiard with minor semi-axis 1.
    pub fn with_ratio(ab: f64) -> Result<Billiard> {
        Billiard::new(ab, 1.0)
    }

    pub fn c2(&self) -> f64 {
        (self.a - self.b) * (self.a + self.b)
    }

    pub fn c(&self) -> f64 {
        self.c2().sqrt()
    }

    pub fn delta(&self) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        (a2 * a2 - a2 * b2 + b2 * b2).sqrt()
    }

    pub fn is_circle(&self) -> bool {
        self.c2() <= 1e-14 * self.a * self.a
    }

    pub fn focus(&self, f: Focus) -> Vec2 {
        match f {
            Focus::F1 => Vec2::new(-self.c(), 0.0),
            Focus::F2 => Vec2::new(self.c(), 0.0),
        }
    }

    pub fn boundary_point(&self, t: f64) -> Vec2 {
        Vec2::new(self.a * t.cos(), self.b * t.sin())
    }

    /// Point with abscissa `a u` on the upper arc.
    pub fn upper_point(&self, u: f64) -> Vec2 {
        Vec2::new(self.a * u, self.b * (1.0 - u * u).max(0.0).sqrt())
    }

    /// Eccentric angle of a boundary point.
    pub fn parameter(&self, p: Vec2) -> f64 {
        (p.y / self.b).atan2(p.x / self.a)
    }

    /// f(p) - 1 where f(p) = x²/a² + y²/b².
    pub fn residual(&self, p: Vec2) -> f64 {
        p.x * p.x / (self.a * self.a) + p.y * p.y / (self.b * self.b) - 1.0
    }

    pub fn gradient(&self, p: Vec2) -> Vec2 {
        Vec2::new(2.0 * p.x / (self.a * self.a), 2.0 * p.y / (self.b * self.b))
    }

    /// Outward unit normal.
    pub fn normal(&self, p: Vec2) -> Vec2 {
        self.gradient(p).normalized()
    }

    pub fn curvature(&self, p: Vec2) -> f64 {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let s = p.x * p.x / (a2 * a2) + p.y * p.y / (b2 * b2);
        1.0 / (a2 * b2 * s.powf(1.5))
    }

    /// ½ ∇f(p) · v̂.
    pub fn joachimsthal_at(&self, p: Vec2, v: Vec2) -> f64 {
        0.5 * self.gradient(p).dot(v.normalized())
    }

    /// J = √(a² − a″²)/(ab), valid for either caustic kind.
    pub fn joachimsthal_from_caustic(&self, a_caustic: f64) -> Result<f64> {
        if !(a_caustic > 0.0 && a_caustic < self.a) {
            return Err(Error::Domain(format!("caustic semi-axis {a_caustic} outside (0, a)")));
        }
        Ok((self.a * self.a - a_caustic * a_caustic).sqrt() / (self.a * self.b))
    }

    pub fn tangent_line(&self, p: Vec2) -> Line {
        Line { n: Vec2::new(p.x / (self.a * self.a), p.y / (self.b * self.b)), h: 1.0 }
    }

    /// Second intersection of the line p + s·d with the billiard, p on the billiard.
    ///
    /// The known root s = 0 is deflated out of the quadratic.
    pub fn second_intersection(&self, p: Vec2, d: Vec2) -> Result<Vec2> {
        let (a2, b2) = (self.a * self.a, self.b * self.b);
        let qa = d.x * d.x / a2 + d.y * d.y / b2;
        let qb = p.x * d.x / a2 + p.y * d.y / b2;
        let s = -2.0 * qb / qa;
        if s.abs() * d.norm() <= 1e-14 * self.a {
            return Err(Error::Tangential);
        }
        Ok(p + d * s)
    }

    /// Perimeter by the arithmetic-geometric mean.
    pub fn perimeter(&self) -> f64 {
        let (mut an, mut bn) = (self.a, self.b);
        let mut sum = 0.5 * self.c2();
        let mut w = 0.5;
        for _ in 0..64 {
            let cn = 0.5 * (an - bn);
            let next = (0.5 * (an + bn), (an * bn).sqrt());
            an = next.0;
            bn = next.1;
            w *= 2.0;
            sum += w * cn * cn;
            if cn.abs() <= 1e-17 * self.a {
                break;
            }
        }
        2.0 * PI / an * (self.a * self.a - sum)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausticKind {
    Ellipse,
    Hyperbola,
}

/// A conic confocal with the billiard. `a2` is the (transverse) semi-axis on x.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfocalConic {
    pub kind: CausticKind,
    pub a2: f64,
    pub b2: f64,
}

impl ConfocalConic {
    /// The confocal conic with x semi-axis `a2`: an ellipse when a2 > c, a hyperbola when a2 < c.
    pub fn from_major(billiard: &Billiard, a2: f64) -> Result<ConfocalConic> {
        if !(a2 > 0.0 && a2 < billiard.a) {
            return Err(Error::Domain(format!("caustic semi-axis {a2} outside (0, {})", billiard.a)));
        }
        let d = a2 * a2 - billiard.c2();
        if d.abs() <= 1e-15 * billiard.a * billiard.a {
            return Err(Error::Degenerate("caustic collapses onto the focal segment".into()));
        }
        let kind = if d > 0.0 { CausticKind::Ellipse } else { CausticKind::Hyperbola };
        Ok(ConfocalConic { kind, a2, b2: d.abs().sqrt() })
    }

    /// The caustic of trajectories with Joachimsthal constant `j`.
    pub fn from_joachimsthal(billiard: &Billiard, j: f64) -> Result<ConfocalConic> {
        let lam = (j * billiard.a * billiard.b).powi(2);
        ConfocalConic::from_major(billiard, (billiard.a * billiard.a - lam).max(0.0).sqrt())
    }

    pub fn sq_a(&self) -> f64 {
        self.a2 * self.a2
    }

    /// b″² for an ellipse, −b″² for a hyperbola.
    pub fn signed_sq_b(&self) -> f64 {
        match self.kind {
            CausticKind::Ellipse => self.b2 * self.b2,
            CausticKind::Hyperbola => -self.b2 * self.b2,
        }
    }

    pub fn residual(&self, p: Vec2) -> f64 {
        p.x * p.x / self.sq_a() + p.y * p.y / self.signed_sq_b() - 1.0
    }

    /// Unit directions of the two tangent lines from `p` to the conic.
    pub fn tangent_dirs(&self, p: Vec2) -> Result<[Vec2; 2]> {
        let (aa, bb) = (self.sq_a(), self.signed_sq_b());
        let g = p.x * p.x / aa + p.y * p.y / bb - 1.0;
        let cxx = p.x * p.x / (aa * aa) - g / aa;
        let cxy = 2.0 * p.x * p.y / (aa * bb);
        let cyy = p.y * p.y / (bb * bb) - g / bb;
        let mut disc = cxy * cxy - 4.0 * cxx * cyy;
        let scale = cxy * cxy + 4.0 * (cxx * cyy).abs();
        if disc < 0.0 {
            if disc < -1e-12 * scale {
                return Err(Error::NoTangent { x: p.x, y: p.y });
            }
            disc = 0.0;
        }
        let q = -0.5 * (cxy + disc.sqrt().copysign(cxy));
        let dirs = if cyy.abs() >= cxx.abs() {
            let m2 = if q != 0.0 { cxx / q } else { 0.0 };
            [Vec2::new(1.0, q / cyy), Vec2::new(1.0, m2)]
        } else {
            let m2 = if q != 0.0 { cyy / q } else { 0.0 };
            [Vec2::new(q / cxx, 1.0), Vec2::new(m2, 1.0)]
        };
        Ok([dirs[0].normalized(), dirs[1].normalized()])
    }

    /// Dimensionless tangency defect of a line: zero iff the line touches the conic.
    pub fn tangency_residual(&self, line: &Line) -> f64 {
        let l = line.normalized();
        (self.sq_a() * l.n.x * l.n.x + self.signed_sq_b() * l.n.y * l.n.y - l.h * l.h).abs()
            / self.sq_a().max(l.h * l.h)
    }

    /// Pole of a tangent line: the point of contact.
    pub fn tangency_point(&self, line: &Line, tol: f64) -> Result<Vec2> {
        let r = self.tangency_residual(line);
        if r > tol {
            return Err(Error::NotTangent(r));
        }
        let l = line.normalized();
        if l.h.abs() <= 1e-300 {
            return Err(Error::Degenerate("tangent through the center".into()));
        }
        Ok(Vec2::new(self.sq_a() * l.n.x / l.h, self.signed_sq_b() * l.n.y / l.h))
    }

    /// Contact point of the line p + s·d, assumed tangent.
    pub fn touch_point(&self, p: Vec2, d: Vec2) -> Vec2 {
        let (aa, bb) = (self.sq_a(), self.signed_sq_b());
        let s = -(p.x * d.x / aa + p.y * d.y / bb) / (d.x * d.x / aa + d.y * d.y / bb);
        p + d * s
    }
}

/// The four points (±a·a″/c, ±b·b″/c) where a confocal hyperbola meets the billiard.
pub fn confocal_intersections(billiard: &Billiard, hyp: &ConfocalConic) -> Result<[Vec2; 4]> {
    if billiard.is_circle() {
        return Err(Error::Degenerate("circle has no confocal hyperbola".into()));
    }
    if hyp.kind != CausticKind::Hyperbola {
        return Err(Error::Domain("confocal ellipse does not meet the billiard".into()));
    }
    let c = billiard.c();
    let x = billiard.a * hyp.a2 / c;
    let y = billiard.b * hyp.b2 / c;
    Ok([Vec2::new(x, y), Vec2::new(-x, y), Vec2::new(-x, -y), Vec2::new(x, -y)])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Focus {
    F1,
    F2,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionContext {
    pub focus: Focus,
    pub rho: f64,
}

impl Default for InversionContext {
    fn default() -> Self {
        InversionContext { focus: Focus::F1, rho: 1.0 }
    }
}

impl InversionContext {
    pub fn new(focus: Focus, rho: f64) -> Result<Self> {
        if !(rho > 0.0 && rho.is_finite()) {
            return Err(Error::Invalid(format!("inversion radius must be positive, got {rho}")));
        }
        Ok(InversionContext { focus, rho })
    }
}

/// Inversion about a circle of radius ρ centered at `center`.
pub fn invert_about(center: Vec2, rho: f64, p: Vec2) -> Result<Vec2> {
    let d = p - center;
    let d2 = d.dot(d);
    if d2 == 0.0 {
        return Err(Error::Degenerate("inversion of the center".into()));
    }
    Ok(center + d * (rho * rho / d2))
}

pub fn invert_point(billiard: &Billiard, ctx: &InversionContext, p: Vec2) -> Result<Vec2> {
    invert_about(billiard.focus(ctx.focus), ctx.rho, p)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Vec2>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonMetrics {
    pub area: f64,
    pub perimeter: f64,
    pub cos_angles: Vec<f64>,
    pub turning_number: i32,
    pub turning_raw: f64,
}

impl Polygon {
    pub fn new(vertices: Vec<Vec2>) -> Result<Polygon> {
        let p = Polygon { vertices };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        let n = self.len();
        if n < 3 {
            return Err(Error::Invalid(format!("polygon needs 3 vertices, got {n}")));
        }
        let scale = self.vertices.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
        for i in 0..n {
            if self.vertices[i].dist(self.vertices[(i + 1) % n]) <= 1e-15 * scale {
                return Err(Error::Degenerate(format!("repeated vertex at index {i}")));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn at(&self, i: isize) -> Vec2 {
        let n = self.len() as isize;
        self.vertices[i.rem_euclid(n) as usize]
    }

    pub fn signed_area(&self) -> f64 {
        let n = self.len() as isize;
        0.5 * (0..n).map(|i| self.at(i).cross(self.at(i + 1))).sum::<f64>()
    }

    pub fn perimeter(&self) -> f64 {
        let n = self.len() as isize;
        (0..n).map(|i| self.at(i).dist(self.at(i + 1))).sum()
    }

    /// cos θᵢ with θᵢ the angle between Pᵢ₋₁ − Pᵢ and Pᵢ₊₁ − Pᵢ.
    pub fn cos_angles(&self) -> Vec<f64> {
        let n = self.len() as isize;
        (0..n)
            .map(|i| {
                let u = self.at(i - 1) - self.at(i);
                let w = self.at(i + 1) - self.at(i);
                (u.dot(w) / (u.norm() * w.norm())).clamp(-1.0, 1.0)
            })
            .collect()
    }

    /// Total turning of the edge direction over one circuit, in turns.
    pub fn turning_raw(&self) -> f64 {
        let n = self.len() as isize;
        let total: f64 = (0..n)
            .map(|i| {
                let e1 = self.at(i + 1) - self.at(i);
                let e2 = self.at(i + 2) - self.at(i + 1);
                e1.cross(e2).atan2(e1.dot(e2))
            })
            .sum();
        total / (2.0 * PI)
    }

    pub fn turning_number(&self) -> Result<i32> {
        let t = self.turning_raw();
        let r = t.round();
        if (t - r).abs() > crate::tol::TURNING_ROUND {
            return Err(Error::Degenerate(format!("turning {t} is not near an integer")));
        }
        Ok(r as i32)
    }

    pub fn metrics(&self) -> Result<PolygonMetrics> {
        self.validate()?;
        Ok(PolygonMetrics {
            area: self.signed_area(),
            perimeter: self.perimeter(),
            cos_angles: self.cos_angles(),
            turning_number: self.turning_number()?,
            turning_raw: self.turning_raw(),
        })
    }

    pub fn reversed(&self) -> Polygon {
        let mut v = self.vertices.clone();
        v.reverse();
        Polygon { vertices: v }
    }
}

//! Geometry of the self-intersected 4-periodic ("bowtie").

use serde::Serialize;

use crate::conic::{invert_about, Billiard, Focus, InversionContext, Line, Vec2};
use crate::error::{Error, Result};
use crate::orbit::seeds::{n4_self_u_max, n4_self_vertices};
use crate::poly::bracket_root;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BowtieCircles {
    /// Circle through the four vertices and both foci.
    pub c: Vec2,
    pub r: f64,
    /// Circle through the four outer-polygon vertices and both foci.
    pub cp: Vec2,
    pub rp: f64,
}

fn admissible(b: &Billiard, u: f64) -> Result<f64> {
    let um = n4_self_u_max(b)?;
    if u.abs() >= um * (1.0 - 1e-12) {
        return Err(Error::Degenerate(format!("|u| = {} reaches the doubled-up limit {um}", u.abs())));
    }
    Ok(um)
}

/// P₁ abscissa ratio at which the bowtie has vertical sides.
pub fn u_symmetric(b: &Billiard) -> Result<f64> {
    n4_self_u_max(b)?;
    Ok((b.a * b.a - 2.0 * b.b * b.b).sqrt() / b.c())
}

pub fn bowtie_circles(b: &Billiard, u: f64) -> Result<BowtieCircles> {
    admissible(b, u)?;
    let (a2, bb) = (b.a * b.a, b.b);
    let c2 = b.c2();
    let s = (1.0 - u * u).sqrt();
    let den = a2 + (u * u - 2.0) * c2;
    if den.abs() <= 1e-12 * a2 {
        return Err(Error::Degenerate("outer circle is a line at the symmetric position".into()));
    }
    Ok(BowtieCircles {
        c: Vec2::new(0.0, (c2 * u * u - a2 + 2.0 * bb * bb) / (2.0 * bb * s)),
        r: (a2 - c2 * u * u) / (2.0 * bb * s),
        cp: Vec2::new(0.0, -2.0 * bb * c2 * s / den),
        rp: (b.c() * (c2 * u * u - a2) / den).abs(),
    })
}

/// Tangent-line intersections at consecutive vertices.
pub fn outer_vertices(b: &Billiard, u: f64) -> Result<[Vec2; 4]> {
    let v = n4_self_vertices(b, u)?;
    let mut out = [Vec2::new(0.0, 0.0); 4];
    for i in 0..4 {
        out[i] = b.tangent_line(v[i]).intersect(&b.tangent_line(v[(i + 1) % 4]))?;
    }
    Ok(out)
}

/// Largest |‖p − center‖ − r| / r over the points.
pub fn circle_deviation(center: Vec2, r: f64, pts: &[Vec2]) -> f64 {
    pts.iter().map(|p| (p.dist(center) - r).abs()).fold(0.0, f64::max) / r
}

/// Algebraic least-squares circle through the points.
pub fn fit_circle(pts: &[Vec2]) -> Result<(Vec2, f64)> {
    // x² + y² + D x + E y + F = 0
    let mut m = [[0.0f64; 3]; 3];
    let mut rhs = [0.0f64; 3];
    for p in pts {
        let row = [p.x, p.y, 1.0];
        let z = -(p.x * p.x + p.y * p.y);
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] += row[i] * row[j];
            }
            rhs[i] += row[i] * z;
        }
    }
    let det3 = |m: &[[f64; 3]; 3]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&m);
    if d.abs() < 1e-300 {
        return Err(Error::Degenerate("points are collinear".into()));
    }
    let mut sol = [0.0; 3];
    for k in 0..3 {
        let mut mk = m;
        for i in 0..3 {
            mk[i][k] = rhs[i];
        }
        sol[k] = det3(&mk) / d;
    }
    let c = Vec2::new(-sol[0] / 2.0, -sol[1] / 2.0);
    Ok((c, (c.dot(c) - sol[2]).max(0.0).sqrt()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CircleChecks {
    pub concyclic: f64,
    pub concyclic_outer: f64,
    /// |1/R² + 1/R′² − 1/c²| · c²
    pub harmonic: f64,
    /// Power of the origin minus (b² − a²), scaled by c² / max(c², C_y² + R²).
    pub power: f64,
    pub power_outer: f64,
    /// Distance between the printed centers and least-squares fits, relative to the radius.
    pub fit: f64,
}

pub fn circle_checks(b: &Billiard, u: f64) -> Result<CircleChecks> {
    let k = bowtie_circles(b, u)?;
    let v = n4_self_vertices(b, u)?;
    let o = outer_vertices(b, u)?;
    let f = [b.focus(Focus::F1), b.focus(Focus::F2)];
    let pts: Vec<Vec2> = v.iter().chain(f.iter()).copied().collect();
    let opts: Vec<Vec2> = o.iter().chain(f.iter()).copied().collect();
    let c2 = b.c2();
    let target = b.b * b.b - b.a * b.a;
    // Power as the product of the y-axis intercepts, scaled by c² / max(c², C_y² + R²).
    let pw = |c: Vec2, r: f64| ((c.y - r) * (c.y + r) - target).abs() / (c.y * c.y + r * r).max(c2) * c2;
    let (fc, fr) = fit_circle(&pts)?;
    let (fcp, frp) = fit_circle(&opts)?;
    Ok(CircleChecks {
        concyclic: circle_deviation(k.c, k.r, &pts),
        concyclic_outer: circle_deviation(k.cp, k.rp, &opts),
        harmonic: (1.0 / (k.r * k.r) + 1.0 / (k.rp * k.rp) - 1.0 / c2).abs() * c2,
        power: pw(k.c, k.r),
        power_outer: pw(k.cp, k.rp),
        fit: (fc.dist(k.c) + (fr - k.r).abs()) / k.r + (fcp.dist(k.cp) + (frp - k.rp).abs()) / k.rp,
    })
}

/// c²(b²x² + a²y²)² − b⁴a²((a² − 2b²)x² − a²y²) and the sum of its term magnitudes.
pub fn quartic(b: &Billiard, p: Vec2) -> (f64, f64) {
    let (a2, b2) = (b.a * b.a, b.b * b.b);
    let (x2, y2) = (p.x * p.x, p.y * p.y);
    let q = b2 * x2 + a2 * y2;
    let t1 = b.c2() * q * q;
    let t2 = b2 * b2 * a2 * (a2 - 2.0 * b2) * x2;
    let t3 = b2 * b2 * a2 * a2 * y2;
    (t1 - t2 + t3, t1.abs() + t2.abs() + t3.abs())
}

fn quartic_gradient(b: &Billiard, p: Vec2) -> Vec2 {
    let (a2, b2) = (b.a * b.a, b.b * b.b);
    let q = b2 * p.x * p.x + a2 * p.y * p.y;
    let c2 = b.c2();
    Vec2::new(
        4.0 * c2 * q * b2 * p.x - 2.0 * b2 * b2 * a2 * (a2 - 2.0 * b2) * p.x,
        4.0 * c2 * q * a2 * p.y + 2.0 * b2 * b2 * a2 * a2 * p.y,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MidpointCheck {
    pub midpoints: Vec<Vec2>,
    pub collinear_residual: f64,
    pub quartic_residuals: Vec<f64>,
}

pub fn midpoint_locus_check(b: &Billiard, u: f64) -> Result<MidpointCheck> {
    admissible(b, u)?;
    let v = n4_self_vertices(b, u)?;
    let m: Vec<Vec2> = (0..4).map(|i| (v[i] + v[(i + 1) % 4]) * 0.5).collect();
    let ys = m.iter().map(|p| p.y);
    let spread = ys.clone().fold(f64::NEG_INFINITY, f64::max) - ys.fold(f64::INFINITY, f64::min);
    let q = m
        .iter()
        .map(|p| {
            let (v, s) = quartic(b, *p);
            if s == 0.0 {
                0.0
            } else {
                v.abs() / s
            }
        })
        .collect();
    Ok(MidpointCheck { midpoints: m, collinear_residual: spread, quartic_residuals: q })
}

/// Quartic tangent to the caustic at its vertices: membership residual and
/// the sine between the two curves' normals there.
pub fn quartic_caustic_tangency(b: &Billiard) -> Result<(f64, f64)> {
    let x0 = b.a * (b.a * b.a - 2.0 * b.b * b.b).sqrt() / b.c();
    if !(x0 > 0.0) {
        return Err(Error::FamilyNonexistent("bowtie needs a/b > √2".into()));
    }
    let p = Vec2::new(x0, 0.0);
    let (q, s) = quartic(b, p);
    let caustic = crate::conic::ConfocalConic::from_major(b, x0)?;
    let member = (q.abs() / s).max(caustic.residual(p).abs());
    let g1 = quartic_gradient(b, p).normalized();
    let g2 = Vec2::new(p.x / caustic.sq_a(), p.y / caustic.signed_sq_b()).normalized();
    Ok((member, g1.cross(g2).abs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadicalAxes {
    pub axis1: Line,
    pub axis2: Line,
    /// Angle between the axes, radians.
    pub angle: f64,
    /// Largest distance of the inverted vertices from axis1.
    pub collinear1: f64,
    pub collinear2: f64,
    /// |(C − f₁)·(C′ − f₁)| relative to R R′.
    pub perpendicular: f64,
}

fn line_fit(pts: &[Vec2]) -> Result<(Line, f64)> {
    let mut best = (0, 1, 0.0);
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = pts[i].dist(pts[j]);
            if d > best.2 {
                best = (i, j, d);
            }
        }
    }
    let line = Line::through(pts[best.0], pts[best.1])?.normalized();
    let dev = pts.iter().map(|p| line.signed_distance(*p).abs()).fold(0.0, f64::max);
    Ok((line, dev))
}

pub fn radical_axes(b: &Billiard, u: f64, ctx: &InversionContext) -> Result<RadicalAxes> {
    if ctx.focus != Focus::F1 {
        return Err(Error::Invalid("radical axes are taken about f₁".into()));
    }
    let k = bowtie_circles(b, u)?;
    let f = b.focus(Focus::F1);
    let inv = |p: &Vec2| invert_about(f, ctx.rho, *p);
    let v1 = n4_self_vertices(b, u)?.iter().map(inv).collect::<Result<Vec<_>>>()?;
    let v2 = outer_vertices(b, u)?.iter().map(inv).collect::<Result<Vec<_>>>()?;
    let (axis1, collinear1) = line_fit(&v1)?;
    let (axis2, collinear2) = line_fit(&v2)?;
    let (d1, d2) = (axis1.direction(), axis2.direction());
    Ok(RadicalAxes {
        axis1,
        axis2,
        angle: d1.cross(d2).abs().atan2(d1.dot(d2).abs()),
        collinear1,
        collinear2,
        perpendicular: ((k.c - f).dot(k.cp - f) / (k.r * k.rp)).abs(),
    })
}

/// Intersections of opposite sides of the outer polygon, ordered by height,
/// and their distance to (0, C_y ∓ R).
pub fn outer_side_intersections(b: &Billiard, u: f64) -> Result<([Vec2; 2], f64)> {
    let k = bowtie_circles(b, u)?;
    let o = outer_vertices(b, u)?;
    let x1 = Line::through(o[0], o[1])?.intersect(&Line::through(o[2], o[3])?)?;
    let x2 = Line::through(o[1], o[2])?.intersect(&Line::through(o[3], o[0])?)?;
    let (lo, hi) = if x1.y < x2.y { (x1, x2) } else { (x2, x1) };
    let err = lo.dist(Vec2::new(0.0, k.c.y - k.r)).max(hi.dist(Vec2::new(0.0, k.c.y + k.r)));
    Ok(([lo, hi], err))
}

/// Rectangle formed by f₁ and the f₁-inversions of C, C′ and the center:
/// returns the largest deviation from side lengths ρ²/R, ρ²/R′, diagonal ρ²/c
/// and from the parallelogram closure.
pub fn rectangle_note(b: &Billiard, u: f64, rho: f64) -> Result<f64> {
    let k = bowtie_circles(b, u)?;
    let f = b.focus(Focus::F1);
    let ci = invert_about(f, rho, k.c)?;
    let cpi = invert_about(f, rho, k.cp)?;
    let oi = invert_about(f, rho, Vec2::new(0.0, 0.0))?;
    let r2 = rho * rho;
    let errs = [
        (ci.dist(f) - r2 / k.r).abs(),
        (cpi.dist(f) - r2 / k.rp).abs(),
        (oi.dist(f) - r2 / b.c()).abs(),
        (oi - ci - cpi + f).norm(),
    ];
    Ok(errs.into_iter().fold(0.0, f64::max))
}

/// Angle in degrees between the crossing sides P₁P₂ and P₃P₄.
pub fn crossing_angle(b: &Billiard, u: f64) -> Result<f64> {
    let v = n4_self_vertices(b, u)?;
    let (d1, d2) = (v[1] - v[0], v[3] - v[2]);
    Ok(d1.cross(d2).abs().atan2(d1.dot(d2)).to_degrees())
}

fn crossing_cos(ab: f64) -> f64 {
    let b = Billiard::with_ratio(ab).expect("ratio above one");
    let u = u_symmetric(&b).expect("ratio above √2");
    let v = n4_self_vertices(&b, u).expect("admissible");
    let (d1, d2) = (v[1] - v[0], v[3] - v[2]);
    d1.dot(d2) / (d1.norm() * d2.norm())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SpecialRatios {
    /// Crossing sides meet at a right angle in the symmetric bowtie.
    pub right_angle_ab: f64,
    /// Bowtie perimeter 4a²/c equals the billiard perimeter.
    pub equal_perimeter_ab: f64,
}

pub fn special_ratios() -> Result<SpecialRatios> {
    let lo = 2f64.sqrt() + 1e-6;
    let right_angle_ab = bracket_root(crossing_cos, lo, 3.0, 1e-15)?;
    let equal_perimeter_ab = bracket_root(
        |ab| {
            let b = Billiard::with_ratio(ab).expect("ratio above one");
            4.0 * ab * ab / b.c() - b.perimeter()
        },
        lo,
        3.0,
        1e-15,
    )?;
    Ok(SpecialRatios { right_angle_ab, equal_perimeter_ab })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BowtieRow {
    pub u: f64,
    pub circles: BowtieCircles,
    pub checks: CircleChecks,
    pub midpoint_collinear: f64,
    pub midpoint_quartic: f64,
    pub radical_perpendicular: f64,
    pub radical_angle_deg: f64,
    pub inverse_collinear: f64,
    pub outer_intersections: f64,
    pub rectangle: f64,
    pub crossing_angle_deg: f64,
}

/// All identity residuals at one position.
pub fn bowtie_row(b: &Billiard, u: f64, ctx: &InversionContext) -> Result<BowtieRow> {
    let circles = bowtie_circles(b, u)?;
    let m = midpoint_locus_check(b, u)?;
    let ra = radical_axes(b, u, ctx)?;
    let r = circles.r.min(circles.rp);
    Ok(BowtieRow {
        u,
        circles,
        checks: circle_checks(b, u)?,
        midpoint_collinear: m.collinear_residual,
        midpoint_quartic: m.quartic_residuals.iter().copied().fold(0.0, f64::max),
        radical_perpendicular: ra.perpendicular,
        radical_angle_deg: ra.angle.to_degrees(),
        inverse_collinear: ra.collinear1.max(ra.collinear2) * r / (ctx.rho * ctx.rho),
        outer_intersections: outer_side_intersections(b, u)?.1,
        rectangle: rectangle_note(b, u, ctx.rho)?,
        crossing_angle_deg: crossing_angle(b, u)?,
    })
}

/// Evenly spaced positions across the family, 1% away from the doubled-up ends.
pub fn u_samples(b: &Billiard, n: usize) -> Result<Vec<f64>> {
    let um = n4_self_u_max(b)? * 0.99;
    if n < 2 {
        return Err(Error::Invalid("need at least two samples".into()));
    }
    Ok((0..n).map(|i| -um + 2.0 * um * i as f64 / (n - 1) as f64).collect())
}

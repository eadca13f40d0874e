//! Brute-force reflection map and periodic-orbit search.

use std::f64::consts::PI;

use serde::Serialize;

use crate::conic::{Billiard, CausticKind, ConfocalConic, Focus, Polygon, Vec2};
use crate::error::{Error, Result};
use crate::orbit::wrap;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Ray {
    pub origin: Vec2,
    pub direction: Vec2,
}

impl Ray {
    /// Checks that the origin lies on the billiard and the direction points inward.
    pub fn new(b: &Billiard, origin: Vec2, direction: Vec2) -> Result<Ray> {
        let d = direction.normalized();
        if !(d.x.is_finite() && d.y.is_finite()) {
            return Err(Error::Invalid("ray direction must be nonzero".into()));
        }
        if b.residual(origin).abs() > 1e-9 {
            return Err(Error::Domain("ray origin is not on the billiard".into()));
        }
        if b.gradient(origin).dot(d) >= 0.0 {
            return Err(Error::Domain("ray direction does not point into the billiard".into()));
        }
        Ok(Ray { origin, direction: d })
    }
}

/// One elastic bounce: the next boundary hit and the reflected direction.
pub fn bounce(b: &Billiard, ray: &Ray) -> Result<Ray> {
    let q = b.second_intersection(ray.origin, ray.direction)?;
    let n = b.normal(q);
    let d = ray.direction - n * (2.0 * ray.direction.dot(n));
    Ok(Ray { origin: q, direction: d.normalized() })
}

/// Ray leaving P(t0) at angle `alpha` from the counterclockwise tangent, toward the interior.
pub fn launch(b: &Billiard, t0: f64, alpha: f64) -> Ray {
    let p = b.boundary_point(t0);
    let tan = Vec2::new(-b.a * t0.sin(), b.b * t0.cos()).normalized();
    let inward = -b.normal(p);
    Ray { origin: p, direction: tan * alpha.cos() + inward * alpha.sin() }
}

/// `n` bounces; returns the n + 1 hit points and the final ray.
pub fn iterate(b: &Billiard, ray: &Ray, n: usize) -> Result<(Vec<Vec2>, Ray)> {
    let mut pts = Vec::with_capacity(n + 1);
    pts.push(ray.origin);
    let mut r = *ray;
    for _ in 0..n {
        r = bounce(b, &r)?;
        pts.push(r.origin);
    }
    Ok((pts, r))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosureResult {
    pub gap: f64,
    /// Absolute turning number.
    pub turning: i32,
    pub vertices: Polygon,
    pub alpha: f64,
    pub t0: f64,
    pub j: f64,
    pub caustic: ConfocalConic,
    pub perimeter: f64,
}

impl ClosureResult {
    pub fn kind(&self) -> CausticKind {
        self.caustic.kind
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SearchOptions {
    pub samples: usize,
    /// Closure gaps above this multiple of the perimeter are rejected.
    pub gap_rel: f64,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions { samples: 16384, gap_rel: 1e-9 }
    }
}

fn phase_gap(b: &Billiard, t0: f64, alpha: f64, n: usize) -> Option<f64> {
    let (pts, _) = iterate(b, &launch(b, t0, alpha), n).ok()?;
    Some(wrap(b.parameter(pts[n]) - t0))
}

fn bisect(b: &Billiard, t0: f64, n: usize, mut lo: f64, mut hi: f64, mut glo: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        match phase_gap(b, t0, mid, n) {
            Some(0.0) => return mid,
            Some(g) if g.signum() == glo.signum() => {
                lo = mid;
                glo = g;
            }
            Some(_) => hi = mid,
            None => break,
        }
    }
    0.5 * (lo + hi)
}

fn analyse(b: &Billiard, t0: f64, alpha: f64, n: usize, opts: &SearchOptions) -> Option<ClosureResult> {
    let ray = launch(b, t0, alpha);
    let (pts, last) = iterate(b, &ray, n).ok()?;
    let poly = Polygon::new(pts[..n].to_vec()).ok()?;
    let l = poly.perimeter();
    let gap = pts[n].dist(pts[0]);
    if gap > opts.gap_rel * l {
        return None;
    }
    if last.direction.dist(ray.direction) > 1e-6 {
        return None;
    }
    for p in 1..n {
        if n.is_multiple_of(p) && pts[p].dist(pts[0]) < 1e-6 * l {
            return None;
        }
    }
    let j = b.joachimsthal_at(ray.origin, ray.direction).abs();
    let caustic = ConfocalConic::from_joachimsthal(b, j).ok()?;
    let turning = poly.turning_number().ok()?.abs();
    Some(ClosureResult { gap, turning, vertices: poly, alpha, t0, j, caustic, perimeter: l })
}

/// Every primitive n-periodic through P(t0), one per caustic.
pub fn find_all_periodic(b: &Billiard, n: usize, t0: f64, opts: &SearchOptions) -> Result<Vec<ClosureResult>> {
    if n < 3 {
        return Err(Error::Invalid(format!("period must be at least 3, got {n}")));
    }
    let m = opts.samples.max(64);
    let eps = 1e-6;
    let mut alphas: Vec<f64> = (0..m).map(|i| eps + (PI - 2.0 * eps) * i as f64 / (m - 1) as f64).collect();
    // Rotation numbers accumulate at the launch angles aimed at the foci.
    let ray = launch(b, t0, 0.0);
    let inward = -b.normal(ray.origin);
    let k = m / 8;
    for f in [b.focus(Focus::F1), b.focus(Focus::F2)] {
        let d = (f - ray.origin).normalized();
        let af = d.dot(inward).atan2(d.dot(ray.direction));
        for i in 0..k {
            let h = 10f64.powf(-1.0 - 12.0 * i as f64 / (k - 1) as f64);
            alphas.extend([af - h, af + h]);
        }
    }
    alphas.retain(|a| *a > 0.0 && *a < PI);
    alphas.sort_by(|x, y| x.total_cmp(y));
    alphas.dedup();
    let m = alphas.len();
    let gaps: Vec<Option<f64>> = alphas.iter().map(|a| phase_gap(b, t0, *a, n)).collect();
    let mut out: Vec<ClosureResult> = Vec::new();
    for i in 0..m - 1 {
        let (Some(g0), Some(g1)) = (gaps[i], gaps[i + 1]) else { continue };
        if g0.signum() == g1.signum() || (g0 - g1).abs() > 1.0 {
            continue;
        }
        let alpha = if g0 == 0.0 { alphas[i] } else { bisect(b, t0, n, alphas[i], alphas[i + 1], g0) };
        if let Some(r) = analyse(b, t0, alpha, n, opts) {
            if !out.iter().any(|q| (q.j - r.j).abs() <= 1e-9 * r.j.max(1e-300)) {
                out.push(r);
            }
        }
    }
    out.sort_by(|x, y| x.j.total_cmp(&y.j));
    Ok(out)
}

/// The n-periodic with the requested absolute turning number through P(t0);
/// when several exist, the one with the smallest launch angle.
pub fn find_periodic(b: &Billiard, n: usize, turning: i32, t0: f64) -> Result<ClosureResult> {
    let all = find_all_periodic(b, n, t0, &SearchOptions::default())?;
    all.into_iter()
        .filter(|r| r.turning == turning.abs())
        .min_by(|x, y| x.alpha.total_cmp(&y.alpha))
        .ok_or_else(|| Error::NotFound(format!("no {n}-periodic with turning number {turning} at a/b = {}", b.a / b.b)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diametral_bounce_in_circle() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        let r = Ray::new(&b, Vec2::new(1.0, 0.0), Vec2::new(-1.0, 0.0)).unwrap();
        let s = bounce(&b, &r).unwrap();
        assert!(s.origin.dist(Vec2::new(-1.0, 0.0)) < 1e-15);
        assert!(s.direction.dist(Vec2::new(1.0, 0.0)) < 1e-15);
    }

    #[test]
    fn vertical_ray_of_symmetric_bowtie() {
        let b = Billiard::new(2.0, 1.0).unwrap();
        let c = b.c();
        let p1 = Vec2::new(2.0 * (2.0f64).sqrt() / c, 1.0 / c);
        let s = bounce(&b, &Ray::new(&b, p1, Vec2::new(0.0, -1.0)).unwrap()).unwrap();
        assert!(s.origin.dist(Vec2::new(p1.x, -p1.y)) < 1e-14);
        assert!(s.direction.cross(s.origin).abs() < 1e-14);
        let t = bounce(&b, &s).unwrap();
        assert!(t.origin.dist(Vec2::new(-p1.x, p1.y)) < 1e-14);
    }

    #[test]
    fn joachimsthal_preserved() {
        let b = Billiard::new(1.7, 1.0).unwrap();
        let mut r = launch(&b, 0.4, 1.1);
        let j0 = b.joachimsthal_at(r.origin, r.direction).abs();
        for _ in 0..1000 {
            r = bounce(&b, &r).unwrap();
            assert!((r.direction.norm() - 1.0).abs() < 1e-14);
        }
        assert!((b.joachimsthal_at(r.origin, r.direction).abs() - j0).abs() < 1e-10);
    }

    #[test]
    fn regular_pentagram() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        let r = find_periodic(&b, 5, 2, 0.3).unwrap();
        assert!((r.caustic.a2 - (2.0 * PI / 5.0).cos()).abs() < 1e-9);
    }

    #[test]
    fn bowtie_perimeter() {
        let b = Billiard::with_ratio(1.5).unwrap();
        let r = find_periodic(&b, 4, 0, PI / 2.0 - 0.1).unwrap();
        assert!((r.perimeter - 4.0 * b.a * b.a / b.c()).abs() < 1e-9 * r.perimeter);
        let low = Billiard::with_ratio(1.3).unwrap();
        assert!(matches!(find_periodic(&low, 4, 0, PI / 2.0 - 0.1), Err(Error::NotFound(_))));
    }
}

//! Explicit vertex formulas for the axis-symmetric representatives and the
//! N = 3 and N = 4 families.

use crate::conic::{Billiard, Vec2};
use crate::error::{Error, Result};

use super::cayley;
use super::{Tag, Topology};

/// Vertices of the 3-periodic through `p1` (a > b).
pub fn n3_vertices(b: &Billiard, p1: Vec2) -> Result<[Vec2; 3]> {
    if b.is_circle() {
        return Err(Error::Domain("the 3-periodic vertex formulas need a > b".into()));
    }
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let c2 = b.c2();
    let (x1, y1) = (p1.x, p1.y);
    let delta = b.delta();
    let d1 = a2 * b2 / c2;
    let d2 = b4 * x1 * x1 + a4 * y1 * y1;
    let del1 = (2.0 * delta - a2 - b2).sqrt();
    let k1 = d1 * d1 * del1 * del1 / d2;
    let k2 = del1 * d1 / d2 * (d2 - d1 * d1 * del1 * del1).max(0.0).sqrt();
    let (x1_2, x1_3, y1_2, y1_3) = (x1 * x1, x1 * x1 * x1, y1 * y1, y1 * y1 * y1);

    let x2 = -b4 * ((a2 + b2) * k1 - a2) * x1_3 - 2.0 * a4 * b2 * k2 * x1_2 * y1
        + a4 * ((a2 - 3.0 * b2) * k1 + b2) * x1 * y1_2
        - 2.0 * a4 * a2 * k2 * y1_3;
    let y2 = 2.0 * b4 * b2 * k2 * x1_3 + b4 * ((b2 - 3.0 * a2) * k1 + a2) * x1_2 * y1 + 2.0 * a2 * b4 * k2 * x1 * y1_2
        - a4 * ((a2 + b2) * k1 - b2) * y1_3;
    let q2 = b4 * (a2 - c2 * k1) * x1_2 + a4 * (b2 + c2 * k1) * y1_2 - 2.0 * a2 * b2 * c2 * k2 * x1 * y1;
    let x3 = b4 * (a2 - (a2 + b2) * k1) * x1_3
        + 2.0 * a4 * b2 * k2 * x1_2 * y1
        + a4 * (k1 * (a2 - 3.0 * b2) + b2) * x1 * y1_2
        + 2.0 * a4 * a2 * k2 * y1_3;
    let y3 = -2.0 * b4 * b2 * k2 * x1_3 + b4 * (a2 + (b2 - 3.0 * a2) * k1) * x1_2 * y1 - 2.0 * a2 * b4 * k2 * x1 * y1_2
        + a4 * (b2 - (a2 + b2) * k1) * y1_3;
    let q3 = b4 * (a2 - c2 * k1) * x1_2 + a4 * (b2 + c2 * k1) * y1_2 + 2.0 * a2 * b2 * c2 * k2 * x1 * y1;
    Ok([p1, Vec2::new(x2 / q2, y2 / q2), Vec2::new(x3 / q3, y3 / q3)])
}

/// Parallelogram 4-periodic through `p1`.
pub fn n4_simple_vertices(b: &Billiard, p1: Vec2) -> [Vec2; 4] {
    let (a2, b2) = (b.a * b.a, b.b * b.b);
    let s = (b2 * b2 * b2 * p1.x * p1.x + a2 * a2 * a2 * p1.y * p1.y).sqrt();
    let p2 = Vec2::new(-a2 * a2 * p1.y / s, b2 * b2 * p1.x / s);
    [p1, p2, -p1, -p2]
}

/// Area of the parallelogram 4-periodic through `p1`.
pub fn n4_simple_area(b: &Billiard, p1: Vec2) -> f64 {
    let (a2, b2) = (b.a * b.a, b.b * b.b);
    2.0 * (b2 * b2 * p1.x * p1.x + a2 * a2 * p1.y * p1.y)
        / (b2 * b2 * b2 * p1.x * p1.x + a2 * a2 * a2 * p1.y * p1.y).sqrt()
}

/// Largest |u| for the self-intersected 4-periodic.
pub fn n4_self_u_max(b: &Billiard) -> Result<f64> {
    let k = b.a * b.a - 2.0 * b.b * b.b;
    if k <= 0.0 {
        return Err(Error::FamilyNonexistent("N=4 type I: a/b > √2 required".into()));
    }
    Ok(b.a * k.sqrt() / b.c2())
}

/// Bowtie 4-periodic with P₁ = (a·u, b√(1−u²)).
pub fn n4_self_vertices(b: &Billiard, u: f64) -> Result<[Vec2; 4]> {
    let um = n4_self_u_max(b)?;
    if u.abs() > um * (1.0 + 1e-12) {
        return Err(Error::Domain(format!("|u| = {} exceeds {um}", u.abs())));
    }
    let (a, bb, c2) = (b.a, b.b, b.c2());
    let s = (1.0 - u * u).sqrt();
    let r = (a * a * (a * a - 2.0 * bb * bb) - c2 * c2 * u * u).max(0.0).sqrt();
    let x = a * r / (c2 * s);
    let y = -bb * bb * bb / (c2 * s);
    Ok([Vec2::new(a * u, bb * s), Vec2::new(-x, y), Vec2::new(-a * u, bb * s), Vec2::new(x, y)])
}

/// Vertices of the axis-symmetric representative, where one is printed.
pub fn representative(b: &Billiard, t: &Topology) -> Result<Option<Vec<Vec2>>> {
    let (a, bb) = (b.a, b.b);
    let v = match (t.n, t.tag) {
        (3, Tag::Simple) if !b.is_circle() => n3_vertices(b, Vec2::new(a, 0.0))?.to_vec(),
        (4, Tag::Simple) => n4_simple_vertices(b, Vec2::new(a, 0.0)).to_vec(),
        (4, Tag::TypeI) => n4_self_vertices(b, 0.5 * n4_self_u_max(b)?)?.to_vec(),
        (6, Tag::Simple) => {
            let kx = a * a / (a + bb);
            let ky = bb * (bb * (2.0 * a + bb)).sqrt() / (a + bb);
            let (p2, p3) = (Vec2::new(kx, ky), Vec2::new(-kx, ky));
            vec![Vec2::new(a, 0.0), p2, p3, Vec2::new(-a, 0.0), -p2, -p3]
        }
        (6, Tag::TypeI) => {
            cayley::caustic(b, t)?;
            let kx = a * (a * (a - 2.0 * bb)).sqrt() / (bb - a);
            let ky = bb * bb / (bb - a);
            let (p2, p3) = (Vec2::new(kx, ky), Vec2::new(kx, -ky));
            vec![Vec2::new(0.0, bb), p2, p3, Vec2::new(0.0, -bb), -p2, -p3]
        }
        (6, Tag::TypeII) => {
            cayley::caustic(b, t)?;
            let c = b.c();
            let kx = -a.powf(1.5) * (2.0 * c - a).sqrt() / c;
            let ky = (c - a) * bb / c;
            let (p2, p5) = (Vec2::new(kx, ky), Vec2::new(kx, -ky));
            vec![Vec2::new(0.0, bb), p2, -p2, Vec2::new(0.0, -bb), p5, -p5]
        }
        (8, Tag::Simple) => {
            let roots = crate::poly::real_roots(&cayley::p8_simple(b), 1e-15)?;
            let x = roots
                .iter()
                .map(|r| r.value)
                .find(|x| *x > 0.0 && *x < 1.0)
                .ok_or_else(|| Error::NoRoot("8-periodic quartic root in (0, 1)".into()))?;
            let (px, py) = (a * x, bb * (1.0 - x * x).sqrt());
            vec![
                Vec2::new(a, 0.0),
                Vec2::new(px, py),
                Vec2::new(0.0, bb),
                Vec2::new(-px, py),
                Vec2::new(-a, 0.0),
                Vec2::new(-px, -py),
                Vec2::new(0.0, -bb),
                Vec2::new(px, -py),
            ]
        }
        _ => return Ok(None),
    };
    Ok(Some(v))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn n3_isosceles_at_vertex() {
        let b = Billiard::new(2.0, 1.0).unwrap();
        let v = n3_vertices(&b, Vec2::new(2.0, 0.0)).unwrap();
        assert!((v[1].x - v[2].x).abs() < 1e-12);
        assert!((v[1].y + v[2].y).abs() < 1e-12);
        for p in v {
            assert!(b.residual(p).abs() < 1e-12);
        }
    }

    #[test]
    fn n4_rhombus_and_rectangle() {
        let b = Billiard::new(2.0, 1.0).unwrap();
        let p1 = Vec2::new(2.0, 0.0);
        assert!((n4_simple_area(&b, p1) - 4.0).abs() < 1e-14);
        let v = n4_simple_vertices(&b, p1);
        assert!((v[1].x).abs() < 1e-15 && (v[1].y - 1.0).abs() < 1e-15);
        let x1 = 1.0f64;
        let y1 = x1 / 4.0;
        let s = (x1 * x1 / 4.0 + y1 * y1).sqrt();
        let p1 = Vec2::new(x1 / s, y1 / s);
        assert!((n4_simple_area(&b, p1) - 16.0 / 5.0).abs() < 1e-13);
    }

    #[test]
    fn n4_self_symmetric_point() {
        let b = Billiard::new(2.0, 1.0).unwrap();
        let v = n4_self_vertices(&b, 0.0).unwrap();
        assert!(v[0].dist(Vec2::new(0.0, 1.0)) < 1e-15);
        for p in v {
            assert!(b.residual(p).abs() < 1e-14);
        }
        assert!(n4_self_vertices(&Billiard::with_ratio(1.3).unwrap(), 0.0).is_err());
    }
}

//! Caustic polynomials and the closed-form caustics they select.

use serde::Serialize;

use crate::conic::{Billiard, ConfocalConic, Vec2};
use crate::error::{Error, Result};
use crate::poly::{pick, real_roots, Poly, RootPredicate};

use super::{Tag, Topology};

fn roots_of(p: &Poly) -> Result<Vec<f64>> {
    Ok(real_roots(p, 1e-15)?.iter().map(|r| r.value).collect())
}

fn nonexistent(t: &Topology, why: &str) -> Error {
    Error::FamilyNonexistent(format!("{t}: {why}"))
}

/// Bi-sextic whose roots in (0, a) are the 5-periodic caustic semi-axes, as a sextic in y = x².
pub fn p5_in_square(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let (a6, b6, a8, b8) = (a4 * a2, b4 * b2, a4 * a4, b4 * b4);
    let c2 = b.c2();
    let c4 = c2 * c2;
    Poly::new(vec![
        a.powi(24),
        -2.0 * a.powi(14) * (3.0 * a8 - 3.0 * a6 * b2 + 22.0 * a4 * b4 - 48.0 * a2 * b6 + 32.0 * b8),
        a.powi(12) * (15.0 * a8 - 30.0 * a6 * b2 + 191.0 * a4 * b4 - 368.0 * a2 * b6 + 208.0 * b8),
        -4.0 * c4 * a.powi(10) * (5.0 * a4 - 5.0 * a2 * b2 + 66.0 * b4),
        c4 * a4 * (15.0 * a8 - 30.0 * a6 * b2 + 191.0 * a4 * b4 + 16.0 * a2 * b6 + 16.0 * b8),
        -2.0 * c4 * a2 * (3.0 * a8 - 9.0 * a6 * b2 + 31.0 * a4 * b4 + a2 * b6 + 6.0 * b8),
        c2.powi(6),
    ])
}

/// The same bi-sextic in x.
pub fn p5(b: &Billiard) -> Poly {
    Poly::from_even(&p5_in_square(b).coeffs)
}

/// Degree-12 polynomial whose three smallest roots give the 7-periodic caustics.
pub fn p7(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let (a4, b4) = (a2 * a2, b2 * b2);
    let (a6, b6, a8, b8) = (a4 * a2, b4 * b2, a4 * a4, b4 * b4);
    let c2 = b.c2();
    let c6 = c2 * c2 * c2;
    let mut c = vec![0.0; 13];
    c[12] = c6 * c6;
    c[11] = -4.0 * (a2 + b2) * c6 * a * (3.0 * a2 + b2) * b2;
    c[10] = -2.0 * c6 * a2 * (3.0 * a6 - 6.0 * a4 * b2 + 13.0 * a2 * b4 - 2.0 * b6);
    c[9] = (60.0 * a4 + 60.0 * b2 * a2 + 8.0 * b4) * c6 * a.powi(3);
    c[8] = a6 * c2 * (15.0 * a8 - 45.0 * a6 * b2 + 125.0 * a4 * b4 - 143.0 * a2 * b6 + 112.0 * b8);
    c[7] = -8.0 * a.powi(7) * b2 * c2 * (15.0 * a6 - 20.0 * a4 * b2 - 7.0 * a2 * b4 + 8.0 * b6);
    c[6] = -4.0 * a8 * c2 * (5.0 * a8 - 10.0 * a6 * b2 + 35.0 * a4 * b4 - 30.0 * a2 * b6 + 36.0 * b8);
    c[5] = 8.0 * a.powi(9) * b2 * c2 * (15.0 * a6 - 25.0 * a4 * b2 - 2.0 * a2 * b4 + 4.0 * b6);
    c[4] = a.powi(10) * c2 * (15.0 * a8 - 15.0 * a6 * b2 + 80.0 * a4 * b4 - 32.0 * a2 * b6 + 64.0 * b8);
    c[3] = -4.0 * a.powi(15) * b2 * (15.0 * a4 - 45.0 * b2 * a2 + 32.0 * b4);
    c[2] = -2.0 * a.powi(16) * (3.0 * a6 - 3.0 * a4 * b2 + 10.0 * a2 * b4 - 8.0 * b6);
    c[1] = 4.0 * a.powi(17) * b2 * (3.0 * a2 - 4.0 * b2) * (a2 - 2.0 * b2);
    c[0] = a.powi(24);
    Poly::new(c)
}

/// Quartic fixing the second vertex (a·x, b√(1−x²)) of the horizontal simple 8-periodic.
pub fn p8_simple(b: &Billiard) -> Poly {
    let (a2, b2, c2) = (b.a * b.a, b.b * b.b, b.c2());
    Poly::new(vec![-a2 * a2, 2.0 * a2 * c2, 2.0 * a2 * b2, -2.0 * a2 * c2, c2 * c2])
}

/// Degree-8 polynomial (quartic in x₁²) for the hyperbolic 8-periodics, in y = x₁².
pub fn p8_hyperbolic_in_square(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let (a4, b4, a6, b6) = (a2 * a2, b2 * b2, a2 * a2 * a2, b2 * b2 * b2);
    let c2 = b.c2();
    Poly::new(vec![
        a.powi(20) * (a4 - 8.0 * a2 * b2 + 8.0 * b4),
        -4.0 * a.powi(16) * c2.powi(2) * (a2 - 6.0 * b2),
        2.0 * a.powi(8) * c2.powi(3) * (3.0 * a6 - 15.0 * a4 * b2 - 4.0 * b6),
        -4.0 * a4 * c2.powi(4) * (a6 - 4.0 * a4 * b2 + a2 * b4 - 2.0 * b6),
        c2.powi(8),
    ])
}

/// Degree-8 polynomial (quartic in x₁²) for the type III 8-periodic, in y = x₁².
pub fn p8_type3_in_square(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let (a4, b4, a6, b6) = (a2 * a2, b2 * b2, a2 * a2 * a2, b2 * b2 * b2);
    let c4 = b.c2().powi(2);
    Poly::new(vec![
        a.powi(16),
        -4.0 * a.powi(8) * (a6 + a4 * b2 - 4.0 * a2 * b4 + 4.0 * b6),
        2.0 * a6 * (3.0 * a6 + 6.0 * a4 * b2 - 21.0 * a2 * b4 + 16.0 * b6),
        -4.0 * a4 * (a2 + 5.0 * b2) * c4,
        (a4 + 6.0 * a2 * b2 + b4) * c4,
    ])
}

/// Quartic in ω with α = a/b for the type III 8-periodic; ω = x₁²/b².
pub fn p8_type3_omega(b: &Billiard) -> Poly {
    let al = b.a / b.b;
    let al2 = al * al;
    let m = (al2 - 1.0).powi(2);
    Poly::new(vec![
        al.powi(16),
        -4.0 * (al2 * al2 * al2 + al2 * al2 - 4.0 * al2 + 4.0) * al.powi(8),
        2.0 * (3.0 * (al2 * al2 + 2.0 * al2 - 7.0) * al2 + 16.0) * al.powi(6),
        -4.0 * m * (al2 + 5.0) * al2 * al2,
        m * (al2 * al2 + 6.0 * al2 + 1.0),
    ])
}

/// Sextic for the abscissa x₂ of the horizontal simple 5-periodic.
pub fn n5_x2_poly(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2, c2) = (a * a, bb * bb, b.c2());
    let c4 = c2 * c2;
    Poly::new(vec![
        -a.powi(12),
        2.0 * a.powi(9) * (2.0 * a2 - b2),
        -a.powi(8) * (5.0 * a2 - 9.0 * b2),
        -8.0 * a.powi(5) * b2 * c2,
        a2 * (5.0 * a2 + 4.0 * b2) * c4,
        -2.0 * a * (2.0 * a2 - b2) * c4,
        c4 * c2,
    ])
}

/// Sextic for the abscissa x₃ of the horizontal simple 5-periodic.
pub fn n5_x3_poly(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2, c2) = (a * a, bb * bb, b.c2());
    let k = 3.0 * a2 * a2 - 3.0 * a2 * b2 + 4.0 * b2 * b2;
    Poly::new(vec![
        -a.powi(12),
        -2.0 * a.powi(7) * b2 * (3.0 * a2 - 4.0 * b2),
        a.powi(6) * k,
        12.0 * a.powi(5) * b2 * c2,
        -a2 * c2 * k,
        -2.0 * a * b2 * c2 * (3.0 * a2 + b2),
        c2 * c2 * c2,
    ])
}

/// Polynomial in s = r² whose smallest positive root gives r = J/2 for the simple 5-periodic.
pub fn n5_j_poly_in_square(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2, c2) = (a * a, bb * bb, b.c2());
    let c4 = c2 * c2;
    Poly::new(vec![
        5.0,
        -40.0 * (a2 + b2),
        -16.0 * (3.0 * a2 - 4.0 * a * bb - 3.0 * b2) * (3.0 * a2 + 4.0 * a * bb - 3.0 * b2),
        2304.0 * (a2 + b2) * c4,
        -256.0 * (29.0 * a2 * a2 + 54.0 * a2 * b2 + 29.0 * b2 * b2) * c4,
        2048.0 * (3.0 * a2 + b2) * (a2 + 3.0 * b2) * (a2 + b2) * c4,
        4096.0 * c4 * c4 * c4,
    ])
}

/// The rational perimeter expression p/q of the simple 5-periodic, evaluated at `r`.
pub fn n5_perimeter_pq(b: &Billiard, r: f64) -> f64 {
    let (a, bb) = (b.a, b.b);
    let (a2, b2, c2) = (a * a, bb * bb, b.c2());
    let c4 = c2 * c2;
    let j = r;
    let p =
        (1024.0 * (a2 + b2) * c4 * b2 * j.powi(7) - 256.0 * c4 * b2 * j.powi(5) - 64.0 * (a2 + b2) * b2 * j.powi(3)
            + 16.0 * j * b2)
            * (1.0 - 4.0 * a2 * j * j).sqrt()
            - 1024.0 * c2 * (5.0 * a2 * a2 + 2.0 * a2 * b2 + b2 * b2) * b2 * j.powi(7)
            + 256.0 * c2 * (3.0 * a2 + b2) * b2 * j.powi(5)
            + 64.0 * c2 * b2 * j.powi(3)
            + 16.0 * j * b2;
    let q = 256.0 * c4 * c4 * j.powi(8) - 256.0 * c2 * (a2 + b2).powi(2) * j.powi(6)
        + 32.0 * c2 * (3.0 * a2 + 5.0 * b2) * j.powi(4)
        - 16.0 * c2 * j * j
        + 1.0;
    p / q
}

/// Abscissae, Joachimsthal constant and perimeter of the horizontal simple 5-periodic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct N5Aux {
    pub x2: f64,
    pub x3: f64,
    pub j: f64,
    pub l: f64,
}

pub fn n5_invariants_aux(b: &Billiard) -> Result<N5Aux> {
    if b.is_circle() {
        return Err(Error::Domain("the auxiliary 5-periodic formulas need a > b".into()));
    }
    let x2 = pick(&roots_of(&n5_x2_poly(b))?, RootPredicate::SmallestPositive)?;
    let x3 = pick(&roots_of(&n5_x3_poly(b))?, RootPredicate::OnlyNegative)?;
    let s = pick(&roots_of(&n5_j_poly_in_square(b))?, RootPredicate::SmallestPositive)?;
    let r = s.sqrt();
    Ok(N5Aux { x2, x3, j: 2.0 * r, l: n5_perimeter_pq(b, r) })
}

/// Pure closed-form or polynomial caustic for a topology (no closure refinement).
pub fn caustic(b: &Billiard, t: &Topology) -> Result<ConfocalConic> {
    let (a, bb, c2) = (b.a, b.b, b.c2());
    let c = c2.sqrt();
    let a2 = match (t.n, t.tag) {
        // a(δ − b²)/c² with the cancellation removed.
        (3, Tag::Simple) => a.powi(3) / (b.delta() + bb * bb),
        (4, Tag::Simple) => a * a / (a * a + bb * bb).sqrt(),
        (4, Tag::TypeI) => {
            let k = a * a - 2.0 * bb * bb;
            if k <= 1e-12 * a * a {
                return Err(nonexistent(t, "a/b > √2 required"));
            }
            a * k.sqrt() / c
        }
        (5, tag) => {
            let ys = roots_of(&p5_in_square(b))?;
            let xs: Vec<f64> = ys.iter().filter(|y| **y > 0.0 && **y < a * a).map(|y| y.sqrt()).collect();
            let x = match tag {
                Tag::Simple => xs.last(),
                _ => xs.first(),
            };
            let x = *x.ok_or_else(|| nonexistent(t, "no caustic root in (0, a)"))?;
            if x <= c {
                return Err(nonexistent(t, "caustic root does not exceed the focal distance"));
            }
            x
        }
        (6, Tag::Simple) => a * (a * (a + 2.0 * bb)).sqrt() / (a + bb),
        (6, Tag::TypeI) => {
            if a <= 2.0 * bb * (1.0 + 1e-12) {
                return Err(nonexistent(t, "a/b > 2 required"));
            }
            a.powf(1.5) * (a - 2.0 * bb).sqrt() / (a - bb)
        }
        (6, Tag::TypeII) => {
            if a <= 2.0 * bb / 3f64.sqrt() * (1.0 + 1e-12) {
                return Err(nonexistent(t, "a/b > 2/√3 required"));
            }
            let s = a.powi(3) * (3.0 * a * c - 2.0 * bb * bb) / (c * (3.0 * a * a + bb * bb));
            s.sqrt()
        }
        (7, tag) => {
            let rs: Vec<f64> = roots_of(&p7(b))?.into_iter().filter(|r| r.abs() < a).collect();
            let idx = match tag {
                Tag::Simple => 0,
                Tag::TypeI => 2,
                _ => 1,
            };
            let r = *rs.get(idx).ok_or_else(|| nonexistent(t, "missing caustic root"))?;
            if r.abs() <= c {
                return Err(nonexistent(t, "caustic root does not exceed the focal distance"));
            }
            r.abs()
        }
        (8, Tag::Simple) => {
            let x = pick(&roots_of(&p8_simple(b))?, RootPredicate::InInterval { lo: 0.0, hi: 1.0, rank: 0 })?;
            n8_simple_caustic_from_root(b, x)?
        }
        (8, Tag::TypeI) | (8, Tag::TypeII) => {
            let x1 = n8_hyperbolic_x1(b, t)?;
            c * x1 / a
        }
        (8, Tag::TypeIII) => {
            let x1 = n8_type3_x1(b)?;
            if x1 <= c {
                return Err(nonexistent(t, "caustic root does not exceed the focal distance"));
            }
            x1
        }
        _ => return Err(Error::Invalid(format!("no construction for {t}"))),
    };
    if !b.is_circle() && (a2 - c).abs() <= 1e-8 * a {
        return Err(Error::IllConditioned(format!(
            "{t}: caustic semi-axis {a2} lies within 1e-8·a of the focal distance {c}"
        )));
    }
    ConfocalConic::from_major(b, a2)
}

fn n8_simple_caustic_from_root(b: &Billiard, x: f64) -> Result<f64> {
    let p1 = Vec2::new(b.a, 0.0);
    let p2 = Vec2::new(b.a * x, b.b * (1.0 - x * x).sqrt());
    let n = (p2 - p1).perp();
    let h = n.dot(p1);
    let (u, v) = (n.x / h, n.y / h);
    Ok(((1.0 + b.c2() * v * v) / (u * u + v * v)).sqrt())
}

/// Abscissa where a hyperbolic 8-periodic caustic meets the billiard.
pub fn n8_hyperbolic_x1(b: &Billiard, t: &Topology) -> Result<f64> {
    if b.is_circle() {
        return Err(nonexistent(t, "no hyperbolic caustic in a circle"));
    }
    let a = b.a;
    let xs: Vec<f64> =
        roots_of(&p8_hyperbolic_in_square(b))?.into_iter().filter(|y| *y > 0.0 && *y < a * a).map(f64::sqrt).collect();
    match t.tag {
        Tag::TypeI if xs.len() >= 2 => Ok(xs[0]),
        Tag::TypeI => Err(nonexistent(t, "needs two admissible roots (a/b above about 2.6)")),
        _ => xs.last().copied().ok_or_else(|| nonexistent(t, "no admissible root")),
    }
}

/// x₁ of the doubled-up type III 8-periodic, from the ω quartic, cross-checked
/// against the degree-8 polynomial in x₁.
pub fn n8_type3_x1(b: &Billiard) -> Result<f64> {
    let w = pick(&roots_of(&p8_type3_omega(b))?, RootPredicate::SmallestPositive)?;
    let y = pick(&roots_of(&p8_type3_in_square(b))?, RootPredicate::SmallestPositive)?;
    let x_omega = b.b * w.sqrt();
    let x_direct = y.sqrt();
    if (x_omega - x_direct).abs() > 1e-8 * b.a {
        return Err(Error::Degenerate(format!("type III polynomials disagree: {x_omega} vs {x_direct}")));
    }
    Ok(x_omega)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn topo(n: usize, tag: Tag) -> Topology {
        Topology::new(n, tag).unwrap()
    }

    #[test]
    fn p5_circle_roots() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        let rs = roots_of(&p5(&b)).unwrap();
        let s5 = 5f64.sqrt();
        for want in [(s5 - 1.0) / 4.0, (s5 + 1.0) / 4.0] {
            assert!(rs.iter().any(|r| (r - want).abs() < 1e-12), "{rs:?}");
        }
    }

    #[test]
    fn p7_circle_roots() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        let rs = roots_of(&p7(&b)).unwrap();
        let want = [-0.9009688680, -0.2225209340, 0.6234898025];
        assert_eq!(rs.len(), 3);
        for (g, w) in rs.iter().zip(want) {
            assert!((g - w).abs() < 1e-9);
        }
    }

    #[test]
    fn circle_caustics_are_cosines() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        use std::f64::consts::PI;
        let cases = [
            (5, Tag::Simple, PI / 5.0),
            (5, Tag::TypeI, 2.0 * PI / 5.0),
            (7, Tag::Simple, PI / 7.0),
            (7, Tag::TypeI, 2.0 * PI / 7.0),
            (7, Tag::TypeII, 3.0 * PI / 7.0),
            (8, Tag::Simple, PI / 8.0),
            (8, Tag::TypeIII, 3.0 * PI / 8.0),
            (3, Tag::Simple, PI / 3.0),
            (6, Tag::Simple, PI / 6.0),
            (4, Tag::Simple, PI / 4.0),
        ];
        for (n, tag, ang) in cases {
            let k = caustic(&b, &topo(n, tag)).unwrap();
            assert!((k.a2 - ang.cos()).abs() < 1e-9, "{n} {tag:?} {}", k.a2);
        }
    }

    #[test]
    fn type3_omega_is_scaled_square() {
        for ab in [1.05, 1.1, 1.2] {
            let b = Billiard::with_ratio(ab).unwrap();
            assert!(n8_type3_x1(&b).is_ok());
        }
        let b = Billiard::new(2.2, 2.0).unwrap();
        assert!(n8_type3_x1(&b).is_ok());
    }

    #[test]
    fn existence_windows() {
        let b = Billiard::with_ratio(1.3).unwrap();
        assert!(matches!(caustic(&b, &topo(4, Tag::TypeI)), Err(Error::FamilyNonexistent(_))));
        assert!(matches!(caustic(&b, &topo(6, Tag::TypeI)), Err(Error::FamilyNonexistent(_))));
        assert!(caustic(&b, &topo(6, Tag::TypeII)).is_ok());
        let b = Billiard::with_ratio(1.1).unwrap();
        assert!(matches!(caustic(&b, &topo(6, Tag::TypeII)), Err(Error::FamilyNonexistent(_))));
    }

    #[test]
    fn n5_aux_matches_caustic() {
        let b = Billiard::with_ratio(1.2).unwrap();
        let aux = n5_invariants_aux(&b).unwrap();
        let k = caustic(&b, &topo(5, Tag::Simple)).unwrap();
        let j = b.joachimsthal_from_caustic(k.a2).unwrap();
        assert!((aux.j - j).abs() < 1e-9, "{} {}", aux.j, j);
    }
}

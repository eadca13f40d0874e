//! Catalogue of candidate invariants: literal measurement on an orbit and
//! closed forms in (a, b) or (J, L).

use std::fmt;

use serde::Serialize;

use crate::conic::{invert_point, Billiard, InversionContext, Polygon, Vec2};
use crate::error::{Error, Result};
use crate::orbit::{self, cayley, seeds, Orbit, Tag, Topology};
use crate::poly::{pick, real_roots, Poly, RootPredicate};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum InvariantCode {
    K101,
    K102,
    K103,
    K104,
    K105,
    K106,
    K110,
    K119,
    K802a,
    K803,
    K804,
    K805a,
    K806,
    K807,
    /// A/A″, defined for triangles only.
    K109,
}

use InvariantCode::*;

impl InvariantCode {
    /// The fourteen catalogue codes (k109 excluded).
    pub const ALL: [InvariantCode; 14] =
        [K101, K102, K103, K104, K105, K106, K110, K119, K802a, K803, K804, K805a, K806, K807];

    pub fn name(&self) -> &'static str {
        match self {
            K101 => "k101",
            K102 => "k102",
            K103 => "k103",
            K104 => "k104",
            K105 => "k105",
            K106 => "k106",
            K110 => "k110",
            K119 => "k119",
            K802a => "k802a",
            K803 => "k803",
            K804 => "k804",
            K805a => "k805a",
            K806 => "k806",
            K807 => "k807",
            K109 => "k109",
        }
    }

    pub fn definition(&self) -> &'static str {
        match self {
            K101 => "Σcos θ",
            K102 => "Π cos θ′",
            K103 => "A′/A",
            K104 => "Σcos 2θ′",
            K105 => "Π sin(θ/2)",
            K106 => "A′A",
            K110 => "A A″",
            K119 => "Σκ^(2/3)",
            K802a => "Σ1/d₁",
            K803 => "L₁†",
            K804 => "Σcos θ₁†",
            K805a => "A A₁†",
            K806 => "A/A₁†",
            K807 => "A₁†A₂†",
            K109 => "A/A″",
        }
    }

    pub fn parse(s: &str) -> Result<InvariantCode> {
        let t = s.trim().to_ascii_lowercase().replace([',', '_', '.'], "");
        ALL_WITH_K109
            .iter()
            .copied()
            .find(|c| c.name() == t)
            .ok_or_else(|| Error::Invalid(format!("unknown invariant code '{s}'")))
    }

    pub fn parse_list(s: &str) -> Result<Vec<InvariantCode>> {
        s.split(',').filter(|x| !x.trim().is_empty()).map(InvariantCode::parse).collect()
    }

    /// Parity constraint on N.
    pub fn valid_for(&self, n: usize) -> bool {
        match self {
            K103 | K105 | K807 => n % 2 == 1,
            K106 | K110 => n.is_multiple_of(2),
            K805a => n.is_multiple_of(4),
            K806 => n % 4 == 2,
            K109 => n == 3,
            _ => true,
        }
    }

    pub fn check_applicable(&self, t: &Topology) -> Result<()> {
        if self.valid_for(t.n) {
            Ok(())
        } else {
            Err(Error::Applicability { code: self.name().into(), topology: t.to_string() })
        }
    }

    /// Codes applicable at N.
    pub fn applicable(n: usize) -> Vec<InvariantCode> {
        InvariantCode::ALL.iter().copied().filter(|c| c.valid_for(n)).collect()
    }

    /// Power of the inversion radius the value scales with.
    pub fn rho_power(&self) -> i32 {
        match self {
            K803 => 2,
            K805a => 4,
            K806 => -4,
            K807 => 8,
            _ => 0,
        }
    }
}

const ALL_WITH_K109: [InvariantCode; 15] =
    [K101, K102, K103, K104, K105, K106, K110, K119, K802a, K803, K804, K805a, K806, K807, K109];

impl fmt::Display for InvariantCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivedPolygons {
    pub outer: Polygon,
    pub inner: Polygon,
    pub inversive1: Polygon,
    pub inversive2: Polygon,
}

impl DerivedPolygons {
    /// `ctx` picks the inversion radius and the focus of the first inversive
    /// polygon; the second uses the other focus.
    pub fn new(o: &Orbit, ctx: &InversionContext) -> Result<DerivedPolygons> {
        let b = &o.billiard;
        let other = InversionContext {
            focus: match ctx.focus {
                crate::conic::Focus::F1 => crate::conic::Focus::F2,
                crate::conic::Focus::F2 => crate::conic::Focus::F1,
            },
            rho: ctx.rho,
        };
        let inv = |c: &InversionContext| -> Result<Polygon> {
            let v = o.vertices.vertices.iter().map(|p| invert_point(b, c, *p)).collect::<Result<Vec<Vec2>>>()?;
            Ok(Polygon { vertices: v })
        };
        Ok(DerivedPolygons {
            outer: o.outer_polygon()?,
            inner: Polygon { vertices: inner_points(o) },
            inversive1: inv(ctx)?,
            inversive2: inv(&other)?,
        })
    }
}

fn inner_points(o: &Orbit) -> Vec<Vec2> {
    let v = &o.vertices.vertices;
    let n = v.len();
    (0..n).map(|i| o.caustic.touch_point(v[i], v[(i + 1) % n] - v[i])).collect()
}

/// Area of an inversive polygon; collinear images make the area codes degenerate.
fn inversive_area(p: &Polygon) -> Result<f64> {
    let a = p.signed_area();
    let l = p.perimeter();
    if a.abs() <= 1e-10 * l * l {
        return Err(Error::Degenerate("inversive polygon is collinear".into()));
    }
    Ok(a)
}

/// Literal value of `code` on the orbit.
pub fn measure(code: InvariantCode, o: &Orbit, d: &DerivedPolygons, ctx: &InversionContext) -> Result<f64> {
    code.check_applicable(&o.topology)?;
    let b = &o.billiard;
    let v = &o.vertices;
    let area = v.signed_area();
    let nonzero = |x: f64, what: &str| -> Result<f64> {
        if x.abs() <= 1e-13 * o.l * o.l {
            Err(Error::Degenerate(format!("{what} vanishes")))
        } else {
            Ok(x)
        }
    };
    Ok(match code {
        K101 => v.cos_angles().iter().sum(),
        K102 => d.outer.cos_angles().iter().product(),
        K103 => d.outer.signed_area() / nonzero(area, "orbit area")?,
        K104 => d.outer.cos_angles().iter().map(|c| 2.0 * c * c - 1.0).sum(),
        K105 => v.cos_angles().iter().map(|c| (0.5 * (1.0 - c)).max(0.0).sqrt()).product(),
        K106 => d.outer.signed_area() * area,
        K110 => area * d.inner.signed_area(),
        K119 => v.vertices.iter().map(|p| b.curvature(*p).powf(2.0 / 3.0)).sum(),
        K802a => {
            let f = b.focus(ctx.focus);
            v.vertices.iter().map(|p| 1.0 / p.dist(f)).sum()
        }
        K803 => d.inversive1.perimeter(),
        K804 => d.inversive1.cos_angles().iter().sum(),
        K805a => area * inversive_area(&d.inversive1)?,
        K806 => area / inversive_area(&d.inversive1)?,
        K807 => inversive_area(&d.inversive1)? * inversive_area(&d.inversive2)?,
        K109 => area / nonzero(d.inner.signed_area(), "inner area")?,
    })
}

/// Measures every code in `codes`, keeping per-code errors.
pub fn measure_many(
    codes: &[InvariantCode],
    o: &Orbit,
    ctx: &InversionContext,
) -> Result<Vec<(InvariantCode, Result<f64>)>> {
    let d = DerivedPolygons::new(o, ctx)?;
    Ok(codes.iter().map(|c| (*c, measure(*c, o, &d, ctx))).collect())
}

/// Right-hand side of the universal curvature identity, L/(2J(ab)^{4/3}).
pub fn k119_universal(o: &Orbit) -> f64 {
    let b = &o.billiard;
    o.l / (2.0 * o.j * (b.a * b.b).powf(4.0 / 3.0))
}

/// Which expression kinds a registry entry carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FormKind {
    AB,
    JL,
    Root,
    /// Evaluated on the axis-symmetric representative.
    Representative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClosedForm {
    pub code: InvariantCode,
    pub topology: Topology,
    pub kinds: Vec<FormKind>,
}

fn t(n: usize, tag: Tag) -> Topology {
    Topology::new(n, tag).expect("registry topology")
}

/// Every (code, topology) with a derived expression.
pub fn registry() -> Vec<ClosedForm> {
    use FormKind::*;
    use Tag::*;
    let e = |code, n, tag, kinds: &[FormKind]| ClosedForm { code, topology: t(n, tag), kinds: kinds.to_vec() };
    vec![
        e(K102, 3, Simple, &[JL]),
        e(K102, 4, Simple, &[AB]),
        e(K102, 5, Simple, &[Root]),
        e(K102, 5, TypeI, &[Root]),
        e(K102, 6, Simple, &[AB, JL]),
        e(K102, 6, TypeI, &[AB, JL]),
        e(K102, 6, TypeII, &[AB, JL]),
        e(K103, 3, Simple, &[JL]),
        e(K103, 5, Simple, &[Root]),
        e(K103, 5, TypeI, &[Root]),
        e(K104, 3, Simple, &[AB, JL]),
        e(K104, 4, Simple, &[AB]),
        e(K104, 5, Simple, &[Root]),
        e(K104, 5, TypeI, &[Root]),
        e(K104, 6, Simple, &[JL]),
        e(K104, 6, TypeI, &[AB, JL]),
        e(K104, 8, Simple, &[AB]),
        e(K105, 3, Simple, &[JL]),
        e(K105, 5, Simple, &[Root]),
        e(K105, 5, TypeI, &[Root]),
        e(K106, 4, Simple, &[AB]),
        e(K106, 6, Simple, &[AB, JL]),
        e(K106, 6, TypeI, &[AB, JL]),
        e(K106, 6, TypeII, &[AB]),
        e(K110, 4, Simple, &[AB]),
        e(K110, 6, Simple, &[AB, JL]),
        e(K110, 6, TypeI, &[AB, JL]),
        e(K110, 6, TypeII, &[AB]),
        e(K119, 3, Simple, &[AB, JL]),
        e(K119, 4, Simple, &[AB]),
        e(K119, 6, Simple, &[JL]),
        e(K802a, 3, Simple, &[AB, JL]),
        e(K802a, 4, Simple, &[AB]),
        e(K802a, 6, Simple, &[AB, JL]),
        e(K803, 3, Simple, &[AB]),
        e(K803, 4, Simple, &[AB]),
        e(K803, 6, Simple, &[AB]),
        e(K804, 3, Simple, &[AB]),
        e(K805a, 4, Simple, &[AB]),
        e(K805a, 8, Simple, &[Representative]),
        e(K806, 6, Simple, &[AB]),
        e(K807, 3, Simple, &[AB]),
    ]
}

pub fn registry_entry(code: InvariantCode, t: &Topology) -> Option<ClosedForm> {
    registry().into_iter().find(|e| e.code == code && e.topology == *t)
}

fn not_derived(code: InvariantCode, t: &Topology) -> Error {
    Error::NotDerived { code: code.name().into(), topology: t.to_string() }
}

/// Perimeter from an explicit expression, where one exists.
pub fn perimeter_closed_form(b: &Billiard, t: &Topology) -> Result<Option<f64>> {
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let c = b.c();
    Ok(Some(match (t.n, t.tag) {
        (3, Tag::Simple) => {
            let k = orbit::caustic(b, t)?;
            2.0 * (b.delta() + a2 + b2) * b.joachimsthal_from_caustic(k.a2)?
        }
        (4, Tag::Simple) => 4.0 * (a2 + b2).sqrt(),
        (4, Tag::TypeI) => {
            orbit::caustic(b, t)?;
            4.0 * a2 / c
        }
        (5, Tag::Simple) if !b.is_circle() => cayley::n5_invariants_aux(b)?.l,
        (6, Tag::Simple) => 4.0 * (a2 + a * bb + b2) / (a + bb),
        (6, Tag::TypeI) => {
            orbit::caustic(b, t)?;
            4.0 * (a2 - a * bb + b2) / (a - bb)
        }
        (6, Tag::TypeII) => {
            orbit::caustic(b, t)?;
            4.0 * (a + c) * (2.0 * a / c - 1.0).sqrt()
        }
        _ => return Ok(None),
    }))
}

/// J from the caustic and L from its closed form, or measured on a family member.
pub fn j_and_l(b: &Billiard, t: &Topology) -> Result<(f64, f64)> {
    let k = orbit::caustic(b, t)?;
    let j = b.joachimsthal_from_caustic(k.a2)?;
    let l = match perimeter_closed_form(b, t)? {
        Some(l) => l,
        None => orbit::build(b, t, 0.0)?.l,
    };
    Ok((j, l))
}

fn root_of(p: Poly, pred: RootPredicate) -> Result<f64> {
    let r: Vec<f64> = real_roots(&p, 1e-15)?.iter().map(|r| r.value).collect();
    pick(&r, pred)
}

/// Sextic in k102 for N = 5.
pub fn n5_k102_poly(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let c2 = b.c2();
    let c4 = c2 * c2;
    let p = |k: i32| a.powi(k);
    let q = |k: i32| bb.powi(k);
    Poly::new(vec![
        -p(10) * q(10),
        -8.0 * p(8) * q(8) * (7.0 * a2 * a2 + 30.0 * a2 * b2 + 7.0 * b2 * b2),
        -16.0 * p(6) * q(6) * (7.0 * p(8) - 96.0 * p(6) * b2 + 114.0 * p(4) * q(4) - 96.0 * a2 * q(6) + 7.0 * q(8)),
        -64.0
            * a2
            * b2
            * (4.0 * p(12) - 27.0 * p(10) * b2 + 38.0 * p(8) * q(4) - 126.0 * p(6) * q(6) + 38.0 * p(4) * q(8)
                - 27.0 * a2 * q(10)
                + 4.0 * q(12))
            * c4,
        256.0
            * (4.0 * p(12) - p(10) * b2 + 32.0 * p(8) * q(4) - 22.0 * p(6) * q(6) + 32.0 * p(4) * q(8) - a2 * q(10)
                + 4.0 * q(12))
            * c4
            * c4,
        2048.0 * (p(4) + p(3) * bb - a * q(3) + q(4)) * (p(4) - p(3) * bb + a * q(3) + q(4)) * c4 * c4 * c4,
        1024.0 * c4.powi(5),
    ])
}

/// Sextic in k103 for N = 5.
pub fn n5_k103_poly(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let p = |k: i32| a.powi(k);
    let q = |k: i32| bb.powi(k);
    let (a2, b2) = (p(2), q(2));
    let c4 = b.c2() * b.c2();
    Poly::new(vec![
        -c4 * c4 * c4,
        (2.0 * p(8) + 12.0 * p(6) * b2 + 36.0 * p(4) * q(4) + 12.0 * a2 * q(6) + 2.0 * q(8)) * c4,
        (4.0 * p(8) + 19.0 * p(6) * b2 + 66.0 * p(4) * q(4) + 19.0 * a2 * q(6) + 4.0 * q(8)) * c4,
        12.0 * b2 * a2 * (p(4) + q(4)) * c4,
        -b2 * a2 * (4.0 * p(8) + 19.0 * p(6) * b2 - 62.0 * p(4) * q(4) + 19.0 * a2 * q(6) + 4.0 * q(8)),
        -2.0 * b2 * a2 * (4.0 * p(8) - p(6) * b2 - a2 * q(6) + 4.0 * q(8)),
        p(6) * q(6),
    ])
}

/// Sextic in k104 for N = 5.
pub fn n5_k104_poly(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let p = |k: i32| a.powi(k);
    let q = |k: i32| bb.powi(k);
    let (a2, b2) = (p(2), q(2));
    let c4 = b.c2() * b.c2();
    Poly::new(vec![
        -675.0 * p(12) - 850.0 * p(10) * b2 + 1075.0 * p(8) * q(4) - 3900.0 * p(6) * q(6) + 1075.0 * p(4) * q(8)
            - 850.0 * a2 * q(10)
            - 675.0 * q(12),
        270.0 * p(12) + 740.0 * p(10) * b2 - 3630.0 * p(8) * q(4) + 7160.0 * p(6) * q(6) - 3630.0 * p(4) * q(8)
            + 740.0 * a2 * q(10)
            + 270.0 * q(12),
        423.0 * p(12) - 354.0 * p(10) * b2 + 2713.0 * p(8) * q(4) - 4796.0 * p(6) * q(6) + 2713.0 * p(4) * q(8)
            - 354.0 * a2 * q(10)
            + 423.0 * q(12),
        4.0 * (5.0 * p(8) + 92.0 * p(6) * b2 + 62.0 * p(4) * q(4) + 92.0 * a2 * q(6) + 5.0 * q(8)) * c4,
        -(37.0 * p(4) - 6.0 * a2 * b2 + 37.0 * q(4)) * c4 * c4,
        -2.0 * (p(4) + 10.0 * a2 * b2 + q(4)) * c4 * c4,
        c4 * c4 * c4,
    ])
}

/// Sextic in k105 for N = 5.
pub fn n5_k105_poly(b: &Billiard) -> Poly {
    let (a, bb) = (b.a, b.b);
    let p = |k: i32| a.powi(k);
    let q = |k: i32| bb.powi(k);
    let (a2, b2) = (p(2), q(2));
    let c4 = b.c2() * b.c2();
    Poly::new(vec![
        -p(10) * q(10),
        -16.0
            * a2
            * b2
            * (16.0 * p(16) - 12.0 * p(14) * b2
                + 5.0 * p(12) * q(4)
                + p(10) * q(6)
                + 2.0 * p(8) * q(8)
                + p(6) * q(10)
                + 5.0 * p(4) * q(12)
                - 12.0 * a2 * q(14)
                + 16.0 * q(16)),
        -64.0
            * a2
            * b2
            * (8.0 * p(16) - 53.0 * p(14) * b2 + 253.0 * p(12) * q(4) - 1041.0 * p(10) * q(6) + 1650.0 * p(8) * q(8)
                - 1041.0 * p(6) * q(10)
                + 253.0 * p(4) * q(12)
                - 53.0 * a2 * q(14)
                + 8.0 * q(16)),
        64.0 * a2
            * b2
            * (4.0 * p(12) + 9.0 * p(10) * b2 - 318.0 * p(8) * q(4) - 126.0 * p(6) * q(6) - 318.0 * p(4) * q(8)
                + 9.0 * a2 * q(10)
                + 4.0 * q(12))
            * c4,
        256.0
            * (4.0 * p(12)
                + 30.0 * p(10) * b2
                + 71.0 * p(8) * q(4)
                + 350.0 * p(6) * q(6)
                + 71.0 * p(4) * q(8)
                + 30.0 * a2 * q(10)
                + 4.0 * q(12))
            * c4
            * c4,
        1024.0
            * (2.0 * p(12)
                + p(10) * b2
                + 26.0 * p(8) * q(4)
                + 70.0 * p(6) * q(6)
                + 26.0 * p(4) * q(8)
                + a2 * q(10)
                + 2.0 * q(12))
            * c4
            * c4,
        1024.0 * c4.powi(5),
    ])
}

fn n5_root(code: InvariantCode, b: &Billiard, simple: bool) -> Result<f64> {
    use RootPredicate::*;
    if b.is_circle() {
        return Err(Error::Domain("the 5-periodic invariant sextics degenerate for a = b".into()));
    }
    match (code, simple) {
        (K102, true) => root_of(n5_k102_poly(b), LargestNegative),
        (K102, false) => root_of(n5_k102_poly(b), LargestPositive),
        (K103, true) => root_of(n5_k103_poly(b), SmallestGreaterThan(1.0)),
        (K103, false) => root_of(n5_k103_poly(b), LargestGreaterThan(1.0)),
        (K104, true) => root_of(n5_k104_poly(b), OnlyNegative),
        (K104, false) => root_of(n5_k104_poly(b), SmallestPositive),
        (K105, true) => root_of(n5_k105_poly(b), LargestPositive),
        (K105, false) => root_of(n5_k105_poly(b), LargestNegative).map(|r| -r),
        _ => Err(Error::Invalid(format!("no 5-periodic sextic for {code}"))),
    }
}

/// A·A₁† evaluated on the 8-periodic through (a, 0).
fn k805a_n8(b: &Billiard, ctx: &InversionContext) -> Result<f64> {
    let t = Topology::simple(8)?;
    let v = seeds::representative(b, &t)?.ok_or_else(|| not_derived(K805a, &t))?;
    let p = Polygon::new(v)?;
    let f = b.focus(ctx.focus);
    let n = p.len();
    let w: Vec<Vec2> = p.vertices.iter().map(|q| *q - f).collect();
    let inv_area = 0.5
        * (0..n)
            .map(|i| {
                let (x, y) = (w[i], w[(i + 1) % n]);
                x.cross(y) / (x.dot(x) * y.dot(y))
            })
            .sum::<f64>();
    Ok(p.signed_area() * inv_area * ctx.rho.powi(4))
}

/// Value of the (a, b) expression (or the polynomial root or representative).
pub fn closed_form(code: InvariantCode, b: &Billiard, t: &Topology, ctx: &InversionContext) -> Result<f64> {
    let e = registry_entry(code, t).ok_or_else(|| not_derived(code, t))?;
    orbit::caustic(b, t)?;
    if e.kinds.contains(&FormKind::Root) {
        return n5_root(code, b, t.is_simple());
    }
    if e.kinds.contains(&FormKind::Representative) {
        return k805a_n8(b, ctx);
    }
    if !e.kinds.contains(&FormKind::AB) {
        return closed_form_jl(code, b, t)?.ok_or_else(|| not_derived(code, t));
    }
    let (a, bb) = (b.a, b.b);
    let (a2, b2) = (a * a, bb * bb);
    let c2 = b.c2();
    let c = c2.sqrt();
    let d = b.delta();
    let rho = ctx.rho;
    let ab43 = (a * bb).powf(4.0 / 3.0);
    let v = match (code, t.n, t.tag) {
        (K102, 4, _) => 0.0,
        (K102, 6, Tag::Simple) => a2 * b2 / (4.0 * (a + bb).powi(4)),
        (K102, 6, Tag::TypeI) => a2 * b2 / (4.0 * (a - bb).powi(4)),
        (K102, 6, Tag::TypeII) => a2 * (a - c).powi(2) / (4.0 * c2 * c2),
        (K104, 3, _) => (a2 + b2) * (a2 + b2 - 2.0 * d) / (c2 * c2),
        (K104, 4, _) => -4.0,
        (K104, 6, Tag::TypeI) => -2.0 * (a2 - 4.0 * a * bb + b2) / (a - bb).powi(2),
        (K104, 8, _) => 0.0,
        (K106, 4, _) => 8.0 * a2 * b2,
        (K106, 6, Tag::Simple) => 4.0 * b2 * (2.0 * a + bb) * a2 * (a + 2.0 * bb) / (a + bb).powi(2),
        (K106, 6, Tag::TypeI) => 4.0 * a2 * b2 * (a - 2.0 * bb) * (2.0 * a - bb) / (a - bb).powi(2),
        (K106, 6, Tag::TypeII) => 0.0,
        (K110, 4, _) => 8.0 * a2 * a2 * b2 * b2 / (a2 + b2).powi(2),
        (K110, 6, Tag::Simple) => {
            4.0 * (a * bb).powi(3) * (2.0 * a + bb).powi(2) * (a + 2.0 * bb).powi(2) / (a + bb).powi(6)
        }
        (K110, 6, Tag::TypeI) => {
            -4.0 * (a * bb).powi(3) * (a - 2.0 * bb).powi(2) * (2.0 * a - bb).powi(2) / (a - bb).powi(6)
        }
        (K110, 6, Tag::TypeII) => 0.0,
        (K119, 3, _) => (a2 + b2 + d) / ab43,
        (K119, 4, _) => 2.0 * (a2 + b2) / ab43,
        (K802a, 3, _) => (a2 + b2 + d) / (a * b2),
        (K802a, 4, _) => 2.0 * (a2 + b2) / (a * b2),
        (K802a, 6, _) => 2.0 * (a2 + a * bb + b2) / (a * b2),
        (K803, 3, _) => {
            rho * rho
                * ((8.0 * a2 * a2 + 4.0 * a2 * b2 + 2.0 * b2 * b2) * d
                    + 8.0 * a2 * a2 * a2
                    + 3.0 * a2 * b2 * b2
                    + 2.0 * b2 * b2 * b2)
                    .sqrt()
                / (a2 * b2)
        }
        (K803, 4, _) => rho * rho * 4.0 * (a2 + b2).sqrt() / b2,
        (K803, 6, _) => 2.0 * rho * rho * (2.0 * a2 + 2.0 * a * bb - b2) / (a * b2),
        (K804, 3, _) => d * (a2 + c2 - d) / (a2 * c2),
        (K805a, 4, _) => 4.0 * rho.powi(4),
        (K806, 6, _) => 4.0 * rho.powi(-4) * a.powi(3) * b2 * b2 / ((2.0 * a - bb) * (a + bb).powi(2)),
        (K807, 3, _) => {
            rho.powi(8) / (8.0 * a.powi(8) * b2)
                * ((a2 * a2 + 2.0 * a2 * b2 + 4.0 * b2 * b2) * d
                    + a2 * a2 * a2
                    + 1.5 * a2 * a2 * b2
                    + 4.0 * b2 * b2 * b2)
        }
        _ => return Err(not_derived(code, t)),
    };
    Ok(v)
}

/// Value of the (J, L) expression, if the entry has one.
pub fn closed_form_jl(code: InvariantCode, b: &Billiard, t: &Topology) -> Result<Option<f64>> {
    let Some(e) = registry_entry(code, t) else {
        return Err(not_derived(code, t));
    };
    if !e.kinds.contains(&FormKind::JL) {
        return Ok(None);
    }
    let (j, l) = j_and_l(b, t)?;
    let x = j * l;
    let v = match (code, t.n, t.tag) {
        (K102, 3, _) | (K105, 3, _) => x / 4.0 - 1.0,
        (K103, 3, _) => 2.0 / (x - 4.0),
        (K104, 3, _) => 3.0 - x,
        (K119, 3, _) => (2.0 * j.powi(3) * l / (x - 4.0).powi(2)).cbrt(),
        (K802a, 3, _) => j * 2f64.sqrt() * (x + (9.0 - 2.0 * x).sqrt() - 3.0).sqrt() / (x - 4.0),
        (K102, 6, Tag::Simple) | (K102, 6, Tag::TypeI) => (x - 4.0).powi(2) / 64.0,
        (K102, 6, Tag::TypeII) => (x - 8.0).powi(2) * (x - 4.0).powi(2) / 1024.0,
        (K104, 6, _) => x - 6.0,
        (K106, 6, _) => -(x - 12.0) * (x - 4.0).powi(2) / (16.0 * j.powi(4)),
        (K110, 6, Tag::Simple) => -(x - 12.0).powi(2) * (x - 4.0).powi(3) / (256.0 * j.powi(4)),
        (K110, 6, Tag::TypeI) => -(x - 12.0).powi(2) * (x - 4.0).powi(3) / (256.0 * j.powi(4)),
        (K119, 6, _) => (32.0 * j.powi(5) * l.powi(3) / (x - 4.0).powi(4)).cbrt(),
        (K802a, 6, _) => 4.0 * j * j * l * (1.0 + (x - 3.0).sqrt()) / (x - 4.0).powi(2),
        _ => return Ok(None),
    };
    Ok(Some(v))
}

/// |form_ab − form_JL| / max(1, |form_ab|).
pub fn dual_form_check(code: InvariantCode, b: &Billiard, t: &Topology) -> Result<f64> {
    let e = registry_entry(code, t).ok_or_else(|| not_derived(code, t))?;
    if !(e.kinds.contains(&FormKind::AB) && e.kinds.contains(&FormKind::JL)) {
        return Err(not_derived(code, t));
    }
    let ab = closed_form(code, b, t, &InversionContext::default())?;
    let jl = closed_form_jl(code, b, t)?.ok_or_else(|| not_derived(code, t))?;
    Ok((ab - jl).abs() / ab.abs().max(1.0))
}

/// (1/2¹²)(JL−4)²(JL−12)², the 8-periodic outer-angle product.
pub fn n8_k102_jl(b: &Billiard) -> Result<f64> {
    let (j, l) = j_and_l(b, &Topology::simple(8)?)?;
    let x = j * l;
    Ok((x - 4.0).powi(2) * (x - 12.0).powi(2) / 4096.0)
}

/// Relative residual, falling back to absolute for values near zero.
pub fn residual(measured: f64, closed: f64) -> f64 {
    if closed.abs() > 1e-9 {
        (measured - closed).abs() / closed.abs()
    } else {
        (measured - closed).abs()
    }
}

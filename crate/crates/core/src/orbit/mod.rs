//! N-periodic orbits: topology registry, caustics, tangent-chord chains.

pub mod cayley;
pub mod seeds;

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use crate::conic::{Billiard, CausticKind, ConfocalConic, Line, Polygon, Vec2};
use crate::error::{Error, Result};

pub use cayley::{caustic, n5_invariants_aux, N5Aux};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Tag {
    Simple,
    TypeI,
    TypeII,
    TypeIII,
}

impl Tag {
    pub fn parse(s: &str) -> Result<Tag> {
        match s.to_ascii_lowercase().replace(['_', '-', ' '], "").as_str() {
            "simple" | "s" | "0" => Ok(Tag::Simple),
            "type1" | "typei" | "i" | "1" | "self" | "bowtie" | "pentagram" => Ok(Tag::TypeI),
            "type2" | "typeii" | "ii" | "2" => Ok(Tag::TypeII),
            "type3" | "typeiii" | "iii" | "3" => Ok(Tag::TypeIII),
            _ => Err(Error::Invalid(format!("unknown topology tag '{s}'"))),
        }
    }

    pub fn short(&self) -> &'static str {
        match self {
            Tag::Simple => "simple",
            Tag::TypeI => "type1",
            Tag::TypeII => "type2",
            Tag::TypeIII => "type3",
        }
    }
}

/// One (N, type) entry of the registry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Topology {
    pub n: usize,
    pub tag: Tag,
    pub turning: i32,
    pub kind: CausticKind,
}

const E: CausticKind = CausticKind::Ellipse;
const H: CausticKind = CausticKind::Hyperbola;

const REGISTRY: [Topology; 15] = [
    Topology { n: 3, tag: Tag::Simple, turning: 1, kind: E },
    Topology { n: 4, tag: Tag::Simple, turning: 1, kind: E },
    Topology { n: 4, tag: Tag::TypeI, turning: 0, kind: H },
    Topology { n: 5, tag: Tag::Simple, turning: 1, kind: E },
    Topology { n: 5, tag: Tag::TypeI, turning: 2, kind: E },
    Topology { n: 6, tag: Tag::Simple, turning: 1, kind: E },
    Topology { n: 6, tag: Tag::TypeI, turning: 1, kind: H },
    Topology { n: 6, tag: Tag::TypeII, turning: 0, kind: H },
    Topology { n: 7, tag: Tag::Simple, turning: 1, kind: E },
    Topology { n: 7, tag: Tag::TypeI, turning: 2, kind: E },
    Topology { n: 7, tag: Tag::TypeII, turning: 3, kind: E },
    Topology { n: 8, tag: Tag::Simple, turning: 1, kind: E },
    Topology { n: 8, tag: Tag::TypeI, turning: 0, kind: H },
    // Measured: every member of this family has zero total turning.
    Topology { n: 8, tag: Tag::TypeII, turning: 0, kind: H },
    Topology { n: 8, tag: Tag::TypeIII, turning: 3, kind: E },
];

impl Topology {
    pub fn registry() -> &'static [Topology] {
        &REGISTRY
    }

    pub fn new(n: usize, tag: Tag) -> Result<Topology> {
        REGISTRY
            .iter()
            .find(|t| t.n == n && t.tag == tag)
            .copied()
            .ok_or_else(|| Error::Invalid(format!("no N={n} {} topology", tag.short())))
    }

    pub fn simple(n: usize) -> Result<Topology> {
        Topology::new(n, Tag::Simple)
    }

    pub fn is_simple(&self) -> bool {
        self.tag == Tag::Simple
    }

    /// Compact label such as "6ii".
    pub fn label(&self) -> String {
        let s = match self.tag {
            Tag::Simple => "",
            Tag::TypeI => "i",
            Tag::TypeII => "ii",
            Tag::TypeIII => "iii",
        };
        format!("{}{}", self.n, s)
    }
}

impl fmt::Display for Topology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = match self.tag {
            Tag::Simple => "simple",
            Tag::TypeI => "type I",
            Tag::TypeII => "type II",
            Tag::TypeIII => "type III",
        };
        write!(f, "N={} {}", self.n, t)
    }
}

/// How a family is parametrized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FamilyWindow {
    /// P₁ = (a cos t, b sin t), t in [0, 2π).
    Angle,
    /// P₁ = (a u, b√(1−u²)), |u| ≤ u_max (hyperbolic caustics).
    Abscissa { u_max: f64 },
}

pub fn window(b: &Billiard, t: &Topology) -> Result<FamilyWindow> {
    let k = caustic(b, t)?;
    Ok(match k.kind {
        CausticKind::Ellipse => FamilyWindow::Angle,
        CausticKind::Hyperbola => FamilyWindow::Abscissa { u_max: k.a2 / b.c() },
    })
}

impl FamilyWindow {
    pub fn point(&self, b: &Billiard, param: f64) -> Result<Vec2> {
        match *self {
            FamilyWindow::Angle => Ok(b.boundary_point(param)),
            FamilyWindow::Abscissa { u_max } => {
                if param.abs() > u_max * (1.0 + 1e-12) {
                    return Err(Error::Domain(format!("|u| = {} exceeds {u_max}", param.abs())));
                }
                Ok(b.upper_point(param))
            }
        }
    }

    /// `n` evenly spaced family parameters; abscissa windows keep a relative
    /// `margin` away from the doubled-up ends.
    pub fn samples(&self, n: usize, margin: f64, offset: f64) -> Vec<f64> {
        match *self {
            FamilyWindow::Angle => (0..n).map(|i| offset + 2.0 * PI * i as f64 / n as f64).collect(),
            FamilyWindow::Abscissa { u_max } => {
                let hi = u_max * (1.0 - margin);
                if n == 1 {
                    return vec![offset.clamp(-hi, hi)];
                }
                (0..n).map(|i| -hi + 2.0 * hi * i as f64 / (n - 1) as f64).collect()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Orbit {
    pub billiard: Billiard,
    pub topology: Topology,
    pub vertices: Polygon,
    pub caustic: ConfocalConic,
    pub j: f64,
    pub l: f64,
    /// Chain closure gap |P_{N+1} − P₁| or, for explicit vertex formulas,
    /// the largest distance to the chain from the same P₁.
    pub closure_gap: f64,
    pub param: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitResiduals {
    pub vertex: f64,
    pub reflection: f64,
    pub tangency: f64,
    pub j_spread: f64,
    /// Closure gap divided by the perimeter.
    pub closure: f64,
    pub turning: i32,
    pub turning_raw: f64,
}

impl Orbit {
    pub fn n(&self) -> usize {
        self.vertices.len()
    }

    pub fn residuals(&self) -> Result<OrbitResiduals> {
        let b = &self.billiard;
        let v = &self.vertices.vertices;
        let n = v.len();
        let mut out = OrbitResiduals {
            vertex: 0.0,
            reflection: 0.0,
            tangency: 0.0,
            j_spread: 0.0,
            closure: self.closure_gap / self.l,
            turning: self.vertices.turning_number()?,
            turning_raw: self.vertices.turning_raw(),
        };
        let (mut jmin, mut jmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for i in 0..n {
            let (p0, p, p1) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            out.vertex = out.vertex.max(b.residual(p).abs());
            let din = (p - p0).normalized();
            let dout = (p1 - p).normalized();
            let nrm = b.normal(p);
            let r = din - nrm * (2.0 * din.dot(nrm));
            out.reflection = out.reflection.max(r.cross(dout).abs().atan2(r.dot(dout)));
            let line = Line::through(p, p1)?;
            out.tangency = out.tangency.max(self.caustic.tangency_residual(&line));
            for j in [b.joachimsthal_at(p, dout).abs(), b.joachimsthal_at(p1, dout).abs()] {
                jmin = jmin.min(j);
                jmax = jmax.max(j);
            }
        }
        out.j_spread = jmax - jmin;
        Ok(out)
    }

    /// Tangency points of the edges with the caustic.
    pub fn inner_polygon(&self) -> Result<Polygon> {
        let v = &self.vertices.vertices;
        let n = v.len();
        Polygon::new((0..n).map(|i| self.caustic.touch_point(v[i], v[(i + 1) % n] - v[i])).collect())
    }

    /// Intersections of the billiard tangents at consecutive vertices.
    pub fn outer_polygon(&self) -> Result<Polygon> {
        let v = &self.vertices.vertices;
        let n = v.len();
        let b = &self.billiard;
        let pts = (0..n)
            .map(|i| b.tangent_line(v[i]).intersect(&b.tangent_line(v[(i + 1) % n])))
            .collect::<Result<Vec<_>>>()?;
        Ok(Polygon { vertices: pts })
    }
}

/// Wraps an angle to (−π, π].
pub fn wrap(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(2.0 * PI) - PI;
    if y == -PI {
        PI
    } else {
        y
    }
}

fn inward(b: &Billiard, p: Vec2, d: Vec2) -> Vec2 {
    if b.gradient(p).dot(d) > 0.0 {
        -d
    } else {
        d
    }
}

/// Tangent-chord chain: `n + 1` vertices starting at `p1`, each chord tangent
/// to `k`. The first chord runs counterclockwise about the center; later
/// chords take the other tangent at each vertex (the one the reflection law
/// picks).
pub fn chord_chain(b: &Billiard, k: &ConfocalConic, p1: Vec2, n: usize) -> Result<Vec<Vec2>> {
    let [t0, t1] = k.tangent_dirs(p1)?;
    let (d0, d1) = (inward(b, p1, t0), inward(b, p1, t1));
    let mut d = if p1.cross(d0) >= p1.cross(d1) { d0 } else { d1 };
    let mut out = Vec::with_capacity(n + 1);
    out.push(p1);
    let mut p = p1;
    for _ in 0..n {
        let q = b.second_intersection(p, d)?;
        let nrm = b.normal(q);
        let refl = (d - nrm * (2.0 * d.dot(nrm))).normalized();
        let [s0, s1] = k.tangent_dirs(q)?;
        let (s0, s1) = (inward(b, q, s0), inward(b, q, s1));
        d = if s0.cross(s1).abs() < 1e-6 {
            refl
        } else if s0.dot(refl) >= s1.dot(refl) {
            s0
        } else {
            s1
        };
        out.push(q);
        p = q;
    }
    Ok(out)
}

/// Signed phase defect of the chain after `n` chords.
fn phase_gap(b: &Billiard, k: &ConfocalConic, p1: Vec2, n: usize) -> Result<f64> {
    let ch = chord_chain(b, k, p1, n)?;
    Ok(wrap(b.parameter(ch[n]) - b.parameter(p1)))
}

/// Secant refinement of an elliptic caustic on the closure defect.
pub fn refine_caustic(b: &Billiard, k: &ConfocalConic, p1: Vec2, n: usize) -> Result<ConfocalConic> {
    if k.kind != CausticKind::Ellipse {
        return Ok(*k);
    }
    let c = b.c();
    let f = |a2: f64| -> Result<f64> { phase_gap(b, &ConfocalConic::from_major(b, a2)?, p1, n) };
    let (mut x0, mut f0) = (k.a2, f(k.a2)?);
    let mut best = (f0.abs(), x0);
    let h = 1e-7 * (k.a2 - c).min(b.a - k.a2).max(1e-300);
    let mut x1 = x0 + h;
    for _ in 0..12 {
        let f1 = match f(x1) {
            Ok(v) => v,
            Err(_) => break,
        };
        if f1.abs() < best.0 {
            best = (f1.abs(), x1);
        }
        if f1 == 0.0 || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !(x2 > c && x2 < b.a) || (x2 - x1).abs() <= 1e-16 * x1 {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
    }
    ConfocalConic::from_major(b, best.1)
}

fn finish(b: &Billiard, t: &Topology, k: ConfocalConic, mut verts: Vec<Vec2>, gap: f64, param: f64) -> Result<Orbit> {
    let poly = Polygon::new(verts.clone())?;
    if poly.turning_raw() < -0.5 {
        verts[1..].reverse();
    }
    let vertices = Polygon::new(verts)?;
    let l = vertices.perimeter();
    Ok(Orbit {
        billiard: *b,
        topology: *t,
        vertices,
        caustic: k,
        j: b.joachimsthal_from_caustic(k.a2)?,
        l,
        closure_gap: gap,
        param,
    })
}

/// Orbit through `p1` on the caustic `k` by the tangent-chord chain.
pub fn chain_orbit(b: &Billiard, t: &Topology, k: &ConfocalConic, p1: Vec2, param: f64) -> Result<Orbit> {
    let n = t.n;
    let mut k = *k;
    let mut ch = chord_chain(b, &k, p1, n)?;
    let scale = b.a;
    if k.kind == CausticKind::Ellipse && ch[n].dist(p1) > 1e-11 * scale {
        k = refine_caustic(b, &k, p1, n)?;
        ch = chord_chain(b, &k, p1, n)?;
    }
    let gap = ch[n].dist(p1);
    ch.truncate(n);
    finish(b, t, k, ch, gap, param)
}

/// Orbit built from explicit vertices; the closure gap records the largest
/// distance to the chain started at the same first vertex.
pub fn explicit_orbit(b: &Billiard, t: &Topology, verts: Vec<Vec2>, param: f64) -> Result<Orbit> {
    let k = caustic(b, t)?;
    let ch = chord_chain(b, &k, verts[0], t.n)?;
    let fwd = (0..t.n).map(|i| verts[i].dist(ch[i])).fold(0.0, f64::max);
    let bwd = (0..t.n).map(|i| verts[(t.n - i) % t.n].dist(ch[i])).fold(0.0, f64::max);
    finish(b, t, k, verts, fwd.min(bwd).max(ch[t.n].dist(ch[0])), param)
}

pub fn n3_orbit(b: &Billiard, p1: Vec2) -> Result<Orbit> {
    let t = Topology::simple(3)?;
    explicit_orbit(b, &t, seeds::n3_vertices(b, p1)?.to_vec(), b.parameter(p1))
}

pub fn n4_simple_orbit(b: &Billiard, p1: Vec2) -> Result<Orbit> {
    let t = Topology::simple(4)?;
    explicit_orbit(b, &t, seeds::n4_simple_vertices(b, p1).to_vec(), b.parameter(p1))
}

pub fn n4_self_orbit(b: &Billiard, u: f64) -> Result<Orbit> {
    let t = Topology::new(4, Tag::TypeI)?;
    explicit_orbit(b, &t, seeds::n4_self_vertices(b, u)?.to_vec(), u)
}

/// Below this c²/a² the explicit 3-periodic vertices lose accuracy and the chain is used.
pub const N3_EXPLICIT_MIN_C2: f64 = 1e-2;

/// Family member at parameter `param` (t for elliptic caustics, u for hyperbolic).
pub fn build(b: &Billiard, t: &Topology, param: f64) -> Result<Orbit> {
    let k = caustic(b, t)?;
    let w = window(b, t)?;
    let p1 = w.point(b, param)?;
    match (t.n, t.tag) {
        (3, Tag::Simple) if b.c2() > N3_EXPLICIT_MIN_C2 * b.a * b.a => n3_orbit(b, p1),
        (4, Tag::Simple) => n4_simple_orbit(b, p1),
        (4, Tag::TypeI) => n4_self_orbit(b, param),
        _ => chain_orbit(b, t, &k, p1, param),
    }
}

/// Orbits at evenly spaced family positions.
pub fn family(b: &Billiard, t: &Topology, samples: usize, margin: f64, offset: f64) -> Result<Vec<Orbit>> {
    let w = window(b, t)?;
    w.samples(samples, margin, offset).into_iter().map(|p| build(b, t, p)).collect()
}

/// Largest distance between the vertex sets of two polygons (as sets).
pub fn vertex_set_distance(p: &[Vec2], q: &[Vec2]) -> f64 {
    let one = |p: &[Vec2], q: &[Vec2]| {
        p.iter().map(|x| q.iter().map(|y| x.dist(*y)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max)
    };
    one(p, q).max(one(q, p))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_counts() {
        for (n, want) in [(5, 1), (6, 2), (7, 2), (8, 3)] {
            let k = Topology::registry().iter().filter(|t| t.n == n && !t.is_simple()).count();
            assert_eq!(k, want);
        }
        assert!(Topology::new(5, Tag::TypeII).is_err());
        assert!(Topology::new(3, Tag::TypeI).is_err());
    }

    #[test]
    fn tag_parsing() {
        assert_eq!(Tag::parse("type2").unwrap(), Tag::TypeII);
        assert_eq!(Tag::parse("Simple").unwrap(), Tag::Simple);
        assert!(Tag::parse("type9").is_err());
    }

    #[test]
    fn wrap_range() {
        assert!((wrap(3.0 * PI) - PI).abs() < 1e-12);
        assert!((wrap(-0.5) + 0.5).abs() < 1e-15);
    }

    #[test]
    fn n3_chain_matches_formula() {
        let b = Billiard::new(2.0, 1.0).unwrap();
        let t = Topology::simple(3).unwrap();
        let k = caustic(&b, &t).unwrap();
        for s in [0.0, 0.4, 2.0] {
            let p1 = b.boundary_point(s);
            let f = n3_orbit(&b, p1).unwrap();
            let c = chain_orbit(&b, &t, &k, p1, s).unwrap();
            assert!(c.closure_gap < 1e-9);
            assert!(vertex_set_distance(&f.vertices.vertices, &c.vertices.vertices) < 1e-9);
        }
    }

    #[test]
    fn circle_pentagon() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        let t = Topology::simple(5).unwrap();
        let o = build(&b, &t, 0.0).unwrap();
        let v = &o.vertices.vertices;
        for i in 0..5 {
            assert!((v[i].dist(v[(i + 1) % 5]) - 2.0 * (PI / 5.0).sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn pentagram_turning_two() {
        let b = Billiard::with_ratio(1.3).unwrap();
        let t = Topology::new(5, Tag::TypeI).unwrap();
        let k = caustic(&b, &t).unwrap();
        let ch = chord_chain(&b, &k, Vec2::new(b.a, 0.0), 5).unwrap();
        let p = Polygon::new(ch[..5].to_vec()).unwrap();
        assert_eq!(p.turning_number().unwrap(), 2);
    }

    #[test]
    fn hexagon_in_circle() {
        let b = Billiard::new(1.0, 1.0).unwrap();
        let o = build(&b, &Topology::simple(6).unwrap(), 0.0).unwrap();
        assert!((o.l - 6.0).abs() < 1e-12);
    }
}

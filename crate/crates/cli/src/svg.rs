use std::fmt::Write;

use poncelet::{Billiard, CausticKind, ConfocalConic, Line, Vec2};

/// Figure in billiard coordinates (y up), rendered at `scale` pixels per unit.
pub struct Figure {
    half_w: f64,
    half_h: f64,
    scale: f64,
    body: String,
}

fn f(x: f64) -> String {
    let s = format!("{x:.5}");
    if s == "-0.00000" {
        "0.00000".into()
    } else {
        s
    }
}

impl Figure {
    pub fn new(half_w: f64, half_h: f64, scale: f64) -> Figure {
        Figure { half_w, half_h, scale, body: String::new() }
    }

    /// Stroke attributes; `width` is in pixels.
    fn style(&self, stroke: &str, width: f64) -> String {
        format!(r#"fill="none" stroke="{stroke}" stroke-width="{}""#, f(width / self.scale))
    }

    fn dashed(&self, dash: bool) -> String {
        if dash {
            format!(r#" stroke-dasharray="{} {}""#, f(6.0 / self.scale), f(4.0 / self.scale))
        } else {
            String::new()
        }
    }

    pub fn polyline(&mut self, pts: &[Vec2], closed: bool, stroke: &str, width: f64, dash: bool) {
        if pts.len() < 2 {
            return;
        }
        let tag = if closed { "polygon" } else { "polyline" };
        let coords: Vec<String> = pts.iter().map(|p| format!("{},{}", f(p.x), f(p.y))).collect();
        let _ = writeln!(
            self.body,
            r#"  <{tag} points="{}" {}{}/>"#,
            coords.join(" "),
            self.style(stroke, width),
            self.dashed(dash)
        );
    }

    pub fn ellipse(&mut self, rx: f64, ry: f64, center: Vec2, stroke: &str, width: f64, dash: bool) {
        let _ = writeln!(
            self.body,
            r#"  <ellipse cx="{}" cy="{}" rx="{}" ry="{}" {}{}/>"#,
            f(center.x),
            f(center.y),
            f(rx),
            f(ry),
            self.style(stroke, width),
            self.dashed(dash)
        );
    }

    /// Filled disc of radius `px` pixels.
    pub fn dot(&mut self, p: Vec2, px: f64, color: &str) {
        let r = px / self.scale;
        let _ = writeln!(self.body, r#"  <circle cx="{}" cy="{}" r="{}" fill="{color}"/>"#, f(p.x), f(p.y), f(r));
    }

    pub fn billiard(&mut self, b: &Billiard) {
        self.ellipse(b.a, b.b, Vec2::new(0.0, 0.0), "black", 1.5, false);
        self.dot(Vec2::new(-b.c(), 0.0), 3.0, "black");
        self.dot(Vec2::new(b.c(), 0.0), 3.0, "black");
    }

    pub fn caustic(&mut self, k: &ConfocalConic, color: &str) {
        match k.kind {
            CausticKind::Ellipse => self.ellipse(k.a2, k.b2, Vec2::new(0.0, 0.0), color, 1.0, true),
            CausticKind::Hyperbola => {
                let smax = (self.half_h / k.b2).asinh();
                for sign in [1.0, -1.0] {
                    let pts: Vec<Vec2> = (0..=80)
                        .map(|i| {
                            let s = -smax + 2.0 * smax * i as f64 / 80.0;
                            Vec2::new(sign * k.a2 * s.cosh(), k.b2 * s.sinh())
                        })
                        .collect();
                    self.polyline(&pts, false, color, 1.0, true);
                }
            }
        }
    }

    /// The part of an infinite line inside the view box.
    pub fn line(&mut self, l: &Line, color: &str) {
        let d = l.direction();
        let n2 = l.n.dot(l.n);
        let p0 = l.n * (l.h / n2);
        let reach = 2.0 * (self.half_w.hypot(self.half_h));
        self.polyline(&[p0 - d * reach, p0 + d * reach], false, color, 1.0, true);
    }

    pub fn render(&self, banner: &str) -> String {
        let (w, h) = (self.half_w, self.half_h);
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"{} {} {} {}\">\n<!-- {banner} -->\n<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n<g transform=\"scale(1,-1)\">\n{}</g>\n</svg>\n",
            (2.0 * w * self.scale).round(),
            (2.0 * h * self.scale).round(),
            f(-w),
            f(-h),
            f(2.0 * w),
            f(2.0 * h),
            f(-w),
            f(-h),
            f(2.0 * w),
            f(2.0 * h),
            self.body
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn renders_deterministically() {
        let b = Billiard::with_ratio(1.5).unwrap();
        let mut fig = Figure::new(2.0, 1.5, 100.0);
        fig.billiard(&b);
        let k = ConfocalConic::from_major(&b, 0.5).unwrap();
        fig.caustic(&k, "red");
        let s = fig.render("test");
        assert!(s.starts_with("<svg") && s.ends_with("</svg>\n"));
        assert_eq!(s, fig.render("test"));
        assert_eq!(s.matches("<polyline").count(), 2);
    }

    #[test]
    fn no_negative_zero() {
        assert_eq!(f(-1e-9), "0.00000");
        assert_eq!(f(-0.5), "-0.50000");
    }
}

//! Real roots of univariate polynomials of moderate degree.
//!
//! Roots are isolated on the monotone pieces between consecutive critical
//! points (the real roots of the derivative, found recursively), then refined
//! by safeguarded Newton steps inside a sign-change bracket.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::tol;

/// Coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly {
    pub coeffs: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Root {
    pub value: f64,
    pub multiplicity: usize,
}

impl Poly {
    /// Trailing (highest-degree) exact zeros are dropped.
    pub fn new(mut coeffs: Vec<f64>) -> Poly {
        while coeffs.len() > 1 && *coeffs.last().unwrap() == 0.0 {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(0.0);
        }
        Poly { coeffs }
    }

    /// Polynomial in x from a polynomial in y = x² (ascending in y).
    pub fn from_even(coeffs_in_square: &[f64]) -> Poly {
        let mut c = vec![0.0; 2 * coeffs_in_square.len().max(1) - 1];
        for (k, v) in coeffs_in_square.iter().enumerate() {
            c[2 * k] = *v;
        }
        Poly::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    /// Value together with Σ|aᵢ||x|ⁱ, the scale of rounding error in Horner's scheme.
    pub fn eval_with_scale(&self, x: f64) -> (f64, f64) {
        let ax = x.abs();
        self.coeffs.iter().rev().fold((0.0, 0.0), |(v, s), c| (v * x + c, s * ax + c.abs()))
    }

    pub fn derivative(&self) -> Poly {
        if self.degree() == 0 {
            return Poly::new(vec![0.0]);
        }
        Poly::new(self.coeffs.iter().enumerate().skip(1).map(|(i, c)| i as f64 * c).collect())
    }

    /// Scaled so the largest coefficient has magnitude 1.
    pub fn normalized(&self) -> Poly {
        let m = self.coeffs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        if m == 0.0 {
            return self.clone();
        }
        Poly::new(self.coeffs.iter().map(|c| c / m).collect())
    }

    /// |p(x)| / Σ|aᵢ||x|ⁱ.
    pub fn relative_residual(&self, x: f64) -> f64 {
        let (v, s) = self.eval_with_scale(x);
        if s == 0.0 {
            0.0
        } else {
            v.abs() / s
        }
    }

    fn lead(&self) -> f64 {
        *self.coeffs.last().unwrap()
    }

    /// Fujiwara bound on the magnitude of all roots.
    fn root_bound(&self) -> f64 {
        let n = self.degree();
        let an = self.lead();
        let mut m: f64 = 0.0;
        for k in 1..=n {
            let r = (self.coeffs[n - k] / an).abs();
            let t = if k == n { (r / 2.0).powf(1.0 / k as f64) } else { r.powf(1.0 / k as f64) };
            m = m.max(t);
        }
        // Strictly larger than every root magnitude.
        2.0 * m * (1.0 + 1.0 / 64.0)
    }
}

/// All real roots in increasing order, each refined until its relative residual
/// drops below `tol` or the bracket shrinks to machine precision.
pub fn real_roots(p: &Poly, tol: f64) -> Result<Vec<Root>> {
    if p.degree() == 0 {
        return Err(Error::Invalid("polynomial of degree 0 has no isolated roots".into()));
    }
    let q = p.normalized();
    if q.lead().abs() < 1e-40 {
        return Err(Error::IllConditioned(format!("leading coefficient {:e} after scaling", q.lead())));
    }
    let roots = roots_rec(&q, tol);
    Ok(merge(roots))
}

fn roots_rec(p: &Poly, tol: f64) -> Vec<Root> {
    let n = p.degree();
    if n == 1 {
        return vec![Root { value: -p.coeffs[0] / p.coeffs[1], multiplicity: 1 }];
    }
    let bound = p.root_bound();
    if bound == 0.0 {
        return vec![Root { value: 0.0, multiplicity: n }];
    }
    let crit = roots_rec(&p.derivative().normalized(), tol);
    let mut knots = vec![-bound];
    knots.extend(crit.iter().map(|r| r.value).filter(|v| v.abs() < bound));
    knots.push(bound);

    let mut out = Vec::new();
    for r in &crit {
        let (v, s) = p.eval_with_scale(r.value);
        if v.abs() <= 16.0 * n as f64 * f64::EPSILON * s {
            out.push(Root { value: r.value, multiplicity: r.multiplicity + 1 });
        }
    }
    for w in knots.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi <= lo {
            continue;
        }
        if out.iter().any(|r| r.value == lo || r.value == hi) {
            continue;
        }
        let (flo, fhi) = (p.eval(lo), p.eval(hi));
        if flo == 0.0 || fhi == 0.0 || flo.signum() == fhi.signum() {
            continue;
        }
        let x = refine(p, lo, hi, flo, tol);
        if !out.iter().any(|r| (r.value - x).abs() <= tol::ROOT_MERGE * r.value.abs().max(1e-300)) {
            out.push(Root { value: x, multiplicity: 1 });
        }
    }
    out.sort_by(|a, b| a.value.total_cmp(&b.value));
    out
}

fn refine(p: &Poly, mut lo: f64, mut hi: f64, flo: f64, tol: f64) -> f64 {
    let dp = p.derivative();
    let slo = flo.signum();
    let mut x = 0.5 * (lo + hi);
    for _ in 0..200 {
        let (fx, scale) = p.eval_with_scale(x);
        if fx == 0.0 {
            return x;
        }
        if fx.signum() == slo {
            lo = x;
        } else {
            hi = x;
        }
        if hi - lo <= 2.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        let d = dp.eval(x);
        let newton = x - fx / d;
        let converged = fx.abs() <= tol * scale * 1e-6;
        x = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if converged {
            break;
        }
    }
    x
}

/// Merges roots within the merge tolerance, summing multiplicities.
fn merge(roots: Vec<Root>) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::new();
    for r in roots {
        if let Some(last) = out.last_mut() {
            let scale = last.value.abs().max(r.value.abs()).max(1e-300);
            if (r.value - last.value).abs() <= tol::ROOT_MERGE * scale {
                if r.multiplicity > last.multiplicity {
                    last.value = r.value;
                }
                last.multiplicity += r.multiplicity;
                continue;
            }
        }
        out.push(r);
    }
    out
}

/// Which root of a polynomial to pick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum RootPredicate {
    LargestNegative,
    SmallestNegative,
    /// The unique negative root; fails if there are several.
    OnlyNegative,
    SmallestPositive,
    LargestPositive,
    SmallestGreaterThan(f64),
    LargestGreaterThan(f64),
    /// 0-based index in increasing order.
    KthSmallest(usize),
    /// 0-based index in increasing order among roots in the open interval.
    InInterval {
        lo: f64,
        hi: f64,
        rank: usize,
    },
    /// Largest root in the open interval.
    LargestIn {
        lo: f64,
        hi: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootQuery {
    pub poly: Poly,
    pub predicate: RootPredicate,
}

pub fn select_root(q: &RootQuery) -> Result<f64> {
    let roots: Vec<f64> = real_roots(&q.poly, 1e-14)?.iter().map(|r| r.value).collect();
    pick(&roots, q.predicate)
}

pub fn pick(roots: &[f64], pred: RootPredicate) -> Result<f64> {
    use RootPredicate::*;
    let none = || Error::NoRoot(format!("{pred:?}"));
    let mut neg = roots.iter().copied().filter(|r| *r < 0.0);
    let mut pos = roots.iter().copied().filter(|r| *r > 0.0);
    match pred {
        LargestNegative => neg.next_back().ok_or_else(none),
        SmallestNegative => roots.iter().copied().find(|r| *r < 0.0).ok_or_else(none),
        OnlyNegative => {
            let v: Vec<f64> = neg.collect();
            if v.len() == 1 {
                Ok(v[0])
            } else {
                Err(Error::NoRoot(format!("expected one negative root, found {}", v.len())))
            }
        }
        SmallestPositive => roots.iter().copied().find(|r| *r > 0.0).ok_or_else(none),
        LargestPositive => pos.next_back().ok_or_else(none),
        SmallestGreaterThan(t) => roots.iter().copied().find(|r| *r > t).ok_or_else(none),
        LargestGreaterThan(t) => roots.iter().copied().rfind(|r| *r > t).ok_or_else(none),
        KthSmallest(k) => roots.get(k).copied().ok_or_else(none),
        InInterval { lo, hi, rank } => roots.iter().copied().filter(|r| *r > lo && *r < hi).nth(rank).ok_or_else(none),
        LargestIn { lo, hi } => roots.iter().copied().rfind(|r| *r > lo && *r < hi).ok_or_else(none),
    }
}

/// Root of a continuous function bracketed by [lo, hi] (Illinois false position).
pub fn bracket_root<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let (mut flo, mut fhi) = (f(lo), f(hi));
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    let mut side = 0;
    for _ in 0..300 {
        let x = (lo * fhi - hi * flo) / (fhi - flo);
        let x = if x > lo && x < hi { x } else { 0.5 * (lo + hi) };
        let fx = f(x);
        if fx == 0.0 || hi - lo <= xtol {
            return Ok(x);
        }
        if fx.signum() == flo.signum() {
            lo = x;
            flo = fx;
            if side == -1 {
                fhi *= 0.5;
            }
            side = -1;
        } else {
            hi = x;
            fhi = fx;
            if side == 1 {
                flo *= 0.5;
            }
            side = 1;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_roots(rs: &[f64]) -> Poly {
        let mut c = vec![1.0];
        for r in rs {
            let mut n = vec![0.0; c.len() + 1];
            for (i, v) in c.iter().enumerate() {
                n[i + 1] += v;
                n[i] -= r * v;
            }
            c = n;
        }
        Poly::new(c)
    }

    #[test]
    fn quadratic() {
        let r = real_roots(&Poly::new(vec![-1.0, 0.0, 1.0]), 1e-14).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].value + 1.0).abs() < 1e-15 && (r[1].value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn root_on_bound() {
        // Fujiwara's bound equals the root 2.5 here.
        let r = real_roots(&from_roots(&[-1.25, 2.5]), 1e-15).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[1].value - 2.5).abs() < 1e-14);
    }

    #[test]
    fn heptagon_cubic() {
        // 1 + 4x - 4x² - 8x³
        let r = real_roots(&Poly::new(vec![1.0, 4.0, -4.0, -8.0]), 1e-14).unwrap();
        let want = [-0.9009688680, -0.2225209340, 0.6234898025];
        assert_eq!(r.len(), 3);
        for (g, w) in r.iter().zip(want) {
            assert!((g.value - w).abs() < 1e-9);
        }
    }

    #[test]
    fn double_root_detected() {
        let r = real_roots(&from_roots(&[1.0, 1.0, -2.0]), 1e-14).unwrap();
        assert_eq!(r.len(), 2);
        assert_eq!(r[1].multiplicity, 2);
        assert!((r[1].value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn no_real_roots() {
        assert!(real_roots(&Poly::new(vec![1.0, 0.0, 1.0]), 1e-14).unwrap().is_empty());
    }

    #[test]
    fn degree_zero_rejected() {
        assert!(real_roots(&Poly::new(vec![3.0]), 1e-14).is_err());
    }

    #[test]
    fn selection() {
        let roots = [-2.0, -1.0, 3.0];
        assert_eq!(pick(&roots, RootPredicate::LargestNegative).unwrap(), -1.0);
        assert_eq!(pick(&roots, RootPredicate::SmallestPositive).unwrap(), 3.0);
        assert!(pick(&roots, RootPredicate::OnlyNegative).is_err());
        assert!(pick(&roots, RootPredicate::SmallestGreaterThan(5.0)).is_err());
        assert_eq!(pick(&roots, RootPredicate::KthSmallest(1)).unwrap(), -1.0);
        let q = RootQuery { poly: from_roots(&roots), predicate: RootPredicate::LargestNegative };
        assert!((select_root(&q).unwrap() + 1.0).abs() < 1e-14);
    }

    #[test]
    fn from_even_builds_square_poly() {
        let p = Poly::from_even(&[-1.0, 1.0]);
        assert_eq!(p.coeffs, vec![-1.0, 0.0, 1.0]);
    }

    #[test]
    fn bracket() {
        let r = bracket_root(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bracket_root(|x| x * x + 1.0, 0.0, 2.0, 1e-15).is_err());
    }
}

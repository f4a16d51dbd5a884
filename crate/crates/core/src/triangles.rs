//! Triangle data sets up to congruence and the passages between them.
//!
//! `TriangleS` holds the moduli |h_ij| of a normalized Gram matrix and the
//! angular invariant, `TriangleSPrime` the three side lengths and the angular
//! invariant, `TriangleSDoublePrime` two sides at vertex 1 and the kos value
//! there.

use crate::ball::{normalize_to_model, project_to_complex_geodesic, pseudo_dist, ComplexGeodesic, PointConfig};
use crate::error::{Error, Result};
use crate::linalg::{Tolerance, C64};
use crate::rkhs::{alpha, delta_h, gram_of_config, kos, GramSpec};

fn check_open_unit(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::invalid(format!("{name} must lie in (0,1), got {v}")));
    }
    Ok(())
}

fn check_three(x: &PointConfig) -> Result<()> {
    if x.len() != 3 {
        return Err(Error::invalid(format!("a triangle needs 3 points, got {}", x.len())));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleS {
    pub m12: f64,
    pub m23: f64,
    pub m13: f64,
    pub alpha123: f64,
}

impl TriangleS {
    pub fn new(m12: f64, m23: f64, m13: f64, alpha123: f64) -> Result<Self> {
        for (n, v) in [("m12", m12), ("m23", m23), ("m13", m13)] {
            if !(v > 0.0 && v <= 1.0) {
                return Err(Error::invalid(format!("{n} must lie in (0,1], got {v}")));
            }
        }
        Ok(TriangleS { m12, m23, m13, alpha123 })
    }

    pub fn from_gram(g: &GramSpec) -> Result<Self> {
        if g.dim() != 3 {
            return Err(Error::invalid("triangle data needs a 3x3 Gram matrix"));
        }
        let m = |i: usize, j: usize| g.get(i, j).norm() / (g.get(i, i).re * g.get(j, j).re).sqrt();
        TriangleS::new(m(0, 1), m(1, 2), m(0, 2), alpha(g, 0, 1, 2)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSPrime {
    pub d12: f64,
    pub d13: f64,
    pub d23: f64,
    pub alpha123: f64,
}

impl TriangleSPrime {
    pub fn new(d12: f64, d13: f64, d23: f64, alpha123: f64) -> Result<Self> {
        check_open_unit("d12", d12)?;
        check_open_unit("d13", d13)?;
        check_open_unit("d23", d23)?;
        if !alpha123.is_finite() {
            return Err(Error::invalid("angular invariant must be finite"));
        }
        Ok(TriangleSPrime { d12, d13, d23, alpha123 })
    }

    pub fn from_gram(g: &GramSpec) -> Result<Self> {
        if g.dim() != 3 {
            return Err(Error::invalid("triangle data needs a 3x3 Gram matrix"));
        }
        TriangleSPrime::new(delta_h(g, 0, 1)?, delta_h(g, 0, 2)?, delta_h(g, 1, 2)?, alpha(g, 0, 1, 2)?)
    }

    pub fn from_config(x: &PointConfig) -> Result<Self> {
        check_three(x)?;
        TriangleSPrime::from_gram(&gram_of_config(x))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleSDoublePrime {
    pub d12: f64,
    pub d13: f64,
    pub kos123: C64,
}

impl TriangleSDoublePrime {
    pub fn new(d12: f64, d13: f64, kos123: C64) -> Result<Self> {
        check_open_unit("d12", d12)?;
        check_open_unit("d13", d13)?;
        if !(kos123.re.is_finite() && kos123.im.is_finite()) {
            return Err(Error::invalid("kos must be finite"));
        }
        Ok(TriangleSDoublePrime { d12, d13, kos123 })
    }

    pub fn from_gram(g: &GramSpec, tol: &Tolerance) -> Result<Self> {
        if g.dim() != 3 {
            return Err(Error::invalid("triangle data needs a 3x3 Gram matrix"));
        }
        TriangleSDoublePrime::new(delta_h(g, 0, 1)?, delta_h(g, 0, 2)?, kos(g, 0, 1, 2, tol)?)
    }

    pub fn from_config(x: &PointConfig, tol: &Tolerance) -> Result<Self> {
        check_three(x)?;
        TriangleSDoublePrime::from_gram(&gram_of_config(x), tol)
    }
}

/// Moduli `m_ab = sqrt(1 - delta(a,b)^2)` of an edge, vertices 0, 1, 2.
pub trait EdgeModuli {
    fn modulus(&self, a: usize, b: usize) -> f64;
}

impl EdgeModuli for TriangleS {
    fn modulus(&self, a: usize, b: usize) -> f64 {
        match (a.min(b), a.max(b)) {
            (0, 1) => self.m12,
            (1, 2) => self.m23,
            (0, 2) => self.m13,
            _ => panic!("edge ({a},{b}) is not an edge of a triangle"),
        }
    }
}

impl EdgeModuli for TriangleSPrime {
    fn modulus(&self, a: usize, b: usize) -> f64 {
        let d = match (a.min(b), a.max(b)) {
            (0, 1) => self.d12,
            (1, 2) => self.d23,
            (0, 2) => self.d13,
            _ => panic!("edge ({a},{b}) is not an edge of a triangle"),
        };
        (1.0 - d * d).sqrt()
    }
}

/// `Gamma_abc = m_ab m_bc / m_ca`.
pub fn gamma_factor(t: &impl EdgeModuli, a: usize, b: usize, c: usize) -> f64 {
    t.modulus(a, b) * t.modulus(b, c) / t.modulus(c, a)
}

/// Realizability from side lengths and angular invariant:
/// `Gamma_123 + Gamma_231 + Gamma_312 <= 2 cos(alpha) + m12 m23 m13`.
/// This is `|kos| <= 1` rewritten in S' data; the product term is what makes
/// collinear triples land exactly on the boundary.
pub fn realizable_sprime(t: &TriangleSPrime, tol: &Tolerance) -> bool {
    let lhs = gamma_factor(t, 0, 1, 2) + gamma_factor(t, 1, 2, 0) + gamma_factor(t, 2, 0, 1);
    let rhs = 2.0 * t.alpha123.cos() + t.modulus(0, 1) * t.modulus(1, 2) * t.modulus(0, 2);
    lhs <= rhs + tol.eq_tol
}

pub fn realizable_sdp(t: &TriangleSDoublePrime, tol: &Tolerance) -> bool {
    t.kos123.norm() <= 1.0 + tol.eq_tol
}

pub fn in_complex_geodesic(t: &TriangleSDoublePrime, tol: &Tolerance) -> bool {
    (t.kos123.norm() - 1.0).abs() <= tol.eq_tol
}

fn third_side(a: f64, d13: f64, one_minus: C64) -> f64 {
    (1.0 - (1.0 - a * a) * (1.0 - d13 * d13) / one_minus.norm_sqr()).max(0.0).sqrt()
}

/// In model position `a x-bar = d12 d13 kos`; the third side follows from the
/// distance formula and `alpha = arg(1 - a x-bar)`.
pub fn sdp_to_sprime(t: &TriangleSDoublePrime, tol: &Tolerance) -> Result<TriangleSPrime> {
    if !realizable_sdp(t, tol) {
        return Err(Error::NotRealizable(format!("|kos| = {} exceeds 1", t.kos123.norm())));
    }
    let ax = t.kos123 * (t.d12 * t.d13);
    let one_minus = C64::new(1.0, 0.0) - ax;
    TriangleSPrime::new(t.d12, t.d13, third_side(t.d12, t.d13, one_minus), one_minus.arg())
}

/// Inverse of [`sdp_to_sprime`]: `|1 - a x-bar|` from the third side, phase
/// from alpha, then `kos = a x-bar / (d12 d13)`.
pub fn sprime_to_sdp(t: &TriangleSPrime, tol: &Tolerance) -> Result<TriangleSDoublePrime> {
    let q = ((1.0 - t.d12 * t.d12) * (1.0 - t.d13 * t.d13) / (1.0 - t.d23 * t.d23)).sqrt();
    let ax = C64::new(1.0, 0.0) - C64::from_polar(q, t.alpha123);
    let k = ax / (t.d12 * t.d13);
    let out = TriangleSDoublePrime::new(t.d12, t.d13, k)?;
    if !realizable_sdp(&out, tol) {
        return Err(Error::NotRealizable(format!("|kos| = {} exceeds 1", k.norm())));
    }
    Ok(out)
}

/// `{(0,0), (a,0), (x,b)}` with `x = d13 conj(kos)` and `b = sqrt(d13^2 - |x|^2)`.
pub fn build_model_triangle(t: &TriangleSDoublePrime, tol: &Tolerance) -> Result<PointConfig> {
    if !realizable_sdp(t, tol) {
        return Err(Error::NotRealizable(format!("|kos| = {} exceeds 1", t.kos123.norm())));
    }
    let k = if t.kos123.norm() > 1.0 { t.kos123 / t.kos123.norm() } else { t.kos123 };
    let x = k.conj() * t.d13;
    let b = (t.d13 * t.d13 - x.norm_sqr()).max(0.0).sqrt();
    let z = C64::new(0.0, 0.0);
    PointConfig::from_coords(&[vec![z, z], vec![C64::new(t.d12, 0.0), z], vec![x, C64::new(b, 0.0)]], tol)
}

/// `T_t = {(0,0), (1/2,0), (t e^{i theta}/2, sqrt(2 - t^2)/2)}` with
/// `cos theta = (t^2 + 7) / (8t)`, `t` in `[1, sqrt 2]`. The three side
/// lengths do not depend on `t`.
pub fn sss_family(t: f64) -> Result<PointConfig> {
    let tol = Tolerance::default();
    let hi = 2.0_f64.sqrt();
    if !(t >= 1.0 - tol.eq_tol && t <= hi + tol.eq_tol) {
        return Err(Error::invalid(format!("t must lie in [1, sqrt 2], got {t}")));
    }
    let ct = ((t * t + 7.0) / (8.0 * t)).min(1.0);
    let theta = ct.acos();
    let z = C64::new(0.0, 0.0);
    PointConfig::from_coords(
        &[
            vec![z, z],
            vec![C64::new(0.5, 0.0), z],
            vec![C64::from_polar(t / 2.0, theta), C64::new((2.0 - t * t).max(0.0).sqrt() / 2.0, 0.0)],
        ],
        &tol,
    )
}

/// Polar form of `kos_1(2,3)`: `r = delta(x1, y) / delta(x1, x3)` with `y` the
/// projection of `x3` onto the complex geodesic through `x1, x2`, and `theta`
/// the angle at the origin in model position.
pub fn kos_polar(x: &PointConfig, tol: &Tolerance) -> Result<(f64, f64)> {
    check_three(x)?;
    let g = ComplexGeodesic::new(x.point(0).clone(), x.point(1).clone(), tol)?;
    let y = project_to_complex_geodesic(&g, x.point(2))?;
    let r = pseudo_dist(x.point(0), &y)? / pseudo_dist(x.point(0), x.point(2))?;
    let model = normalize_to_model(x, tol)?;
    let xm = model.point(2).coords()[0];
    let theta = if xm.norm() <= tol.eq_tol { 0.0 } else { xm.conj().arg() };
    Ok((r, theta))
}

/// Model triangle rebuilt from S' data (convenience for callers holding S').
pub fn realize_sprime(t: &TriangleSPrime, tol: &Tolerance) -> Result<PointConfig> {
    build_model_triangle(&sprime_to_sdp(t, tol)?, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling::{random_config, rng};
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn gamma_examples() {
        let t = TriangleSPrime::new(0.5, 0.6, 0.3, 0.0).unwrap();
        let expected = (0.75_f64 * 0.91 / 0.64).sqrt();
        assert!((gamma_factor(&t, 0, 1, 2) - expected).abs() < 1e-15);
        let eq = TriangleSPrime::new(0.4, 0.4, 0.4, 0.0).unwrap();
        assert!((gamma_factor(&eq, 0, 1, 2) - (1.0 - 0.16_f64).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn collinear_triple_is_realizable() {
        let x = PointConfig::from_coords(&[vec![c(0.0, 0.0)], vec![c(0.3, 0.0)], vec![c(0.5, 0.0)]], &tol()).unwrap();
        let t = TriangleSPrime::from_config(&x).unwrap();
        assert!(realizable_sprime(&t, &tol()));
        let flipped = TriangleSPrime { alpha123: PI, ..t };
        assert!(!realizable_sprime(&flipped, &tol()));
    }

    #[test]
    fn sprime_realizability_matches_kos_bound() {
        let mut r = rng(21);
        for _ in 0..300 {
            let x = random_config(&mut r, 3, 2, 0.95);
            let t = TriangleSPrime::from_config(&x).unwrap();
            assert!(realizable_sprime(&t, &tol()));
            // nudging alpha away from a realizable value eventually breaks it
            let mut bad = t;
            bad.alpha123 = PI;
            let sdp = TriangleSDoublePrime::new(t.d12, t.d13, {
                let q = ((1.0 - t.d12 * t.d12) * (1.0 - t.d13 * t.d13) / (1.0 - t.d23 * t.d23)).sqrt();
                (c(1.0, 0.0) - C64::from_polar(q, PI)) / (t.d12 * t.d13)
            })
            .unwrap();
            assert_eq!(realizable_sprime(&bad, &tol()), realizable_sdp(&sdp, &tol()));
        }
    }

    #[test]
    fn sdp_examples() {
        assert!(realizable_sdp(&TriangleSDoublePrime::new(0.5, 0.5, c(0.6, 0.0)).unwrap(), &tol()));
        let g = TriangleSDoublePrime::new(0.5, 0.5, C64::from_polar(1.0, 0.7)).unwrap();
        assert!(realizable_sdp(&g, &tol()) && in_complex_geodesic(&g, &tol()));
        assert!(!realizable_sdp(&TriangleSDoublePrime::new(0.5, 0.5, c(1.2, 0.0)).unwrap(), &tol()));
    }

    #[test]
    fn collinear_conversion() {
        let t = TriangleSDoublePrime::new(0.5, 0.3, c(1.0, 0.0)).unwrap();
        let p = sdp_to_sprime(&t, &tol()).unwrap();
        assert!((p.d23 - 0.2 / 0.85).abs() < 1e-14);
        assert_eq!(p.alpha123, 0.0);
        let back = sprime_to_sdp(&p, &tol()).unwrap();
        assert!((back.kos123 - t.kos123).norm() < 1e-10);
    }

    #[test]
    fn conversion_round_trip_on_fixture() {
        let t = TriangleSDoublePrime::new(0.5, 0.5, c(0.6, 0.0)).unwrap();
        let back = sprime_to_sdp(&sdp_to_sprime(&t, &tol()).unwrap(), &tol()).unwrap();
        assert!((back.kos123 - t.kos123).norm() < 1e-10);
        let nonreal = TriangleSDoublePrime::new(0.3, 0.7, C64::from_polar(0.8, -2.0)).unwrap();
        let back = sprime_to_sdp(&sdp_to_sprime(&nonreal, &tol()).unwrap(), &tol()).unwrap();
        assert!((back.kos123 - nonreal.kos123).norm() < 1e-10);
    }

    #[test]
    fn model_triangle_examples() {
        let m = build_model_triangle(&TriangleSDoublePrime::new(0.5, 0.5, c(0.6, 0.0)).unwrap(), &tol()).unwrap();
        assert!((m.point(2).coords()[0] - c(0.3, 0.0)).norm() < 1e-15);
        assert!((m.point(2).coords()[1] - c(0.4, 0.0)).norm() < 1e-15);
        let m = build_model_triangle(&TriangleSDoublePrime::new(0.5, 0.5, C64::from_polar(1.0, PI / 3.0)).unwrap(), &tol()).unwrap();
        assert!((m.point(2).coords()[0] - C64::from_polar(0.5, -PI / 3.0)).norm() < 1e-15);
        assert!(m.point(2).coords()[1].norm() < 1e-8);
        let back = TriangleSDoublePrime::from_config(&m, &tol()).unwrap();
        assert!((back.kos123 - C64::from_polar(1.0, PI / 3.0)).norm() < 1e-12);
    }

    #[test]
    fn sss_family_endpoints() {
        let t1 = sss_family(1.0).unwrap();
        assert!((t1.point(2).coords()[0] - c(0.5, 0.0)).norm() < 1e-15);
        assert!((t1.point(2).coords()[1] - c(0.5, 0.0)).norm() < 1e-15);
        let t2 = sss_family(2.0_f64.sqrt()).unwrap();
        assert!(t2.point(2).coords()[1].norm() < 1e-15);
        assert!(sss_family(1.5).is_err());
    }

    #[test]
    fn kos_polar_examples() {
        let x = PointConfig::from_coords(
            &[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)], vec![c(0.3, 0.0), c(0.4, 0.0)]],
            &tol(),
        )
        .unwrap();
        let (r, th) = kos_polar(&x, &tol()).unwrap();
        assert!((r - 0.6).abs() < 1e-14 && th.abs() < 1e-14);
        let x = PointConfig::from_coords(
            &[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)], vec![c(0.0, 0.3), c(0.4, 0.0)]],
            &tol(),
        )
        .unwrap();
        let (r, th) = kos_polar(&x, &tol()).unwrap();
        let k = kos(&gram_of_config(&x), 0, 1, 2, &tol()).unwrap();
        assert!((C64::from_polar(r, th) - k).norm() < 1e-10);
    }

    #[test]
    fn kos_polar_on_random_triangles() {
        let mut g = rng(4);
        for _ in 0..50 {
            let x = random_config(&mut g, 3, 3, 0.9);
            let (r, th) = kos_polar(&x, &tol()).unwrap();
            let k = kos(&gram_of_config(&x), 0, 1, 2, &tol()).unwrap();
            assert!((C64::from_polar(r, th) - k).norm() < 1e-9);
        }
    }
}

//! Areas of triangles and convex polygons in a complex geodesic, and of
//! triangles in the Beltrami-Klein disk.
//!
//! Arg-based expressions are signed by the orientation of the vertices and
//! only determined mod `2 pi`. Polygon expressions are lifted to the branch
//! nearest the fan triangulation.

use std::f64::consts::PI;

use crate::ball::PointConfig;
use crate::error::{Error, Result};
use crate::linalg::{Tolerance, C64};
use crate::realhyp::{clamped_acos, is_real_config};
use crate::rkhs::{alpha, gram_of_config, kos, wrap_angle};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AreaReport {
    /// Unsigned area.
    pub area: f64,
    pub signed: f64,
    /// The kos-product expression, signed.
    pub kos_expression: f64,
    /// `2 alpha` for triangles, `-2 arg` of the cyclic kernel product for
    /// polygons, signed.
    pub kernel_expression: f64,
}

fn check_disk(x: &PointConfig, min: usize) -> Result<()> {
    if x.dim() != 1 {
        return Err(Error::invalid("points must lie in the one-dimensional ball"));
    }
    if x.len() < min {
        return Err(Error::invalid(format!("need at least {min} points")));
    }
    Ok(())
}

/// kos values lose precision like `1 / delta^2` for nearby points, so the
/// comparison band widens accordingly.
fn kos_band(x: &PointConfig, tol: &Tolerance) -> f64 {
    let d = x.distance_matrix();
    let mut m = 1.0f64;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            m = m.min(d[(i, j)]);
        }
    }
    tol.eq_tol / (m * m)
}

fn agree(a: f64, b: f64, what: &str, band: f64) -> Result<()> {
    let d = wrap_angle(a - b).abs();
    if d > band {
        return Err(Error::Disagreement(format!("{what}: expressions differ by {d:.3e}")));
    }
    Ok(())
}

/// Triangle in the one-dimensional ball: `arg(kos_1(2,3) kos_2(3,1) kos_3(1,2)) - pi`
/// compared with `2 alpha(1,2,3)`.
pub fn area_ch1(x: &PointConfig, tol: &Tolerance) -> Result<AreaReport> {
    check_disk(x, 3)?;
    if x.len() != 3 {
        return Err(Error::invalid("a triangle has three points"));
    }
    let g = gram_of_config(x);
    let p = kos(&g, 0, 1, 2, tol)? * kos(&g, 1, 2, 0, tol)? * kos(&g, 2, 0, 1, tol)?;
    let by_kos = wrap_angle(p.arg() - PI);
    let by_alpha = wrap_angle(2.0 * alpha(&g, 0, 1, 2)?);
    agree(by_kos, by_alpha, "triangle area", kos_band(x, tol))?;
    Ok(AreaReport {
        area: by_alpha.abs(),
        signed: by_alpha,
        kos_expression: by_kos,
        kernel_expression: by_alpha,
    })
}

/// Sum of `2 alpha(1, i, i+1)` over the fan from the first vertex.
pub fn fan_area(x: &PointConfig) -> Result<f64> {
    let g = gram_of_config(x);
    let mut s = 0.0;
    for i in 1..x.len() - 1 {
        s += 2.0 * alpha(&g, 0, i, i + 1)?;
    }
    Ok(s)
}

/// Convex polygon with vertices in cyclic order (convexity is assumed, not
/// checked): `arg prod kos_i(i+1, i-1) - (n-2) pi` and `-2 arg prod k(x_i, x_{i+1})`.
pub fn polygon_area_ch1(x: &PointConfig, tol: &Tolerance) -> Result<AreaReport> {
    check_disk(x, 3)?;
    let n = x.len();
    let g = gram_of_config(x);
    let mut pk = C64::new(1.0, 0.0);
    let mut pg = C64::new(1.0, 0.0);
    for i in 0..n {
        pk *= kos(&g, i, (i + 1) % n, (i + n - 1) % n, tol)?;
        pg *= g.get(i, (i + 1) % n);
    }
    let fan = fan_area(x)?;
    let lift = |e: f64| fan + wrap_angle(e - fan);
    let by_kos = lift(pk.arg() - (n as f64 - 2.0) * PI);
    let by_kernel = lift(-2.0 * pg.arg());
    agree(by_kos, by_kernel, "polygon area", kos_band(x, tol))?;
    Ok(AreaReport {
        area: by_kernel.abs(),
        signed: by_kernel,
        kos_expression: by_kos,
        kernel_expression: by_kernel,
    })
}

/// Triangle with real coordinates: four times the angle defect,
/// `4 (pi - arccos kos_1(2,3) - arccos kos_2(3,1) - arccos kos_3(1,2))`.
pub fn area_bk2(x: &PointConfig, tol: &Tolerance) -> Result<f64> {
    if x.len() != 3 {
        return Err(Error::invalid("a triangle has three points"));
    }
    if !is_real_config(x, tol) || x.points().iter().any(|p| p.coords().iter().any(|c| c.im.abs() > tol.eq_tol)) {
        return Err(Error::invalid("Beltrami-Klein areas need real coordinates"));
    }
    let g = gram_of_config(x);
    let mut sum = 0.0;
    for (s, i, j) in [(0, 1, 2), (1, 2, 0), (2, 0, 1)] {
        sum += clamped_acos(kos(&g, s, i, j, tol)?.re, tol)?;
    }
    let a = 4.0 * (PI - sum);
    // arccos near +-1 only resolves angles to about the square root of the
    // error in its argument
    if a < -12.0 * tol.eq_tol.sqrt() {
        return Err(Error::Disagreement(format!("negative area {a:.3e}")));
    }
    Ok(a.max(0.0))
}

/// Area of the real triangle `0, (a, 0), (0, b)` from the density
/// `4 (1 - |x|^2)^{-3/2}`, integrated in closed form along `y` and by
/// Simpson's rule along `x` with at most step `h`.
pub fn bk2_right_triangle_quadrature(a: f64, b: f64, h: f64) -> f64 {
    let inner = |x: f64| {
        let c2 = 1.0 - x * x;
        let y = b * (1.0 - x / a);
        4.0 * y / (c2 * (c2 - y * y).sqrt())
    };
    let mut n = (a / h).ceil() as usize;
    if n % 2 == 1 {
        n += 1;
    }
    let step = a / n as f64;
    let mut s = inner(0.0) + inner(a);
    for k in 1..n {
        s += if k % 2 == 1 { 4.0 } else { 2.0 } * inner(k as f64 * step);
    }
    s * step / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::random_automorphism;
    use crate::sampling::{random_config, rng};
    use rand::Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn disk(pts: &[C64]) -> PointConfig {
        PointConfig::from_coords(&pts.iter().map(|&z| vec![z]).collect::<Vec<_>>(), &tol()).unwrap()
    }

    fn circle_polygon(r: &mut impl Rng, n: usize) -> PointConfig {
        let rad = r.random_range(0.2..0.95);
        let mut t: Vec<f64> = (0..n).map(|_| r.random_range(0.0..2.0 * PI)).collect();
        t.sort_by(f64::total_cmp);
        disk(&t.iter().map(|&a| C64::from_polar(rad, a)).collect::<Vec<_>>())
    }

    #[test]
    fn collinear_and_tiny() {
        let c = |x| C64::new(x, 0.0);
        assert!(area_ch1(&disk(&[c(-0.5), c(0.1), c(0.7)]), &tol()).unwrap().area.abs() < 1e-15);
        let eps = 1e-4;
        let a = area_ch1(&disk(&[c(0.3), C64::new(0.3 + eps, 0.0), C64::new(0.3, eps)]), &tol()).unwrap();
        assert!(a.area < 1e-6);
    }

    #[test]
    fn triangle_expressions_agree() {
        let mut r = rng(21);
        for _ in 0..200 {
            let x = random_config(&mut r, 3, 1, 0.95);
            area_ch1(&x, &tol()).unwrap();
        }
    }

    #[test]
    fn polygon_matches_triangulation() {
        let mut r = rng(22);
        for n in 3..=8 {
            for _ in 0..20 {
                let x = circle_polygon(&mut r, n);
                let p = polygon_area_ch1(&x, &tol()).unwrap();
                assert!((p.signed - fan_area(&x).unwrap()).abs() < 1e-9);
                if n == 3 {
                    assert!((p.area - area_ch1(&x, &tol()).unwrap().area).abs() < 1e-9);
                }
            }
        }
        let rr = 0.6;
        let sq = disk(&[C64::new(rr, 0.0), C64::new(0.0, rr), C64::new(-rr, 0.0), C64::new(0.0, -rr)]);
        let split = area_ch1(&sq.reordered(&[0, 1, 2], &tol()).unwrap(), &tol()).unwrap().area
            + area_ch1(&sq.reordered(&[0, 2, 3], &tol()).unwrap(), &tol()).unwrap().area;
        assert!((polygon_area_ch1(&sq, &tol()).unwrap().area - split).abs() < 1e-9);
    }

    #[test]
    fn ch1_area_invariance() {
        let mut r = rng(23);
        for s in 0..50 {
            let x = random_config(&mut r, 3, 1, 0.9);
            let y = random_automorphism(s, 1).apply_config(&x, &tol()).unwrap();
            let a = area_ch1(&x, &tol()).unwrap();
            let b = area_ch1(&y, &tol()).unwrap();
            assert!((a.signed - b.signed).abs() < 1e-8);
        }
    }

    #[test]
    fn bk2_right_triangle() {
        let (a, b) = (0.6, 0.5);
        let z = C64::new(0.0, 0.0);
        let x = PointConfig::from_coords(&[vec![z, z], vec![C64::new(a, 0.0), z], vec![z, C64::new(b, 0.0)]], &tol()).unwrap();
        let area = area_bk2(&x, &tol()).unwrap();
        let q = bk2_right_triangle_quadrature(a, b, 1e-3);
        assert!((area - q).abs() < 1e-3, "{area} vs {q}");
        let refl = PointConfig::from_coords(&[vec![z, z], vec![C64::new(a, 0.0), z], vec![z, C64::new(-b, 0.0)]], &tol()).unwrap();
        assert!((area_bk2(&refl, &tol()).unwrap() - area).abs() < 1e-8);
    }

    #[test]
    fn bk2_degenerate() {
        let c = |x, y| vec![C64::new(x, 0.0), C64::new(y, 0.0)];
        let x = PointConfig::from_coords(&[c(-0.3, -0.3), c(0.1, 0.1), c(0.5, 0.5)], &tol()).unwrap();
        assert!(area_bk2(&x, &tol()).unwrap() < 1e-7);
        let x = PointConfig::from_coords(&[c(0.1, 0.1), c(0.1 + 1e-4, 0.1), c(0.1, 0.1 + 1e-4)], &tol()).unwrap();
        assert!(area_bk2(&x, &tol()).unwrap() < 1e-6);
    }
}

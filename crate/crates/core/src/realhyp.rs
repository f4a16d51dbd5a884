//! Real hyperbolic configurations: reality test, vertex and dihedral angle
//! matrices at a trivalent corner, the law of cosines linking them, the
//! realizability criteria, amplitudes and the Cayley cubic surface.
//!
//! Angle triples are indexed by the pairs of edge labels at the corner,
//! in the order `(2,3), (2,4), (3,4)`. The dihedral angle `da_rs` is the one
//! along the third edge `t`, so that `va_rs` and `da_rs` sit in the same
//! matrix position and duality is `pi - angle` entrywise.

use std::f64::consts::PI;

use crate::ball::PointConfig;
use crate::error::{Error, Result};
use crate::linalg::{is_psd, HermitianMatrix, Tolerance, C64};
use crate::rkhs::{gram_of_config, kos, kos_matrix, GramSpec};

const PAIRS: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

/// `arccos` with inputs up to `eq_tol` outside `[-1, 1]` clamped.
pub fn clamped_acos(x: f64, tol: &Tolerance) -> Result<f64> {
    if !x.is_finite() || x.abs() > 1.0 + tol.eq_tol {
        return Err(Error::invalid(format!("cosine {x} lies outside [-1, 1]")));
    }
    Ok(x.clamp(-1.0, 1.0).acos())
}

/// True iff every kos value over all base points is real.
pub fn is_real_gram(g: &GramSpec, tol: &Tolerance) -> bool {
    let n = g.dim();
    for s in 0..n {
        for i in 0..n {
            for j in i + 1..n {
                if i == s || j == s {
                    continue;
                }
                match kos(g, s, i, j, tol) {
                    Ok(k) if k.im.abs() <= tol.eq_tol => {}
                    _ => return false,
                }
            }
        }
    }
    true
}

pub fn is_real_config(x: &PointConfig, tol: &Tolerance) -> bool {
    is_real_gram(&gram_of_config(x), tol)
}

/// Three angles in the open interval `(0, pi)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleTriple(pub [f64; 3]);

impl AngleTriple {
    pub fn new(a: [f64; 3]) -> Result<Self> {
        for t in a {
            if !(t > 0.0 && t < PI) {
                return Err(Error::invalid(format!("angle {t} is outside (0, pi)")));
            }
        }
        Ok(AngleTriple(a))
    }

    pub fn from_cosines(c: [f64; 3], tol: &Tolerance) -> Result<Self> {
        AngleTriple::new([clamped_acos(c[0], tol)?, clamped_acos(c[1], tol)?, clamped_acos(c[2], tol)?])
    }

    pub fn angles(&self) -> [f64; 3] {
        self.0
    }

    pub fn cosines(&self) -> [f64; 3] {
        self.0.map(f64::cos)
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }
}

fn check_unit_symmetric(m: &[[f64; 3]; 3], tol: &Tolerance) -> Result<()> {
    for i in 0..3 {
        if (m[i][i] - 1.0).abs() > tol.eq_tol {
            return Err(Error::invalid("angle matrices have unit diagonal"));
        }
        for j in 0..3 {
            if (m[i][j] - m[j][i]).abs() > tol.eq_tol {
                return Err(Error::invalid("angle matrix is not symmetric"));
            }
            if !m[i][j].is_finite() || m[i][j].abs() > 1.0 + tol.eq_tol {
                return Err(Error::invalid(format!("entry {} lies outside [-1, 1]", m[i][j])));
            }
        }
    }
    Ok(())
}

fn from_offdiag(c: [f64; 3]) -> [[f64; 3]; 3] {
    [[1.0, c[0], c[1]], [c[0], 1.0, c[2]], [c[1], c[2], 1.0]]
}

fn det3(c: [f64; 3]) -> f64 {
    cayley_p(CayleyPoint {
        x: c[0],
        y: c[1],
        z: c[2],
    })
}

fn to_hermitian(m: &[[f64; 3]; 3]) -> HermitianMatrix {
    HermitianMatrix::from_upper(3, |i, j| C64::new(m[i][j], 0.0))
}

/// Entries `cos(va_rs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexAngleMatrix {
    m: [[f64; 3]; 3],
}

impl VertexAngleMatrix {
    pub fn new(m: [[f64; 3]; 3], tol: &Tolerance) -> Result<Self> {
        check_unit_symmetric(&m, tol)?;
        Ok(VertexAngleMatrix { m })
    }

    pub fn from_angles(va: &AngleTriple) -> Self {
        VertexAngleMatrix {
            m: from_offdiag(va.cosines()),
        }
    }

    pub fn cosines(&self) -> [f64; 3] {
        PAIRS.map(|(i, j)| self.m[i][j])
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn angles(&self, tol: &Tolerance) -> Result<[f64; 3]> {
        let c = self.cosines();
        Ok([clamped_acos(c[0], tol)?, clamped_acos(c[1], tol)?, clamped_acos(c[2], tol)?])
    }

    pub fn det(&self) -> f64 {
        det3(self.cosines())
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        to_hermitian(&self.m)
    }
}

/// Entries `-cos(da_rs)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralAngleMatrix {
    m: [[f64; 3]; 3],
}

impl DihedralAngleMatrix {
    pub fn new(m: [[f64; 3]; 3], tol: &Tolerance) -> Result<Self> {
        check_unit_symmetric(&m, tol)?;
        Ok(DihedralAngleMatrix { m })
    }

    pub fn from_angles(da: &AngleTriple) -> Self {
        DihedralAngleMatrix {
            m: from_offdiag(da.cosines().map(|c| -c)),
        }
    }

    /// `cos(da_rs)`, the negated entries.
    pub fn cosines(&self) -> [f64; 3] {
        PAIRS.map(|(i, j)| -self.m[i][j])
    }

    pub fn rows(&self) -> &[[f64; 3]; 3] {
        &self.m
    }

    pub fn angles(&self, tol: &Tolerance) -> Result<[f64; 3]> {
        let c = self.cosines();
        Ok([clamped_acos(c[0], tol)?, clamped_acos(c[1], tol)?, clamped_acos(c[2], tol)?])
    }

    pub fn det(&self) -> f64 {
        det3(PAIRS.map(|(i, j)| self.m[i][j]))
    }

    pub fn to_hermitian(&self) -> HermitianMatrix {
        to_hermitian(&self.m)
    }
}

/// Vertex angles at index 0 of a real four-point configuration.
pub fn vertex_angles(x: &PointConfig, tol: &Tolerance) -> Result<VertexAngleMatrix> {
    if x.len() != 4 {
        return Err(Error::invalid("vertex angles need a four-point configuration"));
    }
    if !is_real_config(x, tol) {
        return Err(Error::invalid("configuration is not real"));
    }
    let km = kos_matrix(&gram_of_config(x), 0, tol)?;
    let mut m = [[1.0; 3]; 3];
    for (i, j) in PAIRS {
        let v = km.m.get(i, j).re.clamp(-1.0, 1.0);
        m[i][j] = v;
        m[j][i] = v;
    }
    Ok(VertexAngleMatrix { m })
}

// `(c_rs -/+ c_rt c_st) / (sin_rt sin_st)` for every pair rs
fn law_of_cosines(a: &AngleTriple, sign: f64, tol: &Tolerance) -> Result<[f64; 3]> {
    let c = a.cosines();
    let s = a.0.map(f64::sin);
    if s.iter().any(|&v| v <= tol.eq_tol) {
        return Err(Error::invalid("an angle is too close to 0 or pi"));
    }
    // position k holds pair k; the other two positions are its neighbours
    let others = [(1, 2), (0, 2), (0, 1)];
    Ok([0, 1, 2].map(|k| {
        let (p, q) = others[k];
        (c[k] + sign * c[p] * c[q]) / (s[p] * s[q])
    }))
}

/// `cos(da_rs) = (cos va_rs - cos va_rt cos va_st) / (sin va_rt sin va_st)`.
/// All three lie in `[-1, 1]` exactly when the vertex is realizable.
pub fn dihedral_from_vertex(va: &AngleTriple, tol: &Tolerance) -> Result<[f64; 3]> {
    law_of_cosines(va, -1.0, tol)
}

/// `cos(va_rs) = (cos da_rs + cos da_rt cos da_st) / (sin da_rt sin da_st)`.
pub fn vertex_from_dihedral(da: &AngleTriple, tol: &Tolerance) -> Result<[f64; 3]> {
    law_of_cosines(da, 1.0, tol)
}

/// Largest angle at most the sum of the other two.
pub fn tia_holds(g: &AngleTriple, tol: &Tolerance) -> bool {
    let a = g.0;
    let max = a.iter().copied().fold(f64::MIN, f64::max);
    max <= g.sum() - max + tol.eq_tol
}

/// Angle sum at least `pi`.
pub fn tid_holds(g: &AngleTriple, tol: &Tolerance) -> bool {
    g.sum() >= PI - tol.eq_tol
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AngleCriterion {
    pub holds: bool,
    /// Triangle inequality (vertex) or sum bound (dihedral) alone.
    pub simple: bool,
    pub psd: bool,
    pub det: f64,
    pub near_boundary: bool,
}

fn criterion(simple: bool, complete: bool, m: &HermitianMatrix, det: f64, tol: &Tolerance) -> Result<AngleCriterion> {
    let psd = is_psd(m, tol)?.psd;
    let near = det.abs() <= 10.0 * tol.eq_tol.max(tol.psd_tol);
    if psd != complete && !near {
        return Err(Error::Disagreement(format!("angle criterion says {complete}, matrix test says {psd} (det {det:.3e})")));
    }
    Ok(AngleCriterion {
        holds: complete,
        simple,
        psd,
        det,
        near_boundary: near,
    })
}

/// Realizability of three vertex angles: the triangle inequality together
/// with the sum bound `<= 2 pi`, cross-checked against PSD of the cosine
/// matrix.
pub fn gva_check(g: &AngleTriple, tol: &Tolerance) -> Result<AngleCriterion> {
    let simple = tia_holds(g, tol);
    let complete = simple && g.sum() <= 2.0 * PI + tol.eq_tol;
    let m = VertexAngleMatrix::from_angles(g);
    criterion(simple, complete, &m.to_hermitian(), m.det(), tol)
}

/// Realizability of three dihedral angles: the sum bound `>= pi` together
/// with `B + C <= A + pi` in every arrangement, cross-checked against PSD of
/// the negated cosine matrix.
pub fn gda_check(g: &AngleTriple, tol: &Tolerance) -> Result<AngleCriterion> {
    let simple = tid_holds(g, tol);
    let s = g.sum();
    let complete = simple && g.0.iter().all(|&a| s - a <= a + PI + tol.eq_tol);
    let m = DihedralAngleMatrix::from_angles(g);
    criterion(simple, complete, &m.to_hermitian(), m.det(), tol)
}

/// `pi - angle` entrywise.
pub fn dual(g: &AngleTriple) -> AngleTriple {
    AngleTriple(g.0.map(|a| PI - a))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralGateVerdict {
    pub feasible: bool,
    pub near_boundary: bool,
    pub det: f64,
    /// `(cos da34 + cos da23 cos da24)^2`.
    pub trig_lhs: f64,
    /// `(1 - cos^2 da23)(1 - cos^2 da24)`.
    pub trig_rhs: f64,
}

/// Dihedral angles of a tetrahedron corner: PSD of the matrix, compared
/// with the trigonometric inequality.
pub fn dihedral_gate(l: &DihedralAngleMatrix, tol: &Tolerance) -> Result<DihedralGateVerdict> {
    let [c23, c24, c34] = l.cosines();
    let lhs = (c34 + c23 * c24).powi(2);
    let rhs = (1.0 - c23 * c23) * (1.0 - c24 * c24);
    let by_trig = lhs <= rhs + tol.eq_tol;
    let v = is_psd(&l.to_hermitian(), tol)?;
    let det = l.det();
    let near = det.abs() <= 10.0 * tol.eq_tol.max(tol.psd_tol);
    if v.psd != by_trig && !near {
        return Err(Error::Disagreement(format!("PSD says {}, trigonometric form says {by_trig}", v.psd)));
    }
    Ok(DihedralGateVerdict {
        feasible: v.psd,
        near_boundary: near,
        det,
        trig_lhs: lhs,
        trig_rhs: rhs,
    })
}

/// The trigonometric inequality on vertex angles and the three dihedral
/// cosines, next to the determinant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VertexGateConditions {
    pub det: f64,
    /// `(cos va34 - cos va23 cos va24)^2`.
    pub trig_lhs: f64,
    /// `sin^2 va23 sin^2 va24`.
    pub trig_rhs: f64,
    pub cos_da: [f64; 3],
}

pub fn vertex_gate_conditions(va: &AngleTriple, tol: &Tolerance) -> Result<VertexGateConditions> {
    let [c23, c24, c34] = va.cosines();
    let [s23, s24, _] = va.0.map(f64::sin);
    Ok(VertexGateConditions {
        det: det3([c23, c24, c34]),
        trig_lhs: (c34 - c23 * c24).powi(2),
        trig_rhs: (s23 * s24).powi(2),
        cos_da: dihedral_from_vertex(va, tol)?,
    })
}

/// Polynomial and factorized sides of an amplitude identity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Amplitude {
    pub polynomial: f64,
    pub factorized: f64,
}

/// `1 + 2abc - a^2 - b^2 - c^2` on the cosines against
/// `4 sin(s) sin(s - a) sin(s - b) sin(s - c)`, `s` the half sum.
pub fn amplitude_va(va: [f64; 3]) -> Amplitude {
    let s = 0.5 * (va[0] + va[1] + va[2]);
    Amplitude {
        polynomial: det3(va.map(f64::cos)),
        factorized: 4.0 * s.sin() * (s - va[0]).sin() * (s - va[1]).sin() * (s - va[2]).sin(),
    }
}

/// `1 - 2abc - a^2 - b^2 - c^2` on the cosines against
/// `-4 cos(S) cos(S - A) cos(S - B) cos(S - C)`.
pub fn amplitude_da(da: [f64; 3]) -> Amplitude {
    let s = 0.5 * (da[0] + da[1] + da[2]);
    Amplitude {
        polynomial: det3(da.map(|a| -a.cos())),
        factorized: -4.0 * s.cos() * (s - da[0]).cos() * (s - da[1]).cos() * (s - da[2]).cos(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CayleyPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CayleyClass {
    Interior,
    SmoothBoundary,
    Singular,
    Exterior,
    OutOfBox,
}

impl CayleyClass {
    pub fn as_str(&self) -> &'static str {
        match self {
            CayleyClass::Interior => "interior",
            CayleyClass::SmoothBoundary => "smooth_boundary",
            CayleyClass::Singular => "singular",
            CayleyClass::Exterior => "exterior",
            CayleyClass::OutOfBox => "out_of_box",
        }
    }
}

pub fn cayley_p(pt: CayleyPoint) -> f64 {
    let CayleyPoint { x, y, z } = pt;
    1.0 + 2.0 * x * y * z - x * x - y * y - z * z
}

const NODES: [[f64; 3]; 4] = [[1.0, 1.0, 1.0], [1.0, -1.0, -1.0], [-1.0, 1.0, -1.0], [-1.0, -1.0, 1.0]];

pub fn cayley_classify(pt: CayleyPoint, tol: &Tolerance) -> CayleyClass {
    let v = [pt.x, pt.y, pt.z];
    if v.iter().any(|c| !c.is_finite() || c.abs() > 1.0 + tol.eq_tol) {
        return CayleyClass::OutOfBox;
    }
    if NODES.iter().any(|n| n.iter().zip(&v).all(|(a, b)| (a - b).abs() <= tol.eq_tol)) {
        return CayleyClass::Singular;
    }
    let p = cayley_p(pt);
    if p.abs() <= tol.eq_tol {
        CayleyClass::SmoothBoundary
    } else if p > 0.0 {
        CayleyClass::Interior
    } else {
        CayleyClass::Exterior
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rkhs::quiggin_gram;
    use crate::sampling::{random_real_config, rng};
    use rand::Rng;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn t(a: f64, b: f64, c: f64) -> AngleTriple {
        AngleTriple::new([a, b, c]).unwrap()
    }

    fn real_corner(dirs: [[f64; 3]; 3], r: f64) -> PointConfig {
        let mut pts = vec![vec![C64::new(0.0, 0.0); 3]];
        for d in dirs {
            let n = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            pts.push(d.iter().map(|v| C64::new(r * v / n, 0.0)).collect());
        }
        PointConfig::from_coords(&pts, &tol()).unwrap()
    }

    #[test]
    fn reality() {
        let mut r = rng(3);
        assert!(is_real_config(&random_real_config(&mut r, 4, 3, 0.8), &tol()));
        assert!(!is_real_gram(&quiggin_gram(0.25).unwrap(), &tol()));
        let z = C64::new(0.0, 0.0);
        let x = PointConfig::from_coords(&[vec![z, z], vec![C64::new(0.5, 0.0), z], vec![C64::new(0.0, 0.3), C64::new(0.2, 0.0)]], &tol()).unwrap();
        assert!(!is_real_config(&x, &tol()));
    }

    #[test]
    fn vertex_angle_examples() {
        let m = vertex_angles(&real_corner([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]], 0.5), &tol()).unwrap();
        assert!(m.cosines().iter().all(|c| c.abs() < 1e-14));
        let m = vertex_angles(&real_corner([[1.0, 0.0, 0.0], [-1.0, 0.0, 0.0], [0.0, 1.0, 0.0]], 0.5), &tol()).unwrap();
        assert!((m.cosines()[0] + 1.0).abs() < 1e-14);
        let w = 2.0 * PI / 3.0;
        let eq = real_corner([[1.0, 0.0, 0.0], [w.cos(), w.sin(), 0.0], [w.cos(), -w.sin(), 0.0]], 0.5);
        let m = vertex_angles(&eq, &tol()).unwrap();
        assert!(m.cosines().iter().all(|c| (c + 0.5).abs() < 1e-12));
        assert!(m.det().abs() < 1e-12);
    }

    #[test]
    fn law_of_cosines_examples() {
        let cd = dihedral_from_vertex(&t(PI / 2.0, PI / 2.0, PI / 2.0), &tol()).unwrap();
        assert!(cd.iter().all(|c| c.abs() < 1e-15));
        let cd = dihedral_from_vertex(&t(PI / 3.0, PI / 3.0, PI / 3.0), &tol()).unwrap();
        assert!(cd.iter().all(|c| (c - 1.0 / 3.0).abs() < 1e-15));
        let cd = dihedral_from_vertex(&t(PI / 2.0, PI / 4.0, PI / 5.0), &tol()).unwrap();
        assert!(cd.iter().any(|c| c.abs() > 1.0));
        assert!(!gva_check(&t(PI / 2.0, PI / 4.0, PI / 5.0), &tol()).unwrap().holds);

        let a = (1.0f64 / 3.0).acos();
        let cv = vertex_from_dihedral(&t(a, a, a), &tol()).unwrap();
        assert!(cv.iter().all(|c| (c - 0.5).abs() < 1e-12));
    }

    #[test]
    fn law_of_cosines_round_trip() {
        let mut r = rng(4);
        let mut done = 0;
        while done < 200 {
            let va = t(r.random_range(0.1..3.0), r.random_range(0.1..3.0), r.random_range(0.1..3.0));
            if !gva_check(&va, &tol()).unwrap().holds || VertexAngleMatrix::from_angles(&va).det() < 1e-6 {
                continue;
            }
            let da = AngleTriple::from_cosines(dihedral_from_vertex(&va, &tol()).unwrap(), &tol()).unwrap();
            let back = vertex_from_dihedral(&da, &tol()).unwrap();
            for k in 0..3 {
                assert!((back[k] - va.0[k].cos()).abs() < 1e-9);
            }
            done += 1;
        }
    }

    #[test]
    fn criteria_examples() {
        let right = t(PI / 2.0, PI / 2.0, PI / 2.0);
        assert!(gva_check(&right, &tol()).unwrap().holds && gda_check(&right, &tol()).unwrap().holds);
        let q = t(PI / 4.0, PI / 4.0, PI / 4.0);
        assert!(gva_check(&q, &tol()).unwrap().holds);
        assert!(!gda_check(&q, &tol()).unwrap().holds);
        assert!(!tid_holds(&q, &tol()));
        let third = t(PI / 3.0, PI / 3.0, PI / 3.0);
        assert!(gva_check(&third, &tol()).unwrap().holds);
        assert!(gda_check(&dual(&third), &tol()).unwrap().holds);
        assert_eq!(dual(&right), right);
    }

    #[test]
    fn simple_criteria_are_not_sufficient() {
        let wide = t(0.9 * PI, 0.9 * PI, 0.9 * PI);
        let v = gva_check(&wide, &tol()).unwrap();
        assert!(v.simple && !v.psd && !v.holds);
        let skew = t(0.1, 0.9 * PI, 0.9 * PI);
        let d = gda_check(&skew, &tol()).unwrap();
        assert!(d.simple && !d.psd && !d.holds);
    }

    #[test]
    fn complete_criteria_match_psd_on_grid() {
        let h = PI / 24.0;
        for i in 1..24 {
            for j in 1..24 {
                for k in 1..24 {
                    let g = t(i as f64 * h, j as f64 * h, k as f64 * h);
                    let v = gva_check(&g, &tol()).unwrap();
                    let d = gda_check(&dual(&g), &tol()).unwrap();
                    if !v.near_boundary {
                        assert_eq!(v.holds, v.psd);
                        assert_eq!(v.holds, d.holds);
                    }
                }
            }
        }
    }

    #[test]
    fn dihedral_gate_examples() {
        let right = DihedralAngleMatrix::from_angles(&t(PI / 2.0, PI / 2.0, PI / 2.0));
        assert!(dihedral_gate(&right, &tol()).unwrap().feasible);
        let q = DihedralAngleMatrix::from_angles(&t(PI / 4.0, PI / 4.0, PI / 4.0));
        assert!(!dihedral_gate(&q, &tol()).unwrap().feasible);
        let w = 2.0 * PI / 3.0;
        let v = dihedral_gate(&DihedralAngleMatrix::from_angles(&t(w, w, w)), &tol()).unwrap();
        assert!(v.feasible && (v.det - 0.5).abs() < 1e-12);
    }

    #[test]
    fn amplitudes() {
        let a = amplitude_va([PI / 2.0; 3]);
        assert!((a.polynomial - 1.0).abs() < 1e-15 && (a.factorized - 1.0).abs() < 1e-12);
        let d = amplitude_da([PI / 2.0; 3]);
        assert!((d.polynomial - 1.0).abs() < 1e-15 && (d.factorized - 1.0).abs() < 1e-12);
        assert!(amplitude_va([PI / 2.0, PI / 4.0, PI / 4.0]).factorized.abs() < 1e-15);
        let mut r = rng(5);
        for _ in 0..1000 {
            let g = [r.random_range(0.0..PI), r.random_range(0.0..PI), r.random_range(0.0..PI)];
            let a = amplitude_va(g);
            let d = amplitude_da(g);
            assert!((a.polynomial - a.factorized).abs() < 1e-9);
            assert!((d.polynomial - d.factorized).abs() < 1e-9);
        }
    }

    #[test]
    fn cayley() {
        let p = |x, y, z| CayleyPoint { x, y, z };
        assert_eq!(cayley_p(p(0.0, 0.0, 0.0)), 1.0);
        assert_eq!(cayley_classify(p(0.0, 0.0, 0.0), &tol()), CayleyClass::Interior);
        assert_eq!(cayley_classify(p(1.0, 1.0, 1.0), &tol()), CayleyClass::Singular);
        assert_eq!(cayley_classify(p(-1.0, -1.0, 1.0), &tol()), CayleyClass::Singular);
        let (a, b) = (1.0f64, 0.7f64);
        assert_eq!(cayley_classify(p(a.cos(), b.cos(), (2.0 * PI - a - b).cos()), &tol()), CayleyClass::SmoothBoundary);
        assert_eq!(cayley_classify(p(0.9, -0.9, 0.9), &tol()), CayleyClass::Exterior);
        assert_eq!(cayley_classify(p(1.2, 0.0, 0.0), &tol()), CayleyClass::OutOfBox);
    }

    #[test]
    fn acos_clamp() {
        assert_eq!(clamped_acos(1.0 + 1e-12, &tol()).unwrap(), 0.0);
        assert!(clamped_acos(1.1, &tol()).is_err());
    }
}

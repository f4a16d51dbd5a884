//! Gluing congruence data of pieces into a configuration: matched triangles,
//! the tetrahedron gate, Variations 1-3 and the four-kernel gate.
//!
//! Global labels are one-based; label 1 is the shared base point.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};

use crate::ball::PointConfig;
use crate::error::{Error, Result};
use crate::linalg::{is_psd, principal_minors, Certificate, HermitianMatrix, PsdVerdict, Tolerance, C64};
use crate::moduli::{decode, encode, ModuliPoint};
use crate::rkhs::{cpp_certify, delta_h, gram_of_config, is_rescaling_equivalent, kos, regular_subspace, wrap_angle, GramSpec};
use crate::triangles::{TriangleSDoublePrime, TriangleSPrime};

/// Default distance from the base point when a gate is called without
/// length data.
pub const DEFAULT_RHO: f64 = 0.5;

/// For every piece, the global label of each of its local points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoherenceScheme {
    pieces: Vec<Vec<usize>>,
}

impl CoherenceScheme {
    pub fn new(pieces: Vec<Vec<usize>>) -> Result<Self> {
        if pieces.is_empty() {
            return Err(Error::invalid("scheme has no pieces"));
        }
        let mut hit = std::collections::BTreeSet::new();
        for (p, piece) in pieces.iter().enumerate() {
            let mut seen = std::collections::BTreeSet::new();
            for &l in piece {
                if l == 0 {
                    return Err(Error::invalid("global labels start at 1"));
                }
                if !seen.insert(l) {
                    return Err(Error::invalid(format!("piece {p} maps two points to label {l}")));
                }
                hit.insert(l);
            }
        }
        let max = *hit.iter().next_back().expect("nonempty");
        if hit.len() != max {
            return Err(Error::invalid("scheme leaves a global label uncovered"));
        }
        Ok(CoherenceScheme { pieces })
    }

    /// Faces {1,2,3}, {1,3,4}, {1,4,2} of a tetrahedron.
    pub fn tetrahedron_faces() -> Self {
        CoherenceScheme {
            pieces: vec![vec![1, 2, 3], vec![1, 3, 4], vec![1, 4, 2]],
        }
    }

    pub fn pieces(&self) -> &[Vec<usize>] {
        &self.pieces
    }

    pub fn n_labels(&self) -> usize {
        self.pieces.iter().flatten().copied().max().unwrap_or(0)
    }
}

/// Three triangles `T2 = {1,2,3}`, `T3 = {1,3,4}`, `T4 = {1,4,2}` given by
/// their data at the shared vertex, whose sides at that vertex match:
/// `T2.d13 = T3.d12`, `T3.d13 = T4.d12`, `T4.d13 = T2.d12`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchedTriangleSet {
    faces: [TriangleSDoublePrime; 3],
}

impl MatchedTriangleSet {
    pub fn new(faces: [TriangleSDoublePrime; 3], tol: &Tolerance) -> Result<Self> {
        for k in 0..3 {
            let (a, b) = (faces[k], faces[(k + 1) % 3]);
            if (a.d13 - b.d12).abs() > tol.eq_tol {
                return Err(Error::Coherence(format!(
                    "face {} ends with side {} but face {} starts with {}",
                    k + 1,
                    a.d13,
                    (k + 1) % 3 + 1,
                    b.d12
                )));
            }
        }
        Ok(MatchedTriangleSet { faces })
    }

    /// The three faces at index 0 of a four-point configuration.
    pub fn from_config(x: &PointConfig, tol: &Tolerance) -> Result<Self> {
        if x.len() != 4 {
            return Err(Error::invalid("matched faces come from four points"));
        }
        let face = |o: [usize; 3]| TriangleSDoublePrime::from_config(&x.reordered(&o, tol)?, tol);
        MatchedTriangleSet::new([face([0, 1, 2])?, face([0, 2, 3])?, face([0, 3, 1])?], tol)
    }

    pub fn faces(&self) -> &[TriangleSDoublePrime; 3] {
        &self.faces
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Config(PointConfig),
    Gram(GramSpec),
    /// Most negative principal minor, rows named by global labels.
    NegativeMinor { labels: Vec<usize>, value: f64 },
    NegativeEigenvalue(f64),
}

impl Witness {
    pub fn is_construction(&self) -> bool {
        matches!(self, Witness::Config(_) | Witness::Gram(_))
    }
}

/// The four equivalent conditions for a 3x3 unit-diagonal Hermitian matrix
/// `[[1, a1, a2], [., 1, a3], [., ., 1]]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GateConditions {
    pub psd: bool,
    pub det: f64,
    /// `1 + 2 Re(a1 conj(a2) a3) - |a1|^2 - |a2|^2 - |a3|^2`.
    pub polynomial: f64,
    /// `|a3 - conj(a1) a2|^2`.
    pub disk_lhs: f64,
    /// `(1 - |a1|^2)(1 - |a2|^2)`.
    pub disk_rhs: f64,
}

/// Feasible values of the one unknown entry in Variation 3.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion {
    /// Disks (center, radius) from the two 3x3 minors containing the unknown.
    pub disks: [(C64, f64); 2],
    /// `det(z) = c0 + 2 Re(c1 z) - c2 |z|^2`.
    pub c0: f64,
    pub c1: C64,
    pub c2: f64,
    pub best_z: C64,
    pub best_det: f64,
    pub used_grid: bool,
}

impl FeasibleRegion {
    pub fn det_at(&self, z: C64) -> f64 {
        self.c0 + 2.0 * (self.c1 * z).re - self.c2 * z.norm_sqr()
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.disks.iter().all(|(c, r)| (z - c).norm() <= r + tol) && z.norm() <= 1.0 + tol && self.det_at(z) >= -tol
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssemblyVerdict {
    pub feasible: bool,
    /// The decisive quantity lies within the tolerance band around zero.
    pub near_boundary: bool,
    pub witness: Witness,
    /// Global labels naming the rows of `matrix`.
    pub labels: Vec<usize>,
    /// The assembled kos matrix (for Variation 3, at the chosen unknown).
    pub matrix: Option<HermitianMatrix>,
    /// Every principal minor, rows named by global labels.
    pub minors: Vec<(Vec<usize>, f64)>,
    pub conditions: Option<GateConditions>,
    pub free_parameters: Option<FeasibleRegion>,
}

fn labelled_minors(m: &HermitianMatrix, labels: &[usize]) -> Vec<(Vec<usize>, f64)> {
    principal_minors(m)
        .into_iter()
        .map(|pm| (pm.indices.iter().map(|&i| labels[i]).collect(), pm.value))
        .collect()
}

fn failure_witness(v: &PsdVerdict, minors: &[(Vec<usize>, f64)]) -> Witness {
    for c in &v.certificate {
        if let Certificate::NegativeMinor { .. } = c {
            let (labels, value) = minors
                .iter()
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .cloned()
                .expect("nonempty minors");
            return Witness::NegativeMinor { labels, value };
        }
    }
    Witness::NegativeEigenvalue(v.min_eigenvalue)
}

/// Clears eigenvalues in the tolerance band below zero and restores the
/// unit diagonal, so boundary-feasible data still decodes.
fn clip_to_psd(m: &HermitianMatrix) -> HermitianMatrix {
    let eig = m.as_dmatrix().clone().symmetric_eigen();
    let lam = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(l.max(0.0), 0.0)));
    let p = &eig.eigenvectors * lam * eig.eigenvectors.adjoint();
    let d: Vec<f64> = (0..m.dim()).map(|i| p[(i, i)].re.max(1e-300).sqrt()).collect();
    HermitianMatrix::from_upper(m.dim(), |i, j| if i == j { C64::new(1.0, 0.0) } else { p[(i, j)] / (d[i] * d[j]) })
}

/// Configuration with base at the origin, distances `rho` and kos matrix `m`.
pub fn witness_from_kos(rho: &[f64], m: &HermitianMatrix, tol: &Tolerance) -> Result<PointConfig> {
    let mp = ModuliPoint::new(DVector::from_column_slice(rho), clip_to_psd(m), tol)?;
    decode(&mp, None, tol)
}

fn build_verdict(m: HermitianMatrix, labels: Vec<usize>, rho: &[f64], tol: &Tolerance) -> Result<AssemblyVerdict> {
    let v = is_psd(&m, tol)?;
    let minors = labelled_minors(&m, &labels);
    let witness = if v.psd {
        Witness::Config(witness_from_kos(rho, &m, tol)?)
    } else {
        failure_witness(&v, &minors)
    };
    Ok(AssemblyVerdict {
        feasible: v.psd,
        near_boundary: v.near_boundary,
        witness,
        labels,
        matrix: Some(m),
        minors,
        conditions: None,
        free_parameters: None,
    })
}

/// Checks every side length identified by the scheme.
pub fn validate_matched(faces: &[TriangleSPrime], scheme: &CoherenceScheme, tol: &Tolerance) -> Result<bool> {
    if faces.len() != scheme.pieces().len() {
        return Err(Error::invalid("scheme and face list differ in length"));
    }
    let mut lengths: BTreeMap<(usize, usize), f64> = BTreeMap::new();
    for (f, piece) in faces.iter().zip(scheme.pieces()) {
        if piece.len() != 3 {
            return Err(Error::invalid("every piece of a triangle scheme has three points"));
        }
        for (a, b, d) in [(0, 1, f.d12), (0, 2, f.d13), (1, 2, f.d23)] {
            let key = (piece[a].min(piece[b]), piece[a].max(piece[b]));
            if let Some(&prev) = lengths.get(&key) {
                if (prev - d).abs() > tol.eq_tol {
                    return Ok(false);
                }
            } else {
                lengths.insert(key, d);
            }
        }
    }
    Ok(true)
}

/// `alpha(1,2,3) - alpha(2,3,4) + alpha(3,4,1) - alpha(4,1,2) = 0 mod 2 pi`.
pub fn validate_cocycle(alphas: [f64; 4], tol: &Tolerance) -> bool {
    wrap_angle(alphas[0] - alphas[1] + alphas[2] - alphas[3]).abs() <= tol.eq_tol
}

/// The face {2,3,4} from faces {1,2,3}, {1,3,4}, {1,4,2}: sides by matching,
/// angular invariant from the cocycle.
pub fn derive_fourth(faces: &[TriangleSPrime; 3], scheme: &CoherenceScheme, tol: &Tolerance) -> Result<TriangleSPrime> {
    if scheme != &CoherenceScheme::tetrahedron_faces() {
        return Err(Error::invalid("derive_fourth expects the faces {1,2,3}, {1,3,4}, {1,4,2}"));
    }
    if !validate_matched(faces, scheme, tol)? {
        return Err(Error::Coherence("faces do not match along shared edges".into()));
    }
    let [a, b, c] = faces;
    // alpha(3,4,1) = alpha(1,3,4) and alpha(4,1,2) = -alpha(1,4,2)
    let alpha234 = wrap_angle(a.alpha123 + b.alpha123 + c.alpha123);
    TriangleSPrime::new(a.d23, c.d23, b.d23, alpha234)
}

pub fn gate_conditions(a1: C64, a2: C64, a3: C64, tol: &Tolerance) -> Result<GateConditions> {
    let m = HermitianMatrix::from_upper(3, |i, j| match (i, j) {
        (0, 1) => a1,
        (0, 2) => a2,
        (1, 2) => a3,
        _ => C64::new(1.0, 0.0),
    });
    Ok(GateConditions {
        psd: is_psd(&m, tol)?.psd,
        det: m.det(),
        polynomial: 1.0 + 2.0 * (a1 * a2.conj() * a3).re - a1.norm_sqr() - a2.norm_sqr() - a3.norm_sqr(),
        disk_lhs: (a3 - a1.conj() * a2).norm_sqr(),
        disk_rhs: (1.0 - a1.norm_sqr()) * (1.0 - a2.norm_sqr()),
    })
}

/// Tetrahedron gate on the three kos values at the base:
/// feasible iff `|K34 - conj(K23) K24|^2 <= (1 - |K23|^2)(1 - |K24|^2)`.
/// The other three equivalent conditions are evaluated alongside and must
/// agree away from the boundary band. `rho` are the distances of labels
/// 2, 3, 4 from the base, used for the witness.
pub fn tetra_gate(k23: C64, k24: C64, k34: C64, rho: Option<[f64; 3]>, tol: &Tolerance) -> Result<AssemblyVerdict> {
    for (name, k) in [("K23", k23), ("K24", k24)] {
        if k.norm() > 1.0 + tol.eq_tol {
            return Err(Error::invalid(format!("|{name}| = {} exceeds 1", k.norm())));
        }
    }
    let cond = gate_conditions(k23, k24, k34, tol)?;
    let by_disk = cond.disk_lhs <= cond.disk_rhs + tol.eq_tol;
    let by_det = cond.det >= -tol.eq_tol;
    let by_poly = cond.polynomial >= -tol.eq_tol;
    let verdicts = [cond.psd, by_det, by_poly, by_disk];
    if verdicts.iter().any(|&v| v != by_disk) && cond.det.abs() > 10.0 * tol.eq_tol {
        return Err(Error::Disagreement(format!(
            "gate conditions disagree: psd={}, det={}, polynomial={}, disk={}",
            cond.psd, cond.det, cond.polynomial, by_disk
        )));
    }
    let m = HermitianMatrix::from_upper(3, |i, j| match (i, j) {
        (0, 1) => k23,
        (0, 2) => k24,
        (1, 2) => k34,
        _ => C64::new(1.0, 0.0),
    });
    let labels = vec![2, 3, 4];
    let minors = labelled_minors(&m, &labels);
    let witness = if by_disk {
        let r = rho.unwrap_or([DEFAULT_RHO; 3]);
        match witness_from_kos(&r, &m, tol) {
            Ok(x) => Witness::Config(x),
            // default lengths can stack collinear rays on one point
            Err(Error::Coincident(..)) if rho.is_none() => Witness::Config(witness_from_kos(&[0.3, 0.5, 0.7], &m, tol)?),
            Err(e) => return Err(e),
        }
    } else {
        Witness::NegativeMinor {
            labels: labels.clone(),
            value: cond.det,
        }
    };
    Ok(AssemblyVerdict {
        feasible: by_disk,
        near_boundary: cond.det.abs() <= tol.eq_tol,
        witness,
        labels,
        matrix: Some(m),
        minors,
        conditions: Some(cond),
        free_parameters: None,
    })
}

/// Matrix `[[1, kos(T2), conj(kos(T4))], [., 1, kos(T3)], [., ., 1]]` through
/// the tetrahedron gate; the witness is checked face by face.
pub fn q1_from_triangles(matched: &MatchedTriangleSet, tol: &Tolerance) -> Result<AssemblyVerdict> {
    let [t2, t3, t4] = matched.faces;
    let rho = [t2.d12, t3.d12, t4.d12];
    let v = tetra_gate(t2.kos123, t4.kos123.conj(), t3.kos123, Some(rho), tol)?;
    if let Witness::Config(x) = &v.witness {
        let rebuilt = MatchedTriangleSet::from_config(x, tol)?;
        for (k, (a, b)) in rebuilt.faces.iter().zip(&matched.faces).enumerate() {
            let dev = (a.d12 - b.d12).abs().max((a.d13 - b.d13).abs()).max((a.kos123 - b.kos123).norm());
            if dev > 1e3 * tol.eq_tol.max(tol.psd_tol) {
                return Err(Error::Disagreement(format!("witness face {} deviates by {dev:.3e}", k + 2)));
            }
        }
    }
    Ok(v)
}

/// Admissible kos values for the third face: center `conj(K23) K24`,
/// radius `sqrt((1 - |K23|^2)(1 - |K24|^2))`.
pub fn third_triangle_disk(k23: C64, k24: C64) -> (C64, f64) {
    (k23.conj() * k24, ((1.0 - k23.norm_sqr()) * (1.0 - k24.norm_sqr())).max(0.0).sqrt())
}

struct Collector {
    n: usize,
    rho: Vec<Option<f64>>,
    kos: DMatrix<Option<C64>>,
}

impl Collector {
    /// Labels 2..=n+1 map to rows 0..n.
    fn new(n: usize) -> Self {
        Collector {
            n,
            rho: vec![None; n],
            kos: DMatrix::from_element(n, n, None),
        }
    }

    fn row(&self, label: usize) -> Result<usize> {
        if label < 2 || label > self.n + 1 {
            return Err(Error::invalid(format!("label {label} is outside 2..={}", self.n + 1)));
        }
        Ok(label - 2)
    }

    fn put_rho(&mut self, label: usize, r: f64, tol: &Tolerance) -> Result<()> {
        let i = self.row(label)?;
        match self.rho[i] {
            Some(p) if (p - r).abs() > tol.eq_tol => Err(Error::Coherence(format!(
                "distance from 1 to {label} given as both {p} and {r}"
            ))),
            _ => {
                self.rho[i] = Some(r);
                Ok(())
            }
        }
    }

    fn put_kos(&mut self, a: usize, b: usize, k: C64, tol: &Tolerance) -> Result<()> {
        let (i, j) = (self.row(a)?, self.row(b)?);
        if i == j {
            return Err(Error::invalid("kos between a label and itself"));
        }
        match self.kos[(i, j)] {
            Some(p) if (p - k).norm() > tol.eq_tol => Err(Error::Coherence(format!(
                "kos at 1 between {a} and {b} given as both {p} and {k}"
            ))),
            _ => {
                self.kos[(i, j)] = Some(k);
                self.kos[(j, i)] = Some(k.conj());
                Ok(())
            }
        }
    }

    fn finish(self) -> Result<(Vec<f64>, HermitianMatrix, Vec<usize>)> {
        let rho = self
            .rho
            .iter()
            .enumerate()
            .map(|(i, r)| r.ok_or_else(|| Error::invalid(format!("no piece covers the pair {{1,{}}}", i + 2))))
            .collect::<Result<Vec<_>>>()?;
        for i in 0..self.n {
            for j in i + 1..self.n {
                if self.kos[(i, j)].is_none() {
                    return Err(Error::invalid(format!(
                        "incomplete cover: no piece contains labels 1, {}, {}",
                        i + 2,
                        j + 2
                    )));
                }
            }
        }
        let m = HermitianMatrix::from_upper(self.n, |i, j| if i == j { C64::new(1.0, 0.0) } else { self.kos[(i, j)].expect("checked") });
        Ok((rho, m, (2..self.n + 2).collect()))
    }
}

/// Variation 1: triangles all having their first vertex at label 1. Each
/// scheme piece lists the global labels `[1, a, b]` of one triangle.
pub fn assemble_v1(triangles: &[TriangleSDoublePrime], scheme: &CoherenceScheme, tol: &Tolerance) -> Result<AssemblyVerdict> {
    if triangles.len() != scheme.pieces().len() {
        return Err(Error::invalid("scheme and triangle list differ in length"));
    }
    let n = scheme.n_labels() - 1;
    if n < 2 {
        return Err(Error::invalid("need at least three labels"));
    }
    let mut col = Collector::new(n);
    for (t, piece) in triangles.iter().zip(scheme.pieces()) {
        if piece.len() != 3 || piece[0] != 1 {
            return Err(Error::invalid("every triangle must have its first vertex at label 1"));
        }
        col.put_rho(piece[1], t.d12, tol)?;
        col.put_rho(piece[2], t.d13, tol)?;
        col.put_kos(piece[1], piece[2], t.kos123, tol)?;
    }
    let (rho, m, labels) = col.finish()?;
    build_verdict(m, labels, &rho, tol)
}

/// Variation 2: `n` facets of an `(n+1)`-point set, facet `r` omitting label
/// `r + 2`, each listed with label 1 first.
pub fn assemble_v2(facets: &[PointConfig], scheme: &CoherenceScheme, tol: &Tolerance) -> Result<AssemblyVerdict> {
    let n = facets.len();
    if n < 2 || scheme.pieces().len() != n {
        return Err(Error::invalid("Variation 2 needs n >= 2 facets matching the scheme"));
    }
    if scheme.n_labels() != n + 1 {
        return Err(Error::invalid("facets must cover labels 1..=n+1"));
    }
    let mut col = Collector::new(n);
    for (r, (f, piece)) in facets.iter().zip(scheme.pieces()).enumerate() {
        if f.len() != n || piece.len() != n {
            return Err(Error::invalid(format!("facet {r} must have {n} points")));
        }
        if piece[0] != 1 {
            return Err(Error::invalid(format!("facet {r} must list label 1 first")));
        }
        if piece.contains(&(r + 2)) {
            return Err(Error::invalid(format!("facet {r} must omit label {}", r + 2)));
        }
        let g = gram_of_config(f);
        for a in 1..n {
            col.put_rho(piece[a], delta_h(&g, 0, a)?, tol)?;
            for b in a + 1..n {
                col.put_kos(piece[a], piece[b], kos(&g, 0, a, b, tol)?, tol)?;
            }
        }
    }
    let (rho, m, labels) = col.finish()?;
    let det = m.det();
    let feasible = det >= -tol.eq_tol;
    let v = is_psd(&m, tol)?;
    if v.psd != feasible && v.min_eigenvalue.abs() > 10.0 * tol.psd_tol * v.scale && det.abs() > 10.0 * tol.eq_tol {
        return Err(Error::Disagreement(format!(
            "top determinant {det:.6e} and eigenvalue route (lambda_min {:.6e}) disagree",
            v.min_eigenvalue
        )));
    }
    let minors = labelled_minors(&m, &labels);
    let witness = if feasible {
        Witness::Config(witness_from_kos(&rho, &m, tol)?)
    } else {
        Witness::NegativeMinor {
            labels: labels.clone(),
            value: det,
        }
    };
    Ok(AssemblyVerdict {
        feasible,
        near_boundary: det.abs() <= tol.eq_tol,
        witness,
        labels,
        matrix: Some(m),
        minors,
        conditions: None,
        free_parameters: None,
    })
}

fn circle_intersections(c1: C64, r1: f64, c2: C64, r2: f64) -> Vec<C64> {
    let d = (c2 - c1).norm();
    if d == 0.0 || d > r1 + r2 || d < (r1 - r2).abs() {
        return Vec::new();
    }
    let a = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    let h = (r1 * r1 - a * a).max(0.0).sqrt();
    let u = (c2 - c1) / d;
    let p = c1 + u * a;
    let perp = C64::new(-u.im, u.re);
    vec![p + perp * h, p - perp * h]
}

/// Variation 3: two four-point sets sharing the triangle {1,3,4}; `ya` is on
/// labels 1,2,3,4 and `yb` on labels 1,3,4,5, in that order. The kos value
/// between labels 2 and 5 is free.
pub fn assemble_v3(ya: &PointConfig, yb: &PointConfig, tol: &Tolerance) -> Result<AssemblyVerdict> {
    if ya.len() != 4 || yb.len() != 4 {
        return Err(Error::invalid("Variation 3 takes two four-point sets"));
    }
    let ga = gram_of_config(ya);
    let gb = gram_of_config(yb);
    let shared_a = [delta_h(&ga, 0, 2)?, delta_h(&ga, 0, 3)?];
    let shared_b = [delta_h(&gb, 0, 1)?, delta_h(&gb, 0, 2)?];
    let ka34 = kos(&ga, 0, 2, 3, tol)?;
    let kb34 = kos(&gb, 0, 1, 2, tol)?;
    let dev = (shared_a[0] - shared_b[0]).abs().max((shared_a[1] - shared_b[1]).abs()).max((ka34 - kb34).norm());
    if dev > tol.eq_tol {
        return Err(Error::Coherence(format!("the shared triangles {{1,3,4}} differ by {dev:.3e}")));
    }
    let k23 = kos(&ga, 0, 1, 2, tol)?;
    let k24 = kos(&ga, 0, 1, 3, tol)?;
    let k34 = ka34;
    let k35 = kos(&gb, 0, 1, 3, tol)?;
    let k45 = kos(&gb, 0, 2, 3, tol)?;
    let rho = [delta_h(&ga, 0, 1)?, shared_a[0], shared_a[1], delta_h(&gb, 0, 3)?];

    let with_z = |z: C64| {
        HermitianMatrix::from_upper(4, |i, j| match (i, j) {
            (0, 1) => k23,
            (0, 2) => k24,
            (0, 3) => z,
            (1, 2) => k34,
            (1, 3) => k35,
            (2, 3) => k45,
            _ => C64::new(1.0, 0.0),
        })
    };
    let f = |z: C64| with_z(z).det();
    let c0 = f(C64::new(0.0, 0.0));
    let fp = f(C64::new(1.0, 0.0));
    let fm = f(C64::new(-1.0, 0.0));
    let fi = f(C64::new(0.0, 1.0));
    let c2 = c0 - 0.5 * (fp + fm);
    let c1 = C64::new(0.25 * (fp - fm), -0.5 * (fi - c0 + c2));

    // minors {3,2,5} and {4,2,5}
    let d1 = (k23 * k35, ((1.0 - k23.norm_sqr()) * (1.0 - k35.norm_sqr())).max(0.0).sqrt());
    let d2 = (k24 * k45, ((1.0 - k24.norm_sqr()) * (1.0 - k45.norm_sqr())).max(0.0).sqrt());
    let slack = tol.eq_tol;
    let in_both = |z: C64| (z - d1.0).norm() <= d1.1 + slack && (z - d2.0).norm() <= d2.1 + slack;

    let q = |z: C64| c0 + 2.0 * (c1 * z).re - c2 * z.norm_sqr();
    let mut cands: Vec<C64> = Vec::new();
    let used_grid = c2 <= tol.psd_tol;
    if !used_grid {
        cands.push(c1.conj() / c2);
    }
    for (c, r) in [d1, d2] {
        if r == 0.0 {
            cands.push(c);
            continue;
        }
        let b = (c1 - c.conj() * c2) * r;
        let phi = if b.norm() > 0.0 { -b.arg() } else { 0.0 };
        cands.push(c + C64::from_polar(r, phi));
        cands.push(c - C64::from_polar(r, phi));
    }
    cands.extend(circle_intersections(d1.0, d1.1, d2.0, d2.1));
    if used_grid {
        let (c, r) = if d1.1 <= d2.1 { d1 } else { d2 };
        for i in 0..201 {
            for j in 0..201 {
                let z = c + C64::new(-r + 2.0 * r * i as f64 / 200.0, -r + 2.0 * r * j as f64 / 200.0);
                cands.push(z);
            }
        }
    }
    let best = cands
        .into_iter()
        .filter(|&z| in_both(z))
        .map(|z| (z, q(z)))
        .max_by(|a, b| a.1.total_cmp(&b.1));

    let region = |best_z: C64, best_det: f64| FeasibleRegion {
        disks: [d1, d2],
        c0,
        c1,
        c2,
        best_z,
        best_det,
        used_grid,
    };
    let labels = vec![2, 3, 4, 5];
    let Some((z, val)) = best else {
        // disjoint disks: some 3x3 minor is negative for every z
        return Ok(AssemblyVerdict {
            feasible: false,
            near_boundary: false,
            witness: Witness::NegativeEigenvalue(f64::NEG_INFINITY),
            labels,
            matrix: None,
            minors: Vec::new(),
            conditions: None,
            free_parameters: Some(region(C64::new(f64::NAN, f64::NAN), f64::NEG_INFINITY)),
        });
    };
    let feasible = val >= -tol.eq_tol && z.norm() <= 1.0 + tol.eq_tol;
    let m = with_z(z);
    let minors = labelled_minors(&m, &labels);
    let witness = if feasible {
        Witness::Config(witness_from_kos(&rho, &m, tol)?)
    } else {
        Witness::NegativeMinor {
            labels: labels.clone(),
            value: val,
        }
    };
    Ok(AssemblyVerdict {
        feasible,
        near_boundary: val.abs() <= tol.eq_tol,
        witness,
        labels,
        matrix: Some(m),
        minors,
        conditions: None,
        free_parameters: Some(region(z, val)),
    })
}

/// Scheme of the four-kernel gate: `J2 -> {1,3,4}`, `J3 -> {1,2,4}`,
/// `J4 -> {1,2,3}`.
pub fn q2_default_scheme() -> CoherenceScheme {
    CoherenceScheme {
        pieces: vec![vec![1, 3, 4], vec![1, 2, 4], vec![1, 2, 3]],
    }
}

/// Is there a four-point space with the complete Pick property whose
/// three-point subspaces through label 1 are the given ones? `rho`
/// overrides the distances used for the witness when the data leave them open.
pub fn q2_gate(spaces: &[GramSpec; 3], scheme: Option<&CoherenceScheme>, tol: &Tolerance) -> Result<AssemblyVerdict> {
    let default = q2_default_scheme();
    let scheme = scheme.unwrap_or(&default);
    if scheme.pieces().len() != 3 || scheme.n_labels() != 4 {
        return Err(Error::invalid("the four-kernel gate needs three pieces on labels 1..=4"));
    }
    let mut col = Collector::new(3);
    for (k, (g, piece)) in spaces.iter().zip(scheme.pieces()).enumerate() {
        if g.dim() != 3 || piece.len() != 3 {
            return Err(Error::invalid(format!("space {k} must be three-dimensional")));
        }
        if !cpp_certify(g, tol)?.is_cpp {
            return Err(Error::invalid(format!("space {k} lacks the complete Pick property")));
        }
        let base = piece
            .iter()
            .position(|&l| l == 1)
            .ok_or_else(|| Error::invalid(format!("space {k} does not contain label 1")))?;
        let rest: Vec<usize> = (0..3).filter(|&i| i != base).collect();
        for &i in &rest {
            col.put_rho(piece[i], delta_h(g, base, i)?, tol)?;
        }
        col.put_kos(piece[rest[0]], piece[rest[1]], kos(g, base, rest[0], rest[1], tol)?, tol)?;
    }
    let (rho, m, labels) = col.finish()?;
    let mut v = build_verdict(m, labels, &rho, tol)?;
    if let Witness::Config(x) = &v.witness {
        let h = gram_of_config(x);
        for (k, (g, piece)) in spaces.iter().zip(scheme.pieces()).enumerate() {
            let idx: Vec<usize> = piece.iter().map(|&l| l - 1).collect();
            if !is_rescaling_equivalent(&regular_subspace(&h, &idx)?, g, &Tolerance { eq_tol: 1e3 * tol.eq_tol, ..*tol }) {
                return Err(Error::Disagreement(format!("witness subspace {k} is not a rescaling of the input")));
            }
        }
        v.witness = Witness::Gram(h);
    }
    Ok(v)
}

/// Encoded distances and kos matrix of a configuration, for callers that
/// compare assembled output with a known set.
pub fn kos_data(x: &PointConfig, tol: &Tolerance) -> Result<(Vec<f64>, HermitianMatrix)> {
    let m = encode(x, tol)?;
    Ok((m.rho().iter().copied().collect(), m.m().clone()))
}

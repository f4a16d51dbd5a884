//! Unit ball model of complex hyperbolic space.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{inner, Tolerance, C64};
use crate::sampling;

/// Points closer than this to the unit sphere are rejected.
pub const BOUNDARY_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct BallPoint {
    z: DVector<C64>,
}

impl BallPoint {
    pub fn new(z: DVector<C64>) -> Result<Self> {
        if z.is_empty() {
            return Err(Error::invalid("ball point needs at least one coordinate"));
        }
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::invalid("non-finite coordinate"));
        }
        let r = z.norm();
        if r >= 1.0 - BOUNDARY_MARGIN {
            return Err(Error::invalid(format!("point norm {r} is not inside the open ball")));
        }
        Ok(BallPoint { z })
    }

    pub fn from_slice(z: &[C64]) -> Result<Self> {
        BallPoint::new(DVector::from_column_slice(z))
    }

    /// Real coordinates, e.g. for points of the Beltrami-Klein model.
    pub fn from_real(x: &[f64]) -> Result<Self> {
        BallPoint::new(DVector::from_iterator(x.len(), x.iter().map(|&v| C64::new(v, 0.0))))
    }

    pub fn origin(dim: usize) -> Self {
        BallPoint {
            z: DVector::zeros(dim.max(1)),
        }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn coords(&self) -> &DVector<C64> {
        &self.z
    }

    pub fn norm(&self) -> f64 {
        self.z.norm()
    }

    /// Zero-pads to `dim` coordinates (no-op if already that large).
    pub fn padded(&self, dim: usize) -> BallPoint {
        if dim <= self.dim() {
            return self.clone();
        }
        let mut z = DVector::zeros(dim);
        z.rows_mut(0, self.dim()).copy_from(&self.z);
        BallPoint { z }
    }
}

fn same_dim(a: &BallPoint, b: &BallPoint) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `1 / (1 - <<w, z>>)`.
pub fn szego_kernel(w: &BallPoint, z: &BallPoint) -> Result<C64> {
    same_dim(w, z)?;
    Ok(C64::new(1.0, 0.0) / (C64::new(1.0, 0.0) - inner(&w.z, &z.z)))
}

/// Pseudo-hyperbolic distance, in `[0, 1)`.
pub fn pseudo_dist(y: &BallPoint, w: &BallPoint) -> Result<f64> {
    same_dim(y, w)?;
    let yy = y.z.norm_squared();
    let ww = w.z.norm_squared();
    let d = (C64::new(1.0, 0.0) - inner(&y.z, &w.z)).norm_sqr();
    Ok((1.0 - (1.0 - yy) * (1.0 - ww) / d).max(0.0).sqrt())
}

/// Ordered, pairwise distinct points of one ambient dimension.
/// Index 0 is the distinguished point.
#[derive(Debug, Clone, PartialEq)]
pub struct PointConfig {
    pts: Vec<BallPoint>,
}

impl PointConfig {
    pub fn new(pts: Vec<BallPoint>, tol: &Tolerance) -> Result<Self> {
        if pts.is_empty() {
            return Err(Error::invalid("empty configuration"));
        }
        let d = pts[0].dim();
        for p in &pts {
            if p.dim() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    found: p.dim(),
                });
            }
        }
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                if pseudo_dist(&pts[i], &pts[j])? <= tol.eq_tol {
                    return Err(Error::Coincident(i, j));
                }
            }
        }
        Ok(PointConfig { pts })
    }

    pub fn from_coords(coords: &[Vec<C64>], tol: &Tolerance) -> Result<Self> {
        let pts = coords.iter().map(|c| BallPoint::from_slice(c)).collect::<Result<Vec<_>>>()?;
        PointConfig::new(pts, tol)
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.pts[0].dim()
    }

    pub fn points(&self) -> &[BallPoint] {
        &self.pts
    }

    pub fn point(&self, i: usize) -> &BallPoint {
        &self.pts[i]
    }

    /// New configuration whose k-th point is `self[order[k]]`.
    pub fn reordered(&self, order: &[usize], tol: &Tolerance) -> Result<PointConfig> {
        let pts = order
            .iter()
            .map(|&i| {
                self.pts.get(i).cloned().ok_or(Error::IndexOutOfRange {
                    index: i,
                    size: self.len(),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PointConfig::new(pts, tol)
    }

    /// Coordinatewise complex conjugate (an anti-holomorphic isometry).
    pub fn conjugated(&self) -> PointConfig {
        PointConfig {
            pts: self
                .pts
                .iter()
                .map(|p| BallPoint {
                    z: p.z.map(|c| c.conj()),
                })
                .collect(),
        }
    }

    pub fn distance_matrix(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| pseudo_dist(&self.pts[i], &self.pts[j]).expect("same dimension"))
    }
}

/// The complex geodesic through two distinct points.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexGeodesic {
    p: BallPoint,
    q: BallPoint,
}

impl ComplexGeodesic {
    pub fn new(p: BallPoint, q: BallPoint, tol: &Tolerance) -> Result<Self> {
        if pseudo_dist(&p, &q)? <= tol.eq_tol {
            return Err(Error::Coincident(0, 1));
        }
        Ok(ComplexGeodesic { p, q })
    }

    pub fn points(&self) -> (&BallPoint, &BallPoint) {
        (&self.p, &self.q)
    }
}

/// The involution exchanging `a` and 0:
/// `phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <<z, a>>)`, `s_a = sqrt(1 - |a|^2)`.
/// `phi_0` is taken to be the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Involution {
    a: DVector<C64>,
    aa: f64,
    s: f64,
}

impl Involution {
    pub fn base(&self) -> &DVector<C64> {
        &self.a
    }

    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        if z.dim() != self.a.len() {
            return Err(Error::DimensionMismatch {
                expected: self.a.len(),
                found: z.dim(),
            });
        }
        if self.aa == 0.0 {
            return Ok(z.clone());
        }
        let za = inner(&z.z, &self.a);
        let pz = &self.a * (za / self.aa);
        let qz = &z.z - &pz;
        let num = &self.a - &pz - qz * C64::new(self.s, 0.0);
        BallPoint::new(num / (C64::new(1.0, 0.0) - za))
    }
}

pub fn involution(a: &BallPoint) -> Involution {
    let aa = a.z.norm_squared();
    Involution {
        a: a.z.clone(),
        aa,
        s: (1.0 - aa).sqrt(),
    }
}

/// `z -> U phi_a(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Automorphism {
    unitary: DMatrix<C64>,
    inv: Involution,
}

impl Automorphism {
    pub fn new(unitary: DMatrix<C64>, base: &BallPoint) -> Result<Self> {
        let d = base.dim();
        if unitary.nrows() != d || unitary.ncols() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: unitary.nrows(),
            });
        }
        let dev = (unitary.adjoint() * &unitary - DMatrix::<C64>::identity(d, d)).norm();
        if dev > 1e-10 {
            return Err(Error::invalid(format!("matrix is not unitary (deviation {dev:.3e})")));
        }
        Ok(Automorphism {
            unitary,
            inv: involution(base),
        })
    }

    pub fn identity(dim: usize) -> Self {
        Automorphism {
            unitary: DMatrix::identity(dim, dim),
            inv: involution(&BallPoint::origin(dim)),
        }
    }

    pub fn dim(&self) -> usize {
        self.unitary.nrows()
    }

    pub fn apply(&self, z: &BallPoint) -> Result<BallPoint> {
        let w = self.inv.apply(z)?;
        BallPoint::new(&self.unitary * &w.z)
    }

    pub fn apply_config(&self, x: &PointConfig, tol: &Tolerance) -> Result<PointConfig> {
        let pts = x.points().iter().map(|p| self.apply(p)).collect::<Result<Vec<_>>>()?;
        PointConfig::new(pts, tol)
    }
}

/// Deterministic pseudo-random automorphism: a Haar-like unitary composed
/// with the involution about a random point of norm below 0.9.
pub fn random_automorphism(seed: u64, dim: usize) -> Automorphism {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let u = sampling::random_unitary(&mut rng, dim);
    let a = sampling::random_ball_point(&mut rng, dim, 0.9);
    Automorphism {
        unitary: u,
        inv: involution(&a),
    }
}

/// Orthonormal columns: Gram-Schmidt over `vecs` (skipping vanishing
/// residuals) and then the standard basis, until `dim` columns exist.
/// Also reports which input vector produced each column.
pub(crate) fn orthonormal_completion(vecs: &[&DVector<C64>], dim: usize) -> (DMatrix<C64>, Vec<Option<usize>>) {
    let mut basis: Vec<DVector<C64>> = Vec::with_capacity(dim);
    let mut origin = Vec::with_capacity(dim);
    let push = |v: &DVector<C64>, thresh: f64, basis: &mut Vec<DVector<C64>>| -> bool {
        let mut r = v.clone();
        for _ in 0..2 {
            for b in basis.iter() {
                let c = b.dotc(&r);
                r -= b * c;
            }
        }
        let n = r.norm();
        if n > thresh {
            basis.push(r / C64::new(n, 0.0));
            true
        } else {
            false
        }
    };
    for (k, v) in vecs.iter().enumerate() {
        if basis.len() == dim {
            break;
        }
        if push(v, 1e-12 * v.norm().max(1e-300), &mut basis) {
            origin.push(Some(k));
        }
    }
    for e in 0..dim {
        if basis.len() == dim {
            break;
        }
        let mut v = DVector::zeros(dim);
        v[e] = C64::new(1.0, 0.0);
        if push(&v, 1e-6, &mut basis) {
            origin.push(None);
        }
    }
    (DMatrix::from_columns(&basis), origin)
}

/// Metric projection onto a complex geodesic: move its first point to 0 and
/// its second onto the positive first axis, keep the first coordinate, map back.
pub fn project_to_complex_geodesic(g: &ComplexGeodesic, x: &BallPoint) -> Result<BallPoint> {
    same_dim(&g.p, x)?;
    let d = x.dim();
    let phi = involution(&g.p);
    let q = phi.apply(&g.q)?;
    let (b, _) = orthonormal_completion(&[q.coords()], d);
    let y = b.adjoint() * phi.apply(x)?.coords();
    let mut proj = DVector::zeros(d);
    proj[0] = y[0];
    phi.apply(&BallPoint::new(&b * proj)?)
}

/// Congruent copy in model position: x1 = 0, x2 = (a, 0, ..) with a > 0,
/// x3 = (x, b, 0, ..) with b >= 0 and, for four points, x4 = (y, z, c) with
/// c >= 0. The output has dimension |X| - 1.
pub fn normalize_to_model(x: &PointConfig, tol: &Tolerance) -> Result<PointConfig> {
    let n = x.len();
    if !(3..=4).contains(&n) {
        return Err(Error::invalid(format!("model form needs 3 or 4 points, got {n}")));
    }
    let d = x.dim();
    let phi = involution(x.point(0));
    let ys = x.points().iter().map(|p| phi.apply(p)).collect::<Result<Vec<_>>>()?;
    let refs: Vec<&DVector<C64>> = ys[1..].iter().map(|p| p.coords()).collect();
    let (b, origin) = orthonormal_completion(&refs, d);
    let out_dim = n - 1;
    let mut pts = Vec::with_capacity(n);
    pts.push(BallPoint::origin(out_dim));
    for (k, y) in ys.iter().enumerate().skip(1) {
        let mut c = DVector::zeros(out_dim);
        for col in 0..d.min(out_dim) {
            let v = b.column(col).dotc(y.coords());
            // pivots produced by this very vector are real and positive
            c[col] = if origin[col] == Some(k - 1) { C64::new(v.norm(), 0.0) } else { v };
        }
        pts.push(BallPoint::new(c)?);
    }
    PointConfig::new(pts, tol)
}

//! Small dense complex linear algebra: determinants, principal minors,
//! positivity tests with two independent routes, and Gram factorization.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Relative tolerances. Both are scaled by `max(1, max |entry|)` of the
/// matrix under test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub eq_tol: f64,
    pub psd_tol: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            eq_tol: 1e-9,
            psd_tol: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn new(eq_tol: f64, psd_tol: f64) -> Result<Self> {
        for (name, v) in [("eq_tol", eq_tol), ("psd_tol", psd_tol)] {
            if !(v.is_finite() && v > 0.0 && v < 1.0) {
                return Err(Error::invalid(format!("{name} must lie in (0,1), got {v}")));
            }
        }
        Ok(Tolerance { eq_tol, psd_tol })
    }
}

/// `max(1, max |entry|)`.
pub fn entry_scale(m: &DMatrix<C64>) -> f64 {
    m.iter().fold(1.0_f64, |s, z| s.max(z.norm()))
}

fn check_square(m: &DMatrix<C64>) -> Result<()> {
    if m.nrows() == 0 {
        return Err(Error::invalid("matrix must be at least 1x1"));
    }
    if m.nrows() != m.ncols() {
        return Err(Error::DimensionMismatch {
            expected: m.nrows(),
            found: m.ncols(),
        });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::invalid("matrix has non-finite entries"));
    }
    Ok(())
}

/// Square complex matrix, n >= 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    m: DMatrix<C64>,
}

impl ComplexMatrix {
    pub fn new(m: DMatrix<C64>) -> Result<Self> {
        check_square(&m)?;
        Ok(ComplexMatrix { m })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }
}

/// Hermitian matrix. Construction rejects inputs that are not Hermitian
/// within `eq_tol * scale`; nothing is symmetrized behind the caller's back.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix {
    m: DMatrix<C64>,
}

impl HermitianMatrix {
    pub fn new(m: DMatrix<C64>, tol: &Tolerance) -> Result<Self> {
        check_square(&m)?;
        let n = m.nrows();
        let mut dev = 0.0_f64;
        for i in 0..n {
            dev = dev.max(m[(i, i)].im.abs());
            for j in i + 1..n {
                dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if dev > tol.eq_tol * entry_scale(&m) {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermitianMatrix { m })
    }

    /// Builds an exactly Hermitian matrix from its upper triangle.
    /// `f(i, i)` contributes only its real part.
    pub fn from_upper(n: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        assert!(n > 0, "empty Hermitian matrix");
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(f(i, i).re, 0.0);
            for j in i + 1..n {
                let v = f(i, j);
                m[(i, j)] = v;
                m[(j, i)] = v.conj();
            }
        }
        HermitianMatrix { m }
    }

    pub fn identity(n: usize) -> Self {
        HermitianMatrix::from_upper(n, |i, j| if i == j { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.m[(i, j)]
    }

    pub fn as_dmatrix(&self) -> &DMatrix<C64> {
        &self.m
    }

    pub fn into_dmatrix(self) -> DMatrix<C64> {
        self.m
    }

    pub fn scale(&self) -> f64 {
        entry_scale(&self.m)
    }

    /// Principal submatrix on `idx` (rows and the matching columns).
    pub fn principal(&self, idx: &[usize]) -> Result<HermitianMatrix> {
        if idx.is_empty() {
            return Err(Error::invalid("empty index set"));
        }
        for &i in idx {
            if i >= self.dim() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: self.dim(),
                });
            }
        }
        let k = idx.len();
        Ok(HermitianMatrix {
            m: DMatrix::from_fn(k, k, |r, c| self.m[(idx[r], idx[c])]),
        })
    }

    /// Determinant; real for Hermitian input.
    pub fn det(&self) -> f64 {
        det_dense(&self.m).re
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = self.m.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| a.total_cmp(b));
        ev
    }
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_dense(a: &DMatrix<C64>) -> C64 {
    let n = a.nrows();
    let mut m = a.clone();
    let mut d = C64::new(1.0, 0.0);
    for k in 0..n {
        let mut piv = k;
        let mut best = m[(k, k)].norm();
        for r in k + 1..n {
            let v = m[(r, k)].norm();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if piv != k {
            m.swap_rows(piv, k);
            d = -d;
        }
        let p = m[(k, k)];
        d *= p;
        for r in k + 1..n {
            let f = m[(r, k)] / p;
            if f.norm() == 0.0 {
                continue;
            }
            for c in k + 1..n {
                let t = m[(k, c)];
                m[(r, c)] -= f * t;
            }
        }
    }
    d
}

pub fn det(a: &ComplexMatrix) -> C64 {
    det_dense(&a.m)
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrincipalMinor {
    /// Zero-based indices of the retained rows/columns.
    pub indices: Vec<usize>,
    pub value: f64,
}

/// Every principal minor, ordered by size and then lexicographically.
pub fn principal_minors(a: &HermitianMatrix) -> Vec<PrincipalMinor> {
    let n = a.dim();
    assert!(n <= 20, "principal minor enumeration is exponential");
    let mut out = Vec::with_capacity((1usize << n) - 1);
    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let k = idx.len();
        let sub = DMatrix::from_fn(k, k, |r, c| a.m[(idx[r], idx[c])]);
        out.push(PrincipalMinor {
            indices: idx,
            value: det_dense(&sub).re,
        });
    }
    out.sort_by(|x, y| x.indices.len().cmp(&y.indices.len()).then_with(|| x.indices.cmp(&y.indices)));
    out
}

/// Leading principal minors of sizes 1..=n.
pub fn leading_minors(a: &HermitianMatrix) -> Vec<f64> {
    (1..=a.dim())
        .map(|k| det_dense(&a.m.view((0, 0), (k, k)).into_owned()).re)
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certificate {
    NegativeEigenvalue(f64),
    NegativeMinor { indices: Vec<usize>, value: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PsdVerdict {
    pub psd: bool,
    pub min_eigenvalue: f64,
    pub scale: f64,
    /// The smallest eigenvalue lies within the psd_tol band around zero.
    pub near_boundary: bool,
    /// Empty when `psd`; otherwise the offending eigenvalue and, when the
    /// Sylvester scan found one, the most negative principal minor.
    pub certificate: Vec<Certificate>,
}

/// Positive semidefiniteness. The eigenvalue route decides; an independent
/// scan over all principal minors must agree whenever the smallest
/// eigenvalue is farther than `10 * psd_tol * scale` from zero.
pub fn is_psd(a: &HermitianMatrix, tol: &Tolerance) -> Result<PsdVerdict> {
    let scale = a.scale();
    let band = tol.psd_tol * scale;
    let lmin = a.eigenvalues()[0];
    let eig_psd = lmin >= -band;

    let mut worst: Option<PrincipalMinor> = None;
    let mut worst_rel = f64::INFINITY;
    for pm in principal_minors(a) {
        let rel = pm.value / scale.powi(pm.indices.len() as i32);
        if rel < worst_rel {
            worst_rel = rel;
            worst = Some(pm);
        }
    }
    let syl_psd = worst_rel >= -tol.psd_tol;

    if eig_psd != syl_psd && lmin.abs() > 10.0 * band {
        return Err(Error::Disagreement(format!(
            "eigenvalue route says psd={eig_psd} (lambda_min={lmin:.6e}) but Sylvester scan says psd={syl_psd} (worst scaled minor {worst_rel:.6e})"
        )));
    }

    let mut certificate = Vec::new();
    if !eig_psd {
        certificate.push(Certificate::NegativeEigenvalue(lmin));
        if !syl_psd {
            let pm = worst.expect("nonempty minors");
            certificate.push(Certificate::NegativeMinor {
                indices: pm.indices,
                value: pm.value,
            });
        }
    }
    Ok(PsdVerdict {
        psd: eig_psd,
        min_eigenvalue: lmin,
        scale,
        near_boundary: lmin.abs() <= band,
        certificate,
    })
}

/// Strict positivity: smallest eigenvalue above `psd_tol * scale`, cross
/// checked against the leading principal minors.
pub fn is_pd(a: &HermitianMatrix, tol: &Tolerance) -> Result<bool> {
    let scale = a.scale();
    let band = tol.psd_tol * scale;
    let lmin = a.eigenvalues()[0];
    let eig_pd = lmin > band;
    let lead_pd = leading_minors(a)
        .iter()
        .enumerate()
        .all(|(k, &v)| v > tol.psd_tol * scale.powi(k as i32 + 1));
    if eig_pd != lead_pd && (lmin - band).abs() > 10.0 * band {
        return Err(Error::Disagreement(format!(
            "eigenvalue route says pd={eig_pd} (lambda_min={lmin:.6e}) but leading minors say pd={lead_pd}"
        )));
    }
    Ok(eig_pd)
}

/// Spectral square root: vectors `w_i` in C^r with `<<w_i, w_j>> = A(i,j)`,
/// where r counts eigenvalues above `psd_tol * scale` (at least 1).
pub fn gram_factorize(a: &HermitianMatrix, tol: &Tolerance) -> Result<Vec<DVector<C64>>> {
    let v = is_psd(a, tol)?;
    if !v.psd {
        return Err(Error::NotPsd(v.min_eigenvalue));
    }
    let band = tol.psd_tol * v.scale;
    let eig = a.m.clone().symmetric_eigen();
    let mut keep: Vec<(f64, usize)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &l)| l > band)
        .map(|(k, &l)| (l, k))
        .collect();
    keep.sort_by(|x, y| y.0.total_cmp(&x.0));
    let r = keep.len().max(1);
    let n = a.dim();
    Ok((0..n)
        .map(|i| {
            DVector::from_fn(r, |c, _| match keep.get(c) {
                Some(&(l, k)) => eig.eigenvectors[(i, k)] * l.sqrt(),
                None => C64::new(0.0, 0.0),
            })
        })
        .collect())
}

/// `<<w, z>> = sum_k w_k conj(z_k)`: linear in the first slot.
pub fn inner(w: &DVector<C64>, z: &DVector<C64>) -> C64 {
    z.dotc(w)
}

//! Moduli coordinates of an ordered configuration: the distances from the
//! base point and the kos matrix at the base point.

use nalgebra::{DMatrix, DVector};

use crate::ball::{BallPoint, PointConfig};
use crate::error::{Error, Result};
use crate::linalg::{gram_factorize, is_pd, is_psd, HermitianMatrix, Tolerance, C64};
use crate::rkhs::{cpp_certify, delta_h, gram_of_config, kos_matrix, GramSpec};

/// Distances at or above this are treated as points at infinity.
pub const RHO_LIMIT: f64 = 1.0 - 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ModuliPoint {
    rho: DVector<f64>,
    m: HermitianMatrix,
}

fn check_unit_psd(m: &HermitianMatrix, tol: &Tolerance) -> Result<()> {
    for i in 0..m.dim() {
        if (m.get(i, i).re - 1.0).abs() > tol.eq_tol {
            return Err(Error::invalid(format!("diagonal entry {i} of M is not 1")));
        }
    }
    let v = is_psd(m, tol)?;
    if !v.psd {
        return Err(Error::NotPsd(v.min_eigenvalue));
    }
    Ok(())
}

impl ModuliPoint {
    pub fn new(rho: DVector<f64>, m: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        if rho.len() != m.dim() {
            return Err(Error::DimensionMismatch {
                expected: m.dim(),
                found: rho.len(),
            });
        }
        for (i, &r) in rho.iter().enumerate() {
            if !(r > 0.0 && r < RHO_LIMIT) {
                return Err(Error::invalid(format!("rho[{i}] = {r} is outside (0, 1)")));
            }
        }
        check_unit_psd(&m, tol)?;
        Ok(ModuliPoint { rho, m })
    }

    pub fn rho(&self) -> &DVector<f64> {
        &self.rho
    }

    pub fn m(&self) -> &HermitianMatrix {
        &self.m
    }

    /// Number of non-base points.
    pub fn n(&self) -> usize {
        self.rho.len()
    }

    /// Largest entrywise deviation from another moduli point.
    pub fn distance(&self, other: &ModuliPoint) -> f64 {
        if self.n() != other.n() {
            return f64::INFINITY;
        }
        let dr = (&self.rho - &other.rho).amax();
        let dm = (self.m.as_dmatrix() - other.m.as_dmatrix()).iter().fold(0.0_f64, |a, z| a.max(z.norm()));
        dr.max(dm)
    }
}

/// Moduli of an n-valent vertex: the kos matrix alone.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexModuli {
    m: HermitianMatrix,
}

impl VertexModuli {
    pub fn new(m: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        check_unit_psd(&m, tol)?;
        Ok(VertexModuli { m })
    }

    /// The vertex at index 0 of `x`, with rays towards the other points.
    pub fn from_config(x: &PointConfig, tol: &Tolerance) -> Result<Self> {
        Ok(VertexModuli {
            m: encode(x, tol)?.m,
        })
    }

    pub fn m(&self) -> &HermitianMatrix {
        &self.m
    }

    /// Same rays listed in reverse order.
    pub fn reversed(&self) -> VertexModuli {
        let n = self.m.dim();
        VertexModuli {
            m: HermitianMatrix::from_upper(n, |i, j| self.m.get(n - 1 - i, n - 1 - j)),
        }
    }
}

/// `rho_i = delta(x_0, x_i)`, `M = KOS(DA(X), 0)`.
pub fn encode(x: &PointConfig, tol: &Tolerance) -> Result<ModuliPoint> {
    if x.len() < 2 {
        return Err(Error::invalid("encoding needs at least two points"));
    }
    let g = gram_of_config(x);
    let rho = DVector::from_iterator(x.len() - 1, (1..x.len()).map(|i| delta_h(&g, 0, i).expect("valid indices")));
    let m = kos_matrix(&g, 0, tol)?.m;
    ModuliPoint::new(rho, m, tol)
}

/// `x_0 = 0`, `x_i = rho_i w_i` with `w` a Gram factorization of `M`, in
/// dimension `max(rank M, min_dim)`.
pub fn decode(m: &ModuliPoint, min_dim: Option<usize>, tol: &Tolerance) -> Result<PointConfig> {
    let w = gram_factorize(&m.m, tol)?;
    let r = w[0].len();
    let dim = r.max(min_dim.unwrap_or(0)).max(1);
    let mut pts = Vec::with_capacity(m.n() + 1);
    pts.push(BallPoint::origin(dim));
    for (i, wi) in w.iter().enumerate() {
        // renormalize: the factor reproduces the unit diagonal only up to rounding
        let u = wi / C64::new(wi.norm(), 0.0);
        let mut z = DVector::zeros(dim);
        z.rows_mut(0, r).copy_from(&(u * C64::new(m.rho[i], 0.0)));
        pts.push(BallPoint::new(z)?);
    }
    PointConfig::new(pts, tol)
}

/// A configuration whose Gram matrix is a rescaling of `g`; requires the
/// complete Pick property.
pub fn realize_gram(g: &GramSpec, tol: &Tolerance) -> Result<PointConfig> {
    if g.dim() < 2 {
        return Err(Error::invalid("realization needs at least two kernel functions"));
    }
    if !cpp_certify(g, tol)?.is_cpp {
        return Err(Error::NotRealizable("space lacks the complete Pick property".into()));
    }
    let rho = DVector::from_iterator(g.dim() - 1, (1..g.dim()).map(|i| delta_h(g, 0, i).expect("valid indices")));
    let m = ModuliPoint::new(rho, kos_matrix(g, 0, tol)?.m, tol)?;
    decode(&m, None, tol)
}

pub fn congruent(x: &PointConfig, y: &PointConfig, tol: &Tolerance) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: y.len(),
        });
    }
    if x.len() == 1 {
        return Ok(true);
    }
    Ok(encode(x, tol)?.distance(&encode(y, tol)?) <= tol.eq_tol)
}

/// `M(X)` positive definite.
pub fn general_position(x: &PointConfig, tol: &Tolerance) -> Result<bool> {
    is_pd(encode(x, tol)?.m(), tol)
}

pub fn vertex_congruent(v: &VertexModuli, w: &VertexModuli, tol: &Tolerance) -> Result<bool> {
    if v.m.dim() != w.m.dim() {
        return Err(Error::DimensionMismatch {
            expected: v.m.dim(),
            found: w.m.dim(),
        });
    }
    let d: DMatrix<C64> = v.m.as_dmatrix() - w.m.as_dmatrix();
    Ok(d.iter().all(|z| z.norm() <= tol.eq_tol))
}

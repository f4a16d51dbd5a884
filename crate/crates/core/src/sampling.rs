//! Seeded random generators for tests, benchmarks and the self-test.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::ball::{BallPoint, PointConfig};
use crate::linalg::{HermitianMatrix, Tolerance, C64};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_c64<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Uniform direction, radius uniform in `(0, rmax)`.
pub fn random_ball_point<R: Rng + ?Sized>(rng: &mut R, dim: usize, rmax: f64) -> BallPoint {
    let v = DVector::from_fn(dim, |_, _| gaussian_c64(rng));
    let r = rmax * rng.random::<f64>();
    BallPoint::new(&v * C64::new(r / v.norm(), 0.0)).expect("radius below one")
}

/// Random configuration of `n` points. Retries until pairwise distinct.
pub fn random_config<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, rmax: f64) -> PointConfig {
    let tol = Tolerance::default();
    loop {
        let pts = (0..n).map(|_| random_ball_point(rng, dim, rmax)).collect();
        if let Ok(x) = PointConfig::new(pts, &tol) {
            if min_separation(&x) > 1e-3 {
                return x;
            }
        }
    }
}

/// Random configuration with all coordinates real (a real-hyperbolic set).
pub fn random_real_config<R: Rng + ?Sized>(rng: &mut R, n: usize, dim: usize, rmax: f64) -> PointConfig {
    let tol = Tolerance::default();
    loop {
        let pts = (0..n)
            .map(|_| {
                let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
                let norm = v.iter().map(|t| t * t).sum::<f64>().sqrt();
                let r = rmax * rng.random::<f64>();
                BallPoint::from_real(&v.iter().map(|t| t * r / norm).collect::<Vec<_>>()).expect("inside")
            })
            .collect();
        if let Ok(x) = PointConfig::new(pts, &tol) {
            if min_separation(&x) > 1e-3 {
                return x;
            }
        }
    }
}

fn min_separation(x: &PointConfig) -> f64 {
    let d = x.distance_matrix();
    let mut m = f64::INFINITY;
    for i in 0..x.len() {
        for j in i + 1..x.len() {
            m = m.min(d[(i, j)]);
        }
    }
    m
}

/// Unitary from the QR factorization of a complex Gaussian matrix, with the
/// phases of R's diagonal absorbed.
pub fn random_unitary<R: Rng + ?Sized>(rng: &mut R, dim: usize) -> DMatrix<C64> {
    let g = DMatrix::from_fn(dim, dim, |_, _| gaussian_c64(rng));
    let qr = g.qr();
    let q = qr.q();
    let r = qr.r();
    let mut u = q.clone();
    for j in 0..dim {
        let d = r[(j, j)];
        let ph = if d.norm() > 0.0 { d / d.norm() } else { C64::new(1.0, 0.0) };
        for i in 0..dim {
            u[(i, j)] = q[(i, j)] * ph;
        }
    }
    u
}

/// Hermitian matrix with Gaussian entries.
pub fn random_hermitian<R: Rng + ?Sized>(rng: &mut R, n: usize) -> HermitianMatrix {
    let g = DMatrix::from_fn(n, n, |_, _| gaussian_c64(rng));
    HermitianMatrix::from_upper(n, |i, j| (g[(i, j)] + g[(j, i)].conj()) * 0.5)
}

/// Random PSD matrix of rank at most `rank`.
pub fn random_psd<R: Rng + ?Sized>(rng: &mut R, n: usize, rank: usize) -> HermitianMatrix {
    let b = DMatrix::from_fn(n, rank, |_, _| gaussian_c64(rng));
    let m = &b * b.adjoint();
    HermitianMatrix::from_upper(n, |i, j| m[(i, j)])
}

/// A complex number uniform in the closed disk of radius `r`.
pub fn random_in_disk<R: Rng + ?Sized>(rng: &mut R, r: f64) -> C64 {
    let rho = r * rng.random::<f64>().sqrt();
    let t = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
    C64::from_polar(rho, t)
}

//! Finite reproducing-kernel data: Gram matrices up to rescaling and the
//! functionals that survive rescaling.

use nalgebra::{DMatrix, DVector};
use std::f64::consts::PI;

use crate::ball::{szego_kernel, PointConfig};
use crate::error::{Error, Result};
use crate::linalg::{det_dense, is_pd, is_psd, leading_minors, Certificate, HermitianMatrix, PsdVerdict, Tolerance, C64};

/// Gram matrix of an irreducible space: positive definite, no zero entries,
/// positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct GramSpec {
    g: HermitianMatrix,
}

impl GramSpec {
    pub fn new(m: DMatrix<C64>, tol: &Tolerance) -> Result<Self> {
        GramSpec::from_hermitian(HermitianMatrix::new(m, tol)?, tol)
    }

    pub fn from_hermitian(g: HermitianMatrix, tol: &Tolerance) -> Result<Self> {
        let scale = g.scale();
        let n = g.dim();
        for i in 0..n {
            if g.get(i, i).re <= 0.0 {
                return Err(Error::invalid(format!("diagonal entry {i} is not positive")));
            }
            for j in 0..n {
                if g.get(i, j).norm() <= tol.eq_tol * scale {
                    return Err(Error::invalid(format!("entry ({i},{j}) vanishes; the space is reducible")));
                }
            }
        }
        if !is_pd(&g, tol)? {
            return Err(Error::invalid("Gram matrix is not positive definite"));
        }
        Ok(GramSpec { g })
    }

    pub fn dim(&self) -> usize {
        self.g.dim()
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.g.get(i, j)
    }

    pub fn matrix(&self) -> &HermitianMatrix {
        &self.g
    }

    fn check(&self, idx: &[usize]) -> Result<()> {
        for &i in idx {
            if i >= self.dim() {
                return Err(Error::IndexOutOfRange {
                    index: i,
                    size: self.dim(),
                });
            }
        }
        Ok(())
    }
}

/// `G(i,j) = k(x_i, x_j) = 1 / (1 - <<x_i, x_j>>)`. The Szego kernel is
/// strictly positive definite on distinct points, so no numerical test is
/// repeated here.
pub fn gram_of_config(x: &PointConfig) -> GramSpec {
    let p = x.points();
    let g = HermitianMatrix::from_upper(x.len(), |i, j| szego_kernel(&p[i], &p[j]).expect("one dimension"));
    GramSpec { g }
}

/// `sqrt(1 - |G(i,j)|^2 / (G(i,i) G(j,j)))`.
pub fn delta_h(g: &GramSpec, i: usize, j: usize) -> Result<f64> {
    g.check(&[i, j])?;
    if i == j {
        return Err(Error::invalid("delta_h needs two distinct indices"));
    }
    let r = g.get(i, j).norm_sqr() / (g.get(i, i).re * g.get(j, j).re);
    Ok((1.0 - r).max(0.0).sqrt())
}

/// Maps an angle into `(-pi, pi]`.
pub fn wrap_angle(t: f64) -> f64 {
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    r
}

/// `-arg(G(i,j) G(j,k) G(k,i))` on the principal branch.
pub fn alpha(g: &GramSpec, i: usize, j: usize, k: usize) -> Result<f64> {
    g.check(&[i, j, k])?;
    if i == j || j == k || i == k {
        return Err(Error::invalid("alpha needs three distinct indices"));
    }
    Ok(wrap_angle(-(g.get(i, j) * g.get(j, k) * g.get(k, i)).arg()))
}

/// `(1 - G(i,s) G(s,j) / (G(s,s) G(i,j))) / (delta_si delta_sj)`.
pub fn kos(g: &GramSpec, s: usize, i: usize, j: usize, tol: &Tolerance) -> Result<C64> {
    g.check(&[s, i, j])?;
    if s == i || s == j {
        return Err(Error::invalid("kos needs a base point distinct from the other two"));
    }
    let dsi = delta_h(g, s, i)?;
    let dsj = delta_h(g, s, j)?;
    if dsi <= tol.eq_tol {
        return Err(Error::Coincident(s, i));
    }
    if dsj <= tol.eq_tol {
        return Err(Error::Coincident(s, j));
    }
    if i == j {
        return Ok(C64::new(1.0, 0.0));
    }
    Ok(mq_entry(g, s, i, j) / (dsi * dsj))
}

fn mq_entry(g: &GramSpec, s: usize, i: usize, j: usize) -> C64 {
    C64::new(1.0, 0.0) - g.get(i, s) * g.get(s, j) / (g.get(s, s) * g.get(i, j))
}

/// The matrix of kos values at a base point, rows and columns labelled by
/// the remaining indices in increasing order.
#[derive(Debug, Clone, PartialEq)]
pub struct KosMatrix {
    pub base: usize,
    pub labels: Vec<usize>,
    pub m: HermitianMatrix,
}

fn others(n: usize, s: usize) -> Vec<usize> {
    (0..n).filter(|&i| i != s).collect()
}

pub fn kos_matrix(g: &GramSpec, s: usize, tol: &Tolerance) -> Result<KosMatrix> {
    g.check(&[s])?;
    if g.dim() < 2 {
        return Err(Error::invalid("kos matrix needs at least two points"));
    }
    let labels = others(g.dim(), s);
    let mut vals = DMatrix::zeros(labels.len(), labels.len());
    for a in 0..labels.len() {
        for b in a..labels.len() {
            vals[(a, b)] = kos(g, s, labels[a], labels[b], tol)?;
        }
    }
    Ok(KosMatrix {
        base: s,
        m: HermitianMatrix::from_upper(labels.len(), |a, b| vals[(a, b)]),
        labels,
    })
}

/// Entrywise `1 - G(i,s) G(s,j) / (G(i,j) G(s,s))`.
pub fn mq_matrix(g: &GramSpec, s: usize) -> Result<HermitianMatrix> {
    g.check(&[s])?;
    if g.dim() < 2 {
        return Err(Error::invalid("MQ matrix needs at least two points"));
    }
    let labels = others(g.dim(), s);
    Ok(HermitianMatrix::from_upper(labels.len(), |a, b| mq_entry(g, s, labels[a], labels[b])))
}

/// Representative with unit diagonal and real positive first row.
pub fn canonical_rescaling_form(g: &GramSpec) -> GramSpec {
    let n = g.dim();
    let d: Vec<C64> = (0..n)
        .map(|i| {
            let theta = if i == 0 { 0.0 } else { g.get(0, i).arg() };
            C64::from_polar(1.0 / g.get(i, i).re.sqrt(), theta)
        })
        .collect();
    let h = HermitianMatrix::from_upper(n, |a, b| {
        if a == b {
            C64::new(1.0, 0.0)
        } else if a == 0 {
            C64::new((d[0] * g.get(0, b) * d[b].conj()).norm(), 0.0)
        } else {
            d[a] * g.get(a, b) * d[b].conj()
        }
    });
    GramSpec { g: h }
}

pub fn is_rescaling_equivalent(g: &GramSpec, h: &GramSpec, tol: &Tolerance) -> bool {
    if g.dim() != h.dim() {
        return false;
    }
    let a = canonical_rescaling_form(g);
    let b = canonical_rescaling_form(h);
    (a.g.as_dmatrix() - b.g.as_dmatrix()).iter().all(|z| z.norm() <= tol.eq_tol)
}

/// Principal submatrix on `indices`.
pub fn regular_subspace(g: &GramSpec, indices: &[usize]) -> Result<GramSpec> {
    g.check(indices)?;
    let mut seen = indices.to_vec();
    seen.sort_unstable();
    seen.dedup();
    if seen.len() != indices.len() {
        return Err(Error::invalid("repeated index in subspace"));
    }
    Ok(GramSpec {
        g: g.g.principal(indices)?,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CppCertificate {
    pub is_cpp: bool,
    /// Positivity verdict of the kos matrix at every base point.
    pub per_base: Vec<PsdVerdict>,
    pub witness: Vec<Certificate>,
}

/// Complete Pick property test: the kos matrix at index 0 must be PSD. The
/// kos matrices at every other base are evaluated too and must agree.
pub fn cpp_certify(g: &GramSpec, tol: &Tolerance) -> Result<CppCertificate> {
    if g.dim() < 2 {
        return Ok(CppCertificate {
            is_cpp: true,
            per_base: Vec::new(),
            witness: Vec::new(),
        });
    }
    let per_base = (0..g.dim())
        .map(|s| is_psd(&kos_matrix(g, s, tol)?.m, tol))
        .collect::<Result<Vec<_>>>()?;
    let decisive = |v: &PsdVerdict| 10.0 * tol.psd_tol * v.scale;
    let sure_yes = per_base.iter().position(|v| v.min_eigenvalue > decisive(v));
    let sure_no = per_base.iter().position(|v| v.min_eigenvalue < -decisive(v));
    if let (Some(a), Some(b)) = (sure_yes, sure_no) {
        return Err(Error::Disagreement(format!(
            "kos matrix at base {a} is positive but at base {b} it is not"
        )));
    }
    Ok(CppCertificate {
        is_cpp: per_base[0].psd,
        witness: per_base[0].certificate.clone(),
        per_base,
    })
}

/// Cross ratio `G(k,i) G(l,j) / (G(k,j) G(l,i))`; each index appears once as
/// a row and once as a column so the value is invariant under rescaling.
pub fn cross_ratio(g: &GramSpec, i: usize, j: usize, k: usize, l: usize) -> Result<C64> {
    g.check(&[i, j, k, l])?;
    let mut v = [i, j, k, l];
    v.sort_unstable();
    if v.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::invalid("cross ratio needs four distinct indices"));
    }
    Ok(g.get(k, i) * g.get(l, j) / (g.get(k, j) * g.get(l, i)))
}

/// `(0, delta_{0,1} kos_0(j,1), ..., delta_{0,n-1} kos_0(j,n-1))`.
pub fn multiplier_slice_extremal(g: &GramSpec, j: usize, tol: &Tolerance) -> Result<DVector<C64>> {
    g.check(&[j])?;
    if j == 0 {
        return Err(Error::invalid("slice index must differ from the base point"));
    }
    if !cpp_certify(g, tol)?.is_cpp {
        return Err(Error::invalid("multiplier slice requires the complete Pick property"));
    }
    let n = g.dim();
    let mut v = DVector::zeros(n);
    for t in 1..n {
        v[t] = kos(g, 0, j, t, tol)? * delta_h(g, 0, t)?;
    }
    Ok(v)
}

/// The four-point family with `s = (1 - x) sqrt(x)`.
pub fn quiggin_gram(x: f64) -> Result<GramSpec> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::invalid(format!("x must lie in (0,1), got {x}")));
    }
    let s = (1.0 - x) * x.sqrt();
    let r = |v: f64| C64::new(v, 0.0);
    let rows = [
        [r(1.0), r(x), r(x), C64::new(x, s)],
        [r(x), r(1.0), C64::new(x, -s), r(x)],
        [r(x), C64::new(x, s), r(1.0), r(x)],
        [C64::new(x, -s), r(x), r(x), r(1.0)],
    ];
    GramSpec::new(DMatrix::from_fn(4, 4, |i, j| rows[i][j]), &Tolerance::default())
}

/// A computed quantity next to its closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Checked {
    pub computed: f64,
    pub formula: f64,
}

impl Checked {
    pub fn rel_err(&self) -> f64 {
        (self.computed - self.formula).abs() / self.formula.abs().max(1e-300)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuigginReport {
    pub x: f64,
    pub gram: GramSpec,
    /// Leading minors by size 1..=4, each against the listed product formula
    /// it matches best.
    pub leading_minors: Vec<Checked>,
    /// Which of the listed formulas (in listed order) was matched to each size.
    pub minor_formula_index: Vec<usize>,
    /// det of the 2x2 MQ matrix of each three-point subspace J_i (index i
    /// removed), at the subspace's first index.
    pub det_j: [Checked; 4],
    pub det_mq: Checked,
    pub subspace_cpp: [bool; 4],
    pub full_cpp: bool,
}

pub fn quiggin_report(x: f64, tol: &Tolerance) -> Result<QuigginReport> {
    let gram = quiggin_gram(x)?;
    let listed = [
        (1.0 + x).powi(2) * (1.0 - x).powi(4),
        (1.0 + x) * (1.0 - x).powi(2),
        (1.0 + x) * (1.0 - x),
        1.0,
    ];
    let mut leading = Vec::new();
    let mut which = Vec::new();
    for m in leading_minors(gram.matrix()) {
        let (k, f) = listed
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - m).abs().total_cmp(&(b.1 - m).abs()))
            .map(|(k, f)| (k, *f))
            .expect("four formulas");
        leading.push(Checked { computed: m, formula: f });
        which.push(k);
    }
    let q = x * x - x + 1.0;
    let j123 = x * x * (x + 1.0) * (x - 1.0).powi(2);
    let j4 = x.powi(3) * (x + 1.0) * (x - 1.0).powi(2) / q;
    let mut det_j = [Checked { computed: 0.0, formula: 0.0 }; 4];
    let mut subspace_cpp = [false; 4];
    for drop in 0..4 {
        let idx: Vec<usize> = (0..4).filter(|&i| i != drop).collect();
        let sub = regular_subspace(&gram, &idx)?;
        det_j[drop] = Checked {
            computed: mq_matrix(&sub, 0)?.det(),
            formula: if drop == 3 { j4 } else { j123 },
        };
        subspace_cpp[drop] = cpp_certify(&sub, tol)?.is_cpp;
    }
    let det_mq = Checked {
        computed: det_dense(mq_matrix(&gram, 0)?.as_dmatrix()).re,
        formula: -x.powi(3) * (x + 1.0).powi(2) * (x - 1.0).powi(4) / q,
    };
    let full_cpp = cpp_certify(&gram, tol)?.is_cpp;
    Ok(QuigginReport {
        x,
        gram,
        leading_minors: leading,
        minor_formula_index: which,
        det_j,
        det_mq,
        subspace_cpp,
        full_cpp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ball::BallPoint;
    use crate::sampling::{random_config, rng};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn cfg(rows: &[Vec<C64>]) -> PointConfig {
        PointConfig::from_coords(rows, &tol()).unwrap()
    }

    fn model_triangle() -> PointConfig {
        cfg(&[
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.3, 0.0), c(0.4, 0.0)],
        ])
    }

    #[test]
    fn gram_of_two_points() {
        let g = gram_of_config(&cfg(&[vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.5, 0.0), c(0.0, 0.0)]]));
        assert!((g.get(0, 1) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g.get(1, 1) - c(4.0 / 3.0, 0.0)).norm() < 1e-15);
        assert!((delta_h(&g, 0, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn kos_of_model_triangle() {
        let g = gram_of_config(&model_triangle());
        assert!((kos(&g, 0, 1, 2, &tol()).unwrap() - c(0.6, 0.0)).norm() < 1e-14);
        assert_eq!(kos(&g, 0, 1, 1, &tol()).unwrap(), c(1.0, 0.0));
    }

    #[test]
    fn kos_matches_normalized_inner_product_at_origin() {
        let x = cfg(&[
            vec![c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.3), c(0.4, 0.0)],
        ]);
        let g = gram_of_config(&x);
        // <<x2/|x2|, x3/|x3|>> = conj(0.3i)/0.5
        assert!((kos(&g, 0, 1, 2, &tol()).unwrap() - c(0.0, -0.6)).norm() < 1e-14);
    }

    #[test]
    fn kos_of_separated_collinear_points_is_minus_one() {
        let g = gram_of_config(&cfg(&[vec![c(0.0, 0.0)], vec![c(0.3, 0.0)], vec![c(-0.4, 0.0)]]));
        assert!((kos(&g, 0, 1, 2, &tol()).unwrap() - c(-1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn orthogonal_rays_give_identity_kos() {
        let x = cfg(&[
            vec![c(0.0, 0.0); 3],
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        ]);
        let k = kos_matrix(&gram_of_config(&x), 0, &tol()).unwrap();
        assert!((k.m.as_dmatrix() - DMatrix::<C64>::identity(3, 3)).norm() < 1e-14);
    }

    #[test]
    fn quiggin_entries_and_alpha() {
        let g = quiggin_gram(0.25).unwrap();
        assert!((g.get(0, 3) - c(0.25, 0.375)).norm() < 1e-15);
        let a = alpha(&g, 0, 1, 3).unwrap();
        // G(4,1) = x - is sits in the product, so the sign is positive
        assert!((a - 0.375_f64.atan2(0.25)).abs() < 1e-15);
        assert!((a - 0.982793723247329).abs() < 1e-12);
        assert!((alpha(&g, 0, 3, 1).unwrap() + a).abs() < 1e-15);
    }

    #[test]
    fn quiggin_report_quarter() {
        let r = quiggin_report(0.25, &tol()).unwrap();
        assert!((r.det_mq.computed + 2025.0 / 212992.0).abs() < 1e-15);
        assert!((r.det_j[0].computed - 45.0 / 1024.0).abs() < 1e-15);
        assert_eq!(r.minor_formula_index, vec![3, 2, 1, 0]);
        assert!(r.subspace_cpp.iter().all(|&b| b));
        assert!(!r.full_cpp);
        let mq = mq_matrix(&r.gram, 0).unwrap();
        assert!((mq.get(0, 0).re - 15.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn quiggin_rejects_out_of_range() {
        assert!(quiggin_gram(0.0).is_err());
        assert!(quiggin_gram(1.0).is_err());
    }

    #[test]
    fn zero_entries_are_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(GramSpec::new(m, &tol()).is_err());
    }

    #[test]
    fn canonical_form_is_idempotent_and_rescaling_blind() {
        let mut r = rng(3);
        let g = gram_of_config(&random_config(&mut r, 4, 2, 0.8));
        let c1 = canonical_rescaling_form(&g);
        let c2 = canonical_rescaling_form(&c1);
        assert!((c1.g.as_dmatrix() - c2.g.as_dmatrix()).norm() < 1e-14);
        let d = [c(2.0, 1.0), c(-0.3, 0.7), c(0.1, -5.0), c(1.5, 0.0)];
        let h = GramSpec::from_hermitian(HermitianMatrix::from_upper(4, |i, j| d[i] * g.get(i, j) * d[j].conj()), &tol()).unwrap();
        assert!(is_rescaling_equivalent(&g, &h, &tol()));
    }

    #[test]
    fn two_point_spaces_are_cpp() {
        let g = gram_of_config(&cfg(&[vec![c(0.1, 0.2)], vec![c(-0.5, 0.0)]]));
        assert!(cpp_certify(&g, &tol()).unwrap().is_cpp);
    }

    #[test]
    fn slice_point_examples() {
        let x = cfg(&[
            vec![c(0.0, 0.0); 3],
            vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)],
            vec![c(0.0, 0.0), c(0.0, 0.0), c(0.5, 0.0)],
        ]);
        let v = multiplier_slice_extremal(&gram_of_config(&x), 1, &tol()).unwrap();
        assert!((v - DVector::from_vec(vec![c(0.0, 0.0), c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0)])).norm() < 1e-14);
        let two = gram_of_config(&cfg(&[vec![c(0.0, 0.0)], vec![c(0.4, 0.0)]]));
        let v = multiplier_slice_extremal(&two, 1, &tol()).unwrap();
        assert!((v[1] - c(0.4, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn cross_ratio_of_disk_points_by_hand() {
        let pts = [c(0.0, 0.0), c(0.5, 0.0), c(-0.5, 0.0), c(0.0, 0.3)];
        let x = cfg(&pts.iter().map(|p| vec![*p]).collect::<Vec<_>>());
        let g = gram_of_config(&x);
        let k = |a: usize, b: usize| c(1.0, 0.0) / (c(1.0, 0.0) - pts[a] * pts[b].conj());
        let expected = k(2, 0) * k(3, 1) / (k(2, 1) * k(3, 0));
        assert!((cross_ratio(&g, 0, 1, 2, 3).unwrap() - expected).norm() < 1e-14);
        assert!(cross_ratio(&g, 0, 1, 2, 1).is_err());
    }

    #[test]
    fn mq_is_scaled_kos() {
        let mut r = rng(9);
        for _ in 0..20 {
            let g = gram_of_config(&random_config(&mut r, 5, 3, 0.9));
            for s in 0..5 {
                let k = kos_matrix(&g, s, &tol()).unwrap();
                let mq = mq_matrix(&g, s).unwrap();
                let d: Vec<f64> = k.labels.iter().map(|&i| delta_h(&g, s, i).unwrap()).collect();
                for a in 0..4 {
                    for b in 0..4 {
                        let lhs = mq.get(a, b);
                        let rhs = k.m.get(a, b) * d[a] * d[b];
                        assert!((lhs - rhs).norm() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn gram_row_of_origin_is_ones() {
        let x = PointConfig::new(
            vec![BallPoint::origin(2), BallPoint::from_slice(&[c(0.2, 0.1), c(0.3, -0.4)]).unwrap()],
            &tol(),
        )
        .unwrap();
        let g = gram_of_config(&x);
        assert!((g.get(0, 0) - c(1.0, 0.0)).norm() < 1e-15);
        assert!((g.get(0, 1) - c(1.0, 0.0)).norm() < 1e-15);
    }
}

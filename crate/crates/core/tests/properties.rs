use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;
use rand::Rng;

use hyperkos::assembly::{assemble_v1, assemble_v2, q1_from_triangles, q2_gate, CoherenceScheme, MatchedTriangleSet, Witness};
use hyperkos::ball::{involution, pseudo_dist, random_automorphism, szego_kernel};
use hyperkos::linalg::{gram_factorize, inner, is_psd};
use hyperkos::moduli::{congruent, decode, encode, ModuliPoint};
use hyperkos::realhyp::{
    cayley_p, dihedral_from_vertex, gva_check, vertex_from_dihedral, AngleTriple, CayleyPoint, VertexAngleMatrix,
};
use hyperkos::rkhs::{
    alpha, canonical_rescaling_form, cpp_certify, cross_ratio, delta_h, gram_of_config, kos, kos_matrix, mq_matrix,
    regular_subspace, wrap_angle, GramSpec,
};
use hyperkos::sampling::{random_ball_point, random_config, random_hermitian, random_psd, rng};
use hyperkos::triangles::{
    build_model_triangle, realizable_sdp, realizable_sprime, sdp_to_sprime, sprime_to_sdp, TriangleSDoublePrime,
    TriangleSPrime,
};
use hyperkos::{HermitianMatrix, PointConfig, Tolerance, C64};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn loose() -> Tolerance {
    Tolerance { eq_tol: 1e-8, ..tol() }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn psd_routes_and_determinant(seed in any::<u64>(), n in 1usize..=6) {
        let mut r = rng(seed);
        let m = random_hermitian(&mut r, n);
        // is_psd raises on a decisive disagreement
        let v = is_psd(&m, &tol()).unwrap();
        let prod: f64 = m.eigenvalues().iter().product();
        prop_assert!((m.det() - prod).abs() <= 1e-8 * prod.abs().max(1.0));
        prop_assert_eq!(v.psd, v.min_eigenvalue >= -tol().psd_tol * v.scale);
    }

    #[test]
    fn gram_factorization_reproduces(seed in any::<u64>(), n in 1usize..=6, rank in 1usize..=6) {
        let mut r = rng(seed);
        let m = random_psd(&mut r, n, rank.min(n));
        let w = gram_factorize(&m, &tol()).unwrap();
        let mut err = 0.0;
        for i in 0..n {
            for j in 0..n {
                err += (inner(&w[i], &w[j]) - m.get(i, j)).norm_sqr();
            }
        }
        prop_assert!(err.sqrt() <= 1e-9 * m.as_dmatrix().norm().max(1.0));
    }

    #[test]
    fn strong_triangle_inequality(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let x = random_ball_point(&mut r, dim, 0.99);
        let y = random_ball_point(&mut r, dim, 0.99);
        let z = random_ball_point(&mut r, dim, 0.99);
        let (dxy, dxz, dzy) = (pseudo_dist(&x, &y).unwrap(), pseudo_dist(&x, &z).unwrap(), pseudo_dist(&z, &y).unwrap());
        prop_assert!(dxy <= (dxz + dzy) / (1.0 + dxz * dzy) + 1e-12);
        prop_assert!((dxz - dzy).abs() / (1.0 - dxz * dzy) <= dxy + 1e-12);
    }

    #[test]
    fn kernel_identity_under_involution(seed in any::<u64>(), dim in 1usize..=4) {
        let mut r = rng(seed);
        let y = random_ball_point(&mut r, dim, 0.9);
        let z = random_ball_point(&mut r, dim, 0.9);
        let w = random_ball_point(&mut r, dim, 0.9);
        let phi = involution(&y);
        let (pz, pw) = (phi.apply(&z).unwrap(), phi.apply(&w).unwrap());
        let k = |a, b| szego_kernel(a, b).unwrap();
        let rhs = k(&y, &y) / (k(&z, &y) * k(&y, &w)) * k(&z, &w);
        let lhs = k(&pz, &pw);
        prop_assert!((lhs - rhs).norm() <= 1e-9 * rhs.norm().max(1.0));
        let back = phi.apply(&pz).unwrap();
        prop_assert!((back.coords() - z.coords()).norm() <= 1e-9);
        prop_assert!((pseudo_dist(&pz, &pw).unwrap() - pseudo_dist(&z, &w).unwrap()).abs() <= 1e-9);
    }

    #[test]
    fn invariants_survive_automorphisms(seed in any::<u64>(), dim in 2usize..=4) {
        let mut r = rng(seed);
        let x = random_config(&mut r, 4, dim, 0.85);
        let y = random_automorphism(seed ^ 0x5a5a, dim).apply_config(&x, &tol()).unwrap();
        let (g, h) = (gram_of_config(&x), gram_of_config(&y));
        for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            prop_assert!((delta_h(&g, i, j).unwrap() - delta_h(&h, i, j).unwrap()).abs() <= 1e-8);
        }
        for s in 0..4 {
            let (a, b) = (kos_matrix(&g, s, &tol()).unwrap(), kos_matrix(&h, s, &tol()).unwrap());
            prop_assert!((a.m.as_dmatrix() - b.m.as_dmatrix()).norm() <= 1e-8);
        }
        prop_assert!(wrap_angle(alpha(&g, 0, 1, 2).unwrap() - alpha(&h, 0, 1, 2).unwrap()).abs() <= 1e-8);
        prop_assert!((cross_ratio(&g, 0, 1, 2, 3).unwrap() - cross_ratio(&h, 0, 1, 2, 3).unwrap()).norm() <= 1e-8);
        prop_assert!(encode(&x, &tol()).unwrap().distance(&encode(&y, &tol()).unwrap()) <= 1e-8);
    }

    #[test]
    fn cocycle_and_kos_symmetry(seed in any::<u64>()) {
        let mut r = rng(seed);
        let g = gram_of_config(&random_config(&mut r, 4, 3, 0.95));
        let a = |i, j, k| alpha(&g, i, j, k).unwrap();
        prop_assert!(wrap_angle(a(0, 1, 2) - a(1, 2, 3) + a(2, 3, 0) - a(3, 0, 1)).abs() <= 1e-9);
        let k12 = kos(&g, 0, 1, 2, &tol()).unwrap();
        let k21 = kos(&g, 0, 2, 1, &tol()).unwrap();
        prop_assert_eq!(k12, k21.conj());
        prop_assert_eq!(kos(&g, 0, 1, 1, &tol()).unwrap(), C64::new(1.0, 0.0));
        prop_assert!(k12.norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn mq_is_diagonally_scaled_kos(seed in any::<u64>(), n in 3usize..=5) {
        let mut r = rng(seed);
        let g = gram_of_config(&random_config(&mut r, n, 3, 0.9));
        let k = kos_matrix(&g, 0, &tol()).unwrap();
        let mq = mq_matrix(&g, 0).unwrap();
        for (a, &i) in k.labels.iter().enumerate() {
            for (b, &j) in k.labels.iter().enumerate() {
                let d = delta_h(&g, 0, i).unwrap() * delta_h(&g, 0, j).unwrap();
                prop_assert!((mq.get(a, b) - k.m.get(a, b) * d).norm() <= 1e-12);
            }
        }
    }

    #[test]
    fn cpp_verdict_is_rescaling_and_order_blind(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = 4;
        let m = random_psd(&mut r, n, n);
        let d: Vec<f64> = (0..n).map(|i| m.get(i, i).re.sqrt()).collect();
        let unit = HermitianMatrix::from_upper(n, |i, j| m.get(i, j) / (d[i] * d[j]) * 0.9 + if i == j { C64::new(0.1, 0.0) } else { C64::new(0.0, 0.0) });
        let Ok(g) = GramSpec::from_hermitian(unit, &tol()) else { return Ok(()); };
        let Ok(base) = cpp_certify(&g, &tol()) else { return Ok(()); };
        let canon = cpp_certify(&canonical_rescaling_form(&g), &tol()).unwrap();
        prop_assert_eq!(base.is_cpp, canon.is_cpp);
        let perm = regular_subspace(&g, &[2, 0, 3, 1]).unwrap();
        prop_assert_eq!(base.is_cpp, cpp_certify(&perm, &tol()).unwrap().is_cpp);
    }

    #[test]
    fn triangle_data_round_trips(seed in any::<u64>(), dim in 2usize..=4) {
        let mut r = rng(seed);
        let x = random_config(&mut r, 3, dim, 0.9);
        let sdp = TriangleSDoublePrime::from_config(&x, &tol()).unwrap();
        let sp = TriangleSPrime::from_config(&x).unwrap();
        prop_assert!(realizable_sdp(&sdp, &tol()));
        prop_assert!(realizable_sprime(&sp, &loose()));
        let back = sprime_to_sdp(&sdp_to_sprime(&sdp, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!((back.kos123 - sdp.kos123).norm() <= 1e-9);
        let model = build_model_triangle(&sdp, &tol()).unwrap();
        prop_assert!(congruent(&x, &model, &loose()).unwrap());
    }

    #[test]
    fn moduli_round_trip(seed in any::<u64>(), n in 3usize..=5, dim in 2usize..=4) {
        let mut r = rng(seed);
        let x = random_config(&mut r, n, dim, 0.9);
        let m = encode(&x, &tol()).unwrap();
        let y = decode(&m, Some(dim), &tol()).unwrap();
        prop_assert!(congruent(&x, &y, &loose()).unwrap());
        let again: ModuliPoint = encode(&y, &tol()).unwrap();
        prop_assert!(again.distance(&m) <= 1e-9);
    }

    #[test]
    fn gates_agree_across_forms(seed in any::<u64>()) {
        let mut r = rng(seed);
        let x = random_config(&mut r, 4, 3, 0.85);
        let q1 = q1_from_triangles(&MatchedTriangleSet::from_config(&x, &tol()).unwrap(), &tol()).unwrap();
        prop_assert!(q1.feasible);
        let Witness::Config(w) = &q1.witness else { panic!("expected a configuration") };
        prop_assert!(congruent(&x, w, &loose()).unwrap());

        let pieces = vec![vec![1, 2, 3], vec![1, 2, 4], vec![1, 3, 4]];
        let tris: Vec<_> = pieces
            .iter()
            .map(|p| TriangleSDoublePrime::from_config(&x.reordered(&[0, p[1] - 1, p[2] - 1], &tol()).unwrap(), &tol()).unwrap())
            .collect();
        let v1 = assemble_v1(&tris, &CoherenceScheme::new(pieces).unwrap(), &tol()).unwrap();
        let facet_idx = [vec![0, 2, 3], vec![0, 1, 3], vec![0, 1, 2]];
        let facets: Vec<PointConfig> = facet_idx.iter().map(|i| x.reordered(i, &tol()).unwrap()).collect();
        let scheme = CoherenceScheme::new(facet_idx.iter().map(|i| i.iter().map(|k| k + 1).collect()).collect()).unwrap();
        let v2 = assemble_v2(&facets, &scheme, &tol()).unwrap();
        let g = gram_of_config(&x);
        let subs = [0, 1, 2].map(|k| regular_subspace(&g, &facet_idx[k]).unwrap());
        let q2 = q2_gate(&subs, None, &tol()).unwrap();
        prop_assert_eq!(q1.feasible, v1.feasible);
        prop_assert_eq!(q1.feasible, v2.feasible);
        prop_assert_eq!(q1.feasible, q2.feasible);
    }

    #[test]
    fn law_of_cosines_is_invertible(a in 0.05f64..3.09, b in 0.05f64..3.09, c in 0.05f64..3.09) {
        let va = AngleTriple::new([a, b, c]).unwrap();
        let v = gva_check(&va, &tol()).unwrap();
        prop_assume!(v.holds && v.det > 1e-6);
        let da = AngleTriple::from_cosines(dihedral_from_vertex(&va, &tol()).unwrap(), &tol()).unwrap();
        let cv = vertex_from_dihedral(&da, &tol()).unwrap();
        // twice round the duality lands on the same vertex matrix
        let m = VertexAngleMatrix::from_angles(&AngleTriple::from_cosines(cv, &tol()).unwrap());
        let orig = VertexAngleMatrix::from_angles(&va);
        for k in 0..3 {
            assert_abs_diff_eq!(m.cosines()[k], orig.cosines()[k], epsilon = 1e-9);
        }
        let cs = orig.cosines();
        prop_assert_eq!(cayley_p(CayleyPoint { x: cs[0], y: cs[1], z: cs[2] }), orig.det());
    }
}

#[test]
fn random_triples_hit_both_verdicts() {
    let mut r = rng(99);
    let (mut yes, mut no) = (0, 0);
    for _ in 0..500 {
        let g = AngleTriple::new([r.random_range(0.01..PI - 0.01), r.random_range(0.01..PI - 0.01), r.random_range(0.01..PI - 0.01)]).unwrap();
        if gva_check(&g, &tol()).unwrap().holds {
            yes += 1;
        } else {
            no += 1;
        }
    }
    assert!(yes > 50 && no > 50);
}

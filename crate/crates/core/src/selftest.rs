//! A short randomized health check over the main invariants.

use std::f64::consts::PI;

use rand::Rng;

use crate::areas::{area_ch1, fan_area, polygon_area_ch1};
use crate::assembly::{q1_from_triangles, MatchedTriangleSet, Witness};
use crate::ball::random_automorphism;
use crate::error::Result;
use crate::linalg::{is_psd, Tolerance};
use crate::moduli::{congruent, decode, encode};
use crate::realhyp::{amplitude_da, amplitude_va, dual, gda_check, gva_check, AngleTriple};
use crate::rkhs::{alpha, delta_h, gram_of_config, kos, quiggin_report};
use crate::sampling::{random_config, random_hermitian, rng};

#[derive(Debug, Clone, PartialEq)]
pub struct SelfCheck {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelftestReport {
    pub seed: u64,
    pub checks: Vec<SelfCheck>,
}

impl SelftestReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

fn check(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> SelfCheck {
    match f() {
        Ok((passed, detail)) => SelfCheck { name, passed, detail },
        Err(e) => SelfCheck {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

pub fn run_selftest(seed: u64, tol: &Tolerance) -> SelftestReport {
    let loose = Tolerance {
        eq_tol: 1e-8,
        ..*tol
    };
    let mut checks = Vec::new();

    checks.push(check("quiggin", || {
        let r = quiggin_report(0.25, tol)?;
        let worst = r.det_j.iter().chain(std::iter::once(&r.det_mq)).map(|c| c.rel_err()).fold(0.0, f64::max);
        let ok = worst < 1e-9 && r.subspace_cpp.iter().all(|&b| b) && !r.full_cpp;
        Ok((ok, format!("max relative error {worst:.3e}")))
    }));

    checks.push(check("moduli_round_trip", || {
        let mut r = rng(seed);
        let mut worst = 0.0f64;
        for k in 0..50 {
            let x = random_config(&mut r, 3 + k % 3, 2 + k % 3, 0.9);
            let m = encode(&x, tol)?;
            let y = decode(&m, None, tol)?;
            if !congruent(&x, &y, &loose)? {
                return Ok((false, format!("trial {k} not congruent")));
            }
            worst = worst.max(encode(&y, tol)?.distance(&m));
        }
        Ok((worst < 1e-9, format!("max re-encoding drift {worst:.3e}")))
    }));

    checks.push(check("invariance", || {
        let mut r = rng(seed.wrapping_add(1));
        let mut worst = 0.0f64;
        for k in 0..50u64 {
            let x = random_config(&mut r, 4, 3, 0.85);
            let y = random_automorphism(seed.wrapping_add(k), 3).apply_config(&x, tol)?;
            let (g, h) = (gram_of_config(&x), gram_of_config(&y));
            worst = worst
                .max((delta_h(&g, 0, 1)? - delta_h(&h, 0, 1)?).abs())
                .max((kos(&g, 0, 1, 2, tol)? - kos(&h, 0, 1, 2, tol)?).norm())
                .max(crate::rkhs::wrap_angle(alpha(&g, 0, 1, 2)? - alpha(&h, 0, 1, 2)?).abs());
        }
        Ok((worst < 1e-8, format!("max deviation {worst:.3e}")))
    }));

    checks.push(check("tetrahedron_gate", || {
        let mut r = rng(seed.wrapping_add(2));
        for k in 0..30 {
            let x = random_config(&mut r, 4, 3, 0.85);
            let v = q1_from_triangles(&MatchedTriangleSet::from_config(&x, tol)?, tol)?;
            let Witness::Config(w) = v.witness else {
                return Ok((false, format!("trial {k} infeasible")));
            };
            if !congruent(&x, &w, &loose)? {
                return Ok((false, format!("trial {k} witness not congruent")));
            }
        }
        Ok((true, "30 tetrahedra rebuilt".into()))
    }));

    checks.push(check("angle_criteria", || {
        let mut r = rng(seed.wrapping_add(3));
        let mut worst = 0.0f64;
        for _ in 0..500 {
            let a = [r.random_range(0.01..PI - 0.01), r.random_range(0.01..PI - 0.01), r.random_range(0.01..PI - 0.01)];
            let g = AngleTriple::new(a)?;
            if gva_check(&g, tol)?.holds != gda_check(&dual(&g), tol)?.holds {
                return Ok((false, format!("duality fails at {a:?}")));
            }
            let (v, d) = (amplitude_va(a), amplitude_da(a));
            worst = worst.max((v.polynomial - v.factorized).abs()).max((d.polynomial - d.factorized).abs());
        }
        Ok((worst < 1e-9, format!("max amplitude gap {worst:.3e}")))
    }));

    checks.push(check("areas", || {
        let mut r = rng(seed.wrapping_add(4));
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let x = random_config(&mut r, 3, 1, 0.9);
            let a = area_ch1(&x, tol)?;
            worst = worst.max(crate::rkhs::wrap_angle(a.kos_expression - a.kernel_expression).abs());
            let p = polygon_area_ch1(&x, tol)?;
            worst = worst.max((p.signed - fan_area(&x)?).abs());
        }
        Ok((worst < 1e-9, format!("max gap {worst:.3e}")))
    }));

    checks.push(check("psd_engine", || {
        let mut r = rng(seed.wrapping_add(5));
        for k in 0..200 {
            let m = random_hermitian(&mut r, 1 + k % 6);
            is_psd(&m, tol)?;
        }
        Ok((true, "200 matrices, routes agree".into()))
    }));

    SelftestReport { seed, checks }
}

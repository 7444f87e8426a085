//! Acceptance suite: one test per criterion, each printing a PASS/FAIL
//! line with its headline numbers (run with `--nocapture` to see them).

use clifford_spectra::identities::{
    self, fit_alpha_beta_gamma, solve_multiplicity, GeneratorCase, SuiteConfig,
};
use clifford_spectra::matrix::{
    sample_blocks_indexed, verify_homomorphism, EnsembleConfig,
};
use clifford_spectra::poly::{
    self, discriminant, gamma_coeff_matrix, gamma_log_discr_residual, MonicPolynomial,
};
use clifford_spectra::signature::{
    predicted_multiplicity, self_sign_sum_closed, AssociativityMode, CliffordSignature,
};
use clifford_spectra::simulate::{
    simulate_coefficient_endpoints, simulate_matrix_endpoints, simulate_matrix_from, SimConfig,
    SimProcess,
};
use clifford_spectra::spectral::{
    bott_table_verified, diagonal_stationary_charpolys, mcmc_oracle, mean_charpoly_check,
    sample_distinct_spectra, stationary_ou_charpolys, two_sample_test, BottVerifyConfig,
    MeanCharpolyMode, SpectralLaw, TwoSampleConfig,
};
use clifford_spectra::subset::SubsetId;
use clifford_spectra::CliffordMatrix;
use std::time::Instant;

fn report(id: u32, name: &str, pass: bool, details: &str, elapsed_s: f64) {
    println!(
        "ACCEPTANCE {id:2} [{name}]: {} — {details} ({elapsed_s:.1}s)",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "criterion {id} ({name}) failed: {details}");
}

#[test]
fn acceptance_01_algebra_combinatorics() {
    let t0 = Instant::now();
    let mut failures = Vec::new();

    for p in 1..=5u32 {
        let sig = CliffordSignature::standard(p).unwrap();
        let rep = sig.verify_associativity(AssociativityMode::Exhaustive).unwrap();
        if !rep.pass {
            failures.push(format!("associativity p={p}: {:?}", rep.counterexample));
        }
    }
    for p in 0..=12u32 {
        let sig = CliffordSignature::standard(p).unwrap();
        if sig.self_sign_sum() != self_sign_sum_closed(p) {
            failures.push(format!("self-sign sum p={p}"));
        }
    }
    for p in 1..=8u32 {
        let sig = CliffordSignature::standard(p).unwrap();
        let full = SubsetId::full(p);
        for c in SubsetId::all(p) {
            if c.is_empty() || c == full {
                continue;
            }
            if sig.h_value(c) != 0 {
                failures.push(format!("H({c:?}) ≠ 0 at p={p}"));
            }
        }
    }
    for p in 0..=6u32 {
        let sig = CliffordSignature::standard(p).unwrap();
        for c in SubsetId::all(p) {
            for b in c.subsets() {
                if sig.s_even_odd(b, c) != sig.s_even_odd_brute(b, c) {
                    failures.push(format!("S^e/S^o mismatch p={p} B={b:?} C={c:?}"));
                }
            }
        }
    }

    let elapsed = t0.elapsed().as_secs_f64();
    let pass = failures.is_empty() && elapsed < 10.0;
    report(
        1,
        "algebra combinatorics",
        pass,
        &format!("{} failures; budget 10s", failures.len()),
        elapsed,
    );
}

#[test]
fn acceptance_02_realization_homomorphism() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..100u64 {
        let p = (i % 5) as u32;
        let n = 1 + ((i / 5) % 3) as usize;
        let cfg = EnsembleConfig::gaussian(n, p, 1.0, 0xa0 + i);
        let a = sample_blocks_indexed(&cfg, 0).unwrap();
        let b = sample_blocks_indexed(&cfg, 1).unwrap();
        worst = worst.max(verify_homomorphism(&a, &b).unwrap());
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-10 && elapsed < 30.0;
    report(
        2,
        "φ(MN) = φ(M)φ(N)",
        pass,
        &format!("max residual {worst:.3e} ≤ 1e-10 over 100 pairs"),
        elapsed,
    );
}

#[test]
fn acceptance_03_generator_identities() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    let mut all_pass = true;
    for p in [0u32, 1, 2, 3, 4, 5] {
        let case = GeneratorCase::clifford(p).unwrap();
        let cfg = SuiteConfig { n: 2, samples: 20, seed: 0x30 + p as u64, grid: 5, tolerance: 1e-6 };
        let reports = identities::identity_suite(&case, &cfg).unwrap();
        for r in &reports {
            worst = worst.max(r.max_rel_residual);
            if !r.pass {
                all_pass = false;
                eprintln!(
                    "  identity {} {} sample {} residual {:.3e}",
                    r.case, r.identity, r.sample_index, r.max_rel_residual
                );
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = all_pass && elapsed < 120.0;
    report(
        3,
        "Γ/L closed forms",
        pass,
        &format!("max relative residual {worst:.3e} ≤ 1e-6, cases p=0..5 (+ideal)"),
        elapsed,
    );
}

#[test]
fn acceptance_04_multiplicity_equation() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();

    let expected = [(-0.5, 0.0, 1.0, 1u64), (-2.0, 1.5, 2.0, 2), (-5.0, 4.5, 4.0, 4)];
    for (p, (ea, eb, eg, root)) in expected.iter().enumerate() {
        let case = GeneratorCase::clifford(p as u32).unwrap();
        let cfg = SuiteConfig { n: 2, samples: 10, seed: 0x40 + p as u64, grid: 5, tolerance: 1e-6 };
        let fit = fit_alpha_beta_gamma(&identities::fit_samples(&case, &cfg).unwrap()).unwrap();
        let err = (fit.alpha - ea).abs().max((fit.beta - eb).abs()).max((fit.gamma - eg).abs());
        let sol = solve_multiplicity(fit.alpha, fit.beta, fit.gamma).unwrap();
        if err > 1e-5 || sol.integer_roots != vec![*root] {
            ok = false;
        }
        details.push(format!("p={p}: |Δ|={err:.1e} a={:?}", sol.integer_roots));
    }
    for p in [4u32, 5, 6] {
        let case = GeneratorCase::clifford(p).unwrap();
        let cfg = SuiteConfig { n: 1, samples: 10, seed: 0x44 + p as u64, grid: 5, tolerance: 1e-6 };
        let fit = fit_alpha_beta_gamma(&identities::fit_samples(&case, &cfg).unwrap()).unwrap();
        let sol = solve_multiplicity(fit.alpha, fit.beta, fit.gamma).unwrap();
        if sol.integer_roots != vec![8] {
            ok = false;
        }
        details.push(format!("p={p}: a={:?}", sol.integer_roots));
    }

    let elapsed = t0.elapsed().as_secs_f64();
    report(4, "fitted multiplicity equation", ok, &details.join("; "), elapsed);
}

#[test]
fn acceptance_05_multiplicity_clustering() {
    let t0 = Instant::now();
    let mut checked = 0usize;
    let mut cluster_failures = 0usize;
    let mut worst_power_residual = 0.0f64;
    for p in 1..=6u32 {
        let pred = predicted_multiplicity(p);
        let mult = pred.multiplicity as usize;
        for n in [1usize, 2] {
            let ens = EnsembleConfig::gaussian(n, p, 1.0, 0x50 + p as u64 * 10 + n as u64);
            for i in 0..200u64 {
                let m = sample_blocks_indexed(&ens, i).unwrap();
                let spectra = if pred.splits {
                    let (plus, minus) = m.ideal_factors().unwrap();
                    vec![
                        poly::symmetric_eigenvalues(&plus.realize_raw()).unwrap(),
                        poly::symmetric_eigenvalues(&minus.realize_raw()).unwrap(),
                    ]
                } else {
                    vec![poly::symmetric_eigenvalues(&m.realize_raw()).unwrap()]
                };
                for evs in spectra {
                    checked += 1;
                    let summary = poly::cluster_sorted(evs.clone(), 1e-7);
                    if summary.multiplicities().iter().any(|&c| c != mult) {
                        cluster_failures += 1;
                        continue;
                    }
                    let charpoly = MonicPolynomial::from_roots(&evs).unwrap();
                    let rp = poly::poly_root_power(&charpoly, mult as u32).unwrap();
                    let rel = rp.residual / charpoly.max_abs_coeff();
                    worst_power_residual = worst_power_residual.max(rel);
                }
            }
        }
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = cluster_failures == 0 && worst_power_residual <= 1e-8;
    report(
        5,
        "multiplicity clustering + root power",
        pass,
        &format!(
            "{checked} spectra, {cluster_failures} cluster failures, \
             worst P=Q^a residual {worst_power_residual:.3e} ≤ 1e-8"
        ),
        elapsed,
    );
}

#[test]
fn acceptance_06_discriminant_identities() {
    let t0 = Instant::now();
    use rand::Rng;
    let mut rng = clifford_spectra::rng::stream_rng(0x60, 0);
    let mut worst_det = 0.0f64;
    let mut worst_gamma = 0.0f64;
    for i in 0..100 {
        let d = 2 + i % 5; // degrees 2..6
        // Separated roots keep the discriminant well away from zero.
        let roots: Vec<f64> = (0..d)
            .map(|k| {
                -3.0 + 6.0 * (k as f64 + 0.5) / d as f64 + rng.random_range(-0.25..0.25)
            })
            .collect();
        let p = MonicPolynomial::from_roots(&roots).unwrap();
        let disc = discriminant(&p).unwrap();
        let det = gamma_coeff_matrix(&p).lu().determinant();
        worst_det = worst_det.max((det - disc).abs() / disc.abs().max(det.abs()));
        worst_gamma = worst_gamma.max(gamma_log_discr_residual(&p, 1e-5).unwrap());
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = worst_det <= 1e-8 && worst_gamma <= 1e-5;
    report(
        6,
        "det Γ = discr, Γ(P, log discr) = -P''",
        pass,
        &format!("det residual {worst_det:.3e} ≤ 1e-8, log-discr residual {worst_gamma:.3e} ≤ 1e-5"),
        elapsed,
    );
}

#[test]
fn acceptance_07_spectral_laws() {
    let t0 = Instant::now();
    let cases: [(u32, usize); 5] = [(0, 2), (1, 2), (2, 2), (0, 3), (1, 3)];
    let mut ok = true;
    let mut details = Vec::new();
    for (idx, (p, n)) in cases.iter().enumerate() {
        let pred = predicted_multiplicity(*p);
        let k = n * (1usize << p) / pred.multiplicity as usize;
        let a = pred.case.repulsion_exponent();
        let matrix = sample_distinct_spectra(*p, *n, 10_000, 0x70 + idx as u64, true).unwrap();
        let oracle =
            mcmc_oracle(&SpectralLaw::gaussian(k, a), 10_000, 0x700 + idx as u64).unwrap();
        assert!(!oracle.ess_warning, "oracle ESS {} too small", oracle.ess);
        let rep = two_sample_test(
            &matrix,
            &oracle.samples,
            &TwoSampleConfig { seed: 0x7000 + idx as u64, ..Default::default() },
        )
        .unwrap();
        if rep.combined_p <= 0.01 {
            ok = false;
        }
        details.push(format!("(a={a},k={k}): p={:.3}", rep.combined_p));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = ok && elapsed < 300.0;
    report(7, "spectral laws vs MCMC oracle", pass, &details.join(" "), elapsed);
}

#[test]
fn acceptance_08_mean_characteristic_polynomial() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();
    for n in [2usize, 3] {
        let samples = stationary_ou_charpolys(0, n, 100_000, 0x80 + n as u64).unwrap();
        let rep = mean_charpoly_check(&samples, MeanCharpolyMode::OuHermite).unwrap();
        if !rep.within_three_se {
            ok = false;
        }
        let worst = rep
            .residuals
            .iter()
            .zip(&rep.residual_standard_errors)
            .map(|(r, s)| r.abs() / s.max(1e-12))
            .fold(0.0f64, f64::max);
        details.push(format!("OU n={n}: max |r|/se {worst:.2}"));

        let diag = diagonal_stationary_charpolys(n, 100_000, 0x88 + n as u64).unwrap();
        let rep = mean_charpoly_check(&diag, MeanCharpolyMode::DiagonalPower).unwrap();
        if !rep.within_three_se {
            ok = false;
        }
        let worst = rep
            .residuals
            .iter()
            .zip(&rep.residual_standard_errors)
            .map(|(r, s)| r.abs() / s.max(1e-12))
            .fold(0.0f64, f64::max);
        details.push(format!("diag n={n}: max |r|/se {worst:.2}"));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    report(8, "mean charpoly ODE (3σ)", ok, &details.join("; "), elapsed);
}

#[test]
fn acceptance_09_simulation_consistency() {
    let t0 = Instant::now();
    let mut ok = true;
    let mut details = Vec::new();

    // Ornstein-Uhlenbeck endpoints at t = 10 against direct stationary
    // sampling.
    for p in [0u32, 1] {
        let pred = predicted_multiplicity(p);
        let mult = pred.multiplicity as usize;
        let sim = SimConfig::new(SimProcess::Ou, 0.01, 1000, 1000, 0x90 + p as u64);
        let ens = EnsembleConfig::gaussian(2, p, 1.0, 0);
        let endpoints = simulate_matrix_endpoints(&sim, &ens, 2000).unwrap();
        let simulated: Vec<Vec<f64>> = endpoints
            .iter()
            .map(|m| {
                let evs = poly::symmetric_eigenvalues(&m.realize_raw()).unwrap();
                let summary = poly::cluster_sorted(evs, 1e-6);
                assert!(summary.multiplicities().iter().all(|&c| c == mult));
                summary.distinct_values()
            })
            .collect();
        let direct = sample_distinct_spectra(p, 2, 2000, 0x900 + p as u64, false).unwrap();
        let rep = two_sample_test(
            &simulated,
            &direct,
            &TwoSampleConfig { seed: 0x9000 + p as u64, ..Default::default() },
        )
        .unwrap();
        if rep.combined_p <= 0.01 {
            ok = false;
        }
        details.push(format!("OU p={p}: p={:.3}", rep.combined_p));
    }

    // Coefficient-SDE push-forward agreement for d = 2: matrix Brownian
    // motion from diag(1, −1) mapped through the characteristic
    // polynomial, against the coefficient SDE from X² − 1.
    let paths = 2000;
    let t_final = 1.0;
    let case = GeneratorCase::real_symmetric();
    let sim = SimConfig::new(SimProcess::Bm, 1e-3, (t_final / 1e-3) as usize, usize::MAX, 0x91);
    let sig = CliffordSignature::standard(0).unwrap();
    let mut start = CliffordMatrix::zero(sig, 2);
    start.block_mut(SubsetId::EMPTY).copy_from(&nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[1.0, 0.0, 0.0, -1.0],
    ));
    let matrix_side: Vec<Vec<f64>> = (0..paths)
        .map(|i| {
            let traj = simulate_matrix_from(&sim, &start, i as u64).unwrap();
            let evs = &traj.snapshots.last().unwrap().eigenvalues;
            let charpoly = MonicPolynomial::from_roots(evs).unwrap();
            let reduced = poly::poly_root_power(&charpoly, 1).unwrap().q;
            reduced.coeffs().to_vec()
        })
        .collect();
    let p0 = MonicPolynomial::new(vec![-1.0, 0.0]).unwrap();
    let coeff_sim = SimConfig::new(SimProcess::CoeffSde, 1e-3, (t_final / 1e-3) as usize, usize::MAX, 0x92);
    let coeff_side: Vec<Vec<f64>> = simulate_coefficient_endpoints(&coeff_sim, &p0, &case, paths)
        .unwrap()
        .into_iter()
        .map(|p| p.coeffs().to_vec())
        .collect();
    let rep = two_sample_test(
        &matrix_side,
        &coeff_side,
        &TwoSampleConfig { seed: 0x9100, ..Default::default() },
    )
    .unwrap();
    if rep.combined_p <= 0.01 {
        ok = false;
    }
    details.push(format!("push-forward d=2: p={:.3}", rep.combined_p));

    let elapsed = t0.elapsed().as_secs_f64();
    let pass = ok && elapsed < 600.0;
    report(9, "simulation consistency", pass, &details.join("; "), elapsed);
}

#[test]
fn acceptance_10_bott_table() {
    let t0 = Instant::now();
    let cfg = BottVerifyConfig {
        n: 1,
        samples: 200,
        law_samples: 4000,
        seed: 0xb0,
        law_p_max: 6,
        verify_p_max: 8,
    };
    let rows = bott_table_verified(8, &cfg).unwrap();
    let reference: [(&str, u64, u64, u32, bool); 8] = [
        ("C", 2, 2, 2, false),
        ("H", 4, 4, 4, false),
        ("H⊕H", 4, 4, 4, true),
        ("H[2]", 8, 8, 4, false),
        ("C[4]", 8, 8, 2, false),
        ("R[8]", 8, 8, 1, false),
        ("R[8]⊕R[8]", 8, 8, 1, true),
        ("R[16]", 16, 16, 1, false),
    ];
    let mut ok = true;
    let mut details = Vec::new();
    for (row, (s, d, alpha, a, splits)) in rows.iter().zip(reference.iter()) {
        let structural = row.structure == *s
            && row.d == *d
            && row.alpha == *alpha
            && row.a == *a
            && row.splits == *splits;
        let verification = row.verification.as_ref().expect("rows 1..8 are verified");
        if !structural || !verification.pass {
            ok = false;
        }
        details.push(format!(
            "p={}: mult {:.0}%{}",
            row.p,
            100.0 * verification.multiplicity_fraction,
            verification
                .law_p_value
                .map(|p| format!(" law p={p:.3}"))
                .unwrap_or_default()
        ));
    }
    let elapsed = t0.elapsed().as_secs_f64();
    let pass = ok && elapsed < 600.0;
    report(10, "structure table p=1..8", pass, &details.join("; "), elapsed);
}

//! Acceptance suite: one test per criterion, each printing a pass line with
//! the measured worst case next to its pinned tolerance.

mod common;

use common::*;
use num_complex::Complex64;
use rand::Rng;
use symheun::*;

const SETS: usize = 50;

fn circular_sets(seed: u64) -> Vec<CanonicalParams> {
    let mut rng = rng(seed);
    (0..SETS)
        .map(|_| random_circular_canonical(&mut rng))
        .collect()
}

const INITS: [(Complex64, Complex64); 2] = [
    (Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)),
    (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)),
];

/// Criterion 1: dual-engine termwise equivalence through n = 200 for both
/// basis initializations, or a machine-readable erratum naming the first
/// failing offset, with the oracle engine governing.
#[test]
fn acceptance_01_dual_engine_recurrence() {
    let mut disagreements = 0usize;
    let mut erratum_example = None;
    for params in circular_sets(101) {
        for init in INITS {
            let (oracle_sol, erratum) = taylor_cross_check(&params, init, 200).unwrap();
            let paper_sol = taylor_coefficients(&params, init, 200, Engine::Paper).unwrap();
            let mut termwise_ok = true;
            for n in 0..=200 {
                let dev = (paper_sol.coeffs[n] - oracle_sol.coeffs[n]).norm();
                if dev > 1e-10 * oracle_sol.coeffs[n].norm().max(1.0) {
                    termwise_ok = false;
                }
            }
            if termwise_ok {
                continue;
            }
            disagreements += 1;
            let e = erratum.expect("termwise mismatch must be reported as an erratum");
            assert!(
                e.failing_offsets.iter().all(|k| [2usize, 4].contains(k)),
                "unexpected failing offsets {:?}",
                e.failing_offsets
            );
            assert!(e.first_n >= 2 && e.first_offset > 0);
            // the governing oracle series must re-check against its recurrence
            assert!(verify_recurrence(&oracle_sol).unwrap() < 1e-12);
            if erratum_example.is_none() {
                erratum_example = Some(e);
            }
        }
    }
    match erratum_example {
        Some(e) => println!(
            "criterion 1 PASS: {disagreements}/{} runs disagree; erratum: first failing \
             r-offset {} at n = {} (paper {}, oracle {}), offsets {:?}; oracle engine governs",
            SETS * 2,
            e.first_offset,
            e.first_n,
            e.paper_value,
            e.oracle_value,
            e.failing_offsets
        ),
        None => println!("criterion 1 PASS: both engines agree termwise to 1e-10 through n = 200"),
    }
}

/// Criterion 2: root test over n in [2000, 4000] estimates radius 1 within
/// [0.98, 1.02] for every circular-case set.
#[test]
fn acceptance_02_prop3_convergence_radius() {
    let mut worst_lo = f64::INFINITY;
    let mut worst_hi: f64 = 0.0;
    for params in circular_sets(101) {
        for init in INITS {
            let sol = taylor_coefficients(&params, init, 4000, Engine::Oracle).unwrap();
            let mut est: f64 = 0.0;
            for n in 2000..=4000 {
                let mag = sol.coeffs[n].norm();
                if mag > 0.0 {
                    est = est.max(mag.powf(1.0 / n as f64));
                }
            }
            assert!(
                (0.98..=1.02).contains(&est),
                "radius estimate {est} outside [0.98, 1.02]"
            );
            worst_lo = worst_lo.min(est);
            worst_hi = worst_hi.max(est);
        }
    }
    println!("criterion 2 PASS: root-test estimates in [{worst_lo:.5}, {worst_hi:.5}] (gate [0.98, 1.02])");
}

/// Criterion 3: tail-1e-12 series have scaled residual <= 1e-8 at 100 random
/// points with |z| <= 0.8 per parameter set.
#[test]
fn acceptance_03_series_residual() {
    let mut rng = rng(303);
    let mut worst: f64 = 0.0;
    for params in circular_sets(101) {
        let sol = taylor_to_tolerance(
            &params,
            (Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.4)),
            1e-12,
            0.8,
            1 << 14,
        )
        .unwrap();
        for _ in 0..100 {
            let r = 0.8 * rng.gen_range(0.0f64..1.0).sqrt();
            let t = rng.gen_range(0.0..std::f64::consts::TAU);
            let z = c(r * t.cos(), r * t.sin());
            let e = eval_series(&sol, z).unwrap();
            let res = residual_norm(&params, e.f, e.df, e.ddf, z).unwrap();
            assert!(res <= 1e-8, "residual {res:.3e} at z = {z}");
            worst = worst.max(res);
        }
    }
    println!("criterion 3 PASS: worst scaled residual {worst:.3e} (gate 1e-8)");
}

/// Criterion 4: series value at z = 0.5 matches adaptive integration from 0
/// to 1e-8 relative, for both basis initializations.
#[test]
fn acceptance_04_series_vs_integrator_transport() {
    let mut worst: f64 = 0.0;
    let half = Complex64::new(0.5, 0.0);
    for params in circular_sets(101) {
        for init in INITS {
            let sol = taylor_to_tolerance(&params, init, 1e-13, 0.5, 1 << 14).unwrap();
            let expect = eval_series(&sol, half).unwrap().f;
            let got = integrate_to(&params, Complex64::default(), half, init.0, init.1, 1e-11)
                .unwrap()
                .f;
            let rel = (got - expect).norm() / expect.norm().max(1e-9);
            assert!(rel <= 1e-8, "transport mismatch {rel:.3e}");
            worst = worst.max(rel);
        }
    }
    println!("criterion 4 PASS: worst series-integrator deviation {worst:.3e} (gate 1e-8)");
}

/// Criterion 5: the Laurent companion solves the original equation at
/// |z| = 2 with residual <= 1e-8; double inversion reproduces parameters to
/// 1e-13 and coefficients to 1e-12.
#[test]
fn acceptance_05_prop4_laurent() {
    let mut worst_res: f64 = 0.0;
    let mut worst_coeff: f64 = 0.0;
    for params in circular_sets(101) {
        let init = (Complex64::new(1.0, 0.0), Complex64::new(-0.2, 0.5));
        let lau = laurent_solution(&params, init, 400).unwrap();
        for k in 0..20 {
            let t = std::f64::consts::TAU * k as f64 / 20.0;
            let z = 2.0 * c(t.cos(), t.sin());
            let e = eval_series(&lau, z).unwrap();
            let res = residual_norm(&params, e.f, e.df, e.ddf, z).unwrap();
            assert!(res <= 1e-8, "laurent residual {res:.3e} at {z}");
            worst_res = worst_res.max(res);
        }

        let inv2 = invert_canonical(&invert_canonical(&params).unwrap()).unwrap();
        assert!((inv2.phi - params.phi).norm() <= 1e-13);
        assert!((inv2.lambda - params.lambda).norm() <= 1e-13 * params.lambda.norm().max(1.0));
        for j in 0..4 {
            assert!((inv2.chi[j] - params.chi[j]).norm() <= 1e-13);
        }
        let direct = taylor_coefficients(&params, init, 200, Engine::Oracle).unwrap();
        let again = taylor_coefficients(&inv2, init, 200, Engine::Oracle).unwrap();
        for n in 0..=200 {
            let dev =
                (direct.coeffs[n] - again.coeffs[n]).norm() / direct.coeffs[n].norm().max(1.0);
            assert!(dev <= 1e-12);
            worst_coeff = worst_coeff.max(dev);
        }
    }
    println!(
        "criterion 5 PASS: worst laurent residual {worst_res:.3e} (gate 1e-8), \
         double-inversion coefficient deviation {worst_coeff:.3e} (gate 1e-12)"
    );
}

/// Criterion 6: invariance under the extended group, exercised through 200
/// random generator chains of length <= 4; pulled-back solutions agree at 20
/// probes to 1e-8. The canonical identity sum q_j/z_j = (i/4) sin(2 phi) rho2
/// holds to 1e-12.
#[test]
fn acceptance_06_extended_group_invariance() {
    let mut rng = rng(606);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        let params = random_symmetric(&mut rng);
        let (chain_vec, transformed) = random_chain(&mut rng, &params, 4);
        let chain = GeneratorChain(chain_vec);
        let map = chain.compose_map();

        // probe disk clear of the singular points and of the map's pole
        let mut avoid: Vec<Complex64> = params.points.points().to_vec();
        if map.m21.norm() > 1e-12 {
            avoid.push(-map.m22 / map.m21);
        }
        let (center, radius) = safe_disk(&mut rng, &avoid, 0.3);

        let probes: Vec<Complex64> = (0..20)
            .map(|k| {
                let t = std::f64::consts::TAU * k as f64 / 20.0;
                center + 0.7 * radius * c(t.cos(), t.sin())
            })
            .collect();

        // original solution along the probe polyline
        let one = Complex64::new(1.0, 0.0);
        let mut f = one;
        let mut df = Complex64::default();
        let mut pos = center;
        let mut f_orig = Vec::with_capacity(20);
        for &p in &probes {
            let st = integrate_to(&params, pos, p, f, df, 1e-11).unwrap();
            f = st.f;
            df = st.df;
            pos = p;
            f_orig.push(f);
        }

        // transformed solution along the image polyline, seeded by invariance
        let mut f = one;
        let mut df = Complex64::default();
        let mut pos = map.apply(center);
        let mut f_hat = Vec::with_capacity(20);
        for &p in &probes {
            let target = map.apply(p);
            let st = integrate_to(&transformed, pos, target, f, df, 1e-11).unwrap();
            f = st.f;
            df = st.df;
            pos = target;
            f_hat.push(f);
        }

        for (a, b) in f_orig.iter().zip(&f_hat) {
            let dev = (a - b).norm() / a.norm().max(1.0);
            assert!(dev <= 1e-8, "chain pullback mismatch {dev:.3e}");
            worst = worst.max(dev);
        }
    }

    let mut worst_ident: f64 = 0.0;
    let mut rng2 = rng_for_identity();
    for _ in 0..200 {
        let params = random_circular_canonical(&mut rng2);
        let rho = rho_set(params.phi, &params.chi);
        let ident = Complex64::new(0.0, 0.25) * params.sin2phi() * rho.rho2;
        let dev = (params.sum_q_over_z() - ident).norm() / ident.norm().max(1.0);
        assert!(dev <= 1e-12, "canonical identity deviation {dev:.3e}");
        worst_ident = worst_ident.max(dev);
    }
    println!(
        "criterion 6 PASS: worst chain-pullback deviation {worst:.3e} (gate 1e-8), \
         worst identity deviation {worst_ident:.3e} (gate 1e-12)"
    );
}

fn rng_for_identity() -> rand_chacha::ChaCha8Rng {
    rng(616)
}

/// Criterion 7: golden-configuration orthogonality. The first two eigenvalues
/// from the secant search, seeded and confirmed by the 0.01-step grid scan,
/// are offset-stable to 1e-6 and their pairing ratio is <= 1e-6.
#[test]
fn acceptance_07_prop1_orthogonality() {
    let (params, contour) = spectral::golden_configuration();
    let endpoints = spectral::golden_endpoints(2e-4);
    let region = Region::RealInterval {
        min: -10.0,
        max: 1.0,
        step: 0.01,
    };
    let found = find_eigenvalues(&params, &contour, &endpoints, region, 2).unwrap();
    assert_eq!(found.len(), 2, "expected two eigenvalues in the region");

    // confirmed by the dense grid scan: each eigenvalue's real part sits on
    // a scan minimum
    let minima = grid_scan_minima(&params, &contour, &endpoints, -10.0, 1.0, 0.01).unwrap();
    for e in &found {
        assert!(
            minima.iter().any(|m| (m - e.lambda.re).abs() <= 0.02),
            "eigenvalue {} not confirmed by the grid scan",
            e.lambda
        );
        assert!(e.defect <= 1e-8, "defect {:.3e}", e.defect);
        let stab = spectral::eps_stability(&params, &contour, &endpoints, e.lambda).unwrap();
        assert!(stab <= 1e-6, "offset instability {stab:.3e}");
    }

    let ratio = orthogonality_ratio(
        &params,
        found[0].lambda,
        found[1].lambda,
        &contour,
        &endpoints,
        1e-9,
    )
    .unwrap();
    assert!(ratio <= 1e-6, "orthogonality ratio {ratio:.3e}");
    println!(
        "criterion 7 PASS: eigenvalues {} and {}, defects {:.1e}/{:.1e}, ratio {ratio:.3e} (gate 1e-6)",
        found[0].lambda, found[1].lambda, found[0].defect, found[1].defect
    );
}

/// Criterion 8: end-to-end pipeline. Random popular-form inputs are reduced
/// to canonical form; the reconstructed W = prefactor * F matches direct
/// integration of the popular equation at 10 mapped probes to 1e-6.
#[test]
fn acceptance_08_standard_pipeline() {
    let mut rng = rng(808);
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let std_params = random_standard(&mut rng);
        let (fp, map) = relocate_infinity(&std_params).unwrap();
        let (sym, pf) = nu_transform(&fp).unwrap();
        let (canon, chain) = canonicalize(&sym).unwrap();
        let m_c = chain.compose_map();
        let m_c_inv = m_c.inverse();

        let sol = taylor_to_tolerance(
            &canon,
            (Complex64::new(1.0, 0.0), Complex64::default()),
            1e-12,
            0.6,
            1 << 14,
        )
        .unwrap();
        let pf = pf.with_anchor(m_c_inv.apply(Complex64::default())).unwrap();

        // reconstruction H(z) = prefactor(M(z)) * F_c(m_c(M(z))) and its derivative
        let reconstruct = |z: Complex64| -> (Complex64, Complex64) {
            let w = map.apply(z);
            let u = m_c.apply(w);
            let e = eval_series(&sol, u).unwrap();
            let phi_w = pf.eval(w).unwrap();
            let dphi_w = phi_w * pf.log_derivative(w);
            let h = phi_w * e.f;
            let dh = (dphi_w * e.f + phi_w * e.df * m_c.derivative(w)) * map.derivative(z);
            (h, dh)
        };

        // probes: preimages of a short canonical-plane ray, with the ray
        // angle rotated until the z-side polyline clears the singular set
        let mut theta: f64 = 0.37;
        let z_probes: Vec<Complex64> = 'place: loop {
            let pts: Vec<Complex64> = (0..10)
                .map(|k| {
                    let r = 0.15 + 0.85 * k as f64 / 9.0;
                    let u = 0.5 * r * c(theta.cos(), theta.sin());
                    map.inverse().apply(m_c_inv.apply(u))
                })
                .collect();
            let sing = [Complex64::default(), Complex64::new(1.0, 0.0), std_params.a];
            let mut clear = true;
            for w in pts.windows(2) {
                for s in sing {
                    let seg = w[1] - w[0];
                    let t = (((s - w[0]).re * seg.re + (s - w[0]).im * seg.im) / seg.norm_sqr())
                        .clamp(0.0, 1.0);
                    if (s - (w[0] + t * seg)).norm() < 0.02 {
                        clear = false;
                    }
                }
            }
            if clear {
                break 'place pts;
            }
            theta += 0.07;
            assert!(theta < 1.0, "could not clear the probe ray");
        };

        let (h0, dh0) = reconstruct(z_probes[0]);
        let mut f = h0;
        let mut df = dh0;
        let mut pos = z_probes[0];
        for &zk in &z_probes[1..] {
            let st = integrate_to(&std_params, pos, zk, f, df, 1e-11).unwrap();
            f = st.f;
            df = st.df;
            pos = zk;
            let (hk, _) = reconstruct(zk);
            let dev = (f - hk).norm() / hk.norm().max(1e-9);
            assert!(dev <= 1e-6, "pipeline transport mismatch {dev:.3e}");
            worst = worst.max(dev);
        }
    }
    println!("criterion 8 PASS: worst pipeline transport deviation {worst:.3e} (gate 1e-6)");
}

/// Criterion 9: the weighted Wronskian of the (1,0), (0,1) basis is constant
/// to 1e-9 relative across probes sharing a branch.
#[test]
fn acceptance_09_wronskian_constancy() {
    let mut rng = rng(909);
    let mut worst: f64 = 0.0;
    for params in circular_sets(101) {
        let s1 = taylor_coefficients(&params, INITS[0], 400, Engine::Oracle).unwrap();
        let s2 = taylor_coefficients(&params, INITS[1], 400, Engine::Oracle).unwrap();
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        let dir = c(theta.cos(), theta.sin());
        let w0 = wronskian(&params, &s1, &s2, Complex64::default()).unwrap();
        for r in [0.1, 0.25, 0.4, 0.55, 0.7] {
            let w = wronskian(&params, &s1, &s2, r * dir).unwrap();
            let dev = (w - w0).norm() / w0.norm();
            assert!(dev <= 1e-9, "wronskian drift {dev:.3e}");
            worst = worst.max(dev);
        }
    }
    println!("criterion 9 PASS: worst wronskian drift {worst:.3e} (gate 1e-9)");
}

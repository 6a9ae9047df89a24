//! End-to-end acceptance checks. Each test covers one published claim or
//! system-level property and prints a single pass line; run with
//! `cargo test --test acceptance -- --nocapture` to see them.

use grasscode::basis::weyl_heisenberg_basis;
use grasscode::designer::{design, DesignConfig};
use grasscode::diametral::max_diametral_set;
use grasscode::geodesic::geodesic_structured;
use grasscode::metrics::{constellation_metrics, principal_angles};
use grasscode::sim::{
    ml_detect_fast, ml_detect_naive, run_monte_carlo, simulate_block, test_rng, ChannelConfig,
    DetectorKind,
};
use grasscode::{CMatrix64, Constellation64};
use rand::Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, SQRT_2};
use std::time::Instant;

fn report(name: &str, started: Instant) {
    println!("acceptance: {name} ... pass ({:.2} s)", started.elapsed().as_secs_f64());
}

#[test]
fn table_iii_m2_distance_sweep() {
    let start = Instant::now();
    let expected = [
        (2usize, SQRT_2 * FRAC_PI_2, SQRT_2, 1.0),
        (4, 1.3508, 1.1546, 0.4442),
        (8, 1.1107, 1.0, 0.25),
        (16, 0.9888, 0.9102, 0.1715),
    ];
    for (l, d_g, d_c, dp) in expected {
        let c = design::<f64>(&DesignConfig::new(2, l)).unwrap();
        let m = constellation_metrics(&c.points, 2).unwrap();
        assert!((m.d_g_min - d_g).abs() < 1e-3, "L={l}: d_g {}", m.d_g_min);
        assert!((m.d_c_min - d_c).abs() < 1e-3, "L={l}: d_c {}", m.d_c_min);
        assert!((m.dp_min - dp).abs() < 1e-3, "L={l}: DP {}", m.dp_min);
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "sweep too slow");
    report("table III distance sweep (M = 2, L = 2..16)", start);
}

#[test]
fn table_iv_maximal_size_designs() {
    let start = Instant::now();
    for (m, l, dp, d_c) in [(1usize, 4usize, 0.6665, 0.8164), (2, 16, 0.1715, 0.9102)] {
        let c = design::<f64>(&DesignConfig::new(m, l)).unwrap();
        let met = constellation_metrics(&c.points, 2).unwrap();
        assert!((met.dp_min - dp).abs() < 1e-3, "M={m}: DP {}", met.dp_min);
        assert!((met.d_c_min - d_c).abs() < 1e-3, "M={m}: d_c {}", met.d_c_min);
    }
    let c = design::<f64>(&DesignConfig::new(4, 64)).unwrap();
    let met = constellation_metrics(&c.points, 2).unwrap();
    assert!(met.dp_min < 1e-9, "M=4: DP {}", met.dp_min);
    assert!((met.d_c_min - 1.4142).abs() < 1e-3, "M=4: d_c {}", met.d_c_min);
    assert!(start.elapsed().as_secs_f64() < 60.0, "sweep too slow");
    report("table IV maximal-size designs (M = 1, 2, 4)", start);
}

#[test]
fn exact_search_finds_d8_for_m2() {
    let start = Instant::now();
    let (s1, d1) = max_diametral_set::<f64>(2);
    let (s2, d2) = max_diametral_set::<f64>(2);
    assert_eq!(d1, 8);
    assert_eq!((s1.nodes(), d1), (s2.nodes(), d2), "search must be deterministic");
    assert!(start.elapsed().as_secs_f64() < 1.0, "search too slow");
    report("exact diametral search: D = 8 for M = 2, deterministic", start);
}

#[test]
fn corollary_1_opposite_directions_orthogonal_at_midpoint() {
    let start = Instant::now();
    for m in [1usize, 2, 3, 4] {
        let mid = (m as f64).sqrt() * FRAC_PI_4;
        let id = CMatrix64::identity(m, m);
        for bv in weyl_heisenberg_basis::<f64>(m) {
            let plus = geodesic_structured(&id, bv.delta_tilde(), mid).unwrap();
            let minus =
                geodesic_structured(&id, &bv.delta_tilde().map(|z| -z), mid).unwrap();
            let pa = principal_angles(&plus, &minus).unwrap();
            for &a in pa.angles() {
                assert!((a - FRAC_PI_2).abs() < 1e-8, "M={m}: angle {a}");
            }
        }
    }
    report("corollary 1: +/- directions orthogonal at sqrt(M) pi/4 (M = 1..4)", start);
}

/// Independent eigen-oracle for the Theorem 2 suite: W is unitary (hence
/// normal), so the singular values of W - I are exactly |lambda - 1| and the
/// count of eigenvalues near 1 is the count of small singular values.
fn eigs_near_one(w: &CMatrix64, tol: f64) -> usize {
    let m = w.nrows();
    let shifted = w - CMatrix64::identity(m, m);
    shifted.singular_values().iter().filter(|&&s| s < tol).count()
}

#[test]
fn theorem_2_angle_zero_structure() {
    let start = Instant::now();
    for m in [2usize, 4] {
        let basis = weyl_heisenberg_basis::<f64>(m);
        let id = CMatrix64::identity(m, m);
        let t_max = (m as f64).sqrt() * FRAC_PI_2;
        let mut rng = test_rng(2024);
        for _ in 0..200 {
            let i = rng.random_range(0..basis.len());
            let j = rng.random_range(0..basis.len());
            let d1 = basis[i].delta_tilde();
            let d2 = basis[j].delta_tilde();

            // distinct instants: every principal angle is nonzero
            let t1 = rng.random_range(0.0..1.0) * t_max;
            let mut t2 = rng.random_range(0.0..1.0) * t_max;
            while (t1 - t2).abs() < 1e-3 {
                t2 = rng.random_range(0.0..1.0) * t_max;
            }
            let p1 = geodesic_structured(&id, d1, t1).unwrap();
            let p2 = geodesic_structured(&id, d2, t2).unwrap();
            for &a in principal_angles(&p1, &p2).unwrap().angles() {
                assert!(a > 1e-6, "M={m} ({i},{j}) t1={t1} t2={t2}: angle {a}");
            }

            // equal instants: zero-angle count matches the eigenvalue count
            if i == j {
                continue;
            }
            let t = rng.random_range(0.05..0.95) * t_max;
            let q1 = geodesic_structured(&id, d1, t).unwrap();
            let q2 = geodesic_structured(&id, d2, t).unwrap();
            let zero_angles = principal_angles(&q1, &q2)
                .unwrap()
                .angles()
                .iter()
                .filter(|&&a| a < 1e-6)
                .count();
            let w = (d1.adjoint() * d2).map(|z| z * m as f64);
            let unit_eigs = eigs_near_one(&w, 1e-6);
            assert_eq!(zero_angles, unit_eigs, "M={m} pair ({i},{j}) at t={t}");
        }
    }
    report("theorem 2: zero-angle structure on 200 random pairs (M = 2, 4)", start);
}

#[test]
fn midpoint_chordal_law() {
    let start = Instant::now();
    for m in 1usize..=8 {
        // full midpoint constellation: all 2M^2 signed pairs at sqrt(M) pi/4
        let mid = (m as f64).sqrt() * FRAC_PI_4;
        let id = CMatrix64::identity(m, m);
        let mut points = Vec::with_capacity(4 * m * m);
        for bv in weyl_heisenberg_basis::<f64>(m) {
            points.push(geodesic_structured(&id, bv.delta_tilde(), mid).unwrap());
            points
                .push(geodesic_structured(&id, &bv.delta_tilde().map(|z| -z), mid).unwrap());
        }
        let met = constellation_metrics(&points, 2).unwrap();
        let expected = (m as f64).sqrt() / SQRT_2;
        assert!(
            (met.d_c_min - expected).abs() < 1e-9,
            "M={m}: d_c {} vs {expected}",
            met.d_c_min
        );
    }
    assert!(start.elapsed().as_secs_f64() < 120.0, "sweep too slow");
    report("midpoint chordal law d_c = sqrt(M/2) (M = 1..8, L = 4M^2)", start);
}

#[test]
fn fast_and_naive_detectors_agree() {
    let start = Instant::now();
    for (m, n) in [(2usize, 2usize), (4, 4)] {
        let l = 4 * m * m;
        let c = design::<f64>(&DesignConfig::new(m, l)).unwrap();
        let mut rng = test_rng(7 + m as u64);
        for trial in 0..10_000 {
            let sent = rng.random_range(0..l);
            let y = simulate_block(&c.points[sent], n, 10.0, &mut rng);
            let naive = ml_detect_naive(&y, &c.points).unwrap();
            let fast = ml_detect_fast(&y, &c).unwrap();
            assert_eq!(naive, fast, "(M,N)=({m},{n}) trial {trial}");
        }
    }
    report("detector equivalence on 10^4 noisy blocks ((M,N) = (2,2), (4,4))", start);
}

/// Simulates at increasing SNR until the measured SER falls in the window,
/// then returns that point.
fn point_in_ser_window(
    c: &Constellation64,
    n: usize,
    snr_candidates: &[f64],
) -> grasscode::sim::SnrPointResult {
    for &snr in snr_candidates {
        let mut cfg = ChannelConfig::new(n, vec![snr], 5_000_000, 99);
        cfg.min_error_events = 2000;
        let r = run_monte_carlo(&cfg, c, DetectorKind::Fast).unwrap();
        let p = r.points.into_iter().next().unwrap();
        if p.ser >= 5e-3 && p.ser <= 5e-2 && p.sym_errors >= 2000 {
            return p;
        }
    }
    panic!("no SNR candidate produced a SER in [5e-3, 5e-2] with 2000 events");
}

#[test]
fn bit_labeling_ber_ser_ratios() {
    let start = Instant::now();

    let c16 = design::<f64>(&DesignConfig::new(2, 16)).unwrap();
    let p = point_in_ser_window(&c16, 2, &[6.0, 8.0, 10.0, 12.0, 14.0, 16.0]);
    let ratio = p.ber / p.ser;
    assert!(
        (0.40..=0.60).contains(&ratio),
        "(4,2,2,16): BER/SER = {ratio:.3} at {} dB ({} events)",
        p.snr_db,
        p.sym_errors
    );

    let c4 = design::<f64>(&DesignConfig::new(1, 4)).unwrap();
    let p = point_in_ser_window(&c4, 2, &[4.0, 6.0, 8.0, 10.0, 12.0, 14.0, 16.0]);
    let ratio = p.ber / p.ser;
    assert!(
        (0.57..=0.77).contains(&ratio),
        "(2,1,2,4): BER/SER = {ratio:.3} at {} dB ({} events)",
        p.snr_db,
        p.sym_errors
    );
    report("bit labeling: BER/SER ratios near 1/2 and 2/3", start);
}

#[test]
fn ser_monotone_and_noiseless_zero() {
    let start = Instant::now();
    let c = design::<f64>(&DesignConfig::new(2, 16)).unwrap();

    let cfg = ChannelConfig::new(2, vec![0.0, 4.0, 8.0, 12.0, 16.0, 20.0], 200_000, 17);
    let r = run_monte_carlo(&cfg, &c, DetectorKind::Fast).unwrap();
    for w in r.points.windows(2) {
        assert!(
            w[1].ser <= w[0].ser + w[0].ser_ci + w[1].ser_ci,
            "SER rose beyond CI overlap: {} dB {} -> {} dB {}",
            w[0].snr_db,
            w[0].ser,
            w[1].snr_db,
            w[1].ser
        );
    }

    for (m, l) in [(1usize, 4usize), (2, 16), (3, 8)] {
        let c = design::<f64>(&DesignConfig::new(m, l)).unwrap();
        let met = constellation_metrics(&c.points, 2).unwrap();
        assert!(met.dp_min > 0.0, "design (M={m}, L={l}) must have DP > 0");
        let cfg = ChannelConfig::new(2, vec![f64::INFINITY], 10_000, 3);
        let r = run_monte_carlo(&cfg, &c, DetectorKind::Fast).unwrap();
        assert_eq!(r.points[0].sym_errors, 0, "noiseless errors for (M={m}, L={l})");
        assert_eq!(r.points[0].trials, 10_000);
    }
    report("SER monotone over 0-20 dB; noiseless detection error-free", start);
}

/// Long tier: ~10^7 trials; run with `cargo test -- --ignored`.
#[test]
#[ignore]
fn ser_order_of_magnitude_at_20db() {
    let start = Instant::now();
    let c = design::<f64>(&DesignConfig::new(2, 16)).unwrap();
    let mut cfg = ChannelConfig::new(2, vec![20.0], 10_000_000, 1);
    cfg.min_error_events = u64::MAX; // run the full budget
    let r = run_monte_carlo(&cfg, &c, DetectorKind::Fast).unwrap();
    let ser = r.points[0].ser;
    assert!(
        (1e-6..=1e-4).contains(&ser),
        "(4,2,2,16) at 20 dB: SER {ser:e} outside [1e-6, 1e-4]"
    );
    report("SER order of magnitude at 20 dB (10^7 trials)", start);
}

#[test]
fn geodesics_have_unit_speed() {
    let start = Instant::now();
    let mut rng = test_rng(55);
    for k in 0..100 {
        let m = 1 + k % 4;
        // random scaled-unitary direction: Q / sqrt(M) with Q unitary
        let q = grasscode::sim::random_stiefel(m, m, &mut rng);
        let delta_tilde = q.data().map(|z| z / (m as f64).sqrt());
        let id = CMatrix64::identity(m, m);
        let base = geodesic_structured(&id, &delta_tilde, 0.0).unwrap();
        for frac in [0.2, 0.7] {
            let t = frac * (m as f64).sqrt() * FRAC_PI_2;
            let p = geodesic_structured(&id, &delta_tilde, t).unwrap();
            let d = principal_angles(&base, &p).unwrap().geodesic_distance();
            assert!((d - t).abs() < 1e-7, "M={m} t={t}: d_g = {d}");
        }
    }
    report("geodesic unit speed on 100 random structured directions", start);
}

use fsparse_core::lattice::count_exact;
use fsparse_core::theta::{asymptotic_counts, figure_curves, phi, solve_saddle, theta_h};

fn log_grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|i| (lo.ln() + (hi.ln() - lo.ln()) * i as f64 / (points - 1) as f64).exp())
        .collect()
}

#[test]
fn residual_and_curvature_over_log_grid() {
    let mut last_z = 0.0;
    for gamma in log_grid(0.1, 16.0, 40) {
        let sp = solve_saddle(gamma, 1e-10).unwrap();
        assert!(
            (phi(sp.y_gamma).unwrap() - gamma).abs() <= 1e-10,
            "gamma={gamma}"
        );
        assert!(sp.l_pp > 0.0);
        assert!(sp.z_gamma > last_z && sp.z_gamma < 1.0);
        last_z = sp.z_gamma;
    }
}

/// Grid scan of `phi(y) - 1` with step 1e-6 around the sign change, then
/// plain bisection.
fn bisection_oracle(gamma: f64) -> f64 {
    let mut y = 0.3;
    let step = 1e-6;
    while phi(y + step).unwrap() > gamma {
        y += step;
    }
    let (mut lo, mut hi) = (y, y + step);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if phi(mid).unwrap() > gamma {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (-0.5 * (lo + hi)).exp()
}

#[test]
fn unit_gamma_matches_bisection_oracle() {
    let sp = solve_saddle(1.0, 1e-13).unwrap();
    assert!((sp.z_gamma - bisection_oracle(1.0)).abs() < 1e-9);
}

#[test]
fn asymptotic_gaps_shrink_with_dimension() {
    let mut last = [f64::INFINITY; 3];
    for d_star in [25usize, 50, 100, 200] {
        let exact = count_exact(d_star, d_star).unwrap();
        let asym = asymptotic_counts(d_star, 1.0f64).unwrap();
        let gaps = [
            (exact.log_n1 - asym.log_n1_asym).abs(),
            (exact.log_n2 - asym.log_n2_asym).abs(),
            (exact.log_n_diff - asym.log_n_diff_asym).abs(),
        ];
        for (g, l) in gaps.iter().zip(&last) {
            assert!(g < l, "d*={d_star}: {gaps:?}");
        }
        last = gaps;
    }
    assert!(last[0] <= 0.1);
}

#[test]
fn count_ratio_near_theta_value() {
    let exact = count_exact(200, 200).unwrap();
    let h = solve_saddle(1.0f64, 1e-13).unwrap().h_val;
    let ratio = (exact.log_n1 - exact.log_n2).exp();
    assert!((ratio / h - 1.0).abs() < 0.05);
}

#[test]
fn asymptotic_ratio_identity() {
    for gamma in [0.3f64, 1.0, 2.5, 7.0] {
        for d_star in [1usize, 10, 300] {
            let a = asymptotic_counts(d_star, gamma).unwrap();
            let h = solve_saddle(gamma, 1e-13).unwrap().h_val;
            assert!((a.log_n1_asym - a.log_n2_asym - h.ln()).abs() < 1e-12);
        }
    }
}

#[test]
fn curves_shape() {
    let rows = figure_curves(&[0.5f64, 1.0, 2.0]).unwrap();
    assert!(rows.windows(2).all(|w| w[0].z_gamma < w[1].z_gamma));
    assert!(rows.iter().all(|r| r.z_gamma > 0.0 && r.z_gamma < 1.0));
    assert!(rows[1].l_value >= 3f64.ln() - 0.2);
    assert!(figure_curves(&[1.0f64, 0.5]).is_err());
    assert!(figure_curves(&[0.0f64, 0.5]).is_err());
}

#[test]
fn theta_truncation_doubling() {
    // doubling the kept terms changes the value by under 10 tol
    for z in [0.1f64, 0.5, 0.9, 0.99] {
        let tol = 1e-12;
        let coarse = theta_h(z, tol).unwrap();
        let fine = theta_h(z, tol * tol).unwrap();
        assert!((coarse - fine).abs() < 10.0 * tol * fine, "z={z}");
    }
}

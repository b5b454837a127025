use sgpoly::scalar::rational;
use sgpoly::spectrum::{Branch, Decimation, Level1Spectrum, branch_limit, level1_eigenvalues, quoted_sqrt_pair};
use sgpoly::{Float, LaplacianParams, Scalar};

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

fn fparams(r: f64) -> LaplacianParams<Float> {
    LaplacianParams::derive(Float::from_f64(r, 256)).unwrap()
}

#[test]
fn level1_matrix_matches_closed_forms_on_grid() {
    for r in log_grid(0.05, 20.0, 100) {
        let ev = level1_eigenvalues(&LaplacianParams::derive(Float::from_f64(r, 128)).unwrap());
        let dev = Level1Spectrum::closed_form(r).match_computed(&ev).expect("multiplicities");
        assert!(dev < 1e-12, "r={r}: {dev}");
    }
}

#[test]
fn quoted_sqrt_pair_is_not_in_the_spectrum() {
    for r in [0.3, 1.0, 4.0] {
        let ev = level1_eigenvalues(&LaplacianParams::derive(Float::from_f64(r, 128)).unwrap());
        let (lo, hi) = quoted_sqrt_pair(r);
        for q in [lo, hi] {
            assert!(ev.iter().all(|e| (e - q).abs() > 1e-3), "r={r}: {q} found");
        }
    }
}

#[test]
fn corrected_sqrt_pair_maps_to_nine() {
    // one level down from the level-0 eigenvalue 9
    let d = Decimation::new(fparams(0.5));
    for b in [Branch::SqrtMinus, Branch::SqrtPlus] {
        let v = d.forward(&b.seed(&d.params.r)).to_f64();
        assert!((v - 9.0).abs() < 1e-50, "{b:?}: {v}");
    }
}

#[test]
fn slope_at_zero_is_inverse_renormalization() {
    for (p, q) in [(1, 10), (1, 2), (1, 1), (3, 1), (10, 1)] {
        let params = LaplacianParams::derive(Float::from_rational(&rational(p, q), 256)).unwrap();
        let d = Decimation::new(params.clone());
        let h = Float::from_f64(1e-20, 256);
        let inv_l = params.l.one_like() / &params.l;
        let fwd = d.forward(&h) / &h;
        let back = h.clone() / d.down(&h).unwrap();
        for slope in [fwd, back] {
            assert!(((slope - &inv_l) / &inv_l).abs().to_f64() < 1e-10);
        }
    }
}

#[test]
fn pole_is_removable_at_special_r() {
    let sqrt17 = Float::from_i64(17, 256).sqrt();
    let special = (sqrt17 - Float::from_i64(3, 256)) / Float::from_i64(4, 256);
    for r in [Float::from_i64(1, 256), special] {
        let d = Decimation::new(LaplacianParams::derive(r).unwrap());
        assert!(d.numerator_at(&d.pole).abs().to_f64() < 1e-10);
    }
    let d = Decimation::new(fparams(0.5));
    assert!(d.numerator_at(&d.pole).abs().to_f64() > 1e-3);
}

#[test]
fn trajectories_contract_at_rate_l() {
    let d = Decimation::new(fparams(2.0));
    let l = d.params.l.to_f64();
    for b in Branch::ALL {
        let t = branch_limit(&d, b).unwrap();
        assert!(t.converged && t.iterations() <= 60);
        let n = t.lambdas.len();
        let rate = t.lambdas[n - 1].to_f64() / t.lambdas[n - 2].to_f64();
        assert!((rate / l - 1.0).abs() < 1e-6, "{b:?}: {rate} vs {l}");
        for w in t.lambdas.windows(2) {
            assert!(w[1] < w[0]);
        }
    }
}

#[test]
fn limits_follow_seed_order_away_from_crossing() {
    for r in [0.1, 0.5, 3.0, 10.0] {
        let d = Decimation::new(fparams(r));
        let mut pairs: Vec<(f64, f64)> =
            Branch::ALL.iter().map(|&b| (b.seed_f64(r), branch_limit(&d, b).unwrap().limit.to_f64())).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert!(pairs.windows(2).all(|w| w[0].1 < w[1].1), "r={r}: {pairs:?}");
    }
}

#[test]
fn standard_gasket_branch_limits_are_stable_across_tolerances() {
    let d = Decimation::new(fparams(1.0));
    let seed = Branch::SqrtMinus.seed(&d.params.r);
    let a = d.neumann_eigenvalue(&seed, 1e-12, 200).unwrap().limit.to_f64();
    let b = d.neumann_eigenvalue(&seed, 1e-20, 200).unwrap().limit.to_f64();
    assert!((a - b).abs() / b < 1e-11);
    assert!((b - 27.1144254).abs() < 1e-6);
}

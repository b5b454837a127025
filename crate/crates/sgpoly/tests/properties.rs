use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use sgpoly::laplacian::energy_level1;
use sgpoly::mesh::{Geometry, Symmetry, tilde_laplacian};
use sgpoly::scalar::rational;
use sgpoly::{LaplacianParams, Scalar, harmonic_extension};

fn positive_r() -> impl Strategy<Value = BigRational> {
    (1i64..=10_000, 1i64..=100)
        .prop_filter("r <= 100", |(p, q)| *p <= 100 * q)
        .prop_map(|(p, q)| BigRational::new(BigInt::from(p), BigInt::from(q)))
}

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-50i64..=50, 1i64..=20).prop_map(|(p, q)| rational(p, q))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn params_invariants(r in positive_r()) {
        let p = LaplacianParams::derive(r.clone()).unwrap();
        let zero = rational(0, 1);
        let one = rational(1, 1);
        prop_assert_eq!(rational(3, 1) * &p.mu0 + rational(6, 1) * &p.mu1, one.clone());
        prop_assert_eq!(&p.r0, &(r.clone() * &p.r1));
        prop_assert_eq!(p.r0.clone() * &p.mu0, p.r1.clone() * &p.mu1);
        prop_assert_eq!(&p.l, &(p.r0.clone() * &p.mu0));
        prop_assert_eq!(&p.lam_sym, &p.r0);
        prop_assert!(zero < p.lam_skew && p.lam_skew < p.lam_sym && p.lam_sym < one);
        prop_assert!(zero < p.l && p.l < one);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn extension_is_discretely_harmonic(r in positive_r(), h in prop::array::uniform3(small_rational())) {
        let p = LaplacianParams::derive(r).unwrap();
        let mesh = harmonic_extension(&p, h.clone()).into_mesh(p.clone());
        let g = Geometry::level1();
        for v in 0..g.vertices.len() {
            if !g.vertices[v].is_boundary() {
                prop_assert!(tilde_laplacian(&mesh, v).unwrap().is_zero());
            }
        }
        for s in 0..3u8 {
            prop_assert_eq!(&mesh.values[g.boundary_vertex(s)].clone().unwrap(), &h[s as usize]);
        }
    }

    #[test]
    fn extension_minimizes_energy(r in positive_r(), h in prop::array::uniform3(small_rational())) {
        let p = LaplacianParams::derive(r).unwrap();
        let u = harmonic_extension(&p, h);
        let e0 = energy_level1(&p, &u);
        let g = Geometry::level1();
        let eps = rational(1, 1000);
        for v in (0..g.vertices.len()).filter(|&v| !g.vertices[v].is_boundary()) {
            for sign in [1, -1] {
                let mut w = u.clone();
                w.values[v] = w.values[v].clone() + eps.clone() * rational(sign, 1);
                prop_assert!(energy_level1(&p, &w) > e0);
            }
        }
    }

    #[test]
    fn extension_commutes_with_rotation(r in positive_r(), h in prop::array::uniform3(small_rational())) {
        let p = LaplacianParams::derive(r).unwrap();
        let [h0, h1, h2] = h.clone();
        let u = harmonic_extension(&p, h);
        prop_assert_eq!(harmonic_extension(&p, [h1.clone(), h2.clone(), h0.clone()]), u.compose(Symmetry::Rho));
        prop_assert_eq!(harmonic_extension(&p, [h2, h0, h1]), u.compose(Symmetry::RhoInv));
    }

    #[test]
    fn constants_extend_to_constants(r in positive_r(), c in small_rational()) {
        let p = LaplacianParams::derive(r).unwrap();
        let u = harmonic_extension(&p, [c.clone(), c.clone(), c.clone()]);
        prop_assert!(u.values.iter().all(|v| *v == c));
    }
}

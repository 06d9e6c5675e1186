use band_vortex::hermitian2::*;
use band_vortex::vorticity::{
    intertwining_residual, kato_nagy_unitary, kato_nagy_unitary_series, VorticityError,
};
use band_vortex::{Hermitian2, Projector};
use nalgebra::Matrix2 as NaMatrix2;
use num_complex::Complex;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn hermitian() -> impl Strategy<Value = Hermitian2> {
    (-5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0, -5.0f64..5.0)
        .prop_map(|(a, d, re, im)| HermitianMatrix2::new(a, d, Complex::new(re, im)))
}

fn bloch() -> impl Strategy<Value = [f64; 3]> {
    (-1.0f64..1.0, 0.0f64..std::f64::consts::TAU).prop_map(|(z, phi)| {
        let rho = (1.0 - z * z).sqrt();
        [rho * phi.cos(), rho * phi.sin(), z]
    })
}

fn to_nalgebra(h: &Hermitian2) -> NaMatrix2<Complex<f64>> {
    NaMatrix2::new(h.entry(0, 0), h.entry(0, 1), h.entry(1, 0), h.entry(1, 1))
}

proptest! {
    #[test]
    fn eigenvalues_match_nalgebra(h in hermitian()) {
        let e = eig2(&h);
        let oracle = to_nalgebra(&h).symmetric_eigen();
        let mut ev = [oracle.eigenvalues[0], oracle.eigenvalues[1]];
        ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let scale = 1.0 + h.max_abs();
        prop_assert!((e.e_minus - ev[0]).abs() < 1e-12 * scale);
        prop_assert!((e.e_plus - ev[1]).abs() < 1e-12 * scale);
        prop_assert!(e.e_minus <= e.e_plus);
    }

    #[test]
    fn eigenvectors_solve_the_eigenproblem(h in hermitian()) {
        let e = eig2(&h);
        prop_assume!(!e.degenerate);
        for (val, v) in [(e.e_minus, e.v_minus), (e.e_plus, e.v_plus)] {
            let hv = h.apply(v.components());
            let c = v.components();
            let r = (hv[0] - c[0] * val).norm().max((hv[1] - c[1] * val).norm());
            prop_assert!(r < 1e-12 * (1.0 + h.max_abs()));
            prop_assert!((v.norm() - 1.0).abs() < 1e-14);
        }
        prop_assert!(e.v_minus.inner(&e.v_plus).norm() < 1e-12);
    }

    #[test]
    fn eigenvector_phase_convention(h in hermitian()) {
        let e = eig2(&h);
        for v in [e.v_minus, e.v_plus] {
            let [a, b] = v.components();
            let big = if a.norm() >= b.norm() { a } else { b };
            prop_assert!(big.im.abs() < 1e-14 && big.re > 0.0);
        }
    }

    #[test]
    fn projectors_are_idempotent_and_complementary(n in bloch()) {
        let p = Projector::from_bloch_vector(n);
        let m = p.matrix().to_matrix();
        prop_assert!(m.mul(&m).sub(&m).max_abs() < 1e-14);
        prop_assert!((p.matrix().trace() - 1.0).abs() < 1e-14);
        let sum = *p.matrix() + *p.complement().matrix();
        prop_assert!((sum - HermitianMatrix2::identity()).max_abs() < 1e-14);
        let v = p.range_vector();
        let back = projector_of(&v).unwrap();
        prop_assert!(op_norm_diff(&p, &back) < 1e-13);
    }

    #[test]
    fn projector_distance_is_half_chord(a in bloch(), b in bloch()) {
        // ‖P − Q‖ = |n_a − n_b| / 2 for rank-one projectors
        let chord = ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt();
        let d = op_norm_diff(&Projector::from_bloch_vector(a), &Projector::from_bloch_vector(b));
        prop_assert!((d - 0.5 * chord).abs() < 1e-13);
    }

    #[test]
    fn su2_rotation_is_unitary(angle in -3.0f64..3.0, n in bloch()) {
        let u = Matrix2::su2_rotation(angle, n);
        prop_assert!(u.unitarity_defect() < 1e-14);
        prop_assert!((u.det() - Complex::new(1.0, 0.0)).norm() < 1e-14);
    }
}

#[test]
fn kato_nagy_intertwines_random_pairs() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut done = 0;
    while done < 100 {
        let draw = |rng: &mut ChaCha8Rng| {
            let z: f64 = rng.gen_range(-1.0..=1.0);
            let phi: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            let rho = (1.0 - z * z).sqrt();
            Projector::from_bloch_vector([rho * phi.cos(), rho * phi.sin(), z])
        };
        let p = draw(&mut rng);
        let q = draw(&mut rng);
        if op_norm_diff(&p, &q) > 0.95 {
            continue;
        }
        let w = kato_nagy_unitary(&p, &q).unwrap();
        assert!(w.unitarity_defect() < 1e-12);
        assert!(intertwining_residual(&w, &p, &q) < 1e-9);
        if op_norm_diff(&p, &q) < 0.7 {
            let s = kato_nagy_unitary_series(&p, &q, 1e-15, 400).unwrap();
            assert!(w.sub(&s).max_abs() < 1e-10);
        }
        done += 1;
    }
}

#[test]
fn kato_nagy_rejects_orthogonal_projectors() {
    let p = Projector::from_bloch_vector([0.0, 0.0, 1.0]);
    let q = p.complement();
    assert!(matches!(
        kato_nagy_unitary(&p, &q),
        Err(VorticityError::DeformationTooFar { .. })
    ));
}

#[test]
fn f32_eigen_agrees_with_f64() {
    let h32 = HermitianMatrix2::new(0.3f32, -1.1, Complex::new(0.7, -0.2));
    let h64 = HermitianMatrix2::new(0.3f64, -1.1, Complex::new(0.7, -0.2));
    let (a, b) = (eig2(&h32), eig2(&h64));
    assert!((a.e_plus as f64 - b.e_plus).abs() < 1e-6);
    assert!((a.e_minus as f64 - b.e_minus).abs() < 1e-6);
}

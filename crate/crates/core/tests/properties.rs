use decolab::bottcher::{green_k, green_m, inverse_phi_c, phi_c, phi_m};
use decolab::model::PointCloud;
use decolab::solvers::{solve_misiurewicz, solve_superattracting_center, MisiurewiczSpec};
use decolab::verify::{align_similarity, hausdorff};
use decolab::{iterate, Complex64, HpComplex, IterateOptions};
use proptest::prelude::*;

fn hp(re: f64, im: f64) -> HpComplex {
    HpComplex::from_f64(re, im, 256)
}

fn with_derivs() -> IterateOptions {
    IterateOptions {
        with_derivatives: true,
        ..Default::default()
    }
}

#[test]
fn derivatives_match_central_differences() {
    let (c, z0) = (hp(-0.12, 0.74), hp(0.1, -0.05));
    let n = 12;
    let h = HpComplex::from_f64(1e-30, 0.0, 256);
    let orbit = iterate(&c, &z0, n, with_derivs()).unwrap();
    let st = orbit.last();
    let zn = |c: &HpComplex, z: &HpComplex| iterate(c, z, n, IterateOptions::default()).unwrap().last().z.clone();

    let two_h = h.scale(2.0);
    let fd_c = &(&zn(&(&c + &h), &z0) - &zn(&(&c - &h), &z0)) / &two_h;
    let fd_z = &(&zn(&c, &(&z0 + &h)) - &zn(&c, &(&z0 - &h))) / &two_h;
    let dc = st.dz_dc.as_ref().unwrap();
    let dz = st.dz_dz0.as_ref().unwrap();
    assert!((&fd_c - dc).abs_f64() / dc.abs_f64() < 1e-20);
    assert!((&fd_z - dz).abs_f64() / dz.abs_f64() < 1e-20);
}

#[test]
fn solvers_are_idempotent() {
    let s = solve_superattracting_center(5, &hp(0.36, 0.64), 1e-40).unwrap();
    let again = solve_superattracting_center(5, &s, 1e-40).unwrap();
    assert!((&again - &s).abs_f64() < 1e-60);

    let spec = MisiurewiczSpec::new(4, 1).unwrap();
    let m = solve_misiurewicz(spec, &hp(-0.1, 0.95), 1e-40).unwrap();
    let again = solve_misiurewicz(spec, &m, 1e-40).unwrap();
    assert!((&again - &m).abs_f64() < 1e-60);
}

#[test]
fn bottcher_is_tangent_to_identity_and_matches_green() {
    let c = Complex64::new(-0.12, 0.74);
    let z = Complex64::new(1e5, 3e4);
    assert!((phi_c(c, z, 200).unwrap() / z - 1.0).norm() < 1e-4);
    for c in [Complex64::new(0.5, 0.5), Complex64::new(-2.5, 0.1), Complex64::new(0.3, -1.2)] {
        assert!((phi_m(c, 200).unwrap().norm().ln() - green_m(c, 200)).abs() < 1e-12);
    }
    let g = green_k(c, Complex64::new(0.0, 0.0), 200);
    assert!(!g.valid && g.green == 0.0, "0 never escapes near the rabbit");
}

#[test]
fn inverse_bottcher_round_trip_in_the_dynamical_plane() {
    let c = Complex64::new(-0.12, 0.74);
    for w in [Complex64::new(1.5, 0.2), Complex64::new(-3.0, 4.0), Complex64::new(0.0, 1.1)] {
        let z = inverse_phi_c(c, w, None, 1e-15).unwrap();
        assert!((phi_c(c, z, 400).unwrap() - w).norm() < 1e-10);
    }
}

fn cloud(pts: &[(f64, f64)]) -> PointCloud {
    PointCloud::from_points("p", pts.iter().map(|&(x, y)| Complex64::new(x, y)), None)
}

fn pts() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hausdorff_is_a_metric(a in pts(), b in pts(), c in pts()) {
        let (a, b, c) = (cloud(&a), cloud(&b), cloud(&c));
        let ab = hausdorff(&a, &b);
        prop_assert_eq!(ab, hausdorff(&b, &a));
        prop_assert_eq!(hausdorff(&a, &a), 0.0);
        prop_assert!(ab <= hausdorff(&a, &c) + hausdorff(&c, &b) + 1e-12);
    }

    #[test]
    fn hausdorff_is_similarity_covariant(a in pts(), b in pts(), r in 0.1..5.0f64, t in 0.0..6.28f64) {
        let k = Complex64::from_polar(r, t);
        let shift = Complex64::new(3.0, -1.0);
        let d = hausdorff(&cloud(&a), &cloud(&b));
        let dm = hausdorff(&cloud(&a).map_affine(k, shift), &cloud(&b).map_affine(k, shift));
        prop_assert!((dm - r * d).abs() <= 1e-9 * (1.0 + r * d));
    }

    #[test]
    fn alignment_recovers_similarities(r in 0.2..5.0f64, t in -3.0..3.0f64, bx in -5.0..5.0f64, by in -5.0..5.0f64) {
        // an asymmetric comb, so the best map is unique
        let model: Vec<Complex64> = (0..60)
            .map(|k| {
                let s = k as f64 / 59.0;
                Complex64::new(s * 2.0, 0.3 * (7.0 * s).sin() + s * s)
            })
            .collect();
        let model = PointCloud::from_points("m", model, None);
        let a = Complex64::from_polar(r, t);
        let b = Complex64::new(bx, by);
        let target = model.map_affine(a, b);
        let fit = align_similarity(&model, &target, 30).unwrap();
        prop_assert!(fit.residual < 1e-6, "residual {}", fit.residual);
        prop_assert!((fit.a - a).norm() < 1e-6 * r);
    }

    #[test]
    fn complex_text_round_trip(re in -1e3..1e3f64, im in -1e3..1e3f64) {
        let z = HpComplex::from_f64(re, im, 256);
        let back = HpComplex::parse(&z.to_string_digits(z.full_digits()), 256).unwrap();
        prop_assert_eq!(back.to_c64(), z.to_c64());
        prop_assert!((&back - &z).abs_f64() <= 1e-70 * (1.0 + z.abs_f64()));
    }

    #[test]
    fn bottcher_conjugates_squaring(r in 1.5..20.0f64, t in 0.0..6.28f64, cr in -1.5..0.4f64, ci in -1.0..1.0f64) {
        let c = Complex64::new(cr, ci);
        let z = Complex64::from_polar(r * c.norm().max(1.0), t);
        if let (Ok(a), Ok(b)) = (phi_c(c, z, 200), phi_c(c, z * z + c, 200)) {
            prop_assert!((b - a * a).norm() <= 1e-9 * (a * a).norm());
        }
    }
}

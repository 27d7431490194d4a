use proptest::prelude::*;

use scri_charges::bondi::{random_data, BondiData};
use scri_charges::charges::{angular_momentum, center_of_mass, FRAME_TOLERANCE};
use scri_charges::io::{from_json, to_json};
use scri_charges::sphere::{Calculus, CovectorField, HarmonicCoeffs, ScalarField, SphereGrid};
use scri_charges::tensor::TracelessTensor;

fn coeffs(l: usize, values: &[f64]) -> ScalarField {
    let n = (l + 1) * (l + 1);
    ScalarField::new(HarmonicCoeffs::from_vec(l, values[..n].to_vec()).unwrap())
}

fn field_strategy(l: usize) -> impl Strategy<Value = ScalarField> {
    prop::collection::vec(-1.0f64..1.0, (l + 1) * (l + 1)).prop_map(move |v| coeffs(l, &v))
}

/// `f(θ, φ) -> f(θ, φ - α)`.
fn rotate_z(f: &ScalarField, alpha: f64) -> ScalarField {
    let c = f.coeffs();
    let mut out = c.clone();
    for l in 0..=c.band_limit() {
        for m in 1..=l as i64 {
            let (a, b) = (c.get(l, m), c.get(l, -m));
            let (s, co) = (m as f64 * alpha).sin_cos();
            out.set(l, m, a * co - b * s);
            out.set(l, -m, a * s + b * co);
        }
    }
    ScalarField::new(out)
}

fn rotate_data(d: &BondiData, alpha: f64) -> BondiData {
    let n = d.angmom_aspect();
    BondiData::new(
        rotate_z(d.mass_aspect(), alpha),
        CovectorField::new(rotate_z(n.grad_potential(), alpha), rotate_z(n.curl_potential(), alpha)),
        TracelessTensor::new(
            rotate_z(d.shear().electric(), alpha),
            rotate_z(d.shear().magnetic(), alpha),
        ),
        d.u(),
    )
    .unwrap()
}

fn close(a: &[f64; 3], b: &[f64; 3], tol: f64) -> bool {
    (0..3).all(|k| (a[k] - b[k]).abs() <= tol * (1.0 + b[k].abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn parseval(f in field_strategy(7)) {
        let g = SphereGrid::new(7);
        let v = f.values(&g).unwrap();
        let sq: Vec<f64> = v.iter().map(|x| x * x).collect();
        let lhs = g.integrate_values(&sq).unwrap();
        let rhs = f.coeffs().dot(f.coeffs());
        prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
    }

    #[test]
    fn synthesis_round_trip(f in field_strategy(9)) {
        let g = SphereGrid::new(9);
        let back = g.analyze(&f.values(&g).unwrap()).unwrap();
        prop_assert!(back.lin_comb(1.0, f.coeffs(), -1.0).max_abs() <= 1e-13);
    }

    #[test]
    fn laplacian_is_self_adjoint(f in field_strategy(6), h in field_strategy(6)) {
        let g = SphereGrid::new(6);
        let pair = |a: &ScalarField, b: &ScalarField| {
            let p: Vec<f64> = a.values(&g).unwrap().iter().zip(b.values(&g).unwrap()).map(|(x, y)| x * y).collect();
            g.integrate_values(&p).unwrap()
        };
        let l = pair(&f, &h.laplacian());
        let r = pair(&h, &f.laplacian());
        prop_assert!((l - r).abs() <= 1e-11 * (1.0 + l.abs()));
    }

    #[test]
    fn gradient_is_adjoint_to_divergence(f in field_strategy(6)) {
        let g = SphereGrid::new(6);
        let calc = Calculus::new(&g);
        let gf = calc.gradient(&f).unwrap();
        let lhs = calc.integrate(&gf.dot(&gf));
        let rhs = -f.inner(&f.laplacian());
        prop_assert!((lhs - rhs).abs() <= 1e-11 * (1.0 + rhs.abs()));
    }

    #[test]
    fn divergence_and_curl_read_off_potentials(g in field_strategy(6), h in field_strategy(6)) {
        let grid = SphereGrid::new(6);
        let calc = Calculus::new(&grid);
        let v = CovectorField::new(g.clone(), h.clone());
        let dv = calc.nabla(&calc.covector(&v).unwrap()).unwrap();
        let div = dv.trace(0, 1);
        let curl = dv.contract(&[0, 1], calc.epsilon(), &[1, 0]);
        let want_div = g.laplacian().values(&grid).unwrap();
        let want_curl = h.laplacian().values(&grid).unwrap();
        prop_assert_eq!(v.divergence(), g.laplacian());
        prop_assert_eq!(v.curl(), h.laplacian());
        for i in 0..grid.len() {
            prop_assert!((div.values()[i] - want_div[i]).abs() <= 1e-11);
            prop_assert!((curl.values()[i] - want_curl[i]).abs() <= 1e-11);
        }
    }

    #[test]
    fn shear_map_annihilates_low_degrees(a in prop::array::uniform4(-1.0f64..1.0), b in prop::array::uniform4(-1.0f64..1.0)) {
        let l = 6;
        let g = SphereGrid::new(l);
        let calc = Calculus::new(&g);
        let low = |v: [f64; 4]| {
            let mut c = HarmonicCoeffs::zeros(l);
            c.as_mut_slice()[..4].copy_from_slice(&v);
            ScalarField::new(c)
        };
        prop_assert!(calc.electric(&low(a)).unwrap().max_abs() <= 1e-13);
        prop_assert!(calc.magnetic(&low(b)).unwrap().max_abs() <= 1e-13);
        prop_assert!(TracelessTensor::new(low(a), low(b)).is_zero());
    }

    #[test]
    fn data_file_round_trip(seed in any::<u64>(), l in 2usize..10, com in any::<bool>()) {
        let d = random_data(seed, l, 0.5, com).with_u(seed as f64 * 1e-3).unwrap();
        prop_assert_eq!(from_json(&to_json(&d), true).unwrap(), d);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn charges_rotate_with_the_data(seed in any::<u64>(), alpha in -3.0f64..3.0) {
        let l = 8;
        let g = SphereGrid::new(l);
        let d = random_data(seed, l, 0.3, true);
        let r = rotate_data(&d, alpha);
        let rot = |v: [f64; 3]| {
            let (s, c) = alpha.sin_cos();
            [c * v[0] - s * v[1], s * v[0] + c * v[1], v[2]]
        };
        let c = center_of_mass(&d, &g, FRAME_TOLERANCE).unwrap();
        let cr = center_of_mass(&r, &g, FRAME_TOLERANCE).unwrap();
        prop_assert!(close(&cr, &rot(c), 1e-11), "{:?} {:?}", cr, rot(c));
        let j = angular_momentum(&d, &g, FRAME_TOLERANCE).unwrap();
        let jr = angular_momentum(&r, &g, FRAME_TOLERANCE).unwrap();
        prop_assert!(close(&jr, &rot(j), 1e-11), "{:?} {:?}", jr, rot(j));
    }

    #[test]
    fn reflection_equivariance(seed in any::<u64>()) {
        let l = 8;
        let g = SphereGrid::new(l);
        let d = random_data(seed, l, 0.3, true);
        let r = d.reflected();
        let c = center_of_mass(&d, &g, FRAME_TOLERANCE).unwrap();
        let cr = center_of_mass(&r, &g, FRAME_TOLERANCE).unwrap();
        prop_assert!(close(&cr, &[c[0], c[1], -c[2]], 1e-11));
        // angular momentum is a pseudovector
        let j = angular_momentum(&d, &g, FRAME_TOLERANCE).unwrap();
        let jr = angular_momentum(&r, &g, FRAME_TOLERANCE).unwrap();
        prop_assert!(close(&jr, &[-j[0], -j[1], j[2]], 1e-11), "{:?} {:?}", jr, j);
    }

    #[test]
    fn charges_ignore_the_cut_parameter(seed in any::<u64>(), u in -10.0f64..10.0) {
        let l = 6;
        let g = SphereGrid::new(l);
        let d = random_data(seed, l, 0.3, true);
        let du = d.with_u(u).unwrap();
        prop_assert_eq!(center_of_mass(&d, &g, FRAME_TOLERANCE).unwrap(), center_of_mass(&du, &g, FRAME_TOLERANCE).unwrap());
        prop_assert_eq!(angular_momentum(&d, &g, FRAME_TOLERANCE).unwrap(), angular_momentum(&du, &g, FRAME_TOLERANCE).unwrap());
    }
}

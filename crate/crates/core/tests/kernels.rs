use gyroproxy::grid::{make_case, random_state, DistributionState, GridShape, Seed};
use gyroproxy::kernels::reference::{
    collision_reference, field_reference, max_relative_diff, nonlinear_reference, shear_reference,
    stream_reference,
};
use gyroproxy::kernels::timing::{checksum_values, run_kernel, KernelInputs};
use gyroproxy::kernels::{
    collision_kernel, field_kernel, nonlinear_kernel, nonlinear_plans, shear_kernel, stream_kernel,
    time_kernel, CollisionMatrix, FieldMoment, KernelId, KernelVariant, Stencil,
};
use gyroproxy::spectral::Spectrum2D;
use gyroproxy::verify::normwise_error;
use gyroproxy::{Complex64, Error};

fn desk() -> GridShape {
    make_case("sh03b-desk").unwrap()
}

fn combine(a: f64, x: &DistributionState, b: f64, y: &DistributionState) -> DistributionState {
    let v = x.values().iter().zip(y.values()).map(|(p, q)| p * a + q * b).collect();
    DistributionState::from_vec(x.shape(), v).unwrap()
}

fn combine_values(a: f64, x: &[Complex64], b: f64, y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(p, q)| p * a + q * b).collect()
}

#[test]
fn field_of_ones_counts_velocity_points() {
    let s = GridShape::new(4, 3, 2, 3, 2, 3).unwrap();
    let h = DistributionState::from_vec(s, vec![Complex64::new(1.0, 0.0); s.len()]).unwrap();
    let w = vec![1.0; s.n_velocity()];
    for v in KernelVariant::ALL {
        let out = field_kernel(&h, &w, v).unwrap();
        assert!(out.values().iter().all(|z| *z == Complex64::new(18.0, 0.0)));
    }
    assert!(matches!(field_kernel(&h, &w[1..], KernelVariant::Original), Err(Error::Size(_))));
}

#[test]
fn field_matches_oracle_on_desk() {
    let inp = KernelInputs::generate(desk(), Seed(7)).unwrap();
    let oracle = field_reference(&inp.h, &inp.weights);
    for v in KernelVariant::ALL {
        let out = field_kernel(&inp.h, &inp.weights, v).unwrap();
        assert!(normwise_error(out.values(), oracle.values()) <= 1e-13);
    }
}

#[test]
fn stream_identity_and_constant() {
    let s = desk();
    let h = random_state(s, Seed(1)).unwrap();
    let id = Stencil::new(vec![1.0]).unwrap();
    let diff = Stencil::new(vec![-0.5, 0.0, 0.5]).unwrap();
    let c = DistributionState::from_vec(s, vec![Complex64::new(0.3, -0.7); s.len()]).unwrap();
    for v in KernelVariant::ALL {
        assert_eq!(stream_kernel(&h, &id, v).unwrap(), h);
        assert!(stream_kernel(&c, &diff, v).unwrap().values().iter().all(|z| z.norm() == 0.0));
    }
    assert!(Stencil::new(vec![1.0, 2.0]).is_err());
}

#[test]
fn stream_variants_and_oracle() {
    for seed in 0..5 {
        let inp = KernelInputs::generate(desk(), Seed(seed)).unwrap();
        let a = stream_kernel(&inp.h, &inp.stencil, KernelVariant::Original).unwrap();
        let b = stream_kernel(&inp.h, &inp.stencil, KernelVariant::Optimized).unwrap();
        assert!(max_relative_diff(b.values(), a.values(), f64::MIN_POSITIVE) <= 1e-13);
        let o = stream_reference(&inp.h, &inp.stencil);
        assert!(normwise_error(b.values(), o.values()) <= 1e-13);
    }
}

#[test]
fn shear_identity_full_shift_and_oracle() {
    let s = desk();
    let h = random_state(s, Seed(2)).unwrap();
    let zero = vec![0; s.n_toroidal()];
    let full = vec![s.n_radial() as i64; s.n_toroidal()];
    for v in KernelVariant::ALL {
        assert_eq!(shear_kernel(&h, &zero, v).unwrap(), h);
        assert!(shear_kernel(&h, &full, v).unwrap().values().iter().all(|z| z.norm() == 0.0));
    }
    for seed in 0..5 {
        let inp = KernelInputs::generate(s, Seed(seed)).unwrap();
        let o = shear_reference(&inp.h, &inp.shifts);
        for v in KernelVariant::ALL {
            assert_eq!(shear_kernel(&inp.h, &inp.shifts, v).unwrap(), o);
        }
    }
    let too_far = vec![s.n_radial() as i64 + 1; s.n_toroidal()];
    assert!(shear_kernel(&h, &too_far, KernelVariant::Optimized).is_err());
}

#[test]
fn collision_identity_zero_and_oracle() {
    let s = desk();
    let inp = KernelInputs::generate(s, Seed(4)).unwrap();
    let m = s.n_velocity();
    for v in KernelVariant::ALL {
        let id = CollisionMatrix::identity(m, s.n_theta());
        assert_eq!(collision_kernel(&inp.h, &id, v).unwrap(), inp.h);
        let z = CollisionMatrix::zeros(m, s.n_theta());
        assert!(collision_kernel(&inp.h, &z, v).unwrap().values().iter().all(|c| c.norm() == 0.0));
        let out = collision_kernel(&inp.h, &inp.matrices, v).unwrap();
        let o = collision_reference(&inp.h, &inp.matrices);
        assert!(normwise_error(out.values(), o.values()) <= 1e-12);
    }
    assert!(CollisionMatrix::new(2, 1, vec![1.0, f64::NAN, 0.0, 1.0]).is_err());
}

#[test]
fn linear_kernels_are_linear() {
    let s = GridShape::new(12, 4, 6, 3, 2, 2).unwrap();
    let inp = KernelInputs::generate(s, Seed(10)).unwrap();
    let h2 = random_state(s, Seed(11)).unwrap();
    let (a, b) = (0.6, -1.7);
    let mix = combine(a, &inp.h, b, &h2);
    for v in KernelVariant::ALL {
        let check = |f: &dyn Fn(&DistributionState) -> Vec<Complex64>| {
            let lhs = f(&mix);
            let rhs = combine_values(a, &f(&inp.h), b, &f(&h2));
            assert!(normwise_error(&lhs, &rhs) <= 1e-12);
        };
        check(&|h| field_kernel(h, &inp.weights, v).unwrap().values().to_vec());
        check(&|h| stream_kernel(h, &inp.stencil, v).unwrap().into_values());
        check(&|h| shear_kernel(h, &inp.shifts, v).unwrap().into_values());
        check(&|h| collision_kernel(h, &inp.matrices, v).unwrap().into_values());
    }
}

#[test]
fn nonlinear_zero_field_and_self_bracket() {
    let s = GridShape::new(16, 8, 2, 2, 1, 2).unwrap();
    let h = random_state(s, Seed(3)).unwrap();
    let (px, py) = nonlinear_plans(&s, KernelVariant::Optimized).unwrap();
    let out = nonlinear_kernel(&h, &FieldMoment::zeros(&s), &px, &py).unwrap();
    assert!(out.values().iter().all(|z| z.norm() == 0.0));

    // Every slice equal to the field plane at its theta.
    let inp = KernelInputs::generate(s, Seed(3)).unwrap();
    let plane = s.plane_len();
    let mut same = DistributionState::zeros(s).unwrap();
    for (i, chunk) in same.values_mut().chunks_exact_mut(plane).enumerate() {
        chunk.copy_from_slice(inp.phi.plane(i % s.n_theta()));
    }
    let out = nonlinear_kernel(&same, &inp.phi, &px, &py).unwrap();
    assert!(out.values().iter().all(|z| z.norm() < 1e-12));
}

#[test]
fn nonlinear_matches_mode_sum_oracle() {
    let s = GridShape::new(16, 8, 2, 2, 1, 2).unwrap();
    for seed in 0..3 {
        let inp = KernelInputs::generate(s, Seed(seed)).unwrap();
        let o = nonlinear_reference(&inp.h, &inp.phi);
        for v in KernelVariant::ALL {
            let (px, py) = nonlinear_plans(&s, v).unwrap();
            let out = nonlinear_kernel(&inp.h, &inp.phi, &px, &py).unwrap();
            assert!(normwise_error(out.values(), o.values()) <= 1e-12);
        }
    }
}

#[test]
fn nonlinear_output_is_hermitian() {
    let s = GridShape::new(16, 8, 2, 1, 1, 2).unwrap();
    let inp = KernelInputs::generate(s, Seed(8)).unwrap();
    let (px, py) = nonlinear_plans(&s, KernelVariant::Optimized).unwrap();
    let out = nonlinear_kernel(&inp.h, &inp.phi, &px, &py).unwrap();
    for chunk in out.values().chunks_exact(s.plane_len()) {
        let spec = Spectrum2D::from_vec(16, 8, chunk.to_vec()).unwrap();
        assert!(spec.is_hermitian(1e-12));
    }
}

#[test]
fn nonlinear_variant_plans_differ_on_production_shapes() {
    let sh = make_case("sh03b").unwrap();
    let (ox, oy) = nonlinear_plans(&sh, KernelVariant::Original).unwrap();
    let (px, py) = nonlinear_plans(&sh, KernelVariant::Optimized).unwrap();
    assert_eq!((ox.n_padded(), oy.n_padded()), (720, 144));
    assert_eq!((px.n_padded(), py.n_padded()), (720, 144));
    let s = GridShape::new(477, 4, 1, 1, 1, 1).unwrap();
    let (ox, _) = nonlinear_plans(&s, KernelVariant::Original).unwrap();
    let (px, _) = nonlinear_plans(&s, KernelVariant::Optimized).unwrap();
    assert_eq!((ox.n_padded(), ox.largest_factor()), (716, 179));
    assert_eq!(px.n_padded(), 720);
}

#[test]
fn outputs_stay_finite() {
    let inp = KernelInputs::generate(make_case("em04b-desk").unwrap(), Seed(5)).unwrap();
    for k in KernelId::ALL {
        for v in KernelVariant::ALL {
            let out = run_kernel(k, v, &inp).unwrap();
            assert!(out.iter().all(|z| z.re.is_finite() && z.im.is_finite()), "{k} {v}");
        }
    }
}

#[test]
fn timing_checksums_are_deterministic() {
    let s = GridShape::new(16, 8, 5, 2, 2, 1).unwrap();
    for k in KernelId::ALL {
        let a = time_kernel(k, KernelVariant::Original, s, 3, Seed(7)).unwrap();
        let b = time_kernel(k, KernelVariant::Original, s, 3, Seed(7)).unwrap();
        assert_eq!(a.checksum, b.checksum);
        assert!(a.median_s >= a.min_s);
    }
    let a = time_kernel(KernelId::Shear, KernelVariant::Original, s, 3, Seed(7)).unwrap();
    let b = time_kernel(KernelId::Shear, KernelVariant::Optimized, s, 3, Seed(7)).unwrap();
    assert_eq!(a.checksum, b.checksum);
    let inp = KernelInputs::generate(s, Seed(7)).unwrap();
    let out = run_kernel(KernelId::Shear, KernelVariant::Optimized, &inp).unwrap();
    assert_eq!(checksum_values(&out), a.checksum);
}

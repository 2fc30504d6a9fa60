//! The numerical core is generic over the scalar; drive one pipeline through
//! both `f32` and `f64` from a single generic function.

use num_complex::Complex;
use strutt::boundaries::{antiperiodic_2x2_roots, CoeffEngine};
use strutt::kernels::{MemoryKernel, Mode};
use strutt::monodromy::{embed, monodromy, IntegrationOptions};
use strutt::scalar::Real;

fn tongue_point_and_radius<T: Real>() -> (T, T) {
    let theta = T::of(2.0);
    let period = T::of(2.0) * T::PI() / theta;
    let kernel = MemoryKernel::expsum(period, vec![(T::of(1.0), T::of(1.0))]).unwrap();
    let engine = CoeffEngine::auto(&kernel);
    let block = engine
        .block(Mode::Antiperiodic, 1, theta, Complex::new(T::zero(), T::zero()))
        .unwrap();
    let tongue = antiperiodic_2x2_roots(&block, T::of(1.0), T::of(1e-6)).unwrap();
    let a1 = tongue
        .roots
        .iter()
        .copied()
        .find(|r| *r > T::zero())
        .expect("positive tongue root");

    let sys = embed(&kernel, T::of(1.0), a1, theta).unwrap();
    let opts = IntegrationOptions {
        steps: 512,
        refine_tol: None,
    };
    let result = monodromy(&sys, &opts).unwrap();
    (a1, result.spectral_radius)
}

#[test]
fn pipeline_agrees_between_f32_and_f64() {
    let (a1_64, rho_64) = tongue_point_and_radius::<f64>();
    let (a1_32, rho_32) = tongue_point_and_radius::<f32>();
    assert!((a1_64 * a1_64 - 2.0).abs() < 1e-10);
    assert!((f64::from(a1_32) - a1_64).abs() < 1e-5);
    assert!((f64::from(rho_32) - rho_64).abs() < 1e-3);
}

//! Consistency between the normalized Hill truncations and the unnormalized
//! solvability matrices used by the boundary solvers: each row of the
//! unnormalized matrix is `-(gamma + i h_n)^2` times the Hill row, so the
//! determinants differ by the product of those prefactors.

use num_complex::Complex64;
use strutt::boundaries::{truncation_matrix, CoeffEngine};
use strutt::hill::{build_antiperiodic, build_periodic, det_complex, HillParams};
use strutt::kernels::{MemoryKernel, Mode};
use strutt::quadrature::HarmonicWindow;

#[test]
fn unnormalized_determinant_is_prefactor_times_hill_determinant() {
    let theta = 1.3;
    let kernel =
        MemoryKernel::expsum(2.0 * std::f64::consts::PI / theta, vec![(0.7, 1.2), (-0.2, 2.0)])
            .unwrap();
    let engine = CoeffEngine::auto(&kernel);
    let (a0, a1) = (0.6, 0.35);

    for (mode, hw) in [
        (Mode::Periodic, 1usize),
        (Mode::Periodic, 2),
        (Mode::Antiperiodic, 1),
        (Mode::Antiperiodic, 2),
    ] {
        for gamma in [
            Complex64::new(0.0, 0.41),
            Complex64::new(-0.3, 0.0),
            Complex64::new(-0.2, 0.17),
        ] {
            let block = engine.block(mode, hw, theta, gamma).unwrap();
            let params = HillParams {
                a0,
                a1,
                theta,
                gamma,
            };
            let window = match mode {
                Mode::Periodic => HarmonicWindow::periodic(hw),
                Mode::Antiperiodic => HarmonicWindow::antiperiodic(hw),
            };
            let hill = match mode {
                Mode::Periodic => build_periodic(params, window, &block).unwrap(),
                Mode::Antiperiodic => build_antiperiodic(params, window, &block).unwrap(),
            };
            let mut prefactor = Complex64::new(1.0, 0.0);
            for n in window.indices() {
                let h = mode.harmonic(n, theta);
                let shift = Complex64::new(gamma.re, gamma.im + h);
                prefactor *= -(shift * shift);
            }
            let lhs = truncation_matrix(&block, a0, a1).det();
            let rhs = prefactor * det_complex(&hill);
            assert!(
                (lhs - rhs).norm() <= 1e-10 * rhs.norm().max(1.0),
                "{mode} hw={hw} gamma={gamma}: {lhs} vs {rhs}"
            );
        }
    }
}

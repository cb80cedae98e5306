//! Matrix-function state preparation with postselection, matrix powers with
//! their norm side channel, and inner products against power states. This is
//! the simulator's rendering of the phase-estimate / controlled-rotate /
//! uncompute pipeline: eigenvalues are rounded onto an explicit t-bit grid
//! and the resulting two-branch state is written out exactly.

use crate::error::{Error, Result};
use crate::linalg::{cr, ComplexMatrix, Vector, C64};
use crate::qsim::estimate::{swap_test_inner_with_delta, SWAP_TEST_DELTA};
use crate::qsim::sim::Sim;
use crate::qsim::state::{PostselectedState, QState, Register};
use crate::qsim::unitary::{phase_bits, round_eigenvalue};

/// Tolerance on Assumption 2's upper edge: singular values may not exceed 1.
const SIGMA_MAX_TOL: f64 = 1e-9;

fn charge_hhl_queries(sim: &mut Sim, eps_phase: f64, success: f64) {
    sim.counters.state_preps += 1;
    if let Some(t) = phase_bits(eps_phase) {
        // forward and inverse phase estimation
        sim.counters.controlled_u += 2 * ((1u64 << t.min(30)) - 1);
    }
    let attempts = if success > 0.0 {
        (1.0 / success).ceil()
    } else {
        f64::INFINITY
    };
    sim.counters.postselections += attempts as u64; // saturates at u64::MAX
}

/// Prepare sum_j beta_j |u_j> ( f(lambda~_j) C |0> + sqrt(1 - f^2 C^2) |1> )
/// for Hermitian `a` with eigenvalues rounded sign-preservingly onto the
/// `eps_phase` grid (`eps_phase <= 0` keeps them exact).
///
/// `c_constant = None` picks C = 1 / max_j |f(lambda~_j)|. The flag register
/// is named "flag" with good value 0; the state's layout is [sys, flag].
pub fn matrix_function_state(
    a: &ComplexMatrix,
    y: &Vector,
    f: impl Fn(f64) -> f64,
    eps_phase: f64,
    c_constant: Option<f64>,
    sim: &mut Sim,
) -> Result<PostselectedState> {
    let sd = a.spectral_decompose()?;
    if y.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            left: a.rows(),
            right: y.dim(),
        });
    }
    if !y.is_unit(1e-9) {
        return Err(Error::NotNormalized { norm: y.norm() });
    }
    let sigma_max = sd.spectral_radius();
    if sigma_max > 1.0 + SIGMA_MAX_TOL {
        return Err(Error::AssumptionViolated(format!(
            "largest singular value {sigma_max:.6} exceeds 1; rescale the operator"
        )));
    }

    let betas = sd.expand(y)?;
    let rounded: Vec<f64> = sd
        .eigenvalues()
        .iter()
        .map(|&l| round_eigenvalue(l, eps_phase))
        .collect();
    let fvals: Vec<f64> = rounded.iter().map(|&l| f(l)).collect();
    let fmax = fvals.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let c_rot = match c_constant {
        Some(c) => c,
        None => {
            if fmax < 1e-300 {
                return Err(Error::AssumptionViolated(
                    "f vanishes on the whole rounded spectrum; nothing to postselect".into(),
                ));
            }
            1.0 / fmax
        }
    };
    let worst = fmax * c_rot;
    if worst > 1.0 + 1e-12 {
        return Err(Error::BadConstant { value: worst });
    }

    let mut assumption3_warning = false;
    let n = sd.dim();
    let mut good_coeffs = Vec::with_capacity(n);
    let mut bad_coeffs = Vec::with_capacity(n);
    let mut success = 0.0;
    for j in 0..n {
        let fc = fvals[j] * c_rot;
        if fvals[j].abs() < 1e-14 && betas[j].norm() > 1e-10 {
            assumption3_warning = true;
        }
        let g = betas[j] * cr(fc);
        success += g.norm_sqr();
        good_coeffs.push(g);
        bad_coeffs.push(betas[j] * cr((1.0 - fc * fc).max(0.0).sqrt()));
    }
    let good = sd.synthesize(&good_coeffs);
    let bad = sd.synthesize(&bad_coeffs);

    let mut amps = Vec::with_capacity(2 * n);
    for i in 0..n {
        amps.push(good.get(i));
        amps.push(bad.get(i));
    }
    let state = QState::new(
        amps,
        vec![Register::new("sys", n), Register::new("flag", 2)],
    )?;
    charge_hhl_queries(sim, eps_phase, success);
    Ok(PostselectedState {
        state,
        flag_register: "flag".into(),
        good_value: 0,
        success_probability: success,
        assumption3_warning,
    })
}

/// f(x) = x^l with C = 1. Returns the state together with the norm estimate
/// Z~ = sum |lambda~^l beta|^2; the unnormalized flagged component obeys
/// ||A^l y - sqrt(Z~) psi~|| <= l * eps_phase.
pub fn matrix_power_state(
    a: &ComplexMatrix,
    y: &Vector,
    l: u32,
    eps_phase: f64,
    sim: &mut Sim,
) -> Result<(PostselectedState, f64)> {
    let ps = matrix_function_state(a, y, |x| x.powi(l as i32), eps_phase, Some(1.0), sim)?;
    let z_tilde = ps.success_probability;
    Ok((ps, z_tilde))
}

/// Pad a plain vector with |0> on a flag register so it can be swap-tested
/// against a postselected state of layout [sys, flag].
pub fn pad_with_flag(x: &Vector) -> Result<QState> {
    let n = x.dim();
    let mut amps = Vec::with_capacity(2 * n);
    for i in 0..n {
        amps.push(x.get(i));
        amps.push(C64::ZERO);
    }
    QState::new(
        amps,
        vec![Register::new("sys", n), Register::new("flag", 2)],
    )
}

/// Estimate <x|A^l|y> by the swap test of |x, 0> against the unmeasured
/// power state. The phase grid is set to eps / (2l) and the swap test gets
/// the other half of the budget, so |estimate - <x|A^l y>| <= eps (with the
/// swap test's default confidence).
pub fn inner_product_via_power(
    x: &Vector,
    a: &ComplexMatrix,
    l: u32,
    y: &Vector,
    eps: f64,
    sim: &mut Sim,
) -> Result<C64> {
    if !x.is_unit(1e-9) {
        return Err(Error::NotNormalized { norm: x.norm() });
    }
    if x.dim() != y.dim() {
        return Err(Error::DimensionMismatch {
            left: x.dim(),
            right: y.dim(),
        });
    }
    if l == 0 {
        let sx = QState::from_vector(x)?;
        let sy = QState::from_vector(y)?;
        return swap_test_inner_with_delta(&sx, &sy, eps / 2f64.sqrt(), SWAP_TEST_DELTA, sim);
    }
    let eps_phase = eps / (2.0 * l as f64);
    let (ps, _z) = matrix_power_state(a, y, l, eps_phase, sim)?;
    let padded = pad_with_flag(x)?;
    swap_test_inner_with_delta(
        &padded,
        &ps.state,
        eps / (2.0 * 2f64.sqrt()),
        SWAP_TEST_DELTA,
        sim,
    )
}

/// One multiplication by a general (possibly non-square) operator through its
/// Hermitian dilation. The operator is rescaled by tau = max(1, sigma_max) to
/// honor Assumption 2; sign-preserving rounding keeps the dilation's block
/// structure, so the flagged component is exactly (T~ / tau) v in the first
/// block. Returns that block, the postselection probability and tau.
pub struct DilatedApply {
    /// First-block flagged component: (T~ / tau) v, unnormalized.
    pub product: Vector,
    pub success_probability: f64,
    /// Rescale factor applied before the quantum step.
    pub tau: f64,
    /// Condition number of the dilated operator (reported, never hidden).
    pub dilation_kappa: f64,
    pub assumption3_warning: bool,
}

pub fn apply_via_dilation(
    t_mat: &ComplexMatrix,
    v: &Vector,
    eps_phase: f64,
    sim: &mut Sim,
) -> Result<DilatedApply> {
    if v.dim() != t_mat.cols() {
        return Err(Error::DimensionMismatch {
            left: t_mat.cols(),
            right: v.dim(),
        });
    }
    let p = t_mat.rows();
    let q = t_mat.cols();
    let dil = t_mat.hermitian_dilation();
    let sd = dil.spectral_decompose()?;
    let sigma_max = sd.spectral_radius();
    let tau = sigma_max.max(1.0) * (1.0 + 1e-13);
    let scaled = dil.scaled(cr(1.0 / tau));
    let dilation_kappa = dil.condition_number().unwrap_or(f64::INFINITY);

    // Embed v in the second block so the dilation sends it to (T v; 0).
    let mut emb = Vector::zeros(p + q);
    for i in 0..q {
        emb.set(p + i, v.get(i));
    }
    let emb = emb.normalized()?;
    let scale_back = v.norm();

    let ps = matrix_function_state(&scaled, &emb, |x| x, eps_phase, Some(1.0), sim)?;
    let good = ps.good_component()?;
    let mut product = Vector::zeros(p);
    for i in 0..p {
        product.set(i, good.get(i) * cr(scale_back));
    }
    // The second block of the flagged component is zero up to rounding noise.
    let leak: f64 = (p..p + q).map(|i| good.get(i).norm_sqr()).sum();
    debug_assert!(leak < 1e-18, "dilation block leak {leak:.3e}");
    Ok(DilatedApply {
        product,
        success_probability: ps.success_probability,
        tau,
        dilation_kappa,
        assumption3_warning: ps.assumption3_warning,
    })
}

/// <x|A|y> for arbitrary `a` (Hermitian or not), estimated through a single
/// dilated multiplication and a swap test. `x` may live in a different space
/// than `y` when `a` is rectangular.
pub fn estimate_matrix_element(
    x: &Vector,
    a: &ComplexMatrix,
    y: &Vector,
    eps: f64,
    sim: &mut Sim,
) -> Result<C64> {
    if a.is_hermitian() {
        return inner_product_via_power(x, a, 1, y, eps, sim);
    }
    if x.dim() != a.rows() || y.dim() != a.cols() {
        return Err(Error::DimensionMismatch {
            left: a.rows(),
            right: x.dim(),
        });
    }
    let eps_phase = eps / 2.0;
    let dil = a.hermitian_dilation();
    let sd = dil.spectral_decompose()?;
    let tau = sd.spectral_radius().max(1.0) * (1.0 + 1e-13);
    let scaled = dil.scaled(cr(1.0 / tau));
    let p = a.rows();
    let q = a.cols();
    let mut emb_y = Vector::zeros(p + q);
    for i in 0..q {
        emb_y.set(p + i, y.get(i));
    }
    let emb_y = emb_y.normalized()?;
    let ps = matrix_function_state(&scaled, &emb_y, |x| x, eps_phase / tau, Some(1.0), sim)?;
    let mut emb_x = Vector::zeros(p + q);
    for i in 0..p {
        emb_x.set(i, x.get(i));
    }
    let padded = pad_with_flag(&emb_x)?;
    let est = swap_test_inner_with_delta(
        &padded,
        &ps.state,
        eps / (2.0 * tau * 2f64.sqrt()),
        SWAP_TEST_DELTA,
        sim,
    )?;
    Ok(est * cr(tau * y.norm()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances;
    use crate::linalg::apply_matrix_polynomial_real;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn identity_function_on_diagonal_operator() {
        // f = identity, A = diag(1, 0.5), y = e_1: flagged component is e_1
        // scaled by C with success probability C^2 (C = 1 here).
        let a = ComplexMatrix::diagonal(&[1.0, 0.5]);
        let y = Vector::basis(2, 0);
        let mut sim = Sim::exact();
        let ps = matrix_function_state(&a, &y, |x| x, 0.0, None, &mut sim).unwrap();
        let good = ps.good_component().unwrap();
        assert!(good.sub(&Vector::basis(2, 0)).norm() < 1e-12);
        assert!((ps.success_probability - 1.0).abs() < 1e-12);
    }

    #[test]
    fn identity_matrix_gives_back_y() {
        let a = ComplexMatrix::identity(4);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let y = instances::random_state(4, &mut rng);
        let mut sim = Sim::exact();
        let ps = matrix_function_state(&a, &y, |x| x, 0.0, None, &mut sim).unwrap();
        assert!((ps.success_probability - 1.0).abs() < 1e-12);
        let post = ps.postselected().unwrap();
        assert!(post.dist_up_to_phase(&y) < 1e-10);
    }

    #[test]
    fn squared_function_success_probability_matches_formula() {
        // f(x) = x^2, A = diag(0.8, 0.4), y = (1,1)/sqrt(2):
        // success = sum |beta_j f(lambda~_j) C|^2 evaluated directly.
        let a = ComplexMatrix::diagonal(&[0.8, 0.4]);
        let y = Vector::from_real(&[1.0, 1.0]).normalized().unwrap();
        let eps_phase = 2f64.powi(-10);
        let mut sim = Sim::exact();
        let ps = matrix_function_state(&a, &y, |x| x * x, eps_phase, None, &mut sim).unwrap();
        let l1 = round_eigenvalue(0.8, eps_phase);
        let l2 = round_eigenvalue(0.4, eps_phase);
        let c_rot = 1.0 / (l1 * l1).max(l2 * l2);
        let expect = 0.5 * (l1.powi(2) * c_rot).powi(2) + 0.5 * (l2.powi(2) * c_rot).powi(2);
        assert!((ps.success_probability - expect).abs() < 1e-12);
    }

    #[test]
    fn power_state_trivial_and_diagonal() {
        let a = ComplexMatrix::identity(3);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let y = instances::random_state(3, &mut rng);
        let mut sim = Sim::exact();
        let (ps, z) = matrix_power_state(&a, &y, 1, 0.0, &mut sim).unwrap();
        assert!((z - 1.0).abs() < 1e-12);
        assert!(ps.postselected().unwrap().dist_up_to_phase(&y) < 1e-10);

        // l = 3, A = diag(0.9, 0.3), y = e_0: Z~ = (0.9^3)^2 = 0.531441
        let a = ComplexMatrix::diagonal(&[0.9, 0.3]);
        let y = Vector::basis(2, 0);
        let (_, z) = matrix_power_state(&a, &y, 3, 0.0, &mut sim).unwrap();
        assert!((z - 0.531441).abs() < 1e-12);
    }

    #[test]
    fn power_state_error_bound_holds() {
        // l = 2, random 8-dim Hermitian with spectrum in [-1,1],
        // eps_phase = 2^-12: ||A^2 y - sqrt(Z~) psi~|| <= 2 * 2^-12.
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let spec: Vec<f64> = (0..8).map(|i| 0.95 - 0.11 * i as f64).collect();
        let a = instances::hermitian_with_spectrum(&spec, &mut rng);
        let y = instances::random_state(8, &mut rng);
        let eps_phase = 2f64.powi(-12);
        let mut sim = Sim::exact();
        let (ps, _z) = matrix_power_state(&a, &y, 2, eps_phase, &mut sim).unwrap();
        let truth = apply_matrix_polynomial_real(&[0.0, 0.0, 1.0], &a, &y).unwrap();
        let got = ps.good_component().unwrap();
        let err = truth.sub(&got).norm();
        assert!(err <= 2.0 * eps_phase, "err {err:.3e}");
    }

    #[test]
    fn z_estimate_bound_holds() {
        // |Z - Z~| <= 2 l eps
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for l in 1..=4u32 {
            let a = instances::hermitian_with_kappa(6, 4.0, &mut rng).unwrap();
            let y = instances::random_state(6, &mut rng);
            let eps_phase = 2f64.powi(-8);
            let mut sim = Sim::exact();
            let (_, z_tilde) = matrix_power_state(&a, &y, l, eps_phase, &mut sim).unwrap();
            let mut z = 0.0;
            let sd = a.spectral_decompose().unwrap();
            for (beta, lam) in sd.expand(&y).unwrap().iter().zip(sd.eigenvalues()) {
                z += (lam.powi(l as i32) * beta.norm()).powi(2);
            }
            assert!((z - z_tilde).abs() <= 2.0 * l as f64 * eps_phase);
        }
    }

    #[test]
    fn rejects_oversized_spectrum() {
        let a = ComplexMatrix::diagonal(&[1.5, 0.2]);
        let y = Vector::basis(2, 0);
        let mut sim = Sim::exact();
        assert!(matches!(
            matrix_function_state(&a, &y, |x| x, 0.0, None, &mut sim),
            Err(Error::AssumptionViolated(_))
        ));
    }

    #[test]
    fn rejects_bad_constant() {
        let a = ComplexMatrix::diagonal(&[0.9, 0.2]);
        let y = Vector::basis(2, 0);
        let mut sim = Sim::exact();
        assert!(matches!(
            matrix_function_state(&a, &y, |x| x, 0.0, Some(2.0), &mut sim),
            Err(Error::BadConstant { .. })
        ));
    }

    #[test]
    fn assumption3_violation_is_flagged_not_fatal() {
        let a = ComplexMatrix::diagonal(&[0.9, 0.0]);
        let y = Vector::from_real(&[1.0, 1.0]).normalized().unwrap();
        let mut sim = Sim::exact();
        let ps = matrix_function_state(&a, &y, |x| x, 0.0, Some(1.0), &mut sim).unwrap();
        assert!(ps.assumption3_warning);
        assert!((ps.success_probability - 0.5 * 0.81).abs() < 1e-12);
    }

    #[test]
    fn inner_product_via_power_examples() {
        let mut sim = Sim::exact();
        // l = 0 reduces to the plain inner product.
        let x = Vector::basis(4, 1);
        let y = Vector::basis(4, 1);
        let a = ComplexMatrix::identity(4);
        let v = inner_product_via_power(&x, &a, 0, &y, 0.01, &mut sim).unwrap();
        assert!((v - cr(1.0)).norm() < 1e-12);

        // x = y = eigenvector with lambda = 0.5, l = 2 -> 0.25
        let a = ComplexMatrix::diagonal(&[0.5, 0.3]);
        let e = Vector::basis(2, 0);
        let v = inner_product_via_power(&e, &a, 2, &e, 0.01, &mut sim).unwrap();
        assert!((v - cr(0.25)).norm() < 1e-12);
    }

    #[test]
    fn inner_product_via_power_sampled_confidence() {
        // random 16-dim instance vs classical x^dagger A^3 y:
        // within eps = 0.02 in at least 95/100 seeded runs.
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let a = instances::hermitian_with_kappa(16, 5.0, &mut rng).unwrap();
        let x = instances::random_state(16, &mut rng);
        let y = instances::random_state(16, &mut rng);
        let truth = {
            let ay = apply_matrix_polynomial_real(&[0.0, 0.0, 0.0, 1.0], &a, &y).unwrap();
            x.inner(&ay)
        };
        let mut good = 0;
        for seed in 0..100 {
            let mut sim = Sim::seeded(31_000 + seed);
            let est = inner_product_via_power(&x, &a, 3, &y, 0.02, &mut sim).unwrap();
            if (est - truth).norm() <= 0.02 {
                good += 1;
            }
        }
        assert!(good >= 95, "only {good}/100");
    }

    #[test]
    fn dilated_application_matches_direct_product() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let a = ComplexMatrix::from_fn(3, 2, |i, j| {
            crate::linalg::c(
                0.3 * (i as f64 - j as f64),
                0.1 * (i + j) as f64,
            )
        });
        let v = instances::random_state(2, &mut rng);
        let mut sim = Sim::exact();
        let out = apply_via_dilation(&a, &v, 0.0, &mut sim).unwrap();
        let direct = a.mul_vec(&v).unwrap();
        let rebuilt = out.product.scaled(cr(out.tau));
        assert!(rebuilt.sub(&direct).norm() < 1e-10);
    }

    #[test]
    fn matrix_element_general_matches_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let a = ComplexMatrix::from_fn(3, 3, |i, j| {
            crate::linalg::c(0.2 * ((i * 3 + j) as f64).sin(), 0.15 * (i as f64 - j as f64))
        });
        assert!(!a.is_hermitian());
        let x = instances::random_state(3, &mut rng);
        let y = instances::random_state(3, &mut rng);
        let truth = x.inner(&a.mul_vec(&y).unwrap());
        let mut sim = Sim::exact();
        let est = estimate_matrix_element(&x, &a, &y, 0.01, &mut sim).unwrap();
        assert!((est - truth).norm() < 1e-9, "est {est} truth {truth}");
    }
}

//! Eigenstructure view of unitaries, the Grover rotation built from a
//! two-branch state, explicit phase grids, and fractional powers.

use crate::error::{Error, Result};
use crate::linalg::{c, cr, ComplexMatrix, Vector, C64};
use crate::qsim::state::QState;

use std::f64::consts::PI;

/// Number of phase bits needed for a grid of resolution `eps`; `eps <= 0`
/// means exact (no rounding anywhere).
pub fn phase_bits(eps: f64) -> Option<u32> {
    if eps <= 0.0 {
        None
    } else {
        let t = (1.0 / eps).log2().ceil() as i64;
        Some(t.clamp(1, 52) as u32)
    }
}

/// Round a phase fraction to the nearest multiple of 2^-t. No wrap-around:
/// fractions near 1 round to 1.0, keeping fractional powers on one branch.
pub fn round_fraction(frac: f64, t: u32) -> f64 {
    let n = (1u64 << t) as f64;
    (frac * n).round() / n
}

/// Sign-preserving round-to-nearest of a real eigenvalue on the t-bit grid
/// implied by `eps_phase`.
pub fn round_eigenvalue(lambda: f64, eps_phase: f64) -> f64 {
    match phase_bits(eps_phase) {
        None => lambda,
        Some(t) => {
            let r = round_fraction(lambda.abs(), t);
            if lambda < 0.0 {
                -r
            } else {
                r
            }
        }
    }
}

/// How a [`UnitaryEigen`] treats the orthogonal complement of its listed
/// eigenvectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Complement {
    /// Unlisted directions are untouched (eigenphase 0).
    Identity,
    /// The operator is only defined on the listed span; inputs must lie in it.
    Unspecified,
}

/// A unitary presented through (a subset of) its eigendecomposition:
/// eigenvalue `exp(2 pi i phase_j)` on eigenvector `u_j`.
#[derive(Debug, Clone)]
pub struct UnitaryEigen {
    dim: usize,
    phases: Vec<f64>,
    eigenvectors: Vec<Vector>,
    complement: Complement,
}

impl UnitaryEigen {
    pub fn from_parts(
        dim: usize,
        phases: Vec<f64>,
        eigenvectors: Vec<Vector>,
        complement: Complement,
    ) -> Result<Self> {
        if phases.len() != eigenvectors.len() {
            return Err(Error::DimensionMismatch {
                left: phases.len(),
                right: eigenvectors.len(),
            });
        }
        for v in &eigenvectors {
            if v.dim() != dim {
                return Err(Error::DimensionMismatch {
                    left: dim,
                    right: v.dim(),
                });
            }
            if !v.is_unit(1e-9) {
                return Err(Error::NotNormalized { norm: v.norm() });
            }
        }
        let phases = phases.into_iter().map(|p| p.rem_euclid(1.0)).collect();
        Ok(Self {
            dim,
            phases,
            eigenvectors,
            complement,
        })
    }

    /// Diagonal unitary on the canonical basis with the given phase fractions.
    pub fn diagonal(phases: &[f64]) -> Self {
        let dim = phases.len();
        Self {
            dim,
            phases: phases.iter().map(|p| p.rem_euclid(1.0)).collect(),
            eigenvectors: (0..dim).map(|j| Vector::basis(dim, j)).collect(),
            complement: Complement::Identity,
        }
    }

    /// Full eigendecomposition of an explicit unitary matrix.
    ///
    /// Uses the Hermitian parts (U + U^dagger)/2 and (U - U^dagger)/(2i):
    /// eigenvectors of the first are refined inside degenerate clusters by the
    /// second, which resolves conjugate eigenphase pairs without a general
    /// nonsymmetric eigensolver.
    pub fn from_matrix(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::DimensionMismatch {
                left: u.rows(),
                right: u.cols(),
            });
        }
        let n = u.rows();
        let udag = u.adjoint();
        let gram = udag.matmul(u)?;
        let dev = gram.sub(&ComplexMatrix::identity(n))?.max_abs_entry();
        if dev > 1e-9 {
            return Err(Error::NotUnitary { deviation: dev });
        }
        let h_cos = u.add(&udag)?.scaled(cr(0.5));
        let h_sin = u.sub(&udag)?.scaled(c(0.0, -0.5));
        let sd_cos = h_cos.spectral_decompose()?;

        let mut phases = Vec::with_capacity(n);
        let mut eigenvectors: Vec<Vector> = Vec::with_capacity(n);
        let mut start = 0usize;
        while start < n {
            let mut end = start + 1;
            while end < n
                && (sd_cos.eigenvalues()[end] - sd_cos.eigenvalues()[start]).abs() <= 1e-8
            {
                end += 1;
            }
            let cluster: Vec<&Vector> = (start..end).map(|k| sd_cos.eigenvector(k)).collect();
            let g = cluster.len();
            if g == 1 {
                eigenvectors.push(cluster[0].clone());
            } else {
                // Diagonalize the sine part restricted to the cluster.
                let images: Vec<Vector> = cluster
                    .iter()
                    .map(|v| h_sin.mul_vec(v))
                    .collect::<Result<_>>()?;
                let mut entries = Vec::with_capacity(g * g);
                for vi in &cluster {
                    for img in &images {
                        entries.push(vi.inner(img));
                    }
                }
                let raw = ComplexMatrix::new(g, g, entries)?;
                // Symmetrize rounding noise so the Hermitian flag holds.
                let m = raw.add(&raw.adjoint())?.scaled(cr(0.5));
                let sub = m.spectral_decompose()?;
                for k in 0..g {
                    let coeffs = sub.eigenvector(k);
                    let mut w = Vector::zeros(n);
                    for (ci, v) in coeffs.entries().iter().zip(&cluster) {
                        w.axpy(*ci, v);
                    }
                    eigenvectors.push(w.normalized()?.canonicalized());
                }
            }
            start = end;
        }
        for w in &eigenvectors {
            let uw = u.mul_vec(w)?;
            let lam = w.inner(&uw);
            if (lam.norm() - 1.0).abs() > 1e-8 {
                return Err(Error::NotUnitary {
                    deviation: (lam.norm() - 1.0).abs(),
                });
            }
            let residual = uw.sub(&w.scaled(lam)).norm();
            if residual > 1e-7 {
                return Err(Error::EigenFailed);
            }
            phases.push((lam.im.atan2(lam.re) / (2.0 * PI)).rem_euclid(1.0));
        }
        Ok(Self {
            dim: n,
            phases,
            eigenvectors,
            complement: Complement::Identity,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phases(&self) -> &[f64] {
        &self.phases
    }

    pub fn eigenvectors(&self) -> &[Vector] {
        &self.eigenvectors
    }

    pub fn complement(&self) -> Complement {
        self.complement
    }

    /// Dense matrix of the represented unitary.
    pub fn matrix(&self) -> ComplexMatrix {
        self.power_matrix(1.0, None)
    }

    fn power_matrix(&self, t: f64, grid_bits: Option<u32>) -> ComplexMatrix {
        let n = self.dim;
        let mut m = match self.complement {
            Complement::Identity => ComplexMatrix::identity(n),
            Complement::Unspecified => ComplexMatrix::zeros(n, n),
        };
        let base = matches!(self.complement, Complement::Identity);
        let mut entries = m.entries().to_vec();
        for (frac, u) in self.phases.iter().zip(&self.eigenvectors) {
            let f = match grid_bits {
                Some(bits) => round_fraction(*frac, bits),
                None => *frac,
            };
            let phase = C64::from_polar(1.0, 2.0 * PI * f * t);
            let weight = if base { phase - cr(1.0) } else { phase };
            for i in 0..n {
                for j in 0..n {
                    entries[i * n + j] += weight * u.get(i) * u.get(j).conj();
                }
            }
        }
        m = ComplexMatrix::new(n, n, entries).expect("square by construction");
        m
    }
}

/// U^t for t in [0, 1], with every eigenphase first rounded onto the grid of
/// resolution `eps` (the phase-estimation model of the implementation). The
/// operator distance to the exact fractional power is at most
/// `2 pi eps t + 1e-10`, eigenphases taken on the [0, 2 pi) branch.
pub fn unitary_fractional_power(u: &UnitaryEigen, t: f64, eps: f64) -> Result<ComplexMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::ParamInvalid(format!(
            "fractional power exponent must be in [0,1], got {t}"
        )));
    }
    Ok(u.power_matrix(t, phase_bits(eps)))
}

/// The Grover rotation G = (2|phi><phi| - I)(Y x I) of a two-branch state
/// phi = sin(theta)|0>|u> + cos(theta)|1>|v>, together with its restriction
/// to the invariant plane and its eigenpairs.
#[derive(Debug, Clone)]
pub struct GroverRotation {
    /// Branch angle in [0, pi/2].
    pub theta: f64,
    /// Restriction to span{|0>|u>, |1>|v>}: a rotation by 2 theta.
    pub block: ComplexMatrix,
    /// Full-space eigenpairs with eigenphases +-2 theta.
    pub eigen: UnitaryEigen,
    /// Set when one branch has norm below 1e-12 (theta in {0, pi/2}).
    pub degenerate: bool,
}

/// Build the Grover rotation from a state whose first register is one qubit.
pub fn grover_rotation(phi: &QState) -> Result<GroverRotation> {
    let first = phi
        .layout()
        .first()
        .ok_or_else(|| Error::ParamInvalid("state has no registers".into()))?;
    if first.dim != 2 {
        return Err(Error::DimensionMismatch {
            left: 2,
            right: first.dim,
        });
    }
    let name = first.name.clone();
    let b0 = phi.component_where(&name, 0)?;
    let b1 = phi.component_where(&name, 1)?;
    let sin_theta = b0.norm();
    let cos_theta = b1.norm();
    let theta = sin_theta.atan2(cos_theta);
    let degenerate = sin_theta < 1e-12 || cos_theta < 1e-12;

    let (c2, s2) = ((2.0 * theta).cos(), (2.0 * theta).sin());
    let block = ComplexMatrix::new(
        2,
        2,
        vec![cr(c2), cr(s2), cr(-s2), cr(c2)],
    )?;

    let dim = phi.dim();
    let embed = |top: &Vector, bottom: &Vector| -> Vector {
        let mut amps = Vec::with_capacity(dim);
        amps.extend_from_slice(top.entries());
        amps.extend_from_slice(bottom.entries());
        Vector::new(amps)
    };

    let eigen = if degenerate {
        // The whole state sits in one branch and G fixes it up to sign.
        let (vec, frac) = if sin_theta < 1e-12 {
            (phi.to_vector(), 0.0)
        } else {
            (phi.to_vector(), 0.5)
        };
        UnitaryEigen::from_parts(dim, vec![frac], vec![vec], Complement::Unspecified)?
    } else {
        let u = b0.normalized()?;
        let v = b1.normalized()?;
        let inv_sqrt2 = cr(1.0 / 2.0_f64.sqrt());
        let iv = v.scaled(c(0.0, 1.0));
        let w1 = embed(&u.scaled(inv_sqrt2), &iv.scaled(inv_sqrt2));
        let w2 = embed(&u.scaled(inv_sqrt2), &iv.scaled(-inv_sqrt2));
        let frac = theta / PI;
        UnitaryEigen::from_parts(
            dim,
            vec![frac, (1.0 - frac).rem_euclid(1.0)],
            vec![w1, w2],
            Complement::Unspecified,
        )?
    };

    Ok(GroverRotation {
        theta,
        block,
        eigen,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::state::Register;
    use rand::SeedableRng;
    use std::f64::consts::FRAC_PI_4;

    fn two_branch_state(theta: f64, n: usize) -> QState {
        // u = e_0, v = e_1 in an n-dim system register
        let mut amps = vec![C64::ZERO; 2 * n];
        amps[0] = cr(theta.sin());
        amps[n + 1] = cr(theta.cos());
        QState::new(amps, vec![Register::new("flag", 2), Register::new("sys", n)]).unwrap()
    }

    #[test]
    fn grover_equal_superposition_has_quarter_eigenphases() {
        let phi = two_branch_state(FRAC_PI_4, 3);
        let g = grover_rotation(&phi).unwrap();
        assert!(!g.degenerate);
        let mut fr = g.eigen.phases().to_vec();
        fr.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // eigenphases +-pi/2 as fractions: 0.25 and 0.75
        assert!((fr[0] - 0.25).abs() < 1e-12);
        assert!((fr[1] - 0.75).abs() < 1e-12);
    }

    #[test]
    fn grover_degenerate_theta_zero() {
        let phi = two_branch_state(0.0, 2);
        let g = grover_rotation(&phi).unwrap();
        assert!(g.degenerate);
        assert_eq!(g.eigen.phases(), &[0.0]);
    }

    #[test]
    fn grover_block_eigenvalues_match_rotation() {
        // Oracle: direct eigensolve of the 2x2 block for theta = 0.7.
        let theta = 0.7;
        let phi = two_branch_state(theta, 2);
        let g = grover_rotation(&phi).unwrap();
        let ue = UnitaryEigen::from_matrix(&g.block).unwrap();
        let mut fr = ue.phases().to_vec();
        fr.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expect = theta / PI; // 2 theta / 2 pi
        assert!((fr[0] - expect).abs() < 1e-10, "{fr:?}");
        assert!((fr[1] - (1.0 - expect)).abs() < 1e-10);
        // And the full-space eigenvectors really are eigenvectors of G's block action.
        let m = g.eigen.matrix();
        for (frac, w) in g.eigen.phases().iter().zip(g.eigen.eigenvectors()) {
            let mw = m.mul_vec(w).unwrap();
            let lam = C64::from_polar(1.0, 2.0 * PI * frac);
            assert!(mw.sub(&w.scaled(lam)).norm() < 1e-9);
        }
    }

    #[test]
    fn fractional_power_endpoints() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let q = crate::instances::random_unitary(4, &mut rng);
        let ue = UnitaryEigen::from_matrix(&q).unwrap();
        let p1 = unitary_fractional_power(&ue, 1.0, 0.0).unwrap();
        assert!(p1.sub(&q).unwrap().max_abs_entry() < 1e-9);
        let p0 = unitary_fractional_power(&ue, 0.0, 0.0).unwrap();
        assert!(p0.sub(&ComplexMatrix::identity(4)).unwrap().max_abs_entry() < 1e-10);
    }

    #[test]
    fn fractional_power_of_plane_rotation() {
        // Rotation by 2 theta, theta = 0.6; quarter power rotates by 0.3.
        let theta: f64 = 0.6;
        let (cs, sn) = ((2.0 * theta).cos(), (2.0 * theta).sin());
        let r = ComplexMatrix::new(2, 2, vec![cr(cs), cr(-sn), cr(sn), cr(cs)]).unwrap();
        let ue = UnitaryEigen::from_matrix(&r).unwrap();
        let eps = 1e-6;
        let quarter = unitary_fractional_power(&ue, 0.25, eps).unwrap();
        let (cq, sq) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let expect = ComplexMatrix::new(2, 2, vec![cr(cq), cr(-sq), cr(sq), cr(cq)]).unwrap();
        let dist = quarter.operator_distance(&expect).unwrap();
        assert!(dist <= 2.0 * PI * eps * 0.25 + 1e-10, "dist {dist:.3e}");
    }

    #[test]
    fn round_eigenvalue_preserves_sign_and_grid() {
        let eps = 2f64.powi(-6);
        let r = round_eigenvalue(-0.33, eps);
        assert!(r < 0.0);
        assert!(((r.abs() * 64.0).round() - r.abs() * 64.0).abs() < 1e-12);
        assert_eq!(round_eigenvalue(0.5, eps), 0.5);
        assert_eq!(round_eigenvalue(0.7, 0.0), 0.7);
    }
}

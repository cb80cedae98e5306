//! Quantum state values: amplitude vectors with labeled register layouts and
//! postselected states with an explicit success flag.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Vector, C64};

/// One named register in a state's layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Register {
    pub name: String,
    pub dim: usize,
}

impl Register {
    pub fn new(name: &str, dim: usize) -> Self {
        Self {
            name: name.to_string(),
            dim,
        }
    }
}

/// Normalized complex amplitude vector with a labeled register layout. Flat
/// indices are row-major over the layout: the first register is the most
/// significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QState {
    amplitudes: Vec<C64>,
    layout: Vec<Register>,
}

impl QState {
    pub const NORM_TOL: f64 = 1e-10;

    pub fn new(amplitudes: Vec<C64>, layout: Vec<Register>) -> Result<Self> {
        let dim: usize = layout.iter().map(|r| r.dim).product();
        if dim != amplitudes.len() {
            return Err(Error::DimensionMismatch {
                left: dim,
                right: amplitudes.len(),
            });
        }
        let norm = amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self { amplitudes, layout })
    }

    /// Single-register state named "sys" from a unit vector.
    pub fn from_vector(v: &Vector) -> Result<Self> {
        Self::new(
            v.entries().to_vec(),
            vec![Register::new("sys", v.dim())],
        )
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amplitudes
    }

    pub fn layout(&self) -> &[Register] {
        &self.layout
    }

    pub fn to_vector(&self) -> Vector {
        Vector::new(self.amplitudes.clone())
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &Self) -> C64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// |<self|other>|^2.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn dist_up_to_phase(&self, other: &Self) -> f64 {
        self.to_vector().dist_up_to_phase(&other.to_vector())
    }

    /// Global-phase canonical form (first significant amplitude real-positive).
    pub fn canonicalized(&self) -> Self {
        Self {
            amplitudes: self.to_vector().canonicalized().entries().to_vec(),
            layout: self.layout.clone(),
        }
    }

    fn register_index(&self, name: &str) -> Result<usize> {
        self.layout
            .iter()
            .position(|r| r.name == name)
            .ok_or_else(|| Error::ParamInvalid(format!("no register named '{name}'")))
    }

    /// Stride and dimension of a register inside the flat index space.
    fn register_geometry(&self, idx: usize) -> (usize, usize) {
        let dim = self.layout[idx].dim;
        let stride: usize = self.layout[idx + 1..].iter().map(|r| r.dim).product();
        (stride, dim)
    }

    /// The (unnormalized) component where `register` reads `value`, as a
    /// vector over the remaining registers in layout order.
    pub fn component_where(&self, register: &str, value: usize) -> Result<Vector> {
        let ridx = self.register_index(register)?;
        let (stride, rdim) = self.register_geometry(ridx);
        if value >= rdim {
            return Err(Error::ParamInvalid(format!(
                "value {value} out of range for register '{register}' (dim {rdim})"
            )));
        }
        let mut out = Vec::with_capacity(self.dim() / rdim);
        for (flat, amp) in self.amplitudes.iter().enumerate() {
            if (flat / stride) % rdim == value {
                out.push(*amp);
            }
        }
        Ok(Vector::new(out))
    }

    /// Probability of reading `value` on `register`.
    pub fn register_probability(&self, register: &str, value: usize) -> Result<f64> {
        Ok(self.component_where(register, value)?.norm_sqr())
    }
}

/// A state plus a flagged "good" subspace and its success probability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PostselectedState {
    pub state: QState,
    pub flag_register: String,
    pub good_value: usize,
    pub success_probability: f64,
    /// Set when a zero function value met a non-negligible amplitude (the
    /// success-probability accounting is degraded, not wrong).
    pub assumption3_warning: bool,
}

impl PostselectedState {
    /// Unnormalized flagged component over the non-flag registers.
    pub fn good_component(&self) -> Result<Vector> {
        self.state
            .component_where(&self.flag_register, self.good_value)
    }

    /// Normalized post-measurement state of the flagged component.
    pub fn postselected(&self) -> Result<Vector> {
        let v = self.good_component()?;
        if v.norm() < 1e-150 {
            return Err(Error::ZeroCombination);
        }
        v.normalized()
    }
}

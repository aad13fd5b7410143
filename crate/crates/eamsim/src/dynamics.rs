//! Exact time evolution by spectral decomposition, plus the closed-form
//! two-level solution.
//!
//! One Hermitian eigendecomposition per Hamiltonian, then analytic phase
//! factors per time point: psi(t) = sum_k v_k e^{-i lambda_k t} (v_k^dagger psi_0).
//! Unitarity then holds to eigensolver accuracy at every time, with no
//! integrator tolerances to tune. Times are absolute, measured from the
//! initial state at t = 0.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;

use crate::error::SimError;
use crate::hamiltonian::{HermitianOperator, LabeledBasis};
use crate::model::{mode_energy, EamLabel, TriadSpec};
use crate::Result;

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Eigenvalues and eigenvectors of one labeled Hermitian operator.
///
/// Eigenvalues are ascending; eigenvector k is column k. Residual and
/// unitarity are validated at construction, so a Spectrum in hand is a
/// certificate that the decomposition is trustworthy.
#[derive(Debug, Clone)]
pub struct Spectrum {
    basis: LabeledBasis,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<Complex64>,
}

impl Spectrum {
    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &DMatrix<Complex64> {
        &self.eigenvectors
    }

    pub fn dimension(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Diagonalize a labeled Hermitian operator.
///
/// Fails with a numerical-contract error if the backend returns
/// eigenpairs with residual above 1e-10 * max|H| or an eigenvector matrix
/// that is not unitary to 1e-10.
pub fn eigendecompose(h: &HermitianOperator) -> Result<Spectrum> {
    let dim = h.dimension();
    let eig = SymmetricEigen::new(h.matrix().clone());

    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut eigenvectors = DMatrix::<Complex64>::zeros(dim, dim);
    for (i, &k) in order.iter().enumerate() {
        eigenvectors.set_column(i, &eig.eigenvectors.column(k));
    }

    let scale = max_abs(h.matrix());
    for (k, &lambda) in eigenvalues.iter().enumerate() {
        let v = eigenvectors.column(k);
        let residual = (h.matrix() * v - v * Complex64::new(lambda, 0.0)).norm();
        if residual > 1e-10 * scale {
            return Err(SimError::NumericalContract(format!(
                "eigenpair {k} residual {residual:.3e} exceeds 1e-10 * {scale:.3e}"
            )));
        }
    }
    let gram = eigenvectors.adjoint() * &eigenvectors;
    let defect = max_abs(&(&gram - DMatrix::<Complex64>::identity(dim, dim)));
    if defect > 1e-10 {
        return Err(SimError::NumericalContract(format!(
            "eigenvector matrix unitarity defect {defect:.3e} exceeds 1e-10"
        )));
    }

    Ok(Spectrum {
        basis: h.basis().clone(),
        eigenvalues,
        eigenvectors,
    })
}

/// Normalized state over a labeled basis.
#[derive(Debug, Clone)]
pub struct StateVector {
    basis: LabeledBasis,
    amplitudes: DVector<Complex64>,
}

impl StateVector {
    /// Amplitudes must match the basis dimension and have unit norm
    /// within 1e-10.
    pub fn new(basis: LabeledBasis, amplitudes: DVector<Complex64>) -> Result<Self> {
        if amplitudes.len() != basis.dimension() {
            return Err(SimError::BasisMismatch(format!(
                "{} amplitudes over a dimension-{} basis",
                amplitudes.len(),
                basis.dimension()
            )));
        }
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(SimError::NumericalContract(format!(
                "state norm {norm} is not 1 within 1e-10"
            )));
        }
        Ok(Self { basis, amplitudes })
    }

    /// The basis state |label>.
    pub fn basis_state(basis: LabeledBasis, label: &crate::hamiltonian::BasisLabel) -> Result<Self> {
        let k = basis.index_of(label)?;
        let mut amplitudes = DVector::<Complex64>::zeros(basis.dimension());
        amplitudes[k] = Complex64::ONE;
        Ok(Self { basis, amplitudes })
    }

    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, label: &crate::hamiltonian::BasisLabel) -> Result<Complex64> {
        Ok(self.amplitudes[self.basis.index_of(label)?])
    }

    pub fn population(&self, label: &crate::hamiltonian::BasisLabel) -> Result<f64> {
        Ok(self.amplitude(label)?.norm_sqr())
    }
}

/// States of one system sampled on a strictly increasing time grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    basis: LabeledBasis,
    times: Vec<f64>,
    states: Vec<DVector<Complex64>>,
}

impl Trajectory {
    pub fn new(
        basis: LabeledBasis,
        times: Vec<f64>,
        states: Vec<DVector<Complex64>>,
    ) -> Result<Self> {
        if times.is_empty() || times.len() != states.len() {
            return Err(SimError::InvalidSpec(format!(
                "{} times against {} states",
                times.len(),
                states.len()
            )));
        }
        for w in times.windows(2) {
            // partial_cmp so a NaN time is rejected, not silently ordered.
            if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
                return Err(SimError::InvalidSpec(format!(
                    "times must increase strictly: {} then {}",
                    w[0], w[1]
                )));
            }
        }
        for (k, s) in states.iter().enumerate() {
            if s.len() != basis.dimension() {
                return Err(SimError::BasisMismatch(format!(
                    "state {k} has {} amplitudes over a dimension-{} basis",
                    s.len(),
                    basis.dimension()
                )));
            }
            let norm = s.norm();
            if (norm - 1.0).abs() > 1e-10 {
                return Err(SimError::NumericalContract(format!(
                    "state at t={} has norm {norm}",
                    times[k]
                )));
            }
        }
        Ok(Self {
            basis,
            times,
            states,
        })
    }

    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn states(&self) -> &[DVector<Complex64>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn population_at(&self, k: usize, label: &crate::hamiltonian::BasisLabel) -> Result<f64> {
        let i = self.basis.index_of(label)?;
        Ok(self.states[k][i].norm_sqr())
    }
}

/// Evolve psi0 under H across a strictly increasing time grid.
///
/// A grid point at exactly t = 0 returns psi0 verbatim; other points get
/// the spectral phases. The state basis must be the Hamiltonian basis,
/// label for label.
pub fn evolve(h: &HermitianOperator, psi0: &StateVector, times: &[f64]) -> Result<Trajectory> {
    if psi0.basis() != h.basis() {
        return Err(SimError::BasisMismatch(
            "initial state basis differs from Hamiltonian basis".into(),
        ));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(SimError::InvalidSpec("time grid must be finite".into()));
    }
    let spectrum = eigendecompose(h)?;
    let coeffs = spectrum.eigenvectors().adjoint() * psi0.amplitudes();
    let dim = spectrum.dimension();
    let mut states = Vec::with_capacity(times.len());
    for &t in times {
        if t == 0.0 {
            states.push(psi0.amplitudes().clone());
            continue;
        }
        let mut phased = coeffs.clone();
        for k in 0..dim {
            phased[k] *= Complex64::from_polar(1.0, -spectrum.eigenvalues()[k] * t);
        }
        states.push(spectrum.eigenvectors() * phased);
    }
    Trajectory::new(h.basis().clone(), times.to_vec(), states)
}

/// Population-transfer angular frequency of the two-level cutting model:
/// 2 sqrt((2|M|^2 + 3 (gamma-1)^2 (E_1^1)^2) / 3). Three arms only.
pub fn rabi_frequency(spec: &TriadSpec) -> Result<f64> {
    if spec.arm_count() != 3 {
        return Err(SimError::UnsupportedArmCount(spec.arm_count()));
    }
    let e11 = mode_energy(spec.acceptor(), EamLabel(1))?;
    let m2 = spec.qc_element().norm_sqr();
    let d = spec.detuning() - 1.0;
    Ok(2.0 * ((2.0 * m2 + 3.0 * d * d * e11 * e11) / 3.0).sqrt())
}

/// Closed-form two-level amplitudes (u_d, u_a) at time t from the initial
/// condition u_d(0) = 1, u_a(0) = 0.
///
/// With mu = E_1^1 (1 + gamma), half-splitting d = E_1^1 (gamma - 1),
/// coupling g = M sqrt(2/3), and Omega the population-transfer frequency:
///
/// ```text
/// u_d(t) = e^{-i mu t} [cos(Omega t / 2) - i (2 d / Omega) sin(Omega t / 2)]
/// u_a(t) = e^{-i mu t} [-i (2 g / Omega) sin(Omega t / 2)]
/// ```
///
/// |u_d|^2 + |u_a|^2 = 1 identically, and the donor population oscillates
/// at exactly Omega.
pub fn two_level_amplitudes(spec: &TriadSpec, t: f64) -> Result<(Complex64, Complex64)> {
    if spec.arm_count() != 3 {
        return Err(SimError::UnsupportedArmCount(spec.arm_count()));
    }
    let e11 = mode_energy(spec.acceptor(), EamLabel(1))?;
    let mu = e11 * (1.0 + spec.detuning());
    let d = e11 * (spec.detuning() - 1.0);
    let g = spec.qc_element() * (2.0f64 / 3.0).sqrt();
    let omega = rabi_frequency(spec)?;
    let envelope = Complex64::from_polar(1.0, -mu * t);
    if omega == 0.0 {
        return Ok((envelope, Complex64::ZERO));
    }
    let half = 0.5 * omega * t;
    let (s, c) = (half.sin(), half.cos());
    let u_d = envelope * Complex64::new(c, -2.0 * d / omega * s);
    let u_a = envelope * (Complex64::new(0.0, -2.0 / omega * s) * g);
    Ok((u_d, u_a))
}

//! Domain types and closed-form single-molecule quantities.
//!
//! A molecule is an N-arm ring of two-level chromophores. Its lowest
//! excited manifold consists of N twisted-exciton modes labeled by an
//! integer excitonic angular momentum (EAM) q, with energies
//! `E_q = delta + 2|tau| cos(2 pi q / N)`. Everything here is a pure
//! function over immutable data.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::SimError;
use crate::Result;

/// Tight-binding data for one N-arm molecule.
///
/// `delta` is the on-arm excitation energy and `tau` the complex
/// arm-to-arm hopping, both in the caller's reference energy unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MoleculeSpec {
    arm_count: usize,
    delta: f64,
    tau: Complex64,
}

impl MoleculeSpec {
    /// Build a molecule spec. Arm counts must be odd and >= 3, and
    /// `delta` finite.
    pub fn new(arm_count: usize, delta: f64, tau: Complex64) -> Result<Self> {
        if arm_count < 3 || arm_count.is_multiple_of(2) {
            return Err(SimError::UnsupportedArmCount(arm_count));
        }
        if !delta.is_finite() || !tau.re.is_finite() || !tau.im.is_finite() {
            return Err(SimError::InvalidSpec(format!(
                "molecule parameters must be finite (delta={delta}, tau={tau})"
            )));
        }
        Ok(Self {
            arm_count,
            delta,
            tau,
        })
    }

    pub fn arm_count(&self) -> usize {
        self.arm_count
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn tau(&self) -> Complex64 {
        self.tau
    }
}

/// One donor/acceptor/acceptor cutting assembly.
///
/// The two acceptors are identical by construction, so a single acceptor
/// spec describes both. `qc_element` is the three-body cutting matrix
/// element M and `detuning` the dimensionless factor multiplying the donor
/// energy (1 = resonant).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriadSpec {
    donor: MoleculeSpec,
    acceptor: MoleculeSpec,
    qc_element: Complex64,
    detuning: f64,
}

impl TriadSpec {
    pub fn new(
        donor: MoleculeSpec,
        acceptor: MoleculeSpec,
        qc_element: Complex64,
        detuning: f64,
    ) -> Result<Self> {
        if donor.arm_count() != acceptor.arm_count() {
            return Err(SimError::InvalidSpec(format!(
                "donor has {} arms but acceptor has {}",
                donor.arm_count(),
                acceptor.arm_count()
            )));
        }
        if !detuning.is_finite() || detuning <= 0.0 {
            return Err(SimError::InvalidSpec(format!(
                "detuning must be positive and finite, got {detuning}"
            )));
        }
        if !qc_element.re.is_finite() || !qc_element.im.is_finite() {
            return Err(SimError::InvalidSpec("qc_element must be finite".into()));
        }
        Ok(Self {
            donor,
            acceptor,
            qc_element,
            detuning,
        })
    }

    pub fn donor(&self) -> &MoleculeSpec {
        &self.donor
    }

    pub fn acceptor(&self) -> &MoleculeSpec {
        &self.acceptor
    }

    pub fn qc_element(&self) -> Complex64 {
        self.qc_element
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn arm_count(&self) -> usize {
        self.donor.arm_count()
    }
}

/// Integer EAM label, valid within the symmetric window for some odd N.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EamLabel(pub i32);

impl EamLabel {
    pub fn value(&self) -> i32 {
        self.0
    }

    /// True when this label lies in the window for `arm_count` arms.
    pub fn in_window(&self, arm_count: usize) -> bool {
        let half = (arm_count as i32 - 1) / 2;
        self.0.abs() <= half
    }

    /// Mod-N addition, mapped back into the symmetric window.
    pub fn add(&self, other: EamLabel, arm_count: usize) -> EamLabel {
        let n = arm_count as i32;
        let mut s = (self.0 + other.0).rem_euclid(n);
        let half = (n - 1) / 2;
        if s > half {
            s -= n;
        }
        EamLabel(s)
    }
}

impl std::fmt::Display for EamLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0 == 0 {
            write!(f, "0")
        } else {
            write!(f, "{:+}", self.0)
        }
    }
}

/// Donor triad extended by a chain of acceptor pairs on both sides.
///
/// `half_length` L counts pairs per side: 2L+1 molecular sites in total.
/// `eta` is the coupling between adjacent acceptor pair states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    triad: TriadSpec,
    half_length: usize,
    eta: Complex64,
}

impl ChainSpec {
    pub fn new(triad: TriadSpec, half_length: usize, eta: Complex64) -> Result<Self> {
        if half_length < 1 {
            return Err(SimError::InvalidSpec(
                "chain half_length must be at least 1".into(),
            ));
        }
        if !eta.re.is_finite() || !eta.im.is_finite() {
            return Err(SimError::InvalidSpec("eta must be finite".into()));
        }
        Ok(Self {
            triad,
            half_length,
            eta,
        })
    }

    pub fn triad(&self) -> &TriadSpec {
        &self.triad
    }

    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn eta(&self) -> Complex64 {
        self.eta
    }

    /// Total number of molecular sites, donor included.
    pub fn site_count(&self) -> usize {
        2 * self.half_length + 1
    }
}

/// The EAM window {-(N-1)/2, ..., (N-1)/2} in ascending order.
///
/// Even N is rejected: the window bounds are not integers there and the
/// physics of even-armed rings is not covered by this model.
pub fn eam_window(arm_count: usize) -> Result<Vec<EamLabel>> {
    if arm_count < 3 || arm_count.is_multiple_of(2) {
        return Err(SimError::UnsupportedArmCount(arm_count));
    }
    let half = (arm_count as i32 - 1) / 2;
    Ok((-half..=half).map(EamLabel).collect())
}

/// Twisted-exciton mode energy `delta + 2|tau| cos(2 pi q / N)`.
///
/// Even in q, and strictly decreasing with |q| for |tau| > 0.
pub fn mode_energy(molecule: &MoleculeSpec, q: EamLabel) -> Result<f64> {
    if !q.in_window(molecule.arm_count()) {
        return Err(SimError::EamOutsideWindow {
            q: q.value(),
            arm_count: molecule.arm_count(),
        });
    }
    let n = molecule.arm_count() as f64;
    Ok(molecule.delta() + 2.0 * molecule.tau().norm() * (2.0 * PI * q.value() as f64 / n).cos())
}

/// Donor on-arm energy that puts cutting on resonance for the three-arm
/// triad: the zero-EAM donor mode at twice the |q|=1 acceptor mode energy.
///
/// Solves `delta_0 + 2|tau_0| = 2 (delta_1 - |tau_1|)` for `delta_0`.
pub fn resonant_donor_delta(acceptor: &MoleculeSpec, donor_tau: Complex64) -> f64 {
    2.0 * (acceptor.delta() - acceptor.tau().norm()) - 2.0 * donor_tau.norm()
}

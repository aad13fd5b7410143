//! Selection-rule matrix elements, populations, partial traces, and
//! entanglement entropy.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::dynamics::{StateVector, Trajectory};
use crate::error::SimError;
use crate::hamiltonian::{BasisLabel, LabeledBasis};
use crate::model::{eam_window, EamLabel};
use crate::Result;

/// Eigenvalues below this cutoff contribute nothing to entropies;
/// this absorbs eigensolver noise and the 0 log 0 limit.
const ENTROPY_CUTOFF: f64 = 1e-14;

/// Cutting matrix element between the zero-EAM donor state and the
/// acceptor pair |q1, q2>.
///
/// The cyclic sum (M / N^{3/2}) sum_j e^{i 2 pi (j-1)(q1+q2) / N}
/// collapses to (M / sqrt(N)) when q1 + q2 = 0 (mod N) and to zero
/// otherwise: EAM is conserved in the downconversion.
pub fn qc_matrix_element(
    q1: EamLabel,
    q2: EamLabel,
    qc_element: Complex64,
    arm_count: usize,
) -> Result<Complex64> {
    if arm_count < 3 || arm_count.is_multiple_of(2) {
        return Err(SimError::UnsupportedArmCount(arm_count));
    }
    for q in [q1, q2] {
        if !q.in_window(arm_count) {
            return Err(SimError::EamOutsideWindow {
                q: q.value(),
                arm_count,
            });
        }
    }
    let n = arm_count as i32;
    if (q1.value() + q2.value()).rem_euclid(n) == 0 {
        Ok(qc_element / (arm_count as f64).sqrt())
    } else {
        Ok(Complex64::ZERO)
    }
}

/// Cutting matrix elements over every (q1, q2) pair for one arm count.
///
/// Exactly N of the N^2 entries are nonzero, all of magnitude |M|/sqrt(N):
/// the pairs with q1 + q2 = 0 (mod N).
#[derive(Debug, Clone)]
pub struct SelectionTable {
    arm_count: usize,
    qc_element: Complex64,
    elements: BTreeMap<(i32, i32), Complex64>,
}

impl SelectionTable {
    pub fn arm_count(&self) -> usize {
        self.arm_count
    }

    pub fn qc_element(&self) -> Complex64 {
        self.qc_element
    }

    /// Element for one pair; None when either label is outside the window.
    pub fn element(&self, q1: EamLabel, q2: EamLabel) -> Option<Complex64> {
        self.elements.get(&(q1.value(), q2.value())).copied()
    }

    /// True when the pair survives the selection rule.
    pub fn is_allowed(&self, q1: EamLabel, q2: EamLabel) -> bool {
        (q1.value() + q2.value()).rem_euclid(self.arm_count as i32) == 0
    }

    pub fn allowed_count(&self) -> usize {
        self.elements
            .values()
            .filter(|v| v.norm() > 1e-14 * self.qc_element.norm().max(1.0))
            .count()
    }

    /// Entries in ascending lexicographic (q1, q2) order.
    pub fn iter(&self) -> impl Iterator<Item = (EamLabel, EamLabel, Complex64)> + '_ {
        self.elements
            .iter()
            .map(|(&(a, b), &v)| (EamLabel(a), EamLabel(b), v))
    }
}

/// Tabulate `qc_matrix_element` over the full EAM window for odd N.
pub fn selection_table(qc_element: Complex64, arm_count: usize) -> Result<SelectionTable> {
    let window = eam_window(arm_count)?;
    let mut elements = BTreeMap::new();
    for &q1 in &window {
        for &q2 in &window {
            let v = qc_matrix_element(q1, q2, qc_element, arm_count)?;
            if !v.norm().is_finite() {
                return Err(SimError::NumericalContract(
                    "selection table entry is not finite".into(),
                ));
            }
            elements.insert((q1.value(), q2.value()), v);
        }
    }
    Ok(SelectionTable {
        arm_count,
        qc_element,
        elements,
    })
}

/// The same cyclic sum evaluated term by term, with no shortcut.
/// Kept public for oracle-style cross-checks.
pub fn qc_matrix_element_brute_force(
    q1: EamLabel,
    q2: EamLabel,
    qc_element: Complex64,
    arm_count: usize,
) -> Complex64 {
    let n = arm_count as f64;
    let mut sum = Complex64::ZERO;
    for j in 1..=arm_count {
        let phase = TAU * ((j - 1) as f64) * ((q1.value() + q2.value()) as f64) / n;
        sum += Complex64::from_polar(1.0, phase);
    }
    qc_element * sum / n.powf(1.5)
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Subsystem density matrix over a labeled basis.
///
/// Hermiticity, unit trace (1e-10), and positive semidefiniteness
/// (eigenvalues >= -1e-12) are enforced at construction; the real
/// eigenvalue spectrum is kept alongside the matrix.
#[derive(Debug, Clone)]
pub struct DensityOperator {
    basis: LabeledBasis,
    matrix: DMatrix<Complex64>,
    eigenvalues: Vec<f64>,
}

impl DensityOperator {
    pub fn new(basis: LabeledBasis, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != basis.dimension() {
            return Err(SimError::InvalidSpec(format!(
                "density matrix is {}x{} but basis dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dimension()
            )));
        }
        let defect = max_abs(&(&matrix - matrix.adjoint()));
        if defect > 1e-12 * max_abs(&matrix).max(1.0) {
            return Err(SimError::NumericalContract(format!(
                "density matrix Hermiticity defect {defect:.3e}"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > 1e-10 || trace.im.abs() > 1e-12 {
            return Err(SimError::NumericalContract(format!(
                "density matrix trace {trace} is not 1 within 1e-10"
            )));
        }
        let mut eigenvalues: Vec<f64> = SymmetricEigen::new(matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if eigenvalues.first().is_some_and(|&lo| lo < -1e-12) {
            return Err(SimError::NumericalContract(format!(
                "density matrix has negative eigenvalue {:.3e}",
                eigenvalues[0]
            )));
        }
        Ok(Self {
            basis,
            matrix,
            eigenvalues,
        })
    }

    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// Ascending real spectrum.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Tr(rho^2); 1 exactly for pure states.
    pub fn purity(&self) -> f64 {
        self.eigenvalues.iter().map(|l| l * l).sum()
    }

    pub fn entry(&self, row: &BasisLabel, col: &BasisLabel) -> Result<Complex64> {
        let r = self.basis.index_of(row)?;
        let c = self.basis.index_of(col)?;
        Ok(self.matrix[(r, c)])
    }
}

/// Single-acceptor density matrix of the two-level reduction, over
/// {|+1>, |-1>}: diag(|u_a|^2 / 2, 1 - |u_a|^2 / 2).
///
/// This is the literal two-state reduction used for the entropy map; the
/// variant including the acceptor ground state is `partial_trace`. Both
/// give entropy 1 bit at |u_a| = 1.
pub fn reduced_density_acceptor1(u_a: Complex64) -> Result<DensityOperator> {
    let p = u_a.norm_sqr();
    if p > 1.0 + 1e-10 {
        return Err(SimError::InvalidSpec(format!(
            "|u_a| = {} exceeds 1",
            u_a.norm()
        )));
    }
    let p = p.min(1.0);
    let basis = LabeledBasis::new(vec![
        BasisLabel::AcceptorEam(EamLabel(1)),
        BasisLabel::AcceptorEam(EamLabel(-1)),
    ])?;
    let mut rho = DMatrix::<Complex64>::zeros(2, 2);
    rho[(0, 0)] = Complex64::new(0.5 * p, 0.0);
    rho[(1, 1)] = Complex64::new(1.0 - 0.5 * p, 0.0);
    DensityOperator::new(basis, rho)
}

/// Which acceptor to keep when tracing a pair state.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    AcceptorOne,
    AcceptorTwo,
}

/// Partial trace of a pair-basis state down to one acceptor.
///
/// Supported factorizations: the EAM-pair basis (donor plus
/// AcceptorPairEam labels) and the arm-sector basis (donor arms plus
/// AcceptorPairArms labels). Donor amplitudes land on the kept acceptor's
/// ground label; the ground-to-excited coherences vanish identically
/// because the traced-out factors are orthogonal there.
pub fn partial_trace(psi: &StateVector, keep: Subsystem) -> Result<DensityOperator> {
    let labels = psi.basis().labels();
    let eam_like = labels
        .iter()
        .all(|l| matches!(l, BasisLabel::DonorEam(_) | BasisLabel::AcceptorPairEam(_, _)));
    let arm_like = labels
        .iter()
        .all(|l| matches!(l, BasisLabel::DonorArm(_) | BasisLabel::AcceptorPairArms(_, _)));
    if eam_like {
        partial_trace_eam(psi, keep)
    } else if arm_like {
        partial_trace_arm(psi, keep)
    } else {
        Err(SimError::UndeclaredFactorization(
            "basis has no declared tensor factorization; expected an EAM-pair or arm-pair basis"
                .into(),
        ))
    }
}

fn partial_trace_eam(psi: &StateVector, keep: Subsystem) -> Result<DensityOperator> {
    let labels = psi.basis().labels();
    let mut qs: Vec<i32> = labels
        .iter()
        .filter_map(|l| match l {
            BasisLabel::AcceptorPairEam(q1, _) => Some(q1.value()),
            _ => None,
        })
        .collect();
    qs.sort_unstable();
    qs.dedup();
    if qs.is_empty() {
        return Err(SimError::UndeclaredFactorization(
            "EAM basis contains no acceptor pair labels".into(),
        ));
    }
    let dim = qs.len() + 1;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut ground = 0.0f64;
    for (k, label) in labels.iter().enumerate() {
        if let BasisLabel::DonorEam(_) = label {
            ground += psi.amplitudes()[k].norm_sqr();
        }
    }
    rho[(0, 0)] = Complex64::new(ground, 0.0);
    let pos = |q: i32| 1 + qs.binary_search(&q).unwrap();
    for (k, label) in labels.iter().enumerate() {
        let BasisLabel::AcceptorPairEam(k1, k2) = label else {
            continue;
        };
        for (j, other) in labels.iter().enumerate() {
            let BasisLabel::AcceptorPairEam(j1, j2) = other else {
                continue;
            };
            let (row, col, traced_match) = match keep {
                Subsystem::AcceptorOne => (pos(k1.value()), pos(j1.value()), k2 == j2),
                Subsystem::AcceptorTwo => (pos(k2.value()), pos(j2.value()), k1 == j1),
            };
            if traced_match {
                rho[(row, col)] += psi.amplitudes()[k] * psi.amplitudes()[j].conj();
            }
        }
    }
    let mut out_labels = vec![BasisLabel::AcceptorGround];
    out_labels.extend(qs.into_iter().map(|q| BasisLabel::AcceptorEam(EamLabel(q))));
    DensityOperator::new(LabeledBasis::new(out_labels)?, rho)
}

fn partial_trace_arm(psi: &StateVector, keep: Subsystem) -> Result<DensityOperator> {
    let labels = psi.basis().labels();
    let mut arms: Vec<usize> = labels
        .iter()
        .filter_map(|l| match l {
            BasisLabel::AcceptorPairArms(s, _) => Some(*s),
            _ => None,
        })
        .collect();
    arms.sort_unstable();
    arms.dedup();
    if arms.is_empty() {
        return Err(SimError::UndeclaredFactorization(
            "arm basis contains no acceptor pair labels".into(),
        ));
    }
    let dim = arms.len() + 1;
    let mut rho = DMatrix::<Complex64>::zeros(dim, dim);
    let mut ground = 0.0f64;
    for (k, label) in labels.iter().enumerate() {
        if let BasisLabel::DonorArm(_) = label {
            ground += psi.amplitudes()[k].norm_sqr();
        }
    }
    rho[(0, 0)] = Complex64::new(ground, 0.0);
    let pos = |a: usize| 1 + arms.binary_search(&a).unwrap();
    for (k, label) in labels.iter().enumerate() {
        let BasisLabel::AcceptorPairArms(ks, kt) = label else {
            continue;
        };
        for (j, other) in labels.iter().enumerate() {
            let BasisLabel::AcceptorPairArms(js, jt) = other else {
                continue;
            };
            let (row, col, traced_match) = match keep {
                Subsystem::AcceptorOne => (pos(*ks), pos(*js), kt == jt),
                Subsystem::AcceptorTwo => (pos(*kt), pos(*jt), ks == js),
            };
            if traced_match {
                rho[(row, col)] += psi.amplitudes()[k] * psi.amplitudes()[j].conj();
            }
        }
    }
    let mut out_labels = vec![BasisLabel::AcceptorGround];
    out_labels.extend(arms.into_iter().map(BasisLabel::AcceptorArm));
    DensityOperator::new(LabeledBasis::new(out_labels)?, rho)
}

/// Von Neumann entropy in bits: -sum lambda log2 lambda over eigenvalues
/// above the cutoff. Bounded by log2(dim).
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    rho.eigenvalues()
        .iter()
        .filter(|&&l| l > ENTROPY_CUTOFF)
        .map(|&l| -l * l.log2())
        .sum()
}

/// Total population of a label group at every trajectory time.
///
/// The group must be nonempty and every label must exist in the
/// trajectory basis.
pub fn population_by_label(traj: &Trajectory, group: &[BasisLabel]) -> Result<Vec<f64>> {
    if group.is_empty() {
        return Err(SimError::EmptyGroup(
            "population group must name at least one label".into(),
        ));
    }
    let indices: Vec<usize> = group
        .iter()
        .map(|l| traj.basis().index_of(l))
        .collect::<Result<_>>()?;
    Ok(traj
        .states()
        .iter()
        .map(|s| indices.iter().map(|&i| s[i].norm_sqr()).sum())
        .collect())
}

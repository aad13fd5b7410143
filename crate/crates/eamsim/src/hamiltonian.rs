//! Labeled bases and Hamiltonian builders.
//!
//! Every Hamiltonian in scope is a dense complex Hermitian matrix whose
//! rows and columns carry physical labels: single-arm excitation
//! configurations, EAM mode pairs, the effective two-level (Bell, donor)
//! pair, or chain sites. Keeping the label list with the matrix makes
//! projections and population readouts self-describing.
//!
//! Matrix element conventions, fixed once for the whole crate:
//! the cutting term enters as `H[pair, donor] = coupling` with the
//! conjugate opposite it, and ring or chain hops enter as
//! `H[site, next_site] = hopping`. Mode energies follow the `|tau|`
//! convention, so the arm-to-EAM equivalences below hold in the gauge
//! where hoppings are real and nonnegative.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::SimError;
use crate::model::{eam_window, mode_energy, ChainSpec, EamLabel, TriadSpec};
use crate::observables::qc_matrix_element;
use crate::Result;

/// Physical identity of one basis vector.
///
/// Arm indices are 1-based around the ring; chain sites are 1-based away
/// from the donor. `BellPair` names the symmetric combination
/// (|+1,-1> + |-1,+1>)/sqrt(2) used by the effective two-level model.
/// The `Acceptor*` variants label single-acceptor subsystem bases produced
/// by partial traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BasisLabel {
    DonorArm(usize),
    AcceptorPairArms(usize, usize),
    DonorEam(EamLabel),
    AcceptorPairEam(EamLabel, EamLabel),
    BellPair,
    ChainDonor,
    ChainPair(usize),
    AcceptorGround,
    AcceptorEam(EamLabel),
    AcceptorArm(usize),
}

/// Variant families that may share one basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum LabelFamily {
    Arm,
    Eam,
    Chain,
    AcceptorSubsystem,
}

impl BasisLabel {
    fn family(&self) -> LabelFamily {
        match self {
            BasisLabel::DonorArm(_) | BasisLabel::AcceptorPairArms(_, _) => LabelFamily::Arm,
            BasisLabel::DonorEam(_) | BasisLabel::AcceptorPairEam(_, _) | BasisLabel::BellPair => {
                LabelFamily::Eam
            }
            BasisLabel::ChainDonor | BasisLabel::ChainPair(_) => LabelFamily::Chain,
            BasisLabel::AcceptorGround
            | BasisLabel::AcceptorEam(_)
            | BasisLabel::AcceptorArm(_) => LabelFamily::AcceptorSubsystem,
        }
    }

    /// True for donor-excitation labels in any family.
    pub fn is_donor(&self) -> bool {
        matches!(
            self,
            BasisLabel::DonorArm(_) | BasisLabel::DonorEam(_) | BasisLabel::ChainDonor
        )
    }
}

impl std::fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BasisLabel::DonorArm(j) => write!(f, "donor_arm_{j}"),
            BasisLabel::AcceptorPairArms(s, t) => write!(f, "pair_arms_{s}_{t}"),
            BasisLabel::DonorEam(q) => write!(f, "donor_eam_{q}"),
            BasisLabel::AcceptorPairEam(q1, q2) => write!(f, "pair_eam_{q1}_{q2}"),
            BasisLabel::BellPair => write!(f, "bell_pair"),
            BasisLabel::ChainDonor => write!(f, "chain_donor"),
            BasisLabel::ChainPair(n) => write!(f, "chain_pair_{n}"),
            BasisLabel::AcceptorGround => write!(f, "acceptor_ground"),
            BasisLabel::AcceptorEam(q) => write!(f, "acceptor_eam_{q}"),
            BasisLabel::AcceptorArm(j) => write!(f, "acceptor_arm_{j}"),
        }
    }
}

/// Ordered list of distinct labels with O(1) label-to-index lookup.
#[derive(Debug, Clone)]
pub struct LabeledBasis {
    labels: Vec<BasisLabel>,
    index: HashMap<BasisLabel, usize>,
}

impl LabeledBasis {
    /// Labels must be nonempty, pairwise distinct, and from one family.
    pub fn new(labels: Vec<BasisLabel>) -> Result<Self> {
        if labels.is_empty() {
            return Err(SimError::InvalidSpec("basis must be nonempty".into()));
        }
        let family = labels[0].family();
        let mut index = HashMap::with_capacity(labels.len());
        for (k, &label) in labels.iter().enumerate() {
            if label.family() != family {
                return Err(SimError::InvalidSpec(format!(
                    "basis mixes label families at {label}"
                )));
            }
            if index.insert(label, k).is_some() {
                return Err(SimError::InvalidSpec(format!(
                    "duplicate basis label {label}"
                )));
            }
        }
        Ok(Self { labels, index })
    }

    pub fn dimension(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[BasisLabel] {
        &self.labels
    }

    pub fn position(&self, label: &BasisLabel) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn index_of(&self, label: &BasisLabel) -> Result<usize> {
        self.position(label)
            .ok_or_else(|| SimError::BasisMismatch(format!("label {label} not in basis")))
    }
}

impl PartialEq for LabeledBasis {
    fn eq(&self, other: &Self) -> bool {
        self.labels == other.labels
    }
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0f64, |acc, z| acc.max(z.norm()))
}

/// Dense Hermitian matrix over a labeled basis.
///
/// Hermiticity is enforced at construction:
/// max |H - H^dagger| <= 1e-12 * max(1, max |H|).
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    basis: LabeledBasis,
    matrix: DMatrix<Complex64>,
}

impl HermitianOperator {
    pub fn new(basis: LabeledBasis, matrix: DMatrix<Complex64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() || matrix.nrows() != basis.dimension() {
            return Err(SimError::InvalidSpec(format!(
                "matrix is {}x{} but basis dimension is {}",
                matrix.nrows(),
                matrix.ncols(),
                basis.dimension()
            )));
        }
        let defect = max_abs(&(&matrix - matrix.adjoint()));
        let scale = max_abs(&matrix).max(1.0);
        if defect > 1e-12 * scale {
            return Err(SimError::NumericalContract(format!(
                "matrix is not Hermitian: defect {defect:.3e} exceeds 1e-12 * {scale:.3e}"
            )));
        }
        Ok(Self { basis, matrix })
    }

    pub fn basis(&self) -> &LabeledBasis {
        &self.basis
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn entry(&self, row: &BasisLabel, col: &BasisLabel) -> Result<Complex64> {
        let r = self.basis.index_of(row)?;
        let c = self.basis.index_of(col)?;
        Ok(self.matrix[(r, c)])
    }
}

/// Cyclic nearest-neighbor edges (j, j+1) of an N-ring, each once.
fn ring_edges(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=n).map(move |j| (j, j % n + 1))
}

/// Canonical arm-sector basis: donor arms, then acceptor pairs in
/// lexicographic (s, t) order.
pub fn arm_basis(arm_count: usize) -> Result<LabeledBasis> {
    eam_window(arm_count)?;
    let mut labels = Vec::with_capacity(arm_count + arm_count * arm_count);
    for j in 1..=arm_count {
        labels.push(BasisLabel::DonorArm(j));
    }
    for s in 1..=arm_count {
        for t in 1..=arm_count {
            labels.push(BasisLabel::AcceptorPairArms(s, t));
        }
    }
    LabeledBasis::new(labels)
}

/// Canonical EAM-pair basis: the zero-EAM donor, then pairs in
/// lexicographic (q1, q2) order over the ascending window.
pub fn eam_pair_basis(arm_count: usize) -> Result<LabeledBasis> {
    let window = eam_window(arm_count)?;
    let mut labels = Vec::with_capacity(1 + arm_count * arm_count);
    labels.push(BasisLabel::DonorEam(EamLabel(0)));
    for &q1 in &window {
        for &q2 in &window {
            labels.push(BasisLabel::AcceptorPairEam(q1, q2));
        }
    }
    LabeledBasis::new(labels)
}

/// Canonical chain basis: donor, then pairs by distance.
pub fn chain_basis(half_length: usize) -> Result<LabeledBasis> {
    if half_length < 1 {
        return Err(SimError::InvalidSpec(
            "chain half_length must be at least 1".into(),
        ));
    }
    let mut labels = Vec::with_capacity(half_length + 1);
    labels.push(BasisLabel::ChainDonor);
    for n in 1..=half_length {
        labels.push(BasisLabel::ChainPair(n));
    }
    LabeledBasis::new(labels)
}

/// Single-excitation triad Hamiltonian in the arm-configuration basis,
/// dimension N + N^2.
///
/// Donor arms carry the bare energy delta_0 and acceptor pair
/// configurations 2*delta_1; tau_0 and tau_1 hop around the donor and
/// acceptor rings; the cutting element M connects each donor arm j to the
/// matching pair (j, j). The detuning factor of the reduced models does
/// not appear here: it parameterizes donor energy relative to resonance,
/// which in this basis is encoded by delta_0 itself.
pub fn build_arm_sector(spec: &TriadSpec) -> Result<HermitianOperator> {
    let n = spec.arm_count();
    let basis = arm_basis(n)?;
    let dim = basis.dimension();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);

    let donor = spec.donor();
    let acceptor = spec.acceptor();
    let idx_d = |j: usize| j - 1;
    let idx_p = |s: usize, t: usize| n + (s - 1) * n + (t - 1);

    for j in 1..=n {
        h[(idx_d(j), idx_d(j))] = Complex64::new(donor.delta(), 0.0);
    }
    for s in 1..=n {
        for t in 1..=n {
            h[(idx_p(s, t), idx_p(s, t))] = Complex64::new(2.0 * acceptor.delta(), 0.0);
        }
    }
    for (a, b) in ring_edges(n) {
        h[(idx_d(a), idx_d(b))] += donor.tau();
        h[(idx_d(b), idx_d(a))] += donor.tau().conj();
    }
    for (a, b) in ring_edges(n) {
        for t in 1..=n {
            h[(idx_p(a, t), idx_p(b, t))] += acceptor.tau();
            h[(idx_p(b, t), idx_p(a, t))] += acceptor.tau().conj();
        }
        for s in 1..=n {
            h[(idx_p(s, a), idx_p(s, b))] += acceptor.tau();
            h[(idx_p(s, b), idx_p(s, a))] += acceptor.tau().conj();
        }
    }
    for j in 1..=n {
        h[(idx_p(j, j), idx_d(j))] = spec.qc_element();
        h[(idx_d(j), idx_p(j, j))] = spec.qc_element().conj();
    }

    HermitianOperator::new(basis, h)
}

/// Reduced cutting Hamiltonian over EAM labels, dimension N^2 + 1.
///
/// The donor sits at detuning * mode_energy(donor, 0); each pair (q1, q2)
/// at the sum of its mode energies; the only off-diagonal elements are the
/// selection-rule couplings between donor and pairs.
pub fn build_eam_pair(spec: &TriadSpec) -> Result<HermitianOperator> {
    let n = spec.arm_count();
    let basis = eam_pair_basis(n)?;
    let dim = basis.dimension();
    let mut h = DMatrix::<Complex64>::zeros(dim, dim);

    h[(0, 0)] = Complex64::new(
        spec.detuning() * mode_energy(spec.donor(), EamLabel(0))?,
        0.0,
    );
    let window = eam_window(n)?;
    let mut k = 1;
    for &q1 in &window {
        for &q2 in &window {
            let e = mode_energy(spec.acceptor(), q1)? + mode_energy(spec.acceptor(), q2)?;
            h[(k, k)] = Complex64::new(e, 0.0);
            let v = qc_matrix_element(q1, q2, spec.qc_element(), n)?;
            h[(k, 0)] = v;
            h[(0, k)] = v.conj();
            k += 1;
        }
    }

    HermitianOperator::new(basis, h)
}

/// Effective two-level Hamiltonian over (Bell pair, donor), three arms
/// only:
///
/// ```text
/// [ 2 E_1^1            M sqrt(2/3)         ]
/// [ conj(M) sqrt(2/3)  detuning * 2 E_1^1  ]
/// ```
///
/// The Bell-pair diagonal holds the resonant pair energy; the donor
/// diagonal is parameterized relative to it by the detuning factor.
pub fn build_two_level(spec: &TriadSpec) -> Result<HermitianOperator> {
    if spec.arm_count() != 3 {
        return Err(SimError::UnsupportedArmCount(spec.arm_count()));
    }
    let basis = LabeledBasis::new(vec![
        BasisLabel::BellPair,
        BasisLabel::DonorEam(EamLabel(0)),
    ])?;
    let e11 = mode_energy(spec.acceptor(), EamLabel(1))?;
    let g = spec.qc_element() * (2.0f64 / 3.0).sqrt();
    let mut h = DMatrix::<Complex64>::zeros(2, 2);
    h[(0, 0)] = Complex64::new(2.0 * e11, 0.0);
    h[(0, 1)] = g;
    h[(1, 0)] = g.conj();
    h[(1, 1)] = Complex64::new(spec.detuning() * 2.0 * e11, 0.0);
    HermitianOperator::new(basis, h)
}

/// Donor-to-Bell coupling used by the chain model, matching the
/// two-level reduction.
pub fn chain_coupling_default(spec: &TriadSpec) -> Complex64 {
    spec.qc_element() * (2.0f64 / 3.0).sqrt()
}

/// Acceptor-pair chain with the donor feeding site 1, dimension L + 1.
///
/// Tridiagonal: the donor diagonal is detuning * 2 E_1^1, every pair site
/// sits at 2 E_1^1, eta hops between adjacent pair sites, and the donor
/// couples to pair 1 with the two-level coupling M sqrt(2/3). Only the
/// acceptor molecule, detuning, and cutting element of the triad enter;
/// the donor ring parameters are encoded through the detuning factor.
pub fn build_chain(spec: &ChainSpec) -> Result<HermitianOperator> {
    build_chain_with_coupling(spec, chain_coupling_default(spec.triad()))
}

/// Chain builder with an explicit donor-to-site-1 coupling, for variant
/// coupling conventions.
pub fn build_chain_with_coupling(spec: &ChainSpec, g: Complex64) -> Result<HermitianOperator> {
    let triad = spec.triad();
    if triad.arm_count() != 3 {
        return Err(SimError::UnsupportedArmCount(triad.arm_count()));
    }
    let l = spec.half_length();
    let basis = chain_basis(l)?;
    let e11 = mode_energy(triad.acceptor(), EamLabel(1))?;
    let pair = Complex64::new(2.0 * e11, 0.0);
    let mut h = DMatrix::<Complex64>::zeros(l + 1, l + 1);
    h[(0, 0)] = Complex64::new(triad.detuning(), 0.0) * pair;
    for k in 1..=l {
        h[(k, k)] = pair;
    }
    h[(1, 0)] = g;
    h[(0, 1)] = g.conj();
    for k in 1..l {
        h[(k, k + 1)] = spec.eta();
        h[(k + 1, k)] = spec.eta().conj();
    }
    HermitianOperator::new(basis, h)
}

/// Isometry from the EAM-pair basis into the arm basis, N + N^2 rows by
/// N^2 + 1 columns.
///
/// The donor column spreads the zero-EAM mode uniformly over donor arms;
/// the (q1, q2) column carries the twisted-exciton phases
/// e^{i 2 pi [(s-1) q1 + (t-1) q2] / N} / N over pair configurations.
/// Columns are orthonormal, so U^dagger U = I.
pub fn eam_pair_embedding(arm_count: usize) -> Result<DMatrix<Complex64>> {
    let window = eam_window(arm_count)?;
    let n = arm_count;
    let rows = n + n * n;
    let cols = 1 + n * n;
    let mut u = DMatrix::<Complex64>::zeros(rows, cols);
    let root_n = (n as f64).sqrt();
    for j in 0..n {
        u[(j, 0)] = Complex64::new(1.0 / root_n, 0.0);
    }
    let mut col = 1;
    for &q1 in &window {
        for &q2 in &window {
            for s in 1..=n {
                for t in 1..=n {
                    let row = n + (s - 1) * n + (t - 1);
                    let phase = std::f64::consts::TAU
                        * (((s - 1) as i32 * q1.value() + (t - 1) as i32 * q2.value()) as f64)
                        / n as f64;
                    u[(row, col)] = Complex64::from_polar(1.0 / n as f64, phase);
                }
            }
            col += 1;
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{resonant_donor_delta, MoleculeSpec};
    use crate::observables::qc_matrix_element_brute_force;
    use approx::assert_abs_diff_eq;
    use nalgebra::SymmetricEigen;
    use proptest::prelude::*;

    fn triad(n: usize, d0: f64, t0: f64, d1: f64, t1: f64, m: Complex64, g: f64) -> TriadSpec {
        let donor = MoleculeSpec::new(n, d0, Complex64::new(t0, 0.0)).unwrap();
        let acceptor = MoleculeSpec::new(n, d1, Complex64::new(t1, 0.0)).unwrap();
        TriadSpec::new(donor, acceptor, m, g).unwrap()
    }

    #[test]
    fn arm_sector_dimensions() {
        let h3 = build_arm_sector(&triad(3, 2.0, 0.1, 1.0, 0.1, Complex64::ZERO, 1.0)).unwrap();
        assert_eq!(h3.dimension(), 12);
        let h5 = build_arm_sector(&triad(5, 2.0, 0.1, 1.0, 0.1, Complex64::ZERO, 1.0)).unwrap();
        assert_eq!(h5.dimension(), 30);
        assert_eq!(h3.basis().labels()[0], BasisLabel::DonorArm(1));
        assert_eq!(h3.basis().labels()[3], BasisLabel::AcceptorPairArms(1, 1));
        assert_eq!(h3.basis().labels()[11], BasisLabel::AcceptorPairArms(3, 3));
    }

    #[test]
    fn arm_sector_decoupled_is_diagonal() {
        let h = build_arm_sector(&triad(3, 1.7, 0.0, 0.9, 0.0, Complex64::ZERO, 1.0)).unwrap();
        let m = h.matrix();
        for r in 0..12 {
            for c in 0..12 {
                if r == c {
                    let expect = if r < 3 { 1.7 } else { 1.8 };
                    assert_abs_diff_eq!(m[(r, c)].re, expect, epsilon = 1e-15);
                    assert_abs_diff_eq!(m[(r, c)].im, 0.0, epsilon = 1e-15);
                } else {
                    assert_eq!(m[(r, c)], Complex64::ZERO);
                }
            }
        }
    }

    #[test]
    fn arm_sector_coupling_placement() {
        let m = Complex64::new(0.05, 0.02);
        let h = build_arm_sector(&triad(3, 2.0, 0.07, 1.0, 0.11, m, 1.0)).unwrap();
        let d = |j| BasisLabel::DonorArm(j);
        let p = |s, t| BasisLabel::AcceptorPairArms(s, t);
        assert_eq!(h.entry(&p(2, 2), &d(2)).unwrap(), m);
        assert_eq!(h.entry(&d(1), &p(1, 1)).unwrap(), m.conj());
        assert_eq!(h.entry(&p(1, 2), &d(1)).unwrap(), Complex64::ZERO);
        assert_abs_diff_eq!(h.entry(&d(1), &d(2)).unwrap().re, 0.07, epsilon = 1e-15);
        assert_abs_diff_eq!(h.entry(&d(3), &d(1)).unwrap().re, 0.07, epsilon = 1e-15);
        assert_abs_diff_eq!(
            h.entry(&p(1, 2), &p(2, 2)).unwrap().re,
            0.11,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            h.entry(&p(1, 1), &p(1, 2)).unwrap().re,
            0.11,
            epsilon = 1e-15
        );
        assert_eq!(h.entry(&p(1, 1), &p(2, 2)).unwrap(), Complex64::ZERO);
    }

    #[test]
    fn eam_pair_dimensions() {
        let t3 = triad(3, 2.0, 0.0, 1.0, 0.1, Complex64::new(0.05, 0.0), 1.0);
        assert_eq!(build_eam_pair(&t3).unwrap().dimension(), 10);
        let t5 = triad(5, 2.0, 0.0, 1.0, 0.1, Complex64::new(0.05, 0.0), 1.0);
        assert_eq!(build_eam_pair(&t5).unwrap().dimension(), 26);
    }

    #[test]
    fn eam_pair_donor_row_follows_selection_rule() {
        let m = Complex64::new(0.3, 0.0);
        let spec = triad(3, 2.0, 0.0, 1.0, 0.1, m, 1.0);
        let h = build_eam_pair(&spec).unwrap();
        let donor = BasisLabel::DonorEam(EamLabel(0));
        let mut nonzero = Vec::new();
        for &label in h.basis().labels().iter().skip(1) {
            let v = h.entry(&label, &donor).unwrap();
            if v.norm() > 1e-14 {
                nonzero.push(label);
                let BasisLabel::AcceptorPairEam(q1, q2) = label else {
                    panic!("unexpected label {label}");
                };
                let oracle = qc_matrix_element_brute_force(q1, q2, m, 3);
                assert_abs_diff_eq!(v.re, oracle.re, epsilon = 1e-14);
                assert_abs_diff_eq!(v.im, oracle.im, epsilon = 1e-14);
                assert_abs_diff_eq!(v.re, 0.3 * 0.5773502691896258, epsilon = 1e-14);
            }
        }
        assert_eq!(
            nonzero,
            vec![
                BasisLabel::AcceptorPairEam(EamLabel(-1), EamLabel(1)),
                BasisLabel::AcceptorPairEam(EamLabel(0), EamLabel(0)),
                BasisLabel::AcceptorPairEam(EamLabel(1), EamLabel(-1)),
            ]
        );
    }

    #[test]
    fn eam_pair_diagonal_energies() {
        let spec = triad(5, 2.1, 0.03, 1.0, 1.0 / 15.0, Complex64::ZERO, 1.3);
        let h = build_eam_pair(&spec).unwrap();
        let donor = BasisLabel::DonorEam(EamLabel(0));
        assert_abs_diff_eq!(
            h.entry(&donor, &donor).unwrap().re,
            1.3 * (2.1 + 2.0 * 0.03),
            epsilon = 1e-14
        );
        let pair = BasisLabel::AcceptorPairEam(EamLabel(2), EamLabel(-1));
        let e2 = mode_energy(spec.acceptor(), EamLabel(2)).unwrap();
        let e1 = mode_energy(spec.acceptor(), EamLabel(-1)).unwrap();
        assert_abs_diff_eq!(h.entry(&pair, &pair).unwrap().re, e2 + e1, epsilon = 1e-14);
        // Pair-to-pair elements vanish: no direct EAM redistribution.
        let other = BasisLabel::AcceptorPairEam(EamLabel(1), EamLabel(-1));
        assert_eq!(h.entry(&pair, &other).unwrap(), Complex64::ZERO);
    }

    #[test]
    fn two_level_matrix_values() {
        // E_1^1 = 1.2 - 0.2 = 1, so the diagonal is 2 exactly.
        let spec = triad(3, 2.0, 0.0, 1.2, 0.2, Complex64::new(0.3, 0.0), 1.0);
        assert_abs_diff_eq!(
            mode_energy(spec.acceptor(), EamLabel(1)).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        let h = build_two_level(&spec).unwrap();
        let m = h.matrix();
        assert_abs_diff_eq!(m[(0, 0)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(1, 1)].re, 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m[(0, 1)].re, 0.2449489742783178, epsilon = 1e-15);
        assert_abs_diff_eq!(m[(1, 0)].re, 0.2449489742783178, epsilon = 1e-15);
        assert_eq!(
            h.basis().labels(),
            &[BasisLabel::BellPair, BasisLabel::DonorEam(EamLabel(0))]
        );
    }

    #[test]
    fn two_level_decoupled_and_gap() {
        let spec0 = triad(3, 2.0, 0.0, 1.5, 0.25, Complex64::ZERO, 1.2);
        let h0 = build_two_level(&spec0).unwrap();
        assert_eq!(h0.matrix()[(0, 1)], Complex64::ZERO);

        let spec = triad(3, 2.0, 0.0, 1.5, 0.25, Complex64::new(0.3, 0.0), 1.0);
        let h = build_two_level(&spec).unwrap();
        let eig = SymmetricEigen::new(h.matrix().clone());
        let gap = (eig.eigenvalues[0] - eig.eigenvalues[1]).abs();
        assert_abs_diff_eq!(gap, 0.4898979485566356, epsilon = 1e-12);
    }

    #[test]
    fn two_level_rejects_five_arms() {
        let spec = triad(5, 2.0, 0.0, 1.0, 0.1, Complex64::ZERO, 1.0);
        assert!(matches!(
            build_two_level(&spec),
            Err(SimError::UnsupportedArmCount(5))
        ));
    }

    #[test]
    fn chain_single_pair_matches_two_level_under_reorder() {
        let m = Complex64::new(0.04, 0.015);
        let spec = triad(3, 1.5, 0.0, 1.0, 0.2, m, 1.08);
        let chain = ChainSpec::new(spec, 1, Complex64::new(0.3, 0.0)).unwrap();
        let hc = build_chain(&chain).unwrap();
        let ht = build_two_level(&spec).unwrap();
        // Chain order is (donor, pair); two-level order is (Bell, donor).
        assert_eq!(hc.matrix()[(0, 0)], ht.matrix()[(1, 1)]);
        assert_eq!(hc.matrix()[(1, 1)], ht.matrix()[(0, 0)]);
        assert_eq!(hc.matrix()[(1, 0)], ht.matrix()[(0, 1)]);
        assert_eq!(hc.matrix()[(0, 1)], ht.matrix()[(1, 0)]);
    }

    #[test]
    fn chain_structure() {
        let eta = Complex64::new(1.0, 0.0);
        let spec = triad(3, 1.0, 0.0, 0.75, 0.25, eta / 6.0, 1.0);
        // E_1^1 = 0.75 - 0.25 = 0.5 = eta / 2.
        let chain = ChainSpec::new(spec, 60, eta).unwrap();
        let h = build_chain(&chain).unwrap();
        assert_eq!(h.dimension(), 61);
        let m = h.matrix();
        for r in 0..61 {
            for c in 0..61 {
                let v = m[(r, c)];
                if r == c {
                    assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
                } else if r.abs_diff(c) == 1 {
                    assert!(v.norm() > 0.0);
                } else {
                    assert_eq!(v, Complex64::ZERO);
                }
            }
        }
        assert_abs_diff_eq!(m[(2, 1)].re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            m[(1, 0)].norm(),
            (1.0 / 6.0) * (2.0f64 / 3.0).sqrt(),
            epsilon = 1e-15
        );
    }

    #[test]
    fn chain_zero_eta_decouples_sites() {
        let spec = triad(3, 1.0, 0.0, 1.0, 0.1, Complex64::new(0.05, 0.0), 1.0);
        let chain = ChainSpec::new(spec, 4, Complex64::ZERO).unwrap();
        let h = build_chain(&chain).unwrap();
        for k in 1..4 {
            assert_eq!(h.matrix()[(k, k + 1)], Complex64::ZERO);
        }
        assert!(h.matrix()[(1, 0)].norm() > 0.0);
    }

    #[test]
    fn chain_literal_coupling_override() {
        let m = Complex64::new(0.05, 0.0);
        let spec = triad(3, 1.0, 0.0, 1.0, 0.1, m, 1.0);
        let chain = ChainSpec::new(spec, 3, Complex64::new(0.2, 0.0)).unwrap();
        let h = build_chain_with_coupling(&chain, m * 3.0).unwrap();
        assert_abs_diff_eq!(h.matrix()[(1, 0)].re, 0.15, epsilon = 1e-15);
    }

    /// The unitary change of basis from arm configurations to EAM labels
    /// must reproduce the reduced model entry for entry: this pins the
    /// selection rule and the mode energies to the microscopic model.
    #[test]
    fn eam_model_is_arm_model_in_twisted_basis() {
        for n in [3usize, 5] {
            let m = Complex64::from_polar(0.02, 0.45);
            let d1 = 1.0;
            let t1 = 0.08;
            let t0 = 0.03;
            let acceptor = MoleculeSpec::new(n, d1, Complex64::new(t1, 0.0)).unwrap();
            let d0 = resonant_donor_delta(&acceptor, Complex64::new(t0, 0.0));
            let donor = MoleculeSpec::new(n, d0, Complex64::new(t0, 0.0)).unwrap();
            let spec = TriadSpec::new(donor, acceptor, m, 1.0).unwrap();

            let arm = build_arm_sector(&spec).unwrap();
            let eam = build_eam_pair(&spec).unwrap();
            let u = eam_pair_embedding(n).unwrap();

            let iso = u.adjoint() * &u;
            let dim = 1 + n * n;
            assert!(max_abs(&(&iso - DMatrix::<Complex64>::identity(dim, dim))) < 1e-13);

            let projected = u.adjoint() * arm.matrix() * &u;
            let defect = max_abs(&(&projected - eam.matrix()));
            assert!(defect < 1e-12, "N={n}: defect {defect:.3e}");
        }
    }

    /// The 2x2 restriction of the reduced model to (Bell, donor) is the
    /// two-level matrix, for any detuning, once the donor ring is anchored
    /// at resonance.
    #[test]
    fn two_level_is_eam_model_bell_block() {
        let m = Complex64::new(0.07, -0.01);
        let acceptor = MoleculeSpec::new(3, 1.0, Complex64::new(0.1, 0.0)).unwrap();
        let d0 = resonant_donor_delta(&acceptor, Complex64::ZERO);
        let donor = MoleculeSpec::new(3, d0, Complex64::ZERO).unwrap();
        for gamma in [1.0, 1.3, 0.8] {
            let spec = TriadSpec::new(donor, acceptor, m, gamma).unwrap();
            let eam = build_eam_pair(&spec).unwrap();
            let two = build_two_level(&spec).unwrap();

            let dim = eam.dimension();
            let mut bell = DMatrix::<Complex64>::zeros(dim, 1);
            let b = eam.basis();
            let i_pm = b
                .index_of(&BasisLabel::AcceptorPairEam(EamLabel(1), EamLabel(-1)))
                .unwrap();
            let i_mp = b
                .index_of(&BasisLabel::AcceptorPairEam(EamLabel(-1), EamLabel(1)))
                .unwrap();
            let r = Complex64::new(1.0 / 2.0f64.sqrt(), 0.0);
            bell[(i_pm, 0)] = r;
            bell[(i_mp, 0)] = r;
            let mut donor_vec = DMatrix::<Complex64>::zeros(dim, 1);
            donor_vec[(0, 0)] = Complex64::ONE;

            let hb = eam.matrix() * &bell;
            let hd = eam.matrix() * &donor_vec;
            let bb = (bell.adjoint() * &hb)[(0, 0)];
            let bd = (bell.adjoint() * &hd)[(0, 0)];
            let dd = (donor_vec.adjoint() * &hd)[(0, 0)];
            assert!((bb - two.matrix()[(0, 0)]).norm() < 1e-12);
            assert!((bd - two.matrix()[(0, 1)]).norm() < 1e-12);
            assert!((dd - two.matrix()[(1, 1)]).norm() < 1e-12);
        }
    }

    #[test]
    fn basis_rejects_duplicates_and_mixed_families() {
        assert!(LabeledBasis::new(vec![
            BasisLabel::ChainDonor,
            BasisLabel::ChainPair(1),
            BasisLabel::ChainPair(1)
        ])
        .is_err());
        assert!(LabeledBasis::new(vec![
            BasisLabel::ChainDonor,
            BasisLabel::DonorArm(1)
        ])
        .is_err());
        assert!(LabeledBasis::new(vec![]).is_err());
    }

    #[test]
    fn basis_index_round_trip() {
        let b = eam_pair_basis(5).unwrap();
        for (k, label) in b.labels().iter().enumerate() {
            assert_eq!(b.index_of(label).unwrap(), k);
        }
        assert!(b.index_of(&BasisLabel::ChainDonor).is_err());
    }

    proptest! {
        /// No assembly path may drop a conjugate: constructors enforce
        /// Hermiticity, so success here is the property.
        #[test]
        fn builders_produce_hermitian_matrices(
            n in prop::sample::select(vec![3usize, 5]),
            d0 in -2.0f64..4.0,
            d1 in 0.5f64..2.0,
            t0 in proptest::array::uniform2(-0.5f64..0.5),
            t1 in proptest::array::uniform2(-0.5f64..0.5),
            m in proptest::array::uniform2(-0.5f64..0.5),
            gamma in 0.5f64..1.5,
        ) {
            let donor = MoleculeSpec::new(n, d0, Complex64::new(t0[0], t0[1])).unwrap();
            let acceptor = MoleculeSpec::new(n, d1, Complex64::new(t1[0], t1[1])).unwrap();
            let spec = TriadSpec::new(donor, acceptor, Complex64::new(m[0], m[1]), gamma).unwrap();
            prop_assert!(build_arm_sector(&spec).is_ok());
            prop_assert!(build_eam_pair(&spec).is_ok());
            if n == 3 {
                prop_assert!(build_two_level(&spec).is_ok());
                let chain = ChainSpec::new(spec, 7, Complex64::new(t1[0], -t1[1])).unwrap();
                prop_assert!(build_chain(&chain).is_ok());
            }
        }
    }
}

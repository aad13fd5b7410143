use thiserror::Error;

/// Errors surfaced by the simulator library.
///
/// The CLI maps these to exit codes: configuration problems exit with 2,
/// numerical-contract violations with 3.
#[derive(Debug, Error)]
pub enum SimError {
    /// Arm counts must be odd and at least 3; the EAM window
    /// {-(N-1)/2, ..., (N-1)/2} is only integer-consistent for odd N.
    #[error("unsupported arm count {0}: must be odd and >= 3")]
    UnsupportedArmCount(usize),

    /// An EAM label outside the window for the given arm count.
    #[error("EAM q={q} outside the window for {arm_count} arms")]
    EamOutsideWindow { q: i32, arm_count: usize },

    /// A parameter set that violates a model invariant.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// A state vector was paired with an operator over a different basis.
    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    /// An operation received a basis it has no tensor factorization for.
    #[error("no declared tensor factorization: {0}")]
    UndeclaredFactorization(String),

    /// A label grouping selected nothing.
    #[error("empty label group: {0}")]
    EmptyGroup(String),

    /// Scenario configuration errors, with file/line diagnostics when the
    /// problem comes from a config file.
    #[error("config error: {0}")]
    Config(String),

    /// A numerical invariant (Hermiticity, unitarity, positivity, norm
    /// conservation) failed beyond tolerance.
    #[error("numerical contract violated: {0}")]
    NumericalContract(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl SimError {
    /// CLI exit code for this error class.
    pub fn exit_code(&self) -> i32 {
        match self {
            SimError::NumericalContract(_) => 3,
            SimError::Io(_) => 1,
            _ => 2,
        }
    }
}

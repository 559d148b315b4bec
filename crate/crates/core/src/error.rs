use thiserror::Error;

/// Errors raised by state construction, projection and the photonic pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("domain error: {0}")]
    Domain(String),

    /// A linear combination (or filter output) has vanishing norm.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A projection or filter annihilated the state.
    #[error("state annihilated: outcome probability {probability:.3e} is below threshold")]
    Annihilated { probability: f64 },

    /// A four-qubit state is not a combination of |GHZ4+> and |D4^(2)>.
    #[error("state is outside the GHZ4+/D4^(2) family (residual {residual:.3e})")]
    NotInFamily { residual: f64 },

    /// The requested retargeting crosses between the two SLOCC classes of Delta5.
    #[error("not retargetable: {0}")]
    NotRetargetable(String),

    /// No term of the Fock expansion produces the requested coincidence.
    #[error("postselection is empty: the coincidence pattern has zero probability")]
    EmptyPostselection,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for validation failures, false for degenerate/annihilation outcomes.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::NotInFamily { .. } | Error::NotRetargetable(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

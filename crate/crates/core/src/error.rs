use crate::lattice::Site;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("alphabet must have between 2 and 255 symbols, got {0}")]
    InvalidAlphabet(usize),

    #[error("invalid interaction: {0}")]
    InvalidInteraction(String),

    #[error("inconsistent concatenation at {0}")]
    InconsistentConcatenation(Site),

    #[error("point not in X_Phi: forbidden edge at {0}")]
    PointNotInSft(Site),

    #[error("invalid periodic point: {0}")]
    InvalidPoint(String),

    #[error("invalid constrained region: {0}")]
    InvalidRegion(String),

    #[error("SSF prerequisite failed")]
    SsfPrerequisiteFailed,

    #[error("boundary condition inadmissible")]
    BoundaryInadmissible,

    #[error("empty canopy ensemble")]
    EmptyCanopyEnsemble,

    #[error("positivity violated at {0}: conditional lower bound is 0")]
    PositivityViolated(Site),

    #[error("budget exceeded for {what}: requires {required}, limit {limit}")]
    BudgetExceeded {
        what: &'static str,
        required: f64,
        limit: u64,
    },

    #[error("sampling failed: {0}")]
    SamplingFailed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for errors that signal the model or point violates a hypothesis
    /// of the estimator (as opposed to usage or resource errors).
    pub fn is_hypothesis_failure(&self) -> bool {
        matches!(
            self,
            Error::EmptyCanopyEnsemble
                | Error::PositivityViolated(_)
                | Error::SsfPrerequisiteFailed
                | Error::BoundaryInadmissible
                | Error::PointNotInSft(_)
        )
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

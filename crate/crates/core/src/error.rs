use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// The variants are grouped so that callers (the CLI in particular) can map
/// them onto distinct exit codes: domain violations, bracketing failures and
/// convergence failures are never conflated.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ElasticaError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("p = {p} is not admissible for {space} (need {requirement})")]
    InadmissibleExponent {
        p: f64,
        space: &'static str,
        requirement: &'static str,
    },

    #[error("a = {a} lies outside the admissible window ({a_star}, 0)")]
    OutsideWindow { a: f64, a_star: f64 },

    #[error("a = {a} is within {gap:e} of a_* = {a_star}; the curve degenerates to the circle solution")]
    CircleDegenerate { a: f64, a_star: f64, gap: f64 },

    #[error("could not bracket {what}: {detail}")]
    Bracket { what: &'static str, detail: String },

    #[error("{what} did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence {
        what: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("(n, m) = ({n}, {m}) violates closure window: {reason}")]
    ClosureWindow { n: u32, m: u32, reason: &'static str },

    #[error("numerical guard tripped: {0}")]
    Guard(String),
}

impl ElasticaError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        ElasticaError::Domain(msg.into())
    }

    /// True for failures of an iterative method rather than bad input.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            ElasticaError::NoConvergence { .. } | ElasticaError::Bracket { .. } | ElasticaError::Guard(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, ElasticaError>;

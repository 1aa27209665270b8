use thiserror::Error;

/// Errors raised by the susceptibility engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("singular denominator {which}: |{which}| = {magnitude:e}")]
    SingularDenominator { which: &'static str, magnitude: f64 },

    #[error("Zeeman splittings are equal (B' = B); delta_0 is undefined")]
    DegenerateSplitting,

    #[error("zeroth-order steady state is not unique (singular-value gap {gap:e})")]
    DegenerateSteadyState { gap: f64 },

    #[error("probe-control beat frequency omega_12 = {omega12:e} is zero; sidebands merge with the DC harmonic")]
    ResonantDegeneracy { omega12: f64 },

    #[error("trace drifted by {drift:e} at t = {time}; reduce the step size")]
    TraceDrift { drift: f64, time: f64 },

    #[error("demodulation did not converge: half-window estimates differ by {relative:e} (tolerance {tolerance:e})")]
    NonConvergence { relative: f64, tolerance: f64 },

    #[error("trajectory does not cover a full demodulation period")]
    ShortTrajectory,
}

impl Error {
    /// True for errors caused by rejected inputs rather than numerical breakdown.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }

    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

/// Errors raised by the simulator.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("N_s must be odd (got {0})")]
    EvenSlabWidth(usize),

    #[error("inconsistent termination: {0}")]
    InconsistentTermination(String),

    #[error("near-degeneracy: gap {gap:.3e} below tolerance at k = {k:?}")]
    NearDegeneracy { k: Vec<f64>, gap: f64 },

    #[error("gapless spectrum: minimum gap {0:.3e}")]
    Gapless(f64),

    #[error("parameters lie on a phase boundary (margin {0:.3e})")]
    OnBoundary(f64),

    #[error("Berry flux {0:.6} (Chern units) is not quantized")]
    NonQuantizedFlux(f64),

    #[error("two emitters share site {0}")]
    DuplicateSite(usize),

    #[error("site id {0} does not exist in the lattice")]
    InvalidSite(usize),

    #[error("non-finite amplitude at t = {0}; reduce the time step")]
    NonFinite(f64),

    #[error("expected {expected} emitters, found {found}")]
    EmitterCount { expected: usize, found: usize },

    #[error("annulus contains no lattice sites")]
    EmptyAnnulus,

    #[error("grid does not match geometry: {0}")]
    GridMismatch(String),

    #[error("no maximum found within the trajectory horizon")]
    NoMaximum,

    #[error("invalid axis: {0}")]
    InvalidAxis(String),

    #[error("configuration error:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("malformed data: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::EvenSlabWidth(_) | Error::InvalidParameter(_) => 2,
            Error::InconsistentTermination(_) | Error::InvalidAxis(_) => 2,
            Error::Io(_) | Error::Format(_) => 4,
            _ => 3,
        }
    }

    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "invalid-parameter",
            Error::EvenSlabWidth(_) => "even-slab-width",
            Error::InconsistentTermination(_) => "inconsistent-termination",
            Error::NearDegeneracy { .. } => "near-degeneracy",
            Error::Gapless(_) => "gapless",
            Error::OnBoundary(_) => "on-boundary",
            Error::NonQuantizedFlux(_) => "non-quantized-flux",
            Error::DuplicateSite(_) => "duplicate-site",
            Error::InvalidSite(_) => "invalid-site",
            Error::NonFinite(_) => "non-finite",
            Error::EmitterCount { .. } => "emitter-count",
            Error::EmptyAnnulus => "empty-annulus",
            Error::GridMismatch(_) => "grid-mismatch",
            Error::NoMaximum => "no-maximum",
            Error::InvalidAxis(_) => "invalid-axis",
            Error::Config(_) => "config",
            Error::Format(_) => "format",
            Error::Io(_) => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("packet width {delta_n} needs a cutoff of at least {required} levels, got {cutoff}")]
    CutoffTooSmall {
        delta_n: f64,
        cutoff: i64,
        required: i64,
    },

    #[error(
        "grid of {grid_size} points is too small for {levels} levels (need at least {required})"
    )]
    UndersizedGrid {
        grid_size: usize,
        levels: usize,
        required: usize,
    },

    #[error("density has no dominant direction (resultant length {resultant:.3e})")]
    UniformDensity { resultant: f64 },

    #[error("density is too broad for a peak estimate (circular variance {variance:.3})")]
    BroadDensity { variance: f64 },

    #[error("density is multimodal: secondary lobe carries {ratio:.3} of the primary mass")]
    MultiModal { ratio: f64 },

    #[error("packet width {width:.4} rad overlaps lobes spaced {spacing:.4} rad apart")]
    Overlap { width: f64, spacing: f64 },

    #[error("{what} outside the supported envelope: {reason}")]
    Envelope { what: &'static str, reason: String },

    #[error("linear solve residual {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    SolverResidual { residual: f64, tolerance: f64 },
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}

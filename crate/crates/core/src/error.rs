use thiserror::Error;

/// Errors reported by the synthesis, simulation and state-preparation APIs.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("duplicate qubit {0} in gate or request")]
    DuplicateQubit(usize),

    #[error("circuit widths differ: {0} vs {1}")]
    WidthMismatch(usize, usize),

    #[error("{needed} dirty ancillas needed, {available} available")]
    NotEnoughAncillas { needed: usize, available: usize },

    #[error("matrix is not special unitary within tolerance {tol}: {detail}")]
    NotSpecialUnitary { tol: f64, detail: String },

    #[error("main diagonal is not real within tolerance {0}")]
    NotRealMainDiag(f64),

    #[error("singular input: Re(z) + 1 = {0} is below the singularity threshold")]
    SingularInput(f64),

    #[error("degenerate spectrum: matrix is within tolerance of ±I")]
    DegenerateSpectrum,

    #[error("width {width} exceeds the dense-unitary limit {max}")]
    TooWide { width: usize, max: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),

    #[error("invalid weight: |x|^2 = {x_sq} exceeds remaining weight {gamma}")]
    InvalidWeight { x_sq: f64, gamma: f64 },

    #[error("amplitudes not normalized: sum of |x|^2 = {0}")]
    NotNormalized(f64),

    #[error("duplicate pattern {0:?}")]
    DuplicatePattern(String),

    #[error("could not sample {want} distinct patterns with density {density} after {tries} tries")]
    InfeasibleDensity { want: usize, density: f64, tries: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

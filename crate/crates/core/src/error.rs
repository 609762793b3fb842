use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FloqError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The field vanishes at `t`, so the instantaneous eigenbasis is undefined.
    #[error("degenerate instantaneous spectrum at t = {t}")]
    DegenerateSpectrum { t: f64 },

    /// The one-period propagator has (numerically) coinciding eigenvalues.
    #[error("degenerate Floquet spectrum: mode labels are ambiguous")]
    DegenerateFloquet,

    #[error("integration did not converge: {0}")]
    NotConverged(String),

    #[error("ladder leakage {leakage:.3e} at the lattice boundary exceeds {threshold:.1e}; widen the lattice beyond n_half_width = {n_half_width}")]
    LadderLeakage {
        leakage: f64,
        threshold: f64,
        n_half_width: usize,
    },

    #[error("no beat: spectral peak {peak:.3e} does not clear the noise floor {floor:.3e}")]
    NoBeat { peak: f64, floor: f64 },

    #[error("Fourier truncation n_max = {n_max} exceeds the support of a {grid}-point grid")]
    FourierSupport { n_max: usize, grid: usize },

    /// Every Fourier weight entering the steady-state ratio vanished.
    #[error("steady state is degenerate: all rate weights vanish")]
    DegenerateSteadyState,
}

pub type Result<T> = std::result::Result<T, FloqError>;

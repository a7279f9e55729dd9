use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical core.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Parameter validation failed (non-positive decay rate, NaN, ...).
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// The closed-form eigenvector expressions collapse at Ω = 0.
    #[error("degenerate parameterization: the closed-form eigenvectors require a nonzero drive amplitude")]
    DegenerateParameterization,

    /// QR iteration exceeded its sweep budget. Carries the partially
    /// reduced matrix (row-major) for diagnosis.
    #[error("eigenvalue iteration did not converge within {sweeps} sweeps per eigenvalue")]
    EigenNonConvergence {
        sweeps: usize,
        partial: Vec<Complex64>,
    },

    /// A left/right eigenvector cluster has (numerically) coalesced:
    /// biorthogonal normalization is impossible.
    #[error("defective eigenvalue cluster {indices:?}: overlap metric {metric:.3e} is below the threshold {threshold:.1e}")]
    DefectiveCluster {
        indices: Vec<usize>,
        metric: f64,
        threshold: f64,
    },

    /// Amplitude series is identically zero; there is nothing to fit.
    #[error("no signal: amplitude series is zero within the detection threshold")]
    NoSignal,

    /// The exponential fit diverged. Carries the best iterate found.
    #[error("fit did not converge after {iterations} iterations (best residual {residual:.3e})")]
    FitNonConvergence {
        iterations: usize,
        residual: f64,
        best_rate: Complex64,
        best_amplitude: Complex64,
    },

    /// Branch assignment stayed ambiguous through the full bisection
    /// depth; the loop needs denser sampling.
    #[error("ambiguous branch assignment at k = {k:.6}; increase the loop sampling beyond N = {samples}")]
    RefinementNeeded { k: f64, samples: usize },

    /// A tracked eigenvalue moved further than the continuity threshold
    /// allows, even after bisection.
    #[error("branch tracking failed at k = {k:.6}: jump {jump:.3e} exceeds threshold {threshold:.3e}")]
    TrackingFailure { k: f64, jump: f64, threshold: f64 },

    /// The winding reference sits on the eigenvalue path itself.
    #[error("winding reference lies on the branch path at sample {sample}")]
    SingularReference { sample: usize },

    /// Resultants of the zero polynomial are undefined.
    #[error("zero polynomial passed to resultant")]
    ZeroPolynomial,

    /// The loop runs through (or numerically too close to) a spectral
    /// degeneracy, either geometrically or as a vanishing resultant vector.
    #[error("loop runs through a spectral degeneracy near sample {sample} (magnitude {magnitude:.3e})")]
    LoopThroughDegeneracy { sample: usize, magnitude: f64 },

    /// A degeneracy search failed to converge or to verify.
    #[error("degeneracy search failed: {0}")]
    LocateFailure(String),
}

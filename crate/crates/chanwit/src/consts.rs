//! Numerical tolerances, in one place so every comparison is against a named
//! constant.

/// Max entrywise |A - A†| accepted as Hermitian by the eigensolver.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Off-diagonal Frobenius norm (relative to 1 + max |entry|) at which the
/// cyclic Jacobi sweep stops.
pub const JACOBI_OFF_TOL: f64 = 1e-12;

/// Hard cap on Jacobi sweeps; the cyclic scheme converges long before this
/// for the dimensions handled here (~64).
pub const JACOBI_MAX_SWEEPS: usize = 100;

/// Allowed residual |sum K†K - I| for trace preservation.
pub const TRACE_PRESERVATION_TOL: f64 = 1e-10;

/// Eigenvalue floor for complete positivity of the Choi matrix.
pub const CHOI_PSD_TOL: f64 = 1e-10;

/// Eigenvalue floor for density matrices and POVM elements.
pub const PSD_TOL: f64 = 1e-10;

/// Allowed deviation of a density-matrix trace from 1.
pub const UNIT_TRACE_TOL: f64 = 1e-10;

/// Allowed deviation of a POVM element sum from the identity.
pub const POVM_SUM_TOL: f64 = 1e-10;

/// Allowed deviation of a prior or weight vector sum from 1.
pub const PRIOR_SUM_TOL: f64 = 1e-12;

/// Column-sum threshold below which a game counts as unbiased.
pub const UNBIASED_COL_TOL: f64 = 1e-10;

/// Slack accepted on channel parameters (lambda, eta, g0) at range checks.
pub const PARAM_TOL: f64 = 1e-12;

/// Eigenvalue floor used when inverting R^(1/2) in the POVM ascent step.
pub const RSQRT_EIG_FLOOR: f64 = 1e-12;

/// Choi eigenvalues below this are dropped during Kraus extraction.
pub const CHOI_KRAUS_CUTOFF: f64 = 1e-10;

/// Spectral weights below this are dropped when factoring PSD operators
/// into Kraus terms (trace-class, QC, shifted-depolarizing constructors).
pub const SPECTRUM_CUTOFF: f64 = 1e-14;

/// Max number of deterministic classical maps enumerated exhaustively.
pub const ENUMERATION_BUDGET: u128 = 1 << 20;

/// Max entrywise |sigma - I/d| at which the shifted-depolarizing closed form
/// routes to the depolarizing formula.
pub const UNIFORM_SIGMA_TOL: f64 = 1e-12;

/// Threshold for "first nonzero component" when fixing eigenvector phases.
pub const PHASE_FIX_MIN: f64 = 1e-8;

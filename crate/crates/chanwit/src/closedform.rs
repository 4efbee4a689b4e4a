//! Closed-form utilities, one operation per channel class, each returning
//! the optimal value together with an encoding (and, where natural, a
//! decoding) that attains it.
//!
//! Binary-game formulas are derived assuming g0 ≥ 1/2; relabeling both
//! inputs and outputs leaves the utility invariant, so every binary closed
//! form here is evaluated at max(g0, 1-g0) and therefore valid on all of
//! [0, 1].

use num_complex::Complex64;

use crate::channels::{Channel, DensityMatrix, Povm};
use crate::consts;
use crate::error::{Error, Result};
use crate::games::Game;
use crate::matcore::{basis_vector, cr, CMatrix};

/// How Bob turns the channel output into a game output.
#[derive(Clone, Debug)]
pub enum Decoding {
    /// A measurement whose y-th effect corresponds to game output y.
    Povm(Povm),
    /// A deterministic post-processing of a classical channel output:
    /// `map[z]` is the game output announced on channel outcome z.
    Classical(Vec<usize>),
    /// Always announce the same game output.
    Constant(usize),
}

/// A utility value with the strategy that attains it and the identifier of
/// the formula or oracle that produced it.
#[derive(Clone, Debug)]
pub struct UtilityResult {
    pub value: f64,
    pub encoding: Option<Vec<DensityMatrix>>,
    pub decoding: Option<Decoding>,
    pub provenance: String,
}

impl UtilityResult {
    fn bare(value: f64, provenance: impl Into<String>) -> Self {
        Self {
            value,
            encoding: None,
            decoding: None,
            provenance: provenance.into(),
        }
    }
}

/// Helstrom data for a binary discrimination instance: the Helstrom matrix,
/// the optimal payoff (1 + ‖H‖₁)/2, and the projective measurement that
/// splits its positive and negative eigenspaces.
#[derive(Clone, Debug)]
pub struct HelstromResult {
    pub h: CMatrix,
    pub value: f64,
    pub povm: Povm,
}

/// Utility of the identity (and any unitary) channel in dimension d: an
/// orthonormal encoding with a simultaneously diagonal projective decoding
/// reduces to picking at most d outputs to tell apart, so the value is the
/// max over output subsets S with |S| ≤ d of `Σ_x max_{y∈S} g[x][y]`,
/// searched exhaustively.
pub fn utility_identity(g: &Game, d: usize) -> Result<UtilityResult> {
    if d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: 0.0,
            expected: "dimension >= 1",
        });
    }
    let m = g.outputs();
    let k = d.min(m);
    let mut best_value = f64::NEG_INFINITY;
    let mut best_subset: Vec<usize> = Vec::new();
    let mut subset: Vec<usize> = (0..k).collect();
    loop {
        let value: f64 = g
            .rows()
            .map(|row| {
                subset
                    .iter()
                    .map(|&y| row[y])
                    .fold(f64::NEG_INFINITY, f64::max)
            })
            .sum();
        if value > best_value {
            best_value = value;
            best_subset = subset.clone();
        }
        if !next_combination(&mut subset, m) {
            break;
        }
    }

    // Witnessing strategy: input x is sent as the basis state indexed by the
    // position (within the subset) of its best output; projective decoding
    // relabels that position back to the output.
    let assignment: Vec<usize> = g
        .rows()
        .map(|row| {
            let mut best = 0;
            for (pos, &y) in best_subset.iter().enumerate() {
                if row[y] > row[best_subset[best]] {
                    best = pos;
                }
            }
            best
        })
        .collect();
    let encoding: Vec<DensityMatrix> = assignment
        .iter()
        .map(|&pos| DensityMatrix::basis_state(d, pos))
        .collect();

    let mut elements = vec![CMatrix::zeros(d, d); m];
    for (pos, &y) in best_subset.iter().enumerate() {
        let e = basis_vector(d, pos);
        elements[y] = &elements[y] + &CMatrix::outer(&e, &e);
    }
    // any unused dimensions go to the first selected output
    for pos in k..d {
        let e = basis_vector(d, pos);
        elements[best_subset[0]] = &elements[best_subset[0]] + &CMatrix::outer(&e, &e);
    }
    Ok(UtilityResult {
        value: best_value,
        encoding: Some(encoding),
        decoding: Some(Decoding::Povm(Povm::new(elements)?)),
        provenance: format!("closedform:identity(d={d})"),
    })
}

/// Next k-subset of [0, m) in lexicographic order; false when exhausted.
fn next_combination(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < m - (k - i) {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Utility of a dephasing channel: equal to the identity-channel utility for
/// every λ, attained along the dephasing basis.
pub fn utility_dephasing(lambda: f64, g: &Game, d: usize) -> Result<UtilityResult> {
    check_unit_range("lambda", lambda)?;
    let mut result = utility_identity(g, d)?;
    result.provenance = format!("closedform:dephasing(lambda={lambda},d={d})");
    Ok(result)
}

/// Utility of any trace-class channel ρ ↦ `Tr[ρ]σ`: nothing gets through, so
/// Bob announces the best fixed output. Any encoding is optimal.
pub fn utility_trace_class(g: &Game) -> Result<UtilityResult> {
    let sums = g.column_sums();
    let (y_star, value) = sums
        .iter()
        .copied()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
        .expect("games have at least one output");
    Ok(UtilityResult {
        value,
        encoding: None,
        decoding: Some(Decoding::Constant(y_star)),
        provenance: "closedform:trace_class".into(),
    })
}

/// Utility of the erasure channel: `λ·U(id, g) + (1-λ)·max_y Σ_x g[x][y]`,
/// attained by an identity-optimal strategy extended with the best constant
/// guess on the erasure flag.
pub fn utility_erasure(lambda: f64, g: &Game, d: usize) -> Result<UtilityResult> {
    check_unit_range("lambda", lambda)?;
    let id = utility_identity(g, d)?;
    let tc = utility_trace_class(g)?;
    let value = lambda * id.value + (1.0 - lambda) * tc.value;

    let y_star = match tc.decoding {
        Some(Decoding::Constant(y)) => y,
        _ => unreachable!("trace-class decoding is constant"),
    };
    // encodings live on H; decoding elements pick up the flag slot as
    // e_y ⊕ δ(y, y*)
    let decoding = match id.decoding {
        Some(Decoding::Povm(povm)) => {
            let elements: Vec<CMatrix> = povm
                .elements()
                .iter()
                .enumerate()
                .map(|(y, e)| {
                    CMatrix::from_fn(d + 1, d + 1, |i, j| {
                        if i < d && j < d {
                            e[(i, j)]
                        } else if i == d && j == d && y == y_star {
                            cr(1.0)
                        } else {
                            Complex64::ZERO
                        }
                    })
                })
                .collect();
            Some(Decoding::Povm(Povm::new(elements)?))
        }
        _ => None,
    };
    Ok(UtilityResult {
        value,
        encoding: id.encoding,
        decoding,
        provenance: format!("closedform:erasure(lambda={lambda},d={d})"),
    })
}

/// Utility of the quantum-classical channel for POVM {π_y}: exhaustive over
/// deterministic post-processings f of the k measurement outcomes, scoring
/// each by `Σ_x λ_max(Σ_y g[x][f(y)] π_y)`; the optimal encoding is the top
/// eigenvector per input.
pub fn utility_qc(povm: &Povm, g: &Game) -> Result<UtilityResult> {
    let k = povm.len();
    let m = g.outputs();
    let total = (m as u128).saturating_pow(k as u32);
    if total > consts::ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            required: total,
            budget: consts::ENUMERATION_BUDGET,
        });
    }
    let d = povm.dim();
    let mut best_value = f64::NEG_INFINITY;
    let mut best_map = vec![0usize; k];
    let mut map = vec![0usize; k];
    loop {
        let mut value = 0.0;
        for row in g.rows() {
            let mut op = CMatrix::zeros(d, d);
            for (y, &fy) in map.iter().enumerate() {
                let w = row[fy];
                if w != 0.0 {
                    op = &op + &povm.element(y).scaled(w);
                }
            }
            let (top, _) = op.top_eigpair()?;
            value += top;
        }
        if value > best_value {
            best_value = value;
            best_map.copy_from_slice(&map);
        }
        if !next_map(&mut map, m) {
            break;
        }
    }

    let mut encoding = Vec::with_capacity(g.inputs());
    for row in g.rows() {
        let mut op = CMatrix::zeros(d, d);
        for (y, &fy) in best_map.iter().enumerate() {
            let w = row[fy];
            if w != 0.0 {
                op = &op + &povm.element(y).scaled(w);
            }
        }
        let (_, vec) = op.top_eigpair()?;
        encoding.push(DensityMatrix::pure(&vec)?);
    }
    Ok(UtilityResult {
        value: best_value,
        encoding: Some(encoding),
        decoding: Some(Decoding::Classical(best_map)),
        provenance: format!("closedform:qc(k={k})"),
    })
}

fn next_map(map: &mut [usize], m: usize) -> bool {
    for slot in map.iter_mut() {
        *slot += 1;
        if *slot < m {
            return true;
        }
        *slot = 0;
    }
    false
}

/// Utility of the depolarizing channel for an unbiased game: λ·U(id, g),
/// attained by an identity-optimal strategy. Games whose columns all sum to
/// the same constant are shifted to unbiased form and back; anything else
/// has no covering closed form.
pub fn utility_depolarizing_unbiased(lambda: f64, g: &Game, d: usize) -> Result<UtilityResult> {
    check_unit_range("lambda", lambda)?;
    if g.is_unbiased() {
        let id = utility_identity(g, d)?;
        return Ok(UtilityResult {
            value: lambda * id.value,
            encoding: id.encoding,
            decoding: id.decoding,
            provenance: format!("closedform:depolarizing_unbiased(lambda={lambda},d={d})"),
        });
    }
    let sums = g.column_sums();
    let spread = sums.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - sums.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    if spread > consts::UNBIASED_COL_TOL {
        return Err(Error::NoClosedForm {
            detail: format!(
                "depolarizing closed form covers unbiased games only; column sums spread by {spread:.3e}"
            ),
        });
    }
    // equal column sums c: shift rows by -c/n, apply, and undo the offset
    let c = sums[0];
    let n = g.inputs();
    let beta = vec![-c / n as f64; n];
    let unbiased = g.affine_transform(1.0, &beta)?;
    let id = utility_identity(&unbiased, d)?;
    Ok(UtilityResult {
        value: lambda * id.value + c,
        encoding: id.encoding,
        decoding: id.decoding,
        provenance: format!("closedform:depolarizing_unbiased(lambda={lambda},d={d},shift={c})"),
    })
}

/// Utility of a unitary channel for the discrimination game diag(g):
/// sort descending and keep the nonnegative part of the top d entries.
///
/// Single-input or one-dimensional instances leave Bob unable to dodge
/// negative payoffs, so those fall back to the exact degenerate values.
pub fn utility_unitary_discrimination(gdiag: &[f64], d: usize) -> Result<UtilityResult> {
    if gdiag.is_empty() || d == 0 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d as f64,
            expected: "nonempty diagonal and d >= 1",
        });
    }
    let n = gdiag.len();
    let value = if n == 1 {
        gdiag[0]
    } else if d == 1 {
        gdiag.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    } else {
        let mut sorted = gdiag.to_vec();
        sorted.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // Θ(0) = 1, immaterial to the sum
        sorted.iter().take(d).filter(|&&x| x >= 0.0).sum()
    };
    Ok(UtilityResult::bare(
        value,
        format!("closedform:unitary_discrimination(d={d})"),
    ))
}

/// Helstrom data for discriminating C(ρ0) vs C(ρ1) with payoff masses
/// (g0, 1-g0): H = g0·C(ρ0) - (1-g0)·C(ρ1), value (1 + ‖H‖₁)/2, and the
/// projective POVM splitting the spectrum of H at zero.
pub fn helstrom(
    ch: &Channel,
    rho0: &DensityMatrix,
    rho1: &DensityMatrix,
    g0: f64,
) -> Result<HelstromResult> {
    check_unit_range("g0", g0)?;
    if rho0.dim() != ch.din() || rho1.dim() != ch.din() {
        return Err(Error::DimensionMismatch {
            context: "helstrom",
            detail: format!(
                "states of dimension {} and {} for channel input {}",
                rho0.dim(),
                rho1.dim(),
                ch.din()
            ),
        });
    }
    let h = &ch.apply_op(rho0.mat()).scaled(g0) - &ch.apply_op(rho1.mat()).scaled(1.0 - g0);
    let eig = h.hermitian_eig()?;
    let trace_norm: f64 = eig.values.iter().map(|x| x.abs()).sum();
    let value = 0.5 * (1.0 + trace_norm);

    let dout = ch.dout();
    let mut plus = CMatrix::zeros(dout, dout);
    for (i, &lam) in eig.values.iter().enumerate() {
        if lam >= 0.0 {
            let v = eig.vectors.column(i);
            plus = &plus + &CMatrix::outer(&v, &v);
        }
    }
    let minus = &CMatrix::identity(dout) - &plus;
    Ok(HelstromResult {
        h,
        value,
        povm: Povm::trusted(vec![plus, minus]),
    })
}

fn hat_g0(g0: f64) -> f64 {
    g0.max(1.0 - g0)
}

/// Utility of a Pauli channel for the binary game diag(g0, 1-g0):
/// max(ĝ0, (1 + max_{k≥1}|2(λ0+λk)-1|)/2), attained in the eigenbasis of
/// the maximizing Pauli.
pub fn utility_pauli_binary(weights: [f64; 4], g0: f64) -> Result<UtilityResult> {
    check_unit_range("g0", g0)?;
    let sum: f64 = weights.iter().sum();
    if weights.iter().any(|&w| w < -consts::PARAM_TOL) || (sum - 1.0).abs() > 1e-10 {
        return Err(Error::InvalidParameter {
            name: "weights",
            value: sum,
            expected: "probability vector over {I, X, Y, Z}",
        });
    }
    let mut best_k = 1;
    let mut best_contrast = f64::NEG_INFINITY;
    for k in 1..4 {
        let contrast = (2.0 * (weights[0] + weights[k]) - 1.0).abs();
        if contrast > best_contrast {
            best_contrast = contrast;
            best_k = k;
        }
    }
    let value = hat_g0(g0).max(0.5 * (1.0 + best_contrast));
    let (plus, minus) = pauli_eigenbasis(best_k);
    Ok(UtilityResult {
        value,
        encoding: Some(vec![
            DensityMatrix::pure(&plus)?,
            DensityMatrix::pure(&minus)?,
        ]),
        decoding: None,
        provenance: format!("closedform:pauli(k={best_k},g0={g0})"),
    })
}

fn pauli_eigenbasis(k: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match k {
        1 => (vec![cr(s), cr(s)], vec![cr(s), cr(-s)]),
        2 => (
            vec![cr(s), Complex64::new(0.0, s)],
            vec![cr(s), Complex64::new(0.0, -s)],
        ),
        _ => (basis_vector(2, 0), basis_vector(2, 1)),
    }
}

/// Utility of the amplitude-damping channel for diag(g0, 1-g0):
/// (1 + √(1 - 4g0(1-η) + 4g0²(1-η)))/2 with the explicit two-state
/// encoding √g0|0⟩ + √(1-g0)|1⟩, √(1-g0)|0⟩ - √g0|1⟩.
pub fn utility_ampdamp_binary(eta: f64, g0: f64) -> Result<UtilityResult> {
    check_unit_range("eta", eta)?;
    check_unit_range("g0", g0)?;
    // discriminant 1 - 4 g0 (1-g0) (1-η), symmetric in g0 ↔ 1-g0
    let disc = (1.0 - 4.0 * g0 * (1.0 - eta) + 4.0 * g0 * g0 * (1.0 - eta)).max(0.0);
    let value = 0.5 * (1.0 + disc.sqrt());
    let gh = hat_g0(g0);
    let (a, b) = (gh.sqrt(), (1.0 - gh).sqrt());
    let (psi0, psi1) = if g0 >= 0.5 {
        (vec![cr(a), cr(b)], vec![cr(b), cr(-a)])
    } else {
        // relabeled optimum for the inverted prior
        (vec![cr(b), cr(-a)], vec![cr(a), cr(b)])
    };
    Ok(UtilityResult {
        value,
        encoding: Some(vec![
            DensityMatrix::pure(&psi0)?,
            DensityMatrix::pure(&psi1)?,
        ]),
        decoding: None,
        provenance: format!("closedform:amplitude_damping(eta={eta},g0={g0})"),
    })
}

/// Shared evaluation of max[ĝ0, (1 + λ + (1-λ)(1-2s)(2ĝ0-1))/2] where s is
/// the smallest eigenvalue of the shift state.
fn shifted_value(lambda: f64, s_min: f64, g0: f64) -> f64 {
    let gh = hat_g0(g0);
    gh.max(0.5 * (1.0 + lambda + (1.0 - lambda) * (1.0 - 2.0 * s_min) * (2.0 * gh - 1.0)))
}

/// Utility of the shifted-depolarizing channel ρ ↦ `λρ + (1-λ)Tr[ρ]σ` for
/// diag(g0, 1-g0): `max[ĝ0, (1+λ+(1-λ)(1-2s_min)(2ĝ0-1))/2]` with s_min the
/// smallest eigenvalue of σ. σ = I/d is routed to the depolarizing special
/// case; otherwise the optimal encoding pairs σ's extremal eigenvectors,
/// with ρ0 orthogonal to the minimal one.
pub fn utility_shifted_depolarizing_binary(
    lambda: f64,
    sigma: &DensityMatrix,
    g0: f64,
) -> Result<UtilityResult> {
    check_unit_range("lambda", lambda)?;
    check_unit_range("g0", g0)?;
    let d = sigma.dim();
    let uniform = sigma
        .mat()
        .max_abs_diff(&CMatrix::identity(d).scaled(1.0 / d as f64));
    if uniform <= consts::UNIFORM_SIGMA_TOL {
        let mut res = utility_depolarizing_binary(lambda, d, g0)?;
        res.provenance = format!("closedform:shifted_depolarizing->depolarizing(lambda={lambda})");
        return Ok(res);
    }
    let eig = sigma.mat().hermitian_eig()?;
    let s_min = *eig.values.last().expect("nonempty spectrum");
    let value = shifted_value(lambda, s_min, g0);

    let top = eig.vectors.column(0);
    let bottom = eig.vectors.column(d - 1);
    let (rho0, rho1) = if g0 >= 0.5 {
        (DensityMatrix::pure(&top)?, DensityMatrix::pure(&bottom)?)
    } else {
        (DensityMatrix::pure(&bottom)?, DensityMatrix::pure(&top)?)
    };
    Ok(UtilityResult {
        value,
        encoding: Some(vec![rho0, rho1]),
        decoding: None,
        provenance: format!("closedform:shifted_depolarizing(lambda={lambda},s_min={s_min})"),
    })
}

/// Utility of the depolarizing channel for diag(g0, 1-g0): the shifted
/// formula evaluated at the flat spectrum s = 1/d, where any orthonormal
/// pure encoding is optimal.
pub fn utility_depolarizing_binary(lambda: f64, d: usize, g0: f64) -> Result<UtilityResult> {
    check_unit_range("lambda", lambda)?;
    check_unit_range("g0", g0)?;
    if d < 2 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d as f64,
            expected: "dimension >= 2",
        });
    }
    let value = shifted_value(lambda, 1.0 / d as f64, g0);
    Ok(UtilityResult {
        value,
        encoding: Some(vec![
            DensityMatrix::basis_state(d, 0),
            DensityMatrix::basis_state(d, 1),
        ]),
        decoding: None,
        provenance: format!("closedform:depolarizing_binary(lambda={lambda},d={d})"),
    })
}

/// Utility of optimal universal 1→2 cloning for diag(g0, 1-g0):
/// (d + ĝ0)/(d + 1); any orthonormal pure encoding is optimal.
pub fn utility_cloning_binary(d: usize, g0: f64) -> Result<UtilityResult> {
    check_unit_range("g0", g0)?;
    if d < 2 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d as f64,
            expected: "dimension >= 2",
        });
    }
    let value = (d as f64 + hat_g0(g0)) / (d as f64 + 1.0);
    Ok(UtilityResult {
        value,
        encoding: Some(vec![
            DensityMatrix::basis_state(d, 0),
            DensityMatrix::basis_state(d, 1),
        ]),
        decoding: None,
        provenance: format!("closedform:cloning(d={d})"),
    })
}

/// Utility of the partial trace of 1→2 cloning (a depolarizing channel with
/// λ = (d+2)/(2(d+1))) for diag(g0, 1-g0): max(ĝ0, ((d-2)ĝ0+d+3)/(2(d+1))).
pub fn utility_partialtrace_cloning_binary(d: usize, g0: f64) -> Result<UtilityResult> {
    check_unit_range("g0", g0)?;
    if d < 2 {
        return Err(Error::InvalidParameter {
            name: "d",
            value: d as f64,
            expected: "dimension >= 2",
        });
    }
    let df = d as f64;
    let gh = hat_g0(g0);
    let value = gh.max(((df - 2.0) * gh + df + 3.0) / (2.0 * (df + 1.0)));
    Ok(UtilityResult {
        value,
        encoding: Some(vec![
            DensityMatrix::basis_state(d, 0),
            DensityMatrix::basis_state(d, 1),
        ]),
        decoding: None,
        provenance: format!("closedform:partialtrace_cloning(d={d})"),
    })
}

fn check_unit_range(name: &'static str, value: f64) -> Result<()> {
    if !((-consts::PARAM_TOL..=1.0 + consts::PARAM_TOL).contains(&value)) {
        return Err(Error::InvalidParameter {
            name,
            value,
            expected: "[0, 1]",
        });
    }
    Ok(())
}

//! Independent numerical maximizers of the communication utility, used to
//! cross-validate every closed form: see-saw alternating optimization over
//! encodings and decodings, exhaustive grid search over orthonormal qubit
//! encodings, and exact enumeration of classical strategies.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::channels::{Channel, DensityMatrix, Povm};
use crate::closedform::{helstrom, Decoding, UtilityResult};
use crate::consts;
use crate::error::{Error, Result};
use crate::games::Game;
use crate::matcore::{c, cr, haar_unitary, CMatrix};

/// Knobs for the numerical maximizers.
#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// Independent see-saw restarts from random initial decodings.
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Stop once the value change per iteration drops below this.
    pub tol: f64,
    /// RNG seed; restart r uses a stream derived from `seed` and r.
    pub seed: u64,
    /// Base resolution of the qubit Bloch grid (per angle).
    pub grid_points: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            restarts: 20,
            max_iters: 400,
            tol: 1e-10,
            seed: 2020,
            grid_points: 200,
        }
    }
}

/// See-saw run with per-iteration diagnostics, used by the invariants suite.
#[derive(Clone, Debug)]
pub struct SeesawReport {
    pub result: UtilityResult,
    /// One trace per restart, recording the value after every half-step
    /// (encoding update, then decoding update), on the shifted-game scale.
    pub histories: Vec<Vec<f64>>,
    /// Worst |Σ_y π_y - I| entry seen across all iterations.
    pub max_povm_sum_dev: f64,
    /// Most negative POVM-element eigenvalue seen across all iterations.
    pub min_povm_eig: f64,
    pub converged: bool,
}

/// Average payoff `Σ_xy g[x][y]·Tr[C(ρ_x) π_y]` of an explicit strategy.
pub fn average_payoff(
    ch: &Channel,
    g: &Game,
    encoding: &[DensityMatrix],
    povm: &Povm,
) -> Result<f64> {
    if encoding.len() != g.inputs() || povm.len() != g.outputs() {
        return Err(Error::DimensionMismatch {
            context: "average_payoff",
            detail: format!(
                "{} states / {} effects for a {}x{} game",
                encoding.len(),
                povm.len(),
                g.inputs(),
                g.outputs()
            ),
        });
    }
    let outputs: Vec<CMatrix> = encoding.iter().map(|rho| ch.apply_op(rho.mat())).collect();
    let mut value = 0.0;
    for (out, row) in outputs.iter().zip(g.rows()) {
        for (y, &gxy) in row.iter().enumerate() {
            if gxy != 0.0 {
                value += gxy * (out * povm.element(y)).trace().re;
            }
        }
    }
    Ok(value)
}

/// See-saw maximization of the utility: alternates an exact encoding update
/// (top eigenprojector of the back-propagated payoff operator) with a
/// decoding update (exact Helstrom split for binary-output games, otherwise
/// a monotone POVM fixed-point ascent), keeping the best over random
/// restarts. The value is a certified lower bound on the utility.
pub fn seesaw(ch: &Channel, g: &Game, cfg: &OracleConfig) -> Result<UtilityResult> {
    Ok(seesaw_report(ch, g, cfg)?.result)
}

pub fn seesaw_report(ch: &Channel, g: &Game, cfg: &OracleConfig) -> Result<SeesawReport> {
    if cfg.restarts == 0 || cfg.tol <= 0.0 {
        return Err(Error::InvalidSpec {
            detail: "oracle config needs restarts >= 1 and tol > 0".into(),
        });
    }
    let (gs, offset) = g.shift_nonneg();
    let m = g.outputs();
    let dout = ch.dout();

    // a game with constant rows carries no signal: every strategy scores b
    if gs.upper_bound() <= 1e-15 {
        return Ok(SeesawReport {
            result: UtilityResult {
                value: -offset,
                encoding: None,
                decoding: None,
                provenance: format!("oracle:seesaw(trivial,seed={})", cfg.seed),
            },
            histories: Vec::new(),
            max_povm_sum_dev: 0.0,
            min_povm_eig: 0.0,
            converged: true,
        });
    }

    let mut best_value = f64::NEG_INFINITY;
    let mut best_strategy: Option<(Vec<DensityMatrix>, Povm)> = None;
    let mut histories = Vec::with_capacity(cfg.restarts);
    let mut max_sum_dev: f64 = 0.0;
    let mut min_eig: f64 = f64::INFINITY;
    let mut all_converged = true;

    for restart in 0..cfg.restarts {
        let mut rng =
            ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add((restart as u64) * 0x9E37_79B9));
        let mut povm = random_povm(dout, m, restart, &mut rng);
        let mut history = Vec::new();
        let mut prev = f64::NEG_INFINITY;
        let mut converged = false;
        let mut rhos: Vec<DensityMatrix> = Vec::new();

        for _iter in 0..cfg.max_iters {
            let (new_rhos, enc_val) = best_encoding_step(ch, &gs, &povm)?;
            rhos = new_rhos;
            history.push(enc_val);

            let images: Vec<CMatrix> = rhos.iter().map(|r| ch.apply_op(r.mat())).collect();
            let payoff_ops = payoff_operators(&gs, &images, dout);
            let (new_povm, dec_val) = if m == 2 {
                helstrom_split(&payoff_ops)?
            } else {
                povm_ascent_step(&payoff_ops, &povm)?
            };
            povm = new_povm;
            history.push(dec_val);

            let (sum_dev, elem_min_eig) = povm_health(&povm)?;
            max_sum_dev = max_sum_dev.max(sum_dev);
            min_eig = min_eig.min(elem_min_eig);

            if (dec_val - prev).abs() < cfg.tol {
                converged = true;
                prev = dec_val;
                break;
            }
            prev = dec_val;
        }
        all_converged &= converged;

        if prev > best_value {
            best_value = prev;
            best_strategy = Some((rhos.clone(), povm.clone()));
        }
        histories.push(history);
    }

    let (encoding, povm) = best_strategy.expect("at least one restart ran");
    let converged_note = if all_converged { "" } else { ",nonconverged" };
    Ok(SeesawReport {
        result: UtilityResult {
            value: best_value - offset,
            encoding: Some(encoding),
            decoding: Some(Decoding::Povm(povm)),
            provenance: format!(
                "oracle:seesaw(seed={},restarts={}{})",
                cfg.seed, cfg.restarts, converged_note
            ),
        },
        histories,
        max_povm_sum_dev: max_sum_dev,
        min_povm_eig: if min_eig.is_finite() { min_eig } else { 0.0 },
        converged: all_converged,
    })
}

/// Exact encoding update: for a fixed decoding the objective separates per
/// input as `Tr[ρ_x B_x]` with `B_x = Σ_y g[x][y]·C†(π_y)`, maximized by the
/// projector onto the top eigenvector of B_x.
fn best_encoding_step(ch: &Channel, g: &Game, povm: &Povm) -> Result<(Vec<DensityMatrix>, f64)> {
    let duals: Vec<CMatrix> = povm
        .elements()
        .iter()
        .map(|e| ch.adjoint_apply(e))
        .collect();
    let din = ch.din();
    let mut rhos = Vec::with_capacity(g.inputs());
    let mut value = 0.0;
    for row in g.rows() {
        let mut b = CMatrix::zeros(din, din);
        for (y, &gxy) in row.iter().enumerate() {
            if gxy != 0.0 {
                b = &b + &duals[y].scaled(gxy);
            }
        }
        let (top, vec) = b.top_eigpair()?;
        value += top;
        rhos.push(DensityMatrix::pure(&vec)?);
    }
    Ok((rhos, value))
}

/// `A_y = Σ_x g[x][y]·C(ρ_x)` for the current encoding images.
fn payoff_operators(g: &Game, images: &[CMatrix], dout: usize) -> Vec<CMatrix> {
    let m = g.outputs();
    let mut ops = vec![CMatrix::zeros(dout, dout); m];
    for (image, row) in images.iter().zip(g.rows()) {
        for (y, &gxy) in row.iter().enumerate() {
            if gxy != 0.0 {
                ops[y] = &ops[y] + &image.scaled(gxy);
            }
        }
    }
    ops
}

/// Exact binary decoding: π_0 projects on the nonnegative eigenspace of
/// A_0 - A_1, so the step value is `Tr[A_1] + Σ λ_+(A_0 - A_1)`.
fn helstrom_split(payoff_ops: &[CMatrix]) -> Result<(Povm, f64)> {
    let delta = &payoff_ops[0] - &payoff_ops[1];
    let eig = delta.hermitian_eig()?;
    let d = delta.rows();
    let mut plus = CMatrix::zeros(d, d);
    let mut gain = 0.0;
    for (i, &lam) in eig.values.iter().enumerate() {
        if lam >= 0.0 {
            let v = eig.vectors.column(i);
            plus = &plus + &CMatrix::outer(&v, &v);
            gain += lam;
        }
    }
    let minus = &CMatrix::identity(d) - &plus;
    let value = payoff_ops[1].trace().re + gain;
    Ok((Povm::trusted(vec![plus, minus]), value))
}

/// One POVM fixed-point ascent step π_y ← R^(-1/2) A_y π_y A_y R^(-1/2)
/// with R = Σ_y A_y π_y A_y, monotone for PSD A_y (guaranteed here by the
/// nonnegativity shift). R is inverted as a pseudo-inverse with eigenvalue
/// floor: directions carrying no payoff mass would otherwise amplify
/// rounding noise, so they are dropped and their identity share is
/// redistributed uniformly, keeping the element sum exactly at I.
fn povm_ascent_step(payoff_ops: &[CMatrix], povm: &Povm) -> Result<(Povm, f64)> {
    let d = payoff_ops[0].rows();
    let mut r = CMatrix::zeros(d, d);
    for (a, pi) in payoff_ops.iter().zip(povm.elements()) {
        r = &r + &(&(a * pi) * a);
    }
    let eig = hermitize(&r).hermitian_eig()?;
    let t = eig.map_eigenvalues(|lam| {
        if lam > consts::RSQRT_EIG_FLOOR {
            1.0 / lam.sqrt()
        } else {
            0.0
        }
    });
    let mut elements: Vec<CMatrix> = payoff_ops
        .iter()
        .zip(povm.elements())
        .map(|(a, pi)| {
            let core = &(a * pi) * a;
            hermitize(&(&(&t * &core) * &t))
        })
        .collect();

    // Σ_y π'_y is the projector onto the retained range of R; hand the
    // kernel share back uniformly (it can only add nonnegative payoff)
    let mut sum = CMatrix::zeros(d, d);
    for e in &elements {
        sum = &sum + e;
    }
    let share = (&CMatrix::identity(d) - &sum).scaled(1.0 / elements.len() as f64);
    for e in &mut elements {
        *e = &*e + &share;
    }
    let value = step_value(payoff_ops, &elements);
    Ok((Povm::trusted(elements), value))
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + &m.adjoint()).scaled(0.5)
}

fn step_value(payoff_ops: &[CMatrix], elements: &[CMatrix]) -> f64 {
    payoff_ops
        .iter()
        .zip(elements)
        .map(|(a, e)| (a * e).trace().re)
        .sum()
}

fn povm_health(povm: &Povm) -> Result<(f64, f64)> {
    let d = povm.dim();
    let mut sum = CMatrix::zeros(d, d);
    let mut min_eig = f64::INFINITY;
    for e in povm.elements() {
        sum = &sum + e;
        let eig = e.hermitian_eig()?;
        min_eig = min_eig.min(*eig.values.last().expect("nonempty"));
    }
    Ok((sum.max_abs_diff(&CMatrix::identity(d)), min_eig))
}

/// Random initial POVM: a Haar-random basis whose projectors are
/// coarse-grained onto the m outcomes, mixed with a sliver of identity so no
/// outcome starts from an absorbing zero element.
///
/// With more outcomes than dimensions only d outcomes can host a projector,
/// and the multiplicative ascent migrates support slowly, so restarts cycle
/// deterministically through the output subsets of size d; the basis stays
/// random per restart.
fn random_povm<R: Rng + ?Sized>(d: usize, m: usize, restart: usize, rng: &mut R) -> Povm {
    let u = haar_unitary(d, rng);
    let mut slots: Vec<usize> = (0..d).collect();
    slots.shuffle(rng);
    let targets: Vec<usize> = if m <= d {
        // every outcome gets at least one projector, extras spread at random
        let mut t: Vec<usize> = (0..d).map(|j| j % m).collect();
        t.shuffle(rng);
        t
    } else {
        combination_by_index(m, d, restart as u128 % binomial(m, d))
    };
    let mut elements = vec![CMatrix::zeros(d, d); m];
    for (&slot, &target) in slots.iter().zip(&targets) {
        let col = u.column(slot);
        elements[target] = &elements[target] + &CMatrix::outer(&col, &col);
    }
    let eps = 0.05;
    let mix = CMatrix::identity(d).scaled(eps / m as f64);
    let elements = elements
        .into_iter()
        .map(|e| &e.scaled(1.0 - eps) + &mix)
        .collect();
    Povm::trusted(elements)
}

fn binomial(m: usize, k: usize) -> u128 {
    let mut acc: u128 = 1;
    for i in 0..k.min(m - k) {
        acc = acc * (m - i) as u128 / (i + 1) as u128;
    }
    acc
}

/// The index-th k-subset of [0, m) in lexicographic order.
fn combination_by_index(m: usize, k: usize, mut index: u128) -> Vec<usize> {
    let mut subset = Vec::with_capacity(k);
    let mut next = 0;
    let mut remaining = k;
    while remaining > 0 {
        let with_next = binomial(m - next - 1, remaining - 1);
        if index < with_next {
            subset.push(next);
            remaining -= 1;
        } else {
            index -= with_next;
        }
        next += 1;
    }
    subset
}

/// Best decoding for a fixed encoding, exact where structure allows:
/// binary-output games use the Helstrom split; commuting payoff operators
/// are jointly diagonalized and decoded classically; everything else falls
/// back to the POVM ascent (flagged as heuristic in the provenance).
pub fn best_decoding(ch: &Channel, g: &Game, encoding: &[DensityMatrix]) -> Result<UtilityResult> {
    if encoding.len() != g.inputs() {
        return Err(Error::DimensionMismatch {
            context: "best_decoding",
            detail: format!("{} states for {} inputs", encoding.len(), g.inputs()),
        });
    }
    let m = g.outputs();
    let dout = ch.dout();
    let images: Vec<CMatrix> = encoding.iter().map(|r| ch.apply_op(r.mat())).collect();
    let ops = payoff_operators(g, &images, dout);

    if m == 2 {
        let (povm, value) = helstrom_split(&ops)?;
        return Ok(UtilityResult {
            value,
            encoding: Some(encoding.to_vec()),
            decoding: Some(Decoding::Povm(povm)),
            provenance: "oracle:decoding(helstrom)".into(),
        });
    }

    if let Some((value, povm)) = commuting_decoding(&ops)? {
        return Ok(UtilityResult {
            value,
            encoding: Some(encoding.to_vec()),
            decoding: Some(Decoding::Povm(povm)),
            provenance: "oracle:decoding(commuting)".into(),
        });
    }

    // heuristic fallback: ascent from the uniform POVM
    let shift: f64 = ops
        .iter()
        .map(|a| a.hermitian_eig().map(|e| *e.values.last().unwrap()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0f64, f64::min);
    let shifted: Vec<CMatrix> = ops
        .iter()
        .map(|a| a - &CMatrix::identity(dout).scaled(shift))
        .collect();
    let mut povm = Povm::trusted(vec![CMatrix::identity(dout).scaled(1.0 / m as f64); m]);
    let mut prev = f64::NEG_INFINITY;
    for _ in 0..2000 {
        let (next, v) = povm_ascent_step(&shifted, &povm)?;
        povm = next;
        if (v - prev).abs() < 1e-13 {
            break;
        }
        prev = v;
    }
    Ok(UtilityResult {
        value: step_value(&ops, povm.elements()),
        encoding: Some(encoding.to_vec()),
        decoding: Some(Decoding::Povm(povm)),
        provenance: "oracle:decoding(ascent-heuristic)".into(),
    })
}

/// Exact decoding for pairwise-commuting payoff operators: diagonalize a
/// generic combination, then assign each joint eigenvector to the outcome
/// with the largest diagonal payoff.
fn commuting_decoding(ops: &[CMatrix]) -> Result<Option<(f64, Povm)>> {
    let d = ops[0].rows();
    let scale = 1.0 + ops.iter().map(|a| a.max_abs()).fold(0.0, f64::max);
    for (y, a) in ops.iter().enumerate() {
        for b in &ops[y + 1..] {
            let comm = &(a * b) - &(b * a);
            if comm.max_abs() > 1e-9 * scale * scale {
                return Ok(None);
            }
        }
    }
    // generic irrational weights make eigenvalue collisions across distinct
    // joint eigenspaces non-generic
    let golden = 0.618_033_988_749_894_9_f64;
    let mut mix = CMatrix::zeros(d, d);
    for (y, a) in ops.iter().enumerate() {
        mix = &mix + &a.scaled(1.0 + golden * (y as f64 + 1.0));
    }
    let eig = mix.hermitian_eig()?;
    // per joint eigenvector j, the payoff ⟨v_j|A_y|v_j⟩ of announcing y
    let diag: Vec<Vec<f64>> = (0..d)
        .map(|j| {
            let v = eig.vectors.column(j);
            ops.iter()
                .map(|a| {
                    (0..d)
                        .map(|i| {
                            (0..d)
                                .map(|k| (v[i].conj() * a[(i, k)] * v[k]).re)
                                .sum::<f64>()
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    // verify the combination actually diagonalized every operator
    for a in ops {
        let rotated = &(&eig.vectors.adjoint() * a) * &eig.vectors;
        for i in 0..d {
            for j in 0..d {
                if i != j && rotated[(i, j)].norm() > 1e-7 * scale {
                    return Ok(None);
                }
            }
        }
    }
    let mut elements = vec![CMatrix::zeros(d, d); ops.len()];
    let mut value = 0.0;
    for (j, payoffs) in diag.iter().enumerate() {
        let (best_y, best) = payoffs
            .iter()
            .copied()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("nonempty payoffs");
        value += best;
        let v = eig.vectors.column(j);
        elements[best_y] = &elements[best_y] + &CMatrix::outer(&v, &v);
    }
    Ok(Some((value, Povm::trusted(elements))))
}

/// Exhaustive lower bound for qubit-input channels on the binary game
/// diag(g0, 1-g0): scans all orthonormal pure encodings on a Bloch grid,
/// scoring each with the exact Helstrom value, then polishes the best cell
/// by nested grid refinement until the value stops moving.
pub fn qubit_binary_grid(ch: &Channel, g0: f64, grid_points: usize) -> Result<UtilityResult> {
    if ch.din() != 2 {
        return Err(Error::DimensionMismatch {
            context: "qubit_binary_grid",
            detail: format!("channel input dimension {}, expected 2", ch.din()),
        });
    }
    if !(0.0..=1.0).contains(&g0) {
        return Err(Error::InvalidParameter {
            name: "g0",
            value: g0,
            expected: "[0, 1]",
        });
    }
    let p = grid_points.max(8);
    let score = |theta: f64, phi: f64| -> Result<f64> {
        let (r0, r1) = bloch_pair(theta, phi);
        Ok(helstrom(ch, &r0, &r1, g0)?.value)
    };

    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    for i in 0..=p {
        let theta = std::f64::consts::PI * i as f64 / p as f64;
        for j in 0..p {
            let phi = std::f64::consts::TAU * j as f64 / p as f64;
            let v = score(theta, phi)?;
            if v > best.0 {
                best = (v, theta, phi);
            }
        }
    }

    // local refinement: shrink a window around the best cell until the
    // improvement is far below the grid's certification tolerance
    let mut half_theta = std::f64::consts::PI / p as f64;
    let mut half_phi = std::f64::consts::TAU / p as f64;
    for _ in 0..18 {
        let (v0, t0, f0) = best;
        for i in 0..=8 {
            let theta = t0 - half_theta + 2.0 * half_theta * i as f64 / 8.0;
            for j in 0..=8 {
                let phi = f0 - half_phi + 2.0 * half_phi * j as f64 / 8.0;
                let v = score(theta, phi)?;
                if v > best.0 {
                    best = (v, theta, phi);
                }
            }
        }
        half_theta *= 0.4;
        half_phi *= 0.4;
        if best.0 - v0 < 1e-12 && half_theta < 1e-6 {
            break;
        }
    }

    let (value, theta, phi) = best;
    let (r0, r1) = bloch_pair(theta, phi);
    let hel = helstrom(ch, &r0, &r1, g0)?;
    Ok(UtilityResult {
        value,
        encoding: Some(vec![r0, r1]),
        decoding: Some(Decoding::Povm(hel.povm)),
        provenance: format!("oracle:qubit_grid(points={p})"),
    })
}

/// The orthonormal pure pair at Bloch angles (θ, φ).
fn bloch_pair(theta: f64, phi: f64) -> (DensityMatrix, DensityMatrix) {
    let (ct, st) = ((theta / 2.0).cos(), (theta / 2.0).sin());
    let phase = c(phi.cos(), phi.sin());
    let psi0 = vec![cr(ct), phase * st];
    let psi1 = vec![cr(st), -phase * ct];
    (
        DensityMatrix::pure(&psi0).expect("unit vector"),
        DensityMatrix::pure(&psi1).expect("unit vector"),
    )
}

/// Exact utility of a classical channel (column-stochastic conditional
/// probability matrix, k outputs × n_in inputs) for game g: deterministic
/// strategies suffice by linearity, so enumerate decodings and pick the
/// best deterministic encoding per input.
pub fn classical_utility(p_cond: &[Vec<f64>], g: &Game) -> Result<f64> {
    let k = p_cond.len();
    let n_in = p_cond.first().map_or(0, |r| r.len());
    if k == 0 || n_in == 0 || p_cond.iter().any(|r| r.len() != n_in) {
        return Err(Error::InvalidSpec {
            detail: "conditional probability matrix must be rectangular and nonempty".into(),
        });
    }
    for w in 0..n_in {
        let col: f64 = p_cond.iter().map(|r| r[w]).sum();
        if (col - 1.0).abs() > 1e-10 || p_cond.iter().any(|r| r[w] < -1e-12) {
            return Err(Error::InvalidSpec {
                detail: format!("column {w} is not a probability distribution (sum {col})"),
            });
        }
    }
    let m = g.outputs();
    let total = (m as u128).saturating_pow(k as u32);
    if total > consts::ENUMERATION_BUDGET {
        return Err(Error::EnumerationBudget {
            required: total,
            budget: consts::ENUMERATION_BUDGET,
        });
    }

    let mut best = f64::NEG_INFINITY;
    let mut map = vec![0usize; k];
    loop {
        let mut value = 0.0;
        for row in g.rows() {
            // expected payoff of each deterministic input under this decoding
            let mut per_input = vec![0.0; n_in];
            for (cond_row, &fz) in p_cond.iter().zip(&map) {
                let gz = row[fz];
                for (acc, &p) in per_input.iter_mut().zip(cond_row) {
                    *acc += p * gz;
                }
            }
            value += per_input.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        }
        best = best.max(value);
        if !next_map(&mut map, m) {
            break;
        }
    }
    Ok(best)
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

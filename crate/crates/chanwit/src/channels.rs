//! CPTP channels as Kraus operator lists, with validation, application,
//! adjoint action, Choi matrices, and named constructors for the channel
//! classes with known closed-form utilities.

use num_complex::Complex64;
use rand::Rng;

use crate::consts;
use crate::error::{Error, Result};
use crate::matcore::{basis_vector, c, cr, ginibre, orthonormalize_columns, CMatrix, Subsystem};

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    mat: CMatrix,
}

impl DensityMatrix {
    pub fn new(mat: CMatrix) -> Result<Self> {
        if !mat.is_square() {
            return Err(Error::NotSquare {
                rows: mat.rows(),
                cols: mat.cols(),
            });
        }
        let dev = mat.hermiticity_deviation();
        if dev > consts::HERMITICITY_TOL {
            return Err(Error::NotHermitian { max_asymmetry: dev });
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > consts::UNIT_TRACE_TOL || tr.im.abs() > consts::UNIT_TRACE_TOL {
            return Err(Error::InvalidTrace { trace: tr.re });
        }
        let min_eig = *mat
            .hermitian_eig()?
            .values
            .last()
            .expect("nonempty spectrum");
        if min_eig < -consts::PSD_TOL {
            return Err(Error::NotPositiveSemidefinite {
                min_eigenvalue: min_eig,
            });
        }
        Ok(Self { mat })
    }

    /// Wraps an operator that is guaranteed PSD and unit trace by
    /// construction (e.g. the output of a validated CPTP channel).
    pub(crate) fn trusted(mat: CMatrix) -> Self {
        debug_assert!(mat.hermiticity_deviation() <= 1e-8);
        Self { mat }
    }

    /// Projector onto the (normalized) pure state with the given amplitudes.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        let nrm = crate::matcore::vec_norm(amplitudes);
        if nrm < 1e-12 {
            return Err(Error::InvalidSpec {
                detail: "zero state vector".into(),
            });
        }
        let v: Vec<Complex64> = amplitudes.iter().map(|&z| z / nrm).collect();
        Ok(Self {
            mat: CMatrix::outer(&v, &v),
        })
    }

    pub fn basis_state(d: usize, k: usize) -> Self {
        Self {
            mat: CMatrix::outer(&basis_vector(d, k), &basis_vector(d, k)),
        }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self {
            mat: CMatrix::identity(d).scaled(1.0 / d as f64),
        }
    }

    /// Random mixed state from a Ginibre factor of the given rank.
    pub fn random<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> Self {
        let g = ginibre(d, rank.max(1), rng);
        let gg = &g * &g.adjoint();
        let tr = gg.trace().re;
        Self {
            mat: gg.scaled(1.0 / tr),
        }
    }

    pub fn dim(&self) -> usize {
        self.mat.rows()
    }

    pub fn mat(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_mat(self) -> CMatrix {
        self.mat
    }
}

/// Positive-operator valued measure: PSD elements summing to the identity.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm {
    elements: Vec<CMatrix>,
}

impl Povm {
    pub fn new(elements: Vec<CMatrix>) -> Result<Self> {
        let d = match elements.first() {
            Some(e) => e.rows(),
            None => {
                return Err(Error::InvalidSpec {
                    detail: "empty POVM".into(),
                })
            }
        };
        let mut sum = CMatrix::zeros(d, d);
        for e in &elements {
            if e.rows() != d || e.cols() != d {
                return Err(Error::DimensionMismatch {
                    context: "Povm::new",
                    detail: format!("{}x{} element in dimension {}", e.rows(), e.cols(), d),
                });
            }
            let dev = e.hermiticity_deviation();
            if dev > consts::HERMITICITY_TOL {
                return Err(Error::NotHermitian { max_asymmetry: dev });
            }
            let min_eig = *e.hermitian_eig()?.values.last().expect("nonempty");
            if min_eig < -consts::PSD_TOL {
                return Err(Error::NotPositiveSemidefinite {
                    min_eigenvalue: min_eig,
                });
            }
            sum = &sum + e;
        }
        let dev = sum.max_abs_diff(&CMatrix::identity(d));
        if dev > consts::POVM_SUM_TOL {
            return Err(Error::PovmIncomplete { deviation: dev });
        }
        Ok(Self { elements })
    }

    pub(crate) fn trusted(elements: Vec<CMatrix>) -> Self {
        Self { elements }
    }

    /// Projective measurement along the computational basis.
    pub fn computational(d: usize) -> Self {
        Self {
            elements: (0..d)
                .map(|k| CMatrix::outer(&basis_vector(d, k), &basis_vector(d, k)))
                .collect(),
        }
    }

    /// The qubit trine: three effects (2/3)|t_y⟩⟨t_y| at 120° spacing on a
    /// Bloch great circle.
    pub fn trine() -> Self {
        let amp = (2.0f64 / 3.0).sqrt();
        let elements = (0..3)
            .map(|y| {
                let angle = 2.0 * std::f64::consts::PI * y as f64 / 3.0;
                // e^{-i angle σ_Y} |0⟩ = cos(angle)|0⟩ + sin(angle)|1⟩
                let t = vec![cr(amp * angle.cos()), cr(amp * angle.sin())];
                CMatrix::outer(&t, &t)
            })
            .collect();
        Self { elements }
    }

    pub fn dim(&self) -> usize {
        self.elements[0].rows()
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn element(&self, y: usize) -> &CMatrix {
        &self.elements[y]
    }

    pub fn elements(&self) -> &[CMatrix] {
        &self.elements
    }
}

/// Which named constructor produced a channel, with the parameters needed by
/// the closed-form dispatch. Raw channels carry no closed form.
#[derive(Clone, Debug)]
pub enum ChannelKind {
    Unitary,
    Dephasing { lambda: f64 },
    TraceClass { sigma: DensityMatrix },
    Erasure { lambda: f64 },
    Qc { povm: Povm },
    Depolarizing { lambda: f64 },
    Pauli { weights: [f64; 4] },
    AmplitudeDamping { eta: f64 },
    ShiftedDepolarizing { lambda: f64, sigma: DensityMatrix },
    Cloning,
    Raw,
}

/// Report produced by a successful CPTP validation.
#[derive(Clone, Copy, Debug)]
pub struct CptpReport {
    pub tp_residual: f64,
    pub choi_min_eig: f64,
}

/// A CPTP map held as a list of dout×din Kraus operators. Channels are
/// immutable after construction; `apply` and `adjoint_apply` are pure.
#[derive(Clone, Debug)]
pub struct Channel {
    din: usize,
    dout: usize,
    kraus: Vec<CMatrix>,
    kind: ChannelKind,
    label: String,
}

impl Channel {
    /// Builds a raw channel from Kraus operators, validating CPTP.
    pub fn from_kraus(din: usize, dout: usize, kraus: Vec<CMatrix>) -> Result<Self> {
        let ch = Self::assemble(din, dout, kraus, ChannelKind::Raw, "kraus".into())?;
        ch.validate_cptp()?;
        Ok(ch)
    }

    fn assemble(
        din: usize,
        dout: usize,
        kraus: Vec<CMatrix>,
        kind: ChannelKind,
        label: String,
    ) -> Result<Self> {
        if kraus.is_empty() {
            return Err(Error::InvalidSpec {
                detail: "channel needs at least one Kraus operator".into(),
            });
        }
        for k in &kraus {
            if k.rows() != dout || k.cols() != din {
                return Err(Error::DimensionMismatch {
                    context: "Channel Kraus operator",
                    detail: format!("{}x{}, expected {}x{}", k.rows(), k.cols(), dout, din),
                });
            }
        }
        Ok(Self {
            din,
            dout,
            kraus,
            kind,
            label,
        })
    }

    pub fn din(&self) -> usize {
        self.din
    }

    pub fn dout(&self) -> usize {
        self.dout
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn kind(&self) -> &ChannelKind {
        &self.kind
    }

    /// Constructor name plus parameters, e.g. `pauli(0.25,0.25,0.25,0.25)`.
    pub fn label(&self) -> &str {
        &self.label
    }

    /// Linear action Σ_k K X K† on an arbitrary operator.
    pub fn apply_op(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dout, self.dout);
        for k in &self.kraus {
            out = &out + &(&(k * x) * &k.adjoint());
        }
        out
    }

    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        DensityMatrix::trusted(self.apply_op(rho.mat()))
    }

    /// Adjoint action Σ_k K† X K, satisfying Tr[C(ρ)X] = Tr[ρ C†(X)].
    pub fn adjoint_apply(&self, x: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            out = &out + &(&(&k.adjoint() * x) * k);
        }
        out
    }

    /// Choi matrix Σ_ij |i⟩⟨j| ⊗ C(|i⟩⟨j|) on H_in ⊗ H_out.
    pub fn choi(&self) -> CMatrix {
        let (din, dout) = (self.din, self.dout);
        let mut choi = CMatrix::zeros(din * dout, din * dout);
        for k in &self.kraus {
            // vec(K) with index (i, a) -> i*dout + a is a Choi eigenvector
            let v: Vec<Complex64> = (0..din * dout)
                .map(|idx| k[(idx % dout, idx / dout)])
                .collect();
            choi = &choi + &CMatrix::outer(&v, &v);
        }
        choi
    }

    /// Checks trace preservation and complete positivity, naming the violated
    /// invariant and its magnitude on failure.
    pub fn validate_cptp(&self) -> Result<CptpReport> {
        let mut sum = CMatrix::zeros(self.din, self.din);
        for k in &self.kraus {
            sum = &sum + &(&k.adjoint() * k);
        }
        let tp_residual = sum.max_abs_diff(&CMatrix::identity(self.din));
        if tp_residual > consts::TRACE_PRESERVATION_TOL {
            return Err(Error::NotTracePreserving {
                residual: tp_residual,
            });
        }
        let choi = self.choi();
        let choi_min_eig = *choi.hermitian_eig()?.values.last().expect("nonempty");
        if choi_min_eig < -consts::CHOI_PSD_TOL {
            return Err(Error::NotCompletelyPositive {
                min_eigenvalue: choi_min_eig,
            });
        }
        Ok(CptpReport {
            tp_residual,
            choi_min_eig,
        })
    }

    /// Max over sampled states of |C(UρU†) - V C(ρ) V†|; zero for channels
    /// covariant under (U, V).
    pub fn check_covariance<R: Rng + ?Sized>(
        &self,
        u: &CMatrix,
        v: &CMatrix,
        samples: usize,
        rng: &mut R,
    ) -> Result<f64> {
        check_unitary("U", u, self.din)?;
        check_unitary("V", v, self.dout)?;
        let mut max_dev: f64 = 0.0;
        for _ in 0..samples {
            let rho = DensityMatrix::random(self.din, self.din, rng);
            let rotated = &(u * rho.mat()) * &u.adjoint();
            let lhs = self.apply_op(&rotated);
            let rhs = &(v * &self.apply_op(rho.mat())) * &v.adjoint();
            max_dev = max_dev.max(lhs.max_abs_diff(&rhs));
        }
        Ok(max_dev)
    }

    /// Composition self ∘ inner (inner acts first).
    pub fn compose(&self, inner: &Channel) -> Result<Channel> {
        if inner.dout != self.din {
            return Err(Error::DimensionMismatch {
                context: "Channel::compose",
                detail: format!("inner output {} vs outer input {}", inner.dout, self.din),
            });
        }
        let mut kraus = Vec::with_capacity(self.kraus.len() * inner.kraus.len());
        for a in &self.kraus {
            for b in &inner.kraus {
                kraus.push(a * b);
            }
        }
        Self::assemble(
            inner.din,
            self.dout,
            kraus,
            ChannelKind::Raw,
            format!("({}) . ({})", self.label, inner.label),
        )
    }

    /// The partial trace over one factor of H1 ⊗ H2, as a channel.
    pub fn partial_trace_channel(d1: usize, d2: usize, traced: Subsystem) -> Channel {
        let (dkeep, dtraced) = match traced {
            Subsystem::Second => (d1, d2),
            Subsystem::First => (d2, d1),
        };
        let kraus = (0..dtraced)
            .map(|k| {
                CMatrix::from_fn(dkeep, d1 * d2, |i, j| {
                    let (j1, j2) = (j / d2, j % d2);
                    let (keep_j, traced_j) = match traced {
                        Subsystem::Second => (j1, j2),
                        Subsystem::First => (j2, j1),
                    };
                    if keep_j == i && traced_j == k {
                        cr(1.0)
                    } else {
                        Complex64::ZERO
                    }
                })
            })
            .collect();
        Self {
            din: d1 * d2,
            dout: dkeep,
            kraus,
            kind: ChannelKind::Raw,
            label: format!("trace_out({traced:?} of {d1}x{d2})"),
        }
    }

    // ---- named constructors (Table-1 channel classes) ----

    /// ρ ↦ UρU†.
    pub fn unitary(u: &CMatrix) -> Result<Channel> {
        let d = u.rows();
        check_unitary("U", u, d)?;
        Self::assemble(
            d,
            d,
            vec![u.clone()],
            ChannelKind::Unitary,
            format!("unitary(d={d})"),
        )
    }

    pub fn identity(d: usize) -> Channel {
        Self::unitary(&CMatrix::identity(d)).expect("identity is unitary")
    }

    /// ρ ↦ λρ + (1-λ) Σ_k ⟨k|ρ|k⟩ |k⟩⟨k| in the computational basis.
    pub fn dephasing(lambda: f64, d: usize) -> Result<Channel> {
        Self::dephasing_with_basis(lambda, &CMatrix::identity(d))
    }

    /// Dephasing along the orthonormal basis given by the columns of `basis`.
    pub fn dephasing_with_basis(lambda: f64, basis: &CMatrix) -> Result<Channel> {
        check_range("lambda", lambda)?;
        let d = basis.rows();
        check_unitary("basis", basis, d)?;
        let mut kraus = Vec::new();
        if lambda > 0.0 {
            kraus.push(CMatrix::identity(d).scaled(lambda.sqrt()));
        }
        if lambda < 1.0 {
            for k in 0..d {
                let b = basis.column(k);
                kraus.push(CMatrix::outer(&b, &b).scaled((1.0 - lambda).sqrt()));
            }
        }
        Self::assemble(
            d,
            d,
            kraus,
            ChannelKind::Dephasing { lambda },
            format!("dephasing(lambda={lambda},d={d})"),
        )
    }

    /// ρ ↦ `Tr[ρ]σ`.
    pub fn trace_class(sigma: &DensityMatrix) -> Result<Channel> {
        let d = sigma.dim();
        let eig = sigma.mat().hermitian_eig()?;
        let mut kraus = Vec::new();
        for (i, &s) in eig.values.iter().enumerate() {
            if s <= consts::SPECTRUM_CUTOFF {
                continue;
            }
            let v = eig.vectors.column(i);
            for j in 0..d {
                kraus.push(CMatrix::outer(&v, &basis_vector(d, j)).scaled(s.sqrt()));
            }
        }
        Self::assemble(
            d,
            d,
            kraus,
            ChannelKind::TraceClass {
                sigma: sigma.clone(),
            },
            format!("trace_class(d={d})"),
        )
    }

    /// ρ ↦ `λρ ⊕ (1-λ)Tr[ρ]|φ⟩⟨φ|`, realized on H ⊕ span{|φ⟩} with |φ⟩ the
    /// last basis vector of a (din+1)-dimensional space.
    pub fn erasure(lambda: f64, din: usize) -> Result<Channel> {
        check_range("lambda", lambda)?;
        let dout = din + 1;
        let mut kraus = Vec::new();
        if lambda > 0.0 {
            // injection H -> H ⊕ K
            let inj = CMatrix::from_fn(dout, din, |i, j| {
                if i == j {
                    cr(lambda.sqrt())
                } else {
                    Complex64::ZERO
                }
            });
            kraus.push(inj);
        }
        if lambda < 1.0 {
            let phi = basis_vector(dout, din);
            for j in 0..din {
                kraus.push(
                    CMatrix::outer(&phi, &basis_vector(din, j)).scaled((1.0 - lambda).sqrt()),
                );
            }
        }
        Self::assemble(
            din,
            dout,
            kraus,
            ChannelKind::Erasure { lambda },
            format!("erasure(lambda={lambda},d={din})"),
        )
    }

    /// Quantum-classical channel ρ ↦ Σ_y Tr[ρ π_y] |y⟩⟨y|.
    pub fn qc(povm: &Povm) -> Result<Channel> {
        let din = povm.dim();
        let dout = povm.len();
        let mut kraus = Vec::new();
        for (y, element) in povm.elements().iter().enumerate() {
            // PSD square-root factorization π_y = Σ_w s_w |v_w⟩⟨v_w|
            let eig = element.hermitian_eig()?;
            for (w, &s) in eig.values.iter().enumerate() {
                if s <= consts::SPECTRUM_CUTOFF {
                    continue;
                }
                let v = eig.vectors.column(w);
                kraus.push(CMatrix::outer(&basis_vector(dout, y), &v).scaled(s.sqrt()));
            }
        }
        Self::assemble(
            din,
            dout,
            kraus,
            ChannelKind::Qc { povm: povm.clone() },
            format!("qc(k={dout},d={din})"),
        )
    }

    /// ρ ↦ `λρ + (1-λ)Tr[ρ] I/d`, as a uniform Weyl mixture.
    pub fn depolarizing(lambda: f64, d: usize) -> Result<Channel> {
        check_range("lambda", lambda)?;
        let dd = (d * d) as f64;
        let mut kraus = Vec::new();
        let w_id = lambda + (1.0 - lambda) / dd;
        if w_id > 0.0 {
            kraus.push(CMatrix::identity(d).scaled(w_id.sqrt()));
        }
        let w = (1.0 - lambda) / dd;
        if w > 0.0 {
            for a in 0..d {
                for b in 0..d {
                    if a == 0 && b == 0 {
                        continue;
                    }
                    kraus.push(weyl_operator(d, a, b).scaled(w.sqrt()));
                }
            }
        }
        Self::assemble(
            d,
            d,
            kraus,
            ChannelKind::Depolarizing { lambda },
            format!("depolarizing(lambda={lambda},d={d})"),
        )
    }

    /// Qubit Pauli channel ρ ↦ Σ_k λ_k σ_k ρ σ_k.
    pub fn pauli(weights: [f64; 4]) -> Result<Channel> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| w < -consts::PARAM_TOL)
            || (sum - 1.0).abs() > consts::PRIOR_SUM_TOL.max(1e-10)
        {
            return Err(Error::InvalidParameter {
                name: "weights",
                value: sum,
                expected: "probability vector over {I, X, Y, Z}",
            });
        }
        let mut kraus = Vec::new();
        for (k, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            kraus.push(pauli_matrix(k).scaled(w.sqrt()));
        }
        Self::assemble(
            2,
            2,
            kraus,
            ChannelKind::Pauli { weights },
            format!(
                "pauli({},{},{},{})",
                weights[0], weights[1], weights[2], weights[3]
            ),
        )
    }

    /// Qubit amplitude damping with survival parameter η.
    pub fn amplitude_damping(eta: f64) -> Result<Channel> {
        check_range("eta", eta)?;
        let k0 = CMatrix::diag(&[1.0, eta.sqrt()]);
        let k1 = CMatrix::from_rows(&[
            vec![Complex64::ZERO, cr((1.0 - eta).sqrt())],
            vec![Complex64::ZERO, Complex64::ZERO],
        ])?;
        Self::assemble(
            2,
            2,
            vec![k0, k1],
            ChannelKind::AmplitudeDamping { eta },
            format!("amplitude_damping(eta={eta})"),
        )
    }

    /// ρ ↦ `λρ + (1-λ)Tr[ρ]σ`.
    pub fn shifted_depolarizing(lambda: f64, sigma: &DensityMatrix) -> Result<Channel> {
        check_range("lambda", lambda)?;
        let d = sigma.dim();
        let mut kraus = Vec::new();
        if lambda > 0.0 {
            kraus.push(CMatrix::identity(d).scaled(lambda.sqrt()));
        }
        if lambda < 1.0 {
            let eig = sigma.mat().hermitian_eig()?;
            for (i, &s) in eig.values.iter().enumerate() {
                let w = (1.0 - lambda) * s;
                if w <= consts::SPECTRUM_CUTOFF {
                    continue;
                }
                let v = eig.vectors.column(i);
                for j in 0..d {
                    kraus.push(CMatrix::outer(&v, &basis_vector(d, j)).scaled(w.sqrt()));
                }
            }
        }
        Self::assemble(
            d,
            d,
            kraus,
            ChannelKind::ShiftedDepolarizing {
                lambda,
                sigma: sigma.clone(),
            },
            format!("shifted_depolarizing(lambda={lambda},d={d})"),
        )
    }

    /// Optimal universal 1→2 cloning, ρ ↦ 2/(d+1) P_s (ρ ⊗ I) P_s, with
    /// Kraus operators extracted from the Choi eigendecomposition.
    pub fn cloning_1to2(d: usize) -> Result<Channel> {
        if d < 2 {
            return Err(Error::InvalidParameter {
                name: "d",
                value: d as f64,
                expected: "dimension >= 2",
            });
        }
        let dout = d * d;
        let ps = symmetric_projector(d);
        let scale = 2.0 / (d as f64 + 1.0);
        let map = |x: &CMatrix| -> CMatrix {
            let lifted = x.kron(&CMatrix::identity(d));
            (&(&ps * &lifted) * &ps).scaled(scale)
        };
        let choi = choi_of_map(d, dout, map);
        let kraus = kraus_from_choi(&choi, d, dout)?;
        let ch = Self::assemble(
            d,
            dout,
            kraus,
            ChannelKind::Cloning,
            format!("cloning_1to2(d={d})"),
        )?;
        ch.validate_cptp()?;
        Ok(ch)
    }

    /// Random CPTP channel from a Haar-ish random isometry with the given
    /// environment rank.
    pub fn haar_random<R: Rng + ?Sized>(
        din: usize,
        dout: usize,
        rank: usize,
        rng: &mut R,
    ) -> Channel {
        assert!(dout * rank >= din, "isometry needs dout*rank >= din");
        let isometry = loop {
            let g = ginibre(dout * rank, din, rng);
            if let Some(v) = orthonormalize_columns(&g) {
                break v;
            }
        };
        let kraus = (0..rank)
            .map(|e| CMatrix::from_fn(dout, din, |a, i| isometry[(e * dout + a, i)]))
            .collect();
        Self {
            din,
            dout,
            kraus,
            kind: ChannelKind::Raw,
            label: format!("random({din}->{dout},rank={rank})"),
        }
    }
}

/// Choi matrix of an arbitrary linear map given as a closure.
pub fn choi_of_map(din: usize, dout: usize, map: impl Fn(&CMatrix) -> CMatrix) -> CMatrix {
    let mut choi = CMatrix::zeros(din * dout, din * dout);
    for i in 0..din {
        for j in 0..din {
            let mut unit = CMatrix::zeros(din, din);
            unit[(i, j)] = cr(1.0);
            let image = map(&unit);
            for a in 0..dout {
                for b in 0..dout {
                    choi[(i * dout + a, j * dout + b)] = image[(a, b)];
                }
            }
        }
    }
    choi
}

/// Kraus operators from a Choi eigendecomposition, dropping eigenvalues
/// below the Kraus cutoff.
fn kraus_from_choi(choi: &CMatrix, din: usize, dout: usize) -> Result<Vec<CMatrix>> {
    let eig = choi.hermitian_eig()?;
    let min_eig = *eig.values.last().expect("nonempty");
    if min_eig < -consts::CHOI_PSD_TOL {
        return Err(Error::NotCompletelyPositive {
            min_eigenvalue: min_eig,
        });
    }
    let mut kraus = Vec::new();
    for (k, &mu) in eig.values.iter().enumerate() {
        if mu <= consts::CHOI_KRAUS_CUTOFF {
            continue;
        }
        let w = eig.vectors.column(k);
        kraus.push(CMatrix::from_fn(dout, din, |a, i| {
            w[i * dout + a] * cr(mu.sqrt())
        }));
    }
    Ok(kraus)
}

/// Projector onto the symmetric subspace of H ⊗ H.
pub fn symmetric_projector(d: usize) -> CMatrix {
    let dd = d * d;
    let mut swap = CMatrix::zeros(dd, dd);
    for i in 0..d {
        for j in 0..d {
            swap[(i * d + j, j * d + i)] = cr(1.0);
        }
    }
    (&CMatrix::identity(dd) + &swap).scaled(0.5)
}

/// Pauli matrix σ_k for k ∈ {0: I, 1: X, 2: Y, 3: Z}.
pub fn pauli_matrix(k: usize) -> CMatrix {
    match k {
        0 => CMatrix::identity(2),
        1 => CMatrix::from_fn(2, 2, |i, j| if i != j { cr(1.0) } else { Complex64::ZERO }),
        2 => CMatrix::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c(0.0, -1.0),
            (1, 0) => c(0.0, 1.0),
            _ => Complex64::ZERO,
        }),
        3 => CMatrix::diag(&[1.0, -1.0]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Weyl (generalized Pauli) operator X^a Z^b in dimension d.
fn weyl_operator(d: usize, a: usize, b: usize) -> CMatrix {
    let omega = 2.0 * std::f64::consts::PI / d as f64;
    CMatrix::from_fn(d, d, |i, j| {
        if i == (j + a) % d {
            let phase = omega * (b * j) as f64;
            c(phase.cos(), phase.sin())
        } else {
            Complex64::ZERO
        }
    })
}

fn check_range(name: &'static str, value: f64) -> Result<()> {
    if !((-consts::PARAM_TOL..=1.0 + consts::PARAM_TOL).contains(&value)) {
        return Err(Error::InvalidParameter {
            name,
            value,
            expected: "[0, 1]",
        });
    }
    Ok(())
}

fn check_unitary(name: &'static str, u: &CMatrix, d: usize) -> Result<()> {
    if u.rows() != d || u.cols() != d {
        return Err(Error::DimensionMismatch {
            context: "unitary",
            detail: format!("{name} is {}x{}, expected {d}x{d}", u.rows(), u.cols()),
        });
    }
    let dev = (&u.adjoint() * u).max_abs_diff(&CMatrix::identity(d));
    if dev > 1e-9 {
        return Err(Error::InvalidSpec {
            detail: format!("{name} is not unitary: |U†U - I| = {dev:.3e}"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn named_channels() -> Vec<Channel> {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let sigma = DensityMatrix::random(2, 2, &mut rng);
        let sigma3 = DensityMatrix::random(3, 3, &mut rng);
        vec![
            Channel::identity(3),
            Channel::unitary(&crate::matcore::haar_unitary(3, &mut rng)).unwrap(),
            Channel::dephasing(0.37, 3).unwrap(),
            Channel::trace_class(&sigma3).unwrap(),
            Channel::erasure(0.6, 2).unwrap(),
            Channel::qc(&Povm::trine()).unwrap(),
            Channel::qc(&Povm::computational(3)).unwrap(),
            Channel::depolarizing(0.55, 3).unwrap(),
            Channel::pauli([0.4, 0.3, 0.2, 0.1]).unwrap(),
            Channel::amplitude_damping(0.5).unwrap(),
            Channel::shifted_depolarizing(0.5, &sigma).unwrap(),
            Channel::cloning_1to2(2).unwrap(),
            Channel::cloning_1to2(3).unwrap(),
        ]
    }

    #[test]
    fn constructors_pass_cptp_validation() {
        for ch in named_channels() {
            let report = ch
                .validate_cptp()
                .unwrap_or_else(|e| panic!("{} failed: {e}", ch.label()));
            assert!(report.tp_residual <= consts::TRACE_PRESERVATION_TOL);
            assert!(report.choi_min_eig >= -consts::CHOI_PSD_TOL);
        }
    }

    #[test]
    fn validate_rejects_scaled_identity() {
        let bad = Channel::assemble(
            2,
            2,
            vec![CMatrix::identity(2).scaled(1.1)],
            ChannelKind::Raw,
            "bad".into(),
        )
        .unwrap();
        match bad.validate_cptp() {
            Err(Error::NotTracePreserving { residual }) => assert!(residual > 0.2),
            other => panic!("expected NotTracePreserving, got {other:?}"),
        }
    }

    #[test]
    fn identity_channel_is_identity() {
        let ch = Channel::identity(2);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let rho = DensityMatrix::random(2, 2, &mut rng);
        assert!(ch.apply(&rho).mat().max_abs_diff(rho.mat()) < 1e-14);
    }

    #[test]
    fn full_depolarizing_sends_to_mixed() {
        let ch = Channel::depolarizing(0.0, 2).unwrap();
        let out = ch.apply(&DensityMatrix::basis_state(2, 0));
        assert!(out.mat().max_abs_diff(&CMatrix::identity(2).scaled(0.5)) < 1e-12);
    }

    #[test]
    fn amplitude_damping_matches_definition() {
        // A_η maps [[1-β, γ], [γ*, β]] to [[1-ηβ, √η γ], [√η γ*, ηβ]]
        let eta = 0.3;
        let ch = Channel::amplitude_damping(eta).unwrap();
        let (beta, gamma) = (0.4, c(0.1, 0.2));
        let rho = CMatrix::from_rows(&[vec![cr(1.0 - beta), gamma], vec![gamma.conj(), cr(beta)]])
            .unwrap();
        let out = ch.apply_op(&rho);
        let expected = CMatrix::from_rows(&[
            vec![cr(1.0 - eta * beta), gamma * cr(eta.sqrt())],
            vec![gamma.conj() * cr(eta.sqrt()), cr(eta * beta)],
        ])
        .unwrap();
        assert!(out.max_abs_diff(&expected) < 1e-14);
    }

    #[test]
    fn adjoint_identity_on_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for ch in named_channels() {
            for _ in 0..8 {
                let rho = DensityMatrix::random(ch.din(), ch.din(), &mut rng);
                let g = ginibre(ch.dout(), ch.dout(), &mut rng);
                let x = (&g + &g.adjoint()).scaled(0.5);
                let lhs = (&ch.apply_op(rho.mat()) * &x).trace();
                let rhs = (rho.mat() * &ch.adjoint_apply(&x)).trace();
                assert!(
                    (lhs - rhs).norm() < 1e-10 * (1.0 + x.max_abs()),
                    "adjoint identity failed for {}",
                    ch.label()
                );
            }
        }
    }

    #[test]
    fn adjoint_of_unital_preserves_identity() {
        let ch = Channel::depolarizing(0.3, 3).unwrap();
        let out = ch.adjoint_apply(&CMatrix::identity(3));
        assert!(out.max_abs_diff(&CMatrix::identity(3)) < 1e-12);
    }

    #[test]
    fn adjoint_of_trace_class() {
        // T(ρ) = Tr[ρ]σ has adjoint T†(X) = Tr[σX]·I
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let sigma = DensityMatrix::random(3, 3, &mut rng);
        let ch = Channel::trace_class(&sigma).unwrap();
        let g = ginibre(3, 3, &mut rng);
        let x = (&g + &g.adjoint()).scaled(0.5);
        let expected = CMatrix::identity(3).scaled((sigma.mat() * &x).trace().re);
        assert!(ch.adjoint_apply(&x).max_abs_diff(&expected) < 1e-10);
    }

    #[test]
    fn pauli_identity_point() {
        let ch = Channel::pauli([1.0, 0.0, 0.0, 0.0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = DensityMatrix::random(2, 2, &mut rng);
        assert!(ch.apply(&rho).mat().max_abs_diff(rho.mat()) < 1e-14);
    }

    #[test]
    fn depolarizing_equals_shifted_at_uniform_sigma() {
        for d in [2usize, 3] {
            let lam = 0.42;
            let dep = Channel::depolarizing(lam, d).unwrap();
            let shifted =
                Channel::shifted_depolarizing(lam, &DensityMatrix::maximally_mixed(d)).unwrap();
            assert!(dep.choi().max_abs_diff(&shifted.choi()) < 1e-10);
        }
    }

    #[test]
    fn cloning_partial_trace_is_depolarizing() {
        for d in [2usize, 3] {
            let cloning = Channel::cloning_1to2(d).unwrap();
            let reduced = Channel::partial_trace_channel(d, d, Subsystem::Second)
                .compose(&cloning)
                .unwrap();
            let lambda = (d as f64 + 2.0) / (2.0 * (d as f64 + 1.0));
            let dep = Channel::depolarizing(lambda, d).unwrap();
            assert!(reduced.choi().max_abs_diff(&dep.choi()) < 1e-10);
        }
    }

    #[test]
    fn cloning_outputs_commute_on_basis_states() {
        let ch = Channel::cloning_1to2(2).unwrap();
        let n0 = ch.apply_op(DensityMatrix::basis_state(2, 0).mat());
        let n1 = ch.apply_op(DensityMatrix::basis_state(2, 1).mat());
        let comm = &(&n0 * &n1) - &(&n1 * &n0);
        assert!(comm.max_abs() < 1e-10);
    }

    #[test]
    fn covariance_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let id = Channel::identity(2);
        let u = crate::matcore::haar_unitary(2, &mut rng);
        assert!(id.check_covariance(&u, &u, 5, &mut rng).unwrap() < 1e-12);

        // universal cloning is covariant with V = U ⊗ U
        let cloning = Channel::cloning_1to2(2).unwrap();
        let u = crate::matcore::haar_unitary(2, &mut rng);
        let v = u.kron(&u);
        assert!(cloning.check_covariance(&u, &v, 5, &mut rng).unwrap() < 1e-9);

        // dephasing is not covariant under a basis-misaligned rotation
        let deph = Channel::dephasing(0.3, 2).unwrap();
        let h = (&pauli_matrix(1) + &pauli_matrix(3)).scaled(std::f64::consts::FRAC_1_SQRT_2);
        assert!(deph.check_covariance(&h, &h, 10, &mut rng).unwrap() > 1e-3);
    }

    #[test]
    fn qc_channel_is_classical() {
        let ch = Channel::qc(&Povm::trine()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(30);
        let rho = DensityMatrix::random(2, 2, &mut rng);
        let out = ch.apply(&rho);
        // diagonal output with entries Tr[ρ π_y]
        for y in 0..3 {
            let expected = (rho.mat() * Povm::trine().element(y)).trace().re;
            assert!((out.mat()[(y, y)].re - expected).abs() < 1e-12);
            for z in 0..3 {
                if z != y {
                    assert!(out.mat()[(y, z)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn erasure_structure() {
        let lam = 0.25;
        let ch = Channel::erasure(lam, 2).unwrap();
        let rho = DensityMatrix::basis_state(2, 1);
        let out = ch.apply(&rho);
        assert_eq!(out.dim(), 3);
        assert!((out.mat()[(1, 1)].re - lam).abs() < 1e-12);
        assert!((out.mat()[(2, 2)].re - (1.0 - lam)).abs() < 1e-12);
    }

    #[test]
    fn povm_validation() {
        assert!(Povm::new(vec![CMatrix::identity(2).scaled(0.5)]).is_err());
        let povm = Povm::new(vec![CMatrix::diag(&[1.0, 0.3]), CMatrix::diag(&[0.0, 0.7])]).unwrap();
        assert_eq!(povm.len(), 2);
        let trine = Povm::trine();
        let sum = trine
            .elements()
            .iter()
            .fold(CMatrix::zeros(2, 2), |acc, e| &acc + e);
        assert!(sum.max_abs_diff(&CMatrix::identity(2)) < 1e-12);
    }

    #[test]
    fn density_matrix_validation() {
        assert!(DensityMatrix::new(CMatrix::diag(&[0.5, 0.6])).is_err());
        assert!(DensityMatrix::new(CMatrix::diag(&[1.5, -0.5])).is_err());
        assert!(DensityMatrix::new(CMatrix::diag(&[0.5, 0.5])).is_ok());
    }
}

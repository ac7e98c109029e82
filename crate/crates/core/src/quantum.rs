//! Quantum Bayesian agents on finite-dimensional Hilbert spaces.
//!
//! States are density operators, measurements are projection-valued measures,
//! and Bayesian updates use the star product `E ⋆ ρ = ρ^{1/2} E ρ^{1/2}`. Two
//! states are compatible when their supports share a non-zero vector.
//!
//! Two-qubit conventions: tensor factor 0 is the system `S`, factor 1 the
//! friend's memory `F`; the basis order is `|00⟩, |01⟩, |10⟩, |11⟩`.
//!
//! Only pooling of classical distributions is provided; there is no canonical
//! non-commutative analogue of the multiplicative pool, so none is offered here.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classical::{OutcomeSpace, ProbDist};
use crate::error::{Error, Result};
use crate::numerics::{
    hermitian_eig, star_product, subspace_intersection_basis, support_projector, ComplexMatrix,
    ATOL, ONE, RTOL, SUPPORT_TOL, ZERO,
};

/// Trace tolerance for density operators.
pub const TRACE_TOL: f64 = 1e-9;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Hermitian, positive semidefinite, unit-trace operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityOperator {
    matrix: ComplexMatrix,
    label: Option<String>,
}

impl DensityOperator {
    /// Validates `matrix` and stores its Hermitian part.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let herr = matrix.hermiticity_error();
        if herr > ATOL {
            return Err(Error::NotHermitian(herr));
        }
        let matrix = matrix.hermitian_part();
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {trace}")));
        }
        let spectrum = hermitian_eig(&matrix)?;
        if let Some(&lowest) = spectrum.eigenvalues.last() {
            if lowest < -ATOL {
                return Err(Error::NotPsd(lowest));
            }
        }
        Ok(Self {
            matrix,
            label: None,
        })
    }

    /// `|v⟩⟨v| / ⟨v|v⟩`.
    pub fn pure(v: &[Complex64]) -> Result<Self> {
        let norm_sqr: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sqr <= ATOL {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(ComplexMatrix::outer(v).scale_real(1.0 / norm_sqr))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
            label: None,
        }
    }

    /// Embeds a distribution as a diagonal operator on a classical register.
    pub fn diagonal(dist: &ProbDist) -> Self {
        Self {
            matrix: ComplexMatrix::diagonal(dist.probs()),
            label: None,
        }
    }

    /// Convex mixture `Σ w_i ρ_i`; weights must be non-negative and sum to one.
    pub fn mixture(parts: &[(f64, &DensityOperator)]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidState("empty mixture".into()))?;
        let mut m = ComplexMatrix::zeros(first.1.dim());
        for &(w, rho) in parts {
            if rho.dim() != m.dim() {
                return Err(Error::DimMismatch(m.dim(), rho.dim()));
            }
            if w < 0.0 {
                return Err(Error::BadWeights(format!("negative weight {w}")));
            }
            m = &m + &rho.matrix.scale_real(w);
        }
        Self::new(m)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// Number of eigenvalues above `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        hermitian_eig(&self.matrix)
            .expect("density operators are Hermitian")
            .rank_above(tol)
    }

    /// Projector onto the span of eigenvectors with eigenvalue above `tol`.
    pub fn support(&self, tol: f64) -> ComplexMatrix {
        support_projector(&self.matrix, tol).expect("density operators are PSD")
    }

    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self.matrix.max_abs_diff(&other.matrix))
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::DimMismatch(a, b));
    }
    Ok(())
}

/// The four Bell states.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bell {
    PhiPlus,
    PhiMinus,
    PsiPlus,
    PsiMinus,
}

impl Bell {
    pub const ALL: [Bell; 4] = [Bell::PhiPlus, Bell::PhiMinus, Bell::PsiPlus, Bell::PsiMinus];

    pub fn label(self) -> &'static str {
        match self {
            Bell::PhiPlus => "phi+",
            Bell::PhiMinus => "phi-",
            Bell::PsiPlus => "psi+",
            Bell::PsiMinus => "psi-",
        }
    }

    /// `φ± = (|00⟩ ± |11⟩)/√2`, `ψ± = (|01⟩ ± |10⟩)/√2`.
    pub fn vector(self) -> Vec<Complex64> {
        let h = c(FRAC_1_SQRT_2, 0.0);
        match self {
            Bell::PhiPlus => vec![h, ZERO, ZERO, h],
            Bell::PhiMinus => vec![h, ZERO, ZERO, -h],
            Bell::PsiPlus => vec![ZERO, h, h, ZERO],
            Bell::PsiMinus => vec![ZERO, h, -h, ZERO],
        }
    }

    pub fn projector(self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.vector())
    }

    pub fn state(self) -> DensityOperator {
        DensityOperator::pure(&self.vector())
            .expect("Bell vectors are normalised")
            .with_label(self.label())
    }
}

/// Computational basis vector `|index⟩` of a `dim`-dimensional space.
pub fn basis_ket(dim: usize, index: usize) -> Vec<Complex64> {
    let mut v = vec![ZERO; dim];
    v[index] = ONE;
    v
}

pub fn hadamard() -> ComplexMatrix {
    let h = FRAC_1_SQRT_2;
    ComplexMatrix::from_real_rows(&[vec![h, h], vec![h, -h]])
}

pub fn pauli_x() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]])
}

pub fn pauli_y() -> ComplexMatrix {
    ComplexMatrix::from_rows(&[vec![ZERO, c(0.0, -1.0)], vec![c(0.0, 1.0), ZERO]])
}

pub fn pauli_z() -> ComplexMatrix {
    ComplexMatrix::diagonal(&[1.0, -1.0])
}

/// CNOT with control on factor 0 and target on factor 1.
pub fn cnot() -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[
        vec![1.0, 0.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0, 0.0],
        vec![0.0, 0.0, 0.0, 1.0],
        vec![0.0, 0.0, 1.0, 0.0],
    ])
}

/// `diag(1, 1, 1, e^{iφ})`.
pub fn controlled_phase(phi: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::identity(4);
    m[(3, 3)] = Complex64::from_polar(1.0, phi);
    m
}

/// `exp(-i (ωt/2) σ_y) = [[cos(ωt/2), -sin(ωt/2)], [sin(ωt/2), cos(ωt/2)]]`.
pub fn sigma_y_evolution(omega_t: f64) -> ComplexMatrix {
    let (s, co) = (omega_t / 2.0).sin_cos();
    ComplexMatrix::from_real_rows(&[vec![co, -s], vec![s, co]])
}

/// Projection-valued measure: labelled orthogonal projectors summing to the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Pvm {
    effects: Vec<(String, ComplexMatrix)>,
}

impl Pvm {
    pub fn new(effects: Vec<(String, ComplexMatrix)>) -> Result<Self> {
        let first = effects
            .first()
            .ok_or_else(|| Error::InvalidLikelihood("PVM without effects".into()))?;
        let dim = first.1.dim();
        OutcomeSpace::new(effects.iter().map(|(l, _)| l.clone()))?;
        let mut total = ComplexMatrix::zeros(dim);
        for (i, (_, p)) in effects.iter().enumerate() {
            check_dims(dim, p.dim())?;
            if !p.is_projector() {
                return Err(Error::NotProjector);
            }
            for (_, q) in &effects[..i] {
                if (p * q).max_abs() > RTOL {
                    return Err(Error::InvalidLikelihood(
                        "PVM effects are not orthogonal".into(),
                    ));
                }
            }
            total = &total + p;
        }
        if total.max_abs_diff(&ComplexMatrix::identity(dim)) > RTOL {
            return Err(Error::InvalidLikelihood(
                "PVM effects do not sum to the identity".into(),
            ));
        }
        Ok(Self { effects })
    }

    /// Bell-basis measurement with labels `phi+, phi-, psi+, psi-`.
    pub fn bell() -> Self {
        Self {
            effects: Bell::ALL
                .iter()
                .map(|b| (b.label().to_string(), b.projector()))
                .collect(),
        }
    }

    /// Computational-basis measurement. Labels are binary strings of
    /// `log2(dim)` digits when `dim` is a power of two, decimal indices otherwise.
    pub fn computational(dim: usize) -> Self {
        let width = if dim.is_power_of_two() {
            dim.trailing_zeros() as usize
        } else {
            0
        };
        let effects = (0..dim)
            .map(|k| {
                let label = if width > 0 {
                    format!("{k:0width$b}")
                } else {
                    k.to_string()
                };
                (label, ComplexMatrix::outer(&basis_ket(dim, k)))
            })
            .collect();
        Self { effects }
    }

    pub fn effects(&self) -> &[(String, ComplexMatrix)] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].1.dim()
    }

    pub fn outcome_space(&self) -> OutcomeSpace {
        OutcomeSpace::new(self.effects.iter().map(|(l, _)| l.clone()))
            .expect("labels validated on construction")
    }
}

/// Quantum channel in Kraus form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Requires `Σ κ_i† κ_i = 1`.
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        let dim = operators.first().ok_or(Error::InvalidChannel)?.dim();
        let mut total = ComplexMatrix::zeros(dim);
        for k in &operators {
            if k.dim() != dim {
                return Err(Error::InvalidChannel);
            }
            total = &total + &(&k.adjoint() * k);
        }
        if total.max_abs_diff(&ComplexMatrix::identity(dim)) > RTOL {
            return Err(Error::InvalidChannel);
        }
        Ok(Self { operators })
    }

    /// Two-qubit dephasing of the system: `κ0 = √(1-ε) 1⊗1`, `κ1 = √ε σ_z⊗1`.
    pub fn noisy(epsilon: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&epsilon) {
            return Err(Error::BadConfig(format!(
                "noise strength {epsilon} outside [0, 1]"
            )));
        }
        let id = ComplexMatrix::identity(2);
        Self::new(vec![
            ComplexMatrix::identity(4).scale_real((1.0 - epsilon).sqrt()),
            pauli_z().kron(&id).scale_real(epsilon.sqrt()),
        ])
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }
}

/// Outcome-indexed PSD effects summing to the identity: a conditional state
/// `ρ_{X|S}` for a classical variable `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LikelihoodOperator {
    outcome_space: OutcomeSpace,
    effects: Vec<ComplexMatrix>,
}

impl LikelihoodOperator {
    pub fn new(outcome_space: OutcomeSpace, effects: Vec<ComplexMatrix>) -> Result<Self> {
        if effects.len() != outcome_space.len() || effects.is_empty() {
            return Err(Error::InvalidLikelihood(format!(
                "{} effects for {} outcomes",
                effects.len(),
                outcome_space.len()
            )));
        }
        let dim = effects[0].dim();
        let mut total = ComplexMatrix::zeros(dim);
        for e in &effects {
            check_dims(dim, e.dim())?;
            let spectrum =
                hermitian_eig(e).map_err(|err| Error::InvalidLikelihood(err.to_string()))?;
            if spectrum.eigenvalues.last().is_some_and(|&l| l < -ATOL) {
                return Err(Error::InvalidLikelihood(
                    "effect is not positive semidefinite".into(),
                ));
            }
            total = &total + e;
        }
        if total.max_abs_diff(&ComplexMatrix::identity(dim)) > RTOL {
            return Err(Error::InvalidLikelihood(
                "effects do not sum to the identity".into(),
            ));
        }
        Ok(Self {
            outcome_space,
            effects,
        })
    }

    /// Two-outcome family `{observed ↦ effect, other ↦ 1 - effect}`.
    pub fn binary(effect: ComplexMatrix, observed: &str, other: &str) -> Result<Self> {
        let complement = &ComplexMatrix::identity(effect.dim()) - &effect;
        Self::new(
            OutcomeSpace::new([observed, other])?,
            vec![effect, complement],
        )
    }

    pub fn outcome_space(&self) -> &OutcomeSpace {
        &self.outcome_space
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }

    pub fn dim(&self) -> usize {
        self.effects[0].dim()
    }

    pub fn effect(&self, label: &str) -> Result<&ComplexMatrix> {
        Ok(&self.effects[self.outcome_space.index_of(label)?])
    }
}

/// Born probabilities are rounded to multiples of `1 / BORN_SCALE`; this removes
/// round-off left by the matrix products so that exact cases come out exact.
pub const BORN_SCALE: f64 = 1e12;

/// `Tr(E_i ρ)` for every effect of the measurement, rounded to a grid of `1 / BORN_SCALE`.
pub fn born_probabilities(state: &DensityOperator, pvm: &Pvm) -> Result<ProbDist> {
    check_dims(pvm.dim(), state.dim())?;
    let probs = pvm
        .effects
        .iter()
        .map(|(_, e)| ((e * &state.matrix).trace().re.max(0.0) * BORN_SCALE).round() / BORN_SCALE)
        .collect();
    ProbDist::new(pvm.outcome_space(), probs)
}

/// `U ρ U†`.
pub fn evolve_unitary(state: &DensityOperator, u: &ComplexMatrix) -> Result<DensityOperator> {
    check_dims(u.dim(), state.dim())?;
    if !u.is_unitary() {
        return Err(Error::NotUnitary);
    }
    DensityOperator::new(&(u * &state.matrix) * &u.adjoint())
}

/// `Σ κ_i ρ κ_i†`.
pub fn evolve_channel(state: &DensityOperator, ch: &KrausChannel) -> Result<DensityOperator> {
    let dim = state.dim();
    let mut out = ComplexMatrix::zeros(dim);
    for k in &ch.operators {
        check_dims(k.dim(), dim)?;
        out = &out + &(&(k * &state.matrix) * &k.adjoint());
    }
    DensityOperator::new(out)
}

/// Orthonormal basis of `supp(a) ∩ supp(b)`.
pub fn common_support_basis(
    a: &DensityOperator,
    b: &DensityOperator,
    tol: f64,
) -> Result<Vec<Vec<Complex64>>> {
    check_dims(a.dim(), b.dim())?;
    subspace_intersection_basis(&a.support(tol), &b.support(tol), tol)
}

/// True iff the supports of `a` and `b` share a non-zero vector.
pub fn quantum_compatible(a: &DensityOperator, b: &DensityOperator, tol: f64) -> Result<bool> {
    Ok(!common_support_basis(a, b, tol)?.is_empty())
}

/// True iff all states coincide entrywise within 1e-9.
pub fn quantum_agree(states: &[DensityOperator]) -> Result<bool> {
    let Some(first) = states.first() else {
        return Ok(true);
    };
    let mut all = true;
    for s in &states[1..] {
        all &= first.max_abs_diff(s)? <= TRACE_TOL;
    }
    Ok(all)
}

/// The test "is the system in state `target`?": outcome `0` has effect
/// `|Ψ⟩⟨Ψ|`, outcome `1` has `1 - |Ψ⟩⟨Ψ|`.
pub fn projective_likelihood(target: &DensityOperator) -> Result<LikelihoodOperator> {
    let spectrum = hermitian_eig(&target.matrix)?;
    let rank = spectrum.rank_above(SUPPORT_TOL);
    if rank != 1 {
        return Err(Error::NotPure(rank));
    }
    LikelihoodOperator::binary(ComplexMatrix::outer(&spectrum.eigenvectors[0]), "0", "1")
}

/// Star-product Bayes update `(E ⋆ ρ) / Tr(E ρ)`.
pub fn quantum_bayes_update(
    prior: &DensityOperator,
    lik: &LikelihoodOperator,
    observed: &str,
) -> Result<DensityOperator> {
    check_dims(lik.dim(), prior.dim())?;
    let effect = lik.effect(observed)?;
    let evidence = (effect * &prior.matrix).trace().re;
    if evidence <= ATOL {
        return Err(Error::ZeroEvidence(evidence));
    }
    let joint = star_product(effect, &prior.matrix)?;
    DensityOperator::new(joint.scale_real(1.0 / evidence))
}

/// Updates `prior` on an expert's announced state `report`.
pub fn quantum_improve(
    prior: &DensityOperator,
    report_lik: &LikelihoodOperator,
    report: &str,
) -> Result<DensityOperator> {
    quantum_bayes_update(prior, report_lik, report)
}

/// Which classical register of a [`HybridState`] to condition on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Party {
    Friend,
    Wigner,
}

/// One classical outcome `(F=f, W=w)` of a hybrid state with its weight and
/// conditional quantum state.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridBranch {
    pub f: String,
    pub w: String,
    pub weight: f64,
    pub state: DensityOperator,
    /// Set when `state` is arbitrary because the branch carries no weight.
    pub placeholder: bool,
}

/// Classical-quantum state `Σ P(f, w) |f w⟩⟨f w| ⊗ ρ_{S|f,w}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HybridState {
    pub friend_space: OutcomeSpace,
    pub wigner_space: OutcomeSpace,
    pub branches: Vec<HybridBranch>,
}

impl HybridState {
    pub fn branch(&self, f: &str, w: &str) -> Option<&HybridBranch> {
        self.branches.iter().find(|b| b.f == f && b.w == w)
    }

    fn relevant(&self) -> impl Iterator<Item = &HybridBranch> {
        self.branches
            .iter()
            .filter(|b| !(b.placeholder && b.weight <= ATOL))
    }

    /// Compares weights and states of all non-placeholder branches within `tol`.
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let mine: Vec<_> = self.relevant().collect();
        let theirs: Vec<_> = other.relevant().collect();
        mine.len() == theirs.len()
            && mine.iter().all(|a| {
                theirs.iter().any(|b| {
                    a.f == b.f
                        && a.w == b.w
                        && (a.weight - b.weight).abs() <= tol
                        && a.state.max_abs_diff(&b.state).is_ok_and(|d| d <= tol)
                })
            })
    }
}

impl PartialEq for HybridState {
    fn eq(&self, other: &Self) -> bool {
        self.friend_space == other.friend_space
            && self.wigner_space == other.wigner_space
            && self.approx_eq(other, 0.0)
    }
}

/// Builds a hybrid state from which `friend` and `wigner` are recovered by
/// conditioning on `F=0` and `W=0` respectively.
///
/// Writes `friend = p μ + (1 - p) η` with `μ = wigner` and the largest `p` for
/// which `η` stays positive, i.e. `p = 1 / λ_max(F^{-1/2} W F^{-1/2})` with the
/// inverse taken on the friend's support. Branch weights are
/// `P(0,0) = p`, `P(0,1) = 1 - p` and zero for the `W=1` branches.
pub fn construct_hybrid_joint(
    friend: &DensityOperator,
    wigner: &DensityOperator,
) -> Result<HybridState> {
    let common = common_support_basis(friend, wigner, SUPPORT_TOL)?;
    if common.is_empty() {
        return Err(Error::Incompatible);
    }
    if common.len() < wigner.rank(SUPPORT_TOL) {
        return Err(Error::UnsupportedDecomposition);
    }
    let dim = friend.dim();
    let spectrum = hermitian_eig(&friend.matrix)?;
    let inv_root = spectrum.compose(|x| if x > SUPPORT_TOL { 1.0 / x.sqrt() } else { 0.0 });
    let ratio = (&(&inv_root * &wigner.matrix) * &inv_root).hermitian_part();
    let lambda_max = hermitian_eig(&ratio)?.eigenvalues[0];
    let mut p = (1.0 / lambda_max).min(1.0);

    let (eta, eta_placeholder) = if 1.0 - p <= ATOL {
        p = 1.0;
        (DensityOperator::maximally_mixed(dim), true)
    } else {
        let rest = (&friend.matrix - &wigner.matrix.scale_real(p)).scale_real(1.0 / (1.0 - p));
        (DensityOperator::new(rest)?, false)
    };

    let mixed = DensityOperator::maximally_mixed(dim);
    let branch =
        |f: &str, w: &str, weight: f64, state: DensityOperator, placeholder: bool| HybridBranch {
            f: f.into(),
            w: w.into(),
            weight,
            state,
            placeholder,
        };
    Ok(HybridState {
        friend_space: OutcomeSpace::binary(),
        wigner_space: OutcomeSpace::binary(),
        branches: vec![
            branch("0", "0", p, wigner.clone(), false),
            branch("0", "1", 1.0 - p, eta, eta_placeholder),
            branch("1", "0", 0.0, mixed.clone(), true),
            branch("1", "1", 0.0, mixed, true),
        ],
    })
}

/// `ρ_{S | which = value}`: the weight-renormalised mixture of matching branches.
pub fn hybrid_condition(h: &HybridState, which: Party, value: &str) -> Result<DensityOperator> {
    let space = match which {
        Party::Friend => &h.friend_space,
        Party::Wigner => &h.wigner_space,
    };
    space.index_of(value)?;
    let matching: Vec<&HybridBranch> = h
        .branches
        .iter()
        .filter(|b| match which {
            Party::Friend => b.f == value,
            Party::Wigner => b.w == value,
        })
        .collect();
    let marginal: f64 = matching.iter().map(|b| b.weight).sum();
    if marginal <= ATOL {
        return Err(Error::ZeroEvidence(marginal));
    }
    let parts: Vec<(f64, &DensityOperator)> = matching
        .iter()
        .filter(|b| b.weight > 0.0)
        .map(|b| (b.weight / marginal, &b.state))
        .collect();
    DensityOperator::mixture(&parts)
}

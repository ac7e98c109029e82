//! Catalog of Wigner's-friend variants and the end-to-end reconciliation,
//! improvement and pooling sequences run on them.
//!
//! In every variant the friend holds `σ_F = ½|00⟩⟨00| + ½|11⟩⟨11|` and assigns
//! `(½, ½, 0, 0)` to the Bell measurement; the variants differ in how Wigner
//! models the preparation inside the laboratory.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::classical::{
    bayes_condition, compatible, improve, pool_linear, pool_multiplicative, pool_supra,
    reconciliation_likelihood, ConditionalTable, OutcomeSpace, ProbDist,
};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, SUPPORT_TOL};
use crate::quantum::{
    basis_ket, born_probabilities, cnot, common_support_basis, controlled_phase, evolve_channel,
    evolve_unitary, hadamard, pauli_x, projective_likelihood, quantum_bayes_update,
    quantum_compatible, quantum_improve, sigma_y_evolution, Bell, DensityOperator, KrausChannel,
    LikelihoodOperator, Pvm,
};

/// Exclusive bounds on the benefit-of-the-doubt parameter.
pub const EPSILON_MIN: f64 = 1e-6;
pub const EPSILON_MAX: f64 = 0.5;

/// Checks `EPSILON_MIN < ε < EPSILON_MAX`.
pub fn check_epsilon(epsilon: f64) -> Result<f64> {
    if epsilon > EPSILON_MIN && epsilon < EPSILON_MAX {
        Ok(epsilon)
    } else {
        Err(Error::BadConfig(format!(
            "epsilon must lie strictly between {EPSILON_MIN} and {EPSILON_MAX}, got {epsilon}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    Canonical,
    WrongInitial,
    NotGate,
    TimeEvolution,
    Phase,
    TwoWigners,
    BenefitOfDoubt,
    IgnorantWigner,
}

impl Variant {
    pub const ALL: [Variant; 8] = [
        Variant::Canonical,
        Variant::WrongInitial,
        Variant::NotGate,
        Variant::TimeEvolution,
        Variant::Phase,
        Variant::TwoWigners,
        Variant::BenefitOfDoubt,
        Variant::IgnorantWigner,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Variant::Canonical => "canonical",
            Variant::WrongInitial => "wrong_initial",
            Variant::NotGate => "not_gate",
            Variant::TimeEvolution => "time_evolution",
            Variant::Phase => "phase",
            Variant::TwoWigners => "two_wigners",
            Variant::BenefitOfDoubt => "benefit_of_doubt",
            Variant::IgnorantWigner => "ignorant_wigner",
        }
    }

    /// Parameter keys the variant consumes.
    pub fn params(self) -> &'static [&'static str] {
        match self {
            Variant::TimeEvolution => &["omega_t"],
            Variant::Phase => &["phi"],
            Variant::TwoWigners => &["phi_left", "phi_right"],
            Variant::BenefitOfDoubt => &["epsilon"],
            _ => &[],
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Variant::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown scenario `{s}`")))
    }
}

/// A variant together with exactly the parameters it consumes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    variant: Variant,
    params: BTreeMap<String, f64>,
}

impl ScenarioConfig {
    pub fn new(variant: Variant, params: BTreeMap<String, f64>) -> Result<Self> {
        let expected = variant.params();
        for key in params.keys() {
            if !expected.contains(&key.as_str()) {
                return Err(Error::BadConfig(format!(
                    "scenario {variant} does not take `{key}`"
                )));
            }
        }
        for key in expected {
            let value = params
                .get(*key)
                .ok_or_else(|| Error::BadConfig(format!("scenario {variant} requires `{key}`")))?;
            if !value.is_finite() {
                return Err(Error::BadConfig(format!("`{key}` must be finite")));
            }
        }
        if let Some(&eps) = params.get("epsilon") {
            check_epsilon(eps)?;
        }
        Ok(Self { variant, params })
    }

    /// Convenience constructor from `(key, value)` pairs.
    pub fn with(variant: Variant, params: &[(&str, f64)]) -> Result<Self> {
        Self::new(
            variant,
            params.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
        )
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn params(&self) -> &BTreeMap<String, f64> {
        &self.params
    }

    fn param(&self, key: &str) -> f64 {
        self.params[key]
    }
}

/// Outcome of a compatibility comparison.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Compatible(bool),
    /// Classical assignments live on different outcome spaces.
    SpaceMismatch,
    /// Quantum assignments live on Hilbert spaces of different dimension.
    DimMismatch,
    /// No quantum assignment is available for one of the agents.
    NotApplicable,
}

impl Verdict {
    fn from_result(r: Result<bool>) -> Result<Self> {
        match r {
            Ok(b) => Ok(Verdict::Compatible(b)),
            Err(Error::SpaceMismatch) => Ok(Verdict::SpaceMismatch),
            Err(Error::DimMismatch(..)) => Ok(Verdict::DimMismatch),
            Err(e) => Err(e),
        }
    }

    pub fn is_compatible(self) -> bool {
        self == Verdict::Compatible(true)
    }
}

impl Serialize for Verdict {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Verdict::Compatible(b) => s.serialize_bool(*b),
            Verdict::SpaceMismatch => s.serialize_str("space_mismatch"),
            Verdict::DimMismatch => s.serialize_str("dim_mismatch"),
            Verdict::NotApplicable => s.serialize_str("not_applicable"),
        }
    }
}

/// The extra Wigner of the two-Wigner variant and the three pairwise verdicts.
#[derive(Debug, Clone)]
pub struct ThreeParty {
    pub right_dist: ProbDist,
    pub right_state: DensityOperator,
    /// Left Wigner vs friend, friend vs right Wigner, left vs right.
    pub classical: [Verdict; 3],
    pub quantum: [Verdict; 3],
}

#[derive(Debug, Clone)]
pub struct ScenarioResult {
    pub config: ScenarioConfig,
    pub wigner_dist: ProbDist,
    pub friend_dist: ProbDist,
    pub wigner_state: DensityOperator,
    pub friend_state: DensityOperator,
    /// The friend's record of the outcome, `friend_dist` on a diagonal register.
    pub friend_register: DensityOperator,
    pub classical_compatible: Verdict,
    pub quantum_compatible: Verdict,
    pub three_party: Option<ThreeParty>,
}

/// `σ_F = ½|00⟩⟨00| + ½|11⟩⟨11|`.
pub fn friend_state() -> DensityOperator {
    DensityOperator::new(ComplexMatrix::diagonal(&[0.5, 0.0, 0.0, 0.5]))
        .expect("static state is valid")
        .with_label("sigma_F")
}

/// `CNOT · (H ⊗ 1)`.
pub fn entangler() -> ComplexMatrix {
    &cnot() * &hadamard().kron(&ComplexMatrix::identity(2))
}

fn ket(index: usize) -> DensityOperator {
    DensityOperator::pure(&basis_ket(4, index)).expect("basis kets are normalised")
}

/// Wigner's state under a controlled-phase model of the preparation:
/// `(|00⟩ + e^{iφ}|11⟩)/√2`.
pub fn phase_state(phi: f64) -> Result<DensityOperator> {
    evolve_unitary(&ket(0), &(&controlled_phase(phi) * &entangler()))
}

/// `(1-ε)|φ+⟩⟨φ+| + ε|φ-⟩⟨φ-|`, obtained by sending the canonical state
/// through the dephasing channel.
pub fn open_minded_state(epsilon: f64) -> Result<DensityOperator> {
    let canonical = evolve_unitary(&ket(0), &entangler())?;
    evolve_channel(&canonical, &KrausChannel::noisy(epsilon)?)
}

fn wigner_state(cfg: &ScenarioConfig) -> Result<DensityOperator> {
    let id2 = ComplexMatrix::identity(2);
    match cfg.variant {
        Variant::Canonical => evolve_unitary(&ket(0), &entangler()),
        Variant::WrongInitial => evolve_unitary(&ket(3), &entangler()),
        Variant::NotGate => evolve_unitary(&ket(0), &(&cnot() * &pauli_x().kron(&id2))),
        Variant::TimeEvolution => {
            evolve_unitary(&ket(0), &sigma_y_evolution(cfg.param("omega_t")).kron(&id2))
        }
        Variant::Phase => phase_state(cfg.param("phi")),
        Variant::TwoWigners => phase_state(cfg.param("phi_left")),
        Variant::BenefitOfDoubt => open_minded_state(cfg.param("epsilon")),
        Variant::IgnorantWigner => Ok(DensityOperator::maximally_mixed(2)),
    }
}

fn verdicts(
    wd: &ProbDist,
    ws: &DensityOperator,
    fd: &ProbDist,
    fs: &DensityOperator,
    quantum: bool,
    tol: f64,
) -> Result<(Verdict, Verdict)> {
    let classical = Verdict::from_result(compatible(wd, fd, tol))?;
    let quantum = if quantum {
        Verdict::from_result(quantum_compatible(ws, fs, tol))?
    } else {
        Verdict::NotApplicable
    };
    Ok((classical, quantum))
}

/// Builds both agents' assignments for `cfg` and compares them.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<ScenarioResult> {
    run_scenario_with_tol(cfg, SUPPORT_TOL)
}

/// [`run_scenario`] with an explicit support tolerance for the verdicts.
pub fn run_scenario_with_tol(cfg: &ScenarioConfig, tol: f64) -> Result<ScenarioResult> {
    let pvm = Pvm::bell();
    let friend_state = friend_state();
    let friend_dist = born_probabilities(&friend_state, &pvm)?;
    let wigner_state = wigner_state(cfg)?;
    let wigner_dist = if wigner_state.dim() == pvm.dim() {
        born_probabilities(&wigner_state, &pvm)?
    } else {
        ProbDist::uniform(OutcomeSpace::binary())
    };
    // The friend's quantum assignment under the σ_y model is not specified.
    let has_quantum = cfg.variant != Variant::TimeEvolution;
    let (classical_compatible, quantum_compatible) = verdicts(
        &wigner_dist,
        &wigner_state,
        &friend_dist,
        &friend_state,
        has_quantum,
        tol,
    )?;

    let three_party = if cfg.variant == Variant::TwoWigners {
        let right_state = phase_state(cfg.param("phi_right"))?;
        let right_dist = born_probabilities(&right_state, &pvm)?;
        let (fr_c, fr_q) = verdicts(
            &friend_dist,
            &friend_state,
            &right_dist,
            &right_state,
            true,
            tol,
        )?;
        let (lr_c, lr_q) = verdicts(
            &wigner_dist,
            &wigner_state,
            &right_dist,
            &right_state,
            true,
            tol,
        )?;
        Some(ThreeParty {
            right_dist,
            right_state,
            classical: [classical_compatible, fr_c, lr_c],
            quantum: [quantum_compatible, fr_q, lr_q],
        })
    } else {
        None
    };

    Ok(ScenarioResult {
        config: cfg.clone(),
        friend_register: DensityOperator::diagonal(&friend_dist),
        wigner_dist,
        friend_dist,
        wigner_state,
        friend_state,
        classical_compatible,
        quantum_compatible,
        three_party,
    })
}

/// An agent's assignment in either description.
#[derive(Debug, Clone, PartialEq)]
pub enum Assignment {
    Classical(ProbDist),
    Quantum(DensityOperator),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Classical,
    Quantum,
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "classical" => Ok(Mode::Classical),
            "quantum" => Ok(Mode::Quantum),
            _ => Err(Error::BadConfig(format!("unknown mode `{s}`"))),
        }
    }
}

/// Per-agent posteriors after the reconciliation experiment. Each agent's
/// update can fail independently, e.g. on evidence the agent deems impossible.
#[derive(Debug, Clone)]
pub struct Reconciliation {
    pub wigner: Result<Assignment>,
    pub friend: Result<Assignment>,
}

/// Runs the reconciliation experiment for the scenario's pair of assignments
/// and conditions both agents on the outcome `outcome` (`"0"` or `"1"`).
pub fn run_reconciliation(
    cfg: &ScenarioConfig,
    mode: Mode,
    outcome: &str,
) -> Result<Reconciliation> {
    let result = run_scenario(cfg)?;
    match mode {
        Mode::Classical => {
            let (lik, _) =
                reconciliation_likelihood(&result.wigner_dist, &result.friend_dist, SUPPORT_TOL)?;
            lik.result_space().index_of(outcome)?;
            Ok(Reconciliation {
                wigner: bayes_condition(&result.wigner_dist, &lik, outcome)
                    .map(Assignment::Classical),
                friend: bayes_condition(&result.friend_dist, &lik, outcome)
                    .map(Assignment::Classical),
            })
        }
        Mode::Quantum => {
            if result.quantum_compatible == Verdict::NotApplicable {
                return Err(Error::BadConfig(format!(
                    "scenario {} has no quantum comparison",
                    cfg.variant
                )));
            }
            let basis =
                common_support_basis(&result.wigner_state, &result.friend_state, SUPPORT_TOL)?;
            let target = basis.first().ok_or(Error::Incompatible)?;
            let lik = projective_likelihood(&DensityOperator::pure(target)?)?;
            lik.outcome_space().index_of(outcome)?;
            Ok(Reconciliation {
                wigner: quantum_bayes_update(&result.wigner_state, &lik, outcome)
                    .map(Assignment::Quantum),
                friend: quantum_bayes_update(&result.friend_state, &lik, outcome)
                    .map(Assignment::Quantum),
            })
        }
    }
}

/// The eight improvement cases: `c1*` classical, `q2*` quantum; `a`/`c`
/// update Wigner on the friend's report, `b`/`d` the friend on Wigner's;
/// `c`/`d` use the open-minded Wigner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImprovementCase {
    C1a,
    C1b,
    C1c,
    C1d,
    Q2a,
    Q2b,
    Q2c,
    Q2d,
}

impl ImprovementCase {
    pub const ALL: [ImprovementCase; 8] = [
        ImprovementCase::C1a,
        ImprovementCase::C1b,
        ImprovementCase::C1c,
        ImprovementCase::C1d,
        ImprovementCase::Q2a,
        ImprovementCase::Q2b,
        ImprovementCase::Q2c,
        ImprovementCase::Q2d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ImprovementCase::C1a => "c1a",
            ImprovementCase::C1b => "c1b",
            ImprovementCase::C1c => "c1c",
            ImprovementCase::C1d => "c1d",
            ImprovementCase::Q2a => "q2a",
            ImprovementCase::Q2b => "q2b",
            ImprovementCase::Q2c => "q2c",
            ImprovementCase::Q2d => "q2d",
        }
    }

    pub fn needs_epsilon(self) -> bool {
        matches!(
            self,
            ImprovementCase::C1c
                | ImprovementCase::C1d
                | ImprovementCase::Q2c
                | ImprovementCase::Q2d
        )
    }

    pub fn is_quantum(self) -> bool {
        matches!(
            self,
            ImprovementCase::Q2a
                | ImprovementCase::Q2b
                | ImprovementCase::Q2c
                | ImprovementCase::Q2d
        )
    }
}

impl fmt::Display for ImprovementCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ImprovementCase {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ImprovementCase::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::BadConfig(format!("unknown improvement case `{s}`")))
    }
}

/// Prior, report model and posterior of one improvement step.
#[derive(Debug, Clone)]
pub struct Improvement {
    pub case: ImprovementCase,
    pub prior: Assignment,
    pub posterior: Assignment,
}

const REPORT: &str = "report";
const OTHER: &str = "other";

fn report_table(row: [f64; 4]) -> Result<ConditionalTable> {
    ConditionalTable::binary(OutcomeSpace::bell(), &row, REPORT, OTHER)
}

fn report_operator(effect: ComplexMatrix) -> Result<LikelihoodOperator> {
    LikelihoodOperator::binary(effect, REPORT, OTHER)
}

/// Runs one improvement case. `epsilon` is required by the open-minded cases
/// and ignored by the others.
pub fn run_improvement(case: ImprovementCase, epsilon: Option<f64>) -> Result<Improvement> {
    let eps = if case.needs_epsilon() {
        let e = epsilon.ok_or_else(|| Error::BadConfig(format!("case {case} requires epsilon")))?;
        check_epsilon(e)?
    } else {
        0.0
    };
    let stubborn = ProbDist::bell([1.0, 0.0, 0.0, 0.0])?;
    let friend = ProbDist::bell([0.5, 0.5, 0.0, 0.0])?;
    let phi_plus = Bell::PhiPlus.projector();
    let phi_minus = Bell::PhiMinus.projector();

    let (prior, posterior) = match case {
        ImprovementCase::C1a => {
            let post = improve(&stubborn, &report_table([0.5, 0.5, 0.0, 0.0])?, REPORT)?;
            (Assignment::Classical(stubborn), Assignment::Classical(post))
        }
        ImprovementCase::C1b => {
            let post = improve(&friend, &report_table([1.0, 0.0, 0.0, 0.0])?, REPORT)?;
            (Assignment::Classical(friend), Assignment::Classical(post))
        }
        ImprovementCase::C1c => {
            let open = ProbDist::bell([1.0 - eps, eps, 0.0, 0.0])?;
            let post = improve(&open, &report_table([eps, 1.0 - eps, 0.0, 0.0])?, REPORT)?;
            (Assignment::Classical(open), Assignment::Classical(post))
        }
        ImprovementCase::C1d => {
            // A report of the open-minded assignment is certain under φ+ and
            // impossible otherwise.
            let post = improve(&friend, &report_table([1.0, 0.0, 0.0, 0.0])?, REPORT)?;
            (Assignment::Classical(friend), Assignment::Classical(post))
        }
        ImprovementCase::Q2a => {
            let prior = Bell::PhiPlus.state();
            let effect = (&phi_plus + &phi_minus).scale_real(0.5);
            let post = quantum_improve(&prior, &report_operator(effect)?, REPORT)?;
            (Assignment::Quantum(prior), Assignment::Quantum(post))
        }
        ImprovementCase::Q2b | ImprovementCase::Q2d => {
            let prior = friend_state();
            let post = quantum_improve(&prior, &report_operator(phi_plus)?, REPORT)?;
            (Assignment::Quantum(prior), Assignment::Quantum(post))
        }
        ImprovementCase::Q2c => {
            let prior = open_minded_state(eps)?;
            let effect = &phi_plus.scale_real(eps) + &phi_minus.scale_real(1.0 - eps);
            let post = quantum_improve(&prior, &report_operator(effect)?, REPORT)?;
            (Assignment::Quantum(prior), Assignment::Quantum(post))
        }
    };
    Ok(Improvement {
        case,
        prior,
        posterior,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolMethod {
    Linear,
    Multiplicative,
    Supra,
}

impl FromStr for PoolMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(PoolMethod::Linear),
            "multiplicative" => Ok(PoolMethod::Multiplicative),
            "supra" => Ok(PoolMethod::Supra),
            _ => Err(Error::BadConfig(format!("unknown pooling method `{s}`"))),
        }
    }
}

/// Pools the canonical pair. Weights are `(w_W, w_F)` and default to equal
/// weights; the supra-Bayesian pool takes none. With `epsilon`, Wigner's
/// assignment is the open-minded `(1-ε, ε, 0, 0)`.
pub fn run_pooling(
    method: PoolMethod,
    weights: Option<&[f64]>,
    epsilon: Option<f64>,
) -> Result<ProbDist> {
    let wigner = match epsilon {
        Some(e) => {
            let e = check_epsilon(e)?;
            ProbDist::bell([1.0 - e, e, 0.0, 0.0])?
        }
        None => ProbDist::bell([1.0, 0.0, 0.0, 0.0])?,
    };
    let friend = ProbDist::bell([0.5, 0.5, 0.0, 0.0])?;
    let pair = [wigner.clone(), friend.clone()];
    let weights = weights.unwrap_or(&[0.5, 0.5]);
    match method {
        PoolMethod::Linear => pool_linear(&pair, weights),
        PoolMethod::Multiplicative => pool_multiplicative(&pair, weights, None),
        PoolMethod::Supra => {
            if weights != [0.5, 0.5] {
                return Err(Error::BadConfig(
                    "supra-Bayesian pooling takes no weights".into(),
                ));
            }
            // A neutral prior on the outcomes both agents consider possible;
            // each agent's report is modelled by the agent's own assignment.
            let prior = ProbDist::bell([0.5, 0.5, 0.0, 0.0])?;
            let report = |d: &ProbDist| -> Result<(ConditionalTable, String)> {
                let row: [f64; 4] = d
                    .probs()
                    .try_into()
                    .expect("Bell distributions have four entries");
                Ok((report_table(row)?, REPORT.to_string()))
            };
            pool_supra(&prior, &[report(&wigner)?, report(&friend)?])
        }
    }
}

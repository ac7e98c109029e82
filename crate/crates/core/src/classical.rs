//! Classical Bayesian agents over finite outcome spaces.
//!
//! Compatibility of two assignments reduces to a support check: two
//! distributions are compatible (objectively or subjectively) exactly when some
//! outcome has positive probability under both. The constructive sides of that
//! equivalence are provided as well: [`reconciliation_likelihood`] builds the
//! experiment on which both agents would agree, and
//! [`construct_objective_joint`] builds a joint distribution from which both
//! assignments arise by conditioning.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{ATOL, SUPPORT_TOL};

/// Tolerance for normalisation and for entrywise agreement of distributions.
pub const NORM_TOL: f64 = 1e-9;

/// Ordered list of distinct outcome labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutcomeSpace {
    labels: Vec<String>,
}

impl OutcomeSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::InvalidSpace("no labels".into()));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(Error::InvalidSpace(format!("duplicate label `{l}`")));
            }
        }
        Ok(Self { labels })
    }

    /// The Bell-measurement labels `phi+, phi-, psi+, psi-`.
    pub fn bell() -> Self {
        Self::new(["phi+", "phi-", "psi+", "psi-"]).expect("static labels are valid")
    }

    /// A binary space with labels `0`, `1`.
    pub fn binary() -> Self {
        Self::new(["0", "1"]).expect("static labels are valid")
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }
}

/// A probability vector over an [`OutcomeSpace`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbDist {
    space: OutcomeSpace,
    probs: Vec<f64>,
}

impl ProbDist {
    /// Validates and clamps entries into `[0, 1]`. Entries must lie in
    /// `[-ATOL, 1 + ATOL]` and sum to one within [`NORM_TOL`].
    pub fn new(space: OutcomeSpace, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != space.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} probabilities for {} labels",
                probs.len(),
                space.len()
            )));
        }
        let mut clamped = Vec::with_capacity(probs.len());
        for &p in &probs {
            if !p.is_finite() || !(-ATOL..=1.0 + ATOL).contains(&p) {
                return Err(Error::InvalidDistribution(format!(
                    "entry {p} outside [0, 1]"
                )));
            }
            clamped.push(p.clamp(0.0, 1.0));
        }
        let total: f64 = clamped.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDistribution(format!("sums to {total}")));
        }
        Ok(Self {
            space,
            probs: clamped,
        })
    }

    /// Distribution over the Bell labels.
    pub fn bell(probs: [f64; 4]) -> Result<Self> {
        Self::new(OutcomeSpace::bell(), probs.to_vec())
    }

    pub fn point_mass(space: OutcomeSpace, label: &str) -> Result<Self> {
        let k = space.index_of(label)?;
        let mut probs = vec![0.0; space.len()];
        probs[k] = 1.0;
        Ok(Self { space, probs })
    }

    pub fn uniform(space: OutcomeSpace) -> Self {
        let n = space.len();
        Self {
            space,
            probs: vec![1.0 / n as f64; n],
        }
    }

    /// Normalises non-negative weights into a distribution.
    fn from_unnormalized(space: OutcomeSpace, weights: Vec<f64>) -> Self {
        let total: f64 = weights.iter().sum();
        Self {
            space,
            probs: weights.into_iter().map(|w| w / total).collect(),
        }
    }

    pub fn space(&self) -> &OutcomeSpace {
        &self.space
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, label: &str) -> Result<f64> {
        Ok(self.probs[self.space.index_of(label)?])
    }

    /// Largest entrywise difference. Spaces must match.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        same_space(self, other)?;
        Ok(self
            .probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }
}

fn same_space(a: &ProbDist, b: &ProbDist) -> Result<()> {
    if a.space != b.space {
        return Err(Error::SpaceMismatch);
    }
    Ok(())
}

/// Conditional table `P(X | Y)`: one distribution over the result space per
/// outcome of the given space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionalTable {
    given_space: OutcomeSpace,
    result_space: OutcomeSpace,
    rows: Vec<ProbDist>,
}

impl ConditionalTable {
    pub fn new(
        given_space: OutcomeSpace,
        result_space: OutcomeSpace,
        rows: Vec<ProbDist>,
    ) -> Result<Self> {
        if rows.len() != given_space.len() {
            return Err(Error::InvalidLikelihood(format!(
                "{} rows for {} conditioning outcomes",
                rows.len(),
                given_space.len()
            )));
        }
        if rows.iter().any(|r| r.space != result_space) {
            return Err(Error::InvalidLikelihood(
                "row over the wrong result space".into(),
            ));
        }
        Ok(Self {
            given_space,
            result_space,
            rows,
        })
    }

    /// Two-outcome table in which `observed` has probability `row[y]` given `y`
    /// and `other` takes the remainder.
    pub fn binary(
        given_space: OutcomeSpace,
        row: &[f64],
        observed: &str,
        other: &str,
    ) -> Result<Self> {
        if row.len() != given_space.len() {
            return Err(Error::InvalidLikelihood(format!(
                "{} likelihood values for {} outcomes",
                row.len(),
                given_space.len()
            )));
        }
        let result_space = OutcomeSpace::new([observed, other])?;
        let rows = row
            .iter()
            .map(|&l| ProbDist::new(result_space.clone(), vec![l, 1.0 - l]))
            .collect::<Result<Vec<_>>>()
            .map_err(|e| Error::InvalidLikelihood(e.to_string()))?;
        Self::new(given_space, result_space, rows)
    }

    pub fn given_space(&self) -> &OutcomeSpace {
        &self.given_space
    }

    pub fn result_space(&self) -> &OutcomeSpace {
        &self.result_space
    }

    pub fn rows(&self) -> &[ProbDist] {
        &self.rows
    }

    /// `P(X = observed | Y = y)` for every `y`, in given-space order.
    pub fn likelihood_row(&self, observed: &str) -> Result<Vec<f64>> {
        let k = self.result_space.index_of(observed)?;
        Ok(self.rows.iter().map(|r| r.probs[k]).collect())
    }
}

/// Labels with probability above `tol`, in space order.
pub fn support(d: &ProbDist, tol: f64) -> Vec<String> {
    d.space
        .labels
        .iter()
        .zip(&d.probs)
        .filter(|(_, &p)| p > tol)
        .map(|(l, _)| l.clone())
        .collect()
}

/// Labels in the support of both distributions, in space order.
pub fn common_support(a: &ProbDist, b: &ProbDist, tol: f64) -> Result<Vec<String>> {
    same_space(a, b)?;
    Ok(a.space
        .labels
        .iter()
        .enumerate()
        .filter(|&(i, _)| a.probs[i] > tol && b.probs[i] > tol)
        .map(|(_, l)| l.clone())
        .collect())
}

/// Support-intersection test. Distributions over different spaces are not
/// comparable and yield [`Error::SpaceMismatch`].
pub fn compatible(a: &ProbDist, b: &ProbDist, tol: f64) -> Result<bool> {
    Ok(!common_support(a, b, tol)?.is_empty())
}

/// True iff all distributions coincide entrywise within [`NORM_TOL`].
pub fn agree(dists: &[ProbDist]) -> Result<bool> {
    let Some(first) = dists.first() else {
        return Ok(true);
    };
    let mut all = true;
    for d in &dists[1..] {
        all &= first.max_abs_diff(d)? <= NORM_TOL;
    }
    Ok(all)
}

/// Bayes' rule: `posterior(y) ∝ P(observed | y) · prior(y)`.
pub fn bayes_condition(
    prior: &ProbDist,
    lik: &ConditionalTable,
    observed: &str,
) -> Result<ProbDist> {
    if lik.given_space != prior.space {
        return Err(Error::SpaceMismatch);
    }
    let row = lik.likelihood_row(observed)?;
    let weights: Vec<f64> = row.iter().zip(&prior.probs).map(|(l, p)| l * p).collect();
    let evidence: f64 = weights.iter().sum();
    if evidence <= ATOL {
        return Err(Error::ZeroEvidence(evidence));
    }
    Ok(ProbDist::from_unnormalized(prior.space.clone(), weights))
}

/// Builds the reconciliation experiment for a compatible pair: a binary test
/// `X` with `P(X=0 | y*) = 1` and `P(X=0 | y ≠ y*) = 0`, where `y*` is the first
/// label of the common support. Returns the table and the agreeing outcome `0`.
pub fn reconciliation_likelihood(
    a: &ProbDist,
    b: &ProbDist,
    tol: f64,
) -> Result<(ConditionalTable, String)> {
    let common = common_support(a, b, tol)?;
    let target = common.first().ok_or(Error::Incompatible)?;
    let row: Vec<f64> = a
        .space
        .labels
        .iter()
        .map(|l| if l == target { 1.0 } else { 0.0 })
        .collect();
    let table = ConditionalTable::binary(a.space.clone(), &row, "0", "1")?;
    Ok((table, "0".to_string()))
}

/// Updates `prior` on an expert's report. The posterior is the entrywise
/// product of the report likelihood and the prior, renormalised.
pub fn improve(
    prior: &ProbDist,
    report_lik: &ConditionalTable,
    report_label: &str,
) -> Result<ProbDist> {
    if report_lik.given_space != prior.space {
        return Err(Error::SpaceMismatch);
    }
    let row = report_lik.likelihood_row(report_label)?;
    let product = hadamard(&row, &prior.probs);
    let evidence: f64 = product.iter().sum();
    if evidence <= ATOL {
        return Err(Error::ZeroEvidence(evidence));
    }
    Ok(ProbDist::from_unnormalized(prior.space.clone(), product))
}

fn hadamard(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x * y).collect()
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::BadWeights(format!(
            "{} weights for {} distributions",
            weights.len(),
            n
        )));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::BadWeights("weights must be non-negative".into()));
    }
    let total: f64 = weights.iter().sum();
    if (total - 1.0).abs() > NORM_TOL {
        return Err(Error::BadWeights(format!("weights sum to {total}")));
    }
    Ok(())
}

fn check_common_space(dists: &[ProbDist]) -> Result<&OutcomeSpace> {
    let first = dists
        .first()
        .ok_or_else(|| Error::BadWeights("no distributions to pool".into()))?;
    if dists.iter().any(|d| d.space != first.space) {
        return Err(Error::SpaceMismatch);
    }
    Ok(&first.space)
}

/// Linear opinion pool `Σ w_i P_i`.
pub fn pool_linear(dists: &[ProbDist], weights: &[f64]) -> Result<ProbDist> {
    let space = check_common_space(dists)?;
    check_weights(weights, dists.len())?;
    let mut out = vec![0.0; space.len()];
    for (d, &w) in dists.iter().zip(weights) {
        for (o, p) in out.iter_mut().zip(&d.probs) {
            *o += w * p;
        }
    }
    ProbDist::new(space.clone(), out)
}

/// Multiplicative (logarithmic) pool `c · Π P_i^{w_i}`, optionally multiplied by
/// a shared prior. Weights must lie strictly inside `(0, 1)` and sum to one.
pub fn pool_multiplicative(
    dists: &[ProbDist],
    weights: &[f64],
    shared_prior: Option<&ProbDist>,
) -> Result<ProbDist> {
    let space = check_common_space(dists)?;
    check_weights(weights, dists.len())?;
    if weights.iter().any(|&w| w <= 0.0 || w >= 1.0) {
        return Err(Error::BadWeights(
            "multiplicative pooling needs 0 < w < 1".into(),
        ));
    }
    if let Some(p0) = shared_prior {
        same_space(p0, &dists[0])?;
    }
    let pooled: Vec<f64> = (0..space.len())
        .map(|y| {
            let base = shared_prior.map_or(1.0, |p0| p0.probs[y]);
            dists
                .iter()
                .zip(weights)
                // powf gives 0^w = 0 for w > 0.
                .fold(base, |acc, (d, &w)| acc * d.probs[y].powf(w))
        })
        .collect();
    let total: f64 = pooled.iter().sum();
    if total <= 0.0 {
        return Err(Error::JointlyIncompatible);
    }
    Ok(ProbDist::from_unnormalized(space.clone(), pooled))
}

/// Supra-Bayesian pool: a neutral prior conditioned on every agent's report,
/// with reports conditionally independent given `Y`.
pub fn pool_supra(prior: &ProbDist, liks: &[(ConditionalTable, String)]) -> Result<ProbDist> {
    let mut weights = prior.probs.clone();
    for (table, observed) in liks {
        if table.given_space != prior.space {
            return Err(Error::SpaceMismatch);
        }
        let row = table.likelihood_row(observed)?;
        weights = hadamard(&weights, &row);
    }
    let evidence: f64 = weights.iter().sum();
    if evidence <= ATOL {
        return Err(Error::ZeroEvidence(evidence));
    }
    Ok(ProbDist::from_unnormalized(prior.space.clone(), weights))
}

/// Joint distribution over a product of outcome spaces, row-major with the
/// last space varying fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointDistribution {
    spaces: Vec<OutcomeSpace>,
    probs: Vec<f64>,
}

impl JointDistribution {
    pub fn new(spaces: Vec<OutcomeSpace>, probs: Vec<f64>) -> Result<Self> {
        let size: usize = spaces.iter().map(OutcomeSpace::len).product();
        if spaces.is_empty() || probs.len() != size {
            return Err(Error::InvalidDistribution(format!(
                "{} cells for a product of size {size}",
                probs.len()
            )));
        }
        if probs.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(Error::InvalidDistribution(
                "negative joint probability".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > NORM_TOL {
            return Err(Error::InvalidDistribution(format!("joint sums to {total}")));
        }
        Ok(Self { spaces, probs })
    }

    pub fn spaces(&self) -> &[OutcomeSpace] {
        &self.spaces
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.spaces.len()];
        for k in (0..self.spaces.len().saturating_sub(1)).rev() {
            strides[k] = strides[k + 1] * self.spaces[k + 1].len();
        }
        strides
    }

    /// Probability of a full assignment given as one label per space.
    pub fn prob(&self, labels: &[&str]) -> Result<f64> {
        if labels.len() != self.spaces.len() {
            return Err(Error::InvalidSpace("wrong number of labels".into()));
        }
        let strides = self.strides();
        let mut idx = 0;
        for ((space, label), stride) in self.spaces.iter().zip(labels).zip(strides) {
            idx += space.index_of(label)? * stride;
        }
        Ok(self.probs[idx])
    }

    /// Marginal of the leading variable conditioned on `spaces[axis] = value`.
    pub fn condition_first(&self, axis: usize, value: &str) -> Result<ProbDist> {
        if axis == 0 || axis >= self.spaces.len() {
            return Err(Error::InvalidSpace(format!(
                "cannot condition on axis {axis}"
            )));
        }
        let target = self.spaces[axis].index_of(value)?;
        let strides = self.strides();
        let mut weights = vec![0.0; self.spaces[0].len()];
        for (flat, &p) in self.probs.iter().enumerate() {
            if (flat / strides[axis]) % self.spaces[axis].len() == target {
                weights[flat / strides[0]] += p;
            }
        }
        let evidence: f64 = weights.iter().sum();
        if evidence <= ATOL {
            return Err(Error::ZeroEvidence(evidence));
        }
        Ok(ProbDist::from_unnormalized(self.spaces[0].clone(), weights))
    }
}

/// Witness for objective compatibility: a joint `P(Y, F, W)` over binary
/// auxiliary variables with `P(Y | F=0) = first` and `P(Y | W=0) = second`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ObjectiveJoint {
    pub joint: JointDistribution,
    /// Point mass on the first common-support label.
    pub common: ProbDist,
    /// Weight of the common part in the first input.
    pub weight_f: f64,
    /// Weight of the common part in the second input.
    pub weight_w: f64,
    /// `P(Y | F=f, W=w)` indexed `[f][w]`.
    pub branches: [[ProbDist; 2]; 2],
    /// `true` for branches whose content is an arbitrary placeholder.
    pub placeholder: [[bool; 2]; 2],
}

/// Builds the virtual-past joint distribution for a compatible pair.
///
/// Both inputs are split as `P_J = p_J · P_0 + (1 - p_J) · P'_J` with `P_0` the
/// point mass on the first common-support label, and the branches are weighted
/// `P(F=0,W=0) = p_F p_W`, `P(F=0,W=1) = (1-p_F) p_W`, `P(F=1,W=0) = p_F (1-p_W)`,
/// `P(F=1,W=1) = (1-p_F)(1-p_W)`.
pub fn construct_objective_joint(first: &ProbDist, second: &ProbDist) -> Result<ObjectiveJoint> {
    let common_labels = common_support(first, second, SUPPORT_TOL)?;
    let target = common_labels.first().ok_or(Error::Incompatible)?;
    let space = first.space.clone();
    let common = ProbDist::point_mass(space.clone(), target)?;
    let k = space.index_of(target)?;

    let split = |d: &ProbDist| -> (f64, ProbDist, bool) {
        let p = d.probs[k];
        if 1.0 - p <= ATOL {
            return (1.0, ProbDist::uniform(space.clone()), true);
        }
        let rest: Vec<f64> = d
            .probs
            .iter()
            .enumerate()
            .map(|(i, &x)| if i == k { (x - p).max(0.0) } else { x })
            .collect();
        (p, ProbDist::from_unnormalized(space.clone(), rest), false)
    };
    let (pf, resid_f, resid_f_placeholder) = split(first);
    let (pw, resid_w, resid_w_placeholder) = split(second);

    let weights = [
        [pf * pw, (1.0 - pf) * pw],
        [pf * (1.0 - pw), (1.0 - pf) * (1.0 - pw)],
    ];
    let branches = [
        [common.clone(), resid_f],
        [resid_w, ProbDist::uniform(space.clone())],
    ];
    let placeholder = [[false, resid_f_placeholder], [resid_w_placeholder, true]];

    let n = space.len();
    let mut probs = vec![0.0; n * 4];
    for (y, cell) in probs.chunks_mut(4).enumerate() {
        for f in 0..2 {
            for w in 0..2 {
                cell[f * 2 + w] = weights[f][w] * branches[f][w].probs[y];
            }
        }
    }
    let joint = JointDistribution::new(
        vec![space, OutcomeSpace::binary(), OutcomeSpace::binary()],
        probs,
    )?;
    Ok(ObjectiveJoint {
        joint,
        common,
        weight_f: pf,
        weight_w: pw,
        branches,
        placeholder,
    })
}

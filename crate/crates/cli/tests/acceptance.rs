//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a `PASS` / `FAIL` line that survives output capture.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::f64::consts::{PI, TAU};
use std::io::Write;
use std::process::Command;

use common::{
    denman_beavers_sqrt, gram, in_basis, normalise, random_columns, random_dist, random_psd,
    random_state, random_unitary, rng, space,
};
use epistemic_qm::classical::{
    bayes_condition, compatible, construct_objective_joint, pool_multiplicative,
    reconciliation_likelihood, support, ConditionalTable, ProbDist,
};
use epistemic_qm::numerics::{psd_sqrt, star_product, ComplexMatrix, ATOL, SUPPORT_TOL};
use epistemic_qm::quantum::{
    construct_hybrid_joint, hybrid_condition, quantum_bayes_update, Bell, DensityOperator,
    LikelihoodOperator, Party,
};
use epistemic_qm::scenarios::{
    friend_state, run_improvement, run_pooling, run_reconciliation, run_scenario, Assignment,
    ImprovementCase, Mode, PoolMethod, ScenarioConfig, Variant, Verdict,
};
use epistemic_qm::Error;
use num_complex::Complex64;
use rand::Rng;

const TOL: f64 = 1e-9;

/// Collects named checks for one criterion, prints the verdict line and
/// fails the test if any check failed.
struct Criterion {
    id: &'static str,
    title: &'static str,
    failures: Vec<String>,
    checks: usize,
}

impl Criterion {
    fn new(id: &'static str, title: &'static str) -> Self {
        Criterion {
            id,
            title,
            failures: Vec::new(),
            checks: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn finish(self) {
        let status = if self.failures.is_empty() {
            "PASS"
        } else {
            "FAIL"
        };
        let mut line = format!(
            "{status} criterion {}: {} ({} checks)",
            self.id, self.title, self.checks
        );
        for f in self.failures.iter().take(5) {
            line.push_str(&format!("\n    - {f}"));
        }
        // Written to the raw handle so the line is visible without --nocapture.
        let _ = writeln!(std::io::stdout().lock(), "{line}");
        assert!(self.failures.is_empty(), "{line}");
    }
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

fn state_close(a: &DensityOperator, b: &DensityOperator, tol: f64) -> bool {
    a.max_abs_diff(b).map(|d| d <= tol).unwrap_or(false)
}

fn cfg(variant: Variant, params: &[(&str, f64)]) -> ScenarioConfig {
    ScenarioConfig::with(variant, params).unwrap()
}

fn classical(a: &Assignment) -> &ProbDist {
    match a {
        Assignment::Classical(d) => d,
        Assignment::Quantum(_) => panic!("expected a classical assignment"),
    }
}

fn quantum(a: &Assignment) -> &DensityOperator {
    match a {
        Assignment::Quantum(s) => s,
        Assignment::Classical(_) => panic!("expected a quantum assignment"),
    }
}

fn contained(inner: &ComplexMatrix, outer: &ComplexMatrix) -> bool {
    (&(outer * inner) - inner).max_abs() <= 1e-8
}

#[test]
fn criterion_01_canonical_scenario() {
    let mut c = Criterion::new(
        "1",
        "canonical W (1,0,0,0), F (1/2,1/2,0,0), both verdicts true",
    );
    let r = run_scenario(&cfg(Variant::Canonical, &[])).unwrap();
    c.check(
        close(r.wigner_dist.probs(), &[1.0, 0.0, 0.0, 0.0], TOL),
        || format!("wigner {:?}", r.wigner_dist.probs()),
    );
    c.check(
        close(r.friend_dist.probs(), &[0.5, 0.5, 0.0, 0.0], TOL),
        || format!("friend {:?}", r.friend_dist.probs()),
    );
    c.check(r.classical_compatible == Verdict::Compatible(true), || {
        "classical verdict".into()
    });
    c.check(r.quantum_compatible == Verdict::Compatible(true), || {
        "quantum verdict".into()
    });
    c.check(
        state_close(&r.wigner_state, &Bell::PhiPlus.state(), TOL),
        || "wigner state is not φ+".into(),
    );

    let out = Command::new(env!("CARGO_BIN_EXE_epistemic-qm"))
        .args(["scenario", "canonical"])
        .env_remove("EPISTEMIC_QM_TOL")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    c.check(
        out.status.success() && text.contains("\"wigner_dist\": [1,0,0,0]"),
        || "CLI output lacks the exact Wigner distribution".into(),
    );
    c.finish();
}

#[test]
fn criterion_02a_wrong_initial() {
    let mut c = Criterion::new(
        "2a",
        "wrong_initial gives (0,0,0,1) and incompatible verdicts",
    );
    let r = run_scenario(&cfg(Variant::WrongInitial, &[])).unwrap();
    c.check(
        close(r.wigner_dist.probs(), &[0.0, 0.0, 0.0, 1.0], TOL),
        || format!("wigner {:?}", r.wigner_dist.probs()),
    );
    c.check(r.classical_compatible == Verdict::Compatible(false), || {
        format!("classical {:?}", r.classical_compatible)
    });
    c.check(r.quantum_compatible == Verdict::Compatible(false), || {
        format!("quantum {:?}", r.quantum_compatible)
    });
    c.finish();
}

#[test]
fn criterion_02b_not_gate() {
    let mut c = Criterion::new("2b", "not_gate incompatible");
    let r = run_scenario(&cfg(Variant::NotGate, &[])).unwrap();
    let ket11 = DensityOperator::pure(&epistemic_qm::quantum::basis_ket(4, 3)).unwrap();
    c.check(state_close(&r.wigner_state, &ket11, TOL), || {
        "wigner state is not |11⟩⟨11|".into()
    });
    c.check(r.classical_compatible == Verdict::Compatible(false), || {
        format!(
            "classical verdict {:?}: Born probabilities of |11⟩ are {:?}, which share φ+ and φ- with the friend",
            r.classical_compatible,
            r.wigner_dist.probs()
        )
    });
    c.check(r.quantum_compatible == Verdict::Compatible(false), || {
        format!(
            "quantum verdict {:?}: |11⟩ lies inside the support of σ_F",
            r.quantum_compatible
        )
    });
    c.finish();
}

#[test]
fn criterion_02c_time_evolution_grid() {
    let mut c = Criterion::new(
        "2c",
        "time_evolution grid of 100 points, verdict flips only at ωt = π",
    );
    for k in 0..100 {
        let wt = k as f64 * TAU / 100.0;
        let r = run_scenario(&cfg(Variant::TimeEvolution, &[("omega_t", wt)])).unwrap();
        let (p, m) = ((1.0 + wt.cos()) / 4.0, (1.0 - wt.cos()) / 4.0);
        c.check(close(r.wigner_dist.probs(), &[p, p, m, m], TOL), || {
            format!("ωt = {wt}: {:?}", r.wigner_dist.probs())
        });
        let expected = k != 50;
        c.check(
            r.classical_compatible == Verdict::Compatible(expected),
            || format!("ωt = {wt}: verdict {:?}", r.classical_compatible),
        );
    }
    c.finish();
}

#[test]
fn criterion_02d_phase_grid() {
    let mut c = Criterion::new("2d", "phase grid of 100 points, always compatible");
    for k in 0..100 {
        let phi = k as f64 * TAU / 100.0;
        let r = run_scenario(&cfg(Variant::Phase, &[("phi", phi)])).unwrap();
        let expected = [(1.0 + phi.cos()) / 2.0, (1.0 - phi.cos()) / 2.0, 0.0, 0.0];
        c.check(close(r.wigner_dist.probs(), &expected, TOL), || {
            format!("φ = {phi}: {:?}", r.wigner_dist.probs())
        });
        c.check(r.classical_compatible == Verdict::Compatible(true), || {
            format!("φ = {phi}: verdict {:?}", r.classical_compatible)
        });
    }
    c.finish();
}

#[test]
fn criterion_02e_ignorant_wigner() {
    let mut c = Criterion::new("2e", "ignorant_wigner gives SpaceMismatch");
    let r = run_scenario(&cfg(Variant::IgnorantWigner, &[])).unwrap();
    c.check(r.classical_compatible == Verdict::SpaceMismatch, || {
        format!("classical {:?}", r.classical_compatible)
    });
    c.check(r.wigner_dist.space().len() == 2, || {
        "wigner dist is not on two labels".into()
    });
    c.finish();
}

#[test]
fn criterion_03_two_wigners() {
    let mut c = Criterion::new("3", "two-Wigner triple at (0, π) is (true, true, false)");
    let r = run_scenario(&cfg(
        Variant::TwoWigners,
        &[("phi_left", 0.0), ("phi_right", PI)],
    ))
    .unwrap();
    let t = r
        .three_party
        .expect("two-Wigner result carries the third party");
    let expected = [
        Verdict::Compatible(true),
        Verdict::Compatible(true),
        Verdict::Compatible(false),
    ];
    c.check(t.classical == expected, || {
        format!("classical {:?}", t.classical)
    });
    c.check(t.quantum == expected, || format!("quantum {:?}", t.quantum));
    c.finish();
}

#[test]
fn criterion_04_reconciliation() {
    let mut c = Criterion::new("4", "reconciliation posteriors for X = 0 and X = 1");
    let canonical = cfg(Variant::Canonical, &[]);

    let r = run_reconciliation(&canonical, Mode::Classical, "0").unwrap();
    for (who, side) in [("wigner", &r.wigner), ("friend", &r.friend)] {
        c.check(
            matches!(side, Ok(a) if close(classical(a).probs(), &[1.0, 0.0, 0.0, 0.0], TOL)),
            || format!("classical X=0 {who}: {side:?}"),
        );
    }
    let r = run_reconciliation(&canonical, Mode::Classical, "1").unwrap();
    c.check(matches!(r.wigner, Err(Error::ZeroEvidence(_))), || {
        format!("classical X=1 wigner: {:?}", r.wigner)
    });
    c.check(
        matches!(&r.friend, Ok(a) if close(classical(a).probs(), &[0.0, 1.0, 0.0, 0.0], TOL)),
        || format!("classical X=1 friend: {:?}", r.friend),
    );

    let r = run_reconciliation(&canonical, Mode::Quantum, "0").unwrap();
    for (who, side) in [("wigner", &r.wigner), ("friend", &r.friend)] {
        c.check(
            matches!(side, Ok(a) if state_close(quantum(a), &Bell::PhiPlus.state(), TOL)),
            || format!("quantum X=0 {who} is not φ+"),
        );
    }
    let r = run_reconciliation(&canonical, Mode::Quantum, "1").unwrap();
    c.check(matches!(r.wigner, Err(Error::ZeroEvidence(_))), || {
        format!("quantum X=1 wigner: {:?}", r.wigner)
    });
    c.check(
        matches!(&r.friend, Ok(a) if state_close(quantum(a), &Bell::PhiMinus.state(), TOL)),
        || "quantum X=1 friend is not φ-".into(),
    );
    c.finish();
}

#[test]
fn criterion_05_improvement() {
    let mut c = Criterion::new("5", "eight improvement cases for ε in {0.01, 0.1, 0.3}");
    let point = [1.0, 0.0, 0.0, 0.0];
    let half = [0.5, 0.5, 0.0, 0.0];
    let phi_plus = Bell::PhiPlus.state();
    let sigma_f = friend_state();
    for eps in [0.01, 0.1, 0.3] {
        for case in ImprovementCase::ALL {
            let post = run_improvement(case, Some(eps)).unwrap().posterior;
            let ok = match case {
                ImprovementCase::C1a | ImprovementCase::C1b | ImprovementCase::C1d => {
                    close(classical(&post).probs(), &point, TOL)
                }
                ImprovementCase::C1c => close(classical(&post).probs(), &half, TOL),
                ImprovementCase::Q2a | ImprovementCase::Q2b | ImprovementCase::Q2d => {
                    state_close(quantum(&post), &phi_plus, TOL)
                }
                ImprovementCase::Q2c => state_close(quantum(&post), &sigma_f, TOL),
            };
            c.check(ok, || format!("{case} at ε = {eps}: {post:?}"));
        }
    }
    for case in [ImprovementCase::C1c, ImprovementCase::Q2c] {
        let posts: Vec<Assignment> = [0.01, 0.1, 0.3]
            .into_iter()
            .map(|e| run_improvement(case, Some(e)).unwrap().posterior)
            .collect();
        for p in &posts[1..] {
            let same = match (p, &posts[0]) {
                (Assignment::Classical(a), Assignment::Classical(b)) => {
                    a.max_abs_diff(b).unwrap() <= TOL
                }
                (Assignment::Quantum(a), Assignment::Quantum(b)) => state_close(a, b, TOL),
                _ => false,
            };
            c.check(same, || format!("{case} depends on ε"));
        }
    }
    c.finish();
}

#[test]
fn criterion_06_pooling() {
    let mut c = Criterion::new("6", "supra, linear and multiplicative pools");
    let supra = run_pooling(PoolMethod::Supra, None, None).unwrap();
    c.check(close(supra.probs(), &[1.0, 0.0, 0.0, 0.0], TOL), || {
        format!("supra {:?}", supra.probs())
    });
    let lin = run_pooling(PoolMethod::Linear, Some(&[0.5, 0.5]), None).unwrap();
    c.check(close(lin.probs(), &[0.75, 0.25, 0.0, 0.0], TOL), || {
        format!("linear {:?}", lin.probs())
    });
    let lin = run_pooling(PoolMethod::Linear, Some(&[0.1, 0.9]), None).unwrap();
    c.check(close(lin.probs(), &[0.55, 0.45, 0.0, 0.0], TOL), || {
        format!("linear {:?}", lin.probs())
    });

    // Independent evaluation of Π_i p_i(y)^{w_i}, renormalised.
    let w: [f64; 4] = [1.0, 0.0, 0.0, 0.0];
    let f: [f64; 4] = [0.5, 0.5, 0.0, 0.0];
    let raw: Vec<f64> = (0..4).map(|i| w[i].powf(0.5) * f[i].powf(0.5)).collect();
    let total: f64 = raw.iter().sum();
    let expected: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let mult = run_pooling(PoolMethod::Multiplicative, Some(&[0.5, 0.5]), None).unwrap();
    c.check(
        close(mult.probs(), &expected, TOL) && close(&expected, &[1.0, 0.0, 0.0, 0.0], TOL),
        || format!("multiplicative {:?} vs {expected:?}", mult.probs()),
    );

    let disjoint = [
        ProbDist::bell([0.0, 0.0, 0.0, 1.0]).unwrap(),
        ProbDist::bell([0.5, 0.5, 0.0, 0.0]).unwrap(),
    ];
    let r = pool_multiplicative(&disjoint, &[0.5, 0.5], None);
    c.check(r == Err(Error::JointlyIncompatible), || {
        format!("disjoint pair: {r:?}")
    });
    c.finish();
}

/// Random pair over 2-4 outcomes that shares at least one supported label.
fn compatible_pair(r: &mut impl Rng) -> (ProbDist, ProbDist) {
    loop {
        let n = r.gen_range(2..=4);
        let a = random_dist(r, n, 0.4);
        let b = random_dist(r, n, 0.4);
        if compatible(&a, &b, SUPPORT_TOL).unwrap() {
            return (a, b);
        }
    }
}

#[test]
fn criterion_07_objective_joint() {
    let mut c = Criterion::new(
        "7",
        "objective joint recovers both assignments; 500 random compatible pairs",
    );
    let w = ProbDist::bell([1.0, 0.0, 0.0, 0.0]).unwrap();
    let f = ProbDist::bell([0.5, 0.5, 0.0, 0.0]).unwrap();
    let j = construct_objective_joint(&f, &w).unwrap();
    let given_f = j.joint.condition_first(1, "0").unwrap();
    let given_w = j.joint.condition_first(2, "0").unwrap();
    c.check(close(given_f.probs(), &[0.5, 0.5, 0.0, 0.0], TOL), || {
        format!("P(Y|F=0) {:?}", given_f.probs())
    });
    c.check(close(given_w.probs(), &[1.0, 0.0, 0.0, 0.0], TOL), || {
        format!("P(Y|W=0) {:?}", given_w.probs())
    });

    let mut r = rng(7);
    for trial in 0..500 {
        let (a, b) = compatible_pair(&mut r);
        let j = construct_objective_joint(&a, &b).unwrap();
        let ga = j.joint.condition_first(1, "0").unwrap();
        let gb = j.joint.condition_first(2, "0").unwrap();
        c.check(
            ga.max_abs_diff(&a).unwrap() <= TOL && gb.max_abs_diff(&b).unwrap() <= TOL,
            || format!("trial {trial}: {:?} / {:?}", a.probs(), b.probs()),
        );
    }
    c.finish();
}

#[test]
fn criterion_08_hybrid_joint() {
    let mut c = Criterion::new(
        "8",
        "hybrid joint two-branch form; 200 random dominated pairs",
    );
    let h = construct_hybrid_joint(&friend_state(), &Bell::PhiPlus.state()).unwrap();
    let b00 = h.branch("0", "0").unwrap();
    let b01 = h.branch("0", "1").unwrap();
    c.check(
        (b00.weight - 0.5).abs() <= TOL && state_close(&b00.state, &Bell::PhiPlus.state(), TOL),
        || "branch (0,0) is not ½ φ+".into(),
    );
    c.check(
        (b01.weight - 0.5).abs() <= TOL && state_close(&b01.state, &Bell::PhiMinus.state(), TOL),
        || "branch (0,1) is not ½ φ-".into(),
    );
    let rest: f64 = h
        .branches
        .iter()
        .filter(|b| b.f != "0")
        .map(|b| b.weight)
        .sum();
    c.check(rest.abs() <= TOL, || {
        format!("F=1 branches carry weight {rest}")
    });
    c.check(
        state_close(
            &hybrid_condition(&h, Party::Friend, "0").unwrap(),
            &friend_state(),
            TOL,
        ),
        || "ρ(S|F=0) is not σ_F".into(),
    );
    c.check(
        state_close(
            &hybrid_condition(&h, Party::Wigner, "0").unwrap(),
            &Bell::PhiPlus.state(),
            TOL,
        ),
        || "ρ(S|W=0) is not φ+".into(),
    );

    let mut r = rng(8);
    for trial in 0..200 {
        let rank = r.gen_range(1..=4);
        let span = random_columns(&mut r, 4, rank);
        let mut mix = |k: usize| {
            let coeffs = random_columns(&mut r, rank, k);
            let cols: Vec<Vec<Complex64>> = coeffs
                .iter()
                .map(|cf| {
                    (0..4)
                        .map(|i| (0..rank).map(|j| cf[j] * span[j][i]).sum())
                        .collect()
                })
                .collect();
            normalise(&gram(&cols))
        };
        let friend = mix(rank);
        let k = 1 + (trial % rank);
        let wigner = mix(k);
        let ok = construct_hybrid_joint(&friend, &wigner)
            .ok()
            .is_some_and(|h| {
                let f = hybrid_condition(&h, Party::Friend, "0").unwrap();
                let w = hybrid_condition(&h, Party::Wigner, "0").unwrap();
                state_close(&f, &friend, TOL) && state_close(&w, &wigner, TOL)
            });
        c.check(ok, || {
            format!("trial {trial} (rank {rank}, wigner rank {k})")
        });
    }
    c.finish();
}

fn random_effect(r: &mut impl Rng, dim: usize) -> ComplexMatrix {
    let u = random_unitary(r, dim);
    let values: Vec<f64> = (0..dim)
        .map(|_| {
            if r.gen_bool(0.3) {
                0.0
            } else {
                r.gen_range(0.0..=1.0)
            }
        })
        .collect();
    in_basis(&u, &values)
}

#[test]
fn criterion_09a_classical_cromwell() {
    let mut c = Criterion::new(
        "9a",
        "classical Cromwell containment on 1000 defined updates",
    );
    let mut r = rng(91);
    let mut defined = 0;
    while defined < 1000 {
        let n = r.gen_range(2..=4);
        let prior = random_dist(&mut r, n, 0.4);
        let row: Vec<f64> = (0..n)
            .map(|_| {
                if r.gen_bool(0.3) {
                    0.0
                } else {
                    r.gen_range(0.0..=1.0)
                }
            })
            .collect();
        let lik = ConditionalTable::binary(space(n), &row, "x", "y").unwrap();
        let outcome = if r.gen_bool(0.5) { "x" } else { "y" };
        match bayes_condition(&prior, &lik, outcome) {
            Ok(post) => {
                defined += 1;
                let before = support(&prior, SUPPORT_TOL);
                let after = support(&post, SUPPORT_TOL);
                c.check(after.iter().all(|l| before.contains(l)), || {
                    format!("{:?} -> {:?}", prior.probs(), post.probs())
                });
            }
            Err(Error::ZeroEvidence(e)) => {
                c.check(e <= ATOL, || format!("spurious zero evidence {e}"))
            }
            Err(e) => c.check(false, || format!("unexpected error {e}")),
        }
    }
    c.finish();
}

#[test]
fn criterion_09b_quantum_cromwell() {
    let mut c = Criterion::new("9b", "quantum Cromwell containment on 1000 defined updates");
    let mut r = rng(92);
    let mut defined = 0;
    while defined < 1000 {
        let dim = r.gen_range(2..=4);
        let prior = random_state(&mut r, dim);
        let lik = LikelihoodOperator::binary(random_effect(&mut r, dim), "x", "y").unwrap();
        let outcome = if r.gen_bool(0.5) { "x" } else { "y" };
        match quantum_bayes_update(&prior, &lik, outcome) {
            Ok(post) => {
                defined += 1;
                c.check(
                    contained(&post.support(SUPPORT_TOL), &prior.support(SUPPORT_TOL)),
                    || format!("update {defined} leaves the prior support"),
                );
            }
            Err(Error::ZeroEvidence(_)) => {}
            Err(e) => c.check(false, || format!("unexpected error {e}")),
        }
    }
    c.finish();
}

#[test]
fn criterion_09c_reconciliation_equivalence() {
    let mut c = Criterion::new(
        "9c",
        "compatibility iff reconciliation succeeds; 500 random classical pairs",
    );
    let mut r = rng(93);
    let mut seen = [0usize; 2];
    for trial in 0..500 {
        let n = r.gen_range(2..=4);
        let a = random_dist(&mut r, n, 0.5);
        let b = random_dist(&mut r, n, 0.5);
        let compat = compatible(&a, &b, SUPPORT_TOL).unwrap();
        seen[usize::from(compat)] += 1;
        let reconciled = reconciliation_likelihood(&a, &b, SUPPORT_TOL)
            .ok()
            .and_then(|(lik, x)| {
                let pa = bayes_condition(&a, &lik, &x).ok()?;
                let pb = bayes_condition(&b, &lik, &x).ok()?;
                Some(pa.max_abs_diff(&pb).ok()? <= TOL)
            })
            .unwrap_or(false);
        c.check(compat == reconciled, || {
            format!(
                "trial {trial}: {:?} / {:?} compatible={compat}",
                a.probs(),
                b.probs()
            )
        });
    }
    c.check(seen[0] > 0 && seen[1] > 0, || {
        format!("sample lacks one class: {seen:?}")
    });
    c.finish();
}

#[test]
fn criterion_09d_diagonal_cross_oracle() {
    let mut c = Criterion::new(
        "9d",
        "quantum update equals classical update in a shared basis; 500 instances",
    );
    let mut r = rng(94);
    for trial in 0..500 {
        let dim = r.gen_range(2..=4);
        let u = random_unitary(&mut r, dim);
        let prior = random_dist(&mut r, dim, 0.3);
        let row: Vec<f64> = (0..dim).map(|_| r.gen_range(0.0..=1.0)).collect();
        let table = ConditionalTable::binary(space(dim), &row, "x", "y").unwrap();
        let q_prior = DensityOperator::new(in_basis(&u, prior.probs())).unwrap();
        let q_lik = LikelihoodOperator::binary(in_basis(&u, &row), "x", "y").unwrap();
        let ok = match (
            bayes_condition(&prior, &table, "x"),
            quantum_bayes_update(&q_prior, &q_lik, "x"),
        ) {
            (Ok(cl), Ok(q)) => {
                (&(&u.adjoint() * q.matrix()) * &u)
                    .max_abs_diff(&ComplexMatrix::diagonal(cl.probs()))
                    <= TOL
            }
            (Err(Error::ZeroEvidence(_)), Err(Error::ZeroEvidence(_))) => true,
            _ => false,
        };
        c.check(ok, || format!("trial {trial}"));
    }
    c.finish();
}

#[test]
fn criterion_09e_star_and_sqrt_oracles() {
    let mut c = Criterion::new(
        "9e",
        "psd_sqrt and star product against oracles; 1000 random matrices each",
    );
    let mut r = rng(95);
    for trial in 0..1000 {
        let dim = r.gen_range(1..=4);
        let rank = r.gen_range(1..=dim);
        let m = random_psd(&mut r, dim, rank);
        let root = psd_sqrt(&m).unwrap();
        c.check(
            (&root * &root).max_abs_diff(&m) <= TOL * m.max_abs().max(1.0),
            || format!("sqrt trial {trial}"),
        );
    }
    for trial in 0..1000 {
        let dim = r.gen_range(1..=4);
        let rank = r.gen_range(1..=dim);
        let m = random_psd(&mut r, dim, rank);
        let n = &random_psd(&mut r, dim, dim) + &ComplexMatrix::identity(dim).scale_real(0.1);
        let oracle = denman_beavers_sqrt(&n);
        let expected = &(&oracle * &m) * &oracle;
        c.check(
            star_product(&m, &n).unwrap().max_abs_diff(&expected)
                <= TOL * expected.max_abs().max(1.0),
            || format!("star trial {trial}"),
        );
    }
    c.finish();
}

#[test]
fn criterion_10_goldens_deterministic() {
    let mut c = Criterion::new("10", "two goldens runs give byte-identical trees");
    let dirs = [tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap()];
    for d in &dirs {
        let out = Command::new(env!("CARGO_BIN_EXE_epistemic-qm"))
            .arg("goldens")
            .arg(d.path())
            .env_remove("EPISTEMIC_QM_TOL")
            .output()
            .unwrap();
        c.check(out.status.success(), || {
            String::from_utf8_lossy(&out.stderr).into_owned()
        });
    }
    let list = |p: &std::path::Path| {
        let mut names: Vec<String> = std::fs::read_dir(p)
            .unwrap()
            .map(|e| e.unwrap().file_name().into_string().unwrap())
            .collect();
        names.sort();
        names
    };
    let (a, b) = (list(dirs[0].path()), list(dirs[1].path()));
    c.check(!a.is_empty() && a == b, || {
        format!("file lists differ: {a:?} / {b:?}")
    });
    for name in &a {
        let x = std::fs::read(dirs[0].path().join(name)).unwrap();
        let y = std::fs::read(dirs[1].path().join(name)).unwrap_or_default();
        c.check(x == y, || format!("{name} differs"));
    }
    c.finish();
}

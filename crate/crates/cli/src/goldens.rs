//! Reference tables written by `goldens`: every headline number of the
//! library, one JSON file per table, regenerated from scratch on each run.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use epistemic_qm::classical::{
    agree, bayes_condition, common_support, compatible, construct_objective_joint,
    pool_multiplicative, reconciliation_likelihood, support, ProbDist,
};
use epistemic_qm::numerics::{
    hermitian_eig, psd_sqrt, subspace_intersection_rank, ComplexMatrix, SUPPORT_TOL,
};
use epistemic_qm::quantum::{
    basis_ket, born_probabilities, construct_hybrid_joint, evolve_channel, evolve_unitary,
    hybrid_condition, projective_likelihood, quantum_agree, quantum_bayes_update,
    quantum_compatible, Bell, DensityOperator, KrausChannel, Party, Pvm,
};
use epistemic_qm::scenarios::{
    entangler, friend_state, phase_state, run_improvement, run_pooling, run_reconciliation,
    run_scenario, ImprovementCase, Mode, PoolMethod, ScenarioConfig, Variant,
};
use epistemic_qm::{Error, Result};
use serde_json::{json, Value};

use crate::layout;
use crate::report::{assignment_json, bell_probabilities, scenario_json, ReportTable};
use crate::statefile::{dist_file, quantum_json};
use crate::CliError;

/// Epsilon values swept by the open-minded cases.
pub const EPSILONS: [f64; 3] = [0.01, 0.1, 0.3];

fn error_tag(e: &Error) -> String {
    match e {
        Error::ZeroEvidence(_) => "zero_evidence".into(),
        Error::SpaceMismatch => "space_mismatch".into(),
        Error::DimMismatch(..) => "dim_mismatch".into(),
        Error::Incompatible => "incompatible".into(),
        Error::JointlyIncompatible => "jointly_incompatible".into(),
        other => other.to_string(),
    }
}

fn outcome<T>(r: Result<T>, f: impl FnOnce(T) -> Value) -> Value {
    match r {
        Ok(v) => f(v),
        Err(e) => json!({"error": error_tag(&e)}),
    }
}

fn matrix_json(m: &ComplexMatrix) -> Value {
    let data: Vec<[f64; 2]> = m.entries().iter().map(|z| [z.re, z.im]).collect();
    json!({"dim": m.dim(), "data": data})
}

fn bell(p: [f64; 4]) -> ProbDist {
    ProbDist::bell(p).expect("static distribution is valid")
}

fn pure(index: usize) -> DensityOperator {
    DensityOperator::pure(&basis_ket(4, index)).expect("basis kets are normalised")
}

fn bell_pair(a: Bell, b: Bell) -> DensityOperator {
    DensityOperator::mixture(&[(0.5, &a.state()), (0.5, &b.state())])
        .expect("static mixture is valid")
}

type Params = &'static [(&'static str, f64)];

fn scenarios() -> Result<ReportTable> {
    let mut t = ReportTable::new("scenarios");
    let cases: [(&str, Variant, Params); 9] = [
        ("canonical", Variant::Canonical, &[]),
        ("wrong_initial", Variant::WrongInitial, &[]),
        ("not_gate", Variant::NotGate, &[]),
        (
            "time_evolution_0",
            Variant::TimeEvolution,
            &[("omega_t", 0.0)],
        ),
        (
            "time_evolution_pi",
            Variant::TimeEvolution,
            &[("omega_t", PI)],
        ),
        ("phase_pi", Variant::Phase, &[("phi", PI)]),
        (
            "two_wigners_0_pi",
            Variant::TwoWigners,
            &[("phi_left", 0.0), ("phi_right", PI)],
        ),
        (
            "benefit_of_doubt_0.01",
            Variant::BenefitOfDoubt,
            &[("epsilon", 0.01)],
        ),
        ("ignorant_wigner", Variant::IgnorantWigner, &[]),
    ];
    for (id, variant, params) in cases {
        let cfg = ScenarioConfig::with(variant, params)?;
        let mut out = scenario_json(&run_scenario(&cfg)?);
        let params = out["params"].take();
        if let Value::Object(m) = &mut out {
            m.remove("params");
        }
        t.row(id, params, out);
    }
    Ok(t)
}

fn compatibility() -> Result<ReportTable> {
    let mut t = ReportTable::new("compatibility");
    let w = bell([1.0, 0.0, 0.0, 0.0]);
    let f = bell([0.5, 0.5, 0.0, 0.0]);
    let twisted = bell([0.0, 0.0, 0.0, 1.0]);
    let coin = ProbDist::uniform(epistemic_qm::classical::OutcomeSpace::binary());
    for (id, d) in [("support_wigner", &w), ("support_friend", &f)] {
        t.row(
            id,
            json!({"dist": dist_file(d)}),
            json!(support(d, SUPPORT_TOL)),
        );
    }
    for (id, a, b) in [
        ("classical_canonical", &w, &f),
        ("classical_wrong_initial", &twisted, &f),
        ("classical_ignorant", &coin, &f),
    ] {
        let out = outcome(
            compatible(a, b, SUPPORT_TOL),
            |c| json!({"compatible": c, "common_support": common_support(a, b, SUPPORT_TOL).unwrap_or_default()}),
        );
        t.row(id, json!({"a": dist_file(a), "b": dist_file(b)}), out);
    }
    t.row(
        "agree_canonical",
        Value::Null,
        outcome(agree(&[w.clone(), f.clone()]), |b| json!(b)),
    );
    t.row(
        "agree_reconciled",
        Value::Null,
        outcome(agree(&[w.clone(), w.clone()]), |b| json!(b)),
    );

    let phi_plus = Bell::PhiPlus.state();
    let pair = bell_pair(Bell::PhiPlus, Bell::PhiMinus);
    let q = quantum_compatible(&phi_plus, &pair, SUPPORT_TOL)?;
    let rank = subspace_intersection_rank(
        &phi_plus.support(SUPPORT_TOL),
        &pair.support(SUPPORT_TOL),
        SUPPORT_TOL,
    )?;
    t.row(
        "quantum_phi_plus_vs_phi_pair",
        json!({"a": quantum_json(&phi_plus), "b": quantum_json(&pair)}),
        json!({"compatible": q, "common_support": rank}),
    );
    t.row(
        "quantum_agree_canonical",
        Value::Null,
        outcome(quantum_agree(&[phi_plus.clone(), friend_state()]), |b| {
            json!(b)
        }),
    );
    t.row(
        "quantum_agree_reconciled",
        Value::Null,
        outcome(quantum_agree(&[phi_plus.clone(), phi_plus.clone()]), |b| {
            json!(b)
        }),
    );
    Ok(t)
}

fn primitives() -> Result<ReportTable> {
    let mut t = ReportTable::new("quantum_primitives");
    let phi_plus = Bell::PhiPlus.state();
    let spectrum = hermitian_eig(phi_plus.matrix())?;
    t.row(
        "eig_phi_plus",
        Value::Null,
        json!({
            "eigenvalues": spectrum.eigenvalues,
            "leading_eigenvector": spectrum.eigenvectors[0].iter().map(|z| [z.re, z.im]).collect::<Vec<_>>(),
        }),
    );
    t.row(
        "sqrt_phi_plus_projector",
        Value::Null,
        matrix_json(&psd_sqrt(phi_plus.matrix())?),
    );
    t.row(
        "support_phi_plus",
        Value::Null,
        json!({"rank": phi_plus.rank(SUPPORT_TOL)}),
    );
    let pair = bell_pair(Bell::PhiPlus, Bell::PhiMinus);
    t.row(
        "support_phi_pair",
        Value::Null,
        json!({"rank": pair.rank(SUPPORT_TOL)}),
    );

    let pvm = Pvm::bell();
    t.row(
        "born_phi_plus",
        Value::Null,
        json!(born_probabilities(&phi_plus, &pvm)?.probs()),
    );
    t.row(
        "born_friend",
        Value::Null,
        json!(born_probabilities(&friend_state(), &pvm)?.probs()),
    );
    t.row(
        "born_phase_pi",
        json!({"phi": PI}),
        json!(born_probabilities(&phase_state(PI)?, &pvm)?.probs()),
    );

    let u = entangler();
    t.row(
        "entangle_00",
        Value::Null,
        quantum_json(&evolve_unitary(&pure(0), &u)?),
    );
    t.row(
        "entangle_11",
        Value::Null,
        quantum_json(&evolve_unitary(&pure(3), &u)?),
    );
    let eps = 0.01;
    let noisy = evolve_channel(&phi_plus, &KrausChannel::noisy(eps)?)?;
    t.row(
        "noisy_phi_plus",
        json!({"epsilon": eps}),
        json!({"state": quantum_json(&noisy), "bell": bell_probabilities(&noisy)}),
    );
    Ok(t)
}

fn reconciliation() -> Result<ReportTable> {
    let mut t = ReportTable::new("reconciliation");
    let w = bell([1.0, 0.0, 0.0, 0.0]);
    let f = bell([0.5, 0.5, 0.0, 0.0]);
    let (lik, agreeing) = reconciliation_likelihood(&w, &f, SUPPORT_TOL)?;
    let table: Vec<Value> = lik.rows().iter().map(|r| json!(r.probs())).collect();
    t.row(
        "classical_likelihood",
        Value::Null,
        json!({
            "given": lik.given_space().labels(),
            "result": lik.result_space().labels(),
            "rows": table,
            "agreeing_outcome": agreeing,
        }),
    );
    t.row(
        "classical_update_x1_wigner",
        Value::Null,
        outcome(bayes_condition(&w, &lik, "1"), |d| dist_file(&d)),
    );

    let target = projective_likelihood(&Bell::PhiPlus.state())?;
    t.row(
        "quantum_likelihood",
        Value::Null,
        json!({
            "labels": target.outcome_space().labels(),
            "effects": target.effects().iter().map(matrix_json).collect::<Vec<_>>(),
        }),
    );
    t.row(
        "quantum_update_x1_friend",
        Value::Null,
        outcome(quantum_bayes_update(&friend_state(), &target, "1"), |s| {
            quantum_json(&s)
        }),
    );

    let cfg = ScenarioConfig::with(Variant::Canonical, &[])?;
    for (mode, mode_name) in [(Mode::Classical, "classical"), (Mode::Quantum, "quantum")] {
        for x in ["0", "1"] {
            let r = run_reconciliation(&cfg, mode, x)?;
            let side = |a: &Result<epistemic_qm::scenarios::Assignment>| match a {
                Ok(a) => {
                    let mut v = json!({"posterior": assignment_json(a)});
                    if let epistemic_qm::scenarios::Assignment::Quantum(s) = a {
                        v["bell"] = bell_probabilities(s);
                    }
                    v
                }
                Err(e) => json!({"error": error_tag(e)}),
            };
            t.row(
                &format!("canonical_{mode_name}_x{x}"),
                json!({"scenario": "canonical", "mode": mode_name, "outcome": x}),
                json!({"wigner": side(&r.wigner), "friend": side(&r.friend)}),
            );
        }
    }
    Ok(t)
}

fn improvement() -> Result<ReportTable> {
    let mut t = ReportTable::new("improvement");
    for case in ImprovementCase::ALL {
        let eps: Vec<Option<f64>> = if case.needs_epsilon() {
            let mut v: Vec<Option<f64>> = EPSILONS.iter().copied().map(Some).collect();
            if case == ImprovementCase::Q2c {
                v.push(Some(0.05));
            }
            v
        } else {
            vec![None]
        };
        for e in eps {
            let imp = run_improvement(case, e)?;
            let mut out = json!({"prior": assignment_json(&imp.prior), "posterior": assignment_json(&imp.posterior)});
            if let epistemic_qm::scenarios::Assignment::Quantum(s) = &imp.posterior {
                out["posterior_bell"] = bell_probabilities(s);
            }
            let (id, params) = match e {
                Some(e) => (
                    format!("{case}_eps_{}", layout::format_f64(e)),
                    json!({"epsilon": e}),
                ),
                None => (case.to_string(), Value::Null),
            };
            t.row(&id, params, out);
        }
    }
    Ok(t)
}

fn pooling() -> Result<ReportTable> {
    let mut t = ReportTable::new("pooling");
    t.row(
        "supra",
        Value::Null,
        json!(run_pooling(PoolMethod::Supra, None, None)?.probs()),
    );
    for w in [[0.5, 0.5], [0.1, 0.9]] {
        let id = format!(
            "linear_{}_{}",
            layout::format_f64(w[0]),
            layout::format_f64(w[1])
        );
        t.row(
            &id,
            json!({"weights": w}),
            json!(run_pooling(PoolMethod::Linear, Some(&w), None)?.probs()),
        );
    }
    t.row(
        "multiplicative_0.5_0.5",
        json!({"weights": [0.5, 0.5]}),
        json!(run_pooling(PoolMethod::Multiplicative, Some(&[0.5, 0.5]), None)?.probs()),
    );
    let disjoint = [bell([0.0, 0.0, 0.0, 1.0]), bell([0.5, 0.5, 0.0, 0.0])];
    t.row(
        "multiplicative_disjoint",
        json!({"weights": [0.5, 0.5], "a": dist_file(&disjoint[0]), "b": dist_file(&disjoint[1])}),
        outcome(pool_multiplicative(&disjoint, &[0.5, 0.5], None), |d| {
            json!(d.probs())
        }),
    );
    Ok(t)
}

fn objective_joint() -> Result<ReportTable> {
    let mut t = ReportTable::new("objective_joint");
    let w = bell([1.0, 0.0, 0.0, 0.0]);
    let f = bell([0.5, 0.5, 0.0, 0.0]);
    let j = construct_objective_joint(&f, &w)?;
    let spaces: Vec<&[String]> = j.joint.spaces().iter().map(|s| s.labels()).collect();
    t.row(
        "canonical",
        json!({"axes": ["Y", "F", "W"]}),
        json!({
            "p_f": j.weight_f,
            "p_w": j.weight_w,
            "spaces": spaces,
            "joint": j.joint.probs(),
            "given_f0": j.joint.condition_first(1, "0")?.probs(),
            "given_w0": j.joint.condition_first(2, "0")?.probs(),
        }),
    );
    Ok(t)
}

fn hybrid_joint() -> Result<ReportTable> {
    let mut t = ReportTable::new("hybrid_joint");
    let h = construct_hybrid_joint(&friend_state(), &Bell::PhiPlus.state())?;
    let branches: Vec<Value> = h
        .branches
        .iter()
        .map(|b| {
            json!({
                "f": b.f,
                "w": b.w,
                "weight": b.weight,
                "placeholder": b.placeholder,
                "state": quantum_json(&b.state),
                "bell": bell_probabilities(&b.state),
            })
        })
        .collect();
    t.row(
        "canonical",
        Value::Null,
        json!({
            "branches": branches,
            "given_f0": quantum_json(&hybrid_condition(&h, Party::Friend, "0")?),
            "given_w0": quantum_json(&hybrid_condition(&h, Party::Wigner, "0")?),
        }),
    );
    Ok(t)
}

pub fn tables() -> Result<Vec<ReportTable>> {
    Ok(vec![
        scenarios()?,
        compatibility()?,
        primitives()?,
        reconciliation()?,
        improvement()?,
        pooling()?,
        objective_joint()?,
        hybrid_joint()?,
    ])
}

/// Writes `<name>.json` for every table into `out_dir` and returns the file names.
pub fn write(out_dir: &Path) -> std::result::Result<Vec<String>, CliError> {
    let tables = tables()?;
    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::usage(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut names = Vec::new();
    for t in tables {
        let name = format!("{}.json", t.name());
        let path = out_dir.join(&name);
        fs::write(&path, layout::to_string(&t.to_json()))
            .map_err(|e| CliError::usage(format!("cannot write {}: {e}", path.display())))?;
        names.push(name);
    }
    Ok(names)
}

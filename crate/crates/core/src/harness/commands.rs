use rand::Rng as _;
use rayon::prelude::*;

use super::{trial_seed, ExperimentConfig, Params, Run, Table, TrialRecord};
use crate::learners::shallow::subsets;
use crate::learners::{
    goldreich_levin, learn_junta, learn_qbf_with, learn_shallow, qsq_state_tomography, CoordinateSearch, GlConfig,
    JuntaConfig, QbfConfig, ShallowConfig,
};
use crate::metrics::{
    choi_distance, choi_matrix, general_sandwich_check, kraus_overlap_sum, purity_unitarity_sandwich_check,
    unitarity as channel_unitarity, unitarity_closed_form, KrausChannel,
};
use crate::oracle::{QsqOracle, StatisticalQuery};
use crate::oracle_maps::{default_variance_probe, separation_bound, separation_gap, variance_probe};
use crate::pauli::{pauli_matrix, Pauli, PauliExpansion, PauliString};
use crate::rng::rng_from_seed;
use crate::state::{
    choi_of_unitary, haar_random_state, haar_random_unitary, random_brickwork_circuit, DenseOperator, StateVector,
};
use crate::{QsqError, Result};

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// `|Σ_{Q ∈ {I,Z}^n} b_Q| = |⟨0…0|B|0…0⟩|`
pub fn figure1_prediction(expansion: &PauliExpansion) -> f64 {
    expansion
        .iter()
        .filter(|(p, _)| p.letters().iter().all(|l| matches!(l, Pauli::I | Pauli::Z)))
        .map(|(_, c)| c.re)
        .sum::<f64>()
        .abs()
}

fn diagonal_paulis(n: usize) -> Vec<PauliString> {
    (0..1usize << n)
        .map(|x| {
            let letters: Vec<Pauli> =
                (0..n).map(|i| if (x >> (n - 1 - i)) & 1 == 1 { Pauli::Z } else { Pauli::I }).collect();
            PauliString::from_letters(&letters)
        })
        .collect()
}

fn conjugate(u: &DenseOperator, p: &PauliString) -> Result<DenseOperator> {
    Ok(&(&u.adjoint() * &pauli_matrix(p)?) * u)
}

pub(super) fn figure1(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let n = params.positive_usize("n", 4)?;
    let depth = params.positive_usize("depth", 2)?;
    let unitaries = params.positive_usize("unitaries", 10)?;
    let mut gammas = params.f64_list("gammas", &[0.8, 0.4, 0.2, 0.1])?;
    let assert_monotone = params.boolean("assert_monotone", true)?;
    gammas.sort_by(|a, b| b.total_cmp(a));

    let circuits = (0..unitaries)
        .map(|t| {
            Ok(random_brickwork_circuit(n, depth, &mut rng_from_seed(trial_seed(cfg.seed, &[0, t as u64])))?.compile())
        })
        .collect::<Result<Vec<_>>>()?;
    let observables = diagonal_paulis(n);
    let tasks: Vec<(usize, usize, usize)> = (0..gammas.len())
        .flat_map(|g| (0..unitaries).flat_map(move |t| (0..1usize << n).map(move |o| (g, t, o))))
        .collect();
    let results = tasks
        .par_iter()
        .map(|&(g, t, o)| {
            let gamma = gammas[g];
            let u = &circuits[t];
            let p = &observables[o];
            let psi = u.apply(&StateVector::zero(n))?;
            let truth = psi.pauli_expectation(p).abs();
            let seed = trial_seed(cfg.seed, &[1, g as u64, t as u64, o as u64]);
            let mut oracle = QsqOracle::for_unitary(&conjugate(u, p)?, cfg.noise, seed)?;
            let qcfg = QbfConfig { gl: GlConfig::new(gamma)?, coefficient_tolerance: gamma / 2.0 };
            let est = learn_qbf_with(&mut oracle, &qcfg, gamma)?;
            let err = (figure1_prediction(&est.expansion) - truth).abs();
            Ok((err, TrialRecord::new(format!("gamma={gamma} trial={t} observable={p}"), seed, oracle.ledger())))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Table::new("figure1", vec!["gamma", "inv_gamma", "observable", "trial", "abs_error"]);
    let mut summary = Table::new("figure1_summary", vec!["gamma", "inv_gamma", "mean_abs_error", "std_error", "rows"]);
    let mut means = Vec::new();
    for (g, &gamma) in gammas.iter().enumerate() {
        let mut errs = Vec::new();
        for (&(gi, t, o), (err, _)) in tasks.iter().zip(&results) {
            if gi == g {
                rows.push(vec![
                    gamma.into(),
                    (1.0 / gamma).into(),
                    observables[o].to_string().into(),
                    t.into(),
                    (*err).into(),
                ]);
                errs.push(*err);
            }
        }
        let (mean, se) = mean_and_se(&errs);
        summary.push(vec![gamma.into(), (1.0 / gamma).into(), mean.into(), se.into(), errs.len().into()]);
        means.push((gamma, mean, se));
    }
    run.trials.extend(results.into_iter().map(|(_, rec)| rec));
    run.tables.push(rows);
    run.tables.push(summary);
    if assert_monotone {
        for w in means.windows(2) {
            let ((g0, m0, s0), (g1, m1, s1)) = (w[0], w[1]);
            run.check(
                &format!("mean error non-increasing from gamma={g0} to gamma={g1}"),
                m1 <= m0 + s0.max(s1),
                format!("{m0:.6} -> {m1:.6} (se {:.6})", s0.max(s1)),
            );
        }
    }
    Ok(())
}

fn support_label(s: &[usize]) -> String {
    s.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(";")
}

pub(super) fn junta(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let n = params.positive_usize("n", 4)?;
    let k = params.positive_usize("k", 2)?;
    let epsilons = params.f64_list("epsilons", &[0.2])?;
    let trials = params.positive_usize("trials", 100)?;
    let support = params.usize_list("support", &[0, 2])?;
    let min_rate = params.positive_f64("min_success_rate", 0.95)?;
    if support.iter().any(|&q| q >= n) || support.len() > k {
        return Err(QsqError::InvalidConfig(format!("support {support:?} must be at most {k} qubits below {n}")));
    }

    let mut table = Table::new(
        "junta",
        vec![
            "epsilon",
            "trial",
            "support_found",
            "subset_ok",
            "distance",
            "success",
            "queries",
            "min_tolerance",
            "unitarity_defect",
        ],
    );
    let mut summary = Table::new("junta_summary", vec!["epsilon", "n", "k", "trials", "success_rate", "subset_rate"]);
    for (e, &epsilon) in epsilons.iter().enumerate() {
        let jcfg = JuntaConfig::new(k, epsilon)?;
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, &[e as u64, t as u64]);
                let mut rng = rng_from_seed(seed);
                let u = haar_random_unitary(support.len(), &mut rng).embed(&support, n)?;
                let mut oracle = QsqOracle::for_unitary(&u, cfg.noise, seed)?;
                let record = |o: &QsqOracle| TrialRecord::new(format!("epsilon={epsilon} trial={t}"), seed, o.ledger());
                match learn_junta(&mut oracle, &jcfg) {
                    Ok(learned) => {
                        let found = learned.support.clone().unwrap_or_default();
                        let subset = found.iter().all(|q| support.contains(q));
                        let d = choi_distance(&u, &learned.unitary)?;
                        Ok((support_label(&found), subset, d, learned.unitarity_defect, record(&oracle)))
                    }
                    Err(QsqError::JuntaTooLarge { .. }) => {
                        Ok(("too_large".to_string(), false, f64::NAN, f64::NAN, record(&oracle)))
                    }
                    Err(e) => Err(e),
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let mut successes = 0;
        let mut subsets_ok = 0;
        for (t, (found, subset, d, defect, rec)) in outcomes.into_iter().enumerate() {
            let success = d <= epsilon;
            successes += usize::from(success);
            subsets_ok += usize::from(subset);
            table.push(vec![
                epsilon.into(),
                t.into(),
                found.into(),
                subset.into(),
                d.into(),
                success.into(),
                rec.total_queries.into(),
                rec.min_tolerance.unwrap_or(f64::NAN).into(),
                defect.into(),
            ]);
            run.trials.push(rec);
        }
        let rate = successes as f64 / trials as f64;
        let subset_rate = subsets_ok as f64 / trials as f64;
        summary.push(vec![epsilon.into(), n.into(), k.into(), trials.into(), rate.into(), subset_rate.into()]);
        run.check(
            &format!("junta success rate at epsilon={epsilon}"),
            rate >= min_rate,
            format!("{rate} (need {min_rate})"),
        );
        run.check(
            &format!("junta support within target at epsilon={epsilon}"),
            subsets_ok == trials,
            format!("{subsets_ok}/{trials}"),
        );
    }
    run.tables.push(table);
    run.tables.push(summary);
    Ok(())
}

/// Random quantum Boolean function `U†PU` with `U` Haar and `P ≠ I`.
fn random_qbf(n: usize, rng: &mut crate::rng::Rng) -> Result<(DenseOperator, PauliString)> {
    let u = haar_random_unitary(n, rng);
    let p = PauliString::from_index(n, rng.random_range(1..1u64 << (2 * n)));
    Ok((conjugate(&u, &p)?, p))
}

pub(super) fn gl(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let n = params.positive_usize("n", 3)?;
    let gammas = params.f64_list("gammas", &[0.3, 0.5])?;
    let trials = params.positive_usize("trials", 200)?;
    let mut table = Table::new(
        "gl",
        vec!["gamma", "trial", "heavy", "list_size", "complete", "sound", "queries", "query_bound", "min_tolerance"],
    );
    for (g, &gamma) in gammas.iter().enumerate() {
        let gcfg = GlConfig::new(gamma)?;
        let bound = gcfg.query_bound(n);
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, &[g as u64, t as u64]);
                let (a, _) = random_qbf(n, &mut rng_from_seed(seed))?;
                let exact = PauliExpansion::from_operator(&a, 0.0);
                let mut oracle = QsqOracle::for_unitary(&a, cfg.noise, seed)?;
                let list = goldreich_levin(&mut oracle, &gcfg)?;
                let heavy: Vec<PauliString> =
                    exact.iter().filter(|(_, c)| c.norm() >= gamma).map(|(p, _)| *p).collect();
                let complete = heavy.iter().all(|p| list.contains(p));
                let sound = list.iter().all(|p| exact.get(p).norm() >= gamma / 2.0);
                Ok((
                    heavy.len(),
                    list.len(),
                    complete,
                    sound,
                    TrialRecord::new(format!("gamma={gamma} trial={t}"), seed, oracle.ledger()),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut all_complete, mut all_sound, mut within) = (0, 0, 0);
        for (t, (heavy, size, complete, sound, rec)) in outcomes.into_iter().enumerate() {
            all_complete += usize::from(complete);
            all_sound += usize::from(sound);
            within += usize::from(rec.total_queries <= bound);
            table.push(vec![
                gamma.into(),
                t.into(),
                heavy.into(),
                size.into(),
                complete.into(),
                sound.into(),
                rec.total_queries.into(),
                bound.into(),
                rec.min_tolerance.unwrap_or(f64::NAN).into(),
            ]);
            run.trials.push(rec);
        }
        run.check(
            &format!("GL completeness at gamma={gamma}"),
            all_complete == trials,
            format!("{all_complete}/{trials}"),
        );
        run.check(&format!("GL soundness at gamma={gamma}"), all_sound == trials, format!("{all_sound}/{trials}"));
        run.check(
            &format!("GL query bound at gamma={gamma}"),
            within == trials,
            format!("{within}/{trials} within {bound}"),
        );
    }
    run.tables.push(table);
    Ok(())
}

pub(super) fn shallow(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let n = params.positive_usize("n", 3)?;
    let depth = params.positive_usize("depth", 1)?;
    let epsilon = params.positive_f64("epsilon", 0.3)?;
    let trials = params.positive_usize("trials", 20)?;
    let restarts = params.positive_usize("restarts", 50)?;
    let min_rate = params.positive_f64("min_success_rate", 0.8)?;
    let scfg = ShallowConfig::new(depth, epsilon)?;
    let search = CoordinateSearch { restarts, ..CoordinateSearch::default() };
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = trial_seed(cfg.seed, &[t as u64]);
            let u = random_brickwork_circuit(n, depth, &mut rng_from_seed(seed))?.compile();
            let mut oracle = QsqOracle::for_unitary(&u, cfg.noise, seed)?;
            let learned = learn_shallow(&mut oracle, &scfg, &search, trial_seed(seed, &[1]))?;
            let cert = learned.certificate.clone().expect("shallow learner certifies");
            let d = choi_distance(&u, &learned.unitary)?;
            // Re-check the certificate against the target's true marginals.
            let vu = choi_of_unitary(&u)?.into_state();
            let vw = choi_of_unitary(&learned.unitary)?.into_state();
            let mut worst: f64 = 0.0;
            for s in subsets(2 * n, scfg.marginal_size(n)) {
                worst = worst.max(vu.partial_trace(&s)?.trace_distance(&vw.partial_trace(&s)?));
            }
            Ok((cert, d, worst, TrialRecord::new(format!("trial={t}"), seed, oracle.ledger())))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut table = Table::new(
        "shallow",
        vec![
            "trial",
            "certified",
            "certificate",
            "threshold",
            "restarts",
            "true_marginal_gap",
            "distance",
            "success",
            "queries",
        ],
    );
    let mut successes = 0;
    let mut unsound = 0;
    for (t, (cert, d, worst, rec)) in outcomes.into_iter().enumerate() {
        let success = cert.certified && d <= epsilon;
        successes += usize::from(success);
        if cert.certified && cfg.noise == crate::oracle::NoiseModel::Exact && worst > cert.threshold + 1e-9 {
            unsound += 1;
        }
        table.push(vec![
            t.into(),
            cert.certified.into(),
            cert.value.into(),
            cert.threshold.into(),
            cert.restarts.into(),
            worst.into(),
            d.into(),
            success.into(),
            rec.total_queries.into(),
        ]);
        run.trials.push(rec);
    }
    let rate = successes as f64 / trials as f64;
    run.check("shallow certified success rate", rate >= min_rate, format!("{rate} (need {min_rate})"));
    run.check("shallow certificates sound on true marginals", unsound == 0, format!("{unsound} unsound"));
    run.tables.push(table);
    Ok(())
}

pub(super) fn tomo(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let ms = params.usize_list("m", &[1, 2, 3])?;
    let epsilon = params.positive_f64("epsilon", 0.1)?;
    let trials = params.positive_usize("trials", 50)?;
    let pure = params.boolean("pure", true)?;
    let mut table = Table::new(
        "tomo",
        vec!["m", "trial", "trace_distance", "success", "queries", "expected_queries", "min_tolerance"],
    );
    for &m in &ms {
        if m == 0 || m > crate::state::DENSE_LIMIT {
            return Err(QsqError::InvalidConfig(format!("m = {m} out of range")));
        }
        let expected = (1u64 << (2 * m)) - 1;
        let outcomes = (0..trials)
            .into_par_iter()
            .map(|t| {
                let seed = trial_seed(cfg.seed, &[m as u64, t as u64]);
                let psi = haar_random_state(m, &mut rng_from_seed(seed));
                let mut oracle = QsqOracle::new(psi.clone(), cfg.noise, seed);
                let est = qsq_state_tomography(&mut oracle, epsilon, pure)?;
                let d = est.to_density().trace_distance(&psi.to_density());
                Ok((d, TrialRecord::new(format!("m={m} trial={t}"), seed, oracle.ledger())))
            })
            .collect::<Result<Vec<_>>>()?;
        let (mut ok, mut exact_count) = (0, 0);
        for (t, (d, rec)) in outcomes.into_iter().enumerate() {
            ok += usize::from(d <= epsilon);
            exact_count += usize::from(rec.total_queries == expected);
            table.push(vec![
                m.into(),
                t.into(),
                d.into(),
                (d <= epsilon).into(),
                rec.total_queries.into(),
                expected.into(),
                rec.min_tolerance.unwrap_or(f64::NAN).into(),
            ]);
            run.trials.push(rec);
        }
        run.check(&format!("tomography within epsilon at m={m}"), ok == trials, format!("{ok}/{trials}"));
        run.check(
            &format!("tomography query count at m={m}"),
            exact_count == trials,
            format!("{exact_count}/{trials} used {expected}"),
        );
    }
    run.tables.push(table);
    Ok(())
}

pub(super) fn unitarity(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let n = params.positive_usize("n", 2)?;
    let channels = params.positive_usize("channels", 20)?;
    let env = params.positive_usize("env_qubits", 2)?;
    let family = params.text("family", "stinespring")?;
    let mixture = params.positive_usize("mixture_size", 3)?;
    let assert_stated = params.boolean("assert_stated_sandwich", true)?;
    if n > 3 {
        return Err(QsqError::InvalidConfig(format!("unitarity is computed densely; n = {n} > 3")));
    }

    let mut rng = rng_from_seed(trial_seed(cfg.seed, &[0]));
    let mut list = vec![("unitary".to_string(), KrausChannel::unitary(haar_random_unitary(n, &mut rng))?)];
    for p in [0.0, 0.5, 1.0] {
        list.push((format!("depolarizing_{p}"), KrausChannel::depolarizing(n, p)?));
    }
    for c in 0..channels {
        let mut r = rng_from_seed(trial_seed(cfg.seed, &[1, c as u64]));
        let ch = match family.as_str() {
            "stinespring" => KrausChannel::random_stinespring(n, env, &mut r)?,
            "mixed_unitary" => KrausChannel::random_mixed_unitary(n, mixture, &mut r)?,
            other => return Err(QsqError::InvalidConfig(format!("unknown channel family `{other}`"))),
        };
        list.push((format!("{family}_{c}"), ch));
    }

    let d2 = (1u64 << (2 * n)) as f64;
    let rows = list
        .par_iter()
        .map(|(label, ch)| {
            let u_a = channel_unitarity(ch);
            let u_b = unitarity_closed_form(ch);
            let purity = choi_matrix(ch).purity();
            let ksum = kraus_overlap_sum(ch);
            (label.clone(), u_a, u_b, purity, ksum, purity_unitarity_sandwich_check(ch), general_sandwich_check(ch))
        })
        .collect::<Vec<_>>();
    let mut table = Table::new(
        "unitarity",
        vec![
            "channel",
            "unitarity",
            "unitarity_closed_form",
            "choi_purity",
            "kraus_overlap_sum",
            "kraus_identity_deviation",
            "path_deviation",
            "stated_lower",
            "stated_upper",
            "stated_holds",
            "general_lower",
            "general_upper",
            "general_holds",
        ],
    );
    let (mut kraus_ok, mut paths_ok, mut stated_ok, mut general_ok) = (0, 0, 0, 0);
    for (label, u_a, u_b, purity, ksum, stated, general) in &rows {
        let kdev = (ksum - d2 * purity).abs();
        let pdev = (u_a - u_b).abs();
        kraus_ok += usize::from(kdev <= 1e-9);
        paths_ok += usize::from(pdev <= 1e-9);
        stated_ok += usize::from(stated.holds);
        general_ok += usize::from(general.holds);
        table.push(vec![
            label.as_str().into(),
            (*u_a).into(),
            (*u_b).into(),
            (*purity).into(),
            (*ksum).into(),
            kdev.into(),
            pdev.into(),
            stated.lower.into(),
            stated.upper.into(),
            stated.holds.into(),
            general.lower.into(),
            general.upper.into(),
            general.holds.into(),
        ]);
    }
    let total = rows.len();
    run.check("Kraus overlap identity", kraus_ok == total, format!("{kraus_ok}/{total}"));
    run.check("unitarity paths agree", paths_ok == total, format!("{paths_ok}/{total}"));
    run.check("unitary channel has u = 1", (rows[0].1 - 1.0).abs() <= 1e-9, format!("{}", rows[0].1));
    run.check("full depolarizing has u = 0", rows[3].1.abs() <= 1e-9, format!("{}", rows[3].1));
    run.check("general purity bounds", general_ok == total, format!("{general_ok}/{total}"));
    if assert_stated {
        run.check(
            "stated purity sandwich",
            stated_ok == total,
            format!("{stated_ok}/{total}; the lower bound needs a unital channel"),
        );
    }
    run.tables.push(table);
    Ok(())
}

pub(super) fn separation(cfg: &ExperimentConfig, params: &mut Params, run: &mut Run) -> Result<()> {
    let ns = params.usize_list("n", &[2])?;
    let mut variance_ns = params.usize_list("variance_n", &[2, 3, 4, 5])?;
    let samples = params.positive_usize("variance_samples", 4000)?;
    variance_ns.sort_unstable();
    variance_ns.dedup();
    let bound = separation_bound();

    let mut gaps = Table::new("separation", vec!["n", "gap", "bound", "argmin", "forms", "holds"]);
    for &n in &ns {
        let g = separation_gap(n)?;
        gaps.push(vec![n.into(), g.gap.into(), bound.into(), g.argmin.into(), g.forms.into(), (g.gap >= bound).into()]);
        run.check(&format!("separation gap at n={n}"), g.gap >= bound, format!("{} >= {bound}", g.gap));
    }

    let mut var = Table::new("variance", vec!["n", "variance", "std_error", "samples", "exhaustive"]);
    let mut values = Vec::new();
    for &n in &variance_ns {
        let probe = default_variance_probe(n)?;
        let v = variance_probe(n, &probe, samples, trial_seed(cfg.seed, &[n as u64]))?;
        var.push(vec![n.into(), v.variance.into(), v.std_error.into(), v.samples.into(), v.exhaustive.into()]);
        values.push((n, v.variance));
    }
    for w in values.windows(2) {
        run.check(
            &format!("variance decreases from n={} to n={}", w[0].0, w[1].0),
            w[1].1 < w[0].1,
            format!("{} -> {}", w[0].1, w[1].1),
        );
    }
    run.tables.push(gaps);
    run.tables.push(var);
    Ok(())
}

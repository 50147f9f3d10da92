//! Shallow-circuit learner: learn the local marginals of the Choi state,
//! then search a brickwork ansatz whose Choi state matches them.

use super::tomography::tomography_on;
use super::{Certificate, LearnedUnitary};
use crate::oracle::StatisticalQuery;
use crate::pauli::{pauli_matrix, PauliString};
use crate::rng::{rng_from_seed, Rng};
use crate::state::{random_brickwork_circuit, ChoiState, Circuit, DenseOperator, DensityMatrix, StateVector};
use crate::{QsqError, Result, C64};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShallowConfig {
    pub depth: usize,
    pub epsilon: f64,
}

impl ShallowConfig {
    pub fn new(depth: usize, epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(QsqError::InvalidConfig(format!("epsilon {epsilon} outside (0, 1]")));
        }
        Ok(Self { depth, epsilon })
    }

    /// `min(2^(D+2), 2n)` qubits of the Choi register.
    pub fn marginal_size(&self, n: usize) -> usize {
        (1usize << (self.depth + 2).min(16)).min(2 * n)
    }

    /// `ε²/(4n)·2^−D/2`
    pub fn marginal_tolerance(&self, n: usize) -> f64 {
        self.epsilon * self.epsilon / (4.0 * n as f64) * 2f64.powf(-(self.depth as f64) / 2.0)
    }

    /// `ε²/n`
    pub fn certificate_threshold(&self, n: usize) -> f64 {
        self.epsilon * self.epsilon / n as f64
    }
}

/// Learned marginals of a Choi state and the ansatz shape to match them with.
#[derive(Clone, Debug)]
pub struct MarginalProblem {
    pub n: usize,
    pub depth: usize,
    pub subsets: Vec<Vec<usize>>,
    pub targets: Vec<DensityMatrix>,
    pub threshold: f64,
}

impl MarginalProblem {
    fn choi(&self, circuit: &Circuit) -> StateVector {
        let mut v = ChoiState::maximally_entangled(self.n).into_state();
        circuit.apply_to(&mut v, self.n).expect("circuit fits register");
        v
    }

    fn marginals(&self, v: &StateVector) -> Vec<DensityMatrix> {
        self.subsets.iter().map(|s| v.partial_trace(s).expect("valid subset")).collect()
    }

    /// `Σ_s ‖ρ_s(W) − ρ̂_s‖_F²`
    pub fn objective(&self, circuit: &Circuit) -> f64 {
        let v = self.choi(circuit);
        self.marginals(&v).iter().zip(&self.targets).map(|(a, b)| (a.matrix() - b.matrix()).norm_squared()).sum()
    }

    /// Largest marginal trace distance.
    pub fn certificate(&self, circuit: &Circuit) -> f64 {
        let v = self.choi(circuit);
        self.marginals(&v).iter().zip(&self.targets).map(|(a, b)| a.trace_distance(b)).fold(0.0, f64::max)
    }
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub circuit: Circuit,
    pub certificate: f64,
    pub certified: bool,
    pub restarts: usize,
}

/// A strategy for finding a circuit that matches learned marginals.
pub trait CircuitSearch {
    fn search(&self, problem: &MarginalProblem, rng: &mut Rng) -> Result<SearchOutcome>;
}

/// Random-restart coordinate search: each gate `G` is perturbed to
/// `G·exp(±iδP)` over the non-identity Paulis `P` on its qubits, moves are
/// kept when the objective drops, and `δ` halves after a sweep with no move.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CoordinateSearch {
    pub restarts: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_sweeps: usize,
}

impl Default for CoordinateSearch {
    fn default() -> Self {
        Self { restarts: 50, initial_step: 0.5, min_step: 1e-7, max_sweeps: 4000 }
    }
}

fn rotation(p: &PauliString, delta: f64) -> DenseOperator {
    // P² = I, so exp(iδP) = cos δ·I + i sin δ·P
    let pm = pauli_matrix(p).expect("small gate");
    let id = DenseOperator::identity(p.num_qubits());
    DenseOperator::new(id.matrix() * C64::new(delta.cos(), 0.0) + pm.matrix() * C64::new(0.0, delta.sin()))
        .expect("power-of-two dimension")
}

impl CoordinateSearch {
    fn descend(&self, problem: &MarginalProblem, circuit: &mut Circuit) -> f64 {
        let mut f = problem.objective(circuit);
        let mut step = self.initial_step;
        let gate_count = circuit.gate_count();
        let mut sweeps = 0;
        while step > self.min_step && sweeps < self.max_sweeps {
            sweeps += 1;
            let mut improved = false;
            for g in 0..gate_count {
                let width = circuit.gates_mut().nth(g).expect("gate index").targets.len();
                for p in PauliString::all(width).skip(1) {
                    for delta in [step, -step] {
                        let r = rotation(&p, delta);
                        let gate = circuit.gates_mut().nth(g).expect("gate index");
                        let old = gate.matrix.clone();
                        gate.matrix = &old * &r;
                        let f_new = problem.objective(circuit);
                        if f_new < f {
                            f = f_new;
                            improved = true;
                            break;
                        }
                        circuit.gates_mut().nth(g).expect("gate index").matrix = old;
                    }
                }
            }
            if !improved {
                step /= 2.0;
                if problem.certificate(circuit) <= problem.threshold {
                    break;
                }
            }
        }
        problem.certificate(circuit)
    }
}

impl CircuitSearch for CoordinateSearch {
    fn search(&self, problem: &MarginalProblem, rng: &mut Rng) -> Result<SearchOutcome> {
        let mut best: Option<SearchOutcome> = None;
        for restart in 1..=self.restarts.max(1) {
            let mut circuit = random_brickwork_circuit(problem.n, problem.depth, rng)?;
            let cert = self.descend(problem, &mut circuit);
            let certified = cert <= problem.threshold;
            if best.as_ref().is_none_or(|b| cert < b.certificate) {
                best = Some(SearchOutcome { circuit, certificate: cert, certified, restarts: restart });
            }
            if certified {
                break;
            }
        }
        let mut out = best.expect("at least one restart");
        out.restarts = out.restarts.max(1);
        Ok(out)
    }
}

pub(crate) fn subsets(total: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, total: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for q in start..total {
            cur.push(q);
            rec(q + 1, total, k, cur, out);
            cur.pop();
        }
    }
    rec(0, total, k, &mut cur, &mut out);
    out
}

/// Learn every `min(2^(D+2), 2n)`-qubit marginal of the Choi state, then
/// run `search` for a depth-`D` brickwork circuit certified to match them
/// within `ε²/n` in trace distance.
pub fn learn_shallow<O: StatisticalQuery + ?Sized>(
    oracle: &mut O,
    cfg: &ShallowConfig,
    search: &dyn CircuitSearch,
    seed: u64,
) -> Result<LearnedUnitary> {
    let n = oracle.system_qubits();
    if n < 2 {
        return Err(QsqError::InvalidConfig("shallow learner needs at least 2 qubits".into()));
    }
    let k = cfg.marginal_size(n);
    let tolerance = cfg.marginal_tolerance(n);
    let subsets = subsets(2 * n, k);
    let mut targets = Vec::with_capacity(subsets.len());
    for s in &subsets {
        targets.push(tomography_on(oracle, s, tolerance, false)?.to_density());
    }
    let problem = MarginalProblem { n, depth: cfg.depth, subsets, targets, threshold: cfg.certificate_threshold(n) };
    let mut rng = rng_from_seed(seed);
    let outcome = search.search(&problem, &mut rng)?;
    Ok(LearnedUnitary {
        n,
        unitary: outcome.circuit.compile(),
        support: None,
        block: None,
        unitarity_defect: 0.0,
        certificate: Some(Certificate {
            value: outcome.certificate,
            threshold: problem.threshold,
            certified: outcome.certified,
            restarts: outcome.restarts,
        }),
        circuit: Some(outcome.circuit),
        ledger: oracle.ledger().clone(),
        config: format!("{cfg:?}"),
    })
}

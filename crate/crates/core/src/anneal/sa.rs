use rand::Rng;
use rayon::prelude::*;

use super::{SampleSet, SolverConfig};
use crate::error::Result;
use crate::qubo::{Assignment, DenseQubo, QuboProblem};

/// Single-flip Metropolis annealing. Each read is an independent restart
/// with its own seeded stream and reports the best assignment it visited.
pub fn simulated_anneal(q: &QuboProblem, cfg: &SolverConfig) -> Result<SampleSet> {
    cfg.validate()?;
    let dense = q.dense();
    let scale = match q.max_abs_coefficient() {
        s if s > 0.0 => s,
        _ => 1.0,
    };
    let temps: Vec<f64> =
        (0..cfg.sweeps_per_read).map(|k| scale * cfg.temperature_schedule.at(k, cfg.sweeps_per_read)).collect();
    let reads: Vec<Assignment> = (0..cfg.num_reads)
        .into_par_iter()
        .map(|r| {
            let mut rng = crate::seed::child_rng(cfg.seed, &[r as u64]);
            Assignment::new(anneal_once(&dense, &temps, &mut rng)).expect("0/1 bits")
        })
        .collect();
    SampleSet::from_reads(q, reads)
}

fn anneal_once(dense: &DenseQubo, temps: &[f64], rng: &mut impl Rng) -> Vec<u8> {
    let n = dense.len();
    let mut bits: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let mut e = dense.energy(&bits);
    let mut best_e = e;
    let mut best = bits.clone();
    for &t in temps {
        for k in 0..n {
            let d = dense.flip_delta(&bits, k);
            if d <= 0.0 || rng.random::<f64>() < (-d / t).exp() {
                bits[k] ^= 1;
                e += d;
                if e < best_e {
                    best_e = e;
                    best.copy_from_slice(&bits);
                }
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::anneal::brute_force_solve;
    use crate::qubo::tests::random_qubo;
    use crate::qubo::IsingProblem;

    #[test]
    fn two_variable_problem_every_read_optimal() {
        let q = QuboProblem::from_terms(2, [(0, 1.0), (1, -1.0)], [((0, 1), 2.0)], 0.0).unwrap();
        let cfg = SolverConfig { num_reads: 10, ..Default::default() };
        let set = simulated_anneal(&q, &cfg).unwrap();
        assert_eq!(set.len(), 1);
        assert_eq!(set.best().unwrap().assignment.bits(), &[0, 1]);
        assert_eq!(set.best().unwrap().multiplicity, 10);
    }

    #[test]
    fn frustrated_triangle() {
        let ising = IsingProblem::from_terms(3, [], [((0, 1), 1.0), ((1, 2), 1.0), ((0, 2), 1.0)], 0.0).unwrap();
        let q = ising.to_qubo();
        let exact = brute_force_solve(&q).unwrap().best().unwrap().energy;
        let set = simulated_anneal(&q, &SolverConfig::default()).unwrap();
        assert!((set.best().unwrap().energy - exact).abs() < 1e-12);
        assert!((exact - -1.0).abs() < 1e-12);
    }

    #[test]
    fn deterministic_given_seed() {
        let q = random_qubo(14, 0.6, 8);
        let cfg = SolverConfig { seed: 99, ..Default::default() };
        assert_eq!(simulated_anneal(&q, &cfg).unwrap(), simulated_anneal(&q, &cfg).unwrap());
    }

    #[test]
    fn stored_energies_match_reevaluation() {
        let q = random_qubo(20, 0.4, 2);
        let set = simulated_anneal(&q, &SolverConfig { seed: 5, ..Default::default() }).unwrap();
        assert_eq!(set.total_reads(), 16);
        for s in set.iter() {
            assert!((s.energy - q.energy(&s.assignment).unwrap()).abs() < 1e-9);
        }
        assert!(set.samples().windows(2).all(|w| w[0].energy <= w[1].energy));
    }
}

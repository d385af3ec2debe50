//! Shared fixtures for the criterion benches.

use rand::Rng;
use rqboost::QuboProblem;

/// Dense-ish random QUBO with coefficients uniform in `[-1, 1)`.
pub fn random_qubo(n: usize, density: f64, seed: u64) -> QuboProblem {
    let mut rng = rqboost::seed::rng(seed);
    let mut q = QuboProblem::new(n);
    for i in 0..n {
        q.add_linear(i, rng.random_range(-1.0..1.0)).expect("index in range");
        for j in i + 1..n {
            if rng.random::<f64>() < density {
                q.add_quadratic(i, j, rng.random_range(-1.0..1.0)).expect("index in range");
            }
        }
    }
    q
}

/// `rows × cols` Gaussian features with a label from the sign of the first two.
pub fn random_classification(rows: usize, cols: usize, seed: u64) -> (Vec<Vec<f64>>, Vec<i8>) {
    let mut rng = rqboost::seed::rng(seed);
    let x: Vec<Vec<f64>> = (0..rows).map(|_| (0..cols).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y = x.iter().map(|r| if r[0] + r[1] > 0.0 { 1 } else { -1 }).collect();
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixtures_are_deterministic() {
        assert_eq!(random_qubo(8, 0.5, 3), random_qubo(8, 0.5, 3));
        let (x, y) = random_classification(10, 4, 1);
        assert_eq!((x.len(), x[0].len(), y.len()), (10, 4, 10));
    }
}

use super::{Sample, SampleSet};
use crate::error::{Error, Result};
use crate::qubo::{Assignment, QuboProblem};

pub const BRUTE_FORCE_LIMIT: usize = 25;

/// Cap on the number of tied ground states kept; a problem with no
/// coefficients has `2^n` of them.
pub const MAX_REPORTED_TIES: usize = 4096;

const RESYNC_EVERY: u64 = 1 << 14;

/// Exhaustive Gray-code enumeration. Returns every global minimum (up to
/// [`MAX_REPORTED_TIES`]), each with multiplicity 1.
pub fn brute_force_solve(q: &QuboProblem) -> Result<SampleSet> {
    let n = q.num_vars();
    if n > BRUTE_FORCE_LIMIT {
        return Err(Error::TooLarge { num_vars: n, limit: BRUTE_FORCE_LIMIT });
    }
    let dense = q.dense();
    let scale = q.max_abs_coefficient().max(1.0) * (n.max(1) as f64);
    let slack = 1e-9 * scale;

    let mut bits = vec![0u8; n];
    let mut e = dense.energy(&bits);
    let mut best = e;
    let mut ties: Vec<Vec<u8>> = vec![bits.clone()];
    for step in 1..(1u64 << n) {
        let k = step.trailing_zeros() as usize;
        e += dense.flip_delta(&bits, k);
        bits[k] ^= 1;
        if step % RESYNC_EVERY == 0 {
            e = dense.energy(&bits);
        }
        if e < best - slack {
            best = e;
            ties.clear();
            ties.push(bits.clone());
        } else if e <= best + slack {
            best = best.min(e);
            if ties.len() < 2 * MAX_REPORTED_TIES {
                ties.push(bits.clone());
            }
        }
    }

    let mut exact: Vec<(f64, Vec<u8>)> = ties.into_iter().map(|b| (q.energy_bits(&b), b)).collect();
    let min = exact.iter().map(|(e, _)| *e).fold(f64::INFINITY, f64::min);
    let tol = 1e-9 * (1.0 + min.abs());
    exact.retain(|(e, _)| *e <= min + tol);
    exact.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
    exact.truncate(MAX_REPORTED_TIES);
    let samples = exact
        .into_iter()
        .map(|(energy, b)| Sample { assignment: Assignment::new(b).expect("0/1 bits"), energy, multiplicity: 1 })
        .collect();
    Ok(SampleSet::from_samples(samples))
}

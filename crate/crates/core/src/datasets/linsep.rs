use rand::seq::index::sample;
use rand::Rng;

use super::LabeledDataset;

pub const LINSEP_ROWS: usize = 1000;
pub const LINSEP_COLS: usize = 13;
/// Rows of the bait column that disagree with the ground truth.
pub const LINSEP_FLIPS: usize = 90;
/// Zero-based index of the bait column (`col13`).
pub const BAIT_COLUMN: usize = 12;

/// A ±1 matrix whose first column is the sign of the sum of columns 2..10.
///
/// Columns 2..13 start uniform; column 13 is then overwritten with column 1
/// disagreeing on exactly [`LINSEP_FLIPS`] rows. Labels repeat column 1.
pub fn gen_linsep(seed: u64) -> LabeledDataset {
    let mut rng = crate::seed::rng(seed);
    let mut features = vec![vec![0.0; LINSEP_COLS]; LINSEP_ROWS];
    for row in features.iter_mut() {
        for v in row.iter_mut().skip(1) {
            *v = if rng.random::<bool>() { 1.0 } else { -1.0 };
        }
        let s: f64 = row[1..10].iter().sum();
        row[0] = s.signum();
        row[BAIT_COLUMN] = row[0];
    }
    for i in sample(&mut rng, LINSEP_ROWS, LINSEP_FLIPS) {
        features[i][BAIT_COLUMN] = -features[i][0];
    }
    let labels = features.iter().map(|r| r[0] as i8).collect();
    let names = (1..=LINSEP_COLS).map(|c| format!("col{c}")).collect();
    LabeledDataset::new(features, labels, names).expect("shape is fixed")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shape_truth_and_bait() {
        for seed in 0..5 {
            let d = gen_linsep(seed);
            assert_eq!(d.len(), LINSEP_ROWS);
            assert_eq!(d.num_features(), LINSEP_COLS);
            for r in &d.features {
                assert!(r.iter().all(|&v| v == 1.0 || v == -1.0));
                assert_eq!(r[0], r[1..10].iter().sum::<f64>().signum());
            }
            let agree = d.features.iter().filter(|r| r[BAIT_COLUMN] == r[0]).count();
            assert_eq!(agree, 910);
        }
    }

    #[test]
    fn deterministic() {
        assert_eq!(gen_linsep(4), gen_linsep(4));
        assert_ne!(gen_linsep(4), gen_linsep(5));
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::LabeledDataset;
use crate::boost::WeakClassifier;
use crate::error::{Error, Result};

/// Column holding the last-letter code (`0` for `a` … `25` for `z`, `-1` if none).
pub const LAST_LETTER_COLUMN: usize = 0;

const BUNDLED_MALE: &str = include_str!("../../data/names/male.txt");
const BUNDLED_FEMALE: &str = include_str!("../../data/names/female.txt");

/// Which source file supplies the `+1` class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PositiveClass {
    #[default]
    Female,
    Male,
}

/// Final ASCII letter after lowercasing and stripping trailing non-letters.
pub fn last_letter(name: &str) -> Option<char> {
    let c = name.trim().to_lowercase().chars().rev().find(|c| c.is_alphabetic())?;
    c.is_ascii_lowercase().then_some(c)
}

fn normalize(text: &str) -> Vec<String> {
    text.lines().map(|l| l.trim().to_lowercase()).filter(|l| !l.is_empty()).collect()
}

/// Builds the labeled corpus from two newline-separated lists. Duplicates are kept.
pub fn names_from_lists(male: &str, female: &str, positive: PositiveClass) -> Result<LabeledDataset> {
    let male = normalize(male);
    let female = normalize(female);
    if male.is_empty() || female.is_empty() {
        return Err(Error::Empty("both name lists need at least one name".into()));
    }
    let (male_y, female_y) = match positive {
        PositiveClass::Female => (-1, 1),
        PositiveClass::Male => (1, -1),
    };
    let rows = male.into_iter().map(|n| (n, male_y)).chain(female.into_iter().map(|n| (n, female_y)));
    let (mut features, mut labels, mut ids) = (Vec::new(), Vec::new(), Vec::new());
    for (name, y) in rows {
        let code = last_letter(&name).map_or(-1.0, |c| (c as u8 - b'a') as f64);
        features.push(vec![code]);
        labels.push(y);
        ids.push(name);
    }
    LabeledDataset::new(features, labels, vec!["last_letter".into()])?.with_row_ids(ids)
}

/// Reads the two name files, one name per line.
pub fn load_names(male_file: &Path, female_file: &Path, positive: PositiveClass) -> Result<LabeledDataset> {
    let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
    let (male, female) = (read(male_file)?, read(female_file)?);
    if normalize(&male).is_empty() {
        return Err(Error::Empty(format!("{} has no names", male_file.display())));
    }
    if normalize(&female).is_empty() {
        return Err(Error::Empty(format!("{} has no names", female_file.display())));
    }
    names_from_lists(&male, &female, positive)
}

/// The corpus shipped with the crate.
pub fn bundled_names(positive: PositiveClass) -> LabeledDataset {
    names_from_lists(BUNDLED_MALE, BUNDLED_FEMALE, positive).expect("bundled corpus is well formed")
}

/// One classifier per (letter, class): `a..z` each voting `+1` on a match,
/// then each voting `-1` on a match.
pub fn names_weak_pool() -> Vec<WeakClassifier> {
    let letters = || (b'a'..=b'z').map(char::from);
    letters().map(|c| WeakClassifier::suffix(c, 1)).chain(letters().map(|c| WeakClassifier::suffix(c, -1))).collect()
}

//! Word families on which every reduction step only halves the length, so
//! that the suffix-array engine recurses as deep as possible.
//!
//! All of them are images of `φⁿ(3)` with its first letter removed, for the
//! morphism φ below, under one of three letter-to-word maps.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::sais::reduction_levels;
use crate::words::{is_reduce, Letter, Word};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorstCaseError {
    #[error("iteration count {0} is below the minimum of 3")]
    TooSmall(u32),
    #[error("iteration count {n} exceeds the limit of {limit}")]
    TooLarge { n: u32, limit: u32 },
}

/// A morphism on `{0,..,4}`: `image[a]` is the word letter `a` maps to.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MorphismTable {
    pub image: [&'static [Letter]; 5],
}

impl MorphismTable {
    pub fn apply(&self, w: &[Letter]) -> Vec<Letter> {
        w.iter()
            .flat_map(|&a| self.image[a as usize].iter().copied())
            .collect()
    }
}

pub const PHI: MorphismTable = MorphismTable {
    image: [&[0, 2], &[0, 4], &[1, 2], &[1, 3], &[1, 4]],
};
pub const PSI: MorphismTable = MorphismTable {
    image: [&[0], &[1], &[2], &[4], &[4]],
};
pub const PSI2: MorphismTable = MorphismTable {
    image: [&[0, 0, 0, 1], &[0, 0, 1], &[0, 1], &[0, 1, 1], &[0, 1, 1]],
};
pub const PSI3: MorphismTable = MorphismTable {
    image: [&[0, 0, 1], &[0, 1], &[0, 1, 2], &[0, 2], &[0, 2]],
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Thm1,
    Cor2,
    Cor3,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Thm1, Family::Cor2, Family::Cor3];

    pub fn name(self) -> &'static str {
        match self {
            Family::Thm1 => "thm1",
            Family::Cor2 => "cor2",
            Family::Cor3 => "cor3",
        }
    }
}

impl std::str::FromStr for Family {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Family::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown family `{s}` (expected thm1, cor2 or cor3)"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub family: Family,
    pub n: u32,
}

impl FamilySpec {
    pub fn new(family: Family, n: u32) -> Result<Self, WorstCaseError> {
        if n < 3 {
            return Err(WorstCaseError::TooSmall(n));
        }
        if n > MAX_FAMILY_N {
            return Err(WorstCaseError::TooLarge {
                n,
                limit: MAX_FAMILY_N,
            });
        }
        Ok(Self { family, n })
    }
}

pub const MAX_PHI_N: u32 = 30;
pub const MAX_FAMILY_N: u32 = 26;

/// `φⁿ(3)`, of length `2ⁿ`.
pub fn phi_power(n: u32) -> Result<Word, WorstCaseError> {
    if n > MAX_PHI_N {
        return Err(WorstCaseError::TooLarge {
            n,
            limit: MAX_PHI_N,
        });
    }
    let mut w: Vec<Letter> = vec![3];
    for _ in 0..n {
        w = PHI.apply(&w);
    }
    Ok(Word::new(w, 5).expect("φ stays within {0,..,4}"))
}

/// Even length, last letter 3, every letter of `{0,..,4}` after the first
/// position, and letters alternating between `{0,1}` (even positions) and
/// `{2,4}` (odd positions) everywhere but the last position.
pub fn is_balanced(w: &Word) -> bool {
    let l = w.letters();
    if l.is_empty() || l.len() % 2 == 1 || *l.last().unwrap() != 3 {
        return false;
    }
    let mut seen = [false; 5];
    for &a in &l[1..] {
        match seen.get_mut(a as usize) {
            Some(s) => *s = true,
            None => return false,
        }
    }
    if !seen.iter().all(|&s| s) {
        return false;
    }
    l[..l.len() - 1].iter().enumerate().all(
        |(i, &a)| {
            if i % 2 == 0 {
                a <= 1
            } else {
                a == 2 || a == 4
            }
        },
    )
}

pub fn worst_case_word(spec: FamilySpec) -> Result<Word, WorstCaseError> {
    let spec = FamilySpec::new(spec.family, spec.n)?;
    let phi = phi_power(spec.n)?;
    let tail = &phi.letters()[1..];
    Ok(match spec.family {
        Family::Thm1 => Word::from_letters(PSI.apply(tail)).dense_ranked(),
        Family::Cor2 => {
            let mut w = vec![1];
            w.extend(PSI2.apply(tail));
            Word::new(w, 2).unwrap()
        }
        Family::Cor3 => {
            let mut w = vec![1];
            w.extend(PSI3.apply(tail));
            Word::new(w, 3).unwrap()
        }
    })
}

/// `(c, d, e)` such that the family claims `(|is^k(w)| + 1)·2^k·d = 2^e·(|w| + c)`.
fn level_form(family: Family) -> (u128, u128, u32) {
    match family {
        Family::Thm1 => (1, 1, 0),
        Family::Cor2 => (2, 3, 1),
        Family::Cor3 => (3, 5, 2),
    }
}

fn first_checked_level(family: Family) -> usize {
    match family {
        Family::Thm1 => 0,
        Family::Cor2 | Family::Cor3 => 1,
    }
}

/// Closed-form length claimed for the family, and the depth claimed.
pub fn claimed_length(spec: FamilySpec) -> u128 {
    let p = 1u128 << spec.n;
    match spec.family {
        Family::Thm1 => p - 1,
        Family::Cor2 => 3 * p - 2,
        Family::Cor3 => 5 * p - 3,
    }
}

pub fn claimed_depth(spec: FamilySpec) -> usize {
    let n = spec.n as usize;
    match spec.family {
        Family::Thm1 => n - 2,
        Family::Cor2 => n - 1,
        Family::Cor3 => n,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelCheck {
    pub k: usize,
    /// `None` when the reduction stopped before level `k`.
    pub measured: Option<usize>,
    pub claimed: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FamilyReport {
    pub family: Family,
    pub n: u32,
    pub length: usize,
    pub claimed_length: u128,
    pub length_matches: bool,
    /// For cor3: the length obtained by summing image lengths against the
    /// letter counts of `φⁿ(3)`, which is what the construction yields.
    pub alternative_length: Option<u128>,
    pub alternative_length_matches: Option<bool>,
    pub level_lengths: Vec<usize>,
    pub levels: Vec<LevelCheck>,
    /// The level identity holds at every level the reduction reaches.
    pub halving_exact: bool,
    pub measured_depth: usize,
    pub claimed_depth: usize,
    pub depth_matches: bool,
    /// `is(w)` equals `φⁿ(3)` without its first letter.
    pub reduces_to_phi_n_suffix: bool,
    /// `is(w)` equals `φⁿ⁻¹(3)` without its first letter.
    pub reduces_to_phi_n_minus_1_suffix: bool,
    pub all_claims_hold: bool,
}

pub fn verify_family(spec: FamilySpec) -> Result<FamilyReport, WorstCaseError> {
    let w = worst_case_word(spec)?;
    let levels = reduction_levels(&w, usize::MAX);
    let level_lengths: Vec<usize> = levels.iter().map(Word::len).collect();
    let measured_depth = levels.len() - 1;
    let depth = claimed_depth(spec);

    let (c, d, e) = level_form(spec.family);
    let len = w.len() as u128;
    let check = |k: usize| {
        let measured = level_lengths.get(k).copied();
        let claimed =
            ((1u128 << e) as f64) * (len + c) as f64 / (d as f64 * 2f64.powi(k as i32)) - 1.0;
        let holds = measured
            .is_some_and(|m| (m as u128 + 1) * (1u128 << k) * d == (1u128 << e) * (len + c));
        LevelCheck {
            k,
            measured,
            claimed,
            holds,
        }
    };
    let first = first_checked_level(spec.family);
    let level_checks: Vec<LevelCheck> = (first..=depth.max(measured_depth)).map(check).collect();
    let halving_exact = level_checks
        .iter()
        .filter(|lc| lc.k <= measured_depth)
        .all(|lc| lc.holds);

    let claimed_len = claimed_length(spec);
    let (alternative_length, alternative_length_matches) = match spec.family {
        Family::Cor3 => {
            let alt = 5 * (1u128 << (spec.n - 1)) - 3;
            (Some(alt), Some(alt == len))
        }
        _ => (None, None),
    };

    let reduced = is_reduce(&w);
    let suffix_of = |m: u32| phi_power(m).map(|p| p.letters()[1..].to_vec());
    let reduces_to_phi_n_suffix = reduced.letters() == suffix_of(spec.n)?.as_slice();
    let reduces_to_phi_n_minus_1_suffix = reduced.letters() == suffix_of(spec.n - 1)?.as_slice();

    let length_matches = claimed_len == len;
    let depth_matches = measured_depth == depth;
    let all_claims_hold = length_matches && depth_matches && level_checks.iter().all(|lc| lc.holds);
    Ok(FamilyReport {
        family: spec.family,
        n: spec.n,
        length: w.len(),
        claimed_length: claimed_len,
        length_matches,
        alternative_length,
        alternative_length_matches,
        level_lengths,
        levels: level_checks,
        halving_exact,
        measured_depth,
        claimed_depth: depth,
        depth_matches,
        reduces_to_phi_n_suffix,
        reduces_to_phi_n_minus_1_suffix,
        all_claims_hold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: Family, n: u32) -> FamilySpec {
        FamilySpec::new(family, n).unwrap()
    }

    fn letter_counts(w: &Word) -> [usize; 5] {
        let mut counts = [0; 5];
        for &a in w.letters() {
            counts[a as usize] += 1;
        }
        counts
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_power(0).unwrap().letters(), &[3]);
        assert_eq!(phi_power(1).unwrap().letters(), &[1, 3]);
        assert_eq!(phi_power(3).unwrap().letters(), &[0, 2, 1, 4, 0, 4, 1, 3]);
        assert_eq!(letter_counts(&phi_power(5).unwrap()), [8, 8, 7, 1, 8]);
        assert!(phi_power(31).is_err());
    }

    #[test]
    fn letter_counts_closed_form() {
        for n in 3..=20 {
            let q = 1usize << (n - 2);
            assert_eq!(letter_counts(&phi_power(n).unwrap()), [q, q, q - 1, 1, q]);
        }
    }

    #[test]
    fn balance() {
        assert!(is_balanced(&phi_power(3).unwrap()));
        assert!(is_balanced(&phi_power(8).unwrap()));
        assert!(!is_balanced(&Word::from_letters(vec![1, 3])));
        for n in 3..=20 {
            assert!(is_balanced(&phi_power(n).unwrap()), "n = {n}");
        }
    }

    #[test]
    fn thm1_small() {
        let w = worst_case_word(spec(Family::Thm1, 3)).unwrap();
        // ψ(2140413) = 2140414, dense-ranked over {0,1,2,4}
        assert_eq!(w.letters(), &[2, 1, 3, 0, 3, 1, 3]);
        let report = verify_family(spec(Family::Thm1, 3)).unwrap();
        assert_eq!(report.level_lengths, vec![7, 3]);
        assert_eq!(report.measured_depth, 1);
        assert!(report.all_claims_hold);
        assert_eq!(is_reduce(&w).letters(), &[2, 0, 1]);
    }

    #[test]
    fn thm1_n6() {
        let report = verify_family(spec(Family::Thm1, 6)).unwrap();
        assert_eq!(report.level_lengths, vec![63, 31, 15, 7, 3]);
        assert_eq!(report.measured_depth, 4);
        assert!(report.all_claims_hold);
        assert!(report.reduces_to_phi_n_minus_1_suffix);
    }

    #[test]
    fn cor2_lengths() {
        assert_eq!(worst_case_word(spec(Family::Cor2, 4)).unwrap().len(), 46);
        let report = verify_family(spec(Family::Cor2, 6)).unwrap();
        assert!(report.all_claims_hold, "{report:?}");
        assert_eq!(report.measured_depth, 5);
        assert!(report.reduces_to_phi_n_suffix);
    }

    #[test]
    fn cor3_length_is_measured() {
        for n in 3..=10 {
            let report = verify_family(spec(Family::Cor3, n)).unwrap();
            assert_eq!(report.alternative_length_matches, Some(true));
            assert!(!report.length_matches);
            assert!(report.halving_exact, "{report:?}");
            assert!(report.reduces_to_phi_n_suffix);
            assert_eq!(report.measured_depth, n as usize - 1);
        }
    }

    #[test]
    fn key_identity() {
        for m in 3..=14 {
            let v = phi_power(m).unwrap();
            let image = PHI.apply(v.letters());
            let wrapped = Word::from_letters(PSI.apply(&image[1..]));
            assert_eq!(is_reduce(&wrapped).letters(), &v.letters()[1..], "m = {m}");
        }
    }

    #[test]
    fn range_checks() {
        assert_eq!(
            FamilySpec::new(Family::Thm1, 2),
            Err(WorstCaseError::TooSmall(2))
        );
        assert!(FamilySpec::new(Family::Cor2, 27).is_err());
        assert_eq!("cor3".parse::<Family>(), Ok(Family::Cor3));
    }
}

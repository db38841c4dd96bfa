use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Direction, MarkovChain};
use crate::words::{Letter, Word};

/// Generator for trial `trial` of a run seeded with `seed`. Each trial reads
/// its own stream, so results do not depend on how trials are scheduled.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Inverse-CDF sampler over a finite, possibly unnormalised law.
#[derive(Clone, Debug)]
pub(crate) struct Categorical {
    cumulative: Vec<f64>,
    last_positive: usize,
}

impl Categorical {
    pub(crate) fn new(masses: &[f64]) -> Self {
        let mut acc = 0.0;
        let cumulative = masses
            .iter()
            .map(|&p| {
                acc += p;
                acc
            })
            .collect();
        let last_positive = masses.iter().rposition(|&p| p > 0.0).unwrap_or(0);
        Self {
            cumulative,
            last_positive,
        }
    }

    pub(crate) fn total(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    pub(crate) fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        let u = rng.gen::<f64>() * self.total();
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.last_positive)
    }
}

pub(crate) struct ChainSampler<'a> {
    chain: &'a MarkovChain,
    initial: Categorical,
    rows: Vec<Categorical>,
}

impl<'a> ChainSampler<'a> {
    pub(crate) fn new(chain: &'a MarkovChain) -> Self {
        Self {
            chain,
            initial: Categorical::new(chain.initial()),
            rows: chain
                .transition()
                .iter()
                .map(|r| Categorical::new(r))
                .collect(),
        }
    }

    /// State indices in generation order.
    pub(crate) fn indices<R: Rng>(&self, length: usize, rng: &mut R) -> Vec<usize> {
        let mut out = Vec::with_capacity(length);
        if length == 0 {
            return out;
        }
        let mut s = self.initial.sample(rng);
        out.push(s);
        for _ in 1..length {
            s = self.rows[s].sample(rng);
            out.push(s);
        }
        out
    }

    pub(crate) fn word<R: Rng>(&self, direction: Direction, length: usize, rng: &mut R) -> Word {
        let mut idx = self.indices(length, rng);
        if direction == Direction::RightToLeft {
            idx.reverse();
        }
        let states = self.chain.states();
        let letters: Vec<Letter> = idx.into_iter().map(|i| states[i]).collect();
        let alphabet = states.last().map_or(0, |&l| l + 1);
        Word::new(letters, alphabet).expect("states are valid letters")
    }
}

/// A word of `length` letters generated by `chain` in `direction`.
pub fn sample_word(chain: &MarkovChain, direction: Direction, length: usize, seed: u64) -> Word {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ChainSampler::new(chain).word(direction, length, &mut rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_cycle() {
        let chain = MarkovChain::new(
            vec![0, 1],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![1.0, 0.0],
        )
        .unwrap();
        let w = sample_word(&chain, Direction::LeftToRight, 5, 7);
        assert_eq!(w.letters(), &[0, 1, 0, 1, 0]);
        let w = sample_word(&chain, Direction::RightToLeft, 4, 7);
        assert_eq!(w.letters(), &[1, 0, 1, 0]);
    }

    #[test]
    fn letter_frequencies() {
        let chain = MarkovChain::uniform_iid(2);
        let w = sample_word(&chain, Direction::LeftToRight, 1_000_000, 1);
        let ones = w.letters().iter().filter(|&&l| l == 1).count() as f64;
        assert!((ones / 1e6 - 0.5).abs() < 0.002);
    }

    #[test]
    fn seeds_are_reproducible() {
        let chain = MarkovChain::uniform_iid(5);
        assert_eq!(
            sample_word(&chain, Direction::RightToLeft, 1000, 3),
            sample_word(&chain, Direction::RightToLeft, 1000, 3)
        );
        assert_ne!(
            sample_word(&chain, Direction::RightToLeft, 1000, 3),
            sample_word(&chain, Direction::RightToLeft, 1000, 4)
        );
        let a: u64 = trial_rng(1, 0).gen();
        let b: u64 = trial_rng(1, 1).gen();
        assert_ne!(a, b);
    }

    #[test]
    fn zero_mass_letters_are_never_drawn() {
        let c = Categorical::new(&[0.0, 0.5, 0.5, 0.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            let s = c.sample(&mut rng);
            assert!(s == 1 || s == 2);
        }
    }
}

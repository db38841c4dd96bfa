//! Lifting a chain to states `(letter, ↑/↓)`, where `↑` marks a position
//! that is non-decreasing (its run of equal letters ends with an ascent).
//! Locally minimal indices are then read off single transitions, which
//! gives `γ₁`, the limit density of locally minimal indices.

use serde::{Deserialize, Serialize};

use super::stationary::stationary;
use super::terminal::single_terminal;
use super::{MarkovChain, MarkovError};
use crate::words::Letter;

/// Order in which the chain emits the letters of a word.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    /// The last letter is drawn from `μ`, then each letter from its right
    /// neighbour.
    #[serde(rename = "rl")]
    RightToLeft,
    #[serde(rename = "lr")]
    LeftToRight,
}

impl std::str::FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rl" => Ok(Direction::RightToLeft),
            "lr" => Ok(Direction::LeftToRight),
            _ => Err(format!("unknown direction `{s}` (expected rl or lr)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dir {
    Up,
    Down,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AnnotatedState {
    /// `($, ↑)`: the sentinel, right-to-left only.
    Start,
    Pair {
        letter: Letter,
        dir: Dir,
    },
    /// Both annotations of an absorbing terminal letter, merged.
    Sink {
        letter: Letter,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnotatedChain {
    pub base: MarkovChain,
    pub direction: Direction,
    pub states: Vec<AnnotatedState>,
    /// Transitions and initial law over `states` (by index).
    pub lifted: MarkovChain,
    /// Stationary law from the closed form.
    pub stationary: Vec<f64>,
    pub merged_sink: Option<Letter>,
    /// Largest deviation between the closed form and a direct fixed-point
    /// solve of `lifted`.
    pub fixed_point_gap: f64,
}

/// `M^↑(x)`: probability that the first letter differing from `x` after a
/// run of `x` is larger. `None` for an absorbing letter.
pub fn m_up(chain: &MarkovChain, x: usize) -> Option<f64> {
    let stay = chain.m(x, x);
    (stay < 1.0).then(|| chain.m_plus(x) / (1.0 - stay))
}

pub fn m_down(chain: &MarkovChain, x: usize) -> Option<f64> {
    let stay = chain.m(x, x);
    (stay < 1.0).then(|| chain.m_minus(x) / (1.0 - stay))
}

/// `ν⁺(x) = Σ_{y > x} ν(y)·M(y,x)`.
pub fn nu_plus(chain: &MarkovChain, nu: &[f64], x: usize) -> f64 {
    (x + 1..chain.len()).map(|y| nu[y] * chain.m(y, x)).sum()
}

/// Closed-form stationary mass of `(x,↑)` and `(x,↓)` for each letter. For
/// an absorbing terminal letter the whole mass is reported under `↓`.
pub fn nu_bar(chain: &MarkovChain, direction: Direction) -> Result<Vec<(f64, f64)>, MarkovError> {
    let nu = stationary(chain)?.mass;
    let n = chain.len();
    Ok((0..n)
        .map(|x| {
            let stay = chain.m(x, x);
            if stay >= 1.0 {
                return (0.0, nu[x]);
            }
            match direction {
                Direction::RightToLeft => {
                    let up: f64 = (x + 1..n).map(|y| nu[y] * chain.m(y, x)).sum();
                    let down: f64 = (0..x).map(|y| nu[y] * chain.m(y, x)).sum();
                    (up / (1.0 - stay), down / (1.0 - stay))
                }
                Direction::LeftToRight => (
                    nu[x] * m_up(chain, x).unwrap(),
                    nu[x] * m_down(chain, x).unwrap(),
                ),
            }
        })
        .collect())
}

pub fn gamma1(chain: &MarkovChain, direction: Direction) -> Result<f64, MarkovError> {
    let terminal = single_terminal(chain)?;
    if terminal.len() == 1 {
        return Ok(0.0);
    }
    let n = chain.len();
    Ok(match direction {
        Direction::RightToLeft => {
            let bar = nu_bar(chain, direction)?;
            (0..n).map(|x| chain.m_plus(x) * bar[x].0).sum()
        }
        Direction::LeftToRight => {
            let nu = stationary(chain)?.mass;
            (0..n)
                .filter_map(|x| m_up(chain, x).map(|up| nu_plus(chain, &nu, x) * up))
                .sum()
        }
    })
}

pub fn annotate(chain: &MarkovChain, direction: Direction) -> Result<AnnotatedChain, MarkovError> {
    let terminal = single_terminal(chain)?;
    let n = chain.len();
    let sink =
        (terminal.len() == 1 && chain.m(terminal[0], terminal[0]) >= 1.0).then(|| terminal[0]);
    let letter = |x: usize| chain.states()[x];

    let mut states = Vec::new();
    if direction == Direction::RightToLeft {
        states.push(AnnotatedState::Start);
    }
    // index[x] = (index of (x,↑), index of (x,↓)); both equal for the sink.
    let mut index = vec![(usize::MAX, usize::MAX); n];
    for x in 0..n {
        if Some(x) == sink {
            index[x] = (states.len(), states.len());
            states.push(AnnotatedState::Sink { letter: letter(x) });
            continue;
        }
        for dir in [Dir::Up, Dir::Down] {
            let present = match direction {
                Direction::RightToLeft => true,
                Direction::LeftToRight => {
                    let p = if dir == Dir::Up {
                        m_up(chain, x)
                    } else {
                        m_down(chain, x)
                    };
                    p.is_some_and(|p| p > 0.0)
                }
            };
            if present {
                let slot = if dir == Dir::Up {
                    &mut index[x].0
                } else {
                    &mut index[x].1
                };
                *slot = states.len();
                states.push(AnnotatedState::Pair {
                    letter: letter(x),
                    dir,
                });
            }
        }
    }

    let size = states.len();
    let mut transition = vec![vec![0.0; size]; size];
    let mut initial = vec![0.0; size];
    let bar = nu_bar(chain, direction)?;
    let mut closed_form = vec![0.0; size];

    match direction {
        Direction::RightToLeft => {
            initial[0] = 1.0;
            for y in 0..n {
                transition[0][index[y].1] += chain.initial()[y];
            }
            for x in 0..n {
                for (dir, from) in [(Dir::Up, index[x].0), (Dir::Down, index[x].1)] {
                    if Some(x) == sink {
                        if dir == Dir::Up {
                            transition[from][from] = 1.0;
                        }
                        continue;
                    }
                    for y in 0..n {
                        let to = match y.cmp(&x) {
                            std::cmp::Ordering::Equal => from,
                            std::cmp::Ordering::Greater => index[y].1,
                            std::cmp::Ordering::Less => index[y].0,
                        };
                        transition[from][to] += chain.m(x, y);
                    }
                }
                if Some(x) == sink {
                    closed_form[index[x].0] = bar[x].0 + bar[x].1;
                } else {
                    closed_form[index[x].0] = bar[x].0;
                    closed_form[index[x].1] = bar[x].1;
                }
            }
        }
        Direction::LeftToRight => {
            // Mass entering letter y splits between its annotations.
            let entry = |y: usize| -> Vec<(usize, f64)> {
                if Some(y) == sink {
                    return vec![(index[y].0, 1.0)];
                }
                let mut out = Vec::new();
                if index[y].0 != usize::MAX {
                    out.push((index[y].0, m_up(chain, y).unwrap()));
                }
                if index[y].1 != usize::MAX {
                    out.push((index[y].1, m_down(chain, y).unwrap()));
                }
                out
            };
            for y in 0..n {
                for (s, p) in entry(y) {
                    initial[s] += chain.initial()[y] * p;
                }
            }
            for x in 0..n {
                if Some(x) == sink {
                    let s = index[x].0;
                    transition[s][s] = 1.0;
                    closed_form[s] = bar[x].0 + bar[x].1;
                    continue;
                }
                for (dir, from) in [(Dir::Up, index[x].0), (Dir::Down, index[x].1)] {
                    if from == usize::MAX {
                        continue;
                    }
                    let norm = if dir == Dir::Up {
                        m_up(chain, x).unwrap()
                    } else {
                        m_down(chain, x).unwrap()
                    };
                    transition[from][from] += chain.m(x, x);
                    for y in 0..n {
                        let allowed = match dir {
                            Dir::Up => y > x,
                            Dir::Down => y < x,
                        };
                        if allowed && chain.m(x, y) > 0.0 {
                            for (s, p) in entry(y) {
                                transition[from][s] += p * chain.m(x, y) / norm;
                            }
                        }
                    }
                    closed_form[from] = if dir == Dir::Up { bar[x].0 } else { bar[x].1 };
                }
            }
        }
    }

    // Rounding can push a lone entry a hair past 1.
    for row in transition.iter_mut().chain(std::iter::once(&mut initial)) {
        row.iter_mut().for_each(|p| *p = p.clamp(0.0, 1.0));
    }
    let lifted = MarkovChain::new((0..size as Letter).collect(), transition, initial)?;
    let solved = stationary(&lifted)?.mass;
    let fixed_point_gap = solved
        .iter()
        .zip(&closed_form)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(AnnotatedChain {
        base: chain.clone(),
        direction,
        states,
        lifted,
        stationary: closed_form,
        merged_sink: sink.map(letter),
        fixed_point_gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle2() -> MarkovChain {
        MarkovChain::new(
            vec![0, 1],
            vec![vec![0.0, 1.0], vec![1.0, 0.0]],
            vec![1.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn uniform_binary_marginals() {
        let chain = MarkovChain::uniform_iid(2);
        for direction in [Direction::RightToLeft, Direction::LeftToRight] {
            let bar = nu_bar(&chain, direction).unwrap();
            for (up, down) in bar {
                assert!((up + down - 0.5).abs() < 1e-12);
            }
            let a = annotate(&chain, direction).unwrap();
            assert!(a.fixed_point_gap < 1e-10);
            assert!((gamma1(&chain, direction).unwrap() - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn absorbing_letter_is_merged() {
        let chain = MarkovChain::new(
            vec![0, 1],
            vec![vec![0.5, 0.5], vec![0.0, 1.0]],
            vec![1.0, 0.0],
        )
        .unwrap();
        for direction in [Direction::RightToLeft, Direction::LeftToRight] {
            let a = annotate(&chain, direction).unwrap();
            assert_eq!(a.merged_sink, Some(1));
            assert_eq!(gamma1(&chain, direction).unwrap(), 0.0);
            let sink = a
                .states
                .iter()
                .position(|s| matches!(s, AnnotatedState::Sink { .. }))
                .unwrap();
            assert!((a.stationary[sink] - 1.0).abs() < 1e-12);
            assert!(a.fixed_point_gap < 1e-10);
        }
    }

    #[test]
    fn two_cycle_left_to_right() {
        let a = annotate(&cycle2(), Direction::LeftToRight).unwrap();
        let mass = |letter, dir| {
            a.states
                .iter()
                .position(|&s| s == AnnotatedState::Pair { letter, dir })
                .map_or(0.0, |i| a.stationary[i])
        };
        assert_eq!(mass(0, Dir::Up), 0.5);
        assert_eq!(mass(1, Dir::Down), 0.5);
        assert_eq!(mass(0, Dir::Down), 0.0);
        assert_eq!(mass(1, Dir::Up), 0.0);
        assert!(a.fixed_point_gap < 1e-10);
        assert!((gamma1(&cycle2(), Direction::LeftToRight).unwrap() - 0.5).abs() < 1e-12);
        assert!((gamma1(&cycle2(), Direction::RightToLeft).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn iid_three_letters() {
        let chain = MarkovChain::iid(&[3.0 / 8.0, 0.25, 3.0 / 8.0]).unwrap();
        for direction in [Direction::RightToLeft, Direction::LeftToRight] {
            assert!((gamma1(&chain, direction).unwrap() - 9.0 / 32.0).abs() < 1e-12);
        }
    }
}

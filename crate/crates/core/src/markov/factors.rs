//! The chain on unimodal factors: the letters of `eis(w)` are themselves
//! generated by a Markov chain whose states are the factors. The state space
//! is infinite; it is enumerated here up to a length bound, and every
//! quantity reports the probability mass the bound leaves out.

use std::cmp::Ordering;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::annotate::{gamma1, m_up, nu_bar, nu_plus};
use super::sampling::Categorical;
use super::stationary::stationary;
use super::terminal::single_terminal;
use super::{Direction, MarkovChain, MarkovError};
use crate::words::{compare_factors, Factor, FactorOrder, Letter};

/// Enumeration refuses to list more factors than this.
pub const MAX_FACTORS: usize = 2_000_000;

/// Phases of the automata recognising the factor shapes, fed one letter at
/// a time in growth order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Phase {
    /// Only equal letters so far.
    Flat,
    /// A strict rise has been seen and no descent yet.
    Up,
    /// Descending; the last step was strict.
    DownStrict,
    /// Descending; the last step was an equality.
    DownFlat,
    /// Accepting and not extendable.
    Done,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shape {
    /// `w₀ ≤ … ≤ w_{k-1} < w_k ≥ … ≥ w_{ℓ-1} > w_ℓ`, grown to the right.
    Unimodal,
    /// `w₀ ≤ … ≤ w_k ≥ … ≥ w_{ℓ-1} > w_ℓ`, grown to the right.
    Prefix,
    /// `w₀ ≥ … ≥ w_{ℓ-1} > w_ℓ`, grown to the right.
    Descending,
    /// `w₀ ≤ … ≤ w_{ℓ-1} < w_ℓ`, grown to the right.
    Ascending,
    /// `w₀ < w₁ ≥ … ≥ w_ℓ`, grown to the left from `w_ℓ`.
    PeakThenFall,
    /// `w₀ > w₁ ≤ … ≤ w_ℓ`, grown to the left from `w_ℓ`.
    DipThenRise,
    /// The unimodal shape again, grown to the left from `w_ℓ`.
    UnimodalBackwards,
}

impl Shape {
    /// Next phase after appending `next` to a path ending in `prev` (both
    /// in growth order). `None` kills the path.
    fn step(self, phase: Phase, prev: usize, next: usize) -> Option<Phase> {
        use Phase::*;
        let ord = next.cmp(&prev);
        match self {
            Shape::Unimodal => match (phase, ord) {
                (Flat, Ordering::Equal) => Some(Flat),
                (Flat, Ordering::Greater) => Some(Up),
                (Flat, Ordering::Less) => None,
                (Up, Ordering::Less) => Some(DownStrict),
                (Up, _) => Some(Up),
                (DownStrict | DownFlat, Ordering::Less) => Some(DownStrict),
                (DownStrict | DownFlat, Ordering::Equal) => Some(DownFlat),
                _ => None,
            },
            Shape::Prefix => match (phase, ord) {
                (Flat | Up, Ordering::Less) => Some(DownStrict),
                (Flat | Up, _) => Some(Up),
                (DownStrict | DownFlat, Ordering::Less) => Some(DownStrict),
                (DownStrict | DownFlat, Ordering::Equal) => Some(DownFlat),
                _ => None,
            },
            Shape::Descending => match ord {
                Ordering::Less => Some(DownStrict),
                Ordering::Equal => Some(DownFlat),
                Ordering::Greater => None,
            },
            Shape::Ascending => match ord {
                Ordering::Greater => Some(Up),
                Ordering::Equal => Some(Flat),
                Ordering::Less => None,
            },
            // Backwards: `next` is the letter to the left of `prev`.
            Shape::PeakThenFall => match (phase, ord) {
                (Done, _) => None,
                (_, Ordering::Less) => Some(Done),
                _ => Some(Flat),
            },
            Shape::DipThenRise => match (phase, ord) {
                (Done, _) => None,
                (_, Ordering::Greater) => Some(Done),
                _ => Some(Flat),
            },
            Shape::UnimodalBackwards => match (phase, ord) {
                // first step must be the final strict descent
                (Flat, Ordering::Greater) => Some(DownStrict),
                (Flat, _) => None,
                (DownStrict, Ordering::Less) => Some(Up),
                (DownStrict, _) => Some(DownStrict),
                (Up, Ordering::Greater) => None,
                (Up, _) => Some(Up),
                _ => None,
            },
        }
    }

    fn accepts(self, phase: Phase) -> bool {
        match self {
            Shape::Unimodal | Shape::Prefix | Shape::Descending => phase == Phase::DownStrict,
            Shape::Ascending => phase == Phase::Up,
            Shape::PeakThenFall | Shape::DipThenRise => phase == Phase::Done,
            Shape::UnimodalBackwards => phase == Phase::Up,
        }
    }

    /// Whether the sentinel may close the word after a path in this phase.
    fn accepts_sentinel(self, phase: Phase) -> bool {
        self == Shape::Unimodal && matches!(phase, Phase::Up | Phase::DownStrict | Phase::DownFlat)
    }
}

/// Depth-first enumeration of the paths of one shape.
struct Walk<'a> {
    shape: Shape,
    max_len: usize,
    n: usize,
    edge: &'a dyn Fn(usize, usize) -> f64,
}

struct Visit<'p> {
    path: &'p [usize],
    phase: Phase,
    weight: f64,
}

impl Walk<'_> {
    /// Calls `visit` on every live path (start letter included) and
    /// `frontier` on every live path of exactly `max_len` letters.
    fn run(
        &self,
        start: usize,
        visit: &mut dyn FnMut(&Visit),
        frontier: &mut dyn FnMut(&Visit),
    ) -> Result<(), MarkovError> {
        let mut path = vec![start];
        let mut count = 0usize;
        self.go(&mut path, Phase::Flat, 1.0, visit, frontier, &mut count)
    }

    fn go(
        &self,
        path: &mut Vec<usize>,
        phase: Phase,
        weight: f64,
        visit: &mut dyn FnMut(&Visit),
        frontier: &mut dyn FnMut(&Visit),
        count: &mut usize,
    ) -> Result<(), MarkovError> {
        *count += 1;
        if *count > MAX_FACTORS {
            return Err(MarkovError::EnumerationTooLarge { limit: MAX_FACTORS });
        }
        let node = Visit {
            path,
            phase,
            weight,
        };
        visit(&node);
        if path.len() >= self.max_len {
            frontier(&node);
            return Ok(());
        }
        let prev = *path.last().unwrap();
        for next in 0..self.n {
            let Some(phase) = self.shape.step(phase, prev, next) else {
                continue;
            };
            let w = weight * (self.edge)(prev, next);
            if w <= 0.0 {
                continue;
            }
            path.push(next);
            self.go(path, phase, w, visit, frontier, count)?;
            path.pop();
        }
        Ok(())
    }
}

/// An enumerated factor with its weight `m(w)` (including `μ(w₋₁)` for a
/// sentinel factor) and its initial and stationary masses.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FactorEntry {
    pub letters: Vec<Letter>,
    pub sentinel: bool,
    pub weight: f64,
    pub initial: f64,
    pub stationary: f64,
}

impl FactorEntry {
    pub fn to_factor(&self) -> Factor {
        Factor {
            letters: self.letters.clone(),
            sentinel: self.sentinel,
        }
    }
}

/// The factor chain truncated to factors of at most `max_len` symbols (the
/// sentinel counts as a symbol).
#[derive(Clone, Debug, Serialize)]
pub struct FactorChainView {
    pub direction: Direction,
    pub max_len: usize,
    pub gamma1: f64,
    pub factors: Vec<FactorEntry>,
    pub initial_mass: f64,
    pub stationary_mass: f64,
    /// Largest of the initial and stationary deficits.
    pub tail: f64,
    #[serde(skip)]
    indices: Vec<Vec<usize>>,
    /// Factors that may follow a factor whose junction letter is `x`.
    #[serde(skip)]
    followers: Vec<Vec<usize>>,
    /// Numerator of the transition weight into each factor.
    #[serde(skip)]
    link: Vec<f64>,
    /// Denominator of the transition weights out of each factor.
    #[serde(skip)]
    norm: Vec<f64>,
}

impl FactorChainView {
    fn junction_out(&self, f: usize) -> Option<usize> {
        let idx = &self.indices[f];
        match self.direction {
            Direction::RightToLeft => idx.first().copied(),
            Direction::LeftToRight => idx.last().copied(),
        }
    }

    /// Enumerated successors of factor `f` with their transition
    /// probabilities (rows may sum to less than one).
    pub fn successors(&self, f: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let list: &[usize] = match self.junction_out(f) {
            Some(x) if self.norm[f] > 0.0 => &self.followers[x],
            _ => &[],
        };
        list.iter().map(move |&g| (g, self.link[g] / self.norm[f]))
    }

    pub fn transition(&self, f: usize, g: usize) -> f64 {
        self.successors(f)
            .find(|&(h, _)| h == g)
            .map_or(0.0, |(_, p)| p)
    }

    pub fn row_sum(&self, f: usize) -> f64 {
        self.successors(f).map(|(_, p)| p).sum()
    }

    /// `‖ν̄̄ − ν̄̄·M̄̄‖₁` over the enumerated factors.
    pub fn stationary_fixed_point_gap(&self) -> f64 {
        let mut image = vec![0.0; self.factors.len()];
        for (f, entry) in self.factors.iter().enumerate() {
            if entry.stationary > 0.0 {
                for (g, p) in self.successors(f) {
                    image[g] += entry.stationary * p;
                }
            }
        }
        image
            .iter()
            .zip(&self.factors)
            .map(|(a, e)| (a - e.stationary).abs())
            .sum()
    }
}

fn letters_of(chain: &MarkovChain, idx: &[usize]) -> Vec<Letter> {
    idx.iter().map(|&i| chain.states()[i]).collect()
}

fn require_non_singleton(chain: &MarkovChain) -> Result<Vec<usize>, MarkovError> {
    let terminal = single_terminal(chain)?;
    if terminal.len() < 2 {
        return Err(MarkovError::SingletonTerminal);
    }
    Ok(terminal)
}

pub fn factor_chain(
    chain: &MarkovChain,
    direction: Direction,
    max_len: usize,
) -> Result<FactorChainView, MarkovError> {
    require_non_singleton(chain)?;
    assert!(max_len >= 2, "max_len must be at least 2");
    let n = chain.len();
    let g1 = gamma1(chain, direction)?;
    let nu = stationary(chain)?.mass;

    let mut indices: Vec<Vec<usize>> = Vec::new();
    let mut entries: Vec<FactorEntry> = Vec::new();

    match direction {
        Direction::RightToLeft => {
            let bar = nu_bar(chain, direction)?;
            let edge = |prev: usize, next: usize| chain.m(next, prev);
            let walk = Walk {
                shape: Shape::Unimodal,
                max_len,
                n,
                edge: &edge,
            };
            for x in (0..n).filter(|&x| chain.m_plus(x) > 0.0) {
                let mut visit = |v: &Visit| {
                    let first = v.path[0];
                    let last = *v.path.last().unwrap();
                    if walk.shape.accepts(v.phase) {
                        indices.push(v.path.to_vec());
                        entries.push(FactorEntry {
                            letters: letters_of(chain, v.path),
                            sentinel: false,
                            weight: v.weight,
                            initial: 0.0,
                            stationary: chain.m_plus(first) * v.weight * bar[last].0 / g1,
                        });
                    }
                    if walk.shape.accepts_sentinel(v.phase) && v.path.len() < max_len {
                        let weight = v.weight * chain.initial()[last];
                        if weight > 0.0 {
                            indices.push(v.path.to_vec());
                            entries.push(FactorEntry {
                                letters: letters_of(chain, v.path),
                                sentinel: true,
                                weight,
                                initial: chain.m_plus(first) * weight,
                                stationary: 0.0,
                            });
                        }
                    }
                };
                walk.run(x, &mut visit, &mut |_| {})?;
            }
        }
        Direction::LeftToRight => {
            let edge = |prev: usize, next: usize| chain.m(prev, next);
            // Mass of the word prefixes that end at their first locally
            // minimal index, grouped by that letter.
            let mut prefix_mass = vec![0.0; n];
            let prefix_walk = Walk {
                shape: Shape::Prefix,
                max_len,
                n,
                edge: &edge,
            };
            for x in 0..n {
                let mu = chain.initial()[x];
                if mu == 0.0 {
                    continue;
                }
                let mut visit = |v: &Visit| {
                    if prefix_walk.shape.accepts(v.phase) {
                        prefix_mass[*v.path.last().unwrap()] += mu * v.weight;
                    }
                };
                prefix_walk.run(x, &mut visit, &mut |_| {})?;
            }
            let up: Vec<f64> = (0..n).map(|x| m_up(chain, x).unwrap_or(0.0)).collect();
            let walk = Walk {
                shape: Shape::Unimodal,
                max_len,
                n,
                edge: &edge,
            };
            for x in 0..n {
                let plus = nu_plus(chain, &nu, x);
                let mut visit = |v: &Visit| {
                    let last = *v.path.last().unwrap();
                    if walk.shape.accepts(v.phase) && up[last] > 0.0 {
                        indices.push(v.path.to_vec());
                        entries.push(FactorEntry {
                            letters: letters_of(chain, v.path),
                            sentinel: false,
                            weight: v.weight,
                            initial: prefix_mass[x] * v.weight * up[last],
                            stationary: plus * v.weight * up[last] / g1,
                        });
                    }
                };
                walk.run(x, &mut visit, &mut |_| {})?;
            }
        }
    }

    let mut followers = vec![Vec::new(); n];
    let mut link = vec![0.0; entries.len()];
    let mut norm = vec![0.0; entries.len()];
    for (f, idx) in indices.iter().enumerate() {
        let (first, last) = (idx[0], *idx.last().unwrap());
        match direction {
            Direction::RightToLeft => {
                norm[f] = chain.m_plus(first);
                if !entries[f].sentinel {
                    followers[last].push(f);
                    link[f] = chain.m_plus(first) * entries[f].weight;
                }
            }
            Direction::LeftToRight => {
                let up = m_up(chain, last).unwrap_or(0.0);
                norm[f] = up;
                followers[first].push(f);
                link[f] = up * entries[f].weight;
            }
        }
    }

    let initial_mass: f64 = entries.iter().map(|e| e.initial).sum();
    let stationary_mass: f64 = entries.iter().map(|e| e.stationary).sum();
    let tail = (1.0 - initial_mass).max(1.0 - stationary_mass).max(0.0);
    Ok(FactorChainView {
        direction,
        max_len,
        gamma1: g1,
        factors: entries,
        initial_mass,
        stationary_mass,
        tail,
        indices,
        followers,
        link,
        norm,
    })
}

/// A run of the truncated factor chain: `count` factors in generation
/// order, drawn from the enumerated support with renormalised rows. A run
/// that reaches a factor with no enumerated successor restarts from the
/// initial law.
pub fn sample_factors(
    view: &FactorChainView,
    count: usize,
    seed: u64,
) -> Result<Vec<Factor>, MarkovError> {
    const LIMIT: f64 = 0.01;
    if view.tail > LIMIT {
        return Err(MarkovError::TailTooLarge {
            tail: view.tail,
            limit: LIMIT,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = Categorical::new(&view.factors.iter().map(|e| e.initial).collect::<Vec<_>>());
    let rows: Vec<Option<(Vec<usize>, Categorical)>> = (0..view.factors.len())
        .map(|f| {
            let (targets, weights): (Vec<usize>, Vec<f64>) = view.successors(f).unzip();
            (!targets.is_empty()).then(|| (targets, Categorical::new(&weights)))
        })
        .collect();
    let mut out = Vec::with_capacity(count);
    let mut current: Option<usize> = None;
    for _ in 0..count {
        let next = match current.and_then(|f| rows[f].as_ref()) {
            Some((targets, law)) => targets[law.sample(&mut rng)],
            None => initial.sample(&mut rng),
        };
        out.push(view.factors[next].to_factor());
        current = Some(next);
    }
    Ok(out)
}

/// One truncated identity: `left` is exact, `right` sums the enumerated
/// words, and `tail_bound` bounds the mass of the longer ones.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub identity: &'static str,
    pub letter: Letter,
    pub left: f64,
    pub right: f64,
    pub gap: f64,
    pub tail_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdentityReport {
    pub max_len: usize,
    pub checks: Vec<IdentityCheck>,
    pub all_hold: bool,
}

/// Truncated forms of the run decompositions behind the factor chain:
///
/// * right to left, `ν̄(x,↓)` as a sum over descending runs, `ν̄(x,↑)` over
///   ascending runs and over unimodal factors starting at `x`;
/// * left to right, `ν(x)` as sums over the words ending at `x` that climb
///   to a peak (resp. fall into a dip) and then move monotonically back to
///   `x`, and `ν⁺(x)` over unimodal factors ending at `x`.
pub fn check_stationary_identities(
    chain: &MarkovChain,
    max_len: usize,
) -> Result<IdentityReport, MarkovError> {
    let terminal = require_non_singleton(chain)?;
    let n = chain.len();
    let nu = stationary(chain)?.mass;
    let bar = nu_bar(chain, Direction::RightToLeft)?;
    let mut checks = Vec::new();

    let rl_edge = |prev: usize, next: usize| chain.m(next, prev);
    let mut run = |identity: &'static str,
                   shape: Shape,
                   x: usize,
                   left: f64,
                   end_weight: &dyn Fn(&[usize]) -> f64|
     -> Result<(), MarkovError> {
        let walk = Walk {
            shape,
            max_len,
            n,
            edge: &rl_edge,
        };
        let mut right = 0.0;
        let mut bound = 0.0;
        walk.run(
            x,
            &mut |v| {
                if shape.accepts(v.phase) {
                    right += v.weight * end_weight(v.path);
                }
            },
            &mut |v| {
                if !matches!(v.phase, Phase::Done) {
                    bound += v.weight * nu[*v.path.last().unwrap()];
                }
            },
        )?;
        let gap = (left - right).abs();
        checks.push(IdentityCheck {
            identity,
            letter: chain.states()[x],
            left,
            right,
            gap,
            tail_bound: bound,
            holds: gap <= bound + 1e-10,
        });
        Ok(())
    };

    // Right to left, paths read from `w₀ = x` rightwards, weight
    // Π M(w_{i+1}, w_i) — the same edge rule as the backwards walks below.
    let end_up = |p: &[usize]| bar[*p.last().unwrap()].0;
    let end_down = |p: &[usize]| bar[*p.last().unwrap()].1;
    for &x in &terminal {
        run(
            "rl-descending-runs",
            Shape::Descending,
            x,
            bar[x].1,
            &end_up,
        )?;
        run(
            "rl-ascending-runs",
            Shape::Ascending,
            x,
            bar[x].0,
            &end_down,
        )?;
        if chain.m_plus(x) > 0.0 {
            run("rl-unimodal", Shape::Unimodal, x, bar[x].0, &end_up)?;
        }
    }
    // Left to right, paths grown leftwards from `w_ℓ = x`; each step
    // multiplies by M(w_i, w_{i+1}) = edge(prev, next) with prev = w_{i+1}.
    let start_nu = |p: &[usize]| nu[*p.last().unwrap()];
    let start_nu_plus = |p: &[usize]| nu_plus(chain, &nu, *p.last().unwrap());
    for &x in &terminal {
        run(
            "lr-peak-then-fall",
            Shape::PeakThenFall,
            x,
            nu[x],
            &start_nu,
        )?;
        run("lr-dip-then-rise", Shape::DipThenRise, x, nu[x], &start_nu)?;
        run(
            "lr-unimodal",
            Shape::UnimodalBackwards,
            x,
            nu_plus(chain, &nu, x),
            &start_nu_plus,
        )?;
    }

    let all_hold = checks.iter().all(|c| c.holds);
    Ok(IdentityReport {
        max_len,
        checks,
        all_hold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Gamma2Estimate {
    pub gamma1: f64,
    /// Locally minimal density of the truncated factor chain.
    pub theta1: f64,
    pub gamma2: f64,
    pub error: f64,
    pub tail: f64,
    pub support_size: usize,
}

/// `γ₂ ≈ γ₁·θ₁`, where `θ₁` is the `γ₁` of the factor chain restricted to
/// its enumerated stationary support (rows renormalised), with factors
/// ordered as `is` ranks them.
///
/// The reported error is `γ₁·2τ/(1−τ)` for the enumeration tail `τ`: the
/// renormalised chain moves each row, and its stationary law, by at most
/// that much in total variation, and `θ₁` is the mean of a 0/1 function of
/// consecutive states.
pub fn gamma2_truncated(
    chain: &MarkovChain,
    direction: Direction,
    max_len: usize,
) -> Result<Gamma2Estimate, MarkovError> {
    const LIMIT: f64 = 0.05;
    let view = factor_chain(chain, direction, max_len)?;
    if view.tail > LIMIT {
        return Err(MarkovError::TailTooLarge {
            tail: view.tail,
            limit: LIMIT,
        });
    }
    let mut support: Vec<usize> = (0..view.factors.len())
        .filter(|&f| view.factors[f].stationary > 0.0)
        .collect();
    support.sort_by(|&a, &b| {
        compare_factors(
            &view.factors[a].letters,
            false,
            &view.factors[b].letters,
            false,
            FactorOrder::Lexicographic,
        )
    });
    let mut rank = vec![usize::MAX; view.factors.len()];
    for (r, &f) in support.iter().enumerate() {
        rank[f] = r;
    }
    let k = support.len();
    let transition: Vec<Vec<f64>> = support
        .iter()
        .map(|&f| {
            let mut row = vec![0.0; k];
            for (g, p) in view.successors(f) {
                if rank[g] != usize::MAX {
                    row[rank[g]] += p;
                }
            }
            let sum: f64 = row.iter().sum();
            row.iter_mut().for_each(|p| *p /= sum);
            row
        })
        .collect();
    let total: f64 = support.iter().map(|&f| view.factors[f].stationary).sum();
    let initial = support
        .iter()
        .map(|&f| view.factors[f].stationary / total)
        .collect();
    let reduced = MarkovChain::new((0..k as Letter).collect(), transition, initial)?;
    let theta1 = gamma1(&reduced, direction)?;
    let tau = view.tail;
    Ok(Gamma2Estimate {
        gamma1: view.gamma1,
        theta1,
        gamma2: view.gamma1 * theta1,
        error: view.gamma1 * 2.0 * tau / (1.0 - tau),
        tail: tau,
        support_size: k,
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
    fn uniform_binary_short_factors() {
        let view = factor_chain(&MarkovChain::uniform_iid(2), Direction::RightToLeft, 3).unwrap();
        let plain: Vec<(&[Letter], f64)> = view
            .factors
            .iter()
            .filter(|e| !e.sentinel)
            .map(|e| (e.letters.as_slice(), e.weight))
            .collect();
        assert_eq!(plain, vec![(&[0, 1, 0][..], 0.25)]);
        let sentinel: Vec<&[Letter]> = view
            .factors
            .iter()
            .filter(|e| e.sentinel)
            .map(|e| e.letters.as_slice())
            .collect();
        assert_eq!(sentinel, vec![&[0, 1][..]]);
    }

    #[test]
    fn uniform_binary_tail() {
        // A stationary factor 0^a 1^b 0 has probability 2^{-(a+b+1)}·... and
        // the mass beyond length L is exactly L·2^{1-L}.
        for max_len in [6, 10, 14] {
            let view = factor_chain(
                &MarkovChain::uniform_iid(2),
                Direction::RightToLeft,
                max_len,
            )
            .unwrap();
            let expected = max_len as f64 * 2f64.powi(1 - max_len as i32);
            assert!(
                (1.0 - view.stationary_mass - expected).abs() < 1e-12,
                "L = {max_len}"
            );
            assert!(view.tail >= 1.0 - view.stationary_mass);
        }
    }

    #[test]
    fn rows_are_sub_stochastic_and_converge() {
        let chain = MarkovChain::iid(&[0.2, 0.5, 0.3]).unwrap();
        for direction in [Direction::RightToLeft, Direction::LeftToRight] {
            let mut last_deficit = f64::INFINITY;
            for max_len in [4, 8, 12] {
                let view = factor_chain(&chain, direction, max_len).unwrap();
                let mut worst: f64 = 0.0;
                for f in 0..view.factors.len() {
                    let s = view.row_sum(f);
                    assert!(s <= 1.0 + 1e-12);
                    if view.factors[f].stationary > 0.0 {
                        worst = worst.max(1.0 - s);
                    }
                }
                assert!(worst <= last_deficit + 1e-15);
                last_deficit = worst;
                assert!(view.stationary_fixed_point_gap() <= 4.0 * view.tail + 1e-12);
            }
            assert!(last_deficit < 0.01);
        }
    }

    #[test]
    fn two_cycle_is_exact() {
        for direction in [Direction::RightToLeft, Direction::LeftToRight] {
            let view = factor_chain(&cycle2(), direction, 3).unwrap();
            assert!((view.stationary_mass - 1.0).abs() < 1e-12);
        }
        let report = check_stationary_identities(&cycle2(), 3).unwrap();
        assert!(report.all_hold);
        for c in &report.checks {
            assert!(c.gap < 1e-12, "{c:?}");
        }
    }

    #[test]
    fn identities_within_tail() {
        let report = check_stationary_identities(&MarkovChain::uniform_iid(2), 20).unwrap();
        assert!(report.all_hold, "{report:?}");
        let report = check_stationary_identities(&MarkovChain::uniform_iid(3), 16).unwrap();
        assert!(report.all_hold, "{report:?}");
        let chain = MarkovChain::new(
            vec![0, 1, 2],
            vec![
                vec![0.1, 0.6, 0.3],
                vec![0.5, 0.2, 0.3],
                vec![0.3, 0.3, 0.4],
            ],
            vec![1.0, 0.0, 0.0],
        )
        .unwrap();
        let report = check_stationary_identities(&chain, 14).unwrap();
        assert!(report.all_hold, "{report:?}");
    }

    #[test]
    fn singleton_terminal_is_refused() {
        let chain = MarkovChain::new(
            vec![0, 1],
            vec![vec![0.5, 0.5], vec![0.0, 1.0]],
            vec![1.0, 0.0],
        )
        .unwrap();
        assert_eq!(
            factor_chain(&chain, Direction::RightToLeft, 5).unwrap_err(),
            MarkovError::SingletonTerminal
        );
    }

    #[test]
    fn sampling_is_reproducible() {
        let view = factor_chain(&MarkovChain::uniform_iid(2), Direction::RightToLeft, 14).unwrap();
        assert!(sample_factors(&view, 0, 1).unwrap().is_empty());
        assert_eq!(
            sample_factors(&view, 500, 9).unwrap(),
            sample_factors(&view, 500, 9).unwrap()
        );
        let short = factor_chain(&MarkovChain::uniform_iid(2), Direction::RightToLeft, 5).unwrap();
        assert!(matches!(
            sample_factors(&short, 10, 1),
            Err(MarkovError::TailTooLarge { .. })
        ));
    }

    #[test]
    fn gamma2_bounds() {
        let est =
            gamma2_truncated(&MarkovChain::uniform_iid(2), Direction::RightToLeft, 14).unwrap();
        assert!(
            est.gamma2 >= 0.0 && est.gamma2 <= 1.0 / 12.0 + est.error,
            "{est:?}"
        );
        assert!(est.gamma2 <= est.gamma1 / 2.0 + est.error);
        let fine =
            gamma2_truncated(&MarkovChain::uniform_iid(2), Direction::RightToLeft, 24).unwrap();
        assert!(
            (est.gamma2 - fine.gamma2).abs() <= est.error + fine.error,
            "{est:?} {fine:?}"
        );
    }
}

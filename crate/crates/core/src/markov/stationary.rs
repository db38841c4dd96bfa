use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::terminal::single_terminal;
use super::{MarkovChain, MarkovError};

const DIRECT_SOLVE_LIMIT: usize = 512;
const POWER_TARGET: f64 = 1e-12;
const POWER_MAX_ITERATIONS: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryDistribution {
    /// Indexed like the chain's states; zero outside the terminal component.
    pub mass: Vec<f64>,
    /// `‖ν − νM‖₁`.
    pub residual: f64,
}

pub fn stationary(chain: &MarkovChain) -> Result<StationaryDistribution, MarkovError> {
    let members = single_terminal(chain)?;
    let local = if members.len() <= DIRECT_SOLVE_LIMIT {
        direct_solve(chain, &members)
    } else {
        power_iteration(chain, &members)
    };
    let mut mass = vec![0.0; chain.len()];
    for (&i, &p) in members.iter().zip(&local) {
        mass[i] = p.max(0.0);
    }
    let total: f64 = mass.iter().sum();
    mass.iter_mut().for_each(|p| *p /= total);
    let residual = l1_residual(chain, &mass);
    Ok(StationaryDistribution { mass, residual })
}

pub(crate) fn l1_residual(chain: &MarkovChain, mass: &[f64]) -> f64 {
    chain
        .propagate(mass)
        .iter()
        .zip(mass)
        .map(|(a, b)| (a - b).abs())
        .sum()
}

/// Solves `ν(Mᵀ − I) = 0`, `Σν = 1` on the component, the normalisation
/// replacing the last balance equation.
fn direct_solve(chain: &MarkovChain, members: &[usize]) -> Vec<f64> {
    let k = members.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    for (r, &x) in members.iter().enumerate() {
        for (c, &y) in members.iter().enumerate() {
            a[(r, c)] = chain.m(y, x) - if r == c { 1.0 } else { 0.0 };
        }
    }
    for c in 0..k {
        a[(k - 1, c)] = 1.0;
    }
    let mut b = DVector::<f64>::zeros(k);
    b[k - 1] = 1.0;
    let solution = a
        .lu()
        .solve(&b)
        .expect("an irreducible block has a unique fixed point");
    solution.iter().copied().collect()
}

/// Iterates the lazy chain `(I + M)/2`, which has the same fixed point and
/// converges even on periodic components.
fn power_iteration(chain: &MarkovChain, members: &[usize]) -> Vec<f64> {
    let k = members.len();
    let mut nu = vec![1.0 / k as f64; k];
    for _ in 0..POWER_MAX_ITERATIONS {
        let mut next = vec![0.0; k];
        for (r, &y) in members.iter().enumerate() {
            for (c, &x) in members.iter().enumerate() {
                next[c] += nu[r] * chain.m(y, x);
            }
        }
        let residual: f64 = next.iter().zip(&nu).map(|(a, b)| (a - b).abs()).sum();
        for (v, n) in nu.iter_mut().zip(&next) {
            *v = 0.5 * (*v + n);
        }
        if residual <= POWER_TARGET {
            break;
        }
    }
    nu
}

/// The time reversal of the chain on its terminal component,
/// `Ṁ(x,y) = ν(y)·M(y,x)/ν(x)`, started from `ν`.
pub fn reverse_chain(chain: &MarkovChain) -> Result<MarkovChain, MarkovError> {
    let members = single_terminal(chain)?;
    let nu = stationary(chain)?.mass;
    let transition = members
        .iter()
        .map(|&x| {
            let row: Vec<f64> = members
                .iter()
                .map(|&y| nu[y] * chain.m(y, x) / nu[x])
                .collect();
            let sum: f64 = row.iter().sum();
            row.into_iter().map(|p| p / sum).collect()
        })
        .collect();
    let initial: Vec<f64> = members.iter().map(|&x| nu[x]).collect();
    let states = members.iter().map(|&x| chain.states()[x]).collect();
    MarkovChain::new(states, transition, initial)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_state() -> MarkovChain {
        MarkovChain::new(
            vec![0, 1],
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            vec![0.5, 0.5],
        )
        .unwrap()
    }

    fn cycle3() -> MarkovChain {
        MarkovChain::new(
            vec![0, 1, 2],
            vec![
                vec![0.0, 1.0, 0.0],
                vec![0.0, 0.0, 1.0],
                vec![1.0, 0.0, 0.0],
            ],
            vec![1.0, 0.0, 0.0],
        )
        .unwrap()
    }

    #[test]
    fn small_examples() {
        let s = stationary(&MarkovChain::uniform_iid(2)).unwrap();
        assert!((s.mass[0] - 0.5).abs() < 1e-12);
        let s = stationary(&two_state()).unwrap();
        assert!((s.mass[0] - 5.0 / 6.0).abs() < 1e-12);
        assert!((s.mass[1] - 1.0 / 6.0).abs() < 1e-12);
        assert!(s.residual <= 1e-10);
        let s = stationary(&cycle3()).unwrap();
        assert!(s.mass.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-12));
    }

    #[test]
    fn power_iteration_matches_direct_solve() {
        let chain = two_state();
        let direct = direct_solve(&chain, &[0, 1]);
        let power = power_iteration(&chain, &[0, 1]);
        for (a, b) in direct.iter().zip(&power) {
            assert!((a - b).abs() < 1e-10);
        }
        let power = power_iteration(&cycle3(), &[0, 1, 2]);
        assert!(power.iter().all(|&p| (p - 1.0 / 3.0).abs() < 1e-10));
    }

    #[test]
    fn transient_states_carry_no_mass() {
        let chain = MarkovChain::new(
            vec![0, 1, 2],
            vec![
                vec![0.5, 0.25, 0.25],
                vec![0.0, 0.5, 0.5],
                vec![0.0, 0.5, 0.5],
            ],
            vec![1.0, 0.0, 0.0],
        )
        .unwrap();
        let s = stationary(&chain).unwrap();
        assert_eq!(s.mass[0], 0.0);
        assert!(s.mass[1] > 0.0 && s.mass[2] > 0.0);
    }

    #[test]
    fn reversal() {
        let r = reverse_chain(&MarkovChain::uniform_iid(2)).unwrap();
        assert_eq!(r.transition(), MarkovChain::uniform_iid(2).transition());
        let r = reverse_chain(&cycle3()).unwrap();
        assert_eq!(r.m(0, 2), 1.0);
        assert_eq!(r.m(2, 1), 1.0);
        let r = reverse_chain(&two_state()).unwrap();
        assert!((r.m(0, 1) - 0.1).abs() < 1e-12);
    }
}

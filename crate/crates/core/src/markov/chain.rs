use serde::{Deserialize, Serialize};

use super::MarkovError;
use crate::words::Letter;

pub(crate) const STOCHASTIC_TOL: f64 = 1e-12;

/// A finite Markov chain over letters, stored row-stochastically:
/// `transition[s][t]` is the probability that letter `states[t]` follows
/// letter `states[s]`. A distribution `ν` is propagated as
/// `ν'(x) = Σ_y ν(y)·M(y,x)`.
///
/// `states` is strictly increasing, so state indices follow letter order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ChainSpec", into = "ChainSpec")]
pub struct MarkovChain {
    states: Vec<Letter>,
    transition: Vec<Vec<f64>>,
    initial: Vec<f64>,
}

/// On-disk form of a chain.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainSpec {
    pub states: Vec<Letter>,
    pub transition: Vec<Vec<f64>>,
    pub initial: Vec<f64>,
}

impl TryFrom<ChainSpec> for MarkovChain {
    type Error = MarkovError;

    fn try_from(spec: ChainSpec) -> Result<Self, Self::Error> {
        MarkovChain::new(spec.states, spec.transition, spec.initial)
    }
}

impl From<MarkovChain> for ChainSpec {
    fn from(chain: MarkovChain) -> Self {
        ChainSpec {
            states: chain.states,
            transition: chain.transition,
            initial: chain.initial,
        }
    }
}

fn invalid(reason: String) -> MarkovError {
    MarkovError::InvalidChain(reason)
}

fn check_distribution(what: &str, masses: &[f64]) -> Result<(), MarkovError> {
    for (j, &p) in masses.iter().enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(invalid(format!("{what}, entry {j}: {p} is not in [0, 1]")));
        }
    }
    let sum: f64 = masses.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(invalid(format!("{what} sums to {sum}, not 1")));
    }
    Ok(())
}

impl MarkovChain {
    pub fn new(
        states: Vec<Letter>,
        transition: Vec<Vec<f64>>,
        initial: Vec<f64>,
    ) -> Result<Self, MarkovError> {
        let n = states.len();
        if n == 0 {
            return Err(invalid("chain has no states".into()));
        }
        if let Some(i) = (1..n).find(|&i| states[i - 1] >= states[i]) {
            return Err(invalid(format!(
                "states must be strictly increasing, but state {i} is {} after {}",
                states[i],
                states[i - 1]
            )));
        }
        if transition.len() != n {
            return Err(invalid(format!(
                "transition has {} rows for {n} states",
                transition.len()
            )));
        }
        for (i, row) in transition.iter().enumerate() {
            if row.len() != n {
                return Err(invalid(format!(
                    "transition row {i} has {} entries for {n} states",
                    row.len()
                )));
            }
            check_distribution(&format!("transition row {i}"), row)?;
        }
        if initial.len() != n {
            return Err(invalid(format!(
                "initial has {} entries for {n} states",
                initial.len()
            )));
        }
        check_distribution("initial distribution", &initial)?;
        Ok(Self {
            states,
            transition,
            initial,
        })
    }

    /// Letters `0..law.len()` drawn independently from `law`.
    pub fn iid(law: &[f64]) -> Result<Self, MarkovError> {
        let states = (0..law.len() as Letter).collect();
        Self::new(states, vec![law.to_vec(); law.len()], law.to_vec())
    }

    pub fn uniform_iid(m: usize) -> Self {
        Self::iid(&vec![1.0 / m as f64; m]).expect("uniform law is valid")
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Letter] {
        &self.states
    }

    pub fn transition(&self) -> &[Vec<f64>] {
        &self.transition
    }

    pub fn initial(&self) -> &[f64] {
        &self.initial
    }

    pub fn m(&self, s: usize, t: usize) -> f64 {
        self.transition[s][t]
    }

    /// One step of `ν ↦ νM`.
    pub fn propagate(&self, nu: &[f64]) -> Vec<f64> {
        let n = self.len();
        let mut out = vec![0.0; n];
        for (y, &mass) in nu.iter().enumerate() {
            if mass != 0.0 {
                for (x, o) in out.iter_mut().enumerate() {
                    *o += mass * self.transition[y][x];
                }
            }
        }
        out
    }

    /// `M⁺(x) = Σ_{y > x} M(x, y)`.
    pub fn m_plus(&self, x: usize) -> f64 {
        self.transition[x][x + 1..].iter().sum()
    }

    /// `M⁻(x) = Σ_{y < x} M(x, y)`.
    pub fn m_minus(&self, x: usize) -> f64 {
        self.transition[x][..x].iter().sum()
    }

    /// The chain with the same transitions but another initial law.
    pub fn with_initial(&self, initial: Vec<f64>) -> Result<Self, MarkovError> {
        Self::new(self.states.clone(), self.transition.clone(), initial)
    }

    /// The chain restricted to a closed set of state indices (ascending).
    pub(crate) fn restrict(
        &self,
        members: &[usize],
        initial: Vec<f64>,
    ) -> Result<Self, MarkovError> {
        let states = members.iter().map(|&i| self.states[i]).collect();
        let transition = members
            .iter()
            .map(|&i| {
                let row: Vec<f64> = members.iter().map(|&j| self.transition[i][j]).collect();
                let sum: f64 = row.iter().sum();
                row.into_iter().map(|p| p / sum).collect()
            })
            .collect();
        Self::new(states, transition, initial)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validation_names_the_offender() {
        let err = MarkovChain::new(
            vec![0, 1],
            vec![vec![0.5, 0.5], vec![0.7, 0.2]],
            vec![1.0, 0.0],
        )
        .unwrap_err();
        assert!(err.to_string().contains("row 1"), "{err}");
        let err = MarkovChain::new(
            vec![0, 1],
            vec![vec![1.5, -0.5], vec![0.5, 0.5]],
            vec![1.0, 0.0],
        )
        .unwrap_err();
        assert!(err.to_string().contains("entry 0"), "{err}");
        let err = MarkovChain::new(
            vec![1, 1],
            vec![vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![1.0, 0.0],
        )
        .unwrap_err();
        assert!(err.to_string().contains("strictly increasing"), "{err}");
        assert!(MarkovChain::new(vec![0], vec![vec![1.0]], vec![0.9]).is_err());
    }

    #[test]
    fn json_round_trip() {
        let chain = MarkovChain::iid(&[0.25, 0.75]).unwrap();
        let text = serde_json::to_string(&chain).unwrap();
        assert_eq!(serde_json::from_str::<MarkovChain>(&text).unwrap(), chain);
        let bad = r#"{"states":[0,1],"transition":[[1.0,0.0]],"initial":[1.0,0.0]}"#;
        assert!(serde_json::from_str::<MarkovChain>(bad).is_err());
    }

    #[test]
    fn propagation_uses_the_row_convention() {
        let chain = MarkovChain::new(
            vec![0, 1],
            vec![vec![0.9, 0.1], vec![0.5, 0.5]],
            vec![1.0, 0.0],
        )
        .unwrap();
        let next = chain.propagate(&[1.0, 0.0]);
        assert!((next[0] - 0.9).abs() < 1e-15 && (next[1] - 0.1).abs() < 1e-15);
        assert_eq!(chain.m_plus(0), 0.1);
        assert_eq!(chain.m_minus(1), 0.5);
    }
}

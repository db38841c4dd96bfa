use nalgebra::{DMatrix, DVector};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;
use serde::{Deserialize, Serialize};

use super::{MarkovChain, MarkovError};

/// Terminal strongly connected components (state indices, ascending; the
/// components sorted by smallest member) and the probability of ending in
/// each of them from the chain's initial law.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TerminalDecomposition {
    pub components: Vec<Vec<usize>>,
    pub absorb_prob: Vec<f64>,
    /// Filled by [`decompose`]; empty from [`terminal_components`].
    pub per_component_gamma1: Vec<f64>,
}

pub fn terminal_components(chain: &MarkovChain) -> TerminalDecomposition {
    let components = terminal_sets(chain);
    let absorb_prob = absorption(chain, &components);
    TerminalDecomposition {
        components,
        absorb_prob,
        per_component_gamma1: Vec::new(),
    }
}

pub(crate) fn terminal_sets(chain: &MarkovChain) -> Vec<Vec<usize>> {
    let n = chain.len();
    let mut graph = DiGraph::<(), ()>::with_capacity(n, n * n);
    let nodes: Vec<_> = (0..n).map(|_| graph.add_node(())).collect();
    for i in 0..n {
        for j in 0..n {
            if chain.m(i, j) > 0.0 {
                graph.add_edge(nodes[i], nodes[j], ());
            }
        }
    }
    let mut component_of = vec![0usize; n];
    let sccs = tarjan_scc(&graph);
    for (c, scc) in sccs.iter().enumerate() {
        for node in scc {
            component_of[node.index()] = c;
        }
    }
    let mut terminal: Vec<Vec<usize>> = sccs
        .iter()
        .enumerate()
        .filter(|(c, scc)| {
            scc.iter().all(|node| {
                let i = node.index();
                (0..n).all(|j| chain.m(i, j) == 0.0 || component_of[j] == *c)
            })
        })
        .map(|(_, scc)| {
            let mut members: Vec<usize> = scc.iter().map(|node| node.index()).collect();
            members.sort_unstable();
            members
        })
        .collect();
    terminal.sort();
    terminal
}

/// First-step analysis: `h = M_TT h + M_T,c 1` on transient states `T`.
fn absorption(chain: &MarkovChain, components: &[Vec<usize>]) -> Vec<f64> {
    let n = chain.len();
    let mut owner = vec![None; n];
    for (c, members) in components.iter().enumerate() {
        for &i in members {
            owner[i] = Some(c);
        }
    }
    let transient: Vec<usize> = (0..n).filter(|&i| owner[i].is_none()).collect();
    let mut probs: Vec<f64> = components
        .iter()
        .map(|members| members.iter().map(|&i| chain.initial()[i]).sum())
        .collect();
    if transient.is_empty() {
        return probs;
    }
    let t = transient.len();
    let mut a = DMatrix::<f64>::identity(t, t);
    for (r, &i) in transient.iter().enumerate() {
        for (s, &j) in transient.iter().enumerate() {
            a[(r, s)] -= chain.m(i, j);
        }
    }
    let lu = a.lu();
    for (c, members) in components.iter().enumerate() {
        let b = DVector::from_iterator(
            t,
            transient
                .iter()
                .map(|&i| members.iter().map(|&j| chain.m(i, j)).sum::<f64>()),
        );
        let h = lu.solve(&b).expect("transient block is invertible");
        probs[c] += transient
            .iter()
            .enumerate()
            .map(|(r, &i)| chain.initial()[i] * h[r])
            .sum::<f64>();
    }
    probs
}

/// The unique terminal component, or an error naming how many there are.
pub(crate) fn single_terminal(chain: &MarkovChain) -> Result<Vec<usize>, MarkovError> {
    let mut sets = terminal_sets(chain);
    if sets.len() != 1 {
        return Err(MarkovError::MultipleTerminalComponents(sets.len()));
    }
    Ok(sets.pop().unwrap())
}

/// Terminal decomposition together with `γ₁` inside each component. The
/// limit ratio of a word is then the mixture taking value
/// `per_component_gamma1[i]` with probability `absorb_prob[i]`.
pub fn decompose(
    chain: &MarkovChain,
    direction: super::Direction,
) -> Result<TerminalDecomposition, MarkovError> {
    let mut decomposition = terminal_components(chain);
    decomposition.per_component_gamma1 = decomposition
        .components
        .iter()
        .map(|members| {
            let uniform = vec![1.0 / members.len() as f64; members.len()];
            let restricted = chain.restrict(members, uniform)?;
            super::gamma1(&restricted, direction)
        })
        .collect::<Result<_, _>>()?;
    Ok(decomposition)
}

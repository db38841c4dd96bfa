use super::chain::STOCHASTIC_TOL;
use super::MarkovError;

pub(crate) fn validate_law(law: &[f64]) -> Result<(), MarkovError> {
    if law.is_empty() {
        return Err(MarkovError::InvalidLaw("law has no letters".into()));
    }
    if let Some((i, p)) = law
        .iter()
        .enumerate()
        .find(|(_, p)| !(0.0..=1.0).contains(*p))
    {
        return Err(MarkovError::InvalidLaw(format!(
            "mass {p} of letter {i} is not in [0, 1]"
        )));
    }
    let sum: f64 = law.iter().sum();
    if (sum - 1.0).abs() > STOCHASTIC_TOL {
        return Err(MarkovError::InvalidLaw(format!(
            "masses sum to {sum}, not 1"
        )));
    }
    Ok(())
}

/// `γ₁ = Σ_b p_b·P(X > b)² / (1 − p_b)` for letters drawn independently
/// from `law`. A law concentrated on one letter is rejected: its words never
/// have locally minimal indices and the formula degenerates.
pub fn gamma1_iid(law: &[f64]) -> Result<f64, MarkovError> {
    validate_law(law)?;
    if law.iter().filter(|&&p| p > 0.0).count() < 2 {
        return Err(MarkovError::DegenerateLaw);
    }
    let mut above: f64 = law.iter().sum();
    let mut total = 0.0;
    for &p in law {
        above -= p;
        if p > 0.0 {
            let tail = above.max(0.0);
            total += p * tail * tail / (1.0 - p);
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::markov::{gamma1, Direction, MarkovChain};

    #[test]
    fn closed_forms() {
        for m in 2..=64 {
            let law = vec![1.0 / m as f64; m];
            let expected = 1.0 / 3.0 - 1.0 / (6.0 * m as f64);
            assert!(
                (gamma1_iid(&law).unwrap() - expected).abs() < 1e-12,
                "m = {m}"
            );
        }
        assert!((gamma1_iid(&[0.3, 0.7]).unwrap() - 0.21).abs() < 1e-12);
        assert!((gamma1_iid(&[0.375, 0.25, 0.375]).unwrap() - 0.28125).abs() < 1e-12);
        assert_eq!(gamma1_iid(&[0.0, 1.0]), Err(MarkovError::DegenerateLaw));
        assert!(gamma1_iid(&[0.5, 0.6]).is_err());
    }

    #[test]
    fn agrees_with_the_chain_formula() {
        let laws: [&[f64]; 3] = [&[0.1, 0.2, 0.3, 0.4], &[0.5, 0.0, 0.5], &[0.05, 0.9, 0.05]];
        for law in laws {
            let chain = MarkovChain::iid(law).unwrap();
            let exact = gamma1_iid(law).unwrap();
            for direction in [Direction::RightToLeft, Direction::LeftToRight] {
                assert!((gamma1(&chain, direction).unwrap() - exact).abs() < 1e-12);
            }
        }
    }
}

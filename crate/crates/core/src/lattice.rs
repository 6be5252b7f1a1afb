//! Deciding `X ≫ A` (cellularity) and `X > A` (acyclicity) for perfect
//! complexes.
//!
//! A non-contractible `X` generates the same cellular class as `Σ^i E_j` for
//! its lex-least interval `(i, j)`, and among generators `Σ^{i'} E_{j'} ≫ Σ^i E_j`
//! iff `(i, j) ≤ (i', j')` lexicographically. The only prime of `R` is `m`, so
//! the support criterion for acyclicity reduces to comparing the bottom degrees
//! of the minimal models.

use serde::Serialize;

use crate::complex::ChainComplex;
use crate::error::Result;
use crate::reduce::{decompose, Interval};

/// Lex-least interval of a non-contractible complex.
pub type MinimalPair = Interval;

/// Which branch of a decision procedure fired.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Rule {
    /// `X` is contractible, hence in every class.
    XContractible,
    /// `A` is contractible and `X` is not.
    AContractible,
    /// Lex comparison of minimal pairs.
    Lex,
    /// Bottom-degree comparison of minimal models.
    Support,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub holds: bool,
    pub rule: Rule,
    pub min_pair_x: Option<MinimalPair>,
    pub min_pair_a: Option<MinimalPair>,
    /// Bottom degree of the minimal model; only set by [`is_acyclic_over`].
    pub beta_x: Option<usize>,
    pub beta_a: Option<usize>,
}

impl Verdict {
    /// Re-derive `holds` from the trace.
    pub fn replay(&self) -> bool {
        match self.rule {
            Rule::XContractible => true,
            Rule::AContractible => false,
            Rule::Lex => match (self.min_pair_a, self.min_pair_x) {
                (Some(a), Some(x)) => a <= x,
                _ => false,
            },
            Rule::Support => match (self.beta_x, self.beta_a) {
                (Some(bx), Some(ba)) => bx >= ba,
                _ => false,
            },
        }
    }

    /// One-line explanation for humans.
    pub fn explain(&self) -> String {
        let pair = |p: Option<MinimalPair>| match p {
            Some(iv) => format!("({}, {})", iv.i, iv.j),
            None => "contractible".to_string(),
        };
        match self.rule {
            Rule::XContractible => "X is contractible, so it lies in every class".into(),
            Rule::AContractible => "A is contractible but X is not".into(),
            Rule::Lex => format!(
                "min pair of A {} {} min pair of X {}",
                pair(self.min_pair_a),
                if self.holds { "≤" } else { "≰" },
                pair(self.min_pair_x)
            ),
            Rule::Support => format!(
                "bottom degree of X {} {} bottom degree of A {}",
                self.beta_x.unwrap_or_default(),
                if self.holds { "≥" } else { "<" },
                self.beta_a.unwrap_or_default()
            ),
        }
    }
}

/// Lex-least interval of `decompose(x)`, or `None` when `x` is contractible.
pub fn min_pair(x: &ChainComplex) -> Result<Option<MinimalPair>> {
    // intervals come sorted by (i, j)
    Ok(decompose(x)?.intervals.first().copied())
}

/// Decides `X ≫ A`.
pub fn is_cellular(x: &ChainComplex, a: &ChainComplex) -> Result<Verdict> {
    x.ring().ensure_same(&a.ring())?;
    let (px, pa) = (min_pair(x)?, min_pair(a)?);
    let (holds, rule) = match (px, pa) {
        (None, _) => (true, Rule::XContractible),
        (Some(_), None) => (false, Rule::AContractible),
        (Some(px), Some(pa)) => (pa <= px, Rule::Lex),
    };
    Ok(Verdict {
        holds,
        rule,
        min_pair_x: px,
        min_pair_a: pa,
        beta_x: None,
        beta_a: None,
    })
}

/// Decides `X > A`.
pub fn is_acyclic_over(x: &ChainComplex, a: &ChainComplex) -> Result<Verdict> {
    x.ring().ensure_same(&a.ring())?;
    let (px, pa) = (min_pair(x)?, min_pair(a)?);
    // The bottom degree of a minimal model is the start of its lex-least interval.
    let (bx, ba) = (px.map(|p| p.i), pa.map(|p| p.i));
    let (holds, rule) = match (bx, ba) {
        (None, _) => (true, Rule::XContractible),
        (Some(_), None) => (false, Rule::AContractible),
        (Some(bx), Some(ba)) => (bx >= ba, Rule::Support),
    };
    Ok(Verdict {
        holds,
        rule,
        min_pair_x: px,
        min_pair_a: pa,
        beta_x: bx,
        beta_a: ba,
    })
}

/// `Σ^{i2} E_{j2} ≫ Σ^{i} E_{j}` iff `(i, j) ≤ (i2, j2)`.
pub fn generator_relation(i: usize, j: usize, i2: usize, j2: usize) -> bool {
    (i, j) <= (i2, j2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ops::direct_sum;
    use crate::ring::RingSpec;

    fn z4() -> RingSpec {
        RingSpec::zpsq(2).unwrap()
    }

    #[test]
    fn min_pair_examples() {
        let spec = z4();
        let e = |i, j| ChainComplex::interval(spec, i, j);
        let x = direct_sum(&e(0, 2), &e(1, 0)).unwrap();
        assert_eq!(min_pair(&x).unwrap(), Some(Interval::new(0, 2)));
        assert_eq!(min_pair(&ChainComplex::disk(spec, 1).unwrap()).unwrap(), None);
        let x = direct_sum(&e(1, 0), &e(1, 3)).unwrap();
        assert_eq!(min_pair(&x).unwrap(), Some(Interval::new(1, 0)));
    }

    #[test]
    fn cellular_examples() {
        let spec = z4();
        let e = |i, j| ChainComplex::interval(spec, i, j);
        assert!(is_cellular(&e(0, 2), &e(0, 1)).unwrap().holds);
        assert!(!is_cellular(&e(0, 0), &e(0, 1)).unwrap().holds);
        let s1 = ChainComplex::sphere(spec, 1);
        assert!(!is_cellular(&ChainComplex::sphere(spec, 0), &s1).unwrap().holds);
        let v = is_cellular(&ChainComplex::disk(spec, 1).unwrap(), &s1).unwrap();
        assert!(v.holds);
        assert_eq!(v.rule, Rule::XContractible);
    }

    #[test]
    fn acyclic_examples() {
        let spec = z4();
        let e = |i, j| ChainComplex::interval(spec, i, j);
        assert!(is_acyclic_over(&e(0, 0), &e(0, 1)).unwrap().holds);
        let (s0, s1) = (ChainComplex::sphere(spec, 0), ChainComplex::sphere(spec, 1));
        assert!(is_acyclic_over(&s1, &s0).unwrap().holds);
        assert!(!is_acyclic_over(&s0, &s1).unwrap().holds);
        let v = is_acyclic_over(&s0, &ChainComplex::empty(spec)).unwrap();
        assert_eq!((v.holds, v.rule), (false, Rule::AContractible));
    }

    #[test]
    fn generator_order() {
        assert!(generator_relation(0, 1, 0, 2));
        assert!(!generator_relation(1, 0, 0, 5));
        assert!(generator_relation(0, 2, 0, 2));
    }

    #[test]
    fn ring_mismatch() {
        let a = ChainComplex::sphere(z4(), 0);
        let b = ChainComplex::sphere(RingSpec::dual(2).unwrap(), 0);
        assert!(is_cellular(&a, &b).is_err());
    }

    #[test]
    fn traces_replay() {
        let spec = z4();
        let e = |i, j| ChainComplex::interval(spec, i, j);
        for (x, a) in [(e(0, 2), e(0, 1)), (e(0, 0), e(0, 1)), (e(2, 0), e(1, 3))] {
            let v = is_cellular(&x, &a).unwrap();
            assert_eq!(v.replay(), v.holds);
            let v = is_acyclic_over(&x, &a).unwrap();
            assert_eq!(v.replay(), v.holds);
        }
    }
}

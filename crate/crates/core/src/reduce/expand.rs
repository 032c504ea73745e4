use num::bigint::BigInt;
use num::integer::Integer;
use num::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::Q;

pub const DEFAULT_COPY_CAP: usize = 10_000;

/// Scenario replication making a distribution uniform: scenario `s` gets
/// `counts[s]` copies, proportional to its probability.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Expansion {
    pub counts: Vec<usize>,
    /// `copy_source[k]` is the scenario that copy `k` replicates.
    pub copy_source: Vec<usize>,
}

impl Expansion {
    pub fn total(&self) -> usize {
        self.copy_source.len()
    }

    /// Probability of a single copy.
    pub fn copy_prob(&self) -> Q {
        Q::new(BigInt::one(), BigInt::from(self.total()))
    }
}

/// Exact copy counts: clear denominators, then divide out the common
/// factor. `(1/2, 3/10, 1/5)` gives `(5, 3, 2)`.
pub fn expand(probs: &[Q], cap: usize) -> Result<Expansion> {
    if probs.is_empty() {
        return Err(Error::InvalidInstance("nothing to expand".into()));
    }
    if probs.iter().any(|p| !p.is_positive()) {
        return Err(Error::InvalidInstance("expand needs positive probabilities".into()));
    }
    let lcm = probs.iter().fold(BigInt::one(), |acc, p| acc.lcm(p.denom()));
    let scaled: Vec<BigInt> = probs.iter().map(|p| (p * Q::from_integer(lcm.clone())).to_integer()).collect();
    let gcd = scaled.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    let mut counts = Vec::with_capacity(probs.len());
    let mut total = 0usize;
    for x in &scaled {
        let c = (x / &gcd).to_usize().filter(|&c| c <= cap).ok_or(Error::CapExceeded {
            what: "expanded copies",
            got: usize::MAX,
            cap,
        })?;
        total += c;
        if total > cap {
            return Err(Error::CapExceeded { what: "expanded copies", got: total, cap });
        }
        counts.push(c);
    }
    let copy_source = counts.iter().enumerate().flat_map(|(s, &c)| std::iter::repeat_n(s, c)).collect();
    Ok(Expansion { counts, copy_source })
}

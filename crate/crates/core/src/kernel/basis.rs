use crate::geometry::{binomial, MultiIndex};
use serde::{Deserialize, Serialize};

/// All monomials of degree at most `max_degree` in `n` variables, in graded
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BasisSpec {
    pub n: usize,
    pub max_degree: u32,
    pub indices: Vec<MultiIndex>,
}

impl BasisSpec {
    pub fn new(n: usize, max_degree: u32) -> Self {
        let indices = MultiIndex::graded(n, max_degree);
        debug_assert_eq!(indices.len() as f64, binomial(n as u32 + max_degree, n as u32));
        Self { n, max_degree, indices }
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        assert_eq!(BasisSpec::new(2, 12).len(), 91);
        assert_eq!(BasisSpec::new(3, 4).len(), 35);
        assert_eq!(BasisSpec::new(1, 0).len(), 1);
    }
}

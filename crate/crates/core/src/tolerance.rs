use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical resolution used when turning exact rank statements into decisions.
///
/// `merge_tol` is the max-norm distance below which two coherent points count as
/// the same point, `drop_tol` the coefficient modulus below which a term is
/// discarded, `rank_rel_tol` the relative singular-value (or Gram eigenvalue)
/// threshold, and `truncation_tol` the largest acceptable Fock tail bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub merge_tol: f64,
    pub drop_tol: f64,
    pub rank_rel_tol: f64,
    pub truncation_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            merge_tol: 1e-10,
            drop_tol: 1e-12,
            rank_rel_tol: 1e-8,
            truncation_tol: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [self.merge_tol, self.drop_tol, self.rank_rel_tol, self.truncation_tol];
        if all.iter().any(|t| !t.is_finite() || *t <= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "tolerances must be finite and strictly positive: {self:?}"
            )));
        }
        if self.rank_rel_tol >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "rank_rel_tol must be < 1, got {}",
                self.rank_rel_tol
            )));
        }
        Ok(())
    }

    pub fn with_rank_rel_tol(mut self, tol: f64) -> Self {
        self.rank_rel_tol = tol;
        self
    }

    pub fn with_merge_tol(mut self, tol: f64) -> Self {
        self.merge_tol = tol;
        self
    }
}

/// Points closer than this trigger a conditioning warning in rank reports.
pub const CONDITIONING_SEPARATION: f64 = 1e-4;

/// Largest tolerated max-norm of `T^dagger T - I` for a splitter.
pub const UNITARITY_TOL: f64 = 1e-12;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Tolerances::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Tolerances::default().with_rank_rel_tol(1.0).validate().is_err());
        assert!(Tolerances::default().with_merge_tol(0.0).validate().is_err());
        assert!(Tolerances::default().with_merge_tol(f64::NAN).validate().is_err());
    }
}

//! Capacity bounds for the exhaustive routines.

use crate::group::GroupError;

/// Environment variable overriding the group and algebra bounds.
pub const MAX_SIZE_ENV: &str = "GIRALE_MAX_SIZE";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest group materialized as a Cayley table.
    pub max_group: usize,
    /// Largest algebra for congruence and homomorphism enumeration.
    pub max_algebra: usize,
    /// Largest intermediate direct product (pushouts, algebra products).
    pub max_product: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_group: 64,
            max_algebra: 32,
            max_product: 4096,
        }
    }
}

impl Limits {
    /// Defaults, with `GIRALE_MAX_SIZE` (when set to a positive integer)
    /// replacing both the group and the algebra bound.
    pub fn from_env() -> Limits {
        let mut limits = Limits::default();
        if let Some(n) = std::env::var(MAX_SIZE_ENV)
            .ok()
            .and_then(|v| v.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
        {
            limits.max_group = n;
            limits.max_algebra = n;
            limits.max_product = limits.max_product.max(n.saturating_mul(n));
        }
        limits
    }

    pub fn check_group(&self, n: usize) -> Result<(), GroupError> {
        if n > self.max_group {
            return Err(GroupError::Capacity {
                what: "group",
                needed: n,
                limit: self.max_group,
            });
        }
        Ok(())
    }

    pub fn check_product(&self, n: usize) -> Result<(), GroupError> {
        if n > self.max_product {
            return Err(GroupError::Capacity {
                what: "direct product",
                needed: n,
                limit: self.max_product,
            });
        }
        Ok(())
    }
}

//! Resource caps for the exhaustive algorithms.
//!
//! Every audit in this crate enumerates morphisms, subsets or triples, so
//! sizes are bounded up front. Defaults can be overridden through the
//! environment variables named below.

use crate::error::{Error, Result};

/// Overrides [`Limits::max_morphisms`].
pub const ENV_MAX_MORPHISMS: &str = "GROUPOID_LOGIC_MAX_MORPHISMS";
/// Overrides [`Limits::max_scan_objects`].
pub const ENV_MAX_SCAN_OBJECTS: &str = "GROUPOID_LOGIC_MAX_SCAN_OBJECTS";

pub const DEFAULT_MAX_MORPHISMS: usize = 4096;
pub const DEFAULT_MAX_SCAN_OBJECTS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Largest |G| accepted by any constructor.
    pub max_morphisms: usize,
    /// Largest |Ω| (or lattice atom count) for scans over all subsets.
    pub max_scan_objects: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_morphisms: DEFAULT_MAX_MORPHISMS,
            max_scan_objects: DEFAULT_MAX_SCAN_OBJECTS,
        }
    }
}

impl Limits {
    /// Defaults, overridden by the environment where set and parseable.
    pub fn from_env() -> Self {
        let read = |key: &str, default: usize| {
            std::env::var(key)
                .ok()
                .and_then(|v| v.trim().parse::<usize>().ok())
                .filter(|&v| v > 0)
                .unwrap_or(default)
        };
        Limits {
            max_morphisms: read(ENV_MAX_MORPHISMS, DEFAULT_MAX_MORPHISMS),
            max_scan_objects: read(ENV_MAX_SCAN_OBJECTS, DEFAULT_MAX_SCAN_OBJECTS),
        }
    }

    pub fn check_morphisms(&self, actual: usize) -> Result<()> {
        if actual > self.max_morphisms {
            return Err(Error::Resource {
                what: "morphism count",
                limit: self.max_morphisms,
                actual,
            });
        }
        Ok(())
    }

    pub fn check_scan(&self, actual: usize) -> Result<()> {
        // the subset masks are u64, so 63 is a hard ceiling regardless of config
        let limit = self.max_scan_objects.min(63);
        if actual > limit {
            return Err(Error::Resource {
                what: "object count for exhaustive subset scan",
                limit,
                actual,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn caps() {
        let l = Limits::default();
        assert!(l.check_morphisms(4096).is_ok());
        assert!(matches!(
            l.check_morphisms(4097),
            Err(Error::Resource { limit: 4096, .. })
        ));
        assert!(l.check_scan(12).is_ok());
        assert!(l.check_scan(13).is_err());
    }
}

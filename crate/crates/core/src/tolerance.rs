//! Central tolerance and sample-count record.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Algebraic identities, Mirman residuals and eigenvalue round trips.
    pub structural: f64,
    /// Closure defects and stored-value comparison.
    pub certification: f64,
    /// Foci-sum spread on boundary samples, pentagram and Brianchon residuals.
    pub boundary: f64,
    /// Bisection width on the minor semiaxis.
    pub bisection: f64,
    /// Numerical-range boundary samples.
    pub boundary_samples: usize,
    /// λ samples for polygon families.
    pub family_samples: usize,
    /// Starting points for closure certification.
    pub closure_starts: usize,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            structural: 1e-9,
            certification: 1e-8,
            boundary: 1e-7,
            bisection: 1e-12,
            boundary_samples: 64,
            family_samples: 256,
            closure_starts: 12,
        }
    }
}

impl Tolerances {
    /// Problems with this record, empty when valid.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("structural", self.structural),
            ("certification", self.certification),
            ("boundary", self.boundary),
            ("bisection", self.bisection),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("tolerance {name} must be positive, got {v}"));
            }
        }
        for (name, v) in [
            ("boundary_samples", self.boundary_samples),
            ("family_samples", self.family_samples),
            ("closure_starts", self.closure_starts),
        ] {
            if v < 8 {
                out.push(format!("sample count {name} must be at least 8, got {v}"));
            }
        }
        out
    }
}

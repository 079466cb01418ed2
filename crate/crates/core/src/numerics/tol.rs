use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance policy shared by every module.
///
/// All thresholds are applied relative to `1 + scale`, where the scale is
/// stated by the operation that uses them (largest singular value, max entry,
/// or the norm bound of a parallelism test).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Singular-value threshold for rank and gap decisions.
    pub tau_rank: f64,
    /// Eigenvalue floor for psd tests.
    pub tau_psd: f64,
    /// Acceptance threshold for the parallelism gap.
    pub tau_par: f64,
    /// Orthogonality residual of computed frames.
    pub tau_orth: f64,
    /// Reconstruction residual of an SVD.
    pub tau_recon: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tau_rank: 1e-8,
            tau_psd: 1e-9,
            tau_par: 1e-8,
            tau_orth: 1e-10,
            tau_recon: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let all = [
            self.tau_rank,
            self.tau_psd,
            self.tau_par,
            self.tau_orth,
            self.tau_recon,
        ];
        if all.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
            return Err(Error::Config("tolerances must be finite and positive".into()));
        }
        if !(self.tau_recon < self.tau_orth && self.tau_orth < self.tau_rank) {
            return Err(Error::Config(
                "tolerances must satisfy tau_recon < tau_orth < tau_rank".into(),
            ));
        }
        Ok(())
    }

    pub fn with_par(mut self, tau_par: f64) -> Self {
        self.tau_par = tau_par;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_ordered() {
        Tolerances::default().validate().unwrap();
    }

    #[test]
    fn rejects_misordered() {
        let t = Tolerances {
            tau_orth: 1e-6,
            ..Tolerances::default()
        };
        assert!(t.validate().is_err());
        let t = Tolerances {
            tau_par: -1.0,
            ..Tolerances::default()
        };
        assert!(t.validate().is_err());
    }
}

//! Convexity exponents and constants of gauges.
//!
//! Search results follow the tagging convention of [`crate::bound`]: the
//! envelope is an inf and comes back as an upper bound, the probes are sups and
//! come back as lower bounds.

mod envelope;
mod lattice;
mod mii;

pub use envelope::{p_envelope, p_envelope_with, Decomposition, EnvelopeConfig};
pub use lattice::{
    l_convexity_probe, lattice_constant_probe, leveling_constant_probe, LConvexityWitness, LatticeMode,
};
pub use mii::{mii_check, mii_sweep, MiiReport};

use crate::error::{Error, Result};

/// Exponent `p` with `2^{1/p - 1} = kappa`.
pub fn aoki_exponent(kappa: f64) -> Result<f64> {
    if !(kappa >= 1.0 && kappa.is_finite()) {
        return Err(Error::Input(format!("modulus of concavity must be >= 1, got {kappa}")));
    }
    Ok(1.0 / (1.0 + kappa.log2()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn aoki_examples() {
        assert_eq!(aoki_exponent(1.0).unwrap(), 1.0);
        assert_eq!(aoki_exponent(2.0).unwrap(), 0.5);
        assert!((aoki_exponent(4.0).unwrap() - 1.0 / 3.0).abs() < 1e-15);
        assert!(aoki_exponent(0.5).is_err());
        assert!(aoki_exponent(f64::NAN).is_err());
    }

    #[test]
    fn aoki_round_trip() {
        for p in [1.0, 0.5, 1.0 / 3.0, 0.25] {
            let kappa = 2f64.powf(1.0 / p - 1.0);
            assert!((aoki_exponent(kappa).unwrap() - p).abs() < 1e-12);
        }
    }
}

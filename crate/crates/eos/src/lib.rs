//! Mach-parametrized polytropic equation of state.
//!
//! The family is indexed by the Mach parameter `epsilon` (the reciprocal of
//! the sound-speed scale), the adiabatic exponent `gamma`, and the specific
//! heat `c_v`. Density is a function of pressure and entropy,
//!
//! ```text
//! rho(p, S) = ((1 + eps^2 p) * exp(-S / c_v))^(1/gamma),
//! ```
//!
//! the logarithmic pressure sensitivity of the density is
//! `f_prime = eps^2 / (gamma (1 + eps^2 p))`, and the sound speed scales
//! like `1/eps`, which makes `epsilon -> 0` the incompressible limit.
//! Everything here is closed-form scalar arithmetic; no differencing is used
//! (differencing would lose the `eps^2` scale to cancellation).

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum EosError {
    #[error("Mach parameter {0} outside (0, 1]")]
    InvalidEpsilon(f64),
    #[error("adiabatic exponent {0} must be >= 1")]
    InvalidGamma(f64),
    #[error("specific heat {0} must be positive")]
    InvalidCv(f64),
    #[error("invalid thermodynamic state: 1 + eps^2 p = {0} is not positive")]
    VacuumState(f64),
    #[error("density {0} must be positive")]
    NonpositiveDensity(f64),
}

/// Parameters of the equation-of-state family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EosParams {
    pub epsilon: f64,
    pub gamma: f64,
    pub c_v: f64,
}

impl EosParams {
    /// Validated constructor: `0 < epsilon <= 1`, `gamma >= 1`, `c_v > 0`.
    pub fn new(epsilon: f64, gamma: f64, c_v: f64) -> Result<Self, EosError> {
        let p = EosParams {
            epsilon,
            gamma,
            c_v,
        };
        p.validate()?;
        Ok(p)
    }

    /// Re-check the invariants (useful after deserialization).
    pub fn validate(&self) -> Result<(), EosError> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(EosError::InvalidEpsilon(self.epsilon));
        }
        if !(self.gamma >= 1.0) {
            return Err(EosError::InvalidGamma(self.gamma));
        }
        if !(self.c_v > 0.0) {
            return Err(EosError::InvalidCv(self.c_v));
        }
        Ok(())
    }

    /// Standard diatomic-gas parameters at the given Mach parameter.
    pub fn adiabatic(epsilon: f64) -> Result<Self, EosError> {
        Self::new(epsilon, 1.4, 1.0)
    }

    /// Isothermal variant (`gamma = 1`), with a smaller sound speed at equal
    /// `epsilon`; convenient for fast tests.
    pub fn isothermal(epsilon: f64) -> Result<Self, EosError> {
        Self::new(epsilon, 1.0, 1.0)
    }

    pub fn epsilon_sq(&self) -> f64 {
        self.epsilon * self.epsilon
    }

    /// Density as a function of pressure and entropy.
    pub fn density(&self, p: f64, s: f64) -> Result<f64, EosError> {
        let base = 1.0 + self.epsilon_sq() * p;
        if base <= 0.0 {
            return Err(EosError::VacuumState(base));
        }
        Ok(self.density_unchecked(p, s))
    }

    /// `density` without the domain check; returns NaN outside the valid
    /// region (callers bound the pressure first on hot paths).
    pub fn density_unchecked(&self, p: f64, s: f64) -> f64 {
        ((1.0 + self.epsilon_sq() * p) * (-s / self.c_v).exp()).powf(1.0 / self.gamma)
    }

    /// Logarithmic sensitivity of density to pressure,
    /// `d(log rho)/dp = eps^2 / (gamma (1 + eps^2 p))`.
    /// Entropy does not enter; the argument is kept for signature symmetry.
    pub fn f_prime(&self, p: f64, _s: f64) -> Result<f64, EosError> {
        let base = 1.0 + self.epsilon_sq() * p;
        if base <= 0.0 {
            return Err(EosError::VacuumState(base));
        }
        Ok(self.epsilon_sq() / (self.gamma * base))
    }

    /// `f_prime` without the domain check (hot paths).
    pub fn f_prime_unchecked(&self, p: f64) -> f64 {
        self.epsilon_sq() / (self.gamma * (1.0 + self.epsilon_sq() * p))
    }

    /// Reciprocal of `f_prime`: `gamma (1 + eps^2 p) / eps^2`, linear in the
    /// pressure (no division), defined for every pressure.
    pub fn inv_f_prime(&self, p: f64) -> f64 {
        self.gamma * (1.0 + self.epsilon_sq() * p) / self.epsilon_sq()
    }

    /// Sound speed `sqrt(dp/drho)` at the given state; scales like `1/eps`.
    pub fn sound_speed(&self, p: f64, s: f64) -> Result<f64, EosError> {
        let rho = self.density(p, s)?;
        Ok(self.gamma.sqrt() / self.epsilon
            * rho.powf(0.5 * (self.gamma - 1.0))
            * (0.5 * s / self.c_v).exp())
    }

    /// Invert the density relation for the pressure at given entropy:
    /// `p = (rho^gamma * exp(S/c_v) - 1) / eps^2`.
    pub fn pressure_of(&self, rho: f64, s: f64) -> Result<f64, EosError> {
        if rho <= 0.0 {
            return Err(EosError::NonpositiveDensity(rho));
        }
        Ok((rho.powf(self.gamma) * (s / self.c_v).exp() - 1.0) / self.epsilon_sq())
    }
}

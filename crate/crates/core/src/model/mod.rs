//! Physical parameters, thermal baths, drive/coupling converters and regime checks.

pub mod config;
mod params;
mod regime;

pub use params::{CouplingDerivation, SystemParams, ThermalOccupations};
pub use regime::{validate_regime, RegimeWarning};

use crate::error::{Error, Result};

/// CODATA constants, SI units.
pub mod constants {
    pub const HBAR: f64 = 1.054571817e-34;
    pub const KB: f64 = 1.380649e-23;
    pub const EPS0: f64 = 8.8541878128e-12;
    pub const TWO_PI: f64 = std::f64::consts::TAU;
}

use constants::{EPS0, HBAR, KB};

/// Bose-Einstein occupation `1 / (exp(ħω / k_B T) - 1)`; zero at `T = 0`.
pub fn thermal_occupation(omega: f64, temperature: f64) -> Result<f64> {
    if !(omega > 0.0) || !omega.is_finite() {
        return Err(Error::invalid("omega", format!("must be > 0, got {omega}")));
    }
    if !(temperature >= 0.0) {
        return Err(Error::invalid("T", format!("must be >= 0, got {temperature}")));
    }
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega / (KB * temperature);
    Ok(1.0 / x.exp_m1())
}

/// A drive rate that may be switched off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Drive {
    Off,
    Rabi(f64),
}

impl Drive {
    pub fn rate(self) -> f64 {
        match self {
            Drive::Off => 0.0,
            Drive::Rabi(r) => r,
        }
    }
}

/// Cavity drive rate `sqrt(2 P κ_a / (ħ ω_l))`.
pub fn rabi_from_power(power: f64, kappa_a: f64, omega_l: f64) -> Result<Drive> {
    if !(power >= 0.0) {
        return Err(Error::invalid("P", format!("must be >= 0, got {power}")));
    }
    if !(kappa_a > 0.0) {
        return Err(Error::invalid("kappa_a", "must be > 0"));
    }
    if !(omega_l > 0.0) {
        return Err(Error::invalid("omega_l", "must be > 0"));
    }
    if power == 0.0 {
        return Ok(Drive::Off);
    }
    Ok(Drive::Rabi((2.0 * power * kappa_a / (HBAR * omega_l)).sqrt()))
}

/// Magnon drive rate `(√5 / 4) Γ sqrt(ρ V_s) B0`.
pub fn rabi_from_field(cd: &CouplingDerivation) -> Result<Drive> {
    if !(cd.rho_spin > 0.0) {
        return Err(Error::invalid("rho_spin", "must be > 0"));
    }
    if !(cd.v_sphere > 0.0) {
        return Err(Error::invalid("V_sphere", "must be > 0"));
    }
    if !(cd.b0 >= 0.0) {
        return Err(Error::invalid("B0", "must be >= 0"));
    }
    if cd.b0 == 0.0 {
        return Ok(Drive::Off);
    }
    Ok(Drive::Rabi(
        5f64.sqrt() / 4.0 * cd.gamma_gyro * cd.n_spins().sqrt() * cd.b0,
    ))
}

/// Single-atom coupling `ν sqrt(ω₁ / (2 ħ ε₀ V))`.
pub fn single_atom_coupling(cd: &CouplingDerivation, omega_1: f64) -> Result<f64> {
    if !(cd.v_cav > 0.0) {
        return Err(Error::invalid("V_cav", "must be > 0"));
    }
    if !(omega_1 > 0.0) {
        return Err(Error::invalid("omega_1", "must be > 0"));
    }
    Ok(cd.nu * (omega_1 / (2.0 * HBAR * EPS0 * cd.v_cav)).sqrt())
}

/// Collective atom-cavity coupling `g sqrt(N)`.
pub fn collective_coupling(cd: &CouplingDerivation, omega_1: f64) -> Result<f64> {
    if !(cd.n_atoms >= 0.0) {
        return Err(Error::invalid("N_atoms", "must be >= 0"));
    }
    Ok(single_atom_coupling(cd, omega_1)? * cd.n_atoms.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use constants::TWO_PI;

    #[test]
    fn zero_temperature_is_exact_zero() {
        assert_eq!(thermal_occupation(TWO_PI * 1e3, 0.0).unwrap(), 0.0);
        assert_eq!(thermal_occupation(TWO_PI * 1e10, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn thermal_occupation_rejects_non_positive_frequency() {
        assert!(thermal_occupation(0.0, 0.01).is_err());
        assert!(thermal_occupation(-1.0, 0.01).is_err());
        assert!(thermal_occupation(1.0, -0.01).is_err());
    }

    #[test]
    fn thermal_occupation_is_monotone() {
        let temps: Vec<f64> = (1..60).map(|k| k as f64 * 5e-3).collect();
        let freqs: Vec<f64> = (1..60).map(|k| TWO_PI * 1e6 * k as f64 * 7.0).collect();
        for &w in &freqs {
            for pair in temps.windows(2) {
                assert!(thermal_occupation(w, pair[1]).unwrap() > thermal_occupation(w, pair[0]).unwrap());
            }
        }
        for &t in &temps {
            for pair in freqs.windows(2) {
                assert!(thermal_occupation(pair[1], t).unwrap() < thermal_occupation(pair[0], t).unwrap());
            }
        }
    }

    #[test]
    fn rabi_from_power_scales_as_sqrt() {
        let a = rabi_from_power(1e-3, TWO_PI * 1e6, TWO_PI * 1e10).unwrap().rate();
        let b = rabi_from_power(4e-3, TWO_PI * 1e6, TWO_PI * 1e10).unwrap().rate();
        assert!((b / a - 2.0).abs() < 1e-14);
        assert_eq!(rabi_from_power(0.0, 1.0, 1.0).unwrap(), Drive::Off);
        assert!(rabi_from_power(-1.0, 1.0, 1.0).is_err());
        assert!(rabi_from_power(1.0, 0.0, 1.0).is_err());
        assert!(rabi_from_power(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn rabi_from_field_scalings() {
        let p = SystemParams::defaults();
        let mut cd = CouplingDerivation::yig_defaults(&p);
        let a = rabi_from_field(&cd).unwrap().rate();
        cd.v_sphere *= 4.0;
        let b = rabi_from_field(&cd).unwrap().rate();
        assert!((b / a - 2.0).abs() < 1e-14);
        cd.b0 = 0.0;
        assert_eq!(rabi_from_field(&cd).unwrap(), Drive::Off);
        cd.rho_spin = 0.0;
        assert!(rabi_from_field(&cd).is_err());
    }

    #[test]
    fn collective_coupling_scalings() {
        let p = SystemParams::defaults();
        let mut cd = CouplingDerivation::yig_defaults(&p);
        let g = collective_coupling(&cd, p.omega_c1).unwrap();
        assert!((g / p.g_ae - 1.0).abs() < 1e-12);
        cd.n_atoms *= 4.0;
        assert!((collective_coupling(&cd, p.omega_c1).unwrap() / g - 2.0).abs() < 1e-14);
        cd.nu = 0.0;
        assert_eq!(collective_coupling(&cd, p.omega_c1).unwrap(), 0.0);
        cd.v_cav = 0.0;
        assert!(collective_coupling(&cd, p.omega_c1).is_err());
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::constants::TWO_PI;

/// Physical rates, detunings, couplings and drives of the two-cavity system.
///
/// Every rate is an angular frequency in rad/s; `temperature` is in kelvin.
/// Detunings are measured from the common drive frequency.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega_c1: f64,
    pub omega_c2: f64,
    pub omega_e: f64,
    pub omega_n: f64,
    pub omega_d: f64,
    /// Drive frequency. When present, detunings must agree with `mode - drive`.
    pub omega_l: Option<f64>,
    pub delta_1: f64,
    pub delta_2: f64,
    pub delta_e: f64,
    pub delta_n: f64,
    /// Fixes the effective magnon detuning and skips the self-consistency loop.
    pub delta_n_tilde_override: Option<f64>,
    pub kappa_a: f64,
    pub kappa_n: f64,
    pub gamma_e: f64,
    pub gamma_d: f64,
    /// Magnon-photon coupling.
    pub g_na: f64,
    /// Bare magnomechanical coupling.
    pub g_nd: f64,
    /// Drive-enhanced magnomechanical coupling used in the drift matrix.
    pub g_nd_eff: f64,
    /// Collective atom-cavity coupling `g * sqrt(N)`.
    pub g_ae: f64,
    /// Cavity-cavity hopping rate.
    pub hopping: f64,
    pub drive_cavity: f64,
    pub drive_magnon: f64,
    pub temperature: f64,
}

fn hz2pi(f: f64) -> f64 {
    TWO_PI * f
}

impl SystemParams {
    /// The experimentally motivated parameter set used for every figure,
    /// with the detunings of the default operating point
    /// (`Δ̃n = 0.9 ω_d`, `J = 0.8 ω_d`, `Δe = -ω_d`, `-Δ1 = Δ2 = -ω_d`).
    pub fn defaults() -> Self {
        let omega_d = hz2pi(10e6);
        SystemParams {
            omega_c1: hz2pi(10e9),
            omega_c2: hz2pi(10e9),
            omega_e: hz2pi(10e9),
            omega_n: hz2pi(10e9),
            omega_d,
            omega_l: None,
            delta_1: omega_d,
            delta_2: -omega_d,
            delta_e: -omega_d,
            delta_n: 0.9 * omega_d,
            delta_n_tilde_override: Some(0.9 * omega_d),
            kappa_a: hz2pi(1e6),
            kappa_n: hz2pi(1e6),
            gamma_e: hz2pi(1e6),
            gamma_d: hz2pi(100.0),
            g_na: hz2pi(3.2e6),
            g_nd: hz2pi(0.2),
            g_nd_eff: hz2pi(4.8e6),
            g_ae: hz2pi(6e6),
            hopping: 0.8 * omega_d,
            drive_cavity: hz2pi(1e10),
            drive_magnon: hz2pi(1e10),
            temperature: 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [
            ("omega_c1", self.omega_c1),
            ("omega_c2", self.omega_c2),
            ("omega_e", self.omega_e),
            ("omega_n", self.omega_n),
            ("omega_d", self.omega_d),
            ("delta_1", self.delta_1),
            ("delta_2", self.delta_2),
            ("delta_e", self.delta_e),
            ("delta_n", self.delta_n),
            ("g_na", self.g_na),
            ("g_nd", self.g_nd),
            ("G_nd", self.g_nd_eff),
            ("G_ae", self.g_ae),
            ("J", self.hopping),
            ("Omega_l", self.drive_cavity),
            ("Omega_n", self.drive_magnon),
        ];
        for (name, v) in finite {
            if !v.is_finite() {
                return Err(Error::invalid(name, "must be finite"));
            }
        }
        for (name, v) in [
            ("kappa_a", self.kappa_a),
            ("kappa_n", self.kappa_n),
            ("gamma_e", self.gamma_e),
            ("gamma_d", self.gamma_d),
            ("T", self.temperature),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, format!("must be >= 0, got {v}")));
            }
        }
        if !(self.omega_d > 0.0) {
            return Err(Error::invalid("omega_d", "must be > 0"));
        }
        if let Some(dt) = self.delta_n_tilde_override {
            if !dt.is_finite() {
                return Err(Error::invalid("delta_n_tilde", "must be finite"));
            }
        }
        if let Some(wl) = self.omega_l {
            let tol = 1e-9 * self.omega_d;
            for (name, delta, omega) in [
                ("delta_1", self.delta_1, self.omega_c1),
                ("delta_2", self.delta_2, self.omega_c2),
                ("delta_e", self.delta_e, self.omega_e),
                ("delta_n", self.delta_n, self.omega_n),
            ] {
                if (delta - (omega - wl)).abs() > tol {
                    return Err(Error::invalid(
                        name,
                        format!(
                            "inconsistent with mode and drive frequencies ({delta} vs {})",
                            omega - wl
                        ),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Rescales a rate given in units of the mechanical frequency.
    pub fn in_wd(&self, x: f64) -> f64 {
        x * self.omega_d
    }

    pub fn set_detunings_wd(&mut self, d1: f64, d2: f64, dn_tilde: f64, de: f64, j: f64) {
        self.omega_l = None;
        self.delta_1 = self.in_wd(d1);
        self.delta_2 = self.in_wd(d2);
        self.delta_n_tilde_override = Some(self.in_wd(dn_tilde));
        self.delta_e = self.in_wd(de);
        self.hopping = self.in_wd(j);
    }

    /// Sets the operating point of one optimized-parameter row, coordinates in units of ω_d:
    /// `(Δ1, Δ2, Δ̃n, Δe, J)`.
    pub fn at_operating_point(&self, point: [f64; 5]) -> Self {
        let mut p = self.clone();
        p.set_detunings_wd(point[0], point[1], point[2], point[3], point[4]);
        p
    }
}

impl Default for SystemParams {
    fn default() -> Self {
        Self::defaults()
    }
}

/// Mean thermal occupations of the cavities, magnon and phonon baths.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalOccupations {
    pub z_a1: f64,
    pub z_a2: f64,
    pub z_n: f64,
    pub z_d: f64,
}

impl ThermalOccupations {
    pub fn of(p: &SystemParams) -> Result<Self> {
        use super::thermal_occupation as z;
        let t = p.temperature;
        Ok(ThermalOccupations {
            z_a1: z(p.omega_c1, t)?,
            z_a2: z(p.omega_c2, t)?,
            z_n: z(p.omega_n, t)?,
            z_d: z(p.omega_d, t)?,
        })
    }
}

/// Microscopic inputs for the optional drive-rate and coupling converters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CouplingDerivation {
    /// Atomic transition dipole moment (C·m).
    pub nu: f64,
    /// Cavity mode volume (m³).
    pub v_cav: f64,
    pub n_atoms: f64,
    /// Gyromagnetic ratio (rad/s/T).
    pub gamma_gyro: f64,
    /// Spin density (m⁻³).
    pub rho_spin: f64,
    /// Sphere volume (m³).
    pub v_sphere: f64,
    /// Magnon drive field amplitude (T).
    pub b0: f64,
    /// Cavity drive input power (W).
    pub p_drive: f64,
    pub spin_number: f64,
}

impl CouplingDerivation {
    /// YIG sphere of 250 µm diameter with an ensemble of 10⁷ atoms.
    ///
    /// The dipole moment is chosen so that `g * sqrt(N)` reproduces `g_ae` of `p`
    /// for a 1 cm³ cavity.
    pub fn yig_defaults(p: &SystemParams) -> Self {
        use super::constants::{EPS0, HBAR};
        let radius = 125e-6;
        let v_cav = 1e-6;
        let n_atoms: f64 = 1e7;
        let per_dipole = (p.omega_c1 / (2.0 * HBAR * EPS0 * v_cav)).sqrt();
        CouplingDerivation {
            nu: p.g_ae / (n_atoms.sqrt() * per_dipole),
            v_cav,
            n_atoms,
            gamma_gyro: TWO_PI * 28e9,
            rho_spin: 4.22e27,
            v_sphere: 4.0 / 3.0 * std::f64::consts::PI * radius * radius * radius,
            b0: 1e-7,
            p_drive: 1e-3,
            spin_number: 2.5,
        }
    }

    pub fn n_spins(&self) -> f64 {
        self.rho_spin * self.v_sphere
    }
}

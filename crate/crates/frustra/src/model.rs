//! Model parameters, the rescaled mean-field energy and its derivatives,
//! atomic angles and the closed-form critical couplings.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sign of the photon hopping amplitude.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum HoppingSign {
    Positive,
    Negative,
}

impl HoppingSign {
    /// Sign implied by a hopping value. Zero hopping counts as positive.
    pub fn of(jbar: f64) -> Self {
        if jbar < 0.0 {
            HoppingSign::Negative
        } else {
            HoppingSign::Positive
        }
    }

    /// Whether a hopping value is compatible with this sign.
    pub fn admits(self, jbar: f64) -> bool {
        match self {
            HoppingSign::Positive => jbar >= 0.0,
            HoppingSign::Negative => jbar <= 0.0,
        }
    }
}

/// Physical parameters of the ring. Fields are private so every value in
/// circulation has passed validation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModelParams {
    omega0: f64,
    omega: f64,
    jbar: f64,
    g: f64,
    n_sites: usize,
}

impl ModelParams {
    pub fn new(omega0: f64, omega: f64, jbar: f64, g: f64, n_sites: usize) -> Result<Self> {
        for (name, v) in [("omega0", omega0), ("omega", omega), ("jbar", jbar), ("g", g)] {
            if !v.is_finite() {
                return Err(Error::Validation(format!("{name} must be finite, got {v}")));
            }
        }
        if omega0 <= 0.0 {
            return Err(Error::Validation(format!("omega0 must be positive, got {omega0}")));
        }
        if omega <= 0.0 {
            return Err(Error::Validation(format!("omega must be positive, got {omega}")));
        }
        if g < 0.0 {
            return Err(Error::Validation(format!("g must be non-negative, got {g}")));
        }
        check_jbar(jbar)?;
        check_sites(n_sites)?;
        Ok(ModelParams { omega0, omega, jbar, g, n_sites })
    }

    /// Unit frequencies, the convention used throughout the figures.
    pub fn unit(jbar: f64, g: f64, n_sites: usize) -> Result<Self> {
        Self::new(1.0, 1.0, jbar, g, n_sites)
    }

    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn jbar(&self) -> f64 {
        self.jbar
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Ratio of atomic to cavity frequency.
    pub fn omegabar(&self) -> f64 {
        self.omega / self.omega0
    }

    /// Dimensionful hopping J = J̄ ω₀.
    pub fn hopping(&self) -> f64 {
        self.jbar * self.omega0
    }

    pub fn hopping_sign(&self) -> HoppingSign {
        HoppingSign::of(self.jbar)
    }

    pub fn critical_coupling(&self) -> Result<f64> {
        critical_point(self.jbar, self.n_sites, self.hopping_sign())
    }

    /// Signed distance from the critical point in units of g_c.
    pub fn reduced_coupling(&self) -> Result<f64> {
        let gc = self.critical_coupling()?;
        Ok((self.g - gc) / gc)
    }

    pub fn with_g(&self, g: f64) -> Result<Self> {
        Self::new(self.omega0, self.omega, self.jbar, g, self.n_sites)
    }

    pub fn with_jbar(&self, jbar: f64) -> Result<Self> {
        Self::new(self.omega0, self.omega, jbar, self.g, self.n_sites)
    }
}

fn check_jbar(jbar: f64) -> Result<()> {
    if !(jbar > -0.5 && jbar < 1.0) {
        return Err(Error::Validation(format!(
            "jbar = {jbar} lies outside the stability window (-1/2, 1)"
        )));
    }
    Ok(())
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites < 3 || n_sites.is_multiple_of(2) {
        return Err(Error::Validation(format!(
            "n_sites must be odd and at least 3, got {n_sites}"
        )));
    }
    Ok(())
}

fn check_alphas(alphas: &[f64]) -> Result<()> {
    if alphas.len() < 3 {
        return Err(Error::Domain(format!("need at least 3 sites, got {}", alphas.len())));
    }
    if let Some(bad) = alphas.iter().find(|a| !a.is_finite()) {
        return Err(Error::Domain(format!("non-finite coherence {bad}")));
    }
    Ok(())
}

fn check_scalars(g: f64, jbar: f64) -> Result<()> {
    if !g.is_finite() || !jbar.is_finite() {
        return Err(Error::Domain(format!("non-finite coupling (g = {g}, jbar = {jbar})")));
    }
    Ok(())
}

/// Mean-field ground-state energy per N_a Ω as a function of the rescaled
/// coherences, with periodic boundary conditions.
pub fn rescaled_energy(alphas: &[f64], g: f64, jbar: f64) -> Result<f64> {
    check_alphas(alphas)?;
    check_scalars(g, jbar)?;
    let n = alphas.len();
    let g2 = g * g;
    let mut e = 0.0;
    for i in 0..n {
        let a = alphas[i];
        e += a * a - 0.5 * (1.0 + 4.0 * g2 * a * a).sqrt() + 2.0 * jbar * a * alphas[(i + 1) % n];
    }
    Ok(e)
}

pub fn energy_gradient(alphas: &[f64], g: f64, jbar: f64) -> Result<Vec<f64>> {
    check_alphas(alphas)?;
    check_scalars(g, jbar)?;
    let n = alphas.len();
    let g2 = g * g;
    Ok((0..n)
        .map(|i| {
            let a = alphas[i];
            let left = alphas[(i + n - 1) % n];
            let right = alphas[(i + 1) % n];
            2.0 * a - 2.0 * g2 * a / (1.0 + 4.0 * g2 * a * a).sqrt() + 2.0 * jbar * (left + right)
        })
        .collect())
}

pub fn energy_hessian(alphas: &[f64], g: f64, jbar: f64) -> Result<DMatrix<f64>> {
    check_alphas(alphas)?;
    check_scalars(g, jbar)?;
    let n = alphas.len();
    let g2 = g * g;
    let mut h = DMatrix::zeros(n, n);
    for i in 0..n {
        let s = 1.0 + 4.0 * g2 * alphas[i] * alphas[i];
        h[(i, i)] = 2.0 - 2.0 * g2 / (s * s.sqrt());
        h[(i, (i + 1) % n)] += 2.0 * jbar;
        h[(i, (i + n - 1) % n)] += 2.0 * jbar;
    }
    Ok(h)
}

/// Analytic eigenvalues of the Hessian at the origin, indexed by lattice
/// momentum t = 0..N-1.
pub fn origin_hessian_eigenvalues(g: f64, jbar: f64, n_sites: usize) -> Vec<f64> {
    (0..n_sites)
        .map(|t| {
            let k = 2.0 * PI * t as f64 / n_sites as f64;
            2.0 * (1.0 - g * g + 2.0 * jbar * k.cos())
        })
        .collect()
}

/// Polar and azimuthal angle of the collective spin at one site.
pub fn atomic_angles_from_alpha(alpha: f64, g: f64) -> (f64, f64) {
    // atan2 keeps full precision for theta close to pi
    let theta = (2.0 * g * alpha.abs()).atan2(-1.0);
    let phi = if alpha > 0.0 { PI } else { 0.0 };
    (theta, phi)
}

/// Coupling at which the origin loses stability.
pub fn critical_point(jbar: f64, n_sites: usize, sign: HoppingSign) -> Result<f64> {
    if !jbar.is_finite() {
        return Err(Error::Validation(format!("jbar must be finite, got {jbar}")));
    }
    check_jbar(jbar)?;
    check_sites(n_sites)?;
    if !sign.admits(jbar) {
        return Err(Error::Validation(format!(
            "hopping sign {sign:?} does not match jbar = {jbar}"
        )));
    }
    let arg = match sign {
        HoppingSign::Positive => {
            let k = (n_sites - 1) as f64 * PI / n_sites as f64;
            1.0 + 2.0 * jbar * k.cos()
        }
        HoppingSign::Negative => 1.0 + 2.0 * jbar,
    };
    if arg <= 0.0 {
        return Err(Error::Instability(format!(
            "origin unstable at any coupling (jbar = {jbar}, N = {n_sites})"
        )));
    }
    Ok(arg.sqrt())
}

/// Converts a rescaled energy to energy units.
pub fn physical_energy(rescaled: f64, omega: f64, n_atoms: f64) -> f64 {
    rescaled * omega * n_atoms
}

/// A point of the mean-field landscape together with its spin angles.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanFieldConfiguration {
    pub alphas: Vec<f64>,
    pub thetas: Vec<f64>,
    pub phis: Vec<f64>,
    pub energy: f64,
}

impl MeanFieldConfiguration {
    pub fn new(alphas: Vec<f64>, g: f64, jbar: f64) -> Result<Self> {
        let energy = rescaled_energy(&alphas, g, jbar)?;
        let (thetas, phis) = alphas.iter().map(|&a| atomic_angles_from_alpha(a, g)).unzip();
        Ok(MeanFieldConfiguration { alphas, thetas, phis, energy })
    }

    pub fn n_sites(&self) -> usize {
        self.alphas.len()
    }

    /// ⟨J^x⟩/j = sin θ cos φ at every site.
    pub fn transverse_spin(&self) -> Vec<f64> {
        self.thetas
            .iter()
            .zip(&self.phis)
            .map(|(t, p)| t.sin() * p.cos())
            .collect()
    }
}

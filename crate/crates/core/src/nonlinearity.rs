//! Infection terms `H(v)` (infectives to hosts) and `G(u)` (hosts to infectives).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum Nonlinearity {
    /// `H(z) = alpha z / (1 + z)`, `G(z) = beta ln(1 + z)`.
    Saturating { alpha: f64, beta: f64 },
    /// `H(z) = c z`, `G(z) = beta ln(1 + z)`.
    Linear { c: f64, beta: f64 },
}

impl Nonlinearity {
    pub fn saturating(alpha: f64, beta: f64) -> Nonlinearity {
        Nonlinearity::Saturating { alpha, beta }
    }

    pub fn h(&self, z: f64) -> f64 {
        match *self {
            Nonlinearity::Saturating { alpha, .. } => alpha * z / (1.0 + z),
            Nonlinearity::Linear { c, .. } => c * z,
        }
    }

    pub fn g(&self, z: f64) -> f64 {
        match *self {
            Nonlinearity::Saturating { beta, .. } | Nonlinearity::Linear { beta, .. } => {
                beta * z.ln_1p()
            }
        }
    }

    pub fn dh(&self, z: f64) -> f64 {
        match *self {
            Nonlinearity::Saturating { alpha, .. } => alpha / ((1.0 + z) * (1.0 + z)),
            Nonlinearity::Linear { c, .. } => c,
        }
    }

    pub fn dg(&self, z: f64) -> f64 {
        match *self {
            Nonlinearity::Saturating { beta, .. } | Nonlinearity::Linear { beta, .. } => {
                beta / (1.0 + z)
            }
        }
    }

    /// `H'(0)`
    pub fn h_slope(&self) -> f64 {
        self.dh(0.0)
    }

    /// `G'(0)`
    pub fn g_slope(&self) -> f64 {
        self.dg(0.0)
    }

    /// Whether `H` is strictly concave (needed for algebraic decay at criticality).
    pub fn strictly_concave(&self) -> bool {
        matches!(self, Nonlinearity::Saturating { .. })
    }

    fn rates(&self) -> [f64; 2] {
        match *self {
            Nonlinearity::Saturating { alpha, beta } => [alpha, beta],
            Nonlinearity::Linear { c, beta } => [c, beta],
        }
    }

    /// Sampled check of the structural hypotheses on `(H, G)`:
    /// `H(0) = G(0) = 0`, positive derivatives, `H(z)/z` nonincreasing,
    /// `G(z)/z` strictly decreasing, and `G(H(zhat)/a) < b zhat`.
    pub fn validate(&self, a: f64, b: f64, zhat: f64) -> Result<()> {
        if self.rates().iter().any(|r| !(*r > 0.0) || !r.is_finite()) {
            return Err(Error::invalid(
                "nonlinearity rates must be positive and finite",
            ));
        }
        if self.h(0.0) != 0.0 || self.g(0.0) != 0.0 {
            return Err(Error::invalid("H(0) and G(0) must vanish"));
        }
        let grid: Vec<f64> = (0..400).map(|k| 1e-3 * 1.04f64.powi(k)).collect();
        let mut prev_h = f64::INFINITY;
        let mut prev_g = f64::INFINITY;
        for &z in &grid {
            if !(self.dh(z) > 0.0) || !(self.dg(z) > 0.0) {
                return Err(Error::invalid(format!("H' or G' not positive at z={z}")));
            }
            let hz = self.h(z) / z;
            let gz = self.g(z) / z;
            if hz > prev_h * (1.0 + 1e-14) {
                return Err(Error::invalid(format!("H(z)/z increases at z={z}")));
            }
            if !(gz < prev_g) {
                return Err(Error::invalid(format!(
                    "G(z)/z not strictly decreasing at z={z}"
                )));
            }
            prev_h = hz;
            prev_g = gz;
        }
        if !(self.g(self.h(zhat) / a) < b * zhat) {
            return Err(Error::invalid(format!(
                "G(H(zhat)/a) < b zhat fails at zhat={zhat}"
            )));
        }
        Ok(())
    }
}

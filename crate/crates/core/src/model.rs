//! Model parameters and the closed-form constants derived from them.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::nonlinearity::Nonlinearity;

/// Initial density on `[0, h0]`: positive on `[0, h0)`, zero at `h0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", deny_unknown_fields)]
pub enum InitialProfile {
    /// `A cos(pi x / (2 h0))`
    Cosine { amplitude: f64 },
    /// `A (1 - x / h0)`
    Linear { amplitude: f64 },
    /// `A` on `[0, h0 - ramp]`, then linear down to zero at `h0`.
    Plateau { amplitude: f64, ramp: f64 },
}

impl InitialProfile {
    pub fn amplitude(&self) -> f64 {
        match *self {
            InitialProfile::Cosine { amplitude }
            | InitialProfile::Linear { amplitude }
            | InitialProfile::Plateau { amplitude, .. } => amplitude,
        }
    }

    pub fn with_amplitude(self, amplitude: f64) -> InitialProfile {
        match self {
            InitialProfile::Cosine { .. } => InitialProfile::Cosine { amplitude },
            InitialProfile::Linear { .. } => InitialProfile::Linear { amplitude },
            InitialProfile::Plateau { ramp, .. } => InitialProfile::Plateau { amplitude, ramp },
        }
    }

    /// Value at `x` for an initial habitat `[0, h0]`; zero outside.
    pub fn eval(&self, x: f64, h0: f64) -> f64 {
        if !(0.0..h0).contains(&x) {
            return 0.0;
        }
        match *self {
            InitialProfile::Cosine { amplitude } => {
                amplitude * (std::f64::consts::FRAC_PI_2 * x / h0).cos()
            }
            InitialProfile::Linear { amplitude } => amplitude * (1.0 - x / h0),
            InitialProfile::Plateau { amplitude, ramp } => {
                let ramp = ramp.min(h0);
                if x <= h0 - ramp {
                    amplitude
                } else {
                    amplitude * (h0 - x) / ramp
                }
            }
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        let amp = self.amplitude();
        if !(amp > 0.0) || !amp.is_finite() {
            return Err(Error::invalid(format!(
                "{name}: amplitude must be positive"
            )));
        }
        if let InitialProfile::Plateau { ramp, .. } = self {
            if !(*ramp > 0.0) {
                return Err(Error::invalid(format!(
                    "{name}: plateau ramp must be positive"
                )));
            }
        }
        Ok(())
    }
}

/// Parameters of the one-sided free-boundary system.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub d1: f64,
    pub d2: f64,
    pub a: f64,
    pub b: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub h0: f64,
    pub kernel1: Kernel,
    pub kernel2: Kernel,
    pub nonlinearity: Nonlinearity,
    pub u0: InitialProfile,
    pub v0: InitialProfile,
}

impl ModelParams {
    /// Reference parameter set: `a = b = 1`, `H(v) = 2v/(1+v)`,
    /// `G(u) = 2 ln(1+u)`, unit Laplace kernels, `d1 = d2 = 1`, `mu1 = mu2 = 1`,
    /// `h0 = 1` and cosine initial data of amplitude 1.
    pub fn p1() -> ModelParams {
        ModelParams {
            d1: 1.0,
            d2: 1.0,
            a: 1.0,
            b: 1.0,
            mu1: 1.0,
            mu2: 1.0,
            h0: 1.0,
            kernel1: Kernel::laplace(1.0),
            kernel2: Kernel::laplace(1.0),
            nonlinearity: Nonlinearity::saturating(2.0, 2.0),
            u0: InitialProfile::Cosine { amplitude: 1.0 },
            v0: InitialProfile::Cosine { amplitude: 1.0 },
        }
    }

    /// `p1` with both diffusion rates set to `d`.
    pub fn p1_with_diffusion(d: f64) -> ModelParams {
        ModelParams {
            d1: d,
            d2: d,
            ..ModelParams::p1()
        }
    }

    /// Subcritical set: `a = b = 2`, `H'(0) = G'(0) = 1`, so `R0 = 1/4`.
    pub fn subcritical() -> ModelParams {
        ModelParams {
            a: 2.0,
            b: 2.0,
            nonlinearity: Nonlinearity::saturating(1.0, 1.0),
            ..ModelParams::p1()
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("d1", self.d1),
            ("d2", self.d2),
            ("mu1", self.mu1),
            ("mu2", self.mu2),
        ] {
            if !(v >= 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite and >= 0")));
            }
        }
        if !(self.d1 + self.d2 > 0.0) {
            return Err(Error::invalid(
                "d1 + d2 > 0 is required (d1 = d2 = 0 not allowed)",
            ));
        }
        for (name, v) in [("a", self.a), ("b", self.b), ("h0", self.h0)] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite and > 0")));
            }
        }
        let zhat = match equilibrium(self, 0.0) {
            Ok((_, v)) => 10.0 * v.max(1.0),
            Err(_) => 10.0,
        };
        self.nonlinearity.validate(self.a, self.b, zhat)?;
        self.u0.validate("u0")?;
        self.v0.validate("v0")?;
        Ok(())
    }

    pub fn r0(&self) -> f64 {
        self.nonlinearity.h_slope() * self.nonlinearity.g_slope() / (self.a * self.b)
    }

    pub fn r_star(&self) -> f64 {
        r_star(
            self.nonlinearity.h_slope() * self.nonlinearity.g_slope(),
            self.a,
            self.b,
            self.d1,
            self.d2,
        )
    }

    /// Upper bound for explicit time steps: `0.4 / (d1 + d2 + a + b + H'(0) + G'(0))`.
    pub fn stable_dt(&self) -> f64 {
        0.4 / (self.d1
            + self.d2
            + self.a
            + self.b
            + self.nonlinearity.h_slope()
            + self.nonlinearity.g_slope())
    }
}

/// `H'(0) G'(0) / ((a + d1/2)(b + d2/2))`
pub fn r_star(slope_product: f64, a: f64, b: f64, d1: f64, d2: f64) -> f64 {
    slope_product / ((a + 0.5 * d1) * (b + 0.5 * d2))
}

/// Principal eigenvalue of a cooperative 2x2 matrix `[[m11, m12], [m21, m22]]`.
pub fn principal_2x2(m11: f64, m12: f64, m21: f64, m22: f64) -> f64 {
    let tr = m11 + m22;
    0.5 * (tr + ((m11 - m22) * (m11 - m22) + 4.0 * m12 * m21).sqrt())
}

/// Large- and small-domain limits of the principal eigenvalue together with
/// the positive eigenvectors `(theta, 1)` of the limiting matrices.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitConstants {
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub theta_a: f64,
    pub theta_b: f64,
}

impl LimitConstants {
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64, d1: f64, d2: f64) -> LimitConstants {
        let gamma_a = principal_2x2(a11, a12, a21, a22);
        let gamma_b = principal_2x2(a11 - 0.5 * d1, a12, a21, a22 - 0.5 * d2);
        LimitConstants {
            gamma_a,
            gamma_b,
            theta_a: a12 / (gamma_a - a11),
            theta_b: a12 / (gamma_b + 0.5 * d1 - a11),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DerivedConstants {
    pub r0: f64,
    pub r_star: f64,
    pub gamma_a: f64,
    pub gamma_b: f64,
    pub theta_a: f64,
    pub theta_b: f64,
    /// `2 (H'(0) G'(0) - a b) / a`
    pub lambda_cap: f64,
    /// Positive equilibrium `(U, V)` when `R0 > 1`.
    pub equilibrium: Option<(f64, f64)>,
}

pub fn derived_constants(params: &ModelParams) -> DerivedConstants {
    let hp = params.nonlinearity.h_slope();
    let gp = params.nonlinearity.g_slope();
    let lim = LimitConstants::new(-params.a, hp, gp, -params.b, params.d1, params.d2);
    DerivedConstants {
        r0: params.r0(),
        r_star: params.r_star(),
        gamma_a: lim.gamma_a,
        gamma_b: lim.gamma_b,
        theta_a: lim.theta_a,
        theta_b: lim.theta_b,
        lambda_cap: 2.0 * (hp * gp - params.a * params.b) / params.a,
        equilibrium: equilibrium(params, 0.0).ok(),
    }
}

/// Positive root of `(a + sigma) U = H(V)`, `(b + sigma) V = G(U)`.
pub fn equilibrium(params: &ModelParams, sigma: f64) -> Result<(f64, f64)> {
    if !(sigma >= 0.0) {
        return Err(Error::invalid("sigma must be >= 0"));
    }
    equilibrium_with_rates(&params.nonlinearity, params.a + sigma, params.b + sigma)
}

/// Positive root of `a U = H(V)`, `b V = G(U)` for effective decay rates.
///
/// Bisection on `F(V) = G(H(V)/a) - b V`, which is positive near `0+` exactly
/// when `H'(0) G'(0) > a b` and negative for large `V`.
pub fn equilibrium_with_rates(nl: &Nonlinearity, a: f64, b: f64) -> Result<(f64, f64)> {
    let reproduction = nl.h_slope() * nl.g_slope() / (a * b);
    if !(reproduction > 1.0) {
        return Err(Error::NoPositiveEquilibrium { reproduction });
    }
    let f = |v: f64| nl.g(nl.h(v) / a) - b * v;
    let mut hi = 1.0;
    let mut doublings = 0;
    while f(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > 200 {
            return Err(Error::Undetermined("equilibrium bracket not found".into()));
        }
    }
    let mut lo = hi / 2.0;
    // Walk the lower end down until F > 0 there.
    while f(lo) <= 0.0 {
        lo /= 2.0;
        if lo < 1e-300 {
            return Err(Error::NoPositiveEquilibrium { reproduction });
        }
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let v = 0.5 * (lo + hi);
    Ok((nl.h(v) / a, v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Independent fixed-point oracle for V = 2 ln(1 + 2V/(1+V)).
    fn p1_equilibrium_oracle() -> (f64, f64) {
        let mut v: f64 = 5.0;
        for _ in 0..500 {
            v = 2.0 * (1.0 + 2.0 * v / (1.0 + v)).ln();
        }
        (2.0 * v / (1.0 + v), v)
    }

    #[test]
    fn p1_equilibrium() {
        let p = ModelParams::p1();
        let (u, v) = equilibrium(&p, 0.0).unwrap();
        let (uo, vo) = p1_equilibrium_oracle();
        assert_abs_diff_eq!(u, uo, epsilon = 1e-10);
        assert_abs_diff_eq!(v, vo, epsilon = 1e-10);
        assert_abs_diff_eq!(u, 1.233, epsilon = 1e-3);
        // The quoted 1.608 is rounded loosely; the fixed point is 1.60638.
        assert_abs_diff_eq!(v, 1.608, epsilon = 2e-3);
        assert!((p.a * u - p.nonlinearity.h(v)).abs() < 1e-12);
        assert!((p.b * v - p.nonlinearity.g(u)).abs() < 1e-12);
    }

    #[test]
    fn equilibrium_errors_and_monotonicity() {
        assert!(matches!(
            equilibrium(&ModelParams::subcritical(), 0.0),
            Err(Error::NoPositiveEquilibrium { .. })
        ));
        let p = ModelParams::p1();
        let (u1, v1) = equilibrium(&p, 0.1).unwrap();
        let (u2, v2) = equilibrium(&p, 0.2).unwrap();
        assert!(u1 > u2 && v1 > v2);
        // H'G'/((1+s)^2) = 4/(1+s)^2 <= 1 once s >= 1.
        assert!(equilibrium(&p, 1.0).is_err());
    }

    #[test]
    fn derived_constant_examples() {
        let c = derived_constants(&ModelParams::p1());
        assert_abs_diff_eq!(c.r0, 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.r_star, 16.0 / 9.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.gamma_a, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c.gamma_b, 0.5, epsilon = 1e-14);
        assert_abs_diff_eq!(c.lambda_cap, 6.0, epsilon = 1e-14);

        let c2 = derived_constants(&ModelParams::p1_with_diffusion(2.0));
        assert_abs_diff_eq!(c2.r_star, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c2.gamma_b, 0.0, epsilon = 1e-14);

        let crit = ModelParams {
            nonlinearity: Nonlinearity::saturating(1.0, 1.0),
            ..ModelParams::p1()
        };
        let c3 = derived_constants(&crit);
        assert_abs_diff_eq!(c3.gamma_a, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(c3.lambda_cap, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn eigenvector_relations_and_sign_sweep() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = rng.random_range(0.1..3.0);
            let b = rng.random_range(0.1..3.0);
            let hp = rng.random_range(0.1..3.0);
            let gp = rng.random_range(0.1..3.0);
            let d1 = rng.random_range(0.0..5.0);
            let d2 = rng.random_range(0.0..5.0);
            let lim = LimitConstants::new(-a, hp, gp, -b, d1, d2);
            // (gamma_A I - A)(theta_A, 1) = 0
            let ra1 = (lim.gamma_a + a) * lim.theta_a - hp;
            let ra2 = -gp * lim.theta_a + (lim.gamma_a + b);
            assert!(ra1.abs() < 1e-12 && ra2.abs() < 1e-12);
            let rb1 = (lim.gamma_b + a + 0.5 * d1) * lim.theta_b - hp;
            let rb2 = -gp * lim.theta_b + (lim.gamma_b + b + 0.5 * d2);
            assert!(rb1.abs() < 1e-12 && rb2.abs() < 1e-12);
            assert!(lim.theta_a > 0.0 && lim.theta_b > 0.0);
            let r0 = hp * gp / (a * b);
            let rs = r_star(hp * gp, a, b, d1, d2);
            assert_eq!(lim.gamma_a > 0.0, r0 > 1.0);
            assert_eq!(lim.gamma_b >= 0.0, rs >= 1.0);
        }
    }

    #[test]
    fn validation() {
        assert!(ModelParams::p1().validate().is_ok());
        assert!(ModelParams::subcritical().validate().is_ok());
        let p = ModelParams {
            d1: 0.0,
            d2: 0.0,
            ..ModelParams::p1()
        };
        let err = p.validate().unwrap_err();
        assert!(err.to_string().contains("d1 + d2 > 0"));
        let p = ModelParams {
            d1: 0.0,
            ..ModelParams::p1()
        };
        assert!(p.validate().is_ok());
        let p = ModelParams {
            h0: -1.0,
            ..ModelParams::p1()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn initial_profiles() {
        for prof in [
            InitialProfile::Cosine { amplitude: 2.0 },
            InitialProfile::Linear { amplitude: 2.0 },
            InitialProfile::Plateau {
                amplitude: 2.0,
                ramp: 0.5,
            },
        ] {
            assert_eq!(prof.eval(0.0, 3.0), 2.0);
            assert!(prof.eval(3.0, 3.0).abs() < 1e-15);
            assert!(prof.eval(2.99, 3.0) > 0.0);
            assert_eq!(prof.eval(3.5, 3.0), 0.0);
        }
    }
}

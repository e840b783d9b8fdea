//! Dispersal kernels.
//!
//! A [`Kernel`] is an even probability density on the real line together with
//! the handful of integrals the solvers need: the cumulative distribution
//! (which doubles as the boundary weight `j(x)`), the upper tail, and partial
//! first moments. Built-in families have closed forms for all of them; table
//! kernels are piecewise linear with an optional power-law tail.
//!
//! Every kernel may carry a truncation index `n`, in which case the density is
//! multiplied by the cutoff `xi(x / n)` where `xi` is 1 on `[-1, 1]`, falls
//! linearly to 0 on `1 < |x| <= 2` and vanishes beyond. Truncated kernels are
//! compactly supported on `[-2n, 2n]` and have mass below one.

use std::f64::consts::PI;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest doubling window used when deciding whether a tabulated kernel has
/// a finite first moment.
const MOMENT_WINDOW_LOG2: i32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum KernelFamily {
    /// `exp(-|x|/s) / (2s)`
    Laplace {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// `exp(-(x/s)^2) / (s sqrt(pi))`
    Gaussian {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// `1 / (pi s (1 + (x/s)^2))`, infinite first moment.
    Cauchy {
        #[serde(default = "unit")]
        scale: f64,
    },
    /// Samples of an unnormalized density at `k * spacing`, `k = 0, 1, ...`,
    /// linearly interpolated and extended evenly. Beyond the last sample the
    /// density is zero, or decays like `|x|^-tail_exponent` when given.
    Table {
        spacing: f64,
        values: Vec<f64>,
        #[serde(default)]
        tail_exponent: Option<f64>,
    },
}

fn unit() -> f64 {
    1.0
}

/// Result of [`Kernel::first_moment`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FirstMoment {
    Finite(f64),
    Infinite,
}

impl FirstMoment {
    pub fn is_finite(&self) -> bool {
        matches!(self, FirstMoment::Finite(_))
    }

    pub fn value(&self) -> f64 {
        match self {
            FirstMoment::Finite(m) => *m,
            FirstMoment::Infinite => f64::INFINITY,
        }
    }
}

/// Normalized piecewise-linear table with cumulative integrals at the nodes.
#[derive(Debug)]
struct Table {
    spacing: f64,
    values: Vec<f64>,
    /// `int_0^{x_k} J`
    cum_mass: Vec<f64>,
    /// `int_0^{x_k} t J(t) dt`
    cum_moment: Vec<f64>,
    tail_exponent: Option<f64>,
}

impl Table {
    fn build(spacing: f64, raw: &[f64], tail_exponent: Option<f64>) -> Result<Table> {
        if !(spacing > 0.0) || !spacing.is_finite() {
            return Err(Error::invalid("table kernel spacing must be positive"));
        }
        if raw.len() < 2 {
            return Err(Error::invalid("table kernel needs at least two samples"));
        }
        if raw.iter().any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(Error::invalid(
                "table kernel samples must be finite and nonnegative",
            ));
        }
        if !(raw[0] > 0.0) {
            return Err(Error::invalid("table kernel must satisfy J(0) > 0"));
        }
        if let Some(g) = tail_exponent {
            if !(g > 1.0) {
                return Err(Error::invalid("table kernel tail exponent must exceed 1"));
            }
        }
        let mut table = Table {
            spacing,
            values: raw.to_vec(),
            cum_mass: Vec::new(),
            cum_moment: Vec::new(),
            tail_exponent,
        };
        table.accumulate();
        // Renormalize so that the even extension has unit mass.
        let half = table.half_mass_to(f64::INFINITY);
        if !(half > 0.0) || !half.is_finite() {
            return Err(Error::invalid("table kernel has zero or infinite mass"));
        }
        let scale = 0.5 / half;
        for v in &mut table.values {
            *v *= scale;
        }
        table.accumulate();
        Ok(table)
    }

    fn accumulate(&mut self) {
        let h = self.spacing;
        let mut mass = vec![0.0; self.values.len()];
        let mut moment = vec![0.0; self.values.len()];
        for k in 1..self.values.len() {
            let (f0, f1) = (self.values[k - 1], self.values[k]);
            let x0 = (k - 1) as f64 * h;
            mass[k] = mass[k - 1] + 0.5 * h * (f0 + f1);
            moment[k] = moment[k - 1] + segment_moment(x0, h, f0, f1, h);
        }
        self.cum_mass = mass;
        self.cum_moment = moment;
    }

    fn x_last(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.spacing
    }

    fn density(&self, x: f64) -> f64 {
        let x = x.abs();
        let last = self.x_last();
        if x <= last {
            let pos = x / self.spacing;
            let k = (pos.floor() as usize).min(self.values.len() - 2);
            let frac = pos - k as f64;
            self.values[k] * (1.0 - frac) + self.values[k + 1] * frac
        } else {
            match self.tail_exponent {
                Some(g) => self.values[self.values.len() - 1] * (x / last).powf(-g),
                None => 0.0,
            }
        }
    }

    fn half_mass_to(&self, x: f64) -> f64 {
        let last = self.x_last();
        if x <= last {
            let pos = x / self.spacing;
            let k = (pos.floor() as usize).min(self.values.len() - 2);
            let dx = x - k as f64 * self.spacing;
            let f0 = self.values[k];
            let f1 = self.density(x);
            self.cum_mass[k] + 0.5 * dx * (f0 + f1)
        } else {
            let base = self.cum_mass[self.values.len() - 1];
            match self.tail_exponent {
                Some(g) => {
                    let v = self.values[self.values.len() - 1];
                    let full = v * last / (g - 1.0);
                    if x.is_infinite() {
                        base + full
                    } else {
                        base + full * (1.0 - (x / last).powf(1.0 - g))
                    }
                }
                None => base,
            }
        }
    }

    fn upper_tail(&self, x: f64) -> f64 {
        let last = self.x_last();
        if x > last {
            match self.tail_exponent {
                Some(g) => {
                    let v = self.values[self.values.len() - 1];
                    v * last / (g - 1.0) * (x / last).powf(1.0 - g)
                }
                None => 0.0,
            }
        } else {
            (0.5 - self.half_mass_to(x)).max(0.0)
        }
    }

    fn moment_to(&self, x: f64) -> f64 {
        let last = self.x_last();
        if x <= last {
            let pos = x / self.spacing;
            let k = (pos.floor() as usize).min(self.values.len() - 2);
            let x0 = k as f64 * self.spacing;
            self.cum_moment[k]
                + segment_moment(x0, self.spacing, self.values[k], self.values[k + 1], x - x0)
        } else {
            let base = self.cum_moment[self.values.len() - 1];
            match self.tail_exponent {
                Some(g) => {
                    let v = self.values[self.values.len() - 1];
                    let c = v * last.powf(g);
                    if (g - 2.0).abs() < 1e-12 {
                        base + c * (x / last).ln()
                    } else {
                        base + c * (x.powf(2.0 - g) - last.powf(2.0 - g)) / (2.0 - g)
                    }
                }
                None => base,
            }
        }
    }
}

/// `int_{x0}^{x0+len} t f(t) dt` where `f` is linear from `f0` at `x0` to `f1`
/// at `x0 + h`.
fn segment_moment(x0: f64, h: f64, f0: f64, f1: f64, len: f64) -> f64 {
    let slope = (f1 - f0) / h;
    // f(x0 + s) = f0 + slope s;  int_0^len (x0 + s)(f0 + slope s) ds
    x0 * f0 * len + (x0 * slope + f0) * len * len / 2.0 + slope * len * len * len / 3.0
}

/// An even dispersal kernel with unit mass (below one when truncated).
#[derive(Debug, Clone)]
pub struct Kernel {
    family: KernelFamily,
    truncation: Option<u32>,
    table: Option<Arc<Table>>,
}

impl PartialEq for Kernel {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.truncation == other.truncation
    }
}

impl Kernel {
    pub fn new(family: KernelFamily) -> Result<Kernel> {
        let table = match &family {
            KernelFamily::Laplace { scale }
            | KernelFamily::Gaussian { scale }
            | KernelFamily::Cauchy { scale } => {
                if !(*scale > 0.0) || !scale.is_finite() {
                    return Err(Error::invalid("kernel scale must be positive and finite"));
                }
                None
            }
            KernelFamily::Table {
                spacing,
                values,
                tail_exponent,
            } => Some(Arc::new(Table::build(*spacing, values, *tail_exponent)?)),
        };
        Ok(Kernel {
            family,
            truncation: None,
            table,
        })
    }

    pub fn laplace(scale: f64) -> Kernel {
        Kernel::new(KernelFamily::Laplace { scale }).expect("valid laplace scale")
    }

    pub fn gaussian(scale: f64) -> Kernel {
        Kernel::new(KernelFamily::Gaussian { scale }).expect("valid gaussian scale")
    }

    pub fn cauchy(scale: f64) -> Kernel {
        Kernel::new(KernelFamily::Cauchy { scale }).expect("valid cauchy scale")
    }

    /// Returns the truncated kernel `J(x) xi(x / n)`.
    pub fn truncated(&self, n: u32) -> Result<Kernel> {
        if n == 0 {
            return Err(Error::invalid(
                "truncation index must be a positive integer",
            ));
        }
        Ok(Kernel {
            truncation: Some(n),
            ..self.clone()
        })
    }

    /// The same kernel without truncation.
    pub fn untruncated(&self) -> Kernel {
        Kernel {
            truncation: None,
            ..self.clone()
        }
    }

    pub fn family(&self) -> &KernelFamily {
        &self.family
    }

    pub fn truncation(&self) -> Option<u32> {
        self.truncation
    }

    /// Characteristic length of the kernel (the scale for built-in families,
    /// the table extent otherwise).
    pub fn length_scale(&self) -> f64 {
        match &self.family {
            KernelFamily::Laplace { scale }
            | KernelFamily::Gaussian { scale }
            | KernelFamily::Cauchy { scale } => *scale,
            KernelFamily::Table { .. } => {
                let t = self.table.as_ref().expect("table data");
                // Standard-deviation-like length from the half mass profile.
                let mut lo = 0.0;
                let mut hi = t.x_last().max(t.spacing);
                while t.half_mass_to(hi) < 0.3 {
                    hi *= 2.0;
                }
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if t.half_mass_to(mid) < 0.3 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                hi
            }
        }
    }

    fn base_density(&self, x: f64) -> f64 {
        match &self.family {
            KernelFamily::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            KernelFamily::Gaussian { scale } => {
                let z = x / scale;
                (-z * z).exp() / (scale * PI.sqrt())
            }
            KernelFamily::Cauchy { scale } => {
                let z = x / scale;
                1.0 / (PI * scale * (1.0 + z * z))
            }
            KernelFamily::Table { .. } => self.table.as_ref().expect("table data").density(x),
        }
    }

    /// `int_0^x J`, `x >= 0`.
    fn base_half_mass(&self, x: f64) -> f64 {
        match &self.family {
            KernelFamily::Laplace { scale } => 0.5 * -(-x / scale).exp_m1(),
            KernelFamily::Gaussian { scale } => 0.5 * libm::erf(x / scale),
            KernelFamily::Cauchy { scale } => (x / scale).atan() / PI,
            KernelFamily::Table { .. } => self.table.as_ref().expect("table data").half_mass_to(x),
        }
    }

    /// `int_x^inf J`, `x >= 0`.
    fn base_upper_tail(&self, x: f64) -> f64 {
        match &self.family {
            KernelFamily::Laplace { scale } => 0.5 * (-x / scale).exp(),
            KernelFamily::Gaussian { scale } => 0.5 * libm::erfc(x / scale),
            KernelFamily::Cauchy { scale } => scale.atan2(x) / PI,
            KernelFamily::Table { .. } => self.table.as_ref().expect("table data").upper_tail(x),
        }
    }

    /// `int_0^x t J(t) dt`, `x >= 0`.
    fn base_moment_to(&self, x: f64) -> f64 {
        match &self.family {
            KernelFamily::Laplace { scale } => 0.5 * (scale - (x + scale) * (-x / scale).exp()),
            KernelFamily::Gaussian { scale } => {
                let z = x / scale;
                scale / (2.0 * PI.sqrt()) * -(-z * z).exp_m1()
            }
            KernelFamily::Cauchy { scale } => {
                let z = x / scale;
                scale / (2.0 * PI) * (z * z).ln_1p()
            }
            KernelFamily::Table { .. } => self.table.as_ref().expect("table data").moment_to(x),
        }
    }

    /// Kernel density `J(x)` (truncated when a truncation index is set).
    pub fn density(&self, x: f64) -> f64 {
        let base = self.base_density(x);
        match self.truncation {
            None => base,
            Some(n) => base * cutoff(x / n as f64),
        }
    }

    /// `int_0^x J` for `x >= 0`.
    fn half_mass(&self, x: f64) -> f64 {
        match self.truncation {
            None => self.base_half_mass(x),
            Some(n) => {
                let n = n as f64;
                if x <= n {
                    self.base_half_mass(x)
                } else {
                    let x = x.min(2.0 * n);
                    let inner = self.base_half_mass(n);
                    let ramp = 2.0 * (self.base_half_mass(x) - inner)
                        - (self.base_moment_to(x) - self.base_moment_to(n)) / n;
                    inner + ramp
                }
            }
        }
    }

    /// `int_x^inf J` for `x >= 0`.
    fn upper_tail_pos(&self, x: f64) -> f64 {
        match self.truncation {
            None => self.base_upper_tail(x),
            Some(n) => {
                let n = n as f64;
                if x >= 2.0 * n {
                    return 0.0;
                }
                let ramp_from = |s: f64| {
                    2.0 * (self.base_upper_tail(s) - self.base_upper_tail(2.0 * n))
                        - (self.base_moment_to(2.0 * n) - self.base_moment_to(s)) / n
                };
                if x > n {
                    ramp_from(x).max(0.0)
                } else {
                    (self.base_upper_tail(x) - self.base_upper_tail(n)) + ramp_from(n).max(0.0)
                }
            }
        }
    }

    /// Total mass `int J` (one unless truncated).
    pub fn mass(&self) -> f64 {
        match self.truncation {
            None => 1.0,
            Some(n) => 2.0 * self.half_mass(2.0 * n as f64),
        }
    }

    /// Cumulative distribution `int_{-inf}^x J`.
    pub fn cdf(&self, x: f64) -> f64 {
        if x >= 0.0 {
            0.5 * self.mass() + self.half_mass(x)
        } else {
            self.upper_tail_pos(-x)
        }
    }

    /// Upper tail `int_x^inf J`, accurate far out in the tail.
    pub fn tail(&self, x: f64) -> f64 {
        if x >= 0.0 {
            self.upper_tail_pos(x)
        } else {
            0.5 * self.mass() + self.half_mass(-x)
        }
    }

    /// Boundary weight `j(x) = int_0^inf J(x - y) dy`, i.e. the CDF at `x`.
    pub fn boundary_weight(&self, x: f64) -> f64 {
        self.cdf(x)
    }

    /// Cell average `(1/dx) int_{x-dx/2}^{x+dx/2} J`.
    ///
    /// Quadrature weights built from cell averages carry exactly the kernel
    /// mass, which a point sample misses at the cusp of e.g. the Laplace kernel.
    pub fn cell_average(&self, x: f64, dx: f64) -> f64 {
        let x = x.abs();
        let lo = x - 0.5 * dx;
        let hi = x + 0.5 * dx;
        let m = if lo >= 0.0 {
            self.tail(lo) - self.tail(hi)
        } else {
            self.mass() - self.tail(hi) - self.tail(-lo)
        };
        m.max(0.0) / dx
    }

    /// Partial first moment `int_0^x t J(t) dt`, `x >= 0`.
    pub fn moment_to(&self, x: f64) -> f64 {
        match self.truncation {
            None => self.base_moment_to(x),
            Some(n) => {
                let n = n as f64;
                if x <= n {
                    return self.base_moment_to(x);
                }
                // int_n^x t J(t) (2 - t/n) dt, second moment part by quadrature.
                let x = x.min(2.0 * n);
                let first = 2.0 * (self.base_moment_to(x) - self.base_moment_to(n));
                let steps = 2000;
                let h = (x - n) / steps as f64;
                let second: f64 = (0..steps)
                    .map(|k| {
                        let t = n + (k as f64 + 0.5) * h;
                        t * t * self.base_density(t)
                    })
                    .sum::<f64>()
                    * h
                    / n;
                self.base_moment_to(n) + first - second
            }
        }
    }

    /// First moment `int_0^inf x J(x) dx`, or [`FirstMoment::Infinite`].
    pub fn first_moment(&self) -> Result<FirstMoment> {
        if let Some(n) = self.truncation {
            return Ok(FirstMoment::Finite(self.moment_to(2.0 * n as f64)));
        }
        match &self.family {
            KernelFamily::Laplace { scale } => Ok(FirstMoment::Finite(0.5 * scale)),
            KernelFamily::Gaussian { scale } => Ok(FirstMoment::Finite(scale / (2.0 * PI.sqrt()))),
            KernelFamily::Cauchy { .. } => Ok(FirstMoment::Infinite),
            KernelFamily::Table { .. } => self.windowed_moment(),
        }
    }

    /// Doubling-window partial sums of the first moment with a growth test.
    fn windowed_moment(&self) -> Result<FirstMoment> {
        let start = self.length_scale().max(f64::MIN_POSITIVE);
        let mut total = self.base_moment_to(start);
        let mut increments = Vec::new();
        let mut lo = start;
        for _ in 0..=MOMENT_WINDOW_LOG2 {
            let hi = 2.0 * lo;
            let inc = self.base_moment_to(hi) - self.base_moment_to(lo);
            total += inc;
            increments.push(inc);
            lo = hi;
        }
        let last = *increments.last().unwrap();
        if last <= 1e-12 * total {
            return Ok(FirstMoment::Finite(total));
        }
        let ratios: Vec<f64> = increments
            .windows(2)
            .rev()
            .take(4)
            .map(|w| if w[0] > 0.0 { w[1] / w[0] } else { 0.0 })
            .collect();
        if ratios.iter().all(|r| *r >= 0.99) {
            return Ok(FirstMoment::Infinite);
        }
        if ratios.iter().all(|r| *r <= 0.9) {
            let r = ratios.iter().cloned().fold(0.0, f64::max);
            return Ok(FirstMoment::Finite(total + last * r / (1.0 - r)));
        }
        Err(Error::Undetermined(format!(
            "first moment tail undecided after window 2^{MOMENT_WINDOW_LOG2} (last increment {last:.3e})"
        )))
    }
}

/// Piecewise-linear cutoff: 1 on `[-1, 1]`, `2 - |x|` on `1 < |x| <= 2`, 0 beyond.
pub fn cutoff(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        1.0
    } else if a <= 2.0 {
        2.0 - a
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        (0..n).map(|k| f(a + (k as f64 + 0.5) * h)).sum::<f64>() * h
    }

    fn all_families() -> Vec<Kernel> {
        vec![
            Kernel::laplace(1.0),
            Kernel::laplace(2.5),
            Kernel::gaussian(1.0),
            Kernel::cauchy(1.0),
            Kernel::cauchy(3.0),
            Kernel::new(KernelFamily::Table {
                spacing: 0.5,
                values: vec![1.0, 0.8, 0.5, 0.2, 0.05],
                tail_exponent: Some(3.0),
            })
            .unwrap(),
        ]
    }

    #[test]
    fn boundary_weight_examples() {
        let k = Kernel::laplace(1.0);
        assert_abs_diff_eq!(k.boundary_weight(0.0), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            k.boundary_weight(1.0),
            1.0 - 0.5 * (-1.0f64).exp(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(k.boundary_weight(50.0), 1.0, epsilon = 1e-12);
        for k in all_families() {
            assert_abs_diff_eq!(k.boundary_weight(0.0), 0.5, epsilon = 1e-14);
        }
    }

    #[test]
    fn evenness_and_mass() {
        for k in all_families() {
            for i in 0..64 {
                let x = 0.173 * i as f64 + 0.01;
                assert_abs_diff_eq!(k.density(x), k.density(-x), epsilon = 1e-14);
            }
            // Quadrature over [-R, R] plus the closed-form tails.
            let r = 30.0 * k.length_scale();
            let inner = midpoint(|x| k.density(x), -r, r, 400_000);
            let mass = inner + 2.0 * k.tail(r);
            assert!((mass - 1.0).abs() < 1e-8, "{:?}: mass {mass}", k.family());
            assert!(k.density(0.0) > 0.0);
        }
    }

    #[test]
    fn cdf_matches_quadrature() {
        for k in all_families() {
            for &x in &[-3.0, -0.7, 0.0, 0.4, 1.3, 6.0] {
                let r = 40.0 * k.length_scale();
                let q = midpoint(|t| k.density(t), -r, x, 400_000) + k.tail(r);
                assert!((k.cdf(x) - q).abs() < 1e-7, "{:?} at {x}", k.family());
                assert_abs_diff_eq!(k.cdf(x) + k.tail(x), 1.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn first_moment_examples() {
        assert_abs_diff_eq!(
            Kernel::laplace(1.0).first_moment().unwrap().value(),
            0.5,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            Kernel::gaussian(1.0).first_moment().unwrap().value(),
            0.282_094_791_773_878_1,
            epsilon = 1e-12
        );
        assert_eq!(
            Kernel::cauchy(1.0).first_moment().unwrap(),
            FirstMoment::Infinite
        );
    }

    #[test]
    fn table_moment_detection() {
        let thin = Kernel::new(KernelFamily::Table {
            spacing: 0.1,
            values: (0..50).map(|k| (-(k as f64) * 0.1).exp()).collect(),
            tail_exponent: None,
        })
        .unwrap();
        let m = thin.first_moment().unwrap();
        let q = midpoint(|x| x * thin.density(x), 0.0, 5.0, 200_000);
        assert!((m.value() - q).abs() < 1e-8);

        let heavy = Kernel::new(KernelFamily::Table {
            spacing: 0.5,
            values: vec![1.0, 0.6, 0.3],
            tail_exponent: Some(1.8),
        })
        .unwrap();
        assert_eq!(heavy.first_moment().unwrap(), FirstMoment::Infinite);

        let borderline = Kernel::new(KernelFamily::Table {
            spacing: 0.5,
            values: vec![1.0, 0.6, 0.3],
            tail_exponent: Some(2.0),
        })
        .unwrap();
        assert_eq!(borderline.first_moment().unwrap(), FirstMoment::Infinite);

        let light = Kernel::new(KernelFamily::Table {
            spacing: 0.5,
            values: vec![1.0, 0.6, 0.3],
            tail_exponent: Some(4.0),
        })
        .unwrap();
        assert!(light.first_moment().unwrap().is_finite());

        let undecided = Kernel::new(KernelFamily::Table {
            spacing: 0.5,
            values: vec![1.0, 0.6, 0.3],
            tail_exponent: Some(2.02),
        })
        .unwrap();
        assert!(matches!(
            undecided.first_moment(),
            Err(Error::Undetermined(_))
        ));
    }

    #[test]
    fn truncation_properties() {
        let base = Kernel::laplace(1.0);
        let mut prev_l1 = f64::INFINITY;
        for n in [1u32, 2, 5, 10, 20, 41] {
            let jn = base.truncated(n).unwrap();
            let jn1 = base.truncated(n + 1).unwrap();
            for i in 0..200 {
                let x = -50.0 + 0.5 * i as f64;
                assert!(jn.density(x) <= base.density(x) + 1e-300);
                assert!(jn.density(x) <= jn1.density(x) + 1e-300);
            }
            let l1 = 1.0 - jn.mass();
            let q = midpoint(
                |x| base.density(x) - jn.density(x),
                -4.0 * n as f64,
                4.0 * n as f64,
                200_000,
            ) + 2.0 * base.tail(4.0 * n as f64);
            assert!((l1 - q).abs() < 1e-9, "n={n}: {l1} vs {q}");
            assert!(l1 < prev_l1);
            prev_l1 = l1;
            if n > 40 {
                assert!(l1 < 1e-6);
            }
        }
    }

    #[test]
    fn truncated_cdf_and_moment() {
        for base in [
            Kernel::laplace(1.0),
            Kernel::gaussian(2.0),
            Kernel::cauchy(1.0),
        ] {
            let jn = base.truncated(3).unwrap();
            for &x in &[-7.0f64, -4.5, -2.0, 0.0, 2.5, 3.5, 5.9, 8.0] {
                let q = midpoint(|t| jn.density(t), -6.0, x.max(-6.0), 200_000);
                assert!((jn.cdf(x) - q).abs() < 1e-9, "{:?} at {x}", base.family());
                assert_abs_diff_eq!(jn.cdf(x) + jn.tail(x), jn.mass(), epsilon = 1e-12);
            }
            let m = jn.first_moment().unwrap().value();
            let q = midpoint(|t| t * jn.density(t), 0.0, 6.0, 200_000);
            assert!((m - q).abs() < 1e-8);
        }
    }

    #[test]
    fn cutoff_shape() {
        assert_eq!(cutoff(0.5), 1.0);
        assert_eq!(cutoff(-1.0), 1.0);
        assert_abs_diff_eq!(cutoff(1.5), 0.5);
        assert_eq!(cutoff(2.5), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        assert!(Kernel::new(KernelFamily::Table {
            spacing: 0.1,
            values: vec![0.0, 1.0],
            tail_exponent: None
        })
        .is_err());
        assert!(Kernel::new(KernelFamily::Table {
            spacing: 0.1,
            values: vec![1.0, -1.0],
            tail_exponent: None
        })
        .is_err());
        assert!(Kernel::new(KernelFamily::Table {
            spacing: 0.1,
            values: vec![1.0, 1.0],
            tail_exponent: Some(0.5)
        })
        .is_err());
        assert!(Kernel::new(KernelFamily::Laplace { scale: 0.0 }).is_err());
    }
}

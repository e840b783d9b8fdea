//! Spreading-vanishing criteria: thresholds in the habitat size, the
//! expansion rates and the diffusion rates, and the full decision tree.
//!
//! Eigenvalue thresholds bisect on the sign of a principal eigenvalue, which
//! is monotone in the searched parameter. The expansion-rate threshold has no
//! eigenvalue characterization and bisects on simulation verdicts.

use serde::{Deserialize, Serialize};

use crate::eigen::{default_resolution, principal_eigenpair, scalar_principal, OperatorSpec};
use crate::error::{Error, Result};
use crate::freeboundary::{classify, ClassifyPolicy, Simulator, Verdict};
use crate::model::{derived_constants, ModelParams};

/// Target for `|lambda(value)|` in eigenvalue bisections.
pub const EIGEN_TOL: f64 = 1e-6;
/// Bracket width target relative to `max(1, value)`.
pub const WIDTH_TOL: f64 = 1e-4;
/// Cap on simulation-backed bisection steps. Halving a doubling bracket
/// down to the width target takes about 17 steps.
pub const MU_BISECTION_CAP: usize = 40;
pub const MU_BOUNDS: (f64, f64) = (1e-4, 1e3);
const MAX_BISECTIONS: usize = 200;
const MAX_DOUBLINGS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdName {
    EllStar,
    Mu1Star,
    D1Star,
    D1Hat,
    D1Tilde,
    D2Under,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// Signed criterion (an eigenvalue, or `nu1`) at both bracket ends and at
    /// the reported value.
    Eigenvalue {
        lower: f64,
        upper: f64,
        at_value: f64,
    },
    /// Simulation verdicts on either side of the reported value.
    Verdicts {
        below_at: f64,
        below: Verdict,
        above_at: f64,
        above: Verdict,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub name: ThresholdName,
    pub value: f64,
    pub bracket: (f64, f64),
    pub certificate: Certificate,
    pub iterations: usize,
    /// Cells used for every eigenvalue evaluation of the search.
    pub resolution: Option<usize>,
}

impl ThresholdResult {
    pub fn bracket_width(&self) -> f64 {
        self.bracket.1 - self.bracket.0
    }

    pub fn width_within_tolerance(&self) -> bool {
        self.bracket_width() <= WIDTH_TOL * self.value.abs().max(1.0)
    }

    /// Whether the certificate changes sign (or verdict) across the bracket.
    pub fn certificate_flips(&self) -> bool {
        match &self.certificate {
            Certificate::Eigenvalue { lower, upper, .. } => lower * upper < 0.0,
            Certificate::Verdicts { below, above, .. } => {
                matches!(
                    (below, above),
                    (Verdict::Vanishing, Verdict::Spreading)
                        | (Verdict::Spreading, Verdict::Vanishing)
                )
            }
        }
    }
}

/// Strictly increasing link `f` with `f(0) = 0` and `f(s) -> inf`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "link", rename_all = "snake_case", deny_unknown_fields)]
pub enum Link {
    /// `f(s) = slope * s`
    Linear { slope: f64 },
    /// `f(s) = coefficient * s^exponent`
    Power { coefficient: f64, exponent: f64 },
}

impl Link {
    pub fn identity() -> Link {
        Link::Linear { slope: 1.0 }
    }

    pub fn eval(&self, s: f64) -> f64 {
        match *self {
            Link::Linear { slope } => slope * s,
            Link::Power {
                coefficient,
                exponent,
            } => coefficient * s.powf(exponent),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Link::Linear { slope } => slope > 0.0 && slope.is_finite(),
            Link::Power {
                coefficient,
                exponent,
            } => {
                coefficient > 0.0
                    && exponent > 0.0
                    && coefficient.is_finite()
                    && exponent.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(
                "link must be strictly increasing with positive coefficients",
            ))
        }
    }

    /// Solve `s + f(s) = total` for `s >= 0`.
    fn invert_sum(&self, total: f64) -> f64 {
        let (mut lo, mut hi) = (0.0, total);
        for _ in 0..MAX_BISECTIONS {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if mid + self.eval(mid) > total {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }
}

struct Root {
    value: f64,
    at_value: f64,
    bracket: (f64, f64),
    ends: (f64, f64),
    iterations: usize,
}

/// Bisection for a sign change of `f` on `[lo, hi]`. Stops once
/// `|f(mid)| < EIGEN_TOL` and the bracket is narrow enough.
fn bisect(
    mut f: impl FnMut(f64) -> Result<f64>,
    (mut lo, mut hi): (f64, f64),
    (mut f_lo, mut f_hi): (f64, f64),
    what: &str,
) -> Result<Root> {
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::BracketFailure(format!(
            "{what}: no sign change on [{lo}, {hi}] (values {f_lo:.3e}, {f_hi:.3e})"
        )));
    }
    for it in 1..=MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid)?;
        if fm.abs() < EIGEN_TOL && hi - lo <= WIDTH_TOL * mid.abs().max(1.0) {
            return Ok(Root {
                value: mid,
                at_value: fm,
                bracket: (lo, hi),
                ends: (f_lo, f_hi),
                iterations: it,
            });
        }
        if mid <= lo || mid >= hi {
            break;
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
            f_hi = fm;
        }
    }
    Err(Error::BracketFailure(format!(
        "{what}: bracket [{lo}, {hi}] collapsed without |value| < {EIGEN_TOL:e}"
    )))
}

fn eigen_result(name: ThresholdName, root: Root, resolution: Option<usize>) -> ThresholdResult {
    ThresholdResult {
        name,
        value: root.value,
        bracket: root.bracket,
        certificate: Certificate::Eigenvalue {
            lower: root.ends.0,
            upper: root.ends.1,
            at_value: root.at_value,
        },
        iterations: root.iterations,
        resolution,
    }
}

/// `lambda_1` on `[0, l]` with a fixed number of cells.
pub fn lambda1_at_resolution(l: f64, params: &ModelParams, n: usize) -> Result<f64> {
    Ok(principal_eigenpair(&OperatorSpec::for_lambda1(l, params).with_resolution(n))?.lambda_p)
}

pub fn lambda2_at_resolution(l: f64, params: &ModelParams, n: usize) -> Result<f64> {
    Ok(principal_eigenpair(&OperatorSpec::for_lambda2(l, params).with_resolution(n))?.lambda_p)
}

fn require_intermediate(params: &ModelParams) -> Result<()> {
    params.validate()?;
    let r0 = params.r0();
    let rs = params.r_star();
    if !(r0 > 1.0) {
        return Err(Error::NoThreshold(format!(
            "vanishing for all h0 and mu (R0 = {r0:.6} <= 1)"
        )));
    }
    if rs >= 1.0 {
        return Err(Error::NoThreshold(format!(
            "spreading for all h0 (R* = {rs:.6} >= 1)"
        )));
    }
    Ok(())
}

/// Critical habitat size: the root of `lambda_1(l) = 0`.
pub fn find_ell_star(params: &ModelParams) -> Result<ThresholdResult> {
    require_intermediate(params)?;
    // lambda_1 increases from gamma_B < 0 to gamma_A > 0.
    let probe = |l: f64| lambda1_at_resolution(l, params, default_resolution(l));
    let (mut lo, mut hi) = (1.0, 1.0);
    let mut doublings = 0;
    if probe(1.0)? < 0.0 {
        hi = 2.0;
        while probe(hi)? <= 0.0 {
            lo = hi;
            hi *= 2.0;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(Error::BracketFailure(
                    "ell*: lambda_1 nonpositive up to huge l".into(),
                ));
            }
        }
    } else {
        lo = 0.5;
        while probe(lo)? >= 0.0 {
            hi = lo;
            lo *= 0.5;
            doublings += 1;
            if doublings > MAX_DOUBLINGS {
                return Err(Error::BracketFailure(
                    "ell*: lambda_1 nonnegative down to tiny l".into(),
                ));
            }
        }
    }
    // One resolution for the whole search keeps lambda_1 continuous in l.
    let n = default_resolution(hi);
    let f = |l: f64| lambda1_at_resolution(l, params, n);
    let ends = (f(lo)?, f(hi)?);
    let root = bisect(f, (lo, hi), ends, "ell*")?;
    Ok(eigen_result(ThresholdName::EllStar, root, Some(n)))
}

/// `kappa_1`: principal eigenvalue of `int_0^h0 J2(x-y) w dy - j2(x) w`.
pub fn kappa1(params: &ModelParams, h0: f64) -> Result<f64> {
    scalar_principal(1.0, 0.0, &params.kernel2, h0)
}

/// Limit of `lambda_1(h0)` as `d1 -> 0`, in closed form through `kappa_1`.
pub fn nu1(d2: f64, params: &ModelParams, h0: f64) -> Result<f64> {
    if !(d2 > 0.0) {
        return Err(Error::invalid("nu1 needs d2 > 0"));
    }
    Ok(nu1_with_kappa(d2, params, kappa1(params, h0)?))
}

fn nu1_with_kappa(d2: f64, params: &ModelParams, kappa: f64) -> f64 {
    let (a, b) = (params.a, params.b);
    let hg = params.nonlinearity.h_slope() * params.nonlinearity.g_slope();
    let s = a + b - d2 * kappa;
    0.5 * (-s + (s * s - 4.0 * (a * (b - d2 * kappa) - hg)).sqrt())
}

/// `d2_under`: the root of `nu1(d2) = 0`, which lies above `Lambda`.
pub fn find_d2_under(params: &ModelParams) -> Result<ThresholdResult> {
    params.validate()?;
    if !(params.r0() > 1.0) {
        return Err(Error::Precondition("d2 threshold needs R0 > 1".into()));
    }
    let kappa = kappa1(params, params.h0)?;
    let lambda_cap = derived_constants(params).lambda_cap;
    let f = |d2: f64| Ok(nu1_with_kappa(d2, params, kappa));
    let lo = lambda_cap;
    let mut hi = 2.0 * lambda_cap.max(1.0);
    let mut doublings = 0;
    while nu1_with_kappa(hi, params, kappa) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure("d2_under: nu1 stays positive".into()));
        }
    }
    let ends = (f(lo)?, f(hi)?);
    let root = bisect(f, (lo, hi), ends, "d2_under")?;
    Ok(eigen_result(
        ThresholdName::D2Under,
        root,
        Some(default_resolution(params.h0)),
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case", deny_unknown_fields)]
pub enum DMode {
    /// `d2 = f(d1)`
    Linked { link: Link },
    /// Fixed `d2 < Lambda`.
    FixedD2Small,
    /// Fixed `Lambda <= d2 < d2_under`.
    FixedD2Mid,
    /// Fixed `d2 >= d2_under`.
    FixedD2Large,
}

impl DMode {
    pub fn name(&self) -> &'static str {
        match self {
            DMode::Linked { .. } => "linked",
            DMode::FixedD2Small => "fixed_d2_small",
            DMode::FixedD2Mid => "fixed_d2_mid",
            DMode::FixedD2Large => "fixed_d2_large",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DThresholdReport {
    Threshold {
        /// Root of `R*(d1, d2) = 1` where the mode has one (`d1_under` or
        /// `D1`); the threshold lies above it.
        r_star_root: Option<f64>,
        threshold: ThresholdResult,
    },
    Regime {
        message: String,
        d2_under: f64,
        /// `(d1, lambda_1(h0, d1))` samples.
        samples: Vec<(f64, f64)>,
    },
}

/// Root of the decreasing function `g` on `(0, inf)` with `g(0+) > 0`, to
/// machine precision.
fn decreasing_root(g: impl Fn(f64) -> f64) -> Result<f64> {
    let mut hi = 1.0;
    let mut doublings = 0;
    while g(hi) >= 0.0 {
        hi *= 2.0;
        doublings += 1;
        if doublings > MAX_DOUBLINGS * 16 {
            return Err(Error::BracketFailure("no root of R* = 1".into()));
        }
    }
    let mut lo = 0.0;
    for _ in 0..MAX_BISECTIONS * 6 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Both ends are adjacent floats; report the one closer to the root.
    Ok(if g(hi).abs() <= g(lo).abs() { hi } else { lo })
}

fn with_diffusion(params: &ModelParams, d1: f64, d2: f64) -> ModelParams {
    ModelParams {
        d1,
        d2,
        ..params.clone()
    }
}

/// Bisection on `lambda_2(h0)` over `d1`, which is decreasing in `d1`.
fn lambda2_root_in_d1(
    params: &ModelParams,
    name: ThresholdName,
    d2_of: impl Fn(f64) -> f64,
    lower: f64,
) -> Result<ThresholdResult> {
    let n = default_resolution(params.h0);
    let f = |d1: f64| lambda2_at_resolution(params.h0, &with_diffusion(params, d1, d2_of(d1)), n);
    let mut lo = lower;
    let mut f_lo = f(lo)?;
    let mut shrink = 0;
    while f_lo <= 0.0 {
        // Only reached for a zero lower end: move towards 0.
        lo *= 0.5;
        f_lo = f(lo)?;
        shrink += 1;
        if shrink > MAX_DOUBLINGS || lo == 0.0 {
            return Err(Error::BracketFailure(format!(
                "{name:?}: lambda_2 not positive near d1 = {lower}"
            )));
        }
    }
    let mut hi = (2.0 * lo).max(1.0);
    let mut f_hi = f(hi)?;
    let mut doublings = 0;
    while f_hi >= 0.0 {
        lo = hi;
        f_lo = f_hi;
        hi *= 2.0;
        f_hi = f(hi)?;
        doublings += 1;
        if doublings > MAX_DOUBLINGS {
            return Err(Error::BracketFailure(format!(
                "{name:?}: lambda_2 stays nonnegative"
            )));
        }
    }
    let root = bisect(f, (lo, hi), (f_lo, f_hi), "d1 threshold")?;
    Ok(eigen_result(name, root, Some(n)))
}

/// Diffusion thresholds for the selected mode.
pub fn find_d_thresholds(params: &ModelParams, mode: DMode) -> Result<DThresholdReport> {
    params.validate()?;
    if !(params.r0() > 1.0) {
        return Err(Error::Precondition(format!(
            "diffusion thresholds need R0 > 1 (R0 = {:.6})",
            params.r0()
        )));
    }
    let (a, b) = (params.a, params.b);
    let hg = params.nonlinearity.h_slope() * params.nonlinearity.g_slope();
    let lambda_cap = derived_constants(params).lambda_cap;
    let d2 = params.d2;
    if let DMode::Linked { link } = mode {
        link.validate()?;
        let d1_under = match link {
            // (a + d/2)(b + s d/2) = H'G' is a quadratic in d.
            Link::Linear { slope } => {
                let qa = 0.25 * slope;
                let qb = 0.5 * (a * slope + b);
                let qc = a * b - hg;
                // qc < 0 because R0 > 1; the form avoids cancellation.
                -2.0 * qc / (qb + (qb * qb - 4.0 * qa * qc).sqrt())
            }
            Link::Power { .. } => {
                decreasing_root(|d1: f64| hg / ((a + 0.5 * d1) * (b + 0.5 * link.eval(d1))) - 1.0)?
            }
        };
        let threshold =
            lambda2_root_in_d1(params, ThresholdName::D1Star, |d1| link.eval(d1), d1_under)?;
        return Ok(DThresholdReport::Threshold {
            r_star_root: Some(d1_under),
            threshold,
        });
    }
    let d2_under = find_d2_under(params)?.value;
    let correct = if d2 < lambda_cap {
        DMode::FixedD2Small
    } else if d2 < d2_under {
        DMode::FixedD2Mid
    } else {
        DMode::FixedD2Large
    };
    if correct != mode {
        return Err(Error::WrongMode(format!(
            "d2 = {d2} with Lambda = {lambda_cap:.6} and d2_under = {d2_under:.6} needs mode {}",
            correct.name()
        )));
    }
    match mode {
        DMode::FixedD2Small => {
            let big_d1 = 2.0 * (hg / (b + 0.5 * d2) - a);
            let threshold = lambda2_root_in_d1(params, ThresholdName::D1Hat, |_| d2, big_d1)?;
            Ok(DThresholdReport::Threshold {
                r_star_root: Some(big_d1),
                threshold,
            })
        }
        DMode::FixedD2Mid => {
            let threshold = lambda2_root_in_d1(params, ThresholdName::D1Tilde, |_| d2, 1e-3)?;
            Ok(DThresholdReport::Threshold {
                r_star_root: None,
                threshold,
            })
        }
        DMode::FixedD2Large => {
            let n = default_resolution(params.h0);
            let samples = [0.01, 1.0, 100.0]
                .iter()
                .map(|&d1| {
                    Ok((
                        d1,
                        lambda1_at_resolution(params.h0, &with_diffusion(params, d1, d2), n)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(DThresholdReport::Regime {
                message: "eigenvalue negative for all d1; outcome governed by mu".into(),
                d2_under,
                samples,
            })
        }
        DMode::Linked { .. } => unreachable!(),
    }
}

/// Sum of expansion rates below which vanishing is guaranteed for `h0 < ell*`:
/// `eps delta h0 / (M h1)` with `h1 = (1 + eps) h0`, `delta = -lambda_1(h1)`
/// and `M` scaling the sup-normalized eigenfunction above the initial data.
pub fn vanishing_mu_bound(params: &ModelParams, ell_star: f64) -> Result<f64> {
    let h0 = params.h0;
    if !(h0 < ell_star) {
        return Err(Error::Precondition(format!(
            "need h0 < ell* ({h0} >= {ell_star})"
        )));
    }
    let eps = (0.5 * (ell_star / h0 - 1.0)).min(0.5);
    let h1 = h0 * (1.0 + eps);
    let pair = principal_eigenpair(&OperatorSpec::for_lambda1(h1, params))?;
    let delta = -pair.lambda_p;
    if !(delta > 0.0) {
        return Err(Error::Precondition("lambda_1(h1) is not negative".into()));
    }
    let n = pair.phi1.len();
    let dx = h1 / n as f64;
    let sup = pair
        .phi1
        .iter()
        .chain(&pair.phi2)
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let mut m_scale: f64 = 0.0;
    for i in 0..n {
        let x = (i as f64 + 0.5) * dx;
        let p1 = pair.phi1[i] / sup;
        let p2 = pair.phi2[i] / sup;
        m_scale = m_scale
            .max(params.u0.eval(x, h0) / p1)
            .max(params.v0.eval(x, h0) / p2);
    }
    Ok(eps * delta * h0 / (m_scale * h1))
}

#[derive(Debug, Clone, Copy)]
pub struct MuSearch {
    pub policy: ClassifyPolicy,
    pub max_iterations: usize,
}

impl Default for MuSearch {
    fn default() -> Self {
        MuSearch {
            policy: ClassifyPolicy::default(),
            max_iterations: MU_BISECTION_CAP,
        }
    }
}

fn verdict_at(
    params: &ModelParams,
    link: Link,
    mu1: f64,
    policy: &ClassifyPolicy,
) -> Result<Verdict> {
    let p = ModelParams {
        mu1,
        mu2: link.eval(mu1),
        ..params.clone()
    };
    Ok(classify(&p, policy)?.verdict)
}

/// Horizon multipliers tried in turn while a probe stays undecided.
const HORIZON_STEPS: [f64; 3] = [1.0, 4.0, 16.0];

/// Near the threshold the front slows down, so undecided probes are rerun
/// with a longer horizon before the search gives up on them.
fn patient_verdict_at(
    params: &ModelParams,
    link: Link,
    mu1: f64,
    policy: &ClassifyPolicy,
) -> Result<Verdict> {
    let mut verdict = Verdict::Undecided;
    for factor in HORIZON_STEPS {
        let longer = ClassifyPolicy {
            t_max: factor * policy.t_max,
            ..*policy
        };
        verdict = verdict_at(params, link, mu1, &longer)?;
        if verdict != Verdict::Undecided {
            break;
        }
    }
    Ok(verdict)
}

/// Critical expansion rate `mu1*` along `mu2 = f(mu1)` for `h0 < ell*`.
pub fn find_mu_star(
    params: &ModelParams,
    link: Link,
    search: &MuSearch,
) -> Result<ThresholdResult> {
    link.validate()?;
    let ell = find_ell_star(params)?.value;
    if params.h0 >= ell {
        return Err(Error::Precondition(format!(
            "h0 = {} >= ell* = {ell:.6}: spreading for every mu",
            params.h0
        )));
    }
    let policy = &search.policy;
    let (min_mu, max_mu) = MU_BOUNDS;
    let lower_sum = vanishing_mu_bound(params, ell)?;
    let mut lo = link.invert_sum(lower_sum).clamp(min_mu, max_mu);
    let lo_verdict = verdict_at(params, link, lo, policy)?;
    if lo_verdict != Verdict::Vanishing {
        return Err(Error::BracketFailure(format!(
            "mu1 = {lo:.4e}: expected vanishing at the lower bracket, got {lo_verdict:?}"
        )));
    }
    let mut hi = lo;
    let mut iterations = 1;
    loop {
        hi = (2.0 * hi).min(max_mu);
        iterations += 1;
        match verdict_at(params, link, hi, policy)? {
            Verdict::Spreading => break,
            Verdict::Vanishing => lo = hi,
            Verdict::Undecided => {}
        }
        if hi >= max_mu {
            return Err(Error::BracketFailure(format!(
                "no spreading verdict for mu1 in [{lo:.4e}, {max_mu:e}]"
            )));
        }
    }
    let mut steps = 0;
    while steps < search.max_iterations && hi - lo > WIDTH_TOL * (0.5 * (lo + hi)).max(1.0) {
        let mid = 0.5 * (lo + hi);
        steps += 1;
        match patient_verdict_at(params, link, mid, policy)? {
            Verdict::Spreading => hi = mid,
            Verdict::Vanishing => lo = mid,
            // No guess: the reported bracket keeps the undecided point inside.
            Verdict::Undecided => break,
        }
    }
    let value = 0.5 * (lo + hi);
    let below = verdict_at(params, link, 0.9 * value, policy)?;
    let above = verdict_at(params, link, 1.1 * value, policy)?;
    Ok(ThresholdResult {
        name: ThresholdName::Mu1Star,
        value,
        bracket: (lo, hi),
        certificate: Certificate::Verdicts {
            below_at: 0.9 * value,
            below,
            above_at: 1.1 * value,
            above,
        },
        iterations: iterations + steps + 2,
        resolution: None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RegimeVerdict {
    Vanishing,
    Spreading,
    MuDependent,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeCertificate {
    pub kind: String,
    pub detail: String,
    pub value: f64,
}

fn cert(kind: &str, detail: String, value: f64) -> RegimeCertificate {
    RegimeCertificate {
        kind: kind.into(),
        detail,
        value,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RegimeReport {
    pub verdict: RegimeVerdict,
    pub summary: String,
    #[serde(rename = "R0")]
    pub r0: f64,
    #[serde(rename = "Rstar")]
    pub r_star: f64,
    #[serde(rename = "gammaA")]
    pub gamma_a: f64,
    #[serde(rename = "gammaB")]
    pub gamma_b: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ell_star: Option<f64>,
    pub thresholds: Vec<ThresholdResult>,
    pub certificates: Vec<RegimeCertificate>,
}

/// Ordered evaluation of the spreading-vanishing criteria. Uses closed forms
/// and eigenvalue bisections only, so it is cheap and deterministic.
pub fn decision_tree(params: &ModelParams) -> Result<RegimeReport> {
    params.validate()?;
    let dc = derived_constants(params);
    let mut report = RegimeReport {
        verdict: RegimeVerdict::MuDependent,
        summary: String::new(),
        r0: dc.r0,
        r_star: dc.r_star,
        gamma_a: dc.gamma_a,
        gamma_b: dc.gamma_b,
        ell_star: None,
        thresholds: Vec::new(),
        certificates: Vec::new(),
    };
    if dc.r0 <= 1.0 {
        let m0 = Simulator::with_default_grid(params)?.mass();
        let bound = crate::freeboundary::mass_bound(params, m0);
        report.verdict = RegimeVerdict::Vanishing;
        report.summary = format!("vanishing, R0={:.6}", dc.r0);
        report
            .certificates
            .push(cert("closed_form", "R0 <= 1".into(), dc.r0));
        report.certificates.push(cert(
            "mass_bound",
            "h(t) + M(t)/min{d1/mu1, H'(0) d2/(b mu2)} <= h0 + M(0)/min{...} for all t".into(),
            bound,
        ));
        return Ok(report);
    }
    if dc.r_star >= 1.0 {
        report.verdict = RegimeVerdict::Spreading;
        report.summary = format!("spreading, R*={:.6}>=1", dc.r_star);
        report.certificates.push(cert(
            "closed_form",
            "R* >= 1, so gamma_B >= 0".into(),
            dc.r_star,
        ));
        return Ok(report);
    }
    let ell = find_ell_star(params)?;
    report.ell_star = Some(ell.value);
    report.thresholds.push(ell.clone());
    let n = default_resolution(params.h0);
    let lam = lambda1_at_resolution(params.h0, params, n)?;
    report.certificates.push(cert(
        "eigenvalue",
        format!("lambda_1(h0 = {})", params.h0),
        lam,
    ));
    if params.h0 >= ell.value {
        report.verdict = RegimeVerdict::Spreading;
        report.summary = format!("spreading, h0={} >= ell*={:.6}", params.h0, ell.value);
        return Ok(report);
    }
    let bound = vanishing_mu_bound(params, ell.value)?;
    report.certificates.push(cert(
        "vanishing_mu_bound",
        "vanishing whenever mu1 + mu2 <= this value".into(),
        bound,
    ));
    if params.mu1 + params.mu2 <= bound {
        report.verdict = RegimeVerdict::Vanishing;
        report.summary = format!(
            "vanishing, h0 < ell*={:.6} and mu1 + mu2 <= {bound:.4e}",
            ell.value
        );
    } else {
        report.verdict = RegimeVerdict::MuDependent;
        report.summary = format!(
            "mu-dependent; thresholds available (h0={} < ell*={:.6})",
            params.h0, ell.value
        );
    }
    Ok(report)
}

#[cfg(test)]
mod tests;

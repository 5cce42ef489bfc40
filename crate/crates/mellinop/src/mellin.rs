//! Mellin transforms over the multiplicative half-line.
//!
//! Computes `∫₀^∞ F(t) t^α dt/t`, optionally divided by a gamma factor,
//! for matrix- or scalar-valued samplers `F`. The measure `dt/t` is the
//! Haar measure of `(ℝ₊, ×)`, so the transform is invariant under
//! rescaling `t ↦ ct` up to the usual `c^{-α}` factor — that identity is
//! what every downstream operator calculus result rests on.
//!
//! The default engine substitutes `t = e^s` and places double-exponential
//! (tanh-sinh style) trapezoid nodes on the log axis, which handles both
//! the algebraic `t^α` endpoint at zero and exponential or power decay at
//! infinity. A Gauss-Laguerre alternative is available for samplers with
//! a known exponential decay rate.

use std::f64::consts::FRAC_PI_2;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{all_finite, frobenius_norm, CMatrix};
use crate::special::{gamma, gamma_checked};

/// Node layout used for the half-line integral.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QuadKind {
    /// Trapezoid on `s = ln t` after the double-exponential map
    /// `s = (π/2) sinh u`; robust default for every strip-interior case.
    TanhSinhLogAxis,
    /// Generalized Gauss-Laguerre nodes after rescaling by the sampler's
    /// decay rate; requires `decay_rate` and real `α > 0`.
    GaussLaguerreSplit,
}

/// Refinement and truncation controls for the quadrature.
#[derive(Debug, Clone)]
pub struct QuadratureScheme {
    pub kind: QuadKind,
    /// Maximum refinement levels; each level doubles the node count.
    pub levels: usize,
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Truncation bounds on the multiplicative axis.
    pub t_min: f64,
    pub t_max: f64,
}

impl Default for QuadratureScheme {
    fn default() -> Self {
        QuadratureScheme {
            kind: QuadKind::TanhSinhLogAxis,
            levels: 12,
            abs_tol: 1e-13,
            rel_tol: 1e-12,
            t_min: 1e-280,
            t_max: 1e280,
        }
    }
}

impl QuadratureScheme {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(Error::input("quadrature tolerances must be positive"));
        }
        if !(self.t_min > 0.0 && self.t_min < self.t_max) {
            return Err(Error::input("quadrature requires 0 < t_min < t_max"));
        }
        if self.levels == 0 {
            return Err(Error::input("quadrature needs at least one level"));
        }
        Ok(())
    }
}

/// Exponent, strip, and measure choice for one transform.
#[derive(Clone)]
pub struct MellinParams {
    pub alpha: Complex64,
    /// Argument of the gamma factor dividing the measure, if any.
    pub gamma_normalizer: Option<Complex64>,
    /// Open interval of `Re α` on which the integral converges.
    pub strip: (f64, f64),
    pub quadrature: QuadratureScheme,
}

impl MellinParams {
    /// Plain Haar-measure transform with the semigroup strip `(0, ∞)`.
    pub fn new(alpha: Complex64) -> Self {
        MellinParams {
            alpha,
            gamma_normalizer: None,
            strip: (0.0, f64::INFINITY),
            quadrature: QuadratureScheme::default(),
        }
    }

    /// Measure `dt/t / Γ(α)`, the normalization that makes the transform
    /// of `e^{-λt}` equal `λ^{-α}` exactly.
    pub fn normalized(alpha: Complex64) -> Self {
        MellinParams::new(alpha).with_normalizer(alpha)
    }

    pub fn with_normalizer(mut self, g: Complex64) -> Self {
        self.gamma_normalizer = Some(g);
        self
    }

    pub fn with_strip(mut self, lower: f64, upper: f64) -> Self {
        self.strip = (lower, upper);
        self
    }

    pub fn with_quadrature(mut self, q: QuadratureScheme) -> Self {
        self.quadrature = q;
        self
    }

    fn validate(&self) -> Result<()> {
        if !(self.strip.0 < self.strip.1) {
            return Err(Error::input(format!(
                "strip lower bound {} must lie below upper bound {}",
                self.strip.0, self.strip.1
            )));
        }
        self.quadrature.validate()?;
        if self.alpha.re <= self.strip.0 || self.alpha.re >= self.strip.1 {
            return Err(Error::input(format!(
                "Re(alpha) = {} lies outside the open strip ({}, {}); \
                 regularize the sampler (regularize_subtract_identity) or \
                 continue in alpha (continue_in_alpha) instead",
                self.alpha.re, self.strip.0, self.strip.1
            )));
        }
        Ok(())
    }
}

/// A function on `(0, ∞)` with matrix values, plus what is known about
/// its tails. Scalar integrands are 1x1 matrices.
#[derive(Clone)]
pub struct SemigroupSampler {
    evaluator: Arc<dyn Fn(f64) -> CMatrix + Send + Sync>,
    dim: usize,
    /// Exponential decay constant at `t → ∞` when known (for semigroups
    /// `e^{-tH}` this is the smallest eigenvalue of `H`).
    pub decay_rate: Option<f64>,
}

impl fmt::Debug for SemigroupSampler {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SemigroupSampler")
            .field("dim", &self.dim)
            .field("decay_rate", &self.decay_rate)
            .finish()
    }
}

impl SemigroupSampler {
    pub fn new(dim: usize, evaluator: impl Fn(f64) -> CMatrix + Send + Sync + 'static) -> Self {
        SemigroupSampler {
            evaluator: Arc::new(evaluator),
            dim,
            decay_rate: None,
        }
    }

    /// Scalar sampler as a 1x1 matrix evaluator.
    pub fn scalar(evaluator: impl Fn(f64) -> Complex64 + Send + Sync + 'static) -> Self {
        SemigroupSampler::new(1, move |t| CMatrix::from_element(1, 1, evaluator(t)))
    }

    pub fn with_decay_rate(mut self, rate: f64) -> Self {
        self.decay_rate = Some(rate);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, t: f64) -> CMatrix {
        (self.evaluator)(t)
    }
}

/// Transform value together with the achieved accuracy report.
#[derive(Debug, Clone)]
pub struct MellinOutcome {
    pub value: CMatrix,
    /// Difference between the last two refinement levels; bounds the
    /// remaining truncation error on converged runs.
    pub error_estimate: f64,
    pub levels_used: usize,
    pub evaluations: usize,
}

impl MellinOutcome {
    /// The 1x1 entry of a scalar transform.
    pub fn scalar(&self) -> Complex64 {
        self.value[(0, 0)]
    }
}

/// Numerical Mellin transform of `sampler` at the exponent in `params`.
pub fn mellin_transform(sampler: &SemigroupSampler, params: &MellinParams) -> Result<MellinOutcome> {
    params.validate()?;
    let mut outcome = match params.quadrature.kind {
        QuadKind::TanhSinhLogAxis => tanh_sinh_log_axis(sampler, params)?,
        QuadKind::GaussLaguerreSplit => gauss_laguerre(sampler, params)?,
    };
    if let Some(g) = params.gamma_normalizer {
        let norm = gamma_checked(g)?;
        outcome.value /= norm;
        outcome.error_estimate /= norm.norm();
    }
    Ok(outcome)
}

// Terms smaller than this fraction of the current peak, three in a row,
// terminate the outward node scan on each side.
const TAIL_CUTOFF: f64 = 1e-17;

fn tanh_sinh_log_axis(sampler: &SemigroupSampler, params: &MellinParams) -> Result<MellinOutcome> {
    let scheme = &params.quadrature;
    let alpha = params.alpha;
    let dim = sampler.dim();
    // Map u-nodes onto the log axis, clamped to the configured t-window.
    let u_cap = {
        let from_max = ((scheme.t_max.ln()) / FRAC_PI_2).asinh();
        let from_min = ((-scheme.t_min.ln()) / FRAC_PI_2).asinh();
        from_max.min(from_min).min(7.0)
    };
    let mut evaluations = 0usize;
    let mut term = |u: f64| -> Result<Option<CMatrix>> {
        let s = FRAC_PI_2 * u.sinh();
        let t = s.exp();
        if t < scheme.t_min || t > scheme.t_max {
            return Ok(None);
        }
        let sample = sampler.eval(t);
        if sample.nrows() != dim || sample.ncols() != dim {
            return Err(Error::input(format!(
                "sampler returned a {}x{} value, expected {dim}x{dim}",
                sample.nrows(),
                sample.ncols()
            )));
        }
        evaluations += 1;
        if sample.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
            return Ok(Some(sample));
        }
        if !all_finite(&sample) {
            return Err(Error::numerical(format!(
                "sampler produced a non-finite value at t = {t:.6e}"
            )));
        }
        let weight = (alpha * s).exp() * FRAC_PI_2 * u.cosh();
        let out = sample * weight;
        if !all_finite(&out) {
            return Err(Error::numerical(format!(
                "integrand overflowed at t = {t:.6e}; alpha is too close to the strip boundary"
            )));
        }
        Ok(Some(out))
    };

    let mut previous: Option<CMatrix> = None;
    let mut estimate = f64::INFINITY;
    for level in 0..scheme.levels {
        let h = 0.5 / (1u64 << level) as f64;
        let mut sum = match term(0.0)? {
            Some(m) => m,
            None => CMatrix::zeros(dim, dim),
        };
        let mut peak = frobenius_norm(&sum);
        for side in [1.0_f64, -1.0] {
            let mut tiny_run = 0usize;
            let mut j = 1u64;
            loop {
                let u = side * h * j as f64;
                if u.abs() > u_cap {
                    break;
                }
                match term(u)? {
                    Some(m) => {
                        let norm = frobenius_norm(&m);
                        sum += m;
                        peak = peak.max(norm);
                        if norm <= TAIL_CUTOFF * peak.max(f64::MIN_POSITIVE) {
                            tiny_run += 1;
                            if tiny_run >= 3 {
                                break;
                            }
                        } else {
                            tiny_run = 0;
                        }
                    }
                    None => break,
                }
                j += 1;
            }
        }
        let value = sum * Complex64::new(h, 0.0);
        if let Some(prev) = &previous {
            estimate = frobenius_norm(&(&value - prev));
            let scale = frobenius_norm(&value);
            if estimate <= scheme.abs_tol.max(scheme.rel_tol * scale) {
                return Ok(MellinOutcome {
                    value,
                    error_estimate: estimate,
                    levels_used: level + 1,
                    evaluations,
                });
            }
        }
        previous = Some(value);
    }
    Err(Error::numerical(format!(
        "Mellin quadrature did not converge within {} levels (last estimate {estimate:.3e})",
        scheme.levels
    )))
}

/// Generalized Gauss-Laguerre nodes and weights for weight `u^a e^{-u}`
/// via the Golub-Welsch eigenproblem of the Jacobi matrix.
fn gauss_laguerre_rule(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    let mut jacobi = nalgebra::DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jacobi[(k, k)] = 2.0 * k as f64 + 1.0 + a;
        if k + 1 < n {
            let off = ((k + 1) as f64 * ((k + 1) as f64 + a)).sqrt();
            jacobi[(k, k + 1)] = off;
            jacobi[(k + 1, k)] = off;
        }
    }
    let eig = jacobi.symmetric_eigen();
    let mu0 = gamma(Complex64::new(a + 1.0, 0.0)).re;
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let node = eig.eigenvalues[i];
            let w = mu0 * eig.eigenvectors[(0, i)].powi(2);
            (node, w)
        })
        .collect();
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    pairs.into_iter().unzip()
}

fn gauss_laguerre(sampler: &SemigroupSampler, params: &MellinParams) -> Result<MellinOutcome> {
    let scheme = &params.quadrature;
    let alpha = params.alpha;
    let rate = sampler.decay_rate.ok_or_else(|| {
        Error::input("Gauss-Laguerre quadrature needs a sampler with a known decay_rate")
    })?;
    if !(rate > 0.0) {
        return Err(Error::input("decay_rate must be positive"));
    }
    if alpha.re <= 0.0 || alpha.im != 0.0 {
        // A complex exponent leaves a u^{i Im α} factor in the integrand,
        // which oscillates logarithmically at the origin and defeats the
        // polynomial exactness the rule relies on.
        return Err(Error::input(
            "Gauss-Laguerre quadrature requires real alpha > 0; use the tanh-sinh scheme",
        ));
    }
    // ∫ F(t) t^α dt/t  =  c^{-α} ∫ e^{-u} u^{α - 1} [F(u/c) e^u] du
    let a = alpha.re - 1.0;
    let prefactor = Complex64::new(rate, 0.0).powc(-alpha);
    let dim = sampler.dim();
    let mut evaluations = 0usize;
    let mut previous: Option<CMatrix> = None;
    let mut estimate = f64::INFINITY;
    // The Golub-Welsch eigenproblem is dense; past 512 nodes it costs more
    // than it can ever return in accuracy.
    let max_level = scheme.levels.min(6);
    for level in 0..max_level {
        let n = 16 << level;
        let (nodes, weights) = gauss_laguerre_rule(n, a);
        let mut sum = CMatrix::zeros(dim, dim);
        for (&u, &w) in nodes.iter().zip(weights.iter()) {
            let t = u / rate;
            if t < scheme.t_min || t > scheme.t_max {
                continue;
            }
            if w <= 0.0 {
                continue;
            }
            let sample = sampler.eval(t);
            evaluations += 1;
            if sample.iter().all(|z| z.re == 0.0 && z.im == 0.0) {
                continue;
            }
            // e^u compensates the Laguerre weight; combine both in log
            // space since either factor alone can overflow. u^{i Im α}
            // restores the imaginary part of the exponent.
            let magnitude = (u + w.ln()).exp();
            if magnitude == 0.0 {
                continue;
            }
            let contribution = sample * Complex64::new(magnitude, 0.0);
            if !all_finite(&contribution) {
                return Err(Error::numerical(format!(
                    "Gauss-Laguerre integrand overflowed at node t = {t:.6e}"
                )));
            }
            sum += contribution;
        }
        let value = sum * prefactor;
        if let Some(prev) = &previous {
            estimate = frobenius_norm(&(&value - prev));
            let scale = frobenius_norm(&value);
            if estimate <= scheme.abs_tol.max(scheme.rel_tol * scale) {
                return Ok(MellinOutcome {
                    value,
                    error_estimate: estimate,
                    levels_used: level + 1,
                    evaluations,
                });
            }
        }
        previous = Some(value);
    }
    Err(Error::numerical(format!(
        "Gauss-Laguerre quadrature did not converge within {} levels (last estimate {estimate:.3e})",
        scheme.levels
    )))
}

/// Probe points used to classify the sampler's behavior at `t → 0`.
const ZERO_PROBES: (f64, f64) = (1e-3, 1e-6);

/// Open interval of `Re α` on which the transform of `sampler` converges.
///
/// The `t → ∞` side comes from declared decay data: an exponential
/// `decay_rate` makes it unbounded, otherwise `n_power` states that the
/// sampler falls off like `t^{-n_power}` and caps the strip there. The
/// `t → 0` side is probed numerically: essential decay pushes the bound
/// to `-∞`, a power law `t^q` moves it to `-q`, a finite limit leaves 0.
pub fn fundamental_strip(sampler: &SemigroupSampler, n_power: Option<f64>) -> Result<(f64, f64)> {
    let upper = match (sampler.decay_rate, n_power) {
        (Some(rate), _) if rate > 0.0 => f64::INFINITY,
        (_, Some(p)) => p,
        _ => {
            return Err(Error::input(
                "insufficient decay data: set decay_rate or supply the power-law exponent at infinity",
            ))
        }
    };
    let (t1, t2) = ZERO_PROBES;
    let n1 = frobenius_norm(&sampler.eval(t1));
    let n2 = frobenius_norm(&sampler.eval(t2));
    let lower = if n2 < 1e-60 {
        f64::NEG_INFINITY
    } else {
        let q = (n1 / n2).ln() / (t1 / t2).ln();
        if q.abs() < 1e-2 {
            0.0
        } else {
            -q
        }
    };
    if lower >= upper {
        return Err(Error::numerical(format!(
            "detected an empty strip ({lower}, {upper}); the transform converges nowhere"
        )));
    }
    Ok((lower, upper))
}

/// The regularized sampler `t ↦ F(t) - e^{-t} I`.
///
/// Subtracting the scalar semigroup cancels the `t → 0` limit of
/// semigroup-type samplers, which moves the lower strip edge from 0 to -1
/// and lets exponents continue through the origin.
pub fn regularize_subtract_identity(sampler: &SemigroupSampler) -> SemigroupSampler {
    let inner = sampler.clone();
    let dim = sampler.dim();
    let rate = sampler.decay_rate.map(|r| r.min(1.0));
    let regularized = SemigroupSampler::new(dim, move |t| {
        let mut m = inner.eval(t);
        let e = Complex64::new((-t).exp(), 0.0);
        for k in 0..dim {
            m[(k, k)] -= e;
        }
        m
    });
    match rate {
        Some(r) => regularized.with_decay_rate(r),
        None => regularized,
    }
}

/// A one-parameter family `α ↦ C g(α)` with known shape `g` and unknown
/// scale `C`, used to continue transform values past the strip boundary.
#[derive(Clone)]
pub struct ContinuationModel {
    name: String,
    shape: Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>,
}

impl fmt::Debug for ContinuationModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ContinuationModel").field("name", &self.name).finish()
    }
}

impl ContinuationModel {
    pub fn new(name: impl Into<String>, shape: impl Fn(Complex64) -> Complex64 + Send + Sync + 'static) -> Self {
        ContinuationModel {
            name: name.into(),
            shape: Arc::new(shape),
        }
    }

    /// The family `Γ(u - α) a^{α - u}`, the exact shape of heat-kernel
    /// Mellin transforms with scale parameter `a`.
    pub fn gamma_power(u: f64, a: f64) -> Self {
        ContinuationModel::new(format!("gamma_power(u={u}, a={a})"), move |alpha| {
            gamma(Complex64::new(u, 0.0) - alpha) * Complex64::new(a, 0.0).powc(alpha - u)
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn shape_at(&self, alpha: Complex64) -> Complex64 {
        (self.shape)(alpha)
    }
}

/// Fit the model scale on in-strip samples and evaluate at `target_alpha`.
///
/// The scale is the least-squares solution of `value_i ≈ C g(α_i)`,
/// shared across matrix entries. Large relative residuals mean the model
/// does not describe the data and are reported as a numerical failure.
pub fn continue_in_alpha(
    samples: &[(Complex64, CMatrix)],
    target_alpha: Complex64,
    model: &ContinuationModel,
) -> Result<CMatrix> {
    if samples.len() < 3 {
        return Err(Error::input(format!(
            "analytic continuation needs at least 3 in-strip samples, got {}",
            samples.len()
        )));
    }
    let dim_r = samples[0].1.nrows();
    let dim_c = samples[0].1.ncols();
    let mut numerator = CMatrix::zeros(dim_r, dim_c);
    let mut gram = 0.0_f64;
    let mut shape_norms = Vec::with_capacity(samples.len());
    for (alpha, value) in samples {
        if value.nrows() != dim_r || value.ncols() != dim_c {
            return Err(Error::input("continuation samples have mismatched shapes"));
        }
        let g = model.shape_at(*alpha);
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::numerical(format!(
                "model {} is singular at sample alpha = {alpha}",
                model.name()
            )));
        }
        shape_norms.push(g.norm());
        numerator += value * g.conj();
        gram += g.norm_sqr();
    }
    let g_max = shape_norms.iter().cloned().fold(0.0, f64::max);
    let g_min = shape_norms.iter().cloned().fold(f64::INFINITY, f64::min);
    if gram <= 0.0 || g_min == 0.0 {
        return Err(Error::numerical(format!(
            "model {} vanishes on the samples; fit is degenerate",
            model.name()
        )));
    }
    let scale = numerator / Complex64::new(gram, 0.0);
    // Residual check: the fitted one-parameter family must reproduce the
    // samples, otherwise the model is wrong for this data.
    let mut worst = 0.0_f64;
    for (alpha, value) in samples {
        let predicted = &scale * model.shape_at(*alpha);
        let denom = frobenius_norm(value).max(1e-300);
        worst = worst.max(frobenius_norm(&(&predicted - value)) / denom);
    }
    if worst > 1e-4 {
        return Err(Error::numerical(format!(
            "continuation fit residual {worst:.3e} too large for model {} \
             (shape dynamic range {:.3e})",
            model.name(),
            g_max / g_min
        )));
    }
    let g_target = model.shape_at(target_alpha);
    if !(g_target.re.is_finite() && g_target.im.is_finite()) {
        return Err(Error::numerical(format!(
            "model {} is singular at the target alpha = {target_alpha}",
            model.name()
        )));
    }
    Ok(scale * g_target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use crate::linalg::max_abs_diff;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn exp_sampler() -> SemigroupSampler {
        SemigroupSampler::scalar(|t| c((-t).exp(), 0.0)).with_decay_rate(1.0)
    }

    #[test]
    fn gamma_identity_with_normalizer() {
        let out = mellin_transform(&exp_sampler(), &MellinParams::normalized(c(1.0, 0.0))).unwrap();
        assert_relative_eq!(out.scalar().re, 1.0, max_relative = 1e-11);
        assert!(out.scalar().im.abs() < 1e-12);
    }

    #[test]
    fn reproduces_gamma_of_2p5() {
        // Frozen 30-digit reference: Gamma(2.5) = 1.3293403881791370205
        let out = mellin_transform(&exp_sampler(), &MellinParams::new(c(2.5, 0.0))).unwrap();
        assert_relative_eq!(out.scalar().re, 1.329_340_388_179_137_0, max_relative = 1e-11);
        assert!(out.error_estimate < 1e-9);
    }

    #[test]
    fn matrix_semigroup_gives_inverse_square_root() {
        // H = diag(1, 4): transform of e^{-tH} at alpha = 1/2 is H^{-1/2}.
        let sampler = SemigroupSampler::new(2, |t| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c((-t).exp(), 0.0),
                c((-4.0 * t).exp(), 0.0),
            ]))
        })
        .with_decay_rate(1.0);
        let out = mellin_transform(&sampler, &MellinParams::normalized(c(0.5, 0.0))).unwrap();
        assert_relative_eq!(out.value[(0, 0)].re, 1.0, max_relative = 1e-10);
        assert_relative_eq!(out.value[(1, 1)].re, 0.5, max_relative = 1e-10);
        assert!(out.value[(0, 1)].norm() < 1e-12);
    }

    #[test]
    fn scaling_law_holds_for_exponential_family() {
        // ∫ e^{-λt} t^α dt/t / Γ(α) = λ^{-α}, including complex α.
        for &lambda in &[0.07, 1.0, 3.5, 40.0] {
            for &alpha in &[c(0.25, 0.0), c(1.0, 0.0), c(1.7, 0.0), c(0.8, 0.6)] {
                let sampler =
                    SemigroupSampler::scalar(move |t| c((-lambda * t).exp(), 0.0)).with_decay_rate(lambda);
                let out = mellin_transform(&sampler, &MellinParams::normalized(alpha)).unwrap();
                let want = c(lambda, 0.0).powc(-alpha);
                assert_relative_eq!(out.scalar().re, want.re, max_relative = 1e-9, epsilon = 1e-12);
                assert_relative_eq!(out.scalar().im, want.im, max_relative = 1e-9, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn gauss_laguerre_agrees_with_tanh_sinh() {
        let sampler = SemigroupSampler::scalar(|t| c((-2.0 * t).exp(), 0.0)).with_decay_rate(2.0);
        for &alpha in &[c(0.5, 0.0), c(1.7, 0.0), c(1.0, 0.4)] {
            let de = mellin_transform(&sampler, &MellinParams::normalized(alpha)).unwrap();
            let mut params = MellinParams::normalized(alpha);
            params.quadrature.kind = QuadKind::GaussLaguerreSplit;
            let gl = mellin_transform(&sampler, &params).unwrap();
            assert!((de.scalar() - gl.scalar()).norm() < 1e-9);
        }
    }

    #[test]
    fn transform_commutes_with_unitary_conjugation() {
        // V F(t) V^H transforms to V M[F] V^H.
        let inv_sqrt2 = 1.0 / 2.0_f64.sqrt();
        let v = CMatrix::from_row_slice(
            2,
            2,
            &[c(inv_sqrt2, 0.0), c(inv_sqrt2, 0.0), c(0.0, inv_sqrt2), c(0.0, -inv_sqrt2)],
        );
        assert!(crate::linalg::unitarity_defect(&v) < 1e-14);
        let base = |t: f64| {
            CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
                c((-t).exp(), 0.0),
                c((-3.0 * t).exp(), 0.0),
            ]))
        };
        let plain = SemigroupSampler::new(2, base).with_decay_rate(1.0);
        let v2 = v.clone();
        let conjugated =
            SemigroupSampler::new(2, move |t| &v2 * base(t) * v2.adjoint()).with_decay_rate(1.0);
        let p = MellinParams::normalized(c(0.7, 0.0));
        let lhs = mellin_transform(&conjugated, &p).unwrap().value;
        let rhs = &v * mellin_transform(&plain, &p).unwrap().value * v.adjoint();
        assert!(max_abs_diff(&lhs, &rhs) < 1e-10);
    }

    #[test]
    fn refinement_estimates_shrink_monotonically() {
        // Run with increasing level budgets and watch the reported
        // estimate fall until the tolerance is reached.
        let mut last = f64::INFINITY;
        for levels in 2..=6 {
            let mut params = MellinParams::new(c(2.5, 0.0));
            params.quadrature.levels = levels;
            params.quadrature.rel_tol = 1e-15;
            params.quadrature.abs_tol = 1e-16;
            let est = match mellin_transform(&exp_sampler(), &params) {
                Ok(out) => out.error_estimate,
                Err(Error::Numerical(msg)) => {
                    // Extract the reported estimate from the failure path by
                    // rerunning at the same depth with loose tolerances.
                    let mut loose = MellinParams::new(c(2.5, 0.0));
                    loose.quadrature.levels = levels;
                    loose.quadrature.rel_tol = 1e30;
                    let _ = msg;
                    mellin_transform(&exp_sampler(), &loose).unwrap().error_estimate
                }
                Err(e) => panic!("unexpected error {e}"),
            };
            assert!(est <= last * 1.01, "estimate grew: {est} after {last}");
            last = est;
        }
        // And the estimate bounds the true error on the gamma family.
        let out = mellin_transform(&exp_sampler(), &MellinParams::new(c(2.5, 0.0))).unwrap();
        let truth = 1.329_340_388_179_137_0;
        assert!((out.scalar().re - truth).abs() <= out.error_estimate.max(1e-13));
    }

    #[test]
    fn out_of_strip_alpha_is_an_input_error() {
        let params = MellinParams::new(c(-0.5, 0.0));
        let err = mellin_transform(&exp_sampler(), &params).unwrap_err();
        assert_eq!(err.category(), "input");
        assert!(err.to_string().contains("regularize"));
    }

    #[test]
    fn strip_detection_heat_kernel_unbounded() {
        // Exponential decay on both ends: unbounded strip.
        let s = SemigroupSampler::scalar(|t| c((-t - 1.0 / t).exp(), 0.0)).with_decay_rate(1.0);
        let (lo, hi) = fundamental_strip(&s, None).unwrap();
        assert!(lo.is_infinite() && lo < 0.0);
        assert!(hi.is_infinite() && hi > 0.0);
    }

    #[test]
    fn strip_detection_laplacian_integrands() {
        // e^{-a/t} t^{-n/2} falls like t^{-n/2} at infinity and vanishes
        // to all orders at zero.
        for (n, want_upper) in [(3.0, 1.5), (2.0, 1.0)] {
            let s = SemigroupSampler::scalar(move |t| c((-PI / t).exp() * t.powf(-n / 2.0), 0.0));
            let (lo, hi) = fundamental_strip(&s, Some(n / 2.0)).unwrap();
            assert!(lo.is_infinite() && lo < 0.0);
            assert_relative_eq!(hi, want_upper, epsilon = 1e-12);
        }
        // Semigroup-type samplers keep the lower edge at zero.
        let (lo, hi) = fundamental_strip(&exp_sampler(), None).unwrap();
        assert_eq!(lo, 0.0);
        assert!(hi.is_infinite());
    }

    #[test]
    fn strip_detection_requires_decay_data() {
        let s = SemigroupSampler::scalar(|t| c(1.0 / (1.0 + t), 0.0));
        assert_eq!(fundamental_strip(&s, None).unwrap_err().category(), "input");
    }

    #[test]
    fn identity_subtraction_examples() {
        // F = e^{-t} regularizes to zero identically.
        let reg = regularize_subtract_identity(&exp_sampler());
        for &t in &[0.1, 1.0, 7.3] {
            assert!(reg.eval(t)[(0, 0)].norm() < 1e-16);
        }
        // F = e^{-a/t} with a = π at t = 1 becomes e^{-π} - e^{-1}.
        let s = SemigroupSampler::scalar(|t| c((-PI / t).exp(), 0.0));
        let reg = regularize_subtract_identity(&s);
        let want = (-PI).exp() - (-1.0_f64).exp();
        assert_relative_eq!(reg.eval(1.0)[(0, 0)].re, want, max_relative = 1e-14);
    }

    #[test]
    fn subtraction_extends_semigroup_strip_left() {
        // M[e^{-λt} - e^{-t}; α] = Γ(α)(λ^{-α} - 1) continues through α = 0;
        // check at α = -1/2 against the closed form. The cancellation in
        // e^{-λt} - e^{-t} near t = 0 caps the reachable accuracy around
        // 1e-8, so the tolerances here are looser than elsewhere.
        let lambda = 3.0_f64;
        let s = SemigroupSampler::scalar(move |t| c((-lambda * t).exp(), 0.0)).with_decay_rate(lambda);
        let reg = regularize_subtract_identity(&s);
        let alpha = c(-0.5, 0.0);
        let mut params = MellinParams::new(alpha).with_strip(-1.0, f64::INFINITY);
        params.quadrature.rel_tol = 1e-7;
        params.quadrature.abs_tol = 1e-9;
        let got = mellin_transform(&reg, &params).unwrap().scalar();
        let want = gamma(alpha) * (c(lambda, 0.0).powc(-alpha) - 1.0);
        assert_relative_eq!(got.re, want.re, max_relative = 1e-6);
        assert!(got.im.abs() < 1e-8);
    }

    #[test]
    fn continuation_recovers_gamma_power_scale() {
        // Exact model data with C = 1 recovers the scale and the target.
        let model = ContinuationModel::gamma_power(0.5, PI);
        let alphas = [c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)];
        let samples: Vec<(Complex64, CMatrix)> = alphas
            .iter()
            .map(|&a| (a, CMatrix::from_element(1, 1, model.shape_at(a))))
            .collect();
        let at_one = continue_in_alpha(&samples, c(1.0, 0.0), &model).unwrap()[(0, 0)];
        // Γ(-1/2) π^{1/2} = -2π
        assert_relative_eq!(at_one.re, -2.0 * PI, max_relative = 1e-10);
        assert!(at_one.im.abs() < 1e-10);
        // Scale recovery: model value at a probe alpha must match exactly.
        let probe = c(0.25, 0.0);
        let predicted = continue_in_alpha(&samples, probe, &model).unwrap()[(0, 0)];
        assert_relative_eq!(predicted.re, model.shape_at(probe).re, max_relative = 1e-10);
    }

    #[test]
    fn continuation_tolerates_small_noise() {
        let model = ContinuationModel::gamma_power(0.5, PI);
        let alphas = [c(0.1, 0.0), c(0.2, 0.0), c(0.3, 0.0)];
        let samples: Vec<(Complex64, CMatrix)> = alphas
            .iter()
            .enumerate()
            .map(|(k, &a)| {
                let noise = 1e-9 * (k as f64 - 1.0);
                (a, CMatrix::from_element(1, 1, model.shape_at(a) + c(noise, 0.0)))
            })
            .collect();
        let at_one = continue_in_alpha(&samples, c(1.0, 0.0), &model).unwrap()[(0, 0)];
        assert!((at_one.re + 2.0 * PI).abs() < 1e-6);
    }

    #[test]
    fn continuation_rejects_wrong_model() {
        let model = ContinuationModel::gamma_power(0.5, PI);
        let samples: Vec<(Complex64, CMatrix)> = [0.1, 0.2, 0.3]
            .iter()
            .map(|&a| (c(a, 0.0), CMatrix::from_element(1, 1, c(a * a, 1.0))))
            .collect();
        let err = continue_in_alpha(&samples, c(1.0, 0.0), &model).unwrap_err();
        assert_eq!(err.category(), "numerical");
    }
}

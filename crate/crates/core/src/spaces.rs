//! Norms on the scale 𝒟, H², 𝒜ᵖ_α, 𝒟ᵖ_α and the harmonic 𝒟_α(𝕋), with
//! coefficient and quadrature evaluators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_disc, Angular, DiscRule};
use crate::series::{BoundaryGrid, PowerSeries};

/// `(p, α, β)` with `δ = 2 + β - (2+α)/p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub p: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl SpaceParams {
    pub fn new(p: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::Precondition(format!("p = {p} must be at least 1")));
        }
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Precondition(format!("alpha = {alpha} must exceed -1")));
        }
        if !(beta >= 0.0) || !beta.is_finite() {
            return Err(Error::Precondition(format!("beta = {beta} must be nonnegative")));
        }
        Ok(Self { p, alpha, beta })
    }

    /// The Dirichlet space 𝒟 = 𝒟²_0 with β = 0.
    pub fn dirichlet() -> Self {
        Self { p: 2.0, alpha: 0.0, beta: 0.0 }
    }

    pub fn delta(&self) -> f64 {
        2.0 + self.beta - (2.0 + self.alpha) / self.p
    }

    pub fn require_positive_delta(&self) -> Result<f64> {
        let d = self.delta();
        if d > 0.0 {
            Ok(d)
        } else {
            Err(Error::Precondition(format!("delta = 2 + beta - (2+alpha)/p = {d} must be positive")))
        }
    }
}

/// `F_{λ,β}(z) = (1 - λ̄z)^{-1-β}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestFunction {
    pub lambda: Complex64,
    pub beta: f64,
}

impl TestFunction {
    pub fn new(lambda: Complex64, beta: f64) -> Result<Self> {
        if lambda.norm() >= 1.0 {
            return Err(Error::Domain(format!("|lambda| = {} must be below 1", lambda.norm())));
        }
        Ok(Self { lambda, beta })
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        (Complex64::new(1.0, 0.0) - self.lambda.conj() * z).powf(-1.0 - self.beta)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        self.lambda.conj() * (1.0 + self.beta) * (Complex64::new(1.0, 0.0) - self.lambda.conj() * z).powf(-2.0 - self.beta)
    }

    /// `|F'(w)|^p` without forming complex powers.
    pub fn deriv_abs_pow(&self, w: Complex64, p: f64) -> f64 {
        let d = (Complex64::new(1.0, 0.0) - self.lambda.conj() * w).norm_sqr();
        ((1.0 + self.beta) * self.lambda.norm()).powf(p) * d.powf(-0.5 * (2.0 + self.beta) * p)
    }

    pub fn to_series(&self, order: usize) -> PowerSeries {
        // (1 - x)^{-1-β} = Σ (1+β)_n / n! x^n
        let mut c = vec![Complex64::new(0.0, 0.0); order + 1];
        let lb = self.lambda.conj();
        let mut coef = 1.0;
        let mut pw = Complex64::new(1.0, 0.0);
        for (n, v) in c.iter_mut().enumerate() {
            *v = pw * coef;
            coef *= (1.0 + self.beta + n as f64) / (n as f64 + 1.0);
            pw *= lb;
        }
        PowerSeries::new(c).expect("finite coefficients")
    }
}

/// `𝒟(f) = Σ n |f̂(n)|²`.
pub fn dirichlet_integral(f: &PowerSeries) -> f64 {
    f.coeffs().iter().enumerate().map(|(n, c)| n as f64 * c.norm_sqr()).sum()
}

/// `𝒟(f) = ∫ |f'|² dA` by quadrature; the rule must have `α = 0`.
pub fn dirichlet_integral_quadrature(f: &PowerSeries, rule: &DiscRule) -> Result<f64> {
    if rule.alpha != 0.0 {
        return Err(Error::Precondition("Dirichlet integral needs an unweighted rule".into()));
    }
    let d = f.derivative();
    integrate_disc(|z| d.eval_with_deriv_unchecked(z).0.norm_sqr(), rule)
}

pub fn dirichlet_norm(f: &PowerSeries) -> f64 {
    (f.coeff(0).norm_sqr() + dirichlet_integral(f)).sqrt()
}

pub fn hardy_norm_sq(f: &PowerSeries) -> f64 {
    f.coeffs().iter().map(|c| c.norm_sqr()).sum()
}

fn check_rule(params: &SpaceParams, rule: &DiscRule) -> Result<()> {
    if (rule.alpha - params.alpha).abs() > 1e-15 {
        return Err(Error::Precondition(format!(
            "rule weight alpha = {} does not match space alpha = {}",
            rule.alpha, params.alpha
        )));
    }
    Ok(())
}

/// `‖g‖_{p,α} = (∫ |g|^p dA_α)^{1/p}` for `g` given pointwise as `|g|`.
pub fn lp_norm<F>(abs_g: F, p: f64, rule: &DiscRule) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    Ok(integrate_disc(|z| abs_g(z).powf(p), rule)?.powf(1.0 / p))
}

/// `‖f'‖_{p,α}` by disc quadrature.
pub fn besov_seminorm(f: &PowerSeries, params: &SpaceParams, rule: &DiscRule) -> Result<f64> {
    check_rule(params, rule)?;
    let d = f.derivative();
    lp_norm(|z| d.eval_with_deriv_unchecked(z).0.norm(), params.p, rule)
}

/// `(Σ n² B(n) |f̂(n)|²)^{1/2}` with the moments `B(n) = ∫|z|^{2n-2} dA_α`
/// taken from the rule's own radial nodes.
pub fn besov_seminorm_coefficients(f: &PowerSeries, rule: &DiscRule) -> f64 {
    let moment = |n: usize| -> f64 {
        rule.radial_nodes
            .iter()
            .zip(&rule.radial_weights)
            .map(|(r, w)| w * r.powi(2 * n as i32 - 2))
            .sum()
    };
    f.coeffs()
        .iter()
        .enumerate()
        .skip(1)
        .map(|(n, c)| (n * n) as f64 * moment(n) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `‖f‖ᵖ_{𝒟ᵖ_α} = |f(0)|ᵖ + ‖f'‖ᵖ_{p,α}`.
pub fn besov_norm_pow(f: &PowerSeries, params: &SpaceParams, rule: &DiscRule) -> Result<f64> {
    Ok(f.coeff(0).norm().powf(params.p) + besov_seminorm(f, params, rule)?.powf(params.p))
}

/// Rule suited to integrands peaked at scale `width` near the circle.
pub fn peaked_rule(alpha: f64, width: f64) -> Result<DiscRule> {
    let width = width.clamp(1e-12, 1.0);
    let levels = ((1.0 / width).log2().ceil() as usize + 10).clamp(12, 48);
    let max = (1usize << 17).min((64.0 / width).ceil() as usize).next_power_of_two().max(128);
    DiscRule::graded(alpha, levels, 16, true, Angular::Adaptive { min: 128, max, per_width: 24.0, floor: width })
}

/// `‖F_{λ,β}‖ᵖ_{𝒟ᵖ_α}` evaluated pointwise from the closed-form derivative.
pub fn test_function_norm_pow(tf: &TestFunction, params: &SpaceParams, rule: &DiscRule) -> Result<f64> {
    check_rule(params, rule)?;
    let p = params.p;
    Ok(1.0 + integrate_disc(|z| tf.deriv_abs_pow(z, p), rule)?)
}

/// `|f(z) - ∫ f(w) / (1 - w̄z)^{2+α} dA_α(w)|`.
pub fn reproducing_residual(f: &PowerSeries, alpha: f64, z: Complex64, rule: &DiscRule) -> Result<f64> {
    if z.norm() > 0.9 + 1e-12 {
        return Err(Error::Precondition(format!("|z| = {} exceeds 0.9", z.norm())));
    }
    if (rule.alpha - alpha).abs() > 1e-15 {
        return Err(Error::Precondition("rule weight does not match alpha".into()));
    }
    let one = Complex64::new(1.0, 0.0);
    let kern = |w: Complex64| f.eval_with_deriv_unchecked(w).0 * (one - w.conj() * z).powf(-2.0 - alpha);
    let re = integrate_disc(|w| kern(w).re, rule)?;
    let im = integrate_disc(|w| kern(w).im, rule)?;
    Ok((f.evaluate(z)? - Complex64::new(re, im)).norm())
}

/// `Σ_{n∈ℤ} |û(n)|² (1+|n|)^{1-α}` from the grid's Fourier coefficients.
pub fn harmonic_dirichlet_norm(u: &BoundaryGrid, alpha: f64) -> f64 {
    let c = u.fourier_coefficients();
    let m = c.len();
    c.iter()
        .enumerate()
        .map(|(k, v)| {
            let n = if k <= m / 2 { k } else { m - k };
            v.norm_sqr() * (1.0 + n as f64).powf(1.0 - alpha)
        })
        .sum()
}

/// `∫ dA_c(λ) / |1 - zλ̄|^{2+c+d}` by quadrature.
pub fn kernel_integral(z: Complex64, c: f64, d: f64, rule: &DiscRule) -> Result<f64> {
    if (rule.alpha - c).abs() > 1e-15 {
        return Err(Error::Precondition("rule weight does not match c".into()));
    }
    let e = -0.5 * (2.0 + c + d);
    integrate_disc(|l| (Complex64::new(1.0, 0.0) - z * l.conj()).norm_sqr().powf(e), rule)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cr(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn dirichlet_examples() {
        let rule = DiscRule::gauss(0.0, 64, Angular::Fixed(256)).unwrap();
        for n in 1..=12 {
            let f = PowerSeries::monomial(n, n);
            assert!((dirichlet_integral(&f) - n as f64).abs() < 1e-14);
            assert!((dirichlet_integral_quadrature(&f, &rule).unwrap() - n as f64).abs() < 1e-9);
        }
        assert_eq!(dirichlet_integral(&PowerSeries::constant(cr(2.0), 3)), 0.0);
        let l: f64 = 0.6;
        let f = TestFunction::new(cr(l), 0.0).unwrap().to_series(400);
        assert!((dirichlet_integral(&f) - l * l / (1.0 - l * l).powi(2)).abs() < 1e-8);
        assert!((dirichlet_norm(&PowerSeries::constant(cr(1.0), 1)) - 1.0).abs() < 1e-15);
        assert!((dirichlet_norm(&PowerSeries::monomial(1, 1)) - 1.0).abs() < 1e-15);
        assert!((dirichlet_norm(&PowerSeries::from_real(&[1.0, 1.0]).unwrap()) - 2f64.sqrt()).abs() < 1e-15);
        assert!((hardy_norm_sq(&PowerSeries::geometric(cr(0.5), 80)) - 4.0 / 3.0).abs() < 1e-14);
        assert_eq!(hardy_norm_sq(&PowerSeries::zeros(4)), 0.0);
    }

    #[test]
    fn coefficient_and_quadrature_agree_on_polynomials() {
        let rule = DiscRule::gauss(0.0, 64, Angular::Fixed(256)).unwrap();
        let coeffs: Vec<Complex64> = (0..=64).map(|k| Complex64::new((k as f64 * 0.7).sin(), (k as f64 * 0.3).cos() / (1 + k) as f64)).collect();
        let f = PowerSeries::new(coeffs).unwrap();
        let a = dirichlet_integral(&f);
        let b = dirichlet_integral_quadrature(&f, &rule).unwrap();
        assert!((a - b).abs() < 1e-8 * a);
    }

    #[test]
    fn besov_examples() {
        for (p, a) in [(2.0, 0.0), (3.0, 1.0), (1.5, -0.5)] {
            let params = SpaceParams::new(p, a, 0.0).unwrap();
            let rule = DiscRule::gauss(a, 32, Angular::Fixed(16)).unwrap();
            let z = PowerSeries::monomial(1, 1);
            assert!((besov_seminorm(&z, &params, &rule).unwrap() - 1.0).abs() < 1e-12);
        }
        let params = SpaceParams::new(2.0, 0.0, 0.0).unwrap();
        let rule = DiscRule::gauss(0.0, 32, Angular::Fixed(16)).unwrap();
        let z2 = PowerSeries::monomial(2, 2);
        assert!((besov_seminorm(&z2, &params, &rule).unwrap() - 2f64.sqrt()).abs() < 1e-12);
        for a in [0.0, 0.5, 1.0] {
            let params = SpaceParams::new(2.0, a, 0.0).unwrap();
            let rule = DiscRule::gauss(a, 48, Angular::Fixed(128)).unwrap();
            let f = PowerSeries::geometric(cr(0.4), 30);
            let q = besov_seminorm(&f, &params, &rule).unwrap();
            let c = besov_seminorm_coefficients(&f, &rule);
            assert!((q - c).abs() < 1e-6 * c);
        }
    }

    #[test]
    fn delta_and_validation() {
        assert_eq!(SpaceParams::dirichlet().delta(), 1.0);
        assert!(SpaceParams::new(0.5, 0.0, 0.0).is_err());
        assert!(SpaceParams::new(2.0, -1.0, 0.0).is_err());
        assert!(SpaceParams::new(1.0, 2.0, 0.0).unwrap().require_positive_delta().is_err());
    }

    #[test]
    fn reproducing_examples() {
        let r0 = DiscRule::gauss(0.0, 48, Angular::Fixed(128)).unwrap();
        let one = PowerSeries::constant(cr(1.0), 1);
        assert!(reproducing_residual(&one, 0.0, Complex64::new(0.4, 0.5), &r0).unwrap() < 1e-10);
        let z3 = PowerSeries::monomial(3, 3);
        assert!(reproducing_residual(&z3, 0.0, cr(0.5), &r0).unwrap() < 1e-8);
        let r1 = DiscRule::gauss(1.0, 64, Angular::Fixed(256)).unwrap();
        let g = PowerSeries::geometric(cr(0.5), 80);
        assert!(reproducing_residual(&g, 1.0, Complex64::new(0.0, 0.3), &r1).unwrap() < 1e-7);
        assert!(reproducing_residual(&g, 0.0, cr(0.95), &r0).is_err());
    }

    #[test]
    fn harmonic_dirichlet_examples() {
        let one = BoundaryGrid::from_real(vec![1.0; 64]).unwrap();
        assert!((harmonic_dirichlet_norm(&one, 0.0) - 1.0).abs() < 1e-14);
        let cos = BoundaryGrid::from_real_fn(64, f64::cos).unwrap();
        assert!((harmonic_dirichlet_norm(&cos, 0.0) - 1.0).abs() < 1e-14);
        assert!((harmonic_dirichlet_norm(&cos, 0.5) - 2f64.sqrt() / 2.0).abs() < 1e-14);
    }

    #[test]
    fn test_function_series_and_pointwise_agree() {
        let tf = TestFunction::new(Complex64::new(0.3, 0.4), 1.0).unwrap();
        let s = tf.to_series(300);
        let z = Complex64::new(0.2, -0.6);
        assert!((s.evaluate(z).unwrap() - tf.eval(z)).norm() < 1e-12);
        assert!((s.evaluate_deriv(z).unwrap() - tf.deriv(z)).norm() < 1e-11);
        assert!((tf.deriv_abs_pow(z, 3.0) - tf.deriv(z).norm().powi(3)).abs() < 1e-12 * tf.deriv(z).norm().powi(3));
    }
}

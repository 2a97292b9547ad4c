//! Truncated power series and the FFT bridge to boundary samples.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized FFT. The forward transform uses `e^{-2πi nk/M}`.
pub(crate) fn fft_in_place(buf: &mut [Complex64], inverse: bool) {
    if buf.len() <= 1 {
        return;
    }
    let plan = PLANNER.with(|p| {
        let mut p = p.borrow_mut();
        if inverse {
            p.plan_fft_inverse(buf.len())
        } else {
            p.plan_fft_forward(buf.len())
        }
    });
    plan.process(buf);
}

fn check_pow2(m: usize, min: usize) -> Result<()> {
    if !m.is_power_of_two() || m < min {
        return Err(Error::InvalidGrid(format!(
            "size {m} must be a power of two and at least {min}"
        )));
    }
    Ok(())
}

/// Taylor coefficients `c_0..c_N` of an analytic function on the disc.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<Complex64>", into = "Vec<Complex64>")]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
}

impl TryFrom<Vec<Complex64>> for PowerSeries {
    type Error = Error;
    fn try_from(v: Vec<Complex64>) -> Result<Self> {
        PowerSeries::new(v)
    }
}

impl From<PowerSeries> for Vec<Complex64> {
    fn from(s: PowerSeries) -> Self {
        s.coeffs
    }
}

impl PowerSeries {
    /// A single coefficient is padded to order 1.
    pub fn new(mut coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidSpec("power series needs at least one coefficient".into()));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite coefficient at index {k}")));
        }
        if coeffs.len() == 1 {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Ok(Self { coeffs })
    }

    pub fn from_real(coeffs: &[f64]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(order: usize) -> Self {
        Self { coeffs: vec![Complex64::new(0.0, 0.0); order.max(1) + 1] }
    }

    pub fn constant(c: Complex64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        s.coeffs[0] = c;
        s
    }

    pub fn monomial(n: usize, order: usize) -> Self {
        let mut s = Self::zeros(order.max(n));
        s.coeffs[n] = Complex64::new(1.0, 0.0);
        s
    }

    /// Coefficients of `1/(1 - a z)` up to `order`.
    pub fn geometric(a: Complex64, order: usize) -> Self {
        let mut s = Self::zeros(order);
        let mut p = Complex64::new(1.0, 0.0);
        for c in s.coeffs.iter_mut() {
            *c = p;
            p *= a;
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or_default()
    }

    /// Pads with zeros or truncates to the given order.
    pub fn with_order(&self, order: usize) -> Self {
        let mut c = self.coeffs.clone();
        c.resize(order.max(1) + 1, Complex64::new(0.0, 0.0));
        Self { coeffs: c }
    }

    pub fn scale(&self, k: Complex64) -> Self {
        Self { coeffs: self.coeffs.iter().map(|c| c * k).collect() }
    }

    /// Coefficients of `f(ρz)`.
    pub fn dilate(&self, rho: f64) -> Self {
        let mut p = 1.0;
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| {
                let v = c * p;
                p *= rho;
                v
            })
            .collect();
        Self { coeffs }
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut d = vec![Complex64::new(0.0, 0.0); n.max(1) + 1];
        for k in 1..=n {
            d[k - 1] = self.coeffs[k] * k as f64;
        }
        Self { coeffs: d }
    }

    fn check_point(z: Complex64) -> Result<()> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::Domain(format!("|z| = {} exceeds 1", z.norm())));
        }
        Ok(())
    }

    /// Horner evaluation of the truncated polynomial.
    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        Self::check_point(z)?;
        Ok(self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c))
    }

    pub fn evaluate_deriv(&self, z: Complex64) -> Result<Complex64> {
        Self::check_point(z)?;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (1..self.coeffs.len()).rev() {
            acc = acc * z + self.coeffs[k] * k as f64;
        }
        Ok(acc)
    }

    /// Value and derivative in one Horner pass, without the domain check.
    pub(crate) fn eval_with_deriv_unchecked(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Product truncated at this series' order.
    pub fn mul(&self, other: &PowerSeries) -> Result<PowerSeries> {
        let n = self.order();
        let len = (n + 1) + (other.order().min(n) + 1);
        let m = (2 * (n + 1)).max(len).next_power_of_two();
        let mut a = vec![Complex64::new(0.0, 0.0); m];
        let mut b = vec![Complex64::new(0.0, 0.0); m];
        a[..=n].copy_from_slice(&self.coeffs);
        for (k, c) in other.coeffs.iter().take(n + 1).enumerate() {
            b[k] = *c;
        }
        fft_in_place(&mut a, false);
        fft_in_place(&mut b, false);
        for (x, y) in a.iter_mut().zip(&b) {
            *x *= y;
        }
        fft_in_place(&mut a, true);
        let inv = 1.0 / m as f64;
        let coeffs: Vec<Complex64> = a[..=n].iter().map(|c| c * inv).collect();
        if coeffs.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::Numeric("overflow in series product".into()));
        }
        Ok(PowerSeries { coeffs })
    }

    /// `f^n` truncated at this series' order, by binary powering.
    pub fn power(&self, n: usize) -> Result<PowerSeries> {
        if n == 0 {
            return Err(Error::Precondition("power requires n >= 1".into()));
        }
        let mut result: Option<PowerSeries> = None;
        let mut base = self.clone();
        let mut e = n;
        loop {
            if e & 1 == 1 {
                result = Some(match result {
                    None => base.clone(),
                    Some(r) => r.mul(&base)?,
                });
            }
            e >>= 1;
            if e == 0 {
                break;
            }
            base = base.mul(&base)?;
        }
        Ok(result.expect("n >= 1"))
    }

    /// Iterator over `f, f^2, f^3, ...` by repeated multiplication.
    pub fn powers(&self) -> Powers<'_> {
        Powers { base: self, current: None }
    }

    /// Samples of the truncated polynomial at the `M`-th roots of unity.
    pub fn boundary_trace(&self, m: usize) -> Result<BoundaryGrid> {
        check_pow2(m, 8)?;
        let needed = 2 * (self.order() + 1);
        if m < needed {
            return Err(Error::Aliasing { grid: m, needed });
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); m];
        buf[..self.coeffs.len()].copy_from_slice(&self.coeffs);
        fft_in_place(&mut buf, true);
        BoundaryGrid::new(buf)
    }

    /// Recovers Taylor coefficients `0..=order` from boundary samples.
    pub fn from_boundary(grid: &BoundaryGrid, order: usize) -> Result<PowerSeries> {
        if order + 1 > grid.len() / 2 {
            return Err(Error::Aliasing { grid: grid.len(), needed: 2 * (order + 1) });
        }
        let c = grid.fourier_coefficients();
        PowerSeries::new(c[..=order].to_vec())
    }

    pub fn sum_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }
}

pub struct Powers<'a> {
    base: &'a PowerSeries,
    current: Option<PowerSeries>,
}

impl Iterator for Powers<'_> {
    type Item = Result<PowerSeries>;
    fn next(&mut self) -> Option<Self::Item> {
        let next = match &self.current {
            None => Ok(self.base.clone()),
            Some(c) => c.mul(self.base),
        };
        match next {
            Ok(s) => {
                self.current = Some(s.clone());
                Some(Ok(s))
            }
            Err(e) => Some(Err(e)),
        }
    }
}

/// Samples at the nodes `e^{2πik/M}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryGrid {
    samples: Vec<Complex64>,
}

impl BoundaryGrid {
    pub fn new(samples: Vec<Complex64>) -> Result<Self> {
        check_pow2(samples.len(), 8)?;
        Ok(Self { samples })
    }

    pub fn from_real(values: Vec<f64>) -> Result<Self> {
        Self::new(values.into_iter().map(|x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_fn(m: usize, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        check_pow2(m, 8)?;
        Self::new((0..m).map(|k| f(node_angle(k, m))).collect())
    }

    pub fn from_real_fn(m: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::from_fn(m, |t| Complex64::new(f(t), 0.0))
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn angle(&self, k: usize) -> f64 {
        node_angle(k, self.len())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.re).collect()
    }

    pub fn moduli(&self) -> Vec<f64> {
        self.samples.iter().map(|c| c.norm()).collect()
    }

    /// `ĝ(n) = (1/M) Σ g_k e^{-2πink/M}`, stored at index `n mod M`.
    pub fn fourier_coefficients(&self) -> Vec<Complex64> {
        let mut buf = self.samples.clone();
        fft_in_place(&mut buf, false);
        let inv = 1.0 / buf.len() as f64;
        buf.iter_mut().for_each(|c| *c *= inv);
        buf
    }

    /// Inverse of [`fourier_coefficients`](Self::fourier_coefficients).
    pub fn from_fourier(mut coeffs: Vec<Complex64>) -> Result<Self> {
        check_pow2(coeffs.len(), 8)?;
        fft_in_place(&mut coeffs, true);
        Self::new(coeffs)
    }

    fn require_real(&self) -> Result<()> {
        let scale = self.samples.iter().map(|c| c.re.abs()).fold(1.0, f64::max);
        if let Some(k) = self.samples.iter().position(|c| c.im.abs() > 1e-9 * scale) {
            return Err(Error::Domain(format!("expected real samples, node {k} has imaginary part")));
        }
        Ok(())
    }

    /// Conjugate function via the multiplier `-i sgn(n)`; the mean and the
    /// Nyquist mode are mapped to zero.
    pub fn harmonic_conjugate(&self) -> Result<BoundaryGrid> {
        self.require_real()?;
        let real = BoundaryGrid { samples: self.samples.iter().map(|c| Complex64::new(c.re, 0.0)).collect() };
        let m = self.len();
        let mut c = real.fourier_coefficients();
        let mi = Complex64::new(0.0, -1.0);
        for (k, v) in c.iter_mut().enumerate() {
            *v = if k == 0 || k == m / 2 {
                Complex64::new(0.0, 0.0)
            } else if k < m / 2 {
                *v * mi
            } else {
                -*v * mi
            };
        }
        let out = BoundaryGrid::from_fourier(c)?;
        Ok(BoundaryGrid { samples: out.samples.iter().map(|c| Complex64::new(c.re, 0.0)).collect() })
    }

    /// Boundary values `u + iũ` of the analytic function with real part `u`
    /// and `Im = 0` at the origin.
    pub fn analytic_completion(&self) -> Result<BoundaryGrid> {
        let v = self.harmonic_conjugate()?;
        let samples = self.samples.iter().zip(&v.samples).map(|(u, v)| Complex64::new(u.re, v.re)).collect();
        Ok(BoundaryGrid { samples })
    }
}

pub fn node_angle(k: usize, m: usize) -> f64 {
    2.0 * PI * k as f64 / m as f64
}

pub const LOG_MODULUS_FLOOR: f64 = -50.0;

/// Outer function with boundary log-modulus `logmod`, truncated at `order`.
///
/// Samples below [`LOG_MODULUS_FLOOR`] (including `-inf`) are clamped. The
/// exponential is formed on a twice-oversampled grid to limit aliasing.
pub fn outer_from_log_modulus(logmod: &BoundaryGrid, order: usize) -> Result<PowerSeries> {
    let m = logmod.len();
    let mut u = Vec::with_capacity(m);
    let scale = logmod.samples.iter().map(|c| if c.re.is_finite() { c.re.abs() } else { 0.0 }).fold(1.0, f64::max);
    for (k, c) in logmod.samples.iter().enumerate() {
        if c.re.is_nan() || c.re == f64::INFINITY || c.im.abs() > 1e-9 * scale || c.im.is_nan() {
            return Err(Error::Domain(format!("log-modulus sample {k} is not a real number bounded above")));
        }
        u.push(c.re.max(LOG_MODULUS_FLOOR));
    }
    let mut coef = BoundaryGrid::from_real(u)?.fourier_coefficients();
    // analytic h = c0 + 2 Σ_{n≥1} ĉ(n) z^n, placed on a grid of size 2M
    let big = 2 * m;
    let mut h = vec![Complex64::new(0.0, 0.0); big];
    h[0] = Complex64::new(coef[0].re, 0.0);
    for n in 1..m / 2 {
        h[n] = coef[n] * 2.0;
    }
    coef.clear();
    fft_in_place(&mut h, true);
    for v in h.iter_mut() {
        *v = v.exp();
    }
    let f = BoundaryGrid::new(h)?;
    let c = f.fourier_coefficients();
    let n = order.min(big / 2 - 1);
    let mut out = c[..=n].to_vec();
    out.resize(order + 1, Complex64::new(0.0, 0.0));
    PowerSeries::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn horner_examples() {
        let z = PowerSeries::monomial(1, 1);
        assert_abs_diff_eq!(z.evaluate(c(0.5)).unwrap().re, 0.5);
        let g = PowerSeries::geometric(c(0.5), 64);
        assert!((g.evaluate(c(0.5)).unwrap() - c(4.0 / 3.0)).norm() < 1e-12);
        let k = PowerSeries::constant(c(3.0), 4);
        assert_eq!(k.evaluate(Complex64::new(0.3, -0.9)).unwrap(), c(3.0));
        assert!(matches!(z.evaluate(c(1.5)), Err(Error::Domain(_))));
    }

    #[test]
    fn power_examples() {
        let z5 = PowerSeries::monomial(1, 8).power(5).unwrap();
        for (k, v) in z5.coeffs().iter().enumerate() {
            assert!((v - c(if k == 5 { 1.0 } else { 0.0 })).norm() < 1e-14);
        }
        let a = PowerSeries::from_real(&[0.5, 0.5, 0.0]).unwrap().power(2).unwrap();
        for (v, e) in a.coeffs().iter().zip([0.25, 0.5, 0.25]) {
            assert!((v - c(e)).norm() < 1e-15);
        }
        let g2 = PowerSeries::geometric(c(0.5), 64).power(2).unwrap();
        for (k, v) in g2.coeffs().iter().enumerate() {
            let e = (k as f64 + 1.0) / 2f64.powi(k as i32);
            assert!((v - c(e)).norm() < 1e-12, "k={k}");
        }
    }

    #[test]
    fn trace_examples() {
        let z = PowerSeries::monomial(1, 1);
        let t = z.boundary_trace(8).unwrap();
        for k in 0..8 {
            let e = Complex64::from_polar(1.0, node_angle(k, 8));
            assert!((t.samples()[k] - e).norm() < 1e-14);
        }
        let f = PowerSeries::from_real(&[1.0, 0.0, 1.0]).unwrap();
        let t = f.boundary_trace(8).unwrap();
        for k in 0..8 {
            let e = c(1.0) + Complex64::from_polar(1.0, 2.0 * node_angle(k, 8));
            assert!((t.samples()[k] - e).norm() < 1e-14);
        }
        assert!(matches!(f.boundary_trace(4), Err(Error::InvalidGrid(_))));
        let long = PowerSeries::zeros(8);
        assert!(matches!(long.boundary_trace(16), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn conjugate_examples() {
        let m = 64;
        let cos = BoundaryGrid::from_real_fn(m, f64::cos).unwrap();
        let s = cos.harmonic_conjugate().unwrap();
        for k in 0..m {
            assert!((s.samples()[k].re - cos.angle(k).sin()).abs() < 1e-12);
        }
        let one = BoundaryGrid::from_real(vec![1.0; m]).unwrap();
        assert!(one.harmonic_conjugate().unwrap().samples().iter().all(|v| v.norm() < 1e-14));
        let c3 = BoundaryGrid::from_real_fn(m, |t| (3.0 * t).cos()).unwrap();
        let s3 = c3.harmonic_conjugate().unwrap();
        for k in 0..m {
            assert!((s3.samples()[k].re - (3.0 * c3.angle(k)).sin()).abs() < 1e-12);
        }
    }

    #[test]
    fn outer_examples() {
        let zero = BoundaryGrid::from_real(vec![0.0; 256]).unwrap();
        let f = outer_from_log_modulus(&zero, 64).unwrap();
        assert!((f.coeff(0) - c(1.0)).norm() < 1e-14);
        assert!(f.coeffs()[1..].iter().all(|v| v.norm() < 1e-14));

        let cos = BoundaryGrid::from_real_fn(256, f64::cos).unwrap();
        let f = outer_from_log_modulus(&cos, 64).unwrap();
        let mut fact = 1.0;
        for k in 0..=64 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!((f.coeff(k) - c(1.0 / fact)).norm() < 1e-10, "k={k}");
        }

        let lm = BoundaryGrid::from_real_fn(256, |t| (c(1.0) - Complex64::from_polar(0.5, t)).norm().ln()).unwrap();
        let f = outer_from_log_modulus(&lm, 64).unwrap();
        assert!((f.coeff(0) - c(1.0)).norm() < 1e-10);
        assert!((f.coeff(1) - c(-0.5)).norm() < 1e-10);
        assert!(f.coeffs()[2..].iter().all(|v| v.norm() < 1e-10));

        let bad = BoundaryGrid::new(vec![Complex64::new(0.0, 1.0); 16]).unwrap();
        assert!(matches!(outer_from_log_modulus(&bad, 4), Err(Error::Domain(_))));
    }

    #[test]
    fn outer_of_blaschke_modulus_on_grid() {
        // zeros of B away from the circle: log|B*| = 0, so the outer part is 1
        let m = 4096;
        let a = Complex64::new(0.3, 0.2);
        let lm = BoundaryGrid::from_real_fn(m, |t| {
            let z = Complex64::from_polar(1.0, t);
            ((a - z) / (c(1.0) - a.conj() * z)).norm().ln()
        })
        .unwrap();
        let f = outer_from_log_modulus(&lm, m / 2 - 1).unwrap();
        let t = f.boundary_trace(m).unwrap();
        assert!(t.moduli().iter().all(|v| (v - 1.0).abs() < 1e-6));
    }

    #[test]
    fn outer_modulus_smooth_input() {
        let m = 4096;
        let lm = BoundaryGrid::from_real_fn(m, |t| -0.5 * (1.0 - t.cos()) + 0.2 * (2.0 * t).sin()).unwrap();
        let f = outer_from_log_modulus(&lm, m / 2 - 1).unwrap();
        let t = f.boundary_trace(m).unwrap();
        for (k, v) in t.moduli().iter().enumerate() {
            let e = lm.samples()[k].re.exp();
            assert!((v - e).abs() <= 1e-3 * e);
        }
    }

    #[test]
    fn serde_roundtrip() {
        let s = PowerSeries::from_real(&[1.0, 2.0]).unwrap();
        let j = serde_json::to_string(&s).unwrap();
        let back: PowerSeries = serde_json::from_str(&j).unwrap();
        assert_eq!(s, back);
    }
}

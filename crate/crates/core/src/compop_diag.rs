//! Boundedness and compactness evidence for `C_φ` on `𝒟ᵖ_α`: the test-function
//! sweep `Q(λ) = (1-|λ|²)^δ ‖F_{λ,β}∘φ‖`, the power sequence `𝒟(φⁿ)`, and the
//! Carleson-box quotients of the pullback measure `μ_φ = |φ'|² dA ∘ φ⁻¹`.

use std::f64::consts::{LN_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_box_pushforward_from, integrate_disc_rings, BoxRule, CarlesonBox};
use crate::spaces::{dirichlet_integral, hardy_norm_sq, peaked_rule, SpaceParams, TestFunction};
use crate::symbols::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVerdict {
    BoundedEvidence,
    UnboundedEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompactVerdict {
    CompactEvidence,
    NotCompactEvidence,
    Inconclusive,
}

/// Trend of a positive sequence sampled at geometric scales `x_k = 2^k`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleTrend {
    /// Least-squares slope of `ln q` against `ln x` over the last four scales.
    pub slope: f64,
    /// `max/min - 1` over the last three scales.
    pub variation: f64,
    pub bounded: BoundVerdict,
    pub compact: CompactVerdict,
}

const FLAT: f64 = 0.10;
const SLOPE: f64 = 0.2;

fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Verdicts from the tail of `q_k` at scales `2^{k}`: bounded if the last
/// three octaves are flat within 10% or the sequence decays, unbounded if it
/// grows with slope above 0.2; compact if it decays with slope below -0.2 or
/// vanishes identically, not compact if flat and positive.
pub fn scale_trend(q: &[f64]) -> Option<ScaleTrend> {
    if q.len() < 4 || q.iter().any(|v| !v.is_finite() || *v < 0.0) {
        return None;
    }
    let tail = &q[q.len() - 4..];
    if tail.iter().all(|v| *v == 0.0) {
        return Some(ScaleTrend {
            slope: f64::NEG_INFINITY,
            variation: 0.0,
            bounded: BoundVerdict::BoundedEvidence,
            compact: CompactVerdict::CompactEvidence,
        });
    }
    let last3 = &q[q.len() - 3..];
    let hi = last3.iter().cloned().fold(f64::MIN, f64::max);
    let lo = last3.iter().cloned().fold(f64::MAX, f64::min);
    let variation = if lo > 0.0 { hi / lo - 1.0 } else { f64::INFINITY };
    let slope = if tail.iter().any(|v| *v == 0.0) {
        // reached zero inside the window
        f64::NEG_INFINITY
    } else {
        let x: Vec<f64> = (0..4).map(|k| k as f64 * LN_2).collect();
        let y: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
        fit_slope(&x, &y)
    };
    let bounded = if slope > SLOPE {
        BoundVerdict::UnboundedEvidence
    } else if variation < FLAT || slope < -SLOPE {
        BoundVerdict::BoundedEvidence
    } else {
        BoundVerdict::Inconclusive
    };
    let compact = if slope < -SLOPE {
        CompactVerdict::CompactEvidence
    } else if variation < FLAT {
        CompactVerdict::NotCompactEvidence
    } else {
        CompactVerdict::Inconclusive
    };
    Some(ScaleTrend { slope, variation, bounded, compact })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepOptions {
    /// `1 - |λ| = 2^{-1}, …, 2^{-octaves}`.
    pub octaves: usize,
    pub rays: usize,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions { octaves: 10, rays: 4 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub one_minus: f64,
    pub angle: f64,
    pub q: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestFunctionSweep {
    pub params: SpaceParams,
    pub delta: f64,
    pub rows: Vec<SweepRow>,
    /// `(1-|λ|, max over rays of Q)`.
    pub sup_by_scale: Vec<(f64, f64)>,
    pub trend: Option<ScaleTrend>,
    pub dropped: Vec<String>,
}

impl TestFunctionSweep {
    pub fn bounded(&self) -> BoundVerdict {
        self.trend.map_or(BoundVerdict::Inconclusive, |t| t.bounded)
    }

    pub fn compact(&self) -> CompactVerdict {
        self.trend.map_or(CompactVerdict::Inconclusive, |t| t.compact)
    }

    pub fn sup(&self) -> f64 {
        self.sup_by_scale.iter().map(|r| r.1).fold(0.0, f64::max)
    }
}

/// `‖F_{λ,β}∘φ‖_{𝒟ᵖ_α}` from pointwise values of `φ` and `φ'`.
pub fn composed_test_norm(phi: &Symbol, tf: &TestFunction, params: &SpaceParams) -> Result<f64> {
    let lam = tf.lambda.norm();
    let a = phi.eval(Complex64::new(0.0, 0.0))?;
    let a = a.norm();
    // Schwarz–Pick: the preimage of the peak is no thinner than this
    let width = (1.0 - lam) * (1.0 - a) / (2.0 * (1.0 + a));
    let rule = peaked_rule(params.alpha, width)?;
    let p = params.p;
    let panels = integrate_disc_rings(
        |r, m| {
            let (v, d) = phi.ring(r, m);
            let s: f64 = v.iter().zip(&d).map(|(v, d)| tf.deriv_abs_pow(*v, p) * d.norm().powf(p)).sum();
            Ok(s / m as f64)
        },
        &rule,
    )?;
    let g0 = tf.eval(phi.eval(Complex64::new(0.0, 0.0))?).norm().powf(p);
    let total = g0 + panels.iter().sum::<f64>();
    if !total.is_finite() {
        return Err(Error::Numeric("composed test-function norm is not finite".into()));
    }
    Ok(total.powf(1.0 / p))
}

fn q_sweep(phi: &Symbol, params: SpaceParams, opts: &SweepOptions) -> Result<TestFunctionSweep> {
    let delta = params.require_positive_delta()?;
    let points: Vec<(f64, f64)> = (1..=opts.octaves)
        .flat_map(|k| (0..opts.rays).map(move |j| (0.5f64.powi(k as i32), TAU * j as f64 / opts.rays as f64)))
        .collect();
    let evaluated: Vec<(f64, f64, Result<f64>)> = points
        .par_iter()
        .map(|&(h, angle)| {
            let lambda = Complex64::from_polar(1.0 - h, angle);
            let q = TestFunction::new(lambda, params.beta).and_then(|tf| {
                let n = composed_test_norm(phi, &tf, &params)?;
                Ok((1.0 - lambda.norm_sqr()).powf(delta) * n)
            });
            (h, angle, q)
        })
        .collect();
    let mut rows = Vec::new();
    let mut dropped = Vec::new();
    for (h, angle, q) in evaluated {
        match q {
            Ok(q) => rows.push(SweepRow { one_minus: h, angle, q }),
            Err(e) => dropped.push(format!("1-|λ| = {h:e}, arg λ = {angle:.4}: {e}")),
        }
    }
    let mut sup_by_scale = Vec::new();
    for k in 1..=opts.octaves {
        let h = 0.5f64.powi(k as i32);
        let m = rows.iter().filter(|r| r.one_minus == h).map(|r| r.q).fold(f64::NAN, f64::max);
        if m.is_finite() {
            sup_by_scale.push((h, m));
        }
    }
    let trend = scale_trend(&sup_by_scale.iter().map(|r| r.1).collect::<Vec<_>>());
    Ok(TestFunctionSweep { params, delta, rows, sup_by_scale, trend, dropped })
}

/// Bounded iff `sup_λ Q(λ) < ∞`. The sweep works with φ as given and does
/// not move `φ(0)` to the origin.
pub fn boundedness_sweep(phi: &Symbol, params: SpaceParams, opts: &SweepOptions) -> Result<TestFunctionSweep> {
    q_sweep(phi, params, opts)
}

/// Compact iff `Q(λ) → 0` as `|λ| → 1`; same table, read for decay.
pub fn compactness_sweep(phi: &Symbol, params: SpaceParams, opts: &SweepOptions) -> Result<TestFunctionSweep> {
    q_sweep(phi, params, opts)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceVerdict {
    TendsToZero,
    Bounded,
    Unbounded,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerNormReport {
    pub dirichlet: Vec<f64>,
    pub hardy_sq: Vec<f64>,
    /// `false` where the truncated Taylor series of `φⁿ` carries visible mass
    /// near the truncation order.
    pub reliable: Vec<bool>,
    pub sup: f64,
    pub dirichlet_verdict: SequenceVerdict,
    /// `√n ‖φⁿ‖_{H²}`, which tends to zero whenever `𝒟(φⁿ)` does.
    pub hardy_scaled: Vec<f64>,
    pub hardy_scaled_verdict: SequenceVerdict,
    pub bounded: BoundVerdict,
    pub compact: CompactVerdict,
    pub notes: Vec<String>,
}

fn sequence_verdict(x: &[f64]) -> SequenceVerdict {
    let n = x.len();
    if n < 8 || x.iter().any(|v| !v.is_finite()) {
        return SequenceVerdict::Inconclusive;
    }
    let peak = x.iter().cloned().fold(0.0, f64::max);
    let tail = &x[n / 2..];
    if peak == 0.0 || tail.iter().all(|v| *v <= 1e-12 * peak) {
        return SequenceVerdict::TendsToZero;
    }
    if tail.iter().any(|v| *v <= 0.0) {
        return SequenceVerdict::Inconclusive;
    }
    let xs: Vec<f64> = (n / 2..n).map(|k| ((k + 1) as f64).ln()).collect();
    let ys: Vec<f64> = tail.iter().map(|v| v.ln()).collect();
    let slope = fit_slope(&xs, &ys);
    if slope < -0.5 {
        SequenceVerdict::TendsToZero
    } else if slope > SLOPE {
        SequenceVerdict::Unbounded
    } else if slope.abs() < 0.05 {
        SequenceVerdict::Bounded
    } else {
        SequenceVerdict::Inconclusive
    }
}

/// `𝒟(φⁿ)` and `‖φⁿ‖²_{H²}` for `n = 1..=n_max`. Only sufficient conditions
/// follow: a bounded sequence gives boundedness, a null sequence compactness;
/// growth of the sequence says nothing about `C_φ`.
pub fn power_norm_diagnostics(phi: &Symbol, n_max: usize) -> Result<PowerNormReport> {
    if n_max == 0 {
        return Err(Error::Precondition("n_max must be positive".into()));
    }
    let order = (8 * n_max).max(512);
    let approx = phi.to_series(order)?;
    let mut notes: Vec<String> = approx.warning.into_iter().collect();
    let mut dirichlet = Vec::with_capacity(n_max);
    let mut hardy_sq = Vec::with_capacity(n_max);
    let mut reliable = Vec::with_capacity(n_max);
    let edge = order - order / 8;
    for p in approx.series.powers().take(n_max) {
        let p = p?;
        let h = hardy_norm_sq(&p);
        let top: f64 = p.coeffs()[edge..].iter().map(|c| c.norm_sqr()).sum();
        reliable.push(top <= 1e-24 * h.max(1e-300));
        dirichlet.push(dirichlet_integral(&p));
        hardy_sq.push(h);
    }
    if let Some(first) = reliable.iter().position(|r| !r) {
        notes.push(format!("terms from n = {} on are truncation-dominated", first + 1));
    }
    let sup = dirichlet.iter().cloned().fold(0.0, f64::max);
    let good = reliable.iter().take_while(|r| **r).count();
    let dirichlet_verdict = sequence_verdict(&dirichlet[..good]);
    let hardy_scaled: Vec<f64> = hardy_sq.iter().enumerate().map(|(i, h)| ((i + 1) as f64 * h).sqrt()).collect();
    let hardy_scaled_verdict = sequence_verdict(&hardy_scaled[..good]);
    let (bounded, compact) = match dirichlet_verdict {
        SequenceVerdict::TendsToZero => (BoundVerdict::BoundedEvidence, CompactVerdict::CompactEvidence),
        SequenceVerdict::Bounded => (BoundVerdict::BoundedEvidence, CompactVerdict::Inconclusive),
        _ => (BoundVerdict::Inconclusive, CompactVerdict::Inconclusive),
    };
    if dirichlet_verdict == SequenceVerdict::Unbounded {
        notes.push("sup 𝒟(φⁿ) = ∞ is not evidence against boundedness; the test is one-directional".into());
    }
    Ok(PowerNormReport {
        dirichlet,
        hardy_sq,
        reliable,
        sup,
        dirichlet_verdict,
        hardy_scaled,
        hardy_scaled_verdict,
        bounded,
        compact,
        notes,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonRow {
    pub box_length: f64,
    /// Center angle attaining the worst quotient.
    pub center: f64,
    pub quotient: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CarlesonSweep {
    pub rows: Vec<CarlesonRow>,
    pub sup: f64,
    pub trend: Option<ScaleTrend>,
}

impl CarlesonSweep {
    pub fn bounded(&self) -> BoundVerdict {
        self.trend.map_or(BoundVerdict::Inconclusive, |t| t.bounded)
    }

    pub fn compact(&self) -> CompactVerdict {
        self.trend.map_or(CompactVerdict::Inconclusive, |t| t.compact)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonOptions {
    /// `|I| = 2π·2^{-k}` for `k = 1..=octaves`.
    pub octaves: usize,
    pub centers: usize,
    pub rel_tol: f64,
}

impl Default for CarlesonOptions {
    fn default() -> Self {
        CarlesonOptions { octaves: 8, centers: 16, rel_tol: 1e-6 }
    }
}

/// Worst `μ_φ(S(I))/|I|²` over a rotation sweep of box centers at each
/// length. `C_φ` is bounded on `𝒟` iff the sup is finite and compact iff the
/// quotient tends to zero.
pub fn carleson_sweep(phi: &Symbol, opts: &CarlesonOptions) -> Result<CarlesonSweep> {
    if opts.octaves < 4 || opts.centers == 0 {
        return Err(Error::Precondition("need at least four box lengths and one center".into()));
    }
    let a = phi.eval(Complex64::new(0.0, 0.0))?.norm();
    let boxes: Vec<(usize, f64)> = (1..=opts.octaves)
        .flat_map(|k| (0..opts.centers).map(move |j| (k, TAU * j as f64 / opts.centers as f64)))
        .collect();
    let values: Vec<(usize, f64, f64)> = boxes
        .par_iter()
        .map(|&(k, center)| {
            let len = TAU * 0.5f64.powi(k as i32);
            let cbox = CarlesonBox { center_angle: center, arc_length: len };
            let rho = cbox.inner_radius();
            // |φ(z)| ≤ (|z| + a)/(1 + a|z|)
            let r_min = ((rho - a) / (1.0 - a * rho)).max(0.0);
            let scan = (256usize).max((16.0 * TAU / len).ceil() as usize);
            let rule = BoxRule { scan, tol: opts.rel_tol * cbox.area() };
            let mu = integrate_box_pushforward_from(|z| phi.eval_both(z), &cbox, &rule, r_min);
            (k, center, mu / (len * len))
        })
        .collect();
    let mut rows = Vec::new();
    for k in 1..=opts.octaves {
        let worst = values
            .iter()
            .filter(|v| v.0 == k)
            .fold((0.0, f64::NEG_INFINITY), |acc, v| if v.2 > acc.1 { (v.1, v.2) } else { acc });
        rows.push(CarlesonRow { box_length: TAU * 0.5f64.powi(k as i32), center: worst.0, quotient: worst.1 });
    }
    let sup = rows.iter().map(|r| r.quotient).fold(0.0, f64::max);
    let trend = scale_trend(&rows.iter().map(|r| r.quotient).collect::<Vec<_>>());
    Ok(CarlesonSweep { rows, sup, trend })
}

/// Normalized area of `S(I)` over `|I|²`, the identity's quotient.
pub fn identity_quotient(box_length: f64) -> f64 {
    let h = box_length / TAU;
    (2.0 - h) / (4.0 * PI * PI)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::SymbolSpec;

    fn sym(s: SymbolSpec) -> Symbol {
        s.compile().unwrap()
    }

    fn short() -> SweepOptions {
        SweepOptions { octaves: 7, rays: 4 }
    }

    #[test]
    fn delta_for_dirichlet_is_one() {
        assert_eq!(SpaceParams::dirichlet().delta(), 1.0);
    }

    #[test]
    fn trend_rules() {
        let flat = [1.0, 1.0, 1.01, 1.0, 1.02];
        let t = scale_trend(&flat).unwrap();
        assert_eq!((t.bounded, t.compact), (BoundVerdict::BoundedEvidence, CompactVerdict::NotCompactEvidence));
        let decay: Vec<f64> = (0..8).map(|k| 0.5f64.powi(k)).collect();
        let t = scale_trend(&decay).unwrap();
        assert_eq!((t.bounded, t.compact), (BoundVerdict::BoundedEvidence, CompactVerdict::CompactEvidence));
        let grow: Vec<f64> = (0..8).map(|k| 2f64.powf(0.5 * k as f64)).collect();
        assert_eq!(scale_trend(&grow).unwrap().bounded, BoundVerdict::UnboundedEvidence);
        assert!(scale_trend(&[1.0, 2.0]).is_none());
    }

    #[test]
    fn sweep_on_canonical_symbols() {
        let p = SpaceParams::dirichlet();
        let id = compactness_sweep(&sym(SymbolSpec::Identity), p, &short()).unwrap();
        assert_eq!(id.bounded(), BoundVerdict::BoundedEvidence);
        assert_eq!(id.compact(), CompactVerdict::NotCompactEvidence);
        // Q(λ)² = (1-|λ|²)² + |λ|² for the identity
        for r in &id.rows {
            let l2 = (1.0 - r.one_minus).powi(2);
            let exact = ((1.0 - l2).powi(2) + l2).sqrt();
            assert!((r.q - exact).abs() < 1e-6, "{} {}", r.q, exact);
        }
        let sc = compactness_sweep(&sym(SymbolSpec::Scale { r: 0.5 }), p, &short()).unwrap();
        assert_eq!(sc.compact(), CompactVerdict::CompactEvidence);
        assert!(sc.dropped.is_empty());
        let b = compactness_sweep(&sym(SymbolSpec::blaschke(&[0.4])), p, &short()).unwrap();
        assert_eq!(b.bounded(), BoundVerdict::BoundedEvidence);
        assert_eq!(b.compact(), CompactVerdict::NotCompactEvidence);
        let half = SymbolSpec::Affine { c0: Complex64::new(0.5, 0.0), c1: Complex64::new(0.5, 0.0) };
        let af = boundedness_sweep(&sym(half), p, &short()).unwrap();
        assert_eq!(af.bounded(), BoundVerdict::BoundedEvidence);
    }

    #[test]
    fn sweep_is_rotation_covariant() {
        let p = SpaceParams::dirichlet();
        let phi = sym(SymbolSpec::Affine { c0: Complex64::new(0.2, 0.1), c1: Complex64::new(0.6, 0.0) });
        let g = 0.7;
        let rotated = sym(SymbolSpec::compose(
            SymbolSpec::rotation(g),
            SymbolSpec::compose(phi.spec().clone(), SymbolSpec::rotation(-g)),
        ));
        let rot = Complex64::from_polar(1.0, g);
        for lam in [Complex64::new(0.5, 0.2), Complex64::new(-0.3, 0.85)] {
            let a = composed_test_norm(&phi, &TestFunction::new(lam, 0.0).unwrap(), &p).unwrap();
            let b = composed_test_norm(&rotated, &TestFunction::new(lam * rot, 0.0).unwrap(), &p).unwrap();
            assert!((a - b).abs() < 1e-6 * a, "{a} {b}");
        }
    }

    #[test]
    fn power_norms() {
        let r = 0.7;
        let rep = power_norm_diagnostics(&sym(SymbolSpec::Scale { r }), 100).unwrap();
        for (i, d) in rep.dirichlet.iter().enumerate() {
            let n = (i + 1) as f64;
            assert!((d - n * r.powf(2.0 * n)).abs() <= 1e-10 * (n * r.powf(2.0 * n)).max(1e-300));
        }
        assert_eq!(rep.compact, CompactVerdict::CompactEvidence);
        let id = power_norm_diagnostics(&sym(SymbolSpec::Identity), 64).unwrap();
        assert_eq!(id.dirichlet_verdict, SequenceVerdict::Unbounded);
        assert_eq!(id.bounded, BoundVerdict::Inconclusive);
        let half = SymbolSpec::Affine { c0: Complex64::new(0.5, 0.0), c1: Complex64::new(0.5, 0.0) };
        let af = power_norm_diagnostics(&sym(half), 64).unwrap();
        assert!((af.dirichlet[0] - 0.25).abs() < 1e-15);
        // n C(2n-1, n-1)/4ⁿ
        let mut binom = 1.0;
        for n in 1..=64usize {
            if n > 1 {
                binom *= (2 * n - 1) as f64 * (2 * n - 2) as f64 / (n as f64 * (n - 1) as f64);
            }
            let exact = n as f64 * binom / 4f64.powi(n as i32);
            assert!((af.dirichlet[n - 1] - exact).abs() < 1e-12 * exact);
        }
        assert!(af.reliable.iter().all(|r| *r));
    }

    #[test]
    fn carleson_quotients() {
        let opts = CarlesonOptions { octaves: 6, centers: 4, rel_tol: 1e-7 };
        let id = carleson_sweep(&sym(SymbolSpec::Identity), &opts).unwrap();
        for r in &id.rows {
            let exact = identity_quotient(r.box_length);
            assert!((r.quotient - exact).abs() < 1e-5 * exact, "{} {}", r.quotient, exact);
        }
        assert_eq!(id.compact(), CompactVerdict::NotCompactEvidence);
        let sq = carleson_sweep(&sym(SymbolSpec::Power { n: 2 }), &opts).unwrap();
        for (a, b) in sq.rows.iter().zip(&id.rows) {
            assert!((a.quotient / b.quotient - 2.0).abs() < 1e-4, "{} {} {}", a.box_length, a.quotient, b.quotient);
        }
        let sc = carleson_sweep(&sym(SymbolSpec::Scale { r: 0.5 }), &opts).unwrap();
        assert!(sc.rows[1..].iter().all(|r| r.quotient == 0.0));
        assert_eq!(sc.compact(), CompactVerdict::CompactEvidence);
    }
}

//! Quadrature on the disc and the circle, Carleson-box pushforwards, and
//! convergence verdicts for improper integrals computed on nested panels.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            if n == 1 {
                p0 = 1.0;
                p1 = z;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        // recompute the derivative at the converged node
        let (mut p0, mut p1) = (1.0, z);
        for k in 2..=n {
            let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
            p0 = p1;
            p1 = p2;
        }
        let dp = if n > 1 { n as f64 * (z * p1 - p0) / (z * z - 1.0) } else { 1.0 };
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss rule for the weight `(1-x)^a` on `[-1, 1]` (Golub–Welsch).
pub fn gauss_jacobi(n: usize, a: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && a > -1.0);
    if a == 0.0 {
        return gauss_legendre(n);
    }
    let mut t = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        t[(k, k)] = if k == 0 { -a / (a + 2.0) } else { -a * a / ((2.0 * kf + a) * (2.0 * kf + a + 2.0)) };
        if k >= 1 {
            let s = 2.0 * kf + a;
            let b = 4.0 * kf * kf * (kf + a) * (kf + a) / (s * s * (s + 1.0) * (s - 1.0));
            t[(k, k - 1)] = b.sqrt();
            t[(k - 1, k)] = b.sqrt();
        }
    }
    let eig = SymmetricEigen::new(t);
    let mu0 = 2f64.powf(a + 1.0) / (a + 1.0);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|j| (eig.eigenvalues[j], mu0 * eig.eigenvectors[(0, j)].powi(2)))
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    pairs.into_iter().unzip()
}

/// Gauss–Legendre rule mapped to `[lo, hi]`.
pub fn gauss_on(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let h = 0.5 * (hi - lo);
    x.iter().zip(&w).map(|(x, w)| (lo + h * (1.0 + x), h * w)).collect()
}

/// Angular node count per radial node.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Angular {
    Fixed(usize),
    /// `M(r) = next_pow2(per_width / max(1 - r, floor))`, clamped to `[min, max]`.
    Adaptive { min: usize, max: usize, per_width: f64, floor: f64 },
}

impl Angular {
    pub fn size_at(&self, r: f64) -> usize {
        match *self {
            Angular::Fixed(m) => m,
            Angular::Adaptive { min, max, per_width, floor } => {
                let want = per_width / (1.0 - r).max(floor).max(1e-300);
                let want = if want.is_finite() && want < max as f64 { want.ceil() as usize } else { max };
                want.next_power_of_two().clamp(min, max)
            }
        }
    }

    pub fn max_size(&self) -> usize {
        match *self {
            Angular::Fixed(m) => m,
            Angular::Adaptive { max, .. } => max,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Angular::Fixed(m) => m.is_power_of_two() && m >= 4,
            Angular::Adaptive { min, max, per_width, floor } => {
                min.is_power_of_two() && max.is_power_of_two() && min >= 4 && min <= max && per_width > 0.0 && floor >= 0.0
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidGrid(format!("bad angular policy {self:?}")))
        }
    }
}

/// Tensor rule for `∫_𝔻 · dA_α`, `dA_α = (1+α)(1-|z|²)^α dA`, `dA = dxdy/π`.
///
/// Radial nodes come from panels in `s = |z|²`, where `dA_α` becomes
/// `(1+α)(1-s)^α ds × dθ/2π`. Panels are dyadic toward `s = 1`; the optional
/// last panel `[1 - 2^{-K}, 1]` uses Gauss–Jacobi so the weight is exact.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscRule {
    pub alpha: f64,
    pub radial_nodes: Vec<f64>,
    pub radial_weights: Vec<f64>,
    pub panel_of_node: Vec<usize>,
    pub panel_count: usize,
    /// Whether the rule reaches `|z| = 1`; open rules stop at `s = 1 - 2^{-K}`.
    pub closed: bool,
    pub angular: Angular,
}

fn weight_factor(alpha: f64, s: f64) -> f64 {
    (1.0 + alpha) * (1.0 - s).powf(alpha)
}

fn jacobi_panel(alpha: f64, lo: f64, q: usize) -> Vec<(f64, f64)> {
    // ∫_lo^1 g(s)(1+α)(1-s)^α ds with s = lo + (1-lo)(1+x)/2
    let (x, w) = gauss_jacobi(q, alpha);
    let h = 1.0 - lo;
    let scale = (1.0 + alpha) * (h / 2.0).powf(alpha + 1.0);
    x.iter().zip(&w).map(|(x, w)| (lo + h * (1.0 + x) / 2.0, scale * w)).collect()
}

impl DiscRule {
    /// One Gauss–Jacobi panel on `s ∈ [0, 1]`; exact for radial polynomials
    /// in `s` of degree `< 2n`.
    pub fn gauss(alpha: f64, n: usize, angular: Angular) -> Result<Self> {
        Self::check_alpha(alpha)?;
        angular.validate()?;
        let nodes = jacobi_panel(alpha, 0.0, n);
        Ok(Self::from_s_nodes(alpha, nodes.into_iter().map(|(s, w)| (s, w, 0)).collect(), 1, true, angular))
    }

    /// `levels` dyadic Gauss–Legendre panels of `q` nodes on
    /// `[1 - 2^{-k}, 1 - 2^{-k-1}]` (`k = 0..levels`), plus a Gauss–Jacobi end
    /// panel when `closed`.
    pub fn graded(alpha: f64, levels: usize, q: usize, closed: bool, angular: Angular) -> Result<Self> {
        Self::check_alpha(alpha)?;
        angular.validate()?;
        if levels == 0 || q == 0 {
            return Err(Error::InvalidGrid("graded rule needs at least one panel and node".into()));
        }
        let mut nodes = Vec::new();
        for k in 0..levels {
            let lo = 1.0 - 0.5f64.powi(k as i32);
            let hi = 1.0 - 0.5f64.powi(k as i32 + 1);
            for (s, w) in gauss_on(lo, hi, q) {
                nodes.push((s, w * weight_factor(alpha, s), k));
            }
        }
        let mut count = levels;
        if closed {
            for (s, w) in jacobi_panel(alpha, 1.0 - 0.5f64.powi(levels as i32), q) {
                nodes.push((s, w, levels));
            }
            count += 1;
        }
        Ok(Self::from_s_nodes(alpha, nodes, count, closed, angular))
    }

    fn check_alpha(alpha: f64) -> Result<()> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Precondition(format!("weight exponent alpha = {alpha} must exceed -1")));
        }
        Ok(())
    }

    fn from_s_nodes(alpha: f64, nodes: Vec<(f64, f64, usize)>, panel_count: usize, closed: bool, angular: Angular) -> Self {
        let mut nodes = nodes;
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self {
            alpha,
            radial_nodes: nodes.iter().map(|n| n.0.sqrt()).collect(),
            radial_weights: nodes.iter().map(|n| n.1).collect(),
            panel_of_node: nodes.iter().map(|n| n.2).collect(),
            panel_count,
            closed,
            angular,
        }
    }

    pub fn weight_sum(&self) -> f64 {
        self.radial_weights.iter().sum()
    }

    pub fn node_count(&self) -> usize {
        self.radial_nodes.iter().map(|&r| self.angular.size_at(r)).sum()
    }
}

fn angular_mean<F>(f: &F, r: f64, m: usize) -> std::result::Result<f64, (f64, f64)>
where
    F: Fn(Complex64) -> f64,
{
    let mut acc = 0.0;
    let step = 2.0 * PI / m as f64;
    for k in 0..m {
        let t = step * k as f64;
        let v = f(Complex64::from_polar(r, t));
        if v.is_nan() {
            return Err((r, t));
        }
        acc += v;
    }
    Ok(acc / m as f64)
}

/// Per-panel contributions of `∫ f dA_α`.
pub fn integrate_disc_panels<F>(f: F, rule: &DiscRule) -> Result<Vec<f64>>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    integrate_disc_rings(
        |r, m| {
            angular_mean(&f, r, m)
                .map_err(|(r, t)| Error::Numeric(format!("integrand is NaN at node r = {r}, theta = {t}")))
        },
        rule,
    )
}

/// Per-panel contributions of `∫ f dA_α` where `ring_mean(r, M)` returns
/// the mean of `f` over the `M` equispaced points of the circle of radius `r`
/// starting at angle 0.
pub fn integrate_disc_rings<F>(ring_mean: F, rule: &DiscRule) -> Result<Vec<f64>>
where
    F: Fn(f64, usize) -> Result<f64> + Sync,
{
    let means: Vec<Result<f64>> = rule
        .radial_nodes
        .par_iter()
        .map(|&r| ring_mean(r, rule.angular.size_at(r)))
        .collect();
    let mut panels = vec![0.0; rule.panel_count];
    for (j, m) in means.into_iter().enumerate() {
        let v = m?;
        if v.is_nan() {
            return Err(Error::Numeric(format!("ring mean is NaN at r = {}", rule.radial_nodes[j])));
        }
        panels[rule.panel_of_node[j]] += rule.radial_weights[j] * v;
    }
    Ok(panels)
}

/// `∫_𝔻 f dA_α` by the tensor rule.
pub fn integrate_disc<F>(f: F, rule: &DiscRule) -> Result<f64>
where
    F: Fn(Complex64) -> f64 + Sync,
{
    Ok(integrate_disc_panels(f, rule)?.iter().sum())
}

/// Trapezoid rule on the circle: `(2π/M) Σ samples`, or the mean when
/// `normalized`.
pub fn integrate_circle(samples: &[f64], normalized: bool) -> f64 {
    let mean = samples.iter().sum::<f64>() / samples.len() as f64;
    if normalized {
        mean
    } else {
        2.0 * PI * mean
    }
}

/// `S(I) = {z : 1 - |I|/2π ≤ |z| < 1, arg z ∈ I}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CarlesonBox {
    pub center_angle: f64,
    pub arc_length: f64,
}

impl CarlesonBox {
    pub fn new(center_angle: f64, arc_length: f64) -> Result<Self> {
        if !(arc_length > 0.0 && arc_length <= 2.0 * PI) {
            return Err(Error::Precondition(format!("box arc length {arc_length} outside (0, 2π]")));
        }
        Ok(Self { center_angle: center_angle.rem_euclid(2.0 * PI), arc_length })
    }

    pub fn inner_radius(&self) -> f64 {
        1.0 - self.arc_length / (2.0 * PI)
    }

    pub fn contains(&self, w: Complex64) -> bool {
        let r = w.norm();
        if r < self.inner_radius() || r >= 1.0 {
            return false;
        }
        if self.arc_length >= 2.0 * PI {
            return true;
        }
        let d = (w.arg() - self.center_angle).rem_euclid(2.0 * PI);
        d.min(2.0 * PI - d) <= self.arc_length / 2.0
    }

    /// Normalized area of the box.
    pub fn area(&self) -> f64 {
        let rho = self.inner_radius();
        self.arc_length / (2.0 * PI) * (1.0 - rho * rho)
    }
}

/// Resolution controls for [`integrate_box_pushforward`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoxRule {
    /// Angular scan cells used to locate boundary crossings at each radius.
    pub scan: usize,
    /// Absolute tolerance of the adaptive radial integration.
    pub tol: f64,
}

impl Default for BoxRule {
    fn default() -> Self {
        Self { scan: 256, tol: 1e-10 }
    }
}

const GK_X: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
const GK_W: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const G7_W: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * GK_W[7];
    let mut g = fc * G7_W[3];
    for i in 0..7 {
        let x = h * GK_X[i];
        let s = f(c - x) + f(c + x);
        k += GK_W[i] * s;
        if i % 2 == 1 {
            g += G7_W[i / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Adaptive Gauss–Kronrod (7/15) with absolute tolerance.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: usize) -> f64 {
        let (v, e) = gk15(f, a, b);
        if e <= tol || depth == 0 || (b - a) < 1e-15 * (1.0 + a.abs()) {
            return v;
        }
        let m = 0.5 * (a + b);
        rec(f, a, m, tol / 2f64.sqrt(), depth - 1) + rec(f, m, b, tol / 2f64.sqrt(), depth - 1)
    }
    rec(f, a, b, tol, 60)
}

/// Adaptive Gauss–Kronrod for integrands with jumps to or from zero, such as
/// indicator-weighted densities. Endpoints are sampled too, and a panel whose
/// samples mix zero and nonzero values is bisected until its width times the
/// integrand scale falls below the tolerance.
pub fn integrate_adaptive_jumps<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn rec<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fb: f64, tol: f64, depth: usize) -> f64 {
        let (v, e) = gk15(f, a, b);
        let h = 0.5 * (b - a);
        let c = 0.5 * (a + b);
        let mut zero = fa == 0.0 || fb == 0.0;
        let mut nonzero = fa != 0.0 || fb != 0.0;
        let mut scale = fa.abs().max(fb.abs());
        for x in GK_X.iter() {
            for y in [f(c - h * x), f(c + h * x)] {
                zero |= y == 0.0;
                nonzero |= y != 0.0;
                scale = scale.max(y.abs());
            }
        }
        let mixed = zero && nonzero;
        let settled = if mixed { (b - a) * scale <= tol } else { e <= tol };
        if settled || depth == 0 || (b - a) < 1e-15 * (1.0 + a.abs()) {
            return v;
        }
        let fm = f(c);
        let t = tol / 2f64.sqrt();
        rec(f, a, c, fa, fm, t, depth - 1) + rec(f, c, b, fm, fb, t, depth - 1)
    }
    rec(f, a, b, f(a), f(b), tol, 60)
}

/// `μ_φ(S(I)) = ∫_𝔻 1_{S(I)}(φ(z)) |φ'(z)|² dA(z)`.
///
/// `phi` returns `(φ(z), φ'(z))`. At each radius the angular membership
/// intervals are located on a scan grid and refined by bisection; the radial
/// integral is adaptive, so jumps of the indicator are resolved.
pub fn integrate_box_pushforward<P>(phi: P, cbox: &CarlesonBox, rule: &BoxRule) -> f64
where
    P: Fn(Complex64) -> (Complex64, Complex64) + Sync,
{
    integrate_box_pushforward_from(phi, cbox, rule, 0.0)
}

/// As [`integrate_box_pushforward`], for maps known to send `|z| < r_min`
/// outside the box. The radial range is split dyadically toward the circle.
pub fn integrate_box_pushforward_from<P>(phi: P, cbox: &CarlesonBox, rule: &BoxRule, r_min: f64) -> f64
where
    P: Fn(Complex64) -> (Complex64, Complex64) + Sync,
{
    let (gx, gw) = gauss_legendre(8);
    let scan = rule.scan.max(8);
    let ring = |r: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let inside = |t: f64| cbox.contains(phi(Complex64::from_polar(r, t)).0);
        let dens = |t: f64| phi(Complex64::from_polar(r, t)).1.norm_sqr();
        let piece = |a: f64, b: f64| -> f64 {
            let h = 0.5 * (b - a);
            let c = 0.5 * (a + b);
            gx.iter().zip(&gw).map(|(x, w)| w * dens(c + h * x)).sum::<f64>() * h
        };
        let crossing = |mut a: f64, mut b: f64, a_in: bool| -> f64 {
            for _ in 0..60 {
                let m = 0.5 * (a + b);
                if inside(m) == a_in {
                    a = m;
                } else {
                    b = m;
                }
                if b - a < 1e-14 {
                    break;
                }
            }
            0.5 * (a + b)
        };
        let step = 2.0 * PI / scan as f64;
        let mut total = 0.0;
        let mut prev_in = inside(0.0);
        for k in 0..scan {
            let a = step * k as f64;
            let b = step * (k + 1) as f64;
            let b_in = inside(b);
            total += match (prev_in, b_in) {
                (true, true) => piece(a, b),
                (false, false) => 0.0,
                (true, false) => piece(a, crossing(a, b, true)),
                (false, true) => piece(crossing(a, b, false), b),
            };
            prev_in = b_in;
        }
        total / (2.0 * PI)
    };
    // dA = 2r dr dθ/2π
    let r_min = r_min.clamp(0.0, 1.0);
    const PANELS: i32 = 40;
    let tol = rule.tol / PANELS as f64;
    let edge = |k: i32| if k >= PANELS { 1.0 } else { 1.0 - (1.0 - r_min) * 0.5f64.powi(k) };
    (0..PANELS).map(|k| integrate_adaptive_jumps(&|r: f64| 2.0 * r * ring(r), edge(k), edge(k + 1), tol)).sum()
}

/// `∫_0^upper F(t) dt` split at `upper·2^{-k}`; entry `k` is the panel
/// `[upper·2^{-k-1}, upper·2^{-k}]`.
pub fn dyadic_increments<F: Fn(f64) -> f64>(f: F, upper: f64, levels: usize, q: usize) -> Vec<f64> {
    let (x, w) = gauss_legendre(q);
    (0..levels)
        .map(|k| {
            let hi = upper * 0.5f64.powi(k as i32);
            let lo = 0.5 * hi;
            let h = 0.5 * (hi - lo);
            x.iter().zip(&w).map(|(x, w)| w * f(lo + h * (1.0 + x))).sum::<f64>() * h
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Converging,
    Diverging,
    Inconclusive,
}

/// Partial sums over nested panels with the verdict drawn from their trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PanelSeries {
    pub increments: Vec<f64>,
    pub partials: Vec<f64>,
    /// Estimated remainder beyond the last panel (converging case only).
    pub tail_estimate: Option<f64>,
    /// Fitted decay exponent `p` in `Δ_k ~ k^{-p}` or the geometric ratio, as
    /// reported by `rule`.
    pub rate: Option<f64>,
    pub rule: String,
    pub verdict: Verdict,
}

impl PanelSeries {
    pub fn last_partial(&self) -> f64 {
        self.partials.last().copied().unwrap_or(0.0)
    }

    /// Partial sum plus tail estimate when converging.
    pub fn value(&self) -> Option<f64> {
        match self.verdict {
            Verdict::Converging => Some(self.last_partial() + self.tail_estimate.unwrap_or(0.0)),
            _ => None,
        }
    }
}

const TREND_WINDOW: usize = 8;

/// Classifies the increments `Δ_k ≥ 0` of an improper integral or series.
///
/// Rules, applied in order: any `+∞` increment diverges; negligible trailing
/// increments converge; a maximal ratio `≤ 0.9` over the last window is
/// geometric convergence; otherwise a power law `Δ_k ~ k^{-p}` is fitted over
/// the last window and `p ≥ 1.2` converges, `p ≤ 0.8` diverges.
pub fn panel_trend(increments: Vec<f64>) -> PanelSeries {
    let mut partials = Vec::with_capacity(increments.len());
    let mut acc = 0.0;
    for d in &increments {
        acc += d;
        partials.push(acc);
    }
    let mk = |tail: Option<f64>, rate: Option<f64>, rule: &str, verdict| PanelSeries {
        increments: increments.clone(),
        partials: partials.clone(),
        tail_estimate: tail,
        rate,
        rule: rule.to_string(),
        verdict,
    };
    if increments.iter().any(|d| d.is_nan()) {
        return mk(None, None, "nan-increment", Verdict::Inconclusive);
    }
    if increments.iter().any(|d| *d == f64::INFINITY) || acc == f64::INFINITY {
        return mk(None, None, "infinite-increment", Verdict::Diverging);
    }
    let n = increments.len();
    if n < 4 {
        return mk(None, None, "too-few-panels", Verdict::Inconclusive);
    }
    let total = partials[n - 1].abs();
    let w = TREND_WINDOW.min(n);
    let window = &increments[n - w..];
    let negligible = |d: f64| d.abs() <= 1e-300 || d.abs() <= 1e-15 * total;
    if window[w - 3..].iter().all(|d| negligible(*d)) {
        return mk(Some(0.0), None, "vanishing-increments", Verdict::Converging);
    }
    if window.iter().any(|d| *d <= 0.0) {
        // sign changes or zeros interleaved with mass: only geometric-style bound
        let last = window[w - 1].abs();
        if last <= 1e-10 * total.max(1e-300) {
            return mk(Some(last), None, "small-mixed-increments", Verdict::Converging);
        }
        return mk(None, None, "mixed-sign-increments", Verdict::Inconclusive);
    }
    let ratio = window.windows(2).map(|p| p[1] / p[0]).fold(0.0, f64::max);
    if ratio <= 0.9 {
        let last = window[w - 1];
        return mk(Some(last * ratio / (1.0 - ratio)), Some(ratio), "geometric", Verdict::Converging);
    }
    // least squares of ln Δ against ln k with k 1-based
    let pts: Vec<(f64, f64)> = (n - w..n).map(|i| (((i + 1) as f64).ln(), increments[i].ln())).collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / w as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / w as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let p = -sxy / sxx;
    if p >= 1.2 {
        let last = window[w - 1];
        let tail = last * n as f64 / (p - 1.0);
        mk(Some(tail), Some(p), "power-law", Verdict::Converging)
    } else if p <= 0.8 {
        mk(None, Some(p), "power-law", Verdict::Diverging)
    } else {
        mk(None, Some(p), "power-law", Verdict::Inconclusive)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn legendre_and_jacobi_moments() {
        let (x, w) = gauss_legendre(20);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let m6: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(6)).sum();
        assert!((m6 - 2.0 / 7.0).abs() < 1e-14);
        for a in [0.5, 1.0, -0.5, 2.5] {
            let (x, w) = gauss_jacobi(12, a);
            // ∫(1-x)^a (1+x) dx = 2^{a+2}/((a+1)(a+2))
            let lhs: f64 = x.iter().zip(&w).map(|(x, w)| w * (1.0 + x)).sum();
            let rhs = 2f64.powf(a + 2.0) / ((a + 1.0) * (a + 2.0));
            assert!((lhs - rhs).abs() < 1e-12 * rhs, "a={a}");
        }
    }

    #[test]
    fn disc_rule_examples() {
        for alpha in [0.0, 0.5, 1.0, -0.5] {
            let rule = DiscRule::gauss(alpha, 64, Angular::Fixed(16)).unwrap();
            assert!((integrate_disc(|_| 1.0, &rule).unwrap() - 1.0).abs() < 1e-10);
            let g = DiscRule::graded(alpha, 20, 8, true, Angular::Fixed(16)).unwrap();
            assert!((g.weight_sum() - 1.0).abs() < 1e-10);
        }
        let rule = DiscRule::gauss(0.0, 256, Angular::Fixed(32)).unwrap();
        for n in 1..=40 {
            let v = integrate_disc(|z| z.norm_sqr().powi(n - 1), &rule).unwrap();
            assert!((v - 1.0 / n as f64).abs() < 1e-9, "n={n}");
        }
        let lam = 0.9;
        let rule = DiscRule::graded(0.0, 40, 16, true, Angular::Adaptive { min: 64, max: 1 << 14, per_width: 40.0, floor: 0.0 }).unwrap();
        let v = integrate_disc(|z| (Complex64::new(1.0, 0.0) - z.conj() * lam).norm_sqr().powi(-2), &rule).unwrap();
        // Σ (n+1)² λ^{2n} ∫|z|^{2n} dA with the moment 1/(n+1)
        let oracle: f64 = (0..4000).map(|n| ((n + 1) as f64) * lam.powi(2 * n)).sum();
        assert!((v - oracle).abs() < 1e-6 * oracle, "{v} {oracle}");
    }

    #[test]
    fn angular_orthogonality() {
        let rule = DiscRule::gauss(0.0, 32, Angular::Fixed(64)).unwrap();
        for (a, b) in [(1, 0), (3, 1), (0, 5), (7, 2)] {
            let v = integrate_disc(|z| (z.powi(a) * z.conj().powi(b)).re, &rule).unwrap();
            assert!(v.abs() < 1e-12);
        }
    }

    #[test]
    fn nan_is_reported() {
        let rule = DiscRule::gauss(0.0, 4, Angular::Fixed(8)).unwrap();
        assert!(matches!(integrate_disc(|_| f64::NAN, &rule), Err(Error::Numeric(_))));
    }

    #[test]
    fn circle_examples() {
        assert!((integrate_circle(&[1.0; 64], false) - 2.0 * PI).abs() < 1e-14);
        let m = 4096;
        let s: Vec<f64> = (0..m).map(|k| (2.0 * PI * k as f64 / m as f64).cos().powi(2)).collect();
        assert!((integrate_circle(&s, false) - PI).abs() < 1e-10);
        let r: f64 = 0.7;
        let s = vec![1.0 / (1.0 - r * r); 64];
        assert!((integrate_circle(&s, false) - 2.0 * PI / (1.0 - r * r)).abs() < 1e-12);
    }

    #[test]
    fn box_pushforward_examples() {
        let id = |z: Complex64| (z, Complex64::new(1.0, 0.0));
        let full = CarlesonBox::new(0.0, 2.0 * PI).unwrap();
        let rule = BoxRule::default();
        assert!((integrate_box_pushforward(id, &full, &rule) - 1.0).abs() < 1e-8);
        let quarter = CarlesonBox::new(1.0, PI / 2.0).unwrap();
        let v = integrate_box_pushforward(id, &quarter, &rule);
        assert!((v - quarter.area()).abs() < 1e-6, "{v} {}", quarter.area());
        assert!((quarter.area() - 0.25 * (1.0 - 0.75f64.powi(2))).abs() < 1e-15);
        let sq = |z: Complex64| (z * z, z * 2.0);
        assert!((integrate_box_pushforward(sq, &full, &rule) - 2.0).abs() < 1e-8);
    }

    #[test]
    fn trend_rules() {
        let geo: Vec<f64> = (0..20).map(|k| 0.5f64.powi(k)).collect();
        let t = panel_trend(geo);
        assert_eq!(t.verdict, Verdict::Converging);
        assert!((t.value().unwrap() - 2.0).abs() < 1e-5);
        let p2: Vec<f64> = (1..40).map(|k| 1.0 / (k as f64).powi(2)).collect();
        assert_eq!(panel_trend(p2).verdict, Verdict::Converging);
        let harm: Vec<f64> = (1..40).map(|k| 1.0 / k as f64).collect();
        assert_eq!(panel_trend(harm).verdict, Verdict::Inconclusive);
        let flat = vec![1.0; 30];
        assert_eq!(panel_trend(flat).verdict, Verdict::Diverging);
        let grow: Vec<f64> = (0..20).map(|k| 2f64.powi(k)).collect();
        assert_eq!(panel_trend(grow).verdict, Verdict::Diverging);
        let mut zeros = vec![1.0, 0.5];
        zeros.extend(vec![0.0; 10]);
        assert_eq!(panel_trend(zeros).verdict, Verdict::Converging);
        assert_eq!(panel_trend(vec![1.0, f64::INFINITY, 1.0, 1.0]).verdict, Verdict::Diverging);
    }

    #[test]
    fn dyadic_panels_integrate_log() {
        // ∫_0^1 -ln t dt = 1
        let inc = dyadic_increments(|t| -t.ln(), 1.0, 80, 12);
        let s: f64 = inc.iter().sum();
        assert!((s - 1.0).abs() < 1e-12);
    }
}

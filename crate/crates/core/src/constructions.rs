//! Explicit symbols with prescribed boundary contact: peak symbols
//! `φ = f/(f+1)` over a null set, outer symbols `|f| = e^{-w(d(ζ,E))}` with the
//! two-sided Dirichlet estimate and the HS test, and the `exp(-e^{-f})`
//! pipeline showing the capacity condition cannot be weakened by a factor `h`.

use std::f64::consts::{FRAC_PI_4, LN_2, PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_sets::{Arc, ArcSet, LevelSet, PointTube, WeightFlags, WeightFn};
use crate::capacity::{capacity_of, CapValue, CapacityOptions};
use crate::error::{Error, Result};
use crate::hs_diag::{area_route, douglas_dirichlet, hs_dirichlet, outer_dirichlet_panels, HsOptions, HsReport, HsVerdict};
use crate::quadrature::{gauss_on, panel_trend, PanelSeries, Verdict};
use crate::series::{node_angle, outer_from_log_modulus, BoundaryGrid, PowerSeries};
use crate::spaces::dirichlet_integral;
use crate::symbols::{series_ring, SymbolSpec};

fn require_pow2(m: usize, min: usize) -> Result<()> {
    if !m.is_power_of_two() || m < min {
        return Err(Error::InvalidGrid(format!("grid {m} must be a power of two ≥ {min}")));
    }
    Ok(())
}

/// The points of `set` when it has measure zero at resolution `h`: arcs shorter
/// than `h` are replaced by their midpoints.
fn null_set_points(set: &ArcSet, h: f64) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::Precondition("the set must be nonempty".into()));
    }
    if let Some(a) = set.arcs().iter().find(|a| a.len >= h) {
        return Err(Error::Precondition(format!(
            "set has positive measure: arc of length {} at {} exceeds the grid step {h}",
            a.len, a.start
        )));
    }
    let mut pts: Vec<f64> = set.arcs().iter().map(|a| a.midpoint().rem_euclid(TAU)).collect();
    pts.sort_by(|a, b| a.total_cmp(b));
    pts.dedup();
    Ok(pts)
}

// ---------------------------------------------------------------------------
// peak symbols

#[derive(Debug, Clone, Serialize)]
pub struct PeakConstruction {
    pub points: Vec<f64>,
    pub grid: usize,
    /// Complementary arcs by decreasing length.
    pub gaps: Vec<Arc>,
    pub tau: Vec<f64>,
    /// Partial sums of `Σ τ_n² ℓ_n` in the gap order.
    pub tau_sq_len: Vec<f64>,
    /// `2√s_1`, the telescoping bound on `Σ τ_n² ℓ_n`.
    pub tau_sq_len_bound: f64,
    /// `∫_0^{2π} g² dt` on the grid.
    pub g_l2_grid: f64,
    /// `(π/2) Σ τ_n² ℓ_n`, the closed form of `∫ g² dt`.
    pub g_l2_exact: f64,
    /// `π Σ τ_n² ℓ_n`.
    pub g_l2_stated: f64,
    /// `1 + 2 Σ_n |ĝ(n)|²`.
    pub certificate: f64,
    /// `(1/2π) ∫ dt/(1-|φ|²)` on the grid.
    pub measured: f64,
    /// `(ε, |E_φ(1-ε)|)` on the grid.
    pub level_measures: Vec<(f64, f64)>,
    pub max_modulus: f64,
    #[serde(skip)]
    pub g: BoundaryGrid,
    #[serde(skip)]
    pub v: BoundaryGrid,
    #[serde(skip)]
    pub phi: SymbolSpec,
}

impl PeakConstruction {
    pub fn certificate_holds(&self) -> bool {
        self.measured <= self.certificate * (1.0 + 1e-12)
    }

    pub fn tau_increasing(&self) -> bool {
        self.tau.windows(2).all(|w| w[1] >= w[0])
    }

    /// Level measures nonincreasing as `ε → 0` and at most two nodes per
    /// point at the smallest `ε`.
    pub fn level_sets_shrink(&self) -> bool {
        let h = TAU / self.grid as f64;
        let ms: Vec<f64> = self.level_measures.iter().map(|x| x.1).collect();
        ms.windows(2).all(|w| w[1] <= w[0]) && ms.last().is_some_and(|m| *m <= 2.0 * h * self.points.len() as f64 + 1e-12)
    }
}

/// `∫_a^b g² dy` for `g = τ √ℓ (4y(ℓ-y))^{-1/4}` on `[0, ℓ]`.
fn g_sq_integral(tau: f64, len: f64, a: f64, b: f64) -> f64 {
    let (a, b) = (a.clamp(0.0, len), b.clamp(0.0, len));
    if b <= a {
        return 0.0;
    }
    let s = |y: f64| ((2.0 * y - len) / len).clamp(-1.0, 1.0).asin();
    tau * tau * len * 0.5 * (s(b) - s(a))
}

pub fn build_peak_symbol(set: &ArcSet, grid: usize) -> Result<PeakConstruction> {
    require_pow2(grid, 1 << 8)?;
    let h = TAU / grid as f64;
    let points = null_set_points(set, h)?;
    let k = points.len();
    // gap i runs from points[i] to points[i+1]
    let lens: Vec<f64> =
        (0..k).map(|i| if k == 1 { TAU } else { (points[(i + 1) % k] - points[i]).rem_euclid(TAU) }).collect();
    if let Some(small) = lens.iter().copied().find(|l| *l < 8.0 * h) {
        return Err(Error::Resolution(format!("complementary arc of length {small:e} is below 8 grid steps ({:e})", 8.0 * h)));
    }
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|a, b| lens[*b].total_cmp(&lens[*a]));
    let mut tail: f64 = lens.iter().sum();
    let mut tau = vec![0.0; k];
    let mut tau_sorted = Vec::with_capacity(k);
    let mut tau_sq_len = Vec::with_capacity(k);
    let s1 = tail;
    let mut acc = 0.0;
    for &i in &order {
        let t = tail.powf(-0.25);
        tau[i] = t;
        tau_sorted.push(t);
        acc += t * t * lens[i];
        tau_sq_len.push(acc);
        tail -= lens[i];
    }

    let g_vals: Vec<f64> = (0..grid)
        .into_par_iter()
        .map(|n| {
            let theta = node_angle(n, grid);
            let i = match points.partition_point(|p| *p <= theta) {
                0 => k - 1,
                j => j - 1,
            };
            let y = (theta - points[i]).rem_euclid(TAU);
            let len = lens[i];
            if y > h && len - y > h {
                return tau[i] * len.sqrt() * (4.0 * y * (len - y)).powf(-0.25);
            }
            // mean of g² over the cell, from the neighbouring gaps
            let mut mass = 0.0;
            let mut seen = Vec::with_capacity(3);
            for d in [k - 1, 0, 1] {
                let j = (i + d) % k;
                if seen.contains(&j) {
                    continue;
                }
                seen.push(j);
                let mut y0 = (theta - 0.5 * h - points[j]).rem_euclid(TAU);
                if y0 > PI {
                    y0 -= TAU;
                }
                for shift in [0.0, TAU] {
                    mass += g_sq_integral(tau[j], lens[j], y0 + shift, y0 + shift + h);
                }
            }
            (mass / h).sqrt()
        })
        .collect();

    let g = BoundaryGrid::from_real(g_vals.clone())?;
    let v = g.harmonic_conjugate()?;
    let mean_sq = g_vals.iter().map(|x| x * x).sum::<f64>() / grid as f64;
    let certificate = 1.0 + 2.0 * mean_sq;
    let mut measured = 0.0;
    let mut one_minus = Vec::with_capacity(grid);
    let mut phi_samples = Vec::with_capacity(grid);
    for (u, v) in g_vals.iter().zip(v.real_parts()) {
        let f = Complex64::new(*u, v);
        let den = (u + 1.0).powi(2) + v * v;
        measured += den / (2.0 * u + 1.0);
        let phi = f / (f + 1.0);
        let gap = (2.0 * u + 1.0) / den; // 1 - |φ|²
        one_minus.push(gap / (1.0 + phi.norm()));
        phi_samples.push(phi);
    }
    measured /= grid as f64;
    let max_modulus = phi_samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let level_measures = (1..=6)
        .map(|e| {
            let eps = 10f64.powi(-e);
            (eps, h * one_minus.iter().filter(|x| **x <= eps).count() as f64)
        })
        .collect();
    let coeffs = PowerSeries::from_boundary(&BoundaryGrid::new(phi_samples.clone())?, grid / 2 - 1)?;
    let phi = SymbolSpec::RawSeries { coeffs, boundary: Some(phi_samples) };
    let sum = tau_sq_len.last().copied().unwrap_or(0.0);
    Ok(PeakConstruction {
        gaps: order.iter().map(|&i| Arc::new(points[i], lens[i])).collect(),
        points,
        grid,

        tau: tau_sorted,
        tau_sq_len,
        tau_sq_len_bound: 2.0 * s1.sqrt(),
        g_l2_grid: TAU * mean_sq,
        g_l2_exact: 0.5 * PI * sum,
        g_l2_stated: PI * sum,
        certificate,
        measured,
        level_measures,
        max_modulus,
        g,
        v,
        phi,
    })
}

// ---------------------------------------------------------------------------
// outer symbols

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerIdentity {
    pub n: u32,
    /// `max |f^n - f_{nw}|` over the boundary grid.
    pub gap: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OuterConstruction {
    pub spec: SymbolSpec,
    pub flags: WeightFlags,
    pub max_modulus: f64,
    pub power_identity: Vec<PowerIdentity>,
    /// Continuity at `E` is only asserted when the weight is Dini.
    pub continuity_evidence: bool,
    pub notes: Vec<String>,
}

impl OuterConstruction {
    pub fn power_identity_holds(&self, tol: f64) -> bool {
        self.power_identity.iter().all(|p| p.gap <= tol)
    }
}

fn outer_boundary(set: &ArcSet, weight: &WeightFn, grid: usize) -> Result<BoundaryGrid> {
    let u = BoundaryGrid::from_real_fn(grid, |t| -weight.value(set.distance(t)))?;
    let h = u.analytic_completion()?;
    BoundaryGrid::new(h.samples().iter().map(|z| z.exp()).collect())
}

pub fn build_outer_symbol(set: &ArcSet, weight: &WeightFn, grid: usize, require_disc_algebra: bool) -> Result<OuterConstruction> {
    require_pow2(grid, 1 << 6)?;
    weight.validate()?;
    if set.is_empty() {
        return Err(Error::Precondition("outer symbol needs a nonempty set".into()));
    }
    let flags = weight.check_flags(None);
    if !flags.nonnegative {
        return Err(Error::Precondition("weight takes negative values".into()));
    }
    let mut notes = Vec::new();
    if require_disc_algebra && !flags.dini {
        return Err(Error::Precondition(format!("weight {weight:?} fails the Dini condition; continuity at E cannot be asserted")));
    }
    if !flags.dini {
        notes.push("weight is not Dini: no continuity claim at E".into());
    } else {
        notes.push(format!("continuity evidence on the grid at resolution {grid} only"));
    }
    let spec = SymbolSpec::Outer { set: set.clone(), weight: *weight, grid };
    let symbol = spec.compile()?;
    let max_modulus = symbol.boundary_modulus(grid)?.into_iter().fold(0.0, f64::max);
    if max_modulus > 1.0 + 1e-12 {
        return Err(Error::Numeric(format!("outer symbol reaches modulus {max_modulus} on the grid")));
    }
    let f = outer_boundary(set, weight, grid)?;
    let power_identity = (1..=16u32)
        .map(|n| {
            let fn_w = outer_boundary(set, &weight.scaled(n as f64), grid)?;
            let gap = f.samples().iter().zip(fn_w.samples()).map(|(a, b)| (a.powu(n) - b).norm()).fold(0.0, f64::max);
            Ok(PowerIdentity { n, gap })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(OuterConstruction { spec, flags, max_modulus, power_identity, continuity_evidence: flags.dini, notes })
}

#[derive(Debug, Clone, Serialize)]
pub struct LemmaReport {
    pub flags: WeightFlags,
    /// `𝒟(f)` from the Taylor coefficients of the outer function.
    pub lhs_series: f64,
    /// `𝒟(f)` from Carleson's boundary formula.
    pub lhs_boundary: PanelSeries,
    /// `∫_𝕋 w'(d)² e^{-2w(d)} d |dζ|`.
    pub rhs: PanelSeries,
    pub ratio_series: Option<f64>,
    pub ratio_boundary: Option<f64>,
    pub both_zero: bool,
}

impl LemmaReport {
    /// Both left-side routes within `[1/c, c]` of the right side, or every
    /// side zero.
    pub fn within(&self, c: f64) -> bool {
        if self.both_zero {
            return true;
        }
        let ok = |r: Option<f64>| r.is_some_and(|r| r >= 1.0 / c && r <= c);
        ok(self.ratio_series) && ok(self.ratio_boundary)
    }
}

const ZERO_SIDE: f64 = 1e-12;

/// Both sides of the two-sided Dirichlet estimate, without the hypotheses.
pub fn lemma_sides(set: &ArcSet, weight: &WeightFn, grid: usize, gamma: Option<f64>) -> Result<LemmaReport> {
    require_pow2(grid, 1 << 6)?;
    weight.validate()?;
    let flags = weight.check_flags(gamma);
    let logmod = BoundaryGrid::from_real_fn(grid, |t| -weight.value(set.distance(t)))?;
    let lhs_series = dirichlet_integral(&outer_from_log_modulus(&logmod, grid / 2 - 1)?);
    // many components: trade nodes per panel for depth within the node budget
    let q = if set.arcs().len() > 8 { 4 } else { 8 };
    let lhs_boundary = outer_dirichlet_panels(set, weight, 1.0, 80, q)?;
    let rhs = set.integrate_distance_profile(
        |t| {
            let dw = weight.derivative(t);
            dw * dw * (-2.0 * weight.value(t)).exp() * t
        },
        0.0,
        200,
        8,
    )?;
    let r = rhs.value().unwrap_or(f64::INFINITY);
    let lb = lhs_boundary.value().unwrap_or(f64::INFINITY);
    let both_zero = r.abs() < ZERO_SIDE && lhs_series.abs() < ZERO_SIDE && lb.abs() < ZERO_SIDE;
    let ratio = |l: f64| (r > ZERO_SIDE && r.is_finite() && l.is_finite()).then(|| l / r);
    Ok(LemmaReport { flags, lhs_series, ratio_series: ratio(lhs_series), ratio_boundary: ratio(lb), lhs_boundary, rhs, both_zero })
}

/// The two-sided estimate under its hypotheses: `w` nondecreasing and
/// `t ↦ w(t^γ)` concave.
pub fn check_lemma_norme(set: &ArcSet, weight: &WeightFn, gamma: f64, grid: usize) -> Result<LemmaReport> {
    let flags = weight.check_flags(Some(gamma));
    if !flags.nondecreasing {
        return Err(Error::Precondition(format!("weight {weight:?} is not nondecreasing")));
    }
    if flags.concave_at_gamma != Some(true) {
        return Err(Error::Precondition(format!("w(t^{gamma}) is not concave near 0 for {weight:?}")));
    }
    lemma_sides(set, weight, grid, Some(gamma))
}

#[derive(Debug, Clone, Serialize)]
pub struct TheoremReport {
    /// `∫_𝕋 w'(d)²/w(d)² d |dζ|`.
    pub integral: PanelSeries,
    pub hs: HsReport,
    pub agree: bool,
    pub notes: Vec<String>,
}

/// HS membership of `C_f` on `𝒟` for the outer symbol against the boundary
/// integral criterion.
pub fn check_theorem_thnorme(set: &ArcSet, weight: &WeightFn, grid: usize, opts: &HsOptions) -> Result<TheoremReport> {
    weight.validate()?;
    let integral = set.integrate_distance_profile(
        |t| {
            let dw = weight.derivative(t);
            if dw == 0.0 {
                0.0
            } else {
                let w = weight.value(t);
                dw * dw / (w * w) * t
            }
        },
        0.0,
        200,
        8,
    )?;
    let phi = SymbolSpec::Outer { set: set.clone(), weight: *weight, grid }.compile()?;
    let hs = hs_dirichlet(&phi, opts)?;
    let agree = matches!(
        (integral.verdict, hs.verdict),
        (Verdict::Converging, HsVerdict::FiniteEvidence) | (Verdict::Diverging, HsVerdict::InfiniteEvidence)
    );
    let mut notes = Vec::new();
    if set.measure() > 0.0 {
        notes.push("E has positive measure; the criterion is stated for null sets".into());
    }
    Ok(TheoremReport { integral, hs, agree, notes })
}

// ---------------------------------------------------------------------------
// optimality pipeline

/// Growth factor `h: [1,∞) → [1,∞)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum GrowthFn {
    /// `1 + log x`.
    OnePlusLog,
    /// `1 + log(1 + log x)`.
    LogLog,
    /// `x^p`.
    Power { p: f64 },
    Constant { c: f64 },
}

impl GrowthFn {
    pub fn h(&self, x: f64) -> f64 {
        match *self {
            GrowthFn::OnePlusLog => 1.0 + x.ln(),
            GrowthFn::LogLog => 1.0 + x.ln().ln_1p(),
            GrowthFn::Power { p } => x.powf(p),
            GrowthFn::Constant { c } => c,
        }
    }

    /// `k(x) = h(e^x)`.
    pub fn k(&self, x: f64) -> f64 {
        match *self {
            GrowthFn::OnePlusLog => 1.0 + x,
            GrowthFn::LogLog => 1.0 + x.ln_1p(),
            GrowthFn::Power { p } => (p * x).exp(),
            GrowthFn::Constant { c } => c,
        }
    }

    /// `inf{x ≥ 0 : k(x) ≥ y}`, infinite when never reached.
    fn k_inverse(&self, y: f64) -> f64 {
        let x = match *self {
            GrowthFn::OnePlusLog => y - 1.0,
            GrowthFn::LogLog => (y - 1.0).exp_m1(),
            GrowthFn::Power { p } => y.ln() / p,
            GrowthFn::Constant { c } => {
                if y <= c {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        };
        x.max(0.0)
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            GrowthFn::Power { p } => p > 0.0 && p.is_finite(),
            GrowthFn::Constant { c } => c >= 1.0 && c.is_finite(),
            _ => true,
        };
        let xs: Vec<f64> = (0..=300).map(|k| 10f64.powf(k as f64)).collect();
        let monotone = xs.windows(2).all(|w| self.h(w[1]) >= self.h(w[0]));
        if ok && monotone && self.h(1.0) >= 1.0 {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("{self:?} is not a nondecreasing map [1,∞) → [1,∞)")))
        }
    }
}

/// Continuous nonincreasing `ψ`, linear in `X = x²` between knots and
/// `∝ X^{-3}` beyond the last one.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Psi {
    /// Knots in `X = x²`.
    pub knots: Vec<f64>,
    pub values: Vec<f64>,
    /// Plateau index `j` of each segment (`k ≥ 2^j` on it).
    pub levels: Vec<i32>,
    /// Segments whose value was capped to keep `ψ` monotone.
    pub capped: Vec<bool>,
}

const MAX_PLATEAUS: usize = 48;

impl Psi {
    pub fn build(growth: &GrowthFn) -> Result<Psi> {
        growth.validate()?;
        let k0 = growth.k(0.0);
        let mut j = k0.log2().floor() as i32;
        let mut knots = vec![0.0];
        let mut values = Vec::new();
        let mut levels = Vec::new();
        let mut capped = Vec::new();
        let mut prev = f64::INFINITY;
        while values.len() < MAX_PLATEAUS {
            let x = growth.k_inverse(2f64.powi(j + 1));
            let big = x * x;
            if !big.is_finite() || big > 1e300 {
                break;
            }
            let start = *knots.last().unwrap();
            let mut end = big.max(start);
            let mass = 2f64.powi(-j);
            let mut v = mass / (end - start);
            let cap = v > prev;
            if cap {
                v = prev;
                end = start + mass / v;
            }
            knots.push(end);
            values.push(v);
            levels.push(j);
            capped.push(cap);
            prev = v;
            j += 1;
        }
        let finite = values.iter().filter(|v| v.is_finite()).count();
        if finite < 4 {
            return Err(Error::Precondition(format!("{growth:?} does not grow: only {finite} plateaus before overflow")));
        }
        // node values: plateau value at its left knot, last one repeated
        let mut node_values = values.clone();
        node_values.push(*values.last().unwrap());
        Ok(Psi { knots, values: node_values, levels, capped })
    }

    pub fn top(&self) -> f64 {
        self.values[0]
    }

    fn last(&self) -> (f64, f64) {
        (*self.knots.last().unwrap(), *self.values.last().unwrap())
    }

    /// `ψ` as a function of `X = x²`.
    pub fn at_sq(&self, big: f64) -> f64 {
        let (xl, vl) = self.last();
        if big >= xl {
            return vl * (xl / big).powi(3);
        }
        let i = self.knots.partition_point(|k| *k <= big).saturating_sub(1);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        let s = (big - a) / (b - a);
        self.values[i] + s * (self.values[i + 1] - self.values[i])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.at_sq(x * x)
    }

    /// `x` with `ψ(x) = c` (leftmost on flat pieces) and `dX/dc` there.
    fn inverse_sq(&self, c: f64) -> (f64, f64) {
        if c >= self.values[0] {
            return (0.0, 0.0);
        }
        let (xl, vl) = self.last();
        if c < vl {
            let big = xl * (vl / c).cbrt();
            return (big, -big / (3.0 * c));
        }
        let i = self.values.partition_point(|v| *v > c).saturating_sub(1).min(self.knots.len() - 2);
        let (va, vb) = (self.values[i], self.values[i + 1]);
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        if va == vb {
            return (a, 0.0);
        }
        (a + (va - c) / (va - vb) * (b - a), -(b - a) / (va - vb))
    }

    pub fn inverse(&self, c: f64) -> f64 {
        self.inverse_sq(c).0.sqrt()
    }

    /// Segment integrals of `∫ ψ dX` and the closed-form tail.
    pub fn mass_panels(&self) -> PanelSeries {
        let mut inc: Vec<f64> = self.knots.windows(2).zip(self.values.windows(2)).map(|(k, v)| 0.5 * (v[0] + v[1]) * (k[1] - k[0])).collect();
        let (xl, vl) = self.last();
        let mut p = panel_trend(inc.clone());
        inc.push(0.5 * vl * xl);
        p.tail_estimate = p.tail_estimate.map(|t| t.max(inc[inc.len() - 1]));
        p
    }

    /// Segment integrals of `∫ ψ(x) k(x) dX`.
    pub fn weighted_panels(&self, growth: &GrowthFn) -> PanelSeries {
        let inc = self
            .knots
            .windows(2)
            .map(|k| gauss_on(k[0], k[1], 16).iter().map(|(big, w)| w * self.at_sq(*big) * growth.k(big.sqrt())).sum())
            .collect();
        panel_trend(inc)
    }
}

/// `cap(E_t)` on a grid in `ln t`, interpolated with `1/cap` linear in `ln t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapTable {
    /// Decreasing.
    pub ln_t: Vec<f64>,
    /// Nonincreasing as `t` decreases (after the running minimum).
    pub cap: Vec<f64>,
    /// Largest relative deviation from `1/(-ln sin(t/2))` for a single point.
    pub single_point_gap: Option<f64>,
}

impl CapTable {
    pub fn build(points: &[f64], ln_t_min: f64, per_decade: usize, atoms: usize) -> Result<CapTable> {
        let step = std::f64::consts::LN_10 / per_decade as f64;
        let top = PI.ln();
        let n = ((top - ln_t_min) / step).ceil() as usize + 1;
        let ln_t: Vec<f64> = (0..n).map(|i| top - step * i as f64).collect();
        let opts = CapacityOptions { atoms, sequence: false, ..CapacityOptions::default() };
        let raw: Vec<f64> = ln_t
            .par_iter()
            .map(|lt| {
                let tube = LevelSet::Tube(PointTube { centers: points.to_vec(), ln_radius: *lt });
                let r = capacity_of(&tube, 0.0, &opts)?;
                Ok(match r.value {
                    CapValue::Infinite => f64::INFINITY,
                    CapValue::Finite(c) => c,
                })
            })
            .collect::<Result<_>>()?;
        let mut cap = raw;
        for i in 1..cap.len() {
            cap[i] = cap[i].min(cap[i - 1]);
        }
        let single_point_gap = (points.len() == 1).then(|| {
            ln_t.iter()
                .zip(&cap)
                .filter(|(lt, _)| **lt < top - 1e-9)
                .map(|(lt, c)| {
                    let exact = 1.0 / -(0.5 * lt.exp()).sin().ln();
                    (c - exact).abs() / exact
                })
                .fold(0.0, f64::max)
        });
        Ok(CapTable { ln_t, cap, single_point_gap })
    }

    /// `(cap(E_t), d cap/d ln t)`.
    pub fn at(&self, ln_t: f64) -> (f64, f64) {
        let n = self.ln_t.len();
        let i = self.ln_t.partition_point(|v| *v > ln_t);
        let (a, b) = if i == 0 {
            (0, 1)
        } else if i >= n {
            (n - 2, n - 1)
        } else {
            (i - 1, i)
        };
        let (ra, rb) = (1.0 / self.cap[a], 1.0 / self.cap[b]);
        let slope = (rb - ra) / (self.ln_t[b] - self.ln_t[a]);
        let r = ra + slope * (ln_t - self.ln_t[a]);
        if !r.is_finite() || r <= 0.0 {
            return (f64::INFINITY, 0.0);
        }
        (1.0 / r, -slope / (r * r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecOptions {
    pub grid: usize,
    pub atoms: usize,
    /// Dyadic levels toward `E` in the Douglas route.
    pub levels: usize,
    pub ln_t_min: f64,
    pub per_decade: usize,
}

impl Default for RecOptions {
    fn default() -> Self {
        RecOptions { grid: 1 << 16, atoms: 64, levels: 300, ln_t_min: -700.0, per_decade: 2 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RecMembership {
    /// `𝒟(f)` by the Douglas formula on nodes graded toward `E`.
    pub douglas: PanelSeries,
    /// `𝒟` of the grid polynomial.
    pub grid_dirichlet: f64,
    pub divergence_flag: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecHs {
    /// `∫ |φ'|²/(1-|φ|²)² dA` on the grid polynomial.
    pub area: PanelSeries,
    /// Largest sampled `|φ'|²(1-|φ|²)^{-2}/|f'|²`; at most `1/2` in theory.
    pub max_ratio: f64,
    pub ratio_ok: bool,
    pub verdict: HsVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecCapacity {
    /// Lower bound `∫ ½ψ(y/c) k(y) d(y²)` per segment of `ψ`.
    pub weighted: PanelSeries,
    /// Upper bound of `∫ cap(E_φ(s)) log(1/(1-s)) ds/(1-s)` per segment.
    pub unweighted: PanelSeries,
    pub inclusion_checked: usize,
    pub inclusion_violations: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RecPipeline {
    pub points: Vec<f64>,
    pub growth: GrowthFn,
    pub psi: Psi,
    pub psi_mass: PanelSeries,
    pub psi_weighted: PanelSeries,
    pub table: CapTable,
    /// `f = c(η(d) + i η̃)`.
    pub scale: f64,
    pub max_imag: f64,
    pub membership: RecMembership,
    pub hs: RecHs,
    pub capacity: RecCapacity,
    pub notes: Vec<String>,
    #[serde(skip)]
    pub phi: SymbolSpec,
}

/// `η(t) = ψ^{-1}(cap(E_t))` and `η'(t)`, from `ln t`.
fn eta(psi: &Psi, table: &CapTable, ln_t: f64) -> (f64, f64) {
    let (cap, dcap_dlnt) = table.at(ln_t);
    if cap >= psi.top() {
        return (0.0, 0.0);
    }
    let (big, dbig) = psi.inverse_sq(cap);
    let x = big.sqrt();
    if x == 0.0 {
        return (0.0, 0.0);
    }
    let t = ln_t.exp();
    let deriv = if t > 0.0 { dbig / (2.0 * x) * dcap_dlnt / t } else { 0.0 };
    (x, deriv)
}

/// `y` with `−log|φ| ≤ √2 e^{-y'}` implied by `|φ| ≥ 1 - e^{-y}`:
/// `y = −ln(1 − exp(−e^{-y'}/√2))`, and `dy/dy'`.
fn shifted_level(yp: f64) -> (f64, f64) {
    let a = (-yp).exp() / 2f64.sqrt();
    if a < 1e-8 {
        // -ln(1 - e^{-a}) = -ln a + a/2 + O(a²), and a may underflow
        return (yp + 0.5 * LN_2 + 0.5 * a, 1.0 - 0.5 * a);
    }
    (-(-(-a).exp_m1()).ln(), a / a.exp_m1())
}

pub fn build_rec_pipeline(set: &ArcSet, growth: &GrowthFn, opts: &RecOptions) -> Result<RecPipeline> {
    require_pow2(opts.grid, 1 << 8)?;
    if set.arcs().iter().any(|a| !a.is_degenerate()) {
        return Err(Error::Precondition("the pipeline needs a finite point set (capacity zero)".into()));
    }
    let points = null_set_points(set, f64::MIN_POSITIVE)?;
    let psi = Psi::build(growth)?;
    let psi_mass = psi.mass_panels();
    let psi_weighted = psi.weighted_panels(growth);
    let mut notes = Vec::new();
    if psi_mass.verdict != Verdict::Converging || psi_weighted.verdict != Verdict::Diverging {
        notes.push(format!("ψ certificates: mass {:?}, weighted {:?}", psi_mass.verdict, psi_weighted.verdict));
    }
    let table = CapTable::build(&points, opts.ln_t_min, opts.per_decade, opts.atoms)?;

    // boundary data
    let m = opts.grid;
    let h = TAU / m as f64;
    let eta_grid: Vec<f64> = (0..m).map(|k| eta(&psi, &table, set.distance(node_angle(k, m)).max(0.25 * h).ln()).0).collect();
    let conj = BoundaryGrid::from_real(eta_grid.clone())?.harmonic_conjugate()?.real_parts();
    let vmax = conj.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let scale = if vmax > 0.0 { (0.9 * FRAC_PI_4 / vmax).min(1.0) } else { 1.0 };
    if scale < 1.0 {
        notes.push(format!("f rescaled by {scale:.6} to keep |Im f| < π/4"));
    }
    let u: Vec<f64> = eta_grid.iter().map(|e| scale * e).collect();
    let v: Vec<f64> = conj.iter().map(|e| scale * e).collect();
    let f_samples: Vec<Complex64> = u.iter().zip(&v).map(|(a, b)| Complex64::new(*a, *b)).collect();
    let f = PowerSeries::from_boundary(&BoundaryGrid::new(f_samples.clone())?, m / 2 - 1)?;
    let phi = SymbolSpec::Exp2 { f: f.clone(), boundary: Some(f_samples) };
    let symbol = phi.compile()?;

    // (a) membership of f
    let douglas = douglas_dirichlet(
        set,
        |d| {
            let (e, de) = eta(&psi, &table, d.ln());
            (scale * e, scale * de)
        },
        opts.levels,
        8,
    )?;
    let membership = RecMembership {
        divergence_flag: douglas.verdict != Verdict::Converging,
        grid_dirichlet: dirichlet_integral(&f),
        douglas,
    };

    // (b) HS on 𝒟 through |φ'|²/(1-|φ|²)² ≤ |f'|²/2
    let area = area_route(&symbol, 0.0, &HsOptions::default())?.panels;
    let mut max_ratio: f64 = 0.0;
    for r in [0.5, 0.9, 0.99, 0.999, 0.9999] {
        let (fv, fd) = series_ring(&f, r, 4096);
        for (fv, fd) in fv.iter().zip(&fd) {
            if fd.norm() < 1e-12 {
                continue;
            }
            let e = (-fv).exp();
            let one_minus = -(-2.0 * e.re).exp_m1();
            let phi_abs_sq = (-2.0 * e.re).exp();
            let ratio = phi_abs_sq * e.norm_sqr() / (one_minus * one_minus);
            max_ratio = max_ratio.max(ratio);
        }
    }
    let ratio_ok = max_ratio <= 0.5 * (1.0 + 1e-9);
    let hs_verdict = if area.verdict == Verdict::Diverging {
        HsVerdict::InfiniteEvidence
    } else if ratio_ok && membership.douglas.verdict == Verdict::Converging {
        HsVerdict::FiniteEvidence
    } else {
        HsVerdict::Inconclusive
    };
    let hs = RecHs { area, max_ratio, ratio_ok, verdict: hs_verdict };

    // (c) capacity integrals in y = log(1/(1-s))
    let weighted = panel_trend(
        psi.knots
            .windows(2)
            .map(|k| {
                gauss_on(k[0], k[1], 16)
                    .iter()
                    .map(|(big, w)| w * 0.5 * psi.at_sq(*big) * growth.k(scale * big.sqrt()) * scale * scale)
                    .sum()
            })
            .collect(),
    );
    let unweighted = panel_trend(
        psi.knots
            .windows(2)
            .map(|k| {
                gauss_on(scale * k[0].sqrt(), scale * k[1].sqrt(), 16)
                    .iter()
                    .map(|(yp, w)| {
                        let (y, dy) = shifted_level(*yp);
                        w * psi.eval(yp / scale) * y * dy
                    })
                    .sum()
            })
            .collect(),
    );
    let umax = u.iter().copied().fold(0.0, f64::max);
    let mut inclusion_checked = 0;
    let mut inclusion_violations = 0;
    let mut y = 0.25;
    while y <= umax {
        let bound = -(-(-y).exp()).ln_1p(); // -ln s
        for (a, b) in u.iter().zip(&v) {
            if *a >= y {
                inclusion_checked += 1;
                if (-a).exp() * b.cos() > bound {
                    inclusion_violations += 1;
                }
            }
        }
        y += 0.25;
    }
    notes.push(format!(
        "capacity integrals use cap(E_t) = ψ(η(t)) for t ≥ e^{{{}}} from the table and its extrapolation below",
        opts.ln_t_min
    ));
    Ok(RecPipeline {
        points,
        growth: *growth,
        psi,
        psi_mass,
        psi_weighted,
        table,
        scale,
        max_imag: v.iter().map(|x| x.abs()).fold(0.0, f64::max),
        membership,
        hs,
        capacity: RecCapacity { weighted, unweighted, inclusion_checked, inclusion_violations },
        notes,
        phi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boundary_sets::cantor_generator;

    #[test]
    fn peak_single_point() {
        let pc = build_peak_symbol(&ArcSet::points(&[0.0]), 1 << 14).unwrap();
        assert!(pc.certificate_holds(), "{} vs {}", pc.measured, pc.certificate);
        assert!((pc.g_l2_grid / pc.g_l2_exact - 1.0).abs() < 1e-3, "{} {}", pc.g_l2_grid, pc.g_l2_exact);
        assert!(pc.level_sets_shrink(), "{:?}", pc.level_measures);
        assert!(pc.max_modulus < 1.0);
        assert!(pc.tau_sq_len.last().unwrap() <= &pc.tau_sq_len_bound);
    }

    #[test]
    fn peak_cantor_points() {
        let e = cantor_generator(&[1.0 / 3.0], 6).unwrap().collapse_to_points();
        let pc = build_peak_symbol(&e, 1 << 15).unwrap();
        assert!(pc.tau_increasing());
        assert!(pc.certificate_holds());
        assert!((pc.g_l2_grid / pc.g_l2_exact - 1.0).abs() < 1e-3);
    }

    #[test]
    fn peak_rejects_positive_measure_and_coarse_grids() {
        assert!(matches!(build_peak_symbol(&ArcSet::arc(0.0, 0.5), 1 << 12), Err(Error::Precondition(_))));
        assert!(matches!(build_peak_symbol(&ArcSet::points(&[0.0, 1e-3]), 1 << 12), Err(Error::Resolution(_))));
    }

    #[test]
    fn outer_constant_and_power_identity() {
        let oc = build_outer_symbol(&ArcSet::points(&[0.0]), &WeightFn::Constant { c: 0.7 }, 1 << 10, true).unwrap();
        let phi = oc.spec.compile().unwrap();
        let v = phi.eval(Complex64::new(0.3, 0.2)).unwrap();
        assert!((v - Complex64::new((-0.7f64).exp(), 0.0)).norm() < 1e-12);
        let oc = build_outer_symbol(&ArcSet::points(&[1.0]), &WeightFn::Power { c: 1.0, a: 1.0 }, 1 << 12, false).unwrap();
        assert!(oc.power_identity_holds(1e-9), "{:?}", oc.power_identity);
        assert!(oc.max_modulus <= 1.0);
    }

    #[test]
    fn outer_rejects_non_dini_when_continuity_is_required() {
        let w = WeightFn::LogInversePower { c: 1.0, b: 0.5 };
        assert!(build_outer_symbol(&ArcSet::points(&[0.0]), &w, 1 << 10, true).is_err());
        assert!(build_outer_symbol(&ArcSet::points(&[0.0]), &w, 1 << 10, false).is_ok());
    }

    #[test]
    fn carleson_route_matches_coefficients_on_an_arc() {
        let set = ArcSet::arc(1.0, 0.5);
        let w = WeightFn::Power { c: 0.5, a: 2.0 };
        let rep = lemma_sides(&set, &w, 1 << 14, None).unwrap();
        let b = rep.lhs_boundary.value().unwrap();
        assert!((b - rep.lhs_series).abs() < 2e-3 * b, "{b} {}", rep.lhs_series);
    }

    #[test]
    fn lemma_constant_weight_is_zero_on_both_sides() {
        let rep = check_lemma_norme(&ArcSet::points(&[0.0]), &WeightFn::Constant { c: 1.0 }, 3.0, 1 << 10).unwrap();
        assert!(rep.both_zero);
        assert!(rep.within(20.0));
    }

    #[test]
    fn psi_certificates() {
        for g in [GrowthFn::OnePlusLog, GrowthFn::LogLog, GrowthFn::Power { p: 0.5 }] {
            let psi = Psi::build(&g).unwrap();
            assert!(psi.values.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(psi.mass_panels().verdict, Verdict::Converging, "{g:?}");
            assert_eq!(psi.weighted_panels(&g).verdict, Verdict::Diverging, "{g:?}");
            for c in [psi.top() * 0.5, psi.values[5], psi.values.last().unwrap() * 0.1] {
                let x = psi.inverse(c);
                assert!((psi.eval(x) - c).abs() < 1e-9 * c, "{g:?} {c}");
            }
        }
        assert!(Psi::build(&GrowthFn::Constant { c: 1.0 }).is_err());
        assert!(Psi::build(&GrowthFn::Constant { c: 1000.0 }).is_err());
    }
}

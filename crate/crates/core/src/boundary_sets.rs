//! Closed subsets of the circle as finite unions of closed arcs, distances,
//! tubes, superlevel sets of boundary samples and Cantor-type sets.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{dyadic_increments, gauss_on, panel_trend, PanelSeries};

const TAU: f64 = 2.0 * PI;

/// Closed arc `{start + x : 0 ≤ x ≤ len}` (angles mod 2π).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub start: f64,
    pub len: f64,
}

impl Arc {
    pub fn new(start: f64, len: f64) -> Self {
        Self { start: start.rem_euclid(TAU), len: len.clamp(0.0, TAU) }
    }

    pub fn point(theta: f64) -> Self {
        Self::new(theta, 0.0)
    }

    pub fn end(&self) -> f64 {
        self.start + self.len
    }

    pub fn midpoint(&self) -> f64 {
        (self.start + 0.5 * self.len).rem_euclid(TAU)
    }

    pub fn is_degenerate(&self) -> bool {
        self.len == 0.0
    }

    pub fn distance(&self, theta: f64) -> f64 {
        let x = (theta - self.start).rem_euclid(TAU);
        if x <= self.len {
            0.0
        } else {
            (x - self.len).min(TAU - x)
        }
    }
}

/// Disjoint closed arcs sorted by start angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArcSet {
    arcs: Vec<Arc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    generation_log: Option<Vec<f64>>,
}

impl ArcSet {
    /// Normalizes: overlapping or touching arcs are merged.
    pub fn new(arcs: Vec<Arc>) -> Self {
        Self { arcs: merge(arcs), generation_log: None }
    }

    pub fn empty() -> Self {
        Self { arcs: Vec::new(), generation_log: None }
    }

    pub fn full() -> Self {
        Self { arcs: vec![Arc { start: 0.0, len: TAU }], generation_log: None }
    }

    pub fn points(thetas: &[f64]) -> Self {
        Self::new(thetas.iter().map(|&t| Arc::point(t)).collect())
    }

    pub fn arc(start: f64, len: f64) -> Self {
        Self::new(vec![Arc::new(start, len)])
    }

    /// From `[start, end]` pairs with `end ≥ start`.
    pub fn from_pairs(pairs: &[[f64; 2]]) -> Result<Self> {
        let mut arcs = Vec::with_capacity(pairs.len());
        for p in pairs {
            if !(p[1] >= p[0]) || !p[0].is_finite() || !p[1].is_finite() {
                return Err(Error::InvalidSpec(format!("arc [{}, {}] must have end >= start", p[0], p[1])));
            }
            arcs.push(Arc::new(p[0], p[1] - p[0]));
        }
        Ok(Self::new(arcs))
    }

    /// `[start, end]` pairs; `end` may exceed 2π for arcs crossing angle 0.
    pub fn to_pairs(&self) -> Vec<[f64; 2]> {
        self.arcs.iter().map(|a| [a.start, a.end()]).collect()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    pub fn generation_log(&self) -> Option<&[f64]> {
        self.generation_log.as_deref()
    }

    pub fn is_empty(&self) -> bool {
        self.arcs.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.arcs.len() == 1 && self.arcs[0].len >= TAU
    }

    pub fn measure(&self) -> f64 {
        self.arcs.iter().map(|a| a.len).sum::<f64>().min(TAU)
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs.iter().any(|a| a.distance(theta) == 0.0)
    }

    /// Arclength distance from `e^{iθ}` to the set (`+∞` for the empty set).
    pub fn distance(&self, theta: f64) -> f64 {
        if self.arcs.len() > 16 {
            return self.distance_sorted(theta);
        }
        self.arcs.iter().map(|a| a.distance(theta)).fold(f64::INFINITY, f64::min)
    }

    fn distance_sorted(&self, theta: f64) -> f64 {
        let t = theta.rem_euclid(TAU);
        let i = self.arcs.partition_point(|a| a.start <= t);
        let n = self.arcs.len();
        let prev = (i + n - 1) % n;
        let mut d = self.arcs[prev].distance(t).min(self.arcs[i % n].distance(t));
        // the last arc may wrap past 2π and cover small angles
        d = d.min(self.arcs[n - 1].distance(t));
        d
    }

    /// Closed `t`-neighbourhood `E_t`.
    pub fn tube(&self, t: f64) -> ArcSet {
        let t = t.max(0.0);
        if self.is_empty() {
            return self.clone();
        }
        ArcSet::new(self.arcs.iter().map(|a| Arc::new(a.start - t, a.len + 2.0 * t)).collect())
    }

    pub fn tube_measure(&self, t: f64) -> f64 {
        self.tube(t).measure()
    }

    /// Open complementary arcs (the gaps), in order after each arc.
    pub fn gaps(&self) -> Vec<Arc> {
        let n = self.arcs.len();
        if n == 0 || self.is_full() {
            return Vec::new();
        }
        (0..n)
            .filter_map(|i| {
                let a = self.arcs[i];
                let b = self.arcs[(i + 1) % n];
                let mut g = (b.start - a.end()).rem_euclid(TAU);
                if n == 1 {
                    g = TAU - a.len;
                }
                (g > 0.0).then(|| Arc::new(a.end(), g))
            })
            .collect()
    }

    /// Replaces every arc by its midpoint.
    pub fn collapse_to_points(&self) -> ArcSet {
        ArcSet::new(self.arcs.iter().map(|a| Arc::point(a.midpoint())).collect())
    }

    pub fn union(&self, other: &ArcSet) -> ArcSet {
        let mut v = self.arcs.clone();
        v.extend_from_slice(&other.arcs);
        ArcSet::new(v)
    }

    pub fn rotate(&self, angle: f64) -> ArcSet {
        ArcSet::new(self.arcs.iter().map(|a| Arc::new(a.start + angle, a.len)).collect())
    }

    /// Whether `other ⊆ self` up to `tol` in arclength.
    pub fn covers(&self, other: &ArcSet, tol: f64) -> bool {
        other.arcs.iter().all(|a| {
            let steps = ((a.len / (tol.max(1e-12))).ceil() as usize).clamp(1, 4096);
            (0..=steps).all(|k| self.distance(a.start + a.len * k as f64 / steps as f64) <= tol)
        })
    }

    /// Superlevel set `{|x_k| ≥ level}` of grid samples; each selected node
    /// owns the cell of width `2π/M` centred on it.
    pub fn from_superlevel(values: &[f64], level: f64) -> ArcSet {
        let m = values.len();
        let h = TAU / m as f64;
        let mut arcs = Vec::new();
        let mut k = 0;
        while k < m {
            if values[k] >= level {
                let s = k;
                while k < m && values[k] >= level {
                    k += 1;
                }
                arcs.push(Arc::new(h * (s as f64 - 0.5), h * (k - s) as f64));
            } else {
                k += 1;
            }
        }
        ArcSet::new(arcs)
    }

    /// `∫_𝕋 F(d(ζ,E)) |dζ|` with the value on `E` itself replaced by
    /// `on_set · |E|`. Each gap of length `g` contributes `2∫_0^{g/2} F`,
    /// split into dyadic distance levels `[π2^{-k-1}, π2^{-k}]`.
    pub fn integrate_distance_profile<F: Fn(f64) -> f64>(&self, f: F, on_set: f64, levels: usize, q: usize) -> Result<PanelSeries> {
        if self.is_empty() {
            return Err(Error::Precondition("distance profile of the empty set is undefined".into()));
        }
        let mut inc = vec![0.0; levels];
        for g in self.gaps() {
            let half = 0.5 * g.len;
            for (k, slot) in inc.iter_mut().enumerate() {
                let hi = (PI * 0.5f64.powi(k as i32)).min(half);
                let lo = PI * 0.5f64.powi(k as i32 + 1);
                if hi <= lo {
                    continue;
                }
                *slot += 2.0 * gauss_on(lo, hi, q).iter().map(|(t, w)| w * f(*t)).sum::<f64>();
            }
        }
        if let Some(first) = inc.first_mut() {
            *first += on_set * self.measure();
        }
        Ok(panel_trend(inc))
    }
}

/// `t`-tube around finitely many points with `ln t` stored instead of `t`,
/// so radii far below `f64` resolution stay representable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointTube {
    pub centers: Vec<f64>,
    pub ln_radius: f64,
}

/// A level set as returned by exact (closed-form) computations.
#[derive(Debug, Clone, PartialEq)]
pub enum LevelSet {
    Arcs(ArcSet),
    Tube(PointTube),
}

impl LevelSet {
    pub fn is_empty(&self) -> bool {
        match self {
            LevelSet::Arcs(a) => a.is_empty(),
            LevelSet::Tube(t) => t.centers.is_empty(),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, LevelSet::Arcs(a) if a.is_full())
    }

    /// Lebesgue measure (may underflow to zero for thin tubes).
    pub fn measure(&self) -> f64 {
        match self {
            LevelSet::Arcs(a) => a.measure(),
            LevelSet::Tube(t) => (PointTube::to_arcs(t)).measure(),
        }
    }

    /// `ln` of the length of the shortest component (`-∞` for points).
    pub fn ln_min_component(&self) -> f64 {
        match self {
            LevelSet::Arcs(a) => a.arcs().iter().map(|a| a.len.ln()).fold(f64::INFINITY, f64::min),
            LevelSet::Tube(t) => std::f64::consts::LN_2 + t.ln_radius,
        }
    }
}

impl PointTube {
    /// The tube as arcs; radii below `f64` resolution collapse to points.
    pub fn to_arcs(&self) -> ArcSet {
        ArcSet::points(&self.centers).tube(self.ln_radius.exp())
    }
}

fn merge(mut arcs: Vec<Arc>) -> Vec<Arc> {
    if arcs.iter().any(|a| a.len >= TAU) {
        return vec![Arc { start: 0.0, len: TAU }];
    }
    arcs.sort_by(|a, b| a.start.total_cmp(&b.start).then(b.len.total_cmp(&a.len)));
    let mut out: Vec<Arc> = Vec::with_capacity(arcs.len());
    for a in arcs {
        if let Some(last) = out.last_mut() {
            if a.start <= last.end() {
                let end = last.end().max(a.end());
                last.len = end - last.start;
                continue;
            }
        }
        out.push(a);
    }
    // wrap-around: the last arc may reach past 2π into the first ones
    while out.len() > 1 {
        let last = *out.last().unwrap();
        let first = out[0];
        if last.end() >= first.start + TAU {
            let end = (last.end()).max(first.end() + TAU);
            out.remove(0);
            let l = out.last_mut().unwrap();
            l.len = end - l.start;
        } else {
            break;
        }
    }
    if out.iter().any(|a| a.len >= TAU) {
        return vec![Arc { start: 0.0, len: TAU }];
    }
    out
}

/// Generalized Cantor set: at level `k` every arc keeps its two end pieces,
/// each the fraction `ratios[k]` of the parent (the last ratio repeats).
pub fn cantor_generator(ratios: &[f64], levels: usize) -> Result<ArcSet> {
    if ratios.is_empty() {
        return Err(Error::InvalidSpec("cantor set needs at least one ratio".into()));
    }
    if let Some(r) = ratios.iter().find(|r| !(**r > 0.0 && **r < 0.5)) {
        return Err(Error::InvalidSpec(format!("retained fraction {r} must lie in (0, 1/2)")));
    }
    let mut arcs = vec![(0.0f64, TAU)];
    let mut log = Vec::with_capacity(levels);
    for k in 0..levels {
        let r = ratios[k.min(ratios.len() - 1)];
        log.push(r);
        arcs = arcs
            .into_iter()
            .flat_map(|(s, l)| {
                let piece = r * l;
                [(s, piece), (s + l - piece, piece)]
            })
            .collect();
    }
    let arcs = arcs.into_iter().map(|(s, l)| Arc { start: s, len: l }).collect();
    Ok(ArcSet { arcs: merge(arcs), generation_log: Some(log) })
}

/// Ratios for which the level-`k` arc length `ℓ_k` solves
/// `ℓ_k = 2π 2^{-k} (L_0 / log(e·2π/ℓ_k))^{exponent}`, so that the tube profile
/// behaves like `(log e/t)^{-exponent}`.
pub fn cantor_log_profile_ratios(levels: usize, exponent: f64) -> Vec<f64> {
    let l0 = (std::f64::consts::E).ln(); // log(e·2π/2π) = 1
    let mut lens = vec![TAU];
    for k in 1..=levels {
        let mut l: f64 = TAU * 0.5f64.powi(k as i32);
        for _ in 0..200 {
            let next = TAU * 0.5f64.powi(k as i32) * (l0 / (std::f64::consts::E * TAU / l).ln()).powf(exponent);
            if (next - l).abs() <= 1e-15 * l {
                l = next;
                break;
            }
            l = next;
        }
        lens.push(l);
    }
    lens.windows(2).map(|w| (w[1] / w[0]).min(0.499_999)).collect()
}

fn unit() -> f64 {
    1.0
}

/// Nonnegative weight `w` on `(0, π]` used to build outer symbols.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WeightFn {
    Constant { c: f64 },
    /// `c · t^a`.
    Power { c: f64, a: f64 },
    /// `c · (log(eπ/t))^{-b}`.
    LogInversePower {
        #[serde(default = "unit")]
        c: f64,
        b: f64,
    },
}

/// Numerically verified properties of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFlags {
    pub nonnegative: bool,
    pub nondecreasing: bool,
    pub dini: bool,
    /// `t ↦ w(t^γ)` concave near zero, for the γ supplied.
    pub concave_at_gamma: Option<bool>,
    pub gamma: Option<f64>,
}

impl WeightFn {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            WeightFn::Constant { c } => c >= 0.0 && c.is_finite(),
            WeightFn::Power { c, a } => c >= 0.0 && a > 0.0 && c.is_finite() && a.is_finite(),
            WeightFn::LogInversePower { c, b } => c >= 0.0 && c.is_finite() && b > 0.0 && b.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidSpec(format!("weight {self:?} has invalid parameters")))
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            WeightFn::Constant { c } => c,
            WeightFn::Power { c, a } => c * t.powf(a),
            WeightFn::LogInversePower { c, b } => {
                if t <= 0.0 {
                    0.0
                } else {
                    c * (1.0 + (PI / t).ln()).powf(-b)
                }
            }
        }
    }

    pub fn derivative(&self, t: f64) -> f64 {
        match *self {
            WeightFn::Constant { .. } => 0.0,
            WeightFn::Power { c, a } => c * a * t.powf(a - 1.0),
            WeightFn::LogInversePower { c, b } => c * b * (1.0 + (PI / t).ln()).powf(-b - 1.0) / t,
        }
    }

    /// `lim_{t→0+} w(t)`.
    pub fn value_at_zero(&self) -> f64 {
        match *self {
            WeightFn::Constant { c } => c,
            _ => 0.0,
        }
    }

    pub fn scaled(&self, n: f64) -> WeightFn {
        match *self {
            WeightFn::Constant { c } => WeightFn::Constant { c: c * n },
            WeightFn::Power { c, a } => WeightFn::Power { c: c * n, a },
            WeightFn::LogInversePower { c, b } => WeightFn::LogInversePower { c: c * n, b },
        }
    }

    /// `sup{t ∈ [0, π] : w(t) ≤ y}` for nondecreasing `w`.
    pub fn inverse(&self, y: f64) -> f64 {
        if y < self.value_at_zero() {
            return 0.0;
        }
        if y >= self.value(PI) {
            return PI;
        }
        // bisection in log t
        let (mut lo, mut hi) = ((1e-300f64).ln(), PI.ln());
        if self.value(lo.exp()) > y {
            return 0.0;
        }
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if self.value(m.exp()) <= y {
                lo = m;
            } else {
                hi = m;
            }
        }
        lo.exp()
    }

    /// `ln` of [`inverse`](Self::inverse), in closed form so that radii below
    /// `f64` resolution are representable. `None` when `w ≤ y` nowhere near 0.
    pub fn ln_inverse(&self, y: f64) -> Option<f64> {
        if y < self.value_at_zero() {
            return None;
        }
        let ln_t = match *self {
            WeightFn::Constant { .. } => PI.ln(),
            WeightFn::Power { c, a } => {
                if c == 0.0 {
                    PI.ln()
                } else {
                    (y / c).ln() / a
                }
            }
            WeightFn::LogInversePower { c, b } => {
                if c == 0.0 {
                    PI.ln()
                } else {
                    1.0 + PI.ln() - (y / c).powf(-1.0 / b)
                }
            }
        };
        Some(ln_t.min(PI.ln()))
    }

    /// Checks the flags on a log grid of `t ∈ [1e-300, π]`.
    pub fn check_flags(&self, gamma: Option<f64>) -> WeightFlags {
        let ts: Vec<f64> = (0..=600).map(|k| PI * 10f64.powf(-0.5 * k as f64)).rev().collect();
        let vals: Vec<f64> = ts.iter().map(|&t| self.value(t)).collect();
        let nonnegative = vals.iter().all(|v| *v >= 0.0);
        let nondecreasing = vals.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-12));
        let dini = self.dini_series().verdict == crate::quadrature::Verdict::Converging;
        let concave = gamma.map(|g| self.concave_power(g));
        WeightFlags { nonnegative, nondecreasing, dini, concave_at_gamma: concave, gamma }
    }

    /// Panel series of `∫_0^π (w(t) - w(0+))/t dt`.
    pub fn dini_series(&self) -> PanelSeries {
        let w0 = self.value_at_zero();
        panel_trend(dyadic_increments(|t| (self.value(t) - w0) / t, PI, 200, 8))
    }

    /// Concavity of `u ↦ w(u^γ)` on `u^γ ∈ [1e-40, 1e-3]` via second
    /// differences on a geometric grid.
    fn concave_power(&self, gamma: f64) -> bool {
        let u_lo = 1e-40f64.powf(1.0 / gamma);
        let u_hi = 1e-3f64.powf(1.0 / gamma);
        let n = 400;
        let us: Vec<f64> = (0..=n).map(|k| u_lo * (u_hi / u_lo).powf(k as f64 / n as f64)).collect();
        us.windows(3).all(|w| {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (fa, fb, fc) = (self.value(a.powf(gamma)), self.value(b.powf(gamma)), self.value(c.powf(gamma)));
            // f(b) ≥ linear interpolation of f(a), f(c)
            let lin = fa + (fc - fa) * (b - a) / (c - a);
            fb >= lin - 1e-12 * fb.abs().max(lin.abs())
        })
    }
}

/// `|{|x_k| > λ}|` on the grid.
pub fn distribution_function(values: &[f64], lambda: f64) -> f64 {
    TAU * values.iter().filter(|v| v.abs() > lambda).count() as f64 / values.len() as f64
}

/// `∫_level^∞ m(λ) dλ`, integrating the step function `m` exactly between
/// consecutive sorted sample values.
pub fn layer_cake_above(values: &[f64], level: f64) -> f64 {
    let mut v: Vec<f64> = values.iter().map(|x| x.abs()).filter(|x| *x > level).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let h = TAU / values.len() as f64;
    let mut acc = 0.0;
    for j in 0..v.len() {
        let lower = if j + 1 < v.len() { v[j + 1] } else { level };
        acc += (j + 1) as f64 * h * (v[j] - lower);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn distance_examples() {
        let one = ArcSet::points(&[0.0]);
        assert!((one.distance(PI / 2.0) - PI / 2.0).abs() < 1e-15);
        let upper = ArcSet::arc(0.0, PI);
        assert!((upper.distance(1.5 * PI) - PI / 2.0).abs() < 1e-15);
        let anti = ArcSet::points(&[0.0, PI]);
        for k in 0..100 {
            assert!(anti.distance(0.0628 * k as f64) <= PI / 2.0 + 1e-15);
        }
        assert_eq!(ArcSet::empty().distance(1.0), f64::INFINITY);
    }

    #[test]
    fn tube_examples() {
        let one = ArcSet::points(&[0.0]);
        for t in [1e-6, 0.1, 1.0, 3.0] {
            assert!((one.tube_measure(t) - 2.0 * t).abs() < 1e-14);
        }
        assert!(one.tube(3.2).is_full());
        assert!((ArcSet::full().tube_measure(0.5) - TAU).abs() < 1e-15);
        let c = cantor_generator(&[1.0 / 3.0], 6).unwrap();
        // brute force: union of dilated arcs measured on a fine grid
        let t = TAU / 3f64.powi(6) * 0.5;
        let tube = c.tube(t);
        let m = 1 << 20;
        let hits = (0..m).filter(|k| c.distance(TAU * (*k as f64 + 0.5) / m as f64) <= t).count();
        let brute = TAU * hits as f64 / m as f64;
        assert!((tube.measure() - brute).abs() < 1e-4);
    }

    #[test]
    fn wraparound_merge() {
        let s = ArcSet::new(vec![Arc::new(6.0, 0.5), Arc::new(0.1, 0.3)]);
        assert_eq!(s.arcs().len(), 1);
        assert!((s.measure() - (0.4 + TAU - 6.0)).abs() < 1e-12);
        assert!(s.contains(0.05) && s.contains(6.1) && !s.contains(1.0));
        let gaps = s.gaps();
        assert_eq!(gaps.len(), 1);
        assert!((gaps[0].len + s.measure() - TAU).abs() < 1e-12);
    }

    #[test]
    fn cantor_examples() {
        // [0, 2π/3] ∪ [4π/3, 2π] meet at angle 0 on the circle
        let c1 = cantor_generator(&[1.0 / 3.0], 1).unwrap();
        assert!((c1.measure() - 2.0 * TAU / 3.0).abs() < 1e-14);
        let gaps = c1.gaps();
        assert_eq!(gaps.len(), 1);
        assert!((gaps[0].start - TAU / 3.0).abs() < 1e-14 && (gaps[0].len - TAU / 3.0).abs() < 1e-14);
        for t in [0.0, TAU / 3.0, 2.0 * TAU / 3.0] {
            assert!(c1.distance(t) < 1e-14);
        }
        assert!(!c1.contains(PI));
        let c12 = cantor_generator(&[1.0 / 3.0], 12).unwrap();
        assert!((c12.measure() - TAU * (2.0f64 / 3.0).powi(12)).abs() < 1e-12);
        assert_eq!(c12.generation_log().unwrap().len(), 12);
        assert!(cantor_generator(&[0.6], 2).is_err());
    }

    #[test]
    fn cantor_log_profile_tube() {
        let levels = 22;
        let ratios = cantor_log_profile_ratios(levels, 3.0);
        let e = cantor_generator(&ratios, levels).unwrap();
        let smallest = e.arcs().iter().map(|a| a.len).fold(f64::INFINITY, f64::min);
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        let mut t = 1.0;
        while t > smallest {
            let q = e.tube_measure(t) / (1.0 + (PI / t).ln()).powi(-3);
            lo = lo.min(q);
            hi = hi.max(q);
            t *= 0.5;
        }
        // comparable to the target up to a constant: spread within [1/C, C]
        assert!(hi / lo < 20.0, "ratio spread {lo} {hi}");
    }

    #[test]
    fn superlevel_and_distribution() {
        let m = 4096;
        let cosabs: Vec<f64> = (0..m).map(|k| (TAU * k as f64 / m as f64).cos().abs()).collect();
        assert!((distribution_function(&cosabs, 1.0 / 2f64.sqrt()) - PI).abs() < 1e-2);
        assert!((distribution_function(&[2.0; 16], 1.0) - TAU).abs() < 1e-15);
        let smooth: Vec<f64> = (0..m).map(|k| 1.0 + 0.5 * (TAU * k as f64 / m as f64).sin().powi(2) * 3.0).collect();
        let direct = TAU * smooth.iter().map(|v| (v - 1.0).max(0.0)).sum::<f64>() / m as f64;
        assert!((layer_cake_above(&smooth, 1.0) - direct).abs() < 1e-8);
        let s = ArcSet::from_superlevel(&[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0], 0.5);
        assert_eq!(s.arcs().len(), 1);
        assert!((s.measure() - TAU / 4.0).abs() < 1e-14);
    }

    #[test]
    fn weights() {
        let w = WeightFn::LogInversePower { c: 1.0, b: 2.0 };
        let f = w.check_flags(Some(3.0));
        assert!(f.nondecreasing && f.dini && f.concave_at_gamma == Some(true));
        let y = w.value(1e-5);
        assert!((w.inverse(y) / 1e-5 - 1.0).abs() < 1e-9);
        let lin = WeightFn::Power { c: 1.0, a: 1.0 };
        let f = lin.check_flags(Some(3.0));
        assert!(f.nondecreasing && f.dini && f.concave_at_gamma == Some(false));
        let k = WeightFn::Constant { c: 0.3 };
        assert_eq!(k.inverse(0.1), 0.0);
        assert_eq!(k.inverse(0.5), PI);
        let h = 1e-7;
        for t in [1e-3, 0.1, 1.0, 3.0] {
            let fd = (w.value(t * (1.0 + h)) - w.value(t * (1.0 - h))) / (2.0 * h * t);
            assert!((fd - w.derivative(t)).abs() < 1e-6 * w.derivative(t).abs().max(1e-12));
        }
    }

    #[test]
    fn distance_profile_point() {
        // ∫ d(ζ,{1}) |dζ| = 2 ∫_0^π t dt = π²
        let v = ArcSet::points(&[0.0]).integrate_distance_profile(|t| t, 0.0, 80, 8).unwrap();
        assert!((v.last_partial() - PI * PI).abs() < 1e-12);
    }

    proptest! {
        #[test]
        fn tube_monotone(starts in prop::collection::vec(0.0..TAU, 1..6), lens in prop::collection::vec(0.0..0.5f64, 6), t1 in 0.0..1.0f64, dt in 0.0..1.0f64) {
            let arcs: Vec<Arc> = starts.iter().zip(&lens).map(|(s, l)| Arc::new(*s, *l)).collect();
            let e = ArcSet::new(arcs);
            let a = e.tube(t1);
            let b = e.tube(t1 + dt);
            prop_assert!(a.measure() <= b.measure() + 1e-12);
            prop_assert!(b.covers(&a, 1e-9));
        }

        #[test]
        fn distance_lipschitz(starts in prop::collection::vec(0.0..TAU, 1..6), x in 0.0..TAU, y in 0.0..TAU) {
            let e = ArcSet::new(starts.iter().map(|s| Arc::new(*s, 0.1)).collect());
            let d = (x - y).abs().min(TAU - (x - y).abs());
            prop_assert!((e.distance(x) - e.distance(y)).abs() <= d + 1e-12);
        }
    }
}

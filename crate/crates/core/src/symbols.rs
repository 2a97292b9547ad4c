//! Analytic self-maps of the disc: a declarative spec tree and its compiled,
//! evaluable form.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::boundary_sets::{ArcSet, LevelSet, PointTube, WeightFn};
use crate::error::{Error, Result};
use crate::series::{fft_in_place, node_angle, outer_from_log_modulus, BoundaryGrid, PowerSeries};

const ONE: Complex64 = Complex64 { re: 1.0, im: 0.0 };
const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Radius used for radial limits of series without a boundary extension.
pub const RADIAL_LIMIT_RADIUS: f64 = 1.0 - 1e-8;
/// Radius of the sampling circle used to extract Taylor coefficients.
pub const SERIES_SAMPLING_RADIUS: f64 = 1.0 - 1.0 / (1u64 << 20) as f64;

fn default_outer_grid() -> usize {
    1 << 14
}

/// Declarative description of a self-map `φ: 𝔻 → 𝔻`.
///
/// Complex parameters serialize as `[re, im]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SymbolSpec {
    Identity,
    /// `(a - z)/(1 - āz)`.
    Moebius { a: Complex64 },
    /// `e^{iγ} Π (a_k - z)/(1 - ā_k z)`.
    Blaschke {
        zeros: Vec<Complex64>,
        #[serde(default)]
        rotation: f64,
    },
    /// `r z`.
    Scale { r: f64 },
    /// `c0 + c1 z`.
    Affine { c0: Complex64, c1: Complex64 },
    /// `z^n`.
    Power { n: u32 },
    /// Outer function with boundary modulus `e^{-w(d(ζ,E))}`.
    Outer {
        set: ArcSet,
        weight: WeightFn,
        #[serde(default = "default_outer_grid")]
        grid: usize,
    },
    /// `exp(-e^{-f})` for an analytic `f` with `|Im f| < π/4`.
    Exp2 {
        f: PowerSeries,
        /// Optional exact boundary values of `f` on a power-of-two grid.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boundary: Option<Vec<Complex64>>,
    },
    /// `outer ∘ inner`.
    Composition { outer: Box<SymbolSpec>, inner: Box<SymbolSpec> },
    /// Taylor polynomial with either `Σ|c_n| ≤ 1` or boundary samples of
    /// modulus below one.
    RawSeries {
        coeffs: PowerSeries,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        boundary: Option<Vec<Complex64>>,
    },
}

impl SymbolSpec {
    pub fn compile(&self) -> Result<Symbol> {
        Ok(Symbol { spec: self.clone(), node: Node::build(self)? })
    }

    pub fn moebius(a: f64) -> Self {
        SymbolSpec::Moebius { a: Complex64::new(a, 0.0) }
    }

    pub fn blaschke(zeros: &[f64]) -> Self {
        SymbolSpec::Blaschke { zeros: zeros.iter().map(|&a| Complex64::new(a, 0.0)).collect(), rotation: 0.0 }
    }

    /// `e^{iγ} z`.
    pub fn rotation(gamma: f64) -> Self {
        SymbolSpec::Affine { c0: ZERO, c1: Complex64::from_polar(1.0, gamma) }
    }

    pub fn compose(outer: SymbolSpec, inner: SymbolSpec) -> Self {
        SymbolSpec::Composition { outer: Box::new(outer), inner: Box::new(inner) }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Identity,
    Moebius(Complex64),
    Blaschke { zeros: Vec<Complex64>, rot: Complex64 },
    Scale(f64),
    Affine(Complex64, Complex64),
    Power(u32),
    Series { s: PowerSeries, boundary: Option<BoundaryGrid>, extends: bool, bound: f64 },
    Outer { s: PowerSeries, set: ArcSet, weight: WeightFn },
    Exp2 { f: PowerSeries, boundary: Option<BoundaryGrid> },
    Comp(Box<Node>, Box<Node>),
}

fn check_unit(a: Complex64, what: &str) -> Result<()> {
    if !(a.norm() < 1.0) {
        return Err(Error::InvalidSpec(format!("{what} {a} must lie in the open disc")));
    }
    Ok(())
}

/// Values and derivatives of a polynomial on the ring `r e^{2πik/M}`,
/// folding coefficients modulo `M` (exact at the nodes).
pub(crate) fn series_ring(s: &PowerSeries, r: f64, m: usize) -> (Vec<Complex64>, Vec<Complex64>) {
    let mut v = vec![ZERO; m];
    let mut dv = vec![ZERO; m];
    let mut p = 1.0;
    for (n, c) in s.coeffs().iter().enumerate() {
        v[n % m] += c * p;
        if n >= 1 {
            // n c_n r^{n-1} multiplies e^{i(n-1)θ}; fold at index n-1
            dv[(n - 1) % m] += c * (n as f64 * p / if r > 0.0 { r } else { 1.0 });
        }
        p *= r;
        if p == 0.0 {
            break;
        }
    }
    if r == 0.0 {
        dv = vec![ZERO; m];
        dv[0] = s.coeff(1);
    }
    fft_in_place(&mut v, true);
    fft_in_place(&mut dv, true);
    (v, dv)
}

fn grid_from_samples(v: &[Complex64], what: &str) -> Result<BoundaryGrid> {
    BoundaryGrid::new(v.to_vec()).map_err(|e| Error::InvalidSpec(format!("{what}: {e}")))
}

/// Resamples grid values onto `m` nodes when one size divides the other.
fn resample(g: &BoundaryGrid, m: usize) -> Option<Vec<Complex64>> {
    let n = g.len();
    if n == m {
        Some(g.samples().to_vec())
    } else if n > m && n % m == 0 {
        Some(g.samples().iter().step_by(n / m).copied().collect())
    } else {
        None
    }
}

impl Node {
    fn build(spec: &SymbolSpec) -> Result<Node> {
        Ok(match spec {
            SymbolSpec::Identity => Node::Identity,
            SymbolSpec::Moebius { a } => {
                check_unit(*a, "Moebius parameter")?;
                Node::Moebius(*a)
            }
            SymbolSpec::Blaschke { zeros, rotation } => {
                for a in zeros {
                    check_unit(*a, "Blaschke zero")?;
                }
                if !rotation.is_finite() {
                    return Err(Error::InvalidSpec("rotation must be finite".into()));
                }
                Node::Blaschke { zeros: zeros.clone(), rot: Complex64::from_polar(1.0, *rotation) }
            }
            SymbolSpec::Scale { r } => {
                if !(0.0..=1.0).contains(r) {
                    return Err(Error::InvalidSpec(format!("scale factor {r} must lie in [0, 1]")));
                }
                Node::Scale(*r)
            }
            SymbolSpec::Affine { c0, c1 } => {
                if c0.norm() + c1.norm() > 1.0 + 1e-12 {
                    return Err(Error::InvalidSpec(format!("affine map needs |c0| + |c1| <= 1, got {}", c0.norm() + c1.norm())));
                }
                Node::Affine(*c0, *c1)
            }
            SymbolSpec::Power { n } => {
                if *n == 0 {
                    return Err(Error::InvalidSpec("power exponent must be at least 1".into()));
                }
                Node::Power(*n)
            }
            SymbolSpec::Outer { set, weight, grid } => {
                weight.validate()?;
                if set.is_empty() {
                    return Err(Error::InvalidSpec("outer symbol needs a nonempty set".into()));
                }
                let logmod = BoundaryGrid::from_real_fn(*grid, |t| -weight.value(set.distance(t)))?;
                let s = outer_from_log_modulus(&logmod, grid / 2 - 1)?;
                Node::Outer { s, set: set.clone(), weight: *weight }
            }
            SymbolSpec::Exp2 { f, boundary } => {
                let boundary = boundary.as_ref().map(|b| grid_from_samples(b, "Exp2 boundary")).transpose()?;
                let samples = match &boundary {
                    Some(b) => b.samples().to_vec(),
                    None => f.boundary_trace((2 * (f.order() + 1)).next_power_of_two().max(1024))?.samples().to_vec(),
                };
                let worst = samples.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
                if !(worst < PI / 4.0) {
                    return Err(Error::InvalidSpec(format!("Exp2 requires |Im f| < π/4 on the grid, found {worst}")));
                }
                Node::Exp2 { f: f.clone(), boundary }
            }
            SymbolSpec::Composition { outer, inner } => Node::Comp(Box::new(Node::build(outer)?), Box::new(Node::build(inner)?)),
            SymbolSpec::RawSeries { coeffs, boundary } => {
                let l1 = coeffs.sum_abs();
                let boundary = boundary.as_ref().map(|b| grid_from_samples(b, "RawSeries boundary")).transpose()?;
                if l1 <= 1.0 + 1e-12 {
                    Node::Series { s: coeffs.clone(), boundary, extends: true, bound: l1.min(1.0) }
                } else {
                    let b = boundary.as_ref().ok_or_else(|| {
                        Error::InvalidSpec(format!("series with Σ|c_n| = {l1} > 1 needs boundary samples certifying |φ| < 1"))
                    })?;
                    let max = b.moduli().into_iter().fold(0.0, f64::max);
                    if !(max <= 1.0 - 1e-9) {
                        return Err(Error::InvalidSpec(format!("boundary samples reach modulus {max}, above 1 - 1e-9")));
                    }
                    Node::Series { s: coeffs.clone(), boundary: Some(b.clone()), extends: false, bound: max }
                }
            }
        })
    }

    fn eval_both(&self, z: Complex64) -> (Complex64, Complex64) {
        match self {
            Node::Identity => (z, ONE),
            Node::Moebius(a) => {
                let den = ONE - a.conj() * z;
                ((a - z) / den, -(1.0 - a.norm_sqr()) / (den * den))
            }
            Node::Blaschke { zeros, rot } => {
                let mut p = *rot;
                let mut dp = ZERO;
                for a in zeros {
                    let den = ONE - a.conj() * z;
                    let b = (a - z) / den;
                    let db = -(1.0 - a.norm_sqr()) / (den * den);
                    dp = dp * b + p * db;
                    p *= b;
                }
                (p, dp)
            }
            Node::Scale(r) => (z * r, Complex64::new(*r, 0.0)),
            Node::Affine(c0, c1) => (c0 + c1 * z, *c1),
            Node::Power(n) => {
                let n = *n as i32;
                (z.powi(n), z.powi(n - 1) * n as f64)
            }
            Node::Series { s, .. } | Node::Outer { s, .. } => s.eval_with_deriv_unchecked(z),
            Node::Exp2 { f, .. } => {
                let (fv, fd) = f.eval_with_deriv_unchecked(z);
                let e = (-fv).exp();
                let phi = (-e).exp();
                (phi, phi * e * fd)
            }
            Node::Comp(o, i) => {
                let (w, dw) = i.eval_both(z);
                let (v, dv) = o.eval_both(w);
                (v, dv * dw)
            }
        }
    }

    fn ring(&self, r: f64, m: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        match self {
            Node::Series { s, .. } | Node::Outer { s, .. } => series_ring(s, r, m),
            Node::Exp2 { f, .. } => {
                let (fv, fd) = series_ring(f, r, m);
                fv.iter()
                    .zip(&fd)
                    .map(|(fv, fd)| {
                        let e = (-fv).exp();
                        let phi = (-e).exp();
                        (phi, phi * e * fd)
                    })
                    .unzip()
            }
            Node::Comp(o, i) => {
                let (w, dw) = i.ring(r, m);
                w.iter()
                    .zip(&dw)
                    .map(|(w, dw)| {
                        let (v, dv) = o.eval_both(*w);
                        (v, dv * dw)
                    })
                    .unzip()
            }
            _ => (0..m).map(|k| self.eval_both(Complex64::from_polar(r, node_angle(k, m)))).unzip(),
        }
    }

    fn extends(&self) -> bool {
        match self {
            Node::Exp2 { boundary, .. } => boundary.is_some(),
            Node::Series { extends, boundary, .. } => *extends || boundary.is_some(),
            Node::Comp(o, i) => o.extends() && i.extends(),
            _ => true,
        }
    }

    fn point_extends(&self) -> bool {
        match self {
            Node::Exp2 { .. } => false,
            Node::Series { extends, .. } => *extends,
            Node::Comp(o, i) => o.point_extends() && i.point_extends(),
            _ => true,
        }
    }

    fn bound(&self) -> f64 {
        match self {
            Node::Scale(r) => *r,
            Node::Affine(c0, c1) => (c0.norm() + c1.norm()).min(1.0),
            Node::Series { bound, .. } => *bound,
            Node::Outer { set, weight, .. } => {
                let _ = set;
                (-weight.value_at_zero()).exp()
            }
            Node::Comp(o, _) => o.bound(),
            _ => 1.0,
        }
    }

    fn boundary_values(&self, m: usize) -> Result<Vec<Complex64>> {
        Ok(match self {
            Node::Series { s, boundary, extends, .. } => match boundary.as_ref().and_then(|b| resample(b, m)) {
                Some(v) => v,
                None if *extends => series_ring(s, 1.0, m).0,
                None => series_ring(s, RADIAL_LIMIT_RADIUS, m).0,
            },
            Node::Outer { s, set, weight, .. } => {
                // exact modulus, phase from the series
                let v = series_ring(s, 1.0, m).0;
                v.iter()
                    .enumerate()
                    .map(|(k, z)| {
                        let modulus = (-weight.value(set.distance(node_angle(k, m)))).exp();
                        if z.norm() > 0.0 {
                            z / z.norm() * modulus
                        } else {
                            Complex64::new(modulus, 0.0)
                        }
                    })
                    .collect()
            }
            Node::Exp2 { f, boundary, .. } => {
                let fv = match boundary.as_ref().and_then(|b| resample(b, m)) {
                    Some(v) => v,
                    None => series_ring(f, RADIAL_LIMIT_RADIUS, m).0,
                };
                fv.iter().map(|f| (-(-f).exp()).exp()).collect()
            }
            Node::Comp(o, i) => i.boundary_values(m)?.into_iter().map(|w| o.eval_both(w).0).collect(),
            _ => (0..m).map(|k| self.eval_both(Complex64::from_polar(1.0, node_angle(k, m))).0).collect(),
        })
    }

    fn boundary_modulus(&self, m: usize) -> Result<Vec<f64>> {
        Ok(match self {
            Node::Identity | Node::Moebius(_) | Node::Blaschke { .. } | Node::Power(_) => vec![1.0; m],
            Node::Scale(r) => vec![*r; m],
            Node::Outer { set, weight, .. } => (0..m).map(|k| (-weight.value(set.distance(node_angle(k, m)))).exp()).collect(),
            Node::Comp(o, i) => match o.as_ref() {
                Node::Power(n) => i.boundary_modulus(m)?.into_iter().map(|v| v.powi(*n as i32)).collect(),
                Node::Scale(r) => i.boundary_modulus(m)?.into_iter().map(|v| v * r).collect(),
                Node::Blaschke { .. } | Node::Moebius(_) | Node::Identity if i.boundary_modulus(m)?.iter().all(|v| *v == 1.0) => {
                    vec![1.0; m]
                }
                _ => self.boundary_values(m)?.iter().map(|v| v.norm()).collect(),
            },
            _ => self.boundary_values(m)?.iter().map(|v| v.norm()).collect(),
        })
    }

    /// Whether `|φ| = 1` a.e. on the circle.
    fn is_inner(&self) -> bool {
        match self {
            Node::Identity | Node::Moebius(_) | Node::Blaschke { .. } | Node::Power(_) => true,
            Node::Affine(c0, c1) => c0.norm() == 0.0 && (c1.norm() - 1.0).abs() < 1e-15,
            Node::Comp(o, i) => o.is_inner() && i.is_inner(),
            _ => false,
        }
    }

    fn exact_level_set(&self, s: f64) -> Option<LevelSet> {
        let full = || Some(LevelSet::Arcs(ArcSet::full()));
        let empty = || Some(LevelSet::Arcs(ArcSet::empty()));
        if s <= 0.0 {
            return full();
        }
        if self.is_inner() {
            return if s <= 1.0 { full() } else { empty() };
        }
        match self {
            Node::Scale(r) => {
                if s <= *r {
                    full()
                } else {
                    empty()
                }
            }
            Node::Outer { set, weight, .. } => {
                if s > 1.0 {
                    return empty();
                }
                let Some(ln_t) = weight.ln_inverse(-s.ln()) else { return empty() };
                if ln_t >= PI.ln() {
                    return full();
                }
                // thin tubes around points keep their radius in log form
                let points_only = set.arcs().iter().all(|a| a.is_degenerate());
                let min_gap = set.gaps().iter().map(|g| g.len).fold(f64::INFINITY, f64::min);
                if points_only && !set.is_empty() && ln_t < (0.5 * min_gap).ln() {
                    let centers = set.arcs().iter().map(|a| a.start).collect();
                    Some(LevelSet::Tube(PointTube { centers, ln_radius: ln_t }))
                } else {
                    Some(LevelSet::Arcs(set.tube(ln_t.exp())))
                }
            }
            Node::Comp(o, i) => match o.as_ref() {
                Node::Power(n) => i.exact_level_set(s.powf(1.0 / *n as f64)),
                Node::Scale(r) if *r > 0.0 => i.exact_level_set(s / r),
                _ => None,
            },
            _ => None,
        }
    }
}

/// A validated, evaluable self-map.
#[derive(Debug, Clone)]
pub struct Symbol {
    spec: SymbolSpec,
    node: Node,
}

/// Taylor coefficients with the self-reported reconstruction residual.
#[derive(Debug, Clone)]
pub struct SeriesApprox {
    pub series: PowerSeries,
    /// Max deviation between series and structural evaluation at `|z| ≤ 0.9`.
    pub residual: f64,
    pub warning: Option<String>,
}

impl Symbol {
    pub fn spec(&self) -> &SymbolSpec {
        &self.spec
    }

    fn check_point(&self, z: Complex64) -> Result<()> {
        let r = z.norm();
        if r > 1.0 + 1e-12 || (r >= 1.0 && !self.node.point_extends()) {
            return Err(Error::Domain(format!("cannot evaluate at |z| = {r}")));
        }
        Ok(())
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        Ok(self.node.eval_both(z).0)
    }

    pub fn eval_deriv(&self, z: Complex64) -> Result<Complex64> {
        self.check_point(z)?;
        Ok(self.node.eval_both(z).1)
    }

    /// `(φ(z), φ'(z))` without the domain check, for quadrature inner loops.
    pub fn eval_both(&self, z: Complex64) -> (Complex64, Complex64) {
        self.node.eval_both(z)
    }

    /// `(φ, φ')` at `r e^{2πik/M}`, `k = 0..M`.
    pub fn ring(&self, r: f64, m: usize) -> (Vec<Complex64>, Vec<Complex64>) {
        self.node.ring(r, m)
    }

    /// Certified bound on `sup |φ|`.
    pub fn sup_bound(&self) -> f64 {
        self.node.bound()
    }

    pub fn fixes_origin(&self) -> bool {
        self.node.eval_both(ZERO).0.norm() < 1e-14
    }

    pub fn is_inner(&self) -> bool {
        self.node.is_inner()
    }

    /// Whether the boundary values used by [`boundary_values`](Self::boundary_values)
    /// are exact (closed form or supplied samples) rather than radial-limit
    /// approximations.
    pub fn has_boundary_extension(&self) -> bool {
        self.node.extends()
    }

    /// Taylor coefficients up to `order`, sampled on the circle of radius
    /// `1 - 2^{-20}`.
    pub fn to_series(&self, order: usize) -> Result<SeriesApprox> {
        let series = match (&self.node, &self.spec) {
            (Node::Series { s, .. }, _) | (Node::Outer { s, .. }, _) => s.with_order(order),
            (Node::Scale(r), _) => PowerSeries::monomial(1, order).scale(Complex64::new(*r, 0.0)),
            (Node::Identity, _) => PowerSeries::monomial(1, order),
            (Node::Affine(c0, c1), _) => {
                let mut v = vec![ZERO; order.max(1) + 1];
                v[0] = *c0;
                v[1] = *c1;
                PowerSeries::new(v)?
            }
            (Node::Power(n), _) => PowerSeries::monomial(*n as usize, order).with_order(order),
            (Node::Moebius(a), _) => {
                // a - (1-|a|²) Σ_{n≥1} ā^{n-1} z^n
                let mut v = vec![ZERO; order.max(1) + 1];
                v[0] = *a;
                let k = 1.0 - a.norm_sqr();
                let mut p = ONE;
                for c in v.iter_mut().skip(1) {
                    *c = -p * k;
                    p *= a.conj();
                }
                PowerSeries::new(v)?
            }
            _ => {
                let m = (4 * (order + 1)).next_power_of_two();
                let rho = SERIES_SAMPLING_RADIUS;
                let (v, _) = self.node.ring(rho, m);
                let c = BoundaryGrid::new(v)?.fourier_coefficients();
                let mut scale = 1.0;
                let out: Vec<Complex64> = c[..=order]
                    .iter()
                    .map(|c| {
                        let v = c / scale;
                        scale *= rho;
                        v
                    })
                    .collect();
                PowerSeries::new(out)?
            }
        };
        let mut residual: f64 = 0.0;
        for k in 0..16 {
            let z = Complex64::from_polar(0.9 * (k % 4 + 1) as f64 / 4.0, 0.7 + k as f64 * 0.39);
            residual = residual.max((series.eval_with_deriv_unchecked(z).0 - self.node.eval_both(z).0).norm());
        }
        let warning = (residual > 1e-6).then(|| format!("series reconstruction residual {residual:.3e} exceeds 1e-6"));
        Ok(SeriesApprox { series, residual, warning })
    }

    /// Boundary values on the `M`-grid; series without a boundary extension
    /// are evaluated at radius `1 - 1e-8`.
    pub fn boundary_values(&self, m: usize) -> Result<BoundaryGrid> {
        BoundaryGrid::new(self.node.boundary_values(m)?)
    }

    /// `|φ|` on the `M`-grid.
    pub fn boundary_modulus(&self, m: usize) -> Result<Vec<f64>> {
        if !m.is_power_of_two() || m < 8 {
            return Err(Error::InvalidGrid(format!("grid size {m} must be a power of two >= 8")));
        }
        self.node.boundary_modulus(m)
    }

    /// `E_φ(s)` in closed form where the boundary modulus is known exactly.
    pub fn exact_level_set(&self, s: f64) -> Option<LevelSet> {
        self.node.exact_level_set(s)
    }

    /// Grid approximation of `E_φ(s)`: nodes with `|φ| ≥ s`, each owning a
    /// cell of width `2π/M`.
    pub fn level_set(&self, s: f64, m: usize) -> Result<ArcSet> {
        Ok(ArcSet::from_superlevel(&self.boundary_modulus(m)?, s))
    }

    pub fn level_measure(&self, s: f64, m: usize) -> Result<f64> {
        let b = self.boundary_modulus(m)?;
        Ok(2.0 * PI * b.iter().filter(|v| **v >= s).count() as f64 / m as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn suite() -> Vec<SymbolSpec> {
        vec![
            SymbolSpec::Identity,
            SymbolSpec::moebius(0.5),
            SymbolSpec::Blaschke { zeros: vec![Complex64::new(0.3, 0.4), c(-0.5)], rotation: 0.7 },
            SymbolSpec::Scale { r: 0.5 },
            SymbolSpec::Affine { c0: c(0.5), c1: c(0.5) },
            SymbolSpec::Power { n: 3 },
            SymbolSpec::compose(SymbolSpec::Power { n: 2 }, SymbolSpec::Scale { r: 0.5 }),
            SymbolSpec::Outer { set: ArcSet::points(&[0.0]), weight: WeightFn::Power { c: 1.0, a: 1.0 }, grid: 1 << 12 },
            SymbolSpec::RawSeries { coeffs: PowerSeries::from_real(&[0.1, 0.3, 0.2]).unwrap(), boundary: None },
            SymbolSpec::Exp2 { f: PowerSeries::from_real(&[0.5, 0.2]).unwrap(), boundary: None },
        ]
    }

    #[test]
    fn eval_examples() {
        let s = SymbolSpec::Scale { r: 0.5 }.compile().unwrap();
        assert!((s.eval(c(0.8)).unwrap() - c(0.4)).norm() < 1e-15);
        assert!((s.eval_deriv(c(0.8)).unwrap() - c(0.5)).norm() < 1e-15);
        let m = SymbolSpec::moebius(0.5).compile().unwrap();
        assert!(m.eval(c(0.5)).unwrap().norm() < 1e-15);
        assert!((m.eval_deriv(c(0.5)).unwrap() - c(-4.0 / 3.0)).norm() < 1e-14);
        let p = SymbolSpec::compose(SymbolSpec::Power { n: 2 }, SymbolSpec::Scale { r: 0.5 }).compile().unwrap();
        assert!((p.eval(c(1.0)).unwrap() - c(0.25)).norm() < 1e-15);
        assert!(m.eval(c(1.2)).is_err());
        let e = SymbolSpec::Exp2 { f: PowerSeries::from_real(&[0.5, 0.2]).unwrap(), boundary: None }.compile().unwrap();
        assert!(matches!(e.eval(c(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn derivative_matches_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for spec in suite() {
            let s = spec.compile().unwrap();
            for _ in 0..100 {
                let z = Complex64::from_polar(rng.gen_range(0.0..0.95), rng.gen_range(0.0..2.0 * PI));
                let h = 1e-6;
                let fd = (s.eval(z + h).unwrap() - s.eval(z - h).unwrap()) / (2.0 * h);
                let d = s.eval_deriv(z).unwrap();
                assert!((fd - d).norm() < 1e-6 * d.norm().max(1.0), "{spec:?} {z}");
            }
        }
    }

    #[test]
    fn schwarz_and_sup_certificates() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for spec in suite() {
            let s = spec.compile().unwrap();
            let m = 1 << 12;
            let b = s.boundary_modulus(m).unwrap();
            let max = b.iter().cloned().fold(0.0, f64::max);
            assert!(max <= s.sup_bound() + 1e-9, "{spec:?}: {max} > {}", s.sup_bound());
            if s.fixes_origin() {
                for _ in 0..200 {
                    let z = Complex64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0 * PI));
                    assert!(s.eval(z).unwrap().norm() <= z.norm() + 1e-9);
                }
            }
        }
    }

    #[test]
    fn series_examples() {
        let s = SymbolSpec::Scale { r: 0.5 }.compile().unwrap().to_series(8).unwrap().series;
        assert_eq!(s.coeff(1), c(0.5));
        assert_eq!(s.coeff(0), c(0.0));
        let m = SymbolSpec::moebius(0.5).compile().unwrap().to_series(40).unwrap().series;
        assert!((m.coeff(0) - c(0.5)).norm() < 1e-15);
        assert!((m.coeff(1) - c(-0.75)).norm() < 1e-15);
        assert!((m.coeff(2) - c(-0.375)).norm() < 1e-15);
        let a = SymbolSpec::Affine { c0: c(0.5), c1: c(0.5) }.compile().unwrap().to_series(1).unwrap().series;
        assert_eq!(a.coeffs(), &[c(0.5), c(0.5)]);
        for spec in suite() {
            let approx = spec.compile().unwrap().to_series(256).unwrap();
            assert!(approx.residual < 1e-6, "{spec:?} residual {}", approx.residual);
        }
        // sampled route against the closed form
        let b = SymbolSpec::compose(SymbolSpec::Identity, SymbolSpec::moebius(0.5)).compile().unwrap().to_series(64).unwrap();
        for k in 0..=64 {
            assert!((b.series.coeff(k) - m.coeff(k)).norm() < 1e-9);
        }
    }

    #[test]
    fn boundary_modulus_examples() {
        let r = SymbolSpec::Scale { r: 0.3 }.compile().unwrap().boundary_modulus(64).unwrap();
        assert!(r.iter().all(|v| (*v - 0.3).abs() < 1e-15));
        let b = SymbolSpec::moebius(0.4).compile().unwrap();
        let values = b.boundary_values(64).unwrap();
        assert!(values.moduli().iter().all(|v| (*v - 1.0).abs() < 1e-14));
        let a = SymbolSpec::Affine { c0: c(0.5), c1: c(0.5) }.compile().unwrap();
        let v = a.boundary_values(64).unwrap().moduli();
        for (k, x) in v.iter().enumerate() {
            assert!((x - (node_angle(k, 64) / 2.0).cos().abs()).abs() < 1e-14);
        }
    }

    #[test]
    fn ring_matches_pointwise() {
        for spec in suite() {
            let s = spec.compile().unwrap();
            let (v, d) = s.ring(0.8, 64);
            for k in [0, 5, 33] {
                let (pv, pd) = s.eval_both(Complex64::from_polar(0.8, node_angle(k, 64)));
                assert!((v[k] - pv).norm() < 1e-11 && (d[k] - pd).norm() < 1e-10, "{spec:?}");
            }
        }
    }

    #[test]
    fn level_sets() {
        let a = SymbolSpec::Affine { c0: c(0.5), c1: c(0.5) }.compile().unwrap();
        let m = 1 << 16;
        for s in [0.2, 0.5, 0.9] {
            let meas = a.level_measure(s, m).unwrap();
            assert!((meas - 4.0 * f64::acos(s)).abs() < 4.0 * PI / m as f64);
        }
        let sc = SymbolSpec::Scale { r: 0.5 }.compile().unwrap();
        assert!(sc.exact_level_set(0.4).unwrap().is_full());
        assert!(sc.exact_level_set(0.6).unwrap().is_empty());
        assert!(sc.level_set(0.6, 64).unwrap().is_empty());
        let bl = SymbolSpec::blaschke(&[0.5, -0.2]).compile().unwrap();
        assert!(bl.exact_level_set(0.999).unwrap().is_full());
        assert!((bl.level_measure(0.999, 256).unwrap() - 2.0 * PI).abs() < 1e-12);
        // E_φ(1) is unchanged under powers
        let outer = SymbolSpec::Outer { set: ArcSet::points(&[1.0]), weight: WeightFn::Power { c: 1.0, a: 1.0 }, grid: 1 << 12 };
        let p3 = SymbolSpec::compose(SymbolSpec::Power { n: 3 }, outer.clone()).compile().unwrap();
        let o = outer.compile().unwrap();
        assert_eq!(o.level_set(1.0, 1 << 12).unwrap(), p3.level_set(1.0, 1 << 12).unwrap());
        // antitone in s
        let e1 = o.level_set(0.5, 1 << 12).unwrap();
        let e2 = o.level_set(0.8, 1 << 12).unwrap();
        assert!(e1.covers(&e2, 1e-12));
    }

    #[test]
    fn validation() {
        assert!(SymbolSpec::moebius(1.0).compile().is_err());
        assert!(SymbolSpec::Scale { r: 1.5 }.compile().is_err());
        assert!(SymbolSpec::Affine { c0: c(0.6), c1: c(0.6) }.compile().is_err());
        assert!(SymbolSpec::RawSeries { coeffs: PowerSeries::from_real(&[0.8, 0.8]).unwrap(), boundary: None }.compile().is_err());
        let f = PowerSeries::new(vec![ZERO, Complex64::new(0.0, 1.0)]).unwrap();
        assert!(SymbolSpec::Exp2 { f, boundary: None }.compile().is_err());
    }

    #[test]
    fn json_roundtrip() {
        for spec in suite() {
            let j = serde_json::to_string(&spec).unwrap();
            let back: SymbolSpec = serde_json::from_str(&j).unwrap();
            assert_eq!(spec, back);
        }
        let parsed: SymbolSpec = serde_json::from_str(r#"{"type":"moebius","a":[0.5,0.0]}"#).unwrap();
        assert_eq!(parsed, SymbolSpec::moebius(0.5));
    }
}

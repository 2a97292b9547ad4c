//! α-energies of measures on the circle, logarithmic and α-capacities of
//! closed sets, and the weak-type capacity inequality.
//!
//! Energies use `I_α(μ) = Σ_{n≥1} |μ̂(n)|²/n^{1-α}`. At `α = 0` this equals the
//! double integral of `-log|2 sin((θ-ψ)/2)|`, so an arc of length `ℓ` has
//! minimal energy `-log sin(ℓ/4)`.
//!
//! Capacities are computed from measures that are uniform on the cells of a
//! partition of the set. Such measures are admissible competitors, so the
//! minimized energy is an upper bound for the infimum and the reported
//! capacity a lower bound.

use std::f64::consts::{LN_2, PI, TAU};
use std::sync::OnceLock;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_sets::{ArcSet, LevelSet, PointTube};
use crate::error::{Error, Result};
use crate::quadrature::{gauss_legendre, panel_trend, PanelSeries, Verdict};
use crate::series::PowerSeries;
use crate::symbols::Symbol;

/// Probability measure with finitely many atoms on the circle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(Error::InvalidSpec(format!(
                "measure needs matching nonempty atoms/weights, got {} and {}",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.iter().any(|a| !a.is_finite()) {
            return Err(Error::InvalidSpec("atoms must be finite angles".into()));
        }
        if weights.iter().any(|p| !(*p >= 0.0)) {
            return Err(Error::InvalidSpec("weights must be nonnegative".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidSpec(format!("weights sum to {total}, not 1")));
        }
        Ok(DiscreteMeasure { atoms: atoms.iter().map(|a| a.rem_euclid(TAU)).collect(), weights })
    }

    pub fn uniform(atoms: Vec<f64>) -> Result<Self> {
        let p = 1.0 / atoms.len().max(1) as f64;
        let w = vec![p; atoms.len()];
        Self::new(atoms, w)
    }

    /// `m` equispaced atoms with equal weights.
    pub fn equispaced(m: usize) -> Result<Self> {
        Self::uniform((0..m).map(|k| TAU * k as f64 / m as f64).collect())
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    /// `μ̂(n) = Σ p_i e^{-inθ_i}`.
    pub fn fourier(&self, n: i64) -> Complex64 {
        self.atoms.iter().zip(&self.weights).map(|(t, p)| Complex64::from_polar(*p, -(n as f64) * t)).sum()
    }

    pub fn rotate(&self, angle: f64) -> Self {
        DiscreteMeasure { atoms: self.atoms.iter().map(|a| (a + angle).rem_euclid(TAU)).collect(), weights: self.weights.clone() }
    }

    /// Whether every atom lies within `tol` of `set`.
    pub fn supported_in(&self, set: &ArcSet, tol: f64) -> bool {
        self.atoms.iter().all(|a| set.distance(*a) <= tol)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum Energy {
    Finite(f64),
    Divergent,
}

impl Energy {
    /// The energy as a float, `+∞` when divergent.
    pub fn value(&self) -> f64 {
        match self {
            Energy::Finite(e) => *e,
            Energy::Divergent => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Energy::Finite(_))
    }
}

/// `cap = 1/inf I`: zero when every competitor has infinite energy, `+∞` when
/// the infimum is zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "kebab-case")]
pub enum CapValue {
    Finite(f64),
    Infinite,
}

impl CapValue {
    pub fn value(&self) -> f64 {
        match self {
            CapValue::Finite(c) => *c,
            CapValue::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, CapValue::Infinite)
    }

    fn from_energy(e: Energy) -> Self {
        match e {
            Energy::Divergent => CapValue::Finite(0.0),
            Energy::Finite(e) if e <= 0.0 => CapValue::Infinite,
            Energy::Finite(e) => CapValue::Finite(1.0 / e),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyReport {
    pub energy: Energy,
    pub route: String,
    /// Bound on the neglected Fourier tail (zero for the kernel route).
    pub tail_bound: f64,
}

// ---------------------------------------------------------------------------
// pair kernel

struct Rule {
    x: Vec<f64>,
    w: Vec<f64>,
}

/// Gauss–Legendre on `[0, 1]` with weights summing to one.
fn unit_rule(n: usize) -> &'static Rule {
    static R4: OnceLock<Rule> = OnceLock::new();
    static R8: OnceLock<Rule> = OnceLock::new();
    static R16: OnceLock<Rule> = OnceLock::new();
    let cell = match n {
        4 => &R4,
        8 => &R8,
        _ => &R16,
    };
    cell.get_or_init(|| {
        let (x, w) = gauss_legendre(n);
        Rule { x: x.iter().map(|x| 0.5 * (1.0 + x)).collect(), w: w.iter().map(|w| 0.5 * w).collect() }
    })
}

/// Nodes of `rule` on `[lo, hi]`, a single node when the interval is a point.
fn nodes(lo: f64, hi: f64, n: usize) -> Vec<(f64, f64)> {
    if hi <= lo {
        return vec![(lo, 1.0)];
    }
    let r = unit_rule(n);
    r.x.iter().zip(&r.w).map(|(x, w)| (lo + (hi - lo) * x, *w)).collect()
}

// F'' = G' = ln|u|
fn big_f(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * u * (0.5 * u.abs().ln() - 0.75)
    }
}

fn big_g(u: f64) -> f64 {
    if u == 0.0 {
        0.0
    } else {
        u * (u.abs().ln() - 1.0)
    }
}

/// Mean of `ln|y - x|` over `y ∈ [y0, y1]` for a fixed `x`.
fn mean_log_single(x: f64, y0: f64, y1: f64) -> f64 {
    (big_g(y1 - x) - big_g(y0 - x)) / (y1 - y0)
}

/// Mean of `ln|y - x|` over `[x0, x1] × [y0, y1]` in closed form.
fn mean_log(x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let (a, b) = (x1 - x0, y1 - y0);
    if a <= 0.0 && b <= 0.0 {
        return (y0 - x0).abs().ln();
    }
    if a < 1e-3 * b {
        return nodes(x0, x1, 16).iter().map(|(x, w)| w * mean_log_single(*x, y0, y1)).sum();
    }
    if b < 1e-3 * a {
        return nodes(y0, y1, 16).iter().map(|(y, w)| w * mean_log_single(*y, x0, x1)).sum();
    }
    (big_f(y1 - x0) - big_f(y0 - x0) - big_f(y1 - x1) + big_f(y0 - x1)) / (a * b)
}

fn neg_ln_sinc(u: f64) -> f64 {
    if u.abs() < 1e-4 {
        u * u / 6.0
    } else {
        -(u.sin() / u).ln()
    }
}

/// Mean of `-log|2 sin(d/2)|`, `d = s(y - x)`, over `x ∈ [x0, x1]`,
/// `y ∈ [y0, y1]`, where `s = e^{ln_s}` and the widths are at most one.
///
/// Splitting `2 sin(d/2) = d · sinc(d/2)` keeps the singular part in closed
/// form and the scale out of the arithmetic, so cells far below `f64`
/// resolution are handled. Requires `|d| < 2π` throughout.
fn pair_kernel(ln_s: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> f64 {
    let s = ln_s.exp();
    let (a, b) = (x1 - x0, y1 - y0);
    let w = a.max(b);
    let dc = 0.5 * (y0 + y1) - 0.5 * (x0 + x1);
    let gap = dc.abs() - 0.5 * (a + b);
    let log_mean = if w <= 0.0 {
        if dc == 0.0 {
            return f64::INFINITY;
        }
        dc.abs().ln()
    } else if gap < 2.0 * w {
        mean_log(x0, x1, y0, y1)
    } else if w < 1e-6 * dc.abs() {
        dc.abs().ln()
    } else {
        let q = if gap < 8.0 * w { 8 } else { 4 };
        let (xs, ys) = (nodes(x0, x1, q), nodes(y0, y1, q));
        xs.iter().map(|(x, wx)| wx * ys.iter().map(|(y, wy)| wy * (y - x).abs().ln()).sum::<f64>()).sum()
    };
    let reach = s * (dc.abs() + 0.5 * (a + b));
    let sinc_mean = if reach < 1e-3 {
        s * s * (dc * dc + (a * a + b * b) / 12.0) / 24.0
    } else {
        let q = if s * w > 0.1 { 8 } else { 4 };
        let (xs, ys) = (nodes(x0, x1, q), nodes(y0, y1, q));
        xs.iter().map(|(x, wx)| wx * ys.iter().map(|(y, wy)| wy * neg_ln_sinc(0.5 * s * (y - x))).sum::<f64>()).sum()
    };
    -ln_s - log_mean + sinc_mean
}

fn wrap_pi(x: f64) -> f64 {
    x - TAU * (x / TAU).round()
}

/// Pair energy of two uniform cells with centre offset `dc ∈ [-π, π]` and
/// widths `e^{ln_wa}`, `e^{ln_wb}`.
fn abs_pair(dc: f64, ln_wa: f64, ln_wb: f64) -> f64 {
    let ln_w = ln_wa.max(ln_wb);
    if ln_w < -700.0 && dc != 0.0 {
        return pair_kernel(0.0, 0.0, 0.0, dc, dc);
    }
    let (a, b) = ((ln_wa - ln_w).exp(), (ln_wb - ln_w).exp());
    let y = if dc == 0.0 { 0.0 } else { dc / ln_w.exp() };
    pair_kernel(ln_w, -0.5 * a, 0.5 * a, y - 0.5 * b, y + 0.5 * b)
}

// ---------------------------------------------------------------------------
// cell layout

#[derive(Debug, Clone, Copy)]
struct Comp {
    start: f64,
    ln_len: f64,
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    comp: usize,
    a: f64,
    b: f64,
}

impl Cell {
    fn mid(&self) -> f64 {
        0.5 * (self.a + self.b)
    }
}

enum Prepared {
    Empty,
    Points,
    Comps { comps: Vec<Comp>, full: bool },
}

fn prepare(set: &LevelSet) -> Prepared {
    match set {
        LevelSet::Arcs(a) => prepare_arcs(a),
        LevelSet::Tube(t) => prepare_tube(t),
    }
}

fn prepare_arcs(set: &ArcSet) -> Prepared {
    if set.is_empty() {
        return Prepared::Empty;
    }
    if set.is_full() {
        return Prepared::Comps { comps: vec![Comp { start: 0.0, ln_len: TAU.ln() }], full: true };
    }
    // points carry no capacity next to an arc
    let comps: Vec<Comp> =
        set.arcs().iter().filter(|a| !a.is_degenerate()).map(|a| Comp { start: a.start, ln_len: a.len.ln() }).collect();
    if comps.is_empty() {
        Prepared::Points
    } else {
        Prepared::Comps { comps, full: false }
    }
}

fn prepare_tube(t: &PointTube) -> Prepared {
    if t.centers.is_empty() {
        return Prepared::Empty;
    }
    if t.ln_radius == f64::NEG_INFINITY {
        return Prepared::Points;
    }
    let pts = ArcSet::points(&t.centers);
    let min_gap = pts.gaps().iter().map(|g| g.len).fold(f64::INFINITY, f64::min);
    if t.ln_radius >= (0.5 * min_gap).ln() || t.ln_radius >= PI.ln() {
        return prepare_arcs(&t.to_arcs());
    }
    let r = t.ln_radius.exp();
    let comps = pts.arcs().iter().map(|a| Comp { start: (a.start - r).rem_euclid(TAU), ln_len: LN_2 + t.ln_radius }).collect();
    Prepared::Comps { comps, full: false }
}

/// Splits `m` cells over the components: Chebyshev-graded on arcs, uniform on
/// the full circle, and never wider than `π/8`.
fn layout(comps: &[Comp], full: bool, m: usize) -> Vec<Cell> {
    let lens: Vec<f64> = comps.iter().map(|c| c.ln_len.exp()).collect();
    let shares: Vec<f64> = lens.iter().map(|l| (l / TAU).sqrt().max(1.0 / 16.0)).collect();
    let total: f64 = shares.iter().sum();
    let mut cells = Vec::new();
    for (ci, (len, share)) in lens.iter().zip(&shares).enumerate() {
        let n = ((m as f64 * share / total).round() as usize).max(1).max((4.0 * len).ceil() as usize);
        let edge = |k: usize| {
            if full {
                k as f64 / n as f64
            } else {
                0.5 * (1.0 - (PI * k as f64 / n as f64).cos())
            }
        };
        for k in 0..n {
            cells.push(Cell { comp: ci, a: edge(k), b: if k + 1 == n { 1.0 } else { edge(k + 1) } });
        }
    }
    cells
}

fn cell_pair(comps: &[Comp], ci: &Cell, cj: &Cell) -> f64 {
    let (wi, wj) = (ci.b - ci.a, cj.b - cj.a);
    if ci.comp == cj.comp {
        let c = comps[ci.comp];
        let len = c.ln_len.exp();
        let dn = cj.mid() - ci.mid();
        if len * dn.abs() > PI {
            return abs_pair(len * dn - TAU * dn.signum(), c.ln_len + wi.ln(), c.ln_len + wj.ln());
        }
        let w = wi.max(wj);
        return pair_kernel(c.ln_len + w.ln(), 0.0, wi / w, (cj.a - ci.a) / w, (cj.b - ci.a) / w);
    }
    let (a, b) = (comps[ci.comp], comps[cj.comp]);
    let pos = |c: Comp, cell: &Cell| c.start + c.ln_len.exp() * cell.mid();
    let dc = wrap_pi(pos(b, cj) - pos(a, ci));
    abs_pair(dc, a.ln_len + wi.ln(), b.ln_len + wj.ln())
}

/// Symmetric matrix from an entry function, upper triangle in parallel.
fn symmetric_matrix<F: Fn(usize, usize) -> f64 + Sync>(n: usize, f: F) -> Vec<f64> {
    let rows: Vec<Vec<f64>> = (0..n).into_par_iter().map(|i| (i..n).map(|j| f(i, j)).collect()).collect();
    let mut k = vec![0.0; n * n];
    for (i, row) in rows.into_iter().enumerate() {
        for (off, v) in row.into_iter().enumerate() {
            let j = i + off;
            k[i * n + j] = v;
            k[j * n + i] = v;
        }
    }
    k
}

fn log_kernel(comps: &[Comp], cells: &[Cell]) -> Vec<f64> {
    symmetric_matrix(cells.len(), |i, j| cell_pair(comps, &cells[i], &cells[j]))
}

fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0
    } else {
        x.sin() / x
    }
}

/// Fourier-side kernel `Σ_{n≤N} cos(n(c_i-c_j)) sinc(nw_i/2) sinc(nw_j/2)/n^{1-α}`
/// for uniform cells with centres `c` and widths `w`, plus a bound on the
/// neglected tail of any entry.
fn fourier_kernel(centers: &[f64], widths: &[f64], alpha: f64, terms: usize) -> (Vec<f64>, f64) {
    let m = centers.len();
    let data: Vec<f64> = (0..2 * terms)
        .into_par_iter()
        .flat_map_iter(|col| {
            let n = (col / 2 + 1) as f64;
            let scale = n.powf(alpha - 1.0).sqrt();
            (0..m).map(move |i| {
                let ang = n * centers[i];
                let v = sinc(0.5 * n * widths[i]) * scale;
                if col % 2 == 0 {
                    v * ang.cos()
                } else {
                    v * ang.sin()
                }
            })
        })
        .collect();
    let a = DMatrix::from_vec(m, 2 * terms, data);
    let k = &a * a.transpose();
    let wmin = widths.iter().copied().fold(f64::INFINITY, f64::min);
    let tail = 4.0 / (wmin * wmin) * (terms as f64).powf(alpha - 2.0) / (2.0 - alpha);
    (k.as_slice().to_vec(), tail)
}

// ---------------------------------------------------------------------------
// simplex QP

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Convergence {
    pub iterations: usize,
    pub projected_gradient: f64,
    /// Frank–Wolfe gap `∇f·p - min ∇f`, an upper bound on `f(p) - min f`.
    pub duality_gap: f64,
    pub converged: bool,
}

/// Euclidean projection onto the probability simplex (sort-based; ties keep
/// index order).
pub fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u: Vec<(usize, f64)> = v.iter().copied().enumerate().collect();
    u.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (mut acc, mut theta) = (0.0, 0.0);
    for (k, (_, x)) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (k + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

fn matvec(k: &[f64], x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let row = |r: &[f64]| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
    if n >= 128 {
        k.par_chunks(n).map(row).collect()
    } else {
        k.chunks(n).map(row).collect()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn lambda_max(k: &[f64], n: usize) -> f64 {
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    let mut lam = 0.0;
    for _ in 0..60 {
        let w = matvec(k, &v);
        let norm = dot(&w, &w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        lam = norm / dot(&v, &v).sqrt();
        v = w.iter().map(|x| x / norm).collect();
    }
    lam
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    pub max_iter: usize,
    pub gap_abs: f64,
    pub gap_rel: f64,
    pub projected_gradient: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { max_iter: 100_000, gap_abs: 1e-12, gap_rel: 1e-10, projected_gradient: 1e-9 }
    }
}

/// Exact minimizer of `pᵀKp` on the face spanned by the support of `x`,
/// followed along the segment from `x` as far as feasibility allows.
fn subspace_step(k: &[f64], n: usize, x: &[f64], kx: &[f64]) -> Option<(Vec<f64>, Vec<f64>, f64)> {
    let support: Vec<usize> = (0..n).filter(|i| x[*i] > 0.0).collect();
    let s = support.len();
    let ks = DMatrix::from_fn(s, s, |i, j| k[support[i] * n + support[j]]);
    let z = ks.lu().solve(&nalgebra::DVector::from_element(s, 1.0))?;
    let total = z.sum();
    if !(total > 0.0) || z.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut d = vec![0.0; n];
    for (i, &idx) in support.iter().enumerate() {
        d[idx] = z[i] / total - x[idx];
    }
    let tau_max = d.iter().zip(x).filter(|(di, _)| **di < 0.0).map(|(di, xi)| -xi / di).fold(1.0, f64::min);
    let kd = matvec(k, &d);
    let curv = dot(&d, &kd);
    let slope = dot(kx, &d);
    if !(curv > 0.0) || slope >= 0.0 {
        return None;
    }
    let tau = (-slope / curv).min(tau_max);
    let mut xn: Vec<f64> = x.iter().zip(&d).map(|(a, b)| (a + tau * b).max(0.0)).collect();
    let norm: f64 = xn.iter().sum();
    xn.iter_mut().for_each(|v| *v /= norm);
    let kxn = matvec(k, &xn);
    let fxn = dot(&xn, &kxn);
    Some((xn, kxn, fxn))
}

/// Minimizes `pᵀKp` over the simplex by accelerated projected gradient with
/// Armijo backtracking and function-value restarts. At checkpoints an exact
/// solve on the current support is tried and kept when it lowers the energy.
fn minimize_simplex(k: &[f64], n: usize, opts: &SolverOptions) -> (Vec<f64>, f64, Convergence) {
    let mut x = vec![1.0 / n as f64; n];
    let mut kx = matvec(k, &x);
    let mut fx = dot(&x, &kx);
    let mut y = x.clone();
    let mut ky = kx.clone();
    let mut fy = fx;
    let mut t = 1.0f64;
    let mut step = 1.0 / (2.0 * lambda_max(k, n)).max(1e-300);
    let status = |x: &[f64], kx: &[f64], fx: f64, it: usize| {
        let g: Vec<f64> = kx.iter().map(|v| 2.0 * v).collect();
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = (dot(&g, x) - gmin).max(0.0);
        let shifted: Vec<f64> = x.iter().zip(&g).map(|(a, b)| a - b).collect();
        let p = project_simplex(&shifted);
        let pg = x.iter().zip(&p).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        let converged = gap <= opts.gap_abs + opts.gap_rel * fx.abs() || pg <= opts.projected_gradient;
        Convergence { iterations: it, projected_gradient: pg, duality_gap: gap, converged }
    };
    let mut conv = status(&x, &kx, fx, 0);
    let mut it = 0;
    while !conv.converged && it < opts.max_iter {
        it += 1;
        let g: Vec<f64> = ky.iter().map(|v| 2.0 * v).collect();
        let (xn, kxn, fxn) = loop {
            let trial: Vec<f64> = y.iter().zip(&g).map(|(a, b)| a - step * b).collect();
            let xn = project_simplex(&trial);
            let kxn = matvec(k, &xn);
            let fxn = dot(&xn, &kxn);
            let d: Vec<f64> = xn.iter().zip(&y).map(|(a, b)| a - b).collect();
            let model = fy + dot(&g, &d) + dot(&d, &d) / (2.0 * step);
            if fxn <= model + 1e-14 * fy.abs() || step < 1e-300 {
                break (xn, kxn, fxn);
            }
            step *= 0.5;
        };
        if fxn > fx {
            // restart the momentum from the last iterate
            t = 1.0;
            y.clone_from(&x);
            ky.clone_from(&kx);
            fy = fx;
        } else {
            let tn = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let beta = (t - 1.0) / tn;
            y = xn.iter().zip(&x).map(|(a, b)| a + beta * (a - b)).collect();
            ky = kxn.iter().zip(&kx).map(|(a, b)| a + beta * (a - b)).collect();
            fy = dot(&y, &ky);
            x = xn;
            kx = kxn;
            fx = fxn;
            t = tn;
        }
        if it % 20 == 0 || it == opts.max_iter {
            conv = status(&x, &kx, fx, it);
            let support = x.iter().filter(|v| **v > 0.0).count();
            if !conv.converged && it % 100 == 0 && support <= 4096 {
                if let Some((xn, kxn, fxn)) = subspace_step(k, n, &x, &kx) {
                    if fxn < fx {
                        x = xn;
                        kx = kxn;
                        fx = fxn;
                        t = 1.0;
                        y.clone_from(&x);
                        ky.clone_from(&kx);
                        fy = fx;
                        conv = status(&x, &kx, fx, it);
                    }
                }
            }
        }
    }
    conv.iterations = it;
    (x, fx, conv)
}

// ---------------------------------------------------------------------------
// energies of discrete measures

fn check_alpha(alpha: f64) -> Result<()> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in [0, 1)")));
    }
    Ok(())
}

/// Kernel matrix of the atoms of `mu` smeared to arcs of half-width `eps`.
pub fn smeared_kernel_matrix(atoms: &[f64], eps: f64) -> Result<DMatrix<f64>> {
    if !(eps > 0.0 && eps <= PI / 8.0) {
        return Err(Error::Domain(format!("smearing half-width {eps} must lie in (0, π/8]")));
    }
    let n = atoms.len();
    let ln_w = (2.0 * eps).ln();
    let k = symmetric_matrix(n, |i, j| abs_pair(wrap_pi(atoms[j] - atoms[i]), ln_w, ln_w));
    Ok(DMatrix::from_row_slice(n, n, &k))
}

/// `I_α` of `mu` with every atom smeared uniformly over `[θ-ε, θ+ε]`.
///
/// At `α = 0` the double sum over the log kernel is used; for `α > 0` the
/// Fourier series up to `2^16` terms. `ε = 0` gives a divergent energy.
pub fn energy(mu: &DiscreteMeasure, alpha: f64, eps: f64) -> Result<EnergyReport> {
    check_alpha(alpha)?;
    if alpha > 0.0 {
        return energy_fourier(mu, alpha, eps, 1 << 16);
    }
    if eps == 0.0 {
        return Ok(EnergyReport { energy: Energy::Divergent, route: "kernel".into(), tail_bound: 0.0 });
    }
    let k = smeared_kernel_matrix(&mu.atoms, eps)?;
    let p = nalgebra::DVector::from_column_slice(&mu.weights);
    Ok(EnergyReport { energy: Energy::Finite(p.dot(&(&k * &p))), route: "kernel".into(), tail_bound: 0.0 })
}

/// `Σ_{n=1}^{N} |μ̂_ε(n)|²/n^{1-α}` with `μ̂_ε(n) = μ̂(n) sinc(nε)`, and the bound
/// `N^{α-2}/((2-α)ε²)` on the rest.
pub fn energy_fourier(mu: &DiscreteMeasure, alpha: f64, eps: f64, terms: usize) -> Result<EnergyReport> {
    check_alpha(alpha)?;
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::Domain(format!("smearing half-width {eps} must be finite and nonnegative")));
    }
    let route = "fourier".to_string();
    if eps == 0.0 {
        return Ok(EnergyReport { energy: Energy::Divergent, route, tail_bound: f64::INFINITY });
    }
    const BLOCK: usize = 1024;
    let blocks = terms.div_ceil(BLOCK);
    let sum: f64 = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let n0 = b * BLOCK + 1;
            let n1 = ((b + 1) * BLOCK).min(terms);
            let mut pw: Vec<Complex64> =
                mu.atoms.iter().zip(&mu.weights).map(|(t, p)| Complex64::from_polar(*p, -(n0 as f64) * t)).collect();
            let step: Vec<Complex64> = mu.atoms.iter().map(|t| Complex64::from_polar(1.0, -t)).collect();
            let mut acc = 0.0;
            for n in n0..=n1 {
                let c: Complex64 = pw.iter().sum();
                let s = sinc(n as f64 * eps);
                acc += c.norm_sqr() * s * s * (n as f64).powf(alpha - 1.0);
                for (p, z) in pw.iter_mut().zip(&step) {
                    *p *= z;
                }
            }
            acc
        })
        .sum();
    let tail = (terms as f64).powf(alpha - 2.0) / ((2.0 - alpha) * eps * eps);
    Ok(EnergyReport { energy: Energy::Finite(sum), route, tail_bound: tail })
}

// ---------------------------------------------------------------------------
// capacity

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityOptions {
    /// Atom budget at the finest level.
    pub atoms: usize,
    /// Also solve at `m/8, m/4, m/2` to expose the trend in `m`.
    pub sequence: bool,
    /// Fourier terms for `α > 0`.
    pub fourier_terms: usize,
    pub solver: SolverOptions,
}

impl Default for CapacityOptions {
    fn default() -> Self {
        CapacityOptions { atoms: 512, sequence: true, fourier_terms: 1 << 13, solver: SolverOptions::default() }
    }
}

impl CapacityOptions {
    pub fn with_atoms(atoms: usize) -> Self {
        CapacityOptions { atoms, ..Default::default() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundKind {
    /// Exact by structure (empty set, point sets, the full circle).
    Exact,
    /// `1/E` for an admissible measure: never above the true capacity.
    LowerBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityStep {
    pub atoms: usize,
    pub value: CapValue,
    pub energy: Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub alpha: f64,
    pub value: CapValue,
    pub energy: Energy,
    /// `E - gap`: lower bound on the discrete minimum.
    pub energy_lower: Option<f64>,
    pub bound: BoundKind,
    pub atoms: usize,
    /// Optimal weights at the cell midpoints.
    pub measure: Option<DiscreteMeasure>,
    pub convergence: Option<Convergence>,
    pub inconclusive: bool,
    pub tail_bound: f64,
    pub sequence: Vec<CapacityStep>,
    pub notes: Vec<String>,
}

impl CapacityResult {
    fn exact(alpha: f64, value: CapValue, energy: Energy, note: &str) -> Self {
        CapacityResult {
            alpha,
            value,
            energy,
            energy_lower: None,
            bound: BoundKind::Exact,
            atoms: 0,
            measure: None,
            convergence: None,
            inconclusive: false,
            tail_bound: 0.0,
            sequence: Vec::new(),
            notes: vec![note.to_string()],
        }
    }
}

/// `cap_α(E)` of a finite union of closed arcs.
pub fn capacity(set: &ArcSet, alpha: f64, opts: &CapacityOptions) -> Result<CapacityResult> {
    capacity_of(&LevelSet::Arcs(set.clone()), alpha, opts)
}

/// `cap_α` of an arc set or of a thin tube around points.
pub fn capacity_of(set: &LevelSet, alpha: f64, opts: &CapacityOptions) -> Result<CapacityResult> {
    check_alpha(alpha)?;
    if opts.atoms == 0 {
        return Err(Error::InvalidSpec("atom budget must be positive".into()));
    }
    let (comps, full) = match prepare(set) {
        Prepared::Empty => return Err(Error::Precondition("capacity of the empty set requested".into())),
        Prepared::Points => {
            return Ok(CapacityResult::exact(
                alpha,
                CapValue::Finite(0.0),
                Energy::Divergent,
                "finite point set: every probability measure has an atom, energy diverges",
            ))
        }
        Prepared::Comps { comps, full } => (comps, full),
    };
    let budgets: Vec<usize> = if opts.sequence {
        let mut b: Vec<usize> = [8, 4, 2, 1].iter().map(|d| (opts.atoms / d).max(1)).collect();
        b.dedup();
        b
    } else {
        vec![opts.atoms]
    };
    let mut sequence = Vec::new();
    let mut last = None;
    for m in budgets {
        let r = solve(&comps, full, m, alpha, opts)?;
        sequence.push(CapacityStep { atoms: r.atoms, value: r.value, energy: r.energy });
        last = Some(r);
    }
    let mut r = last.expect("at least one budget");
    r.sequence = sequence;
    Ok(r)
}

fn solve(comps: &[Comp], full: bool, m: usize, alpha: f64, opts: &CapacityOptions) -> Result<CapacityResult> {
    let cells = layout(comps, full, m);
    let n = cells.len();
    let mut notes = Vec::new();
    let (k, tail) = if alpha == 0.0 {
        (log_kernel(comps, &cells), 0.0)
    } else {
        let widths: Vec<f64> = cells.iter().map(|c| comps[c.comp].ln_len.exp() * (c.b - c.a)).collect();
        if widths.iter().any(|w| *w == 0.0) {
            let mut r = CapacityResult::exact(alpha, CapValue::Finite(0.0), Energy::Divergent, "");
            r.notes = vec!["cells below f64 resolution: α-energy treated as divergent".into()];
            return Ok(r);
        }
        let centers: Vec<f64> = cells.iter().map(|c| comps[c.comp].start + comps[c.comp].ln_len.exp() * c.mid()).collect();
        fourier_kernel(&centers, &widths, alpha, opts.fourier_terms)
    };
    if k.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric("non-finite kernel entry".into()));
    }
    let (p, e, conv) = minimize_simplex(&k, n, &opts.solver);
    if !conv.converged {
        notes.push(format!("optimizer stopped after {} iterations with gap {:.3e}", conv.iterations, conv.duality_gap));
    }
    let atoms: Vec<f64> = cells.iter().map(|c| comps[c.comp].start + comps[c.comp].ln_len.exp() * c.mid()).collect();
    let measure = DiscreteMeasure::new(atoms, p).ok();
    let (value, bound) = if full {
        notes.push("full circle: Lebesgue measure has zero energy".into());
        (CapValue::Infinite, BoundKind::Exact)
    } else {
        (CapValue::from_energy(Energy::Finite(e)), BoundKind::LowerBound)
    };
    Ok(CapacityResult {
        alpha,
        value,
        energy: Energy::Finite(e),
        energy_lower: Some(e - conv.duality_gap),
        bound,
        atoms: n,
        measure,
        convergence: Some(conv),
        inconclusive: !conv.converged,
        tail_bound: tail,
        sequence: Vec::new(),
        notes,
    })
}

/// Minimal log energy of an arc of length `len`: `-log sin(len/4)`.
pub fn arc_energy_exact(len: f64) -> f64 {
    -(0.25 * len).sin().ln()
}

/// Independent oracle for the minimal log energy of one arc: equal cells on a
/// fixed grid, a Toeplitz kernel summed on the Fourier side, and the
/// equality-constrained minimizer from a direct linear solve. Fails if that
/// minimizer is not positive (the simplex constraint would be active).
pub fn dense_grid_oracle(len: f64, cells: usize, terms: usize) -> Result<f64> {
    if !(len > 0.0 && len < TAU) || cells < 2 {
        return Err(Error::Domain(format!("oracle needs 0 < len < 2π and at least two cells, got {len}, {cells}")));
    }
    let h = len / cells as f64;
    let diag: Vec<f64> = (0..cells)
        .into_par_iter()
        .map(|k| {
            (1..=terms)
                .map(|n| {
                    let n = n as f64;
                    let s = sinc(0.5 * n * h);
                    (n * k as f64 * h).cos() * s * s / n
                })
                .sum()
        })
        .collect();
    let k = DMatrix::from_fn(cells, cells, |i, j| diag[i.abs_diff(j)]);
    let ones = nalgebra::DVector::from_element(cells, 1.0);
    let x = k.lu().solve(&ones).ok_or_else(|| Error::Numeric("singular oracle kernel".into()))?;
    if x.iter().any(|v| *v <= 0.0) {
        return Err(Error::Numeric("equality-constrained minimizer has nonpositive weights".into()));
    }
    Ok(1.0 / x.sum())
}

// ---------------------------------------------------------------------------
// weak-type inequality

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeakTypeReport {
    pub t: f64,
    /// `|f(0)|² + 𝒟(f)`.
    pub norm_sq: f64,
    pub threshold: f64,
    pub set_measure: f64,
    pub components: usize,
    pub lhs: CapValue,
    pub lhs_energy: Energy,
    pub rhs: f64,
    pub slack: f64,
    pub holds: bool,
}

/// Checks `cap{|f| ≥ t} ≤ 16‖f‖²/t²` for `t ≥ 4‖f‖²` on an `M`-point grid.
pub fn weak_type_check(f: &PowerSeries, t: f64, grid: usize, opts: &CapacityOptions) -> Result<WeakTypeReport> {
    let norm_sq = weak_norm_sq(f);
    let threshold = 4.0 * norm_sq;
    if !(t >= threshold * (1.0 - 1e-12)) {
        return Err(Error::Precondition(format!("t = {t} is below the admissible threshold 4‖f‖² = {threshold}")));
    }
    let values: Vec<f64> = f.boundary_trace(grid)?.samples().iter().map(|v| v.norm()).collect();
    let set = ArcSet::from_superlevel(&values, t);
    let (lhs, lhs_energy) = if set.is_empty() {
        (CapValue::Finite(0.0), Energy::Divergent)
    } else {
        let r = capacity(&set, 0.0, opts)?;
        if r.inconclusive {
            return Err(Error::Numeric("capacity of the superlevel set did not converge".into()));
        }
        (r.value, r.energy)
    };
    let rhs = 16.0 * norm_sq / (t * t);
    let holds = lhs.value() <= rhs * (1.0 + 1e-9);
    Ok(WeakTypeReport {
        t,
        norm_sq,
        threshold,
        set_measure: set.measure(),
        components: set.arcs().len(),
        lhs,
        lhs_energy,
        rhs,
        slack: rhs - lhs.value(),
        holds,
    })
}

/// Random admissible pairs `f = A F_{λ,0}`, `t = 4‖f‖²`, with `A` small enough
/// that `{|f| ≥ t}` is nonempty.
pub fn weak_type_suite(seed: u64, count: usize, opts: &CapacityOptions) -> Result<Vec<WeakTypeReport>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cases: Vec<(f64, f64, f64)> =
        (0..count).map(|_| (rng.gen_range(0.5..0.95), rng.gen_range(0.0..TAU), rng.gen_range(0.3..0.95))).collect();
    cases
        .into_par_iter()
        .map(|(r, theta, u)| {
            let f_norm_sq = 1.0 + r * r / (1.0 - r * r).powi(2);
            let amp = u / (4.0 * (1.0 - r) * f_norm_sq);
            let order = (40.0 / -r.ln()).ceil() as usize;
            let lam_bar = Complex64::from_polar(r, -theta);
            let coeffs: Vec<Complex64> = (0..=order).map(|n| lam_bar.powu(n as u32) * amp).collect();
            let f = PowerSeries::new(coeffs)?;
            let grid = (4 * order).next_power_of_two().max(1 << 12);
            let t = 4.0 * amp * amp * f_norm_sq;
            weak_type_check(&f, t.max(4.0 * weak_norm_sq(&f)), grid, opts)
        })
        .collect()
}

/// `|f(0)|² + 𝒟(f)`.
fn weak_norm_sq(f: &PowerSeries) -> f64 {
    let c = f.coeffs();
    c[0].norm_sqr() + c.iter().enumerate().skip(1).map(|(n, a)| n as f64 * a.norm_sqr()).sum::<f64>()
}

// ---------------------------------------------------------------------------
// capacity integrals over level sets

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CapWeight {
    /// `∫ cap(E_φ(s)) log(1/(1-s)) ds/(1-s)`.
    Log,
    /// `∫ cap_α(E_φ(s)) ds/(1-s)^{1+α}`.
    Alpha,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapIntegralOptions {
    pub levels: usize,
    pub capacity: CapacityOptions,
    /// Boundary grid for level sets without a closed form.
    pub grid: usize,
}

impl Default for CapIntegralOptions {
    fn default() -> Self {
        CapIntegralOptions {
            levels: 20,
            capacity: CapacityOptions { atoms: 256, sequence: false, ..Default::default() },
            grid: 1 << 14,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapIntegralReport {
    pub alpha: f64,
    pub weight: CapWeight,
    pub s: Vec<f64>,
    pub capacities: Vec<CapValue>,
    /// Leading levels whose set is the whole circle, left out of the tail.
    pub pre_tail: usize,
    pub panels: PanelSeries,
    pub notes: Vec<String>,
}

impl CapIntegralReport {
    pub fn verdict(&self) -> Verdict {
        self.panels.verdict
    }
}

/// Capacity of `E_φ(s)`: closed form where available, else from the grid.
pub fn level_capacity(phi: &Symbol, s: f64, alpha: f64, grid: usize, opts: &CapacityOptions) -> Result<(CapValue, bool)> {
    let set = match phi.exact_level_set(s) {
        Some(set) => set,
        None => LevelSet::Arcs(phi.level_set(s, grid)?),
    };
    if set.is_empty() {
        return Ok((CapValue::Finite(0.0), false));
    }
    let r = capacity_of(&set, alpha, opts)?;
    Ok((r.value, r.inconclusive))
}

/// Evaluates the capacity integral on `1 - s = 2^{-k}`, `k = 1..levels`, with
/// the trapezoid rule in `u = log(1/(1-s))` and the panel-trend verdict.
///
/// The integrand near `s = 0` is infinite for every symbol (the set is the
/// whole circle), so the integral is read as a tail: leading levels with
/// infinite capacity are reported but not summed. A full circle persisting to
/// the last level is divergence.
pub fn capacity_integral(phi: &Symbol, alpha: f64, weight: CapWeight, opts: &CapIntegralOptions) -> Result<CapIntegralReport> {
    check_alpha(alpha)?;
    if opts.levels < 2 {
        return Err(Error::InvalidSpec("need at least two levels".into()));
    }
    let ks: Vec<usize> = (1..=opts.levels).collect();
    let s: Vec<f64> = ks.iter().map(|k| 1.0 - 0.5f64.powi(*k as i32)).collect();
    let caps: Vec<(CapValue, bool)> =
        s.par_iter().map(|s| level_capacity(phi, *s, alpha, opts.grid, &opts.capacity)).collect::<Result<_>>()?;
    let capacities: Vec<CapValue> = caps.iter().map(|c| c.0).collect();
    let mut notes = Vec::new();
    let g = |k: usize| {
        let u = k as f64 * LN_2;
        match weight {
            CapWeight::Log => u,
            CapWeight::Alpha => (alpha * u).exp(),
        }
    };
    let pre_tail = capacities.iter().take_while(|c| c.is_infinite()).count();
    let panels = if caps.iter().any(|c| c.1) {
        notes.push("inconclusive capacity on the grid".into());
        let mut p = panel_trend(Vec::new());
        p.verdict = Verdict::Inconclusive;
        p.rule = "inconclusive-capacity".into();
        p
    } else if pre_tail == capacities.len() {
        notes.push("level sets are the whole circle at every level".into());
        panel_trend(vec![f64::INFINITY])
    } else {
        if pre_tail > 0 {
            notes.push(format!("first {pre_tail} levels are the whole circle; integral taken from s = {}", s[pre_tail]));
        }
        let inc: Vec<f64> = (pre_tail..capacities.len() - 1)
            .map(|i| {
                let (a, b) = (capacities[i].value() * g(ks[i]), capacities[i + 1].value() * g(ks[i + 1]));
                0.5 * LN_2 * (a + b)
            })
            .collect();
        panel_trend(inc)
    };
    Ok(CapIntegralReport { alpha, weight, s, capacities, pre_tail, panels, notes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::SymbolSpec;

    fn quick() -> CapacityOptions {
        CapacityOptions { atoms: 256, sequence: false, ..Default::default() }
    }

    #[test]
    fn closed_forms_of_the_log_mean() {
        // unit square: ∫∫ ln|x-y| = -3/2
        assert!((mean_log(0.0, 1.0, 0.0, 1.0) + 1.5).abs() < 1e-14);
        // brute force on separated and overlapping rectangles
        for (x0, x1, y0, y1) in [(0.0, 1.0, 1.5, 2.0), (0.0, 1.0, 0.3, 0.8), (0.0, 0.5, 0.5, 1.5), (0.0, 1.0, 0.2, 0.2005)] {
            let n = 4000;
            let mut acc = 0.0;
            for i in 0..n {
                let x = x0 + (x1 - x0) * (i as f64 + 0.5) / n as f64;
                acc += mean_log_single(x, y0, y1);
            }
            acc /= n as f64;
            assert!((acc - mean_log(x0, x1, y0, y1)).abs() < 1e-6, "{x0} {x1} {y0} {y1}");
        }
    }

    #[test]
    fn pair_kernel_matches_direct_quadrature() {
        // separated arcs at ordinary scale, against a composite midpoint rule
        let direct = |c: f64, wa: f64, wb: f64| {
            let n = 2000;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let x = -0.5 * wa + wa * (i as f64 + 0.5) / n as f64;
                    let y = c - 0.5 * wb + wb * (j as f64 + 0.5) / n as f64;
                    acc -= (2.0 * (0.5 * (y - x)).sin()).abs().ln();
                }
            }
            acc / (n * n) as f64
        };
        for (c, wa, wb) in [(2.5, 0.3, 0.2), (0.5, 0.1, 0.3), (-3.0, 0.25, 0.25)] {
            let k = abs_pair(c, f64::ln(wa), f64::ln(wb));
            assert!((k - direct(c, wa, wb)).abs() < 1e-5, "{c}: {k}");
        }
        // self energy of a tiny arc: -ln w + 3/2 up to O(w²)
        let k = abs_pair(0.0, -50.0, -50.0);
        assert!((k - 51.5).abs() < 1e-12);
        // scale-free: underflowing widths still give the exact log part
        let k = abs_pair(0.0, -2000.0, -2000.0);
        assert!((k - 2001.5).abs() < 1e-9);
    }

    #[test]
    fn full_circle_and_point_sets() {
        let r = capacity(&ArcSet::full(), 0.0, &CapacityOptions::with_atoms(1024)).unwrap();
        assert!(r.value.is_infinite());
        assert!(r.energy.value().abs() <= 1e-6, "{:?}", r.energy);
        let r = capacity(&ArcSet::points(&[0.0]), 0.0, &quick()).unwrap();
        assert_eq!(r.value, CapValue::Finite(0.0));
        assert_eq!(r.energy, Energy::Divergent);
        assert!(capacity(&ArcSet::empty(), 0.0, &quick()).is_err());
    }

    #[test]
    fn single_arc_matches_closed_form_and_oracle() {
        let len = PI / 2.0;
        let r = capacity(&ArcSet::arc(1.0, len), 0.0, &CapacityOptions::with_atoms(512)).unwrap();
        assert!(!r.inconclusive, "{:?}", r.convergence);
        let exact = arc_energy_exact(len);
        let e = r.energy.value();
        assert!(e >= exact - 1e-9 && e - exact < 1e-3 * exact, "{e} vs {exact}");
        let oracle = dense_grid_oracle(len, 512, 1 << 16).unwrap();
        assert!((oracle - exact).abs() < 0.01 * exact, "{oracle} vs {exact}");
        assert!((1.0 / e - 1.0 / oracle).abs() < 0.02 / oracle);
        let m = r.measure.unwrap();
        assert!(m.supported_in(&ArcSet::arc(1.0, len), 1e-12));
    }

    #[test]
    fn monotone_and_subadditive_on_arcs() {
        let nested: Vec<f64> = vec![0.2, 0.6, 1.5, 3.0];
        let caps: Vec<f64> =
            nested.iter().map(|l| capacity(&ArcSet::arc(0.3, *l), 0.0, &quick()).unwrap().value.value()).collect();
        assert!(caps.windows(2).all(|w| w[0] <= w[1] + 1e-9), "{caps:?}");
        // the log kernel is nonnegative on sets of diameter at most π/3
        let e = ArcSet::arc(0.0, 0.3);
        let f = ArcSet::arc(0.6, 0.4);
        let ce = capacity(&e, 0.0, &quick()).unwrap().value.value();
        let cf = capacity(&f, 0.0, &quick()).unwrap().value.value();
        let cu = capacity(&e.union(&f), 0.0, &quick()).unwrap().value.value();
        assert!(cu <= ce + cf + 1e-9 && cu >= ce.max(cf) - 1e-9, "{cu} {ce} {cf}");
    }

    #[test]
    fn smeared_kernel_is_psd_and_rotation_invariant() {
        let atoms: Vec<f64> = (0..40).map(|k| 0.37 * k as f64 + 0.01 * (k * k) as f64).collect();
        let k = smeared_kernel_matrix(&atoms, 0.05).unwrap();
        assert!((&k - k.transpose()).amax() == 0.0);
        let eig = k.clone().symmetric_eigen().eigenvalues;
        assert!(eig.min() >= -1e-10 * k.norm(), "{}", eig.min());
        let w: Vec<f64> = (0..40).map(|k| 1.0 + (k % 3) as f64).collect();
        let total: f64 = w.iter().sum();
        let mu = DiscreteMeasure::new(atoms, w.iter().map(|x| x / total).collect()).unwrap();
        let e0 = energy(&mu, 0.0, 0.05).unwrap().energy.value();
        for a in [0.3, 1.7, -2.9] {
            let e1 = energy(&mu.rotate(a), 0.0, 0.05).unwrap().energy.value();
            assert!((e0 - e1).abs() <= 1e-12 * e0.abs().max(1.0), "{e0} {e1}");
        }
    }

    #[test]
    fn kernel_and_fourier_routes_agree() {
        let mu = DiscreteMeasure::new(vec![0.0, 1.1, 2.0, 4.5], vec![0.1, 0.4, 0.3, 0.2]).unwrap();
        let ek = energy(&mu, 0.0, 0.2).unwrap();
        let ef = energy_fourier(&mu, 0.0, 0.2, 1 << 16).unwrap();
        assert!((ek.energy.value() - ef.energy.value()).abs() < 1e-8, "{ek:?} {ef:?}");
        // antipodal pair against a brute-force double sum
        let mu = DiscreteMeasure::new(vec![0.0, PI], vec![0.5, 0.5]).unwrap();
        let e = energy(&mu, 0.0, 0.01).unwrap().energy.value();
        let cell = |c: f64| {
            let n = 3000;
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let x = -0.01 + 0.02 * (i as f64 + 0.5) / n as f64;
                    let y = c - 0.01 + 0.02 * (j as f64 + 0.5) / n as f64;
                    let d = (2.0 * (0.5 * (y - x)).sin()).abs();
                    if d > 0.0 {
                        acc -= d.ln();
                    }
                }
            }
            acc / (n * n) as f64
        };
        let brute = 0.5 * abs_pair(0.0, 0.02f64.ln(), 0.02f64.ln()) + 0.5 * cell(PI);
        assert!((e - brute).abs() < 1e-10, "{e} {brute}");
        assert!((cell(PI) + 2f64.ln()).abs() < 1e-5);
        assert_eq!(energy(&mu, 0.0, 0.0).unwrap().energy, Energy::Divergent);
        // a single atom: energy grows like log(1/ε)
        let one = DiscreteMeasure::uniform(vec![0.5]).unwrap();
        let es: Vec<f64> = [1e-1, 1e-2, 1e-3].iter().map(|e| energy(&one, 0.0, *e).unwrap().energy.value()).collect();
        assert!(es.windows(2).all(|w| (w[1] - w[0] - 10f64.ln()).abs() < 1e-2), "{es:?}");
        // Lebesgue-like measure
        let lebesgue = DiscreteMeasure::equispaced(64).unwrap();
        assert!(energy_fourier(&lebesgue, 0.0, PI / 64.0, 1 << 12).unwrap().energy.value() < 1e-8);
    }

    #[test]
    fn thin_tubes_have_log_capacity() {
        // tube of radius e^{-L} around a point: energy ≈ -log(e^{-L}/2) = L + ln 2
        for l in [5.0, 50.0, 500.0] {
            let t = LevelSet::Tube(PointTube { centers: vec![1.0], ln_radius: -l });
            let r = capacity_of(&t, 0.0, &quick()).unwrap();
            let e = r.energy.value();
            assert!((e - (l + LN_2)).abs() < 1e-3, "{l}: {e}");
        }
        // two distant tiny tubes: half the self energy plus half the mutual
        let t = LevelSet::Tube(PointTube { centers: vec![0.0, PI], ln_radius: -300.0 });
        let e = capacity_of(&t, 0.0, &quick()).unwrap().energy.value();
        let expect = 0.5 * (300.0 + LN_2) + 0.5 * (-(2f64.ln()));
        assert!((e - expect).abs() < 1e-3, "{e} {expect}");
    }

    #[test]
    fn alpha_capacity_grows_with_the_set() {
        let o = CapacityOptions { atoms: 64, sequence: false, fourier_terms: 1 << 12, ..Default::default() };
        let a = capacity(&ArcSet::arc(0.0, 0.5), 0.5, &o).unwrap();
        let b = capacity(&ArcSet::arc(0.0, 1.5), 0.5, &o).unwrap();
        assert!(a.value.value() < b.value.value());
        assert!(a.tail_bound.is_finite());
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        assert!(p.iter().all(|x| (x - 1.0 / 3.0).abs() < 1e-15));
        let p = project_simplex(&[2.0, 0.0, -1.0]);
        assert_eq!(p, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn weak_type_examples() {
        let z = PowerSeries::from_real(&[0.0, 1.0]).unwrap();
        let r = weak_type_check(&z, 4.0, 1024, &quick()).unwrap();
        assert_eq!(r.lhs, CapValue::Finite(0.0));
        assert!((r.rhs - 1.0).abs() < 1e-15 && r.holds);
        assert!(matches!(weak_type_check(&z, 3.0, 1024, &quick()), Err(Error::Precondition(_))));
        let c = PowerSeries::from_real(&[0.1]).unwrap();
        assert!(weak_type_check(&c, 0.2, 64, &quick()).unwrap().holds);
        let suite = weak_type_suite(7, 6, &quick()).unwrap();
        assert!(suite.iter().all(|r| r.holds && r.set_measure > 0.0), "{suite:?}");
    }

    #[test]
    fn capacity_integral_examples() {
        let o = CapIntegralOptions::default();
        let sc = SymbolSpec::Scale { r: 0.6 }.compile().unwrap();
        let rep = capacity_integral(&sc, 0.0, CapWeight::Log, &o).unwrap();
        assert_eq!(rep.verdict(), Verdict::Converging);
        assert_eq!(rep.pre_tail, 1);
        let bl = SymbolSpec::blaschke(&[0.3]).compile().unwrap();
        assert_eq!(capacity_integral(&bl, 0.0, CapWeight::Log, &o).unwrap().verdict(), Verdict::Diverging);
    }
}

//! Hilbert–Schmidt diagnostics for `C_φ` on `H²`, `𝒟` and `𝒟_α`, each
//! quantity computed along independent routes that are cross-checked.
//!
//! On `H²` the HS norm is `Σ_{n≥0}‖φⁿ‖² = (1/2π)∫ dθ/(1-|φ|²)`; on `𝒟` it is
//! `Σ_{n≥1} 𝒟(φⁿ)/n = ∫_𝔻 |φ'|²/(1-|φ|²)² dA` with `dA = dxdy/π`.

use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::boundary_sets::{layer_cake_above, ArcSet, WeightFn};
use crate::error::{Error, Result};
use crate::quadrature::{integrate_circle, integrate_disc_rings, panel_trend, Angular, DiscRule, PanelSeries, Verdict};
use crate::series::PowerSeries;
use crate::spaces::dirichlet_integral;
use crate::symbols::{Symbol, SymbolSpec};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "alpha", rename_all = "kebab-case")]
pub enum HsSpace {
    H2,
    D,
    DAlpha(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HsVerdict {
    FiniteEvidence,
    InfiniteEvidence,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsRoute {
    pub name: String,
    pub panels: PanelSeries,
    /// Partial sum plus tail estimate when the panels converge.
    pub value: Option<f64>,
}

impl HsRoute {
    fn new(name: &str, panels: PanelSeries) -> Self {
        let value = panels.value();
        HsRoute { name: name.to_string(), panels, value }
    }

    pub fn verdict(&self) -> Verdict {
        self.panels.verdict
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HsReport {
    pub space: HsSpace,
    pub routes: Vec<HsRoute>,
    pub layer_cake: Option<f64>,
    pub verdict: HsVerdict,
    /// Relative difference (or ratio, for `𝒟_α`) between the two main routes.
    pub cross_route: Option<f64>,
    pub notes: Vec<String>,
}

impl HsReport {
    pub fn route(&self, name: &str) -> Option<&HsRoute> {
        self.routes.iter().find(|r| r.name == name)
    }

    /// Value of the first route that converged.
    pub fn value(&self) -> Option<f64> {
        self.routes.iter().find_map(|r| r.value)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HsOptions {
    /// Boundary grid for `H²` routes.
    pub grid: usize,
    pub n_max: usize,
    /// Taylor order used for the power series routes.
    pub order: usize,
    /// Dyadic radial panels of the area routes.
    pub levels: usize,
    pub q: usize,
    pub angular: Angular,
    /// Dyadic levels toward the set in the outer-symbol route.
    pub carleson_levels: usize,
    pub carleson_q: usize,
}

impl Default for HsOptions {
    fn default() -> Self {
        HsOptions {
            grid: 1 << 14,
            n_max: 4096,
            order: 2048,
            levels: 40,
            q: 8,
            angular: Angular::Adaptive { min: 64, max: 1 << 14, per_width: 16.0, floor: 1e-4 },
            carleson_levels: 80,
            carleson_q: 8,
        }
    }
}

const CONTACT: f64 = 1e-9;

fn relative_gap(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(a), Some(b)) => Some((a - b).abs() / a.abs().max(b.abs()).max(1e-300)),
        _ => None,
    }
}

/// `∫ |φ'|²/(1-|φ|²)^{2+α} dA_α` on dyadic panels in `1 - |z|²`.
pub(crate) fn area_route(phi: &Symbol, alpha: f64, opts: &HsOptions) -> Result<HsRoute> {
    let rule = DiscRule::graded(alpha, opts.levels, opts.q, false, opts.angular)?;
    let power = 2.0 + alpha;
    let panels = integrate_disc_rings(
        |r, m| {
            let (v, d) = phi.ring(r, m);
            let mut acc = 0.0;
            for (v, d) in v.iter().zip(&d) {
                let gap = 1.0 - v.norm_sqr();
                if gap <= 0.0 {
                    return Ok(f64::INFINITY);
                }
                acc += d.norm_sqr() / gap.powf(power);
            }
            Ok(acc / m as f64)
        },
        &rule,
    )?;
    Ok(HsRoute::new("integral", panel_trend(panels)))
}

/// Sums `term(φⁿ, n)` over dyadic blocks `[2^j, 2^{j+1})`, `n ≤ n_max`, with an
/// optional analytic tail when `sup|φ| < 1`.
fn series_route<T, G>(phi: &Symbol, opts: &HsOptions, term: T, tail: G) -> Result<(HsRoute, Vec<String>)>
where
    T: Fn(&PowerSeries, usize) -> f64,
    G: Fn(f64, usize, &PowerSeries) -> Option<f64>,
{
    let approx = phi.to_series(opts.order)?;
    let mut notes: Vec<String> = approx.warning.into_iter().collect();
    let base = approx.series;
    let n_max = opts.n_max.min(opts.order).max(1);
    let blocks = usize::BITS as usize - n_max.leading_zeros() as usize;
    let mut inc = vec![0.0; blocks];
    let rho = phi.sup_bound();
    let mut partial = 0.0;
    let mut last_n = 0;
    for (i, p) in base.powers().enumerate() {
        let n = i + 1;
        if n > n_max {
            break;
        }
        let t = term(&p?, n);
        inc[(usize::BITS - 1 - n.leading_zeros()) as usize] += t;
        partial += t;
        last_n = n;
        if rho < 1.0 && t <= 1e-18 * partial {
            break;
        }
    }
    let mut panels = panel_trend(inc);
    if rho < 1.0 && panels.verdict == Verdict::Converging {
        if let Some(t) = tail(rho, last_n, &base) {
            panels.tail_estimate = Some(t);
        }
    } else if rho >= 1.0 {
        notes.push(format!("series route: partial sums to n = {last_n} only (symbol reaches the circle)"));
    }
    Ok((HsRoute::new("series", panels), notes))
}

/// HS evidence on `H²`: boundary integral, `Σ‖φⁿ‖²` and the layer-cake form.
pub fn hs_hardy(phi: &Symbol, opts: &HsOptions) -> Result<HsReport> {
    let modulus = phi.boundary_modulus(opts.grid)?;
    let m = modulus.len();
    let mut notes = Vec::new();
    let contact = modulus.iter().filter(|v| **v >= 1.0 - CONTACT).count();
    if contact as f64 > 0.01 * m as f64 {
        notes.push(format!("|φ| ≥ 1 - {CONTACT:e} on {contact} of {m} boundary nodes"));
        let panels = panel_trend(vec![f64::INFINITY]);
        return Ok(HsReport {
            space: HsSpace::H2,
            routes: vec![HsRoute::new("boundary-integral", panels)],
            layer_cake: None,
            verdict: HsVerdict::InfiniteEvidence,
            cross_route: None,
            notes,
        });
    }
    let g: Vec<f64> =
        modulus.iter().map(|v| if *v >= 1.0 { f64::INFINITY } else { 1.0 / (1.0 - v * v) }).collect();
    // (i) bands 1 - |φ|² ∈ (2^{-k-1}, 2^{-k}]
    const BANDS: usize = 64;
    let mut inc = vec![0.0; BANDS];
    for (v, gv) in modulus.iter().zip(&g) {
        let gap = 1.0 - v * v;
        let k = if gap <= 0.0 { BANDS - 1 } else { ((-gap.log2()).floor().max(0.0) as usize).min(BANDS - 1) };
        inc[k] += gv / m as f64;
    }
    let rho = phi.sup_bound();
    if rho >= 1.0 {
        let last = inc.iter().rposition(|x| *x > 0.0).unwrap_or(0);
        inc.truncate((last + 1).max(4));
        notes.push("boundary route: only grid-resolved bands".into());
    }
    let mut boundary = HsRoute::new("boundary-integral", panel_trend(inc));
    if boundary.verdict() == Verdict::Converging {
        boundary.value = Some(integrate_circle(&g, true));
    }
    let layer_cake = 1.0 + layer_cake_above(&g, 1.0) / TAU;
    let (series, series_notes) = series_route(
        phi,
        opts,
        |p, _| p.coeffs().iter().map(|c| c.norm_sqr()).sum(),
        |rho, n, _| Some(rho.powi(2 * (n as i32 + 1)) / (1.0 - rho * rho)),
    )?;
    notes.extend(series_notes);
    // the n = 0 term
    let mut series = series;
    series.panels.increments[0] += 1.0;
    for p in series.panels.partials.iter_mut() {
        *p += 1.0;
    }
    series.value = series.panels.value();
    let verdict = combine(boundary.verdict(), Some(series.verdict()), &mut notes);
    let cross_route = relative_gap(boundary.value, series.value);
    Ok(HsReport {
        space: HsSpace::H2,
        routes: vec![boundary, series],
        layer_cake: Some(layer_cake),
        verdict,
        cross_route,
        notes,
    })
}

fn combine(primary: Verdict, secondary: Option<Verdict>, notes: &mut Vec<String>) -> HsVerdict {
    match (primary, secondary) {
        (Verdict::Diverging, _) => HsVerdict::InfiniteEvidence,
        (Verdict::Converging, Some(Verdict::Diverging)) => {
            notes.push("routes disagree: primary converges, secondary diverges".into());
            HsVerdict::Inconclusive
        }
        (Verdict::Converging, _) => HsVerdict::FiniteEvidence,
        (Verdict::Inconclusive, Some(Verdict::Diverging)) => HsVerdict::InfiniteEvidence,
        _ => HsVerdict::Inconclusive,
    }
}

/// `Σ_{n>N} n x^{n-1}` for `0 ≤ x < 1`.
fn tail_n_pow(x: f64, n: usize) -> f64 {
    let k = n as f64;
    (x.powf(k) * ((k + 1.0) * (1.0 - x) + x)) / (1.0 - x).powi(2)
}

/// HS evidence on `𝒟`: area integral and `Σ 𝒟(φⁿ)/n`. Outer symbols use the
/// summed boundary form of the series instead of Taylor powers.
pub fn hs_dirichlet(phi: &Symbol, opts: &HsOptions) -> Result<HsReport> {
    let mut notes = Vec::new();
    let area = area_route(phi, 0.0, opts)?;
    if let SymbolSpec::Outer { set, weight, .. } = phi.spec() {
        let carleson = HsRoute::new("carleson-summed", outer_hs_panels(set, weight, opts.carleson_levels, opts.carleson_q)?);
        if area.verdict() != carleson.verdict() {
            notes.push(format!(
                "grid-limited area route reports {:?}; verdict taken from the boundary formula",
                area.verdict()
            ));
        }
        let verdict = combine(carleson.verdict(), None, &mut notes);
        let cross_route = relative_gap(area.value, carleson.value);
        return Ok(HsReport { space: HsSpace::D, routes: vec![carleson, area], layer_cake: None, verdict, cross_route, notes });
    }
    let (series, series_notes) = series_route(
        phi,
        opts,
        |p, n| dirichlet_integral(p) / n as f64,
        |rho, n, base| Some(dirichlet_integral(base) * tail_n_pow(rho * rho, n)),
    )?;
    notes.extend(series_notes);
    let contact = phi.sup_bound() >= 1.0;
    let secondary = if contact { None } else { Some(series.verdict()) };
    let verdict = combine(area.verdict(), secondary, &mut notes);
    let cross_route = relative_gap(area.value, series.value);
    Ok(HsReport { space: HsSpace::D, routes: vec![area, series], layer_cake: None, verdict, cross_route, notes })
}

/// `𝒟_α(f) = ∫|f'|² dA_α = Σ n²(1+α)B(n, 1+α)|f̂(n)|²`.
pub fn dirichlet_alpha(f: &PowerSeries, alpha: f64) -> f64 {
    let a = 1.0 + alpha;
    let mut beta = 1.0 / a; // B(1, a)
    let mut acc = 0.0;
    for (n, c) in f.coeffs().iter().enumerate().skip(1) {
        let nf = n as f64;
        acc += nf * nf * a * beta * c.norm_sqr();
        beta *= nf / (nf + a);
    }
    acc
}

/// HS evidence on `𝒟_α`, `0 < α < 1`: `∫|φ'|²/(1-|φ|²)^{2+α} dA_α` against
/// `Σ 𝒟_α(φⁿ)/n^{1-α}`. These are only comparable, so the report carries
/// their ratio.
pub fn hs_dalpha(phi: &Symbol, alpha: f64, opts: &HsOptions) -> Result<HsReport> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!("alpha = {alpha} must lie in (0, 1)")));
    }
    let mut notes = Vec::new();
    let area = area_route(phi, alpha, opts)?;
    let (series, series_notes) = series_route(phi, opts, |p, n| dirichlet_alpha(p, alpha) / (n as f64).powf(1.0 - alpha), |_, _, _| None)?;
    notes.extend(series_notes);
    let secondary = if phi.sup_bound() >= 1.0 { None } else { Some(series.verdict()) };
    let verdict = combine(area.verdict(), secondary, &mut notes);
    let cross_route = match (area.value, series.value) {
        (Some(a), Some(s)) if a > 0.0 => Some(s / a),
        _ => None,
    };
    Ok(HsReport { space: HsSpace::DAlpha(alpha), routes: vec![area, series], layer_cake: None, verdict, cross_route, notes })
}

pub fn hs_report(phi: &Symbol, space: HsSpace, opts: &HsOptions) -> Result<HsReport> {
    match space {
        HsSpace::H2 => hs_hardy(phi, opts),
        HsSpace::D => hs_dirichlet(phi, opts),
        HsSpace::DAlpha(a) => hs_dalpha(phi, a, opts),
    }
}

// ---------------------------------------------------------------------------
// boundary double integrals for outer functions |f| = e^{-w(d(ζ,E))}

#[derive(Debug, Clone, Copy)]
struct BNode {
    /// Index of the breakpoint the offset is measured from.
    bp: usize,
    off: f64,
    w: f64,
    dw: f64,
    weight: f64,
    level: usize,
}

/// Quadrature nodes on the circle graded dyadically toward every endpoint of
/// `set`, with offsets kept relative to the endpoint so that scales far below
/// `ulp(π)` survive.
fn graded_boundary_nodes<P: Fn(f64) -> (f64, f64)>(set: &ArcSet, profile: P, levels: usize, q: usize) -> Result<(Vec<f64>, Vec<BNode>)> {
    if set.is_empty() || set.is_full() {
        return Err(Error::Precondition("boundary formula needs a proper nonempty set".into()));
    }
    let mut bps: Vec<f64> = Vec::new();
    for a in set.arcs() {
        bps.push(a.start);
        if !a.is_degenerate() {
            bps.push(a.end().rem_euclid(TAU));
        }
    }
    bps.sort_by(|a, b| a.total_cmp(b));
    bps.dedup();
    let nb = bps.len();
    let (x, w) = crate::quadrature::gauss_legendre(q);
    let mut nodes = Vec::new();
    for i in 0..nb {
        let a = bps[i];
        let len = if nb == 1 { TAU } else { (bps[(i + 1) % nb] - a).rem_euclid(TAU) };
        if len <= 0.0 {
            continue;
        }
        let inside = set.contains(a + 0.5 * len);
        for k in 0..levels {
            let hi = 0.5 * len * 0.5f64.powi(k as i32);
            let lo = 0.5 * hi;
            let h = 0.5 * (hi - lo);
            for (xi, wi) in x.iter().zip(&w) {
                let off = lo + h * (1.0 + xi);
                let d = if inside { 0.0 } else { off };
                let (wv, dw) = profile(d);
                let dw = if inside { 0.0 } else { dw };
                nodes.push(BNode { bp: i, off, w: wv, dw, weight: wi * h, level: k });
                nodes.push(BNode { bp: (i + 1) % nb, off: -off, w: wv, dw, weight: wi * h, level: k });
            }
        }
    }
    Ok((bps, nodes))
}

/// `(1/4π²) ∬ pair(w_s, w_t)/|e^{is} - e^{it}|² ds dt` on the graded nodes,
/// split by the finer of the two node levels. `diag(w, w')` is the limit on
/// the diagonal.
fn boundary_double_integral<P, D>(bps: &[f64], nodes: &[BNode], levels: usize, pair: P, diag: D) -> Vec<f64>
where
    P: Fn(f64, f64) -> f64 + Sync,
    D: Fn(f64, f64) -> f64 + Sync,
{
    let rows: Vec<Vec<f64>> = (0..nodes.len())
        .into_par_iter()
        .map(|i| {
            let a = nodes[i];
            let mut acc = vec![0.0; levels];
            acc[a.level] += a.weight * a.weight * diag(a.w, a.dw);
            for b in &nodes[i + 1..] {
                let delta = if a.bp == b.bp { b.off - a.off } else { bps[b.bp] - bps[a.bp] + (b.off - a.off) };
                let delta = delta - TAU * (delta / TAU).round();
                let s = 2.0 * (0.5 * delta).sin();
                let v = pair(a.w, b.w) / (s * s);
                acc[a.level.max(b.level)] += 2.0 * a.weight * b.weight * v;
            }
            acc
        })
        .collect();
    let mut inc = vec![0.0; levels];
    for r in rows {
        for (x, y) in inc.iter_mut().zip(r) {
            *x += y;
        }
    }
    inc.iter().map(|v| v / (4.0 * PI * PI)).collect()
}

fn effective_levels(set: &ArcSet, levels: usize, q: usize) -> usize {
    let intervals = 2 * set.arcs().len();
    levels.min((24_000 / (2 * q * intervals).max(1)).max(12))
}

/// `A(w) = Σ_{n≥1} e^{-2nw} = 1/(e^{2w} - 1)`.
fn geometric_kernel(w: f64) -> f64 {
    1.0 / (2.0 * w).exp_m1()
}

/// `Σ_{n≥1} 𝒟(fⁿ)/n` for the outer function `|f| = e^{-w(d(ζ,E))}`, from
/// Carleson's formula summed in `n` under the integral:
/// `(1/4π²)∬ (w_t - w_s)(A(w_s) - A(w_t))/|e^{is} - e^{it}|²`.
/// Increment `k` collects the pairs whose finer node lies at level `k`
/// (distance `≈ 2^{-k}` times the local gap from `E`).
pub fn outer_hs_panels(set: &ArcSet, weight: &WeightFn, levels: usize, q: usize) -> Result<PanelSeries> {
    weight.validate()?;
    if set.measure() > 0.0 && weight.value_at_zero() == 0.0 {
        // |f| = 1 on a set of positive measure
        return Ok(panel_trend(vec![f64::INFINITY]));
    }
    if weight.value_at_zero() == 0.0 && weight.value(1e-300) == 0.0 {
        return Err(Error::InvalidSpec("weight vanishes identically near the set".into()));
    }
    let levels = effective_levels(set, levels, q);
    let (bps, nodes) = graded_boundary_nodes(set, |d| (weight.value(d), weight.derivative(d)), levels, q)?;
    let inc = boundary_double_integral(
        &bps,
        &nodes,
        levels,
        |ws, wt| (wt - ws) * (geometric_kernel(ws) - geometric_kernel(wt)),
        |w, dw| {
            let sh = w.sinh();
            if sh == 0.0 {
                0.0
            } else {
                dw * dw / (2.0 * sh * sh)
            }
        },
    );
    Ok(panel_trend(inc))
}

/// `𝒟(f_{nw,E})` from Carleson's formula on the same graded nodes.
pub fn outer_dirichlet_panels(set: &ArcSet, weight: &WeightFn, n: f64, levels: usize, q: usize) -> Result<PanelSeries> {
    weight.validate()?;
    let levels = effective_levels(set, levels, q);
    let (bps, nodes) = graded_boundary_nodes(set, |d| (weight.value(d), weight.derivative(d)), levels, q)?;
    let inc = boundary_double_integral(
        &bps,
        &nodes,
        levels,
        |ws, wt| (-2.0 * n * ws).exp() * -(-2.0 * n * (wt - ws)).exp_m1() * n * (wt - ws),
        |w, dw| 2.0 * n * n * (-2.0 * n * w).exp() * dw * dw,
    );
    Ok(panel_trend(inc))
}

/// `𝒟(f)` for the analytic `f` with `Re f = u(d(ζ,E))` on the circle and
/// `Im f(0) = 0`, from the Douglas formula
/// `𝒟(f) = (2/4π²)∬ (u(s) - u(t))²/|e^{is} - e^{it}|² ds dt`.
/// `profile(d)` returns `(u(d), u'(d))`.
pub fn douglas_dirichlet<P: Fn(f64) -> (f64, f64)>(set: &ArcSet, profile: P, levels: usize, q: usize) -> Result<PanelSeries> {
    let levels = effective_levels(set, levels, q);
    let (bps, nodes) = graded_boundary_nodes(set, profile, levels, q)?;
    let inc = boundary_double_integral(&bps, &nodes, levels, |us, ut| 2.0 * (us - ut) * (us - ut), |_, du| 2.0 * du * du);
    Ok(panel_trend(inc))
}

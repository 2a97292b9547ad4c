//! One function per subcommand: run the core routine, fill a `Report`.

use compop_core::boundary_sets::{LevelSet, PointTube};
use compop_core::capacity::{capacity, capacity_integral, capacity_of, CapIntegralOptions, CapWeight, CapacityOptions};
use compop_core::compop_diag::{carleson_sweep, compactness_sweep, power_norm_diagnostics, CarlesonOptions, CompactVerdict, SweepOptions};
use compop_core::constructions::{build_outer_symbol, build_peak_symbol, build_rec_pipeline, check_theorem_thnorme, lemma_sides, RecOptions};
use compop_core::hs_diag::{hs_report, HsOptions, HsSpace, HsVerdict};
use compop_core::quadrature::{PanelSeries, Verdict};
use compop_core::spaces::SpaceParams;
use compop_core::verify::{run_criterion, Status, Suite, VerifyOptions};
use serde::Serialize;

use crate::config::{CommandKind, RunConfig, SpaceArg};
use crate::report::{fmt_f64, Cell, Outcome, Report};

type Res<T> = Result<T, String>;

fn err(e: compop_core::Error) -> String {
    e.to_string()
}

/// Kebab-case name of a serde enum value.
fn name<T: Serialize>(v: T) -> String {
    match serde_json::to_value(v) {
        Ok(serde_json::Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => "?".into(),
    }
}

fn detail<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).unwrap_or(serde_json::Value::Null)
}

pub fn run(cfg: &RunConfig) -> Res<Report> {
    match cfg.command {
        CommandKind::Norms => norms(cfg),
        CommandKind::Diag => diag(cfg),
        CommandKind::Hs => hs(cfg),
        CommandKind::Capacity => cap(cfg),
        CommandKind::ConstructPeak => peak(cfg),
        CommandKind::ConstructOuter => outer(cfg),
        CommandKind::ConstructRec => rec(cfg),
        CommandKind::Verify => verify(cfg),
    }
}

fn symbol(cfg: &RunConfig) -> Res<compop_core::Symbol> {
    cfg.symbol.as_ref().ok_or("symbol: missing")?.compile().map_err(|e| format!("symbol: {e}"))
}

fn norms(cfg: &RunConfig) -> Res<Report> {
    let phi = symbol(cfg)?;
    let n_max = cfg.grids.n_max.unwrap_or(64);
    let r = power_norm_diagnostics(&phi, n_max).map_err(err)?;
    let mut rep = Report::new(&["n", "dirichlet", "hardy_sq", "hardy_scaled", "reliable"]);
    for i in 0..r.dirichlet.len() {
        rep.row(vec![(i + 1).into(), r.dirichlet[i].into(), r.hardy_sq[i].into(), r.hardy_scaled[i].into(), r.reliable[i].into()]);
    }
    rep.set("dirichlet_sequence", r.dirichlet_verdict);
    rep.set("hardy_scaled_sequence", r.hardy_scaled_verdict);
    rep.set("bounded", r.bounded);
    rep.set("compact", r.compact);
    rep.set("sup_dirichlet", r.sup);
    rep.line(format!("D(φⁿ), n ≤ {n_max}: {}   sup = {}", name(r.dirichlet_verdict), fmt_f64(r.sup)));
    rep.line(format!("bounded: {}   compact: {}", name(r.bounded), name(r.compact)));
    for n in &r.notes {
        rep.line(format!("note: {n}"));
    }
    rep.inconclusive_if(r.compact == CompactVerdict::Inconclusive && r.bounded == compop_core::compop_diag::BoundVerdict::Inconclusive);
    rep.detail = detail(&r);
    Ok(rep)
}

fn diag(cfg: &RunConfig) -> Res<Report> {
    let phi = symbol(cfg)?;
    let params = match cfg.space.unwrap_or(SpaceArg::D) {
        SpaceArg::D => SpaceParams::dirichlet(),
        SpaceArg::Besov { p, alpha, beta } => SpaceParams::new(p, alpha, beta).map_err(|e| format!("space: {e}"))?,
        _ => return Err("space: `diag` takes a Besov space p=..,alpha=..,beta=.. or D".into()),
    };
    params.require_positive_delta().map_err(|e| format!("space: {e}"))?;
    let opts = SweepOptions {
        octaves: cfg.grids.lambda_octaves.unwrap_or(SweepOptions::default().octaves),
        rays: cfg.grids.rays.unwrap_or(SweepOptions::default().rays),
    };
    let sweep = compactness_sweep(&phi, params, &opts).map_err(err)?;
    let mut rep = Report::new(&["sweep", "scale", "angle", "quotient"]);
    for r in &sweep.rows {
        rep.row(vec!["test-function".into(), r.one_minus.into(), r.angle.into(), r.q.into()]);
    }
    rep.set("params", params);
    rep.set("delta", sweep.delta);
    rep.set("bounded", sweep.bounded());
    rep.set("compact", sweep.compact());
    rep.set("sup_q", sweep.sup());
    rep.set("trend", sweep.trend);
    rep.line(format!(
        "test functions (p={}, alpha={}, beta={}, delta={}): sup Q = {}",
        params.p,
        params.alpha,
        params.beta,
        fmt_f64(sweep.delta),
        fmt_f64(sweep.sup())
    ));
    rep.line(format!("bounded: {}   compact: {}", name(sweep.bounded()), name(sweep.compact())));
    for d in &sweep.dropped {
        rep.line(format!("dropped: {d}"));
    }
    rep.inconclusive_if(sweep.compact() == CompactVerdict::Inconclusive);
    let mut full = serde_json::json!({ "test_functions": detail(&sweep) });
    if params == SpaceParams::dirichlet() {
        let c = carleson_sweep(&phi, &CarlesonOptions::default()).map_err(err)?;
        for r in &c.rows {
            rep.row(vec!["carleson".into(), r.box_length.into(), r.center.into(), r.quotient.into()]);
        }
        rep.set("carleson_bounded", c.bounded());
        rep.set("carleson_compact", c.compact());
        rep.set("carleson_sup", c.sup);
        rep.line(format!("Carleson boxes: sup μ(S(I))/|I|² = {}", fmt_f64(c.sup)));
        rep.line(format!("bounded: {}   compact: {}", name(c.bounded()), name(c.compact())));
        full["carleson"] = detail(&c);
    }
    rep.detail = full;
    Ok(rep)
}

fn hs(cfg: &RunConfig) -> Res<Report> {
    let phi = symbol(cfg)?;
    let space = match cfg.space.unwrap_or(SpaceArg::D) {
        SpaceArg::D => HsSpace::D,
        SpaceArg::H2 => HsSpace::H2,
        SpaceArg::DAlpha { alpha } => HsSpace::DAlpha(alpha),
        SpaceArg::Besov { .. } => return Err("space: `hs` takes H2, D or alpha=..".into()),
    };
    let mut opts = HsOptions::default();
    if let Some(m) = cfg.grids.m {
        opts.grid = m;
    }
    if let Some(n) = cfg.grids.n {
        opts.order = n;
        opts.n_max = opts.n_max.max(n);
    }
    let r = hs_report(&phi, space, &opts).map_err(err)?;
    let mut rep = Report::new(&["route", "panel", "increment", "partial"]);
    for route in &r.routes {
        for (k, (inc, part)) in route.panels.increments.iter().zip(&route.panels.partials).enumerate() {
            rep.row(vec![route.name.clone().into(), k.into(), (*inc).into(), (*part).into()]);
        }
        rep.line(format!(
            "{:<12} {:<12} value {}  ({} panels, {})",
            route.name,
            name(route.verdict()),
            route.value.map_or("-".into(), fmt_f64),
            route.panels.increments.len(),
            route.panels.rule
        ));
    }
    if let Some(l) = r.layer_cake {
        rep.line(format!("{:<12} {:<12} value {}", "layer-cake", "", fmt_f64(l)));
    }
    rep.line(format!("verdict: {}", name(r.verdict)));
    if let Some(x) = r.cross_route {
        rep.line(format!("cross-route: {}", fmt_f64(x)));
    }
    for n in &r.notes {
        rep.line(format!("note: {n}"));
    }
    rep.set("space", r.space);
    rep.set("verdict", r.verdict);
    rep.set("value", r.value());
    rep.set("layer_cake", r.layer_cake);
    rep.set("cross_route", r.cross_route);
    rep.set(
        "routes",
        r.routes.iter().map(|x| serde_json::json!({"name": x.name, "verdict": x.verdict(), "value": x.value})).collect::<Vec<_>>(),
    );
    rep.inconclusive_if(r.verdict == HsVerdict::Inconclusive);
    rep.detail = detail(&r);
    Ok(rep)
}

const CAP_COLUMNS: &[&str] = &["source", "index", "parameter", "capacity", "energy", "increment", "partial"];

fn cap(cfg: &RunConfig) -> Res<Report> {
    let mut rep = Report::new(CAP_COLUMNS);
    if let Some(set) = &cfg.set {
        let mut opts = CapacityOptions::default();
        if let Some(a) = cfg.grids.atoms {
            opts.atoms = a;
        }
        let r = capacity(set, cfg.alpha, &opts).map_err(err)?;
        for (i, s) in r.sequence.iter().enumerate() {
            rep.row(vec!["measure".into(), i.into(), s.atoms.into(), s.value.value().into(), s.energy.value().into(), Cell::Empty, Cell::Empty]);
        }
        rep.row(vec![name(r.bound).into(), r.sequence.len().into(), r.atoms.into(), r.value.value().into(), r.energy.value().into(), Cell::Empty, Cell::Empty]);
        rep.line(format!("cap_{} = {}  ({}, energy {})", cfg.alpha, fmt_f64(r.value.value()), name(r.bound), fmt_f64(r.energy.value())));
        let points = !set.is_empty() && set.arcs().iter().all(|a| a.is_degenerate());
        if points && cfg.alpha == 0.0 {
            // shrinking tubes expose the approach to zero
            let centers: Vec<f64> = set.arcs().iter().map(|a| a.start).collect();
            let top = opts.atoms.max(8);
            let mut seq = Vec::new();
            for (i, m) in [top / 8, top / 4, top / 2, top].into_iter().enumerate() {
                let radius = std::f64::consts::PI / m as f64;
                let tube = LevelSet::Tube(PointTube { centers: centers.clone(), ln_radius: radius.ln() });
                let t = capacity_of(&tube, 0.0, &CapacityOptions { sequence: false, ..opts }).map_err(err)?;
                rep.row(vec!["tube".into(), i.into(), radius.into(), t.value.value().into(), t.energy.value().into(), Cell::Empty, Cell::Empty]);
                seq.push((radius, t.value.value()));
            }
            rep.line(format!(
                "tubes of radius π/m: {}",
                seq.iter().map(|(r, c)| format!("{} → {}", fmt_f64(*r), fmt_f64(*c))).collect::<Vec<_>>().join(", ")
            ));
            rep.set("tube_sequence", seq);
        }
        for n in &r.notes {
            rep.line(format!("note: {n}"));
        }
        rep.set("capacity", r.value.value());
        rep.set("energy", r.energy.value());
        rep.set("bound", r.bound);
        rep.set("inconclusive", r.inconclusive);
        rep.inconclusive_if(r.inconclusive);
        rep.detail = detail(&r);
    } else {
        let phi = symbol(cfg)?;
        let mut opts = CapIntegralOptions::default();
        if let Some(l) = cfg.grids.s_levels {
            opts.levels = l;
        }
        if let Some(a) = cfg.grids.atoms {
            opts.capacity.atoms = a;
        }
        if let Some(m) = cfg.grids.m {
            opts.grid = m;
        }
        let weight = if cfg.alpha == 0.0 { CapWeight::Log } else { CapWeight::Alpha };
        let r = capacity_integral(&phi, cfg.alpha, weight, &opts).map_err(err)?;
        let summed = r.panels.increments.len() == r.s.len().saturating_sub(r.pre_tail + 1);
        for (i, (s, c)) in r.s.iter().zip(&r.capacities).enumerate() {
            let (inc, part) = if summed && i > r.pre_tail {
                let j = i - r.pre_tail - 1;
                (Cell::Num(r.panels.increments[j]), Cell::Num(r.panels.partials[j]))
            } else {
                (Cell::Empty, Cell::Empty)
            };
            rep.row(vec!["level".into(), (i + 1).into(), (*s).into(), c.value().into(), Cell::Empty, inc, part]);
        }
        rep.line(format!("capacity integral ({}): {}  partial {}", name(weight), name(r.verdict()), fmt_f64(r.panels.last_partial())));
        for n in &r.notes {
            rep.line(format!("note: {n}"));
        }
        rep.set("verdict", r.verdict());
        rep.set("partial", r.panels.last_partial());
        rep.set("value", r.panels.value());
        rep.inconclusive_if(r.verdict() == Verdict::Inconclusive);
        rep.detail = detail(&r);
    }
    Ok(rep)
}

const CONSTRUCT_COLUMNS: &[&str] = &["quantity", "index", "x", "value"];

fn panel_rows(rep: &mut Report, quantity: &str, p: &PanelSeries) {
    for (k, (inc, part)) in p.increments.iter().zip(&p.partials).enumerate() {
        rep.row(vec![format!("{quantity}.increment").into(), k.into(), (k as f64).into(), (*inc).into()]);
        rep.row(vec![format!("{quantity}.partial").into(), k.into(), (k as f64).into(), (*part).into()]);
    }
}

fn panel_line(label: &str, p: &PanelSeries) -> String {
    format!("{label}: {}  partial {}  rate {}", name(p.verdict), fmt_f64(p.last_partial()), p.rate.map_or("-".into(), fmt_f64))
}

fn set_arg(cfg: &RunConfig) -> Res<&compop_core::boundary_sets::ArcSet> {
    cfg.set.as_ref().ok_or_else(|| "set: missing".to_string())
}

fn peak(cfg: &RunConfig) -> Res<Report> {
    let set = set_arg(cfg)?;
    let grid = cfg.grids.m.unwrap_or(1 << 16);
    let p = build_peak_symbol(set, grid).map_err(err)?;
    let mut rep = Report::new(CONSTRUCT_COLUMNS);
    for (i, g) in p.gaps.iter().enumerate() {
        rep.row(vec!["gap".into(), i.into(), g.start.into(), g.len.into()]);
        rep.row(vec!["tau".into(), i.into(), g.len.into(), p.tau[i].into()]);
        rep.row(vec!["tau_sq_len.partial".into(), i.into(), (i as f64).into(), p.tau_sq_len[i].into()]);
    }
    for (i, (eps, m)) in p.level_measures.iter().enumerate() {
        rep.row(vec!["level_measure".into(), i.into(), (*eps).into(), (*m).into()]);
    }
    let holds = p.certificate_holds();
    rep.line(format!("points: {}   gaps: {}   grid: {}", p.points.len(), p.gaps.len(), p.grid));
    rep.line(format!("certificate 1 + 2Σ|ĝ(n)|² = {}  ≥  measured {}: {}", fmt_f64(p.certificate), fmt_f64(p.measured), holds));
    rep.line(format!(
        "∫g²: grid {}  closed form (π/2)Στ²ℓ {}  πΣτ²ℓ {}  (grid/πΣτ²ℓ = {})",
        fmt_f64(p.g_l2_grid),
        fmt_f64(p.g_l2_exact),
        fmt_f64(p.g_l2_stated),
        fmt_f64(p.g_l2_grid / p.g_l2_stated)
    ));
    rep.line(format!("τ increasing: {}   level sets shrink: {}   max |φ| = {}", p.tau_increasing(), p.level_sets_shrink(), fmt_f64(p.max_modulus)));
    rep.set("certificate", p.certificate);
    rep.set("measured", p.measured);
    rep.set("certificate_holds", holds);
    rep.set("g_l2_grid", p.g_l2_grid);
    rep.set("g_l2_exact", p.g_l2_exact);
    rep.set("g_l2_stated", p.g_l2_stated);
    rep.set("tau_increasing", p.tau_increasing());
    rep.set("level_sets_shrink", p.level_sets_shrink());
    rep.set("max_modulus", p.max_modulus);
    if !holds || !p.level_sets_shrink() || !(p.max_modulus < 1.0) {
        rep.outcome = Outcome::Failed;
    }
    rep.detail = detail(&p);
    Ok(rep)
}

fn outer(cfg: &RunConfig) -> Res<Report> {
    let set = set_arg(cfg)?;
    let w = cfg.weight.as_ref().ok_or("weight: missing")?;
    let grid = cfg.grids.m.unwrap_or(1 << 14);
    let o = build_outer_symbol(set, w, grid, cfg.require_disc_algebra).map_err(err)?;
    let mut rep = Report::new(CONSTRUCT_COLUMNS);
    for p in &o.power_identity {
        rep.row(vec!["power_identity_gap".into(), (p.n as usize).into(), (p.n as f64).into(), p.gap.into()]);
    }
    panel_rows(&mut rep, "dini", &w.dini_series());
    rep.line(format!("flags: {}", serde_json::to_string(&o.flags).unwrap_or_default()));
    rep.line(format!("max |f| = {}   continuity at E asserted: {}", fmt_f64(o.max_modulus), o.continuity_evidence));
    let worst = o.power_identity.iter().map(|p| p.gap).fold(0.0, f64::max);
    rep.line(format!("f^n = f_(nw) for n ≤ {}: max gap {}", o.power_identity.len(), fmt_f64(worst)));
    for n in &o.notes {
        rep.line(format!("note: {n}"));
    }
    rep.set("flags", o.flags);
    rep.set("max_modulus", o.max_modulus);
    rep.set("continuity_evidence", o.continuity_evidence);
    rep.set("power_identity_max_gap", worst);
    let mut full = serde_json::json!({ "outer": detail(&o) });
    if cfg.checks {
        let l = lemma_sides(set, w, grid, cfg.gamma).map_err(err)?;
        panel_rows(&mut rep, "lemma_lhs_boundary", &l.lhs_boundary);
        panel_rows(&mut rep, "lemma_rhs", &l.rhs);
        rep.row(vec!["lemma_lhs_series".into(), 0usize.into(), 0.0.into(), l.lhs_series.into()]);
        let c = cfg.ratio_constant;
        rep.line(format!("D(f) coefficients {}   {}", fmt_f64(l.lhs_series), panel_line("boundary formula", &l.lhs_boundary)));
        rep.line(panel_line("∫ w'(d)² e^{-2w(d)}", &l.rhs));
        let ratio = |r: Option<f64>| r.map_or("-".into(), fmt_f64);
        rep.line(format!(
            "ratios: coefficients {}  boundary {}  within [1/{c}, {c}]: {}",
            ratio(l.ratio_series),
            ratio(l.ratio_boundary),
            l.within(c)
        ));
        rep.set("lemma_ratio_series", l.ratio_series);
        rep.set("lemma_ratio_boundary", l.ratio_boundary);
        rep.set("lemma_within", l.within(c));
        rep.inconclusive_if(!l.both_zero && (l.ratio_series.is_none() || l.ratio_boundary.is_none()));

        let t = check_theorem_thnorme(set, w, grid, &HsOptions::default()).map_err(err)?;
        panel_rows(&mut rep, "theorem_integral", &t.integral);
        for route in &t.hs.routes {
            panel_rows(&mut rep, &format!("hs_{}", route.name), &route.panels);
        }
        rep.line(panel_line("∫ w'(d)²/w(d)²", &t.integral));
        rep.line(format!("HS on D: {}   agree: {}", name(t.hs.verdict), t.agree));
        rep.set("theorem_integral", t.integral.verdict);
        rep.set("hs_verdict", t.hs.verdict);
        rep.set("theorem_agree", t.agree);
        rep.inconclusive_if(t.hs.verdict == HsVerdict::Inconclusive || t.integral.verdict == Verdict::Inconclusive);
        full["lemma"] = detail(&l);
        full["theorem"] = detail(&t);
    }
    rep.detail = full;
    Ok(rep)
}

fn rec(cfg: &RunConfig) -> Res<Report> {
    let set = set_arg(cfg)?;
    let growth = cfg.growth.unwrap_or(compop_core::constructions::GrowthFn::OnePlusLog);
    let mut opts = RecOptions::default();
    if let Some(m) = cfg.grids.m {
        opts.grid = m;
    }
    if let Some(a) = cfg.grids.atoms {
        opts.atoms = a;
    }
    if let Some(l) = cfg.grids.t_levels {
        opts.levels = l;
    }
    let r = build_rec_pipeline(set, &growth, &opts).map_err(err)?;
    let mut rep = Report::new(CONSTRUCT_COLUMNS);
    for (i, (x, v)) in r.psi.knots.iter().zip(&r.psi.values).enumerate() {
        rep.row(vec!["psi".into(), i.into(), (*x).into(), (*v).into()]);
    }
    for (i, (lt, c)) in r.table.ln_t.iter().zip(&r.table.cap).enumerate() {
        rep.row(vec!["cap_tube".into(), i.into(), (*lt).into(), (*c).into()]);
    }
    panel_rows(&mut rep, "psi_mass", &r.psi_mass);
    panel_rows(&mut rep, "psi_weighted", &r.psi_weighted);
    panel_rows(&mut rep, "douglas", &r.membership.douglas);
    panel_rows(&mut rep, "hs_area", &r.hs.area);
    panel_rows(&mut rep, "cap_weighted", &r.capacity.weighted);
    panel_rows(&mut rep, "cap_unweighted", &r.capacity.unweighted);
    rep.line(format!("growth {}   scale c = {}   max |Im f| = {}", serde_json::to_string(&growth).unwrap_or_default(), fmt_f64(r.scale), fmt_f64(r.max_imag)));
    rep.line(panel_line("∫ψ dX", &r.psi_mass));
    rep.line(panel_line("∫ψ k dX", &r.psi_weighted));
    rep.line(format!("(a) {}   divergence flag: {}", panel_line("D(f) Douglas", &r.membership.douglas), r.membership.divergence_flag));
    rep.line(format!(
        "(b) HS on D: {}   max |φ'|²(1-|φ|²)^-2/|f'|² = {} (≤ 1/2: {})   {}",
        name(r.hs.verdict),
        fmt_f64(r.hs.max_ratio),
        r.hs.ratio_ok,
        panel_line("area", &r.hs.area)
    ));
    rep.line(format!("(c) {}", panel_line("h-weighted capacity integral", &r.capacity.weighted)));
    rep.line(format!("    {}", panel_line("unweighted capacity integral", &r.capacity.unweighted)));
    rep.line(format!("    level-set inclusion: {} checked, {} violations", r.capacity.inclusion_checked, r.capacity.inclusion_violations));
    for n in &r.notes {
        rep.line(format!("note: {n}"));
    }
    rep.set("douglas", r.membership.douglas.verdict);
    rep.set("divergence_flag", r.membership.divergence_flag);
    rep.set("hs_verdict", r.hs.verdict);
    rep.set("weighted", r.capacity.weighted.verdict);
    rep.set("unweighted", r.capacity.unweighted.verdict);
    rep.set("inclusion_violations", r.capacity.inclusion_violations);
    rep.inconclusive_if(r.hs.verdict == HsVerdict::Inconclusive || r.capacity.weighted.verdict == Verdict::Inconclusive);
    if r.capacity.inclusion_violations > 0 {
        rep.outcome = Outcome::Failed;
    }
    rep.detail = detail(&r);
    Ok(rep)
}

fn verify(cfg: &RunConfig) -> Res<Report> {
    let ids = if cfg.criteria.is_empty() { cfg.suite.unwrap_or(Suite::All).criteria() } else { cfg.criteria.clone() };
    let opts = VerifyOptions { c: cfg.ratio_constant, seed: cfg.seed };
    let mut rep = Report::new(&["id", "status", "title", "metric", "value"]);
    let mut results = Vec::new();
    for id in ids {
        let r = run_criterion(id, &opts);
        let status = name(r.status);
        if r.metrics.is_empty() {
            rep.row(vec![(r.id as usize).into(), status.clone().into(), r.title.clone().into(), Cell::Empty, Cell::Empty]);
        }
        for m in &r.metrics {
            rep.row(vec![(r.id as usize).into(), status.clone().into(), r.title.clone().into(), m.name.clone().into(), m.value.into()]);
        }
        rep.line(r.line());
        match r.status {
            Status::Fail => rep.outcome = Outcome::Failed,
            Status::Inconclusive => rep.inconclusive_if(true),
            Status::Pass => {}
        }
        results.push(r);
    }
    let count = |s: Status| results.iter().filter(|r| r.status == s).count();
    rep.line(format!("{} passed, {} failed, {} inconclusive", count(Status::Pass), count(Status::Fail), count(Status::Inconclusive)));
    rep.set("passed", count(Status::Pass));
    rep.set("failed", count(Status::Fail));
    rep.set("inconclusive", count(Status::Inconclusive));
    rep.set("criteria", results.iter().map(|r| serde_json::json!({"id": r.id, "status": r.status})).collect::<Vec<_>>());
    rep.detail = detail(&results);
    Ok(rep)
}

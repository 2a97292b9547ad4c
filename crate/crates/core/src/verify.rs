//! The acceptance checks, one function per criterion. Every check keeps the
//! raw numbers it judged so a failure can be audited.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary_sets::{cantor_generator, ArcSet, WeightFn};
use crate::capacity::{
    capacity, capacity_integral, dense_grid_oracle, energy, weak_type_suite, CapIntegralOptions, CapWeight, CapacityOptions,
    DiscreteMeasure,
};
use crate::compop_diag::{carleson_sweep, compactness_sweep, CarlesonOptions, CompactVerdict, SweepOptions};
use crate::constructions::{build_peak_symbol, build_rec_pipeline, check_lemma_norme, check_theorem_thnorme, GrowthFn, RecOptions};
use crate::error::{Error, Result};
use crate::hs_diag::{hs_dirichlet, hs_hardy, HsOptions, HsVerdict};
use crate::quadrature::{Angular, DiscRule, Verdict};
use crate::series::PowerSeries;
use crate::spaces::{dirichlet_integral, kernel_integral, peaked_rule, reproducing_residual, test_function_norm_pow, SpaceParams, TestFunction};
use crate::symbols::SymbolSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: String,
    pub status: Status,
    pub metrics: Vec<Metric>,
    pub notes: Vec<String>,
}

impl CriterionResult {
    fn new(id: u8, title: &str) -> Self {
        CriterionResult { id, title: title.to_string(), status: Status::Pass, metrics: Vec::new(), notes: Vec::new() }
    }

    fn metric(&mut self, name: impl Into<String>, value: f64) {
        self.metrics.push(Metric { name: name.into(), value });
    }

    /// Records a requirement; the first failure makes the criterion fail.
    fn require(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.status = Status::Fail;
            self.notes.push(format!("failed: {}", what.into()));
        }
    }

    fn inconclusive(&mut self, what: impl Into<String>) {
        if self.status == Status::Pass {
            self.status = Status::Inconclusive;
        }
        self.notes.push(format!("inconclusive: {}", what.into()));
    }

    /// One summary line.
    pub fn line(&self) -> String {
        let status = match self.status {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        };
        let detail = if self.notes.is_empty() { String::new() } else { format!(" ({})", self.notes.join("; ")) };
        format!("{status} criterion {:>2}: {}{detail}", self.id, self.title)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    /// Ratio constant for the two-sided checks.
    pub c: f64,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { c: 20.0, seed: 20_240_601 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    Identities,
    Asymptotics,
    Capacity,
    Constructions,
    All,
}

impl Suite {
    pub fn criteria(&self) -> Vec<u8> {
        match self {
            Suite::Identities => vec![1, 2, 5, 6],
            Suite::Asymptotics => vec![3, 4, 7],
            Suite::Capacity => vec![8, 9],
            Suite::Constructions => vec![10, 11, 12],
            Suite::All => (1..=12).collect(),
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Vec<CriterionResult> {
    suite.criteria().into_iter().map(|id| run_criterion(id, opts)).collect()
}

/// Runs one criterion; errors inside a check are reported as failures.
pub fn run_criterion(id: u8, opts: &VerifyOptions) -> CriterionResult {
    let out = match id {
        1 => criterion_1(),
        2 => criterion_2(),
        3 => criterion_3(opts),
        4 => criterion_4(opts),
        5 => criterion_5(opts),
        6 => criterion_6(),
        7 => criterion_7(),
        8 => criterion_8(),
        9 => criterion_9(opts),
        10 => criterion_10(),
        11 => criterion_11(opts),
        12 => criterion_12(),
        _ => Err(Error::InvalidSpec(format!("no criterion {id}"))),
    };
    out.unwrap_or_else(|e| {
        let mut r = CriterionResult::new(id, "error");
        r.require(false, e.to_string());
        r
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}

fn within(x: f64, c: f64) -> bool {
    x >= 1.0 / c && x <= c
}

fn hs_opts() -> HsOptions {
    HsOptions { grid: 1 << 12, order: 1024, n_max: 1024, ..Default::default() }
}

fn criterion_1() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(1, "HS identity on D for Scale(r): integral and series routes equal r²/(1-r²)");
    for s in [0.3, 0.6, 0.9] {
        let start = Instant::now();
        let rep = hs_dirichlet(&SymbolSpec::Scale { r: s }.compile()?, &hs_opts())?;
        let secs = start.elapsed().as_secs_f64();
        let exact = s * s / (1.0 - s * s);
        for name in ["integral", "series"] {
            let v = rep.route(name).and_then(|x| x.value);
            let err = v.map_or(f64::INFINITY, |v| rel(v, exact));
            r.metric(format!("r={s} {name} rel_err"), err);
            r.require(err <= 1e-6, format!("r = {s}, {name} route: relative error {err:e}"));
        }
        r.metric(format!("r={s} seconds"), secs);
        r.require(secs <= 10.0, format!("r = {s} took {secs:.1} s"));
    }
    Ok(r)
}

fn criterion_2() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(2, "HS identity on H² for Scale(r): boundary, series and layer-cake routes equal 1/(1-r²)");
    for s in [0.3, 0.6, 0.9] {
        let rep = hs_hardy(&SymbolSpec::Scale { r: s }.compile()?, &hs_opts())?;
        let exact = 1.0 / (1.0 - s * s);
        let values = [
            ("boundary", rep.route("boundary-integral").and_then(|x| x.value)),
            ("series", rep.route("series").and_then(|x| x.value)),
            ("layer-cake", rep.layer_cake),
        ];
        for (name, v) in values {
            let err = v.map_or(f64::INFINITY, |v| rel(v, exact));
            r.metric(format!("r={s} {name} rel_err"), err);
            r.require(err <= 1e-6, format!("r = {s}, {name}: relative error {err:e}"));
        }
    }
    Ok(r)
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| lo * (hi / lo).powf(k as f64 / (n - 1) as f64)).collect()
}

fn criterion_3(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(3, "test-function norms comparable to (1-|λ|²)^{-pδ}");
    let start = Instant::now();
    for (p, a, b) in [(2.0, 0.0, 0.0), (2.0, 1.0, 0.0), (3.0, 0.0, 1.0)] {
        let params = SpaceParams::new(p, a, b)?;
        let delta = params.delta();
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for eps in log_grid(1e-3, 0.5, 10) {
            let lam = 1.0 - eps;
            let tf = TestFunction::new(Complex64::new(lam, 0.0), b)?;
            let norm = test_function_norm_pow(&tf, &params, &peaked_rule(a, eps)?)?;
            let ratio = norm * (1.0 - lam * lam).powf(p * delta);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        r.metric(format!("(p,α,β)=({p},{a},{b}) min ratio"), lo);
        r.metric(format!("(p,α,β)=({p},{a},{b}) max ratio"), hi);
        r.require(within(lo, opts.c) && within(hi, opts.c), format!("({p},{a},{b}): ratio range [{lo:.3}, {hi:.3}] outside [1/{}, {}]", opts.c, opts.c));
    }
    let secs = start.elapsed().as_secs_f64();
    r.metric("seconds", secs);
    r.require(secs <= 60.0, format!("took {secs:.1} s"));
    Ok(r)
}

fn criterion_4(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(4, "kernel integral ∫dA_c/|1-zλ̄|^{2+c+d} comparable to (1-|z|²)^{-d}");
    for (c, d) in [(0.0, 1.0), (0.0, 2.0), (1.0, 2.0)] {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (k, rho) in [0.0, 0.3, 0.6, 0.9, 0.97, 0.99, 0.997, 0.999].into_iter().enumerate() {
            let z = Complex64::from_polar(rho, 0.7 * k as f64);
            let v = kernel_integral(z, c, d, &peaked_rule(c, (1.0 - rho).max(1e-3))?)?;
            let ratio = v * (1.0 - rho * rho).powf(d);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        r.metric(format!("(c,d)=({c},{d}) min ratio"), lo);
        r.metric(format!("(c,d)=({c},{d}) max ratio"), hi);
        r.require(within(lo, opts.c) && within(hi, opts.c), format!("({c},{d}): ratio range [{lo:.3}, {hi:.3}]"));
    }
    Ok(r)
}

fn criterion_5(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(5, "reproducing formula residual ≤ 1e-7 for polynomials of degree ≤ 8");
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for alpha in [0.0, 1.0] {
        let rule = DiscRule::gauss(alpha, 128, Angular::Fixed(512))?;
        let mut worst: f64 = 0.0;
        for _ in 0..50 {
            let deg = rng.gen_range(0..=8usize);
            let coeffs: Vec<Complex64> = (0..=deg).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let f = PowerSeries::new(coeffs)?;
            let z = Complex64::from_polar(0.9 * rng.gen::<f64>().sqrt(), rng.gen_range(0.0..TAU));
            worst = worst.max(reproducing_residual(&f, alpha, z, &rule)?);
        }
        r.metric(format!("α={alpha} max residual"), worst);
        r.require(worst <= 1e-7, format!("α = {alpha}: residual {worst:e}"));
    }
    Ok(r)
}

fn criterion_6() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(6, "D((rz)ⁿ) = n r²ⁿ; compactness sweep verdicts for Scale(0.5), identity, Blaschke");
    let mut worst: f64 = 0.0;
    for s in [0.5f64, 0.9, 0.99] {
        for n in 1..=100usize {
            let f = PowerSeries::monomial(n, n).scale(Complex64::new(s.powi(n as i32), 0.0));
            let exact = n as f64 * s.powi(2 * n as i32);
            worst = worst.max(rel(dirichlet_integral(&f), exact));
        }
    }
    r.metric("max relative error", worst);
    r.require(worst <= 1e-10, format!("sequence error {worst:e}"));
    let params = SpaceParams::dirichlet();
    let cases = [
        ("Scale(0.5)", SymbolSpec::Scale { r: 0.5 }, CompactVerdict::CompactEvidence),
        ("identity", SymbolSpec::Identity, CompactVerdict::NotCompactEvidence),
        ("Blaschke(0.5)", SymbolSpec::blaschke(&[0.5]), CompactVerdict::NotCompactEvidence),
    ];
    for (name, spec, want) in cases {
        let sweep = compactness_sweep(&spec.compile()?, params, &SweepOptions::default())?;
        if let Some(t) = sweep.trend {
            r.metric(format!("{name} slope"), t.slope);
            r.metric(format!("{name} variation"), t.variation);
        }
        let got = sweep.compact();
        r.require(got == want, format!("{name}: {got:?}, expected {want:?}"));
    }
    Ok(r)
}

fn criterion_7() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(7, "Carleson quotients: identity flat, Power(2) twice the identity, Scale(0.5) vanishing");
    let opts = CarlesonOptions::default();
    let id = carleson_sweep(&SymbolSpec::Identity.compile()?, &opts)?;
    let sq = carleson_sweep(&SymbolSpec::Power { n: 2 }.compile()?, &opts)?;
    let sc = carleson_sweep(&SymbolSpec::Scale { r: 0.5 }.compile()?, &opts)?;
    let tail: Vec<f64> = id.rows.iter().rev().take(5).map(|x| x.quotient).collect();
    let (mn, mx) = tail.iter().fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(*v), b.max(*v)));
    r.metric("identity variation over four octaves", mx / mn - 1.0);
    r.require(mx / mn - 1.0 <= 0.10, format!("identity varies by {:.3}", mx / mn - 1.0));
    for (a, b) in id.rows.iter().zip(&sq.rows) {
        let ratio = b.quotient / (2.0 * a.quotient);
        r.metric(format!("|I|={:.4} Power(2)/(2·identity)", a.box_length), ratio);
        r.require(within(ratio, 2.1), format!("Power(2) ratio {ratio:.3} at |I| = {:.4}", a.box_length));
    }
    let last = sc.rows.last().map_or(f64::INFINITY, |x| x.quotient);
    r.metric("Scale(0.5) last quotient", last);
    let vanishing = sc.compact() == CompactVerdict::CompactEvidence || last <= 1e-12 * mn;
    r.require(vanishing, format!("Scale(0.5) quotient {last:e} does not vanish"));
    Ok(r)
}

fn criterion_8() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(8, "capacity engine: full circle, single point, arc oracle, rotation invariance");
    let m = 1024;
    let lebesgue = energy(&DiscreteMeasure::equispaced(m)?, 0.0, PI / m as f64)?.energy.value();
    let full = capacity(&ArcSet::full(), 0.0, &CapacityOptions::with_atoms(m))?;
    r.metric("full circle energy (equispaced cells)", lebesgue);
    r.metric("full circle energy (engine)", full.energy.value());
    r.require(lebesgue.abs() <= 1e-6 && full.energy.value().abs() <= 1e-6, "full-circle energy above 1e-6");
    let point = capacity(&ArcSet::points(&[0.0]), 0.0, &CapacityOptions::with_atoms(m))?;
    r.metric("single point capacity", point.value.value());
    r.metric("single point energy", point.energy.value());
    r.require(point.value.value() < 0.05 && point.energy.value() >= 20.0, "single-point capacity not below 0.05");
    let len = PI / 2.0;
    let arc = capacity(&ArcSet::arc(0.3, len), 0.0, &CapacityOptions::with_atoms(512))?;
    let oracle = 1.0 / dense_grid_oracle(len, 512, 1 << 16)?;
    let gap = rel(arc.value.value(), oracle);
    r.metric("arc π/2 capacity", arc.value.value());
    r.metric("dense-grid oracle", oracle);
    r.metric("relative gap", gap);
    r.require(gap <= 0.02, format!("arc capacity off the oracle by {gap:.4}"));
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let atoms: Vec<f64> = (0..64).map(|_| rng.gen_range(0.0..TAU)).collect();
    let weights: Vec<f64> = (0..64).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mu = DiscreteMeasure::new(atoms, weights.iter().map(|w| w / total).collect())?;
    let e0 = energy(&mu, 0.0, 1e-3)?.energy.value();
    let drift = [0.1, 1.0, 2.5, 5.0]
        .iter()
        .map(|a| energy(&mu.rotate(*a), 0.0, 1e-3).map(|e| (e.energy.value() - e0).abs()))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    r.metric("rotation drift", drift);
    r.require(drift <= 1e-12, format!("rotation changes the energy by {drift:e}"));
    Ok(r)
}

fn criterion_9(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(9, "weak-type capacity inequality on 50 random admissible pairs");
    let reports = weak_type_suite(opts.seed, 50, &CapacityOptions { atoms: 128, sequence: false, ..Default::default() })?;
    let violations = reports.iter().filter(|x| !x.holds).count();
    let nonempty = reports.iter().filter(|x| x.set_measure > 0.0).count();
    let worst = reports.iter().map(|x| x.lhs.value() / x.rhs).fold(0.0, f64::max);
    r.metric("violations", violations as f64);
    r.metric("nonempty superlevel sets", nonempty as f64);
    r.metric("max lhs/rhs", worst);
    r.require(reports.len() == 50 && violations == 0, format!("{violations} violations"));
    Ok(r)
}

fn criterion_10() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(10, "peak construction: HS certificate, ‖g‖² against πΣτ²ℓ, shrinking level sets");
    let sets = [
        ("point", ArcSet::points(&[0.0])),
        ("two points", ArcSet::points(&[0.0, PI])),
        ("Cantor k=8", cantor_generator(&[1.0 / 3.0], 8)?.collapse_to_points()),
    ];
    for (name, set) in sets {
        let pc = build_peak_symbol(&set, 1 << 16)?;
        r.metric(format!("{name} certificate"), pc.certificate);
        r.metric(format!("{name} measured"), pc.measured);
        r.require(pc.certificate_holds(), format!("{name}: measured {} above certificate {}", pc.measured, pc.certificate));
        let stated = pc.g_l2_grid / pc.g_l2_stated;
        let exact = pc.g_l2_grid / pc.g_l2_exact;
        r.metric(format!("{name} ‖g‖²/(πΣτ²ℓ)"), stated);
        r.metric(format!("{name} ‖g‖²/((π/2)Στ²ℓ)"), exact);
        r.require((stated - 1.0).abs() <= 0.05, format!("{name}: ‖g‖² is {stated:.4} × πΣτ²ℓ"));
        if (exact - 1.0).abs() > 0.05 {
            r.notes.push(format!("{name}: ‖g‖² also misses (π/2)Στ²ℓ ({exact:.4})"));
        }
        let last = pc.level_measures.last().map_or(f64::NAN, |x| x.1);
        r.metric(format!("{name} |E_φ(1-1e-6)|"), last);
        r.require(pc.level_sets_shrink(), format!("{name}: level sets do not shrink: {:?}", pc.level_measures));
    }
    Ok(r)
}

fn criterion_11(opts: &VerifyOptions) -> Result<CriterionResult> {
    let mut r = CriterionResult::new(11, "Dirichlet two-sided estimate for outer symbols and the HS integral test");
    let point = ArcSet::points(&[0.0]);
    let lemma_cases = [
        ("(log eπ/t)^-2, {1}", WeightFn::LogInversePower { c: 1.0, b: 2.0 }, point.clone()),
        ("(log eπ/t)^-1, Cantor k=6", WeightFn::LogInversePower { c: 1.0, b: 1.0 }, cantor_generator(&[1.0 / 3.0], 6)?),
        ("constant, {1}", WeightFn::Constant { c: 1.0 }, point.clone()),
    ];
    for (name, w, set) in lemma_cases {
        let rep = check_lemma_norme(&set, &w, 3.0, 1 << 16)?;
        if let Some(x) = rep.ratio_series {
            r.metric(format!("lemma {name} ratio (coefficients)"), x);
        }
        if let Some(x) = rep.ratio_boundary {
            r.metric(format!("lemma {name} ratio (boundary formula)"), x);
        }
        r.require(rep.within(opts.c), format!("lemma {name}: ratios {:?} / {:?}", rep.ratio_series, rep.ratio_boundary));
    }
    let theorem_cases = [
        ("(log eπ/t)^-2, {1}", WeightFn::LogInversePower { c: 1.0, b: 2.0 }),
        ("t, {1}", WeightFn::Power { c: 1.0, a: 1.0 }),
        ("constant, {1}", WeightFn::Constant { c: 1.0 }),
    ];
    for (name, w) in theorem_cases {
        let rep = check_theorem_thnorme(&point, &w, 1 << 12, &HsOptions::default())?;
        r.metric(format!("theorem {name} integral partial"), rep.integral.last_partial());
        r.notes.push(format!("theorem {name}: integral {:?}, HS {:?}", rep.integral.verdict, rep.hs.verdict));
        r.require(rep.agree, format!("theorem {name}: verdicts disagree"));
    }
    if r.status == Status::Pass {
        r.notes.clear();
    }
    Ok(r)
}

fn criterion_12() -> Result<CriterionResult> {
    let mut r = CriterionResult::new(12, "HS on D implies a convergent capacity integral; the h-weighted pipeline diverges");
    let suite = [
        ("Scale(0.3)", SymbolSpec::Scale { r: 0.3 }),
        ("Scale(0.9)", SymbolSpec::Scale { r: 0.9 }),
        (
            "outer (log eπ/t)^-2 at {1}",
            SymbolSpec::Outer { set: ArcSet::points(&[0.0]), weight: WeightFn::LogInversePower { c: 1.0, b: 2.0 }, grid: 1 << 12 },
        ),
        ("Blaschke(0.5)", SymbolSpec::blaschke(&[0.5])),
    ];
    let cap_opts = CapIntegralOptions::default();
    for (name, spec) in suite {
        let phi = spec.compile()?;
        let hs = hs_dirichlet(&phi, &hs_opts())?;
        let cap = capacity_integral(&phi, 0.0, CapWeight::Log, &cap_opts)?;
        r.metric(format!("{name} capacity partial"), cap.panels.last_partial());
        let inner = name.starts_with("Blaschke");
        match hs.verdict {
            HsVerdict::FiniteEvidence => {
                r.require(!inner, format!("{name}: HS finite for an inner function"));
                r.require(cap.verdict() == Verdict::Converging, format!("{name}: HS finite but capacity integral {:?}", cap.verdict()));
            }
            HsVerdict::InfiniteEvidence => {
                r.require(inner, format!("{name}: HS infinite"));
                if inner {
                    r.require(cap.verdict() == Verdict::Diverging, format!("{name}: capacity integral {:?}", cap.verdict()));
                }
            }
            HsVerdict::Inconclusive => r.inconclusive(format!("{name}: HS verdict inconclusive")),
        }
    }
    let rec = build_rec_pipeline(&ArcSet::points(&[0.0]), &GrowthFn::OnePlusLog, &RecOptions::default())?;
    r.metric("pipeline D(f) partial", rec.membership.douglas.last_partial());
    r.metric("pipeline max |φ'|²(1-|φ|²)^-2/|f'|²", rec.hs.max_ratio);
    r.metric("pipeline weighted capacity partial", rec.capacity.weighted.last_partial());
    r.metric("pipeline unweighted capacity partial", rec.capacity.unweighted.last_partial());
    r.metric("pipeline inclusion violations", rec.capacity.inclusion_violations as f64);
    r.require(
        rec.membership.douglas.verdict == Verdict::Converging || rec.membership.divergence_flag,
        "pipeline (a): neither converging partials nor a divergence flag",
    );
    r.require(rec.hs.verdict == HsVerdict::FiniteEvidence, format!("pipeline (b): HS {:?}", rec.hs.verdict));
    r.require(rec.capacity.weighted.verdict == Verdict::Diverging, format!("pipeline (c): weighted {:?}", rec.capacity.weighted.verdict));
    r.require(rec.capacity.unweighted.verdict == Verdict::Converging, format!("pipeline: unweighted {:?}", rec.capacity.unweighted.verdict));
    r.require(rec.capacity.inclusion_violations == 0, "pipeline: level-set inclusion violated on the grid");
    Ok(r)
}

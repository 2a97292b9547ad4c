//! The run configuration and the shorthand parsers for symbols, sets, weights
//! and growth functions.

use std::path::{Path, PathBuf};

use compop_core::boundary_sets::{cantor_generator, Arc, ArcSet, WeightFn};
use compop_core::constructions::GrowthFn;
use compop_core::verify::Suite;
use compop_core::{Complex64, SymbolSpec};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Norms,
    Diag,
    Hs,
    Capacity,
    ConstructPeak,
    ConstructOuter,
    ConstructRec,
    Verify,
}

impl CommandKind {
    pub fn name(&self) -> &'static str {
        match self {
            CommandKind::Norms => "norms",
            CommandKind::Diag => "diag",
            CommandKind::Hs => "hs",
            CommandKind::Capacity => "capacity",
            CommandKind::ConstructPeak => "construct-peak",
            CommandKind::ConstructOuter => "construct-outer",
            CommandKind::ConstructRec => "construct-rec",
            CommandKind::Verify => "verify",
        }
    }
}

/// Function space selector. `diag` needs `besov` (or `d`), `hs` takes
/// `h2`, `d` or `d-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SpaceArg {
    H2,
    D,
    DAlpha { alpha: f64 },
    Besov { p: f64, alpha: f64, beta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Output {
    #[serde(default)]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

/// Grid sizes. Missing entries take per-command defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Grids {
    /// Boundary grid `M` (power of two).
    #[serde(default)]
    pub m: Option<usize>,
    /// Taylor order `N` of series routes (power of two).
    #[serde(default)]
    pub n: Option<usize>,
    /// Number of powers `φⁿ` in `norms`.
    #[serde(default)]
    pub n_max: Option<usize>,
    /// Atom budget of the capacity solver.
    #[serde(default)]
    pub atoms: Option<usize>,
    /// `1 - |λ| = 2^{-1..=octaves}` in `diag`.
    #[serde(default)]
    pub lambda_octaves: Option<usize>,
    /// Rays per scale in `diag`.
    #[serde(default)]
    pub rays: Option<usize>,
    /// `1 - s = 2^{-1..=levels}` in `capacity --symbol`.
    #[serde(default)]
    pub s_levels: Option<usize>,
    /// Dyadic levels toward the set in distance-profile integrals.
    #[serde(default)]
    pub t_levels: Option<usize>,
}

fn default_c() -> f64 {
    20.0
}

fn default_seed() -> u64 {
    20_240_601
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symbol: Option<SymbolSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub set: Option<ArcSet>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<WeightFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthFn>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub space: Option<SpaceArg>,
    /// Capacity order `α` in `capacity`.
    #[serde(default)]
    pub alpha: f64,
    /// Concavity exponent `γ` for the outer-function checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(default)]
    pub grids: Grids,
    #[serde(default)]
    pub output: Output,
    #[serde(default = "default_c")]
    pub ratio_constant: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub strict: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suite: Option<Suite>,
    /// Explicit criterion ids for `verify`; overrides `suite`.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub criteria: Vec<u8>,
    /// `construct-outer`: refuse weights that fail the Dini test.
    #[serde(default)]
    pub require_disc_algebra: bool,
    /// `construct-outer`: also run the Dirichlet estimate and the HS test.
    #[serde(default)]
    pub checks: bool,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        RunConfig {
            command,
            symbol: None,
            set: None,
            weight: None,
            growth: None,
            space: None,
            alpha: 0.0,
            gamma: None,
            grids: Grids::default(),
            output: Output::default(),
            ratio_constant: default_c(),
            seed: default_seed(),
            strict: false,
            suite: None,
            criteria: Vec::new(),
            require_disc_algebra: false,
            checks: false,
        }
    }

    /// Checks that need the whole config; errors carry the field path.
    pub fn validate(&self) -> Result<(), String> {
        let need = |present: bool, field: &str| if present { Ok(()) } else { Err(format!("{field}: required by `{}`", self.command.name())) };
        match self.command {
            CommandKind::Norms | CommandKind::Diag | CommandKind::Hs => need(self.symbol.is_some(), "symbol")?,
            CommandKind::Capacity => {
                if self.symbol.is_some() == self.set.is_some() {
                    return Err("set | symbol: `capacity` takes exactly one of them".into());
                }
            }
            CommandKind::ConstructPeak => need(self.set.is_some(), "set")?,
            CommandKind::ConstructOuter => {
                need(self.set.is_some(), "set")?;
                need(self.weight.is_some(), "weight")?;
            }
            CommandKind::ConstructRec => need(self.set.is_some(), "set")?,
            CommandKind::Verify => {}
        }
        let g = &self.grids;
        for (name, v, pow2) in [
            ("grids.m", g.m, true),
            ("grids.n", g.n, true),
            ("grids.n_max", g.n_max, false),
            ("grids.atoms", g.atoms, false),
            ("grids.lambda_octaves", g.lambda_octaves, false),
            ("grids.rays", g.rays, false),
            ("grids.s_levels", g.s_levels, false),
            ("grids.t_levels", g.t_levels, false),
        ] {
            if let Some(v) = v {
                if v == 0 {
                    return Err(format!("{name}: must be positive"));
                }
                if pow2 && !v.is_power_of_two() {
                    return Err(format!("{name}: {v} is not a power of two"));
                }
            }
        }
        if !(self.ratio_constant >= 1.0) || !self.ratio_constant.is_finite() {
            return Err(format!("ratio_constant: {} must be a finite number >= 1", self.ratio_constant));
        }
        if let Some(space) = self.space {
            match (self.command, space) {
                (CommandKind::Diag, SpaceArg::Besov { p, alpha, beta }) => {
                    let delta = 2.0 + beta - (2.0 + alpha) / p;
                    if !(delta > 0.0) {
                        return Err(format!("space: delta = 2 + beta - (2+alpha)/p = {delta} must be positive"));
                    }
                }
                (CommandKind::Diag, SpaceArg::D) => {}
                (CommandKind::Diag, _) => return Err("space: `diag` takes a Besov space p=..,alpha=..,beta=.. or D".into()),
                (CommandKind::Hs, SpaceArg::Besov { .. }) => return Err("space: `hs` takes H2, D or alpha=..".into()),
                _ => {}
            }
        }
        for id in &self.criteria {
            if !(1..=12).contains(id) {
                return Err(format!("criteria: {id} is not a criterion id (1..=12)"));
            }
        }
        Ok(())
    }
}

/// Parses a config file, reporting the failing field path.
pub fn load_config(path: &Path) -> Result<RunConfig, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    parse_config(&text)
}

pub fn parse_config(text: &str) -> Result<RunConfig, String> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("{path}: {}", e.into_inner())
    })?;
    Ok(normalize(cfg))
}

/// Arc sets read from JSON skip the constructor, so merge them here.
fn normalize(mut cfg: RunConfig) -> RunConfig {
    if let Some(set) = cfg.set.take() {
        cfg.set = Some(ArcSet::new(set.arcs().to_vec()));
    }
    cfg
}

// ---------------------------------------------------------------------------
// shorthands

fn floats(s: &str, what: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|x| x.trim().parse::<f64>().map_err(|_| format!("{what}: `{x}` is not a number"))).collect()
}

fn one(s: &str, what: &str) -> Result<f64, String> {
    match floats(s, what)?.as_slice() {
        [x] => Ok(*x),
        _ => Err(format!("{what}: expected one number, got `{s}`")),
    }
}

/// Inline JSON or a path to a JSON file.
fn json_arg<T: serde::de::DeserializeOwned>(s: &str, what: &str) -> Option<Result<T, String>> {
    let text = if s.trim_start().starts_with('{') || s.trim_start().starts_with('[') {
        s.to_string()
    } else if Path::new(s).is_file() {
        match std::fs::read_to_string(s) {
            Ok(t) => t,
            Err(e) => return Some(Err(format!("{what}: {s}: {e}"))),
        }
    } else {
        return None;
    };
    let de = &mut serde_json::Deserializer::from_str(&text);
    Some(serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        format!("{what}.{path}: {}", e.into_inner())
    }))
}

/// `identity`, `scale:r`, `power:n`, `moebius:a`, `blaschke:a1,a2,..`,
/// `rotation:γ`, `affine:c0,c1`, or JSON.
pub fn parse_symbol(s: &str) -> Result<SymbolSpec, String> {
    if let Some(r) = json_arg(s, "symbol") {
        return r;
    }
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let spec = match head {
        "identity" | "id" => SymbolSpec::Identity,
        "scale" => SymbolSpec::Scale { r: one(rest, "symbol")? },
        "power" => {
            let n: u32 = rest.trim().parse().map_err(|_| format!("symbol: `{rest}` is not a positive integer"))?;
            SymbolSpec::Power { n }
        }
        "moebius" => SymbolSpec::moebius(one(rest, "symbol")?),
        "blaschke" => SymbolSpec::blaschke(&floats(rest, "symbol")?),
        "rotation" => SymbolSpec::rotation(one(rest, "symbol")?),
        "affine" => match floats(rest, "symbol")?.as_slice() {
            [c0, c1] => SymbolSpec::Affine { c0: Complex64::new(*c0, 0.0), c1: Complex64::new(*c1, 0.0) },
            _ => return Err("symbol: affine takes `affine:c0,c1`".into()),
        },
        _ => return Err(format!("symbol: unknown shorthand `{s}` (and not a JSON file)")),
    };
    Ok(spec)
}

/// `point:θ`, `points:θ1,θ2,..`, `arc:start,len`, `full`, `cantor:k[,r]`
/// (middle-thirds when `r` is omitted), or JSON.
pub fn parse_set(s: &str) -> Result<ArcSet, String> {
    if let Some(r) = json_arg::<ArcSet>(s, "set") {
        return r.map(|set| ArcSet::new(set.arcs().to_vec()));
    }
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    match head {
        "point" => Ok(ArcSet::points(&[one(rest, "set")?])),
        "points" => Ok(ArcSet::points(&floats(rest, "set")?)),
        "arc" => match floats(rest, "set")?.as_slice() {
            [a, l] if *l >= 0.0 => Ok(ArcSet::new(vec![Arc::new(*a, *l)])),
            _ => Err("set: arc takes `arc:start,len` with len >= 0".into()),
        },
        "full" => Ok(ArcSet::full()),
        "cantor" => {
            let v = floats(rest, "set")?;
            let (k, r) = match v.as_slice() {
                [k] => (*k, 1.0 / 3.0),
                [k, r] => (*k, *r),
                _ => return Err("set: cantor takes `cantor:k[,ratio]`".into()),
            };
            if k < 0.0 || k.fract() != 0.0 || k > 24.0 {
                return Err(format!("set: cantor level {k} must be an integer in 0..=24"));
            }
            cantor_generator(&[r], k as usize).map_err(|e| format!("set: {e}"))
        }
        _ => Err(format!("set: unknown shorthand `{s}` (and not a JSON file)")),
    }
}

/// `const:c`, `power:a[,c]`, `loginv:b[,c]`, or JSON.
pub fn parse_weight(s: &str) -> Result<WeightFn, String> {
    if let Some(r) = json_arg(s, "weight") {
        return r;
    }
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    let v = floats(rest, "weight")?;
    match (head, v.as_slice()) {
        ("const", [c]) => Ok(WeightFn::Constant { c: *c }),
        ("power", [a]) => Ok(WeightFn::Power { c: 1.0, a: *a }),
        ("power", [a, c]) => Ok(WeightFn::Power { c: *c, a: *a }),
        ("loginv", [b]) => Ok(WeightFn::LogInversePower { c: 1.0, b: *b }),
        ("loginv", [b, c]) => Ok(WeightFn::LogInversePower { c: *c, b: *b }),
        _ => Err(format!("weight: unknown shorthand `{s}`")),
    }
}

/// `log`, `loglog`, `power:p`, `const:c`, or JSON.
pub fn parse_growth(s: &str) -> Result<GrowthFn, String> {
    if let Some(r) = json_arg(s, "growth") {
        return r;
    }
    let (head, rest) = s.split_once(':').unwrap_or((s, ""));
    match head {
        "log" => Ok(GrowthFn::OnePlusLog),
        "loglog" => Ok(GrowthFn::LogLog),
        "power" => Ok(GrowthFn::Power { p: one(rest, "growth")? }),
        "const" => Ok(GrowthFn::Constant { c: one(rest, "growth")? }),
        _ => Err(format!("growth: unknown shorthand `{s}`")),
    }
}

/// `D`, `H2`, `alpha=a` (the weighted space `𝒟_α`) or
/// `p=..,alpha=..,beta=..` (missing keys default to `2, 0, 0`).
pub fn parse_space(s: &str) -> Result<SpaceArg, String> {
    match s.trim() {
        "D" | "d" => return Ok(SpaceArg::D),
        "H2" | "h2" => return Ok(SpaceArg::H2),
        _ => {}
    }
    let (mut p, mut alpha, mut beta) = (None, None, None);
    for kv in s.split(',') {
        let (k, v) = kv.split_once('=').ok_or_else(|| format!("space: `{kv}` is not key=value"))?;
        let v: f64 = v.trim().parse().map_err(|_| format!("space.{}: `{v}` is not a number", k.trim()))?;
        match k.trim() {
            "p" => p = Some(v),
            "alpha" => alpha = Some(v),
            "beta" => beta = Some(v),
            other => return Err(format!("space: unknown key `{other}`")),
        }
    }
    match (p, alpha, beta) {
        (None, Some(alpha), None) => Ok(SpaceArg::DAlpha { alpha }),
        (p, alpha, beta) => Ok(SpaceArg::Besov { p: p.unwrap_or(2.0), alpha: alpha.unwrap_or(0.0), beta: beta.unwrap_or(0.0) }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthands() {
        assert_eq!(parse_symbol("scale:0.5").unwrap(), SymbolSpec::Scale { r: 0.5 });
        assert_eq!(parse_symbol("identity").unwrap(), SymbolSpec::Identity);
        assert!(parse_symbol("scale:x").is_err());
        assert_eq!(parse_set("point:0").unwrap(), ArcSet::points(&[0.0]));
        let c = parse_set("cantor:3").unwrap();
        assert!((c.measure() - std::f64::consts::TAU * (8.0 / 27.0)).abs() < 1e-12);
        assert_eq!(parse_weight("loginv:2").unwrap(), WeightFn::LogInversePower { c: 1.0, b: 2.0 });
        assert_eq!(parse_growth("log").unwrap(), GrowthFn::OnePlusLog);
        assert_eq!(parse_space("p=2,alpha=0,beta=0").unwrap(), SpaceArg::Besov { p: 2.0, alpha: 0.0, beta: 0.0 });
        assert_eq!(parse_space("alpha=0.5").unwrap(), SpaceArg::DAlpha { alpha: 0.5 });
        assert_eq!(parse_space("H2").unwrap(), SpaceArg::H2);
    }

    #[test]
    fn json_symbol() {
        let s = parse_symbol(r#"{"type":"scale","r":0.25}"#).unwrap();
        assert_eq!(s, SymbolSpec::Scale { r: 0.25 });
    }

    #[test]
    fn config_errors_name_the_field() {
        let e = parse_config(r#"{"command":"hs","symbol":{"type":"scale","r":"x"}}"#).unwrap_err();
        assert!(e.starts_with("symbol"), "{e}");
        let e = parse_config(r#"{"command":"hs","grids":{"m":3}}"#).unwrap().validate().unwrap_err();
        assert!(e.starts_with("symbol"), "{e}");
        let mut cfg = parse_config(r#"{"command":"hs","symbol":{"type":"identity"},"grids":{"m":3}}"#).unwrap();
        assert!(cfg.validate().unwrap_err().starts_with("grids.m"));
        cfg.grids.m = Some(1024);
        assert!(cfg.validate().is_ok());
        let e = parse_config(r#"{"command":"hs","bogus":1}"#).unwrap_err();
        assert!(e.contains("bogus"), "{e}");
    }

    #[test]
    fn config_round_trip() {
        let mut cfg = RunConfig::new(CommandKind::Capacity);
        cfg.set = Some(ArcSet::points(&[0.0, 1.0]));
        let text = serde_json::to_string(&cfg).unwrap();
        assert_eq!(parse_config(&text).unwrap(), cfg);
    }

    #[test]
    fn schema_lists_every_field() {
        let schema: serde_json::Value = serde_json::from_str(include_str!("../../../docs/schema/run_config.schema.json")).unwrap();
        let props = schema["properties"].as_object().unwrap();
        let mut cfg = RunConfig::new(CommandKind::ConstructOuter);
        cfg.symbol = Some(SymbolSpec::Identity);
        cfg.set = Some(ArcSet::points(&[0.0]));
        cfg.weight = Some(WeightFn::Constant { c: 1.0 });
        cfg.growth = Some(GrowthFn::OnePlusLog);
        cfg.space = Some(SpaceArg::D);
        cfg.gamma = Some(0.5);
        cfg.suite = Some(Suite::All);
        cfg.criteria = vec![1];
        let v = serde_json::to_value(&cfg).unwrap();
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys.len(), props.len());
        for k in keys {
            assert!(props.contains_key(k), "{k} missing from the schema");
        }
        let grids = serde_json::to_value(Grids::default()).unwrap();
        let gprops = props["grids"]["properties"].as_object().unwrap();
        assert_eq!(grids.as_object().unwrap().len(), gprops.len());
        assert!(grids.as_object().unwrap().keys().all(|k| gprops.contains_key(k)));
    }
}

//! Experiment configuration: schema, `key=value` overrides and validation.

use std::fmt;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use sadic_core::approx::ApproxFunction;
use sadic_core::arith::{self, parse_rational};
use sadic_core::lattice::MinimaStrategy;
use sadic_core::measure::{GoodConstants, MeasureOptions, DEFAULT_DEPTH_CAP};
use sadic_core::ubiquity::UbiquityConfig;
use sadic_core::{PAdicBall, Poly};

use crate::expr::parse_poly;

pub const OUT_DIR_ENV: &str = "SADIC_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Dichotomy,
    GoodCertify,
    LatticeAudit,
    UbiquityRun,
    SeriesAudit,
    Covering,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Dichotomy => "dichotomy",
            Kind::GoodCertify => "good-certify",
            Kind::LatticeAudit => "lattice-audit",
            Kind::UbiquityRun => "ubiquity-run",
            Kind::SeriesAudit => "series-audit",
            Kind::Covering => "covering",
        }
    }

    fn section(self) -> &'static str {
        match self {
            Kind::Dichotomy => "dichotomy",
            Kind::GoodCertify => "good_certify",
            Kind::LatticeAudit => "lattice_audit",
            Kind::UbiquityRun => "ubiquity_run",
            Kind::SeriesAudit => "series_audit",
            Kind::Covering => "covering",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Defaults to `$SADIC_OUT_DIR`, then the working directory.
    pub dir: Option<PathBuf>,
    /// File name prefix; defaults to the experiment kind.
    pub stem: Option<String>,
    /// Overrides the kind's default format where both make sense.
    pub format: Option<Format>,
}

/// A map `f : Z_p^m → Z_p^n`; the Veronese curve `(x, x², …, xⁿ)` when `coords` is absent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSpec {
    #[serde(default = "one")]
    pub m: usize,
    pub coords: Option<Vec<String>>,
}

impl Default for MapSpec {
    fn default() -> Self {
        MapSpec { m: 1, coords: None }
    }
}

fn one() -> usize {
    1
}

impl MapSpec {
    pub fn polys(&self, n: usize) -> Result<Vec<Poly>, String> {
        match &self.coords {
            None => Ok((1..=n as u32).map(|k| Poly::var(self.m, 0).pow(k)).collect()),
            Some(cs) => cs.iter().map(|c| parse_poly(c, self.m).map_err(|e| format!("{c:?}: {e}"))).collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DichotomySection {
    pub p: u64,
    pub n: usize,
    /// One CSV per entry; defaults to `k^{-(n+1)}` and `k^{-(n+1)} log^{-2} k`.
    pub psi: Vec<ApproxFunction>,
    pub t_min: u32,
    pub t_max: u32,
    pub fit: [u32; 2],
    pub samples: usize,
}

impl Default for DichotomySection {
    fn default() -> Self {
        DichotomySection { p: 3, n: 2, psi: vec![], t_min: 2, t_max: 17, fit: [8, 17], samples: 1000 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GoodCertifySection {
    pub p: u64,
    pub m: usize,
    /// Components of `f`; the sup norm over components is used.
    pub f: Vec<String>,
    /// Ball centre; zeros when empty.
    pub center: Vec<String>,
    /// Ball radius `p^{-k}`.
    pub k: i64,
    /// Values `M` with `ε = p^{-M}`; a default grid when empty.
    pub eps_grid: Vec<i64>,
    pub depth_cap: u32,
    /// `C` and `α`; both default to the degree-based constants.
    pub c: Option<String>,
    pub alpha: Option<String>,
}

impl Default for GoodCertifySection {
    fn default() -> Self {
        GoodCertifySection {
            p: 5,
            m: 1,
            f: vec!["x^3".into()],
            center: vec![],
            k: 0,
            eps_grid: vec![],
            depth_cap: DEFAULT_DEPTH_CAP,
            c: None,
            alpha: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LatticeAuditSection {
    pub p: u64,
    pub j: u32,
    /// The point `y ∈ Z_p^n` as rationals.
    pub y: Vec<String>,
    pub divisible: bool,
    /// Scales `Q` at which `λ_k = μ_k / Q` is reported.
    pub q: Vec<String>,
    pub strategy: MinimaStrategy,
    pub budget: u64,
    /// Adds the `λ_{n+1} ≤ p^{n+2}/δ` bound to the audit when present.
    pub delta: Option<String>,
}

impl Default for LatticeAuditSection {
    fn default() -> Self {
        LatticeAuditSection {
            p: 3,
            j: 4,
            y: vec!["5".into(), "25".into()],
            divisible: true,
            q: vec!["1".into()],
            strategy: MinimaStrategy::Auto,
            budget: sadic_core::lattice::DEFAULT_BUDGET,
            delta: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct UbiquityRunSection {
    pub p: u64,
    pub n: usize,
    pub map: MapSpec,
    pub theta: String,
    pub q: String,
    pub delta: String,
    pub max_doublings: u32,
    pub precision: Option<u32>,
    /// Random points of `Z_p^m`, truncated to `digits` digits.
    pub samples: usize,
    pub digits: u32,
}

impl Default for UbiquityRunSection {
    fn default() -> Self {
        UbiquityRunSection {
            p: 3,
            n: 2,
            map: MapSpec::default(),
            theta: "0".into(),
            q: "256".into(),
            delta: "1/3".into(),
            max_doublings: 4,
            precision: None,
            samples: 50,
            digits: 30,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeriesAuditSection {
    pub eps: String,
    pub delta: String,
    pub l: usize,
    pub n: usize,
    pub alpha1: String,
    pub horizon: Option<u64>,
    /// Functions for the Borel–Cantelli sums.
    pub psi: Vec<ApproxFunction>,
    pub infinity_in_s: bool,
    pub bc_horizon: u64,
}

impl Default for SeriesAuditSection {
    fn default() -> Self {
        SeriesAuditSection {
            eps: "1/4".into(),
            delta: "1/16".into(),
            l: 1,
            n: 2,
            alpha1: "1".into(),
            horizon: None,
            psi: vec![],
            infinity_in_s: true,
            bc_horizon: 1 << 16,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CoveringSection {
    pub p: u64,
    pub n: usize,
    pub map: MapSpec,
    pub theta: String,
    pub delta: String,
    pub center: Vec<String>,
    pub k: i64,
    pub t_min: u32,
    pub t_max: u32,
    pub samples: usize,
}

impl Default for CoveringSection {
    fn default() -> Self {
        CoveringSection {
            p: 3,
            n: 2,
            map: MapSpec::default(),
            theta: "0".into(),
            delta: "1/3".into(),
            center: vec![],
            k: 0,
            t_min: 2,
            t_max: 8,
            samples: 100,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: Kind,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dichotomy: Option<DichotomySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub good_certify: Option<GoodCertifySection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lattice_audit: Option<LatticeAuditSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ubiquity_run: Option<UbiquityRunSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub series_audit: Option<SeriesAuditSection>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub covering: Option<CoveringSection>,
}

fn default_seed() -> u64 {
    1
}

/// One entry of the machine-readable error list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Issue {
    pub path: String,
    pub message: String,
}

impl fmt::Display for Issue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

fn issue(path: impl Into<String>, message: impl Into<String>) -> Issue {
    Issue { path: path.into(), message: message.into() }
}

/// Parses an override value as a TOML value, falling back to a bare string.
fn override_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<toml::Table>() {
        Ok(mut t) => t.remove("v").unwrap(),
        Err(_) => toml::Value::String(raw.to_string()),
    }
}

fn apply_override(root: &mut toml::Table, spec: &str) -> Result<(), Issue> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| issue(spec, "override must have the form key=value"))?;
    let parts: Vec<&str> = key.trim().split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(issue(key, "empty key segment"));
    }
    let mut table = root;
    for part in &parts[..parts.len() - 1] {
        let entry = table.entry(part.to_string()).or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry.as_table_mut().ok_or_else(|| issue(key, format!("{part} is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), override_value(raw.trim()));
    Ok(())
}

/// Bare keys other than the top-level ones go to the active kind's section.
fn route(spec: &str, section: Option<&str>) -> String {
    let key = spec.split('=').next().unwrap_or("").trim();
    match section {
        Some(sec) if !key.contains('.') && !["kind", "seed", "output"].contains(&key) => format!("{sec}.{}", spec.trim()),
        _ => spec.to_string(),
    }
}

/// Reads `path`, applies overrides and deserializes; the active section is filled with defaults.
pub fn load(path: &Path, overrides: &[String]) -> Result<ExperimentConfig, Vec<Issue>> {
    let text = std::fs::read_to_string(path).map_err(|e| vec![issue(path.display().to_string(), e.to_string())])?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &[String]) -> Result<ExperimentConfig, Vec<Issue>> {
    let mut root: toml::Table = text.parse().map_err(|e: toml::de::Error| vec![issue("<config>", e.message().to_string())])?;
    let section = root
        .get("kind")
        .cloned()
        .and_then(|k| k.try_into::<Kind>().ok())
        .map(Kind::section);
    let errs: Vec<Issue> = overrides
        .iter()
        .map(|o| route(o, section))
        .filter_map(|o| apply_override(&mut root, &o).err())
        .collect();
    if !errs.is_empty() {
        return Err(errs);
    }
    let mut cfg: ExperimentConfig = toml::Value::Table(root).try_into().map_err(|e: toml::de::Error| {
        let path = e.message().to_string();
        vec![issue("<config>", path)]
    })?;
    cfg.fill_defaults();
    Ok(cfg)
}

impl ExperimentConfig {
    fn fill_defaults(&mut self) {
        match self.kind {
            Kind::Dichotomy => {
                let d = self.dichotomy.get_or_insert_with(Default::default);
                if d.psi.is_empty() {
                    let e = d.n as u32 + 1;
                    d.psi = vec![ApproxFunction::power(e as i64), ApproxFunction::PowerLog { e, b: 2 }];
                }
            }
            Kind::GoodCertify => {
                self.good_certify.get_or_insert_with(Default::default);
            }
            Kind::LatticeAudit => {
                self.lattice_audit.get_or_insert_with(Default::default);
            }
            Kind::UbiquityRun => {
                self.ubiquity_run.get_or_insert_with(Default::default);
            }
            Kind::SeriesAudit => {
                let s = self.series_audit.get_or_insert_with(Default::default);
                if s.psi.is_empty() {
                    let e = s.n as i64 + 1;
                    s.psi = vec![ApproxFunction::power(e), ApproxFunction::PowerLog { e: e as u32, b: 2 }];
                }
            }
            Kind::Covering => {
                self.covering.get_or_insert_with(Default::default);
            }
        }
    }

    /// Output directory: the config value, then `$SADIC_OUT_DIR`, then `.`.
    pub fn out_dir(&self) -> PathBuf {
        self.output
            .dir
            .clone()
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."))
    }

    pub fn stem(&self) -> String {
        self.output.stem.clone().unwrap_or_else(|| self.kind.name().to_string())
    }

    /// Checks every parameter against the preconditions of the module it feeds.
    pub fn validate(&self) -> Vec<Issue> {
        let mut v = Vec::new();
        let present = [
            ("dichotomy", self.dichotomy.is_some()),
            ("good_certify", self.good_certify.is_some()),
            ("lattice_audit", self.lattice_audit.is_some()),
            ("ubiquity_run", self.ubiquity_run.is_some()),
            ("series_audit", self.series_audit.is_some()),
            ("covering", self.covering.is_some()),
        ];
        for (name, set) in present {
            if set && name != self.kind.section() {
                v.push(issue(name, format!("section does not belong to kind {}", self.kind.name())));
            }
        }
        if let Some(stem) = &self.output.stem {
            if stem.is_empty() || stem.contains(['/', '\\']) {
                v.push(issue("output.stem", "must be a plain non-empty file name"));
            }
        }
        match self.kind {
            Kind::Dichotomy => validate_dichotomy(self.dichotomy.as_ref().unwrap(), &mut v),
            Kind::GoodCertify => {
                let _ = good_inputs(self.good_certify.as_ref().unwrap()).map_err(|e| v.extend(e));
            }
            Kind::LatticeAudit => {
                let _ = lattice_inputs(self.lattice_audit.as_ref().unwrap()).map_err(|e| v.extend(e));
            }
            Kind::UbiquityRun => {
                let _ = ubiquity_inputs(self.ubiquity_run.as_ref().unwrap()).map_err(|e| v.extend(e));
            }
            Kind::SeriesAudit => {
                let _ = series_inputs(self.series_audit.as_ref().unwrap()).map_err(|e| v.extend(e));
            }
            Kind::Covering => {
                let _ = covering_inputs(self.covering.as_ref().unwrap()).map_err(|e| v.extend(e));
            }
        }
        v
    }
}

fn check_prime(path: &str, p: u64, v: &mut Vec<Issue>) {
    if arith::check_prime(p).is_err() {
        v.push(issue(path, format!("{p} is not a prime")));
    }
}

fn rational(path: &str, s: &str, v: &mut Vec<Issue>) -> Option<BigRational> {
    parse_rational(s).map_err(|e| v.push(issue(path, e.to_string()))).ok()
}

fn positive(path: &str, s: &str, v: &mut Vec<Issue>) -> Option<BigRational> {
    let q = rational(path, s, v)?;
    if !q.is_positive() {
        v.push(issue(path, "must be positive"));
        return None;
    }
    Some(q)
}

fn validate_dichotomy(d: &DichotomySection, v: &mut Vec<Issue>) {
    check_prime("dichotomy.p", d.p, v);
    if d.n == 0 || d.n > 4 {
        v.push(issue("dichotomy.n", "must lie in 1..=4"));
    }
    if d.t_min == 0 || d.t_min > d.t_max || d.t_max > 24 {
        v.push(issue("dichotomy.t_min", "need 1 ≤ t_min ≤ t_max ≤ 24"));
    }
    if d.fit[0] < d.t_min || d.fit[1] > d.t_max || d.fit[0] + 2 > d.fit[1] {
        v.push(issue("dichotomy.fit", "fit window must lie inside [t_min, t_max] and span at least three windows"));
    }
    if d.samples == 0 {
        v.push(issue("dichotomy.samples", "must be positive"));
    }
    for (i, psi) in d.psi.iter().enumerate() {
        if let Err(e) = psi.validate() {
            v.push(issue(format!("dichotomy.psi[{i}]"), e.to_string()));
        } else if !psi.is_single_variable() || *psi == ApproxFunction::Zero {
            v.push(issue(format!("dichotomy.psi[{i}]"), "needs a positive function of the height"));
        }
    }
}

pub struct GoodInputs {
    pub f: Vec<Poly>,
    pub ball: PAdicBall,
    pub constants: GoodConstants,
    pub grid: Vec<i64>,
    pub opts: MeasureOptions,
}

pub fn good_inputs(s: &GoodCertifySection) -> Result<GoodInputs, Vec<Issue>> {
    let mut v = Vec::new();
    check_prime("good_certify.p", s.p, &mut v);
    if s.m == 0 || s.m > 3 {
        v.push(issue("good_certify.m", "must lie in 1..=3"));
    }
    if s.f.is_empty() {
        v.push(issue("good_certify.f", "need at least one component"));
    }
    let f: Vec<Poly> = s
        .f
        .iter()
        .enumerate()
        .filter_map(|(i, c)| parse_poly(c, s.m.max(1)).map_err(|e| v.push(issue(format!("good_certify.f[{i}]"), e))).ok())
        .collect();
    if f.iter().any(|fi| !fi.is_p_integral(s.p)) {
        v.push(issue("good_certify.f", "coefficients must be p-integral"));
    }
    let center: Vec<BigRational> = if s.center.is_empty() {
        vec![BigRational::zero(); s.m]
    } else {
        s.center.iter().filter_map(|c| rational("good_certify.center", c, &mut v)).collect()
    };
    if center.len() != s.m {
        v.push(issue("good_certify.center", "need m coordinates"));
    }
    if s.k < 0 {
        v.push(issue("good_certify.k", "ball must lie in Z_p^m"));
    }
    if s.depth_cap < 2 || s.depth_cap > 24 {
        v.push(issue("good_certify.depth_cap", "must lie in 2..=24"));
    }
    let opts = MeasureOptions { depth_cap: s.depth_cap };
    let grid = if s.eps_grid.is_empty() { sadic_core::measure::default_eps_grid(&opts) } else { s.eps_grid.clone() };
    let deg = f.iter().map(|fi| fi.degree()).max().unwrap_or(1).max(1);
    let constants = match (&s.c, &s.alpha) {
        (None, None) => Some(GoodConstants::polynomial(deg, s.m.max(1) as u32)),
        (Some(c), Some(a)) => match (positive("good_certify.c", c, &mut v), positive("good_certify.alpha", a, &mut v)) {
            (Some(c), Some(a)) => GoodConstants::new(sadic_core::real::PowProd::rational(c), a)
                .map_err(|e| v.push(issue("good_certify.alpha", e.to_string())))
                .ok(),
            _ => None,
        },
        _ => {
            v.push(issue("good_certify.c", "give both c and alpha or neither"));
            None
        }
    };
    if !v.is_empty() {
        return Err(v);
    }
    let ball = PAdicBall::new(s.p, center, s.k).map_err(|e| vec![issue("good_certify.center", e.to_string())])?;
    Ok(GoodInputs { f, ball, constants: constants.unwrap(), grid, opts })
}

pub struct LatticeInputs {
    pub y: Vec<BigRational>,
    pub q: Vec<BigRational>,
    pub delta: Option<BigRational>,
}

pub fn lattice_inputs(s: &LatticeAuditSection) -> Result<LatticeInputs, Vec<Issue>> {
    let mut v = Vec::new();
    check_prime("lattice_audit.p", s.p, &mut v);
    if s.j == 0 {
        v.push(issue("lattice_audit.j", "must be positive"));
    }
    if s.y.is_empty() || s.y.len() > 4 {
        v.push(issue("lattice_audit.y", "need 1..=4 coordinates"));
    }
    let y: Vec<BigRational> = s.y.iter().filter_map(|c| rational("lattice_audit.y", c, &mut v)).collect();
    if y.iter().any(|q| arith::valuation_rat(q, s.p).map_or(false, |e| e < 0)) {
        v.push(issue("lattice_audit.y", "coordinates must be p-integral"));
    }
    if arith::checked_pow(s.p, s.j + s.y.len() as u32 + 1).map_or(true, |m| m > 1 << 40) {
        v.push(issue("lattice_audit.j", "p^{j+n} is too large"));
    }
    if s.q.is_empty() {
        v.push(issue("lattice_audit.q", "need at least one scale"));
    }
    let q: Vec<BigRational> = s.q.iter().filter_map(|c| positive("lattice_audit.q", c, &mut v)).collect();
    let delta = s.delta.as_ref().and_then(|d| positive("lattice_audit.delta", d, &mut v));
    if s.budget == 0 {
        v.push(issue("lattice_audit.budget", "must be positive"));
    }
    if v.is_empty() {
        Ok(LatticeInputs { y, q, delta })
    } else {
        Err(v)
    }
}

pub struct UbiquityInputs {
    pub f: Vec<Poly>,
    pub theta: Poly,
    pub cfg: UbiquityConfig,
}

fn ubiquity_common(
    section: &str,
    p: u64,
    n: usize,
    map: &MapSpec,
    theta: &str,
    q: &BigRational,
    delta: &str,
    v: &mut Vec<Issue>,
) -> Option<UbiquityInputs> {
    check_prime(&format!("{section}.p"), p, v);
    if map.m == 0 {
        v.push(issue(format!("{section}.map.m"), "must be positive"));
        return None;
    }
    let f = map.polys(n).map_err(|e| v.push(issue(format!("{section}.map.coords"), e))).ok();
    let theta = parse_poly(theta, map.m).map_err(|e| v.push(issue(format!("{section}.theta"), e))).ok();
    let delta = positive(&format!("{section}.delta"), delta, v);
    let (f, theta, delta) = (f?, theta?, delta?);
    let mut cfg = UbiquityConfig::new(p, n, q.clone(), delta);
    cfg.m = map.m;
    if let Err(e) = cfg.validate() {
        v.push(issue(section, e.to_string()));
    }
    if f.len() != n {
        v.push(issue(format!("{section}.map.coords"), "need n coordinates"));
    } else if f[0] != Poly::var(map.m, 0) {
        v.push(issue(format!("{section}.map.coords"), "the first coordinate must be x"));
    }
    if f.iter().chain([&theta]).any(|g| !g.is_p_integral(p)) {
        v.push(issue(section, "map and Θ must have p-integral coefficients"));
    }
    Some(UbiquityInputs { f, theta, cfg })
}

pub fn ubiquity_inputs(s: &UbiquityRunSection) -> Result<UbiquityInputs, Vec<Issue>> {
    let mut v = Vec::new();
    let q = positive("ubiquity_run.q", &s.q, &mut v);
    if s.samples == 0 {
        v.push(issue("ubiquity_run.samples", "must be positive"));
    }
    if s.digits == 0 || s.digits > 60 {
        v.push(issue("ubiquity_run.digits", "must lie in 1..=60"));
    }
    let mut out = q.as_ref().and_then(|q| ubiquity_common("ubiquity_run", s.p, s.n, &s.map, &s.theta, q, &s.delta, &mut v));
    if let Some(u) = out.as_mut() {
        u.cfg.max_doublings = s.max_doublings;
        u.cfg.precision = s.precision;
        if q.as_ref().map_or(false, |q| q < &BigRational::one()) {
            v.push(issue("ubiquity_run.q", "must be at least 1"));
        }
    }
    match out {
        Some(u) if v.is_empty() => Ok(u),
        _ => Err(v),
    }
}

pub fn covering_inputs(s: &CoveringSection) -> Result<(UbiquityInputs, PAdicBall), Vec<Issue>> {
    let mut v = Vec::new();
    if s.samples == 0 {
        v.push(issue("covering.samples", "must be positive"));
    }
    if s.t_min > s.t_max || s.t_max > 40 {
        v.push(issue("covering.t_min", "need t_min ≤ t_max ≤ 40"));
    }
    if s.k < 0 {
        v.push(issue("covering.k", "ball must lie in Z_p^m"));
    }
    let center: Vec<BigRational> = if s.center.is_empty() {
        vec![BigRational::zero(); s.map.m]
    } else {
        s.center.iter().filter_map(|c| rational("covering.center", c, &mut v)).collect()
    };
    if center.len() != s.map.m {
        v.push(issue("covering.center", "need m coordinates"));
    }
    let q = arith::pow_rat(2, s.t_min as i64);
    let out = ubiquity_common("covering", s.p, s.n, &s.map, &s.theta, &q, &s.delta, &mut v);
    if !v.is_empty() {
        return Err(v);
    }
    let ball = PAdicBall::new(s.p, center, s.k).map_err(|e| vec![issue("covering.center", e.to_string())])?;
    Ok((out.unwrap(), ball))
}

pub struct SeriesInputs {
    pub eps: BigRational,
    pub delta: BigRational,
    pub alpha1: BigRational,
}

pub fn series_inputs(s: &SeriesAuditSection) -> Result<SeriesInputs, Vec<Issue>> {
    let mut v = Vec::new();
    let eps = positive("series_audit.eps", &s.eps, &mut v);
    let delta = positive("series_audit.delta", &s.delta, &mut v);
    let alpha1 = positive("series_audit.alpha1", &s.alpha1, &mut v);
    if s.l == 0 {
        v.push(issue("series_audit.l", "must be positive"));
    }
    if s.n == 0 {
        v.push(issue("series_audit.n", "must be positive"));
    }
    if s.bc_horizon < 2 || s.bc_horizon > 1 << 26 {
        v.push(issue("series_audit.bc_horizon", "must lie in 2..=2^26"));
    }
    if s.horizon == Some(0) {
        v.push(issue("series_audit.horizon", "must be positive"));
    }
    for (i, psi) in s.psi.iter().enumerate() {
        if let Err(e) = psi.validate() {
            v.push(issue(format!("series_audit.psi[{i}]"), e.to_string()));
        } else if !psi.is_single_variable() {
            v.push(issue(format!("series_audit.psi[{i}]"), "needs a function of the height"));
        }
    }
    if let (Some(e), Some(d)) = (&eps, &delta) {
        if d >= e {
            v.push(issue("series_audit.delta", "need δ < ε"));
        }
    }
    match (eps, delta, alpha1) {
        (Some(eps), Some(delta), Some(alpha1)) if v.is_empty() => Ok(SeriesInputs { eps, delta, alpha1 }),
        _ => Err(v),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_rejected() {
        let e = parse("", &[]).unwrap_err();
        assert!(e[0].message.contains("kind"), "{e:?}");
    }

    #[test]
    fn overrides_reach_nested_keys() {
        let c = parse("kind = \"dichotomy\"", &["dichotomy.samples=7".into(), "output.stem=abc".into(), "seed=9".into()]).unwrap();
        assert_eq!(c.dichotomy.as_ref().unwrap().samples, 7);
        assert_eq!(c.output.stem.as_deref(), Some("abc"));
        assert_eq!(c.seed, 9);
        assert_eq!(c.dichotomy.as_ref().unwrap().psi.len(), 2);
        assert!(c.validate().is_empty());
        let c = parse("kind = \"covering\"", &["samples=5".into()]).unwrap();
        assert_eq!(c.covering.unwrap().samples, 5);
    }

    #[test]
    fn validation_collects_every_problem() {
        let c = parse(
            "kind = \"good-certify\"\n[good_certify]\np = 4\nf = [\"x +\"]\nk = -1\n[covering]\n",
            &[],
        )
        .unwrap();
        let paths: Vec<String> = c.validate().into_iter().map(|i| i.path).collect();
        for want in ["covering", "good_certify.p", "good_certify.f[0]", "good_certify.k"] {
            assert!(paths.iter().any(|p| p == want), "{want} missing from {paths:?}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse("kind = \"covering\"\n[covering]\nbogus = 1\n", &[]).is_err());
        assert!(parse("kind = \"nope\"", &[]).is_err());
    }
}

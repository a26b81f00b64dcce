//! Experiment drivers.

use std::io;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;
use serde_json::json;

use sadic_core::approx::{borel_cantelli_sum, run_dichotomy, series_audit, DichotomyConfig};
use sadic_core::arith::rational_to_string;
use sadic_core::lattice::{minkowski_audit, GammaLattice};
use sadic_core::measure::{good_certify_vec, sample_point};
use sadic_core::ubiquity::{covering_check, resonant_construct};
use sadic_core::{Error, PAdicBall};

use crate::config::{self, ExperimentConfig, Format, Issue, Kind};
use crate::emit::{float, join, Emitter};

/// Why a run did not finish cleanly.
#[derive(Debug)]
pub enum Failure {
    Validation(Vec<Issue>),
    Core(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> i32 {
        match self {
            Failure::Validation(_) => 2,
            Failure::Core(e) => match e {
                Error::InvalidPrime(_) | Error::PrimeMismatch(..) | Error::InvalidArgument(_) | Error::Precondition(_) => 2,
                Error::BudgetExceeded(_)
                | Error::SearchExhausted(_)
                | Error::InsufficientPrecision { .. }
                | Error::IndeterminateValuation { .. }
                | Error::IndeterminateComparison(_) => 3,
                Error::Internal(_) | Error::DivisionByZero => 4,
            },
            Failure::Io(_) => 1,
        }
    }
}

/// Files written plus the reasons, if any, the results are only partial.
#[derive(Debug, Serialize)]
pub struct Outcome {
    pub files: Vec<String>,
    pub partial: Vec<String>,
}

fn validation(issues: Vec<Issue>) -> Failure {
    Failure::Validation(issues)
}

pub fn run(cfg: &ExperimentConfig) -> Result<Outcome, Failure> {
    let issues = cfg.validate();
    if !issues.is_empty() {
        return Err(validation(issues));
    }
    let mut em = Emitter::new(cfg)?;
    let format = cfg.output.format;
    let partial = match cfg.kind {
        Kind::Dichotomy => dichotomy(cfg, &mut em, format)?,
        Kind::GoodCertify => good(cfg, &mut em, format)?,
        Kind::LatticeAudit => lattice(cfg, &mut em, format)?,
        Kind::UbiquityRun => ubiquity(cfg, &mut em, format)?,
        Kind::SeriesAudit => series(cfg, &mut em, format)?,
        Kind::Covering => covering(cfg, &mut em, format)?,
    };
    Ok(Outcome { files: em.written.files.iter().map(|p| p.display().to_string()).collect(), partial })
}

fn dichotomy(cfg: &ExperimentConfig, em: &mut Emitter, format: Option<Format>) -> Result<Vec<String>, Failure> {
    let s = cfg.dichotomy.as_ref().unwrap();
    let mut reports = Vec::new();
    for psi in &s.psi {
        let dc = DichotomyConfig {
            p: s.p,
            n: s.n,
            psi: psi.clone(),
            t_min: s.t_min,
            t_max: s.t_max,
            fit: (s.fit[0], s.fit[1]),
            samples: s.samples,
            seed: cfg.seed,
        };
        reports.push((dc.clone(), run_dichotomy(&dc)?));
    }
    if format == Some(Format::Json) {
        let docs: Vec<_> = reports.iter().map(|(c, r)| json!({ "psi": c.psi, "report": r })).collect();
        em.json("", &docs)?;
        return Ok(vec![]);
    }
    let header = ["t", "valuation", "samples", "hits", "frequency", "sigma", "witnesses"];
    let mut summary = Vec::new();
    for (i, (c, r)) in reports.iter().enumerate() {
        let rows: Vec<Vec<String>> = r
            .windows
            .iter()
            .map(|w| {
                let sigma = (w.frequency * (1.0 - w.frequency) / w.samples as f64).sqrt();
                vec![
                    w.t.to_string(),
                    w.valuation.to_string(),
                    w.samples.to_string(),
                    w.hits.to_string(),
                    float(w.frequency),
                    float(sigma),
                    w.witnesses.to_string(),
                ]
            })
            .collect();
        em.csv(&format!("psi{i}"), &header, &rows)?;
        summary.push(json!({
            "psi": c.psi,
            "slope": r.slope,
            "sigma": r.sigma,
            "observed": r.observed,
            "still_growing": r.still_growing,
        }));
    }
    em.json("summary", &summary)?;
    Ok(vec![])
}

fn good(cfg: &ExperimentConfig, em: &mut Emitter, format: Option<Format>) -> Result<Vec<String>, Failure> {
    let inputs = config::good_inputs(cfg.good_certify.as_ref().unwrap()).map_err(validation)?;
    let report = good_certify_vec(&inputs.f, &inputs.ball, &inputs.constants, &inputs.grid, &inputs.opts)?;
    if format == Some(Format::Csv) {
        let header = ["eps_exp", "measure_lower", "measure_upper", "sup_lower", "sup_upper", "rhs_at_sup_upper", "verdict"];
        let rows: Vec<Vec<String>> = report
            .rows
            .iter()
            .map(|r| {
                vec![
                    r.eps_exp.to_string(),
                    rational_to_string(&r.measure.lower),
                    rational_to_string(&r.measure.upper),
                    rational_to_string(&r.sup.lower),
                    rational_to_string(&r.sup.upper),
                    float(r.rhs_at_sup_upper),
                    serde_json::to_value(r.verdict).unwrap().as_str().unwrap().to_string(),
                ]
            })
            .collect();
        em.csv("", &header, &rows)?;
    } else {
        em.json("", &report)?;
    }
    Ok(if report.inconclusive > 0 { vec![format!("{} inconclusive grid values", report.inconclusive)] } else { vec![] })
}

fn lattice(cfg: &ExperimentConfig, em: &mut Emitter, format: Option<Format>) -> Result<Vec<String>, Failure> {
    let s = cfg.lattice_audit.as_ref().unwrap();
    let inputs = config::lattice_inputs(s).map_err(validation)?;
    let lat = GammaLattice::from_rationals(&inputs.y, s.p, s.j, s.divisible)?;
    let det = lat.basis_determinant();
    if det != BigInt::from(lat.covolume) {
        return Err(Failure::Core(Error::Internal(format!("basis determinant {det} differs from covolume {}", lat.covolume))));
    }
    let mut partial = Vec::new();
    let mut rows = Vec::new();
    let mut audits = Vec::new();
    for q in &inputs.q {
        let m = lat.successive_minima(q, s.strategy, s.budget)?;
        let audit = if m.complete {
            let a = minkowski_audit(&lat, &m, inputs.delta.as_ref())?;
            if !a.product_holds || !a.first_min_holds {
                return Err(Failure::Core(Error::Internal(format!("Minkowski bound fails at Q = {q}"))));
            }
            Some(a)
        } else {
            partial.push(format!("minima at Q = {q} are incomplete within the budget"));
            None
        };
        for (k, ((mu, lam), w)) in m.mu.iter().zip(&m.lambdas).zip(&m.witnesses).enumerate() {
            rows.push(vec![rational_to_string(q), (k + 1).to_string(), mu.to_string(), rational_to_string(lam), join(w)]);
        }
        audits.push(json!({ "minima": m, "minkowski": audit }));
    }
    let doc = json!({ "basis": lat.basis(), "determinant": det.to_string(), "lattice": lat, "scales": audits });
    if format == Some(Format::Json) {
        em.json("", &doc)?;
    } else {
        em.csv("", &["q", "k", "mu", "lambda", "witness"], &rows)?;
        em.json("audit", &doc)?;
    }
    Ok(partial)
}

fn ubiquity(cfg: &ExperimentConfig, em: &mut Emitter, format: Option<Format>) -> Result<Vec<String>, Failure> {
    let s = cfg.ubiquity_run.as_ref().unwrap();
    let inputs = config::ubiquity_inputs(s).map_err(validation)?;
    let ball = PAdicBall::unit(s.p, s.map.m)?;
    let mut rows = Vec::new();
    let mut docs = Vec::new();
    let (mut failed, mut errored) = (0, 0);
    for i in 0..s.samples {
        let x: Vec<BigRational> = sample_point(&ball, s.digits, cfg.seed, i as u64)?.into_iter().map(BigRational::from_integer).collect();
        let xs = join(&x.iter().map(rational_to_string).collect::<Vec<_>>());
        match resonant_construct(&x, &inputs.f, &inputs.theta, &inputs.cfg) {
            Ok(c) => {
                let status = if c.passed { "certified" } else { "failed" };
                if !c.passed {
                    failed += 1;
                }
                let k = &c.certificates;
                rows.push(vec![
                    i.to_string(),
                    xs,
                    status.into(),
                    rational_to_string(&c.q),
                    c.j.to_string(),
                    join(&c.a),
                    rational_to_string(&k.beta),
                    k.max_abs.to_string(),
                    rational_to_string(&k.distance),
                    rational_to_string(&k.rho),
                    c.failed.join("; "),
                ]);
                docs.push(json!({ "index": i, "status": status, "candidate": c }));
            }
            Err(Error::Precondition(msg)) if msg.contains('Φ') => {
                rows.push(vec![i.to_string(), xs, "in_phi".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), msg.clone()]);
                docs.push(json!({ "index": i, "status": "in_phi", "message": msg }));
            }
            Err(e @ Error::Internal(_)) => return Err(Failure::Core(e)),
            Err(e) => {
                errored += 1;
                let msg = e.to_string();
                rows.push(vec![i.to_string(), xs, "error".into(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), String::new(), msg.clone()]);
                docs.push(json!({ "index": i, "status": "error", "message": msg }));
            }
        }
    }
    if format == Some(Format::Json) {
        em.json("", &docs)?;
    } else {
        let header = ["index", "x", "status", "q", "j", "a", "beta", "max_abs", "distance", "rho", "notes"];
        em.csv("", &header, &rows)?;
    }
    let mut partial = Vec::new();
    if failed > 0 {
        partial.push(format!("{failed} candidates failed a certificate"));
    }
    if errored > 0 {
        partial.push(format!("{errored} samples could not be processed"));
    }
    Ok(partial)
}

fn series(cfg: &ExperimentConfig, em: &mut Emitter, format: Option<Format>) -> Result<Vec<String>, Failure> {
    let s = cfg.series_audit.as_ref().unwrap();
    let inputs = config::series_inputs(s).map_err(validation)?;
    let audit = series_audit(&inputs.eps, &inputs.delta, s.l, s.n, &inputs.alpha1, s.horizon)?;
    let bc = s
        .psi
        .iter()
        .map(|psi| borel_cantelli_sum(psi, s.n, s.infinity_in_s, s.bc_horizon).map(|r| (psi, r)))
        .collect::<Result<Vec<_>, _>>()?;
    if format == Some(Format::Csv) {
        let mut rows = Vec::new();
        for (i, (_, r)) in bc.iter().enumerate() {
            for (k, sum) in &r.partial_sums {
                rows.push(vec![i.to_string(), k.to_string(), float(*sum)]);
            }
        }
        em.csv("", &["psi", "k", "partial_sum"], &rows)?;
        em.json("gamma", &audit)?;
    } else {
        let sums: Vec<_> = bc.iter().map(|(psi, r)| json!({ "psi": psi, "report": r })).collect();
        em.json("", &json!({ "gamma": audit, "borel_cantelli": sums }))?;
    }
    let mut partial = Vec::new();
    if [&audit.real_place, &audit.finite_place].iter().any(|d| d.positive && !d.bracketed) {
        partial.push("a dyadic tail is not bracketed at the horizon".to_string());
    }
    Ok(partial)
}

fn covering(cfg: &ExperimentConfig, em: &mut Emitter, format: Option<Format>) -> Result<Vec<String>, Failure> {
    let s = cfg.covering.as_ref().unwrap();
    let (inputs, ball) = config::covering_inputs(s).map_err(validation)?;
    let mut reports = Vec::new();
    for t in s.t_min..=s.t_max {
        reports.push(covering_check(&ball, t, &inputs.cfg, &inputs.f, &inputs.theta, s.samples, cfg.seed)?);
    }
    if format == Some(Format::Json) {
        em.json("", &reports)?;
    } else {
        let header = ["t", "samples", "covered", "in_phi", "failures", "frequency", "floor", "sigma"];
        let rows: Vec<Vec<String>> = reports
            .iter()
            .map(|r| {
                vec![
                    r.t.to_string(),
                    r.samples.to_string(),
                    r.covered.to_string(),
                    r.in_phi.to_string(),
                    r.failures.to_string(),
                    float(r.frequency),
                    float(r.floor),
                    float(r.sigma),
                ]
            })
            .collect();
        em.csv("", &header, &rows)?;
        let notes: Vec<_> = reports.iter().filter(|r| !r.notes.is_empty()).map(|r| json!({ "t": r.t, "notes": r.notes })).collect();
        if !notes.is_empty() {
            em.json("notes", &notes)?;
        }
    }
    let failures: usize = reports.iter().map(|r| r.failures).sum();
    Ok(if failures > 0 { vec![format!("{failures} sampled points failed certification")] } else { vec![] })
}

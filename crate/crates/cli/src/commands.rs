//! One function per subcommand. Each returns the report body and whether
//! every check it ran passed; errors are configuration or numerical failures.

use anyhow::{bail, Context};
use multipolar::criticality::{
    criticality_sweep, criticality_verdict, rate_fit, strictly_decreasing, SweepRow, VerdictParams,
};
use multipolar::exponents::{attainability_verdict, classify_seven_families};
use multipolar::lab::{
    check_hardy_identity, check_rellich_identity, check_xi_zeta_identity, random_bumps, random_points, sharpness_probe,
    supersolution_check, verify_inequality, SharpnessSweep,
};
use multipolar::multipole::{sharp_constant, PotentialKind, PotentialSpec};
use multipolar::quadrature::McParams;
use multipolar::rational_to_f64;
use serde_json::{json, Value};

use crate::config::{Layout, RunConfig};

/// Minimum pole distance of the pointwise evaluation points.
const POINT_CLEARANCE: f64 = 0.05;

pub struct Outcome {
    pub pass: bool,
    pub result: Value,
    /// Plot-ready sweep rows, written as CSV when requested.
    pub rows: Option<Vec<SweepRow>>,
}

impl Outcome {
    fn new(pass: bool, result: Value) -> Self {
        Self {
            pass,
            result,
            rows: None,
        }
    }
}

fn mc(cfg: &RunConfig, offset: u64) -> McParams {
    McParams::new(cfg.samples, cfg.seed.wrapping_add(offset))
}

/// Both integral identities on random bumps, the ξ/ζ identity and the
/// supersolution signs at random points.
pub fn verify_identities(cfg: &mut RunConfig) -> anyhow::Result<Outcome> {
    let s = cfg.resolve_s()?;
    let poles = cfg.pole_config()?;
    let bumps = random_bumps(&poles, cfg.trials, cfg.seed);
    let mut identities = Vec::new();
    for (k, u) in bumps.iter().enumerate() {
        identities.push(check_hardy_identity(u, &poles, s, &mc(cfg, k as u64))?);
        identities.push(check_rellich_identity(u, &poles, s, &mc(cfg, k as u64))?);
    }
    let points = random_points(&poles, cfg.points, POINT_CLEARANCE, cfg.seed);
    let xi_zeta = check_xi_zeta_identity(&poles, s, &points)?;
    let supersolution = supersolution_check(&poles, s, &points)?;
    let pass = identities.iter().all(|r| r.pass) && xi_zeta.pass && supersolution.pass();
    Ok(Outcome::new(
        pass,
        json!({
            "integral_identities": identities,
            "xi_zeta": xi_zeta,
            "supersolution": supersolution,
            "supersolution_pass": supersolution.pass(),
        }),
    ))
}

/// Rayleigh quotients of random bumps against the sharp constant: `V_n` for
/// order 2, `W₂` for order 1.
pub fn rayleigh(cfg: &mut RunConfig) -> anyhow::Result<Outcome> {
    let poles = cfg.pole_config()?;
    let constant = sharp_constant(cfg.dimension, cfg.poles, cfg.order)?;
    let kind = if cfg.order == 1 {
        PotentialKind::W2
    } else {
        PotentialKind::Vn
    };
    let potential = PotentialSpec::new(kind, &poles)?;
    let lambda = rational_to_f64(&constant);
    let reports = random_bumps(&poles, cfg.trials, cfg.seed)
        .iter()
        .enumerate()
        .map(|(k, u)| verify_inequality(u, &potential, lambda, cfg.order, &mc(cfg, k as u64)))
        .collect::<multipolar::Result<Vec<_>>>()?;
    let pass = reports.iter().all(|r| r.pass);
    Ok(Outcome::new(
        pass,
        json!({
            "potential": if cfg.order == 1 { "W2" } else { "Vn" },
            "sharp_constant": constant.to_string(),
            "quotients": reports,
        }),
    ))
}

/// Quotients along a sweep approaching the extremal: cut-off ground states
/// for two poles, mollified ground states otherwise.
pub fn sharpness(cfg: &mut RunConfig) -> anyhow::Result<Outcome> {
    let poles = cfg.pole_config()?;
    let sweep = if cfg.poles == 2 {
        SharpnessSweep::Cutoff {
            epsilons: cfg.epsilons.clone(),
        }
    } else {
        SharpnessSweep::Mollified {
            s: cfg.resolve_s()?,
            points: cfg.mollified_sweep.clone(),
        }
    };
    let probe = sharpness_probe(&poles, &sweep, &mc(cfg, 0))?;
    let pass = probe.monotone && probe.lower_bound_holds;
    Ok(Outcome::new(
        pass,
        json!({
            "sweep": sweep,
            "probe": probe,
            "final_ratio": probe.last().map(|p| p.ratio),
            "final_ratio_std_error": probe.last().map(|p| p.ratio_std_error),
        }),
    ))
}

/// The integrability table of the seven classes in `|Δφ|²`.
pub fn classify(cfg: &mut RunConfig) -> anyhow::Result<Outcome> {
    let table = classify_seven_families(cfg.dimension, cfg.poles)?;
    let attainability = attainability_verdict(cfg.dimension, cfg.poles)?;
    let non_integrable: Vec<&str> = table.non_integrable().iter().map(|f| f.name()).collect();
    Ok(Outcome::new(
        true,
        json!({
            "non_integrable": non_integrable,
            "attained": attainability.attained,
            "attainability": attainability,
        }),
    ))
}

/// The cut-off energy sweep and its rate fit.
pub fn criticality(cfg: &mut RunConfig) -> anyhow::Result<Outcome> {
    let poles = cfg.pole_config()?;
    let sweep = criticality_sweep(&poles, &cfg.epsilons, &mc(cfg, 0))?;
    let series: Vec<(f64, f64)> = sweep.iter().map(|r| (r.epsilon, r.total)).collect();
    let fit = rate_fit(cfg.dimension, &series)?;
    let decreasing = strictly_decreasing(&sweep, 3.0);
    let mut out = Outcome::new(
        decreasing && fit.consistent_with_decay,
        json!({
            "sweep": sweep,
            "strictly_decreasing": decreasing,
            "fit": fit,
        }),
    );
    out.rows = Some(sweep.iter().map(|r| r.row()).collect());
    Ok(out)
}

/// Positive- or null-critical, with numerical evidence.
pub fn verdict(cfg: &mut RunConfig) -> anyhow::Result<Outcome> {
    if cfg.layout != Layout::Simplex {
        bail!("verdict runs on the regular simplex; drop the custom layout");
    }
    cfg.pole_config()?;
    let params = VerdictParams {
        samples: cfg.samples,
        seed: cfg.seed,
        epsilons: cfg.epsilons.clone(),
        ratio_band: cfg.ratio_band,
    };
    let report = criticality_verdict(cfg.dimension, cfg.poles, &params)?;
    Ok(Outcome::new(
        report.evidence_supports_verdict,
        serde_json::to_value(&report).context("serializing verdict")?,
    ))
}

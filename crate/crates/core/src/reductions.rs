//! Front-ends that gate raw configurations on the theorem hypotheses, turn
//! their tube structure into a certified triple design and run the subspace
//! engine.

use serde::{Deserialize, Serialize};

use crate::checks::{all_hold, failing, Check};
use crate::collinearity::{
    affine_certificate_unchecked, affine_dependence_certificate, projective_certificate_unchecked,
    projective_dependence_certificate, DependenceCertificate, TubeKind, TubeQuery,
};
use crate::designs::{
    ceil_count, collect_witnessed, design_parameters, hypothesis_from, prune_to_count,
    DesignParams, HypothesisReport, TripleFamily,
};
use crate::error::{Error, Result};
use crate::geometry::{check_balanced, check_phase_separated, norm, PointConfig, SLACK};
use crate::spectral::{approximate_sg_subspace_with, EngineOptions, SubspaceCertificate};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "setting", rename_all = "snake_case")]
pub enum Setting {
    Affine { b: f64 },
    Projective { mu: f64 },
}

/// Factors of the noise gates `eps < c / B` and `eps < c mu^2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gates {
    pub affine: f64,
    pub projective: f64,
}

impl Default for Gates {
    fn default() -> Self {
        Self {
            affine: 1.0 / 16.0,
            projective: 1.0 / 32.0,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalysisOptions {
    /// Run the engine even when a hypothesis fails; failures stay recorded.
    pub force: bool,
    pub gates: Gates,
    pub engine: EngineOptions,
}

/// Bounds obtained by plugging the worst parameters the hypotheses allow
/// into the engine's inequalities.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Headline {
    pub p: f64,
    pub g: f64,
    pub m: f64,
    pub mu: f64,
    pub dim_bound: f64,
    pub eps_prime_bound: f64,
    pub subset_eps_bound: f64,
    /// `dim_bound` divided by its scale (`B^6/delta^2` or `1/(delta^2 mu^6)`).
    pub dim_constant: f64,
    /// `eps_prime_bound` divided by its scale (`eps B^2.5/sqrt(delta)` or
    /// `eps/(sqrt(delta) mu^2.5)`).
    pub eps_constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Analysis {
    pub setting: Setting,
    pub delta: f64,
    pub eps: f64,
    pub n: usize,
    pub d: usize,
    pub forced: bool,
    /// Theorem hypotheses, each as a measured-versus-bound record.
    pub hypotheses: Vec<Check>,
    pub partner_counts: HypothesisReport,
    pub collected: DesignParams,
    pub collected_triples: usize,
    pub triples: TripleFamily,
    pub design: DesignParams,
    pub certificates: Vec<DependenceCertificate>,
    /// Coefficient floor handed to the engine.
    pub mu_dependence: f64,
    /// Consequences of the hypotheses about the design and the certificates.
    pub checks: Vec<Check>,
    pub certificate: SubspaceCertificate,
    pub headline: Headline,
    pub headline_checks: Vec<Check>,
}

impl Analysis {
    pub fn all_checks(&self) -> impl Iterator<Item = &Check> {
        self.hypotheses
            .iter()
            .chain(&self.checks)
            .chain(&self.certificate.checks)
            .chain(&self.headline_checks)
    }

    pub fn passes(&self) -> bool {
        self.all_checks().all(|c| c.holds)
    }

    pub fn failing(&self) -> Vec<&str> {
        self.all_checks().filter(|c| !c.holds).map(|c| c.name.as_str()).collect()
    }

    pub fn hypotheses_hold(&self) -> bool {
        all_hold(&self.hypotheses)
    }
}

fn validate_common(v: &PointConfig, delta: f64, eps: f64) -> Result<()> {
    if v.len() < 3 {
        return Err(Error::InvalidInput(format!("need at least 3 points, got {}", v.len())));
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1], got {delta}")));
    }
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidInput(format!("eps must be finite and >= 0, got {eps}")));
    }
    Ok(())
}

fn reject_unless_forced(hyp: &[Check], force: bool) -> Result<()> {
    if force || all_hold(hyp) {
        return Ok(());
    }
    let detail: Vec<String> = hyp
        .iter()
        .filter(|c| !c.holds)
        .map(|c| {
            let rel = match c.relation {
                crate::checks::Relation::Le => "<=",
                crate::checks::Relation::Lt => "<",
                crate::checks::Relation::Ge => ">=",
            };
            format!("{} (measured {}, needs {rel} {})", c.name, c.measured, c.bound)
        })
        .collect();
    Err(Error::HypothesisNotMet(detail.join("; ")))
}

fn headline(n: usize, delta: f64, eps: f64, g: f64, mu: f64) -> Headline {
    let nf = n as f64;
    let p = delta * (nf - 1.0) / 2.0;
    let m = nf * ceil_count(delta * (nf - 1.0)) as f64;
    Headline {
        p,
        g,
        m,
        mu,
        dim_bound: 2.0 * nf * nf * g * g / (p * p * mu.powi(4)),
        eps_prime_bound: 5.0 * eps * (g * m).sqrt() / (p * mu * mu),
        subset_eps_bound: 2.0 * eps * (g * m).sqrt() / (p * mu),
        dim_constant: 0.0,
        eps_constant: 0.0,
    }
}

struct Prepared {
    hypotheses: Vec<Check>,
    report: HypothesisReport,
    collected: DesignParams,
    collected_triples: usize,
    triples: TripleFamily,
    rotations: Vec<[usize; 3]>,
}

fn prepare(
    v: &PointConfig,
    kind: TubeKind,
    delta: f64,
    eps: f64,
    mut hypotheses: Vec<Check>,
    force: bool,
) -> Result<Prepared> {
    let col = collect_witnessed(v, TubeQuery::new(kind, eps)?)?;
    let report = hypothesis_from(&col, delta);
    let min_count = report.counts.iter().copied().min().unwrap_or(0);
    hypotheses.push(Check::ge(
        "partners with a third point in the tube >= delta (n-1)",
        min_count as f64,
        report.required,
    ));
    reject_unless_forced(&hypotheses, force)?;

    let collected = design_parameters(&col.family);
    if collected.p == 0 {
        return Err(Error::hypothesis(
            "some point lies in no dependent triple (p = 0); nothing to certify",
        ));
    }
    let target = ceil_count(delta * (v.len() - 1) as f64).min(collected.p);
    let triples = prune_to_count(&col.family, target)?;
    let rotations = triples
        .triples()
        .iter()
        .map(|&t| {
            col.witness_for(t)
                .map(|w| w.rotation())
                .ok_or_else(|| Error::invariant("pruned triple has no witness"))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Prepared {
        hypotheses,
        report,
        collected,
        collected_triples: col.family.len(),
        triples,
        rotations,
    })
}

#[allow(clippy::too_many_arguments)]
fn finish(
    v: &PointConfig,
    setting: Setting,
    delta: f64,
    eps: f64,
    prep: Prepared,
    certificates: Vec<DependenceCertificate>,
    floor: f64,
    g_bound: (f64, &str),
    opts: &AnalysisOptions,
) -> Result<Analysis> {
    let n = v.len();
    let design = design_parameters(&prep.triples);
    let measured_floor = certificates
        .iter()
        .map(|c| c.min_magnitude())
        .fold(f64::INFINITY, f64::min);
    let mu_dependence = if opts.force { floor.min(measured_floor) } else { floor };
    let mut checks = vec![
        Check::ge(
            "design p >= delta (n-1) / 2",
            design.p as f64,
            delta * (n - 1) as f64 / 2.0,
        ),
        Check::lt(g_bound.1, design.g as f64, g_bound.0),
        Check::le(
            "|T| <= n ceil(delta (n-1))",
            prep.triples.len() as f64,
            (n * ceil_count(delta * (n - 1) as f64)) as f64,
        ),
        Check::ge("smallest dependence coefficient", measured_floor, floor),
    ];
    let max_resid = certificates.iter().map(|c| c.residual).fold(0.0, f64::max);
    checks.push(Check::le("largest certificate residual", max_resid, eps));

    let certificate =
        approximate_sg_subspace_with(v, &prep.triples, &certificates, mu_dependence, eps, &opts.engine)?;

    let mut head = headline(n, delta, eps, g_bound.0, floor);
    match setting {
        Setting::Affine { b } => {
            head.dim_constant = head.dim_bound * delta * delta / b.powi(6);
            head.eps_constant = head.eps_prime_bound * delta.sqrt() / (eps * b.powf(2.5));
        }
        Setting::Projective { mu } => {
            head.dim_constant = head.dim_bound * delta * delta * mu.powi(6);
            head.eps_constant = head.eps_prime_bound * delta.sqrt() * mu.powf(2.5) / eps;
        }
    }
    let headline_checks = vec![
        Check::le("dim L' <= headline bound", certificate.dim as f64, head.dim_bound),
        Check::le("eps' <= headline bound", certificate.eps_prime, head.eps_prime_bound),
    ];
    Ok(Analysis {
        setting,
        delta,
        eps,
        n,
        d: v.dim(),
        forced: opts.force,
        hypotheses: prep.hypotheses,
        partner_counts: prep.report,
        collected: prep.collected,
        collected_triples: prep.collected_triples,
        triples: prep.triples,
        design,
        certificates,
        mu_dependence,
        checks,
        certificate,
        headline: head,
        headline_checks,
    })
}

pub fn analyze_affine(v: &PointConfig, b: f64, delta: f64, eps: f64) -> Result<Analysis> {
    analyze_affine_with(v, b, delta, eps, &AnalysisOptions::default())
}

/// The every-pair case: each pair has a third point in its tube.
pub fn analyze_affine_simple(v: &PointConfig, b: f64, eps: f64) -> Result<Analysis> {
    analyze_affine(v, b, 1.0, eps)
}

pub fn analyze_affine_with(
    v: &PointConfig,
    b: f64,
    delta: f64,
    eps: f64,
    opts: &AnalysisOptions,
) -> Result<Analysis> {
    validate_common(v, delta, eps)?;
    if !(b >= 1.0 && b.is_finite()) {
        return Err(Error::InvalidInput(format!("B must be finite and >= 1, got {b}")));
    }
    let bal = check_balanced(v, b);
    let hypotheses = vec![
        Check::ge("closest pair distance >= 1", bal.min_distance, 1.0),
        Check::le("farthest pair distance <= B", bal.max_distance, b),
        Check::lt("eps < c / B", eps, opts.gates.affine / b),
    ];
    let prep = prepare(v, TubeKind::AffineLine, delta, eps, hypotheses, opts.force)?;
    let strict = !opts.force;
    let certificates = prep
        .rotations
        .iter()
        .map(|&r| {
            if strict {
                affine_dependence_certificate(v, r, b)
            } else {
                affine_certificate_unchecked(v, r)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let floor = 1.0 / (4.0 * b);
    finish(
        v,
        Setting::Affine { b },
        delta,
        eps,
        prep,
        certificates,
        floor,
        (5.0 * b, "design g < 5B"),
        opts,
    )
}

pub fn analyze_projective(v: &PointConfig, mu: f64, delta: f64, eps: f64) -> Result<Analysis> {
    analyze_projective_with(v, mu, delta, eps, &AnalysisOptions::default())
}

pub fn analyze_projective_with(
    v: &PointConfig,
    mu: f64,
    delta: f64,
    eps: f64,
    opts: &AnalysisOptions,
) -> Result<Analysis> {
    validate_common(v, delta, eps)?;
    if !(mu > 0.0 && mu <= 2f64.sqrt()) {
        return Err(Error::InvalidInput(format!("mu must lie in (0, sqrt 2], got {mu}")));
    }
    for (index, p) in v.points().iter().enumerate() {
        let nrm = norm(p);
        if (nrm - 1.0).abs() > SLACK {
            return Err(Error::OffSphere { index, norm: nrm });
        }
    }
    let sep = check_phase_separated(v, mu)?;
    let hypotheses = vec![
        Check::ge("phase separation min |u - e^(i t) v| >= mu", sep.min_distance, mu),
        Check::lt("eps < c mu^2", eps, opts.gates.projective * mu * mu),
    ];
    let prep = prepare(v, TubeKind::SphericalArc, delta, eps, hypotheses, opts.force)?;
    let strict = !opts.force;
    let certificates = prep
        .rotations
        .iter()
        .map(|&r| {
            if strict {
                projective_dependence_certificate(v, r, mu)
            } else {
                projective_certificate_unchecked(v, r)
            }
        })
        .collect::<Result<Vec<_>>>()?;
    finish(
        v,
        Setting::Projective { mu },
        delta,
        eps,
        prep,
        certificates,
        mu / 8.0,
        (8.0 / mu, "design g < 8/mu"),
        opts,
    )
}

/// The points the refinement left near `L'` and the tighter bound they enjoy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubsetVariant {
    pub indices: Vec<usize>,
    /// `rho = 2 eps sqrt(g m) / (p mu)` with the run's parameters.
    pub eps_doubleprime: f64,
    pub max_distance: f64,
    pub headline_bound: f64,
    pub checks: Vec<Check>,
}

impl SubsetVariant {
    pub fn passes(&self) -> bool {
        all_hold(&self.checks)
    }
}

pub fn subset_variant(a: &Analysis) -> SubsetVariant {
    let r = &a.certificate.refinement;
    let far = &r.far;
    let indices: Vec<usize> = (0..a.n).filter(|i| far.binary_search(i).is_err()).collect();
    let max_distance = indices.iter().map(|&i| r.distances[i]).fold(0.0, f64::max);
    let params = &a.certificate.params;
    let checks = vec![
        Check::lt(
            "n - |V'| < p / g",
            far.len() as f64,
            params.p as f64 / params.g as f64,
        ),
        Check::le("max distance on V'", max_distance, r.rho),
        Check::le("rho <= headline bound", r.rho, a.headline.subset_eps_bound),
    ];
    SubsetVariant {
        indices,
        eps_doubleprime: r.rho,
        max_distance,
        headline_bound: a.headline.subset_eps_bound,
        checks,
    }
}

/// Names of failed hypothesis records, for diagnostics.
pub fn failed_hypotheses(a: &Analysis) -> Vec<&str> {
    failing(&a.hypotheses)
}

//! Seeded invariant suite: every bound the pipelines promise, checked
//! against brute-force oracles on generated instances.

use std::time::Instant;

use itertools::Itertools;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generators::{gen_example_affine, gen_example_chain, gen_planted_affine, gen_planted_lcc, gen_planted_projective};
use crate::geometry::{check_phase_separated, dim_eps_bracket, dim_eps_lower, hermitian_eigen, CMatrix, CVector, PointConfig, C64, SLACK};
use crate::lcc::{exhaustive_stable_lcc_check, lcc_dimension_pipeline, perturb_stable_lcc, verify_stable_lcc, Verdict};
use crate::reductions::{analyze_affine, analyze_projective};
use crate::spectral::{offdiag_sq_sum, small_eig_count_bound};

/// Number of seeded cases per invariant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scale {
    pub lemma: usize,
    pub hoffman_wielandt: usize,
    pub engine: usize,
    pub front_ends: usize,
    pub lcc: usize,
    pub tiny_lcc: usize,
    pub perturbation: usize,
    pub bracket: usize,
}

impl Scale {
    pub const FULL: Scale = Scale {
        lemma: 200,
        hoffman_wielandt: 100,
        engine: 50,
        front_ends: 20,
        lcc: 20,
        tiny_lcc: 50,
        perturbation: 50,
        bracket: 100,
    };

    pub const QUICK: Scale = Scale {
        lemma: 20,
        hoffman_wielandt: 10,
        engine: 3,
        front_ends: 2,
        lcc: 2,
        tiny_lcc: 5,
        perturbation: 5,
        bracket: 10,
    };
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub scale: Scale,
    pub seed: u64,
    pub outcomes: Vec<Outcome>,
    pub passed: bool,
    pub seconds: f64,
}

type Invariant = fn(&Scale, u64) -> Result<String>;

/// The invariants in run order.
pub const INVARIANTS: [(&str, Invariant); 9] = [
    ("small eigenvalue count", lemma_count),
    ("eigenvalue matching", hoffman_wielandt),
    ("subspace engine on planted affine sets", engine),
    ("affine and projective front ends", front_ends),
    ("counterexample controls", counterexamples),
    ("stable LCC dimension bound", stable_lcc),
    ("tiny LCC oracle agreement", tiny_lcc),
    ("perturbed decoding families", perturbation),
    ("dim_eps bracket", bracket),
];

/// Runs one invariant, turning errors into a failed outcome.
pub fn run_one(index: usize, scale: &Scale, seed: u64) -> Outcome {
    let (name, f) = INVARIANTS[index];
    let start = Instant::now();
    let (passed, detail) = match f(scale, seed) {
        Ok(d) => (true, d),
        Err(e) => (false, e.to_string()),
    };
    Outcome {
        name: name.to_string(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run(scale: Scale, seed: u64) -> SelftestReport {
    let start = Instant::now();
    let outcomes: Vec<Outcome> = (0..INVARIANTS.len()).map(|i| run_one(i, &scale, seed)).collect();
    SelftestReport {
        scale,
        seed,
        passed: outcomes.iter().all(|o| o.passed),
        outcomes,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn fail(msg: String) -> Error {
    Error::TheoremViolation(msg)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

/// Hermitian matrix with diagonal in `[k, 2k]` and off-diagonal entries of
/// standard deviation `sigma`.
fn hermitian_with_diagonal(rng: &mut ChaCha8Rng, n: usize, k: f64, sigma: f64) -> CMatrix {
    let mut x = CMatrix::zeros(n, n);
    for i in 0..n {
        x[(i, i)] = C64::new(rng.random_range(k..=2.0 * k), 0.0);
        for j in i + 1..n {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            let z = C64::new(re, im) * (sigma / 2f64.sqrt());
            x[(i, j)] = z;
            x[(j, i)] = z.conj();
        }
    }
    x
}

fn lemma_count(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 1);
    let mut nontrivial = 0;
    for case in 0..scale.lemma {
        let n = rng.random_range(2..=64);
        let k = rng.random_range(0.5..4.0);
        let sigma = k * rng.random_range(0.0..1.5);
        let x = hermitian_with_diagonal(&mut rng, n, k, sigma);
        let (vals, _) = hermitian_eigen(&x)?;
        let count = vals.iter().filter(|&&l| l <= k / 4.0).count();
        let bound = small_eig_count_bound(k, offdiag_sq_sum(&x))?;
        if count as f64 > bound + SLACK {
            return Err(fail(format!("case {case}: {count} eigenvalues <= K/4 but bound is {bound}")));
        }
        nontrivial += usize::from(count > 0);
    }
    Ok(format!("{} matrices, {nontrivial} with small eigenvalues", scale.lemma))
}

fn hoffman_wielandt(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 2);
    let mut tightest: f64 = 0.0;
    for case in 0..scale.hoffman_wielandt {
        let n = rng.random_range(1..=8);
        let sigma = rng.random_range(0.0..2.0);
        let x = hermitian_with_diagonal(&mut rng, n, 1.0, sigma);
        let (vals, _) = hermitian_eigen(&x)?;
        let diag: Vec<f64> = (0..n).map(|i| x[(i, i)].re).collect();
        let best = (0..n)
            .permutations(n)
            .map(|p| p.iter().enumerate().map(|(i, &j)| (vals[j] - diag[i]).powi(2)).sum::<f64>())
            .fold(f64::INFINITY, f64::min);
        let off = offdiag_sq_sum(&x);
        if best > off + SLACK {
            return Err(fail(format!("case {case}: matching cost {best} exceeds off-diagonal mass {off}")));
        }
        if off > 0.0 {
            tightest = tightest.max(best / off);
        }
    }
    Ok(format!("{} matrices, largest cost ratio {tightest:.3}", scale.hoffman_wielandt))
}

/// Lattice capacity of a 4-balanced set per complex dimension.
const AFFINE_CAPACITY: [usize; 4] = [9, 65, 233, 577];

fn planted_affine_case(rng: &mut ChaCha8Rng, max_n: usize) -> Result<crate::generators::Planted> {
    let k = rng.random_range(2..=4);
    let n = rng.random_range(20..=AFFINE_CAPACITY[k - 1].min(max_n));
    let d = rng.random_range(k..=64);
    let noise = if rng.random_bool(0.2) { 0.0 } else { rng.random_range(0.0..1e-3) };
    gen_planted_affine(d, k, n, 4.0, noise, rng.random())
}

fn engine(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 3);
    let mut worst_dim: f64 = 0.0;
    let mut worst_eps: f64 = 0.0;
    for case in 0..scale.engine {
        let p = planted_affine_case(&mut rng, 300)?;
        let a = analyze_affine(&p.config, 4.0, p.report.delta, p.report.eps)?;
        let c = &a.certificate;
        if !c.passes() {
            let failing: Vec<_> = c.checks.iter().filter(|k| !k.holds).collect();
            return Err(fail(format!("case {case}: {failing:?}")));
        }
        worst_dim = worst_dim.max(c.dim as f64 / c.dim_bound);
        if c.eps_prime_bound > 0.0 {
            worst_eps = worst_eps.max(c.eps_prime / c.eps_prime_bound);
        }
    }
    Ok(format!(
        "{} configurations; largest dim/bound {worst_dim:.2e}, eps'/bound {worst_eps:.2e}",
        scale.engine
    ))
}

fn front_ends(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 4);
    for case in 0..scale.front_ends {
        let p = planted_affine_case(&mut rng, 150)?;
        let a = analyze_affine(&p.config, 4.0, p.report.delta, p.report.eps)?;
        if !a.passes() {
            return Err(fail(format!("affine case {case}: failing {:?}", a.failing())));
        }
        // gates are strict: eps = 1/(16B) and a too-small B are rejected
        for (b, eps) in [(4.0, 1.0 / 64.0), (p.report.scale * 0.99, p.report.eps)] {
            if !matches!(analyze_affine(&p.config, b, p.report.delta, eps), Err(Error::HypothesisNotMet(_))) {
                return Err(fail(format!("affine case {case}: gate accepted B = {b}, eps = {eps}")));
            }
        }
    }
    for case in 0..scale.front_ends {
        let mu = rng.random_range(0.4..0.7);
        let n = rng.random_range(20..=100);
        let noise = if case % 4 == 0 { 0.0 } else { rng.random_range(0.0..1e-4) };
        let p = gen_planted_projective(64, n, mu, noise, rng.random())?;
        let a = analyze_projective(&p.config, mu, p.report.delta, p.report.eps)?;
        if !a.passes() {
            return Err(fail(format!("projective case {case}: failing {:?}", a.failing())));
        }
        let closest = check_phase_separated(&p.config, mu)?.min_distance;
        for (m, eps) in [(mu, mu * mu / 32.0), ((closest + 1e-6).min(0.999), p.report.eps)] {
            if !matches!(analyze_projective(&p.config, m, p.report.delta, eps), Err(Error::HypothesisNotMet(_))) {
                return Err(fail(format!("projective case {case}: gate accepted mu = {m}, eps = {eps}")));
            }
        }
    }
    Ok(format!("{0} affine and {0} projective runs pass every check", scale.front_ends))
}

/// Facts about the counterexamples that hold exactly.
fn counterexamples(_: &Scale, _: u64) -> Result<String> {
    let (b, d) = (10.0, 30);
    let (v, r) = gen_example_affine(b, d)?;
    if !r.u_within_inv_b || !r.within_inv_b_minus_one {
        return Err(fail(format!("example tubes: {r:?}")));
    }
    let lower = dim_eps_lower(&v, 1.0)?;
    if lower < d - 2 {
        return Err(fail(format!("dim_1 lower bound {lower} < {}", d - 2)));
    }
    if !matches!(analyze_affine(&v, b, 1.0, 1.0 / b), Err(Error::HypothesisNotMet(_))) {
        return Err(fail("the noise gate accepted eps = 1/B".into()));
    }
    let (_, chain) = gen_example_chain(50.0, 3)?;
    Ok(format!(
        "u-tube {:.4}, v-tube {:.4} (1/B = {:.4}), dim_1 >= {lower}; chain constant {:.3}",
        r.u_tube,
        r.v_tube,
        1.0 / b,
        chain.constant
    ))
}

fn stable_lcc(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 6);
    let mut exact = 0;
    for case in 0..scale.lcc {
        let q = rng.random_range(1..=3);
        let d_prime = rng.random_range(1..=q);
        let n = rng.random_range(40..=200);
        let b = rng.random_range(2.0..=4.0);
        let noise = if case % 3 == 0 { 0.0 } else { rng.random_range(0.0..1e-3) };
        let d = rng.random_range(d_prime..=8);
        let p = gen_planted_lcc(d, d_prime, n, q, b, noise, 1, rng.random())?;
        let r = &p.report;
        let cert = lcc_dimension_pipeline(&p.config, &p.family, q, r.delta, b, r.eps, false)?;
        if !cert.passes() {
            let failing: Vec<_> = cert.checks.iter().filter(|c| !c.holds).collect();
            return Err(fail(format!("case {case}: {failing:?}")));
        }
        if noise == 0.0 {
            if cert.eps_prime > 1e-9 {
                return Err(fail(format!("exact case {case}: eps' = {}", cert.eps_prime)));
            }
            exact += 1;
        }
    }
    Ok(format!("{} instances ({exact} exact) pass every check", scale.lcc))
}

fn tiny_lcc(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 7);
    let (mut yes, mut skipped) = (0, 0);
    for case in 0..scale.tiny_lcc {
        let n = rng.random_range(6..=12);
        let d_prime = rng.random_range(1..=2);
        let noise = if case % 2 == 0 { 0.0 } else { 1e-6 };
        let p = match gen_planted_lcc(4, d_prime, n, 2, 4.0, noise, 1, rng.random()) {
            Ok(p) => p,
            Err(Error::SearchExhausted { .. }) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let r = &p.report;
        let v = verify_stable_lcc(&p.config, &p.family, 2, r.delta, 4.0, r.eps)?;
        if v.verdict == Verdict::Yes {
            yes += 1;
            if !exhaustive_stable_lcc_check(&p.config, 2, r.delta, 4.0, r.eps)? {
                return Err(fail(format!("case {case}: YES verdict refuted by exhaustive search")));
            }
        }
    }
    if yes == 0 && scale.tiny_lcc > 0 {
        return Err(fail("no YES verdicts to compare".into()));
    }
    Ok(format!("{yes} YES verdicts confirmed, {skipped} searches exhausted"))
}

fn perturbation(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 8);
    let mut tightest: f64 = 0.0;
    for case in 0..scale.perturbation {
        let q = rng.random_range(1..=3);
        let noise = if case % 2 == 0 { 0.0 } else { 1e-4 };
        let p = gen_planted_lcc(6, q, rng.random_range(20..=60), q, 4.0, noise, 1, rng.random())?;
        let alpha = rng.random_range(0.0..0.1);
        let out = perturb_stable_lcc(&p.config, &p.family, alpha, rng.random())?;
        if out.max_residual > out.eps_bound {
            return Err(fail(format!("case {case}: residual {} > {}", out.max_residual, out.eps_bound)));
        }
        if out.eps_bound > 0.0 {
            tightest = tightest.max(out.max_residual / out.eps_bound);
        }
    }
    Ok(format!("{} perturbations, largest residual/bound {tightest:.3}", scale.perturbation))
}

fn bracket(scale: &Scale, seed: u64) -> Result<String> {
    let mut rng = rng_for(seed, 9);
    for case in 0..scale.bracket {
        let n = rng.random_range(1..=30);
        let d = rng.random_range(1..=10);
        let pts: Vec<CVector> = (0..n)
            .map(|_| CVector::from_fn(d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        let v = PointConfig::new(pts)?;
        let mut eps: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.5)).collect();
        eps.sort_by(f64::total_cmp);
        let brackets = eps.iter().map(|&e| dim_eps_bracket(&v, e)).collect::<Result<Vec<_>>>()?;
        for (x, y) in brackets.iter().tuple_windows() {
            if x.lower > x.upper || y.lower > x.lower || y.upper > x.upper {
                return Err(fail(format!("case {case}: brackets {x:?} then {y:?}")));
            }
        }
        if brackets.last().is_some_and(|b| b.lower > b.upper) {
            return Err(fail(format!("case {case}: inverted bracket")));
        }
    }
    Ok(format!("{} configurations, 4 radii each", scale.bracket))
}

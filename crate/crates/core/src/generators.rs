//! Instance generators: the counterexample configurations, a greedy sphere
//! packing and planted positive instances with known ground truth.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::collinearity::{arc_distance, line_distance, tube_census, TubeKind, TubeQuery};
use crate::designs::{collect_witnessed, design_parameters, hypothesis_from};
use crate::error::{Error, Result};
use crate::geometry::{
    check_balanced, check_phase_separated, check_separated, dist_to_subspace, norm, phase_distance, CMatrix,
    CVector, PointConfig, Subspace, C64, SLACK,
};
use crate::lcc::{find_decoding_families, DecodingFamily};

/// Candidate samples drawn by [`gen_sphere_packing`] unless overridden.
pub const DEFAULT_PACKING_BUDGET: usize = 4000;

/// What to generate. Randomized kinds require a seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GeneratorSpec {
    ExampleAffine {
        b: f64,
        d: usize,
    },
    ExampleChain {
        b: f64,
        d: usize,
    },
    SpherePacking {
        d: usize,
        mu: f64,
        seed: u64,
        #[serde(default = "default_budget")]
        budget: usize,
    },
    PlantedAffine {
        d: usize,
        k_planted: usize,
        n: usize,
        b: f64,
        noise: f64,
        seed: u64,
    },
    PlantedProjective {
        d: usize,
        n: usize,
        mu: f64,
        noise: f64,
        seed: u64,
    },
    PlantedLcc {
        d: usize,
        d_prime: usize,
        n: usize,
        q: usize,
        b: f64,
        noise: f64,
        seed: u64,
        #[serde(default = "default_copies")]
        copies: usize,
    },
}

fn default_budget() -> usize {
    DEFAULT_PACKING_BUDGET
}

fn default_copies() -> usize {
    1
}

/// A generated configuration with its verification record.
#[derive(Clone, Debug, PartialEq)]
pub struct Generated {
    pub config: PointConfig,
    pub metadata: Value,
    pub ground_truth: Option<Subspace>,
    pub family: Option<DecodingFamily>,
}

pub fn generate(spec: &GeneratorSpec) -> Result<Generated> {
    Ok(match *spec {
        GeneratorSpec::ExampleAffine { b, d } => {
            let (config, m) = gen_example_affine(b, d)?;
            Generated { config, metadata: serde_json::to_value(&m)?, ground_truth: None, family: None }
        }
        GeneratorSpec::ExampleChain { b, d } => {
            let (config, m) = gen_example_chain(b, d)?;
            Generated { config, metadata: serde_json::to_value(&m)?, ground_truth: None, family: None }
        }
        GeneratorSpec::SpherePacking { d, mu, seed, budget } => {
            let (config, m) = gen_sphere_packing(d, mu, seed, budget)?;
            Generated { config, metadata: serde_json::to_value(&m)?, ground_truth: None, family: None }
        }
        GeneratorSpec::PlantedAffine { d, k_planted, n, b, noise, seed } => {
            let p = gen_planted_affine(d, k_planted, n, b, noise, seed)?;
            Generated { config: p.config, metadata: serde_json::to_value(&p.report)?, ground_truth: Some(p.ground_truth), family: None }
        }
        GeneratorSpec::PlantedProjective { d, n, mu, noise, seed } => {
            let p = gen_planted_projective(d, n, mu, noise, seed)?;
            Generated { config: p.config, metadata: serde_json::to_value(&p.report)?, ground_truth: Some(p.ground_truth), family: None }
        }
        GeneratorSpec::PlantedLcc { d, d_prime, n, q, b, noise, seed, copies } => {
            let p = gen_planted_lcc(d, d_prime, n, q, b, noise, copies, seed)?;
            Generated {
                config: p.config,
                metadata: serde_json::to_value(&p.report)?,
                ground_truth: Some(p.ground_truth),
                family: Some(p.family),
            }
        }
    })
}

fn real(x: f64) -> C64 {
    C64::new(x, 0.0)
}

fn basis_point(d: usize, i: usize, scale: f64) -> CVector {
    let mut v = CVector::zeros(d);
    v[i] = real(scale);
    v
}

fn gaussian(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    CVector::from_fn(d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// A uniformly random orthonormal `d x k` frame.
fn random_frame(rng: &mut ChaCha8Rng, d: usize, k: usize) -> CMatrix {
    let g = CMatrix::from_fn(d, k, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    g.qr().q()
}

/// Random displacement of norm at most `radius`.
fn displacement(rng: &mut ChaCha8Rng, d: usize, radius: f64) -> CVector {
    let z = gaussian(rng, d);
    let zn = norm(&z);
    let r = radius * rng.random_range(0.0..=1.0);
    if zn > 0.0 {
        z * real(r / zn)
    } else {
        z
    }
}

fn frame_subspace(frame: &CMatrix) -> Result<Subspace> {
    Subspace::new(frame.nrows(), frame.column_iter().map(|c| c.into_owned()).collect())
}

fn max_distance_to(v: &PointConfig, l: &Subspace) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for p in v.points() {
        worst = worst.max(dist_to_subspace(p, l)?.0);
    }
    Ok(worst)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleAffineReport {
    pub b: f64,
    pub d: usize,
    /// Largest `dist(u_i, line(v_i, e_j))`.
    pub u_tube: f64,
    /// Largest `dist(v_i, line(u_i, e_j))`.
    pub v_tube: f64,
    pub u_within_inv_b: bool,
    pub v_within_inv_b: bool,
    /// Both conditions at `1/(B-1)`.
    pub within_inv_b_minus_one: bool,
}

/// `{e_i, (B-1) e_i, B e_i}` for `i < d`.
pub fn gen_example_affine(b: f64, d: usize) -> Result<(PointConfig, ExampleAffineReport)> {
    if !(b > 2.0 && b.is_finite()) || d < 2 {
        return Err(Error::InvalidInput(format!("need B > 2 and d >= 2, got B = {b}, d = {d}")));
    }
    let mut pts = Vec::with_capacity(3 * d);
    for i in 0..d {
        pts.push(basis_point(d, i, 1.0));
        pts.push(basis_point(d, i, b - 1.0));
        pts.push(basis_point(d, i, b));
    }
    let v = PointConfig::new(pts)?;
    let (e, u, w) = (|i: usize| 3 * i, |i: usize| 3 * i + 1, |i: usize| 3 * i + 2);
    let (mut u_tube, mut v_tube): (f64, f64) = (0.0, 0.0);
    for i in 0..d {
        for j in (0..d).filter(|&j| j != i) {
            u_tube = u_tube.max(line_distance(v.point(u(i)), v.point(w(i)), v.point(e(j)))?.0);
            v_tube = v_tube.max(line_distance(v.point(w(i)), v.point(u(i)), v.point(e(j)))?.0);
        }
    }
    let report = ExampleAffineReport {
        b,
        d,
        u_tube,
        v_tube,
        u_within_inv_b: u_tube <= 1.0 / b + SLACK,
        v_within_inv_b: v_tube <= 1.0 / b + SLACK,
        within_inv_b_minus_one: u_tube.max(v_tube) <= 1.0 / (b - 1.0) + SLACK,
    };
    if !report.u_within_inv_b || !report.within_inv_b_minus_one {
        return Err(Error::invariant(format!("example tubes out of range: {report:?}")));
    }
    Ok((v, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleChainReport {
    pub b: f64,
    pub d: usize,
    /// Max over pairs of the smallest third-point line distance.
    pub measured_eps: f64,
    /// `measured_eps * B`.
    pub constant: f64,
    pub worst_pair: [usize; 2],
}

/// Largest `B^(d-1)` accepted; keeps squared norms finite.
const CHAIN_MAX_SCALE: f64 = 1e150;

/// `{0} ∪ {B^(i-1) e_i, (B^(i-1) + 1) e_i}`.
pub fn gen_example_chain(b: f64, d: usize) -> Result<(PointConfig, ExampleChainReport)> {
    if !(b > 4.0 && b.is_finite()) || d < 2 {
        return Err(Error::InvalidInput(format!("need B > 4 and d >= 2, got B = {b}, d = {d}")));
    }
    let top = b.powi(d as i32 - 1);
    if !(top <= CHAIN_MAX_SCALE) {
        return Err(Error::InvalidInput(format!("B^(d-1) = {top} overflows the supported range")));
    }
    let mut pts = vec![CVector::zeros(d)];
    for i in 0..d {
        let s = b.powi(i as i32);
        pts.push(basis_point(d, i, s));
        pts.push(basis_point(d, i, s + 1.0));
    }
    let v = PointConfig::new(pts)?;
    let n = v.len();
    let mut measured: f64 = 0.0;
    let mut worst_pair = [0, 1];
    for a in 0..n {
        for c in a + 1..n {
            let mut best = f64::INFINITY;
            for w in (0..n).filter(|&w| w != a && w != c) {
                best = best.min(line_distance(v.point(w), v.point(a), v.point(c))?.0);
            }
            if best > measured {
                measured = best;
                worst_pair = [a, c];
            }
        }
    }
    Ok((
        v,
        ExampleChainReport {
            b,
            d,
            measured_eps: measured,
            constant: measured * b,
            worst_pair,
        },
    ))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PackingReport {
    pub d: usize,
    pub mu: f64,
    pub budget: usize,
    pub points: usize,
    pub min_separation: f64,
    /// Largest distance from a probe sample to the packing.
    pub largest_gap: f64,
    /// Most extra points found in one pair's arc tube of radius `mu`.
    pub max_arc_census: usize,
    pub census_pair: Option<[usize; 2]>,
}

fn antipodal_distance(u: &CVector, w: &CVector) -> f64 {
    norm(&(u - w)).min(norm(&(u + w)))
}

fn random_real_unit(rng: &mut ChaCha8Rng, d: usize) -> CVector {
    loop {
        let x = CVector::from_fn(d, |_, _| real(rng.sample(StandardNormal)));
        let n = norm(&x);
        if n > 1e-6 {
            return x * real(1.0 / n);
        }
    }
}

/// Greedy packing of real unit vectors in `R^d`, pairwise at least `mu`
/// apart up to sign, from `budget` seeded samples.
pub fn gen_sphere_packing(d: usize, mu: f64, seed: u64, budget: usize) -> Result<(PointConfig, PackingReport)> {
    if !(mu > 0.0 && mu < 1.0) || d < 2 || budget == 0 {
        return Err(Error::InvalidInput(format!(
            "need 0 < mu < 1, d >= 2 and a positive budget, got mu = {mu}, d = {d}, budget = {budget}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts: Vec<CVector> = Vec::new();
    for _ in 0..budget {
        let x = random_real_unit(&mut rng, d);
        if pts.iter().all(|p| antipodal_distance(p, &x) >= mu) {
            pts.push(x);
        }
    }
    let mut largest_gap: f64 = 0.0;
    for _ in 0..budget {
        let x = random_real_unit(&mut rng, d);
        let gap = pts.iter().map(|p| antipodal_distance(p, &x)).fold(f64::INFINITY, f64::min);
        largest_gap = largest_gap.max(gap);
    }
    let v = PointConfig::new(pts)?;
    let sep = check_separated(&v, mu)?;
    if !sep.holds {
        return Err(Error::invariant(format!("packing is not separated: {:?}", sep.witness)));
    }
    let q = TubeQuery::new(TubeKind::SphericalArc, mu)?;
    let (mut max_arc_census, mut census_pair) = (0, None);
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let c = tube_census(&v, i, j, q)?.len();
            if c > max_arc_census {
                max_arc_census = c;
                census_pair = Some([i, j]);
            }
        }
    }
    let report = PackingReport {
        d,
        mu,
        budget,
        points: v.len(),
        min_separation: sep.min_distance,
        largest_gap,
        max_arc_census,
        census_pair,
    };
    Ok((v, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedReport {
    pub n: usize,
    pub d: usize,
    pub planted_dim: usize,
    pub noise: f64,
    /// Noise level at which the planted triples are guaranteed to lie in
    /// their tubes.
    pub eps: f64,
    /// Largest partner fraction every point meets at `eps`.
    pub delta: f64,
    pub p: usize,
    pub g: usize,
    pub max_ground_truth_distance: f64,
    /// `max pairwise distance` (affine) or the separation (projective).
    pub scale: f64,
    /// Whether `eps` clears the noise gate of the setting.
    pub gate_clear: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Planted {
    pub config: PointConfig,
    pub ground_truth: Subspace,
    pub report: PlantedReport,
}

/// Shells `|x|^2 = s` of `Z^dim`, smallest first, until `n` points or the
/// radius bound is reached.
fn lattice_shells(dim: usize, r2_max: i64, n: usize) -> Vec<Vec<Vec<i64>>> {
    fn rec(dim: usize, left: i64, cur: &mut Vec<i64>, out: &mut Vec<Vec<i64>>) {
        if cur.len() == dim {
            if left == 0 {
                out.push(cur.clone());
            }
            return;
        }
        let r = (left as f64).sqrt().floor() as i64;
        for x in -r..=r {
            cur.push(x);
            rec(dim, left - x * x, cur, out);
            cur.pop();
        }
    }
    let mut shells = Vec::new();
    let mut total = 0;
    for s in 0..=r2_max {
        let mut out = Vec::new();
        rec(dim, s, &mut Vec::with_capacity(dim), &mut out);
        total += out.len();
        shells.push(out);
        if total >= n {
            break;
        }
    }
    shells
}

/// Groups lattice points into orbits `{x, ix, -x, -ix}` under the units of
/// `Z[i]` acting on each complex coordinate `(x[2r], x[2r+1])`.
fn unit_orbits(shell: Vec<Vec<i64>>) -> Vec<Vec<Vec<i64>>> {
    let times_i = |x: &[i64]| -> Vec<i64> { x.chunks(2).flat_map(|c| [-c[1], c[0]]).collect() };
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for x in shell {
        if seen.contains(&x) {
            continue;
        }
        let mut orbit = vec![x.clone()];
        let mut y = times_i(&x);
        while y != x {
            orbit.push(y.clone());
            y = times_i(&y);
        }
        seen.extend(orbit.iter().cloned());
        out.push(orbit);
    }
    out
}

/// Points of the Gaussian-integer lattice `Z[i]^k` nearest the origin,
/// scaled to be `B`-balanced after noise, embedded by a random frame of
/// `C^d` and moved by at most `noise`.
pub fn gen_planted_affine(d: usize, k: usize, n: usize, b: f64, noise: f64, seed: u64) -> Result<Planted> {
    if k == 0 || k > d || n < 3 {
        return Err(Error::InvalidInput(format!("need 1 <= k <= d and n >= 3, got k = {k}, d = {d}, n = {n}")));
    }
    if !(b > 2.0 && b.is_finite()) || !(noise >= 0.0 && noise < 1.0 / (16.0 * b)) {
        return Err(Error::InvalidInput(format!("need B > 2 and 0 <= noise < 1/(16B), got B = {b}, noise = {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1.0 + 2.0 * noise;
    let radius = (b - 2.0 * noise) / (2.0 * step);
    let r2_max = (radius * radius + 1e-9).floor() as i64;
    let shells = lattice_shells(2 * k, r2_max, n);
    let available: usize = shells.iter().map(Vec::len).sum();
    if available < n {
        return Err(Error::InvalidInput(format!(
            "only {available} lattice points fit a B = {b} balanced set in complex dimension {k}, wanted {n}"
        )));
    }
    let mut chosen: Vec<Vec<i64>> = Vec::with_capacity(n);
    for shell in shells {
        if chosen.len() + shell.len() <= n {
            chosen.extend(shell);
        } else {
            let need = n - chosen.len();
            let mut orbits = unit_orbits(shell);
            let order = rand::seq::index::sample(&mut rng, orbits.len(), orbits.len()).into_vec();
            // whole orbits, then a partial one of at least two points
            let mut sizes = vec![4; need / 4];
            match need % 4 {
                0 => {}
                1 => {
                    // 4a + 1 = 4(a - 1) + 2 + 3, or borrow from the full shells
                    if sizes.pop().is_some() {
                        sizes.extend([2, 3]);
                    } else {
                        chosen.pop();
                        sizes.push(2);
                    }
                }
                r => sizes.push(r),
            }
            for (size, &o) in sizes.iter().zip(&order) {
                chosen.extend(std::mem::take(&mut orbits[o]).into_iter().take(*size));
            }
        }
        if chosen.len() == n {
            break;
        }
    }
    let frame = random_frame(&mut rng, d, k);
    let pts: Vec<CVector> = chosen
        .iter()
        .map(|x| {
            let coords = CVector::from_fn(k, |r, _| C64::new(x[2 * r] as f64, x[2 * r + 1] as f64) * step);
            &frame * coords + displacement(&mut rng, d, noise)
        })
        .collect();
    let v = PointConfig::new(pts)?;
    let ground_truth = frame_subspace(&frame)?;
    let bal = check_balanced(&v, b);
    if !bal.holds {
        return Err(Error::invariant(format!("planted set is not {b}-balanced: {:?}", bal.witness)));
    }
    let eps = if noise > 0.0 { (2.0 * b + 2.0) * noise } else { 1e-9 };
    let report = planted_report(&v, &ground_truth, noise, eps, TubeKind::AffineLine, bal.max_distance, eps < 1.0 / (16.0 * b))?;
    if report.max_ground_truth_distance > noise + SLACK {
        return Err(Error::invariant("planted points left the noise ball"));
    }
    Ok(Planted { config: v, ground_truth, report })
}

fn planted_report(
    v: &PointConfig,
    l: &Subspace,
    noise: f64,
    eps: f64,
    kind: TubeKind,
    scale: f64,
    gate_clear: bool,
) -> Result<PlantedReport> {
    let col = collect_witnessed(v, TubeQuery::new(kind, eps)?)?;
    let h = hypothesis_from(&col, 0.0);
    let min_count = h.counts.iter().copied().min().unwrap_or(0);
    let delta = min_count as f64 / (v.len() - 1) as f64;
    if delta <= 0.0 {
        return Err(Error::invariant("some planted point has no partner at the recommended eps"));
    }
    let dp = design_parameters(&col.family);
    Ok(PlantedReport {
        n: v.len(),
        d: v.dim(),
        planted_dim: l.dim(),
        noise,
        eps,
        delta,
        p: dp.p,
        g: dp.g,
        max_ground_truth_distance: max_distance_to(v, l)?,
        scale,
        gate_clear,
    })
}

/// Unit vectors on mutually orthogonal complex 2-planes, at most
/// `floor(8/mu)` per plane, phase-separated by `mu` after noise.
pub fn gen_planted_projective(d: usize, n: usize, mu: f64, noise: f64, seed: u64) -> Result<Planted> {
    if !(mu > 0.0 && mu < 1.0) || n < 3 {
        return Err(Error::InvalidInput(format!("need 0 < mu < 1 and n >= 3, got mu = {mu}, n = {n}")));
    }
    if !(noise >= 0.0 && noise < mu * mu / 32.0) {
        return Err(Error::InvalidInput(format!("need 0 <= noise < mu^2/32, got {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cap = (8.0 / mu).floor() as usize;
    let sep = mu + 4.0 * noise;
    let mut pattern: Vec<CVector> = Vec::new();
    for _ in 0..400 * cap {
        if pattern.len() == cap {
            break;
        }
        let z = gaussian(&mut rng, 2);
        let z = &z * real(1.0 / norm(&z));
        if pattern.iter().all(|p| phase_distance(p, &z) >= sep) {
            pattern.push(z);
        }
    }
    let m = pattern.len();
    let planes = n.div_ceil(m);
    if m < 3 || n / planes < 3 {
        return Err(Error::InvalidInput(format!(
            "only {m} points per plane fit separation {mu}; need at least 3 per plane"
        )));
    }
    if 2 * planes > d {
        return Err(Error::InvalidInput(format!("{planes} orthogonal planes need d >= {}, got {d}", 2 * planes)));
    }
    let frame = random_frame(&mut rng, d, 2 * planes);
    let mut pts = Vec::with_capacity(n);
    for p in 0..planes {
        let size = n / planes + usize::from(p < n % planes);
        let plane = frame.columns(2 * p, 2);
        for z in pattern.iter().take(size) {
            let x = plane * z + displacement(&mut rng, d, noise);
            pts.push(&x * real(1.0 / norm(&x)));
        }
    }
    let v = PointConfig::new(pts)?;
    let ground_truth = frame_subspace(&frame)?;
    let ps = check_phase_separated(&v, mu)?;
    if !ps.holds {
        return Err(Error::invariant(format!("planted set is not phase-separated: {:?}", ps.witness)));
    }
    // same-plane triples are exact without noise; measure what noise did
    let mut worst: f64 = 0.0;
    let mut start = 0;
    for p in 0..planes {
        let size = n / planes + usize::from(p < n % planes);
        for i in start..start + size {
            for j in start..start + size {
                for w in start..start + size {
                    if i != j && w != i && w != j {
                        worst = worst.max(arc_distance(v.point(w), v.point(i), v.point(j))?.dist);
                    }
                }
            }
        }
        start += size;
    }
    let eps = (2.0 * worst).max(1e-9);
    let report = planted_report(&v, &ground_truth, noise, eps, TubeKind::SphericalArc, mu, eps < mu * mu / 32.0)?;
    Ok(Planted { config: v, ground_truth, report })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlantedLccReport {
    pub n: usize,
    pub d: usize,
    pub d_prime: usize,
    pub q: usize,
    pub b: f64,
    pub noise: f64,
    pub copies: usize,
    /// `(qB + 1) noise`.
    pub eps: f64,
    pub k: usize,
    /// `(k - 1)/n`, so that `k > delta n`.
    pub delta: f64,
    pub max_residual: f64,
    pub max_ground_truth_distance: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PlantedLcc {
    pub config: PointConfig,
    pub ground_truth: Subspace,
    pub family: DecodingFamily,
    pub report: PlantedLccReport,
}

/// Points in a random `d'`-dimensional subspace (each repeated `copies`
/// times), moved by at most `noise`, with a decoding family as large as the
/// seeded search finds.
#[allow(clippy::too_many_arguments)]
pub fn gen_planted_lcc(
    d: usize,
    d_prime: usize,
    n: usize,
    q: usize,
    b: f64,
    noise: f64,
    copies: usize,
    seed: u64,
) -> Result<PlantedLcc> {
    if d_prime == 0 || d_prime > d || (q < d_prime && copies == 1) || copies == 0 || n < 2 * q + 2 {
        return Err(Error::InvalidInput(format!(
            "need 1 <= d' <= d, q >= d' unless points repeat, copies >= 1, n >= 2q + 2; got d = {d}, d' = {d_prime}, q = {q}, n = {n}"
        )));
    }
    if !(b >= 1.0 && b.is_finite()) || !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidInput(format!("need B >= 1 and noise >= 0, got B = {b}, noise = {noise}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = random_frame(&mut rng, d, d_prime);
    let mut base = Vec::new();
    let scale = 1.0 / (d_prime as f64).sqrt();
    for _ in 0..n.div_ceil(copies) {
        let c = CVector::from_fn(d_prime, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale
        });
        base.push(&frame * c);
    }
    let pts: Vec<CVector> = (0..n).map(|i| &base[i / copies] + displacement(&mut rng, d, noise)).collect();
    let v = PointConfig::new(pts)?;
    let ground_truth = frame_subspace(&frame)?;
    let eps = (q as f64 * b + 1.0) * noise;
    let mut k = ((n - 1) / q / 2).max(2);
    let family = loop {
        match find_decoding_families(&v, q, b, eps, k, rng.random()) {
            Ok(f) => break f,
            Err(Error::SearchExhausted { .. }) if k > 2 => k = (k * 4 / 5).max(2),
            Err(e) => return Err(e),
        }
    };
    family.validate(&v)?;
    let max_residual = family.tuples.iter().flatten().map(|t| t.residual).fold(0.0, f64::max);
    let report = PlantedLccReport {
        n,
        d,
        d_prime,
        q,
        b,
        noise,
        copies,
        eps,
        k,
        delta: (k - 1) as f64 / n as f64,
        max_residual,
        max_ground_truth_distance: max_distance_to(&v, &ground_truth)?,
    };
    Ok(PlantedLcc { config: v, ground_truth, family, report })
}

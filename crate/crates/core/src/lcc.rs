//! Stable locally correctable configurations: recovery tuples, decoding
//! families, the block matrix they induce and the dimension bound it yields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::checks::{all_hold, Check};
use crate::error::{Error, Result};
use crate::geometry::{
    dist_to_subspace, hermitian_eigen, norm, svd, CMatrix, CVector, PointConfig, Subspace, C64, SLACK,
};
use crate::spectral::{offdiag_sq_sum, small_eig_count_bound, transfer_to_rows};

/// Relative singular-value cutoff of the minimum-norm least-squares solver.
const LS_RANK_TOL: f64 = 1e-12;

/// Largest configuration the exhaustive check accepts.
pub const EXHAUSTIVE_MAX_N: usize = 12;

/// `v_target ≈ sum_j b_j v_j` over `support`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryTuple {
    pub target: usize,
    pub support: Vec<usize>,
    pub coefficients: Vec<C64>,
    pub residual: f64,
}

impl RecoveryTuple {
    pub fn evaluate(&self, v: &PointConfig) -> f64 {
        recovery_residual(v, self.target, &self.support, &self.coefficients)
    }

    pub fn max_coefficient(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn recovery_residual(v: &PointConfig, target: usize, support: &[usize], coef: &[C64]) -> f64 {
    let mut r = v.point(target).clone();
    for (&j, &b) in support.iter().zip(coef) {
        r.axpy(-b, v.point(j), C64::new(1.0, 0.0));
    }
    norm(&r)
}

/// Minimum-norm least-squares coefficients of `v_target` over `support`.
fn least_squares(v: &PointConfig, target: usize, support: &[usize]) -> Result<(Vec<C64>, f64)> {
    let a = CMatrix::from_fn(v.dim(), support.len(), |r, c| v.point(support[c])[r]);
    let spec = svd(&a)?;
    let top = spec.singular_values.first().copied().unwrap_or(0.0);
    let rhs = v.point(target);
    let mut b = CVector::zeros(support.len());
    for (k, &s) in spec.singular_values.iter().enumerate() {
        if s <= LS_RANK_TOL * top || s == 0.0 {
            break;
        }
        let uk = spec.left_vectors.column(k);
        let coef = uk.iter().zip(rhs.iter()).map(|(u, x)| u.conj() * x).sum::<C64>() / s;
        b.axpy(coef, &spec.right_vectors.column(k).into_owned(), C64::new(1.0, 0.0));
    }
    let coef: Vec<C64> = b.iter().copied().collect();
    let resid = recovery_residual(v, target, support, &coef);
    Ok((coef, resid))
}

/// For each point, disjoint recovery tuples.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecodingFamily {
    pub n: usize,
    pub q: usize,
    pub b: f64,
    pub eps: f64,
    pub tuples: Vec<Vec<RecoveryTuple>>,
}

impl DecodingFamily {
    /// Tuples per point (the family is uniform).
    pub fn k(&self) -> usize {
        self.tuples.first().map_or(0, Vec::len)
    }

    /// Checks supports, coefficient bounds, residuals, disjointness and
    /// uniformity against `v`.
    pub fn validate(&self, v: &PointConfig) -> Result<()> {
        if self.n != v.len() || self.tuples.len() != self.n {
            return Err(Error::invariant(format!(
                "family covers {} points, configuration has {}",
                self.tuples.len(),
                v.len()
            )));
        }
        let k = self.k();
        for (i, list) in self.tuples.iter().enumerate() {
            if list.len() != k {
                return Err(Error::invariant(format!(
                    "point {i} has {} tuples, point 0 has {k}",
                    list.len()
                )));
            }
            let mut used = vec![false; self.n];
            for t in list {
                if t.target != i {
                    return Err(Error::invariant(format!("tuple listed under {i} targets {}", t.target)));
                }
                if t.support.is_empty() || t.support.len() > self.q {
                    return Err(Error::invariant(format!(
                        "tuple for {i} has support size {} outside [1, {}]",
                        t.support.len(),
                        self.q
                    )));
                }
                if t.coefficients.len() != t.support.len() {
                    return Err(Error::invariant("coefficient and support lengths differ"));
                }
                for &j in &t.support {
                    if j >= self.n || j == i {
                        return Err(Error::invariant(format!("tuple for {i} uses index {j}")));
                    }
                    if used[j] {
                        return Err(Error::invariant(format!(
                            "tuples for point {i} share index {j}"
                        )));
                    }
                    used[j] = true;
                }
                if t.max_coefficient() > self.b + SLACK {
                    return Err(Error::invariant(format!(
                        "tuple for {i} has coefficient {} > B = {}",
                        t.max_coefficient(),
                        self.b
                    )));
                }
                let r = t.evaluate(v);
                if (r - t.residual).abs() > SLACK || r > self.eps + SLACK {
                    return Err(Error::invariant(format!(
                        "tuple for {i} evaluates to {r}, stores {}, eps = {}",
                        t.residual, self.eps
                    )));
                }
            }
        }
        Ok(())
    }
}

fn index_seed(seed: u64, i: usize) -> u64 {
    seed ^ (i as u64).wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Greedy randomized search for `k` disjoint recovery tuples per point.
pub fn find_decoding_families(
    v: &PointConfig,
    q: usize,
    b: f64,
    eps: f64,
    k: usize,
    seed: u64,
) -> Result<DecodingFamily> {
    if q == 0 {
        return Err(Error::InvalidInput("q must be >= 1".into()));
    }
    if !(b >= 1.0) {
        return Err(Error::InvalidInput(format!("B must be >= 1, got {b}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput(format!("eps must be >= 0, got {eps}")));
    }
    let n = v.len();
    let budget = 200 + 40 * n;
    let mut tuples = Vec::with_capacity(n);
    for i in 0..n {
        let mut rng = ChaCha8Rng::seed_from_u64(index_seed(seed, i));
        let mut avail: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut found = Vec::with_capacity(k);
        let mut attempts = 0;
        while found.len() < k && attempts < budget && !avail.is_empty() {
            attempts += 1;
            let size = rng.random_range(1..=q.min(avail.len()));
            let picks = rand::seq::index::sample(&mut rng, avail.len(), size).into_vec();
            let mut support: Vec<usize> = picks.iter().map(|&p| avail[p]).collect();
            support.sort_unstable();
            let (coefficients, residual) = least_squares(v, i, &support)?;
            let max_b = coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max);
            if max_b > b + SLACK || residual > eps + SLACK {
                continue;
            }
            avail.retain(|j| support.binary_search(j).is_err());
            found.push(RecoveryTuple {
                target: i,
                support,
                coefficients,
                residual,
            });
        }
        if found.len() < k {
            return Err(Error::SearchExhausted {
                index: i,
                found: found.len(),
                wanted: k,
            });
        }
        tuples.push(found);
    }
    Ok(DecodingFamily { n, q, b, eps, tuples })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// More disjoint tuples than erasures: every erasure set misses one.
    Yes,
    /// Too few disjoint tuples for the pigeonhole argument.
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LccVerdict {
    pub verdict: Verdict,
    pub k: usize,
    /// `delta n`.
    pub erasures: f64,
    /// `k - delta n`.
    pub margin: f64,
}

/// `floor(delta n)` tolerant of rounding just below an integer.
fn erasure_budget(delta: f64, n: usize) -> usize {
    (delta * n as f64 + 1e-9).floor().max(0.0) as usize
}

pub fn verify_stable_lcc(
    v: &PointConfig,
    family: &DecodingFamily,
    q: usize,
    delta: f64,
    b: f64,
    eps: f64,
) -> Result<LccVerdict> {
    if family.q > q || family.b > b + SLACK || family.eps > eps + SLACK {
        return Err(Error::invariant(format!(
            "family built for (q={}, B={}, eps={}) exceeds (q={q}, B={b}, eps={eps})",
            family.q, family.b, family.eps
        )));
    }
    family.validate(v)?;
    let k = family.k();
    let erasures = delta * v.len() as f64;
    let verdict = if k > erasure_budget(delta, v.len()) {
        Verdict::Yes
    } else {
        Verdict::Unknown
    };
    Ok(LccVerdict {
        verdict,
        k,
        erasures,
        margin: k as f64 - erasures,
    })
}

/// Decides the erasure condition by brute force for `n <= 12`.
///
/// A support `J` counts as usable when its least-squares coefficients are
/// bounded by `B` with residual at most `eps`, or when clipping them to
/// magnitude `B` still leaves residual at most `eps`.
pub fn exhaustive_stable_lcc_check(
    v: &PointConfig,
    q: usize,
    delta: f64,
    b: f64,
    eps: f64,
) -> Result<bool> {
    let n = v.len();
    if n > EXHAUSTIVE_MAX_N {
        return Err(Error::InvalidInput(format!(
            "exhaustive check is limited to n <= {EXHAUSTIVE_MAX_N}, got {n}"
        )));
    }
    let s = erasure_budget(delta, n).min(n.saturating_sub(1));
    for i in 0..n {
        let others: Vec<usize> = (0..n).filter(|&j| j != i).collect();
        let mut usable: Vec<u32> = Vec::new();
        for mask in 1u32..(1 << others.len()) {
            if mask.count_ones() as usize > q {
                continue;
            }
            let support: Vec<usize> = (0..others.len())
                .filter(|&p| mask & (1 << p) != 0)
                .map(|p| others[p])
                .collect();
            let (coef, resid) = least_squares(v, i, &support)?;
            let bounded = coef.iter().all(|c| c.norm() <= b + SLACK);
            let ok = if bounded {
                resid <= eps + SLACK
            } else {
                let clipped: Vec<C64> = coef
                    .iter()
                    .map(|&c| if c.norm() > b { c * (b / c.norm()) } else { c })
                    .collect();
                recovery_residual(v, i, &support, &clipped) <= eps + SLACK
            };
            if ok {
                usable.push(mask);
            }
        }
        for erase in 0u32..(1 << others.len()) {
            if erase.count_ones() as usize != s {
                continue;
            }
            if !usable.iter().any(|&j| j & erase == 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LccRow {
    /// Ascending, includes the block's target.
    pub support: Vec<usize>,
    pub values: Vec<C64>,
}

/// `n` blocks of `k` rows; each row is `e_i - sum_j b_j e_j` for one
/// recovery tuple of point `i`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LccMatrix {
    pub n: usize,
    pub k: usize,
    pub blocks: Vec<Vec<LccRow>>,
}

impl LccMatrix {
    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.n * self.k, self.n);
        for (bi, block) in self.blocks.iter().enumerate() {
            for (r, row) in block.iter().enumerate() {
                for (&j, &x) in row.support.iter().zip(&row.values) {
                    m[(bi * self.k + r, j)] = x;
                }
            }
        }
        m
    }

    /// Rejects blocks whose rows overlap outside the target or miss the
    /// unit entry at the target.
    pub fn check_blocks(&self) -> Result<()> {
        for (i, block) in self.blocks.iter().enumerate() {
            let mut seen = vec![false; self.n];
            for row in block {
                let at = row
                    .support
                    .iter()
                    .position(|&j| j == i)
                    .ok_or_else(|| Error::invariant(format!("row of block {i} misses column {i}")))?;
                if row.values[at] != C64::new(1.0, 0.0) {
                    return Err(Error::invariant(format!("row of block {i} has {} at column {i}", row.values[at])));
                }
                for &j in &row.support {
                    if j != i {
                        if seen[j] {
                            return Err(Error::invariant(format!(
                                "rows of block {i} overlap at column {j}"
                            )));
                        }
                        seen[j] = true;
                    }
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LccMatrixCheck {
    pub row_residual_max: f64,
    pub e_norm_sq: f64,
    /// `n k eps^2`.
    pub e_bound: f64,
}

pub fn build_lcc_matrix(v: &PointConfig, family: &DecodingFamily, eps: f64) -> Result<(LccMatrix, LccMatrixCheck)> {
    if family.n != v.len() || family.tuples.len() != v.len() {
        return Err(Error::invariant("family and configuration sizes differ"));
    }
    let k = family.k();
    let mut blocks = Vec::with_capacity(family.n);
    let mut row_residual_max: f64 = 0.0;
    let mut e_norm_sq = 0.0;
    for (i, list) in family.tuples.iter().enumerate() {
        if list.len() != k {
            return Err(Error::invariant(format!("point {i} has {} tuples, expected {k}", list.len())));
        }
        let mut rows = Vec::with_capacity(k);
        for t in list {
            if t.target != i || t.support.contains(&i) {
                return Err(Error::invariant(format!("malformed tuple under point {i}")));
            }
            let mut pairs: Vec<(usize, C64)> = vec![(i, C64::new(1.0, 0.0))];
            pairs.extend(t.support.iter().zip(&t.coefficients).map(|(&j, &b)| (j, -b)));
            pairs.sort_by_key(|&(j, _)| j);
            let r = t.evaluate(v);
            if (r - t.residual).abs() > SLACK {
                return Err(Error::invariant(format!(
                    "tuple for {i} evaluates to {r} but stores {}",
                    t.residual
                )));
            }
            if r > eps + SLACK {
                return Err(Error::invariant(format!("tuple for {i} has residual {r} > eps = {eps}")));
            }
            row_residual_max = row_residual_max.max(r);
            e_norm_sq += r * r;
            rows.push(LccRow {
                support: pairs.iter().map(|p| p.0).collect(),
                values: pairs.iter().map(|p| p.1).collect(),
            });
        }
        blocks.push(rows);
    }
    let m = LccMatrix { n: family.n, k, blocks };
    m.check_blocks()?;
    let check = LccMatrixCheck {
        row_residual_max,
        e_norm_sq,
        e_bound: (family.n * k) as f64 * eps * eps,
    };
    Ok((m, check))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Contraction {
    pub m_hat: CMatrix,
    pub e_hat: CMatrix,
    pub diag_min: f64,
    pub diag_max: f64,
    pub offdiag_max: f64,
    pub e_norm_sq: f64,
    pub e_hat_norm_sq: f64,
}

/// Sums each block: row `i` of the results is the sum of block `i`'s rows
/// of `M` and of `E`.
pub fn contract_with_r(m: &LccMatrix, e: &CMatrix) -> Result<Contraction> {
    if e.nrows() != m.n * m.k {
        return Err(Error::DimensionMismatch {
            expected: m.n * m.k,
            got: e.nrows(),
        });
    }
    let mut m_hat = CMatrix::zeros(m.n, m.n);
    let mut e_hat = CMatrix::zeros(m.n, e.ncols());
    for (i, block) in m.blocks.iter().enumerate() {
        for (r, row) in block.iter().enumerate() {
            for (&j, &x) in row.support.iter().zip(&row.values) {
                m_hat[(i, j)] += x;
            }
            let src = e.row(i * m.k + r).into_owned();
            let mut dst = e_hat.row_mut(i);
            dst += src;
        }
    }
    let mut diag_min = f64::INFINITY;
    let mut diag_max: f64 = 0.0;
    let mut offdiag_max: f64 = 0.0;
    for i in 0..m.n {
        for j in 0..m.n {
            let a = m_hat[(i, j)].norm();
            if i == j {
                diag_min = diag_min.min(a);
                diag_max = diag_max.max(a);
            } else {
                offdiag_max = offdiag_max.max(a);
            }
        }
    }
    Ok(Contraction {
        diag_min,
        diag_max,
        offdiag_max,
        e_norm_sq: e.norm_squared(),
        e_hat_norm_sq: e_hat.norm_squared(),
        m_hat,
        e_hat,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LccCertificate {
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub q: usize,
    pub b: f64,
    pub delta: f64,
    pub eps: f64,
    pub verdict: LccVerdict,
    pub subspace: Subspace,
    pub coefficient_dim: usize,
    pub dim: usize,
    /// `2 n^2 (2kB + nB^2)^2 / k^4`.
    pub dim_bound: f64,
    pub column_distance_sum: f64,
    /// `4 n^3 eps^2 / k^2`.
    pub column_bound: f64,
    pub distance_sum: f64,
    /// Radius defining the good set: `tau^2 = 8 n^3 eps^2 / (delta k^2 n)`.
    pub tau: f64,
    pub good_set: Vec<usize>,
    /// Points outside the good set and the tuple (by position) that certified them.
    pub rescued: Vec<(usize, usize)>,
    pub per_point_dists: Vec<f64>,
    pub certified: Vec<f64>,
    pub eps_prime: f64,
    /// `eps + q B tau`.
    pub eps_prime_bound: f64,
    /// `2 (B^2/delta^2 + 2B/delta)^2`.
    pub headline_dim: f64,
    /// `eps (1 + 2 sqrt 2 q B / delta^1.5)`.
    pub headline_eps: f64,
    pub checks: Vec<Check>,
}

impl LccCertificate {
    pub fn passes(&self) -> bool {
        all_hold(&self.checks)
    }
}

/// Builds the contracted matrix, extracts the small singular directions,
/// moves them to the point space and bounds every point's distance.
///
/// With `allow_unknown`, families too small for the pigeonhole certificate
/// are still run; a missing rescue tuple then surfaces as an error.
pub fn lcc_dimension_pipeline(
    v: &PointConfig,
    family: &DecodingFamily,
    q: usize,
    delta: f64,
    b: f64,
    eps: f64,
    allow_unknown: bool,
) -> Result<LccCertificate> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(Error::InvalidInput(format!("delta must lie in (0, 1], got {delta}")));
    }
    let verdict = verify_stable_lcc(v, family, q, delta, b, eps)?;
    if verdict.verdict == Verdict::Unknown && !allow_unknown {
        return Err(Error::hypothesis(format!(
            "k = {} disjoint tuples per point do not exceed delta n = {}",
            verdict.k, verdict.erasures
        )));
    }
    let (n, k) = (v.len(), family.k());
    if k == 0 {
        return Err(Error::hypothesis("decoding family is empty"));
    }
    let (nf, kf) = (n as f64, k as f64);
    let mut checks = vec![Check::ge("k > delta n (margin)", verdict.margin, f64::MIN_POSITIVE)];

    let (m, mcheck) = build_lcc_matrix(v, family, eps)?;
    checks.push(Check::le("||MA||^2 <= n k eps^2", mcheck.e_norm_sq, mcheck.e_bound));
    let a = v.matrix();
    let e = m.to_dense() * &a;
    let con = contract_with_r(&m, &e)?;
    checks.push(Check::ge("diag of R^T M", con.diag_min, kf));
    checks.push(Check::le("diag of R^T M (exact)", con.diag_max, kf));
    checks.push(Check::le("off-diagonal of R^T M", con.offdiag_max, b));
    checks.push(Check::le("||R^T E||^2 <= n ||E||^2", con.e_hat_norm_sq, nf * con.e_norm_sq));

    let x = con.m_hat.adjoint() * &con.m_hat;
    let x_diag_min = (0..n).map(|j| x[(j, j)].re).fold(f64::INFINITY, f64::min);
    let mut x_off_max: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                x_off_max = x_off_max.max(x[(i, j)].norm());
            }
        }
    }
    let off_bound = 2.0 * kf * b + nf * b * b;
    checks.push(Check::ge("diag of X", x_diag_min, kf * kf));
    checks.push(Check::le("off-diagonal of X", x_off_max, off_bound));

    let (vals, vecs) = hermitian_eigen(&x)?;
    let cut = kf / 2.0;
    let kept: Vec<usize> = (0..n).filter(|&j| vals[j].max(0.0).sqrt() < cut).collect();
    let l = Subspace::new(n, kept.iter().map(|&j| vecs.column(j).into_owned()).collect())?;
    let dim_bound = 2.0 * nf * nf * off_bound * off_bound / kf.powi(4);
    checks.push(Check::le(
        "dim L (measured off-diagonal mass)",
        l.dim() as f64,
        small_eig_count_bound(kf * kf, offdiag_sq_sum(&x))?,
    ));
    checks.push(Check::le("dim L", l.dim() as f64, dim_bound));

    let tr = transfer_to_rows(&a, &l)?;
    let column_bound = 4.0 * nf.powi(3) * eps * eps / (kf * kf);
    checks.push(Check::le(
        "column distance sum (measured ||R^T E||)",
        tr.column_distance_sum,
        4.0 * con.e_hat_norm_sq / (kf * kf),
    ));
    checks.push(Check::le("column distance sum", tr.column_distance_sum, column_bound));
    checks.push(Check::le("dim L'", tr.subspace.dim() as f64, l.dim() as f64));
    checks.push(Check::le("row distance sum", tr.row_distance_sum, tr.column_distance_sum));

    let dists = v
        .points()
        .iter()
        .map(|p| dist_to_subspace(p, &tr.subspace).map(|(d, _)| d))
        .collect::<Result<Vec<_>>>()?;
    let tau = (8.0 * nf.powi(3) * eps * eps / (delta * kf * kf * nf)).sqrt();
    let good: Vec<bool> = dists.iter().map(|&d| d <= tau + SLACK).collect();
    let good_set: Vec<usize> = (0..n).filter(|&i| good[i]).collect();
    checks.push(Check::ge(
        "|V'| >= (1 - delta/2) n",
        good_set.len() as f64,
        (1.0 - delta / 2.0) * nf,
    ));

    let mut certified = dists.clone();
    let mut rescued = Vec::new();
    for i in (0..n).filter(|&i| !good[i]) {
        let Some((pos, t)) = family.tuples[i]
            .iter()
            .enumerate()
            .find(|(_, t)| t.support.iter().all(|&j| good[j]))
        else {
            return Err(Error::TheoremViolation(format!(
                "point {i} has no recovery tuple inside the good set"
            )));
        };
        let bound = t.evaluate(v)
            + t.support
                .iter()
                .zip(&t.coefficients)
                .map(|(&j, c)| c.norm() * dists[j])
                .sum::<f64>();
        if bound < dists[i] - SLACK {
            return Err(Error::invariant(format!(
                "rescue bound {bound} for point {i} is below its distance {}",
                dists[i]
            )));
        }
        certified[i] = bound;
        rescued.push((i, pos));
    }
    let eps_prime = certified.iter().copied().fold(0.0, f64::max);
    let eps_prime_bound = eps + q as f64 * b * tau;
    checks.push(Check::le("eps'", eps_prime, eps_prime_bound));

    let headline_dim = 2.0 * (b * b / (delta * delta) + 2.0 * b / delta).powi(2);
    let headline_eps = eps * (1.0 + 2.0 * 2f64.sqrt() * q as f64 * b / delta.powf(1.5));
    checks.push(Check::le("dim L' <= headline bound", tr.subspace.dim() as f64, headline_dim));
    checks.push(Check::le("eps' <= headline bound", eps_prime, headline_eps));

    Ok(LccCertificate {
        n,
        d: v.dim(),
        k,
        q,
        b,
        delta,
        eps,
        verdict,
        coefficient_dim: l.dim(),
        dim: tr.subspace.dim(),
        subspace: tr.subspace,
        dim_bound,
        column_distance_sum: tr.column_distance_sum,
        column_bound,
        distance_sum: tr.row_distance_sum,
        tau,
        good_set,
        rescued,
        per_point_dists: dists,
        certified,
        eps_prime,
        eps_prime_bound,
        headline_dim,
        headline_eps,
        checks,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Perturbed {
    pub config: PointConfig,
    pub family: DecodingFamily,
    /// `eps + (qB + 1) alpha`.
    pub eps_bound: f64,
    pub max_residual: f64,
}

/// Moves every point by at most `alpha` and re-evaluates every tuple with
/// unchanged coefficients.
pub fn perturb_stable_lcc(
    v: &PointConfig,
    family: &DecodingFamily,
    alpha: f64,
    seed: u64,
) -> Result<Perturbed> {
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidInput(format!("alpha must be finite and >= 0, got {alpha}")));
    }
    family.validate(v)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = v.dim();
    let points: Vec<CVector> = v
        .points()
        .iter()
        .map(|p| {
            let z = CVector::from_fn(d, |_, _| {
                C64::new(
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                    rng.sample::<f64, _>(rand_distr::StandardNormal),
                )
            });
            let zn = norm(&z);
            let r = alpha * rng.random_range(0.0..=1.0);
            if zn > 0.0 {
                p + z * C64::new(r / zn, 0.0)
            } else {
                p.clone()
            }
        })
        .collect();
    let config = PointConfig::new(points)?;
    let eps_bound = family.eps + (family.q as f64 * family.b + 1.0) * alpha;
    let mut max_residual: f64 = 0.0;
    let mut out = family.clone();
    out.eps = eps_bound;
    for list in out.tuples.iter_mut() {
        for t in list.iter_mut() {
            t.residual = t.evaluate(&config);
            max_residual = max_residual.max(t.residual);
        }
    }
    if max_residual > eps_bound + SLACK {
        return Err(Error::TheoremViolation(format!(
            "perturbed residual {max_residual} exceeds eps + (qB+1) alpha = {eps_bound}"
        )));
    }
    Ok(Perturbed {
        config,
        family: out,
        eps_bound,
        max_residual,
    })
}

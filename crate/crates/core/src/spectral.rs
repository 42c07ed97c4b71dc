//! The subspace engine: from a design of certified dependent triples to a
//! low-dimensional subspace close to every point, with each inequality of
//! the argument measured and recorded.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::checks::{all_hold, Check};
use crate::collinearity::{combination_norm, DependenceCertificate};
use crate::designs::{design_parameters, TripleFamily};
use crate::error::{Error, Result};
use crate::geometry::{
    dist_to_subspace, hermitian_eigen, CMatrix, CVector, PointConfig, Subspace, C64, SLACK,
};

/// Relative cutoff when orthonormalizing the row span of the projected
/// point matrix.
const ROW_RANK_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependencyRow {
    pub indices: [usize; 3],
    pub coefficients: [C64; 3],
}

/// Sparse `m x n` matrix with one row per certified triple.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependencyMatrix {
    pub n: usize,
    pub rows: Vec<DependencyRow>,
}

impl DependencyMatrix {
    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.rows.len(), self.n);
        for (r, row) in self.rows.iter().enumerate() {
            for (&j, &c) in row.indices.iter().zip(&row.coefficients) {
                m[(r, j)] += c;
            }
        }
        m
    }

    /// `X = M* M`.
    pub fn column_gram(&self) -> CMatrix {
        let mut x = CMatrix::zeros(self.n, self.n);
        for row in &self.rows {
            for (&a, &ca) in row.indices.iter().zip(&row.coefficients) {
                for (&b, &cb) in row.indices.iter().zip(&row.coefficients) {
                    x[(a, b)] += ca.conj() * cb;
                }
            }
        }
        x
    }

    /// Norms of the rows of `M A`.
    pub fn row_residuals(&self, v: &PointConfig) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| combination_norm(v, &r.indices, &r.coefficients))
            .collect()
    }
}

/// Lines up one certificate per triple of `t`, in the order of `t`.
pub fn align_certificates<'a>(
    t: &TripleFamily,
    certs: &'a [DependenceCertificate],
) -> Result<Vec<&'a DependenceCertificate>> {
    if certs.len() != t.len() {
        return Err(Error::InvalidInput(format!(
            "{} certificates for {} triples",
            certs.len(),
            t.len()
        )));
    }
    let by_triple: HashMap<[usize; 3], &DependenceCertificate> =
        certs.iter().map(|c| (c.sorted_indices(), c)).collect();
    t.triples()
        .iter()
        .map(|tr| {
            by_triple
                .get(tr)
                .copied()
                .ok_or_else(|| Error::InvalidInput(format!("no certificate for triple {tr:?}")))
        })
        .collect()
}

pub fn build_dependency_matrix(
    v: &PointConfig,
    t: &TripleFamily,
    certs: &[DependenceCertificate],
    mu: f64,
    eps: f64,
) -> Result<DependencyMatrix> {
    if t.n() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: v.len(),
            got: t.n(),
        });
    }
    let aligned = align_certificates(t, certs)?;
    let mut rows = Vec::with_capacity(aligned.len());
    for cert in aligned {
        for c in &cert.coefficients {
            let m = c.norm();
            if m < mu - SLACK || m > 1.0 + SLACK {
                return Err(Error::hypothesis(format!(
                    "certificate {:?} has coefficient magnitude {m} outside [{mu}, 1]",
                    cert.indices
                )));
            }
        }
        let resid = cert.evaluate(v);
        if resid > eps + SLACK {
            return Err(Error::hypothesis(format!(
                "certificate {:?} has residual {resid} > eps = {eps}",
                cert.indices
            )));
        }
        rows.push(DependencyRow {
            indices: cert.indices,
            coefficients: cert.coefficients,
        });
    }
    Ok(DependencyMatrix { n: v.len(), rows })
}

/// Upper bound `2S/K^2` on the number of eigenvalues `<= K/4` of a Hermitian
/// matrix whose diagonal is at least `K` and whose off-diagonal entries have
/// squared sum `S`.
pub fn small_eig_count_bound(k: f64, s: f64) -> Result<f64> {
    if !(k > 0.0) {
        return Err(Error::InvalidInput(format!("diagonal floor must be > 0, got {k}")));
    }
    if !(s >= 0.0) {
        return Err(Error::InvalidInput(format!("off-diagonal sum must be >= 0, got {s}")));
    }
    Ok(2.0 * s / (k * k))
}

/// Sum of `|X_ij|^2` over `i != j`.
pub fn offdiag_sq_sum(x: &CMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..x.nrows() {
        for j in 0..x.ncols() {
            if i != j {
                s += x[(i, j)].norm_sqr();
            }
        }
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
pub struct Extracted {
    /// Span of the right singular vectors with small singular value.
    pub subspace: Subspace,
    /// Positions (in ascending singular-value order) of the kept directions.
    pub indices: Vec<usize>,
    /// All singular values of `M`, ascending.
    pub singular_values: Vec<f64>,
}

/// Right singular vectors of `M` with singular value at most `threshold`,
/// read off the eigen-decomposition of `M* M`.
pub fn extract_subspace(m: &DependencyMatrix, threshold: f64) -> Result<Extracted> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidInput(format!("threshold must be > 0, got {threshold}")));
    }
    let (vals, vecs) = hermitian_eigen(&m.column_gram())?;
    let singular_values: Vec<f64> = vals.iter().map(|&l| l.max(0.0).sqrt()).collect();
    let indices: Vec<usize> = (0..singular_values.len())
        .filter(|&k| singular_values[k] <= threshold)
        .collect();
    let basis = indices.iter().map(|&k| vecs.column(k).into_owned()).collect();
    Ok(Extracted {
        subspace: Subspace::new(m.n, basis)?,
        indices,
        singular_values,
    })
}

fn projected_columns(a: &CMatrix, l: &Subspace) -> Result<CMatrix> {
    if l.ambient_dim() != a.nrows() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: l.ambient_dim(),
        });
    }
    let q = l.basis_matrix();
    Ok(&q * (q.adjoint() * a))
}

/// `sum_j dist(u_j, L)^2` over the columns `u_j` of `A`.
pub fn column_distance_sum(a: &CMatrix, l: &Subspace) -> Result<f64> {
    let y = projected_columns(a, l)?;
    Ok((a - y).norm_squared())
}

#[derive(Clone, Debug, PartialEq)]
pub struct Transfer {
    pub subspace: Subspace,
    pub column_distance_sum: f64,
    pub row_distance_sum: f64,
}

/// Projects every column of `A` onto `L` and returns the row span of the
/// result, a subspace of the point space of dimension at most `dim L`.
pub fn transfer_to_rows(a: &CMatrix, l: &Subspace) -> Result<Transfer> {
    let y = projected_columns(a, l)?;
    let column_distance_sum = (a - &y).norm_squared();
    let rows: Vec<CVector> = (0..y.nrows()).map(|i| y.row(i).transpose()).collect();
    let subspace = Subspace::span_of(a.ncols(), &rows, ROW_RANK_TOL)?;
    let mut row_distance_sum = 0.0;
    for i in 0..a.nrows() {
        let (d, _) = dist_to_subspace(&a.row(i).transpose(), &subspace)?;
        row_distance_sum += d * d;
    }
    Ok(Transfer {
        subspace,
        column_distance_sum,
        row_distance_sum,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EngineParams {
    pub p: usize,
    pub g: usize,
    pub m: usize,
    pub mu: f64,
    pub eps: f64,
}

impl EngineParams {
    /// `2 eps sqrt(g m) / (p mu)`.
    pub fn rho(&self) -> f64 {
        2.0 * self.eps * ((self.g * self.m) as f64).sqrt() / (self.p as f64 * self.mu)
    }

    /// `2 n^2 g^2 / (p^2 mu^4)`.
    pub fn dim_bound(&self, n: usize) -> f64 {
        let (n, g, p) = (n as f64, self.g as f64, self.p as f64);
        2.0 * n * n * g * g / (p * p * self.mu.powi(4))
    }

    /// `4 m eps^2 / (mu^2 p)`.
    pub fn distance_sum_bound(&self) -> f64 {
        4.0 * self.m as f64 * self.eps * self.eps / (self.mu * self.mu * self.p as f64)
    }

    /// `5 eps sqrt(g m) / (p mu^2)`.
    pub fn eps_prime_bound(&self) -> f64 {
        5.0 * self.eps * ((self.g * self.m) as f64).sqrt() / (self.p as f64 * self.mu * self.mu)
    }

    /// `(eps + 2 rho) / mu`, what a far point inherits from two near partners.
    pub fn far_point_bound(&self) -> f64 {
        (self.eps + 2.0 * self.rho()) / self.mu
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Refinement {
    /// `dist(v_i, L')` for every point.
    pub distances: Vec<f64>,
    /// Certified upper bound on `dist(v_i, L')`: the distance itself for near
    /// points, the partner bound for far points.
    pub certified: Vec<f64>,
    pub rho: f64,
    /// Points farther than `rho` from `L'`.
    pub far: Vec<usize>,
    /// For each far point, the triple used to certify it.
    pub partners: Vec<(usize, [usize; 3])>,
    pub eps_prime: f64,
}

/// Bounds the distance of every point to `L'`, routing far points through
/// a certified triple whose other two points are near.
pub fn refine_all_points(
    v: &PointConfig,
    t: &TripleFamily,
    certs: &[DependenceCertificate],
    l_prime: &Subspace,
    params: &EngineParams,
) -> Result<Refinement> {
    let aligned = align_certificates(t, certs)?;
    let distances = v
        .points()
        .iter()
        .map(|p| dist_to_subspace(p, l_prime).map(|(d, _)| d))
        .collect::<Result<Vec<_>>>()?;
    let rho = params.rho();
    let far: Vec<usize> = (0..v.len()).filter(|&i| distances[i] > rho).collect();
    let mut is_far = vec![false; v.len()];
    for &i in &far {
        is_far[i] = true;
    }

    let mut by_index: Vec<Vec<usize>> = vec![Vec::new(); v.len()];
    for (k, tr) in t.triples().iter().enumerate() {
        for &i in tr {
            by_index[i].push(k);
        }
    }

    let mut certified = distances.clone();
    let mut partners = Vec::with_capacity(far.len());
    for &i in &far {
        let found = by_index[i].iter().find(|&&k| {
            t.triples()[k].iter().all(|&x| x == i || !is_far[x])
        });
        let Some(&k) = found else {
            return Err(Error::TheoremViolation(format!(
                "far point {i} has no triple whose other two points are near L'"
            )));
        };
        let cert = aligned[k];
        let own = cert
            .coefficient_at(i)
            .ok_or_else(|| Error::invariant("certificate does not cover its triple"))?
            .norm();
        let mut bound = cert.evaluate(v);
        for (&x, c) in cert.indices.iter().zip(&cert.coefficients) {
            if x != i {
                bound += c.norm() * distances[x];
            }
        }
        certified[i] = bound / own;
        if certified[i] < distances[i] - SLACK {
            return Err(Error::invariant(format!(
                "certified bound {} for point {i} is below its distance {}",
                certified[i], distances[i]
            )));
        }
        partners.push((i, t.triples()[k]));
    }
    let eps_prime = certified.iter().copied().fold(0.0, f64::max);
    Ok(Refinement {
        distances,
        certified,
        rho,
        far,
        partners,
        eps_prime,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Singular-value cutoff; `mu sqrt(p) / 2` when absent.
    pub threshold: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubspaceCertificate {
    pub n: usize,
    pub d: usize,
    pub params: EngineParams,
    pub threshold: f64,
    pub subspace: Subspace,
    /// Dimension of the coefficient-space subspace `L`.
    pub coefficient_dim: usize,
    pub dim: usize,
    pub dim_bound: f64,
    pub column_distance_sum: f64,
    pub distance_sum: f64,
    pub distance_sum_bound: f64,
    pub refinement: Refinement,
    pub eps_prime: f64,
    pub eps_prime_bound: f64,
    pub checks: Vec<Check>,
}

impl SubspaceCertificate {
    pub fn passes(&self) -> bool {
        all_hold(&self.checks)
    }

    pub fn per_point_dists(&self) -> &[f64] {
        &self.refinement.distances
    }
}

pub fn approximate_sg_subspace(
    v: &PointConfig,
    t: &TripleFamily,
    certs: &[DependenceCertificate],
    mu: f64,
    eps: f64,
) -> Result<SubspaceCertificate> {
    approximate_sg_subspace_with(v, t, certs, mu, eps, &EngineOptions::default())
}

pub fn approximate_sg_subspace_with(
    v: &PointConfig,
    t: &TripleFamily,
    certs: &[DependenceCertificate],
    mu: f64,
    eps: f64,
    opts: &EngineOptions,
) -> Result<SubspaceCertificate> {
    if !(mu > 0.0 && mu <= 1.0) {
        return Err(Error::InvalidInput(format!("mu must lie in (0, 1], got {mu}")));
    }
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput(format!("eps must be >= 0, got {eps}")));
    }
    let dp = design_parameters(t);
    if dp.p == 0 {
        return Err(Error::hypothesis("some point lies in no triple (p = 0)"));
    }
    let n = v.len();
    let params = EngineParams {
        p: dp.p,
        g: dp.g,
        m: t.len(),
        mu,
        eps,
    };
    let (p, g) = (params.p as f64, params.g as f64);
    let mut checks = Vec::new();

    let m = build_dependency_matrix(v, t, certs, mu, eps)?;
    let max_row = m.row_residuals(v).into_iter().fold(0.0, f64::max);
    checks.push(Check::le("row residual ||(MA)_t||", max_row, eps));

    let x = m.column_gram();
    let diag_min = (0..n).map(|j| x[(j, j)].re).fold(f64::INFINITY, f64::min);
    let mut off_max: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                off_max = off_max.max(x[(i, j)].norm());
            }
        }
    }
    checks.push(Check::ge("column norm ||M_j||^2", diag_min, p * mu * mu));
    checks.push(Check::le("column inner product |<M_i,M_j>|", off_max, g));

    let threshold = opts.threshold.unwrap_or(mu * p.sqrt() / 2.0);
    let ext = extract_subspace(&m, threshold)?;
    let k_floor = p * mu * mu;
    let s = offdiag_sq_sum(&x);
    checks.push(Check::le(
        "small eigenvalue count (measured off-diagonal mass)",
        ext.subspace.dim() as f64,
        small_eig_count_bound(k_floor, s)?,
    ));
    let dim_bound = params.dim_bound(n);
    checks.push(Check::le("dim L", ext.subspace.dim() as f64, dim_bound));

    let a = v.matrix();
    let tr = transfer_to_rows(&a, &ext.subspace)?;
    let distance_sum_bound = params.distance_sum_bound();
    checks.push(Check::le(
        "column distance sum",
        tr.column_distance_sum,
        distance_sum_bound,
    ));
    checks.push(Check::le(
        "dim L'",
        tr.subspace.dim() as f64,
        ext.subspace.dim() as f64,
    ));
    checks.push(Check::le(
        "row distance sum",
        tr.row_distance_sum,
        tr.column_distance_sum,
    ));

    let refinement = refine_all_points(v, t, certs, &tr.subspace, &params)?;
    checks.push(Check::lt("far set size |I|", refinement.far.len() as f64, p / g));
    let far_max = refinement
        .far
        .iter()
        .map(|&i| refinement.certified[i])
        .fold(0.0, f64::max);
    checks.push(Check::le("far point bound", far_max, params.far_point_bound()));
    let eps_prime_bound = params.eps_prime_bound();
    checks.push(Check::le("eps'", refinement.eps_prime, eps_prime_bound));

    Ok(SubspaceCertificate {
        n,
        d: v.dim(),
        params,
        threshold,
        coefficient_dim: ext.subspace.dim(),
        dim: tr.subspace.dim(),
        subspace: tr.subspace,
        dim_bound,
        column_distance_sum: tr.column_distance_sum,
        distance_sum: tr.row_distance_sum,
        distance_sum_bound,
        eps_prime: refinement.eps_prime,
        eps_prime_bound,
        refinement,
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collinearity::{affine_certificate_unchecked, affine_dependence_certificate};
    use crate::designs::{collect_witnessed, prune_to_count};
    use crate::collinearity::{TubeKind, TubeQuery};
    use crate::geometry::test_support::*;
    use crate::geometry::{check_balanced, svd};
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_hermitian_dominant(rng: &mut ChaCha8Rng, n: usize, k: f64) -> CMatrix {
        let scale = rng.random_range(0.05..1.5) * k / n as f64;
        let mut x = CMatrix::zeros(n, n);
        for i in 0..n {
            x[(i, i)] = c(k + rng.random_range(0.0..k), 0.0);
            for j in i + 1..n {
                let z = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * scale * 4.0;
                x[(i, j)] = z;
                x[(j, i)] = z.conj();
            }
        }
        x
    }

    #[test]
    fn small_eig_bound_examples() {
        assert_eq!(small_eig_count_bound(3.0, 0.0).unwrap(), 0.0);
        assert_eq!(small_eig_count_bound(4.0, 8.0).unwrap(), 1.0);
        assert!(small_eig_count_bound(0.0, 1.0).is_err());
    }

    #[test]
    fn small_eig_bound_against_dense_eigensolver() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..60 {
            let n = rng.random_range(2..=32);
            let k = rng.random_range(0.5..5.0);
            let x = random_hermitian_dominant(&mut rng, n, k);
            let (vals, _) = hermitian_eigen(&x).unwrap();
            let count = vals.iter().filter(|&&l| l <= k / 4.0).count();
            let bound = small_eig_count_bound(k, offdiag_sq_sum(&x)).unwrap();
            assert!(count as f64 <= bound + 1e-9, "count {count} bound {bound}");
        }
    }

    #[test]
    fn hoffman_wielandt_with_optimal_matching() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..30 {
            let n = rng.random_range(1..=6);
            let k = rng.random_range(0.1..2.0);
            let x = random_hermitian_dominant(&mut rng, n, k);
            let (vals, _) = hermitian_eigen(&x).unwrap();
            let diag: Vec<f64> = (0..n).map(|i| x[(i, i)].re).collect();
            let best = (0..n)
                .permutations(n)
                .map(|perm| perm.iter().enumerate().map(|(i, &j)| (vals[i] - diag[j]).powi(2)).sum::<f64>())
                .fold(f64::INFINITY, f64::min);
            assert!(best <= offdiag_sq_sum(&x) + 1e-9);
        }
    }

    fn cert(idx: [usize; 3], coef: [f64; 3], v: &PointConfig) -> DependenceCertificate {
        let coefficients = coef.map(|x| c(x, 0.0));
        let residual = combination_norm(v, &idx, &coefficients);
        DependenceCertificate {
            indices: idx,
            coefficients,
            residual,
            mu_floor: 0.5,
        }
    }

    #[test]
    fn dependency_matrix_examples() {
        let v = PointConfig::from_real(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let t = TripleFamily::new(3, vec![[0, 1, 2]]).unwrap();
        let cs = vec![cert([0, 2, 1], [0.5, 0.5, -1.0], &v)];
        let m = build_dependency_matrix(&v, &t, &cs, 0.5, 0.0).unwrap();
        assert_eq!(m.n_rows(), 1);
        assert!(m.row_residuals(&v)[0] < 1e-15);
        assert_eq!(m.to_dense().row(0).iter().filter(|z| z.norm() > 0.0).count(), 3);

        let bad = vec![cert([0, 2, 1], [1.5, 0.5, -1.0], &v)];
        assert!(matches!(
            build_dependency_matrix(&v, &t, &bad, 0.5, 10.0),
            Err(Error::HypothesisNotMet(_))
        ));
        let wrong = vec![cert([0, 2, 1], [0.5, 0.5, 1.0], &v)];
        assert!(build_dependency_matrix(&v, &t, &wrong, 0.5, 0.1).is_err());
        assert!(build_dependency_matrix(&v, &t, &[], 0.5, 0.1).is_err());
    }

    #[test]
    fn extract_examples() {
        let one_hot = |k: usize| {
            let mut coefficients = [c(0.0, 0.0); 3];
            coefficients[k] = c(1.0, 0.0);
            DependencyRow {
                indices: [0, 1, 2],
                coefficients,
            }
        };
        // orthogonal unit columns sit above the threshold: nothing is kept
        let m = DependencyMatrix {
            n: 3,
            rows: (0..3).map(one_hot).collect(),
        };
        assert_eq!(extract_subspace(&m, 0.5).unwrap().subspace.dim(), 0);

        // columns 1 and 2 vanish, so e_1 and e_2 span the kept part
        let m = DependencyMatrix {
            n: 3,
            rows: vec![one_hot(0)],
        };
        let ext = extract_subspace(&m, 0.5).unwrap();
        assert_eq!(ext.subspace.dim(), 2);
        let (d, _) = dist_to_subspace(&unit(3, 0), &ext.subspace).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        for j in [1, 2] {
            let (d, _) = dist_to_subspace(&unit(3, j), &ext.subspace).unwrap();
            assert!(d < 1e-12);
        }
        assert!(extract_subspace(&m, 0.0).is_err());
    }

    #[test]
    fn extracted_singular_values_match_dense_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..10 {
            let n = rng.random_range(4..15);
            let rows = (0..rng.random_range(1..30))
                .map(|_| {
                    let idx = rand::seq::index::sample(&mut rng, n, 3).into_vec();
                    DependencyRow {
                        indices: [idx[0], idx[1], idx[2]],
                        coefficients: [0; 3].map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
                    }
                })
                .collect();
            let m = DependencyMatrix { n, rows };
            let ext = extract_subspace(&m, 1e9).unwrap();
            let dense = svd(&m.to_dense()).unwrap();
            let mut want: Vec<f64> = dense.singular_values.clone();
            want.resize(n, 0.0);
            want.reverse();
            for (a, b) in ext.singular_values.iter().zip(&want) {
                assert!((a - b).abs() < 1e-7, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn distance_sums_at_the_extremes() {
        let a = CMatrix::from_fn(3, 2, |i, j| c((i + j) as f64, 1.0));
        let zero = Subspace::zero(3);
        assert!((column_distance_sum(&a, &zero).unwrap() - a.norm_squared()).abs() < 1e-12);
        let tr = transfer_to_rows(&a, &zero).unwrap();
        assert_eq!(tr.subspace.dim(), 0);
        assert!((tr.row_distance_sum - a.norm_squared()).abs() < 1e-12);

        let full = Subspace::new(3, (0..3).map(|i| unit(3, i)).collect()).unwrap();
        assert!(column_distance_sum(&a, &full).unwrap() < 1e-20);
        let tr = transfer_to_rows(&a, &full).unwrap();
        assert_eq!(tr.subspace.dim(), 2);
        assert!(tr.row_distance_sum < 1e-20);
    }

    #[test]
    fn row_transfer_never_loses_to_columns() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..40 {
            let (n, d) = (rng.random_range(2..12), rng.random_range(1..8));
            let a = CMatrix::from_fn(n, d, |_, _| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
            let k = rng.random_range(0..=n);
            let vecs: Vec<CVector> = (0..k)
                .map(|_| CVector::from_fn(n, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
                .collect();
            let l = Subspace::span_of(n, &vecs, 1e-12).unwrap();
            let tr = transfer_to_rows(&a, &l).unwrap();
            assert!(tr.subspace.dim() <= l.dim());
            assert!(
                tr.row_distance_sum <= tr.column_distance_sum + 1e-9,
                "n {n} d {d} k {k} dimL {} dimL' {} row {} col {}",
                l.dim(), tr.subspace.dim(), tr.row_distance_sum, tr.column_distance_sum
            );
        }
    }

    #[test]
    fn refine_certifies_far_points_through_near_partners() {
        let h = 0.09;
        let mut pts: Vec<Vec<f64>> = (1..=4).map(|k| vec![k as f64, 0.0]).collect();
        pts.push(vec![10.0, h]);
        let v = PointConfig::from_real(&pts).unwrap();
        let t = TripleFamily::new(5, vec![[0, 1, 4], [0, 1, 2], [1, 2, 3]]).unwrap();
        let certs: Vec<_> = [[0, 1, 4], [0, 1, 2], [1, 2, 3]]
            .iter()
            .map(|&tr| affine_certificate_unchecked(&v, tr).unwrap())
            .collect();
        let axis = Subspace::new(2, vec![unit(2, 0)]).unwrap();
        let params = EngineParams {
            p: 4,
            g: 1,
            m: 1,
            mu: 1.0,
            eps: 0.01,
        };
        let r = refine_all_points(&v, &t, &certs, &axis, &params).unwrap();
        assert_eq!(r.far, vec![4]);
        assert_eq!(r.partners, vec![(4, [0, 1, 4])]);
        assert!((r.certified[4] - h).abs() < 1e-12);
        assert!((r.eps_prime - h).abs() < 1e-12);

        // with L' = {0} every point is far and no triple has near partners
        let zero = Subspace::zero(2);
        assert!(matches!(
            refine_all_points(&v, &t, &certs, &zero, &params),
            Err(Error::TheoremViolation(_))
        ));
    }

    #[test]
    fn refine_with_nothing_far() {
        let v = PointConfig::from_real(&[vec![1.0, 0.0], vec![2.0, 0.0], vec![3.0, 0.001]]).unwrap();
        let t = TripleFamily::new(3, vec![[0, 1, 2]]).unwrap();
        let certs = vec![affine_certificate_unchecked(&v, [0, 1, 2]).unwrap()];
        let axis = Subspace::new(2, vec![unit(2, 0)]).unwrap();
        let params = EngineParams { p: 1, g: 1, m: 1, mu: 0.5, eps: 0.01 };
        let r = refine_all_points(&v, &t, &certs, &axis, &params).unwrap();
        assert!(r.far.is_empty());
        assert!((r.eps_prime - 0.001).abs() < 1e-12);
    }

    /// Real grid points with spacing `1 + 2 noise` embedded isometrically in
    /// `C^d`, perturbed by at most `noise`.
    fn planted_grid(rng: &mut ChaCha8Rng, side: usize, d: usize, noise: f64) -> PointConfig {
        let frame = CMatrix::from_fn(d, 2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .qr()
            .q();
        let step = 1.0 + 2.0 * noise;
        let mut pts = Vec::new();
        for x in 0..side {
            for y in 0..side {
                let (x, y) = (x as f64 * step, y as f64 * step);
                let mut p = frame.column(0) * c(x, 0.0) + frame.column(1) * c(y, 0.0);
                let z = CVector::from_fn(d, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
                let zn = crate::geometry::norm(&z);
                p += z * c(noise * rng.random_range(0.0..1.0) / zn, 0.0);
                pts.push(p);
            }
        }
        PointConfig::new(pts).unwrap()
    }

    fn certified_grid_run(side: usize, d: usize, noise: f64, seed: u64) -> SubspaceCertificate {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let v = planted_grid(&mut rng, side, d, noise);
        let b = check_balanced(&v, 1e9).max_distance * 1.01;
        let eps = (2.0 * b + 2.0) * noise + 1e-9;
        let col = collect_witnessed(&v, TubeQuery::new(TubeKind::AffineLine, eps).unwrap()).unwrap();
        let p = design_parameters(&col.family).p;
        let t = prune_to_count(&col.family, p).unwrap();
        let certs: Vec<_> = t
            .triples()
            .iter()
            .map(|&tr| {
                let w = col.witness_for(tr).unwrap();
                affine_dependence_certificate(&v, w.rotation(), b).unwrap()
            })
            .collect();
        approximate_sg_subspace(&v, &t, &certs, 1.0 / (4.0 * b), eps).unwrap()
    }

    #[test]
    fn exact_planar_grid_gives_zero_eps_prime() {
        let cert = certified_grid_run(4, 5, 0.0, 1);
        assert!(cert.passes(), "{:?}", cert.checks);
        assert!(cert.eps_prime < 1e-9);
        assert!(cert.distance_sum < 1e-12);
        assert!(cert.dim <= 5);
    }

    #[test]
    fn noisy_planar_grid_passes_every_check() {
        for seed in 0..3 {
            let cert = certified_grid_run(5, 8, 1e-4, seed);
            assert!(cert.passes(), "{:?}", cert.checks);
            assert!(cert.dim as f64 <= cert.dim_bound);
            assert!(cert.distance_sum <= cert.distance_sum_bound + 1e-9);
            assert!(cert.eps_prime <= cert.eps_prime_bound + 1e-9);
        }
    }

    #[test]
    fn empty_design_is_rejected() {
        let v = PointConfig::from_real(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let t = TripleFamily::empty(3);
        assert!(matches!(
            approximate_sg_subspace(&v, &t, &[], 0.5, 0.1),
            Err(Error::HypothesisNotMet(_))
        ));
    }
}

//! Complex vector primitives: point configurations, subspaces, distances and
//! the certified bracket around `dim_eps`.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CVector = DVector<C64>;
pub type CMatrix = DMatrix<C64>;

/// Tolerance on `|<b_i, b_j> - delta_ij|` for a basis to count as orthonormal.
pub const ORTHO_TOL: f64 = 1e-10;
/// Additive slack applied to every certificate inequality.
pub const SLACK: f64 = 1e-9;
/// Below this, points coincide and projections vanish.
pub const DEGENERACY: f64 = 1e-12;

const EIGEN_MAX_ITER: usize = 100_000;
const SVD_TOLERANCES: [f64; 3] = [5.0 * f64::EPSILON, 50.0 * f64::EPSILON, 1e-13];
const RECOMPOSE_TOL: f64 = 1e-10;

/// Hermitian inner product, linear in the first argument.
#[inline]
pub fn inner(u: &CVector, v: &CVector) -> C64 {
    u.iter().zip(v.iter()).map(|(a, b)| a * b.conj()).sum()
}

#[inline]
pub fn norm(v: &CVector) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

pub(crate) fn all_finite(v: &CVector) -> bool {
    v.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// An ordered list of `n >= 1` points in complex `d`-space.
#[derive(Clone, Debug, PartialEq)]
pub struct PointConfig {
    dim: usize,
    points: Vec<CVector>,
}

impl PointConfig {
    pub fn new(points: Vec<CVector>) -> Result<Self> {
        let first = points
            .first()
            .ok_or_else(|| Error::InvalidInput("configuration has no points".into()))?;
        let dim = first.len();
        if dim == 0 {
            return Err(Error::InvalidInput("points must have positive dimension".into()));
        }
        for p in &points {
            check_dims(dim, p.len())?;
            if !all_finite(p) {
                return Err(Error::NonFinite("point configuration"));
            }
        }
        Ok(Self { dim, points })
    }

    /// Builds a configuration from real coordinates.
    pub fn from_real(rows: &[Vec<f64>]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| CVector::from_iterator(r.len(), r.iter().map(|&x| C64::new(x, 0.0))))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn point(&self, i: usize) -> &CVector {
        &self.points[i]
    }

    pub fn points(&self) -> &[CVector] {
        &self.points
    }

    /// The `n x d` matrix whose rows are the points.
    pub fn matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.len(), self.dim, |i, j| self.points[i][j])
    }

    /// `G[i][j] = <v_i, v_j>`.
    pub fn gram(&self) -> CMatrix {
        let n = self.len();
        let mut g = CMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let z = inner(&self.points[i], &self.points[j]);
                g[(i, j)] = z;
                g[(j, i)] = z.conj();
            }
        }
        g
    }

    pub fn max_norm(&self) -> f64 {
        self.points.iter().map(norm).fold(0.0, f64::max)
    }
}

/// Euclidean distance `||u - v||`.
pub fn distance(u: &CVector, v: &CVector) -> Result<f64> {
    check_dims(u.len(), v.len())?;
    Ok(u.iter()
        .zip(v.iter())
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// A linear subspace of `C^d` held by an orthonormal basis. `k = 0` is legal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SubspaceRepr", into = "SubspaceRepr")]
pub struct Subspace {
    ambient_dim: usize,
    basis: Vec<CVector>,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Self {
            ambient_dim,
            basis: Vec::new(),
        }
    }

    /// Wraps an orthonormal basis, rejecting it if the Gram matrix is further
    /// than [`ORTHO_TOL`] from the identity.
    pub fn new(ambient_dim: usize, basis: Vec<CVector>) -> Result<Self> {
        if basis.len() > ambient_dim {
            return Err(Error::invariant(format!(
                "{} basis vectors in dimension {ambient_dim}",
                basis.len()
            )));
        }
        for b in &basis {
            check_dims(ambient_dim, b.len())?;
            if !all_finite(b) {
                return Err(Error::NonFinite("subspace basis"));
            }
        }
        for (i, bi) in basis.iter().enumerate() {
            for (j, bj) in basis.iter().enumerate().skip(i) {
                let want = if i == j { 1.0 } else { 0.0 };
                if (inner(bi, bj) - want).norm() > ORTHO_TOL {
                    return Err(Error::invariant(format!(
                        "basis vectors {i},{j} are not orthonormal"
                    )));
                }
            }
        }
        Ok(Self { ambient_dim, basis })
    }

    /// Orthonormal basis for the span of `vectors`, dropping directions whose
    /// singular value is below `rank_tol` times the largest one.
    pub fn span_of(ambient_dim: usize, vectors: &[CVector], rank_tol: f64) -> Result<Self> {
        if vectors.is_empty() {
            return Ok(Self::zero(ambient_dim));
        }
        let rows = CMatrix::from_fn(vectors.len(), ambient_dim, |i, j| vectors[i][j]);
        let spec = svd(&rows)?;
        let top = spec.singular_values.first().copied().unwrap_or(0.0);
        if top <= DEGENERACY {
            return Ok(Self::zero(ambient_dim));
        }
        let basis = spec
            .singular_values
            .iter()
            .enumerate()
            .take_while(|(_, &s)| s > rank_tol * top)
            .map(|(k, _)| spec.row_space_vector(k))
            .collect();
        Self::new(ambient_dim, basis)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn basis(&self) -> &[CVector] {
        &self.basis
    }

    /// `sum_j <v, b_j> b_j`.
    pub fn project(&self, v: &CVector) -> Result<CVector> {
        check_dims(self.ambient_dim, v.len())?;
        let mut p = CVector::zeros(self.ambient_dim);
        for b in &self.basis {
            let c = inner(v, b);
            p.axpy(c, b, C64::new(1.0, 0.0));
        }
        Ok(p)
    }

    /// The `d x k` matrix with the basis vectors as columns.
    pub fn basis_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.ambient_dim, self.dim(), |i, j| self.basis[j][i])
    }
}

#[derive(Serialize, Deserialize)]
struct SubspaceRepr {
    ambient_dim: usize,
    basis: Vec<Vec<C64>>,
}

impl From<Subspace> for SubspaceRepr {
    fn from(s: Subspace) -> Self {
        Self {
            ambient_dim: s.ambient_dim,
            basis: s.basis.iter().map(|b| b.iter().copied().collect()).collect(),
        }
    }
}

impl TryFrom<SubspaceRepr> for Subspace {
    type Error = Error;

    fn try_from(r: SubspaceRepr) -> Result<Self> {
        Subspace::new(r.ambient_dim, r.basis.into_iter().map(CVector::from_vec).collect())
    }
}

/// Distance from `v` to `l` together with the orthogonal projection.
pub fn dist_to_subspace(v: &CVector, l: &Subspace) -> Result<(f64, CVector)> {
    let p = l.project(v)?;
    let d = norm(&(v - &p));
    Ok((d, p))
}

/// Singular values (non-increasing) with matching left and right singular
/// vectors, truncated to `r = min(rows, cols)`.
#[derive(Clone, Debug)]
pub struct SpectrumSummary {
    pub singular_values: Vec<f64>,
    /// `rows x r`, orthonormal columns.
    pub left_vectors: CMatrix,
    /// `cols x r`, orthonormal columns; `A = U diag(s) V^*`.
    pub right_vectors: CMatrix,
}

impl SpectrumSummary {
    /// The k-th right singular vector expressed as a direction of the row
    /// space: rows of `A` are combinations of `conj(v_k)`.
    pub fn row_space_vector(&self, k: usize) -> CVector {
        self.right_vectors.column(k).map(|z| z.conj())
    }

    pub fn reconstruct(&self) -> CMatrix {
        let r = self.singular_values.len();
        let mut us = self.left_vectors.clone();
        for k in 0..r {
            let s = self.singular_values[k];
            us.column_mut(k).scale_mut(s);
        }
        us * self.right_vectors.adjoint()
    }
}

/// Dense SVD of a complex matrix.
pub fn svd(a: &CMatrix) -> Result<SpectrumSummary> {
    if a.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NonFinite("svd input"));
    }
    let (rows, cols) = a.shape();
    if rows == 0 || cols == 0 {
        return Ok(SpectrumSummary {
            singular_values: Vec::new(),
            left_vectors: CMatrix::zeros(rows, 0),
            right_vectors: CMatrix::zeros(cols, 0),
        });
    }
    // nalgebra returns a square V only for tall inputs; factor A^* when wide.
    let wide = rows < cols;
    let work = if wide { a.adjoint() } else { a.clone() };
    // nalgebra's bidiagonal iteration can stop on a wrong factorization for
    // rank-deficient complex inputs, so every attempt is checked by
    // recomposition; one-sided Jacobi is the fallback.
    let scale = 1.0 + work.norm();
    let recomposes = |u: &CMatrix, s: &[f64], vt: &CMatrix| {
        let mut us = u.clone();
        for (k, sv) in s.iter().enumerate() {
            us.column_mut(k).scale_mut(*sv);
        }
        (us * vt - &work).norm() <= RECOMPOSE_TOL * scale
    };
    let (u, vt, s) = SVD_TOLERANCES
        .iter()
        .find_map(|&tol| {
            let dec = work.clone().try_svd(true, true, tol, EIGEN_MAX_ITER)?;
            let (u, vt) = (dec.u?, dec.v_t?);
            let s: Vec<f64> = dec.singular_values.iter().copied().collect();
            recomposes(&u, &s, &vt).then_some((u, vt, s))
        })
        .or_else(|| {
            let (u, s, vt) = jacobi_svd(&work);
            recomposes(&u, &s, &vt).then_some((u, vt, s))
        })
        .ok_or(Error::NoConvergence("svd"))?;
    let r = s.len();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&i, &j| s[j].total_cmp(&s[i]));

    let (left_src, right_src) = if wide {
        // A^* = U S V^*  =>  A = V S U^*
        (vt.adjoint(), u)
    } else {
        (u, vt.adjoint())
    };
    let left = CMatrix::from_fn(rows, r, |i, k| left_src[(i, order[k])]);
    let right = CMatrix::from_fn(cols, r, |i, k| right_src[(i, order[k])]);
    Ok(SpectrumSummary {
        singular_values: order.iter().map(|&k| s[k].max(0.0)).collect(),
        left_vectors: left,
        right_vectors: right,
    })
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided Jacobi SVD of a tall matrix: `work = U diag(s) V^*` with `U`
/// `m x n` and `vt = V^*`.
fn jacobi_svd(work: &CMatrix) -> (CMatrix, Vec<f64>, CMatrix) {
    let (m, n) = work.shape();
    let mut a = work.clone();
    let mut v = CMatrix::identity(n, n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = a.column(p).norm_squared();
                let beta = a.column(q).norm_squared();
                let gamma = a.column(p).dotc(&a.column(q));
                let g = gamma.norm();
                if g <= f64::EPSILON * (alpha * beta).sqrt() || g == 0.0 {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = c * t;
                for mat in [&mut a, &mut v] {
                    for r in 0..mat.nrows() {
                        let (xp, xq) = (mat[(r, p)], mat[(r, q)]);
                        mat[(r, p)] = xp * c - xq * phase.conj() * sn;
                        mat[(r, q)] = xp * phase * sn + xq * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let s: Vec<f64> = (0..n).map(|k| a.column(k).norm()).collect();
    let mut u = CMatrix::zeros(m, n);
    let mut missing = Vec::new();
    for (k, &sk) in s.iter().enumerate() {
        if sk > 0.0 {
            u.set_column(k, &(a.column(k) / C64::new(sk, 0.0)));
        } else {
            missing.push(k);
        }
    }
    // complete U on exactly-zero columns with the standard basis
    let mut e = 0;
    for k in missing {
        while e < m {
            let mut x = CVector::zeros(m);
            x[e] = C64::new(1.0, 0.0);
            e += 1;
            for j in 0..n {
                let c = u.column(j).dotc(&x);
                x -= u.column(j) * c;
            }
            let xn = norm(&x);
            if xn > 0.5 {
                u.set_column(k, &(x / C64::new(xn, 0.0)));
                break;
            }
        }
    }
    (u, s, v.adjoint())
}

/// Eigen-decomposition of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(x: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    let n = x.nrows();
    if n == 0 {
        return Ok((Vec::new(), CMatrix::zeros(0, 0)));
    }
    let scale = 1.0 + x.norm();
    let eig = SVD_TOLERANCES
        .iter()
        .find_map(|&tol| {
            let eig = SymmetricEigen::try_new(x.clone(), tol, EIGEN_MAX_ITER)?;
            let err = (x * &eig.eigenvectors
                - eig.eigenvectors.map_with_location(|_, j, z| z * eig.eigenvalues[j]))
            .norm();
            (err <= RECOMPOSE_TOL * scale).then_some(eig)
        })
        .ok_or(Error::NoConvergence("hermitian eigensolver"))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let vals = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vecs = CMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok((vals, vecs))
}

/// Upper end of the `dim_eps` bracket: the smallest PCA truncation whose
/// subspace is within `eps` (plus [`SLACK`]) of every point.
pub fn dim_eps_upper(v: &PointConfig, eps: f64) -> Result<(usize, Subspace)> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput(format!("eps must be >= 0, got {eps}")));
    }
    let a = v.matrix();
    let spec = svd(&a)?;
    let r = spec.singular_values.len();
    let mut residuals: Vec<CVector> = v.points().to_vec();
    let max_norm = |res: &[CVector]| res.iter().map(norm).fold(0.0, f64::max);
    let mut k = 0;
    let mut worst = max_norm(&residuals);
    while worst > eps + SLACK && k < r {
        let b = spec.row_space_vector(k);
        for res in residuals.iter_mut() {
            let c = inner(res, &b);
            res.axpy(-c, &b, C64::new(1.0, 0.0));
        }
        k += 1;
        worst = max_norm(&residuals);
    }
    let basis = (0..k).map(|j| spec.row_space_vector(j)).collect();
    Ok((k, Subspace::new(v.dim(), basis)?))
}

/// Lower end of the `dim_eps` bracket: for any k-dimensional subspace the
/// squared distances sum to at least the trailing squared singular values, so
/// `dim_eps(V)` is at least the first k whose tail fits under `n eps^2`.
pub fn dim_eps_lower(v: &PointConfig, eps: f64) -> Result<usize> {
    if !(eps >= 0.0) {
        return Err(Error::InvalidInput(format!("eps must be >= 0, got {eps}")));
    }
    let spec = svd(&v.matrix())?;
    let s = &spec.singular_values;
    let total: f64 = s.iter().map(|x| x * x).sum();
    let budget = v.len() as f64 * (eps + SLACK).powi(2) + 1e-12 * total;
    let mut tail = total;
    for (k, sk) in s.iter().enumerate() {
        if tail <= budget {
            return Ok(k);
        }
        tail -= sk * sk;
    }
    Ok(s.len())
}

/// Both ends of the `dim_eps` bracket.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DimBracket {
    pub eps: f64,
    pub lower: usize,
    pub upper: usize,
    pub upper_max_distance: f64,
}

pub fn dim_eps_bracket(v: &PointConfig, eps: f64) -> Result<DimBracket> {
    let lower = dim_eps_lower(v, eps)?;
    let (upper, l) = dim_eps_upper(v, eps)?;
    let mut worst: f64 = 0.0;
    for p in v.points() {
        worst = worst.max(dist_to_subspace(p, &l)?.0);
    }
    Ok(DimBracket {
        eps,
        lower,
        upper,
        upper_max_distance: worst,
    })
}

/// Outcome of a pairwise scan: whether the property holds and, if not, the
/// first offending pair with its distance.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct PairCheck {
    pub holds: bool,
    pub witness: Option<(usize, usize, f64)>,
    pub min_distance: f64,
    pub max_distance: f64,
}

/// `1 <= dist(v, v') <= B` for all pairs.
pub fn check_balanced(v: &PointConfig, b: f64) -> PairCheck {
    let n = v.len();
    let mut out = PairCheck {
        holds: true,
        witness: None,
        min_distance: f64::INFINITY,
        max_distance: 0.0,
    };
    for i in 0..n {
        for j in i + 1..n {
            let d = norm(&(v.point(i) - v.point(j)));
            out.min_distance = out.min_distance.min(d);
            out.max_distance = out.max_distance.max(d);
            if out.witness.is_none() && !(1.0 - SLACK..=b + SLACK).contains(&d) {
                out.holds = false;
                out.witness = Some((i, j, d));
            }
        }
    }
    out
}

fn require_unit(v: &PointConfig) -> Result<()> {
    for (index, p) in v.points().iter().enumerate() {
        let nrm = norm(p);
        if (nrm - 1.0).abs() > SLACK {
            return Err(Error::OffSphere { index, norm: nrm });
        }
    }
    Ok(())
}

/// `min(dist(u, v), dist(u, -v)) >= mu` for all pairs of unit vectors.
pub fn check_separated(v: &PointConfig, mu: f64) -> Result<PairCheck> {
    require_unit(v)?;
    Ok(pair_scan(v, mu, |u, w| {
        let d1 = norm(&(u - w));
        let d2 = norm(&(u + w));
        d1.min(d2)
    }))
}

/// Phase-invariant separation: `min over |c| = 1 of dist(u, c v) >= mu`.
///
/// Over the complex numbers `u` and `i u` pass [`check_separated`] while being
/// linearly dependent; the coefficient floors of the projective reduction
/// need this stronger form.
pub fn check_phase_separated(v: &PointConfig, mu: f64) -> Result<PairCheck> {
    require_unit(v)?;
    Ok(pair_scan(v, mu, phase_distance))
}

/// `min over |c| = 1 of ||u - c w||` for unit vectors.
pub fn phase_distance(u: &CVector, w: &CVector) -> f64 {
    (2.0 - 2.0 * inner(u, w).norm()).max(0.0).sqrt()
}

fn pair_scan(v: &PointConfig, mu: f64, dist: impl Fn(&CVector, &CVector) -> f64) -> PairCheck {
    let n = v.len();
    let mut out = PairCheck {
        holds: true,
        witness: None,
        min_distance: f64::INFINITY,
        max_distance: 0.0,
    };
    for i in 0..n {
        for j in i + 1..n {
            let d = dist(v.point(i), v.point(j));
            out.min_distance = out.min_distance.min(d);
            out.max_distance = out.max_distance.max(d);
            if out.witness.is_none() && d < mu - SLACK {
                out.holds = false;
                out.witness = Some((i, j, d));
            }
        }
    }
    out
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    pub fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    pub fn rv(xs: &[f64]) -> CVector {
        CVector::from_iterator(xs.len(), xs.iter().map(|&x| c(x, 0.0)))
    }

    pub fn cv(xs: &[(f64, f64)]) -> CVector {
        CVector::from_iterator(xs.len(), xs.iter().map(|&(a, b)| c(a, b)))
    }

    pub fn unit(d: usize, i: usize) -> CVector {
        let mut v = CVector::zeros(d);
        v[i] = c(1.0, 0.0);
        v
    }
}

#[cfg(test)]
mod tests {
    use super::test_support::*;
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        })
    }

    fn random_unitary(rng: &mut ChaCha8Rng, d: usize) -> CMatrix {
        random_matrix(rng, d, d).qr().q()
    }

    #[test]
    fn distance_examples() {
        let u = rv(&[1.0, 2.0]);
        assert_eq!(distance(&u, &u).unwrap(), 0.0);
        assert_abs_diff_eq!(
            distance(&rv(&[1.0, 0.0]), &rv(&[0.0, 1.0])).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            distance(&cv(&[(0.0, 1.0), (0.0, 0.0)]), &rv(&[0.0, 1.0])).unwrap(),
            2f64.sqrt(),
            epsilon = 1e-15
        );
        assert!(matches!(
            distance(&rv(&[1.0]), &rv(&[1.0, 2.0])),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn dist_to_subspace_examples() {
        let l = Subspace::new(3, vec![unit(3, 0), unit(3, 1)]).unwrap();
        let (d, _) = dist_to_subspace(&rv(&[0.3, -2.0, 0.0]), &l).unwrap();
        assert_abs_diff_eq!(d, 0.0, epsilon = 1e-15);

        let v = rv(&[1.0, 2.0, 2.0]);
        let (d, p) = dist_to_subspace(&v, &Subspace::zero(3)).unwrap();
        assert_abs_diff_eq!(d, 3.0, epsilon = 1e-15);
        assert_eq!(norm(&p), 0.0);

        let s = 0.5f64.sqrt();
        let e1 = Subspace::new(3, vec![unit(3, 0)]).unwrap();
        let (d, p) = dist_to_subspace(&rv(&[s, s, 0.0]), &e1).unwrap();
        assert_abs_diff_eq!(d, s, epsilon = 1e-15);
        assert_abs_diff_eq!(p[0].re, s, epsilon = 1e-15);
        assert!(dist_to_subspace(&rv(&[1.0]), &e1).is_err());
    }

    #[test]
    fn subspace_rejects_non_orthonormal_basis() {
        assert!(Subspace::new(2, vec![rv(&[1.0, 0.0]), rv(&[1.0, 1.0])]).is_err());
        assert!(Subspace::new(1, vec![rv(&[1.0]), rv(&[1.0])]).is_err());
    }

    #[test]
    fn svd_of_wide_rank_one_matrix_recomposes() {
        // this shape once came back from the bidiagonal iteration with a
        // wrong factorization at the tightest tolerance
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let q = CVector::from_fn(2, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let w = CVector::from_fn(7, |_, _| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
            let y = &q * w.transpose();
            let spec = svd(&y).unwrap();
            assert!((spec.reconstruct() - &y).norm() < 1e-10);
            assert!(spec.singular_values[1] < 1e-10);
        }
    }

    #[test]
    fn jacobi_fallback_factors_rank_deficient_tall_matrices() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for rank in [0, 1, 3, 6] {
            let l = CMatrix::from_fn(60, rank, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let r = CMatrix::from_fn(rank, 6, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
            let a = l * r;
            let (u, s, vt) = jacobi_svd(&a);
            let mut us = u.clone();
            for (k, sv) in s.iter().enumerate() {
                us.column_mut(k).scale_mut(*sv);
            }
            assert!((us * &vt - &a).norm() < 1e-10);
            assert!((u.adjoint() * &u - CMatrix::identity(6, 6)).norm() < 1e-10);
            assert!((&vt * vt.adjoint() - CMatrix::identity(6, 6)).norm() < 1e-10);
            assert_eq!(s.iter().filter(|&&x| x > 1e-8).count(), rank);
            let spec = svd(&a).unwrap();
            assert!((spec.reconstruct() - &a).norm() < 1e-9);
        }
    }

    #[test]
    fn svd_examples() {
        let id = CMatrix::identity(3, 3);
        assert_eq!(svd(&id).unwrap().singular_values, vec![1.0, 1.0, 1.0]);

        let mut diag = CMatrix::zeros(3, 3);
        diag[(0, 0)] = c(2.0, 0.0);
        diag[(1, 1)] = c(3.0, 0.0);
        let s = svd(&diag).unwrap().singular_values;
        assert_abs_diff_eq!(s[0], 3.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[1], 2.0, epsilon = 1e-14);
        assert_abs_diff_eq!(s[2], 0.0, epsilon = 1e-14);

        let mut nan = CMatrix::identity(2, 2);
        nan[(0, 1)] = c(f64::NAN, 0.0);
        assert!(matches!(svd(&nan), Err(Error::NonFinite(_))));
    }

    #[test]
    fn svd_random_frobenius_and_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (rows, cols) in [(8, 5), (5, 8), (1, 4), (6, 6)] {
            let a = random_matrix(&mut rng, rows, cols);
            let spec = svd(&a).unwrap();
            let fro: f64 = a.iter().map(|z| z.norm_sqr()).sum();
            let sum: f64 = spec.singular_values.iter().map(|s| s * s).sum();
            assert!((fro - sum).abs() <= 1e-9 * fro);
            assert!(spec.singular_values.windows(2).all(|w| w[0] >= w[1]));
            let err = (spec.reconstruct() - &a).norm();
            assert!(err <= 1e-8 * a.norm());
            let r = spec.singular_values.len();
            let ui = spec.left_vectors.adjoint() * &spec.left_vectors;
            let vi = spec.right_vectors.adjoint() * &spec.right_vectors;
            assert!((ui - CMatrix::identity(r, r)).norm() < 1e-10);
            assert!((vi - CMatrix::identity(r, r)).norm() < 1e-10);
        }
    }

    #[test]
    fn dim_eps_upper_examples() {
        let base = cv(&[(1.0, 0.5), (-2.0, 0.0), (0.0, 3.0)]);
        let pts = [c(1.0, 0.0), c(-2.0, 1.0), c(0.0, 0.5)]
            .iter()
            .map(|&s| base.map(|z| z * s))
            .collect();
        let v = PointConfig::new(pts).unwrap();
        assert_eq!(dim_eps_upper(&v, 0.0).unwrap().0, 1);

        let v = PointConfig::new(vec![unit(2, 0), unit(2, 1)]).unwrap();
        let (k, l) = dim_eps_upper(&v, 1.0).unwrap();
        assert_eq!(k, 0);
        assert_eq!(l.dim(), 0);

        let v = PointConfig::new((0..4).map(|i| unit(4, i)).collect()).unwrap();
        assert_eq!(dim_eps_upper(&v, 0.0).unwrap().0, 4);
    }

    #[test]
    fn dim_eps_lower_examples() {
        let v = PointConfig::new((0..4).map(|i| unit(4, i)).collect()).unwrap();
        assert_eq!(dim_eps_lower(&v, 0.5).unwrap(), 3);
        assert_eq!(dim_eps_lower(&v, 1.0).unwrap(), 0);
        assert_eq!(dim_eps_lower(&v, 0.0).unwrap(), 4);
        assert!(dim_eps_lower(&v, -1.0).is_err());
    }

    #[test]
    fn balanced_examples() {
        let v = PointConfig::new(vec![rv(&[0.0, 0.0]), rv(&[1.0, 0.0])]).unwrap();
        assert!(check_balanced(&v, 1.0).holds);

        let v = PointConfig::new(vec![rv(&[0.0, 1.0]), rv(&[2.0, 0.0]), rv(&[0.0, 1.0])]).unwrap();
        let chk = check_balanced(&v, 10.0);
        assert!(!chk.holds);
        let (i, j, d) = chk.witness.unwrap();
        assert_eq!((i, j), (0, 2));
        assert_eq!(d, 0.0);
    }

    #[test]
    fn separated_examples() {
        let e1 = unit(2, 0);
        let v = PointConfig::new(vec![e1.clone(), -e1]).unwrap();
        assert!(!check_separated(&v, 1e-3).unwrap().holds);

        let v = PointConfig::new(vec![unit(2, 0), unit(2, 1)]).unwrap();
        assert!(check_separated(&v, 2f64.sqrt()).unwrap().holds);
        assert!(check_phase_separated(&v, 2f64.sqrt()).unwrap().holds);

        let off = PointConfig::new(vec![rv(&[2.0, 0.0])]).unwrap();
        assert!(matches!(
            check_separated(&off, 0.1),
            Err(Error::OffSphere { index: 0, .. })
        ));
    }

    #[test]
    fn phase_multiples_pass_sign_separation_only() {
        let u = cv(&[(0.6, 0.0), (0.0, 0.8)]);
        let v = PointConfig::new(vec![u.clone(), u.map(|z| z * c(0.0, 1.0))]).unwrap();
        assert!(check_separated(&v, 1.0).unwrap().holds);
        assert!(!check_phase_separated(&v, 0.1).unwrap().holds);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn pythagoras_and_unitary_invariance(seed in any::<u64>(), d in 2usize..7, k in 0usize..3) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let k = k.min(d);
            let q = random_unitary(&mut rng, d);
            let basis: Vec<CVector> = (0..k).map(|j| q.column(j).into_owned()).collect();
            let l = Subspace::new(d, basis.clone()).unwrap();
            let v = random_matrix(&mut rng, d, 1).column(0).into_owned();
            let (dist, proj) = dist_to_subspace(&v, &l).unwrap();
            let nv = norm(&v).powi(2);
            prop_assert!((dist * dist + norm(&proj).powi(2) - nv).abs() <= 1e-9 * nv.max(1.0));
            prop_assert!(dist <= norm(&v) + 1e-12);

            let w = random_unitary(&mut rng, d);
            let rot = |x: &CVector| &w * x;
            let l2 = Subspace::new(d, basis.iter().map(rot).collect()).unwrap();
            let (dist2, _) = dist_to_subspace(&rot(&v), &l2).unwrap();
            prop_assert!((dist - dist2).abs() <= 1e-9);
            let u = random_matrix(&mut rng, d, 1).column(0).into_owned();
            let d1 = distance(&u, &v).unwrap();
            let d2 = distance(&rot(&u), &rot(&v)).unwrap();
            prop_assert!((d1 - d2).abs() <= 1e-9);
        }

        #[test]
        fn bracket_ordered_and_monotone(seed in any::<u64>(), n in 1usize..9, d in 1usize..7) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = random_matrix(&mut rng, n, d);
            let v = PointConfig::new((0..n).map(|i| a.row(i).transpose()).collect()).unwrap();
            let mut prev: Option<(usize, usize)> = None;
            for eps in [0.0, 0.05, 0.2, 0.5, 1.0, 2.0] {
                let lo = dim_eps_lower(&v, eps).unwrap();
                let (hi, l) = dim_eps_upper(&v, eps).unwrap();
                prop_assert!(lo <= hi);
                for p in v.points() {
                    prop_assert!(dist_to_subspace(p, &l).unwrap().0 <= eps + SLACK);
                }
                if let Some((plo, phi)) = prev {
                    prop_assert!(lo <= plo && hi <= phi);
                }
                prev = Some((lo, hi));
            }
        }
    }
}

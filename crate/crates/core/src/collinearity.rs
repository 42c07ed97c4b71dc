//! Tube and arc membership, and bounded-coefficient dependence certificates
//! for approximately collinear (affine) or approximately dependent
//! (projective) triples.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_dims, inner, norm, phase_distance, CVector, PointConfig, C64, DEGENERACY, SLACK,
};

/// Distance from `w` to the complex line `{a u + (1 - a) v}` and the
/// minimizing coefficient `a`.
pub fn line_distance(w: &CVector, u: &CVector, v: &CVector) -> Result<(f64, C64)> {
    check_dims(u.len(), v.len())?;
    check_dims(u.len(), w.len())?;
    let dir = u - v;
    let len_sq: f64 = dir.iter().map(|z| z.norm_sqr()).sum();
    if len_sq.sqrt() <= DEGENERACY {
        return Err(Error::DegenerateLine(len_sq.sqrt()));
    }
    let off = w - v;
    let alpha = inner(&off, &dir) / len_sq;
    let resid = off - dir * alpha;
    Ok((norm(&resid), alpha))
}

/// Result of projecting a unit vector onto `span{u, v}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArcProjection {
    /// Distance from `w` to the unit sphere of the span.
    pub dist: f64,
    /// `p = alpha u + beta v` is the orthogonal projection of `w`.
    pub alpha: C64,
    pub beta: C64,
    /// `||w - p||`, never larger than `dist`.
    pub residual: f64,
}

fn require_unit_vec(v: &CVector, what: &'static str) -> Result<()> {
    let n = norm(v);
    if (n - 1.0).abs() > SLACK {
        return Err(Error::InvalidInput(format!("{what} is not a unit vector (norm {n})")));
    }
    Ok(())
}

/// Distance from the unit vector `w` to `arc(u, v) = span{u, v} ∩ S`.
///
/// When the projection of `w` onto the span vanishes every unit vector of the
/// span is orthogonal to `w` and the distance is `sqrt(2)`.
pub fn arc_distance(w: &CVector, u: &CVector, v: &CVector) -> Result<ArcProjection> {
    check_dims(u.len(), v.len())?;
    check_dims(u.len(), w.len())?;
    require_unit_vec(u, "u")?;
    require_unit_vec(v, "v")?;
    require_unit_vec(w, "w")?;

    let one = C64::new(1.0, 0.0);
    let uv = inner(v, u);
    let mut r = v.clone();
    r.axpy(-uv, u, one);
    let r_norm = norm(&r);

    let cu = inner(w, u);
    let (alpha, beta) = if r_norm > DEGENERACY {
        let cr = inner(w, &r) / (r_norm * r_norm);
        // p = cu u + cr r = (cu - cr <v,u>) u + cr v
        (cu - cr * uv, cr)
    } else {
        (cu, C64::new(0.0, 0.0))
    };
    let mut p = u * alpha;
    p.axpy(beta, v, one);
    let p_norm = norm(&p);
    let residual = norm(&(w - &p));
    let dist = if p_norm > DEGENERACY {
        norm(&(w - p.unscale(p_norm)))
    } else {
        2f64.sqrt()
    };
    Ok(ArcProjection {
        dist,
        alpha,
        beta,
        residual,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeKind {
    AffineLine,
    SphericalArc,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TubeQuery {
    pub kind: TubeKind,
    pub eps: f64,
}

impl TubeQuery {
    pub fn new(kind: TubeKind, eps: f64) -> Result<Self> {
        if !(eps >= 0.0) {
            return Err(Error::InvalidInput(format!("tube radius must be >= 0, got {eps}")));
        }
        Ok(Self { kind, eps })
    }

    /// Distance from `w` to the tube's core through `u` and `v`.
    pub fn distance(&self, w: &CVector, u: &CVector, v: &CVector) -> Result<f64> {
        match self.kind {
            TubeKind::AffineLine => Ok(line_distance(w, u, v)?.0),
            TubeKind::SphericalArc => Ok(arc_distance(w, u, v)?.dist),
        }
    }

    pub fn contains(&self, w: &CVector, u: &CVector, v: &CVector) -> Result<bool> {
        Ok(self.distance(w, u, v)? <= self.eps + SLACK)
    }
}

/// Indices `k ∉ {i, j}` with `v_k` in the tube around `(v_i, v_j)`, ascending.
pub fn tube_census(v: &PointConfig, i: usize, j: usize, q: TubeQuery) -> Result<Vec<usize>> {
    if i == j {
        return Err(Error::InvalidInput("tube census needs two distinct indices".into()));
    }
    let mut out = Vec::new();
    for k in 0..v.len() {
        if k != i && k != j && q.contains(v.point(k), v.point(i), v.point(j))? {
            out.push(k);
        }
    }
    Ok(out)
}

/// Coefficients witnessing that `alpha v_i + beta v_j + gamma v_k` is short.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DependenceCertificate {
    pub indices: [usize; 3],
    pub coefficients: [C64; 3],
    pub residual: f64,
    pub mu_floor: f64,
}

impl DependenceCertificate {
    /// `||alpha v_i + beta v_j + gamma v_k||` recomputed from `config`.
    pub fn evaluate(&self, config: &PointConfig) -> f64 {
        combination_norm(config, &self.indices, &self.coefficients)
    }

    pub fn min_magnitude(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn max_magnitude(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Coefficient sitting at `index`, if it is part of the triple.
    pub fn coefficient_at(&self, index: usize) -> Option<C64> {
        self.indices
            .iter()
            .position(|&i| i == index)
            .map(|p| self.coefficients[p])
    }

    pub fn sorted_indices(&self) -> [usize; 3] {
        let mut t = self.indices;
        t.sort_unstable();
        t
    }

    /// Re-checks the stored residual and the magnitude window `[mu_floor, 1]`.
    pub fn validate(&self, config: &PointConfig) -> Result<()> {
        let got = self.evaluate(config);
        if (got - self.residual).abs() > SLACK {
            return Err(Error::invariant(format!(
                "certificate {:?} stores residual {} but evaluates to {got}",
                self.indices, self.residual
            )));
        }
        for c in &self.coefficients {
            let m = c.norm();
            if m < self.mu_floor - SLACK || m > 1.0 + SLACK {
                return Err(Error::invariant(format!(
                    "certificate {:?} has coefficient magnitude {m} outside [{}, 1]",
                    self.indices, self.mu_floor
                )));
            }
        }
        Ok(())
    }
}

pub(crate) fn combination_norm(config: &PointConfig, idx: &[usize], coef: &[C64]) -> f64 {
    let mut acc = CVector::zeros(config.dim());
    for (&i, &c) in idx.iter().zip(coef) {
        acc.axpy(c, config.point(i), C64::new(1.0, 0.0));
    }
    norm(&acc)
}

/// Scales the coefficients so the largest magnitude is at most one and
/// builds a certificate with the measured residual.
fn normalized(
    config: &PointConfig,
    indices: [usize; 3],
    mut coefficients: [C64; 3],
    mu_floor: f64,
) -> DependenceCertificate {
    let scale = coefficients.iter().map(|c| c.norm()).fold(1.0, f64::max);
    for c in coefficients.iter_mut() {
        *c /= scale;
    }
    let residual = combination_norm(config, &indices, &coefficients);
    DependenceCertificate {
        indices,
        coefficients,
        residual,
        mu_floor,
    }
}

fn distinct(t: [usize; 3]) -> Result<()> {
    if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
        return Err(Error::InvalidInput(format!("triple {t:?} has repeated indices")));
    }
    Ok(())
}

/// Certificate for `v_k ∈ line_eps(v_i, v_j)` built from the least-squares
/// coefficient, without checking any hypothesis. `mu_floor` is the smallest
/// coefficient magnitude actually obtained.
pub fn affine_certificate_unchecked(
    config: &PointConfig,
    [i, j, k]: [usize; 3],
) -> Result<DependenceCertificate> {
    distinct([i, j, k])?;
    let (_, alpha) = line_distance(config.point(k), config.point(i), config.point(j))?;
    let one = C64::new(1.0, 0.0);
    let mut cert = normalized(config, [i, j, k], [alpha, one - alpha, -one], 0.0);
    cert.mu_floor = cert.min_magnitude();
    Ok(cert)
}

/// Certificate that the balanced triple with `v_k` near `line(v_i, v_j)` is
/// `(eps, 1/4B)`-dependent.
pub fn affine_dependence_certificate(
    config: &PointConfig,
    [i, j, k]: [usize; 3],
    b: f64,
) -> Result<DependenceCertificate> {
    distinct([i, j, k])?;
    let pts = [i, j, k];
    for (a, &p) in pts.iter().enumerate() {
        for &q in &pts[a + 1..] {
            let d = norm(&(config.point(p) - config.point(q)));
            if !(1.0 - SLACK..=b + SLACK).contains(&d) {
                return Err(Error::hypothesis(format!(
                    "triple ({i},{j},{k}) is not {b}-balanced: dist({p},{q}) = {d}"
                )));
            }
        }
    }
    let (eps, _) = line_distance(config.point(k), config.point(i), config.point(j))?;
    if eps >= 0.5 {
        return Err(Error::hypothesis(format!(
            "line distance {eps} of point {k} is not < 1/2"
        )));
    }
    let mut cert = affine_certificate_unchecked(config, [i, j, k])?;
    let floor = 1.0 / (4.0 * b);
    if cert.min_magnitude() < floor - SLACK {
        return Err(Error::TheoremViolation(format!(
            "affine coefficients of ({i},{j},{k}) fall to {} below 1/4B = {floor}",
            cert.min_magnitude()
        )));
    }
    cert.mu_floor = floor;
    Ok(cert)
}

/// Certificate for `v_k ∈ arc_eps(v_i, v_j)` from the projection coefficients,
/// without hypothesis checks. `mu_floor` is the measured minimum magnitude.
pub fn projective_certificate_unchecked(
    config: &PointConfig,
    [i, j, k]: [usize; 3],
) -> Result<DependenceCertificate> {
    distinct([i, j, k])?;
    let proj = arc_distance(config.point(k), config.point(i), config.point(j))?;
    let one = C64::new(1.0, 0.0);
    let mut cert = normalized(config, [i, j, k], [proj.alpha, proj.beta, -one], 0.0);
    cert.mu_floor = cert.min_magnitude();
    Ok(cert)
}

/// Certificate that a separated triple with `v_k` near `arc(v_i, v_j)` is
/// `(eps, mu/8)`-dependent.
///
/// Separation is checked up to unit phases: over the complex numbers `u` and
/// `i u` are `±`-separated but dependent, which would void the floor.
pub fn projective_dependence_certificate(
    config: &PointConfig,
    [i, j, k]: [usize; 3],
    mu: f64,
) -> Result<DependenceCertificate> {
    distinct([i, j, k])?;
    let pts = [i, j, k];
    for (a, &p) in pts.iter().enumerate() {
        for &q in &pts[a + 1..] {
            let d = phase_distance(config.point(p), config.point(q));
            if d < mu - SLACK {
                return Err(Error::hypothesis(format!(
                    "triple ({i},{j},{k}) is not {mu}-separated: points {p},{q} at phase distance {d}"
                )));
            }
        }
    }
    let proj = arc_distance(config.point(k), config.point(i), config.point(j))?;
    if proj.dist >= mu / 8.0 {
        return Err(Error::hypothesis(format!(
            "arc distance {} of point {k} is not < mu/8 = {}",
            proj.dist,
            mu / 8.0
        )));
    }
    let mut cert = projective_certificate_unchecked(config, [i, j, k])?;
    let floor = mu / 8.0;
    if cert.min_magnitude() < floor - SLACK {
        return Err(Error::TheoremViolation(format!(
            "projective coefficients of ({i},{j},{k}) fall to {} below mu/8 = {floor}",
            cert.min_magnitude()
        )));
    }
    cert.mu_floor = floor;
    Ok(cert)
}

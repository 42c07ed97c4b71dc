//! Families of approximately dependent triples and their design parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::collinearity::{TubeKind, TubeQuery};
use crate::error::{Error, Result};
use crate::geometry::{norm, PointConfig, C64, DEGENERACY, SLACK};

/// A set of unordered triples over `{0, .., n-1}`, each stored ascending,
/// the whole list sorted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleFamily {
    n: usize,
    triples: Vec<[usize; 3]>,
}

impl TripleFamily {
    pub fn new(n: usize, triples: Vec<[usize; 3]>) -> Result<Self> {
        let mut sorted = Vec::with_capacity(triples.len());
        for mut t in triples {
            t.sort_unstable();
            if t[2] >= n {
                return Err(Error::InvalidInput(format!("triple {t:?} out of range for n = {n}")));
            }
            if t[0] == t[1] || t[1] == t[2] {
                return Err(Error::InvalidInput(format!("triple {t:?} repeats an index")));
            }
            sorted.push(t);
        }
        sorted.sort_unstable();
        if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::InvalidInput(format!("duplicate triple {:?}", w[0])));
        }
        Ok(Self { n, triples: sorted })
    }

    pub fn empty(n: usize) -> Self {
        Self { n, triples: Vec::new() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn triples(&self) -> &[[usize; 3]] {
        &self.triples
    }

    pub fn contains(&self, t: [usize; 3]) -> bool {
        let mut t = t;
        t.sort_unstable();
        self.triples.binary_search(&t).is_ok()
    }

    /// Number of triples through each index.
    pub fn index_counts(&self) -> Vec<usize> {
        let mut counts = vec![0; self.n];
        for t in &self.triples {
            for &i in t {
                counts[i] += 1;
            }
        }
        counts
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DesignParams {
    /// Fewest triples through any index.
    pub p: usize,
    /// Most triples through any pair.
    pub g: usize,
}

pub fn design_parameters(t: &TripleFamily) -> DesignParams {
    let n = t.n;
    let p = t.index_counts().into_iter().min().unwrap_or(0);
    let mut pairs = vec![0usize; n * n];
    for &[a, b, c] in &t.triples {
        pairs[a * n + b] += 1;
        pairs[a * n + c] += 1;
        pairs[b * n + c] += 1;
    }
    let g = pairs.into_iter().max().unwrap_or(0);
    DesignParams { p, g }
}

/// One directional tube membership: `target` lies within the tube around the
/// core through `line[0]` and `line[1]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub line: [usize; 2],
    pub target: usize,
    pub dist: f64,
}

impl Witness {
    /// Indices ordered `[line[0], line[1], target]`, the shape certificates use.
    pub fn rotation(&self) -> [usize; 3] {
        [self.line[0], self.line[1], self.target]
    }
}

/// Triples found by a scan together with the tightest witness for each.
#[derive(Clone, Debug)]
pub struct CollectedTriples {
    pub family: TripleFamily,
    /// Aligned with `family.triples()`.
    pub witnesses: Vec<Witness>,
    /// `pair_hit[i * n + j]`: some third point lies in the tube around `(i, j)`.
    pair_hit: Vec<bool>,
}

impl CollectedTriples {
    pub fn pair_has_third(&self, i: usize, j: usize) -> bool {
        self.pair_hit[i * self.family.n + j]
    }

    pub fn witness_for(&self, t: [usize; 3]) -> Option<&Witness> {
        let mut t = t;
        t.sort_unstable();
        self.family
            .triples
            .binary_search(&t)
            .ok()
            .map(|k| &self.witnesses[k])
    }
}

fn check_distinct_points(v: &PointConfig) -> Result<()> {
    let g = v.gram();
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            let d2 = g[(i, i)].re + g[(j, j)].re - 2.0 * g[(i, j)].re;
            if d2 <= 1e-6 {
                let d = norm(&(v.point(i) - v.point(j)));
                if d <= DEGENERACY {
                    return Err(Error::DuplicatePoints(i, j));
                }
            }
        }
    }
    Ok(())
}

fn check_unit(v: &PointConfig) -> Result<()> {
    for (index, p) in v.points().iter().enumerate() {
        let nrm = norm(p);
        if (nrm - 1.0).abs() > SLACK {
            return Err(Error::OffSphere { index, norm: nrm });
        }
    }
    Ok(())
}

/// Squared distance of `w` to the core through `(u, v)` computed from Gram
/// entries, or `None` when the pair is too close for the shortcut to be
/// reliable.
fn screened_dist_sq(g: &[C64], n: usize, kind: TubeKind, u: usize, v: usize, w: usize) -> Option<f64> {
    let at = |i: usize, j: usize| g[i * n + j];
    match kind {
        TubeKind::AffineLine => {
            let dir_sq = at(u, u).re - 2.0 * at(u, v).re + at(v, v).re;
            let scale = 1.0 + at(u, u).re.max(at(v, v).re).max(at(w, w).re);
            if dir_sq <= 1e-6 * scale {
                return None;
            }
            let off_sq = at(w, w).re - 2.0 * at(w, v).re + at(v, v).re;
            let cross = at(w, u) - at(w, v) - at(v, u) + at(v, v);
            Some(off_sq - cross.norm_sqr() / dir_sq)
        }
        TubeKind::SphericalArc => {
            let c = at(v, u);
            let r_sq = 1.0 - c.norm_sqr();
            if r_sq <= 1e-6 {
                return None;
            }
            let wu = at(w, u);
            let wr = at(w, v) - c.conj() * wu;
            let p_sq = wu.norm_sqr() + wr.norm_sqr() / r_sq;
            Some(2.0 - 2.0 * p_sq.max(0.0).sqrt())
        }
    }
}

/// Finds every triple with at least one point inside the tube around the
/// other two, trying all three rotations.
pub fn collect_witnessed(v: &PointConfig, q: TubeQuery) -> Result<CollectedTriples> {
    match q.kind {
        TubeKind::AffineLine => check_distinct_points(v)?,
        TubeKind::SphericalArc => check_unit(v)?,
    }
    let n = v.len();
    let gm = v.gram();
    let mut g = vec![C64::new(0.0, 0.0); n * n];
    for i in 0..n {
        for j in 0..n {
            g[i * n + j] = gm[(i, j)];
        }
    }
    let scale = 1.0 + v.max_norm().powi(2);
    let cutoff = (q.eps + SLACK).powi(2) + 1e-10 * scale;

    let mut pair_hit = vec![false; n * n];
    let mut found: BTreeMap<[usize; 3], Witness> = BTreeMap::new();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for (l0, l1, w) in [(a, b, c), (b, c, a), (a, c, b)] {
                    let pass = match screened_dist_sq(&g, n, q.kind, l0, l1, w) {
                        Some(d2) => d2 <= cutoff,
                        None => true,
                    };
                    if !pass {
                        continue;
                    }
                    let dist = match q.distance(v.point(w), v.point(l0), v.point(l1)) {
                        Ok(d) => d,
                        // coincident core points span no line, so nothing is in its tube
                        Err(Error::DegenerateLine(_)) => continue,
                        Err(e) => return Err(e),
                    };
                    if dist > q.eps + SLACK {
                        continue;
                    }
                    pair_hit[l0 * n + l1] = true;
                    pair_hit[l1 * n + l0] = true;
                    let wit = Witness {
                        line: [l0, l1],
                        target: w,
                        dist,
                    };
                    found
                        .entry([a, b, c])
                        .and_modify(|old| {
                            if dist < old.dist {
                                *old = wit;
                            }
                        })
                        .or_insert(wit);
                }
            }
        }
    }
    let (triples, witnesses): (Vec<_>, Vec<_>) = found.into_iter().unzip();
    Ok(CollectedTriples {
        family: TripleFamily { n, triples },
        witnesses,
        pair_hit,
    })
}

/// Triples `{i, j, k}` where one point lies within `eps` of the complex line
/// through the other two.
pub fn collect_triples_affine(v: &PointConfig, eps: f64) -> Result<TripleFamily> {
    Ok(collect_witnessed(v, TubeQuery::new(TubeKind::AffineLine, eps)?)?.family)
}

/// Triples `{i, j, k}` of unit vectors where one lies within `eps` of the arc
/// spanned by the other two.
pub fn collect_triples_arc(v: &PointConfig, eps: f64) -> Result<TripleFamily> {
    Ok(collect_witnessed(v, TubeQuery::new(TubeKind::SphericalArc, eps)?)?.family)
}

/// `ceil(x)` that ignores rounding noise just above an integer.
pub fn ceil_count(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

/// Keeps, greedily and in index order, the lowest triples until every index
/// lies in at least `target` of them.
pub fn prune_to_count(t: &TripleFamily, target: usize) -> Result<TripleFamily> {
    let counts = t.index_counts();
    let deficient: Vec<usize> = (0..t.n).filter(|&i| counts[i] < target).collect();
    if !deficient.is_empty() {
        return Err(Error::hypothesis(format!(
            "indices {deficient:?} lie in fewer than {target} triples"
        )));
    }
    let mut through: Vec<Vec<usize>> = vec![Vec::new(); t.n];
    for (k, tr) in t.triples.iter().enumerate() {
        for &i in tr {
            through[i].push(k);
        }
    }
    let mut keep = vec![false; t.len()];
    let mut kept = vec![0usize; t.n];
    for i in 0..t.n {
        for &k in &through[i] {
            if kept[i] >= target {
                break;
            }
            if !keep[k] {
                keep[k] = true;
                for &x in &t.triples[k] {
                    kept[x] += 1;
                }
            }
        }
    }
    let triples = t
        .triples
        .iter()
        .zip(&keep)
        .filter(|(_, &k)| k)
        .map(|(tr, _)| *tr)
        .collect();
    Ok(TripleFamily { n: t.n, triples })
}

/// Prunes so every index keeps at least `ceil(delta (n-1))` triples.
pub fn prune_to_design(t: &TripleFamily, delta: f64) -> Result<TripleFamily> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::InvalidInput(format!("delta must lie in [0, 1], got {delta}")));
    }
    prune_to_count(t, ceil_count(delta * (t.n.saturating_sub(1)) as f64))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    /// For each `i`, the number of `j != i` whose pair with `i` has a third
    /// point in its tube.
    pub counts: Vec<usize>,
    /// `delta (n - 1)`.
    pub required: f64,
    pub deficient: Vec<usize>,
    pub holds: bool,
}

pub(crate) fn hypothesis_from(c: &CollectedTriples, delta: f64) -> HypothesisReport {
    let n = c.family.n;
    let counts: Vec<usize> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && c.pair_has_third(i, j)).count())
        .collect();
    let required = delta * n.saturating_sub(1) as f64;
    let deficient: Vec<usize> = (0..n)
        .filter(|&i| (counts[i] as f64) < required - 1e-9)
        .collect();
    HypothesisReport {
        holds: deficient.is_empty(),
        counts,
        required,
        deficient,
    }
}

/// Checks that every point has at least `delta (n-1)` partners whose pair
/// has a third point in its tube.
pub fn sg_hypothesis_check(v: &PointConfig, eps: f64, delta: f64, kind: TubeKind) -> Result<HypothesisReport> {
    let c = collect_witnessed(v, TubeQuery::new(kind, eps)?)?;
    Ok(hypothesis_from(&c, delta))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::test_support::*;
    use crate::geometry::{check_balanced, CVector};
    use itertools::Itertools;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn complete(n: usize) -> TripleFamily {
        TripleFamily::new(n, (0..n).combinations(3).map(|c| [c[0], c[1], c[2]]).collect()).unwrap()
    }

    fn example_affine(b: f64, d: usize) -> PointConfig {
        let mut pts = Vec::new();
        for i in 0..d {
            pts.push(unit(d, i));
            pts.push(unit(d, i) * c(b - 1.0, 0.0));
            pts.push(unit(d, i) * c(b, 0.0));
        }
        PointConfig::new(pts).unwrap()
    }

    fn brute_params(t: &TripleFamily) -> DesignParams {
        let n = t.n();
        let p = (0..n)
            .map(|i| t.triples().iter().filter(|tr| tr.contains(&i)).count())
            .min()
            .unwrap();
        let g = (0..n)
            .tuple_combinations()
            .map(|(i, j)| {
                t.triples()
                    .iter()
                    .filter(|tr| tr.contains(&i) && tr.contains(&j))
                    .count()
            })
            .max()
            .unwrap_or(0);
        DesignParams { p, g }
    }

    #[test]
    fn family_validation() {
        assert!(TripleFamily::new(3, vec![[0, 1, 3]]).is_err());
        assert!(TripleFamily::new(3, vec![[0, 1, 1]]).is_err());
        assert!(TripleFamily::new(3, vec![[0, 1, 2], [2, 1, 0]]).is_err());
        let t = TripleFamily::new(4, vec![[3, 1, 0], [0, 1, 2]]).unwrap();
        assert_eq!(t.triples(), &[[0, 1, 2], [0, 1, 3]]);
        assert!(t.contains([1, 3, 0]));
    }

    #[test]
    fn collect_affine_examples() {
        let v = PointConfig::from_real(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        assert_eq!(collect_triples_affine(&v, 0.0).unwrap().triples(), &[[0, 1, 2]]);

        let e = PointConfig::new(vec![unit(3, 0), unit(3, 1), unit(3, 2)]).unwrap();
        assert!(collect_triples_affine(&e, 0.1).unwrap().is_empty());

        let dup = PointConfig::from_real(&[vec![0.0], vec![1.0], vec![0.0]]).unwrap();
        assert!(matches!(
            collect_triples_affine(&dup, 0.1),
            Err(Error::DuplicatePoints(0, 2))
        ));
    }

    #[test]
    fn example_affine_family_contains_planted_triples() {
        let (b, d) = (10.0, 4);
        let v = example_affine(b, d);
        let t = collect_triples_affine(&v, 0.1).unwrap();
        // index layout: e_i = 3i, u_i = 3i + 1, v_i = 3i + 2
        for i in 0..d {
            for j in 0..d {
                if i != j {
                    assert!(t.contains([3 * i + 1, 3 * i + 2, 3 * j]), "i={i} j={j}");
                }
            }
        }
        let counts = t.index_counts();
        for i in 0..d {
            assert!(counts[3 * i + 1] >= d - 1);
            assert!(counts[3 * i + 2] >= d - 1);
        }
    }

    #[test]
    fn example_affine_hypothesis_needs_slightly_more_than_one_over_b() {
        let (b, d) = (10.0, 6);
        let v = example_affine(b, d);
        let n = 3 * d;
        let loose = sg_hypothesis_check(&v, 1.0 / (b - 1.0), 1.0 / 3.0, TubeKind::AffineLine).unwrap();
        assert!(loose.holds, "{:?}", loose.counts);
        // at exactly 1/B the pair (u_i, e_j) has no third point: v_i sits at
        // 1/sqrt((B-1)^2 + 1) > 1/B from line(u_i, e_j)
        let tight = sg_hypothesis_check(&v, 1.0 / b, 1.0 / 3.0, TubeKind::AffineLine).unwrap();
        assert!(!tight.holds);
        for i in 0..d {
            assert_eq!(tight.counts[3 * i + 1], 2);
            assert!(tight.counts[3 * i + 2] as f64 >= (n - 1) as f64 / 3.0);
        }
    }

    #[test]
    fn collect_arc_examples() {
        let u = unit(3, 0);
        let w = unit(3, 1);
        let s = (&u + &w).unscale(2f64.sqrt());
        let v = PointConfig::new(vec![u, w, s]).unwrap();
        assert_eq!(collect_triples_arc(&v, 0.0).unwrap().triples(), &[[0, 1, 2]]);

        let e = PointConfig::new(vec![unit(3, 0), unit(3, 1), unit(3, 2)]).unwrap();
        assert!(collect_triples_arc(&e, 0.5).unwrap().is_empty());

        let off = PointConfig::from_real(&[vec![1.0, 0.0], vec![0.0, 2.0], vec![1.0, 0.0]]).unwrap();
        assert!(matches!(
            collect_triples_arc(&off, 0.1),
            Err(Error::OffSphere { index: 1, .. })
        ));
    }

    #[test]
    fn screened_collection_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for round in 0..6 {
            let n = 18;
            // points on a few random lines plus clutter, so hits exist
            let d = 3;
            let mut pts: Vec<CVector> = Vec::new();
            while pts.len() < n {
                let a = CVector::from_fn(d, |_, _| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
                let b = CVector::from_fn(d, |_, _| c(rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)));
                for _ in 0..3 {
                    let t = c(rng.random_range(-1.0..2.0), 0.0);
                    let noise = CVector::from_fn(d, |_, _| c(rng.random_range(-0.01..0.01), 0.0));
                    pts.push(&a * t + &b * (c(1.0, 0.0) - t) + noise);
                }
            }
            pts.truncate(n);
            let v = PointConfig::new(pts).unwrap();
            let eps = 0.02 * (round + 1) as f64;
            let q = TubeQuery::new(TubeKind::AffineLine, eps).unwrap();
            let got = collect_triples_affine(&v, eps).unwrap();
            let mut want = Vec::new();
            for tr in (0..n).combinations(3) {
                let (a, b, cc) = (tr[0], tr[1], tr[2]);
                let hit = [(a, b, cc), (b, cc, a), (a, cc, b)]
                    .iter()
                    .any(|&(x, y, z)| q.contains(v.point(z), v.point(x), v.point(y)).unwrap());
                if hit {
                    want.push([a, b, cc]);
                }
            }
            assert_eq!(got.triples(), want.as_slice());
        }
    }

    #[test]
    fn screened_arc_collection_matches_exhaustive_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let n = 16;
        let mut pts = Vec::new();
        let base: Vec<CVector> = (0..3)
            .map(|_| CVector::from_fn(4, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))))
            .collect();
        for _ in 0..n {
            let a = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let b = c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let k = rng.random_range(0..2);
            let mut p = &base[k] * a + &base[k + 1] * b;
            p += CVector::from_fn(4, |_, _| c(rng.random_range(-0.01..0.01), 0.0));
            let nn = norm(&p);
            pts.push(p.unscale(nn));
        }
        let v = PointConfig::new(pts).unwrap();
        for eps in [0.0, 0.01, 0.05, 0.2] {
            let q = TubeQuery::new(TubeKind::SphericalArc, eps).unwrap();
            let got = collect_triples_arc(&v, eps).unwrap();
            let want: Vec<[usize; 3]> = (0..n)
                .combinations(3)
                .filter(|tr| {
                    let (a, b, cc) = (tr[0], tr[1], tr[2]);
                    [(a, b, cc), (b, cc, a), (a, cc, b)]
                        .iter()
                        .any(|&(x, y, z)| q.contains(v.point(z), v.point(x), v.point(y)).unwrap())
                })
                .map(|tr| [tr[0], tr[1], tr[2]])
                .collect();
            assert_eq!(got.triples(), want.as_slice(), "eps {eps}");
        }
    }

    #[test]
    fn collection_is_monotone_in_eps() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let pts: Vec<Vec<f64>> = (0..20)
            .map(|_| (0..2).map(|_| rng.random_range(-3.0..3.0)).collect())
            .collect();
        let v = PointConfig::from_real(&pts).unwrap();
        let mut prev = collect_triples_affine(&v, 0.0).unwrap();
        for k in 1..10 {
            let next = collect_triples_affine(&v, 0.05 * k as f64).unwrap();
            assert!(prev.triples().iter().all(|t| next.contains(*t)));
            prev = next;
        }
    }

    #[test]
    fn design_parameter_examples() {
        assert_eq!(design_parameters(&complete(5)), DesignParams { p: 6, g: 3 });
        assert_eq!(
            design_parameters(&TripleFamily::new(3, vec![[0, 1, 2]]).unwrap()),
            DesignParams { p: 1, g: 1 }
        );
        assert_eq!(design_parameters(&TripleFamily::empty(4)), DesignParams { p: 0, g: 0 });
    }

    #[test]
    fn design_parameters_match_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..30 {
            let n = rng.random_range(3..=30);
            let all: Vec<[usize; 3]> = (0..n).combinations(3).map(|c| [c[0], c[1], c[2]]).collect();
            let picked = all.into_iter().filter(|_| rng.random_bool(0.1)).collect();
            let t = TripleFamily::new(n, picked).unwrap();
            if t.is_empty() {
                continue;
            }
            assert_eq!(design_parameters(&t), brute_params(&t));
        }
    }

    #[test]
    fn prune_examples() {
        let t = TripleFamily::new(3, vec![[0, 1, 2]]).unwrap();
        assert_eq!(prune_to_design(&t, 0.5).unwrap(), t);

        let full = complete(6);
        let pruned = prune_to_design(&full, 0.2).unwrap();
        assert!(pruned.index_counts().iter().all(|&c| c >= 1));
        assert!(pruned.len() as f64 <= 0.2 * 36.0);

        let isolated = TripleFamily::new(4, vec![[0, 1, 2]]).unwrap();
        match prune_to_design(&isolated, 0.3) {
            Err(Error::HypothesisNotMet(msg)) => assert!(msg.contains("[3]"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn prune_keeps_counts_and_never_grows() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for _ in 0..40 {
            let n = rng.random_range(5..=20);
            let all: Vec<[usize; 3]> = (0..n).combinations(3).map(|c| [c[0], c[1], c[2]]).collect();
            let t = TripleFamily::new(n, all.into_iter().filter(|_| rng.random_bool(0.5)).collect()).unwrap();
            let p = design_parameters(&t).p;
            let target = rng.random_range(0..=p);
            let pruned = prune_to_count(&t, target).unwrap();
            assert!(pruned.len() <= t.len());
            assert!(pruned.index_counts().iter().all(|&c| c >= target));
            assert!(pruned.len() <= n * target);
            assert!(pruned.triples().iter().all(|tr| t.contains(*tr)));
        }
    }

    #[test]
    fn hypothesis_examples() {
        let v = PointConfig::from_real(&[vec![0.0], vec![1.0], vec![2.0]]).unwrap();
        let r = sg_hypothesis_check(&v, 0.0, 1.0, TubeKind::AffineLine).unwrap();
        assert!(r.holds);
        assert_eq!(r.counts, vec![2, 2, 2]);

        let e = PointConfig::new((0..4).map(|i| unit(4, i)).collect()).unwrap();
        let r = sg_hypothesis_check(&e, 0.01, 0.1, TubeKind::AffineLine).unwrap();
        assert!(!r.holds);
        assert_eq!(r.counts, vec![0; 4]);
    }

    #[test]
    fn balanced_density_bound_on_real_grid() {
        // real grid points: a complex line through two real points meets
        // the real grid only along the real line, so g stays below 5B
        let pts: Vec<Vec<f64>> = (0..4)
            .flat_map(|x| (0..4).map(move |y| vec![x as f64, y as f64]))
            .collect();
        let v = PointConfig::from_real(&pts).unwrap();
        let b = check_balanced(&v, 100.0).max_distance;
        let eps = 1.0 / (16.0 * b) * 0.99;
        let t = collect_triples_affine(&v, eps).unwrap();
        let g = design_parameters(&t).g;
        assert!((g as f64) < 5.0 * b, "g = {g}, B = {b}");
    }

    #[test]
    fn gaussian_integer_disk_exceeds_real_density_bound() {
        // a complex line is a real 2-plane: it can hold ~B^2 balanced points,
        // more than 5B once B is moderately large
        let r: i32 = 6;
        let mut pts = Vec::new();
        for x in -r..=r {
            for y in -r..=r {
                if x * x + y * y <= r * r {
                    pts.push(CVector::from_vec(vec![c(x as f64, y as f64)]));
                }
            }
        }
        let v = PointConfig::new(pts).unwrap();
        let b = check_balanced(&v, 100.0).max_distance;
        let t = collect_triples_affine(&v, 1.0 / (16.0 * b) * 0.99).unwrap();
        let g = design_parameters(&t).g;
        assert!((g as f64) > 5.0 * b, "g = {g}, B = {b}");
    }
}

//! Dominance utilities, the non-dominated archive, and the quality
//! indicators: hypervolume, expected utility, sparsity and averaged
//! Hausdorff distance. Everything works under the maximisation
//! convention on plain objective slices so that two- and
//! three-objective inputs share one code path.
//!
//! Hypervolume is computed on raw objective values against a reference
//! point; the other indicators operate on bounds-normalised values so
//! that objectives of very different scales stay commensurable.

use std::fmt;

use crate::objective::ObjectiveVector;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    DimensionMismatch { expected: usize, got: usize },
    EmptyFront,
    EmptyWeights,
    EmptyTruth,
    InvalidBounds(String),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::DimensionMismatch { expected, got } => {
                write!(f, "expected {expected} objectives, got {got}")
            }
            MetricsError::EmptyFront => write!(f, "front is empty"),
            MetricsError::EmptyWeights => write!(f, "weight set is empty"),
            MetricsError::EmptyTruth => write!(f, "reference front is empty"),
            MetricsError::InvalidBounds(msg) => write!(f, "invalid bounds: {msg}"),
        }
    }
}

impl std::error::Error for MetricsError {}

/// Strict Pareto dominance under maximisation: `a` is at least as good
/// everywhere and strictly better somewhere.
///
/// Panics if the slices have different lengths.
pub fn dominates(a: &[f64], b: &[f64]) -> bool {
    assert_eq!(a.len(), b.len(), "objective dimension mismatch");
    let mut strict = false;
    for (&x, &y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// Indices of the non-dominated subset, in first-occurrence order.
/// Exact duplicates keep their first representative.
pub fn nondominated_indices(points: &[Vec<f64>]) -> Vec<usize> {
    let mut kept: Vec<usize> = Vec::new();
    'candidates: for (i, p) in points.iter().enumerate() {
        let mut j = 0;
        while j < kept.len() {
            let q = &points[kept[j]];
            if dominates(q, p) || q == p {
                continue 'candidates;
            }
            if dominates(p, q) {
                kept.swap_remove(j);
            } else {
                j += 1;
            }
        }
        kept.push(i);
    }
    kept.sort_unstable();
    kept
}

/// A set of mutually non-dominated points with opaque provenance
/// handles (by default the original index of each surviving point).
#[derive(Debug, Clone, PartialEq)]
pub struct Front {
    pub points: Vec<Vec<f64>>,
    pub provenance: Vec<usize>,
}

impl Front {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Retains exactly the non-dominated subset of `points`.
pub fn pareto_filter(points: &[Vec<f64>]) -> Front {
    let kept = nondominated_indices(points);
    Front {
        points: kept.iter().map(|&i| points[i].clone()).collect(),
        provenance: kept,
    }
}

/// Estimated best-known front: the non-dominated subset of the union of
/// several fronts. Provenance indexes into the concatenation order.
pub fn estimate_true_front(fronts: &[Front]) -> Front {
    let all: Vec<Vec<f64>> = fronts
        .iter()
        .flat_map(|f| f.points.iter().cloned())
        .collect();
    pareto_filter(&all)
}

/// A non-dominated archive of (objective vector, handle) pairs. Inserts
/// prune dominated members; duplicates of a kept point are rejected.
#[derive(Debug, Clone)]
pub struct ParetoArchive<H> {
    points: Vec<Vec<f64>>,
    handles: Vec<H>,
}

impl<H> Default for ParetoArchive<H> {
    fn default() -> Self {
        Self {
            points: Vec::new(),
            handles: Vec::new(),
        }
    }
}

impl<H> ParetoArchive<H> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers a point; returns whether it was kept.
    pub fn insert(&mut self, point: Vec<f64>, handle: H) -> bool {
        let mut i = 0;
        while i < self.points.len() {
            let q = &self.points[i];
            if dominates(q, &point) || *q == point {
                return false;
            }
            if dominates(&point, q) {
                self.points.swap_remove(i);
                self.handles.swap_remove(i);
            } else {
                i += 1;
            }
        }
        self.points.push(point);
        self.handles.push(handle);
        true
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn handles(&self) -> &[H] {
        &self.handles
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn hypervolume(&self, reference: &[f64]) -> f64 {
        hypervolume(&self.points, reference)
    }
}

/// A convex weighting of objectives: non-negative components summing
/// to one.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(pub Vec<f64>);

impl WeightVector {
    /// Unit weight on objective `b` out of `m`.
    pub fn unit(m: usize, b: usize) -> Self {
        let mut w = vec![0.0; m];
        w[b] = 1.0;
        WeightVector(w)
    }

    /// The centroid weight `1/m` everywhere.
    pub fn centroid(m: usize) -> Self {
        WeightVector(vec![1.0 / m as f64; m])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Per-objective (min, max) pairs used to map raw objectives into
/// [0, 1]; `min < max` is required for every objective.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalisationBounds {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl NormalisationBounds {
    #[allow(clippy::neg_cmp_op_on_partial_ord)] // NaN bounds must fail
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self, MetricsError> {
        if lower.len() != upper.len() {
            return Err(MetricsError::DimensionMismatch {
                expected: lower.len(),
                got: upper.len(),
            });
        }
        for (b, (&lo, &hi)) in lower.iter().zip(&upper).enumerate() {
            if !(lo < hi) {
                return Err(MetricsError::InvalidBounds(format!(
                    "objective {b}: lower {lo} must be below upper {hi}"
                )));
            }
        }
        Ok(Self { lower, upper })
    }

    /// The identity map on [0, 1] objectives.
    pub fn identity(m: usize) -> Self {
        Self {
            lower: vec![0.0; m],
            upper: vec![1.0; m],
        }
    }

    /// Envelope of a point set, widened by 5% of each range (degenerate
    /// ranges are padded so the invariant holds).
    pub fn from_points(points: &[Vec<f64>]) -> Result<Self, MetricsError> {
        if points.is_empty() {
            return Err(MetricsError::EmptyFront);
        }
        let m = points[0].len();
        let mut lower = vec![f64::INFINITY; m];
        let mut upper = vec![f64::NEG_INFINITY; m];
        for p in points {
            if p.len() != m {
                return Err(MetricsError::DimensionMismatch {
                    expected: m,
                    got: p.len(),
                });
            }
            for b in 0..m {
                lower[b] = lower[b].min(p[b]);
                upper[b] = upper[b].max(p[b]);
            }
        }
        for b in 0..m {
            let range = upper[b] - lower[b];
            let pad = if range > 0.0 { 0.05 * range } else { 0.5 };
            lower[b] -= pad;
            upper[b] += pad;
        }
        Self::new(lower, upper)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    /// Affine map of one point into normalised coordinates.
    pub fn normalise(&self, v: &[f64]) -> Vec<f64> {
        assert_eq!(v.len(), self.dim(), "objective dimension mismatch");
        v.iter()
            .enumerate()
            .map(|(b, &x)| (x - self.lower[b]) / (self.upper[b] - self.lower[b]))
            .collect()
    }

    pub fn normalise_objective(&self, v: &ObjectiveVector) -> Vec<f64> {
        self.normalise(&v.as_array())
    }
}

fn hv2d(points: &[(f64, f64)], ref_x: f64, ref_y: f64) -> f64 {
    // Points must strictly dominate the reference. Sweep by descending
    // x, accumulating strips above the best y seen so far.
    let mut pts = points.to_vec();
    pts.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut best_y = ref_y;
    let mut volume = 0.0;
    for (x, y) in pts {
        if y > best_y {
            volume += (x - ref_x) * (y - best_y);
            best_y = y;
        }
    }
    volume
}

/// Exact dominated hypervolume for one to three objectives under
/// maximisation. Points that fail to strictly dominate the reference
/// contribute nothing and are skipped.
pub fn hypervolume(points: &[Vec<f64>], reference: &[f64]) -> f64 {
    hypervolume_with_excluded(points, reference).0
}

/// As [`hypervolume`], also reporting the indices of skipped points.
pub fn hypervolume_with_excluded(points: &[Vec<f64>], reference: &[f64]) -> (f64, Vec<usize>) {
    let m = reference.len();
    assert!(
        (1..=3).contains(&m),
        "hypervolume supports 1 to 3 objectives, got {m}"
    );
    let mut kept: Vec<&Vec<f64>> = Vec::new();
    let mut excluded = Vec::new();
    for (i, p) in points.iter().enumerate() {
        assert_eq!(p.len(), m, "objective dimension mismatch");
        if p.iter().zip(reference).all(|(&x, &r)| x > r) {
            kept.push(p);
        } else {
            excluded.push(i);
        }
    }
    if kept.is_empty() {
        return (0.0, excluded);
    }
    let volume = match m {
        1 => kept
            .iter()
            .map(|p| p[0] - reference[0])
            .fold(0.0f64, f64::max),
        2 => hv2d(
            &kept.iter().map(|p| (p[0], p[1])).collect::<Vec<_>>(),
            reference[0],
            reference[1],
        ),
        _ => {
            // Sweep slabs of the third objective from the top: within a
            // slab the dominated area is the 2-d hypervolume of every
            // point reaching at least that high.
            let mut zs: Vec<f64> = kept.iter().map(|p| p[2]).collect();
            zs.sort_by(|a, b| b.partial_cmp(a).unwrap());
            zs.dedup();
            let mut volume = 0.0;
            for (k, &z) in zs.iter().enumerate() {
                let lower = if k + 1 < zs.len() { zs[k + 1] } else { reference[2] };
                let slab: Vec<(f64, f64)> = kept
                    .iter()
                    .filter(|p| p[2] >= z)
                    .map(|p| (p[0], p[1]))
                    .collect();
                volume += hv2d(&slab, reference[0], reference[1]) * (z - lower);
            }
            volume
        }
    };
    (volume, excluded)
}

/// Expected utility: the mean over the weight set of the best linear
/// utility any front point achieves on bounds-normalised values.
pub fn eum(
    front: &[Vec<f64>],
    weights: &[WeightVector],
    bounds: &NormalisationBounds,
) -> Result<f64, MetricsError> {
    if front.is_empty() {
        return Err(MetricsError::EmptyFront);
    }
    if weights.is_empty() {
        return Err(MetricsError::EmptyWeights);
    }
    let normalised: Vec<Vec<f64>> = front.iter().map(|p| bounds.normalise(p)).collect();
    let mut total = 0.0;
    for w in weights {
        if w.len() != bounds.dim() {
            return Err(MetricsError::DimensionMismatch {
                expected: bounds.dim(),
                got: w.len(),
            });
        }
        let best = normalised
            .iter()
            .map(|v| v.iter().zip(&w.0).map(|(x, wb)| x * wb).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max);
        total += best;
    }
    Ok(total / weights.len() as f64)
}

/// Mean squared gap between per-objective-sorted adjacent solutions on
/// bounds-normalised values. Undefined (`None`) for fewer than two
/// points.
pub fn sparsity(front: &[Vec<f64>], bounds: &NormalisationBounds) -> Option<f64> {
    let n = front.len();
    if n < 2 {
        return None;
    }
    let normalised: Vec<Vec<f64>> = front.iter().map(|p| bounds.normalise(p)).collect();
    let m = bounds.dim();
    let mut total = 0.0;
    for b in 0..m {
        let mut column: Vec<f64> = normalised.iter().map(|v| v[b]).collect();
        column.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for pair in column.windows(2) {
            total += (pair[0] - pair[1]).powi(2);
        }
    }
    Some(total / (n - 1) as f64)
}

fn min_distance(point: &[f64], set: &[Vec<f64>]) -> f64 {
    set.iter()
        .map(|q| {
            point
                .iter()
                .zip(q)
                .map(|(&a, &b)| (a - b).powi(2))
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

/// Average distance from each point of `from` to the set `to`, in the
/// p-mean sense, on bounds-normalised values.
pub fn generational_distance(
    from: &[Vec<f64>],
    to: &[Vec<f64>],
    bounds: &NormalisationBounds,
    p: f64,
) -> Result<f64, MetricsError> {
    if from.is_empty() {
        return Err(MetricsError::EmptyFront);
    }
    if to.is_empty() {
        return Err(MetricsError::EmptyTruth);
    }
    let from_n: Vec<Vec<f64>> = from.iter().map(|v| bounds.normalise(v)).collect();
    let to_n: Vec<Vec<f64>> = to.iter().map(|v| bounds.normalise(v)).collect();
    let total: f64 = from_n
        .iter()
        .map(|x| min_distance(x, &to_n).powf(p))
        .sum();
    Ok((total / from.len() as f64).powf(1.0 / p))
}

/// Averaged Hausdorff distance: the worse of the generational distance
/// of the front to the reference set and the inverted generational
/// distance of the reference set to the front.
pub fn ahd(
    front: &[Vec<f64>],
    truth: &[Vec<f64>],
    bounds: &NormalisationBounds,
    p: f64,
) -> Result<f64, MetricsError> {
    let gd = generational_distance(front, truth, bounds, p)?;
    let igd = generational_distance(truth, front, bounds, p)?;
    Ok(gd.max(igd))
}

/// Simplex-lattice weight vectors with `partitions` divisions per
/// objective, in ascending lexicographic order. The count is
/// `C(partitions + m - 1, m - 1)`.
pub fn das_dennis(objectives: usize, partitions: usize) -> Vec<WeightVector> {
    assert!(objectives >= 2, "need at least two objectives");
    assert!(partitions >= 1, "need at least one partition");
    let mut out = Vec::new();
    let mut current = vec![0.0; objectives];
    fill_lattice(objectives, partitions, partitions, 0, &mut current, &mut out);
    out
}

fn fill_lattice(
    m: usize,
    partitions: usize,
    remaining: usize,
    depth: usize,
    current: &mut Vec<f64>,
    out: &mut Vec<WeightVector>,
) {
    if depth == m - 1 {
        current[depth] = remaining as f64 / partitions as f64;
        out.push(WeightVector(current.clone()));
        return;
    }
    for i in 0..=remaining {
        current[depth] = i as f64 / partitions as f64;
        fill_lattice(m, partitions, remaining - i, depth + 1, current, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn pts(raw: &[&[f64]]) -> Vec<Vec<f64>> {
        raw.iter().map(|p| p.to_vec()).collect()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&[2.0, 2.0], &[1.0, 1.0]));
        assert!(!dominates(&[1.0, 1.0], &[1.0, 1.0]));
        assert!(!dominates(&[2.0, 0.0], &[1.0, 1.0]));
        assert!(!dominates(&[1.0, 1.0], &[2.0, 0.0]));
    }

    #[test]
    fn filter_examples() {
        let front = pareto_filter(&pts(&[&[1.0, 1.0], &[2.0, 2.0]]));
        assert_eq!(front.points, pts(&[&[2.0, 2.0]]));
        assert_eq!(front.provenance, vec![1]);

        let front = pareto_filter(&pts(&[&[2.0, 0.0], &[0.0, 2.0], &[1.0, 1.0]]));
        assert_eq!(front.len(), 3);

        // Duplicates keep one representative, the first.
        let front = pareto_filter(&pts(&[&[1.0, 2.0], &[1.0, 2.0], &[2.0, 1.0]]));
        assert_eq!(front.provenance, vec![0, 2]);
    }

    #[test]
    fn filter_is_idempotent_on_random_sets() {
        let mut rng = crate::seeding::stream(0, 0xF1, 0);
        for _ in 0..20 {
            let points: Vec<Vec<f64>> = (0..60)
                .map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect())
                .collect();
            let once = pareto_filter(&points);
            let twice = pareto_filter(&once.points);
            assert_eq!(once.points, twice.points);
        }
    }

    #[test]
    fn hypervolume_examples() {
        assert_eq!(
            hypervolume(&pts(&[&[2.0, 2.0, 2.0]]), &[0.0, 0.0, 0.0]),
            8.0
        );
        assert_eq!(hypervolume(&pts(&[&[3.0, 1.0], &[1.0, 3.0]]), &[0.0, 0.0]), 5.0);
        assert_eq!(hypervolume(&[], &[0.0, 0.0]), 0.0);
    }

    #[test]
    fn hypervolume_excludes_points_below_the_reference() {
        let points = pts(&[&[2.0, 2.0], &[-1.0, 5.0]]);
        let (volume, excluded) = hypervolume_with_excluded(&points, &[0.0, 0.0]);
        assert_eq!(volume, 4.0);
        assert_eq!(excluded, vec![1]);
    }

    #[test]
    fn hypervolume_matches_monte_carlo_on_random_3d_fronts() {
        let mut rng = crate::seeding::stream(1, 0xF1, 0);
        for case in 0..5 {
            let cloud: Vec<Vec<f64>> = (0..10)
                .map(|_| (0..3).map(|_| rng.gen_range(0.1..1.0)).collect())
                .collect();
            let front = pareto_filter(&cloud).points;
            let reference = [0.0, 0.0, 0.0];
            let exact = hypervolume(&front, &reference);

            let samples = 200_000;
            let mut hits = 0usize;
            for _ in 0..samples {
                let x: [f64; 3] = [rng.gen(), rng.gen(), rng.gen()];
                if front
                    .iter()
                    .any(|p| p[0] >= x[0] && p[1] >= x[1] && p[2] >= x[2])
                {
                    hits += 1;
                }
            }
            let p = hits as f64 / samples as f64;
            let sigma = (p * (1.0 - p) / samples as f64).sqrt().max(1e-9);
            assert!(
                (p - exact).abs() <= 4.0 * sigma + 1e-3,
                "case {case}: MC {p} vs exact {exact}"
            );
        }
    }

    #[test]
    fn eum_hand_oracle() {
        let bounds = NormalisationBounds::identity(2);
        let front = pts(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let weights = vec![
            WeightVector(vec![1.0, 0.0]),
            WeightVector(vec![0.0, 1.0]),
            WeightVector(vec![0.5, 0.5]),
        ];
        let value = eum(&front, &weights, &bounds).unwrap();
        assert!((value - 5.0 / 6.0).abs() < 1e-12);

        // A single ideal point scores one for any weights.
        let ideal = pts(&[&[1.0, 1.0]]);
        assert!((eum(&ideal, &weights, &bounds).unwrap() - 1.0).abs() < 1e-12);

        // One point, one weight: plain scalar product.
        let single = pts(&[&[0.25, 0.5]]);
        let w = vec![WeightVector(vec![0.4, 0.6])];
        assert!((eum(&single, &w, &bounds).unwrap() - (0.25 * 0.4 + 0.5 * 0.6)).abs() < 1e-12);

        assert_eq!(eum(&[], &weights, &bounds), Err(MetricsError::EmptyFront));
    }

    #[test]
    fn sparsity_hand_oracle() {
        let bounds = NormalisationBounds::identity(2);
        let value = sparsity(&pts(&[&[0.0, 1.0], &[1.0, 0.0]]), &bounds).unwrap();
        assert!((value - 2.0).abs() < 1e-12);
        assert_eq!(
            sparsity(&pts(&[&[0.3, 0.7], &[0.3, 0.7]]), &bounds),
            Some(0.0)
        );
        assert_eq!(sparsity(&pts(&[&[0.5, 0.5]]), &bounds), None);
    }

    #[test]
    fn ahd_hand_oracle() {
        let bounds = NormalisationBounds::identity(2);
        let front = pts(&[&[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(ahd(&front, &front, &bounds, 2.0).unwrap(), 0.0);

        let truth = pts(&[&[0.0, 0.0]]);
        let value = ahd(&front, &truth, &bounds, 2.0).unwrap();
        assert!((value - 1.0).abs() < 1e-12);

        // Adding a shared point never increases the distance.
        let mut front2 = front.clone();
        let mut truth2 = truth.clone();
        front2.push(vec![0.5, 0.5]);
        truth2.push(vec![0.5, 0.5]);
        assert!(ahd(&front2, &truth2, &bounds, 2.0).unwrap() <= value);
    }

    #[test]
    fn das_dennis_counts_and_order() {
        let w = das_dennis(3, 5);
        assert_eq!(w.len(), 21);
        assert_eq!(w[0].0, vec![0.0, 0.0, 1.0]);
        assert!(w.iter().any(|v| v.0 == vec![1.0, 0.0, 0.0]));
        assert!(w.iter().any(|v| v.0 == vec![0.0, 0.2, 0.8]));
        for v in &w {
            assert!((v.0.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            assert!(v.0.iter().all(|&x| x >= 0.0));
        }
        // Ascending lexicographic order.
        for pair in w.windows(2) {
            assert!(pair[0].0 < pair[1].0);
        }

        assert_eq!(
            das_dennis(2, 1)
                .iter()
                .map(|v| v.0.clone())
                .collect::<Vec<_>>(),
            vec![vec![0.0, 1.0], vec![1.0, 0.0]]
        );
        assert_eq!(das_dennis(3, 1).len(), 3);
        assert_eq!(das_dennis(3, 12).len(), 91);
    }

    #[test]
    fn archive_keeps_only_nondominated() {
        let mut archive = ParetoArchive::new();
        assert!(archive.insert(vec![1.0, 1.0], "a"));
        assert!(!archive.insert(vec![0.5, 0.5], "dominated"));
        assert!(archive.insert(vec![3.0, 0.0], "b"));
        assert!(archive.insert(vec![2.0, 2.0], "c"));
        assert_eq!(archive.len(), 2); // (2,2) pruned (1,1); (3,0) survives
        assert!(!archive.insert(vec![2.0, 2.0], "duplicate"));
        for i in 0..archive.len() {
            for j in 0..archive.len() {
                if i != j {
                    assert!(!dominates(&archive.points()[i], &archive.points()[j]));
                }
            }
        }
    }

    #[test]
    fn estimate_true_front_examples() {
        let a = pareto_filter(&pts(&[&[1.0, 0.0]]));
        let b = pareto_filter(&pts(&[&[0.0, 1.0]]));
        assert_eq!(estimate_true_front(std::slice::from_ref(&a)), a);
        let merged = estimate_true_front(&[a.clone(), b]);
        assert_eq!(merged.len(), 2);
        let dominating = pareto_filter(&pts(&[&[2.0, 2.0]]));
        let merged = estimate_true_front(&[a, dominating.clone()]);
        assert_eq!(merged.points, dominating.points);
    }

    #[test]
    fn bounds_from_points_widen_the_envelope() {
        let bounds = NormalisationBounds::from_points(&pts(&[&[0.0, 10.0], &[2.0, 20.0]])).unwrap();
        assert!(bounds.lower[0] < 0.0 && bounds.upper[0] > 2.0);
        let mid = bounds.normalise(&[1.0, 15.0]);
        assert!(mid.iter().all(|&x| (0.0..=1.0).contains(&x)));
        // Degenerate ranges get padded rather than rejected.
        let degenerate = NormalisationBounds::from_points(&pts(&[&[1.0, 5.0], &[1.0, 6.0]])).unwrap();
        assert!(degenerate.lower[0] < degenerate.upper[0]);
    }

    proptest! {
        #[test]
        fn dominance_is_a_strict_partial_order(
            a in prop::collection::vec(0.0..1.0f64, 3),
            b in prop::collection::vec(0.0..1.0f64, 3),
            c in prop::collection::vec(0.0..1.0f64, 3),
        ) {
            // Irreflexive and antisymmetric.
            prop_assert!(!dominates(&a, &a));
            if dominates(&a, &b) {
                prop_assert!(!dominates(&b, &a));
            }
            // Transitive.
            if dominates(&a, &b) && dominates(&b, &c) {
                prop_assert!(dominates(&a, &c));
            }
        }

        #[test]
        fn filter_matches_brute_force(
            points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 1..40)
        ) {
            let fast = nondominated_indices(&points);
            let mut brute = Vec::new();
            'outer: for (i, p) in points.iter().enumerate() {
                for (j, q) in points.iter().enumerate() {
                    if dominates(q, p) || (j < i && q == p) {
                        continue 'outer;
                    }
                }
                brute.push(i);
            }
            prop_assert_eq!(fast, brute);
        }

        #[test]
        fn hypervolume_never_decreases_with_a_new_point(
            points in prop::collection::vec(prop::collection::vec(0.1..1.0f64, 3), 1..10),
            extra in prop::collection::vec(0.1..1.0f64, 3),
        ) {
            let reference = [0.0, 0.0, 0.0];
            let before = hypervolume(&points, &reference);
            let mut extended = points.clone();
            extended.push(extra);
            let after = hypervolume(&extended, &reference);
            prop_assert!(after >= before - 1e-12);
        }

        #[test]
        fn eum_and_ahd_ignore_point_order(
            points in prop::collection::vec(prop::collection::vec(0.0..1.0f64, 3), 2..8),
        ) {
            let bounds = NormalisationBounds::identity(3);
            let weights = das_dennis(3, 3);
            let mut reversed = points.clone();
            reversed.reverse();
            let truth = vec![vec![1.0, 1.0, 1.0]];
            let left = eum(&points, &weights, &bounds).unwrap();
            let right = eum(&reversed, &weights, &bounds).unwrap();
            prop_assert!((left - right).abs() < 1e-12);
            let left = ahd(&points, &truth, &bounds, 2.0).unwrap();
            let right = ahd(&reversed, &truth, &bounds, 2.0).unwrap();
            prop_assert!((left - right).abs() < 1e-12);
        }
    }
}

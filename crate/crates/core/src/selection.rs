//! Max-min fair selection of the carrier emitter, and of an emitter-reader
//! pair, over a rectangular uncertainty region.
//!
//! Emitter selection maximizes `m_t`, the worst case over the region of the
//! per-candidate objective `(1/d_t²)·Σ_{r≠t} 1/d_r²`. The inner minimization
//! is non-convex, so it runs projected gradient descent from multiple start
//! points (the centroids of a uniform partition of the region), with an
//! exhaustive grid search available as a brute-force oracle.
//!
//! Pair selection maximizes the worst case of `1/(d_t²·d_r²)`. For a pair,
//! moving an interior point perpendicular to the line through the two APs
//! increases both distances, so the minimum lies on the region boundary and
//! a boundary grid suffices. The search prunes candidates: anchor the AP
//! nearest the region centroid, score all partners on the boundary grid,
//! keep the top `κ`, and evaluate all pairs within that short list.

use rayon::prelude::*;

use crate::geometry::{
    boundary_points, distance, nearest_ap, partition_centroids, Deployment, Point, Rectangle,
};
use crate::metrics::pair_metric;
use crate::{Error, Result};

/// Projected-gradient-descent settings.
///
/// Defaults: learning rate 2000 with at most 100 iterations (the objective
/// scale is ~d⁻⁴ at tens-of-meters range, so 2000 yields meter-scale steps),
/// a 1e-6 m step-norm convergence threshold, and a 4×4 grid of start points.
#[derive(Debug, Clone, Copy)]
pub struct PgdSettings {
    pub learning_rate: f64,
    pub max_iterations: usize,
    /// Stop once the accepted step is shorter than this (meters).
    pub convergence_tol: f64,
    /// Start points: centroids of a `starts_x` by `starts_y` partition.
    pub starts_x: usize,
    pub starts_y: usize,
}

impl Default for PgdSettings {
    fn default() -> Self {
        Self {
            learning_rate: 2000.0,
            max_iterations: 100,
            convergence_tol: 1e-6,
            starts_x: 4,
            starts_y: 4,
        }
    }
}

impl PgdSettings {
    fn validate(&self) -> Result<()> {
        if self.learning_rate.is_nan() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidArgument("learning rate must be positive".into()));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidArgument("max_iterations must be at least 1".into()));
        }
        if self.starts_x == 0 || self.starts_y == 0 {
            return Err(Error::InvalidArgument("start counts must be at least 1".into()));
        }
        Ok(())
    }
}

/// A chosen emitter with the worst-case point and objective value over the
/// region.
#[derive(Debug, Clone, Copy)]
pub struct CeSelection {
    pub ce_index: usize,
    pub worst_point: Point,
    pub worst_value: f64,
}

/// A chosen emitter-reader pair with its worst-case point and value, the
/// pruned candidate set that was searched, and the `κ` used (`None` for the
/// unpruned benchmark).
#[derive(Debug, Clone)]
pub struct PairSelection {
    pub ce_index: usize,
    pub reader_index: usize,
    pub worst_point: Point,
    pub worst_value: f64,
    pub candidate_set: Vec<usize>,
    pub kappa: Option<usize>,
}

/// Per-candidate objective `(1/d_t²)·Σ_{r≠t} 1/d_r²` and its gradient.
///
/// With `ρ_k = (x_k−x)² + (y_k−y)²` the product rule gives
/// `∂f/∂x = 2(x_t−x)/ρ_t²·Σ_{r≠t} 1/ρ_r + (1/ρ_t)·Σ_{r≠t} 2(x_r−x)/ρ_r²`
/// and symmetrically in `y`.
pub fn opc1_objective(dep: &Deployment, t: usize, p: Point) -> Result<(f64, [f64; 2])> {
    let k = dep.num_aps();
    if t >= k {
        return Err(Error::InvalidArgument(format!(
            "emitter index {t} out of range for {k} APs"
        )));
    }
    let mut rho = Vec::with_capacity(k);
    for i in 0..k {
        let ap = dep.ap(i);
        let dx = ap.x - p.x;
        let dy = ap.y - p.y;
        let r2 = dx * dx + dy * dy;
        if r2 == 0.0 {
            return Err(Error::DegenerateGeometry(format!(
                "evaluation point coincides with AP {i}"
            )));
        }
        rho.push((r2, dx, dy));
    }
    let (rho_t, dx_t, dy_t) = rho[t];
    let g_t = 1.0 / rho_t;
    let mut sum = 0.0;
    let mut sum_dx = 0.0;
    let mut sum_dy = 0.0;
    for (i, &(r2, dx, dy)) in rho.iter().enumerate() {
        if i == t {
            continue;
        }
        let inv = 1.0 / r2;
        sum += inv;
        let inv2 = inv * inv;
        sum_dx += 2.0 * dx * inv2;
        sum_dy += 2.0 * dy * inv2;
    }
    let value = g_t * sum;
    let gt2 = g_t * g_t;
    let grad = [
        2.0 * dx_t * gt2 * sum + g_t * sum_dx,
        2.0 * dy_t * gt2 * sum + g_t * sum_dy,
    ];
    Ok((value, grad))
}

/// Minimize the per-candidate objective for emitter `t` over `region` with
/// multi-start projected gradient descent.
///
/// From each start the iteration is `p ← clamp(p − lr·∇f)`; a step that
/// would increase the objective is retried with a halved rate (up to 20
/// halvings), so accepted iterates are non-increasing. Each start stops at
/// `max_iterations` or when the accepted step norm drops below
/// `convergence_tol`; the best endpoint across starts wins.
pub fn pgd_minimize(
    dep: &Deployment,
    t: usize,
    region: &Rectangle,
    settings: &PgdSettings,
) -> Result<CeSelection> {
    settings.validate()?;
    let starts = partition_centroids(region, settings.starts_x, settings.starts_y);
    let mut best: Option<(Point, f64)> = None;
    for start in starts {
        let Ok((mut value, mut grad)) = opc1_objective(dep, t, start) else {
            // Start sits exactly on an AP; the minimum cannot be there.
            continue;
        };
        let mut p = start;
        for _ in 0..settings.max_iterations {
            let mut rate = settings.learning_rate;
            let mut accepted = None;
            for _ in 0..=20 {
                let candidate = region.clamp(Point::new(p.x - rate * grad[0], p.y - rate * grad[1]));
                if let Ok((cand_value, cand_grad)) = opc1_objective(dep, t, candidate) {
                    if cand_value <= value {
                        accepted = Some((candidate, cand_value, cand_grad));
                        break;
                    }
                }
                rate /= 2.0;
            }
            let Some((next, next_value, next_grad)) = accepted else {
                break; // no descent direction left at this scale
            };
            let step = distance(p, next);
            p = next;
            value = next_value;
            grad = next_grad;
            debug_assert!(region.contains(p, 1e-9));
            if step < settings.convergence_tol {
                break;
            }
        }
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((p, value));
        }
    }
    let (worst_point, worst_value) = best.ok_or_else(|| {
        Error::DegenerateGeometry("every start point coincides with an AP".into())
    })?;
    Ok(CeSelection {
        ce_index: t,
        worst_point,
        worst_value,
    })
}

/// What a grid search minimizes: the per-candidate emitter objective or a
/// single pair's round-trip gain.
#[derive(Debug, Clone, Copy)]
pub enum SelectionObjective {
    CarrierEmitter(usize),
    Pair(usize, usize),
}

impl SelectionObjective {
    fn evaluate(&self, dep: &Deployment, p: Point) -> Result<f64> {
        match *self {
            SelectionObjective::CarrierEmitter(t) => opc1_objective(dep, t, p).map(|(v, _)| v),
            SelectionObjective::Pair(t, r) => pair_metric(dep, t, r, p),
        }
    }

    /// APs whose ε-disk is excluded from grid evaluation: the objective
    /// diverges there, so those points can never be the minimum.
    fn singular_aps(&self, dep: &Deployment) -> Vec<Point> {
        match *self {
            SelectionObjective::CarrierEmitter(_) => dep.ap_positions().to_vec(),
            SelectionObjective::Pair(t, r) => vec![dep.ap(t), dep.ap(r)],
        }
    }
}

fn grid_min_over(
    dep: &Deployment,
    obj: SelectionObjective,
    points: &[Point],
    epsilon: f64,
) -> Result<(Point, f64)> {
    let singular = obj.singular_aps(dep);
    let mut best: Option<(Point, f64)> = None;
    for &p in points {
        if singular.iter().any(|ap| distance(*ap, p) < epsilon) {
            continue;
        }
        let value = match obj.evaluate(dep, p) {
            Ok(v) => v,
            // A grid point exactly on an AP: the objective diverges there,
            // so it cannot be the minimum.
            Err(Error::DegenerateGeometry(_)) => continue,
            Err(e) => return Err(e),
        };
        if best.is_none_or(|(_, b)| value < b) {
            best = Some((p, value));
        }
    }
    best.ok_or_else(|| {
        Error::DegenerateGeometry("all grid points fall within an AP exclusion disk".into())
    })
}

/// Axis sample positions: the single-cell case evaluates the axis center,
/// otherwise the `n+1` lattice nodes spanning the extent (edges included,
/// so boundary minima are sampled exactly; halving the resolution refines
/// the lattice to a superset).
fn axis_points(min: f64, extent: f64, resolution: f64) -> Vec<f64> {
    let n = (extent / resolution).ceil().max(1.0) as usize;
    if n == 1 {
        vec![min + extent / 2.0]
    } else {
        (0..=n).map(|i| min + extent * i as f64 / n as f64).collect()
    }
}

/// Exhaustive minimum of `obj` over a full-region lattice of spacing at most
/// `resolution`. Lattice points landing exactly on an AP are skipped.
pub fn grid_min_interior(
    dep: &Deployment,
    obj: SelectionObjective,
    region: &Rectangle,
    resolution: f64,
) -> Result<(Point, f64)> {
    if resolution.is_nan() || resolution <= 0.0 {
        return Err(Error::InvalidArgument("grid resolution must be positive".into()));
    }
    let xs = axis_points(region.xmin(), region.width, resolution);
    let ys = axis_points(region.ymin(), region.height, resolution);
    let mut points = Vec::with_capacity(xs.len() * ys.len());
    for &y in &ys {
        for &x in &xs {
            points.push(Point::new(x, y));
        }
    }
    grid_min_over(dep, obj, &points, 0.0)
}

/// Exhaustive minimum of `obj` over the region boundary sampled at `step`.
/// Points within `step` of a diverging AP are skipped.
pub fn grid_min_boundary(
    dep: &Deployment,
    obj: SelectionObjective,
    region: &Rectangle,
    step: f64,
) -> Result<(Point, f64)> {
    let points = boundary_points(region, step)?;
    grid_min_over(dep, obj, &points, step)
}

/// Brute-force oracle: full-region grid for the emitter objective (its
/// minimum may be interior), boundary-only grid for a pair (its minimum is
/// on the boundary).
pub fn grid_search_min(
    dep: &Deployment,
    obj: SelectionObjective,
    region: &Rectangle,
    resolution: f64,
) -> Result<(Point, f64)> {
    match obj {
        SelectionObjective::CarrierEmitter(_) => grid_min_interior(dep, obj, region, resolution),
        SelectionObjective::Pair(_, _) => grid_min_boundary(dep, obj, region, resolution),
    }
}

/// Worst-case value `m_t` for every candidate emitter, in index order.
pub fn ce_candidates(
    dep: &Deployment,
    region: &Rectangle,
    settings: &PgdSettings,
) -> Result<Vec<CeSelection>> {
    settings.validate()?;
    (0..dep.num_aps())
        .into_par_iter()
        .map(|t| pgd_minimize(dep, t, region, settings))
        .collect()
}

/// Choose the emitter whose worst case over the region is best:
/// `argmax_t m_t`, ties resolved to the lowest index.
pub fn select_ce(
    dep: &Deployment,
    region: &Rectangle,
    settings: &PgdSettings,
) -> Result<CeSelection> {
    let candidates = ce_candidates(dep, region, settings)?;
    let mut best = candidates[0];
    for c in &candidates[1..] {
        if c.worst_value > best.worst_value {
            best = *c;
        }
    }
    Ok(best)
}

/// Default boundary sampling step: 1/400 of the region perimeter.
pub fn default_boundary_step(region: &Rectangle) -> f64 {
    region.perimeter() / 400.0
}

fn normalize_roles(anchor: usize, a: usize, b: usize) -> (usize, usize) {
    // The anchor AP keeps the emitter role; the roles are SNR-symmetric, so
    // otherwise the lower index is reported as the emitter.
    if b == anchor {
        (b, a)
    } else if a == anchor || a < b {
        (a, b)
    } else {
        (b, a)
    }
}

/// Choose an emitter-reader pair by the pruned boundary search.
///
/// 1. Anchor the AP nearest the region centroid.
/// 2. Score every partner `r` by its boundary-grid worst case with the
///    anchor; keep the `κ` best.
/// 3. The candidate set is the anchor plus those `κ` partners.
/// 4. Evaluate the remaining pairs inside the candidate set.
/// 5. Return the pair with the best worst case (ties: lexicographic lowest).
pub fn select_pair(
    dep: &Deployment,
    region: &Rectangle,
    kappa: usize,
    boundary_step: f64,
) -> Result<PairSelection> {
    let k = dep.num_aps();
    if kappa < 1 || kappa > k - 1 {
        return Err(Error::InvalidArgument(format!(
            "kappa must be between 1 and K-1 = {} (got {kappa})",
            k - 1
        )));
    }
    let anchor = nearest_ap(dep, region.center);

    let scored: Vec<(usize, Point, f64)> = (0..k)
        .into_par_iter()
        .filter(|&r| r != anchor)
        .map(|r| {
            grid_min_boundary(dep, SelectionObjective::Pair(anchor, r), region, boundary_step)
                .map(|(p, v)| (r, p, v))
        })
        .collect::<Result<_>>()?;
    let mut ranked = scored.clone();
    ranked.sort_by(|a, b| b.2.partial_cmp(&a.2).unwrap().then(a.0.cmp(&b.0)));
    ranked.truncate(kappa);

    let mut candidate_set: Vec<usize> = ranked.iter().map(|(r, _, _)| *r).collect();
    candidate_set.push(anchor);
    candidate_set.sort_unstable();

    // All pairs within the candidate set; anchor pairs reuse step-2 scores.
    let mut evaluated: Vec<(usize, usize, Point, f64)> = ranked
        .iter()
        .map(|&(r, p, v)| {
            let (ce, reader) = normalize_roles(anchor, anchor, r);
            (ce, reader, p, v)
        })
        .collect();
    for (i, &a) in candidate_set.iter().enumerate() {
        for &b in &candidate_set[i + 1..] {
            if a == anchor || b == anchor {
                continue;
            }
            let (p, v) =
                grid_min_boundary(dep, SelectionObjective::Pair(a, b), region, boundary_step)?;
            evaluated.push((a, b, p, v));
        }
    }
    evaluated.sort_by_key(|x| (x.0, x.1));

    let mut best = evaluated[0];
    for e in &evaluated[1..] {
        if e.3 > best.3 {
            best = *e;
        }
    }
    Ok(PairSelection {
        ce_index: best.0,
        reader_index: best.1,
        worst_point: best.2,
        worst_value: best.3,
        candidate_set,
        kappa: Some(kappa),
    })
}

/// Benchmark pair: the two APs closest to the region centroid (roles are
/// SNR-symmetric; the closer AP is reported as the emitter).
pub fn benchmark_pair(dep: &Deployment, region: &Rectangle) -> Result<PairSelection> {
    let mut order: Vec<usize> = (0..dep.num_aps()).collect();
    order.sort_by(|&a, &b| {
        distance(dep.ap(a), region.center)
            .partial_cmp(&distance(dep.ap(b), region.center))
            .unwrap()
            .then(a.cmp(&b))
    });
    let (ce, reader) = (order[0], order[1]);
    let (worst_point, worst_value) = grid_min_boundary(
        dep,
        SelectionObjective::Pair(ce, reader),
        region,
        default_boundary_step(region),
    )?;
    Ok(PairSelection {
        ce_index: ce,
        reader_index: reader,
        worst_point,
        worst_value,
        candidate_set: vec![ce.min(reader), ce.max(reader)],
        kappa: None,
    })
}

/// Transmit-SNR gap `10·log10(a/b)` between two metric values.
///
/// At a fixed target error probability the required transmit SNR scales as
/// `1/metric`, so this is the horizontal distance between the two error
/// curves at any target.
pub fn snr_gap_db(metric_a: f64, metric_b: f64) -> Result<f64> {
    if metric_a.is_nan() || metric_a <= 0.0 || metric_b.is_nan() || metric_b <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "metrics must be positive (got {metric_a}, {metric_b})"
        )));
    }
    Ok(10.0 * (metric_a / metric_b).log10())
}

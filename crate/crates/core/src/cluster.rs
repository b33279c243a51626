//! Subtractive (mountain-method) clustering of candidate pixel coordinates.
//!
//! Every data point is treated as a potential cluster center whose potential
//! is the density of points around it:
//!
//! ```text
//! P_i = sum_j exp(-alpha * |p_i - p_j|^2),   alpha = 4 / radius_a^2
//! ```
//!
//! The point with the highest potential becomes a center, the potential field
//! is reduced around it (`beta = 4 / radius_b^2`), and the process repeats
//! until the best remaining potential falls below a fraction of the first
//! center's. Candidates in between the accept and reject ratios are kept only
//! if they are far enough from existing centers.

use rayon::prelude::*;
use serde::Serialize;

/// Pixel coordinate in source-image space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Point {
    pub x: u32,
    pub y: u32,
}

impl Point {
    pub fn new(x: u32, y: u32) -> Self {
        Self { x, y }
    }

    fn dist2(&self, other: &Point) -> f64 {
        let dx = self.x as f64 - other.x as f64;
        let dy = self.y as f64 - other.y as f64;
        dx * dx + dy * dy
    }
}

/// Tunables for subtractive clustering. The ratios are Chiu's canonical
/// choices; the radii are in pixels.
#[derive(Debug, Clone, Serialize)]
pub struct ClusterParams {
    /// Vicinity radius defining a center's neighborhood.
    pub radius_a: f64,
    /// Radius of the potential subtraction around accepted centers,
    /// conventionally 1.5 x `radius_a`.
    pub radius_b: f64,
    /// Candidates at or above this fraction of the first potential are
    /// accepted outright.
    pub accept_ratio: f64,
    /// Candidates below this fraction of the first potential end the search.
    pub reject_ratio: f64,
    /// Hard cap on the number of centers.
    pub max_centers: usize,
    /// Point budget; larger sets are strided down by [`subsample`].
    pub max_points: usize,
}

impl ClusterParams {
    /// Parameters for an explicit vicinity radius.
    pub fn with_radius(radius_a: f64) -> Self {
        assert!(radius_a > 0.0, "radius_a must be positive");
        Self {
            radius_a,
            radius_b: 1.5 * radius_a,
            accept_ratio: 0.5,
            reject_ratio: 0.15,
            max_centers: 64,
            max_points: 5000,
        }
    }

    /// Resolution-independent default: `radius_a` is a tenth of the image
    /// diagonal.
    pub fn for_diagonal(diagonal: f64) -> Self {
        Self::with_radius(0.1 * diagonal)
    }
}

/// Potential of every point: the Gaussian-weighted count of its neighbors
/// (including itself, so a lone point has potential 1).
pub fn potentials(pts: &[Point], radius_a: f64) -> Vec<f64> {
    assert!(radius_a > 0.0, "radius_a must be positive");
    let alpha = 4.0 / (radius_a * radius_a);
    pts.par_iter()
        .map(|p| pts.iter().map(|q| (-alpha * p.dist2(q)).exp()).sum())
        .collect()
}

fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best_idx = 0;
    let mut best = f64::NEG_INFINITY;
    for (i, &v) in values.iter().enumerate() {
        if v > best {
            best = v;
            best_idx = i;
        }
    }
    (best_idx, best)
}

/// Chiu's subtractive clustering. Returns centers in order of selection;
/// every center is one of the input points. Deterministic: argmax ties break
/// toward the lowest point index.
pub fn subtractive_cluster(pts: &[Point], params: &ClusterParams) -> Vec<Point> {
    if pts.is_empty() || params.max_centers == 0 {
        return Vec::new();
    }
    let beta = 4.0 / (params.radius_b * params.radius_b);
    let mut pot = potentials(pts, params.radius_a);

    let (first_idx, first_pot) = argmax(&pot);
    let mut centers = vec![pts[first_idx]];
    let mut current = (first_idx, first_pot);

    loop {
        // subtract the accepted center's influence from the field
        let (idx, value) = current;
        let center = pts[idx];
        for (p, q) in pot.iter_mut().zip(pts) {
            *p -= value * (-beta * center.dist2(q)).exp();
        }
        if centers.len() >= params.max_centers {
            break;
        }
        let next = loop {
            let (idx, value) = argmax(&pot);
            if value >= params.accept_ratio * first_pot {
                break Some((idx, value));
            }
            if value < params.reject_ratio * first_pot {
                break None;
            }
            // gray zone: keep only candidates far from existing centers
            let d_min = centers
                .iter()
                .map(|c| c.dist2(&pts[idx]).sqrt())
                .fold(f64::INFINITY, f64::min);
            if d_min / params.radius_a + value / first_pot >= 1.0 {
                break Some((idx, value));
            }
            pot[idx] = 0.0;
        };
        match next {
            Some((idx, value)) => {
                centers.push(pts[idx]);
                current = (idx, value);
            }
            None => break,
        }
    }
    centers
}

/// Deterministic stride subsampling: keeps every k-th point in the input
/// order, `k = ceil(len / max_points)`.
pub fn subsample(pts: &[Point], max_points: usize) -> Vec<Point> {
    assert!(max_points >= 1, "max_points must be at least 1");
    if pts.len() <= max_points {
        return pts.to_vec();
    }
    let stride = pts.len().div_ceil(max_points);
    pts.iter().step_by(stride).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn potential_of_single_point_is_one() {
        let p = potentials(&[Point::new(3, 4)], 10.0);
        assert_eq!(p, vec![1.0]);
    }

    #[test]
    fn coincident_points_have_potential_two() {
        let pts = [Point::new(5, 5), Point::new(5, 5)];
        let p = potentials(&pts, 7.0);
        assert_eq!(p, vec![2.0, 2.0]);
    }

    #[test]
    fn potential_at_half_radius() {
        // alpha * (radius_a/2)^2 = 1, so each point sees 1 + e^-1
        let pts = [Point::new(0, 0), Point::new(5, 0)];
        let p = potentials(&pts, 10.0);
        let expect = 1.0 + (-1.0f64).exp();
        for v in p {
            assert!((v - expect).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_and_single_point_sets() {
        let params = ClusterParams::with_radius(10.0);
        assert!(subtractive_cluster(&[], &params).is_empty());
        let only = Point::new(7, 9);
        assert_eq!(subtractive_cluster(&[only], &params), vec![only]);
    }

    /// Independent replay of the selection rules against a directly computed
    /// potential field.
    fn oracle_cluster(pts: &[Point], params: &ClusterParams) -> Vec<Point> {
        if pts.is_empty() {
            return Vec::new();
        }
        let alpha = 4.0 / (params.radius_a * params.radius_a);
        let beta = 4.0 / (params.radius_b * params.radius_b);
        let mut pot: Vec<f64> = pts
            .iter()
            .map(|p| pts.iter().map(|q| (-alpha * p.dist2(q)).exp()).sum())
            .collect();
        let mut centers: Vec<usize> = Vec::new();
        let mut p1 = f64::NAN;
        loop {
            let (mut idx, mut val) = argmax(&pot);
            if centers.is_empty() {
                p1 = val;
            } else {
                // apply accept / reject / distance rules
                let verdict = loop {
                    if val >= params.accept_ratio * p1 {
                        break true;
                    }
                    if val < params.reject_ratio * p1 {
                        break false;
                    }
                    let d_min = centers
                        .iter()
                        .map(|&c| pts[c].dist2(&pts[idx]).sqrt())
                        .fold(f64::INFINITY, f64::min);
                    if d_min / params.radius_a + val / p1 >= 1.0 {
                        break true;
                    }
                    pot[idx] = 0.0;
                    let next = argmax(&pot);
                    idx = next.0;
                    val = next.1;
                };
                if !verdict {
                    break;
                }
            }
            centers.push(idx);
            for (p, q) in pot.iter_mut().zip(pts) {
                *p -= val * (-beta * pts[idx].dist2(q)).exp();
            }
            if centers.len() >= params.max_centers {
                break;
            }
        }
        centers.into_iter().map(|i| pts[i]).collect()
    }

    fn two_blobs(rng: &mut StdRng, mean_a: (u32, u32), mean_b: (u32, u32), n: usize) -> Vec<Point> {
        let mut pts = Vec::new();
        for mean in [mean_a, mean_b] {
            for _ in 0..n {
                let dx: i32 = rng.random_range(-2..=2);
                let dy: i32 = rng.random_range(-2..=2);
                pts.push(Point::new(
                    (mean.0 as i32 + dx) as u32,
                    (mean.1 as i32 + dy) as u32,
                ));
            }
        }
        pts
    }

    #[test]
    fn two_blobs_give_two_centers_matching_oracle() {
        let mut rng = StdRng::seed_from_u64(11);
        let params = ClusterParams::with_radius(10.0);
        let pts = two_blobs(&mut rng, (20, 20), (80, 30), 50);
        let centers = subtractive_cluster(&pts, &params);
        assert_eq!(centers.len(), 2, "expected one center per blob");
        assert_eq!(centers, oracle_cluster(&pts, &params));

        // first center is the brute-force argmax of the potential field
        let pot = potentials(&pts, params.radius_a);
        let (best, _) = argmax(&pot);
        assert_eq!(centers[0], pts[best]);
    }

    #[test]
    fn centers_are_input_members_and_deterministic() {
        let mut rng = StdRng::seed_from_u64(5);
        let pts: Vec<Point> = (0..200)
            .map(|_| Point::new(rng.random_range(0..100), rng.random_range(0..100)))
            .collect();
        let params = ClusterParams::with_radius(12.0);
        let centers = subtractive_cluster(&pts, &params);
        assert!(!centers.is_empty());
        assert!(centers.len() <= params.max_centers);
        for c in &centers {
            assert!(pts.contains(c));
        }
        // pairwise separation enforced by the gray-zone rule
        for (i, a) in centers.iter().enumerate() {
            for b in &centers[i + 1..] {
                assert!(a.dist2(b).sqrt() >= params.radius_a / 2.0);
            }
        }
        assert_eq!(centers, subtractive_cluster(&pts, &params));
        assert_eq!(centers, oracle_cluster(&pts, &params));
    }

    #[test]
    fn max_centers_bounds_selection() {
        let pts: Vec<Point> = (0..20).map(|i| Point::new(i * 50, 0)).collect();
        let mut params = ClusterParams::with_radius(5.0);
        params.max_centers = 3;
        assert_eq!(subtractive_cluster(&pts, &params).len(), 3);
    }

    #[test]
    fn subsample_examples() {
        let pts: Vec<Point> = (0..10).map(|i| Point::new(i, 0)).collect();
        assert_eq!(subsample(&pts, 20), pts);

        let pts: Vec<Point> = (0..100).map(|i| Point::new(i, 0)).collect();
        let sub = subsample(&pts, 50);
        assert_eq!(sub.len(), 50);
        assert_eq!(sub[0], Point::new(0, 0));
        assert_eq!(sub[1], Point::new(2, 0));
        assert_eq!(sub[49], Point::new(98, 0));

        for n in [1usize, 7, 99, 100, 101, 1000] {
            let pts: Vec<Point> = (0..n as u32).map(|i| Point::new(i, 1)).collect();
            assert!(subsample(&pts, 50).len() <= 50, "n={n}");
        }
    }
}

use crate::types::Point;

/// Greedy maximal ε-packing: scans points in order and keeps each one at
/// distance ≥ ε from everything kept so far. Returns the kept indices.
pub fn packing_number_greedy<D>(points: &[Point], metric: D, eps: f64) -> (usize, Vec<usize>)
where
    D: Fn(&Point, &Point) -> f64,
{
    let mut kept: Vec<usize> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        if kept.iter().all(|&k| metric(p, &points[k]) >= eps) {
            kept.push(i);
        }
    }
    (kept.len(), kept)
}

/// [`packing_number_greedy`] under the Euclidean metric.
pub fn euclidean_packing(points: &[Point], eps: f64) -> (usize, Vec<usize>) {
    packing_number_greedy(points, Point::distance, eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Vec<Point> {
        [0.0, 0.5, 1.0].iter().map(|&x| Point::scalar(x)).collect()
    }

    #[test]
    fn examples() {
        assert_eq!(euclidean_packing(&grid(), 0.4).0, 3);
        assert_eq!(euclidean_packing(&grid(), 0.6), (2, vec![0, 2]));
        assert_eq!(euclidean_packing(&grid(), 5.0).0, 1);
    }

    #[test]
    fn greedy_packing_is_maximal() {
        let pts: Vec<Point> = (0..50)
            .map(|i| Point::scalar(((i * 37) % 50) as f64 / 49.0))
            .collect();
        let (_, kept) = euclidean_packing(&pts, 0.13);
        for p in &pts {
            assert!(kept.iter().any(|&k| p.distance(&pts[k]) < 0.13));
        }
    }
}

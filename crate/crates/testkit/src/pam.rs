//! Exhaustive k-medoid search.

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Probability-weighted assignment cost of a medoid set.
pub fn cost(points: &[Vec<f64>], probs: &[f64], medoids: &[usize]) -> f64 {
    points
        .iter()
        .zip(probs)
        .map(|(p, w)| {
            w * medoids
                .iter()
                .map(|&m| dist(p, &points[m]))
                .fold(f64::INFINITY, f64::min)
        })
        .sum()
}

/// Minimum cost over every `k`-subset, with the lexicographically first
/// optimal subset.
pub fn exhaustive(points: &[Vec<f64>], probs: &[f64], k: usize) -> (f64, Vec<usize>) {
    let n = points.len();
    let mut best = (f64::INFINITY, Vec::new());
    let mut combo: Vec<usize> = (0..k).collect();
    loop {
        let c = cost(points, probs, &combo);
        if c < best.0 - 1e-12 {
            best = (c, combo.clone());
        }
        // next combination
        let Some(i) = (0..k).rev().find(|&i| combo[i] < n - k + i) else {
            return best;
        };
        combo[i] += 1;
        for j in i + 1..k {
            combo[j] = combo[j - 1] + 1;
        }
    }
}

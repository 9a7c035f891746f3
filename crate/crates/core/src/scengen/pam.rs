use super::{ScenarioError, ScenarioSet};

pub const MAX_SWAP_ITERATIONS: usize = 100;

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Probability-weighted k-medoids (BUILD then steepest SWAP). Returns the
/// sorted medoid indices and, per point, the index into that list it is
/// assigned to.
fn pam(points: &[&[f64]], weights: &[f64], k: usize) -> (Vec<usize>, Vec<usize>) {
    let n = points.len();
    let d: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| distance(points[i], points[j])).collect())
        .collect();
    let cost_of = |med: &[usize]| -> f64 {
        (0..n)
            .map(|i| weights[i] * med.iter().map(|&m| d[i][m]).fold(f64::INFINITY, f64::min))
            .sum()
    };

    let first = (0..n)
        .min_by(|&a, &b| cost_of(&[a]).total_cmp(&cost_of(&[b])))
        .expect("n >= 1");
    let mut medoids = vec![first];
    let mut nearest: Vec<f64> = (0..n).map(|i| d[i][first]).collect();
    for _ in 1..k {
        let mut best = (f64::NEG_INFINITY, usize::MAX);
        for j in (0..n).filter(|j| !medoids.contains(j)) {
            let gain: f64 = (0..n)
                .map(|i| weights[i] * (nearest[i] - d[i][j]).max(0.0))
                .sum();
            if gain > best.0 {
                best = (gain, j);
            }
        }
        medoids.push(best.1);
        for i in 0..n {
            nearest[i] = nearest[i].min(d[i][best.1]);
        }
    }

    let mut cost = cost_of(&medoids);
    for _ in 0..MAX_SWAP_ITERATIONS {
        let mut best: Option<(f64, usize, usize)> = None;
        for slot in 0..k {
            for h in (0..n).filter(|h| !medoids.contains(h)) {
                let mut trial = medoids.clone();
                trial[slot] = h;
                let c = cost_of(&trial);
                if best.is_none_or(|(bc, _, _)| c < bc) {
                    best = Some((c, slot, h));
                }
            }
        }
        match best {
            Some((c, slot, h)) if c < cost - 1e-12 * cost.abs().max(1.0) => {
                medoids[slot] = h;
                cost = c;
            }
            _ => break,
        }
    }

    medoids.sort_unstable();
    // a medoid keeps itself even when a duplicate medoid ties with it
    let assign = (0..n)
        .map(|i| {
            medoids.iter().position(|&m| m == i).unwrap_or_else(|| {
                (0..k)
                    .min_by(|&a, &b| d[i][medoids[a]].total_cmp(&d[i][medoids[b]]))
                    .expect("k >= 1")
            })
        })
        .collect();
    (medoids, assign)
}

fn aggregate(weights: &[f64], assign: &[usize], k: usize) -> Vec<f64> {
    let mut probs = vec![0.0; k];
    for (w, &a) in weights.iter().zip(assign) {
        probs[a] += w;
    }
    probs
}

/// Keeps `k` medoid trajectories; each carries the probability of the
/// scenarios assigned to it.
pub fn reduce_scenarios_pam(set: &ScenarioSet, k: usize) -> Result<ScenarioSet, ScenarioError> {
    set.validate()?;
    if k == 0 || k > set.len() {
        return Err(ScenarioError::TooManyMedoids { k, n: set.len() });
    }
    let points: Vec<&[f64]> = set.trajectories.iter().map(Vec::as_slice).collect();
    let (medoids, assign) = pam(&points, &set.probabilities, k);
    Ok(ScenarioSet {
        label: set.label,
        trajectories: medoids.iter().map(|&m| set.trajectories[m].clone()).collect(),
        probabilities: aggregate(&set.probabilities, &assign, k),
    })
}

/// Reduces several sets that share one scenario index (and probabilities)
/// together, using distances over their concatenated trajectories.
pub fn reduce_jointly(sets: &[ScenarioSet], k: usize) -> Result<Vec<ScenarioSet>, ScenarioError> {
    let Some(first) = sets.first() else {
        return Ok(Vec::new());
    };
    for s in sets {
        s.validate()?;
        if s.len() != first.len() || s.probabilities != first.probabilities {
            return Err(ScenarioError::ResMismatch(format!(
                "{} does not share the scenario index of {}",
                s.label, first.label
            )));
        }
    }
    if k == 0 || k > first.len() {
        return Err(ScenarioError::TooManyMedoids { k, n: first.len() });
    }
    let stacked: Vec<Vec<f64>> = (0..first.len())
        .map(|w| sets.iter().flat_map(|s| s.trajectories[w].iter().cloned()).collect())
        .collect();
    let points: Vec<&[f64]> = stacked.iter().map(Vec::as_slice).collect();
    let (medoids, assign) = pam(&points, &first.probabilities, k);
    let probs = aggregate(&first.probabilities, &assign, k);
    Ok(sets
        .iter()
        .map(|s| ScenarioSet {
            label: s.label,
            trajectories: medoids.iter().map(|&m| s.trajectories[m].clone()).collect(),
            probabilities: probs.clone(),
        })
        .collect())
}

//! Step-by-step replay of the regulation-event sampler over a recorded
//! stream of uniforms.

/// Replays one deviation row. Returns the row and the number of uniforms
/// consumed.
pub fn trace(
    u: &[f64],
    gap_mean: f64,
    dur_mean: f64,
    level: &dyn Fn(f64) -> f64,
    eps_sigma: f64,
    horizon: usize,
) -> (Vec<f64>, usize) {
    let mut out = vec![0.0; horizon];
    let mut k = 0;
    let mut next = || {
        let v = u[k];
        k += 1;
        v
    };
    let last = horizon as i64;
    let mut t: i64 = 1;
    while t <= last {
        let gap = -gap_mean * next().ln();
        let dur = -dur_mean * next().ln();
        let start = ((t as f64 + gap).round() as i64).min(last);
        let end = ((t as f64 + gap + dur).round() as i64).min(last);
        for hour in start + 1..=end {
            let r = (-2.0 * next().ln()).sqrt();
            let z = r * (std::f64::consts::TAU * next()).cos();
            out[(hour - 1) as usize] = level(dur) + eps_sigma * z;
        }
        t = end + 1;
    }
    (out, k)
}

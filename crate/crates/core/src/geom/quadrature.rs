use std::f64::consts::PI;

/// Gauss–Legendre nodes and weights on `[a, b]`, nodes ascending.
pub fn gauss_legendre(count: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    assert!(count > 0, "need at least one node");
    let mut nodes = vec![0.0; count];
    let mut weights = vec![0.0; count];
    let half = (b - a) / 2.0;
    let mid = (a + b) / 2.0;
    let m = count.div_ceil(2);
    for i in 0..m {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (PI * (i as f64 + 0.75) / (count as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(count, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(count, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = mid - half * x;
        nodes[count - 1 - i] = mid + half * x;
        weights[i] = half * w;
        weights[count - 1 - i] = half * w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

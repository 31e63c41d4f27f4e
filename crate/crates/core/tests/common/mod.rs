//! Brute-force oracles shared by the integration tests.
#![allow(dead_code)]

/// Equal-frequency labels from order statistics, counted by hand.
pub fn oracle_labels(x: &[f64], bins: usize) -> Vec<usize> {
    let mut sorted = x.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = x.len();
    let edges: Vec<f64> = (1..bins).map(|j| sorted[j * n / bins]).collect();
    x.iter()
        .map(|&v| {
            let mut label = 0;
            for &e in &edges {
                if v >= e {
                    label += 1;
                }
            }
            label
        })
        .collect()
}

/// Σ p(a,b) log2(p(a,b) / (p(a) p(b))) over the lagged pairs.
pub fn oracle_ami(x: &[f64], tau: usize, bins: usize) -> f64 {
    let labels = oracle_labels(x, bins);
    let m = x.len() - tau;
    let mut joint = vec![vec![0.0; bins]; bins];
    let mut pa = vec![0.0; bins];
    let mut pb = vec![0.0; bins];
    for t in 0..m {
        joint[labels[t]][labels[t + tau]] += 1.0 / m as f64;
        pa[labels[t]] += 1.0 / m as f64;
        pb[labels[t + tau]] += 1.0 / m as f64;
    }
    let mut mi = 0.0;
    for a in 0..bins {
        for b in 0..bins {
            if joint[a][b] > 0.0 {
                mi += joint[a][b] * (joint[a][b] / (pa[a] * pb[b])).log2();
            }
        }
    }
    mi
}

pub fn oracle_first_minimum(curve: &[f64]) -> usize {
    for i in 1..curve.len() - 1 {
        if curve[i] < curve[i - 1] && curve[i] < curve[i + 1] {
            return i + 1;
        }
    }
    panic!("no local minimum");
}

/// Mean neighbor ratio E(d) by exhaustive search, floored max norm.
pub fn oracle_cao_e(x: &[f64], tau: usize, d: usize) -> f64 {
    let lo = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = x.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let floor = 1e-12 * (hi - lo);
    let dist = |a: usize, b: usize, dim: usize| {
        let mut m: f64 = 0.0;
        for j in 0..dim {
            m = m.max((x[a + j * tau] - x[b + j * tau]).abs());
        }
        m.max(floor)
    };
    let count = x.len() - d * tau;
    let mut total = 0.0;
    for i in 0..count {
        let mut best = (0, f64::INFINITY);
        for j in 0..count {
            if j != i && dist(i, j, d) < best.1 {
                best = (j, dist(i, j, d));
            }
        }
        total += dist(i, best.0, d + 1) / best.1;
    }
    total / count as f64
}

/// `d_c + 1` from exhaustive `E(1..=d_max+1)` values.
pub fn oracle_dimension(e: &[f64], tol: f64) -> Option<usize> {
    let ratios: Vec<f64> = e.windows(2).map(|w| w[1] / w[0]).collect();
    let mut dc = None;
    for d in (1..=ratios.len()).rev() {
        if (ratios[d - 1] - 1.0).abs() <= tol {
            dc = Some(d);
        } else {
            break;
        }
    }
    dc.map(|d| d + 1)
}

/// MAE, RMSE, MAPE (percent) and R² by explicit loops.
pub fn naive_metrics(y: &[f64], p: &[f64]) -> [f64; 4] {
    let n = y.len() as f64;
    let mut abs = 0.0;
    let mut sq = 0.0;
    let mut pct = 0.0;
    let mut mean = 0.0;
    for i in 0..y.len() {
        abs += (y[i] - p[i]).abs();
        sq += (y[i] - p[i]) * (y[i] - p[i]);
        pct += ((y[i] - p[i]) / y[i]).abs();
        mean += y[i];
    }
    mean /= n;
    let mut tot = 0.0;
    for v in y {
        tot += (v - mean) * (v - mean);
    }
    [abs / n, (sq / n).sqrt(), 100.0 * pct / n, 1.0 - sq / tot]
}

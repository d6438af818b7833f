use std::f64::consts::PI;

/// A one-dimensional quadrature rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Gauss–Legendre rule with `n` points on `[-1, 1]`.
    pub fn gauss_legendre(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Gauss–Legendre on each panel `[edges[i], edges[i+1]]`.
    pub fn composite(edges: &[f64], points_per_panel: usize) -> Self {
        let base = Self::gauss_legendre(points_per_panel);
        let mut nodes = Vec::with_capacity(edges.len() * points_per_panel);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in edges.windows(2) {
            let half = 0.5 * (w[1] - w[0]);
            let mid = 0.5 * (w[1] + w[0]);
            for (x, wt) in base.nodes.iter().zip(&base.weights) {
                nodes.push(mid + half * x);
                weights.push(half * wt);
            }
        }
        Self { nodes, weights }
    }

    /// Panels `[0, s], [s, 2s], [2s, 4s], ...` up to `end`.
    pub fn geometric(first: f64, end: f64, points_per_panel: usize) -> Self {
        let mut edges = vec![0.0];
        let mut right = first.min(end);
        loop {
            edges.push(right);
            if right >= end {
                break;
            }
            right = (2.0 * right).min(end);
        }
        Self::composite(&edges, points_per_panel)
    }

    /// Uniform panels of width `panel` covering `[0, end]`.
    pub fn uniform_panels(end: f64, panels: usize, points_per_panel: usize) -> Self {
        let edges: Vec<f64> = (0..=panels)
            .map(|i| end * i as f64 / panels as f64)
            .collect();
        Self::composite(&edges, points_per_panel)
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

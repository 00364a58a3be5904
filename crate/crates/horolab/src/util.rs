//! Shared numerical helpers: compensated summation, Gauss-Legendre nodes,
//! log-log least squares.

/// Neumaier compensated accumulator. Order-stable to well below 1e-12.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accum {
    sum: f64,
    comp: f64,
}

impl Accum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Compensated sum of a slice in index order.
pub fn compensated_sum(xs: &[f64]) -> f64 {
    let mut acc = Accum::new();
    for &x in xs {
        acc.add(x);
    }
    acc.value()
}

/// Sample mean and standard error (compensated, two-pass).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    assert!(n >= 2);
    let mean = compensated_sum(xs) / n as f64;
    let mut acc = Accum::new();
    for &x in xs {
        let d = x - mean;
        acc.add(d * d);
    }
    let var = acc.value() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

/// Gauss-Legendre nodes/weights on [-1, 1], computed by Newton iteration on
/// the Legendre recurrence (machine precision, no tabulated constants).
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; n];
    let mut ws = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        xs[i] = -x;
        xs[n - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        ws[i] = w;
        ws[n - 1 - i] = w;
    }
    (xs, ws)
}

/// Integrate f over [a, b] with an n-point Gauss-Legendre rule.
pub fn gl_integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, xs: &[f64], ws: &[f64]) -> f64 {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut acc = Accum::new();
    for (x, w) in xs.iter().zip(ws) {
        acc.add(w * f(c + h * x));
    }
    acc.value() * h
}

/// Result of an ordinary least-squares fit of y against x.
#[derive(Clone, Debug)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// stderr of the slope propagated from per-point sigmas (when given)
    pub slope_stderr: f64,
    /// stderr of the slope from residual scatter
    pub slope_stderr_resid: f64,
    pub residuals: Vec<f64>,
}

/// Unweighted OLS line fit; `sigmas` (same length, optional) propagate
/// per-point uncertainties into the slope error.
pub fn ols_line(xs: &[f64], ys: &[f64], sigmas: Option<&[f64]>) -> LineFit {
    let n = xs.len();
    assert!(n >= 2 && ys.len() == n);
    let xbar = compensated_sum(xs) / n as f64;
    let ybar = compensated_sum(ys) / n as f64;
    let mut sxx = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = xs[i] - xbar;
        sxx += dx * dx;
        sxy += dx * (ys[i] - ybar);
    }
    let slope = sxy / sxx;
    let intercept = ybar - slope * xbar;
    let residuals: Vec<f64> = (0..n).map(|i| ys[i] - slope * xs[i] - intercept).collect();
    let ss_res: f64 = residuals.iter().map(|r| r * r).sum();
    let slope_stderr_resid = if n > 2 {
        (ss_res / (n as f64 - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    let slope_stderr = match sigmas {
        Some(sg) => {
            let mut v = 0.0;
            for i in 0..n {
                let w = (xs[i] - xbar) / sxx;
                v += w * w * sg[i] * sg[i];
            }
            v.sqrt()
        }
        None => slope_stderr_resid,
    };
    LineFit { slope, intercept, slope_stderr, slope_stderr_resid, residuals }
}

//! The averaging operators: sparse discrete averages along polynomial or
//! prime times, continuous averages, the discrepancy between them, lacunary
//! bootstrap indices, difference counts, empirical correlations, and decay
//! fits of L2 norms.
//!
//! Index convention: averages run over n = 0 .. N-1 throughout.

use crate::error::{Error, Result};
use crate::expsum::IntPolynomial;
use crate::funcspace::{MeanEstimate, TestFunction};
use crate::rng::{stream_id, substream};
use crate::sl2::{
    distance, flow_point, flow_point_by_integer, haar_sample, orbit_speed_bound, PointX,
    Y_CAP_DEFAULT,
};
use crate::util::{mean_stderr, ols_line, Accum, LineFit};
use rayon::prelude::*;

/// Reversibility drift allowed before an orbit is declared unusable, at
/// small flow times.
pub const ORBIT_DRIFT_TOL: f64 = 1e-6;

/// Drift certificate for an orbit reaching flow time t_max. The unipotent
/// shear amplifies per-step rounding superquadratically in the flow time,
/// so the attainable round-trip precision degrades with t_max; the envelope
/// below sits ~30x above the measured worst case, which still catches
/// bookkeeping errors (those drift at O(1) for any t). Past the envelope the
/// orbit is a shadowing pseudo-orbit: fine for measure statistics, not for
/// pointwise claims.
pub fn orbit_drift_tolerance(t_max: f64) -> f64 {
    (ORBIT_DRIFT_TOL * (t_max / 6e3).powf(2.5).max(1.0)).min(0.1)
}

/// The time sequence of a sparse average.
#[derive(Clone, Debug)]
pub enum SamplingScheme {
    Polynomial(IntPolynomial),
    Primes,
    Explicit { times: Vec<i64>, rate: u32, growth_constant: f64 },
}

impl SamplingScheme {
    pub fn polynomial(p: IntPolynomial) -> Self {
        SamplingScheme::Polynomial(p)
    }

    pub fn explicit(times: Vec<i64>, rate: u32, growth_constant: f64) -> Result<Self> {
        if times.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Parameter("explicit sequence must be strictly increasing".into()));
        }
        Ok(SamplingScheme::Explicit { times, rate, growth_constant })
    }

    /// Polynomial growth rate d.
    pub fn rate(&self) -> u32 {
        match self {
            SamplingScheme::Polynomial(p) => p.degree(),
            SamplingScheme::Primes => 1,
            SamplingScheme::Explicit { rate, .. } => *rate,
        }
    }

    /// The first n sampling times.
    pub fn times(&self, n: u32) -> Result<Vec<i128>> {
        match self {
            SamplingScheme::Polynomial(p) => (0..n).map(|i| p.eval_i128(i as i64)).collect(),
            SamplingScheme::Primes => Ok(first_primes(n as usize)?
                .into_iter()
                .map(|p| p as i128)
                .collect()),
            SamplingScheme::Explicit { times, .. } => {
                if (n as usize) > times.len() {
                    return Err(Error::Parameter(format!(
                        "explicit sequence has {} terms, {n} requested",
                        times.len()
                    )));
                }
                Ok(times[..n as usize].iter().map(|&t| t as i128).collect())
            }
        }
    }
}

/// First n primes by a sieve sized from the prime-counting bound.
pub fn first_primes(n: usize) -> Result<Vec<u64>> {
    if n == 0 {
        return Ok(Vec::new());
    }
    let nf = n as f64;
    let bound = if n < 6 {
        16.0
    } else {
        nf * (nf.ln() + nf.ln().ln())
    } as usize
        + 16;
    if bound > 1 << 31 {
        return Err(Error::Resource(format!("sieve bound {bound} exceeds capacity")));
    }
    let mut composite = vec![false; bound + 1];
    let mut primes = Vec::with_capacity(n);
    for p in 2..=bound {
        if !composite[p] {
            primes.push(p as u64);
            if primes.len() == n {
                break;
            }
            let mut q = p * p;
            while q <= bound {
                composite[q] = true;
                q += p;
            }
        }
    }
    if primes.len() < n {
        return Err(Error::Resource("sieve bound too small".into()));
    }
    Ok(primes)
}

/// Walk the orbit at the given integer times, feeding each visited point to
/// `visit`; verifies reversibility at the end.
fn orbit_walk<F: FnMut(u32, &PointX)>(
    x: &PointX,
    times: &[i128],
    mut visit: F,
) -> Result<()> {
    let mut point = *x;
    let mut cur: i128 = 0;
    let mut t_max: i128 = 0;
    for (i, &t) in times.iter().enumerate() {
        point = flow_point_by_integer(&point, t - cur)?;
        cur = t;
        t_max = t_max.max(t.abs());
        visit(i as u32, &point);
    }
    let back = flow_point_by_integer(&point, -cur)?;
    let drift = distance(x, &back);
    let tol = orbit_drift_tolerance(t_max as f64);
    if drift > tol {
        return Err(Error::OrbitPrecision { drift, tol });
    }
    Ok(())
}

/// A_N f(x) = (1/N) sum_{n=0}^{N-1} f(u_{a_n} . x), incremental flow.
pub fn sparse_average(
    f: &TestFunction,
    x: &PointX,
    n: u32,
    scheme: &SamplingScheme,
) -> Result<f64> {
    if n == 0 {
        return Err(Error::Parameter("sparse_average needs N >= 1".into()));
    }
    let times = scheme.times(n)?;
    let mut acc = Accum::new();
    orbit_walk(x, &times, |_, p| acc.add(f.evaluate(p)))?;
    Ok(acc.value() / n as f64)
}

/// A_N f(x) for every N in `ns` along a single orbit pass.
#[derive(Clone, Debug)]
pub struct AverageSeries {
    pub ns: Vec<u32>,
    pub values: Vec<f64>,
}

pub fn average_series(
    f: &TestFunction,
    x: &PointX,
    ns: &[u32],
    scheme: &SamplingScheme,
) -> Result<AverageSeries> {
    let n_max = *ns.iter().max().ok_or_else(|| Error::Parameter("empty N list".into()))?;
    if ns.contains(&0) {
        return Err(Error::Parameter("N values must be >= 1".into()));
    }
    let times = scheme.times(n_max)?;
    let mut acc = Accum::new();
    let mut partial = vec![0.0f64; n_max as usize + 1];
    orbit_walk(x, &times, |i, p| {
        acc.add(f.evaluate(p));
        partial[i as usize + 1] = acc.value();
    })?;
    let values = ns.iter().map(|&n| partial[n as usize] / n as f64).collect();
    Ok(AverageSeries { ns: ns.to_vec(), values })
}

/// Certified quadrature of the continuous average (1/N) int_0^N f(u_{p(t)} x) dt.
#[derive(Clone, Copy, Debug)]
pub struct ContinuousAverage {
    pub value: f64,
    pub err_bound: f64,
    pub evals: usize,
}

/// Composite midpoint with step size certified by the Lipschitz bound of
/// t -> f(u_{p(t)} x): per-panel variation at most ~4 tol, so the average's
/// total error stays below ~tol. Stretches where the orbit provably stays
/// outside the observable's support band are skipped analytically (along
/// the flow, Im z decays at worst like e^{-|s|}).
pub fn continuous_average(
    f: &TestFunction,
    x: &PointX,
    n: f64,
    poly: &IntPolynomial,
    tol: f64,
) -> Result<ContinuousAverage> {
    if !(n >= 1.0) {
        return Err(Error::Parameter("continuous_average needs N >= 1".into()));
    }
    if !(tol > 0.0) {
        return Err(Error::Parameter("tolerance must be positive".into()));
    }
    const BUDGET: usize = 60_000_000;
    let global_deriv = poly.deriv_bound(n + 1.0);
    let mut t = 0.0f64;
    let mut point = flow_point(x, poly.eval_f64(0.0))?;
    let mut s_cur = poly.eval_f64(0.0);
    let mut acc = Accum::new();
    let mut err = 0.0;
    let mut evals = 0usize;
    while t < n {
        let fval = f.evaluate(&point);
        let y = point.z_im();
        // certified-zero skip: f vanishes above the support band and the
        // flow cannot pull Im z below y e^{-|ds|}
        if fval == 0.0 {
            if let Some((_, hi)) = f.support_y {
                if y > hi * 1.0001 && global_deriv > 0.0 {
                    let ds_max = (y / (hi * 1.0001)).ln();
                    let h_skip = ds_max / global_deriv;
                    if h_skip > 1e-9 {
                        let h = h_skip.min(n - t);
                        t += h;
                        let s_next = poly.eval_f64(t);
                        point = flow_point(&point, s_next - s_cur)?;
                        s_cur = s_next;
                        continue;
                    }
                }
            }
        }
        let speed = orbit_speed_bound(&point) * 1.3;
        let dp = poly.derivative_f64(t).abs().max(poly.derivative_f64(t + 0.25).abs()) + 1e-12;
        let lipg = f.lip * speed * dp;
        let h = (4.0 * tol / lipg).clamp(1e-9, 0.5).min(n - t);
        // midpoint evaluation
        let s_mid = poly.eval_f64(t + 0.5 * h);
        let mid = flow_point(&point, s_mid - s_cur)?;
        acc.add(f.evaluate(&mid) * h);
        err += lipg * h * h / 4.0;
        let s_next = poly.eval_f64(t + h);
        point = flow_point(&mid, s_next - s_mid)?;
        s_cur = s_next;
        t += h;
        evals += 1;
        if evals > BUDGET {
            return Err(Error::QuadratureBudget(format!(
                "continuous_average exceeded {BUDGET} panels"
            )));
        }
    }
    Ok(ContinuousAverage { value: acc.value() / n, err_bound: err / n, evals })
}

/// B_N f(x): sparse average minus continuous average from the same base point.
#[derive(Clone, Copy, Debug)]
pub struct Discrepancy {
    pub value: f64,
    pub sparse: f64,
    pub continuous: f64,
    pub quad_err: f64,
}

pub fn discrepancy(
    f: &TestFunction,
    x: &PointX,
    n: u32,
    poly: &IntPolynomial,
    tol: f64,
) -> Result<Discrepancy> {
    let scheme = SamplingScheme::Polynomial(poly.clone());
    let sparse = sparse_average(f, x, n, &scheme)?;
    let cont = continuous_average(f, x, n as f64, poly, tol)?;
    Ok(Discrepancy {
        value: sparse - cont.value,
        sparse,
        continuous: cont.value,
        quad_err: cont.err_bound,
    })
}

/// P_N f(x) over the first N primes as flow times.
pub fn prime_average(f: &TestFunction, x: &PointX, n: u32) -> Result<f64> {
    sparse_average(f, x, n, &SamplingScheme::Primes)
}

/// d_N(k) = #{(i, j) : a_i - a_j = k, 0 <= i, j < N}, exact.
pub fn difference_count(scheme: &SamplingScheme, n: u32, k: i128) -> Result<u64> {
    let mut vals = scheme.times(n)?;
    vals.sort_unstable();
    // run-length encode, then two-pointer over v and v + k
    let mut runs: Vec<(i128, u64)> = Vec::new();
    for v in vals {
        match runs.last_mut() {
            Some((u, c)) if *u == v => *c += 1,
            _ => runs.push((v, 1)),
        }
    }
    let mut count = 0u64;
    for &(v, c) in &runs {
        if let Ok(idx) = runs.binary_search_by_key(&(v + k), |&(u, _)| u) {
            count += c * runs[idx].1;
        }
    }
    Ok(count)
}

/// Deduplicated increasing list of [(1+eps)^m] up to n_max.
pub fn lacunary_indices(eps: f64, n_max: u64) -> Result<Vec<u64>> {
    if !(eps > 0.0) {
        return Err(Error::Parameter("lacunary_indices needs eps > 0".into()));
    }
    let mut out: Vec<u64> = Vec::new();
    let base = 1.0 + eps;
    for m in 0.. {
        let v = base.powi(m);
        if v > n_max as f64 + 0.5 {
            break;
        }
        let idx = v.floor() as u64;
        if idx >= 1 && out.last() != Some(&idx) {
            out.push(idx);
        }
    }
    Ok(out)
}

/// Monte-Carlo estimate of the correlation <u_k f, f> = int f(u_k x) f(x) dmu.
pub fn empirical_correlation(
    f: &TestFunction,
    k: f64,
    n_samples: usize,
    seed: u64,
    y_cap: f64,
) -> Result<MeanEstimate> {
    if n_samples < 100 {
        return Err(Error::Parameter("empirical_correlation needs >= 100 samples".into()));
    }
    let vals: Result<Vec<f64>> = (0..n_samples)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            let x = haar_sample(&mut rng, y_cap)?;
            Ok(f.evaluate(&flow_point(&x, k)?) * f.evaluate(&x))
        })
        .collect();
    let vals = vals?;
    let (mean, stderr) = mean_stderr(&vals);
    Ok(MeanEstimate { value: mean, stderr, n: n_samples, seed })
}

/// Per-size L2 norm estimates and the fitted decay exponent.
#[derive(Clone, Debug)]
pub struct DecayFit {
    pub alpha_hat: f64,
    pub alpha_stderr: f64,
    pub ns: Vec<u32>,
    pub norms: Vec<f64>,
    pub norm_stderrs: Vec<f64>,
    pub fit: LineFit,
}

/// ||A_N f||_{L^2} by Monte Carlo over base points for each N, then an OLS
/// log-log fit; alpha_hat = -slope, stderr propagated from the per-point
/// Monte-Carlo errors.
pub fn l2_decay_fit(
    f: &TestFunction,
    scheme: &SamplingScheme,
    ns: &[u32],
    n_samples: usize,
    seed: u64,
) -> Result<DecayFit> {
    if ns.len() < 2 {
        return Err(Error::DegenerateFit(format!("need >= 2 sizes, got {}", ns.len())));
    }
    if n_samples < 100 {
        return Err(Error::Parameter("l2_decay_fit needs >= 100 samples".into()));
    }
    let mut norms = Vec::with_capacity(ns.len());
    let mut stderrs = Vec::with_capacity(ns.len());
    for (ni, &n) in ns.iter().enumerate() {
        let sq: Result<Vec<f64>> = (0..n_samples)
            .into_par_iter()
            .map(|i| {
                let mut rng = substream(seed, stream_id(ni as u32, i as u32));
                let x = haar_sample(&mut rng, Y_CAP_DEFAULT)?;
                let a = sparse_average(f, &x, n, scheme)?;
                Ok(a * a)
            })
            .collect();
        let sq = sq?;
        let (msq, msq_se) = mean_stderr(&sq);
        if !(msq > 0.0) {
            return Err(Error::DegenerateFit(format!("nonpositive norm estimate at N = {n}")));
        }
        norms.push(msq.sqrt());
        stderrs.push(msq_se / (2.0 * msq.sqrt()));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = norms.iter().map(|v| v.ln()).collect();
    let sig: Vec<f64> = norms.iter().zip(&stderrs).map(|(n, s)| s / n).collect();
    let fit = ols_line(&xs, &ys, Some(&sig));
    Ok(DecayFit {
        alpha_hat: -fit.slope,
        alpha_stderr: fit.slope_stderr,
        ns: ns.to_vec(),
        norms,
        norm_stderrs: stderrs,
        fit,
    })
}

/// (N, gamma)-good classification: |A_N f(x)| <= N^{-gamma} (inclusive).
pub fn classify_good(
    f: &TestFunction,
    x: &PointX,
    n: u32,
    gamma: f64,
    scheme: &SamplingScheme,
) -> Result<bool> {
    if !(gamma > 0.0) {
        return Err(Error::Parameter("classify_good needs gamma > 0".into()));
    }
    let a = sparse_average(f, x, n, scheme)?;
    Ok(a.abs() <= (n as f64).powf(-gamma))
}

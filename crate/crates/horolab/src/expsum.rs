//! Weyl exponential sums, their continuous counterparts, discrete-vs-
//! continuous gap bounds, and q-th moment integrals with cancellation-level
//! fitting.
//!
//! Phases p(n) t are reduced mod 1 with p(n) held as an exact wide integer
//! and the product taken in double-double, so no precision is lost at large
//! polynomial values. Moment integrals over [0,1] use the fact that
//! |S_N(t)|^q is a trigonometric polynomial: a uniform grid finer than its
//! degree integrates it exactly, and the whole grid comes out of one FFT of
//! the value-count histogram.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::util::{gauss_legendre, ols_line, Accum, LineFit};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Hard cap on FFT grid sizes (2^25 complex values ~ 0.5 GiB).
pub const GRID_CAP: usize = 1 << 25;

/// Integer polynomial, constant coefficient first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntPolynomial {
    coeffs: Vec<i64>,
}

impl IntPolynomial {
    pub fn new(coeffs: Vec<i64>) -> Result<Self> {
        let mut c = coeffs;
        while c.len() > 1 && *c.last().unwrap() == 0 {
            c.pop();
        }
        if c.len() < 2 {
            return Err(Error::Parameter(
                "polynomial must be non-constant with integer coefficients".into(),
            ));
        }
        Ok(IntPolynomial { coeffs: c })
    }

    /// x^d + lower terms absent: the monomial n^d.
    pub fn monomial(d: u32) -> Self {
        let mut c = vec![0i64; d as usize + 1];
        c[d as usize] = 1;
        IntPolynomial { coeffs: c }
    }

    pub fn coeffs(&self) -> &[i64] {
        &self.coeffs
    }

    pub fn degree(&self) -> u32 {
        (self.coeffs.len() - 1) as u32
    }

    /// Exact evaluation; errors on i128 overflow.
    pub fn eval_i128(&self, n: i64) -> Result<i128> {
        let x = n as i128;
        let mut acc: i128 = 0;
        for &c in self.coeffs.iter().rev() {
            acc = acc
                .checked_mul(x)
                .and_then(|v| v.checked_add(c as i128))
                .ok_or_else(|| Error::Resource(format!("polynomial overflow at n = {n}")))?;
        }
        Ok(acc)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for &c in self.coeffs.iter().rev() {
            acc = acc * x + c as f64;
        }
        acc
    }

    /// p(u) t reduced mod 1 into [-1/2, 1/2), in double-double, so phases
    /// stay accurate at large |p(u) t|.
    pub fn phase_frac_at(&self, u: f64, t: f64) -> f64 {
        let x = Dd::from_f64(u);
        let mut acc = Dd::ZERO;
        for &c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add_f64(c as f64);
        }
        acc.mul_f64(t).frac_centered().to_f64()
    }

    pub fn derivative_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().rev().take_while(|(k, _)| *k >= 1) {
            acc = acc * x + (k as f64) * c as f64;
        }
        acc
    }

    /// Upper bound for max |p'| on [0, hi] (coefficient bound, monotone-safe).
    pub fn deriv_bound(&self, hi: f64) -> f64 {
        let m = hi.abs().max(1.0);
        let mut acc = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate().skip(1) {
            acc += (k as f64 * c.abs() as f64) * m.powi(k as i32 - 1);
        }
        acc
    }
}

/// Fractional part of p * t in [-1/2, 1/2), computed in double-double.
fn phase_frac(p: i128, t: f64) -> f64 {
    Dd::from_i128(p).mul_f64(t).frac_centered().to_f64()
}

/// S_N(t) = sum_{n=0}^{N-1} e^{2 pi i p(n) t}. Unnormalized: |S| <= N.
pub fn weyl_sum(p: &IntPolynomial, n: u32, t: f64) -> Result<Complex64> {
    if n == 0 {
        return Err(Error::Parameter("weyl_sum needs N >= 1".into()));
    }
    let mut re = Accum::new();
    let mut im = Accum::new();
    for k in 0..n {
        let v = p.eval_i128(k as i64)?;
        let (s, c) = (2.0 * PI * phase_frac(v, t)).sin_cos();
        re.add(c);
        im.add(s);
    }
    Ok(Complex64::new(re.value(), im.value()))
}

/// Quadrature result with a certified error estimate.
#[derive(Clone, Copy, Debug)]
pub struct OscIntegral {
    pub value: Complex64,
    pub err: f64,
    pub evals: usize,
}

fn gl_nodes() -> &'static ((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>)) {
    static N: OnceLock<((Vec<f64>, Vec<f64>), (Vec<f64>, Vec<f64>))> = OnceLock::new();
    N.get_or_init(|| (gauss_legendre(8), gauss_legendre(16)))
}

/// int_0^N e^{2 pi i p(u) t} du by adaptive panels tied to the local phase
/// derivative, with an embedded GL8/GL16 error estimate per panel.
pub fn continuous_weyl(p: &IntPolynomial, n: f64, t: f64, tol: f64) -> Result<OscIntegral> {
    if !(n >= 1.0) {
        return Err(Error::Parameter("continuous_weyl needs N >= 1".into()));
    }
    if t == 0.0 {
        return Ok(OscIntegral { value: Complex64::new(n, 0.0), err: 0.0, evals: 0 });
    }
    const BUDGET: usize = 20_000_000;
    // GL16 integrates e^{i phi x} with |phi| <= 6 on [-1,1] to ~4e-12, so a
    // panel may span ~12 radians before subdivision is forced
    const PHASE_PER_PANEL: f64 = 12.0;
    let ((x8, w8), (x16, w16)) = gl_nodes();
    let f = |u: f64| Complex64::from_polar(1.0, 2.0 * PI * p.phase_frac_at(u, t));
    let quad = |a: f64, b: f64, xs: &[f64], ws: &[f64]| -> Complex64 {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in xs.iter().zip(ws) {
            acc += f(c + h * x) * *w;
        }
        acc * h
    };
    let mut stack = vec![(0.0f64, n)];
    // pre-split so each initial panel spans bounded phase
    let mut value = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let mut evals = 0usize;
    while let Some((a, b)) = stack.pop() {
        let phase_span = 2.0 * PI * t.abs() * p.deriv_bound(b) * (b - a);
        if phase_span > PHASE_PER_PANEL && b - a > 1e-12 * n {
            let mid = 0.5 * (a + b);
            stack.push((a, mid));
            stack.push((mid, b));
            continue;
        }
        let coarse = quad(a, b, x8, w8);
        let fine = quad(a, b, x16, w16);
        evals += 24;
        if evals > BUDGET {
            return Err(Error::QuadratureBudget(format!(
                "continuous_weyl exceeded {BUDGET} evaluations"
            )));
        }
        let e = (fine - coarse).norm();
        if e > tol * (b - a) / n && b - a > 1e-12 * n {
            let mid = 0.5 * (a + b);
            stack.push((a, mid));
            stack.push((mid, b));
        } else {
            value += fine;
            err += e;
        }
    }
    Ok(OscIntegral { value, err, evals })
}

/// Gap between the normalized discrete sum and continuous integral, plus the
/// mean-value bound (4 pi |t| / N) sum_n max_{[n,n+1]} |p'|.
#[derive(Clone, Copy, Debug)]
pub struct GapReport {
    pub gap: f64,
    pub bound: f64,
}

pub fn discrete_continuous_gap(p: &IntPolynomial, n: u32, t: f64) -> Result<GapReport> {
    let s = weyl_sum(p, n, t)? / n as f64;
    let i = continuous_weyl(p, n as f64, t, 1e-10)?.value / n as f64;
    let gap = (s - i).norm();
    let mut bound_acc = 0.0;
    for k in 0..n {
        let lo = p.derivative_f64(k as f64).abs();
        let hi = p.derivative_f64((k + 1) as f64).abs();
        // |p'| on [k, k+1] is bounded by endpoint max for the moderate
        // degrees used here unless p' has an interior extremum; pad by the
        // coefficient bound when the endpoints disagree in sign
        let m = if p.derivative_f64(k as f64).signum() != p.derivative_f64((k + 1) as f64).signum()
        {
            p.deriv_bound((k + 1) as f64)
        } else {
            lo.max(hi)
        };
        bound_acc += m;
    }
    Ok(GapReport { gap, bound: 4.0 * PI * t.abs() * bound_acc / n as f64 })
}

/// The Weyl sum evaluated on the full uniform grid t = j/M, j = 0..M-1,
/// via one FFT of the value-count histogram. Values are the reduced sum
/// S~(j/M) = sum_n e^{2 pi i (p(n) - p_min) j / M}; the true sum is
/// e^{2 pi i p_min t} S~(t).
pub struct WeylGrid {
    pub values: Vec<Complex64>,
    pub m: usize,
    pub p_min: i128,
    pub n: u32,
    /// max p(n) - p_min: the trig-polynomial bandwidth of S~
    pub freq_range: usize,
}

pub fn weyl_grid(p: &IntPolynomial, n: u32, min_size: usize) -> Result<WeylGrid> {
    if n == 0 {
        return Err(Error::Parameter("weyl_grid needs N >= 1".into()));
    }
    let vals: Result<Vec<i128>> = (0..n).map(|k| p.eval_i128(k as i64)).collect();
    let vals = vals?;
    let p_min = *vals.iter().min().unwrap();
    let p_max = *vals.iter().max().unwrap();
    let range = (p_max - p_min) as u128;
    if range >= GRID_CAP as u128 {
        return Err(Error::Resolution(format!(
            "frequency range {range} exceeds the {GRID_CAP} grid cap"
        )));
    }
    let mut m = 1usize;
    while m < min_size.max(range as usize + 1) {
        m <<= 1;
    }
    if m > GRID_CAP {
        return Err(Error::Resolution(format!("requested grid {m} exceeds cap {GRID_CAP}")));
    }
    let mut buf = vec![Complex64::new(0.0, 0.0); m];
    for v in &vals {
        buf[(v - p_min) as usize].re += 1.0;
    }
    FftPlanner::new().plan_fft_forward(m).process(&mut buf);
    // forward FFT gives sum c_r e^{-2 pi i j r / M}; we want the + sign
    for v in buf.iter_mut() {
        *v = v.conj();
    }
    Ok(WeylGrid { values: buf, m, p_min, n, freq_range: range as usize })
}

/// int_0^1 |S_N(t)/N|^q dt, exact for even q when the grid resolves the
/// trig-polynomial degree (q/2) * freq_range.
pub fn moment_integral(p: &IntPolynomial, n: u32, q: u32, grid: usize) -> Result<f64> {
    if q == 0 || q % 2 != 0 {
        return Err(Error::Parameter(format!("moment order q must be even positive, got {q}")));
    }
    let probe = weyl_grid(p, n, 2)?; // cheap: learn freq_range first
    let needed = probe
        .freq_range
        .checked_mul(q as usize / 2)
        .and_then(|v| v.checked_add(2))
        .ok_or_else(|| Error::Resolution("moment grid overflow".into()))?;
    let g = if probe.m >= needed.max(grid) {
        probe
    } else {
        weyl_grid(p, n, needed.max(grid))?
    };
    Ok(moment_from_grid(&g, q))
}

pub fn moment_from_grid(g: &WeylGrid, q: u32) -> f64 {
    let n2 = (g.n as f64) * (g.n as f64);
    let mut acc = Accum::new();
    for v in &g.values {
        acc.add((v.norm_sqr() / n2).powi(q as i32 / 2));
    }
    acc.value() / g.m as f64
}

/// Moment integral over [t_lo, t_hi] via the period-1 structure of integer
/// polynomials: whole periods reuse the [0,1] value, partial ends are
/// integrated by Simpson on the FFT grid.
pub fn restricted_moment(
    p: &IntPolynomial,
    n: u32,
    q: u32,
    t_lo: f64,
    t_hi: f64,
) -> Result<f64> {
    if !(0.0 <= t_lo && t_lo <= t_hi) {
        return Err(Error::Parameter(format!("bad moment range [{t_lo}, {t_hi})")));
    }
    if t_lo == t_hi {
        return Ok(0.0);
    }
    if q == 0 || q % 2 != 0 {
        return Err(Error::Parameter(format!("moment order q must be even positive, got {q}")));
    }
    let needed = {
        let probe_range = {
            // freq range without building the grid twice
            let vals: Result<Vec<i128>> = (0..n).map(|k| p.eval_i128(k as i64)).collect();
            let vals = vals?;
            (*vals.iter().max().unwrap() - *vals.iter().min().unwrap()) as usize
        };
        (probe_range * q as usize / 2 + 2).max(1 << 16)
    };
    let g = weyl_grid(p, n, needed)?;
    let full = moment_from_grid(&g, q);
    let n2 = (g.n as f64) * (g.n as f64);
    let density = |j: usize| (g.values[j % g.m].norm_sqr() / n2).powi(q as i32 / 2);

    // piecewise: [t_lo, ceil] + whole periods + [floor, t_hi]
    let lo_ceil = t_lo.ceil();
    let hi_floor = t_hi.floor();
    let mut total = 0.0;
    if lo_ceil <= hi_floor {
        total += (hi_floor - lo_ceil) * full;
        total += partial_simpson(&g, &density, t_lo - t_lo.floor(), 1.0)
            * if t_lo < lo_ceil { 1.0 } else { 0.0 };
        total += partial_simpson(&g, &density, 0.0, t_hi - hi_floor);
    } else {
        // same unit interval
        total += partial_simpson(&g, &density, t_lo - t_lo.floor(), t_hi - t_lo.floor());
    }
    Ok(total)
}

/// Simpson over [a, b] within one period using the uniform grid, with
/// trapezoid end-cells for the fractional parts.
fn partial_simpson(g: &WeylGrid, density: &dyn Fn(usize) -> f64, a: f64, b: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let m = g.m as f64;
    let h = 1.0 / m;
    let ja = (a * m).ceil() as usize;
    let jb = (b * m).floor() as usize;
    if jb <= ja + 2 {
        // tiny interval: single trapezoid on the ends
        return 0.5 * (density(ja.min(g.m - 1)) + density(jb.min(g.m - 1))) * (b - a);
    }
    let mut acc = Accum::new();
    // composite trapezoid over the aligned part (the grid is far finer than
    // the integrand's oscillation for the sizes this is used at)
    acc.add(0.5 * density(ja));
    for j in ja + 1..jb {
        acc.add(density(j));
    }
    acc.add(0.5 * density(jb));
    let mut total = acc.value() * h;
    // fractional end cells
    total += 0.5 * (density(ja) + density(ja)) * (ja as f64 * h - a);
    total += 0.5 * (density(jb) + density(jb)) * (b - jb as f64 * h);
    total
}

/// Fitted moment-cancellation level.
#[derive(Clone, Debug)]
pub struct MomentRecord {
    pub q: u32,
    pub level_hat: f64,
    pub level_stderr: f64,
    pub ns: Vec<u32>,
    pub integrals: Vec<f64>,
    pub fit: LineFit,
}

/// Log-log slope fit of the moment integral against N; level = -slope.
pub fn hua_level_fit(p: &IntPolynomial, q: u32, ns: &[u32]) -> Result<MomentRecord> {
    if ns.len() < 2 {
        return Err(Error::DegenerateFit(format!("need >= 2 sizes, got {}", ns.len())));
    }
    let mut integrals = Vec::with_capacity(ns.len());
    for &n in ns {
        let v = moment_integral(p, n, q, 0)?;
        if !(v > 0.0) {
            return Err(Error::DegenerateFit(format!("nonpositive moment at N = {n}")));
        }
        integrals.push(v);
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln()).collect();
    let ys: Vec<f64> = integrals.iter().map(|v| v.ln()).collect();
    let fit = ols_line(&xs, &ys, None);
    Ok(MomentRecord {
        q,
        level_hat: -fit.slope,
        level_stderr: fit.slope_stderr_resid,
        ns: ns.to_vec(),
        integrals,
        fit,
    })
}

// ---- exact counting oracles ----

/// #{(a, b) in [0,N)^2 : p(a) = p(b)}; equals N for injective p.
pub fn collision_count(p: &IntPolynomial, n: u32) -> Result<u64> {
    let mut vals: Vec<i128> = (0..n).map(|k| p.eval_i128(k as i64)).collect::<Result<_>>()?;
    vals.sort_unstable();
    Ok(run_squares(&vals))
}

/// #{(n1, n2, m1, m2) in [0,N)^4 : p(n1)+p(n2) = p(m1)+p(m2)}.
pub fn quadruple_count(p: &IntPolynomial, n: u32) -> Result<u64> {
    let vals: Vec<i128> = (0..n).map(|k| p.eval_i128(k as i64)).collect::<Result<_>>()?;
    let mut sums = Vec::with_capacity((n as usize) * (n as usize));
    for a in &vals {
        for b in &vals {
            sums.push(a + b);
        }
    }
    sums.sort_unstable();
    Ok(run_squares(&sums))
}

fn run_squares(sorted: &[i128]) -> u64 {
    let mut total = 0u64;
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let run = (j - i) as u64;
        total += run * run;
        i = j;
    }
    total
}

/// Brute-force moment by direct solution counting: int |S/N|^q = count/N^q.
pub fn moment_by_counting(p: &IntPolynomial, n: u32, q: u32) -> Result<f64> {
    let count = match q {
        2 => collision_count(p, n)?,
        4 => quadruple_count(p, n)?,
        _ => return Err(Error::Unsupported(format!("counting oracle handles q in {{2,4}}, got {q}"))),
    };
    Ok(count as f64 / (n as f64).powi(q as i32))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(c: &[i64]) -> IntPolynomial {
        IntPolynomial::new(c.to_vec()).unwrap()
    }

    #[test]
    fn polynomial_validation() {
        assert!(IntPolynomial::new(vec![3]).is_err());
        assert!(IntPolynomial::new(vec![3, 0, 0]).is_err()); // trims to constant
        let p = poly(&[1, 0, 2]);
        assert_eq!(p.degree(), 2);
        assert_eq!(p.eval_i128(5).unwrap(), 51);
    }

    #[test]
    fn weyl_sum_basics() {
        let p = IntPolynomial::monomial(2);
        let s = weyl_sum(&p, 17, 0.0).unwrap();
        assert!((s.re - 17.0).abs() < 1e-12 && s.im.abs() < 1e-12);
        // conjugate symmetry
        let a = weyl_sum(&p, 40, 0.37).unwrap();
        let b = weyl_sum(&p, 40, -0.37).unwrap();
        assert!((a - b.conj()).norm() < 1e-11);
    }

    #[test]
    fn weyl_sum_matches_geometric_closed_form() {
        // p(n) = n: S_N(t) = (e^{2 pi i N t} - 1)/(e^{2 pi i t} - 1)
        let p = IntPolynomial::monomial(1);
        let (n, t) = (1000u32, 0.37);
        let s = weyl_sum(&p, n, t).unwrap();
        let num = Complex64::from_polar(1.0, 2.0 * PI * n as f64 * t) - 1.0;
        let den = Complex64::from_polar(1.0, 2.0 * PI * t) - 1.0;
        assert!((s - num / den).norm() < 1e-10);
    }

    #[test]
    fn continuous_weyl_linear_closed_form() {
        let p = IntPolynomial::monomial(1);
        let (n, t) = (50.0, 0.73);
        let got = continuous_weyl(&p, n, t, 1e-10).unwrap();
        let w = 2.0 * PI * t;
        let exact = (Complex64::from_polar(1.0, w * n) - 1.0) / Complex64::new(0.0, w);
        assert!((got.value - exact).norm() < 1e-9);
        assert!((got.value - exact).norm() <= got.err + 1e-12);
    }

    #[test]
    fn continuous_weyl_t_zero() {
        let p = IntPolynomial::monomial(3);
        let got = continuous_weyl(&p, 12.0, 0.0, 1e-10).unwrap();
        assert_eq!(got.value, Complex64::new(12.0, 0.0));
    }

    #[test]
    fn continuous_weyl_matches_fresnel_route() {
        use crate::specfun::fresnel::quadratic_phase_integral;
        let p = IntPolynomial::monomial(2);
        for &(n, t) in &[(50.0, 1.0), (20.0, 0.31), (35.0, -0.8)] {
            let adaptive = continuous_weyl(&p, n, t, 1e-11).unwrap().value;
            let closed = quadratic_phase_integral(t, 0.0, n);
            assert!(
                (adaptive - closed).norm() < 1e-8,
                "N={n} t={t}: {adaptive} vs {closed}"
            );
        }
    }

    #[test]
    fn van_der_corput_scaling() {
        // sup_t |int_0^N e^{2 pi i u^2 t} du| |t|^{1/2} bounded by 2,
        // uniformly in N; the largest size goes through the closed Fresnel
        // form, which the adaptive route is checked against at N <= 200
        use crate::specfun::fresnel::quadratic_phase_integral;
        let p = IntPolynomial::monomial(2);
        for k in 0..16 {
            let t = 0.5 + 1.5 * k as f64 / 15.0;
            for &n in &[10.0, 50.0, 200.0] {
                let v = continuous_weyl(&p, n, t, 1e-8).unwrap().value.norm();
                assert!(v * t.sqrt() <= 2.0, "N={n} t={t}: {v}");
            }
            let v = quadratic_phase_integral(t, 0.0, 1000.0).norm();
            assert!(v * t.sqrt() <= 2.0, "N=1000 t={t}: {v}");
        }
    }

    #[test]
    fn gap_examples() {
        let p = IntPolynomial::monomial(2);
        let r = discrete_continuous_gap(&p, 77, 0.0).unwrap();
        assert!(r.gap < 1e-12);
        // alpha = 0.5 scaling example
        let n = 100u32;
        let t = (n as f64).powf(-1.5);
        let r = discrete_continuous_gap(&p, n, t).unwrap();
        assert!(r.gap <= r.bound * (1.0 + 1e-9), "gap {} bound {}", r.gap, r.bound);
        assert!(r.bound <= 4.0 * PI * (n as f64).powf(-0.5) * 1.03);
        // trivial bound
        assert!(r.gap <= 2.0);
    }

    #[test]
    fn moment_q2_injective_is_one_over_n() {
        let n = 32u32;
        for p in [IntPolynomial::monomial(2), poly(&[3, 2]), poly(&[0, 1, 1])] {
            let m = moment_integral(&p, n, 2, 0).unwrap();
            assert!((m - 1.0 / n as f64).abs() < 1e-12, "{m}");
        }
    }

    #[test]
    fn moment_matches_counting_small() {
        for n in [4u32, 9, 16] {
            for q in [2u32, 4] {
                for p in [IntPolynomial::monomial(2), IntPolynomial::monomial(1), poly(&[1, -3, 0, 1])] {
                    let quad = moment_integral(&p, n, q, 0).unwrap();
                    let count = moment_by_counting(&p, n, q).unwrap();
                    assert!(
                        (quad - count).abs() < 1e-8,
                        "N={n} q={q} p={:?}: {quad} vs {count}",
                        p.coeffs()
                    );
                }
            }
        }
    }

    #[test]
    fn moment_richardson_stability() {
        // doubling the grid beyond the exactness threshold must not move the
        // value
        let p = IntPolynomial::monomial(2);
        let a = moment_integral(&p, 64, 4, 0).unwrap();
        let b = moment_integral(&p, 64, 4, 1 << 21).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn moment_q4_monotone_sanity() {
        let p = IntPolynomial::monomial(2);
        let m2 = moment_integral(&p, 16, 2, 0).unwrap();
        let m4 = moment_integral(&p, 16, 4, 0).unwrap();
        assert!(m4 <= m2);
    }

    #[test]
    fn periodicity_of_modulus() {
        let p = poly(&[2, 5, 3]);
        for k in 0..10 {
            let t = 0.05 + k as f64 * 0.09;
            let a = weyl_sum(&p, 33, t).unwrap().norm();
            let b = weyl_sum(&p, 33, t + 1.0).unwrap().norm();
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn restricted_moment_identities() {
        let p = IntPolynomial::monomial(2);
        let n = 64u32;
        let full = moment_integral(&p, n, 4, 0).unwrap();
        let r1 = restricted_moment(&p, n, 4, 0.0, 1.0).unwrap();
        assert!((r1 - full).abs() < 1e-9 * full.max(1e-12));
        let r2 = restricted_moment(&p, n, 4, 0.0, 2.0).unwrap();
        assert!((r2 - 2.0 * full).abs() < 1e-9 * full);
        // [0, sqrt(N)] = floor(sqrt N) periods + remainder, against direct
        // Simpson from the same machinery
        let beta = (n as f64).sqrt();
        let r3 = restricted_moment(&p, n, 4, 0.0, beta).unwrap();
        let whole = beta.floor() * full;
        let rem = restricted_moment(&p, n, 4, 0.0, beta - beta.floor()).unwrap();
        assert!((r3 - (whole + rem)).abs() < 1e-9);
    }

    #[test]
    fn hua_fit_exact_parseval() {
        let p = poly(&[1, 2]); // injective linear
        let ns: Vec<u32> = vec![8, 16, 32, 64, 128];
        let rec = hua_level_fit(&p, 2, &ns).unwrap();
        assert!((rec.level_hat - 1.0).abs() < 0.01, "{}", rec.level_hat);
    }

    #[test]
    fn linear_p_quadruple_oracle_n64() {
        // additive quadruples for p(n) = n on [0, 64):
        // sum of c(s)^2 = 174784 by direct evaluation
        let p = IntPolynomial::monomial(1);
        assert_eq!(quadruple_count(&p, 64).unwrap(), 174_784);
        let m = moment_integral(&p, 64, 4, 0).unwrap();
        assert!((m - 174_784.0 / 64f64.powi(4)).abs() < 1e-10);
    }
}

//! Observables on the quotient: Lipschitz test functions with tracked
//! constants and estimated means, Fejer-kernel K-finite smoothing, and
//! deterministic parallel Monte-Carlo functionals.

use crate::error::{Error, Result};
use crate::rng::substream;
use crate::sl2::{haar_sample, rotate_point, PointX, Y_CAP_DEFAULT};
use crate::util::{compensated_sum, mean_stderr};
use rayon::prelude::*;
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type Evaluator = Arc<dyn Fn(&PointX) -> f64 + Send + Sync>;

/// Monte-Carlo mean with its provenance.
#[derive(Clone, Copy, Debug, Default)]
pub struct MeanEstimate {
    pub value: f64,
    pub stderr: f64,
    pub n: usize,
    pub seed: u64,
}

/// A bounded Lipschitz observable with tracked constants.
#[derive(Clone)]
pub struct TestFunction {
    eval: Evaluator,
    pub lip: f64,
    pub sup: f64,
    pub mean_estimate: MeanEstimate,
    pub name: String,
    /// Im-z support band (lo, hi) when known; lets orbit integrators skip
    /// certified-zero stretches.
    pub support_y: Option<(f64, f64)>,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TestFunction")
            .field("name", &self.name)
            .field("lip", &self.lip)
            .field("sup", &self.sup)
            .field("mean", &self.mean_estimate.value)
            .finish()
    }
}

impl TestFunction {
    #[inline]
    pub fn evaluate(&self, x: &PointX) -> f64 {
        (self.eval)(x)
    }

    pub fn zero() -> Self {
        TestFunction {
            eval: Arc::new(|_| 0.0),
            lip: 0.0,
            sup: 0.0,
            mean_estimate: MeanEstimate::default(),
            name: "zero".into(),
            support_y: Some((0.0, 0.0)),
        }
    }

    pub fn constant(c: f64) -> Self {
        TestFunction {
            eval: Arc::new(move |_| c),
            lip: 0.0,
            sup: c.abs(),
            mean_estimate: MeanEstimate { value: c, stderr: 0.0, n: 0, seed: 0 },
            name: format!("const({c})"),
            support_y: None,
        }
    }

    pub fn from_parts(
        name: impl Into<String>,
        eval: Evaluator,
        lip: f64,
        sup: f64,
    ) -> Self {
        TestFunction {
            eval,
            lip,
            sup,
            mean_estimate: MeanEstimate::default(),
            name: name.into(),
            support_y: None,
        }
    }
}

/// Fejer kernel F_L(k) = sum_{|j| <= L} (1 - |j|/L) e^{2 pi i j k}.
pub fn fejer_kernel(l: u32, k: f64) -> f64 {
    assert!(l >= 1, "fejer_kernel needs L >= 1");
    let lf = l as f64;
    let mut acc = 1.0;
    for j in 1..l {
        acc += 2.0 * (1.0 - j as f64 / lf) * (2.0 * PI * j as f64 * k).cos();
    }
    acc
}

/// K-finite smoothing of a test function.
#[derive(Clone, Debug)]
pub struct KFiniteApprox {
    pub l: u32,
    /// measured K-weight magnitudes of the smoothed function, j in [-L, L]
    pub coefficients: Vec<(i32, f64)>,
    pub approx: TestFunction,
    /// the uniform error bound ||f||_Lip log(L)/L
    pub reported_error: f64,
}

/// g(x) = int_K f(k.x) F_L(k) dk by the periodic rectangle rule, exact on
/// trigonometric polynomials of degree < quad_points.
pub fn k_smooth(f: &TestFunction, l: u32, quad_points: usize) -> Result<KFiniteApprox> {
    if l < 1 {
        return Err(Error::Parameter("k_smooth needs L >= 1".into()));
    }
    let needed = 4 * l as usize + 2;
    if quad_points < needed {
        return Err(Error::Aliasing { needed, got: quad_points });
    }
    let m = quad_points;
    let mut weights: Vec<f64> = (0..m).map(|i| fejer_kernel(l, i as f64 / m as f64)).collect();
    let total = compensated_sum(&weights);
    for w in weights.iter_mut() {
        *w /= total; // unit mass exactly
    }
    let base = f.clone();
    let w = weights.clone();
    let eval: Evaluator = Arc::new(move |x: &PointX| {
        let mut acc = 0.0;
        for (i, wi) in w.iter().enumerate() {
            acc += wi * base.evaluate(&rotate_point(x, i as f64 / m as f64));
        }
        acc
    });
    let approx = TestFunction {
        eval,
        lip: f.lip, // rotation is a frame isometry, smoothing contracts
        sup: f.sup,
        mean_estimate: f.mean_estimate,
        name: format!("fejer[{l}]({})", f.name),
        support_y: f.support_y,
    };

    // measured K-weight magnitudes over a fixed probe set
    let probes: Vec<PointX> = (0..32u64)
        .map(|i| {
            let mut rng = substream(0xF0_0D, i);
            haar_sample(&mut rng, 10.0).unwrap()
        })
        .collect();
    let mut coefficients = Vec::with_capacity(2 * l as usize + 1);
    for j in -(l as i32)..=(l as i32) {
        let damp = 1.0 - j.unsigned_abs() as f64 / l as f64;
        let mut acc = 0.0;
        for x in &probes {
            let (mut re, mut im) = (0.0, 0.0);
            for i in 0..m {
                let k = i as f64 / m as f64;
                let v = f.evaluate(&rotate_point(x, k));
                let ang = -2.0 * PI * j as f64 * k;
                re += v * ang.cos();
                im += v * ang.sin();
            }
            re /= m as f64;
            im /= m as f64;
            acc += (re * re + im * im) * damp * damp;
        }
        coefficients.push((j, (acc / probes.len() as f64).sqrt()));
    }

    let reported_error = f.lip * (l as f64).ln() / l as f64;
    Ok(KFiniteApprox { l, coefficients, approx, reported_error })
}

/// Monte-Carlo mean of f against the truncated Haar measure; one substream
/// per sample, order-stable compensated reduction.
pub fn mc_mean_with(f: &TestFunction, n: usize, seed: u64, y_cap: f64) -> Result<MeanEstimate> {
    if n < 100 {
        return Err(Error::Parameter(format!("mc_mean needs n >= 100, got {n}")));
    }
    let vals: Result<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut rng = substream(seed, i as u64);
            Ok(f.evaluate(&haar_sample(&mut rng, y_cap)?))
        })
        .collect();
    let vals = vals?;
    let (mean, stderr) = mean_stderr(&vals);
    Ok(MeanEstimate { value: mean, stderr, n, seed })
}

pub fn mc_mean(f: &TestFunction, n: usize, seed: u64) -> Result<MeanEstimate> {
    mc_mean_with(f, n, seed, Y_CAP_DEFAULT)
}

/// Quintic smoothstep: 0 at 0, 1 at 1, C^2, max slope 15/8.
fn smoothstep(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        t * t * t * (10.0 + t * (-15.0 + 6.0 * t))
    }
}

/// Options for the height-band observable.
#[derive(Clone, Copy, Debug)]
pub struct BandOptions {
    pub y_cap: f64,
    pub seed: u64,
    pub recentre_samples: usize,
}

impl Default for BandOptions {
    fn default() -> Self {
        BandOptions { y_cap: Y_CAP_DEFAULT, seed: 0x0BAD_5EED, recentre_samples: 2_000_000 }
    }
}

/// Smooth bump in Im z supported on [y0 - w, y1 + w], plateau value 1 on
/// [y0, y1], recentred to zero mean by Monte Carlo (seed recorded in the
/// mean estimate).
pub fn make_height_band(y0: f64, y1: f64, smooth_width: f64, opts: &BandOptions) -> Result<TestFunction> {
    if !(1.0 < y0 && y0 < y1) || !(smooth_width > 0.0) {
        return Err(Error::Parameter(format!(
            "band needs 1 < y0 < y1 and positive width, got ({y0}, {y1}, {smooth_width})"
        )));
    }
    if y0 - smooth_width <= 1.0 {
        return Err(Error::Parameter("band foot must stay above y = 1".into()));
    }
    let w = smooth_width;
    let profile = move |y: f64| -> f64 {
        if y <= y0 {
            smoothstep((y - (y0 - w)) / w)
        } else if y <= y1 {
            1.0
        } else {
            smoothstep(((y1 + w) - y) / w)
        }
    };
    let raw = TestFunction {
        eval: Arc::new(move |x: &PointX| profile(x.z_im())),
        lip: 0.0,
        sup: 1.0,
        mean_estimate: MeanEstimate::default(),
        name: String::new(),
        support_y: Some((y0 - w, y1 + w)),
    };
    let mean = mc_mean_with(&raw, opts.recentre_samples, opts.seed, opts.y_cap)?;
    let m = mean.value;
    let eval: Evaluator = Arc::new(move |x: &PointX| profile(x.z_im()) - m);
    // profile slope at most 15/8 per unit y; |dy| ~ 2 sqrt(y) per unit frame
    // distance near the band, padded for branch effects
    let lip = (1.875 / w) * 2.0 * (y1 + w).sqrt() * 1.15;
    Ok(TestFunction {
        eval,
        lip,
        sup: (1.0 - m).max(m.abs()) + 3.0 * mean.stderr,
        mean_estimate: MeanEstimate { value: 0.0, stderr: mean.stderr, n: mean.n, seed: mean.seed },
        name: format!("band[{y0},{y1};w={w}]"),
        support_y: Some((y0 - w, y1 + w)),
    })
}

/// Windowed tangent-angle harmonic: cos(j theta + phase) * window(Im z).
/// A pure weight-j signal under the K-action, used by the smoothing tests
/// and as a theta-sensitive observable.
pub fn make_angle_harmonic(j: u32, phase: f64, amp: f64) -> TestFunction {
    let (w_lo, w_hi) = (1.05, 3.0);
    let w = 0.4;
    let window = move |y: f64| -> f64 {
        if y <= w_lo + w {
            smoothstep((y - w_lo) / w)
        } else if y <= w_hi - w {
            1.0
        } else {
            smoothstep((w_hi - y) / w)
        }
    };
    let eval: Evaluator =
        Arc::new(move |x: &PointX| amp * (j as f64 * x.theta() + phase).cos() * window(x.z_im()));
    // d/dtheta bounded by amp*j; dtheta ~ 2/||F|| per unit frame distance
    // with ||F|| >= sqrt(2); window slope adds (15/8)/w * 2 sqrt(y) as for
    // the band
    let lip = amp * (j as f64 * 2.0 / 2f64.sqrt() + (1.875 / w) * 2.0 * w_hi.sqrt()) * 1.15;
    TestFunction {
        eval,
        lip,
        sup: amp,
        mean_estimate: MeanEstimate::default(),
        name: format!("angle[{j}]"),
        support_y: Some((w_lo, w_hi)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sl2::distance;
    use rand::Rng;

    #[test]
    fn fejer_values() {
        // F_7(0) = 1 + 2 sum_{j=1}^{6} (1 - j/7) = 7
        assert!((fejer_kernel(7, 0.0) - 7.0).abs() < 1e-12);
        // nonnegativity on a fine grid
        for l in [2u32, 7, 33] {
            for i in 0..10_000 {
                let k = i as f64 / 10_000.0;
                assert!(fejer_kernel(l, k) >= -1e-12, "L={l} k={k}");
            }
        }
        // unit mass: trapezoid with 2L+1 points is exact for trig polys
        let l = 9u32;
        let m = 4 * l as usize + 2;
        let mean: f64 = (0..m).map(|i| fejer_kernel(l, i as f64 / m as f64)).sum::<f64>() / m as f64;
        assert!((mean - 1.0).abs() < 1e-12);
    }

    #[test]
    fn k_smooth_fixes_invariant_functions() {
        let band = make_height_band(2.0, 2.5, 0.3, &BandOptions { recentre_samples: 10_000, ..Default::default() })
            .unwrap();
        let sm = k_smooth(&band, 8, 64).unwrap();
        let mut rng = substream(5, 0);
        for _ in 0..50 {
            let x = haar_sample(&mut rng, 10.0).unwrap();
            let a = band.evaluate(&x);
            let b = sm.approx.evaluate(&x);
            assert!((a - b).abs() < 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn k_smooth_pure_weight_signal() {
        let f = make_angle_harmonic(1, 0.0, 1.0);
        let sm = k_smooth(&f, 4, 32).unwrap();
        for &(j, c) in &sm.coefficients {
            if j.abs() == 1 {
                // weight +-1 coefficient: (1/2) * window, damped by 1 - 1/L
                assert!(c > 0.2, "j={j}: {c}");
            } else {
                assert!(c < 1e-10, "j={j}: {c}");
            }
        }
        assert_eq!(sm.coefficients.len(), 2 * 4 + 1);
    }

    #[test]
    fn k_smooth_rejects_aliasing() {
        let f = TestFunction::zero();
        assert!(matches!(k_smooth(&f, 8, 20), Err(Error::Aliasing { .. })));
    }

    #[test]
    fn k_smooth_error_bound_holds() {
        // max sampled deviation <= ||f||_Lip log(L)/L * 1.1 over a family of
        // theta-dependent observables
        let mut rng = substream(6, 0);
        for trial in 0..20 {
            let j = 1 + (trial % 3) as u32;
            let amp = 0.5 + rng.random::<f64>();
            let f = make_angle_harmonic(j, rng.random::<f64>(), amp);
            let l = [8u32, 16, 32, 64][trial % 4];
            let sm = k_smooth(&f, l, (4 * l + 2) as usize).unwrap();
            let mut worst: f64 = 0.0;
            for i in 0..200u64 {
                let mut r = substream(7, i);
                let x = haar_sample(&mut r, 10.0).unwrap();
                worst = worst.max((f.evaluate(&x) - sm.approx.evaluate(&x)).abs());
            }
            assert!(
                worst <= sm.reported_error * 1.1,
                "trial {trial}: dev {worst} vs bound {}",
                sm.reported_error
            );
        }
    }

    #[test]
    fn parseval_contraction() {
        let f = make_angle_harmonic(2, 0.3, 1.0);
        let sm = k_smooth(&f, 6, 32).unwrap();
        // paired L2 estimates on the same sample set
        let n = 20_000;
        let mut f2 = 0.0;
        let mut g2 = 0.0;
        for i in 0..n {
            let mut rng = substream(8, i as u64);
            let x = haar_sample(&mut rng, Y_CAP_DEFAULT).unwrap();
            let a = f.evaluate(&x);
            let b = sm.approx.evaluate(&x);
            f2 += a * a;
            g2 += b * b;
        }
        assert!(g2 <= f2 * (1.0 + 1e-9), "{g2} vs {f2}");
    }

    #[test]
    fn mc_mean_constant_and_determinism() {
        let c = TestFunction::constant(2.5);
        let m = mc_mean(&c, 500, 42).unwrap();
        assert_eq!(m.value, 2.5);
        assert_eq!(m.stderr, 0.0);
        let band = make_height_band(2.0, 2.4, 0.2, &BandOptions { recentre_samples: 10_000, ..Default::default() })
            .unwrap();
        let a = mc_mean(&band, 2000, 7).unwrap();
        let b = mc_mean(&band, 2000, 7).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.stderr, b.stderr);
        // thread-count independence
        let pool1 = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let pool4 = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let v1 = pool1.install(|| mc_mean(&band, 2000, 7).unwrap());
        let v4 = pool4.install(|| mc_mean(&band, 2000, 7).unwrap());
        assert_eq!(v1.value, v4.value);
    }

    #[test]
    fn band_profile_and_recentred_mean() {
        let opts = BandOptions { recentre_samples: 1_000_000, ..Default::default() };
        let (y0, y1, w) = (3.6, 3.9, 0.25);
        let band = make_height_band(y0, y1, w, &opts).unwrap();
        let m = band.mean_estimate;
        // plateau and far-field values (before recentring they are 1 and 0)
        let mid = PointX::from_chart(0.1, 0.5 * (y0 + y1), 1.0).unwrap();
        let low = PointX::from_chart(0.0, 2.0, 0.0).unwrap();
        let shift = band.evaluate(&low); // -mean
        assert!((band.evaluate(&mid) - shift - 1.0).abs() < 1e-12);
        // mean after recentring is zero within 3 stderr (checked with an
        // independent seed)
        let check = mc_mean(&band, 1_000_000, 1234).unwrap();
        assert!(
            check.value.abs() < 3.0 * (check.stderr + m.stderr),
            "residual mean {} vs stderr {}",
            check.value,
            check.stderr
        );
    }

    #[test]
    fn band_parameter_validation() {
        let opts = BandOptions { recentre_samples: 10_000, ..Default::default() };
        assert!(make_height_band(0.9, 2.0, 0.1, &opts).is_err());
        assert!(make_height_band(2.0, 1.5, 0.1, &opts).is_err());
        assert!(make_height_band(1.05, 2.0, 0.2, &opts).is_err());
    }

    #[test]
    fn lipschitz_constant_spot_check() {
        let opts = BandOptions { recentre_samples: 10_000, ..Default::default() };
        let band = make_height_band(3.6, 3.9, 0.25, &opts).unwrap();
        let harm = make_angle_harmonic(2, 0.7, 1.3);
        let mut rng = substream(9, 0);
        for f in [&band, &harm] {
            for _ in 0..2000 {
                let x = haar_sample(&mut rng, 8.0).unwrap();
                // nearby point via a small flow step and a small rotation
                let dt = 1e-4 * (rng.random::<f64>() - 0.5);
                let dk = 1e-5 * (rng.random::<f64>() - 0.5);
                let y = rotate_point(&crate::sl2::flow_point(&x, dt).unwrap(), dk);
                let d = distance(&x, &y);
                if d < 1e-12 {
                    continue;
                }
                let df = (f.evaluate(&x) - f.evaluate(&y)).abs();
                assert!(
                    df <= f.lip * d * (1.0 + 1e-6),
                    "{}: ratio {} vs lip {}",
                    f.name,
                    df / d,
                    f.lip
                );
            }
        }
    }

    #[test]
    fn sup_bound_spot_check() {
        let opts = BandOptions { recentre_samples: 50_000, ..Default::default() };
        let band = make_height_band(3.6, 3.9, 0.25, &opts).unwrap();
        let mut rng = substream(10, 0);
        for _ in 0..5000 {
            let x = haar_sample(&mut rng, 30.0).unwrap();
            assert!(band.evaluate(&x).abs() <= band.sup);
        }
    }
}

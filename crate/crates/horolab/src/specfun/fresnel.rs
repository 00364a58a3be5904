//! Fresnel integrals and the closed-form continuous Weyl integral for
//! polynomial phases of degree <= 2.
//!
//! Fc(x) = int_0^x e^{i pi v^2 / 2} dv = C(x) + i S(x). Three regimes:
//! ascending series for small x, a rotated-contour quadrature of the tail in
//! the middle, and the integration-by-parts asymptotic series for large x.

use crate::util::{gauss_legendre, Accum};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn gl32() -> &'static (Vec<f64>, Vec<f64>) {
    static N: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    N.get_or_init(|| gauss_legendre(32))
}

/// Fc(infinity) = (1 + i)/2.
pub const FRESNEL_LIMIT: Complex64 = Complex64 { re: 0.5, im: 0.5 };

fn fresnel_series(x: f64) -> Complex64 {
    // sum over the expansion of e^{i pi v^2/2}: term_k = (i pi/2)^k x^{2k+1} / (k! (2k+1))
    let z = Complex64::new(0.0, PI / 2.0 * x * x);
    let mut term = Complex64::new(x, 0.0);
    let mut sum = term;
    for k in 1..200 {
        let kf = k as f64;
        term = term * z / kf;
        let add = term * ((2.0 * kf - 1.0) / (2.0 * kf + 1.0));
        // maintain x^{2k+1}/(2k+1) structure: term tracks x^{2k+1}/ (k!) * (i pi/2)^k / (2k-1)...
        sum += add;
        term = add; // keep the 1/(2k+1) folded in for the next ratio
        if add.norm() < 1e-17 * sum.norm().max(1e-300) {
            break;
        }
    }
    sum
}

/// Tail T(x) = int_x^inf e^{i pi v^2/2} dv via the rotated contour
/// v = x + e^{i pi/4} tau (integrand becomes a damped Gaussian).
fn fresnel_tail_contour(x: f64) -> Complex64 {
    let (xs, ws) = gl32();
    let rot = Complex64::from_polar(1.0, PI / 4.0);
    let phase = Complex64::from_polar(1.0, PI / 2.0 * x * x);
    // integrand: exp(-pi tau^2/2 - pi x tau / sqrt(2) + i pi x tau / sqrt(2))
    let decay = PI * x / 2f64.sqrt();
    let f = |tau: f64| -> Complex64 {
        let mag = (-PI * tau * tau / 2.0 - decay * tau).exp();
        Complex64::from_polar(mag, decay * tau)
    };
    // geometric panels resolving the min(Gaussian, exponential) scale
    let scale = 1.0 / (1.0 + x);
    let mut acc_re = Accum::new();
    let mut acc_im = Accum::new();
    let mut lo = 0.0;
    let mut hi = scale.min(6.0);
    loop {
        let c = 0.5 * (lo + hi);
        let h = 0.5 * (hi - lo);
        for (u, w) in xs.iter().zip(ws.iter()) {
            let v = f(c + h * u) * (w * h);
            acc_re.add(v.re);
            acc_im.add(v.im);
        }
        if hi >= 6.0 {
            break;
        }
        lo = hi;
        hi = (hi * 2.0).min(6.0);
    }
    phase * rot * Complex64::new(acc_re.value(), acc_im.value())
}

/// Tail by the integration-by-parts asymptotic series, for large x.
fn fresnel_tail_asymptotic(x: f64) -> Complex64 {
    let u = PI * x * x / 2.0;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    for m in 0..30 {
        let next = term * Complex64::new(0.0, -(0.5 + m as f64) / u);
        if next.norm() >= term.norm() {
            break;
        }
        sum += next;
        term = next;
        if term.norm() < 1e-17 {
            break;
        }
    }
    // T = e^{iu} i u^{-1/2} / sqrt(2 pi) * sum
    Complex64::from_polar(1.0, u) * Complex64::new(0.0, 1.0) / (2.0 * PI * u).sqrt() * sum
}

/// Fc(x) = C(x) + i S(x); odd in x.
pub fn fresnel(x: f64) -> Complex64 {
    if x < 0.0 {
        return -fresnel(-x);
    }
    if x <= 1.2 {
        fresnel_series(x)
    } else if x <= 9.0 {
        FRESNEL_LIMIT - fresnel_tail_contour(x)
    } else {
        FRESNEL_LIMIT - fresnel_tail_asymptotic(x)
    }
}

/// int_a^b e^{2 pi i q v^2} dv in closed form via Fresnel integrals.
pub fn quadratic_phase_integral(q: f64, a: f64, b: f64) -> Complex64 {
    if q == 0.0 {
        return Complex64::new(b - a, 0.0);
    }
    if q < 0.0 {
        return quadratic_phase_integral(-q, a, b).conj();
    }
    // pi v'^2/2 = 2 pi q v^2  =>  v' = 2 sqrt(q) v
    let s = 2.0 * q.sqrt();
    (fresnel(s * b) - fresnel(s * a)) / s
}

//! Fourier transforms of slowly decaying functions on the line:
//! int f(x) e^{i x t} dx for |f(x)| ~ |x|^{-2s}, 0 < s < 1/2.
//!
//! Strategy: Gauss-Legendre panels on a non-oscillatory core, then the
//! alternating half-period tail summed with iterated averaging (van
//! Wijngaarden), which converges fast because the envelope varies slowly
//! over one period.

use crate::util::{gauss_legendre, Accum};
use rustfft::num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

fn gl16() -> &'static (Vec<f64>, Vec<f64>) {
    static N: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    N.get_or_init(|| gauss_legendre(16))
}

fn gl_panel<F: Fn(f64) -> Complex64>(f: &F, a: f64, b: f64) -> Complex64 {
    let (xs, ws) = gl16();
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut re = Accum::new();
    let mut im = Accum::new();
    for (x, w) in xs.iter().zip(ws.iter()) {
        let v = f(c + h * x) * (w * h);
        re.add(v.re);
        im.add(v.im);
    }
    Complex64::new(re.value(), im.value())
}

/// Integrate g over [a, inf) where g has sign-alternating half-period
/// structure of period `period` (e.g. g = envelope * e^{ixt}). Sums
/// half-period panel integrals and accelerates with iterated averaging.
fn alternating_tail<F: Fn(f64) -> Complex64>(g: &F, a: f64, period: f64, levels: usize) -> Complex64 {
    let half = 0.5 * period;
    let n = 2 * levels + 8;
    let mut partial = Vec::with_capacity(n);
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        let lo = a + i as f64 * half;
        acc += gl_panel(g, lo, lo + half);
        partial.push(acc);
    }
    // iterated averaging of the partial-sum sequence
    let mut row = partial;
    for _ in 0..levels {
        if row.len() < 2 {
            break;
        }
        row = row.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    }
    *row.last().unwrap()
}

/// int_{-inf}^{inf} f(x) e^{i x t} dx for decaying f (|f| ~ |x|^{-2s} at
/// infinity with slowly varying phase). `t` must be nonzero.
pub fn fourier_line_integral<F: Fn(f64) -> Complex64>(f: &F, t: f64) -> Complex64 {
    assert!(t != 0.0 && t.is_finite());
    let ta = t.abs();
    // non-oscillatory core: |x t| <= ~4, at least [-6, 6] to clear the bump at 0
    let core = (4.0 / ta).max(6.0);
    let kernel = |x: f64| f(x) * Complex64::from_polar(1.0, x * t);
    let mut total = Complex64::new(0.0, 0.0);
    // log-spaced panels over the core keep the algebraic peak resolved
    let mut edges = vec![0.0, 1.0f64.min(core)];
    while *edges.last().unwrap() < core {
        let next = (edges.last().unwrap() * 2.0).min(core);
        edges.push(next);
    }
    for w in edges.windows(2) {
        // split each panel so the phase advances at most ~pi per GL16 panel
        let len = w[1] - w[0];
        let parts = ((len * ta / PI).ceil() as usize).max(1);
        let h = len / parts as f64;
        for j in 0..parts {
            let lo = w[0] + j as f64 * h;
            total += gl_panel(&kernel, lo, lo + h);
            total += gl_panel(&kernel, -(lo + h), -lo);
        }
    }
    let period = 2.0 * PI / ta;
    total += alternating_tail(&kernel, core, period, 10);
    let neg_kernel = |x: f64| f(-x) * Complex64::from_polar(1.0, -x * t);
    total += alternating_tail(&neg_kernel, core, period, 10);
    total
}

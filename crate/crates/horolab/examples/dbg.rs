use horolab::specfun::kirillov::*;
use rustfft::num_complex::Complex64;

fn main() {
    let s = SpectralParam::new(0.3).unwrap();
    let g = |x: f64| Complex64::new((-0.5 * x * x).exp(), 0.0);
    let lm = line_model_inner(&g, &g, s);
    let exact = 1.298055332647558; // Gamma(1-s) for s=0.3
    println!("gaussian: lm = {lm:.10}, want {exact:.10}, rel = {:.3e}", lm/exact - 1.0);

    // f0 alone, check vs kirillov norm ratio expectation 2/pi
    let f0 = move |x: f64| basis_vector(s, 0, x);
    let lm0 = line_model_inner(&f0, &f0, s);
    let k0 = KirillovFunction::spherical(s).unwrap();
    let (n0, _) = kirillov_norm(&k0).unwrap();
    // P = (1/2pi) int |FT|^2 |t|^{1-2s} dt; our hat = FT/2, so FT^2 = 4 hat^2
    // => lm should equal (4/(2pi)) * n0 = (2/pi) n0
    println!("f0: lm0 = {lm0:.8}, (2/pi) n0 = {:.8}, ratio err {:.3e}",
        2.0 / std::f64::consts::PI * n0, lm0 / (2.0 / std::f64::consts::PI * n0) - 1.0);
}

//! Geometry of SL2(R) and the modular quotient: group arithmetic, the
//! unipotent flow, fundamental-domain reduction, a frame metric, and Haar
//! sampling on the truncated fundamental domain.
//!
//! Points of the quotient are held as reduced frames (z, theta): z in the
//! standard fundamental domain of SL2(Z) acting on the upper half plane,
//! theta the tangent angle in [0, 2pi). The frame matrix is b(z) k(theta/2)
//! with b(z) = (sqrt(y), x/sqrt(y); 0, 1/sqrt(y)). Reduction canonicalizes
//! the left coset: gamma * g with gamma in SL2(Z) found by the Gauss loop.
//! The flow multiplies frames by u_t on the right, which keeps reduction,
//! flow additivity and reversibility exact at the coset level.

use crate::dd::Dd;
use crate::error::{Error, Result};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;

pub const DET_TOL: f64 = 1e-12;
/// Tolerance of the Gauss reduction loop termination.
const EPS_RED: f64 = 1e-13;
/// Max flow-time advanced between reductions (double path).
const MAX_FLOW_STEP: f64 = 256.0;
/// Max flow-time advanced between reductions (double-double path).
const MAX_FLOW_STEP_DD: f64 = 4096.0;
/// Entry-growth cap per block: |h| * max(|a|,|c|) stays below this, which
/// bounds the product sizes inside the reduction loop.
const ENTRY_CAP: f64 = 64.0;
const ENTRY_CAP_DD: f64 = 16384.0;
const MAX_REDUCE_ITERS: usize = 500;
const HAAR_RETRY_CAP: usize = 100_000;

/// Default cusp truncation height for Haar sampling. The omitted mass is
/// (3/pi) / y_cap of the total.
pub const Y_CAP_DEFAULT: f64 = 50.0;

/// A 2x2 real unimodular matrix.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GroupElement {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement { a: 1.0, b: 0.0, c: 0.0, d: 1.0 };

    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let g = GroupElement { a, b, c, d };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a.is_finite() && self.b.is_finite() && self.c.is_finite() && self.d.is_finite())
        {
            return Err(Error::InvalidElement("non-finite entries".into()));
        }
        if (self.det() - 1.0).abs() > DET_TOL {
            return Err(Error::InvalidElement(format!(
                "det = {:.17e}, must be 1 within {DET_TOL:e}",
                self.det()
            )));
        }
        Ok(())
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    #[inline]
    pub fn mul(&self, o: &GroupElement) -> GroupElement {
        GroupElement {
            a: self.a * o.a + self.b * o.c,
            b: self.a * o.b + self.b * o.d,
            c: self.c * o.a + self.d * o.c,
            d: self.c * o.b + self.d * o.d,
        }
    }

    #[inline]
    pub fn inverse(&self) -> GroupElement {
        GroupElement { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn frobenius_dist(&self, o: &GroupElement) -> f64 {
        let da = self.a - o.a;
        let db = self.b - o.b;
        let dc = self.c - o.c;
        let dd = self.d - o.d;
        (da * da + db * db + dc * dc + dd * dd).sqrt()
    }

    /// Moebius image of i: (Re z, Im z). Det is assumed ~1.
    #[inline]
    pub fn moebius_i(&self) -> (f64, f64) {
        let den = self.c * self.c + self.d * self.d;
        ((self.a * self.c + self.b * self.d) / den, 1.0 / den)
    }

    /// Moebius action on an arbitrary upper-half-plane point.
    pub fn moebius(&self, zr: f64, zi: f64) -> (f64, f64) {
        // (az+b)(conj(cz+d)) / |cz+d|^2
        let pr = self.c * zr + self.d;
        let pi = self.c * zi;
        let den = pr * pr + pi * pi;
        let nr = self.a * zr + self.b;
        let ni = self.a * zi;
        ((nr * pr + ni * pi) / den, (ni * pr - nr * pi) / den)
    }

    /// Rescale so det is exactly ~1; contains multiplicative rounding drift.
    fn renormalize(&mut self) -> Result<()> {
        let det = self.det();
        if !det.is_finite() || det <= 0.0 {
            return Err(Error::InvalidElement(format!("degenerate det {det}")));
        }
        if (det - 1.0).abs() > 1e-15 {
            let s = 1.0 / det.sqrt();
            self.a *= s;
            self.b *= s;
            self.c *= s;
            self.d *= s;
        }
        Ok(())
    }
}

/// u_t = (1 t; 0 1), the one-parameter unipotent.
pub fn horocycle(t: f64) -> GroupElement {
    GroupElement { a: 1.0, b: t, c: 0.0, d: 1.0 }
}

/// k_theta = (cos sin; -sin cos).
pub fn rotation(theta: f64) -> GroupElement {
    let (s, c) = theta.sin_cos();
    GroupElement { a: c, b: s, c: -s, d: c }
}

/// u_T h u_{-T} in closed form: (a+Tc, b+T(d-a)-T^2 c; c, d-Tc).
pub fn conjugate_drift(h: &GroupElement, t: f64) -> GroupElement {
    GroupElement {
        a: h.a + t * h.c,
        b: h.b + t * (h.d - h.a) - t * t * h.c,
        c: h.c,
        d: h.d - t * h.c,
    }
}

/// A point of the quotient held as a reduced frame.
#[derive(Clone, Copy, Debug)]
pub struct PointX {
    z_re: f64,
    z_im: f64,
    theta: f64,
    reduced: bool,
}

impl PointX {
    /// The identity frame: z = i, theta = 0.
    pub const BASE: PointX = PointX { z_re: 0.0, z_im: 1.0, theta: 0.0, reduced: true };

    pub fn from_chart(z_re: f64, z_im: f64, theta: f64) -> Result<PointX> {
        if !(z_re.is_finite() && z_im.is_finite() && theta.is_finite() && z_im > 0.0) {
            return Err(Error::InvalidElement(format!("bad chart point ({z_re}, {z_im})")));
        }
        let theta = theta.rem_euclid(2.0 * PI);
        Ok(PointX { z_re, z_im, theta, reduced: in_fundamental_domain(z_re, z_im) })
    }

    #[inline]
    pub fn z_re(&self) -> f64 {
        self.z_re
    }

    #[inline]
    pub fn z_im(&self) -> f64 {
        self.z_im
    }

    #[inline]
    pub fn theta(&self) -> f64 {
        self.theta
    }

    #[inline]
    pub fn is_reduced(&self) -> bool {
        self.reduced
    }

    /// The frame matrix b(z) k(theta/2).
    pub fn frame(&self) -> GroupElement {
        let sy = self.z_im.sqrt();
        let (s, c) = (0.5 * self.theta).sin_cos();
        GroupElement {
            a: sy * c - self.z_re / sy * s,
            b: sy * s + self.z_re / sy * c,
            c: -s / sy,
            d: c / sy,
        }
    }
}

pub fn in_fundamental_domain(z_re: f64, z_im: f64) -> bool {
    z_re.abs() <= 0.5 + 1e-9 && z_re * z_re + z_im * z_im >= 1.0 - 1e-9
}

fn frame_to_point(g: &GroupElement) -> PointX {
    let (zr, zi) = g.moebius_i();
    let theta = (-2.0 * g.c.atan2(g.d)).rem_euclid(2.0 * PI);
    PointX { z_re: zr, z_im: zi, theta, reduced: in_fundamental_domain(zr, zi) }
}

/// Gauss reduction of the frame at the matrix level: returns gamma * g with
/// g * i in the fundamental domain.
fn reduce_frame(mut g: GroupElement) -> Result<GroupElement> {
    g.renormalize()?;
    for _ in 0..MAX_REDUCE_ITERS {
        let (zr, zi) = g.moebius_i();
        if !(zr.is_finite() && zi.is_finite() && zi > 0.0) {
            return Err(Error::InvalidElement(format!("degenerate point ({zr}, {zi})")));
        }
        if zr.abs() > 0.5 + EPS_RED {
            let n = zr.round();
            // T^{-n} g = (a - n c, b - n d; c, d)
            g.a -= n * g.c;
            g.b -= n * g.d;
            continue;
        }
        if zr * zr + zi * zi < 1.0 - EPS_RED {
            // S g = (-c, -d; a, b)
            g = GroupElement { a: -g.c, b: -g.d, c: g.a, d: g.b };
            continue;
        }
        return Ok(g);
    }
    Err(Error::InvalidElement("reduction loop did not terminate".into()))
}

/// Reduce a group element to its fundamental-domain frame. Idempotent.
pub fn reduce(g: &GroupElement) -> Result<PointX> {
    g.validate()?;
    Ok(frame_to_point(&reduce_frame(*g)?))
}

fn flow_frame(mut g: GroupElement, t: f64, max_step: f64) -> Result<GroupElement> {
    let mut remaining = t;
    loop {
        let growth = g.a.abs().max(g.c.abs());
        let cap = (ENTRY_CAP / growth).min(max_step).max(1.0 / 64.0);
        let h = remaining.clamp(-cap, cap);
        // right multiplication by u_h: (a, a h + b; c, c h + d)
        g.b += g.a * h;
        g.d += g.c * h;
        g = reduce_frame(g)?;
        remaining -= h;
        if remaining == 0.0 {
            return Ok(g);
        }
    }
}

/// The point x . u_t, reduced. Flows in bounded blocks, reducing after each.
pub fn flow_point(x: &PointX, t: f64) -> Result<PointX> {
    if !t.is_finite() {
        return Err(Error::Parameter("flow time must be finite".into()));
    }
    if t == 0.0 {
        return Ok(*x);
    }
    Ok(frame_to_point(&flow_frame(x.frame(), t, MAX_FLOW_STEP)?))
}

/// Flow by an exact integer time, chunked so each block is representable.
pub fn flow_point_by_integer(x: &PointX, dt: i128) -> Result<PointX> {
    const CHUNK: i128 = 1 << 40;
    let mut g = x.frame();
    let mut remaining = dt;
    while remaining != 0 {
        let step = remaining.clamp(-CHUNK, CHUNK);
        g = flow_frame(g, step as f64, MAX_FLOW_STEP)?;
        remaining -= step;
    }
    Ok(frame_to_point(&g))
}

// ---- extended-precision (double-double) flow path ----

#[derive(Clone, Copy)]
struct DdMat {
    a: Dd,
    b: Dd,
    c: Dd,
    d: Dd,
}

impl DdMat {
    fn from_frame(g: &GroupElement) -> DdMat {
        DdMat {
            a: Dd::from_f64(g.a),
            b: Dd::from_f64(g.b),
            c: Dd::from_f64(g.c),
            d: Dd::from_f64(g.d),
        }
    }

    fn to_frame(self) -> GroupElement {
        GroupElement {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            c: self.c.to_f64(),
            d: self.d.to_f64(),
        }
    }
}

fn reduce_frame_dd(mut g: DdMat) -> Result<DdMat> {
    for _ in 0..MAX_REDUCE_ITERS {
        let den = g.c.mul(g.c).add(g.d.mul(g.d));
        if !(den.hi.is_finite() && den.hi > 0.0) {
            return Err(Error::InvalidElement("degenerate dd frame".into()));
        }
        let num = g.a.mul(g.c).add(g.b.mul(g.d));
        let zr = num.div(den);
        let zi = Dd::from_f64(1.0).div(den);
        if zr.hi.abs() > 0.5 + EPS_RED {
            let n = zr.hi.round();
            g.a = g.a.sub(g.c.mul_f64(n));
            g.b = g.b.sub(g.d.mul_f64(n));
            continue;
        }
        let norm2 = zr.mul(zr).add(zi.mul(zi));
        if norm2.hi < 1.0 - EPS_RED {
            g = DdMat { a: g.c.neg(), b: g.d.neg(), c: g.a, d: g.b };
            continue;
        }
        return Ok(g);
    }
    Err(Error::InvalidElement("dd reduction loop did not terminate".into()))
}

fn flow_frame_dd(mut g: DdMat, t: f64) -> Result<DdMat> {
    let mut remaining = t;
    loop {
        let growth = g.a.hi.abs().max(g.c.hi.abs());
        let cap = (ENTRY_CAP_DD / growth).min(MAX_FLOW_STEP_DD).max(1.0 / 64.0);
        let h = remaining.clamp(-cap, cap);
        g.b = g.b.add(g.a.mul_f64(h));
        g.d = g.d.add(g.c.mul_f64(h));
        g = reduce_frame_dd(g)?;
        remaining -= h;
        if remaining == 0.0 {
            return Ok(g);
        }
    }
}

/// Extended-precision variant of [`flow_point`] (software double-double).
pub fn flow_point_dd(x: &PointX, t: f64) -> Result<PointX> {
    if !t.is_finite() {
        return Err(Error::Parameter("flow time must be finite".into()));
    }
    if t == 0.0 {
        return Ok(*x);
    }
    let g = flow_frame_dd(DdMat::from_frame(&x.frame()), t)?;
    Ok(frame_to_point(&g.to_frame()))
}

/// Flow through several legs keeping the extended-precision state between
/// them. Needed for long round trips: the unipotent shear amplifies any
/// double-precision hand-off at a turn point by up to t^2.
pub fn flow_point_dd_legs(x: &PointX, legs: &[f64]) -> Result<PointX> {
    let mut g = DdMat::from_frame(&x.frame());
    for &t in legs {
        if !t.is_finite() {
            return Err(Error::Parameter("flow time must be finite".into()));
        }
        if t != 0.0 {
            g = flow_frame_dd(g, t)?;
        }
    }
    Ok(frame_to_point(&g.to_frame()))
}

// ---- metric ----

fn small_gamma_set() -> &'static Vec<GroupElement> {
    static SET: OnceLock<Vec<GroupElement>> = OnceLock::new();
    SET.get_or_init(|| {
        let mut v = Vec::new();
        for a in -2i32..=2 {
            for b in -2i32..=2 {
                for c in -2i32..=2 {
                    for d in -2i32..=2 {
                        if a * d - b * c == 1 {
                            v.push(GroupElement {
                                a: a as f64,
                                b: b as f64,
                                c: c as f64,
                                d: d as f64,
                            });
                        }
                    }
                }
            }
        }
        v
    })
}

/// Frobenius distance between frames, minimized over lattice elements with
/// entries bounded by 2 and over both orderings (the Frobenius norm is not
/// invariant under lattice translation, so the two-sided min is what makes
/// this symmetric). Zero iff the same point (within 1e-12).
pub fn distance(x: &PointX, y: &PointX) -> f64 {
    let fx = x.frame();
    let fy = y.frame();
    let mut best = f64::INFINITY;
    for gamma in small_gamma_set() {
        let d = fx.frobenius_dist(&gamma.mul(&fy));
        if d < best {
            best = d;
        }
        let d = fy.frobenius_dist(&gamma.mul(&fx));
        if d < best {
            best = d;
        }
    }
    best
}

/// K-action in the chart: k in [0,1) rotates the tangent angle by 2 pi k.
pub fn rotate_point(x: &PointX, k: f64) -> PointX {
    PointX {
        z_re: x.z_re,
        z_im: x.z_im,
        theta: (x.theta + 2.0 * PI * k).rem_euclid(2.0 * PI),
        reduced: x.reduced,
    }
}

/// Upper bound for the frame-metric speed of t -> x . u_t at t = 0,
/// using the current reduced representative.
pub fn orbit_speed_bound(x: &PointX) -> f64 {
    let f = x.frame();
    (f.a * f.a + f.c * f.c).sqrt()
}

/// Haar-random point of the fundamental domain truncated at Im z <= y_cap,
/// density dx dy / y^2 times the uniform fiber. Deterministic per stream.
pub fn haar_sample(rng: &mut ChaCha8Rng, y_cap: f64) -> Result<PointX> {
    if !(y_cap > 1.0) {
        return Err(Error::Parameter(format!("y_cap must exceed 1, got {y_cap}")));
    }
    let y0 = 3.0f64.sqrt() / 2.0;
    let inv_lo = 1.0 / y_cap;
    let inv_hi = 1.0 / y0;
    for _ in 0..HAAR_RETRY_CAP {
        let x: f64 = rng.random::<f64>() - 0.5;
        // inverse CDF of the 1/y^2 marginal on [y0, y_cap]
        let u: f64 = rng.random();
        let y = 1.0 / (inv_hi - u * (inv_hi - inv_lo));
        let theta = 2.0 * PI * rng.random::<f64>();
        if x * x + y * y >= 1.0 {
            return Ok(PointX { z_re: x, z_im: y, theta, reduced: true });
        }
    }
    Err(Error::SamplingFailure(HAAR_RETRY_CAP))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn horocycle_identity_and_group_law() {
        let id = horocycle(0.0);
        assert_eq!(id, GroupElement::IDENTITY);
        let lhs = horocycle(1.5).mul(&horocycle(-0.7));
        let rhs = horocycle(0.8);
        assert!(lhs.frobenius_dist(&rhs) < 1e-15);
    }

    #[test]
    fn horocycle_moebius_on_i() {
        let (zr, zi) = horocycle(3.0).moebius(0.0, 1.0);
        assert!(close(zr, 3.0, 1e-15) && close(zi, 1.0, 1e-15));
    }

    #[test]
    fn rotation_cases() {
        assert!(rotation(0.0).frobenius_dist(&GroupElement::IDENTITY) < 1e-15);
        let minus_id = GroupElement { a: -1.0, b: 0.0, c: 0.0, d: -1.0 };
        assert!(rotation(PI).frobenius_dist(&minus_id) < 1e-12);
        let lhs = rotation(0.3).mul(&rotation(0.4));
        assert!(lhs.frobenius_dist(&rotation(0.7)) < 1e-12);
        assert!(rotation(1.0 + 2.0 * PI).frobenius_dist(&rotation(1.0)) < 1e-12);
    }

    #[test]
    fn conjugate_drift_cases() {
        let id = GroupElement::IDENTITY;
        assert!(conjugate_drift(&id, 123.0).frobenius_dist(&id) < 1e-15);
        let h = horocycle(2.5);
        assert!(conjugate_drift(&h, 77.0).frobenius_dist(&h) < 1e-15);
    }

    #[test]
    fn conjugate_drift_matches_triple_product() {
        let mut rng = substream(7, 0);
        for _ in 0..2000 {
            let ea = 0.4 * (rng.random::<f64>() - 0.5);
            let b = 2.0 * (rng.random::<f64>() - 0.5);
            let c = 2.0 * (rng.random::<f64>() - 0.5);
            let a = 1.0 + ea;
            let d = (1.0 + b * c) / a;
            let h = GroupElement { a, b, c, d };
            let t = 100.0;
            let closed = conjugate_drift(&h, t);
            let triple = horocycle(t).mul(&h).mul(&horocycle(-t));
            let scale = (h.a.abs() + h.b.abs() + h.c.abs() + h.d.abs()) * (1.0 + t * t);
            assert!(closed.frobenius_dist(&triple) / scale < 1e-10);
        }
    }

    #[test]
    fn reduce_identity_and_gamma_invariance() {
        let p = reduce(&GroupElement::IDENTITY).unwrap();
        assert!(close(p.z_re(), 0.0, 1e-15) && close(p.z_im(), 1.0, 1e-15));
        assert!(close(p.theta(), 0.0, 1e-15));
        let q = reduce(&horocycle(1.0)).unwrap();
        assert!(distance(&p, &q) < 1e-12);
    }

    #[test]
    fn reduce_rejects_degenerate() {
        let g = GroupElement { a: f64::NAN, b: 0.0, c: 0.0, d: 1.0 };
        assert!(reduce(&g).is_err());
    }

    #[test]
    fn reduce_idempotent() {
        let mut rng = substream(11, 0);
        for _ in 0..500 {
            let x = haar_sample(&mut rng, 20.0).unwrap();
            let t = 2000.0 * (rng.random::<f64>() - 0.5);
            let y = flow_point(&x, t).unwrap();
            let z = reduce(&y.frame()).unwrap();
            assert!(close(y.z_re(), z.z_re(), 1e-12));
            assert!(close(y.z_im(), z.z_im(), 1e-12 * y.z_im()));
            assert!(close(y.theta(), z.theta(), 1e-11) || close((y.theta() - z.theta()).abs(), 2.0 * PI, 1e-11));
        }
    }

    #[test]
    fn flow_trivial_cases() {
        let x = PointX::BASE;
        let y = flow_point(&x, 0.0).unwrap();
        assert!(distance(&x, &y) < 1e-15);
        // u_1 is in the lattice: the identity frame is fixed
        let y = flow_point(&x, 1.0).unwrap();
        assert!(distance(&x, &y) < 1e-12);
    }

    #[test]
    fn flow_matches_unit_steps() {
        let x = PointX::from_chart(0.0, 2f64.sqrt(), 0.0).unwrap();
        let direct = flow_point(&x, 10.0).unwrap();
        let mut stepped = x;
        for _ in 0..10 {
            stepped = flow_point(&stepped, 1.0).unwrap();
        }
        assert!(distance(&direct, &stepped) < 1e-9);
    }

    #[test]
    fn flow_additivity() {
        let mut rng = substream(13, 0);
        for _ in 0..300 {
            let x = haar_sample(&mut rng, 20.0).unwrap();
            let s = 2e3 * (rng.random::<f64>() - 0.5);
            let t = 2e3 * (rng.random::<f64>() - 0.5);
            let a = flow_point(&x, s + t).unwrap();
            let b = flow_point(&flow_point(&x, s).unwrap(), t).unwrap();
            assert!(distance(&a, &b) < 1e-8);
        }
    }

    #[test]
    fn reversibility_moderate_t() {
        let mut rng = substream(17, 0);
        for _ in 0..20 {
            let x = haar_sample(&mut rng, 20.0).unwrap();
            let t = 1e4 * rng.random::<f64>();
            let y = flow_point(&flow_point(&x, t).unwrap(), -t).unwrap();
            assert!(distance(&x, &y) < 1e-7);
        }
    }

    #[test]
    fn dd_flow_agrees_with_double() {
        let x = PointX::from_chart(0.21, 1.37, 0.5).unwrap();
        let a = flow_point(&x, 5000.5).unwrap();
        let b = flow_point_dd(&x, 5000.5).unwrap();
        assert!(distance(&a, &b) < 1e-9);
    }

    #[test]
    fn distance_properties() {
        let mut rng = substream(19, 0);
        let x = haar_sample(&mut rng, 20.0).unwrap();
        assert!(distance(&x, &x) == 0.0);
        let y = haar_sample(&mut rng, 20.0).unwrap();
        let (dxy, dyx) = (distance(&x, &y), distance(&y, &x));
        assert!(close(dxy, dyx, 1e-12 * (1.0 + dxy)));
        // small flow displacement has comparable frame distance
        let z = flow_point(&PointX::BASE, 1e-4).unwrap();
        let d = distance(&PointX::BASE, &z);
        assert!(d > 0.5e-4 && d < 2e-4, "d = {d}");
    }

    #[test]
    fn haar_samples_satisfy_invariants_and_determinism() {
        let y_cap = 10.0;
        let mut rng = substream(23, 0);
        for _ in 0..2000 {
            let p = haar_sample(&mut rng, y_cap).unwrap();
            assert!(p.is_reduced());
            assert!(p.z_im() <= y_cap);
        }
        let mut r1 = substream(23, 5);
        let mut r2 = substream(23, 5);
        for _ in 0..100 {
            let p = haar_sample(&mut r1, y_cap).unwrap();
            let q = haar_sample(&mut r2, y_cap).unwrap();
            assert_eq!(p.z_re(), q.z_re());
            assert_eq!(p.z_im(), q.z_im());
            assert_eq!(p.theta(), q.theta());
        }
    }

    #[test]
    fn haar_mean_height_matches_quadrature() {
        // deterministic 2-D quadrature of the truncated density
        let y_cap = 10.0;
        let y0 = 3f64.sqrt() / 2.0;
        let width = |y: f64| {
            if y >= 1.0 {
                1.0
            } else {
                1.0 - 2.0 * (1.0 - y * y).sqrt()
            }
        };
        let m = 200_000;
        let dy = (y_cap - y0) / m as f64;
        let (mut mass, mut mom) = (0.0, 0.0);
        for i in 0..m {
            let y = y0 + (i as f64 + 0.5) * dy;
            let w = width(y) / (y * y);
            mass += w * dy;
            mom += y * w * dy;
        }
        let expected = mom / mass;

        let n = 100_000;
        let mut vals = Vec::with_capacity(n);
        for i in 0..n {
            let mut rng = substream(29, i as u64);
            vals.push(haar_sample(&mut rng, y_cap).unwrap().z_im());
        }
        let (mean, se) = crate::util::mean_stderr(&vals);
        assert!(
            (mean - expected).abs() < 3.0 * se,
            "mean {mean}, expected {expected}, se {se}"
        );
    }

    #[test]
    fn det_preserved_along_flows() {
        let mut rng = substream(31, 0);
        for _ in 0..200 {
            let x = haar_sample(&mut rng, 30.0).unwrap();
            let t = 1e5 * (rng.random::<f64>() - 0.5);
            let y = flow_point(&x, t).unwrap();
            assert!((y.frame().det() - 1.0).abs() < DET_TOL);
        }
    }
}

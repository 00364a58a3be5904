//! Minimal double-double arithmetic (~31 significant digits).
//!
//! Used by the extended-precision orbit flow and by exact-integer phase
//! reduction in Weyl sums. Only the handful of operations those paths need.

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub(crate) struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let err = (a - (s - bb)) + (b - bb);
    (s, err)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    // requires |a| >= |b|
    let s = a + b;
    let err = b - (s - a);
    (s, err)
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let err = a.mul_add(b, -p);
    (p, err)
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };

    #[inline]
    pub fn from_f64(x: f64) -> Dd {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact conversion for |x| < 2^106 (both limbs representable).
    pub fn from_i128(x: i128) -> Dd {
        let hi = x as f64;
        let rem = x - hi as i128;
        Dd::renorm(hi, rem as f64)
    }

    #[inline]
    fn renorm(hi: f64, lo: f64) -> Dd {
        let (s, e) = quick_two_sum(hi, lo);
        Dd { hi: s, lo: e }
    }

    #[inline]
    pub fn add(self, o: Dd) -> Dd {
        let (s1, s2) = two_sum(self.hi, o.hi);
        let (t1, t2) = two_sum(self.lo, o.lo);
        let (s1, s2b) = quick_two_sum(s1, s2 + t1);
        Dd::renorm(s1, s2b + t2)
    }

    #[inline]
    pub fn add_f64(self, o: f64) -> Dd {
        let (s1, s2) = two_sum(self.hi, o);
        Dd::renorm(s1, s2 + self.lo)
    }

    #[inline]
    pub fn sub(self, o: Dd) -> Dd {
        self.add(o.neg())
    }

    #[inline]
    pub fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }

    #[inline]
    pub fn mul(self, o: Dd) -> Dd {
        let (p1, p2) = two_prod(self.hi, o.hi);
        let p2 = p2 + self.hi * o.lo + self.lo * o.hi;
        Dd::renorm(p1, p2)
    }

    #[inline]
    pub fn mul_f64(self, o: f64) -> Dd {
        let (p1, p2) = two_prod(self.hi, o);
        Dd::renorm(p1, p2 + self.lo * o)
    }

    #[inline]
    pub fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self.sub(o.mul_f64(q1));
        let q2 = r.hi / o.hi;
        let r2 = r.sub(o.mul_f64(q2));
        let q3 = r2.hi / o.hi;
        Dd::renorm(q1, q2).add_f64(q3)
    }

    #[inline]
    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    /// exp(self), via argument reduction x = k ln2 + r and a Taylor series
    /// on |r| <= ln2/2. Accurate to ~1e-31 relative for |x| < 300.
    pub fn exp(self) -> Dd {
        const LN2: Dd = Dd { hi: 6.931_471_805_599_452_9e-1, lo: 2.319_046_813_846_299_6e-17 };
        let k = (self.hi / LN2.hi).round();
        let r = self.sub(LN2.mul_f64(k));
        // Taylor: sum r^n / n!
        let mut term = r;
        let mut sum = Dd::from_f64(1.0).add(r);
        for n in 2..30 {
            term = term.mul(r).div(Dd::from_f64(n as f64));
            sum = sum.add(term);
            if term.hi.abs() < 1e-33 * sum.hi.abs() {
                break;
            }
        }
        let scale = 2.0f64.powi(k as i32);
        Dd { hi: sum.hi * scale, lo: sum.lo * scale }
    }

    /// ln(self) by one dd Newton step from the double-precision log.
    pub fn ln(self) -> Dd {
        let y0 = Dd::from_f64(self.hi.ln());
        // y1 = y0 + x e^{-y0} - 1
        let e = self.mul(y0.neg().exp());
        y0.add(e.add_f64(-1.0))
    }

    pub fn sinh(self) -> Dd {
        let e = self.exp();
        e.sub(Dd::from_f64(1.0).div(e)).mul_f64(0.5)
    }

    pub fn cosh(self) -> Dd {
        let e = self.exp();
        e.add(Dd::from_f64(1.0).div(e)).mul_f64(0.5)
    }

    /// Fractional part reduced into [-1/2, 1/2), accurate in the low bits.
    pub fn frac_centered(self) -> Dd {
        let n = self.hi.round();
        // hi - n is exact: both values share a binade neighbourhood
        let r = self.hi - n;
        let mut f = Dd::renorm(r, self.lo);
        if f.hi >= 0.5 {
            f = f.add_f64(-1.0);
        } else if f.hi < -0.5 {
            f = f.add_f64(1.0);
        }
        f
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_i128() {
        let x: i128 = 123_456_789_012_345_678_901_234_567;
        let d = Dd::from_i128(x);
        // value reconstructs exactly from the two limbs
        assert_eq!(d.hi as i128 + d.lo as i128, x);
    }

    #[test]
    fn mul_precision() {
        let a = Dd::from_f64(1.0).div(Dd::from_f64(3.0));
        let b = a.mul_f64(3.0);
        assert!((b.to_f64() - 1.0).abs() < 1e-30);
    }

    #[test]
    fn exp_ln_roundtrip() {
        for &x in &[0.037, 1.0, 2.5, 14.2, -3.1] {
            let d = Dd::from_f64(x);
            let r = d.exp().ln();
            assert!((r.sub(d)).to_f64().abs() < 1e-29, "x={x}");
        }
        // exp(1) vs e
        let e = Dd::from_f64(1.0).exp();
        assert!((e.hi - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn frac_of_large_product() {
        // 10^15 * (f64 pi) mod 1, cross-checked against exact decimal expansion
        let p = Dd::from_i128(1_000_000_000_000_000);
        let t = Dd::from_f64(std::f64::consts::PI);
        let f = p.mul(t).frac_centered();
        assert!((f.to_f64() - 0.11599796346854418516).abs() < 1e-15);
    }
}


//! Gamma-family helpers: log-gamma (Lanczos), signed gamma on the real line,
//! and the upper incomplete gamma function used by the tail envelope.

use crate::dd::Dd;
use std::f64::consts::PI;

// Taylor coefficients of 1/Gamma(1+x) at 0, stored as double-double pairs.
const RECIP_GAMMA_1P: [(f64, f64); 43] = [
    (1.00000000000000000e+00, 0.00000000000000000e+00),
    (5.77215664901532866e-01, -4.94291515243064487e-18),
    (-6.55878071520253902e-01, 2.13718519706853600e-17),
    (-4.20026350340952370e-02, 1.49203062856505051e-18),
    (1.66538611382291479e-01, 1.01891445468420257e-17),
    (-4.21977345555443334e-02, -3.35799926824801341e-18),
    (-9.62197152787697303e-03, -5.30003136883026263e-19),
    (7.21894324666309990e-03, -3.60065370633942833e-19),
    (-1.16516759185906517e-03, 5.65994785388098081e-20),
    (-2.15241674114950975e-04, 2.37586861807293640e-21),
    (1.28050282388116196e-04, -9.35912449919896746e-21),
    (-2.01348547807882387e-05, 3.04887739720373854e-23),
    (-1.25049348214267063e-06, -2.66214092271897989e-23),
    (1.13302723198169593e-06, -4.62223521210486883e-23),
    (-2.05633841697760707e-07, -3.00616016186451344e-24),
    (6.11609510448141609e-09, -2.69345829817130605e-25),
    (5.00200764446922295e-09, -1.53812361405675086e-26),
    (-1.18127457048702004e-09, -1.00523561557162075e-25),
    (1.04342671169110054e-10, -2.92984199568250347e-27),
    (7.78226343990507081e-12, 4.39725555659584800e-28),
    (-3.69680561864220598e-12, 2.70500349217038853e-28),
    (5.10037028745447575e-13, 2.25300146108587812e-29),
    (-2.05832605356650664e-14, -1.47474814919543357e-30),
    (-5.34812253942301782e-15, -1.62083846863565681e-31),
    (1.22677862823826084e-15, -5.07291514602386667e-32),
    (-1.18125930169745883e-16, 6.42225783814968121e-33),
    (1.18669225475160037e-18, -4.20372654942260141e-35),
    (1.41238065531803186e-18, -7.57694670111629379e-35),
    (-2.29874568443537022e-19, 1.33354819170691447e-36),
    (1.71440632192733743e-20, 5.23071515042693490e-38),
    (1.33735173049369309e-22, 2.64340596490792282e-39),
    (-2.05423355176667283e-22, 3.68568924245689534e-39),
    (2.73603004860800013e-23, -2.85993154163977739e-39),
    (-1.73235644591051646e-24, -1.75408835081975981e-40),
    (-2.36061902449928716e-26, -1.26022501699578495e-42),
    (1.86498294171729434e-26, 8.77477561729096511e-43),
    (-2.21809562420719727e-27, 6.80964031504275306e-44),
    (1.29778197494799370e-28, -3.32569246680409291e-45),
    (1.18069747496652841e-30, -4.18494927596651621e-48),
    (-1.12458434927708807e-30, -2.01842815487355000e-47),
    (1.27708517514086610e-31, 1.05356323678787535e-47),
    (-7.39145116961514100e-33, 1.81142532683661454e-49),
    (1.13475025755421581e-35, -4.97910587150133061e-52),
];

/// 1/Gamma(1+x) in double-double precision, |x| <= 2.2.
pub(crate) fn recip_gamma_1p_dd(x: Dd) -> Dd {
    debug_assert!(x.hi.abs() <= 2.2);
    let mut sum = Dd::ZERO;
    // Horner in dd, highest order first
    for &(hi, lo) in RECIP_GAMMA_1P.iter().rev() {
        sum = sum.mul(x).add(Dd { hi, lo });
    }
    sum
}

// Lanczos g = 7, n = 9 coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// ln Gamma(x) for x > 0.
pub fn ln_gamma(x: f64) -> f64 {
    assert!(x > 0.0, "ln_gamma needs x > 0, got {x}");
    if x < 0.5 {
        // reflection
        return (PI / (PI * x).sin()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

/// Gamma(x) on the real line away from the poles (x = 0, -1, -2, ...).
pub fn gamma(x: f64) -> f64 {
    if x > 0.0 {
        ln_gamma(x).exp()
    } else {
        // Gamma(x) = pi / (sin(pi x) Gamma(1 - x))
        PI / ((PI * x).sin() * ln_gamma(1.0 - x).exp())
    }
}

/// Upper incomplete gamma Gamma(a, x) = int_x^inf t^{a-1} e^{-t} dt, x > 0.
///
/// Continued fraction (modified Lentz), adequate for the exponentially small
/// tail envelopes it certifies (x well above |a|).
pub fn upper_gamma(a: f64, x: f64) -> f64 {
    assert!(x > 0.0);
    let tiny = 1e-300;
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / tiny;
    let mut d = 1.0 / b.max(tiny);
    let mut h = d;
    for i in 1..400 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < tiny {
            d = tiny;
        }
        c = b + an / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = d * c;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-x + a * x.ln()).exp() * h
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_known_values() {
        assert!((gamma(1.0) - 1.0).abs() < 1e-14);
        assert!((gamma(0.5) - PI.sqrt()).abs() < 1e-14);
        assert!((gamma(5.0) - 24.0).abs() < 1e-12);
        // Gamma(-0.5) = -2 sqrt(pi)
        assert!((gamma(-0.5) + 2.0 * PI.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn gamma_reflection_consistency() {
        for &x in &[0.1, 0.3, 0.45, 0.49] {
            let lhs = gamma(x) * gamma(1.0 - x);
            let rhs = PI / (PI * x).sin();
            assert!((lhs - rhs).abs() < 1e-10 * rhs.abs());
        }
    }

    #[test]
    fn upper_gamma_integer_a() {
        // Gamma(1, x) = e^{-x}
        let x = 3.7;
        assert!((upper_gamma(1.0, x) - (-x as f64).exp()).abs() < 1e-14);
        // Gamma(2, x) = (x + 1) e^{-x}
        assert!((upper_gamma(2.0, x) - (x + 1.0) * (-x).exp()).abs() < 1e-13);
    }

    #[test]
    fn upper_gamma_vs_quadrature() {
        let (a, x) = (2.6, 4.0);
        // brute-force tail quadrature
        let mut s = 0.0;
        let n = 400_000;
        let hi = 60.0;
        let h = (hi - x) / n as f64;
        for i in 0..n {
            let t = x + (i as f64 + 0.5) * h;
            s += t.powf(a - 1.0) * (-t).exp() * h;
        }
        assert!((upper_gamma(a, x) - s).abs() < 1e-8);
    }
}

//! Scalar coefficient functions of the rotation angle that appear in the
//! Rodrigues-type formulas. Every one is a removable 0/0 form at θ = 0.
//!
//! Coefficients whose closed form is well conditioned once `1 - cos θ` is
//! written as `2 sin²(θ/2)` switch to a two-term Taylor expansion below
//! [`SERIES_THRESHOLD`]. Coefficients whose numerator cancels to higher
//! order (the closed form loses `ε/θ²` or `ε/θ⁴` relative accuracy) use a
//! longer expansion below [`CANCELLATION_THRESHOLD`] or
//! [`DEEP_CANCELLATION_THRESHOLD`].

/// Angle below which the two-term Taylor expansions are used.
pub const SERIES_THRESHOLD: f64 = 1e-4;

/// Switch point for coefficients with second-order cancellation.
pub const CANCELLATION_THRESHOLD: f64 = 1e-2;

/// Switch point for the cubic Christoffel coefficient (fourth-order cancellation).
pub const DEEP_CANCELLATION_THRESHOLD: f64 = 0.3;

/// Evaluates `c[0] + c[1] t² + c[2] t⁴ + ...`.
#[inline]
fn even_poly(t: f64, c: &[f64]) -> f64 {
    let t2 = t * t;
    c.iter().rev().fold(0.0, |acc, &ci| acc * t2 + ci)
}

#[inline]
fn half_sin(t: f64) -> f64 {
    (0.5 * t).sin()
}

/// `1 - cos t`, computed as `2 sin²(t/2)`.
#[inline]
pub fn one_minus_cos(t: f64) -> f64 {
    let s = half_sin(t);
    2.0 * s * s
}

/// `sin t / t`
#[inline]
pub fn sinc(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 - t * t / 6.0
    } else {
        t.sin() / t
    }
}

/// `(1 - cos t) / t²`
#[inline]
pub fn cosc(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        0.5 - t * t / 24.0
    } else {
        one_minus_cos(t) / (t * t)
    }
}

/// `(t cos t - sin t) / t³`
#[inline]
pub fn basis_radial_skew(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[-1.0 / 3.0, 1.0 / 30.0, -1.0 / 840.0])
    } else {
        (t * t.cos() - t.sin()) / (t * t * t)
    }
}

/// `(t sin t - 2(1 - cos t)) / t⁴`
#[inline]
pub fn basis_radial_sym(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[-1.0 / 12.0, 1.0 / 180.0, -1.0 / 6720.0])
    } else {
        let t2 = t * t;
        (t * t.sin() - 2.0 * one_minus_cos(t)) / (t2 * t2)
    }
}

/// `(2 cos t - 2 + t²) / t⁴`, the radial part of the metric.
#[inline]
pub fn metric_radial(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[1.0 / 12.0, -1.0 / 360.0, 1.0 / 20160.0])
    } else {
        let t2 = t * t;
        (t2 - 2.0 * one_minus_cos(t)) / (t2 * t2)
    }
}

/// `2(1 - cos t) / t²`, the isotropic part of the metric.
#[inline]
pub fn metric_iso(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 - t * t / 12.0
    } else {
        2.0 * one_minus_cos(t) / (t * t)
    }
}

/// `(2 cos t - 2 + t²) / (2 t² (cos t - 1))`, the radial part of the inverse metric.
#[inline]
pub fn inverse_metric_radial(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[-1.0 / 12.0, -1.0 / 240.0, -1.0 / 6048.0])
    } else {
        let t2 = t * t;
        let omc = one_minus_cos(t);
        (t2 - 2.0 * omc) / (-2.0 * t2 * omc)
    }
}

/// `t² / (2(1 - cos t))`, the isotropic part of the inverse metric.
#[inline]
pub fn inverse_metric_iso(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 + t * t / 12.0
    } else {
        t * t / (2.0 * one_minus_cos(t))
    }
}

/// `((sin t + t)(cos t - 1) + t² sin t) / (t⁵ (cos t - 1))`, the cubic Christoffel term.
#[inline]
pub fn christoffel_cubic(t: f64) -> f64 {
    if t.abs() < DEEP_CANCELLATION_THRESHOLD {
        even_poly(
            t,
            &[
                1.0 / 90.0,
                -1.0 / 7560.0,
                1.0 / 226800.0,
                1.0 / 59875200.0,
                199.0 / 163459296000.0,
                17.0 / 653837184000.0,
                227.0 / 333456963840000.0,
            ],
        )
    } else {
        let omc = one_minus_cos(t);
        let s = t.sin();
        let t2 = t * t;
        (-(s + t) * omc + t2 * s) / (-t2 * t2 * t * omc)
    }
}

/// `(2 cos t - 2 + t sin t) / (2 t² (1 - cos t))`, the mixed Christoffel term.
#[inline]
pub fn christoffel_mixed(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[-1.0 / 12.0, -1.0 / 720.0, -1.0 / 30240.0])
    } else {
        let omc = one_minus_cos(t);
        (t * t.sin() - 2.0 * omc) / (2.0 * t * t * omc)
    }
}

/// `(sin t - t) / t³`, the trace Christoffel term.
#[inline]
pub fn christoffel_trace(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[-1.0 / 6.0, 1.0 / 120.0, -1.0 / 5040.0])
    } else {
        (t.sin() - t) / (t * t * t)
    }
}

/// `t / (2 sin(t/2))`, the growth factor of transported coordinates.
#[inline]
pub fn half_angle_gain(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        1.0 + t * t / 24.0
    } else {
        t / (2.0 * half_sin(t))
    }
}

/// `(cos t - cos(t/2)) / t²`
#[inline]
pub fn ambient_skew_coeff(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        -3.0 / 8.0 + 5.0 * t * t / 128.0
    } else {
        // cos t - cos(t/2) = -2 sin(3t/4) sin(t/4)
        -2.0 * (0.75 * t).sin() * (0.25 * t).sin() / (t * t)
    }
}

/// `(sin t - 2 sin(t/2)) / t³`
#[inline]
pub fn ambient_sym_coeff(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        -1.0 / 8.0 + t * t / 128.0
    } else {
        // sin t - 2 sin(t/2) = 2 sin(t/2)(cos(t/2) - 1) = -4 sin(t/2) sin²(t/4)
        let q = (0.25 * t).sin();
        -4.0 * half_sin(t) * q * q / (t * t * t)
    }
}

/// `sin(t/2) / t`
#[inline]
pub fn half_sinc(t: f64) -> f64 {
    if t.abs() < SERIES_THRESHOLD {
        0.5 - t * t / 48.0
    } else {
        half_sin(t) / t
    }
}

/// `(1 - (t/2) cot(t/2)) / t²`, the quadratic coefficient of the inverse
/// differential of the exponential map.
#[inline]
pub fn dexp_inv_quadratic(t: f64) -> f64 {
    if t.abs() < CANCELLATION_THRESHOLD {
        even_poly(t, &[1.0 / 12.0, 1.0 / 720.0, 1.0 / 30240.0])
    } else {
        let h = 0.5 * t;
        (1.0 - h * h.cos() / h.sin()) / (t * t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Each pair: (closed form evaluated directly in the naive way at a
    // comfortably large angle, our implementation). The naive forms are
    // accurate away from zero and serve as an independent reference.
    fn naive(name: &str, t: f64) -> f64 {
        let (s, c) = t.sin_cos();
        match name {
            "sinc" => s / t,
            "cosc" => (1.0 - c) / (t * t),
            "basis_radial_skew" => (t * c - s) / t.powi(3),
            "basis_radial_sym" => (t * s - 2.0 * (1.0 - c)) / t.powi(4),
            "metric_radial" => (2.0 * c - 2.0 + t * t) / t.powi(4),
            "metric_iso" => 2.0 * (1.0 - c) / (t * t),
            "inverse_metric_radial" => (2.0 * c - 2.0 + t * t) / (2.0 * t * t * (c - 1.0)),
            "inverse_metric_iso" => t * t / (2.0 * (1.0 - c)),
            "christoffel_cubic" => ((s + t) * (c - 1.0) + t * t * s) / (t.powi(5) * (c - 1.0)),
            "christoffel_mixed" => (2.0 * c - 2.0 + t * s) / (2.0 * t * t * (1.0 - c)),
            "christoffel_trace" => (s - t) / t.powi(3),
            "half_angle_gain" => t / (2.0 * (t / 2.0).sin()),
            "ambient_skew_coeff" => (c - (t / 2.0).cos()) / (t * t),
            "ambient_sym_coeff" => (s - 2.0 * (t / 2.0).sin()) / t.powi(3),
            "half_sinc" => (t / 2.0).sin() / t,
            "dexp_inv_quadratic" => (1.0 - (t / 2.0) / (t / 2.0).tan()) / (t * t),
            _ => unreachable!(),
        }
    }

    fn ours(name: &str, t: f64) -> f64 {
        match name {
            "sinc" => sinc(t),
            "cosc" => cosc(t),
            "basis_radial_skew" => basis_radial_skew(t),
            "basis_radial_sym" => basis_radial_sym(t),
            "metric_radial" => metric_radial(t),
            "metric_iso" => metric_iso(t),
            "inverse_metric_radial" => inverse_metric_radial(t),
            "inverse_metric_iso" => inverse_metric_iso(t),
            "christoffel_cubic" => christoffel_cubic(t),
            "christoffel_mixed" => christoffel_mixed(t),
            "christoffel_trace" => christoffel_trace(t),
            "half_angle_gain" => half_angle_gain(t),
            "ambient_skew_coeff" => ambient_skew_coeff(t),
            "ambient_sym_coeff" => ambient_sym_coeff(t),
            "half_sinc" => half_sinc(t),
            "dexp_inv_quadratic" => dexp_inv_quadratic(t),
            _ => unreachable!(),
        }
    }

    const NAMES: [&str; 16] = [
        "sinc",
        "cosc",
        "basis_radial_skew",
        "basis_radial_sym",
        "metric_radial",
        "metric_iso",
        "inverse_metric_radial",
        "inverse_metric_iso",
        "christoffel_cubic",
        "christoffel_mixed",
        "christoffel_trace",
        "half_angle_gain",
        "ambient_skew_coeff",
        "ambient_sym_coeff",
        "half_sinc",
        "dexp_inv_quadratic",
    ];

    #[test]
    fn matches_naive_forms_at_large_angles() {
        for name in NAMES {
            for &t in &[0.7, 1.3, 2.1, 2.9, 3.1] {
                let (a, b) = (naive(name, t), ours(name, t));
                assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0), "{name} at {t}: {a} vs {b}");
            }
        }
    }

    fn threshold(name: &str) -> f64 {
        match name {
            "basis_radial_skew"
            | "basis_radial_sym"
            | "metric_radial"
            | "inverse_metric_radial"
            | "christoffel_mixed"
            | "christoffel_trace"
            | "dexp_inv_quadratic" => CANCELLATION_THRESHOLD,
            "christoffel_cubic" => DEEP_CANCELLATION_THRESHOLD,
            _ => SERIES_THRESHOLD,
        }
    }

    #[test]
    fn continuous_across_series_threshold() {
        for name in NAMES {
            let t = threshold(name);
            let lo = ours(name, t * (1.0 - 1e-9));
            let hi = ours(name, t * (1.0 + 1e-9));
            assert!((lo - hi).abs() < 1e-10 * lo.abs(), "{name}: {lo} vs {hi}");
        }
    }

    // Reference values at 0.5, 0.9 and 1.5 times each switch point, computed
    // in 50-digit arithmetic from the closed forms.
    #[allow(clippy::excessive_precision)]
    const NEAR_SWITCH: [(&str, [f64; 3]); 16] = [
        ("sinc", [0.99999999958333333339, 0.99999999865000000055, 0.99999999625000000422]),
        ("cosc", [0.49999999989583333334, 0.49999999966250000009, 0.4999999990625000007]),
        ("basis_radial_skew", [-0.33333250000074404727, -0.3333306333411440359, -0.33332583339360093936]),
        ("basis_radial_sym", [-0.083333194444537450362, -0.083332883334309671447, -0.083332083340866790365]),
        ("metric_radial", [0.083333263888919890864, 0.083333108333658779469, 0.08333270833584448777]),
        ("metric_iso", [0.99999999979166666668, 0.99999999932500000018, 0.999999998125000001410]),
        ("inverse_metric_radial", [-0.083333437500103340038, -0.083333670834418157837, -0.083334270841703934966]),
        ("inverse_metric_iso", [1.0000000002083333334, 1.0000000006750000003, 1.0000000018750000021]),
        ("christoffel_cubic", [0.011108137152968329389, 0.011101491692616015242, 0.011084506341137404723]),
        ("christoffel_mixed", [-0.083333368055576223558, -0.083333445833550298058, -0.083333645835007449893]),
        ("christoffel_trace", [-0.16666645833345734123, -0.16666599166796845092, -0.16666479167671127813]),
        ("half_angle_gain", [1.0000000001041666667, 1.0000000003375000001, 1.0000000009375000006]),
        ("ambient_skew_coeff", [-0.37499999990234375001, -0.37499999968359375009, -0.37499999912109375069]),
        ("ambient_sym_coeff", [-0.12499999998046875, -0.12499999993671875001, -0.1249999998242187501]),
        ("half_sinc", [0.49999999994791666667, 0.49999999983125000002, 0.49999999953125000013]),
        ("dexp_inv_quadratic", [0.083333368055576223558, 0.083333445833550298058, 0.083333645835007449893]),
    ];

    #[test]
    fn accurate_on_both_sides_of_switch() {
        for (name, want) in NEAR_SWITCH {
            for (&m, &w) in [0.5, 0.9, 1.5].iter().zip(want.iter()) {
                let t = m * threshold(name);
                let got = ours(name, t);
                assert!((got - w).abs() <= 5e-11 * w.abs(), "{name} at {t}: {got} vs {w}");
            }
        }
    }

    #[test]
    fn limits_at_zero() {
        assert_eq!(sinc(0.0), 1.0);
        assert_eq!(cosc(0.0), 0.5);
        assert_eq!(metric_radial(0.0), 1.0 / 12.0);
        assert_eq!(metric_iso(0.0), 1.0);
        assert_eq!(christoffel_cubic(0.0), 1.0 / 90.0);
        assert_eq!(christoffel_mixed(0.0), -1.0 / 12.0);
        assert_eq!(half_angle_gain(0.0), 1.0);
    }
}

//! The Lobachevsky function and the global bounds derived from it.
//!
//! Everything downstream compares against the same handful of constants: the
//! volumes of the ideal regular tetrahedron and octahedron, the densest
//! horoball-packing ratio, and the cusp-crossing-density bound. They are all
//! computed here from the Lobachevsky function rather than typed in by hand.

use std::sync::OnceLock;

use thiserror::Error;

use crate::num::{real, Real};

/// Absolute tail bound enforced when truncating the Lobachevsky series.
pub const SERIES_TAIL_BOUND: f64 = 1e-13;

const MAX_SERIES_TERMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstantsError {
    #[error("angle must be finite, got {value}")]
    NonFiniteAngle { value: f64 },
    #[error("crossing count {crossings} is below 3, the minimum for a hyperbolic knot")]
    CrossingCountTooSmall { crossings: u64 },
}

/// The derived global bounds, computed once per scalar type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundSet<F> {
    /// Volume of the ideal regular tetrahedron, `2 Λ(π/6)`.
    pub v_tet: F,
    /// Volume of the ideal regular octahedron, `8 Λ(π/4)`.
    pub v_oct: F,
    /// Densest horoball-packing ratio `√3 / (2 v_tet)`; bounds cusp density.
    pub boroczky: F,
    /// Upper bound on cusp crossing density, `boroczky · v_oct`.
    pub dcc_upper: F,
    /// Upper bound on volume density, `v_oct`.
    pub volume_density_upper: F,
}

impl<F: Real> BoundSet<F> {
    fn compute() -> Self {
        let two = real::<F>(2.0);
        let six = real::<F>(6.0);
        let eight = real::<F>(8.0);
        let v_tet = two * lobachevsky(F::PI() / six).expect("finite angle");
        let v_oct = eight * lobachevsky(F::FRAC_PI_4()).expect("finite angle");
        let boroczky = real::<F>(3.0).sqrt() / (two * v_tet);
        BoundSet {
            v_tet,
            v_oct,
            boroczky,
            dcc_upper: boroczky * v_oct,
            volume_density_upper: v_oct,
        }
    }
}

/// The memoized bound set for the scalar type `F`.
pub fn bounds<F: Real>() -> &'static BoundSet<F> {
    F::bound_cell().get_or_init(BoundSet::compute)
}

/// The Lobachevsky function `Λ(θ) = −∫₀^θ ln|2 sin u| du`.
///
/// Odd and π-periodic. The argument is reduced to `[−π/2, π/2]` and the
/// reduced value is summed as
///
/// ```text
/// Λ(θ) = θ − θ ln(2θ) + Σ_{n≥1} ζ(2n) θ^{2n+1} / (n (2n+1) π^{2n})
/// ```
///
/// which is the defining sine series `½ Σ sin(2nθ)/n²` with the slowly
/// convergent part integrated out in closed form. The ratio of consecutive
/// terms is at most `(θ/π)² ≤ 1/4`, so the truncation tail is bounded
/// geometrically and kept below [`SERIES_TAIL_BOUND`] (native precision in
/// practice).
pub fn lobachevsky<F: Real>(theta: F) -> Result<F, ConstantsError> {
    if !theta.is_finite() {
        return Err(ConstantsError::NonFiniteAngle {
            value: theta.to_f64().unwrap_or(f64::NAN),
        });
    }
    let pi = F::PI();
    // Nearest-multiple reduction: r ∈ [−π/2, π/2] and Λ(θ) = Λ(r).
    let turns = (theta / pi).round();
    let r = theta - turns * pi;
    if r == F::zero() {
        return Ok(F::zero());
    }
    let (r, sign) = if r < F::zero() { (-r, -F::one()) } else { (r, F::one()) };
    Ok(sign * reduced_lobachevsky(r))
}

/// Series evaluation on `0 < θ ≤ π/2`.
fn reduced_lobachevsky<F: Real>(theta: F) -> F {
    let zeta = zeta_even_table();
    let x = theta / F::PI();
    let ratio = x * x;
    let mut sum = F::zero();
    // power = θ (θ/π)^{2n}
    let mut power = theta * ratio;
    for (n, &z2n) in zeta.iter().enumerate().skip(1) {
        let denom = F::from_usize(n * (2 * n + 1)).expect("small integer");
        let term = real::<F>(z2n) / denom * power;
        sum = sum + term;
        // Coefficients decrease, so the tail is below term · ratio/(1−ratio).
        let tail = term * ratio / (F::one() - ratio);
        let threshold = real::<F>(SERIES_TAIL_BOUND)
            .max(F::epsilon() * (sum.abs() + theta));
        if tail < threshold {
            break;
        }
        power = power * ratio;
    }
    theta - theta * (real::<F>(2.0) * theta).ln() + sum
}

/// `ζ(2n)` for `n = 1..=MAX_SERIES_TERMS`, index 0 unused.
///
/// Built from `ζ(2) = π²/6` with the convolution recurrence
/// `(2n+1) ζ(2n) = 2 Σ_{j=1}^{n−1} ζ(2j) ζ(2n−2j)`.
fn zeta_even_table() -> &'static [f64; MAX_SERIES_TERMS + 1] {
    static TABLE: OnceLock<[f64; MAX_SERIES_TERMS + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut z = [0.0f64; MAX_SERIES_TERMS + 1];
        z[1] = std::f64::consts::PI * std::f64::consts::PI / 6.0;
        for n in 2..=MAX_SERIES_TERMS {
            let mut acc = 0.0;
            for j in 1..n {
                acc += z[j] * z[n - j];
            }
            z[n] = 2.0 * acc / (2 * n + 1) as f64;
        }
        z
    })
}

/// Upper bound `(9c/2)(1 − 1/c)²` on the cusp volume of a knot with `c`
/// crossings. Defined for `c ≥ 3`; the value per crossing stays below 4.5.
pub fn knot_cusp_volume_bound<F: Real>(crossings: u64) -> Result<F, ConstantsError> {
    if crossings < 3 {
        return Err(ConstantsError::CrossingCountTooSmall { crossings });
    }
    let c = F::from_u64(crossings).expect("crossing count fits scalar");
    let defect = F::one() - F::one() / c;
    Ok(real::<F>(4.5) * c * defect * defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// Independent quadrature oracle for −∫₀^θ ln|2 sin u| du on [0, π/2].
    ///
    /// The log singularity at 0 is integrated exactly
    /// (∫ ln 2u du = u ln 2u − u) and the smooth remainder ln(sin u / u) is
    /// handled by composite Simpson.
    fn lobachevsky_quadrature(theta: f64) -> f64 {
        assert!((0.0..=std::f64::consts::FRAC_PI_2 + 1e-15).contains(&theta));
        if theta == 0.0 {
            return 0.0;
        }
        let smooth = |u: f64| {
            if u < 1e-8 {
                // ln(sin u / u) = −u²/6 − u⁴/180 − …
                -u * u / 6.0
            } else {
                (u.sin() / u).ln()
            }
        };
        let n = 16_384; // even
        let h = theta / n as f64;
        let mut acc = smooth(0.0) + smooth(theta);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * smooth(i as f64 * h);
        }
        let smooth_integral = acc * h / 3.0;
        -(theta * (2.0 * theta).ln() - theta) - smooth_integral
    }

    #[test]
    fn zero_maps_to_zero() {
        assert_eq!(lobachevsky(0.0f64).unwrap(), 0.0);
    }

    #[test]
    fn vanishes_at_half_pi() {
        let v = lobachevsky(std::f64::consts::FRAC_PI_2).unwrap();
        assert!(v.abs() <= 1e-12, "Λ(π/2) = {v}");
        let v = lobachevsky(std::f64::consts::PI).unwrap();
        assert!(v.abs() <= 1e-12, "Λ(π) = {v}");
    }

    #[test]
    fn matches_quadrature_oracle() {
        // Frozen oracle values, cross-checked live below.
        let cases = [
            (std::f64::consts::PI / 6.0, 0.507_470_803_204_826_8),
            (std::f64::consts::FRAC_PI_4, 0.457_982_797_088_609_5),
            (0.3, 0.454_750_398_208_409),
            (1.2, 0.248_399_651_018_478),
        ];
        for (theta, frozen) in cases {
            let series = lobachevsky(theta).unwrap();
            assert_abs_diff_eq!(series, frozen, epsilon = 1e-12);
            assert_abs_diff_eq!(series, lobachevsky_quadrature(theta), epsilon = 1e-11);
        }
    }

    #[test]
    fn quadrature_matches_on_a_sweep() {
        for i in 1..=40 {
            let theta = std::f64::consts::FRAC_PI_2 * i as f64 / 40.0;
            let series = lobachevsky(theta).unwrap();
            assert_abs_diff_eq!(series, lobachevsky_quadrature(theta), epsilon = 1e-10);
        }
    }

    #[test]
    fn odd_and_pi_periodic() {
        // Deterministic pseudo-random sweep of 1000 angles.
        let mut state = 0x2545f4914f6cdd1du64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..1000 {
            let theta = (next() - 0.5) * 60.0;
            let l = lobachevsky(theta).unwrap();
            let minus = lobachevsky(-theta).unwrap();
            let shifted = lobachevsky(theta + std::f64::consts::PI).unwrap();
            assert_abs_diff_eq!(l, -minus, epsilon = 1e-12);
            assert_abs_diff_eq!(l, shifted, epsilon = 1e-12);
        }
    }

    #[test]
    fn duplication_identity() {
        for i in 0..200 {
            let theta = -1.5 + 3.0 * i as f64 / 199.0;
            let lhs = lobachevsky(2.0 * theta).unwrap();
            let rhs = 2.0 * lobachevsky(theta).unwrap()
                + 2.0 * lobachevsky(theta + std::f64::consts::FRAC_PI_2).unwrap();
            assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
        }
    }

    #[test]
    fn rejects_non_finite_angles() {
        assert!(lobachevsky(f64::NAN).is_err());
        assert!(lobachevsky(f64::INFINITY).is_err());
    }

    #[test]
    fn bound_set_digits() {
        let b = bounds::<f64>();
        assert_abs_diff_eq!(b.v_tet, 1.014_941_606_409_653_6, epsilon = 1e-12);
        assert_abs_diff_eq!(b.v_oct, 3.663_862_376_708_876, epsilon = 1e-12);
        assert!((1.01494..=1.01495).contains(&b.v_tet));
        assert!((3.66386..=3.66387).contains(&b.v_oct));
        assert_abs_diff_eq!(b.boroczky, 0.853_276_088_314_080_8, epsilon = 1e-12);
        assert_abs_diff_eq!(b.dcc_upper, 3.126_286_156_919_28, epsilon = 1e-11);
        assert_eq!(b.volume_density_upper, b.v_oct);
        // Derived relations hold exactly as computed.
        assert_eq!(b.dcc_upper, b.boroczky * b.v_oct);
        assert_eq!(b.boroczky, 3.0f64.sqrt() / (2.0 * b.v_tet));
    }

    #[test]
    fn bound_set_is_cached() {
        let a = bounds::<f64>();
        let b = bounds::<f64>();
        assert!(std::ptr::eq(a, b));
        assert_eq!(a, b);
    }

    #[test]
    fn works_in_single_precision() {
        let l = lobachevsky(std::f32::consts::PI / 6.0).unwrap();
        assert_abs_diff_eq!(l, 0.507_470_8f32, epsilon = 1e-6);
        let b = bounds::<f32>();
        assert_abs_diff_eq!(b.v_oct, 3.663_862_4f32, epsilon = 1e-5);
    }

    #[test]
    fn knot_cusp_volume_bound_values() {
        assert_abs_diff_eq!(knot_cusp_volume_bound::<f64>(3).unwrap(), 6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(knot_cusp_volume_bound::<f64>(4).unwrap(), 10.125, epsilon = 1e-12);
        assert!(knot_cusp_volume_bound::<f64>(2).is_err());
        for c in [3u64, 4, 7, 100, 10_000, 1_000_000] {
            let per_crossing = knot_cusp_volume_bound::<f64>(c).unwrap() / c as f64;
            assert!(per_crossing < 4.5, "c = {c}: {per_crossing}");
        }
    }
}

//! Belted-sum calculus on augmented cross tangle links.
//!
//! Gluing two such link complements along the totally geodesic
//! twice-punctured disks bounded by their belt components adds volumes, and
//! — provided neither side pokes across the disk — combines the tangle
//! cusps by shrinking the larger-meridian side to match the smaller: with
//! `m₁ ≤ m₂`,
//!
//! ```text
//! m₃ = m₁,   V₃ = V₁ + (m₁/m₂)² V₂,   vol₃ = vol₁ + vol₂.
//! ```
//!
//! Summing `k` copies of one link with `p` of the other gives the density
//!
//! ```text
//! f(p/k) = (V₁ + t (m₁/m₂)² V₂) / (vol₁ + t vol₂),   t = p/k,
//! ```
//!
//! a monotone fractional-linear function sweeping from `cd₁` at `t = 0` to
//! `(m₁/m₂)² cd₂` as `t → ∞`. Because rationals `p/k` with `k + p` odd are
//! dense, every density strictly between the endpoints is approached by a
//! two-component link, hence by knots after high Dehn filling of the belt;
//! [`sample_parameters`] makes that effective via continued-fraction
//! approximation with a parity fix-up.

use thiserror::Error;

use crate::linkmodel::{CuspRole, LinkFlag, LinkGeometry};
use crate::num::{show, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BeltSumError {
    #[error("input {which} has not been verified poking-free")]
    PokingUnverified { which: &'static str },
    #[error("{field} must be positive and finite, got {value}")]
    NonPositiveField { field: &'static str, value: f64 },
    #[error("multiplicities k = p = 0: the sum must contain at least one copy")]
    EmptySum,
    #[error("parameter t = {value} is negative")]
    NegativeParameter { value: f64 },
    #[error("target {value} lies outside the open density interval ({lo}, {hi})")]
    TargetOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("tolerance must be positive, got {value}")]
    NonPositiveTolerance { value: f64 },
    #[error("no odd-parity approximation found within tolerance {eps}")]
    SamplerExhausted { eps: f64 },
    #[error("link `{name}` has no tangle cusp with a meridian")]
    NoTangleCusp { name: String },
}

/// Measured data of one augmented cross tangle link.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TangleLinkData<F> {
    /// Volume of the link complement.
    pub volume: F,
    /// Volume of the tangle cusp, maximized first in its own complement.
    pub tangle_cusp_volume: F,
    /// Meridian length on the maximal tangle cusp.
    pub meridian: F,
    /// Volume of the belt cusp, when recorded.
    pub belt_cusp_volume: Option<F>,
    /// Whether the link has been verified not to poke across its disk.
    pub no_poking: bool,
}

impl<F: Real> TangleLinkData<F> {
    pub fn new(
        volume: F,
        tangle_cusp_volume: F,
        meridian: F,
        no_poking: bool,
    ) -> Result<Self, BeltSumError> {
        let data = TangleLinkData {
            volume,
            tangle_cusp_volume,
            meridian,
            belt_cusp_volume: None,
            no_poking,
        };
        data.check_fields()?;
        Ok(data)
    }

    /// Extract the tangle data from a full geometry record: the tangle cusp
    /// is the one tagged `tangle` with the smallest maximization index, and
    /// poking-freeness is read off the link's flags.
    pub fn from_geometry(geometry: &LinkGeometry<F>) -> Result<Self, BeltSumError> {
        let tangle = geometry
            .cusps
            .iter()
            .filter(|c| c.role == CuspRole::Tangle && c.meridian.is_some())
            .min_by_key(|c| c.maximization_index)
            .ok_or_else(|| BeltSumError::NoTangleCusp { name: geometry.name.clone() })?;
        let belt_total = geometry
            .cusps
            .iter()
            .filter(|c| c.role == CuspRole::Belt)
            .fold(F::zero(), |acc, c| acc + c.cusp_volume);
        let data = TangleLinkData {
            volume: geometry.volume,
            tangle_cusp_volume: tangle.cusp_volume,
            meridian: tangle.meridian.expect("filtered on presence"),
            belt_cusp_volume: (belt_total > F::zero()).then_some(belt_total),
            no_poking: geometry.flags.contains(&LinkFlag::NoPoking),
        };
        data.check_fields()?;
        Ok(data)
    }

    /// Restricted cusp density of the tangle cusp.
    pub fn cusp_density(&self) -> F {
        self.tangle_cusp_volume / self.volume
    }

    fn check_fields(&self) -> Result<(), BeltSumError> {
        let positive = |field, value: F| {
            if value.is_finite() && value > F::zero() {
                Ok(())
            } else {
                Err(BeltSumError::NonPositiveField { field, value: show(value) })
            }
        };
        positive("volume", self.volume)?;
        positive("tangle_cusp_volume", self.tangle_cusp_volume)?;
        positive("meridian", self.meridian)?;
        if let Some(belt) = self.belt_cusp_volume {
            if !(belt.is_finite() && belt >= F::zero()) {
                return Err(BeltSumError::NonPositiveField {
                    field: "belt_cusp_volume",
                    value: show(belt),
                });
            }
        }
        Ok(())
    }
}

/// Data of an iterated belted sum of `k` copies of one link and `p` of the
/// other.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeltSumResult<F> {
    pub volume: F,
    pub tangle_cusp_volume: F,
    pub meridian: F,
    /// Copies of the smaller-meridian input.
    pub k: u64,
    /// Copies of the larger-meridian input.
    pub p: u64,
}

impl<F: Real> BeltSumResult<F> {
    /// Restricted cusp density of the combined tangle cusp.
    pub fn density(&self) -> F {
        self.tangle_cusp_volume / self.volume
    }
}

/// Which input contributes an interval endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EndpointSource {
    /// Density of the smaller-meridian input, reached as its copies dominate.
    SmallMeridianDensity,
    /// Density of the larger-meridian input scaled by `(m₁/m₂)²`.
    ScaledLargeMeridianDensity,
}

impl EndpointSource {
    pub fn describe(self) -> &'static str {
        match self {
            EndpointSource::SmallMeridianDensity => {
                "cusp density of the smaller-meridian summand"
            }
            EndpointSource::ScaledLargeMeridianDensity => {
                "cusp density of the larger-meridian summand scaled by (m1/m2)^2"
            }
        }
    }
}

/// Closed interval of knot cusp densities reachable by iterated sums.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityInterval<F> {
    pub lo: F,
    pub hi: F,
    pub lo_source: EndpointSource,
    pub hi_source: EndpointSource,
}

/// Inputs in canonical order: meridian of the first at most that of the
/// second, ties keeping the argument order.
fn ordered<'a, F: Real>(
    a: &'a TangleLinkData<F>,
    b: &'a TangleLinkData<F>,
) -> (&'a TangleLinkData<F>, &'a TangleLinkData<F>) {
    if b.meridian < a.meridian {
        (b, a)
    } else {
        (a, b)
    }
}

/// Squared meridian ratio `(m₁/m₂)²` for ordered inputs.
fn shrink_factor<F: Real>(small: &TangleLinkData<F>, large: &TangleLinkData<F>) -> F {
    let ratio = small.meridian / large.meridian;
    ratio * ratio
}

fn require_no_poking<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
) -> Result<(), BeltSumError> {
    a.check_fields()?;
    b.check_fields()?;
    if !a.no_poking {
        return Err(BeltSumError::PokingUnverified { which: "a" });
    }
    if !b.no_poking {
        return Err(BeltSumError::PokingUnverified { which: "b" });
    }
    Ok(())
}

/// Belted sum of two augmented cross tangle links.
pub fn belted_sum<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
) -> Result<BeltSumResult<F>, BeltSumError> {
    iterated_belt_sum(a, b, 1, 1)
}

/// Belted sum of `k` copies of `a` and `p` copies of `b`.
///
/// The inputs are reordered so the combined meridian is the smaller one;
/// `k` counts copies of the smaller-meridian input in the result.
pub fn iterated_belt_sum<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
    k: u64,
    p: u64,
) -> Result<BeltSumResult<F>, BeltSumError> {
    require_no_poking(a, b)?;
    if k == 0 && p == 0 {
        return Err(BeltSumError::EmptySum);
    }
    let (small, large) = ordered(a, b);
    let (k, p) = if std::ptr::eq(small, a) { (k, p) } else { (p, k) };
    let kf = F::from_u64(k).expect("multiplicity fits scalar");
    let pf = F::from_u64(p).expect("multiplicity fits scalar");
    let volume = kf * small.volume + pf * large.volume;
    // With no copy of the smaller-meridian link present nothing shrinks.
    let (tangle_cusp_volume, meridian) = if k == 0 {
        (pf * large.tangle_cusp_volume, large.meridian)
    } else {
        (
            kf * small.tangle_cusp_volume
                + pf * shrink_factor(small, large) * large.tangle_cusp_volume,
            small.meridian,
        )
    };
    Ok(BeltSumResult { volume, tangle_cusp_volume, meridian, k, p })
}

/// Density `f(t)` of the continuum of iterated sums, `t` copies of the
/// larger-meridian input per copy of the smaller-meridian one.
///
/// `f(0)` is the smaller-meridian input's density; as `t → ∞` the value
/// tends to `(m₁/m₂)²` times the other input's density.
pub fn density_function<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
    t: F,
) -> Result<F, BeltSumError> {
    a.check_fields()?;
    b.check_fields()?;
    if t.is_nan() || t < F::zero() {
        return Err(BeltSumError::NegativeParameter { value: show(t) });
    }
    let (small, large) = ordered(a, b);
    let scale = shrink_factor(small, large);
    Ok((small.tangle_cusp_volume + t * scale * large.tangle_cusp_volume)
        / (small.volume + t * large.volume))
}

/// The two density endpoints of `f` on `[0, ∞)`, unsorted:
/// `(f(0), lim_{t→∞} f(t))`.
fn endpoint_pair<F: Real>(a: &TangleLinkData<F>, b: &TangleLinkData<F>) -> (F, F) {
    let (small, large) = ordered(a, b);
    (
        small.cusp_density(),
        shrink_factor(small, large) * large.cusp_density(),
    )
}

/// Solve `f(t) = y` in closed form. `y` must lie strictly between the
/// endpoints of `f`.
pub fn invert_density<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
    y: F,
) -> Result<F, BeltSumError> {
    a.check_fields()?;
    b.check_fields()?;
    let (at_zero, at_infinity) = endpoint_pair(a, b);
    let (lo, hi) = if at_zero <= at_infinity {
        (at_zero, at_infinity)
    } else {
        (at_infinity, at_zero)
    };
    if !(y > lo && y < hi) {
        return Err(BeltSumError::TargetOutOfRange {
            value: show(y),
            lo: show(lo),
            hi: show(hi),
        });
    }
    let (small, large) = ordered(a, b);
    let scale = shrink_factor(small, large);
    Ok((small.tangle_cusp_volume - y * small.volume)
        / (y * large.volume - scale * large.tangle_cusp_volume))
}

/// The closed interval of cusp densities filled by the family of iterated
/// sums (and hence by knots after high filling of the belt).
pub fn knot_density_interval<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
) -> Result<DensityInterval<F>, BeltSumError> {
    require_no_poking(a, b)?;
    let (at_zero, at_infinity) = endpoint_pair(a, b);
    Ok(if at_zero <= at_infinity {
        DensityInterval {
            lo: at_zero,
            hi: at_infinity,
            lo_source: EndpointSource::SmallMeridianDensity,
            hi_source: EndpointSource::ScaledLargeMeridianDensity,
        }
    } else {
        DensityInterval {
            lo: at_infinity,
            hi: at_zero,
            lo_source: EndpointSource::ScaledLargeMeridianDensity,
            hi_source: EndpointSource::SmallMeridianDensity,
        }
    })
}

/// Find positive multiplicities `(k, p)` with `k + p` odd whose iterated
/// sum has density within `eps` of the target.
///
/// The target is converted to `t* = f⁻¹(y)` and approximated by
/// continued-fraction convergents and semiconvergents of `t*`, taking the
/// first (smallest) approximant of odd parity that meets the tolerance;
/// when the expansion bottoms out exactly, neighbors of the final
/// convergent approach it from either side and supply the parity fix-up.
pub fn sample_parameters<F: Real>(
    a: &TangleLinkData<F>,
    b: &TangleLinkData<F>,
    y: F,
    eps: F,
) -> Result<(u64, u64), BeltSumError> {
    require_no_poking(a, b)?;
    if eps.is_nan() || eps <= F::zero() {
        return Err(BeltSumError::NonPositiveTolerance { value: show(eps) });
    }
    let t = invert_density(a, b, y)?;
    let (small, large) = ordered(a, b);
    let swapped = !std::ptr::eq(small, a);

    let within = |p: u64, k: u64| -> bool {
        let ratio = F::from_u64(p).expect("fits") / F::from_u64(k).expect("fits");
        match density_function(small, large, ratio) {
            Ok(v) => (v - y).abs() < eps,
            Err(_) => false,
        }
    };
    let found = approximate_with_odd_parity(t.to_f64().unwrap_or(f64::NAN), &within)
        .ok_or(BeltSumError::SamplerExhausted { eps: show(eps) })?;
    let (p, k) = found;
    // Report multiplicities in the caller's argument order.
    Ok(if swapped { (p, k) } else { (k, p) })
}

const DENOMINATOR_CAP: u64 = 1 << 52;

/// Search convergents and semiconvergents of `t` for a fraction `p/k`
/// (`p, k ≥ 1`, `p + k` odd) accepted by the predicate. Returns `(p, k)`.
fn approximate_with_odd_parity(
    t: f64,
    accept: &dyn Fn(u64, u64) -> bool,
) -> Option<(u64, u64)> {
    if !t.is_finite() || t <= 0.0 {
        return None;
    }
    // Continued-fraction terms of t.
    let mut terms: Vec<u64> = Vec::new();
    let mut x = t;
    for _ in 0..64 {
        let whole = x.floor();
        if whole >= DENOMINATOR_CAP as f64 {
            break;
        }
        terms.push(whole as u64);
        let frac = x - whole;
        if frac < 1e-14 {
            break;
        }
        x = frac.recip();
    }
    // Walk the semiconvergents of each term: candidates
    // (h_prev + j h_cur) / (q_prev + j q_cur), j = 1..=a_i, where the pairs
    // hold the two preceding convergents (bootstrapped with 0/1 and 1/0).
    let (mut h_prev, mut q_prev) = (0u64, 1u64);
    let (mut h_cur, mut q_cur) = (1u64, 0u64);
    for (i, &a) in terms.iter().enumerate() {
        if i > 0 && a == 0 {
            break;
        }
        if let Some(hit) = scan_run(h_prev, q_prev, h_cur, q_cur, a, accept) {
            return Some(hit);
        }
        let h_next = h_prev.checked_add(a.checked_mul(h_cur)?)?;
        let q_next = q_prev.checked_add(a.checked_mul(q_cur)?)?;
        (h_prev, q_prev) = (h_cur, q_cur);
        (h_cur, q_cur) = (h_next, q_next);
        if q_cur > DENOMINATOR_CAP || h_cur > DENOMINATOR_CAP {
            return None;
        }
    }
    // The expansion ended at the convergent h_cur/q_cur ≈ t. Approach it
    // with (n h_cur + h_prev)/(n q_cur + q_prev), n unbounded.
    scan_run(h_prev, q_prev, h_cur, q_cur, u64::MAX, accept)
}

/// Scan candidates `(h0 + j h1)/(q0 + j q1)` for `j = 1..=len`, taking the
/// smallest accepted `j` of odd parity. The candidates approach their limit
/// monotonically, so the acceptance region is an upward-closed set of `j`
/// and binary search finds its boundary.
fn scan_run(
    h0: u64,
    q0: u64,
    h1: u64,
    q1: u64,
    len: u64,
    accept: &dyn Fn(u64, u64) -> bool,
) -> Option<(u64, u64)> {
    if len == 0 {
        return None;
    }
    let candidate = |j: u64| -> Option<(u64, u64)> {
        let p = h0.checked_add(j.checked_mul(h1)?)?;
        let k = q0.checked_add(j.checked_mul(q1)?)?;
        (p <= DENOMINATOR_CAP && k <= DENOMINATOR_CAP).then_some((p, k))
    };
    let valid = |pk: (u64, u64)| pk.0 >= 1 && pk.1 >= 1 && !(pk.0 + pk.1).is_multiple_of(2);
    // Exponential probe for some accepted j ≤ len, then bisect the first.
    let mut hi = 1u64.min(len);
    let mut probed = false;
    while let Some(pk) = candidate(hi) {
        if accept(pk.0, pk.1) {
            probed = true;
            break;
        }
        if hi >= len {
            return None;
        }
        hi = (hi.saturating_mul(2)).min(len);
    }
    if !probed {
        return None;
    }
    let mut lo = 1u64;
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        match candidate(mid) {
            Some(pk) if accept(pk.0, pk.1) => hi = mid,
            _ => lo = mid + 1,
        }
    }
    // First accepted j is `lo`; advance to the first odd-parity candidate.
    for j in lo..=len.min(lo.saturating_add(3)) {
        if let Some(pk) = candidate(j) {
            if valid(pk) && accept(pk.0, pk.1) {
                return Some(pk);
            }
        }
    }
    None
}

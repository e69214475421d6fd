//! Parametric link families and their cusp crossing densities.
//!
//! Three families realize the density intervals the registry documents:
//!
//! * twist knots, whose per-crossing cusp volume decays to zero;
//! * the octahedral chainmail links `L(n,k)` / `L'(n,k)`, built from
//!   `2n(k−1)` ideal regular octahedra, whose cusp crossing densities
//!   approach 3 from below;
//! * the cover-and-twist family `J(n,m)`: an odd `n`-fold cyclic cover of
//!   an augmented link followed by `m` full twists through the belt disk,
//!   which sweeps the densities `(0, d)` with `d` fixed by the seed.

use thiserror::Error;

use crate::constants::bounds;
use crate::linkmodel::{CuspRole, LinkGeometry, Registry, RegistryError};
use crate::num::{show, Real};

#[derive(Debug, Error)]
pub enum FamilyError {
    #[error("twist parameter q must be at least 1, got {q}")]
    TwistParameter { q: u64 },
    #[error("octahedral parameters must satisfy n, k >= 2, got n = {n}, k = {k}")]
    OctahedralParameters { n: u64, k: u64 },
    #[error("cover degree n must be odd to keep the link an augmented knot, got {n}")]
    EvenCoverDegree { n: u64 },
    #[error("seed crossing number must be at least 5, got {crossings}")]
    SeedTooSmall { crossings: u64 },
    #[error("seed cusp volume {field} must be positive, got {value}")]
    SeedCuspVolume { field: &'static str, value: f64 },
    #[error("target {value} lies outside the open interval (0, {bound})")]
    TargetOutOfRange { value: f64, bound: f64 },
    #[error("tolerance must be positive, got {value}")]
    NonPositiveTolerance { value: f64 },
    #[error("no (n, m) pair reaches the target within tolerance {eps}")]
    SamplerExhausted { eps: f64 },
    #[error("link `{name}` does not split into tangle and belt cusp volumes")]
    SeedRoles { name: String },
    #[error(transparent)]
    Registry(#[from] RegistryError),
}

/// One family member's measured quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilyPoint<F> {
    pub crossing_number: u64,
    pub volume: Option<F>,
    pub cusp_volume: Option<F>,
    pub d_cc: F,
}

/// Seed data for the cover-and-twist family: the two cusp volumes of an
/// augmented link (tangle first, belt second) and its crossing number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverTwistSeed<F> {
    pub tangle_cusp_volume: F,
    pub belt_cusp_volume: F,
    pub crossing_number: u64,
}

impl<F: Real> CoverTwistSeed<F> {
    pub fn new(
        tangle_cusp_volume: F,
        belt_cusp_volume: F,
        crossing_number: u64,
    ) -> Result<Self, FamilyError> {
        if !(tangle_cusp_volume.is_finite() && tangle_cusp_volume > F::zero()) {
            return Err(FamilyError::SeedCuspVolume {
                field: "tangle",
                value: show(tangle_cusp_volume),
            });
        }
        if !(belt_cusp_volume.is_finite() && belt_cusp_volume > F::zero()) {
            return Err(FamilyError::SeedCuspVolume {
                field: "belt",
                value: show(belt_cusp_volume),
            });
        }
        if crossing_number < 5 {
            return Err(FamilyError::SeedTooSmall { crossings: crossing_number });
        }
        Ok(CoverTwistSeed { tangle_cusp_volume, belt_cusp_volume, crossing_number })
    }

    /// Build a seed from a geometry record carrying tangle- and belt-tagged
    /// cusps and a crossing number.
    pub fn from_geometry(geometry: &LinkGeometry<F>) -> Result<Self, FamilyError> {
        let sum_role = |role: CuspRole| {
            geometry
                .cusps
                .iter()
                .filter(|c| c.role == role)
                .fold(F::zero(), |acc, c| acc + c.cusp_volume)
        };
        let tangle = sum_role(CuspRole::Tangle);
        let belt = sum_role(CuspRole::Belt);
        if tangle <= F::zero() || belt <= F::zero() {
            return Err(FamilyError::SeedRoles { name: geometry.name.clone() });
        }
        let crossings = geometry
            .crossing_number
            .ok_or_else(|| FamilyError::SeedRoles { name: geometry.name.clone() })?;
        Self::new(tangle, belt, crossings)
    }

    /// The density ceiling `d = (V₁ + V₂)/(c − 4)` of the family.
    pub fn density_ceiling(&self) -> F {
        let c = F::from_u64(self.crossing_number).expect("crossing count fits scalar");
        (self.tangle_cusp_volume + self.belt_cusp_volume) / (c - F::from_u64(4).unwrap())
    }
}

/// Selector for one member of a parametric family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FamilySpec<F> {
    Twist { q: u64 },
    Octahedral { n: u64, k: u64, prime: bool },
    CoverTwist { seed: CoverTwistSeed<F>, n: u64, m: u64 },
}

/// Evaluate a family member. The twist family reads its surrogate cusp
/// volume from the registry.
pub fn eval<F: Real>(
    registry: &Registry<F>,
    spec: &FamilySpec<F>,
) -> Result<FamilyPoint<F>, FamilyError> {
    match *spec {
        FamilySpec::Twist { q } => twist_knot(registry, q),
        FamilySpec::Octahedral { n, k, prime } => octahedral_link(n, k, prime),
        FamilySpec::CoverTwist { ref seed, n, m } => cover_twist(seed, n, m),
    }
}

/// Twist knot with `q` full twists: `2q + 2` crossings (`q = 1` is the
/// figure eight).
///
/// The cusp volume converges to that of one maximal cusp of the Whitehead
/// link, so the registry's `whitehead_link` surrogate serves as the fixed
/// numerator: the reported density is a stand-in that decays like the true
/// one and shares its zero limit, not a measured value.
pub fn twist_knot<F: Real>(registry: &Registry<F>, q: u64) -> Result<FamilyPoint<F>, FamilyError> {
    if q < 1 {
        return Err(FamilyError::TwistParameter { q });
    }
    let whitehead = registry.geometry("whitehead_link")?;
    let cusp_volume = whitehead.total_cusp_volume();
    let crossing_number = 2 * q + 2;
    let c = F::from_u64(crossing_number).expect("crossing count fits scalar");
    Ok(FamilyPoint {
        crossing_number,
        volume: None,
        cusp_volume: Some(cusp_volume),
        d_cc: cusp_volume / c,
    })
}

/// Octahedral chainmail link `L(n,k)` (or `L'(n,k)` with `prime`): volume
/// `2n(k−1) v_oct`, cusp volume `6n(k−1)` from the standard packing, and
/// `2nk + 2k` crossings (two more for the primed variant).
pub fn octahedral_link<F: Real>(n: u64, k: u64, prime: bool) -> Result<FamilyPoint<F>, FamilyError> {
    if n < 2 || k < 2 {
        return Err(FamilyError::OctahedralParameters { n, k });
    }
    let octahedra = 2 * n * (k - 1);
    let crossing_number = 2 * n * k + 2 * k + if prime { 2 } else { 0 };
    let octf = F::from_u64(octahedra).expect("count fits scalar");
    let c = F::from_u64(crossing_number).expect("crossing count fits scalar");
    let cusp_volume = F::from_u64(3).unwrap() * octf;
    Ok(FamilyPoint {
        crossing_number,
        volume: Some(octf * bounds::<F>().v_oct),
        cusp_volume: Some(cusp_volume),
        d_cc: cusp_volume / c,
    })
}

/// Cover-and-twist link `J(n, m)`: the odd `n`-fold cyclic cover of the
/// seed has cusp volume `n(V₁+V₂)` and `n(c−4)+4` crossings; `m` full
/// twists through the belt disk add `2m` crossings without changing the
/// complement.
pub fn cover_twist<F: Real>(
    seed: &CoverTwistSeed<F>,
    n: u64,
    m: u64,
) -> Result<FamilyPoint<F>, FamilyError> {
    if n.is_multiple_of(2) {
        return Err(FamilyError::EvenCoverDegree { n });
    }
    // Re-validate in case the seed was built by hand.
    let seed = CoverTwistSeed::new(
        seed.tangle_cusp_volume,
        seed.belt_cusp_volume,
        seed.crossing_number,
    )?;
    let crossing_number = n * (seed.crossing_number - 4) + 4 + 2 * m;
    let nf = F::from_u64(n).expect("cover degree fits scalar");
    let c = F::from_u64(crossing_number).expect("crossing count fits scalar");
    let cusp_volume = nf * (seed.tangle_cusp_volume + seed.belt_cusp_volume);
    Ok(FamilyPoint {
        crossing_number,
        volume: None,
        cusp_volume: Some(cusp_volume),
        d_cc: cusp_volume / c,
    })
}

/// Find `(n, m)` with `n` odd whose cover-and-twist density is within
/// `eps` of the target `y ∈ (0, d)`.
///
/// For each odd `n` the exact twist count solving `d_cc = y` is
/// `m* = (n(V₁+V₂) − y(n(c−4)+4)) / (2y)`; rounding `m*` costs `O(1/n)` in
/// density, so scanning odd `n` upward terminates.
pub fn cover_twist_sample<F: Real>(
    seed: &CoverTwistSeed<F>,
    y: F,
    eps: F,
) -> Result<(u64, u64), FamilyError> {
    let d = seed.density_ceiling();
    if !(y > F::zero() && y < d) {
        return Err(FamilyError::TargetOutOfRange { value: show(y), bound: show(d) });
    }
    if eps.is_nan() || eps <= F::zero() {
        return Err(FamilyError::NonPositiveTolerance { value: show(eps) });
    }
    let total = seed.tangle_cusp_volume + seed.belt_cusp_volume;
    let cm4 = F::from_u64(seed.crossing_number - 4).unwrap();
    let four = F::from_u64(4).unwrap();
    let two = F::from_u64(2).unwrap();
    let mut n = 1u64;
    const MAX_COVER_DEGREE: u64 = 1 << 40;
    while n < MAX_COVER_DEGREE {
        let nf = F::from_u64(n).unwrap();
        let exact_m = (nf * total - y * (nf * cm4 + four)) / (two * y);
        if exact_m >= F::zero() {
            let m = exact_m.round().max(F::zero()).to_u64().unwrap_or(u64::MAX);
            if m != u64::MAX {
                let point = cover_twist(seed, n, m)?;
                if (point.d_cc - y).abs() < eps {
                    return Ok((n, m));
                }
            }
        }
        n += 2;
    }
    Err(FamilyError::SamplerExhausted { eps: show(eps) })
}

/// A density interval with its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedInterval<F> {
    pub name: &'static str,
    pub lo: F,
    pub hi: F,
    pub provenance: String,
}

/// The four density intervals the registry certifies as filled: cusp
/// density of links and of knots, and cusp crossing density of
/// two-component links and of all links.
pub fn interval_endpoints<F: Real>(
    registry: &Registry<F>,
) -> Result<Vec<NamedInterval<F>>, FamilyError> {
    let b = bounds::<F>();
    let f2 = registry.geometry("F2_limit")?;
    let f2_tangle = f2
        .cusps
        .iter()
        .filter(|c| c.role == CuspRole::Tangle)
        .fold(F::zero(), |acc, c| acc + c.cusp_volume);
    let knots_hi = f2_tangle / f2.volume;
    let two_component = registry.get("W10_11_augmented")?;
    let two_component_hi = two_component
        .dcc_endpoint()
        .ok_or_else(|| RegistryError::Missing { name: "W10_11_augmented".into() })?;
    let all_links = registry.geometry("L_7_8_augmented")?;
    let links_hi = all_links.cusp_crossing_density().map_err(|e| {
        FamilyError::Registry(RegistryError::Entry {
            name: "L_7_8_augmented".into(),
            source: match e {
                crate::linkmodel::DensityError::Invalid(v) => v,
                _ => unreachable!("entry validated on load"),
            },
        })
    })?;
    Ok(vec![
        NamedInterval {
            name: "links_cd",
            lo: F::zero(),
            hi: b.boroczky,
            provenance: "densest horoball-packing ratio sqrt(3)/(2 v_tet); attained by chain-based fillings".
                to_owned(),
        },
        NamedInterval {
            name: "knots_cd",
            lo: F::zero(),
            hi: knots_hi,
            provenance: format!(
                "restricted tangle-cusp density 4*sqrt(3)/(10 v_tet) of F2_limit: {}",
                registry.get("F2_limit")?.provenance
            ),
        },
        NamedInterval {
            name: "two_component_dcc",
            lo: F::zero(),
            hi: two_component_hi,
            provenance: format!(
                "cover-and-twist ceiling of W10_11_augmented: {}",
                two_component.provenance
            ),
        },
        NamedInterval {
            name: "links_dcc",
            lo: F::zero(),
            hi: links_hi,
            provenance: format!(
                "cusp volume 267.1551 over 126 crossings of L_7_8_augmented: {}",
                registry.get("L_7_8_augmented")?.provenance
            ),
        },
    ])
}

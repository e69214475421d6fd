//! Horoball geometry in the upper half-space model.
//!
//! A horoball is either a Euclidean ball tangent to the boundary plane
//! (recorded by its center and diameter) or the horizontal half-space above
//! some height at the point at infinity. Geodesic planes are hemispheres or
//! vertical half-planes. On top of the basic predicates the module carries
//! the cusp arithmetic of the standard ideal regular octahedron, normalized
//! with vertices at `∞`, `0` and `(±1±i)/2` — the position in which the
//! equatorial edges peak at height `1/2` and each vertex sees a unit
//! footprint from infinity.
//!
//! Feasibility of a size assignment combines pairwise non-overlap with the
//! edge rule: after normalizing any vertex to infinity its horoball must
//! stay at height ≥ 1/2, or it would cross the opposite equatorial edges,
//! which are identified with edges of the same cusp in the manifolds this
//! models. The rule is a local stand-in for that gluing argument; the
//! seeded search below is a consistency check of the resulting maximum,
//! not a proof.

use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::num::{real, show, Real};

/// Absolute tolerance for the geometric predicates.
pub const GEOMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HoroballError {
    #[error("{what} must be positive and finite, got {value}")]
    NonPositive { what: &'static str, value: f64 },
    #[error("horoballs share their center")]
    IdenticalCenters,
    #[error("direction of a vertical plane must be nonzero")]
    ZeroDirection,
    #[error("iteration budget must be at least 1")]
    NoIterations,
}

/// A horoball: ball tangent to the boundary, or half-space at infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Horoball<F> {
    AtInfinity { height: F },
    Finite { center: Complex<F>, diameter: F },
}

impl<F: Real> Horoball<F> {
    pub fn at_infinity(height: F) -> Result<Self, HoroballError> {
        if !(height.is_finite() && height > F::zero()) {
            return Err(HoroballError::NonPositive { what: "height", value: show(height) });
        }
        Ok(Horoball::AtInfinity { height })
    }

    pub fn finite(center: Complex<F>, diameter: F) -> Result<Self, HoroballError> {
        if !(diameter.is_finite() && diameter > F::zero()) {
            return Err(HoroballError::NonPositive { what: "diameter", value: show(diameter) });
        }
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err(HoroballError::NonPositive {
                what: "center coordinate",
                value: f64::NAN,
            });
        }
        Ok(Horoball::Finite { center, diameter })
    }
}

/// A totally geodesic plane: vertical half-plane over a line, or hemisphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GeodesicPlane<F> {
    Vertical { point: Complex<F>, direction: Complex<F> },
    Hemisphere { center: Complex<F>, radius: F },
}

impl<F: Real> GeodesicPlane<F> {
    pub fn vertical(point: Complex<F>, direction: Complex<F>) -> Result<Self, HoroballError> {
        if direction.norm_sqr() == F::zero() {
            return Err(HoroballError::ZeroDirection);
        }
        Ok(GeodesicPlane::Vertical { point, direction })
    }

    pub fn hemisphere(center: Complex<F>, radius: F) -> Result<Self, HoroballError> {
        if !(radius.is_finite() && radius > F::zero()) {
            return Err(HoroballError::NonPositive { what: "radius", value: show(radius) });
        }
        Ok(GeodesicPlane::Hemisphere { center, radius })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tangency {
    Disjoint,
    Tangent,
    Overlapping,
}

/// Classify a pair of horoballs with distinct centers.
///
/// Finite balls with centers `p, q` and diameters `dp, dq` are tangent
/// exactly when `dp·dq = |p−q|²`; a finite ball is tangent to the ball at
/// infinity exactly when its diameter equals the height. Classification
/// applies [`GEOMETRY_TOL`] to the defining equality.
pub fn tangency<F: Real>(a: &Horoball<F>, b: &Horoball<F>) -> Result<Tangency, HoroballError> {
    let tol = real::<F>(GEOMETRY_TOL);
    let classify = |gap: F| {
        if gap.abs() <= tol {
            Tangency::Tangent
        } else if gap > F::zero() {
            Tangency::Disjoint
        } else {
            Tangency::Overlapping
        }
    };
    match (a, b) {
        (Horoball::AtInfinity { .. }, Horoball::AtInfinity { .. }) => {
            Err(HoroballError::IdenticalCenters)
        }
        (Horoball::AtInfinity { height }, Horoball::Finite { diameter, .. })
        | (Horoball::Finite { diameter, .. }, Horoball::AtInfinity { height }) => {
            Ok(classify(*height - *diameter))
        }
        (
            Horoball::Finite { center: p, diameter: dp },
            Horoball::Finite { center: q, diameter: dq },
        ) => {
            if p == q {
                return Err(HoroballError::IdenticalCenters);
            }
            Ok(classify((*p - *q).norm_sqr() - *dp * *dq))
        }
    }
}

/// Whether the horoball pokes the plane: its center is off the plane's
/// boundary circle (beyond [`GEOMETRY_TOL`]) yet the closed ball meets the
/// plane.
pub fn pokes<F: Real>(ball: &Horoball<F>, plane: &GeodesicPlane<F>) -> bool {
    let tol = real::<F>(GEOMETRY_TOL);
    match (ball, plane) {
        // The boundary of a vertical plane passes through infinity.
        (Horoball::AtInfinity { .. }, GeodesicPlane::Vertical { .. }) => false,
        (Horoball::AtInfinity { height }, GeodesicPlane::Hemisphere { radius, .. }) => {
            *radius >= *height
        }
        (
            Horoball::Finite { center, diameter },
            GeodesicPlane::Vertical { point, direction },
        ) => {
            let offset = *center - *point;
            let cross = offset.re * direction.im - offset.im * direction.re;
            let distance = cross.abs() / direction.norm_sqr().sqrt();
            if distance <= tol {
                return false;
            }
            distance <= *diameter / real::<F>(2.0)
        }
        (
            Horoball::Finite { center, diameter },
            GeodesicPlane::Hemisphere { center: hub, radius },
        ) => {
            let planar = (*center - *hub).norm_sqr().sqrt();
            if (planar - *radius).abs() <= tol {
                return false;
            }
            // Ball center sits at height r over its tangency point.
            let r = *diameter / real::<F>(2.0);
            let dist_sq = (*center - *hub).norm_sqr() + r * r;
            let lo = (*radius - r) * (*radius - r);
            let hi = (*radius + r) * (*radius + r);
            lo <= dist_sq && dist_sq <= hi
        }
    }
}

/// Volume of the horoball-at-infinity piece above `height` over a footprint
/// of the given Euclidean area (measured at height 1): `area / (2 h²)`.
pub fn half_space_volume<F: Real>(cross_section_area: F, height: F) -> Result<F, HoroballError> {
    if !(cross_section_area.is_finite() && cross_section_area > F::zero()) {
        return Err(HoroballError::NonPositive {
            what: "cross-section area",
            value: show(cross_section_area),
        });
    }
    if !(height.is_finite() && height > F::zero()) {
        return Err(HoroballError::NonPositive { what: "height", value: show(height) });
    }
    Ok(cross_section_area / (real::<F>(2.0) * height * height))
}

/// The six ideal vertices of the standard octahedron.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OctVertex {
    Infinity,
    Origin,
    /// Index 0..=3 into the equatorial cycle `(±1±i)/2`.
    Equator(usize),
}

impl OctVertex {
    pub const ALL: [OctVertex; 6] = [
        OctVertex::Infinity,
        OctVertex::Origin,
        OctVertex::Equator(0),
        OctVertex::Equator(1),
        OctVertex::Equator(2),
        OctVertex::Equator(3),
    ];
}

/// Horoball sizes at the six vertices of the standard ideal regular
/// octahedron (`∞`, `0`, `(±1±i)/2`): boundary height at infinity,
/// Euclidean diameters elsewhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OctahedronConfig<F> {
    pub infinity: F,
    pub origin: F,
    pub equator: [F; 4],
}

/// Equatorial vertex coordinates in cyclic order.
fn equator_center<F: Real>(index: usize) -> Complex<F> {
    let half = real::<F>(0.5);
    match index {
        0 => Complex::new(half, half),
        1 => Complex::new(-half, half),
        2 => Complex::new(-half, -half),
        _ => Complex::new(half, -half),
    }
}

impl<F: Real> OctahedronConfig<F> {
    pub fn new(infinity: F, origin: F, equator: [F; 4]) -> Result<Self, HoroballError> {
        let check = |what, value: F| {
            if value.is_finite() && value > F::zero() {
                Ok(())
            } else {
                Err(HoroballError::NonPositive { what, value: show(value) })
            }
        };
        check("infinity height", infinity)?;
        check("origin diameter", origin)?;
        for d in equator {
            check("equator diameter", d)?;
        }
        Ok(OctahedronConfig { infinity, origin, equator })
    }

    /// All three face horoballs pairwise tangent: height 1 at infinity,
    /// unit diameters on the equator, diameter 1/2 at the origin. Each
    /// vertex contributes volume 1/2.
    pub fn standard() -> Self {
        OctahedronConfig {
            infinity: F::one(),
            origin: real(0.5),
            equator: [F::one(); 4],
        }
    }

    /// Opposite pair expanded until tangent at the octahedron's center:
    /// everything at `1/√2`, volumes 1, 1 and four times 1/4.
    pub fn opposite_expansion() -> Self {
        let s = real::<F>(std::f64::consts::FRAC_1_SQRT_2);
        OctahedronConfig { infinity: s, origin: s, equator: [s; 4] }
    }

    /// The ball at infinity expanded down to the equatorial edges:
    /// everything at 1/2, volumes 2, 1/2 and four times 1/8.
    pub fn edge_tangent() -> Self {
        let h = real::<F>(0.5);
        OctahedronConfig { infinity: h, origin: h, equator: [h; 4] }
    }

    /// The size at one vertex.
    pub fn size(&self, vertex: OctVertex) -> F {
        match vertex {
            OctVertex::Infinity => self.infinity,
            OctVertex::Origin => self.origin,
            OctVertex::Equator(i) => self.equator[i % 4],
        }
    }

    /// The six horoballs in upper half-space coordinates.
    pub fn horoballs(&self) -> [Horoball<F>; 6] {
        [
            Horoball::AtInfinity { height: self.infinity },
            Horoball::Finite { center: Complex::new(F::zero(), F::zero()), diameter: self.origin },
            Horoball::Finite { center: equator_center(0), diameter: self.equator[0] },
            Horoball::Finite { center: equator_center(1), diameter: self.equator[1] },
            Horoball::Finite { center: equator_center(2), diameter: self.equator[2] },
            Horoball::Finite { center: equator_center(3), diameter: self.equator[3] },
        ]
    }

    /// Height of the vertex horoball after the octahedron's symmetry moves
    /// that vertex to infinity: `h` itself, `1/(2d)` for the origin, `1/d`
    /// on the equator.
    pub fn normalized_height(&self, vertex: OctVertex) -> F {
        match vertex {
            OctVertex::Infinity => self.infinity,
            OctVertex::Origin => F::one() / (real::<F>(2.0) * self.origin),
            OctVertex::Equator(i) => F::one() / self.equator[i % 4],
        }
    }

    /// Volume of the horoball piece at one vertex: the normalizing isometry
    /// turns every vertex into the infinity picture with unit footprint, so
    /// the piece is `1/(2h²)` at the normalized height — `1/(2h²)`, `2d²`
    /// and `d²/2` for the three vertex classes.
    pub fn vertex_volume(&self, vertex: OctVertex) -> F {
        let h = self.normalized_height(vertex);
        F::one() / (real::<F>(2.0) * h * h)
    }

    /// Total cusp volume inside the octahedron.
    pub fn total_volume(&self) -> F {
        OctVertex::ALL
            .iter()
            .fold(F::zero(), |acc, &v| acc + self.vertex_volume(v))
    }

    /// Pairwise non-overlap plus the edge rule (normalized heights ≥ 1/2).
    pub fn feasible(&self) -> bool {
        self.pairwise_feasible() && self.edge_rule_holds()
    }

    /// Only the pairwise non-overlap constraints, without the edge rule.
    /// Dropping the rule lets the ball at infinity slide arbitrarily far
    /// down and blow up the total, which is why `feasible` keeps it.
    pub fn feasible_ignoring_edge_rule(&self) -> bool {
        self.pairwise_feasible()
    }

    fn pairwise_feasible(&self) -> bool {
        let balls = self.horoballs();
        for i in 0..balls.len() {
            for j in (i + 1)..balls.len() {
                match tangency(&balls[i], &balls[j]) {
                    Ok(Tangency::Overlapping) => return false,
                    Ok(_) => {}
                    Err(_) => return false,
                }
            }
        }
        true
    }

    fn edge_rule_holds(&self) -> bool {
        let floor = real::<F>(0.5) - real::<F>(GEOMETRY_TOL);
        OctVertex::ALL
            .iter()
            .all(|&v| self.normalized_height(v) >= floor)
    }
}

/// Outcome of [`search_packing_max`].
#[derive(Debug, Clone, PartialEq)]
pub struct PackingSearch<F> {
    pub best_config: OctahedronConfig<F>,
    pub best_total: F,
    pub evaluations: u64,
}

/// Seeded search for the feasible configuration of largest total volume.
///
/// The three closed-form configurations seed the search (standard packing
/// first), followed by a coarse symmetric grid and random-restart hill
/// climbing over all six sizes, each proposal projected back into the
/// feasible region. Every known optimum totals exactly 3; the search is the
/// numerical consistency check that nothing feasible beats it.
pub fn search_packing_max<F: Real>(
    seed: u64,
    iterations: u64,
) -> Result<PackingSearch<F>, HoroballError> {
    if iterations == 0 {
        return Err(HoroballError::NoIterations);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut evaluations = 0u64;
    let mut best: Option<(OctahedronConfig<F>, F)> = None;

    let consider = |cfg: OctahedronConfig<F>, best: &mut Option<(OctahedronConfig<F>, F)>| {
        let total = cfg.total_volume();
        if cfg.feasible() && best.as_ref().is_none_or(|(_, t)| total > *t) {
            *best = Some((cfg, total));
        }
    };

    let named = [
        OctahedronConfig::standard(),
        OctahedronConfig::opposite_expansion(),
        OctahedronConfig::edge_tangent(),
    ];
    for cfg in named {
        if evaluations >= iterations {
            break;
        }
        consider(cfg, &mut best);
        evaluations += 1;
    }
    // Coarse symmetric grid over (h, d_eq, d_origin).
    const GRID: [f64; 5] = [0.5, 0.75, 1.0, 1.5, 2.0];
    'grid: for &h in &GRID {
        for &de in &GRID {
            for &d0 in &GRID {
                if evaluations >= iterations {
                    break 'grid;
                }
                let cfg = project(real(h), real(d0), [real::<F>(de); 4]);
                consider(cfg, &mut best);
                evaluations += 1;
            }
        }
    }
    // Random-restart hill climbing in all six coordinates.
    let sigmas = [0.3, 0.1, 0.03, 0.01];
    while evaluations < iterations {
        let propose_restart = evaluations.is_multiple_of(97);
        let cfg = match &best {
            Some((base, _)) if !propose_restart => {
                let sigma = sigmas[(evaluations as usize / 512) % sigmas.len()];
                let jitter = |rng: &mut ChaCha8Rng, v: F| {
                    v * real::<F>((sigma * (rng.random::<f64>() - 0.5) * 2.0).exp())
                };
                let h = jitter(&mut rng, base.infinity);
                let d0 = jitter(&mut rng, base.origin);
                let de = [
                    jitter(&mut rng, base.equator[0]),
                    jitter(&mut rng, base.equator[1]),
                    jitter(&mut rng, base.equator[2]),
                    jitter(&mut rng, base.equator[3]),
                ];
                project(h, d0, de)
            }
            _ => {
                let h = 0.5 * (1.0 + 5.0 * rng.random::<f64>());
                let d0 = 0.05 + 0.95 * rng.random::<f64>();
                let de = std::array::from_fn(|_| real::<F>(0.05 + 1.95 * rng.random::<f64>()));
                project(real(h), real(d0), de)
            }
        };
        consider(cfg, &mut best);
        evaluations += 1;
    }
    let (best_config, best_total) = best.expect("standard packing always feasible");
    Ok(PackingSearch { best_config, best_total, evaluations })
}

/// Shrink a proposal into the feasible region: enforce the edge rule on
/// `h`, cap the diameters by their pairwise and edge limits, then scale
/// down violating pairs symmetrically. Products only shrink, so one pass
/// suffices.
fn project<F: Real>(h: F, d0: F, de: [F; 4]) -> OctahedronConfig<F> {
    let tiny = real::<F>(1e-6);
    let one = F::one();
    let two = real::<F>(2.0);
    let half = real::<F>(0.5);
    let h = h.max(half).min(real(1e6));
    let d0 = d0.min(one).min(h).max(tiny);
    let mut de = de.map(|d| d.min(two).min(h).min(one / (two * d0)).max(tiny));
    // Adjacent pairs may not exceed product 1; opposite pairs product 2.
    for (a, b, limit) in [
        (0usize, 1usize, one),
        (1, 2, one),
        (2, 3, one),
        (3, 0, one),
        (0, 2, two),
        (1, 3, two),
    ] {
        let product = de[a] * de[b];
        if product > limit {
            let scale = (limit / product).sqrt();
            de[a] = de[a] * scale;
            de[b] = de[b] * scale;
        }
    }
    OctahedronConfig { infinity: h, origin: d0, equator: de }
}

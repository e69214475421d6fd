//! Cusp-invariant calculus for hyperbolic link complements.
//!
//! The library measures links through three densities — cusp density
//! `cv/vol`, restricted cusp density, and cusp crossing density `cv/c` —
//! and provides the machinery those invariants are built from: Lobachevsky
//! constants, a registry of measured link data, belted-sum combination
//! rules with a rational sampler, chain Dehn-filling reduction, parametric
//! link families, and horoball packing geometry for the ideal regular
//! octahedron.
//!
//! The numeric core is generic over the scalar type (see [`num::Real`]);
//! the aliases at the crate root fix `f64`, which is what the bundled CLI
//! uses.

pub mod beltsum;
pub mod chain;
pub mod cli;
pub mod constants;
pub mod document;
pub mod families;
pub mod horoball;
pub mod linkmodel;
pub mod num;

pub use num::Real;

/// Bound set over `f64`.
pub type BoundSet = constants::BoundSet<f64>;
/// Cusp record over `f64`.
pub type CuspRecord = linkmodel::CuspRecord<f64>;
/// Link geometry over `f64`.
pub type LinkGeometry = linkmodel::LinkGeometry<f64>;
/// Registry over `f64`.
pub type Registry = linkmodel::Registry<f64>;
/// Tangle data over `f64`.
pub type TangleLinkData = beltsum::TangleLinkData<f64>;
/// Belted-sum result over `f64`.
pub type BeltSumResult = beltsum::BeltSumResult<f64>;
/// Density interval over `f64`.
pub type DensityInterval = beltsum::DensityInterval<f64>;
/// Family point over `f64`.
pub type FamilyPoint = families::FamilyPoint<f64>;
/// Cover-and-twist seed over `f64`.
pub type CoverTwistSeed = families::CoverTwistSeed<f64>;
/// Horoball over `f64`.
pub type Horoball = horoball::Horoball<f64>;
/// Geodesic plane over `f64`.
pub type GeodesicPlane = horoball::GeodesicPlane<f64>;
/// Octahedron configuration over `f64`.
pub type OctahedronConfig = horoball::OctahedronConfig<f64>;

//! Measured link geometry, the density invariants, and the data registry.
//!
//! A [`LinkGeometry`] is a record of measured hyperbolic data — volume,
//! per-cusp maximal volumes with the maximization order that produced them,
//! and an optional crossing number. Maximal cusp volumes are stored, never
//! computed: they depend on the order in which cusps are expanded, and that
//! order is part of the data ([`CuspRecord::maximization_index`]).
//!
//! Every stored quantity is validated against the global bounds: cusp
//! density can never exceed the densest-packing ratio, and per-crossing
//! quantities obey the crossing-density bounds.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::constants::bounds;
use crate::num::{real, show, Real};

/// Absolute slack allowed when checking measured data against the bounds.
pub const VALIDATION_TOL: f64 = 1e-9;

/// Bundled registry document.
const BUILTIN_REGISTRY: &str = include_str!("../data/registry.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum CuspRole {
    /// Cusp of the component carrying the tangle.
    Tangle,
    /// Trivial component bounding the twice-punctured disk.
    Belt,
    Plain,
}

impl CuspRole {
    pub fn as_str(self) -> &'static str {
        match self {
            CuspRole::Tangle => "tangle",
            CuspRole::Belt => "belt",
            CuspRole::Plain => "plain",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum LinkFlag {
    AugmentedCrossTangle,
    NoPoking,
    Alternating,
}

impl LinkFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            LinkFlag::AugmentedCrossTangle => "augmented_cross_tangle",
            LinkFlag::NoPoking => "no_poking",
            LinkFlag::Alternating => "alternating",
        }
    }
}

/// One cusp's measured data.
#[derive(Debug, Clone, PartialEq)]
pub struct CuspRecord<F> {
    /// Maximal volume of this cusp, under the recorded maximization order.
    pub cusp_volume: F,
    /// Meridian length on the maximal cusp boundary, when known.
    pub meridian: Option<F>,
    /// Position of this cusp in the order the cusps were expanded.
    pub maximization_index: usize,
    pub role: CuspRole,
}

/// A link's measured hyperbolic data.
#[derive(Debug, Clone, PartialEq)]
pub struct LinkGeometry<F> {
    pub name: String,
    pub volume: F,
    pub cusps: Vec<CuspRecord<F>>,
    /// `None` means unknown; per-crossing densities are then undefined.
    pub crossing_number: Option<u64>,
    pub flags: BTreeSet<LinkFlag>,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ValidationError {
    #[error("link `{name}`: volume must be positive and finite, got {value}")]
    NonPositiveVolume { name: String, value: f64 },
    #[error("link `{name}`: cusp {index}: volume must be finite and nonnegative, got {value}")]
    BadCuspVolume { name: String, index: usize, value: f64 },
    #[error(
        "link `{name}`: cusp {index}: meridian {value} is shorter than 1, \
         the minimum slope length on a maximal cusp"
    )]
    MeridianTooShort { name: String, index: usize, value: f64 },
    #[error(
        "link `{name}`: cusp density {density} exceeds the densest-packing bound {bound}"
    )]
    CuspDensityBound { name: String, density: f64, bound: f64 },
    #[error(
        "link `{name}`: cusp crossing density {density} exceeds the bound {bound}"
    )]
    CuspCrossingDensityBound { name: String, density: f64, bound: f64 },
    #[error("link `{name}`: volume density {density} exceeds the octahedral bound {bound}")]
    VolumeDensityBound { name: String, density: f64, bound: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DensityError {
    #[error(transparent)]
    Invalid(#[from] ValidationError),
    #[error("link `{name}`: crossing number unknown")]
    UnknownCrossingNumber { name: String },
    #[error("cusp subset is empty")]
    EmptySubset,
    #[error("cusp index {index} out of range: link has {count} cusps")]
    BadCuspIndex { index: usize, count: usize },
}

impl<F: Real> LinkGeometry<F> {
    /// Sum of the stored maximal cusp volumes.
    pub fn total_cusp_volume(&self) -> F {
        self.cusps
            .iter()
            .fold(F::zero(), |acc, c| acc + c.cusp_volume)
    }

    /// Check every stored quantity against the global bounds.
    pub fn validate(&self) -> Result<(), ValidationError> {
        let b = bounds::<F>();
        // Widened to a few machine epsilons for scalars coarser than f64.
        let tol = real::<F>(VALIDATION_TOL).max(F::epsilon() * real::<F>(32.0));
        if !(self.volume.is_finite() && self.volume > F::zero()) {
            return Err(ValidationError::NonPositiveVolume {
                name: self.name.clone(),
                value: show(self.volume),
            });
        }
        for (index, cusp) in self.cusps.iter().enumerate() {
            if !(cusp.cusp_volume.is_finite() && cusp.cusp_volume >= F::zero()) {
                return Err(ValidationError::BadCuspVolume {
                    name: self.name.clone(),
                    index,
                    value: show(cusp.cusp_volume),
                });
            }
            if let Some(m) = cusp.meridian {
                if !(m.is_finite() && m >= F::one()) {
                    return Err(ValidationError::MeridianTooShort {
                        name: self.name.clone(),
                        index,
                        value: show(m),
                    });
                }
            }
        }
        let density = self.total_cusp_volume() / self.volume;
        if density > b.boroczky + tol {
            return Err(ValidationError::CuspDensityBound {
                name: self.name.clone(),
                density: show(density),
                bound: show(b.boroczky),
            });
        }
        if let Some(c) = self.crossing_number.filter(|&c| c > 0) {
            let c = F::from_u64(c).expect("crossing count fits scalar");
            let dcc = self.total_cusp_volume() / c;
            if dcc > b.dcc_upper + tol {
                return Err(ValidationError::CuspCrossingDensityBound {
                    name: self.name.clone(),
                    density: show(dcc),
                    bound: show(b.dcc_upper),
                });
            }
            let dvol = self.volume / c;
            if dvol > b.v_oct + tol {
                return Err(ValidationError::VolumeDensityBound {
                    name: self.name.clone(),
                    density: show(dvol),
                    bound: show(b.v_oct),
                });
            }
        }
        Ok(())
    }

    /// Cusp density `cv / vol`.
    pub fn cusp_density(&self) -> Result<F, DensityError> {
        self.validate()?;
        Ok(self.total_cusp_volume() / self.volume)
    }

    /// Restricted cusp density of a subset of cusps (by index, duplicates
    /// ignored).
    pub fn restricted_cusp_density(&self, subset: &[usize]) -> Result<F, DensityError> {
        self.validate()?;
        if subset.is_empty() {
            return Err(DensityError::EmptySubset);
        }
        let mut seen = BTreeSet::new();
        let mut total = F::zero();
        for &index in subset {
            let cusp = self
                .cusps
                .get(index)
                .ok_or(DensityError::BadCuspIndex { index, count: self.cusps.len() })?;
            if seen.insert(index) {
                total = total + cusp.cusp_volume;
            }
        }
        Ok(total / self.volume)
    }

    /// Cusp crossing density `cv / c`.
    pub fn cusp_crossing_density(&self) -> Result<F, DensityError> {
        self.validate()?;
        let c = self.known_crossing_number()?;
        Ok(self.total_cusp_volume() / c)
    }

    /// Volume density `vol / c`.
    pub fn volume_density(&self) -> Result<F, DensityError> {
        self.validate()?;
        let c = self.known_crossing_number()?;
        Ok(self.volume / c)
    }

    fn known_crossing_number(&self) -> Result<F, DensityError> {
        match self.crossing_number {
            Some(c) if c > 0 => Ok(F::from_u64(c).expect("crossing count fits scalar")),
            _ => Err(DensityError::UnknownCrossingNumber { name: self.name.clone() }),
        }
    }
}

/// What a registry entry records.
#[derive(Debug, Clone, PartialEq)]
pub enum EntryData<F> {
    /// Full measured geometry.
    Geometry(LinkGeometry<F>),
    /// Only a cusp-crossing-density endpoint is known for this family datum.
    DccEndpoint(F),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegistryEntry<F> {
    pub data: EntryData<F>,
    /// Where the numbers come from (measurement, derivation, surrogate).
    pub provenance: String,
}

impl<F: Real> RegistryEntry<F> {
    pub fn geometry(&self) -> Option<&LinkGeometry<F>> {
        match &self.data {
            EntryData::Geometry(g) => Some(g),
            EntryData::DccEndpoint(_) => None,
        }
    }

    pub fn dcc_endpoint(&self) -> Option<F> {
        match &self.data {
            EntryData::Geometry(_) => None,
            EntryData::DccEndpoint(d) => Some(*d),
        }
    }
}

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("cannot read registry file: {0}")]
    Io(#[from] std::io::Error),
    #[error("registry parse error: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("registry entry `{name}`: {source}")]
    Entry {
        name: String,
        #[source]
        source: ValidationError,
    },
    #[error("registry entry `{name}`: {reason}")]
    Malformed { name: String, reason: String },
    #[error("registry entry `{name}`: density endpoint {value} outside (0, {bound}]")]
    EndpointOutOfRange { name: String, value: f64, bound: f64 },
    #[error("no registry entry named `{name}`")]
    Missing { name: String },
    #[error("registry entry `{name}` records only a density endpoint, not full geometry")]
    EndpointOnly { name: String },
}

/// Read-only map of named link data.
#[derive(Debug, Clone)]
pub struct Registry<F> {
    entries: BTreeMap<String, RegistryEntry<F>>,
}

impl<F: Real> Registry<F> {
    /// The registry bundled with the crate.
    pub fn builtin() -> Result<Self, RegistryError> {
        Self::from_toml_str(BUILTIN_REGISTRY)
    }

    pub fn from_path(path: &Path) -> Result<Self, RegistryError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn from_toml_str(text: &str) -> Result<Self, RegistryError> {
        let raw: BTreeMap<String, RawEntry> = toml::from_str(text)?;
        let mut entries = BTreeMap::new();
        for (name, raw) in raw {
            let entry = raw.into_entry::<F>(&name)?;
            entries.insert(name, entry);
        }
        Ok(Registry { entries })
    }

    pub fn get(&self, name: &str) -> Result<&RegistryEntry<F>, RegistryError> {
        self.entries
            .get(name)
            .ok_or_else(|| RegistryError::Missing { name: name.to_owned() })
    }

    /// Full geometry of a named entry; endpoint-only entries are rejected.
    pub fn geometry(&self, name: &str) -> Result<&LinkGeometry<F>, RegistryError> {
        self.get(name)?
            .geometry()
            .ok_or_else(|| RegistryError::EndpointOnly { name: name.to_owned() })
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &RegistryEntry<F>)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Parse a standalone link record (same schema as a registry entry, plus an
/// optional `name` field).
pub fn link_from_toml_str<F: Real>(
    text: &str,
    fallback_name: &str,
) -> Result<LinkGeometry<F>, RegistryError> {
    let raw: RawLinkFile = toml::from_str(text)?;
    let name = raw.name.unwrap_or_else(|| fallback_name.to_owned());
    let entry = raw.entry.into_entry::<F>(&name)?;
    match entry.data {
        EntryData::Geometry(g) => Ok(g),
        EntryData::DccEndpoint(_) => Err(RegistryError::EndpointOnly { name }),
    }
}

pub fn link_from_path<F: Real>(path: &Path) -> Result<LinkGeometry<F>, RegistryError> {
    let text = std::fs::read_to_string(path)?;
    let fallback = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "link".to_owned());
    link_from_toml_str(&text, &fallback)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntry {
    provenance: String,
    volume: Option<f64>,
    crossing_number: Option<u64>,
    #[serde(default)]
    flags: Vec<String>,
    #[serde(default)]
    cusps: Vec<RawCusp>,
    dcc_endpoint: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCusp {
    cusp_volume: f64,
    meridian: Option<f64>,
    maximization_index: usize,
    role: String,
}

#[derive(Debug, Deserialize)]
struct RawLinkFile {
    name: Option<String>,
    #[serde(flatten)]
    entry: RawEntry,
}

impl RawEntry {
    fn into_entry<F: Real>(self, name: &str) -> Result<RegistryEntry<F>, RegistryError> {
        let malformed = |reason: &str| RegistryError::Malformed {
            name: name.to_owned(),
            reason: reason.to_owned(),
        };
        if let Some(endpoint) = self.dcc_endpoint {
            if self.volume.is_some() || !self.cusps.is_empty() {
                return Err(malformed(
                    "dcc_endpoint entries must not carry volume or cusp data",
                ));
            }
            let bound = show(bounds::<F>().dcc_upper);
            if !(endpoint > 0.0 && endpoint <= bound + VALIDATION_TOL) {
                return Err(RegistryError::EndpointOutOfRange {
                    name: name.to_owned(),
                    value: endpoint,
                    bound,
                });
            }
            return Ok(RegistryEntry {
                data: EntryData::DccEndpoint(real::<F>(endpoint)),
                provenance: self.provenance,
            });
        }
        let volume = self.volume.ok_or_else(|| malformed("missing volume"))?;
        let mut flags = BTreeSet::new();
        for flag in &self.flags {
            flags.insert(match flag.as_str() {
                "augmented_cross_tangle" => LinkFlag::AugmentedCrossTangle,
                "no_poking" => LinkFlag::NoPoking,
                "alternating" => LinkFlag::Alternating,
                other => return Err(malformed(&format!("unknown flag `{other}`"))),
            });
        }
        let mut cusps = Vec::with_capacity(self.cusps.len());
        for cusp in self.cusps {
            let role = match cusp.role.as_str() {
                "tangle" => CuspRole::Tangle,
                "belt" => CuspRole::Belt,
                "plain" => CuspRole::Plain,
                other => return Err(malformed(&format!("unknown cusp role `{other}`"))),
            };
            cusps.push(CuspRecord {
                cusp_volume: real::<F>(cusp.cusp_volume),
                meridian: cusp.meridian.map(real::<F>),
                maximization_index: cusp.maximization_index,
                role,
            });
        }
        let geometry = LinkGeometry {
            name: name.to_owned(),
            volume: real::<F>(volume),
            cusps,
            // Stored zero means "unknown", same as absence.
            crossing_number: self.crossing_number.filter(|&c| c > 0),
            flags,
        };
        geometry.validate().map_err(|source| RegistryError::Entry {
            name: name.to_owned(),
            source,
        })?;
        Ok(RegistryEntry {
            data: EntryData::Geometry(geometry),
            provenance: self.provenance,
        })
    }
}

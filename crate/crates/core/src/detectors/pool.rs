//! Model pool: detector families, their hyperparameter grids and model ids.
//!
//! A model id has the form `family|name=value[|name=value]`, e.g.
//! `lof|n_neighbors=10|distance=manhattan`.

use std::fmt;
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    Lof,
    Knn,
    Ocsvm,
    Cof,
    Abod,
    IForest,
    Hbos,
    Loda,
}

impl Family {
    /// Canonical pool order.
    pub const ALL: [Family; 8] = [
        Family::Lof,
        Family::Knn,
        Family::Ocsvm,
        Family::Cof,
        Family::Abod,
        Family::IForest,
        Family::Hbos,
        Family::Loda,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Family::Lof => "lof",
            Family::Knn => "knn",
            Family::Ocsvm => "ocsvm",
            Family::Cof => "cof",
            Family::Abod => "abod",
            Family::IForest => "iforest",
            Family::Hbos => "hbos",
            Family::Loda => "loda",
        }
    }

    /// Display label used in family-wise report tables.
    pub fn label(self) -> &'static str {
        match self {
            Family::Lof => "LOF",
            Family::Knn => "kNN",
            Family::Ocsvm => "OCSVM",
            Family::Cof => "COF",
            Family::Abod => "ABOD",
            Family::IForest => "iForest",
            Family::Hbos => "HBOS",
            Family::Loda => "LODA",
        }
    }

    /// OCSVM is never trained here; its slots are filled by imported scores.
    pub fn is_native(self) -> bool {
        self != Family::Ocsvm
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        Family::ALL
            .into_iter()
            .find(|f| f.name() == lower || f.label().to_ascii_lowercase() == lower)
            .ok_or_else(|| Error::ConfigError(format!("unknown detector family `{s}`")))
    }
}

/// A hyperparameter value: numeric or categorical.
#[derive(Debug, Clone, PartialEq)]
pub enum HpValue {
    Int(usize),
    Real(f64),
    Text(String),
}

impl fmt::Display for HpValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HpValue::Int(v) => write!(f, "{v}"),
            HpValue::Real(v) => write!(f, "{v}"),
            HpValue::Text(v) => f.write_str(v),
        }
    }
}

impl HpValue {
    pub fn as_usize(&self) -> Option<usize> {
        match self {
            HpValue::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            HpValue::Int(v) => Some(*v as f64),
            HpValue::Real(v) => Some(*v),
            HpValue::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            HpValue::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// One `{detector, hyperparameter configuration}` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    pub hp1: (String, HpValue),
    pub hp2: Option<(String, HpValue)>,
    pub seed: u64,
}

impl ModelSpec {
    pub fn id(&self) -> String {
        let mut id = format!("{}|{}={}", self.family, self.hp1.0, self.hp1.1);
        if let Some((name, v)) = &self.hp2 {
            id.push_str(&format!("|{name}={v}"));
        }
        id
    }

    /// Parses an id produced by [`ModelSpec::id`]. The seed is set to 0.
    pub fn parse(id: &str) -> Result<Self> {
        let bad = || Error::FormatError(format!("malformed model id `{id}`"));
        let mut parts = id.split('|');
        let family: Family = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let grid = GridConfig::default_grid(family);
        let parse_hp = |part: Option<&str>, expected: &str| -> Result<(String, HpValue)> {
            let (name, raw) = part.and_then(|p| p.split_once('=')).ok_or_else(bad)?;
            if name != expected {
                return Err(bad());
            }
            let value = match raw.parse::<usize>() {
                Ok(v) if !raw.contains('.') => HpValue::Int(v),
                _ => match raw.parse::<f64>() {
                    Ok(v) => HpValue::Real(v),
                    Err(_) => HpValue::Text(raw.to_string()),
                },
            };
            Ok((name.to_string(), value))
        };
        let hp1 = parse_hp(parts.next(), &grid.hp1_name)?;
        let hp2 = match &grid.hp2_name {
            Some(n) => Some(parse_hp(parts.next(), n)?),
            None => None,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        Ok(ModelSpec {
            family,
            hp1,
            hp2,
            seed: 0,
        })
    }

    /// Same model with the seed [`enumerate_model_pool`] would give it.
    pub fn seeded(mut self, pool_seed: u64) -> Self {
        self.seed = derive_seed(pool_seed, id_hash(&self.id()));
        self
    }

    pub fn hp1_usize(&self) -> Result<usize> {
        self.hp1
            .1
            .as_usize()
            .ok_or_else(|| Error::BadHyperparameter(format!("{}: {} must be an integer", self.id(), self.hp1.0)))
    }

    pub fn hp1_f64(&self) -> Result<f64> {
        self.hp1
            .1
            .as_f64()
            .ok_or_else(|| Error::BadHyperparameter(format!("{}: {} must be numeric", self.id(), self.hp1.0)))
    }

    pub fn hp2_value(&self) -> Result<&HpValue> {
        self.hp2
            .as_ref()
            .map(|(_, v)| v)
            .ok_or_else(|| Error::BadHyperparameter(format!("{}: missing second hyperparameter", self.id())))
    }
}

/// Grid for one family.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilyGrid {
    pub family: Family,
    pub hp1_name: String,
    pub hp1: Vec<HpValue>,
    pub hp2_name: Option<String>,
    pub hp2: Vec<HpValue>,
}

impl FamilyGrid {
    pub fn size(&self) -> usize {
        self.hp1.len() * self.hp2.len().max(1)
    }
}

fn ints(v: &[usize]) -> Vec<HpValue> {
    v.iter().map(|&x| HpValue::Int(x)).collect()
}

fn reals(v: &[f64]) -> Vec<HpValue> {
    v.iter().map(|&x| HpValue::Real(x)).collect()
}

fn texts(v: &[&str]) -> Vec<HpValue> {
    v.iter().map(|s| HpValue::Text((*s).to_string())).collect()
}

/// User-facing override of the pool: which families, and optional grids.
#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(default, deny_unknown_fields)]
pub struct GridOverride {
    /// Family names; `None` means every family.
    pub families: Option<Vec<String>>,
    pub include_ocsvm_slots: Option<bool>,
}

/// The full pool definition.
#[derive(Debug, Clone, PartialEq)]
pub struct GridConfig {
    pub grids: Vec<FamilyGrid>,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            grids: Family::ALL.iter().map(|&f| Self::default_grid(f)).collect(),
        }
    }
}

const NEIGHBORS_WIDE: [usize; 12] = [1, 5, 10, 15, 20, 25, 50, 60, 70, 80, 90, 100];
const NEIGHBORS_NARROW: [usize; 7] = [3, 5, 10, 15, 20, 25, 50];

impl GridConfig {
    pub fn default_grid(family: Family) -> FamilyGrid {
        let (hp1_name, hp1, hp2_name, hp2) = match family {
            Family::Lof => (
                "n_neighbors",
                ints(&NEIGHBORS_WIDE),
                Some("distance"),
                texts(&["manhattan", "euclidean", "minkowski"]),
            ),
            Family::Knn => (
                "n_neighbors",
                ints(&NEIGHBORS_WIDE),
                Some("method"),
                texts(&["largest", "mean", "median"]),
            ),
            Family::Ocsvm => (
                "nu",
                reals(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
                Some("kernel"),
                texts(&["linear", "poly", "rbf", "sigmoid"]),
            ),
            Family::Cof => ("n_neighbors", ints(&NEIGHBORS_NARROW), None, vec![]),
            Family::Abod => ("n_neighbors", ints(&NEIGHBORS_NARROW), None, vec![]),
            Family::IForest => (
                "n_estimators",
                ints(&[10, 20, 30, 40, 50, 75, 100, 150, 200]),
                Some("max_features"),
                reals(&[0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]),
            ),
            Family::Hbos => (
                "n_histograms",
                ints(&[5, 10, 20, 30, 40, 50, 75, 100]),
                Some("tolerance"),
                reals(&[0.1, 0.2, 0.3, 0.4, 0.5]),
            ),
            Family::Loda => (
                "n_bins",
                ints(&[10, 20, 30, 40, 50, 75, 100, 150, 200]),
                Some("n_random_cuts"),
                ints(&[5, 10, 15, 20, 25, 30]),
            ),
        };
        FamilyGrid {
            family,
            hp1_name: hp1_name.to_string(),
            hp1,
            hp2_name: hp2_name.map(str::to_string),
            hp2,
        }
    }

    /// Default grids restricted to the named families (in canonical order).
    pub fn for_families<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut wanted = Vec::new();
        for n in names {
            wanted.push(n.as_ref().parse::<Family>()?);
        }
        Ok(Self {
            grids: Family::ALL
                .iter()
                .filter(|f| wanted.contains(f))
                .map(|&f| Self::default_grid(f))
                .collect(),
        })
    }

    pub fn from_override(ov: &GridOverride) -> Result<Self> {
        let mut cfg = match &ov.families {
            Some(names) => Self::for_families(names)?,
            None => Self::default(),
        };
        if ov.include_ocsvm_slots == Some(false) {
            cfg.grids.retain(|g| g.family.is_native());
        }
        Ok(cfg)
    }

    pub fn family_sizes(&self) -> Vec<(Family, usize)> {
        self.grids.iter().map(|g| (g.family, g.size())).collect()
    }
}

/// Derives an independent 64-bit stream seed from a run seed and an index.
pub fn derive_seed(run_seed: u64, index: u64) -> u64 {
    // splitmix64 finalizer over the combined input
    let mut z = run_seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// FNV-1a hash of a model id; stable across platforms and releases.
fn id_hash(id: &str) -> u64 {
    id.bytes()
        .fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Cross product of every family grid, in canonical order. Each spec gets a
/// seed derived from `pool_seed` and its id, so a model's seed does not
/// depend on which other families are in the pool.
pub fn enumerate_model_pool(config: &GridConfig, pool_seed: u64) -> Vec<ModelSpec> {
    let mut out = Vec::new();
    for grid in &config.grids {
        for v1 in &grid.hp1 {
            let hp1 = (grid.hp1_name.clone(), v1.clone());
            match &grid.hp2_name {
                Some(name) => {
                    for v2 in &grid.hp2 {
                        out.push(ModelSpec {
                            family: grid.family,
                            hp1: hp1.clone(),
                            hp2: Some((name.clone(), v2.clone())),
                            seed: 0,
                        });
                    }
                }
                None => out.push(ModelSpec {
                    family: grid.family,
                    hp1: hp1.clone(),
                    hp2: None,
                    seed: 0,
                }),
            }
        }
    }
    out.into_iter().map(|s| s.seeded(pool_seed)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashSet;

    #[test]
    fn default_pool_has_297_slots() {
        let pool = enumerate_model_pool(&GridConfig::default(), 0);
        assert_eq!(pool.len(), 297);
        let count = |f: Family| pool.iter().filter(|m| m.family == f).count();
        assert_eq!(count(Family::Lof), 36);
        assert_eq!(count(Family::Knn), 36);
        assert_eq!(count(Family::Ocsvm), 36);
        assert_eq!(count(Family::Cof), 7);
        assert_eq!(count(Family::Abod), 7);
        assert_eq!(count(Family::IForest), 81);
        assert_eq!(count(Family::Hbos), 40);
        assert_eq!(count(Family::Loda), 54);
        assert_eq!(pool.iter().filter(|m| m.family.is_native()).count(), 261);
    }

    #[test]
    fn ids_are_unique_and_round_trip() {
        let pool = enumerate_model_pool(&GridConfig::default(), 7);
        let ids: HashSet<String> = pool.iter().map(ModelSpec::id).collect();
        assert_eq!(ids.len(), pool.len());
        for spec in &pool {
            let parsed = ModelSpec::parse(&spec.id()).unwrap();
            assert_eq!(parsed.id(), spec.id());
            assert_eq!(parsed.family, spec.family);
        }
    }

    #[test]
    fn cof_only_pool() {
        let pool = enumerate_model_pool(&GridConfig::for_families(&["cof"]).unwrap(), 0);
        let ks: Vec<usize> = pool.iter().map(|m| m.hp1_usize().unwrap()).collect();
        assert_eq!(ks, vec![3, 5, 10, 15, 20, 25, 50]);
    }

    #[test]
    fn empty_family_list_gives_empty_pool() {
        let empty: [&str; 0] = [];
        assert!(enumerate_model_pool(&GridConfig::for_families(&empty).unwrap(), 0).is_empty());
    }

    #[test]
    fn unknown_family_is_config_error() {
        assert!(matches!(GridConfig::for_families(&["svdd"]), Err(Error::ConfigError(_))));
    }

    #[test]
    fn id_format() {
        let pool = enumerate_model_pool(&GridConfig::for_families(&["lof", "cof"]).unwrap(), 0);
        assert_eq!(pool[0].id(), "lof|n_neighbors=1|distance=manhattan");
        assert_eq!(pool.last().unwrap().id(), "cof|n_neighbors=50");
        assert!(ModelSpec::parse("lof|k=1").is_err());
    }

    #[test]
    fn seeds_differ_per_slot() {
        let pool = enumerate_model_pool(&GridConfig::default(), 42);
        let seeds: HashSet<u64> = pool.iter().map(|m| m.seed).collect();
        assert_eq!(seeds.len(), pool.len());
    }
}

//! Accelerator power catalog: canonical names, aliases, and max power draw.
//!
//! File format (TOML), one `[[device]]` table per entry:
//!
//! ```toml
//! [[device]]
//! name = "V100"
//! aliases = ["Tesla V100"]
//! max_power_watts = 300.0
//! provenance = "paper_table"   # or vendor_datasheet, not_stated_in_paper
//! ```
//!
//! Unknown fields are rejected. Names and aliases must be unique ignoring
//! case. Lookup is an exact case-insensitive match; there is no fuzzy
//! matching.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::HardwareSpec;

/// Source text of the built-in catalog.
pub const SEED_CATALOG: &str = include_str!("../data/catalog.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    PaperTable,
    VendorDatasheet,
    NotStatedInPaper,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::PaperTable => "paper_table",
            Provenance::VendorDatasheet => "vendor_datasheet",
            Provenance::NotStatedInPaper => "not_stated_in_paper",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub max_power_watts: f64,
    pub provenance: Provenance,
}

impl CatalogEntry {
    /// A hardware spec for `count` units of this device.
    pub fn hardware(&self, count: u32) -> Result<HardwareSpec> {
        HardwareSpec::new(self.name.clone(), self.max_power_watts, count)
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    #[serde(default)]
    device: Vec<CatalogEntry>,
}

#[derive(Debug, Clone, Default)]
pub struct Catalog {
    entries: Vec<CatalogEntry>,
    index: HashMap<String, usize>,
}

impl PartialEq for Catalog {
    fn eq(&self, other: &Self) -> bool {
        self.entries == other.entries
    }
}

fn key(name: &str) -> String {
    name.trim().to_lowercase()
}

fn line_of(source: &str, offset: usize) -> usize {
    source[..offset.min(source.len())].matches('\n').count() + 1
}

impl Catalog {
    pub fn from_entries(entries: Vec<CatalogEntry>) -> Result<Self> {
        let mut index = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            if e.name.trim().is_empty() {
                return Err(Error::Input(format!("catalog entry {i} has an empty name")));
            }
            if !(e.max_power_watts.is_finite() && e.max_power_watts > 0.0) {
                return Err(Error::Domain(format!(
                    "catalog entry {:?}: max_power_watts must be > 0, got {}",
                    e.name, e.max_power_watts
                )));
            }
            for n in std::iter::once(&e.name).chain(&e.aliases) {
                if let Some(&prev) = index.get(&key(n)) {
                    let prev: &CatalogEntry = &entries[prev];
                    return Err(Error::DuplicateName {
                        name: n.clone(),
                        first: prev.name.clone(),
                        second: e.name.clone(),
                    });
                }
                index.insert(key(n), i);
            }
        }
        Ok(Self { entries, index })
    }

    pub fn seed() -> Self {
        Self::load(SEED_CATALOG).expect("built-in catalog is valid")
    }

    /// Parses a catalog document; see the module docs for the format.
    pub fn load(source: &str) -> Result<Self> {
        let file: CatalogFile = toml::from_str(source).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| line_of(source, s.start)),
            message: e.message().to_string(),
        })?;
        Self::from_entries(file.device)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(&CatalogFile {
            device: self.entries.clone(),
        })
        .expect("catalog entries serialize")
    }

    pub fn lookup(&self, name: &str) -> Option<&CatalogEntry> {
        self.index.get(&key(name)).map(|&i| &self.entries[i])
    }

    pub fn entries(&self) -> &[CatalogEntry] {
        &self.entries
    }

    /// Every name and alias, in catalog order.
    pub fn all_names(&self) -> impl Iterator<Item = &str> {
        self.entries
            .iter()
            .flat_map(|e| std::iter::once(e.name.as_str()).chain(e.aliases.iter().map(String::as_str)))
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

//! Scenarios shipped inside the binary.

use crate::error::CliError;
use crate::scenario::GridSource;

macro_rules! embed {
    ($($name:literal),* $(,)?) => {
        &[$(($name, include_str!(concat!("../scenarios/", $name)))),*]
    };
}

/// `(file name, contents)` of every bundled scenario, in listing order.
pub const SCENARIOS: &[(&str, &str)] = embed!(
    "exact-equilibrium.json",
    "shear-nonidentity.json",
    "torsion-nonclosure.json",
    "maxwell-plane-wave.json",
    "poincare-invariant.json",
    "entropy-ideal-gas.json",
    "grid-gradient.json",
);

const GRIDS: &[(&str, &str)] = embed!("grid-gradient-a1.csv", "grid-gradient-a2.csv");

/// Grid references of bundled scenarios resolve to embedded files.
pub struct BundledGrids;

impl GridSource for BundledGrids {
    fn load(&self, reference: &str) -> Result<String, CliError> {
        GRIDS
            .iter()
            .find(|(n, _)| *n == reference)
            .map(|(_, t)| t.to_string())
            .ok_or_else(|| CliError::NotFound {
                path: reference.into(),
                reason: "no such bundled grid".into(),
            })
    }
}

pub fn names() -> impl Iterator<Item = &'static str> {
    SCENARIOS
        .iter()
        .map(|(f, _)| f.strip_suffix(".json").unwrap_or(f))
}

pub fn find(name: &str) -> Option<&'static str> {
    SCENARIOS
        .iter()
        .find(|(f, _)| f.strip_suffix(".json") == Some(name))
        .map(|(_, t)| *t)
}

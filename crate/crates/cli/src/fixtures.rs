//! Bundled example models with their expected singular fibers, and the diff
//! that checks a model against them.

use std::str::FromStr;

use k3wild::enumerate::K3_EULER;
use k3wild::ffpoly::{poly_factor, Poly, PrimeField};
use k3wild::height::Rational;
use k3wild::tate::{classify_fibration, AdeLabel};
use k3wild::weierstrass::{ModelRecord, Place};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const BUNDLED: &str = include_str!("../data/examples.toml");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureFile {
    pub example: Vec<ExampleFixture>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExampleFixture {
    pub id: String,
    #[serde(default)]
    pub equation: String,
    pub model: ModelRecord,
    pub expected: Vec<ExpectedFiber>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedFiber {
    pub locus: LocusSpec,
    pub count: usize,
    pub ade: String,
}

/// `"inf"`, or ascending coefficients of a polynomial in `u = t^p − t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LocusSpec {
    Named(String),
    InU(Vec<String>),
}

impl FixtureFile {
    pub fn parse(text: &str) -> Result<FixtureFile, CliError> {
        let file: FixtureFile = toml::from_str(text).map_err(|e| CliError::Fixture(e.message().to_string()))?;
        let mut seen = std::collections::HashSet::new();
        for ex in &file.example {
            if !seen.insert(ex.id.as_str()) {
                return Err(CliError::Fixture(format!("duplicate id {:?}", ex.id)));
            }
        }
        Ok(file)
    }

    pub fn bundled() -> FixtureFile {
        FixtureFile::parse(BUNDLED).expect("bundled fixture parses")
    }

    pub fn get(&self, id: &str) -> Option<&ExampleFixture> {
        self.example.iter().find(|e| e.id == id)
    }
}

/// Places covered by one expected entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedLocus {
    pub places: Vec<Place>,
    /// `Σ deg` over the distinct places.
    pub count: usize,
}

impl LocusSpec {
    pub fn resolve(&self, field: &PrimeField) -> Result<ResolvedLocus, CliError> {
        match self {
            LocusSpec::Named(s) if s == "inf" => Ok(ResolvedLocus { places: vec![Place::Infinity], count: 1 }),
            LocusSpec::Named(s) => Err(CliError::Fixture(format!("unknown locus {s:?}"))),
            LocusSpec::InU(coeffs) => {
                let u = field.artin_schreier();
                let mut poly = Poly::zero(*field);
                let mut power = Poly::one(*field);
                for c in coeffs {
                    let r = Rational::from_str(c.trim())
                        .map_err(|_| CliError::Fixture(format!("bad coefficient {c:?}")))?;
                    let c = field.ratio(*r.numer(), *r.denom()).map_err(|_| {
                        CliError::Fixture(format!("coefficient {c:?} has a denominator divisible by p"))
                    })?;
                    poly = &poly + &power.scale(c);
                    power = &power * &u;
                }
                let fac = poly_factor(&poly).map_err(|_| CliError::Fixture("locus polynomial is zero".into()))?;
                let places: Vec<Place> = fac
                    .factors
                    .into_iter()
                    .map(|(pi, _)| Place::finite(pi).expect("factors are monic irreducible"))
                    .collect();
                let count = places.iter().map(Place::degree).sum();
                Ok(ResolvedLocus { places, count })
            }
        }
    }
}

impl std::fmt::Display for LocusSpec {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LocusSpec::Named(s) => f.write_str(s),
            LocusSpec::InU(c) => {
                let terms: Vec<String> = c
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.trim() != "0")
                    .map(|(k, c)| match k {
                        0 => c.clone(),
                        1 => format!("{c}·u"),
                        _ => format!("{c}·u^{k}"),
                    })
                    .collect();
                write!(f, "{} = 0", terms.join(" + "))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExampleReport {
    pub id: String,
    pub pass: bool,
    pub euler_sum: u32,
    pub mismatches: Vec<String>,
}

/// Classifies the model and compares it to every expected entry. Singular
/// places not covered by any entry count as mismatches.
pub fn verify_example(ex: &ExampleFixture) -> Result<ExampleReport, CliError> {
    let model = ex.model.build()?;
    let config = classify_fibration(&model)?;
    let field = model.field();
    let mut mismatches = Vec::new();
    let mut covered: Vec<Place> = Vec::new();
    for exp in &ex.expected {
        let want = AdeLabel::from_str(&exp.ade).map_err(|e| CliError::Fixture(e.to_string()))?;
        let locus = exp.locus.resolve(&field)?;
        if locus.count != exp.count {
            mismatches.push(format!("{}: {} geometric fibers, expected {}", exp.locus, locus.count, exp.count));
        }
        for place in locus.places {
            let got = config.fiber_at(&place);
            if got.ade() != want {
                mismatches.push(format!("{}: {} ({got}) at {place}, expected {want}", exp.locus, got.ade()));
            }
            covered.push(place);
        }
    }
    for e in &config.entries {
        if !covered.contains(&e.place) {
            mismatches.push(format!("unlisted singular fiber {} ({}) at {}", e.fiber, e.fiber.ade(), e.place));
        }
    }
    let euler_sum = config.euler_sum();
    if euler_sum != K3_EULER {
        mismatches.push(format!("euler_sum {euler_sum}, expected {K3_EULER}"));
    }
    Ok(ExampleReport { id: ex.id.clone(), pass: mismatches.is_empty(), euler_sum, mismatches })
}

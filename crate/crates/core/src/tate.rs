//! Kodaira classification of the singular fibers of a Weierstrass fibration.
//!
//! In characteristic `p ≥ 5` the geometric fiber type at a place is read off
//! the valuations of `c4`, `c6` and `Δ` once the model is minimal there;
//! minimality is restored by stripping `(u⁴, u⁶, u¹²)` from
//! `(c4, c6, Δ)` whenever all three divide. Places of higher degree use the
//! `π`-adic valuation directly, so no root finding in residue fields is
//! needed. Types are geometric: `I_n` is not split into split/non-split.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffpoly::{Fp, Poly};
use crate::weierstrass::{Place, WeierstrassModel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TateError {
    #[error("characteristic {0} is below 5; the valuation cascade does not apply")]
    UnsupportedCharacteristic(u64),
    #[error("fiber at {0} is smooth")]
    SmoothPlace(String),
    #[error("minimality restarts exceeded the cap of {0}")]
    MinimalityCap(usize),
    #[error("valuations (c4, c6, Δ) = ({0:?}, {1:?}, {2}) do not match any Kodaira type")]
    Unclassifiable(Option<u32>, Option<u32>, u32),
    #[error("place modulus differs from the model characteristic")]
    PlaceMismatch,
    #[error("unknown fiber label {0:?}")]
    UnknownLabel(String),
}

/// Geometric Kodaira fiber type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum KodairaFiber {
    /// `I_n`; `I_0` is a smooth fiber.
    I(u32),
    /// `I_n*`.
    IStar(u32),
    II,
    III,
    IV,
    IVStar,
    IIIStar,
    IIStar,
}

impl KodairaFiber {
    /// Topological Euler number of the fiber.
    pub fn euler(self) -> u32 {
        match self {
            KodairaFiber::I(n) => n,
            KodairaFiber::IStar(n) => n + 6,
            KodairaFiber::II => 2,
            KodairaFiber::III => 3,
            KodairaFiber::IV => 4,
            KodairaFiber::IVStar => 8,
            KodairaFiber::IIIStar => 9,
            KodairaFiber::IIStar => 10,
        }
    }

    /// Number of irreducible components.
    pub fn components(self) -> u32 {
        match self {
            KodairaFiber::I(n) => n.max(1),
            KodairaFiber::IStar(n) => n + 5,
            KodairaFiber::II => 1,
            KodairaFiber::III => 2,
            KodairaFiber::IV => 3,
            KodairaFiber::IVStar => 7,
            KodairaFiber::IIIStar => 8,
            KodairaFiber::IIStar => 9,
        }
    }

    /// Order of the geometric component group (simple components of
    /// multiplicity one).
    pub fn component_group_order(self) -> u32 {
        match self {
            KodairaFiber::I(n) => n.max(1),
            KodairaFiber::IStar(_) => 4,
            KodairaFiber::II | KodairaFiber::IIStar => 1,
            KodairaFiber::III | KodairaFiber::IIIStar => 2,
            KodairaFiber::IV | KodairaFiber::IVStar => 3,
        }
    }

    pub fn is_smooth(self) -> bool {
        self == KodairaFiber::I(0)
    }

    pub fn is_multiplicative(self) -> bool {
        matches!(self, KodairaFiber::I(n) if n > 0)
    }

    pub fn is_additive(self) -> bool {
        !matches!(self, KodairaFiber::I(_))
    }

    pub fn ade(self) -> AdeLabel {
        AdeLabel::from(self)
    }

    /// Every singular type with Euler number at most `max_euler`, in the
    /// derived `Ord` order.
    pub fn singular_types(max_euler: u32) -> Vec<KodairaFiber> {
        let mut out: Vec<_> = (1..=max_euler).map(KodairaFiber::I).collect();
        out.extend((0..).map(KodairaFiber::IStar).take_while(|f| f.euler() <= max_euler));
        out.extend(
            [
                KodairaFiber::II,
                KodairaFiber::III,
                KodairaFiber::IV,
                KodairaFiber::IVStar,
                KodairaFiber::IIIStar,
                KodairaFiber::IIStar,
            ]
            .into_iter()
            .filter(|f| f.euler() <= max_euler),
        );
        out
    }
}

impl fmt::Display for KodairaFiber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KodairaFiber::I(n) => write!(f, "I_{n}"),
            KodairaFiber::IStar(n) => write!(f, "I_{n}*"),
            KodairaFiber::II => write!(f, "II"),
            KodairaFiber::III => write!(f, "III"),
            KodairaFiber::IV => write!(f, "IV"),
            KodairaFiber::IVStar => write!(f, "IV*"),
            KodairaFiber::IIIStar => write!(f, "III*"),
            KodairaFiber::IIStar => write!(f, "II*"),
        }
    }
}

/// Strips TeX decoration: braces, and `^` before stars.
fn normalize_label(s: &str) -> String {
    s.trim().chars().filter(|c| !matches!(c, '{' | '}' | ' ')).collect::<String>().replace('^', "")
}

impl FromStr for KodairaFiber {
    type Err = TateError;

    /// Accepts `I_5`, `I5`, `I_{12}`, `I_0*`, `I_1^*`, `IV*`, ...
    fn from_str(s: &str) -> Result<Self, TateError> {
        let err = || TateError::UnknownLabel(s.to_string());
        let t = normalize_label(s);
        Ok(match t.as_str() {
            "II" => KodairaFiber::II,
            "III" => KodairaFiber::III,
            "IV" => KodairaFiber::IV,
            "IV*" => KodairaFiber::IVStar,
            "III*" => KodairaFiber::IIIStar,
            "II*" => KodairaFiber::IIStar,
            _ => {
                let rest = t.strip_prefix('I').ok_or_else(err)?;
                let rest = rest.strip_prefix('_').unwrap_or(rest);
                let (digits, star) = match rest.strip_suffix('*') {
                    Some(d) => (d, true),
                    None => (rest, false),
                };
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(err());
                }
                let n: u32 = digits.parse().map_err(|_| err())?;
                if star {
                    KodairaFiber::IStar(n)
                } else {
                    KodairaFiber::I(n)
                }
            }
        })
    }
}

/// Root-lattice naming of fiber types. Irreducible singular fibers and the
/// additive fibers of small rank carry stars: `A_0^*` is a nodal curve
/// (`I_1`), `A_0^**` a cuspidal curve (`II`), `A_1^*` and `A_2^*` the
/// additive fibers `III` and `IV`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AdeLabel {
    /// `A_n`, `n ≥ 0`; `A_0` is the smooth fiber.
    A(u32),
    /// `A_0^*`.
    A0Star,
    /// `A_0^**`.
    A0StarStar,
    /// `A_1^*`.
    A1Star,
    /// `A_2^*`.
    A2Star,
    /// `D_n`, `n ≥ 4`.
    D(u32),
    E6,
    E7,
    E8,
}

impl From<KodairaFiber> for AdeLabel {
    fn from(f: KodairaFiber) -> AdeLabel {
        match f {
            KodairaFiber::I(0) => AdeLabel::A(0),
            KodairaFiber::I(1) => AdeLabel::A0Star,
            KodairaFiber::I(n) => AdeLabel::A(n - 1),
            KodairaFiber::II => AdeLabel::A0StarStar,
            KodairaFiber::III => AdeLabel::A1Star,
            KodairaFiber::IV => AdeLabel::A2Star,
            KodairaFiber::IStar(n) => AdeLabel::D(n + 4),
            KodairaFiber::IVStar => AdeLabel::E6,
            KodairaFiber::IIIStar => AdeLabel::E7,
            KodairaFiber::IIStar => AdeLabel::E8,
        }
    }
}

impl TryFrom<AdeLabel> for KodairaFiber {
    type Error = TateError;

    fn try_from(l: AdeLabel) -> Result<KodairaFiber, TateError> {
        Ok(match l {
            AdeLabel::A(0) => KodairaFiber::I(0),
            AdeLabel::A(n) => KodairaFiber::I(n + 1),
            AdeLabel::A0Star => KodairaFiber::I(1),
            AdeLabel::A0StarStar => KodairaFiber::II,
            AdeLabel::A1Star => KodairaFiber::III,
            AdeLabel::A2Star => KodairaFiber::IV,
            AdeLabel::D(n) if n >= 4 => KodairaFiber::IStar(n - 4),
            AdeLabel::D(n) => return Err(TateError::UnknownLabel(format!("D_{n}"))),
            AdeLabel::E6 => KodairaFiber::IVStar,
            AdeLabel::E7 => KodairaFiber::IIIStar,
            AdeLabel::E8 => KodairaFiber::IIStar,
        })
    }
}

impl fmt::Display for AdeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdeLabel::A(n) => write!(f, "A_{n}"),
            AdeLabel::A0Star => write!(f, "A_0^*"),
            AdeLabel::A0StarStar => write!(f, "A_0^**"),
            AdeLabel::A1Star => write!(f, "A_1^*"),
            AdeLabel::A2Star => write!(f, "A_2^*"),
            AdeLabel::D(n) => write!(f, "D_{n}"),
            AdeLabel::E6 => write!(f, "E_6"),
            AdeLabel::E7 => write!(f, "E_7"),
            AdeLabel::E8 => write!(f, "E_8"),
        }
    }
}

impl FromStr for AdeLabel {
    type Err = TateError;

    /// Accepts `A_0^*`, `A_0^{**}`, `A_{22}`, `D_5`, `E_8`, ...
    fn from_str(s: &str) -> Result<Self, TateError> {
        let err = || TateError::UnknownLabel(s.to_string());
        let t = normalize_label(s);
        let mut chars = t.chars();
        let kind = chars.next().ok_or_else(err)?;
        let rest = chars.as_str();
        let rest = rest.strip_prefix('_').unwrap_or(rest);
        let digits_end = rest.find(|c: char| !c.is_ascii_digit()).unwrap_or(rest.len());
        let (digits, stars) = rest.split_at(digits_end);
        let n: u32 = digits.parse().map_err(|_| err())?;
        let label = match (kind, n, stars) {
            ('A', n, "") => AdeLabel::A(n),
            ('A', 0, "*") => AdeLabel::A0Star,
            ('A', 0, "**") => AdeLabel::A0StarStar,
            ('A', 1, "*") => AdeLabel::A1Star,
            ('A', 2, "*") => AdeLabel::A2Star,
            ('D', n, "") if n >= 4 => AdeLabel::D(n),
            ('E', 6, "") => AdeLabel::E6,
            ('E', 7, "") => AdeLabel::E7,
            ('E', 8, "") => AdeLabel::E8,
            _ => return Err(err()),
        };
        Ok(label)
    }
}

/// Translates a Kodaira symbol into its A-D-E label or back.
///
/// ```
/// use k3wild::tate::dictionary;
///
/// assert_eq!(dictionary("I_1*").unwrap(), "D_5");
/// assert_eq!(dictionary("II*").unwrap(), "E_8");
/// assert_eq!(dictionary("A_0").unwrap(), "I_0");
/// ```
pub fn dictionary(label: &str) -> Result<String, TateError> {
    if let Ok(f) = label.parse::<KodairaFiber>() {
        return Ok(f.ade().to_string());
    }
    let ade: AdeLabel = label.parse()?;
    Ok(KodairaFiber::try_from(ade)?.to_string())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strictness {
    /// Smooth places classify as `I_0`.
    #[default]
    Lenient,
    /// Smooth places are an error.
    Strict,
}

/// Result of the valuation cascade at one place.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LocalReduction {
    pub fiber: KodairaFiber,
    /// Valuations on the minimal model; `None` stands for `+∞`.
    pub v_c4: Option<u32>,
    pub v_c6: Option<u32>,
    pub v_disc: u32,
    /// Number of `u¹²` factors removed from `Δ` to reach minimality.
    pub restarts: u32,
}

pub fn local_reduction(model: &WeierstrassModel, place: &Place, mode: Strictness) -> Result<LocalReduction, TateError> {
    let p = model.characteristic();
    if p < 5 {
        return Err(TateError::UnsupportedCharacteristic(p));
    }
    let (chart, pi) = match place {
        Place::Infinity => (model.chart_at_infinity(), model.field().t()),
        Place::Finite(pi) => {
            if pi.modulus() != p {
                return Err(TateError::PlaceMismatch);
            }
            (model.clone(), pi.clone())
        }
    };
    let inv = chart.invariants();
    let val = |f: &Poly| f.valuation(&pi);
    let mut v_c4 = val(&inv.c4);
    let mut v_c6 = val(&inv.c6);
    let mut v_disc = val(&inv.discriminant).expect("nonzero discriminant");
    let cap = inv.discriminant.degree().unwrap_or(0) / 12;
    let mut restarts = 0u32;
    while v_c4.is_none_or(|v| v >= 4) && v_c6.is_none_or(|v| v >= 6) && v_disc >= 12 {
        if restarts as usize >= cap {
            return Err(TateError::MinimalityCap(cap));
        }
        v_c4 = v_c4.map(|v| v - 4);
        v_c6 = v_c6.map(|v| v - 6);
        v_disc -= 12;
        restarts += 1;
    }
    let fiber = classify_valuations(v_c4, v_c6, v_disc)?;
    if fiber.is_smooth() && mode == Strictness::Strict {
        return Err(TateError::SmoothPlace(place.to_string()));
    }
    Ok(LocalReduction { fiber, v_c4, v_c6, v_disc, restarts })
}

/// Tame Kodaira table for a minimal model.
fn classify_valuations(v_c4: Option<u32>, v_c6: Option<u32>, v_disc: u32) -> Result<KodairaFiber, TateError> {
    if v_disc == 0 {
        return Ok(KodairaFiber::I(0));
    }
    if v_c4 == Some(0) {
        return Ok(KodairaFiber::I(v_disc));
    }
    let fiber = match v_disc {
        2 => KodairaFiber::II,
        3 => KodairaFiber::III,
        4 => KodairaFiber::IV,
        6 => KodairaFiber::IStar(0),
        d if d > 6 && v_c4 == Some(2) && v_c6 == Some(3) => KodairaFiber::IStar(d - 6),
        8 => KodairaFiber::IVStar,
        9 => KodairaFiber::IIIStar,
        10 => KodairaFiber::IIStar,
        _ => return Err(TateError::Unclassifiable(v_c4, v_c6, v_disc)),
    };
    Ok(fiber)
}

/// Geometric Kodaira type of the fiber over `place`.
pub fn tate_local(model: &WeierstrassModel, place: &Place, mode: Strictness) -> Result<KodairaFiber, TateError> {
    local_reduction(model, place, mode).map(|r| r.fiber)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberEntry {
    pub place: Place,
    pub fiber: KodairaFiber,
    /// Valuation of the minimal discriminant at the place.
    pub disc_valuation: u32,
}

/// All singular fibers of a model, one entry per closed point; a place of
/// degree `d` stands for `d` geometric fibers of its type.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FiberConfiguration {
    pub entries: Vec<FiberEntry>,
}

impl FiberConfiguration {
    /// `Σ deg(place) · e(fiber)`; 24 for a K3 surface.
    pub fn euler_sum(&self) -> u32 {
        self.entries.iter().map(|e| e.place.degree() as u32 * e.fiber.euler()).sum()
    }

    pub fn geometric_fiber_count(&self) -> usize {
        self.entries.iter().map(|e| e.place.degree()).sum()
    }

    /// Fiber type over `place`, `I_0` when it is not listed.
    pub fn fiber_at(&self, place: &Place) -> KodairaFiber {
        self.entries.iter().find(|e| e.place == *place).map_or(KodairaFiber::I(0), |e| e.fiber)
    }

    pub fn fibers(&self) -> impl Iterator<Item = &KodairaFiber> {
        self.entries.iter().map(|e| &e.fiber)
    }

    /// Geometric fibers expanded with multiplicity `deg(place)`.
    pub fn geometric_fibers(&self) -> Vec<KodairaFiber> {
        self.entries.iter().flat_map(|e| std::iter::repeat_n(e.fiber, e.place.degree())).collect()
    }

    /// Same configuration seen on `translate_t(m, c)`.
    pub fn translate(&self, c: Fp) -> FiberConfiguration {
        let mut entries: Vec<_> =
            self.entries.iter().map(|e| FiberEntry { place: e.place.translate(c), ..e.clone() }).collect();
        entries.sort_by(|a, b| a.place.canonical_cmp(&b.place));
        FiberConfiguration { entries }
    }

    /// Places grouped by fiber type: the finite loci multiply together, `∞`
    /// stays separate. Order follows the first occurrence of each group.
    pub fn grouped(&self) -> Vec<FiberGroup> {
        let mut groups: Vec<FiberGroup> = Vec::new();
        for e in &self.entries {
            let at_infinity = e.place.is_infinity();
            let idx = groups.iter().position(|g| g.fiber == e.fiber && g.at_infinity == at_infinity);
            let g = match idx {
                Some(i) => &mut groups[i],
                None => {
                    groups.push(FiberGroup { fiber: e.fiber, at_infinity, locus: None, count: 0 });
                    groups.last_mut().expect("just pushed")
                }
            };
            g.count += e.place.degree();
            if let Place::Finite(pi) = &e.place {
                g.locus = Some(match g.locus.take() {
                    None => pi.clone(),
                    Some(l) => &l * pi,
                });
            }
        }
        groups
    }

    pub fn to_record(&self) -> ConfigurationRecord {
        ConfigurationRecord {
            fibers: self
                .entries
                .iter()
                .map(|e| FiberRecord {
                    place: e.place.key(),
                    degree: e.place.degree(),
                    kodaira: e.fiber.to_string(),
                    ade: e.fiber.ade().to_string(),
                    e: e.fiber.euler(),
                    m: e.fiber.components(),
                })
                .collect(),
            euler_sum: self.euler_sum(),
        }
    }
}

/// Fibers of one type over a common locus, for summaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiberGroup {
    pub fiber: KodairaFiber,
    pub at_infinity: bool,
    /// Product of the finite places in the group.
    pub locus: Option<Poly>,
    pub count: usize,
}

/// Machine-readable fiber record; field names are stable.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberRecord {
    pub place: String,
    pub degree: usize,
    pub kodaira: String,
    pub ade: String,
    pub e: u32,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationRecord {
    pub fibers: Vec<FiberRecord>,
    pub euler_sum: u32,
}

/// Runs the cascade at every place where `Δ` vanishes. Places where the
/// model is merely non-minimal come out smooth and are dropped.
pub fn classify_fibration(model: &WeierstrassModel) -> Result<FiberConfiguration, TateError> {
    let mut entries = Vec::new();
    for place in model.singular_places() {
        let r = local_reduction(model, &place, Strictness::Lenient)?;
        if !r.fiber.is_smooth() {
            entries.push(FiberEntry { place, fiber: r.fiber, disc_valuation: r.v_disc });
        }
    }
    Ok(FiberConfiguration { entries })
}

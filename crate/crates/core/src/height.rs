//! Height pairing `⟨P, P⟩` of a section on an elliptic K3 surface, from the
//! intersection number `P·O` and the fiber components that `P` meets.
//!
//! ```text
//! ⟨P, P⟩ = 4 + 2·(P·O) − Σ_v contr_v(P)
//! ```
//!
//! The local term depends only on the fiber type and on the image `k` of the
//! met component in the component group, counted from the identity
//! component (`k = 0`).

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tate::KodairaFiber;

/// Exact rational in lowest terms with positive denominator.
pub type Rational = Ratio<i64>;

/// `2·χ(O_X)` for a K3 surface.
pub const K3_HEIGHT_CONSTANT: i64 = 4;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HeightError {
    #[error("component index {k} out of range for {fiber} (component group of order {order})")]
    ComponentOutOfRange { fiber: KodairaFiber, k: u32, order: u32 },
    #[error("orbit size must be at least 1")]
    EmptyOrbit,
}

/// Which simple component of an `I_n*` fiber is met. Index `1` is the near
/// component, `2` and `3` the far ones.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StarComponent {
    Identity,
    Near,
    Far,
}

impl StarComponent {
    pub fn from_index(k: u32) -> Option<StarComponent> {
        match k {
            0 => Some(StarComponent::Identity),
            1 => Some(StarComponent::Near),
            2 | 3 => Some(StarComponent::Far),
            _ => None,
        }
    }
}

/// Local correction `contr_v(P)` for a section meeting component `k`.
pub fn contr(fiber: KodairaFiber, k: u32) -> Result<Rational, HeightError> {
    let order = fiber.component_group_order();
    if k >= order {
        return Err(HeightError::ComponentOutOfRange { fiber, k, order });
    }
    if k == 0 {
        return Ok(Rational::zero());
    }
    let r = |n: i64, d: i64| Rational::new(n, d);
    Ok(match fiber {
        KodairaFiber::I(m) => {
            let (m, k) = (m as i64, k as i64);
            r(k * (m - k), m)
        }
        KodairaFiber::III => r(1, 2),
        KodairaFiber::IV => r(2, 3),
        KodairaFiber::IVStar => r(4, 3),
        KodairaFiber::IIIStar => r(3, 2),
        KodairaFiber::IStar(n) => match StarComponent::from_index(k) {
            Some(StarComponent::Near) => r(1, 1),
            _ => r(1, 1) + r(n as i64, 4),
        },
        // trivial component groups were handled by k == 0
        KodairaFiber::II | KodairaFiber::IIStar => unreachable!("component group is trivial"),
    })
}

/// The section meets component `component` of `orbit` fibers of this type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Incidence {
    pub fiber: KodairaFiber,
    pub component: u32,
    pub orbit: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SectionIncidence {
    /// Intersection number with the zero section.
    pub po: u32,
    pub met: Vec<Incidence>,
}

impl SectionIncidence {
    pub fn new(po: u32) -> Self {
        SectionIncidence { po, met: Vec::new() }
    }

    pub fn meets(mut self, fiber: KodairaFiber, component: u32, orbit: u32) -> Self {
        self.met.push(Incidence { fiber, component, orbit });
        self
    }
}

/// `4 + 2·po − Σ orbit · contr(fiber, component)`.
pub fn height_pairing(s: &SectionIncidence) -> Result<Rational, HeightError> {
    let mut h = Rational::from_integer(K3_HEIGHT_CONSTANT + 2 * s.po as i64);
    for inc in &s.met {
        if inc.orbit == 0 {
            return Err(HeightError::EmptyOrbit);
        }
        h -= contr(inc.fiber, inc.component)? * Rational::from_integer(inc.orbit as i64);
    }
    Ok(h)
}

/// Torsion sections have height zero.
pub fn is_torsion_candidate(s: &SectionIncidence) -> Result<bool, HeightError> {
    Ok(height_pairing(s)?.is_zero())
}

/// Wire form `{po, met: [{type, n, k, d}]}`; `n` is only read for `I_n`
/// and `I_n*`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IncidenceRecord {
    pub po: u32,
    #[serde(default)]
    pub met: Vec<MetRecord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MetRecord {
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub n: u32,
    pub k: u32,
    #[serde(default = "single_orbit")]
    pub d: u32,
}

fn single_orbit() -> u32 {
    1
}

impl MetRecord {
    pub fn fiber(&self) -> Result<KodairaFiber, crate::tate::TateError> {
        let label = match self.kind.trim() {
            "I" | "I_n" => format!("I_{}", self.n),
            "I*" | "I_n*" => format!("I_{}*", self.n),
            other => other.to_string(),
        };
        label.parse()
    }
}

impl IncidenceRecord {
    pub fn to_incidence(&self) -> Result<SectionIncidence, crate::tate::TateError> {
        let met = self
            .met
            .iter()
            .map(|m| Ok(Incidence { fiber: m.fiber()?, component: m.k, orbit: m.d }))
            .collect::<Result<_, crate::tate::TateError>>()?;
        Ok(SectionIncidence { po: self.po, met })
    }
}

/// `num/den`, or just `num` for integers.
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

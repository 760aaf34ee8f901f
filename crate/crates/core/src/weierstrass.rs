//! Weierstrass models `y² + a1·xy + a3·y = x³ + a2·x² + a4·x + a6` with
//! coefficients in `F_p[t]`, viewed as elliptic fibrations over `P¹`.
//!
//! A model of degree `n` needs `deg a_i ≤ i·n` so that it is integral on both
//! affine charts of `P¹`; `n = 2` is the K3 case, `n = 1` a rational elliptic
//! surface and `n = 0` the trivial product `E × P¹`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffpoly::{poly_factor, FieldError, Fp, Poly, PrimeField};

/// Weights of `a1, a2, a3, a4, a6`.
pub const WEIGHTS: [u32; 5] = [1, 2, 3, 4, 6];
const NAMES: [&str; 5] = ["a1", "a2", "a3", "a4", "a6"];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("characteristic {0} is not supported: only p >= 5 is handled (wild ramification in p = 2, 3)")]
    UnsupportedCharacteristic(u64),
    #[error("discriminant vanishes identically: the model is not an elliptic fibration")]
    Degenerate,
    #[error("deg {name} = {degree} exceeds the bound {bound} for n = {n}")]
    DegreeBound { name: &'static str, degree: usize, bound: u32, n: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("cannot parse model record: {0}")]
    Parse(String),
}

/// `c4³ / Δ` kept as an unreduced numerator/denominator pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JInvariant {
    pub numerator: Poly,
    pub denominator: Poly,
}

impl JInvariant {
    /// Denominator after cancelling the common factor with the numerator.
    pub fn reduced_denominator(&self) -> Poly {
        let g = self.numerator.gcd(&self.denominator).expect("same field");
        if g.is_zero() {
            return self.denominator.clone();
        }
        self.denominator.div_exact(&g).expect("gcd divides").monic()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelInvariants {
    pub b2: Poly,
    pub b4: Poly,
    pub b6: Poly,
    pub b8: Poly,
    pub c4: Poly,
    pub c6: Poly,
    pub discriminant: Poly,
    pub j: JInvariant,
}

impl ModelInvariants {
    fn compute(a: &[Poly; 5]) -> ModelInvariants {
        let [a1, a2, a3, a4, a6] = a;
        let k = a1.field();
        let c = |v: i64| k.constant(v);
        let b2 = &(a1 * a1) + &(&c(4) * a2);
        let b4 = &(&c(2) * a4) + &(a1 * a3);
        let b6 = &(a3 * a3) + &(&c(4) * a6);
        let b8 =
            &(&(&(&(a1 * a1) * a6) + &(&(&c(4) * a2) * a6)) - &(&(a1 * a3) * a4)) + &(&(&(a2 * a3) * a3) - &(a4 * a4));
        let c4 = &(&b2 * &b2) - &(&c(24) * &b4);
        let c6 = &(&(&(&c(-1) * &b2) * &(&b2 * &b2)) + &(&(&c(36) * &b2) * &b4)) - &(&c(216) * &b6);
        let discriminant = &(&(&(&c(-1) * &(&b2 * &b2)) * &b8) - &(&c(8) * &(&b4 * &(&b4 * &b4))))
            + &(&(&(&c(9) * &b2) * &(&b4 * &b6)) - &(&c(27) * &(&b6 * &b6)));
        let j = JInvariant { numerator: &c4 * &(&c4 * &c4), denominator: discriminant.clone() };
        ModelInvariants { b2, b4, b6, b8, c4, c6, discriminant, j }
    }
}

/// A Weierstrass fibration over `P¹_{F_p}` with cached invariants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeierstrassModel {
    field: PrimeField,
    a: [Poly; 5],
    n: u32,
    invariants: ModelInvariants,
}

impl WeierstrassModel {
    /// Validates characteristic, degree bounds and non-degeneracy.
    pub fn new(p: u64, coefficients: [Poly; 5], n: u32) -> Result<Self, ModelError> {
        let field = PrimeField::new(p)?;
        if p < 5 {
            return Err(ModelError::UnsupportedCharacteristic(p));
        }
        for (i, c) in coefficients.iter().enumerate() {
            if c.modulus() != p {
                return Err(FieldError::ModulusMismatch(c.modulus(), p).into());
            }
            let bound = WEIGHTS[i] * n;
            if let Some(degree) = c.degree().filter(|&d| d > bound as usize) {
                return Err(ModelError::DegreeBound { name: NAMES[i], degree, bound, n });
            }
        }
        let invariants = ModelInvariants::compute(&coefficients);
        if invariants.discriminant.is_zero() {
            return Err(ModelError::Degenerate);
        }
        Ok(WeierstrassModel { field, a: coefficients, n, invariants })
    }

    /// Short form `y² = x³ + A·x + B`.
    pub fn short(p: u64, a4: Poly, a6: Poly, n: u32) -> Result<Self, ModelError> {
        let k = PrimeField::new(p)?;
        Self::new(p, [Poly::zero(k), Poly::zero(k), Poly::zero(k), a4, a6], n)
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn characteristic(&self) -> u64 {
        self.field.characteristic()
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// `[a1, a2, a3, a4, a6]`.
    pub fn coefficients(&self) -> &[Poly; 5] {
        &self.a
    }

    pub fn invariants(&self) -> &ModelInvariants {
        &self.invariants
    }

    pub fn discriminant(&self) -> &Poly {
        &self.invariants.discriminant
    }

    /// Coefficients `(A, B)` of the isomorphic short form
    /// `y² = x³ − c4/48·x − c6/864`.
    pub fn short_form(&self) -> (Poly, Poly) {
        let k = self.field;
        let i48 = k.elem(-48).inv().expect("p >= 5");
        let i864 = k.elem(-864).inv().expect("p >= 5");
        (self.invariants.c4.scale(i48), self.invariants.c6.scale(i864))
    }

    /// The same surface in the coordinate `s = 1/t`; the fiber at `t = ∞`
    /// becomes the fiber at `s = 0`.
    pub fn chart_at_infinity(&self) -> WeierstrassModel {
        let a = std::array::from_fn(|i| {
            self.a[i].reciprocal((WEIGHTS[i] * self.n) as usize).expect("degree bound checked at construction")
        });
        Self::new(self.characteristic(), a, self.n).expect("chart change preserves validity")
    }

    /// Substitutes `t ↦ t + c` in every coefficient.
    pub fn translate_t(&self, c: Fp) -> WeierstrassModel {
        let a = std::array::from_fn(|i| self.a[i].translate(c));
        Self::new(self.characteristic(), a, self.n).expect("translation preserves validity")
    }

    /// Closed points of `P¹` with singular fiber: `∞` first (when present),
    /// then the irreducible factors of `Δ` in canonical order.
    pub fn singular_places(&self) -> Vec<Place> {
        let mut places = Vec::new();
        if self.singular_at_infinity() {
            places.push(Place::Infinity);
        }
        let fac = poly_factor(&self.invariants.discriminant).expect("nonzero discriminant");
        places.extend(fac.factors.into_iter().map(|(pi, _)| Place::Finite(pi)));
        places
    }

    /// `Δ` of the chart at infinity vanishes at `s = 0` iff `deg Δ < 12n`.
    pub fn singular_at_infinity(&self) -> bool {
        self.invariants.discriminant.degree().unwrap_or(0) < 12 * self.n as usize
    }

    pub fn to_record(&self) -> ModelRecord {
        let coeffs = |i: usize| self.a[i].signed_coefficients();
        ModelRecord {
            p: self.characteristic(),
            n: self.n,
            a1: coeffs(0),
            a2: coeffs(1),
            a3: coeffs(2),
            a4: coeffs(3),
            a6: coeffs(4),
        }
    }
}

impl fmt::Display for WeierstrassModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        let term = |c: &Poly, mono: &str| -> Option<String> {
            if c.is_zero() {
                None
            } else if c.is_one() {
                Some(if mono.is_empty() { "1".into() } else { mono.into() })
            } else if c.degree() == Some(0) || mono.is_empty() {
                let s = c.to_string();
                Some(if mono.is_empty() { s } else { format!("{s}{mono}") })
            } else {
                Some(format!("({c}){mono}"))
            }
        };
        let lhs: Vec<_> =
            std::iter::once(Some("y^2".to_string())).chain([term(a1, "xy"), term(a3, "y")]).flatten().collect();
        let rhs: Vec<_> = std::iter::once(Some("x^3".to_string()))
            .chain([term(a2, "x^2"), term(a4, "x"), term(a6, "")])
            .flatten()
            .collect();
        write!(f, "{} = {}  over F_{}", lhs.join(" + "), rhs.join(" + "), self.characteristic())
    }
}

/// A closed point of `P¹` over `F_p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Place {
    /// Zero locus of a monic irreducible polynomial.
    Finite(Poly),
    Infinity,
}

impl Place {
    /// Checks that `pi` is monic irreducible.
    pub fn finite(pi: Poly) -> Result<Place, FieldError> {
        if !pi.is_monic() || !poly_factor(&pi)?.is_irreducible() {
            return Err(FieldError::Reducible);
        }
        Ok(Place::Finite(pi))
    }

    /// Number of geometric points lying over this place.
    pub fn degree(&self) -> usize {
        match self {
            Place::Finite(pi) => pi.degree().expect("nonconstant"),
            Place::Infinity => 1,
        }
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Place::Infinity)
    }

    /// Image under the base automorphism `t ↦ t − c`: the place of
    /// `translate_t(m, c)` that carries the fiber `m` has here.
    pub fn translate(&self, c: Fp) -> Place {
        match self {
            Place::Finite(pi) => Place::Finite(pi.translate(c)),
            Place::Infinity => Place::Infinity,
        }
    }

    /// Stable machine rendering: `inf`, or the monic polynomial as an
    /// ascending coefficient list such as `[4, 0, 1]`.
    pub fn key(&self) -> String {
        match self {
            Place::Infinity => "inf".to_string(),
            Place::Finite(pi) => {
                let parts: Vec<_> = pi.coefficients().iter().map(u64::to_string).collect();
                format!("[{}]", parts.join(", "))
            }
        }
    }

    /// `∞` sorts first, then polynomials in canonical order.
    pub fn canonical_cmp(&self, other: &Place) -> std::cmp::Ordering {
        use std::cmp::Ordering::*;
        match (self, other) {
            (Place::Infinity, Place::Infinity) => Equal,
            (Place::Infinity, _) => Less,
            (_, Place::Infinity) => Greater,
            (Place::Finite(a), Place::Finite(b)) => a.canonical_cmp(b),
        }
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Infinity => write!(f, "inf"),
            Place::Finite(pi) => write!(f, "{pi}"),
        }
    }
}

/// Text record for a model: `p`, `n` and the coefficient lists `a1..a6` in
/// ascending degree, written in TOML syntax. Missing coefficients are zero.
///
/// ```
/// use k3wild::weierstrass::ModelRecord;
///
/// let rec = ModelRecord::parse("p = 5\nn = 2\na4 = [0, -1, 0, 0, 0, 1]\n").unwrap();
/// let model = rec.build().unwrap();
/// assert_eq!(model.to_string(), "y^2 = x^3 + (t^5 - t)x  over F_5");
/// assert_eq!(ModelRecord::parse(&rec.to_string()).unwrap(), rec);
/// ```
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelRecord {
    pub p: u64,
    #[serde(default = "k3_degree")]
    pub n: u32,
    #[serde(default)]
    pub a1: Vec<i64>,
    #[serde(default)]
    pub a2: Vec<i64>,
    #[serde(default)]
    pub a3: Vec<i64>,
    #[serde(default)]
    pub a4: Vec<i64>,
    #[serde(default)]
    pub a6: Vec<i64>,
}

fn k3_degree() -> u32 {
    2
}

impl ModelRecord {
    pub fn parse(text: &str) -> Result<ModelRecord, ModelError> {
        toml::from_str(text).map_err(|e| ModelError::Parse(e.message().to_string()))
    }

    pub fn build(&self) -> Result<WeierstrassModel, ModelError> {
        let field = PrimeField::new(self.p)?;
        if self.p < 5 {
            return Err(ModelError::UnsupportedCharacteristic(self.p));
        }
        let coeffs = [&self.a1, &self.a2, &self.a3, &self.a4, &self.a6].map(|c| field.poly(c));
        WeierstrassModel::new(self.p, coeffs, self.n)
    }
}

impl fmt::Display for ModelRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "p = {}", self.p)?;
        writeln!(f, "n = {}", self.n)?;
        for (name, c) in NAMES.iter().zip([&self.a1, &self.a2, &self.a3, &self.a4, &self.a6]) {
            let parts: Vec<_> = c.iter().map(i64::to_string).collect();
            writeln!(f, "{name} = [{}]", parts.join(", "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k(p: u64) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    fn example_11_1() -> WeierstrassModel {
        let f = k(11);
        WeierstrassModel::new(11, [Poly::zero(f), f.constant(1), Poly::zero(f), Poly::zero(f), f.artin_schreier()], 2)
            .unwrap()
    }

    #[test]
    fn builds_examples() {
        example_11_1();
        let f = k(5);
        assert!(WeierstrassModel::short(5, f.artin_schreier(), Poly::zero(f), 2).is_ok());
    }

    #[test]
    fn rejects_bad_models() {
        let f = k(7);
        let z = Poly::zero(f);
        assert_eq!(WeierstrassModel::short(7, z.clone(), z.clone(), 2), Err(ModelError::Degenerate));
        assert_eq!(
            WeierstrassModel::short(7, z.clone(), f.t().pow(13), 2),
            Err(ModelError::DegreeBound { name: "a6", degree: 13, bound: 12, n: 2 })
        );
        let f3 = k(3);
        assert_eq!(
            WeierstrassModel::short(3, Poly::zero(f3), f3.t(), 2),
            Err(ModelError::UnsupportedCharacteristic(3))
        );
        assert!(matches!(
            WeierstrassModel::short(7, z.clone(), f.t(), 0),
            Err(ModelError::DegreeBound { name: "a6", .. })
        ));
    }

    #[test]
    fn discriminant_of_cubic_twist() {
        // y² = x³ + (t⁷ − t): Δ = −432·(t⁷ − t)² and −432 ≡ 2 (mod 7)
        let f = k(7);
        let m = WeierstrassModel::short(7, Poly::zero(f), f.artin_schreier(), 2).unwrap();
        assert_eq!(f.elem(-432), f.elem(2));
        assert_eq!(*m.discriminant(), f.artin_schreier().pow(2).scale(f.elem(2)));
    }

    #[test]
    fn discriminant_of_quartic_twist() {
        // y² = x³ + (t⁵ − t)x: Δ = −64·(t⁵ − t)³ and −64 ≡ 1 (mod 5)
        let f = k(5);
        let m = WeierstrassModel::short(5, f.artin_schreier(), Poly::zero(f), 2).unwrap();
        assert_eq!(*m.discriminant(), f.artin_schreier().pow(3));
    }

    #[test]
    fn classical_identities() {
        let m = example_11_1();
        let inv = m.invariants();
        let f = m.field();
        let lhs = inv.discriminant.scale(f.elem(1728));
        let rhs = &inv.c4.pow(3) - &inv.c6.pow(2);
        assert_eq!(lhs, rhs);
        assert_eq!(inv.b8.scale(f.elem(4)), &(&inv.b2 * &inv.b6) - &inv.b4.pow(2));
    }

    #[test]
    fn short_form_has_same_discriminant() {
        let m = example_11_1();
        let (a, b) = m.short_form();
        let s = WeierstrassModel::short(11, a, b, 2).unwrap();
        assert_eq!(s.discriminant(), m.discriminant());
    }

    #[test]
    fn chart_at_infinity_example() {
        let m = example_11_1();
        let f = m.field();
        let inf = m.chart_at_infinity();
        // s¹² (1/s¹¹ − 1/s) = s − s¹¹
        assert_eq!(inf.coefficients()[4], f.poly(&[0, 1, 0, 0, 0, 0, 0, 0, 0, 0, 0, -1]));
        assert_eq!(inf.coefficients()[1], f.t().pow(4));
        assert_eq!(inf.chart_at_infinity(), m);
    }

    #[test]
    fn translation() {
        let f = k(5);
        let m = WeierstrassModel::short(5, f.artin_schreier(), Poly::zero(f), 2).unwrap();
        assert_eq!(m.translate_t(f.one()), m);
        assert_eq!(m.translate_t(f.zero()), m);
        let f7 = k(7);
        let m7 = WeierstrassModel::short(7, Poly::zero(f7), f7.t(), 2).unwrap();
        assert_eq!(m7.translate_t(f7.one()).coefficients()[4], f7.poly(&[1, 1]));
        let a = f7.elem(3);
        let b = f7.elem(6);
        assert_eq!(m7.translate_t(a).translate_t(b), m7.translate_t(a + b));
    }

    #[test]
    fn singular_places_of_example_11_1() {
        let m = example_11_1();
        let f = m.field();
        let places = m.singular_places();
        assert_eq!(places.len(), 13);
        assert_eq!(places[0], Place::Infinity);
        for (i, pl) in places[1..12].iter().enumerate() {
            assert_eq!(*pl, Place::Finite(f.poly(&[i as i64, 1])));
        }
        // t¹¹ − t + 4/27
        let c = f.ratio(4, 27).unwrap();
        let expected = &f.artin_schreier() + &f.poly_from_elems(&[c]).unwrap();
        assert_eq!(places[12], Place::Finite(expected));
    }

    #[test]
    fn constant_discriminant_places() {
        // n = 0 is the product E × P¹: Δ is a unit and no fiber degenerates
        let f = k(7);
        let m = WeierstrassModel::short(7, Poly::zero(f), f.constant(1), 0).unwrap();
        assert!(m.singular_places().is_empty());
        // the same curve read as n = 1 has deg Δ = 0 < 12 and picks up a fiber at ∞
        let m = WeierstrassModel::short(7, Poly::zero(f), f.constant(1), 1).unwrap();
        assert_eq!(m.singular_places(), vec![Place::Infinity]);
    }

    #[test]
    fn place_helpers() {
        let f = k(7);
        assert!(Place::finite(f.poly(&[0, 0, 1])).is_err());
        let pl = Place::finite(f.poly(&[1, 0, 1])).unwrap();
        assert_eq!(pl.degree(), 2);
        assert_eq!(pl.key(), "[1, 0, 1]");
        assert_eq!(Place::Infinity.key(), "inf");
        assert_eq!(Place::finite(f.t()).unwrap().translate(f.one()).key(), "[1, 1]");
    }

    #[test]
    fn record_round_trip() {
        let text = "p = 11\nn = 2\na2 = [1]\na6 = [0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1]\n";
        let rec = ModelRecord::parse(text).unwrap();
        let m = rec.build().unwrap();
        assert_eq!(m, example_11_1());
        let printed = rec.to_string();
        assert_eq!(ModelRecord::parse(&printed).unwrap(), rec);
        assert_eq!(m.to_record().build().unwrap(), m);
        assert!(matches!(ModelRecord::parse("p = 5\nb7 = [1]"), Err(ModelError::Parse(_))));
        assert_eq!(
            ModelRecord::parse("p = 3\na6 = [0, 1]").unwrap().build(),
            Err(ModelError::UnsupportedCharacteristic(3))
        );
    }
}

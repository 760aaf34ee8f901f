//! Singular fibers, heights and fiber configurations of elliptic K3 surfaces
//! over `F_p`.
//!
//! ```
//! use k3wild::tate::classify_fibration;
//! use k3wild::weierstrass::ModelRecord;
//!
//! // y² = x³ + (t⁵ − t)x over F_5
//! let model = ModelRecord::parse("p = 5\na4 = [0, -1, 0, 0, 0, 1]\n").unwrap().build().unwrap();
//! let config = classify_fibration(&model).unwrap();
//! assert_eq!(config.euler_sum(), 24);
//! assert_eq!(config.entries[0].fiber.to_string(), "III*");
//! ```
//!
//! Modules build on each other in order: [`ffpoly`] supplies `F_p[t]` and
//! factorization, [`weierstrass`] the models and their places, [`tate`] the
//! fiber types, [`height`] the height pairing, and [`enumerate`] the
//! combinatorial searches. Everything is exact; there is no floating point.

pub mod enumerate;
pub mod ffpoly;
pub mod height;
pub mod tate;
pub mod weierstrass;

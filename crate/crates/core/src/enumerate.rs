//! Exhaustive searches over fiber data of elliptic K3 surfaces carrying an
//! automorphism of order `p`.
//!
//! Everything here is a finite search with exact rational objectives. The
//! searches are small: Euler numbers of fibers sum to 24, so every multiset
//! enumerated has at most 24 members and usually far fewer.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ffpoly::is_prime;
use crate::height::Rational;
use crate::tate::{AdeLabel, KodairaFiber};

/// Euler number of a K3 surface.
pub const K3_EULER: u32 = 24;
/// Euler number of a rational elliptic surface.
pub const RATIONAL_EULER: u32 = 12;
/// Picard number bound for a K3 surface in the setting at hand.
pub const K3_PICARD_BOUND: u32 = 20;
/// Picard number of a rational elliptic surface.
pub const RATIONAL_PICARD: u32 = 10;
/// Value long asserted for the maximum of the contribution sum; the
/// exhaustive search below finds larger maxima for `p ≤ 23`.
pub const CLAIMED_CONTRIBUTION_MAXIMUM: i64 = 4;
/// A torsion section meets the zero section at the fixed fiber, so the
/// contribution sum would have to reach `4 + 2·1`.
pub const CONTRADICTION_THRESHOLD: i64 = 6;

const REFERENCE_CONFIGS: &str = include_str!("../data/wild_configurations.txt");

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerateError {
    #[error("p = {0} is not supported here")]
    UnsupportedPrime(u64),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("cannot parse configuration {0:?}: {1}")]
    BadLabel(String, String),
}

// ---------------------------------------------------------------------------
// contribution maxima

/// One multiplicative fiber `I_{a·p}` met by a `p`-torsion section at
/// component `i·a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiplicativeTerm {
    pub a: u32,
    pub i: u32,
}

impl MultiplicativeTerm {
    /// `i(p − i)a/p`.
    pub fn contribution(self, p: u64) -> Rational {
        let (a, i, p) = (self.a as i64, self.i as i64, p as i64);
        Rational::new(i * (p - i) * a, p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContributionMax {
    pub p: u64,
    pub value: Rational,
    /// Number of `IV` and `IV*` fibers (only nonzero for `p = 3`).
    pub iv: u32,
    pub iv_star: u32,
    /// Lexicographically first maximizer.
    pub terms: Vec<MultiplicativeTerm>,
}

impl ContributionMax {
    pub fn below_threshold(&self) -> bool {
        self.value < Rational::from_integer(CONTRADICTION_THRESHOLD)
    }

    pub fn matches_claim(&self) -> bool {
        self.value == Rational::from_integer(CLAIMED_CONTRIBUTION_MAXIMUM)
    }
}

/// Maximum of `Σ i(p−i)a/p` over multisets of terms with
/// `Σ p·a ≤ euler_budget` and `Σ (p·a − 1) ≤ picard_budget`.
fn best_multiplicative(p: u64, euler_budget: i64, picard_budget: i64) -> (Rational, Vec<MultiplicativeTerm>) {
    let mut best = (Rational::zero(), Vec::new());
    let mut stack = Vec::new();
    dfs_terms(p, euler_budget, picard_budget, None, &mut stack, Rational::zero(), &mut best);
    best
}

fn dfs_terms(
    p: u64,
    euler_left: i64,
    picard_left: i64,
    last: Option<MultiplicativeTerm>,
    stack: &mut Vec<MultiplicativeTerm>,
    value: Rational,
    best: &mut (Rational, Vec<MultiplicativeTerm>),
) {
    if value > best.0 {
        *best = (value, stack.clone());
    }
    let max_a = euler_left / p as i64;
    for a in 1..=max_a.max(0) as u32 {
        let euler = p as i64 * a as i64;
        let picard = euler - 1;
        if picard > picard_left {
            break;
        }
        for i in 1..p as u32 {
            let term = MultiplicativeTerm { a, i };
            // multisets: non-decreasing term order
            if last.is_some_and(|l| term < l) {
                continue;
            }
            stack.push(term);
            dfs_terms(
                p,
                euler_left - euler,
                picard_left - picard,
                Some(term),
                stack,
                value + term.contribution(p),
                best,
            );
            stack.pop();
        }
    }
}

/// Maximum contribution sum for a `p`-torsion section, `p ≥ 5`, subject to
/// `Σ p·a ≤ 24` and `Σ (p·a − 1) ≤ 20`.
pub fn max_contribution_sum(p: u64) -> Result<ContributionMax, EnumerateError> {
    if p < 5 || !is_prime(p) {
        return Err(EnumerateError::UnsupportedPrime(p));
    }
    let (value, terms) = best_multiplicative(p, K3_EULER as i64, K3_PICARD_BOUND as i64);
    Ok(ContributionMax { p, value, iv: 0, iv_star: 0, terms })
}

/// The `p = 3` variant, where `IV` (`s` of them) and `IV*` (`t`) fibers
/// contribute `2/3` and `4/3`: maximizes `2s/3 + 4t/3 + Σ i(3−i)a/3` under
/// `4s + 8t + 3Σa ≤ 24` and `2s + 6t + Σ(3a − 1) ≤ 20`.
pub fn max_contribution_sum_p3() -> ContributionMax {
    let mut best: Option<ContributionMax> = None;
    for s in 0..=6u32 {
        for t in 0..=3u32 {
            let euler_left = 24 - 4 * s as i64 - 8 * t as i64;
            let picard_left = 20 - 2 * s as i64 - 6 * t as i64;
            if euler_left < 0 || picard_left < 0 {
                continue;
            }
            let (rest, terms) = best_multiplicative(3, euler_left, picard_left);
            let value = Rational::new(2 * s as i64 + 4 * t as i64, 3) + rest;
            if best.as_ref().is_none_or(|b| value > b.value) {
                best = Some(ContributionMax { p: 3, value, iv: s, iv_star: t, terms });
            }
        }
    }
    best.expect("s = t = 0 is always admissible")
}

// ---------------------------------------------------------------------------
// wild configurations

/// Fiber types allowed for the pointwise-fixed fiber when `p > 3` and the
/// fibration is elliptic.
pub fn fixed_fiber_types(p: u64) -> Result<&'static [KodairaFiber], EnumerateError> {
    match p {
        11 => Ok(&[KodairaFiber::II]),
        7 => Ok(&[KodairaFiber::III, KodairaFiber::IIStar]),
        5 => Ok(&[KodairaFiber::IV, KodairaFiber::IIIStar]),
        _ => Err(EnumerateError::UnsupportedPrime(p)),
    }
}

/// A fixed fiber plus orbits of `p` isomorphic fibers, one representative
/// per orbit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WildConfig {
    pub p: u64,
    pub fixed: KodairaFiber,
    /// Orbit representatives, sorted.
    pub orbits: Vec<KodairaFiber>,
}

impl WildConfig {
    pub fn new(p: u64, fixed: KodairaFiber, mut orbits: Vec<KodairaFiber>) -> Self {
        orbits.sort();
        WildConfig { p, fixed, orbits }
    }

    pub fn euler_sum(&self) -> u32 {
        self.fixed.euler() + self.p as u32 * self.orbits.iter().map(|f| f.euler()).sum::<u32>()
    }

    /// Rank of the trivial lattice: zero section, fiber class and the
    /// non-identity components of every singular fiber.
    pub fn trivial_lattice_rank(&self) -> u32 {
        2 + (self.fixed.components() - 1) + self.p as u32 * self.orbits.iter().map(|f| f.components() - 1).sum::<u32>()
    }

    /// Orbit types with their geometric counts (`p` times the number of
    /// orbits of that type).
    pub fn orbit_counts(&self) -> Vec<(KodairaFiber, u32)> {
        let mut counts: BTreeMap<KodairaFiber, u32> = BTreeMap::new();
        for f in &self.orbits {
            *counts.entry(*f).or_default() += self.p as u32;
        }
        counts.into_iter().collect()
    }

    /// Parses `"A_2^* + 5A_2 + 5A_0^*"`: first term is the fixed fiber, every
    /// later coefficient must be a multiple of `p`.
    pub fn parse_label(p: u64, label: &str) -> Result<WildConfig, EnumerateError> {
        let bad = |why: &str| EnumerateError::BadLabel(label.to_string(), why.to_string());
        let mut terms = label.split('+').map(str::trim);
        let fixed_label: AdeLabel =
            terms.next().ok_or_else(|| bad("empty"))?.parse().map_err(|_| bad("fixed fiber"))?;
        let fixed = KodairaFiber::try_from(fixed_label).map_err(|_| bad("fixed fiber"))?;
        let mut orbits = Vec::new();
        for term in terms {
            let split = term.find(|c: char| !c.is_ascii_digit()).ok_or_else(|| bad("missing type"))?;
            let (count, ade) = term.split_at(split);
            let count: u64 = if count.is_empty() { 1 } else { count.parse().map_err(|_| bad("count"))? };
            if !count.is_multiple_of(p) {
                return Err(bad("count is not a multiple of p"));
            }
            let ade: AdeLabel = ade.parse().map_err(|_| bad("fiber type"))?;
            let fiber = KodairaFiber::try_from(ade).map_err(|_| bad("fiber type"))?;
            orbits.extend(std::iter::repeat_n(fiber, (count / p) as usize));
        }
        Ok(WildConfig::new(p, fixed, orbits))
    }
}

impl fmt::Display for WildConfig {
    /// A-D-E notation with geometric counts, e.g. `E_7 + 5A_0^* + 5A_1`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fixed.ade())?;
        for (fiber, count) in self.orbit_counts() {
            write!(f, " + {count}{}", fiber.ade())?;
        }
        Ok(())
    }
}

/// First constraint a configuration breaks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Violation {
    /// Euler numbers do not add up to 24.
    EulerSum,
    /// Fixed fiber type not allowed for this `p`.
    FixedFiber,
    /// No orbit of singular fibers.
    NoOrbit,
    /// Trivial lattice of rank above 20.
    Picard,
    /// No fiber type for the image of the fixed fiber on the quotient
    /// rational elliptic surface fits in Picard number 10.
    Quotient,
}

/// Independent re-check of every constraint the search applies.
pub fn validate(cfg: &WildConfig) -> Result<KodairaFiber, Violation> {
    let geometric: Vec<KodairaFiber> = std::iter::once(cfg.fixed)
        .chain(cfg.orbits.iter().flat_map(|f| std::iter::repeat_n(*f, cfg.p as usize)))
        .collect();
    if geometric.iter().map(|f| f.euler()).sum::<u32>() != K3_EULER {
        return Err(Violation::EulerSum);
    }
    if !fixed_fiber_types(cfg.p).is_ok_and(|allowed| allowed.contains(&cfg.fixed)) {
        return Err(Violation::FixedFiber);
    }
    if cfg.orbits.is_empty() || cfg.orbits.iter().any(|f| f.is_smooth()) {
        return Err(Violation::NoOrbit);
    }
    let rank = 2 + geometric.iter().map(|f| f.components() - 1).sum::<u32>();
    if rank > K3_PICARD_BOUND {
        return Err(Violation::Picard);
    }
    // on the quotient every orbit becomes a single fiber of the same type
    let orbit_euler: u32 = cfg.orbits.iter().map(|f| f.euler()).sum();
    let orbit_rank: u32 = cfg.orbits.iter().map(|f| f.components() - 1).sum();
    let target = RATIONAL_EULER.checked_sub(orbit_euler).ok_or(Violation::Quotient)?;
    let mut candidates = vec![KodairaFiber::I(0)];
    candidates.extend(KodairaFiber::singular_types(RATIONAL_EULER));
    candidates
        .into_iter()
        .filter(|v0| v0.euler() == target)
        .find(|v0| 2 + (v0.components() - 1) + orbit_rank <= RATIONAL_PICARD)
        .ok_or(Violation::Quotient)
}

/// All configurations for `p ∈ {5, 7, 11}` that pass the Euler, fixed-fiber,
/// orbit, Picard and quotient constraints. Sorted by descending Euler number
/// of the fixed fiber, then by orbit list.
pub fn enumerate_wild_configs(p: u64) -> Result<Vec<WildConfig>, EnumerateError> {
    let fixed_types = fixed_fiber_types(p)?;
    let universe = KodairaFiber::singular_types(K3_EULER);
    let mut out = Vec::new();
    for &fixed in fixed_types {
        let rest = K3_EULER - fixed.euler();
        if !rest.is_multiple_of(p as u32) {
            continue;
        }
        let orbit_euler = rest / p as u32;
        // Picard slack left after the fixed fiber, measured in orbit units
        let picard_slack = K3_PICARD_BOUND - 2 - (fixed.components() - 1);
        let mut stack = Vec::new();
        orbit_dfs(&universe, 0, orbit_euler, 0, &mut stack, &mut |orbits| {
            let rank: u32 = orbits.iter().map(|f| f.components() - 1).sum();
            if p as u32 * rank > picard_slack {
                return;
            }
            if quotient_fiber_exists(orbit_euler, rank) {
                out.push(WildConfig::new(p, fixed, orbits.to_vec()));
            }
        });
    }
    out.sort_by(|a, b| b.fixed.euler().cmp(&a.fixed.euler()).then_with(|| a.orbits.cmp(&b.orbits)));
    Ok(out)
}

/// Multisets from `universe[start..]` with Euler numbers summing to `target`.
fn orbit_dfs(
    universe: &[KodairaFiber],
    start: usize,
    target: u32,
    acc: u32,
    stack: &mut Vec<KodairaFiber>,
    emit: &mut dyn FnMut(&[KodairaFiber]),
) {
    if acc == target {
        if !stack.is_empty() {
            emit(stack);
        }
        return;
    }
    for (idx, &f) in universe.iter().enumerate().skip(start) {
        if acc + f.euler() > target {
            continue;
        }
        stack.push(f);
        orbit_dfs(universe, idx, target, acc + f.euler(), stack, emit);
        stack.pop();
    }
}

fn quotient_fiber_exists(orbit_euler: u32, orbit_rank: u32) -> bool {
    let Some(e0) = RATIONAL_EULER.checked_sub(orbit_euler) else {
        return false;
    };
    // fewest components among fiber types with Euler number e0
    let min_components = if e0 == 0 {
        Some(1)
    } else {
        KodairaFiber::singular_types(e0).into_iter().filter(|f| f.euler() == e0).map(|f| f.components()).min()
    };
    min_components.is_some_and(|m| 2 + (m - 1) + orbit_rank <= RATIONAL_PICARD)
}

/// Configurations shipped as reference data for `p`.
pub fn reference_configs(p: u64) -> Vec<WildConfig> {
    REFERENCE_CONFIGS
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .filter_map(|l| l.split_once(':'))
        .filter(|(q, _)| q.trim().parse() == Ok(p))
        .map(|(_, label)| WildConfig::parse_label(p, label).expect("reference data parses"))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConfigFlag {
    /// Present in the bundled reference list.
    #[serde(rename = "paper")]
    Reference,
    /// Passes every constraint but is absent from the reference list.
    #[serde(rename = "extra")]
    Extra,
}

impl ConfigFlag {
    pub fn as_str(self) -> &'static str {
        match self {
            ConfigFlag::Reference => "paper",
            ConfigFlag::Extra => "extra",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FlaggedConfig {
    pub config: WildConfig,
    pub flag: ConfigFlag,
    /// Smallest fiber type that fits as the image of the fixed fiber on the
    /// quotient.
    pub quotient_fiber: KodairaFiber,
}

/// [`enumerate_wild_configs`] with membership in the reference list marked,
/// plus reference entries the search missed (empty when sound).
pub fn flag_configs(p: u64) -> Result<(Vec<FlaggedConfig>, Vec<WildConfig>), EnumerateError> {
    let reference = reference_configs(p);
    let found = enumerate_wild_configs(p)?;
    let missing = reference.iter().filter(|r| !found.contains(r)).cloned().collect();
    let flagged = found
        .into_iter()
        .map(|config| {
            let flag = if reference.contains(&config) { ConfigFlag::Reference } else { ConfigFlag::Extra };
            let quotient_fiber = validate(&config).expect("search output satisfies every constraint");
            FlaggedConfig { config, flag, quotient_fiber }
        })
        .collect();
    Ok((flagged, missing))
}

/// Fiber entry of a configuration record; `locus` is `fixed` or `orbit`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigFiberRecord {
    pub locus: String,
    pub count: u32,
    pub kodaira: String,
    pub ade: String,
    pub e: u32,
    pub m: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WildConfigRecord {
    pub p: u64,
    pub label: String,
    pub fibers: Vec<ConfigFiberRecord>,
    pub euler_sum: u32,
    pub trivial_lattice_rank: u32,
    pub quotient_fiber: String,
    pub flag: ConfigFlag,
}

impl FlaggedConfig {
    pub fn to_record(&self) -> WildConfigRecord {
        let fiber = |locus: &str, f: KodairaFiber, count: u32| ConfigFiberRecord {
            locus: locus.to_string(),
            count,
            kodaira: f.to_string(),
            ade: f.ade().to_string(),
            e: f.euler(),
            m: f.components(),
        };
        let mut fibers = vec![fiber("fixed", self.config.fixed, 1)];
        fibers.extend(self.config.orbit_counts().into_iter().map(|(f, c)| fiber("orbit", f, c)));
        WildConfigRecord {
            p: self.config.p,
            label: self.config.to_string(),
            fibers,
            euler_sum: self.config.euler_sum(),
            trivial_lattice_rank: self.config.trivial_lattice_rank(),
            quotient_fiber: self.quotient_fiber.to_string(),
            flag: self.flag,
        }
    }
}

// ---------------------------------------------------------------------------
// torsion bound

/// Shape of the fibration forced by a `p`-torsion section.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TorsionCase {
    /// Fibers `I_{a·p}` plus at most two of `II`, `III`, `IV`; the
    /// multiplicative part satisfies `p·Σa ≤ 20`.
    MultiplicativeOnly,
    /// Fibers `I_{a·p}` plus one fiber of type `I_n*`, `IV*`, `III*` or
    /// `II*`; the multiplicative part satisfies `p·Σa ≤ 24`.
    OneAdditive,
}

impl TorsionCase {
    pub fn euler_budget(self) -> u32 {
        match self {
            TorsionCase::MultiplicativeOnly => 20,
            TorsionCase::OneAdditive => 24,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionScenario {
    pub p: u64,
    pub case: TorsionCase,
    /// The `a_v` of the fibers `I_{a_v·p}`.
    pub multiplicities: Vec<u32>,
}

impl TorsionScenario {
    pub fn euler(&self) -> u32 {
        self.p as u32 * self.multiplicities.iter().sum::<u32>()
    }

    pub fn components_beyond_identity(&self) -> u32 {
        self.multiplicities.iter().map(|a| self.p as u32 * a - 1).sum()
    }

    pub fn is_admissible(&self) -> bool {
        !self.multiplicities.is_empty()
            && self.euler() <= self.case.euler_budget()
            && self.components_beyond_identity() <= K3_PICARD_BOUND
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Blocker {
    Euler,
    ComponentCount,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case: TorsionCase,
    pub witness: Option<TorsionScenario>,
    /// Why no scenario exists; `None` when feasible.
    pub blocked_by: Option<Blocker>,
}

impl CaseOutcome {
    pub fn feasible(&self) -> bool {
        self.witness.is_some()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TorsionScan {
    pub p: u64,
    pub feasible: bool,
    pub cases: Vec<CaseOutcome>,
}

fn scan_case(p: u64, case: TorsionCase) -> CaseOutcome {
    let budget = case.euler_budget() / p as u32;
    let mut euler_ok = false;
    let mut witness = None;
    // partitions of every total A ≤ budget into parts a_v ≥ 1
    for total in 1..=budget {
        for parts in partitions(total) {
            let s = TorsionScenario { p, case, multiplicities: parts };
            euler_ok = true;
            if witness.is_none() && s.is_admissible() {
                witness = Some(s);
            }
        }
    }
    let blocked_by = match (&witness, euler_ok) {
        (Some(_), _) => None,
        (None, false) => Some(Blocker::Euler),
        (None, true) => Some(Blocker::ComponentCount),
    };
    CaseOutcome { case, witness, blocked_by }
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(cur.clone());
            return;
        }
        for part in (1..=n.min(max)).rev() {
            cur.push(part);
            go(n - part, part, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

/// For every prime `5 ≤ p ≤ p_max`, whether any torsion scenario survives.
pub fn torsion_bound_scan(p_max: u64) -> Result<Vec<TorsionScan>, EnumerateError> {
    if p_max < 5 {
        return Err(EnumerateError::InvalidArgument(format!("p_max = {p_max} is below 5")));
    }
    Ok((5..=p_max)
        .filter(|&p| is_prime(p))
        .map(|p| {
            let cases: Vec<_> =
                [TorsionCase::MultiplicativeOnly, TorsionCase::OneAdditive].map(|c| scan_case(p, c)).into();
            TorsionScan { p, feasible: cases.iter().any(CaseOutcome::feasible), cases }
        })
        .collect())
}

// ---------------------------------------------------------------------------
// parity and double-plane bounds

/// True iff every multiplicative fiber `I_n` (`n ≥ 1`) has an even number of
/// components.
pub fn parity_check<'a>(fibers: impl IntoIterator<Item = &'a KodairaFiber>) -> bool {
    fibers.into_iter().all(|f| match f {
        KodairaFiber::I(n) if *n > 0 => n % 2 == 0,
        _ => true,
    })
}

/// `p(N − d − 1) ≤ 2N − 2`.
pub fn oguiso_inequality(p: u64, n: u64, d: u64) -> bool {
    let lhs = (p as i128) * (n as i128 - d as i128 - 1);
    lhs <= 2 * n as i128 - 2
}

/// Pairs `(p, N)` with `p` an odd prime `≤ p_max`, `2 ≤ N ≤ n_max`, passing
/// the inequality with `d = 1`.
pub fn oguiso_pairs(p_max: u64, n_max: u64) -> Result<Vec<(u64, u64)>, EnumerateError> {
    if p_max < 2 || n_max < 2 {
        return Err(EnumerateError::InvalidArgument("p_max and n_max must be at least 2".into()));
    }
    Ok((3..=p_max)
        .filter(|&p| is_prime(p))
        .flat_map(|p| (2..=n_max).filter(move |&n| oguiso_inequality(p, n, 1)).map(move |n| (p, n)))
        .collect())
}

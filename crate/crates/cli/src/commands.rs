//! One function per subcommand. Each builds a serializable report, then
//! renders it either as text or as a single JSON object.

use std::fmt::Write as _;
use std::str::FromStr;

use k3wild::enumerate::{
    flag_configs, max_contribution_sum, max_contribution_sum_p3, oguiso_pairs, torsion_bound_scan, Blocker, ConfigFlag,
    ContributionMax, TorsionCase, WildConfigRecord, CLAIMED_CONTRIBUTION_MAXIMUM, CONTRADICTION_THRESHOLD, K3_EULER,
};
use k3wild::ffpoly::is_prime;
use k3wild::height::{format_rational, height_pairing, Incidence, IncidenceRecord, SectionIncidence};
use k3wild::tate::{classify_fibration, ConfigurationRecord, FiberConfiguration, KodairaFiber};
use k3wild::weierstrass::{ModelRecord, WeierstrassModel};
use serde::Serialize;

use crate::fixtures::{verify_example, ExampleReport, FixtureFile};
use crate::{read_input, AnalyzeArgs, BoundsArgs, CliError, EnumerateArgs, HeightArgs, Output, VerifyArgs};
use crate::{EXIT_OK, EXIT_VERIFICATION};

fn emit<T: Serialize>(json: bool, report: &T, text: String, code: i32) -> Output {
    let stdout = if json {
        let mut s = serde_json::to_string_pretty(report).expect("reports serialize");
        s.push('\n');
        s
    } else {
        text
    };
    Output { code, stdout, stderr: String::new() }
}

// ---------------------------------------------------------------------------
// analyze

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalyzeReport {
    pub model: String,
    pub p: u64,
    pub n: u32,
    #[serde(flatten)]
    pub configuration: ConfigurationRecord,
    /// `12·n`, the Euler number of the total space.
    pub expected_euler: u32,
    pub k3: bool,
}

pub fn analyze(a: &AnalyzeArgs) -> Result<Output, CliError> {
    let record = match (&a.example, &a.file) {
        (Some(id), _) => FixtureFile::bundled()
            .get(id)
            .ok_or_else(|| CliError::Usage(format!("no bundled example {id:?}")))?
            .model
            .clone(),
        (None, Some(path)) => ModelRecord::parse(&read_input(path)?)?,
        (None, None) => return Err(CliError::Usage("a model file or --example is required".into())),
    };
    let model = record.build()?;
    let config = classify_fibration(&model)?;
    let report = AnalyzeReport {
        model: model.to_string(),
        p: model.characteristic(),
        n: model.degree(),
        configuration: config.to_record(),
        expected_euler: 12 * model.degree(),
        k3: model.degree() == 2 && config.euler_sum() == K3_EULER,
    };
    Ok(emit(a.json, &report, analyze_text(&model, &config, &report), EXIT_OK))
}

/// `III* at inf (E_7); III ×5 at t^5 - t (A_1^*); euler_sum 24`.
pub fn summary_line(config: &FiberConfiguration) -> String {
    let mut parts: Vec<String> = config
        .grouped()
        .into_iter()
        .map(|g| {
            let at = match &g.locus {
                None => "inf".to_string(),
                Some(l) => l.to_string(),
            };
            let count = if g.count > 1 { format!(" ×{}", g.count) } else { String::new() };
            format!("{}{count} at {at} ({})", g.fiber, g.fiber.ade())
        })
        .collect();
    if parts.is_empty() {
        parts.push("no singular fibers".into());
    }
    parts.push(format!("euler_sum {}", config.euler_sum()));
    parts.join("; ")
}

fn analyze_text(model: &WeierstrassModel, config: &FiberConfiguration, r: &AnalyzeReport) -> String {
    let mut s = String::new();
    writeln!(s, "model: {}", r.model).unwrap();
    writeln!(s, "{:<24} {:>3}  {:<8} {:<8} {:>2} {:>2}", "place", "deg", "kodaira", "ade", "e", "m").unwrap();
    for e in &config.entries {
        let f = e.fiber;
        let (place, kodaira, ade) = (e.place.to_string(), f.to_string(), f.ade().to_string());
        let (deg, euler, m) = (e.place.degree(), f.euler(), f.components());
        writeln!(s, "{place:<24} {deg:>3}  {kodaira:<8} {ade:<8} {euler:>2} {m:>2}").unwrap();
    }
    writeln!(s, "{}", summary_line(config)).unwrap();
    let verdict = if r.configuration.euler_sum == r.expected_euler { "ok" } else { "MISMATCH" };
    if model.degree() == 2 {
        writeln!(s, "k3 check: euler_sum {} vs {} ({verdict})", r.configuration.euler_sum, r.expected_euler).unwrap();
    } else {
        writeln!(s, "euler check: euler_sum {} vs 12n = {} ({verdict})", r.configuration.euler_sum, r.expected_euler)
            .unwrap();
    }
    s
}

// ---------------------------------------------------------------------------
// verify-examples

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub examples: Vec<ExampleReport>,
    pub passed: usize,
    pub total: usize,
    pub pass: bool,
}

pub fn verify_examples(a: &VerifyArgs) -> Result<Output, CliError> {
    let file = match &a.fixture {
        Some(path) => FixtureFile::parse(&read_input(path)?)?,
        None => FixtureFile::bundled(),
    };
    let selected: Vec<_> = match &a.only {
        Some(id) => vec![file.get(id).ok_or_else(|| CliError::Usage(format!("no example with id {id:?}")))?],
        None => file.example.iter().collect(),
    };
    let mut examples = Vec::with_capacity(selected.len());
    let mut equations = Vec::with_capacity(selected.len());
    for ex in selected {
        equations.push(ex.equation.as_str());
        let report = match verify_example(ex) {
            Ok(r) => r,
            Err(e @ CliError::Fixture(_)) => return Err(e),
            Err(e) => ExampleReport { id: ex.id.clone(), pass: false, euler_sum: 0, mismatches: vec![e.to_string()] },
        };
        examples.push(report);
    }
    let passed = examples.iter().filter(|r| r.pass).count();
    let total = examples.len();
    let report = VerifyReport { examples, passed, total, pass: passed == total };

    let mut text = String::new();
    for (r, eq) in report.examples.iter().zip(&equations) {
        writeln!(text, "{}  {:<7} {eq}", if r.pass { "PASS" } else { "FAIL" }, r.id).unwrap();
        for m in &r.mismatches {
            writeln!(text, "      {m}").unwrap();
        }
    }
    writeln!(text, "{passed}/{total} PASS").unwrap();
    let code = if report.pass { EXIT_OK } else { EXIT_VERIFICATION };
    Ok(emit(a.json, &report, text, code))
}

// ---------------------------------------------------------------------------
// enumerate

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EnumerateReport {
    pub p: u64,
    pub configurations: Vec<WildConfigRecord>,
    pub paper: usize,
    pub extra: usize,
    /// Reference configurations the search did not produce.
    pub missing: Vec<String>,
}

pub fn enumerate(a: &EnumerateArgs) -> Result<Output, CliError> {
    let (flagged, missing) = flag_configs(a.p)?;
    let paper = flagged.iter().filter(|f| f.flag == ConfigFlag::Reference).count();
    let report = EnumerateReport {
        p: a.p,
        configurations: flagged.iter().map(|f| f.to_record()).collect(),
        paper,
        extra: flagged.len() - paper,
        missing: missing.iter().map(ToString::to_string).collect(),
    };
    let mut text = String::new();
    writeln!(text, "p = {}: {} configurations ({} paper, {} extra)", a.p, flagged.len(), report.paper, report.extra)
        .unwrap();
    for r in &report.configurations {
        writeln!(
            text,
            "{:<5}  {:<32} euler {}  rank {}  quotient {}",
            r.flag.as_str(),
            r.label,
            r.euler_sum,
            r.trivial_lattice_rank,
            r.quotient_fiber
        )
        .unwrap();
    }
    for m in &report.missing {
        writeln!(text, "MISSING  {m}").unwrap();
    }
    let code = if report.missing.is_empty() { EXIT_OK } else { EXIT_VERIFICATION };
    Ok(emit(a.json, &report, text, code))
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContributionLine {
    pub p: u64,
    pub maximum: String,
    pub below_six: bool,
    pub equals_four: bool,
    /// Fibers of one maximizer, e.g. `I_5@2`: fiber type and met component.
    pub maximizer: Vec<String>,
}

impl ContributionLine {
    fn new(m: &ContributionMax) -> Self {
        let mut maximizer: Vec<String> =
            m.terms.iter().map(|t| format!("{}@{}", KodairaFiber::I(t.a * m.p as u32), t.i * t.a)).collect();
        maximizer.extend(std::iter::repeat_n("IV".to_string(), m.iv as usize));
        maximizer.extend(std::iter::repeat_n("IV*".to_string(), m.iv_star as usize));
        ContributionLine {
            p: m.p,
            maximum: format_rational(&m.value),
            below_six: m.below_threshold(),
            equals_four: m.matches_claim(),
            maximizer,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TorsionLine {
    pub p: u64,
    pub feasible: bool,
    pub multiplicative_only: String,
    pub one_additive: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BoundsReport {
    pub contributions: Vec<ContributionLine>,
    pub contributions_ok: bool,
    pub torsion: Vec<TorsionLine>,
    /// No prime above 19 admits a torsion scenario.
    pub torsion_ok: bool,
    pub double_plane: Vec<(u64, u64)>,
    pub double_plane_ok: bool,
    pub ok: bool,
}

fn outcome_text(o: &k3wild::enumerate::CaseOutcome) -> String {
    match (&o.witness, o.blocked_by) {
        (Some(w), _) => {
            let fibers: Vec<String> =
                w.multiplicities.iter().map(|a| KodairaFiber::I(a * w.p as u32).to_string()).collect();
            format!("feasible ({})", fibers.join(" "))
        }
        (None, Some(Blocker::Euler)) => "blocked by euler".into(),
        (None, Some(Blocker::ComponentCount)) => "blocked by component-count".into(),
        (None, None) => "blocked".into(),
    }
}

/// Largest `N` with `p(N − 2) ≤ 2N − 2`, solved directly.
fn double_plane_closed_form(p_max: u64, n_max: u64) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    for p in (3..=p_max).filter(|&p| is_prime(p)) {
        let top = (2 * p - 2) / (p - 2);
        out.extend((2..=n_max.min(top)).map(|n| (p, n)));
    }
    out
}

pub fn bounds(a: &BoundsArgs) -> Result<Output, CliError> {
    if a.max_p < 5 {
        return Err(CliError::Usage(format!("--max-p {} is below 5", a.max_p)));
    }
    let mut contributions: Vec<ContributionLine> = Vec::new();
    for p in (5..=a.max_p).filter(|&p| is_prime(p)) {
        contributions.push(ContributionLine::new(&max_contribution_sum(p)?));
    }
    contributions.push(ContributionLine::new(&max_contribution_sum_p3()));
    let contributions_ok = contributions.iter().all(|c| c.below_six);

    let scan = torsion_bound_scan(a.max_p)?;
    let torsion: Vec<TorsionLine> = scan
        .iter()
        .map(|s| {
            let case = |c: TorsionCase| s.cases.iter().find(|o| o.case == c).map(outcome_text).unwrap_or_default();
            TorsionLine {
                p: s.p,
                feasible: s.feasible,
                multiplicative_only: case(TorsionCase::MultiplicativeOnly),
                one_additive: case(TorsionCase::OneAdditive),
            }
        })
        .collect();
    let torsion_ok = torsion.iter().all(|t| t.p <= 19 || !t.feasible);

    let double_plane = oguiso_pairs(a.max_p, a.max_n)?;
    let double_plane_ok = double_plane == double_plane_closed_form(a.max_p, a.max_n);
    let ok = contributions_ok && torsion_ok && double_plane_ok;
    let report =
        BoundsReport { contributions, contributions_ok, torsion, torsion_ok, double_plane, double_plane_ok, ok };

    let status = |b: bool| if b { "ok" } else { "VIOLATED" };
    let mut s = String::new();
    writeln!(
        s,
        "contribution maxima (contract: < {CONTRADICTION_THRESHOLD}; stated maximum {CLAIMED_CONTRIBUTION_MAXIMUM})"
    )
    .unwrap();
    for c in &report.contributions {
        let stated = if c.equals_four { "equals stated" } else { "differs from stated" };
        writeln!(
            s,
            "  p = {:<3} {:>6}  {}  {stated}  [{}]",
            c.p,
            c.maximum,
            if c.below_six { "< 6" } else { ">= 6" },
            c.maximizer.join(" ")
        )
        .unwrap();
    }
    writeln!(s, "  status: {}", status(report.contributions_ok)).unwrap();
    writeln!(s, "torsion scan (contract: infeasible for p > 19)").unwrap();
    for t in &report.torsion {
        writeln!(
            s,
            "  p = {:<3} {:<10}  multiplicative-only: {}; one-additive: {}",
            t.p,
            if t.feasible { "feasible" } else { "infeasible" },
            t.multiplicative_only,
            t.one_additive
        )
        .unwrap();
    }
    writeln!(s, "  status: {}", status(report.torsion_ok)).unwrap();
    writeln!(s, "double-plane inequality p(N - 2) <= 2N - 2, N <= {}", a.max_n).unwrap();
    let pairs: Vec<String> = report.double_plane.iter().map(|(p, n)| format!("({p},{n})")).collect();
    writeln!(s, "  {}", pairs.join(" ")).unwrap();
    writeln!(s, "  status: {}", status(report.double_plane_ok)).unwrap();
    writeln!(s, "overall: {}", status(report.ok)).unwrap();
    let code = if report.ok { EXIT_OK } else { EXIT_VERIFICATION };
    Ok(emit(a.json, &report, s, code))
}

// ---------------------------------------------------------------------------
// height

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HeightReport {
    pub height: String,
    pub torsion_candidate: bool,
}

/// `TYPE:K[:D]`, e.g. `I5:2:4`.
pub fn parse_met(spec: &str) -> Result<Incidence, CliError> {
    let bad = || CliError::Usage(format!("--met {spec:?}: expected TYPE:K[:D]"));
    let parts: Vec<&str> = spec.split(':').collect();
    let (kind, k, d) = match parts.as_slice() {
        [kind, k] => (*kind, *k, "1"),
        [kind, k, d] => (*kind, *k, *d),
        _ => return Err(bad()),
    };
    let fiber = KodairaFiber::from_str(kind).map_err(|e| CliError::Usage(e.to_string()))?;
    let component = k.trim().parse().map_err(|_| bad())?;
    let orbit = d.trim().parse().map_err(|_| bad())?;
    Ok(Incidence { fiber, component, orbit })
}

pub fn height(a: &HeightArgs) -> Result<Output, CliError> {
    let incidence = match (&a.input, a.po) {
        (Some(path), _) => {
            let text = read_input(path)?;
            let record: IncidenceRecord = if text.trim_start().starts_with('{') {
                serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("incidence record: {e}")))?
            } else {
                toml::from_str(&text).map_err(|e| CliError::Usage(format!("incidence record: {}", e.message())))?
            };
            record.to_incidence().map_err(|e| CliError::Usage(e.to_string()))?
        }
        (None, Some(po)) => {
            let met = a.met.iter().map(|m| parse_met(m)).collect::<Result<_, _>>()?;
            SectionIncidence { po, met }
        }
        (None, None) => return Err(CliError::Usage("either --po or --input is required".into())),
    };
    let h = height_pairing(&incidence)?;
    let report = HeightReport { height: format_rational(&h), torsion_candidate: *h.numer() == 0 };
    let text = format!("{}\n", report.height);
    Ok(emit(a.json, &report, text, EXIT_OK))
}

//! Named, replayable checks: every structural identity of the library is
//! bound to an executable verification over configured ring/module
//! instances.  The registry is fixed; a check either must pass or is a
//! report-only empirical search.  All randomness is seeded from the spec,
//! so reruns are reproducible.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::clifford::{CliffordAlgebra, CliffordElement, Mask};
use crate::error::{Error, Result};
use crate::groups::{self, GroupFlavor};
use crate::linalg::{self, Matrix};
use crate::orthogonal::{self, EnumRestrict, EulerData, OrthogonalMap, ReflectionData};
use crate::parse;
use crate::quadratic::QuadraticModule;
use crate::ring::{mu2_elements, mu2_in_idempotent_image, Idempotent, Ring, RingElement};
use crate::subalgebra::{self, SubalgebraKind};

pub const DEFAULT_BUDGET: usize = 10_000_000;
pub const DEFAULT_SEED: u64 = 0x0C11FF;

/// The fixed registry of check identifiers.
pub const REGISTRY: &[&str] = &[
    "lem-fog2",
    "lem-annby2",
    "lem-signaniso",
    "prop-zcalg",
    "prop-orthbasis",
    "prop-commcplus",
    "thm-ztildez",
    "rmk-char2",
    "lem-odecom",
    "lem-omperp",
    "lem-idem",
    "cor-xotimesu",
    "rmk-mref",
    "lem-rxrels",
    "lem-dettrans",
    "cor-deteuler",
    "prop-detref",
    "prop-trivref",
    "lem-gammaorth",
    "cor-invexist",
    "cor-ocl",
    "prop-impi",
    "rmk-liftrels",
    "cor-surj-field-case",
    "prop-gammainv",
    "thm-sesgamma",
    "cor-gammadecom",
    "eq-paravector-basics",
    "cor-remr",
    "lem-rxir1",
    "prop-paraorth",
    "prop-tildepi",
    "prop-notsurj",
    "prop-invpara",
    "thm-sespara",
    "prop-ehom",
    "rmk-condint-examples",
    "rmk-vahlen-filter",
    "conj-allmq",
    "conj-emptyint",
];

pub fn is_conjecture(id: &str) -> bool {
    id.starts_with("conj-")
}

/// A concrete instance: ring text plus module data.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ModuleSpec {
    pub ring: String,
    #[serde(default)]
    pub qdiag: Vec<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<Vec<Vec<i64>>>,
    /// Optional integer change of basis certifying the fraction-field
    /// pattern of the structure theorem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagonalizer: Option<Vec<Vec<i64>>>,
}

impl ModuleSpec {
    pub fn new(ring: &str, qdiag: &[i64]) -> ModuleSpec {
        ModuleSpec { ring: ring.into(), qdiag: qdiag.to_vec(), gram: None, diagonalizer: None }
    }

    pub fn with_gram(ring: &str, qdiag: &[i64], gram: &[&[i64]]) -> ModuleSpec {
        ModuleSpec {
            ring: ring.into(),
            qdiag: qdiag.to_vec(),
            gram: Some(gram.iter().map(|r| r.to_vec()).collect()),
            diagonalizer: None,
        }
    }

    pub fn with_diagonalizer(ring: &str, qdiag: &[i64], gram: &[&[i64]], t: &[&[i64]]) -> ModuleSpec {
        ModuleSpec {
            ring: ring.into(),
            qdiag: qdiag.to_vec(),
            gram: Some(gram.iter().map(|r| r.to_vec()).collect()),
            diagonalizer: Some(t.iter().map(|r| r.to_vec()).collect()),
        }
    }

    pub fn ring(&self) -> Result<Ring> {
        parse::parse_ring(&self.ring)
    }

    pub fn module(&self) -> Result<QuadraticModule> {
        let ring = self.ring()?;
        let qdiag: Vec<RingElement> = self.qdiag.iter().map(|&q| ring.from_i64(q)).collect();
        let gram = match &self.gram {
            Some(rows) => Some(Matrix::from_rows(
                ring.clone(),
                rows.iter()
                    .map(|r| r.iter().map(|&v| ring.from_i64(v)).collect())
                    .collect(),
            )),
            None => None,
        };
        QuadraticModule::new(ring, qdiag, gram)
    }

    pub fn algebra(&self) -> Result<CliffordAlgebra> {
        CliffordAlgebra::new(self.module()?)
    }

    pub fn diagonalizer_matrix(&self) -> Result<Option<Matrix>> {
        match &self.diagonalizer {
            None => Ok(None),
            Some(rows) => {
                let ring = self.ring()?;
                Ok(Some(Matrix::from_rows(
                    ring.clone(),
                    rows.iter()
                        .map(|r| r.iter().map(|&v| ring.from_i64(v)).collect())
                        .collect(),
                )))
            }
        }
    }

    pub fn describe(&self) -> String {
        let mut s = format!("ring={} qdiag={:?}", self.ring, self.qdiag);
        if self.gram.is_some() {
            s.push_str(" gram=custom");
        }
        s
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Expectation {
    MustPass,
    ReportOnly,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CheckSpec {
    pub id: String,
    /// When empty, the built-in battery for the id is used.
    #[serde(default)]
    pub instances: Vec<ModuleSpec>,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub expected: Expectation,
}

fn default_budget() -> usize {
    DEFAULT_BUDGET
}
fn default_seed() -> u64 {
    DEFAULT_SEED
}

impl CheckSpec {
    pub fn new(id: &str) -> Result<CheckSpec> {
        if !REGISTRY.contains(&id) {
            return Err(Error::UnknownCheck(id.into()));
        }
        Ok(CheckSpec {
            id: id.into(),
            instances: Vec::new(),
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
            expected: if is_conjecture(id) { Expectation::ReportOnly } else { Expectation::MustPass },
        })
    }
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Verdict {
    Pass,
    Fail,
    Skipped(String),
    Report(String),
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckReport {
    pub id: String,
    pub instances: Vec<String>,
    pub verdict: Verdict,
    pub witnesses: Value,
    pub wall_ms: u128,
}

impl CheckReport {
    pub fn is_failure(&self) -> bool {
        matches!(self.verdict, Verdict::Fail)
    }
}

/// Outcome of one instance of a check.
enum InstanceOutcome {
    Pass(Value),
    Fail(Value),
    Skip(String),
    Finding(Value),
}

/// Run one check against its configured or default instances.
pub fn run_check(spec: &CheckSpec) -> Result<CheckReport> {
    if !REGISTRY.contains(&spec.id.as_str()) {
        return Err(Error::UnknownCheck(spec.id.clone()));
    }
    let start = Instant::now();
    let instances = if spec.instances.is_empty() {
        default_instances(&spec.id)
    } else {
        spec.instances.clone()
    };
    let mut inst_names = Vec::new();
    let mut witnesses = Vec::new();
    let mut any_fail = false;
    let mut skips: Vec<String> = Vec::new();
    let mut findings = 0usize;
    for inst in &instances {
        inst_names.push(inst.describe());
        let outcome = run_instance(&spec.id, inst, spec.budget, spec.seed)?;
        match outcome {
            InstanceOutcome::Pass(w) => witnesses.push(json!({
                "instance": inst.describe(), "status": "pass", "detail": w
            })),
            InstanceOutcome::Fail(w) => {
                any_fail = true;
                witnesses.push(json!({
                    "instance": inst.describe(), "status": "fail", "detail": w
                }));
            }
            InstanceOutcome::Skip(reason) => {
                skips.push(reason.clone());
                witnesses.push(json!({
                    "instance": inst.describe(), "status": "skipped", "reason": reason
                }));
            }
            InstanceOutcome::Finding(w) => {
                findings += 1;
                witnesses.push(json!({
                    "instance": inst.describe(), "status": "finding", "detail": w
                }));
            }
        }
    }
    let verdict = if is_conjecture(&spec.id) || spec.expected == Expectation::ReportOnly {
        if findings > 0 {
            Verdict::Report(format!("{} finding(s) recorded", findings))
        } else if any_fail {
            Verdict::Report("search machinery failed".into())
        } else {
            Verdict::Report("no counterexample".into())
        }
    } else if any_fail {
        Verdict::Fail
    } else if witnesses.iter().all(|w| w["status"] == "skipped") && !instances.is_empty() {
        Verdict::Skipped(skips.join("; "))
    } else {
        Verdict::Pass
    };
    Ok(CheckReport {
        id: spec.id.clone(),
        instances: inst_names,
        verdict,
        witnesses: Value::Array(witnesses),
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Run a list of specs, optionally prepending the full default battery.
pub fn run_suite(specs: &[CheckSpec], default_instances_flag: bool) -> Result<Vec<CheckReport>> {
    let mut all: Vec<CheckSpec> = Vec::new();
    if default_instances_flag {
        for id in REGISTRY {
            all.push(CheckSpec::new(id)?);
        }
    }
    all.extend(specs.iter().cloned());
    let mut reports = Vec::new();
    for spec in &all {
        reports.push(run_check(spec)?);
    }
    Ok(reports)
}

pub fn suite_ok(reports: &[CheckReport]) -> bool {
    !reports.iter().any(|r| r.is_failure())
}

/// Render reports as a fixed-width table.
pub fn render_table(reports: &[CheckReport]) -> String {
    let mut out = String::new();
    out.push_str(&format!("{:<24} {:<40} {}\n", "check", "verdict", "instances"));
    for r in reports {
        let v = match &r.verdict {
            Verdict::Pass => "pass".to_string(),
            Verdict::Fail => "FAIL".to_string(),
            Verdict::Skipped(reason) => format!("skipped: {}", reason),
            Verdict::Report(s) => format!("report: {}", s),
        };
        out.push_str(&format!("{:<24} {:<40} {}\n", r.id, v, r.instances.len()));
    }
    out
}

/// The built-in battery per check id.
pub fn default_instances(id: &str) -> Vec<ModuleSpec> {
    let mk = ModuleSpec::new;
    let f2_paper = || ModuleSpec::with_gram("Z/2", &[1, 0], &[&[0, 1], &[1, 0]]);
    match id {
        "lem-fog2" => vec![
            mk("Z/2", &[1]),
            mk("Z/2", &[1, 0]),
            mk("Z/3", &[1, 0]),
            mk("Z/4", &[2, 1]),
            mk("Z/6", &[3, 1]),
        ],
        "lem-annby2" => vec![
            mk("Z/2", &[1]),
            mk("Z/4", &[1, 2]),
            mk("Z/6", &[1]),
            mk("Z", &[0, 1]),
        ],
        "lem-signaniso" => vec![
            mk("Z/2", &[1, 0, 1]),
            mk("Z/3", &[1, 2]),
            mk("Z/4", &[2, 1, 3]),
            mk("Z", &[0, 1, 2]),
        ],
        "prop-zcalg" => vec![
            mk("Z/6", &[1, 3]),
            mk("Z/4", &[2, 1]),
            mk("Z/3", &[1, 0]),
            mk("Z", &[0, 1]),
        ],
        "prop-orthbasis" | "prop-commcplus" => vec![
            mk("Z/2", &[1]),
            mk("Z/2", &[1, 0]),
            mk("Z/3", &[1]),
            mk("Z/3", &[1, 0]),
            mk("Z/4", &[1, 2]),
            mk("Z/6", &[3, 1]),
        ],
        "thm-ztildez" => {
            let mut out = Vec::new();
            for n in 1..=3usize {
                let mut q = vec![0i64; n];
                loop {
                    out.push(mk("Z", &q));
                    let mut p = 0;
                    loop {
                        if p == n {
                            break;
                        }
                        q[p] += 1;
                        if q[p] <= 2 {
                            break;
                        }
                        q[p] = 0;
                        p += 1;
                    }
                    if q.iter().all(|&v| v == 0) {
                        break;
                    }
                }
            }
            // fraction-field pattern with an integer diagonalizer
            out.push(ModuleSpec::with_diagonalizer(
                "Z",
                &[1, 1],
                &[&[2, 1], &[1, 2]],
                &[&[1, -1], &[0, 2]],
            ));
            out
        }
        "rmk-char2" => vec![
            mk("Z/2", &[1]),
            mk("Z/2", &[1, 0]),
            mk("Z/2", &[1, 1]),
            mk("Z/2[X]/(X^2)", &[1]),
            mk("Z/2[X]/(X^2)", &[1, 1]),
        ],
        "lem-odecom" | "lem-omperp" | "cor-xotimesu" => vec![
            mk("Z/3", &[1, 0]),
            mk("Z/2", &[1, 0]),
            mk("Z/3", &[1, 1]),
        ],
        "lem-idem" => vec![
            mk("Z/6", &[]),
            mk("Z/15", &[]),
            mk("Z/30", &[]),
            mk("Z[X]/(X^2-1)", &[]),
        ],
        "rmk-mref" => vec![mk("Z", &[0, 1]), mk("Z/6", &[0, 1])],
        "lem-rxrels" => vec![mk("Z/15", &[1]), mk("Z/6", &[1]), mk("Z/6", &[1, 1])],
        "lem-dettrans" => vec![
            mk("Z", &[1, 0, 2]),
            mk("Z/6", &[1, 3]),
            mk("Z/3", &[1, 1]),
        ],
        "cor-deteuler" => vec![
            mk("Z", &[0, 1]),
            mk("Z", &[0, 1, 2]),
            mk("Z/3", &[1, 0]),
            mk("Z/3", &[1]),
        ],
        "prop-detref" => vec![mk("Z/6", &[1]), mk("Z/6", &[1, 1]), mk("Z/15", &[1])],
        "prop-trivref" => vec![mk("Z/6", &[1]), f2_paper(), mk("Z/15", &[1])],
        "lem-gammaorth" => vec![mk("Z/3", &[1, 0]), mk("Z/4", &[2]), mk("Z/2", &[0])],
        "cor-invexist" => vec![mk("Z/3", &[1, 0]), f2_paper(), mk("Z/6", &[1])],
        "cor-ocl" => vec![mk("Z/3", &[1, 0]), mk("Z/6", &[1]), mk("Z/4", &[2])],
        "prop-impi" => vec![mk("Z/6", &[1]), mk("Z", &[0, 1]), mk("Z/3", &[1, 0])],
        "rmk-liftrels" => vec![mk("Z/15", &[1]), mk("Z/4", &[2, 2]), mk("Z", &[0, 1])],
        "cor-surj-field-case" => vec![
            mk("Z/3", &[1]),
            mk("Z/3", &[1, 1]),
            mk("Z/3", &[1, 0]),
            mk("Z/3", &[2, 1]),
        ],
        "prop-gammainv" => vec![mk("Z/3", &[1, 0]), mk("Z/6", &[1]), mk("Z", &[0, 1])],
        "thm-sesgamma" => vec![mk("Z/3", &[1, 0]), mk("Z/3", &[1])],
        "cor-gammadecom" => vec![mk("Z/15", &[1])],
        "eq-paravector-basics" => vec![
            mk("Z/6", &[1]),
            mk("Z/3", &[1, 0]),
            mk("Z/4", &[2, 1]),
            mk("Z", &[0, 1]),
        ],
        "cor-remr" => vec![mk("Z/6", &[1]), mk("Z/15", &[1])],
        "lem-rxir1" => vec![mk("Z/3", &[1]), mk("Z/6", &[1])],
        "prop-paraorth" => vec![mk("Z/3", &[1]), mk("Z/6", &[1]), mk("Z/2", &[1])],
        "prop-tildepi" => vec![mk("Z/6", &[1]), mk("Z/3", &[1]), mk("Z/3", &[1, 0])],
        "prop-notsurj" => vec![mk("Z/3", &[1]), mk("Z/3", &[1, 0])],
        "prop-invpara" => vec![mk("Z/3", &[1]), mk("Z/6", &[1])],
        "thm-sespara" => vec![mk("Z/3", &[1]), mk("Z/3", &[1, 0])],
        "prop-ehom" => vec![mk("Z/15", &[1])],
        "rmk-condint-examples" => vec![
            mk("Z/8", &[0]),
            ModuleSpec::with_gram("Z/4", &[2, 1], &[&[0, 2], &[2, 2]]),
            mk("Z/8", &[]),
        ],
        "rmk-vahlen-filter" => vec![mk("Z/3", &[1, 0]), mk("Z/3", &[0, 0, 0])],
        "conj-allmq" => vec![
            f2_paper(),
            mk("Z/2", &[0]),
            mk("Z/3", &[1, 0]),
            mk("Z/4", &[2]),
            mk("Z/6", &[1, 3]),
        ],
        "conj-emptyint" => vec![
            mk("Z/3", &[1]),
            mk("Z/3", &[1, 0]),
            mk("Z/4", &[1]),
            mk("Z/4", &[2]),
            mk("Z/6", &[1]),
            mk("Z/15", &[1]),
        ],
        _ => Vec::new(),
    }
}

// ---------------------------------------------------------------------------
// Per-check implementations.
// ---------------------------------------------------------------------------

fn run_instance(id: &str, inst: &ModuleSpec, budget: usize, seed: u64) -> Result<InstanceOutcome> {
    match id {
        "lem-fog2" => check_fog2(inst),
        "lem-annby2" => check_annby2(inst),
        "lem-signaniso" => check_signaniso(inst, seed),
        "prop-zcalg" => check_zcalg(inst),
        "prop-orthbasis" => check_closed_forms(inst, &[SubalgebraKind::TwistedCenter, SubalgebraKind::Center]),
        "prop-commcplus" => check_closed_forms(inst, &[SubalgebraKind::CentralizerEven, SubalgebraKind::EvenCenter]),
        "thm-ztildez" => check_ztildez(inst),
        "rmk-char2" => check_char2(inst),
        "lem-odecom" | "lem-omperp" | "cor-xotimesu" => check_sequences(inst, budget),
        "lem-idem" => check_idem(inst),
        "rmk-mref" => check_mref(inst),
        "lem-rxrels" => check_rxrels(inst),
        "lem-dettrans" => check_dettrans(inst, seed),
        "cor-deteuler" => check_deteuler(inst, seed),
        "prop-detref" => check_detref(inst, budget),
        "prop-trivref" => check_trivref(inst),
        "lem-gammaorth" => check_gammaorth(inst, budget),
        "cor-invexist" => check_invexist(inst, budget),
        "cor-ocl" => check_ocl(inst, budget),
        "prop-impi" => check_impi(inst),
        "rmk-liftrels" => check_liftrels(inst),
        "cor-surj-field-case" => check_surj_field(inst, budget),
        "prop-gammainv" => check_gammainv(inst, budget),
        "thm-sesgamma" => check_sesgamma(inst, budget),
        "cor-gammadecom" => check_gammadecom(inst, budget),
        "eq-paravector-basics" => check_paravector_basics(inst, seed),
        "cor-remr" => check_remr(inst),
        "lem-rxir1" => check_rxir1(inst, budget),
        "prop-paraorth" => check_paraorth(inst, budget),
        "prop-tildepi" => check_tildepi(inst, budget),
        "prop-notsurj" => check_notsurj(inst, budget),
        "prop-invpara" => check_invpara(inst, budget),
        "thm-sespara" => check_sespara(inst, budget),
        "prop-ehom" => check_ehom(inst, budget),
        "rmk-condint-examples" => check_condint(inst, budget),
        "rmk-vahlen-filter" => check_vahlen(inst, budget),
        "conj-allmq" => search_allmq(inst, budget),
        "conj-emptyint" => search_emptyint(inst, budget),
        _ => Err(Error::UnknownCheck(id.into())),
    }
}

fn pass_fail(ok: bool, detail: Value) -> InstanceOutcome {
    if ok {
        InstanceOutcome::Pass(detail)
    } else {
        InstanceOutcome::Fail(detail)
    }
}

fn check_fog2(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    if !module.is_orthogonal_basis() {
        return Ok(InstanceOutcome::Skip("needs an orthogonal basis".into()));
    }
    let ring = module.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let kernel = module.kernel_perp()?;
    let mut ok = true;
    for v in module.all_vectors()? {
        // closed conditions
        let in_perp_closed = (0..module.rank())
            .all(|i| v[i].mul_i64(2).mul(&module.qdiag()[i]).is_zero());
        let qv: RingElement = {
            let mut acc = ring.zero();
            for i in 0..module.rank() {
                acc = acc.add(&v[i].mul(&v[i]).mul(&module.qdiag()[i]));
            }
            acc
        };
        let in_qperp_closed = in_perp_closed && qv.is_zero();
        let in_perp = linalg::in_span(&ring, &kernel.perp, &v)?;
        let in_qperp = linalg::in_span(&ring, &kernel.qperp, &v)?;
        if in_perp != in_perp_closed || in_qperp != in_qperp_closed {
            ok = false;
        }
        // q restricted to M-perp is additive into R[2]
        if in_perp && !qv.mul_i64(2).is_zero() {
            ok = false;
        }
    }
    // over an F2-algebra the pairing vanishes identically
    if ring.from_i64(2).is_zero() {
        let all = module.all_vectors()?;
        for v in &all {
            if !linalg::in_span(&ring, &kernel.perp, v)? {
                ok = false;
            }
        }
    }
    // additivity of q on M-perp, pairwise
    let members = module.span_members(&kernel.perp)?;
    for a in &members {
        for b in &members {
            let sum: Vec<RingElement> = a.iter().zip(b.iter()).map(|(x, y)| x.add(y)).collect();
            let lhs = module.eval_q(&sum)?;
            let rhs = module.eval_q(a)?.add(&module.eval_q(b)?);
            if lhs != rhs {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"perp_generators": kernel.perp.len(), "qperp_generators": kernel.qperp.len()})))
}

fn check_annby2(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    let gens = algebra.grade_fixed_generators()?;
    let gen_vecs: Vec<Vec<RingElement>> = gens.iter().map(|g| g.coeffs().to_vec()).collect();
    let mut ok = true;
    if ring.is_finite() {
        for a in algebra.all_elements()? {
            let fixed = a.grade_involution() == a;
            let in_span = linalg::in_span(&ring, &gen_vecs, a.coeffs())?;
            if fixed != in_span {
                ok = false;
            }
        }
    } else {
        // generators are fixed; over a 2-regular ring they all lie in C+
        for g in &gens {
            if g.grade_involution() != *g {
                ok = false;
            }
            if ring.is_two_regular() && !g.odd_part().is_zero() {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"two_regular": ring.is_two_regular()})))
}

fn check_signaniso(inst: &ModuleSpec, seed: u64) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.module().is_orthogonal_basis() {
        return Ok(InstanceOutcome::Skip("needs an orthogonal basis".into()));
    }
    let ring = algebra.ring().clone();
    let mut ok = true;
    let mut tested = 0usize;
    let elements: Vec<CliffordElement> = if ring.is_finite() {
        algebra.all_elements()?
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..200)
            .map(|_| {
                let coeffs: Vec<RingElement> = (0..algebra.dim())
                    .map(|_| ring.from_i64(rng.gen_range(-5..=5)))
                    .collect();
                algebra.from_coeffs(coeffs)
            })
            .collect()
    };
    for a in &elements {
        for i in 0..algebra.rank() {
            tested += 1;
            if a.mul_generator_fast(i)? != a.mul(&algebra.generator(i)) {
                ok = false;
            }
            if a.gen_mul_fast(i)? != algebra.generator(i).mul(a) {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"products_tested": tested})))
}

fn check_zcalg(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    let zt = subalgebra::twisted_center(&algebra)?;
    let zc = subalgebra::center(&algebra)?;
    let zp = subalgebra::even_center(&algebra)?;
    let comm = subalgebra::centralizer_even(&algebra)?;
    let mut ok = true;
    // graded and involution-stable
    for sub in [&zt, &zc, &zp, &comm] {
        for g in sub.generators() {
            for img in [
                g.even_part(),
                g.odd_part(),
                g.grade_involution(),
                g.transpose(),
                g.clifford_involution(),
            ] {
                if !sub.contains(&img)? {
                    ok = false;
                }
            }
        }
    }
    // containments and the even-part identities
    for g in zc.generators() {
        if !comm.contains(g)? {
            ok = false;
        }
    }
    for g in zt.generators() {
        if !comm.contains(g)? {
            ok = false;
        }
    }
    let evens = |s: &subalgebra::Subalgebra| -> Vec<Vec<RingElement>> {
        s.generators().iter().map(|g| g.even_part().coeffs().to_vec()).collect()
    };
    if !linalg::spans_equal(&ring, &evens(&zc), &evens(&zt))? {
        ok = false;
    }
    if !linalg::spans_equal(&ring, &evens(&comm), &{
        let v: Vec<Vec<RingElement>> =
            zp.generators().iter().map(|g| g.coeffs().to_vec()).collect();
        v
    })? {
        ok = false;
    }
    // odd twisted-central elements satisfy alpha beta = beta' alpha
    let witnesses: Vec<CliffordElement> = if ring.is_finite() && algebra.dim() <= 4 {
        algebra.all_elements()?
    } else {
        (0..algebra.dim() as u32).map(|m| algebra.basis(m)).collect()
    };
    for g in zt.generators() {
        let odd = g.odd_part();
        if odd.is_zero() {
            continue;
        }
        for beta in &witnesses {
            if odd.mul(beta) != beta.grade_involution().mul(&odd) {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({
        "twisted_center_generators": zt.generators().len(),
        "center_generators": zc.generators().len(),
    })))
}

fn check_closed_forms(inst: &ModuleSpec, kinds: &[SubalgebraKind]) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.module().is_orthogonal_basis() {
        return Ok(InstanceOutcome::Skip("needs an orthogonal basis".into()));
    }
    if !algebra.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("exhaustive comparison needs a finite ring".into()));
    }
    let mut ok = true;
    let mut tested = 0usize;
    for kind in kinds {
        let sub = subalgebra::compute(&algebra, *kind)?;
        for elem in algebra.all_elements()? {
            tested += 1;
            let fast = subalgebra::orthobasis_membership(&elem, *kind)?;
            let slow = sub.contains(&elem)?;
            if fast != slow {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"memberships_tested": tested})))
}

fn check_ztildez(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let diag = inst.diagonalizer_matrix()?;
    let report = subalgebra::verify_ztildez(&algebra, diag.as_ref())?;
    if !report.hypotheses_hold {
        return Ok(InstanceOutcome::Skip(
            report.skipped_reason.unwrap_or_else(|| "hypotheses not certified".into()),
        ));
    }
    let detail = serde_json::to_value(&report).unwrap_or(Value::Null);
    Ok(pass_fail(report.pass, detail))
}

fn check_char2(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.from_i64(2).is_zero() {
        return Ok(InstanceOutcome::Skip("needs an F2-algebra".into()));
    }
    if !algebra.module().is_orthogonal_basis() {
        return Ok(InstanceOutcome::Skip("needs an orthogonal basis".into()));
    }
    let all: Vec<CliffordElement> = (0..algebra.dim()).map(|m| algebra.basis(m as Mask)).collect();
    let evens: Vec<CliffordElement> = (0..algebra.dim())
        .filter(|m| (*m as Mask).count_ones() % 2 == 0)
        .map(|m| algebra.basis(m as Mask))
        .collect();
    let mut ok = true;
    for kind in [
        SubalgebraKind::Center,
        SubalgebraKind::TwistedCenter,
        SubalgebraKind::CentralizerEven,
    ] {
        let sub = subalgebra::compute(&algebra, kind)?;
        if !sub.equals_span(&all)? {
            ok = false;
        }
    }
    let zp = subalgebra::even_center(&algebra)?;
    if !zp.equals_span(&evens)? {
        ok = false;
    }
    Ok(pass_fail(ok, json!({"dim": algebra.dim()})))
}

fn check_sequences(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    if !module.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let report = orthogonal::sequence_checks(&module, budget)?;
    if !report.split_available {
        return Ok(InstanceOutcome::Skip(
            report.skipped_reason.unwrap_or_else(|| "no basis-aligned kernel".into()),
        ));
    }
    let detail = serde_json::to_value(&report).unwrap_or(Value::Null);
    Ok(pass_fail(report.pass, detail))
}

fn check_idem(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let ring = inst.ring()?;
    // the polynomial-ring instance certifies the counterexample instead
    if let crate::ring::RingKind::QuotientPoly { .. } = ring.kind() {
        let x = ring.poly_gen()?;
        let in_mu2 = x.mul(&x).is_one();
        let in_image = mu2_in_idempotent_image(&x)?;
        let ok = in_mu2 && !in_image && mu2_in_idempotent_image(&ring.one().neg())?;
        return Ok(pass_fail(ok, json!({"delta": x.to_string(), "in_mu2": in_mu2, "in_idempotent_image": in_image})));
    }
    let idems = ring.idempotents()?;
    let mut ok = true;
    for e in &idems {
        // closure and basic laws
        if e.xor(e).element() != &ring.zero() {
            ok = false;
        }
        if e.complement().element() != &ring.one().sub(e.element()) {
            ok = false;
        }
        let m = e.to_mu2();
        if !m.mul(&m).is_one() {
            ok = false;
        }
        for f in &idems {
            let x = e.xor(f);
            if x.element().mul(x.element()) != *x.element() {
                ok = false;
            }
            if e.xor(f) != f.xor(e) {
                ok = false;
            }
            // the map into mu_2 is multiplicative
            if e.xor(f).to_mu2() != e.to_mu2().mul(&f.to_mu2()) {
                ok = false;
            }
            // product stays idempotent, distributivity
            let p = e.element().mul(f.element());
            if p.mul(&p) != p {
                ok = false;
            }
            for g in &idems {
                if e.xor(f).xor(g) != e.xor(&f.xor(g)) {
                    ok = false;
                }
                let lhs = Idempotent::new(g.element().mul(&e.xor(f).element().clone()))?;
                let rhs = Idempotent::new(g.element().mul(e.element()))?
                    .xor(&Idempotent::new(g.element().mul(f.element()))?);
                if lhs != rhs {
                    ok = false;
                }
            }
        }
    }
    // kernel of the mu_2 map is Idem(R) intersect R[2]
    for e in &idems {
        let in_kernel = e.to_mu2().is_one();
        let two_torsion = e.element().mul_i64(2).is_zero();
        if in_kernel != two_torsion {
            ok = false;
        }
    }
    // every square root of 1 is classified by the image test
    for d in mu2_elements(&ring)? {
        let claimed = mu2_in_idempotent_image(&d)?;
        let actual = idems.iter().any(|e| e.to_mu2() == d);
        if claimed != actual {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"idempotents": idems.iter().map(|e| e.element().to_string()).collect::<Vec<_>>()})))
}

fn check_mref(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    let kernel = module.kernel_perp()?;
    let mut ok = true;
    let mut tested = 0usize;
    // u ranges over M-perp (members over finite rings, small multiples over Z)
    let us: Vec<Vec<RingElement>> = if ring.is_finite() {
        module.span_members(&kernel.perp)?
    } else {
        let mut out = Vec::new();
        for g in &kernel.perp {
            for a in -2i64..=2 {
                out.push(g.iter().map(|c| c.mul_i64(a)).collect());
            }
        }
        out
    };
    for e in ring.idempotents()? {
        for u in &us {
            let qu = module.eval_q(u)?;
            if !e.element().mul(&qu).is_zero() {
                continue;
            }
            // x in eM with q(x) in (eR)^x: scaled basis vectors suffice here
            for j in 0..module.rank() {
                let x: Vec<RingElement> = module
                    .basis_vector(j)
                    .iter()
                    .map(|c| c.mul(e.element()))
                    .collect();
                let data = match ReflectionData::new(module.clone(), e.clone(), x.clone()) {
                    Ok(d) => d,
                    Err(_) => continue,
                };
                let qx = module.eval_q(&x)?;
                let shifted: Vec<RingElement> =
                    x.iter().zip(u.iter()).map(|(xi, ui)| xi.sub(&qx.mul(ui))).collect();
                let shifted_data =
                    match ReflectionData::new(module.clone(), e.clone(), shifted) {
                        Ok(d) => d,
                        Err(_) => continue,
                    };
                let euler = EulerData::new(module.clone(), u.clone(), x)?.euler_map()?;
                tested += 1;
                if data
                    .reflection()?
                    .compose(&shifted_data.reflection()?)
                    != euler
                {
                    ok = false;
                }
            }
        }
    }
    Ok(pass_fail(ok, json!({"factorizations_tested": tested})))
}

fn check_rxrels(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let idems = ring.idempotents()?;
    let mut ok = true;
    let mut tested = 0usize;
    for (data, rx) in orthogonal::all_reflections(&module)? {
        let x = data.vector().to_vec();
        for eps in &idems {
            // eps x defines an (e eps)-reflection
            let ex: Vec<RingElement> = x.iter().map(|c| c.mul(eps.element())).collect();
            let scaled = match ReflectionData::new(
                module.clone(),
                Idempotent::new(data.idempotent().element().mul(eps.element()))?,
                ex.clone(),
            ) {
                Ok(d) => d,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            let r_scaled = scaled.reflection()?;
            tested += 1;
            // acts like r_x on eps M and trivially on (1 - eps) M
            for v in module.all_vectors()? {
                let ev: Vec<RingElement> =
                    v.iter().map(|c| c.mul(eps.element())).collect();
                if r_scaled.apply(&ev) != rx.apply(&ev) {
                    ok = false;
                }
                let cv: Vec<RingElement> = v
                    .iter()
                    .map(|c| c.mul(&ring.one().sub(eps.element())))
                    .collect();
                if r_scaled.apply(&cv) != cv {
                    ok = false;
                }
            }
            // r_{eps x} r_{veps x} = r_{(eps xor veps) x}
            for veps in &idems {
                let vx: Vec<RingElement> =
                    x.iter().map(|c| c.mul(veps.element())).collect();
                let dv = match ReflectionData::new(
                    module.clone(),
                    Idempotent::new(data.idempotent().element().mul(veps.element()))?,
                    vx,
                ) {
                    Ok(d) => d,
                    Err(_) => {
                        ok = false;
                        continue;
                    }
                };
                let combined = eps.xor(veps);
                let cx: Vec<RingElement> =
                    x.iter().map(|c| c.mul(combined.element())).collect();
                let dc = match ReflectionData::new(
                    module.clone(),
                    Idempotent::new(data.idempotent().element().mul(combined.element()))?,
                    cx,
                ) {
                    Ok(d) => d,
                    Err(_) => {
                        ok = false;
                        continue;
                    }
                };
                if r_scaled.compose(&dv.reflection()?) != dc.reflection()? {
                    ok = false;
                }
            }
        }
    }
    // orthogonal idempotents: r_x r_y = r_{x+y}
    for (dx, rx) in orthogonal::all_reflections(&module)? {
        for (dy, ry) in orthogonal::all_reflections(&module)? {
            if !dx.idempotent().element().mul(dy.idempotent().element()).is_zero() {
                continue;
            }
            let sum_e = Idempotent::new(
                dx.idempotent().element().add(dy.idempotent().element()),
            )?;
            let sum_x: Vec<RingElement> = dx
                .vector()
                .iter()
                .zip(dy.vector().iter())
                .map(|(a, b)| a.add(b))
                .collect();
            let ds = match ReflectionData::new(module.clone(), sum_e, sum_x) {
                Ok(d) => d,
                Err(_) => {
                    ok = false;
                    continue;
                }
            };
            tested += 1;
            if rx.compose(&ry) != ds.reflection()? {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"relations_tested": tested})))
}

fn check_dettrans(inst: &ModuleSpec, seed: u64) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ok = true;
    let sample = |rng: &mut ChaCha8Rng, ring: &Ring, module: &QuadraticModule| -> Vec<RingElement> {
        (0..module.rank())
            .map(|_| ring.from_i64(rng.gen_range(-6i64..=6)))
            .collect()
    };
    for _ in 0..200 {
        let z = sample(&mut rng, &ring, &module);
        let t = sample(&mut rng, &ring, &module);
        let (mat, det) = orthogonal::transvection(&module, &z, &t)?;
        if mat.det() != det {
            ok = false;
        }
    }
    // z = 0 gives the identity; t in M-perp gives det 1
    let zero = module.zero_vector();
    let (mat, det) = orthogonal::transvection(&module, &zero, &module.basis_vector(0))?;
    if !mat.is_identity() || !det.is_one() {
        ok = false;
    }
    for g in module.kernel_perp()?.perp {
        let z = sample(&mut rng, &ring, &module);
        let (_, det) = orthogonal::transvection(&module, &z, &g)?;
        if !det.is_one() {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"samples": 200})))
}

fn check_deteuler(inst: &ModuleSpec, seed: u64) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    let mut ok = true;
    let mut tested = 0usize;
    if ring.is_finite() {
        for (_, map) in orthogonal::all_euler_maps(&module)? {
            tested += 1;
            if !map.det().is_one() {
                ok = false;
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kernel = module.kernel_perp()?;
        if kernel.qperp.is_empty() {
            return Ok(InstanceOutcome::Skip("no quadratic kernel to sample from".into()));
        }
        while tested < 200 {
            // mix: u from the quadratic kernel with arbitrary x, and the
            // transposed variant
            let coefs: Vec<RingElement> = kernel
                .qperp
                .iter()
                .map(|_| ring.from_i64(rng.gen_range(-4i64..=4)))
                .collect();
            let mut kvec = module.zero_vector();
            for (c, g) in coefs.iter().zip(kernel.qperp.iter()) {
                for i in 0..module.rank() {
                    kvec[i] = kvec[i].add(&c.mul(&g[i]));
                }
            }
            let free: Vec<RingElement> = (0..module.rank())
                .map(|_| ring.from_i64(rng.gen_range(-4i64..=4)))
                .collect();
            let (u, x) = if tested % 2 == 0 {
                (kvec.clone(), free.clone())
            } else {
                (free.clone(), kvec.clone())
            };
            let data = match EulerData::new(module.clone(), u, x) {
                Ok(d) => d,
                Err(_) => continue,
            };
            tested += 1;
            if !data.euler_map()?.det().is_one() {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"euler_maps_tested": tested})))
}

fn check_detref(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let mut ok = true;
    let mut tested = 0usize;
    for (data, map) in orthogonal::all_reflections(&module)? {
        tested += 1;
        if map.det() != data.idempotent().to_mu2() {
            ok = false;
        }
    }
    // multiplicativity with values in the idempotent image
    let (consistent, _, dets) = orthogonal::det_word_consistency(&module, budget)?;
    if !consistent {
        ok = false;
    }
    for d in &dets {
        if !mu2_in_idempotent_image(d)? {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({
        "reflections_tested": tested,
        "observed_determinants": dets.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
    })))
}

fn check_trivref(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    let kernel = module.kernel_perp()?;
    let mut ok = true;
    let mut tested = 0usize;
    let mut nontrivial = 0usize;
    for (data, map) in orthogonal::all_reflections(&module)? {
        tested += 1;
        let trivial = map.is_identity();
        let in_perp = linalg::in_span(&ring, &kernel.perp, data.vector())?;
        if trivial != in_perp {
            ok = false;
        }
        if !trivial {
            nontrivial += 1;
        }
        // a trivial e-reflection forces 2e = 0
        if trivial && !data.idempotent().element().mul_i64(2).is_zero() {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"reflections_tested": tested, "nontrivial": nontrivial})))
}

fn check_gammaorth(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let size = ring.size().unwrap();
    if size.pow(algebra.dim() as u32) > num_bigint::BigUint::from(budget) {
        return Err(Error::BudgetExceeded("algebra too large".into()));
    }
    let mut ok = true;
    let mut one_sided = 0usize;
    for alpha in algebra.all_elements()? {
        let inv = match alpha.invert()? {
            Some(i) => i,
            None => continue,
        };
        // forward containment only
        let mut cols = Vec::new();
        let mut contained = true;
        for i in 0..algebra.rank() {
            let img = alpha
                .mul(&algebra.generator(i))
                .mul(&inv.grade_involution());
            match img.as_vector() {
                Some(v) => cols.push(v),
                None => {
                    contained = false;
                    break;
                }
            }
        }
        if !contained {
            continue;
        }
        one_sided += 1;
        let matrix = Matrix::from_cols(ring.clone(), cols);
        if !orthogonal::is_orthogonal_matrix(&module, &matrix)? {
            ok = false;
            continue;
        }
        let map = OrthogonalMap::new(module.clone(), matrix)?;
        if !map.acts_trivially_on_perp()? {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"one_sided_elements": one_sided})))
}

fn check_invexist(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    // precondition: every orthogonal map trivial on M-perp is bijective
    let all = orthogonal::enumerate_orthogonal(&module, EnumRestrict::TrivialOnPerp, budget)?;
    if all.iter().any(|e| !e.bijective) {
        return Ok(InstanceOutcome::Skip(
            "instance has non-bijective orthogonal maps trivial on the kernel".into(),
        ));
    }
    let mut ok = true;
    let mut one_sided = 0usize;
    let mut both_sided = 0usize;
    for alpha in algebra.all_elements()? {
        let inv = match alpha.invert()? {
            Some(i) => i,
            None => continue,
        };
        let forward = (0..algebra.rank()).all(|i| {
            alpha
                .mul(&algebra.generator(i))
                .mul(&inv.grade_involution())
                .as_vector()
                .is_some()
        });
        let member = groups::in_clifford_group(&alpha)?.is_some();
        if forward {
            one_sided += 1;
        }
        if member {
            both_sided += 1;
        }
        if forward != member {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"one_sided": one_sided, "two_sided": both_sided})))
}

fn check_ocl(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let members = groups::enumerate_group(&algebra, GroupFlavor::Clifford, budget)?;
    // homomorphism on all pairs
    let mut ok = true;
    for a in &members {
        for b in &members {
            let prod = a.element().mul(b.element());
            let g = match groups::in_clifford_group(&prod)? {
                Some(g) => g,
                None => {
                    ok = false;
                    continue;
                }
            };
            if g.action() != &a.action().compose(b.action()) {
                ok = false;
            }
        }
    }
    // kernel = units of the twisted center
    let zt = subalgebra::twisted_center(&algebra)?;
    let kernel: Vec<String> = members
        .iter()
        .filter(|g| g.action().is_identity())
        .map(|g| g.element().to_string())
        .collect();
    let mut expected = Vec::new();
    for alpha in algebra.all_elements()? {
        if zt.contains(&alpha)? && alpha.is_unit() {
            expected.push(alpha.to_string());
        }
    }
    let mut kernel_sorted = kernel.clone();
    kernel_sorted.sort();
    let mut expected_sorted = expected.clone();
    expected_sorted.sort();
    if kernel_sorted != expected_sorted {
        ok = false;
    }
    Ok(pass_fail(ok, json!({"members": members.len(), "kernel": kernel_sorted.len()})))
}

fn check_impi(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    let mut ok = true;
    let mut reflections = 0usize;
    let mut eulers = 0usize;
    if ring.is_finite() {
        for (data, map) in orthogonal::all_reflections(&module)? {
            let g = groups::lift_reflection(&algebra, &data)?;
            if g.action() != &map {
                ok = false;
            }
            reflections += 1;
        }
        for (data, map) in orthogonal::all_euler_maps(&module)? {
            let g = groups::lift_euler(&algebra, &data)?;
            if g.action() != &map {
                ok = false;
            }
            eulers += 1;
        }
    } else {
        // bounded box of certified pairs over Z
        let coords: Vec<i64> = (-3..=3).collect();
        let mut vectors = vec![module.zero_vector()];
        for i in 0..module.rank() {
            let mut next = Vec::new();
            for v in &vectors {
                for &c in &coords {
                    let mut w = v.clone();
                    w[i] = ring.from_i64(c);
                    next.push(w);
                }
            }
            vectors = next;
        }
        for u in &vectors {
            for x in &vectors {
                if let Ok(data) = EulerData::new(module.clone(), u.clone(), x.clone()) {
                    let g = groups::lift_euler(&algebra, &data)?;
                    if g.action() != &data.euler_map()? {
                        ok = false;
                    }
                    eulers += 1;
                }
            }
        }
        // reflections at unit q-values
        for x in &vectors {
            if let Ok(data) =
                ReflectionData::new(module.clone(), Idempotent::new(ring.one())?, x.clone())
            {
                let g = groups::lift_reflection(&algebra, &data)?;
                if g.action() != &data.reflection()? {
                    ok = false;
                }
                reflections += 1;
            }
        }
    }
    Ok(pass_fail(ok, json!({"reflection_lifts": reflections, "euler_lifts": eulers})))
}

fn check_liftrels(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    let mut ok = true;
    let mut tested = 0usize;

    // products of scaled-reflection lifts differ by a unit scalar
    if ring.is_finite() {
        let idems = ring.idempotents()?;
        for (data, _) in orthogonal::all_reflections(&module)? {
            let x = data.vector().to_vec();
            let e = data.idempotent().clone();
            for eps in &idems {
                for veps in &idems {
                    let mk = |id: &Idempotent| -> Result<Option<groups::GroupElement>> {
                        let scaled: Vec<RingElement> =
                            x.iter().map(|c| c.mul(id.element())).collect();
                        let d = match ReflectionData::new(
                            module.clone(),
                            Idempotent::new(e.element().mul(id.element()))?,
                            scaled,
                        ) {
                            Ok(d) => d,
                            Err(_) => return Ok(None),
                        };
                        Ok(Some(groups::lift_reflection(&algebra, &d)?))
                    };
                    let (a, b, c) = match (mk(eps)?, mk(veps)?, mk(&eps.xor(veps))?) {
                        (Some(a), Some(b), Some(c)) => (a, b, c),
                        _ => continue,
                    };
                    let prod = a.element().mul(b.element());
                    // prod = unit * c: solve for the unit coefficientwise
                    let mut found = false;
                    for unit in ring.elements()? {
                        if !unit.is_unit() {
                            continue;
                        }
                        if c.element().scale(&unit) == prod {
                            found = true;
                            break;
                        }
                    }
                    tested += 1;
                    if !found {
                        ok = false;
                    }
                }
            }
        }
        // orthogonal idempotents multiply exactly
        for (dx, _) in orthogonal::all_reflections(&module)? {
            for (dy, _) in orthogonal::all_reflections(&module)? {
                if !dx
                    .idempotent()
                    .element()
                    .mul(dy.idempotent().element())
                    .is_zero()
                {
                    continue;
                }
                let gx = groups::lift_reflection(&algebra, &dx)?;
                let gy = groups::lift_reflection(&algebra, &dy)?;
                let sum_e =
                    Idempotent::new(dx.idempotent().element().add(dy.idempotent().element()))?;
                let sum_x: Vec<RingElement> = dx
                    .vector()
                    .iter()
                    .zip(dy.vector().iter())
                    .map(|(a, b)| a.add(b))
                    .collect();
                if let Ok(ds) = ReflectionData::new(module.clone(), sum_e, sum_x) {
                    let gs = groups::lift_reflection(&algebra, &ds)?;
                    tested += 1;
                    if gx.element().mul(gy.element()) != *gs.element() {
                        ok = false;
                    }
                }
            }
        }
    }

    // (1 - ux)(1 - uz) = (1 - q(u) x z)(1 - u (x + z)) with the multiplier
    // central, even, and self-inverse under transpose
    let vectors: Vec<Vec<RingElement>> = if ring.is_finite() {
        module.all_vectors()?
    } else {
        let coords: Vec<i64> = (-2..=2).collect();
        let mut vectors = vec![module.zero_vector()];
        for i in 0..module.rank() {
            let mut next = Vec::new();
            for v in &vectors {
                for &c in &coords {
                    let mut w = v.clone();
                    w[i] = ring.from_i64(c);
                    next.push(w);
                }
            }
            vectors = next;
        }
        vectors
    };
    let zc_plus = subalgebra::even_center(&algebra)?;
    for u in &vectors {
        for x in &vectors {
            for zv in &vectors {
                let dx = EulerData::new(module.clone(), u.clone(), x.clone());
                let dz = EulerData::new(module.clone(), u.clone(), zv.clone());
                let sum: Vec<RingElement> =
                    x.iter().zip(zv.iter()).map(|(a, b)| a.add(b)).collect();
                let dsum = EulerData::new(module.clone(), u.clone(), sum);
                let (_dx, _dz, _dsum) = match (dx, dz, dsum) {
                    (Ok(a), Ok(b), Ok(c)) => (a, b, c),
                    _ => continue,
                };
                let ue = algebra.from_vector(u);
                let xe = algebra.from_vector(x);
                let ze = algebra.from_vector(zv);
                let qu = module.eval_q(u)?;
                let lhs = algebra
                    .one()
                    .sub(&ue.mul(&xe))
                    .mul(&algebra.one().sub(&ue.mul(&ze)));
                let gamma = algebra.one().sub(&xe.mul(&ze).scale(&qu));
                let rhs = gamma.mul(
                    &algebra
                        .one()
                        .sub(&ue.mul(&xe.add(&ze))),
                );
                tested += 1;
                if lhs != rhs {
                    ok = false;
                }
                if !gamma.is_zero() {
                    // gamma lies in the even center and is self-inverse
                    // under the transpose exactly when it is a unit
                    if !zc_plus.contains(&gamma)? {
                        ok = false;
                    }
                    if let Some(inv) = gamma.invert()? {
                        if inv != gamma.transpose() || inv != gamma.clifford_involution() {
                            ok = false;
                        }
                    }
                }
            }
        }
    }
    Ok(pass_fail(ok, json!({"relations_tested": tested})))
}

fn check_surj_field(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let module = algebra.module().clone();
    let members = groups::enumerate_group(&algebra, GroupFlavor::Clifford, budget)?;
    let image: std::collections::BTreeSet<String> =
        members.iter().map(|g| g.action().key()).collect();
    let operp = orthogonal::enumerate_group_o_perp(&module, budget)?;
    let expected: std::collections::BTreeSet<String> = operp.iter().map(|m| m.key()).collect();
    let ok = image == expected;
    Ok(pass_fail(ok, json!({"image": image.len(), "o_perp": expected.len()})))
}

fn check_gammainv(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    let mut ok = true;
    let mut tested = 0usize;
    if ring.is_finite() {
        for g in groups::enumerate_group(&algebra, GroupFlavor::Clifford, budget)? {
            tested += 1;
            if !groups::involution_action(&g)?.pass {
                ok = false;
            }
        }
    } else {
        // lifts over Z instances
        let module = algebra.module().clone();
        let u = module.basis_vector(0);
        let x = module.basis_vector(1);
        if let Ok(data) = EulerData::new(module.clone(), u, x) {
            let g = groups::lift_euler(&algebra, &data)?;
            tested += 1;
            if !groups::involution_action(&g)?.pass {
                ok = false;
            }
            // N(lift of an Euler transformation) = 1
            if g.norm() != &algebra.one() {
                ok = false;
            }
        }
        if let Ok(data) = ReflectionData::new(
            module.clone(),
            Idempotent::new(ring.one())?,
            module.basis_vector(1),
        ) {
            let g = groups::lift_reflection(&algebra, &data)?;
            tested += 1;
            if !groups::involution_action(&g)?.pass {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"members_tested": tested})))
}

fn check_sesgamma(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let report = groups::verify_sesgamma(&algebra, budget)?;
    if !report.hypotheses_hold {
        return Ok(InstanceOutcome::Skip(
            report.skipped_reason.clone().unwrap_or_else(|| "hypotheses not certified".into()),
        ));
    }
    let detail = serde_json::to_value(&report).unwrap_or(Value::Null);
    Ok(pass_fail(report.pass, detail))
}

fn check_gammadecom(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    // hypotheses: the twisted center is R, and the isometries trivial on
    // the kernel are generated by reflections and Euler transformations
    let zt = subalgebra::twisted_center(&algebra)?;
    let scalars: Vec<CliffordElement> = vec![algebra.one()];
    if !zt.equals_span(&scalars)? {
        return Ok(InstanceOutcome::Skip("twisted center is larger than R".into()));
    }
    let module = algebra.module().clone();
    let (_, generated, _) = orthogonal::det_word_consistency(&module, budget)?;
    let operp = orthogonal::enumerate_group_o_perp(&module, budget)?;
    let gen_keys: std::collections::BTreeSet<String> =
        generated.iter().map(|m| m.key()).collect();
    let operp_keys: std::collections::BTreeSet<String> = operp.iter().map(|m| m.key()).collect();
    if gen_keys != operp_keys {
        return Ok(InstanceOutcome::Skip("generation hypothesis fails empirically".into()));
    }
    let members = groups::enumerate_group(&algebra, GroupFlavor::Clifford, budget)?;
    let mut ok = true;
    // every member is homogeneous; the degree map is a homomorphism with
    // kernel the even part, and the action determinant is 1 - 2e
    let mut degrees: Vec<(CliffordElement, Idempotent)> = Vec::new();
    for g in &members {
        let ws = groups::homogeneity_witnesses(g.element())?;
        match ws.first() {
            None => {
                ok = false;
            }
            Some(e) => {
                if g.action().det() != e.to_mu2() {
                    ok = false;
                }
                // class 0 exactly for even members
                if e.element().is_zero() != g.element().odd_part().is_zero() {
                    ok = false;
                }
                degrees.push((g.element().clone(), e.clone()));
            }
        }
    }
    for (a, ea) in &degrees {
        for (b, eb) in &degrees {
            let prod = a.mul(b);
            let ws = groups::homogeneity_witnesses(&prod)?;
            let expected = ea.xor(eb);
            if !ws.contains(&expected) {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"members": members.len()})))
}

fn check_paravector_basics(inst: &ModuleSpec, seed: u64) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let module = algebra.module().clone();
    let ring = algebra.ring().clone();
    let para = module.paravector_extension();
    let mut ok = true;
    // q_R(1) = -1, a unit
    let one_vec = para.module().basis_vector(0);
    if para.module().eval_q(&one_vec)? != ring.one().neg() {
        ok = false;
    }
    // M_R-perp = R[2] + M-perp
    let kr = para.kernel_perp()?;
    let mut expected: Vec<Vec<RingElement>> = Vec::new();
    for t in ring.two_torsion_generators()? {
        let mut v = para.module().zero_vector();
        v[0] = t;
        expected.push(v);
    }
    for g in module.kernel_perp()?.perp {
        let mut v = vec![ring.zero()];
        v.extend(g);
        expected.push(v);
    }
    if !linalg::spans_equal(&ring, &kr.perp, &expected)? {
        ok = false;
    }
    // pairing identities in C for paravectors
    let paravectors: Vec<(RingElement, Vec<RingElement>)> = if ring.is_finite() {
        let mut out = Vec::new();
        for v in para.module().all_vectors()? {
            out.push((v[0].clone(), v[1..].to_vec()));
        }
        out
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..40)
            .map(|_| {
                let a = ring.from_i64(rng.gen_range(-4i64..=4));
                let v: Vec<RingElement> = (0..module.rank())
                    .map(|_| ring.from_i64(rng.gen_range(-4i64..=4)))
                    .collect();
                (a, v)
            })
            .collect()
    };
    for (a, x) in paravectors.iter().take(36) {
        let xi = algebra.from_paravector(a, x);
        let mut xiv = vec![a.clone()];
        xiv.extend(x.iter().cloned());
        // xi xi' = -q_R(xi)
        let q = para.module().eval_q(&xiv)?;
        if xi.mul(&xi.grade_involution()) != algebra.scalar(q.neg()) {
            ok = false;
        }
        for (b, y) in paravectors.iter().take(36) {
            let eta = algebra.from_paravector(b, y);
            let mut etav = vec![b.clone()];
            etav.extend(y.iter().cloned());
            let pair = para.module().eval_pair(&xiv, &etav)?;
            let lhs1 = xi
                .mul(&eta.grade_involution())
                .add(&eta.mul(&xi.grade_involution()));
            let lhs2 = xi
                .grade_involution()
                .mul(&eta)
                .add(&eta.grade_involution().mul(&xi));
            let rhs = algebra.scalar(pair.neg());
            if lhs1 != rhs || lhs2 != rhs {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"paravectors_tested": paravectors.len().min(36)})))
}

fn check_remr(inst: &ModuleSpec) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    let para = module.paravector_extension();
    let idems = ring.idempotents()?;
    let mut ok = true;
    for e in &idems {
        let re = groups::paravector_re(&para, e)?;
        // explicit form: scalar slot scales by 1 - 2e, M fixed
        let n = module.rank();
        let mut expected = Matrix::identity(ring.clone(), n + 1);
        *expected.at_mut(0, 0) = e.to_mu2();
        if re.matrix() != &expected {
            ok = false;
        }
        // trivial iff e in R[2]
        if re.is_identity() != e.element().mul_i64(2).is_zero() {
            ok = false;
        }
        for f in &idems {
            let rf = groups::paravector_re(&para, f)?;
            let rx = groups::paravector_re(&para, &e.xor(f))?;
            if re.compose(&rf) != rx {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"idempotent_pairs": idems.len() * idems.len()})))
}

fn check_rxir1(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    let ring = module.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let para = module.paravector_extension();
    let pmod = para.module().clone();
    let mut ok = true;
    // image of det on the generated reflection group = image of Idem(R)
    let reflections = orthogonal::all_reflections(&pmod)?;
    let refl_maps: Vec<OrthogonalMap> = reflections.iter().map(|(_, m)| m.clone()).collect();
    let oref = orthogonal::generate_subgroup(&refl_maps, budget)?;
    let observed: std::collections::BTreeSet<String> =
        oref.iter().map(|m| m.det().to_string()).collect();
    let expected: std::collections::BTreeSet<String> = ring
        .idempotents()?
        .iter()
        .map(|e| e.to_mu2().to_string())
        .collect();
    if observed != expected {
        ok = false;
    }
    // SO_ref is generated by the products r_xi . r_e
    let so_ref: Vec<OrthogonalMap> = oref
        .iter()
        .filter(|m| m.det().is_one())
        .cloned()
        .collect();
    let mut pair_gens: Vec<OrthogonalMap> = Vec::new();
    for (data, rxi) in &reflections {
        let re = groups::paravector_re(&para, data.idempotent())?;
        pair_gens.push(rxi.compose(&re));
    }
    let generated = orthogonal::generate_subgroup(&pair_gens, budget)?;
    let so_keys: std::collections::BTreeSet<String> = so_ref.iter().map(|m| m.key()).collect();
    let gen_keys: std::collections::BTreeSet<String> =
        generated.iter().map(|m| m.key()).collect();
    if so_keys != gen_keys {
        ok = false;
    }
    // conjugation relation on a sample of reflections
    for (data, rxi) in reflections.iter().take(6) {
        for phi in oref.iter().take(12) {
            let img = phi.apply(data.vector());
            if let Ok(d2) =
                ReflectionData::new(pmod.clone(), data.idempotent().clone(), img)
            {
                let lhs = d2.reflection()?;
                let rhs = phi
                    .compose(rxi)
                    .compose(&phi.try_inverse().ok_or_else(|| {
                        Error::Certificate("reflection group member not invertible".into())
                    })?);
                if lhs != rhs {
                    ok = false;
                }
            }
        }
    }
    Ok(pass_fail(ok, json!({
        "observed_determinants": observed.into_iter().collect::<Vec<_>>(),
        "so_ref_size": so_keys.len(),
    })))
}

fn check_paraorth(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let members = groups::enumerate_group(&algebra, GroupFlavor::Paravector, budget)?;
    let mut ok = true;
    // homomorphism on pairs
    for a in members.iter().take(24) {
        for b in members.iter().take(24) {
            let prod = a.element().mul(b.element());
            match groups::in_paravector_group(&prod)? {
                Some(g) => {
                    if g.action() != &a.action().compose(b.action()) {
                        ok = false;
                    }
                }
                None => ok = false,
            }
        }
    }
    // kernel = {alpha in Z~(C)^x : 2 alpha_- = 0}
    let zt = subalgebra::twisted_center(&algebra)?;
    let two = ring.from_i64(2);
    let kernel: std::collections::BTreeSet<String> = members
        .iter()
        .filter(|g| g.action().is_identity())
        .map(|g| g.element().to_string())
        .collect();
    let mut expected = std::collections::BTreeSet::new();
    let mut expected_plus = std::collections::BTreeSet::new();
    for alpha in algebra.all_elements()? {
        if zt.contains(&alpha)? && alpha.is_unit() {
            if alpha.odd_part().scale(&two).is_zero() {
                expected.insert(alpha.to_string());
            }
            if alpha.odd_part().is_zero() {
                expected_plus.insert(alpha.to_string());
            }
        }
    }
    if kernel != expected {
        ok = false;
    }
    if ring.is_two_regular() && kernel != expected_plus {
        ok = false;
    }
    // over an F2-algebra with zero pairing the kernel is all of C^x
    if ring.from_i64(2).is_zero() && algebra.module().gram().is_identity() == false {
        let units: std::collections::BTreeSet<String> = algebra
            .all_elements()?
            .into_iter()
            .filter(|a| a.is_unit())
            .map(|a| a.to_string())
            .collect();
        let zero_pairing = (0..algebra.rank()).all(|i| {
            (0..algebra.rank()).all(|j| algebra.module().gram().at(i, j).is_zero())
        });
        if zero_pairing && kernel != units {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"members": members.len(), "kernel": kernel.len()})))
}

fn check_tildepi(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let module = algebra.module().clone();
    let para = module.paravector_extension();
    let pmod = para.module().clone();
    let mut ok = true;
    let mut refl = 0usize;
    let mut eulers = 0usize;
    let size = ring.size().unwrap();
    if size.pow(pmod.rank() as u32) <= num_bigint::BigUint::from(2000usize) {
        for (data, _) in orthogonal::all_reflections(&pmod)? {
            let g = groups::lift_paravector_reflection(&algebra, &data)?;
            let re = groups::paravector_re(&para, data.idempotent())?;
            if g.action() != &data.reflection()?.compose(&re) {
                ok = false;
            }
            refl += 1;
        }
        for (data, map) in orthogonal::all_euler_maps(&pmod)? {
            let g = groups::lift_paravector_euler(&algebra, &data)?;
            if g.action() != &map {
                ok = false;
            }
            eulers += 1;
        }
        let _ = budget;
    } else {
        return Ok(InstanceOutcome::Skip("paravector module too large".into()));
    }
    Ok(pass_fail(ok, json!({"reflection_lifts": refl, "euler_lifts": eulers})))
}

fn check_notsurj(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let para = algebra.module().paravector_extension();
    let members = groups::enumerate_group(&algebra, GroupFlavor::Paravector, budget)?;
    let image: std::collections::BTreeSet<String> =
        members.iter().map(|g| g.action().key()).collect();
    let mut ok = true;
    let mut checked = Vec::new();
    for e in ring.idempotents()? {
        let hyp = !e.element().is_zero()
            && !e.element().mul_i64(2).is_zero()
            && algebra.module().is_orthogonal_basis()
            && subalgebra::is_non_zero_divisor(&ring.from_i64(2))?;
        if !hyp {
            continue;
        }
        let re = groups::paravector_re(&para, &e)?;
        let in_image = image.contains(&re.key());
        checked.push(json!({"e": e.element().to_string(), "in_image": in_image}));
        if in_image {
            ok = false;
        }
    }
    if checked.is_empty() {
        return Ok(InstanceOutcome::Skip("no idempotent satisfies the hypotheses".into()));
    }
    Ok(pass_fail(ok, json!({"members": members.len(), "checked": checked})))
}

fn check_invpara(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let members = groups::enumerate_group(&algebra, GroupFlavor::Paravector, budget)?;
    let mut ok = true;
    for g in &members {
        if !groups::involution_action(g)?.pass {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"members_tested": members.len()})))
}

fn check_sespara(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let report = groups::verify_sespara(&algebra, budget)?;
    if !report.hypotheses_hold {
        return Ok(InstanceOutcome::Skip(
            report.skipped_reason.clone().unwrap_or_else(|| "hypotheses not certified".into()),
        ));
    }
    let detail = serde_json::to_value(&report).unwrap_or(Value::Null);
    Ok(pass_fail(report.pass, detail))
}

fn check_ehom(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let members = groups::enumerate_group(&algebra, GroupFlavor::Clifford, budget)?;
    let mut ok = true;
    let mut homogeneous = 0usize;
    for g in &members {
        let ws = groups::homogeneity_witnesses(g.element())?;
        if ws.is_empty() {
            continue;
        }
        homogeneous += 1;
        let rep = groups::ehom_check(g.element())?;
        if !rep.pass {
            ok = false;
        }
    }
    Ok(pass_fail(ok, json!({"members": members.len(), "homogeneous": homogeneous})))
}

fn check_condint(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    let module = algebra.module().clone();
    if module.rank() == 0 {
        // search variant: members with alpha' = delta alpha for delta
        // outside the idempotent image (report-only style, must not crash)
        if !ring.is_finite() {
            return Ok(InstanceOutcome::Skip("search needs a finite ring".into()));
        }
        let mut outside = Vec::new();
        for d in mu2_elements(&ring)? {
            if !mu2_in_idempotent_image(&d)? {
                outside.push(d);
            }
        }
        return Ok(InstanceOutcome::Pass(json!({
            "mu2_outside_idempotent_image": outside.iter().map(|d| d.to_string()).collect::<Vec<_>>(),
        })));
    }
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let kernel = module.kernel_perp()?;
    let mut ok = true;
    let mut examples = 0usize;
    // alpha = 1 + x for x in the quadratic kernel with q_R(1+x) a unit:
    // the action preserves M but moves 1 by 2x
    for x in module.span_members(&kernel.qperp)? {
        let xe = algebra.from_vector(&x);
        let alpha = algebra.one().add(&xe);
        let g = match groups::in_paravector_group(&alpha)? {
            Some(g) => g,
            None => continue,
        };
        examples += 1;
        let act = g.action();
        // condition (3): M is preserved
        for j in 0..module.rank() {
            let mut col = act.matrix().col(j + 1);
            let scalar = col.remove(0);
            if !scalar.is_zero() {
                ok = false;
            }
        }
        // the image of 1 is 1 + 2x
        let col0 = act.matrix().col(0);
        if col0[0] != ring.one() {
            ok = false;
        }
        for (i, xi) in x.iter().enumerate() {
            if col0[i + 1] != xi.mul_i64(2) {
                ok = false;
            }
        }
        // condition (2) fails exactly when 2x != 0
        let two_x_zero = x.iter().all(|c| c.mul_i64(2).is_zero());
        let preserves_r = col0.iter().skip(1).all(|c| c.is_zero());
        if preserves_r != two_x_zero {
            ok = false;
        }
        // condition (5) fails exactly when 4x != 0
        let para = module.paravector_extension();
        let r1 = groups::paravector_re(&para, &Idempotent::new(ring.one())?)?;
        let commutes = r1.compose(act) == act.compose(&r1);
        let four_x_zero = x.iter().all(|c| c.mul_i64(4).is_zero());
        if commutes != four_x_zero {
            ok = false;
        }
    }
    // second pattern: x with 4x = 0, 2x != 0, 2x in M-perp, x not in M-perp
    let mut second = 0usize;
    for x in module.all_vectors()? {
        let four_zero = x.iter().all(|c| c.mul_i64(4).is_zero());
        let two_x: Vec<RingElement> = x.iter().map(|c| c.mul_i64(2)).collect();
        let two_nonzero = two_x.iter().any(|c| !c.is_zero());
        if !four_zero || !two_nonzero {
            continue;
        }
        let two_in_perp = linalg::in_span(&ring, &kernel.perp, &two_x)?;
        let x_in_perp = linalg::in_span(&ring, &kernel.perp, &x)?;
        if !two_in_perp || x_in_perp {
            continue;
        }
        let alpha = algebra.one().add(&algebra.from_vector(&x));
        let g = match groups::in_paravector_group(&alpha)? {
            Some(g) => g,
            None => continue,
        };
        second += 1;
        let act = g.action();
        let para = module.paravector_extension();
        let r1 = groups::paravector_re(&para, &Idempotent::new(ring.one())?)?;
        // condition (5) holds
        if r1.compose(act) != act.compose(&r1) {
            ok = false;
        }
        // conditions (2) and (3) fail
        let col0 = act.matrix().col(0);
        if col0.iter().skip(1).all(|c| c.is_zero()) {
            ok = false;
        }
        let mut m_preserved = true;
        for j in 0..module.rank() {
            if !act.matrix().at(0, j + 1).is_zero() {
                m_preserved = false;
            }
        }
        if m_preserved {
            ok = false;
        }
        // not homogeneous
        if !groups::homogeneity_witnesses(&alpha)?.is_empty() {
            ok = false;
        }
    }
    let _ = budget;
    Ok(pass_fail(ok, json!({"first_pattern": examples, "second_pattern": second})))
}

fn check_vahlen(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    let ring = algebra.ring().clone();
    if !ring.is_finite() {
        return Ok(InstanceOutcome::Skip("needs a finite ring".into()));
    }
    let members = groups::enumerate_group(&algebra, GroupFlavor::Clifford, budget)?;
    let (kept, closed) = groups::vahlen_filter(&members)?;
    let mut ok = closed;
    // reflections with e = 1 and Euler lifts stay in
    for (data, _) in orthogonal::all_reflections(algebra.module())? {
        if !data.idempotent().element().is_one() {
            continue;
        }
        let g = groups::lift_reflection(&algebra, &data)?;
        if !(g.norm().is_scalar() && g.norm().scalar_part().is_unit()) {
            ok = false;
        }
    }
    for (data, _) in orthogonal::all_euler_maps(algebra.module())? {
        let g = groups::lift_euler(&algebra, &data)?;
        if g.norm() != &algebra.one() {
            ok = false;
        }
    }
    // members with a non-scalar norm are excluded
    let excluded = members.len() - kept.len();
    for g in &members {
        if !g.norm().is_scalar() {
            if kept.iter().any(|k| k.element() == g.element()) {
                ok = false;
            }
        }
    }
    Ok(pass_fail(ok, json!({"members": members.len(), "kept": kept.len(), "excluded": excluded})))
}

fn search_allmq(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let module = inst.module()?;
    if !module.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("search needs a finite ring".into()));
    }
    let report = orthogonal::conjecture_allmq_search(&module, budget)?;
    let detail = serde_json::to_value(&report).unwrap_or(Value::Null);
    if report.counterexamples.is_empty() {
        Ok(InstanceOutcome::Pass(detail))
    } else {
        Ok(InstanceOutcome::Finding(detail))
    }
}

fn search_emptyint(inst: &ModuleSpec, budget: usize) -> Result<InstanceOutcome> {
    let algebra = inst.algebra()?;
    if !algebra.ring().is_finite() {
        return Ok(InstanceOutcome::Skip("search needs a finite ring".into()));
    }
    if algebra.ring().from_i64(2).is_zero() {
        return Ok(InstanceOutcome::Skip("2 vanishes in this ring".into()));
    }
    let report = groups::conjecture_emptyint_search(&algebra, budget)?;
    let detail = serde_json::to_value(&report).unwrap_or(Value::Null);
    if report.hits.is_empty() {
        Ok(InstanceOutcome::Pass(detail))
    } else {
        Ok(InstanceOutcome::Finding(detail))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_is_complete() {
        assert_eq!(REGISTRY.len(), 40);
        for id in REGISTRY {
            assert!(
                !default_instances(id).is_empty(),
                "{} has no default instances",
                id
            );
        }
        // unknown ids are rejected
        assert!(CheckSpec::new("prop-bogus").is_err());
        // conjecture checks are always report-only
        for id in REGISTRY.iter().filter(|id| is_conjecture(id)) {
            assert_eq!(CheckSpec::new(id).unwrap().expected, Expectation::ReportOnly);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let spec = CheckSpec {
            id: "prop-trivref".into(),
            instances: vec![ModuleSpec::new("Z/6", &[1])],
            budget: 1_000_000,
            seed: 7,
            expected: Expectation::MustPass,
        };
        let a = run_check(&spec).unwrap();
        let b = run_check(&spec).unwrap();
        assert_eq!(
            serde_json::to_string(&a.witnesses).unwrap(),
            serde_json::to_string(&b.witnesses).unwrap()
        );
        assert!(matches!(a.verdict, Verdict::Pass));
    }

    #[test]
    fn paper_example_check_passes() {
        let spec = CheckSpec {
            id: "prop-trivref".into(),
            instances: vec![ModuleSpec::with_gram("Z/2", &[1, 0], &[&[0, 1], &[1, 0]])],
            budget: 1_000_000,
            seed: 0,
            expected: Expectation::MustPass,
        };
        let rep = run_check(&spec).unwrap();
        assert!(matches!(rep.verdict, Verdict::Pass), "{:?}", rep.verdict);
    }

    #[test]
    fn ztildez_default_battery_passes() {
        let spec = CheckSpec::new("thm-ztildez").unwrap();
        let rep = run_check(&spec).unwrap();
        assert!(matches!(rep.verdict, Verdict::Pass), "{:?}", rep);
    }

    #[test]
    fn conjecture_reports_not_failures() {
        let spec = CheckSpec {
            id: "conj-allmq".into(),
            instances: vec![ModuleSpec::new("Z/2", &[0])],
            budget: 1_000_000,
            seed: 0,
            expected: Expectation::ReportOnly,
        };
        let rep = run_check(&spec).unwrap();
        assert!(matches!(rep.verdict, Verdict::Report(_)));
        assert!(!rep.is_failure());
    }

    #[test]
    fn empty_suite_and_single_spec() {
        let reports = run_suite(&[], false).unwrap();
        assert!(reports.is_empty());
        let one = run_suite(&[CheckSpec::new("conj-emptyint").unwrap()], false).unwrap();
        assert_eq!(one.len(), 1);
        assert!(matches!(one[0].verdict, Verdict::Report(_)));
    }
}

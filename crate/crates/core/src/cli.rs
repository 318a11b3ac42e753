//! Problem configs, command execution and JSON reports shared by the binary
//! and other front ends.
//!
//! A config looks like
//! `{"g": 1, "n": 1, "N": 2, "rep": {"kind": "mu_c", "c": [["1"]]}}`
//! with optional `"cap"`, `"group"` and `"word"` defaults for the commands.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::classify::{self, ClassifyError};
use crate::cyclo::{CycloError, Field};
use crate::mcg::{
    self, auto_of, generators, generators_with_inverses, relator_conjugator, Automorphism,
    GenName, McgError, McgWord,
};
use crate::orbit::{self, Group, OrbitError, OrbitOptions, OrbitStatus};
use crate::reps::{
    canon_affine, conjugacy_equal, conjugate_rep, is_totally_reducible, rho_mu_c, AffElt,
    AffineRep, AnyRep, Rep, RepError,
};
use crate::surface::{self, SurfaceError};
use crate::words::{Letter, Word};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("config: {0}")]
    Config(String),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Mcg(#[from] McgError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
    #[error(transparent)]
    Orbit(#[from] OrbitError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    /// Input problems exit with code 2; everything else with 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Json(_)
            | CliError::Config(_)
            | CliError::Cyclo(_)
            | CliError::Rep(_)
            | CliError::Mcg(_)
            | CliError::Orbit(OrbitError::InvalidRep)
            | CliError::Orbit(OrbitError::ZeroCap)
            | CliError::Classify(ClassifyError::InvalidRep)
            | CliError::Classify(ClassifyError::Domain(_)) => EXIT_INVALID,
            _ => EXIT_ERROR,
        }
    }
}

/// A parsed problem instance.
#[derive(Clone, Debug)]
pub struct ProblemConfig {
    pub g: usize,
    pub n: usize,
    pub field: &'static Field,
    pub rep: AnyRep,
    pub cap: Option<usize>,
    pub group: Option<Group>,
    pub word: Option<String>,
}

fn get_usize(v: &Value, key: &str) -> Result<Option<usize>, CliError> {
    match v.get(key) {
        None | Some(Value::Null) => Ok(None),
        Some(x) => x
            .as_u64()
            .map(|k| Some(k as usize))
            .ok_or_else(|| CliError::Config(format!("{key:?} must be a non-negative integer"))),
    }
}

impl ProblemConfig {
    pub fn from_value(v: &Value) -> Result<ProblemConfig, CliError> {
        let g = get_usize(v, "g")?.ok_or_else(|| CliError::Config("missing \"g\"".into()))?;
        let n = get_usize(v, "n")?.ok_or_else(|| CliError::Config("missing \"n\"".into()))?;
        surface::check_genus(g).map_err(|e| CliError::Config(e.to_string()))?;
        if n > 64 || g > 64 {
            return Err(CliError::Config("g and n are limited to 64".into()));
        }
        let order = match v.get("N") {
            Some(x) => x
                .as_i64()
                .ok_or_else(|| CliError::Config("\"N\" must be an integer".into()))?,
            None => return Err(CliError::Config("missing \"N\"".into())),
        };
        let field = Field::get_i64(order)?;
        let rep_v = v
            .get("rep")
            .ok_or_else(|| CliError::Config("missing \"rep\"".into()))?;
        let rep = AnyRep::from_json(rep_v, g, n, field)?;
        let group = match v.get("group") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.parse().map_err(CliError::Config)?),
            Some(_) => return Err(CliError::Config("\"group\" must be a string".into())),
        };
        let word = match v.get("word") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(s.clone()),
            Some(_) => return Err(CliError::Config("\"word\" must be a string".into())),
        };
        Ok(ProblemConfig {
            g,
            n,
            field,
            rep,
            cap: get_usize(v, "cap")?,
            group,
            word,
        })
    }

    pub fn from_str(text: &str) -> Result<ProblemConfig, CliError> {
        ProblemConfig::from_value(&serde_json::from_str(text)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Act { word: Option<String> },
    Orbit { group: Option<Group>, cap: Option<usize>, parallel: bool },
    Classify { search_cap: Option<usize> },
}

impl Command {
    /// Command named in a sweep line, with options taken from the config.
    pub fn from_name(name: &str) -> Result<Command, CliError> {
        Ok(match name {
            "validate" => Command::Validate,
            "act" => Command::Act { word: None },
            "orbit" => Command::Orbit {
                group: None,
                cap: None,
                parallel: false,
            },
            "classify" => Command::Classify { search_cap: None },
            other => return Err(CliError::Config(format!("unknown command {other:?}"))),
        })
    }
}

/// A JSON report and the process exit code it implies.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub body: Value,
    pub exit_code: i32,
}

impl Report {
    fn ok<T: Serialize>(v: T) -> Result<Report, CliError> {
        Ok(Report {
            body: serde_json::to_value(v)?,
            exit_code: EXIT_OK,
        })
    }
}

#[derive(Serialize)]
struct ValidateReport {
    valid: bool,
    kind: &'static str,
    abelian: bool,
    totally_reducible: Option<bool>,
    defect: Option<Value>,
}

#[derive(Serialize)]
struct ActReport<'a> {
    word: &'a McgWord,
    rep: &'a AnyRep,
    canonical_kind: crate::reps::ClassKind,
    canonical: AnyRep,
}

fn require_valid(rep: &AnyRep) -> Result<(), CliError> {
    if rep.validate() {
        Ok(())
    } else {
        Err(CliError::Orbit(OrbitError::InvalidRep))
    }
}

pub fn run(cmd: &Command, cfg: &ProblemConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Validate => {
            let valid = cfg.rep.validate();
            let totally_reducible = match &cfg.rep {
                AnyRep::Gl2(r) => Some(is_totally_reducible(r)),
                _ => None,
            };
            let report = ValidateReport {
                valid,
                kind: cfg.rep.kind(),
                abelian: cfg.rep.is_abelian(),
                totally_reducible,
                defect: (!valid).then(|| cfg.rep.relator_defect()),
            };
            Ok(Report {
                body: serde_json::to_value(report)?,
                exit_code: if valid { EXIT_OK } else { EXIT_INVALID },
            })
        }
        Command::Act { word } => {
            require_valid(&cfg.rep)?;
            let text = word
                .as_deref()
                .or(cfg.word.as_deref())
                .ok_or_else(|| CliError::Config("act needs a word".into()))?;
            let w = McgWord::parse(text, cfg.g, cfg.n)?;
            let out = cfg.rep.act_word(&w)?;
            let (kind, canonical) = out.canonical();
            Report::ok(ActReport {
                word: &w,
                rep: &out,
                canonical_kind: kind,
                canonical,
            })
        }
        Command::Orbit {
            group,
            cap,
            parallel,
        } => {
            let opts = OrbitOptions {
                group: group.or(cfg.group).unwrap_or(Group::Pure),
                cap: cap.or(cfg.cap).unwrap_or(orbit::DEFAULT_CAP),
                parallel: *parallel,
                witness: true,
            };
            let res = with_rep!(&cfg.rep, r => orbit::orbit(r, &opts))?;
            let exit_code = match res.status {
                OrbitStatus::Finite => EXIT_OK,
                OrbitStatus::CapExceeded => EXIT_CAP,
            };
            Ok(Report {
                body: serde_json::to_value(res)?,
                exit_code,
            })
        }
        Command::Classify { search_cap } => {
            let c = classify::classify_with(
                &cfg.rep,
                search_cap.unwrap_or(classify::DEFAULT_SEARCH_CAP),
            )?;
            Report::ok(c)
        }
    }
}

/// Turn a result into a report, mapping errors to `{"error": ...}` with their exit code.
pub fn report_or_error(r: Result<Report, CliError>) -> Report {
    r.unwrap_or_else(|e| Report {
        body: json!({ "error": e.to_string() }),
        exit_code: e.exit_code(),
    })
}

// ---------------------------------------------------------------------------
// bounds

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundsQuery {
    Scalar { order: u64, g: u64 },
    B1 { n1: u64, n2: u64, n_rho: u64, g: u64 },
    B2 { order: u64, n_prime: u64, n2: u64 },
    Expected { order: u64, n_prime: u64 },
}

pub fn run_bounds(q: &BoundsQuery) -> Result<Report, CliError> {
    let body = match *q {
        BoundsQuery::Scalar { order, g } => {
            let (l, u) = classify::bounds_scalar(order, g)?;
            json!({"kind": "scalar", "lower": l, "upper": u})
        }
        BoundsQuery::B1 { n1, n2, n_rho, g } => {
            let (l, u) = classify::bounds_b1(n1, n2, n_rho, g)?;
            json!({"kind": "b1", "lower": l, "upper": u})
        }
        BoundsQuery::B2 { order, n_prime, n2 } => {
            let (l, u) = classify::bounds_b2(order, n_prime, n2)?;
            json!({"kind": "b2", "lower": l, "upper": u})
        }
        BoundsQuery::Expected { order, n_prime } => {
            let c = classify::expected_affine_count(order, n_prime)?;
            json!({"kind": "expected_affine_count", "count": c})
        }
    };
    Ok(Report {
        body,
        exit_code: EXIT_OK,
    })
}

// ---------------------------------------------------------------------------
// selftest

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SelftestReport {
    pub passed: bool,
    pub checks: Vec<Check>,
}

const SURFACES: [(usize, usize); 7] = [(1, 0), (1, 1), (1, 2), (1, 4), (2, 0), (2, 3), (3, 2)];

fn check_automorphisms() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    let mut push = |name: String, passed: bool| out.push(Check { name, passed });
    for (g, n) in SURFACES {
        let gens = generators(g, n);
        let inverse_ok = gens.iter().all(|&x| {
            let (a, b) = (auto_of(x, g, n), mcg::inverse_auto(x, g, n));
            matches!((a, b), (Ok(a), Ok(b)) if a.compose(&b).is_identity() && b.compose(&a).is_identity())
        });
        push(format!("inverse automorphisms g={g} n={n}"), inverse_ok);

        let autos: Vec<Automorphism> = generators_with_inverses(g, n)
            .into_iter()
            .map(|x| auto_of(x, g, n))
            .collect::<Result<_, _>>()?;
        push(
            format!("relator preserved up to conjugacy g={g} n={n}"),
            autos.iter().all(|a| relator_conjugator(a).is_some()),
        );

        let mut braids = true;
        for i in 1..n {
            let si = auto_of(GenName::sigma(i), g, n)?;
            for j in 1..n {
                let sj = auto_of(GenName::sigma(j), g, n)?;
                if i + 1 == j {
                    braids &= si.compose(&sj).compose(&si) == sj.compose(&si).compose(&sj);
                } else if i.abs_diff(j) >= 2 {
                    braids &= si.compose(&sj) == sj.compose(&si);
                }
            }
            for t in 1..3 * g {
                let tt = auto_of(GenName::tau(t), g, n)?;
                braids &= tt.compose(&si) == si.compose(&tt);
            }
        }
        push(format!("braid and commutation relations g={g} n={n}"), braids);

        let mut fixed = true;
        for k in 1..g {
            let th = surface::theta(g, k)?;
            fixed &= auto_of(GenName::tau(2 * g + k), g, n)?.apply(&th) == th;
        }
        for k in 1..n {
            let xi = surface::xi(g, n, k)?;
            let a = auto_of(GenName::tau(3 * g - 1 + k), g, n)?;
            fixed &= a.apply(&xi) == xi;
            let expect = Word::commutator(&xi.invert(), &Word::letter(Letter::beta(g)))
                .concat(&surface::delta(n));
            fixed &= a.apply(&surface::delta(n)) == expect;
        }
        push(format!("fixed elements and boundary image g={g} n={n}"), fixed);
    }
    Ok(out)
}

/// A few valid affine representations with non-abelian image.
fn sample_reps(g: usize, n: usize) -> Vec<AffineRep> {
    let mut out = Vec::new();
    for order in [2u32, 3, 5] {
        let f = Field::get(order).expect("small order");
        if n >= 1 {
            let mut c: Vec<_> = (0..n).map(|j| f.ratio(j as i64 + 1, 1)).collect();
            let total = c.iter().fold(f.zero(), |acc, x| &acc + x);
            let shift = &f.one() - &total;
            c[0] = &c[0] + &shift;
            let mut r = rho_mu_c(g, n, &f.zeta_pow(1), &c).expect("valid family");
            if g >= 2 {
                // a second handle with commuting images keeps the relator
                r.images[2] = AffElt::scaling(f.zeta_pow(1));
                r.images[3] = AffElt::scaling(f.zeta_pow(2));
            }
            out.push(r);
        } else {
            let mut r: AffineRep = Rep::trivial(g, n, f);
            r.images[0] = AffElt::scaling(f.zeta_pow(1));
            r.images[1] = AffElt::translation(f.one());
            if g >= 2 {
                r.images[2] = AffElt::scaling(f.zeta_pow(-1));
                r.images[3] = AffElt::translation(f.zeta_pow(-1));
            }
            if r.validate() {
                out.push(r);
            }
        }
    }
    out
}

fn check_actions() -> Result<Vec<Check>, CliError> {
    let mut out = Vec::new();
    for (g, n) in SURFACES {
        let gens = generators_with_inverses(g, n);
        let mut axiom = true;
        let mut valid = true;
        let mut canon = true;
        let mut punctures = true;
        for rep in sample_reps(g, n) {
            for &x in &gens {
                for &y in gens.iter().step_by(3) {
                    let w = McgWord(vec![x, y]);
                    let step = rep.act(x)?.act(y)?;
                    let whole = rep.pull_back(&w.inverse().automorphism(g, n)?);
                    axiom &= step == whole;
                    valid &= step.validate();
                    let k = rep.field.int(3);
                    let conj = conjugate_rep(&step, &AffElt::new(k.clone(), k));
                    canon &= canon_affine(&conj) == canon_affine(&step)
                        && conjugacy_equal(&conj, &step).is_some();
                }
            }
            // σ₁² is pure and must send each γ_j to a conjugate
            if n >= 2 {
                let w = McgWord(vec![GenName::sigma(1), GenName::sigma(1), GenName::tau(1)]);
                let moved = rep.act_word(&w)?;
                for j in 1..=n {
                    punctures &= moved.gamma(j).lin == rep.gamma(j).lin;
                }
            }
        }
        out.push(Check {
            name: format!("left action axiom g={g} n={n}"),
            passed: axiom,
        });
        out.push(Check {
            name: format!("action preserves validity g={g} n={n}"),
            passed: valid,
        });
        out.push(Check {
            name: format!("canonical form matches conjugacy solver g={g} n={n}"),
            passed: canon,
        });
        out.push(Check {
            name: format!("pure classes keep puncture conjugacy classes g={g} n={n}"),
            passed: punctures,
        });
    }
    Ok(out)
}

/// Structural checks of the automorphism tables and of the action on representations.
pub fn selftest() -> Result<SelftestReport, CliError> {
    let mut checks = check_automorphisms()?;
    checks.extend(check_actions()?);
    Ok(SelftestReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}

// ---------------------------------------------------------------------------
// sweeps

/// Hex SHA-256 of a trimmed input line.
pub fn input_hash(line: &str) -> String {
    hex::encode(Sha256::digest(line.trim().as_bytes()))
}

/// Run one sweep line: a config with an optional `"command"` (default `classify`).
pub fn run_line(line: &str) -> Value {
    let hash = input_hash(line);
    let result = (|| -> Result<Report, CliError> {
        let v: Value = serde_json::from_str(line)?;
        let name = v.get("command").and_then(Value::as_str).unwrap_or("classify");
        let cmd = Command::from_name(name)?;
        let cfg = ProblemConfig::from_value(&v)?;
        run(&cmd, &cfg)
    })();
    let report = report_or_error(result);
    json!({
        "input_hash": hash,
        "exit_code": report.exit_code,
        "result": report.body,
    })
}

/// Process every line of `input` whose hash is not yet recorded in `output`,
/// appending results in input order. Returns the number of lines processed.
pub fn sweep(input: &Path, output: &Path) -> Result<usize, CliError> {
    let mut done = HashSet::new();
    if output.exists() {
        for line in BufReader::new(fs::File::open(output)?).lines() {
            let line = line?;
            if let Ok(v) = serde_json::from_str::<Value>(&line) {
                if let Some(h) = v.get("input_hash").and_then(Value::as_str) {
                    done.insert(h.to_string());
                }
            }
        }
    }
    let mut todo = Vec::new();
    for (k, line) in BufReader::new(fs::File::open(input)?).lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() || !done.insert(input_hash(&line)) {
            continue;
        }
        todo.push((k + 1, line));
    }
    let results = run_lines(&todo);
    let mut f = fs::OpenOptions::new().create(true).append(true).open(output)?;
    for r in &results {
        writeln!(f, "{}", serde_json::to_string(r)?)?;
    }
    Ok(results.len())
}

fn numbered(k: usize, line: &str) -> Value {
    let mut v = run_line(line);
    v["line"] = json!(k);
    v
}

#[cfg(feature = "parallel")]
fn run_lines(lines: &[(usize, String)]) -> Vec<Value> {
    use rayon::prelude::*;
    lines.par_iter().map(|(k, l)| numbered(*k, l)).collect()
}

#[cfg(not(feature = "parallel"))]
fn run_lines(lines: &[(usize, String)]) -> Vec<Value> {
    lines.iter().map(|(k, l)| numbered(*k, l)).collect()
}

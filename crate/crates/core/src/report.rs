//! Machine-readable reports and the on-disk lattice cache.
//!
//! Reports are `serde_json::Value` trees; object keys are kept sorted, so the
//! rendered bytes depend only on the configuration and seed.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::Algebra;
use crate::coxeter::{CoxeterSystem, CoxeterType, Family};
use crate::lattice::{self, LatticeError, LatticeKind, Orbit, ReflectionSet, SubgroupLattice};
use crate::trace::{self, TraceForm};

pub const CACHE_ENV: &str = "LATTICE_HECKE_CACHE";

/// Prime used for the modular fast path of the Gram determinant.
const GRAM_PRIME: u64 = 2_305_843_009_213_693_951;

#[derive(Debug, Error)]
pub enum ReportError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("cache file {path}: {reason}")]
    Cache { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Which lattice to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Selector {
    Infinity,
    Parabolic,
    Closed,
    L2,
    Ln(usize),
}

impl Selector {
    pub fn kind(self) -> LatticeKind {
        match self {
            Selector::Infinity => LatticeKind::Infinity,
            Selector::Parabolic => LatticeKind::Parabolic,
            Selector::Closed => LatticeKind::Closed,
            Selector::L2 => LatticeKind::L2,
            Selector::Ln(n) => LatticeKind::Ln(n),
        }
    }

    pub fn needs_roots(self) -> bool {
        matches!(self, Selector::Parabolic | Selector::Closed | Selector::Ln(_))
    }
}

impl fmt::Display for Selector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.kind().fmt(f)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Check {
    Relations,
    Blocks,
    Trace,
    Gram,
    Specialization,
}

impl Check {
    pub const ALL: [Check; 5] = [Check::Relations, Check::Blocks, Check::Trace, Check::Gram, Check::Specialization];

    pub fn name(self) -> &'static str {
        match self {
            Check::Relations => "relations",
            Check::Blocks => "blocks",
            Check::Trace => "trace",
            Check::Gram => "gram",
            Check::Specialization => "specialization",
        }
    }
}

impl FromStr for Check {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Check::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown check {s:?}"))
    }
}

/// Parsed `--checks` list; `all` expands to every check.
pub fn parse_checks(items: &[String]) -> Result<Vec<Check>, String> {
    let mut out = Vec::new();
    for item in items {
        if item == "all" {
            out.extend(Check::ALL);
        } else {
            out.push(item.parse()?);
        }
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub ctype: CoxeterType,
    pub selector: Selector,
    pub checks: Vec<Check>,
    pub seed: u64,
    pub max_orbits: usize,
    pub timings: bool,
    pub cache_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn new(ctype: CoxeterType) -> Self {
        RunConfig {
            ctype,
            selector: Selector::Infinity,
            checks: Check::ALL.to_vec(),
            seed: 0,
            max_orbits: lattice::DEFAULT_MAX_ORBITS,
            timings: false,
            cache_dir: None,
        }
    }

    /// Rejects selectors the group cannot support.
    pub fn validate(&self) -> Result<(), String> {
        if self.selector.needs_roots() && !self.ctype.is_crystallographic() {
            return Err(format!("--which {} needs a crystallographic type, {} is not", self.selector, self.ctype));
        }
        if let Selector::Ln(n) = self.selector {
            if n < 2 {
                return Err(format!("--n must be at least 2, got {n}"));
            }
        }
        Ok(())
    }

    fn echo_group(&self) -> Value {
        json!({
            "type": self.ctype.family().to_string(),
            "rank": self.ctype.rank(),
            "m": self.ctype.m(),
            "group": self.ctype.to_string(),
        })
    }

    fn echo(&self, command: &str) -> Value {
        let mut v = self.echo_group();
        match command {
            "lattice" => v["which"] = json!(self.selector.to_string()),
            "admissible" => v["max_orbits"] = json!(self.max_orbits),
            "verify" => {
                v["which"] = json!(self.selector.to_string());
                v["checks"] = json!(self.checks.iter().map(|c| c.name()).collect::<Vec<_>>());
                v["seed"] = json!(self.seed);
            }
            _ => {}
        }
        v
    }
}

/// A report plus whether every requested check passed.
#[derive(Debug, Clone)]
pub struct Report {
    pub body: Value,
    pub passed: bool,
}

impl Report {
    pub fn render(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.body).expect("report serializes");
        s.push('\n');
        s
    }
}

pub fn cmd_group(cfg: &RunConfig) -> Report {
    let w = CoxeterSystem::new(cfg.ctype);
    let classes: Vec<usize> = w.classes().iter().map(Vec::len).collect();
    let body = json!({
        "command": "group",
        "config": cfg.echo("group"),
        "group": {
            "order": w.order(),
            "reflections": w.num_reflections(),
            "classes": classes,
            "coxeter_matrix": w.coxeter_matrix(),
            "longest_length": w.length(w.longest_element()),
            "crystallographic": w.is_crystallographic(),
        },
    });
    Report { body, passed: true }
}

fn orbit_summary(w: &CoxeterSystem, l: &SubgroupLattice) -> Vec<Value> {
    l.orbits()
        .iter()
        .map(|o| {
            let rep = l.set(o.representative).to_vec();
            json!({
                "size": o.members.len(),
                "type": w.subgroup_type(&rep),
                "representative": rep,
            })
        })
        .collect()
}

fn lattice_stats(w: &CoxeterSystem, l: &SubgroupLattice) -> Value {
    json!({
        "kind": l.kind().to_string(),
        "size": l.len(),
        "orbit_count": l.orbits().len(),
        "orbits": orbit_summary(w, l),
    })
}

/// On-disk form of `L_∞`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCache {
    pub group: String,
    pub family: Family,
    pub rank: usize,
    pub m: Option<u32>,
    pub reflections: Vec<CachedReflection>,
    pub subgroups: Vec<Vec<usize>>,
    pub join: Vec<Vec<u32>>,
    pub action: Vec<Vec<u32>>,
    pub orbits: Vec<Orbit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CachedReflection {
    pub index: usize,
    pub root: Option<Vec<i64>>,
}

impl LatticeCache {
    pub fn from_lattice(w: &CoxeterSystem, l: &SubgroupLattice) -> Self {
        let ct = w.ctype();
        let reflections = (0..w.num_reflections())
            .map(|t| CachedReflection { index: t, root: w.roots().map(|r| r[t].clone()) })
            .collect();
        LatticeCache {
            group: ct.to_string(),
            family: ct.family(),
            rank: ct.rank(),
            m: ct.m(),
            reflections,
            subgroups: (0..l.len()).map(|i| l.set(i).to_vec()).collect(),
            join: l.join_table().to_vec(),
            action: l.action_table().to_vec(),
            orbits: l.orbits().to_vec(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("cache serializes");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    /// Rebuilds the lattice and checks it against the stored tables.
    pub fn to_lattice(&self, w: &CoxeterSystem) -> Result<SubgroupLattice, String> {
        if self.group != w.ctype().to_string() {
            return Err(format!("cache is for {}, not {}", self.group, w.ctype()));
        }
        if self.reflections.len() != w.num_reflections() {
            return Err("reflection count differs".into());
        }
        let sets = self.subgroups.iter().map(|s| s.iter().copied().collect::<ReflectionSet>()).collect();
        let l = SubgroupLattice::from_sets(w, LatticeKind::Infinity, sets).map_err(|e| e.to_string())?;
        if *self != LatticeCache::from_lattice(w, &l) {
            return Err("stored tables do not match the rebuilt lattice".into());
        }
        Ok(l)
    }
}

pub fn cache_file_name(ct: &CoxeterType) -> String {
    match ct.m() {
        Some(m) => format!("{}-m{m}-Linf.json", ct.family()),
        None => format!("{}{}-Linf.json", ct.family(), ct.rank()),
    }
}

/// Writes through a temporary file in the same directory, then renames.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp{}",
        path.file_name().and_then(|n| n.to_str()).unwrap_or("out"),
        std::process::id()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(contents.as_bytes())?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)
}

/// `L_∞` from the cache if present and valid, else computed and stored.
/// Returns the lattice and how it was obtained.
pub fn load_or_build_l_infinity(
    w: &CoxeterSystem,
    cache_dir: Option<&Path>,
) -> Result<(SubgroupLattice, &'static str), ReportError> {
    let Some(dir) = cache_dir else {
        return Ok((lattice::enumerate_l_infinity(w)?, "computed"));
    };
    let path = dir.join(cache_file_name(w.ctype()));
    if path.exists() {
        let text = fs::read_to_string(&path)?;
        let cache = LatticeCache::from_json(&text)?;
        let l = cache.to_lattice(w).map_err(|reason| ReportError::Cache { path: path.clone(), reason })?;
        return Ok((l, "cache"));
    }
    let l = lattice::enumerate_l_infinity(w)?;
    write_atomic(&path, &LatticeCache::from_lattice(w, &l).to_json())?;
    Ok((l, "computed and cached"))
}

fn build_lattice(w: &CoxeterSystem, cfg: &RunConfig) -> Result<(SubgroupLattice, &'static str), ReportError> {
    match cfg.selector {
        Selector::Infinity => load_or_build_l_infinity(w, cfg.cache_dir.as_deref()),
        s => Ok((lattice::enumerate(w, s.kind())?, "computed")),
    }
}

pub fn cmd_lattice(cfg: &RunConfig) -> Result<Report, ReportError> {
    let w = CoxeterSystem::new(cfg.ctype);
    let (l, source) = build_lattice(&w, cfg)?;
    let mut body = json!({
        "command": "lattice",
        "config": cfg.echo("lattice"),
        "lattice": lattice_stats(&w, &l),
        "source": source,
    });
    if cfg.selector == Selector::Infinity && w.is_crystallographic() {
        let lp = lattice::enumerate_l_p(&w)?;
        let complement: Vec<Value> = l
            .orbits()
            .iter()
            .filter(|o| lp.index_of(l.set(o.representative)).is_none())
            .map(|o| {
                let rep = l.set(o.representative).to_vec();
                json!({ "size": o.members.len(), "type": w.subgroup_type(&rep), "representative": rep })
            })
            .collect();
        body["parabolic_complement"] = json!({
            "parabolic_size": lp.len(),
            "orbit_count": complement.len(),
            "orbits": complement,
        });
    }
    Ok(Report { body, passed: true })
}

pub fn cmd_admissible(cfg: &RunConfig) -> Result<Report, ReportError> {
    let w = CoxeterSystem::new(cfg.ctype);
    if !w.is_crystallographic() {
        return Err(LatticeError::NotCrystallographic(cfg.ctype.to_string()).into());
    }
    let (linf, source) = load_or_build_l_infinity(&w, cfg.cache_dir.as_deref())?;
    let search = lattice::enumerate_intermediate_admissible(&w, &linf, cfg.max_orbits)?;
    let label = |added: &[usize]| -> Vec<String> {
        added.iter().map(|&k| search.complement[k].subgroup_type.clone()).collect()
    };
    let tested: Vec<Value> = search
        .tested
        .iter()
        .map(|(added, ok)| json!({ "added": label(added), "admissible": ok }))
        .collect();
    let strict: Vec<Value> = search
        .strict()
        .map(|l| json!({ "added": label(&l.added), "size": l.members.len() }))
        .collect();
    let complement: Vec<Value> = search
        .complement
        .iter()
        .map(|c| json!({ "type": c.subgroup_type, "size": c.size, "representative": linf.set(c.representative).to_vec() }))
        .collect();
    let body = json!({
        "command": "admissible",
        "config": cfg.echo("admissible"),
        "source": source,
        "l_infinity_size": linf.len(),
        "complement_orbits": complement,
        "unions_tested": tested,
        "admissible_count": search.admissible.len(),
        "strict_intermediate": strict,
    });
    Ok(Report { body, passed: true })
}

fn status(passed: bool) -> &'static str {
    if passed {
        "pass"
    } else {
        "fail"
    }
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Report, ReportError> {
    let w = CoxeterSystem::new(cfg.ctype);
    let (l, source) = build_lattice(&w, cfg)?;
    let alg = Algebra::new(&w, &l);
    let form = TraceForm::closed_form(&alg);
    let mut checks = serde_json::Map::new();
    let mut all = true;
    let mut gram = None;
    for check in Check::ALL {
        if !cfg.checks.contains(&check) {
            checks.insert(check.name().into(), json!({ "status": "skipped" }));
            continue;
        }
        let start = Instant::now();
        let (passed, mut entry) = match check {
            Check::Relations => {
                let rs = alg.verify_relations();
                let passed = rs.iter().all(|r| r.passed);
                (passed, json!({ "relations": rs, "basis_vectors": alg.dimension() }))
            }
            Check::Blocks => {
                let p = alg.check_peirce();
                let b = alg.block_dimension_report();
                let mut passed = p.passed && b.total == b.expected_total;
                let mut entry = json!({ "peirce": p, "table": b });
                if l.kind() == LatticeKind::L2 {
                    let group_corner = alg.check_group_corner();
                    let hecke_corner = alg.check_hecke_corner();
                    passed &= group_corner && hecke_corner;
                    entry["group_corner"] = json!(group_corner);
                    entry["hecke_corner"] = json!(hecke_corner);
                }
                (passed, entry)
            }
            Check::Trace => {
                let g = gram.get_or_insert_with(|| trace::gram_matrix(&alg, &form));
                let r = trace::trace_property_from_gram(&alg, g);
                (r.passed, json!(r))
            }
            Check::Gram => {
                let g = gram.get_or_insert_with(|| trace::gram_matrix(&alg, &form));
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                let point: Vec<u64> = (0..alg.num_parameters()).map(|_| rng.gen_range(2..GRAM_PRIME)).collect();
                let fast = trace::det_mod_p(g, GRAM_PRIME, &point);
                let det = trace::gram_det_from_gram(&alg, g);
                let passed = !num_traits::Zero::is_zero(&det);
                (
                    passed,
                    json!({
                        "determinant": det.to_string(),
                        "modular_fast_path_nonzero": fast != 0,
                        "dimension": alg.dimension(),
                    }),
                )
            }
            Check::Specialization => {
                let semidirect = alg.check_semidirect_specialization();
                let r = trace::check_specialization_consistency(&alg, &form);
                let witness = semidirect.map(|(a, b)| format!("{} · {}", alg.describe(a), alg.describe(b)));
                (
                    semidirect.is_none() && r.passed,
                    json!({ "structure_constants_witness": witness, "trace": r }),
                )
            }
        };
        entry["status"] = json!(status(passed));
        if cfg.timings {
            entry["seconds"] = json!(start.elapsed().as_secs_f64());
        }
        all &= passed;
        checks.insert(check.name().into(), entry);
    }
    let body = json!({
        "command": "verify",
        "config": cfg.echo("verify"),
        "source": source,
        "lattice": lattice_stats(&w, &l),
        "dimension": alg.dimension(),
        "checks": Value::Object(checks),
        "status": status(all),
    });
    Ok(Report { body, passed: all })
}

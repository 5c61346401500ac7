//! The subcommands, as functions from settings to rendered output.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::json;
use sosgraph::clique::{brute_force_maximum_cliques, count_maximum_cliques, CliqueCensus, BRUTE_FORCE_BOUND};
use sosgraph::graph::{weyl_orbit_labels, Adjacency, BuildOptions, Gamma, SosGraph};
use sosgraph::iso::{
    automorphism_group_order, check_degree_formula, check_graph_isomorphism_small, check_mod8,
    check_scaling_isomorphism, check_weyl_automorphism, CheckReport, DEFAULT_SAMPLE_PAIRS, DEFAULT_SEED,
    ISOMORPHISM_BOUND,
};
use sosgraph::sunflower::{count_sunflower_max_cliques, count_sunflowers_in_basis, percentage, BasisChange};
use sosgraph::{build_root_system, RootSystem, RootSystemKind};

use crate::cache::Cache;
use crate::table::{Cell, Format, Table, SKIPPED};

/// Default cap on vertex pairs per graph: everything except `E8` with
/// `k = 6, 7`.
pub const DEFAULT_MAX_PAIRS: u64 = 1_000_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Success,
    /// Some rows were skipped for budget reasons.
    Partial,
    Failure,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Failure => 1,
            Status::Partial => 2,
        }
    }
}

#[derive(Debug)]
pub struct Outcome {
    pub text: String,
    pub status: Status,
}

impl Outcome {
    fn from_table(t: &Table, format: Format) -> Result<Self> {
        Ok(Self {
            text: t.render(format)?,
            status: if t.has_skipped() { Status::Partial } else { Status::Success },
        })
    }
}

#[derive(Debug, Clone)]
pub struct Settings {
    pub cache: Cache,
    pub format: Format,
    pub max_pairs: u64,
    pub build: BuildOptions,
}

/// The systems to report on, in table order.
pub fn systems(filter: Option<RootSystemKind>) -> Vec<RootSystemKind> {
    filter.map_or_else(|| RootSystemKind::EXCEPTIONAL.to_vec(), |k| vec![k])
}

/// `k` itself, or every populated `k` of the system.
pub fn k_values(kind: RootSystemKind, k: Option<usize>) -> Vec<usize> {
    k.map_or_else(|| (1..=kind.max_sos_size()).collect(), |k| vec![k])
}

fn pairs(n: usize) -> u64 {
    (n as u64) * (n as u64).saturating_sub(1) / 2
}

/// The implicit graph with its vertex-file checksum, or `None` when it has
/// more pairs than the budget allows.
fn gamma_within_budget(s: &Settings, rs: &RootSystem, k: usize) -> Result<Option<(Gamma, String)>> {
    let (g, sha) = s.cache.gamma(rs, k)?;
    Ok((pairs(g.order()) <= s.max_pairs).then_some((g, sha)))
}

fn warn_if_empty(kind: RootSystemKind, k: usize) {
    if k > kind.max_sos_size() {
        eprintln!("warning: k exceeds max SOS size {} of {kind}", kind.max_sos_size());
    }
}

fn write_dot(g: &SosGraph, path: &Path) -> Result<()> {
    let mut s = format!("// Gamma({}, {}); labels are doubled coordinates\ngraph G {{\n", g.system, g.k);
    for (i, v) in g.vertices.iter().enumerate() {
        writeln!(s, "  {i} [label=\"{v}\"];")?;
    }
    for (u, v) in g.edges() {
        writeln!(s, "  {u} -- {v};")?;
    }
    s.push_str("}\n");
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display()))
}

pub fn build(s: &Settings, kind: RootSystemKind, k: usize, dot: Option<&Path>) -> Result<Outcome> {
    warn_if_empty(kind, k);
    let rs = build_root_system(kind)?;
    let cached = s.cache.graph(&rs, k, &s.build)?;
    eprintln!(
        "{} {}",
        if cached.reused { "reused" } else { "built" },
        cached.path.display()
    );
    if let Some(path) = dot {
        write_dot(&cached.value, path)?;
    }
    let mut t = Table::new("build", &["system", "k", "vertices", "edges", "path", "sha256"]);
    t.push(
        vec![
            kind.to_string().into(),
            k.into(),
            cached.value.order().into(),
            cached.value.edge_count().into(),
            cached.path.display().to_string().into(),
            cached.sha256.clone().into(),
        ],
        None,
    );
    Outcome::from_table(&t, s.format)
}

const PARAMETER_HEADERS: [&str; 7] = ["system", "k", "vertices", "edges", "min_degree", "max_degree", "components"];

fn parameter_rows(s: &Settings, kinds: &[RootSystemKind], k: Option<usize>) -> Result<Table> {
    let mut t = Table::new("parameters", &PARAMETER_HEADERS);
    for &kind in kinds {
        let rs = build_root_system(kind)?;
        for k in k_values(kind, k) {
            warn_if_empty(kind, k);
            let mut row: Vec<Cell> = vec![kind.to_string().into(), k.into()];
            match gamma_within_budget(s, &rs, k)? {
                Some((g, sha)) => {
                    let st = g.stream_stats(4096);
                    row.extend([
                        st.n.into(),
                        st.m.into(),
                        st.min_degree.into(),
                        st.max_degree.into(),
                        st.component_count.into(),
                    ]);
                    t.push(row, Some(json!({ "vertex_sha256": sha })));
                }
                None => {
                    row.extend((0..5).map(|_| SKIPPED.into()));
                    t.push(row, None);
                }
            }
        }
    }
    Ok(t)
}

pub fn stats(s: &Settings, kind: RootSystemKind, k: Option<usize>) -> Result<Outcome> {
    Outcome::from_table(&parameter_rows(s, &[kind], k)?, s.format)
}

fn census(g: &Gamma, rs: &RootSystem) -> Result<CliqueCensus> {
    let orbits = weyl_orbit_labels(rs, g)?;
    Ok(count_maximum_cliques(g, &orbits)?)
}

pub fn cliques(s: &Settings, kind: RootSystemKind, k: Option<usize>, brute_force: bool) -> Result<Outcome> {
    let mut headers = vec!["system", "k", "omega", "n_i", "c_i", "total"];
    if brute_force {
        headers.push("brute_force_total");
    }
    let mut t = Table::new("cliques", &headers);
    let rs = build_root_system(kind)?;
    let mut mismatch = false;
    for k in k_values(kind, k) {
        warn_if_empty(kind, k);
        let Some((g, sha)) = gamma_within_budget(s, &rs, k)? else {
            let mut row: Vec<Cell> = vec![kind.to_string().into(), k.into()];
            row.extend((2..headers.len()).map(|_| SKIPPED.into()));
            t.push(row, None);
            continue;
        };
        let c = census(&g, &rs)?;
        let brute = if brute_force {
            let n = brute_force_maximum_cliques(&g, BRUTE_FORCE_BOUND)?.len() as u64;
            mismatch |= n != c.total_maximum_cliques;
            Some(n)
        } else {
            None
        };
        for o in &c.per_orbit {
            let mut row: Vec<Cell> = vec![
                kind.to_string().into(),
                k.into(),
                c.omega.into(),
                o.orbit_size.into(),
                o.per_vertex.into(),
                c.total_maximum_cliques.into(),
            ];
            if let Some(n) = brute {
                row.push(n.into());
            }
            t.push(row, Some(json!({ "vertex_sha256": sha, "representative": o.representative })));
        }
    }
    let mut out = Outcome::from_table(&t, s.format)?;
    if mismatch {
        out.status = Status::Failure;
    }
    Ok(out)
}

const SUNFLOWER_HEADERS: [&str; 5] = ["system", "k", "maximum_cliques", "sunflowers", "percentage"];

fn sunflower_rows(
    s: &Settings,
    kinds: &[RootSystemKind],
    k: Option<usize>,
    basis: Option<&BasisChange>,
) -> Result<Table> {
    let mut t = Table::new("sunflowers", &SUNFLOWER_HEADERS);
    for &kind in kinds {
        let rs = build_root_system(kind)?;
        for k in k_values(kind, k) {
            warn_if_empty(kind, k);
            let mut row: Vec<Cell> = vec![kind.to_string().into(), k.into()];
            let Some((g, sha)) = gamma_within_budget(s, &rs, k)? else {
                row.extend((0..3).map(|_| SKIPPED.into()));
                t.push(row, None);
                continue;
            };
            let c = census(&g, &rs)?;
            let sunflowers = if c.omega < 2 {
                0
            } else if let Some(b) = basis {
                count_sunflowers_in_basis(&g, &rs, c.omega, b)?
            } else {
                count_sunflower_max_cliques(&g, &rs, c.omega)?.total_sunflowers
            };
            row.extend([
                c.total_maximum_cliques.into(),
                sunflowers.into(),
                percentage(sunflowers, c.total_maximum_cliques).into(),
            ]);
            t.push(row, Some(json!({ "vertex_sha256": sha, "omega": c.omega })));
        }
    }
    Ok(t)
}

pub fn sunflowers(s: &Settings, kind: RootSystemKind, k: Option<usize>, basis: Option<&Path>) -> Result<Outcome> {
    let basis = basis.map(BasisChange::from_file).transpose()?;
    Outcome::from_table(&sunflower_rows(s, &[kind], k, basis.as_ref())?, s.format)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Parameters,
    Cliques,
    Sunflowers,
}

/// Clique numbers, one row per system with a column per `k`.
fn clique_number_rows(s: &Settings, kinds: &[RootSystemKind], only_k: Option<usize>) -> Result<Table> {
    let max_k = kinds.iter().map(|k| k.max_sos_size()).max().unwrap_or(0);
    let columns: Vec<usize> = only_k.map_or_else(|| (1..=max_k).collect(), |k| vec![k]);
    let labels: Vec<String> = columns.iter().map(|k| format!("k{k}")).collect();
    let mut headers = vec!["system"];
    headers.extend(labels.iter().map(String::as_str));
    let mut t = Table::new("clique_numbers", &headers);
    for &kind in kinds {
        let rs = build_root_system(kind)?;
        let mut row: Vec<Cell> = vec![kind.to_string().into()];
        let mut shas = Vec::new();
        for &k in &columns {
            if k > kind.max_sos_size() {
                row.push(Cell::Empty);
                continue;
            }
            match gamma_within_budget(s, &rs, k)? {
                Some((g, sha)) => {
                    row.push(census(&g, &rs)?.omega.into());
                    shas.push(json!({ "k": k, "vertex_sha256": sha }));
                }
                None => row.push(SKIPPED.into()),
            }
        }
        t.push(row, Some(json!(shas)));
    }
    Ok(t)
}

pub fn table(s: &Settings, which: Which, kind: Option<RootSystemKind>, k: Option<usize>) -> Result<Outcome> {
    let kinds = systems(kind);
    let t = match which {
        Which::Parameters => parameter_rows(s, &kinds, k)?,
        Which::Cliques => clique_number_rows(s, &kinds, k)?,
        Which::Sunflowers => sunflower_rows(s, &kinds, k, None)?,
    };
    Outcome::from_table(&t, s.format)
}

#[derive(Debug, Serialize)]
struct VerifyEntry {
    expected: bool,
    ok: bool,
    #[serde(flatten)]
    report: CheckReport,
}

fn entry(report: CheckReport, expected: bool) -> VerifyEntry {
    VerifyEntry {
        expected,
        ok: report.passed == expected,
        report,
    }
}

/// Runs the structural checks and reports each as JSON.
pub fn verify(s: &Settings, kind: Option<RootSystemKind>) -> Result<Outcome> {
    let wanted = |k: RootSystemKind| kind.map_or(true, |w| w == k);
    let mut entries = Vec::new();
    let mut skipped = false;
    let systems: Vec<RootSystem> = systems(kind).into_iter().map(build_root_system).collect::<Result<_, _>>()?;
    let find = |k: RootSystemKind| systems.iter().find(|r| r.kind() == k);

    for (k, small, large, expected) in [
        (RootSystemKind::E6, 1, 4, true),
        (RootSystemKind::E8, 2, 8, true),
        (RootSystemKind::E7, 1, 7, false),
    ] {
        if let Some(rs) = find(k) {
            entries.push(entry(check_scaling_isomorphism(rs, small, large)?, expected));
        }
    }
    for rs in systems.iter().filter(|r| r.is_simply_laced()) {
        entries.push(entry(check_mod8(rs, rs.max_sos_size(), DEFAULT_SAMPLE_PAIRS, DEFAULT_SEED)?, true));
        entries.push(entry(check_degree_formula(rs)?, true));
    }
    if let Some(rs) = find(RootSystemKind::E7) {
        let g = Gamma::from_system(rs, 7)?;
        let st = g.stream_stats(4096);
        entries.push(entry(
            CheckReport {
                check: "Gamma(E7, 7) has no edges".into(),
                passed: st.m == 0,
                detail: format!("{} vertices, {} edges", st.n, st.m),
                checked: pairs(st.n),
                exhaustive: true,
                seed: None,
            },
            true,
        ));
    }
    for rs in &systems {
        for k in 1..=rs.max_sos_size() {
            match gamma_within_budget(s, rs, k)? {
                Some((g, _)) => {
                    let mut r = check_weyl_automorphism(&g, rs, DEFAULT_SAMPLE_PAIRS, DEFAULT_SEED)?;
                    r.check = format!("{} on Gamma({}, {k})", r.check, rs.kind());
                    entries.push(entry(r, true));
                }
                None => skipped = true,
            }
        }
    }
    if wanted(RootSystemKind::F4) {
        let f4 = build_root_system(RootSystemKind::F4)?;
        let d4 = build_root_system(RootSystemKind::D(4))?;
        let a = s.cache.graph(&f4, 4, &s.build)?.value;
        let b = s.cache.graph(&d4, 1, &s.build)?.value;
        let (mut r, _) = check_graph_isomorphism_small(&a, &b, ISOMORPHISM_BOUND)?;
        r.check = "Gamma(F4, 4) isomorphic to Gamma(D4, 1)".into();
        entries.push(entry(r, true));
        let order = automorphism_group_order(&a, ISOMORPHISM_BOUND)?;
        entries.push(entry(
            CheckReport {
                check: "automorphism group order of Gamma(F4, 4)".into(),
                passed: order == 1152,
                detail: format!("order {order}, expected 1152"),
                checked: 24,
                exhaustive: true,
                seed: None,
            },
            true,
        ));
    }
    if let Some(rs) = find(RootSystemKind::E6) {
        let a = s.cache.graph(rs, 1, &s.build)?.value;
        let b = s.cache.graph(rs, 4, &s.build)?.value;
        let (mut r, _) = check_graph_isomorphism_small(&a, &b, ISOMORPHISM_BOUND)?;
        r.check = "Gamma(E6, 1) isomorphic to Gamma(E6, 4)".into();
        entries.push(entry(r, true));
    }

    let all_ok = entries.iter().all(|e| e.ok);
    let mut text = serde_json::to_string_pretty(&json!({ "checks": entries, "all_ok": all_ok }))?;
    text.push('\n');
    let status = if !all_ok {
        Status::Failure
    } else if skipped {
        Status::Partial
    } else {
        Status::Success
    };
    Ok(Outcome { text, status })
}

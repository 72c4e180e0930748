//! End-to-end run: ladder, matrices, grouping, hierarchy, analysis, limit.

use std::fs;
use std::path::Path;
use std::time::{Duration, Instant};

use anyhow::{anyhow, bail, Context};
use monotile_core::analysis::{check_partitions, return_times, scan_occurrences, syndeticity_window, CylinderId};
use monotile_core::blocks::{augment_matrix, satisfies_importante, verify_c3, BlockHierarchy};
use monotile_core::folner::{
    build_abelian_chain_ladder, build_heisenberg_ladder, build_interval_ladder, build_lattice_ladder,
    build_pruefer_ladder, check_congruent, EpsSchedule, FolnerLadder,
};
use monotile_core::measures::{
    approximate_limit, incidence_from_hierarchy, realize_finite_simplex, select_subsequence_lemma8, RatioSchedule,
};
use monotile_core::rational::parse_rational;
use monotile_core::{BigInt, GroupContext, ManagedMatrix, ManagedSequence};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "route", rename_all = "snake_case")]
pub enum LadderRoute {
    Lattice { depth: usize },
    Interval { ratios: Vec<u64> },
    Pruefer { depth: usize },
    AbelianChain { generators: Vec<String>, depth: usize },
    Heisenberg { depth: usize, eps: String, l_depth: usize },
    File { path: String },
}

impl LadderRoute {
    pub fn depth(&self) -> Option<usize> {
        match self {
            LadderRoute::Lattice { depth }
            | LadderRoute::Pruefer { depth }
            | LadderRoute::AbelianChain { depth, .. }
            | LadderRoute::Heisenberg { depth, .. } => Some(*depth),
            LadderRoute::Interval { ratios } => Some(ratios.len()),
            LadderRoute::File { .. } => None,
        }
    }
}

pub fn build_ladder(group: &GroupContext, route: &LadderRoute) -> anyhow::Result<FolnerLadder> {
    let ladder = match (route, group) {
        (LadderRoute::Lattice { depth }, GroupContext::Lattice { d }) => build_lattice_ladder(*d, *depth)?,
        (LadderRoute::Interval { ratios }, GroupContext::Lattice { d: 1 }) => build_interval_ladder(ratios)?,
        (LadderRoute::Pruefer { depth }, GroupContext::Pruefer { p }) => build_pruefer_ladder(*p, *depth)?,
        (LadderRoute::AbelianChain { generators, depth }, g) => {
            let gens = generators
                .iter()
                .map(|s| g.parse_element(s))
                .collect::<Result<Vec<_>, _>>()?;
            build_abelian_chain_ladder(g, &gens, *depth)?
        }
        (LadderRoute::Heisenberg { depth, eps, l_depth }, GroupContext::Heisenberg3) => {
            build_heisenberg_ladder(*depth, &EpsSchedule::parse(eps)?, *l_depth)?.ladder
        }
        (LadderRoute::File { path }, g) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading ladder {path}"))?;
            let l = FolnerLadder::from_json(&text)?;
            if l.ctx() != g {
                bail!("ladder file is over {}, config names {}", l.ctx().name(), g.name());
            }
            l
        }
        (r, g) => bail!("route {r:?} does not apply to {}", g.name()),
    };
    Ok(ladder)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum MatrixSource {
    /// augmented-ready managed matrices; base scale is `|F_0|`
    File { path: String },
    Realize { d: usize, tolerance: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub group: GroupContext,
    pub ladder: LadderRoute,
    pub k0: usize,
    pub matrices: MatrixSource,
    pub analysis_level: usize,
    #[serde(default = "default_k_bound")]
    pub k_bound: String,
}

fn default_k_bound() -> String {
    "1".into()
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            group: GroupContext::lattice(1),
            ladder: LadderRoute::Lattice { depth: 4 },
            k0: 3,
            matrices: MatrixSource::Realize {
                d: 2,
                tolerance: "1/100".into(),
            },
            analysis_level: 2,
            k_bound: default_k_bound(),
        }
    }
}

impl PipelineConfig {
    /// Checks that do not need any construction.
    pub fn validate(&self) -> anyhow::Result<()> {
        if self.k0 < 3 {
            bail!("k0 must be at least 3");
        }
        if self.analysis_level < 1 {
            bail!("analysis level must be at least 1");
        }
        if let Some(depth) = self.ladder.depth() {
            if self.analysis_level > depth {
                bail!(
                    "analysis level {} exceeds ladder depth {depth}",
                    self.analysis_level
                );
            }
        }
        if let MatrixSource::File { path } = &self.matrices {
            if !Path::new(path).exists() {
                bail!("matrix file {path} does not exist");
            }
        }
        if let LadderRoute::File { path } = &self.ladder {
            if !Path::new(path).exists() {
                bail!("ladder file {path} does not exist");
            }
        }
        parse_rational(&self.k_bound)?;
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub stage: String,
    pub pass: bool,
    pub checks: Vec<Check>,
    pub artifacts: Vec<String>,
    pub error: Option<String>,
    #[serde(skip)]
    pub elapsed: Duration,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RunReport {
    pub pass: bool,
    pub stages: Vec<StageReport>,
}

pub const STAGES: [(&str, &[&str]); 6] = [
    ("ladder", &["congruent"]),
    ("matrices", &["managed", "nesting"]),
    ("grouping", &["lemma8_certificate", "augmentation_importante"]),
    ("hierarchy", &["c1_c2", "c3"]),
    ("analysis", &["return_time_oracle", "kr_partitions", "syndeticity"]),
    ("limit", &["incidence_round_trip", "grouped_nesting"]),
];

struct Stage {
    name: &'static str,
    checks: Vec<Check>,
    artifacts: Vec<String>,
    start: Instant,
}

impl Stage {
    fn new(name: &'static str) -> Self {
        Stage {
            name,
            checks: Vec::new(),
            artifacts: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.into(),
            pass,
            detail: detail.into(),
        });
    }

    fn finish(self, error: Option<String>) -> StageReport {
        let declared = STAGES
            .iter()
            .find(|(s, _)| *s == self.name)
            .map(|(_, c)| *c)
            .unwrap_or(&[]);
        let mut checks = Vec::with_capacity(declared.len());
        for name in declared {
            match self.checks.iter().find(|c| c.name == *name) {
                Some(c) => checks.push(c.clone()),
                None => checks.push(Check {
                    name: (*name).into(),
                    pass: false,
                    detail: "not run".into(),
                }),
            }
        }
        StageReport {
            stage: self.name.into(),
            pass: error.is_none() && checks.iter().all(|c| c.pass),
            checks,
            artifacts: self.artifacts,
            error,
            elapsed: self.start.elapsed(),
        }
    }
}

fn skipped(name: &'static str) -> StageReport {
    let mut r = Stage::new(name).finish(Some("skipped after an earlier failure".into()));
    r.elapsed = Duration::ZERO;
    r
}

fn write_artifact(out: Option<&Path>, stage: &mut Stage, file: &str, body: &str) -> anyhow::Result<()> {
    if let Some(dir) = out {
        fs::write(dir.join(file), body).with_context(|| format!("writing {file}"))?;
        stage.artifacts.push(file.into());
    }
    Ok(())
}

struct State {
    ladder: Option<FolnerLadder>,
    sequence: Option<ManagedSequence>,
    indices: Vec<usize>,
    augmented: Vec<ManagedMatrix>,
    hierarchy: Option<BlockHierarchy>,
}

fn stage_ladder(cfg: &PipelineConfig, out: Option<&Path>, st: &mut State, s: &mut Stage) -> anyhow::Result<()> {
    let ladder = build_ladder(&cfg.group, &cfg.ladder)?;
    let r = check_congruent(&ladder);
    let detail = match &r.violation {
        None => format!("{} levels", ladder.depth()),
        Some(v) => v.to_string(),
    };
    s.check("congruent", r.pass, detail);
    write_artifact(out, s, "ladder.json", &ladder.to_json())?;
    st.ladder = Some(ladder);
    Ok(())
}

fn stage_matrices(cfg: &PipelineConfig, out: Option<&Path>, st: &mut State, s: &mut Stage) -> anyhow::Result<()> {
    let ladder = st.ladder.as_ref().ok_or_else(|| anyhow!("no ladder"))?;
    let base = BigInt::from(ladder.levels()[0].len());
    let seq = match &cfg.matrices {
        MatrixSource::File { path } => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {path}"))?;
            match ManagedSequence::from_json(&text, base) {
                Ok(seq) => seq,
                Err(e) => {
                    s.check("managed", false, e.to_string());
                    return Ok(());
                }
            }
        }
        MatrixSource::Realize { d, tolerance } => {
            let tol = parse_rational(tolerance)?;
            realize_finite_simplex(*d, &RatioSchedule::stationary(ladder), &tol)?.sequence
        }
    };
    let ratios_match = seq
        .matrices()
        .iter()
        .zip(ladder.ratios())
        .all(|(m, r)| m.ratio() == r);
    s.check(
        "managed",
        ratios_match,
        format!("{} matrices, column sums follow the ladder ratios", seq.len()),
    );
    let mut nested = true;
    for d in 1..=seq.len() {
        nested &= approximate_limit(&seq, 0, d)?.nesting.verified;
    }
    s.check("nesting", nested, format!("depths 1..{}", seq.len()));
    write_artifact(out, s, "matrices.json", &seq.to_json())?;
    st.sequence = Some(seq);
    Ok(())
}

fn stage_grouping(cfg: &PipelineConfig, out: Option<&Path>, st: &mut State, s: &mut Stage) -> anyhow::Result<()> {
    let ladder = st.ladder.as_ref().ok_or_else(|| anyhow!("no ladder"))?;
    let seq = st.sequence.as_ref().ok_or_else(|| anyhow!("no matrices"))?;
    let sel = select_subsequence_lemma8(seq, &parse_rational(&cfg.k_bound)?)?;
    let usable = sel.indices.iter().take_while(|&&i| i <= ladder.depth()).count();
    s.check(
        "lemma8_certificate",
        sel.certificate_holds() && usable >= 2,
        format!("indices {:?}, {} dropped", &sel.indices[..usable], sel.dropped_tail),
    );
    let mut augmented = Vec::new();
    for m in &sel.grouped[..usable.saturating_sub(1)] {
        augmented.push(augment_matrix(m, m.cols())?);
    }
    let ok = augmented.iter().all(satisfies_importante);
    s.check("augmentation_importante", ok, format!("{} augmented matrices", augmented.len()));
    let seq_aug = ManagedSequence::new(BigInt::from(ladder.levels()[0].len()), augmented.clone())?;
    write_artifact(out, s, "augmented.json", &seq_aug.to_json())?;
    st.indices = sel.indices[..usable].to_vec();
    st.augmented = augmented;
    Ok(())
}

fn stage_hierarchy(cfg: &PipelineConfig, out: Option<&Path>, st: &mut State, s: &mut Stage) -> anyhow::Result<()> {
    let ladder = st.ladder.as_ref().ok_or_else(|| anyhow!("no ladder"))?;
    let grouped = ladder.subsequence(&st.indices)?;
    if st.augmented.first().map(|m| m.rows()) != Some(cfg.k0) {
        bail!(
            "k0 = {} but the first augmented matrix has {:?} rows",
            cfg.k0,
            st.augmented.first().map(|m| m.rows())
        );
    }
    let h = BlockHierarchy::build(&grouped, cfg.k0, &st.augmented)?;
    let structure = h.check_structure();
    s.check("c1_c2", structure.is_ok(), match structure {
        Ok(()) => format!("{} levels", h.depth()),
        Err(e) => e.to_string(),
    });
    let mut c3_ok = true;
    let mut detail = format!("levels 0..={}", h.depth());
    for n in 0..=h.depth() {
        let r = verify_c3(h.ctx(), h.family(n)?, grouped.level(n)?);
        if !r.pass {
            c3_ok = false;
            if let Some((g, k, kp)) = r.witness {
                detail = format!("level {n}: g={g}, k={k}, k'={kp}");
            }
            break;
        }
    }
    s.check("c3", c3_ok, detail);
    write_artifact(out, s, "hierarchy.json", &h.to_json())?;
    st.hierarchy = Some(h);
    Ok(())
}

fn stage_analysis(cfg: &PipelineConfig, out: Option<&Path>, st: &mut State, s: &mut Stage) -> anyhow::Result<()> {
    let h = st.hierarchy.as_ref().ok_or_else(|| anyhow!("no hierarchy"))?;
    let top = cfg.analysis_level;
    if top > h.depth() {
        bail!("analysis level {top} exceeds the hierarchy depth {}", h.depth());
    }
    let mut oracle = true;
    let mut bad = String::new();
    for m in 1..=top {
        for n in 0..m {
            if scan_occurrences(h, n, m)? != return_times(h, n, m)? {
                oracle = false;
                bad = format!("n={n}, m={m}");
            }
        }
    }
    s.check("return_time_oracle", oracle, if oracle { format!("all 0 <= n < m <= {top}") } else { bad });
    let mut kr = Vec::new();
    for n in 0..top.saturating_sub(1) {
        for m in n + 2..=top {
            kr.push(check_partitions(h, n, m)?);
        }
    }
    let kr_ok = kr.iter().all(|r| r.pass());
    s.check(
        "kr_partitions",
        kr_ok,
        format!("{} windows{}", kr.len(), if kr.is_empty() { " (none testable)" } else { "" }),
    );
    let mut synd = true;
    for n in 1..top {
        synd &= syndeticity_window(h, CylinderId { level: n - 1, block: 1 }, top)?.covered;
    }
    s.check("syndeticity", synd, format!("cylinders below level {top}"));
    write_artifact(out, s, "kr.json", &serde_json::to_string_pretty(&kr)?)?;
    Ok(())
}

fn stage_limit(_cfg: &PipelineConfig, out: Option<&Path>, st: &mut State, s: &mut Stage) -> anyhow::Result<()> {
    let h = st.hierarchy.as_ref().ok_or_else(|| anyhow!("no hierarchy"))?;
    let mut round = true;
    for n in 0..h.depth() {
        round &= incidence_from_hierarchy(h, n)? == st.augmented[n];
    }
    s.check("incidence_round_trip", round, format!("{} levels", h.depth()));
    let seq = ManagedSequence::new(BigInt::from(h.ladder().levels()[0].len()), st.augmented.clone())?;
    let mut nested = true;
    let mut summary = Vec::new();
    for d in 1..=seq.len() {
        let lim = approximate_limit(&seq, 0, d)?;
        nested &= lim.nesting.verified;
        summary.push(serde_json::json!({
            "depth": d,
            "vertices": lim.approximant.vertices.iter()
                .map(|v| v.iter().map(|x| x.to_string()).collect::<Vec<_>>())
                .collect::<Vec<_>>(),
            "hausdorff": lim.nesting.hausdorff.to_string(),
        }));
    }
    s.check("grouped_nesting", nested, format!("depths 1..{}", seq.len()));
    write_artifact(out, s, "limit.json", &serde_json::to_string_pretty(&summary)?)?;
    Ok(())
}

type StageFn = fn(&PipelineConfig, Option<&Path>, &mut State, &mut Stage) -> anyhow::Result<()>;

/// Runs all stages; a failing stage stops the run and later stages are
/// reported as skipped. Writes `report.json` next to the artifacts.
pub fn run_pipeline(cfg: &PipelineConfig, out: Option<&Path>) -> anyhow::Result<RunReport> {
    cfg.validate().context("inconsistent pipeline config")?;
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        fs::write(dir.join("config.json"), serde_json::to_string_pretty(cfg)?)?;
    }
    let stages: [(&'static str, StageFn); 6] = [
        ("ladder", stage_ladder),
        ("matrices", stage_matrices),
        ("grouping", stage_grouping),
        ("hierarchy", stage_hierarchy),
        ("analysis", stage_analysis),
        ("limit", stage_limit),
    ];
    let mut st = State {
        ladder: None,
        sequence: None,
        indices: Vec::new(),
        augmented: Vec::new(),
        hierarchy: None,
    };
    let mut reports = Vec::new();
    let mut failed = false;
    for (name, f) in stages {
        if failed {
            reports.push(skipped(name));
            continue;
        }
        let mut stage = Stage::new(name);
        let res = f(cfg, out, &mut st, &mut stage);
        let report = stage.finish(res.err().map(|e| format!("{e:#}")));
        failed = !report.pass;
        reports.push(report);
    }
    let report = RunReport {
        pass: reports.iter().all(|r| r.pass),
        stages: reports,
    };
    if let Some(dir) = out {
        fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    }
    Ok(report)
}

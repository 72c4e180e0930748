//! Command-line front end: ladders, block hierarchies, subshift analysis and
//! measure limits, plus the end-to-end pipeline.

pub mod pipeline;
pub mod render;

use std::fs;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand};
use monotile_core::analysis::{boundary_mass_bound, check_partitions, return_times, scan_occurrences, syndeticity_window, CylinderId};
use monotile_core::blocks::{verify_c3, x0_patch};
use monotile_core::folner::{check_congruent, folner_defect, invariance_profile, FolnerLadder};
use monotile_core::measures::{approximate_limit, realize_finite_simplex, select_subsequence_lemma8, RatioSchedule};
use monotile_core::rational::parse_rational;
use monotile_core::{BigInt, BlockHierarchy, GroupContext, ManagedSequence};
use serde_json::{json, Value};

use crate::pipeline::{run_pipeline, LadderRoute, PipelineConfig};
use crate::render::{render_pattern, Format};

#[derive(Debug, Parser)]
#[command(name = "monotile", version, about = "Congruent Følner ladders, block subshifts and measure simplices")]
pub struct Cli {
    /// write the result here (a directory for `pipeline`)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Følner ladders
    #[command(subcommand)]
    Folner(FolnerCmd),
    /// block hierarchies
    #[command(subcommand)]
    Blocks(BlocksCmd),
    /// return times, partitions and boundary bounds
    #[command(subcommand)]
    Analyze(AnalyzeCmd),
    /// managed matrices and simplex limits
    #[command(subcommand)]
    Measures(MeasuresCmd),
    /// run every stage from a config file
    Pipeline {
        #[arg(long)]
        config: Option<PathBuf>,
    },
}

#[derive(Debug, Args)]
pub struct GroupArgs {
    /// `lattice:d`, `cyclic:n`, `pruefer:p`, `heisenberg`, `rationals` or a JSON descriptor
    #[arg(long, default_value = "lattice:1")]
    pub group: String,
}

#[derive(Debug, Subcommand)]
pub enum FolnerCmd {
    Build {
        #[command(flatten)]
        group: GroupArgs,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// odd ratios of a centered-interval ladder over Z
        #[arg(long, value_delimiter = ',')]
        ratios: Option<Vec<u64>>,
        /// enumeration of an abelian group, one generator per level
        #[arg(long, value_delimiter = ' ', num_args = 1..)]
        generators: Option<Vec<String>>,
        #[arg(long, default_value = "geometric:2/3")]
        eps: String,
        #[arg(long, default_value_t = 10)]
        l_depth: usize,
    },
    Check {
        ladder: PathBuf,
    },
    Defect {
        ladder: PathBuf,
        /// elements of the window K
        #[arg(long, num_args = 1.., required = true, allow_hyphen_values = true)]
        window: Vec<String>,
    },
}

#[derive(Debug, Subcommand)]
pub enum BlocksCmd {
    Build {
        ladder: PathBuf,
        #[arg(long, default_value_t = 3)]
        k0: usize,
        /// augmented incidence matrices; uniform ones if omitted
        #[arg(long)]
        matrices: Option<PathBuf>,
        #[arg(long)]
        depth: Option<usize>,
    },
    VerifyC3 {
        hierarchy: PathBuf,
        #[arg(long)]
        level: Option<usize>,
    },
    X0 {
        hierarchy: PathBuf,
        #[arg(long)]
        level: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCmd {
    Returns {
        hierarchy: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
    },
    Kr {
        hierarchy: PathBuf,
        /// `a..b`, inclusive
        #[arg(long, value_parser = parse_range)]
        levels: Option<RangeInclusive<usize>>,
    },
    Boundary {
        ladder: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        #[arg(long, value_parser = parse_range)]
        levels: Option<RangeInclusive<usize>>,
    },
}

#[derive(Debug, Subcommand)]
pub enum MeasuresCmd {
    Check {
        matrices: PathBuf,
        #[arg(long, default_value = "1")]
        base_size: String,
    },
    Limit {
        matrices: PathBuf,
        #[arg(long, default_value = "1")]
        base_size: String,
        #[arg(long, default_value_t = 0)]
        level: usize,
        #[arg(long)]
        depth: usize,
    },
    Lemma8 {
        matrices: PathBuf,
        #[arg(long, default_value = "1")]
        base_size: String,
        #[arg(long, default_value = "1")]
        k_bound: String,
    },
    Realize {
        #[arg(long)]
        d: usize,
        #[arg(long, default_value = "1/1000")]
        tolerance: String,
        /// ladder supplying the ratios; ternary Z if omitted
        #[arg(long)]
        ladder: Option<PathBuf>,
        /// continue a constant-ratio ladder past its last level
        #[arg(long)]
        extend: bool,
    },
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let (a, b) = s.split_once("..").ok_or("expected a..b")?;
    let a: usize = a.parse().map_err(|e| format!("{e}"))?;
    let b: usize = b.parse().map_err(|e| format!("{e}"))?;
    if a > b {
        return Err(format!("empty range {a}..{b}"));
    }
    Ok(a..=b)
}

/// Result of one command: a text rendering, a JSON value, and whether every
/// check passed.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub text: String,
    pub json: Value,
    pub pass: bool,
    /// body for `--out` when it differs from the printed output
    pub artifact: Option<String>,
}

impl Outcome {
    fn ok(text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            pass: true,
            artifact: None,
        }
    }

    fn checked(pass: bool, text: String, json: Value) -> Self {
        Outcome {
            text,
            json,
            pass,
            artifact: None,
        }
    }

    fn with_artifact(mut self, body: String) -> Self {
        self.artifact = Some(body);
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Text => self.text.clone(),
            Format::Json => serde_json::to_string_pretty(&self.json).expect("json value"),
        }
    }
}

pub fn parse_group(s: &str) -> anyhow::Result<GroupContext> {
    let s = s.trim();
    if s.starts_with('{') {
        return Ok(serde_json::from_str(s)?);
    }
    let (name, arg) = s.split_once(':').unwrap_or((s, ""));
    let num = || arg.parse::<u64>().with_context(|| format!("group parameter in `{s}`"));
    Ok(match name {
        "lattice" => GroupContext::lattice(num()? as usize),
        "cyclic" => GroupContext::cyclic(num()?)?,
        "pruefer" => GroupContext::pruefer(num()?)?,
        "heisenberg" | "heisenberg3" => GroupContext::Heisenberg3,
        "rationals" => GroupContext::Rationals,
        _ => bail!("unknown group `{s}`"),
    })
}

fn read(path: &Path) -> anyhow::Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn load_ladder(path: &Path) -> anyhow::Result<FolnerLadder> {
    Ok(FolnerLadder::from_json(&read(path)?)?)
}

fn load_hierarchy(path: &Path) -> anyhow::Result<BlockHierarchy> {
    Ok(BlockHierarchy::from_json(&read(path)?)?)
}

fn load_matrices(path: &Path, base_size: &str) -> anyhow::Result<ManagedSequence> {
    let base: BigInt = base_size.parse().map_err(|_| anyhow!("bad base size `{base_size}`"))?;
    Ok(ManagedSequence::from_json(&read(path)?, base)?)
}

fn folner(cmd: &FolnerCmd) -> anyhow::Result<Outcome> {
    match cmd {
        FolnerCmd::Build {
            group,
            depth,
            ratios,
            generators,
            eps,
            l_depth,
        } => {
            let ctx = parse_group(&group.group)?;
            let route = match (&ctx, ratios, generators) {
                (_, _, Some(g)) => LadderRoute::AbelianChain {
                    generators: g.clone(),
                    depth: *depth,
                },
                (GroupContext::Lattice { d: 1 }, Some(r), None) => LadderRoute::Interval { ratios: r.clone() },
                (GroupContext::Lattice { .. }, None, None) => LadderRoute::Lattice { depth: *depth },
                (GroupContext::Pruefer { .. }, None, None) => LadderRoute::Pruefer { depth: *depth },
                (GroupContext::Heisenberg3, None, None) => LadderRoute::Heisenberg {
                    depth: *depth,
                    eps: eps.clone(),
                    l_depth: *l_depth,
                },
                _ => bail!("no ladder builder for {} with these options", ctx.name()),
            };
            let ladder = pipeline::build_ladder(&ctx, &route)?;
            let sizes: Vec<usize> = ladder.levels().iter().map(|f| f.len()).collect();
            let body = ladder.to_json();
            Ok(Outcome::ok(body.clone(), json!({ "group": ctx.name(), "sizes": sizes })).with_artifact(body))
        }
        FolnerCmd::Check { ladder } => {
            let l = load_ladder(ladder)?;
            let r = check_congruent(&l);
            let text = match &r.violation {
                None => format!("congruent: {} levels", r.levels_checked),
                Some(v) => format!("not congruent: {v}"),
            };
            let json = json!({
                "pass": r.pass,
                "levels_checked": r.levels_checked,
                "violation": r.violation.as_ref().map(|v| v.to_string()),
            });
            Ok(Outcome::checked(r.pass, text, json))
        }
        FolnerCmd::Defect { ladder, window } => {
            let l = load_ladder(ladder)?;
            let k = l.ctx().parse_set(window)?;
            let profile = invariance_profile(&l, &k)?;
            let mut lines = Vec::new();
            let mut per_level = Vec::new();
            for (n, f) in l.levels().iter().enumerate() {
                let each = k
                    .iter()
                    .map(|g| Ok((g.to_string(), folner_defect(l.ctx(), f, g)?.to_string())))
                    .collect::<anyhow::Result<Vec<_>>>()?;
                lines.push(format!(
                    "level {n}: |F|={} right-invariance {} folner {}",
                    f.len(),
                    profile[n].defect,
                    each.iter().map(|(g, d)| format!("{g}:{d}")).collect::<Vec<_>>().join(" ")
                ));
                per_level.push(json!({
                    "level": n,
                    "size": f.len(),
                    "right_invariance_defect": profile[n].defect,
                    "folner_defects": each.into_iter().map(|(g, d)| (g, Value::String(d))).collect::<serde_json::Map<_, _>>(),
                }));
            }
            Ok(Outcome::ok(lines.join("\n"), Value::Array(per_level)))
        }
    }
}

fn c3_summary(h: &BlockHierarchy, levels: impl Iterator<Item = usize>) -> anyhow::Result<(bool, Vec<String>, Vec<Value>)> {
    let mut pass = true;
    let mut lines = Vec::new();
    let mut items = Vec::new();
    for n in levels {
        let r = verify_c3(h.ctx(), h.family(n)?, h.ladder().level(n)?);
        pass &= r.pass;
        let witness = r.witness.as_ref().map(|(g, k, kp)| format!("g={g} k={k} k'={kp}"));
        lines.push(format!(
            "level {n}: C3 {} ({} comparisons){}",
            if r.pass { "holds" } else { "fails" },
            r.comparisons,
            witness.as_deref().map(|w| format!(", {w}")).unwrap_or_default()
        ));
        items.push(json!({ "level": n, "pass": r.pass, "comparisons": r.comparisons, "witness": witness }));
    }
    Ok((pass, lines, items))
}

fn blocks(cmd: &BlocksCmd, format: Format) -> anyhow::Result<Outcome> {
    match cmd {
        BlocksCmd::Build {
            ladder,
            k0,
            matrices,
            depth,
        } => {
            let l = load_ladder(ladder)?;
            let h = match matrices {
                Some(path) => {
                    let seq = load_matrices(path, "1")?;
                    let ms = match depth {
                        Some(d) => seq.matrices().get(..*d).ok_or_else(|| anyhow!("only {} matrices", seq.len()))?,
                        None => seq.matrices(),
                    };
                    BlockHierarchy::build(&l, *k0, ms)?
                }
                None => BlockHierarchy::build_uniform(&l, *k0, depth.unwrap_or(l.depth()))?,
            };
            let structure = h.check_structure();
            let (c3, mut lines, items) = c3_summary(&h, 0..=h.depth())?;
            lines.insert(
                0,
                match &structure {
                    Ok(()) => "C1/C2 hold".to_string(),
                    Err(e) => format!("C1/C2 fail: {e}"),
                },
            );
            let json = json!({
                "depth": h.depth(),
                "blocks": h.families().iter().map(Vec::len).collect::<Vec<_>>(),
                "c1_c2": structure.is_ok(),
                "c3": items,
            });
            Ok(Outcome::checked(structure.is_ok() && c3, lines.join("\n"), json).with_artifact(h.to_json()))
        }
        BlocksCmd::VerifyC3 { hierarchy, level } => {
            let h = load_hierarchy(hierarchy)?;
            let levels = match level {
                Some(n) => *n..=*n,
                None => 0..=h.depth(),
            };
            let (pass, lines, items) = c3_summary(&h, levels)?;
            Ok(Outcome::checked(pass, lines.join("\n"), Value::Array(items)))
        }
        BlocksCmd::X0 { hierarchy, level } => {
            let h = load_hierarchy(hierarchy)?;
            let p = x0_patch(&h, *level)?;
            let text = render_pattern(p, format)?;
            Ok(Outcome::ok(text, serde_json::to_value(p.to_file())?))
        }
    }
}

fn analyze(cmd: &AnalyzeCmd) -> anyhow::Result<Outcome> {
    match cmd {
        AnalyzeCmd::Returns { hierarchy, n, m } => {
            let h = load_hierarchy(hierarchy)?;
            let algebraic = return_times(&h, *n, *m)?;
            let scanned = scan_occurrences(&h, *n, *m)?;
            let agree = algebraic == scanned;
            let text = format!(
                "{} return times of level {n} in F_{m}{}\n{}",
                algebraic.len(),
                if agree { "" } else { " (scan disagrees)" },
                algebraic.to_strings().join(" ")
            );
            let json = json!({
                "n": n,
                "m": m,
                "return_times": algebraic.to_strings(),
                "scan_agrees": agree,
            });
            Ok(Outcome::checked(agree, text, json))
        }
        AnalyzeCmd::Kr { hierarchy, levels } => {
            let h = load_hierarchy(hierarchy)?;
            let r = levels.clone().unwrap_or(0..=h.depth());
            if *r.end() > h.depth() {
                bail!("level {} exceeds hierarchy depth {}", r.end(), h.depth());
            }
            let mut reports = Vec::new();
            for n in r.clone() {
                for m in n + 2..=*r.end() {
                    reports.push(check_partitions(&h, n, m)?);
                }
            }
            let mut lines = Vec::new();
            for k in &reports {
                lines.push(format!(
                    "n={} m={}: KR1 {} KR2 {} ({} positions)",
                    k.n,
                    k.m,
                    if k.kr1 { "ok" } else { "FAIL" },
                    if k.kr2 { "ok" } else { "FAIL" },
                    k.testable_positions
                ));
                for w in &k.witnesses {
                    lines.push(format!("  {} at {}: {}", w.property, w.position, w.detail));
                }
            }
            let mut synd = Vec::new();
            for n in (*r.start()).max(1)..*r.end() {
                let s = syndeticity_window(&h, CylinderId { level: n - 1, block: 1 }, *r.end())?;
                lines.push(format!(
                    "C_({},1) in F_{}: {} returns, {}",
                    n - 1,
                    r.end(),
                    s.visible_returns,
                    if s.covered { "syndetic" } else { "gap too large" }
                ));
                synd.push(s);
            }
            let pass = reports.iter().all(|k| k.pass()) && synd.iter().all(|s| s.covered);
            let json = json!({ "partitions": reports, "syndeticity": synd });
            Ok(Outcome::checked(pass, lines.join("\n"), json))
        }
        AnalyzeCmd::Boundary { ladder, g, levels } => {
            let l = load_ladder(ladder)?;
            let g = l.ctx().parse_element(g)?;
            let r = levels.clone().unwrap_or(0..=l.depth());
            let mut lines = Vec::new();
            let mut items = Vec::new();
            for n in r {
                let b = boundary_mass_bound(&l, &g, n)?;
                lines.push(format!("level {n}: {b}"));
                items.push(json!({ "level": n, "bound": b.to_string() }));
            }
            Ok(Outcome::ok(lines.join("\n"), Value::Array(items)))
        }
    }
}

fn measures(cmd: &MeasuresCmd) -> anyhow::Result<Outcome> {
    match cmd {
        MeasuresCmd::Check { matrices, base_size } => {
            // loading validates column sums and adjacent shapes
            match load_matrices(matrices, base_size) {
                Ok(seq) => {
                    let shapes: Vec<String> = seq
                        .matrices()
                        .iter()
                        .map(|m| format!("{}x{}/{}", m.rows(), m.cols(), m.ratio()))
                        .collect();
                    Ok(Outcome::ok(
                        format!("managed: {}", shapes.join(" ")),
                        json!({ "pass": true, "shapes": shapes }),
                    ))
                }
                Err(e) => Ok(Outcome::checked(
                    false,
                    format!("not managed: {e:#}"),
                    json!({ "pass": false, "error": format!("{e:#}") }),
                )),
            }
        }
        MeasuresCmd::Limit {
            matrices,
            base_size,
            level,
            depth,
        } => {
            let seq = load_matrices(matrices, base_size)?;
            let lim = approximate_limit(&seq, *level, *depth)?;
            let verts: Vec<Vec<String>> = lim
                .approximant
                .vertices
                .iter()
                .map(|v| v.iter().map(|x| x.to_string()).collect())
                .collect();
            let mut lines: Vec<String> = verts.iter().map(|v| format!("({})", v.join(", "))).collect();
            lines.push(format!(
                "nested: {} strict: {} hausdorff: {}",
                lim.nesting.verified, lim.nesting.strict, lim.nesting.hausdorff
            ));
            let json = json!({
                "level": level,
                "depth": depth,
                "vertices": verts,
                "weights": lim.nesting.weights.iter().map(|w| w.iter().map(|x| x.to_string()).collect::<Vec<_>>()).collect::<Vec<_>>(),
                "nested": lim.nesting.verified,
                "strict": lim.nesting.strict,
                "hausdorff": lim.nesting.hausdorff.to_string(),
                "cluster_diameters": lim.cluster_diameters.iter().map(|x| x.to_string()).collect::<Vec<_>>(),
            });
            Ok(Outcome::checked(lim.nesting.verified, lines.join("\n"), json))
        }
        MeasuresCmd::Lemma8 {
            matrices,
            base_size,
            k_bound,
        } => {
            let seq = load_matrices(matrices, base_size)?;
            let sel = select_subsequence_lemma8(&seq, &parse_rational(k_bound)?)?;
            let ok = sel.certificate_holds();
            let steps: Vec<Value> = sel
                .certificate
                .iter()
                .map(|c| json!({ "from": c.from, "to": c.to, "min_entry": c.min_entry, "columns": c.column_count }))
                .collect();
            let text = format!(
                "indices {:?}, dropped {}, certificate {}",
                sel.indices,
                sel.dropped_tail,
                if ok { "holds" } else { "fails" }
            );
            let json = json!({ "indices": sel.indices, "dropped_tail": sel.dropped_tail, "steps": steps, "pass": ok });
            let grouped = sel.grouped_sequence(&seq)?;
            Ok(Outcome::checked(ok, text, json).with_artifact(grouped.to_json()))
        }
        MeasuresCmd::Realize {
            d,
            tolerance,
            ladder,
            extend,
        } => {
            let l = match ladder {
                Some(p) => load_ladder(p)?,
                None => monotile_core::folner::build_lattice_ladder(1, 1)?,
            };
            let schedule = if *extend || ladder.is_none() {
                RatioSchedule::stationary(&l)
            } else {
                RatioSchedule::from_ladder(&l)
            };
            let r = realize_finite_simplex(*d, &schedule, &parse_rational(tolerance)?)?;
            let diam: Vec<String> = r.cluster_diameters.iter().map(|x| x.to_string()).collect();
            let text = format!(
                "depth {}: cluster diameters {} hull diameter {}",
                r.depth,
                diam.join(" "),
                r.hull_diameter
            );
            let json = json!({
                "depth": r.depth,
                "cluster_diameters": diam,
                "hull_diameter": r.hull_diameter.to_string(),
            });
            Ok(Outcome::ok(text, json).with_artifact(r.sequence.to_json()))
        }
    }
}

fn pipeline_cmd(config: Option<&Path>, out: Option<&Path>) -> anyhow::Result<Outcome> {
    let cfg = match config {
        Some(p) => serde_json::from_str::<PipelineConfig>(&read(p)?).context("parsing pipeline config")?,
        None => PipelineConfig::default(),
    };
    let report = run_pipeline(&cfg, out)?;
    let mut lines = Vec::new();
    for s in &report.stages {
        lines.push(format!("{:<10} {}", s.stage, if s.pass { "PASS" } else { "FAIL" }));
        for c in &s.checks {
            lines.push(format!("  {:<26} {} {}", c.name, if c.pass { "ok  " } else { "FAIL" }, c.detail));
        }
        if let Some(e) = &s.error {
            lines.push(format!("  error: {e}"));
        }
    }
    Ok(Outcome::checked(report.pass, lines.join("\n"), serde_json::to_value(&report)?))
}

/// Executes a parsed command. `--out` receives the artifact (or the printed
/// output when there is none); `pipeline` treats it as a directory.
pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let outcome = match &cli.command {
        Command::Folner(c) => folner(c)?,
        Command::Blocks(c) => blocks(c, cli.format)?,
        Command::Analyze(c) => analyze(c)?,
        Command::Measures(c) => measures(c)?,
        Command::Pipeline { config } => return pipeline_cmd(config.as_deref(), cli.out.as_deref()),
    };
    if let Some(path) = &cli.out {
        let body = outcome.artifact.clone().unwrap_or_else(|| outcome.render(cli.format));
        fs::write(path, body).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(outcome)
}

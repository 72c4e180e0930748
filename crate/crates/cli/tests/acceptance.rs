//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use monotile_cli::pipeline::{run_pipeline, PipelineConfig};
use monotile_core::analysis::{
    boundary_mass_bound, check_partitions, check_partitions_on, return_times, scan_occurrences,
};
use monotile_core::blocks::{assignment_from_matrix, augment_matrix, satisfies_importante, verify_c3, x0_patch};
use monotile_core::folner::{
    build_heisenberg_ladder, build_interval_ladder, build_lattice_ladder, build_pruefer_ladder, check_congruent,
    folner_defect, EpsSchedule, FolnerLadder,
};
use monotile_core::measures::{
    approximate_limit, incidence_from_hierarchy, push, realize_finite_simplex, select_subsequence_lemma8,
    RatioSchedule, SimplexPoint,
};
use monotile_core::rational::{one, parse_rational, ratio};
use monotile_core::{BigInt, BigRational, BlockHierarchy, Element, ManagedMatrix, ManagedSequence};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, format!("took {t:.2?}, limit {limit:?}"))
}

fn e<E: std::fmt::Display>(x: E) -> String {
    x.to_string()
}

fn heisenberg() -> Result<FolnerLadder, String> {
    let r = build_heisenberg_ladder(3, &EpsSchedule::parse("geometric:2/3").map_err(e)?, 10).map_err(e)?;
    ensure(r.l_indices == [0, 2, 3, 4], format!("center indices {:?}", r.l_indices))?;
    Ok(r.ladder)
}

fn ladders() -> Result<Vec<(&'static str, FolnerLadder)>, String> {
    Ok(vec![
        ("lattice(1) N=6", build_lattice_ladder(1, 6).map_err(e)?),
        ("lattice(2) N=4", build_lattice_ladder(2, 4).map_err(e)?),
        ("pruefer(2) N=8", build_pruefer_ladder(2, 8).map_err(e)?),
        ("heisenberg3 depth 3", heisenberg()?),
    ])
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let ls = ladders()?;
    for (name, l) in &ls {
        let r = check_congruent(l);
        ensure(r.pass, format!("{name}: {:?}", r.violation.map(|v| v.to_string())))?;
    }
    let sizes: Vec<usize> = ls[3].1.levels().iter().map(|f| f.len()).collect();
    ensure(sizes == [1, 81, 2187, 59049], format!("heisenberg sizes {sizes:?}"))?;
    within(start, Duration::from_secs(60))?;
    Ok(format!("4 ladders congruent in {:.2?}", start.elapsed()))
}

fn criterion2() -> Outcome {
    let mut checked = 0;
    for (name, l) in ladders()? {
        let ctx = l.ctx().clone();
        for g in ctx.standard_generators() {
            let d: Vec<BigRational> = l
                .levels()
                .iter()
                .map(|f| folner_defect(&ctx, f, &g))
                .collect::<Result<_, _>>()
                .map_err(e)?;
            ensure(d.windows(2).all(|w| w[1] <= w[0]), format!("{name}, g={g}: {d:?} increases"))?;
            checked += 1;
        }
    }
    let l = build_lattice_ladder(1, 6).map_err(e)?;
    let top = folner_defect(l.ctx(), l.level(6).map_err(e)?, &Element::int(1)).map_err(e)?;
    ensure(top == ratio(1, 729), format!("lattice(1) top defect {top}"))?;
    ensure(top <= ratio(1, 9), "top defect above 1/9")?;
    let h = heisenberg()?;
    let z = folner_defect(h.ctx(), h.level(3).map_err(e)?, &Element::ints(&[0, 0, 1])).map_err(e)?;
    ensure(z == ratio(1, 81), format!("heisenberg z defect {z}"))?;
    Ok(format!("{checked} (ladder, generator) pairs nonincreasing, lattice(1) top = {top}"))
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let l = build_lattice_ladder(1, 3).map_err(e)?;
    let h = BlockHierarchy::build_uniform(&l, 3, 3).map_err(e)?;
    h.check_structure().map_err(e)?;
    let mut comparisons = 0;
    for n in 0..=3 {
        let r = verify_c3(h.ctx(), h.family(n).map_err(e)?, l.level(n).map_err(e)?);
        ensure(r.pass, format!("level {n}: {:?}", r.witness))?;
        comparisons += r.comparisons;
    }
    within(start, Duration::from_secs(10))?;
    Ok(format!("levels 0..3, {comparisons} comparisons"))
}

fn shipped_hierarchies() -> Result<Vec<(&'static str, BlockHierarchy)>, String> {
    let uniform = |l: FolnerLadder, depth| BlockHierarchy::build_uniform(&l, 3, depth).map_err(e);
    let mut out = vec![
        ("ternary", uniform(build_lattice_ladder(1, 3).map_err(e)?, 3)?),
        ("plane", uniform(build_lattice_ladder(2, 3).map_err(e)?, 3)?),
        ("pruefer3", uniform(build_pruefer_ladder(3, 3).map_err(e)?, 3)?),
    ];
    let dir = tempfile::tempdir().map_err(e)?;
    run_pipeline(&PipelineConfig::default(), Some(dir.path())).map_err(e)?;
    let text = std::fs::read_to_string(dir.path().join("hierarchy.json")).map_err(e)?;
    out.push(("default pipeline", BlockHierarchy::from_json(&text).map_err(e)?));
    Ok(out)
}

fn criterion4() -> Outcome {
    let mut pairs = 0;
    for (name, h) in shipped_hierarchies()? {
        for m in 1..=h.depth().min(3) {
            for n in 0..m {
                let alg = return_times(&h, n, m).map_err(e)?;
                let scan = scan_occurrences(&h, n, m).map_err(e)?;
                ensure(alg == scan, format!("{name} n={n} m={m}: scan differs"))?;
                let f = h.ladder();
                ensure(
                    alg.len() * f.level(n).map_err(e)?.len() == f.level(m).map_err(e)?.len(),
                    format!("{name} n={n} m={m}: wrong count"),
                )?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} (hierarchy, n, m) triples agree"))
}

fn criterion5() -> Outcome {
    let l = build_lattice_ladder(1, 3).map_err(e)?;
    let h = BlockHierarchy::build_uniform(&l, 3, 3).map_err(e)?;
    let mut windows = 0;
    for n in 0..=1 {
        for m in (n + 2).max(2)..=3 {
            let r = check_partitions(&h, n, m).map_err(e)?;
            ensure(r.pass(), format!("n={n} m={m}: {:?}", r.witnesses))?;
            windows += 1;
        }
    }
    let patch = x0_patch(&h, 3).map_err(e)?;
    let id = Element::int(0);
    let old = patch.get(&id).ok_or("identity missing from patch")?;
    let flipped = patch.with_symbol(&id, if old == 1 { 2 } else { 1 }).map_err(e)?;
    let r = check_partitions_on(&h, &flipped, 0, 3).map_err(e)?;
    ensure(!r.pass(), "flipped symbol not detected")?;
    Ok(format!("{windows} windows pass; flipped symbol at 0 caught ({} witnesses)", r.witnesses.len()))
}

fn criterion6() -> Outcome {
    let l = build_lattice_ladder(1, 3).map_err(e)?;
    for n in 0..=3 {
        let b = boundary_mass_bound(&l, &Element::int(1), n).map_err(e)?;
        // the shell of a centered interval under a unit shift is one point
        ensure(b == ratio(1, 3usize.pow(n as u32)), format!("level {n}: {b}"))?;
    }
    let b3 = boundary_mass_bound(&l, &Element::int(1), 3).map_err(e)?;
    ensure(b3 <= ratio(1, 27), "level 3 bound above 1/27")?;
    let p = build_pruefer_ladder(2, 8).map_err(e)?;
    let mut evaluated = 0;
    for n in 0..=8 {
        for g in p.level(n).map_err(e)? {
            let b = boundary_mass_bound(&p, g, n).map_err(e)?;
            ensure(b == ratio(0, 1), format!("pruefer level {n}, g={g}: {b}"))?;
            evaluated += 1;
        }
    }
    Ok(format!("lattice(1) bound 1/3^n (1/27 at n=3), pruefer(2) zero on {evaluated} (n, g) pairs"))
}

fn random_point(rng: &mut StdRng, k: usize, scale: u64) -> SimplexPoint {
    let w: Vec<u64> = (0..k).map(|_| rng.random_range(1..1000)).collect();
    let total: u64 = w.iter().sum();
    let coords = w
        .iter()
        .map(|&x| BigRational::new(x.into(), BigInt::from(total) * BigInt::from(scale)))
        .collect();
    SimplexPoint::new(coords, BigInt::from(scale)).expect("point on the simplex")
}

fn criterion7() -> Outcome {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(7);
    let m2 = ManagedMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).map_err(e)?;
    let m3 = ManagedMatrix::from_rows(&[vec![3, 1, 1], vec![1, 3, 1], vec![1, 1, 3]]).map_err(e)?;
    for i in 0..1000 {
        let (m, k, scale) = if i % 2 == 0 { (&m2, 2, 9u64) } else { (&m3, 3, 25) };
        let z = random_point(&mut rng, k, scale);
        let out = push(m, &z).map_err(e)?;
        let expected = BigInt::from(scale / m.ratio());
        ensure(out.scale() == &expected, format!("point {i}: scale {}", out.scale()))?;
        let sum: BigRational = out.coords().iter().sum();
        ensure(sum == BigRational::new(1.into(), expected), format!("point {i}: sum {sum}"))?;
    }
    let seq = ManagedSequence::new(BigInt::from(1), vec![m2.clone(); 6]).map_err(e)?;
    let mut last: Option<BigRational> = None;
    for d in 1..=6 {
        let lim = approximate_limit(&seq, 0, d).map_err(e)?;
        ensure(lim.nesting.verified && lim.nesting.strict, format!("depth {d}: nesting fails"))?;
        let diam = lim.cluster_diameters.iter().max().cloned().ok_or("no clusters")?;
        if let Some(prev) = &last {
            ensure(diam < *prev, format!("depth {d}: diameter {diam} not below {prev}"))?;
        }
        last = Some(diam);
    }
    let sel = select_subsequence_lemma8(&seq, &one()).map_err(e)?;
    ensure(sel.indices == [0, 2, 4, 6], format!("indices {:?}", sel.indices))?;
    ensure(sel.certificate_holds() && sel.dropped_tail == 0, "certificate fails")?;
    within(start, Duration::from_secs(10))?;
    Ok(format!(
        "1000 pushes exact, nesting to depth 6 (last diameter {}), grouping {:?}",
        last.unwrap_or_else(|| ratio(0, 1)),
        sel.indices
    ))
}

fn criterion8() -> Outcome {
    let start = Instant::now();
    let tol = parse_rational("1/1000").map_err(e)?;
    let base = build_interval_ladder(&[5; 8]).map_err(e)?;
    let r = realize_finite_simplex(3, &RatioSchedule::stationary(&base), &tol).map_err(e)?;
    ensure(r.cluster_diameters.iter().all(|x| *x <= tol), "(d) cluster diameter above tolerance")?;
    let sel = select_subsequence_lemma8(&r.sequence, &one()).map_err(e)?;
    ensure(sel.certificate_holds(), "(a) Lemma 8 certificate fails")?;
    let usable: Vec<usize> = sel.indices.iter().copied().filter(|&i| i <= base.depth()).collect();
    let grouped = base.subsequence(&usable).map_err(e)?;
    let mut mts = Vec::new();
    for (n, m) in sel.grouped.iter().enumerate().take(grouped.depth()) {
        let mt = augment_matrix(m, m.cols()).map_err(|x| format!("(b) augment {n}: {x}"))?;
        ensure(satisfies_importante(&mt), format!("(b) level {n} violates the row bound"))?;
        let glue = grouped.glue(n).map_err(e)?;
        assignment_from_matrix(grouped.ctx(), &mt, glue, mt.rows(), n).map_err(|x| format!("(b) assign {n}: {x}"))?;
        mts.push(mt);
    }
    // three levels keep |F| at 5^6 cells
    let shallow = grouped.subsequence(&[0, 1, 2, 3]).map_err(e)?;
    let h = BlockHierarchy::build(&shallow, mts[0].rows(), &mts[..3]).map_err(e)?;
    for (n, mt) in mts.iter().take(3).enumerate() {
        let back = incidence_from_hierarchy(&h, n).map_err(e)?;
        ensure(&back == mt, format!("(c) level {n} does not round-trip"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!(
        "depth {}, grouping {:?} ({} dropped), max cluster diameter {}, round trip on 3 levels",
        r.depth,
        sel.indices,
        sel.dropped_tail,
        r.cluster_diameters.iter().max().cloned().unwrap_or_else(|| ratio(0, 1))
    ))
}

fn run_binary(config: &Path, out: &Path) -> Result<(), String> {
    let status = Command::new(env!("CARGO_BIN_EXE_monotile"))
        .arg("pipeline")
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .map_err(e)?;
    ensure(status.status.success(), String::from_utf8_lossy(&status.stderr).into_owned())
}

fn criterion9() -> Outcome {
    let config = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let a = tempfile::tempdir().map_err(e)?;
    let b = tempfile::tempdir().map_err(e)?;
    run_binary(&config, a.path())?;
    run_binary(&config, b.path())?;
    let mut names: Vec<String> = std::fs::read_dir(a.path())
        .map_err(e)?
        .map(|d| d.map(|d| d.file_name().to_string_lossy().into_owned()))
        .collect::<Result<_, _>>()
        .map_err(e)?;
    names.sort();
    for name in &names {
        let x = std::fs::read(a.path().join(name)).map_err(e)?;
        let y = std::fs::read(b.path().join(name)).map_err(|err| format!("{name}: {err}"))?;
        ensure(x == y, format!("{name} differs"))?;
    }
    ensure(names.iter().any(|n| n == "report.json"), "no report.json")?;
    Ok(format!("{} artifacts byte-identical", names.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("congruence suite", criterion1),
        ("Følner defect decay", criterion2),
        ("C3 brute force", criterion3),
        ("return-time oracle", criterion4),
        ("Kakutani-Rokhlin partitions", criterion5),
        ("boundary mass", criterion6),
        ("managed matrices and limits", criterion7),
        ("realization round trip", criterion8),
        ("pipeline determinism", criterion9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|x| label.contains(x.as_str()) || name.contains(x.as_str())) {
            continue;
        }
        let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        match result {
            Ok(detail) => println!("PASS {label} ({name}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {label} ({name}): {why}");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Acceptance run: one line per criterion, nonzero exit if any fails.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use dgh_core::corpus::{cube, small_digraphs, standard_interval, BoundaryExample};
use dgh_core::cover::{
    check_cover_equivalence, check_union_pushout, is_in_closed, nerve_theorem_pipeline, NerveVerdict, SubdigraphFamily,
};
use dgh_core::covering::{check_unique_lifting, cycle_covering, is_l_covering, LiftingInstance};
use dgh_core::homology::{cubical_homology, induced_homology_map, pi1_presentation, simplicial_homology, HomologyGroup};
use dgh_core::homotopy::{an_tower, homotopy_classes, PairConstraint};
use dgh_core::interval::{enumerate_shrinkings, TowerKind};
use dgh_core::nerve::{
    check_kan_filling, check_rho_properties, kan_filler_phi, nerve_functor_map, nerve_levels, TruncatedCubicalSet,
};
use dgh_core::{Budgets, Digraph, DigraphMap, Interval, Orientation, Sign};

type Outcome = Result<String, String>;

fn ok<T, E: Display>(r: Result<T, E>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn z() -> HomologyGroup {
    HomologyGroup { rank: 1, torsion: Vec::new() }
}

fn n1(g: Digraph) -> Result<TruncatedCubicalSet, String> {
    ok(nerve_levels(Arc::new(g), &Interval::standard(1, Sign::Plus), 2, Budgets::default().max_cubes))
}

fn reliable(x: &TruncatedCubicalSet) -> Result<Vec<HomologyGroup>, String> {
    Ok(ok(cubical_homology(x, Budgets::default().max_matrix_dim))?.reliable().to_vec())
}

fn o_family() -> Result<SubdigraphFamily, String> {
    let o = Arc::new(BoundaryExample::new().o_digraph());
    ok(SubdigraphFamily::from_labels(o.clone(), &BoundaryExample::strip_cover(&o)))
}

fn cycles_homology() -> Outcome {
    for n in 3..=6 {
        let x = n1(Digraph::cycle(n))?;
        let h = reliable(&x)?;
        ensure(h == [z(), z()], || format!("C{n}: {h:?}"))?;
        let ab = ok(ok(pi1_presentation(&x, 0))?.abelianization())?;
        ensure(ab == z(), || format!("C{n}: abelianized π1 = {ab}"))?;
    }
    Ok("C3..C6: H0 = H1 = ℤ, abelianized π1 = ℤ".into())
}

fn o_nerve_theorem() -> Outcome {
    let f = o_family()?;
    let h = reliable(&n1(BoundaryExample::new().o_digraph())?)?;
    ensure(h == [z(), z()], || format!("H(N1 O) = {h:?}"))?;
    let r = ok(nerve_theorem_pipeline(&f, 2, &Budgets::default()))?;
    let mut degree: BTreeMap<&str, usize> = r.nerve_vertices.iter().map(|v| (v.as_str(), 0)).collect();
    for (a, b) in &r.nerve_edges {
        *degree.get_mut(a.as_str()).ok_or("edge outside the nerve")? += 1;
        *degree.get_mut(b.as_str()).ok_or("edge outside the nerve")? += 1;
    }
    let no_triangles = r.nerve_faces_by_dim.get(2).is_none_or(|&c| c == 0);
    let square = degree.len() == 4 && r.nerve_edges.len() == 4 && degree.values().all(|&d| d == 2) && no_triangles;
    ensure(square, || format!("nerve {:?} / {:?}", r.nerve_vertices, r.nerve_edges))?;
    // four vertices of degree two with four edges: a 4-cycle once connected
    ensure(r.nerve_homology.first() == Some(&z()), || format!("nerve H0 = {:?}", r.nerve_homology))?;
    ensure(r.verdict == NerveVerdict::Consistent, || format!("verdict {:?}", r.verdict))?;
    Ok("H(N1 O) = (ℤ, ℤ), cover nerve is a 4-cycle, verdict consistent".into())
}

fn boundary_inclusion() -> Outcome {
    let ex = BoundaryExample::new();
    let o = Arc::new(ex.o_digraph());
    let b = Arc::new(ex.boundary_digraph());
    let assignment = (0..b.len()).map(|v| o.vertex(b.label(v))).collect::<Result<Vec<_>, _>>();
    let phi = ok(DigraphMap::new(b.clone(), o.clone(), ok(assignment)?))?;
    let (xb, xo) = (n1((*b).clone())?, n1((*o).clone())?);
    let f = ok(nerve_functor_map(&phi, &xb, &xo))?;
    for d in 0..2 {
        let h = ok(induced_homology_map(&f, &xb, &xo, d))?;
        ensure(h.is_iso, || format!("H{d}: {:?} → {:?} is not an isomorphism", h.source, h.target))?;
    }
    let fb = ok(SubdigraphFamily::from_labels(b.clone(), &BoundaryExample::strip_cover(&b)))?;
    let r = ok(check_cover_equivalence(&phi, &fb, &o_family()?, 2, &Budgets::default()))?;
    ensure(r.passed, || format!("cover-equiv witness {:?}", r.witness))?;
    Ok("∂ ↪ O is an isomorphism on H0 and H1; cover-equiv passes".into())
}

fn intervals_up_to(len: usize) -> Vec<Interval> {
    let mut out = vec![Interval::point()];
    for l in 1..=len {
        for bits in 0..1u32 << l {
            let word = (0..l).map(|k| if bits >> k & 1 == 0 { Orientation::Fwd } else { Orientation::Bwd }).collect();
            out.push(Interval::new(word));
        }
    }
    out
}

fn shrinkings_single_class() -> Outcome {
    let max_maps = Budgets::default().max_maps;
    let mut pairs = 0;
    let mut total = 0;
    for j in intervals_up_to(5) {
        for jp in intervals_up_to(4) {
            let found = enumerate_shrinkings(&j, &jp);
            if found.is_empty() {
                continue;
            }
            let (sb, tb) = (j.boundary(), jp.boundary());
            let c = PairConstraint { source_part: &sb, target_part: &tb, relative: true };
            let classes = ok(homotopy_classes(&j.to_digraph(), &jp.to_digraph(), Some(c), max_maps))?;
            let ids: BTreeSet<Option<usize>> = found.iter().map(|s| classes.class_of_map(&s.assignment)).collect();
            ensure(ids.len() == 1 && !ids.contains(&None), || format!("{j} → {jp}: classes {ids:?}"))?;
            pairs += 1;
            total += found.len();
        }
    }
    ensure(pairs > 0, || "no pair admits a shrinking".into())?;
    Ok(format!("{total} shrinkings over {pairs} pairs, one relative class each"))
}

fn kan_phi() -> Outcome {
    let mut corpus = small_digraphs(2);
    corpus.extend((3..=6).map(Digraph::cycle));
    corpus.extend([standard_interval(2), cube(1, 2)]);
    let mut horn_maps = 0;
    for n in 1..=2 {
        for i in 1..=n {
            for eps in 0..2u8 {
                let phi = ok(kan_filler_phi(1, n, i, eps))?;
                ensure(phi.is_digraph_map && phi.image_in_horn && phi.restricts_to_clamp, || {
                    format!("Φ at n = {n}, i = {i}, ε = {eps}")
                })?;
            }
        }
        for g in &corpus {
            let r = ok(check_kan_filling(g, n, 1, Budgets::default().max_maps))?;
            ensure(r.holds(), || format!("n = {n}: {:?}", r.failures.first()))?;
            horn_maps += r.horn_maps;
        }
    }
    Ok(format!("Φ is a filler for n ≤ 2, m = 1; {horn_maps} horn maps filled"))
}

fn rho_identities() -> Outcome {
    let mut checks = 0;
    for n in 1..=3 {
        for m in [2, 4] {
            let r = ok(check_rho_properties(n, m))?;
            ensure(r.passed, || format!("n = {n}, m = {m}: {:?}", r.checks.iter().find(|c| c.status == "fail")))?;
            checks += r.checks.len();
        }
    }
    Ok(format!("{checks} identity checks for n ≤ 3, m ∈ {{2, 4}}"))
}

fn in_closed_splittings(g: &Digraph) -> Vec<(Vec<usize>, Vec<usize>)> {
    let full = (1u64 << g.len()) - 1;
    let set = |m: u64| (0..g.len()).filter(|&v| m >> v & 1 == 1).collect::<Vec<_>>();
    let parts: Vec<u64> = (1..full).filter(|&m| is_in_closed(g, &set(m))).collect();
    let mut out = Vec::new();
    for &a in &parts {
        for &b in parts.iter().filter(|&&b| b > a && a | b == full) {
            out.push((set(a), set(b)));
        }
    }
    out
}

fn union_pushout() -> Outcome {
    let budgets = Budgets::default();
    let o = BoundaryExample::new().o_digraph();
    let (a, b) = BoundaryExample::column_halves(&o);
    ensure(a.len() < o.len() && b.len() < o.len(), || "O halves are not proper".into())?;
    let r = ok(check_union_pushout(&o, &a, &b, 2, &budgets))?;
    ensure(r.passed, || format!("O halves: {:?}", r.witness))?;
    let mut count = 1;
    let mut corpus = small_digraphs(4);
    corpus.extend([standard_interval(4), Digraph::cycle(5), Digraph::cycle(6), cube(1, 3)]);
    for g in &corpus {
        for (a, b) in in_closed_splittings(g) {
            let r = ok(check_union_pushout(g, &a, &b, 2, &budgets))?;
            ensure(r.passed, || format!("{:?} | {:?}: {:?}", a, b, r.witness))?;
            count += 1;
        }
    }
    ensure(count >= 20, || format!("only {count} in-closed splittings"))?;
    Ok(format!("{count} in-closed splittings amalgamate, O halves included"))
}

fn winding_covering() -> Outcome {
    let p = cycle_covering(3, 2);
    let (two, three) = (ok(is_l_covering(&p, 2))?, ok(is_l_covering(&p, 3))?);
    ensure(two.holds && two.agree, || format!("l = 2: {two:?}"))?;
    ensure(!three.holds && three.agree, || format!("l = 3: {three:?}"))?;
    let mut squares = 0;
    for n in 1..=2 {
        for i in 1..=n {
            for eps in 0..2u8 {
                for m in [2, 4] {
                    let r = ok(check_unique_lifting(&p, &LiftingInstance::Horn { m, n, i, eps }, Budgets::default().max_maps))?;
                    ensure(r.passed && r.missing == 0 && r.multiple == 0, || {
                        format!("horn ({n},{i},{eps}) at m = {m}: {:?}", r.witness)
                    })?;
                    squares += r.unique;
                }
            }
        }
    }
    Ok(format!("C6 → C3: 2-covering, not 3-covering; {squares} horn squares lift uniquely"))
}

/// Winding number around `C3` of a map from the line with the given word.
fn winding(word: &[Orientation], f: &[usize]) -> i64 {
    let steps: i64 = f
        .windows(2)
        .map(|w| match (w[1] + 3 - w[0]) % 3 {
            0 => 0,
            1 => 1,
            _ => -1,
        })
        .sum();
    assert_eq!(f.len(), word.len() + 1);
    steps / 3
}

fn tower_windings() -> Outcome {
    let c3 = Digraph::cycle(3);
    let t = ok(an_tower(&c3, 0, 1, TowerKind::Right, 8, Budgets::default().max_maps))?;
    ensure(t.classes.len() == 8, || format!("{} stages", t.classes.len()))?;
    let mut windings: Vec<Vec<i64>> = Vec::new();
    for (stage, classes) in t.stages.iter().zip(&t.classes) {
        let j: Interval = ok(stage.interval.parse())?;
        let mut per_class: Vec<BTreeSet<i64>> = vec![BTreeSet::new(); classes.class_count];
        for (map, &c) in classes.maps.iter().zip(&classes.class_of) {
            per_class[c].insert(winding(j.word(), map));
        }
        ensure(per_class.iter().all(|w| w.len() == 1), || format!("stage {}: a class mixes windings", stage.stage))?;
        let w: Vec<i64> = per_class.iter().map(|w| *w.first().expect("nonempty")).collect();
        let distinct: BTreeSet<i64> = w.iter().copied().collect();
        ensure(distinct.len() == w.len(), || format!("stage {}: two classes share a winding", stage.stage))?;
        windings.push(w);
    }
    for tr in &t.transitions {
        let (lower, upper) = (&windings[tr.from_stage - 1], &windings[tr.to_stage - 1]);
        let kept = tr.class_map.iter().enumerate().all(|(c, &d)| lower[c] == upper[d]);
        ensure(tr.well_defined && kept, || format!("transition {} → {} moves windings", tr.from_stage, tr.to_stage))?;
    }
    let first = windings
        .iter()
        .position(|w| w.contains(&1) && w.contains(&-1))
        .ok_or("windings ±1 never both appear by stage 8")?;
    for tr in t.transitions.iter().filter(|tr| tr.from_stage > first) {
        ensure(tr.injective, || format!("transition {} → {} is not injective", tr.from_stage, tr.to_stage))?;
    }
    let counts: Vec<usize> = windings.iter().map(Vec::len).collect();
    Ok(format!("class counts {counts:?} match windings; injective from stage {}", first + 1))
}

fn oracle_on_nerves() -> Outcome {
    let ex = BoundaryExample::new();
    let mut nerves: Vec<(String, TruncatedCubicalSet)> = Vec::new();
    for n in 3..=6 {
        nerves.push((format!("C{n}"), n1(Digraph::cycle(n))?));
    }
    nerves.push(("O".into(), n1(ex.o_digraph())?));
    nerves.push(("∂".into(), n1(ex.boundary_digraph())?));
    for (name, x) in &nerves {
        let dim = Budgets::default().max_matrix_dim;
        let (c, s) = (ok(cubical_homology(x, dim))?, ok(simplicial_homology(x, dim))?);
        ensure(c.reliable() == s.reliable(), || format!("{name}: {c:?} vs {s:?}"))?;
        let bad = x.identity_violations(1);
        ensure(bad.is_empty(), || format!("{name}: {:?}", bad.first()))?;
    }
    Ok(format!("{} nerves: cubical = simplicial, identities hold", nerves.len()))
}

fn verify_all() -> Outcome {
    let out = ok(Command::new(env!("CARGO_BIN_EXE_dgh")).args(["verify", "paper", "--suite", "all"]).output())?;
    let report: serde_json::Value = ok(serde_json::from_slice(&out.stdout))?;
    ensure(out.status.code() == Some(0), || {
        let failing: Vec<&str> = report["report"]
            .as_array()
            .into_iter()
            .flatten()
            .filter(|s| s["passed"] != true)
            .filter_map(|s| s["suite"].as_str())
            .collect();
        format!("exit {:?}, failing suites {failing:?}", out.status.code())
    })?;
    let suites = report["report"].as_array().map_or(0, Vec::len);
    Ok(format!("{suites} suites pass"))
}

fn main() -> ExitCode {
    let criteria: [(usize, u64, fn() -> Outcome); 11] = [
        (1, 10, cycles_homology),
        (2, 60, o_nerve_theorem),
        (3, 60, boundary_inclusion),
        (4, 30, shrinkings_single_class),
        (5, 10, kan_phi),
        (6, 30, rho_identities),
        (7, 60, union_pushout),
        (8, 120, winding_covering),
        (9, 120, tower_windings),
        (10, 120, oracle_on_nerves),
        (11, 300, verify_all),
    ];
    let mut failed = 0;
    for (id, limit, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let took = start.elapsed();
        let line = match outcome {
            Ok(detail) if took <= Duration::from_secs(limit) => format!("PASS {detail}"),
            Ok(detail) => format!("FAIL over the {limit} s limit: {detail}"),
            Err(why) => format!("FAIL {why}"),
        };
        if line.starts_with("FAIL") {
            failed += 1;
        }
        println!("criterion {id:>2}: {line} ({:.2} s)", took.as_secs_f64());
    }
    println!("{} of 11 criteria pass", 11 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

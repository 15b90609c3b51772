//! Randomized properties checked against brute-force oracles.

use std::collections::BTreeMap;
use std::sync::Arc;

use proptest::prelude::*;

use dgh_core::cover::{in_closure, is_in_closed, is_out_closed, nerve_theorem_pipeline, out_closure, NerveVerdict, SubdigraphFamily};
use dgh_core::covering::is_l_covering;
use dgh_core::digraph::{box_hom, box_product, distance_matrix, is_digraph_map, MapSearch};
use dgh_core::grid::TensorGrid;
use dgh_core::homology::{cubical_homology, simplicial_homology};
use dgh_core::nerve::nerve_levels;
use dgh_core::{Budgets, Digraph, DigraphMap, Distance, Interval, Sign};

fn digraph(max_n: usize) -> impl Strategy<Value = Digraph> {
    (1..=max_n).prop_flat_map(|n| {
        prop::collection::vec(any::<bool>(), n * n).prop_map(move |bits| {
            let arrows = (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).filter(|&(u, v)| u != v && bits[u * n + v]);
            Digraph::unlabelled(n, arrows).expect("valid arrows")
        })
    })
}

fn subset(g: &Digraph, mask: u64) -> Vec<usize> {
    (0..g.len()).filter(|&v| mask >> v & 1 == 1).collect()
}

/// All-pairs shortest paths by Floyd–Warshall, `None` for unreachable.
fn floyd(g: &Digraph) -> Vec<Vec<Option<usize>>> {
    let n = g.len();
    let mut d = vec![vec![None; n]; n];
    for u in 0..n {
        d[u][u] = Some(0);
        for v in 0..n {
            if u != v && g.is_arrow(u, v) {
                d[u][v] = Some(1);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if let (Some(a), Some(b)) = (d[i][k], d[k][j]) {
                    if d[i][j].is_none_or(|c| a + b < c) {
                        d[i][j] = Some(a + b);
                    }
                }
            }
        }
    }
    d
}

fn brute_maps(source: &Digraph, target: &Digraph) -> Vec<Vec<usize>> {
    let (n, m) = (source.len(), target.len());
    let mut out = Vec::new();
    let mut f = vec![0; n];
    'next: loop {
        if source.arrows().all(|(u, v)| f[u] == f[v] || target.is_arrow(f[u], f[v])) {
            out.push(f.clone());
        }
        for k in (0..n).rev() {
            f[k] += 1;
            if f[k] < m {
                continue 'next;
            }
            f[k] = 0;
        }
        return out;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn closures_match_reachability(g in digraph(6), mask in any::<u64>()) {
        let part = subset(&g, mask);
        let d = floyd(&g);
        let reaches = |from: usize, to: usize| d[from][to].is_some();
        let ins: Vec<usize> = (0..g.len()).filter(|&v| part.iter().any(|&p| reaches(v, p))).collect();
        let outs: Vec<usize> = (0..g.len()).filter(|&v| part.iter().any(|&p| reaches(p, v))).collect();
        let (i, o) = (in_closure(&g, &part), out_closure(&g, &part));
        prop_assert_eq!(&i, &ins);
        prop_assert_eq!(&o, &outs);
        prop_assert!(is_in_closed(&g, &i) && is_out_closed(&g, &o));
        prop_assert_eq!(in_closure(&g, &i), i.clone());
        prop_assert_eq!(in_closure(&g.opposite(), &part), o);
    }

    #[test]
    fn distances_form_a_quasi_metric(g in digraph(6)) {
        let d = distance_matrix(&g);
        let oracle = floyd(&g);
        let n = g.len();
        for u in 0..n {
            prop_assert_eq!(d[u][u], Distance::Finite(0));
            for v in 0..n {
                prop_assert_eq!(d[u][v].finite(), oracle[u][v]);
                prop_assert_eq!(d[u][v] == Distance::Finite(1), u != v && g.is_arrow(u, v));
                for w in 0..n {
                    if let (Some(a), Some(b)) = (d[u][v].finite(), d[v][w].finite()) {
                        prop_assert!(d[u][w].at_most(a + b));
                    }
                }
            }
        }
    }

    #[test]
    fn map_check_agrees_with_arrow_test(g in digraph(4), h in digraph(4), raw in prop::collection::vec(any::<usize>(), 4)) {
        let f: Vec<usize> = (0..g.len()).map(|v| raw[v] % h.len()).collect();
        let expected = g.arrows().all(|(u, v)| f[u] == f[v] || h.is_arrow(f[u], f[v]));
        prop_assert_eq!(is_digraph_map(&g, &h, &f), expected);
        let (ga, ha) = (Arc::new(g.clone()), Arc::new(h.clone()));
        prop_assert_eq!(DigraphMap::new(ga, ha, f).is_ok(), expected);
    }

    #[test]
    fn map_search_enumerates_every_map(g in digraph(4), h in digraph(3)) {
        let found = MapSearch::new(&g, &h).collect(1_000_000).unwrap();
        prop_assert_eq!(found, brute_maps(&g, &h));
    }

    #[test]
    fn box_product_layout(g in digraph(3), h in digraph(3)) {
        let p = box_product(&g, &h);
        prop_assert_eq!(p.len(), g.len() * h.len());
        for a in 0..p.len() {
            for b in 0..p.len() {
                let (ga, ha, gb, hb) = (a / h.len(), a % h.len(), b / h.len(), b % h.len());
                let expected = (ga == gb && h.is_arrow(ha, hb)) || (ha == hb && g.is_arrow(ga, gb));
                prop_assert_eq!(a != b && p.is_arrow(a, b), a != b && expected);
            }
        }
    }

    #[test]
    fn currying_counts(g in digraph(2), h in digraph(2), k in digraph(3)) {
        let left = brute_maps(&box_product(&g, &h), &k).len();
        let hom = box_hom(&h, &k, 100_000).unwrap();
        let right = brute_maps(&g, &hom.digraph).len();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn nerve_shadow_of_hom(g in digraph(3), reversed in any::<bool>(), n in 0usize..=2) {
        let j = if reversed { Interval::standard(1, Sign::Minus) } else { Interval::standard(1, Sign::Plus) };
        let hom = Arc::new(box_hom(&j.to_digraph(), &g, 100_000).unwrap().digraph);
        let x = nerve_levels(hom, &j, n, 1_000_000).unwrap();
        let direct = brute_maps(&TensorGrid::power(&j, n + 1).digraph(), &g).len();
        prop_assert_eq!(x.cubes[n].len(), direct);
    }

    #[test]
    fn cubical_and_simplicial_homology_agree(g in digraph(4)) {
        let x = nerve_levels(Arc::new(g), &Interval::standard(1, Sign::Plus), 2, 1_000_000).unwrap();
        let c = cubical_homology(&x, 20_000).unwrap();
        let s = simplicial_homology(&x, 20_000).unwrap();
        prop_assert_eq!(c.reliable(), s.reliable());
    }

    #[test]
    fn interval_words_round_trip(word in "[<>]{0,8}") {
        let j: Interval = if word.is_empty() { Interval::point() } else { word.parse().unwrap() };
        let back: Interval = j.to_string().parse().unwrap();
        prop_assert_eq!(back, j);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn covering_conditions_agree(g in digraph(3), h in digraph(3), pick in any::<prop::sample::Index>()) {
        let maps = MapSearch::new(&g, &h).collect(100_000).unwrap();
        prop_assume!(!maps.is_empty());
        let f = maps[pick.index(maps.len())].clone();
        let p = DigraphMap::new(Arc::new(g), Arc::new(h), f).unwrap();
        for l in 1..=3 {
            let r = is_l_covering(&p, l).unwrap();
            prop_assert!(r.agree, "l = {}: {:?}", l, r);
        }
    }

    #[test]
    fn in_closed_covers_never_contradict_the_nerve(g in digraph(5), a in any::<u64>(), b in any::<u64>()) {
        let (pa, pb) = (in_closure(&g, &subset(&g, a)), in_closure(&g, &subset(&g, b)));
        let covered = (0..g.len()).all(|v| pa.contains(&v) || pb.contains(&v));
        prop_assume!(covered && !pa.is_empty() && !pb.is_empty());
        let members: BTreeMap<String, Vec<usize>> = [("a".to_string(), pa), ("b".to_string(), pb)].into();
        let f = SubdigraphFamily::new(Arc::new(g), members).unwrap();
        let r = nerve_theorem_pipeline(&f, 2, &Budgets::default()).unwrap();
        prop_assert_ne!(r.verdict, NerveVerdict::Inconsistent);
    }
}

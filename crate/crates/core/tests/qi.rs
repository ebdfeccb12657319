use cayleylab::graph::AdjacencyGraph;
use cayleylab::qi::{
    build_tree_qi, check_net, fit_qi_constants, fit_qi_constants_with, hausdorff_distance, quasi_action_probe, quasi_converse, resolve_sample,
    satisfies, FiniteMetricSample, FitOptions, Hausdorff, MapRecord, MapSample, PartialMap, QiFit,
};
use cayleylab::{CayleyBall, Letter, Presentation, Word};
use proptest::prelude::*;

fn fitted(m: &MapSample, opts: FitOptions) -> (f64, f64) {
    match fit_qi_constants_with(m, opts).unwrap() {
        QiFit::Fitted(q) => (q.l, q.c),
        other => panic!("{other:?}"),
    }
}

fn line(n: usize) -> FiniteMetricSample {
    let mut g = AdjacencyGraph::new(n);
    for i in 1..n {
        g.add_edge(i - 1, i);
    }
    FiniteMetricSample::from_graph("line", &g).unwrap()
}

fn z2_vertex(b: &CayleyBall, a: i64, c: i64) -> usize {
    let p = b.presentation();
    let w = Word::letter(Letter::new(0, false)).power(a).concat(&Word::letter(Letter::new(1, false)).power(c));
    b.vertex(&p.normal_form(&w).unwrap()).unwrap()
}

#[test]
fn identity_fits_exactly_on_every_sample() {
    for id in ["ball/free:2/3", "ball/abelian:2/4", "ball/heis/2", "ball/bs:1,2/3", "tree/3/4", "tree/5/2", "treeqi-image/4/4"] {
        let x = resolve_sample(id).unwrap();
        match fit_qi_constants(&MapSample::identity(x)).unwrap() {
            QiFit::Fitted(q) => assert_eq!((q.l, q.c, q.coverage), (1.0, 0.0, 0), "{id}"),
            other => panic!("{id}: {other:?}"),
        }
    }
}

#[test]
fn constant_map_is_not_an_embedding() {
    let x = FiniteMetricSample::from_matrix("pair", vec![vec![0, 10], vec![10, 0]]).unwrap();
    let y = FiniteMetricSample::from_matrix("point", vec![vec![0]]).unwrap();
    let m = MapSample::new(x, y, vec![0, 0]).unwrap();
    assert!(matches!(fit_qi_constants(&m).unwrap(), QiFit::NotEmbedding { .. }));
}

#[test]
fn tree_map_examples() {
    let q = build_tree_qi(4, 6).unwrap();
    assert_eq!(q.map.domain.len(), q.domain_tree.len());
    for v in 1..q.domain_tree.len() {
        let p = q.domain_tree.parent[v];
        assert!(q.map.range.d(q.map.assignment[v], q.map.assignment[p]) <= 1);
    }
    let q2 = build_tree_qi(4, 2).unwrap();
    for &c in &q2.domain_tree.children[0] {
        assert!(q2.map.range.d(q2.map.assignment[0], q2.map.assignment[c]) <= 2);
    }
    let (l, c) = fitted(&build_tree_qi(5, 8).unwrap().map, FitOptions::default());
    assert!(l <= 3.0 && c <= 1.0, "L = {l}, C = {c}");
}

#[test]
fn quasi_converse_examples() {
    let x = resolve_sample("tree/3/3").unwrap();
    let qc = quasi_converse(&MapSample::identity(x.clone()), None).unwrap();
    assert_eq!(qc.map, MapSample::identity(x));
    assert_eq!(qc.bound, 0);

    let tree = build_tree_qi(4, 6).unwrap();
    assert!(quasi_converse(&tree.map, None).unwrap().bound <= 3);

    // Z-ball(10) onto the x-axis of Z²-ball(10).
    let b = CayleyBall::build(&Presentation::free_abelian(2), 10).unwrap();
    let axis: Vec<usize> = (-10..=10).map(|a| z2_vertex(&b, a, 0)).collect();
    let m = MapSample::new(line(21), FiniteMetricSample::from_graph("z2", &b).unwrap(), axis.clone()).unwrap();
    let qc = quasi_converse(&m, None).unwrap();
    assert_eq!(qc.domain_displacement, 0);
    for a in -10i64..=10 {
        for c in -10i64..=10 {
            if a.abs() + c.abs() <= 10 {
                assert_eq!(qc.map.assignment[z2_vertex(&b, a, c)] as i64 - 10, a);
            }
        }
    }
    // The far side is not coarsely surjective: q∘q̄ moves (0, 10) by 10.
    assert_eq!(qc.range_displacement, 10);
    assert!(quasi_converse(&m, Some(1.0)).is_err());
}

#[test]
fn net_examples() {
    let x = line(21);
    let all: Vec<usize> = (0..21).collect();
    assert!(check_net(&x, &all, 1.0, 0.0).passed());
    let evens: Vec<usize> = (0..21).step_by(2).collect();
    assert!(check_net(&x, &evens, 2.0, 1.0).passed());
    let r = check_net(&x, &evens, 2.0, 0.5);
    assert!(r.separated && !r.covering);
    assert_eq!(r.covering_witness.unwrap().0 % 2, 1);
}

#[test]
fn hausdorff_examples() {
    let b = CayleyBall::build(&Presentation::free_abelian(2), 10).unwrap();
    let x = FiniteMetricSample::from_graph("z2", &b).unwrap();
    let axis: Vec<usize> = (-9..=9).map(|a| z2_vertex(&b, a, 0)).collect();
    assert_eq!(hausdorff_distance(&axis, &axis, &x).unwrap(), Hausdorff::Finite(0));
    let shifted: Vec<usize> = (-9..=9).map(|a| z2_vertex(&b, a, 1)).collect();
    assert_eq!(hausdorff_distance(&axis, &shifted, &x).unwrap(), Hausdorff::Finite(1));
    let full_axis: Vec<usize> = (-10..=10).map(|a| z2_vertex(&b, a, 0)).collect();
    let diagonal: Vec<usize> = (-5..=5).map(|t| z2_vertex(&b, t, t)).collect();
    assert_eq!(hausdorff_distance(&full_axis, &diagonal, &x).unwrap(), Hausdorff::Finite(10));

    let inf = u32::MAX;
    let split = FiniteMetricSample::from_matrix("split", vec![vec![0, 1, inf], vec![1, 0, inf], vec![inf, inf, 0]]).unwrap();
    assert_eq!(hausdorff_distance(&[0], &[2], &split).unwrap(), Hausdorff::Infinite);
    assert_eq!(hausdorff_distance(&[0], &[1], &split).unwrap(), Hausdorff::Finite(1));
}

fn partial(from: &CayleyBall, to: &CayleyBall, f: impl Fn(&Word) -> Option<Word>) -> PartialMap {
    PartialMap {
        assignment: (0..from.len()).map(|v| f(from.word(v)).and_then(|w| to.find(&w).unwrap())).collect(),
    }
}

#[test]
fn quasi_action_identity() {
    let b = CayleyBall::build(&Presentation::free(2), 8).unwrap();
    let id = PartialMap::identity(b.len());
    let lambdas: Vec<usize> = b.sub_ball(1).collect();
    let probes: Vec<usize> = b.sub_ball(2).collect();
    let r = quasi_action_probe(&b, &b, &id, &id, &lambdas, &probes, 0).unwrap();
    assert_eq!(r.d, 0);
    assert_eq!(r.kernel, vec!["1".to_string()]);
}

#[test]
fn quasi_action_of_even_integers() {
    let z = Presentation::free(1);
    let lambda = CayleyBall::build(&z, 12).unwrap();
    let g = CayleyBall::build(&z, 24).unwrap();
    let exp = |w: &Word| w.letters().iter().map(|l| if l.is_inverse() { -1i64 } else { 1 }).sum::<i64>();
    let a = Word::letter(Letter::new(0, false));
    let q = partial(&lambda, &g, |w| Some(a.power(2 * exp(w))));
    let qbar = partial(&g, &lambda, |w| Some(a.power(exp(w).div_euclid(2))));
    let r = quasi_action_probe(&lambda, &g, &q, &qbar, &lambda.sub_ball(2).collect::<Vec<_>>(), &g.sub_ball(16).collect::<Vec<_>>(), 0).unwrap();
    assert!(r.d <= 2, "D = {}", r.d);
}

/// Rewrites `g ∈ F(a, b)` over the index-2 subgroup generated by
/// `x = b`, `y = a²`, `z = a b a⁻¹` (transversal {1, a}); drops a trailing `a`.
fn schreier_rewrite(g: &Word) -> Word {
    let (x, y, z) = (Letter::new(0, false), Letter::new(1, false), Letter::new(2, false));
    let mut out = Vec::new();
    let mut odd = false;
    for l in g.letters() {
        match (l.generator(), l.is_inverse(), odd) {
            (0, false, false) | (0, true, true) => {}
            (0, false, true) => out.push(y),
            (0, true, false) => out.push(y.inverse()),
            (_, inv, false) => out.push(if inv { x.inverse() } else { x }),
            (_, inv, true) => out.push(if inv { z.inverse() } else { z }),
        }
        if l.generator() == 0 {
            odd = !odd;
        }
    }
    Presentation::free(3).normal_form(&Word(out)).unwrap()
}

#[test]
fn quasi_action_of_index_two_subgroup() {
    let f2 = Presentation::free(2);
    let lambda = CayleyBall::build(&Presentation::free(3), 6).unwrap();
    let g = CayleyBall::build(&f2, 8).unwrap();
    let images = [f2.parse_word("b").unwrap(), f2.parse_word("aa").unwrap(), f2.parse_word("aba-").unwrap()];
    let q = partial(&lambda, &g, |w| {
        let mut out = Word::empty();
        for l in w.letters() {
            let img = &images[l.generator()];
            out = out.concat(&if l.is_inverse() { img.inverse() } else { img.clone() });
        }
        Some(out)
    });
    let qbar = partial(&g, &lambda, |w| Some(schreier_rewrite(w)));
    // q̄∘q = id, so composition is exact and only q∘q̄ (≤ 1) contributes.
    let r = quasi_action_probe(&lambda, &g, &q, &qbar, &lambda.sub_ball(1).collect::<Vec<_>>(), &g.sub_ball(1).collect::<Vec<_>>(), 1).unwrap();
    assert!(r.d <= 1, "D = {}", r.d);
}

#[test]
fn composition_respects_combined_constants() {
    let loose = FitOptions { l_max: 64.0, c_budget: 64.0 };
    let tree = build_tree_qi(5, 6).unwrap();
    let back = quasi_converse(&tree.map, None).unwrap().map;

    let b = CayleyBall::build(&Presentation::free_abelian(2), 10).unwrap();
    let big = CayleyBall::build(&Presentation::free_abelian(2), 20).unwrap();
    let axis = MapSample::new(line(21), FiniteMetricSample::from_graph("z2", &b).unwrap(), (-10..=10).map(|a| z2_vertex(&b, a, 0)).collect()).unwrap();
    let mut shear = Vec::new();
    for v in 0..b.len() {
        let (mut a, mut c) = (0i64, 0i64);
        for l in b.word(v).letters() {
            let s = if l.is_inverse() { -1 } else { 1 };
            if l.generator() == 0 {
                a += s;
            } else {
                c += s;
            }
        }
        shear.push(z2_vertex(&big, a + c, c));
    }
    let shear = MapSample::new(axis.range.clone(), FiniteMetricSample::from_graph("z2-big", &big).unwrap(), shear).unwrap();

    for (first, second) in [(&tree.map, &back), (&axis, &shear)] {
        let (l1, c1) = fitted(first, loose);
        let (l2, c2) = fitted(second, loose);
        let comp = first.then(second).unwrap();
        assert!(satisfies(&comp, l1 * l2, l2 * c1 + c2));
        let (l, _) = fitted(&comp, loose);
        assert!(l <= l1 * l2 + 1e-9, "L = {l} > {l1}·{l2}");
    }
}

#[test]
fn tree_map_record_round_trips() {
    let m = build_tree_qi(4, 3).unwrap().map;
    let text = MapRecord::from_map(&m).to_json();
    assert_eq!(MapRecord::from_json(&text).unwrap().to_map().unwrap(), m);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn fit_is_tight_and_monotone(k in 4usize..=6, r in 2usize..=4, extra in 0.0f64..3.0) {
        let m = build_tree_qi(k, r).unwrap().map;
        let (l, c) = fitted(&m, FitOptions::default());
        prop_assert!(satisfies(&m, l, c));
        prop_assert!(satisfies(&m, l, c + extra));
        prop_assert!(!satisfies(&m, l, c - 1e-3));
    }

    #[test]
    fn random_lattice_maps_fit_consistently(shift in prop::collection::vec(-2i64..=2, 21)) {
        // A bounded perturbation of the axis embedding is a (1, 4)-quasi-isometric embedding.
        let b = CayleyBall::build(&Presentation::free_abelian(2), 12).unwrap();
        let assignment = (-10i64..=10).zip(&shift).map(|(a, &s)| z2_vertex(&b, a, s)).collect();
        let m = MapSample::new(line(21), FiniteMetricSample::from_graph("z2", &b).unwrap(), assignment).unwrap();
        prop_assert!(satisfies(&m, 1.0, 4.0));
        let (l, c) = fitted(&m, FitOptions { l_max: 64.0, c_budget: 4.0 });
        prop_assert!(satisfies(&m, l, c));
        prop_assert!(l <= 1.0 + 1e-9);
    }
}

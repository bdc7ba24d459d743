mod common;

use common::*;
use fragility::ip::{build_fragility_ip, IpAssignment, Objective, RowFamily};
use fragility::{exact_opt, fragile, Graph, NoStrikeSet, RemovalSet};
use rand::Rng;

fn instances(seed: u64, count: usize, max_n: usize) -> Vec<(Graph, NoStrikeSet, usize)> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| {
            let n = r.gen_range(1..=max_n);
            let density = r.gen_range(0.2..0.8);
            let g = random_graph(&mut r, n, density);
            let s = random_no_strike(&mut r, &g, 1);
            let k = r.gen_range(0..=n.min(3));
            (g, s, k)
        })
        .collect()
}

#[test]
fn canonical_assignments_reproduce_fragility() {
    for (g, s, k) in instances(21, 50, 8) {
        let model = build_fragility_ip(&g, &s, k);
        assert_eq!(
            model.variable_count(),
            2 * g.node_count() + 3 * g.edge_count()
        );
        assert_eq!(
            model.constraint_count(),
            2 + 2 * g.node_count() + 5 * g.edge_count()
        );
        let candidates: Vec<usize> = g.nodes().filter(|&v| !s.contains(v)).collect();
        for set in subsets_up_to(&candidates, k) {
            let removed = RemovalSet::new(&g, set).unwrap();
            let a = IpAssignment::canonical(&model, &g, &removed);
            assert!(model.check(&a).unwrap().is_feasible());
            let value = model.evaluate(&a).unwrap();
            assert!((value - fragile(&g, &removed)).abs() < 1e-12);
            assert!((value - fractional_objective(&model, &a.values)).abs() < 1e-12);
        }
    }
}

#[test]
fn binary_optimum_equals_exhaustive_optimum() {
    for (g, s, k) in instances(22, 40, 5) {
        let model = build_fragility_ip(&g, &s, k);
        let mut best = f64::NEG_INFINITY;
        let mut feasible = 0usize;
        for_each_binary_solution(&model, |values| {
            feasible += 1;
            let a = IpAssignment {
                values: values.to_vec(),
            };
            assert!(model.check(&a).unwrap().is_feasible());
            let value = fractional_objective(&model, values);
            assert!((model.evaluate(&a).unwrap() - value).abs() < 1e-12);
            best = best.max(value);
        });
        assert!(feasible > 0);
        let exact = exact_opt(&g, &s, k).unwrap().final_fragility();
        assert!(
            (best - exact).abs() < 1e-12,
            "ip {best} vs exact {exact} on {g:?}"
        );
    }
}

#[test]
fn linearized_family_recovers_the_optimum() {
    for (g, s, k) in instances(23, 30, 5) {
        let model = build_fragility_ip(&g, &s, k);
        let candidates: Vec<usize> = g.nodes().filter(|&v| !s.contains(v)).collect();
        let mut best = fragile(&g, &RemovalSet::empty());
        for i in 1..=k {
            let lin = model.linearize(i).unwrap();
            assert!(
                matches!(lin.objective(), Objective::Linear { removals, .. } if *removals == i)
            );
            let mut family_best = f64::NEG_INFINITY;
            for_each_binary_solution(&lin, |values| {
                let a = IpAssignment {
                    values: values.to_vec(),
                };
                family_best = family_best.max(lin.evaluate(&a).unwrap());
            });
            let exactly_i = subsets_up_to(&candidates, i)
                .into_iter()
                .filter(|set| set.len() == i)
                .map(|set| fragile(&g, &RemovalSet::new(&g, set).unwrap()))
                .fold(f64::NEG_INFINITY, f64::max);
            if i > candidates.len() {
                assert_eq!(family_best, f64::NEG_INFINITY);
                continue;
            }
            assert!(
                (family_best - exactly_i).abs() < 1e-12,
                "i={i}: {family_best} vs {exactly_i}"
            );
            best = best.max(family_best);
        }
        assert!((best - exact_opt(&g, &s, k).unwrap().final_fragility()).abs() < 1e-12);
    }
}

#[test]
fn relaxation_contains_every_integral_solution() {
    for (g, s, k) in instances(24, 20, 5) {
        let model = build_fragility_ip(&g, &s, k);
        let relaxed = model.relax();
        assert_eq!(relaxed.variable_count(), model.variable_count());
        assert_eq!(relaxed.constraint_count(), model.constraint_count());
        for_each_binary_solution(&model, |values| {
            let a = IpAssignment {
                values: values.to_vec(),
            };
            assert!(relaxed.check(&a).unwrap().is_feasible());
        });
    }
}

#[test]
fn single_edge_relaxation_is_flat() {
    // two nodes leave fewer than three survivors, so every objective
    // coefficient of the linearized model vanishes and the relaxed optimum
    // equals the integral one
    let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
    let lin = build_fragility_ip(&g, &NoStrikeSet::empty(), 1)
        .linearize(1)
        .unwrap()
        .relax();
    let Objective::Linear { terms, .. } = lin.objective() else {
        panic!()
    };
    assert!(terms.iter().all(|&(_, c)| c == 0.0));
}

#[test]
fn protected_nodes_cannot_be_removed() {
    let g = double_star();
    let s = NoStrikeSet::new(&g, [0]).unwrap();
    let model = build_fragility_ip(&g, &s, 2);
    let a = IpAssignment::canonical(&model, &g, &RemovalSet::new(&g, [0]).unwrap());
    let report = model.check(&a).unwrap();
    assert!(report.violates(RowFamily::NoStrike));
    assert!(model.evaluate(&a).is_err());
}

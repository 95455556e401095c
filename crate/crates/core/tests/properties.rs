use proptest::prelude::*;
use proptest::test_runner::RngSeed;
use tricolor_core::graph::{
    blow_up, complete, complete_multipartite, cycle, disjoint_union, edges_between, edges_within,
    enumerate_proper_colorings, perturb_almost_colorable, random_regular,
};
use tricolor_core::pseudo::{mutual_information, pinsker_gap, ExactDistribution};
use tricolor_core::relaxation::{build_coloring_relaxation, solve};
use tricolor_core::rounding::{
    round_3coloring, round_independent_set, verify_local_correlation_lemma, COLORING_GAMMA,
};
use tricolor_core::spectral::{random_walk_spectrum, symmetric_eigen, threshold_rank};
use tricolor_core::{Alphabet, Graph, PseudoDistribution, SolverConfig};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        rng_seed: RngSeed::Fixed(0x7c01),
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn small_regular() -> impl Strategy<Value = Graph> {
    (4usize..=14, 2usize..=4, any::<u64>())
        .prop_filter("n d even", |(n, d, _)| n * d % 2 == 0 && d < n)
        .prop_filter_map("generator gave up", |(n, d, s)| {
            random_regular(n, d, s).ok()
        })
}

/// Small graphs with plenty of partial 3-colorings.
fn colorable() -> impl Strategy<Value = Graph> {
    prop_oneof![
        (2usize..=3).prop_map(|m| complete_multipartite(3, m).unwrap()),
        (4usize..=9).prop_map(|n| cycle(n).unwrap()),
        (2usize..=4).prop_map(|m| complete_multipartite(2, m).unwrap()),
        (6usize..=10, any::<u64>()).prop_filter_map("generator gave up", |(n, s)| random_regular(
            n + n % 2,
            3,
            s
        )
        .ok()),
    ]
}

/// A random reweighting of partial colorings with up to `budget` blanks.
fn coloring_distribution(g: &Graph, budget: usize, weights: &[f64]) -> Option<ExactDistribution> {
    let support = enumerate_proper_colorings(g, 3, budget, 24).ok()?;
    if support.is_empty() {
        return None;
    }
    let w: Vec<f64> = (0..support.len())
        .map(|i| weights[i % weights.len()])
        .collect();
    if w.iter().all(|&x| x == 0.0) {
        return None;
    }
    ExactDistribution::new(Alphabet::Coloring, support, w).ok()
}

fn weights() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(prop_oneof![Just(0.0), 0.0f64..1.0, 1.0f64..50.0], 1..40)
}

proptest! {
    #![proptest_config(config(256))]

    #[test]
    fn generated_graphs_are_regular(g in small_regular(), t in 1usize..=3, delta in 0.0f64..=0.5, seed in any::<u64>()) {
        for h in [g.clone(), blow_up(&g, t).unwrap()] {
            prop_assert!((0..h.n()).all(|v| h.neighbors(v).len() == h.degree()));
            prop_assert_eq!(2 * h.num_edges(), h.n() * h.degree());
        }
        let base = complete_multipartite(3, 4).unwrap();
        // A one-vertex subset admits no swap inside it; that is the only
        // failure allowed.
        match perturb_almost_colorable(&base, delta, seed) {
            Ok(p) => prop_assert!((0..p.n()).all(|v| p.neighbors(v).len() == base.degree())),
            Err(e) => prop_assert!(e.kind() == "swap_exhausted" && (delta * 12.0).ceil() <= 1.0),
        }
    }

    #[test]
    fn blow_up_adds_zero_eigenvalues(g in small_regular(), t in 2usize..=3) {
        let base = random_walk_spectrum(&g, false).unwrap().eigenvalues;
        let mut want = base.clone();
        want.extend(std::iter::repeat_n(0.0, (t - 1) * g.n()));
        want.sort_by(|a, b| b.total_cmp(a));
        let got = random_walk_spectrum(&blow_up(&g, t).unwrap(), false).unwrap().eigenvalues;
        prop_assert_eq!(got.len(), want.len());
        for (a, b) in got.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-8, "{} vs {}", a, b);
        }
    }

    #[test]
    fn handshake_identity(g in small_regular(), mask in any::<u64>()) {
        let (t, s): (Vec<usize>, Vec<usize>) = (0..g.n()).partition(|v| mask >> v & 1 == 1);
        let lhs = g.degree() as i64 * t.len() as i64 - 2 * edges_within(&g, &t).unwrap() as i64;
        prop_assert_eq!(lhs, edges_between(&g, &s, &t).unwrap() as i64);
    }

    #[test]
    fn k4_blocks_proper_colorings(g in small_regular()) {
        prop_assume!(g.degree() == 3);
        let h = disjoint_union(&[complete(4), g]).unwrap();
        prop_assume!(h.n() <= 24);
        prop_assert!(enumerate_proper_colorings(&h, 3, 0, 24).unwrap().is_empty());
    }

    #[test]
    fn threshold_rank_counts_components(parts in prop::collection::vec(small_regular(), 1..=3), eps in 0.0f64..0.999) {
        let d = parts[0].degree();
        let same: Vec<Graph> = parts.into_iter().filter(|g| g.degree() == d).collect();
        let g = disjoint_union(&same).unwrap();
        let s = random_walk_spectrum(&g, false).unwrap();
        prop_assert!(threshold_rank(&s, eps) >= g.components().len());
    }

    #[test]
    fn eigendecomposition_is_orthonormal(n in 1usize..=12, entries in prop::collection::vec(-1.0f64..1.0, 144)) {
        let a: Vec<f64> = (0..n * n)
            .map(|k| {
                let (i, j) = (k / n, k % n);
                entries[i.min(j) * 12 + i.max(j)]
            })
            .collect();
        let e = symmetric_eigen(&a, n, true).unwrap();
        let trace: f64 = (0..n).map(|i| a[i * n + i]).sum();
        prop_assert!((e.values.iter().sum::<f64>() - trace).abs() <= 1e-7);
        for p in 0..n {
            for q in 0..n {
                let dot: f64 = e.vector(p).unwrap().iter().zip(e.vector(q).unwrap()).map(|(x, y)| x * y).sum();
                let want = if p == q { 1.0 } else { 0.0 };
                prop_assert!((dot - want).abs() <= 1e-7);
            }
        }
    }

    #[test]
    fn exact_moments_are_consistent(g in colorable(), budget in 0usize..=2, w in weights()) {
        let pd = coloring_distribution(&g, budget, &w);
        prop_assume!(pd.is_some());
        let pd = pd.unwrap();
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u == v {
                    continue;
                }
                let j = pd.pairwise(u, v);
                for (got, want) in j.row_sums().iter().zip(pd.marginal(u)) {
                    prop_assert!((got - want).abs() <= 1e-6);
                }
                for (got, want) in j.col_sums().iter().zip(pd.marginal(v)) {
                    prop_assert!((got - want).abs() <= 1e-6);
                }
                prop_assert!(pinsker_gap(&pd, u, v).unwrap().holds);
                let (a, b) = (mutual_information(&pd, u, v).unwrap(), mutual_information(&pd, v, u).unwrap());
                prop_assert!((a - b).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn conditioning_is_bayes(g in colorable(), w in weights(), pick in any::<prop::sample::Index>()) {
        let pd = coloring_distribution(&g, 1, &w);
        prop_assume!(pd.is_some());
        let pd = pd.unwrap();
        let support: Vec<(Vec<u8>, f64)> = pd.support().map(|(a, w)| (a.to_vec(), w)).collect();
        let (a, _) = &support[pick.index(support.len())];
        let v = pick.index(g.n());
        let s = a[v] as usize;
        let post = pd.condition_on(v, s).unwrap();
        let mass: f64 = support.iter().filter(|(b, _)| b[v] as usize == s).map(|(_, w)| w).sum();
        for u in 0..g.n() {
            let mut want = [0.0; 4];
            for (b, w) in support.iter().filter(|(b, _)| b[v] as usize == s) {
                want[b[u] as usize] += w / mass;
            }
            for (x, y) in post.marginal(u).iter().zip(want) {
                prop_assert!((x - y).abs() <= 1e-12, "{} vs {}", x, y);
            }
        }
    }

    #[test]
    fn coloring_rounding_invariants(g in colorable(), budget in 0usize..=2, w in weights()) {
        let pd = coloring_distribution(&g, budget, &w);
        prop_assume!(pd.is_some());
        let pd = pd.unwrap();
        let rep = round_3coloring(&pd, &g, COLORING_GAMMA).unwrap();
        prop_assert!(rep.valid);
        let c = rep.coloring.as_ref().unwrap();
        for &(u, v) in g.edges() {
            prop_assert!(c.get(u).is_none() || c.get(u) != c.get(v));
        }
        let sets = rep.coloring_sets().unwrap();
        let mut seen = vec![0u8; g.n()];
        for &v in sets.s1.iter().chain(&sets.s2).chain(&sets.s3) {
            seen[v] += 1;
        }
        prop_assert!(seen.iter().all(|&k| k <= 1));
        prop_assert_eq!(seen.iter().filter(|&&k| k == 1).count(), sets.s.len());
        let mut cover = vec![0u8; g.n()];
        for &v in sets.b.iter().chain(&sets.s).chain(&sets.t) {
            cover[v] += 1;
        }
        prop_assert!(cover.iter().all(|&k| k == 1));
        prop_assert!(rep.diagnostics.edge_count_identity.holds);
        // Inside T the overlap bound gives M_uv >= (1/3)(1/4 - 2γ)², which
        // clears 1/50.
        let stats = &rep.diagnostics.per_edge_m_stats;
        let floor = (0.25 - 2.0 * COLORING_GAMMA).powi(2) / 3.0;
        prop_assert!(floor > 1.0 / 50.0);
        if let Some(m) = stats.t_edge_min {
            prop_assert!(m >= floor - 1e-6, "{} < {}", m, floor);
        }
    }

    #[test]
    fn local_correlation_lemma_on_true_distributions(g in colorable(), w in weights(), lambda in 0.01f64..0.99) {
        let pd = coloring_distribution(&g, 0, &w);
        prop_assume!(pd.is_some());
        let r = threshold_rank(&random_walk_spectrum(&g, false).unwrap(), lambda);
        let check = verify_local_correlation_lemma(&pd.unwrap(), &g, r, lambda).unwrap();
        prop_assert!(check.holds, "{} > {}", check.lhs, check.rhs);
    }

    #[test]
    fn independent_set_rounding_invariants(m in 2usize..=5, t in 2usize..=3, w in weights(), eps in 0.05f64..0.5) {
        let g = if t == 2 { complete_multipartite(2, m).unwrap() } else { blow_up(&cycle(4).unwrap(), m).unwrap() };
        let sets = tricolor_core::graph::enumerate_independent_sets(&g, 1, 24).unwrap();
        let weights: Vec<f64> = (0..sets.len()).map(|i| w[i % w.len()]).collect();
        prop_assume!(weights.iter().any(|&x| x > 0.0));
        let pd = ExactDistribution::new(Alphabet::IndependentSet, sets, weights).unwrap();
        let rep = round_independent_set(&pd, &g, eps).unwrap();
        let s = rep.independent_set.as_ref().unwrap();
        prop_assert!(g.edges().iter().all(|&(u, v)| !(s.contains(&u) && s.contains(&v))));
        prop_assert!(rep.diagnostics.edge_count_identity.holds);
        if let Some(mb) = &rep.diagnostics.mass_upper_bound {
            prop_assert!(mb.holds);
        }
    }
}

#[test]
fn relaxation_contains_true_distributions() {
    let graphs = [
        complete(3),
        cycle(4).unwrap(),
        complete_multipartite(3, 2).unwrap(),
    ];
    for g in graphs {
        for delta in [0.0, 0.34] {
            let p = build_coloring_relaxation(&g, delta).unwrap();
            let budget = (delta * g.n() as f64).floor() as usize;
            let support = enumerate_proper_colorings(&g, 3, budget, 24).unwrap();
            let w: Vec<f64> = (0..support.len()).map(|i| 1.0 + (i % 7) as f64).collect();
            let pd = ExactDistribution::new(Alphabet::Coloring, support, w).unwrap();
            let res = p.residuals(&pd).unwrap();
            assert!(res.max() <= 1e-12, "{res:?}");
        }
    }
}

#[test]
fn relaxation_solutions_are_consistent_and_repeatable() {
    for g in [complete_multipartite(3, 2).unwrap(), cycle(6).unwrap()] {
        let p = build_coloring_relaxation(&g, 0.0).unwrap();
        let cfg = SolverConfig::default();
        let a = solve(&p, &cfg).unwrap();
        assert!(a.summary().min_eigenvalue >= -1e-6);
        let (lo, _) = a.moment_matrix().eigen_extremes().unwrap();
        assert!(lo >= -1e-6);
        for u in 0..g.n() {
            for v in 0..g.n() {
                if u != v {
                    let j = a.pairwise(u, v);
                    for (x, y) in j.row_sums().iter().zip(a.marginal(u)) {
                        assert!((x - y).abs() <= 1e-5);
                    }
                }
            }
        }
        let b = solve(&p, &cfg).unwrap();
        assert_eq!(a.dump(), b.dump());
        assert_eq!(a.summary().iterations, b.summary().iterations);
    }
}

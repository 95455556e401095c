use super::lemmas::{edge_local_correlation, LocalCorrelation};
use super::report::{
    ColoringSets, Diagnostics, EdgeCountIdentity, EdgeStats, IndependentSets,
    LocalCorrelationChain, MarkovBound, MassBound, RoundingReport, Sets,
};
use crate::error::{Error, Result};
use crate::graph::{
    edges_between, edges_within, verify_independent_set, verify_partial_coloring, Graph,
    PartialColoring,
};
use crate::pseudo::{global_correlation, Alphabet, PseudoDistribution};

/// Rounding threshold offset for the coloring program.
pub const COLORING_GAMMA: f64 = 0.001;

/// Threshold comparisons lean toward leaving a vertex out of a set.
pub const MEMBERSHIP_SLACK: f64 = 1e-12;

fn at_least(x: f64, threshold: f64) -> bool {
    x >= threshold + MEMBERSHIP_SLACK
}

fn at_most(x: f64, threshold: f64) -> bool {
    x <= threshold - MEMBERSHIP_SLACK
}

fn check_input(pd: &dyn PseudoDistribution, g: &Graph, alphabet: Alphabet) -> Result<()> {
    if pd.alphabet() != alphabet {
        return Err(Error::InvalidParameter(format!(
            "expected a distribution over the {alphabet:?} alphabet"
        )));
    }
    if pd.num_vars() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            found: pd.num_vars(),
        });
    }
    Ok(())
}

fn edge_stats(
    lc: &LocalCorrelation,
    in_t: &[bool],
    threshold: Option<f64>,
    lemma_bounds: Option<(f64, f64)>,
) -> EdgeStats {
    let ms: Vec<f64> = lc.per_edge.iter().map(|e| e.m_uv).collect();
    let t_ms: Vec<f64> = lc
        .per_edge
        .iter()
        .filter(|e| in_t[e.u] && in_t[e.v])
        .map(|e| e.m_uv)
        .collect();
    let min = ms.iter().copied().fold(f64::INFINITY, f64::min);
    EdgeStats {
        edges: ms.len(),
        min: if ms.is_empty() { 0.0 } else { min },
        mean: lc.m_average,
        max: ms.iter().copied().fold(0.0, f64::max),
        t_edges: t_ms.len(),
        t_edge_min: t_ms.iter().copied().reduce(f64::min),
        t_edge_threshold: threshold,
        t_edges_below_threshold: threshold
            .map(|th| t_ms.iter().filter(|&&m| m < th - 1e-6).count())
            .unwrap_or(0),
        lemma_bound: lemma_bounds.map(|b| b.0),
        corrected_lemma_bound: lemma_bounds.map(|b| b.1),
        max_discrepancy: lc.max_discrepancy,
    }
}

fn edge_count_identity(g: &Graph, x: &[usize], t: &[usize]) -> Result<EdgeCountIdentity> {
    let d = g.degree() as i64;
    let cut = edges_between(g, x, t)? as i64;
    let e_t = edges_within(g, t)? as i64;
    let e_x = edges_within(g, x)? as i64;
    let via_t = d * t.len() as i64 - 2 * e_t;
    let via_complement = d * x.len() as i64 - 2 * e_x;
    let lower_bound = (t.len() as i64 - x.len() as i64) * d;
    Ok(EdgeCountIdentity {
        cut,
        via_t,
        via_complement,
        two_e_t: 2 * e_t,
        lower_bound,
        holds: cut == via_t && cut == via_complement && 2 * e_t >= lower_bound,
    })
}

fn sorted_union(a: &[usize], b: &[usize]) -> Vec<usize> {
    let mut out: Vec<usize> = a.iter().chain(b).copied().collect();
    out.sort_unstable();
    out.dedup();
    out
}

/// Colors every vertex whose marginal on some color is at least `1/2 + γ`
/// with that color. `B` collects the remaining vertices with blank mass at
/// least `γ` and `T` the rest.
pub fn round_3coloring(
    pd: &dyn PseudoDistribution,
    g: &Graph,
    gamma: f64,
) -> Result<RoundingReport> {
    check_input(pd, g, Alphabet::Coloring)?;
    if !(gamma > 0.0 && gamma < 0.25) {
        return Err(Error::InvalidParameter(format!(
            "gamma must lie in (0, 1/4), got {gamma}"
        )));
    }
    let n = g.n();
    let mut by_color: [Vec<usize>; 3] = Default::default();
    let mut b = Vec::new();
    let mut heavy_blank = 0;
    let mut blank_mass = 0.0;
    let mut t = Vec::new();
    let mut coloring = PartialColoring::uncolored(n);
    for u in 0..n {
        let m = pd.marginal(u);
        blank_mass += m[Alphabet::BLANK];
        let blank = at_least(m[Alphabet::BLANK], gamma);
        heavy_blank += blank as usize;
        if let Some(s) = (0..3).find(|&s| at_least(m[s], 0.5 + gamma)) {
            by_color[s].push(u);
            coloring.set(u, Some(s as u8 + 1));
        } else if blank {
            b.push(u);
        } else {
            t.push(u);
        }
    }
    let verdict = verify_partial_coloring(g, &coloring)?;
    if !verdict.valid {
        return Err(Error::BackendInconsistency(format!(
            "threshold rounding produced monochromatic edges {:?}; the backend violates its edge constraints",
            verdict.violations
        )));
    }
    let s = sorted_union(&sorted_union(&by_color[0], &by_color[1]), &by_color[2]);
    let sb = sorted_union(&s, &b);
    let lc = edge_local_correlation(pd, g)?;
    let mut in_t = vec![false; n];
    t.iter().for_each(|&u| in_t[u] = true);
    let threshold = 1.0 / 50.0;
    let lemma_bounds = (
        (0.25 - 1.5 * gamma).powi(2) / 3.0,
        (0.25 - 2.0 * gamma).powi(2) / 3.0,
    );
    let identity = edge_count_identity(g, &sb, &t)?;
    let nd = (n * g.degree()) as f64;
    let forced = (nd > 0.0).then(|| threshold * identity.two_e_t as f64 / nd);
    let [s1, s2, s3] = by_color;
    Ok(RoundingReport {
        mode: pd.backend_name().to_string(),
        n,
        d: g.degree(),
        eps: None,
        delta: None,
        lambda: None,
        r: None,
        gamma,
        global_correlation: global_correlation(pd)?,
        local_correlation: lc.average,
        achieved: s.len(),
        sets: Sets::Coloring(ColoringSets {
            b: b.clone(),
            s1,
            s2,
            s3,
            s,
            t,
        }),
        coloring: Some(coloring),
        independent_set: None,
        valid: true,
        target: None,
        diagnostics: Diagnostics {
            per_edge_m_stats: edge_stats(&lc, &in_t, Some(threshold), Some(lemma_bounds)),
            markov_b_bound: Some(MarkovBound {
                measured: b.len(),
                heavy_blank,
                blank_mass,
                bound: None,
                holds: None,
            }),
            edge_count_identity: identity,
            local_correlation: LocalCorrelationChain {
                measured: lc.average,
                cap: None,
                lemma_rhs: None,
                forced_by_t: forced,
                contradiction_bound: None,
            },
            mass_upper_bound: None,
        },
        conditioning: None,
        ledger: None,
    })
}

/// Takes `S = {u : p_u(1) >= 1/2 + γ}` with `γ = ε/100` and reports
/// `A = {u : p_u(1) <= ε/2}` and `T = [n] \ A`.
pub fn round_independent_set(
    pd: &dyn PseudoDistribution,
    g: &Graph,
    eps: f64,
) -> Result<RoundingReport> {
    check_input(pd, g, Alphabet::IndependentSet)?;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    let n = g.n();
    let gamma = eps / 100.0;
    let (mut s, mut a, mut t) = (Vec::new(), Vec::new(), Vec::new());
    let mut mass = 0.0;
    for u in 0..n {
        let p = pd.marginal(u)[1];
        mass += p;
        if at_least(p, 0.5 + gamma) {
            s.push(u);
        }
        if at_most(p, eps / 2.0) {
            a.push(u);
        } else {
            t.push(u);
        }
    }
    let verdict = verify_independent_set(g, &s)?;
    if !verdict.independent {
        return Err(Error::BackendInconsistency(format!(
            "threshold rounding produced edges {:?} inside the set; the backend violates its edge constraints",
            verdict.violations
        )));
    }
    let lc = edge_local_correlation(pd, g)?;
    let mut in_t = vec![false; n];
    t.iter().for_each(|&u| in_t[u] = true);
    let threshold = (eps / 2.0).powi(4);
    let identity = edge_count_identity(g, &a, &t)?;
    let nd = (n * g.degree()) as f64;
    let forced = (nd > 0.0).then(|| threshold * identity.two_e_t as f64 / nd);
    let upper = eps / 2.0 * a.len() as f64
        + s.len() as f64
        + (0.5 + gamma) * (n - s.len() - a.len()) as f64;
    let contradiction =
        ((a.len() as f64) < (0.5 - eps / 3.0) * n as f64).then(|| eps.powi(5) / 24.0);
    Ok(RoundingReport {
        mode: pd.backend_name().to_string(),
        n,
        d: g.degree(),
        eps: Some(eps),
        delta: None,
        lambda: None,
        r: None,
        gamma,
        global_correlation: global_correlation(pd)?,
        local_correlation: lc.average,
        achieved: s.len(),
        sets: Sets::IndependentSet(IndependentSets { s: s.clone(), a, t }),
        coloring: None,
        independent_set: Some(s),
        valid: true,
        target: None,
        diagnostics: Diagnostics {
            per_edge_m_stats: edge_stats(&lc, &in_t, Some(threshold), None),
            markov_b_bound: None,
            edge_count_identity: identity,
            local_correlation: LocalCorrelationChain {
                measured: lc.average,
                cap: Some(eps.powi(5) / 50.0),
                lemma_rhs: None,
                forced_by_t: forced,
                contradiction_bound: contradiction,
            },
            mass_upper_bound: Some(MassBound {
                mass,
                upper_bound: upper,
                holds: mass <= upper + 1e-9,
            }),
        },
        conditioning: None,
        ledger: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_multipartite, cycle};
    use crate::pseudo::{
        condition, exact_from_colorings, exact_from_independent_sets, ExactDistribution,
    };

    #[test]
    fn point_mass_colors_everything() {
        let g = complete_multipartite(3, 2).unwrap();
        let pm = ExactDistribution::point_mass(Alphabet::Coloring, vec![0, 0, 1, 1, 2, 2]);
        let rep = round_3coloring(&pm, &g, COLORING_GAMMA).unwrap();
        let sets = rep.coloring_sets().unwrap();
        assert_eq!(sets.s, (0..6).collect::<Vec<_>>());
        assert!(sets.b.is_empty() && sets.t.is_empty());
        assert_eq!(sets.s2, vec![2, 3]);
        assert!(rep.valid && rep.diagnostics.edge_count_identity.holds);
    }

    #[test]
    fn uniform_octahedron_leaves_all_in_t() {
        let g = complete_multipartite(3, 2).unwrap();
        let pd = exact_from_colorings(&g, 0.0, 20).unwrap();
        let rep = round_3coloring(&pd, &g, COLORING_GAMMA).unwrap();
        let sets = rep.coloring_sets().unwrap();
        assert!(sets.s.is_empty());
        assert_eq!(sets.t.len(), 6);
        let stats = &rep.diagnostics.per_edge_m_stats;
        assert_eq!(stats.t_edges, 12);
        assert_eq!(stats.t_edges_below_threshold, 0);
        assert!(stats.t_edge_min.unwrap() >= stats.lemma_bound.unwrap() - 1e-12);

        let c = condition(&pd, 0, 0).unwrap();
        let c = condition(c.as_ref(), 2, 1).unwrap();
        let rep = round_3coloring(c.as_ref(), &g, COLORING_GAMMA).unwrap();
        assert_eq!(rep.achieved, 6);
        assert_eq!(rep.coloring.unwrap().colored_count(), 6);
    }

    #[test]
    fn corrupt_backend_is_caught() {
        let g = complete_multipartite(3, 1).unwrap();
        // both endpoints of edge {0, 1} on color 1: not a proper coloring
        let pm = ExactDistribution::point_mass(Alphabet::Coloring, vec![0, 0, 1]);
        assert!(matches!(
            round_3coloring(&pm, &g, COLORING_GAMMA),
            Err(Error::BackendInconsistency(_))
        ));
    }

    #[test]
    fn independent_set_rounding() {
        let k55 = complete_multipartite(2, 5).unwrap();
        let mut side = vec![1u8; 5];
        side.extend([0u8; 5]);
        let pm = ExactDistribution::point_mass(Alphabet::IndependentSet, side);
        let rep = round_independent_set(&pm, &k55, 0.2).unwrap();
        assert_eq!(rep.independent_set.as_deref(), Some(&[0, 1, 2, 3, 4][..]));
        assert!(rep.diagnostics.mass_upper_bound.as_ref().unwrap().holds);

        let c4 = cycle(4).unwrap();
        let pd = exact_from_independent_sets(&c4, 0.0, 30).unwrap();
        let rep = round_independent_set(&pd, &c4, 0.2).unwrap();
        assert!(rep.independent_set.unwrap().is_empty());
        let c = condition(&pd, 0, 1).unwrap();
        let rep = round_independent_set(c.as_ref(), &c4, 0.2).unwrap();
        assert_eq!(rep.independent_set.as_deref(), Some(&[0, 2][..]));
        assert_eq!(rep.independent_sets().unwrap().a, vec![1, 3]);
    }
}

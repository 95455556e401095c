use serde::{Deserialize, Serialize};

use super::{Joint, PseudoDistribution};
use crate::error::{Error, Result};

/// Mutual information below `-NEGATIVE_INFORMATION_TOLERANCE` signals that the
/// backend's marginals and joints disagree; smaller negative values are
/// rounding noise and are clipped to zero.
pub const NEGATIVE_INFORMATION_TOLERANCE: f64 = 1e-6;

/// Shannon entropy in nats; non-positive entries contribute nothing.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter()
        .filter(|&&x| x > 0.0)
        .map(|&x| x * x.ln())
        .sum::<f64>()
}

/// `I(X;Y)` in nats for the joint `joint` against the marginals `pu`, `pv`.
/// Cells with non-positive joint mass contribute zero, as do cells whose
/// marginal product is not positive.
pub fn mutual_information_of(joint: &Joint, pu: &[f64], pv: &[f64]) -> Result<f64> {
    let k = joint.size;
    let mut total = 0.0;
    for a in 0..k {
        for b in 0..k {
            let p = joint.get(a, b);
            let q = pu[a] * pv[b];
            if p > 0.0 && q > 0.0 {
                total += p * (p / q).ln();
            }
        }
    }
    if total < -NEGATIVE_INFORMATION_TOLERANCE {
        return Err(Error::NegativeInformation { value: total });
    }
    Ok(total.max(0.0))
}

pub fn mutual_information(pd: &dyn PseudoDistribution, u: usize, v: usize) -> Result<f64> {
    mutual_information_of(&pd.pairwise(u, v), &pd.marginal(u), &pd.marginal(v))
}

/// Average mutual information over ordered pairs `(u, v)` drawn uniformly and
/// independently from `[n]`, so the diagonal contributes `H(X_u)`.
pub fn global_correlation(pd: &dyn PseudoDistribution) -> Result<f64> {
    let n = pd.num_vars();
    let marginals: Vec<Vec<f64>> = (0..n).map(|u| pd.marginal(u)).collect();
    let mut total = 0.0;
    for u in 0..n {
        total += mutual_information_of(
            &Joint::from_diagonal(&marginals[u]),
            &marginals[u],
            &marginals[u],
        )?;
        for v in u + 1..n {
            total += 2.0 * mutual_information_of(&pd.pairwise(u, v), &marginals[u], &marginals[v])?;
        }
    }
    Ok(total / (n * n) as f64)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinskerGap {
    /// `‖(X,Y) − X ⊗ Y‖₁`
    pub l1_distance: f64,
    /// `sqrt(2 I(X;Y))`
    pub bound: f64,
    pub holds: bool,
}

pub fn pinsker_gap_of(joint: &Joint, pu: &[f64], pv: &[f64]) -> Result<PinskerGap> {
    let k = joint.size;
    let mut l1 = 0.0;
    for a in 0..k {
        for b in 0..k {
            l1 += (joint.get(a, b) - pu[a] * pv[b]).abs();
        }
    }
    let bound = (2.0 * mutual_information_of(joint, pu, pv)?).sqrt();
    Ok(PinskerGap {
        l1_distance: l1,
        bound,
        holds: l1 <= bound + 1e-9,
    })
}

pub fn pinsker_gap(pd: &dyn PseudoDistribution, u: usize, v: usize) -> Result<PinskerGap> {
    pinsker_gap_of(&pd.pairwise(u, v), &pd.marginal(u), &pd.marginal(v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::complete;
    use crate::pseudo::{exact_from_colorings, Alphabet, ExactDistribution};

    fn joint(size: usize, p: &[f64]) -> Joint {
        Joint {
            size,
            p: p.to_vec(),
        }
    }

    #[test]
    fn independent_pair_has_zero_information() {
        let pu = [0.2, 0.8];
        let pv = [0.5, 0.5];
        let j = joint(2, &[0.1, 0.1, 0.4, 0.4]);
        assert!(mutual_information_of(&j, &pu, &pv).unwrap().abs() < 1e-15);
        let gap = pinsker_gap_of(&j, &pu, &pv).unwrap();
        assert!(gap.l1_distance.abs() < 1e-15 && gap.bound.abs() < 1e-7 && gap.holds);
    }

    #[test]
    fn copies_carry_their_entropy() {
        let third = 1.0 / 3.0;
        let j = Joint::from_diagonal(&[third, third, third]);
        let mi = mutual_information_of(&j, &[third; 3], &[third; 3]).unwrap();
        assert!((mi - 3f64.ln()).abs() < 1e-12);

        let coin = joint(2, &[0.5, 0.0, 0.0, 0.5]);
        let mi = mutual_information_of(&coin, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!((mi - 2f64.ln()).abs() < 1e-12);
        let gap = pinsker_gap_of(&coin, &[0.5, 0.5], &[0.5, 0.5]).unwrap();
        assert!((gap.l1_distance - 1.0).abs() < 1e-12);
        assert!((gap.bound - (2.0 * 2f64.ln()).sqrt()).abs() < 1e-12);
        assert!((gap.bound - 1.1774).abs() < 1e-4);
    }

    #[test]
    fn inconsistent_data_is_rejected() {
        let noisy = joint(2, &[1.0 - 1e-8, 0.0, 0.0, 0.0]);
        assert_eq!(
            mutual_information_of(&noisy, &[1.0, 0.0], &[1.0, 0.0]).unwrap(),
            0.0
        );
        let broken = joint(2, &[0.1, 0.0, 0.0, 0.0]);
        assert!(matches!(
            mutual_information_of(&broken, &[1.0, 0.0], &[1.0, 0.0]),
            Err(Error::NegativeInformation { .. })
        ));
    }

    #[test]
    fn triangle_global_correlation() {
        let pd = exact_from_colorings(&complete(3), 0.0, 20).unwrap();
        // diagonal: ln 3 each; off-diagonal: uniform over 6 unequal pairs, I = ln(3/2)
        let want = (3.0 * 3f64.ln() + 6.0 * 1.5f64.ln()) / 9.0;
        let got = global_correlation(&pd).unwrap();
        assert!((got - want).abs() < 1e-12, "{got} vs {want}");
    }

    #[test]
    fn point_mass_and_product() {
        let pm = ExactDistribution::point_mass(Alphabet::Coloring, vec![0, 1, 2]);
        assert_eq!(global_correlation(&pm).unwrap(), 0.0);

        // four independent uniform colors
        let n = 4;
        let support: Vec<Vec<u8>> = (0..81u32)
            .map(|code| (0..n).map(|i| (code / 3u32.pow(i) % 3) as u8).collect())
            .collect();
        let weights = vec![1.0 / 81.0; 81];
        let prod = ExactDistribution::new(Alphabet::Coloring, support, weights).unwrap();
        let got = global_correlation(&prod).unwrap();
        assert!((got - 3f64.ln() / n as f64).abs() < 1e-12);
    }

    #[test]
    fn symmetry_of_information() {
        let pd = exact_from_colorings(&crate::graph::cycle(4).unwrap(), 0.0, 20).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                let a = mutual_information(&pd, u, v).unwrap();
                let b = mutual_information(&pd, v, u).unwrap();
                assert!((a - b).abs() < 1e-9);
                assert!(pinsker_gap(&pd, u, v).unwrap().holds);
            }
        }
    }
}

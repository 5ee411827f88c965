use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::normal::log_upper_tail;
use super::LevelFunction;
use crate::field::Grid;
use crate::{Error, Result};

/// Standard deviation of the shifted marginal `g_x = N(l_x, sigma_x^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaMode {
    /// `sigma_x = 1 / l_x`
    ReciprocalLevel,
    Constant(f64),
}

/// Levels at or below this make the shifted marginal meaningless.
pub const MIN_PROPOSAL_LEVEL: f64 = 0.1;

/// Location weights `w_x ~ P(xi(x) > l_x) delta_x` and per-node shifted
/// normal marginals, all kept in log space.
#[derive(Debug, Clone)]
pub struct ProposalDensities {
    log_weight: Vec<f64>,
    cumulative: Vec<f64>,
    mean: Vec<f64>,
    sigma: Vec<f64>,
    log_tail: Vec<f64>,
}

pub fn build_proposals(levels: &LevelFunction, grid: &Grid, mode: SigmaMode) -> Result<ProposalDensities> {
    if levels.len() != grid.len() {
        return Err(Error::config("level", "level function does not cover the grid"));
    }
    let nodes = levels.anchor_nodes();
    if let Some((k, &l)) = levels.anchor_values().iter().enumerate().find(|(_, &l)| !(l > MIN_PROPOSAL_LEVEL)) {
        return Err(Error::DegenerateLevel { node: nodes[k], level: l });
    }
    let mean = levels.nodal().to_vec();
    let sigma: Vec<f64> = match mode {
        SigmaMode::ReciprocalLevel => mean.iter().map(|l| 1.0 / l).collect(),
        SigmaMode::Constant(s) => {
            if !(s > 0.0) || !s.is_finite() {
                return Err(Error::config("sigma", format!("must be positive, got {s}")));
            }
            vec![s; mean.len()]
        }
    };
    let log_tail: Vec<f64> = mean.iter().map(|&l| log_upper_tail(l)).collect();
    let unnormalized: Vec<f64> = log_tail.iter().zip(grid.cell_measures()).map(|(t, d)| t + d.ln()).collect();
    ProposalDensities::from_log_parts(unnormalized, mean, sigma, log_tail)
}

impl ProposalDensities {
    /// Assembles proposals from unnormalized log weights and marginal
    /// parameters. Nodes with weight `-inf` are never selected.
    pub fn from_log_parts(log_weight: Vec<f64>, mean: Vec<f64>, sigma: Vec<f64>, log_tail: Vec<f64>) -> Result<Self> {
        let n = log_weight.len();
        if mean.len() != n || sigma.len() != n || log_tail.len() != n || n == 0 {
            return Err(Error::config("proposal", "mismatched proposal lengths"));
        }
        if sigma.iter().any(|s| !(*s > 0.0)) {
            return Err(Error::config("sigma", "standard deviations must be positive"));
        }
        let norm = log_sum_exp(&log_weight);
        if !norm.is_finite() {
            return Err(Error::config("proposal", "location weights do not normalize"));
        }
        let log_weight: Vec<f64> = log_weight.iter().map(|w| w - norm).collect();
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = log_weight
            .iter()
            .map(|w| {
                acc += w.exp();
                acc
            })
            .collect();
        let total = *cumulative.last().unwrap();
        cumulative.iter_mut().for_each(|c| *c /= total);
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(ProposalDensities { log_weight, cumulative, mean, sigma, log_tail })
    }

    /// Proposals with explicit (not necessarily normalized) weights.
    pub fn from_weights(weights: &[f64], mean: Vec<f64>, sigma: Vec<f64>) -> Result<Self> {
        let lw = weights.iter().map(|w| w.ln()).collect();
        let lt = mean.iter().map(|&l| log_upper_tail(l)).collect();
        Self::from_log_parts(lw, mean, sigma, lt)
    }

    pub fn len(&self) -> usize {
        self.mean.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean.is_empty()
    }

    pub fn weight(&self, node: usize) -> f64 {
        self.log_weight[node].exp()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.log_weight.iter().map(|w| w.exp()).collect()
    }

    pub fn log_weights(&self) -> &[f64] {
        &self.log_weight
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn sigma(&self) -> &[f64] {
        &self.sigma
    }

    /// `log P(xi(x) > l_x)` per node.
    pub fn log_tail(&self) -> &[f64] {
        &self.log_tail
    }

    /// Categorical draw of the location by inverse CDF over node order.
    pub fn sample_location<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        self.location_from_uniform(u)
    }

    pub(crate) fn location_from_uniform(&self, u: f64) -> usize {
        self.cumulative.partition_point(|&c| c <= u).min(self.len() - 1)
    }

    /// Draw of `xi(node)` from `N(l_node, sigma_node^2)`.
    pub fn sample_level<R: Rng + ?Sized>(&self, node: usize, rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.mean[node] + self.sigma[node] * z
    }

    /// `log dQ/dP` at a field sample:
    /// `log sum_x w_x g_x(xi(x)) / phi(xi(x))`, by log-sum-exp.
    pub fn log_likelihood_ratio(&self, xi: &[f64]) -> f64 {
        let mut terms = Vec::with_capacity(xi.len());
        for (k, &v) in xi.iter().enumerate() {
            let lw = self.log_weight[k];
            if lw == f64::NEG_INFINITY {
                continue;
            }
            let s = self.sigma[k];
            let d = (v - self.mean[k]) / s;
            terms.push(lw - s.ln() - 0.5 * d * d + 0.5 * v * v);
        }
        log_sum_exp(&terms)
    }
}

/// `log sum exp(x_i)`; `-inf` for an empty slice.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use proptest::prelude::*;

    #[test]
    fn constant_level_gives_lebesgue_weights() {
        let g = Grid::square(7).unwrap();
        let f = LevelFunction::constant(&g, 8.0, 3.0);
        let p = build_proposals(&f, &g, SigmaMode::ReciprocalLevel).unwrap();
        for (w, d) in p.weights().iter().zip(g.cell_measures()) {
            assert!((w - d).abs() < 1e-14);
        }
        assert!((p.weights().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!(p.sigma().iter().all(|&s| (s - 1.0 / 3.0).abs() < 1e-15));
    }

    #[test]
    fn two_node_tail_weights() {
        // Phi_bar(2) = 2.2750131948179e-2, Phi_bar(3) = 1.3498980316301e-3
        let (t2, t3) = (2.275_013_194_817_92e-2, 1.349_898_031_630_094_6e-3);
        let expected = [t2 / (t2 + t3), t3 / (t2 + t3)];
        let lw = vec![log_upper_tail(2.0) + 0.5f64.ln(), log_upper_tail(3.0) + 0.5f64.ln()];
        let p = ProposalDensities::from_log_parts(lw, vec![2.0, 3.0], vec![0.5, 1.0 / 3.0], vec![0.0; 2]).unwrap();
        let w = p.weights();
        assert!((w[0] - expected[0]).abs() < 1e-12 && (w[1] - expected[1]).abs() < 1e-12);
        assert!((w[0] - 0.94399).abs() < 1e-5 && (w[1] - 0.05601).abs() < 1e-5);
    }

    #[test]
    fn degenerate_levels_rejected() {
        let g = Grid::line(5).unwrap();
        let f = LevelFunction::constant(&g, 1.0, 0.05);
        assert!(matches!(build_proposals(&f, &g, SigmaMode::ReciprocalLevel), Err(Error::DegenerateLevel { .. })));
        let ok = LevelFunction::constant(&g, 1.0, 1.0);
        assert!(build_proposals(&ok, &g, SigmaMode::Constant(0.0)).is_err());
    }

    #[test]
    fn location_sampling_edge_cases() {
        let single = ProposalDensities::from_weights(&[1.0], vec![2.0], vec![0.5]).unwrap();
        let mut rng = substream(1, 1);
        for _ in 0..100 {
            assert_eq!(single.sample_location(&mut rng), 0);
        }
        let first = ProposalDensities::from_weights(&[1.0, 0.0], vec![2.0; 2], vec![0.5; 2]).unwrap();
        for _ in 0..1000 {
            assert_eq!(first.sample_location(&mut rng), 0);
        }
        assert_eq!(first.location_from_uniform(0.0), 0);
        assert_eq!(first.location_from_uniform(1.0 - f64::EPSILON), 0);
        let second = ProposalDensities::from_weights(&[0.0, 1.0], vec![2.0; 2], vec![0.5; 2]).unwrap();
        assert_eq!(second.location_from_uniform(0.0), 1);
    }

    #[test]
    fn location_frequencies_match_weights() {
        let w = [0.1, 0.4, 0.05, 0.3, 0.15];
        let p = ProposalDensities::from_weights(&w, vec![2.0; 5], vec![0.5; 5]).unwrap();
        let n = 100_000;
        let mut counts = [0usize; 5];
        for i in 0..n {
            counts[p.sample_location(&mut substream(9, i))] += 1;
        }
        let chi2: f64 = (0..5)
            .map(|k| {
                let e = w[k] * n as f64;
                (counts[k] as f64 - e).powi(2) / e
            })
            .sum();
        // 99.9% quantile of chi-square with 4 degrees of freedom
        assert!(chi2 < 18.47, "chi2 = {chi2}, counts {counts:?}");
        for k in 0..5 {
            let freq = counts[k] as f64 / n as f64;
            let se = (w[k] * (1.0 - w[k]) / n as f64).sqrt();
            assert!((freq - w[k]).abs() <= 4.0 * se, "node {k}: {freq} vs {}", w[k]);
        }
    }

    #[test]
    fn level_draw_moments() {
        let l = 4.0;
        let p = ProposalDensities::from_weights(&[1.0], vec![l], vec![1.0 / l]).unwrap();
        let n = 100_000;
        let draws: Vec<f64> = (0..n).map(|i| p.sample_level(0, &mut substream(4, i))).collect();
        let mean = draws.iter().sum::<f64>() / n as f64;
        let sd = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
        assert!((mean - l).abs() <= 3.0 * (1.0 / l) / (n as f64).sqrt());
        assert!((sd * l - 1.0).abs() < 0.05);

        let tight = ProposalDensities::from_weights(&[1.0], vec![l], vec![1e-12]).unwrap();
        assert!((tight.sample_level(0, &mut substream(4, 0)) - l).abs() < 1e-10);
    }

    #[test]
    fn identity_proposal_has_unit_ratio() {
        let w = [0.2, 0.5, 0.3];
        let p = ProposalDensities::from_weights(&w, vec![0.0; 3], vec![1.0; 3]).unwrap();
        assert!(p.log_likelihood_ratio(&[0.3, -2.0, 7.5]).abs() < 1e-15);
    }

    #[test]
    fn single_node_ratio_is_classical_tilt() {
        let p = ProposalDensities::from_weights(&[1.0], vec![3.0], vec![0.4]).unwrap();
        let x: f64 = 2.7;
        let g = (-(x - 3.0f64).powi(2) / (2.0 * 0.16)).exp() / (0.4 * (2.0 * std::f64::consts::PI).sqrt());
        let phi = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
        assert!((p.log_likelihood_ratio(&[x]) - (g / phi).ln()).abs() < 1e-12);
    }

    #[test]
    fn extreme_ratios_stay_finite() {
        let p = ProposalDensities::from_weights(&[0.5, 0.5], vec![30.0, 30.0], vec![1.0 / 30.0; 2]).unwrap();
        let v = p.log_likelihood_ratio(&[30.0, -3.0]);
        let expected = 0.5f64.ln() + 30f64.ln() + 450.0;
        assert!(v.is_finite() && (v - expected).abs() < 1e-9, "{v} vs {expected}");
        let far = p.log_likelihood_ratio(&[400.0, 400.0]);
        assert!(far.is_finite() || far == f64::NEG_INFINITY);
    }

    proptest! {
        #[test]
        fn weights_are_permutation_equivariant(levels in prop::collection::vec(0.5f64..8.0, 2..12), rot in 0usize..12) {
            let n = levels.len();
            let rot = rot % n;
            let lw: Vec<f64> = levels.iter().map(|&l| log_upper_tail(l)).collect();
            let p = ProposalDensities::from_log_parts(lw.clone(), levels.clone(), vec![1.0; n], vec![0.0; n]).unwrap();
            let mut lw2 = lw.clone();
            lw2.rotate_left(rot);
            let mut l2 = levels.clone();
            l2.rotate_left(rot);
            let q = ProposalDensities::from_log_parts(lw2, l2, vec![1.0; n], vec![0.0; n]).unwrap();
            let a = p.weights();
            let b = q.weights();
            for k in 0..n {
                prop_assert!((a[(k + rot) % n] - b[k]).abs() < 1e-14);
            }
            prop_assert!((a.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }

        #[test]
        fn likelihood_ratio_is_positive(xi in prop::collection::vec(-10.0f64..40.0, 3)) {
            let p = ProposalDensities::from_weights(&[0.2, 0.3, 0.5], vec![2.0, 4.0, 6.0], vec![0.5, 0.25, 1.0 / 6.0]).unwrap();
            let lr = p.log_likelihood_ratio(&xi);
            prop_assert!(lr.is_finite());
            prop_assert!((-lr).exp() >= 0.0);
        }
    }
}

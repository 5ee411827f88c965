use super::*;
use crate::level::normal::log_density;
use crate::pde::StrainResponse;

fn small_1d(nodes: usize, b: f64, method: Method, samples: u64) -> EstimatorConfig {
    EstimatorConfig { nodes_per_axis: nodes, threshold: b, method, samples, ..EstimatorConfig::one_dimensional() }
}

/// Strain supremum equal to `exp(max xi)`.
struct MaxExp(Grid);

impl StrainResponse for MaxExp {
    fn grid(&self) -> &Grid {
        &self.0
    }

    fn strain_sup(&self, xi: &[f64]) -> Result<f64> {
        Ok(xi.iter().cloned().fold(f64::NEG_INFINITY, f64::max).exp())
    }
}

fn factor_3() -> FieldFactor {
    FieldFactor::factorize(&Grid::line(3).unwrap(), &CovarianceModel::squared_exponential(0.5), DEFAULT_PIVOT_TOL)
        .unwrap()
}

#[test]
fn standard_proposals_recover_the_indicator() {
    let factor = factor_3();
    let response = MaxExp(factor.grid().clone());
    let p = ProposalDensities::from_weights(&[0.25, 0.5, 0.25], vec![0.0; 3], vec![1.0; 3]).unwrap();
    for i in 0..200 {
        let d = draw_is_sample(1.0, &factor, &p, &response, &mut substream(3, i)).unwrap().unwrap();
        assert!(d.log_weight.abs() < 1e-14);
        assert_eq!(d.z > 0.0, d.indicator);
        if d.indicator {
            assert!((d.z - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn single_location_is_the_classical_tilt() {
    let factor = factor_3();
    let response = MaxExp(factor.grid().clone());
    let (l, s) = (2.5, 0.4);
    let p = ProposalDensities::from_weights(&[0.0, 1.0, 0.0], vec![l; 3], vec![s; 3]).unwrap();
    for i in 0..200 {
        let mut rng = substream(5, i);
        let d = draw_is_sample(1.0, &factor, &p, &response, &mut rng).unwrap().unwrap();
        assert_eq!(d.location, 1);
        let mut replay = substream(5, i);
        let _ = p.sample_location(&mut replay);
        let v = p.sample_level(1, &mut replay);
        let expected = log_density(v) - (log_density((v - l) / s) - s.ln());
        assert!((d.log_weight - expected).abs() < 1e-12);
        assert!(d.log_weight.exp() > 0.0);
    }
}

#[test]
fn trivial_thresholds() {
    let sim = Simulation::new(&small_1d(51, 1e-9, Method::DirectMc, 500)).unwrap();
    let r = sim.run_direct_mc(1e-9, 500, 1).unwrap();
    assert_eq!((r.p_hat, r.hits, r.std), (1.0, 500, 0.0));
    let r = sim.run_direct_mc(1e9, 500, 1).unwrap();
    assert_eq!((r.p_hat, r.hits), (0.0, 0));
    assert!(r.rel_err.is_infinite());
    let flagged = r.with_reference_probability(0.01);
    assert!(flagged.zero_hit_convention);
    assert!((flagged.rel_err - 99f64.sqrt()).abs() < 1e-12);
}

#[test]
fn direct_mc_std_is_binomial() {
    let sim = Simulation::new(&small_1d(101, 2.0, Method::DirectMc, 4000)).unwrap();
    let r = sim.run_direct_mc(2.0, 4000, 11).unwrap();
    assert!(r.p_hat > 0.0 && r.p_hat < 1.0);
    assert!((r.std - (r.p_hat * (1.0 - r.p_hat)).sqrt()).abs() < 1e-12);
    assert!((r.rel_err - r.std / r.p_hat).abs() < 1e-15);
    assert_eq!(r.hits as f64 / 4000.0, r.p_hat);
}

#[test]
fn is_and_mc_agree_at_moderate_threshold() {
    let cfg = small_1d(101, 2.0, Method::DirectMc, 20_000);
    let sim = Simulation::new(&cfg).unwrap();
    let mc = sim.run_direct_mc(2.0, 20_000, 1).unwrap();
    let is =
        sim.run_importance_sampling_for(2.0, &LevelOptions::default(), SigmaMode::ReciprocalLevel, 20_000, 2).unwrap();
    let se = (mc.std.powi(2) / 20_000.0 + is.std.powi(2) / 20_000.0).sqrt();
    assert!((mc.p_hat - is.p_hat).abs() <= 3.0 * se, "mc {} is {} se {se}", mc.p_hat, is.p_hat);
}

#[test]
fn run_is_deterministic_across_workers() {
    let base = small_1d(101, 4.0, Method::ImportanceSampling, 3000);
    let one = run(&EstimatorConfig { workers: Some(1), ..base.clone() }).unwrap();
    let three = run(&EstimatorConfig { workers: Some(3), ..base.clone() }).unwrap();
    assert_eq!(one.csv_row(false), three.csv_row(false));
    assert_eq!(one.p_hat.to_bits(), three.p_hat.to_bits());
    let mc = EstimatorConfig { method: Method::DirectMc, threshold: 2.0, ..base };
    let a = run(&EstimatorConfig { workers: Some(2), ..mc.clone() }).unwrap();
    let b = run(&EstimatorConfig { workers: Some(1), ..mc }).unwrap();
    assert_eq!(a.csv_row(false), b.csv_row(false));
}

#[test]
fn invalid_configs_name_the_key() {
    let bad = |cfg: EstimatorConfig, key: &str| match run(&cfg) {
        Err(Error::InvalidConfig { key: k, .. }) => assert_eq!(k, key),
        other => panic!("expected error on {key}, got {other:?}"),
    };
    bad(small_1d(51, 0.0, Method::DirectMc, 10), "b");
    bad(small_1d(51, 2.0, Method::DirectMc, 0), "samples");
    bad(
        EstimatorConfig {
            model: CovarianceModel::squared_exponential(-1.0),
            ..small_1d(51, 2.0, Method::DirectMc, 10)
        },
        "R",
    );
    bad(EstimatorConfig { sigma_mode: SigmaMode::Constant(0.0), ..small_1d(51, 2.0, Method::DirectMc, 10) }, "sigma");
}

#[test]
fn method_names_round_trip() {
    for m in [Method::DirectMc, Method::ImportanceSampling] {
        assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
    }
    assert!("foo".parse::<Method>().is_err());
}

#[test]
fn csv_row_layout() {
    let r = EstimatorResult {
        method: Method::ImportanceSampling,
        b: 4.0,
        p_hat: 0.0302,
        std: 0.075,
        rel_err: 2.5,
        n: 100,
        hits: 7,
        discarded: 0,
        seed: 7,
        wall_time_s: 1.23456,
        zero_hit_convention: false,
    };
    assert_eq!(r.csv_row(false), "is,4e0,3.02e-2,7.5e-2,2.5e0,100,7,0,7,");
    assert_eq!(r.csv_row(true), "is,4e0,3.02e-2,7.5e-2,2.5e0,100,7,0,7,1.235");
    assert_eq!(EstimatorResult::CSV_HEADER.split(',').count(), r.csv_row(false).split(',').count());
}

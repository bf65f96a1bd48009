use friending_cli::{run_experiment, Experiment, ExperimentConfig, Status};
use friending_core::{preferential_attachment, SocialGraph};

// s=0, a=1, b=2, t=3 plus a–t: p_max = 3/4, f({t}) = 1/2
fn augmented() -> SocialGraph {
    SocialGraph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (1, 3)]).unwrap()
}

#[test]
fn sweep_is_non_decreasing_on_average() {
    let g = augmented();
    let ls = [10u64, 100, 1000];
    let mut sums = [0.0; 3];
    for seed in 0..50 {
        let config = ExperimentConfig {
            experiment: Experiment::RealizationSweep,
            pairs: Some(vec![(0, 3)]),
            alpha: 0.9,
            epsilon: 0.09,
            sweep_ls: ls.to_vec(),
            eval_samples: 20_000,
            seed,
            ..ExperimentConfig::default()
        };
        let run = run_experiment(&g, &config).unwrap();
        let rows: Vec<_> = run.rows().collect();
        assert_eq!(rows.len(), 3);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.l, Some(ls[i]));
            if row.status == Some(Status::Ok) {
                sums[i] += row.f_raf.unwrap();
            }
        }
    }
    let means = sums.map(|s| s / 50.0);
    assert!(means[0] <= means[1] + 1e-3 && means[1] <= means[2] + 1e-3, "{means:?}");
    // with enough realizations the cover needs b as well
    assert!((means[2] - 0.75).abs() < 0.02, "{means:?}");
}

#[test]
fn vmax_is_never_smaller_than_raf() {
    let g = preferential_attachment(60, 2, 3).unwrap();
    let config = ExperimentConfig {
        experiment: Experiment::VmaxRatio,
        pair_count: 6,
        alpha: 0.3,
        epsilon: 0.03,
        l_override: Some(5_000),
        eval_samples: 2_000,
        seed: 8,
        ..ExperimentConfig::default()
    };
    let run = run_experiment(&g, &config).unwrap();
    assert_eq!(run.rows().count(), 6);
    for row in run.rows() {
        assert_eq!(row.status, Some(Status::Ok));
        assert!(row.ratio_vmax.unwrap() >= 1.0, "{row:?}");
    }
}

#[test]
fn match_experiments_report_ratios() {
    let g = preferential_attachment(200, 3, 9).unwrap();
    for experiment in [Experiment::MatchHd, Experiment::MatchSp, Experiment::FixedBudget] {
        let config = ExperimentConfig {
            experiment,
            pair_count: 3,
            alpha: 0.3,
            epsilon: 0.03,
            l_override: Some(5_000),
            eval_samples: 5_000,
            seed: 2,
            ..ExperimentConfig::default()
        };
        let run = run_experiment(&g, &config).unwrap();
        for row in run.rows().filter(|r| r.status == Some(Status::Ok)) {
            let k = row.size_raf.unwrap();
            assert!(k >= 1);
            match experiment {
                Experiment::MatchHd => {
                    assert!(row.ratio_hd.unwrap() > 0.0 && row.reached_hd.is_some() && row.f_ratio_hd.is_some());
                }
                Experiment::MatchSp => {
                    assert!(row.ratio_sp.unwrap() > 0.0 && row.reached_sp.is_some() && row.f_ratio_sp.is_some());
                }
                _ => {
                    assert_eq!(row.size_hd, Some(k));
                    assert_eq!(row.size_sp, Some(k));
                }
            }
        }
    }
}

#[test]
fn bad_config_is_rejected() {
    let g = augmented();
    let config = ExperimentConfig { pmax_floor: 0.0, ..ExperimentConfig::default() };
    assert!(run_experiment(&g, &config).is_err());
    let config = ExperimentConfig { alpha: 0.1, epsilon: 0.2, ..ExperimentConfig::default() };
    assert!(run_experiment(&g, &config).is_err());
}

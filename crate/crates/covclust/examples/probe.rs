use covclust::eval::{run_experiment, Algorithm, DatasetProtocol, ExperimentConfig, Variant};
use covclust::generators::{preset_params, Family};
use covclust::{DissimConfig, WindowRule};

fn main() {
    // AR offline data: offline vs online algorithm, plain vs log*, log10-ish m
    for t in [5usize, 20, 50] {
        let n = 5 * t;
        let m = (((n as f64).log10()).floor() as usize).max(1);
        let rule = WindowRule::Fixed(m);
        let plain = DissimConfig { window_rule: rule, ..DissimConfig::covariance_only() };
        let logstar = plain.with_log_star(true);
        let ecfg = ExperimentConfig {
            family: Family::Ar1,
            params: preset_params(Family::Ar1),
            per_group: 10,
            protocol: DatasetProtocol::Offline,
            t_values: vec![t],
            runs: 30,
            master_seed: 12345,
            variants: vec![
                Variant::new(Algorithm::Offline, plain),
                Variant::new(Algorithm::Online, plain),
                Variant::new(Algorithm::Offline, logstar),
                Variant::new(Algorithm::Online, logstar),
            ],
        };
        let reports = run_experiment(&ecfg).unwrap();
        println!(
            "ar1 t={t:2}: off-plain {:.3} on-plain {:.3} off-log {:.3} on-log {:.3}",
            reports[0].rows[0].mean,
            reports[1].rows[0].mean,
            reports[2].rows[0].mean,
            reports[3].rows[0].mean
        );
    }
}

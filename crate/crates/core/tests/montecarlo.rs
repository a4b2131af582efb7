use levy_localtime::localtime::{mean_free, EndpointSpec};
use levy_localtime::montecarlo::{
    estimate_means, estimate_moments, ks_critical_99, ks_distance, local_time_profile,
    simulate_indexed_path, terminal_positions, McConfig, THREADS_ENV,
};
use levy_localtime::stable::{StableCdf, WalkModel};

fn zero_bin_fraction(l: f64, paths: u64) -> f64 {
    let m = WalkModel::new(l, 1.0).unwrap();
    let h = 0.02;
    let mut total = 0.0;
    for i in 0..paths {
        let path = simulate_indexed_path(1.0, 1000, 0.0, &m, 7, i).unwrap();
        let lo = path.positions.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = path
            .positions
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        let nb = ((hi - lo) / h).ceil().max(1.0) as usize;
        let edges: Vec<f64> = (0..=nb).map(|k| lo + k as f64 * h).collect();
        let prof = local_time_profile(&path, &edges).unwrap();
        total += prof.counts.iter().filter(|&&c| c == 0).count() as f64 / nb as f64;
    }
    total / paths as f64
}

#[test]
fn profiles_break_into_isolated_peaks_as_lambda_drops() {
    let f: Vec<f64> = [2.0, 1.5, 1.0]
        .iter()
        .map(|&l| zero_bin_fraction(l, 40))
        .collect();
    assert!(f[0] < f[1] && f[1] < f[2], "{f:?}");
}

#[test]
fn estimates_do_not_depend_on_thread_count() {
    let m = WalkModel::new(1.5, 1.0).unwrap();
    let cfg = McConfig::new(m, 1.0, 200, 3000, 99);
    let run = |threads: &str| {
        std::env::set_var(THREADS_ENV, threads);
        let means = estimate_means(&cfg, &[0.0, 0.7]).unwrap();
        let second = estimate_moments(&cfg, 2, &[0.0, 0.3]).unwrap();
        std::env::remove_var(THREADS_ENV);
        (means, second)
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(one, four);
}

#[test]
fn mean_free_within_three_sigma() {
    // away from the start the discretization bias is well below the noise
    let m = WalkModel::new(1.5, 1.0).unwrap();
    let mut cfg = McConfig::new(m, 1.0, 1000, 20_000, 3);
    cfg.bin_width = Some(0.04);
    let est = estimate_means(&cfg, &[1.0]).unwrap();
    let exact = mean_free(1.0, 0.0, 1.0, &m).unwrap();
    assert!(est[0].within(exact, 3.0), "{:?} vs {exact}", est[0]);
}

#[test]
fn terminal_positions_follow_stable_law() {
    for l in [1.0, 1.3, 2.0] {
        let m = WalkModel::new(l, 1.0).unwrap();
        let cfg = McConfig::new(m, 1.0, 10, 20_000, 11);
        let mut x = terminal_positions(&cfg).unwrap();
        let cdf = StableCdf::new(1.0, &m).unwrap();
        let d = ks_distance(&mut x, |v| cdf.cdf(v));
        assert!(d < ks_critical_99(x.len()), "lambda {l}: {d}");
    }
}

#[test]
fn bridge_ensemble_needs_epsilon_below_two() {
    let m = WalkModel::new(1.5, 1.0).unwrap();
    let mut cfg = McConfig::new(m, 1.0, 100, 2000, 1);
    cfg.endpoint = EndpointSpec::Fixed(0.0);
    assert!(estimate_means(&cfg, &[0.0]).is_err());
    cfg.epsilon = Some(cfg.default_epsilon());
    assert!(estimate_means(&cfg, &[0.0]).is_ok());
}

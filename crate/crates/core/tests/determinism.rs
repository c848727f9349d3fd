use mrls::harness::{run_rounds, run_tracking, RunConfig};

fn small() -> RunConfig {
    let mut c = RunConfig::standard();
    c.set_taps(8).unwrap();
    c.n_samples = 500;
    c.rounds = 6;
    c
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let c = small();
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let four = rayon::ThreadPoolBuilder::new()
        .num_threads(4)
        .build()
        .unwrap();
    let a = one.install(|| run_tracking(&c)).unwrap();
    let b = four.install(|| run_tracking(&c)).unwrap();
    assert_eq!(a.mse_rls, b.mse_rls);
    assert_eq!(a.mse_mrls, b.mse_mrls);
    assert_eq!(a.lopt_bar, b.lopt_bar);
}

#[test]
fn zero_uncertainty_matches_plain_tracking() {
    let c = small();
    let mut u = c.clone();
    u.noise_uncertainty = 0.0;
    assert_eq!(
        run_tracking(&c).unwrap().mse_mrls,
        run_rounds(&u, None).unwrap().mse_mrls
    );
}

#[test]
fn paired_filters_see_the_same_stream() {
    // With one layer m-RLS is RLS, so paired runs must agree exactly.
    let mut c = small();
    c.filter.layers_max = 1;
    let s = run_tracking(&c).unwrap();
    assert_eq!(s.mse_rls, s.mse_mrls);
}

#[test]
fn noiseless_frozen_channel_converges() {
    let mut c = small();
    c.channel.coherence = f64::INFINITY;
    c.channel.noise_variance = 0.0;
    c.filter.noise_variance = 0.0;
    c.n_samples = 1000;
    let s = run_tracking(&c).unwrap();
    assert!(s.mse_rls_db()[999] < -60.0, "{}", s.mse_rls_db()[999]);
    assert!(s.mse_mrls_db()[999] < -60.0, "{}", s.mse_mrls_db()[999]);
}

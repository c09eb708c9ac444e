mod sample_scenarios {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/sample_scenarios.rs"));
}

#[test]
fn sample_scenarios_runs() {
    sample_scenarios::run_example().expect("sample_scenarios example should run");
}

mod simulate_zone {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/simulate_zone.rs"));
}

#[test]
fn simulate_zone_runs() {
    simulate_zone::run_example().expect("simulate_zone example should run");
}

mod gp_posterior {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/gp_posterior.rs"));
}

#[test]
fn gp_posterior_runs() {
    gp_posterior::run_example().expect("gp_posterior example should run");
}

mod rectangle_probability {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/rectangle_probability.rs"));
}

#[test]
fn rectangle_probability_runs() {
    rectangle_probability::run_example().expect("rectangle_probability example should run");
}

mod confidence_intervals {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/confidence_intervals.rs"));
}

#[test]
fn confidence_intervals_runs() {
    confidence_intervals::run_example().expect("confidence_intervals example should run");
}

mod decision_rule {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/decision_rule.rs"));
}

#[test]
fn decision_rule_runs() {
    decision_rule::run_example().expect("decision_rule example should run");
}

mod brute_force {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/brute_force.rs"));
}

#[test]
fn brute_force_runs() {
    brute_force::run_example().expect("brute_force example should run");
}

mod proxy_process {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/proxy_process.rs"));
}

#[test]
fn proxy_process_runs() {
    proxy_process::run_example().expect("proxy_process example should run");
}

mod precision_sweep {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/precision_sweep.rs"));
}

#[test]
fn precision_sweep_runs() {
    precision_sweep::run_example().expect("precision_sweep example should run");
}

mod cdf_timing {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/cdf_timing.rs"));
}

#[test]
fn cdf_timing_runs() {
    cdf_timing::run_example().expect("cdf_timing example should run");
}

mod compare_processes {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/compare_processes.rs"));
}

#[test]
fn compare_processes_runs() {
    compare_processes::run_example().expect("compare_processes example should run");
}

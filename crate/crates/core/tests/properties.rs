use proptest::prelude::*;

use brt_sched::demand::{disturbance_at, sample_cmf, DemandStream};
use brt_sched::solver::{OracleSolution, DEFAULT_NODE_BUDGET};
use brt_sched::verify::tiny_instance;
use brt_sched::{
    bus_stage_cost, dp_lookahead, exhaustive_oracle, feasible_controls, transition, BusState,
    DiscreteCmf, Scenario, SolverConfig, TieBreak,
};

/// Walks the default scenario with arbitrary feasible controls and real
/// disturbances, returning every visited state.
fn random_walk(choices: &[u8], seed: u64) -> Vec<BusState> {
    let sc = Scenario::default();
    let stream = DemandStream::new(seed);
    let mut s = BusState::at_depot(&sc.network, sc.params.bus_capacity);
    let mut out = vec![s.clone()];
    for &c in choices {
        if sc.network.is_home(s.position) || s.clock >= sc.horizon() {
            break;
        }
        let set = feasible_controls(&s, &sc).unwrap();
        let u = set.speeds()[c as usize % set.speeds().len()];
        let d = disturbance_at(s.clock, &s, &sc.demand, &sc.network, &stream);
        s = transition(&s, u, &d.disturbance, &sc).unwrap();
        out.push(s.clone());
    }
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn reachable_states_stay_on_the_grids(choices in prop::collection::vec(any::<u8>(), 1..600), seed in any::<u64>()) {
        let sc = Scenario::default();
        let states = random_walk(&choices, seed);
        for w in states.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            prop_assert!((b.speed - a.speed).abs() <= sc.params.lambda + 1e-12);
            prop_assert!(sc.params.is_grid_speed(b.speed));
            let steps = b.position / (sc.params.traffic_factor * sc.params.speed_step);
            prop_assert_eq!(steps, steps.round());
            prop_assert_eq!(b.capacity_free + b.onboard, sc.params.bus_capacity);
            prop_assert!(b.recent_stop >= a.recent_stop && b.recent_stop <= a.recent_stop + 1);
        }
        for s in &states {
            let set = feasible_controls(s, &sc).unwrap();
            prop_assert!(!set.speeds().is_empty());
            prop_assert!(set.speeds().iter().all(|&u| u >= 0.0 && u <= sc.params.max_speed));
        }
    }

    #[test]
    fn windows_are_entered_at_crawl_speed(choices in prop::collection::vec(any::<u8>(), 1..600), seed in any::<u64>()) {
        let sc = Scenario::default();
        for w in random_walk(&choices, seed).windows(2) {
            let target = w[0].recent_stop + 1;
            let window = sc.network.route_window(target);
            if !window.contains(w[0].position) && window.contains(w[1].position) {
                prop_assert_eq!(w[1].speed, sc.params.lambda);
            }
        }
    }

    #[test]
    fn stage_cost_is_affine_in_each_queue(queues in prop::array::uniform4(0u32..50), m in 0usize..4, k in 0u32..570) {
        let sc = Scenario::default();
        let mut s = BusState::<u32>::at_depot(&sc.network, 40);
        s.position = 700.0;
        s.speed = 1.5;
        s.queues = queues.to_vec();
        let base = bus_stage_cost(&s, k, &sc);
        s.queues[m] += 1;
        let bumped = bus_stage_cost(&s, k, &sc);
        prop_assert!((bumped.total - base.total - sc.params.weights.queue).abs() < 1e-9);
        prop_assert!(base.speed_term >= 0.0 && base.queue_term >= 0.0);
    }

    #[test]
    fn inverse_cmf_sampling_is_monotone(a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let cmf = DiscreteCmf::default_arrivals();
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(sample_cmf(&cmf, lo) <= sample_cmf(&cmf, hi));
        prop_assert!((1..=5).contains(&sample_cmf(&cmf, a)));
    }
}

fn solve(sc: &Scenario) -> OracleSolution {
    let start = BusState::<u32>::at_depot(&sc.network, sc.params.bus_capacity);
    exhaustive_oracle(&start, &SolverConfig::for_scenario(1, sc), sc, DEFAULT_NODE_BUDGET).unwrap()
}

#[test]
fn scaling_the_weights_scales_the_optimum() {
    for seed in 0..6 {
        let sc = tiny_instance(seed);
        let mut doubled = sc.clone();
        doubled.params.weights = sc.params.weights.scaled(2.0);
        let a = solve(&sc);
        let b = solve(&doubled);
        assert_eq!(a.actions, b.actions);
        assert_eq!(b.cost, 2.0 * a.cost);
    }
}

#[test]
fn planner_is_deterministic() {
    let sc = Scenario::default();
    let s = &random_walk(&[1, 2, 2, 2, 2, 2, 1, 1], 4)[8];
    let cfg = SolverConfig::for_scenario(6, &sc);
    let a = dp_lookahead(s, &cfg, &sc).unwrap();
    let b = dp_lookahead(s, &cfg, &sc).unwrap();
    assert_eq!((a.chosen_speed, a.predicted_cost, a.expanded_nodes), (b.chosen_speed, b.predicted_cost, b.expanded_nodes));
}

#[test]
fn hold_speed_tie_break_only_changes_ties() {
    for seed in 0..5 {
        let sc = tiny_instance(seed);
        let start = BusState::<u32>::at_depot(&sc.network, sc.params.bus_capacity);
        let mut cfg = SolverConfig::for_scenario(sc.horizon(), &sc);
        let lower = dp_lookahead(&start, &cfg, &sc).unwrap();
        cfg.tie_break = TieBreak::HoldSpeed;
        let hold = dp_lookahead(&start, &cfg, &sc).unwrap();
        let oracle = exhaustive_oracle(&start, &cfg, &sc, DEFAULT_NODE_BUDGET).unwrap();
        assert_eq!(lower.predicted_cost, hold.predicted_cost);
        assert_eq!(oracle.actions[0], hold.chosen_speed);
    }
}

#[test]
fn queue_only_weights_never_leave_early() {
    let mut sc = tiny_instance(3);
    sc.params.weights.schedule = 0.0;
    sc.params.weights.speed = 0.0;
    let sol = solve(&sc);
    // replay the oracle's speeds and check every departure against the timetable
    let mut s = BusState::<f64>::at_depot(&sc.network, sc.params.bus_capacity);
    for &u in &sol.actions {
        if s.speed == 0.0 && u > 0.0 {
            assert!(s.clock >= sc.timetable.departure(s.recent_stop));
        }
        let d = brt_sched::demand::expected_disturbance(s.clock, &s, &sc.demand, brt_sched::ExpectationMode::ClosedForm);
        s = transition(&s, u, &d, &sc).unwrap();
    }
}

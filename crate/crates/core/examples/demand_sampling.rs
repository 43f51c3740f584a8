//! Draw passenger arrivals and alightings from the keyed streams and compare
//! the empirical distribution with the configured one.

use brt_sched::demand::{expected_arrivals, sample_cmf, DemandStream};
use brt_sched::Scenario;

fn main() {
    let scenario = Scenario::default();
    let demand = &scenario.demand;
    let stream = DemandStream::new(2024);

    let n = 50_000u32;
    let mut counts = [0u32; 5];
    for k in 0..n {
        counts[sample_cmf(&demand.arrival_cmfs[0], stream.arrival_uniform(1, k)) as usize - 1] += 1;
    }
    let pmf = demand.arrival_cmfs[0].pmf();
    for (g, (c, p)) in counts.iter().zip(&pmf).enumerate() {
        println!("G = {}: empirical {:.4}, model {p:.4}", g + 1, f64::from(*c) / f64::from(n));
    }
    println!("expected arrivals per stop at k = 60: {:?}", expected_arrivals(demand, 60));
    println!("expected arrivals per stop at k = 61: {:?}", expected_arrivals(demand, 61));

    // the same key always yields the same draw
    let again = DemandStream::new(2024);
    assert_eq!(stream.arrivals(demand, 120), again.arrivals(demand, 120));
    println!("arrivals at k = 120: {:?}", stream.arrivals(demand, 120));
    for stop in 1..=4 {
        println!("raw alighting demand at stop {stop}: {}", stream.raw_alight(demand, stop));
    }
}

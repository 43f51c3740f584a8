use super::TraceRow;

/// Passenger-seconds waited at queue stop `m` (1-based) for this bus: the
/// queue-length series summed in one-second rectangles up to the step where
/// the bus leaves or passes stop `m`. Later arrivals wait for the next bus
/// and are not counted.
pub fn waiting_area(trace: &[TraceRow], m: usize) -> f64 {
    let served = trace
        .iter()
        .position(|r| r.recent_stop >= m && r.speed > 0.0)
        .unwrap_or(trace.len());
    queue_area(&trace[..served], m)
}

/// Queue-length series at stop `m` summed over the whole trace.
pub fn queue_area(trace: &[TraceRow], m: usize) -> f64 {
    trace
        .iter()
        .map(|r| r.queues.get(m - 1).copied().map_or(0.0, f64::from))
        .sum()
}

/// Arithmetic mean; 0 for an empty sequence.
pub fn mean(values: impl IntoIterator<Item = f64>) -> f64 {
    let (sum, n) = values.into_iter().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

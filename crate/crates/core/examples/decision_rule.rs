// Which predictions the proxy keeps, and how a kept prediction becomes a record.

use zonecert::certify::{draw_prediction, DecisionThresholds};
use zonecert::rng::{stream, Domain};

pub fn run_example() -> zonecert::Result<()> {
    let thresholds = DecisionThresholds::default();
    for (id, p) in [0.001, 0.2, 0.5, 0.985, 0.995].into_iter().enumerate() {
        let mut rng = stream(5, Domain::Decision, id as u64);
        match draw_prediction(p, &thresholds, id as u64, &mut rng) {
            Some(r) => println!("p={p}: kept, w={} q={:.3}", r.w, r.q),
            None => println!("p={p}: simulate"),
        }
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

// Classic score interval versus the interval that accounts for predicted outcomes.

use zonecert::certify::{classic_interval, clt_summary, uncertainty_interval, OutcomeRecord};

pub fn run_example() -> zonecert::Result<()> {
    let w: Vec<bool> = (0..100).map(|i| i % 2 == 0).collect();
    let ci = classic_interval(&w, 0.05)?;
    println!("50/100 safe: [{:.4}, {:.4}]", ci.p_min, ci.p_max);

    // 900 simulated outcomes and 9100 confident predictions.
    let mut records: Vec<OutcomeRecord> = (0..900).map(|i| OutcomeRecord::simulated(i % 10 != 0, i)).collect();
    for i in 0..9100u64 {
        let w = i % 100 != 0;
        records.push(OutcomeRecord { w, q: 0.995, simulated: false, scenario_id: 900 + i });
    }
    let s = clt_summary(&records)?;
    let aware = uncertainty_interval(&s, 0.05)?;
    let naive: Vec<bool> = records.iter().map(|r| r.w).collect();
    let naive = classic_interval(&naive, 0.05)?;
    println!("Z={:.4} v={:.1} sigma2={:.2e}", s.z_bar, s.v, s.sigma_sq);
    println!("uncertainty-aware: [{:.4}, {:.4}]", aware.p_min, aware.p_max);
    println!("treating predictions as truth: [{:.4}, {:.4}]", naive.p_min, naive.p_max);
    Ok(())
}

#[allow(dead_code)]
fn main() -> zonecert::Result<()> {
    run_example()
}

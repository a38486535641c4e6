//! Prints the candidate stripe-direction table for a few search radii.
//!
//! Every candidate is a primitive pixel offset (a, b); its angle is
//! measured from the upward vertical, mod 180 degrees. The table shows
//! how the angular resolution tightens as the radius grows, and where
//! the widest gaps remain.
//!
//! Run with: cargo run --example candidate_table

use obds::orientation::enumerate_candidates;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for r in [1u32, 2, 9] {
        let candidates = enumerate_candidates(r)?;
        println!("radius {r}: {} candidate directions", candidates.len());
        for pair in candidates.windows(2) {
            let (a, b) = pair[0].offsets();
            let gap = pair[1].theta_deg() - pair[0].theta_deg();
            println!(
                "  ({a:>2},{b:>2})  {:>7.3} deg   gap to next {:>6.3} deg",
                pair[0].theta_deg(),
                gap
            );
        }
        if let Some(last) = candidates.last() {
            let (a, b) = last.offsets();
            let wrap = 180.0 - last.theta_deg();
            println!(
                "  ({a:>2},{b:>2})  {:>7.3} deg   gap to next {wrap:>6.3} deg (wraps to 0)",
                last.theta_deg()
            );
        }

        let widest = candidates
            .windows(2)
            .map(|p| p[1].theta_deg() - p[0].theta_deg())
            .fold(0.0f64, f64::max);
        println!("  widest interior gap: {widest:.3} deg\n");
    }
    Ok(())
}

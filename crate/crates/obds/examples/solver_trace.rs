//! Looks inside one solver run: objective, residuals, stopping.
//!
//! The decomposition is solved by an alternating scheme whose health is
//! visible in three feasibility residuals (gradient split, oriented
//! split, sparsity split) plus the relative change between consecutive
//! images. This prints a condensed trace, then the direction-adapted
//! weight table that `SolverParams::recommended` applies: axis-aligned
//! and short offsets repeat few distinct lines, so their operators have
//! smooth null functions that let scene content leak into the stripe
//! layer unless the oriented weight is strong; long offsets wrap quickly
//! and tolerate a gentle weight.
//!
//! Run with: cargo run --release --example solver_trace

use obds::guided::BackgroundParams;
use obds::orientation::{enumerate_candidates, estimate_orientation, DEFAULT_CANDIDATE_RADIUS};
use obds::simulator::{
    add_stripes, make_oblique, procedural_base, StripeAxis, StripeKind, StripeSpec,
};
use obds::solver::{destripe, SolverParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let base = procedural_base(200, 200, 0)?;
    let spec = StripeSpec {
        kind: StripeKind::Random { coverage: 0.8 },
        axis: StripeAxis::Vertical,
        amplitude: 0.1,
        seed: 1,
    };
    let (degraded, _) = add_stripes(&base, &spec)?;
    let (y, _) = make_oblique(&degraded, &base, 21.0)?;

    let est = estimate_orientation(&y, DEFAULT_CANDIDATE_RADIUS, &BackgroundParams::default())?;
    let params = SolverParams::recommended(est.direction);
    let result = destripe(&y, &params)?;

    println!(
        "direction ({},{}) at {:.2} deg, {} iterations, converged: {}\n",
        est.direction.offsets().0,
        est.direction.offsets().1,
        est.direction.theta_deg(),
        result.iterations,
        result.converged
    );
    println!("   k   rel_change   objective    res_grad  res_orient  res_sparse");
    let total = result.trace.len();
    for stats in result
        .trace
        .iter()
        .filter(|s| s.k <= 5 || s.k % 25 == 0 || s.k == total)
    {
        println!(
            "  {:>3}   {:>9.3e}   {:>9.4}   {:>9.3e}   {:>9.3e}   {:>9.3e}",
            stats.k,
            stats.rel_change,
            stats.objective,
            stats.res_grad,
            stats.res_oriented,
            stats.res_sparsity
        );
    }

    println!("\nrecommended weights by candidate direction (radius 2):");
    println!("  offset     angle    lambda1  lambda2");
    for c in enumerate_candidates(2)? {
        let p = SolverParams::recommended(c);
        let (a, b) = c.offsets();
        println!(
            "  ({a:>2},{b:>2})   {:>7.2}   {:>5.1}    {:.3}",
            c.theta_deg(),
            p.lambda1,
            p.lambda2
        );
    }
    Ok(())
}

//! Local component counts `k_X` at tangent directions, and the reducedness
//! estimate over a spread of cone directions.
//!
//! ```text
//! cargo run --release --example reducedness -- cusp
//! ```

use lipcone::cone::{directions, kx_estimate, reducedness_report};
use lipcone::corpus;

fn main() -> lipcone::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "cusp".into());
    let entry = corpus::get(&name)?;
    let germ = entry.germ()?;
    let params = entry.kx_params();

    for d in &entry.simple_directions {
        let est = kx_estimate(&germ, d, &params, 42)?;
        println!(
            "direction {d:?}: k = {} (stable: {}; halved/doubled eps give {} / {})",
            est.k, est.stable, est.halved.k, est.doubled.k
        );
    }

    let cloud = directions(&germ, &entry.directions.scales, entry.directions.n, 42)?;
    let report = reducedness_report(&germ, &cloud, 6, &params, 42);
    println!(
        "reduced estimate over {} directions: {} ({} unstable, {} failed)",
        report.per_direction.len(),
        report.reduced_estimate,
        report.unstable.len(),
        report.failed.len()
    );
    Ok(())
}

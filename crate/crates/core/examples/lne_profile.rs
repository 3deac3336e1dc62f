//! Per-scale LNE constants of a corpus germ and the fitted divergence exponent.
//!
//! ```text
//! cargo run --release --example lne_profile -- cusp
//! ```

use lipcone::corpus;
use lipcone::metric::lne_profile;

fn main() -> lipcone::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "cusp".into());
    let entry = corpus::get(&name)?;
    let germ = entry.germ()?;
    let config = entry.profile_config(42)?;
    let report = lne_profile(&germ, &config)?;

    println!("{name}: {} scales, n = {}", report.scales.len(), config.samples);
    for r in &report.per_scale {
        let w = r.worst.expect("kept scales have a worst pair");
        println!(
            "  t = {:<8.4} lambda = {:<8.3} inner = {:.3e} outer = {:.3e} ({} vertices)",
            r.t, r.lambda, w.inner, w.outer, r.vertices
        );
    }
    for d in &report.dropped {
        println!("  dropped t = {}: {}", d.t, d.reason);
    }
    if let Some(fit) = report.exponent_fit {
        println!("  slope = {:.3}, r^2 = {:.3}", fit.slope, fit.r_squared);
    }
    println!("  verdict: {}", report.verdict.as_str());
    Ok(())
}

//! Numeric and symbolic tangent cones of a corpus germ, plus an LNE probe of
//! the cone itself.
//!
//! ```text
//! cargo run --release --example tangent_cone -- double-spheres
//! ```

use lipcone::cone::{cone_from_directions, cone_germ, directions, germ_symbolic_cone, linear_ray_scales};
use lipcone::corpus;
use lipcone::metric::lne_profile;

fn main() -> lipcone::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "double-spheres".into());
    let entry = corpus::get(&name)?;
    let germ = entry.germ()?;

    match germ_symbolic_cone(&germ) {
        Ok(c) => {
            for (form, sf) in c.display.iter().zip(&c.squarefree) {
                println!("initial form: {form}  (squarefree: {sf:?})");
            }
        }
        Err(e) => println!("no symbolic cone: {e}"),
    }

    let cloud = directions(&germ, &entry.directions.scales, entry.directions.n, 42)?;
    println!(
        "{} directions pooled from t = {:?}; nearest-neighbour spacing median {:.3e}",
        cloud.directions.len(),
        cloud.pooled_scales,
        cloud.dispersion.nn_median
    );
    let cone = cone_germ(&germ)?;
    let worst = cloud
        .directions
        .iter()
        .map(|v| cone.residual(v))
        .fold(0.0, f64::max);
    println!("largest initial-form residual over the cloud: {worst:.2e}");

    let model = cone_from_directions(&cloud, &linear_ray_scales(1.0, 40))?;
    let est = model.lne_estimate(4.0)?;
    println!("ray sample: {} points, lambda = {:.3}", model.sampled_rays.len(), est.lambda);

    if let Some(config) = entry.cone_probe_config(42)? {
        let report = lne_profile(&cone, &config)?;
        for (t, l) in report.scales.iter().zip(&report.lambda_per_scale) {
            println!("  cone probe t = {t:<8.4} lambda = {l:.3}");
        }
        if let Some(fit) = report.exponent_fit {
            println!("  slope = {:.3}, r^2 = {:.3}", fit.slope, fit.r_squared);
        }
        println!("  cone verdict: {}", report.verdict.as_str());
    }
    Ok(())
}

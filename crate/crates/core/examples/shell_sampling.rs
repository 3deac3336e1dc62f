//! Sample the sphere-slices `X ∩ S(0, t)` of a germ at shrinking radii and
//! report how well the points sit on the set.
//!
//! ```text
//! cargo run --release --example shell_sampling -- ice-cream
//! ```

use lipcone::corpus;
use lipcone::variety::ShellSampler;

fn main() -> lipcone::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "ice-cream".into());
    let germ = corpus::get(&name)?.germ()?;
    let sampler = ShellSampler::new(&germ)?;
    println!("{name}: ambient R^{}, {} branch(es)", germ.dim(), germ.branches.len());
    for t in [0.1, 0.01, 1e-3, 1e-4] {
        let shell = sampler.shell(t, 256, 42)?;
        let worst = shell.residuals.iter().copied().fold(0.0, f64::max);
        println!(
            "  t = {t:<7} points {:>4}/{:<4} acceptance {:.2}  max residual {worst:.1e}{}",
            shell.points.len(),
            shell.candidates,
            shell.acceptance_rate,
            if shell.is_thin() { "  (thin)" } else { "" }
        );
    }
    Ok(())
}

//! Inner/outer tables for the corpus witness curve pairs.
//!
//! ```text
//! cargo run --release --example witness_pairs -- double-spheres
//! ```

use lipcone::cone::cone_germ;
use lipcone::corpus::{self, Host};
use lipcone::witness::{witness_exponent, witness_table};

fn main() -> lipcone::Result<()> {
    let name = std::env::args().nth(1).unwrap_or_else(|| "double-spheres".into());
    let entry = corpus::get(&name)?;
    let germ = entry.germ()?;
    for w in &entry.witnesses {
        let host = match w.host {
            Host::Set => germ.clone(),
            Host::Cone => cone_germ(&germ)?,
        };
        let (alpha, beta) = w.curves()?;
        let table = witness_table(&host, &alpha, &beta, &w.grid()?, &w.config(42))?;
        println!("{name} / {}", w.name);
        println!("  {:>8} {:>12} {:>12} {:>10}", "s", "outer", "inner_est", "ratio");
        for r in &table.rows {
            println!("  {:>8.4} {:>12.5e} {:>12.5e} {:>10.3}", r.s, r.outer, r.inner_est, r.ratio);
        }
        let fit = witness_exponent(&table)?;
        println!("  slope = {:.3}, r^2 = {:.3}", fit.slope, fit.r_squared);
    }
    Ok(())
}

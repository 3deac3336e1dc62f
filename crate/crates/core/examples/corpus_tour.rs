//! List the built-in corpus with expected verdicts and symbolic cones.
//!
//! ```text
//! cargo run --example corpus_tour
//! ```

use lipcone::cone::germ_symbolic_cone;
use lipcone::corpus;

fn main() -> lipcone::Result<()> {
    println!("corpus {}", corpus::VERSION);
    for entry in corpus::all()? {
        let germ = entry.germ()?;
        let cone = match germ_symbolic_cone(&germ) {
            Ok(c) => c.display.join(", "),
            Err(e) => format!("({e})"),
        };
        println!("{:<15} R^{:<2} LNE {:?}, cone LNE {:?}, reduced {:?}", entry.name, germ.dim(),
            entry.expected.lne, entry.expected.cone_lne, entry.expected.reduced);
        println!("{:15} cone: {cone}", "");
        println!("{:15} {}", "", entry.description);
        if !entry.tags.is_empty() {
            println!("{:15} tags: {}", "", entry.tags.join(", "));
        }
    }
    Ok(())
}

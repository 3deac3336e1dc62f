//! Parse expressions, expand them to exact polynomials and read off initial
//! forms and the squarefree test.
//!
//! ```text
//! cargo run --example initial_forms -- "x^3 - y^2" "y*(x^2 + (y - z^2)^2 - z^4)"
//! ```

use lipcone::expr::{expand, is_squarefree, parse};

fn main() -> lipcone::Result<()> {
    let mut inputs: Vec<String> = std::env::args().skip(1).collect();
    if inputs.is_empty() {
        inputs = vec![
            "x^3 - y^2".into(),
            "(y + 2*z)*(y + 3*z)^2 + x^4".into(),
            "y^4 + z^4 + x^5".into(),
        ];
    }
    let vars: Vec<String> = ["x", "y", "z"].iter().map(|s| s.to_string()).collect();
    for text in &inputs {
        let p = expand(&parse(text, &vars)?, &vars)?;
        let init = p.initial_form()?;
        println!("f       = {p}");
        println!("  order = {}, degree = {}", p.order().unwrap_or(0), p.degree().unwrap_or(0));
        println!("  in(f) = {init}  squarefree: {:?}", is_squarefree(&init)?);
        let origin = vec![0.5; 3];
        println!("  f(1/2,1/2,1/2) = {}, grad = {:?}", p.eval(&origin)?, p.grad(&origin)?);
    }
    Ok(())
}

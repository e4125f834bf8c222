//! Parse an exact solution, differentiate it and print the manufactured
//! forcing `EI u_xxxx + ρ u_tt + c u_t`.
//!
//! cargo run --example parse_and_differentiate -- "exp(-t)*sin(pi*x)" 98 0.68 7.5

use compact_beam::expr::{manufacture_forcing, parse, Var};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let src = args.next().unwrap_or_else(|| "sin(pi*x)*cos(pi*t)".into());
    let mut num = |d: f64| -> Result<f64, Box<dyn std::error::Error>> {
        Ok(args.next().map(|s| s.parse()).transpose()?.unwrap_or(d))
    };
    let (ei, rho, c) = (num(98.0)?, num(0.685)?, num(0.75)?);

    let u = match parse(&src) {
        Ok(u) => u,
        Err(e) => {
            eprintln!("{src}\n{}^ {e}", " ".repeat(e.offset()));
            std::process::exit(1);
        }
    };
    println!("u        = {u}");
    println!("u_t      = {}", u.diff(Var::T));
    println!("u_tt     = {}", u.diff_n(Var::T, 2));
    println!("u_xx     = {}", u.diff_n(Var::X, 2));
    println!("u_xxxx   = {}", u.diff_n(Var::X, 4));
    let f = manufacture_forcing(&u, ei, rho, c);
    println!("f        = {f}");
    println!("size(f)  = {} nodes", f.size());
    println!("f(0.3, 0.6) = {:.16e}", f.eval(0.3, 0.6)?);
    Ok(())
}

//! Drive a run from a TOML description, the same way `compact-beam --config`
//! does, and print the CSV.
//!
//! cargo run --release --example run_config -- [path/to/run.toml]

use compact_beam::cli::{load_config, load_config_str, run_into, RunStatus};

const DEFAULT: &str = r#"
command = "converge"

[problem]
example = 2

[grid]
ladder = [16, 32, 64]
dt = "h2"
"#;

fn main() -> compact_beam::Result<()> {
    let config = match std::env::args().nth(1) {
        Some(path) => load_config(path.as_ref())?,
        None => load_config_str(DEFAULT)?,
    };
    let mut out = csv::Writer::from_writer(std::io::stdout());
    if let RunStatus::AssertionFailed(msg) = run_into(&config, &mut out)? {
        eprintln!("check failed: {msg}");
    }
    out.flush()?;
    Ok(())
}

//! The full bound pipeline for X₀(205, 1), printed criterion by criterion.
//!
//!     cargo run --example bound_205

use shimura_aut::arith::Level;
use shimura_aut::autbound::bound_pipeline;

fn main() -> shimura_aut::Result<()> {
    let report = bound_pipeline(&Level::new(205, 1)?)?;
    print!("{}", report.to_text());
    if let Some(e) = report.deciding_entry() {
        println!("decided by {}", e.criterion);
    }
    Ok(())
}

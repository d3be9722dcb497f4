//! Compare the Eichler class number formula with explicit enumeration of
//! ideal classes for every definite (disc, level) with disc·level up to a limit
//! (default 120).
//!
//!     cargo run --release --example class_numbers -- 300

use num_integer::Integer;
use shimura_aut::arith::{is_squarefree, prime_factors};
use shimura_aut::quaternion::IdealClassSet;
use shimura_aut::shimura::eichler_class_number;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let limit: u64 = std::env::args()
        .nth(1)
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(120);
    for disc in (2..=limit).filter(|&d| is_squarefree(d) && prime_factors(d).len() % 2 == 1) {
        for level in (1..=limit / disc).filter(|&n| is_squarefree(n) && n.gcd(&disc) == 1) {
            let formula = eichler_class_number(disc, level)?;
            let set = IdealClassSet::new(disc, level)?;
            let mark = if set.len() as u64 == formula {
                ""
            } else {
                "  MISMATCH"
            };
            println!(
                "h({disc:>3},{level:>3}) = {formula:>3}  weights {:?}{mark}",
                set.weights()
            );
        }
    }
    Ok(())
}

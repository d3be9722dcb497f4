//! Ideal classes of the maximal order in the definite algebra of
//! discriminant 41, with Brandt matrices at the first few primes and the
//! Atkin-Lehner involution.
//!
//!     cargo run --example brandt_module -- 41 1

use shimura_aut::arith::primes;
use shimura_aut::quaternion::IdealClassSet;
use shimura_aut::shimura::{eichler_class_number, eichler_mass};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>());
    let disc = args.next().transpose()?.unwrap_or(41);
    let level = args.next().transpose()?.unwrap_or(1);
    let set = IdealClassSet::new(disc, level)?;
    println!(
        "disc {disc}, level {level}: {} classes (Eichler formula {}), mass {}",
        set.len(),
        eichler_class_number(disc, level)?,
        eichler_mass(disc, level)?
    );
    println!("unit weights {:?}", set.weights());
    for p in primes().filter(|p| (disc * level) % p != 0).take(3) {
        let m = set.brandt_matrix(p)?;
        println!("B({p}):");
        for row in &m.entries {
            println!("  {row:?}");
        }
    }
    for w in set.atkin_lehner_all()? {
        println!("W_{} = {:?}", w.q, w.perm);
    }
    Ok(())
}

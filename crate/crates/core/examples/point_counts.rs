//! Point counts |M₀(D,N)(F_ℓ)| of the reduction at good primes ℓ, computed
//! from Brandt matrix traces, written as a CSV that `shimura-aut bound
//! --points` and `survey --points` accept.
//!
//! The first argument is the number of primes ℓ per level, the rest are
//! values of D with N = 1.
//!
//!     cargo run --release --example point_counts -- 40 161 437 1189 > points.csv

use shimura_aut::arith::{primes, Level};
use shimura_aut::cdgraph::reduction_point_count;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args: Vec<u64> = std::env::args()
        .skip(1)
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;
    let count = if args.is_empty() {
        4
    } else {
        args.remove(0) as usize
    };
    let ds = args;
    let ds = if ds.is_empty() {
        vec![161, 437, 1189]
    } else {
        ds
    };
    println!("D,N,ell,count");
    for d in ds {
        let level = Level::new(d, 1)?;
        let p = level.d_primes()[0];
        for ell in primes().filter(|l| (2 * d) % l != 0).take(count) {
            let count = reduction_point_count(&level, p, ell)?;
            println!("{d},1,{ell},{count}");
        }
    }
    Ok(())
}

//! Admissible-automorphism elimination on the dual graph of X₀(1057, 1)
//! at p = 7, where the definite algebra of discriminant 151 has 13 classes.
//!
//!     cargo run --release --example elimination_1057

use shimura_aut::arith::Level;
use shimura_aut::autbound::{candidate_vertex_perms, eliminate};
use shimura_aut::cdgraph::{stable_model_graph, BadFiber};
use shimura_aut::shimura::genus;

fn main() -> shimura_aut::Result<()> {
    let level = Level::new(1057, 1)?;
    let g = genus(&level)?;
    let fiber = BadFiber::new(&level, 7)?;
    println!(
        "genus {g}, {} classes, weights {:?}",
        fiber.h(),
        fiber.classes.weights()
    );
    let perms = candidate_vertex_perms(&fiber.classes, &fiber.brandt, &fiber.atkin_lehner);
    println!("{} candidate vertex permutations", perms.len());
    for p in &perms {
        println!("  {p:?}");
    }
    let stable = stable_model_graph(&fiber.graph, g)?.graph;
    println!(
        "stable graph: {} vertices, {} edges",
        stable.vertices.len(),
        stable.edges.len()
    );
    let e = eliminate(&fiber, g)?;
    println!(
        "{} cosets, trivial subgroup of order {}, {} survivors, identity coset eliminated: {}",
        e.cosets,
        e.trivial_subgroup,
        e.survivors.len(),
        e.identity_coset_eliminated
    );
    println!("s = r proved: {}", e.proves_equality());
    Ok(())
}

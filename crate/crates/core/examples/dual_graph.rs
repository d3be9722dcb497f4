//! Dual graph of the special fiber of X₀(D, N) at p | D in all four models,
//! as Graphviz.
//!
//!     cargo run --example dual_graph -- 205 1 5 | dot -Tsvg > g.svg

use shimura_aut::arith::Level;
use shimura_aut::cdgraph::{desingularize, minimal_model_graph, stable_model_graph, BadFiber};
use shimura_aut::shimura::genus;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>());
    let d = args.next().transpose()?.unwrap_or(205);
    let n = args.next().transpose()?.unwrap_or(1);
    let p = args.next().transpose()?.unwrap_or(5);
    let level = Level::new(d, n)?;
    let g = genus(&level)?;
    let fiber = BadFiber::new(&level, p)?;
    let raw = &fiber.graph;
    println!(
        "// raw: {} vertices, {} edges, b1 of the desingularization {} = genus {g}",
        raw.vertices.len(),
        raw.edges.len(),
        desingularize(raw).graph.betti_number()
    );
    print!("{}", raw.to_dot());
    if g >= 1 {
        let min = minimal_model_graph(raw, g)?;
        println!("// minimal: {} vertices", min.graph.vertices.len());
    }
    if g >= 2 {
        print!("{}", stable_model_graph(raw, g)?.graph.to_dot());
    }
    Ok(())
}

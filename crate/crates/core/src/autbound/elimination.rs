//! Elimination of exceptional automorphisms through the dual graph at a
//! prime p | D.
//!
//! An automorphism of X induces an automorphism of the stable graph;
//! composing with ω_p if needed it preserves V, and on V it is a
//! permutation σ of the ideal classes preserving weights and commuting
//! with the Brandt matrix at p and with every W_q. Every non-identity
//! automorphism is admissible, and Aut(X) is 2-elementary, so each element
//! of the coset σ·W must extend to an admissible involution of the graph.

use std::collections::{BTreeMap, BTreeSet};

use crate::arith::ExtNat;
use crate::cdgraph::{stable_model_graph, BadFiber, LengthGraph, Side};
use crate::error::{invariant, Result};
use crate::quaternion::{AlPermutation, BrandtMatrix, IdealClassSet};

/// An automorphism of a graph with lengths, as maps on vertex and edge ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphAut {
    pub vertex_map: BTreeMap<usize, usize>,
    pub edge_map: BTreeMap<usize, usize>,
}

impl GraphAut {
    pub fn identity(g: &LengthGraph) -> GraphAut {
        GraphAut {
            vertex_map: g.vertices.iter().map(|v| (v.id, v.id)).collect(),
            edge_map: g.edges.iter().map(|e| (e.id, e.id)).collect(),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().all(|(a, b)| a == b) && self.edge_map.iter().all(|(a, b)| a == b)
    }

    pub fn is_involution(&self) -> bool {
        self.vertex_map
            .iter()
            .all(|(a, b)| self.vertex_map.get(b) == Some(a))
            && self
                .edge_map
                .iter()
                .all(|(a, b)| self.edge_map.get(b) == Some(a))
    }

    /// Bijective on vertices and edges, preserving lengths and incidence.
    pub fn is_valid(&self, g: &LengthGraph) -> bool {
        let vs: BTreeSet<usize> = g.vertices.iter().map(|v| v.id).collect();
        let es: BTreeMap<usize, &crate::cdgraph::Edge> =
            g.edges.iter().map(|e| (e.id, e)).collect();
        let bijective = |m: &BTreeMap<usize, usize>, dom: &BTreeSet<usize>| {
            m.keys().copied().collect::<BTreeSet<_>>() == *dom
                && m.values().copied().collect::<BTreeSet<_>>() == *dom
        };
        if !bijective(&self.vertex_map, &vs)
            || !bijective(&self.edge_map, &es.keys().copied().collect())
        {
            return false;
        }
        if g.vertices
            .iter()
            .any(|v| g.vertex(self.vertex_map[&v.id]).map(|w| w.length) != Some(v.length))
        {
            return false;
        }
        g.edges.iter().all(|e| {
            let f = es[&self.edge_map[&e.id]];
            let (a, b) = (self.vertex_map[&e.from], self.vertex_map[&e.to]);
            f.length == e.length && ((f.from, f.to) == (a, b) || (f.from, f.to) == (b, a))
        })
    }
}

/// No vertex fixed by `aut` has three distinct fixed edges in its star.
/// Loops are not counted: a fixed loop may exchange the two branches of
/// its node, so it does not give a fixed point on the normalization.
pub fn is_admissible(g: &LengthGraph, aut: &GraphAut) -> bool {
    g.vertices
        .iter()
        .filter(|v| aut.vertex_map.get(&v.id) == Some(&v.id))
        .all(|v| {
            g.star(v.id)
                .iter()
                .filter(|e| !e.is_loop() && aut.edge_map.get(&e.id) == Some(&e.id))
                .count()
                < 3
        })
}

type ClassKey = (usize, usize, u64);

/// Parallel edges grouped by unordered endpoints and length.
fn edge_classes(g: &LengthGraph) -> BTreeMap<ClassKey, Vec<usize>> {
    let mut out: BTreeMap<ClassKey, Vec<usize>> = BTreeMap::new();
    for e in &g.edges {
        out.entry((e.from.min(e.to), e.from.max(e.to), e.length))
            .or_default()
            .push(e.id);
    }
    for ids in out.values_mut() {
        ids.sort_unstable();
    }
    out
}

/// The extension of a vertex permutation to edges with the fewest fixed
/// edges: parallel classes mapped to themselves are paired off, leaving one
/// fixed edge when the class has odd size. For an involution on vertices
/// the result is an involution, and it is admissible if any involutive
/// extension is. `None` if the vertex map does not extend.
pub fn minimal_extension(g: &LengthGraph, vertex_map: &BTreeMap<usize, usize>) -> Option<GraphAut> {
    for v in &g.vertices {
        let w = g.vertex(*vertex_map.get(&v.id)?)?;
        if w.length != v.length {
            return None;
        }
    }
    let classes = edge_classes(g);
    let mut edge_map = BTreeMap::new();
    for (&(a, b, len), ids) in &classes {
        let (x, y) = (vertex_map[&a], vertex_map[&b]);
        let key = (x.min(y), x.max(y), len);
        let image = classes.get(&key)?;
        if image.len() != ids.len() {
            return None;
        }
        if key == (a, b, len) {
            for pair in ids.chunks(2) {
                if let [s, t] = *pair {
                    edge_map.insert(s, t);
                    edge_map.insert(t, s);
                } else {
                    edge_map.insert(pair[0], pair[0]);
                }
            }
        } else {
            for (s, t) in ids.iter().zip(image) {
                edge_map.insert(*s, *t);
            }
        }
    }
    Some(GraphAut {
        vertex_map: vertex_map.clone(),
        edge_map,
    })
}

/// Largest 2-elementary subgroup of PGL₂(F̄_p) fixing `fixed` given points.
pub fn stabilizer_bound(p: u64, fixed: usize) -> ExtNat {
    match (p == 2, fixed) {
        (false, 0) => ExtNat::Finite(4),
        (false, 1 | 2) => ExtNat::Finite(2),
        (false, _) => ExtNat::Finite(1),
        (true, 0 | 1) => ExtNat::Infinite,
        (true, _) => ExtNat::Finite(1),
    }
}

/// Can a 2-elementary group of order `order` act faithfully on P¹ over
/// F̄_p preserving point sets of the given sizes?
///
/// For p odd the nontrivial groups are Z/2 (two fixed points, other orbits
/// of size 2) and V₄ (three orbits of size 2, the rest of size 4). For
/// p = 2 a group of order 2^k fixes one point and acts freely elsewhere.
pub fn orbit_sizes_feasible(p: u64, order: u64, sizes: &[usize]) -> bool {
    let order = order as usize;
    if order == 1 {
        return true;
    }
    if p == 2 {
        let off: Vec<usize> = sizes.iter().copied().filter(|c| c % order != 0).collect();
        return match off.as_slice() {
            [] => true,
            [c] => c % order == 1,
            _ => false,
        };
    }
    match order {
        2 => sizes.iter().filter(|c| *c % 2 == 1).count() <= 2,
        4 => sizes.iter().all(|c| c % 2 == 0) && sizes.iter().filter(|c| *c % 4 == 2).count() <= 3,
        _ => false,
    }
}

/// Weight, diagonal entry, sorted row, sorted column and Atkin-Lehner
/// fixedness of a class; a candidate maps each class to one with the same
/// signature.
type Signature = (u64, u64, Vec<u64>, Vec<u64>, Vec<bool>);

/// Weight-preserving permutations σ of the classes with
/// M(σi, σj) = M(i, j) and σ W_q = W_q σ for all q, in lexicographic order.
pub fn candidate_vertex_perms(
    classes: &IdealClassSet,
    m: &BrandtMatrix,
    ws: &[AlPermutation],
) -> Vec<Vec<usize>> {
    let h = classes.len();
    let w = classes.weights();
    let e = &m.entries;
    let signature = |i: usize| {
        let mut row = e[i].clone();
        let mut col: Vec<u64> = (0..h).map(|j| e[j][i]).collect();
        row.sort_unstable();
        col.sort_unstable();
        let fixed: Vec<bool> = ws.iter().map(|q| q.perm[i] == i).collect();
        (w[i], e[i][i], row, col, fixed)
    };
    let sigs: Vec<_> = (0..h).map(signature).collect();
    let mut out = Vec::new();
    let mut sigma = vec![usize::MAX; h];
    let mut used = vec![false; h];

    fn consistent(i: usize, sigma: &[usize], e: &[Vec<u64>], ws: &[AlPermutation]) -> bool {
        let s = sigma[i];
        for j in 0..=i {
            let t = sigma[j];
            if e[i][j] != e[s][t] || e[j][i] != e[t][s] {
                return false;
            }
        }
        for q in ws {
            let wi = q.perm[i];
            if wi <= i && sigma[wi] != q.perm[s] {
                return false;
            }
            // σ(W(j)) = W(σ(j)) for j with W(j) = i
            let pre = q.perm.iter().position(|&x| x == i).unwrap_or(i);
            if pre < i && q.perm[sigma[pre]] != s {
                return false;
            }
        }
        true
    }

    fn search(
        i: usize,
        sigma: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sigs: &[Signature],
        e: &[Vec<u64>],
        ws: &[AlPermutation],
        out: &mut Vec<Vec<usize>>,
    ) {
        let h = sigma.len();
        if i == h {
            out.push(sigma.clone());
            return;
        }
        for s in 0..h {
            if used[s] || sigs[s] != sigs[i] {
                continue;
            }
            sigma[i] = s;
            if consistent(i, sigma, e, ws) {
                used[s] = true;
                search(i + 1, sigma, used, sigs, e, ws, out);
                used[s] = false;
            }
            sigma[i] = usize::MAX;
        }
    }

    search(0, &mut sigma, &mut used, &sigs, e, ws, &mut out);
    out
}

/// Outcome of the elimination at one prime.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Elimination {
    pub p: u64,
    pub candidates: usize,
    /// Number of cosets of the candidates modulo the Atkin-Lehner permutations.
    pub cosets: usize,
    /// Order of the subgroup of ⟨ω_q : q ≠ p⟩ acting trivially on V.
    pub trivial_subgroup: u64,
    /// Representatives of non-identity cosets that could not be eliminated.
    pub survivors: Vec<Vec<usize>>,
    pub identity_coset_eliminated: bool,
}

impl Elimination {
    /// Every automorphism lies in W₀(D,N): s = r.
    pub fn proves_equality(&self) -> bool {
        self.survivors.is_empty() && self.identity_coset_eliminated
    }
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

fn perm_group(h: usize, gens: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut group: BTreeSet<Vec<usize>> = BTreeSet::from([(0..h).collect()]);
    let mut frontier: Vec<Vec<usize>> = group.iter().cloned().collect();
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = compose(g, &x);
            if group.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    group.into_iter().collect()
}

fn lift(h: usize, sigma: &[usize], g: &LengthGraph) -> BTreeMap<usize, usize> {
    g.vertices
        .iter()
        .map(|v| {
            let image = match (v.side, v.class) {
                (Side::V, Some(c)) => sigma[c],
                (Side::VPrime, Some(c)) => h + sigma[c],
                _ => v.id,
            };
            (v.id, image)
        })
        .collect()
}

/// Can τ (a permutation of V extended to V' by ω_p-equivariance) be induced
/// by a non-identity automorphism of X?
fn could_be_induced(h: usize, tau: &[usize], raw: &LengthGraph, stable: &LengthGraph) -> bool {
    if compose(tau, tau).iter().enumerate().any(|(i, &x)| i != x) {
        return false;
    }
    if minimal_extension(raw, &lift(h, tau, raw)).is_none() {
        return false;
    }
    match minimal_extension(stable, &lift(h, tau, stable)) {
        Some(aut) => is_admissible(stable, &aut),
        None => false,
    }
}

/// Try to prove s = r from the dual graph at p.
pub fn eliminate(fiber: &BadFiber, genus: u64) -> Result<Elimination> {
    let h = fiber.h();
    let raw = &fiber.graph;
    let stable = stable_model_graph(raw, genus)?.graph;
    let gens: Vec<Vec<usize>> = fiber.atkin_lehner.iter().map(|w| w.perm.clone()).collect();
    let w_v = perm_group(h, &gens);
    let trivial = (1u64 << gens.len()) / w_v.len() as u64;
    let candidates = candidate_vertex_perms(&fiber.classes, &fiber.brandt, &fiber.atkin_lehner);
    let fail = |what: &str| {
        Err(invariant!(
            "elimination for {} at p = {}: {what}",
            fiber.level,
            fiber.p
        ))
    };

    let cand_set: BTreeSet<&Vec<usize>> = candidates.iter().collect();
    if w_v.iter().any(|w| !cand_set.contains(w)) {
        return fail("an Atkin-Lehner permutation is not a candidate");
    }
    let identity: Vec<usize> = (0..h).collect();
    for w in &w_v {
        if *w != identity && !could_be_induced(h, w, raw, &stable) {
            return fail("an Atkin-Lehner involution is not admissible");
        }
    }

    let classes = edge_classes(&stable);
    let trivial_ext = minimal_extension(&stable, &lift(h, &identity, &stable))
        .ok_or_else(|| invariant!("identity does not extend"))?;
    let vertex_trivial_possible = is_admissible(&stable, &trivial_ext);
    if trivial > 1 && !vertex_trivial_possible {
        return fail("an Atkin-Lehner involution acting trivially on vertices is not admissible");
    }
    // the vertex-trivial automorphisms act faithfully on C_x when x has at
    // least three edges, preserving each class of parallel edges at x
    let mut rigid = false;
    for v in &stable.vertices {
        if stable.star(v.id).iter().filter(|e| !e.is_loop()).count() < 3 {
            continue;
        }
        let sizes: Vec<usize> = classes
            .iter()
            .filter(|(&(a, b, _), _)| a != b && (a == v.id || b == v.id))
            .map(|(_, ids)| ids.len())
            .collect();
        let lone = sizes.iter().filter(|&&c| c == 1).count();
        let bound = stabilizer_bound(fiber.p, lone);
        if ExtNat::Finite(trivial) > bound || !orbit_sizes_feasible(fiber.p, trivial, &sizes) {
            return fail("the Atkin-Lehner group cannot act on a component");
        }
        if ExtNat::Finite(2 * trivial) > bound
            || !orbit_sizes_feasible(fiber.p, 2 * trivial, &sizes)
        {
            rigid = true;
        }
    }
    let identity_coset_eliminated = !vertex_trivial_possible || rigid;

    let mut seen: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut survivors = Vec::new();
    let mut cosets = 0;
    for sigma in &candidates {
        if seen.contains(sigma) {
            continue;
        }
        let coset: Vec<Vec<usize>> = w_v.iter().map(|w| compose(sigma, w)).collect();
        cosets += 1;
        let is_identity_coset = coset.contains(&identity);
        for c in &coset {
            seen.insert(c.clone());
        }
        if is_identity_coset {
            continue;
        }
        if coset
            .iter()
            .all(|tau| could_be_induced(h, tau, raw, &stable))
        {
            survivors.push(sigma.clone());
        }
    }
    Ok(Elimination {
        p: fiber.p,
        candidates: candidates.len(),
        cosets,
        trivial_subgroup: trivial,
        survivors,
        identity_coset_eliminated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Level;
    use crate::cdgraph::{Edge, Vertex};
    use crate::shimura::genus;

    fn graph(n: usize, edges: &[(usize, usize, u64)]) -> LengthGraph {
        LengthGraph {
            p: 5,
            vertices: (0..n)
                .map(|id| Vertex {
                    id,
                    side: Side::V,
                    length: 1,
                    class: None,
                })
                .collect(),
            edges: edges
                .iter()
                .enumerate()
                .map(|(id, &(from, to, length))| Edge {
                    id,
                    from,
                    to,
                    length,
                })
                .collect(),
        }
    }

    #[test]
    fn identity_is_not_admissible_on_a_trivalent_graph() {
        let g = graph(2, &[(0, 1, 1), (0, 1, 1), (0, 1, 1)]);
        let id = GraphAut::identity(&g);
        assert!(id.is_valid(&g));
        assert!(!is_admissible(&g, &id));
        // swapping two of three parallel edges leaves one fixed
        let ext = minimal_extension(&g, &id.vertex_map).unwrap();
        assert!(ext.is_involution() && ext.is_valid(&g) && is_admissible(&g, &ext));
    }

    #[test]
    fn fixed_point_free_is_admissible() {
        let g = graph(2, &[(0, 1, 1), (0, 1, 1), (0, 1, 2)]);
        let swap: BTreeMap<usize, usize> = [(0, 1), (1, 0)].into();
        let ext = minimal_extension(&g, &swap).unwrap();
        assert!(ext.is_valid(&g) && is_admissible(&g, &ext));
        let bad = graph(2, &[(0, 0, 1), (0, 1, 1)]);
        assert!(minimal_extension(&bad, &swap).is_none());
    }

    #[test]
    fn stabilizer_bounds() {
        assert_eq!(stabilizer_bound(5, 0), ExtNat::Finite(4));
        assert_eq!(stabilizer_bound(5, 2), ExtNat::Finite(2));
        assert_eq!(stabilizer_bound(5, 3), ExtNat::Finite(1));
        assert_eq!(stabilizer_bound(2, 1), ExtNat::Infinite);
        assert_eq!(stabilizer_bound(2, 2), ExtNat::Finite(1));
    }

    fn run(d: u64, p: u64) -> (BadFiber, Elimination) {
        let level = Level::new(d, 1).unwrap();
        let fiber = BadFiber::new(&level, p).unwrap();
        let e = eliminate(&fiber, genus(&level).unwrap()).unwrap();
        (fiber, e)
    }

    #[test]
    fn d205() {
        let (fiber, e) = run(205, 5);
        assert_eq!(
            candidate_vertex_perms(&fiber.classes, &fiber.brandt, &fiber.atkin_lehner).len(),
            1
        );
        assert_eq!(e.trivial_subgroup, 2);
        assert!(e.proves_equality());
    }

    #[test]
    fn d697_survives() {
        let (_, e) = run(697, 17);
        assert!(!e.proves_equality());
        assert!(!e.survivors.is_empty());
    }

    #[test]
    fn d1057() {
        let (_, e) = run(1057, 7);
        assert_eq!(e.candidates, 16);
        assert!(e.proves_equality(), "{e:?}");
    }
}

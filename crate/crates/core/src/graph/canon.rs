use super::FeynmanGraph;

/// Isomorphism-invariant key: masses, exponents, φ and D are respected; ids are not.
///
/// Vertices are first split into classes by (φ, self-loops, degree) and only
/// relabelings within a class are tried; the lexicographically least edge
/// listing wins.
pub fn canonical_key(g: &FeynmanGraph) -> String {
    let n = g.num_vertices();
    let mut inv: Vec<(u32, usize, usize)> = vec![(0, 0, 0); n];
    for (v, item) in inv.iter_mut().enumerate() {
        item.0 = g.external[v];
    }
    for e in &g.edges {
        if e.is_self_loop() {
            inv[e.ends.0].1 += 1;
        } else {
            inv[e.ends.0].2 += 1;
            inv[e.ends.1].2 += 1;
        }
    }
    let mut classes: Vec<(u32, usize, usize)> = inv.clone();
    classes.sort();
    classes.dedup();
    let cells: Vec<Vec<usize>> = classes.iter().map(|c| (0..n).filter(|&v| inv[v] == *c).collect()).collect();

    let mut best: Option<Vec<(usize, usize, String, String)>> = None;
    let mut label = vec![0usize; n];
    search(g, &cells, 0, 0, &mut label, &mut best);
    let edges = best.unwrap_or_default();
    // φ per new label is fixed by the class order
    let phis: Vec<String> = cells.iter().zip(&classes).flat_map(|(cell, c)| vec![c.0.to_string(); cell.len()]).collect();
    let body: Vec<String> = edges.iter().map(|(a, b, m, x)| format!("{a}-{b}:{m}:{x}")).collect();
    format!("D{}|V{}|phi[{}]|E[{}]", g.dimension, n, phis.join(","), body.join(","))
}

fn search(
    g: &FeynmanGraph,
    cells: &[Vec<usize>],
    cell: usize,
    offset: usize,
    label: &mut Vec<usize>,
    best: &mut Option<Vec<(usize, usize, String, String)>>,
) {
    if cell == cells.len() {
        let mut edges: Vec<(usize, usize, String, String)> = g
            .edges
            .iter()
            .map(|e| {
                let (a, b) = (label[e.ends.0], label[e.ends.1]);
                (a.min(b), a.max(b), e.mass.clone(), e.exponent.to_string())
            })
            .collect();
        edges.sort();
        if best.as_ref().is_none_or(|b| edges < *b) {
            *best = Some(edges);
        }
        return;
    }
    let members = &cells[cell];
    let mut perm: Vec<usize> = (0..members.len()).collect();
    loop {
        for (i, &v) in members.iter().enumerate() {
            label[v] = offset + perm[i];
        }
        search(g, cells, cell + 1, offset + members.len(), label, best);
        if !next_permutation(&mut perm) {
            break;
        }
    }
}

fn next_permutation(p: &mut [usize]) -> bool {
    if p.len() < 2 {
        return false;
    }
    let mut i = p.len() - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = p.len() - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relabeling_invariant() {
        let a = FeynmanGraph::from_pairs(3, &[(0, 1), (1, 2), (2, 0), (0, 0)], "m", 4);
        let b = FeynmanGraph::from_pairs(3, &[(2, 2), (1, 0), (2, 1), (0, 2)], "m", 4);
        let c = FeynmanGraph::from_pairs(3, &[(0, 1), (1, 2), (2, 0), (1, 1)], "m", 4);
        assert_eq!(canonical_key(&a), canonical_key(&b));
        assert_eq!(canonical_key(&a), canonical_key(&c));
        let d = FeynmanGraph::from_pairs(3, &[(0, 1), (1, 2), (1, 2), (0, 0)], "m", 4);
        assert_ne!(canonical_key(&a), canonical_key(&d));
    }

    #[test]
    fn masses_distinguish() {
        let mut a = FeynmanGraph::from_pairs(2, &[(0, 1), (0, 1)], "m", 4);
        let b = a.clone();
        a.edges[0].mass = "M".into();
        assert_ne!(canonical_key(&a), canonical_key(&b));
    }
}

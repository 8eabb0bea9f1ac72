//! Structured frame families: diagonally dominant extreme rays, factor-width-k
//! index frames, chordal-clique frames, and the constructive decompositions
//! that witness the cone identities behind them.

use std::collections::BTreeSet;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::frames::{Frame, FrameSet, Provenance};
use crate::symmat::SymMatrix;

/// Guard against combinatorial blowup of the index-frame families.
const MAX_FAMILY_SIZE: u128 = 1 << 20;

/// The n^2 extreme-ray frames of the diagonally dominant cone: the standard
/// basis vectors `e_i` plus `(e_i + e_j)/sqrt(2)` and `(e_i - e_j)/sqrt(2)`
/// for i < j, deduplicated up to global sign.
pub fn dd_frames(n: usize) -> Result<FrameSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    let mut frames = Vec::with_capacity(n * n);
    for i in 0..n {
        frames.push(Frame::standard_basis(n, &[i])?);
    }
    let c = 1.0 / 2.0_f64.sqrt();
    for i in 0..n {
        for j in (i + 1)..n {
            for sign in [1.0, -1.0] {
                let mut v = vec![0.0; n];
                v[i] = c;
                v[j] = sign * c;
                frames.push(Frame::from_vector(&v)?);
            }
        }
    }
    debug_assert_eq!(frames.len(), n * n);
    FrameSet::new(frames, Provenance::new("dd", format!("n={n}"), None))
}

fn binomial(n: usize, k: usize) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i + 1) as u128;
    }
    acc
}

/// All size-k subsets of 0..n in lexicographic order.
fn subsets_lex(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // advance to the next lexicographic combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// The C(n, k) index frames of the factor-width-k family, one per size-k
/// subset of coordinates in ascending index order. k = 2 is the scaled
/// diagonally dominant family; k = n is the single identity frame.
pub fn fw_frames(n: usize, k: usize) -> Result<FrameSet> {
    if n == 0 {
        return Err(Error::InvalidArgument("dimension must be >= 1".into()));
    }
    if k == 0 || k > n {
        return Err(Error::InvalidArgument(format!(
            "factor width {k} outside [1, {n}]"
        )));
    }
    let count = binomial(n, k);
    if count > MAX_FAMILY_SIZE {
        return Err(Error::InvalidArgument(format!(
            "C({n},{k}) = {count} frames exceeds the supported family size"
        )));
    }
    let mut frames = Vec::with_capacity(count as usize);
    for subset in subsets_lex(n, k) {
        frames.push(Frame::standard_basis(n, &subset)?);
    }
    FrameSet::new(frames, Provenance::new("fw", format!("n={n} k={k}"), None))
}

/// An undirected chordal graph certified by a perfect elimination ordering,
/// with its maximal cliques enumerated.
#[derive(Debug, Clone)]
pub struct ChordalGraph {
    vertex_count: usize,
    edges: BTreeSet<(usize, usize)>,
    elimination_order: Vec<usize>,
    maximal_cliques: Vec<Vec<usize>>,
}

impl ChordalGraph {
    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.edges
    }

    pub fn elimination_order(&self) -> &[usize] {
        &self.elimination_order
    }

    pub fn maximal_cliques(&self) -> &[Vec<usize>] {
        &self.maximal_cliques
    }
}

fn adjacency(n: usize, edges: &BTreeSet<(usize, usize)>) -> Vec<BTreeSet<usize>> {
    let mut adj = vec![BTreeSet::new(); n];
    for &(u, v) in edges {
        adj[u].insert(v);
        adj[v].insert(u);
    }
    adj
}

/// Lexicographic BFS visit order; ties break by ascending vertex index.
fn lex_bfs(n: usize, adj: &[BTreeSet<usize>]) -> Vec<usize> {
    // partition refinement over an ordered list of cells
    let mut cells: Vec<Vec<usize>> = vec![(0..n).collect()];
    let mut order = Vec::with_capacity(n);
    while !cells.is_empty() {
        let v = cells[0].remove(0);
        order.push(v);
        if cells[0].is_empty() {
            cells.remove(0);
        }
        let mut next = Vec::with_capacity(cells.len() * 2);
        for cell in cells.drain(..) {
            let (hit, miss): (Vec<usize>, Vec<usize>) =
                cell.into_iter().partition(|u| adj[v].contains(u));
            if !hit.is_empty() {
                next.push(hit);
            }
            if !miss.is_empty() {
                next.push(miss);
            }
        }
        cells = next;
    }
    order
}

/// Checks the perfect elimination property of `order` (first vertex
/// eliminated first): for each v, its neighbors later in the order minus the
/// earliest of them must be adjacent to that earliest neighbor.
fn check_peo(
    order: &[usize],
    adj: &[BTreeSet<usize>],
) -> std::result::Result<(), (usize, usize, usize)> {
    let n = order.len();
    let mut pos = vec![0usize; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    for &v in order {
        let mut right: Vec<usize> = adj[v].iter().copied().filter(|&u| pos[u] > pos[v]).collect();
        right.sort_by_key(|&u| pos[u]);
        if let Some((&parent, rest)) = right.split_first() {
            for &w in rest {
                if !adj[parent].contains(&w) {
                    return Err((v, parent, w));
                }
            }
        }
    }
    Ok(())
}

/// Finds a chordless cycle of length >= 4 in a graph known to be non-chordal.
///
/// For every vertex v with two non-adjacent neighbors u, w, a shortest u-w
/// path avoiding the rest of N[v] closes into a chordless cycle through v.
fn find_chordless_cycle(n: usize, adj: &[BTreeSet<usize>]) -> Option<Vec<usize>> {
    for v in 0..n {
        let nbrs: Vec<usize> = adj[v].iter().copied().collect();
        for (a, &u) in nbrs.iter().enumerate() {
            for &w in nbrs.iter().skip(a + 1) {
                if adj[u].contains(&w) {
                    continue;
                }
                // BFS from u to w through vertices not adjacent to v
                let blocked: Vec<bool> = (0..n)
                    .map(|x| x == v || (adj[v].contains(&x) && x != u && x != w))
                    .collect();
                let mut prev = vec![usize::MAX; n];
                let mut queue = std::collections::VecDeque::from([u]);
                let mut seen = vec![false; n];
                seen[u] = true;
                while let Some(x) = queue.pop_front() {
                    if x == w {
                        break;
                    }
                    for &y in &adj[x] {
                        if !seen[y] && !blocked[y] {
                            seen[y] = true;
                            prev[y] = x;
                            queue.push_back(y);
                        }
                    }
                }
                if seen[w] {
                    let mut path = vec![w];
                    let mut cur = w;
                    while cur != u {
                        cur = prev[cur];
                        path.push(cur);
                    }
                    path.push(v);
                    path.reverse(); // v, u, ..., w
                    return Some(path);
                }
            }
        }
    }
    None
}

/// Verifies chordality by lexicographic BFS + perfect elimination check and
/// enumerates the maximal cliques along the ordering.
///
/// Vertices are 0-based. Self-loops are rejected; duplicate edges collapse.
/// Non-chordal input yields [`Error::NotChordal`] carrying one chordless
/// cycle of length >= 4.
pub fn verify_chordal(vertex_count: usize, edges: &[(usize, usize)]) -> Result<ChordalGraph> {
    if vertex_count == 0 {
        return Err(Error::InvalidArgument("graph needs >= 1 vertex".into()));
    }
    let mut set = BTreeSet::new();
    for &(u, v) in edges {
        if u == v {
            return Err(Error::InvalidArgument(format!("self-loop at vertex {u}")));
        }
        if u >= vertex_count || v >= vertex_count {
            return Err(Error::InvalidArgument(format!(
                "edge ({u}, {v}) outside vertex range 0..{vertex_count}"
            )));
        }
        set.insert((u.min(v), u.max(v)));
    }
    let adj = adjacency(vertex_count, &set);
    // the reverse of a lex-BFS visit order is a perfect elimination ordering
    // exactly when the graph is chordal
    let mut order = lex_bfs(vertex_count, &adj);
    order.reverse();
    if check_peo(&order, &adj).is_err() {
        let cycle = find_chordless_cycle(vertex_count, &adj)
            .expect("non-chordal graph must contain a chordless cycle");
        return Err(Error::NotChordal { cycle });
    }

    // candidate cliques {v} U RN(v); maximal ones survive subset filtering
    let mut pos = vec![0usize; vertex_count];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let mut candidates: Vec<BTreeSet<usize>> = Vec::with_capacity(vertex_count);
    for &v in &order {
        let mut clique: BTreeSet<usize> = adj[v]
            .iter()
            .copied()
            .filter(|&u| pos[u] > pos[v])
            .collect();
        clique.insert(v);
        candidates.push(clique);
    }
    candidates.sort_by(|a, b| b.len().cmp(&a.len()).then_with(|| {
        a.iter().collect::<Vec<_>>().cmp(&b.iter().collect::<Vec<_>>())
    }));
    candidates.dedup();
    let mut maximal: Vec<BTreeSet<usize>> = Vec::new();
    for cand in candidates {
        if !maximal.iter().any(|m| cand.is_subset(m)) {
            maximal.push(cand);
        }
    }
    let mut maximal_cliques: Vec<Vec<usize>> = maximal
        .into_iter()
        .map(|c| c.into_iter().collect())
        .collect();
    maximal_cliques.sort();

    Ok(ChordalGraph {
        vertex_count,
        edges: set,
        elimination_order: order,
        maximal_cliques,
    })
}

/// One index frame per maximal clique; sub-dimensions equal the clique sizes.
pub fn chordal_frames(graph: &ChordalGraph) -> Result<FrameSet> {
    let n = graph.vertex_count();
    let mut frames = Vec::with_capacity(graph.maximal_cliques().len());
    for clique in graph.maximal_cliques() {
        frames.push(Frame::standard_basis(n, clique)?);
    }
    FrameSet::new(
        frames,
        Provenance::new(
            "chordal",
            format!("n={n} m={} p={}", graph.edges.len(), graph.maximal_cliques.len()),
            None,
        ),
    )
}

/// Parses the edge-list text format: first line `n m`, then m lines `i j`
/// with 1-based vertex labels. Returns 0-based edges.
pub fn parse_edge_list(text: &str) -> Result<(usize, Vec<(usize, usize)>)> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty edge list".into()))?;
    let mut it = header.split_whitespace();
    let n: usize = it
        .next()
        .ok_or_else(|| Error::Parse("missing vertex count".into()))?
        .parse()
        .map_err(|_| Error::Parse("vertex count is not an integer".into()))?;
    let m: usize = it
        .next()
        .ok_or_else(|| Error::Parse("missing edge count".into()))?
        .parse()
        .map_err(|_| Error::Parse("edge count is not an integer".into()))?;
    if it.next().is_some() {
        return Err(Error::Parse("header has trailing tokens".into()));
    }
    if n == 0 {
        return Err(Error::Parse("vertex count must be >= 1".into()));
    }
    if n > 1_000_000 || m > 4_000_000 {
        return Err(Error::Parse(format!(
            "graph size {n} vertices / {m} edges exceeds supported limits"
        )));
    }
    let mut edges = Vec::with_capacity(m);
    for line in lines.by_ref().take(m) {
        let mut tok = line.split_whitespace();
        let parse = |t: Option<&str>| -> Result<usize> {
            let v: usize = t
                .ok_or_else(|| Error::Parse(format!("malformed edge line: {line:?}")))?
                .parse()
                .map_err(|_| Error::Parse(format!("malformed edge line: {line:?}")))?;
            if v == 0 || v > n {
                return Err(Error::Parse(format!(
                    "vertex label {v} outside 1..={n} on line {line:?}"
                )));
            }
            Ok(v - 1)
        };
        let u = parse(tok.next())?;
        let v = parse(tok.next())?;
        if tok.next().is_some() {
            return Err(Error::Parse(format!("edge line has trailing tokens: {line:?}")));
        }
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(Error::Parse(format!(
            "declared {m} edges but found {}",
            edges.len()
        )));
    }
    if lines.next().is_some() {
        return Err(Error::Parse("trailing lines after declared edges".into()));
    }
    Ok((n, edges))
}

fn spectral_terms(x: &SymMatrix) -> Result<Vec<(DVector<f64>, f64)>> {
    let dec = x.eig()?;
    let min_eig = dec.eigenvalues[x.dim() - 1];
    if min_eig < -1e-10 {
        return Err(Error::NotPsd { min_eig });
    }
    Ok((0..x.dim())
        .map(|i| {
            (
                dec.eigenvectors.column(i).clone_owned(),
                dec.eigenvalues[i].max(0.0),
            )
        })
        .collect())
}

/// Completes a unit vector `u` to an n x s frame whose first column is `u`.
///
/// The remaining columns come from Gram-Schmidt over the standard basis
/// vectors excluding the pivot of largest |u_i| entry, in ascending index
/// order; the completion is fixed for reproducibility.
fn complete_to_frame(u: &DVector<f64>, s: usize) -> Result<Frame> {
    let n = u.len();
    let mut cols = DMatrix::zeros(n, s);
    cols.set_column(0, u);
    let pivot = (0..n)
        .max_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap().then(b.cmp(&a)))
        .unwrap();
    let mut filled = 1;
    for j in 0..n {
        if filled == s {
            break;
        }
        if j == pivot {
            continue;
        }
        let mut cand = DVector::zeros(n);
        cand[j] = 1.0;
        for c in 0..filled {
            let col = cols.column(c);
            let proj = col.dot(&cand);
            cand -= col * proj;
        }
        let norm = cand.norm();
        if norm <= 1e-12 {
            return Err(Error::Degenerate(format!(
                "frame completion collapsed at basis vector {j}"
            )));
        }
        cols.set_column(filled, &(cand / norm));
        filled += 1;
    }
    if filled != s {
        return Err(Error::Degenerate(
            "not enough basis vectors to complete the frame".into(),
        ));
    }
    Frame::from_columns(cols, 1e-9)
}

/// Constructive sub-cone decomposition of a PSD matrix: n pairs `(F_i, X_i)`
/// with `X_i` diagonal PSD of size s, `(X_i)_11` the i-th eigenvalue (clipped
/// at zero), and the first column of `F_i` the i-th unit eigenvector, so that
/// `sum_i F_i X_i F_i^T = X`.
pub fn decompose_psd(x: &SymMatrix, s: usize) -> Result<Vec<(Frame, SymMatrix)>> {
    let n = x.dim();
    if s == 0 || s > n {
        return Err(Error::InvalidArgument(format!(
            "sub-dimension {s} outside [1, {n}]"
        )));
    }
    let mut out = Vec::with_capacity(n);
    for (u, lambda) in spectral_terms(x)? {
        let frame = complete_to_frame(&u, s)?;
        let mut wit = DMatrix::zeros(s, s);
        wit[(0, 0)] = lambda;
        out.push((frame, SymMatrix::from_dense(wit)?));
    }
    Ok(out)
}

/// Rank-1 conic decomposition `X = sum_i lambda_i u_i u_i^T` with singleton
/// index sets; terms with zero weight are dropped.
pub fn decompose_psd_general(x: &SymMatrix) -> Result<Vec<(Frame, f64)>> {
    let mut out = Vec::new();
    for (u, lambda) in spectral_terms(x)? {
        if lambda > 0.0 {
            out.push((Frame::from_columns(DMatrix::from_column_slice(u.len(), 1, u.as_slice()), 1e-9)?, lambda));
        }
    }
    Ok(out)
}

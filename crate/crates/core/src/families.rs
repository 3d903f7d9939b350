//! Constructors for the named tree families and the graph transformations
//! used by the verification sweeps.
//!
//! Family constructors attach role labels (`"v1"`, `"u3"`, ...) that identify
//! the arms of the central path and the pendant block, so entry-level checks
//! can address Perron entries by role. Transformations keep vertex ids stable
//! and drop role labels that stop making sense.

use std::collections::BTreeSet;
use std::str::FromStr;

use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexPath};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FamilyError {
    #[error("invalid parameters: {0}")]
    BadParameters(String),
    #[error("({u}, {v}) is not an edge")]
    NotAnEdge { u: usize, v: usize },
    #[error("({u}, {v}) is a pendant edge")]
    PendantEdge { u: usize, v: usize },
    #[error("({u}, {v}) is not a cut edge")]
    NotACutEdge { u: usize, v: usize },
    #[error("invalid decomposition: {0}")]
    InvalidDecomposition(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    T1,
    T2,
    Path,
    Star,
}

impl FromStr for Family {
    type Err = FamilyError;

    fn from_str(s: &str) -> Result<Self, FamilyError> {
        match s {
            "t1" => Ok(Family::T1),
            "t2" => Ok(Family::T2),
            "path" => Ok(Family::Path),
            "star" => Ok(Family::Star),
            other => Err(FamilyError::BadParameters(format!(
                "unknown family {other:?} (expected t1, t2, path or star)"
            ))),
        }
    }
}

/// Family selector plus its order and half-diameter parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FamilySpec {
    pub family: Family,
    pub n: usize,
    /// Half-diameter parameter; ignored by `Path` and `Star`.
    pub k: usize,
}

impl FamilySpec {
    pub fn build(&self) -> Result<Graph, FamilyError> {
        match self.family {
            Family::T1 => t1(self.n, self.k),
            Family::T2 => t2(self.n, self.k),
            Family::Path => path(self.n),
            Family::Star => star(self.n),
        }
    }
}

/// Path on `n` vertices, `0 - 1 - ... - n-1`.
pub fn path(n: usize) -> Result<Graph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadParameters("path needs n >= 1".into()));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).collect();
    Ok(Graph::new(n, &edges)?)
}

/// Star on `n` vertices with center 0.
pub fn star(n: usize) -> Result<Graph, FamilyError> {
    if n == 0 {
        return Err(FamilyError::BadParameters("star needs n >= 1".into()));
    }
    let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
    Ok(Graph::new(n, &edges)?)
}

/// Odd-diameter minimizer candidate: the path
/// `v_k ... v_1 u_1 ... u_k` on `2k` vertices with `n - 2k` extra pendants
/// at `v_1`. Diameter `2k - 1`.
///
/// Vertex ids follow the path order (`v_k = 0`, `v_1 = k-1`, `u_1 = k`,
/// `u_k = 2k-1`), pendants are `2k..n-1` and carry labels
/// `v_{2k+1}..v_n`.
pub fn t1(n: usize, k: usize) -> Result<Graph, FamilyError> {
    if k < 2 {
        return Err(FamilyError::BadParameters(format!(
            "t1 needs k >= 2, got k={k}"
        )));
    }
    if n < 2 * k {
        return Err(FamilyError::BadParameters(format!(
            "t1 needs n >= 2k, got n={n}, k={k}"
        )));
    }
    let mut edges: Vec<(usize, usize)> = (0..2 * k - 1).map(|i| (i, i + 1)).collect();
    for p in 2 * k..n {
        edges.push((k - 1, p));
    }
    let mut g = Graph::new(n, &edges)?;
    for i in 1..=k {
        g.set_label(format!("v{i}"), k - i);
        g.set_label(format!("u{i}"), k - 1 + i);
    }
    for (j, p) in (2 * k..n).enumerate() {
        g.set_label(format!("v{}", 2 * k + 1 + j), p);
    }
    Ok(g)
}

/// Even-diameter minimizer candidate: the path
/// `v_k ... v_1 v_0 u_1 ... u_k` on `2k + 1` vertices with `n - 2k - 1`
/// extra pendants at the central vertex `v_0`. Diameter `2k`.
pub fn t2(n: usize, k: usize) -> Result<Graph, FamilyError> {
    if k < 1 {
        return Err(FamilyError::BadParameters(format!(
            "t2 needs k >= 1, got k={k}"
        )));
    }
    if n < 2 * k + 1 {
        return Err(FamilyError::BadParameters(format!(
            "t2 needs n >= 2k + 1, got n={n}, k={k}"
        )));
    }
    let mut edges: Vec<(usize, usize)> = (0..2 * k).map(|i| (i, i + 1)).collect();
    for p in 2 * k + 1..n {
        edges.push((k, p));
    }
    let mut g = Graph::new(n, &edges)?;
    g.set_label("v0", k);
    for i in 1..=k {
        g.set_label(format!("v{i}"), k - i);
        g.set_label(format!("u{i}"), k + i);
    }
    for (j, p) in (2 * k + 1..n).enumerate() {
        g.set_label(format!("v{}", 2 * k + 1 + j), p);
    }
    Ok(g)
}

/// `G(p, q)`: two disjoint pendant paths of `p` and `q` new vertices rooted
/// at `w`.
pub fn attach_pendant_paths(g: &Graph, w: usize, p: usize, q: usize) -> Result<Graph, FamilyError> {
    if g.order() < 2 {
        return Err(FamilyError::BadParameters(
            "base graph must be nontrivial (order >= 2)".into(),
        ));
    }
    if w >= g.order() {
        return Err(FamilyError::Graph(GraphError::VertexOutOfRange {
            v: w,
            n: g.order(),
        }));
    }
    if !g.is_connected() {
        return Err(FamilyError::Graph(GraphError::NotConnected));
    }
    let n0 = g.order();
    let mut edges = g.edges();
    let mut prev = w;
    for i in 0..p {
        edges.push((prev, n0 + i));
        prev = n0 + i;
    }
    prev = w;
    for i in 0..q {
        edges.push((prev, n0 + p + i));
        prev = n0 + p + i;
    }
    let mut out = Graph::new(n0 + p + q, &edges)?;
    for (role, &v) in g.labels() {
        out.set_label(role.clone(), v);
    }
    Ok(out)
}

/// Contracts the non-pendant cut edge `uv` and re-attaches one pendant to the
/// merged vertex, preserving the order. The merged vertex keeps `u`'s id and
/// labels; `v`'s id is reused for the new pendant.
pub fn contract_cut_edge(g: &Graph, u: usize, v: usize) -> Result<Graph, FamilyError> {
    if !g.is_connected() {
        return Err(FamilyError::Graph(GraphError::NotConnected));
    }
    if u >= g.order() || v >= g.order() || !g.has_edge(u, v) {
        return Err(FamilyError::NotAnEdge { u, v });
    }
    if g.degree(u) == 1 || g.degree(v) == 1 {
        return Err(FamilyError::PendantEdge { u, v });
    }
    if !is_cut_edge(g, u, v) {
        return Err(FamilyError::NotACutEdge { u, v });
    }
    let mut edges = Vec::with_capacity(g.edge_count());
    for (a, b) in g.edges() {
        if (a, b) == (u.min(v), u.max(v)) {
            continue;
        }
        let a2 = if a == v { u } else { a };
        let b2 = if b == v { u } else { b };
        edges.push((a2, b2));
    }
    edges.push((u, v)); // fresh pendant on the merged vertex
    let mut out = Graph::new(g.order(), &edges)?;
    for (role, &x) in g.labels() {
        if x != v {
            out.set_label(role.clone(), x);
        }
    }
    Ok(out)
}

fn is_cut_edge(g: &Graph, u: usize, v: usize) -> bool {
    // BFS from u with the edge uv removed; uv is a cut edge iff v becomes
    // unreachable.
    let mut seen = vec![false; g.order()];
    let mut stack = vec![u];
    seen[u] = true;
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if (x, y) == (u, v) || (x, y) == (v, u) {
                continue;
            }
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    !seen[v]
}

/// Moves every edge between the junction `v0` and the part spanned by
/// `g3_vertices` over to `va`. The graph must split at `v0` into the moved
/// part, the part holding `va` and at least one further nontrivial part.
pub fn reattach_branch(
    g: &Graph,
    v0: usize,
    va: usize,
    g3_vertices: &BTreeSet<usize>,
) -> Result<Graph, FamilyError> {
    let n = g.order();
    if v0 >= n {
        return Err(FamilyError::Graph(GraphError::VertexOutOfRange {
            v: v0,
            n,
        }));
    }
    if va >= n {
        return Err(FamilyError::Graph(GraphError::VertexOutOfRange {
            v: va,
            n,
        }));
    }
    if !g.is_connected() {
        return Err(FamilyError::Graph(GraphError::NotConnected));
    }
    if va == v0 {
        return Err(FamilyError::InvalidDecomposition(
            "reattachment target equals the junction vertex".into(),
        ));
    }
    if g3_vertices.is_empty() {
        return Err(FamilyError::InvalidDecomposition(
            "the moved part has no vertices".into(),
        ));
    }
    if g3_vertices.contains(&v0) {
        return Err(FamilyError::InvalidDecomposition(
            "the moved part must not contain the junction vertex".into(),
        ));
    }
    if let Some(&bad) = g3_vertices.iter().find(|&&x| x >= n) {
        return Err(FamilyError::Graph(GraphError::VertexOutOfRange {
            v: bad,
            n,
        }));
    }
    if g3_vertices.contains(&va) {
        return Err(FamilyError::InvalidDecomposition(
            "the reattachment target lies inside the moved part".into(),
        ));
    }
    let comp = components_without(g, v0);
    let mut moved_comps = BTreeSet::new();
    for &x in g3_vertices {
        moved_comps.insert(comp[x]);
    }
    for (x, &c) in comp.iter().enumerate() {
        if x != v0 && moved_comps.contains(&c) && !g3_vertices.contains(&x) {
            return Err(FamilyError::InvalidDecomposition(
                "the moved part must be a union of whole branches at the junction vertex".into(),
            ));
        }
    }
    let remaining: BTreeSet<usize> = comp
        .iter()
        .enumerate()
        .filter(|&(x, c)| x != v0 && !moved_comps.contains(c))
        .map(|(_, &c)| c)
        .collect();
    if remaining.len() < 2 {
        return Err(FamilyError::InvalidDecomposition(
            "fewer than two branches remain besides the moved part".into(),
        ));
    }
    let mut edges = Vec::with_capacity(g.edge_count());
    for (a, b) in g.edges() {
        let touches_junction = a == v0 || b == v0;
        let other = if a == v0 { b } else { a };
        if touches_junction && g3_vertices.contains(&other) {
            edges.push((va, other));
        } else {
            edges.push((a, b));
        }
    }
    let mut out = Graph::new(n, &edges)?;
    for (role, &x) in g.labels() {
        out.set_label(role.clone(), x);
    }
    Ok(out)
}

/// Component index for every vertex of `g - v0` (`v0` gets `usize::MAX`).
fn components_without(g: &Graph, v0: usize) -> Vec<usize> {
    let n = g.order();
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    for start in 0..n {
        if start == v0 || comp[start] != usize::MAX {
            continue;
        }
        comp[start] = next;
        let mut stack = vec![start];
        while let Some(x) = stack.pop() {
            for &y in g.neighbors(x) {
                if y != v0 && comp[y] == usize::MAX {
                    comp[y] = next;
                    stack.push(y);
                }
            }
        }
        next += 1;
    }
    comp
}

/// Replaces every nontrivial off-path branch of a tree by a star centered at
/// its attachment vertex on the path. Order is preserved; role labels survive
/// only on path vertices.
pub fn star_collapse(g: &Graph, dpath: &VertexPath) -> Result<Graph, FamilyError> {
    if !g.is_tree() {
        return Err(FamilyError::Graph(GraphError::NotATree));
    }
    // Re-validate against this graph: the path may have been built elsewhere.
    let dpath = VertexPath::new(g, dpath.vertices().to_vec())?;
    if dpath.edge_count() != g.diameter()? {
        return Err(FamilyError::BadParameters(
            "path length does not equal the diameter".into(),
        ));
    }
    let verts = dpath.vertices();
    let mut on_path = vec![false; g.order()];
    for &v in verts {
        on_path[v] = true;
    }
    let path_edge = |a: usize, b: usize| {
        verts
            .windows(2)
            .any(|w| (w[0] == a && w[1] == b) || (w[0] == b && w[1] == a))
    };
    let mut edges: Vec<(usize, usize)> = verts.windows(2).map(|w| (w[0], w[1])).collect();
    for &c in verts {
        // branch vertices reachable from c without crossing path edges
        let mut stack: Vec<usize> = g
            .neighbors(c)
            .iter()
            .copied()
            .filter(|&w| !path_edge(c, w))
            .collect();
        let mut seen = BTreeSet::new();
        while let Some(x) = stack.pop() {
            if seen.insert(x) {
                for &y in g.neighbors(x) {
                    if y != c && !seen.contains(&y) {
                        stack.push(y);
                    }
                }
            }
        }
        for &w in &seen {
            edges.push((c, w));
        }
    }
    let mut out = Graph::new(g.order(), &edges)?;
    for (role, &x) in g.labels() {
        if on_path[x] {
            out.set_label(role.clone(), x);
        }
    }
    Ok(out)
}

/// The tree minimizing the distance spectral radius for the given order and
/// diameter: the odd-diameter family for odd `d`, the even-diameter family
/// for even `d`.
pub fn extremal_tree(n: usize, d: usize) -> Result<Graph, FamilyError> {
    if n == 2 && d == 1 {
        return path(2);
    }
    if d < 2 || n < 2 || d > n - 1 {
        return Err(FamilyError::BadParameters(format!(
            "no extremal tree for n={n}, d={d}"
        )));
    }
    if d % 2 == 1 {
        t1(n, d.div_ceil(2))
    } else {
        t2(n, d / 2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{spectral_radius, SolverConfig};

    fn rho(g: &Graph) -> f64 {
        spectral_radius(&g.distance_matrix().unwrap(), &SolverConfig::default())
            .unwrap()
            .rho
    }

    #[test]
    fn t1_without_pendants_is_a_path() {
        for k in 2..=4 {
            let g = t1(2 * k, k).unwrap();
            assert_eq!(g.edges(), path(2 * k).unwrap().edges());
        }
    }

    #[test]
    fn t1_structure() {
        let g = t1(6, 2).unwrap();
        let mut degs: Vec<_> = (0..6).map(|v| g.degree(v)).collect();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(degs, vec![4, 2, 1, 1, 1, 1]);
        // v1 adjacent to v2, u1 and the two pendants
        let v1 = g.label_of("v1").unwrap();
        assert_eq!(g.degree(v1), 4);
        assert_eq!(t1(9, 3).unwrap().diameter().unwrap(), 5);
        assert_eq!(t1(8, 3).unwrap().diameter().unwrap(), 5);
    }

    #[test]
    fn t1_labels_cover_roles() {
        let g = t1(8, 3).unwrap();
        for role in ["v1", "v2", "v3", "u1", "u2", "u3", "v7", "v8"] {
            assert!(g.label_of(role).is_some(), "missing {role}");
        }
        // v1 is adjacent to u1 on the central path
        assert!(g.has_edge(g.label_of("v1").unwrap(), g.label_of("u1").unwrap()));
    }

    #[test]
    fn t1_grid_structure() {
        for k in 2..=6 {
            for n in 2 * k..=2 * k + 8 {
                let g = t1(n, k).unwrap();
                assert_eq!(g.order(), n);
                assert!(g.is_tree());
                assert_eq!(g.diameter().unwrap(), 2 * k - 1);
                if n > 2 * k {
                    let hubs = (0..n).filter(|&v| g.degree(v) == n - 2 * k + 2).count();
                    assert_eq!(hubs, 1, "n={n}, k={k}");
                }
            }
        }
    }

    #[test]
    fn t2_grid_structure() {
        for k in 1..=6 {
            for n in 2 * k + 1..=2 * k + 8 {
                let g = t2(n, k).unwrap();
                assert_eq!(g.order(), n);
                assert!(g.is_tree());
                assert_eq!(g.diameter().unwrap(), 2 * k);
            }
        }
    }

    #[test]
    fn t1_parameter_errors() {
        assert!(matches!(t1(6, 1), Err(FamilyError::BadParameters(_))));
        assert!(matches!(t1(3, 2), Err(FamilyError::BadParameters(_))));
    }

    #[test]
    fn t2_structure() {
        for k in 1..=4 {
            let g = t2(2 * k + 1, k).unwrap();
            assert_eq!(g.edges(), path(2 * k + 1).unwrap().edges());
        }
        // k = 1 with pendants is a star
        let g = t2(7, 1).unwrap();
        let center = g.label_of("v0").unwrap();
        assert_eq!(g.degree(center), 6);
        assert_eq!(g.diameter().unwrap(), 2);
        assert_eq!(t2(8, 2).unwrap().diameter().unwrap(), 4);
    }

    #[test]
    fn attach_pendant_paths_cases() {
        let p2 = path(2).unwrap();
        let same = attach_pendant_paths(&p2, 0, 0, 0).unwrap();
        assert_eq!(same.edges(), p2.edges());

        let g = attach_pendant_paths(&p2, 0, 1, 1).unwrap();
        assert_eq!(g.order(), 4);
        assert!(g.is_tree());

        assert!(matches!(
            attach_pendant_paths(&p2, 9, 1, 1),
            Err(FamilyError::Graph(GraphError::VertexOutOfRange { .. }))
        ));
        let k1 = Graph::new(1, &[]).unwrap();
        assert!(matches!(
            attach_pendant_paths(&k1, 0, 1, 1),
            Err(FamilyError::BadParameters(_))
        ));
    }

    #[test]
    fn pendant_path_shift_increases_rho() {
        // shifting weight to the longer arm grows the spectral radius
        let base = path(2).unwrap();
        let before = rho(&attach_pendant_paths(&base, 0, 2, 2).unwrap());
        let after = rho(&attach_pendant_paths(&base, 0, 3, 1).unwrap());
        assert!(after > before + 1e-9, "{after} vs {before}");
    }

    #[test]
    fn contract_cut_edge_on_p4() {
        let p4 = path(4).unwrap();
        let g = contract_cut_edge(&p4, 1, 2).unwrap();
        assert_eq!(g.order(), 4);
        let mut degs: Vec<_> = (0..4).map(|v| g.degree(v)).collect();
        degs.sort_unstable_by(|a, b| b.cmp(a));
        assert_eq!(degs, vec![3, 1, 1, 1]); // the 4-vertex star
        assert!(rho(&p4) > rho(&g) + 1e-9);
    }

    #[test]
    fn contract_cut_edge_errors() {
        let p4 = path(4).unwrap();
        assert_eq!(
            contract_cut_edge(&p4, 0, 2),
            Err(FamilyError::NotAnEdge { u: 0, v: 2 })
        );
        assert_eq!(
            contract_cut_edge(&p4, 0, 1),
            Err(FamilyError::PendantEdge { u: 0, v: 1 })
        );
        let square = Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 0), (1, 4)]).unwrap();
        assert_eq!(
            contract_cut_edge(&square, 0, 1),
            Err(FamilyError::NotACutEdge { u: 0, v: 1 })
        );
    }

    #[test]
    fn contract_preserves_order() {
        for (n, k) in [(7, 2), (8, 3), (9, 2)] {
            let g = t1(n, k).unwrap();
            for (u, v) in g.edges() {
                if g.degree(u) > 1 && g.degree(v) > 1 {
                    let h = contract_cut_edge(&g, u, v).unwrap();
                    assert_eq!(h.order(), g.order());
                    assert!(h.is_tree());
                }
            }
        }
    }

    #[test]
    fn reattach_branch_moves_edges() {
        // path 0-1-2-3-4 with pendant 5 at the center 2
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]).unwrap();
        let moved: BTreeSet<usize> = [5].into();
        let h = reattach_branch(&g, 2, 1, &moved).unwrap();
        assert_eq!(h.edge_count(), g.edge_count());
        assert!(h.has_edge(1, 5));
        assert!(!h.has_edge(2, 5));
        assert!(rho(&h) > rho(&g) + 1e-9);
    }

    #[test]
    fn reattach_branch_rejects_bad_decompositions() {
        let g = Graph::new(6, &[(0, 1), (1, 2), (2, 3), (3, 4), (2, 5)]).unwrap();
        let err = |r: Result<Graph, FamilyError>| match r {
            Err(FamilyError::InvalidDecomposition(msg)) => msg,
            other => panic!("expected InvalidDecomposition, got {other:?}"),
        };
        assert!(err(reattach_branch(&g, 2, 2, &[5].into())).contains("junction"));
        assert!(err(reattach_branch(&g, 2, 1, &BTreeSet::new())).contains("no vertices"));
        assert!(err(reattach_branch(&g, 2, 5, &[5].into())).contains("inside the moved part"));
        // {3} is not a whole branch: 4 hangs below it
        assert!(err(reattach_branch(&g, 2, 1, &[3].into())).contains("whole branches"));
        // moving both non-target branches leaves only one part
        assert!(err(reattach_branch(&g, 2, 1, &[3, 4, 5].into())).contains("fewer than two"));
    }

    #[test]
    fn star_collapse_cases() {
        // caterpillar: already collapsed, fixed point
        let cat = t1(7, 2).unwrap();
        let dp = cat.d_path().unwrap();
        let out = star_collapse(&cat, &dp).unwrap();
        assert_eq!(out.edges(), cat.edges());

        // depth-2 branch of 3 vertices at an interior path vertex
        let g = Graph::new(
            9,
            &[
                (0, 1),
                (1, 2),
                (2, 3),
                (3, 4),
                (4, 5),
                (2, 6),
                (6, 7),
                (6, 8),
            ],
        )
        .unwrap();
        let dp = g.d_path().unwrap();
        let out = star_collapse(&g, &dp).unwrap();
        assert_eq!(out.order(), g.order());
        assert!(out.is_tree());
        assert_eq!(out.degree(2), 5); // 6, 7, 8 all became pendants of 2
        assert_eq!(out.diameter().unwrap(), g.diameter().unwrap());
        assert!(rho(&g) > rho(&out) + 1e-9);
    }

    #[test]
    fn star_collapse_rejects_non_paths() {
        let g = t1(7, 2).unwrap();
        let other = path(7).unwrap();
        let foreign = other.d_path().unwrap();
        assert!(star_collapse(&g, &foreign).is_err());
    }

    #[test]
    fn extremal_tree_dispatch() {
        let e = extremal_tree(6, 3).unwrap();
        assert_eq!(e.edges(), t1(6, 2).unwrap().edges());
        let e = extremal_tree(7, 4).unwrap();
        assert_eq!(e.edges(), t2(7, 2).unwrap().edges());
        for n in 2..=8 {
            let e = extremal_tree(n, n - 1).unwrap();
            assert_eq!(e.edges(), path(n).unwrap().edges());
        }
        assert!(extremal_tree(5, 1).is_err());
        assert!(extremal_tree(4, 4).is_err());
        assert!(extremal_tree(1, 0).is_err());
    }

    #[test]
    fn family_spec_and_parsing() {
        assert_eq!("t1".parse::<Family>().unwrap(), Family::T1);
        assert!("t3".parse::<Family>().is_err());
        let spec = FamilySpec {
            family: Family::Star,
            n: 5,
            k: 0,
        };
        let g = spec.build().unwrap();
        assert_eq!(g.degree(0), 4);
    }
}

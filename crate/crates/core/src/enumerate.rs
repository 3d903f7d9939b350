//! Exhaustive enumeration of non-isomorphic trees with canonical codes and a
//! diameter-keyed on-disk cache.
//!
//! Rooted trees are generated by the classic level-sequence successor walk
//! (each canonical sequence visited once, in decreasing lexicographic order);
//! free-tree representatives are kept by deduplicating on the center-rooted
//! canonical code. Streams are sorted by code, so repeated runs are
//! byte-for-byte reproducible.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, GraphJson};

/// Enumeration cap: everything stays comfortably in memory below this order.
pub const MAX_ENUM_ORDER: usize = 16;

/// Bump when the canonical code or the cache layout changes.
pub const CODEC_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum EnumerateError {
    #[error("order {n} exceeds the enumeration cap {max}")]
    OrderTooLarge { n: usize, max: usize },
    #[error("no tree has order {n} and diameter {d}")]
    Infeasible { n: usize, d: usize },
    #[error("not a tree")]
    NotATree,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("cache io: {0}")]
    Io(#[from] std::io::Error),
    #[error("cache format: {0}")]
    Format(#[from] serde_json::Error),
}

/// Isomorphism-invariant byte string for a tree: the subtree code of the
/// center (marker `C`) or of both halves around the central edge in sorted
/// order (marker `B`).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalCode(Vec<u8>);

impl CanonicalCode {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        // codes are built from ASCII markers and parentheses only
        std::str::from_utf8(&self.0).expect("canonical codes are ASCII")
    }
}

impl fmt::Display for CanonicalCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Center-rooted canonical code of a tree.
pub fn canonical_code(g: &Graph) -> Result<CanonicalCode, EnumerateError> {
    if !g.is_tree() {
        return Err(EnumerateError::NotATree);
    }
    let centers = tree_centers(g);
    let code = match centers.as_slice() {
        [c] => {
            let mut bytes = vec![b'C'];
            bytes.extend(subtree_code(g, *c, usize::MAX));
            bytes
        }
        [c1, c2] => {
            let a = subtree_code(g, *c1, *c2);
            let b = subtree_code(g, *c2, *c1);
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            let mut bytes = vec![b'B'];
            bytes.extend(lo);
            bytes.extend(hi);
            bytes
        }
        _ => unreachable!("a tree has one or two centers"),
    };
    Ok(CanonicalCode(code))
}

/// Center(s) of a tree by leaf peeling.
fn tree_centers(g: &Graph) -> Vec<usize> {
    let n = g.order();
    if n <= 2 {
        return (0..n).collect();
    }
    let mut degree: Vec<usize> = (0..n).map(|v| g.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut layer: Vec<usize> = (0..n).filter(|&v| degree[v] == 1).collect();
    let mut remaining = n;
    while remaining > 2 {
        remaining -= layer.len();
        let mut next = Vec::new();
        for &leaf in &layer {
            removed[leaf] = true;
            for &w in g.neighbors(leaf) {
                if !removed[w] {
                    degree[w] -= 1;
                    if degree[w] == 1 {
                        next.push(w);
                    }
                }
            }
        }
        layer = next;
    }
    (0..n).filter(|&v| !removed[v]).collect()
}

/// Recursive subtree code: children codes sorted and wrapped in parentheses.
fn subtree_code(g: &Graph, v: usize, parent: usize) -> Vec<u8> {
    let mut children: Vec<Vec<u8>> = g
        .neighbors(v)
        .iter()
        .filter(|&&w| w != parent)
        .map(|&w| subtree_code(g, w, v))
        .collect();
    children.sort();
    let mut code = vec![b'('];
    for child in children {
        code.extend(child);
    }
    code.push(b')');
    code
}

/// One representative per isomorphism class, sorted by canonical code.
pub fn all_trees(n: usize) -> Result<Vec<Graph>, EnumerateError> {
    if n == 0 || n > MAX_ENUM_ORDER {
        return Err(EnumerateError::OrderTooLarge {
            n,
            max: MAX_ENUM_ORDER,
        });
    }
    let mut seen: BTreeMap<CanonicalCode, Graph> = BTreeMap::new();
    for levels in LevelSequences::new(n) {
        let g = tree_from_levels(&levels);
        let code = canonical_code(&g).expect("generated graphs are trees");
        seen.entry(code).or_insert(g);
    }
    Ok(seen.into_values().collect())
}

/// Canonical rooted-tree level sequences in decreasing lexicographic order,
/// starting from the path `[1, 2, ..., n]` and ending at the star
/// `[1, 2, 2, ..., 2]`.
struct LevelSequences {
    levels: Vec<usize>,
    done: bool,
}

impl LevelSequences {
    fn new(n: usize) -> Self {
        LevelSequences {
            levels: (1..=n).collect(),
            done: false,
        }
    }
}

impl Iterator for LevelSequences {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let current = self.levels.clone();
        // successor: truncate at the rightmost entry above 2 and tile the
        // block starting at its parent
        match self.levels.iter().rposition(|&l| l > 2) {
            None => self.done = true,
            Some(p) => {
                let q = (0..p)
                    .rev()
                    .find(|&i| self.levels[i] == self.levels[p] - 1)
                    .expect("parent level exists");
                let width = p - q;
                for i in p..self.levels.len() {
                    self.levels[i] = self.levels[i - width];
                }
            }
        }
        Some(current)
    }
}

/// Builds the tree encoded by a level sequence: the parent of vertex `i` is
/// the nearest earlier vertex one level up.
fn tree_from_levels(levels: &[usize]) -> Graph {
    let n = levels.len();
    let mut edges = Vec::with_capacity(n.saturating_sub(1));
    for i in 1..n {
        let parent = (0..i)
            .rev()
            .find(|&j| levels[j] == levels[i] - 1)
            .expect("canonical level sequences have parents");
        edges.push((parent, i));
    }
    Graph::new(n, &edges).expect("level sequence encodes a valid tree")
}

/// All non-isomorphic trees of a given order and diameter.
#[derive(Debug, Clone)]
pub struct TreeClass {
    pub n: usize,
    pub d: usize,
    /// Members sorted by canonical code.
    pub members: Vec<Graph>,
}

/// Some tree with order `n` and diameter `d` exists.
pub fn feasible(n: usize, d: usize) -> bool {
    match n {
        0 => false,
        1 => d == 0,
        2 => d == 1,
        _ => (2..n).contains(&d),
    }
}

pub fn trees_with_diameter(n: usize, d: usize) -> Result<TreeClass, EnumerateError> {
    if n > MAX_ENUM_ORDER {
        return Err(EnumerateError::OrderTooLarge {
            n,
            max: MAX_ENUM_ORDER,
        });
    }
    if !feasible(n, d) {
        return Err(EnumerateError::Infeasible { n, d });
    }
    let members = all_trees(n)?
        .into_iter()
        .filter(|g| g.diameter().expect("enumerated trees are connected") == d)
        .collect();
    Ok(TreeClass { n, d, members })
}

/// Standard decode of a labeled-tree code word over `0..n-1` of length
/// `n - 2`: repeatedly join the smallest remaining leaf to the next symbol.
/// Used by the seeded sweeps as a uniform labeled-tree sampler and by the
/// test oracle.
pub(crate) fn decode_labeled_tree(seq: &[usize], n: usize) -> Graph {
    if n == 1 {
        return Graph::new(1, &[]).expect("single vertex");
    }
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut edges = Vec::with_capacity(n - 1);
    let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    for &v in seq {
        let std::cmp::Reverse(leaf) = heap.pop().expect("valid code word");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            heap.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = heap.pop().unwrap();
    let std::cmp::Reverse(b) = heap.pop().unwrap();
    edges.push((a, b));
    Graph::new(n, &edges).expect("decoded trees are simple")
}

#[derive(Serialize, Deserialize)]
struct CacheFile {
    codec_version: u32,
    n: usize,
    d: usize,
    trees: Vec<GraphJson>,
}

/// Directory cache of enumerated diameter classes, laid out as
/// `<root>/trees/n{N}/d{D}.json` and invalidated by codec version.
#[derive(Debug, Clone)]
pub struct TreeCache {
    root: PathBuf,
}

impl TreeCache {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        TreeCache { root: root.into() }
    }

    fn class_path(&self, n: usize, d: usize) -> PathBuf {
        self.root
            .join("trees")
            .join(format!("n{n}"))
            .join(format!("d{d}.json"))
    }

    /// Loads a class from disk, or enumerates and stores it.
    pub fn class(&self, n: usize, d: usize) -> Result<TreeClass, EnumerateError> {
        let path = self.class_path(n, d);
        if let Some(class) = self.try_load(&path, n, d) {
            return Ok(class);
        }
        let class = trees_with_diameter(n, d)?;
        self.store(&path, &class)?;
        Ok(class)
    }

    fn try_load(&self, path: &Path, n: usize, d: usize) -> Option<TreeClass> {
        let text = std::fs::read_to_string(path).ok()?;
        let file: CacheFile = serde_json::from_str(&text).ok()?;
        if file.codec_version != CODEC_VERSION || file.n != n || file.d != d {
            return None;
        }
        let members: Option<Vec<Graph>> = file
            .trees
            .iter()
            .map(|j| Graph::from_json(j).ok())
            .collect();
        Some(TreeClass {
            n,
            d,
            members: members?,
        })
    }

    /// Write-temp-then-rename so readers never observe a partial file.
    fn store(&self, path: &Path, class: &TreeClass) -> Result<(), EnumerateError> {
        let dir = path.parent().expect("class path has a parent");
        std::fs::create_dir_all(dir)?;
        let file = CacheFile {
            codec_version: CODEC_VERSION,
            n: class.n,
            d: class.d,
            trees: class.members.iter().map(Graph::to_json).collect(),
        };
        let tmp = path.with_extension("json.tmp");
        std::fs::write(&tmp, serde_json::to_string(&file)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}

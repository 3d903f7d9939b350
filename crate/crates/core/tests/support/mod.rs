//! Shared helpers for the integration suites. The code-word decoder here is
//! the test-side oracle path, kept separate from the library's generators.
#![allow(dead_code)] // each test target compiles its own copy

use disterex_core::Graph;

/// Decodes a labeled-tree code word over `0..n-1` of length `n - 2` by
/// repeatedly joining the smallest remaining leaf to the next symbol.
pub fn decode_prufer(seq: &[usize], n: usize) -> Graph {
    assert!(n >= 2);
    let mut degree = vec![1usize; n];
    for &v in seq {
        degree[v] += 1;
    }
    let mut leaves: std::collections::BinaryHeap<std::cmp::Reverse<usize>> = (0..n)
        .filter(|&v| degree[v] == 1)
        .map(std::cmp::Reverse)
        .collect();
    let mut edges = Vec::with_capacity(n - 1);
    for &v in seq {
        let std::cmp::Reverse(leaf) = leaves.pop().expect("valid code word");
        edges.push((leaf, v));
        degree[v] -= 1;
        if degree[v] == 1 {
            leaves.push(std::cmp::Reverse(v));
        }
    }
    let std::cmp::Reverse(a) = leaves.pop().unwrap();
    let std::cmp::Reverse(b) = leaves.pop().unwrap();
    edges.push((a, b));
    Graph::new(n, &edges).expect("decoded tree is simple")
}

/// Every code word of length `n - 2` over `0..n-1`, visited in odometer
/// order. `n <= 2` yields the single empty word.
pub fn for_each_code_word(n: usize, mut f: impl FnMut(&[usize])) {
    if n <= 2 {
        f(&[]);
        return;
    }
    let mut seq = vec![0usize; n - 2];
    loop {
        f(&seq);
        let mut pos = 0;
        loop {
            if pos == seq.len() {
                return;
            }
            seq[pos] += 1;
            if seq[pos] < n {
                break;
            }
            seq[pos] = 0;
            pos += 1;
        }
    }
}
